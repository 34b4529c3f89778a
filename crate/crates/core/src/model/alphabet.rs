use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol in an [`Alphabet`].
pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAlphabet("size must be at least 1".into()));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidAlphabet(format!("duplicate label {dup:?}")));
        }
        let mut a = Self::new(labels.len())?;
        a.labels = Some(labels);
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, s: Symbol) -> String {
        match &self.labels {
            Some(l) => l[s as usize].clone(),
            None => s.to_string(),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match &self.labels {
            Some(l) if l.len() != self.size => Err(Error::InvalidAlphabet(format!(
                "{} labels for alphabet of size {}",
                l.len(),
                self.size
            ))),
            Some(l) => Self::with_labels(l.clone()).map(|_| ()),
            None => Self::new(self.size).map(|_| ()),
        }
    }

    pub fn check_word(&self, word: &[Symbol]) -> Result<()> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        self.check_symbols(word)
    }

    pub fn check_symbols(&self, word: &[Symbol]) -> Result<()> {
        match word.iter().find(|&&s| s as usize >= self.size) {
            Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, size: self.size }),
            None => Ok(()),
        }
    }
}

/// Number of words of length `n` over `size` letters, saturating.
pub fn word_count(size: usize, n: usize) -> u128 {
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(size as u128))
}

/// Lexicographic enumeration of `A^n`.
#[derive(Debug, Clone)]
pub struct Words {
    size: u32,
    next: Option<Vec<Symbol>>,
}

impl Words {
    pub fn new(size: usize, n: usize) -> Self {
        let next = (size > 0).then(|| vec![0; n]);
        Self { size: size as u32, next }
    }
}

impl Iterator for Words {
    type Item = Vec<Symbol>;

    fn next(&mut self) -> Option<Vec<Symbol>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for pos in (0..succ.len()).rev() {
            succ[pos] += 1;
            if succ[pos] < self.size {
                self.next = Some(succ);
                return Some(current);
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}
