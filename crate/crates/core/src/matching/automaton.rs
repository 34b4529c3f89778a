//! Suffix automaton over the reference sequence, annotated with the minimal
//! end position of every state's occurrence set.

use crate::error::{Error, Result};
use crate::matching::WaitingProfile;
use crate::model::Symbol;

const NONE: u32 = u32::MAX;
const DENSE_LIMIT: usize = 16;

#[derive(Debug, Clone)]
enum Edges {
    Dense { width: usize, next: Vec<u32> },
    Sparse(Vec<Vec<(u32, u32)>>),
}

impl Edges {
    fn new(width: usize, capacity: usize) -> Self {
        if width <= DENSE_LIMIT {
            Edges::Dense { width, next: Vec::with_capacity(capacity * width) }
        } else {
            Edges::Sparse(Vec::with_capacity(capacity))
        }
    }

    fn push_empty(&mut self) {
        match self {
            Edges::Dense { width, next } => next.extend(std::iter::repeat_n(NONE, *width)),
            Edges::Sparse(v) => v.push(Vec::new()),
        }
    }

    fn push_copy(&mut self, from: usize) {
        match self {
            Edges::Dense { width, next } => {
                let w = *width;
                next.extend_from_within(from * w..(from + 1) * w);
            }
            Edges::Sparse(v) => {
                let row = v[from].clone();
                v.push(row);
            }
        }
    }

    #[inline]
    fn get(&self, state: u32, c: Symbol) -> u32 {
        match self {
            Edges::Dense { width, next } => next[state as usize * width + c as usize],
            Edges::Sparse(v) => v[state as usize].iter().find(|e| e.0 == c).map_or(NONE, |e| e.1),
        }
    }

    #[inline]
    fn set(&mut self, state: u32, c: Symbol, to: u32) {
        match self {
            Edges::Dense { width, next } => next[state as usize * *width + c as usize] = to,
            Edges::Sparse(v) => {
                let row = &mut v[state as usize];
                match row.iter_mut().find(|e| e.0 == c) {
                    Some(e) => e.1 = to,
                    None => row.push((c, to)),
                }
            }
        }
    }
}

/// Index answering "earliest start of `x[1..l]` in `y`" for every `l` in
/// one walk over `x`. Immutable once built.
#[derive(Debug, Clone)]
pub struct MatchIndex {
    len: Vec<u32>,
    link: Vec<u32>,
    /// Minimal 1-based end position over the state's occurrence set.
    first_end: Vec<u32>,
    edges: Edges,
    alphabet_size: usize,
    y_length: usize,
}

impl MatchIndex {
    pub fn build(y: &[Symbol]) -> Self {
        let alphabet_size = y.iter().max().map_or(1, |&m| m as usize + 1);
        let cap = 2 * y.len().max(1);
        let mut idx = Self {
            len: Vec::with_capacity(cap),
            link: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
            edges: Edges::new(alphabet_size, cap),
            alphabet_size,
            y_length: y.len(),
        };
        idx.push_state(0, NONE, 0, None);
        let mut last = 0u32;
        for (i, &c) in y.iter().enumerate() {
            last = idx.extend(last, c, i as u32 + 1);
        }
        idx.propagate_first_end();
        idx
    }

    fn push_state(&mut self, len: u32, link: u32, first_end: u32, copy_of: Option<u32>) -> u32 {
        let id = self.len.len() as u32;
        self.len.push(len);
        self.link.push(link);
        self.first_end.push(first_end);
        match copy_of {
            Some(q) => self.edges.push_copy(q as usize),
            None => self.edges.push_empty(),
        }
        id
    }

    fn extend(&mut self, last: u32, c: Symbol, end: u32) -> u32 {
        let cur = self.push_state(self.len[last as usize] + 1, NONE, end, None);
        let mut p = last;
        while p != NONE && self.edges.get(p, c) == NONE {
            self.edges.set(p, c, cur);
            p = self.link[p as usize];
        }
        if p == NONE {
            self.link[cur as usize] = 0;
            return cur;
        }
        let q = self.edges.get(p, c);
        if self.len[p as usize] + 1 == self.len[q as usize] {
            self.link[cur as usize] = q;
            return cur;
        }
        // Clones start with no end position of their own; the pass in
        // `propagate_first_end` fills them from their link subtree.
        let clone = self.push_state(self.len[p as usize] + 1, self.link[q as usize], u32::MAX, Some(q));
        while p != NONE && self.edges.get(p, c) == q {
            self.edges.set(p, c, clone);
            p = self.link[p as usize];
        }
        self.link[q as usize] = clone;
        self.link[cur as usize] = clone;
        cur
    }

    /// Every state's occurrence set is the union of those in its suffix-link
    /// subtree, so minima flow from longer to shorter states.
    fn propagate_first_end(&mut self) {
        let n = self.len.len();
        let max_len = self.y_length;
        let mut count = vec![0usize; max_len + 2];
        for &l in &self.len {
            count[l as usize] += 1;
        }
        for i in 1..count.len() {
            count[i] += count[i - 1];
        }
        let mut order = vec![0u32; n];
        for v in (0..n).rev() {
            let l = self.len[v] as usize;
            count[l] -= 1;
            order[count[l]] = v as u32;
        }
        for &v in order.iter().rev() {
            let parent = self.link[v as usize];
            if parent != NONE {
                let fe = self.first_end[v as usize];
                let pe = &mut self.first_end[parent as usize];
                *pe = (*pe).min(fe);
            }
        }
    }

    pub fn state_count(&self) -> usize {
        self.len.len()
    }

    pub fn y_length(&self) -> usize {
        self.y_length
    }

    /// Earliest start of `x[1..l]` in `y` for `l = 1..=n_max`.
    pub fn waiting_profile(&self, x: &[Symbol], n_max: usize) -> Result<WaitingProfile> {
        if n_max > x.len() {
            return Err(Error::PatternTooLong { requested: n_max, available: x.len() });
        }
        let mut values = vec![None; n_max];
        let mut v = 0u32;
        for (l, &c) in x[..n_max].iter().enumerate() {
            if c as usize >= self.alphabet_size {
                break;
            }
            v = self.edges.get(v, c);
            if v == NONE {
                break;
            }
            values[l] = Some(self.first_end[v as usize] as usize - l);
        }
        Ok(WaitingProfile::new(values, self.y_length))
    }
}
