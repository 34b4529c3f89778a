//! Minimal dense row-major matrices: enough for stationary solves, matrix
//! powers and row-vector propagation over small state spaces.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have `cols` entries.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Self { rows: rows.len(), cols, data: rows.iter().flatten().copied().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows, "left_mul shape mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == T::zero() {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "right_mul shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, mut exp: usize) -> Self {
        assert_eq!(self.rows, self.cols, "pow needs a square matrix");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.matmul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves a consistent (possibly over-determined) system `A x = b` with
/// `rows >= cols` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when `A` has rank below `cols`, i.e. the solution is not
/// unique.
pub fn solve_full_rank<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n && b.len() == m);
    let mut aug: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i]);
            r
        })
        .collect();
    let scale = aug
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(T::zero(), |acc, &x| acc.max(x.abs()))
        .max(T::one());
    for col in 0..n {
        let (pivot, best) = (col..m)
            .map(|r| (r, aug[r][col].abs()))
            .fold((col, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best <= T::pivot_tol() * scale {
            return None;
        }
        aug.swap(col, pivot);
        let prow = aug[col].clone();
        for row in aug.iter_mut().skip(col + 1) {
            let f = row[col] / prow[col];
            if f != T::zero() {
                for (x, &p) in row[col..].iter_mut().zip(&prow[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s: T = (i + 1..n).map(|j| aug[i][j] * x[j]).sum();
        x[i] = (aug[i][n] - s) / aug[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_repeated_product() {
        let p = Matrix::from_rows(&[vec![0.7f64, 0.3], vec![0.1, 0.9]]).unwrap();
        let mut acc = Matrix::identity(2);
        for _ in 0..7 {
            acc = acc.matmul(&p);
        }
        let fast = p.pow(7);
        for i in 0..2 {
            for j in 0..2 {
                assert!((acc[(i, j)] - fast[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn solve_detects_rank_deficiency() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(solve_full_rank(&a, &[1.0, 2.0, 3.0]).is_none());
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x: Vec<f64> = solve_full_rank(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn vector_products_agree() {
        let p = Matrix::from_rows(&[vec![1.0f32, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(p.left_mul(&[1.0, 1.0]), vec![4.0, 6.0]);
        assert_eq!(p.right_mul(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(p.transpose().right_mul(&[1.0, 1.0]), p.left_mul(&[1.0, 1.0]));
    }
}
