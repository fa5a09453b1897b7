//! Small dense symmetric matrices: just enough for Gaussian potentials.

use std::fmt;

use crate::error::{Error, Result};

/// Pivots below this fraction of the reference scale count as non-positive.
pub const PIVOT_RTOL: f64 = 1e-10;

/// Square row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidValuation("matrix is not square".into()));
        }
        Ok(Matrix { n, data: rows.concat() })
    }

    pub fn from_flat(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidValuation(format!("expected {} matrix entries, got {}", n * n, data.len())));
        }
        Ok(Matrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n).fold(0.0, |m, i| m.max(self[(i, i)].abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        (0..self.n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol * scale))
    }

    pub fn symmetrized(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a != 0.0 {
                    for j in 0..n {
                        out[(i, j)] += a * other[(k, j)];
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len());
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// Principal submatrix on the given row/column indices.
    pub fn select(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// Embeds this matrix into an `n x n` zero matrix at the given positions.
    pub fn pad(&self, n: usize, positions: &[usize]) -> Matrix {
        assert_eq!(positions.len(), self.n);
        let mut out = Matrix::zeros(n);
        for (a, &i) in positions.iter().enumerate() {
            for (b, &j) in positions.iter().enumerate() {
                out[(i, j)] = self[(a, b)];
            }
        }
        out
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.data.chunks(self.n.max(1)).take(self.n).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Lower Cholesky factor `L` with `L Lᵀ = m`.
pub fn cholesky(m: &Matrix) -> Result<Matrix> {
    cholesky_scaled(m, m.max_diag())
}

/// Cholesky factorization where pivots must exceed `PIVOT_RTOL * scale`.
pub fn cholesky_scaled(m: &Matrix, scale: f64) -> Result<Matrix> {
    let n = m.dim();
    let floor = PIVOT_RTOL * scale.max(f64::MIN_POSITIVE);
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        // also rejects NaN
        if d.is_nan() || d <= floor {
            return Err(Error::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

fn solve_factored(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.dim();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Solves `m x = b` for symmetric positive definite `m`.
pub fn solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(m.dim(), b.len());
    Ok(solve_factored(&cholesky(m)?, b))
}

/// Inverse of a symmetric positive definite matrix.
pub fn invert_spd(m: &Matrix) -> Result<Matrix> {
    let l = cholesky(m)?;
    let n = m.dim();
    let mut inv = Matrix::zeros(n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = solve_factored(&l, &e);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn cholesky_identity() {
        assert_eq!(cholesky(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn cholesky_hand_example() {
        let l = cholesky(&m(&[&[4.0, 2.0], &[2.0, 3.0]])).unwrap();
        assert_eq!(l[(0, 0)], 2.0);
        assert_eq!(l[(1, 0)], 1.0);
        assert_eq!(l[(0, 1)], 0.0);
        assert!((l[(1, 1)] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert_eq!(cholesky(&m(&[&[1.0, 2.0], &[2.0, 1.0]])), Err(Error::NotPositiveDefinite));
        assert_eq!(cholesky(&Matrix::zeros(2)), Err(Error::NotPositiveDefinite));
        assert!(cholesky(&Matrix::zeros(0)).is_ok());
    }

    #[test]
    fn reconstruction_and_inverse() {
        let a = m(&[&[5.0, 1.0, 0.5], &[1.0, 4.0, -1.0], &[0.5, -1.0, 3.0]]);
        let l = cholesky(&a).unwrap();
        let back = l.mul(&l.transpose());
        assert!(back.sub(&a).norm_inf() <= 1e-9 * a.norm_inf());
        let inv = invert_spd(&a).unwrap();
        assert!(inv.mul(&a).sub(&Matrix::identity(3)).norm_inf() < 1e-12);
        let x = solve(&a, &[1.0, 2.0, 3.0]).unwrap();
        let ax = a.mul_vec(&x);
        assert!(ax.iter().zip([1.0, 2.0, 3.0]).all(|(u, v)| (u - v).abs() < 1e-12));
    }

    #[test]
    fn pad_and_select_are_inverse() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let p = a.pad(3, &[0, 2]);
        assert_eq!(p[(1, 1)], 0.0);
        assert_eq!(p[(2, 0)], 1.0);
        assert_eq!(p.select(&[0, 2]), a);
    }
}
