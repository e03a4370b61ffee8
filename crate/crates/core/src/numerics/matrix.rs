//! Dense complex matrices and the factorization-based operations built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::NumericConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { data: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { data: DMatrix::from_fn(rows, cols, |i, j| f(i, j)) }
    }

    /// Builds from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::input(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let m = Self { data: DMatrix::from_row_slice(rows, cols, entries) };
        m.check_finite()?;
        Ok(m)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) })
    }

    /// Assembles `[[b11, b12], [b21, b22]]` from four equally sized square blocks.
    pub fn from_blocks(b11: &Self, b12: &Self, b21: &Self, b22: &Self) -> Result<Self> {
        let n = b11.rows();
        for b in [b11, b12, b21, b22] {
            if b.rows() != n || b.cols() != n {
                return Err(Error::input("block shapes do not match"));
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, ii) = (i / n, i % n);
            let (bj, jj) = (j / n, j % n);
            match (bi, bj) {
                (0, 0) => b11[(ii, jj)],
                (0, 1) => b12[(ii, jj)],
                (1, 0) => b21[(ii, jj)],
                _ => b22[(ii, jj)],
            }
        }))
    }

    /// Block `(a, b)` (zero based) of a matrix made of `n`-by-`n` blocks.
    pub fn block(&self, a: usize, b: usize, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| self[(a * n + i, b * n + j)])
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { data: &self.data * s }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self { data: &self.data * &other.data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self { data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self { data: &self.data - &other.data })
    }

    /// `I - self` for square matrices.
    pub fn identity_minus(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::input("identity_minus needs a square matrix"));
        }
        Self::identity(self.rows()).sub(self)
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.data[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.data[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::numerical("matrix contains NaN or infinite entries"))
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::input("matrix shapes differ"));
        }
        Ok(())
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows())
            .map(|i| {
                Value::Array(
                    (0..self.cols()).map(|j| json!([self.data[(i, j)].re, self.data[(i, j)].im])).collect(),
                )
            })
            .collect();
        Value::Array(rows)
    }

    /// Splits a `2n`-square matrix into blocks labelled "11", "12", "21", "22".
    pub fn to_block_json(&self) -> Result<Value> {
        if !self.is_square() || self.rows() % 2 != 0 {
            return Err(Error::input("block dump needs an even square matrix"));
        }
        let n = self.rows() / 2;
        Ok(json!({
            "order": n,
            "blocks": {
                "11": self.block(0, 0, n).to_json(),
                "12": self.block(0, 1, n).to_json(),
                "21": self.block(1, 0, n).to_json(),
                "22": self.block(1, 1, n).to_json(),
            }
        }))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.data[idx]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.data[idx]
    }
}

/// Estimate of the one-norm condition number, using Hager's power iteration
/// on `A^{-1}` with at most five sweeps.
pub fn condition_estimate(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::input("condition estimate needs a square matrix"));
    }
    a.check_finite()?;
    let n = a.rows();
    if n == 0 {
        return Ok(1.0);
    }
    let lu = a.data.clone().lu();
    let lu_h = a.data.adjoint().lu();
    if !lu.is_invertible() {
        return Ok(f64::INFINITY);
    }
    let mut x = nalgebra::DVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    for _ in 0..5 {
        let y = match lu.solve(&x) {
            Some(y) => y,
            None => return Ok(f64::INFINITY),
        };
        est = y.iter().map(|z| z.norm()).sum::<f64>();
        let sign = y.map(|z| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) });
        let z = match lu_h.solve(&sign) {
            Some(z) => z,
            None => return Ok(f64::INFINITY),
        };
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let ztx: Complex64 = z.iter().zip(x.iter()).map(|(zi, xi)| zi.conj() * xi).sum();
        if zmax <= ztx.re {
            break;
        }
        x = nalgebra::DVector::from_element(n, Complex64::new(0.0, 0.0));
        x[jmax] = Complex64::new(1.0, 0.0);
    }
    Ok(a.norm_one() * est)
}

/// Solves `A X = B` by partial-pivoting LU with a residual check.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix, cfg: &NumericConfig) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::input("lu_solve needs a square coefficient matrix"));
    }
    if a.rows() != b.rows() {
        return Err(Error::input("right-hand side has the wrong number of rows"));
    }
    a.check_finite()?;
    b.check_finite()?;
    let cond = condition_estimate(a)?;
    if !(cond < cfg.max_condition) {
        return Err(Error::numerical(format!(
            "matrix is singular to working precision (condition estimate {cond:.3e})"
        )));
    }
    let lu = a.data.clone().lu();
    let mut x = lu
        .solve(&b.data)
        .ok_or_else(|| Error::numerical("zero pivot in LU factorization"))?;
    let bnorm = b.norm_inf();
    let mut resid = ComplexMatrix { data: &b.data - &a.data * &x };
    if resid.norm_inf() > cfg.solve_residual_tol * bnorm {
        // one step of iterative refinement
        if let Some(dx) = lu.solve(&resid.data) {
            x += dx;
            resid = ComplexMatrix { data: &b.data - &a.data * &x };
        }
    }
    let r = resid.norm_inf();
    if r > cfg.solve_residual_tol * bnorm {
        return Err(Error::numerical(format!(
            "solve residual {r:.3e} exceeds {:.1e} * |B|",
            cfg.solve_residual_tol
        )));
    }
    let out = ComplexMatrix { data: x };
    out.check_finite()?;
    Ok(out)
}

/// Product of the LU pivots with the permutation sign.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::input("determinant needs a square matrix"));
    }
    a.check_finite()?;
    if a.rows() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(a.data.clone().lu().determinant())
}

/// Partial sums `sum_{n<=m} A^n B` for `m = 0..=terms`; the last one is returned
/// together with the norms of the successive increments.
pub fn neumann_solve(a: &ComplexMatrix, b: &ComplexMatrix, terms: usize) -> Result<(ComplexMatrix, Vec<f64>)> {
    let mut term = b.clone();
    let mut acc = b.clone();
    let mut increments = Vec::with_capacity(terms);
    for _ in 0..terms {
        term = a.matmul(&term)?;
        increments.push(term.max_abs());
        acc = acc.add(&term)?;
    }
    acc.check_finite()?;
    Ok((acc, increments))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_matrix(n: usize, seed: u64) -> ComplexMatrix {
        // small deterministic LCG, diagonally weighted so the matrix is well conditioned
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        ComplexMatrix::from_fn(n, n, |i, j| {
            let v = c(next(), next());
            if i == j { v + c(3.0, 0.0) } else { v }
        })
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = test_matrix(5, 3);
        let x = lu_solve(&ComplexMatrix::identity(5), &b, &NumericConfig::default()).unwrap();
        assert!(x.max_abs_diff(&b).unwrap() == 0.0);
    }

    #[test]
    fn random_system_has_small_residual() {
        let a = test_matrix(8, 11);
        let b = test_matrix(8, 12);
        let x = lu_solve(&a, &b, &NumericConfig::default()).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap().norm_inf();
        assert!(r < 1e-12 * b.norm_inf());
    }

    #[test]
    fn duplicated_row_is_singular() {
        let mut a = test_matrix(4, 5);
        for j in 0..4 {
            a[(2, j)] = a[(1, j)];
        }
        let b = ComplexMatrix::identity(4);
        let err = lu_solve(&a, &b, &NumericConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn determinant_of_identity_and_diagonal() {
        assert_eq!(determinant(&ComplexMatrix::identity(6)).unwrap(), c(1.0, 0.0));
        let d = [c(2.0, 1.0), c(-1.0, 0.5), c(0.25, -3.0)];
        let expected = d[0] * d[1] * d[2];
        let got = determinant(&ComplexMatrix::diagonal(&d)).unwrap();
        assert!((got - expected).norm() < 1e-15);
    }

    #[test]
    fn determinant_times_inverse_determinant_is_one() {
        let a = test_matrix(6, 99);
        let inv = lu_solve(&a, &ComplexMatrix::identity(6), &NumericConfig::default()).unwrap();
        let p = determinant(&a).unwrap() * determinant(&inv).unwrap();
        assert!((p - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn rejects_nan() {
        let mut a = ComplexMatrix::identity(3);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert!(determinant(&a).is_err());
        assert!(lu_solve(&a, &ComplexMatrix::identity(3), &NumericConfig::default()).is_err());
    }

    #[test]
    fn condition_estimate_of_diagonal() {
        let a = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1e-3, 0.0), c(10.0, 0.0)]);
        let k = condition_estimate(&a).unwrap();
        assert!((k - 1e4).abs() < 1e-6 * 1e4);
    }

    #[test]
    fn block_round_trip() {
        let a = test_matrix(6, 1);
        let n = 3;
        let back = ComplexMatrix::from_blocks(&a.block(0, 0, n), &a.block(0, 1, n), &a.block(1, 0, n), &a.block(1, 1, n)).unwrap();
        assert_eq!(back, a);
        let js = a.to_block_json().unwrap();
        assert_eq!(js["blocks"]["21"][0][1][0].as_f64().unwrap(), a[(3, 1)].re);
    }

    #[test]
    fn neumann_matches_direct_solve() {
        let a = test_matrix(5, 7).scale(c(0.05, 0.0));
        let b = test_matrix(5, 8);
        let (x, _) = neumann_solve(&a, &b, 60).unwrap();
        let direct = lu_solve(&a.identity_minus().unwrap(), &b, &NumericConfig::default()).unwrap();
        assert!(x.max_abs_diff(&direct).unwrap() < 1e-12);
    }
}
