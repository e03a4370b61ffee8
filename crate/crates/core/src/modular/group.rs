//! Integer matrices: `SL(2, Z)` elements and their `Sp(4, Z)` images.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specialfn::{TorusModulus, TwistPair};

/// `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sl2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::input(format!("[[{a}, {b}], [{c}, {d}]] does not have determinant 1")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    /// `tau -> tau + 1`.
    pub fn t() -> Self {
        Self { a: 1, b: 1, c: 0, d: 1 }
    }

    /// `tau -> -1/tau`.
    pub fn s() -> Self {
        Self { a: 0, b: -1, c: 1, d: 0 }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `c tau + d`.
    pub fn factor(&self, tau: &TorusModulus) -> Complex64 {
        tau.tau() * self.c as f64 + self.d as f64
    }

    pub fn apply(&self, tau: &TorusModulus) -> Result<TorusModulus> {
        let t = tau.tau();
        TorusModulus::new((t * self.a as f64 + self.b as f64) / self.factor(tau))
    }

    /// `(theta, phi) -> (theta^a phi^b, theta^c phi^d)`.
    pub fn apply_twist(&self, tw: &TwistPair) -> TwistPair {
        tw.transform(self.a, self.b, self.c, self.d)
    }
}

/// A `4 x 4` integer matrix in block form `[[A, B], [C, D]]`.
pub type Sp4 = [[i64; 4]; 4];

pub fn sp4_identity() -> Sp4 {
    let mut m = [[0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

pub fn sp4_mul(x: &Sp4, y: &Sp4) -> Sp4 {
    let mut m = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    m
}

/// `M^T J M = J` for `J = [[0, I], [-I, 0]]`.
pub fn is_symplectic(m: &Sp4) -> bool {
    let j: Sp4 = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];
    let mut mt = [[0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            mt[i][k] = m[k][i];
        }
    }
    sp4_mul(&sp4_mul(&mt, &j), m) == j
}

/// Characteristics transported by an `Sp(4, Z)` matrix:
/// `(-beta~, alpha~) = M (-beta, alpha) + (1/2)(-diag(A B^T), diag(C D^T))`.
pub fn transform_characteristics(m: &Sp4, alpha: [f64; 2], beta: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let v = [-beta[0], -beta[1], alpha[0], alpha[1]];
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|k| m[i][k] as f64 * v[k]).sum();
    }
    for i in 0..2 {
        let ab: i64 = (0..2).map(|k| m[i][k] * m[i][k + 2]).sum();
        let cd: i64 = (0..2).map(|k| m[i + 2][k] * m[i + 2][k + 2]).sum();
        out[i] -= 0.5 * ab as f64;
        out[i + 2] += 0.5 * cd as f64;
    }
    ([out[2], out[3]], [-out[0], -out[1]])
}

/// `theta = -e^{-2 pi i beta}`, `phi = -e^{2 pi i alpha}`.
pub fn multipliers(alpha: f64, beta: f64) -> (Complex64, Complex64) {
    (-Complex64::from_polar(1.0, -2.0 * PI * beta), -Complex64::from_polar(1.0, 2.0 * PI * alpha))
}
