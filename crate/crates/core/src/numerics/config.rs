use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and truncation defaults shared by every computation.
///
/// Passed explicitly; nothing reads global state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericConfig {
    pub theta_tol: f64,
    pub series_tol: f64,
    pub solve_residual_tol: f64,
    pub quad_points: usize,
    pub trunc_order: usize,
    pub pole_guard: f64,
    pub resonance_guard: f64,
    /// Upper bound on the one-norm condition estimate accepted by `lu_solve`.
    pub max_condition: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            theta_tol: 1e-14,
            series_tol: 1e-12,
            solve_residual_tol: 1e-12,
            quad_points: 64,
            trunc_order: 16,
            pole_guard: 1e-8,
            resonance_guard: 1e-13,
            max_condition: 1e12,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("theta_tol", self.theta_tol),
            ("series_tol", self.series_tol),
            ("solve_residual_tol", self.solve_residual_tol),
            ("pole_guard", self.pole_guard),
            ("resonance_guard", self.resonance_guard),
            ("max_condition", self.max_condition),
        ];
        for (name, v) in reals {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::input(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.trunc_order == 0 {
            return Err(Error::input("trunc_order must be at least 1"));
        }
        if !self.quad_points.is_power_of_two() || self.quad_points < 4 {
            return Err(Error::input(format!(
                "quad_points must be a power of two >= 4, got {}",
                self.quad_points
            )));
        }
        Ok(())
    }

    pub fn with_trunc_order(mut self, n: usize) -> Self {
        self.trunc_order = n;
        self
    }

    pub fn with_quad_points(mut self, m: usize) -> Self {
        self.quad_points = m;
        self
    }
}
