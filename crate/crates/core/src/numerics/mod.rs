//! Linear algebra, quadrature, convergence fits and the shared configuration.

pub mod config;
pub mod matrix;
pub mod quadrature;
pub mod sum;
pub mod tail;

pub use config::NumericConfig;
pub use matrix::{condition_estimate, determinant, lu_solve, neumann_solve, ComplexMatrix};
pub use quadrature::{circle_nodes, circle_quadrature, circle_quadrature_refined, unwrap_phase, winding_number};
pub use sum::{pairwise_sum, pairwise_sum_real};
pub use tail::{differences_estimate, loglog_slope, tail_estimate, TailEstimate};
