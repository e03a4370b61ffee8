//! Group actions on moduli, points and multipliers, and invariance checks for both sewing schemes.

mod eps;
mod group;
mod rho;

pub use eps::{
    act_eps_chars, act_eps_chars_sp4, act_eps_moduli, act_eps_point, eps_invariance_residual, EpsGenerator,
    EpsGroupElement, InvarianceReport,
};
pub use group::{is_symplectic, multipliers, sp4_identity, sp4_mul, transform_characteristics, Sl2, Sp4};
pub use rho::{
    act_rho, act_rho_chars_sp4, act_rho_point, rho_invariance_residual, RhoCharacteristics, RhoGenerator,
    RhoGroupElement, RhoPointImage,
};
