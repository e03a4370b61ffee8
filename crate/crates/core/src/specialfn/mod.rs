//! Theta functions, the twisted Weierstrass function and twisted Eisenstein series on a torus.

mod eisenstein;
mod series;
mod theta;
mod types;
mod weierstrass;

pub use eisenstein::{bernoulli_poly, bernoulli_scaled, eisenstein_all, eisenstein_twisted};
pub use theta::{box_radius, prime_form_k, theta1_prime_zero, theta_char, theta_genus_one, MAX_BOX_RADIUS};
pub use types::{frac, Characteristics, PeriodMatrix, TorusModulus, TwistPair};
pub use weierstrass::{p1_series, p1_theta, p_k, p_k_all};
