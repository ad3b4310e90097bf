//! Exact function algebra on `[0, 1]`: polynomials, exponential
//! polynomials, the Volterra operator and its relatives, Laguerre
//! polynomials, and certified norms.

pub mod exppoly;
pub mod laguerre;
pub mod norms;
pub mod parse;
pub mod poly;
pub mod volterra;

pub use exppoly::{ExpPoly, Term};
pub use laguerre::{laguerre, laguerre_by_recurrence, laguerre_scaled};
pub use norms::{
    beta_integral, exp_monomial_integral, exp_monomial_integrals, l2_norm_sq, l2_norm_sq_ball,
    poly_l2_sq_exact, sup_bound, L2Sq,
};
pub use parse::parse_exppoly;
pub use poly::Poly;
pub use volterra::{
    apply_poly_of_v, inv_power_i_minus_cv, inv_power_i_plus_cv, mc_conjugate,
    power_affine_iterated, power_affine_volterra, q_of_v_preimage, volterra_apply,
    volterra_star_apply, Direction, Sign, DEGREE_LIMIT,
};
