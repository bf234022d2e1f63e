//! q-special functions: shifted factorials, Jackson calculus, the coherent-state
//! normalization series, ₁φ₁ and the q-Bessel J₀.

mod jackson;
mod logmag;
mod params;
mod pochhammer;
mod series;

pub use jackson::{jackson_derivative, jackson_derivative_poly, jackson_integral};
pub use logmag::LogMagnitude;
pub use params::{one_minus_q_pow, structure_phi, DeformationParams, Regime};
pub use pochhammer::{
    log_q_shifted_inf_real, q_factorial_log, q_shifted, q_shifted_inf, q_shifted_qpow,
};
pub use series::{
    norm_log, norm_ratio, norm_series, one_phi_one, q_bessel_j0, sum_ratio_fixed, sum_ratio_series,
    sum_terms, SeriesPolicy, SeriesValue,
};
