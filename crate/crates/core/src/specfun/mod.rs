//! Special-function kernel shared by the closed-form metrics.
//!
//! Everything here is pure and deterministic. Functions that can overflow in
//! the ranges produced by the term expansions also come in a log-domain form.

mod bessel;
mod gamma;
mod incgamma;
mod normal;
mod whittaker;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k};
pub use gamma::{digamma, gamma_fn, ln_gamma, ln_gamma_signed, reciprocal_gamma};
pub use incgamma::{reg_lower_gamma, reg_upper_gamma};
pub use normal::gaussian_q;
pub use whittaker::{hypergeometric_u, ln_whittaker_w_scaled, whittaker_w};

pub(crate) use incgamma::regularized_pair;

/// Result of an iterative special-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunResult {
    pub value: f64,
    pub converged: bool,
    pub terms_used: usize,
}

impl SpecFunResult {
    pub(crate) fn new(value: f64, converged: bool, terms_used: usize) -> Self {
        SpecFunResult {
            value,
            converged: converged && value.is_finite(),
            terms_used,
        }
    }
}
