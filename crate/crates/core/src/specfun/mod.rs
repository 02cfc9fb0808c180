//! Real special functions: log-gamma, regularized incomplete gamma, erfc and
//! erfcx, Legendre polynomials off the unit interval, and adaptive quadrature.

mod erf;
mod gamma;
mod legendre;
mod quadrature;

pub use erf::{erfc, erfcx};
pub use gamma::{ln_gamma, ln_gamma_correction, ln_power_exp_over_gamma, log1pmx, reg_gamma_p, reg_gamma_q, RegularizedGammaArgs};
pub use legendre::{legendre_p, ln_legendre_p};
pub use quadrature::{integrate, integrate_semi_infinite, QuadOptions, Quadrature};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecfunError {
    #[error("{function}: argument outside the domain ({detail})")]
    Domain { function: &'static str, detail: String },
    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    Accuracy { estimate: f64, error: f64 },
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> SpecfunError {
    SpecfunError::Domain { function, detail: detail.into() }
}
