//! Self-overlap distributions: the finite-N GinUE joint density of an
//! eigenvalue and its self-overlap, and the limiting densities in the GinUE
//! bulk, at the GinUE edge, and for real GinOE eigenvalues in the bulk.

mod finite;
mod limits;

pub use finite::{
    appendix_i_integrals, appendix_i_integrals_quadrature, first_moment_from_integrals, jpdf_ginue_finite,
    jpdf_ginue_finite_moments, AppendixCoefficients, AppendixIntegrals,
};
pub use limits::{
    jpdf_limit_bulk_ginue, jpdf_limit_edge_ginue, jpdf_limit_realbulk_ginoe, limit_moments, log_log_slope,
    normalized_pdf, realbulk_partial_first_moment, LimitingJpdf,
};

use crate::scalar::Real;
use crate::specfun::SpecfunError;
use crate::theory::TheoryError;

/// A self-overlap `O` and its shifted and rescaled forms at size `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapVariable<T> {
    /// `O ≥ 1`.
    pub o: T,
    /// `t = O − 1`.
    pub t: T,
    /// Bulk scaling `s = t/N`.
    pub s: T,
    /// Edge scaling `σ = t/√N`.
    pub sigma: T,
}

impl<T: Real> OverlapVariable<T> {
    pub fn from_overlap(o: T, n: usize) -> Self {
        let t = o - T::one();
        let nf = T::from_count(n);
        Self { o, t, s: t / nf, sigma: t / nf.sqrt() }
    }

    pub fn from_bulk(s: T, n: usize) -> Self {
        Self::from_overlap(T::one() + T::from_count(n) * s, n)
    }

    pub fn from_edge(sigma: T, n: usize) -> Self {
        Self::from_overlap(T::one() + T::from_count(n).sqrt() * sigma, n)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistributionError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

pub(crate) fn domain(detail: impl Into<String>) -> DistributionError {
    DistributionError::Domain(detail.into())
}
