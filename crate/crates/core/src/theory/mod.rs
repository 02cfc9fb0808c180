//! Closed-form mean densities and mean self-overlaps of the real (GinOE) and
//! complex (GinUE) Ginibre ensembles, their large-N limits, and the
//! determinant averages behind the GinOE result.
//!
//! Matrix entries have unit variance, so the spectrum fills the disk of
//! radius `√N`.

mod determinant;
mod finite;
mod limits;

pub use determinant::{
    avg_det_charpoly, avg_det_charpoly_with, avg_det_mu_derivative, ln_avg_det_charpoly, schur_delta_integral,
    schur_delta_integral_quadrature, DetAverageAtZero,
};
pub use finite::{conditional_mean, density, density_ginoe_complex, density_ginue, overlap, overlap_ginoe, overlap_ginue};
pub use limits::{
    conditional_mean_limit, density_limit, overlap_limit, overlap_limit_bulk, overlap_limit_depletion, overlap_limit_edge,
    theta_n_m,
};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::specfun::SpecfunError;

/// A point `z = x + iy` of the complex plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> ComplexPoint<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn from_polar(r: T, theta: T) -> Self {
        Self { re: r * theta.cos(), im: r * theta.sin() }
    }

    /// `|z|²`.
    pub fn norm_sqr(&self) -> T {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(&self) -> T {
        self.re.hypot(self.im)
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_complex(self) -> num_complex::Complex<T> {
        num_complex::Complex::new(self.re, self.im)
    }

    pub(crate) fn check(&self) -> Result<(), TheoryError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(TheoryError::Domain(format!("non-finite point {} + {}i", self.re, self.im)))
        }
    }
}

impl<T: Real> From<num_complex::Complex<T>> for ComplexPoint<T> {
    fn from(z: num_complex::Complex<T>) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Which Ginibre ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// Real Ginibre: i.i.d. `N(0, 1)` entries.
    GinOE,
    /// Complex Ginibre: i.i.d. entries with independent `N(0, ½)` real and imaginary parts.
    GinUE,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::GinOE => "ginoe",
            EnsembleKind::GinUE => "ginue",
        }
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ginoe" | "real" => Ok(EnsembleKind::GinOE),
            "ginue" | "complex" => Ok(EnsembleKind::GinUE),
            other => Err(format!("unknown ensemble '{other}' (expected ginoe or ginue)")),
        }
    }
}

/// Large-N scaling regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `z = √N w` with `|w| < 1`.
    Bulk,
    /// `z = (√N + η) e^{iθ}`.
    Edge,
    /// GinOE only: `z = √N δ + iξ` with `ξ = O(1)`.
    Depletion,
}

/// Rescaled coordinates for the three regimes.
///
/// Bulk reads `w`; edge reads `eta` (and `theta` only to map back to `z`);
/// depletion reads `xi` and `delta_strip`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegimeCoordinates<T> {
    pub w: ComplexPoint<T>,
    pub eta: T,
    pub theta: T,
    pub xi: T,
    pub delta_strip: T,
}

impl<T: Real> RegimeCoordinates<T> {
    pub fn bulk(w: ComplexPoint<T>) -> Self {
        Self { w, ..Self::zero() }
    }

    pub fn edge(eta: T, theta: T) -> Self {
        Self { eta, theta, ..Self::zero() }
    }

    pub fn depletion(xi: T, delta_strip: T) -> Self {
        Self { xi, delta_strip, ..Self::zero() }
    }

    fn zero() -> Self {
        let o = T::zero();
        Self { w: ComplexPoint::new(o, o), eta: o, theta: o, xi: o, delta_strip: o }
    }

    /// The unscaled eigenvalue location these coordinates describe at size `n`.
    pub fn to_point(&self, regime: Regime, n: usize) -> ComplexPoint<T> {
        let root = T::from_count(n).sqrt();
        match regime {
            Regime::Bulk => ComplexPoint::new(root * self.w.re, root * self.w.im),
            Regime::Edge => ComplexPoint::from_polar(root + self.eta, self.theta),
            Regime::Depletion => ComplexPoint::new(root * self.delta_strip, self.xi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TheoryError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("the depletion regime exists only for the real Ginibre ensemble")]
    InvalidRegime,
    #[error("outside support: the mean density underflows at |z|^2 = {norm_sqr:e} for N = {n}")]
    OutsideSupport { n: usize, norm_sqr: f64 },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

pub(crate) fn domain(detail: impl Into<String>) -> TheoryError {
    TheoryError::Domain(detail.into())
}
