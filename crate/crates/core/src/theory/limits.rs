use crate::scalar::Real;
use crate::specfun::{erfc, erfcx, reg_gamma_q};
use crate::theory::{domain, schur_delta_integral, ComplexPoint, EnsembleKind, Regime, RegimeCoordinates, TheoryError};

fn step<T: Real>(s: T) -> T {
    if s > T::zero() {
        s
    } else {
        T::zero()
    }
}

/// Limiting density after rescaling to the given regime.
///
/// Bulk: `1/π` inside the unit disk. Edge: `erfc(√2η)/(2π)`. Depletion
/// (GinOE only): `√(2/π)|ξ| erfcx(√2|ξ|)` on the strip `|δ| < 1`.
pub fn density_limit<T: Real>(regime: Regime, coords: RegimeCoordinates<T>, kind: EnsembleKind) -> Result<T, TheoryError> {
    let two = T::lit(2.0);
    match regime {
        Regime::Bulk => Ok(if coords.w.norm_sqr() < T::one() { T::FRAC_1_PI() } else { T::zero() }),
        Regime::Edge => Ok(erfc(two.sqrt() * coords.eta) / T::TAU()),
        Regime::Depletion => {
            if kind == EnsembleKind::GinUE {
                return Err(TheoryError::InvalidRegime);
            }
            let xi = coords.xi.abs();
            let inside = T::one() - coords.delta_strip * coords.delta_strip;
            if inside <= T::zero() {
                return Ok(T::zero());
            }
            Ok((two / T::PI()).sqrt() * xi * erfcx(two.sqrt() * xi)?)
        }
    }
}

/// Bulk limit of `O(√N w)/N`: `(1/π)(1 − |w|²)` inside the unit disk.
pub fn overlap_limit_bulk<T: Real>(w: ComplexPoint<T>) -> T {
    T::FRAC_1_PI() * step(T::one() - w.norm_sqr())
}

/// Edge limit of `O((√N + η)e^{iθ})/√N`, the same for both ensembles:
/// `(1/π)(e^{−2η²}/√(2π) − η erfc(√2η))`.
pub fn overlap_limit_edge<T: Real>(eta: T) -> T {
    let two = T::lit(2.0);
    let gauss = (-two * eta * eta).exp() / T::TAU().sqrt();
    T::FRAC_1_PI() * (gauss - eta * erfc(two.sqrt() * eta))
}

/// Depletion limit of `O(√N δ + iξ)/N` for the GinOE.
///
/// Without `delta_strip` this is the value near the origin,
/// `(1/π)(1 + √(π/2) erfcx(√2|ξ|)/(2|ξ|))`; with it, that value times
/// `(1 − δ²)` on `|δ| < 1`.
pub fn overlap_limit_depletion<T: Real>(xi: T, delta_strip: Option<T>) -> Result<T, TheoryError> {
    if xi == T::zero() || !xi.is_finite() {
        return Err(domain(format!("depletion limit needs a finite xi != 0 (1/|xi| singularity), got {xi}")));
    }
    let origin = T::FRAC_1_PI() * schur_delta_integral(xi.abs())?;
    Ok(match delta_strip {
        None => origin,
        Some(d) => origin * step(T::one() - d * d),
    })
}

/// Limiting scaled mean self-overlap in any regime.
pub fn overlap_limit<T: Real>(regime: Regime, coords: RegimeCoordinates<T>, kind: EnsembleKind) -> Result<T, TheoryError> {
    match regime {
        Regime::Bulk => Ok(overlap_limit_bulk(coords.w)),
        Regime::Edge => Ok(overlap_limit_edge(coords.eta)),
        Regime::Depletion => {
            if kind == EnsembleKind::GinUE {
                return Err(TheoryError::InvalidRegime);
            }
            overlap_limit_depletion(coords.xi, Some(coords.delta_strip))
        }
    }
}

/// Limiting scaled conditional mean `O_lim/ρ_lim`; multiply by
/// [`Regime::scale`] to compare with `E(O_nn | z)` at size `N`.
pub fn conditional_mean_limit<T: Real>(
    regime: Regime,
    coords: RegimeCoordinates<T>,
    kind: EnsembleKind,
) -> Result<T, TheoryError> {
    let rho = density_limit(regime, coords, kind)?;
    if !(rho >= T::min_positive_value()) {
        return Err(domain(format!("limiting density vanishes in the {regime:?} regime at these coordinates")));
    }
    Ok(overlap_limit(regime, coords, kind)? / rho)
}

impl Regime {
    /// Growth of `E(O_nn | z)` with `N`: `N` in the bulk and depletion
    /// regimes, `√N` at the edge.
    pub fn scale<T: Real>(self, n: usize) -> T {
        let nf = T::from_count(n);
        match self {
            Regime::Edge => nf.sqrt(),
            Regime::Bulk | Regime::Depletion => nf,
        }
    }
}

/// `Θ_N^{(M)}(x) = Γ(N−M+1, Nx)/Γ(N−M+1)`, which tends to the step
/// function `Θ[1 − x]` as `N → ∞`.
pub fn theta_n_m<T: Real>(n: usize, m: usize, x: T) -> Result<T, TheoryError> {
    if n == 0 || m > n {
        return Err(domain(format!("theta_n_m needs N - M + 1 >= 1, got N = {n}, M = {m}")));
    }
    if !(x >= T::zero()) {
        return Err(domain(format!("theta_n_m needs x >= 0, got {x}")));
    }
    Ok(reg_gamma_q(T::from_count(n - m + 1), T::from_count(n) * x)?)
}
