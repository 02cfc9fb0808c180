use crate::distributions::{domain, DistributionError};
use crate::scalar::Real;
use crate::specfun::{erfc, erfcx, integrate, QuadOptions};
use crate::theory::ComplexPoint;

fn require_positive<T: Real>(v: T, name: &str) -> Result<(), DistributionError> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Limiting GinUE bulk density `(1−|w|²)²/(π s³) e^{−(1−|w|²)/s}` of
/// `s = (O−1)/N` at `z = √N w`.
pub fn jpdf_limit_bulk_ginue<T: Real>(s: T, w: ComplexPoint<T>) -> Result<T, DistributionError> {
    require_positive(s, "s")?;
    let c = T::one() - w.norm_sqr();
    if c <= T::zero() {
        return Ok(T::zero());
    }
    Ok(c * c * T::FRAC_1_PI() / (s * s * s) * (-c / s).exp())
}

/// Limiting GinUE edge density of `σ = (O−1)/√N` at `|z| = √N + η`.
///
/// With `Δ = 1 − 2ση`, the exponentials `e^{−Δ²/(2σ²)}` and `e^{±2η²}` are
/// merged into `e^{−1/(2σ²) + 2η/σ}` before evaluation so that neither
/// factor overflows on its own.
pub fn jpdf_limit_edge_ginue<T: Real>(sigma: T, eta: T) -> Result<T, DistributionError> {
    require_positive(sigma, "sigma")?;
    if !eta.is_finite() {
        return Err(domain(format!("eta must be finite, got {eta}")));
    }
    let two = T::lit(2.0);
    let s2 = sigma * sigma;
    let delta = T::one() - two * sigma * eta;
    let e0 = -(two * s2).recip() + two * eta / sigma;
    let g = two.sqrt() * eta;
    let eta2 = eta * eta;
    let lin = T::lit(4.0) * eta * s2 - delta * (two * eta + sigma);
    let quad = delta * delta - s2;
    let inv_sqrt_2pi = T::TAU().sqrt().recip();
    let bracket = if eta >= T::zero() {
        // common factor e^{e0 − 4η²}; erfc(√2η) = erfcx(√2η) e^{−2η²}
        let x = erfcx(g)?;
        let base = (e0 - T::lit(4.0) * eta2).exp();
        base * ((two * s2 - delta) * T::FRAC_1_PI() - inv_sqrt_2pi * lin * x + quad * x * x / two)
    } else {
        let x = erfc(g);
        (e0 - T::lit(4.0) * eta2).exp() * (two * s2 - delta) * T::FRAC_1_PI()
            - (e0 - two * eta2).exp() * inv_sqrt_2pi * lin * x
            + e0.exp() * quad * x * x / two
    };
    let pref = (T::TAU() * s2 * s2 * sigma).recip();
    Ok(pref * bracket)
}

/// Limiting density of `s = (O−1)/N` for real GinOE eigenvalues at `z = √N x`:
/// `(1−x²)/(2√(2π)) e^{−(1−x²)/(2s)}/s²`.
pub fn jpdf_limit_realbulk_ginoe<T: Real>(s: T, x: T) -> Result<T, DistributionError> {
    require_positive(s, "s")?;
    let c = T::one() - x * x;
    if c <= T::zero() {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    Ok(c / (two * T::TAU().sqrt()) * (-c / (two * s)).exp() / (s * s))
}

/// One of the three limiting joint densities at a fixed location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitingJpdf<T> {
    /// GinUE bulk at `z = √N w`, in `s`.
    BulkGinue { w: ComplexPoint<T> },
    /// GinUE edge at `|z| = √N + η`, in `σ`.
    EdgeGinue { eta: T },
    /// GinOE real eigenvalue at `z = √N x`, in `s`.
    RealBulkGinoe { x: T },
}

impl<T: Real> LimitingJpdf<T> {
    pub fn pdf(&self, v: T) -> Result<T, DistributionError> {
        match *self {
            LimitingJpdf::BulkGinue { w } => jpdf_limit_bulk_ginue(v, w),
            LimitingJpdf::EdgeGinue { eta } => jpdf_limit_edge_ginue(v, eta),
            LimitingJpdf::RealBulkGinoe { x } => jpdf_limit_realbulk_ginoe(v, x),
        }
    }

    /// The matching limiting spectral density, i.e. the total mass of [`Self::pdf`].
    pub fn spectral_density(&self) -> T {
        match *self {
            LimitingJpdf::BulkGinue { w } => {
                if w.norm_sqr() < T::one() {
                    T::FRAC_1_PI()
                } else {
                    T::zero()
                }
            }
            LimitingJpdf::EdgeGinue { eta } => erfc(T::lit(2.0).sqrt() * eta) / T::TAU(),
            LimitingJpdf::RealBulkGinoe { x } => {
                if x * x < T::one() {
                    T::TAU().sqrt().recip()
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// `P̃ = P/ρ`, a probability density in the scaled overlap variable.
pub fn normalized_pdf<T: Real>(jpdf: LimitingJpdf<T>, v: T) -> Result<T, DistributionError> {
    let rho = jpdf.spectral_density();
    if !(rho >= T::min_positive_value()) {
        return Err(domain(format!("spectral density vanishes for {jpdf:?}")));
    }
    Ok(jpdf.pdf(v)? / rho)
}

/// Zeroth and first moments of a limiting density by quadrature.
///
/// The real-bulk first moment diverges; use [`realbulk_partial_first_moment`]
/// for it. Requesting it here is a domain error.
pub fn limit_moments<T: Real>(jpdf: LimitingJpdf<T>, opts: QuadOptions<T>) -> Result<(T, T), DistributionError> {
    if let LimitingJpdf::RealBulkGinoe { .. } = jpdf {
        return Err(domain("the real-bulk first moment diverges; use realbulk_partial_first_moment"));
    }
    // v = 1/u folds the algebraic tail onto (0, 1]; the rest is integrated directly.
    let f = |v: T| if v > T::zero() { jpdf.pdf(v).unwrap_or(T::nan()) } else { T::zero() };
    let tail = |u: T, k: i32| if u > T::zero() { f(u.recip()) * u.powi(-2 - k) } else { T::zero() };
    let m0 = integrate(f, T::zero(), T::one(), opts)?.value + integrate(|u| tail(u, 0), T::zero(), T::one(), opts)?.value;
    let m1 = integrate(|v| v * f(v), T::zero(), T::one(), opts)?.value
        + integrate(|u| tail(u, 1), T::zero(), T::one(), opts)?.value;
    Ok((m0, m1))
}

/// `∫₀^T s P(s) ds` for the real-bulk density; grows like `ln T`.
pub fn realbulk_partial_first_moment<T: Real>(x: T, upper: T, opts: QuadOptions<T>) -> Result<T, DistributionError> {
    require_positive(upper, "upper")?;
    let f = |s: T| if s > T::zero() { s * jpdf_limit_realbulk_ginoe(s, x).unwrap_or(T::nan()) } else { T::zero() };
    // Split at powers of ten so the slowly decaying integrand is resolved.
    let mut total = T::zero();
    let mut lo = T::zero();
    let mut hi = upper.min(T::one());
    loop {
        total += integrate(f, lo, hi, opts)?.value;
        if hi >= upper {
            break;
        }
        lo = hi;
        hi = (hi * T::lit(10.0)).min(upper);
    }
    Ok(total)
}

/// Unweighted least-squares slope of `ln f` against `ln v` on `points`
/// log-spaced abscissae in `[lo, hi]`.
pub fn log_log_slope<T: Real>(
    f: impl Fn(T) -> Result<T, DistributionError>,
    lo: T,
    hi: T,
    points: usize,
) -> Result<T, DistributionError> {
    if !(lo > T::zero() && hi > lo) || points < 2 {
        return Err(domain("log_log_slope needs 0 < lo < hi and at least two points"));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / T::from_count(points - 1);
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for k in 0..points {
        let lx = llo + step * T::from_count(k);
        let y = f(lx.exp())?;
        if !(y > T::zero()) {
            return Err(domain(format!("non-positive value {y} in slope fit")));
        }
        xs.push(lx);
        ys.push(y.ln());
    }
    let nf = T::from_count(points);
    let mx = xs.iter().copied().sum::<T>() / nf;
    let my = ys.iter().copied().sum::<T>() / nf;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
