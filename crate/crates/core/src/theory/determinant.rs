use std::cell::RefCell;

use crate::scalar::Real;
use crate::specfun::{erfcx, integrate, integrate_semi_infinite, ln_gamma, ln_legendre_p, reg_gamma_q, QuadOptions, Quadrature};
use crate::theory::{domain, ComplexPoint, TheoryError};

/// `ln` of the integrand `e^{−R} Qq^{n/2} Pₙ(t)` with
/// `Qq = (R + a)² + μ² + 2μ(a − R)` and `t = (μ + R + a)/√Qq`.
fn ln_integrand<T: Real>(n: usize, a: T, mu: T, r: T) -> Result<T, TheoryError> {
    // Same quadratic written as a sum of non-negative terms.
    let d = r + a - mu;
    let qq = d * d + T::lit(4.0) * mu * a;
    if qq == T::zero() {
        return Ok(T::neg_infinity());
    }
    let t = ((mu + r + a) / qq.sqrt()).max(T::one());
    let nf = T::from_count(n);
    Ok(-r + T::lit(0.5) * nf * qq.ln() + ln_legendre_p(n, t)?)
}

/// `ln ⟨det M⟩` for the `n × n` GinOE block, by quadrature of
/// `∫₀^∞ e^{−R} Qq^{n/2} Pₙ(t) dR` in the log domain.
pub fn ln_avg_det_charpoly<T: Real>(n: usize, z: ComplexPoint<T>, mu: T) -> Result<T, TheoryError> {
    ln_avg_det_charpoly_with(n, z, mu, QuadOptions::default())
}

fn ln_avg_det_charpoly_with<T: Real>(n: usize, z: ComplexPoint<T>, mu: T, opts: QuadOptions<T>) -> Result<T, TheoryError> {
    if n == 0 {
        return Err(domain("avg_det_charpoly needs n >= 1"));
    }
    z.check()?;
    if !(mu >= T::zero()) || !mu.is_finite() {
        return Err(domain(format!("avg_det_charpoly needs mu >= 0, got {mu}")));
    }
    let a = z.norm_sqr();
    // Locate the peak on a coarse grid; the integrand is scaled by its
    // value there and integrated as [0, peak] plus [peak, ∞).
    let nf = T::from_count(n);
    let reach = T::lit(2.0) * (nf + mu) + T::lit(40.0);
    let grid = 256;
    let mut shift = T::neg_infinity();
    let mut peak = T::zero();
    for k in 0..=grid {
        let r = reach * T::from_count(k) / T::from_count(grid);
        let v = ln_integrand(n, a, mu, r)?;
        if v > shift {
            shift = v;
            peak = r;
        }
    }
    let failure = RefCell::new(None);
    let f = |r: T| match ln_integrand(n, a, mu, r) {
        Ok(v) => (v - shift).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            T::nan()
        }
    };
    let right = integrate_semi_infinite(|s| f(peak + s), opts);
    let left = if peak > T::zero() { integrate(f, T::zero(), peak, opts).map(|q| q.value) } else { Ok(T::zero()) };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(shift + (left? + right?.value).ln())
}

/// `⟨det M⟩` over an `n × n` GinOE matrix, where
/// `M = [[√μ, i(z − G)], [i(z̄ − Gᵀ), √μ]]`.
///
/// At `μ = 0` this is `e^{|z|²} Γ(n+1, |z|²)`. Overflows to `+∞` for large
/// `n`; use [`ln_avg_det_charpoly`] there.
pub fn avg_det_charpoly<T: Real>(n: usize, z: ComplexPoint<T>, mu: T) -> Result<T, TheoryError> {
    Ok(ln_avg_det_charpoly(n, z, mu)?.exp())
}

/// [`avg_det_charpoly`] with explicit quadrature tolerances.
pub fn avg_det_charpoly_with<T: Real>(n: usize, z: ComplexPoint<T>, mu: T, opts: QuadOptions<T>) -> Result<T, TheoryError> {
    Ok(ln_avg_det_charpoly_with(n, z, mu, opts)?.exp())
}

/// Value and `μ`-derivative at `μ = 0` of the determinant average over the
/// `(N−2) × (N−2)` block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetAverageAtZero<T> {
    /// `e^{|z|²} Γ(N−1, |z|²)`.
    pub value: T,
    /// `(N − 2 − |z|²) e^{|z|²} Γ(N−1, |z|²) + |z|^{2(N−1)}`.
    pub mu_derivative: T,
}

pub fn avg_det_mu_derivative<T: Real>(n: usize, z: ComplexPoint<T>) -> Result<DetAverageAtZero<T>, TheoryError> {
    if n < 3 {
        return Err(domain(format!("avg_det_mu_derivative needs N >= 3, got {n}")));
    }
    z.check()?;
    let a = z.norm_sqr();
    let m = T::from_count(n - 1);
    let q = reg_gamma_q(m, a)?;
    let ln_value = a + ln_gamma(m)? + q.ln();
    let value = ln_value.exp();
    let power = if a == T::zero() { T::zero() } else { (m * a.ln()).exp() };
    let mu_derivative = (T::from_count(n - 2) - a) * value + power;
    Ok(DetAverageAtZero { value, mu_derivative })
}

/// `(1/2y)∫₀^∞ δ √(δ² + 4y²) e^{−δ²/2} dδ = 1 + √(π/2) erfcx(√2 y)/(2y)`.
pub fn schur_delta_integral<T: Real>(y: T) -> Result<T, TheoryError> {
    if !(y > T::zero()) {
        return Err(domain(format!("schur_delta_integral needs y > 0, got {y}")));
    }
    if y.is_infinite() {
        return Ok(T::one());
    }
    let two = T::lit(2.0);
    Ok(T::one() + (T::PI() / two).sqrt() * erfcx(two.sqrt() * y)? / (two * y))
}

/// The left-hand integral of [`schur_delta_integral`] by quadrature.
pub fn schur_delta_integral_quadrature<T: Real>(y: T, opts: QuadOptions<T>) -> Result<Quadrature<T>, TheoryError> {
    if !(y > T::zero()) || !y.is_finite() {
        return Err(domain(format!("schur_delta_integral needs finite y > 0, got {y}")));
    }
    let two = T::lit(2.0);
    let four_y2 = T::lit(4.0) * y * y;
    let q = integrate_semi_infinite(|d: T| d * (d * d + four_y2).sqrt() * (-d * d / two).exp(), opts)?;
    let s = (two * y).recip();
    Ok(Quadrature { value: q.value * s, error: q.error * s, panels: q.panels })
}
