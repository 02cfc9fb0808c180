use crate::scalar::Real;
use crate::specfun::{domain, SpecfunError};

fn check<T: Real>(t: T) -> Result<(), SpecfunError> {
    if !(t >= T::one()) || !t.is_finite() {
        return Err(domain("legendre_p", format!("t = {t} must satisfy t >= 1")));
    }
    Ok(())
}

/// Legendre polynomial `Pₙ(t)` for `t ≥ 1` by the three-term recurrence.
///
/// Overflows to `+∞` for large `n·ln(t + √(t²−1))`; use [`ln_legendre_p`]
/// in that range.
pub fn legendre_p<T: Real>(n: usize, t: T) -> Result<T, SpecfunError> {
    let (mantissa, ln_scale) = scaled_recurrence(n, t)?;
    Ok(if ln_scale == T::zero() { mantissa } else { mantissa * ln_scale.exp() })
}

/// `ln Pₙ(t)` for `t ≥ 1`; every `Pₖ` is ≥ 1 on this half-line.
pub fn ln_legendre_p<T: Real>(n: usize, t: T) -> Result<T, SpecfunError> {
    let (mantissa, ln_scale) = scaled_recurrence(n, t)?;
    Ok(ln_scale + mantissa.ln())
}

/// `(k+1)Pₖ₊₁ = (2k+1) t Pₖ − k Pₖ₋₁`, rescaled whenever the iterate gets
/// large; returns `(m, s)` with `Pₙ(t) = m·eˢ`.
fn scaled_recurrence<T: Real>(n: usize, t: T) -> Result<(T, T), SpecfunError> {
    check(t)?;
    if n == 0 {
        return Ok((T::one(), T::zero()));
    }
    let big = T::lit(1e200).min(T::max_value().sqrt());
    let mut prev = T::one();
    let mut cur = t;
    let mut ln_scale = T::zero();
    for k in 1..n {
        let kf = T::from_count(k);
        let next = ((kf + kf + T::one()) * t * cur - kf * prev) / (kf + T::one());
        prev = cur;
        cur = next;
        if cur > big {
            prev /= cur;
            ln_scale += cur.ln();
            cur = T::one();
        }
    }
    Ok((cur, ln_scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadOptions};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Laplace's integral Pₙ(t) = (1/π)∫₀^π (t + √(t²−1) cos φ)ⁿ dφ.
    fn laplace_integral(n: usize, t: f64) -> f64 {
        let s = (t * t - 1.0).sqrt();
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, ..QuadOptions::default() };
        integrate(|phi: f64| (t + s * phi.cos()).powi(n as i32), 0.0, PI, opts).unwrap().value / PI
    }

    #[test]
    fn anchor_values() {
        assert_eq!(legendre_p(0, 3.7_f64).unwrap(), 1.0);
        assert!((legendre_p(7, 1.0_f64).unwrap() - 1.0).abs() < 1e-15);
        assert!((legendre_p(3, 2.0_f64).unwrap() - 17.0).abs() < 1e-13);
        assert!((laplace_integral(3, 2.0) - 17.0).abs() < 1e-11);
        assert!(legendre_p(2, 0.5_f64).is_err());
    }

    #[test]
    fn explicit_low_orders() {
        let t = 1.3_f64;
        let p4 = (35.0 * t.powi(4) - 30.0 * t * t + 3.0) / 8.0;
        assert!((legendre_p(4, t).unwrap() - p4).abs() < 1e-14 * p4);
    }

    #[test]
    fn log_variant_survives_overflow() {
        // Pₙ(t) ~ (t + √(t²−1))^{n+½} / √(2πn √(t²−1)) for large n.
        let (n, t) = (2000usize, 10.0_f64);
        let s = (t * t - 1.0).sqrt();
        let approx = (n as f64 + 0.5) * (t + s).ln() - 0.5 * (2.0 * PI * n as f64 * s).ln();
        let got = ln_legendre_p(n, t).unwrap();
        assert!((got - approx).abs() < 1e-3);
        assert!(legendre_p(n, t).unwrap().is_infinite());
    }

    #[test]
    fn derivative_at_one_by_richardson() {
        // P'ₙ(1) = n(n+1)/2
        for n in [1usize, 5, 17, 50] {
            let d = |h: f64| (legendre_p(n, 1.0 + h).unwrap() - 1.0) / h;
            let h = 1e-4;
            let mut tab = [d(h), d(h / 2.0), d(h / 4.0), d(h / 8.0)];
            for level in 1..4 {
                let f = (1u64 << level) as f64;
                for i in 0..4 - level {
                    tab[i] = (f * tab[i + 1] - tab[i]) / (f - 1.0);
                }
            }
            let want = (n * (n + 1)) as f64 / 2.0;
            assert!((tab[0] - want).abs() <= 1e-6 * want, "n={n}: {} vs {want}", tab[0]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn matches_laplace_integral(n in 0usize..=200, which in 0usize..3) {
            let t = [1.01, 1.5, 3.0][which];
            let want = laplace_integral(n, t);
            let got = legendre_p(n, t).unwrap();
            prop_assert!((got - want).abs() <= 1e-9 * want, "n={} t={}: {} vs {}", n, t, got, want);
        }
    }
}
