use crate::scalar::Real;
use crate::specfun::{erfcx, ln_power_exp_over_gamma, reg_gamma_q};
use crate::theory::{domain, schur_delta_integral, ComplexPoint, EnsembleKind, TheoryError};

fn require_size(n: usize, min: usize, what: &str) -> Result<(), TheoryError> {
    if n < min {
        Err(domain(format!("{what} needs N >= {min}, got N = {n}")))
    } else {
        Ok(())
    }
}

/// `Q(m, a)(m − a) + aᵐ e⁻ᵃ / Γ(m)`, the bracket shared by both ensembles.
pub(crate) fn overlap_bracket<T: Real>(m: usize, a: T) -> Result<T, TheoryError> {
    let mf = T::from_count(m);
    let q = reg_gamma_q(mf, a)?;
    let tail = ln_power_exp_over_gamma(mf, a)?.exp();
    Ok(q * (mf - a) + tail)
}

/// GinUE mean density `(1/π) Q(N, |z|²)`.
pub fn density_ginue<T: Real>(n: usize, z: ComplexPoint<T>) -> Result<T, TheoryError> {
    require_size(n, 1, "density_ginue")?;
    z.check()?;
    Ok(T::FRAC_1_PI() * reg_gamma_q(T::from_count(n), z.norm_sqr())?)
}

/// GinOE mean density of complex eigenvalues,
/// `√(2/π) |y| erfcx(√2|y|) Q(N−1, |z|²)`.
pub fn density_ginoe_complex<T: Real>(n: usize, z: ComplexPoint<T>) -> Result<T, TheoryError> {
    require_size(n, 2, "density_ginoe_complex")?;
    z.check()?;
    let y = z.im.abs();
    let two = T::lit(2.0);
    let pre = (two / T::PI()).sqrt() * y * erfcx(two.sqrt() * y)?;
    Ok(pre * reg_gamma_q(T::from_count(n - 1), z.norm_sqr())?)
}

/// Mean density for either ensemble (complex eigenvalues for the GinOE).
pub fn density<T: Real>(kind: EnsembleKind, n: usize, z: ComplexPoint<T>) -> Result<T, TheoryError> {
    match kind {
        EnsembleKind::GinUE => density_ginue(n, z),
        EnsembleKind::GinOE => density_ginoe_complex(n, z),
    }
}

/// GinUE mean self-overlap
/// `(1/π)[Q(N,|z|²)(N − |z|²) + |z|^{2N} e^{−|z|²}/(N−1)!]`.
pub fn overlap_ginue<T: Real>(n: usize, z: ComplexPoint<T>) -> Result<T, TheoryError> {
    require_size(n, 1, "overlap_ginue")?;
    z.check()?;
    Ok(T::FRAC_1_PI() * overlap_bracket(n, z.norm_sqr())?)
}

/// GinOE mean self-overlap of complex eigenvalues at finite `N`.
///
/// The `δ`-integral prefactor `1 + √(π/2) erfcx(√2|y|)/(2|y|)` multiplies
/// `(1/π)[Q(N−1,|z|²)(N−1−|z|²) + |z|^{2(N−1)} e^{−|z|²}/(N−2)!]`.
/// The mean self-overlap diverges on the real line, so `y = 0` is rejected.
pub fn overlap_ginoe<T: Real>(n: usize, z: ComplexPoint<T>) -> Result<T, TheoryError> {
    require_size(n, 2, "overlap_ginoe")?;
    z.check()?;
    if z.im == T::zero() {
        return Err(domain(
            "overlap_ginoe holds only for complex eigenvalues: the mean self-overlap diverges on the real line (y = 0)",
        ));
    }
    let pre = schur_delta_integral(z.im.abs())?;
    Ok(T::FRAC_1_PI() * pre * overlap_bracket(n - 1, z.norm_sqr())?)
}

/// Mean self-overlap for either ensemble.
pub fn overlap<T: Real>(kind: EnsembleKind, n: usize, z: ComplexPoint<T>) -> Result<T, TheoryError> {
    match kind {
        EnsembleKind::GinUE => overlap_ginue(n, z),
        EnsembleKind::GinOE => overlap_ginoe(n, z),
    }
}

/// Conditional expectation `E(O_nn | z_n = z) = O(z)/ρ(z)`.
pub fn conditional_mean<T: Real>(n: usize, z: ComplexPoint<T>, kind: EnsembleKind) -> Result<T, TheoryError> {
    let num = overlap(kind, n, z)?;
    let den = density(kind, n, z)?;
    if !(den >= T::min_positive_value()) {
        return Err(TheoryError::OutsideSupport { n, norm_sqr: z.norm_sqr().to_f64().unwrap_or(f64::NAN) });
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{erfc, integrate, QuadOptions};
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    fn pt(re: f64, im: f64) -> ComplexPoint<f64> {
        ComplexPoint::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    /// `Q(N, a)` for integer `N` by the finite sum `e⁻ᵃ Σ_{k<N} aᵏ/k!`.
    fn q_sum(n: usize, a: f64) -> f64 {
        let mut term = (-a).exp();
        let mut s = term;
        for k in 1..n {
            term *= a / k as f64;
            s += term;
        }
        s
    }

    #[test]
    fn ginue_density_examples() {
        assert!(close(density_ginue(10, pt(0.0, 0.0)).unwrap(), 1.0 / PI, 1e-15));
        assert!(density_ginue(10, pt(100.0, 0.0)).unwrap() < 1e-300);
        let want = 2.0 / (PI * E);
        assert!(close(density_ginue(2, pt(0.6, 0.8)).unwrap(), want, 1e-14));
    }

    #[test]
    fn ginoe_density_examples() {
        assert_eq!(density_ginoe_complex(50, pt(1.3, 0.0)).unwrap(), 0.0);
        assert!(density_ginoe_complex(50, pt(30.0, 30.0)).unwrap() < 1e-200);
        // composition of separately checked pieces, with erfcx built from erfc
        let want = (2.0 / PI).sqrt() * 2.0 * (8.0_f64).exp() * erfc(2.0 * 2.0_f64.sqrt()) * q_sum(49, 8.0);
        assert!(close(density_ginoe_complex(50, pt(2.0, 2.0)).unwrap(), want, 1e-12));
    }

    #[test]
    fn ginoe_density_vanishes_continuously() {
        let mut prev = f64::INFINITY;
        for k in 0..10 {
            let y = 10f64.powi(-k);
            let d = density_ginoe_complex(20, pt(0.3, y)).unwrap();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn ginue_overlap_examples() {
        assert!(close(overlap_ginue(7, pt(0.0, 0.0)).unwrap(), 7.0 / PI, 1e-15));
        assert!(close(overlap_ginue(2, pt(0.0, 1.0)).unwrap(), 3.0 / (PI * E), 1e-14));
        assert!(overlap_ginue(7, pt(0.0, 20.0)).unwrap() < 1e-100);
    }

    #[test]
    fn ginoe_overlap_examples() {
        // bracket = Γ(1,1)/0!·(2−1−1) + e^{−1} = e^{−1}
        let pre = 1.0 + (PI / 2.0).sqrt() * E * E * erfc(2.0_f64.sqrt()) / 2.0;
        let want = pre / PI * (-1.0_f64).exp();
        let got = overlap_ginoe(2, pt(0.0, 1.0)).unwrap();
        assert!(close(got, want, 1e-13), "{got} vs {want}");
        assert!((got - 0.14176).abs() < 5e-5);
        assert_eq!(overlap_ginoe(100, pt(3.0, 3.0)).unwrap(), overlap_ginoe(100, pt(3.0, -3.0)).unwrap());
        assert!(matches!(overlap_ginoe(10, pt(1.0, 0.0)), Err(TheoryError::Domain(_))));
    }

    #[test]
    fn ginoe_overlap_finite_sum_form() {
        // bracket via finite sums: Γ(N−1,a)/(N−2)!·(N−1−a) + a^{N−1}e^{−a}/(N−2)!
        for &(n, z) in &[(5usize, pt(0.7, 1.1)), (12, pt(-2.0, 0.4)), (30, pt(3.0, 4.0))] {
            let a = z.norm_sqr();
            let m = n - 1;
            let fact: f64 = (1..m).map(|k| k as f64).product();
            let bracket = q_sum(m, a) * (m as f64 - a) + a.powi(m as i32) * (-a).exp() / fact;
            let y = z.im.abs();
            let pre = 1.0 + (PI / 2.0).sqrt() * (2.0 * y * y).exp() * erfc(2.0_f64.sqrt() * y) / (2.0 * y);
            let want = pre * bracket / PI;
            assert!(close(overlap_ginoe(n, z).unwrap(), want, 1e-11), "n={n}");
        }
    }

    #[test]
    fn conditional_mean_examples() {
        assert!(close(conditional_mean(10, pt(0.0, 0.0), EnsembleKind::GinUE).unwrap(), 10.0, 1e-14));
        assert!(close(conditional_mean(100, pt(0.0, 0.0), EnsembleKind::GinUE).unwrap(), 100.0, 1e-14));
        assert!(matches!(
            conditional_mean(10, pt(0.0, 1e3), EnsembleKind::GinUE),
            Err(TheoryError::OutsideSupport { .. })
        ));
        assert!(conditional_mean(10, pt(0.5, 0.0), EnsembleKind::GinOE).is_err());
        let c = conditional_mean(50, pt(0.5, 1.5), EnsembleKind::GinOE).unwrap();
        assert!(c > 1.0 && c.is_finite());
    }

    #[test]
    fn ginue_total_mass() {
        // ∫ρ d²z = N and ∫O d²z = E Σₙ O_nn = N(N+1)/2.
        let n = 6usize;
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, ..QuadOptions::default() };
        let total = integrate(|r: f64| 2.0 * PI * r * overlap_ginue(n, pt(r, 0.0)).unwrap(), 0.0, 12.0, opts).unwrap();
        assert!(close(total.value, (n * (n + 1)) as f64 / 2.0, 1e-10), "{}", total.value);
        let mass = integrate(|r: f64| 2.0 * PI * r * density_ginue(n, pt(r, 0.0)).unwrap(), 0.0, 12.0, opts).unwrap();
        assert!(close(mass.value, n as f64, 1e-10));
    }

    #[test]
    fn single_precision() {
        let d = density_ginue(2, ComplexPoint::new(0.0_f32, 1.0)).unwrap();
        assert!((d - 0.234_199_3).abs() < 1e-5);
        let o = overlap_ginoe(2, ComplexPoint::new(0.0_f32, 1.0)).unwrap();
        assert!((o - 0.141_755).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn reflection_symmetry(n in 2usize..200, x in -20.0..20.0_f64, y in 0.01..20.0_f64) {
            let a = overlap_ginoe(n, pt(x, y)).unwrap();
            let b = overlap_ginoe(n, pt(-x, -y)).unwrap();
            let c = overlap_ginoe(n, pt(x, -y)).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
            prop_assert!((a - c).abs() <= 1e-14 * a.abs().max(1e-300));
            let d1 = density_ginoe_complex(n, pt(x, y)).unwrap();
            let d2 = density_ginoe_complex(n, pt(-x, -y)).unwrap();
            prop_assert!((d1 - d2).abs() <= 1e-14 * d1.abs().max(1e-300));
        }

        #[test]
        fn ginue_conditional_mean_at_least_one(n in 1usize..300, r in 0.0..1.0_f64, th in 0.0..6.3_f64) {
            let z = ComplexPoint::from_polar(r * (n as f64).sqrt(), th);
            let c = conditional_mean(n, z, EnsembleKind::GinUE).unwrap();
            prop_assert!(c >= 1.0 - 1e-12);
        }
    }
}
