use crate::distributions::{domain, DistributionError};
use crate::scalar::Real;
use crate::specfun::{integrate, ln_gamma, reg_gamma_p, reg_gamma_q, QuadOptions};
use crate::theory::ComplexPoint;

/// The coefficient functions `d₁, d₂, D₁, D₂` of the finite-N GinUE joint
/// density, all divided by `Γ(N−1)²` so they stay finite for large `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixCoefficients<T> {
    pub n: usize,
    /// `|z|²`.
    pub a: T,
    /// `d₁^{(N−1)}`.
    pub d1_prev: T,
    /// `d₁^{(N)}`.
    pub d1: T,
    /// `d₂^{(N−1)}`.
    pub d2_prev: T,
    /// `d₂^{(N)}`.
    pub d2: T,
    pub big_d1: T,
    pub big_d2: T,
}

impl<T: Real> AppendixCoefficients<T> {
    pub fn new(n: usize, z: ComplexPoint<T>) -> Result<Self, DistributionError> {
        if n < 3 {
            return Err(domain(format!("the finite-N joint density needs N >= 3, got {n}")));
        }
        if !z.is_finite() {
            return Err(domain("non-finite eigenvalue"));
        }
        let a = z.norm_sqr();
        let nf = T::from_count(n);
        let one = T::one();
        let two = T::lit(2.0);
        // Γ(k, a)/Γ(N−1) for k = N−2 … N+2
        let g = |k: usize, ratio: T| -> Result<T, DistributionError> { Ok(ratio * reg_gamma_q(T::from_count(k), a)?) };
        let g_m2 = g(n - 2, (nf - two).recip())?;
        let g_m1 = g(n - 1, one)?;
        let g_0 = g(n, nf - one)?;
        let g_p1 = g(n + 1, nf * (nf - one))?;
        let g_p2 = g(n + 2, (nf + one) * nf * (nf - one))?;

        let d1_prev = g_m2 * g_0 - g_m1 * g_m1;
        let d2_prev = g_m2 * g_p1 - g_m1 * g_0;
        let d1 = g_m1 * g_p1 - g_0 * g_0;
        let d2 = g_m1 * g_p2 - g_0 * g_p1;

        let big_d1 = a * a * (nf - one) * (nf - two) * d1_prev + ((nf - one) * nf - two * a * (nf + a)) * d1
            - a * (nf - two) * (nf - a) * d2_prev
            + a * d2;
        let big_d2 = two * nf * d1 - a * (nf - two) * d2_prev;
        Ok(Self { n, a, d1_prev, d1, d2_prev, d2, big_d1, big_d2 })
    }

    /// `D₁ + |z|² D₂ u + |z|⁴ d₁ u²` with `u = 1/O`.
    fn bracket(&self, u: T) -> T {
        self.big_d1 + self.a * u * (self.big_d2 + self.a * u * self.d1)
    }

    /// `1/(π Γ(N) Γ(N−1))` after the `Γ(N−1)²` rescaling.
    fn norm(&self) -> T {
        T::FRAC_1_PI() / T::from_count(self.n - 1)
    }

    /// Joint density in `u = 1/O` times `du/dO`-free factors:
    /// `P(O) dO = e^{au} u (1−u)^{N−2} [..] du · norm`.
    fn in_u(&self, u: T, power: i32) -> T {
        if u <= T::zero() {
            return T::zero();
        }
        let m = T::from_count(self.n - 2);
        let ln = self.a * u + m * (-u).ln_1p();
        self.norm() * ln.exp() * u.powi(power) * self.bracket(u)
    }
}

/// Finite-N GinUE joint density `P_N(O, z)` of an eigenvalue `z` and its
/// self-overlap `O > 1`.
pub fn jpdf_ginue_finite<T: Real>(n: usize, o: T, z: ComplexPoint<T>) -> Result<T, DistributionError> {
    if !(o > T::one()) {
        return Err(domain(format!("self-overlap support is (1, inf), got O = {o}")));
    }
    let c = AppendixCoefficients::new(n, z)?;
    if o.is_infinite() {
        return Ok(T::zero());
    }
    let u = o.recip();
    // P = norm · e^{a/O} O^{−3} (1 − 1/O)^{N−2} [..]
    Ok(c.in_u(u, 3))
}

/// Zeroth and first moments in `O` of [`jpdf_ginue_finite`] by quadrature
/// (after `O = 1/u`); they reproduce the mean density and mean self-overlap.
pub fn jpdf_ginue_finite_moments<T: Real>(
    n: usize,
    z: ComplexPoint<T>,
    opts: QuadOptions<T>,
) -> Result<(T, T), DistributionError> {
    let c = AppendixCoefficients::new(n, z)?;
    let m0 = integrate(|u| c.in_u(u, 1), T::zero(), T::one(), opts)?.value;
    let m1 = integrate(|u| c.in_u(u, 0), T::zero(), T::one(), opts)?.value;
    Ok((m0, m1))
}

/// `I_k = ∫₁^∞ e^{|z|²/O} (O−1)^{N−2} O^{−(N+k−1)} dO` for `k = 1, 2, 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixIntegrals<T> {
    pub i1: T,
    pub i2: T,
    pub i3: T,
}

/// `e^a γ(m, a)/a^m`, in the log domain.
fn scaled_lower_gamma<T: Real>(m: usize, a: T) -> Result<T, DistributionError> {
    let mf = T::from_count(m);
    let p = reg_gamma_p(mf, a)?;
    Ok((a + ln_gamma(mf)? + p.ln() - mf * a.ln()).exp())
}

/// Closed forms of the three integrals in terms of incomplete gamma functions.
pub fn appendix_i_integrals<T: Real>(n: usize, z: ComplexPoint<T>) -> Result<AppendixIntegrals<T>, DistributionError> {
    if n < 3 {
        return Err(domain(format!("I1, I2, I3 need N >= 3, got {n}")));
    }
    if !z.is_finite() {
        return Err(domain("non-finite eigenvalue"));
    }
    let a = z.norm_sqr();
    let nf = T::from_count(n);
    let one = T::one();
    let two = T::lit(2.0);
    if a == T::zero() {
        // Beta integrals B(k, N−1).
        return Ok(AppendixIntegrals {
            i1: (nf - one).recip(),
            i2: (nf * (nf - one)).recip(),
            i3: two / ((nf + one) * nf * (nf - one)),
        });
    }
    let i1 = scaled_lower_gamma(n - 1, a)?;
    let i2 = (one - (nf - one - a) * scaled_lower_gamma(n, a)?) / (nf - one);
    let poly = a * a - two * (nf - one) * a + nf * (nf - one);
    let inner = (nf + two - nf * nf) + (nf + one) * a + poly * (nf + one) * scaled_lower_gamma(n + 1, a)?;
    let i3 = inner / ((nf + one) * nf * (nf - one));
    Ok(AppendixIntegrals { i1, i2, i3 })
}

/// The same three integrals by adaptive quadrature, after `O = 1/u`.
pub fn appendix_i_integrals_quadrature<T: Real>(
    n: usize,
    z: ComplexPoint<T>,
    opts: QuadOptions<T>,
) -> Result<AppendixIntegrals<T>, DistributionError> {
    if n < 3 {
        return Err(domain(format!("I1, I2, I3 need N >= 3, got {n}")));
    }
    let a = z.norm_sqr();
    let m = T::from_count(n - 2);
    let f = |k: i32| {
        integrate(|u: T| (a * u + m * (-u).ln_1p()).exp() * u.powi(k), T::zero(), T::one(), opts).map(|q| q.value)
    };
    Ok(AppendixIntegrals { i1: f(0)?, i2: f(1)?, i3: f(2)? })
}

/// `(1/(πΓ(N)Γ(N−1)))[D₁ I₁ + |z|² D₂ I₂ + |z|⁴ d₁ I₃]`, the mean self-overlap.
pub fn first_moment_from_integrals<T: Real>(n: usize, z: ComplexPoint<T>) -> Result<T, DistributionError> {
    let c = AppendixCoefficients::new(n, z)?;
    let i = appendix_i_integrals(n, z)?;
    let a = c.a;
    Ok(c.norm() * (c.big_d1 * i.i1 + a * c.big_d2 * i.i2 + a * a * c.d1 * i.i3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::jpdf_limit_bulk_ginue;
    use crate::specfun::integrate_semi_infinite;
    use crate::theory::{density_ginue, overlap_ginue};
    use std::f64::consts::PI;

    fn pt(re: f64, im: f64) -> ComplexPoint<f64> {
        ComplexPoint::new(re, im)
    }

    fn tight() -> QuadOptions<f64> {
        QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_panels: 2000 }
    }

    /// `∫₁^∞ e^{a/O}(O−1)^{N−2}O^{−p} dO` directly on the half-line `O − 1 ≥ 0`.
    fn direct_integral(n: usize, a: f64, p: i32) -> f64 {
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_panels: 20000 };
        integrate_semi_infinite(
            |t: f64| {
                let o = 1.0 + t;
                (a / o).exp() * t.powi(n as i32 - 2) * o.powi(-p)
            },
            opts,
        )
        .unwrap()
        .value
    }

    #[test]
    fn vanishes_at_the_lower_edge() {
        let p = jpdf_ginue_finite(5, 1.0 + 1e-9, pt(0.3, 0.2)).unwrap();
        assert!(p < 1e-20);
        assert!(jpdf_ginue_finite(5, 1.0, pt(0.3, 0.2)).is_err());
        assert!(jpdf_ginue_finite(5, 0.5, pt(0.3, 0.2)).is_err());
    }

    #[test]
    fn origin_closed_form() {
        // at z = 0: P = N(N−1)/π · O^{−3}(1 − 1/O)^{N−2}
        for &(n, o) in &[(3usize, 1.5_f64), (10, 4.0), (500, 700.0)] {
            let want = (n * (n - 1)) as f64 / PI * o.powi(-3) * (1.0 - 1.0 / o).powi(n as i32 - 2);
            let got = jpdf_ginue_finite(n, o, pt(0.0, 0.0)).unwrap();
            assert!((got / want - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn moments_reproduce_density_and_overlap() {
        for n in [3usize, 5, 10] {
            for r in [0.5, 1.0, 2.0] {
                let z = ComplexPoint::from_polar(r, 0.7);
                let (m0, m1) = jpdf_ginue_finite_moments(n, z, tight()).unwrap();
                let rho = density_ginue(n, z).unwrap();
                let ov = overlap_ginue(n, z).unwrap();
                assert!((m0 / rho - 1.0).abs() < 1e-8, "n={n} r={r}: {m0} vs {rho}");
                assert!((m1 / ov - 1.0).abs() < 1e-8, "n={n} r={r}: {m1} vs {ov}");
                let m1c = first_moment_from_integrals(n, z).unwrap();
                assert!((m1c / ov - 1.0).abs() < 1e-8, "n={n} r={r}: closed {m1c} vs {ov}");
            }
        }
    }

    #[test]
    fn integrals_against_quadrature() {
        for &(n, a) in &[(3usize, 1.0_f64), (5, 2.0), (8, 0.3), (12, 6.0), (4, 0.0)] {
            let z = pt(a.sqrt(), 0.0);
            let c = appendix_i_integrals(n, z).unwrap();
            let q = appendix_i_integrals_quadrature(n, z, tight()).unwrap();
            for (got, want, k) in [(c.i1, q.i1, 1), (c.i2, q.i2, 2), (c.i3, q.i3, 3)] {
                assert!((got / want - 1.0).abs() < 1e-9, "n={n} a={a} I{k}: {got} vs {want}");
            }
        }
        // and against the integrals taken literally in O
        let (n, a) = (5usize, 2.0_f64);
        let c = appendix_i_integrals(n, pt(a.sqrt(), 0.0)).unwrap();
        assert!((c.i1 / direct_integral(n, a, n as i32) - 1.0).abs() < 1e-9);
        assert!((c.i2 / direct_integral(n, a, n as i32 + 1) - 1.0).abs() < 1e-9);
        assert!((c.i3 / direct_integral(n, a, n as i32 + 2) - 1.0).abs() < 1e-9);
        let c = appendix_i_integrals(3, pt(1.0, 0.0)).unwrap();
        assert!((c.i1 / direct_integral(3, 1.0, 3) - 1.0).abs() < 1e-9);
        // frozen 30-digit values
        assert!((c.i1 - 0.718_281_828_459_045_2).abs() < 1e-14);
        let c = appendix_i_integrals(5, pt(2.0_f64.sqrt(), 0.0)).unwrap();
        assert!((c.i2 - 0.104_103_962_901_006_16).abs() < 1e-13);
        assert!((c.i3 - 0.041_792_074_197_987_67).abs() < 1e-13);
    }

    #[test]
    fn converges_to_bulk_limit() {
        let n = 500usize;
        let nf = n as f64;
        for s in [0.5, 1.0, 2.0] {
            let o = 1.0 + nf * s;
            // dO = N ds, and the eigenvalue density per d²z stays O(1), so the
            // density in s is N·P_N.
            let scaled = nf * jpdf_ginue_finite(n, o, pt(0.0, 0.0)).unwrap();
            let lim = jpdf_limit_bulk_ginue(s, pt(0.0, 0.0)).unwrap();
            assert!((scaled / lim - 1.0).abs() < 0.03, "s={s}: {scaled} vs {lim}");
        }
    }

    #[test]
    fn non_negative_on_a_grid() {
        for n in [3usize, 6, 40] {
            for r in [0.0, 0.5, 1.5, 3.0, 6.0] {
                for k in 1..60 {
                    let o = 1.0 + 0.05 * (k * k) as f64;
                    let p = jpdf_ginue_finite(n, o, pt(r, 0.0)).unwrap();
                    assert!(p >= 0.0, "n={n} r={r} o={o}: {p}");
                }
            }
        }
    }
}
