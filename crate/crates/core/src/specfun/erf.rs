use crate::scalar::Real;
use crate::specfun::{domain, SpecfunError};

// W. J. Cody's rational Chebyshev approximations (1969), as in CALERF.
const A: [f64; 5] = [
    3.1611237438705656,
    113.864154151050156,
    377.485237685302021,
    3209.37758913846947,
    0.185777706184603153,
];
const B: [f64; 4] = [23.6012909523441209, 244.024637934444173, 1282.61652607737228, 2844.23683343917062];
const C: [f64; 9] = [
    0.564188496988670089,
    8.88314979438837594,
    66.1191906371416295,
    298.635138197400131,
    881.95222124176909,
    1712.04761263407058,
    2051.07837782607147,
    1230.33935479799725,
    2.15311535474403846e-8,
];
const D: [f64; 8] = [
    15.7449261107098347,
    117.693950891312499,
    537.181101862009858,
    1621.38957456669019,
    3290.79923573345963,
    4362.61909014324716,
    3439.36767414372164,
    1230.33935480374942,
];
const P: [f64; 6] = [
    0.305326634961232344,
    0.360344899949804439,
    0.125781726111229246,
    0.0160837851487422766,
    6.58749161529837803e-4,
    0.0163153871373020978,
];
const Q: [f64; 5] = [
    2.56852019228982242,
    1.87295284992346047,
    0.527905102951428412,
    0.0605183413124413191,
    0.00233520497626869185,
];

const THRESHOLD: f64 = 0.46875;

/// `erf(x)/x` on `|x| ≤ 0.46875`, as a function of `z = x²`.
fn small<T: Real>(z: T) -> T {
    let l = T::lit;
    ((((l(A[4]) * z + l(A[0])) * z + l(A[1])) * z + l(A[2])) * z + l(A[3]))
        / ((((z + l(B[0])) * z + l(B[1])) * z + l(B[2])) * z + l(B[3]))
}

/// `erfcx(y)` for `0.46875 < y ≤ 4`.
fn middle<T: Real>(y: T) -> T {
    let l = T::lit;
    let mut num = l(C[8]) * y;
    for &c in &C[..7] {
        num = (num + l(c)) * y;
    }
    num += l(C[7]);
    let mut den = y;
    for &d in &D[..7] {
        den = (den + l(d)) * y;
    }
    den += l(D[7]);
    num / den
}

/// `erfcx(y)` for `y > 4`.
fn large<T: Real>(y: T) -> T {
    let l = T::lit;
    let z = (y * y).recip();
    let num = z * (((((l(P[5]) * z + l(P[0])) * z + l(P[1])) * z + l(P[2])) * z + l(P[3])) * z + l(P[4]));
    let den = ((((z + l(Q[0])) * z + l(Q[1])) * z + l(Q[2])) * z + l(Q[3])) * z + l(Q[4]);
    (T::FRAC_2_SQRT_PI() * T::lit(0.5) - num / den) / y
}

/// `e^{−y²}` with the square split so the rounding error of `y²` does not
/// get amplified for large `y`.
fn exp_neg_square<T: Real>(y: T) -> T {
    let sixteen = T::lit(16.0);
    let yt = (y * sixteen).trunc() / sixteen;
    (-yt * yt).exp() * (-(y - yt) * (y + yt)).exp()
}

fn erfcx_nonneg<T: Real>(y: T) -> T {
    if y <= T::lit(THRESHOLD) {
        let z = y * y;
        z.exp() * (T::one() - y * small(z))
    } else if y <= T::lit(4.0) {
        middle(y)
    } else {
        large(y)
    }
}

/// Complementary error function.
pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let y = x.abs();
    if y <= T::lit(THRESHOLD) {
        return T::one() - x * small(y * y);
    }
    let upper = if y.is_infinite() { T::zero() } else { erfcx_nonneg(y) * exp_neg_square(y) };
    if x < T::zero() {
        T::lit(2.0) - upper
    } else {
        upper
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)` for `x ≥ 0`.
pub fn erfcx<T: Real>(x: T) -> Result<T, SpecfunError> {
    if !(x >= T::zero()) {
        return Err(domain("erfcx", format!("x = {x} must be non-negative")));
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    Ok(erfcx_nonneg(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadOptions};
    use proptest::prelude::*;

    /// (2/√π) ∫ₓ^∞ e^{−t²} dt by quadrature on a finite window.
    fn erfc_quad(x: f64) -> f64 {
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, ..QuadOptions::default() };
        let q = integrate(|t: f64| (-t * t).exp(), x, x + 12.0, opts).unwrap();
        q.value * std::f64::consts::FRAC_2_SQRT_PI
    }

    #[test]
    fn anchor_values() {
        assert_eq!(erfc(0.0_f64), 1.0);
        assert!((erfc(-1.0_f64) + erfc(1.0) - 2.0).abs() < 1e-15);
        assert!((erfc(1.0_f64) - 0.157299207050285130658779364917390740703933).abs() < 1e-16);
        assert!((erfc(1.0_f64) - erfc_quad(1.0)).abs() < 1e-14);
        assert_eq!(erfcx(0.0_f64).unwrap(), 1.0);
        let e1 = erfcx(1.0_f64).unwrap();
        assert!((e1 - 1.0_f64.exp() * erfc_quad(1.0)).abs() < 1e-13 * e1);
        assert!(erfcx(-1.0_f64).is_err());
    }

    #[test]
    fn erfcx_leading_asymptotic_term() {
        let x = 10.0_f64;
        let lead = 1.0 / (x * std::f64::consts::PI.sqrt());
        assert!((erfcx(x).unwrap() / lead - 1.0).abs() < 0.01);
    }

    #[test]
    fn erfcx_divergent_series_at_large_x() {
        // e^{x²}erfc(x) ~ (1/(x√π)) Σ (−1)ᵏ (2k−1)!! / (2x²)ᵏ, truncated at the smallest term.
        for &x in &[6.0_f64, 15.0, 1e3, 1e8] {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..(x * x) as usize {
                let next = -term * (2 * k - 1) as f64 / (2.0 * x * x);
                if next.abs() > term.abs() {
                    break;
                }
                term = next;
                sum += term;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            let series = sum / (x * std::f64::consts::PI.sqrt());
            assert!((erfcx(x).unwrap() - series).abs() <= 1e-12 * series, "x={x}");
        }
        assert!(erfcx(f64::MAX).unwrap().is_finite());
    }

    #[test]
    fn erfc_against_quadrature_across_intervals() {
        for &x in &[0.2_f64, 0.46875, 0.5, 1.7, 3.9, 4.1, 6.0, 9.5, 15.0, 26.0] {
            let q = erfc_quad(x);
            let got = erfc(x);
            assert!((got - q).abs() <= 1e-12 * q, "x={x}: {got} vs {q}");
        }
    }

    #[test]
    fn single_precision() {
        assert!((erfc(1.0_f32) - 0.157_299_2).abs() < 1e-6);
        assert!((erfcx(2.0_f32).unwrap() - 0.255_395_7).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn scaled_and_unscaled_agree(x in 0.0..20.0_f64) {
            let diff = (erfcx(x).unwrap() * (-x * x).exp() - erfc(x)).abs();
            prop_assert!(diff <= 1e-13);
        }

        #[test]
        fn reflection(x in -30.0..30.0_f64) {
            prop_assert!((erfc(-x) - (2.0 - erfc(x))).abs() <= 1e-14);
        }
    }
}
