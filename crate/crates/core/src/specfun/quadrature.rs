use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Real;
use crate::specfun::SpecfunError;

// 21-point Gauss–Kronrod abscissae and weights (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077808487391557,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// 10-point Gauss weights for XGK[1], XGK[3], …, XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Tolerances and subdivision budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Maximum number of Kronrod panels over the whole integration.
    pub max_panels: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self { abs_tol: T::lit(1e-12), rel_tol: T::lit(1e-10), max_panels: 2000 }
    }
}

/// Result of a successful quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub panels: usize,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let hl = half * (b - a);
    let fc = f(center);
    let mut resk = fc * T::lit(WGK[10]);
    let mut resg = T::zero();
    let mut resabs = resk.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = hl * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += T::lit(WGK[j]) * (f1 + f2);
        resabs += T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let reskh = resk * half;
    let mut resasc = T::lit(WGK[10]) * (fc - reskh).abs();
    for j in 0..10 {
        resasc += T::lit(WGK[j]) * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * hl;
    let resabs = resabs * hl.abs();
    let resasc = resasc * hl.abs();
    let mut error = ((resk - resg) * hl).abs();
    if resasc != T::zero() && error != T::zero() {
        error = resasc * T::one().min((T::lit(200.0) * error / resasc).powf(T::lit(1.5)));
    }
    let uflow = T::min_positive_value();
    if resabs > uflow / (T::lit(50.0) * T::epsilon()) {
        error = error.max(T::lit(50.0) * T::epsilon() * resabs);
    }
    if !value.is_finite() {
        error = T::infinity();
    }
    Panel { a, b, value, error }
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, opts: QuadOptions<T>) -> Result<Quadrature<T>, SpecfunError> {
    let (value, error, panels) = adaptive(&f, a, b, opts, opts.max_panels);
    finish(value, error, panels, opts)
}

fn finish<T: Real>(value: T, error: T, panels: usize, opts: QuadOptions<T>) -> Result<Quadrature<T>, SpecfunError> {
    if value.is_finite() && error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
        Ok(Quadrature { value, error, panels })
    } else {
        Err(SpecfunError::Accuracy {
            estimate: value.to_f64().unwrap_or(f64::NAN),
            error: error.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn adaptive<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, opts: QuadOptions<T>, budget: usize) -> (T, T, usize) {
    let mut heap = BinaryHeap::new();
    let first = kronrod(f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    let mut panels = 1;
    let half = T::lit(0.5);
    while error > opts.abs_tol.max(opts.rel_tol * value.abs()) && panels + 1 <= budget.max(1) {
        let Some(worst) = heap.pop() else { break };
        let mid = half * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at working precision.
            heap.push(worst);
            break;
        }
        let left = kronrod(f, worst.a, mid);
        let right = kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        panels += 1;
        if panels % 64 == 0 {
            // Resum to shed accumulated cancellation in the running totals.
            value = heap.iter().map(|p| p.value).fold(T::zero(), |s, v| s + v);
            error = heap.iter().map(|p| p.error).fold(T::zero(), |s, v| s + v);
        }
    }
    let value = heap.iter().map(|p| p.value).fold(T::zero(), |s, v| s + v);
    let error = heap.iter().map(|p| p.error).fold(T::zero(), |s, v| s + v);
    (value, error, panels)
}

/// Integrates `f` over `[0, ∞)`.
///
/// The half-line is marched in panels of doubling width, each integrated
/// adaptively. Marching stops once two consecutive panels contribute less
/// than the tolerance relative to the running total and the contributions
/// are decreasing.
pub fn integrate_semi_infinite<T: Real>(f: impl Fn(T) -> T, opts: QuadOptions<T>) -> Result<Quadrature<T>, SpecfunError> {
    let mut total = T::zero();
    let mut error = T::zero();
    let mut used = 0usize;
    let mut lo = T::zero();
    let mut width = T::one();
    let mut quiet = 0;
    let mut last = T::infinity();
    let per_panel = (opts.max_panels / 8).max(16);
    while used < opts.max_panels {
        let hi = lo + width;
        let sub = QuadOptions { abs_tol: opts.abs_tol * T::lit(0.1), ..opts };
        let (v, e, p) = adaptive(&f, lo, hi, sub, per_panel.min(opts.max_panels - used));
        used += p;
        total += v;
        error += e;
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if v.abs() <= T::lit(0.1) * tol && v.abs() <= last {
            quiet += 1;
        } else {
            quiet = 0;
        }
        last = v.abs();
        if quiet >= 2 {
            return finish(total, error, used, opts);
        }
        lo = hi;
        width = width + width;
        if !lo.is_finite() {
            break;
        }
    }
    Err(SpecfunError::Accuracy {
        estimate: total.to_f64().unwrap_or(f64::NAN),
        error: T::infinity().to_f64().unwrap_or(f64::INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semi_infinite_anchor_values() {
        let o = QuadOptions::default();
        let q = integrate_semi_infinite(|r: f64| (-r).exp(), o).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
        let q = integrate_semi_infinite(|r: f64| r * (-r).exp(), o).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
        // e·Γ(4, 1) = 6(1 + 1 + ½ + ⅙) = 16
        let q = integrate_semi_infinite(|r: f64| (-r).exp() * (r + 1.0).powi(3), o).unwrap();
        assert!((q.value - 16.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_late_peak() {
        // ∫ R⁵⁰ e^{−R} dR = 50!
        let o = QuadOptions::default();
        let q = integrate_semi_infinite(|r: f64| (50.0 * r.ln() - r - 148.477_766_951_773_02).exp(), o).unwrap();
        assert!((q.value - 1.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn finite_interval_with_endpoint_singularity() {
        let o = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_panels: 2000 };
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, o).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_reports_accuracy_error() {
        let o = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-15, max_panels: 3 };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, o);
        assert!(matches!(r, Err(SpecfunError::Accuracy { .. })));
    }

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| x.powi(20), -1.0, 2.0, QuadOptions::default()).unwrap();
        let want = (2f64.powi(21) + 1.0) / 21.0;
        assert!((q.value - want).abs() <= 1e-13 * want);
    }
}
