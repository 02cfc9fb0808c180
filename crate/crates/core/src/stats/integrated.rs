use std::cell::RefCell;
use std::f64::consts::TAU;

use crate::specfun::{integrate, QuadOptions};
use crate::stats::{domain, BinGeometry, BinSpec, StatsError};
use crate::theory::{density, overlap, ComplexPoint, EnsembleKind, TheoryError};

/// Bin averages of the finite-N theory: `(∫ O_N, ∫ ρ_N)` over the bin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinIntegrals {
    pub overlap: f64,
    pub density: f64,
}

impl BinIntegrals {
    /// Conditional mean of `O_nn` over eigenvalues falling in the bin.
    pub fn conditional_mean(&self) -> f64 {
        self.overlap / self.density
    }
}

fn opts() -> QuadOptions<f64> {
    QuadOptions { abs_tol: 0.0, rel_tol: 1e-9, max_panels: 400 }
}

/// Integrates `f` over bin `bin` of `spec` (area measure, or length for a
/// zero-height strip).
fn integrate_bin(
    spec: &BinSpec,
    bin: usize,
    f: &dyn Fn(ComplexPoint<f64>) -> Result<f64, TheoryError>,
) -> Result<f64, StatsError> {
    let failure: RefCell<Option<String>> = RefCell::new(None);
    let eval = |z: ComplexPoint<f64>| match f(z) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e.to_string());
            0.0
        }
    };
    let quad = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| integrate(g, a, b, opts()).map(|q| q.value).unwrap_or(f64::NAN);
    let c = spec.centers[bin];
    let w = spec.window;
    let value = match spec.geometry {
        BinGeometry::Disk => quad(
            &|rho| rho * quad(&|th| eval(ComplexPoint::new(c.re + rho * th.cos(), c.im + rho * th.sin())), 0.0, TAU),
            0.0,
            w,
        ),
        BinGeometry::Annulus => quad(
            &|r| r * quad(&|th| eval(ComplexPoint::from_polar(r, th)), 0.0, TAU),
            (c.re - w).max(0.0),
            c.re + w,
        ),
        BinGeometry::Strip { im_half_width } if im_half_width == 0.0 => {
            quad(&|x| eval(ComplexPoint::new(x, c.im)), c.re - w, c.re + w)
        }
        BinGeometry::Strip { im_half_width } => quad(
            &|y| quad(&|x| eval(ComplexPoint::new(x, y)), c.re - w, c.re + w),
            c.im - im_half_width,
            c.im + im_half_width,
        ),
    };
    if let Some(msg) = failure.into_inner() {
        return Err(domain(format!("bin {bin}: {msg}")));
    }
    if !value.is_finite() {
        return Err(domain(format!("bin {bin}: quadrature did not converge")));
    }
    Ok(value)
}

fn touches_real_axis(spec: &BinSpec, bin: usize) -> bool {
    let c = spec.centers[bin];
    match spec.geometry {
        BinGeometry::Disk => c.im.abs() <= spec.window,
        BinGeometry::Annulus => true,
        BinGeometry::Strip { im_half_width } => c.im.abs() <= im_half_width,
    }
}

/// `∫ O_N` and `∫ ρ_N` over a bin, for comparing binned sample means with
/// the finite-N theory without assuming the bin is small.
///
/// For the GinOE, `O_N` grows like `1/|Im z|` at the real axis, so bins
/// reaching the axis have no finite overlap integral and are rejected.
pub fn bin_integrals(kind: EnsembleKind, n: usize, spec: &BinSpec, bin: usize) -> Result<BinIntegrals, StatsError> {
    if kind == EnsembleKind::GinOE && touches_real_axis(spec, bin) {
        return Err(domain(format!("bin {bin} reaches the real axis, where the GinOE overlap integral diverges")));
    }
    Ok(BinIntegrals {
        overlap: integrate_bin(spec, bin, &|z| overlap(kind, n, z))?,
        density: integrate_bin(spec, bin, &|z| density(kind, n, z))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::conditional_mean;

    #[test]
    fn ginue_bulk_density_integrates_to_area() {
        let spec = BinSpec::disks(vec![ComplexPoint::new(1.0, 2.0)], 1.0).unwrap();
        let b = bin_integrals(EnsembleKind::GinUE, 100, &spec, 0).unwrap();
        assert!((b.density - 1.0).abs() < 1e-8, "{}", b.density);
    }

    #[test]
    fn small_bins_reduce_to_the_point_value() {
        let z = ComplexPoint::new(0.5, 2.0);
        let spec = BinSpec::disks(vec![z], 1e-3).unwrap();
        for kind in [EnsembleKind::GinOE, EnsembleKind::GinUE] {
            let b = bin_integrals(kind, 20, &spec, 0).unwrap();
            let exact = conditional_mean(20, z, kind).unwrap();
            assert!((b.conditional_mean() / exact - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn annulus_total_counts_every_eigenvalue() {
        // ρ_GinUE integrates to N over the plane; the rings up to radius 12 hold all of it at N = 30.
        let radii: Vec<f64> = (0..6).map(|k| 1.0 + 2.0 * k as f64).collect();
        let spec = BinSpec::annuli(&radii, 1.0).unwrap();
        let total: f64 = (0..6).map(|k| bin_integrals(EnsembleKind::GinUE, 30, &spec, k).unwrap().density).sum();
        assert!((total - 30.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn ginoe_bins_reaching_the_axis_are_rejected() {
        let strip = BinSpec::strips(vec![ComplexPoint::new(0.0, 0.1)], 0.5, 0.2).unwrap();
        assert!(bin_integrals(EnsembleKind::GinOE, 10, &strip, 0).is_err());
        assert!(bin_integrals(EnsembleKind::GinUE, 10, &strip, 0).is_ok());
        let ring = BinSpec::annuli(&[2.0], 0.5).unwrap();
        assert!(bin_integrals(EnsembleKind::GinOE, 10, &ring, 0).is_err());
        let off_axis = BinSpec::strips(vec![ComplexPoint::new(0.0, 0.3)], 0.5, 0.2).unwrap();
        let b = bin_integrals(EnsembleKind::GinOE, 10, &off_axis, 0).unwrap();
        assert!(b.conditional_mean() > conditional_mean(10, ComplexPoint::new(0.0, 0.3), EnsembleKind::GinOE).unwrap());
    }
}
