use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{complex_schur, real_schur};
use crate::mc::sampling::draw;
use crate::mc::{domain, EigenBasis, GinibreMatrix, McError};
use crate::theory::{ComplexPoint, EnsembleKind};

/// First-order response of one eigenvalue to `G + εP`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    /// `ż(0) = x_L† P x_R`.
    pub derivative: ComplexPoint<f64>,
    /// `√O_nn`.
    pub bound: f64,
    /// `(z(+ε) − z(−ε))/(2ε)` from tracked perturbed spectra.
    pub fd_estimate: ComplexPoint<f64>,
    pub epsilon: f64,
}

impl PerturbationResult {
    pub fn within_bound(&self) -> bool {
        self.derivative.abs() <= self.bound * (1.0 + 1e-8)
    }
}

fn spectrum(m: &GinibreMatrix) -> Result<Vec<Complex64>, McError> {
    Ok(match m {
        GinibreMatrix::Real(a) => real_schur(a.clone(), false)?.eigenvalues,
        GinibreMatrix::Complex(a) => complex_schur(a.clone(), false)?.eigenvalues(),
    })
}

/// Follows `z` into a perturbed spectrum. The nearest perturbed eigenvalue
/// must lie within half the gap separating `z` from the rest of the
/// unperturbed spectrum, and must be the only one there.
fn track(z: Complex64, gap: f64, perturbed: &[Complex64]) -> Result<Complex64, McError> {
    let mut by_distance: Vec<(f64, Complex64)> = perturbed.iter().map(|&p| ((p - z).norm(), p)).collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (d1, nearest) = by_distance[0];
    let d2 = by_distance.get(1).map_or(f64::INFINITY, |p| p.0);
    if !(d1 < 0.5 * gap) {
        return Err(McError::Tracking(format!("moved {d1:e}, beyond half the spectral gap {gap:e}")));
    }
    if !(d2 >= 0.5 * gap) {
        return Err(McError::Tracking(format!("two perturbed eigenvalues within {d2:e} of {z}")));
    }
    Ok(nearest)
}

/// Derivative of eigenvalue `eigen_index` (in [`EigenBasis`] order) along
/// `P`, with a central finite-difference cross-check.
///
/// `p` must have unit spectral norm and `epsilon` must lie in `[1e-9, 1e-5]`.
pub fn perturbation_experiment(
    matrix: &GinibreMatrix,
    eigen_index: usize,
    p: &GinibreMatrix,
    epsilon: f64,
) -> Result<PerturbationResult, McError> {
    if !(1e-9..=1e-5).contains(&epsilon) {
        return Err(domain(format!("epsilon = {epsilon:e} outside [1e-9, 1e-5]")));
    }
    if p.dim() != matrix.dim() {
        return Err(domain("perturbation and matrix sizes differ"));
    }
    let norm = p.spectral_norm();
    if !((norm - 1.0).abs() <= 1e-8) {
        return Err(domain(format!("perturbation has spectral norm {norm}, expected 1")));
    }
    let basis = EigenBasis::new(matrix)?;
    let n = basis.dim();
    if eigen_index >= n {
        return Err(domain(format!("eigen_index {eigen_index} out of range for N = {n}")));
    }
    let pc = p.to_complex();
    let left = basis.left_vector(eigen_index);
    let right = basis.right_vector(eigen_index);
    let derivative: Complex64 = left.iter().zip(pc.matvec(&right)).map(|(l, r)| l * r).sum();
    let overlap = basis.self_overlaps()[eigen_index];

    let z = basis.eigenvalues[eigen_index];
    let gap = basis
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != eigen_index)
        .map(|(_, &w)| (w - z).norm())
        .fold(f64::INFINITY, f64::min);
    let plus = track(z, gap, &spectrum(&matrix.add_scaled(p, epsilon))?)?;
    let minus = track(z, gap, &spectrum(&matrix.add_scaled(p, -epsilon))?)?;
    let fd = (plus - minus) / (2.0 * epsilon);

    Ok(PerturbationResult {
        derivative: derivative.into(),
        bound: overlap.sqrt(),
        fd_estimate: fd.into(),
        epsilon,
    })
}

/// A Gaussian matrix of the given ensemble rescaled to unit spectral norm.
pub fn random_unit_perturbation<R: Rng>(kind: EnsembleKind, n: usize, rng: &mut R) -> GinibreMatrix {
    let m = draw(kind, n, rng);
    let s = 1.0 / m.spectral_norm();
    match m {
        GinibreMatrix::Real(a) => GinibreMatrix::Real(a.scaled(s)),
        GinibreMatrix::Complex(a) => GinibreMatrix::Complex(a.scaled(Complex64::new(s, 0.0))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::mc::sampling::sample_rng;
    use crate::mc::{sample_matrix, EnsembleConfig};

    fn ginoe20() -> GinibreMatrix {
        sample_matrix(&EnsembleConfig::new(EnsembleKind::GinOE, 20, 1, 1234), 0)
    }

    #[test]
    fn identity_direction_moves_every_eigenvalue_by_one() {
        let g = ginoe20();
        let p = GinibreMatrix::Real(Matrix::identity(20));
        for k in 0..20 {
            let r = perturbation_experiment(&g, k, &p, 1e-7).unwrap();
            assert!((r.derivative.to_complex() - 1.0).norm() < 1e-10, "{:?}", r.derivative);
            assert!((r.fd_estimate.to_complex() - 1.0).norm() < 1e-6);
        }
    }

    #[test]
    fn derivative_never_exceeds_root_overlap() {
        let g = ginoe20();
        let mut rng = sample_rng(5, 0);
        for trial in 0..1000 {
            let p = random_unit_perturbation(EnsembleKind::GinOE, 20, &mut rng);
            let r = perturbation_experiment(&g, trial % 20, &p, 1e-7).unwrap();
            assert!(r.within_bound(), "trial {trial}: |dz| = {} > {}", r.derivative.abs(), r.bound);
        }
    }

    #[test]
    fn finite_difference_matches_derivative() {
        let g = ginoe20();
        let mut rng = sample_rng(6, 0);
        for k in 0..20 {
            let p = random_unit_perturbation(EnsembleKind::GinOE, 20, &mut rng);
            let r = perturbation_experiment(&g, k, &p, 1e-7).unwrap();
            let d = r.derivative.to_complex();
            let err = (r.fd_estimate.to_complex() - d).norm();
            assert!(err <= 1e-6 * (1.0 + d.norm()), "eigenvalue {k}: fd error {err:e}");
        }
    }

    #[test]
    fn complex_perturbation_of_complex_matrix() {
        let g = sample_matrix(&EnsembleConfig::new(EnsembleKind::GinUE, 12, 1, 8), 0);
        let mut rng = sample_rng(8, 1);
        let p = random_unit_perturbation(EnsembleKind::GinUE, 12, &mut rng);
        for k in 0..12 {
            let r = perturbation_experiment(&g, k, &p, 1e-7).unwrap();
            assert!(r.within_bound());
            let d = r.derivative.to_complex();
            assert!((r.fd_estimate.to_complex() - d).norm() <= 1e-6 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn preconditions_are_enforced() {
        let g = ginoe20();
        let p = GinibreMatrix::Real(Matrix::identity(20));
        assert!(matches!(perturbation_experiment(&g, 0, &p, 1e-3), Err(McError::Domain(_))));
        let doubled = GinibreMatrix::Real(Matrix::identity(20).scaled(2.0));
        assert!(matches!(perturbation_experiment(&g, 0, &doubled, 1e-7), Err(McError::Domain(_))));
        assert!(matches!(perturbation_experiment(&g, 20, &p, 1e-7), Err(McError::Domain(_))));
    }

    #[test]
    fn tracking_refuses_ambiguous_matches() {
        let z = Complex64::new(0.0, 0.0);
        let spread = [Complex64::new(0.3, 0.0), Complex64::new(-0.3, 0.0)];
        assert!(matches!(track(z, 1.0, &spread), Err(McError::Tracking(_))));
        assert!(matches!(track(z, 0.4, &[Complex64::new(0.3, 0.0)]), Err(McError::Tracking(_))));
        assert_eq!(track(z, 1.0, &[Complex64::new(0.1, 0.0), Complex64::new(2.0, 0.0)]).unwrap(), Complex64::new(0.1, 0.0));
    }
}
