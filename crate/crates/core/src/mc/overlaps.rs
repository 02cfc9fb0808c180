use num_complex::Complex64;

use crate::linalg::{complex_schur, overlap_matrix, real_schur, self_overlaps, triangular_eigenvectors, unit_upper_inverse, Matrix};
use crate::mc::{
    GinibreMatrix, McError, RejectionReason, SpectralDatum, PAIR_OVERLAP_TOLERANCE, REAL_AXIS_TOLERANCE,
};
use crate::theory::ComplexPoint;

/// Eigenvalues and self-overlaps of one matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenOverlaps {
    pub eigenvalues: Vec<Complex64>,
    pub self_overlaps: Vec<f64>,
    /// Frobenius condition number `‖S‖_F ‖S⁻¹‖_F` of the unit-column
    /// eigenvector matrix, `√(N Σₙ Oₙₙ)`.
    pub condition: f64,
    /// Whether the input matrix was real.
    pub real_input: bool,
}

impl EigenOverlaps {
    /// Spectral data in diagonal order. For real input, eigenvalues within
    /// `REAL_AXIS_TOLERANCE·√N` of the axis are marked real.
    pub fn to_data(&self, sample_index: u64) -> Vec<SpectralDatum> {
        let tol = real_axis_threshold(self.eigenvalues.len());
        self.eigenvalues
            .iter()
            .zip(&self.self_overlaps)
            .enumerate()
            .map(|(k, (z, &o))| SpectralDatum {
                z: ComplexPoint::from(*z),
                self_overlap: o,
                is_real: self.real_input && z.im.abs() <= tol,
                sample_index,
                eigen_index: k,
            })
            .collect()
    }
}

pub(crate) fn real_axis_threshold(n: usize) -> f64 {
    REAL_AXIS_TOLERANCE * (n as f64).sqrt()
}

fn schur_triangle(matrix: &GinibreMatrix, want_z: bool) -> Result<(Matrix<Complex64>, Option<Matrix<Complex64>>), McError> {
    if !matrix.is_square() || matrix.dim() < 2 {
        return Err(super::domain("eigen_overlaps needs a square matrix with N >= 2"));
    }
    let schur = match matrix {
        GinibreMatrix::Real(a) => real_schur(a.clone(), want_z)?.into_complex(),
        GinibreMatrix::Complex(a) => complex_schur(a.clone(), want_z)?,
    };
    Ok((schur.t, schur.z))
}

/// Eigenvalues and self-overlaps `Oₙₙ = ‖row n of S⁻¹‖² ‖column n of S‖²`.
///
/// The matrix is brought to complex Schur form `A = Z T Zᴴ`; the right
/// eigenvectors of `T` form a unit upper-triangular `V` whose exact inverse
/// supplies the left eigenvectors. `S = Z V`, and the overlaps do not depend
/// on the unitary `Z`, so it is never formed.
///
/// Samples whose condition number exceeds `reject_threshold`, or whose
/// eigensolver fails, are rejected.
pub fn eigen_overlaps(matrix: &GinibreMatrix, reject_threshold: f64) -> Result<EigenOverlaps, McError> {
    let (t, _) = schur_triangle(matrix, false).map_err(|e| match e {
        McError::Linalg(err) => McError::Rejected(RejectionReason::Eigensolver { message: err.to_string() }),
        other => other,
    })?;
    let n = t.rows();
    let v = triangular_eigenvectors(&t);
    let w = unit_upper_inverse(&v);
    let overlaps = self_overlaps(&v, &w);
    let condition = ((n as f64) * overlaps.iter().sum::<f64>()).sqrt();
    if !(condition <= reject_threshold) {
        return Err(McError::Rejected(RejectionReason::IllConditioned { condition, threshold: reject_threshold }));
    }
    Ok(EigenOverlaps {
        eigenvalues: (0..n).map(|k| t[(k, k)]).collect(),
        self_overlaps: overlaps,
        condition,
        real_input: matrix.is_real(),
    })
}

/// Full bi-orthonormal eigenbasis in the original coordinates.
#[derive(Clone, Debug)]
pub struct EigenBasis {
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenvectors as columns of `S`.
    pub right: Matrix<Complex64>,
    /// Left eigenvectors `x_Lₙ†` as rows of `S⁻¹`.
    pub left: Matrix<Complex64>,
}

impl EigenBasis {
    pub fn new(matrix: &GinibreMatrix) -> Result<Self, McError> {
        let (t, z) = schur_triangle(matrix, true)?;
        let z = z.expect("Schur vectors requested");
        let v = triangular_eigenvectors(&t);
        let w = unit_upper_inverse(&v);
        Ok(Self {
            eigenvalues: (0..t.rows()).map(|k| t[(k, k)]).collect(),
            right: z.matmul(&v),
            left: w.matmul(&z.adjoint()),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn right_vector(&self, k: usize) -> Vec<Complex64> {
        self.right.column(k)
    }

    /// The row vector `x_Lₖ†`.
    pub fn left_vector(&self, k: usize) -> &[Complex64] {
        self.left.row(k)
    }

    pub fn self_overlaps(&self) -> Vec<f64> {
        self_overlaps(&self.right, &self.left)
    }

    /// `Oₙₘ = (x_Lₙ† x_Lₘ)(x_Rₘ† x_Rₙ)`.
    pub fn overlap_matrix(&self) -> Matrix<Complex64> {
        overlap_matrix(&self.right, &self.left)
    }

    /// Largest deviation of `x_Lₙ† x_Rₘ` from `δₙₘ`.
    pub fn biorthogonality_defect(&self) -> f64 {
        let p = self.left.matmul(&self.right);
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Spectrum of one real matrix split into real eigenvalues and upper-half
/// representatives of conjugate pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    /// All input records with `is_real` reassigned.
    pub data: Vec<SpectralDatum>,
    pub real: Vec<SpectralDatum>,
    pub complex_upper: Vec<SpectralDatum>,
    /// Eigen indices `(upper, lower)` of each matched pair.
    pub pairs: Vec<(usize, usize)>,
}

/// Marks eigenvalues with `|Im z| ≤ 1e-8·√n` as real and matches the rest
/// into conjugate pairs, greedily by distance to the conjugate.
///
/// A complex eigenvalue without partner, or a pair whose overlaps differ by
/// more than `1e-6` relative, rejects the sample.
pub fn classify_eigenvalues(data: &[SpectralDatum], n: usize) -> Result<Classification, McError> {
    let tol = real_axis_threshold(n);
    let mut data: Vec<SpectralDatum> = data.to_vec();
    for d in data.iter_mut() {
        d.is_real = d.z.im.abs() <= tol;
    }
    let upper: Vec<usize> = (0..data.len()).filter(|&i| !data[i].is_real && data[i].z.im > 0.0).collect();
    let mut lower: Vec<usize> = (0..data.len()).filter(|&i| !data[i].is_real && data[i].z.im < 0.0).collect();
    let mut pairs = Vec::with_capacity(upper.len());
    for &u in &upper {
        let target = data[u].z.conj();
        let best = lower
            .iter()
            .enumerate()
            .map(|(slot, &l)| (slot, (data[l].z.re - target.re).hypot(data[l].z.im - target.im)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let unpaired = || {
            McError::Rejected(RejectionReason::UnpairedEigenvalue { eigen_index: data[u].eigen_index, z: data[u].z })
        };
        let Some((slot, dist)) = best else { return Err(unpaired()) };
        if dist > tol {
            return Err(unpaired());
        }
        let l = lower.swap_remove(slot);
        let (ou, ol) = (data[u].self_overlap, data[l].self_overlap);
        let relative_difference = (ou - ol).abs() / ou.max(ol);
        if !(relative_difference <= PAIR_OVERLAP_TOLERANCE) {
            return Err(McError::Rejected(RejectionReason::PairOverlapMismatch {
                eigen_index: data[u].eigen_index,
                partner: data[l].eigen_index,
                relative_difference,
            }));
        }
        pairs.push((data[u].eigen_index, data[l].eigen_index));
    }
    if let Some(&l) = lower.first() {
        return Err(McError::Rejected(RejectionReason::UnpairedEigenvalue { eigen_index: data[l].eigen_index, z: data[l].z }));
    }
    Ok(Classification {
        real: data.iter().copied().filter(|d| d.is_real).collect(),
        complex_upper: upper.iter().map(|&u| data[u]).collect(),
        data,
        pairs,
    })
}
