use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;
use crate::mc::EnsembleConfig;
use crate::theory::EnsembleKind;

/// A sampled matrix, real (GinOE) or complex (GinUE).
#[derive(Clone, Debug, PartialEq)]
pub enum GinibreMatrix {
    Real(Matrix<f64>),
    Complex(Matrix<Complex64>),
}

impl GinibreMatrix {
    pub fn dim(&self) -> usize {
        match self {
            GinibreMatrix::Real(m) => m.rows(),
            GinibreMatrix::Complex(m) => m.rows(),
        }
    }

    pub fn is_square(&self) -> bool {
        match self {
            GinibreMatrix::Real(m) => m.is_square(),
            GinibreMatrix::Complex(m) => m.is_square(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, GinibreMatrix::Real(_))
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        match self {
            GinibreMatrix::Real(m) => m.to_complex(),
            GinibreMatrix::Complex(m) => m.clone(),
        }
    }

    /// `self + s·other`, staying real when both operands are.
    pub fn add_scaled(&self, other: &GinibreMatrix, s: f64) -> GinibreMatrix {
        match (self, other) {
            (GinibreMatrix::Real(a), GinibreMatrix::Real(b)) => GinibreMatrix::Real(a.add(&b.scaled(s))),
            _ => GinibreMatrix::Complex(self.to_complex().add(&other.to_complex().scaled(Complex64::new(s, 0.0)))),
        }
    }

    pub fn spectral_norm(&self) -> f64 {
        match self {
            GinibreMatrix::Real(m) => m.spectral_norm(),
            GinibreMatrix::Complex(m) => m.spectral_norm(),
        }
    }
}

/// Per-sample generator: ChaCha20 keyed by the master seed, stream = sample index.
/// The generator behind sample `sample_index` of a campaign seeded with `master_seed`.
pub fn sample_rng(master_seed: u64, sample_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(sample_index);
    rng
}

/// Draws matrix number `sample_index` of the campaign described by `config`.
///
/// GinOE entries are `N(0, 1)`; GinUE entries have independent `N(0, ½)` real
/// and imaginary parts. Entries are drawn row by row.
pub fn sample_matrix(config: &EnsembleConfig, sample_index: u64) -> GinibreMatrix {
    let mut rng = sample_rng(config.master_seed, sample_index);
    draw(config.kind, config.n, &mut rng)
}

pub(crate) fn draw<R: Rng>(kind: EnsembleKind, n: usize, rng: &mut R) -> GinibreMatrix {
    match kind {
        EnsembleKind::GinOE => GinibreMatrix::Real(Matrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))),
        EnsembleKind::GinUE => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            GinibreMatrix::Complex(Matrix::from_fn(n, n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_index_give_identical_matrices() {
        let config = EnsembleConfig::new(EnsembleKind::GinUE, 7, 10, 99);
        assert_eq!(sample_matrix(&config, 3), sample_matrix(&config, 3));
        assert_ne!(sample_matrix(&config, 3), sample_matrix(&config, 4));
        let other = EnsembleConfig { master_seed: 100, ..config };
        assert_ne!(sample_matrix(&config, 3), sample_matrix(&other, 3));
    }

    #[test]
    fn ginoe_entries_are_standard_normal() {
        let n = 1000;
        let config = EnsembleConfig::new(EnsembleKind::GinOE, n, 1, 2024);
        let GinibreMatrix::Real(m) = sample_matrix(&config, 0) else { panic!("expected a real matrix") };
        let count = (n * n) as f64;
        let mean = m.as_slice().iter().sum::<f64>() / count;
        let var = m.as_slice().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
        assert!(mean.abs() < 4.0 / count.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn ginue_entries_have_unit_total_variance() {
        let n = 1000;
        let config = EnsembleConfig::new(EnsembleKind::GinUE, n, 1, 2024);
        let GinibreMatrix::Complex(m) = sample_matrix(&config, 0) else { panic!("expected a complex matrix") };
        let count = (n * n) as f64;
        let second = m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / count;
        let re_var = m.as_slice().iter().map(|z| z.re * z.re).sum::<f64>() / count;
        assert!((second - 1.0).abs() < 0.02, "E|g|^2 = {second}");
        assert!((re_var - 0.5).abs() < 0.01, "E(Re g)^2 = {re_var}");
    }
}
