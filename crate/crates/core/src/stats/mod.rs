//! Empirical observables from record streams: conditional means and
//! densities in spatial bins, overlap histograms, tail slopes and
//! theory-versus-sample comparison reports.

mod histogram;
mod integrated;

pub use histogram::{linear_edges, log_edges, overlap_histogram, tail_slope, OverlapHistogram, OverlapScaling, SlopeFit};
pub use integrated::{bin_integrals, BinIntegrals};

use serde::{Deserialize, Serialize};

use crate::mc::SpectralDatum;
use crate::theory::ComplexPoint;

/// Bins with fewer records are flagged as low-statistics.
pub const DEFAULT_MIN_COUNT: usize = 1000;

/// Half-width `1/√N` used by the figure conventions.
pub fn default_window(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no records selected")]
    EmptySelection,
    #[error("{found} populated bins in the fit range, need at least {needed}")]
    InsufficientBins { found: usize, needed: usize },
}

pub(crate) fn domain(detail: impl Into<String>) -> StatsError {
    StatsError::Domain(detail.into())
}

/// Shape of the acceptance region around each bin center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "snake_case")]
pub enum BinGeometry {
    /// `|z − c| ≤ window`.
    Disk,
    /// `||z| − r| ≤ window` with `r = c.re`.
    Annulus,
    /// `|Re z − c.re| ≤ window` and `|Im z − c.im| ≤ im_half_width`.
    Strip { im_half_width: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub centers: Vec<ComplexPoint<f64>>,
    pub window: f64,
    pub geometry: BinGeometry,
    pub min_count: usize,
}

impl BinSpec {
    pub fn new(centers: Vec<ComplexPoint<f64>>, window: f64, geometry: BinGeometry) -> Result<Self, StatsError> {
        if centers.is_empty() {
            return Err(domain("bin spec needs at least one center"));
        }
        if !(window > 0.0 && window.is_finite()) {
            return Err(domain(format!("window must be positive, got {window}")));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(domain("non-finite bin center"));
        }
        match geometry {
            BinGeometry::Annulus if centers.iter().any(|c| c.im != 0.0 || c.re < 0.0) => {
                return Err(domain("annulus targets are radii: non-negative real centers"));
            }
            BinGeometry::Strip { im_half_width } if !(im_half_width >= 0.0 && im_half_width.is_finite()) => {
                return Err(domain(format!("strip im_half_width must be non-negative, got {im_half_width}")));
            }
            _ => {}
        }
        Ok(Self { centers, window, geometry, min_count: DEFAULT_MIN_COUNT })
    }

    pub fn disks(centers: Vec<ComplexPoint<f64>>, window: f64) -> Result<Self, StatsError> {
        Self::new(centers, window, BinGeometry::Disk)
    }

    pub fn annuli(radii: &[f64], window: f64) -> Result<Self, StatsError> {
        Self::new(radii.iter().map(|&r| ComplexPoint::new(r, 0.0)).collect(), window, BinGeometry::Annulus)
    }

    pub fn strips(centers: Vec<ComplexPoint<f64>>, window: f64, im_half_width: f64) -> Result<Self, StatsError> {
        Self::new(centers, window, BinGeometry::Strip { im_half_width })
    }

    pub fn with_min_count(mut self, min_count: usize) -> Self {
        self.min_count = min_count;
        self
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn contains(&self, bin: usize, z: ComplexPoint<f64>) -> bool {
        let c = self.centers[bin];
        match self.geometry {
            BinGeometry::Disk => (z.re - c.re).hypot(z.im - c.im) <= self.window,
            BinGeometry::Annulus => (z.abs() - c.re).abs() <= self.window,
            BinGeometry::Strip { im_half_width } => {
                (z.re - c.re).abs() <= self.window && (z.im - c.im).abs() <= im_half_width
            }
        }
    }

    /// Area of the bin; a zero-height strip is measured by its length.
    pub fn measure(&self, bin: usize) -> f64 {
        let w = self.window;
        match self.geometry {
            BinGeometry::Disk => std::f64::consts::PI * w * w,
            BinGeometry::Annulus => {
                let r = self.centers[bin].re;
                let inner = (r - w).max(0.0);
                std::f64::consts::PI * ((r + w).powi(2) - inner * inner)
            }
            BinGeometry::Strip { im_half_width } if im_half_width == 0.0 => 2.0 * w,
            BinGeometry::Strip { im_half_width } => 4.0 * w * im_half_width,
        }
    }
}

/// Mergeable running mean and variance (Welford / Chan).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Accumulator {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        self.mean += d * nb / n;
        self.m2 += other.m2 + d * d * na * nb / n;
        self.count += other.count;
    }

    /// Sample variance (denominator `count − 1`); NaN below two records.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// `sd/√count`; NaN below two records.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub center: ComplexPoint<f64>,
    pub count: usize,
    pub mean: f64,
    pub std_error: f64,
    pub low_statistics: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinnedSeries {
    pub bins: Vec<Bin>,
}

impl BinnedSeries {
    pub fn well_populated(&self) -> impl Iterator<Item = &Bin> {
        self.bins.iter().filter(|b| !b.low_statistics)
    }
}

/// Mean and standard error of `self_overlap` over the records falling in
/// each bin. Overlapping bins may share records; empty bins are flagged.
pub fn conditional_mean_series(records: &[SpectralDatum], spec: &BinSpec) -> Result<BinnedSeries, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptySelection);
    }
    let mut acc = vec![Accumulator::default(); spec.len()];
    for r in records {
        for (k, a) in acc.iter_mut().enumerate() {
            if spec.contains(k, r.z) {
                a.push(r.self_overlap);
            }
        }
    }
    let bins = acc
        .iter()
        .zip(&spec.centers)
        .map(|(a, &center)| Bin {
            center,
            count: a.count,
            mean: if a.count == 0 { f64::NAN } else { a.mean },
            std_error: a.std_error(),
            low_statistics: a.count < spec.min_count.max(2),
        })
        .collect();
    Ok(BinnedSeries { bins })
}

/// Eigenvalue density per unit area (per unit length for zero-height
/// strips): `count/(samples × measure)` with Poisson error `√count/(samples × measure)`.
pub fn density_histogram(records: &[SpectralDatum], spec: &BinSpec, samples: usize) -> Result<BinnedSeries, StatsError> {
    if samples == 0 {
        return Err(domain("density needs the number of sampled matrices"));
    }
    let mut counts = vec![0usize; spec.len()];
    for r in records {
        for (k, c) in counts.iter_mut().enumerate() {
            if spec.contains(k, r.z) {
                *c += 1;
            }
        }
    }
    let mut bins = Vec::with_capacity(spec.len());
    for (k, &count) in counts.iter().enumerate() {
        let measure = spec.measure(k);
        if !(measure > 0.0) {
            return Err(domain(format!("bin {k} has zero measure")));
        }
        let norm = samples as f64 * measure;
        bins.push(Bin {
            center: spec.centers[k],
            count,
            mean: count as f64 / norm,
            std_error: (count as f64).sqrt() / norm,
            low_statistics: count < spec.min_count,
        });
    }
    Ok(BinnedSeries { bins })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinComparison {
    pub center: ComplexPoint<f64>,
    pub count: usize,
    pub theory: f64,
    pub empirical: f64,
    pub std_error: f64,
    /// `(empirical − theory)/std_error`; NaN when the error is unavailable.
    pub z_score: f64,
    /// `(empirical − theory)/theory`.
    pub relative_error: f64,
    pub well_populated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub bins: Vec<BinComparison>,
    /// Largest `|z|` over well-populated bins.
    pub max_abs_z: f64,
    /// Fraction of well-populated bins with `|z| ≤ 3`.
    pub fraction_within_3: f64,
    pub well_populated: usize,
}

impl ComparisonReport {
    /// At least `min_fraction` of the well-populated bins have `|z| ≤ z_max`
    /// and `|relative error| ≤ max_relative` (pass `f64::INFINITY` to skip
    /// the latter). No well-populated bins means failure.
    pub fn passes(&self, min_fraction: f64, z_max: f64, max_relative: f64) -> bool {
        let good: Vec<&BinComparison> = self.bins.iter().filter(|b| b.well_populated).collect();
        if good.is_empty() {
            return false;
        }
        let ok = good.iter().filter(|b| b.z_score.abs() <= z_max && b.relative_error.abs() <= max_relative).count();
        ok as f64 >= min_fraction * good.len() as f64
    }
}

/// Compares each bin with `theory(center)`.
pub fn compare(series: &BinnedSeries, mut theory: impl FnMut(ComplexPoint<f64>) -> f64) -> ComparisonReport {
    let bins: Vec<BinComparison> = series
        .bins
        .iter()
        .map(|b| {
            let t = theory(b.center);
            let z_score = if b.std_error > 0.0 { (b.mean - t) / b.std_error } else { f64::NAN };
            BinComparison {
                center: b.center,
                count: b.count,
                theory: t,
                empirical: b.mean,
                std_error: b.std_error,
                z_score,
                relative_error: (b.mean - t) / t,
                well_populated: !b.low_statistics && z_score.is_finite(),
            }
        })
        .collect();
    let good: Vec<&BinComparison> = bins.iter().filter(|b| b.well_populated).collect();
    let max_abs_z = good.iter().map(|b| b.z_score.abs()).fold(0.0, f64::max);
    let fraction_within_3 = if good.is_empty() {
        0.0
    } else {
        good.iter().filter(|b| b.z_score.abs() <= 3.0).count() as f64 / good.len() as f64
    };
    let well_populated = good.len();
    ComparisonReport { bins, max_abs_z, fraction_within_3, well_populated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{run_campaign, EnsembleConfig};
    use crate::theory::EnsembleKind;

    fn datum(re: f64, im: f64, o: f64, i: u64) -> SpectralDatum {
        SpectralDatum { z: ComplexPoint::new(re, im), self_overlap: o, is_real: false, sample_index: i, eigen_index: 0 }
    }

    #[test]
    fn single_record_bin() {
        let spec = BinSpec::disks(vec![ComplexPoint::new(0.0, 0.0)], 1.0).unwrap();
        let s = conditional_mean_series(&[datum(0.1, 0.1, 3.5, 0)], &spec).unwrap();
        assert_eq!(s.bins[0].count, 1);
        assert_eq!(s.bins[0].mean, 3.5);
        assert!(s.bins[0].low_statistics && s.bins[0].std_error.is_nan());
    }

    #[test]
    fn duplicated_stream_scales_error() {
        let records: Vec<SpectralDatum> = (0..400).map(|i| datum(0.0, 0.0, 1.0 + (i as f64 * 0.37).sin().abs(), i)).collect();
        let doubled: Vec<SpectralDatum> = records.iter().chain(records.iter()).copied().collect();
        let spec = BinSpec::disks(vec![ComplexPoint::new(0.0, 0.0)], 1.0).unwrap().with_min_count(10);
        let a = conditional_mean_series(&records, &spec).unwrap().bins[0];
        let b = conditional_mean_series(&doubled, &spec).unwrap().bins[0];
        assert!((a.mean - b.mean).abs() < 1e-14);
        // sd changes by √((2n−2)/(2n−1)·n/(n−1)) ≈ 1 for large n
        let ratio = b.std_error / a.std_error;
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 2e-3, "{ratio}");
    }

    #[test]
    fn estimators_ignore_record_order() {
        let records: Vec<SpectralDatum> =
            (0..1000).map(|i| datum((i as f64).sin(), (i as f64 * 1.3).cos(), 1.0 + (i % 17) as f64, i)).collect();
        let mut shuffled = records.clone();
        shuffled.reverse();
        shuffled.rotate_left(333);
        let spec = BinSpec::annuli(&[0.3, 0.7, 1.0], 0.2).unwrap().with_min_count(5);
        let a = conditional_mean_series(&records, &spec).unwrap();
        let b = conditional_mean_series(&shuffled, &spec).unwrap();
        for (x, y) in a.bins.iter().zip(&b.bins) {
            assert_eq!(x.count, y.count);
            assert!((x.mean - y.mean).abs() <= 1e-12 * x.mean);
            assert!((x.std_error - y.std_error).abs() <= 1e-10 * x.std_error);
        }
    }

    #[test]
    fn accumulator_merge_equals_single_pass() {
        let xs: Vec<f64> = (0..500).map(|i| (i as f64 * 0.7).sin() * 10.0 + 3.0).collect();
        let mut whole = Accumulator::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut a, mut b) = (Accumulator::default(), Accumulator::default());
        xs[..123].iter().for_each(|&x| a.push(x));
        xs[123..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count, whole.count);
        assert!((a.mean - whole.mean).abs() < 1e-13);
        assert!((a.variance() - whole.variance()).abs() < 1e-11);
    }

    #[test]
    fn compare_against_itself_and_shifted() {
        let records: Vec<SpectralDatum> = (0..5000).map(|i| datum(0.0, 0.0, 2.0 + (i as f64).cos(), i)).collect();
        let spec = BinSpec::disks(vec![ComplexPoint::new(0.0, 0.0), ComplexPoint::new(0.0, 0.5)], 1.0).unwrap();
        let series = conditional_mean_series(&records, &spec).unwrap();
        let means: Vec<f64> = series.bins.iter().map(|b| b.mean).collect();
        let se: Vec<f64> = series.bins.iter().map(|b| b.std_error).collect();
        let lookup = |c: ComplexPoint<f64>| if c.im == 0.0 { 0 } else { 1 };
        let same = compare(&series, |c| means[lookup(c)]);
        assert!(same.bins.iter().all(|b| b.z_score == 0.0));
        assert_eq!(same.fraction_within_3, 1.0);
        let shifted = compare(&series, |c| means[lookup(c)] + 10.0 * se[lookup(c)]);
        assert!(shifted.bins.iter().all(|b| (b.z_score.abs() - 10.0).abs() < 1e-9));
        assert!(!shifted.passes(0.95, 3.0, f64::INFINITY));
        assert!(same.passes(0.95, 3.0, 0.05));
    }

    #[test]
    fn bin_measures() {
        let spec = BinSpec::annuli(&[0.1, 2.0], 0.5).unwrap();
        assert!((spec.measure(0) - std::f64::consts::PI * 0.36).abs() < 1e-14);
        assert!((spec.measure(1) - std::f64::consts::PI * (6.25 - 2.25)).abs() < 1e-12);
        let strip = BinSpec::strips(vec![ComplexPoint::new(0.0, 0.0)], 2.0, 0.0).unwrap();
        assert_eq!(strip.measure(0), 4.0);
        assert!(BinSpec::annuli(&[1.0], 0.0).is_err());
        assert!(BinSpec::new(vec![ComplexPoint::new(1.0, 1.0)], 0.5, BinGeometry::Annulus).is_err());
        assert!(BinSpec::disks(vec![], 0.5).is_err());
    }

    #[test]
    fn ginue_bulk_density_is_one_over_pi() {
        let n = 100;
        let samples = 400;
        let c = run_campaign(&EnsembleConfig::new(EnsembleKind::GinUE, n, samples, 17)).unwrap();
        let r = 0.3 * (n as f64).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
        let spec = BinSpec::disks(vec![ComplexPoint::new(r, r)], 1.0).unwrap().with_min_count(100);
        let d = density_histogram(&c.records, &spec, samples).unwrap().bins[0];
        assert!((d.mean - std::f64::consts::FRAC_1_PI).abs() <= 3.0 * d.std_error, "{} ± {}", d.mean, d.std_error);

        // Rings tiling the droplet and beyond hold all N eigenvalues per sample.
        let radii: Vec<f64> = (0..20).map(|k| 0.5 + k as f64).collect();
        let rings = BinSpec::annuli(&radii, 0.5).unwrap();
        let dens = density_histogram(&c.records, &rings, samples).unwrap();
        let total: f64 = dens.bins.iter().enumerate().map(|(k, b)| b.mean * rings.measure(k)).sum();
        assert!((total - n as f64).abs() < 1e-9, "{total}");
    }

    #[test]
    fn ginoe_complex_density_vanishes_on_the_axis() {
        let n = 30;
        let samples = 500;
        let c = run_campaign(&EnsembleConfig::new(EnsembleKind::GinOE, n, samples, 5)).unwrap();
        let complex: Vec<SpectralDatum> = c.records.iter().copied().filter(|r| !r.is_real).collect();
        let mut last = f64::INFINITY;
        for h in [0.4, 0.1, 0.025] {
            let spec = BinSpec::strips(vec![ComplexPoint::new(0.0, 0.0)], 2.0, h).unwrap();
            let d = density_histogram(&complex, &spec, samples).unwrap().bins[0].mean;
            assert!(d < last);
            last = d;
        }
        assert!(last < 0.05, "{last}");
    }

    #[test]
    fn doubling_samples_shrinks_errors() {
        let n = 20;
        let radii = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5];
        let spec = BinSpec::annuli(&radii, 0.25).unwrap().with_min_count(10);
        let median_se = |samples: usize| {
            let c = run_campaign(&EnsembleConfig::new(EnsembleKind::GinUE, n, samples, 99)).unwrap();
            let mut se: Vec<f64> = conditional_mean_series(&c.records, &spec).unwrap().bins.iter().map(|b| b.std_error).collect();
            se.sort_by(f64::total_cmp);
            se[se.len() / 2]
        };
        let ratio = median_se(8000) / median_se(4000);
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() <= 0.1 * std::f64::consts::FRAC_1_SQRT_2, "{ratio}");
    }
}
