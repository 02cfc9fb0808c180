use serde::{Deserialize, Serialize};

use crate::mc::SpectralDatum;
use crate::stats::{domain, StatsError};

/// How `O_nn` is rescaled before histogramming.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapScaling {
    /// `O`.
    Raw,
    /// `s = (O − 1)/N`.
    BulkS,
    /// `σ = (O − 1)/√N`.
    EdgeSigma,
    /// `t = (O − 1)/(N(1 − |z|²/N))`, which removes the position dependence
    /// of the bulk law so records from different radii can be pooled.
    BulkReduced,
}

impl OverlapScaling {
    pub fn apply(self, r: &SpectralDatum, n: usize) -> f64 {
        let nf = n as f64;
        let t = r.self_overlap - 1.0;
        match self {
            OverlapScaling::Raw => r.self_overlap,
            OverlapScaling::BulkS => t / nf,
            OverlapScaling::EdgeSigma => t / nf.sqrt(),
            OverlapScaling::BulkReduced => t / (nf - r.z.norm_sqr()),
        }
    }
}

pub fn linear_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect()
}

pub fn log_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..=bins).map(|k| (a + (b - a) * k as f64 / bins as f64).exp()).collect()
}

/// Histogram normalized to unit mass over its grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapHistogram {
    pub scaling: OverlapScaling,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `count/(in_range × width)`.
    pub density: Vec<f64>,
    pub selected: usize,
    pub below: usize,
    pub above: usize,
}

impl OverlapHistogram {
    pub fn in_range(&self) -> usize {
        self.selected - self.below - self.above
    }

    pub fn width(&self, k: usize) -> f64 {
        self.edges[k + 1] - self.edges[k]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    /// Geometric bin centers, the natural abscissae on log-spaced grids.
    pub fn geometric_centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| (e[0] * e[1]).sqrt()).collect()
    }

    pub fn mass(&self) -> f64 {
        self.density.iter().enumerate().map(|(k, d)| d * self.width(k)).sum()
    }

    /// `max_k |F_emp(e_k) − F(e_k)|` over the bin edges, where `F_emp` counts
    /// every selected record (including those off the grid).
    pub fn cdf_sup_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let total = self.selected as f64;
        let mut cum = self.below;
        let mut worst = (cum as f64 / total - cdf(self.edges[0])).abs();
        for (k, &c) in self.counts.iter().enumerate() {
            cum += c;
            worst = worst.max((cum as f64 / total - cdf(self.edges[k + 1])).abs());
        }
        worst
    }

    /// `max_k |density_k − f̄_k|` with `f̄_k` the bin average of the
    /// reference density rescaled to the grid's coverage.
    pub fn density_sup_distance(&self, pdf: impl Fn(f64) -> f64) -> f64 {
        let coverage = self.in_range() as f64 / self.selected as f64;
        let mut worst = 0.0f64;
        for k in 0..self.counts.len() {
            let (a, b) = (self.edges[k], self.edges[k + 1]);
            let avg = (0..16).map(|j| pdf(a + (b - a) * (j as f64 + 0.5) / 16.0)).sum::<f64>() / 16.0;
            worst = worst.max((self.density[k] - avg / coverage).abs());
        }
        worst
    }
}

/// Histogram of scaled overlaps on `edges` (strictly increasing). Records
/// should already be restricted to the spatial region of interest.
pub fn overlap_histogram(
    records: &[SpectralDatum],
    scaling: OverlapScaling,
    n: usize,
    edges: &[f64],
) -> Result<OverlapHistogram, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptySelection);
    }
    if edges.len() < 2 || edges.windows(2).any(|e| !(e[1] > e[0])) {
        return Err(domain("histogram edges must be strictly increasing with at least one bin"));
    }
    let bins = edges.len() - 1;
    let mut counts = vec![0usize; bins];
    let (mut below, mut above) = (0usize, 0usize);
    for r in records {
        let v = scaling.apply(r, n);
        if v < edges[0] {
            below += 1;
        } else if v >= edges[bins] {
            above += 1;
        } else {
            // first edge strictly greater than v, minus one
            let k = edges.partition_point(|&e| e <= v) - 1;
            counts[k] += 1;
        }
    }
    let in_range = records.len() - below - above;
    let density = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| if in_range == 0 { 0.0 } else { c as f64 / (in_range as f64 * (edges[k + 1] - edges[k])) })
        .collect();
    Ok(OverlapHistogram { scaling, edges: edges.to_vec(), counts, density, selected: records.len(), below, above })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub std_error: f64,
    pub points: usize,
}

/// Minimum number of populated bins for a slope fit.
pub const MIN_FIT_BINS: usize = 10;

/// Least-squares slope of `ln density` against `ln(geometric center)` over
/// the populated bins whose edges lie in `fit_range`. Each bin is weighted
/// by its count, the inverse Poisson variance of its log-density.
pub fn tail_slope(hist: &OverlapHistogram, fit_range: (f64, f64)) -> Result<SlopeFit, StatsError> {
    let centers = hist.geometric_centers();
    let pts: Vec<(f64, f64, f64)> = (0..hist.counts.len())
        .filter(|&k| hist.counts[k] > 0 && hist.edges[k] >= fit_range.0 && hist.edges[k + 1] <= fit_range.1)
        .map(|k| (centers[k].ln(), hist.density[k].ln(), hist.counts[k] as f64))
        .collect();
    if pts.len() < MIN_FIT_BINS {
        return Err(StatsError::InsufficientBins { found: pts.len(), needed: MIN_FIT_BINS });
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2)).sum();
    let dof = (pts.len() - 2) as f64;
    let std_error = (rss / dof / sxx).sqrt();
    Ok(SlopeFit { slope, std_error, points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::ComplexPoint;

    fn records_from(values: &[f64]) -> Vec<SpectralDatum> {
        values
            .iter()
            .enumerate()
            .map(|(i, &o)| SpectralDatum {
                z: ComplexPoint::new(0.0, 0.0),
                self_overlap: o,
                is_real: false,
                sample_index: i as u64,
                eigen_index: 0,
            })
            .collect()
    }

    #[test]
    fn normal_matrix_overlaps_form_a_point_mass() {
        let h = overlap_histogram(&records_from(&[1.0; 50]), OverlapScaling::BulkS, 10, &linear_edges(0.0, 1.0, 20)).unwrap();
        assert_eq!(h.counts[0], 50);
        assert!(h.counts[1..].iter().all(|&c| c == 0));
        assert!((h.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mass_is_one_and_off_grid_records_are_counted() {
        let values: Vec<f64> = (0..997).map(|i| 1.0 + (i as f64 * 0.618).fract() * 30.0).collect();
        let h = overlap_histogram(&records_from(&values), OverlapScaling::Raw, 5, &log_edges(2.0, 20.0, 13)).unwrap();
        assert!((h.mass() - 1.0).abs() < 1e-12);
        assert_eq!(h.below + h.above + h.counts.iter().sum::<usize>(), 997);
        assert!(h.below > 0 && h.above > 0);
        assert!(overlap_histogram(&[], OverlapScaling::Raw, 5, &[0.0, 1.0]).is_err());
        assert!(overlap_histogram(&records_from(&[2.0]), OverlapScaling::Raw, 5, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn exact_power_law_slope() {
        let edges = log_edges(3.0, 30.0, 20);
        let density: Vec<f64> = edges.windows(2).map(|e| {
            // bin average of s^{-3}
            (e[0].powi(-2) - e[1].powi(-2)) / (2.0 * (e[1] - e[0]))
        }).collect();
        let counts: Vec<usize> = density.iter().zip(edges.windows(2)).map(|(d, e)| (d * (e[1] - e[0]) * 1e9) as usize).collect();
        let h = OverlapHistogram {
            scaling: OverlapScaling::BulkS,
            edges: edges.clone(),
            counts,
            density,
            selected: 1,
            below: 0,
            above: 0,
        };
        let fit = tail_slope(&h, (3.0, 30.0)).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-9, "{fit:?}");
    }

    #[test]
    fn too_few_bins_is_an_error() {
        let values: Vec<f64> = (0..100).map(|i| 1.0 + i as f64).collect();
        let h = overlap_histogram(&records_from(&values), OverlapScaling::Raw, 1, &log_edges(1.0, 200.0, 8)).unwrap();
        assert!(matches!(tail_slope(&h, (1.0, 200.0)), Err(StatsError::InsufficientBins { .. })));
    }

    #[test]
    fn sup_distances_vanish_for_exact_samples() {
        // Quantiles of F(t) = (1 + 1/t)e^{-1/t} by bisection.
        let cdf = |t: f64| if t <= 0.0 { 0.0 } else { (1.0 + 1.0 / t) * (-1.0 / t).exp() };
        let m = 20000;
        let values: Vec<f64> = (0..m)
            .map(|i| {
                let p = (i as f64 + 0.5) / m as f64;
                let (mut lo, mut hi) = (1e-6_f64, 1e8_f64);
                for _ in 0..200 {
                    let mid = (lo * hi).sqrt();
                    if cdf(mid) < p {
                        lo = mid
                    } else {
                        hi = mid
                    }
                }
                1.0 + lo
            })
            .collect();
        let h = overlap_histogram(&records_from(&values), OverlapScaling::BulkS, 1, &linear_edges(0.0, 5.0, 50)).unwrap();
        assert!(h.cdf_sup_distance(cdf) < 1e-3);
        let pdf = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() / t.powi(3) };
        assert!(h.density_sup_distance(pdf) < 0.01);
    }
}
