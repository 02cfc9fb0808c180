use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ginibre_core::distributions::{jpdf_ginue_finite_moments, limit_moments, LimitingJpdf};
use ginibre_core::mc::{
    eigen_overlaps, perturbation_experiment, random_unit_perturbation, run_campaign, sample_matrix, sample_rng,
    schur_cross_check, EigenBasis, EnsembleConfig, GinibreMatrix, RejectionReason,
};
use ginibre_core::specfun::{erfc, erfcx, integrate, integrate_semi_infinite, legendre_p, ln_gamma, reg_gamma_p, reg_gamma_q, QuadOptions};
use ginibre_core::stats::{bin_integrals, conditional_mean_series, BinSpec};
use ginibre_core::theory::{
    avg_det_charpoly_with, avg_det_mu_derivative, density_ginue, ln_avg_det_charpoly, overlap_ginoe, overlap_ginue,
    overlap_limit_bulk, overlap_limit_depletion, overlap_limit_edge, ComplexPoint,
};
use ginibre_core::EnsembleKind;
use serde::{Deserialize, Serialize};

use crate::error::{io_at, usage, CliError};
use crate::parse_ensemble;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Specfun,
    Theory,
    Distributions,
    Mc,
    Statistical,
}

/// Run a verification suite and write a JSON report.
#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Ensemble for the statistical suite.
    #[arg(long, value_parser = parse_ensemble)]
    pub ensemble: Option<EnsembleKind>,
    /// Matrix size for the statistical suite.
    #[arg(long)]
    pub n: Option<usize>,
    /// Matrices for the statistical suite.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Schur cross-check trials for the mc suite.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest acceptable |z-score| in the statistical suite.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Report file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub ensemble: Option<EnsembleKind>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn resolve(self) -> Result<VerifyConfig, CliError> {
        let statistical = self.suite == Suite::Statistical;
        let mc = self.suite == Suite::Mc;
        if !statistical && (self.ensemble.is_some() || self.n.is_some() || self.samples.is_some() || self.tolerance.is_some()) {
            return Err(usage("--ensemble, --n, --samples and --tolerance apply to the statistical suite"));
        }
        if !mc && self.trials.is_some() {
            return Err(usage("--trials applies to the mc suite"));
        }
        let n = statistical.then(|| self.n.unwrap_or(50));
        if n.is_some_and(|n| n < 4) {
            return Err(usage("the statistical suite needs n >= 4"));
        }
        let tolerance = statistical.then(|| self.tolerance.unwrap_or(3.0));
        if tolerance.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return Err(usage("--tolerance must be positive"));
        }
        let trials = mc.then(|| self.trials.unwrap_or(100));
        if trials == Some(0) {
            return Err(usage("--trials must be positive"));
        }
        Ok(VerifyConfig {
            suite: self.suite,
            ensemble: statistical.then(|| self.ensemble.unwrap_or(EnsembleKind::GinOE)),
            n,
            samples: statistical.then(|| self.samples.map_or(2000, |s| s as usize)),
            seed: self.seed,
            trials,
            tolerance,
            out: self.out,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

/// One statistical bin compared with the bin-integrated finite-N theory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinRow {
    pub region: &'static str,
    pub center: ComplexPoint<f64>,
    pub count: usize,
    pub empirical: f64,
    pub std_error: f64,
    pub theory: f64,
    pub z_score: f64,
    pub well_populated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bins: Vec<BinRow>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// Passes when `measured <= tolerance`.
    fn at_most(&mut self, name: impl Into<String>, measured: f64, tolerance: f64) {
        self.0.push(Check { name: name.into(), passed: measured <= tolerance, measured, tolerance });
    }

    /// Passes when `measured >= tolerance`.
    fn at_least(&mut self, name: impl Into<String>, measured: f64, tolerance: f64) {
        self.0.push(Check { name: name.into(), passed: measured >= tolerance, measured, tolerance });
    }

    fn fail(&mut self, name: impl Into<String>, tolerance: f64) {
        self.0.push(Check { name: name.into(), passed: false, measured: f64::NAN, tolerance });
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Largest value of `f` over `xs`, NaN-propagating.
fn worst<T>(xs: impl IntoIterator<Item = T>, f: impl Fn(T) -> f64) -> f64 {
    xs.into_iter().map(f).fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn pt(re: f64, im: f64) -> ComplexPoint<f64> {
    ComplexPoint::new(re, im)
}

fn specfun_suite() -> Checks {
    let mut c = Checks::default();
    let xs: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
    c.at_most("erfc(0) = 1", (erfc(0.0_f64) - 1.0).abs(), 1e-15);
    c.at_most("erfc(x) + erfc(-x) = 2", worst(&xs, |&x| (erfc(x) + erfc(-x) - 2.0).abs()), 1e-14);
    c.at_most("erfc(1) reference", rel(erfc(1.0_f64), 0.157_299_207_050_285_13), 1e-14);
    c.at_most("erfcx(x) = exp(x^2) erfc(x)", worst(&xs, |&x| rel(erfcx(x).unwrap_or(f64::NAN), (x * x).exp() * erfc(x))), 1e-13);
    let mut ln_fact = 0.0_f64;
    let mut gamma_err = 0.0_f64;
    for k in 1..=30 {
        gamma_err = gamma_err.max((ln_gamma(k as f64).unwrap_or(f64::NAN) - ln_fact).abs() / ln_fact.max(1.0));
        ln_fact += (k as f64).ln();
    }
    c.at_most("ln_gamma(k) = ln((k-1)!)", gamma_err, 1e-13);
    c.at_most("ln_gamma(1/2) = ln(sqrt(pi))", (ln_gamma(0.5_f64).unwrap_or(f64::NAN) - 0.5 * PI.ln()).abs(), 1e-14);
    let grid: Vec<(f64, f64)> =
        [0.5, 1.0, 5.0, 20.0, 100.0].iter().flat_map(|&a| [0.1, 1.0, 10.0, 50.0, 200.0].map(|x| (a, x))).collect();
    c.at_most(
        "P(a, x) + Q(a, x) = 1",
        worst(&grid, |&(a, x)| (reg_gamma_p(a, x).unwrap_or(f64::NAN) + reg_gamma_q(a, x).unwrap_or(f64::NAN) - 1.0).abs()),
        1e-13,
    );
    let series: Vec<(usize, f64)> = (1..=20).flat_map(|n| [0.5, 2.0, 10.0, 25.0].map(|x| (n, x))).collect();
    c.at_most(
        "Q(n, x) = exp(-x) sum_{k<n} x^k/k!",
        worst(&series, |&(n, x)| {
            let mut term = 1.0;
            let mut sum = 0.0;
            for k in 0..n {
                sum += term;
                term *= x / (k + 1) as f64;
            }
            rel(reg_gamma_q(n as f64, x).unwrap_or(f64::NAN), (-x).exp() * sum)
        }),
        1e-12,
    );
    c.at_most("P_n(1) = 1", worst(0..=20, |n| (legendre_p(n, 1.0_f64).unwrap_or(f64::NAN) - 1.0).abs()), 1e-14);
    c.at_most("P_2(t) = (3t^2 - 1)/2", worst([1.0, 1.5, 3.0, 10.0], |t: f64| rel(legendre_p(2, t).unwrap_or(f64::NAN), 1.5 * t * t - 0.5)), 1e-14);
    let opts = QuadOptions::default();
    c.at_most("integral of sin over [0, pi] = 2", (integrate(f64::sin, 0.0, PI, opts).map_or(f64::NAN, |q| q.value) - 2.0).abs(), 1e-10);
    c.at_most(
        "integral of exp(-x) over [0, inf) = 1",
        (integrate_semi_infinite(|x: f64| (-x).exp(), opts).map_or(f64::NAN, |q| q.value) - 1.0).abs(),
        1e-10,
    );
    c
}

fn theory_suite() -> Checks {
    let mut c = Checks::default();
    c.at_most("GinUE density is 1/pi in the bulk (N = 100)", rel(PI * density_ginue(100, pt(1.0, 1.0)).unwrap_or(f64::NAN), 1.0), 1e-12);

    let n = 4000usize;
    let root = (n as f64).sqrt();
    let ws: Vec<ComplexPoint<f64>> = (0..=16)
        .flat_map(|i| (0..=16).map(move |j| pt(-0.8 + 0.1 * i as f64, -0.8 + 0.1 * j as f64)))
        .filter(|w| w.abs() <= 0.8 && w.im.abs() >= 5.0 / root)
        .collect();
    c.at_most(
        "bulk limit, N = 4000, |w| <= 0.8",
        worst(&ws, |w| {
            let finite = overlap_ginoe(n, pt(root * w.re, root * w.im)).unwrap_or(f64::NAN) / n as f64;
            rel(finite, overlap_limit_bulk(*w))
        }),
        0.02,
    );

    let n = 1_000_000usize;
    let root = 1000.0;
    let scale = overlap_limit_edge(0.0_f64);
    c.at_most(
        "edge limit, N = 1e6, |error| / O_edge(0)",
        worst([-1.0, -0.5, 0.0, 0.5, 1.0], |eta: f64| {
            let finite = overlap_ginoe(n, pt(0.0, root + eta)).unwrap_or(f64::NAN) / root;
            (finite - overlap_limit_edge(eta)).abs() / scale
        }),
        0.01,
    );
    c.at_most(
        "depletion limit, N = 1e6",
        worst([0.25, 0.5, 1.0, 2.0, 4.0], |xi: f64| {
            let finite = overlap_ginoe(n, pt(0.0, xi)).unwrap_or(f64::NAN) / n as f64;
            rel(finite, overlap_limit_depletion(xi, None).unwrap_or(f64::NAN))
        }),
        0.01,
    );

    let cases: Vec<(usize, ComplexPoint<f64>)> = [1usize, 5, 20, 50]
        .iter()
        .flat_map(|&n| [0.5, 2.0, 5.0].map(|r| (n, ComplexPoint::from_polar(r, 0.7))))
        .collect();
    c.at_most(
        "det average at mu = 0 equals e^{|z|^2} Gamma(n+1, |z|^2)",
        worst(&cases, |&(n, z)| {
            let a = z.norm_sqr();
            let want = a + ln_gamma(n as f64 + 1.0).unwrap_or(f64::NAN) + reg_gamma_q(n as f64 + 1.0, a).unwrap_or(f64::NAN).ln();
            rel(ln_avg_det_charpoly(n, z, 0.0).unwrap_or(f64::NAN).exp(), want.exp())
        }),
        1e-9,
    );

    let n = 6usize;
    let z = pt(1.0, 1.0);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, max_panels: 4000 };
    let f = |mu: f64| avg_det_charpoly_with(n - 2, z, mu, opts).unwrap_or(f64::NAN);
    let f0 = f(0.0);
    let h = 0.05;
    let mut tab = [1.0, 2.0, 4.0, 8.0].map(|k| (f(h / k) - f0) / (h / k));
    for level in 1..4 {
        let s = (1u64 << level) as f64;
        for i in 0..4 - level {
            tab[i] = (s * tab[i + 1] - tab[i]) / (s - 1.0);
        }
    }
    let want = avg_det_mu_derivative(n, z).map_or(f64::NAN, |d| d.mu_derivative);
    c.at_most("mu-derivative of the det average (Richardson difference)", rel(tab[0], want), 1e-6);
    c
}

fn distributions_suite() -> Checks {
    let mut c = Checks::default();
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_panels: 4000 };
    let cases: Vec<(usize, f64)> = [3usize, 5, 10].iter().flat_map(|&n| [0.5, 1.0, 2.0].map(|r| (n, r))).collect();
    let moments: Vec<(f64, f64)> = cases
        .iter()
        .map(|&(n, r)| {
            let z = ComplexPoint::from_polar(r, 0.4);
            let (m0, m1) = jpdf_ginue_finite_moments(n, z, opts).unwrap_or((f64::NAN, f64::NAN));
            (rel(m0, density_ginue(n, z).unwrap_or(f64::NAN)), rel(m1, overlap_ginue(n, z).unwrap_or(f64::NAN)))
        })
        .collect();
    c.at_most("finite-N GinUE jpdf zeroth moment = density", worst(&moments, |m| m.0), 1e-8);
    c.at_most("finite-N GinUE jpdf first moment = mean overlap", worst(&moments, |m| m.1), 1e-8);

    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-11, max_panels: 4000 };
    let bulk: Vec<(f64, f64)> = [pt(0.0, 0.0), pt(0.5, 0.0), pt(0.3, 0.6)]
        .iter()
        .map(|&w| {
            let (m0, m1) = limit_moments(LimitingJpdf::BulkGinue { w }, opts).unwrap_or((f64::NAN, f64::NAN));
            (rel(m0, 1.0 / PI), rel(m1, (1.0 - w.norm_sqr()) / PI))
        })
        .collect();
    c.at_most("bulk jpdf marginal = 1/pi", worst(&bulk, |m| m.0), 1e-8);
    c.at_most("bulk jpdf first moment = (1 - |w|^2)/pi", worst(&bulk, |m| m.1), 1e-8);
    let edge: Vec<(f64, f64)> = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&eta: &f64| {
            let (m0, m1) = limit_moments(LimitingJpdf::EdgeGinue { eta }, opts).unwrap_or((f64::NAN, f64::NAN));
            (rel(m0, erfc(2f64.sqrt() * eta) / (2.0 * PI)), rel(m1, overlap_limit_edge(eta)))
        })
        .collect();
    c.at_most("edge jpdf marginal = erfc(sqrt(2) eta)/(2 pi)", worst(&edge, |m| m.0), 1e-6);
    c.at_most("edge jpdf first moment = edge overlap limit", worst(&edge, |m| m.1), 1e-6);
    c
}

fn mc_suite(seed: u64, trials: usize) -> Checks {
    let mut c = Checks::default();

    let mut agree = 0usize;
    let mut index = 0u64;
    let mut done = 0usize;
    while done < trials && index < 100 * trials as u64 {
        let n = [4, 6, 10][done % 3];
        let m = sample_matrix(&EnsembleConfig::new(EnsembleKind::GinOE, n, 1, seed), index);
        index += 1;
        let GinibreMatrix::Real(g) = &m else { unreachable!() };
        let Ok(eig) = eigen_overlaps(&m, f64::INFINITY) else { continue };
        let Some(&z) = eig.eigenvalues.iter().find(|z| z.im > 1e-6) else { continue };
        done += 1;
        if let Ok((schur, direct)) = schur_cross_check(g, z) {
            if (schur - direct).abs() <= 1e-8 * direct {
                agree += 1;
            }
        }
    }
    c.at_least(format!("Schur route agrees with eigendecomposition to 1e-8 ({trials} trials)"), agree as f64, trials as f64);

    let mut row_err = 0.0_f64;
    for kind in [EnsembleKind::GinOE, EnsembleKind::GinUE] {
        for i in 0..3 {
            let m = sample_matrix(&EnsembleConfig::new(kind, 50, 1, seed ^ 0x5eed), i);
            match EigenBasis::new(&m) {
                Ok(b) => {
                    let o = b.overlap_matrix();
                    for r in 0..50 {
                        let s: num_complex::Complex64 = (0..50).map(|j| o[(r, j)]).sum();
                        row_err = row_err.max((s - 1.0).norm());
                    }
                }
                Err(_) => row_err = f64::NAN,
            }
        }
    }
    c.at_most("overlap matrix row sums equal 1 (N = 50)", row_err, 1e-8);

    let config = EnsembleConfig::new(EnsembleKind::GinOE, 20, 300, seed);
    match (run_campaign(&config), run_campaign(&config)) {
        (Ok(a), Ok(b)) => {
            let min_o = a.records.iter().map(|r| r.self_overlap).fold(f64::INFINITY, f64::min);
            c.at_least("O_nn >= 1 - 1e-10", min_o, 1.0 - 1e-10);
            let pairing = a
                .rejections
                .iter()
                .filter(|r| matches!(r.reason, RejectionReason::UnpairedEigenvalue { .. } | RejectionReason::PairOverlapMismatch { .. }))
                .count();
            c.at_most("conjugate pairs found with equal overlaps (rejected samples)", pairing as f64, 0.0);
            c.at_most("re-run gives an identical record stream (differences)", (a.records != b.records) as u8 as f64, 0.0);
        }
        _ => c.fail("campaign runs", 0.0),
    }

    let g = sample_matrix(&EnsembleConfig::new(EnsembleKind::GinOE, 20, 1, seed ^ 0xbeef), 0);
    let mut rng = sample_rng(seed ^ 0xbeef, 1);
    let mut violations = 0usize;
    let experiments = 10 * trials;
    for t in 0..experiments {
        let p = random_unit_perturbation(EnsembleKind::GinOE, 20, &mut rng);
        match perturbation_experiment(&g, t % 20, &p, 1e-7) {
            Ok(r) if r.within_bound() => {}
            _ => violations += 1,
        }
    }
    c.at_most(format!("|dz/de| <= sqrt(O_nn) over {experiments} perturbations (violations)"), violations as f64, 0.0);
    c
}

fn statistical_suite(config: &VerifyConfig) -> Result<(Checks, Vec<BinRow>), CliError> {
    let kind = config.ensemble.unwrap_or(EnsembleKind::GinOE);
    let n = config.n.unwrap_or(50);
    let samples = config.samples.unwrap_or(2000);
    let tol = config.tolerance.unwrap_or(3.0);
    let root = (n as f64).sqrt();
    let campaign =
        run_campaign(&EnsembleConfig::new(kind, n, samples, config.seed)).map_err(|e| usage(e.to_string()))?;
    let records: Vec<_> = campaign.records.iter().filter(|r| !r.is_real).copied().collect();

    let mut bins: Vec<(&'static str, BinSpec)> = Vec::new();
    for frac in [0.2, 0.4, 0.6] {
        for theta in [FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4] {
            let c = ComplexPoint::from_polar(frac * root, theta);
            if c.im >= 2.0 {
                bins.push(("bulk", BinSpec::disks(vec![c], 1.0).expect("valid disk")));
            }
        }
    }
    for eta in [-1.0, -0.5, 0.0] {
        for theta in [FRAC_PI_2, PI / 3.0] {
            let c = ComplexPoint::from_polar(root + eta, theta);
            bins.push(("edge", BinSpec::disks(vec![c], 0.5).expect("valid disk")));
        }
    }
    if kind == EnsembleKind::GinOE {
        for xi in [0.5, 1.0, 2.0] {
            bins.push(("depletion", BinSpec::strips(vec![pt(0.0, xi)], 1.0, 0.2 * xi).expect("valid strip")));
        }
    }

    let mut rows = Vec::new();
    for (region, spec) in bins {
        let spec = spec.with_min_count(100);
        let b = conditional_mean_series(&records, &spec).map_err(|e| usage(e.to_string()))?.bins[0];
        let theory = bin_integrals(kind, n, &spec, 0).map_err(|e| usage(e.to_string()))?.conditional_mean();
        let z = (b.mean - theory) / b.std_error;
        rows.push(BinRow {
            region,
            center: b.center,
            count: b.count,
            empirical: b.mean,
            std_error: b.std_error,
            theory,
            z_score: z,
            well_populated: !b.low_statistics && z.is_finite(),
        });
    }
    let mut c = Checks::default();
    c.at_most("rejection rate", campaign.summary.rejection_rate, 1e-3);
    for region in ["bulk", "edge", "depletion"] {
        let good: Vec<&BinRow> = rows.iter().filter(|r| r.region == region && r.well_populated).collect();
        if rows.iter().any(|r| r.region == region) {
            let frac = if good.is_empty() {
                0.0
            } else {
                good.iter().filter(|r| r.z_score.abs() <= tol).count() as f64 / good.len() as f64
            };
            c.at_least(format!("{region}: fraction of well-populated bins with |z| <= {tol}"), frac, 0.9);
        }
    }
    Ok((c, rows))
}

pub fn report(config: &VerifyConfig) -> Result<Report, CliError> {
    let (checks, bins) = match config.suite {
        Suite::Specfun => (specfun_suite(), Vec::new()),
        Suite::Theory => (theory_suite(), Vec::new()),
        Suite::Distributions => (distributions_suite(), Vec::new()),
        Suite::Mc => (mc_suite(config.seed, config.trials.unwrap_or(100)), Vec::new()),
        Suite::Statistical => statistical_suite(config)?,
    };
    let passed = checks.0.iter().all(|c| c.passed);
    Ok(Report { suite: config.suite, passed, checks: checks.0, bins })
}

pub fn run(config: &VerifyConfig) -> Result<(), CliError> {
    let report = report(config)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &config.out {
        Some(path) => fs::write(path, &text).map_err(|e| io_at(path, e))?,
        None => print!("{text}"),
    }
    for check in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: measured {} (tolerance {})", check.name, check.measured, check.tolerance);
    }
    if report.passed {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(CliError::Verification(format!("{failed} of {} checks failed", report.checks.len())))
    }
}
