use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ginibre_core::distributions::{normalized_pdf, LimitingJpdf};
use ginibre_core::io::{RecordFile, RecordHeader};
use ginibre_core::mc::{run_campaign, EnsembleConfig, SpectralDatum};
use ginibre_core::stats::{
    bin_integrals, conditional_mean_series, density_histogram, linear_edges, log_edges, overlap_histogram, BinSpec,
    OverlapScaling,
};
use ginibre_core::theory::{conditional_mean, conditional_mean_limit, density_limit, ComplexPoint, RegimeCoordinates};
use ginibre_core::{EnsembleKind, Regime};
use serde::{Deserialize, Serialize};

use crate::error::{io_at, usage, CliError};
use crate::output::{num, Table};
use crate::parse_ensemble;
use crate::theory::grid;

const GINOE: EnsembleKind = EnsembleKind::GinOE;
const GINUE: EnsembleKind = EnsembleKind::GinUE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    /// E(iy) at finite N against both finite-N formulas.
    Fig3,
    /// Bulk conditional means against the Chalker–Mehlig curve.
    Fig4,
    /// GinOE edge conditional means against the edge limit.
    Fig5,
    /// GinOE depletion regime: density and conditional means near the axis.
    Fig6,
    /// Self-overlap histograms in the depletion, bulk and edge regions.
    Fig7,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }

    fn allows(self, kind: EnsembleKind) -> bool {
        matches!(self, FigureId::Fig3 | FigureId::Fig4) || kind == GINOE
    }

    /// Desk-scale campaigns: `(ensemble, N, matrices)`.
    fn preset(self) -> Vec<(EnsembleKind, usize, usize)> {
        match self {
            FigureId::Fig3 => [8, 20, 50].iter().flat_map(|&n| [(GINOE, n, 20_000), (GINUE, n, 20_000)]).collect(),
            FigureId::Fig4 => vec![(GINOE, 50, 2000), (GINOE, 100, 1000), (GINOE, 250, 400), (GINUE, 250, 400)],
            FigureId::Fig5 => vec![(GINOE, 50, 2000), (GINOE, 100, 1000), (GINOE, 250, 400)],
            FigureId::Fig6 | FigureId::Fig7 => vec![(GINOE, 250, 1000)],
        }
    }

    /// Selection boxes and their defaults.
    fn region_defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            FigureId::Fig3 => &[],
            FigureId::Fig4 => &[("im_min", 1.0)],
            FigureId::Fig5 => &[("im_min", 2.0)],
            FigureId::Fig6 => &[("re_half", 1.0), ("strip_re", 0.05)],
            FigureId::Fig7 => &[
                ("dep_re", 0.5),
                ("dep_im", 1.0),
                ("bulk_im_min", 3.0),
                ("bulk_r", 0.7),
                ("edge_im_min", 3.0),
                ("edge_half", 0.5),
            ],
        }
    }
}

/// Reproduce the data behind one figure.
#[derive(Args, Debug)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub figure: FigureId,
    /// Use this record file instead of sampling.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Restrict to one ensemble.
    #[arg(long, value_parser = parse_ensemble)]
    pub ensemble: Option<EnsembleKind>,
    /// Replace the preset matrix sizes with this one.
    #[arg(long)]
    pub n: Option<usize>,
    /// Matrices per campaign (default: per-figure preset).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bin half-width (default 1/√N).
    #[arg(long)]
    pub window: Option<f64>,
    /// Selection boxes as `key=value,...`; keys depend on the figure.
    #[arg(long)]
    pub region: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Where a figure's eigenvalues come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Source {
    Sampled { ensemble: EnsembleKind, n: usize, samples: usize, seed: u64 },
    Records { path: PathBuf, ensemble: EnsembleKind, n: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureConfig {
    pub figure: FigureId,
    pub sources: Vec<Source>,
    pub window: Option<f64>,
    pub region: BTreeMap<String, f64>,
    pub out: PathBuf,
}

/// Per-campaign seed so that campaigns of one figure do not share streams.
fn derive_seed(seed: u64, kind: EnsembleKind, n: usize) -> u64 {
    let mut x = seed ^ ((n as u64) << 1 | (kind == GINUE) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn read_header(path: &Path) -> Result<RecordHeader, CliError> {
    let mut line = String::new();
    BufReader::new(File::open(path).map_err(|e| io_at(path, e))?).read_line(&mut line).map_err(|e| io_at(path, e))?;
    serde_json::from_str(&line).map_err(|e| io_at(path, format!("bad record header: {e}")))
}

fn parse_region(figure: FigureId, spec: Option<&str>) -> Result<BTreeMap<String, f64>, CliError> {
    let mut region: BTreeMap<String, f64> = figure.region_defaults().iter().map(|&(k, v)| (k.to_string(), v)).collect();
    for item in spec.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("region entry '{item}' is not key=value")))?;
        let slot = region.get_mut(k.trim()).ok_or_else(|| {
            let keys: Vec<&str> = figure.region_defaults().iter().map(|p| p.0).collect();
            usage(format!("{} has no region key '{}' (known: {})", figure.name(), k.trim(), keys.join(", ")))
        })?;
        let v: f64 = v.trim().parse().map_err(|_| usage(format!("region value '{v}' is not a number")))?;
        if !(v >= 0.0 && v.is_finite()) {
            return Err(usage(format!("region value {k} = {v} must be finite and non-negative")));
        }
        *slot = v;
    }
    Ok(region)
}

impl FigureArgs {
    pub fn resolve(self) -> Result<FigureConfig, CliError> {
        let fig = self.figure;
        if let Some(kind) = self.ensemble {
            if !fig.allows(kind) {
                return Err(usage(format!("{} is a GinOE figure", fig.name())));
            }
        }
        if let Some(n) = self.n {
            if n < 2 {
                return Err(usage(format!("n = {n} (need n >= 2)")));
            }
        }
        if let Some(w) = self.window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(usage(format!("window must be positive, got {w}")));
            }
        }
        let region = parse_region(fig, self.region.as_deref())?;
        let sources = match &self.records {
            Some(path) => {
                if self.samples.is_some() {
                    return Err(usage("--samples applies only when sampling"));
                }
                let h = read_header(path)?;
                if let Some(k) = self.ensemble.filter(|&k| k != h.ensemble) {
                    return Err(usage(format!("{} holds {} records, not {k}", path.display(), h.ensemble)));
                }
                if !fig.allows(h.ensemble) {
                    return Err(usage(format!("{} holds {} records, which {} cannot use", path.display(), h.ensemble, fig.name())));
                }
                if let Some(n) = self.n.filter(|&n| n != h.n) {
                    return Err(usage(format!("{} holds N = {} records, not N = {n}", path.display(), h.n)));
                }
                vec![Source::Records { path: path.clone(), ensemble: h.ensemble, n: h.n }]
            }
            None => {
                let mut sources: Vec<Source> = Vec::new();
                for (kind, n, samples) in fig.preset() {
                    if self.ensemble.is_some_and(|k| k != kind) {
                        continue;
                    }
                    let n = self.n.unwrap_or(n);
                    if sources.iter().any(|s| matches!(s, Source::Sampled { ensemble, n: m, .. } if *ensemble == kind && *m == n)) {
                        continue;
                    }
                    let samples = self.samples.map_or(samples, |s| s as usize);
                    sources.push(Source::Sampled { ensemble: kind, n, samples, seed: derive_seed(self.seed, kind, n) });
                }
                sources
            }
        };
        Ok(FigureConfig { figure: fig, sources, window: self.window, region, out: self.out })
    }
}

/// Eigenvalue records of one campaign.
struct Data {
    kind: EnsembleKind,
    n: usize,
    /// Accepted matrices.
    samples: usize,
    records: Vec<SpectralDatum>,
}

impl Data {
    fn root(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    fn complex(&self, keep: impl Fn(ComplexPoint<f64>) -> bool) -> Vec<SpectralDatum> {
        self.records.iter().filter(|r| !r.is_real && keep(r.z)).copied().collect()
    }
}

fn load(figure: FigureId, source: &Source) -> Result<Data, CliError> {
    match *source {
        Source::Sampled { ensemble, n, samples, seed } => {
            let c = run_campaign(&EnsembleConfig::new(ensemble, n, samples, seed)).map_err(|e| usage(e.to_string()))?;
            if let Some(w) = &c.summary.warning {
                eprintln!("warning: {ensemble} N = {n}: {w}");
            }
            Ok(Data { kind: ensemble, n, samples: c.summary.accepted, records: c.records })
        }
        Source::Records { ref path, ensemble, n } => {
            let file = RecordFile::load(path).map_err(|e| io_at(path, e))?;
            if file.header.ensemble != ensemble || file.header.n != n || !figure.allows(ensemble) {
                return Err(usage(format!("{} no longer matches {} N = {}", path.display(), ensemble, n)));
            }
            Ok(Data { kind: ensemble, n, samples: file.accepted_samples(), records: file.records })
        }
    }
}

const SERIES_COLUMNS: [&str; 9] = ["series", "ensemble", "n", "x", "count", "mean", "std_error", "low_statistics", "theory_bin"];

/// One conditional-mean (or density) bin per row, scaled by `scale`.
struct SeriesWriter<'a> {
    table: &'a mut Table,
}

impl SeriesWriter<'_> {
    /// Conditional means of `records` in single-bin `specs` at abscissae `xs`.
    /// `theory_bin` adds the bin-integrated finite-N value where it exists.
    fn means(
        &mut self,
        name: &str,
        d: &Data,
        records: &[SpectralDatum],
        specs: &[(f64, BinSpec)],
        scale: f64,
        theory_bin: bool,
    ) -> Result<(), CliError> {
        for (x, spec) in specs {
            let b = conditional_mean_series(records, spec).map_err(|e| usage(format!("{name}: {e}")))?.bins[0];
            let theory = if theory_bin {
                bin_integrals(d.kind, d.n, spec, 0).map(|t| t.conditional_mean() / scale).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            self.row(name, d, *x, b.count, b.mean / scale, b.std_error / scale, b.low_statistics, theory);
        }
        Ok(())
    }

    /// Eigenvalue densities per unit area.
    fn densities(&mut self, name: &str, d: &Data, records: &[SpectralDatum], specs: &[(f64, BinSpec)]) -> Result<(), CliError> {
        for (x, spec) in specs {
            let b = density_histogram(records, spec, d.samples).map_err(|e| usage(format!("{name}: {e}")))?.bins[0];
            let theory = bin_integrals(d.kind, d.n, spec, 0).map(|t| t.density / spec.measure(0)).unwrap_or(f64::NAN);
            self.row(name, d, *x, b.count, b.mean, b.std_error, b.low_statistics, theory);
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn row(&mut self, name: &str, d: &Data, x: f64, count: usize, mean: f64, se: f64, low: bool, theory: f64) {
        self.table.push(vec![
            name.to_string(),
            d.kind.to_string(),
            d.n.to_string(),
            num(x),
            count.to_string(),
            num(mean),
            num(se),
            low.to_string(),
            num(theory),
        ]);
    }
}

fn disk_free_strip(center: ComplexPoint<f64>, re_half: f64, im_half: f64) -> BinSpec {
    BinSpec::strips(vec![center], re_half, im_half).expect("valid strip")
}

fn annulus(r: f64, w: f64) -> BinSpec {
    BinSpec::annuli(&[r], w).expect("valid annulus")
}

/// Theory curves in long format.
struct Curves {
    table: Table,
}

impl Curves {
    fn new() -> Self {
        Self { table: Table::new(&["curve", "x", "value"]) }
    }

    fn formula(&mut self, name: &str, text: &str) {
        self.table.meta("formula", format!("{name}: {text}"));
    }

    /// Samples `f` on `xs`, skipping points where it is undefined.
    fn add<E>(&mut self, name: &str, xs: &[f64], f: impl Fn(f64) -> Result<f64, E>) {
        for &x in xs {
            if let Ok(v) = f(x) {
                if v.is_finite() {
                    self.table.push(vec![name.to_string(), num(x), num(v)]);
                }
            }
        }
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    grid(a, b, points).into_iter().map(f64::exp).collect()
}

/// A gnuplot panel.
struct Panel {
    title: String,
    xlabel: &'static str,
    ylabel: &'static str,
    logx: bool,
    logy: bool,
    layers: Vec<String>,
}

impl Panel {
    fn new(title: impl Into<String>, xlabel: &'static str, ylabel: &'static str) -> Self {
        Self { title: title.into(), xlabel, ylabel, logx: false, logy: false, layers: Vec::new() }
    }

    fn log(mut self, x: bool, y: bool) -> Self {
        self.logx = x;
        self.logy = y;
        self
    }

    /// Markers with error bars from the empirical series file.
    fn points(&mut self, file: &str, series: &str, title: &str) {
        self.layers.push(format!(
            "'{file}' using (strcol(1) eq \"{series}\" ? $4 : 1/0):6:7 with yerrorbars pt 7 ps 0.6 title \"{title}\""
        ));
    }

    fn curve(&mut self, file: &str, curve: &str, title: &str) {
        self.layers.push(format!("'{file}' using (strcol(1) eq \"{curve}\" ? $2 : 1/0):3 with lines lw 2 title \"{title}\""));
    }

    fn histogram(&mut self, file: &str, series: &str, binning: &str, title: &str) {
        self.layers.push(format!(
            "'{file}' using (strcol(1) eq \"{series}\" && strcol(2) eq \"{binning}\" ? ($3+$4)/2 : 1/0):6 with steps lw 2 title \"{title}\""
        ));
    }
}

fn script(name: &str, panels: &[Panel]) -> String {
    let mut s = format!(
        "# Run with: gnuplot {name}.gp\nset datafile separator \",\"\nset key autotitle columnhead\nset terminal pngcairo size {},420\nset output \"{name}.png\"\nset multiplot layout 1,{}\n",
        460 * panels.len(),
        panels.len()
    );
    for p in panels {
        s.push_str(&format!("set title \"{}\"\nset xlabel \"{}\"\nset ylabel \"{}\"\n", p.title, p.xlabel, p.ylabel));
        s.push_str(if p.logx { "set logscale x\n" } else { "unset logscale x\n" });
        s.push_str(if p.logy { "set logscale y\n" } else { "unset logscale y\n" });
        s.push_str(&format!("plot {}\n", p.layers.join(", \\\n     ")));
    }
    s.push_str("unset multiplot\n");
    s
}

struct Output {
    empirical: Table,
    theory: Table,
    panels: Vec<Panel>,
}

fn files(fig: FigureId) -> (String, String) {
    (format!("{}_empirical.csv", fig.name()), format!("{}_theory.csv", fig.name()))
}

fn fig3(data: &[Data], window: Option<f64>) -> Result<Output, CliError> {
    let (emp, th) = files(FigureId::Fig3);
    let mut empirical = Table::new(&SERIES_COLUMNS);
    empirical.meta("figure", "fig3: E(O_nn | z = iy) at finite N");
    empirical.meta("bins", "GinOE: |Re z| <= w, |Im z - y| <= w (complex eigenvalues); GinUE: ||z| - y| <= w; w = 1/sqrt(N) unless overridden");
    let mut curves = Curves::new();
    curves.formula("ginoe_n*", "finite-N GinOE conditional mean O_N(iy)/rho_N(iy)");
    curves.formula("ginue_n*", "finite-N GinUE conditional mean O_N(iy)/rho_N(iy)");
    let mut sizes: Vec<usize> = data.iter().map(|d| d.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut panels = Vec::new();
    for &n in &sizes {
        let root = (n as f64).sqrt();
        let mut p = Panel::new(format!("N = {n}"), "y", "E(iy)").log(false, true);
        for d in data.iter().filter(|d| d.n == n) {
            let w = window.unwrap_or(1.0 / root);
            let ys = grid(1.5 * w, 1.2 * root, 16);
            let name = format!("{}_n{n}", d.kind);
            let mut writer = SeriesWriter { table: &mut empirical };
            match d.kind {
                EnsembleKind::GinOE => {
                    let specs: Vec<(f64, BinSpec)> =
                        ys.iter().map(|&y| (y, disk_free_strip(ComplexPoint::new(0.0, y), w, w))).collect();
                    writer.means(&name, d, &d.complex(|_| true), &specs, 1.0, true)?;
                }
                EnsembleKind::GinUE => {
                    let specs: Vec<(f64, BinSpec)> = ys.iter().map(|&y| (y, annulus(y, w))).collect();
                    writer.means(&name, d, &d.records, &specs, 1.0, true)?;
                }
            }
            p.points(&emp, &name, &format!("{} simulation", d.kind));
        }
        let ys = grid(0.01 * root, 1.2 * root, 200);
        for kind in [GINOE, GINUE] {
            let name = format!("{kind}_n{n}");
            curves.add(&name, &ys, |y| conditional_mean(n, ComplexPoint::new(0.0, y), kind));
            p.curve(&th, &name, &format!("{kind} theory"));
        }
        panels.push(p);
    }
    Ok(Output { empirical, theory: curves.table, panels })
}

fn fig4(data: &[Data], window: Option<f64>, region: &BTreeMap<String, f64>) -> Result<Output, CliError> {
    let (emp, th) = files(FigureId::Fig4);
    let im_min = region["im_min"];
    let mut empirical = Table::new(&SERIES_COLUMNS);
    empirical.meta("figure", "fig4: bulk conditional means E(O_nn | z)/N against |w| = |z|/sqrt(N)");
    empirical.meta("bins", format!("bulk_*: ||z| - sqrt(N)|w|| <= w, complex eigenvalues with |Im z| >= {im_min}; axis_*: as fig3"));
    let mut curves = Curves::new();
    curves.formula("chalker_mehlig", "1 - |w|^2");
    let mut left = Panel::new("GinOE bulk", "|w|", "E/N");
    let mut right = Panel::new("imaginary axis", "|w|", "E/N");
    let ws: Vec<f64> = (1..=18).map(|k| 0.05 * k as f64).collect();
    let axis_ws = [0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    for d in data {
        let n = d.n as f64;
        let root = d.root();
        let w = window.unwrap_or(1.0 / root);
        let mut writer = SeriesWriter { table: &mut empirical };
        if d.kind == GINOE {
            let name = format!("bulk_ginoe_n{}", d.n);
            let specs: Vec<(f64, BinSpec)> = ws.iter().map(|&x| (x, annulus(root * x, w))).collect();
            writer.means(&name, d, &d.complex(|z| z.im.abs() >= im_min), &specs, n, false)?;
            left.points(&emp, &name, &format!("N = {}", d.n));
        }
        let largest = data.iter().filter(|e| e.kind == d.kind).map(|e| e.n).max() == Some(d.n);
        if largest {
            let name = format!("axis_{}_n{}", d.kind, d.n);
            let xs: Vec<f64> = axis_ws.iter().copied().filter(|&x| root * x >= 1.5 * w).collect();
            let specs: Vec<(f64, BinSpec)> = match d.kind {
                EnsembleKind::GinOE => xs.iter().map(|&x| (x, disk_free_strip(ComplexPoint::new(0.0, root * x), w, w))).collect(),
                EnsembleKind::GinUE => xs.iter().map(|&x| (x, annulus(root * x, w))).collect(),
            };
            writer.means(&name, d, &d.complex(|_| true), &specs, n, true)?;
            right.points(&emp, &name, &format!("{} N = {}", d.kind, d.n));
            let curve = format!("{}_axis_n{}", d.kind, d.n);
            curves.formula(&curve, &format!("finite-N {} conditional mean at z = i sqrt(N)|w|, over N", d.kind));
            let n_int = d.n;
            let kind = d.kind;
            curves.add(&curve, &grid(0.005, 1.1, 220), |x| conditional_mean(n_int, ComplexPoint::new(0.0, root * x), kind).map(|v| v / n));
            right.curve(&th, &curve, &format!("{} finite N", d.kind));
        }
    }
    curves.add("chalker_mehlig", &grid(0.0, 1.0, 101), |x| Ok::<f64, ()>(1.0 - x * x));
    left.curve(&th, "chalker_mehlig", "1 - |w|^2");
    right.curve(&th, "chalker_mehlig", "1 - |w|^2");
    Ok(Output { empirical, theory: curves.table, panels: vec![left, right] })
}

fn fig5(data: &[Data], window: Option<f64>, region: &BTreeMap<String, f64>) -> Result<Output, CliError> {
    let (emp, th) = files(FigureId::Fig5);
    let im_min = region["im_min"];
    let mut empirical = Table::new(&SERIES_COLUMNS);
    empirical.meta("figure", "fig5: GinOE edge conditional means E(O_nn | z)/sqrt(N) against eta = |z| - sqrt(N)");
    empirical.meta("bins", format!("||z| - sqrt(N) - eta| <= w, complex eigenvalues with |Im z| >= {im_min}"));
    let mut curves = Curves::new();
    curves.formula("edge_limit", "edge limit of E(O_nn|z)/sqrt(N)");
    curves.formula("edge_density", "edge limit of the density, erfc(sqrt(2) eta)/(2 pi)");
    let mut left = Panel::new("edge density", "eta", "density");
    let mut right = Panel::new("GinOE edge", "eta", "E/sqrt(N)");
    let etas: Vec<f64> = (0..17).map(|k| -2.5 + 0.25 * k as f64).collect();
    let fine = grid(-3.0, 2.0, 201);
    for d in data {
        let root = d.root();
        let w = window.unwrap_or(1.0 / root);
        let name = format!("edge_ginoe_n{}", d.n);
        let specs: Vec<(f64, BinSpec)> = etas.iter().map(|&eta| (eta, annulus(root + eta, w))).collect();
        SeriesWriter { table: &mut empirical }.means(&name, d, &d.complex(|z| z.im.abs() >= im_min), &specs, root, false)?;
        right.points(&emp, &name, &format!("N = {}", d.n));
        let curve = format!("ginoe_imag_n{}", d.n);
        curves.formula(&curve, "finite-N GinOE conditional mean at z = i(sqrt(N) + eta), over sqrt(N)");
        let n = d.n;
        curves.add(&curve, &fine, |eta| conditional_mean(n, ComplexPoint::new(0.0, root + eta), GINOE).map(|v| v / root));
    }
    curves.add("edge_limit", &fine, |eta| conditional_mean_limit(Regime::Edge, RegimeCoordinates::edge(eta, 0.0), GINOE));
    curves.add("edge_density", &fine, |eta| density_limit(Regime::Edge, RegimeCoordinates::edge(eta, 0.0), GINOE));
    right.curve(&th, "edge_limit", "edge limit");
    left.curve(&th, "edge_density", "limit");
    Ok(Output { empirical, theory: curves.table, panels: vec![left, right] })
}

fn fig6(data: &[Data], region: &BTreeMap<String, f64>) -> Result<Output, CliError> {
    let (emp, th) = files(FigureId::Fig6);
    let (re_half, strip_re) = (region["re_half"], region["strip_re"]);
    let mut empirical = Table::new(&SERIES_COLUMNS);
    empirical.meta("figure", "fig6: GinOE depletion regime, z = sqrt(N) delta + i xi");
    empirical.meta(
        "bins",
        format!("density/origin: |Re z| <= {re_half}, |Im z - xi| <= 0.2 xi; strip: |Re z - sqrt(N) delta| <= {strip_re} sqrt(N), |Im z - xi| <= 0.2 xi"),
    );
    let mut curves = Curves::new();
    curves.formula("depletion_density", "GinOE depletion density sqrt(2/pi)|xi| erfcx(sqrt(2)|xi|)");
    curves.formula("ginue_density", "GinUE bulk density 1/pi");
    curves.formula("depletion_origin", "GinOE depletion limit of E(O_nn|z)/N at delta = 0");
    curves.formula("chalker_mehlig", "1 (bulk limit at w = 0)");
    let mut left = Panel::new("density near the axis", "xi", "density").log(true, false);
    let mut centre = Panel::new("origin", "xi", "E/N").log(true, true);
    let mut right = Panel::new("strip", "delta", "E/N").log(false, true);
    let xis = [0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0, 1.4, 2.0, 3.0, 4.0, 6.0, 8.0];
    let strip_xis = [0.5, 1.0, 2.0];
    let deltas: Vec<f64> = (0..13).map(|k| -0.9 + 0.15 * k as f64).collect();
    for d in data {
        let n = d.n as f64;
        let root = d.root();
        let complex = d.complex(|_| true);
        let specs: Vec<(f64, BinSpec)> =
            xis.iter().map(|&xi| (xi, disk_free_strip(ComplexPoint::new(0.0, xi), re_half, 0.2 * xi))).collect();
        let mut writer = SeriesWriter { table: &mut empirical };
        let name = format!("density_imag_n{}", d.n);
        writer.densities(&name, d, &complex, &specs)?;
        left.points(&emp, &name, &format!("N = {}", d.n));
        let name = format!("origin_n{}", d.n);
        writer.means(&name, d, &complex, &specs, n, true)?;
        centre.points(&emp, &name, &format!("N = {}", d.n));
        for &xi in &strip_xis {
            let name = format!("strip_xi{xi}_n{}", d.n);
            let specs: Vec<(f64, BinSpec)> = deltas
                .iter()
                .map(|&dl| (dl, disk_free_strip(ComplexPoint::new(root * dl, xi), strip_re * root, 0.2 * xi)))
                .collect();
            writer.means(&name, d, &complex, &specs, n, true)?;
            right.points(&emp, &name, &format!("xi = {xi}"));
        }
    }
    let fine = log_grid(0.05, 10.0, 200);
    curves.add("depletion_density", &fine, |xi| density_limit(Regime::Depletion, RegimeCoordinates::depletion(xi, 0.0), GINOE));
    curves.add("ginue_density", &fine, |_| Ok::<f64, ()>(std::f64::consts::FRAC_1_PI));
    curves.add("depletion_origin", &fine, |xi| {
        conditional_mean_limit(Regime::Depletion, RegimeCoordinates::depletion(xi, 0.0), GINOE)
    });
    curves.add("chalker_mehlig", &fine, |_| Ok::<f64, ()>(1.0));
    left.curve(&th, "depletion_density", "GinOE limit");
    left.curve(&th, "ginue_density", "GinUE 1/pi");
    centre.curve(&th, "depletion_origin", "depletion limit");
    centre.curve(&th, "chalker_mehlig", "Chalker-Mehlig");
    let dl = grid(-0.99, 0.99, 199);
    for &xi in &strip_xis {
        let name = format!("depletion_strip_xi{xi}");
        curves.formula(&name, &format!("GinOE depletion limit of E(O_nn|z)/N at xi = {xi}"));
        curves.add(&name, &dl, |delta| {
            conditional_mean_limit(Regime::Depletion, RegimeCoordinates::depletion(xi, delta), GINOE)
        });
        right.curve(&th, &name, &format!("xi = {xi}"));
    }
    curves.formula("chalker_mehlig_strip", "1 - delta^2");
    curves.add("chalker_mehlig_strip", &dl, |delta| Ok::<f64, ()>(1.0 - delta * delta));
    right.curve(&th, "chalker_mehlig_strip", "Chalker-Mehlig");
    Ok(Output { empirical, theory: curves.table, panels: vec![left, centre, right] })
}

fn fig7(data: &[Data], region: &BTreeMap<String, f64>) -> Result<Output, CliError> {
    let (emp, th) = files(FigureId::Fig7);
    let d = data.iter().max_by_key(|d| d.n).ok_or_else(|| usage("fig7 needs one GinOE campaign"))?;
    let root = d.root();
    let r = |k: &str| region[k];
    let mut empirical = Table::new(&["series", "binning", "lo", "hi", "count", "density"]);
    empirical.meta("figure", format!("fig7: self-overlap histograms, GinOE N = {}", d.n));
    empirical.meta("depletion", format!("complex, |Re z| <= {} sqrt(N), |Im z| <= {}; variable s = (O-1)/N", r("dep_re"), r("dep_im")));
    empirical.meta("bulk", format!("complex, |Im z| >= {}, |z| <= {} sqrt(N); variable t = (O-1)/(N - |z|^2)", r("bulk_im_min"), r("bulk_r")));
    empirical.meta("edge", format!("complex, |Im z| >= {}, ||z| - sqrt(N)| <= {}; variable sigma = (O-1)/sqrt(N)", r("edge_im_min"), r("edge_half")));
    let selections = [
        ("depletion", OverlapScaling::BulkS, d.complex(|z| z.re.abs() <= r("dep_re") * root && z.im.abs() <= r("dep_im")), (2.0, 1e-3)),
        ("bulk", OverlapScaling::BulkReduced, d.complex(|z| z.im.abs() >= r("bulk_im_min") && z.abs() <= r("bulk_r") * root), (3.0, 1e-2)),
        ("edge", OverlapScaling::EdgeSigma, d.complex(|z| z.im.abs() >= r("edge_im_min") && (z.abs() - root).abs() <= r("edge_half")), (3.0, 1e-2)),
    ];
    let bulk_cdf = |t: f64| if t <= 0.0 { 0.0 } else { (1.0 + 1.0 / t) * (-1.0 / t).exp() };
    for (name, scaling, records, (lin_hi, log_lo)) in &selections {
        empirical.meta(&format!("{name}_records"), records.len());
        if records.is_empty() {
            continue;
        }
        for (binning, edges) in [("linear", linear_edges(0.0, *lin_hi, 60)), ("log", log_edges(*log_lo, 100.0, 50))] {
            let h = overlap_histogram(records, *scaling, d.n, &edges).map_err(|e| usage(format!("{name}: {e}")))?;
            if *name == "bulk" && binning == "linear" {
                empirical.meta("bulk_cdf_sup_distance", num(h.cdf_sup_distance(bulk_cdf)));
            }
            for k in 0..h.counts.len() {
                empirical.push(vec![
                    name.to_string(),
                    binning.to_string(),
                    num(edges[k]),
                    num(edges[k + 1]),
                    h.counts[k].to_string(),
                    num(h.density[k]),
                ]);
            }
        }
    }
    let mut curves = Curves::new();
    curves.formula("ginue_bulk_w0", "GinUE bulk pdf of s at w = 0, s^-3 exp(-1/s)");
    curves.formula("ginoe_realbulk_x0", "GinOE real-eigenvalue bulk pdf of s at x = 0, s^-2 exp(-1/(2s))/2");
    curves.formula("ginue_edge_eta0", "GinUE edge pdf of sigma at eta = 0");
    let fine = log_grid(1e-3, 100.0, 300);
    let zero = ComplexPoint::new(0.0, 0.0);
    curves.add("ginue_bulk_w0", &fine, |s| normalized_pdf(LimitingJpdf::BulkGinue { w: zero }, s));
    curves.add("ginoe_realbulk_x0", &fine, |s| normalized_pdf(LimitingJpdf::RealBulkGinoe { x: 0.0 }, s));
    curves.add("ginue_edge_eta0", &fine, |s| normalized_pdf(LimitingJpdf::EdgeGinue { eta: 0.0 }, s));
    let mut panels = Vec::new();
    for (name, curve_list) in [
        ("depletion", vec![("ginue_bulk_w0", "GinUE bulk"), ("ginoe_realbulk_x0", "GinOE real bulk")]),
        ("bulk", vec![("ginue_bulk_w0", "GinUE bulk")]),
        ("edge", vec![("ginue_edge_eta0", "GinUE edge")]),
    ] {
        let mut p = Panel::new(name, "scaled overlap", "pdf").log(true, true);
        p.histogram(&emp, name, "log", "GinOE simulation");
        for (c, t) in curve_list {
            p.curve(&th, c, t);
        }
        panels.push(p);
    }
    Ok(Output { empirical, theory: curves.table, panels })
}

pub fn run(config: &FigureConfig) -> Result<(), CliError> {
    if config.sources.is_empty() {
        return Err(usage(format!("{} has no campaign to draw from", config.figure.name())));
    }
    fs::create_dir_all(&config.out).map_err(|e| io_at(&config.out, e))?;
    let data: Vec<Data> = config.sources.iter().map(|s| load(config.figure, s)).collect::<Result<_, _>>()?;
    let mut out = match config.figure {
        FigureId::Fig3 => fig3(&data, config.window)?,
        FigureId::Fig4 => fig4(&data, config.window, &config.region)?,
        FigureId::Fig5 => fig5(&data, config.window, &config.region)?,
        FigureId::Fig6 => fig6(&data, &config.region)?,
        FigureId::Fig7 => fig7(&data, &config.region)?,
    };
    for s in &config.sources {
        let text = match s {
            Source::Sampled { ensemble, n, samples, seed } => format!("sampled {ensemble} N = {n}, {samples} matrices, seed {seed}"),
            Source::Records { path, ensemble, n } => format!("records {} ({ensemble} N = {n})", path.display()),
        };
        out.empirical.meta("source", text);
    }
    let name = config.figure.name();
    let (emp, th) = files(config.figure);
    out.empirical.write(&config.out.join(&emp))?;
    out.theory.write(&config.out.join(&th))?;
    let gp = config.out.join(format!("{name}.gp"));
    fs::write(&gp, script(name, &out.panels)).map_err(|e| io_at(&gp, e))?;
    eprintln!("{name}: {} empirical rows, {} theory rows in {}", out.empirical.len(), out.theory.len(), config.out.display());
    Ok(())
}
