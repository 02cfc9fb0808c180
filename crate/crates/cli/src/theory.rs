use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ginibre_core::distributions::{jpdf_ginue_finite, normalized_pdf, LimitingJpdf};
use ginibre_core::theory::{
    conditional_mean, conditional_mean_limit, density, overlap, overlap_limit_bulk, overlap_limit_depletion,
    overlap_limit_edge, ComplexPoint, RegimeCoordinates,
};
use ginibre_core::{EnsembleKind, Regime};
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError};
use crate::output::{num, Table};
use crate::parse_ensemble;

/// Theory curve families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    /// O_N(z) along the ray at `--angle`, abscissa |z|.
    Overlap,
    /// ρ_N(z) along the ray, abscissa |z|.
    Density,
    /// E(O_nn | z) = O_N/ρ_N along the ray, abscissa |z|.
    ConditionalMean,
    /// Bulk limit of O_N/N at √N w, abscissa |w| along the ray.
    BulkLimit,
    /// Edge limit of O_N/√N, abscissa η.
    EdgeLimit,
    /// Edge limit of E(O_nn | z)/√N, abscissa η.
    EdgeConditional,
    /// Depletion limit of O_N/N next to the origin, abscissa ξ (GinOE).
    DepletionLimit,
    /// Depletion limit of E(O_nn | z)/N next to the origin, abscissa ξ (GinOE).
    DepletionConditional,
    /// Limiting pdf of s = (O−1)/N, GinUE bulk at |w| = `--at` on the ray.
    BulkPdf,
    /// Limiting pdf of σ = (O−1)/√N, GinUE edge at η = `--at`.
    EdgePdf,
    /// Limiting pdf of s for real GinOE eigenvalues at x = `--at`.
    RealBulkPdf,
    /// Finite-N joint density P_N(O, z) of the GinUE, abscissa O, |z| = `--at` on the ray.
    FiniteJpdf,
}

impl Curve {
    /// Column name of the abscissa.
    fn abscissa(self) -> &'static str {
        match self {
            Curve::Overlap | Curve::Density | Curve::ConditionalMean => "r",
            Curve::BulkLimit => "w",
            Curve::EdgeLimit | Curve::EdgeConditional => "eta",
            Curve::DepletionLimit | Curve::DepletionConditional => "xi",
            Curve::BulkPdf | Curve::RealBulkPdf => "s",
            Curve::EdgePdf => "sigma",
            Curve::FiniteJpdf => "o",
        }
    }

    /// Which formula is tabulated.
    pub fn formula(self, kind: EnsembleKind) -> String {
        let e = kind.name();
        match self {
            Curve::Overlap => format!("finite-N mean diagonal overlap O_N(z), {e}"),
            Curve::Density => format!("finite-N mean density of complex eigenvalues rho_N(z), {e}"),
            Curve::ConditionalMean => format!("finite-N conditional mean E(O_nn|z) = O_N(z)/rho_N(z), {e}"),
            Curve::BulkLimit => "bulk limit O_N(sqrt(N) w)/N -> (1/pi)(1-|w|^2) for |w|<1, 0 outside".into(),
            Curve::EdgeLimit => "edge limit O_N/sqrt(N) -> (1/pi)(exp(-2 eta^2)/sqrt(2 pi) - eta erfc(sqrt(2) eta))".into(),
            Curve::EdgeConditional => "edge limit of E(O_nn|z)/sqrt(N): overlap edge limit over erfc(sqrt(2) eta)/(2 pi)".into(),
            Curve::DepletionLimit => {
                "GinOE depletion limit at the origin O_N/N -> (1/pi)(1 + sqrt(pi/2) erfcx(sqrt(2)|xi|)/(2|xi|))".into()
            }
            Curve::DepletionConditional => {
                "GinOE depletion limit of E(O_nn|z)/N: depletion overlap over sqrt(2/pi)|xi| erfcx(sqrt(2)|xi|)".into()
            }
            Curve::BulkPdf => "GinUE bulk pdf of s=(O-1)/N given z: (1-|w|^2)^2 s^-3 exp(-(1-|w|^2)/s)".into(),
            Curve::EdgePdf => "GinUE edge pdf of sigma=(O-1)/sqrt(N) given eta: edge joint density over erfc(sqrt(2) eta)/(2 pi)".into(),
            Curve::RealBulkPdf => "GinOE real-eigenvalue bulk pdf of s given x: ((1-x^2)/2) s^-2 exp(-(1-x^2)/(2s))".into(),
            Curve::FiniteJpdf => "finite-N GinUE joint density P_N(O, z) of an eigenvalue and its self-overlap".into(),
        }
    }
}

/// Tabulate a closed form or limit over a grid.
#[derive(Args, Debug)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub curve: Curve,
    #[arg(long, value_parser = parse_ensemble, default_value = "ginoe")]
    pub ensemble: EnsembleKind,
    /// Matrix size for the finite-N curves.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// First abscissa.
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    /// Last abscissa.
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Direction of the ray z = r e^{i angle}, in radians (default: imaginary axis).
    #[arg(long, default_value_t = FRAC_PI_2, allow_hyphen_values = true)]
    pub angle: f64,
    /// Fixed secondary coordinate of the pdf curves (|w|, η, x or |z|).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub at: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryConfig {
    pub curve: Curve,
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub angle: f64,
    pub at: f64,
    pub out: PathBuf,
}

impl TheoryArgs {
    pub fn resolve(self) -> Result<TheoryConfig, CliError> {
        let c = TheoryConfig {
            curve: self.curve,
            ensemble: self.ensemble,
            n: self.n,
            from: self.from,
            to: self.to,
            points: self.points,
            angle: self.angle,
            at: self.at,
            out: self.out,
        };
        if c.points == 0 || !(c.from.is_finite() && c.to.is_finite() && c.angle.is_finite() && c.at.is_finite()) {
            return Err(usage("the grid needs finite bounds and at least one point"));
        }
        match (c.curve, c.ensemble) {
            (Curve::DepletionLimit | Curve::DepletionConditional | Curve::RealBulkPdf, EnsembleKind::GinUE) => {
                Err(usage(format!("curve {} exists only for the GinOE", c.curve.to_possible_value().expect("curve name").get_name())))
            }
            (Curve::FiniteJpdf, EnsembleKind::GinOE) => Err(usage("the finite-N joint density is a GinUE result")),
            _ => Ok(c),
        }
    }
}

pub fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![from];
    }
    (0..points).map(|k| from + (to - from) * k as f64 / (points - 1) as f64).collect()
}

/// Value of `curve` at abscissa `v`.
pub fn evaluate(c: &TheoryConfig, v: f64) -> Result<f64, String> {
    let ray = |r: f64| ComplexPoint::from_polar(r, c.angle);
    let kind = c.ensemble;
    let n = c.n;
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match c.curve {
        Curve::Overlap => overlap(kind, n, ray(v)).map_err(|e| err(&e)),
        Curve::Density => density(kind, n, ray(v)).map_err(|e| err(&e)),
        Curve::ConditionalMean => conditional_mean(n, ray(v), kind).map_err(|e| err(&e)),
        Curve::BulkLimit => Ok(overlap_limit_bulk(ray(v))),
        Curve::EdgeLimit => Ok(overlap_limit_edge(v)),
        Curve::EdgeConditional => {
            conditional_mean_limit(Regime::Edge, RegimeCoordinates::edge(v, 0.0), kind).map_err(|e| err(&e))
        }
        Curve::DepletionLimit => overlap_limit_depletion(v, None).map_err(|e| err(&e)),
        Curve::DepletionConditional => {
            conditional_mean_limit(Regime::Depletion, RegimeCoordinates::depletion(v, 0.0), kind).map_err(|e| err(&e))
        }
        Curve::BulkPdf => normalized_pdf(LimitingJpdf::BulkGinue { w: ray(c.at) }, v).map_err(|e| err(&e)),
        Curve::EdgePdf => normalized_pdf(LimitingJpdf::EdgeGinue { eta: c.at }, v).map_err(|e| err(&e)),
        Curve::RealBulkPdf => normalized_pdf(LimitingJpdf::RealBulkGinoe { x: c.at }, v).map_err(|e| err(&e)),
        Curve::FiniteJpdf => jpdf_ginue_finite(n, v, ray(c.at)).map_err(|e| err(&e)),
    }
}

pub fn table(c: &TheoryConfig) -> Result<Table, CliError> {
    let mut t = Table::new(&[c.curve.abscissa(), "value"]);
    t.meta("formula", c.curve.formula(c.ensemble))
        .meta("curve", c.curve.to_possible_value().expect("curve name").get_name())
        .meta("ensemble", c.ensemble)
        .meta("n", c.n)
        .meta("angle", num(c.angle))
        .meta("at", num(c.at));
    for v in grid(c.from, c.to, c.points) {
        let y = evaluate(c, v).map_err(|e| usage(format!("{} = {}: {e}", c.curve.abscissa(), num(v))))?;
        t.push(vec![num(v), num(y)]);
    }
    Ok(t)
}

pub fn run(c: &TheoryConfig) -> Result<(), CliError> {
    table(c)?.write(&c.out)
}
