//! Run configuration, far-field data files and plot-ready CSV output.
//!
//! Floats are written with 17 significant digits so every file round-trips
//! bit-exactly.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::forward::{observation_directions, FarField, PhaselessFarField};
use crate::geometry::{
    builtin_shape, sample_polyline, Boundary, CircleBoundary, ExactShape, ShapeKind, StarCurve,
    Vec2,
};
use crate::inverse::{IterationTrace, Linearization, Penalty, ReconstructionConfig, DEFAULT_MAX_ITERS};
use crate::medium::{ElasticMedium, IncidentWave, ModeFlags, WaveKind};
use num_complex::Complex64;

/// Version tag written into every data file.
pub const FORMAT_VERSION: u32 = 1;

/// Samples per curve in polyline output.
pub const POLYLINE_SAMPLES: usize = 256;

/// Parses an angle such as `1.5`, `pi`, `-pi/2`, `0.7pi`, `5pi/8` or `11*pi/6`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse angle `{text}`"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s.as_str(), None),
    };
    let (sign, num) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, num.strip_prefix('+').unwrap_or(num)),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let den = match den {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None => 1.0,
    };
    let v = sign * value / den;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// An angle in radians that may be written as a number or a `pi` expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an expression like \"5pi/8\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Angle, E> {
                Ok(Angle(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Angle, E> {
                Ok(Angle(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    pub lambda: f64,
    pub mu: f64,
    pub omega: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSection {
    pub kind: WaveKind,
    pub theta: Angle,
}

/// The true obstacle: a built-in shape, or star-curve coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeKind>,
    /// Shift applied to a built-in shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

/// A resolved obstacle.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Exact(ExactShape),
    Curve(StarCurve),
}

impl Obstacle {
    pub fn boundary(&self) -> &dyn Boundary {
        match self {
            Obstacle::Exact(s) => s,
            Obstacle::Curve(c) => c,
        }
    }
}

impl ObstacleSection {
    pub fn resolve(&self) -> Result<Obstacle> {
        match (self.shape, &self.alpha, &self.beta) {
            (Some(kind), None, None) if self.center.is_none() => {
                let offset = self.offset.unwrap_or([0.0, 0.0]);
                Ok(Obstacle::Exact(builtin_shape(kind).translated(Vec2::new(offset[0], offset[1]))))
            }
            (None, Some(alpha), Some(beta)) if self.offset.is_none() => {
                let c = self.center.unwrap_or([0.0, 0.0]);
                let curve = StarCurve::new(Vec2::new(c[0], c[1]), alpha.clone(), beta.clone())
                    .map_err(|e| Error::Config(format!("obstacle: {e}")))?;
                Ok(Obstacle::Curve(curve))
            }
            _ => Err(Error::Config(
                "obstacle: give either `shape` (with optional `offset`) or `center`, `alpha` and `beta`"
                    .into(),
            )),
        }
    }
}

/// Initial guess: a circle (`center`, `radius`) or a full curve (`center`,
/// `alpha`, `beta`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub center: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

impl InitialSection {
    pub fn from_curve(curve: &StarCurve) -> Self {
        Self {
            center: [curve.c1, curve.c2],
            radius: None,
            alpha: Some(curve.alpha.clone()),
            beta: Some(curve.beta.clone()),
        }
    }

    pub fn resolve(&self, order: usize) -> Result<StarCurve> {
        let center = Vec2::new(self.center[0], self.center[1]);
        let wrap = |e: Error| Error::Config(format!("inversion.initial: {e}"));
        match (self.radius, &self.alpha, &self.beta) {
            (Some(r), None, None) => StarCurve::circle(center, r, order).map_err(wrap),
            (None, Some(a), Some(b)) => {
                let curve = StarCurve::new(center, a.clone(), b.clone()).map_err(wrap)?;
                if curve.order() != order {
                    return Err(Error::Config(format!(
                        "inversion.initial: curve has order {}, inversion.order is {order}",
                        curve.order()
                    )));
                }
                Ok(curve)
            }
            _ => Err(Error::Config(
                "inversion.initial: give either `radius` or both `alpha` and `beta`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSection {
    pub center: [f64; 2],
    pub radius: f64,
}

impl BallSection {
    pub fn resolve(&self) -> Result<CircleBoundary> {
        CircleBoundary::new(Vec2::new(self.center[0], self.center[1]), self.radius)
            .map_err(|e| Error::Config(format!("reference_ball: {e}")))
    }
}

fn default_n() -> usize {
    64
}
fn default_n_bar() -> usize {
    32
}
fn default_order() -> usize {
    6
}
fn default_rho() -> f64 {
    0.9
}
fn default_epsilon() -> f64 {
    0.01
}
fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Nyström half-count of the inversion.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Observation half-count.
    #[serde(default = "default_n_bar")]
    pub n_bar: usize,
    /// Nyström half-count for synthetic data; defaults to `2 n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_data: Option<usize>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            n: default_n(),
            n_bar: default_n_bar(),
            n_data: None,
        }
    }
}

impl SolverSection {
    pub fn n_data(&self) -> usize {
        self.n_data.unwrap_or(2 * self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InversionSection {
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    pub mode: ModeFlags,
    #[serde(default)]
    pub penalty: Penalty,
    #[serde(default)]
    pub linearization: Linearization,
    pub initial: InitialSection,
}

/// Everything a command needs, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub medium: MediumSection,
    pub wave: WaveSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<ObstacleSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inversion: Option<InversionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_ball: Option<BallSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parses and validates.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.medium()?;
        if self.solver.n < 4 {
            return Err(Error::Config(format!("solver.n = {} is too small", self.solver.n)));
        }
        if self.solver.n_bar == 0 {
            return Err(Error::Config("solver.n_bar must be positive".into()));
        }
        if self.solver.n_data() < 4 {
            return Err(Error::Config("solver.n_data is too small".into()));
        }
        if !(self.noise.delta >= 0.0) || !self.noise.delta.is_finite() {
            return Err(Error::Config(format!(
                "noise.delta = {} must be nonnegative",
                self.noise.delta
            )));
        }
        if let Some(o) = &self.obstacle {
            o.resolve()?;
        }
        if let Some(b) = &self.reference_ball {
            b.resolve()?;
        }
        if let Some(inv) = &self.inversion {
            self.reconstruction()?
                .validate()
                .map_err(|e| Error::Config(format!("inversion: {e}")))?;
            inv.initial.resolve(inv.order)?;
        }
        Ok(())
    }

    pub fn medium(&self) -> Result<ElasticMedium> {
        ElasticMedium::new(self.medium.lambda, self.medium.mu, self.medium.omega.0)
            .map_err(|e| Error::Config(format!("medium: {e}")))
    }

    pub fn wave(&self) -> IncidentWave {
        IncidentWave::new(self.wave.kind, self.wave.theta.0)
    }

    pub fn obstacle(&self) -> Result<Obstacle> {
        self.obstacle
            .as_ref()
            .ok_or_else(|| Error::Config("missing [obstacle] section".into()))?
            .resolve()
    }

    pub fn reference_ball(&self) -> Result<Option<CircleBoundary>> {
        self.reference_ball.as_ref().map(|b| b.resolve()).transpose()
    }

    fn inversion(&self) -> Result<&InversionSection> {
        self.inversion
            .as_ref()
            .ok_or_else(|| Error::Config("missing [inversion] section".into()))
    }

    pub fn reconstruction(&self) -> Result<ReconstructionConfig> {
        let inv = self.inversion()?;
        Ok(ReconstructionConfig {
            order: inv.order,
            n: self.solver.n,
            rho: inv.rho,
            epsilon: inv.epsilon,
            max_iters: inv.max_iters,
            mode: inv.mode,
            penalty: inv.penalty,
            linearization: inv.linearization,
            reference_ball: self.reference_ball()?,
        })
    }

    pub fn initial_guess(&self) -> Result<StarCurve> {
        let inv = self.inversion()?;
        inv.initial.resolve(inv.order)
    }
}

/// Phased or phaseless records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    Phased,
    Phaseless,
}

impl DataKind {
    fn as_str(self) -> &'static str {
        match self {
            DataKind::Phased => "phased",
            DataKind::Phaseless => "phaseless",
        }
    }
}

/// Metadata stored at the top of a far-field file.
#[derive(Debug, Clone, PartialEq)]
pub struct DataHeader {
    pub kind: DataKind,
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub wave: WaveKind,
    pub theta: f64,
    pub n_bar: usize,
    pub delta: f64,
    pub seed: u64,
    pub reference_ball: Option<CircleBoundary>,
}

impl DataHeader {
    pub fn new(
        kind: DataKind,
        medium: &ElasticMedium,
        wave: &IncidentWave,
        n_bar: usize,
        delta: f64,
        seed: u64,
        reference_ball: Option<CircleBoundary>,
    ) -> Self {
        Self {
            kind,
            lambda: medium.lambda(),
            mu: medium.mu(),
            omega: medium.omega(),
            wave: wave.kind,
            theta: wave.theta(),
            n_bar,
            delta,
            seed,
            reference_ball,
        }
    }

    /// Fails unless the file was produced for the given medium, wave and
    /// observation count.
    pub fn check_against(
        &self,
        kind: DataKind,
        medium: &ElasticMedium,
        wave: &IncidentWave,
        n_bar: usize,
    ) -> Result<()> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let mut problems = Vec::new();
        if self.kind != kind {
            problems.push(format!("file holds {} data, {} expected", self.kind.as_str(), kind.as_str()));
        }
        if !close(self.lambda, medium.lambda()) || !close(self.mu, medium.mu()) {
            problems.push("Lame parameters differ".into());
        }
        if !close(self.omega, medium.omega()) {
            problems.push(format!("omega {} != {}", self.omega, medium.omega()));
        }
        if self.wave != wave.kind || !close(self.theta, wave.theta()) {
            problems.push("incident wave differs".into());
        }
        if self.n_bar != n_bar {
            problems.push(format!("n_bar {} != {}", self.n_bar, n_bar));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::DataFormat(format!("header mismatch: {}", problems.join("; "))))
        }
    }
}

fn wave_name(kind: WaveKind) -> &'static str {
    match kind {
        WaveKind::P => "p",
        WaveKind::S => "s",
    }
}

/// Contents of a far-field file.
#[derive(Debug, Clone, PartialEq)]
pub enum FarFieldData {
    Phased(FarField),
    Phaseless(PhaselessFarField),
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes a far-field file.
pub fn format_far_field(header: &DataHeader, data: &FarFieldData) -> Result<String> {
    let (kind, len) = match data {
        FarFieldData::Phased(f) => (DataKind::Phased, f.len()),
        FarFieldData::Phaseless(f) => (DataKind::Phaseless, f.len()),
    };
    if kind != header.kind || len != 2 * header.n_bar {
        return Err(Error::DataFormat("header does not describe the records".into()));
    }
    let mut s = String::new();
    let _ = writeln!(s, "# elastiscat far-field data");
    let _ = writeln!(s, "# format = {FORMAT_VERSION}");
    let _ = writeln!(s, "# kind = {}", kind.as_str());
    let _ = writeln!(s, "# lambda = {}", fmt_f(header.lambda));
    let _ = writeln!(s, "# mu = {}", fmt_f(header.mu));
    let _ = writeln!(s, "# omega = {}", fmt_f(header.omega));
    let _ = writeln!(s, "# wave = {}", wave_name(header.wave));
    let _ = writeln!(s, "# theta = {}", fmt_f(header.theta));
    let _ = writeln!(s, "# n_bar = {}", header.n_bar);
    let _ = writeln!(s, "# delta = {}", fmt_f(header.delta));
    let _ = writeln!(s, "# seed = {}", header.seed);
    if let Some(b) = &header.reference_ball {
        let _ = writeln!(s, "# ball = {} {} {}", fmt_f(b.b1), fmt_f(b.b2), fmt_f(b.radius));
    }
    match data {
        FarFieldData::Phased(f) => {
            let _ = writeln!(s, "# columns = theta re_phi im_phi re_psi im_psi");
            for l in 0..f.len() {
                let _ = writeln!(
                    s,
                    "{} {} {} {} {}",
                    fmt_f(f.directions[l]),
                    fmt_f(f.phi_inf[l].re),
                    fmt_f(f.phi_inf[l].im),
                    fmt_f(f.psi_inf[l].re),
                    fmt_f(f.psi_inf[l].im)
                );
            }
        }
        FarFieldData::Phaseless(f) => {
            let _ = writeln!(s, "# columns = theta abs_phi_sq abs_psi_sq");
            for l in 0..f.len() {
                let _ = writeln!(
                    s,
                    "{} {} {}",
                    fmt_f(f.directions[l]),
                    fmt_f(f.phi_sq[l]),
                    fmt_f(f.psi_sq[l])
                );
            }
        }
    }
    Ok(s)
}

/// Parses a far-field file written by [`format_far_field`].
pub fn parse_far_field(text: &str) -> Result<(DataHeader, FarFieldData)> {
    let bad = |m: String| Error::DataFormat(m);
    let mut meta = BTreeMap::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("line {}: {e}", no + 1)))?;
        rows.push(row);
    }
    let get = |k: &str| meta.get(k).ok_or_else(|| bad(format!("missing header field `{k}`")));
    let num = |k: &str| -> Result<f64> {
        get(k)?.parse::<f64>().map_err(|e| bad(format!("header field `{k}`: {e}")))
    };
    let version: u32 = get("format")?.parse().map_err(|e| bad(format!("format: {e}")))?;
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }
    let kind = match get("kind")?.as_str() {
        "phased" => DataKind::Phased,
        "phaseless" => DataKind::Phaseless,
        other => return Err(bad(format!("unknown data kind `{other}`"))),
    };
    let wave = match get("wave")?.as_str() {
        "p" => WaveKind::P,
        "s" => WaveKind::S,
        other => return Err(bad(format!("unknown wave `{other}`"))),
    };
    let n_bar: usize = get("n_bar")?.parse().map_err(|e| bad(format!("n_bar: {e}")))?;
    let seed: u64 = get("seed")?.parse().map_err(|e| bad(format!("seed: {e}")))?;
    let reference_ball = match meta.get("ball") {
        None => None,
        Some(v) => {
            let p: Vec<f64> = v
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("ball: {e}")))?;
            if p.len() != 3 {
                return Err(bad("ball: expected center and radius".into()));
            }
            Some(CircleBoundary::new(Vec2::new(p[0], p[1]), p[2])?)
        }
    };
    let header = DataHeader {
        kind,
        lambda: num("lambda")?,
        mu: num("mu")?,
        omega: num("omega")?,
        wave,
        theta: num("theta")?,
        n_bar,
        delta: num("delta")?,
        seed,
        reference_ball,
    };
    if rows.len() != 2 * n_bar {
        return Err(bad(format!("expected {} records, found {}", 2 * n_bar, rows.len())));
    }
    let width = match kind {
        DataKind::Phased => 5,
        DataKind::Phaseless => 3,
    };
    let expected = observation_directions(n_bar);
    for (l, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(bad(format!("record {l} has {} columns, expected {width}", row.len())));
        }
        if (row[0] - expected[l]).abs() > 1e-12 {
            return Err(bad(format!("record {l} is at angle {}, expected {}", row[0], expected[l])));
        }
    }
    let directions: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let data = match kind {
        DataKind::Phased => FarFieldData::Phased(FarField {
            directions,
            phi_inf: rows.iter().map(|r| Complex64::new(r[1], r[2])).collect(),
            psi_inf: rows.iter().map(|r| Complex64::new(r[3], r[4])).collect(),
        }),
        DataKind::Phaseless => FarFieldData::Phaseless(PhaselessFarField {
            directions,
            phi_sq: rows.iter().map(|r| r[1]).collect(),
            psi_sq: rows.iter().map(|r| r[2]).collect(),
        }),
    };
    Ok((header, data))
}

pub fn write_far_field(path: &Path, header: &DataHeader, data: &FarFieldData) -> Result<()> {
    std::fs::write(path, format_far_field(header, data)?)?;
    Ok(())
}

pub fn read_far_field(path: &Path) -> Result<(DataHeader, FarFieldData)> {
    parse_far_field(&std::fs::read_to_string(path)?)
}

/// Trace table: `k, E_k, Err_k, lambda_k, c1, c2, alpha_0.., beta_1..`.
/// `Err_k` is left empty when no exact shape was known.
pub fn format_trace(trace: &IterationTrace) -> String {
    let order = trace.entries.first().map_or(0, |e| e.curve.order());
    let mut s = String::from("k,E_k,Err_k,lambda_k,c1,c2");
    for m in 0..=order {
        let _ = write!(s, ",alpha_{m}");
    }
    for m in 1..=order {
        let _ = write!(s, ",beta_{m}");
    }
    s.push('\n');
    for e in &trace.entries {
        let err = e.err_k.map(fmt_f).unwrap_or_default();
        let _ = write!(s, "{},{},{},{}", e.k, fmt_f(e.e_k), err, fmt_f(e.lambda_k));
        for v in e.curve.coefficients() {
            let _ = write!(s, ",{}", fmt_f(v));
        }
        s.push('\n');
    }
    s
}

/// Labelled polylines `curve,j,x,y` with [`POLYLINE_SAMPLES`] points each.
pub fn format_polylines(curves: &[(&str, &dyn Boundary)]) -> String {
    let mut s = String::from("curve,j,x,y\n");
    for (label, curve) in curves {
        for (j, p) in sample_polyline(*curve, POLYLINE_SAMPLES).iter().enumerate() {
            let _ = writeln!(s, "{label},{j},{},{}", fmt_f(p.x), fmt_f(p.y));
        }
    }
    s
}

/// The final curve as a TOML table usable as `[inversion.initial]`.
pub fn format_curve(curve: &StarCurve) -> Result<String> {
    toml::to_string(&InitialSection::from_curve(curve)).map_err(|e| Error::Config(e.to_string()))
}

pub fn parse_curve(text: &str, order: usize) -> Result<StarCurve> {
    let section: InitialSection = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    section.resolve(order)
}
