//! Sweep experiments behind the command-line interface: declarative
//! configuration, parallel grid evaluation, and deterministic CSV/JSON
//! artifacts with provenance manifests.

use crate::catalog::{build, generator_kind, GeneratorKind, InputStateSpec};
use crate::error::{Error, Result};
use crate::estimation::{
    analytic_delta_phi_pure, fringe, lossy_delta_phi, lossy_delta_phi_exact,
    lossy_delta_phi_small_phi, mixture_delta_phi, phase_point, qcrb, qfi_pure,
    tipping_transmission,
};
use crate::fock::{
    expectation_real, number_op, schwinger, trace_distance, Mode, SchwingerOp, State,
};
use crate::optics::LossSpec;
use crate::subtraction::{
    bucket_subtract, coherent_subtract, mixture_coefficients, HeraldSign,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

/// The experiment families exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    PhaseSweep,
    LossSweep,
    NScaling,
    Table1,
    ProtocolCompare,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PhaseSweep => "phase_sweep",
            Experiment::LossSweep => "loss_sweep",
            Experiment::NScaling => "n_scaling",
            Experiment::Table1 => "table1",
            Experiment::ProtocolCompare => "protocol_compare",
        }
    }
}

/// A one-dimensional grid: an explicit list or a uniform range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { start, stop, points } => {
                if *points < 2 {
                    return Err(Error::InvalidParameter(
                        "grid range needs at least 2 points".into(),
                    ));
                }
                (0..*points)
                    .map(|i| start + (stop - start) * i as f64 / (*points - 1) as f64)
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "grid values must be strictly increasing".into(),
            ));
        }
        Ok(v)
    }
}

fn default_theta() -> f64 {
    0.01
}

/// Subtraction stage applied to the configured input state before the
/// interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SubtractionProtocol {
    #[default]
    None,
    Bucket,
    CoherentPlus,
    CoherentMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubtractionConfig {
    #[serde(default)]
    pub protocol: SubtractionProtocol,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

impl Default for SubtractionConfig {
    fn default() -> Self {
        SubtractionConfig {
            protocol: SubtractionProtocol::None,
            theta: default_theta(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub t1: f64,
    pub t2: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { t1: 1.0, t2: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
}

fn default_table1_n() -> usize {
    8
}

fn default_table1_alpha() -> f64 {
    5.0
}

fn default_table1_r() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Config {
    #[serde(default = "default_table1_n")]
    pub n: usize,
    #[serde(default = "default_table1_alpha")]
    pub alpha: f64,
    #[serde(default = "default_table1_r")]
    pub r: f64,
}

impl Default for Table1Config {
    fn default() -> Self {
        Table1Config {
            n: default_table1_n(),
            alpha: default_table1_alpha(),
            r: default_table1_r(),
        }
    }
}

/// Declarative sweep configuration (TOML on disk).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<InputStateSpec>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub loss: LossConfig,
    #[serde(default)]
    pub subtraction: SubtractionConfig,
    #[serde(default)]
    pub table1: Table1Config,
    /// Reserved for future stochastic features; recorded in the manifest.
    #[serde(default)]
    pub seed: u64,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.subtraction.protocol != SubtractionProtocol::None
            && !(0.0 < self.subtraction.theta && self.subtraction.theta <= 0.1)
        {
            return Err(Error::InvalidParameter(format!(
                "subtraction theta {} outside (0, 0.1]",
                self.subtraction.theta
            )));
        }
        for t in [self.loss.t1, self.loss.t2] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::TransmissionOutOfRange { t });
            }
        }
        if let Some(ts) = &self.grid.t {
            if ts.is_empty() || ts.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidParameter(
                    "t grid must be nonempty and strictly increasing".into(),
                ));
            }
            if ts.iter().any(|t| !(0.0..=1.0).contains(t)) {
                return Err(Error::InvalidParameter(
                    "t grid values must lie in [0, 1]".into(),
                ));
            }
        }
        if let Some(ns) = &self.grid.n {
            if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidParameter(
                    "n grid must be nonempty and strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Output format of the data artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Runtime options supplied by CLI flags.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub strict: bool,
    pub jobs: Option<usize>,
}

/// One table cell; floats are rendered with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) if v.is_finite() => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Value::from(format_float(*v)),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

/// 17 significant digits, locale-independent; non-finite values rendered as
/// `inf`/`-inf`/`nan` tokens.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Where a column's values come from, for the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnSpec {
    pub name: String,
    /// "numeric" (full state-vector/density pipeline), "closed_form"
    /// (published analytic expression), or "config" (input parameter).
    pub provenance: String,
}

fn col(name: &str, provenance: &str) -> ColumnSpec {
    ColumnSpec {
        name: name.to_string(),
        provenance: provenance.to_string(),
    }
}

/// Result table of one experiment run.
#[derive(Debug)]
pub struct ResultTable {
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<Cell>>,
    /// Strict-mode violations: human-readable descriptions.
    pub violations: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    experiment: &'static str,
    version: &'static str,
    config_sha256: String,
    format: &'a str,
    rows: usize,
    seed: u64,
    columns: &'a [ColumnSpec],
    strict_violations: &'a [String],
}

/// Summary of a completed run.
#[derive(Debug)]
pub struct RunReport {
    pub data_path: PathBuf,
    pub manifest_path: PathBuf,
    pub rows: usize,
    pub violations: Vec<String>,
}

fn apply_subtraction(state: &State, sub: &SubtractionConfig) -> Result<(State, Option<f64>)> {
    match sub.protocol {
        SubtractionProtocol::None => Ok((state.clone(), None)),
        SubtractionProtocol::Bucket => {
            let out = bucket_subtract(state, sub.theta)?;
            Ok((out.state, Some(out.herald_probability)))
        }
        SubtractionProtocol::CoherentPlus => {
            let out = coherent_subtract(state, sub.theta, HeraldSign::Plus)?;
            Ok((out.state, Some(out.herald_probability)))
        }
        SubtractionProtocol::CoherentMinus => {
            let out = coherent_subtract(state, sub.theta, HeraldSign::Minus)?;
            Ok((out.state, Some(out.herald_probability)))
        }
    }
}

/// Closed-form phase-error reference for the effective interferometer
/// input, when one of the published expressions applies.
enum AnalyticReference {
    SubtractedTwin { n: usize },
    Mixture(crate::subtraction::MixtureCoefficients),
    None,
}

impl AnalyticReference {
    fn evaluate(&self, phi: f64) -> Option<f64> {
        match self {
            AnalyticReference::SubtractedTwin { n } => {
                analytic_delta_phi_pure(*n, phi).ok()
            }
            AnalyticReference::Mixture(coeffs) => mixture_delta_phi(coeffs, phi).ok(),
            AnalyticReference::None => None,
        }
    }
}

fn analytic_reference(
    spec: &InputStateSpec,
    sub: &SubtractionConfig,
) -> Result<AnalyticReference> {
    match (spec, sub.protocol) {
        (InputStateSpec::SubtractedTwin { n, .. }, SubtractionProtocol::None) => {
            Ok(AnalyticReference::SubtractedTwin { n: *n })
        }
        (
            InputStateSpec::TwinFock { n },
            SubtractionProtocol::CoherentPlus | SubtractionProtocol::CoherentMinus,
        ) => Ok(AnalyticReference::SubtractedTwin { n: *n }),
        (
            InputStateSpec::OpoMixture { .. },
            SubtractionProtocol::CoherentPlus | SubtractionProtocol::CoherentMinus,
        ) => {
            let rho = build(spec)?.to_density();
            Ok(AnalyticReference::Mixture(mixture_coefficients(&rho)?))
        }
        _ => Ok(AnalyticReference::None),
    }
}

const DEFAULT_STATE: InputStateSpec = InputStateSpec::SubtractedTwin {
    n: 10,
    sign: HeraldSign::Plus,
};

fn phase_sweep(config: &SweepConfig) -> Result<ResultTable> {
    let spec = config.state.as_ref().unwrap_or(&DEFAULT_STATE);
    let phis = config
        .grid
        .phi
        .clone()
        .unwrap_or(GridSpec::Range {
            start: -std::f64::consts::FRAC_PI_2,
            stop: std::f64::consts::FRAC_PI_2,
            points: 181,
        })
        .values()?;
    let (state, _) = apply_subtraction(&build(spec)?, &config.subtraction)?;
    let reference = analytic_reference(spec, &config.subtraction)?;

    let points: Vec<Result<(f64, crate::estimation::PhasePoint, Option<f64>)>> =
        maybe_parallel(&phis, |&phi| {
            let p = phase_point(&state, phi)?;
            Ok((phi, p, reference.evaluate(phi)))
        });

    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for point in points {
        let (phi, p, analytic) = point?;
        if let Some(a) = analytic {
            let tol = 1e-9 * a.abs().max(1.0);
            if p.delta_phi.is_finite() && (p.delta_phi - a).abs() > tol {
                violations.push(format!(
                    "phase_sweep phi={phi}: numeric {} vs closed form {}",
                    format_float(p.delta_phi),
                    format_float(a)
                ));
            }
        }
        rows.push(vec![
            Cell::Float(phi),
            Cell::Float(p.mean_jz),
            Cell::Float(p.var_jz),
            Cell::Float(p.delta_phi),
            match analytic {
                Some(a) => Cell::Float(a),
                None => Cell::Text(String::new()),
            },
        ]);
    }
    Ok(ResultTable {
        columns: vec![
            col("phi", "config"),
            col("mean_jz", "numeric"),
            col("var_jz", "numeric"),
            col("delta_phi_numeric", "numeric"),
            col("delta_phi_analytic", "closed_form"),
        ],
        rows,
        violations,
    })
}

fn loss_sweep(config: &SweepConfig) -> Result<ResultTable> {
    let n = match (&config.state, &config.grid.n) {
        (Some(InputStateSpec::SubtractedTwin { n, .. }), _)
        | (Some(InputStateSpec::TwinFock { n }), _) => *n,
        (None, Some(ns)) if ns.len() == 1 => ns[0],
        (None, None) => 10,
        _ => {
            return Err(Error::InvalidParameter(
                "loss_sweep needs state = subtracted_twin/twin_fock or a single-entry n grid"
                    .into(),
            ))
        }
    };
    let ts = config
        .grid
        .t
        .clone()
        .unwrap_or_else(|| vec![0.7, 0.9, 0.95, 0.99, 1.0]);
    let tip = tipping_transmission(n)?;

    let rows_res: Vec<Result<Vec<Cell>>> = maybe_parallel(&ts, |&t| {
        let loss = LossSpec::symmetric(t)?;
        let closed = lossy_delta_phi(n, &loss, 0.0)?;
        let exact = lossy_delta_phi_exact(n, &loss, 0.0)?;
        let approx = lossy_delta_phi_small_phi(n, t)?;
        let hl = 1.0 / (t * n as f64);
        Ok(vec![
            Cell::Float(t),
            Cell::Float(closed),
            Cell::Float(exact),
            Cell::Float(approx),
            Cell::Float(hl),
            Cell::Int(i64::from(t < tip)),
        ])
    });
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for r in rows_res {
        let cells = r?;
        if let (Cell::Float(t), Cell::Float(closed), Cell::Float(hl), Cell::Float(approx)) =
            (&cells[0], &cells[1], &cells[4], &cells[3])
        {
            if *closed < *hl - 1e-12 || *closed > *approx + 1e-12 {
                violations.push(format!(
                    "loss_sweep t={t}: closed form {closed} outside [{hl}, {approx}]"
                ));
            }
        }
        rows.push(cells);
    }
    Ok(ResultTable {
        columns: vec![
            col("t", "config"),
            col("delta_phi_closed_form", "closed_form"),
            col("delta_phi_exact", "numeric"),
            col("delta_phi_approx", "closed_form"),
            col("delta_phi_heisenberg", "closed_form"),
            col("below_tipping", "closed_form"),
        ],
        rows,
        violations,
    })
}

fn n_scaling(config: &SweepConfig) -> Result<ResultTable> {
    let ns = config
        .grid
        .n
        .clone()
        .unwrap_or_else(|| (2..=20).collect());
    let theta = config.subtraction.theta;
    let sign = match config.subtraction.protocol {
        SubtractionProtocol::CoherentMinus => HeraldSign::Minus,
        _ => HeraldSign::Plus,
    };

    let rows_res: Vec<Result<Vec<Cell>>> = maybe_parallel(&ns, |&n| {
        let twin = build(&InputStateSpec::TwinFock { n })?;
        let out = coherent_subtract(&twin, theta, sign)?;
        let numeric = crate::estimation::phase_error_numeric(&out.state, 0.0)?;
        let analytic = analytic_delta_phi_pure(n, 0.0)?;
        Ok(vec![
            Cell::Int(n as i64),
            Cell::Float(out.herald_probability),
            Cell::Float(numeric),
            Cell::Float(analytic),
            Cell::Float(n as f64 * numeric),
        ])
    });
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for r in rows_res {
        let cells = r?;
        if let (Cell::Int(n), Cell::Float(prod)) = (&cells[0], &cells[4]) {
            if (prod - 1.0).abs() > 1e-9 {
                violations.push(format!("n_scaling n={n}: n*delta_phi = {prod}"));
            }
        }
        rows.push(cells);
    }
    Ok(ResultTable {
        columns: vec![
            col("n", "config"),
            col("herald_probability", "numeric"),
            col("delta_phi_numeric", "numeric"),
            col("delta_phi_analytic", "closed_form"),
            col("n_times_delta_phi", "numeric"),
        ],
        rows,
        violations,
    })
}

fn fringe_amplitude(state: &State) -> Result<f64> {
    let cutoff = state.cutoff();
    let jx = expectation_real(state, &schwinger(SchwingerOp::Jx, cutoff))?;
    let jz = expectation_real(state, &schwinger(SchwingerOp::Jz, cutoff))?;
    // amplitude of <Na - Nb> = 2 <Jz_out> over phi
    Ok(2.0 * (jx * jx + jz * jz).sqrt())
}

fn table1(config: &SweepConfig) -> Result<ResultTable> {
    let p = config.table1;
    let specs: Vec<InputStateSpec> = vec![
        InputStateSpec::FockVacuum { n: p.n },
        InputStateSpec::CoherentVacuum { alpha: p.alpha },
        InputStateSpec::CoherentSqueezed {
            alpha: p.alpha,
            r: p.r,
        },
        InputStateSpec::TwinFock { n: p.n },
        InputStateSpec::FraternalTwin { n: p.n },
        InputStateSpec::Noon { n: p.n },
        InputStateSpec::Ymck { n: p.n },
        InputStateSpec::SubtractedTwin {
            n: p.n,
            sign: HeraldSign::Plus,
        },
    ];
    let rows_res: Vec<Result<(Vec<Cell>, Option<String>)>> =
        maybe_parallel(&specs.iter().enumerate().collect::<Vec<_>>(), |&(i, spec)| {
            let desc = crate::catalog::describe(spec)?;
            let state = build(spec)?;
            let generator = match generator_kind(spec) {
                GeneratorKind::Jy => schwinger(SchwingerOp::Jy, state.cutoff()),
                GeneratorKind::NumberA => number_op(Mode::A, state.cutoff()),
            };
            let q = qfi_pure(&state, &generator)?;
            let measured = qcrb(q);
            let reference = desc.reference_delta_phi;
            let rel_err = reference.map(|r| (measured - r).abs() / r);
            let violation = match rel_err {
                Some(e) if e > 1e-9 => Some(format!(
                    "table1 row {}: measured qcrb {} vs reference {} (rel err {:.3e})",
                    i + 1,
                    format_float(measured),
                    format_float(reference.unwrap()),
                    e
                )),
                _ => None,
            };
            let cells = vec![
                Cell::Int(i as i64 + 1),
                Cell::Text(desc.label.clone()),
                Cell::Float(desc.mean_total_photons),
                Cell::Float(desc.purity),
                Cell::Float(q),
                Cell::Float(measured),
                match reference {
                    Some(r) => Cell::Float(r),
                    None => Cell::Text(String::new()),
                },
                Cell::Text(desc.reference_delta_phi_formula.clone()),
                match rel_err {
                    Some(e) => Cell::Float(e),
                    None => Cell::Text(String::new()),
                },
                Cell::Float(fringe_amplitude(&state)?),
                Cell::Text(desc.reference_fringe_formula.clone()),
            ];
            Ok((cells, violation))
        });
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for r in rows_res {
        let (cells, violation) = r?;
        if let Some(v) = violation {
            violations.push(v);
        }
        rows.push(cells);
    }
    Ok(ResultTable {
        columns: vec![
            col("row", "config"),
            col("state", "config"),
            col("mean_total_photons", "numeric"),
            col("purity", "numeric"),
            col("qfi", "numeric"),
            col("qcrb_measured", "numeric"),
            col("delta_phi_reference", "closed_form"),
            col("delta_phi_reference_formula", "closed_form"),
            col("relative_error", "numeric"),
            col("fringe_amplitude", "numeric"),
            col("fringe_reference_formula", "closed_form"),
        ],
        rows,
        violations,
    })
}

fn protocol_compare(config: &SweepConfig) -> Result<ResultTable> {
    let ns = config.grid.n.clone().unwrap_or_else(|| (2..=10).collect());
    let theta = config.subtraction.theta;

    let rows_res: Vec<Result<(Vec<Vec<Cell>>, Option<String>)>> = maybe_parallel(&ns, |&n| {
        let twin = build(&InputStateSpec::TwinFock { n })?;
        let bucket = bucket_subtract(&twin, theta)?;
        let plus = coherent_subtract(&twin, theta, HeraldSign::Plus)?;
        let minus = coherent_subtract(&twin, theta, HeraldSign::Minus)?;

        // probability-weighted coherent mixture must reproduce the bucket
        let p_tot = plus.herald_probability + minus.herald_probability;
        let mix = plus
            .state
            .to_density()
            .matrix()
            .scale(Complex64::new(plus.herald_probability / p_tot, 0.0))
            .add(
                &minus
                    .state
                    .to_density()
                    .matrix()
                    .scale(Complex64::new(minus.herald_probability / p_tot, 0.0)),
            );
        let mix = crate::fock::TwoModeDensity::from_matrix(twin.cutoff(), mix);
        let dist = trace_distance(&mix, &bucket.state.to_density())?;
        let violation = if dist > 1e-9 {
            Some(format!(
                "protocol_compare n={n}: coherent mixture vs bucket trace distance {dist:.3e}"
            ))
        } else {
            None
        };

        let phi_probe = 0.5;
        let mut rows = Vec::new();
        for (label, outcome) in [
            ("bucket", &bucket),
            ("coherent_plus", &plus),
            ("coherent_minus", &minus),
        ] {
            let p = phase_point(&outcome.state, 0.0)?;
            rows.push(vec![
                Cell::Int(n as i64),
                Cell::Text(label.to_string()),
                Cell::Float(outcome.herald_probability),
                Cell::Float(outcome.state.purity()),
                Cell::Float(fringe(&outcome.state, phi_probe)?),
                Cell::Float(p.delta_phi),
                Cell::Float(dist),
            ]);
        }
        Ok((rows, violation))
    });
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for r in rows_res {
        let (cells, violation) = r?;
        if let Some(v) = violation {
            violations.push(v);
        }
        rows.extend(cells);
    }
    Ok(ResultTable {
        columns: vec![
            col("n", "config"),
            col("protocol", "config"),
            col("herald_probability", "numeric"),
            col("purity", "numeric"),
            col("fringe_phi_0.5", "numeric"),
            col("delta_phi_at_zero", "numeric"),
            col("mixture_vs_bucket_trace_distance", "numeric"),
        ],
        rows,
        violations,
    })
}

/// Evaluates `f` over `items`, in parallel when a rayon pool is active.
/// Results keep the input order, so output artifacts are deterministic.
fn maybe_parallel<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Runs the configured experiment and writes the data artifact plus a
/// provenance manifest into `options.out_dir`.
pub fn run(config: &SweepConfig, options: &RunOptions) -> Result<RunReport> {
    config.validate()?;
    let table = match options.jobs {
        Some(jobs) if jobs > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| dispatch(config)),
        _ => dispatch(config),
    }?;

    std::fs::create_dir_all(&options.out_dir)
        .map_err(|e| Error::InvalidParameter(format!("cannot create output dir: {e}")))?;
    let stem = config.experiment.name();
    let (data_path, contents) = match options.format {
        OutputFormat::Csv => (
            options.out_dir.join(format!("{stem}.csv")),
            render_csv(&table),
        ),
        OutputFormat::Json => (
            options.out_dir.join(format!("{stem}.json")),
            render_json(&table)?,
        ),
    };
    write_file(&data_path, &contents)?;

    let config_toml = toml::to_string(config)
        .map_err(|e| Error::InvalidParameter(format!("config serialization: {e}")))?;
    let manifest = Manifest {
        schema: "twinsub-manifest v1",
        experiment: config.experiment.name(),
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: hex_digest(&config_toml),
        format: match options.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        },
        rows: table.rows.len(),
        seed: config.seed,
        columns: &table.columns,
        strict_violations: &table.violations,
    };
    let manifest_path = options.out_dir.join(format!("{stem}.manifest.json"));
    let manifest_text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::InvalidParameter(format!("manifest serialization: {e}")))?;
    write_file(&manifest_path, &manifest_text)?;

    Ok(RunReport {
        data_path,
        manifest_path,
        rows: table.rows.len(),
        violations: table.violations,
    })
}

fn dispatch(config: &SweepConfig) -> Result<ResultTable> {
    match config.experiment {
        Experiment::PhaseSweep => phase_sweep(config),
        Experiment::LossSweep => loss_sweep(config),
        Experiment::NScaling => n_scaling(config),
        Experiment::Table1 => table1(config),
        Experiment::ProtocolCompare => protocol_compare(config),
    }
}

fn render_csv(table: &ResultTable) -> String {
    let mut out = String::from("# twinsub-csv v1\n");
    out.push_str(
        &table
            .columns
            .iter()
            .map(|c| c.name.clone())
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn render_json(table: &ResultTable) -> Result<String> {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            serde_json::Value::Array(row.iter().map(Cell::json).collect())
        })
        .collect();
    let doc = serde_json::json!({
        "schema": "twinsub-json v1",
        "columns": table.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::InvalidParameter(format!("json serialization: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

fn hex_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(experiment: Experiment) -> SweepConfig {
        SweepConfig {
            experiment,
            state: None,
            grid: GridConfig::default(),
            loss: LossConfig::default(),
            subtraction: SubtractionConfig::default(),
            table1: Table1Config::default(),
            seed: 0,
        }
    }

    fn options(dir: &Path) -> RunOptions {
        RunOptions {
            out_dir: dir.to_path_buf(),
            format: OutputFormat::Csv,
            strict: true,
            jobs: Some(2),
        }
    }

    #[test]
    fn grid_spec_values() {
        let g = GridSpec::Range {
            start: 0.0,
            stop: 1.0,
            points: 5,
        };
        assert_eq!(g.values().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(GridSpec::List(vec![0.3, 0.2]).values().is_err());
        assert!(GridSpec::List(vec![]).values().is_err());
    }

    #[test]
    fn config_parses_from_toml() {
        let cfg = SweepConfig::from_toml(
            r#"
experiment = "phase_sweep"

[state]
kind = "subtracted_twin"
n = 10
sign = "plus"

[grid]
phi = { start = -0.5, stop = 0.5, points = 11 }
"#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::PhaseSweep);
        assert!(matches!(
            cfg.state,
            Some(InputStateSpec::SubtractedTwin { n: 10, .. })
        ));
    }

    #[test]
    fn config_rejects_bad_theta() {
        let err = SweepConfig::from_toml(
            r#"
experiment = "n_scaling"

[subtraction]
protocol = "coherent_plus"
theta = 0.5
"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn phase_sweep_hits_heisenberg_minimum() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = base_config(Experiment::PhaseSweep);
        cfg.state = Some(InputStateSpec::SubtractedTwin {
            n: 10,
            sign: HeraldSign::Plus,
        });
        cfg.grid.phi = Some(GridSpec::Range {
            start: -std::f64::consts::FRAC_PI_2,
            stop: std::f64::consts::FRAC_PI_2,
            points: 181,
        });
        let report = run(&cfg, &options(dir.path())).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        let text = std::fs::read_to_string(&report.data_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# twinsub-csv v1");
        assert_eq!(
            lines.next().unwrap(),
            "phi,mean_jz,var_jz,delta_phi_numeric,delta_phi_analytic"
        );
        // the phi = 0 row (grid midpoint) must read delta_phi = 1/10
        let row: Vec<&str> = text.lines().nth(2 + 90).unwrap().split(',').collect();
        let phi: f64 = row[0].parse().unwrap();
        let dp: f64 = row[3].parse().unwrap();
        assert!(phi.abs() < 1e-12);
        assert!((dp - 0.1).abs() < 1e-9, "dp = {dp}");
    }

    #[test]
    fn determinism_byte_identical() {
        let mut cfg = base_config(Experiment::NScaling);
        cfg.grid.n = Some(vec![2, 3, 4, 5]);
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let mut o1 = options(d1.path());
        o1.jobs = Some(1);
        let mut o2 = options(d2.path());
        o2.jobs = Some(3);
        let r1 = run(&cfg, &o1).unwrap();
        let r2 = run(&cfg, &o2).unwrap();
        let t1 = std::fs::read_to_string(&r1.data_path).unwrap();
        let t2 = std::fs::read_to_string(&r2.data_path).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn loss_sweep_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = base_config(Experiment::LossSweep);
        cfg.state = Some(InputStateSpec::SubtractedTwin {
            n: 10,
            sign: HeraldSign::Plus,
        });
        cfg.grid.t = Some(vec![0.7, 0.9, 0.99, 1.0]);
        let report = run(&cfg, &options(dir.path())).unwrap();
        assert_eq!(report.rows, 4);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        let text = std::fs::read_to_string(&report.data_path).unwrap();
        // at t = 1 the closed form reads exactly 1/n
        let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
        let dp: f64 = last[1].parse().unwrap();
        assert!((dp - 0.1).abs() < 1e-12);
        assert_eq!(last[5], "0"); // t = 1 is above the tipping transmission
    }

    #[test]
    fn table1_json_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = base_config(Experiment::Table1);
        let mut opts = options(dir.path());
        opts.format = OutputFormat::Json;
        let report = run(&cfg, &opts).unwrap();
        assert_eq!(report.rows, 8);
        let text = std::fs::read_to_string(&report.data_path).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["schema"], "twinsub-json v1");
        assert_eq!(doc["rows"].as_array().unwrap().len(), 8);
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report.manifest_path).unwrap())
                .unwrap();
        assert_eq!(manifest["schema"], "twinsub-manifest v1");
        assert_eq!(manifest["rows"], 8);
        assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn protocol_compare_consistency() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = base_config(Experiment::ProtocolCompare);
        cfg.grid.n = Some(vec![2, 5]);
        cfg.subtraction.theta = 0.05;
        let report = run(&cfg, &options(dir.path())).unwrap();
        assert_eq!(report.rows, 6);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn n_scaling_strict_passes() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = base_config(Experiment::NScaling);
        cfg.grid.n = Some((2..=12).collect());
        let report = run(&cfg, &options(dir.path())).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }
}
