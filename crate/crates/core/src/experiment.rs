//! Experiment configuration, dispatch, and JSON reports.
//!
//! A report is a pure function of its configuration and the crate version:
//! the seed is always echoed, nothing time-dependent is included unless
//! timing is requested, and every float is written with 17 significant
//! digits so that it round-trips.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{parse_circuit, Circuit};
use crate::depol::{self, Fidelity};
use crate::discrimination::{self, density_from_pure};
use crate::error::{Error, Result};
use crate::random::{random_state, stream_rng};
use crate::statevector::{self, outcome_label, Distribution, QubitCap};
use crate::supremacy::{self, EtaPolicy, MAX_ENUMERATED_STEPS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Widest distribution written out entry by entry.
pub const MAX_LISTED_WIDTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Simulate,
    Depolarize,
    Certify,
    Thm1,
    SbpGap,
    Discriminate,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::Depolarize => "depolarize",
            Subcommand::Certify => "certify",
            Subcommand::Thm1 => "thm1",
            Subcommand::SbpGap => "sbp-gap",
            Subcommand::Discriminate => "discriminate",
        }
    }

    fn needs_circuit(self) -> bool {
        matches!(
            self,
            Subcommand::Simulate | Subcommand::Depolarize | Subcommand::Certify | Subcommand::Thm1
        )
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    pub circuit_path: Option<PathBuf>,
    pub fidelity_grid: Vec<f64>,
    pub seed: u64,
    pub samples: u64,
    /// Copies for `discriminate`.
    pub k: usize,
    /// Threshold exponent for `sbp-gap`.
    pub r: u32,
    /// Main-register width for `sbp-gap`; random-state width for `discriminate`.
    pub w: u32,
    pub m: u32,
    pub epsilon: f64,
    pub out_path: Option<PathBuf>,
    pub max_qubits: QubitCap,
    /// Adds `wall_time_ms` to the report, which makes it run-dependent.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        ExperimentConfig {
            subcommand,
            circuit_path: None,
            fidelity_grid: vec![0.5],
            seed: 0,
            samples: 1000,
            k: 1,
            r: 3,
            w: 1,
            m: 4,
            epsilon: 0.5,
            out_path: None,
            max_qubits: QubitCap::default(),
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fidelity_grid.is_empty() {
            return Err(Error::Config("fidelity grid is empty".into()));
        }
        if let Some(&f) = self.fidelity_grid.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::InvalidFidelity(f));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.subcommand.needs_circuit() && self.circuit_path.is_none() {
            return Err(Error::Config(format!("{} requires --circuit", self.subcommand)));
        }
        if self.subcommand == Subcommand::Discriminate && self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Process exit status for each outcome class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Success = 0,
    CheckFailed = 1,
    Usage = 2,
    Io = 3,
    CapExceeded = 4,
}

impl ExitCode {
    pub fn for_error(e: &Error) -> ExitCode {
        match e {
            Error::Io { .. } => ExitCode::Io,
            Error::WidthCap { .. } | Error::EnumerationCap { .. } => ExitCode::CapExceeded,
            _ => ExitCode::Usage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub passed: bool,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn exit_code(&self) -> ExitCode {
        if self.passed {
            ExitCode::Success
        } else {
            ExitCode::CheckFailed
        }
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitsFormatter::default());
        self.serialize(&mut ser).expect("report serializes");
        buf.push(b'\n');
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// Writes to `out_path`, or stdout when none is configured.
    pub fn emit(&self) -> Result<()> {
        let text = self.to_json();
        match &self.config.out_path {
            Some(p) => std::fs::write(p, text).map_err(|e| io_error(p, e)),
            None => {
                use io::Write;
                io::stdout().write_all(text.as_bytes()).map_err(|e| io_error(Path::new("<stdout>"), e))
            }
        }
    }
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Pretty JSON with floats as `{:.16e}`.
#[derive(Default)]
struct SigDigitsFormatter<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl serde_json::ser::Formatter for SigDigitsFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Runs the configured subcommand and assembles its report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let (passed, result) = match config.subcommand {
        Subcommand::Simulate => simulate(config)?,
        Subcommand::Depolarize => depolarize(config)?,
        Subcommand::Certify => certify(config)?,
        Subcommand::Thm1 => thm1(config)?,
        Subcommand::SbpGap => sbp_gap(config)?,
        Subcommand::Discriminate => discriminate(config)?,
    };
    Ok(Report {
        tool: "depolab",
        version: VERSION,
        config: config.clone(),
        passed,
        result,
        wall_time_ms: config.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

fn load_circuit(config: &ExperimentConfig) -> Result<Circuit> {
    let path = config
        .circuit_path
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} requires --circuit", config.subcommand)))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(parse_circuit(&text)?)
}

fn fidelities(config: &ExperimentConfig) -> Result<Vec<Fidelity>> {
    config.fidelity_grid.iter().map(|&f| Fidelity::new(f)).collect()
}

/// Per-grid-point sampling seed, derived from the configured seed.
fn grid_seed(seed: u64, index: usize) -> u64 {
    stream_rng(seed, index as u64 + 1).gen()
}

fn distribution_json(d: &Distribution) -> Value {
    if d.width() > MAX_LISTED_WIDTH {
        return Value::Null;
    }
    let entries: serde_json::Map<String, Value> = d
        .probs()
        .iter()
        .enumerate()
        .map(|(z, &p)| (outcome_label(z, d.width()), json!(p)))
        .collect();
    Value::Object(entries)
}

fn tally_json(t: &depol::Tally) -> Value {
    let entries: serde_json::Map<String, Value> =
        t.iter().map(|(z, c)| (outcome_label(z, t.width()), json!(c))).collect();
    json!({ "total": t.total(), "counts": entries })
}

fn sampled(dist: &Distribution, seed: u64, samples: u64) -> Result<Value> {
    let tally = depol::sample(dist, seed, samples);
    let tv = depol::empirical_tv(&tally, dist)?;
    Ok(json!({ "seed": seed, "tally": tally_json(&tally), "empirical_tv": tv }))
}

fn simulate(config: &ExperimentConfig) -> Result<(bool, Value)> {
    let circuit = load_circuit(config)?;
    let state = statevector::run_with_cap(&circuit, config.max_qubits)?;
    let dist = Distribution::from_state(&state);
    let a = state.amplitude(0);
    Ok((
        true,
        json!({
            "width": circuit.width(),
            "gate_count": circuit.gate_count(),
            "norm_sqr": state.norm_sqr(),
            "zero_overlap": { "re": a.re, "im": a.im },
            "acceptance": a.norm_sqr(),
            "distribution": distribution_json(&dist),
            "sampling": sampled(&dist, config.seed, config.samples)?,
        }),
    ))
}

fn depolarize(config: &ExperimentConfig) -> Result<(bool, Value)> {
    let circuit = load_circuit(config)?;
    let ideal = statevector::output_distribution_with_cap(&circuit, config.max_qubits)?;
    let grid = fidelities(config)?
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let noisy = depol::depolarize(&ideal, f);
            Ok(json!({
                "fidelity": f.value(),
                "distribution": distribution_json(&noisy),
                "sampling": sampled(&noisy, grid_seed(config.seed, i), config.samples)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        true,
        json!({ "width": circuit.width(), "gate_count": circuit.gate_count(), "grid": grid }),
    ))
}

fn certify(config: &ExperimentConfig) -> Result<(bool, Value)> {
    let circuit = load_circuit(config)?;
    let ideal = statevector::output_distribution_with_cap(&circuit, config.max_qubits)?;
    let mut passed = true;
    let mut grid = Vec::new();
    for f in fidelities(config)? {
        let additive = depol::additive_certificate(&ideal, f);
        passed &= additive.passed;
        let multiplicative = if f.value() <= 0.5 {
            let r = depol::multiplicative_certificate(&ideal, f)?;
            passed &= r.passed;
            serde_json::to_value(r).expect("serializable")
        } else {
            json!({ "skipped": "requires F <= 1/2" })
        };
        grid.push(json!({
            "fidelity": f.value(),
            "additive": additive,
            "multiplicative": multiplicative,
        }));
    }
    Ok((
        passed,
        json!({ "width": circuit.width(), "gate_count": circuit.gate_count(), "grid": grid }),
    ))
}

fn thm1(config: &ExperimentConfig) -> Result<(bool, Value)> {
    let v = load_circuit(config)?;
    let rc = supremacy::build_randomized_circuit(&v, &EtaPolicy::default())?;
    let q = supremacy::ideal_acceptance_with_cap(&rc, config.max_qubits)?;
    let (w, m, n) = (rc.main_width(), rc.ancilla_width(), rc.total_width());
    let fs = fidelities(config)?;

    let mixture = if m <= MAX_ENUMERATED_STEPS && n <= config.max_qubits.get() {
        Some(supremacy::mixture_distribution_with_cap(&rc, config.max_qubits)?)
    } else {
        None
    };

    let mut passed = true;
    let mut p_acc_prime = Vec::new();
    for &f in &fs {
        let direct = supremacy::depolarized_acceptance_with_cap(&rc, f, config.max_qubits)?;
        let mut entry = json!({ "fidelity": f.value(), "value": direct });
        if let Some(mix) = &mixture {
            let via = depol::depolarize(mix, f)[0];
            let ok = (via - direct).abs() <= crate::tolerance::EXACT;
            passed &= ok;
            entry["from_mixture"] = json!(via);
            entry["consistent"] = json!(ok);
        }
        p_acc_prime.push(entry);
    }

    let checksum = match &mixture {
        Some(mix) => {
            let expected = q * 0.5f64.powi(m as i32);
            let ok = (mix.total() - 1.0).abs() <= crate::tolerance::EXACT
                && (mix[0] - expected).abs() <= crate::tolerance::EXACT;
            passed &= ok;
            json!({
                "total": mix.total(),
                "accept_mass": mix[0],
                "accept_mass_expected": expected,
                "consistent": ok,
            })
        }
        None => Value::Null,
    };

    Ok((
        passed,
        json!({
            "q": q,
            "w": w,
            "m": m,
            "n": n,
            "p_acc_prime": p_acc_prime,
            "mixture_checksum": checksum,
        }),
    ))
}

fn sbp_gap(config: &ExperimentConfig) -> Result<(bool, Value)> {
    let mut reports = Vec::new();
    let mut passed = true;
    for f in fidelities(config)? {
        let t = supremacy::sbp_thresholds(config.r, config.w, config.m, f, config.epsilon)?;
        passed &= t.sbp_ok;
        reports.push(t);
    }
    let value = if reports.len() == 1 {
        serde_json::to_value(reports[0])
    } else {
        serde_json::to_value(&reports)
    };
    Ok((passed, value.expect("serializable")))
}

fn discriminate(config: &ExperimentConfig) -> Result<(bool, Value)> {
    let (source, state) = match &config.circuit_path {
        Some(p) => {
            let c = load_circuit(config)?;
            (json!({ "circuit": p.display().to_string() }), statevector::run_with_cap(&c, config.max_qubits)?)
        }
        None => {
            let width = config.w as usize;
            if width == 0 || width > discrimination::MAX_TENSOR_QUBITS {
                return Err(Error::Config(format!("random-state width {width} out of range")));
            }
            let mut rng = stream_rng(config.seed, 0);
            (json!({ "random_state": { "width": width, "seed": config.seed } }), random_state(&mut rng, width))
        }
    };
    let rho = density_from_pure(&state)?;
    let mut passed = true;
    let mut grid = Vec::new();
    for f in fidelities(config)? {
        let chain = discrimination::bound_chain(&rho, f, config.k)?;
        passed &= chain.all_passed();
        grid.push(chain);
    }
    Ok((
        passed,
        json!({ "state": source, "width": rho.width(), "k": config.k, "grid": grid }),
    ))
}
