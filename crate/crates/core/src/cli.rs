//! Command-line front end. The `clonelab` binary only parses arguments and
//! calls [`run`].
//!
//! Exit codes: 0 when every report passes or is not applicable, 1 when a
//! report fails, 2 for configuration errors, 3 when a size limit or
//! closure budget is hit.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cloneengine::{collapsing_check, pentagon_check, EngineError, DEFAULT_BUDGET};
use crate::config::{load_instance, ConfigError, InstanceConfig};
use crate::interval::{
    binary_polymorphism_sums, build_interval_map, verify_ci_closed, verify_forcing, verify_quasilinear_witnesses,
    IntervalError,
};
use crate::machida::{distance_table, minmax_pool, verify_encoding, verify_metric, MachidaError};
use crate::monoid::{MonoidError, MonoidInstance};
use crate::poset::{order_ideals, OrderIdeal};
use crate::report::{Policy, VerificationReport, SCHEMA_VERSION};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Random target lists per `k` in the witness report.
pub const WITNESS_TRIALS: usize = 100;
/// Random capped sets in the encoding report.
pub const ENCODING_TRIALS: usize = 50;

#[derive(Debug, Parser)]
#[command(
    name = "clonelab",
    version,
    about = "Verify monoidal intervals of clones on finite instances"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check on an instance and emit one report per check.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        /// `exhaustive` or `sampled:<count>:seed=<seed>`; defaults to the
        /// instance file's policy, then to `exhaustive`.
        #[arg(long)]
        policy: Option<Policy>,
        /// Write the JSON bundle here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall time per report (makes output run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Print the interval above M as a Hasse diagram labelled by ideals.
    IntervalMap {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Binary polymorphisms of the full symmetric group on 3 or 4 points.
    Collapse {
        #[arg(long, default_value_t = 3)]
        domain: u8,
    },
    /// The pentagon of clones generated by min, med and max on three points.
    Pentagon {
        #[arg(long, default_value_t = 3)]
        cap: usize,
    },
    /// Distances between clones of a named pool, plus the encoding check.
    Metric {
        #[arg(long, default_value_t = 3)]
        domain: u8,
        #[arg(long, default_value = "minmax")]
        pool: String,
        #[arg(long, default_value_t = 3)]
        cap: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("limit reached: {0}")]
    Budget(String),
    #[error("{0}")]
    Internal(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Internal(_) => EXIT_FAIL,
            _ => EXIT_CONFIG,
        }
    }
}

impl From<MonoidError> for CliError {
    fn from(e: MonoidError) -> CliError {
        match e {
            MonoidError::TooLarge { .. } => CliError::Budget(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<IntervalError> for CliError {
    fn from(e: IntervalError) -> CliError {
        match e {
            IntervalError::Monoid(m) => m.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> CliError {
        match e {
            EngineError::Budget(_) | EngineError::TooLarge { .. } => CliError::Budget(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<MachidaError> for CliError {
    fn from(e: MachidaError) -> CliError {
        match e {
            MachidaError::Engine(inner) => inner.into(),
            MachidaError::TooLarge { .. } => CliError::Budget(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Result of a command: a JSON document and whether every verdict was
/// acceptable.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Value,
    pub passed: bool,
}

impl Outcome {
    fn from_reports(header: Value, reports: &[VerificationReport]) -> Outcome {
        let passed = reports.iter().all(|r| r.verdict.is_acceptable());
        let mut summary = std::collections::BTreeMap::new();
        for r in reports {
            let key = match &r.verdict {
                crate::report::Verdict::Pass => "pass",
                crate::report::Verdict::Fail => "fail",
                crate::report::Verdict::NotApplicable { .. } => "not_applicable",
            };
            *summary.entry(key).or_insert(0u64) += 1;
        }
        let mut document = header;
        document["schema_version"] = json!(SCHEMA_VERSION);
        document["summary"] = json!(summary);
        document["reports"] = json!(reports);
        Outcome { document, passed }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document).expect("json value") + "\n"
    }
}

fn timed<T>(timings: bool, f: impl FnOnce() -> Result<VerificationReport, T>) -> Result<VerificationReport, T> {
    let start = Instant::now();
    let mut r = f()?;
    if timings {
        r.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(r)
}

fn instance_header(config: &InstanceConfig) -> Value {
    let inst = &config.instance;
    json!({
        "instance": {
            "name": config.name,
            "fingerprint": inst.fingerprint(),
            "field": inst.field().order(),
            "poset": inst.poset().to_text(),
            "monoid_size": inst.monoid_size().to_string(),
            "singletons_small": inst.singletons_small(),
        }
    })
}

/// Every check on one instance, in a fixed order.
pub fn verify_reports(
    inst: &MonoidInstance,
    policy: Policy,
    timings: bool,
) -> Result<Vec<VerificationReport>, CliError> {
    let mut reports = Vec::new();
    reports.push(timed(timings, || inst.verify_composition_table(policy))?);

    reports.push(timed(timings, || -> Result<_, MonoidError> {
        let mut all = VerificationReport::new(
            "phi-psi-translation",
            "phi_r∘psi_{p,q} equals phi_q when r = p and lies in N' otherwise, for all r and all q <= p",
            Policy::Exhaustive,
        )
        .with_instance(&inst.fingerprint());
        let poset = inst.poset();
        for (q, p) in poset.comparable_pairs() {
            for r in 0..poset.len() {
                all.absorb(inst.check_phi_psi_translation(poset.name(r), poset.name(p), poset.name(q))?);
            }
        }
        Ok(all)
    })?);

    reports.push(timed(timings, || Ok::<_, MonoidError>(inst.verify_psi_coherence()))?);
    reports.push(timed(timings, || inst.verify_sum_lemmas(policy))?);

    reports.push(timed(timings, || -> Result<_, IntervalError> {
        let lattice = order_ideals(inst.poset())?;
        let mut all = VerificationReport::new(
            "ci-closure",
            "every C_I is closed under substitution and has unary part exactly M",
            policy,
        )
        .with_instance(&inst.fingerprint());
        for &ideal in lattice.ideals() {
            all.absorb(verify_ci_closed(inst, ideal, policy)?);
            all.add_count("ideals", 1);
        }
        Ok(all)
    })?);

    reports.push(timed(timings, || verify_forcing(inst))?);
    reports.push(timed(timings, || build_interval_map(inst).map(|m| m.report))?);

    let seed = match policy {
        Policy::Sampled { seed, .. } => seed,
        Policy::Exhaustive => 0,
    };
    reports.push(timed(timings, || {
        verify_quasilinear_witnesses(inst, WITNESS_TRIALS, seed)
    })?);

    reports.push(timed(timings, || -> Result<_, IntervalError> {
        let mut r = binary_polymorphism_sums(inst, policy)?.report;
        if !inst.singletons_small() {
            r.not_applicable(
                "singletons of A are not small, so polymorphisms of M need not be sums of members of M; the sweep above only covers sums",
            );
        }
        Ok(r)
    })?);
    Ok(reports)
}

pub fn cmd_verify(config: &InstanceConfig, policy: Option<Policy>, timings: bool) -> Result<Outcome, CliError> {
    let policy = policy.or(config.policy).unwrap_or(Policy::Exhaustive);
    let reports = verify_reports(&config.instance, policy, timings)?;
    let mut header = instance_header(config);
    header["policy"] = json!(policy.to_string());
    Ok(Outcome::from_reports(header, &reports))
}

pub fn cmd_interval_map(config: &InstanceConfig) -> Result<Outcome, CliError> {
    let map = build_interval_map(&config.instance)?;
    let mut document = instance_header(config);
    document["schema_version"] = json!(SCHEMA_VERSION);
    document["interval"] = map.to_json();
    document["ideals"] = json!(map
        .lattice
        .ideals()
        .iter()
        .map(|i: &OrderIdeal| i.label(config.instance.poset()))
        .collect::<Vec<_>>());
    Ok(Outcome {
        passed: map.report.verdict.is_acceptable(),
        document,
    })
}

pub fn cmd_collapse(domain: u8) -> Result<Outcome, CliError> {
    if !(3..=4).contains(&domain) {
        return Err(CliError::Budget(format!(
            "domain {domain} is outside the supported sizes 3 and 4"
        )));
    }
    let report = collapsing_check(domain)?;
    Ok(Outcome::from_reports(json!({ "domain": domain }), &[report]))
}

pub fn cmd_pentagon(cap: usize) -> Result<Outcome, CliError> {
    if cap < 3 {
        return Err(CliError::Usage(format!(
            "the median is ternary, so the cap must be at least 3 (got {cap})"
        )));
    }
    let (report, _) = pentagon_check(cap, DEFAULT_BUDGET)?;
    Ok(Outcome::from_reports(json!({ "cap": cap }), &[report]))
}

pub fn cmd_metric(domain: u8, pool: &str, cap: usize) -> Result<Outcome, CliError> {
    if domain != 3 || pool != "minmax" {
        return Err(CliError::Usage(format!(
            "unknown pool `{pool}` on {domain} points; available: `minmax` on 3 points"
        )));
    }
    let clones = minmax_pool(cap, DEFAULT_BUDGET)?;
    let table = distance_table(&clones)?;
    let names: Vec<&str> = clones.iter().map(|(n, _)| n.as_str()).collect();
    let rows: Vec<Value> = table
        .iter()
        .zip(&names)
        .map(|(row, name)| json!({ "clone": name, "distances": row.iter().map(|d| d.to_string()).collect::<Vec<_>>() }))
        .collect();
    let metric = verify_metric(&clones)?;
    let encoding = verify_encoding(2, 2, ENCODING_TRIALS, 0, DEFAULT_BUDGET)?;
    let header = json!({ "domain": domain, "cap": cap, "pool": names, "distance_table": rows });
    Ok(Outcome::from_reports(header, &[metric, encoding]))
}

fn emit(outcome: &Outcome, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = outcome.to_json();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let (outcome, out) = match &cli.command {
        Command::Verify {
            instance,
            policy,
            out,
            timings,
        } => (
            cmd_verify(&load_instance(instance)?, *policy, *timings)?,
            out.as_deref(),
        ),
        Command::IntervalMap { instance, out } => (cmd_interval_map(&load_instance(instance)?)?, out.as_deref()),
        Command::Collapse { domain } => (cmd_collapse(*domain)?, None),
        Command::Pentagon { cap } => (cmd_pentagon(*cap)?, None),
        Command::Metric { domain, pool, cap } => (cmd_metric(*domain, pool, *cap)?, None),
    };
    emit(&outcome, out, stdout)?;
    Ok(outcome.passed)
}

/// Runs a parsed command, writing JSON to `stdout` and diagnostics to
/// `stderr`, and returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(cli, stdout) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(stderr, "clonelab: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let cli = Cli::try_parse_from(std::iter::once("clonelab").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cli, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn instance_path(name: &str) -> String {
        format!("{}/instances/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    #[test]
    fn verify_m0_bundle() {
        let (code, out, _) = run_args(&[
            "verify",
            "--instance",
            &instance_path("m0.toml"),
            "--policy",
            "exhaustive",
        ]);
        assert_eq!(code, EXIT_PASS);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["summary"]["pass"], 7);
        assert_eq!(v["summary"]["not_applicable"], 2);
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let (code, _, err) = run_args(&["verify", "--instance", "/nonexistent.toml"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("nonexistent"));
        assert_eq!(run_args(&["collapse", "--domain", "5"]).0, EXIT_BUDGET);
        assert_eq!(run_args(&["pentagon", "--cap", "2"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["metric", "--pool", "other"]).0, EXIT_CONFIG);
        assert!(Cli::try_parse_from(["clonelab", "verify", "--instance", "x", "--policy", "sampled:5"]).is_err());
    }
}
