//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the JSON payload and human diagnostics separately; the binary
//! writes the payload to stdout and diagnostics to stderr.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::channels::{make_named_map, NamedMap, QuantumMap};
use crate::designs::{design_channel, mub, sic, symmetric_target, DesignSet};
use crate::detect::{ccnr_test, hom_witness_estimate, isotropic_sweep, ppt_test, sweep_boundary, write_sweep_csv, DetectionMethod, DetectionReport, SpaDetector, Verdict};
use crate::error::{Error, Result};
use crate::json::{to_json, MapDoc};
use crate::spa::{conjecture_report, spa, spa_bipartite, EbOptions};
use crate::states::{named_state, DensityMatrix};
use crate::witnesses::{evaluate_witness, spa_witness, witness_from_map};

#[derive(Debug, Parser)]
#[command(name = "spa-toolkit", version, about = "Structural physical approximations of positive maps")]
struct Cli {
    /// Compact single-line JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct MapArgs {
    /// Registry name, see `maps list`.
    #[arg(long)]
    map: String,
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated map parameters, e.g. `1,1,1,0.5236` for ha_map.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
}

impl MapArgs {
    fn build(&self) -> Result<QuantumMap> {
        make_named_map(&self.map, self.dim, &self.params)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map registry.
    Maps {
        #[command(subcommand)]
        action: MapsAction,
    },
    /// SPA of a named map, or of id ⊗ Λ with --bipartite.
    Spa {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        bipartite: bool,
    },
    /// SPA, entanglement-breaking verdict and isotropic scan.
    Conjecture {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        seed: u64,
        /// Iteration cap for the nearest-separable search.
        #[arg(long, default_value_t = 1500)]
        max_iter: usize,
    },
    /// Two-design construction and checks.
    Design {
        #[command(subcommand)]
        action: DesignAction,
    },
    /// Witness built from a map.
    Witness {
        #[command(subcommand)]
        action: WitnessAction,
    },
    /// Entanglement detection on one state, or an isotropic sweep with --csv.
    Detect {
        /// Named state (`bell:phi+`, `isotropic:d=3,p=0.5`, ...) or a JSON file.
        #[arg(long)]
        state: Option<String>,
        /// `spa:<map>`, `witness:<map>`, `ppt`, `ccnr` or `hom`.
        #[arg(long)]
        method: String,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        /// Write an isotropic sweep to this CSV file instead of testing one state.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Local dimension of the sweep.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Choi matrix documents.
    Choi {
        #[command(subcommand)]
        action: ChoiAction,
    },
}

#[derive(Debug, Subcommand)]
enum MapsAction {
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Sic,
    Mub,
}

#[derive(Debug, Subcommand)]
enum DesignAction {
    Verify {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        dim: usize,
        /// Tetrahedron phases θ₂,θ₃,θ₄ (qubit SIC only).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phases: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
enum WitnessAction {
    Eval {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        state: String,
    },
}

#[derive(Debug, Subcommand)]
enum ChoiAction {
    Dump {
        #[command(flatten)]
        map: MapArgs,
    },
    Load {
        #[arg(long)]
        file: PathBuf,
    },
}

/// Outcome of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    /// 0 success, 2 invalid input, 3 numerical failure.
    pub exit_code: i32,
    /// JSON document for stdout.
    pub payload: Option<String>,
    /// Human-readable text for stderr.
    pub diagnostics: String,
}

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return CommandResult {
                exit_code: code,
                payload: None,
                diagnostics: e.render().to_string(),
            };
        }
    };
    let mut diag = String::new();
    match execute(&cli.command, &mut diag) {
        Ok(value) => match to_json(&value, !cli.json) {
            Ok(payload) => CommandResult {
                exit_code: 0,
                payload: Some(payload),
                diagnostics: diag,
            },
            Err(e) => failure(e, diag),
        },
        Err(e) => failure(e, diag),
    }
}

fn failure(e: Error, mut diag: String) -> CommandResult {
    let _ = writeln!(diag, "error: {e}");
    CommandResult {
        exit_code: e.exit_code(),
        payload: None,
        diagnostics: diag,
    }
}

fn value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn load_state(desc: &str) -> Result<DensityMatrix> {
    let path = std::path::Path::new(desc);
    if path.is_file() {
        crate::json::state_from_json(&std::fs::read_to_string(path)?)
    } else {
        named_state(desc)
    }
}

fn execute(cmd: &Command, diag: &mut String) -> Result<serde_json::Value> {
    match cmd {
        Command::Maps { action: MapsAction::List } => {
            let entries: Vec<_> = NamedMap::NAMES
                .iter()
                .map(|&name| {
                    let m = make_named_map(name, None, &[])?;
                    Ok(json!({
                        "name": name,
                        "default": m.label(),
                        "d_in": m.d_in(),
                        "d_out": m.d_out(),
                        "completely_positive": m.is_cp()?,
                    }))
                })
                .collect::<Result<_>>()?;
            let _ = writeln!(diag, "{} maps", entries.len());
            Ok(serde_json::Value::Array(entries))
        }
        Command::Spa { map, bipartite } => {
            let m = map.build()?;
            let r = if *bipartite { spa_bipartite(&m)? } else { spa(&m)? };
            let _ = writeln!(diag, "{m}: p* = {}, threshold = {}", r.p_star, r.threshold);
            let mut v = value(&r.summary())?;
            v["bipartite"] = json!(bipartite);
            Ok(v)
        }
        Command::Conjecture { map, seed, max_iter } => {
            let m = map.build()?;
            let mut opts = EbOptions {
                seed: *seed,
                ..EbOptions::default()
            };
            opts.gilbert.max_iter = *max_iter;
            let r = conjecture_report(&m, &opts)?;
            let _ = writeln!(diag, "{}: p* = {}, verdict {:?}", r.map, r.p_star, r.verdict);
            value(&r)
        }
        Command::Design {
            action: DesignAction::Verify { kind, dim, phases },
        } => {
            let set: DesignSet = match kind {
                KindArg::Sic => {
                    let ph = match phases.as_slice() {
                        [] => None,
                        [a, b, c] => Some([*a, *b, *c]),
                        _ => {
                            return Err(Error::InvalidParameter(
                                "--phases takes three values".into(),
                            ))
                        }
                    };
                    sic(*dim, ph)?
                }
                KindArg::Mub => {
                    if !phases.is_empty() {
                        return Err(Error::InvalidParameter("--phases applies to sic only".into()));
                    }
                    mub(*dim)?
                }
            };
            let channel = design_channel(&set)?.to_map()?;
            let channel_error = channel.choi().max_abs_diff(&symmetric_target(*dim));
            let _ = writeln!(
                diag,
                "{} vectors, frame residual {:e}, channel deviation {:e}",
                set.len(),
                set.residual,
                channel_error
            );
            Ok(json!({
                "kind": set.kind,
                "dim": set.dim,
                "count": set.len(),
                "residual": set.residual,
                "overlap_error": set.overlap_error(),
                "channel_error": channel_error,
                "vectors": set.vectors,
            }))
        }
        Command::Witness {
            action: WitnessAction::Eval { map, state },
        } => {
            let m = map.build()?;
            let rho = load_state(state)?;
            let w = witness_from_map(&m, None)?;
            let e = evaluate_witness(&w, &rho)?;
            let s = spa_witness(&w)?;
            let v = s.value(&rho);
            let _ = writeln!(diag, "tr[Wρ] = {}, detected {}", e.value, e.detected);
            Ok(json!({
                "map": m.label(),
                "state": state,
                "value": e.value,
                "detected": e.detected,
                "spa": {
                    "p_star": s.p_star,
                    "threshold": s.threshold,
                    "value": v,
                    "detected": s.detects(&rho),
                },
            }))
        }
        Command::Detect {
            state,
            method,
            shots,
            seed,
            params,
            csv,
            dim,
            step,
        } => detect(state.as_deref(), method, *shots, *seed, params, csv.as_ref(), *dim, *step, diag),
        Command::Choi {
            action: ChoiAction::Dump { map },
        } => {
            let m = map.build()?;
            let _ = writeln!(diag, "{m}");
            value(&MapDoc::new(&m))
        }
        Command::Choi {
            action: ChoiAction::Load { file },
        } => {
            let text = std::fs::read_to_string(file)?;
            let m = crate::json::map_from_json(&text)?;
            let _ = writeln!(diag, "{m}: min Choi eigenvalue {}", m.min_choi_eigenvalue()?);
            value(&MapDoc::new(&m))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn detect(
    state: Option<&str>,
    method: &str,
    shots: Option<u64>,
    seed: Option<u64>,
    params: &[f64],
    csv: Option<&PathBuf>,
    dim: Option<usize>,
    step: f64,
    diag: &mut String,
) -> Result<serde_json::Value> {
    let (kind, map_name) = method.split_once(':').unwrap_or((method, ""));
    if let Some(path) = csv {
        if kind != "spa" {
            return Err(Error::InvalidParameter("--csv sweeps need --method spa:<map>".into()));
        }
        let d = dim.ok_or_else(|| Error::InvalidParameter("--csv needs --dim".into()))?;
        let m = make_named_map(map_name, Some(d), params)?;
        let rows = isotropic_sweep(&m, step)?;
        write_sweep_csv(&rows, std::fs::File::create(path)?)?;
        let boundary = sweep_boundary(&rows);
        let _ = writeln!(diag, "{} rows written to {}", rows.len(), path.display());
        return Ok(json!({
            "csv": path.display().to_string(),
            "rows": rows.len(),
            "boundary_estimate": boundary,
            "entanglement_boundary": d as f64 / (d as f64 + 1.0),
        }));
    }
    let desc = state.ok_or_else(|| Error::InvalidParameter("--state is required".into()))?;
    let rho = load_state(desc)?;
    let (da, db) = rho.dims().as_bipartite()?;
    let report: DetectionReport = match kind {
        "spa" => {
            let m = make_named_map(map_name, Some(db), params)?;
            SpaDetector::new(&m, da)?.detect(&rho)?
        }
        "witness" => {
            let m = make_named_map(map_name, Some(db), params)?;
            let s = spa_witness(&witness_from_map(&m, None)?)?;
            let v = s.value(&rho);
            DetectionReport {
                method: DetectionMethod::Witness,
                statistic: v,
                threshold: s.threshold,
                verdict: if s.detects(&rho) {
                    Verdict::Entangled
                } else {
                    Verdict::NotDetected
                },
                shots: None,
                stderr: None,
                note: None,
            }
        }
        "ppt" => ppt_test(&rho)?,
        "ccnr" => ccnr_test(&rho)?,
        "hom" => {
            let seed = seed.ok_or_else(|| Error::InvalidParameter("--method hom needs --seed".into()))?;
            let name = if map_name.is_empty() { "transpose" } else { map_name };
            let m = make_named_map(name, Some(db), params)?;
            let s = spa_witness(&witness_from_map(&m, None)?)?;
            hom_witness_estimate(&s, &rho, shots.unwrap_or(100_000), seed)?
        }
        other => return Err(Error::UnknownName(other.to_string())),
    };
    let _ = writeln!(
        diag,
        "{:?}: statistic {} vs threshold {} -> {:?}",
        report.method, report.statistic, report.threshold, report.verdict
    );
    value(&report)
}
