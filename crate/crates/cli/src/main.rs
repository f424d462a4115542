//! Experiment CLI: run retractions, collision flows, path constructions, and
//! estimator sweeps over finite subset spaces; emit CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure.

mod artifact;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use artifact::{pairs_to_jval, path_csv, subset_to_jval, trajectory_csv, JVal};
use subsetspace::retract::{FlowOptions, SelectorOptions};
use subsetspace::verify::{BreakpointTarget, PairSampler};
use subsetspace::{
    bip_hexagon, check_holder, diameter, estimate_lipschitz, flow_retract,
    geodesic_in_larger_stratum, hausdorff, hull_residual, path_speed_profile, reduce,
    min_separation, retract_3_to_2, retract_n_to_1, retract_n_to_2, retract_pair_average,
    spaced_pair, two_quasiconvex_path, verify_bip_hexagon, Error as SpaceError,
    FiniteSubset, NormDescriptor, PExponent, SubsetPath,
};

#[derive(Parser)]
#[command(
    name = "subsetspace",
    about = "Finite subset spaces: Hausdorff metric, quasigeodesics, retractions",
    version
)]
struct Cli {
    /// JSON config file; fields present in it override the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Norm exponent: a number >= 1 or "inf"
    #[arg(long, global = true, default_value = "2")]
    p: String,
    /// Snowflake exponent in (0, 1]
    #[arg(long, global = true, default_value_t = 1.0)]
    epsilon: f64,
    /// Ambient dimension (inline inputs and samplers)
    #[arg(long, global = true, default_value_t = 1)]
    dim: usize,
    /// RNG seed; falls back to SUBSETSPACE_SEED, then 0
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Metric comparison tolerance
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Artifact path (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Commands,
}

#[derive(Args, Clone, Default)]
struct InputArgs {
    /// Point-set file: {"norm": {...}, "sets": [[[..], ..], ..]}
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline sets: JSON array of sets of points (scalars allowed in 1D)
    #[arg(long)]
    inline: Option<String>,
}

#[derive(Subcommand, Clone)]
enum Commands {
    /// Hausdorff distance between the first two input sets
    Hausdorff {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Pair-average retraction X(2) -> X
    Retract2 {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Interpolated retraction X(3) -> X(2)
    Retract3 {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Selector retraction X(n) -> X
    #[command(name = "retractN1")]
    RetractN1 {
        #[command(flatten)]
        input: InputArgs,
        /// Monte Carlo samples for the selector in dimension >= 3
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Skeleton retraction X(n) -> X(2)
    #[command(name = "retractN2")]
    RetractN2 {
        #[command(flatten)]
        input: InputArgs,
        /// Skeleton parameter (must exceed 6)
        #[arg(long, default_value_t = 7.0)]
        tau: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Collision-flow retraction X(n) -> X(n-1)
    Flow {
        #[command(flatten)]
        input: InputArgs,
        /// Ambient cardinality (defaults to the input cardinality)
        #[arg(long)]
        ambient_n: Option<usize>,
        #[arg(long)]
        merge_tol: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        rk_tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// Trajectory CSV path
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Geodesic between two sets in the larger stratum
    Geodesic {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        /// Sampled path CSV path
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// 2-quasigeodesic between two sets
    #[command(name = "quasiconvex-path")]
    QuasiconvexPath {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Empirical Lipschitz ratio sweep
    #[command(name = "estimate-lip")]
    EstimateLip {
        /// One of: identity, diameter, retract2, retract3, retractN1, retractN2, flow
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Cardinality of the sampled sets
        #[arg(long, default_value_t = 3)]
        cardinality: usize,
        /// box or mixed (mixed adds near-collision and breakpoint regimes)
        #[arg(long, default_value = "mixed")]
        sampler: String,
        #[arg(long, default_value_t = 7.0)]
        tau: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Hölder-bound margin sweep for the collision flow
    #[command(name = "check-holder")]
    CheckHolder {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 3)]
        cardinality: usize,
        #[arg(long, default_value = "mixed")]
        sampler: String,
    },
    /// Counterexample fixtures: spaced-pair or bip-hexagon
    Fixtures {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 5.0)]
        m: f64,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    norm: Option<NormDescriptor>,
    operation: Option<String>,
    input: Option<PathBuf>,
    inline: Option<serde_json::Value>,
    output: Option<PathBuf>,
    csv: Option<PathBuf>,
    seed: Option<u64>,
    tol: Option<f64>,
    #[serde(default)]
    options: FileOptions,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileOptions {
    tau: Option<f64>,
    merge_tol: Option<f64>,
    rk_tol: Option<f64>,
    max_steps: Option<usize>,
    trials: Option<u64>,
    grid: Option<usize>,
    ambient_n: Option<usize>,
    map: Option<String>,
    samples: Option<u64>,
    cardinality: Option<usize>,
    sampler: Option<String>,
    n: Option<usize>,
    m: Option<f64>,
    kind: Option<String>,
}

enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::IntegrationFailure(_)
            | SpaceError::SingularField
            | SpaceError::SingularDirection
            | SpaceError::NoData(_)
            | SpaceError::UndefinedRatio => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error (validation): {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error (numerical): {msg}");
            ExitCode::from(3)
        }
    }
}

fn parse_p(s: &str) -> Result<PExponent, CliError> {
    if s == "inf" {
        return Ok(PExponent::Infinity);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::Validation(format!("cannot parse p exponent {s:?}")))?;
    Ok(PExponent::Finite(v))
}

struct Resolved {
    norm: NormDescriptor,
    seed: u64,
    tol: f64,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    input: Option<PathBuf>,
    inline: Option<serde_json::Value>,
    cmd: Commands,
}

fn resolve(cli: Cli) -> Result<Resolved, CliError> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Validation(format!(
                    "config parse error at line {}, column {}: {e}",
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => FileConfig::default(),
    };

    let norm = match file.norm {
        Some(n) => n,
        None => {
            NormDescriptor::new(parse_p(&cli.p)?, cli.epsilon, cli.dim).map_err(CliError::from)?
        }
    };
    let seed = file
        .seed
        .or(cli.seed)
        .or_else(|| {
            std::env::var("SUBSETSPACE_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    let tol = file.tol.unwrap_or(cli.tol);

    let o = &file.options;
    let mut cmd = cli.cmd.clone();
    if let Some(op) = &file.operation {
        cmd = command_from_name(op, &cmd, o)?;
    }
    apply_option_overrides(&mut cmd, o);

    Ok(Resolved {
        norm,
        seed,
        tol,
        out: file.output.or(cli.out),
        csv: file.csv,
        input: file.input,
        inline: file.inline,
        cmd,
    })
}

fn command_from_name(
    name: &str,
    current: &Commands,
    o: &FileOptions,
) -> Result<Commands, CliError> {
    let inherited_input = match current {
        Commands::Hausdorff { input }
        | Commands::Retract2 { input }
        | Commands::Retract3 { input }
        | Commands::RetractN1 { input, .. }
        | Commands::RetractN2 { input, .. }
        | Commands::Flow { input, .. }
        | Commands::Geodesic { input, .. }
        | Commands::QuasiconvexPath { input, .. } => input.clone(),
        _ => InputArgs::default(),
    };
    let cmd = match name {
        "hausdorff" => Commands::Hausdorff {
            input: inherited_input,
        },
        "retract2" => Commands::Retract2 {
            input: inherited_input,
        },
        "retract3" => Commands::Retract3 {
            input: inherited_input,
        },
        "retractN1" => Commands::RetractN1 {
            input: inherited_input,
            samples: o.samples.unwrap_or(100_000),
        },
        "retractN2" => Commands::RetractN2 {
            input: inherited_input,
            tau: o.tau.unwrap_or(7.0),
            samples: o.samples.unwrap_or(100_000),
        },
        "flow" => Commands::Flow {
            input: inherited_input,
            ambient_n: o.ambient_n,
            merge_tol: o.merge_tol,
            rk_tol: o.rk_tol.unwrap_or(1e-9),
            max_steps: o.max_steps.unwrap_or(100_000),
            csv: None,
        },
        "geodesic" => Commands::Geodesic {
            input: inherited_input,
            grid: o.grid.unwrap_or(1001),
            csv: None,
        },
        "quasiconvex-path" => Commands::QuasiconvexPath {
            input: inherited_input,
            grid: o.grid.unwrap_or(1001),
            csv: None,
        },
        "estimate-lip" => Commands::EstimateLip {
            map: o.map.clone().ok_or_else(|| {
                CliError::Validation("config operation estimate-lip needs options.map".into())
            })?,
            trials: o.trials.unwrap_or(10_000),
            cardinality: o.cardinality.unwrap_or(3),
            sampler: o.sampler.clone().unwrap_or_else(|| "mixed".into()),
            tau: o.tau.unwrap_or(7.0),
            samples: o.samples.unwrap_or(100_000),
        },
        "check-holder" => Commands::CheckHolder {
            trials: o.trials.unwrap_or(10_000),
            cardinality: o.cardinality.unwrap_or(3),
            sampler: o.sampler.clone().unwrap_or_else(|| "mixed".into()),
        },
        "fixtures" => Commands::Fixtures {
            kind: o.kind.clone().ok_or_else(|| {
                CliError::Validation("config operation fixtures needs options.kind".into())
            })?,
            n: o.n.unwrap_or(4),
            m: o.m.unwrap_or(5.0),
        },
        other => {
            return Err(CliError::Validation(format!(
                "unknown operation {other:?} in config"
            )))
        }
    };
    Ok(cmd)
}

fn apply_option_overrides(cmd: &mut Commands, o: &FileOptions) {
    match cmd {
        Commands::RetractN1 { samples, .. } => {
            if let Some(v) = o.samples {
                *samples = v;
            }
        }
        Commands::RetractN2 { tau, samples, .. } => {
            if let Some(v) = o.tau {
                *tau = v;
            }
            if let Some(v) = o.samples {
                *samples = v;
            }
        }
        Commands::Flow {
            ambient_n,
            merge_tol,
            rk_tol,
            max_steps,
            ..
        } => {
            if o.ambient_n.is_some() {
                *ambient_n = o.ambient_n;
            }
            if o.merge_tol.is_some() {
                *merge_tol = o.merge_tol;
            }
            if let Some(v) = o.rk_tol {
                *rk_tol = v;
            }
            if let Some(v) = o.max_steps {
                *max_steps = v;
            }
        }
        Commands::Geodesic { grid, .. } | Commands::QuasiconvexPath { grid, .. } => {
            if let Some(v) = o.grid {
                *grid = v;
            }
        }
        Commands::EstimateLip {
            map,
            trials,
            cardinality,
            sampler,
            tau,
            samples,
        } => {
            if let Some(v) = &o.map {
                *map = v.clone();
            }
            if let Some(v) = o.trials {
                *trials = v;
            }
            if let Some(v) = o.cardinality {
                *cardinality = v;
            }
            if let Some(v) = &o.sampler {
                *sampler = v.clone();
            }
            if let Some(v) = o.tau {
                *tau = v;
            }
            if let Some(v) = o.samples {
                *samples = v;
            }
        }
        Commands::CheckHolder {
            trials,
            cardinality,
            sampler,
        } => {
            if let Some(v) = o.trials {
                *trials = v;
            }
            if let Some(v) = o.cardinality {
                *cardinality = v;
            }
            if let Some(v) = &o.sampler {
                *sampler = v.clone();
            }
        }
        Commands::Fixtures { kind, n, m } => {
            if let Some(v) = &o.kind {
                *kind = v.clone();
            }
            if let Some(v) = o.n {
                *n = v;
            }
            if let Some(v) = o.m {
                *m = v;
            }
        }
        _ => {}
    }
}

/// Reads input sets from (in precedence order) the config file's input path,
/// its inline value, then the subcommand flags.
fn load_sets(
    r: &Resolved,
    args: &InputArgs,
) -> Result<(NormDescriptor, Vec<FiniteSubset>), CliError> {
    #[derive(Deserialize)]
    struct PointSetFile {
        norm: NormDescriptor,
        sets: serde_json::Value,
    }
    let from_file = |path: &Path| -> Result<(NormDescriptor, Vec<FiniteSubset>), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let file: PointSetFile = serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!(
                "input parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Ok((file.norm, parse_sets(&file.sets, file.norm)?))
    };
    if let Some(path) = &r.input {
        return from_file(path);
    }
    if let Some(value) = &r.inline {
        return Ok((r.norm, parse_sets(value, r.norm)?));
    }
    if let Some(path) = &args.input {
        return from_file(path);
    }
    if let Some(text) = &args.inline {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
            CliError::Validation(format!(
                "inline parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        return Ok((r.norm, parse_sets(&value, r.norm)?));
    }
    Err(CliError::Validation(
        "no input: pass --input FILE or --inline JSON (or config input/inline)".into(),
    ))
}

fn parse_sets(
    value: &serde_json::Value,
    norm: NormDescriptor,
) -> Result<Vec<FiniteSubset>, CliError> {
    let outer = value
        .as_array()
        .ok_or_else(|| CliError::Validation("sets must be a JSON array of subsets".into()))?;
    outer
        .iter()
        .map(|set| {
            let entries = set
                .as_array()
                .ok_or_else(|| CliError::Validation("each subset must be a JSON array".into()))?;
            let rows: Vec<Vec<f64>> = entries
                .iter()
                .map(|entry| match entry {
                    serde_json::Value::Number(n) => Ok(vec![n.as_f64().unwrap()]),
                    serde_json::Value::Array(coords) => coords
                        .iter()
                        .map(|c| {
                            c.as_f64().ok_or_else(|| {
                                CliError::Validation("coordinates must be numbers".into())
                            })
                        })
                        .collect(),
                    _ => Err(CliError::Validation(
                        "points must be numbers or coordinate arrays".into(),
                    )),
                })
                .collect::<Result<_, _>>()?;
            FiniteSubset::from_rows(norm, &rows).map_err(CliError::from)
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, artifact: &JVal) -> Result<(), CliError> {
    let mut text = artifact.render();
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

fn p_jval(norm: &NormDescriptor) -> JVal {
    match norm.p() {
        PExponent::Finite(v) => JVal::Num(v),
        PExponent::Infinity => JVal::Str("inf".into()),
    }
}

fn norm_jval(norm: &NormDescriptor) -> JVal {
    JVal::Obj(vec![
        ("p", p_jval(norm)),
        ("epsilon", JVal::Num(norm.epsilon())),
        ("dim", JVal::Int(norm.dim() as i64)),
    ])
}

fn need(sets: &[FiniteSubset], k: usize, what: &str) -> Result<(), CliError> {
    if sets.len() < k {
        return Err(CliError::Validation(format!(
            "{what} needs {k} input set(s), got {}",
            sets.len()
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let r = resolve(cli)?;
    match r.cmd.clone() {
        Commands::Hausdorff { input } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 2, "hausdorff")?;
            let value = hausdorff(&sets[0], &sets[1])?;
            eprintln!("hausdorff = {value}");
            emit(
                &r.out,
                &JVal::Obj(vec![
                    ("operation", JVal::Str("hausdorff".into())),
                    ("norm", norm_jval(&norm)),
                    ("value", JVal::Num(value)),
                ]),
            )
        }
        Commands::Retract2 { input } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 1, "retract2")?;
            let out = retract_pair_average(&sets[0])?;
            retraction_artifact(&r, "retract2", &norm, &sets[0], &out, None)
        }
        Commands::Retract3 { input } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 1, "retract3")?;
            let out = retract_3_to_2(&sets[0])?;
            retraction_artifact(&r, "retract3", &norm, &sets[0], &out, None)
        }
        Commands::RetractN1 { input, samples } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 1, "retractN1")?;
            let opts = SelectorOptions {
                samples,
                seed: r.seed,
            };
            let out = retract_n_to_1(&sets[0], &opts)?;
            retraction_artifact(&r, "retractN1", &norm, &sets[0], &out, None)
        }
        Commands::RetractN2 {
            input,
            tau,
            samples,
        } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 1, "retractN2")?;
            let opts = SelectorOptions {
                samples,
                seed: r.seed,
            };
            let out = retract_n_to_2(&sets[0], tau, &opts)?;
            retraction_artifact(&r, "retractN2", &norm, &sets[0], &out, Some(tau))
        }
        Commands::Flow {
            input,
            ambient_n,
            merge_tol,
            rk_tol,
            max_steps,
            csv,
        } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 1, "flow")?;
            let x = &sets[0];
            let n = ambient_n.unwrap_or(x.len());
            let opts = FlowOptions {
                rk_tol,
                merge_tol,
                max_steps,
                max_step: None,
                record_trajectory: true,
            };
            let res = flow_retract(x, n, &opts)?;
            let delta = min_separation(x, n)?;
            let lower = delta / (2.0 * (n as f64 - 1.0));
            let upper = delta / 2.0;
            let tol = 1e-6 * delta;
            let within = res.collision_time >= lower - tol && res.collision_time <= upper + tol;
            let mut hull_max: f64 = 0.0;
            let dim = norm.dim();
            let mut com_drift: f64 = 0.0;
            let com0: Vec<f64> = (0..dim)
                .map(|k| x.points().iter().map(|p| p.coords()[k]).sum::<f64>())
                .collect();
            for (_, cfg) in &res.trajectory {
                for p in cfg {
                    hull_max = hull_max.max(hull_residual(p, x)?);
                }
                for k in 0..dim {
                    let com: f64 = cfg.iter().map(|p| p.coords()[k]).sum();
                    com_drift = com_drift.max((com - com0[k]).abs());
                }
            }
            eprintln!(
                "collision-time bracket: {} (T = {}, interval [{lower}, {upper}], tol {tol})",
                if within { "PASS" } else { "FAIL" },
                res.collision_time
            );
            eprintln!(
                "convex-hull invariance: {} (max residual {hull_max})",
                if hull_max <= 1e-8 { "PASS" } else { "FAIL" }
            );
            eprintln!(
                "center-of-mass conservation: {} (max drift {com_drift})",
                if com_drift <= 1e-7 { "PASS" } else { "FAIL" }
            );
            if let Some(path) = csv.or(r.csv.clone()) {
                write_text(&path, &trajectory_csv(&res.trajectory))?;
            }
            emit(
                &r.out,
                &JVal::Obj(vec![
                    ("operation", JVal::Str("flow".into())),
                    ("collision_time", JVal::Num(res.collision_time)),
                    ("output", subset_to_jval(&res.output)),
                    (
                        "bounds_check",
                        JVal::Obj(vec![
                            ("delta", JVal::Num(delta)),
                            ("lower", JVal::Num(lower)),
                            ("upper", JVal::Num(upper)),
                            ("within", JVal::Bool(within)),
                            ("hull_max_residual", JVal::Num(hull_max)),
                            ("com_max_drift", JVal::Num(com_drift)),
                        ]),
                    ),
                    (
                        "options",
                        JVal::Obj(vec![
                            ("p", p_jval(&norm)),
                            ("tau", JVal::Null),
                            ("merge_tol", JVal::Num(res.merge_tolerance)),
                            ("rk_tol", JVal::Num(rk_tol)),
                            ("seed", JVal::Int(r.seed as i64)),
                            ("max_steps", JVal::Int(max_steps as i64)),
                        ]),
                    ),
                ]),
            )
        }
        Commands::Geodesic { input, grid, csv } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 2, "geodesic")?;
            let path = geodesic_in_larger_stratum(&sets[0], &sets[1])?;
            let relation = reduce(&subsetspace::proximal_complete_relation(
                &sets[0], &sets[1],
            )?);
            path_artifact(
                &r,
                "geodesic",
                &norm,
                &sets[0],
                &sets[1],
                &path,
                grid,
                csv,
                1.0,
                Some(relation.pairs().to_vec()),
            )
        }
        Commands::QuasiconvexPath { input, grid, csv } => {
            let (norm, sets) = load_sets(&r, &input)?;
            need(&sets, 2, "quasiconvex-path")?;
            let path = two_quasiconvex_path(&sets[0], &sets[1])?;
            path_artifact(
                &r,
                "quasiconvex-path",
                &norm,
                &sets[0],
                &sets[1],
                &path,
                grid,
                csv,
                2.0,
                None,
            )
        }
        Commands::EstimateLip {
            map,
            trials,
            cardinality,
            sampler,
            tau,
            samples,
        } => {
            if trials < 1 {
                return Err(CliError::Validation("trials must be >= 1".into()));
            }
            if cardinality < 1 {
                return Err(CliError::Validation("cardinality must be >= 1".into()));
            }
            let norm = r.norm;
            if !norm.is_plain() {
                return Err(CliError::Validation(
                    "estimate-lip needs the plain metric (epsilon = 1)".into(),
                ));
            }
            let breakpoint = match map.as_str() {
                "retract3" => BreakpointTarget::SeparationFifth,
                "retractN2" => BreakpointTarget::ThinnessTau { tau },
                _ => BreakpointTarget::None,
            };
            let pair_sampler = match sampler.as_str() {
                "box" => PairSampler::uniform(norm, cardinality),
                "mixed" => PairSampler::mixed(norm, cardinality, breakpoint),
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown sampler {other:?} (use box or mixed)"
                    )))
                }
            };
            let sel = SelectorOptions {
                samples,
                seed: r.seed,
            };
            let scalar = NormDescriptor::euclidean(1);
            #[allow(clippy::type_complexity)]
            let map_fn: Box<dyn Fn(&FiniteSubset) -> subsetspace::Result<FiniteSubset> + Sync + Send> =
                match map.as_str() {
                    "identity" => Box::new(|x| Ok(x.clone())),
                    "diameter" => {
                        Box::new(move |x| FiniteSubset::from_scalars(scalar, &[diameter(x)]))
                    }
                    "retract2" => {
                        if cardinality > 2 {
                            return Err(CliError::Validation(
                                "retract2 needs cardinality <= 2".into(),
                            ));
                        }
                        Box::new(retract_pair_average)
                    }
                    "retract3" => {
                        if cardinality > 3 {
                            return Err(CliError::Validation(
                                "retract3 needs cardinality <= 3".into(),
                            ));
                        }
                        Box::new(retract_3_to_2)
                    }
                    "retractN1" => Box::new(move |x| retract_n_to_1(x, &sel)),
                    "retractN2" => {
                        if !(tau > 6.0) {
                            return Err(CliError::Validation(format!(
                                "tau must exceed 6, got {tau}"
                            )));
                        }
                        Box::new(move |x| retract_n_to_2(x, tau, &sel))
                    }
                    "flow" => {
                        let opts = FlowOptions {
                            record_trajectory: false,
                            ..FlowOptions::default()
                        };
                        let n = cardinality;
                        Box::new(move |x| Ok(flow_retract(x, n, &opts)?.output))
                    }
                    other => return Err(CliError::Validation(format!("unknown map {other:?}"))),
                };
            let est = estimate_lipschitz(&map, map_fn.as_ref(), &pair_sampler, trials, r.seed)?;
            eprintln!(
                "estimate-lip {}: max ratio {} over {} trials",
                est.map, est.max_ratio, est.trials
            );
            let (ax, ay) = est.argmax.clone().expect("argmax recorded");
            emit(
                &r.out,
                &JVal::Obj(vec![
                    ("map", JVal::Str(est.map.clone())),
                    ("n", JVal::Int(cardinality as i64)),
                    ("p", p_jval(&norm)),
                    ("trials", JVal::Int(est.trials as i64)),
                    ("max_ratio", JVal::Num(est.max_ratio)),
                    (
                        "argmax",
                        JVal::Arr(vec![subset_to_jval(&ax), subset_to_jval(&ay)]),
                    ),
                    ("seed", JVal::Int(est.seed as i64)),
                ]),
            )
        }
        Commands::CheckHolder {
            trials,
            cardinality,
            sampler,
        } => {
            if trials < 1 {
                return Err(CliError::Validation("trials must be >= 1".into()));
            }
            if cardinality < 2 {
                return Err(CliError::Validation(
                    "check-holder needs cardinality >= 2".into(),
                ));
            }
            let norm = r.norm;
            if !norm.is_plain() {
                return Err(CliError::Validation(
                    "check-holder needs the plain metric (epsilon = 1)".into(),
                ));
            }
            let pair_sampler = match sampler.as_str() {
                "box" => PairSampler::uniform(norm, cardinality),
                "mixed" => PairSampler::mixed(norm, cardinality, BreakpointTarget::None),
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown sampler {other:?} (use box or mixed)"
                    )))
                }
            };
            let opts = FlowOptions {
                record_trajectory: false,
                ..FlowOptions::default()
            };
            let n = cardinality;
            let margin = check_holder(
                move |x| Ok(flow_retract(x, n, &opts)?.output),
                n,
                &pair_sampler,
                trials,
                r.seed,
            )?;
            eprintln!(
                "check-holder: worst margin {margin} over {trials} trials ({})",
                if margin >= -1e-9 { "PASS" } else { "FAIL" }
            );
            emit(
                &r.out,
                &JVal::Obj(vec![
                    ("map", JVal::Str("flow".into())),
                    ("n", JVal::Int(n as i64)),
                    ("p", p_jval(&norm)),
                    ("trials", JVal::Int(trials as i64)),
                    ("worst_margin", JVal::Num(margin)),
                    ("seed", JVal::Int(r.seed as i64)),
                ]),
            )
        }
        Commands::Fixtures { kind, n, m } => match kind.as_str() {
            "spaced-pair" => {
                let (x, y) = spaced_pair(n, m)?;
                let d = hausdorff(&x, &y)?;
                eprintln!("spaced pair n = {n}, m = {m}: d_H = {d}");
                emit(
                    &r.out,
                    &JVal::Obj(vec![
                        ("kind", JVal::Str("spaced-pair".into())),
                        ("n", JVal::Int(n as i64)),
                        ("m", JVal::Num(m)),
                        ("x", subset_to_jval(&x)),
                        ("y", subset_to_jval(&y)),
                        ("hausdorff", JVal::Num(d)),
                    ]),
                )
            }
            "bip-hexagon" => {
                let fix = bip_hexagon();
                let report = verify_bip_hexagon(&fix, 401, 0.01)?;
                eprintln!(
                    "bip hexagon: pairwise {:?} (intersecting: {}), triple intersection found: {}",
                    report.pairwise, report.pairwise_intersecting, report.triple_intersection_found
                );
                emit(
                    &r.out,
                    &JVal::Obj(vec![
                        ("kind", JVal::Str("bip-hexagon".into())),
                        ("x", subset_to_jval(&fix.x)),
                        ("y", subset_to_jval(&fix.y)),
                        ("z", subset_to_jval(&fix.z)),
                        ("radius", JVal::Num(fix.radius)),
                        (
                            "pairwise",
                            JVal::Arr(report.pairwise.iter().map(|d| JVal::Num(*d)).collect()),
                        ),
                        (
                            "pairwise_intersecting",
                            JVal::Bool(report.pairwise_intersecting),
                        ),
                        (
                            "triple_intersection_found",
                            JVal::Bool(report.triple_intersection_found),
                        ),
                    ]),
                )
            }
            other => Err(CliError::Validation(format!(
                "unknown fixture kind {other:?} (use spaced-pair or bip-hexagon)"
            ))),
        },
    }
}

fn retraction_artifact(
    r: &Resolved,
    op: &str,
    norm: &NormDescriptor,
    input: &FiniteSubset,
    output: &FiniteSubset,
    tau: Option<f64>,
) -> Result<(), CliError> {
    let hull_max = if input.len() <= 16 {
        let mut worst: f64 = 0.0;
        for p in output.points() {
            worst = worst.max(hull_residual(p, input)?);
        }
        Some(worst)
    } else {
        None
    };
    match hull_max {
        Some(worst) => eprintln!(
            "{op}: |input| = {}, |output| = {}, hull residual {worst} ({})",
            input.len(),
            output.len(),
            if worst <= 1e-8 { "PASS" } else { "FAIL" }
        ),
        None => eprintln!(
            "{op}: |input| = {}, |output| = {}, hull check skipped (cardinality > 16)",
            input.len(),
            output.len()
        ),
    }
    emit(
        &r.out,
        &JVal::Obj(vec![
            ("operation", JVal::Str(op.into())),
            ("norm", norm_jval(norm)),
            (
                "tau",
                match tau {
                    Some(v) => JVal::Num(v),
                    None => JVal::Null,
                },
            ),
            ("input", subset_to_jval(input)),
            ("output", subset_to_jval(output)),
            (
                "hull_max_residual",
                match hull_max {
                    Some(worst) => JVal::Num(worst),
                    None => JVal::Null,
                },
            ),
        ]),
    )
}

#[allow(clippy::too_many_arguments)]
fn path_artifact(
    r: &Resolved,
    op: &str,
    norm: &NormDescriptor,
    x: &FiniteSubset,
    y: &FiniteSubset,
    path: &SubsetPath,
    grid: usize,
    csv: Option<PathBuf>,
    bound: f64,
    relation: Option<Vec<(usize, usize)>>,
) -> Result<(), CliError> {
    if grid < 2 {
        return Err(CliError::Validation("grid must be >= 2".into()));
    }
    let d = hausdorff(x, y)?;
    let profile = if d > r.tol {
        path_speed_profile(path, grid)?
    } else {
        0.0
    };
    eprintln!(
        "{op}: d_H = {d}, speed profile {profile} <= {bound}: {}",
        if profile <= bound + 1e-6 {
            "PASS"
        } else {
            "FAIL"
        }
    );
    if let Some(p) = csv.or(r.csv.clone()) {
        write_text(&p, &path_csv(path, grid)?)?;
    }
    let mut fields = vec![
        ("operation", JVal::Str(op.into())),
        ("norm", norm_jval(norm)),
        ("hausdorff", JVal::Num(d)),
        ("speed_profile", JVal::Num(profile)),
        (
            "cardinality_bound",
            JVal::Int(path.cardinality_bound() as i64),
        ),
        ("grid", JVal::Int(grid as i64)),
    ];
    if let Some(pairs) = relation {
        fields.push(("relation_pairs", pairs_to_jval(&pairs)));
    }
    emit(&r.out, &JVal::Obj(fields))
}
