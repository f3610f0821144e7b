//! `bell-discord` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error (unphysical state,
//! level out of range, ...), 3 when `verify-oracle` finds a gap above its threshold.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use bell_discord::decoherence::{self, ChannelKind, ChannelTrajectory};
use bell_discord::isosurface::{self, ScalarFieldId, TriangleMesh};
use bell_discord::measures::{self, all_measures};
use bell_discord::oracle::{self, DEFAULT_GRID};
use bell_discord::state::{self, sample_physical, CLASSICAL_TOL};
use bell_discord::{fmt_f64, CorrelationVector, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

/// Largest oracle gap accepted by `verify-oracle`.
const ORACLE_GAP_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "bell-discord",
    version,
    about = "Entanglement and discord of Bell-diagonal two-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutual information, classical correlations, discord, concurrence and EoF.
    Measures {
        #[command(flatten)]
        state: StateArg,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Physical / separable / classical flags and the dominant Bell vertex.
    Classify {
        #[command(flatten)]
        state: StateArg,
        /// Tolerance for "on a coordinate axis".
        #[arg(long, default_value_t = CLASSICAL_TOL)]
        tol: f64,
    },
    /// Exact flip-channel trajectory with its transition events.
    Trajectory {
        /// Initial correlation vector, e.g. 1,-0.3,0.3
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        initial: CorrelationVector,
        #[arg(long, value_parser = parse_channel, default_value = "phase")]
        channel: ChannelKind,
        /// Decay rate: the decaying components scale as exp(-gamma t).
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Level surface of a measure, clipped to the state tetrahedron.
    Isosurface {
        #[arg(long, value_parser = parse_field, default_value = "discord")]
        field: ScalarFieldId,
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
        #[arg(long, default_value_t = isosurface::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, default_value_t = isosurface::DEFAULT_REFINE_TOL)]
        refine_tol: f64,
        #[arg(long)]
        out: PathBuf,
        /// Mesh format; defaults to the extension of --out, else obj.
        #[arg(long, value_enum)]
        format: Option<MeshFormat>,
    },
    /// Compare the closed-form conditional entropy with direct numerical minimization.
    VerifyOracle {
        #[command(flatten)]
        states: OracleStates,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of Fibonacci-sphere directions in the coarse search.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Skip the golden-section refinement.
        #[arg(long)]
        no_refine: bool,
    },
}

#[derive(Args)]
struct StateArg {
    /// Correlation vector c1,c2,c3 (comma-separated, no spaces).
    #[arg(long = "c", value_parser = parse_triple, allow_hyphen_values = true)]
    c: CorrelationVector,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OracleStates {
    #[arg(long = "c", value_parser = parse_triple, allow_hyphen_values = true)]
    c: Option<CorrelationVector>,
    /// Number of random physical states to check.
    #[arg(long)]
    random: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeshFormat {
    Obj,
    Csv,
}

fn parse_triple(s: &str) -> Result<CorrelationVector, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut c = [0.0; 3];
    for (dst, p) in c.iter_mut().zip(parts) {
        if p.is_empty() || p.trim() != p {
            return Err(format!("malformed component {p:?}"));
        }
        *dst = p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
        if !dst.is_finite() {
            return Err(format!("non-finite component {p:?}"));
        }
    }
    Ok(CorrelationVector::from_array(c))
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_field(s: &str) -> Result<ScalarFieldId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Domain(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Io { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

/// JSON number carrying 17 significant digits; non-finite values become null.
fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt_f64(x).parse().expect("formatted f64 is a JSON number"))
    } else {
        Value::Null
    }
}

fn triple_fields(map: &mut Map<String, Value>, c: CorrelationVector) {
    map.insert("c1".into(), num(c.c1));
    map.insert("c2".into(), num(c.c2));
    map.insert("c3".into(), num(c.c3));
}

fn classification_fields(map: &mut Map<String, Value>, c: CorrelationVector, tol: f64) {
    let k = state::classify(c, tol);
    map.insert("physical".into(), json!(k.physical));
    map.insert("separable".into(), json!(k.separable));
    map.insert("classical_state".into(), json!(k.classical));
    map.insert(
        "dominant_vertex".into(),
        json!([k.dominant_vertex.a, k.dominant_vertex.b]),
    );
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

const MEASURE_COLUMNS: [&str; 5] = ["mutual_info", "classical", "discord", "concurrence", "eof"];

fn cmd_measures(c: CorrelationVector, format: TableFormat) -> Result<String, Failure> {
    let m = all_measures(c)?;
    let values = [m.mutual_info, m.classical, m.discord, m.concurrence, m.eof];
    let k = state::classify(c, CLASSICAL_TOL);
    Ok(match format {
        TableFormat::Json => {
            let mut map = Map::new();
            triple_fields(&mut map, c);
            for (key, v) in MEASURE_COLUMNS.iter().zip(values) {
                map.insert((*key).into(), num(v));
            }
            map.insert("c_max".into(), num(m.c_max));
            classification_fields(&mut map, c, CLASSICAL_TOL);
            pretty(&Value::Object(map)) + "\n"
        }
        TableFormat::Csv => {
            let mut out = String::from(
                "c1,c2,c3,mutual_info,classical,discord,concurrence,eof,c_max,physical,separable,classical_state,dominant_vertex\n",
            );
            let nums: Vec<String> = c
                .to_array()
                .into_iter()
                .chain(values)
                .chain([m.c_max])
                .map(fmt_f64)
                .collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                nums.join(","),
                k.physical,
                k.separable,
                k.classical,
                k.dominant_vertex
            );
            out
        }
    })
}

fn cmd_classify(c: CorrelationVector, tol: f64) -> Result<String, Failure> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Failure::Usage(format!("tolerance {tol} must be nonnegative")));
    }
    let mut map = Map::new();
    triple_fields(&mut map, c);
    classification_fields(&mut map, c, tol);
    Ok(pretty(&Value::Object(map)) + "\n")
}

fn trajectory_output(traj: &ChannelTrajectory, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut out = String::from("t,c1,c2,c3,I,C,D,concurrence,eof\n");
            for s in &traj.samples {
                let m = &s.measures;
                let row = [
                    s.t,
                    s.c.c1,
                    s.c.c2,
                    s.c.c3,
                    m.mutual_info,
                    m.classical,
                    m.discord,
                    m.concurrence,
                    m.eof,
                ]
                .map(fmt_f64);
                let _ = writeln!(out, "{}", row.join(","));
            }
            out.push_str("\nevent,t,c1,c2,c3\n");
            for e in &traj.events {
                let row = [e.t, e.c_at_event.c1, e.c_at_event.c2, e.c_at_event.c3].map(fmt_f64);
                let _ = writeln!(out, "{},{}", e.kind, row.join(","));
            }
            out
        }
        TableFormat::Json => {
            let samples: Vec<Value> = traj
                .samples
                .iter()
                .map(|s| {
                    let mut map = Map::new();
                    map.insert("t".into(), num(s.t));
                    triple_fields(&mut map, s.c);
                    let m = &s.measures;
                    let values = [m.mutual_info, m.classical, m.discord, m.concurrence, m.eof];
                    for (key, v) in MEASURE_COLUMNS.iter().zip(values) {
                        map.insert((*key).into(), num(v));
                    }
                    map.insert("c_max".into(), num(m.c_max));
                    Value::Object(map)
                })
                .collect();
            let events: Vec<Value> = traj
                .events
                .iter()
                .map(|e| {
                    let mut map = Map::new();
                    map.insert("kind".into(), json!(e.kind.to_string()));
                    map.insert("t".into(), num(e.t));
                    triple_fields(&mut map, e.c_at_event);
                    Value::Object(map)
                })
                .collect();
            let v = json!({
                "channel": traj.kind.to_string(),
                "gamma": num(traj.gamma),
                "samples": samples,
                "events": events,
                "reaches_axis": traj.reaches_axis,
            });
            pretty(&v) + "\n"
        }
    }
}

fn cmd_isosurface(
    field: ScalarFieldId,
    level: f64,
    resolution: usize,
    refine_tol: f64,
    out: PathBuf,
    format: Option<MeshFormat>,
) -> Result<String, Failure> {
    let format = format.unwrap_or_else(|| match out.extension().and_then(|e| e.to_str()) {
        Some("csv") => MeshFormat::Csv,
        _ => MeshFormat::Obj,
    });
    let mesh: TriangleMesh = isosurface::extract_level_surface(field, level, resolution, refine_tol)?;
    match format {
        MeshFormat::Obj => isosurface::export_obj(&mesh, &out)?,
        MeshFormat::Csv => isosurface::export_csv(&mesh, &out)?,
    }
    let v = json!({
        "field": field.to_string(),
        "level": num(level),
        "resolution": resolution,
        "vertices": mesh.vertices.len(),
        "triangles": mesh.triangles.len(),
        "clipped_vertices": mesh.clipped_count(),
        "max_residual": num(mesh.max_residual()),
        "components": mesh.connected_components(),
        "out": out.display().to_string(),
    });
    Ok(pretty(&v) + "\n")
}

fn cmd_verify_oracle(states: OracleStates, seed: u64, grid: usize, refine: bool) -> Result<String, Failure> {
    let cs: Vec<CorrelationVector> = match (states.c, states.random) {
        (Some(c), None) => vec![c],
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| sample_physical(&mut rng)).collect()
        }
        _ => return Err(Failure::Usage("give exactly one of --c or --random".into())),
    };
    let mut results = Vec::with_capacity(cs.len());
    let mut max_gap: f64 = 0.0;
    for c in cs {
        let c = c.ensure_physical()?;
        let closed_form = measures::binary_entropy((1.0 + c.c_max()) / 2.0)?;
        let found = oracle::minimize_conditional_entropy(c, grid, refine)?;
        let gap = (found.min_entropy - closed_form).abs();
        max_gap = max_gap.max(gap);
        let mut map = Map::new();
        triple_fields(&mut map, c);
        map.insert("closed_form".into(), num(closed_form));
        map.insert("oracle".into(), num(found.min_entropy));
        map.insert("gap".into(), num(gap));
        map.insert("evaluations".into(), json!(found.evaluations));
        results.push(Value::Object(map));
    }
    let pass = max_gap <= ORACLE_GAP_TOL;
    let report = pretty(&json!({
        "results": results,
        "max_gap": num(max_gap),
        "tolerance": num(ORACLE_GAP_TOL),
        "pass": pass,
    })) + "\n";
    if pass {
        Ok(report)
    } else {
        Err(Failure::Verification(report))
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Measures { state, format } => cmd_measures(state.c, format),
        Command::Classify { state, tol } => cmd_classify(state.c, tol),
        Command::Trajectory {
            initial,
            channel,
            gamma,
            t_max,
            steps,
            format,
        } => {
            let traj = decoherence::simulate(initial, channel, gamma, t_max, steps)?;
            Ok(trajectory_output(&traj, format))
        }
        Command::Isosurface {
            field,
            level,
            resolution,
            refine_tol,
            out,
            format,
        } => cmd_isosurface(field, level, resolution, refine_tol, out, format),
        Command::VerifyOracle {
            states,
            seed,
            grid,
            no_refine,
        } => cmd_verify_oracle(states, seed, grid, !no_refine),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(report)) => {
            print!("{report}");
            eprintln!("error: oracle gap exceeds {ORACLE_GAP_TOL:e}");
            ExitCode::from(3)
        }
    }
}
