//! Argument parsing and dispatch for the `tdiqkd` binary.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use tdiqkd_core::game::{eta_from_p, run_montecarlo, sample_classical_strategies};
use tdiqkd_core::gates::circuit_fidelities;
use tdiqkd_core::ks::{builtin_rayset, colouring_search, ortho_structure, BUILTIN_SETS};
use tdiqkd_core::protocol::{run_session_over, RateFn, Sizing, TransportKind};
use tdiqkd_core::rng::{substream, Stream};
use tdiqkd_core::security::{
    bb84_rate, entropies, key_rate, mutual_information, mutual_information_printed,
};
use tdiqkd_core::{ColouringResult, NoiseSpec, RaySet, SessionConfig, SessionOutcome, Spectrum9};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ABORT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tdiqkd",
    version,
    about = "Ternary device-independent QKD simulator"
)]
pub struct Cli {
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: from the --out extension, else text]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    JsonLines,
}

impl Cli {
    /// The explicit --format, or one implied by a `.csv` / `.jsonl` --out path.
    pub fn resolved_format(&self) -> Format {
        self.format.unwrap_or_else(|| {
            match self
                .out
                .as_ref()
                .and_then(|p| p.extension())
                .and_then(|e| e.to_str())
            {
                Some("csv") => Format::Csv,
                Some("jsonl") => Format::JsonLines,
                _ => Format::Text,
            }
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a full key-distribution session between Alice and Bob
    RunSession(RunSession),
    /// Key rate, BB84 rate and mutual information over an η grid
    KeyrateCurve(KeyrateCurve),
    /// Entropy report for a Bell-diagonal spectrum
    RateBound(RateBound),
    /// Orthogonality structure and colourability of a ray set
    KsVerify(KsVerify),
    /// Fidelity of the Bell-preparation circuit for all nine inputs
    CircuitCheck,
    /// Play the colouring game and report its statistics
    GameMontecarlo(GameMontecarlo),
}

#[derive(Debug, Args)]
pub struct RunSession {
    #[arg(long, default_value_t = 9000)]
    pub rounds: u64,
    /// Depolarizing probability p at the source
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eta_tol: f64,
    /// Fraction of kept rounds sacrificed for testing
    #[arg(long, default_value_t = 0.2)]
    pub gamma: f64,
    #[arg(long, default_value_t = 4)]
    pub block_size: usize,
    #[arg(long, default_value = "memory")]
    pub transport: TransportKind,
    /// Write the session transcript to this file
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub epsilon_sec: f64,
    /// binary-entropy or ternary-key-rate
    #[arg(long, default_value = "binary-entropy")]
    pub rate_fn: RateFn,
    /// Finite-size constant c in c·√n
    #[arg(long, default_value_t = 0.0)]
    pub finite_c: f64,
    /// Builtin name or ray file
    #[arg(long, default_value = "peres33")]
    pub set: String,
}

#[derive(Debug, Args)]
pub struct KeyrateCurve {
    /// Noise-family parameters, one mutual-information column each
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1.5",
        allow_hyphen_values = true
    )]
    pub r: Vec<f64>,
    /// start:stop:step
    #[arg(long, default_value = "0:0.5:0.005")]
    pub grid: String,
}

#[derive(Debug, Args)]
pub struct RateBound {
    /// Nine comma-separated eigenvalues
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct KsVerify {
    /// Builtin name or ray file
    #[arg(long, default_value = "peres33")]
    pub set: String,
}

#[derive(Debug, Args)]
pub struct GameMontecarlo {
    #[arg(long, default_value_t = 10_000)]
    pub rounds: u64,
    /// Depolarizing probability p at the source
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value = "peres33")]
    pub set: String,
    /// Also sample this many random classical strategies
    #[arg(long, default_value_t = 0)]
    pub classical_trials: u64,
}

/// A rendered result: either one record of named fields or a table.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Record(Vec<(String, Value)>),
    Table {
        header: Vec<String>,
        rows: Vec<Vec<Value>>,
    },
}

struct Done {
    report: Report,
    code: i32,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "NaN".into(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn field(k: &str, v: impl Into<Value>) -> (String, Value) {
    (k.to_string(), v.into())
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match (self, format) {
            (Report::Record(fields), Format::Text) => {
                let w = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in fields {
                    s += &format!("{k:<w$}  {}\n", cell(v));
                }
            }
            (Report::Record(fields), Format::Csv) => {
                s += "key,value\n";
                for (k, v) in fields {
                    s += &format!("{k},{}\n", cell(v));
                }
            }
            (Report::Record(fields), Format::JsonLines) => {
                let m: Map<String, Value> = fields.iter().cloned().collect();
                s += &format!("{}\n", Value::Object(m));
            }
            (Report::Table { header, rows }, Format::Text) => {
                s += &header.join("\t");
                s += "\n";
                for r in rows {
                    s += &r.iter().map(cell).collect::<Vec<_>>().join("\t");
                    s += "\n";
                }
            }
            (Report::Table { header, rows }, Format::Csv) => {
                s += &header.join(",");
                s += "\n";
                for r in rows {
                    s += &r.iter().map(cell).collect::<Vec<_>>().join(",");
                    s += "\n";
                }
            }
            (Report::Table { header, rows }, Format::JsonLines) => {
                for r in rows {
                    let m: Map<String, Value> =
                        header.iter().cloned().zip(r.iter().cloned()).collect();
                    s += &format!("{}\n", Value::Object(m));
                }
            }
        }
        s
    }
}

fn seed_line(seed: u64, format: Format) -> String {
    match format {
        Format::Text => format!("seed  {seed}\n"),
        Format::Csv => format!("# seed={seed}\n"),
        Format::JsonLines => format!("{{\"seed\":{seed}}}\n"),
    }
}

/// Parse `start:stop:step` into the points start + i·step ≤ stop.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("grid `{spec}` is not start:stop:step"));
    };
    let p = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| format!("grid value `{s}`: {e}"))
    };
    let (a, b, step) = (p(a)?, p(b)?, p(step)?);
    let valid = a.is_finite() && b.is_finite() && step > 0.0 && b >= a;
    if !valid {
        return Err(format!("grid `{spec}` needs step > 0 and stop >= start"));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * step).collect())
}

fn load_set(name: &str) -> Result<RaySet, String> {
    if BUILTIN_SETS.contains(&name) {
        return builtin_rayset(name).map_err(|e| e.to_string());
    }
    RaySet::load(name).map_err(|e| format!("{name}: {e}"))
}

fn run_session_cmd(a: &RunSession, seed: u64) -> Result<Done, String> {
    let mut cfg = SessionConfig::new(a.rounds, seed);
    cfg.noise = NoiseSpec::from_p(a.noise).map_err(|e| e.to_string())?;
    cfg.eta_tolerance = a.eta_tol;
    cfg.gamma = a.gamma;
    cfg.block_size = a.block_size;
    cfg.epsilon_sec = a.epsilon_sec;
    cfg.sizing = Sizing {
        rate_fn: a.rate_fn,
        c: a.finite_c,
    };
    cfg.ray_set = load_set(&a.set)?;
    let t = run_session_over(&cfg, a.transport).map_err(|e| e.to_string())?;
    if let Some(path) = &a.transcript {
        fs::write(path, t.to_text()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let raw_errors = t.raw_key_a.distance(&t.raw_key_b).unwrap_or(0);
    let report = Report::Record(vec![
        field("outcome", t.outcome.to_string()),
        field("rounds", a.rounds),
        field("kept", t.kept_indices.len()),
        field("discarded", t.discarded()),
        field("tested", t.test_indices.len()),
        field("failures", t.failures),
        field("observed_failure", num(t.observed_failure)),
        field("raw_key_bits", t.raw_key_a.len()),
        field("raw_key_errors", raw_errors),
        field("corrections", t.corrections.len()),
        field("leakage_bits", t.leakage_bits),
        field("check_bits", t.check_bits),
        field("output_length", t.output_length),
        field(
            "sizing",
            format!("{}:{}", cfg.sizing.rate_fn.name(), cfg.sizing.marker()),
        ),
        field("keys_equal", t.final_key_a == t.final_key_b),
        field("final_key", t.final_key_a.to_hex()),
    ]);
    let code = if t.outcome == SessionOutcome::Completed {
        EXIT_OK
    } else {
        EXIT_ABORT
    };
    Ok(Done { report, code })
}

fn keyrate_curve(a: &KeyrateCurve) -> Result<Done, String> {
    let grid = parse_grid(&a.grid)?;
    let mut header = vec!["eta".to_string(), "key_rate".into(), "bb84_rate".into()];
    header.extend(a.r.iter().map(|r| format!("mutual_info_r{r}")));
    let rows = grid
        .iter()
        .map(|&eta| {
            let mut row = vec![
                num(eta),
                key_rate(eta).map_or(Value::Null, num),
                bb84_rate(eta).map_or(Value::Null, num),
            ];
            row.extend(
                a.r.iter()
                    .map(|&r| mutual_information_printed(eta, r).map_or(Value::Null, num)),
            );
            row
        })
        .collect();
    Ok(Done {
        report: Report::Table { header, rows },
        code: EXIT_OK,
    })
}

fn rate_bound(a: &RateBound) -> Result<Done, String> {
    let lambda: [f64; 9] = a
        .lambdas
        .as_slice()
        .try_into()
        .map_err(|_| format!("--lambdas needs 9 values, got {}", a.lambdas.len()))?;
    let spec = Spectrum9::new(lambda).map_err(|e| e.to_string())?;
    let r = entropies(&spec);
    let mi = mutual_information(&spec);
    let report = Report::Record(vec![
        field("h_XE", num(r.h_xe)),
        field("h_E", num(r.h_e)),
        field("h_XY", num(r.h_xy)),
        field("h_Y", num(r.h_y)),
        field("rate_lb", num(r.rate_lb)),
        field("trace_XY", num(r.trace_xy)),
        field("trace_XY_is_one", (r.trace_xy - 1.0).abs() < 1e-12),
        field("mutual_information", num(mi)),
        field("mutual_information_above_1", mi > 1.0 + 1e-12),
    ]);
    Ok(Done {
        report,
        code: EXIT_OK,
    })
}

fn ks_verify(a: &KsVerify) -> Result<Done, String> {
    let set = load_set(&a.set)?;
    let st = ortho_structure(&set);
    let mut fields = vec![
        field("set", set.name()),
        field("rays", set.len()),
        field("pairs", st.pairs.len()),
        field("triples", st.triples.len()),
    ];
    match colouring_search(&set) {
        ColouringResult::Uncolourable { nodes_explored } => {
            fields.push(field("verdict", "Uncolourable"));
            fields.push(field("nodes_explored", nodes_explored));
        }
        ColouringResult::Colourable { assignment } => {
            let ones: String = assignment
                .iter()
                .map(|&c| if c { '1' } else { '0' })
                .collect();
            fields.push(field("verdict", "Colourable"));
            fields.push(field("assignment", ones));
            fields.push(field("violations", st.violations(&assignment)));
        }
    }
    Ok(Done {
        report: Report::Record(fields),
        code: EXIT_OK,
    })
}

fn circuit_check() -> Result<Done, String> {
    let f = circuit_fidelities();
    let ok = f.iter().all(|(_, f)| *f >= 1.0 - 1e-12);
    let rows = f
        .iter()
        .map(|(j, f)| {
            vec![
                Value::from(j.get()),
                Value::from(j.shift()),
                Value::from(j.phase()),
                num(*f),
            ]
        })
        .collect();
    Ok(Done {
        report: Report::Table {
            header: vec!["j".into(), "u".into(), "x".into(), "fidelity".into()],
            rows,
        },
        code: if ok { EXIT_OK } else { EXIT_ERROR },
    })
}

fn game_montecarlo(a: &GameMontecarlo, seed: u64) -> Result<Done, String> {
    let set = load_set(&a.set)?;
    let noise = NoiseSpec::from_p(a.noise).map_err(|e| e.to_string())?;
    let s = run_montecarlo(&set, noise, a.rounds, seed).map_err(|e| e.to_string())?;
    let mut fields = vec![
        field("set", set.name()),
        field("rounds", s.rounds),
        field("kept", s.kept),
        field("keep_rate", num(s.keep_rate())),
        field("match_rate", num(s.match_rate())),
        field("eta_estimate", num(s.eta_estimate())),
        field(
            "eta_analytic",
            num(eta_from_p(a.noise).map_err(|e| e.to_string())?),
        ),
        field("mismatched_kept", s.mismatched_kept()),
    ];
    if a.classical_trials > 0 {
        let c =
            sample_classical_strategies(a.classical_trials, &mut substream(seed, Stream::Alice));
        fields.push(field("classical_trials", c.trials));
        fields.push(field("classical_win_rate", num(c.rate())));
    }
    Ok(Done {
        report: Report::Record(fields),
        code: EXIT_OK,
    })
}

fn usage_help(args: &[String]) -> String {
    let mut cmd = Cli::command();
    let sub = args
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a).map(|s| s.get_name().to_string()));
    match sub {
        Some(name) => cmd
            .find_subcommand_mut(&name)
            .expect("found above")
            .render_help()
            .to_string(),
        None => cmd.render_help().to_string(),
    }
}

/// Parse `args` (program name first), run the command and return the exit
/// code. Results go to `out` (or the `--out` file), diagnostics to `err`.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = write!(err, "{e}\n{}", usage_help(&args));
            return EXIT_ERROR;
        }
    };
    let result = match &cli.command {
        Command::RunSession(a) => run_session_cmd(a, cli.seed),
        Command::KeyrateCurve(a) => keyrate_curve(a),
        Command::RateBound(a) => rate_bound(a),
        Command::KsVerify(a) => ks_verify(a),
        Command::CircuitCheck => circuit_check(),
        Command::GameMontecarlo(a) => game_montecarlo(a, cli.seed),
    };
    let format = cli.resolved_format();
    let done = match result {
        Ok(d) => d,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = write!(out, "{}", seed_line(cli.seed, format));
            return EXIT_ERROR;
        }
    };
    let body = done.report.render(format);
    let written = match &cli.out {
        Some(path) => fs::write(path, &body)
            .map(|_| format!("{}wrote {}\n", seed_line(cli.seed, format), path.display()))
            .map_err(|e| format!("{}: {e}", path.display())),
        None => Ok(format!("{}{body}", seed_line(cli.seed, format))),
    };
    match written {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            done.code
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}
