//! `higgs5`: JSON in, JSON or CSV out.
//!
//! Exit codes: 0 on success, 1 when the input is well formed but rejected
//! (unstable bundle, failed verification, ...), 2 on malformed input.

mod commands;

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::{dispatch, parse_request, sweep_command, Answer, Failure, Outcome, Settings};

#[derive(Parser, Debug)]
#[command(name = "higgs5", version, about = "Exact computations with rank-2 parabolic Higgs bundles on the five-punctured line")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input JSON file, or `-` for stdin.
    #[arg(long, global = true, env = "HIGGS5_INPUT")]
    input: Option<String>,

    /// Seed for sampled checks.
    #[arg(long, global = true, env = "HIGGS5_SEED", default_value_t = 0)]
    seed: u64,

    /// Number of samples for sampled checks.
    #[arg(long, global = true, env = "HIGGS5_SAMPLES", default_value_t = 100)]
    samples: usize,

    /// Sweep grid `h1min:h1max:steps,h2min:h2max:steps`; `steps` is the number of
    /// points per axis, endpoints included.
    #[arg(long, global = true, env = "HIGGS5_GRID", allow_hyphen_values = true)]
    grid: Option<String>,

    /// Worker threads for sweeps and verification (0 = all cores).
    #[arg(long, global = true, env = "HIGGS5_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Stability of a parabolic bundle: {"bundle", "weights"?}.
    Stability,
    /// Hitchin map of a field: {"higgs"} or {"pencil": {"lambda","t","u","v","c1","c2"}}.
    HiggsDet,
    /// Basis of the Higgs fields on a bundle: {"bundle"}.
    HiggsSpace,
    /// Elementary transformation: {"mask"} with {"higgs"}, {"pencil"}, {"bundle"} or {"connection"}.
    Elem,
    /// Special lines through a stable bundle: {"bundle"}.
    Lines,
    /// Fiber class of a field ({"higgs"}) or spectral curve of a point ({"lambda","t","h1","h2"}).
    Fiber,
    /// Nilpotent stratum and C*-limit: {"higgs"}.
    Nilpotent,
    /// Limit of c * connection as c -> 0: {"connection"} or {"family": {...}}, with "weights"?.
    Limit,
    /// CSV h1,h2,rho,status over the grid; payload {"lambda","t"} is optional.
    Sweep,
    /// Re-derive the checkable claims; payload {"lambda","t"} is optional.
    VerifyPaper,
    /// Generic request {"command", "payload"}.
    Run,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Stability => "stability",
            Command::HiggsDet => "higgs-det",
            Command::HiggsSpace => "higgs-space",
            Command::Elem => "elem",
            Command::Lines => "lines",
            Command::Fiber => "fiber",
            Command::Nilpotent => "nilpotent",
            Command::Limit => "limit",
            Command::Sweep => "sweep",
            Command::VerifyPaper => "verify-paper",
            Command::Run => "run",
        }
    }

    fn payload_optional(self) -> bool {
        matches!(self, Command::Sweep | Command::VerifyPaper)
    }
}

fn read_input(path: Option<&str>, optional: bool) -> Outcome<Value> {
    let text = match path {
        None if optional => return Ok(json!({})),
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Malformed(format!("stdin: {e}")))?;
            s
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Malformed(format!("{p}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("invalid JSON: {e}")))
}

fn report(status: &str, result: Value, diagnostics: Vec<String>) -> String {
    let v = json!({"status": status, "result": result, "diagnostics": diagnostics});
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn execute(cli: &Cli) -> Outcome<(String, bool)> {
    let settings = Settings { seed: cli.seed, samples: cli.samples, grid: cli.grid.clone() };
    let input = read_input(cli.input.as_deref(), cli.command.payload_optional())?;
    let (name, payload) = match cli.command {
        Command::Run => parse_request(&input)?,
        c => (c.name().to_string(), input),
    };
    if cli.command == Command::Sweep {
        return Ok((sweep_command(&payload, &settings)?, true));
    }
    let Answer { ok, result, diagnostics } = dispatch(&name, &payload, &settings)?;
    let status = if ok { "ok" } else { "error" };
    Ok((report(status, result, diagnostics), ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    let (text, code) = match execute(&cli) {
        Ok((text, true)) => (text, 0),
        Ok((text, false)) => (text, 1),
        Err(f) => (report("error", Value::Null, vec![f.message().to_string()]), f.exit_code()),
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
