//! `btsim`: structure-preserving finite-volume runs of a nonlocal
//! cross-diffusion population model, with entropy diagnostics and the
//! experiment drivers wired to CSV/JSON artifacts.

use btsim_cli::commands::{self, Ctx};
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
usage: btsim <command> [--config <path>] [--out <dir>]

commands:
  simulate        run a configured model, streaming states and diagnostics
  decay           exponential relative-entropy decay (needs decay.mu)
  decay-diagonal  monotone decay for diagonal competition, no density floor
  sweep-eps       Darcy-limit sweep over sweep.eps_list
  stability       lockstep perturbation growth (needs stability.delta)
  boundedness     sup-norm cap check
  operator-check  elliptic operator identity table (no config needed)
  bench           operator timing CSV on stdout (no config needed)

--config is required for every command except operator-check and bench.
--out is the artifact directory (default ./out).

exit codes: 0 all checks passed, 1 a check failed or the run errored,
2 a theorem hypothesis was violated mid-run, 64 usage error.
";

struct Invocation {
    command: String,
    ctx: Ctx,
}

fn parse_args(args: &[String]) -> Result<Invocation, String> {
    if args.is_empty() {
        return Err("missing command".to_string());
    }
    let command = args[0].clone();
    let mut config: Option<PathBuf> = None;
    let mut out: Option<PathBuf> = None;
    let mut k = 1;
    while k < args.len() {
        match args[k].as_str() {
            "--config" => {
                k += 1;
                let v = args.get(k).ok_or("--config needs a path")?;
                config = Some(PathBuf::from(v));
            }
            "--out" => {
                k += 1;
                let v = args.get(k).ok_or("--out needs a directory")?;
                out = Some(PathBuf::from(v));
            }
            other => return Err(format!("unknown argument `{other}`")),
        }
        k += 1;
    }

    let needs_config = !matches!(command.as_str(), "operator-check" | "bench");
    if needs_config && config.is_none() {
        return Err(format!("the {command} command needs --config <path>"));
    }
    Ok(Invocation {
        command,
        ctx: Ctx {
            config,
            out: out.unwrap_or_else(|| PathBuf::from("./out")),
        },
    })
}

fn run(inv: &Invocation) -> anyhow::Result<i32> {
    match inv.command.as_str() {
        "simulate" => commands::simulate_cmd(&inv.ctx),
        "decay" => commands::decay_cmd(&inv.ctx),
        "decay-diagonal" => commands::decay_diagonal_cmd(&inv.ctx),
        "sweep-eps" => commands::sweep_eps_cmd(&inv.ctx),
        "stability" => commands::stability_cmd(&inv.ctx),
        "boundedness" => commands::boundedness_cmd(&inv.ctx),
        "operator-check" => commands::operator_check_cmd(&inv.ctx),
        "bench" => commands::bench_cmd(&inv.ctx),
        other => {
            anyhow::bail!("unknown command `{other}`")
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let inv = match parse_args(&args) {
        Ok(inv) => inv,
        Err(msg) => {
            eprintln!("error: {msg}\n\n{USAGE}");
            return ExitCode::from(64);
        }
    };
    if !matches!(
        inv.command.as_str(),
        "simulate"
            | "decay"
            | "decay-diagonal"
            | "sweep-eps"
            | "stability"
            | "boundedness"
            | "operator-check"
            | "bench"
    ) {
        eprintln!("error: unknown command `{}`\n\n{USAGE}", inv.command);
        return ExitCode::from(64);
    }

    match run(&inv) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            let hypothesis = err
                .downcast_ref::<btsim_core::Error>()
                .is_some_and(|e| matches!(e, btsim_core::Error::HypothesisViolated { .. }));
            if hypothesis {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
