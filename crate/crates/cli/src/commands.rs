//! Subcommand implementations. Each returns the process exit code:
//! 0 when every verdict passes, 1 when any fails. Solver errors propagate
//! as `anyhow` errors; `main` maps hypothesis violations to exit 2.

use crate::config::RunConfig;
use crate::output::{
    fmt_float, DiagnosticsCsv, Manifest, StatesCsv, Verdict, write_diagnostics_csv,
    write_series_csv,
};
use anyhow::{bail, Context, Result};
use btsim_core::brinkman::{operator_identity_suite, BrinkmanOperator};
use btsim_core::dynamics::simulate;
use btsim_core::entropy::DiagnosticsRecord;
use btsim_core::{experiments, green, Grid1D};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct Ctx {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

impl Ctx {
    fn load_config(&self) -> Result<RunConfig> {
        let path = self
            .config
            .as_ref()
            .expect("dispatch enforces --config where required");
        RunConfig::load(path)
    }

    fn prepare_out(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out)
            .with_context(|| format!("creating output directory {}", self.out.display()))?;
        Ok(&self.out)
    }
}

fn emit_verdicts(verdicts: &[Verdict]) -> i32 {
    let mut code = 0;
    for v in verdicts {
        println!("{}", v.line());
        if !v.pass {
            code = 1;
        }
    }
    code
}

fn finish(
    ctx: &Ctx,
    command: &'static str,
    echo: Vec<(String, String)>,
    steps: u64,
    started: Instant,
    final_diagnostics: Option<DiagnosticsRecord>,
    verdicts: Vec<Verdict>,
) -> Result<i32> {
    let code = emit_verdicts(&verdicts);
    let manifest = Manifest {
        command,
        config_echo: echo,
        steps,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        final_diagnostics,
        verdicts,
    };
    manifest.write(&ctx.out.join("manifest.json"))?;
    Ok(code)
}

pub fn simulate_cmd(ctx: &Ctx) -> Result<i32> {
    let started = Instant::now();
    let cfg = ctx.load_config()?;
    let out = ctx.prepare_out()?;
    let spec = cfg.spec();
    let n = cfg.params.n();

    let mut states = StatesCsv::create(&out.join("states.csv"), n)?;
    let mut diagnostics = DiagnosticsCsv::create(&out.join("diagnostics.csv"), n)?;
    let mut last: Option<DiagnosticsRecord> = None;
    let mut io_error: Option<anyhow::Error> = None;
    let run = simulate(&spec, |state, rec| {
        let wrote = states
            .append(&cfg.grid, state)
            .and_then(|_| diagnostics.append(rec))
            // Flushing per output keeps partial trajectories on abort.
            .and_then(|_| states.flush())
            .and_then(|_| diagnostics.flush());
        if let Err(e) = wrote {
            io_error = Some(e);
            return Err(btsim_core::Error::InvalidExperiment {
                reason: "output sink failed",
            });
        }
        last = Some(rec.clone());
        Ok(())
    });
    if let Some(e) = io_error {
        return Err(e);
    }
    let stats = run?;

    eprintln!(
        "simulate: {} steps, {} outputs, t_final = {}",
        stats.steps,
        stats.outputs,
        fmt_float(spec.t_final)
    );
    finish(ctx, "simulate", cfg.echo, stats.steps, started, last, Vec::new())
}

pub fn decay_cmd(ctx: &Ctx) -> Result<i32> {
    let started = Instant::now();
    let cfg = ctx.load_config()?;
    let out = ctx.prepare_out()?;
    let mu = match cfg.mu {
        Some(mu) => mu,
        None => bail!("the decay command needs `decay.mu` in the config"),
    };
    let report = experiments::run_decay(&cfg.spec(), mu)?;

    write_diagnostics_csv(&out.join("diagnostics.csv"), cfg.params.n(), &report.records)?;
    let series: Vec<(f64, f64)> = report
        .times
        .iter()
        .zip(&report.h1_rel)
        .map(|(&t, &h)| (t, h))
        .collect();
    write_series_csv(&out.join("decay.csv"), ("t", "H1_rel"), &series)?;

    let verdicts = vec![
        Verdict {
            name: "decay_envelope",
            pass: report.envelope_ok,
            measured: report.max_envelope_ratio,
            bound: 1.0,
        },
        Verdict {
            name: "decay_rate",
            pass: report.rate_ok,
            measured: report.fitted_rate,
            bound: report.rate_bound * 0.95,
        },
    ];
    let last = report.records.last().cloned();
    finish(ctx, "decay", cfg.echo, report.steps, started, last, verdicts)
}

pub fn decay_diagonal_cmd(ctx: &Ctx) -> Result<i32> {
    let started = Instant::now();
    let cfg = ctx.load_config()?;
    let out = ctx.prepare_out()?;
    let report = experiments::run_decay_diagonal(&cfg.spec())?;

    write_diagnostics_csv(&out.join("diagnostics.csv"), cfg.params.n(), &report.records)?;
    let series: Vec<(f64, f64)> = report
        .times
        .iter()
        .zip(&report.h1_rel)
        .map(|(&t, &h)| (t, h))
        .collect();
    write_series_csv(&out.join("decay.csv"), ("t", "H1_rel"), &series)?;

    let verdicts = vec![Verdict {
        name: "diagonal_monotone",
        pass: report.monotone,
        measured: report.worst_increase,
        bound: 0.0,
    }];
    let last = report.records.last().cloned();
    finish(
        ctx,
        "decay-diagonal",
        cfg.echo,
        report.steps,
        started,
        last,
        verdicts,
    )
}

pub fn sweep_eps_cmd(ctx: &Ctx) -> Result<i32> {
    let started = Instant::now();
    let cfg = ctx.load_config()?;
    let out = ctx.prepare_out()?;
    let eps_list = match &cfg.eps_list {
        Some(list) => list.clone(),
        None => bail!("the sweep-eps command needs `sweep.eps_list` in the config"),
    };
    let report = experiments::run_localization(&cfg.spec(), &eps_list)?;

    let rows: Vec<(f64, f64)> = report
        .eps_list
        .iter()
        .zip(&report.errors)
        .map(|(&e, &err)| (e, err))
        .collect();
    write_series_csv(&out.join("sweep.csv"), ("eps", "error"), &rows)?;
    write_diagnostics_csv(
        &out.join("diagnostics.csv"),
        cfg.params.n(),
        &report.reference_records,
    )?;
    if let Some(order) = report.observed_order {
        eprintln!("sweep-eps: observed order {}", fmt_float(order));
    }

    let verdicts = vec![
        Verdict {
            name: "sweep_strictly_decreasing",
            pass: report.strictly_decreasing,
            measured: report.reduction,
            bound: 1.0,
        },
        Verdict {
            name: "sweep_reduction",
            pass: report.reduction <= 0.2,
            measured: report.reduction,
            bound: 0.2,
        },
    ];
    let last = report.reference_records.last().cloned();
    finish(ctx, "sweep-eps", cfg.echo, report.steps, started, last, verdicts)
}

pub fn stability_cmd(ctx: &Ctx) -> Result<i32> {
    let started = Instant::now();
    let cfg = ctx.load_config()?;
    let out = ctx.prepare_out()?;
    let delta = match cfg.delta {
        Some(d) => d,
        None => bail!("the stability command needs `stability.delta` in the config"),
    };
    let spec = cfg.spec();
    let report = experiments::run_stability(&spec, delta)?;

    let series: Vec<(f64, f64)> = report
        .times
        .iter()
        .zip(&report.h2_rel)
        .map(|(&t, &h)| (t, h))
        .collect();
    write_series_csv(&out.join("stability.csv"), ("t", "H2_rel"), &series)?;
    write_diagnostics_csv(&out.join("diagnostics.csv"), cfg.params.n(), &report.records)?;

    let mut verdicts = Vec::new();
    let mut steps = report.steps;
    if delta == 0.0 {
        let worst = report.h2_rel.iter().cloned().fold(0.0f64, f64::max);
        verdicts.push(Verdict {
            name: "stability_identical",
            pass: worst <= 1e-12,
            measured: worst,
            bound: 1e-12,
        });
    } else {
        // Halving the bump must quarter the initial quadratic distance.
        let half = experiments::run_stability(&spec, 0.5 * delta)?;
        steps += half.steps;
        let ratio_defect = (4.0 * half.h2_rel[0] / report.h2_rel[0] - 1.0).abs();
        verdicts.push(Verdict {
            name: "stability_quartering",
            pass: ratio_defect <= 1e-6,
            measured: ratio_defect,
            bound: 1e-6,
        });
    }
    if let Some(c) = report.c_fit {
        eprintln!("stability: fitted growth rate {}", fmt_float(c));
    }
    let last = report.records.last().cloned();
    finish(ctx, "stability", cfg.echo, steps, started, last, verdicts)
}

pub fn boundedness_cmd(ctx: &Ctx) -> Result<i32> {
    let started = Instant::now();
    let cfg = ctx.load_config()?;
    let out = ctx.prepare_out()?;
    let report = experiments::run_boundedness(&cfg.spec())?;

    write_diagnostics_csv(&out.join("diagnostics.csv"), cfg.params.n(), &report.records)?;
    let rows: Vec<(f64, f64)> = report
        .times
        .iter()
        .zip(&report.records)
        .map(|(&t, rec)| (t, rec.linf.iter().cloned().fold(0.0f64, f64::max)))
        .collect();
    write_series_csv(&out.join("supnorm.csv"), ("t", "sup_u"), &rows)?;

    let verdicts = vec![Verdict {
        name: "boundedness_cap",
        pass: report.within,
        measured: report.sup_linf,
        bound: report.cap,
    }];
    let last = report.records.last().cloned();
    finish(ctx, "boundedness", cfg.echo, report.steps, started, last, verdicts)
}

pub fn operator_check_cmd(ctx: &Ctx) -> Result<i32> {
    let started = Instant::now();
    let out = ctx.prepare_out()?;
    let rows = operator_identity_suite((-1.0, 1.0), &[64, 256], &[1.0, 0.01], 20, 2024)?;

    let mut table = String::from("name,m,eps,violation,tol,pass\n");
    let mut verdicts = Vec::new();
    for row in &rows {
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.name,
            row.m,
            fmt_float(row.eps),
            fmt_float(row.violation),
            fmt_float(row.tol),
            row.pass()
        ));
        verdicts.push(Verdict {
            name: row.name,
            pass: row.pass(),
            measured: row.violation,
            bound: row.tol,
        });
    }
    std::fs::write(out.join("identity.csv"), table)?;

    finish(
        ctx,
        "operator-check",
        Vec::new(),
        0,
        started,
        None,
        verdicts,
    )
}

/// Median wall time of `runs` repetitions of `f`, in nanoseconds.
fn median_ns<F: FnMut()>(runs: usize, mut f: F) -> u128 {
    let mut samples: Vec<u128> = (0..runs)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_nanos()
        })
        .collect();
    samples.sort_unstable();
    samples[samples.len() / 2]
}

pub fn bench_cmd(_ctx: &Ctx) -> Result<i32> {
    let eps = 1.0;
    let kernel = green::GreenKernel::new(eps)?;
    println!("m,resolvent_ns,kernel_solve_ns,sqrt_resolvent_ns");
    let mut m = 128usize;
    while m <= 4096 {
        let grid = Grid1D::new(-1.0, 1.0, m)?;
        let op = BrinkmanOperator::assemble(&grid, eps)?;
        let g: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&x| 1.2 + (3.0 * x).sin())
            .collect();

        // Touch the spectral cache before timing the apply.
        let _ = op.sqrt_resolvent(&g)?;
        let resolvent = median_ns(5, || {
            let _ = op.resolvent(&g).unwrap();
        });
        let kernel_solve = median_ns(5, || {
            let _ = green::solve(&grid, &kernel, &g).unwrap();
        });
        let sqrt_resolvent = median_ns(5, || {
            let _ = op.sqrt_resolvent(&g).unwrap();
        });
        println!("{m},{resolvent},{kernel_solve},{sqrt_resolvent}");
        m *= 2;
    }
    Ok(0)
}
