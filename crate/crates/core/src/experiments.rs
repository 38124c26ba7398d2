//! Precomposed verification experiments: exponential relaxation to the
//! coexistence state, entropy monotonicity for diagonal competition, the
//! local (Darcy) limit sweep, perturbation stability in the quadratic
//! entropy, and uniform boundedness. Each returns a report carrying the
//! measured quantities plus the per-output diagnostics so callers can
//! persist them.
//!
//! The decay experiment monitors its standing hypotheses (densities above
//! the floor `mu`, nonpositive reaction terms, steady state above the
//! floor) at every output time and aborts with
//! [`Error::HypothesisViolated`] the moment one fails, rather than
//! reporting a rate that the theory does not back.

use crate::brinkman::BrinkmanOperator;
use crate::dynamics::{
    simulate, stable_dt, step, velocity, SimulationSpec, State, StepConfig,
};
use crate::entropy::{self, DiagnosticsRecord};
use crate::math;
use crate::params::{Backend, SteadyState, ValidatedParams};
use crate::{Error, Result};
use alloc::string::String;
use alloc::vec::Vec;

/// Floor below which sampled values are treated as exhausted noise and
/// excluded from rate fits.
pub const FIT_FLOOR: f64 = 1e-14;

/// OLS slope of `ln(values)` against `times` over the last half of the
/// samples, skipping values at or below [`FIT_FLOOR`]. Errors with
/// [`Error::FitDegenerate`] when fewer than 5 samples survive.
pub fn log_linear_slope(times: &[f64], values: &[f64]) -> Result<f64> {
    let len = times.len().min(values.len());
    let start = len / 2;
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for k in start..len {
        if values[k] > FIT_FLOOR && values[k].is_finite() {
            ts.push(times[k]);
            ys.push(math::ln(values[k]));
        }
    }
    let usable = ts.len();
    if usable < 5 {
        return Err(Error::FitDegenerate { usable });
    }
    let nf = usable as f64;
    let t_mean = ts.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var = 0.0;
    for k in 0..usable {
        let dt = ts[k] - t_mean;
        cov += dt * (ys[k] - y_mean);
        var += dt * dt;
    }
    if var <= 0.0 {
        return Err(Error::FitDegenerate { usable });
    }
    Ok(cov / var)
}

fn require_reactions(spec: &SimulationSpec) -> Result<()> {
    if !spec.reactions_enabled {
        return Err(Error::InvalidExperiment {
            reason: "decay experiments need reactions enabled",
        });
    }
    Ok(())
}

/// Outcome of the exponential-relaxation experiment.
#[derive(Debug, Clone)]
pub struct DecayReport {
    /// Smallest eigenvalue of the symmetrized competition matrix.
    pub beta: f64,
    /// Uniform density floor assumed by the theory.
    pub mu: f64,
    /// Predicted rate `2 beta mu`.
    pub rate_bound: f64,
    pub times: Vec<f64>,
    pub h1_rel: Vec<f64>,
    /// Rate recovered from the tail of `ln H1_rel`.
    pub fitted_rate: f64,
    /// `H1_rel(t) <= H1_rel(0) exp(-2 beta mu t) (1 + 5e-2)` at every
    /// output.
    pub envelope_ok: bool,
    /// Largest observed `H1_rel(t) / envelope(t)`.
    pub max_envelope_ratio: f64,
    /// `fitted_rate >= 2 beta mu (1 - 5e-2)`.
    pub rate_ok: bool,
    pub records: Vec<DiagnosticsRecord>,
    /// Time steps taken by the underlying run.
    pub steps: u64,
}

/// Runs the relaxation experiment under the floor hypothesis `u >= mu`.
/// The hypotheses are re-checked at every output time; a violation aborts
/// the run.
pub fn run_decay(spec: &SimulationSpec, mu: f64) -> Result<DecayReport> {
    require_reactions(spec)?;
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::InvalidExperiment {
            reason: "the density floor mu must be positive",
        });
    }
    let steady = SteadyState::compute(&spec.params)?;
    steady.require_positive()?;
    let beta = steady.beta;
    if beta <= 0.0 {
        return Err(Error::HypothesisViolated {
            condition: String::from("competition matrix is not positive definite"),
            t: 0.0,
        });
    }
    let floor_tol = 1e-10 * (1.0 + mu);
    for &c in &steady.u_inf {
        if c < mu - floor_tol {
            return Err(Error::HypothesisViolated {
                condition: String::from("coexistence state sits below the floor mu"),
                t: 0.0,
            });
        }
    }

    let n = spec.params.n();
    let growth_scale: f64 = (0..n).map(|i| spec.params.b0(i)).fold(0.0, f64::max);
    let reaction_tol = 1e-10 * (1.0 + growth_scale);
    let mut times = Vec::new();
    let mut h1_rel = Vec::new();
    let mut records = Vec::new();
    let stats = simulate(spec, |state, rec| {
        if state.min_value() < mu - floor_tol {
            return Err(Error::HypothesisViolated {
                condition: String::from("density dropped below the floor mu"),
                t: state.t,
            });
        }
        for i in 0..n {
            for k in 0..spec.grid.m() {
                let mut f = spec.params.b0(i);
                for j in 0..n {
                    f -= spec.params.b(i, j) * state.u[j][k];
                }
                if f > reaction_tol {
                    return Err(Error::HypothesisViolated {
                        condition: String::from("reaction term turned positive"),
                        t: state.t,
                    });
                }
            }
        }
        let h = rec.h1_rel.ok_or(Error::NonFinite {
            what: "relative entropy",
        })?;
        times.push(state.t);
        h1_rel.push(h);
        records.push(rec.clone());
        Ok(())
    })?;

    let rate_bound = 2.0 * beta * mu;
    let h0 = h1_rel[0];
    let mut envelope_ok = true;
    let mut max_ratio = 0.0f64;
    for (k, &h) in h1_rel.iter().enumerate() {
        let bound = h0 * math::exp(-rate_bound * times[k]) * 1.05 + 1e-14 * (1.0 + h0);
        if h > bound {
            envelope_ok = false;
        }
        max_ratio = max_ratio.max(h / bound);
    }
    let fitted_rate = -log_linear_slope(&times, &h1_rel)?;
    Ok(DecayReport {
        beta,
        mu,
        rate_bound,
        times,
        h1_rel,
        fitted_rate,
        envelope_ok,
        max_envelope_ratio: max_ratio,
        rate_ok: fitted_rate >= rate_bound * (1.0 - 5e-2),
        records,
        steps: stats.steps,
    })
}

/// Outcome of the diagonal-competition monotonicity experiment.
#[derive(Debug, Clone)]
pub struct DiagonalDecayReport {
    pub times: Vec<f64>,
    pub h1_rel: Vec<f64>,
    /// Relative entropy never increased (up to `1e-9` relative slack).
    pub monotone: bool,
    /// Largest increase beyond the slack; `0` when monotone.
    pub worst_increase: f64,
    /// Tail rate, when enough of the signal stays above the fit floor.
    pub fitted_rate: Option<f64>,
    pub records: Vec<DiagnosticsRecord>,
    /// Time steps taken by the underlying run.
    pub steps: u64,
}

/// Monotone relative-entropy decay for diagonal competition matrices.
/// Unlike [`run_decay`] there is no density floor: initial data may touch
/// zero.
pub fn run_decay_diagonal(spec: &SimulationSpec) -> Result<DiagonalDecayReport> {
    require_reactions(spec)?;
    if !spec.params.b_is_diagonal() {
        return Err(Error::InvalidExperiment {
            reason: "competition matrix must be diagonal",
        });
    }
    for i in 0..spec.params.n() {
        if spec.params.b0(i) <= 0.0 {
            return Err(Error::InvalidExperiment {
                reason: "diagonal decay needs positive growth rates",
            });
        }
    }
    SteadyState::compute(&spec.params)?.require_positive()?;
    let mut times = Vec::new();
    let mut h1_rel = Vec::new();
    let mut records = Vec::new();
    let stats = simulate(spec, |state, rec| {
        let h = rec.h1_rel.ok_or(Error::NonFinite {
            what: "relative entropy",
        })?;
        times.push(state.t);
        h1_rel.push(h);
        records.push(rec.clone());
        Ok(())
    })?;

    let mut monotone = true;
    let mut worst = 0.0f64;
    for k in 1..h1_rel.len() {
        let allowed = h1_rel[k - 1] * (1.0 + 1e-9) + 1e-12;
        if h1_rel[k] > allowed {
            monotone = false;
            worst = worst.max(h1_rel[k] - allowed);
        }
    }
    let fitted_rate = log_linear_slope(&times, &h1_rel).ok().map(|s| -s);
    Ok(DiagonalDecayReport {
        times,
        h1_rel,
        monotone,
        worst_increase: worst,
        fitted_rate,
        records,
        steps: stats.steps,
    })
}

fn with_backend(params: &ValidatedParams, backend: Backend, eps: f64) -> Result<ValidatedParams> {
    let mut raw = params.params().clone();
    raw.backend = backend;
    raw.eps = eps;
    raw.validate()
}

fn final_state(spec: &SimulationSpec) -> Result<(State, Vec<DiagnosticsRecord>, u64)> {
    let mut last: Option<State> = None;
    let mut records = Vec::new();
    let stats = simulate(spec, |state, rec| {
        last = Some(state.clone());
        records.push(rec.clone());
        Ok(())
    })?;
    Ok((last.expect("at least the initial output"), records, stats.steps))
}

/// Outcome of the Darcy-limit sweep.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub eps_list: Vec<f64>,
    /// L2 distance (summed over species) between each run's final state
    /// and the local-backend reference.
    pub errors: Vec<f64>,
    pub strictly_decreasing: bool,
    /// `errors.last / errors.first`; `0` for an identically converged
    /// sweep.
    pub reduction: f64,
    /// Slope of `ln error` against `ln eps`, when at least two errors are
    /// positive.
    pub observed_order: Option<f64>,
    /// Diagnostics of the local reference run.
    pub reference_records: Vec<DiagnosticsRecord>,
    /// Total time steps across the reference and every sweep run.
    pub steps: u64,
}

/// Runs the nonlocal model for each `eps` (strictly decreasing, positive)
/// and compares final states against the `eps = 0` local backend.
pub fn run_localization(spec: &SimulationSpec, eps_list: &[f64]) -> Result<SweepReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidExperiment {
            reason: "the sweep needs at least one eps",
        });
    }
    for k in 0..eps_list.len() {
        if !eps_list[k].is_finite() || eps_list[k] <= 0.0 {
            return Err(Error::InvalidExperiment {
                reason: "sweep eps values must be positive",
            });
        }
        if k > 0 && eps_list[k] >= eps_list[k - 1] {
            return Err(Error::InvalidExperiment {
                reason: "sweep eps values must be strictly decreasing",
            });
        }
    }

    let mut reference = spec.clone();
    reference.params = with_backend(&spec.params, Backend::Local, 0.0)?;
    let (ref_state, reference_records, mut total_steps) = final_state(&reference)?;

    let mut errors = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut run = spec.clone();
        run.params = with_backend(&spec.params, Backend::Nonlocal, eps)?;
        let (state, _, steps) = final_state(&run)?;
        total_steps += steps;
        let mut err_sq = 0.0;
        for (ui, ri) in state.u.iter().zip(&ref_state.u) {
            let diff: Vec<f64> = ui.iter().zip(ri).map(|(&a, &b)| a - b).collect();
            err_sq += spec.grid.cell_inner(&diff, &diff);
        }
        errors.push(math::sqrt(err_sq));
    }

    let strictly_decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let reduction = if errors[0] > 0.0 {
        errors[errors.len() - 1] / errors[0]
    } else {
        0.0
    };
    let mut ln_e = Vec::new();
    let mut ln_err = Vec::new();
    for (k, &err) in errors.iter().enumerate() {
        if err > 0.0 {
            ln_e.push(math::ln(eps_list[k]));
            ln_err.push(math::ln(err));
        }
    }
    let observed_order = if ln_e.len() >= 2 {
        let nf = ln_e.len() as f64;
        let x_mean = ln_e.iter().sum::<f64>() / nf;
        let y_mean = ln_err.iter().sum::<f64>() / nf;
        let mut cov = 0.0;
        let mut var = 0.0;
        for k in 0..ln_e.len() {
            cov += (ln_e[k] - x_mean) * (ln_err[k] - y_mean);
            var += (ln_e[k] - x_mean) * (ln_e[k] - x_mean);
        }
        Some(cov / var)
    } else {
        None
    };
    Ok(SweepReport {
        eps_list: eps_list.to_vec(),
        errors,
        strictly_decreasing,
        reduction,
        observed_order,
        reference_records,
        steps: total_steps,
    })
}

/// Outcome of the perturbation-stability experiment.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub delta: f64,
    pub times: Vec<f64>,
    /// Quadratic entropy of the difference between the two runs at each
    /// output.
    pub h2_rel: Vec<f64>,
    /// Log-linear growth/decay rate of `h2_rel`, when fittable.
    pub c_fit: Option<f64>,
    /// Diagnostics of the unperturbed run.
    pub records: Vec<DiagnosticsRecord>,
    /// Lockstep time steps taken.
    pub steps: u64,
}

/// Advances the given initial state and a `delta`-bumped copy in lockstep
/// (shared step sizes, the smaller of the two stability caps) and tracks
/// the quadratic entropy of their difference. `delta = 0` reproduces the
/// base run bitwise, so `h2_rel` is identically zero; halving `delta`
/// quarters `h2_rel(0)` exactly.
pub fn run_stability(spec: &SimulationSpec, delta: f64) -> Result<StabilityReport> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidExperiment {
            reason: "the perturbation size must be nonnegative",
        });
    }
    spec_precheck(spec)?;
    let grid = &spec.grid;
    let params = &spec.params;
    let op = match params.backend() {
        Backend::Nonlocal => Some(BrinkmanOperator::assemble(grid, params.eps())?),
        Backend::Local => None,
    };
    let levels = spec.steady_levels();

    let center = 0.5 * (grid.x_left() + grid.x_right());
    let width = 0.1 * (grid.x_right() - grid.x_left());
    let mut perturbed = spec.initial.clone();
    for ui in perturbed.iter_mut() {
        for (k, z) in ui.iter_mut().enumerate() {
            let w = (grid.center(k) - center) / width;
            *z += delta * math::exp(-0.5 * w * w);
        }
    }

    let mut s1 = State::new(0.0, spec.initial.clone())?;
    let mut s2 = State::new(0.0, perturbed)?;

    let mut times = Vec::new();
    let mut h2_rel = Vec::new();
    let mut records = Vec::new();
    let mut observe = |s1: &State, s2: &State| -> Result<()> {
        times.push(s1.t);
        h2_rel.push(entropy::rao_relative(grid, params, &s1.u, &s2.u, op.as_ref())?);
        records.push(entropy::record(
            grid,
            params,
            s1.t,
            &s1.u,
            op.as_ref(),
            levels.as_deref(),
        )?);
        Ok(())
    };
    observe(&s1, &s2)?;

    let mut next_output = 1usize;
    let mut steps = 0u64;
    while s1.t < spec.t_final {
        let t_target = (next_output as f64 * spec.output_every).min(spec.t_final);
        while s1.t < t_target {
            let v1 = velocity(grid, params, &s1.u, op.as_ref())?;
            let v2 = velocity(grid, params, &s2.u, op.as_ref())?;
            let cap1 = stable_dt(grid, params, &s1.u, &v1, spec.reactions_enabled, spec.dt_max);
            let cap2 = stable_dt(grid, params, &s2.u, &v2, spec.reactions_enabled, spec.dt_max);
            let cap = cap1.min(cap2);
            let remaining = t_target - s1.t;
            let lands = cap >= remaining * (1.0 - 1e-12);
            let dt = if lands { remaining } else { cap };
            if !dt.is_finite() || dt <= 1e-16 * (1.0 + spec.t_final) {
                return Err(Error::LockstepViolation { t: s1.t });
            }
            let cfg = StepConfig {
                dt,
                reactions_enabled: spec.reactions_enabled,
            };
            s1 = step(grid, params, &s1, &v1, cfg)?;
            s2 = step(grid, params, &s2, &v2, cfg)?;
            steps += 1;
            if lands {
                s1.t = t_target;
                s2.t = t_target;
            }
            if s1.t != s2.t {
                return Err(Error::LockstepViolation { t: s1.t });
            }
        }
        observe(&s1, &s2)?;
        next_output += 1;
    }

    let c_fit = log_linear_slope(&times, &h2_rel).ok();
    Ok(StabilityReport {
        delta,
        times,
        h2_rel,
        c_fit,
        records,
        steps,
    })
}

/// Mirrors the validation `simulate` performs, for drivers that loop
/// manually.
fn spec_precheck(spec: &SimulationSpec) -> Result<()> {
    // Running a zero-length simulate shares all checks without stepping.
    let mut probe = spec.clone();
    probe.t_final = 0.0;
    simulate(&probe, |_, _| Ok(()))?;
    Ok(())
}

/// Outcome of the uniform-boundedness experiment.
#[derive(Debug, Clone)]
pub struct BoundednessReport {
    pub times: Vec<f64>,
    /// Largest sup norm over all species and outputs.
    pub sup_linf: f64,
    /// `1.1 max(sup |u0|, max_i b_i0 / b_ii)`.
    pub cap: f64,
    pub within: bool,
    pub records: Vec<DiagnosticsRecord>,
    /// Time steps taken by the underlying run.
    pub steps: u64,
}

/// Checks that densities never exceed the logistic carrying scale.
pub fn run_boundedness(spec: &SimulationSpec) -> Result<BoundednessReport> {
    let mut times = Vec::new();
    let mut records = Vec::new();
    let mut sup = 0.0f64;
    let stats = simulate(spec, |state, rec| {
        times.push(state.t);
        for &v in &rec.linf {
            sup = sup.max(v);
        }
        records.push(rec.clone());
        Ok(())
    })?;
    let mut scale = 0.0f64;
    for ui in &spec.initial {
        scale = scale.max(crate::grid::linf(ui));
    }
    for i in 0..spec.params.n() {
        scale = scale.max(spec.params.b0(i) / spec.params.b(i, i));
    }
    let cap = 1.1 * scale;
    Ok(BoundednessReport {
        times,
        sup_linf: sup,
        cap,
        within: sup <= cap,
        records,
        steps: stats.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_profile, Profile};
    use crate::grid::Grid1D;
    use crate::params::ModelParams;

    #[test]
    fn slope_fit_recovers_synthetic_rates() {
        let times: Vec<f64> = (0..21).map(|k| k as f64 * 0.05).collect();
        let values: Vec<f64> = times.iter().map(|&t| 3.0 * (-2.0 * t).exp()).collect();
        let slope = log_linear_slope(&times, &values).unwrap();
        assert!((slope + 2.0).abs() < 1e-9);

        // Too little signal above the floor.
        let dead: Vec<f64> = times.iter().map(|_| 1e-16).collect();
        assert!(matches!(
            log_linear_slope(&times, &dead),
            Err(Error::FitDegenerate { usable: 0 })
        ));
    }

    fn logistic_spec(m: usize, amplitude: f64, t_final: f64) -> SimulationSpec {
        let grid = Grid1D::new(-1.0, 1.0, m).unwrap();
        let params = ModelParams {
            n: 1,
            a: vec![1.0],
            b0: vec![1.0],
            b: vec![1.0],
            sigma: 0.5,
            eps: 0.1,
            backend: Backend::Nonlocal,
        }
        .validate()
        .unwrap();
        let initial = vec![build_profile(
            &grid,
            &Profile::Gaussian {
                base: 1.0,
                amplitude,
                center: 0.0,
                width: 0.25,
            },
        )
        .unwrap()];
        SimulationSpec {
            grid,
            params,
            initial,
            t_final,
            dt_max: 0.01,
            output_every: 0.1,
            reactions_enabled: true,
        }
    }

    #[test]
    fn decay_toward_carrying_capacity_tracks_the_envelope() {
        let spec = logistic_spec(48, 0.05, 2.0);
        let report = run_decay(&spec, 1.0).unwrap();
        assert!((report.beta - 1.0).abs() < 1e-12);
        assert!((report.rate_bound - 2.0).abs() < 1e-12);
        assert!(report.envelope_ok, "ratio {}", report.max_envelope_ratio);
        assert!(
            report.fitted_rate > 1.8,
            "fitted {}",
            report.fitted_rate
        );
        assert!(report.rate_ok);
        assert!(report.h1_rel[0] > 0.0);
    }

    #[test]
    fn decay_rejects_states_below_the_floor() {
        let mut spec = logistic_spec(32, 0.05, 1.0);
        spec.initial = vec![vec![0.5; 32]];
        let err = run_decay(&spec, 1.0).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { .. }));
    }

    #[test]
    fn decay_requires_reactions_and_positive_mu() {
        let mut spec = logistic_spec(32, 0.05, 1.0);
        assert!(run_decay(&spec, 0.0).is_err());
        spec.reactions_enabled = false;
        assert!(run_decay(&spec, 1.0).is_err());
    }

    #[test]
    fn diagonal_competition_decays_monotonically_from_vacuum() {
        let grid = Grid1D::new(-1.0, 1.0, 48).unwrap();
        let params = ModelParams {
            n: 2,
            a: vec![1.0, 0.5, 0.5, 1.0],
            b0: vec![1.0, 1.0],
            b: vec![1.0, 0.0, 0.0, 1.0],
            sigma: 0.3,
            eps: 0.1,
            backend: Backend::Nonlocal,
        }
        .validate()
        .unwrap();
        let initial = vec![
            build_profile(
                &grid,
                &Profile::Step {
                    left: 0.0,
                    right: 2.0,
                    jump_at: 0.0,
                },
            )
            .unwrap(),
            build_profile(
                &grid,
                &Profile::Step {
                    left: 1.5,
                    right: 0.0,
                    jump_at: 0.3,
                },
            )
            .unwrap(),
        ];
        let spec = SimulationSpec {
            grid,
            params,
            initial,
            t_final: 1.5,
            dt_max: 0.01,
            output_every: 0.05,
            reactions_enabled: true,
        };
        let report = run_decay_diagonal(&spec).unwrap();
        assert!(report.monotone, "worst increase {}", report.worst_increase);
        assert!(report.h1_rel[0] > *report.h1_rel.last().unwrap());
    }

    #[test]
    fn diagonal_run_rejects_cross_competition() {
        let mut spec = logistic_spec(32, 0.05, 0.5);
        let mut raw = spec.params.params().clone();
        raw.n = 2;
        raw.a = vec![1.0, 0.0, 0.0, 1.0];
        raw.b0 = vec![1.0, 1.0];
        raw.b = vec![1.0, 0.5, 0.5, 1.0];
        spec.params = raw.validate().unwrap();
        spec.initial = vec![vec![1.0; 32], vec![1.0; 32]];
        assert!(matches!(
            run_decay_diagonal(&spec),
            Err(Error::InvalidExperiment { .. })
        ));
    }

    #[test]
    fn localization_errors_vanish_for_uniform_data() {
        // dt_max must sit under the explicit cross-diffusion threshold
        // h^2 / (u a) of the local reference run, or round-off noise on
        // the uniform state grows instead of staying at machine level.
        let mut spec = logistic_spec(32, 0.0, 0.2);
        spec.initial = vec![vec![1.5; 32]];
        spec.dt_max = 5e-4;
        let report = run_localization(&spec, &[0.5, 0.1]).unwrap();
        // Constant data keeps both backends on the same trajectory up to
        // round-off in the implicit diffusion solve.
        assert!(
            report.errors.iter().all(|&e| e <= 1e-12),
            "errors {:?}",
            report.errors
        );
    }

    #[test]
    fn localization_errors_shrink_with_eps() {
        let mut spec = logistic_spec(32, 0.5, 0.3);
        spec.dt_max = 4e-4;
        let report = run_localization(&spec, &[0.5, 0.05]).unwrap();
        assert!(report.strictly_decreasing, "errors {:?}", report.errors);
        assert!(report.errors[0] > 0.0);
        assert!(report.observed_order.unwrap() > 0.0);
    }

    #[test]
    fn sweep_rejects_bad_eps_lists() {
        let spec = logistic_spec(16, 0.1, 0.1);
        assert!(run_localization(&spec, &[]).is_err());
        assert!(run_localization(&spec, &[0.1, 0.1]).is_err());
        assert!(run_localization(&spec, &[0.1, 0.5]).is_err());
        assert!(run_localization(&spec, &[0.1, -0.5]).is_err());
    }

    #[test]
    fn unperturbed_stability_run_is_exactly_zero() {
        let spec = logistic_spec(32, 0.3, 0.2);
        let report = run_stability(&spec, 0.0).unwrap();
        assert!(report.h2_rel.iter().all(|&v| v == 0.0));
        assert!(report.c_fit.is_none());
    }

    #[test]
    fn halving_the_perturbation_quarters_the_initial_entropy() {
        let spec = logistic_spec(32, 0.3, 0.1);
        let full = run_stability(&spec, 1e-3).unwrap();
        let half = run_stability(&spec, 5e-4).unwrap();
        let ratio = full.h2_rel[0] / half.h2_rel[0];
        assert!((ratio - 4.0).abs() < 1e-9, "ratio {ratio}");
        assert!(full.h2_rel[0] > 0.0);
    }

    #[test]
    fn boundedness_holds_for_logistic_growth() {
        let mut spec = logistic_spec(32, 0.8, 1.0);
        spec.initial = vec![vec![0.2; 32]];
        let report = run_boundedness(&spec).unwrap();
        // Carrying capacity 1 dominates the small initial data.
        assert!((report.cap - 1.1).abs() < 1e-12);
        assert!(report.within, "sup {}", report.sup_linf);
    }
}
