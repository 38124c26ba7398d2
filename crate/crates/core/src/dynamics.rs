//! IMEX finite-volume time stepper: explicit upwind advection by the
//! pressure-driven velocity, explicit competition reactions, implicit
//! diffusion.
//!
//! One step, species by species:
//!
//! ```text
//! u* = u - (dt/h) div(F) + dt u f(u)      F = upwind flux of v u
//! (I + dt sigma/h^2 T_N) u_new = u*       T_N = Neumann Laplacian stencil
//! ```
//!
//! The implicit matrix is an M-matrix, so the diffusion stage maps
//! nonnegative data to nonnegative data; with the advective and reactive
//! step-size caps of [`stable_dt`], the explicit stage keeps cell values
//! nonnegative as well. Wall fluxes vanish identically and the reaction is
//! evaluated at the old state, which makes the per-step mass identity
//!
//! ```text
//! h sum(u_new - u) = dt * h sum(u f(u))
//! ```
//!
//! exact up to solver round-off (per species). States that dip below
//! `-1e-12` abort the run instead of being silently repaired; round-off
//! negatives above that floor are clamped to zero.

use crate::brinkman::{face_gradient, BrinkmanOperator, GradientBc};
use crate::entropy::{self, DiagnosticsRecord};
use crate::grid::Grid1D;
use crate::math;
use crate::params::{Backend, SteadyState, ValidatedParams};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Positive densities at a moment in time; `u[i][k]` is species `i` in
/// cell `k`.
#[derive(Debug, Clone)]
pub struct State {
    pub t: f64,
    pub u: Vec<Vec<f64>>,
}

impl State {
    /// Validates finiteness and nonnegativity (entries in `[-1e-12, 0)`
    /// are treated as round-off and clamped to zero).
    pub fn new(t: f64, u: Vec<Vec<f64>>) -> Result<Self> {
        let mut u = u;
        for (i, ui) in u.iter_mut().enumerate() {
            for (k, z) in ui.iter_mut().enumerate() {
                if !z.is_finite() {
                    return Err(Error::NonFiniteState { species: i, t });
                }
                if *z < -1e-12 {
                    return Err(Error::PositivityLoss {
                        species: i,
                        cell: k,
                        value: *z,
                        t,
                    });
                }
                if *z < 0.0 {
                    *z = 0.0;
                }
            }
        }
        Ok(State { t, u })
    }

    pub fn species(&self) -> usize {
        self.u.len()
    }

    pub fn min_value(&self) -> f64 {
        let mut min = f64::INFINITY;
        for ui in &self.u {
            for &z in ui {
                min = min.min(z);
            }
        }
        min
    }
}

/// Pressures `p_i = sum_j a_ij u_j` at cell centers.
pub fn pressure(params: &ValidatedParams, u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = params.n();
    let m = u[0].len();
    let mut p = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..n {
            let a = params.a(i, j);
            if a != 0.0 {
                for k in 0..m {
                    p[i][k] += a * u[j][k];
                }
            }
        }
    }
    p
}

/// Reaction densities `u_i f_i(u)` with `f_i(u) = b_i0 - sum_j b_ij u_j`.
pub fn reaction(params: &ValidatedParams, u: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = params.n();
    let m = u[0].len();
    let mut r = vec![vec![0.0; m]; n];
    for i in 0..n {
        for k in 0..m {
            let mut f = params.b0(i);
            for j in 0..n {
                f -= params.b(i, j) * u[j][k];
            }
            r[i][k] = u[i][k] * f;
        }
    }
    r
}

/// Face-centered velocities, one row of `m + 1` values per species. Wall
/// faces are exact zeros for both backends.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub faces: Vec<Vec<f64>>,
}

impl VelocityField {
    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for vi in &self.faces {
            for &v in vi {
                worst = worst.max(math::abs(v));
            }
        }
        worst
    }
}

/// Velocity law: `v_i = -(-eps lap + I)^(-1) grad p_i` on faces for the
/// nonlocal backend (wall faces pinned to zero), `v_i = -grad p_i` for the
/// local one.
pub fn velocity(
    grid: &Grid1D,
    params: &ValidatedParams,
    u: &[Vec<f64>],
    op: Option<&BrinkmanOperator>,
) -> Result<VelocityField> {
    if u.len() != params.n() {
        return Err(Error::DimensionMismatch {
            what: "species count",
            expected: params.n(),
            got: u.len(),
        });
    }
    for ui in u {
        if ui.len() != grid.m() {
            return Err(Error::DimensionMismatch {
                what: "cell field",
                expected: grid.m(),
                got: ui.len(),
            });
        }
    }
    let p = pressure(params, u);
    let mut faces = Vec::with_capacity(params.n());
    match params.backend() {
        Backend::Nonlocal => {
            let op = op.ok_or(Error::MissingOperator)?;
            if !op.grid().same_mesh(grid) {
                return Err(Error::DimensionMismatch {
                    what: "operator mesh",
                    expected: grid.m(),
                    got: op.grid().m(),
                });
            }
            for pi in &p {
                let src = face_gradient(grid, pi, GradientBc::NoFlux);
                let mut vi = op.face_resolvent_dirichlet(&src)?;
                for v in vi.iter_mut() {
                    *v = -*v;
                }
                faces.push(vi);
            }
        }
        Backend::Local => {
            for pi in &p {
                let mut vi = face_gradient(grid, pi, GradientBc::NoFlux);
                for v in vi.iter_mut() {
                    *v = -*v;
                }
                faces.push(vi);
            }
        }
    }
    Ok(VelocityField { faces })
}

/// Step-size cap: `0.9 min(h / 2 max|v|, 1 / max_i(b_i0 + sum_j b_ij
/// sup u_j))`, then capped at `dt_max`. The reaction term drops out when
/// reactions are disabled.
pub fn stable_dt(
    grid: &Grid1D,
    params: &ValidatedParams,
    u: &[Vec<f64>],
    v: &VelocityField,
    reactions_enabled: bool,
    dt_max: f64,
) -> f64 {
    const SAFETY: f64 = 0.9;
    const TINY: f64 = 1e-30;
    let advective = grid.h() / (2.0 * v.max_abs() + TINY);
    let reactive = if reactions_enabled {
        let sup: Vec<f64> = u.iter().map(|ui| crate::grid::linf(ui)).collect();
        let mut worst = 0.0f64;
        for i in 0..params.n() {
            let mut rate = params.b0(i);
            for j in 0..params.n() {
                rate += params.b(i, j) * sup[j];
            }
            worst = worst.max(rate);
        }
        1.0 / (worst + TINY)
    } else {
        f64::INFINITY
    };
    (SAFETY * advective.min(reactive)).min(dt_max)
}

#[derive(Debug, Clone, Copy)]
pub struct StepConfig {
    pub dt: f64,
    pub reactions_enabled: bool,
}

/// Advances one IMEX step with a precomputed velocity field.
pub fn step(
    grid: &Grid1D,
    params: &ValidatedParams,
    state: &State,
    v: &VelocityField,
    cfg: StepConfig,
) -> Result<State> {
    let dt = cfg.dt;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::NonFinite { what: "step size" });
    }
    let n = params.n();
    let m = grid.m();
    let h = grid.h();
    if state.u.len() != n || v.faces.len() != n {
        return Err(Error::DimensionMismatch {
            what: "species count",
            expected: n,
            got: state.u.len().min(v.faces.len()),
        });
    }

    let r = if cfg.reactions_enabled {
        Some(reaction(params, &state.u))
    } else {
        None
    };

    // One implicit diffusion factorization serves every species.
    let c = dt * params.sigma() / (h * h);
    let mut diag = vec![1.0 + 2.0 * c; m];
    diag[0] = 1.0 + c;
    diag[m - 1] = 1.0 + c;
    let sub = vec![-c; m - 1];
    let factor = crate::linalg::Tridiagonal {
        diag,
        sub: sub.clone(),
        sup: sub,
    }
    .factor()?;

    let t_new = state.t + dt;
    let mut out = Vec::with_capacity(n);
    let mut flux = vec![0.0; m + 1];
    for i in 0..n {
        let ui = &state.u[i];
        let vi = &v.faces[i];
        // Upwind fluxes; the wall entries stay exactly zero.
        flux[0] = 0.0;
        flux[m] = 0.0;
        for k in 1..m {
            let w = vi[k];
            flux[k] = w.max(0.0) * ui[k - 1] + w.min(0.0) * ui[k];
        }
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            rhs[k] = ui[k] - dt / h * (flux[k + 1] - flux[k]);
            if let Some(r) = &r {
                rhs[k] += dt * r[i][k];
            }
        }
        let mut new = factor.solve(&rhs);
        for (k, z) in new.iter_mut().enumerate() {
            if !z.is_finite() {
                return Err(Error::NonFiniteState {
                    species: i,
                    t: t_new,
                });
            }
            if *z < -1e-12 {
                return Err(Error::PositivityLoss {
                    species: i,
                    cell: k,
                    value: *z,
                    t: t_new,
                });
            }
            if *z < 0.0 {
                *z = 0.0;
            }
        }
        out.push(new);
    }
    Ok(State { t: t_new, u: out })
}

/// Initial-profile constructors for the standard experiment shapes.
#[derive(Debug, Clone)]
pub enum Profile {
    Constant {
        value: f64,
    },
    Gaussian {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    Step {
        left: f64,
        right: f64,
        jump_at: f64,
    },
    Samples(Vec<f64>),
}

/// Evaluates a profile at the cell centers, rejecting negative or
/// non-finite values.
pub fn build_profile(grid: &Grid1D, profile: &Profile) -> Result<Vec<f64>> {
    let m = grid.m();
    let values: Vec<f64> = match profile {
        Profile::Constant { value } => vec![*value; m],
        Profile::Gaussian {
            base,
            amplitude,
            center,
            width,
        } => {
            if !(*width > 0.0) {
                return Err(Error::InvalidExperiment {
                    reason: "gaussian profile needs a positive width",
                });
            }
            (0..m)
                .map(|k| {
                    let x = grid.center(k);
                    let z = (x - center) / width;
                    base + amplitude * math::exp(-0.5 * z * z)
                })
                .collect()
        }
        Profile::Step {
            left,
            right,
            jump_at,
        } => (0..m)
            .map(|k| if grid.center(k) < *jump_at { *left } else { *right })
            .collect(),
        Profile::Samples(s) => {
            if s.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "profile samples",
                    expected: m,
                    got: s.len(),
                });
            }
            s.clone()
        }
    };
    for &z in &values {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::InvalidExperiment {
                reason: "initial profiles must be finite and nonnegative",
            });
        }
    }
    Ok(values)
}

/// A full run description: mesh, model, initial data, horizon and output
/// cadence.
#[derive(Debug, Clone)]
pub struct SimulationSpec {
    pub grid: Grid1D,
    pub params: ValidatedParams,
    pub initial: Vec<Vec<f64>>,
    pub t_final: f64,
    pub dt_max: f64,
    pub output_every: f64,
    pub reactions_enabled: bool,
}

impl SimulationSpec {
    fn check(&self) -> Result<()> {
        if self.initial.len() != self.params.n() {
            return Err(Error::DimensionMismatch {
                what: "species count",
                expected: self.params.n(),
                got: self.initial.len(),
            });
        }
        for ui in &self.initial {
            if ui.len() != self.grid.m() {
                return Err(Error::DimensionMismatch {
                    what: "cell field",
                    expected: self.grid.m(),
                    got: ui.len(),
                });
            }
        }
        if !self.t_final.is_finite() || self.t_final < 0.0 {
            return Err(Error::InvalidExperiment {
                reason: "final time must be finite and nonnegative",
            });
        }
        if !(self.dt_max > 0.0) || !self.dt_max.is_finite() {
            return Err(Error::InvalidExperiment {
                reason: "dt_max must be positive",
            });
        }
        if !(self.output_every > 0.0) || !self.output_every.is_finite() {
            return Err(Error::InvalidExperiment {
                reason: "output cadence must be positive",
            });
        }
        Ok(())
    }

    /// Steady-state levels for the relative entropy, when the competition
    /// matrix admits a positive coexistence state.
    pub fn steady_levels(&self) -> Option<Vec<f64>> {
        let steady = SteadyState::compute(&self.params).ok()?;
        if steady.u_inf.iter().all(|&c| c > 0.0) {
            Some(steady.u_inf)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStats {
    pub steps: u64,
    pub outputs: usize,
}

/// Runs a simulation, streaming `(state, diagnostics)` at `t = 0`, at
/// every multiple of `output_every`, and at the exact final time. Output
/// times are landed on exactly by shortening the last step of each
/// interval; all other steps use the stability cap. The sink may return an
/// error to abort the run (partial output stays flushed).
pub fn simulate<F>(spec: &SimulationSpec, mut emit: F) -> Result<RunStats>
where
    F: FnMut(&State, &DiagnosticsRecord) -> Result<()>,
{
    spec.check()?;
    let op = match spec.params.backend() {
        Backend::Nonlocal => Some(BrinkmanOperator::assemble(&spec.grid, spec.params.eps())?),
        Backend::Local => None,
    };
    let levels = spec.steady_levels();

    let mut state = State::new(0.0, spec.initial.clone())?;
    let mut stats = RunStats {
        steps: 0,
        outputs: 0,
    };
    let diag = |state: &State| {
        entropy::record(
            &spec.grid,
            &spec.params,
            state.t,
            &state.u,
            op.as_ref(),
            levels.as_deref(),
        )
    };
    emit(&state, &diag(&state)?)?;
    stats.outputs += 1;
    if spec.t_final == 0.0 {
        return Ok(stats);
    }

    let mut next_output = 1usize;
    while state.t < spec.t_final {
        let t_target = (next_output as f64 * spec.output_every).min(spec.t_final);
        while state.t < t_target {
            let v = velocity(&spec.grid, &spec.params, &state.u, op.as_ref())?;
            let cap = stable_dt(
                &spec.grid,
                &spec.params,
                &state.u,
                &v,
                spec.reactions_enabled,
                spec.dt_max,
            );
            let remaining = t_target - state.t;
            let lands = cap >= remaining * (1.0 - 1e-12);
            let dt = if lands { remaining } else { cap };
            if !dt.is_finite() || dt <= 1e-16 * (1.0 + spec.t_final) {
                return Err(Error::NonFinite { what: "step size" });
            }
            state = step(
                &spec.grid,
                &spec.params,
                &state,
                &v,
                StepConfig {
                    dt,
                    reactions_enabled: spec.reactions_enabled,
                },
            )?;
            stats.steps += 1;
            if lands {
                state.t = t_target;
            }
        }
        emit(&state, &diag(&state)?)?;
        stats.outputs += 1;
        next_output += 1;
    }
    Ok(stats)
}
