//! Entropy functionals and per-output diagnostics: the Boltzmann entropy,
//! its relative form against a steady state, the Rao-type quadratic
//! entropy built on the square-root resolvent, and the dissipation terms
//! whose balance the time stepper is expected to reproduce.
//!
//! Conventions for vanishing densities: `z ln z` and `z (ln z - 1)` are
//! continuously extended by `0` at `z = 0`, so states that touch zero stay
//! inside every functional's domain.

use crate::brinkman::{face_gradient, BrinkmanOperator, GradientBc};
use crate::grid::Grid1D;
use crate::math;
use crate::params::{Backend, ValidatedParams};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// `z ln z`, extended by 0 at `z = 0`.
fn xlnx(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        z * math::ln(z)
    }
}

fn check_species(grid: &Grid1D, params: &ValidatedParams, u: &[Vec<f64>]) -> Result<()> {
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
    Ok(())
}

/// Boltzmann entropy `sum_i integral u_i (ln u_i - 1)`. Bounded below by
/// `-n |domain|` and zero only in the limit of empty densities.
pub fn boltzmann(grid: &Grid1D, u: &[Vec<f64>]) -> f64 {
    let h = grid.h();
    let mut total = 0.0;
    for ui in u {
        let mut acc = 0.0;
        for &z in ui {
            acc += xlnx(z) - z;
        }
        total += h * acc;
    }
    total
}

/// Relative Boltzmann entropy `sum_i integral u_i ln(u_i / c_i) - (u_i -
/// c_i)` against constant positive levels `c_i`. Nonnegative, zero exactly
/// at `u = c`.
pub fn boltzmann_relative(grid: &Grid1D, u: &[Vec<f64>], levels: &[f64]) -> Result<f64> {
    if levels.len() != u.len() {
        return Err(Error::DimensionMismatch {
            what: "steady-state levels",
            expected: u.len(),
            got: levels.len(),
        });
    }
    for (i, &c) in levels.iter().enumerate() {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::NonPositiveSteadyState {
                species: i,
                value: c,
            });
        }
    }
    let h = grid.h();
    let mut total = 0.0;
    for (ui, &c) in u.iter().zip(levels) {
        let ln_c = math::ln(c);
        let mut acc = 0.0;
        for &z in ui {
            // z ln(z/c) - (z - c); the z = 0 limit is c.
            acc += if z <= 0.0 {
                c
            } else {
                z * (math::ln(z) - ln_c) - (z - c)
            };
        }
        total += h * acc;
    }
    Ok(total)
}

/// Applies the entropy transform: `K u_i` for the nonlocal backend, the
/// identity for the local one.
fn transform(
    params: &ValidatedParams,
    op: Option<&BrinkmanOperator>,
    field: &[f64],
) -> Result<Vec<f64>> {
    match params.backend() {
        Backend::Nonlocal => {
            let op = op.ok_or(Error::MissingOperator)?;
            op.sqrt_resolvent(field)
        }
        Backend::Local => Ok(field.to_vec()),
    }
}

/// Rao-type quadratic entropy `sum_ij a_ij <K u_i, K u_j>_h` (with `K` the
/// identity for the local backend). Nonnegative since the pressure matrix
/// is positive definite; bounded below by `alpha sum_i |K u_i|_h^2`.
pub fn rao(
    grid: &Grid1D,
    params: &ValidatedParams,
    u: &[Vec<f64>],
    op: Option<&BrinkmanOperator>,
) -> Result<f64> {
    check_species(grid, params, u)?;
    if let Some(op) = op {
        if !op.grid().same_mesh(grid) {
            return Err(Error::DimensionMismatch {
                what: "operator mesh",
                expected: grid.m(),
                got: op.grid().m(),
            });
        }
    }
    let n = params.n();
    let mut transformed = Vec::with_capacity(n);
    for ui in u {
        transformed.push(transform(params, op, ui)?);
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = params.a(i, j);
            if a != 0.0 {
                total += a * grid.cell_inner(&transformed[i], &transformed[j]);
            }
        }
    }
    Ok(total)
}

/// Rao entropy of the difference of two states; the stability functional.
/// Symmetric in its arguments and exactly quadratic in the perturbation.
pub fn rao_relative(
    grid: &Grid1D,
    params: &ValidatedParams,
    u: &[Vec<f64>],
    ubar: &[Vec<f64>],
    op: Option<&BrinkmanOperator>,
) -> Result<f64> {
    check_species(grid, params, u)?;
    check_species(grid, params, ubar)?;
    let m = grid.m();
    let mut diff = Vec::with_capacity(u.len());
    for (ui, vi) in u.iter().zip(ubar) {
        let mut d = vec![0.0; m];
        for k in 0..m {
            d[k] = ui[k] - vi[k];
        }
        diff.push(d);
    }
    rao(grid, params, &diff, op)
}

/// Centered cell gradient with even-reflection ghosts; the boundary cells
/// use `(u_1 - u_0) / 2h` and its mirror.
fn cell_centered_gradient(grid: &Grid1D, w: &[f64]) -> Vec<f64> {
    let m = grid.m();
    let two_h = 2.0 * grid.h();
    let mut d = vec![0.0; m];
    if m >= 2 {
        d[0] = (w[1] - w[0]) / two_h;
        d[m - 1] = (w[m - 1] - w[m - 2]) / two_h;
    }
    for k in 1..m - 1 {
        d[k] = (w[k + 1] - w[k - 1]) / two_h;
    }
    d
}

/// Instantaneous terms of the Boltzmann entropy balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationTerms {
    /// Fisher information `4 sigma sum_i |grad sqrt(u_i)|_h^2`.
    pub fisher: f64,
    /// Rao dissipation `sum_ij a_ij <K du_i, K du_j>_h` on centered cell
    /// gradients.
    pub rao: f64,
    /// Intraspecific reaction sink `sum_i b_ii integral u_i^2 ln u_i`.
    pub reaction: f64,
    /// Reaction source `sum_i integral u_i (f_i(u) + b_ii u_i) ln u_i`.
    pub rhs: f64,
}

/// Evaluates all dissipation terms at a single state.
pub fn dissipation(
    grid: &Grid1D,
    params: &ValidatedParams,
    u: &[Vec<f64>],
    op: Option<&BrinkmanOperator>,
) -> Result<DissipationTerms> {
    check_species(grid, params, u)?;
    let n = params.n();
    let m = grid.m();
    let h = grid.h();
    let sigma = params.sigma();

    let mut fisher = 0.0;
    for ui in u {
        let root: Vec<f64> = ui.iter().map(|&z| math::sqrt(z.max(0.0))).collect();
        let g = face_gradient(grid, &root, GradientBc::NoFlux);
        fisher += grid.face_norm_sq(&g);
    }
    fisher *= 4.0 * sigma;

    let mut grads = Vec::with_capacity(n);
    for ui in u {
        grads.push(transform(params, op, &cell_centered_gradient(grid, ui))?);
    }
    let mut rao_term = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = params.a(i, j);
            if a != 0.0 {
                rao_term += a * grid.cell_inner(&grads[i], &grads[j]);
            }
        }
    }

    let mut reaction = 0.0;
    let mut rhs = 0.0;
    for i in 0..n {
        let mut acc_reaction = 0.0;
        let mut acc_rhs = 0.0;
        for k in 0..m {
            let z = u[i][k];
            // f_i + b_ii u_i = b_i0 - sum_{j != i} b_ij u_j.
            let mut growth = params.b0(i);
            for j in 0..n {
                if j != i {
                    growth -= params.b(i, j) * u[j][k];
                }
            }
            acc_reaction += z * xlnx(z);
            acc_rhs += growth * xlnx(z);
        }
        reaction += params.b(i, i) * h * acc_reaction;
        rhs += h * acc_rhs;
    }

    Ok(DissipationTerms {
        fisher,
        rao: rao_term,
        reaction,
        rhs,
    })
}

/// Snapshot of every tracked diagnostic at one output time.
#[derive(Debug, Clone)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// Per-species mass `h sum_k u_ik`.
    pub mass: Vec<f64>,
    /// Per-species sup norm.
    pub linf: Vec<f64>,
    /// Boltzmann entropy.
    pub h1: f64,
    /// Relative Boltzmann entropy; `None` when no positive steady state is
    /// available.
    pub h1_rel: Option<f64>,
    /// Rao entropy.
    pub h2: f64,
    pub dissipation: DissipationTerms,
}

/// Evaluates the full diagnostics record for a state at time `t`.
pub fn record(
    grid: &Grid1D,
    params: &ValidatedParams,
    t: f64,
    u: &[Vec<f64>],
    op: Option<&BrinkmanOperator>,
    steady_levels: Option<&[f64]>,
) -> Result<DiagnosticsRecord> {
    check_species(grid, params, u)?;
    let mass = u.iter().map(|ui| grid.mass(ui)).collect();
    let linf = u.iter().map(|ui| crate::grid::linf(ui)).collect();
    let h1 = boltzmann(grid, u);
    let h1_rel = match steady_levels {
        Some(levels) => Some(boltzmann_relative(grid, u, levels)?),
        None => None,
    };
    let h2 = rao(grid, params, u, op)?;
    let dissipation = dissipation(grid, params, u, op)?;
    Ok(DiagnosticsRecord {
        t,
        mass,
        linf,
        h1,
        h1_rel,
        h2,
        dissipation,
    })
}
