//! Model parameters, their admissibility checks, and coexistence steady
//! states.
//!
//! Admissible parameters require a symmetric positive definite pressure
//! coupling `a`, nonnegative growth rates `b0`, nonnegative interaction
//! rates with strictly positive intraspecific competition in `b`, and a
//! positive diffusion coefficient `sigma`. The nonlocal velocity model
//! additionally needs `eps > 0`; `eps` is ignored by the local (Darcy)
//! backend.

use crate::linalg;
use crate::math;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Which velocity law closes the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// `-eps lap(v_i) + v_i = -grad(p_i)` with `v_i = 0` at the walls.
    Nonlocal,
    /// Darcy limit `v_i = -grad(p_i)`.
    Local,
}

/// Raw model parameters for `n` species. Matrices are row-major `n x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    /// Pressure coupling: `p_i = sum_j a[i][j] u_j`.
    pub a: Vec<f64>,
    /// Growth rates in `f_i(u) = b0[i] - sum_j b[i][j] u_j`.
    pub b0: Vec<f64>,
    /// Competition matrix of the reaction term.
    pub b: Vec<f64>,
    /// Density diffusion coefficient.
    pub sigma: f64,
    /// Velocity regularization length (squared); `0` only makes sense for
    /// the local backend.
    pub eps: f64,
    pub backend: Backend,
}

impl ModelParams {
    /// Checks admissibility and captures the smallest eigenvalue `alpha` of
    /// the pressure coupling.
    pub fn validate(self) -> Result<ValidatedParams> {
        let n = self.n;
        if n == 0 {
            return Err(Error::DimensionMismatch {
                what: "species count",
                expected: 1,
                got: 0,
            });
        }
        if self.a.len() != n * n {
            return Err(Error::DimensionMismatch {
                what: "pressure matrix a",
                expected: n * n,
                got: self.a.len(),
            });
        }
        if self.b.len() != n * n {
            return Err(Error::DimensionMismatch {
                what: "competition matrix b",
                expected: n * n,
                got: self.b.len(),
            });
        }
        if self.b0.len() != n {
            return Err(Error::DimensionMismatch {
                what: "growth rates b0",
                expected: n,
                got: self.b0.len(),
            });
        }
        for (what, values) in [("a", &self.a), ("b", &self.b), ("b0", &self.b0)] {
            if values.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { what });
            }
        }
        if !self.sigma.is_finite() || !self.eps.is_finite() {
            return Err(Error::NonFinite { what: "sigma/eps" });
        }

        let scale = self.a.iter().fold(0.0f64, |m, &x| m.max(math::abs(x)));
        for i in 0..n {
            for j in (i + 1)..n {
                if math::abs(self.a[i * n + j] - self.a[j * n + i]) > 1e-12 * (1.0 + scale) {
                    return Err(Error::NonSymmetricPressure { i, j });
                }
            }
        }
        let alpha = linalg::min_eigen_sym(&self.a, n)?;
        if alpha <= 0.0 {
            return Err(Error::NonPositiveDefinitePressure { alpha });
        }

        for i in 0..n {
            if self.b0[i] < 0.0 {
                return Err(Error::NegativeRate {
                    coefficient: "b0",
                    i,
                    j: i,
                });
            }
            for j in 0..n {
                let bij = self.b[i * n + j];
                if i == j {
                    if bij <= 0.0 {
                        return Err(Error::NegativeRate {
                            coefficient: "b",
                            i,
                            j,
                        });
                    }
                } else if bij < 0.0 {
                    return Err(Error::NegativeRate {
                        coefficient: "b",
                        i,
                        j,
                    });
                }
            }
        }

        if self.sigma <= 0.0 {
            return Err(Error::NonPositiveSigma { sigma: self.sigma });
        }
        if self.eps < 0.0 || (self.backend == Backend::Nonlocal && self.eps == 0.0) {
            return Err(Error::NonPositiveEpsilon { eps: self.eps });
        }

        Ok(ValidatedParams {
            inner: self,
            alpha,
        })
    }
}

/// Parameters that passed [`ModelParams::validate`], plus the coercivity
/// constant of the pressure coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedParams {
    inner: ModelParams,
    alpha: f64,
}

impl ValidatedParams {
    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.inner.a[i * self.inner.n + j]
    }

    pub fn b0(&self, i: usize) -> f64 {
        self.inner.b0[i]
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.inner.b[i * self.inner.n + j]
    }

    pub fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    pub fn eps(&self) -> f64 {
        self.inner.eps
    }

    pub fn backend(&self) -> Backend {
        self.inner.backend
    }

    /// Smallest eigenvalue of the (symmetrized) pressure coupling.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn params(&self) -> &ModelParams {
        &self.inner
    }

    /// True when the competition matrix is diagonal.
    pub fn b_is_diagonal(&self) -> bool {
        let n = self.inner.n;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.inner.b[i * n + j] != 0.0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Coexistence steady state `u_inf` solving `b u_inf = b0`, together with
/// the smallest eigenvalue `beta` of the symmetrized competition matrix
/// and a lower density bound `mu` (defaults to `min(u_inf)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub u_inf: Vec<f64>,
    pub beta: f64,
    pub mu: f64,
}

impl SteadyState {
    /// Solves for the steady state by partially pivoted elimination.
    pub fn compute(params: &ValidatedParams) -> Result<Self> {
        let n = params.n();
        let b = params.params().b.clone();
        let b0 = params.params().b0.clone();
        let u_inf = linalg::solve_dense(b.clone(), b0.clone(), n, 1e-14)
            .ok_or(Error::SingularCompetitionMatrix)?;

        let b0_scale = b0.iter().fold(0.0f64, |m, &x| m.max(math::abs(x)));
        let mut residual = 0.0f64;
        for i in 0..n {
            let mut acc = -b0[i];
            for j in 0..n {
                acc += b[i * n + j] * u_inf[j];
            }
            residual = residual.max(math::abs(acc));
        }
        if residual > 1e-12 * (1.0 + b0_scale) {
            return Err(Error::SteadyStateResidual { residual });
        }

        let beta = linalg::min_eigen_sym(&b, n)?;
        let mu = u_inf.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(SteadyState { u_inf, beta, mu })
    }

    /// Same steady state with a caller-chosen density floor `mu`.
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// Errors unless every steady-state component is strictly positive.
    pub fn require_positive(&self) -> Result<()> {
        for (i, &v) in self.u_inf.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::NonPositiveSteadyState { species: i, value: v });
            }
        }
        Ok(())
    }
}
