//! Closed-form Green kernel for `-eps v'' + v = g` on `(-1, 1)` with
//! `v(+-1) = 0`, used as an independent oracle for the matrix-based
//! resolvent and for the velocity bound.
//!
//! With `r = sqrt(eps)` the kernel is
//!
//! ```text
//! U(x, s) = -sinh((1 + min) / r) sinh((1 - max) / r) / (r sinh(2 / r))
//! ```
//!
//! (min/max of x and s). The solution of `-eps v'' + v = g'`, `v(+-1) = 0`
//! can be written after one integration by parts as the integral of
//! `dU/ds` against `g` itself, which is what [`solve`] discretizes with
//! the midpoint rule. The model's transport velocity for unit pressure
//! coefficient solves the same problem with source `-g'`, so it is the
//! negative of [`solve`].
//!
//! Products like `sinh(a) sinh(b) / sinh(c)` overflow for small `eps` if
//! evaluated literally (`sinh(700)` already exceeds the f64 range), so all
//! kernel values are computed in the scaled form
//! `exp(a + b - c) (1 - e^(-2a)) (1 - e^(-2b)) / (2 (1 - e^(-2c)))`
//! whose exponent is never positive here.

use crate::grid::Grid1D;
use crate::math;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Kernel of the Dirichlet resolvent on `(-1, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct GreenKernel {
    eps: f64,
    /// `sqrt(eps)`.
    r: f64,
}

/// `sinh(p) sinh(q) / sinh(c)` for `p, q >= 0`, `p + q <= c`.
fn sinh_sinh_over_sinh(p: f64, q: f64, c: f64) -> f64 {
    0.5 * math::exp(p + q - c) * (1.0 - math::exp(-2.0 * p)) * (1.0 - math::exp(-2.0 * q))
        / (1.0 - math::exp(-2.0 * c))
}

/// `sinh(p) cosh(q) / sinh(c)` under the same constraints.
fn sinh_cosh_over_sinh(p: f64, q: f64, c: f64) -> f64 {
    0.5 * math::exp(p + q - c) * (1.0 - math::exp(-2.0 * p)) * (1.0 + math::exp(-2.0 * q))
        / (1.0 - math::exp(-2.0 * c))
}

/// `cosh(p) cosh(q) / sinh(c)` under the same constraints.
fn cosh_cosh_over_sinh(p: f64, q: f64, c: f64) -> f64 {
    0.5 * math::exp(p + q - c) * (1.0 + math::exp(-2.0 * p)) * (1.0 + math::exp(-2.0 * q))
        / (1.0 - math::exp(-2.0 * c))
}

impl GreenKernel {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::NonPositiveEpsilon { eps });
        }
        Ok(GreenKernel {
            eps,
            r: math::sqrt(eps),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Kernel value `U(x, s)`; nonpositive, zero when either argument is a
    /// wall.
    pub fn u(&self, x: f64, s: f64) -> f64 {
        let (lo, hi) = if x <= s { (x, s) } else { (s, x) };
        let p = (1.0 + lo) / self.r;
        let q = (1.0 - hi) / self.r;
        -sinh_sinh_over_sinh(p, q, 2.0 / self.r) / self.r
    }

    /// `dU/ds (x, s)`. The jump sits on the diagonal; `x = s` takes the
    /// left branch (`x <= s`). For `eps = 1` the midpoint value
    /// `dU/ds(0, 0)` is exactly `sinh(1) cosh(1) / sinh(2) = 1/2`.
    pub fn du_ds(&self, x: f64, s: f64) -> f64 {
        let c = 2.0 / self.r;
        if x <= s {
            sinh_cosh_over_sinh((1.0 + x) / self.r, (1.0 - s) / self.r, c) / self.eps
        } else {
            -sinh_cosh_over_sinh((1.0 - x) / self.r, (1.0 + s) / self.r, c) / self.eps
        }
    }

    /// Kernel of the velocity-derivative representation at `eps = 1`:
    /// `F(x, s) = cosh(1 + min) cosh(1 - max) / sinh(2)`, so that
    /// `v' = -g + integral of g(s) F(x, s) ds`. Only defined for `eps = 1`.
    pub fn f(&self, x: f64, s: f64) -> Result<f64> {
        if self.eps != 1.0 {
            return Err(Error::InvalidExperiment {
                reason: "derivative kernel F is specialized to eps = 1".into(),
            });
        }
        let (lo, hi) = if x <= s { (x, s) } else { (s, x) };
        Ok(cosh_cosh_over_sinh(1.0 + lo, 1.0 - hi, 2.0))
    }
}

/// Midpoint-rule kernel solve `v_k = h sum_s g_s dU/ds(x_k, x_s)` at cell
/// centers: the solution of `-eps v'' + v = g'` with zero walls.
/// Matrix-free; agrees with the face-matrix solve of the same problem at
/// first order in `h` (the diagonal cell contributes an O(h) one-sided
/// bias). The kernel is specific to the interval `(-1, 1)`.
pub fn solve(grid: &Grid1D, kernel: &GreenKernel, g: &[f64]) -> Result<Vec<f64>> {
    if grid.x_left() != -1.0 || grid.x_right() != 1.0 {
        return Err(Error::DomainMismatch {
            x_left: grid.x_left(),
            x_right: grid.x_right(),
        });
    }
    let m = grid.m();
    if g.len() != m {
        return Err(Error::DimensionMismatch {
            what: "cell field",
            expected: m,
            got: g.len(),
        });
    }
    let h = grid.h();
    let mut v = vec![0.0; m];
    for k in 0..m {
        let x = grid.center(k);
        let mut acc = 0.0;
        for s in 0..m {
            acc += g[s] * kernel.du_ds(x, grid.center(s));
        }
        v[k] = h * acc;
    }
    Ok(v)
}

/// Result of the L1 velocity-derivative bound at `eps = 1`.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeBound {
    /// `|v'|_(L1)` from the kernel representation.
    pub lhs: f64,
    /// `(3/2 + coth 2) |g|_(L1)`.
    pub rhs: f64,
    pub pass: bool,
}

/// Checks `|v'|_(L1) <= (3/2 + coth 2) |g|_(L1)` for the `eps = 1` kernel
/// by evaluating `v' = -g + integral g F` with the midpoint rule.
pub fn derivative_bound_check(grid: &Grid1D, g: &[f64]) -> Result<DerivativeBound> {
    let kernel = GreenKernel::new(1.0)?;
    if grid.x_left() != -1.0 || grid.x_right() != 1.0 {
        return Err(Error::DomainMismatch {
            x_left: grid.x_left(),
            x_right: grid.x_right(),
        });
    }
    let m = grid.m();
    if g.len() != m {
        return Err(Error::DimensionMismatch {
            what: "cell field",
            expected: m,
            got: g.len(),
        });
    }
    let h = grid.h();
    let mut lhs = 0.0;
    let mut g_l1 = 0.0;
    for k in 0..m {
        let x = grid.center(k);
        let mut conv = 0.0;
        for s in 0..m {
            conv += g[s] * kernel.f(x, grid.center(s))?;
        }
        lhs += math::abs(-g[k] + h * conv);
        g_l1 += math::abs(g[k]);
    }
    lhs *= h;
    g_l1 *= h;
    let coth2 = math::cosh(2.0) / math::sinh(2.0);
    let rhs = (1.5 + coth2) * g_l1;
    Ok(DerivativeBound {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-6 * (1.0 + rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_derivative_value_is_half() {
        let kernel = GreenKernel::new(1.0).unwrap();
        assert!((kernel.du_ds(0.0, 0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn scaled_form_matches_naive_formula() {
        let kernel = GreenKernel::new(1.0).unwrap();
        for &(x, s) in &[(-0.3, 0.7), (0.2, 0.2), (0.9, -0.9), (0.0, 0.5)] {
            let (lo, hi) = if x <= s { (x, s) } else { (s, x) };
            let naive = -((1.0 + lo) as f64).sinh() * ((1.0 - hi) as f64).sinh() / 2.0f64.sinh();
            assert!(
                (kernel.u(x, s) - naive).abs() < 1e-14,
                "u({x},{s}) mismatch"
            );
            let naive_du = if x <= s {
                ((1.0 + x) as f64).sinh() * ((1.0 - s) as f64).cosh() / 2.0f64.sinh()
            } else {
                -((1.0 - x) as f64).sinh() * ((1.0 + s) as f64).cosh() / 2.0f64.sinh()
            };
            assert!((kernel.du_ds(x, s) - naive_du).abs() < 1e-14);
        }
    }

    #[test]
    fn kernel_vanishes_at_walls_and_is_symmetric() {
        let kernel = GreenKernel::new(0.04).unwrap();
        for &s in &[-0.8, -0.1, 0.5] {
            assert_eq!(kernel.u(-1.0, s), 0.0);
            assert_eq!(kernel.u(1.0, s), 0.0);
            assert!((kernel.u(0.3, s) - kernel.u(s, 0.3)).abs() < 1e-15);
        }
        // Stays finite (no overflow) down to very small eps.
        let tiny = GreenKernel::new(1e-9).unwrap();
        assert!(tiny.u(0.0, 0.0).is_finite());
        assert!(tiny.du_ds(0.1, 0.2).is_finite());
    }

    #[test]
    fn derivative_kernel_is_continuous_across_the_diagonal() {
        let kernel = GreenKernel::new(1.0).unwrap();
        for &x in &[-0.6, 0.0, 0.4] {
            let below = kernel.f(x, x - 1e-12).unwrap();
            let above = kernel.f(x, x + 1e-12).unwrap();
            assert!((below - above).abs() < 1e-9);
        }
        assert!(GreenKernel::new(0.5).unwrap().f(0.0, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(GreenKernel::new(0.0).is_err());
        assert!(GreenKernel::new(-1.0).is_err());
        let grid = Grid1D::new(0.0, 1.0, 8).unwrap();
        let kernel = GreenKernel::new(1.0).unwrap();
        assert!(matches!(
            solve(&grid, &kernel, &[1.0; 8]),
            Err(Error::DomainMismatch { .. })
        ));
    }

    #[test]
    fn constant_density_gives_small_velocity() {
        // Exactly, integral of dU/ds over s is U(x,1) - U(x,-1) = 0; the
        // midpoint rule leaves an O(h) remainder from the diagonal jump.
        let kernel = GreenKernel::new(1.0).unwrap();
        let mut previous = f64::INFINITY;
        for &m in &[32usize, 64, 128] {
            let grid = Grid1D::new(-1.0, 1.0, m).unwrap();
            let v = solve(&grid, &kernel, &vec![1.0; m]).unwrap();
            let worst = crate::grid::linf(&v);
            assert!(worst <= 0.6 * grid.h(), "m={m}: {worst}");
            assert!(worst < previous);
            previous = worst;
        }
    }

    #[test]
    fn l1_bound_holds_for_simple_densities() {
        let grid = Grid1D::new(-1.0, 1.0, 64).unwrap();
        let ones = vec![1.0; 64];
        let b = derivative_bound_check(&grid, &ones).unwrap();
        assert!(b.pass, "lhs={} rhs={}", b.lhs, b.rhs);
        assert!(b.lhs > 0.0);

        let bump: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&x| (-(x * x) / 0.02).exp())
            .collect();
        let b = derivative_bound_check(&grid, &bump).unwrap();
        assert!(b.pass, "lhs={} rhs={}", b.lhs, b.rhs);
    }
}
