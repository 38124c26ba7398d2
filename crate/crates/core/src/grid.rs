//! Uniform cell-centered mesh on an interval, plus the discrete norms and
//! inner products the rest of the crate measures with.
//!
//! The mesh splits `(x_left, x_right)` into `m` cells of width `h`. Cell
//! centers sit at `x_left + (k + 1/2) h`; faces at `x_left + k h` include
//! the two walls. Cell quantities use the weight `h` per cell. Face
//! quantities use weight `h` on interior faces and `h/2` on the two wall
//! faces (the dual cell of a wall face is half-width); that choice makes
//! the discrete energy identity of the Brinkman resolvent exact rather
//! than approximate.

use crate::math;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Uniform cell-centered 1-D mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x_left: f64,
    x_right: f64,
    m: usize,
    h: f64,
}

impl Grid1D {
    /// Builds a mesh with `m >= 2` cells over a finite increasing interval.
    pub fn new(x_left: f64, x_right: f64, m: usize) -> Result<Self> {
        if !x_left.is_finite() || !x_right.is_finite() {
            return Err(Error::InvalidGrid {
                reason: "endpoints must be finite",
            });
        }
        if x_right <= x_left {
            return Err(Error::InvalidGrid {
                reason: "x_right must exceed x_left",
            });
        }
        if m < 2 {
            return Err(Error::InvalidGrid {
                reason: "at least two cells required",
            });
        }
        let h = (x_right - x_left) / m as f64;
        Ok(Grid1D {
            x_left,
            x_right,
            m,
            h,
        })
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    /// Number of cells.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of faces, including both walls.
    pub fn faces(&self) -> usize {
        self.m + 1
    }

    /// Center of cell `k`.
    pub fn center(&self, k: usize) -> f64 {
        debug_assert!(k < self.m);
        self.x_left + (k as f64 + 0.5) * self.h
    }

    /// Position of face `k` (`k = 0` and `k = m` are the walls).
    pub fn face(&self, k: usize) -> f64 {
        debug_assert!(k <= self.m);
        self.x_left + k as f64 * self.h
    }

    /// All cell centers, left to right.
    pub fn centers(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.center(k)).collect()
    }

    /// `h * sum(u)`, the discrete integral of a cell field.
    pub fn mass(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.m);
        self.h * u.iter().sum::<f64>()
    }

    /// `h * sum(u * w)` over cells.
    pub fn cell_inner(&self, u: &[f64], w: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.m);
        debug_assert_eq!(w.len(), self.m);
        self.h * u.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Discrete L2 norm of a cell field.
    pub fn cell_norm(&self, u: &[f64]) -> f64 {
        math::sqrt(self.cell_inner(u, u))
    }

    /// Inner product of face fields with half-weighted wall faces.
    pub fn face_inner(&self, g: &[f64], w: &[f64]) -> f64 {
        debug_assert_eq!(g.len(), self.m + 1);
        debug_assert_eq!(w.len(), self.m + 1);
        let mut acc = 0.5 * (g[0] * w[0] + g[self.m] * w[self.m]);
        for k in 1..self.m {
            acc += g[k] * w[k];
        }
        self.h * acc
    }

    /// Squared discrete L2 norm of a face field (half-weighted walls).
    pub fn face_norm_sq(&self, g: &[f64]) -> f64 {
        self.face_inner(g, g)
    }

    /// True when two meshes are bit-identical (same interval, same cells).
    pub fn same_mesh(&self, other: &Grid1D) -> bool {
        self.x_left == other.x_left && self.x_right == other.x_right && self.m == other.m
    }
}

/// Max-norm of a slice.
pub fn linf(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |acc, &x| acc.max(math::abs(x)))
}
