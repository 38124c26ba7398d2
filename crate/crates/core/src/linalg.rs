//! Small dense and tridiagonal linear algebra.
//!
//! The species count `n` is tiny, so dense work (steady states, smallest
//! eigenvalue of the interaction matrices) uses partially pivoted
//! elimination and cyclic Jacobi sweeps. Mesh-sized systems are
//! tridiagonal: solves go through the Thomas algorithm with a reusable
//! factorization, and the spectral decomposition needed for the
//! square-root resolvent uses an implicit-shift QL iteration in the
//! EISPACK/Jama tradition.

use crate::math;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Smallest eigenvalue of a symmetric `n x n` matrix (row-major).
///
/// The input is symmetrized as `(m + m^T) / 2` first, then reduced by
/// cyclic Jacobi rotations until every off-diagonal entry is below 1e-12
/// in absolute value.
pub fn min_eigen_sym(matrix: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::DimensionMismatch {
            what: "min_eigen_sym matrix",
            expected: 1,
            got: 0,
        });
    }
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            what: "min_eigen_sym matrix",
            expected: n * n,
            got: matrix.len(),
        });
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "min_eigen_sym matrix",
        });
    }

    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (matrix[i * n + j] + matrix[j * n + i]);
        }
    }

    const TOL: f64 = 1e-12;
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off_max = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off_max = off_max.max(math::abs(a[p * n + q]));
            }
        }
        if off_max <= TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if math::abs(apq) <= TOL {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut min = f64::INFINITY;
    for i in 0..n {
        min = min.min(a[i * n + i]);
    }
    Ok(min)
}

/// Solves a dense `n x n` system by Gaussian elimination with partial
/// pivoting. Returns `None` when the best available pivot falls below
/// `pivot_floor`. Inputs are row-major and consumed.
pub(crate) fn solve_dense(
    mut a: Vec<f64>,
    mut b: Vec<f64>,
    n: usize,
    pivot_floor: f64,
) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = math::abs(a[col * n + col]);
        for row in (col + 1)..n {
            let mag = math::abs(a[row * n + col]);
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if !(pivot_mag >= pivot_floor) {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = b;
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in (col + 1)..n {
            acc -= a[col * n + k] * x[k];
        }
        x[col] = acc / a[col * n + col];
    }
    Some(x)
}

/// General tridiagonal matrix. `sub[i]` couples row `i + 1` to column `i`,
/// `sup[i]` couples row `i` to column `i + 1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub sub: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Thomas-algorithm factorization for repeated solves. Valid for the
    /// diagonally dominant systems assembled in this crate; a vanishing
    /// pivot is reported as an error rather than repaired.
    pub fn factor(&self) -> Result<FactoredTridiagonal> {
        let n = self.dim();
        let mut cp = vec![0.0; n];
        let mut inv_d = vec![0.0; n];
        let mut denom = self.diag[0];
        for i in 0..n {
            if i > 0 {
                denom = self.diag[i] - self.sub[i - 1] * cp[i - 1];
            }
            if !(math::abs(denom) > 0.0) || !denom.is_finite() {
                return Err(Error::NonFinite {
                    what: "tridiagonal pivot",
                });
            }
            inv_d[i] = 1.0 / denom;
            if i + 1 < n {
                cp[i] = self.sup[i] * inv_d[i];
            }
        }
        Ok(FactoredTridiagonal {
            cp,
            inv_d,
            sub: self.sub.clone(),
        })
    }
}

/// Reusable Thomas factorization of a [`Tridiagonal`] matrix.
#[derive(Debug, Clone)]
pub struct FactoredTridiagonal {
    cp: Vec<f64>,
    inv_d: Vec<f64>,
    sub: Vec<f64>,
}

impl FactoredTridiagonal {
    pub fn dim(&self) -> usize {
        self.inv_d.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        x[0] *= self.inv_d[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i - 1] * x[i - 1]) * self.inv_d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.cp[i] * x[i + 1];
        }
    }
}

/// Full eigendecomposition of a symmetric tridiagonal matrix.
///
/// `values` are ascending; `vector(j)` is the orthonormal eigenvector for
/// `values[j]`, stored contiguously.
#[derive(Debug, Clone)]
pub struct SymTridiagEigen {
    pub values: Vec<f64>,
    vectors: Vec<f64>,
    n: usize,
}

impl SymTridiagEigen {
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }
}

/// Implicit-shift QL iteration (tql2) for a symmetric tridiagonal matrix
/// with diagonal `diag` and subdiagonal `sub` (`sub[i]` couples `i` and
/// `i + 1`), accumulating eigenvectors.
pub fn sym_tridiag_eigen(diag: &[f64], sub: &[f64]) -> Result<SymTridiagEigen> {
    let n = diag.len();
    if n == 0 || sub.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            what: "sym_tridiag_eigen subdiagonal",
            expected: n.saturating_sub(1),
            got: sub.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { sub[i] } else { 0.0 }).collect();
    // Rows of `vt` accumulate the eigenvectors (transposed layout keeps the
    // rotation loop contiguous).
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(math::abs(d[l]) + math::abs(e[l]));
        let mut m = l;
        while m < n - 1 {
            if math::abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NonFinite {
                        what: "tql2 failed to converge",
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = math::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in (l + 2)..n {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g2 = c * e[i];
                    h = c * p;
                    r = math::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g2;
                    d[i + 1] = h + s * (c * g2 + s * d[i]);
                    let (upper, lower) = vt.split_at_mut((i + 1) * n);
                    let row_i = &mut upper[i * n..];
                    let row_i1 = &mut lower[..n];
                    for k in 0..n {
                        let hk = row_i1[k];
                        row_i1[k] = s * row_i[k] + c * hk;
                        row_i[k] = c * row_i[k] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if math::abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(core::cmp::Ordering::Equal));
    let mut values = Vec::with_capacity(n);
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        values.push(d[src]);
        vectors[dst * n..(dst + 1) * n].copy_from_slice(&vt[src * n..(src + 1) * n]);
    }
    Ok(SymTridiagEigen {
        values,
        vectors,
        n,
    })
}
