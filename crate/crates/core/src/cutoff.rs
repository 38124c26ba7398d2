//! Truncated nonlinearities used by the entropy estimates: the clipped
//! power `S_N^gamma`, its second antiderivative `R_N^gamma`, and the
//! algebraic inequalities that couple them.
//!
//! For `z <= N` the functions coincide with the plain power/log versions;
//! beyond `N` they continue linearly (first order) so that growth is
//! tamed while convexity survives:
//!
//! ```text
//! S_N^0(z)     = ln z                 (z <= N),  ln N + (z - N)/N
//! S_N^g(z)     = z^g / g              (z <= N),  N^g/g + N^(g-1) (z - N)
//! R_N^1(z)     = z (ln z - 1)         (z <= N),  quadratic continuation
//! R_N^g(z)     = integral_0^z S_N^(g-1)          (g > 1, quadrature)
//! ```
//!
//! `R_N^gamma` for `gamma > 1` is evaluated by adaptive Simpson
//! quadrature of `S_N^(gamma-1)` split at the kink `s = N`; the integrand
//! is smooth on each side, so the 1e-10 relative tolerance is met with a
//! handful of refinements. The closed form of that integral is kept out of
//! the production path on purpose: the module tests pin the quadrature
//! against it as an independent oracle.

use crate::math;
use crate::{Error, Result};

/// Lower admissible truncation level, `e^2`.
pub const MIN_LEVEL: f64 = 7.38905609893065;

/// `clip(z) = min(max(z, 0), N)`.
pub fn clip(z: f64, level: f64) -> f64 {
    z.clamp(0.0, level)
}

fn check_domain(z: f64, gamma: f64, level: f64, min_gamma: f64) -> Result<()> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::CutoffDomain {
            what: "argument must be finite and nonnegative",
        });
    }
    if !gamma.is_finite() || gamma < min_gamma {
        return Err(Error::CutoffDomain {
            what: "exponent out of range",
        });
    }
    if !level.is_finite() || level < MIN_LEVEL {
        return Err(Error::CutoffDomain {
            what: "truncation level below e^2",
        });
    }
    Ok(())
}

/// Truncated power `S_N^gamma(z)` (`gamma = 0` is the log variant, which
/// needs `z > 0`).
pub fn s_cutoff(z: f64, gamma: f64, level: f64) -> Result<f64> {
    check_domain(z, gamma, level, 0.0)?;
    if gamma == 0.0 {
        if z == 0.0 {
            return Err(Error::CutoffDomain {
                what: "log variant needs a positive argument",
            });
        }
        return Ok(if z <= level {
            math::ln(z)
        } else {
            math::ln(level) + (z - level) / level
        });
    }
    Ok(if z <= level {
        math::powf(z, gamma) / gamma
    } else {
        math::powf(level, gamma) / gamma + math::powf(level, gamma - 1.0) * (z - level)
    })
}

/// Adaptive Simpson on `[a, b]` with one-level error estimation; `tol` is
/// absolute on the segment.
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || math::abs(delta) <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates with a tolerance relative to the segment's own coarse
/// estimate, so tiny and astronomically large integrals are resolved to
/// the same number of digits.
fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rel_tol * (1.0 + math::abs(whole));
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Second-kind truncation `R_N^gamma(z)`: the antiderivative of
/// `S_N^(gamma-1)` vanishing (for `gamma = 1`: with slope `ln z`) at the
/// natural origin. `gamma = 1` uses the closed form built on `z (ln z -
/// 1)`; `gamma > 1` integrates the truncated power numerically.
pub fn r_cutoff(z: f64, gamma: f64, level: f64) -> Result<f64> {
    check_domain(z, gamma, level, 1.0)?;
    if gamma == 1.0 {
        return Ok(if z <= level {
            if z == 0.0 {
                0.0
            } else {
                z * (math::ln(z) - 1.0)
            }
        } else {
            let excess = z - level;
            level * (math::ln(level) - 1.0)
                + excess * math::ln(level)
                + excess * excess / (2.0 * level)
        });
    }
    let g = gamma - 1.0;
    // Split at the kink so each segment sees a smooth integrand.
    let inner_end = z.min(level);
    let mut total = integrate(|s| math::powf(s, g) / g, 0.0, inner_end, 1e-11);
    if z > level {
        let s_level = math::powf(level, g) / g;
        let slope = math::powf(level, g - 1.0);
        total += integrate(|s| s_level + slope * (s - level), level, z, 1e-11);
    }
    Ok(total)
}

/// Outcome of the randomized inequality sweep.
#[derive(Debug, Clone, Copy)]
pub struct CutoffSuiteReport {
    pub samples: usize,
    /// Count of samples whose normalized violation exceeded 1e-9.
    pub violations: usize,
    /// Largest normalized violation seen (negative means all slack).
    pub max_violation: f64,
}

/// Normalized violation of `lhs <= rhs`.
fn violation(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / (1.0 + math::abs(lhs) + math::abs(rhs))
}

/// Samples `(z, gamma, N)` triples and checks the four coupling
/// inequalities:
///
/// 1. `clip(z) S_N^g(z) <= (1/g) ((g+1)/2)^2 S_N^((g+1)/2)(z)^2`
/// 2. `clip(z)^((g+1)/2) <= ((g+1)/2) S_N^((g+1)/2)(z)`
/// 3. `R_N^g(z) >= S_N^g(z) / (g - 1)`
/// 4. `R_N^(2g)(z) <= g (g-1)^2 / (2 (2g-1)) R_N^g(z)^2`
///
/// with `gamma in (1, 8]`, `N in [e^2, 100]`, `z in [0, 3N]`. For `z <= N`
/// the first three hold with equality, so the interesting regime is the
/// linear continuation.
pub fn inequality_suite(samples: usize, seed: u64) -> Result<CutoffSuiteReport> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0usize;
    for _ in 0..samples {
        let level = rng.random_range(MIN_LEVEL..100.0);
        let gamma = rng.random_range(1.0f64..8.0).max(1.0 + 1e-6);
        let z = rng.random_range(0.0..3.0 * level);
        let half = 0.5 * (gamma + 1.0);

        let s_g = s_cutoff(z, gamma, level)?;
        let s_half = s_cutoff(z, half, level)?;
        let mut sample_worst = violation(clip(z, level) * s_g, half * half / gamma * s_half * s_half);
        sample_worst = sample_worst.max(violation(math::powf(clip(z, level), half), half * s_half));

        let r_g = r_cutoff(z, gamma, level)?;
        sample_worst = sample_worst.max(violation(s_g / (gamma - 1.0), r_g));

        let r_2g = r_cutoff(z, 2.0 * gamma, level)?;
        let coeff = gamma * (gamma - 1.0) * (gamma - 1.0) / (2.0 * (2.0 * gamma - 1.0));
        sample_worst = sample_worst.max(violation(r_2g, coeff * r_g * r_g));

        if sample_worst > 1e-9 {
            violations += 1;
        }
        worst = worst.max(sample_worst);
    }
    Ok(CutoffSuiteReport {
        samples,
        violations,
        max_violation: worst,
    })
}
