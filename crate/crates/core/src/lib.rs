//! Finite-volume kernels for a cross-diffusion population model with a
//! Brinkman-regularized velocity field.
//!
//! The model tracks `n` nonnegative densities `u_1..u_n` on an interval,
//! coupled through pressures `p_i = sum_j a_ij u_j` and Lotka-Volterra
//! reactions `u_i f_i(u)` with `f_i(u) = b_i0 - sum_j b_ij u_j`:
//!
//! ```text
//! d_t u_i - sigma lap(u_i) + div(u_i v_i) = u_i f_i(u)
//! -eps lap(v_i) + v_i = -grad(p_i)        v_i = 0 on the boundary
//! (sigma grad(u_i) + u_i v_i) . nu = 0    no-flux for the densities
//! ```
//!
//! Setting `eps = 0` collapses the velocity law to the local Darcy form
//! `v_i = -grad(p_i)`.
//!
//! The discretization is a uniform cell-centered mesh with velocities on
//! faces, upwind advection, explicit reactions, and implicit diffusion.
//! That combination keeps densities nonnegative under the advertised step
//! size restriction and conserves mass up to the explicit reaction budget.
//!
//! Alongside the solver the crate carries the verification surface it is
//! really about: resolvent and square-root-resolvent operators with their
//! energy identities, an independent Green-kernel solver for the velocity
//! equation on `(-1, 1)`, Boltzmann/Rao entropy functionals with
//! dissipation bookkeeping, truncated-power cutoff functions with their
//! inequality suite, and experiment drivers (entropy decay, localization
//! in `eps`, quadratic stability, boundedness).
//!
//! The crate is `no_std`-compatible: disable the default `std` feature and
//! enable `libm` to route transcendentals through software floats.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod brinkman;
pub mod cutoff;
pub mod dynamics;
pub mod entropy;
mod error;
pub mod experiments;
pub mod green;
pub mod grid;
pub mod linalg;
mod math;
pub mod params;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use params::{Backend, ModelParams, SteadyState, ValidatedParams};
