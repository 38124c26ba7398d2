use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong across grid setup, parameter validation,
/// operator assembly, time stepping, and the experiment drivers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Fewer than two cells, or a degenerate/non-finite interval.
    InvalidGrid { reason: &'static str },
    /// A non-finite number where a parameter or state value was expected.
    NonFinite { what: &'static str },
    /// An input vector or matrix has the wrong length for the grid/species count.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Pressure coupling matrix is not symmetric at `(i, j)`.
    NonSymmetricPressure { i: usize, j: usize },
    /// Pressure coupling matrix has smallest eigenvalue `alpha <= 0`.
    NonPositiveDefinitePressure { alpha: f64 },
    /// A reaction coefficient violates its sign constraint: growth rates and
    /// interaction rates must be nonnegative, intraspecific rates positive.
    NegativeRate {
        coefficient: &'static str,
        i: usize,
        j: usize,
    },
    /// Diffusion coefficient `sigma <= 0`.
    NonPositiveSigma { sigma: f64 },
    /// Velocity regularization `eps <= 0` where the nonlocal model requires it.
    NonPositiveEpsilon { eps: f64 },
    /// Competition matrix could not be inverted (pivot below 1e-14).
    SingularCompetitionMatrix,
    /// Computed steady state failed its residual check.
    SteadyStateResidual { residual: f64 },
    /// A steady-state component is not strictly positive where one is needed.
    NonPositiveSteadyState { species: usize, value: f64 },
    /// Green-kernel routines only cover the reference interval `(-1, 1)`.
    DomainMismatch { x_left: f64, x_right: f64 },
    /// Nonlocal velocity requested without an assembled Brinkman operator.
    MissingOperator,
    /// Cutoff function argument outside its domain.
    CutoffDomain { what: &'static str },
    /// A density left `[0, inf)` beyond round-off during a step.
    PositivityLoss {
        species: usize,
        cell: usize,
        value: f64,
        t: f64,
    },
    /// A density became NaN or infinite during a step.
    NonFiniteState { species: usize, t: f64 },
    /// A runtime-checked hypothesis of an experiment failed at time `t`.
    HypothesisViolated { condition: String, t: f64 },
    /// Too few usable samples above the fit floor to estimate a decay rate.
    FitDegenerate { usable: usize },
    /// The paired trajectories of a stability run stopped sharing a step size.
    LockstepViolation { t: f64 },
    /// Experiment configuration is self-inconsistent (e.g. eps sweep not decreasing).
    InvalidExperiment { reason: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid { reason } => write!(f, "invalid grid: {reason}"),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected length {expected}, got {got}"),
            Error::NonSymmetricPressure { i, j } => {
                write!(f, "pressure matrix not symmetric at ({i}, {j})")
            }
            Error::NonPositiveDefinitePressure { alpha } => {
                write!(f, "pressure matrix not positive definite (alpha = {alpha:e})")
            }
            Error::NegativeRate { coefficient, i, j } => {
                if coefficient == &"b0" {
                    write!(f, "growth rate b0[{i}] must be nonnegative")
                } else if i == j {
                    write!(f, "intraspecific rate b[{i}][{j}] must be positive")
                } else {
                    write!(f, "interaction rate b[{i}][{j}] must be nonnegative")
                }
            }
            Error::NonPositiveSigma { sigma } => {
                write!(f, "diffusion coefficient sigma = {sigma:e} must be positive")
            }
            Error::NonPositiveEpsilon { eps } => {
                write!(f, "nonlocal model requires eps > 0, got {eps:e}")
            }
            Error::SingularCompetitionMatrix => {
                write!(f, "competition matrix is singular (pivot below 1e-14)")
            }
            Error::SteadyStateResidual { residual } => {
                write!(f, "steady-state solve residual {residual:e} exceeds tolerance")
            }
            Error::NonPositiveSteadyState { species, value } => {
                write!(f, "steady state of species {species} is {value:e}, not positive")
            }
            Error::DomainMismatch { x_left, x_right } => write!(
                f,
                "Green-kernel routines require the interval (-1, 1), got ({x_left}, {x_right})"
            ),
            Error::MissingOperator => {
                write!(f, "nonlocal velocity requested without a Brinkman operator")
            }
            Error::CutoffDomain { what } => write!(f, "cutoff domain violation: {what}"),
            Error::PositivityLoss {
                species,
                cell,
                value,
                t,
            } => write!(
                f,
                "species {species} lost positivity at cell {cell} (value {value:e}) at t = {t}"
            ),
            Error::NonFiniteState { species, t } => {
                write!(f, "species {species} became non-finite at t = {t}")
            }
            Error::HypothesisViolated { condition, t } => {
                write!(f, "hypothesis violated at t = {t}: {condition}")
            }
            Error::FitDegenerate { usable } => write!(
                f,
                "decay fit degenerate: only {usable} samples above the floor"
            ),
            Error::LockstepViolation { t } => {
                write!(f, "lockstep trajectories diverged at t = {t}")
            }
            Error::InvalidExperiment { reason } => {
                write!(f, "invalid experiment setup: {reason}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
