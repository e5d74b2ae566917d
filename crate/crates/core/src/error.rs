use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("radius not estimable: {0}")]
    NotEstimable(String),

    /// The exact solution has a real pole between the origin and the requested time.
    #[error("solution blows up at t = {pole}")]
    BlowUp { pole: f64 },

    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root finder did not converge after {iterations} iterations")]
    RootNotConverged { iterations: usize },

    /// The requested abscissa is too close to the logarithmic singularity of t(x).
    #[error("x = {x} is within the singular guard of x_limit = {x_limit}")]
    NearSingular { x: f64, x_limit: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (error estimate {estimate:e})")]
    Accuracy { tol: f64, estimate: f64 },

    #[error("epidemic analysis failed: {0}")]
    Analysis(String),

    /// Multistage stepping produced a non-finite or runaway state.
    #[error("multistage series diverged at step {step} (t = {time})")]
    Divergence { step: usize, time: f64 },

    /// Reference integrator could not keep the error below tolerance.
    #[error("step size underflow at t = {time} (last good time)")]
    StepUnderflow { time: f64 },
}
