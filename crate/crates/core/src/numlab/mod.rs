//! Numerical laboratory: transfer matrices in x and t, cocycle residuals, the
//! Möbius action, Weyl m-functions, a spectral KdV solver and bound states.

mod evolve;
pub mod fd;
mod grid;
mod kdv_pde;
mod lft;
mod matrix;
mod mfun;
pub mod ode;
mod spectrum;
mod transfer;

pub use evolve::{
    cocycle_residual, evolve_time, evolve_time_from, joint_cocycle_residual, member_b_numeric,
    minus_j_h, JetTrajectory, JointFlow, TRACE_TOLERANCE,
};
pub use grid::{GridFunction, HamiltonianGrid};
pub use kdv_pde::{
    kdv_evolve, kdv_evolve_with, max_stable_step, soliton, spectral_derivatives, suggested_steps,
    KdvRun, Scheme,
};
pub use lft::{lft_apply, ExtComplex};
pub use matrix::TransferMatrix;
pub use mfun::{
    canonical_m_minus, canonical_m_plus, canonical_shift_residual, m_function_canonical,
    m_function_schrodinger, schrodinger_m_minus, schrodinger_m_plus, schrodinger_shift_residual,
    MFunctionSample,
};
pub use spectrum::{bound_states, bound_states_with, BoundStates};
pub use transfer::{
    canonical_generator, schrodinger_generator, transfer_canonical, transfer_canonical_between,
    transfer_schrodinger, transfer_schrodinger_between, x_cocycle_residual,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("x = {x} lies outside the window [{lo}, {hi}]")]
    OutOfWindow { x: f64, lo: f64, hi: f64 },
    #[error("integration step {step:e} is too small")]
    StepUnderflow { step: f64 },
    #[error("generator has trace of size {trace:e} at t = {t}")]
    NonZeroTrace { t: f64, trace: f64 },
    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("eigenfunction has mass {edge_mass:e} near the window edges (tolerance {tol:e})")]
    WindowTooSmall { edge_mass: f64, tol: f64 },
    #[error("m-function moved by {change:e} when the cutoff changed (tolerance {tol:e})")]
    CutoffTooSmall { change: f64, tol: f64 },
    #[error("solution stopped being finite near {at}")]
    NonFinite { at: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("symbolic evaluation failed: {0}")]
    Symbolic(String),
}
