//! Steady-state and time-domain solver for a laser-driven three-level
//! system in which an optically active level is tunnel-coupled to a dark
//! level. The density matrix evolves under a linear generator built from
//! the drive strength, laser detuning, tunneling amplitude, and a set of
//! dephasing and relaxation rates; two independent solution routes (direct
//! linear solve and relaxation in time) cross-check each other, and sweep
//! drivers map out absorption/dispersion spectra and level populations
//! against detuning, drive strength, or tunneling amplitude.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod observe;
pub mod output;
pub mod solve;
pub mod state;

pub use config::{parse_config, Notice, RunConfig};
pub use dynamics::{assemble_generator, rhs, GeneratorMatrix};
pub use error::{Error, Result};
pub use model::{derive_delta2, EquationMode, ModelParams};
pub use observe::{
    coherence_rho10, dispersion_slope_at_resonance, find_local_extrema, run_sweep,
    transparency_metrics, Column, Extremum, ExtremumKind, SweepFailure, SweepResult, SweepRow,
    SweepSpec, SweptParam, TransparencyMetrics,
};
pub use solve::{
    integrate, residual_norm, steady_state_direct, steady_state_relax, SolverSettings, Trajectory,
};
pub use state::{DensityMatrix, RealStateVector};
