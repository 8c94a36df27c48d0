//! Composite-system assembly and time evolution.

mod dop853_tableau;
pub mod hamiltonian;
pub mod integrate;
pub mod master;
pub mod operator;
pub mod state;
pub mod system;
pub mod trajectories;

pub use hamiltonian::{build_hamiltonian, build_jump_operators, compile, Generator};
pub use integrate::{IntegratorConfig, Method, Stats};
pub use master::{evolve_dense, evolve_dense_sampled, DenseRun, DENSE_CAP};
pub use state::{expectation, project, DensityMatrix, Ensemble, QuantumState, StateVector};
pub use system::{CompositeSystem, PairTerm};
pub use trajectories::{evolve_trajectories, TrajectoryRun};
