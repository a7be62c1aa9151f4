//! Numerics for heat, work, and free-energy accounting in correlated
//! quantum states.
//!
//! The crate works on dense density matrices of small dimension (joint
//! spaces capped at 64). It provides:
//!
//! - [`linalg`]: the Hermitian linear-algebra kernel (eigendecomposition,
//!   matrix functions, tensor products, partial traces),
//! - [`states`]: constructors for Gibbs states, correlated system-bath
//!   states, and seeded random states,
//! - [`thermo`]: entropic and energetic functionals (von Neumann and
//!   conditional entropy, mutual information, free energies, heats),
//! - [`process`]: entropy-preserving transitions and the unitaries that
//!   realize them,
//! - [`laws`]: verifiers that turn a transition into structured
//!   pass/fail reports for the thermodynamic laws,
//! - [`optimize`]: derivative-free search over energy-preserving block
//!   unitaries for anomalous heat flows.
//!
//! Units are natural throughout: k = 1, temperatures are energies, and
//! entropies are computed in nats (reports also carry bits).

pub mod error;
pub mod laws;
pub mod linalg;
pub mod optimize;
pub mod process;
pub mod states;
pub mod thermo;

pub use error::{Error, Result};
pub use laws::{Law, LawReport};
pub use linalg::{BipartiteLayout, CMatrix, CVector, Spectrum, DIM_CAP};
pub use optimize::{SearchConfig, SearchResult};
pub use process::Transition;
pub use states::{DensityMatrix, Hamiltonian};
pub use thermo::{EnergyValue, EntropyValue};
