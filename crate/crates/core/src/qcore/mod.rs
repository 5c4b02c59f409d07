//! Dense state representation: Bell and hyperentangled states, partial
//! traces and entanglement entropy.

pub mod density;
pub mod linalg;
pub mod register;
pub mod state;

pub use density::{
    density, entropy_of_entanglement, mix, partial_trace, von_neumann_entropy, DensityMatrix,
};
pub use linalg::{hermitian_eigen, CMatrix, HermitianEigen};
pub use register::{Bipartition, Dof, Party, QubitLabel, Register};
pub use state::{hyper_state, label, make_bell, qubit, tensor, BellKind, StateVector};
