//! Pauli-string algebra, stabilizers, witnesses and measurement settings.

pub mod pauli;
pub mod settings;
pub mod witness;

pub use pauli::{pauli_expectation, Expectation, ObservableSum, Pauli, PauliString};
pub use settings::{minimal_settings, settings_required, Basis, Setting};
pub use witness::{
    evaluate_witness, stabilizer, stabilizer_expansion, witness_operator, StabilizerExpansion,
    StabilizerSet, Witness, WitnessForm, WitnessKind,
};
