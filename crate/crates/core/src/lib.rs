//! Simulation and analysis of two-photon states hyperentangled in
//! polarization and two longitudinal-momentum degrees of freedom.
//!
//! - [`qcore`]: dense six-qubit states, partial traces, entanglement entropy
//! - [`observables`]: Pauli strings, the six stabilizers, the five witnesses
//!   and measurement-setting counts
//! - [`noise`]: noise channels and witness robustness thresholds
//! - [`datalab`]: witnesses from measured stabilizer tables with uncertainties
//! - [`fringe`]: coincidence interference patterns and visibility fits

pub mod datalab;
pub mod error;
pub mod fringe;
pub mod noise;
pub mod observables;
pub mod qcore;

pub use error::{Error, Result};

pub use datalab::{
    counts_to_expectation, parse_table, witness_from_measurements, CoincidenceQuad, MeasuredValue,
    StabilizerTable,
};
pub use fringe::{
    coincidence_rate, delay_grid, fit_visibility, pattern, read_pattern_csv, sample_pattern,
    write_pattern_csv, FringeConfig, PatternPoint, Stage, VisibilityFit,
};
pub use noise::{
    dephase_dof, dof_white_noise, visibility_state, white_noise, witness_noise_threshold,
    NoiseChannel, NoiseModel, PerDof,
};
pub use observables::{
    evaluate_witness, minimal_settings, pauli_expectation, settings_required, stabilizer,
    stabilizer_expansion, witness_operator, ObservableSum, Pauli, PauliString, StabilizerSet,
    Witness, WitnessForm, WitnessKind,
};
pub use qcore::{
    density, entropy_of_entanglement, hyper_state, make_bell, mix, partial_trace, tensor,
    von_neumann_entropy, BellKind, Bipartition, DensityMatrix, Dof, Party, QubitLabel, Register,
    StateVector,
};
