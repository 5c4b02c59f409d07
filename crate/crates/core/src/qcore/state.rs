use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::register::{gather, Dof, Party, QubitLabel, Register};
use crate::error::{Error, Result};

/// Tolerance on `Σ|a|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Which Bell pair a degree of freedom carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellKind {
    /// `(|00> + e^{iφ}|11>)/√2`
    Phi,
    /// `(|01> + e^{iφ}|10>)/√2`
    Psi,
}

/// Normalized pure state on a register of up to six qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct StateVector {
    register: Register,
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    register: Register,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateJson> for StateVector {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        let amps = j
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        StateVector::new(j.register, amps)
    }
}

impl From<StateVector> for StateJson {
    fn from(s: StateVector) -> Self {
        StateJson {
            register: s.register,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl StateVector {
    /// Validates length and normalization.
    pub fn new(register: Register, amplitudes: Vec<Complex64>) -> Result<Self> {
        if register.is_empty() {
            return Err(Error::InvalidState("empty register".into()));
        }
        if amplitudes.len() != register.dim() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for a {}-qubit register",
                amplitudes.len(),
                register.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self {
            register,
            amplitudes,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(register: Register, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(register, amplitudes)
    }

    /// Computational basis ket `|index>`.
    pub fn basis(register: Register, index: usize) -> Result<Self> {
        if index >= register.dim() {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); register.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(register, amps)
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a 2x2 unitary `[[u00, u01], [u10, u11]]` to one qubit.
    pub fn apply_one_qubit(&self, label: QubitLabel, u: [[Complex64; 2]; 2]) -> Result<Self> {
        if !self.register.contains(label) {
            return Err(Error::RegisterConflict(format!(
                "{label} not in {}",
                self.register
            )));
        }
        let bit = self.register.bit(label);
        let mut out = self.amplitudes.clone();
        for i in (0..out.len()).filter(|i| i & bit == 0) {
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | bit];
            out[i] = u[0][0] * a0 + u[0][1] * a1;
            out[i | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
        StateVector::new(self.register, out)
    }

    /// Basis indices with `|amplitude| > cutoff`, paired with the amplitude.
    pub fn support(&self, cutoff: f64) -> Vec<(usize, Complex64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > cutoff)
            .map(|(i, a)| (i, *a))
            .collect()
    }

    /// Physical ket label such as `HH lr II` for a basis index.
    pub fn ket_label(&self, index: usize) -> String {
        let mut groups: Vec<String> = Vec::new();
        let mut current_dof = None;
        for label in self.register.labels() {
            let one = index & self.register.bit(label) != 0;
            let c = match (label.dof, one) {
                (Dof::Pi, false) => 'H',
                (Dof::Pi, true) => 'V',
                (Dof::K, false) => 'l',
                (Dof::K, true) => 'r',
                (Dof::C, false) => 'I',
                (Dof::C, true) => 'E',
            };
            if current_dof != Some(label.dof) {
                groups.push(String::new());
                current_dof = Some(label.dof);
            }
            groups.last_mut().unwrap().push(c);
        }
        groups.join(" ")
    }
}

/// Bell pair between parties A and B in one degree of freedom.
pub fn make_bell(kind: BellKind, phase: f64, dof: Dof) -> Result<StateVector> {
    if !phase.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "phase {phase} is not finite"
        )));
    }
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let rotated = Complex64::from_polar(FRAC_1_SQRT_2, phase);
    let zero = Complex64::new(0.0, 0.0);
    let amps = match kind {
        BellKind::Phi => vec![h, zero, zero, rotated],
        BellKind::Psi => vec![zero, h, rotated, zero],
    };
    StateVector::new(dof.register(), amps)
}

/// `|φ>_pi ⊗ |ψ>_k ⊗ |φ>_c` with the given relative phases.
pub fn hyper_state(phase_pi: f64, phase_k: f64, phase_c: f64) -> Result<StateVector> {
    tensor(&[
        make_bell(BellKind::Phi, phase_pi, Dof::Pi)?,
        make_bell(BellKind::Psi, phase_k, Dof::K)?,
        make_bell(BellKind::Phi, phase_c, Dof::C)?,
    ])
}

/// Kronecker product of states on disjoint registers, in canonical order.
pub fn tensor(factors: &[StateVector]) -> Result<StateVector> {
    let register = joint_register(factors.iter().map(|f| f.register))?;
    let bits: Vec<Vec<usize>> = factors
        .iter()
        .map(|f| register.sub_bits(f.register))
        .collect();
    let amps = (0..register.dim())
        .map(|x| {
            factors
                .iter()
                .zip(&bits)
                .map(|(f, b)| f.amplitudes[gather(x, b)])
                .product()
        })
        .collect();
    StateVector::normalized(register, amps)
}

pub(crate) fn joint_register(regs: impl Iterator<Item = Register>) -> Result<Register> {
    let mut joint = Register::EMPTY;
    for r in regs {
        if !joint.is_disjoint(r) {
            return Err(Error::RegisterConflict(format!("{r} overlaps {joint}")));
        }
        joint = joint.union(r);
    }
    if joint.is_empty() {
        return Err(Error::RegisterConflict("no factors".into()));
    }
    Ok(joint)
}

/// Single-qubit basis ket on `label`.
pub fn qubit(label: QubitLabel, one: bool) -> StateVector {
    StateVector::basis(Register::single(label), usize::from(one)).expect("one-qubit basis state")
}

/// Alice/Bob label shorthand.
pub fn label(party: Party, dof: Dof) -> QubitLabel {
    QubitLabel::new(party, dof)
}
