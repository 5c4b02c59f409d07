//! The six stabilizers of the ideal hyperentangled state and the five
//! entanglement witnesses built from them.
//!
//! Every witness is first written as a real linear combination of
//! stabilizer products ([`StabilizerSet`]s). The same expansion feeds both
//! the operator-level [`witness_operator`] and the table-driven evaluation
//! in [`crate::datalab`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pauli::{Expectation, ObservableSum, Pauli, PauliString};
use crate::error::{Error, Result};
use crate::qcore::{Dof, Party, QubitLabel, Register};

/// `S_index` acting on the full six-qubit register.
///
/// ```text
/// S1 = X_A X_B (pi)   S2 = Z_A Z_B (pi)
/// S3 = X_A X_B (k)    S4 = -Z_A Z_B (k)
/// S5 = X_A X_B (c)    S6 = Z_A Z_B (c)
/// ```
pub fn stabilizer(index: usize) -> Result<PauliString> {
    if !(1..=6).contains(&index) {
        return Err(Error::InvalidIndex(index));
    }
    let dof = Dof::ALL[(index - 1) / 2];
    let letter = if index % 2 == 1 { Pauli::X } else { Pauli::Z };
    let sign = if index == 4 { -1.0 } else { 1.0 };
    PauliString::from_letters(
        Register::FULL,
        sign,
        &[
            (QubitLabel::new(Party::A, dof), letter),
            (QubitLabel::new(Party::B, dof), letter),
        ],
    )
}

/// A set of stabilizer indices, standing for the product of its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StabilizerSet(u8);

impl StabilizerSet {
    pub const EMPTY: StabilizerSet = StabilizerSet(0);

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u8;
        for &i in indices {
            if !(1..=6).contains(&i) {
                return Err(Error::InvalidIndex(i));
            }
            bits |= 1 << (i - 1);
        }
        Ok(StabilizerSet(bits))
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (1..=6).filter(move |i| self.0 & (1 << (i - 1)) != 0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: StabilizerSet) -> StabilizerSet {
        StabilizerSet(self.0 | other.0)
    }

    /// True when no degree of freedom contributes both of its stabilizers.
    pub fn one_per_dof(self) -> bool {
        (0..3).all(|d| (self.0 >> (2 * d)) & 0b11 != 0b11)
    }

    /// Product of the member stabilizers.
    pub fn operator(self) -> PauliString {
        self.indices()
            .map(|i| stabilizer(i).expect("index in range"))
            .fold(PauliString::identity(Register::FULL), |acc, s| {
                acc.mul(&s).expect("stabilizers commute")
            })
    }

    /// All 64 subsets of `{1..6}`.
    pub fn all() -> impl Iterator<Item = StabilizerSet> {
        (0u8..64).map(StabilizerSet)
    }
}

impl fmt::Display for StabilizerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for i in self.indices() {
            write!(f, "S{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    Wpi,
    Wk,
    Wc,
    W2,
    W3,
}

impl WitnessKind {
    pub const ALL: [WitnessKind; 5] = [
        WitnessKind::Wpi,
        WitnessKind::Wk,
        WitnessKind::Wc,
        WitnessKind::W2,
        WitnessKind::W3,
    ];

    /// The degree of freedom a per-DOF witness targets.
    pub fn dof(self) -> Option<Dof> {
        match self {
            WitnessKind::Wpi => Some(Dof::Pi),
            WitnessKind::Wk => Some(Dof::K),
            WitnessKind::Wc => Some(Dof::C),
            _ => None,
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WitnessKind::Wpi => "Wpi",
            WitnessKind::Wk => "Wk",
            WitnessKind::Wc => "Wc",
            WitnessKind::W2 => "W2",
            WitnessKind::W3 => "W3",
        };
        f.write_str(s)
    }
}

impl FromStr for WitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wpi" | "w_pi" => Ok(WitnessKind::Wpi),
            "wk" | "w_k" => Ok(WitnessKind::Wk),
            "wc" | "w_c" => Ok(WitnessKind::Wc),
            "w2" | "w_2" => Ok(WitnessKind::W2),
            "w3" | "w_3" => Ok(WitnessKind::W3),
            _ => Err(Error::parse("witness", format!("unknown witness `{s}`"))),
        }
    }
}

/// Coefficient convention for the per-DOF witnesses.
///
/// `AsPrinted` is `1 - 2·S_odd - 2·S_even` (bottoming out at -3 on the ideal
/// state). `AsEvaluated` is `1 - S_odd - S_even`, the form that reproduces
/// the measured per-DOF values from the stabilizer table. W2 and W3 have a
/// single form and ignore this setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessForm {
    #[default]
    AsEvaluated,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub form: WitnessForm,
}

impl Witness {
    pub fn new(kind: WitnessKind) -> Self {
        Self {
            kind,
            form: WitnessForm::AsEvaluated,
        }
    }

    pub fn printed(kind: WitnessKind) -> Self {
        Self {
            kind,
            form: WitnessForm::AsPrinted,
        }
    }
}

impl From<WitnessKind> for Witness {
    fn from(kind: WitnessKind) -> Self {
        Witness::new(kind)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind.dof(), self.form) {
            (Some(_), WitnessForm::AsPrinted) => write!(f, "{} (printed)", self.kind),
            _ => write!(f, "{}", self.kind),
        }
    }
}

/// A witness written as `constant + Σ coefficient · <product of stabilizers>`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerExpansion {
    pub constant: f64,
    pub terms: Vec<(f64, StabilizerSet)>,
}

fn odd(d: usize) -> StabilizerSet {
    StabilizerSet(1 << (2 * d))
}

fn even(d: usize) -> StabilizerSet {
    StabilizerSet(1 << (2 * d + 1))
}

/// Expands the witness into stabilizer products.
///
/// W2 = 3 - 2(Π_k (S_2k + 1)/2 + Π_k (S_2k-1 + 1)/2): each product of three
/// projector factors contributes `1/8` per subset, so every nonempty subset
/// of the even (odd) stabilizers carries weight `-1/4`.
///
/// W3 = 2 - 3 Π_k (1 + S_2k-1 + S_2k)/3: the 27 terms of the product each
/// carry weight `-1/9`; the all-identity one folds into the constant.
pub fn stabilizer_expansion(w: Witness) -> StabilizerExpansion {
    match w.kind {
        WitnessKind::Wpi | WitnessKind::Wk | WitnessKind::Wc => {
            let d = w.kind.dof().expect("per-DOF witness").index();
            let c = match w.form {
                WitnessForm::AsEvaluated => 1.0,
                WitnessForm::AsPrinted => 2.0,
            };
            StabilizerExpansion {
                constant: 1.0,
                terms: vec![(-c, odd(d)), (-c, even(d))],
            }
        }
        WitnessKind::W2 => {
            let mut terms = Vec::with_capacity(14);
            for pick in [even, odd] {
                for mask in 1u8..8 {
                    let set = (0..3)
                        .filter(|d| mask & (1 << d) != 0)
                        .fold(StabilizerSet::EMPTY, |acc, d| acc.union(pick(d)));
                    terms.push((-0.25, set));
                }
            }
            StabilizerExpansion {
                constant: 3.0 - 2.0 * 2.0 / 8.0,
                terms,
            }
        }
        WitnessKind::W3 => {
            let mut terms = Vec::with_capacity(26);
            for code in 1..27usize {
                let set = (0..3).fold(StabilizerSet::EMPTY, |acc, d| {
                    match code / 3usize.pow(d as u32) % 3 {
                        1 => acc.union(odd(d)),
                        2 => acc.union(even(d)),
                        _ => acc,
                    }
                });
                terms.push((-1.0 / 9.0, set));
            }
            StabilizerExpansion {
                constant: 2.0 - 1.0 / 9.0,
                terms,
            }
        }
    }
}

/// The witness as an explicit sum of Pauli strings on all six qubits.
pub fn witness_operator(w: Witness) -> ObservableSum {
    let exp = stabilizer_expansion(w);
    let mut sum = ObservableSum::new(exp.constant);
    for (c, set) in exp.terms {
        sum.push(c, set.operator());
    }
    sum
}

/// `<W>` on a six-qubit state; negative values certify entanglement.
pub fn evaluate_witness(state: &impl Expectation, w: impl Into<Witness>) -> Result<f64> {
    if state.register() != Register::FULL {
        return Err(Error::RegisterConflict(format!(
            "witnesses need the full six-qubit register, got {}",
            state.register()
        )));
    }
    witness_operator(w.into()).expectation(state)
}
