//! Qubit labels and registers.
//!
//! Six qubits exist: one per party (A, B) for each of the three degrees of
//! freedom (polarization, the left/right momentum mode and the
//! internal/external emission cone). The canonical order is
//! `pi_A, pi_B, k_A, k_B, c_A, c_B`, and basis indices are big-endian in
//! that order: the first qubit of a register is the most significant bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    A,
    B,
}

/// Photonic degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dof {
    /// Polarization, `H -> 0`, `V -> 1`.
    Pi,
    /// Left/right longitudinal momentum mode, `l -> 0`, `r -> 1`.
    K,
    /// Internal/external emission cone, `I -> 0`, `E -> 1`.
    C,
}

impl Dof {
    pub const ALL: [Dof; 3] = [Dof::Pi, Dof::K, Dof::C];

    pub fn index(self) -> usize {
        match self {
            Dof::Pi => 0,
            Dof::K => 1,
            Dof::C => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dof::Pi => "pi",
            Dof::K => "k",
            Dof::C => "c",
        }
    }

    /// Both qubits (A and B) of this degree of freedom.
    pub fn register(self) -> Register {
        Register::from_labels(&[
            QubitLabel::new(Party::A, self),
            QubitLabel::new(Party::B, self),
        ])
    }
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dof {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" | "Pi" | "PI" => Ok(Dof::Pi),
            "k" | "K" => Ok(Dof::K),
            "c" | "C" => Ok(Dof::C),
            _ => Err(Error::parse(
                "dof",
                format!("unknown degree of freedom `{s}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitLabel {
    pub party: Party,
    pub dof: Dof,
}

impl QubitLabel {
    pub const fn new(party: Party, dof: Dof) -> Self {
        Self { party, dof }
    }

    /// Position in the canonical six-qubit order.
    pub fn canonical_index(self) -> usize {
        2 * self.dof.index()
            + match self.party {
                Party::A => 0,
                Party::B => 1,
            }
    }

    pub fn from_canonical_index(i: usize) -> Self {
        let dof = Dof::ALL[i / 2];
        let party = if i.is_multiple_of(2) {
            Party::A
        } else {
            Party::B
        };
        Self { party, dof }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let party = match self.party {
            Party::A => "A",
            Party::B => "B",
        };
        write!(f, "{}_{}", self.dof.name(), party)
    }
}

impl FromStr for QubitLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (dof, party) = s
            .split_once('_')
            .ok_or_else(|| Error::parse("label", format!("expected `<dof>_<party>`, got `{s}`")))?;
        let party = match party {
            "A" => Party::A,
            "B" => Party::B,
            _ => return Err(Error::parse("label", format!("unknown party in `{s}`"))),
        };
        Ok(QubitLabel::new(party, dof.parse()?))
    }
}

impl Serialize for QubitLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QubitLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of qubit labels, always iterated in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Register(u8);

impl Register {
    pub const FULL: Register = Register(0b11_1111);
    pub const EMPTY: Register = Register(0);

    pub fn from_labels(labels: &[QubitLabel]) -> Self {
        labels.iter().fold(Register::EMPTY, |r, l| {
            Register(r.0 | 1 << l.canonical_index())
        })
    }

    pub fn single(label: QubitLabel) -> Self {
        Register(1 << label.canonical_index())
    }

    /// All qubits held by one party.
    pub fn party(party: Party) -> Self {
        Register::from_labels(&Dof::ALL.map(|d| QubitLabel::new(party, d)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn dim(self) -> usize {
        1 << self.len()
    }

    pub fn contains(self, label: QubitLabel) -> bool {
        self.0 & (1 << label.canonical_index()) != 0
    }

    pub fn is_subset_of(self, other: Register) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Register) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Register) -> Register {
        Register(self.0 | other.0)
    }

    pub fn difference(self, other: Register) -> Register {
        Register(self.0 & !other.0)
    }

    pub fn labels(self) -> impl Iterator<Item = QubitLabel> {
        (0..6)
            .filter(move |i| self.0 & (1 << i) != 0)
            .map(QubitLabel::from_canonical_index)
    }

    /// Position of `label` within this register (0 = most significant qubit).
    pub fn position(self, label: QubitLabel) -> Option<usize> {
        if !self.contains(label) {
            return None;
        }
        let below = self.0 & ((1u8 << label.canonical_index()) - 1);
        Some(below.count_ones() as usize)
    }

    /// Bit mask, within a basis index of this register, of the qubit `label`.
    pub(crate) fn bit(self, label: QubitLabel) -> usize {
        let pos = self.position(label).expect("label outside register");
        1 << (self.len() - 1 - pos)
    }

    /// Bit masks of `sub`'s qubits inside indices of `self`, in `sub`'s order.
    pub(crate) fn sub_bits(self, sub: Register) -> Vec<usize> {
        sub.labels().map(|l| self.bit(l)).collect()
    }
}

/// Gathers the bits selected by `bits` (most significant first) into a
/// compact index.
pub(crate) fn gather(index: usize, bits: &[usize]) -> usize {
    bits.iter()
        .fold(0, |acc, &b| (acc << 1) | usize::from(index & b != 0))
}

/// Inverse of [`gather`]: spreads a compact index onto the positions `bits`.
pub(crate) fn scatter(compact: usize, bits: &[usize]) -> usize {
    let n = bits.len();
    bits.iter()
        .enumerate()
        .filter(|(i, _)| compact >> (n - 1 - i) & 1 == 1)
        .fold(0, |acc, (_, &b)| acc | b)
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.labels().map(|l| l.to_string()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

impl Serialize for Register {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.labels())
    }
}

impl<'de> Deserialize<'de> for Register {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<QubitLabel>::deserialize(deserializer)?;
        let reg = Register::from_labels(&labels);
        if reg.len() != labels.len() {
            return Err(serde::de::Error::custom(
                "duplicate qubit label in register",
            ));
        }
        if !labels
            .windows(2)
            .all(|w| w[0].canonical_index() < w[1].canonical_index())
        {
            return Err(serde::de::Error::custom(
                "register labels must be in canonical order",
            ));
        }
        Ok(reg)
    }
}

/// Two complementary halves of a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    pub side_a: Register,
    pub side_b: Register,
}

impl Bipartition {
    pub fn new(side_a: Register, side_b: Register) -> Result<Self> {
        if !side_a.is_disjoint(side_b) {
            return Err(Error::InvalidSubsystem(format!(
                "bipartition sides overlap: {side_a} and {side_b}"
            )));
        }
        Ok(Self { side_a, side_b })
    }

    /// Alice's three qubits against Bob's.
    pub fn parties() -> Self {
        Self {
            side_a: Register::party(Party::A),
            side_b: Register::party(Party::B),
        }
    }

    pub fn covers(&self, register: Register) -> bool {
        self.side_a.union(self.side_b) == register
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_round_trips() {
        for i in 0..6 {
            assert_eq!(QubitLabel::from_canonical_index(i).canonical_index(), i);
        }
        let labels: Vec<String> = Register::FULL.labels().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["pi_A", "pi_B", "k_A", "k_B", "c_A", "c_B"]);
    }

    #[test]
    fn positions_and_bits() {
        let r = Register::from_labels(&["k_A".parse().unwrap(), "c_B".parse().unwrap()]);
        assert_eq!(r.len(), 2);
        assert_eq!(r.position("k_A".parse().unwrap()), Some(0));
        assert_eq!(r.position("c_B".parse().unwrap()), Some(1));
        assert_eq!(r.bit("k_A".parse().unwrap()), 0b10);
        assert_eq!(Register::FULL.bit("pi_A".parse().unwrap()), 32);
    }

    #[test]
    fn gather_scatter_inverse() {
        let bits = [32, 4, 1];
        for c in 0..8 {
            assert_eq!(gather(scatter(c, &bits), &bits), c);
        }
    }

    #[test]
    fn label_parse_errors() {
        assert!("x_A".parse::<QubitLabel>().is_err());
        assert!("pi_C".parse::<QubitLabel>().is_err());
        assert!("piA".parse::<QubitLabel>().is_err());
    }
}
