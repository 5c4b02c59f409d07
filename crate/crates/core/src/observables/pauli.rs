use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, QubitLabel, Register, StateVector};

/// Imaginary residue above which an expectation is rejected.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `self * other = i^k · result`, returned as `(k, result)`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(c)
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            _ => Err(Error::parse(
                "letter",
                format!("unknown Pauli letter `{s}`"),
            )),
        }
    }
}

/// Real-signed tensor product of single-qubit Pauli operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    register: Register,
    /// Indexed by canonical qubit index; identity outside the register.
    letters: [Pauli; 6],
    coefficient: f64,
}

impl PauliString {
    pub fn identity(register: Register) -> Self {
        Self {
            register,
            letters: [Pauli::I; 6],
            coefficient: 1.0,
        }
    }

    /// Builds a string from `(label, letter)` pairs; unlisted qubits get `I`.
    pub fn from_letters(
        register: Register,
        coefficient: f64,
        letters: &[(QubitLabel, Pauli)],
    ) -> Result<Self> {
        let mut s = Self::identity(register);
        s.coefficient = coefficient;
        for &(label, p) in letters {
            if !register.contains(label) {
                return Err(Error::RegisterConflict(format!(
                    "{label} not in {register}"
                )));
            }
            s.letters[label.canonical_index()] = p;
        }
        Ok(s)
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn letter(&self, label: QubitLabel) -> Pauli {
        self.letters[label.canonical_index()]
    }

    pub fn with_coefficient(mut self, coefficient: f64) -> Self {
        self.coefficient = coefficient;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Non-identity letters in canonical order.
    pub fn support(&self) -> impl Iterator<Item = (QubitLabel, Pauli)> + '_ {
        self.register
            .labels()
            .map(|l| (l, self.letter(l)))
            .filter(|(_, p)| *p != Pauli::I)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Operator product `self · other`; fails when the two anticommute,
    /// since the product would carry an imaginary phase.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.register != other.register {
            return Err(Error::RegisterConflict(format!(
                "{} vs {}",
                self.register, other.register
            )));
        }
        let mut k = 0u8;
        let mut letters = [Pauli::I; 6];
        for (i, slot) in letters.iter_mut().enumerate() {
            let (phase, p) = self.letters[i].mul(other.letters[i]);
            k = (k + phase) % 4;
            *slot = p;
        }
        let sign = match k {
            0 => 1.0,
            2 => -1.0,
            _ => return Err(Error::Anticommuting),
        };
        Ok(PauliString {
            register: self.register,
            letters,
            coefficient: sign * self.coefficient * other.coefficient,
        })
    }

    /// `(flip, phase_mask, i_power)` such that
    /// `P|x> = coefficient · i^i_power · (-1)^{popcount(x & phase_mask)} |x ^ flip>`.
    fn action(&self) -> (usize, usize, u32) {
        let mut flip = 0;
        let mut phase = 0;
        let mut ys = 0;
        for label in self.register.labels() {
            let bit = self.register.bit(label);
            match self.letter(label) {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    phase |= bit;
                    ys += 1;
                }
                Pauli::Z => phase |= bit,
            }
        }
        (flip, phase, ys % 4)
    }

    /// Dense matrix, mostly for tests and debugging.
    pub fn to_matrix(&self) -> crate::qcore::CMatrix {
        let d = self.register.dim();
        let mut m = crate::qcore::CMatrix::zeros(d);
        let (flip, phase, ys) = self.action();
        let ipow = Complex64::i().powu(ys) * self.coefficient;
        for x in 0..d {
            let sign = if (x & phase).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            m[(x ^ flip, x)] = ipow * sign;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coefficient < 0.0 { "-" } else { "+" };
        let mag = self.coefficient.abs();
        if mag != 1.0 {
            write!(f, "{sign}{mag}")?;
        } else {
            f.write_str(sign)?;
        }
        for label in self.register.labels() {
            write!(f, "{}", self.letter(label))?;
        }
        Ok(())
    }
}

/// Anything whose Pauli expectation values can be computed.
pub trait Expectation {
    fn register(&self) -> Register;

    /// `<P>` including the string's coefficient, without the realness check.
    fn expectation_complex(&self, op: &PauliString) -> Complex64;
}

impl Expectation for StateVector {
    fn register(&self) -> Register {
        StateVector::register(self)
    }

    fn expectation_complex(&self, op: &PauliString) -> Complex64 {
        let (flip, phase, ys) = op.action();
        let amps = self.amplitudes();
        let sum: Complex64 = amps
            .iter()
            .enumerate()
            .map(|(x, a)| {
                let v = amps[x ^ flip].conj() * a;
                if (x & phase).count_ones() % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .sum();
        sum * Complex64::i().powu(ys) * op.coefficient
    }
}

impl Expectation for DensityMatrix {
    fn register(&self) -> Register {
        DensityMatrix::register(self)
    }

    fn expectation_complex(&self, op: &PauliString) -> Complex64 {
        let (flip, phase, ys) = op.action();
        let m = self.matrix();
        let sum: Complex64 = (0..m.dim())
            .map(|y| {
                let v = m[(y, y ^ flip)];
                if (y & phase).count_ones() % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .sum();
        sum * Complex64::i().powu(ys) * op.coefficient
    }
}

/// Real expectation value `<ψ|P|ψ>` or `tr(ρP)`.
pub fn pauli_expectation(state: &impl Expectation, op: &PauliString) -> Result<f64> {
    if state.register() != op.register {
        return Err(Error::RegisterConflict(format!(
            "operator on {} applied to state on {}",
            op.register,
            state.register()
        )));
    }
    let z = state.expectation_complex(op);
    if z.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::NumericalInconsistency(format!(
            "expectation of {op} has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Real linear combination of Pauli strings plus a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSum {
    pub constant: f64,
    pub terms: Vec<(f64, PauliString)>,
}

impl ObservableSum {
    pub fn new(constant: f64) -> Self {
        Self {
            constant,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: f64, op: PauliString) {
        self.terms.push((weight, op));
    }

    pub fn expectation(&self, state: &impl Expectation) -> Result<f64> {
        self.terms.iter().try_fold(self.constant, |acc, (w, p)| {
            Ok(acc + w * pauli_expectation(state, p)?)
        })
    }

    /// Expectation without the realness check, for diagnostics.
    pub fn expectation_complex(&self, state: &impl Expectation) -> Complex64 {
        self.terms
            .iter()
            .map(|(w, p)| state.expectation_complex(p) * *w)
            .sum::<Complex64>()
            + self.constant
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    weight: f64,
    letters: BTreeMap<String, Pauli>,
}

#[derive(Serialize, Deserialize)]
struct ObservableJson {
    constant: f64,
    terms: Vec<TermJson>,
}

impl Serialize for ObservableSum {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(w, p)| TermJson {
                weight: w * p.coefficient,
                letters: p.support().map(|(l, q)| (l.to_string(), q)).collect(),
            })
            .collect();
        ObservableJson {
            constant: self.constant,
            terms,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ObservableSum {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = ObservableJson::deserialize(deserializer)?;
        let mut sum = ObservableSum::new(json.constant);
        for t in json.terms {
            let letters = t
                .letters
                .iter()
                .map(|(l, p)| Ok((l.parse::<QubitLabel>()?, *p)))
                .collect::<Result<Vec<_>>>()
                .map_err(D::Error::custom)?;
            let op = PauliString::from_letters(Register::FULL, 1.0, &letters)
                .map_err(D::Error::custom)?;
            sum.push(t.weight, op);
        }
        Ok(sum)
    }
}
