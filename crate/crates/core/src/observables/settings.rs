//! Counting local measurement settings.
//!
//! A setting fixes one basis, X or Z, on every qubit. A Pauli term can be
//! read out from a setting when each of its non-identity letters matches the
//! basis chosen for that qubit. The number of settings a witness needs is
//! the size of the smallest family of settings that reads out every term.

use std::fmt;

use super::pauli::{ObservableSum, Pauli};
use crate::error::{Error, Result};
use crate::qcore::Register;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Z,
}

/// One basis per qubit of `register`, stored as a bit mask (set bit = X)
/// over the register's basis-index bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Setting {
    register: Register,
    x_bits: usize,
}

impl Setting {
    pub fn basis(&self, label: crate::qcore::QubitLabel) -> Basis {
        if self.x_bits & self.register.bit(label) != 0 {
            Basis::X
        } else {
            Basis::Z
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.register.labels() {
            let c = match self.basis(l) {
                Basis::X => 'X',
                Basis::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A term's requirement: the qubits it touches and which of them need X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Constraint {
    pub mask: usize,
    pub x_bits: usize,
}

impl Constraint {
    pub fn accepts(self, setting: usize) -> bool {
        (setting ^ self.x_bits) & self.mask == 0
    }
}

pub(crate) fn constraints(op: &ObservableSum) -> Result<(Register, Vec<Constraint>)> {
    let register = op
        .terms
        .first()
        .map(|(_, p)| p.register())
        .unwrap_or(Register::FULL);
    let mut out = Vec::new();
    for (_, p) in &op.terms {
        if p.register() != register {
            return Err(Error::RegisterConflict(
                "terms on different registers".into(),
            ));
        }
        let mut c = Constraint { mask: 0, x_bits: 0 };
        for (label, letter) in p.support() {
            let bit = register.bit(label);
            c.mask |= bit;
            match letter {
                Pauli::X => c.x_bits |= bit,
                Pauli::Z => {}
                Pauli::Y => {
                    return Err(Error::UnsupportedBasis(format!(
                        "Y letter on {label} in {p}"
                    )))
                }
                Pauli::I => unreachable!(),
            }
        }
        if c.mask != 0 {
            out.push(c);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok((register, out))
}

fn search(
    uncovered: &[Constraint],
    compatible: &dyn Fn(Constraint) -> Vec<usize>,
    budget: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if uncovered.is_empty() {
        return true;
    }
    if budget == 0 {
        return false;
    }
    // Branch on the term with the fewest compatible settings; one of them
    // must be chosen.
    let pivot = *uncovered
        .iter()
        .max_by_key(|c| c.mask.count_ones())
        .expect("nonempty");
    for setting in compatible(pivot) {
        let rest: Vec<Constraint> = uncovered
            .iter()
            .copied()
            .filter(|c| !c.accepts(setting))
            .collect();
        chosen.push(setting);
        if search(&rest, compatible, budget - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A smallest family of settings reading out every term of `op`.
pub fn minimal_settings(op: &ObservableSum) -> Result<Vec<Setting>> {
    let (register, terms) = constraints(op)?;
    let n_settings = register.dim();
    let compatible =
        |c: Constraint| -> Vec<usize> { (0..n_settings).filter(|&s| c.accepts(s)).collect() };
    let mut chosen = Vec::new();
    for budget in 0..=n_settings {
        if search(&terms, &compatible, budget, &mut chosen) {
            let mut settings: Vec<Setting> = chosen
                .into_iter()
                .map(|x_bits| Setting { register, x_bits })
                .collect();
            settings.sort();
            return Ok(settings);
        }
    }
    unreachable!("the full set of settings reads out every term")
}

/// Minimal number of local X/Z settings needed to measure every term.
pub fn settings_required(op: &ObservableSum) -> Result<usize> {
    Ok(minimal_settings(op)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::pauli::PauliString;
    use crate::observables::witness::{witness_operator, Witness, WitnessKind};
    use crate::qcore::{label, Dof, Party};

    #[test]
    fn witness_setting_counts() {
        assert_eq!(
            settings_required(&witness_operator(Witness::new(WitnessKind::W2))).unwrap(),
            2
        );
        assert_eq!(
            settings_required(&witness_operator(Witness::new(WitnessKind::W3))).unwrap(),
            8
        );
        assert_eq!(
            settings_required(&witness_operator(Witness::new(WitnessKind::Wpi))).unwrap(),
            2
        );
        assert_eq!(
            settings_required(&witness_operator(Witness::printed(WitnessKind::Wk))).unwrap(),
            2
        );
    }

    #[test]
    fn w2_settings_are_uniform() {
        let s = minimal_settings(&witness_operator(Witness::new(WitnessKind::W2))).unwrap();
        let names: Vec<String> = s.iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["ZZZZZZ", "XXXXXX"]);
    }

    #[test]
    fn constant_only_needs_nothing() {
        assert_eq!(settings_required(&ObservableSum::new(1.0)).unwrap(), 0);
    }

    #[test]
    fn y_terms_rejected() {
        let mut sum = ObservableSum::new(0.0);
        let op = PauliString::from_letters(
            crate::qcore::Register::FULL,
            1.0,
            &[(label(Party::A, Dof::C), Pauli::Y)],
        )
        .unwrap();
        sum.push(1.0, op);
        assert!(matches!(
            settings_required(&sum),
            Err(Error::UnsupportedBasis(_))
        ));
    }
}
