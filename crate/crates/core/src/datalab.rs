//! Measured stabilizer tables, witness values computed from them, and
//! first-order uncertainty propagation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{
    pauli_expectation, stabilizer_expansion, Expectation, StabilizerSet, Witness,
};

/// The stabilizer table shipped with the repository.
pub const REFERENCE_TABLE_JSON: &str = include_str!("../../../tables/vallone2009_table1.json");
pub const REFERENCE_TABLE_FILE: &str = "vallone2009_table1.json";

/// A measured quantity with its 1σ uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredValue {
    pub value: f64,
    pub sigma: f64,
}

impl MeasuredValue {
    pub fn new(value: f64, sigma: f64) -> Self {
        Self { value, sigma }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, sigma: 0.0 }
    }
}

impl fmt::Display for MeasuredValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.value, self.sigma)
    }
}

/// Measured expectation values keyed by stabilizer products.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StabilizerTable {
    entries: BTreeMap<StabilizerSet, MeasuredValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    entries: Vec<EntryDoc>,
}

#[derive(Deserialize, Serialize)]
struct EntryDoc {
    ops: Vec<i64>,
    value: f64,
    sigma: f64,
}

impl StabilizerTable {
    /// The bundled table.
    pub fn reference() -> Self {
        parse_table(REFERENCE_TABLE_JSON).expect("bundled table is valid")
    }

    pub fn get(&self, key: StabilizerSet) -> Option<MeasuredValue> {
        self.entries.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StabilizerSet, MeasuredValue)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Inserts an entry, enforcing the same rules as the parser.
    pub fn insert(&mut self, key: StabilizerSet, m: MeasuredValue) -> Result<()> {
        check_entry(key, m).map_err(|msg| Error::parse(key.to_string(), msg))?;
        self.entries.insert(key, m);
        Ok(())
    }

    /// Noise-free table of the given products evaluated on `state`.
    pub fn from_state(
        state: &impl Expectation,
        keys: impl IntoIterator<Item = StabilizerSet>,
    ) -> Result<Self> {
        let mut table = StabilizerTable::default();
        for key in keys {
            let v = pauli_expectation(state, &key.operator())?;
            table.insert(key, MeasuredValue::exact(v))?;
        }
        Ok(table)
    }

    /// Every uncertainty multiplied by `factor`.
    pub fn scale_sigmas(&self, factor: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(k, m)| (*k, MeasuredValue::new(m.value, m.sigma * factor)))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<EntryDoc> = self
            .entries
            .iter()
            .map(|(k, m)| EntryDoc {
                ops: k.indices().map(|i| i as i64).collect(),
                value: m.value,
                sigma: m.sigma,
            })
            .collect();
        serde_json::json!({ "entries": entries }).to_string()
    }
}

fn check_entry(key: StabilizerSet, m: MeasuredValue) -> std::result::Result<(), String> {
    if key.is_empty() {
        return Err("empty stabilizer product".into());
    }
    if !key.one_per_dof() {
        return Err(format!(
            "{key} multiplies both stabilizers of one degree of freedom"
        ));
    }
    if !m.sigma.is_finite() || m.sigma < 0.0 {
        return Err(format!(
            "sigma {} must be a finite non-negative number",
            m.sigma
        ));
    }
    if !m.value.is_finite() || m.value.abs() > 1.0 + 3.0 * m.sigma + 1e-9 {
        return Err(format!("value {} outside [-1, 1] beyond 3 sigma", m.value));
    }
    Ok(())
}

/// Parses `{"entries":[{"ops":[...],"value":v,"sigma":s}, ...]}`.
///
/// Keys are sets of stabilizer indices 1..=6 with at most one stabilizer per
/// degree of freedom; duplicates are rejected.
pub fn parse_table(document: &str) -> Result<StabilizerTable> {
    let doc: TableDoc = serde_json::from_str(document).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let mut table = StabilizerTable::default();
    for (n, entry) in doc.entries.iter().enumerate() {
        let loc = format!("entries[{n}]");
        let mut indices = Vec::with_capacity(entry.ops.len());
        for (j, &op) in entry.ops.iter().enumerate() {
            if !(1..=6).contains(&op) {
                return Err(Error::parse(
                    format!("{loc}.ops[{j}]"),
                    format!("stabilizer index {op} outside 1..=6"),
                ));
            }
            if indices.contains(&(op as usize)) {
                return Err(Error::parse(
                    format!("{loc}.ops[{j}]"),
                    format!("repeated index {op}"),
                ));
            }
            indices.push(op as usize);
        }
        let key = StabilizerSet::from_indices(&indices).expect("indices checked");
        let m = MeasuredValue::new(entry.value, entry.sigma);
        check_entry(key, m).map_err(|msg| Error::parse(loc.clone(), msg))?;
        if table.entries.insert(key, m).is_some() {
            return Err(Error::parse(loc, format!("duplicate entry for {key}")));
        }
    }
    Ok(table)
}

/// Witness value from measured stabilizer products.
///
/// Every product in the witness's expansion enters linearly with its
/// expansion coefficient; the uncertainty is the quadrature sum of
/// `coefficient·sigma` over the entries used (independent errors, first
/// order). Products are taken from the table as measured, never rebuilt
/// from single-stabilizer values.
pub fn witness_from_measurements(
    table: &StabilizerTable,
    w: impl Into<Witness>,
) -> Result<MeasuredValue> {
    let exp = stabilizer_expansion(w.into());
    let missing: Vec<String> = exp
        .terms
        .iter()
        .filter(|(_, k)| table.get(*k).is_none())
        .map(|(_, k)| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingEntries(missing));
    }
    let mut value = exp.constant;
    let mut var = 0.0;
    for (c, k) in &exp.terms {
        let m = table.get(*k).expect("checked above");
        value += c * m.value;
        var += (c * m.sigma).powi(2);
    }
    Ok(MeasuredValue::new(value, var.sqrt()))
}

/// Coincidence counts in the four detector pairings (a-b, a-b', a'-b, a'-b').
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceQuad {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl CoincidenceQuad {
    pub fn new(n_pp: u64, n_pm: u64, n_mp: u64, n_mm: u64) -> Self {
        Self {
            n_pp,
            n_pm,
            n_mp,
            n_mm,
        }
    }

    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }
}

/// Correlation `(n++ + n-- - n+- - n-+)/N` with Poisson errors on each count.
pub fn counts_to_expectation(q: CoincidenceQuad) -> Result<MeasuredValue> {
    let total = q.total();
    if total == 0 {
        return Err(Error::EmptyData);
    }
    let n = total as f64;
    let same = (q.n_pp + q.n_mm) as f64;
    let diff = (q.n_pm + q.n_mp) as f64;
    let e = (same - diff) / n;
    // dE/dn_same = (1 - E)/N, dE/dn_diff = -(1 + E)/N, Var(n) = n.
    let var = same * ((1.0 - e) / n).powi(2) + diff * ((1.0 + e) / n).powi(2);
    Ok(MeasuredValue::new(e, var.sqrt()))
}
