//! Noise channels on the hyperentangled state and witness robustness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::observables::{evaluate_witness, Witness};
use crate::qcore::register::{gather, scatter};
use crate::qcore::{
    density, make_bell, BellKind, CMatrix, DensityMatrix, Dof, Party, QubitLabel, Register,
};

/// One value per degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerDof<T> {
    pub pi: T,
    pub k: T,
    pub c: T,
}

impl<T: Copy> PerDof<T> {
    pub fn uniform(v: T) -> Self {
        Self { pi: v, k: v, c: v }
    }

    pub fn get(&self, dof: Dof) -> T {
        match dof {
            Dof::Pi => self.pi,
            Dof::K => self.k,
            Dof::C => self.c,
        }
    }

    pub fn set(&mut self, dof: Dof, v: T) {
        match dof {
            Dof::Pi => self.pi = v,
            Dof::K => self.k = v,
            Dof::C => self.c = v,
        }
    }
}

fn zero_dephasing() -> PerDof<f64> {
    PerDof::uniform(0.0)
}

fn full_visibility() -> PerDof<f64> {
    PerDof::uniform(1.0)
}

/// Imperfections of a prepared hyperentangled state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Weight of `I/64` mixed into the whole six-qubit state.
    #[serde(default)]
    pub white_fraction: f64,
    /// Weight of `I/4` mixed into each degree of freedom independently.
    #[serde(default)]
    pub dof_white_fraction: f64,
    /// Phase-flip probability per degree of freedom.
    #[serde(default = "zero_dephasing")]
    pub dephase: PerDof<f64>,
    /// Interference visibility per degree of freedom.
    #[serde(default = "full_visibility")]
    pub visibility: PerDof<f64>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            white_fraction: 0.0,
            dof_white_fraction: 0.0,
            dephase: zero_dephasing(),
            visibility: full_visibility(),
        }
    }
}

impl NoiseModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let model: NoiseModel = serde_json::from_str(text).map_err(|e| {
            Error::parse(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.white_fraction)?;
        check_probability(self.dof_white_fraction)?;
        for dof in Dof::ALL {
            check_probability(self.dephase.get(dof))?;
            check_probability(self.visibility.get(dof))?;
        }
        Ok(())
    }

    /// The noisy state: partially coherent Bell pairs, then dephasing, then
    /// per-DOF and global white noise.
    pub fn state(&self) -> Result<DensityMatrix> {
        self.validate()?;
        let mut rho = visibility_state(&self.visibility)?;
        for dof in Dof::ALL {
            rho = dephase_dof(&rho, dof, self.dephase.get(dof))?;
        }
        rho = dof_white_noise(&rho, self.dof_white_fraction)?;
        white_noise(&rho, self.white_fraction)
    }
}

/// Replaces the `block` qubits by `I/d_block` with weight `p`.
fn depolarize_block(rho: &DensityMatrix, block: Register, p: f64) -> DensityMatrix {
    let reg = rho.register();
    let m = rho.matrix();
    let block_bits = reg.sub_bits(block);
    let block_dim = block.dim();
    let block_mask: usize = block_bits.iter().sum();
    let mixed = CMatrix::from_fn(reg.dim(), |i, j| {
        if gather(i, &block_bits) != gather(j, &block_bits) {
            return num_complex::Complex64::new(0.0, 0.0);
        }
        let (ri, rj) = (i & !block_mask, j & !block_mask);
        let s: num_complex::Complex64 = (0..block_dim)
            .map(|b| {
                let e = scatter(b, &block_bits);
                m[(ri | e, rj | e)]
            })
            .sum();
        s / block_dim as f64
    });
    DensityMatrix::from_trusted(reg, &m.scale(1.0 - p) + &mixed.scale(p))
}

/// `p·I/d + (1 - p)·ρ` over the whole register.
pub fn white_noise(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    let d = rho.register().dim();
    let m = &rho.matrix().scale(1.0 - p) + &CMatrix::identity(d).scale(p / d as f64);
    Ok(DensityMatrix::from_trusted(rho.register(), m))
}

/// Independent white noise on every degree of freedom fully present in the
/// register: each two-qubit block becomes `(1 - p)·ρ + p·tr_block(ρ) ⊗ I/4`.
pub fn dof_white_noise(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    let mut out = rho.clone();
    for dof in Dof::ALL {
        if dof.register().is_subset_of(rho.register()) {
            out = depolarize_block(&out, dof.register(), p);
        }
    }
    Ok(out)
}

/// Phase flip on one degree of freedom: `(1 - q)·ρ + q·Z_A ρ Z_A`, with `Z_A`
/// acting on Alice's qubit of that DOF. It maps `|φ+>` to `|φ->` (and
/// `|ψ+>` to `|ψ->`), keeping the z-type stabilizer and scaling the x-type
/// one by `1 - 2q`.
pub fn dephase_dof(rho: &DensityMatrix, dof: Dof, q: f64) -> Result<DensityMatrix> {
    check_probability(q)?;
    let reg = rho.register();
    if !dof.register().is_subset_of(reg) {
        return Err(Error::RegisterConflict(format!(
            "{dof} qubits not in {reg}"
        )));
    }
    let z = reg.bit(QubitLabel::new(Party::A, dof));
    let m = rho.matrix();
    let out = CMatrix::from_fn(reg.dim(), |i, j| {
        if (i & z) == (j & z) {
            m[(i, j)]
        } else {
            m[(i, j)] * (1.0 - 2.0 * q)
        }
    });
    Ok(DensityMatrix::from_trusted(reg, out))
}

fn dof_bell_kind(dof: Dof) -> BellKind {
    match dof {
        Dof::K => BellKind::Psi,
        _ => BellKind::Phi,
    }
}

/// Product over DOFs of `((1+v)/2)|bell><bell| + ((1-v)/2)|bell'><bell'|`,
/// where `bell'` is the phase-flipped partner. The x-type stabilizer of each
/// DOF has expectation `v`, the z-type one stays at 1.
pub fn visibility_state(v: &PerDof<f64>) -> Result<DensityMatrix> {
    let factors = Dof::ALL
        .iter()
        .map(|&dof| {
            let vis = v.get(dof);
            check_probability(vis)?;
            let kind = dof_bell_kind(dof);
            let coherent = density(&make_bell(kind, 0.0, dof)?);
            let flipped = density(&make_bell(kind, std::f64::consts::PI, dof)?);
            crate::qcore::mix(&coherent, &flipped, (1.0 - vis) / 2.0)
        })
        .collect::<Result<Vec<_>>>()?;
    DensityMatrix::tensor(&factors)
}

/// Noise family swept by [`witness_noise_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseChannel {
    /// Global white noise, [`white_noise`].
    White,
    /// White noise on each degree of freedom, [`dof_white_noise`].
    DofWhite,
}

impl NoiseChannel {
    pub fn apply(self, rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        match self {
            NoiseChannel::White => white_noise(rho, p),
            NoiseChannel::DofWhite => dof_white_noise(rho, p),
        }
    }
}

impl fmt::Display for NoiseChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseChannel::White => "white",
            NoiseChannel::DofWhite => "dof-white",
        })
    }
}

impl FromStr for NoiseChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "white" => Ok(NoiseChannel::White),
            "dof-white" | "dof_white" => Ok(NoiseChannel::DofWhite),
            _ => Err(Error::parse(
                "channel",
                format!("unknown noise channel `{s}`"),
            )),
        }
    }
}

pub const DEFAULT_THRESHOLD_TOLERANCE: f64 = 1e-6;
const MONOTONICITY_GRID: usize = 20;

/// Noise level at which the witness on the noisy ideal state crosses zero.
pub fn witness_noise_threshold(
    w: impl Into<Witness>,
    channel: NoiseChannel,
    tol: f64,
) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let w = w.into();
    let ideal = density(&crate::qcore::hyper_state(0.0, 0.0, 0.0)?);
    let f = |p: f64| -> Result<f64> { evaluate_witness(&channel.apply(&ideal, p)?, w) };

    let grid = (0..=MONOTONICITY_GRID)
        .map(|i| f(i as f64 / MONOTONICITY_GRID as f64))
        .collect::<Result<Vec<_>>>()?;
    let rising = grid.windows(2).all(|s| s[1] >= s[0] - 1e-12);
    let falling = grid.windows(2).all(|s| s[1] <= s[0] + 1e-12);
    if !(rising || falling) {
        return Err(Error::NotMonotone);
    }

    let (mut lo, mut hi) = (0.0, 1.0);
    let f_lo = grid[0];
    let f_hi = grid[MONOTONICITY_GRID];
    if f_lo == 0.0 {
        return Ok(0.0);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoThreshold);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
