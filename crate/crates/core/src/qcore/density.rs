use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::{hermitian_eigen, CMatrix};
use super::register::{gather, scatter, Bipartition, Register};
use super::state::{joint_register, StateVector};
use crate::error::{check_probability, Error, Result};

/// Tolerance on Hermiticity and unit trace.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted as rounding noise.
pub const POSITIVITY_TOLERANCE: f64 = -1e-10;
/// Eigenvalues below this are treated as zero in the entropy.
pub const EIGEN_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityJson", into = "DensityJson")]
pub struct DensityMatrix {
    register: Register,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    register: Register,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<DensityJson> for DensityMatrix {
    type Error = Error;

    fn try_from(j: DensityJson) -> Result<Self> {
        let data = j
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let matrix = CMatrix::from_row_major(j.register.dim(), data).ok_or_else(|| {
            Error::InvalidDensityMatrix(format!("expected {} entries", j.register.dim().pow(2)))
        })?;
        DensityMatrix::new(j.register, matrix)
    }
}

impl From<DensityMatrix> for DensityJson {
    fn from(d: DensityMatrix) -> Self {
        DensityJson {
            register: d.register,
            entries: d.matrix.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl DensityMatrix {
    /// Checks dimension, Hermiticity, trace and positivity.
    pub fn new(register: Register, matrix: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(register, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    fn new_unchecked(register: Register, matrix: CMatrix) -> Result<Self> {
        if register.is_empty() || matrix.dim() != register.dim() {
            return Err(Error::InvalidDensityMatrix(format!(
                "{}x{} matrix for register {register}",
                matrix.dim(),
                matrix.dim()
            )));
        }
        Ok(Self { register, matrix })
    }

    pub(crate) fn from_trusted(register: Register, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), register.dim());
        Self { register, matrix }
    }

    /// `I/d` on the register.
    pub fn maximally_mixed(register: Register) -> Self {
        let d = register.dim();
        Self::from_trusted(register, CMatrix::identity(d).scale(1.0 / d as f64))
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    fn check_hermitian_trace(&self) -> Result<()> {
        let defect = self.matrix.hermiticity_defect();
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        Ok(())
    }

    /// Full validity check including the spectrum.
    pub fn validate(&self) -> Result<()> {
        self.check_hermitian_trace()?;
        let min = self.eigenvalues()[0];
        if min < POSITIVITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).values
    }

    /// Density matrix of states on disjoint registers, in canonical order.
    pub fn tensor(factors: &[DensityMatrix]) -> Result<DensityMatrix> {
        let register = joint_register(factors.iter().map(|f| f.register))?;
        let bits: Vec<Vec<usize>> = factors
            .iter()
            .map(|f| register.sub_bits(f.register))
            .collect();
        let m = CMatrix::from_fn(register.dim(), |i, j| {
            factors
                .iter()
                .zip(&bits)
                .map(|(f, b)| f.matrix[(gather(i, b), gather(j, b))])
                .product()
        });
        Ok(Self::from_trusted(register, m))
    }
}

/// `|ψ><ψ|`
pub fn density(state: &StateVector) -> DensityMatrix {
    DensityMatrix::from_trusted(
        state.register(),
        CMatrix::outer(state.amplitudes(), state.amplitudes()),
    )
}

/// Traces out every qubit not in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Register) -> Result<DensityMatrix> {
    let full = rho.register;
    if keep.is_empty() || keep == full || !keep.is_subset_of(full) {
        return Err(Error::InvalidSubsystem(format!(
            "cannot keep {keep} of {full}: must be a nonempty proper subset"
        )));
    }
    let kept_bits = full.sub_bits(keep);
    let traced_bits = full.sub_bits(full.difference(keep));
    let traced_dim = 1 << traced_bits.len();

    let reduced = CMatrix::from_fn(keep.dim(), |i, j| {
        let row = scatter(i, &kept_bits);
        let col = scatter(j, &kept_bits);
        (0..traced_dim)
            .map(|t| {
                let e = scatter(t, &traced_bits);
                rho.matrix[(row | e, col | e)]
            })
            .sum()
    });
    Ok(DensityMatrix::from_trusted(keep, reduced))
}

/// `(1 - p)·rho1 + p·rho2`
pub fn mix(rho1: &DensityMatrix, rho2: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    if rho1.register != rho2.register {
        return Err(Error::RegisterConflict(format!(
            "cannot mix {} with {}",
            rho1.register, rho2.register
        )));
    }
    if p == 0.0 {
        return Ok(rho1.clone());
    }
    if p == 1.0 {
        return Ok(rho2.clone());
    }
    let m = &rho1.matrix.scale(1.0 - p) + &rho2.matrix.scale(p);
    Ok(DensityMatrix::from_trusted(rho1.register, m))
}

/// Von Neumann entropy in bits, `-Σ λ log₂ λ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.check_hermitian_trace()?;
    let values = rho.eigenvalues();
    if values[0] < POSITIVITY_TOLERANCE {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {:e}",
            values[0]
        )));
    }
    Ok(values
        .into_iter()
        .filter(|&l| l > EIGEN_CUTOFF)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0))
}

/// Entropy of the reduced state on `split.side_a`.
pub fn entropy_of_entanglement(state: &StateVector, split: &Bipartition) -> Result<f64> {
    if !split.covers(state.register()) {
        return Err(Error::InvalidSubsystem(format!(
            "bipartition {} | {} does not cover {}",
            split.side_a,
            split.side_b,
            state.register()
        )));
    }
    von_neumann_entropy(&partial_trace(&density(state), split.side_a)?)
}
