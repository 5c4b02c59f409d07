//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use hyperwitness::fringe::PatternPoint;
use hyperwitness::qcore::CMatrix;
use hyperwitness::{DensityMatrix, ObservableSum, Pauli, PauliString, Register, StateVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_state(register: Register, rng: &mut impl Rng) -> StateVector {
    let amps = (0..register.dim())
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(register, amps).unwrap()
}

/// Convex mixture of a few random pure states.
pub fn random_mixed(register: Register, rng: &mut impl Rng) -> DensityMatrix {
    let k = rng.random_range(1..=4);
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix::zeros(register.dim());
    for w in weights {
        let s = random_state(register, rng);
        m = &m + &CMatrix::outer(s.amplitudes(), s.amplitudes()).scale(w / total);
    }
    // Symmetrize away rounding so the exact Hermiticity check holds.
    let m = CMatrix::from_fn(m.dim(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    DensityMatrix::new(register, m).unwrap()
}

pub fn random_unitary(rng: &mut impl Rng) -> [[Complex64; 2]; 2] {
    let t = std::f64::consts::PI;
    let (a, p, x, th) = (
        rng.random_range(-t..t),
        rng.random_range(-t..t),
        rng.random_range(-t..t),
        rng.random_range(0.0..t / 2.0),
    );
    let g = Complex64::from_polar(1.0, a);
    [
        [
            g * Complex64::from_polar(th.cos(), p),
            g * Complex64::from_polar(th.sin(), x),
        ],
        [
            -g * Complex64::from_polar(th.sin(), -x),
            g * Complex64::from_polar(th.cos(), -p),
        ],
    ]
}

/// Reduced matrix by explicit index contraction on a 4-qubit register
/// (bits 3..0 = qubits 0..3); keeps the qubits listed in `keep` (positions).
pub fn naive_partial_trace(rho: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let bit_of = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
    let mut out = CMatrix::zeros(1 << k);
    for row in 0..1usize << n {
        for col in 0..1usize << n {
            if traced.iter().any(|&q| bit_of(row, q) != bit_of(col, q)) {
                continue;
            }
            let r: usize = keep.iter().fold(0, |acc, &q| (acc << 1) | bit_of(row, q));
            let s: usize = keep.iter().fold(0, |acc, &q| (acc << 1) | bit_of(col, q));
            out[(r, s)] += rho[(row, col)];
        }
    }
    out
}

fn single(p: Pauli) -> CMatrix {
    let z = c(0.0, 0.0);
    let data = match p {
        Pauli::I => vec![c(1.0, 0.0), z, z, c(1.0, 0.0)],
        Pauli::X => vec![z, c(1.0, 0.0), c(1.0, 0.0), z],
        Pauli::Y => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
        Pauli::Z => vec![c(1.0, 0.0), z, z, c(-1.0, 0.0)],
    };
    CMatrix::from_row_major(2, data).unwrap()
}

/// Dense operator as a Kronecker product of 2x2 matrices in register order.
pub fn dense_pauli(p: &PauliString) -> CMatrix {
    let reg = p.register();
    let mut m = CMatrix::identity(1);
    for l in reg.labels() {
        m = m.kron(&single(p.letter(l)));
    }
    m.scale(p.coefficient())
}

pub fn dense_observable(o: &ObservableSum, register: Register) -> CMatrix {
    o.terms.iter().fold(
        CMatrix::identity(register.dim()).scale(o.constant),
        |acc, (w, p)| &acc + &dense_pauli(p).scale(*w),
    )
}

/// `<ψ|M|ψ>` by matrix-vector product.
pub fn dense_expectation(m: &CMatrix, psi: &StateVector) -> Complex64 {
    let mv = m.mul_vec(psi.amplitudes());
    psi.amplitudes()
        .iter()
        .zip(&mv)
        .map(|(a, b)| a.conj() * b)
        .sum()
}

/// `tr(ρM)`.
pub fn dense_trace(m: &CMatrix, rho: &DensityMatrix) -> Complex64 {
    (rho.matrix() * m).trace()
}

/// Minimum number of X/Z settings covering every term, by exhaustive
/// subset enumeration after discarding dominated settings.
pub fn brute_force_settings(o: &ObservableSum) -> usize {
    let terms: Vec<Vec<(usize, Pauli)>> = o
        .terms
        .iter()
        .map(|(_, p)| {
            p.support()
                .map(|(l, q)| (l.canonical_index(), q))
                .collect::<Vec<_>>()
        })
        .filter(|t: &Vec<_>| !t.is_empty())
        .collect();
    if terms.is_empty() {
        return 0;
    }
    assert!(terms.len() <= 64);
    // Setting s: bit q set means X on canonical qubit q.
    let coverage: Vec<u64> = (0..64u32)
        .map(|s| {
            terms.iter().enumerate().fold(0u64, |acc, (t, letters)| {
                let ok = letters.iter().all(|&(q, p)| {
                    let x = s >> q & 1 == 1;
                    matches!((p, x), (Pauli::X, true) | (Pauli::Z, false))
                });
                if ok {
                    acc | 1 << t
                } else {
                    acc
                }
            })
        })
        .collect();
    let mut maximal: Vec<u64> = Vec::new();
    for &cov in &coverage {
        let dominated = coverage.iter().any(|&o| o != cov && o & cov == cov);
        if !dominated && cov != 0 && !maximal.contains(&cov) {
            maximal.push(cov);
        }
    }
    let all = if terms.len() == 64 {
        u64::MAX
    } else {
        (1u64 << terms.len()) - 1
    };
    let n = maximal.len();
    assert!(n <= 24, "oracle search space too large: {n}");
    let mut best = usize::MAX;
    for subset in 0u32..1 << n {
        let size = subset.count_ones() as usize;
        if size >= best {
            continue;
        }
        let covered = (0..n)
            .filter(|i| subset >> i & 1 == 1)
            .fold(0, |a, i| a | maximal[i]);
        if covered == all {
            best = size;
        }
    }
    best
}

/// Width at half depth of the dip/peak by linear interpolation.
pub fn sampled_fwhm(points: &[PatternPoint], baseline: f64) -> f64 {
    let centre = points
        .iter()
        .enumerate()
        .max_by(|a, b| {
            (a.1.rate - baseline)
                .abs()
                .total_cmp(&(b.1.rate - baseline).abs())
        })
        .unwrap()
        .0;
    let depth = points[centre].rate - baseline;
    let h = |p: &PatternPoint| (p.rate - baseline) / depth - 0.5;
    let crossing = |idx: Vec<usize>| -> f64 {
        for w in idx.windows(2) {
            let (a, b) = (&points[w[0]], &points[w[1]]);
            if h(a) >= 0.0 && h(b) < 0.0 {
                let t = h(a) / (h(a) - h(b));
                return a.delay + t * (b.delay - a.delay);
            }
        }
        panic!("no half-depth crossing");
    };
    crossing((centre..points.len()).collect()) - crossing((0..=centre).rev().collect())
}
