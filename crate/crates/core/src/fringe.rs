//! Coincidence interference patterns versus path delay.
//!
//! The rate at delay `x` is `baseline · (1 - V·cos(φ)·g(x))` with `g` a
//! unit-peak Gaussian envelope. `φ = 0` gives a dip and `φ = π` a peak. The
//! envelope FWHM is the filter coherence length `λ²/Δλ` in the first
//! interferometer and twice that in the second one, where only one photon's
//! path is delayed.

use std::f64::consts::LN_2;
use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::datalab::MeasuredValue;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    First,
    Second,
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" | "1" => Ok(Stage::First),
            "second" | "2" => Ok(Stage::Second),
            _ => Err(Error::InvalidParameter(format!("unknown stage `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeConfig {
    /// Down-converted photon wavelength in nm.
    pub wavelength_nm: f64,
    /// Interference filter bandwidth in nm.
    pub bandwidth_nm: f64,
    pub visibility: f64,
    /// Relative phase of the Bell pair probed by the interferometer.
    pub phase: f64,
    /// Coincidence rate far outside the envelope, counts per second.
    pub baseline: f64,
    pub stage: Stage,
    /// Multiplies the visibility; below 1 it models a phase that wanders
    /// during acquisition (second interferometer only has no self-stabilization).
    pub dephasing_factor: f64,
}

impl Default for FringeConfig {
    fn default() -> Self {
        Self {
            wavelength_nm: 728.0,
            bandwidth_nm: 6.0,
            visibility: 1.0,
            phase: 0.0,
            baseline: 1000.0,
            stage: Stage::First,
            dephasing_factor: 1.0,
        }
    }
}

impl FringeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !self.bandwidth_nm.is_finite() || self.bandwidth_nm <= 0.0 {
            return bad("bandwidth must be positive");
        }
        if !self.wavelength_nm.is_finite() || self.wavelength_nm <= 0.0 {
            return bad("wavelength must be positive");
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return bad("visibility must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.dephasing_factor) {
            return bad("dephasing factor must lie in [0, 1]");
        }
        if !self.baseline.is_finite() || self.baseline < 0.0 {
            return bad("baseline must be non-negative");
        }
        if !self.phase.is_finite() {
            return bad("phase must be finite");
        }
        Ok(())
    }

    /// Envelope FWHM in micrometers.
    pub fn fwhm_um(&self) -> f64 {
        let first = self.wavelength_nm * self.wavelength_nm / self.bandwidth_nm / 1000.0;
        match self.stage {
            Stage::First => first,
            Stage::Second => 2.0 * first,
        }
    }

    /// Signed fringe contrast seen by the envelope: `V·factor·cos(φ)`.
    fn contrast(&self) -> f64 {
        self.visibility * self.dephasing_factor * self.phase.cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternPoint {
    /// Path delay in micrometers.
    pub delay: f64,
    /// Coincidences per second.
    pub rate: f64,
}

fn envelope(delay: f64, fwhm: f64) -> f64 {
    (-4.0 * LN_2 * (delay / fwhm).powi(2)).exp()
}

pub fn coincidence_rate(delay_um: f64, cfg: &FringeConfig) -> f64 {
    cfg.baseline * (1.0 - cfg.contrast() * envelope(delay_um, cfg.fwhm_um()))
}

/// Noise-free pattern on the given delays.
pub fn pattern(cfg: &FringeConfig, delays: &[f64]) -> Result<Vec<PatternPoint>> {
    cfg.validate()?;
    if let Some(d) = delays.iter().find(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter(format!("delay {d} is not finite")));
    }
    Ok(delays
        .iter()
        .map(|&delay| PatternPoint {
            delay,
            rate: coincidence_rate(delay, cfg),
        })
        .collect())
}

/// Pattern with Poisson counting noise for `integration_time` seconds per
/// point, deterministic per seed.
pub fn sample_pattern(
    cfg: &FringeConfig,
    delays: &[f64],
    integration_time: f64,
    seed: u64,
) -> Result<Vec<PatternPoint>> {
    if !integration_time.is_finite() || integration_time <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "integration time {integration_time} must be positive"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pattern(cfg, delays)?
        .into_iter()
        .map(|p| {
            let mean = p.rate * integration_time;
            let counts = if mean > 0.0 {
                Poisson::new(mean)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?
                    .sample(&mut rng)
            } else {
                0.0
            };
            Ok(PatternPoint {
                delay: p.delay,
                rate: counts / integration_time,
            })
        })
        .collect()
}

/// `n` evenly spaced delays on `[-half_range, half_range]`.
pub fn delay_grid(half_range: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| -half_range + 2.0 * half_range * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisibilityFit {
    pub visibility: MeasuredValue,
    pub fwhm_um: MeasuredValue,
    pub baseline: MeasuredValue,
    pub iterations: usize,
}

const MIN_POINTS: usize = 7;
const MAX_ITERATIONS: usize = 500;

struct Problem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    contrast_scale: f64,
}

impl Problem<'_> {
    fn model(&self, p: [f64; 3], x: f64) -> f64 {
        let [b, v, w] = p;
        b * (1.0 - v * self.contrast_scale * envelope(x, w))
    }

    fn rss(&self, p: [f64; 3]) -> f64 {
        self.x
            .iter()
            .zip(self.y)
            .map(|(&x, &y)| (y - self.model(p, x)).powi(2))
            .sum()
    }

    /// Normal matrix `JᵀJ` and gradient `Jᵀr`.
    fn normal(&self, p: [f64; 3]) -> ([[f64; 3]; 3], [f64; 3]) {
        let [b, v, w] = p;
        let c = self.contrast_scale;
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (&x, &y) in self.x.iter().zip(self.y) {
            let g = envelope(x, w);
            let j = [
                1.0 - v * c * g,
                -b * c * g,
                -b * v * c * g * 8.0 * LN_2 * x * x / (w * w * w),
            ];
            let r = y - self.model(p, x);
            for a in 0..3 {
                jtr[a] += j[a] * r;
                for k in 0..3 {
                    jtj[a][k] += j[a] * j[k];
                }
            }
        }
        (jtj, jtr)
    }

    /// Linear least squares for `(baseline, amplitude)` at fixed width.
    fn linear(&self, w: f64) -> Option<([f64; 3], f64)> {
        let (mut s1, mut sg, mut sgg, mut sy, mut sgy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in self.x.iter().zip(self.y) {
            let g = envelope(x, w);
            s1 += 1.0;
            sg += g;
            sgg += g * g;
            sy += y;
            sgy += g * y;
        }
        // y ≈ b - a·g
        let det = s1 * sgg - sg * sg;
        if det.abs() < 1e-12 * s1 * sgg.max(1e-300) {
            return None;
        }
        let b = (sgg * sy - sg * sgy) / det;
        let a = (sg * sy - s1 * sgy) / det;
        if b.abs() < f64::MIN_POSITIVE {
            return None;
        }
        let p = [b, a / (b * self.contrast_scale), w];
        Some((p, self.rss(p)))
    }
}

/// Solves the symmetric 3x3 system `m·x = r` by Gaussian elimination.
fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, src) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * src;
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (r[row] - s) / m[row][row];
    }
    Some(x)
}

fn inverse_diagonal(m: [[f64; 3]; 3]) -> Option<[f64; 3]> {
    let mut d = [0.0; 3];
    for (i, slot) in d.iter_mut().enumerate() {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        *slot = solve3(m, e)?[i];
    }
    Some(d)
}

/// Least-squares fit of baseline, visibility and envelope width with the
/// phase (and dephasing factor) held at the prior's values.
pub fn fit_visibility(points: &[PatternPoint], prior: &FringeConfig) -> Result<VisibilityFit> {
    prior.validate()?;
    if points.len() < MIN_POINTS {
        return Err(Error::FitError(format!(
            "need at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| p.delay).collect();
    let y: Vec<f64> = points.iter().map(|p| p.rate).collect();
    if x.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(Error::FitError("non-finite data".into()));
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return Err(Error::FitError("all delays are equal".into()));
    }
    let prior_fwhm = prior.fwhm_um();
    if hi - lo <= prior_fwhm {
        return Err(Error::FitError(format!(
            "delays span {} um, less than one envelope width ({prior_fwhm} um)",
            hi - lo
        )));
    }
    let contrast_scale = prior.phase.cos() * prior.dephasing_factor;
    if contrast_scale.abs() < 1e-9 {
        return Err(Error::FitError(
            "visibility is unidentifiable when cos(phase) = 0".into(),
        ));
    }
    let prob = Problem {
        x: &x,
        y: &y,
        contrast_scale,
    };

    // Coarse scan of the width with the linear parameters profiled out.
    let span = hi - lo;
    let (w_min, w_max) = (
        (prior_fwhm / 20.0).min(span / 50.0),
        (prior_fwhm * 20.0).max(span),
    );
    let mut best: Option<([f64; 3], f64)> = None;
    for i in 0..=400 {
        let w = w_min * (w_max / w_min).powf(i as f64 / 400.0);
        if let Some(cand) = prob.linear(w) {
            if best.is_none_or(|b| cand.1 < b.1) {
                best = Some(cand);
            }
        }
    }
    let (mut p, mut rss) = best.ok_or_else(|| Error::FitError("degenerate design".into()))?;

    let y_scale = y.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let flat = p[1].abs() < 1e-12;
    let mut iterations = 0;
    if !flat {
        // Levenberg-Marquardt polish.
        let mut lambda = 1e-3;
        while iterations < MAX_ITERATIONS {
            iterations += 1;
            let (jtj, jtr) = prob.normal(p);
            let mut a = jtj;
            for (k, row) in a.iter_mut().enumerate() {
                row[k] += lambda * jtj[k][k].max(1e-300);
            }
            let Some(step) = solve3(a, jtr) else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_rss = if trial[2] > 0.0 {
                prob.rss(trial)
            } else {
                f64::INFINITY
            };
            if trial_rss <= rss {
                let small = step
                    .iter()
                    .zip(&trial)
                    .all(|(s, t)| s.abs() <= 1e-13 * t.abs().max(1e-300));
                p = trial;
                let improvement = rss - trial_rss;
                rss = trial_rss;
                lambda = (lambda / 10.0).max(1e-15);
                if small || improvement <= 1e-30 * y_scale {
                    break;
                }
            } else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
            }
        }
    }

    let dof = (points.len() - 3) as f64;
    let s2 = rss / dof;
    let (jtj, _) = prob.normal(p);
    let sigmas = if flat {
        // Width is unidentified; take the (baseline, visibility) block only.
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() <= 0.0 {
            return Err(Error::FitError("singular normal matrix".into()));
        }
        [jtj[1][1] / det * s2, jtj[0][0] / det * s2, f64::NAN]
    } else {
        let d = inverse_diagonal(jtj)
            .ok_or_else(|| Error::FitError("singular normal matrix".into()))?;
        [d[0] * s2, d[1] * s2, d[2] * s2]
    };
    let sd = |v: f64| {
        if v.is_nan() {
            f64::NAN
        } else {
            v.max(0.0).sqrt()
        }
    };
    Ok(VisibilityFit {
        baseline: MeasuredValue::new(p[0], sd(sigmas[0])),
        visibility: MeasuredValue::new(p[1], sd(sigmas[1])),
        fwhm_um: MeasuredValue::new(if flat { prior_fwhm } else { p[2] }, sd(sigmas[2])),
        iterations,
    })
}

/// Writes `delay,rate` CSV.
pub fn write_pattern_csv(
    points: &[PatternPoint],
    out: impl Write,
    fmt: impl Fn(f64) -> String,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv write failed: {e}"));
    w.write_record(["delay", "rate"]).map_err(io)?;
    for p in points {
        w.write_record([fmt(p.delay), fmt(p.rate)]).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidParameter(format!("csv write failed: {e}")))?;
    Ok(())
}

/// Reads `delay,rate` CSV.
pub fn read_pattern_csv(input: impl Read) -> Result<Vec<PatternPoint>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "delay" || &headers[1] != "rate" {
        return Err(Error::parse("header", "expected `delay,rate`"));
    }
    let mut points = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let loc = format!("row {}", n + 2);
        let rec = rec.map_err(|e| Error::parse(loc.clone(), e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(loc.clone(), format!("`{}`: {e}", &rec[i])))
        };
        points.push(PatternPoint {
            delay: num(0)?,
            rate: num(1)?,
        });
    }
    Ok(points)
}
