//! Geometric shaping of PAM axes for product QAM constellations.
//!
//! A product of two Gray-labelled PAM axes has a bit-metric GMI equal to
//! the sum of the per-axis GMIs, so each axis can be shaped on its own.
//! Axes are kept symmetric (±aₖ) and optimized by coordinate ascent on the
//! GMI computed with Gauss–Hermite quadrature.

use alloc::format;
use alloc::vec::Vec;

use crate::gmi::{gray, product, Constellation};
use crate::quadrature::gaussian_rule;
use crate::units::db_to_linear;
use crate::{Error, Result};

const QUADRATURE_ORDER: usize = 48;

/// Bit-metric GMI of a Gray-labelled PAM (levels ascending) with noise
/// variance `noise_var`, bits per real dimension.
pub fn pam_gmi(levels: &[f64], noise_var: f64) -> Result<f64> {
    let m = levels.len();
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::Validation(format!("PAM size {m} must be a power of two >= 2")));
    }
    let bits = m.trailing_zeros() as usize;
    let labels: Vec<u32> = (0..m as u32).map(gray).collect();
    let (nodes, weights) = gaussian_rule(QUADRATURE_ORDER, libm::sqrt(noise_var))?;
    let mut loss = 0.0;
    let mut metric = alloc::vec![0.0; m];
    for (tx, x) in levels.iter().enumerate() {
        for (n, w) in nodes.iter().zip(&weights) {
            let y = x + n;
            let mut best = f64::NEG_INFINITY;
            for (v, l) in metric.iter_mut().zip(levels) {
                *v = -(y - l) * (y - l) / (2.0 * noise_var);
                best = best.max(*v);
            }
            let total: f64 = metric.iter().map(|v| libm::exp(v - best)).sum();
            for b in 0..bits {
                let shift = bits - 1 - b;
                let want = (labels[tx] >> shift) & 1;
                let same: f64 = metric
                    .iter()
                    .zip(&labels)
                    .filter(|(_, l)| (*l >> shift) & 1 == want)
                    .map(|(v, _)| libm::exp(v - best))
                    .sum();
                loss += w * libm::log2(total / same);
            }
        }
    }
    Ok(bits as f64 - loss / m as f64)
}

/// Levels `±a` built from the positive half, ascending, scaled to `energy`.
fn symmetric(half: &[f64], energy: f64) -> Vec<f64> {
    let mut levels: Vec<f64> = half.iter().rev().map(|a| -a).chain(half.iter().copied()).collect();
    let e = levels.iter().map(|x| x * x).sum::<f64>() / levels.len() as f64;
    let s = libm::sqrt(energy / e);
    levels.iter_mut().for_each(|x| *x *= s);
    levels
}

/// Standard normal quantile by bisection on `erf`.
fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 0.5 * (1.0 + libm::erf(mid / core::f64::consts::SQRT_2)) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shapes an `m`-level PAM for per-dimension SNR `snr_db` (energy over
/// noise variance). Starts from Gaussian quantiles and runs coordinate
/// ascent on the positive amplitudes with a shrinking step.
///
/// Returns ascending levels with unit energy.
pub fn optimize_pam(m: usize, snr_db: f64, rounds: usize) -> Result<Vec<f64>> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::Validation(format!("PAM size {m} must be a power of two >= 2")));
    }
    let noise_var = 1.0 / db_to_linear(snr_db);
    let half_n = m / 2;
    let mut half: Vec<f64> = (0..half_n)
        .map(|k| normal_quantile((half_n + k) as f64 / m as f64 + 0.5 / m as f64))
        .collect();
    let mut best = pam_gmi(&symmetric(&half, 1.0), noise_var)?;
    let mut step = 0.5 * (half[half_n - 1] - half[0]) / half_n as f64;
    for _ in 0..rounds {
        let mut improved = false;
        for k in 0..half_n {
            for dir in [1.0, -1.0] {
                let mut trial = half.clone();
                trial[k] += dir * step;
                let lower = if k == 0 { 0.0 } else { trial[k - 1] };
                let upper = if k + 1 < half_n { trial[k + 1] } else { f64::INFINITY };
                if !(trial[k] > lower && trial[k] < upper) {
                    continue;
                }
                let g = pam_gmi(&symmetric(&trial, 1.0), noise_var)?;
                if g > best + 1e-12 {
                    best = g;
                    half = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-6 {
                break;
            }
        }
    }
    Ok(symmetric(&half, 1.0))
}

/// Product constellation from two shaped axes sharing the energy equally.
///
/// `snr_db` is the design SNR of the complex constellation; each axis sees
/// the same value per dimension.
pub fn shaped_product(name: &str, bits_i: u32, bits_q: u32, snr_db: f64, rounds: usize) -> Result<Constellation> {
    let i = optimize_pam(1 << bits_i, snr_db, rounds)?;
    let q = if bits_q == bits_i {
        i.clone()
    } else {
        optimize_pam(1 << bits_q, snr_db, rounds)?
    };
    product(name, &i, &q)
}
