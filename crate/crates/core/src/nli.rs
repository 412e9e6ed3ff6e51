//! Nonlinear interference for a single amplified span.
//!
//! [`nli_closed_form`] is the closed-form ISRS Gaussian-noise model: self-
//! and cross-channel terms with each channel's power profile linearised in
//! the Raman tilt. [`nli_integral_oracle`] integrates the GN double integral
//! numerically with the power profiles taken from [`propagate`], and is used
//! to check the closed form on small plans.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::fibre::{attenuation_at, propagate, FibreSpec, PowerEvolution};
use crate::spectral::ChannelPlan;
use crate::units::{
    beta2_from_dispersion, beta3_from_dispersion, db_per_km_to_neper, db_to_linear, linear_to_db, wavelength_to_frequency,
};
use crate::{Error, Event, Result};

/// Offsets from the dispersion reference beyond which the β₂/β₃ expansion
/// is flagged.
pub const DISPERSION_VALIDITY_THZ: f64 = 10.0;

/// Largest plan accepted by the numeric oracle.
pub const ORACLE_MAX_CHANNELS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NliParams {
    /// γ, 1/(W·km).
    pub gamma: f64,
    /// D, ps/(nm·km).
    pub dispersion: f64,
    /// S, ps/(nm²·km).
    pub dispersion_slope: f64,
    pub reference_wavelength_nm: f64,
    /// Spans accumulate incoherently.
    pub span_count: u32,
    pub spm_model: SpmModel,
}

/// How the self-channel term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SpmModel {
    /// asinh closed form; assumes the span is long enough that the power
    /// at its end is negligible.
    Asymptotic,
    /// One-dimensional quadrature over the exact single-channel domain
    /// with the finite span length kept.
    #[default]
    FiniteSpan,
}

impl Default for NliParams {
    fn default() -> Self {
        NliParams {
            gamma: 1.2,
            dispersion: 17.0,
            dispersion_slope: 0.067,
            reference_wavelength_nm: 1550.0,
            span_count: 1,
            spm_model: SpmModel::default(),
        }
    }
}

impl NliParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config("nonlinear coefficient must be finite and >= 0".into()));
        }
        if self.span_count == 0 {
            return Err(Error::Config("span count must be at least 1".into()));
        }
        if !self.dispersion.is_finite() || !self.dispersion_slope.is_finite() {
            return Err(Error::Config("dispersion parameters must be finite".into()));
        }
        wavelength_to_frequency(self.reference_wavelength_nm).map(|_| ())
    }

    /// (β₂ ps²/km, β₃ ps³/km, reference frequency THz).
    fn dispersion_terms(&self) -> Result<(f64, f64, f64)> {
        Ok((
            beta2_from_dispersion(self.dispersion, self.reference_wavelength_nm),
            beta3_from_dispersion(self.dispersion, self.dispersion_slope, self.reference_wavelength_nm),
            wavelength_to_frequency(self.reference_wavelength_nm)?,
        ))
    }
}

/// Per-channel NLI for the active channels of a plan.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NliEstimate {
    pub channels: Vec<usize>,
    /// NLI power in the channel bandwidth, mW.
    pub nli_mw: Vec<f64>,
    /// Launch power over NLI power, dB (`+∞` when NLI vanishes).
    pub snr_nli_db: Vec<f64>,
    pub warnings: Vec<Event>,
}

struct Inputs {
    channels: Vec<usize>,
    freqs: Vec<f64>,
    bandwidths: Vec<f64>,
    /// W, after point losses at the span input.
    powers: Vec<f64>,
    alphas: Vec<f64>,
    warnings: Vec<Event>,
}

fn gather(plan: &ChannelPlan, fibre: &FibreSpec, params: &NliParams) -> Result<Inputs> {
    fibre.validate()?;
    params.validate()?;
    let input_loss: f64 = fibre
        .point_losses
        .iter()
        .filter(|p| p.position_km <= 0.0)
        .map(|p| p.loss_db)
        .sum();
    let scale = 1e-3 / db_to_linear(input_loss);
    let (_, _, f_ref) = params.dispersion_terms()?;
    let mut inputs = Inputs {
        channels: Vec::new(),
        freqs: Vec::new(),
        bandwidths: Vec::new(),
        powers: Vec::new(),
        alphas: Vec::new(),
        warnings: Vec::new(),
    };
    let mut far = 0;
    let mut max_offset: f64 = 0.0;
    for c in plan.active_channels() {
        let offset = (c.center_frequency_thz - f_ref).abs();
        if offset > DISPERSION_VALIDITY_THZ {
            far += 1;
            max_offset = max_offset.max(offset);
        }
        inputs.channels.push(c.index);
        inputs.freqs.push(c.center_frequency_thz);
        inputs.bandwidths.push(c.symbol_rate_gbaud * 1e-3);
        inputs.powers.push(c.launch_power_mw() * scale);
        inputs.alphas.push(db_per_km_to_neper(attenuation_at(fibre, c.wavelength_nm())?));
    }
    if far > 0 {
        inputs.warnings.push(Event::DispersionRange {
            channels: far,
            max_offset_thz: max_offset,
        });
    }
    Ok(inputs)
}

fn finish(inputs: Inputs, nli_w: Vec<f64>, spans: u32) -> NliEstimate {
    let nli_mw: Vec<f64> = nli_w.iter().map(|p| p * 1e3 * spans as f64).collect();
    let snr_nli_db = inputs
        .powers
        .iter()
        .zip(&nli_mw)
        .map(|(p, n)| if *n > 0.0 { linear_to_db(p * 1e3 / n) } else { f64::INFINITY })
        .collect();
    NliEstimate {
        channels: inputs.channels,
        nli_mw,
        snr_nli_db,
        warnings: inputs.warnings,
    }
}

/// Closed-form ISRS GN estimate (one span, ᾱ = α).
///
/// The Raman tilt enters through each channel's offset from the power
/// centroid of the launched spectrum; losses placed mid-span are ignored.
pub fn nli_closed_form(plan: &ChannelPlan, fibre: &FibreSpec, params: &NliParams) -> Result<NliEstimate> {
    let inputs = gather(plan, fibre, params)?;
    let (beta2, beta3, f_ref) = params.dispersion_terms()?;
    let gamma2 = params.gamma * params.gamma;
    let cr = fibre.raman_slope();
    let p_tot: f64 = inputs.powers.iter().sum();
    let centroid = if p_tot > 0.0 {
        inputs.powers.iter().zip(&inputs.freqs).map(|(p, f)| p * f).sum::<f64>() / p_tot
    } else {
        0.0
    };
    let n = inputs.freqs.len();
    let rel: Vec<f64> = inputs.freqs.iter().map(|f| f - f_ref).collect();
    // T_k = (α_k + ᾱ_k − P_tot·C_r·f_k)² with ᾱ = α.
    let t: Vec<f64> = (0..n)
        .map(|k| {
            let v = 2.0 * inputs.alphas[k] - p_tot * cr * (inputs.freqs[k] - centroid);
            v * v
        })
        .collect();

    let mut nli = vec![0.0; n];
    for i in 0..n {
        let pi = inputs.powers[i];
        if pi <= 0.0 {
            continue;
        }
        let bi = inputs.bandwidths[i];

        let a = inputs.alphas[i];
        let spm = match params.spm_model {
            SpmModel::Asymptotic => {
                let phi_i = 1.5 * PI * PI * (beta2 + 2.0 * PI * beta3 * rel[i]);
                let x = phi_i * bi * bi / PI;
                4.0 / 9.0 * gamma2 / (bi * bi) * PI / (phi_i * a * 3.0 * a)
                    * ((t[i] - a * a) / a * libm::asinh(x / a)
                        + (4.0 * a * a - t[i]) / (2.0 * a) * libm::asinh(x / (2.0 * a)))
            }
            SpmModel::FiniteSpan => {
                // ρ(z) = (1 − x)e^{−αz} + x·e^{−2αz}, the same profile behind T_i.
                let x = p_tot * cr * (inputs.freqs[i] - centroid) / a;
                let k = 4.0 * PI * PI * (beta2 + 2.0 * PI * beta3 * rel[i]).abs();
                16.0 / 27.0 * gamma2 / (bi * bi)
                    * spm_domain_integral(bi / 2.0, k, &[(1.0 - x, a), (x, 2.0 * a)], fibre.length_km)
            }
        };

        let mut xpm = 0.0;
        for k in 0..n {
            if k == i || inputs.powers[k] <= 0.0 {
                continue;
            }
            let ak = inputs.alphas[k];
            let bk = inputs.bandwidths[k];
            let ratio = inputs.powers[k] / pi;
            let phi_ik = 2.0 * PI * PI * (rel[k] - rel[i]) * (beta2 + PI * beta3 * (rel[i] + rel[k]));
            let y = phi_ik * bi;
            xpm += ratio * ratio / (bk * phi_ik * ak * 3.0 * ak)
                * ((t[k] - ak * ak) / ak * libm::atan(y / ak)
                    + (4.0 * ak * ak - t[k]) / (2.0 * ak) * libm::atan(y / (2.0 * ak)));
        }
        let xpm = 32.0 / 27.0 * gamma2 * xpm;
        nli[i] = (spm + xpm) * pi * pi * pi;
    }
    Ok(finish(inputs, nli, params.span_count))
}

/// Integral of the span kernel `|∫₀ᴸ ρ(z)e^{jφz}dz|²` over the
/// single-channel domain `|Δ₁|, |Δ₂|, |Δ₁+Δ₂| ≤ a` with `φ = kΔ₁Δ₂`, for
/// `ρ(z) = Σ c·e^{−rz}` given as `(c, r)` pairs.
///
/// Level sets of φ reduce the double integral to one dimension with the
/// weight `ln(1/s) + 2·atanh(√(1−4s))` (second term for `s < 1/4`), where
/// `s = φ/(k·a²)`.
fn spm_domain_integral(a: f64, k: f64, profile: &[(f64, f64)], length_km: f64) -> f64 {
    let kernel = |phi: f64| {
        let (sn, cs) = libm::sincos(phi * length_km);
        let (mut re, mut im) = (0.0, 0.0);
        for &(c, r) in profile {
            let e = libm::exp(-r * length_km);
            // c·(1 − e·e^{jφL})/(r − jφ)
            let (nr, ni) = (c * (1.0 - e * cs), -c * e * sn);
            let den = r * r + phi * phi;
            re += (nr * r - ni * phi) / den;
            im += (ni * r + nr * phi) / den;
        }
        re * re + im * im
    };
    let big_phi = k * a * a;
    if big_phi <= 0.0 {
        // No dispersion: the kernel is constant over the hexagon of area 3a².
        return 3.0 * a * a * kernel(0.0);
    }
    let oscillations = big_phi * length_km / (2.0 * PI);
    let n = 2 * ((40.0 * oscillations) as usize).clamp(200, 100_000);
    // s = u²: the log weight becomes integrable-smooth in u.
    let square = simpson(n, |u| {
        let s = u * u;
        if s == 0.0 {
            0.0
        } else {
            2.0 * u * kernel(big_phi * s) * libm::log(1.0 / s)
        }
    });
    // s = sin²θ/4 on the triangles: smooth at both ends in θ.
    let triangle = simpson(n, |v| {
        let theta = v * PI / 2.0;
        let (sn, cs) = libm::sincos(theta);
        let s = sn * sn / 4.0;
        if s == 0.0 {
            0.0
        } else {
            let ds = sn * cs / 2.0 * PI / 2.0;
            ds * kernel(big_phi * s) * 2.0 * libm::atanh(cs.min(1.0 - 1e-16))
        }
    });
    2.0 * a * a * (square + triangle)
}

/// Composite Simpson rule on [0, 1] with `n` (even) intervals.
fn simpson(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / n as f64;
    let mut s = f(0.0) + f(1.0);
    for j in 1..n {
        s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j as f64 * h);
    }
    s * h / 3.0
}

/// Resolution controls for [`nli_integral_oracle_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    /// Step in the asinh-stretched coordinate.
    pub dt: f64,
    /// Minimum trapezoid nodes per interval.
    pub min_nodes: usize,
    /// Grading scale at outer breakpoints, THz.
    pub outer_scale_thz: f64,
    /// Length of the piecewise-exponential segments of the z integral, km.
    pub segment_km: f64,
    /// Integration step handed to [`propagate`], km.
    pub propagation_step_km: f64,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            dt: 0.05,
            min_nodes: 8,
            outer_scale_thz: 2e-6,
            segment_km: 1.0,
            propagation_step_km: 0.1,
        }
    }
}

impl OracleGrid {
    /// The same grid at twice the resolution.
    pub fn refined(&self) -> Self {
        OracleGrid {
            dt: self.dt / 2.0,
            min_nodes: self.min_nodes * 2,
            outer_scale_thz: self.outer_scale_thz / 2.0,
            segment_km: self.segment_km / 2.0,
            propagation_step_km: self.propagation_step_km,
        }
    }
}

/// Numeric GN reference with the default grid.
pub fn nli_integral_oracle(plan: &ChannelPlan, fibre: &FibreSpec, params: &NliParams) -> Result<NliEstimate> {
    nli_integral_oracle_with(plan, fibre, params, &OracleGrid::default())
}

/// Evaluates
///
/// ```text
/// G_NLI(f) = 16/27·γ² ∬ G(f₁)G(f₂)G(f₁+f₂−f)·|∫₀ᴸ √(ρ₁ρ₂ρ₃/ρ_f)·e^{jφz} dz|² df₁ df₂
/// φ = −4π²(f₁−f)(f₂−f)[β₂ + πβ₃(f₁+f₂)]
/// ```
///
/// at each channel centre, with ρ the propagated power profiles normalised
/// at the span input, and returns `G_NLI·B` per channel. Both frequency
/// integrals use the trapezoid rule on nodes graded towards the
/// breakpoints of the integrand.
pub fn nli_integral_oracle_with(
    plan: &ChannelPlan,
    fibre: &FibreSpec,
    params: &NliParams,
    grid: &OracleGrid,
) -> Result<NliEstimate> {
    let active = plan.active_channels().count();
    if active > ORACLE_MAX_CHANNELS {
        return Err(Error::OracleTooLarge {
            channels: active,
            max: ORACLE_MAX_CHANNELS,
        });
    }
    if !(grid.dt > 0.0) || grid.min_nodes < 2 || !(grid.outer_scale_thz > 0.0) || !(grid.segment_km > 0.0) {
        return Err(Error::Validation("oracle grid parameters must be positive".into()));
    }
    let inputs = gather(plan, fibre, params)?;
    let (beta2, beta3, f_ref) = params.dispersion_terms()?;
    let n = inputs.freqs.len();
    if params.gamma == 0.0 || inputs.powers.iter().all(|p| *p <= 0.0) {
        return Ok(finish(inputs, vec![0.0; n], params.span_count));
    }

    let evo = propagate(plan, fibre, grid.propagation_step_km)?;
    let profile = Profiles::new(&evo, grid.segment_km);

    let lo: Vec<f64> = (0..n).map(|k| inputs.freqs[k] - inputs.bandwidths[k] / 2.0).collect();
    let hi: Vec<f64> = (0..n).map(|k| inputs.freqs[k] + inputs.bandwidths[k] / 2.0).collect();
    let psd: Vec<f64> = (0..n).map(|k| inputs.powers[k] / inputs.bandwidths[k]).collect();
    let channel_at = |f: f64| (0..n).find(|&k| f >= lo[k] && f <= hi[k]);

    let mut nli = vec![0.0; n];
    let mut pair_buf = Vec::new();
    for i in 0..n {
        let f = inputs.freqs[i];
        // Outer breakpoints: channel edges and the channel-under-test centre.
        let mut breaks: Vec<f64> = lo.iter().chain(hi.iter()).copied().chain([f]).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let mut outer_nodes = Vec::new();
        let mut outer_vals = Vec::new();
        for w in breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let Some(k1) = channel_at(mid) else { continue };
            let nodes = graded_two_sided(w[0], w[1], grid.outer_scale_thz, grid.dt, grid.min_nodes);
            for f1 in nodes {
                if outer_nodes.last().is_some_and(|last: &f64| (f1 - *last).abs() < 1e-15) {
                    continue;
                }
                let v = inner_integral(
                    f1, k1, i, f, &lo, &hi, &psd, beta2, beta3, f_ref, &profile, grid, &mut pair_buf,
                );
                outer_nodes.push(f1);
                outer_vals.push(v);
            }
            // Break the trapezoid chain between disjoint outer intervals.
            outer_nodes.push(f64::NAN);
            outer_vals.push(f64::NAN);
        }
        let g_nli = 16.0 / 27.0 * params.gamma * params.gamma * trapezoid_chunks(&outer_nodes, &outer_vals);
        nli[i] = g_nli * inputs.bandwidths[i];
    }
    Ok(finish(inputs, nli, params.span_count))
}

/// `∫ G(f₂)G(f₁+f₂−f)|η(z)|² df₂` for a fixed `f₁` inside channel `k1`,
/// multiplied by `G(f₁)`.
#[allow(clippy::too_many_arguments)]
fn inner_integral(
    f1: f64,
    k1: usize,
    i: usize,
    f: f64,
    lo: &[f64],
    hi: &[f64],
    psd: &[f64],
    beta2: f64,
    beta3: f64,
    f_ref: f64,
    profile: &Profiles,
    grid: &OracleGrid,
    buf: &mut Vec<(f64, f64)>,
) -> f64 {
    let n = lo.len();
    let d1 = f1 - f;
    let mut total = 0.0;
    // Grading scale around f₂ = f: the Lorentzian width of |η|² in f₂.
    let k_disp = 4.0 * PI * PI * beta2.abs().max(1e-3);
    let width = profile.min_decay / (k_disp * d1.abs().max(1e-12));
    let scale = (0.5 * width).clamp(1e-8, 1e-3);
    for k2 in 0..n {
        for k3 in 0..n {
            // f₂ in channel k2 and f₃ = f₁ + f₂ − f in channel k3.
            let a = lo[k2].max(lo[k3] - d1);
            let b = hi[k2].min(hi[k3] - d1);
            if !(b > a) {
                continue;
            }
            let weight = psd[k1] * psd[k2] * psd[k3];
            let triple = profile.triple(k1, k2, k3, i);
            buf.clear();
            for f2 in graded_about(a, b, f, scale, grid.dt, grid.min_nodes) {
                let d2 = f2 - f;
                let phi = -4.0 * PI * PI * d1 * d2 * (beta2 + PI * beta3 * (f1 + f2 - 2.0 * f_ref));
                buf.push((f2, profile.link_kernel(&triple, phi)));
            }
            let mut s = 0.0;
            for w in buf.windows(2) {
                s += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
            }
            total += weight * s;
        }
    }
    total
}

/// Log power profiles on coarse z segments.
struct Profiles {
    z: Vec<f64>,
    /// `ln ρ_k(z_s)`, per channel.
    log_rho: Vec<Vec<f64>>,
    /// Smallest average decay rate over all channels, 1/km.
    min_decay: f64,
}

impl Profiles {
    fn new(evo: &PowerEvolution, segment_km: f64) -> Self {
        let d = &evo.distances_km;
        // Start right after any loss at the span input.
        let start = d.iter().rposition(|z| *z == d[0]).unwrap_or(0);
        let length = *d.last().unwrap();
        let mut picks = vec![start];
        let mut next = segment_km;
        for s in start + 1..d.len() {
            let last = s == d.len() - 1;
            // Keep both samples around point losses so drops stay sharp.
            let drop_edge = s + 1 < d.len() && d[s + 1] == d[s] || d[s - 1] == d[s];
            if last || drop_edge || d[s] >= next - 1e-9 {
                picks.push(s);
                while next <= d[s] + 1e-9 {
                    next += segment_km;
                }
            }
        }
        let z: Vec<f64> = picks.iter().map(|&s| d[s]).collect();
        let log_rho: Vec<Vec<f64>> = evo
            .powers_mw
            .iter()
            .map(|p| picks.iter().map(|&s| libm::log(p[s] / p[start])).collect())
            .collect();
        let min_decay = log_rho
            .iter()
            .map(|l| if length > 0.0 { -l.last().unwrap() / length } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
            .max(1e-3);
        Profiles { z, log_rho, min_decay }
    }

    /// `ln √(ρ₁ρ₂ρ₃/ρ_f)` at every retained z sample.
    fn triple(&self, k1: usize, k2: usize, k3: usize, i: usize) -> Vec<f64> {
        (0..self.z.len())
            .map(|s| 0.5 * (self.log_rho[k1][s] + self.log_rho[k2][s] + self.log_rho[k3][s] - self.log_rho[i][s]))
            .collect()
    }

    /// `|∫ e^{ln A(z)} e^{jφz} dz|²` with `ln A` linear on every segment.
    fn link_kernel(&self, log_a: &[f64], phi: f64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for s in 0..self.z.len() - 1 {
            let h = self.z[s + 1] - self.z[s];
            if h <= 0.0 {
                continue;
            }
            let c = (log_a[s + 1] - log_a[s]) / h;
            // A_s·e^{jφz_s}·(e^{(c+jφ)h} − 1)/(c + jφ)
            let amp = libm::exp(log_a[s]);
            let (ps, pc) = libm::sincos(phi * self.z[s]);
            let (wr, wi) = (c * h, phi * h);
            let (er, ei) = if wr.abs() + wi.abs() < 1e-4 {
                // (e^w − 1)/w ≈ 1 + w/2 + w²/6, times h
                let (w2r, w2i) = (wr * wr - wi * wi, 2.0 * wr * wi);
                (h * (1.0 + wr / 2.0 + w2r / 6.0), h * (wi / 2.0 + w2i / 6.0))
            } else {
                let e = libm::exp(wr);
                let (sn, cs) = libm::sincos(wi);
                let (nr, ni) = (e * cs - 1.0, e * sn);
                let den = wr * wr + wi * wi;
                // (nr + j ni)/(wr + j wi) · h
                (h * (nr * wr + ni * wi) / den, h * (ni * wr - nr * wi) / den)
            };
            let (tr, ti) = (er * pc - ei * ps, er * ps + ei * pc);
            re += amp * tr;
            im += amp * ti;
        }
        re * re + im * im
    }
}

/// Nodes on `[a, b]` uniform in `asinh((x − c)/s)`: dense near `c`, with
/// roughly constant relative spacing away from it.
fn graded_about(a: f64, b: f64, c: f64, s: f64, dt: f64, min_nodes: usize) -> impl Iterator<Item = f64> {
    let ta = libm::asinh((a - c) / s);
    let tb = libm::asinh((b - c) / s);
    let count = (libm::ceil((tb - ta) / dt) as usize).max(min_nodes - 1);
    (0..=count).map(move |k| {
        if k == count {
            b
        } else if k == 0 {
            a
        } else {
            c + s * libm::sinh(ta + (tb - ta) * k as f64 / count as f64)
        }
    })
}

/// Nodes on `[a, b]` graded towards both ends.
fn graded_two_sided(a: f64, b: f64, s: f64, dt: f64, min_nodes: usize) -> Vec<f64> {
    let half = 0.5 * (b - a);
    let t_max = libm::asinh(half / s);
    let per_side = (libm::ceil(t_max / dt) as usize).max(min_nodes.div_ceil(2));
    let mut nodes = Vec::with_capacity(2 * per_side + 1);
    for k in 0..per_side {
        nodes.push(a + s * libm::sinh(t_max * k as f64 / per_side as f64));
    }
    nodes.push(a + half);
    for k in (0..per_side).rev() {
        nodes.push(b - s * libm::sinh(t_max * k as f64 / per_side as f64));
    }
    nodes
}

/// Trapezoid rule over runs of nodes separated by NaN markers.
fn trapezoid_chunks(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 1..x.len() {
        if x[k].is_nan() || x[k - 1].is_nan() {
            continue;
        }
        s += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibre::RamanProfile;
    use crate::spectral::{apply_launch_profile, build_plan, Band, BandName, LaunchProfile};

    fn plan(n: usize, total_dbm: f64) -> ChannelPlan {
        let p = build_plan(&[Band::new(BandName::C, 1530.0, 1566.0, n)], 32.5, 32.0).unwrap();
        apply_launch_profile(&p, &LaunchProfile::new(total_dbm, 0.0)).unwrap()
    }

    #[test]
    fn zero_power_gives_zero_nli() {
        let p = plan(5, 0.0);
        let mut zero = p.clone();
        zero.channels.iter_mut().for_each(|c| c.launch_power_dbm = f64::NEG_INFINITY);
        let est = nli_closed_form(&zero, &FibreSpec::ssmf(39.0), &NliParams::default()).unwrap();
        assert!(est.nli_mw.iter().all(|n| *n == 0.0));
    }

    #[test]
    fn cubic_scaling_closed_form() {
        let fibre = FibreSpec::ssmf(39.0);
        let a = nli_closed_form(&plan(40, 10.0), &fibre, &NliParams::default()).unwrap();
        // Raman coupling depends on total power, so compare with Raman off.
        let mut off = fibre.clone();
        off.raman = RamanProfile::off();
        let a0 = nli_closed_form(&plan(40, 10.0), &off, &NliParams::default()).unwrap();
        let b0 = nli_closed_form(&plan(40, 11.0), &off, &NliParams::default()).unwrap();
        for (x, y) in a0.nli_mw.iter().zip(&b0.nli_mw) {
            assert!((linear_to_db(y / x) - 3.0).abs() < 1e-9);
        }
        assert_eq!(a.nli_mw.len(), 40);
    }

    #[test]
    fn oracle_refuses_large_plans() {
        let err = nli_integral_oracle(&plan(10, 0.0), &FibreSpec::ssmf(39.0), &NliParams::default()).unwrap_err();
        assert_eq!(err, Error::OracleTooLarge { channels: 10, max: 9 });
    }

    #[test]
    fn zero_gamma_oracle() {
        let params = NliParams {
            gamma: 0.0,
            ..NliParams::default()
        };
        let est = nli_integral_oracle(&plan(3, 5.0), &FibreSpec::ssmf(39.0), &params).unwrap();
        assert!(est.nli_mw.iter().all(|n| *n == 0.0));
        assert!(est.snr_nli_db.iter().all(|s| *s == f64::INFINITY));
    }

    #[test]
    fn graded_nodes_cover_interval() {
        let v: Vec<f64> = graded_about(-1.0, 2.0, 0.0, 1e-3, 0.1, 4).collect();
        assert_eq!(v[0], -1.0);
        assert_eq!(*v.last().unwrap(), 2.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let t = graded_two_sided(0.0, 1.0, 1e-3, 0.1, 4);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lossless_kernel_is_sinc() {
        let prof = Profiles {
            z: vec![0.0, 5.0, 10.0],
            log_rho: vec![vec![0.0; 3]],
            min_decay: 1e-3,
        };
        let k = prof.link_kernel(&[0.0, 0.0, 0.0], 0.3);
        let exact = (2.0 * libm::sin(0.3 * 10.0 / 2.0) / 0.3).powi(2);
        assert!((k - exact).abs() < 1e-10);
        assert!((prof.link_kernel(&[0.0; 3], 0.0) - 100.0).abs() < 1e-10);
    }
}
