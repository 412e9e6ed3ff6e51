//! Span propagation with wavelength-dependent loss, point losses and
//! inter-channel stimulated Raman scattering.
//!
//! Channel powers obey
//!
//! ```text
//! dPᵢ/dz = −αᵢPᵢ + Pᵢ·Σ_{fⱼ>fᵢ} g(fⱼ−fᵢ)Pⱼ − Pᵢ·Σ_{fⱼ<fᵢ} (fᵢ/fⱼ)·g(fᵢ−fⱼ)Pⱼ
//! ```
//!
//! with P in W and g in 1/(W·km). The depletion term carries the photon
//! ratio so that Raman exchange conserves photon flux.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::spectral::ChannelPlan;
use crate::units::{db_per_km_to_neper, db_to_linear, mw_to_dbm};
use crate::{Error, Event, Result};

/// Triangular profiles use `slope`, `peak_shift_thz` and `falloff_thz`;
/// tabulated profiles interpolate `table`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RamanShape {
    Triangular,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RamanProfile {
    /// Gain slope below the peak, 1/(W·km·THz), for `reference_area_um2`.
    pub slope: f64,
    pub peak_shift_thz: f64,
    /// Width of the linear roll-off to zero above the peak.
    pub falloff_thz: f64,
    pub shape: RamanShape,
    /// `(Δf THz, gain 1/(W·km))`, ascending in Δf.
    pub table: Vec<(f64, f64)>,
    pub reference_area_um2: f64,
}

impl Default for RamanProfile {
    fn default() -> Self {
        RamanProfile {
            slope: 0.028,
            peak_shift_thz: 14.0,
            falloff_thz: 4.0,
            shape: RamanShape::Triangular,
            table: Vec::new(),
            reference_area_um2: 80.0,
        }
    }
}

impl RamanProfile {
    pub fn off() -> Self {
        RamanProfile {
            slope: 0.0,
            ..RamanProfile::default()
        }
    }

    /// Gain in 1/(W·km) at frequency offset `df` (THz) for the reference area.
    pub fn gain(&self, df: f64) -> f64 {
        if df <= 0.0 {
            return 0.0;
        }
        match self.shape {
            RamanShape::Triangular => {
                if df <= self.peak_shift_thz {
                    self.slope * df
                } else if df < self.peak_shift_thz + self.falloff_thz {
                    self.slope * self.peak_shift_thz * (self.peak_shift_thz + self.falloff_thz - df) / self.falloff_thz
                } else {
                    0.0
                }
            }
            RamanShape::Tabulated => interpolate_table(&self.table, df).map_or(0.0, |(g, clamped)| {
                if clamped {
                    0.0
                } else {
                    g.max(0.0)
                }
            }),
        }
    }

    /// Best linear slope through the origin over `(0, peak_shift]`, used by
    /// the closed-form NLI model.
    pub fn linear_slope(&self) -> f64 {
        match self.shape {
            RamanShape::Triangular => self.slope,
            RamanShape::Tabulated => {
                let (num, den) = self
                    .table
                    .iter()
                    .filter(|(df, _)| *df > 0.0 && *df <= self.peak_shift_thz)
                    .fold((0.0, 0.0), |(n, d), (df, g)| (n + df * g, d + df * df));
                if den > 0.0 {
                    num / den
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self.shape {
            RamanShape::Triangular => {
                if self.slope < 0.0 || !(self.peak_shift_thz > 0.0) || self.falloff_thz < 0.0 {
                    return Err(Error::Config(
                        "Raman slope must be >= 0, peak shift > 0 and falloff >= 0".into(),
                    ));
                }
            }
            RamanShape::Tabulated => {
                if self.table.is_empty() {
                    return Err(Error::Config("tabulated Raman profile has no entries".into()));
                }
                if self.table.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(Error::Config("Raman table offsets must ascend".into()));
                }
                if self.table.iter().any(|(df, g)| *df < 0.0 || *g < 0.0) {
                    return Err(Error::Config("Raman table entries must be non-negative".into()));
                }
            }
        }
        if !(self.reference_area_um2 > 0.0) {
            return Err(Error::Config("Raman reference area must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointLoss {
    pub position_km: f64,
    pub loss_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FibreSpec {
    pub length_km: f64,
    /// `(wavelength nm, α dB/km)`, ascending in wavelength.
    pub attenuation_table: Vec<(f64, f64)>,
    pub effective_area_um2: f64,
    pub raman: RamanProfile,
    pub point_losses: Vec<PointLoss>,
}

/// SSMF-like attenuation: 0.2 dB/km around 1550 nm, rising toward both ends.
pub fn default_attenuation_table() -> Vec<(f64, f64)> {
    vec![
        (1450.0, 0.222),
        (1480.0, 0.212),
        (1500.0, 0.206),
        (1520.0, 0.202),
        (1540.0, 0.200),
        (1560.0, 0.200),
        (1580.0, 0.200),
        (1600.0, 0.202),
        (1620.0, 0.206),
        (1640.0, 0.212),
    ]
}

impl FibreSpec {
    /// Standard single-mode fibre defaults for a span of `length_km`.
    pub fn ssmf(length_km: f64) -> Self {
        FibreSpec {
            length_km,
            attenuation_table: default_attenuation_table(),
            effective_area_um2: 80.0,
            raman: RamanProfile::default(),
            point_losses: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_km >= 0.0) || !self.length_km.is_finite() {
            return Err(Error::Config(format!("fibre length {} km is invalid", self.length_km)));
        }
        if self.attenuation_table.is_empty() {
            return Err(Error::Config("attenuation table is empty".into()));
        }
        if self.attenuation_table.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Config("attenuation table wavelengths must ascend".into()));
        }
        if self.attenuation_table.iter().any(|(_, a)| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::Config("attenuation values must be finite and non-negative".into()));
        }
        if !(self.effective_area_um2 > 0.0) {
            return Err(Error::Config("effective area must be positive".into()));
        }
        for pl in &self.point_losses {
            if pl.loss_db < 0.0 || pl.position_km < 0.0 || pl.position_km > self.length_km {
                return Err(Error::Config(format!(
                    "point loss {} dB at {} km is outside [0, {}] km or negative",
                    pl.loss_db, pl.position_km, self.length_km
                )));
            }
        }
        self.raman.validate()
    }

    /// Raman gain in 1/(W·km) for this fibre's effective area.
    pub fn raman_gain(&self, df_thz: f64) -> f64 {
        self.raman.gain(df_thz) * self.raman.reference_area_um2 / self.effective_area_um2
    }

    /// Linearised Raman slope in 1/(W·km·THz) for this fibre's effective area.
    pub fn raman_slope(&self) -> f64 {
        self.raman.linear_slope() * self.raman.reference_area_um2 / self.effective_area_um2
    }

    pub fn total_point_loss_db(&self) -> f64 {
        self.point_losses.iter().map(|p| p.loss_db).sum()
    }
}

/// Piecewise-linear lookup; returns the value and whether it was clamped.
fn interpolate_table(table: &[(f64, f64)], x: f64) -> Option<(f64, bool)> {
    let first = table.first()?;
    let last = table.last()?;
    if x < first.0 {
        return Some((first.1, true));
    }
    if x > last.0 {
        return Some((last.1, true));
    }
    let k = table.partition_point(|(t, _)| *t <= x);
    if k == table.len() {
        return Some((last.1, false));
    }
    let (x0, y0) = table[k - 1];
    let (x1, y1) = table[k];
    Some((y0 + (y1 - y0) * (x - x0) / (x1 - x0), false))
}

/// Attenuation in dB/km at `lambda_nm`, clamped to the table ends.
pub fn attenuation_at(spec: &FibreSpec, lambda_nm: f64) -> Result<f64> {
    attenuation_lookup(spec, lambda_nm).map(|(a, _)| a)
}

/// Like [`attenuation_at`] but also reports whether the value was clamped.
pub fn attenuation_lookup(spec: &FibreSpec, lambda_nm: f64) -> Result<(f64, bool)> {
    interpolate_table(&spec.attenuation_table, lambda_nm)
        .ok_or_else(|| Error::Config("attenuation table is empty".into()))
}

/// Per-channel power samples along the span.
///
/// A point loss appears as two samples at the same distance: before and
/// after the drop.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerEvolution {
    pub distances_km: Vec<f64>,
    /// Plan indices of the propagated (non-suppressed) channels.
    pub channels: Vec<usize>,
    pub frequencies_thz: Vec<f64>,
    /// `powers_mw[k][s]`: channel `channels[k]` at `distances_km[s]`.
    pub powers_mw: Vec<Vec<f64>>,
    pub warnings: Vec<Event>,
}

impl PowerEvolution {
    pub fn launch_mw(&self) -> Vec<f64> {
        self.powers_mw.iter().map(|p| p[0]).collect()
    }

    pub fn output_mw(&self) -> Vec<f64> {
        self.powers_mw.iter().map(|p| *p.last().unwrap()).collect()
    }

    pub fn samples(&self) -> usize {
        self.distances_km.len()
    }
}

/// Raman coupling between a fixed, ascending set of channel frequencies.
pub(crate) struct RamanCoupling {
    freqs: Vec<f64>,
    kind: Coupling,
}

enum Coupling {
    Off,
    /// Window bounds for the rising and falling legs of the triangle.
    Triangular {
        slope: f64,
        peak: f64,
        fall: f64,
        up_rise: Vec<usize>,
        up_fall: Vec<usize>,
        down_rise: Vec<usize>,
        down_fall: Vec<usize>,
    },
    Dense(Vec<f64>),
}

impl RamanCoupling {
    pub(crate) fn new(freqs: &[f64], spec: &FibreSpec) -> Self {
        let n = freqs.len();
        let scale = spec.raman.reference_area_um2 / spec.effective_area_um2;
        let kind = match spec.raman.shape {
            RamanShape::Triangular if spec.raman.slope == 0.0 => Coupling::Off,
            RamanShape::Triangular => {
                let peak = spec.raman.peak_shift_thz;
                let fall = spec.raman.falloff_thz;
                // up_*[i]: first index past the window above channel i.
                // down_*[i]: first index of the window below channel i.
                let up_rise = (0..n).map(|i| freqs.partition_point(|f| *f <= freqs[i] + peak)).collect();
                let up_fall = (0..n)
                    .map(|i| freqs.partition_point(|f| *f < freqs[i] + peak + fall))
                    .collect();
                let down_rise = (0..n).map(|i| freqs.partition_point(|f| *f < freqs[i] - peak)).collect();
                let down_fall = (0..n)
                    .map(|i| freqs.partition_point(|f| *f <= freqs[i] - peak - fall))
                    .collect();
                Coupling::Triangular {
                    slope: spec.raman.slope * scale,
                    peak,
                    fall,
                    up_rise,
                    up_fall,
                    down_rise,
                    down_fall,
                }
            }
            RamanShape::Tabulated => {
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let df = freqs[j] - freqs[i];
                        m[i * n + j] = if df > 0.0 {
                            spec.raman_gain(df)
                        } else {
                            -(freqs[i] / freqs[j]) * spec.raman_gain(-df)
                        };
                    }
                }
                Coupling::Dense(m)
            }
        };
        RamanCoupling {
            freqs: freqs.to_vec(),
            kind,
        }
    }

    pub(crate) fn is_off(&self) -> bool {
        matches!(self.kind, Coupling::Off)
    }

    /// Net Raman rate of every channel, 1/km, for powers in W.
    pub(crate) fn rates(&self, p: &[f64], out: &mut [f64], scratch: &mut Prefix) {
        match &self.kind {
            Coupling::Off => out.iter_mut().for_each(|r| *r = 0.0),
            Coupling::Dense(m) => {
                let n = p.len();
                for i in 0..n {
                    out[i] = m[i * n..(i + 1) * n].iter().zip(p).map(|(g, pj)| g * pj).sum();
                }
            }
            Coupling::Triangular {
                slope,
                peak,
                fall,
                up_rise,
                up_fall,
                down_rise,
                down_fall,
            } => {
                scratch.fill(&self.freqs, p);
                let f = &self.freqs;
                let fall_coeff = if *fall > 0.0 { slope * peak / fall } else { 0.0 };
                for i in 0..p.len() {
                    let fi = f[i];
                    // Gain from higher-frequency channels.
                    let (a, b) = (i + 1, up_rise[i]);
                    let mut gain = slope * (scratch.fp(a, b) - fi * scratch.p(a, b));
                    let (a, b) = (up_rise[i], up_fall[i]);
                    gain += fall_coeff * ((peak + fall + fi) * scratch.p(a, b) - scratch.fp(a, b));
                    // Depletion toward lower-frequency channels.
                    let (a, b) = (down_rise[i], i);
                    let mut loss = slope * fi * (fi * scratch.p_over_f(a, b) - scratch.p(a, b));
                    let (a, b) = (down_fall[i], down_rise[i]);
                    loss += fall_coeff * fi * ((peak + fall - fi) * scratch.p_over_f(a, b) + scratch.p(a, b));
                    out[i] = gain - loss;
                }
            }
        }
    }
}

/// Prefix sums of P, f·P and P/f.
#[derive(Default)]
pub(crate) struct Prefix {
    p: Vec<f64>,
    fp: Vec<f64>,
    pf: Vec<f64>,
}

impl Prefix {
    fn fill(&mut self, f: &[f64], p: &[f64]) {
        let n = p.len();
        self.p.resize(n + 1, 0.0);
        self.fp.resize(n + 1, 0.0);
        self.pf.resize(n + 1, 0.0);
        for i in 0..n {
            self.p[i + 1] = self.p[i] + p[i];
            self.fp[i + 1] = self.fp[i] + f[i] * p[i];
            self.pf[i + 1] = self.pf[i] + p[i] / f[i];
        }
    }

    fn p(&self, a: usize, b: usize) -> f64 {
        if b > a {
            self.p[b] - self.p[a]
        } else {
            0.0
        }
    }

    fn fp(&self, a: usize, b: usize) -> f64 {
        if b > a {
            self.fp[b] - self.fp[a]
        } else {
            0.0
        }
    }

    fn p_over_f(&self, a: usize, b: usize) -> f64 {
        if b > a {
            self.pf[b] - self.pf[a]
        } else {
            0.0
        }
    }
}

/// Integrates the span with a fixed-step, integrating-factor RK4 scheme.
///
/// The attenuation is handled exactly; RK4 advances the Raman exchange.
/// Point losses are applied at the step boundary nearest their position.
pub fn propagate(plan: &ChannelPlan, spec: &FibreSpec, step_km: f64) -> Result<PowerEvolution> {
    spec.validate()?;
    if !(step_km > 0.0) {
        return Err(Error::Validation(format!("step {step_km} km must be positive")));
    }
    let active: Vec<_> = plan.active_channels().collect();
    if active.is_empty() {
        return Err(Error::Validation("plan has no active channels to propagate".into()));
    }
    let channels: Vec<usize> = active.iter().map(|c| c.index).collect();
    let freqs: Vec<f64> = active.iter().map(|c| c.center_frequency_thz).collect();
    let n = freqs.len();

    let mut alpha = Vec::with_capacity(n);
    let mut clamped = Vec::new();
    for c in &active {
        let (a, was_clamped) = attenuation_lookup(spec, c.wavelength_nm())?;
        if was_clamped {
            clamped.push(c.wavelength_nm());
        }
        alpha.push(db_per_km_to_neper(a));
    }
    let mut warnings = Vec::new();
    if !clamped.is_empty() {
        warnings.push(Event::AttenuationClamped {
            channels: clamped.len(),
            min_wavelength_nm: clamped.iter().copied().fold(f64::INFINITY, f64::min),
            max_wavelength_nm: clamped.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }

    let steps = if spec.length_km > 0.0 {
        (libm::ceil(spec.length_km / step_km - 1e-9) as usize).max(1)
    } else {
        0
    };
    let h = if steps > 0 { spec.length_km / steps as f64 } else { 0.0 };
    let mut drops = vec![0.0; steps + 1];
    for pl in &spec.point_losses {
        let k = if steps > 0 {
            (libm::round(pl.position_km / h) as usize).min(steps)
        } else {
            0
        };
        drops[k] += pl.loss_db;
    }

    let coupling = RamanCoupling::new(&freqs, spec);
    let decay: Vec<f64> = alpha.iter().map(|a| libm::exp(-a * h)).collect();
    let half_decay: Vec<f64> = alpha.iter().map(|a| libm::exp(-a * h / 2.0)).collect();

    let mut p: Vec<f64> = active.iter().map(|c| c.launch_power_mw() * 1e-3).collect();
    let mut distances = vec![0.0];
    let mut powers: Vec<Vec<f64>> = p.iter().map(|w| vec![w * 1e3]).collect();

    let record = |p: &[f64], z: f64, distances: &mut Vec<f64>, powers: &mut Vec<Vec<f64>>| {
        distances.push(z);
        for (series, w) in powers.iter_mut().zip(p) {
            series.push(w * 1e3);
        }
    };

    let mut scratch = Prefix::default();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut rate = vec![0.0; n];

    for s in 0..=steps {
        let z = s as f64 * h;
        if drops[s] > 0.0 {
            let factor = 1.0 / db_to_linear(drops[s]);
            p.iter_mut().for_each(|w| *w *= factor);
            record(&p, z, &mut distances, &mut powers);
        }
        if s == steps {
            break;
        }
        if coupling.is_off() {
            for (w, d) in p.iter_mut().zip(&decay) {
                *w *= d;
            }
        } else {
            // u(σ) = P(z+σ)·exp(ασ); du/dσ = u·R(u·exp(−ασ)).
            coupling.rates(&p, &mut rate, &mut scratch);
            for i in 0..n {
                k1[i] = p[i] * rate[i];
                tmp[i] = (p[i] + 0.5 * h * k1[i]) * half_decay[i];
            }
            coupling.rates(&tmp, &mut rate, &mut scratch);
            for i in 0..n {
                k2[i] = (p[i] + 0.5 * h * k1[i]) * rate[i];
                tmp[i] = (p[i] + 0.5 * h * k2[i]) * half_decay[i];
            }
            coupling.rates(&tmp, &mut rate, &mut scratch);
            for i in 0..n {
                k3[i] = (p[i] + 0.5 * h * k2[i]) * rate[i];
                tmp[i] = (p[i] + h * k3[i]) * decay[i];
            }
            coupling.rates(&tmp, &mut rate, &mut scratch);
            for i in 0..n {
                k4[i] = (p[i] + h * k3[i]) * rate[i];
            }
            for i in 0..n {
                p[i] = (p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])) * decay[i];
            }
        }
        if let Some(i) = p.iter().position(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::StepSize {
                channel: channels[i],
                position_km: z + h,
                step_km: h,
            });
        }
        record(&p, z + h, &mut distances, &mut powers);
    }

    Ok(PowerEvolution {
        distances_km: distances,
        channels,
        frequencies_thz: freqs,
        powers_mw: powers,
        warnings,
    })
}

/// Launch minus output power in dB for every plan channel; `None` for
/// suppressed channels.
pub fn net_loss(plan: &ChannelPlan, evo: &PowerEvolution) -> Result<Vec<Option<f64>>> {
    let active: Vec<usize> = plan.active_channels().map(|c| c.index).collect();
    if active != evo.channels {
        return Err(Error::Validation("power evolution does not belong to this plan".into()));
    }
    let mut out = vec![None; plan.len()];
    for (k, &idx) in evo.channels.iter().enumerate() {
        let launch = plan.channels[idx].launch_power_dbm;
        let first = mw_to_dbm(evo.powers_mw[k][0]);
        if (launch - first).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "channel {idx}: evolution starts at {first} dBm, plan launches {launch} dBm"
            )));
        }
        out[idx] = Some(launch - mw_to_dbm(*evo.powers_mw[k].last().unwrap()));
    }
    Ok(out)
}
