//! Constellations, bit-metric GMI, achievable rates and FEC rate selection.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::snr::shannon_rate;
use crate::spectral::{BandName, ChannelPlan};
use crate::units::db_to_linear;
use crate::{Error, Result};

/// Labelled constellation with unit average energy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Constellation {
    pub name: String,
    pub bits: u32,
    pub points: Vec<(f64, f64)>,
    /// Bit label of each point; bit `k` is `(label >> (bits − 1 − k)) & 1`,
    /// i.e. the first character of the textual label is bit 0.
    pub labels: Vec<u32>,
}

impl Constellation {
    /// Validates labels and coordinates and rescales to unit energy.
    pub fn new(name: &str, bits: u32, points: Vec<(f64, f64)>, labels: Vec<u32>) -> Result<Self> {
        if bits == 0 || bits > 16 {
            return Err(Error::Validation(format!("{name}: {bits} bits per symbol is unsupported")));
        }
        let m = 1usize << bits;
        if points.len() != m || labels.len() != m {
            return Err(Error::Validation(format!(
                "{name}: {} points for {bits} bits (expected {m})",
                points.len()
            )));
        }
        let mut seen = vec![false; m];
        for &l in &labels {
            if l as usize >= m || seen[l as usize] {
                return Err(Error::Validation(format!("{name}: duplicate or out-of-range label {l}")));
            }
            seen[l as usize] = true;
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Validation(format!("{name}: non-finite coordinate")));
        }
        let energy = points.iter().map(|(x, y)| x * x + y * y).sum::<f64>() / m as f64;
        if !(energy > 0.0) {
            return Err(Error::Validation(format!("{name}: all points at the origin")));
        }
        let s = 1.0 / libm::sqrt(energy);
        Ok(Constellation {
            name: name.into(),
            bits,
            points: points.iter().map(|(x, y)| (x * s, y * s)).collect(),
            labels,
        })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn energy(&self) -> f64 {
        self.points.iter().map(|(x, y)| x * x + y * y).sum::<f64>() / self.size() as f64
    }

    /// Square QAM with Gray labels on each axis; `bits` even, 2 to 12.
    pub fn square_qam(bits: u32) -> Result<Self> {
        if bits < 2 || bits > 12 || bits % 2 != 0 {
            return Err(Error::Validation(format!(
                "square QAM needs an even bit count between 2 and 12, got {bits}"
            )));
        }
        let side = 1usize << (bits / 2);
        let pam: Vec<f64> = (0..side).map(|k| 2.0 * k as f64 - (side as f64 - 1.0)).collect();
        product(&format!("{}-QAM", 1usize << bits), &pam, &pam)
    }

    /// Parses the text format: a `m=<bits>` header, then one
    /// `<label> <re> <im>` line per point. `#` starts a comment.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut bits: Option<u32> = None;
        let mut points = Vec::new();
        let mut labels = Vec::new();
        let mut seen = Vec::new();
        let mut last_line = 0;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            last_line = line_no;
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let Some(m) = bits else {
                let value = line
                    .strip_prefix("m=")
                    .ok_or_else(|| parse_err("expected header \"m=<bits>\"".into()))?;
                let m: u32 = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("bad bit count \"{value}\"")))?;
                if m == 0 || m > 16 {
                    return Err(parse_err(format!("bit count {m} outside 1..=16")));
                }
                bits = Some(m);
                seen = vec![false; 1usize << m];
                continue;
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(format!("expected \"<label> <re> <im>\", found {} fields", fields.len())));
            }
            let label = fields[0];
            if label.len() != m as usize || !label.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(parse_err(format!("label \"{label}\" is not a {m}-bit binary string")));
            }
            let value = u32::from_str_radix(label, 2).map_err(|_| parse_err(format!("bad label \"{label}\"")))?;
            if seen.get(value as usize).copied().unwrap_or(true) {
                return Err(parse_err(format!("duplicate label {label}")));
            }
            seen[value as usize] = true;
            let coord = |s: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| parse_err(format!("bad coordinate \"{s}\"")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(format!("non-finite coordinate \"{s}\"")))
                }
            };
            points.push((coord(fields[1])?, coord(fields[2])?));
            labels.push(value);
        }
        let Some(m) = bits else {
            return Err(Error::Parse {
                line: last_line.max(1),
                message: "missing \"m=<bits>\" header".into(),
            });
        };
        let count = points.len();
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::Parse {
                line: last_line,
                message: format!("cardinality not a power of two ({count} points)"),
            });
        }
        if count != 1usize << m {
            return Err(Error::Parse {
                line: last_line,
                message: format!("{count} points but header says m={m} ({} expected)", 1usize << m),
            });
        }
        Constellation::new(name, m, points, labels)
    }

    /// Inverse of [`Constellation::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\nm={}\n", self.name, self.bits);
        for (p, l) in self.points.iter().zip(&self.labels) {
            let _ = writeln!(out, "{:0width$b} {:.17e} {:.17e}", l, p.0, p.1, width = self.bits as usize);
        }
        out
    }

    /// Stable key for per-constellation random streams.
    fn stream_key(&self) -> u32 {
        let mut h: u32 = 0x811c_9dc5;
        for b in self.name.bytes() {
            h ^= b as u32;
            h = h.wrapping_mul(0x0100_0193);
        }
        h
    }
}

/// Binary-reflected Gray code.
pub fn gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

/// Product of two PAM axes, each Gray-labelled in ascending order; the
/// in-phase bits lead the label.
pub fn product(name: &str, in_phase: &[f64], quadrature: &[f64]) -> Result<Constellation> {
    let (ni, nq) = (in_phase.len(), quadrature.len());
    if !ni.is_power_of_two() || !nq.is_power_of_two() || ni < 2 || nq < 2 {
        return Err(Error::Validation(format!("{name}: PAM sizes {ni}x{nq} must be powers of two")));
    }
    let bq = nq.trailing_zeros();
    let bits = ni.trailing_zeros() + bq;
    let mut sorted_i = in_phase.to_vec();
    let mut sorted_q = quadrature.to_vec();
    sorted_i.sort_by(f64::total_cmp);
    sorted_q.sort_by(f64::total_cmp);
    let mut points = Vec::with_capacity(ni * nq);
    let mut labels = Vec::with_capacity(ni * nq);
    for (a, x) in sorted_i.iter().enumerate() {
        for (b, y) in sorted_q.iter().enumerate() {
            points.push((*x, *y));
            labels.push((gray(a as u32) << bq) | gray(b as u32));
        }
    }
    Constellation::new(name, bits, points, labels)
}

/// Monte-Carlo GMI and its standard error, bits per symbol per polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GmiEstimate {
    pub gmi: f64,
    pub std_error: f64,
}

impl GmiEstimate {
    /// Half-width of the 99% confidence interval.
    pub fn half_width_99(&self) -> f64 {
        2.575_829_303_548_901 * self.std_error
    }
}

/// Terms below `exp(−PRUNE)` relative to the nearest point are dropped.
const PRUNE: f64 = 40.0;

/// Bit-metric GMI by Monte Carlo over AWGN at `snr_db`.
///
/// Symbols are sent in a fixed cycle through the constellation; the
/// complex noise has variance `1/snr` (half per real dimension). The same
/// seed gives the same noise realisation at every SNR.
pub fn gmi_monte_carlo(c: &Constellation, snr_db: f64, samples: usize, seed: u64) -> Result<GmiEstimate> {
    gmi_monte_carlo_stream(c, snr_db, samples, seed, 0)
}

/// [`gmi_monte_carlo`] on an explicit ChaCha stream.
pub fn gmi_monte_carlo_stream(
    c: &Constellation,
    snr_db: f64,
    samples: usize,
    seed: u64,
    stream: u64,
) -> Result<GmiEstimate> {
    if !snr_db.is_finite() {
        return Err(Error::Domain("GMI needs a finite SNR"));
    }
    if samples < 2 {
        return Err(Error::Domain("GMI needs at least two samples"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let sigma2 = 1.0 / db_to_linear(snr_db);
    let sd = libm::sqrt(sigma2 / 2.0);
    let m = c.bits as usize;
    let size = c.size();
    let mut d2 = vec![0.0; size];
    let mut near: Vec<(f64, u32)> = Vec::with_capacity(64);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for s in 0..samples {
        let tx = s % size;
        let (xr, xi) = c.points[tx];
        let nr: f64 = StandardNormal.sample(&mut rng);
        let ni: f64 = StandardNormal.sample(&mut rng);
        let (yr, yi) = (xr + sd * nr, xi + sd * ni);
        let mut dmin = f64::INFINITY;
        for (d, p) in d2.iter_mut().zip(&c.points) {
            let (dr, di) = (yr - p.0, yi - p.1);
            *d = (dr * dr + di * di) / sigma2;
            dmin = dmin.min(*d);
        }
        near.clear();
        for (k, d) in d2.iter().enumerate() {
            if *d - dmin <= PRUNE {
                near.push((libm::exp(dmin - d), c.labels[k]));
            }
        }
        let total: f64 = near.iter().map(|(w, _)| w).sum();
        let tx_label = c.labels[tx];
        let mut loss = 0.0;
        for bit in 0..m {
            let shift = m - 1 - bit;
            let want = (tx_label >> shift) & 1;
            let same: f64 = near.iter().filter(|(_, l)| (l >> shift) & 1 == want).map(|(w, _)| w).sum();
            let ratio = if same > 0.0 {
                total / same
            } else {
                // Every nearby point carries the other bit value: sum the
                // matching half exactly in the log domain.
                let lse = log_sum_exp(
                    d2.iter()
                        .zip(&c.labels)
                        .filter(|(_, l)| (*l >> shift) & 1 == want)
                        .map(|(d, _)| dmin - d),
                );
                libm::exp(libm::log(total) - lse)
            };
            loss += libm::log2(ratio);
        }
        let v = m as f64 - loss;
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(GmiEstimate {
        gmi: mean.clamp(0.0, m as f64),
        std_error: libm::sqrt(var / n),
    })
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    max + libm::log(values.map(|v| libm::exp(v - max)).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FecModel {
    /// Ascending code rates in (0, 1].
    pub rate_grid: Vec<f64>,
    pub pilot_overhead: f64,
    pub outer_overhead: f64,
    /// Fraction of the normalized GMI given up by the decoder.
    pub implementation_penalty: f64,
}

/// DVB-S2X nominal LDPC code rates (normal and short frames).
pub const DVB_S2X_RATES: [(u32, u32); 37] = [
    (1, 4),
    (1, 3),
    (2, 5),
    (1, 2),
    (3, 5),
    (2, 3),
    (3, 4),
    (4, 5),
    (5, 6),
    (8, 9),
    (9, 10),
    (2, 9),
    (13, 45),
    (9, 20),
    (90, 180),
    (96, 180),
    (11, 20),
    (100, 180),
    (104, 180),
    (26, 45),
    (18, 30),
    (28, 45),
    (23, 36),
    (116, 180),
    (20, 30),
    (124, 180),
    (25, 36),
    (128, 180),
    (13, 18),
    (132, 180),
    (22, 30),
    (135, 180),
    (140, 180),
    (7, 9),
    (154, 180),
    (11, 45),
    (32, 45),
];

/// Default decoder penalty. With the bundled shaped constellations at flat
/// 19/23/21 dB it makes decoded over GMI-based throughput 0.9385.
pub const DEFAULT_IMPLEMENTATION_PENALTY: f64 = 0.05;

impl Default for FecModel {
    fn default() -> Self {
        FecModel {
            rate_grid: default_rate_grid(),
            pilot_overhead: 0.0464,
            outer_overhead: 0.005,
            implementation_penalty: DEFAULT_IMPLEMENTATION_PENALTY,
        }
    }
}

/// DVB-S2X nominal rates plus puncturing steps of 1/100 up to 9/10.
pub fn default_rate_grid() -> Vec<f64> {
    let mut rates: Vec<f64> = DVB_S2X_RATES.iter().map(|(n, d)| *n as f64 / *d as f64).collect();
    rates.extend((20..=90).map(|k| k as f64 / 100.0));
    rates.sort_by(f64::total_cmp);
    rates.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    rates
}

impl FecModel {
    pub fn validate(&self) -> Result<()> {
        if self.rate_grid.is_empty() {
            return Err(Error::Config("FEC rate grid is empty".into()));
        }
        if self.rate_grid.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::Config("FEC rates must lie in (0, 1]".into()));
        }
        if self.rate_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("FEC rates must ascend".into()));
        }
        for (name, v) in [
            ("pilot overhead", self.pilot_overhead),
            ("outer overhead", self.outer_overhead),
            ("implementation penalty", self.implementation_penalty),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Config(format!("{name} {v} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// AIR in Gb/s: `2·Rs·gmi·(1 − pilot)`.
pub fn air_per_channel(gmi: f64, symbol_rate_gbaud: f64, fec: &FecModel) -> f64 {
    2.0 * symbol_rate_gbaud * gmi * (1.0 - fec.pilot_overhead)
}

/// Largest grid rate not above `(gmi/m)·(1 − penalty)`, with the net rate
/// factor `m·R·(1 − pilot)·(1 − outer)` in bits per symbol per polarization.
/// `None` when no rate is feasible.
pub fn select_code_rate(gmi: f64, bits: u32, fec: &FecModel) -> Option<(f64, f64)> {
    let limit = gmi / bits as f64 * (1.0 - fec.implementation_penalty);
    let k = fec.rate_grid.partition_point(|r| *r <= limit + 1e-12);
    if k == 0 {
        return None;
    }
    let rate = fec.rate_grid[k - 1];
    Some((rate, bits as f64 * rate * (1.0 - fec.pilot_overhead) * (1.0 - fec.outer_overhead)))
}

/// GMI on a uniform SNR grid (nodes at integer multiples of `step_db`),
/// interpolated linearly in between.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GmiTable {
    pub constellation: String,
    pub bits: u32,
    pub step_db: f64,
    /// Index of the first node: its SNR is `first·step_db`.
    pub first: i64,
    pub values: Vec<f64>,
}

/// Random stream for node `k` of constellation `c`.
pub fn node_stream(c: &Constellation, k: i64) -> u64 {
    ((c.stream_key() as u64) << 32) | (k as i32 as u32 as u64)
}

/// Node indices covering `[lo_db, hi_db]`.
pub fn node_range(lo_db: f64, hi_db: f64, step_db: f64) -> (i64, i64) {
    (libm::floor(lo_db / step_db) as i64, libm::ceil(hi_db / step_db) as i64)
}

/// GMI at node `k`, on the node's own random stream.
pub fn gmi_node(c: &Constellation, k: i64, step_db: f64, samples: usize, seed: u64) -> Result<f64> {
    gmi_monte_carlo_stream(c, k as f64 * step_db, samples, seed, node_stream(c, k)).map(|e| e.gmi)
}

impl GmiTable {
    pub fn build(c: &Constellation, lo_db: f64, hi_db: f64, step_db: f64, samples: usize, seed: u64) -> Result<Self> {
        if !(step_db > 0.0) || !lo_db.is_finite() || !hi_db.is_finite() || lo_db > hi_db {
            return Err(Error::Domain("GMI table needs a finite SNR range and positive step"));
        }
        let (first, last) = node_range(lo_db, hi_db, step_db);
        let values = (first..=last)
            .map(|k| gmi_node(c, k, step_db, samples, seed))
            .collect::<Result<Vec<_>>>()?;
        Ok(GmiTable::from_nodes(c, step_db, first, values))
    }

    pub fn from_nodes(c: &Constellation, step_db: f64, first: i64, values: Vec<f64>) -> Self {
        GmiTable {
            constellation: c.name.clone(),
            bits: c.bits,
            step_db,
            first,
            values,
        }
    }

    /// GMI at `snr_db`; `−∞` gives 0, `+∞` gives the full bit count, values
    /// outside the table are clamped to its ends.
    pub fn lookup(&self, snr_db: f64) -> f64 {
        if snr_db == f64::NEG_INFINITY || self.values.is_empty() {
            return 0.0;
        }
        if snr_db == f64::INFINITY {
            return self.bits as f64;
        }
        let x = snr_db / self.step_db - self.first as f64;
        let last = (self.values.len() - 1) as f64;
        if x <= 0.0 {
            return self.values[0];
        }
        if x >= last {
            return self.values[self.values.len() - 1];
        }
        let k = libm::floor(x) as usize;
        let t = x - k as f64;
        if t == 0.0 {
            self.values[k]
        } else {
            self.values[k] + t * (self.values[k + 1] - self.values[k])
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelThroughput {
    pub index: usize,
    pub band: BandName,
    pub wavelength_nm: f64,
    pub snr_db: f64,
    pub gmi: f64,
    pub air_gbps: f64,
    pub code_rate: Option<f64>,
    pub net_gbps: f64,
    pub shannon_gbps: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandThroughput {
    pub band: BandName,
    pub channels: usize,
    pub air_tbps: f64,
    pub net_tbps: f64,
    pub shannon_tbps: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThroughputReport {
    pub channels: Vec<ChannelThroughput>,
    pub bands: Vec<BandThroughput>,
    pub total_air_tbps: f64,
    pub total_net_tbps: f64,
    pub total_shannon_tbps: f64,
}

/// Sums per-channel rates into band and grand totals. Band totals follow
/// the first appearance of each band in `channels`.
pub fn aggregate(channels: Vec<ChannelThroughput>) -> ThroughputReport {
    let mut bands: Vec<BandThroughput> = Vec::new();
    for c in &channels {
        let b = match bands.iter_mut().find(|b| b.band == c.band) {
            Some(b) => b,
            None => {
                bands.push(BandThroughput {
                    band: c.band,
                    channels: 0,
                    air_tbps: 0.0,
                    net_tbps: 0.0,
                    shannon_tbps: 0.0,
                });
                bands.last_mut().unwrap()
            }
        };
        b.channels += 1;
        b.air_tbps += c.air_gbps / 1000.0;
        b.net_tbps += c.net_gbps / 1000.0;
        b.shannon_tbps += c.shannon_gbps / 1000.0;
    }
    ThroughputReport {
        total_air_tbps: bands.iter().map(|b| b.air_tbps).sum(),
        total_net_tbps: bands.iter().map(|b| b.net_tbps).sum(),
        total_shannon_tbps: bands.iter().map(|b| b.shannon_tbps).sum(),
        channels,
        bands,
    }
}

/// Per-channel rates for a plan from per-channel SNRs and per-band GMI
/// tables. Suppressed channels and channels without an SNR are skipped.
pub fn throughput(
    plan: &ChannelPlan,
    snr_db: &[Option<f64>],
    tables: &[(BandName, &GmiTable)],
    fec: &FecModel,
) -> Result<ThroughputReport> {
    fec.validate()?;
    if snr_db.len() != plan.len() {
        return Err(Error::Validation(format!(
            "{} SNR values for a {}-channel plan",
            snr_db.len(),
            plan.len()
        )));
    }
    let mut out = Vec::new();
    for c in plan.channels.iter().filter(|c| !c.suppressed) {
        let Some(snr) = snr_db[c.index] else { continue };
        let table = tables
            .iter()
            .find(|(b, _)| *b == c.band)
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::Config(format!("no constellation configured for band {}", c.band)))?;
        let gmi = table.lookup(snr);
        let selected = select_code_rate(gmi, table.bits, fec);
        out.push(ChannelThroughput {
            index: c.index,
            band: c.band,
            wavelength_nm: c.wavelength_nm(),
            snr_db: snr,
            gmi,
            air_gbps: air_per_channel(gmi, c.symbol_rate_gbaud, fec),
            code_rate: selected.map(|s| s.0),
            net_gbps: selected.map_or(0.0, |s| 2.0 * c.symbol_rate_gbaud * s.1),
            shannon_gbps: shannon_rate(snr, c.symbol_rate_gbaud),
        });
    }
    Ok(aggregate(out))
}

impl core::fmt::Display for Constellation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} ({} points)", self.name, self.size())
    }
}

/// Short name for a built-in square QAM, e.g. `"qam64"`.
pub fn builtin(name: &str) -> Option<Constellation> {
    let lower = name.to_ascii_lowercase();
    let size: u32 = if lower == "qpsk" {
        4
    } else {
        let digits = lower.strip_prefix("qam").or_else(|| lower.strip_suffix("-qam"))?;
        digits.parse().ok()?
    };
    if !size.is_power_of_two() {
        return None;
    }
    let c = Constellation::square_qam(size.trailing_zeros()).ok()?;
    Some(Constellation {
        name: name.to_string(),
        ..c
    })
}
