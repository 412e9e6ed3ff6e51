//! SNR budgets, notch-sweep interpolation and Shannon rates.

use alloc::vec::Vec;

use crate::spectral::{BandName, ChannelPlan};
use crate::units::{db_to_linear, linear_to_db, OSNR_REFERENCE_GHZ};
use crate::{Error, Result};

/// Inverse-linear sum of SNR terms in dB. `+∞` terms drop out; an all-`+∞`
/// input stays `+∞`.
pub fn combine_snr_db(terms: &[f64]) -> f64 {
    let inv: f64 = terms.iter().map(|s| 1.0 / db_to_linear(*s)).sum();
    if inv == 0.0 {
        f64::INFINITY
    } else {
        -linear_to_db(inv)
    }
}

pub fn combine_snr(trx_db: f64, ase_db: f64, nli_db: f64) -> f64 {
    combine_snr_db(&[trx_db, ase_db, nli_db])
}

/// Dual-polarization Shannon rate in Gb/s.
pub fn shannon_rate(snr_db: f64, symbol_rate_gbaud: f64) -> f64 {
    if snr_db == f64::NEG_INFINITY {
        return 0.0;
    }
    2.0 * symbol_rate_gbaud * libm::log2(1.0 + db_to_linear(snr_db))
}

/// OSNR (12.5 GHz reference) to SNR in the symbol-rate bandwidth.
pub fn osnr_to_snr_db(osnr_db: f64, symbol_rate_gbaud: f64) -> f64 {
    osnr_db + linear_to_db(OSNR_REFERENCE_GHZ / symbol_rate_gbaud)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SnrBudget {
    pub snr_trx_db: Vec<f64>,
    pub snr_ase_db: Vec<f64>,
    pub snr_nli_db: Vec<f64>,
    pub snr_total_db: Vec<f64>,
}

impl SnrBudget {
    pub fn new(trx: Vec<f64>, ase: Vec<f64>, nli: Vec<f64>) -> Result<Self> {
        if trx.len() != ase.len() || trx.len() != nli.len() {
            return Err(Error::Validation("SNR budget terms differ in length".into()));
        }
        let total = trx
            .iter()
            .zip(&ase)
            .zip(&nli)
            .map(|((t, a), n)| combine_snr(*t, *a, *n))
            .collect();
        Ok(SnrBudget {
            snr_trx_db: trx,
            snr_ase_db: ase,
            snr_nli_db: nli,
            snr_total_db: total,
        })
    }

    pub fn len(&self) -> usize {
        self.snr_total_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr_total_db.is_empty()
    }
}

/// What the receiver sees at one notch.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NotchReading {
    pub band: BandName,
    pub wavelength_nm: f64,
    /// Mean received power of the channels next to the notch, mW.
    pub neighbour_signal_mw: f64,
    /// Noise floor inside the notch, mW/GHz.
    pub noise_psd_mw_per_ghz: f64,
}

impl NotchReading {
    pub fn osnr_db(&self) -> f64 {
        let noise = self.noise_psd_mw_per_ghz * OSNR_REFERENCE_GHZ;
        if noise > 0.0 {
            linear_to_db(self.neighbour_signal_mw / noise)
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandProbes {
    pub band: BandName,
    pub wavelengths_nm: Vec<f64>,
    pub osnr_db: Vec<f64>,
    /// Probe OSNR mapped to the symbol-rate bandwidth and combined with the
    /// band's transceiver SNR.
    pub snr_db: Vec<f64>,
    pub snr_trx_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NotchProbeResult {
    pub bands: Vec<BandProbes>,
    /// Interpolated OSNR per plan channel (`None` for suppressed channels).
    pub channel_osnr_db: Vec<Option<f64>>,
    /// Interpolated SNR per plan channel.
    pub channel_snr_db: Vec<Option<f64>>,
}

/// Linear interpolation of `y` over ascending `x`, held at the end values.
pub fn interpolate_clamped(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    if at <= x[0] {
        return y[0];
    }
    if at >= x[n - 1] {
        return y[n - 1];
    }
    let k = x.partition_point(|v| *v <= at);
    if x[k - 1] == at {
        return y[k - 1];
    }
    y[k - 1] + (y[k] - y[k - 1]) * (at - x[k - 1]) / (x[k] - x[k - 1])
}

/// Turns notch readings into per-channel OSNR and SNR estimates.
///
/// Probe OSNRs are interpolated linearly in dB against wavelength within
/// each band, mapped from 12.5 GHz to the channel symbol rate, and combined
/// with the band's transceiver SNR.
pub fn notch_sweep(
    plan: &ChannelPlan,
    readings: &[NotchReading],
    snr_trx_db: &[(BandName, f64)],
) -> Result<NotchProbeResult> {
    let mut bands = Vec::new();
    let mut channel_osnr_db = alloc::vec![None; plan.len()];
    let mut channel_snr_db = alloc::vec![None; plan.len()];
    for band in plan.band_names() {
        let mut probes: Vec<(f64, f64)> = readings
            .iter()
            .filter(|r| r.band == band)
            .map(|r| (r.wavelength_nm, r.osnr_db()))
            .collect();
        if probes.len() < 2 {
            return Err(Error::Interpolation {
                band,
                count: probes.len(),
            });
        }
        probes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let trx = snr_trx_db
            .iter()
            .find(|(b, _)| *b == band)
            .map(|(_, s)| *s)
            .unwrap_or(f64::INFINITY);
        let x: Vec<f64> = probes.iter().map(|p| p.0).collect();
        let y: Vec<f64> = probes.iter().map(|p| p.1).collect();
        let rate = plan
            .channels
            .iter()
            .find(|c| c.band == band)
            .map(|c| c.symbol_rate_gbaud)
            .unwrap_or(OSNR_REFERENCE_GHZ);
        for c in plan.channels.iter().filter(|c| c.band == band && !c.suppressed) {
            let osnr = interpolate_clamped(&x, &y, c.wavelength_nm());
            channel_osnr_db[c.index] = Some(osnr);
            channel_snr_db[c.index] = Some(combine_snr_db(&[trx, osnr_to_snr_db(osnr, c.symbol_rate_gbaud)]));
        }
        bands.push(BandProbes {
            band,
            snr_db: y
                .iter()
                .map(|o| combine_snr_db(&[trx, osnr_to_snr_db(*o, rate)]))
                .collect(),
            wavelengths_nm: x,
            osnr_db: y,
            snr_trx_db: trx,
        });
    }
    Ok(NotchProbeResult {
        bands,
        channel_osnr_db,
        channel_snr_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_plan, Band};

    #[test]
    fn combine_examples() {
        assert!((combine_snr(f64::INFINITY, 20.0, f64::INFINITY) - 20.0).abs() < 1e-12);
        assert!((combine_snr(20.0, 20.0, 20.0) - (20.0 - linear_to_db(3.0))).abs() < 1e-12);
        assert!((combine_snr(23.0, 60.0, f64::INFINITY) - 23.0).abs() < 0.01);
        assert_eq!(combine_snr_db(&[f64::INFINITY; 3]), f64::INFINITY);
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_rate(23.0, 32.0) - 489.45).abs() < 0.01);
        assert_eq!(shannon_rate(f64::NEG_INFINITY, 32.0), 0.0);
        let flat = 187.0 * shannon_rate(19.0, 32.0) + 140.0 * shannon_rate(23.0, 32.0) + 155.0 * shannon_rate(21.0, 32.0);
        assert!((flat / 1000.0 - 213.6).abs() < 0.1);
    }

    #[test]
    fn sweep_interpolates_linearly() {
        let plan = build_plan(&[Band::new(BandName::C, 1530.0, 1566.0, 11)], 32.5, 32.0).unwrap();
        let edges: Vec<f64> = [0usize, 10].iter().map(|&k| plan.channels[k].wavelength_nm()).collect();
        let readings: Vec<NotchReading> = edges
            .iter()
            .zip([30.0, 20.0])
            .map(|(w, osnr)| NotchReading {
                band: BandName::C,
                wavelength_nm: *w,
                neighbour_signal_mw: 1.0,
                noise_psd_mw_per_ghz: 1.0 / db_to_linear(osnr) / OSNR_REFERENCE_GHZ,
            })
            .collect();
        let res = notch_sweep(&plan, &readings, &[]).unwrap();
        assert!((res.channel_osnr_db[0].unwrap() - 30.0).abs() < 1e-9);
        assert!((res.channel_osnr_db[10].unwrap() - 20.0).abs() < 1e-9);
        let mid = plan.channels[5].wavelength_nm();
        let expect = 30.0 + (20.0 - 30.0) * (mid - edges[0]) / (edges[1] - edges[0]);
        assert!((res.channel_osnr_db[5].unwrap() - expect).abs() < 1e-9);
        let snr = res.channel_snr_db[0].unwrap();
        assert!((snr - osnr_to_snr_db(30.0, 32.0)).abs() < 1e-9);
    }

    #[test]
    fn sweep_needs_two_probes() {
        let plan = build_plan(&[Band::new(BandName::C, 1530.0, 1566.0, 11)], 32.5, 32.0).unwrap();
        let r = NotchReading {
            band: BandName::C,
            wavelength_nm: 1550.0,
            neighbour_signal_mw: 1.0,
            noise_psd_mw_per_ghz: 1e-5,
        };
        assert_eq!(
            notch_sweep(&plan, &[r], &[]).unwrap_err(),
            Error::Interpolation { band: BandName::C, count: 1 }
        );
    }
}
