//! Exhaustive search over launch pre-tilt and band-edge trims.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::gmi::{throughput, FecModel, GmiTable};
use crate::link::{simulate, LinkConfig};
use crate::spectral::{apply_launch_profile, BandName, ChannelPlan, LaunchProfile};
use crate::{Error, Result};

pub const DEFAULT_GRID_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Objective {
    #[default]
    ShannonEstimate,
    GmiEstimate,
}

/// Which edge of a band loses channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Edge {
    LowFrequency,
    HighFrequency,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrimAxis {
    pub band: BandName,
    pub edge: Edge,
    /// Candidate numbers of channels dropped from that edge.
    pub options: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TiltScenario {
    pub tilts_db: Vec<f64>,
    pub trims: Vec<TrimAxis>,
    pub objective: Objective,
    pub grid_limit: usize,
}

impl Default for TiltScenario {
    /// Tilts 0..=8 dB; the S-band short-wavelength edge and the L-band
    /// long-wavelength edge each trimmed by 0, 2, ..., 10 channels.
    fn default() -> Self {
        let options: Vec<usize> = (0..=5).map(|k| 2 * k).collect();
        TiltScenario {
            tilts_db: (0..=8).map(f64::from).collect(),
            trims: alloc::vec![
                TrimAxis {
                    band: BandName::S,
                    edge: Edge::HighFrequency,
                    options: options.clone(),
                },
                TrimAxis {
                    band: BandName::L,
                    edge: Edge::LowFrequency,
                    options,
                },
            ],
            objective: Objective::ShannonEstimate,
            grid_limit: DEFAULT_GRID_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridPoint {
    pub tilt_db: f64,
    /// One entry per trim axis, in scenario order.
    pub trims: Vec<usize>,
}

impl GridPoint {
    pub fn trimmed_channels(&self) -> usize {
        self.trims.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Evaluation {
    pub point: GridPoint,
    pub throughput_tbps: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TiltResult {
    pub best: Evaluation,
    /// Every grid point in grid order.
    pub table: Vec<Evaluation>,
}

impl TiltScenario {
    pub fn validate(&self) -> Result<()> {
        if self.tilts_db.iter().any(|t| !t.is_finite()) {
            return Err(Error::Validation("tilt candidates must be finite".into()));
        }
        if self.trims.iter().any(|a| a.options.is_empty()) {
            return Err(Error::EmptyGrid);
        }
        Ok(())
    }

    /// Grid points with the tilt varying slowest, then each trim axis in
    /// order.
    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        if self.tilts_db.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let count = self
            .trims
            .iter()
            .try_fold(self.tilts_db.len(), |n, a| n.checked_mul(a.options.len()))
            .unwrap_or(usize::MAX);
        if count > self.grid_limit {
            return Err(Error::GridTooLarge {
                count,
                limit: self.grid_limit,
            });
        }
        let per_tilt = count / self.tilts_db.len();
        let mut points = Vec::with_capacity(count);
        for &tilt_db in &self.tilts_db {
            for n in 0..per_tilt {
                // Mixed-radix decode, last axis fastest.
                let mut rest = n;
                let mut trims = alloc::vec![0; self.trims.len()];
                for (slot, axis) in trims.iter_mut().zip(&self.trims).rev() {
                    *slot = axis.options[rest % axis.options.len()];
                    rest /= axis.options.len();
                }
                points.push(GridPoint { tilt_db, trims });
            }
        }
        Ok(points)
    }

    /// The plan for `point`: trims applied to `base`, then `launch` with
    /// the point's tilt.
    pub fn plan_for(&self, base: &ChannelPlan, launch: &LaunchProfile, point: &GridPoint) -> Result<ChannelPlan> {
        let mut plan = base.clone();
        for band in base.band_names() {
            let mut low = 0;
            let mut high = 0;
            for (axis, n) in self.trims.iter().zip(&point.trims) {
                if axis.band == band {
                    match axis.edge {
                        Edge::LowFrequency => low += n,
                        Edge::HighFrequency => high += n,
                    }
                }
            }
            if low + high > 0 {
                plan = plan.trimmed(band, low, high)?;
            }
        }
        let profile = LaunchProfile {
            tilt_db: point.tilt_db,
            ..launch.clone()
        };
        apply_launch_profile(&plan, &profile)
    }
}

/// Throughput of one grid point through the full link model.
///
/// `gmi` is required for the GMI objective: per-band tables and the FEC
/// model whose pilot overhead turns GMI into AIR.
pub fn evaluate(
    scenario: &TiltScenario,
    base: &ChannelPlan,
    launch: &LaunchProfile,
    link: &LinkConfig,
    gmi: Option<(&[(BandName, &GmiTable)], &FecModel)>,
    point: &GridPoint,
) -> Result<f64> {
    let plan = scenario.plan_for(base, launch, point)?;
    let result = simulate(&plan, link)?;
    match scenario.objective {
        Objective::ShannonEstimate => Ok(result.shannon_tbps()),
        Objective::GmiEstimate => {
            let (tables, fec) =
                gmi.ok_or_else(|| Error::Config("GMI objective needs constellation tables".into()))?;
            Ok(throughput(&plan, &result.snr_by_index(plan.len()), tables, fec)?.total_air_tbps)
        }
    }
}

/// True when `a` should replace the current best `b`.
fn beats(a: &Evaluation, b: &Evaluation) -> bool {
    if a.throughput_tbps != b.throughput_tbps {
        return a.throughput_tbps > b.throughput_tbps;
    }
    if a.point.tilt_db != b.point.tilt_db {
        return a.point.tilt_db < b.point.tilt_db;
    }
    a.point.trimmed_channels() < b.point.trimmed_channels()
}

/// Picks the best entry of an evaluation table. Ties go to the smaller
/// tilt, then to fewer trimmed channels, then to the earlier grid point.
pub fn select(table: Vec<Evaluation>) -> Result<TiltResult> {
    let mut best: Option<usize> = None;
    for (i, e) in table.iter().enumerate() {
        if e.throughput_tbps.is_nan() {
            return Err(Error::Evaluation {
                tilt_db: e.point.tilt_db,
                source: Box::new(Error::Domain("objective evaluated to NaN")),
            });
        }
        if best.is_none_or(|b| beats(e, &table[b])) {
            best = Some(i);
        }
    }
    let best = table[best.ok_or(Error::EmptyGrid)?].clone();
    Ok(TiltResult { best, table })
}

/// Evaluates every grid point in order with `eval` and selects the best.
pub fn optimize<F>(scenario: &TiltScenario, mut eval: F) -> Result<TiltResult>
where
    F: FnMut(&GridPoint) -> Result<f64>,
{
    let table = scenario
        .grid()?
        .into_iter()
        .map(|point| match eval(&point) {
            Ok(throughput_tbps) => Ok(Evaluation { point, throughput_tbps }),
            Err(e) => Err(wrap(point.tilt_db, e)),
        })
        .collect::<Result<Vec<_>>>()?;
    select(table)
}

/// Labels an evaluation failure with its tilt.
pub fn wrap(tilt_db: f64, e: Error) -> Error {
    match e {
        Error::Evaluation { .. } => e,
        other => Error::Evaluation {
            tilt_db,
            source: Box::new(other),
        },
    }
}

impl core::fmt::Display for GridPoint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "tilt {} dB", self.tilt_db)?;
        if !self.trims.is_empty() {
            let trims: Vec<alloc::string::String> = self.trims.iter().map(|t| format!("{t}")).collect();
            write!(f, ", trims [{}]", trims.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibre::{FibreSpec, RamanProfile};
    use crate::spectral::{build_plan, Band};

    fn small(tilts: &[f64], trims: Vec<TrimAxis>) -> TiltScenario {
        TiltScenario {
            tilts_db: tilts.to_vec(),
            trims,
            objective: Objective::ShannonEstimate,
            grid_limit: DEFAULT_GRID_LIMIT,
        }
    }

    #[test]
    fn grid_order_and_size() {
        let s = small(
            &[0.0, 1.0],
            alloc::vec![
                TrimAxis { band: BandName::S, edge: Edge::HighFrequency, options: alloc::vec![0, 2] },
                TrimAxis { band: BandName::L, edge: Edge::LowFrequency, options: alloc::vec![0, 4, 8] },
            ],
        );
        let g = s.grid().unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g[0].trims, [0, 0]);
        assert_eq!(g[1].trims, [0, 4]);
        assert_eq!(g[3].trims, [2, 0]);
        assert_eq!(g[6].tilt_db, 1.0);
        assert_eq!(TiltScenario::default().grid().unwrap().len(), 324);
    }

    #[test]
    fn grid_errors() {
        assert_eq!(small(&[], Vec::new()).grid().unwrap_err(), Error::EmptyGrid);
        let mut s = TiltScenario::default();
        s.grid_limit = 100;
        assert_eq!(s.grid().unwrap_err(), Error::GridTooLarge { count: 324, limit: 100 });
    }

    #[test]
    fn ties_prefer_small_tilt_then_few_trims() {
        let s = small(
            &[2.0, 1.0],
            alloc::vec![TrimAxis { band: BandName::C, edge: Edge::LowFrequency, options: alloc::vec![3, 0] }],
        );
        let r = optimize(&s, |_| Ok(7.0)).unwrap();
        assert_eq!(r.best.point, GridPoint { tilt_db: 1.0, trims: alloc::vec![0] });
    }

    #[test]
    fn single_candidate() {
        let r = optimize(&small(&[4.0], Vec::new()), |_| Ok(1.5)).unwrap();
        assert_eq!(r.best.point.tilt_db, 4.0);
        assert_eq!(r.table.len(), 1);
    }

    #[test]
    fn failures_carry_the_tilt() {
        let s = small(&[0.0, 3.0], Vec::new());
        let e = optimize(&s, |p| {
            if p.tilt_db > 1.0 {
                Err(Error::StepSize { channel: 0, position_km: 1.0, step_km: 0.1 })
            } else {
                Ok(1.0)
            }
        })
        .unwrap_err();
        assert!(matches!(e, Error::Evaluation { tilt_db, .. } if tilt_db == 3.0));
        assert!(e.is_numeric());
    }

    #[test]
    fn trims_keep_the_power_budget() {
        let base = build_plan(
            &[Band::new(BandName::S, 1480.0, 1526.0, 20), Band::new(BandName::C, 1530.0, 1566.0, 20)],
            32.5,
            32.0,
        )
        .unwrap();
        let s = small(
            &[3.0],
            alloc::vec![TrimAxis { band: BandName::S, edge: Edge::HighFrequency, options: alloc::vec![0, 4] }],
        );
        let launch = LaunchProfile::new(12.0, 0.0);
        for p in s.grid().unwrap() {
            let plan = s.plan_for(&base, &launch, &p).unwrap();
            assert_eq!(plan.len(), 40 - p.trimmed_channels());
            assert!((plan.total_launch_power_dbm() - 12.0).abs() < 1e-9);
        }
    }

    #[test]
    fn raman_free_lossless_pipeline_is_direct_shannon() {
        let base = build_plan(&[Band::new(BandName::C, 1530.0, 1566.0, 10)], 32.5, 32.0).unwrap();
        let mut fibre = FibreSpec::ssmf(0.0);
        fibre.raman = RamanProfile::off();
        let mut link = LinkConfig::new(fibre, &[BandName::C]);
        link.nli = None;
        link.snr_trx_db = alloc::vec![(BandName::C, 20.0)];
        let s = small(&[0.0], Vec::new());
        let p = GridPoint { tilt_db: 0.0, trims: Vec::new() };
        let v = evaluate(&s, &base, &LaunchProfile::new(10.0, 0.0), &link, None, &p).unwrap();
        // Zero length and 0 dBm channels: both stages are transparent.
        assert!((v - 10.0 * crate::snr::shannon_rate(20.0, 32.0) / 1000.0).abs() < 1e-12);
    }
}
