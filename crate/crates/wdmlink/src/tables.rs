//! GMI tables for the SNRs a run actually needs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use wdmlink_core::gmi::{gmi_node, node_range, Constellation, GmiTable};
use wdmlink_core::spectral::BandName;

use crate::error::{AtStage, Result, Stage};

/// One table per band, covering the finite values of `snr_db` for that
/// band. Nodes are shared between bands using the same constellation and
/// evaluated in parallel; each node has its own random stream, so the
/// result does not depend on scheduling.
pub fn build_tables(
    constellations: &[(BandName, Constellation)],
    snr_db: &[(BandName, f64)],
    step_db: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<(BandName, GmiTable)>> {
    let mut distinct: Vec<&Constellation> = Vec::new();
    let mut spans: Vec<(BandName, usize, Option<(i64, i64)>)> = Vec::new();
    for (band, c) in constellations {
        let id = match distinct.iter().position(|d| *d == c) {
            Some(i) => i,
            None => {
                distinct.push(c);
                distinct.len() - 1
            }
        };
        let finite = snr_db.iter().filter(|(b, s)| b == band && s.is_finite()).map(|(_, s)| *s);
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
        let range = (lo <= hi).then(|| node_range(lo, hi, step_db));
        spans.push((*band, id, range));
    }

    let mut jobs: Vec<(usize, i64)> = spans
        .iter()
        .filter_map(|(_, id, r)| r.map(|(a, b)| (a..=b).map(move |k| (*id, k))))
        .flatten()
        .collect();
    jobs.sort_unstable();
    jobs.dedup();
    let values = jobs
        .par_iter()
        .map(|&(id, k)| gmi_node(distinct[id], k, step_db, samples, seed))
        .collect::<std::result::Result<Vec<f64>, _>>()
        .at(Stage::Gmi)?;
    let nodes: BTreeMap<(usize, i64), f64> = jobs.into_iter().zip(values).collect();

    Ok(spans
        .into_iter()
        .map(|(band, id, range)| {
            let c = distinct[id];
            let table = match range {
                Some((first, last)) => {
                    GmiTable::from_nodes(c, step_db, first, (first..=last).map(|k| nodes[&(id, k)]).collect())
                }
                None => GmiTable::from_nodes(c, step_db, 0, Vec::new()),
            };
            (band, table)
        })
        .collect())
}
