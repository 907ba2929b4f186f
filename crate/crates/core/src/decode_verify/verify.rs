//! Exhaustive EFX verification over all allocations.

use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::alloc_enum::{chunk_ranges, index_space, Allocations, EnumError};
use crate::fairness::violations_unchecked;
use crate::goodset::GoodSet;
use crate::valuation::{DenseRanks, Valuation};

/// Version of the JSON layout produced by [`VerifyReport::to_json`].
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("no valuations given")]
    NoAgents,
    #[error("valuations disagree on the number of goods")]
    GoodCountMismatch,
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Also scan allocations that leave an agent with nothing.
    pub include_empty_bundles: bool,
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            include_empty_bundles: false,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfxWitness {
    /// Digit-string index of the allocation.
    pub index: u64,
    pub bundles: Vec<GoodSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub agents: usize,
    pub goods: usize,
    pub include_empty_bundles: bool,
    pub monotone: Vec<bool>,
    pub scanned: u64,
    pub efx_count: u64,
    /// `histogram[c]` allocations violate exactly `c` EFX conditions.
    pub histogram: Vec<u64>,
    /// EFX allocation with the smallest index, if any.
    pub first_efx: Option<EfxWitness>,
}

impl VerifyReport {
    fn empty(agents: usize, goods: usize, include_empty_bundles: bool, monotone: Vec<bool>) -> Self {
        VerifyReport {
            schema_version: REPORT_SCHEMA_VERSION,
            agents,
            goods,
            include_empty_bundles,
            monotone,
            scanned: 0,
            efx_count: 0,
            histogram: vec![0; agents.saturating_sub(1) * goods + 1],
            first_efx: None,
        }
    }

    /// Combines reports of disjoint ranges.
    pub fn merge(mut self, other: VerifyReport) -> VerifyReport {
        self.scanned += other.scanned;
        self.efx_count += other.efx_count;
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self.first_efx = match (self.first_efx, other.first_efx) {
            (Some(a), Some(b)) => Some(if a.index <= b.index { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn all_monotone(&self) -> bool {
        self.monotone.iter().all(|&b| b)
    }

    pub fn violations(&self, count: usize) -> u64 {
        self.histogram.get(count).copied().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let flags: Vec<&str> = self.monotone.iter().map(|&b| if b { "yes" } else { "no" }).collect();
        writeln!(out, "agents {}", self.agents).unwrap();
        writeln!(out, "goods {}", self.goods).unwrap();
        writeln!(out, "monotone {}", flags.join(" ")).unwrap();
        writeln!(out, "allocations {}", self.scanned).unwrap();
        writeln!(out, "efx {}", self.efx_count).unwrap();
        for (c, &k) in self.histogram.iter().enumerate().filter(|(_, &k)| k > 0) {
            writeln!(out, "violated {c} {k}").unwrap();
        }
        match &self.first_efx {
            Some(w) => {
                let b: Vec<String> = w.bundles.iter().map(|s| s.to_string()).collect();
                writeln!(out, "first_efx {}", b.join(" ")).unwrap();
            }
            None => writeln!(out, "first_efx none").unwrap(),
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

fn scan_range(
    vals: &[DenseRanks],
    m: usize,
    range: Range<u64>,
    include_empty: bool,
    template: &VerifyReport,
) -> VerifyReport {
    let mut report = template.clone();
    let mut it = Allocations::range(vals.len(), m, range)
        .expect("checked by caller")
        .with_empty_bundles(include_empty);
    while let Some(bundles) = it.next_bundles() {
        let c = violations_unchecked(bundles, vals);
        report.scanned += 1;
        report.histogram[c] += 1;
        if c == 0 {
            report.efx_count += 1;
            if report.first_efx.is_none() {
                let bundles = bundles.to_vec();
                // position() already points past the yielded allocation
                let index = it.position() - 1;
                report.first_efx = Some(EfxWitness { index, bundles });
            }
        }
    }
    report
}

/// Checks every allocation of the goods to `vals.len()` agents.
pub fn verify<V: Valuation>(vals: &[V], opts: VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let n = vals.len();
    if n == 0 {
        return Err(VerifyError::NoAgents);
    }
    let m = vals[0].goods();
    if vals.iter().any(|v| v.goods() != m) {
        return Err(VerifyError::GoodCountMismatch);
    }
    // validates n and m
    Allocations::range(n, m, 0..0)?;
    let monotone: Vec<bool> = vals.iter().map(|v| v.is_monotone()).collect();
    let dense: Vec<DenseRanks> = vals.iter().map(|v| DenseRanks::of(v)).collect();
    let template = VerifyReport::empty(n, m, opts.include_empty_bundles, monotone);
    let report = if opts.parallel {
        let parts = rayon::current_num_threads() * 8;
        chunk_ranges(n, m, parts)
            .into_par_iter()
            .map(|r| scan_range(&dense, m, r, opts.include_empty_bundles, &template))
            .reduce_with(VerifyReport::merge)
            .unwrap_or(template)
    } else {
        scan_range(&dense, m, 0..index_space(n, m), opts.include_empty_bundles, &template)
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{RankValuation, RealValuation};

    #[test]
    fn identical_valuations_admit_efx() {
        for m in 2..=6 {
            let v = RankValuation::random(m, m as u64).unwrap();
            let r = verify(&[v.clone(), v], VerifyOptions::default()).unwrap();
            assert!(r.efx_count >= 1);
            assert_eq!(r.histogram[0], r.efx_count);
            assert!(r.first_efx.is_some());
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let vals: Vec<RankValuation> = (0..3).map(|s| RankValuation::random(7, 40 + s).unwrap()).collect();
        let par = verify(&vals, VerifyOptions::default()).unwrap();
        let ser = verify(
            &vals,
            VerifyOptions {
                parallel: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(par, ser);
        assert_eq!(par.scanned, 1806);
    }

    #[test]
    fn empty_bundles_option() {
        let v = RankValuation::numeric(3).unwrap();
        let r = verify(
            &[v.clone(), v.clone(), v],
            VerifyOptions {
                include_empty_bundles: true,
                parallel: false,
            },
        )
        .unwrap();
        assert_eq!(r.scanned, 27);
    }

    #[test]
    fn real_valuations_with_ties() {
        // both goods worth the same to both agents
        let v = RealValuation::from_integers(2, &[0, 1, 1, 2]).unwrap();
        let r = verify(&[v.clone(), v], VerifyOptions::default()).unwrap();
        assert_eq!(r.efx_count, 2);
        assert_eq!(r.first_efx.unwrap().index, 1);
    }

    #[test]
    fn text_output() {
        let v = RankValuation::numeric(3).unwrap();
        let r = verify(&[v.clone(), v.clone(), v], VerifyOptions::default()).unwrap();
        let text = r.to_text();
        assert!(text.contains("allocations 6\n"));
        assert!(text.contains("monotone yes yes yes\n"));
        assert!(r.to_json().contains("\"schema_version\": 1"));
    }
}
