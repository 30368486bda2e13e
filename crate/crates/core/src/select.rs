//! Moduli selection: choose an RNS set covering `K` values at a minimum
//! efficiency while keeping the deepest adder in the set shallow.
//!
//! The procedure is staged:
//!
//! 1. If `K == 2^(3h)` for some `h >= 2`, try `(2^h - 1, 2^h, 2^h + 1)`.
//! 2. Otherwise enumerate pairwise-coprime `C`-subsets of the candidate pool
//!    whose range reaches `E * K`. Sets with range ≥ `K` (full coverage) are
//!    preferred whenever one exists; among the remaining candidates pick the
//!    smallest maximum Toffoli depth, then the smallest moduli sum, then the
//!    lexicographically smallest set.
//! 3. If no `C`-subset qualifies, increment `C` and retry.
//!
//! The coverage preference and the moduli-sum tie-break are reconstructions
//! chosen so that the reference Table II sets come out for `K = 2^6 .. 2^11`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::adders::AdderSpec;
use crate::reference;
use crate::rns::{is_pairwise_coprime, rns_range, RnsError, RnsSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectError {
    #[error("K must be at least 50, got {0}")]
    KTooSmall(u64),
    #[error("efficiency must lie in (0, 1], got {0}")]
    BadEfficiency(f64),
    #[error("moduli count must be at least 2, got {0}")]
    BadCount(usize),
    #[error("pool entries must be at least 2")]
    BadPool,
    #[error("no Toffoli depth known for modulus {0}")]
    MissingDepth(u64),
    #[error(
        "infeasible: no pairwise-coprime set of up to {max_count} moduli from {pool:?} reaches \
         range >= {threshold}"
    )]
    Infeasible { max_count: usize, pool: Vec<u64>, threshold: f64 },
    #[error(transparent)]
    Rns(#[from] RnsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthSource {
    /// Toffoli depth of the circuit produced by this crate's builder.
    Built,
    /// Toffoli depth from the published adder comparison table.
    Paper,
}

impl FromStr for DepthSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "built" => Ok(DepthSource::Built),
            "paper" | "paper-table" => Ok(DepthSource::Paper),
            other => Err(format!("unknown depth source `{other}` (expected built|paper)")),
        }
    }
}

impl fmt::Display for DepthSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepthSource::Built => "built",
            DepthSource::Paper => "paper",
        })
    }
}

/// Toffoli depth of `modulus`'s designated adder.
pub fn toffoli_depth_of(modulus: u64, source: DepthSource) -> Result<usize, SelectError> {
    match source {
        DepthSource::Paper => reference::table1_toffoli_depth(modulus).ok_or(SelectError::MissingDepth(modulus)),
        DepthSource::Built => {
            let spec = AdderSpec::for_modulus(modulus).map_err(|_| SelectError::MissingDepth(modulus))?;
            let report = spec.build().resource_report().map_err(|_| SelectError::MissingDepth(modulus))?;
            Ok(report.toffoli_depth)
        }
    }
}

/// Per-modulus Toffoli depths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthTable {
    pub source: DepthSource,
    pub depths: BTreeMap<u64, usize>,
}

impl DepthTable {
    pub fn for_pool(pool: &[u64], source: DepthSource) -> Result<Self, SelectError> {
        let depths = pool.iter().map(|&m| toffoli_depth_of(m, source).map(|d| (m, d))).collect::<Result<_, _>>()?;
        Ok(Self { source, depths })
    }

    pub fn get(&self, modulus: u64) -> Option<usize> {
        self.depths.get(&modulus).copied()
    }
}

/// Moduli 2ⁿ−1, 2ⁿ, 2ⁿ+1 for n in 1..=max_n, deduplicated and sorted; 1 is
/// dropped.
pub fn default_pool(max_n: u32) -> Vec<u64> {
    let mut pool = BTreeSet::new();
    for n in 1..=max_n.min(62) {
        let p = 1u64 << n;
        for m in [p - 1, p, p + 1] {
            if m >= 2 {
                pool.insert(m);
            }
        }
    }
    pool.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct SelectorConfig {
    pub k: u64,
    pub count: usize,
    pub efficiency: f64,
    pub max_n: u32,
    pub max_count: usize,
    pub depth_source: DepthSource,
}

impl SelectorConfig {
    pub fn new(k: u64) -> Self {
        Self { k, count: 3, efficiency: 0.9, max_n: 3, max_count: 6, depth_source: DepthSource::Paper }
    }

    pub fn with_efficiency(mut self, e: f64) -> Self {
        self.efficiency = e;
        self
    }

    pub fn with_depth_source(mut self, source: DepthSource) -> Self {
        self.depth_source = source;
        self
    }

    pub fn validate(&self) -> Result<(), SelectError> {
        if self.k < 50 {
            return Err(SelectError::KTooSmall(self.k));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(SelectError::BadEfficiency(self.efficiency));
        }
        if self.count < 2 {
            return Err(SelectError::BadCount(self.count));
        }
        if self.max_n == 0 {
            return Err(SelectError::BadPool);
        }
        Ok(())
    }

    /// E·K as an exact rational; range comparisons are done without floats.
    fn threshold(&self) -> Ratio<u128> {
        let e = Ratio::<i64>::approximate_float(self.efficiency)
            .filter(|r| *r.numer() > 0)
            .unwrap_or_else(|| Ratio::new((self.efficiency * 1e9).round() as i64, 1_000_000_000));
        Ratio::new(*e.numer() as u128, *e.denom() as u128) * Ratio::from_integer(self.k as u128)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Step-1 shortcut attempted for K = 2^(3h).
    ExactPower {
        h: u32,
        candidate: Vec<u64>,
        range: u64,
        accepted: bool,
    },
    /// A C-subset was checked against the E·K threshold.
    Candidate {
        count: usize,
        moduli: Vec<u64>,
        range: u64,
        meets_threshold: bool,
        full_coverage: bool,
        max_toffoli_depth: usize,
    },
    /// A qualifying set lost to the eventual winner.
    Rejected {
        moduli: Vec<u64>,
        in_favor_of: Vec<u64>,
        reason: RejectReason,
    },
    /// No C-subset qualified; C grows.
    IncrementCount {
        from: usize,
        to: usize,
    },
    Selected {
        moduli: Vec<u64>,
        range: u64,
        max_toffoli_depth: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Coverage,
    Depth,
    ModuliSum,
    Lexicographic,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectionTrace {
    pub k: u64,
    pub efficiency: f64,
    pub threshold: f64,
    pub pool: Vec<u64>,
    pub depths: DepthTable,
    pub events: Vec<TraceEvent>,
    #[serde(skip)]
    pub selected: Option<RnsSet>,
}

impl SelectionTrace {
    pub fn selected(&self) -> &RnsSet {
        self.selected.as_ref().expect("trace of a successful selection")
    }

    pub fn increments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::IncrementCount { from, to } => Some((*from, *to)),
            _ => None,
        })
    }
}

pub fn select_rns(cfg: &SelectorConfig) -> Result<RnsSet, SelectError> {
    explain_selection(cfg).map(|t| t.selected().clone())
}

#[derive(Clone, Debug)]
struct Scored {
    moduli: Vec<u64>,
    range: u64,
    full: bool,
    depth: usize,
    sum: u64,
}

impl Scored {
    fn key(&self) -> (bool, usize, u64, &[u64]) {
        (!self.full, self.depth, self.sum, &self.moduli)
    }
}

fn combinations(pool: &[u64], k: usize) -> Vec<Vec<u64>> {
    fn rec(pool: &[u64], k: usize, start: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            if cur.iter().all(|&m| num_integer::gcd(m, pool[i]) == 1) {
                cur.push(pool[i]);
                rec(pool, k, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(pool, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn explain_selection(cfg: &SelectorConfig) -> Result<SelectionTrace, SelectError> {
    cfg.validate()?;
    let pool = default_pool(cfg.max_n);
    let depths = DepthTable::for_pool(&pool, cfg.depth_source)?;
    let threshold = cfg.threshold();
    let meets = |range: u64| Ratio::from_integer(range as u128) >= threshold;
    let mut trace = SelectionTrace {
        k: cfg.k,
        efficiency: cfg.efficiency,
        threshold: *threshold.numer() as f64 / *threshold.denom() as f64,
        pool: pool.clone(),
        depths,
        events: Vec::new(),
        selected: None,
    };

    // Step 1: K == 2^(3h), h >= 2.
    if cfg.k.is_power_of_two() {
        let bits = cfg.k.trailing_zeros();
        if bits.is_multiple_of(3) && bits / 3 >= 2 {
            let h = bits / 3;
            let p = 1u64 << h;
            let candidate = vec![p - 1, p, p + 1];
            let range = rns_range(&candidate)?;
            let accepted = meets(range);
            trace.events.push(TraceEvent::ExactPower { h, candidate: candidate.clone(), range, accepted });
            if accepted {
                let set = RnsSet::new(&candidate)?;
                let max_depth = candidate.iter().map(|&m| trace.depths.get(m)).collect::<Option<Vec<_>>>();
                trace.events.push(TraceEvent::Selected {
                    moduli: candidate,
                    range,
                    max_toffoli_depth: max_depth.and_then(|d| d.into_iter().max()),
                });
                trace.selected = Some(set);
                return Ok(trace);
            }
        }
    }

    let mut count = cfg.count;
    loop {
        if count > cfg.max_count || count > pool.len() {
            return Err(SelectError::Infeasible { max_count: cfg.max_count, pool, threshold: trace.threshold });
        }
        let scored: Vec<Scored> = combinations(&pool, count)
            .into_par_iter()
            .filter_map(|moduli| {
                debug_assert!(is_pairwise_coprime(&moduli));
                let range = rns_range(&moduli).ok()?;
                let depth = moduli.iter().map(|&m| trace.depths.get(m).unwrap_or(usize::MAX)).max()?;
                Some(Scored { sum: moduli.iter().sum(), full: range >= cfg.k, range, depth, moduli })
            })
            .collect();
        let mut qualifying = Vec::new();
        for s in &scored {
            let ok = meets(s.range);
            trace.events.push(TraceEvent::Candidate {
                count,
                moduli: s.moduli.clone(),
                range: s.range,
                meets_threshold: ok,
                full_coverage: s.full,
                max_toffoli_depth: s.depth,
            });
            if ok {
                qualifying.push(s.clone());
            }
        }
        if qualifying.is_empty() {
            trace.events.push(TraceEvent::IncrementCount { from: count, to: count + 1 });
            count += 1;
            continue;
        }
        qualifying.sort_by(|a, b| a.key().cmp(&b.key()));
        let winner = qualifying[0].clone();
        for loser in &qualifying[1..] {
            let reason = if loser.full != winner.full {
                RejectReason::Coverage
            } else if loser.depth != winner.depth {
                RejectReason::Depth
            } else if loser.sum != winner.sum {
                RejectReason::ModuliSum
            } else {
                RejectReason::Lexicographic
            };
            trace.events.push(TraceEvent::Rejected {
                moduli: loser.moduli.clone(),
                in_favor_of: winner.moduli.clone(),
                reason,
            });
        }
        let set = RnsSet::new(&winner.moduli)?;
        trace.events.push(TraceEvent::Selected {
            moduli: winner.moduli.clone(),
            range: winner.range,
            max_toffoli_depth: Some(winner.depth),
        });
        trace.selected = Some(set);
        return Ok(trace);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pick(k: u64, e: f64) -> Vec<u64> {
        select_rns(&SelectorConfig::new(k).with_efficiency(e)).unwrap().moduli().to_vec()
    }

    #[test]
    fn pool_default() {
        assert_eq!(default_pool(3), vec![2, 3, 4, 5, 7, 8, 9]);
    }

    #[test]
    fn reference_sets() {
        assert_eq!(pick(1 << 6, 0.9), vec![3, 4, 5]);
        assert_eq!(pick(1 << 7, 0.9), vec![4, 5, 9]);
        assert_eq!(pick(1 << 8, 0.9), vec![5, 8, 9]);
        assert_eq!(pick(1 << 9, 0.9), vec![7, 8, 9]);
        assert_eq!(pick(1 << 10, 0.9), vec![4, 5, 7, 9]);
        assert_eq!(pick(1 << 11, 0.9), vec![5, 7, 8, 9]);
        assert_eq!(pick(1 << 6, 1.0), vec![3, 5, 8]);
    }

    #[test]
    fn paper_depths() {
        assert_eq!(toffoli_depth_of(9, DepthSource::Paper), Ok(9));
        assert_eq!(toffoli_depth_of(7, DepthSource::Paper), Ok(12));
        assert_eq!(toffoli_depth_of(2, DepthSource::Paper), Ok(0));
        assert_eq!(toffoli_depth_of(15, DepthSource::Paper), Err(SelectError::MissingDepth(15)));
        assert_eq!(toffoli_depth_of(3, DepthSource::Built), Ok(4));
    }

    #[test]
    fn trace_rejects_seven_on_depth() {
        let t = explain_selection(&SelectorConfig::new(256)).unwrap();
        assert!(t.events.iter().any(|e| matches!(e,
            TraceEvent::Rejected { moduli, in_favor_of, reason: RejectReason::Depth }
                if moduli == &vec![5, 7, 8] && in_favor_of == &vec![5, 8, 9])));
    }

    #[test]
    fn trace_shows_shortcut_and_increment() {
        let t = explain_selection(&SelectorConfig::new(64)).unwrap();
        assert!(matches!(t.events[0], TraceEvent::ExactPower { h: 2, accepted: true, .. }));
        let t = explain_selection(&SelectorConfig::new(1024)).unwrap();
        assert_eq!(t.increments().collect::<Vec<_>>(), vec![(3, 4)]);
    }

    #[test]
    fn config_errors() {
        assert_eq!(select_rns(&SelectorConfig::new(49)), Err(SelectError::KTooSmall(49)));
        assert!(matches!(
            select_rns(&SelectorConfig::new(64).with_efficiency(0.0)),
            Err(SelectError::BadEfficiency(_))
        ));
        let mut cfg = SelectorConfig::new(1 << 20);
        cfg.max_count = 4;
        assert!(matches!(select_rns(&cfg), Err(SelectError::Infeasible { .. })));
    }

    #[test]
    fn built_depths_select_valid_sets() {
        for k in 6..=11 {
            let cfg = SelectorConfig::new(1 << k).with_depth_source(DepthSource::Built);
            let set = select_rns(&cfg).unwrap();
            assert!(set.range() as f64 >= 0.9 * (1u64 << k) as f64);
        }
    }
}
