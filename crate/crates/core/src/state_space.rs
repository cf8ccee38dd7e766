//! Exhaustive enumeration of all `2^n` initial states: successor tables,
//! COUNT statistics of time-1 images, fixed points and transition tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_cap, Result};
use crate::network::{format_bits, Network, State};

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Successor tables index states with `u32`.
const HARD_CAP: usize = 32;

const CHUNK: usize = 1 << 14;

/// Successor of every packed state, indexed by the state word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMap {
    n: usize,
    succ: Vec<u32>,
}

impl TransitionMap {
    pub fn build(network: &Network, cap: usize) -> Result<Self> {
        let n = network.n();
        ensure_cap(n, cap.min(HARD_CAP))?;
        let mut succ = vec![0u32; 1usize << n];
        succ.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let base = (c * CHUNK) as u64;
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = network.step_bits(base + i as u64) as u32;
                }
            });
        Ok(TransitionMap { n, succ })
    }

    /// Wraps a precomputed successor table (`succ.len()` must be `2^n`).
    pub fn from_successors(n: usize, succ: Vec<u32>) -> Self {
        assert_eq!(succ.len(), 1usize << n, "successor table size");
        TransitionMap { n, succ }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn successors(&self) -> &[u32] {
        &self.succ
    }

    #[inline]
    pub fn successor(&self, state: u32) -> u32 {
        self.succ[state as usize]
    }

    /// Largest number of states sharing one successor.
    pub fn max_count(&self) -> u64 {
        let mut counts = vec![0u32; self.succ.len()];
        let mut max = 0;
        for &t in &self.succ {
            let c = &mut counts[t as usize];
            *c += 1;
            max = max.max(*c);
        }
        max as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSpaceSummary {
    pub n: usize,
    /// Number of distinct time-1 images.
    pub r: usize,
    /// `(image state word, COUNT)` sorted by state word.
    pub counts: Vec<(u64, u64)>,
    pub fixed_points: Vec<u64>,
    /// For node `i`, the number of initial states with `x_i(1) = 1`.
    pub ones_frequency: Vec<u64>,
}

impl StateSpaceSummary {
    pub fn count_of(&self, state: u64) -> u64 {
        self.counts
            .binary_search_by_key(&state, |&(s, _)| s)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    pub fn fixed_point_count(&self) -> usize {
        self.fixed_points.len()
    }

    pub fn state(&self, bits: u64) -> State {
        State::from_raw(bits, self.n)
    }
}

pub fn summarize(network: &Network, cap: usize) -> Result<StateSpaceSummary> {
    let map = TransitionMap::build(network, cap)?;
    Ok(summarize_map(&map))
}

pub fn summarize_map(map: &TransitionMap) -> StateSpaceSummary {
    let n = map.n();
    let mut dense = vec![0u64; map.successors().len()];
    let mut fixed_points = Vec::new();
    let mut ones_frequency = vec![0u64; n];
    for (s, &t) in map.successors().iter().enumerate() {
        dense[t as usize] += 1;
        if s as u32 == t {
            fixed_points.push(s as u64);
        }
        for (i, ones) in ones_frequency.iter_mut().enumerate() {
            *ones += ((t >> i) & 1) as u64;
        }
    }
    let counts: Vec<(u64, u64)> = dense
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| (s as u64, c))
        .collect();
    StateSpaceSummary {
        n,
        r: counts.len(),
        counts,
        fixed_points,
        ones_frequency,
    }
}

/// Summary contribution of a contiguous range of initial states.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct PartialSummary {
    counts: BTreeMap<u64, u64>,
    fixed_points: Vec<u64>,
    ones_frequency: Vec<u64>,
}

impl PartialSummary {
    fn scan(network: &Network, range: Range<u64>) -> Self {
        let mut part = PartialSummary {
            ones_frequency: vec![0; network.n()],
            ..Default::default()
        };
        for s in range {
            let t = network.step_bits(s);
            *part.counts.entry(t).or_default() += 1;
            if s == t {
                part.fixed_points.push(s);
            }
            for (i, ones) in part.ones_frequency.iter_mut().enumerate() {
                *ones += (t >> i) & 1;
            }
        }
        part
    }

    /// Associative merge; `self` must cover the lower range.
    fn merge(mut self, other: PartialSummary) -> Self {
        for (s, c) in other.counts {
            *self.counts.entry(s).or_default() += c;
        }
        self.fixed_points.extend(other.fixed_points);
        if self.ones_frequency.is_empty() {
            self.ones_frequency = other.ones_frequency;
        } else {
            for (a, b) in self.ones_frequency.iter_mut().zip(other.ones_frequency) {
                *a += b;
            }
        }
        self
    }
}

/// Same result as [`summarize`], computed over `shards` contiguous ranges of
/// the state space and merged in range order.
pub fn summarize_sharded(network: &Network, cap: usize, shards: usize) -> Result<StateSpaceSummary> {
    let n = network.n();
    ensure_cap(n, cap.min(HARD_CAP))?;
    let total = 1u64 << n;
    let ranges = shard_ranges(total, shards.max(1));
    let merged = ranges
        .into_par_iter()
        .map(|r| PartialSummary::scan(network, r))
        .reduce(PartialSummary::default, PartialSummary::merge);
    let counts: Vec<(u64, u64)> = merged.counts.into_iter().collect();
    Ok(StateSpaceSummary {
        n,
        r: counts.len(),
        counts,
        fixed_points: merged.fixed_points,
        ones_frequency: if merged.ones_frequency.is_empty() {
            vec![0; n]
        } else {
            merged.ones_frequency
        },
    })
}

/// Splits `0..total` into at most `shards` contiguous, non-empty ranges.
pub fn shard_ranges(total: u64, shards: usize) -> Vec<Range<u64>> {
    let shards = (shards as u64).clamp(1, total.max(1));
    let base = total / shards;
    let extra = total % shards;
    let mut start = 0;
    (0..shards)
        .map(|i| {
            let len = base + u64::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .filter(|r| !r.is_empty())
        .collect()
}

pub fn max_count(summary: &StateSpaceSummary) -> u64 {
    summary.counts.iter().map(|&(_, c)| c).max().unwrap_or(0)
}

/// Maps a row number to the state word whose `x1 … xn` reading, taken as a
/// binary number with `x1` most significant, equals the row number.
pub fn row_state(row: u64, n: usize) -> u64 {
    row.reverse_bits() >> (64 - n)
}

/// Trajectories `x(0), x(1), …, x(T)` of every initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    pub n: usize,
    pub steps: usize,
    /// One row per initial state, ascending in the `x1`-first binary reading.
    pub rows: Vec<Vec<u64>>,
}

pub fn transition_table(network: &Network, steps: usize, cap: usize) -> Result<TransitionTable> {
    let n = network.n();
    ensure_cap(n, cap.min(HARD_CAP))?;
    if steps == 0 {
        return Err(crate::Error::Constraint("steps must be at least 1".into()));
    }
    let rows = (0..1u64 << n)
        .map(|row| {
            let mut s = row_state(row, n);
            let mut traj = Vec::with_capacity(steps + 1);
            traj.push(s);
            for _ in 0..steps {
                s = network.step_bits(s);
                traj.push(s);
            }
            traj
        })
        .collect();
    Ok(TransitionTable { n, steps, rows })
}

impl TransitionTable {
    pub fn header(&self) -> Vec<String> {
        (0..=self.steps)
            .flat_map(|t| (1..=self.n).map(move |i| format!("x{i}({t})")))
            .collect()
    }

    /// `000 -> 001 -> 100` per row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&s| format_bits(s, self.n)).collect();
            writeln!(out, "{}", cells.join(" -> ")).unwrap();
        }
        out
    }

    /// Individual `0`/`1` cells of each row, `x1(0)` first.
    pub fn cells(&self) -> impl Iterator<Item = Vec<&'static str>> + '_ {
        self.rows.iter().map(move |row| {
            row.iter()
                .flat_map(|&s| (0..self.n).map(move |i| if (s >> i) & 1 == 1 { "1" } else { "0" }))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{BooleanFunction, Literal};

    fn example1() -> Network {
        Network::new(vec![
            BooleanFunction::And(vec![Literal::pos(1), Literal::pos(3)]),
            BooleanFunction::And(vec![Literal::neg(1), Literal::pos(3)]),
            BooleanFunction::And(vec![Literal::pos(1), Literal::pos(2)]),
        ])
        .unwrap()
    }

    fn bits(s: &str) -> u64 {
        State::from_values(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
            .unwrap()
            .bits()
    }

    #[test]
    fn example1_counts() {
        let summary = summarize(&example1(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(summary.r, 5);
        for (s, c) in [("000", 3), ("100", 1), ("010", 2), ("001", 1), ("101", 1)] {
            assert_eq!(summary.count_of(bits(s)), c, "{s}");
        }
        assert_eq!(max_count(&summary), 3);
        assert_eq!(summary.fixed_points, vec![0]);
    }

    #[test]
    fn cap_is_enforced() {
        let net = Network::new((1..=5).map(|v| BooleanFunction::Xor(vec![Literal::pos(v)])).collect())
            .unwrap();
        assert_eq!(
            summarize(&net, 4).unwrap_err(),
            crate::Error::CapExceeded { n: 5, cap: 4 }
        );
    }

    #[test]
    fn shard_ranges_cover() {
        for total in [1u64, 7, 64] {
            for shards in [1usize, 3, 8, 100] {
                let r = shard_ranges(total, shards);
                assert_eq!(r.first().unwrap().start, 0);
                assert_eq!(r.last().unwrap().end, total);
                assert!(r.windows(2).all(|w| w[0].end == w[1].start));
            }
        }
    }

    #[test]
    fn sharded_matches_dense() {
        let net = example1();
        let dense = summarize(&net, 24).unwrap();
        for shards in [1, 2, 3, 8] {
            assert_eq!(summarize_sharded(&net, 24, shards).unwrap(), dense);
        }
    }

    #[test]
    fn row_order_is_x1_major() {
        assert_eq!(row_state(1, 3), bits("001"));
        assert_eq!(row_state(4, 3), bits("100"));
        let t = transition_table(&example1(), 1, 24).unwrap();
        assert_eq!(t.rows[6], vec![bits("110"), bits("001")]);
        assert_eq!(t.header()[3], "x1(1)");
        assert!(transition_table(&example1(), 0, 24).is_err());
    }
}
