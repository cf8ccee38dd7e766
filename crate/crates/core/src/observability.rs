//! Exact observability decisions.
//!
//! [`check`] computes the coarsest partition of the state space that is
//! compatible with the observed outputs and closed under the update map, by
//! refining the output partition round by round. After round `r` two states
//! share a class exactly when their outputs agree on `y(0), …, y(r)`, so the
//! first round with only singleton classes is the minimal horizon.
//!
//! [`check_bruteforce`] and [`xor_rank_oracle`] decide the same question by
//! independent routes and exist to cross-check the refinement.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{count_bound, fixed_point_bound};
use crate::error::{ensure_cap, Error, Result};
use crate::gf2::Gf2Basis;
use crate::network::{BooleanFunction, Network, ObservationScheme, State};
use crate::state_space::{summarize_map, TransitionMap};

pub const DEFAULT_BRUTEFORCE_CAP: usize = 16;
pub const DEFAULT_SEARCH_CAP: usize = 16;

/// Key spaces up to this size are relabelled through a dense array.
const DENSE_KEYS: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservabilityVerdict {
    pub observable: bool,
    /// Minimal `N` such that `y(0..=N)` separates all initial states.
    pub horizon: Option<usize>,
    /// Lexicographically smallest (by state word) indistinguishable pair.
    pub witness: Option<(State, State)>,
}

/// Output-equivalence classes of the state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalencePartition {
    /// Class id per state word, numbered by first occurrence.
    pub classes: Vec<u32>,
    pub class_count: usize,
    /// Refinement rounds performed until the partition stopped changing.
    pub rounds: usize,
    /// First round after which every class was a singleton.
    pub discrete_at: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefineOutcome {
    pub class_count: usize,
    pub rounds: usize,
    pub discrete_at: Option<usize>,
}

/// Reusable scratch space for partition refinement.
#[derive(Debug, Default)]
pub struct Refiner {
    classes: Vec<u32>,
    keys: Vec<u64>,
    dense: Vec<u32>,
    touched: Vec<usize>,
    sparse: HashMap<u64, u32>,
}

impl Refiner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Class of each state after the last [`Refiner::refine`] call.
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    /// Refines from the partition induced by `output(state)` until stable.
    pub fn refine<F>(&mut self, succ: &[u32], output: F) -> RefineOutcome
    where
        F: Fn(u32) -> u64,
    {
        let total = succ.len();
        self.keys.clear();
        self.keys.extend((0..total as u32).map(&output));
        let bound = self.keys.iter().max().map_or(1, |&m| m + 1);
        let mut count = self.relabel(bound);
        let mut rounds = 0;
        let mut discrete_at = (count == total).then_some(0);

        while discrete_at.is_none() {
            let width = count as u64;
            let classes = &self.classes;
            self.keys.clear();
            self.keys.extend(
                succ.iter()
                    .zip(classes)
                    .map(|(&t, &c)| c as u64 * width + classes[t as usize] as u64),
            );
            let new_count = self.relabel(width * width);
            rounds += 1;
            if new_count == count {
                break;
            }
            count = new_count;
            if count == total {
                discrete_at = Some(rounds);
            }
        }
        RefineOutcome {
            class_count: count,
            rounds,
            discrete_at,
        }
    }

    /// Numbers `keys` (all below `bound`) densely by first occurrence.
    fn relabel(&mut self, bound: u64) -> usize {
        self.classes.clear();
        let mut count = 0u32;
        if bound <= DENSE_KEYS {
            if self.dense.len() < bound as usize {
                self.dense.resize(bound as usize, u32::MAX);
            }
            for &key in &self.keys {
                let slot = &mut self.dense[key as usize];
                if *slot == u32::MAX {
                    *slot = count;
                    self.touched.push(key as usize);
                    count += 1;
                }
                self.classes.push(*slot);
            }
            for &k in &self.touched {
                self.dense[k] = u32::MAX;
            }
            self.touched.clear();
        } else {
            self.sparse.clear();
            for &key in &self.keys {
                let id = *self.sparse.entry(key).or_insert_with(|| {
                    count += 1;
                    count - 1
                });
                self.classes.push(id);
            }
        }
        count as usize
    }
}

fn validate_scheme(n: usize, scheme: &ObservationScheme) -> Result<()> {
    if scheme.is_empty() {
        return Err(Error::EmptyScheme);
    }
    scheme.validate(n)
}

pub fn equivalence_partition(map: &TransitionMap, scheme: &ObservationScheme) -> EquivalencePartition {
    let mut refiner = Refiner::new();
    let outcome = refiner.refine(map.successors(), |s| scheme.project(s as u64));
    EquivalencePartition {
        classes: refiner.classes,
        class_count: outcome.class_count,
        rounds: outcome.rounds,
        discrete_at: outcome.discrete_at,
    }
}

/// Decides observability of `(network, scheme)` over the full state space.
pub fn check(network: &Network, scheme: &ObservationScheme, cap: usize) -> Result<ObservabilityVerdict> {
    validate_scheme(network.n(), scheme)?;
    let map = TransitionMap::build(network, cap)?;
    Ok(check_map(&map, scheme))
}

pub fn check_map(map: &TransitionMap, scheme: &ObservationScheme) -> ObservabilityVerdict {
    let partition = equivalence_partition(map, scheme);
    if let Some(h) = partition.discrete_at {
        return ObservabilityVerdict {
            observable: true,
            horizon: Some(h),
            witness: None,
        };
    }
    let mut sizes = vec![0u32; partition.class_count];
    for &c in &partition.classes {
        sizes[c as usize] += 1;
    }
    let classes = &partition.classes;
    let first = (0..classes.len())
        .find(|&s| sizes[classes[s] as usize] > 1)
        .expect("a non-discrete partition has a class with two members");
    let partner = (first + 1..classes.len())
        .find(|&s| classes[s] == classes[first])
        .expect("class has a second member");
    let n = map.n();
    ObservabilityVerdict {
        observable: false,
        horizon: None,
        witness: Some((
            State::from_raw(first as u64, n),
            State::from_raw(partner as u64, n),
        )),
    }
}

/// Cheap yes/no variant of [`check_map`] for search loops.
pub fn is_observable(refiner: &mut Refiner, map: &TransitionMap, scheme: &ObservationScheme) -> bool {
    refiner
        .refine(map.successors(), |s| scheme.project(s as u64))
        .discrete_at
        .is_some()
}

/// Result of testing injectivity of the output-prefix map at a fixed horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixVerdict {
    pub horizon: usize,
    pub observable: bool,
    /// First colliding pair met in ascending state order.
    pub collision: Option<(State, State)>,
}

/// Builds every output sequence `y(0), …, y(horizon)` and tests them for
/// pairwise distinctness.
pub fn check_bruteforce(
    network: &Network,
    scheme: &ObservationScheme,
    horizon: usize,
    cap: usize,
) -> Result<PrefixVerdict> {
    let n = network.n();
    validate_scheme(n, scheme)?;
    ensure_cap(n, cap)?;
    let mut seen: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
    for start in 0..network.state_count() {
        let mut prefix = Vec::with_capacity((horizon + 1) * scheme.len());
        let mut s = start;
        for t in 0..=horizon {
            prefix.extend(scheme.nodes().iter().map(|&v| (s >> (v - 1)) & 1 == 1));
            if t < horizon {
                s = network.step_bits(s);
            }
        }
        if let Some(&earlier) = seen.get(&prefix) {
            return Ok(PrefixVerdict {
                horizon,
                observable: false,
                collision: Some((network.state(earlier)?, network.state(start)?)),
            });
        }
        seen.insert(prefix, start);
    }
    Ok(PrefixVerdict {
        horizon,
        observable: true,
        collision: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XorRankVerdict {
    /// Rank of the stacked observability matrix `[C; CA; …; CA^(n-1)]`.
    pub rank: usize,
    pub observable: bool,
    /// Minimal `N` with `[C; …; CA^N]` of full rank.
    pub horizon: Option<usize>,
    /// A nonzero state word whose trajectory differences are never observed.
    pub kernel: Option<u64>,
}

/// Linear-algebra decision for XOR networks.
///
/// XOR updates are affine over GF(2), so two trajectories differ by a linear
/// trajectory `e(t) = A^t e(0)` and observability reduces to the rank of the
/// stacked matrix. Negated literals only add constants and drop out.
pub fn xor_rank_oracle(network: &Network, scheme: &ObservationScheme) -> Result<XorRankVerdict> {
    let n = network.n();
    validate_scheme(n, scheme)?;
    let update: Vec<u64> = network
        .functions()
        .iter()
        .enumerate()
        .map(|(i, f)| match f {
            BooleanFunction::Xor(lits) => Ok(lits.iter().fold(0u64, |m, l| m | 1 << (l.var - 1))),
            _ => Err(Error::NotXor { node: i + 1 }),
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<u64> = scheme.nodes().iter().map(|&v| 1u64 << (v - 1)).collect();
    let mut basis = Gf2Basis::new();
    let mut horizon = None;
    for t in 0..n {
        for &r in &rows {
            basis.insert(r);
        }
        if basis.rank() == n {
            horizon = Some(t);
            break;
        }
        // row vector times A: XOR of the update rows selected by r
        rows = rows
            .iter()
            .map(|&r| {
                (0..n)
                    .filter(|&i| (r >> i) & 1 == 1)
                    .fold(0u64, |acc, i| acc ^ update[i])
            })
            .collect();
    }
    Ok(XorRankVerdict {
        rank: basis.rank(),
        observable: horizon.is_some(),
        horizon,
        kernel: basis.kernel_vector(n),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Minimum observer count with the lexicographically first optimal scheme.
    Found { m: usize, scheme: ObservationScheme },
    /// No scheme within the budget is observable.
    AtLeast(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinObservers {
    /// Admissible starting size from the counting bounds.
    pub floor: usize,
    pub outcome: SearchOutcome,
    pub schemes_checked: u64,
}

/// Smallest observation scheme, searching sizes upward from the larger of
/// the COUNT and fixed-point bounds and subsets of each size in
/// lexicographic order.
pub fn min_observers(network: &Network, budget: Option<usize>, cap: usize) -> Result<MinObservers> {
    let n = network.n();
    ensure_cap(n, cap)?;
    let map = TransitionMap::build(network, cap)?;
    let summary = summarize_map(&map);
    let floor = count_bound(&summary)
        .integer
        .max(fixed_point_bound(&summary).integer) as usize;
    let limit = budget.unwrap_or(n).min(n);
    let mut checked = 0u64;

    for m in floor.max(1)..=limit {
        let candidates: Vec<Vec<usize>> = (1..=n).combinations(m).collect();
        checked += candidates.len() as u64;
        let hit = candidates
            .par_iter()
            .map_init(Refiner::new, |refiner, nodes| {
                let scheme = ObservationScheme::new(nodes.iter().copied());
                is_observable(refiner, &map, &scheme)
            })
            .position_first(|ok| ok);
        if let Some(i) = hit {
            return Ok(MinObservers {
                floor,
                outcome: SearchOutcome::Found {
                    m,
                    scheme: ObservationScheme::new(candidates[i].iter().copied()),
                },
                schemes_checked: checked,
            });
        }
    }
    Ok(MinObservers {
        floor,
        outcome: SearchOutcome::AtLeast(floor.max(limit + 1)),
        schemes_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Literal;

    fn prop2() -> Network {
        Network::new(vec![
            BooleanFunction::And(vec![Literal::neg(2), Literal::pos(3)]),
            BooleanFunction::And(vec![Literal::pos(2), Literal::pos(3)]),
            BooleanFunction::And(vec![Literal::neg(2), Literal::neg(3)]),
        ])
        .unwrap()
    }

    fn example1() -> Network {
        Network::new(vec![
            BooleanFunction::And(vec![Literal::pos(1), Literal::pos(3)]),
            BooleanFunction::And(vec![Literal::neg(1), Literal::pos(3)]),
            BooleanFunction::And(vec![Literal::pos(1), Literal::pos(2)]),
        ])
        .unwrap()
    }

    fn ring(n: usize) -> Network {
        Network::new(
            (1..=n)
                .map(|i| BooleanFunction::Xor(vec![Literal::pos(i), Literal::pos(i % n + 1)]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn prop2_horizon_three() {
        let v = check(&prop2(), &ObservationScheme::new([1]), 24).unwrap();
        assert_eq!(v.horizon, Some(3));
        assert!(v.observable && v.witness.is_none());
    }

    #[test]
    fn example1_witness() {
        let v = check(&example1(), &ObservationScheme::new([1]), 24).unwrap();
        assert!(!v.observable);
        let (a, b) = v.witness.unwrap();
        assert_eq!((a.to_string().as_str(), b.to_string().as_str()), ("000", "010"));
    }

    #[test]
    fn full_observation_is_immediate() {
        let v = check(&example1(), &ObservationScheme::full(3), 24).unwrap();
        assert_eq!(v.horizon, Some(0));
    }

    #[test]
    fn empty_scheme_rejected() {
        assert_eq!(
            check(&example1(), &ObservationScheme::default(), 24).unwrap_err(),
            Error::EmptyScheme
        );
    }

    #[test]
    fn bruteforce_ring() {
        let obs = ObservationScheme::new([1]);
        assert!(check_bruteforce(&ring(4), &obs, 3, 16).unwrap().observable);
        // 16 states but only 4 distinct two-bit prefixes
        assert!(!check_bruteforce(&ring(4), &obs, 1, 16).unwrap().observable);
        let single = Network::new(vec![BooleanFunction::Xor(vec![Literal::pos(1)])]).unwrap();
        assert!(check_bruteforce(&single, &obs, 0, 16).unwrap().observable);
    }

    #[test]
    fn rank_oracle() {
        let v = xor_rank_oracle(&ring(5), &ObservationScheme::new([1])).unwrap();
        assert_eq!(v.rank, 5);
        assert!(v.observable);

        let worst = Network::new(
            (0..4)
                .map(|_| BooleanFunction::Xor(vec![Literal::pos(1), Literal::pos(2)]))
                .collect(),
        )
        .unwrap();
        // nodes 3.. feed nothing and must be observed directly; y(1) = x1 ^ x2
        // then recovers whichever of x1, x2 is missing, so n - 1 observers do
        for m in 1..=4 {
            for obs in (1..=4).combinations(m) {
                let scheme = ObservationScheme::new(obs.iter().copied());
                let v = xor_rank_oracle(&worst, &scheme).unwrap();
                let expect =
                    obs.contains(&3) && obs.contains(&4) && (obs.contains(&1) || obs.contains(&2));
                assert_eq!(v.observable, expect, "{obs:?}");
                assert_eq!(v.observable, check(&worst, &scheme, 16).unwrap().observable);
            }
        }

        let chain = Network::new((1..=4).map(|i| BooleanFunction::Xor(vec![Literal::pos(i)])).collect())
            .unwrap();
        assert_eq!(xor_rank_oracle(&chain, &ObservationScheme::full(4)).unwrap().rank, 4);

        assert_eq!(
            xor_rank_oracle(&prop2(), &ObservationScheme::new([1])).unwrap_err(),
            Error::NotXor { node: 1 }
        );
    }

    #[test]
    fn rank_horizon_matches_refinement() {
        for n in 2..=8 {
            let obs = ObservationScheme::new([1]);
            let linear = xor_rank_oracle(&ring(n), &obs).unwrap();
            let refined = check(&ring(n), &obs, 24).unwrap();
            assert_eq!(linear.observable, refined.observable, "n={n}");
            assert_eq!(linear.horizon, refined.horizon, "n={n}");
        }
    }

    #[test]
    fn min_observers_identity() {
        let net = Network::new(
            (1..=3)
                .map(|v| BooleanFunction::TruthTable {
                    vars: vec![v],
                    bits: vec![false, true],
                })
                .collect(),
        )
        .unwrap();
        let r = min_observers(&net, None, 16).unwrap();
        assert_eq!(
            r.outcome,
            SearchOutcome::Found {
                m: 3,
                scheme: ObservationScheme::full(3)
            }
        );
        assert_eq!(r.floor, 3);
    }

    #[test]
    fn min_observers_budget() {
        let worst = Network::new(
            (1..=4)
                .map(|i| {
                    if i < 4 {
                        BooleanFunction::And(vec![Literal::pos(i), Literal::pos(4)])
                    } else {
                        BooleanFunction::And(vec![Literal::pos(4), Literal::pos(1)])
                    }
                })
                .collect(),
        )
        .unwrap();
        // nine states collapse onto 0000, so the floor is already 4
        let r = min_observers(&worst, Some(2), 16).unwrap();
        assert_eq!(r.floor, 4);
        assert_eq!(r.outcome, SearchOutcome::AtLeast(4));
        let r = min_observers(&prop2(), None, 16).unwrap();
        assert_eq!(
            r.outcome,
            SearchOutcome::Found {
                m: 1,
                scheme: ObservationScheme::new([1])
            }
        );
    }

    #[test]
    fn refiner_reuse_is_clean() {
        let map = TransitionMap::build(&prop2(), 24).unwrap();
        let mut refiner = Refiner::new();
        let a = is_observable(&mut refiner, &map, &ObservationScheme::new([2]));
        let b = is_observable(&mut refiner, &map, &ObservationScheme::new([1]));
        let c = is_observable(&mut refiner, &map, &ObservationScheme::new([2]));
        assert!(b);
        assert_eq!(a, c);
    }
}
