//! Exhaustive oracles for small `N`: optimal decision-tree depth by memoized
//! minimax, exact expectations over uniformly random `(A, B)`-strings, and
//! per-class cost census of the algorithms.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algorithms::{run, run_traced, Algorithm};
use crate::oracle::{BitString, MajorityLabel, MajorityMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteForceError {
    #[error("N = {n} is above the exhaustive-search limit of {max} for {what}")]
    TooLarge { n: usize, max: usize, what: &'static str },
    #[error("invalid class A = {ones}, B = {zeros}: {reason}")]
    Class { ones: usize, zeros: usize, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QueryFamily {
    /// Single bits and XORs of two bits.
    #[value(name = "xor")]
    XorAndBits,
    /// Parity of any nonempty subset.
    #[value(name = "parity")]
    AllParities,
}

impl QueryFamily {
    pub fn max_n(self) -> usize {
        match self {
            QueryFamily::XorAndBits => 5,
            QueryFamily::AllParities => 4,
        }
    }

    /// Index sets the family may query, as bit masks over positions.
    pub fn queries(self, n: usize) -> Vec<u64> {
        (1..(1u64 << n))
            .filter(|q| match self {
                QueryFamily::XorAndBits => q.count_ones() <= 2,
                QueryFamily::AllParities => true,
            })
            .collect()
    }
}

/// Set of inputs consistent with the answers so far, as a bitset over all
/// `2^N` inputs (bit `x` set when input `x` is still possible).
pub type KnowledgeState = u64;

/// Memoized minimax over knowledge states.
pub struct MinimaxSearch {
    /// For each query, the inputs on which it answers 1.
    answer_one: Vec<KnowledgeState>,
    /// Inputs grouped by target label; a state inside one group is a leaf.
    label_sets: Vec<KnowledgeState>,
    memo: HashMap<KnowledgeState, u32>,
    full: KnowledgeState,
}

impl MinimaxSearch {
    pub fn new(n: usize, family: QueryFamily, target: MajorityMode) -> Result<Self, BruteForceError> {
        Self::with_queries(n, family.queries(n), target, family.max_n())
    }

    /// Same search, trying queries in the given order.
    pub fn with_queries(
        n: usize,
        queries: Vec<u64>,
        target: MajorityMode,
        max_n: usize,
    ) -> Result<Self, BruteForceError> {
        if n > max_n || n > 6 {
            return Err(BruteForceError::TooLarge {
                n,
                max: max_n.min(6),
                what: "minimax depth",
            });
        }
        let inputs = 1u64 << n;
        let answer_one = queries
            .iter()
            .map(|&q| {
                (0..inputs)
                    .filter(|x| (x & q).count_ones() % 2 == 1)
                    .fold(0, |acc, x| acc | (1 << x))
            })
            .collect();
        let mut by_label: BTreeMap<u8, KnowledgeState> = BTreeMap::new();
        for x in 0..inputs {
            let ones = x.count_ones() as usize;
            let label = match MajorityLabel::from_counts(ones, n - ones, target) {
                MajorityLabel::Zero => 0,
                MajorityLabel::One => 1,
                MajorityLabel::Tie => 2,
            };
            *by_label.entry(label).or_default() |= 1 << x;
        }
        let full = if inputs == 64 { u64::MAX } else { (1 << inputs) - 1 };
        Ok(MinimaxSearch {
            answer_one,
            label_sets: by_label.into_values().collect(),
            memo: HashMap::new(),
            full,
        })
    }

    pub fn optimal_depth(&mut self) -> u32 {
        self.depth(self.full)
    }

    pub fn states_explored(&self) -> usize {
        self.memo.len()
    }

    fn depth(&mut self, state: KnowledgeState) -> u32 {
        if self.label_sets.iter().any(|&set| state & !set == 0) {
            return 0;
        }
        if let Some(&d) = self.memo.get(&state) {
            return d;
        }
        let mut best = u32::MAX;
        for q in 0..self.answer_one.len() {
            let yes = state & self.answer_one[q];
            let no = state & !self.answer_one[q];
            // a query with a determined answer cannot help
            if yes == 0 || no == 0 {
                continue;
            }
            let first = self.depth(yes);
            if first + 1 >= best {
                continue;
            }
            let d = 1 + first.max(self.depth(no));
            best = best.min(d);
        }
        debug_assert!(best != u32::MAX, "undecided state with no informative query");
        self.memo.insert(state, best);
        best
    }
}

/// Minimum worst-case number of queries from `family` needed to compute
/// majority (ties labelled as in `target`) on `n` bits.
pub fn optimal_depth(n: usize, family: QueryFamily, target: MajorityMode) -> Result<u32, BruteForceError> {
    if n > family.max_n() {
        return Err(BruteForceError::TooLarge {
            n,
            max: family.max_n(),
            what: "minimax depth",
        });
    }
    Ok(MinimaxSearch::new(n, family, target)?.optimal_depth())
}

/// JSON certificate emitted by the `optimal` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub family: QueryFamily,
    pub depth: u32,
    pub matched_formula: bool,
}

pub fn depth_report(n: usize, family: QueryFamily) -> Result<DepthReport, BruteForceError> {
    let depth = optimal_depth(n, family, MajorityMode::Weak)?;
    Ok(DepthReport {
        n,
        family,
        depth,
        matched_formula: u64::from(depth) == crate::analysis::exact_cost(n as u64),
    })
}

fn check_class(ones: usize, zeros: usize, min_n: usize, max_n: usize) -> Result<usize, BruteForceError> {
    let n = ones + zeros;
    if n < min_n {
        return Err(BruteForceError::Class {
            ones,
            zeros,
            reason: "input too short",
        });
    }
    if n > max_n {
        return Err(BruteForceError::TooLarge {
            n,
            max: max_n,
            what: "class enumeration",
        });
    }
    Ok(n)
}

/// All strings with `ones` ones and `zeros` zeros, as masks (bit `i` = `X_i`).
pub fn class_members(ones: usize, zeros: usize) -> impl Iterator<Item = u64> {
    let n = ones + zeros;
    (0..(1u64 << n)).filter(move |m| m.count_ones() as usize == ones)
}

fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Exact expected number of first-phase oblivious-pairing cancellations
/// (pairs `(X_{2j}, X_{2j+1})` that differ) over uniform `(A, B)`-strings.
pub fn exact_first_phase_cancellations(ones: usize, zeros: usize) -> Result<BigRational, BruteForceError> {
    let n = check_class(ones, zeros, 2, 14)?;
    let (mut total, mut count) = (0u64, 0u64);
    for mask in class_members(ones, zeros) {
        total += (0..n / 2)
            .filter(|j| ((mask >> (2 * j)) ^ (mask >> (2 * j + 1))) & 1 == 1)
            .count() as u64;
        count += 1;
    }
    Ok(ratio(total, count))
}

/// Exact expected number of ones among the first `k` positions.
pub fn exact_prefix_ones(ones: usize, zeros: usize, k: usize) -> Result<BigRational, BruteForceError> {
    let n = check_class(ones, zeros, 1, 14)?;
    assert!(k <= n);
    let prefix = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let (mut total, mut count) = (0u64, 0u64);
    for mask in class_members(ones, zeros) {
        total += u64::from((mask & prefix).count_ones());
        count += 1;
    }
    Ok(ratio(total, count))
}

/// Distribution of the forcing-prefix length `M` over uniform strings with
/// `A >= B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixLengthDistribution {
    pub pmf: BTreeMap<usize, BigRational>,
}

impl PrefixLengthDistribution {
    pub fn mean(&self) -> BigRational {
        self.pmf
            .iter()
            .map(|(&m, p)| p * BigInt::from(m))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn total_mass(&self) -> BigRational {
        self.pmf.values().fold(BigRational::zero(), |a, b| a + b)
    }
}

pub fn exact_m_distribution(ones: usize, zeros: usize) -> Result<PrefixLengthDistribution, BruteForceError> {
    let n = check_class(ones, zeros, 1, 16)?;
    if ones < zeros {
        return Err(BruteForceError::Class {
            ones,
            zeros,
            reason: "expected A >= B",
        });
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut total = 0u64;
    for mask in class_members(ones, zeros) {
        *counts
            .entry(BitString::from_mask(mask, n).forcing_prefix_len())
            .or_default() += 1;
        total += 1;
    }
    Ok(PrefixLengthDistribution {
        pmf: counts.into_iter().map(|(m, c)| (m, ratio(c, total))).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusMode {
    /// Every input of length `N` once (`N <= 14`).
    Deterministic,
    /// One representative per class, run on all `N!` orderings (`N <= 10`).
    AllPermutations,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub runs: u64,
    pub min_comparisons: u64,
    pub max_comparisons: u64,
    pub mean_comparisons: BigRational,
    pub max_total_cost: u64,
}

/// Per-`(A, B)` statistics of an algorithm's comparisons.
pub fn exhaustive_cost_census(
    n: usize,
    algorithm: Algorithm,
    mode: CensusMode,
) -> Result<BTreeMap<(usize, usize), CensusEntry>, BruteForceError> {
    let limit = match mode {
        CensusMode::Deterministic => 14,
        CensusMode::AllPermutations => 10,
    };
    if n > limit {
        return Err(BruteForceError::TooLarge {
            n,
            max: limit,
            what: "cost census",
        });
    }
    let mut acc: BTreeMap<(usize, usize), (u64, u64, u64, u64, u64)> = BTreeMap::new();
    let mut add = |x: &BitString| {
        let r = run(algorithm, x);
        let e = acc
            .entry((x.ones(), x.zeros()))
            .or_insert((0, u64::MAX, 0, 0, 0));
        let c = r.comparisons();
        e.0 += 1;
        e.1 = e.1.min(c);
        e.2 = e.2.max(c);
        e.3 += c;
        e.4 = e.4.max(r.total_cost());
    };
    match mode {
        CensusMode::Deterministic => {
            for mask in 0..(1u64 << n) {
                add(&BitString::from_mask(mask, n));
            }
        }
        CensusMode::AllPermutations => {
            for ones in 0..=n {
                let base = BitString::with_counts(ones, n - ones);
                for perm in (0..n).permutations(n) {
                    add(&BitString::new(perm.iter().map(|&p| base.bit(p)).collect()));
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|(class, (runs, min, max, sum, max_total))| {
            (
                class,
                CensusEntry {
                    runs,
                    min_comparisons: min,
                    max_comparisons: max,
                    mean_comparisons: ratio(sum, runs),
                    max_total_cost: max_total,
                },
            )
        })
        .collect())
}

/// Mean comparisons over all `2^N` inputs.
pub fn mean_comparisons_all_inputs(n: usize, algorithm: Algorithm) -> Result<BigRational, BruteForceError> {
    let census = exhaustive_cost_census(n, algorithm, CensusMode::Deterministic)?;
    let sum = census
        .values()
        .map(|e| &e.mean_comparisons * BigInt::from(e.runs))
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(sum / BigInt::from(1u64 << n))
}

/// `max(2 floor(log2 N) - 3, 0)`.
pub fn refined_sandwich_slack(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    (2 * i64::from(n.ilog2()) - 3).max(0) as u64
}

/// `d * max(log2 N, 1)^2`.
pub fn published_sandwich_slack(n: usize, d: f64) -> f64 {
    let log = (n.max(1) as f64).log2().max(1.0);
    d * log * log
}

/// Comparison of greedy pairing on `X` with oblivious pairing on the
/// forcing prefix `Y`, over every input of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub n: usize,
    /// Extremes of `C_GP(X) - C_OP(Y)`.
    pub min_excess: i64,
    pub max_excess: i64,
    pub refined_slack: u64,
    /// Inputs breaking `C_OP(Y) <= C_GP(X) <= C_OP(Y) + refined_slack`.
    pub refined_violations: u64,
    /// Inputs breaking `C_GP(X) <= C_OP(Y) + d log^2 N`.
    pub published_violations: u64,
    /// Inputs on which greedy queried a position at or beyond `M`.
    pub prefix_violations: u64,
}

pub fn sandwich_report(n: usize, d: f64) -> Result<SandwichReport, BruteForceError> {
    if n > 16 {
        return Err(BruteForceError::TooLarge {
            n,
            max: 16,
            what: "sandwich replay",
        });
    }
    let refined = refined_sandwich_slack(n);
    let published = published_sandwich_slack(n, d);
    let mut rep = SandwichReport {
        n,
        min_excess: i64::MAX,
        max_excess: i64::MIN,
        refined_slack: refined,
        refined_violations: 0,
        published_violations: 0,
        prefix_violations: 0,
    };
    for mask in 0..(1u64 << n) {
        let x = BitString::from_mask(mask, n);
        let m = x.forcing_prefix_len();
        let greedy = run_traced(Algorithm::Greedy, &x);
        let c_gp = greedy.comparisons() as i64;
        let c_op = run(Algorithm::Oblivious, &x.prefix(m)).comparisons() as i64;
        let excess = c_gp - c_op;
        rep.min_excess = rep.min_excess.min(excess);
        rep.max_excess = rep.max_excess.max(excess);
        if excess < 0 || excess > refined as i64 {
            rep.refined_violations += 1;
        }
        if excess as f64 > published {
            rep.published_violations += 1;
        }
        let trace = greedy.ledger.trace.as_deref().unwrap_or_default();
        if trace.iter().any(|rec| rec.indices.iter().any(|&i| i >= m)) {
            rep.prefix_violations += 1;
        }
    }
    if n == 0 {
        rep.min_excess = 0;
        rep.max_excess = 0;
    }
    Ok(rep)
}
