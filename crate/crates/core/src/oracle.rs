//! Input strings and the counting query oracle.
//!
//! Every algorithm in this crate sees its input only through a
//! [`CountingOracle`], which answers single-bit, two-bit XOR, and arbitrary
//! parity queries and keeps a [`QueryLedger`] of what was asked.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Random stream used throughout the crate.
pub type TrialRng = ChaCha8Rng;

/// Stream `trial` of the generator keyed by `master_seed`.
///
/// ChaCha is counter based, so stream `t` can be produced without touching
/// streams `0..t`. Results therefore do not depend on how trials are
/// scheduled across threads.
pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Three-way majority of a bit string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MajorityLabel {
    Zero,
    One,
    Tie,
}

/// How ties are reported.
///
/// `Weak` is the two-valued function used for lower bounds: a tie counts as
/// one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MajorityMode {
    #[default]
    Strong,
    Weak,
}

impl MajorityLabel {
    pub fn from_counts(ones: usize, zeros: usize, mode: MajorityMode) -> Self {
        use std::cmp::Ordering::*;
        match (ones.cmp(&zeros), mode) {
            (Greater, _) => MajorityLabel::One,
            (Less, _) => MajorityLabel::Zero,
            (Equal, MajorityMode::Strong) => MajorityLabel::Tie,
            (Equal, MajorityMode::Weak) => MajorityLabel::One,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            MajorityLabel::One
        } else {
            MajorityLabel::Zero
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseBitStringError {
    #[error("invalid character {0:?} in bit string (expected '0' or '1')")]
    InvalidChar(char),
}

/// An immutable input `X_0 X_1 ... X_{N-1}` with cached counts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
    ones: usize,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        let ones = bits.iter().filter(|&&b| b).count();
        BitString { bits, ones }
    }

    /// The low `len` bits of `mask`, bit `i` of the mask becoming `X_i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask strings are limited to 64 bits");
        BitString::new((0..len).map(|i| (mask >> i) & 1 == 1).collect())
    }

    /// `ones` ones followed by `zeros` zeros.
    pub fn with_counts(ones: usize, zeros: usize) -> Self {
        let mut bits = vec![true; ones];
        bits.resize(ones + zeros, false);
        BitString { bits, ones }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn zeros(&self) -> usize {
        self.bits.len() - self.ones
    }

    pub fn discrepancy(&self) -> usize {
        self.ones.abs_diff(self.zeros())
    }

    pub fn majority(&self, mode: MajorityMode) -> MajorityLabel {
        MajorityLabel::from_counts(self.ones, self.zeros(), mode)
    }

    /// First `len` bits.
    pub fn prefix(&self, len: usize) -> BitString {
        BitString::new(self.bits[..len].to_vec())
    }

    /// 1-based position of the `(floor(N/2)+1)`-st bit agreeing with the
    /// majority; `N` for balanced inputs. Every bit after this position is
    /// irrelevant to the majority.
    pub fn forcing_prefix_len(&self) -> usize {
        let n = self.len();
        let majority = match self.majority(MajorityMode::Strong) {
            MajorityLabel::Tie => return n,
            label => label == MajorityLabel::One,
        };
        let needed = n / 2 + 1;
        let mut seen = 0;
        for (i, &b) in self.bits.iter().enumerate() {
            if b == majority {
                seen += 1;
                if seen == needed {
                    return i + 1;
                }
            }
        }
        unreachable!("a strict majority has at least floor(N/2)+1 agreeing bits")
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBitStringError::InvalidChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString::new)
    }
}

/// Uniformly permute `input`: returns `X'` with `X'_i = X_{pi(i)}` and `pi`.
///
/// Draw order: Fisher-Yates over `pi = [0, 1, ..., N-1]`, for `i` from `N-1`
/// down to `1`, swapping `pi[i]` with `pi[j]` where `j = rng.random_range(0..=i)`.
/// Exactly `N-1` draws are consumed (none for `N <= 1`).
pub fn permute_input<R: Rng + ?Sized>(input: &BitString, rng: &mut R) -> (BitString, Vec<usize>) {
    let n = input.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let bits = perm.iter().map(|&p| input.bit(p)).collect();
    (
        BitString {
            bits,
            ones: input.ones,
        },
        perm,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryKind {
    Bit,
    Xor,
    Parity,
}

/// One answered query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub kind: QueryKind,
    pub indices: Vec<usize>,
    pub answer: bool,
}

/// Query counts, plus an optional trace of every query in issue order.
///
/// `quantum_queries` counts applications of the quantum oracle unitary and
/// is kept apart from the classical [`total`](QueryLedger::total).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub bit_queries: u64,
    pub xor_queries: u64,
    pub parity_queries: u64,
    pub quantum_queries: u64,
    pub trace: Option<Vec<QueryRecord>>,
}

impl QueryLedger {
    pub fn new(tracing: bool) -> Self {
        QueryLedger {
            trace: tracing.then(Vec::new),
            ..Default::default()
        }
    }

    pub fn total(&self) -> u64 {
        self.bit_queries + self.xor_queries + self.parity_queries
    }

    fn record(&mut self, kind: QueryKind, indices: &[usize], answer: bool) {
        match kind {
            QueryKind::Bit => self.bit_queries += 1,
            QueryKind::Xor => self.xor_queries += 1,
            QueryKind::Parity => self.parity_queries += 1,
        }
        if let Some(trace) = &mut self.trace {
            trace.push(QueryRecord {
                kind,
                indices: indices.to_vec(),
                answer,
            });
        }
    }
}

/// The oracle refused to answer because its query budget is spent.
///
/// This is not a fault: the zero-error wrapper relies on it to stop a run
/// and report "unknown".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("query budget of {budget} exhausted")]
pub struct BudgetExhausted {
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error(transparent)]
    BudgetExhausted(#[from] BudgetExhausted),
    #[error("index {index} out of range for input of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("XOR of index {0} with itself is constant")]
    SelfXor(usize),
    #[error("parity query over an empty index set")]
    EmptyParitySet,
    #[error("index {0} repeated in parity query")]
    DuplicateIndex(usize),
}

impl QueryError {
    /// Splits out the recoverable budget signal; any other error means the
    /// caller issued a malformed query, which algorithms never do.
    pub fn expect_budget(self) -> BudgetExhausted {
        match self {
            QueryError::BudgetExhausted(b) => b,
            other => panic!("algorithm issued an invalid query: {other}"),
        }
    }
}

/// The only access path to an input.
#[derive(Debug, Clone)]
pub struct CountingOracle<'a> {
    input: &'a BitString,
    ledger: QueryLedger,
    budget: Option<u64>,
}

impl<'a> CountingOracle<'a> {
    pub fn new(input: &'a BitString) -> Self {
        CountingOracle {
            input,
            ledger: QueryLedger::default(),
            budget: None,
        }
    }

    pub fn traced(input: &'a BitString) -> Self {
        CountingOracle {
            input,
            ledger: QueryLedger::new(true),
            budget: None,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn len(&self) -> usize {
        self.input.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty()
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> QueryLedger {
        self.ledger
    }

    fn check_index(&self, index: usize) -> Result<(), QueryError> {
        if index < self.input.len() {
            Ok(())
        } else {
            Err(QueryError::IndexOutOfRange {
                index,
                len: self.input.len(),
            })
        }
    }

    fn check_budget(&self) -> Result<(), QueryError> {
        match self.budget {
            Some(budget) if self.ledger.total() >= budget => {
                Err(BudgetExhausted { budget }.into())
            }
            _ => Ok(()),
        }
    }

    pub fn query_bit(&mut self, i: usize) -> Result<bool, QueryError> {
        self.check_index(i)?;
        self.check_budget()?;
        let answer = self.input.bit(i);
        self.ledger.record(QueryKind::Bit, &[i], answer);
        Ok(answer)
    }

    pub fn query_xor(&mut self, i: usize, j: usize) -> Result<bool, QueryError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(QueryError::SelfXor(i));
        }
        self.check_budget()?;
        let answer = self.input.bit(i) ^ self.input.bit(j);
        self.ledger.record(QueryKind::Xor, &[i, j], answer);
        Ok(answer)
    }

    pub fn query_parity(&mut self, set: &[usize]) -> Result<bool, QueryError> {
        if set.is_empty() {
            return Err(QueryError::EmptyParitySet);
        }
        let mut seen = std::collections::HashSet::with_capacity(set.len());
        for &i in set {
            self.check_index(i)?;
            if !seen.insert(i) {
                return Err(QueryError::DuplicateIndex(i));
            }
        }
        self.check_budget()?;
        let answer = set.iter().fold(false, |acc, &i| acc ^ self.input.bit(i));
        self.ledger.record(QueryKind::Parity, set, answer);
        Ok(answer)
    }
}

/// Recomputes every traced answer from `input`; returns the first
/// disagreeing position.
pub fn replay_trace(input: &BitString, trace: &[QueryRecord]) -> Result<(), usize> {
    for (pos, rec) in trace.iter().enumerate() {
        let expected = rec.indices.iter().fold(false, |acc, &i| acc ^ input.bit(i));
        if expected != rec.answer {
            return Err(pos);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn counts_are_cached() {
        let x = bs("1101");
        assert_eq!((x.ones(), x.zeros(), x.discrepancy()), (3, 1, 2));
        assert_eq!(x.majority(MajorityMode::Strong), MajorityLabel::One);
        let t = bs("01");
        assert_eq!(t.majority(MajorityMode::Strong), MajorityLabel::Tie);
        assert_eq!(t.majority(MajorityMode::Weak), MajorityLabel::One);
        assert_eq!(bs("").majority(MajorityMode::Strong), MajorityLabel::Tie);
        assert!("012".parse::<BitString>().is_err());
    }

    #[test]
    fn bit_queries() {
        let x = bs("101");
        let mut o = CountingOracle::new(&x);
        assert!(o.query_bit(0).unwrap());
        assert_eq!(o.ledger().bit_queries, 1);
        assert!(!o.query_bit(1).unwrap());
        assert_eq!(
            o.query_bit(3),
            Err(QueryError::IndexOutOfRange { index: 3, len: 3 })
        );
        assert_eq!(o.ledger().total(), 2);
    }

    #[test]
    fn xor_queries() {
        let x = bs("10");
        let mut o = CountingOracle::new(&x);
        assert!(o.query_xor(0, 1).unwrap());
        let y = bs("11");
        assert!(!CountingOracle::new(&y).query_xor(0, 1).unwrap());
        let z = bs("0110");
        let mut o = CountingOracle::new(&z);
        assert!(!o.query_xor(1, 2).unwrap());
        assert_eq!(o.query_xor(2, 2), Err(QueryError::SelfXor(2)));
        assert_eq!(o.ledger().xor_queries, 1);
    }

    #[test]
    fn parity_queries() {
        let x = bs("111");
        assert!(CountingOracle::new(&x).query_parity(&[0, 1, 2]).unwrap());
        let y = bs("1010");
        let mut o = CountingOracle::new(&y);
        assert!(!o.query_parity(&[0, 1, 2, 3]).unwrap());
        assert_eq!(o.query_parity(&[0, 0]), Err(QueryError::DuplicateIndex(0)));
        let z = bs("1");
        assert_eq!(
            CountingOracle::new(&z).query_parity(&[]),
            Err(QueryError::EmptyParitySet)
        );
    }

    #[test]
    fn budget_is_a_distinct_signal() {
        let x = bs("1111");
        let mut o = CountingOracle::new(&x).with_budget(1);
        o.query_bit(0).unwrap();
        let err = o.query_xor(0, 1).unwrap_err();
        assert_eq!(err.clone().expect_budget(), BudgetExhausted { budget: 1 });
        // the refused query is not counted
        assert_eq!(o.ledger().total(), 1);
    }

    #[test]
    fn trace_replays() {
        let x = bs("0110");
        let mut o = CountingOracle::traced(&x);
        o.query_bit(1).unwrap();
        o.query_xor(0, 3).unwrap();
        o.query_parity(&[0, 1, 2]).unwrap();
        let ledger = o.into_ledger();
        let trace = ledger.trace.as_ref().unwrap();
        assert_eq!(trace.len() as u64, ledger.total());
        assert_eq!(replay_trace(&x, trace), Ok(()));
        assert_eq!(replay_trace(&bs("1110"), trace), Err(1));
    }

    #[test]
    fn permutation_preserves_counts_and_is_deterministic() {
        let x = bs("0011");
        let (p, perm) = permute_input(&x, &mut trial_rng(7, 0));
        assert_eq!((p.ones(), p.zeros()), (2, 2));
        for (i, &src) in perm.iter().enumerate() {
            assert_eq!(p.bit(i), x.bit(src));
        }
        let h = bs("1111");
        assert_eq!(permute_input(&h, &mut trial_rng(3, 9)).0, h);
        let y = bs("0101");
        let a = permute_input(&y, &mut trial_rng(11, 4));
        let b = permute_input(&y, &mut trial_rng(11, 4));
        assert_eq!(a, b);
    }

    #[test]
    fn permutation_is_uniform_at_n4() {
        use std::collections::HashMap;
        let x = bs("0000");
        let seeds = 120_000u64;
        let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
        for s in 0..seeds {
            let (_, perm) = permute_input(&x, &mut trial_rng(s, 0));
            *counts.entry(perm).or_default() += 1;
        }
        assert_eq!(counts.len(), 24);
        let expected = seeds as f64 / 24.0;
        let sigma = (expected * (1.0 - 1.0 / 24.0)).sqrt();
        let mut chi2 = 0.0;
        for &c in counts.values() {
            assert!((c as f64 - expected).abs() <= 5.0 * sigma, "count {c}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 23 degrees of freedom; 0.9999 quantile is about 58.
        assert!(chi2 < 58.0, "chi2 = {chi2}");
    }

    #[test]
    fn forcing_prefix() {
        assert_eq!(bs("0101").forcing_prefix_len(), 4);
        assert_eq!(bs("1111").forcing_prefix_len(), 3);
        assert_eq!(bs("10110").forcing_prefix_len(), 4);
        assert_eq!(bs("00100").forcing_prefix_len(), 4);
    }
}
