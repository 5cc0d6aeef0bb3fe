//! Closed-form quantities: Hamming-weight identities, exact and average
//! costs, divisibility certificates for parity decision trees, and the
//! classical bounded-error lower bound.

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algorithms::default_budget;
use crate::Scalar;
use crate::oracle::{permute_input, BitString, MajorityLabel, MajorityMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("expected even N >= 2, got {0}")]
    OddLength(usize),
    #[error("expected N >= {min}, got {n}")]
    TooSmall { n: usize, min: usize },
}

/// Number of ones in the binary expansion of `n`.
pub fn hamming_weight(n: u64) -> u32 {
    n.count_ones()
}

/// Exact worst-case XOR decision tree cost of MAJORITY on `n` bits.
pub fn exact_cost(n: u64) -> u64 {
    n + 1 - u64::from(hamming_weight(n))
}

/// Both sides of `sum_{k>=1} floor(N / 2^k) = N - w(N)`, computed separately.
pub fn floor_sum_identity(n: u64) -> (u64, u64) {
    let lhs = (1..u64::BITS).map(|k| n >> k).take_while(|&q| q > 0).sum();
    (lhs, n - u64::from(hamming_weight(n)))
}

/// Exponent of 2 in `n!`, accumulated as `sum_{i<=n} v2(i)`.
pub fn factorial_two_adic_valuation(n: u64) -> u64 {
    (1..=n).map(|i| u64::from(i.trailing_zeros())).sum()
}

/// `v2(k!)` for every `k` in `0..=n_max`, by the same running sum.
pub fn factorial_two_adic_valuations(n_max: u64) -> Vec<u64> {
    let mut acc = 0;
    std::iter::once(0)
        .chain((1..=n_max).map(|i| {
            acc += u64::from(i.trailing_zeros());
            acc
        }))
        .collect()
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn two_adic(x: &BigUint) -> Option<u64> {
    x.trailing_zeros()
}

/// Number of `n`-bit strings with strictly more ones than zeros,
/// `2^(n-1) - C(n, n/2)/2`, and its 2-adic valuation.
pub fn strict_majority_count(n: usize) -> Result<(BigUint, u64), AnalysisError> {
    if n == 0 || n % 2 == 1 {
        return Err(AnalysisError::OddLength(n));
    }
    let half_central = binomial(n as u64, n as u64 / 2) >> 1u32;
    let count = (BigUint::one() << (n - 1)) - half_central;
    let v = two_adic(&count).expect("count is positive for n >= 2");
    Ok((count, v))
}

/// Outcome of the counting argument for a claimed parity-tree depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthCertificate {
    pub n: usize,
    pub depth: usize,
    /// Length of the instance the counting argument ran on (`n - 1` when an
    /// odd `n` is reduced by padding with a zero).
    pub counted_length: usize,
    pub valuation: u64,
    /// True when `2^(counted_length - depth)` fails to divide the count, so
    /// no parity decision tree of that depth computes MAJORITY.
    pub impossible: bool,
}

/// Applies "depth `d` implies `2^(N-d)` divides `|f^-1(1)|`" to MAJORITY.
///
/// Odd `n >= 3` is reduced to `n - 1` (a tree for `n` bits decides `n - 1`
/// bits padded with a zero). For `n = 1` the count of the one-bit function
/// (a single accepting input) is used directly.
pub fn parity_tree_divisibility_certificate(n: usize, depth: usize) -> Result<DepthCertificate, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::TooSmall { n, min: 1 });
    }
    let (counted_length, valuation) = if n == 1 {
        (1, 0)
    } else if n % 2 == 1 {
        (n - 1, strict_majority_count(n - 1)?.1)
    } else {
        (n, strict_majority_count(n)?.1)
    };
    let impossible = depth < counted_length && (counted_length - depth) as u64 > valuation;
    Ok(DepthCertificate {
        n,
        depth,
        counted_length,
        valuation,
        impossible,
    })
}

/// Smallest depth the counting argument does not rule out.
pub fn parity_depth_lower_bound(n: usize) -> Result<usize, AnalysisError> {
    for d in 0..=n {
        if !parity_tree_divisibility_certificate(n, d)?.impossible {
            return Ok(d);
        }
    }
    Ok(n)
}

/// `2N/3 - sqrt(8N / (9 pi))`, the leading terms of the average greedy
/// pairing cost over all `N`-bit inputs.
pub fn ars_average<T: Scalar>(n: usize) -> T {
    let n = T::from_usize(n).unwrap();
    let two = T::from_f64(2.0).unwrap();
    let three = T::from_f64(3.0).unwrap();
    let eight = T::from_f64(8.0).unwrap();
    let nine = T::from_f64(9.0).unwrap();
    let pi = T::from_f64(std::f64::consts::PI).unwrap();
    two * n / three - (eight * n / (nine * pi)).sqrt()
}

/// `t = ceil(N/2)`: inputs with `t` ones have weak majority one, inputs with
/// `t - 1` ones have majority zero.
pub fn threshold(n: u64) -> u64 {
    n.div_ceil(2)
}

/// `t (N - t + 1) / (N (N + 1))`, the error any `(N-1)`-query randomized
/// decision tree makes on the hard mixture distribution.
pub fn classical_error_lower_bound(n: u64) -> Ratio<u64> {
    assert!(n >= 1);
    let t = threshold(n);
    Ratio::new(t * (n - t + 1), n * (n + 1))
}

/// Hard input distribution: weight `beta` on uniform strings with `t - 1`
/// ones and `1 - beta` on uniform strings with `t` ones, `beta = t/(N+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaMixture {
    pub n: usize,
    pub t: usize,
    pub beta: BigRational,
}

impl BetaMixture {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let t = threshold(n as u64) as usize;
        BetaMixture {
            n,
            t,
            beta: BigRational::new(BigInt::from(t), BigInt::from(n + 1)),
        }
    }

    /// `(input, probability)` over the support, inputs as bit masks.
    pub fn support(&self) -> Vec<(u64, BigRational)> {
        let n = self.n;
        let mut out = Vec::new();
        for (ones, weight) in [
            (self.t - 1, self.beta.clone()),
            (self.t, BigRational::one() - &self.beta),
        ] {
            let count = BigInt::from(binomial(n as u64, ones as u64));
            for mask in (0..(1u64 << n)).filter(|m| m.count_ones() as usize == ones) {
                out.push((mask, &weight / &count));
            }
        }
        out
    }
}

/// Queries `N - 1` bits in uniformly random order; answers zero when fewer
/// than `t - 1` of them are ones, one when more, and otherwise zero with
/// probability `bias`.
///
/// Draws: the query order is the permutation from [`permute_input`], then
/// one `random_bool(bias)` if the coin is needed.
pub fn near_tight_classical_strategy<R: Rng + ?Sized>(
    input: &BitString,
    rng: &mut R,
    bias: f64,
) -> Result<MajorityLabel, AnalysisError> {
    let n = input.len();
    if n < 2 {
        return Err(AnalysisError::TooSmall { n, min: 2 });
    }
    let t = threshold(n as u64) as usize;
    let (_, order) = permute_input(input, rng);
    let seen = order[..n - 1].iter().filter(|&&i| input.bit(i)).count();
    Ok(match seen.cmp(&(t - 1)) {
        std::cmp::Ordering::Less => MajorityLabel::Zero,
        std::cmp::Ordering::Greater => MajorityLabel::One,
        std::cmp::Ordering::Equal => {
            if rng.random_bool(bias) {
                MajorityLabel::Zero
            } else {
                MajorityLabel::One
            }
        }
    })
}

/// Exact error probability of [`near_tight_classical_strategy`] on the beta
/// mixture, enumerating every input in the support and all `N!` query
/// orders. `bias` is the probability of answering zero on the coin.
pub fn near_tight_strategy_error(n: usize, bias: &BigRational) -> Result<BigRational, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::TooSmall { n, min: 2 });
    }
    let mixture = BetaMixture::new(n);
    let t = mixture.t;
    let orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let per_order = BigRational::new(BigInt::one(), BigInt::from(orders.len()));
    let mut error = BigRational::zero();
    for (mask, weight) in mixture.support() {
        let x = BitString::from_mask(mask, n);
        let truth = x.majority(MajorityMode::Weak);
        let mut wrong = BigRational::zero();
        for order in &orders {
            let seen = order[..n - 1].iter().filter(|&&i| x.bit(i)).count();
            let p_zero = match seen.cmp(&(t - 1)) {
                std::cmp::Ordering::Less => BigRational::one(),
                std::cmp::Ordering::Greater => BigRational::zero(),
                std::cmp::Ordering::Equal => bias.clone(),
            };
            wrong += match truth {
                MajorityLabel::Zero => BigRational::one() - p_zero,
                _ => p_zero,
            };
        }
        error += weight * wrong * &per_order;
    }
    Ok(error)
}

/// One row of the bounds table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub n: usize,
    pub w: u32,
    pub exact_cost: u64,
    pub ars_average: f64,
    pub classical_error_lb: String,
    /// `(epsilon, budget)` at the table's budget constant.
    pub budgets: Vec<(f64, u64)>,
}

pub const TABLE_EPSILONS: [f64; 3] = [0.1, 0.05, 0.01];

pub fn bounds_row(n: usize, d: f64) -> BoundsRow {
    assert!(n >= 1);
    BoundsRow {
        n,
        w: hamming_weight(n as u64),
        exact_cost: exact_cost(n as u64),
        ars_average: ars_average(n),
        classical_error_lb: classical_error_lower_bound(n as u64).to_string(),
        budgets: TABLE_EPSILONS
            .iter()
            .map(|&eps| (eps, default_budget(n, eps, d).expect("valid budget parameters")))
            .collect(),
    }
}
