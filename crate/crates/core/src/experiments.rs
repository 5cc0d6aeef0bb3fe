//! Monte Carlo harness for the randomized algorithms.
//!
//! Trial `t` of an experiment draws everything it needs from
//! `trial_rng(master_seed, t)`: first the input bits (uniform class only),
//! then the permutation. Trials run on the rayon pool and are collected in
//! trial order, so results do not depend on the number of threads.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{default_budget, randomized, Algorithm, BudgetError, Engine, Verdict};
use crate::oracle::{trial_rng, BitString, MajorityMode};

pub const DEFAULT_MAX_N: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputClass {
    /// `ones` ones and `N - ones` zeros in uniformly random order.
    Fixed { ones: usize },
    /// `floor(N/2)` ones in uniformly random order.
    Balanced,
    /// Each bit an independent fair coin.
    Uniform,
}

impl InputClass {
    /// `(A, B)` when the class fixes the counts.
    pub fn counts(self, n: usize) -> Option<(usize, usize)> {
        match self {
            InputClass::Fixed { ones } => Some((ones, n - ones)),
            InputClass::Balanced => Some((n / 2, n - n / 2)),
            InputClass::Uniform => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub class: InputClass,
    pub algorithm: Algorithm,
    pub trials: u64,
    pub master_seed: u64,
    pub epsilon: f64,
    /// Tail parameters; one [`TailReport`] is produced per entry.
    pub r_values: Vec<f64>,
    pub d: f64,
    pub max_n: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, class: InputClass, algorithm: Algorithm, trials: u64, master_seed: u64) -> Self {
        ExperimentConfig {
            n,
            class,
            algorithm,
            trials,
            master_seed,
            epsilon: 0.05,
            r_values: Vec::new(),
            d: 3.0,
            max_n: DEFAULT_MAX_N,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        if self.n == 0 || self.n > self.max_n {
            return bad(format!("N = {} outside 1..={}", self.n, self.max_n));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {} outside (0, 1)", self.epsilon));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return bad(format!("d = {} must be positive", self.d));
        }
        if let Some(r) = self.r_values.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
            return bad(format!("r = {r} must be at least 1"));
        }
        if let InputClass::Fixed { ones } = self.class {
            if ones > self.n {
                return bad(format!("A = {ones} exceeds N = {}", self.n));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error("trial {trial} answered {verdict:?} on an input whose majority is {expected:?}")]
    WrongVerdict {
        trial: u64,
        verdict: Verdict,
        expected: Verdict,
    },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

/// What one trial observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub ones: usize,
    pub comparisons: u64,
    pub total_cost: u64,
    pub verdict: Verdict,
}

fn trial_input<R: Rng>(n: usize, class: InputClass, rng: &mut R) -> BitString {
    match class {
        InputClass::Uniform => BitString::new((0..n).map(|_| rng.random_bool(0.5)).collect()),
        fixed => {
            let (a, b) = fixed.counts(n).unwrap();
            BitString::with_counts(a, b)
        }
    }
}

/// Runs one trial and checks the verdict against the true label.
pub fn run_trial(
    config: &ExperimentConfig,
    trial: u64,
    budget: Option<u64>,
) -> Result<TrialOutcome, ExperimentError> {
    let mut rng = trial_rng(config.master_seed, trial);
    let input = trial_input(config.n, config.class, &mut rng);
    let run = randomized(config.algorithm, Engine::Compact, &input, &mut rng, budget).result;
    let label = input.majority(MajorityMode::Strong);
    if !run.verdict.is_consistent_with(label) {
        return Err(ExperimentError::WrongVerdict {
            trial,
            verdict: run.verdict,
            expected: label.into(),
        });
    }
    Ok(TrialOutcome {
        ones: input.ones(),
        comparisons: run.comparisons(),
        total_cost: run.total_cost(),
        verdict: run.verdict,
    })
}

/// All trials of `config`, in trial order.
pub fn run_trials(config: &ExperimentConfig, budget: Option<u64>) -> Result<Vec<TrialOutcome>, ExperimentError> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t, budget))
        .collect()
}

/// Summary of an integer-valued sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CostStats {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance; 0 for a single observation.
    pub variance: f64,
    pub min: u64,
    pub max: u64,
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub histogram: BTreeMap<u64, u64>,
}

impl CostStats {
    pub fn from_samples(samples: &[u64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable();
        let count = sorted.len() as u64;
        let mean = sorted.iter().map(|&x| x as f64).sum::<f64>() / count as f64;
        let variance = if count > 1 {
            sorted.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        let mut histogram = BTreeMap::new();
        for &x in &sorted {
            *histogram.entry(x).or_insert(0) += 1;
        }
        Some(CostStats {
            count,
            mean,
            variance,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            p50: nearest_rank(&sorted, 0.50),
            p90: nearest_rank(&sorted, 0.90),
            p99: nearest_rank(&sorted, 0.99),
            histogram,
        })
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Nearest-rank quantile of a sorted, nonempty sample.
pub fn nearest_rank(sorted: &[u64], q: f64) -> u64 {
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Exceedance of one tail threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub threshold: f64,
    pub empirical: f64,
    pub cap: f64,
    pub pass: bool,
}

impl TailReport {
    pub fn sampling_slack(cap: f64, trials: u64) -> f64 {
        let t = trials as f64;
        3.0 * (cap / t + 1.0 / t).sqrt()
    }

    /// Caps above one half say too little to be worth asserting.
    pub fn is_asserted(&self) -> bool {
        self.cap <= 0.5
    }
}

/// Comparison count whose exceedance probability is capped for `algorithm`,
/// or `None` for the trivial algorithm.
pub fn tail_threshold(algorithm: Algorithm, n: usize, ones: usize, zeros: usize, d: f64, r: f64) -> Option<f64> {
    let nf = n as f64;
    let m = ones.min(zeros) as f64;
    let dev = d * (r * nf).sqrt();
    match algorithm {
        Algorithm::Trivial => None,
        Algorithm::Oblivious => Some(nf - 2.0 * m / 3.0 + dev),
        Algorithm::Greedy => Some(nf / 2.0 + m / 3.0 + dev),
    }
}

/// `2^-r * log2 N`, with the logarithm floored at 1.
pub fn tail_cap(n: usize, r: f64) -> f64 {
    (-r).exp2() * (n.max(2) as f64).log2().max(1.0)
}

pub fn tail_reports(config: &ExperimentConfig, comparisons: &[u64]) -> Vec<TailReport> {
    let Some((a, b)) = config.class.counts(config.n) else {
        return Vec::new();
    };
    let trials = comparisons.len() as u64;
    config
        .r_values
        .iter()
        .filter_map(|&r| {
            let threshold = tail_threshold(config.algorithm, config.n, a, b, config.d, r)?;
            let hits = comparisons.iter().filter(|&&c| c as f64 >= threshold).count();
            let empirical = hits as f64 / trials as f64;
            let cap = tail_cap(config.n, r);
            Some(TailReport {
                threshold: round_sig(threshold),
                empirical: round_sig(empirical),
                cap: round_sig(cap),
                pass: empirical <= cap + TailReport::sampling_slack(cap, trials),
            })
        })
        .collect()
}

/// One row of the results table. `A` and `B` are empty for the uniform class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Option<usize>,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    pub algorithm: Algorithm,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub var: f64,
    pub min: u64,
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

impl StatsRow {
    pub fn new(config: &ExperimentConfig, stats: &CostStats) -> Self {
        let counts = config.class.counts(config.n);
        StatsRow {
            n: config.n,
            a: counts.map(|c| c.0),
            b: counts.map(|c| c.1),
            algorithm: config.algorithm,
            trials: config.trials,
            seed: config.master_seed,
            mean: round_sig(stats.mean),
            var: round_sig(stats.variance),
            min: stats.min,
            p50: stats.p50,
            p90: stats.p90,
            p99: stats.p99,
            max: stats.max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub stats: CostStats,
    pub row: StatsRow,
    /// Parallel to `config.r_values` (empty for the uniform class and the
    /// trivial algorithm).
    pub tails: Vec<TailReport>,
}

impl ExperimentReport {
    /// Tail reports that failed although their cap is small enough to assert.
    pub fn asserted_tail_failures(&self) -> usize {
        self.tails.iter().filter(|t| t.is_asserted() && !t.pass).count()
    }
}

/// Statistics of the comparison count, plus tail reports, over all trials.
/// Any wrong verdict aborts the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let outcomes = run_trials(config, None)?;
    let comparisons: Vec<u64> = outcomes.iter().map(|o| o.comparisons).collect();
    let stats = CostStats::from_samples(&comparisons).expect("at least one trial");
    Ok(ExperimentReport {
        row: StatsRow::new(config, &stats),
        tails: tail_reports(config, &comparisons),
        config: config.clone(),
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnknownRate {
    pub budget: u64,
    pub trials: u64,
    pub unknown: u64,
    pub rate: f64,
}

/// Fraction of truncated runs that give up under `budget` total queries.
pub fn unknown_rate_experiment(config: &ExperimentConfig, budget: u64) -> Result<UnknownRate, ExperimentError> {
    let outcomes = run_trials(config, Some(budget))?;
    let unknown = outcomes.iter().filter(|o| o.verdict == Verdict::Unknown).count() as u64;
    Ok(UnknownRate {
        budget,
        trials: config.trials,
        unknown,
        rate: unknown as f64 / config.trials as f64,
    })
}

/// [`unknown_rate_experiment`] under `default_budget(N, epsilon, d)`.
pub fn default_unknown_rate(config: &ExperimentConfig) -> Result<UnknownRate, ExperimentError> {
    let budget = default_budget(config.n, config.epsilon, config.d)?;
    unknown_rate_experiment(config, budget)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub n: usize,
    /// Empirical `1 - epsilon/2` quantile of the total cost.
    pub quantile: u64,
    /// Smallest `d` whose default budget covers that quantile.
    pub required_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub epsilon: f64,
    pub trials: u64,
    pub points: Vec<CalibrationPoint>,
    /// Largest required `d` over the training sizes.
    pub d: f64,
}

/// Fits the budget constant on balanced inputs of the given sizes.
///
/// For each size the `1 - epsilon/2` quantile `q` of the untruncated total
/// cost is measured and `d` is solved from
/// `2N/3 + d * sqrt(N * ln(log2(N) / epsilon)) = q`. Aiming at half the target
/// rate leaves room for sampling noise when the fitted constant is reused
/// on other sizes.
pub fn calibrate_budget_constant(
    sizes: &[usize],
    algorithm: Algorithm,
    epsilon: f64,
    trials: u64,
    master_seed: u64,
) -> Result<Calibration, ExperimentError> {
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut config = ExperimentConfig::new(n, InputClass::Balanced, algorithm, trials, master_seed);
        config.epsilon = epsilon;
        let mut totals: Vec<u64> = run_trials(&config, None)?.iter().map(|o| o.total_cost).collect();
        totals.sort_unstable();
        let quantile = nearest_rank(&totals, 1.0 - epsilon / 2.0);
        let nf = n as f64;
        let ln_term = ((n.max(2) as f64).log2().max(1.0) / epsilon).ln();
        let required_d = (quantile as f64 - 2.0 * nf / 3.0) / (nf * ln_term).sqrt();
        points.push(CalibrationPoint { n, quantile, required_d });
    }
    let d = points
        .iter()
        .map(|p| p.required_d)
        .fold(f64::MIN_POSITIVE, f64::max);
    Ok(Calibration {
        epsilon,
        trials,
        points,
        d,
    })
}

/// Rounds to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap()
}

pub const STATS_HEADER: [&str; 13] = [
    "N", "A", "B", "algorithm", "trials", "seed", "mean", "var", "min", "p50", "p90", "p99", "max",
];
pub const TAIL_HEADER: [&str; 4] = ["threshold", "empirical", "cap", "pass"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// JSON form of an emitted file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub stats: Vec<StatsRow>,
    pub tails: Vec<TailReport>,
}

/// CSV text: the stats header and rows, then, if there are tail reports,
/// the tail header and one row per report.
pub fn results_csv(stats: &[StatsRow], tails: &[TailReport]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_writer(Vec::new());
    w.write_record(STATS_HEADER)?;
    for row in stats {
        w.serialize(row)?;
    }
    if !tails.is_empty() {
        w.write_record(TAIL_HEADER)?;
        for t in tails {
            w.serialize(t)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn results_json(stats: &[StatsRow], tails: &[TailReport]) -> String {
    let file = ResultsFile {
        stats: stats.to_vec(),
        tails: tails.to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn emit_results(
    stats: &[StatsRow],
    tails: &[TailReport],
    path: &Path,
    format: OutputFormat,
) -> Result<(), ExperimentError> {
    let text = match format {
        OutputFormat::Csv => results_csv(stats, tails).map_err(|source| ExperimentError::Csv {
            path: path.to_path_buf(),
            source,
        })?,
        OutputFormat::Json => results_json(stats, tails),
    };
    fs::write(path, text).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_results_json(path: &Path) -> Result<ResultsFile, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ExperimentError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, class: InputClass, algorithm: Algorithm, trials: u64) -> ExperimentConfig {
        ExperimentConfig::new(n, class, algorithm, trials, 42)
    }

    #[test]
    fn forced_cancellation_on_two_bits() {
        let c = config(2, InputClass::Fixed { ones: 1 }, Algorithm::Oblivious, 50);
        for o in run_trials(&c, None).unwrap() {
            assert_eq!((o.comparisons, o.verdict), (1, Verdict::Tie));
        }
    }

    #[test]
    fn greedy_mean_brackets_at_1024() {
        let n = 1024usize;
        let r = run_experiment(&config(n, InputClass::Balanced, Algorithm::Greedy, 10_000)).unwrap();
        let nf = n as f64;
        let lo = 2.0 * nf / 3.0 - 3.0 * nf.sqrt();
        let hi = 2.0 * nf / 3.0 + 2.0 * nf.log2() + 3.0 * nf.sqrt();
        assert!(lo <= r.stats.mean && r.stats.mean <= hi, "{}", r.stats.mean);
        assert!(r.stats.std_dev() <= 4.0 * nf.sqrt());
    }

    #[test]
    fn unknown_rate_extremes() {
        let c = config(64, InputClass::Balanced, Algorithm::Greedy, 200);
        assert_eq!(unknown_rate_experiment(&c, 65).unwrap().rate, 0.0);
        assert_eq!(unknown_rate_experiment(&c, 0).unwrap().rate, 1.0);
        let homogeneous = config(8, InputClass::Fixed { ones: 8 }, Algorithm::Oblivious, 20);
        for o in run_trials(&homogeneous, None).unwrap() {
            assert_eq!((o.total_cost, o.verdict), (8, Verdict::One));
        }
    }

    #[test]
    fn config_validation() {
        let mut c = config(16, InputClass::Fixed { ones: 17 }, Algorithm::Greedy, 1);
        assert!(c.validate().is_err());
        c.class = InputClass::Balanced;
        assert!(c.validate().is_ok());
        c.epsilon = 1.0;
        assert!(c.validate().is_err());
        c.epsilon = 0.1;
        c.r_values = vec![0.5];
        assert!(c.validate().is_err());
        c.r_values.clear();
        c.trials = 0;
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn stats_summary() {
        let s = CostStats::from_samples(&[3, 1, 2, 2, 10]).unwrap();
        assert_eq!((s.min, s.p50, s.p90, s.p99, s.max), (1, 2, 10, 10, 10));
        assert_eq!(s.mean, 3.6);
        assert!((s.variance - 13.3).abs() < 1e-12);
        assert_eq!(s.histogram[&2], 2);
        assert_eq!(CostStats::from_samples(&[7]).unwrap().variance, 0.0);
        assert!(CostStats::from_samples(&[]).is_none());
    }

    #[test]
    fn csv_layout() {
        assert_eq!(results_csv(&[], &[]).unwrap(), "N,A,B,algorithm,trials,seed,mean,var,min,p50,p90,p99,max\n");
        let mut c = config(64, InputClass::Balanced, Algorithm::Greedy, 100);
        let r = run_experiment(&c).unwrap();
        let text = results_csv(&[r.row.clone()], &[]).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.ends_with('\n'));
        assert!(text.lines().nth(1).unwrap().starts_with("64,32,32,greedy,100,42,"));
        c.r_values = vec![1.0, 4.0];
        let r = run_experiment(&c).unwrap();
        let text = results_csv(&[r.row], &r.tails).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "threshold,empirical,cap,pass");
        c.class = InputClass::Uniform;
        let r = run_experiment(&c).unwrap();
        assert!(r.tails.is_empty());
        assert!(results_csv(&[r.row], &[]).unwrap().lines().nth(1).unwrap().starts_with("64,,,greedy"));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(round_sig(584.04230883), 584.042309);
        assert_eq!(round_sig(2.0 / 3.0), 0.666666667);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let mut c = config(100, InputClass::Fixed { ones: 30 }, Algorithm::Oblivious, 300);
        c.r_values = vec![1.0, 2.0, 8.0];
        let r = run_experiment(&c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        emit_results(&[r.row.clone()], &r.tails, &path, OutputFormat::Json).unwrap();
        let back = read_results_json(&path).unwrap();
        assert_eq!(back, ResultsFile { stats: vec![r.row], tails: r.tails });
        assert!(fs::read_to_string(&path).unwrap().ends_with('\n'));
        let missing = dir.path().join("no/such/dir/out.csv");
        let err = emit_results(&[], &[], &missing, OutputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("no/such/dir"));
    }

    #[test]
    fn output_independent_of_thread_count() {
        let mut c = config(2000, InputClass::Uniform, Algorithm::Greedy, 3000);
        c.r_values = vec![1.0, 3.0];
        let render = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut fixed = c.clone();
                let uniform = run_experiment(&fixed).unwrap();
                fixed.class = InputClass::Balanced;
                let balanced = run_experiment(&fixed).unwrap();
                results_csv(&[uniform.row, balanced.row], &balanced.tails).unwrap()
            })
        };
        assert_eq!(render(1), render(4));
    }

    #[test]
    fn tail_exceedance_decreases_in_r() {
        let mut c = config(1024, InputClass::Balanced, Algorithm::Greedy, 4000);
        c.d = 0.05;
        c.r_values = (1..=12).map(f64::from).collect();
        let r = run_experiment(&c).unwrap();
        for w in r.tails.windows(2) {
            assert!(w[1].threshold > w[0].threshold);
            assert!(w[1].empirical <= w[0].empirical);
        }
        assert!(r.tails[0].empirical > 0.0, "threshold too high to be informative");
    }

    #[test]
    fn tails_hold_at_default_constant() {
        for algorithm in [Algorithm::Oblivious, Algorithm::Greedy] {
            let mut c = config(1024, InputClass::Fixed { ones: 400 }, algorithm, 4000);
            c.r_values = vec![1.0, 4.0, 6.0, 10.0];
            let r = run_experiment(&c).unwrap();
            assert_eq!(r.tails.len(), 4);
            assert!(r.tails.iter().filter(|t| t.is_asserted()).count() >= 2);
            assert_eq!(r.asserted_tail_failures(), 0, "{:?}", r.tails);
        }
    }

    #[test]
    fn balanced_is_the_worst_class() {
        let n = 512usize;
        let trials = 2000u64;
        let slack = 3.0 * (n as f64).sqrt() / (trials as f64).sqrt();
        let means: Vec<(usize, f64)> = [0, 64, 128, 192, 240, 256, 272, 320, 448, 512]
            .into_iter()
            .map(|ones| {
                let c = config(n, InputClass::Fixed { ones }, Algorithm::Greedy, trials);
                (ones, run_experiment(&c).unwrap().stats.mean)
            })
            .collect();
        let balanced = means.iter().find(|m| m.0 == n / 2).unwrap().1;
        for (ones, mean) in &means {
            assert!(*mean <= balanced + slack, "A={ones}: {mean} > {balanced}");
        }
    }

    #[test]
    fn calibrated_constant_covers_training_sizes() {
        let cal = calibrate_budget_constant(&[256, 512], Algorithm::Greedy, 0.1, 2000, 7).unwrap();
        assert_eq!(cal.points.len(), 2);
        for p in &cal.points {
            assert!(default_budget(p.n, 0.1, cal.d).unwrap() >= p.quantile);
        }
    }
}
