//! Dense state-vector simulation of quantum black-box networks.
//!
//! Basis states are little-endian: qubit `q` is bit `q` of the basis index.
//! An oracle over an `N`-bit input acts on an index register in qubits
//! `0..w` (`w = ceil(log2 N)`) and a target qubit `w`, mapping
//! `|i, b, z> -> |i, b xor X_i, z>`. Index values `i >= N` are left alone.

use num_complex::Complex;
use crate::Scalar;
use serde::Serialize;
use thiserror::Error;

use crate::oracle::{BitString, QueryKind, QueryLedger, QueryRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantumError {
    #[error("register layout mismatch: oracle needs {needed} qubits, state has {have}")]
    Layout { needed: usize, have: usize },
    #[error("qubit {qubit} out of range for a {qubits}-qubit state")]
    Qubit { qubit: usize, qubits: usize },
    #[error("trace entry {position} is malformed: {reason}")]
    MalformedTrace { position: usize, reason: String },
}

/// Norm tolerance after every gate, widened for low-precision scalars.
pub fn norm_tolerance<T: Scalar>() -> T {
    T::from_f64(1e-9).unwrap().max(T::epsilon() * T::from_f64(64.0).unwrap())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    amplitudes: Vec<Complex<T>>,
    qubits: usize,
}

impl<T: Scalar> QuantumState<T> {
    /// `|basis>` on `qubits` qubits.
    pub fn basis(qubits: usize, basis: usize) -> Self {
        let dim = 1usize << qubits;
        assert!(basis < dim, "basis state {basis} out of range");
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[basis] = Complex::new(T::one(), T::zero());
        QuantumState { amplitudes, qubits }
    }

    /// Normalizes an arbitrary nonzero vector; its length must be a power of two.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex<T>>) -> Self {
        assert!(amplitudes.len().is_power_of_two());
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y).sqrt();
        assert!(norm > T::zero(), "zero vector");
        for a in &mut amplitudes {
            *a = *a / norm;
        }
        let qubits = amplitudes.len().trailing_zeros() as usize;
        QuantumState { amplitudes, qubits }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y)
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), QuantumError> {
        if qubit < self.qubits {
            Ok(())
        } else {
            Err(QuantumError::Qubit {
                qubit,
                qubits: self.qubits,
            })
        }
    }

    fn debug_check_norm(&self) {
        debug_assert!(
            (self.norm_sqr() - T::one()).abs() <= norm_tolerance::<T>(),
            "state left the unit sphere"
        );
    }

    pub fn hadamard(&mut self, qubit: usize) -> Result<(), QuantumError> {
        self.check_qubit(qubit)?;
        let h = T::from_f64(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let bit = 1 << qubit;
        for s in (0..self.amplitudes.len()).filter(|s| s & bit == 0) {
            let (a, b) = (self.amplitudes[s], self.amplitudes[s | bit]);
            self.amplitudes[s] = (a + b) * h;
            self.amplitudes[s | bit] = (a - b) * h;
        }
        self.debug_check_norm();
        Ok(())
    }

    pub fn pauli_x(&mut self, qubit: usize) -> Result<(), QuantumError> {
        self.check_qubit(qubit)?;
        let bit = 1 << qubit;
        for s in (0..self.amplitudes.len()).filter(|s| s & bit == 0) {
            self.amplitudes.swap(s, s | bit);
        }
        Ok(())
    }

    /// Probability that measuring `qubit` yields `value`.
    pub fn probability(&self, qubit: usize, value: bool) -> Result<T, QuantumError> {
        self.check_qubit(qubit)?;
        let bit = 1 << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(s, _)| (s & bit != 0) == value)
            .map(|(_, a)| a.norm_sqr())
            .fold(T::zero(), |x, y| x + y))
    }
}

/// The query transformation for a fixed input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleUnitary {
    input: BitString,
    index_qubits: usize,
}

impl OracleUnitary {
    pub fn new(input: BitString) -> Self {
        let n = input.len();
        let index_qubits = if n <= 1 { 0 } else { (n - 1).ilog2() as usize + 1 };
        OracleUnitary { input, index_qubits }
    }

    pub fn index_qubits(&self) -> usize {
        self.index_qubits
    }

    pub fn target(&self) -> usize {
        self.index_qubits
    }

    pub fn input(&self) -> &BitString {
        &self.input
    }
}

/// Applies the oracle once, counting one quantum query.
pub fn apply_oracle<T: Scalar>(
    state: &mut QuantumState<T>,
    oracle: &OracleUnitary,
    ledger: &mut QueryLedger,
) -> Result<(), QuantumError> {
    let needed = oracle.index_qubits + 1;
    if state.qubits < needed {
        return Err(QuantumError::Layout {
            needed,
            have: state.qubits,
        });
    }
    let index_mask = (1usize << oracle.index_qubits) - 1;
    let target = 1usize << oracle.target();
    let n = oracle.input.len();
    for s in (0..state.amplitudes.len()).filter(|s| s & target == 0) {
        let i = s & index_mask;
        if i < n && oracle.input.bit(i) {
            state.amplitudes.swap(s, s | target);
        }
    }
    ledger.quantum_queries += 1;
    state.debug_check_norm();
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GadgetOutcome<T> {
    pub answer: bool,
    pub queries: u64,
    /// Probability of measuring the wrong value.
    pub wrong_probability: T,
}

/// One-query XOR of two bits by phase kickback.
///
/// The target starts in `(|0> - |1>)/sqrt 2`, so the oracle multiplies
/// `|i>` by `(-1)^{X_i}`; a Hadamard on the index qubit then maps the
/// resulting state onto `|X_0 xor X_1>` exactly.
pub fn xor_gadget<T: Scalar>(x0: bool, x1: bool) -> GadgetOutcome<T> {
    let oracle = OracleUnitary::new(BitString::new(vec![x0, x1]));
    let mut ledger = QueryLedger::default();
    let mut state = QuantumState::<T>::basis(2, 0);
    let mut run = || -> Result<T, QuantumError> {
        state.pauli_x(1)?;
        state.hadamard(1)?;
        state.hadamard(0)?;
        apply_oracle(&mut state, &oracle, &mut ledger)?;
        state.hadamard(0)?;
        state.probability(0, true)
    };
    let p_one = run().expect("gadget layout is fixed");
    let answer = p_one > T::from_f64(0.5).unwrap();
    GadgetOutcome {
        answer,
        queries: ledger.quantum_queries,
        wrong_probability: state.probability(0, !answer).expect("qubit 0 exists"),
    }
}

/// Reads `X_i` with one oracle application on a basis state.
pub fn quantum_bit_query<T: Scalar>(
    oracle: &OracleUnitary,
    i: usize,
    ledger: &mut QueryLedger,
) -> Result<(bool, T), QuantumError> {
    let mut state = QuantumState::<T>::basis(oracle.index_qubits + 1, i);
    apply_oracle(&mut state, oracle, ledger)?;
    let answer = state.probability(oracle.target(), true)? > T::from_f64(0.5).unwrap();
    Ok((answer, state.probability(oracle.target(), !answer)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledRun {
    pub classical_queries: u64,
    pub quantum_queries: u64,
    /// Largest wrong-outcome probability over all replayed queries.
    pub max_wrong_probability: f64,
}

/// Replays a traced classical run in the quantum model: a bit query becomes
/// one oracle application and an XOR query one run of [`xor_gadget`] on
/// the two-bit sub-oracle. Each quantum answer is checked against the trace.
pub fn compile_run(trace: &[QueryRecord], input: &BitString) -> Result<CompiledRun, QuantumError> {
    let oracle = OracleUnitary::new(input.clone());
    let mut ledger = QueryLedger::default();
    let mut worst = 0.0f64;
    for (position, rec) in trace.iter().enumerate() {
        let malformed = |reason: String| QuantumError::MalformedTrace { position, reason };
        if let Some(&i) = rec.indices.iter().find(|&&i| i >= input.len()) {
            return Err(malformed(format!("index {i} out of range")));
        }
        let (answer, wrong) = match (rec.kind, rec.indices.as_slice()) {
            (QueryKind::Bit, &[i]) => quantum_bit_query::<f64>(&oracle, i, &mut ledger)?,
            (QueryKind::Xor, &[i, j]) if i != j => {
                let g = xor_gadget::<f64>(input.bit(i), input.bit(j));
                ledger.quantum_queries += g.queries;
                (g.answer, g.wrong_probability)
            }
            (kind, indices) => {
                return Err(malformed(format!("{kind:?} query over {indices:?} has no unit-cost gadget")))
            }
        };
        if answer != rec.answer {
            return Err(malformed("recorded answer disagrees with the input".into()));
        }
        worst = worst.max(wrong);
    }
    Ok(CompiledRun {
        classical_queries: trace.len() as u64,
        quantum_queries: ledger.quantum_queries,
        max_wrong_probability: worst,
    })
}
