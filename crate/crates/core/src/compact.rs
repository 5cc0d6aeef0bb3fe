//! Size-only block engines for large inputs.
//!
//! These issue exactly the same queries, in the same order, as the
//! index-set implementations in [`crate::algorithms`], but store one
//! representative per block and group blocks by size exponent. Greedy
//! pairing then costs `O(log N)` per step instead of a scan of the list.

use std::collections::VecDeque;

use crate::oracle::{BudgetExhausted, CountingOracle, MajorityLabel};

fn xor(oracle: &mut CountingOracle<'_>, a: usize, b: usize) -> Result<bool, BudgetExhausted> {
    oracle.query_xor(a, b).map_err(|e| e.expect_budget())
}

fn read(oracle: &mut CountingOracle<'_>, rep: Option<usize>) -> Result<MajorityLabel, BudgetExhausted> {
    match rep {
        None => Ok(MajorityLabel::Tie),
        Some(i) => oracle
            .query_bit(i)
            .map(MajorityLabel::from_bit)
            .map_err(|e| e.expect_budget()),
    }
}

pub fn oblivious_pairing(oracle: &mut CountingOracle<'_>) -> Result<MajorityLabel, BudgetExhausted> {
    let n = oracle.len();
    // blocks of the current phase's size, left to right
    let mut current: Vec<usize> = (0..n).collect();
    // the unpaired block of each earlier phase, smallest size last
    let mut leftovers: Vec<usize> = Vec::new();
    let phases = if n == 0 { 0 } else { n.ilog2() };
    for _ in 0..phases {
        let mut next = Vec::with_capacity(current.len() / 2);
        let mut pairs = current.chunks_exact(2);
        for pair in &mut pairs {
            if !xor(oracle, pair[0], pair[1])? {
                next.push(pair[0].min(pair[1]));
            }
        }
        if let [odd] = pairs.remainder() {
            leftovers.push(*odd);
        }
        current = next;
    }
    debug_assert!(current.len() <= 1);
    let first = current.first().copied().or_else(|| leftovers.last().copied());
    read(oracle, first)
}

struct GreedyState {
    /// `(representative, size)` of `S_1`.
    first: Option<(usize, usize)>,
    /// `groups[e]` holds blocks of size `2^e` in list order.
    groups: Vec<VecDeque<usize>>,
    /// Combined size of all blocks after `S_1`.
    rest: usize,
}

impl GreedyState {
    fn top(&self) -> Option<usize> {
        self.groups.iter().rposition(|g| !g.is_empty())
    }

    /// Promotes the next block in list order to `S_1`.
    fn refill_first(&mut self) {
        self.first = self.top().map(|e| {
            let rep = self.groups[e].pop_front().unwrap();
            self.rest -= 1 << e;
            (rep, 1 << e)
        });
    }
}

pub fn greedy_pairing(oracle: &mut CountingOracle<'_>) -> Result<MajorityLabel, BudgetExhausted> {
    let n = oracle.len();
    let mut st = GreedyState {
        first: None,
        groups: vec![VecDeque::new(); (usize::BITS - n.leading_zeros()) as usize + 1],
        rest: n,
    };
    st.groups[0].extend(0..n);
    st.refill_first();

    while let Some((rep1, size1)) = st.first {
        if size1 > st.rest {
            break;
        }
        let s1 = size1.trailing_zeros() as usize;
        let top = st.top().expect("S_1 does not dominate, so other blocks exist");
        debug_assert!(s1 >= top, "s_1 < s_2");

        // smallest j with s_j = s_{j+1}: either j = 1, or the first group
        // (scanning down from the top exponent) holding two blocks
        let mut target = None;
        if s1 != top {
            let mut found = false;
            let mut prefix = size1;
            for e in (0..=top).rev() {
                match st.groups[e].len() {
                    0 => {}
                    1 => prefix += 1 << e,
                    _ => {
                        found = true;
                        prefix += 1 << e;
                        let suffix = size1 + st.rest - prefix;
                        if prefix <= suffix {
                            target = Some(e);
                        }
                        break;
                    }
                }
            }
            assert!(found, "no equal adjacent exponents although S_1 does not dominate");
        }

        match target {
            Some(e) => {
                let a = st.groups[e].pop_front().unwrap();
                let b = st.groups[e].pop_front().unwrap();
                st.rest -= 2 << e;
                if !xor(oracle, a, b)? {
                    if st.groups.len() == e + 1 {
                        st.groups.push(VecDeque::new());
                    }
                    st.groups[e + 1].push_back(a.min(b));
                    st.rest += 2 << e;
                }
            }
            None => {
                let rep2 = st.groups[top].pop_front().unwrap();
                let size2 = 1usize << top;
                st.rest -= size2;
                if !xor(oracle, rep1, rep2)? {
                    st.first = Some((rep1.min(rep2), size1 + size2));
                } else if size1 > size2 {
                    st.first = Some((rep1, size1 - size2));
                } else {
                    st.refill_first();
                }
            }
        }
    }
    read(oracle, st.first.map(|(rep, _)| rep))
}
