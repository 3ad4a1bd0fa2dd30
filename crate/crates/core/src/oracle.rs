//! Exhaustive maximum-likelihood decoding for small codes.
//!
//! For every error pattern on `n ≤ 16` qubits the table accumulates the
//! probability of each (syndrome, logical class) pair under independent
//! flips with rate `p`. Decoding returns the lightest representative of the
//! most probable class. This is the optimal decoder for the per-type
//! marginal model, used as a reference in tests and small experiments.

use std::collections::HashMap;

use crate::codes::{CssCode, ErrorType};
use crate::error::{Error, Result};
use crate::gf2::BinVector;

pub const ML_QUBIT_LIMIT: usize = 16;

#[derive(Clone, Debug)]
pub struct MlOracle {
    n: usize,
    decision: HashMap<u64, u32>,
}

impl MlOracle {
    pub fn new(code: &CssCode, t: ErrorType, p: f64) -> Result<Self> {
        let n = code.n;
        if n > ML_QUBIT_LIMIT {
            return Err(Error::TooLargeForExhaustive { n, limit: ML_QUBIT_LIMIT });
        }
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidArgument(format!("ML oracle needs p in [0, 0.5], got {p}")));
        }
        let h = code.checks_for(t);
        if h.rows() > 64 {
            return Err(Error::InvalidArgument("ML oracle supports at most 64 checks".into()));
        }
        let logicals = code.detecting_logicals(t);
        let col_syndrome: Vec<u64> = (0..n)
            .map(|q| h.col(q).iter().fold(0u64, |acc, &r| acc | 1 << r))
            .collect();
        let logical_masks: Vec<u32> = logicals
            .iter()
            .map(|l| l.support().iter().fold(0u32, |acc, &q| acc | 1 << q))
            .collect();
        let classes = 1usize << logical_masks.len();

        // Per syndrome: per class (total probability, lightest pattern).
        let mut table: HashMap<u64, Vec<(f64, u32)>> = HashMap::new();
        for e in 0u32..(1u32 << n) {
            let w = e.count_ones() as i32;
            let prob = p.powi(w) * (1.0 - p).powi(n as i32 - w);
            let mut syn = 0u64;
            let mut bits = e;
            while bits != 0 {
                syn ^= col_syndrome[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            let class = logical_masks
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &m)| acc | (((e & m).count_ones() as usize & 1) << i));
            let slot = &mut table.entry(syn).or_insert_with(|| vec![(0.0, u32::MAX); classes])[class];
            slot.0 += prob;
            let better = slot.1 == u32::MAX
                || e.count_ones() < slot.1.count_ones()
                || (e.count_ones() == slot.1.count_ones() && e < slot.1);
            if better {
                slot.1 = e;
            }
        }
        let decision = table
            .into_iter()
            .map(|(syn, classes)| {
                let best = classes
                    .iter()
                    .filter(|c| c.1 != u32::MAX)
                    .fold(None::<(f64, u32)>, |acc, &c| match acc {
                        Some(a) if a.0 >= c.0 => Some(a),
                        _ => Some(c),
                    })
                    .expect("every reached syndrome has a class");
                (syn, best.1)
            })
            .collect();
        Ok(MlOracle { n, decision })
    }

    pub fn decode(&self, syndrome: &BinVector) -> Result<BinVector> {
        let key = syndrome.support().iter().fold(0u64, |acc, &r| acc | 1 << r);
        let e = *self.decision.get(&key).ok_or(Error::Infeasible)?;
        let bits: Vec<bool> = (0..self.n).map(|q| e >> q & 1 == 1).collect();
        Ok(BinVector::from_bits(&bits))
    }

    /// Number of distinct syndromes in the table.
    pub fn syndromes(&self) -> usize {
        self.decision.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;

    #[test]
    fn corrects_every_single_error() {
        let reg = Registry::bundled();
        for label in ["hp_13_1_3", "steane_7_1_3", "shor_9_1_3"] {
            let code = reg.get(label).unwrap();
            for t in [ErrorType::X, ErrorType::Z] {
                let oracle = MlOracle::new(&code, t, 0.05).unwrap();
                let h = code.checks_for(t);
                for q in 0..code.n {
                    let e = BinVector::new(code.n, vec![q]).unwrap();
                    let s = h.matvec(&e).unwrap();
                    let est = oracle.decode(&s).unwrap();
                    assert_eq!(h.matvec(&est).unwrap(), s);
                    let r = est.xor(&e).unwrap();
                    assert!(code.detecting_logicals(t).iter().all(|l| !l.dot(&r)), "{label} {t:?} q{q}");
                }
            }
        }
    }

    #[test]
    fn syndrome_count_matches_rank() {
        let code = Registry::bundled().get("hp_13_1_3").unwrap();
        let oracle = MlOracle::new(&code, ErrorType::X, 0.1).unwrap();
        assert_eq!(oracle.syndromes(), 1 << code.hz.rank());
    }

    #[test]
    fn rejects_large_codes() {
        let code = crate::codes::tests::bb72();
        assert!(matches!(
            MlOracle::new(&code, ErrorType::X, 0.01),
            Err(Error::TooLargeForExhaustive { .. })
        ));
    }
}
