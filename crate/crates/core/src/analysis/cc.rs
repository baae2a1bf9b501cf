//! Exhaustive distributional communication complexity under the uniform
//! input distribution.
//!
//! Message functions are enumerated up to relabeling of messages (as set
//! partitions of the input space into at most `2^k` blocks); the optimal
//! referee for a fixed pair of message functions is the per-cell majority,
//! so no referee enumeration is needed.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boolean::BooleanFunction;
use crate::error::{Error, Result};

pub const SMP_MAX_N: usize = 3;
pub const SMP_MAX_K: usize = 2;
pub const ONEWAY_MAX_N: usize = 3;
pub const ONEWAY_MAX_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcResult {
    pub k: usize,
    /// Number of inputs on which the best protocol errs.
    pub errors: usize,
    pub pairs: usize,
    /// Alice's message for each `x`.
    pub alice: Vec<u8>,
    /// Bob's message for each `y` (empty for one-way protocols).
    pub bob: Vec<u8>,
}

impl CcResult {
    pub fn error(&self) -> f64 {
        self.errors as f64 / self.pairs as f64
    }
}

/// All restricted-growth strings of length `len` using at most `blocks` labels.
pub fn set_partitions(len: usize, blocks: usize) -> Vec<Vec<u8>> {
    fn rec(cur: &mut Vec<u8>, max: u8, len: usize, blocks: usize, out: &mut Vec<Vec<u8>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { (max as usize + 1).min(blocks - 1) };
        for l in 0..=limit as u8 {
            cur.push(l);
            rec(cur, max.max(l), len, blocks, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 || blocks == 0 {
        return out;
    }
    rec(&mut Vec::with_capacity(len), 0, len, blocks, &mut out);
    out
}

fn check_budget(f: &BooleanFunction, k: usize, max_n: usize, max_k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("message length must be at least 1 bit".into()));
    }
    if f.n() > max_n || k > max_k {
        return Err(Error::BudgetExceeded(format!(
            "enumeration limited to n <= {max_n}, k <= {max_k} (got n = {}, k = {k})",
            f.n()
        )));
    }
    Ok(())
}

/// Errors of the majority referee for fixed message functions, abandoning
/// once the running count exceeds `cutoff`.
fn smp_errors(f: &BooleanFunction, fa: &[u8], fb: &[u8], msgs: usize, cutoff: usize) -> Option<usize> {
    let mut counts = vec![[0u32; 2]; msgs * msgs];
    let mut err = 0;
    for (x, &a) in fa.iter().enumerate() {
        for (y, &b) in fb.iter().enumerate() {
            let cell = &mut counts[a as usize * msgs + b as usize];
            let v = f.eval(x, y) as usize;
            let before = cell[0].min(cell[1]);
            cell[v] += 1;
            if cell[0].min(cell[1]) > before {
                err += 1;
                if err > cutoff {
                    return None;
                }
            }
        }
    }
    Some(err)
}

/// Minimal uniform-distribution error of simultaneous-message protocols
/// with `k`-bit messages.
pub fn smp_cc_bruteforce(f: &BooleanFunction, k: usize) -> Result<CcResult> {
    check_budget(f, k, SMP_MAX_N, SMP_MAX_K)?;
    let side = f.side();
    let msgs = 1usize << k;
    let parts = set_partitions(side, msgs);
    let incumbent = AtomicUsize::new(usize::MAX);
    let best = parts
        .par_iter()
        .enumerate()
        .filter_map(|(ia, fa)| {
            let mut local: Option<(usize, usize)> = None;
            for (ib, fb) in parts.iter().enumerate() {
                let cutoff = incumbent.load(Ordering::Relaxed).min(local.map_or(usize::MAX, |l| l.0));
                if let Some(e) = smp_errors(f, fa, fb, msgs, cutoff) {
                    if local.is_none_or(|l| e < l.0) {
                        local = Some((e, ib));
                        incumbent.fetch_min(e, Ordering::Relaxed);
                    }
                }
            }
            local.map(|(e, ib)| (e, ia, ib))
        })
        .min()
        .expect("at least one protocol");
    let (errors, ia, ib) = best;
    Ok(CcResult {
        k,
        errors,
        pairs: f.pairs(),
        alice: parts[ia].clone(),
        bob: parts[ib].clone(),
    })
}

/// Least `k >= 1` whose minimal SMP error is at most `error`. Messages of
/// `n` bits always suffice (error 0), so the search never enumerates past
/// `k = n`.
pub fn smp_cc(f: &BooleanFunction, error: f64) -> Result<usize> {
    for k in 1.. {
        if k >= f.n() {
            return Ok(k);
        }
        if smp_cc_bruteforce(f, k)?.error() <= error {
            return Ok(k);
        }
    }
    unreachable!()
}

/// Minimal uniform error of one-way protocols: Alice sends `k` bits, Bob
/// answers from the message and `y`.
pub fn oneway_cc_bruteforce(f: &BooleanFunction, k: usize) -> Result<CcResult> {
    check_budget(f, k, ONEWAY_MAX_N, ONEWAY_MAX_K)?;
    let side = f.side();
    let msgs = 1usize << k;
    let parts = set_partitions(side, msgs);
    let (errors, ia) = parts
        .par_iter()
        .enumerate()
        .map(|(ia, fa)| {
            let mut counts = vec![[0u32; 2]; msgs * side];
            for (x, &a) in fa.iter().enumerate() {
                for y in 0..side {
                    counts[a as usize * side + y][f.eval(x, y) as usize] += 1;
                }
            }
            (counts.iter().map(|c| c[0].min(c[1]) as usize).sum::<usize>(), ia)
        })
        .min()
        .expect("at least one protocol");
    Ok(CcResult {
        k,
        errors,
        pairs: f.pairs(),
        alice: parts[ia].clone(),
        bob: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_are_stirling_sums() {
        assert_eq!(set_partitions(4, 2).len(), 8); // 1 + 7
        assert_eq!(set_partitions(4, 4).len(), 15); // Bell(4)
        assert_eq!(set_partitions(8, 4).len(), 1 + 127 + 966 + 1701);
    }

    #[test]
    fn budget_enforced() {
        let f = BooleanFunction::constant(4, false).unwrap();
        assert!(matches!(smp_cc_bruteforce(&f, 1), Err(Error::BudgetExceeded(_))));
        let g = BooleanFunction::constant(2, false).unwrap();
        assert!(matches!(smp_cc_bruteforce(&g, 3), Err(Error::BudgetExceeded(_))));
        assert!(smp_cc_bruteforce(&g, 0).is_err());
    }
}
