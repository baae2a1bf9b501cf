//! Dependent 0/1 processes whose conditional success probability is capped
//! (or floored) by `p` are dominated by the i.i.d. process.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::{BoundReport, Relation};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// `P[Bin(r, p) >= t]` for every `t` in `0..=r+1`.
pub fn binomial_upper_tails(r: usize, p: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; r + 1];
    pmf[0] = 1.0;
    for _ in 0..r {
        for k in (0..=r).rev() {
            pmf[k] = pmf[k] * (1.0 - p) + if k > 0 { pmf[k - 1] * p } else { 0.0 };
        }
    }
    let mut tails = vec![0.0; r + 2];
    for t in (0..=r).rev() {
        tails[t] = tails[t + 1] + pmf[t];
    }
    tails
}

/// Exact distribution of the number of successes of an adaptive process on
/// `r` steps, where `policy[node]` is the success probability at each node
/// of the binary history tree (root 0, children `2i+1` failure, `2i+2`
/// success).
fn adaptive_distribution(r: usize, policy: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; r + 1];
    let mut stack = vec![(0usize, 0usize, 0usize, 1.0f64)];
    while let Some((node, depth, wins, prob)) = stack.pop() {
        if depth == r {
            dist[wins] += prob;
            continue;
        }
        let q = policy[node];
        stack.push((2 * node + 1, depth + 1, wins, prob * (1.0 - q)));
        stack.push((2 * node + 2, depth + 1, wins + 1, prob * q));
    }
    dist
}

/// Worst excess of an adaptive tail over the i.i.d. tail, over every policy
/// that picks each conditional probability from `choices`, and whether the
/// count is compared from above (`upper`) or below.
pub fn exact_domination(r: usize, p: f64, choices: &[f64], upper: bool) -> Result<f64> {
    let nodes = (1usize << r) - 1;
    let total = choices
        .len()
        .checked_pow(nodes as u32)
        .filter(|&t| t <= 1 << 22)
        .ok_or_else(|| Error::BudgetExceeded("too many adaptive policies".into()))?;
    let reference = binomial_upper_tails(r, if upper { p } else { 1.0 - p });
    let worst = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut c = code;
            let policy: Vec<f64> = (0..nodes)
                .map(|_| {
                    let v = choices[c % choices.len()];
                    c /= choices.len();
                    v
                })
                .collect();
            let mut dist = adaptive_distribution(r, &policy);
            if !upper {
                // Count failures instead, whose probabilities are capped by 1 - p.
                dist.reverse();
            }
            let mut tail = 0.0;
            let mut excess = f64::NEG_INFINITY;
            for t in (0..=r).rev() {
                tail += dist[t];
                excess = excess.max(tail - reference[t]);
            }
            excess
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(worst)
}

/// Monte-Carlo tails of a dependent process against the i.i.d. tails,
/// returning the largest `(empirical - exact) / sigma` over all `t`.
pub fn sampled_domination(r: usize, p: f64, trials: usize, upper: bool, stream: SeedStream) -> f64 {
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.split(i as u64).rng();
            let mut prev = false;
            let mut wins = 0;
            for _ in 0..r {
                let q = if upper {
                    p * (1.0 - 0.5 * prev as u8 as f64)
                } else {
                    p + (1.0 - p) * 0.5 * prev as u8 as f64
                };
                prev = rng.random::<f64>() < q;
                wins += prev as usize;
            }
            if upper {
                wins
            } else {
                r - wins
            }
        })
        .collect();
    let reference = binomial_upper_tails(r, if upper { p } else { 1.0 - p });
    let mut hist = vec![0usize; r + 2];
    for c in counts {
        hist[c] += 1;
    }
    let mut tail = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for t in (0..=r).rev() {
        tail += hist[t];
        let q = reference[t];
        let emp = tail as f64 / trials as f64;
        let sigma = (q * (1.0 - q) / trials as f64).sqrt().max(1.0 / trials as f64);
        worst = worst.max((emp - q) / sigma);
    }
    worst
}

pub const DOMINATION_SIGMAS: f64 = 4.0;

pub fn check_bound_by_iid(trials: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let p = 0.5;
    let capped = exact_domination(3, p, &[0.0, 0.25, p], true)?;
    let floored = exact_domination(3, p, &[p, 0.75, 1.0], false)?;
    let stream = SeedStream::new(seed).named("bound-by-iid");
    let up = sampled_domination(50, p, trials, true, stream.named("capped"));
    let down = sampled_domination(50, p, trials, false, stream.named("floored"));
    Ok(vec![
        BoundReport::new(
            "bound_by_iid_exact",
            capped.max(floored),
            Relation::Le,
            0.0,
            1e-12,
            2 * 3usize.pow(7),
            json!({"rounds": 3, "p": p, "capped_excess": capped, "floored_excess": floored}),
        ),
        BoundReport::new(
            "bound_by_iid_sampled",
            up.max(down),
            Relation::Le,
            DOMINATION_SIGMAS,
            0.0,
            trials,
            json!({"rounds": 50, "p": p, "capped_sigmas": up, "floored_sigmas": down, "seed": seed}),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_policy_matches_binomial() {
        let policy = vec![0.3; 7];
        let d = adaptive_distribution(3, &policy);
        let tails = binomial_upper_tails(3, 0.3);
        assert!((d[3] - tails[3]).abs() < 1e-15);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(exact_domination(3, 0.3, &[0.3], true).unwrap().abs() < 1e-15);
    }

    #[test]
    fn exceeding_the_cap_is_detected() {
        assert!(exact_domination(3, 0.5, &[0.6], true).unwrap() > 0.01);
    }
}
