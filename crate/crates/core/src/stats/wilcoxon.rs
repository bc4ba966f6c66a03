//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped. Absolute differences get midranks and the
//! statistic is the rank sum of the positive differences. Up to
//! [`EXACT_MAX_N`] nonzero differences the p-value comes from the exact
//! permutation distribution of the (mid)ranks, beyond that from the normal
//! approximation with tie and continuity corrections.

use statrs::distribution::{ContinuousCDF, Normal};

use super::{Alternative, PairedSample, TestReport};
use crate::{Error, Result};

pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    /// Exact up to [`EXACT_MAX_N`], normal approximation above.
    Auto,
    Exact,
    Normal,
}

pub fn wilcoxon_signed_rank(s: &PairedSample, alternative: Alternative) -> Result<TestReport> {
    wilcoxon_with(s, alternative, WilcoxonMethod::Auto)
}

/// Midranks (1-based) of `values`, plus the sizes of tied groups.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

/// Number of sign assignments giving each value of `Σ 2·rank` over the
/// positive set. Doubled midranks are integers.
fn exact_counts(doubled: &[usize]) -> Vec<f64> {
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in doubled {
        reach += r;
        for v in (r..=reach).rev() {
            counts[v] += counts[v - r];
        }
    }
    counts
}

pub fn wilcoxon_with(s: &PairedSample, alternative: Alternative, method: WilcoxonMethod) -> Result<TestReport> {
    let nonzero: Vec<f64> = s.differences().into_iter().filter(|d| *d != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return Err(Error::AllDifferencesZero);
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = midranks(&abs);
    let v: f64 = ranks.iter().zip(&nonzero).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();

    let exact = match method {
        WilcoxonMethod::Auto => n <= EXACT_MAX_N,
        WilcoxonMethod::Exact => true,
        WilcoxonMethod::Normal => false,
    };
    let p_value = if exact {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let counts = exact_counts(&doubled);
        let observed = (2.0 * v).round() as usize;
        let total = 2f64.powi(n as i32);
        let upper = counts[observed..].iter().sum::<f64>() / total;
        let lower = counts[..=observed].iter().sum::<f64>() / total;
        match alternative {
            Alternative::Greater => upper,
            Alternative::Less => lower,
            Alternative::TwoSided => (2.0 * upper.min(lower)).min(1.0),
        }
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
        let sd = ((nf * (nf + 1.0) * (2.0 * nf + 1.0) - tie_term / 2.0) / 24.0).sqrt();
        let mut z = (v - mean) / sd;
        z -= match alternative {
            Alternative::Greater => 0.5 / sd,
            Alternative::Less => -0.5 / sd,
            Alternative::TwoSided if z == 0.0 => 0.0,
            Alternative::TwoSided => z.signum() * 0.5 / sd,
        };
        let std = Normal::new(0.0, 1.0).expect("standard normal");
        match alternative {
            Alternative::Greater => std.sf(z),
            Alternative::Less => std.cdf(z),
            Alternative::TwoSided => (2.0 * std.cdf(z).min(std.sf(z))).min(1.0),
        }
    };
    Ok(TestReport { statistic: v, p_value: p_value.clamp(0.0, 1.0), alternative: Some(alternative), n_effective: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(d: &[f64]) -> PairedSample {
        PairedSample::new(d.to_vec(), vec![0.0; d.len()]).unwrap()
    }

    /// Literal enumeration of all 2^n sign flips.
    fn brute_force(d: &[f64], alternative: Alternative) -> f64 {
        let nonzero: Vec<f64> = d.iter().copied().filter(|x| *x != 0.0).collect();
        let n = nonzero.len();
        let abs: Vec<f64> = nonzero.iter().map(|x| x.abs()).collect();
        let rank = |i: usize| {
            let less = abs.iter().filter(|&&a| a < abs[i]).count() as f64;
            let eq = abs.iter().filter(|&&a| a == abs[i]).count() as f64;
            less + (eq + 1.0) / 2.0
        };
        let ranks: Vec<f64> = (0..n).map(rank).collect();
        let obs: f64 = (0..n).filter(|&i| nonzero[i] > 0.0).map(|i| ranks[i]).sum();
        let (mut ge, mut le) = (0u64, 0u64);
        for mask in 0u64..(1 << n) {
            let v: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if v >= obs - 1e-9 {
                ge += 1;
            }
            if v <= obs + 1e-9 {
                le += 1;
            }
        }
        let total = (1u64 << n) as f64;
        match alternative {
            Alternative::Greater => ge as f64 / total,
            Alternative::Less => le as f64 / total,
            Alternative::TwoSided => (2.0 * (ge.min(le) as f64) / total).min(1.0),
        }
    }

    #[test]
    fn five_positive_differences() {
        let r = wilcoxon_signed_rank(&pair(&[0.5, 1.5, 2.0, 0.25, 3.0]), Alternative::Greater).unwrap();
        assert_eq!(r.p_value, 1.0 / 32.0);
        assert_eq!(r.p_value, 0.03125);
        assert_eq!(r.statistic, 15.0);
        assert_eq!(r.n_effective, 5);
        let two = wilcoxon_signed_rank(&pair(&[0.5, 1.5, 2.0, 0.25, 3.0]), Alternative::TwoSided).unwrap();
        assert_eq!(two.p_value, 0.0625);
    }

    #[test]
    fn zeros_dropped_and_degenerate_rejected() {
        let r = wilcoxon_signed_rank(&pair(&[0.0, 1.0, 0.0, 2.0, -3.0]), Alternative::TwoSided).unwrap();
        assert_eq!(r.n_effective, 3);
        let same = PairedSample::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(wilcoxon_signed_rank(&same, Alternative::TwoSided), Err(Error::AllDifferencesZero)));
    }

    #[test]
    fn midranks_with_ties() {
        let (r, t) = midranks(&[3.0, 1.0, 3.0, 2.0, 3.0]);
        assert_eq!(r, vec![4.0, 1.0, 4.0, 2.0, 4.0]);
        assert_eq!(t, vec![3]);
    }

    #[test]
    fn exact_matches_enumeration_with_ties() {
        let cases: [&[f64]; 5] = [
            &[1.0, -2.0, 3.0, 4.0, -5.0, 6.0],
            &[1.0, 1.0, -1.0, 2.0, 2.0, -3.0, 4.0],
            &[0.5, -0.5, 0.5, -1.5, 2.5, 2.5, 2.5, -0.1, 0.0],
            &[-1.0, -2.0, -3.0, -4.0],
            &[2.0, -2.0],
        ];
        for d in cases {
            for alt in [Alternative::TwoSided, Alternative::Less, Alternative::Greater] {
                let got = wilcoxon_with(&pair(d), alt, WilcoxonMethod::Exact).unwrap().p_value;
                let want = brute_force(d, alt);
                assert!((got - want).abs() < 1e-15, "{d:?} {alt}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_statistic_two_sided_has_no_correction_sign() {
        // V equals its mean: z = 0 and the two-sided p is 1.
        let d = [1.0, -1.0, 2.0, -2.0];
        let r = wilcoxon_with(&pair(&d), Alternative::TwoSided, WilcoxonMethod::Normal).unwrap();
        assert_eq!(r.p_value, 1.0);
    }
}
