use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("a sample is constant; correlation is undefined")]
    Constant,
    #[error("all paired differences are zero")]
    Degenerate,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard deviation with the `n - 1` denominator; zero for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// 1-based ranks, ties sharing the average of their positions.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: a.len(),
        });
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let (ma, mb) = (mean(&ra), mean(&rb));
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(StatsError::Constant);
    }
    Ok((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    /// Pairs left after dropping zero differences.
    pub n_used: usize,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Whether `p_value` comes from the exact null distribution.
    pub exact: bool,
}

impl WilcoxonResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Largest sample size for which the exact null distribution is enumerated.
const EXACT_LIMIT: usize = 50;

/// Two-sided Wilcoxon signed-rank test on paired samples `a - b`.
///
/// Zero differences are dropped and tied magnitudes get average ranks. Up
/// to 50 pairs the p-value is exact (the conditional null over the observed
/// ranks); beyond that a tie-corrected normal approximation is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 6 {
        return Err(StatsError::TooFew {
            needed: 6,
            got: a.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(StatsError::Degenerate);
    }
    let n = diffs.len();
    let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let statistic = w_plus.min(total - w_plus);

    let (p_value, exact) = if n <= EXACT_LIMIT {
        (exact_lower_tail(&ranks, statistic), true)
    } else {
        let mean = total / 2.0;
        let mut sorted = ranks.clone();
        sorted.sort_by(f64::total_cmp);
        let mut tie_term = 0.0;
        let mut i = 0;
        while i < sorted.len() {
            let j = sorted[i..].iter().take_while(|r| **r == sorted[i]).count();
            tie_term += (j * j * j - j) as f64;
            i += j;
        }
        let var = (n * (n + 1) * (2 * n + 1)) as f64 / 24.0 - tie_term / 48.0;
        let z = (statistic - mean) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (normal.cdf(z), false)
    };
    Ok(WilcoxonResult {
        statistic,
        w_plus,
        n_used: n,
        p_value: (2.0 * p_value).min(1.0),
        exact,
    })
}

/// `P(W+ <= t)` when every rank enters `W+` independently with probability
/// one half. Ranks are doubled so half ranks from ties stay integral.
fn exact_lower_tail(ranks: &[f64], t: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut dist = vec![0.0f64; max + 1];
    dist[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            let p = dist[s] * 0.5;
            dist[s] = p;
            dist[s + r] += p;
        }
        reach += r;
    }
    let limit = (t * 2.0).round() as usize;
    dist[..=limit.min(max)].iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p_value: f64,
}

/// Two-sided paired Student t-test on `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: a.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let sd = sample_std(&diffs);
    if sd == 0.0 {
        return Err(StatsError::Degenerate);
    }
    let n = diffs.len() as f64;
    let t = mean(&diffs) / (sd / n.sqrt());
    let df = n - 1.0;
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    Ok(TTestResult {
        t,
        df,
        p_value: (2.0 * dist.cdf(-t.abs())).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates all 2^n sign patterns of the observed ranks.
    fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
        let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
        let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
        let n = ranks.len();
        let total: f64 = ranks.iter().sum();
        let wp: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
        let t = wp.min(total - wp);
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if w <= t + 1e-9 {
                hits += 1;
            }
        }
        (2.0 * hits as f64 / (1u64 << n) as f64).min(1.0)
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn spearman_closed_forms() {
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(spearman_rho(&[1.0, 2.0], &[1.0]), Err(StatsError::LengthMismatch(2, 1)));
        assert_eq!(spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::Constant));
        assert!(matches!(spearman_rho(&[1.0], &[1.0]), Err(StatsError::TooFew { .. })));
    }

    #[test]
    fn wilcoxon_all_positive_ten() {
        let b: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let a: Vec<f64> = b.iter().enumerate().map(|(i, x)| x + 1.0 + i as f64 * 0.5).collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.w_plus, 55.0);
        // only the all-positive and all-negative patterns are as extreme
        assert_eq!(r.p_value, 2.0 / 1024.0);
        assert!(r.significant(0.05));
    }

    #[test]
    fn wilcoxon_matches_enumeration_with_ties_and_zeros() {
        let a = [1.0, 2.0, 3.5, 4.0, 5.0, 6.0, 2.0, 9.0, 1.0, 7.0, 3.0, 8.0];
        let b = [2.0, 2.0, 3.0, 5.0, 3.0, 4.0, 4.0, 8.5, 1.5, 7.0, 6.0, 7.5];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.n_used, 10);
        assert!(r.exact);
        assert!((r.p_value - brute_force_p(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn wilcoxon_degenerate_and_short() {
        let a = [1.0; 8];
        assert_eq!(wilcoxon_signed_rank(&a, &a), Err(StatsError::Degenerate));
        assert!(matches!(
            wilcoxon_signed_rank(&a[..5], &a[..5]),
            Err(StatsError::TooFew { .. })
        ));
    }

    #[test]
    fn wilcoxon_normal_branch_is_close_to_exact() {
        let a: Vec<f64> = (0..60).map(|i| ((i * 37) % 23) as f64 + 0.3).collect();
        let b: Vec<f64> = (0..60).map(|i| ((i * 11) % 19) as f64).collect();
        let approx = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(!approx.exact);
        let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
        let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
        let exact = (2.0 * exact_lower_tail(&ranks, approx.statistic)).min(1.0);
        assert!((approx.p_value - exact).abs() < 0.02, "{} vs {exact}", approx.p_value);
    }

    #[test]
    fn t_test() {
        let a = [5.1, 4.9, 5.6, 5.8, 6.0, 5.2];
        let b = [4.8, 4.7, 5.0, 5.1, 5.5, 5.0];
        let r = paired_t_test(&a, &b).unwrap();
        // diffs 0.3 0.2 0.6 0.7 0.5 0.2: mean 0.41667, sd 0.21370
        assert!((r.t - 4.7759).abs() < 1e-3);
        assert_eq!(r.df, 5.0);
        assert!(r.p_value < 0.01 && r.p_value > 0.001);
        assert_eq!(paired_t_test(&a, &a), Err(StatsError::Degenerate));
    }

    #[test]
    fn std_and_mean() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(sample_std(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(sample_std(&[4.0]), 0.0);
    }
}
