//! Descriptive statistics and rank tests over per-comparison metrics.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsError {
    EmptySample,
    TooFewGroups,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::EmptySample => f.write_str("empty sample"),
            StatsError::TooFewGroups => f.write_str("at least two groups are required"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TestMethod {
    KruskalWallis,
    MannWhitney,
}

impl TestMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TestMethod::KruskalWallis => "kruskal-wallis",
            TestMethod::MannWhitney => "mann-whitney",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
    /// Ties were present and the statistic or variance was corrected.
    pub tie_corrected: bool,
    /// p from full enumeration rather than an asymptotic approximation.
    pub exact: bool,
}

/// Mean and sample standard deviation (`n - 1` denominator, 0 for a single
/// value).
pub fn descriptive_stats(values: &[f64]) -> Result<(f64, f64), StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, libm::sqrt(ss / (n - 1.0))))
}

/// Mid-ranks (1-based, ties share their average rank) and the sizes of the
/// tie groups.
pub fn mid_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

/// Kruskal-Wallis H with tie correction; p from the chi-squared tail with
/// `groups - 1` degrees of freedom.
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<TestResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups);
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(StatsError::EmptySample);
    }
    let all: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = all.len() as f64;
    let (ranks, ties) = mid_ranks(&all);

    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h_raw = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
    let correction = 1.0 - tie_sum(&ties) / (n * n * n - n);
    let tie_corrected = !ties.is_empty();
    if correction <= 0.0 {
        return Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
            method: TestMethod::KruskalWallis,
            tie_corrected,
            exact: false,
        });
    }
    let h = (h_raw / correction).max(0.0);
    let df = (groups.len() - 1) as f64;
    Ok(TestResult {
        statistic: h,
        p_value: chi_squared_sf(h, df),
        method: TestMethod::KruskalWallis,
        tie_corrected,
        exact: false,
    })
}

/// Exact enumeration is used up to this many `(x, y)` pairs.
pub const EXACT_PAIR_LIMIT: usize = 400;

/// Mann-Whitney U for `a`: `#{x > y} + ½·#{x = y}`, two-sided p.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (n, m) = (a.len(), b.len());
    let mut twice_u = 0usize;
    for x in a {
        for y in b {
            twice_u += match x.total_cmp(y) {
                core::cmp::Ordering::Greater => 2,
                core::cmp::Ordering::Equal => 1,
                core::cmp::Ordering::Less => 0,
            };
        }
    }
    let u = twice_u as f64 / 2.0;

    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = mid_ranks(&all);
    let tie_corrected = !ties.is_empty();

    if n * m <= EXACT_PAIR_LIMIT {
        let doubled: Vec<usize> = ranks.iter().map(|r| libm::round(r * 2.0) as usize).collect();
        let p = exact_two_sided(&doubled, n, m, twice_u);
        return Ok(TestResult {
            statistic: u,
            p_value: p,
            method: TestMethod::MannWhitney,
            tie_corrected,
            exact: true,
        });
    }

    let (nf, mf) = (n as f64, m as f64);
    let total = nf + mf;
    let mean = nf * mf / 2.0;
    let var = nf * mf / 12.0 * ((total + 1.0) - tie_sum(&ties) / (total * (total - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mean).abs() - 0.5).max(0.0) / libm::sqrt(var);
        libm::erfc(z / core::f64::consts::SQRT_2).min(1.0)
    };
    Ok(TestResult { statistic: u, p_value: p, method: TestMethod::MannWhitney, tie_corrected, exact: false })
}

/// Two-sided exact p over all ways to draw `n` of the pooled (doubled)
/// mid-ranks as the first group: the share of draws whose U is at least as
/// far from `nm/2` as the observed one.
fn exact_two_sided(doubled_ranks: &[usize], n: usize, m: usize, observed_twice_u: usize) -> f64 {
    // Work with the smaller group; |U - nm/2| is symmetric under the swap.
    let k = n.min(m);
    let max_sum: usize = {
        let mut sorted = doubled_ranks.to_vec();
        sorted.sort_unstable_by(|x, y| y.cmp(x));
        sorted[..k].iter().sum()
    };
    // counts[j][s]: ways to choose j items with doubled rank sum s.
    let mut counts = vec![vec![0u128; max_sum + 1]; k + 1];
    counts[0][0] = 1;
    for &r in doubled_ranks {
        for j in (1..=k).rev() {
            let (lower, upper) = counts.split_at_mut(j);
            let (prev, cur) = (&lower[j - 1], &mut upper[0]);
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    // Doubled U of the chosen group: 2U = D - k(k+1).
    let nm = (n * m) as i64;
    let observed_dev = (2 * observed_twice_u as i64 - nm * 2).abs();
    let base = (k * (k + 1)) as i64;
    let mut extreme = 0u128;
    let mut total = 0u128;
    for (d, &c) in counts[k].iter().enumerate() {
        if c == 0 {
            continue;
        }
        total += c;
        let twice_u = d as i64 - base;
        if (2 * twice_u - nm * 2).abs() >= observed_dev {
            extreme += c;
        }
    }
    (extreme as f64 / total as f64).min(1.0)
}

pub fn bonferroni(p: f64, comparisons: usize) -> f64 {
    (p * comparisons.max(1) as f64).min(1.0)
}

/// Upper tail of the chi-squared distribution.
pub fn chi_squared_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(df / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma `Q(a, x)`, by series below `a + 1`
/// and by Lentz's continued fraction above.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefix = a * libm::log(x) - x - libm::lgamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (1.0 - sum * libm::exp(log_prefix)).clamp(0.0, 1.0)
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (libm::exp(log_prefix) * h).clamp(0.0, 1.0)
    }
}
