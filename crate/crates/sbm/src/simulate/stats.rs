//! Small statistics helpers for the Monte Carlo engine: mergeable moment
//! accumulators, a two-sample Kolmogorov–Smirnov test, and Spearman rank
//! correlation.

use serde::Serialize;

/// Mergeable (sum, sum of squares, count) accumulator. Merging is
/// associative, which is what makes the parallel reductions deterministic:
/// per-chunk accumulators are combined in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    pub sum: f64,
    pub sum_sq: f64,
    pub count: u64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
    }

    pub fn merge(&mut self, other: &RunningStats) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean (sample standard deviation / √n).
    pub fn std_error(&self) -> f64 {
        let n = self.count as f64;
        let var = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }
}

/// A Monte Carlo estimate with its uncertainty.
#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
    /// Discretization-bias note: mean gap between the estimate at the
    /// requested step and at half the step, when a Richardson pair was run.
    pub bias: Option<f64>,
}

impl McEstimate {
    pub fn from_stats(stats: &RunningStats) -> Self {
        McEstimate {
            value: stats.mean(),
            std_error: stats.std_error(),
            n: stats.count,
            bias: None,
        }
    }
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> (f64, f64) {
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    // Kolmogorov distribution tail: Q(λ) = 2 Σ (-1)^{k-1} e^{-2k²λ²}
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1.0f64).powi(k as i32 - 1) * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

/// Spearman rank correlation of paired observations.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite"));
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    };
    let rx = rank(x);
    let ry = rank(y);
    let n = x.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..x.len() {
        num += (rx[i] - mx) * (ry[i] - mx);
        dx += (rx[i] - mx).powi(2);
        dy += (ry[i] - mx).powi(2);
    }
    num / (dx.sqrt() * dy.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_stats_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.77).sin()).collect();
        let mut whole = RunningStats::default();
        for &x in &xs {
            whole.push(x);
        }
        let mut a = RunningStats::default();
        let mut b = RunningStats::default();
        for &x in &xs[..300] {
            a.push(x);
        }
        for &x in &xs[300..] {
            b.push(x);
        }
        a.merge(&b);
        assert!((a.mean() - whole.mean()).abs() < 1e-14);
        assert!((a.std_error() - whole.std_error()).abs() < 1e-14);
    }

    #[test]
    fn ks_detects_shift_and_accepts_identity() {
        let mut a: Vec<f64> = (0..4000).map(|i| ((i as f64) * 0.13).fract()).collect();
        let mut b: Vec<f64> = (0..4000).map(|i| ((i as f64) * 0.31).fract()).collect();
        let (_, p) = ks_two_sample(&mut a, &mut b);
        assert!(p > 0.01, "same uniform law should not be rejected: p={p}");
        let mut c: Vec<f64> = (0..4000).map(|i| ((i as f64) * 0.13).fract() + 0.2).collect();
        let mut a2 = a.clone();
        let (_, p) = ks_two_sample(&mut a2, &mut c);
        assert!(p < 1e-6, "shifted law must be rejected: p={p}");
    }

    #[test]
    fn spearman_of_monotone_data_is_one() {
        let x = vec![0.05, 0.2, 1.0, 5.0];
        let y = vec![0.11, 0.35, 0.8, 0.99];
        assert!((spearman_rho(&x, &y) - 1.0).abs() < 1e-12);
        let y_rev: Vec<f64> = y.iter().rev().copied().collect();
        assert!((spearman_rho(&x, &y_rev) + 1.0).abs() < 1e-12);
    }
}
