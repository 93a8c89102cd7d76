//! Confidence intervals and goodness-of-fit statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Binomial proportion with a two-sided Clopper–Pearson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub hits: u64,
    pub trials: u64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub confidence: f64,
}

impl Estimate {
    pub fn new(hits: u64, trials: u64, confidence: f64) -> Self {
        let (lo, hi) = clopper_pearson(hits, trials, confidence);
        Estimate {
            hits,
            trials,
            value: if trials == 0 { f64::NAN } else { hits as f64 / trials as f64 },
            lo,
            hi,
            confidence,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

pub const CONFIDENCE: f64 = 0.99;

pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let a = 1.0 - confidence;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0).unwrap().inverse_cdf(a / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf).unwrap().inverse_cdf(1.0 - a / 2.0)
    };
    (lo, hi)
}

/// Kolmogorov–Smirnov statistic of `samples` against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let f = cdf(x);
        acc.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample KS statistic.
pub fn ks_two_sample_pvalue(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sq = ne.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    kolmogorov_q(lambda)
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let jf = j as f64;
        let term = 2.0 * (-1f64).powi(j - 1) * (-2.0 * jf * jf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Pearson chi-square test of `counts` against equal cell probabilities.
/// Returns `(statistic, p_value)`.
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    if counts.len() < 2 {
        return Err(Error::InvalidInput("chi-square needs at least two cells".into()));
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let chi = ChiSquared::new((counts.len() - 1) as f64).unwrap();
    Ok((stat, 1.0 - chi.cdf(stat)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub slope_stderr: f64,
}

/// Weighted least squares; pass unit weights for the ordinary fit.
pub fn linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() != w.len() || x.len() < 3 {
        return Err(Error::InvalidInput("regression needs ≥ 3 aligned points".into()));
    }
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxx += w[i] * (x[i] - mx).powi(2);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        syy += w[i] * (y[i] - my).powi(2);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = (0..x.len())
        .map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2))
        .sum();
    let dof = (x.len() - 2) as f64;
    Ok(LinearFit {
        slope,
        intercept,
        r2: if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 },
        slope_stderr: (ss_res / dof / sxx).sqrt(),
    })
}

pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_known_values() {
        // 0 of 10 at 95%: upper = 1 − 0.025^{1/10}.
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-12);
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-12);
        assert_eq!(hi, 1.0);
        let e = Estimate::new(50, 100, 0.99);
        assert!(e.contains(0.5) && e.lo > 0.36 && e.hi < 0.64);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!(ks_statistic(&xs, |x| x) <= 0.5 / n as f64 + 1e-12);
        assert_eq!(ks_two_sample(&xs, &xs), 0.0);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.1).collect();
        assert!((ks_two_sample(&xs, &shifted) - 0.1).abs() < 2e-3);
    }

    #[test]
    fn chi_square_flags_skew() {
        let (_, p) = chi_square_uniform(&[500, 500]).unwrap();
        assert!(p > 0.99);
        let (_, p) = chi_square_uniform(&[600, 400]).unwrap();
        assert!(p < 1e-6);
    }

    #[test]
    fn regression_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&x, &y, &[1.0; 4]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!((f.r2 - 1.0).abs() < 1e-14);
    }
}
