//! Monte Carlo estimates, confidence intervals and comparison reports.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{domain, Result};
use crate::exec::{fold_replicas, Execution};
use crate::rng::RngSeed;

/// Default confidence level.
pub const DEFAULT_CI_LEVEL: f64 = 0.99;
/// Two-sided level of a ±3σ normal interval.
pub const THREE_SIGMA_LEVEL: f64 = 0.997_300_203_936_739_8;
/// Minimum number of samples accepted by [`mc_estimate`].
pub const MIN_SAMPLES: u64 = 100;
/// Below this many successes or failures the binomial interval is exact.
const EXACT_BINOMIAL_BELOW: u64 = 30;

/// Standard normal quantile `z` with `P[|Z| ≤ z] = level`.
pub fn z_for_level(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + level / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub ci_level: f64,
    /// Systematic error bound added to every tolerance.
    pub bias_bound: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Whether the interval is the exact (Clopper–Pearson) binomial one.
    pub exact_interval: bool,
}

impl Estimate {
    /// Binomial proportion `successes / n`. The interval is the normal one,
    /// or Clopper–Pearson when there are fewer than 30 successes or failures.
    pub fn binomial(successes: u64, n: u64, ci_level: f64) -> Result<Self> {
        if n == 0 || successes > n {
            return domain(format!("invalid binomial counts {successes}/{n}"));
        }
        check_level(ci_level)?;
        let nf = n as f64;
        let mean = successes as f64 / nf;
        let stderr = (mean * (1.0 - mean) / nf).sqrt();
        let failures = n - successes;
        let (ci_low, ci_high, exact) = if successes < EXACT_BINOMIAL_BELOW || failures < EXACT_BINOMIAL_BELOW {
            let (lo, hi) = clopper_pearson(successes, n, ci_level);
            (lo, hi, true)
        } else {
            let h = z_for_level(ci_level) * stderr;
            (mean - h, mean + h, false)
        };
        Ok(Self {
            mean,
            stderr,
            n_samples: n,
            ci_level,
            bias_bound: 0.0,
            ci_low,
            ci_high,
            exact_interval: exact,
        })
    }

    /// Sample mean of real-valued observations with a normal interval.
    pub fn from_samples(values: &[f64], ci_level: f64) -> Result<Self> {
        check_level(ci_level)?;
        if values.len() < 2 {
            return domain("need at least two samples");
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(Self::normal(mean, (var / n).sqrt(), values.len() as u64, ci_level))
    }

    /// Estimate with a given mean and standard error.
    pub fn normal(mean: f64, stderr: f64, n_samples: u64, ci_level: f64) -> Self {
        let h = z_for_level(ci_level) * stderr;
        Self {
            mean,
            stderr,
            n_samples,
            ci_level,
            bias_bound: 0.0,
            ci_low: mean - h,
            ci_high: mean + h,
            exact_interval: false,
        }
    }

    pub fn with_bias(mut self, bias_bound: f64) -> Self {
        self.bias_bound = bias_bound.max(0.0);
        self
    }

    /// Re-expresses the interval at another confidence level.
    pub fn at_level(&self, ci_level: f64) -> Result<Self> {
        let mut e = if self.exact_interval {
            let k = (self.mean * self.n_samples as f64).round() as u64;
            Self::binomial(k, self.n_samples, ci_level)?
        } else {
            Self::normal(self.mean, self.stderr, self.n_samples, ci_level)
        };
        e.bias_bound = self.bias_bound;
        Ok(e)
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return domain(format!("confidence level must lie in (0, 1), got {level}"));
    }
    Ok(())
}

fn clopper_pearson(k: u64, n: u64, level: f64) -> (f64, f64) {
    let tail = (1.0 - level) / 2.0;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0).unwrap().inverse_cdf(tail)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf).unwrap().inverse_cdf(1.0 - tail)
    };
    (lo, hi)
}

/// Proportion of `n_samples` draws of `event` that are true. Draw `i` uses
/// the stream `seed.child(i)`, so the result depends only on
/// `(event, n_samples, seed)`.
pub fn mc_estimate<F>(event: F, n_samples: u64, seed: RngSeed, exec: Execution) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync + Send,
{
    if n_samples < MIN_SAMPLES {
        return domain(format!("need at least {MIN_SAMPLES} samples, got {n_samples}"));
    }
    let hits = fold_replicas(
        n_samples,
        exec,
        || 0u64,
        |acc, i| *acc += event(&mut seed.child(i).rng()) as u64,
        |a, b| a + b,
    );
    Estimate::binomial(hits, n_samples, DEFAULT_CI_LEVEL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub name: String,
    pub predicted: f64,
    pub estimate: Estimate,
    pub slack: f64,
    pub verdict: Verdict,
    pub tolerance_policy: String,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Compares `predicted` with the estimate's interval widened by the bias
/// bound and `slack`. A match is reported inconclusive when the interval
/// is narrower than 10% of the slack, i.e. when agreement is owed to the
/// slack rather than to the data.
pub fn compare(name: &str, predicted: f64, estimate: Estimate, slack: f64) -> ComparisonReport {
    let slack = slack.max(0.0);
    let pad = estimate.bias_bound + slack;
    let inside = predicted >= estimate.ci_low - pad && predicted <= estimate.ci_high + pad;
    let verdict = if !inside || !predicted.is_finite() || !estimate.mean.is_finite() {
        Verdict::Fail
    } else if slack > 0.0 && estimate.ci_width() < 0.1 * slack {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let interval = if estimate.exact_interval {
        "Clopper-Pearson"
    } else {
        "normal"
    };
    ComparisonReport {
        name: name.to_string(),
        predicted,
        estimate,
        slack,
        verdict,
        tolerance_policy: format!(
            "{interval} {:.4}% interval + bias {:.3e} + slack {:.3e}",
            estimate.ci_level * 100.0,
            estimate.bias_bound,
            slack
        ),
    }
}

/// Least-squares slope of `ln value` against `ln r`.
pub fn loglog_slope(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return domain(format!("need at least 3 points, got {}", pairs.len()));
    }
    if let Some((r, v)) = pairs.iter().find(|(r, v)| !(*r > 0.0) || !(*v > 0.0)) {
        return domain(format!("log-log fit needs positive data, got ({r}, {v})"));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|(r, v)| (r.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("all radii coincide");
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// Two-sided p-value of the paired z-test on the mean of `diffs`.
pub fn paired_z_test(diffs: &[f64]) -> Result<(f64, f64)> {
    if diffs.len() < 2 {
        return domain("need at least two paired observations");
    }
    let e = Estimate::from_samples(diffs, DEFAULT_CI_LEVEL)?;
    if e.stderr == 0.0 {
        return Ok((0.0, if e.mean == 0.0 { 1.0 } else { 0.0 }));
    }
    let z = e.mean / e.stderr;
    let p = 2.0 * (1.0 - Normal::standard().cdf(z.abs()));
    Ok((z, p))
}
