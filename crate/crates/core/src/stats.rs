//! One-way ANOVA with F-distribution p-values, and box-plot summaries.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

const CF_TOLERANCE: f64 = 1e-12;
const CF_MAX_ITERATIONS: usize = 500;
const TINY: f64 = 1e-300;

/// Lanczos approximation (g = 7, 9 terms) of `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let clamp = |v: f64| if v.abs() < TINY { TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITERATIONS {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        let delta = d * c;
        h *= delta;

        if (delta - 1.0).abs() < CF_TOLERANCE {
            return Ok(h);
        }
    }
    Err(Error::Numeric(format!(
        "incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )))
}

/// Regularized incomplete beta `I_x(a, b)`, given both `x` and `y = 1 - x`
/// so callers can avoid cancellation near 1.
fn regularized_beta(x: f64, y: f64, a: f64, b: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if y <= 0.0 {
        return Ok(1.0);
    }
    let front = (a * x.ln() + b * y.ln() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_continued_fraction(a, b, x)? / a)
    } else {
        Ok(1.0 - front * beta_continued_fraction(b, a, y)? / b)
    }
}

fn check_f_args(f: f64, d1: u32, d2: u32) -> Result<()> {
    if f.is_nan() || f < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "F statistic {f} must be ≥ 0"
        )));
    }
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "degrees of freedom ({d1}, {d2}) must be ≥ 1"
        )));
    }
    Ok(())
}

/// `P(X ≤ f)` for `X ~ F(d1, d2)`.
pub fn f_cdf(f: f64, d1: u32, d2: u32) -> Result<f64> {
    check_f_args(f, d1, d2)?;
    if f == f64::INFINITY {
        return Ok(1.0);
    }
    let (d1, d2) = (f64::from(d1), f64::from(d2));
    let denom = d1 * f + d2;
    regularized_beta(d1 * f / denom, d2 / denom, d1 / 2.0, d2 / 2.0)
}

/// Upper tail `P(X > f)`, evaluated directly rather than as `1 - cdf`.
pub fn f_sf(f: f64, d1: u32, d2: u32) -> Result<f64> {
    check_f_args(f, d1, d2)?;
    if f == f64::INFINITY {
        return Ok(0.0);
    }
    let (d1, d2) = (f64::from(d1), f64::from(d2));
    let denom = d1 * f + d2;
    regularized_beta(d2 / denom, d1 * f / denom, d2 / 2.0, d1 / 2.0)
}

/// Values of a numeric measure grouped by class label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupedSample {
    groups: BTreeMap<String, Vec<f64>>,
}

impl GroupedSample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, label: impl Into<String>, value: f64) {
        self.groups.entry(label.into()).or_default().push(value);
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.groups
    }

    /// Drops groups with fewer than `min` values.
    pub fn retain_min_size(&mut self, min: usize) {
        self.groups.retain(|_, v| v.len() >= min);
    }

    pub fn total_len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "ANOVA needs at least 2 groups, got {}",
                self.groups.len()
            )));
        }
        for (label, values) in &self.groups {
            if values.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "group {label:?} has {} value(s), need at least 2",
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "group {label:?} contains a non-finite value"
                )));
            }
        }
        Ok(())
    }
}

impl<S: Into<String>> FromIterator<(S, Vec<f64>)> for GroupedSample {
    fn from_iter<I: IntoIterator<Item = (S, Vec<f64>)>>(iter: I) -> Self {
        let mut sample = GroupedSample::new();
        for (label, values) in iter {
            sample
                .groups
                .entry(label.into())
                .or_default()
                .extend(values);
        }
        sample
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaResult {
    /// `+inf` when all within-group variance is zero.
    pub f_stat: f64,
    pub df_between: u32,
    pub df_within: u32,
    pub p_value: f64,
    pub ss_between: f64,
    pub ss_within: f64,
    pub group_means: BTreeMap<String, f64>,
    pub grand_mean: f64,
    pub n: usize,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn one_way_anova(sample: &GroupedSample) -> Result<AnovaResult> {
    sample.validate()?;
    let n = sample.total_len();
    let k = sample.groups.len();
    let grand_mean = sample.groups.values().flatten().sum::<f64>() / n as f64;

    let mut group_means = BTreeMap::new();
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for (label, values) in &sample.groups {
        let m = mean(values);
        ss_between += values.len() as f64 * (m - grand_mean).powi(2);
        ss_within += values.iter().map(|x| (x - m).powi(2)).sum::<f64>();
        group_means.insert(label.clone(), m);
    }

    let df_between = (k - 1) as u32;
    let df_within = (n - k) as u32;
    let (f_stat, p_value) = if ss_within == 0.0 {
        if ss_between == 0.0 {
            return Err(Error::DegenerateSample("all values are identical".into()));
        }
        (f64::INFINITY, 0.0)
    } else {
        let f = (ss_between / f64::from(df_between)) / (ss_within / f64::from(df_within));
        (f, f_sf(f, df_between, df_within)?)
    };

    Ok(AnovaResult {
        f_stat,
        df_between,
        df_within,
        p_value,
        ss_between,
        ss_within,
        group_means,
        grand_mean,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Five-number summary with inclusive linear-interpolation quartiles.
pub fn group_summary(values: &[f64]) -> Result<GroupSummary> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("summary of an empty group".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "summary of non-finite values".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantile = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    };
    Ok(GroupSummary {
        n: sorted.len(),
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[sorted.len() - 1],
        mean: mean(&sorted),
    })
}
