//! Pooled-variance two-sample Student t test.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::dist::{student, DegreesOfFreedom, NonCentrality};
use crate::error::{FprError, Result};
use crate::fpr::{power_at, CONVENTIONAL_ALPHA};

/// Observations from one group, at least two, all finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::named("sample", values)
    }

    fn named(group: &'static str, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(FprError::SampleTooSmall {
                group,
                len: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(FprError::NonFinite {
                name: "observation",
                value: bad,
            });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// Sum of squared deviations from the mean.
    fn sum_sq(&self) -> f64 {
        let m = self.mean();
        self.0.iter().map(|v| (v - m) * (v - m)).sum()
    }

    /// Sample standard deviation (n - 1 denominator).
    pub fn sd(&self) -> f64 {
        (self.sum_sq() / (self.0.len() - 1) as f64).sqrt()
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = FprError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Vec<f64> {
        s.0
    }
}

/// Everything a two-sample t test reports. The effect is `mean_b - mean_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSummary {
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub sd_a: f64,
    pub sd_b: f64,
    pub pooled_sd: f64,
    /// Difference between means, in response units.
    pub effect_size: f64,
    /// Standard error of the difference.
    pub se_effect: f64,
    /// Effect over the pooled SD.
    pub effect_size_normalized: f64,
    pub df: f64,
    pub t_value: f64,
    pub p_two_sided: f64,
    /// Power at alpha = 0.05 taking the observed normalized effect as true.
    pub post_hoc_power: f64,
}

impl TestSummary {
    /// Per-group size for a single-`n` design. Unequal groups use the
    /// harmonic mean, which preserves the noncentrality parameter.
    pub fn design_n(&self) -> f64 {
        2.0 / (1.0 / self.n_a as f64 + 1.0 / self.n_b as f64)
    }
}

/// Two-sided two-sample t test with a pooled variance estimate.
pub fn two_sample_t(a: &Sample, b: &Sample) -> Result<TestSummary> {
    let (n_a, n_b) = (a.len(), b.len());
    let df = (n_a + n_b - 2) as f64;
    let pooled_sd = ((a.sum_sq() + b.sum_sq()) / df).sqrt();
    if pooled_sd == 0.0 {
        return Err(FprError::DegenerateData);
    }
    let (mean_a, mean_b) = (a.mean(), b.mean());
    let effect_size = mean_b - mean_a;
    let inv_n = 1.0 / n_a as f64 + 1.0 / n_b as f64;
    let se_effect = pooled_sd * inv_n.sqrt();
    let t_value = effect_size / se_effect;
    let p_two_sided = (2.0 * student::sf(t_value.abs(), df)).min(1.0);
    let effect_size_normalized = effect_size / pooled_sd;

    let post_hoc_power = power_at(
        DegreesOfFreedom::new(df)?,
        NonCentrality::new(effect_size_normalized.abs() / inv_n.sqrt())?,
        CONVENTIONAL_ALPHA,
    )?;

    Ok(TestSummary {
        n_a,
        n_b,
        mean_a,
        mean_b,
        sd_a: a.sd(),
        sd_b: b.sd(),
        pooled_sd,
        effect_size,
        se_effect,
        effect_size_normalized,
        df,
        t_value,
        p_two_sided,
        post_hoc_power,
    })
}

/// Reads two groups from CSV with header `group,value` and labels `A`/`B`.
pub fn read_groups_csv<R: Read>(reader: R) -> Result<(Sample, Sample)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| FprError::InvalidInput(format!("cannot read CSV header: {e}")))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(g_col), Some(v_col)) = (col("group"), col("value")) else {
        return Err(FprError::InvalidInput(format!(
            "header must contain 'group' and 'value' columns, found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    };

    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, record) in rdr.records().enumerate() {
        // Row 1 is the header.
        let row = i + 2;
        let record = record.map_err(|e| FprError::InvalidInput(format!("row {row}: {e}")))?;
        let label = record.get(g_col).unwrap_or("");
        let raw = record.get(v_col).unwrap_or("");
        let value: f64 = raw.parse().map_err(|_| {
            FprError::InvalidInput(format!(
                "row {row}, column {} (value): cannot parse '{raw}' as a number",
                v_col + 1
            ))
        })?;
        if !value.is_finite() {
            return Err(FprError::InvalidInput(format!(
                "row {row}, column {} (value): '{raw}' is not finite",
                v_col + 1
            )));
        }
        match label.to_ascii_uppercase().as_str() {
            "A" => a.push(value),
            "B" => b.push(value),
            _ => {
                return Err(FprError::InvalidInput(format!(
                    "row {row}, column {} (group): expected label A or B, found '{label}'",
                    g_col + 1
                )))
            }
        }
    }
    if a.is_empty() || b.is_empty() {
        return Err(FprError::InvalidInput(format!(
            "need exactly two groups (A and B); found A: {} rows, B: {} rows",
            a.len(),
            b.len()
        )));
    }
    Ok((Sample::named("A", a)?, Sample::named("B", b)?))
}
