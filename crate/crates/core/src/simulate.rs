//! Monte Carlo check on the analytic results: repeated two-sample t tests
//! on normal data under the null and under the alternative.
//!
//! Replicates are split into fixed-size blocks. Each (block, hypothesis)
//! pair reads its own ChaCha8 stream keyed by the seed, so results do not
//! depend on how blocks are scheduled across threads.
//!
//! p-values are never computed per replicate: every threshold is mapped to
//! a critical |t| once and replicates are classified by comparing |t|.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{normal, student};
use crate::error::{finite, open_unit, FprError, Result};
use crate::fpr::StudyDesign;

/// Replicates per block (and per RNG stream).
const BLOCK: u64 = 1 << 14;
/// Minimum null-hypothesis band count for an empirical likelihood ratio.
pub const MIN_BAND_COUNT: u64 = 100;
/// Equal-width p histogram bins.
pub const HISTOGRAM_BINS: usize = 20;

pub const DEFAULT_THRESHOLDS: [f64; 4] = [0.001, 0.005, 0.01, 0.05];
pub const DEFAULT_BAND_CENTER: f64 = 0.05;
pub const DEFAULT_BAND_HALF_WIDTH: f64 = 0.0025;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_per_group: u32,
    /// True difference in means under H1, in SDs. Zero makes the H1 run an
    /// independent second null run.
    pub effect_size: f64,
    pub n_sims: u64,
    pub seed: u64,
    pub band_center: f64,
    pub band_half_width: f64,
    pub thresholds: Vec<f64>,
}

impl SimConfig {
    pub fn new(n_per_group: u32, effect_size: f64, n_sims: u64, seed: u64) -> Self {
        Self {
            n_per_group,
            effect_size,
            n_sims,
            seed,
            band_center: DEFAULT_BAND_CENTER,
            band_half_width: DEFAULT_BAND_HALF_WIDTH,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
        }
    }

    /// Config for an analytic design; `n` must be a whole number.
    pub fn for_design(design: &StudyDesign, n_sims: u64, seed: u64) -> Result<Self> {
        let n = design.n_per_group();
        if n.fract() != 0.0 || n > u32::MAX as f64 {
            return Err(FprError::InvalidInput(format!(
                "simulation needs a whole number per group, got {n}"
            )));
        }
        Ok(Self::new(n as u32, design.effect_size(), n_sims, seed))
    }

    pub fn with_band(mut self, center: f64, half_width: f64) -> Self {
        self.band_center = center;
        self.band_half_width = half_width;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_group < 2 {
            return Err(FprError::out_of_range(
                "n_per_group",
                self.n_per_group as f64,
                "[2, inf)",
            ));
        }
        finite("effect_size", self.effect_size)?;
        if self.effect_size < 0.0 {
            return Err(FprError::out_of_range("effect_size", self.effect_size, "[0, inf)"));
        }
        if self.n_sims == 0 {
            return Err(FprError::out_of_range("n_sims", 0.0, "[1, inf)"));
        }
        open_unit("band_center", self.band_center)?;
        finite("band_half_width", self.band_half_width)?;
        if self.band_half_width <= 0.0 {
            return Err(FprError::out_of_range(
                "band_half_width",
                self.band_half_width,
                "(0, inf)",
            ));
        }
        let (lo, hi) = self.band();
        if lo <= 0.0 || hi >= 1.0 {
            return Err(FprError::InvalidInput(format!(
                "band {lo}..{hi} must lie inside (0, 1)"
            )));
        }
        for &t in &self.thresholds {
            open_unit("threshold", t)?;
        }
        Ok(())
    }

    pub fn band(&self) -> (f64, f64) {
        (
            self.band_center - self.band_half_width,
            self.band_center + self.band_half_width,
        )
    }

    fn df(&self) -> f64 {
        2.0 * (self.n_per_group as f64 - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    H0,
    H1,
}

/// Fraction of p-values below a threshold with binomial standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFraction {
    pub threshold: f64,
    pub h0: f64,
    pub h0_se: f64,
    pub h1: f64,
    pub h1_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PHistogram {
    /// `HISTOGRAM_BINS + 1` edges from 0 to 1.
    pub edges: Vec<f64>,
    pub h0: Vec<u64>,
    pub h1: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub frac_below: Vec<ThresholdFraction>,
    pub band_h0: u64,
    pub band_h1: u64,
    /// H1 band rate over H0 band rate; `None` when either count is zero.
    pub empirical_lr: Option<f64>,
    /// Delta-method standard error of `ln(empirical_lr)`.
    pub empirical_lr_log_se: Option<f64>,
    pub histogram: PHistogram,
}

impl SimResult {
    pub fn fraction(&self, threshold: f64) -> Option<&ThresholdFraction> {
        self.frac_below.iter().find(|f| f.threshold == threshold)
    }
}

/// Per-hypothesis tallies; merged by summing.
#[derive(Debug, Clone, Default)]
struct Tally {
    below: Vec<u64>,
    band: u64,
    bins: Vec<u64>,
}

impl Tally {
    fn zero(thresholds: usize) -> Self {
        Self {
            below: vec![0; thresholds],
            band: 0,
            bins: vec![0; HISTOGRAM_BINS],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.below.iter_mut().zip(&other.below) {
            *a += b;
        }
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.band += other.band;
        self
    }
}

/// Critical |t| values for each p threshold; `p < thr` iff `|t| > crit`.
struct Cutoffs {
    thresholds: Vec<f64>,
    band_lo_t: f64,
    band_hi_t: f64,
    /// |t| at the p edges 1/B, 2/B, ..., (B-1)/B.
    bin_t: Vec<f64>,
}

impl Cutoffs {
    fn new(cfg: &SimConfig) -> Self {
        let df = cfg.df();
        let crit = |p: f64| student::isf(0.5 * p, df);
        let (lo, hi) = cfg.band();
        Self {
            thresholds: cfg.thresholds.iter().map(|&p| crit(p)).collect(),
            // p in [lo, hi)  <=>  crit(hi) < |t| <= crit(lo)
            band_lo_t: crit(hi),
            band_hi_t: crit(lo),
            bin_t: (1..HISTOGRAM_BINS)
                .map(|k| crit(k as f64 / HISTOGRAM_BINS as f64))
                .collect(),
        }
    }

    fn record(&self, tally: &mut Tally, abs_t: f64) {
        for (count, &c) in tally.below.iter_mut().zip(&self.thresholds) {
            if abs_t > c {
                *count += 1;
            }
        }
        if abs_t > self.band_lo_t && abs_t <= self.band_hi_t {
            tally.band += 1;
        }
        // Edges are decreasing in |t|; the count of edges at or above |t| is
        // the bin index, since p >= k/B iff |t| <= crit(k/B).
        let above = self.bin_t.iter().take_while(|&&c| abs_t <= c).count();
        tally.bins[above] += 1;
    }
}

fn stream(seed: u64, block: u64, hyp: Hypothesis) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block << 1 | matches!(hyp, Hypothesis::H1) as u64);
    rng
}

/// Standard normal by inversion of a uniform on (0, 1) built from the top
/// 53 bits.
fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    normal::quantile(u)
}

/// Draws one pair of groups and returns the pooled two-sample t statistic.
fn one_t(rng: &mut ChaCha8Rng, n: usize, shift: f64, buf: &mut [f64]) -> f64 {
    let mut group = |offset: f64| -> (f64, f64) {
        for x in buf.iter_mut() {
            *x = std_normal(rng) + offset;
        }
        let mean = buf.iter().sum::<f64>() / n as f64;
        let ss = buf.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
        (mean, ss)
    };
    let (ma, ssa) = group(0.0);
    let (mb, ssb) = group(shift);
    let df = 2.0 * (n as f64 - 1.0);
    let sp = ((ssa + ssb) / df).sqrt();
    (mb - ma) / (sp * (2.0 / n as f64).sqrt())
}

fn run_block(cfg: &SimConfig, cut: &Cutoffs, block: u64, hyp: Hypothesis) -> Tally {
    let start = block * BLOCK;
    let count = BLOCK.min(cfg.n_sims - start);
    let n = cfg.n_per_group as usize;
    let shift = match hyp {
        Hypothesis::H0 => 0.0,
        Hypothesis::H1 => cfg.effect_size,
    };
    let mut rng = stream(cfg.seed, block, hyp);
    let mut buf = vec![0.0; n];
    let mut tally = Tally::zero(cut.thresholds.len());
    for _ in 0..count {
        cut.record(&mut tally, one_t(&mut rng, n, shift, &mut buf).abs());
    }
    tally
}

fn run(cfg: &SimConfig, cut: &Cutoffs, hyp: Hypothesis) -> Tally {
    let blocks = cfg.n_sims.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| run_block(cfg, cut, b, hyp))
        .reduce(|| Tally::zero(cut.thresholds.len()), Tally::merge)
}

fn binomial_se(frac: f64, n: u64) -> f64 {
    (frac * (1.0 - frac) / n as f64).sqrt()
}

/// Runs `n_sims` replicates under each hypothesis.
pub fn simulate(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let cut = Cutoffs::new(config);
    let h0 = run(config, &cut, Hypothesis::H0);
    let h1 = run(config, &cut, Hypothesis::H1);
    let n = config.n_sims;

    let frac_below = config
        .thresholds
        .iter()
        .enumerate()
        .map(|(i, &threshold)| {
            let f0 = h0.below[i] as f64 / n as f64;
            let f1 = h1.below[i] as f64 / n as f64;
            ThresholdFraction {
                threshold,
                h0: f0,
                h0_se: binomial_se(f0, n),
                h1: f1,
                h1_se: binomial_se(f1, n),
            }
        })
        .collect();

    let (empirical_lr, empirical_lr_log_se) = if h0.band > 0 && h1.band > 0 {
        let (c0, c1) = (h0.band as f64, h1.band as f64);
        let (p0, p1) = (c0 / n as f64, c1 / n as f64);
        let se = ((1.0 - p1) / c1 + (1.0 - p0) / c0).sqrt();
        (Some(c1 / c0), Some(se))
    } else {
        (None, None)
    };

    let histogram = PHistogram {
        edges: (0..=HISTOGRAM_BINS)
            .map(|k| k as f64 / HISTOGRAM_BINS as f64)
            .collect(),
        h0: h0.bins,
        h1: h1.bins,
    };

    Ok(SimResult {
        config: config.clone(),
        frac_below,
        band_h0: h0.band,
        band_h1: h1.band,
        empirical_lr,
        empirical_lr_log_se,
        histogram,
    })
}

/// Ratio of H1 to H0 rates of p falling in the configured band around
/// `band_center`; tends to the p-equals likelihood ratio as the band
/// narrows.
pub fn empirical_lr_p_equals(config: &SimConfig) -> Result<f64> {
    let result = simulate(config)?;
    if result.band_h0 < MIN_BAND_COUNT {
        return Err(FprError::LowStatistics {
            observed: result.band_h0,
            required: MIN_BAND_COUNT,
        });
    }
    result.empirical_lr.ok_or(FprError::LowStatistics {
        observed: result.band_h1,
        required: 1,
    })
}

/// Two-sided p-values of the first `count` replicates under `hyp`, drawn
/// from the same streams as [`simulate`]. Meant for distribution checks.
pub fn p_values(config: &SimConfig, hyp: Hypothesis, count: u64) -> Result<Vec<f64>> {
    config.validate()?;
    let n = config.n_per_group as usize;
    let df = config.df();
    let shift = match hyp {
        Hypothesis::H0 => 0.0,
        Hypothesis::H1 => config.effect_size,
    };
    let mut out = Vec::with_capacity(count as usize);
    let mut buf = vec![0.0; n];
    let mut block = 0;
    while (out.len() as u64) < count {
        let mut rng = stream(config.seed, block, hyp);
        let take = BLOCK.min(count - out.len() as u64);
        for _ in 0..take {
            let t = one_t(&mut rng, n, shift, &mut buf);
            out.push((2.0 * student::sf(t.abs(), df)).min(1.0));
        }
        block += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = SimConfig::new(16, 1.0, 10, 1);
        assert!(ok.validate().is_ok());
        assert!(SimConfig::new(1, 1.0, 10, 1).validate().is_err());
        assert!(SimConfig::new(16, -1.0, 10, 1).validate().is_err());
        assert!(SimConfig::new(16, 1.0, 0, 1).validate().is_err());
        assert!(ok.clone().with_band(0.01, 0.02).validate().is_err());
        assert!(ok.clone().with_band(0.05, 0.0).validate().is_err());
        let d = StudyDesign::with_continuous_n(7.5, 1.0).unwrap();
        assert!(SimConfig::for_design(&d, 10, 1).is_err());
    }

    #[test]
    fn histogram_matches_p_values() {
        let cfg = SimConfig::new(8, 0.7, 3000, 9);
        let res = simulate(&cfg).unwrap();
        for (hyp, hist) in [(Hypothesis::H0, &res.histogram.h0), (Hypothesis::H1, &res.histogram.h1)] {
            let ps = p_values(&cfg, hyp, cfg.n_sims).unwrap();
            let mut expect = vec![0u64; HISTOGRAM_BINS];
            for p in &ps {
                let k = ((p * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
                expect[k] += 1;
            }
            // Values within rounding of an edge may land either side.
            let diff: u64 = expect.iter().zip(hist).map(|(a, b)| a.abs_diff(*b)).sum();
            assert!(diff <= 2, "{hyp:?}: {expect:?} vs {hist:?}");
            for f in &res.frac_below {
                let below = ps.iter().filter(|&&p| p < f.threshold).count() as f64;
                let frac = if hyp == Hypothesis::H0 { f.h0 } else { f.h1 };
                assert!((below / cfg.n_sims as f64 - frac).abs() <= 1.0 / cfg.n_sims as f64);
            }
        }
    }

    #[test]
    fn low_statistics() {
        let cfg = SimConfig::new(8, 1.0, 200, 1);
        assert!(matches!(
            empirical_lr_p_equals(&cfg),
            Err(FprError::LowStatistics { .. })
        ));
    }
}
