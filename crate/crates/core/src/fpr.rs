//! Likelihood ratios, false positive risk and reverse Bayes.
//!
//! The alternative hypothesis is simple: a fixed true difference between two
//! group means of `effect_size` standard deviations, tested with a two-sided
//! pooled two-sample t test with `n_per_group` observations in each group.
//! The null is a point null (true difference exactly zero).
//!
//! The false positive risk is the posterior probability of the null given
//! the evidence, `FPR = 1 / (1 + L10 * prior / (1 - prior))`, where `prior`
//! is the prior probability of a real effect. A prior of 0.5 gives the
//! *minimum* FPR (mFPR), the largest prior one can defend without hard
//! evidence.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{noncentral, normal, student, DegreesOfFreedom, NonCentrality};
use crate::error::{finite, open_unit, FprError, Result};
use crate::solve::brent;

/// Significance level used for every reported power figure.
pub const CONVENTIONAL_ALPHA: f64 = 0.05;

/// The fixed simple alternative: per-group size and true normalized effect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyDesign {
    n_per_group: f64,
    effect_size: f64,
}

impl StudyDesign {
    /// Integer group size `n >= 2` and effect size in standard deviations.
    pub fn new(n_per_group: u32, effect_size: f64) -> Result<Self> {
        Self::with_continuous_n(n_per_group as f64, effect_size)
    }

    /// Same as [`new`](Self::new) with a real-valued `n`, as used when
    /// solving for the sample size that gives a fixed power.
    pub fn with_continuous_n(n_per_group: f64, effect_size: f64) -> Result<Self> {
        finite("n_per_group", n_per_group)?;
        finite("effect_size", effect_size)?;
        if n_per_group < 2.0 {
            return Err(FprError::out_of_range("n_per_group", n_per_group, "[2, inf)"));
        }
        if effect_size <= 0.0 {
            return Err(FprError::out_of_range("effect_size", effect_size, "(0, inf)"));
        }
        Ok(Self {
            n_per_group,
            effect_size,
        })
    }

    pub fn n_per_group(&self) -> f64 {
        self.n_per_group
    }

    pub fn effect_size(&self) -> f64 {
        self.effect_size
    }

    /// `2 (n - 1)`.
    pub fn df(&self) -> DegreesOfFreedom {
        DegreesOfFreedom::new(2.0 * (self.n_per_group - 1.0)).expect("n >= 2")
    }

    /// True effect over its standard error, `es / sqrt(2 / n)`.
    pub fn ncp(&self) -> NonCentrality {
        NonCentrality::new(self.effect_size / (2.0 / self.n_per_group).sqrt()).expect("finite")
    }

    /// Two-sided power at significance level `alpha`.
    pub fn power(&self, alpha: f64) -> Result<f64> {
        power_at(self.df(), self.ncp(), alpha)
    }
}

impl fmt::Display for StudyDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n = {} per group, effect size = {} SD", self.n_per_group, self.effect_size)
    }
}

/// Two-sided power of a t test with the given df and noncentrality:
/// `P(|T| > t_crit)` counting both tails of the noncentral t.
pub fn power_at(df: DegreesOfFreedom, ncp: NonCentrality, alpha: f64) -> Result<f64> {
    open_unit("alpha", alpha)?;
    let (nu, delta) = (df.get(), ncp.get());
    let t_crit = student::isf(0.5 * alpha, nu);
    let upper = noncentral::sf(t_crit, nu, delta);
    let lower = noncentral::cdf(-t_crit, nu, delta);
    Ok((upper + lower).clamp(0.0, 1.0))
}

/// [`StudyDesign::power`] as a free function.
pub fn power(design: &StudyDesign, alpha: f64) -> Result<f64> {
    design.power(alpha)
}

/// How a likelihood ratio was obtained from a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Ratio of densities at the observed t (the observed p is the evidence).
    #[default]
    PEquals,
    /// Ratio of tail areas beyond the observed t (`P <= p` is the evidence).
    PLessThan,
    /// Upper bound over all priors on the alternative, valid for `p < 1/e`.
    SellkeBerger,
    /// Maximum likelihood ratio for a normal test statistic.
    Goodman,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::PEquals,
        Method::PLessThan,
        Method::SellkeBerger,
        Method::Goodman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::PEquals => "p_equals",
            Method::PLessThan => "p_less_than",
            Method::SellkeBerger => "sellke_berger",
            Method::Goodman => "goodman",
        }
    }

    /// Whether the ratio depends on the study design at all.
    pub fn uses_design(self) -> bool {
        matches!(self, Method::PEquals | Method::PLessThan)
    }

    /// Largest p for which the method is defined.
    pub(crate) fn p_upper_bound(self) -> f64 {
        match self {
            Method::SellkeBerger => 1.0 / E,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = FprError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "p_equals" | "equals" => Ok(Method::PEquals),
            "p_less_than" | "less_than" => Ok(Method::PLessThan),
            "sellke_berger" | "sellke" => Ok(Method::SellkeBerger),
            "goodman" => Ok(Method::Goodman),
            other => Err(FprError::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// Evidence for H1 relative to H0, as odds (`l10`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodRatio {
    pub l10: f64,
    pub method: Method,
}

impl LikelihoodRatio {
    pub fn new(l10: f64, method: Method) -> Result<Self> {
        finite("l10", l10)?;
        if l10 > 0.0 {
            Ok(Self { l10, method })
        } else {
            Err(FprError::out_of_range("l10", l10, "(0, inf)"))
        }
    }

    /// Odds on the null, `1 / l10`.
    pub fn l01(&self) -> f64 {
        1.0 / self.l10
    }
}

/// Observed p, prior probability of a real effect and false positive risk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceTriple {
    pub p_value: f64,
    pub prior: f64,
    pub fpr: f64,
}

fn check_p(p: f64) -> Result<f64> {
    open_unit("p", p)
}

/// Likelihood ratio from the densities at the critical t for the observed p:
/// `y1 / (2 y0)`, with `y0` the central t density (counted once per tail)
/// and `y1` the noncentral density under the alternative.
pub fn lr_p_equals(p: f64, design: &StudyDesign) -> Result<LikelihoodRatio> {
    check_p(p)?;
    let (nu, delta) = (design.df().get(), design.ncp().get());
    let t_crit = student::isf(0.5 * p, nu);
    let y0 = student::pdf(t_crit, nu);
    let y1 = noncentral::pdf(t_crit, nu, delta);
    let l10 = y1 / (2.0 * y0);
    if !(l10 > 0.0 && l10.is_finite()) {
        return Err(FprError::NoSolution(format!(
            "p-equals likelihood ratio underflows at p = {p} for {design}"
        )));
    }
    Ok(LikelihoodRatio {
        l10,
        method: Method::PEquals,
    })
}

/// `P(P <= p | H1) / P(P <= p | H0)`, i.e. power at level p divided by p.
pub fn lr_p_less_than(p: f64, design: &StudyDesign) -> Result<LikelihoodRatio> {
    check_p(p)?;
    let l10 = design.power(p)? / p;
    LikelihoodRatio::new(l10, Method::PLessThan)
}

/// Sellke-Berger bound `1 / (-e p ln p)`, defined for `p < 1/e`.
pub fn lr_sellke_berger(p: f64) -> Result<LikelihoodRatio> {
    check_p(p)?;
    if p >= 1.0 / E {
        return Err(FprError::SellkeBergerRange(p));
    }
    LikelihoodRatio::new(1.0 / (-E * p * p.ln()), Method::SellkeBerger)
}

/// Goodman's maximum ratio `exp(z^2 / 2) / 2` with `z` the two-sided normal
/// deviate of p.
pub fn lr_goodman(p: f64) -> Result<LikelihoodRatio> {
    check_p(p)?;
    let z = -normal::quantile(0.5 * p);
    LikelihoodRatio::new(0.5 * (0.5 * z * z).exp(), Method::Goodman)
}

/// Dispatch on `method`. The design is ignored by the two bounds.
pub fn likelihood_ratio(method: Method, p: f64, design: &StudyDesign) -> Result<LikelihoodRatio> {
    match method {
        Method::PEquals => lr_p_equals(p, design),
        Method::PLessThan => lr_p_less_than(p, design),
        Method::SellkeBerger => lr_sellke_berger(p),
        Method::Goodman => lr_goodman(p),
    }
}

/// False positive risk for a likelihood ratio and a prior probability of a
/// real effect. `prior = 1` gives 0 by continuity; `prior = 0` gives 1.
pub fn fpr_from_lr(lr: &LikelihoodRatio, prior: f64) -> Result<f64> {
    finite("prior", prior)?;
    if !(0.0..=1.0).contains(&prior) {
        return Err(FprError::out_of_range("prior", prior, "[0, 1]"));
    }
    if prior == 1.0 {
        return Ok(0.0);
    }
    let odds = prior / (1.0 - prior);
    Ok(1.0 / (1.0 + lr.l10 * odds))
}

/// Reverse Bayes: the prior needed for the given likelihood ratio to yield
/// the target FPR, `(1 - fpr) / ((1 - fpr) + l10 fpr)`.
pub fn prior_for_fpr(lr: &LikelihoodRatio, fpr: f64) -> Result<f64> {
    open_unit("fpr", fpr)?;
    let keep = 1.0 - fpr;
    Ok(keep / (keep + lr.l10 * fpr))
}

/// Lower end of the p search bracket, `log10(p)`.
const LOG10_P_MIN: f64 = -12.0;

/// The observed p at which the p-equals FPR equals `fpr` for the given
/// prior and design.
///
/// FPR is assumed monotone increasing in p over `[1e-12, 0.5]`; the root is
/// bracketed in `log10(p)`.
pub fn p_for_fpr(fpr: f64, prior: f64, design: &StudyDesign) -> Result<f64> {
    p_for_fpr_with(Method::PEquals, fpr, prior, design)
}

/// [`p_for_fpr`] for any method.
pub fn p_for_fpr_with(method: Method, fpr: f64, prior: f64, design: &StudyDesign) -> Result<f64> {
    open_unit("fpr", fpr)?;
    open_unit("prior", prior)?;
    let hi = 0.5f64.min(method.p_upper_bound() * (1.0 - 1e-12)).log10();
    let lo = LOG10_P_MIN;

    let objective = |u: f64| -> f64 {
        let p = 10f64.powf(u);
        match likelihood_ratio(method, p, design).and_then(|lr| fpr_from_lr(&lr, prior)) {
            Ok(v) => v - fpr,
            // Underflowing LRs behave like FPR = 1.
            Err(_) => 1.0 - fpr,
        }
    };
    let (f_lo, f_hi) = (objective(lo), objective(hi));
    if f_lo.signum() == f_hi.signum() {
        return Err(FprError::NoSolution(format!(
            "FPR {fpr} at prior {prior} is not reachable for p in [1e-12, {:.4}] ({method}, {design}); \
             FPR ranges over [{:.4}, {:.4}]",
            10f64.powf(hi),
            (f_lo + fpr).min(f_hi + fpr),
            (f_lo + fpr).max(f_hi + fpr),
        )));
    }
    let u = brent(objective, lo, hi, 1e-13, 200)
        .ok_or_else(|| FprError::NoSolution("root finder failed".into()))?;
    Ok(10f64.powf(u))
}
