//! The three-way calculator: given any two of (p, prior, FPR) and a design,
//! find the third.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FprError, Result};
use crate::fpr::{
    fpr_from_lr, likelihood_ratio, p_for_fpr_with, prior_for_fpr, EvidenceTriple,
    LikelihoodRatio, Method, StudyDesign, CONVENTIONAL_ALPHA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalcMode {
    /// FPR from the observed p and a prior.
    FprFromPPrior,
    /// The p needed to reach a target FPR at a given prior.
    PFromFprPrior,
    /// Reverse Bayes: the prior needed for the observed p to reach a target FPR.
    PriorFromPFpr,
}

impl CalcMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CalcMode::FprFromPPrior => "fpr_from_p_prior",
            CalcMode::PFromFprPrior => "p_from_fpr_prior",
            CalcMode::PriorFromPFpr => "prior_from_p_fpr",
        }
    }

    fn required(self) -> (&'static str, &'static str, &'static str) {
        match self {
            CalcMode::FprFromPPrior => ("p_value", "prior", "fpr"),
            CalcMode::PFromFprPrior => ("fpr", "prior", "p_value"),
            CalcMode::PriorFromPFpr => ("p_value", "fpr", "prior"),
        }
    }
}

impl fmt::Display for CalcMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CalcMode {
    type Err = FprError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fpr_from_p_prior" | "fpr" => Ok(CalcMode::FprFromPPrior),
            "p_from_fpr_prior" | "p" => Ok(CalcMode::PFromFprPrior),
            "prior_from_p_fpr" | "prior" => Ok(CalcMode::PriorFromPFpr),
            other => Err(FprError::InvalidInput(format!("unknown mode '{other}'"))),
        }
    }
}

/// The two known members of the triple; the third must be `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CalcInputs {
    pub p_value: Option<f64>,
    pub prior: Option<f64>,
    pub fpr: Option<f64>,
}

impl CalcInputs {
    /// Inputs for [`CalcMode::FprFromPPrior`].
    pub fn fpr_from(p_value: f64, prior: f64) -> Self {
        Self {
            p_value: Some(p_value),
            prior: Some(prior),
            fpr: None,
        }
    }

    /// Inputs for [`CalcMode::PFromFprPrior`].
    pub fn p_from(fpr: f64, prior: f64) -> Self {
        Self {
            p_value: None,
            prior: Some(prior),
            fpr: Some(fpr),
        }
    }

    /// Inputs for [`CalcMode::PriorFromPFpr`].
    pub fn prior_from(p_value: f64, fpr: f64) -> Self {
        Self {
            p_value: Some(p_value),
            prior: None,
            fpr: Some(fpr),
        }
    }

    fn get(&self, name: &str) -> Option<f64> {
        match name {
            "p_value" => self.p_value,
            "prior" => self.prior,
            _ => self.fpr,
        }
    }
}

/// A completed calculation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calculation {
    pub mode: CalcMode,
    pub design: StudyDesign,
    pub triple: EvidenceTriple,
    pub lr: LikelihoodRatio,
    /// Power of the design at alpha = 0.05.
    pub power_at_005: f64,
}

/// Prior treated as "minimum FPR" in reports.
pub const MINIMUM_FPR_PRIOR: f64 = 0.5;

/// Solve for the missing member of the triple.
pub fn calc(
    mode: CalcMode,
    inputs: CalcInputs,
    design: &StudyDesign,
    method: Method,
) -> Result<Calculation> {
    let (first, second, missing) = mode.required();
    for name in [first, second] {
        if inputs.get(name).is_none() {
            return Err(FprError::InvalidInput(format!(
                "mode {mode} requires {first} and {second}; {name} is missing"
            )));
        }
    }
    if inputs.get(missing).is_some() {
        return Err(FprError::InvalidInput(format!(
            "mode {mode} computes {missing}; it must not be supplied"
        )));
    }

    let triple = match mode {
        CalcMode::FprFromPPrior => {
            let (p, prior) = (inputs.p_value.unwrap(), inputs.prior.unwrap());
            let lr = likelihood_ratio(method, p, design)?;
            EvidenceTriple {
                p_value: p,
                prior,
                fpr: fpr_from_lr(&lr, prior)?,
            }
        }
        CalcMode::PFromFprPrior => {
            let (fpr, prior) = (inputs.fpr.unwrap(), inputs.prior.unwrap());
            EvidenceTriple {
                p_value: p_for_fpr_with(method, fpr, prior, design)?,
                prior,
                fpr,
            }
        }
        CalcMode::PriorFromPFpr => {
            let (p, fpr) = (inputs.p_value.unwrap(), inputs.fpr.unwrap());
            let lr = likelihood_ratio(method, p, design)?;
            EvidenceTriple {
                p_value: p,
                prior: prior_for_fpr(&lr, fpr)?,
                fpr,
            }
        }
    };
    let lr = likelihood_ratio(method, triple.p_value, design)?;
    Ok(Calculation {
        mode,
        design: *design,
        triple,
        lr,
        power_at_005: design.power(CONVENTIONAL_ALPHA)?,
    })
}

impl Calculation {
    /// True when the prior is 0.5, i.e. the FPR is the minimum FPR.
    pub fn is_minimum_fpr(&self) -> bool {
        self.triple.prior == MINIMUM_FPR_PRIOR
    }

    /// Warning attached to results that rest on an extreme prior.
    pub fn caveat(&self) -> Option<&'static str> {
        if self.triple.prior >= 1.0 {
            Some("prior_is_certain: a prior of 1 assumes a real effect, so the FPR is 0 regardless of the data")
        } else if self.triple.prior <= 0.0 {
            Some("prior_is_zero: a prior of 0 rules out a real effect, so the FPR is 1 regardless of the data")
        } else if self.triple.prior > MINIMUM_FPR_PRIOR {
            Some("prior_above_half: priors above 0.5 need hard independent evidence")
        } else {
            None
        }
    }

    /// One-sentence report of the result, in the style suited to the mode.
    pub fn statement(&self) -> String {
        let t = &self.triple;
        match self.mode {
            CalcMode::FprFromPPrior => statement_fpr(t.p_value, t.prior, t.fpr),
            CalcMode::PriorFromPFpr => statement_prior(t.p_value, t.fpr, t.prior),
            CalcMode::PFromFprPrior => statement_p(t.fpr, t.prior, t.p_value),
        }
    }
}

/// Report of the FPR for an observed p.
pub fn statement_fpr(p: f64, prior: f64, fpr: f64) -> String {
    if prior == MINIMUM_FPR_PRIOR {
        format!(
            "Observing p = {} implies a minimum false positive risk of {}% \
             (the risk when the prior probability of a real effect is P(H1) = 0.5), \
             so the chance that the result is a false positive is at least that large.",
            fmt_sig(p, 3),
            fmt_percent(fpr)
        )
    } else {
        format!(
            "Observing p = {} implies a false positive risk of {}% \
             if the prior probability of a real effect is P(H1) = {}.",
            fmt_sig(p, 3),
            fmt_percent(fpr),
            fmt_sig(prior, 2)
        )
    }
}

/// Reverse-Bayes report.
pub fn statement_prior(p: f64, fpr: f64, prior: f64) -> String {
    format!(
        "Observing p = {}: to bring the false positive risk down to {} one would have \
         to be confident beforehand, with prior probability P(H1) = {}, that a real \
         effect exists; without independent evidence for that prior the result is \
         weaker than it looks.",
        fmt_sig(p, 3),
        fmt_sig(fpr, 2),
        fmt_sig(prior, 2)
    )
}

/// Report of the p needed for a target FPR.
pub fn statement_p(fpr: f64, prior: f64, p: f64) -> String {
    let what = if prior == MINIMUM_FPR_PRIOR {
        "the minimum false positive risk".to_string()
    } else {
        format!("the false positive risk at prior P(H1) = {}", fmt_sig(prior, 2))
    };
    format!(
        "Bringing {what} down to {} would require observing p = {}.",
        fmt_sig(fpr, 2),
        fmt_sig(p, 2)
    )
}

/// `x` rounded to `digits` significant figures, shortest decimal form.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded = round_sig(x, digits);
    let magnitude = rounded.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn fmt_percent(fpr: f64) -> String {
    fmt_sig(100.0 * fpr, 2)
}

/// Round to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let p = digits.saturating_sub(1);
    format!("{x:.p$e}").parse().unwrap_or(x)
}
