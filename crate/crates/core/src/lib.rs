//! False positive risk for p-values from two-sample t tests.
//!
//! The modules build on each other: [`dist`] supplies the central and
//! noncentral t distributions, [`fpr`] turns them into likelihood ratios
//! and false positive risks, [`calc`] is the three-way calculator, and
//! [`curves`] and [`simulate`] generate plot data and Monte Carlo checks.

pub mod calc;
pub mod curves;
pub mod dist;
pub mod error;
pub mod fpr;
pub mod simulate;
mod solve;
pub mod ttest;

pub use calc::{calc, CalcInputs, CalcMode, Calculation};
pub use curves::{CurvePoint, CurveSeries, Figure, FprMinimum};
pub use error::{ErrorCode, FprError, Result};
pub use fpr::{
    fpr_from_lr, likelihood_ratio, p_for_fpr, p_for_fpr_with, power, prior_for_fpr,
    EvidenceTriple, LikelihoodRatio, Method, StudyDesign, CONVENTIONAL_ALPHA,
};
pub use simulate::{simulate, SimConfig, SimResult};
pub use ttest::{two_sample_t, Sample, TestSummary};
