//! Request and response bodies, and the pure functions that produce them.
//! The HTTP handlers and the CLI's JSON output both go through here.

use fpr_core::calc::{calc, CalcInputs, CalcMode, Calculation};
use fpr_core::curves::{
    curve_fpr_vs_es, curve_fpr_vs_n, curve_fpr_vs_p, default_n_grid, linear_grid, log_grid,
    CurveSeries, Figure, FprMinimum,
};
use fpr_core::fpr::{Method, StudyDesign};
use fpr_core::simulate::{
    simulate, SimConfig, SimResult, DEFAULT_BAND_CENTER, DEFAULT_BAND_HALF_WIDTH,
    DEFAULT_THRESHOLDS,
};
use fpr_core::ttest::{two_sample_t, Sample, TestSummary};
use fpr_core::{FprError, Result};
use serde::{Deserialize, Serialize};

/// Version of the JSON shapes below; bumped on breaking changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept in JSON numbers.
pub const JSON_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalcRequest {
    pub mode: CalcMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fpr: Option<f64>,
    /// Per-group size. Unequal groups use the harmonic mean, so this may be
    /// fractional.
    pub n_per_group: f64,
    pub effect_size_normalized: f64,
    #[serde(default)]
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignInfo {
    pub n_per_group: f64,
    pub effect_size_normalized: f64,
    pub df: f64,
    pub ncp: f64,
}

impl From<&StudyDesign> for DesignInfo {
    fn from(d: &StudyDesign) -> Self {
        Self {
            n_per_group: d.n_per_group(),
            effect_size_normalized: d.effect_size(),
            df: d.df().get(),
            ncp: d.ncp().get(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalcResponse {
    pub schema_version: u32,
    pub request: CalcRequest,
    pub p_value: f64,
    pub prior: f64,
    pub fpr: f64,
    /// Whether `fpr` is the minimum FPR (prior 0.5).
    pub minimum_fpr: bool,
    pub method: Method,
    pub l10: f64,
    pub l01: f64,
    pub power_at_005: f64,
    pub design: DesignInfo,
    pub statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl CalcResponse {
    pub fn new(request: CalcRequest, c: &Calculation) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            request,
            p_value: c.triple.p_value,
            prior: c.triple.prior,
            fpr: c.triple.fpr,
            minimum_fpr: c.is_minimum_fpr(),
            method: c.lr.method,
            l10: c.lr.l10,
            l01: c.lr.l01(),
            power_at_005: c.power_at_005,
            design: DesignInfo::from(&c.design),
            statement: c.statement(),
            caveat: c.caveat().map(str::to_string),
        }
    }
}

pub fn calc_response(req: &CalcRequest) -> Result<CalcResponse> {
    let design = StudyDesign::with_continuous_n(req.n_per_group, req.effect_size_normalized)?;
    let inputs = CalcInputs {
        p_value: req.p_value,
        prior: req.prior,
        fpr: req.fpr,
    };
    let c = calc(req.mode, inputs, &design, req.method)?;
    Ok(CalcResponse::new(req.clone(), &c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TtestRequest {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Prior for the FPR; defaults to 0.5 (minimum FPR).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtestResponse {
    pub schema_version: u32,
    pub summary: TestSummary,
    pub prior: f64,
    pub fpr: f64,
    pub statement: String,
    /// Calculator output with the observed effect taken as the alternative;
    /// absent when the observed effect is exactly zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calc: Option<CalcResponse>,
}

/// Statement for a zero observed effect, where no alternative is supported.
pub const NO_EFFECT_STATEMENT: &str =
    "The two group means are identical, so the data give no evidence of a real effect; \
     the false positive risk is 1.";

pub fn ttest_response(a: Vec<f64>, b: Vec<f64>, prior: Option<f64>) -> Result<TtestResponse> {
    let a = Sample::new(a).map_err(|e| relabel(e, "a"))?;
    let b = Sample::new(b).map_err(|e| relabel(e, "b"))?;
    let summary = two_sample_t(&a, &b)?;
    ttest_from_summary(summary, prior)
}

fn relabel(err: FprError, group: &'static str) -> FprError {
    match err {
        FprError::SampleTooSmall { len, .. } => FprError::SampleTooSmall { group, len },
        other => other,
    }
}

/// FPR supplement for an existing test result. The observed normalized
/// effect and the harmonic-mean group size define the alternative.
pub fn ttest_from_summary(summary: TestSummary, prior: Option<f64>) -> Result<TtestResponse> {
    let prior = prior.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&prior) || prior.is_nan() {
        return Err(FprError::InvalidInput(format!("prior {prior} outside [0, 1]")));
    }
    if summary.effect_size == 0.0 {
        return Ok(TtestResponse {
            schema_version: SCHEMA_VERSION,
            summary,
            prior,
            fpr: 1.0,
            statement: NO_EFFECT_STATEMENT.to_string(),
            calc: None,
        });
    }
    let request = CalcRequest {
        mode: CalcMode::FprFromPPrior,
        p_value: Some(summary.p_two_sided),
        prior: Some(prior),
        fpr: None,
        n_per_group: summary.design_n(),
        effect_size_normalized: summary.effect_size_normalized.abs(),
        method: Method::PEquals,
    };
    let calc = calc_response(&request)?;
    Ok(TtestResponse {
        schema_version: SCHEMA_VERSION,
        summary,
        prior,
        fpr: calc.fpr,
        statement: calc.statement.clone(),
        calc: Some(calc),
    })
}

/// Curve parameters; each figure reads the subset it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveParams {
    pub p: f64,
    pub prior: f64,
    pub power: f64,
    pub es: f64,
    pub n: f64,
    pub es_min: f64,
    pub es_max: f64,
    pub es_step: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub points: usize,
}

impl Default for CurveParams {
    fn default() -> Self {
        Self {
            p: 0.05,
            prior: 0.5,
            power: 0.78,
            es: 1.0,
            n: 16.0,
            es_min: 0.1,
            es_max: 2.0,
            es_step: 0.05,
            n_min: 4.0,
            n_max: 64.0,
            p_min: 1e-4,
            p_max: 0.3,
            points: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvesResponse {
    pub schema_version: u32,
    pub figure: Figure,
    pub params: CurveParams,
    pub series: Vec<CurveSeries>,
    /// Integer n with the smallest FPR (fig2 only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimum: Option<FprMinimum>,
}

pub fn curves_response(figure: Figure, params: &CurveParams) -> Result<CurvesResponse> {
    let (series, minimum) = match figure {
        Figure::Fig1 => {
            let grid = linear_grid(params.es_min, params.es_max, params.es_step)?;
            let (eq, lt) = curve_fpr_vs_es(params.p, params.prior, params.power, &grid)?;
            (vec![eq, lt], None)
        }
        Figure::Fig2 => {
            let grid = default_n_grid(params.n_min, params.n_max)?;
            let (series, min) = curve_fpr_vs_n(params.p, params.prior, params.es, &grid)?;
            (vec![series], Some(min))
        }
        Figure::Fig3 => {
            let design = StudyDesign::with_continuous_n(params.n, params.es)?;
            let grid = log_grid(params.p_min, params.p_max, params.points)?;
            (curve_fpr_vs_p(&design, params.prior, &grid)?, None)
        }
    };
    Ok(CurvesResponse {
        schema_version: SCHEMA_VERSION,
        figure,
        params: params.clone(),
        series,
        minimum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimRequest {
    pub n_per_group: u32,
    pub effect_size: f64,
    pub n_sims: u64,
    pub seed: u64,
    #[serde(default = "default_band_center")]
    pub band_center: f64,
    #[serde(default = "default_band_half_width")]
    pub band_half_width: f64,
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
}

fn default_band_center() -> f64 {
    DEFAULT_BAND_CENTER
}

fn default_band_half_width() -> f64 {
    DEFAULT_BAND_HALF_WIDTH
}

fn default_thresholds() -> Vec<f64> {
    DEFAULT_THRESHOLDS.to_vec()
}

impl From<&SimRequest> for SimConfig {
    fn from(r: &SimRequest) -> Self {
        SimConfig {
            n_per_group: r.n_per_group,
            effect_size: r.effect_size,
            n_sims: r.n_sims,
            seed: r.seed,
            band_center: r.band_center,
            band_half_width: r.band_half_width,
            thresholds: r.thresholds.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResponse {
    pub schema_version: u32,
    #[serde(flatten)]
    pub result: SimResult,
    /// Analytic p-equals ratio at the band centre, when the design allows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_lr: Option<f64>,
}

pub fn sim_response(req: &SimRequest) -> Result<SimResponse> {
    let cfg = SimConfig::from(req);
    let result = simulate(&cfg)?;
    let analytic_lr = StudyDesign::new(cfg.n_per_group, cfg.effect_size)
        .and_then(|d| fpr_core::fpr::lr_p_equals(cfg.band_center, &d))
        .ok()
        .map(|lr| lr.l10);
    Ok(SimResponse {
        schema_version: SCHEMA_VERSION,
        result,
        analytic_lr,
    })
}

/// Serializes `value` with every float rounded to [`JSON_DIGITS`]
/// significant digits.
pub fn to_rounded_json<T: Serialize>(value: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(value).expect("response types serialize");
    round_numbers(&mut v);
    v
}

fn round_numbers(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            let r = fpr_core::calc::round_sig(x, JSON_DIGITS);
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}
