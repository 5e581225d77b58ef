//! Data behind the three standard plots: FPR against effect size at constant
//! power (fig1), against sample size (fig2) and against the observed p (fig3).

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calc::round_sig;
use crate::error::{open_unit, FprError, Result};
use crate::fpr::{
    fpr_from_lr, likelihood_ratio, lr_p_equals, lr_p_less_than, Method, StudyDesign,
    CONVENTIONAL_ALPHA,
};
use crate::solve::brent;

pub const CSV_HEADER: &str = "x,fpr,method,p,prior,power,n,es";
const CSV_DIGITS: usize = 10;

const N_MAX: f64 = 1e7;
const GRID_N_MAX: f64 = 1e6;
const GRID_ES_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl Figure {
    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = FprError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(FprError::InvalidInput(format!("unknown figure '{other}'"))),
        }
    }
}

/// One row of a curve, with every parameter that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub fpr: f64,
    pub p: f64,
    pub prior: f64,
    pub power: f64,
    pub n: f64,
    pub es: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub name: String,
    pub figure: Figure,
    /// Method tag: a [`Method`] name, or `identity` for the `fpr = p` line.
    pub method: String,
    pub x_label: String,
    pub points: Vec<CurvePoint>,
}

impl CurveSeries {
    fn new(figure: Figure, method: &str, x_label: &str, points: Vec<CurvePoint>) -> Self {
        Self {
            name: format!("{figure}-{method}"),
            figure,
            method: method.to_string(),
            x_label: x_label.to_string(),
            points,
        }
    }

    /// File name the CLI writes this series to.
    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.points.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for pt in &self.points {
            let cells = [pt.x, pt.fpr];
            let tail = [pt.p, pt.prior, pt.power, pt.n, pt.es];
            let fmt = |v: &f64| render(*v);
            out.push_str(&cells.iter().map(fmt).collect::<Vec<_>>().join(","));
            out.push(',');
            out.push_str(&self.method);
            out.push(',');
            out.push_str(&tail.iter().map(fmt).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

/// Fixed 10-significant-digit decimal rendering used in CSV output.
pub fn render(v: f64) -> String {
    format!("{}", round_sig(v, CSV_DIGITS))
}

/// Parses CSV written by [`CurveSeries::to_csv`]: `(method, points)`.
pub fn parse_csv(text: &str) -> Result<(String, Vec<CurvePoint>)> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| FprError::InvalidInput(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(FprError::InvalidInput(format!(
            "expected header '{CSV_HEADER}', found '{header}'"
        )));
    }
    let mut method = String::new();
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| FprError::InvalidInput(format!("row {row}: {e}")))?;
        let num = |col: usize| -> Result<f64> {
            rec.get(col).unwrap_or("").parse().map_err(|_| {
                FprError::InvalidInput(format!("row {row}, column {}: not a number", col + 1))
            })
        };
        method = rec.get(2).unwrap_or("").to_string();
        points.push(CurvePoint {
            x: num(0)?,
            fpr: num(1)?,
            p: num(3)?,
            prior: num(4)?,
            power: num(5)?,
            n: num(6)?,
            es: num(7)?,
        });
    }
    Ok((method, points))
}

/// Sample size per group (continuous) giving `target_power` at level `alpha`
/// for normalized effect size `es`. Power is increasing in n.
pub fn n_for_power(target_power: f64, es: f64, alpha: f64) -> Result<f64> {
    open_unit("target_power", target_power)?;
    open_unit("alpha", alpha)?;
    let power_at = |n: f64| -> Result<f64> { StudyDesign::with_continuous_n(n, es)?.power(alpha) };

    let floor = power_at(2.0)?;
    if floor >= target_power {
        return Err(FprError::NoSolution(format!(
            "power {floor:.4} at n = 2 already exceeds the target {target_power}"
        )));
    }
    // Double until the target is bracketed.
    let mut lo = 2.0;
    let mut hi = 4.0;
    loop {
        if hi > N_MAX {
            return Err(FprError::NoSolution(format!(
                "power {target_power} needs n > {N_MAX:e} per group at effect size {es}"
            )));
        }
        let p = power_at(hi)?;
        assert!(p + 1e-9 >= floor, "power must increase with n");
        if p >= target_power {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    brent(
        |n| power_at(n).map(|p| p - target_power).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-10 * hi,
        200,
    )
    .ok_or_else(|| FprError::NoSolution("sample size root finder failed".into()))
}

/// Evenly stepped grid from `min` to `max` inclusive (up to rounding).
pub fn linear_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || min > max {
        return Err(FprError::InvalidGrid(format!(
            "need min <= max and step > 0, got {min}..{max} step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| round_sig(min + i as f64 * step, 12)).collect())
}

/// `count` log-spaced points from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max.is_finite() && min <= max) || count == 0 {
        return Err(FprError::InvalidGrid(format!(
            "need 0 < min <= max and at least one point, got {min}..{max} with {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

/// Effect-size grid for fig1: 0.1 to 2.0 in steps of 0.05.
pub fn default_es_grid() -> Vec<f64> {
    linear_grid(0.1, 2.0, 0.05).expect("static grid")
}

/// Sample-size grid for fig2: log-spaced from `n_min` to `n_max` plus every
/// integer from `n_min` up to 20.
pub fn default_n_grid(n_min: f64, n_max: f64) -> Result<Vec<f64>> {
    let mut grid = log_grid(n_min, n_max, 40)?;
    let top = n_max.min(20.0);
    let mut k = n_min.ceil();
    while k <= top {
        grid.push(k);
        k += 1.0;
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(grid)
}

/// p grid for fig3: 60 log-spaced points from 1e-4 to 0.3.
pub fn default_p_grid() -> Vec<f64> {
    log_grid(1e-4, 0.3, 60).expect("static grid")
}

fn check_grid(name: &str, grid: &[f64], lo: f64, hi: f64, closed_lo: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(FprError::InvalidGrid(format!("{name} grid is empty")));
    }
    for &v in grid {
        let above = if closed_lo { v >= lo } else { v > lo };
        if !(v.is_finite() && above && v <= hi) {
            let open = if closed_lo { "[" } else { "(" };
            return Err(FprError::InvalidGrid(format!(
                "{name} value {v} outside {open}{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

fn sorted(grid: &[f64]) -> Vec<f64> {
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g
}

/// FPR against effect size with power held at `target_power` by solving n
/// at each point. Returns `(p_equals, p_less_than)`.
pub fn curve_fpr_vs_es(
    p: f64,
    prior: f64,
    target_power: f64,
    es_grid: &[f64],
) -> Result<(CurveSeries, CurveSeries)> {
    open_unit("p", p)?;
    open_unit("prior", prior)?;
    check_grid("effect size", es_grid, 0.0, GRID_ES_MAX, false)?;
    let grid = sorted(es_grid);

    let rows: Vec<(CurvePoint, CurvePoint)> = grid
        .par_iter()
        .map(|&es| -> Result<_> {
            let n = n_for_power(target_power, es, CONVENTIONAL_ALPHA)?;
            let design = StudyDesign::with_continuous_n(n, es)?;
            let eq = fpr_from_lr(&lr_p_equals(p, &design)?, prior)?;
            let lt = fpr_from_lr(&lr_p_less_than(p, &design)?, prior)?;
            let point = |fpr| CurvePoint {
                x: es,
                fpr,
                p,
                prior,
                power: target_power,
                n,
                es,
            };
            Ok((point(eq), point(lt)))
        })
        .collect::<Result<_>>()?;
    let (eq, lt): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok((
        CurveSeries::new(Figure::Fig1, Method::PEquals.as_str(), "effect_size", eq),
        CurveSeries::new(Figure::Fig1, Method::PLessThan.as_str(), "effect_size", lt),
    ))
}

/// Location of the smallest FPR over integer n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FprMinimum {
    pub n: f64,
    pub fpr: f64,
}

fn fpr_at_n(p: f64, prior: f64, es: f64, n: f64) -> Result<f64> {
    let design = StudyDesign::with_continuous_n(n, es)?;
    match lr_p_equals(p, &design) {
        Ok(lr) => fpr_from_lr(&lr, prior),
        // The density ratio underflows deep in the Jeffreys-Lindley regime.
        Err(FprError::NoSolution(_)) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// p-equals FPR against n per group, plus the integer n minimising it.
pub fn curve_fpr_vs_n(
    p: f64,
    prior: f64,
    es: f64,
    n_grid: &[f64],
) -> Result<(CurveSeries, FprMinimum)> {
    open_unit("p", p)?;
    open_unit("prior", prior)?;
    check_grid("n", n_grid, 2.0, GRID_N_MAX, true)?;
    StudyDesign::with_continuous_n(2.0, es)?;
    let grid = sorted(n_grid);

    let points: Vec<CurvePoint> = grid
        .par_iter()
        .map(|&n| -> Result<_> {
            let design = StudyDesign::with_continuous_n(n, es)?;
            Ok(CurvePoint {
                x: n,
                fpr: fpr_at_n(p, prior, es, n)?,
                p,
                prior,
                power: design.power(CONVENTIONAL_ALPHA)?,
                n,
                es,
            })
        })
        .collect::<Result<_>>()?;

    let lo = grid[0].ceil();
    let hi = grid[grid.len() - 1].floor();
    if lo > hi {
        return Err(FprError::InvalidGrid(format!(
            "n grid {}..{} contains no integer",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    let minimum = integer_minimum(lo, hi, |n| fpr_at_n(p, prior, es, n))?;
    Ok((
        CurveSeries::new(Figure::Fig2, Method::PEquals.as_str(), "n", points),
        minimum,
    ))
}

/// Exhaustive scan for small ranges; integer ternary search (assuming a
/// single minimum) beyond that.
fn integer_minimum(lo: f64, hi: f64, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<FprMinimum> {
    const SCAN_LIMIT: f64 = 2000.0;
    let scan = |a: f64, b: f64| -> Result<FprMinimum> {
        let count = (b - a) as usize + 1;
        let vals: Vec<(f64, f64)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let n = a + i as f64;
                f(n).map(|v| (n, v))
            })
            .collect::<Result<_>>()?;
        let (n, fpr) = vals
            .into_iter()
            .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        Ok(FprMinimum { n, fpr })
    };
    let (mut a, mut b) = (lo, hi);
    while b - a > SCAN_LIMIT {
        let m1 = a + ((b - a) / 3.0).floor();
        let m2 = b - ((b - a) / 3.0).floor();
        if f(m1)? <= f(m2)? {
            b = m2;
        } else {
            a = m1;
        }
    }
    scan(a, b)
}

/// FPR against observed p for the p-equals method and the two bounds, plus
/// the `fpr = p` reference line. Sellke-Berger points at `p >= 1/e` are
/// omitted.
pub fn curve_fpr_vs_p(design: &StudyDesign, prior: f64, p_grid: &[f64]) -> Result<Vec<CurveSeries>> {
    open_unit("prior", prior)?;
    check_grid("p", p_grid, 0.0, 1.0, false)?;
    if p_grid.contains(&1.0) {
        return Err(FprError::InvalidGrid("p value 1 outside (0, 1)".into()));
    }
    let grid = sorted(p_grid);
    let power = design.power(CONVENTIONAL_ALPHA)?;
    let point = |p: f64, fpr: f64| CurvePoint {
        x: p,
        fpr,
        p,
        prior,
        power,
        n: design.n_per_group(),
        es: design.effect_size(),
    };

    let mut out = Vec::with_capacity(4);
    for method in [Method::PEquals, Method::SellkeBerger, Method::Goodman] {
        let points = grid
            .par_iter()
            .filter(|&&p| method != Method::SellkeBerger || p < 1.0 / E)
            .map(|&p| {
                let lr = likelihood_ratio(method, p, design)?;
                Ok(point(p, fpr_from_lr(&lr, prior)?))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(CurveSeries::new(Figure::Fig3, method.as_str(), "p", points));
    }
    let identity = grid.iter().map(|&p| point(p, p)).collect();
    out.push(CurveSeries::new(Figure::Fig3, "identity", "p", identity));
    Ok(out)
}
