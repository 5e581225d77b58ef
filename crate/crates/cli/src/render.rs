//! Human and CSV renderings. JSON goes through `fpr_service::api` unchanged.

use std::fmt::Write;

use fpr_core::calc::fmt_sig;
use fpr_service::api::{CalcResponse, SimResponse, TtestResponse};

pub fn sig(x: f64, digits: usize) -> String {
    fmt_sig(x, digits)
}

pub fn calc_human(r: &CalcResponse) -> String {
    let mut s = String::new();
    let label = if r.minimum_fpr { "minimum FPR" } else { "FPR" };
    writeln!(s, "{:<11} {}", "p", sig(r.p_value, 3)).unwrap();
    writeln!(s, "{:<11} {}", "prior", sig(r.prior, 3)).unwrap();
    writeln!(s, "{label:<11} {}", sig(r.fpr, 3)).unwrap();
    writeln!(s, "{:<11} {} (L01 {}, {})", "L10", sig(r.l10, 3), sig(r.l01, 3), r.method).unwrap();
    writeln!(
        s,
        "{:<11} {} at alpha 0.05, n = {} per group, effect size {}",
        "power",
        sig(r.power_at_005, 2),
        sig(r.design.n_per_group, 4),
        sig(r.design.effect_size_normalized, 3)
    )
    .unwrap();
    writeln!(s, "\n{}", r.statement).unwrap();
    if let Some(c) = &r.caveat {
        writeln!(s, "caveat: {c}").unwrap();
    }
    s
}

pub fn calc_csv(r: &CalcResponse) -> String {
    format!(
        "mode,method,p_value,prior,fpr,l10,l01,power_at_005,n_per_group,effect_size_normalized\n\
         {},{},{},{},{},{},{},{},{},{}\n",
        r.request.mode,
        r.method,
        r.p_value,
        r.prior,
        r.fpr,
        r.l10,
        r.l01,
        r.power_at_005,
        r.design.n_per_group,
        r.design.effect_size_normalized
    )
}

pub fn ttest_human(r: &TtestResponse) -> String {
    let t = &r.summary;
    let mut s = String::new();
    writeln!(s, "group A     n = {}, mean {}, sd {}", t.n_a, sig(t.mean_a, 4), sig(t.sd_a, 4)).unwrap();
    writeln!(s, "group B     n = {}, mean {}, sd {}", t.n_b, sig(t.mean_b, 4), sig(t.sd_b, 4)).unwrap();
    writeln!(
        s,
        "effect      {} (se {}), {} pooled SDs",
        sig(t.effect_size, 4),
        sig(t.se_effect, 4),
        sig(t.effect_size_normalized, 4)
    )
    .unwrap();
    writeln!(s, "t           {} on {} df, p = {}", sig(t.t_value, 5), t.df, sig(t.p_two_sided, 4)).unwrap();
    writeln!(s, "power       {} at alpha 0.05 (observed effect)", sig(t.post_hoc_power, 2)).unwrap();
    let label = if r.prior == 0.5 { "mFPR" } else { "FPR" };
    writeln!(s, "{label:<11} {} at prior {}", sig(r.fpr, 2), sig(r.prior, 2)).unwrap();
    if let Some(c) = &r.calc {
        writeln!(s, "L10         {}", sig(c.l10, 3)).unwrap();
    }
    writeln!(s, "\n{}", r.statement).unwrap();
    s
}

pub fn ttest_csv(r: &TtestResponse) -> String {
    let t = &r.summary;
    let l10 = r.calc.as_ref().map(|c| c.l10.to_string()).unwrap_or_default();
    format!(
        "n_a,n_b,mean_a,mean_b,effect_size,effect_size_normalized,se_effect,df,t_value,p_two_sided,post_hoc_power,prior,fpr,l10\n\
         {},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        t.n_a,
        t.n_b,
        t.mean_a,
        t.mean_b,
        t.effect_size,
        t.effect_size_normalized,
        t.se_effect,
        t.df,
        t.t_value,
        t.p_two_sided,
        t.post_hoc_power,
        r.prior,
        r.fpr,
        l10
    )
}

pub fn sim_human(r: &SimResponse) -> String {
    let res = &r.result;
    let c = &res.config;
    let mut s = String::new();
    writeln!(
        s,
        "n = {} per group, effect size {}, {} replicates per hypothesis, seed {}",
        c.n_per_group, c.effect_size, c.n_sims, c.seed
    )
    .unwrap();
    writeln!(s, "{:>10} {:>22} {:>22}", "p <", "H0 (se)", "H1 (se)").unwrap();
    for f in &res.frac_below {
        writeln!(
            s,
            "{:>10} {:>22} {:>22}",
            f.threshold,
            format!("{:.6} ({:.2e})", f.h0, f.h0_se),
            format!("{:.6} ({:.2e})", f.h1, f.h1_se)
        )
        .unwrap();
    }
    let (lo, hi) = c.band();
    writeln!(s, "band [{}, {}): H0 {} H1 {}", sig(lo, 6), sig(hi, 6), res.band_h0, res.band_h1).unwrap();
    match (res.empirical_lr, res.empirical_lr_log_se) {
        (Some(lr), Some(se)) => writeln!(s, "empirical LR {} (log se {})", sig(lr, 4), sig(se, 2)).unwrap(),
        _ => writeln!(s, "empirical LR undefined (empty band)").unwrap(),
    }
    if let Some(lr) = r.analytic_lr {
        writeln!(s, "analytic LR at p = {}: {}", c.band_center, sig(lr, 4)).unwrap();
    }
    s
}

pub fn sim_csv(r: &SimResponse) -> String {
    let mut s = String::from("threshold,h0,h0_se,h1,h1_se\n");
    for f in &r.result.frac_below {
        writeln!(s, "{},{},{},{},{}", f.threshold, f.h0, f.h0_se, f.h1, f.h1_se).unwrap();
    }
    s
}
