//! `verify`: generator, replay and closed-form cross-checks over a parameter grid.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use ph3_core::adversary::{
    ffd_accounting_applies, generate, predicted_counts, realized_warning, AdversaryParams,
};
use ph3_core::packers::{run_online, Algorithm, Ph3Config};
use ph3_core::planner::{plan_cover, run_kcopy, CoverPlan, INTERVAL_SAMPLES};
use ph3_core::ratio::{opt_bounds, ph3_ratio_bound, r_star};
use ph3_core::{q, Instance, Item, ItemClass, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::write_csv;
use crate::{Failure, VerifyArgs};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_grid")]
    pub grid: Grid,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<u64>,
    #[serde(default = "default_tolerance_pct")]
    pub tolerance_pct: f64,
    #[serde(default = "default_plans")]
    pub plans: Vec<PlanEntry>,
    /// Random items streamed through every online packer; 0 disables.
    #[serde(default)]
    pub fuzz_items: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub r_l: Vec<String>,
    pub r_l_star: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntry {
    pub target_r: String,
    /// Read the plan from this CSV instead of building it.
    pub path: Option<PathBuf>,
    /// Extend the first interval by this much (a deliberately broken plan).
    pub widen: Option<String>,
}

const DEFAULT_POINTS: [&str; 5] = ["0", "1/19", "1/3", "1/2", "1"];

fn default_grid() -> Grid {
    let values: Vec<String> = DEFAULT_POINTS.iter().map(|s| s.to_string()).collect();
    Grid {
        r_l: values.clone(),
        r_l_star: values,
    }
}

fn default_n_values() -> Vec<u64> {
    vec![50, 200, 500]
}

fn default_tolerance_pct() -> f64 {
    3.0
}

fn default_plans() -> Vec<PlanEntry> {
    vec![PlanEntry {
        target_r: "1.5815".into(),
        path: None,
        widen: None,
    }]
}

impl Default for Config {
    fn default() -> Self {
        Config {
            grid: default_grid(),
            n_values: default_n_values(),
            tolerance_pct: default_tolerance_pct(),
            plans: default_plans(),
            fuzz_items: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Warn,
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub point: String,
    pub check: String,
    pub status: Status,
    pub value: String,
    pub limit: String,
}

fn row(
    point: &str,
    check: &str,
    pass: bool,
    value: impl ToString,
    limit: impl ToString,
) -> CheckRow {
    CheckRow {
        point: point.to_string(),
        check: check.to_string(),
        status: if pass { Status::Pass } else { Status::Fail },
        value: value.to_string(),
        limit: limit.to_string(),
    }
}

fn parse(text: &str) -> Result<Rational> {
    Rational::parse(text).with_context(|| format!("bad rational {text:?}"))
}

fn load_config(path: Option<&PathBuf>) -> Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("bad config {}", path.display()))
}

struct Prepared {
    label: String,
    plan: CoverPlan,
}

fn prepare_plan(entry: &PlanEntry, rows: &mut Vec<CheckRow>) -> Result<Option<Prepared>> {
    let target = parse(&entry.target_r)?;
    let label = match (&entry.path, &entry.widen) {
        (Some(p), _) => format!("plan {} R={target}", p.display()),
        (None, Some(w)) => format!("plan R={target} widened {w}"),
        (None, None) => format!("plan R={target}"),
    };
    let mut plan = match &entry.path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            CoverPlan::from_csv(&text, target.clone())?
        }
        None => plan_cover(&target)?,
    };
    if let Some(w) = &entry.widen {
        let w = parse(w)?;
        if plan.k() < 2 {
            bail!("cannot widen a one-copy plan");
        }
        let end = &plan.copies[0].r_max + &w;
        plan.copies[0].r_max = end.clone();
        plan.copies[1].r_min = end;
    }
    let sampled = plan.verify(INTERVAL_SAMPLES);
    rows.push(row(
        &label,
        "interval-samples",
        sampled.is_ok(),
        sampled
            .as_ref()
            .err()
            .map(|e| e.to_string())
            .unwrap_or_else(|| format!("k={}", plan.k())),
        format!("<= {target}"),
    ));
    let grid = plan.verify_grid(10_000);
    rows.push(row(
        &label,
        "cover-grid",
        grid.is_ok(),
        grid.as_ref()
            .map(|n| format!("{n} points"))
            .unwrap_or_else(|e| e.to_string()),
        format!("<= {target}"),
    ));
    Ok((sampled.is_ok() && grid.is_ok()).then_some(Prepared { label, plan }))
}

fn check_point(
    n: u64,
    r_l: &Rational,
    r_l_star: &Rational,
    tol: &Rational,
    plans: &[Prepared],
) -> Vec<CheckRow> {
    let point = format!("N={n} r_L={r_l} r_L*={r_l_star}");
    let params = AdversaryParams::new(n, r_l.clone(), r_l_star.clone()).expect("validated grid");
    let instance = generate(&params);
    let counts = params.counts();
    let predicted = predicted_counts(&params);
    let mut rows = Vec::new();

    let emitted = (
        instance.class_count(ItemClass::L) as u64,
        instance.class_count(ItemClass::M) as u64,
        instance.len() as u64,
    );
    let expected = (
        counts.n_l,
        counts.n_m,
        counts.n_l + counts.n_m + 4 * counts.n_ss + 2 * counts.n_sl,
    );
    rows.push(row(
        &point,
        "emission-totals",
        emitted == expected,
        format!("{emitted:?}"),
        format!("{expected:?}"),
    ));

    let realized = r_star(&instance);
    let slack = q(2, n as i64);
    rows.push(row(
        &point,
        "realized-r-star",
        (&realized - r_l_star).abs() <= slack,
        format!("{realized}"),
        format!("|diff| <= {slack}"),
    ));

    let ph3 = run_online(
        &Algorithm::Ph3(Ph3Config::new(r_l.clone()).expect("grid r_L")),
        &instance,
    );
    let bounds = opt_bounds(&instance);
    rows.push(row(
        &point,
        "ph3-lower",
        Rational::from(ph3.bins_used) >= predicted.ph3_lower,
        ph3.bins_used,
        format!(">= {}", predicted.ph3_lower),
    ));

    if ffd_accounting_applies(&params) {
        rows.push(row(
            &point,
            "ffd-upper",
            Rational::from(bounds.ub_ffd) <= predicted.ffd_upper,
            bounds.ub_ffd,
            format!("<= {}", predicted.ffd_upper),
        ));
    } else {
        rows.push(CheckRow {
            point: point.clone(),
            check: "ffd-upper".into(),
            status: Status::Skip,
            value: bounds.ub_ffd.to_string(),
            limit: "too few 1/6 - eps items for the closed form".into(),
        });
    }

    let bound = ph3_ratio_bound(r_l, r_l_star).expect("grid in range").value;
    let certified = Rational::from(ph3.bins_used) / Rational::from(bounds.ub_ffd.max(1));
    let ceiling = &bound * (Rational::one() + tol);
    rows.push(row(
        &point,
        "ph3-ratio",
        certified <= ceiling,
        certified.to_decimal_ceil(4),
        format!("<= {}", ceiling.to_decimal_ceil(4)),
    ));

    for prepared in plans {
        let run = run_kcopy(&prepared.plan, &instance);
        let ratio = Rational::from(run.bins_used) / Rational::from(bounds.ub_ffd.max(1));
        let ceiling = &prepared.plan.target * (Rational::one() + tol);
        rows.push(row(
            &point,
            &format!("kcopy {}", prepared.label),
            ratio <= ceiling,
            format!("{} (copy {})", ratio.to_decimal_ceil(4), run.winner),
            format!("<= {}", ceiling.to_decimal_ceil(4)),
        ));
        if let Some(index) = prepared.plan.copy_for(r_l_star) {
            let copy = &prepared.plan.copies[index];
            if let Some(warning) = realized_warning(&instance, &copy.r_min, &copy.r_max) {
                rows.push(CheckRow {
                    point: point.clone(),
                    check: format!("copy-interval {}", prepared.label),
                    status: Status::Warn,
                    value: warning,
                    limit: format!("copy {index}"),
                });
            }
        }
    }
    rows
}

fn fuzz_rows(items: usize, seed: u64) -> Vec<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream: Vec<Item> = (0..items)
        .map(|_| {
            let den = rng.gen_range(2..=1000);
            Item::new(q(rng.gen_range(1..=den), den)).expect("size in (0, 1]")
        })
        .collect();
    let instance = Instance::new(stream, format!("fuzz seed={seed}"));
    let point = format!("fuzz n={items} seed={seed}");
    let algorithms = [
        Algorithm::Ph3(Ph3Config::new(q(1, 19)).expect("1/19 in range")),
        Algorithm::NextFit,
        Algorithm::FirstFit,
        Algorithm::BestFit,
    ];
    algorithms
        .par_iter()
        .map(|a| {
            let result = run_online(a, &instance);
            let invariants = match a {
                Algorithm::Ph3(_) => result.state.check_ph3_invariants(),
                _ => Ok(()),
            };
            let ok = result.is_feasible() && invariants.is_ok();
            row(
                &point,
                &format!("feasible {a}"),
                ok,
                invariants
                    .err()
                    .unwrap_or_else(|| format!("{} bins", result.bins_used)),
                "no overfull bin",
            )
        })
        .collect()
}

pub fn run(args: VerifyArgs) -> Result<(), Failure> {
    let config = load_config(args.config.as_ref())?;
    let tol = parse(&config.tolerance_pct.to_string())? / Rational::from(100u64);
    let r_ls = config
        .grid
        .r_l
        .iter()
        .map(|s| parse(s))
        .collect::<Result<Vec<_>>>()?;
    let r_stars = config
        .grid
        .r_l_star
        .iter()
        .map(|s| parse(s))
        .collect::<Result<Vec<_>>>()?;
    for r in r_ls.iter().chain(&r_stars) {
        if r.is_negative() || *r > Rational::one() {
            return Err(Failure::Usage(anyhow::anyhow!(
                "grid value {r} outside [0, 1]"
            )));
        }
    }
    if config.n_values.contains(&0) {
        return Err(Failure::Usage(anyhow::anyhow!("n_values must be positive")));
    }
    let mut rows = Vec::new();
    let points: Vec<(u64, &Rational, &Rational)> = config
        .n_values
        .iter()
        .flat_map(|n| {
            let r_stars = &r_stars;
            r_ls.iter()
                .flat_map(move |a| r_stars.iter().map(move |b| (*n, a, b)))
        })
        .collect();
    if points.is_empty() {
        eprintln!("warning: empty grid, nothing to check");
    } else {
        let mut plans = Vec::new();
        for entry in &config.plans {
            if let Some(p) = prepare_plan(entry, &mut rows)? {
                plans.push(p);
            }
        }
        let per_point: Vec<Vec<CheckRow>> = points
            .par_iter()
            .map(|(n, a, b)| check_point(*n, a, b, &tol, &plans))
            .collect();
        rows.extend(per_point.into_iter().flatten());
    }
    if config.fuzz_items > 0 {
        rows.extend(fuzz_rows(config.fuzz_items, args.seed));
    }
    write_csv(args.out.as_deref(), &rows)?;
    let count = |s: Status| rows.iter().filter(|r| r.status == s).count();
    let failed = count(Status::Fail);
    eprintln!(
        "{} checks: {} pass, {failed} fail, {} skipped, {} warnings",
        rows.len(),
        count(Status::Pass),
        count(Status::Skip),
        count(Status::Warn)
    );
    if failed > 0 {
        let first: Vec<String> = rows
            .iter()
            .filter(|r| r.status == Status::Fail)
            .take(5)
            .map(|r| format!("{} / {}", r.point, r.check))
            .collect();
        return Err(Failure::Verification(format!(
            "{failed} violations, first: {}",
            first.join("; ")
        )));
    }
    Ok(())
}
