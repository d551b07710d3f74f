use std::fs::File;
use std::path::Path;

use anyhow::{Context, Result};
use ph3_core::adversary::{generate, predicted_counts, realized_warning, AdversaryParams};
use ph3_core::packers::{
    run_ffd_traced, run_online_traced, trace_csv, Algorithm, PackingResult, Ph3Config,
};
use ph3_core::planner::{
    advice_bits, best_ratio as search_best_ratio, copies_for_bits, plan_cover, redblue_bound,
    round_half_up, run_kcopy, CoverPlan,
};
use ph3_core::ratio::{empirical_ratio, opt_bounds, r_star};
use ph3_core::{parse_instance, q, Instance, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::report::{line_svg, ratio_columns, write_csv, write_text};
use crate::{
    AdversaryArgs, AlgorithmArg, BestRatioArgs, CurveArgs, Failure, PackArgs, PlanArgs, Table1Args,
};

#[derive(Serialize)]
struct PackRow {
    instance: String,
    algorithm: String,
    items: usize,
    bins_used: usize,
    lb: u64,
    ub_ffd: u64,
    ratio_lo: String,
    ratio_lo_dec: String,
    ratio_hi: String,
    ratio_hi_dec: String,
    winner: Option<usize>,
}

fn load_instance(args: &PackArgs) -> Result<Instance> {
    if let Some(n) = args.random {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let sizes: Vec<Rational> = (0..n)
            .map(|_| {
                let den = rng.gen_range(2..=1000);
                q(rng.gen_range(1..=den), den)
            })
            .collect();
        return Ok(Instance::from_sizes(
            &sizes,
            format!("random n={n} seed={}", args.seed),
        )?);
    }
    let path = args
        .instance
        .as_ref()
        .context("give an instance file or --random N")?;
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_instance(file, path.display().to_string())?)
}

pub fn pack(args: PackArgs) -> Result<(), Failure> {
    let instance = load_instance(&args)?;
    let algorithms = if args.algorithms.is_empty() {
        vec![
            AlgorithmArg::Ph3,
            AlgorithmArg::Nf,
            AlgorithmArg::Ff,
            AlgorithmArg::Bf,
            AlgorithmArg::Ffd,
        ]
    } else {
        args.algorithms.clone()
    };
    let config = Ph3Config::new(args.r_l.clone()).map_err(anyhow::Error::from)?;
    let bounds = opt_bounds(&instance);
    let mut rows = Vec::new();
    for (index, which) in algorithms.iter().enumerate() {
        let (name, result, winner) = run_one(*which, &config, &args.ratio, &instance)?;
        if index == 0 {
            if let (Some(path), Some(trace)) = (&args.trace, &result.trace) {
                write_text(path, &trace_csv(trace))?;
            }
        }
        let bracket = empirical_ratio(&result, &bounds).ok();
        let (lo, lo_dec) = bracket
            .as_ref()
            .map(|b| ratio_columns(&b.0))
            .unwrap_or_default();
        let (hi, hi_dec) = bracket
            .as_ref()
            .map(|b| ratio_columns(&b.1))
            .unwrap_or_default();
        rows.push(PackRow {
            instance: instance.label().to_string(),
            algorithm: name,
            items: instance.len(),
            bins_used: result.bins_used,
            lb: bounds.lb,
            ub_ffd: bounds.ub_ffd,
            ratio_lo: lo,
            ratio_lo_dec: lo_dec,
            ratio_hi: hi,
            ratio_hi_dec: hi_dec,
            winner,
        });
    }
    write_csv(args.out.as_deref(), &rows)?;
    Ok(())
}

fn run_one(
    which: AlgorithmArg,
    config: &Ph3Config,
    ratio: &Rational,
    instance: &Instance,
) -> Result<(String, PackingResult, Option<usize>)> {
    let online = |a: Algorithm| (a.to_string(), run_online_traced(&a, instance), None);
    Ok(match which {
        AlgorithmArg::Ph3 => online(Algorithm::Ph3(config.clone())),
        AlgorithmArg::Nf => online(Algorithm::NextFit),
        AlgorithmArg::Ff => online(Algorithm::FirstFit),
        AlgorithmArg::Bf => online(Algorithm::BestFit),
        AlgorithmArg::Ffd => ("ffd".into(), run_ffd_traced(instance), None),
        AlgorithmArg::Kcopy => {
            let plan = plan_cover(ratio)?;
            let run = run_kcopy(&plan, instance);
            let best = Algorithm::Ph3(plan.copies[run.winner].config());
            let result = run_online_traced(&best, instance);
            (
                format!("kcopy:k={},R={ratio}", plan.k()),
                result,
                Some(run.winner),
            )
        }
    })
}

pub fn plan(args: PlanArgs) -> Result<(), Failure> {
    let plan = plan_cover(&args.ratio).map_err(anyhow::Error::from)?;
    if args.grid > 0 {
        plan.verify_grid(args.grid).map_err(anyhow::Error::from)?;
    }
    eprintln!("R = {} needs k = {} copies", args.ratio, plan.k());
    write_plan(args.out.as_deref(), &plan)?;
    Ok(())
}

fn write_plan(path: Option<&Path>, plan: &CoverPlan) -> Result<()> {
    match path {
        Some(p) => write_text(p, &plan.to_csv()),
        None => {
            print!("{}", plan.to_csv());
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct RatioRow {
    k: usize,
    bits: u32,
    best_ratio: String,
    best_ratio_exact: String,
    copies_used: usize,
}

pub fn best_ratio(args: BestRatioArgs) -> Result<(), Failure> {
    let results: Vec<_> = args
        .k
        .par_iter()
        .map(|&k| search_best_ratio(k, &args.tol).map(|r| (k, r)))
        .collect::<ph3_core::Result<_>>()
        .map_err(anyhow::Error::from)?;
    let rows: Vec<RatioRow> = results
        .iter()
        .map(|(k, (ratio, plan))| {
            let (exact, dec) = ratio_columns(ratio);
            RatioRow {
                k: *k,
                bits: advice_bits(*k as u64),
                best_ratio: dec,
                best_ratio_exact: exact,
                copies_used: plan.k(),
            }
        })
        .collect();
    if let (Some(path), Some((_, (_, plan)))) = (&args.plan_out, results.last()) {
        write_plan(Some(path), plan)?;
    }
    write_csv(args.out.as_deref(), &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    bits: u32,
    k: u64,
    redblue_bound: String,
    best_ratio: String,
    best_ratio_exact: String,
}

pub fn table1(args: Table1Args) -> Result<(), Failure> {
    let rows: Vec<TableRow> = (4..=16u32)
        .into_par_iter()
        .map(|bits| {
            let k = copies_for_bits(bits);
            let (ratio, _) = search_best_ratio(k as usize, &args.tol)?;
            let (exact, dec) = ratio_columns(&ratio);
            Ok(TableRow {
                bits,
                k,
                redblue_bound: format!("{:.4}", round_half_up(redblue_bound(bits), 4)),
                best_ratio: dec,
                best_ratio_exact: exact,
            })
        })
        .collect::<ph3_core::Result<_>>()
        .map_err(anyhow::Error::from)?;
    write_csv(args.out.as_deref(), &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct CurveRow {
    k: usize,
    best_ratio: String,
    best_ratio_exact: String,
}

pub fn curve(args: CurveArgs) -> Result<(), Failure> {
    if args.k_max == 0 {
        return Err(Failure::Usage(anyhow::anyhow!(
            "--k-max must be at least 1"
        )));
    }
    let ratios: Vec<Rational> = (1..=args.k_max)
        .into_par_iter()
        .map(|k| search_best_ratio(k, &args.tol).map(|(r, _)| r))
        .collect::<ph3_core::Result<_>>()
        .map_err(anyhow::Error::from)?;
    let rows: Vec<CurveRow> = ratios
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (exact, dec) = ratio_columns(r);
            CurveRow {
                k: i + 1,
                best_ratio: dec,
                best_ratio_exact: exact,
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = ratios
        .iter()
        .enumerate()
        .map(|(i, r)| ((i + 1) as f64, r.to_f64()))
        .collect();
    let c = fit_rate(&points);
    eprintln!("fit: R(k) ~ 3/2 + {c:.4} / (k + log2(k + 1))");
    write_csv(args.out.as_deref(), &rows)?;
    if let Some(path) = &args.svg {
        let fitted: Vec<(f64, f64)> = points
            .iter()
            .map(|(k, _)| (*k, 1.5 + c * rate(*k)))
            .collect();
        write_text(
            path,
            &line_svg("best ratio against k", &points, Some(&fitted)),
        )?;
    }
    Ok(())
}

fn rate(k: f64) -> f64 {
    1.0 / (k + (k + 1.0).log2())
}

/// Least-squares `c` in `R(k) − 3/2 ≈ c / (k + log2(k + 1))`.
fn fit_rate(points: &[(f64, f64)]) -> f64 {
    let (num, den) = points.iter().fold((0.0, 0.0), |(n, d), (k, r)| {
        let g = rate(*k);
        (n + (r - 1.5) * g, d + g * g)
    });
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn sidecar_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.jsonl");
    name.into()
}

pub fn adversary(args: AdversaryArgs) -> Result<(), Failure> {
    let params = AdversaryParams::new(args.n, args.r_l.clone(), args.r_l_star.clone())
        .map_err(anyhow::Error::from)?;
    let instance = generate(&params);
    let predicted = predicted_counts(&params);
    let counts = params.counts();
    let warning = match (&args.r_min, &args.r_max) {
        (Some(lo), Some(hi)) => realized_warning(&instance, lo, hi),
        _ => None,
    };
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let line = json!({
        "n": params.n(),
        "r_l": params.r_l().to_string(),
        "r_l_star": params.r_l_star().to_string(),
        "epsilon": params.epsilon().to_string(),
        "counts": {
            "n_l": counts.n_l,
            "n_m": counts.n_m,
            "n_ss": counts.n_ss,
            "n_sl": counts.n_sl,
        },
        "items": instance.len(),
        "realized_r_l_star": r_star(&instance).to_string(),
        "predicted": {
            "ph3_lower": predicted.ph3_lower.to_string(),
            "ffd_upper": predicted.ffd_upper.to_string(),
        },
        "warning": warning,
    });
    write_text(&args.out, &instance.to_text())?;
    write_text(&sidecar_path(&args.out), &format!("{line}\n"))?;
    println!(
        "ph3_lower = {} (~{:.4}), ffd_upper = {} (~{:.4})",
        predicted.ph3_lower,
        predicted.ph3_lower.to_f64(),
        predicted.ffd_upper,
        predicted.ffd_upper.to_f64()
    );
    Ok(())
}
