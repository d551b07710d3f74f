//! k-copy ensembles: interval covers of the `r_L*` range for a target ratio, the
//! binary search for the best ratio with k copies, advice-bit conversion and the
//! RedBlue comparison bound.
//!
//! A cover for target `R` is built left to right. Starting from `r_min = 0`, each copy
//! chooses the `r_L` whose over-routing bound at `r_min` equals `R` exactly, then
//! extends its interval to the largest `r_L*` whose under-routing bound is still `R`.
//! The next copy starts where the previous interval ends, until `r_max ≥ 1`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::packers::{run_online, Algorithm, Ph3Config};
use crate::ratio::{bound_fraction, one_copy_optimum};
use crate::rational::{q, Rational};

/// Hard cap on cover iterations.
pub const MAX_COVER_STEPS: usize = 1_000_000;

/// Interior sample count used when [`plan_cover`] re-verifies each interval.
pub const INTERVAL_SAMPLES: usize = 1000;

/// Interior samples per interval for the plan returned by [`best_ratio`]. Plans there
/// run to 65536 copies, so the dense grid is left to explicit [`CoverPlan::verify`] calls.
pub const BEST_RATIO_SAMPLES: usize = 1;

/// Past this many denominator bits an interval end is floored onto a dyadic grid,
/// which only shortens intervals and keeps long chains cheap.
const COARSEN_ABOVE_BITS: u64 = 64;
const COARSEN_TO_BITS: u32 = 64;

/// Grid of the fixed-point chain behind [`cover_size`] and [`best_ratio`].
const FIXED_BITS: usize = 64;

/// The default binary-search tolerance.
pub fn default_tolerance() -> Rational {
    q(1, 1_000_000_000)
}

/// One PH3 copy and the `r_L*` interval on which it meets the target ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopySpec {
    pub r_l: Rational,
    pub r_min: Rational,
    pub r_max: Rational,
    /// Largest sampled bound over the interval, once verified.
    pub verified_max_bound: Option<Rational>,
}

impl CopySpec {
    pub fn config(&self) -> Ph3Config {
        Ph3Config::new(self.r_l.clone()).expect("cover keeps r_L in [0, 1]")
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.r_min <= *r && *r <= self.r_max
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPlan {
    pub target: Rational,
    pub copies: Vec<CopySpec>,
}

fn check_target(target: &Rational) -> Result<()> {
    if *target <= q(3, 2) || *target >= q(33, 19) {
        return Err(Error::Domain(format!(
            "target ratio {target} outside (3/2, 33/19)"
        )));
    }
    Ok(())
}

/// Step constants for one target ratio; everything that does not depend on `r_min`.
struct Kernel {
    target: Rational,
    excess: Rational,
    /// `(2R − 3) / (12 − 6R)` and `3 / (12 − 6R)`: `r_max1 = r_L·m1_slope + m1_at`.
    m1_at: Rational,
    m1_slope: Rational,
    /// `1 / (7 − 4R)`: `r_max2 = r_L·m2_slope`.
    m2_slope: Rational,
}

impl Kernel {
    fn new(target: &Rational) -> Self {
        let excess = target - q(3, 2);
        let m1_den = q(12, 1) - target * q(6, 1);
        let m1_at = (target * q(2, 1) - q(3, 1)) / &m1_den;
        let m1_slope = q(3, 1) / &m1_den;
        let m2_slope = Rational::one() / (q(7, 1) - target * q(4, 1));
        Kernel {
            target: target.clone(),
            excess,
            m1_at,
            m1_slope,
            m2_slope,
        }
    }

    fn step(&self, r_min: &Rational) -> (Rational, Rational) {
        let reach = if *r_min <= q(1, 3) {
            (r_min * q(6, 1) + q(2, 1)) / q(9, 1)
        } else {
            r_min * q(4, 3)
        };
        let r_l = (r_min + &self.excess * reach).min(Rational::one());
        let m1 = &r_l * &self.m1_slope + &self.m1_at;
        let m2 = &r_l * &self.m2_slope;
        (r_l, m1.max(m2))
    }

    /// Interval end used to seed the next copy.
    fn next_start(r_min: &Rational, r_max: Rational) -> Rational {
        if r_max.denom_bits() > COARSEN_ABOVE_BITS {
            let floored = r_max.floor_dyadic(COARSEN_TO_BITS);
            if floored > *r_min {
                return floored;
            }
        }
        r_max
    }
}

/// One exact cover step from `r_min` for target ratio `target`.
///
/// `r_L = r_min + (R − 3/2)(2 + 6 r_min)/9` for `r_min ≤ 1/3`, otherwise
/// `r_min + (R − 3/2)(4 r_min)/3`, capped at 1. The interval end is the larger of
/// `(3 r_L − 3 + 2R)/(12 − 6R)` and `r_L/(7 − 4R)`.
pub fn cover_step(r_min: &Rational, target: &Rational) -> Result<CopySpec> {
    check_target(target)?;
    if r_min.is_negative() || *r_min >= Rational::one() {
        return Err(Error::Domain(format!("r_min = {r_min} outside [0, 1)")));
    }
    let (r_l, r_max) = Kernel::new(target).step(r_min);
    Ok(CopySpec {
        r_l,
        r_min: r_min.clone(),
        r_max,
        verified_max_bound: None,
    })
}

/// Number of copies a cover for `target` needs, or `None` once it exceeds `limit`.
///
/// Counts on the fixed-point chain of [`plan_cover_fixed`].
pub fn cover_size(target: &Rational, limit: usize) -> Result<Option<usize>> {
    check_target(target)?;
    let kernel = FixedKernel::new(target);
    let mut r = BigInt::zero();
    let mut copies = 0;
    while r < kernel.scale {
        if copies >= MAX_COVER_STEPS {
            return Err(progress_error(target));
        }
        if copies >= limit {
            return Ok(None);
        }
        let (_, next) = kernel.step(&r);
        if next <= r {
            return Err(progress_error(target));
        }
        r = next;
        copies += 1;
    }
    Ok(Some(copies))
}

/// The cover step on multiples of `2^-64`: `r_L` and the interval end are rounded
/// down after every step. Rounding `r_L` down only lowers the bound at `r_min`; the
/// end is then derived from the rounded `r_L`, so each interval stays sound.
struct FixedKernel {
    scale: BigInt,
    /// `R − 3/2 = excess_num / excess_den`.
    excess_num: BigInt,
    excess_den: BigInt,
    r_num: BigInt,
    r_den: BigInt,
}

impl FixedKernel {
    fn new(target: &Rational) -> Self {
        let excess = target - q(3, 2);
        FixedKernel {
            scale: BigInt::one() << FIXED_BITS,
            excess_num: excess.numer().clone(),
            excess_den: excess.denom().clone(),
            r_num: target.numer().clone(),
            r_den: target.denom().clone(),
        }
    }

    /// `(r_L, r_max)` scaled by `2^64`, both floored.
    fn step(&self, r_min: &BigInt) -> (BigInt, BigInt) {
        let k = |v: u32| BigInt::from(v);
        let (c, e) = (&self.excess_num, &self.excess_den);
        let boost = if r_min * k(3) <= self.scale {
            (c * (&self.scale * k(2) + r_min * k(6))).div_floor(&(e * k(9)))
        } else {
            (c * r_min * k(4)).div_floor(&(e * k(3)))
        };
        let r_l = (r_min + boost).min(self.scale.clone());
        let (n, d) = (&self.r_num, &self.r_den);
        let m1 = (&r_l * d * k(3) + (n * k(2) - d * k(3)) * &self.scale)
            .div_floor(&(d * k(12) - n * k(6)));
        let m2 = (&r_l * d).div_floor(&(d * k(7) - n * k(4)));
        (r_l, m1.max(m2))
    }

    fn unscale(&self, x: BigInt) -> Rational {
        Rational::from_big(x, self.scale.clone()).expect("nonzero scale")
    }
}

/// As [`plan_cover_sampled`], but built on the fixed-point chain used by
/// [`cover_size`], so its length agrees with that count.
pub fn plan_cover_fixed(target: &Rational, samples: usize) -> Result<CoverPlan> {
    check_target(target)?;
    let kernel = FixedKernel::new(target);
    let mut copies = Vec::new();
    let mut r = BigInt::zero();
    while r < kernel.scale {
        if copies.len() >= MAX_COVER_STEPS {
            return Err(progress_error(target));
        }
        let (r_l, next) = kernel.step(&r);
        if next <= r {
            return Err(progress_error(target));
        }
        copies.push(CopySpec {
            r_l: kernel.unscale(r_l),
            r_min: kernel.unscale(r.clone()),
            r_max: kernel.unscale(next.clone().min(kernel.scale.clone())),
            verified_max_bound: None,
        });
        r = next;
    }
    let mut plan = CoverPlan {
        target: target.clone(),
        copies,
    };
    plan.verify(samples)?;
    Ok(plan)
}

fn progress_error(target: &Rational) -> Error {
    Error::Progress {
        target: target.to_string(),
        steps: MAX_COVER_STEPS,
    }
}

/// Builds the cover for `target` and re-verifies every interval on a grid of
/// [`INTERVAL_SAMPLES`] interior points plus both endpoints.
pub fn plan_cover(target: &Rational) -> Result<CoverPlan> {
    plan_cover_sampled(target, INTERVAL_SAMPLES)
}

/// As [`plan_cover`] with a custom number of interior samples per interval.
pub fn plan_cover_sampled(target: &Rational, samples: usize) -> Result<CoverPlan> {
    check_target(target)?;
    let kernel = Kernel::new(target);
    let mut copies = Vec::new();
    let mut r_min = Rational::zero();
    while r_min < Rational::one() {
        if copies.len() >= MAX_COVER_STEPS {
            return Err(progress_error(target));
        }
        let (r_l, r_max) = kernel.step(&r_min);
        if r_max <= r_min {
            return Err(progress_error(target));
        }
        let next = Kernel::next_start(&r_min, r_max);
        copies.push(CopySpec {
            r_l,
            r_min: r_min.clone(),
            r_max: next.clone().min(Rational::one()),
            verified_max_bound: None,
        });
        r_min = next;
    }
    let mut plan = CoverPlan {
        target: kernel.target,
        copies,
    };
    plan.verify(samples)?;
    Ok(plan)
}

impl CoverPlan {
    pub fn k(&self) -> usize {
        self.copies.len()
    }

    /// `copies[0].r_min = 0`, each interval starts where the previous one ends, each
    /// interval is non-degenerate and the last one reaches 1.
    pub fn check_contiguous(&self) -> Result<()> {
        let first = self
            .copies
            .first()
            .ok_or_else(|| Error::Verification("plan has no copies".into()))?;
        if !first.r_min.is_zero() {
            return Err(Error::Verification(
                "first interval does not start at 0".into(),
            ));
        }
        for (i, pair) in self.copies.windows(2).enumerate() {
            if pair[1].r_min != pair[0].r_max {
                return Err(Error::Verification(format!("gap after copy {i}")));
            }
        }
        for (i, c) in self.copies.iter().enumerate() {
            if c.r_max <= c.r_min {
                return Err(Error::Verification(format!("copy {i} interval is empty")));
            }
        }
        if self.copies.last().is_none_or(|c| c.r_max < Rational::one()) {
            return Err(Error::Verification("cover stops short of 1".into()));
        }
        Ok(())
    }

    /// Samples the bound of each copy on `samples` interior points plus endpoints,
    /// recording the largest value; fails if any exceeds the target.
    pub fn verify(&mut self, samples: usize) -> Result<()> {
        self.check_contiguous()?;
        let target = &self.target;
        let maxima: Vec<Result<Rational>> = self
            .copies
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let worst = sampled_max_bound(c, samples);
                if worst > *target {
                    return Err(Error::Verification(format!(
                        "copy {i} (r_L = {}) reaches {} > {target} on [{}, {}]",
                        c.r_l, worst, c.r_min, c.r_max
                    )));
                }
                Ok(worst)
            })
            .collect();
        for (copy, worst) in self.copies.iter_mut().zip(maxima) {
            copy.verified_max_bound = Some(worst?);
        }
        Ok(())
    }

    /// Checks that every point `j / points` of `[0, 1]` is served by some copy whose
    /// bound there is at most the target. Returns the number of points checked.
    pub fn verify_grid(&self, points: usize) -> Result<usize> {
        let points = points.max(1);
        let failures: Vec<usize> = (0..=points)
            .into_par_iter()
            .filter(|j| {
                let r = q(*j as i64, points as i64);
                !self.serves(&r)
            })
            .collect();
        match failures.first() {
            None => Ok(points + 1),
            Some(j) => Err(Error::Verification(format!(
                "r_L* = {j}/{points} not covered at ratio {}",
                self.target
            ))),
        }
    }

    fn serves(&self, r: &Rational) -> bool {
        let target = (self.target.numer().clone(), self.target.denom().clone());
        let ok = |c: &CopySpec| {
            let value = bound_fraction(c.r_l.numer(), c.r_l.denom(), r.numer(), r.denom());
            fraction_cmp(&value, &target) != Ordering::Greater
        };
        // Intervals are sorted; check the containing copies first.
        let start = self.copies.partition_point(|c| c.r_max < *r);
        self.copies[start..]
            .iter()
            .take_while(|c| c.r_min <= *r)
            .any(ok)
            || self.copies.iter().any(ok)
    }

    /// Index of a copy whose interval contains `r`.
    pub fn copy_for(&self, r: &Rational) -> Option<usize> {
        let index = self.copies.partition_point(|c| c.r_max < *r);
        (index < self.copies.len() && self.copies[index].contains(r)).then_some(index)
    }

    /// Plan CSV: `copy_index,r_L,r_min,r_max,verified_max_bound`, exact `p/q` values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("copy_index,r_L,r_min,r_max,verified_max_bound\n");
        for (i, c) in self.copies.iter().enumerate() {
            let verified = c
                .verified_max_bound
                .as_ref()
                .map(Rational::to_string)
                .unwrap_or_default();
            out.push_str(&format!(
                "{i},{},{},{},{verified}\n",
                c.r_l, c.r_min, c.r_max
            ));
        }
        out
    }

    /// Reads a plan CSV for the given target; verified bounds are discarded.
    pub fn from_csv(text: &str, target: Rational) -> Result<Self> {
        let mut copies = Vec::new();
        for (index, line) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with("copy_index") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 4 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected copy_index,r_L,r_min,r_max".into(),
                });
            }
            let field = |i: usize| {
                Rational::parse(fields[i]).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })
            };
            copies.push(CopySpec {
                r_l: field(1)?,
                r_min: field(2)?,
                r_max: field(3)?,
                verified_max_bound: None,
            });
        }
        Ok(CoverPlan { target, copies })
    }
}

fn sampled_max_bound(copy: &CopySpec, samples: usize) -> Rational {
    // Sample j of n + 1 is (a0·b1·(n + 1 − j) + a1·b0·j) / (b0·b1·(n + 1)).
    let (a0, b0) = (copy.r_min.numer(), copy.r_min.denom());
    let (a1, b1) = (copy.r_max.numer(), copy.r_max.denom());
    let parts = samples as u64 + 1;
    let den = b0 * b1 * BigInt::from(parts);
    let (lo, hi) = (a0 * b1, a1 * b0);
    let (c, d) = (copy.r_l.numer(), copy.r_l.denom());
    let mut worst = (BigInt::zero(), BigInt::one());
    for j in 0..=parts {
        let num = &lo * BigInt::from(parts - j) + &hi * BigInt::from(j);
        let value = bound_fraction(c, d, &num, &den);
        if fraction_cmp(&value, &worst) == Ordering::Greater {
            worst = value;
        }
    }
    Rational::from_big(worst.0, worst.1).expect("positive denominator")
}

/// Compares `a/b` with `c/d` for positive denominators.
fn fraction_cmp(x: &(BigInt, BigInt), y: &(BigInt, BigInt)) -> Ordering {
    (&x.0 * &y.1).cmp(&(&y.0 * &x.1))
}

/// The single-copy plan: `r_L = 1/19` serving all of `[0, 1]` at ratio 33/19.
pub fn one_copy_plan() -> CoverPlan {
    let (r_l, ratio) = one_copy_optimum();
    let mut plan = CoverPlan {
        target: ratio,
        copies: vec![CopySpec {
            r_l,
            r_min: Rational::zero(),
            r_max: Rational::one(),
            verified_max_bound: None,
        }],
    };
    plan.verify(INTERVAL_SAMPLES)
        .expect("the one-copy optimum covers [0, 1]");
    plan
}

/// Smallest ratio (to within `tol`) that at most `k` copies guarantee, with its plan.
///
/// Bisects `[3/2, 33/19]`; the upper end is always feasible via [`one_copy_plan`].
/// Feasibility is [`cover_size`] on the fixed-point chain, and the returned ratio is
/// the feasible end of the final bracket.
pub fn best_ratio(k: usize, tol: &Rational) -> Result<(Rational, CoverPlan)> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if !tol.is_positive() {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let mut lo = q(3, 2);
    let mut hi = q(33, 19);
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) * q(1, 2);
        if cover_size(&mid, k)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi == q(33, 19) {
        return Ok((hi, one_copy_plan()));
    }
    let plan = plan_cover_fixed(&hi, BEST_RATIO_SAMPLES)?;
    Ok((hi, plan))
}

/// Advice bits that simulate `k` copies: `⌈log2 k⌉`.
pub fn advice_bits(k: u64) -> u32 {
    assert!(k >= 1, "k must be at least 1");
    if k == 1 {
        0
    } else {
        64 - (k - 1).leading_zeros()
    }
}

/// Copies simulated by `bits` advice bits: `2^bits`.
pub fn copies_for_bits(bits: u32) -> u64 {
    1u64 << bits
}

/// RedBlue's ratio bound with `bits` of advice: `1.5 + 15 / 2^(bits/2 + 1)`.
pub fn redblue_bound(bits: u32) -> f64 {
    1.5 + 15.0 / 2f64.powf(bits as f64 / 2.0 + 1.0)
}

/// Rounds half away from zero at `places` decimals, as printed in comparison tables.
pub fn round_half_up(value: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (value * scale + 0.5).floor() / scale
}

/// Result of running every copy of a plan on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCopyRun {
    pub bins_used: usize,
    /// Lowest index among the copies attaining `bins_used`.
    pub winner: usize,
    pub per_copy: Vec<usize>,
}

/// Runs PH3 once per copy and keeps the best.
pub fn run_kcopy(plan: &CoverPlan, instance: &Instance) -> KCopyRun {
    let per_copy: Vec<usize> = plan
        .copies
        .par_iter()
        .map(|c| run_online(&Algorithm::Ph3(c.config()), instance).bins_used)
        .collect();
    let (winner, bins_used) = per_copy
        .iter()
        .copied()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.cmp(b).then(i.cmp(j)))
        .unwrap_or((0, 0));
    KCopyRun {
        bins_used,
        winner,
        per_copy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::ph3_ratio_bound;

    /// Direct transcription of the step formulas, without the precomputed kernel.
    fn step_oracle(r_min: &Rational, target: &Rational) -> (Rational, Rational) {
        let c = target - q(3, 2);
        let r_l = if *r_min <= q(1, 3) {
            r_min + &c * (q(2, 1) + r_min * q(6, 1)) / q(9, 1)
        } else {
            r_min + &c * (r_min * q(4, 1)) / q(3, 1)
        };
        let r_l = r_l.min(Rational::one());
        let m1 = (&r_l * q(3, 1) - q(3, 1) + target * q(2, 1)) / (q(12, 1) - target * q(6, 1));
        let m2 = &r_l / (q(7, 1) - target * q(4, 1));
        (r_l, m1.max(m2))
    }

    #[test]
    fn first_step_at_1_5815() {
        let target = Rational::parse("1.5815").unwrap();
        let spec = cover_step(&Rational::zero(), &target).unwrap();
        assert_eq!(spec.r_l, q(163, 9000));
        let (r_l, r_max) = step_oracle(&Rational::zero(), &target);
        assert_eq!((spec.r_l.clone(), spec.r_max.clone()), (r_l, r_max));
        assert!((spec.r_max.to_f64() - 0.08655).abs() < 1e-5);
        assert_eq!(
            ph3_ratio_bound(&spec.r_l, &spec.r_max).unwrap().value,
            target
        );
        assert_eq!(
            ph3_ratio_bound(&spec.r_l, &spec.r_min).unwrap().value,
            target
        );
    }

    #[test]
    fn step_hits_target_at_r_min() {
        let target = q(8, 5);
        for r_min in [q(0, 1), q(1, 10), q(1, 3), q(1, 2), q(3, 4)] {
            let spec = cover_step(&r_min, &target).unwrap();
            assert_eq!(
                step_oracle(&r_min, &target),
                (spec.r_l.clone(), spec.r_max.clone())
            );
            assert!(spec.r_max > r_min);
            if spec.r_l < Rational::one() {
                assert_eq!(ph3_ratio_bound(&spec.r_l, &r_min).unwrap().value, target);
            }
        }
    }

    #[test]
    fn seam_branches_agree() {
        let target = Rational::parse("1.55").unwrap();
        let c = &target - q(3, 2);
        let third = q(1, 3);
        let affine = &third + &c * (q(2, 1) + &third * q(6, 1)) / q(9, 1);
        let reciprocal = &third + &c * (&third * q(4, 1)) / q(3, 1);
        assert_eq!(affine, reciprocal);
        assert_eq!(cover_step(&third, &target).unwrap().r_l, affine);
    }

    #[test]
    fn step_domain() {
        assert!(cover_step(&Rational::zero(), &q(3, 2)).is_err());
        assert!(cover_step(&Rational::zero(), &q(33, 19)).is_err());
        assert!(cover_step(&Rational::one(), &q(8, 5)).is_err());
        assert!(plan_cover(&q(2, 1)).is_err());
    }

    #[test]
    fn paper_cover_sizes() {
        let plan = plan_cover(&Rational::parse("1.5815").unwrap()).unwrap();
        assert_eq!(plan.k(), 6);
        plan.check_contiguous().unwrap();
        let plan = plan_cover(&Rational::parse("1.5402").unwrap()).unwrap();
        assert_eq!(plan.k(), 12);
        assert_eq!(
            cover_size(&Rational::parse("1.5815").unwrap(), 100).unwrap(),
            Some(6)
        );
        assert_eq!(
            cover_size(&Rational::parse("1.5815").unwrap(), 5).unwrap(),
            None
        );
    }

    #[test]
    fn fixed_chain_agrees_with_exact_chain() {
        for i in 1..40 {
            let target = q(3, 2) + (q(33, 19) - q(3, 2)) * q(i, 40);
            let exact = plan_cover(&target).unwrap().k();
            assert_eq!(cover_size(&target, usize::MAX).unwrap(), Some(exact));
            let fixed = plan_cover_fixed(&target, 10).unwrap();
            assert_eq!(fixed.k(), exact);
            fixed.verify_grid(1000).unwrap();
        }
    }

    #[test]
    fn near_one_copy_optimum() {
        let target = q(33, 19) - q(1, 1000);
        let plan = plan_cover(&target).unwrap();
        assert!(plan.k() >= 1);
        plan.verify_grid(2000).unwrap();
    }

    #[test]
    fn widened_plan_fails_verification() {
        let mut plan = plan_cover(&Rational::parse("1.5815").unwrap()).unwrap();
        plan.copies[1].r_max = &plan.copies[1].r_max + q(5, 100);
        plan.copies[2].r_min = plan.copies[1].r_max.clone();
        assert!(matches!(plan.verify(100), Err(Error::Verification(_))));
    }

    #[test]
    fn best_ratio_small_k() {
        let tol = q(1, 1_000_000);
        let (r1, plan1) = best_ratio(1, &tol).unwrap();
        assert_eq!(r1, q(33, 19));
        assert_eq!(plan1.k(), 1);
        let (r6, plan6) = best_ratio(6, &tol).unwrap();
        assert!(plan6.k() <= 6);
        assert!(r6 < Rational::parse("1.5815").unwrap());
        // One tolerance step lower is infeasible.
        assert_eq!(cover_size(&(&r6 - &tol), 6).unwrap(), None);
        assert!(best_ratio(0, &tol).is_err());
        assert!(best_ratio(3, &Rational::zero()).is_err());
    }

    #[test]
    fn advice_conversion() {
        assert_eq!(advice_bits(1), 0);
        assert_eq!(advice_bits(2), 1);
        assert_eq!(advice_bits(6), 3);
        assert_eq!(advice_bits(16), 4);
        assert_eq!(advice_bits(17), 5);
        assert_eq!(copies_for_bits(4), 16);
        assert_eq!(copies_for_bits(0), 1);
    }

    #[test]
    fn redblue_values() {
        assert_eq!(redblue_bound(4), 3.375);
        assert_eq!(redblue_bound(6), 2.4375);
        assert_eq!(round_half_up(redblue_bound(16), 4), 1.5293);
        assert_eq!(round_half_up(redblue_bound(8), 4), 1.9688);
    }

    #[test]
    fn csv_round_trip() {
        let plan = plan_cover(&Rational::parse("1.6").unwrap()).unwrap();
        let csv = plan.to_csv();
        assert!(csv.starts_with("copy_index,r_L,r_min,r_max,verified_max_bound\n"));
        let mut back = CoverPlan::from_csv(&csv, plan.target.clone()).unwrap();
        back.verify(INTERVAL_SAMPLES).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn kcopy_single_and_empty() {
        let plan = one_copy_plan();
        let inst = Instance::from_sizes(&[q(3, 5), q(1, 4), q(2, 5), q(1, 10)], "t").unwrap();
        let run = run_kcopy(&plan, &inst);
        let alone = run_online(&Algorithm::Ph3(plan.copies[0].config()), &inst);
        assert_eq!(run.bins_used, alone.bins_used);
        assert_eq!(run.winner, 0);
        let plan = plan_cover(&Rational::parse("1.5815").unwrap()).unwrap();
        let run = run_kcopy(&plan, &Instance::default());
        assert_eq!((run.bins_used, run.winner), (0, 0));
        assert_eq!(run.per_copy.len(), 6);
    }
}
