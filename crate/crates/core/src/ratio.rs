//! Closed-form competitive-ratio machinery for PH3.
//!
//! For an instance let `r_L* = min{|I_L| / (6 size(I_S)), 1}` and `δ = r_L − r_L*`.
//! The asymptotic ratio of PH3 with parameter `r_L` is bounded by
//!
//! ```text
//!   δ ≤ 0:  3/2 + min{1/(4 r_L*), 3/(6 r_L* + 2)} · (−δ)
//!   δ ≥ 0:  3/2 + min{3/(4 r_L*), 9/(6 r_L* + 2)} · δ
//! ```
//!
//! with the `1/r_L*` terms read as +∞ at `r_L* = 0`. The first term of each min binds
//! for `r_L* ≥ 1/3`, the second for `r_L* ≤ 1/3`; they agree at the seam.

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, ItemClass};
use crate::packers::{run_ffd, PackingResult};
use crate::rational::{q, Rational};

/// Lower bounds on the optimum together with the FFD upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptBounds {
    /// `|I_XL| + |I_L|`: no two of these share a bin.
    pub lb_count: u64,
    /// `|I_XL| + (|I_M| + |I_L|) / 2`: at most two items above 1/3 per bin.
    pub lb_pairs: Rational,
    /// Total size.
    pub lb_size: Rational,
    /// Ceiling of the largest of the three.
    pub lb: u64,
    pub ub_ffd: u64,
}

pub fn opt_bounds(instance: &Instance) -> OptBounds {
    let xl = instance.class_count(ItemClass::XL) as u64;
    let large = instance.class_count(ItemClass::L) as u64;
    let medium = instance.class_count(ItemClass::M) as u64;
    let lb_count = xl + large;
    let lb_pairs = Rational::from(xl) + Rational::from(medium + large) * q(1, 2);
    let lb_size = instance.total_size();
    let best = Rational::from(lb_count)
        .max(lb_pairs.clone())
        .max(lb_size.clone());
    let lb = to_u64(best.ceil());
    let ub_ffd = run_ffd(instance).bins_used as u64;
    OptBounds {
        lb_count,
        lb_pairs,
        lb_size,
        lb,
        ub_ffd,
    }
}

fn to_u64(n: BigInt) -> u64 {
    n.to_u64().expect("bin counts fit in u64")
}

/// `min{|I_L| / (6 size(I_S)), 1}`; instances without small items give 1.
pub fn r_star(instance: &Instance) -> Rational {
    let small = instance.class_size(ItemClass::S);
    if small.is_zero() {
        return Rational::one();
    }
    let large = Rational::from(instance.class_count(ItemClass::L));
    (large / (small * q(6, 1))).min(Rational::one())
}

/// Which term of the min attains the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    /// The `1/(4 r_L*)` (resp. `3/(4 r_L*)`) term; `r_L* ≥ 1/3`.
    Reciprocal,
    /// The `3/(6 r_L* + 2)` (resp. `9/(6 r_L* + 2)`) term; `r_L* ≤ 1/3`.
    Affine,
    /// `δ = 0`; no slope applies.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioBound {
    pub r_l: Rational,
    pub r_l_star: Rational,
    pub delta: Rational,
    pub value: Rational,
    pub binding: Binding,
}

impl RatioBound {
    /// `r_L` above `r_L*`: more small mass routed to L-bins than needed.
    pub fn overshoots(&self) -> bool {
        self.delta.is_positive()
    }

    /// `r_L* ≤ 1/3`, the small-item-surplus regime.
    pub fn small_surplus(&self) -> bool {
        self.r_l_star <= q(1, 3)
    }
}

fn unit_interval(name: &str, x: &Rational) -> Result<()> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::Domain(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

/// Asymptotic competitive-ratio bound of PH3(`r_l`) on instances with the given `r_L*`.
pub fn ph3_ratio_bound(r_l: &Rational, r_l_star: &Rational) -> Result<RatioBound> {
    unit_interval("r_L", r_l)?;
    unit_interval("r_L*", r_l_star)?;
    let delta = r_l - r_l_star;
    let binding = if delta.is_zero() {
        Binding::None
    } else if *r_l_star > q(1, 3) {
        Binding::Reciprocal
    } else {
        Binding::Affine
    };
    let (num, den) = bound_fraction(r_l.numer(), r_l.denom(), r_l_star.numer(), r_l_star.denom());
    Ok(RatioBound {
        r_l: r_l.clone(),
        r_l_star: r_l_star.clone(),
        delta,
        value: Rational::from_big(num, den).expect("positive denominator"),
        binding,
    })
}

/// The bound for `r_L = c/d` and `r_L* = a/b` as an unreduced fraction (positive
/// denominator). Skips normalisation so dense sampling stays cheap.
///
/// The reciprocal term is the smaller one exactly when `r_L* > 1/3`.
pub(crate) fn bound_fraction(c: &BigInt, d: &BigInt, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let delta = c * b - a * d;
    let (scale, magnitude) = match delta.sign() {
        Sign::NoSign => return (BigInt::from(3), BigInt::from(2)),
        Sign::Minus => (1, -delta),
        Sign::Plus => (3, delta),
    };
    // slope = p / s
    let three_a = a * 3;
    let (p, s) = if a.is_zero() || &three_a <= b {
        (b * (3 * scale), three_a * 2 + b * 2)
    } else {
        (b * scale, a * 4)
    };
    let den = s * d * b;
    let num = &den * 3 + p * magnitude * 2;
    (num, den * 2)
}

/// Worst cases over `r_L*`: `(7/4 − r_L/4, 3/2 + 9 r_L / 2)`, attained at `r_L* = 1`
/// and `r_L* = 0` respectively.
pub fn envelope_bounds(r_l: &Rational) -> Result<(Rational, Rational)> {
    unit_interval("r_L", r_l)?;
    Ok((q(7, 4) - r_l * q(1, 4), q(3, 2) + r_l * q(9, 2)))
}

/// The `r_L` minimising the larger envelope, and that minimum: `(1/19, 33/19)`.
///
/// Both envelopes are lines `a + b·r_L` with slopes of opposite sign, so the optimum
/// of the two-constraint linear program sits where they cross.
pub fn one_copy_optimum() -> (Rational, Rational) {
    let (falling_at, falling_slope) = (q(7, 4), q(-1, 4));
    let (rising_at, rising_slope) = (q(3, 2), q(9, 2));
    let r_l = (&falling_at - &rising_at) / (&rising_slope - &falling_slope);
    let ratio = rising_at + rising_slope * &r_l;
    (r_l, ratio)
}

/// Certified bracket `(bins / ub_ffd, bins / lb)` on the ratio attained on one instance.
pub fn empirical_ratio(result: &PackingResult, bounds: &OptBounds) -> Result<(Rational, Rational)> {
    if bounds.lb == 0 || bounds.ub_ffd == 0 {
        return Err(Error::Domain("empty instance has no ratio".into()));
    }
    let bins = Rational::from(result.bins_used);
    Ok((
        &bins / Rational::from(bounds.ub_ffd),
        bins / Rational::from(bounds.lb),
    ))
}

/// Whether `[lo, hi]` contains a point within relative distance `tol` of `target`.
pub fn bracket_near(bracket: &(Rational, Rational), target: &Rational, tol: &Rational) -> bool {
    let low = target * (Rational::one() - tol);
    let high = target * (Rational::one() + tol);
    bracket.0 <= high && bracket.1 >= low
}
