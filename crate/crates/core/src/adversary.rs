//! Tightness instances for PH3: four item streams with `ε = 1/(12N + 2)`.
//!
//! Small items come first. Each one is taken from the pairs stream
//! `(1/6 − ε, 3ε)` when a shadow PH3 run would route it to an L-bin and from the
//! quadruple stream `(1/3 − 2ε, 1/6 − ε, 1/6 − ε, 12ε)` otherwise. Medium items
//! `1/3 + ε/2` follow, then large items `1/2 + ε/2`.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::model::{Instance, Item};
use crate::packers::{PackingState, Ph3Config};
use crate::ratio::r_star;
use crate::rational::{q, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryParams {
    n: u64,
    r_l: Rational,
    r_l_star: Rational,
    epsilon: Rational,
}

/// Stream lengths: large items, medium items, quadruples and pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamCounts {
    pub n_l: u64,
    pub n_m: u64,
    pub n_ss: u64,
    pub n_sl: u64,
}

/// Closed-form bin counts: a lower bound for PH3 and an upper bound for FFD.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedCounts {
    pub ph3_lower: Rational,
    pub ffd_upper: Rational,
}

fn to_count(value: num_bigint::BigInt) -> u64 {
    value.to_u64().expect("stream length fits in u64")
}

impl AdversaryParams {
    pub fn new(n: u64, r_l: Rational, r_l_star: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("N must be positive".into()));
        }
        for (name, value) in [("r_L", &r_l), ("r_L*", &r_l_star)] {
            if value.is_negative() || *value > Rational::one() {
                return Err(Error::Domain(format!("{name} = {value} outside [0, 1]")));
            }
        }
        let epsilon = Rational::one() / Rational::from(12 * n + 2);
        Ok(AdversaryParams {
            n,
            r_l,
            r_l_star,
            epsilon,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r_l(&self) -> &Rational {
        &self.r_l
    }

    pub fn r_l_star(&self) -> &Rational {
        &self.r_l_star
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn counts(&self) -> StreamCounts {
        let n = Rational::from(self.n);
        let n_m = if self.r_l_star <= q(1, 3) {
            0
        } else {
            to_count(((&self.r_l_star * q(6, 1) - q(2, 1)) * &n).floor())
        };
        StreamCounts {
            n_l: to_count((&self.r_l_star * q(4, 1) * &n).ceil()),
            n_m,
            n_ss: to_count(((Rational::one() - &self.r_l) * &n).ceil()),
            n_sl: to_count((&self.r_l * q(4, 1) * &n).ceil()),
        }
    }

    fn pair(&self) -> [Rational; 2] {
        let e = &self.epsilon;
        [q(1, 6) - e, e * q(3, 1)]
    }

    fn quadruple(&self) -> [Rational; 4] {
        let e = &self.epsilon;
        [
            q(1, 3) - e * q(2, 1),
            q(1, 6) - e,
            q(1, 6) - e,
            e * q(12, 1),
        ]
    }

    pub fn medium_size(&self) -> Rational {
        q(1, 3) + &self.epsilon / q(2, 1)
    }

    pub fn large_size(&self) -> Rational {
        q(1, 2) + &self.epsilon / q(2, 1)
    }

    pub fn label(&self) -> String {
        format!(
            "adversary N={} r_L={} r_L*={}",
            self.n, self.r_l, self.r_l_star
        )
    }
}

/// Cycles through a fixed pattern a given number of times.
struct Stream<'a> {
    pattern: &'a [Item],
    left: u64,
    pos: usize,
}

impl<'a> Stream<'a> {
    fn new(pattern: &'a [Item], repeats: u64) -> Self {
        Stream {
            pattern,
            left: repeats * pattern.len() as u64,
            pos: 0,
        }
    }

    fn next(&mut self) -> Option<Item> {
        if self.left == 0 {
            return None;
        }
        self.left -= 1;
        let item = self.pattern[self.pos].clone();
        self.pos = (self.pos + 1) % self.pattern.len();
        Some(item)
    }
}

fn items(sizes: &[Rational]) -> Vec<Item> {
    sizes
        .iter()
        .map(|s| Item::new(s.clone()).expect("adversary sizes lie in (0, 1]"))
        .collect()
}

/// Builds the instance. The routing predicate is re-evaluated before every small item.
pub fn generate(params: &AdversaryParams) -> Instance {
    let counts = params.counts();
    let shadow = Ph3Config::new(params.r_l.clone()).expect("validated r_L");
    let mut state = PackingState::new();
    let pair = items(&params.pair());
    let quad = items(&params.quadruple());
    let mut to_l = Stream::new(&pair, counts.n_sl);
    let mut to_s = Stream::new(&quad, counts.n_ss);
    let mut out = Vec::new();
    loop {
        let item = if shadow.routes_small_to_l(&state) {
            to_l.next().or_else(|| to_s.next())
        } else {
            to_s.next().or_else(|| to_l.next())
        };
        let Some(item) = item else { break };
        shadow.step(&mut state, item.clone());
        out.push(item);
    }
    let medium = Item::new(params.medium_size()).expect("medium size in range");
    out.extend(std::iter::repeat_n(medium, counts.n_m as usize));
    let large = Item::new(params.large_size()).expect("large size in range");
    out.extend(std::iter::repeat_n(large, counts.n_l as usize));
    Instance::new(out, params.label())
}

/// `PH3 ≥ 3 r* N + max(δ, 0)·4N + n_M/2 + N − δN` and
/// `FFD ≤ ((12 r* + 4) N + 2 n_M + 20)/6`, with `δ = r_L − r*`.
pub fn predicted_counts(params: &AdversaryParams) -> PredictedCounts {
    let counts = params.counts();
    let n = Rational::from(params.n);
    let n_m = Rational::from(counts.n_m);
    let delta = &params.r_l - &params.r_l_star;
    let ph3_lower = &params.r_l_star * q(3, 1) * &n
        + delta.clone().max(Rational::zero()) * q(4, 1) * &n
        + &n_m / q(2, 1)
        + &n
        - &delta * &n;
    let ffd_upper =
        ((&params.r_l_star * q(12, 1) + q(4, 1)) * &n + n_m * q(2, 1) + q(20, 1)) / q(6, 1);
    PredictedCounts {
        ph3_lower,
        ffd_upper,
    }
}

/// Whether the FFD upper bound's accounting applies: there must be enough items of
/// size `1/6 − ε` to give one to every large-plus-medium bin and to top up every bin
/// holding only a large item (one more beside a `1/3 − 2ε` item, three otherwise).
pub fn ffd_accounting_applies(params: &AdversaryParams) -> bool {
    let c = params.counts();
    let lone_large = c.n_l - c.n_m;
    let with_third = c.n_ss.min(lone_large);
    let needed = c.n_m + with_third + 3 * (lone_large - with_third);
    c.n_sl + 2 * c.n_ss >= needed
}

/// Warning text when the instance's realized `r_L*` falls outside `[lo, hi]`.
pub fn realized_warning(instance: &Instance, lo: &Rational, hi: &Rational) -> Option<String> {
    let realized = r_star(instance);
    (realized < *lo || realized > *hi).then(|| {
        format!(
            "realized r_L* = {realized} (~{:.6}) lies outside [{lo}, {hi}]",
            realized.to_f64()
        )
    })
}
