#![allow(dead_code)]

use ph3_core::{q, Instance, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Exact optimum by depth-first search over bin assignments, largest items first.
pub fn brute_force_opt(sizes: &[Rational]) -> usize {
    let mut sorted = sizes.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let mut best = sorted.len();
    let mut loads = Vec::new();
    search(&sorted, 0, &mut loads, &mut best);
    best
}

fn search(items: &[Rational], next: usize, loads: &mut Vec<Rational>, best: &mut usize) {
    if loads.len() >= *best {
        return;
    }
    if next == items.len() {
        *best = loads.len();
        return;
    }
    let item = &items[next];
    for i in 0..loads.len() {
        // Bins with equal loads are interchangeable.
        if loads[..i].contains(&loads[i]) || &loads[i] + item > Rational::one() {
            continue;
        }
        loads[i] += item;
        search(items, next + 1, loads, best);
        loads[i] -= item;
    }
    loads.push(item.clone());
    search(items, next + 1, loads, best);
    loads.pop();
}

const BOUNDARIES: [(i64, i64); 5] = [(1, 3), (1, 2), (2, 3), (1, 1), (1, 6)];

/// A random size in (0, 1], sometimes sitting exactly on a class boundary.
pub fn random_size(rng: &mut ChaCha8Rng) -> Rational {
    if rng.gen_ratio(1, 10) {
        let (n, d) = BOUNDARIES[rng.gen_range(0..BOUNDARIES.len())];
        return q(n, d);
    }
    let den = rng.gen_range(2..=1000);
    q(rng.gen_range(1..=den), den)
}

/// A random size drawn class by class, so every class shows up often.
pub fn random_classed_size(rng: &mut ChaCha8Rng) -> Rational {
    let den: i64 = rng.gen_range(7..=600) * 6;
    let (lo, hi) = match rng.gen_range(0..4) {
        0 => (1, den / 3),
        1 => (den / 3 + 1, den / 2),
        2 => (den / 2 + 1, 2 * den / 3 - 1),
        _ => (2 * den / 3, den),
    };
    q(rng.gen_range(lo..=hi), den)
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_len: usize) -> Instance {
    let len = rng.gen_range(1..=max_len);
    let sizes: Vec<Rational> = (0..len).map(|_| random_size(rng)).collect();
    Instance::from_sizes(&sizes, "fuzz").expect("sizes lie in (0, 1]")
}
