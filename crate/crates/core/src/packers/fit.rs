//! Single-category fit heuristics: Next Fit, First Fit, Best Fit and, on top of
//! First Fit, the offline First Fit Decreasing.

use std::collections::BTreeSet;

use super::{entry, Decision, PackingResult, PackingState};
use crate::model::{BinCategory, Instance, Item};
use crate::rational::Rational;

/// Chooses an existing bin for an item, or `None` to open a new one.
pub(super) trait Strategy {
    fn choose(&mut self, bins: &[crate::model::Bin], item: &Item) -> Option<usize>;
    /// Called after `bin` received an item (or was opened with one).
    fn update(&mut self, bin: usize, remaining: Rational);
    /// Whether opening a new bin retires the previous one for good.
    fn closes_previous(&self) -> bool {
        false
    }
}

#[derive(Default)]
pub(super) struct NextFit;

impl Strategy for NextFit {
    fn choose(&mut self, bins: &[crate::model::Bin], item: &Item) -> Option<usize> {
        let last = bins.len().checked_sub(1)?;
        bins[last].sub_bins()[0].fits(item).then_some(last)
    }

    fn update(&mut self, _bin: usize, _remaining: Rational) {}

    fn closes_previous(&self) -> bool {
        true
    }
}

/// First Fit over a max-segment-tree of remaining capacities.
pub(super) struct FirstFit {
    leaves: usize,
    tree: Vec<Rational>,
}

impl FirstFit {
    pub(super) fn new(max_bins: usize) -> Self {
        let leaves = max_bins.max(1).next_power_of_two();
        FirstFit {
            leaves,
            tree: vec![Rational::zero(); 2 * leaves],
        }
    }
}

impl Strategy for FirstFit {
    fn choose(&mut self, _bins: &[crate::model::Bin], item: &Item) -> Option<usize> {
        if self.tree[1] < *item.size() {
            return None;
        }
        let mut node = 1;
        while node < self.leaves {
            node = if self.tree[2 * node] >= *item.size() {
                2 * node
            } else {
                2 * node + 1
            };
        }
        Some(node - self.leaves)
    }

    fn update(&mut self, bin: usize, remaining: Rational) {
        let mut node = bin + self.leaves;
        self.tree[node] = remaining;
        while node > 1 {
            node /= 2;
            let best = std::cmp::max(&self.tree[2 * node], &self.tree[2 * node + 1]).clone();
            self.tree[node] = best;
        }
    }
}

/// Best Fit: the feasible bin with the least remaining room, lowest index on ties.
#[derive(Default)]
pub(super) struct BestFit {
    by_room: BTreeSet<(Rational, usize)>,
    room: Vec<Rational>,
}

impl Strategy for BestFit {
    fn choose(&mut self, _bins: &[crate::model::Bin], item: &Item) -> Option<usize> {
        self.by_room
            .range((item.size().clone(), 0)..)
            .next()
            .map(|(_, index)| *index)
    }

    fn update(&mut self, bin: usize, remaining: Rational) {
        if bin < self.room.len() {
            self.by_room.remove(&(self.room[bin].clone(), bin));
            self.room[bin] = remaining.clone();
        } else {
            self.room.push(remaining.clone());
        }
        self.by_room.insert((remaining, bin));
    }
}

pub(super) fn pack<'a>(
    mut strategy: impl Strategy,
    items: impl Iterator<Item = (usize, &'a Item)>,
    traced: bool,
) -> PackingResult {
    let mut state = PackingState::new();
    let mut trace = traced.then(Vec::new);
    for (index, item) in items {
        let (decision, slot) = match strategy.choose(&state.bins_generic, item) {
            Some(slot) => (Decision::Existing, slot),
            None => {
                if strategy.closes_previous() {
                    if let Some(last) = state.bins_generic.last_mut() {
                        last.sub_bin_mut(0).close();
                    }
                }
                let bin = state.fresh_bin(BinCategory::Generic);
                state.bins_generic.push(bin);
                (Decision::Opened, state.bins_generic.len() - 1)
            }
        };
        let bin = &mut state.bins_generic[slot];
        bin.sub_bin_mut(0).push(item.clone());
        let remaining = bin.sub_bins()[0].remaining();
        let id = bin.id();
        strategy.update(slot, remaining);
        if let Some(t) = trace.as_mut() {
            t.push(entry(index, item, decision, id));
        }
    }
    PackingResult::from_state(state, trace)
}

/// First Fit Decreasing: sort by size descending (original index ascending on ties),
/// then First Fit. Trace rows keep the original item indices.
pub fn run_ffd(instance: &Instance) -> PackingResult {
    run_ffd_with(instance, false)
}

pub fn run_ffd_traced(instance: &Instance) -> PackingResult {
    run_ffd_with(instance, true)
}

fn run_ffd_with(instance: &Instance, traced: bool) -> PackingResult {
    let mut order: Vec<(usize, &Item)> = instance.items().iter().enumerate().collect();
    order.sort_by(|(i, a), (j, b)| b.size().cmp(a.size()).then(i.cmp(j)));
    pack(FirstFit::new(instance.len()), order.into_iter(), traced)
}
