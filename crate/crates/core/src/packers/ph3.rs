use super::{Decision, PackingState};
use crate::error::{Error, Result};
use crate::model::{Bin, BinCategory, Item, ItemClass};
use crate::rational::Rational;

/// PH3 parameter: the target fraction of small-item mass routed into L-bins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ph3Config {
    r_l: Rational,
}

impl Ph3Config {
    pub fn new(r_l: Rational) -> Result<Self> {
        if r_l.is_negative() || r_l > Rational::one() {
            return Err(Error::Domain(format!("r_L = {r_l} outside [0, 1]")));
        }
        Ok(Ph3Config { r_l })
    }

    pub fn r_l(&self) -> &Rational {
        &self.r_l
    }

    /// Whether the next small item goes to an L-bin.
    ///
    /// Both totals are taken before the item is placed. With no small item seen yet
    /// the ratio is undefined; any positive `r_L` then counts as under quota.
    pub fn routes_small_to_l(&self, state: &PackingState) -> bool {
        if state.small_total.is_zero() {
            return self.r_l.is_positive();
        }
        state.small_into_l < &self.r_l * &state.small_total
    }

    /// Places one item and reports the decision and the receiving bin id.
    pub fn step(&self, state: &mut PackingState, item: Item) -> (Decision, usize) {
        match item.class() {
            ItemClass::XL => {
                let mut bin = state.fresh_bin(BinCategory::XL);
                bin.sub_bin_mut(0).push(item);
                bin.sub_bin_mut(0).close();
                let id = bin.id();
                state.bins_xl.push(bin);
                (Decision::NewXlBin, id)
            }
            ItemClass::L => place_large(state, item),
            ItemClass::M => place_medium(state, item),
            ItemClass::S => {
                let to_l = self.routes_small_to_l(state);
                let size = item.size().clone();
                let placed = if to_l {
                    place_small_in_l(state, item)
                } else {
                    place_small_in_s(state, item)
                };
                if to_l {
                    state.small_into_l += &size;
                }
                state.small_total += &size;
                placed
            }
        }
    }
}

fn place_large(state: &mut PackingState, item: Item) -> (Decision, usize) {
    let index = state.large_placed;
    state.large_placed += 1;
    if let Some(bin) = state.bins_l.get_mut(index) {
        // Opened earlier by small items; its 2/3-sub-bin is still empty.
        let part = bin.sub_bin_mut(Bin::LARGE_PART);
        part.push(item);
        part.close();
        return (Decision::ReservedLBin, bin.id());
    }
    let mut bin = state.fresh_bin(BinCategory::L);
    let part = bin.sub_bin_mut(Bin::LARGE_PART);
    part.push(item);
    part.close();
    let id = bin.id();
    state.bins_l.push(bin);
    (Decision::NewLBin, id)
}

fn place_medium(state: &mut PackingState, item: Item) -> (Decision, usize) {
    if let Some(index) = state.open_m.take() {
        let bin = &mut state.bins_m[index];
        bin.sub_bin_mut(0).push(item);
        bin.sub_bin_mut(0).close();
        return (Decision::JoinMBin, bin.id());
    }
    let mut bin = state.fresh_bin(BinCategory::M);
    bin.sub_bin_mut(0).push(item);
    let id = bin.id();
    state.open_m = Some(state.bins_m.len());
    state.bins_m.push(bin);
    (Decision::NewMBin, id)
}

fn place_small_in_l(state: &mut PackingState, item: Item) -> (Decision, usize) {
    if let Some(cursor) = state.next_fit_l {
        let part = state.bins_l[cursor].sub_bin_mut(Bin::SMALL_PART);
        if part.fits(&item) {
            part.push(item);
            return (Decision::SmallToL, state.bins_l[cursor].id());
        }
        part.close();
    }
    let next = state.next_fit_l.map_or(0, |c| c + 1);
    state.next_fit_l = Some(next);
    // Bins past the cursor never received small items, so their 1/3-sub-bin is empty.
    if let Some(bin) = state.bins_l.get_mut(next) {
        bin.sub_bin_mut(Bin::SMALL_PART).push(item);
        return (Decision::SmallToNextL, bin.id());
    }
    let mut bin = state.fresh_bin(BinCategory::L);
    bin.sub_bin_mut(Bin::SMALL_PART).push(item);
    let id = bin.id();
    state.bins_l.push(bin);
    (Decision::SmallToNewL, id)
}

fn place_small_in_s(state: &mut PackingState, item: Item) -> (Decision, usize) {
    if let Some(index) = state.open_s {
        let part = state.bins_s[index].sub_bin_mut(0);
        if part.fits(&item) {
            part.push(item);
            return (Decision::SmallToS, state.bins_s[index].id());
        }
        part.close();
    }
    let mut bin = state.fresh_bin(BinCategory::S);
    bin.sub_bin_mut(0).push(item);
    let id = bin.id();
    state.open_s = Some(state.bins_s.len());
    state.bins_s.push(bin);
    (Decision::SmallToNewS, id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::packers::{run_online, run_online_traced, Algorithm};
    use crate::rational::q;

    fn ph3(r_l: Rational) -> Algorithm {
        Algorithm::Ph3(Ph3Config::new(r_l).unwrap())
    }

    fn inst(sizes: &[Rational]) -> Instance {
        Instance::from_sizes(sizes, "t").unwrap()
    }

    #[test]
    fn config_range() {
        assert!(Ph3Config::new(q(-1, 2)).is_err());
        assert!(Ph3Config::new(q(3, 2)).is_err());
        assert!(Ph3Config::new(Rational::one()).is_ok());
    }

    #[test]
    fn zero_ratio_sends_small_to_s() {
        let r = run_online(
            &ph3(Rational::zero()),
            &inst(&[q(1, 4), q(1, 4), q(1, 4), q(1, 4)]),
        );
        assert_eq!(r.bins_used, 1);
        assert_eq!(r.state.bins_s.len(), 1);
        assert!(r.state.small_into_l.is_zero());
        r.state.check_ph3_invariants().unwrap();
    }

    #[test]
    fn full_ratio_pairs_small_with_large() {
        let r = run_online(&ph3(Rational::one()), &inst(&[q(6, 10), q(3, 10)]));
        assert_eq!(r.bins_used, 1);
        assert_eq!(r.state.bins_l.len(), 1);
        let small = r.state.bins_l[0].sub_bins()[Bin::SMALL_PART].contents();
        assert_eq!(small.len(), 1);
        assert_eq!(small[0].size(), &q(3, 10));
    }

    #[test]
    fn classes_go_to_their_bins() {
        let sizes = [q(7, 10), q(1, 2), q(2, 5), q(3, 5), q(1, 1), q(9, 20)];
        let r = run_online(&ph3(q(1, 2)), &inst(&sizes));
        assert_eq!(r.state.bins_xl.len(), 2);
        assert_eq!(r.state.bins_l.len(), 1);
        // 1/2, 2/5 pair up, 9/20 opens a second M-bin.
        assert_eq!(r.state.bins_m.len(), 2);
        assert_eq!(r.state.bins_m[0].item_count(), 2);
        assert_eq!(r.bins_used, 5);
        r.state.check_ph3_invariants().unwrap();
    }

    #[test]
    fn small_items_reserve_l_bins_for_later_large_items() {
        // r_L = 1: first small to L (empty history), second to S, then L again.
        let sizes = [
            q(1, 4),
            q(1, 4),
            q(1, 4),
            q(1, 4),
            q(3, 5),
            q(3, 5),
            q(3, 5),
        ];
        let r = run_online_traced(&ph3(Rational::one()), &inst(&sizes));
        let decisions: Vec<_> = r.trace.unwrap().iter().map(|t| t.decision).collect();
        assert_eq!(
            decisions,
            vec![
                Decision::SmallToNewL,
                Decision::SmallToNewS,
                Decision::SmallToNewL,
                Decision::SmallToNewL,
                Decision::ReservedLBin,
                Decision::ReservedLBin,
                Decision::ReservedLBin,
            ]
        );
        assert_eq!(r.state.bins_l.len(), 3);
        assert_eq!(r.bins_used, 4);
        r.state.check_ph3_invariants().unwrap();
    }

    #[test]
    fn next_fit_advances_into_existing_l_bins() {
        let sizes = [q(3, 5), q(3, 5), q(1, 5), q(1, 5), q(1, 10)];
        let r = run_online_traced(&ph3(Rational::one()), &inst(&sizes));
        let t = r.trace.unwrap();
        // 1/5 -> L0 (empty history), 1/5 -> S (quota met), 1/10 -> L0 again.
        assert_eq!(t[2].decision, Decision::SmallToNextL);
        assert_eq!(t[3].decision, Decision::SmallToNewS);
        assert_eq!(t[4].decision, Decision::SmallToL);
        assert_eq!(r.state.next_fit_l, Some(0));
        let sizes = [q(3, 5), q(3, 5), q(1, 5), q(1, 100), q(1, 5)];
        let r = run_online_traced(&ph3(Rational::one()), &inst(&sizes));
        let t = r.trace.unwrap();
        assert_eq!(t[4].decision, Decision::SmallToNextL);
        assert_eq!(r.state.next_fit_l, Some(1));
        assert_eq!(r.bins_used, 3);
    }

    #[test]
    fn medium_pairs_close() {
        let sizes = [q(2, 5), q(2, 5), q(2, 5)];
        let r = run_online(&ph3(Rational::zero()), &inst(&sizes));
        assert_eq!(r.state.bins_m.len(), 2);
        assert_eq!(r.state.open_m, Some(1));
    }

    #[test]
    fn deterministic_trace() {
        let sizes: Vec<Rational> = (1..200).map(|i| q((i * 37) % 97 + 1, 98)).collect();
        let a = run_online_traced(&ph3(q(1, 19)), &inst(&sizes));
        let b = run_online_traced(&ph3(q(1, 19)), &inst(&sizes));
        assert_eq!(a, b);
        a.state.check_ph3_invariants().unwrap();
    }
}
