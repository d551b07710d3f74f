//! Online packers (PH3 and the Next/First/Best Fit baselines) and the offline FFD
//! packer used as an upper bound on the optimum.

mod fit;
mod ph3;

use std::fmt;

pub use fit::{run_ffd, run_ffd_traced};
pub use ph3::Ph3Config;

use crate::model::{Bin, BinCategory, Instance, Item, ItemClass};
use crate::rational::Rational;

/// Identity of an online packer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algorithm {
    Ph3(Ph3Config),
    NextFit,
    FirstFit,
    BestFit,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Ph3(c) => write!(f, "ph3:{}", c.r_l()),
            Algorithm::NextFit => f.write_str("nf"),
            Algorithm::FirstFit => f.write_str("ff"),
            Algorithm::BestFit => f.write_str("bf"),
        }
    }
}

/// Where a single item went.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    /// PH3: extra large item in its own bin.
    NewXlBin,
    /// PH3: large item opening a fresh L-bin.
    NewLBin,
    /// PH3: large item filling the empty 2/3-sub-bin of an L-bin opened by small items.
    ReservedLBin,
    /// PH3: medium item opening an M-bin.
    NewMBin,
    /// PH3: medium item completing the open M-bin.
    JoinMBin,
    /// PH3: small item into the active 1/3-sub-bin.
    SmallToL,
    /// PH3: small item after advancing the next-fit cursor to the following L-bin.
    SmallToNextL,
    /// PH3: small item opening a fresh L-bin with an empty 2/3-sub-bin.
    SmallToNewL,
    /// PH3: small item into the active S-bin.
    SmallToS,
    /// PH3: small item opening a new S-bin.
    SmallToNewS,
    /// Baselines: item placed in an existing bin.
    Existing,
    /// Baselines: item opened a new bin.
    Opened,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::NewXlBin => "xl-new",
            Decision::NewLBin => "l-new",
            Decision::ReservedLBin => "l-reserved",
            Decision::NewMBin => "m-new",
            Decision::JoinMBin => "m-join",
            Decision::SmallToL => "s-to-l",
            Decision::SmallToNextL => "s-to-l-next",
            Decision::SmallToNewL => "s-to-l-new",
            Decision::SmallToS => "s-to-s",
            Decision::SmallToNewS => "s-to-s-new",
            Decision::Existing => "existing",
            Decision::Opened => "new",
        }
    }

    pub fn routed_to_l(self) -> bool {
        matches!(
            self,
            Decision::SmallToL | Decision::SmallToNextL | Decision::SmallToNewL
        )
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the routing log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub item_index: usize,
    pub size: Rational,
    pub class: ItemClass,
    pub decision: Decision,
    pub bin_id: usize,
}

/// Live state of one packing run.
///
/// PH3 fills the four category lists; the baselines and FFD only use `bins_generic`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackingState {
    pub bins_xl: Vec<Bin>,
    pub bins_l: Vec<Bin>,
    pub bins_m: Vec<Bin>,
    pub bins_s: Vec<Bin>,
    pub bins_generic: Vec<Bin>,
    /// Index into `bins_s` of the active S-bin.
    pub open_s: Option<usize>,
    /// Index into `bins_m` of the M-bin holding a single medium item.
    pub open_m: Option<usize>,
    /// Index into `bins_l` of the active 1/3-sub-bin.
    pub next_fit_l: Option<usize>,
    /// Number of large items placed; L-bins below this index hold a large item.
    pub large_placed: usize,
    pub small_total: Rational,
    pub small_into_l: Rational,
    next_id: usize,
}

impl PackingState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bins_used(&self) -> usize {
        self.bins_xl.len()
            + self.bins_l.len()
            + self.bins_m.len()
            + self.bins_s.len()
            + self.bins_generic.len()
    }

    pub fn all_bins(&self) -> impl Iterator<Item = &Bin> {
        self.bins_xl
            .iter()
            .chain(&self.bins_l)
            .chain(&self.bins_m)
            .chain(&self.bins_s)
            .chain(&self.bins_generic)
    }

    fn fresh_bin(&mut self, category: BinCategory) -> Bin {
        let bin = Bin::new(self.next_id, category);
        self.next_id += 1;
        bin
    }

    /// Total size of small items currently sitting in S-bins.
    pub fn small_in_s(&self) -> Rational {
        self.bins_s.iter().map(|b| b.load()).sum()
    }

    /// Checks the structural PH3 invariants on the whole state. Linear in the number
    /// of bins; meant for tests and audits rather than per-step use on long runs.
    pub fn check_ph3_invariants(&self) -> Result<(), String> {
        if self.small_into_l > self.small_total {
            return Err("small_into_l exceeds small_total".into());
        }
        if let Some(bin) = self.all_bins().find(|b| !b.is_feasible()) {
            return Err(format!("bin {} infeasible", bin.id()));
        }
        for bin in &self.bins_xl {
            if bin.item_count() != 1 || bin.items().any(|i| i.class() != ItemClass::XL) {
                return Err(format!(
                    "XL-bin {} holds something other than one XL item",
                    bin.id()
                ));
            }
        }
        for bin in &self.bins_m {
            if bin.item_count() > 2 || bin.items().any(|i| i.class() != ItemClass::M) {
                return Err(format!("M-bin {} violates medium discipline", bin.id()));
            }
        }
        for bin in &self.bins_s {
            if bin.items().any(|i| i.class() != ItemClass::S) {
                return Err(format!("S-bin {} holds a non-small item", bin.id()));
            }
        }
        for (index, bin) in self.bins_l.iter().enumerate() {
            let large = bin.sub_bins()[Bin::LARGE_PART].contents();
            let small = bin.sub_bins()[Bin::SMALL_PART].contents();
            if large.len() > 1 || large.iter().any(|i| i.class() != ItemClass::L) {
                return Err(format!("L-bin {} 2/3-sub-bin discipline", bin.id()));
            }
            if small.iter().any(|i| i.class() != ItemClass::S) {
                return Err(format!(
                    "L-bin {} 1/3-sub-bin holds a non-small item",
                    bin.id()
                ));
            }
            if (index < self.large_placed) != (large.len() == 1) {
                return Err(format!("L-bin {} breaks the large-item prefix", bin.id()));
            }
        }
        let two_thirds = crate::rational::q(2, 3);
        let sparse = self.bins_s.iter().filter(|b| b.load() < two_thirds).count();
        if sparse > 1 {
            return Err(format!("{sparse} S-bins below 2/3"));
        }
        let in_l: Rational = self
            .bins_l
            .iter()
            .map(|b| b.sub_bins()[Bin::SMALL_PART].load().clone())
            .sum();
        if in_l != self.small_into_l || &in_l + &self.small_in_s() != self.small_total {
            return Err("small-item ledger out of balance".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingResult {
    pub bins_used: usize,
    pub state: PackingState,
    pub trace: Option<Vec<TraceEntry>>,
}

impl PackingResult {
    fn from_state(state: PackingState, trace: Option<Vec<TraceEntry>>) -> Self {
        PackingResult {
            bins_used: state.bins_used(),
            state,
            trace,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.state.all_bins().all(Bin::is_feasible)
    }
}

/// Runs an online packer over the instance in arrival order.
pub fn run_online(algorithm: &Algorithm, instance: &Instance) -> PackingResult {
    run(algorithm, instance, false)
}

/// As [`run_online`], also recording a per-item routing log.
pub fn run_online_traced(algorithm: &Algorithm, instance: &Instance) -> PackingResult {
    run(algorithm, instance, true)
}

fn run(algorithm: &Algorithm, instance: &Instance, traced: bool) -> PackingResult {
    let items = instance.items().iter().enumerate();
    match algorithm {
        Algorithm::Ph3(config) => {
            let mut state = PackingState::new();
            let mut trace = traced.then(Vec::new);
            for (index, item) in items {
                let (decision, bin_id) = config.step(&mut state, item.clone());
                if let Some(t) = trace.as_mut() {
                    t.push(entry(index, item, decision, bin_id));
                }
            }
            PackingResult::from_state(state, trace)
        }
        Algorithm::NextFit => fit::pack(fit::NextFit, items, traced),
        Algorithm::FirstFit => fit::pack(fit::FirstFit::new(instance.len()), items, traced),
        Algorithm::BestFit => fit::pack(fit::BestFit::default(), items, traced),
    }
}

fn entry(item_index: usize, item: &Item, decision: Decision, bin_id: usize) -> TraceEntry {
    TraceEntry {
        item_index,
        size: item.size().clone(),
        class: item.class(),
        decision,
        bin_id,
    }
}

/// Renders a trace as CSV (`item_index,size,class,decision,bin_id`).
pub fn trace_csv(trace: &[TraceEntry]) -> String {
    let mut out = String::from("item_index,size,class,decision,bin_id\n");
    for t in trace {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.item_index, t.size, t.class, t.decision, t.bin_id
        ));
    }
    out
}
