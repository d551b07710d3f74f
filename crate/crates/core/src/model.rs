//! Items, size classes, bins and instances.

use std::fmt;
use std::io::{BufRead, BufReader, Read};

use crate::error::{Error, Result};
use crate::rational::{q, Rational};

/// Size class of an item.
///
/// `S = [0, 1/3]`, `M = (1/3, 1/2]`, `L = (1/2, 2/3)`, `XL = [2/3, 1]`. Variants are
/// declared in size order so the derived `Ord` matches it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemClass {
    S,
    M,
    L,
    XL,
}

impl ItemClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemClass::S => "S",
            ItemClass::M => "M",
            ItemClass::L => "L",
            ItemClass::XL => "XL",
        }
    }
}

impl fmt::Display for ItemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a size in `(0, 1]`. Boundaries resolve exactly: `1/3 -> S`, `1/2 -> M`,
/// `2/3 -> XL`.
pub fn classify(size: &Rational) -> Result<ItemClass> {
    if !size.is_positive() || *size > Rational::one() {
        return Err(Error::Domain(format!("item size {size} outside (0, 1]")));
    }
    let class = if *size <= q(1, 3) {
        ItemClass::S
    } else if *size <= q(1, 2) {
        ItemClass::M
    } else if *size < q(2, 3) {
        ItemClass::L
    } else {
        ItemClass::XL
    };
    Ok(class)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    size: Rational,
    class: ItemClass,
}

impl Item {
    pub fn new(size: Rational) -> Result<Self> {
        let class = classify(&size)?;
        Ok(Item { size, class })
    }

    pub fn size(&self) -> &Rational {
        &self.size
    }

    pub fn class(&self) -> ItemClass {
        self.class
    }
}

/// Exact total size; the empty sum is zero.
pub fn size_of<'a>(items: impl IntoIterator<Item = &'a Item>) -> Rational {
    items.into_iter().map(Item::size).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubBinStatus {
    Open,
    Closed,
}

/// A fixed-capacity part of a bin. Items keep their insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubBin {
    capacity: Rational,
    load: Rational,
    contents: Vec<Item>,
    status: SubBinStatus,
}

impl SubBin {
    pub fn new(capacity: Rational) -> Self {
        SubBin {
            capacity,
            load: Rational::zero(),
            contents: Vec::new(),
            status: SubBinStatus::Open,
        }
    }

    pub fn capacity(&self) -> &Rational {
        &self.capacity
    }

    pub fn load(&self) -> &Rational {
        &self.load
    }

    pub fn remaining(&self) -> Rational {
        &self.capacity - &self.load
    }

    pub fn contents(&self) -> &[Item] {
        &self.contents
    }

    pub fn is_empty(&self) -> bool {
        self.contents.is_empty()
    }

    pub fn status(&self) -> SubBinStatus {
        self.status
    }

    pub fn close(&mut self) {
        self.status = SubBinStatus::Closed;
    }

    pub fn fits(&self, item: &Item) -> bool {
        &self.load + item.size() <= self.capacity
    }

    /// Adds `item`; the caller is responsible for checking [`SubBin::fits`] first.
    pub fn push(&mut self, item: Item) {
        debug_assert!(self.fits(&item), "sub-bin overfull");
        self.load += item.size();
        self.contents.push(item);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinCategory {
    XL,
    L,
    M,
    S,
    Generic,
}

impl BinCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            BinCategory::XL => "XL",
            BinCategory::L => "L",
            BinCategory::M => "M",
            BinCategory::S => "S",
            BinCategory::Generic => "generic",
        }
    }
}

/// A unit bin. L-bins are split into a 2/3-sub-bin (index 0, for the large item) and
/// a 1/3-sub-bin (index 1, for small items); every other category has one unit sub-bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bin {
    id: usize,
    category: BinCategory,
    sub_bins: Vec<SubBin>,
}

impl Bin {
    pub const LARGE_PART: usize = 0;
    pub const SMALL_PART: usize = 1;

    pub fn new(id: usize, category: BinCategory) -> Self {
        let sub_bins = match category {
            BinCategory::L => vec![SubBin::new(q(2, 3)), SubBin::new(q(1, 3))],
            _ => vec![SubBin::new(Rational::one())],
        };
        Bin {
            id,
            category,
            sub_bins,
        }
    }

    /// Creation-order identifier, unique within one packing run.
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn category(&self) -> BinCategory {
        self.category
    }

    pub fn sub_bins(&self) -> &[SubBin] {
        &self.sub_bins
    }

    pub fn sub_bin_mut(&mut self, index: usize) -> &mut SubBin {
        &mut self.sub_bins[index]
    }

    pub fn load(&self) -> Rational {
        self.sub_bins.iter().map(SubBin::load).sum()
    }

    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.sub_bins.iter().flat_map(|s| s.contents().iter())
    }

    pub fn item_count(&self) -> usize {
        self.sub_bins.iter().map(|s| s.contents().len()).sum()
    }

    /// Total content ≤ 1, every sub-bin within capacity, capacities summing to 1.
    pub fn is_feasible(&self) -> bool {
        let capacities: Rational = self.sub_bins.iter().map(SubBin::capacity).sum();
        capacities == Rational::one()
            && self
                .sub_bins
                .iter()
                .all(|s| s.load() <= s.capacity() && *s.load() == size_of(s.contents()))
            && self.load() <= Rational::one()
    }
}

/// An ordered list of items; arrival order is significant.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Instance {
    items: Vec<Item>,
    label: String,
}

impl Instance {
    pub fn new(items: Vec<Item>, label: impl Into<String>) -> Self {
        Instance {
            items,
            label: label.into(),
        }
    }

    pub fn from_sizes(sizes: &[Rational], label: impl Into<String>) -> Result<Self> {
        let items = sizes
            .iter()
            .cloned()
            .map(Item::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance::new(items, label))
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_size(&self) -> Rational {
        size_of(&self.items)
    }

    pub fn class_count(&self, class: ItemClass) -> usize {
        self.items.iter().filter(|i| i.class() == class).count()
    }

    pub fn class_size(&self, class: ItemClass) -> Rational {
        size_of(self.items.iter().filter(|i| i.class() == class))
    }

    /// Instance file text: a `#` comment carrying the label, then one `p/q` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            for line in self.label.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        for item in &self.items {
            out.push_str(&item.size().to_string());
            out.push('\n');
        }
        out
    }
}

/// Reads an instance file: one size per line as `p/q` or a decimal literal, `#`
/// comments and blank lines ignored.
pub fn parse_instance(reader: impl Read, label: impl Into<String>) -> Result<Instance> {
    let mut items = Vec::new();
    for (index, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let item = Rational::parse(content)
            .and_then(Item::new)
            .map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        items.push(item);
    }
    Ok(Instance::new(items, label))
}
