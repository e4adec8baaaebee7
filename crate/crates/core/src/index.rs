//! Hermite multi-indices, their canonical ordering, and reduced index sets.
//!
//! Component 1 (0-based) is the wall-normal direction. An [`IndexSet`] lists
//! the indices with even normal component first, then the odd ones, each part
//! sorted by [`compare_indices`]. Positions are 0-based in that global order.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{invalid, Result};

/// Axis of the wall-normal velocity component.
pub const NORMAL_AXIS: usize = 1;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    components: Box<[u32]>,
}

impl MultiIndex {
    pub fn new(components: impl Into<Vec<u32>>) -> Result<Self> {
        let components = components.into();
        if components.is_empty() {
            return Err(invalid("multi-index needs at least one component"));
        }
        Ok(Self {
            components: components.into_boxed_slice(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            components: vec![0; dim.max(1)].into_boxed_slice(),
        }
    }

    /// `k * e_axis` in dimension `dim`.
    pub fn unit(dim: usize, axis: usize, k: u32) -> Self {
        let mut c = vec![0; dim.max(1)];
        c[axis] = k;
        Self {
            components: c.into_boxed_slice(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    pub fn norm(&self) -> u32 {
        self.components.iter().sum()
    }

    /// The wall-normal component (0 when `dim == 1`).
    pub fn normal(&self) -> u32 {
        self.components.get(NORMAL_AXIS).copied().unwrap_or(0)
    }

    pub fn is_even(&self) -> bool {
        self.normal() % 2 == 0
    }

    /// Same index with the wall-normal component replaced.
    pub fn with_normal(&self, k: u32) -> Self {
        let mut c = self.components.clone();
        c[NORMAL_AXIS] = k;
        Self { components: c }
    }

    /// Norm of the tangential part, `|a| - a_normal`.
    pub fn tangential_norm(&self) -> u32 {
        self.norm() - self.normal()
    }

    /// Component-wise sum.
    pub fn plus(&self, other: &MultiIndex) -> Self {
        let c: Vec<u32> = self
            .components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a + b)
            .collect();
        Self {
            components: c.into_boxed_slice(),
        }
    }

    /// True when both indices agree off the wall-normal axis.
    pub fn same_chain(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim()
            && self
                .components
                .iter()
                .zip(other.components.iter())
                .enumerate()
                .all(|(d, (a, b))| d == NORMAL_AXIS || a == b)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Canonical order: even normal component first, then by norm, then
/// anti-lexicographic (a larger leading component sorts earlier).
pub fn compare_indices(a: &MultiIndex, b: &MultiIndex) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(invalid(format!(
            "dimension mismatch comparing {a} and {b}"
        )));
    }
    Ok(canonical_cmp(a, b))
}

fn canonical_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    let parity = |x: &MultiIndex| x.normal() % 2;
    parity(a)
        .cmp(&parity(b))
        .then_with(|| a.norm().cmp(&b.norm()))
        .then_with(|| {
            a.components
                .iter()
                .zip(b.components.iter())
                .find(|(x, y)| x != y)
                .map_or(Ordering::Equal, |(x, y)| y.cmp(x))
        })
}

#[derive(Clone, PartialEq, Eq)]
struct Canonical(MultiIndex);

impl Ord for Canonical {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Canonical {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sorted, duplicate-free selection of multi-indices of norm at most `order`.
#[derive(Clone, Debug)]
pub struct IndexSet {
    order: u32,
    dim: usize,
    even: Vec<MultiIndex>,
    odd: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl IndexSet {
    /// Sorts and deduplicates `indices`. Condition (C1) is not enforced here;
    /// call [`validate_c1`] before handing the set to assembly.
    pub fn from_indices(
        indices: impl IntoIterator<Item = MultiIndex>,
        order: u32,
        dim: usize,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("index sets need dimension >= 2 (a wall-normal axis)"));
        }
        let mut sorted = BTreeSet::new();
        for idx in indices {
            if idx.dim() != dim {
                return Err(invalid(format!("{idx} does not have dimension {dim}")));
            }
            if idx.norm() > order {
                return Err(invalid(format!("{idx} has norm above the order {order}")));
            }
            sorted.insert(Canonical(idx));
        }
        let (even, odd): (Vec<_>, Vec<_>) = sorted
            .into_iter()
            .map(|c| c.0)
            .partition(MultiIndex::is_even);
        let positions = even
            .iter()
            .chain(odd.iter())
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        Ok(Self {
            order,
            dim,
            even,
            odd,
            positions,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn even_part(&self) -> &[MultiIndex] {
        &self.even
    }

    pub fn odd_part(&self) -> &[MultiIndex] {
        &self.odd
    }

    /// Number of even indices.
    pub fn m(&self) -> usize {
        self.even.len()
    }

    /// Number of odd indices.
    pub fn n(&self) -> usize {
        self.odd.len()
    }

    pub fn len(&self) -> usize {
        self.m() + self.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All indices in global order.
    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.even.iter().chain(self.odd.iter())
    }

    pub fn get(&self, pos: usize) -> Option<&MultiIndex> {
        if pos < self.m() {
            self.even.get(pos)
        } else {
            self.odd.get(pos - self.m())
        }
    }

    /// 0-based position in the global order.
    pub fn position(&self, idx: &MultiIndex) -> Option<usize> {
        self.positions.get(idx).copied()
    }

    /// Position within the even part.
    pub fn even_position(&self, idx: &MultiIndex) -> Option<usize> {
        self.position(idx).filter(|&p| p < self.m())
    }

    /// Position within the odd part.
    pub fn odd_position(&self, idx: &MultiIndex) -> Option<usize> {
        self.position(idx)
            .filter(|&p| p >= self.m())
            .map(|p| p - self.m())
    }

    pub fn contains(&self, idx: &MultiIndex) -> bool {
        self.positions.contains_key(idx)
    }
}

/// Closes `generators` along the wall-normal axis up to norm `order`.
pub fn build_index_set(generators: &[MultiIndex], order: u32, dim: usize) -> Result<IndexSet> {
    if generators.is_empty() {
        return Err(invalid("at least one generator is required"));
    }
    let mut all = Vec::new();
    for g in generators {
        if g.dim() != dim {
            return Err(invalid(format!("generator {g} does not have dimension {dim}")));
        }
        if g.norm() > order {
            return Err(invalid(format!("generator {g} has norm above the order {order}")));
        }
        let top = order - g.tangential_norm();
        all.extend((0..=top).map(|k| g.with_normal(k)));
    }
    IndexSet::from_indices(all, order, dim)
}

/// True iff every index brings its whole wall-normal chain up to the order.
pub fn validate_c1(set: &IndexSet) -> bool {
    set.iter().all(|g| {
        g.norm() <= set.order()
            && (0..=set.order() - g.tangential_norm()).all(|k| set.contains(&g.with_normal(k)))
    })
}
