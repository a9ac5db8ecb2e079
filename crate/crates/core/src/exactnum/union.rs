use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{dy_add, Dyadic};
use super::interval::DyInterval;
use crate::error::Result;

/// A finite union of intervals kept sorted, pairwise disjoint and maximally merged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalUnion {
    parts: Vec<DyInterval>,
}

fn lo_order(a: &DyInterval, b: &DyInterval) -> Ordering {
    a.lo()
        .cmp(b.lo())
        // a closed left end starts "before" an open one at the same point
        .then_with(|| b.lo_closed().cmp(&a.lo_closed()))
}

/// Whether `next` (which starts no earlier than `cur`) touches or overlaps `cur`.
fn mergeable(cur: &DyInterval, next: &DyInterval) -> bool {
    match next.lo().cmp(cur.hi()) {
        Ordering::Less => true,
        Ordering::Equal => cur.hi_closed() || next.lo_closed(),
        Ordering::Greater => false,
    }
}

fn merge_two(cur: &DyInterval, next: &DyInterval) -> DyInterval {
    let (hi, hi_closed) = match next.hi().cmp(cur.hi()) {
        Ordering::Greater => (next.hi().clone(), next.hi_closed()),
        Ordering::Less => (cur.hi().clone(), cur.hi_closed()),
        Ordering::Equal => (cur.hi().clone(), cur.hi_closed() || next.hi_closed()),
    };
    DyInterval::new(cur.lo().clone(), hi, cur.lo_closed(), hi_closed)
        .expect("merged interval is non-empty")
}

impl IntervalUnion {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the canonical union of arbitrary intervals (sort, then one merge sweep).
    pub fn from_intervals<I: IntoIterator<Item = DyInterval>>(intervals: I) -> Self {
        let mut items: Vec<DyInterval> = intervals.into_iter().collect();
        items.sort_by(lo_order);
        Self::from_sorted(items)
    }

    /// Like [`IntervalUnion::from_intervals`] but assumes `items` are already sorted by left end.
    pub fn from_sorted(items: Vec<DyInterval>) -> Self {
        let mut parts: Vec<DyInterval> = Vec::with_capacity(items.len());
        for iv in items {
            match parts.last_mut() {
                Some(last) if mergeable(last, &iv) => *last = merge_two(last, &iv),
                _ => parts.push(iv),
            }
        }
        IntervalUnion { parts }
    }

    pub fn parts(&self) -> &[DyInterval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Exact Lebesgue measure, guarded against runaway exponent spans.
    pub fn measure(&self) -> Result<Dyadic> {
        self.parts
            .iter()
            .try_fold(Dyadic::zero(), |acc, p| dy_add(&acc, &p.length()))
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.locate(x).is_some()
    }

    fn locate(&self, x: &Dyadic) -> Option<&DyInterval> {
        let idx = self.parts.partition_point(|p| p.lo() <= x);
        // Only the last part starting at or before x can contain it.
        idx.checked_sub(1)
            .map(|i| &self.parts[i])
            .filter(|p| p.contains(x))
    }

    /// Whether `iv` is entirely covered. Parts are maximally merged, so a
    /// connected set is covered iff a single part covers it.
    pub fn contains_interval(&self, iv: &DyInterval) -> bool {
        self.parts.iter().any(|p| p.contains_interval(iv))
    }

    pub fn intersect_interval(&self, iv: &DyInterval) -> IntervalUnion {
        IntervalUnion {
            parts: self.parts.iter().filter_map(|p| p.intersect(iv)).collect(),
        }
    }

    /// `self \ iv`.
    pub fn subtract_interval(&self, iv: &DyInterval) -> IntervalUnion {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        for p in &self.parts {
            if p.intersect(iv).is_none() {
                out.push(p.clone());
                continue;
            }
            // piece left of iv
            if let Ok(left) = DyInterval::new(
                p.lo().clone(),
                iv.lo().clone(),
                p.lo_closed(),
                !iv.lo_closed(),
            ) {
                if let Some(left) = left.intersect(p) {
                    out.push(left);
                }
            }
            // piece right of iv
            if let Ok(right) = DyInterval::new(
                iv.hi().clone(),
                p.hi().clone(),
                !iv.hi_closed(),
                p.hi_closed(),
            ) {
                if let Some(right) = right.intersect(p) {
                    out.push(right);
                }
            }
        }
        IntervalUnion { parts: out }
    }
}

/// Inserts `iv`, returning the canonical merged union.
pub fn union_insert(u: &IntervalUnion, iv: DyInterval) -> Result<IntervalUnion> {
    let idx = u.parts.partition_point(|p| lo_order(p, &iv) != Ordering::Greater);
    let mut items = Vec::with_capacity(u.parts.len() + 1);
    items.extend_from_slice(&u.parts[..idx]);
    items.push(iv);
    items.extend_from_slice(&u.parts[idx..]);
    let out = IntervalUnion::from_sorted(items);
    // span guard
    out.measure()?;
    Ok(out)
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalUnion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<DyInterval>::deserialize(deserializer)?;
        Ok(IntervalUnion::from_intervals(parts))
    }
}
