use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ap::Ap;
use crate::error::{Error, Result};
use crate::exactnum::{dy_floor_ratio, Dyadic};
use crate::params;
use crate::report::{Relation, WitnessReport};

/// `count` consecutive gaps of equal size `gap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapBlock {
    pub gap: Dyadic,
    #[serde(with = "bigint_string")]
    pub count: BigInt,
    /// Construction step that produced the block.
    #[serde(default)]
    pub tag: String,
}

/// Serde adapter writing big integers as decimal strings.
pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(serde::de::Error::custom)
    }
}

/// A strictly increasing sequence `lambda_0 < lambda_1 < ...` stored as an
/// origin plus runs of equal gaps. Points are never enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapBlockSeq {
    origin: Dyadic,
    blocks: Vec<GapBlock>,
    monotone: bool,
    /// Index of the point just before block `b`'s first point.
    start_index: Vec<BigInt>,
    /// Value of that point.
    start_value: Vec<Dyadic>,
    last_index: BigInt,
    last_value: Dyadic,
}

impl GapBlockSeq {
    pub fn new(origin: Dyadic) -> Self {
        GapBlockSeq {
            last_value: origin.clone(),
            origin,
            blocks: Vec::new(),
            monotone: false,
            start_index: Vec::new(),
            start_value: Vec::new(),
            last_index: BigInt::zero(),
        }
    }

    pub fn from_blocks(origin: Dyadic, blocks: Vec<GapBlock>, monotone: bool) -> Result<Self> {
        let mut seq = GapBlockSeq::new(origin);
        seq.monotone = monotone;
        for b in blocks {
            seq.push(b.gap, b.count, b.tag)?;
        }
        Ok(seq)
    }

    /// Appends a block of `count` gaps of size `gap`.
    pub fn push(&mut self, gap: Dyadic, count: BigInt, tag: impl Into<String>) -> Result<()> {
        if !gap.is_positive() {
            return Err(Error::InvalidArgument(format!("gap must be positive, got {gap}")));
        }
        if count < BigInt::one() {
            return Err(Error::InvalidArgument(format!("block count must be >= 1, got {count}")));
        }
        self.start_index.push(self.last_index.clone());
        self.start_value.push(self.last_value.clone());
        self.last_value = &self.last_value + &(&gap * &count);
        self.last_index += &count;
        self.blocks.push(GapBlock {
            gap,
            count,
            tag: tag.into(),
        });
        Ok(())
    }

    /// Appends a block, merging into the last one when gap and tag agree.
    pub fn push_coalescing(&mut self, gap: Dyadic, count: BigInt, tag: &str) -> Result<()> {
        match self.blocks.last() {
            Some(last) if last.gap == gap && last.tag == tag => {
                let total = &last.count + &count;
                self.blocks.pop();
                self.start_index.pop();
                let prev_value = self.start_value.pop().expect("parallel vectors");
                self.last_index -= &(&total - &count);
                self.last_value = prev_value;
                self.push(gap, total, tag)
            }
            _ => self.push(gap, count, tag),
        }
    }

    /// Appends gaps, extending the last block whatever its tag when the gap agrees.
    pub fn push_extending(&mut self, gap: Dyadic, count: BigInt, tag: &str) -> Result<()> {
        match self.blocks.last() {
            Some(last) if last.gap == gap => {
                let tag = last.tag.clone();
                self.push_coalescing(gap, count, &tag)
            }
            _ => self.push(gap, count, tag),
        }
    }

    pub fn set_monotone(&mut self, monotone: bool) {
        self.monotone = monotone;
    }

    pub fn monotone(&self) -> bool {
        self.monotone
    }

    pub fn origin(&self) -> &Dyadic {
        &self.origin
    }

    pub fn blocks(&self) -> &[GapBlock] {
        &self.blocks
    }

    /// Number of points, `1 + sum of block counts`.
    pub fn point_count(&self) -> BigInt {
        &self.last_index + 1u32
    }

    /// Index of the last point.
    pub fn last_index(&self) -> &BigInt {
        &self.last_index
    }

    pub fn last_value(&self) -> &Dyadic {
        &self.last_value
    }

    /// Index of the point preceding block `b`, and its value.
    pub fn block_start(&self, b: usize) -> (&BigInt, &Dyadic) {
        (&self.start_index[b], &self.start_value[b])
    }

    /// The points as arithmetic progressions: the origin, then one per block.
    pub fn aps(&self) -> Vec<Ap> {
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        out.push(Ap::single(self.origin.clone()));
        for (b, block) in self.blocks.iter().enumerate() {
            out.push(Ap {
                start: &self.start_value[b] + &block.gap,
                step: block.gap.clone(),
                count: block.count.clone(),
            });
        }
        out
    }

    /// Small-prefix enumeration for oracles and tests.
    pub fn enumerate(&self, limit: usize) -> Vec<Dyadic> {
        let mut out = vec![self.origin.clone()];
        let mut cur = self.origin.clone();
        'outer: for block in &self.blocks {
            let mut i = BigInt::zero();
            while i < block.count {
                if out.len() >= limit {
                    break 'outer;
                }
                cur = &cur + &block.gap;
                out.push(cur.clone());
                i += 1u32;
            }
        }
        out
    }
}

/// `lambda_n` by block-wise closed form.
pub fn seq_value_at(seq: &GapBlockSeq, n: &BigInt) -> Result<Dyadic> {
    if n.is_negative() || n > &seq.last_index {
        return Err(Error::IndexOutOfRange {
            index: n.to_string(),
            len: seq.point_count().to_string(),
        });
    }
    if n.is_zero() {
        return Ok(seq.origin.clone());
    }
    // last block whose preceding index is < n
    let b = seq.start_index.partition_point(|s| s < n) - 1;
    let offset = n - &seq.start_index[b];
    Ok(&seq.start_value[b] + &(&seq.blocks[b].gap * &offset))
}

/// `#{n : lambda_n <= x}`.
pub fn seq_count_upto(seq: &GapBlockSeq, x: &Dyadic) -> BigInt {
    if x < &seq.origin {
        return BigInt::zero();
    }
    if seq.blocks.is_empty() {
        return BigInt::one();
    }
    let b = seq.start_value.partition_point(|v| v <= x) - 1;
    let (steps, _) = dy_floor_ratio(&(x - &seq.start_value[b]), &seq.blocks[b].gap);
    let steps = steps.min(seq.blocks[b].count.clone());
    &seq.start_index[b] + steps + 1u32
}

/// Checks that gaps never increase from one block to the next.
pub fn seq_check_monotone_gaps(seq: &GapBlockSeq) -> WitnessReport {
    let claim = "gaps non-increasing";
    for (b, w) in seq.blocks.windows(2).enumerate() {
        if w[1].gap > w[0].gap {
            return WitnessReport::compare(
                claim,
                params! {
                    "block" => b + 1,
                    "tag" => w[1].tag,
                    "prev_tag" => w[0].tag,
                },
                &w[1].gap,
                Relation::Le,
                &w[0].gap,
            );
        }
    }
    let (first, last) = match (seq.blocks.first(), seq.blocks.last()) {
        (Some(f), Some(l)) => (f.gap.clone(), l.gap.clone()),
        _ => (Dyadic::zero(), Dyadic::zero()),
    };
    WitnessReport::compare(
        claim,
        params! {"blocks" => seq.blocks.len()},
        &last,
        Relation::Le,
        &first,
    )
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    origin: Dyadic,
    #[serde(default)]
    monotone: bool,
    blocks: Vec<GapBlock>,
}

impl Serialize for GapBlockSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeqRepr {
            origin: self.origin.clone(),
            monotone: self.monotone,
            blocks: self.blocks.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GapBlockSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = SeqRepr::deserialize(deserializer)?;
        GapBlockSeq::from_blocks(r.origin, r.blocks, r.monotone).map_err(serde::de::Error::custom)
    }
}
