use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::Dyadic;
use crate::error::{Error, Result};

/// An interval with dyadic endpoints and per-endpoint closedness.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyInterval {
    lo: Dyadic,
    hi: Dyadic,
    lo_closed: bool,
    hi_closed: bool,
}

impl DyInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            return Err(Error::InvalidArgument(format!(
                "empty interval {}{lo},{hi}{}",
                if lo_closed { '[' } else { '(' },
                if hi_closed { ']' } else { ')' }
            )));
        }
        Ok(DyInterval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// `[lo, hi]`; panics if `lo > hi`.
    pub fn closed(lo: Dyadic, hi: Dyadic) -> Self {
        Self::new(lo, hi, true, true).expect("closed interval with lo > hi")
    }

    /// `(lo, hi)`; panics unless `lo < hi`.
    pub fn open(lo: Dyadic, hi: Dyadic) -> Self {
        Self::new(lo, hi, false, false).expect("open interval must be non-degenerate")
    }

    pub fn point(x: Dyadic) -> Self {
        Self::closed(x.clone(), x)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn length(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    /// Whether `other` is a subset of `self`, honouring closedness.
    pub fn contains_interval(&self, other: &DyInterval) -> bool {
        let lo_ok = match other.lo.cmp(&self.lo) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => self.lo_closed || !other.lo_closed,
            std::cmp::Ordering::Less => false,
        };
        let hi_ok = match other.hi.cmp(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.hi_closed || !other.hi_closed,
            std::cmp::Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// Intersection, or `None` when empty.
    pub fn intersect(&self, other: &DyInterval) -> Option<DyInterval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        DyInterval::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// Translate by `t`.
    pub fn shift(&self, t: &Dyadic) -> DyInterval {
        DyInterval {
            lo: &self.lo + t,
            hi: &self.hi + t,
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
        }
    }

    /// The concentric closed interval of `factor` times the length.
    pub fn scaled_concentric(&self, factor: i64) -> DyInterval {
        let len = self.length();
        let pad = (&len * &Dyadic::from_int(factor - 1)).mul_pow2(-1);
        DyInterval::closed(&self.lo - &pad, &self.hi + &pad)
    }
}

impl fmt::Display for DyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for DyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{:?}, {:?}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl FromStr for DyInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad interval {s:?}"));
        let lo_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        DyInterval::new(lo.parse()?, hi.parse()?, lo_closed, hi_closed)
    }
}

impl Serialize for DyInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
