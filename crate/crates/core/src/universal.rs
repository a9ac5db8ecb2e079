//! The universal decreasing-gap set.
//!
//! Indices `(j, k)` with `0 <= k < 2j*2^j` are ordered lexicographically.
//! Each index carries the constants `a = 2^e`, `E = 2^-e` (with
//! `e = 2j*2^j + k`), `b = a + E`, the target interval
//! `I = [j - (k+1)2^-j, j - k*2^-j]`, and the periodic set `U` of `1/E`
//! closed components of width `E^3` spaced `E^2` apart starting at `a`.
//! The sequence starts at `a - b_I` of the first index and, per index, adds
//! a fine block of gaps `E^2 - E^3` followed by a bridge block of gaps
//! `E^2 / 2` that ends exactly at `a - b_I` of the next index.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{dy_div_exact, dy_floor_ratio, DyInterval, Dyadic, IntervalUnion, PiecewiseLinear};
use crate::exec::Exec;
use crate::lattice::{
    ap_index_range, count_seq_in_periodic, seq_count_upto, seq_value_at, Ap, GapBlockSeq,
    PeriodicIntervalSet,
};
use crate::params;
use crate::report::{Relation, WitnessReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexJK {
    pub j: u32,
    pub k: u64,
}

impl IndexJK {
    pub const FIRST: IndexJK = IndexJK { j: 1, k: 0 };

    pub fn new(j: u32, k: u64) -> Result<Self> {
        if j == 0 || j > 40 {
            return Err(Error::InvalidIndex {
                j: j as u64,
                k,
                reason: "j must lie in [1, 40]".into(),
            });
        }
        if k >= Self::row_len(j) {
            return Err(Error::InvalidIndex {
                j: j as u64,
                k,
                reason: format!("k must lie in [0, {})", Self::row_len(j)),
            });
        }
        Ok(IndexJK { j, k })
    }

    /// `2j * 2^j`, the number of indices in row `j`.
    pub fn row_len(j: u32) -> u64 {
        2 * j as u64 * (1u64 << j)
    }

    /// `e` with `a = 2^e`.
    pub fn exponent(self) -> i64 {
        (Self::row_len(self.j) + self.k) as i64
    }

    pub fn succ(self) -> Self {
        if self.k + 1 == Self::row_len(self.j) {
            IndexJK { j: self.j + 1, k: 0 }
        } else {
            IndexJK { j: self.j, k: self.k + 1 }
        }
    }

    pub fn pred(self) -> Result<Self> {
        match (self.j, self.k) {
            (1, 0) => Err(Error::NoPredecessor),
            (j, 0) => Ok(IndexJK {
                j: j - 1,
                k: Self::row_len(j - 1) - 1,
            }),
            (j, k) => Ok(IndexJK { j, k: k - 1 }),
        }
    }

    /// All indices from `(1,0)` through `last`, inclusive.
    pub fn upto(last: IndexJK) -> Vec<IndexJK> {
        let mut out = Vec::new();
        let mut i = Self::FIRST;
        while i <= last {
            out.push(i);
            i = i.succ();
        }
        out
    }

    /// All indices of rows `1..=jmax`.
    pub fn rows(jmax: u32) -> Vec<IndexJK> {
        if jmax == 0 {
            return Vec::new();
        }
        Self::upto(IndexJK {
            j: jmax,
            k: Self::row_len(jmax) - 1,
        })
    }

    fn tag(self, part: &str) -> String {
        format!("{},{}:{part}", self.j, self.k)
    }
}

impl fmt::Display for IndexJK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.j, self.k)
    }
}

impl FromStr for IndexJK {
    type Err = Error;

    /// `j,k`, optionally parenthesised.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (j, k) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected j,k, got {s:?}")))?;
        let j: u32 = j.trim().parse().map_err(|e| Error::Parse(format!("j in {s:?}: {e}")))?;
        let k: u64 = k.trim().parse().map_err(|e| Error::Parse(format!("k in {s:?}: {e}")))?;
        IndexJK::new(j, k)
    }
}

impl Serialize for IndexJK {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IndexJK {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Constants of one step; `n0`, `n1` are filled in when read off a built prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepConstants {
    pub index: IndexJK,
    /// Left end of `I`.
    pub ai: Dyadic,
    /// Right end of `I`.
    pub bi: Dyadic,
    pub a: Dyadic,
    pub b: Dyadic,
    pub e: Dyadic,
    pub n0: Option<BigInt>,
    pub n1: Option<BigInt>,
}

impl StepConstants {
    pub fn e2(&self) -> Dyadic {
        &self.e * &self.e
    }

    pub fn e3(&self) -> Dyadic {
        &self.e2() * &self.e
    }

    /// `1/E` as an integer.
    pub fn inv_e(&self) -> BigInt {
        BigInt::one() << self.index.exponent() as usize
    }

    /// Gaps in the fine block, `2^-j E^-2 + 2 E^-1`.
    pub fn fine_count(&self) -> BigInt {
        let e = self.index.exponent() as usize;
        (BigInt::one() << (2 * e - self.index.j as usize)) + (BigInt::one() << (e + 1))
    }

    fn n0n1(&self) -> Result<(&BigInt, &BigInt)> {
        match (&self.n0, &self.n1) {
            (Some(n0), Some(n1)) => Ok((n0, n1)),
            _ => Err(Error::InvalidArgument(format!(
                "prefix does not contain step ({})",
                self.index
            ))),
        }
    }
}

pub fn step_constants(i: IndexJK) -> StepConstants {
    let e = i.exponent();
    let a = Dyadic::pow2(e);
    let small = Dyadic::pow2(-e);
    let j = Dyadic::from_int(i.j as i64);
    let unit = Dyadic::pow2(-(i.j as i64));
    StepConstants {
        index: i,
        ai: &j - &(&unit * &Dyadic::from_int(i.k as i64 + 1)),
        bi: &j - &(&unit * &Dyadic::from_int(i.k as i64)),
        b: &a + &small,
        a,
        e: small,
        n0: None,
        n1: None,
    }
}

/// Constants with `n0`, `n1` read off the fine block of `i` in `seq`.
pub fn step_constants_in(seq: &GapBlockSeq, i: IndexJK) -> Result<StepConstants> {
    let mut c = step_constants(i);
    let tag = i.tag("fine");
    let b = seq
        .blocks()
        .iter()
        .position(|blk| blk.tag == tag)
        .ok_or_else(|| Error::InvalidArgument(format!("prefix does not contain step ({i})")))?;
    let (n0, _) = seq.block_start(b);
    c.n1 = Some(n0 + &seq.blocks()[b].count);
    c.n0 = Some(n0.clone());
    Ok(c)
}

/// The closed interval `I_{j,k}`.
pub fn target_interval(i: IndexJK) -> DyInterval {
    let c = step_constants(i);
    DyInterval::closed(c.ai, c.bi)
}

pub fn u_set(i: IndexJK) -> PeriodicIntervalSet {
    let c = step_constants(i);
    PeriodicIntervalSet::new(c.a.clone(), c.e2(), c.e3(), c.inv_e()).expect("E^3 < E^2")
}

/// The sequence through every step before `limit`; it ends at `a - b_I` of `limit`.
pub fn build_universal(limit: IndexJK) -> Result<GapBlockSeq> {
    let first = step_constants(IndexJK::FIRST);
    let mut seq = GapBlockSeq::new(&first.a - &first.bi);
    seq.set_monotone(true);
    let mut i = IndexJK::FIRST;
    while i < limit {
        let c = step_constants(i);
        seq.push(&c.e2() - &c.e3(), c.fine_count(), i.tag("fine"))?;
        let next = step_constants(i.succ());
        let bridge = c.e2().mul_pow2(-1);
        let q = dy_div_exact(&(&(&next.a - &next.bi) - seq.last_value()), &bridge)?;
        let count = q
            .to_integer()
            .ok_or_else(|| Error::NotExact(format!("bridge count {q} at ({i})")))?;
        if !count.is_positive() {
            return Err(Error::Violation(format!("bridge count {count} at ({i})")));
        }
        seq.push(bridge, count, i.tag("bridge"))?;
        i = i.succ();
    }
    Ok(seq)
}

/// Checks `a <= a'/2`, `E >= 2E'` and that `E/2` is an integer multiple `m` of `E'`
/// for the successor `'`.
pub fn check_lemma_useful(i: IndexJK) -> WitnessReport {
    let c = step_constants(i);
    let s = step_constants(i.succ());
    let half = c.e.mul_pow2(-1);
    let m = dy_div_exact(&half, &s.e).ok().and_then(|q| q.to_integer());
    let spacing = c.a <= s.a.mul_pow2(-1) && c.e >= s.e.mul_pow2(1);
    let p = params! {"j" => i.j, "k" => i.k, "m" => m.as_ref().map_or("none".to_string(), |m| m.to_string())};
    let rhs = m.as_ref().map_or_else(|| s.e.to_string(), |m| (&s.e * m).to_string());
    WitnessReport::with_values("lemma: E/2 = m * E(succ)", p, half.to_string(), Relation::Eq, rhs, spacing && m.is_some())
}

/// Integrality of `lambda_n1 / E^2` and `lambda_n0(succ) / E(succ)^2` for `i`.
pub fn check_integrality(seq: &GapBlockSeq, i: IndexJK) -> Vec<WitnessReport> {
    let quotient_report = |claim: &str, v: Result<Dyadic>, d: &Dyadic| match v
        .and_then(|v| dy_div_exact(&v, d))
    {
        Ok(q) => WitnessReport::with_values(
            claim,
            params! {"j" => i.j, "k" => i.k},
            q.to_string(),
            Relation::Eq,
            Dyadic::from(q.floor()).to_string(),
            q.is_integer(),
        ),
        Err(e) => WitnessReport::failed(claim, params! {"j" => i.j, "k" => i.k}, e.to_string()),
    };
    let c = match step_constants_in(seq, i) {
        Ok(c) => c,
        Err(e) => return vec![WitnessReport::failed("integrality", params! {"j" => i.j, "k" => i.k}, e.to_string())],
    };
    let (_, n1) = c.n0n1().expect("filled by step_constants_in");
    let n0_next = n1 + &seq.blocks()[block_of(seq, i, "bridge")].count;
    let next = step_constants(i.succ());
    vec![
        quotient_report("integrality: lambda_n1 / E^2", seq_value_at(seq, n1), &c.e2()),
        quotient_report(
            "integrality: lambda_n0(succ) / E(succ)^2",
            seq_value_at(seq, &n0_next),
            &next.e2(),
        ),
    ]
}

fn block_of(seq: &GapBlockSeq, i: IndexJK, part: &str) -> usize {
    let tag = i.tag(part);
    seq.blocks()
        .iter()
        .position(|b| b.tag == tag)
        .expect("fine and bridge blocks come in pairs")
}

/// `lambda_n0 = a - b_I` and `b - a_I <= lambda_n1 < a - b_I + 1`.
pub fn check_step_bounds(seq: &GapBlockSeq, i: IndexJK) -> Result<Vec<WitnessReport>> {
    let c = step_constants_in(seq, i)?;
    let (n0, n1) = c.n0n1()?;
    let l0 = seq_value_at(seq, n0)?;
    let l1 = seq_value_at(seq, n1)?;
    let p = || params! {"j" => i.j, "k" => i.k};
    let start = &c.a - &c.bi;
    Ok(vec![
        WitnessReport::compare("step: lambda_n0 = a - b_I", p(), &l0, Relation::Eq, &start),
        WitnessReport::compare("step: lambda_n1 >= b - a_I", p(), &l1, Relation::Ge, &(&c.b - &c.ai)),
        WitnessReport::compare("step: lambda_n1 < a - b_I + 1", p(), &l1, Relation::Lt, &(&start + &Dyadic::one())),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverWitness {
    pub x: Dyadic,
    pub index: IndexJK,
    #[serde(with = "crate::lattice::bigint_string")]
    pub nx: BigInt,
    #[serde(with = "crate::lattice::bigint_string")]
    pub nxp: BigInt,
    pub landing: Dyadic,
    #[serde(with = "crate::lattice::bigint_string")]
    pub component: BigInt,
}

/// The explicit index `n'_x` with `x + lambda_{n'_x}` in `U_{j,k}`, found analytically.
pub fn covering_witness(x: &Dyadic, i: IndexJK, seq: &GapBlockSeq) -> Result<CoverWitness> {
    let c = step_constants_in(seq, i)?;
    let iv = DyInterval::closed(c.ai.clone(), c.bi.clone());
    if !iv.contains(x) {
        return Err(Error::OutOfInterval {
            point: x.to_string(),
            domain: iv.to_string(),
        });
    }
    let (n0, n1) = c.n0n1()?;
    let violation = |what: &str| Error::Violation(format!("{what} at x={x}, ({i})"));
    if x + &seq_value_at(seq, n0)? > c.a {
        return Err(violation("x + lambda_n0 > a"));
    }
    let nx = seq_count_upto(seq, &(&c.a - x));
    let over = &(x + &seq_value_at(seq, &nx)?) - &c.a;
    if over > &c.e2() - &c.e3() {
        return Err(violation("x + lambda_nx - a > E^2 - E^3"));
    }
    let (steps, _) = dy_floor_ratio(&over, &c.e3());
    let nxp = &nx + steps;
    if &nx > n1 || &nxp > n1 {
        return Err(violation("n_x or n'_x beyond n1"));
    }
    let landing = x + &seq_value_at(seq, &nxp)?;
    let (component, _) = dy_floor_ratio(&(&landing - &c.a), &c.e2());
    let u = u_set(i);
    if component.is_negative() || component >= u.count || !u.component(&component).contains(&landing) {
        return Err(violation("landing outside U"));
    }
    Ok(CoverWitness {
        x: x.clone(),
        index: i,
        nx,
        nxp,
        landing,
        component,
    })
}

pub fn covering_report(x: &Dyadic, i: IndexJK, seq: &GapBlockSeq) -> WitnessReport {
    let p = params! {"j" => i.j, "k" => i.k, "x" => x};
    match covering_witness(x, i, seq) {
        Ok(w) => WitnessReport::with_values(
            "covering: x + lambda_n'x in U",
            p,
            w.landing.to_string(),
            Relation::Eq,
            u_set(i).component(&w.component).to_string(),
            true,
        )
        .with_note(format!("nx={} n'x={} component={}", w.nx, w.nxp, w.component)),
        Err(e) => WitnessReport::failed("covering: x + lambda_n'x in U", p, e.to_string()),
    }
}

/// Indices up to `limit` whose closed `I_{j,k}` lies inside `g`.
pub fn build_ug(g: &IntervalUnion, limit: IndexJK) -> Vec<(IndexJK, PeriodicIntervalSet)> {
    IndexJK::upto(limit)
        .into_iter()
        .filter(|&i| g.contains_interval(&target_interval(i)))
        .map(|i| (i, u_set(i)))
        .collect()
}

/// `#{n : x + lambda_n in U_G}` over the whole prefix.
pub fn fg_partial_sum(x: &Dyadic, ug: &[(IndexJK, PeriodicIntervalSet)], seq: &GapBlockSeq) -> BigInt {
    ug.iter().map(|(_, ps)| count_seq_in_periodic(x, seq, ps)).sum()
}

/// `(4j + 3) E`.
pub fn escape_bound(i: IndexJK) -> Dyadic {
    let c = step_constants(i);
    &Dyadic::from_int(4 * i.j as i64 + 3) * &c.e
}

/// `4jE + (2E - 2^-j E - 2E^2) + E`, the three-part bound summed before rounding up.
pub fn escape_decomposition(i: IndexJK) -> Dyadic {
    let c = step_constants(i);
    let j = i.j as i64;
    let grid = &Dyadic::from_int(4 * j) * &c.e;
    let left = &(&c.e.mul_pow2(1) - &c.e.mul_pow2(-j)) - &c.e2().mul_pow2(1);
    &(&grid + &left) + &c.e
}

/// Default cap on materialised translated components.
pub const ESCAPE_BUDGET: u64 = 1 << 23;

/// Default cap on components of `U_G` materialised by [`smooth_indicator`].
pub const SMOOTH_BUDGET: u64 = 1 << 16;

/// Exact measure of `[-j, j] ∩ (U - Lambda) \ I` by materialising every
/// translated component on the integer grid of `E^3`.
pub fn escape_measure_bruteforce(i: IndexJK, seq: &GapBlockSeq, budget: u64) -> Result<(Dyadic, WitnessReport)> {
    let c = step_constants(i);
    let j = Dyadic::from_int(i.j as i64);
    let window = DyInterval::closed(&(&c.a - &j) - &c.e, &c.b + &j);
    let aps: Vec<Ap> = seq
        .aps()
        .into_iter()
        .filter_map(|ap| {
            let (lo, hi) = ap_index_range(&ap, &window);
            (lo <= hi).then(|| Ap::new(ap.at(&lo), ap.step.clone(), hi - lo + 1u32))
        })
        .collect();
    let translates: BigInt = aps.iter().map(|ap| ap.count.clone()).sum();
    let needed = &translates * c.inv_e();
    if needed > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: needed.to_string(),
            budget: budget.to_string(),
        });
    }
    let scale = 3 * i.exponent();
    let to_units = |v: &Dyadic| -> Result<i128> {
        v.mul_pow2(scale)
            .to_integer()
            .and_then(|n| n.to_i128())
            .ok_or_else(|| Error::NotExact(format!("{v} is off the E^3 grid")))
    };
    let period = to_units(&c.e2())?;
    let width = to_units(&c.e3())?;
    let base = to_units(&c.a)?;
    let (lo_cap, hi_cap) = (to_units(&-&j)?, to_units(&j)?);
    let comps = c.inv_e().to_i128().expect("budget bounds the component count");
    let mut parts: Vec<(i128, i128)> = Vec::with_capacity(needed.to_usize().unwrap_or(0));
    for ap in &aps {
        let start = to_units(&ap.start)?;
        let step = to_units(&ap.step)?;
        let n = ap.count.to_i128().expect("bounded by budget");
        for t in 0..n {
            let shift = base - (start + t * step);
            // components whose translate meets [-j, j]
            let first = (lo_cap - width - shift).div_euclid(period).max(0);
            let last = (hi_cap - shift).div_euclid(period).min(comps - 1);
            for m in first..=last {
                let lo = (shift + m * period).max(lo_cap);
                let hi = (shift + m * period + width).min(hi_cap);
                if lo <= hi {
                    parts.push((lo, hi));
                }
            }
        }
    }
    parts.sort_unstable();
    let (ai, bi) = (to_units(&c.ai)?, to_units(&c.bi)?);
    let mut total: i128 = 0;
    let mut cur: Option<(i128, i128)> = None;
    let mut flush = |(lo, hi): (i128, i128)| {
        let inside = (hi.min(bi) - lo.max(ai)).max(0);
        total += hi - lo - inside;
    };
    for (lo, hi) in parts {
        match cur {
            Some((clo, chi)) if lo <= chi => cur = Some((clo, chi.max(hi))),
            Some(done) => {
                flush(done);
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some(done) = cur {
        flush(done);
    }
    let measure = Dyadic::new(BigInt::from(total), -scale);
    let report = WitnessReport::compare(
        "escape: measure <= 4jE + (2E - 2^-j E - 2E^2) + E",
        params! {"j" => i.j, "k" => i.k},
        &measure,
        Relation::Le,
        &escape_decomposition(i),
    )
    .with_note(format!("(4j+3)E = {}", escape_bound(i)));
    Ok((measure, report))
}

/// `(8j^2 + 6j) 2^(j - 2j*2^j)`.
pub fn borel_cantelli_term(j: u32) -> Dyadic {
    let jj = j as i64;
    Dyadic::from_int(8 * jj * jj + 6 * jj).mul_pow2(jj - IndexJK::row_len(j) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelCantelli {
    pub jmax: u32,
    pub partial: Dyadic,
    /// Bound on the remaining terms: they at least halve, so the tail is at
    /// most twice the first omitted term.
    pub tail: Dyadic,
}

pub fn borel_cantelli_partial(jmax: u32) -> BorelCantelli {
    let partial = (1..=jmax).map(borel_cantelli_term).sum();
    BorelCantelli {
        jmax,
        partial,
        tail: borel_cantelli_term(jmax + 1).mul_pow2(1),
    }
}

/// Checks that consecutive series terms at least halve from `j` on.
pub fn check_borel_cantelli_ratio(j: u32) -> WitnessReport {
    let now = borel_cantelli_term(j);
    let next = borel_cantelli_term(j + 1);
    WitnessReport::compare(
        "borel-cantelli: term(j+1) <= term(j)/2",
        params! {"j" => j},
        &next,
        Relation::Le,
        &now.mul_pow2(-1),
    )
}

/// A continuous `g` equal to 1 on every component of `U_G`, with linear ramps
/// of width `delta` outside each component. Reports the added measure in
/// every unit strip `[N-1, N]` against `2^-N / 2^ceil(log2 L_N)` with
/// `L_N = #{lambda <= 10N}`.
pub fn smooth_indicator(
    ug: &[(IndexJK, PeriodicIntervalSet)],
    seq: &GapBlockSeq,
    budget: u64,
) -> Result<(PiecewiseLinear, Dyadic, Vec<WitnessReport>)> {
    let total: BigInt = ug.iter().map(|(_, ps)| ps.count.clone()).sum();
    if total > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: total.to_string(),
            budget: budget.to_string(),
        });
    }
    let mut comps: Vec<DyInterval> = ug
        .iter()
        .flat_map(|(_, ps)| {
            let n = ps.count.to_u64().expect("bounded by budget");
            (0..n).map(move |m| ps.component(&BigInt::from(m)))
        })
        .collect();
    comps.sort_by(|a, b| a.lo().cmp(b.lo()));
    if comps.is_empty() {
        return Ok((PiecewiseLinear::zero(), Dyadic::zero(), Vec::new()));
    }
    let to_i64 = |n: BigInt| {
        n.to_i64()
            .ok_or_else(|| Error::GuardExceeded { span: u64::MAX, guard: crate::exactnum::span_guard_bits() })
    };
    let n_max = to_i64(comps.last().expect("non-empty").hi().ceil())? + 1;
    let reach = Dyadic::from_int(10 * n_max);
    if seq.last_value() < &reach {
        return Err(Error::InvalidArgument(format!(
            "prefix ends at {} but counting up to {reach} is required",
            seq.last_value()
        )));
    }
    let log_l = |n: i64| {
        let l = seq_count_upto(seq, &Dyadic::from_int(10 * n)).max(BigInt::one());
        Dyadic::from(l).ceil_log2().expect("positive")
    };
    let m = comps.len() as i64;
    let m_bits = Dyadic::from_int(2 * m).ceil_log2().expect("positive");
    let delta = Dyadic::pow2(-(n_max + log_l(n_max) + m_bits + 1));

    let g = PiecewiseLinear::concat(comps.iter().map(|c| {
        PiecewiseLinear::trapezoid(
            c.lo() - &delta,
            c.lo().clone(),
            c.hi().clone(),
            c.hi() + &delta,
            Dyadic::one(),
        )
        .expect("ramps are non-degenerate")
    }))?;

    // added support, split at integers
    let mut added: std::collections::BTreeMap<i64, Dyadic> = std::collections::BTreeMap::new();
    for c in &comps {
        for (lo, hi) in [(c.lo() - &delta, c.lo().clone()), (c.hi().clone(), c.hi() + &delta)] {
            let mut lo = lo;
            while lo < hi {
                let strip = to_i64(lo.floor())? + 1;
                let cut = Dyadic::from_int(strip).min(hi.clone());
                let entry = added.entry(strip).or_insert_with(Dyadic::zero);
                *entry = crate::exactnum::dy_add(entry, &(&cut - &lo))?;
                lo = cut;
            }
        }
    }
    let mut reports: Vec<WitnessReport> = added
        .into_iter()
        .map(|(n, measure)| {
            let bound = Dyadic::pow2(-n - log_l(n));
            WitnessReport::compare(
                "smoothing: added measure in [N-1,N] < 2^-N / 2^ceil(log2 L_N)",
                params! {"N" => n},
                &measure,
                Relation::Lt,
                &bound,
            )
        })
        .collect();
    let plateau = comps
        .iter()
        .map(|c| crate::exactnum::pl_eval(&g, &c.midpoint()))
        .collect::<Result<Vec<_>>>()?;
    let lowest = plateau.into_iter().min().expect("non-empty");
    reports.push(WitnessReport::compare(
        "smoothing: g = 1 at component centres",
        params! {"components" => m},
        &lowest,
        Relation::Eq,
        &Dyadic::one(),
    ));
    reports.push(WitnessReport::compare(
        "smoothing: g <= 1",
        params! {"components" => m},
        &g.max_value(),
        Relation::Le,
        &Dyadic::one(),
    ));
    Ok((g, delta, reports))
}

/// Covering reports for `samples` seeded points in every `I_{j,k}` of `indices`.
pub fn covering_sweep(
    indices: &[IndexJK],
    seq: &GapBlockSeq,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Vec<WitnessReport> {
    let per_index = exec.map(indices, |&i| {
        let mut rng = crate::sampling::rng(crate::sampling::derive_seed(seed, &[i.j as u64, i.k]));
        let xs = crate::sampling::sample_many(&mut rng, &target_interval(i), samples);
        let mut failures: Vec<WitnessReport> = xs
            .iter()
            .map(|x| covering_report(x, i, seq))
            .filter(|r| !r.passed())
            .collect();
        let passed = samples - failures.len();
        failures.push(WitnessReport::compare_display(
            "covering: sampled points landing in U",
            params! {"j" => i.j, "k" => i.k, "seed" => seed},
            &passed,
            Relation::Eq,
            &samples,
        ));
        failures
    });
    per_index.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn ix(j: u32, k: u64) -> IndexJK {
        IndexJK::new(j, k).unwrap()
    }

    #[test]
    fn successor_and_predecessor() {
        assert_eq!(ix(1, 0).succ(), ix(1, 1));
        assert_eq!(ix(1, 3).succ(), ix(2, 0));
        assert_eq!(ix(2, 0).pred().unwrap(), ix(1, 3));
        assert_eq!(ix(1, 0).pred(), Err(Error::NoPredecessor));
        assert!(IndexJK::new(1, 4).is_err());
        assert_eq!("(2,15)".parse::<IndexJK>().unwrap(), ix(2, 15));
        assert_eq!(IndexJK::rows(2).len(), 4 + 16);
    }

    #[test]
    fn constants() {
        let c = step_constants(ix(1, 0));
        assert_eq!((c.ai.clone(), c.bi.clone(), c.a.clone()), (d("1/2"), d("1"), d("16")));
        assert_eq!(c.e, d("2^-4"));
        assert_eq!(c.b, d("16") + d("2^-4"));
        assert_eq!(c.fine_count(), BigInt::from(160));
        let c = step_constants(ix(1, 1));
        assert_eq!((c.a, c.e, c.bi), (d("32"), d("2^-5"), d("1/2")));
        let c = step_constants(ix(2, 0));
        assert_eq!((c.a, c.e), (d("65536"), d("2^-16")));
        let u = u_set(ix(1, 0));
        assert_eq!((u.period.clone(), u.width.clone(), u.count.clone()), (d("2^-8"), d("2^-12"), BigInt::from(16)));
        assert_eq!(u.measure(), d("2^-8"));
        assert!(u.hull().hi() <= &step_constants(ix(1, 0)).b);
    }

    #[test]
    fn first_steps() {
        let seq = build_universal(ix(1, 1)).unwrap();
        let blocks: Vec<_> = seq.blocks().iter().map(|b| (b.gap.clone(), b.count.clone())).collect();
        assert_eq!(
            blocks,
            vec![(d("2^-8") - d("2^-12"), BigInt::from(160)), (d("2^-9"), BigInt::from(8148))]
        );
        assert_eq!(seq.point_count(), BigInt::from(8309));
        assert_eq!(seq_value_at(&seq, &BigInt::from(8308)).unwrap(), d("31.5"));
        // independent oracle: the closed form of lambda_n1
        let oracle = d("16") - d("1/2") + d("2") * d("2^-4") - d("2^-1") * d("2^-4") - d("2") * d("2^-8");
        assert_eq!(seq_value_at(&seq, &BigInt::from(160)).unwrap(), oracle);
        assert!(check_step_bounds(&seq, ix(1, 0)).unwrap().iter().all(|r| r.passed()));
    }

    #[test]
    fn lemma_multipliers() {
        let m = |i| check_lemma_useful(i).params["m"].clone();
        assert_eq!(m(ix(1, 0)), "1");
        assert_eq!(m(ix(2, 5)), "1");
        // E(1,3)/2 = 2^-8 and E(2,0) = 2^-16
        assert_eq!(m(ix(1, 3)), "256");
        assert!(IndexJK::rows(3).into_iter().all(|i| check_lemma_useful(i).passed()));
    }

    #[test]
    fn integrality_examples() {
        let seq = build_universal(ix(1, 2)).unwrap();
        let r = check_integrality(&seq, ix(1, 0));
        assert_eq!(r[0].lhs, "1995*2^1");
        assert_eq!(d(&r[0].lhs), d("3990"));
        assert_eq!(d(&r[1].lhs), d("32256"));
        assert!(r.iter().all(|r| r.passed()));
        assert!(check_integrality(&seq, ix(1, 1)).iter().all(|r| r.passed()));
    }

    fn enumerate_witness(x: &Dyadic, i: IndexJK, seq: &GapBlockSeq) -> (usize, usize) {
        let c = step_constants(i);
        let pts = seq.enumerate(20_000);
        let nx = pts.iter().position(|l| x + l > c.a).unwrap();
        let over = &(x + &pts[nx]) - &c.a;
        let mut steps = 0;
        while Dyadic::from_int(steps + 1) * c.e3() <= over {
            steps += 1;
        }
        let nxp = nx + steps as usize;
        assert!(u_set(i).contains(&(x + &pts[nxp])));
        (nx, nxp)
    }

    #[test]
    fn covering_examples() {
        let seq = build_universal(ix(1, 1)).unwrap();
        for (x, nx, nxp, comp) in [("3/4", 69, 80, 11), ("1/2", 137, 144, 7), ("1", 1, 16, 15)] {
            let w = covering_witness(&d(x), ix(1, 0), &seq).unwrap();
            assert_eq!((w.nx.clone(), w.nxp.clone(), w.component.clone()), (nx.into(), nxp.into(), comp.into()));
            assert_eq!(enumerate_witness(&d(x), ix(1, 0), &seq), (nx as usize, nxp as usize));
        }
        let w = covering_witness(&d("3/4"), ix(1, 0), &seq).unwrap();
        assert_eq!(w.landing, d("16") + d("11/256"));
        assert!(matches!(covering_witness(&d("2"), ix(1, 0), &seq), Err(Error::OutOfInterval { .. })));
    }

    #[test]
    fn ug_selection() {
        let g = IntervalUnion::from_intervals([DyInterval::open(d("0"), d("2"))]);
        let ids: Vec<_> = build_ug(&g, ix(1, 3)).into_iter().map(|(i, _)| i).collect();
        assert_eq!(ids, vec![ix(1, 0)]);
        let all = IntervalUnion::from_intervals([DyInterval::open(d("-1000"), d("1000"))]);
        assert_eq!(build_ug(&all, ix(1, 3)).len(), 4);
        assert!(build_ug(&IntervalUnion::new(), ix(1, 3)).is_empty());
    }

    #[test]
    fn fg_counts_match_enumeration() {
        let seq = build_universal(ix(1, 1)).unwrap();
        let ug = vec![(ix(1, 0), u_set(ix(1, 0)))];
        let pts = seq.enumerate(20_000);
        for x in ["3/4", "0.5", "1", "-3", "0.625"] {
            let x = d(x);
            let oracle = pts.iter().filter(|l| ug[0].1.contains(&(&x + *l))).count();
            assert_eq!(fg_partial_sum(&x, &ug, &seq), BigInt::from(oracle));
        }
        assert!(fg_partial_sum(&d("3/4"), &ug, &seq) >= BigInt::one());
        assert_eq!(fg_partial_sum(&d("-100"), &ug, &seq), BigInt::zero());
    }

    #[test]
    fn escape_bounds() {
        assert_eq!(escape_bound(ix(1, 0)), d("7*2^-4"));
        assert_eq!(escape_bound(ix(1, 3)), d("7*2^-7"));
        assert_eq!(escape_bound(ix(2, 0)), d("11*2^-16"));
        let seq = build_universal(ix(1, 1)).unwrap();
        let (m, r) = escape_measure_bruteforce(ix(1, 0), &seq, ESCAPE_BUDGET).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(m <= escape_bound(ix(1, 0)));
        let seq2 = build_universal(ix(2, 1)).unwrap();
        assert!(matches!(
            escape_measure_bruteforce(ix(2, 0), &seq2, ESCAPE_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn escape_matches_interval_union_oracle() {
        let seq = build_universal(ix(1, 1)).unwrap();
        let c = step_constants(ix(1, 0));
        let u = u_set(ix(1, 0));
        let cap = DyInterval::closed(d("-1"), d("1"));
        let mut parts = Vec::new();
        for l in seq.enumerate(20_000) {
            for m in 0..16 {
                if let Some(p) = u.component(&BigInt::from(m)).shift(&-&l).intersect(&cap) {
                    parts.push(p);
                }
            }
        }
        let oracle = IntervalUnion::from_intervals(parts)
            .subtract_interval(&DyInterval::closed(c.ai, c.bi))
            .measure()
            .unwrap();
        let (m, _) = escape_measure_bruteforce(ix(1, 0), &seq, ESCAPE_BUDGET).unwrap();
        assert_eq!(m, oracle);
    }

    #[test]
    fn borel_cantelli() {
        assert_eq!(borel_cantelli_partial(1).partial, d("14*2^-3"));
        assert_eq!(borel_cantelli_partial(2).partial, d("14*2^-3") + d("44*2^-14"));
        let t: Vec<_> = (1..6).map(|j| borel_cantelli_partial(j).tail).collect();
        assert!(t.windows(2).all(|w| w[1] < w[0]));
        assert!((1..12).all(|j| check_borel_cantelli_ratio(j).passed()));
    }

    #[test]
    fn smoothing_first_index() {
        let seq = build_universal(ix(2, 0)).unwrap();
        let ug = vec![(ix(1, 0), u_set(ix(1, 0)))];
        let (g, delta, reports) = smooth_indicator(&ug, &seq, 1 << 16).unwrap();
        assert!(reports.iter().all(|r| r.passed()), "{reports:?}");
        assert!(delta < d("2^-17"));
        assert_eq!(crate::exactnum::pl_eval(&g, &(d("16") + d("2^-13"))).unwrap(), Dyadic::one());
        let (z, _, r) = smooth_indicator(&[], &seq, 1 << 16).unwrap();
        assert!(z.is_zero() && r.is_empty());
    }
}
