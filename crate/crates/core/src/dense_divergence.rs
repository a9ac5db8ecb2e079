//! An asymptotically dense set whose divergence set is a prescribed open set.
//!
//! Dyadic intervals `I_j` are enumerated so that `I_j ⊆ [-j, j]` and
//! `|I_j| >= 1/j`. For each `j` the tent `f_j` has height `2^-j` on
//! `U_j = [2^j, 2^j + 2^-2^j]` and ramps of width `2^(-2^j-j-1)`. The set is
//! `Λ1 ∪ Λ2` with `Λ1_j` the multiples of `2^(-2^j-j)` in
//! `[a_j - b_{I_j}, b_j - a_{I_j}]` and `Λ2_j` (for `j >= 10`) the multiples
//! of `2^-j` in `(2^(j-1) + 2(j-1), 2^j + 2j]`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{dy_ceil_ratio, dy_floor_ratio, DyInterval, Dyadic, IntervalUnion, PiecewiseLinear};
use crate::lattice::{
    count_ap_in_interval, merge_lattice_aps, seq_check_monotone_gaps, sum_pl_over_ap, sum_pl_over_seq,
    Ap, GapBlockSeq,
};
use crate::params;
use crate::report::{Relation, WitnessReport};

/// First `j` for which `Λ2_j` belongs to the set.
pub const LAMBDA2_FROM: u32 = 10;

/// `I_j = [(k-1) 2^-level, k 2^-level]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumeratedInterval {
    pub j: u32,
    pub level: u32,
    pub k: i64,
    pub interval: DyInterval,
}

impl EnumeratedInterval {
    /// The concentric closed interval of three times the length.
    pub fn tripled(&self) -> DyInterval {
        self.interval.scaled_concentric(3)
    }
}

fn dyadic_interval(level: u32, k: i64) -> DyInterval {
    let unit = Dyadic::pow2(-(level as i64));
    DyInterval::closed(&unit * &Dyadic::from_int(k - 1), &unit * &Dyadic::from_int(k))
}

/// The first `count` intervals of the staged enumeration.
///
/// Stage `t` scans, in (level, left end) order, every not yet emitted
/// dyadic interval of level `<= t` inside `[-t, t]` and emits it as `I_j`,
/// `j` the next index, when `I ⊆ [-j, j]` and `2^level <= j`.
pub fn enum_intervals(count: usize) -> Vec<EnumeratedInterval> {
    let mut out: Vec<EnumeratedInterval> = Vec::with_capacity(count);
    let mut seen: HashSet<(u32, i64)> = HashSet::new();
    let mut t: u32 = 1;
    while out.len() < count {
        for level in 0..=t {
            // a level can only be emitted once j >= 2^level
            if (1usize << level) > count {
                break;
            }
            let reach = (t as i64) << level;
            for k in (1 - reach)..=reach {
                if seen.contains(&(level, k)) {
                    continue;
                }
                let j = out.len() as u32 + 1;
                let iv = dyadic_interval(level, k);
                let span = DyInterval::closed(Dyadic::from_int(-(j as i64)), Dyadic::from_int(j as i64));
                if span.contains_interval(&iv) && (1u64 << level) <= j as u64 {
                    seen.insert((level, k));
                    out.push(EnumeratedInterval {
                        j,
                        level,
                        k,
                        interval: iv,
                    });
                    if out.len() == count {
                        return out;
                    }
                }
            }
        }
        t += 1;
    }
    out
}

/// Checks both emission constraints for one enumerated interval.
pub fn check_emission(e: &EnumeratedInterval) -> WitnessReport {
    let j = Dyadic::from_int(e.j as i64);
    let span = DyInterval::closed(-&j, j.clone());
    let ok = span.contains_interval(&e.interval) && &e.interval.length() * &j >= Dyadic::one();
    WitnessReport::with_values(
        "enumeration: I_j in [-j,j] and j*|I_j| >= 1",
        params! {"j" => e.j},
        (&e.interval.length() * &j).to_string(),
        Relation::Ge,
        Dyadic::one().to_string(),
        ok,
    )
    .with_note(format!("I_j = {}", e.interval))
}

/// `U_j = [2^j, 2^j + 2^-2^j]`.
pub fn u_interval(j: u32) -> DyInterval {
    let a = Dyadic::pow2(j as i64);
    let b = &a + &Dyadic::pow2(-(1i64 << j));
    DyInterval::closed(a, b)
}

/// Half-width of each ramp, `2^(-2^j - j - 1)`.
pub fn ramp_width(j: u32) -> Dyadic {
    Dyadic::pow2(-(1i64 << j) - j as i64 - 1)
}

pub fn tent_f(j: u32) -> PiecewiseLinear {
    let u = u_interval(j);
    let r = ramp_width(j);
    PiecewiseLinear::trapezoid(
        u.lo() - &r,
        u.lo().clone(),
        u.hi().clone(),
        u.hi() + &r,
        Dyadic::pow2(-(j as i64)),
    )
    .expect("tent breakpoints increase")
}

/// `Λ1_j` for the interval `iv = I_j`.
pub fn lambda1(j: u32, iv: &DyInterval) -> Option<Ap> {
    let u = u_interval(j);
    let window = DyInterval::closed(u.lo() - iv.hi(), u.hi() - iv.lo());
    Ap::lattice_in(&Dyadic::pow2(-(1i64 << j) - j as i64), &window)
}

/// `Λ2_j`, whether or not `j` is in the range where it belongs to the set.
pub fn lambda2(j: u32) -> Option<Ap> {
    let jj = j as i64;
    let window = DyInterval::new(
        Dyadic::pow2(jj - 1) + Dyadic::from_int(2 * (jj - 1)),
        Dyadic::pow2(jj) + Dyadic::from_int(2 * jj),
        false,
        true,
    )
    .expect("non-empty window");
    Ap::lattice_in(&Dyadic::pow2(-jj), &window)
}

fn sum_over(f: &PiecewiseLinear, x: &Dyadic, ap: Option<Ap>) -> Result<Dyadic> {
    match ap {
        Some(ap) => sum_pl_over_ap(f, &(x + &ap.start), &ap.step, &ap.count),
        None => Ok(Dyadic::zero()),
    }
}

/// `sum_{λ in Λ1_j} f_j(x + λ) >= 1` for `x` in `I_j`.
pub fn lower_bound_check(e: &EnumeratedInterval, x: &Dyadic) -> Result<WitnessReport> {
    if !e.interval.contains(x) {
        return Err(Error::OutOfInterval {
            point: x.to_string(),
            domain: e.interval.to_string(),
        });
    }
    let s = sum_over(&tent_f(e.j), x, lambda1(e.j, &e.interval))?;
    Ok(WitnessReport::compare(
        "lower: sum over Λ1_j of f_j(x+λ) >= 1",
        params! {"j" => e.j, "x" => x},
        &s,
        Relation::Ge,
        &Dyadic::one(),
    ))
}

/// `sum_{λ in Λ1_j} f_j(x + λ) = 0` for `x` outside the tripled interval.
pub fn outside_zero_check(e: &EnumeratedInterval, x: &Dyadic) -> Result<WitnessReport> {
    let tripled = e.tripled();
    if tripled.contains(x) {
        return Err(Error::OutOfInterval {
            point: x.to_string(),
            domain: format!("complement of {tripled}"),
        });
    }
    let s = sum_over(&tent_f(e.j), x, lambda1(e.j, &e.interval))?;
    Ok(WitnessReport::compare(
        "outside: sum over Λ1_j of f_j(x+λ) = 0",
        params! {"j" => e.j, "x" => x},
        &s,
        Relation::Eq,
        &Dyadic::zero(),
    ))
}

/// Sampling domain for [`outside_zero_check`]: `[-j, j]` minus the tripled
/// interval, or `[-j-1, j+1]` minus it when the former is empty.
pub fn outside_domain(e: &EnumeratedInterval) -> IntervalUnion {
    let tripled = e.tripled();
    for pad in [0, 1] {
        let r = Dyadic::from_int(e.j as i64 + pad);
        let u = IntervalUnion::from_intervals([DyInterval::closed(-&r, r)]).subtract_interval(&tripled);
        if !u.is_empty() {
            return u;
        }
    }
    unreachable!("the tripled interval has length at most 3")
}

/// `sum_{λ in Λ1_j} f_{j0}(x + λ)`; asserted to vanish only for `j0 >= 10`.
pub fn cross_term_zero_check(j0: u32, e: &EnumeratedInterval, x: &Dyadic) -> Result<WitnessReport> {
    let s = sum_over(&tent_f(j0), x, lambda1(e.j, &e.interval))?;
    let r = WitnessReport::compare(
        "cross: sum over Λ1_j of f_j0(x+λ) = 0",
        params! {"j0" => j0, "j" => e.j, "x" => x},
        &s,
        Relation::Eq,
        &Dyadic::zero(),
    );
    Ok(if j0 >= LAMBDA2_FROM { r } else { r.informational() })
}

/// `#{λ in Λ2_j : f_j(x + λ) != 0}`.
pub fn lambda2_hit_count(j: u32, x: &Dyadic) -> BigInt {
    let Some(ap) = lambda2(j) else { return BigInt::zero() };
    let u = u_interval(j);
    let r = ramp_width(j);
    let support = DyInterval::open(&(u.lo() - &r) - x, &(u.hi() + &r) - x);
    count_ap_in_interval(&ap.start, &ap.step, &ap.count, &support)
}

pub fn lambda2_hit_report(j: u32, x: &Dyadic) -> WitnessReport {
    WitnessReport::compare_display(
        "lambda2: at most one λ in Λ2_j with f_j(x+λ) != 0",
        params! {"j" => j, "x" => x},
        &lambda2_hit_count(j, x),
        Relation::Le,
        &BigInt::one(),
    )
}

/// The construction for the first `jmax` enumerated intervals.
#[derive(Clone, Debug, Serialize)]
pub struct Thm31 {
    pub jmax: u32,
    pub intervals: Vec<EnumeratedInterval>,
}

impl Thm31 {
    pub fn new(jmax: u32) -> Self {
        Thm31 {
            jmax,
            intervals: enum_intervals(jmax as usize),
        }
    }

    pub fn interval(&self, j: u32) -> &EnumeratedInterval {
        &self.intervals[j as usize - 1]
    }

    /// `J_G = {j <= jmax : tripled I_j ⊆ G}`.
    pub fn selected(&self, g: &IntervalUnion) -> Vec<u32> {
        self.intervals
            .iter()
            .filter(|e| g.contains_interval(&e.tripled()))
            .map(|e| e.j)
            .collect()
    }

    /// `f_G = sum_{j in J_G} f_j`; the tents have disjoint supports.
    pub fn f_g(&self, g: &IntervalUnion) -> Result<PiecewiseLinear> {
        PiecewiseLinear::concat(self.selected(g).into_iter().map(tent_f))
    }

    /// Tagged progressions of `Λ1_j` (all `j <= jmax`) and optionally `Λ2_j`.
    pub fn progressions(&self, include_lambda2: bool) -> Vec<(Ap, String)> {
        let mut out: Vec<(Ap, String)> = self
            .intervals
            .iter()
            .filter_map(|e| lambda1(e.j, &e.interval).map(|ap| (ap, format!("L1 j={}", e.j))))
            .collect();
        if include_lambda2 {
            out.extend(
                (LAMBDA2_FROM..=self.jmax).filter_map(|j| lambda2(j).map(|ap| (ap, format!("L2 j={j}")))),
            );
        }
        out
    }

    /// `Λ1 ∪ Λ2` through `jmax` as one ordered sequence without duplicates.
    pub fn merged(&self, include_lambda2: bool) -> Result<GapBlockSeq> {
        merge_lattice_aps(&self.progressions(include_lambda2))
    }
}

/// Exact `sum_{λ} f_G(x + λ)` over the merged prefix through `jmax`.
pub fn fg_sum_partial_31(x: &Dyadic, g: &IntervalUnion, c: &Thm31, include_lambda2: bool) -> Result<Dyadic> {
    let f = c.f_g(g)?;
    if f.is_zero() {
        return Ok(Dyadic::zero());
    }
    sum_pl_over_seq(&f, x, &c.merged(include_lambda2)?)
}

/// The `Λ2` contribution at `x` against `head + sum_{j > M_x} 2^-j`, where
/// `M_x = max(9, ceil|x|)` and the head is the exact contribution of `j <= M_x`.
pub fn lambda2_tail_check(x: &Dyadic, g: &IntervalUnion, c: &Thm31) -> Result<Vec<WitnessReport>> {
    let f = c.f_g(g)?;
    let m_x = (LAMBDA2_FROM as i64 - 1).max(x.abs().ceil().try_into().unwrap_or(i64::MAX));
    let mut head = Dyadic::zero();
    let mut total = Dyadic::zero();
    let mut reports = Vec::new();
    for j in LAMBDA2_FROM..=c.jmax {
        let s = sum_over(&f, x, lambda2(j))?;
        total += &s;
        if (j as i64) <= m_x {
            head += &s;
        } else {
            reports.push(WitnessReport::compare(
                "tail: sum over Λ2_j of f_G(x+λ) <= 2^-j",
                params! {"j" => j, "x" => x},
                &s,
                Relation::Le,
                &Dyadic::pow2(-(j as i64)),
            ));
        }
    }
    let tail = if m_x >= c.jmax as i64 {
        Dyadic::zero()
    } else {
        Dyadic::pow2(-m_x)
    };
    reports.push(WitnessReport::compare(
        "tail: sum over Λ2 of f_G(x+λ) <= head + sum_{j>M_x} 2^-j",
        params! {"x" => x, "jmax" => c.jmax, "M_x" => m_x},
        &total,
        Relation::Le,
        &(&head + &tail),
    ));
    Ok(reports)
}

/// Largest gap between consecutive points that both lie in `window`.
pub fn max_gap_in(seq: &GapBlockSeq, window: &DyInterval) -> Option<Dyadic> {
    let mut best: Option<Dyadic> = None;
    for (b, block) in seq.blocks().iter().enumerate() {
        let (_, s) = seq.block_start(b);
        // gap m joins s + (m-1)g and s + m g
        let m_lo = (dy_ceil_ratio(&(window.lo() - s), &block.gap) + 1u32).max(BigInt::one());
        let (m_hi, _) = dy_floor_ratio(&(window.hi() - s), &block.gap);
        let m_hi = m_hi.min(block.count.clone());
        if m_lo <= m_hi && best.as_ref().is_none_or(|g| &block.gap > g) {
            best = Some(block.gap.clone());
        }
    }
    best
}

/// Max gap of `Λ1 ∪ Λ2` on `[2^(j-1) + 2(j-1), 2^j + 2j]` against `2^-j`.
pub fn density_check(seq: &GapBlockSeq, j: u32) -> WitnessReport {
    let jj = j as i64;
    let window = DyInterval::closed(
        Dyadic::pow2(jj - 1) + Dyadic::from_int(2 * (jj - 1)),
        Dyadic::pow2(jj) + Dyadic::from_int(2 * jj),
    );
    let claim = "density: max gap on the Λ2_j window <= 2^-j";
    match max_gap_in(seq, &window) {
        Some(g) => WitnessReport::compare(claim, params! {"j" => j}, &g, Relation::Le, &Dyadic::pow2(-jj)),
        None => WitnessReport::failed(claim, params! {"j" => j}, "no points in window"),
    }
}

/// Passes when the merged gaps increase somewhere.
pub fn gap_increase_check(seq: &GapBlockSeq) -> WitnessReport {
    let r = seq_check_monotone_gaps(seq);
    let increases = r.failed_claim();
    let mut out = WitnessReport::with_values(
        "density: merged gaps are not monotone",
        r.params.clone(),
        r.lhs.clone(),
        Relation::Gt,
        r.rhs.clone(),
        increases,
    );
    out.note = r.note;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::pl_eval;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn brute(f: &PiecewiseLinear, x: &Dyadic, ap: &Ap) -> Dyadic {
        let n: i64 = ap.count.clone().try_into().unwrap();
        (0..n)
            .map(|k| pl_eval(f, &(x + &ap.at(&BigInt::from(k)))).unwrap())
            .sum()
    }

    #[test]
    fn enumeration() {
        let e = enum_intervals(1000);
        assert_eq!(e[0].interval, DyInterval::closed(d("-1"), d("0")));
        assert!(e.iter().all(|e| check_emission(e).passed()));
        assert!(e.iter().any(|e| e.interval == DyInterval::closed(d("0"), d("1/2"))));
        let distinct: HashSet<_> = e.iter().map(|e| (e.level, e.k)).collect();
        assert_eq!(distinct.len(), 1000);
    }

    #[test]
    fn tents() {
        let f = tent_f(1);
        assert_eq!(pl_eval(&f, &(d("2") + d("2^-5"))).unwrap(), d("1/2"));
        assert_eq!(f.support().unwrap(), (&d("1.9375"), &d("2.3125")));
        assert_eq!(pl_eval(&tent_f(3), &(d("8") - d("2^-11"))).unwrap(), Dyadic::zero());
        assert_eq!(tent_f(4).max_value(), d("2^-4"));
    }

    #[test]
    fn lower_bound_examples() {
        let c = Thm31::new(3);
        let e1 = c.interval(1);
        let r = lower_bound_check(e1, &d("-1/2")).unwrap();
        assert_eq!(d(&r.lhs), d("3/2"));
        let ap = lambda1(1, &e1.interval).unwrap();
        assert_eq!(brute(&tent_f(1), &d("-1/2"), &ap), d("3/2"));
        assert!(lower_bound_check(e1, &d("0")).unwrap().passed());
        let e2 = c.interval(2);
        let mid = e2.interval.midpoint();
        let r = lower_bound_check(e2, &mid).unwrap();
        assert!(r.passed());
        assert_eq!(d(&r.lhs), brute(&tent_f(2), &mid, &lambda1(2, &e2.interval).unwrap()));
        assert!(lower_bound_check(e1, &d("1/2")).is_err());
    }

    #[test]
    fn outside_examples() {
        let c = Thm31::new(2);
        let e1 = c.interval(1);
        // the tripled first interval covers [-1, 1], so the domain falls back to [-2, 2]
        assert_eq!(e1.tripled(), DyInterval::closed(d("-2"), d("1")));
        assert!(outside_zero_check(e1, &d("0.625")).is_err());
        let x = d("1") + d("2^-20");
        assert!(outside_zero_check(e1, &x).unwrap().passed());
        assert_eq!(brute(&tent_f(1), &x, &lambda1(1, &e1.interval).unwrap()), Dyadic::zero());
        let e2 = c.interval(2);
        let dom = outside_domain(e2);
        for p in dom.parts() {
            let r = outside_zero_check(e2, &p.midpoint()).unwrap();
            assert!(r.passed());
        }
    }

    #[test]
    fn cross_terms() {
        let c = Thm31::new(11);
        assert!(cross_term_zero_check(10, c.interval(9), &d("0")).unwrap().passed());
        assert!(cross_term_zero_check(10, c.interval(11), &d("0")).unwrap().passed());
        let small = cross_term_zero_check(1, c.interval(2), &d("0")).unwrap();
        assert_eq!(small.outcome, crate::report::Outcome::Info);
        let ap = lambda1(2, &c.interval(2).interval).unwrap();
        assert_eq!(d(&small.lhs), brute(&tent_f(1), &d("0"), &ap));
    }

    #[test]
    fn lambda2_hits() {
        assert!(lambda2_hit_count(10, &d("0")) <= BigInt::one());
        assert!(lambda2_hit_count(5, &d("0")) <= BigInt::one());
        // j = 1: window (1, 4] on the 1/2 grid, support (1.9375, 2.3125)
        assert_eq!(lambda2_hit_count(1, &d("0")), BigInt::one());
        let ap = lambda2(10).unwrap();
        assert_eq!(ap.start, d("530") + d("2^-10"));
        assert_eq!(ap.last(), d("1044"));
    }

    #[test]
    fn fg_sum_examples() {
        let c = Thm31::new(4);
        assert_eq!(fg_sum_partial_31(&d("-1/2"), &IntervalUnion::new(), &c, false).unwrap(), Dyadic::zero());
        let g = IntervalUnion::from_intervals([DyInterval::open(d("-100"), d("100"))]);
        let x = d("-1/2");
        let hits = c.intervals.iter().filter(|e| e.interval.contains(&x)).count();
        let s = fg_sum_partial_31(&x, &g, &c, false).unwrap();
        assert!(s >= Dyadic::from_int(hits as i64));
    }

    #[test]
    fn density_and_tail() {
        let c = Thm31::new(12);
        let seq = c.merged(true).unwrap();
        assert!(density_check(&seq, 10).passed());
        assert!(density_check(&seq, 11).passed());
        assert!(gap_increase_check(&seq).passed());
        let g = IntervalUnion::from_intervals([DyInterval::open(d("-100"), d("100"))]);
        for x in ["0", "-1/2", "3"] {
            assert!(lambda2_tail_check(&d(x), &g, &c).unwrap().iter().all(|r| r.passed()));
        }
    }
}
