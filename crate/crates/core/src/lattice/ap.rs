use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactnum::{dy_ceil_ratio, dy_floor_ratio, DyInterval, Dyadic};

/// `{start + k*step : 0 <= k < count}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ap {
    pub start: Dyadic,
    pub step: Dyadic,
    pub count: BigInt,
}

impl Ap {
    pub fn new(start: Dyadic, step: Dyadic, count: BigInt) -> Self {
        assert!(step.is_positive(), "progression step must be positive");
        Ap { start, step, count }
    }

    /// A one-point progression.
    pub fn single(x: Dyadic) -> Self {
        Ap {
            start: x,
            step: Dyadic::one(),
            count: BigInt::one(),
        }
    }

    /// The lattice points `k*step` lying in `iv`, or `None` if there are none.
    pub fn lattice_in(step: &Dyadic, iv: &DyInterval) -> Option<Self> {
        let (lo, hi) = index_bounds(&Dyadic::zero(), step, iv);
        if lo > hi {
            return None;
        }
        Some(Ap::new(step * &lo, step.clone(), hi - &lo + 1u32))
    }

    pub fn is_empty(&self) -> bool {
        self.count <= BigInt::zero()
    }

    pub fn last(&self) -> Dyadic {
        &self.start + &(&self.step * &(&self.count - 1u32))
    }

    pub fn at(&self, k: &BigInt) -> Dyadic {
        &self.start + &(&self.step * k)
    }

    pub fn shift(&self, t: &Dyadic) -> Self {
        Ap {
            start: &self.start + t,
            step: self.step.clone(),
            count: self.count.clone(),
        }
    }

    /// Whether `x` is one of the points.
    pub fn contains(&self, x: &Dyadic) -> bool {
        let (q, r) = dy_floor_ratio(&(x - &self.start), &self.step);
        r.is_zero() && q >= BigInt::zero() && q < self.count
    }
}

/// Unclipped index range `[lo, hi]` of `k` with `start + k*step` in `iv`.
fn index_bounds(start: &Dyadic, step: &Dyadic, iv: &DyInterval) -> (BigInt, BigInt) {
    let lo_off = iv.lo() - start;
    let hi_off = iv.hi() - start;
    let lo = if iv.lo_closed() {
        dy_ceil_ratio(&lo_off, step)
    } else {
        dy_floor_ratio(&lo_off, step).0 + 1u32
    };
    let hi = if iv.hi_closed() {
        dy_floor_ratio(&hi_off, step).0
    } else {
        dy_ceil_ratio(&hi_off, step) - 1u32
    };
    (lo, hi)
}

/// Index range `[lo, hi]` within `[0, count)` of progression points in `iv`;
/// empty when `lo > hi`.
pub fn ap_index_range(ap: &Ap, iv: &DyInterval) -> (BigInt, BigInt) {
    let (lo, hi) = index_bounds(&ap.start, &ap.step, iv);
    (lo.max(BigInt::zero()), hi.min(&ap.count - 1u32))
}

/// `#{k in [0, count) : start + k*step in iv}` in constant big-integer work.
pub fn count_ap_in_interval(start: &Dyadic, step: &Dyadic, count: &BigInt, iv: &DyInterval) -> BigInt {
    assert!(step.is_positive(), "progression step must be positive");
    let ap = Ap {
        start: start.clone(),
        step: step.clone(),
        count: count.clone(),
    };
    let (lo, hi) = ap_index_range(&ap, iv);
    if lo > hi {
        BigInt::zero()
    } else {
        hi - lo + 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        let step = d("15*2^-12");
        let iv = DyInterval::closed(d("15.25"), d("15.3125"));
        assert_eq!(count_ap_in_interval(&d("15"), &step, &BigInt::from(161), &iv), BigInt::from(17));
        let oracle = (0..161)
            .filter(|k| iv.contains(&(d("15") + &step * &Dyadic::from_int(*k))))
            .collect::<Vec<_>>();
        assert_eq!((oracle[0], oracle[oracle.len() - 1], oracle.len()), (69, 85, 17));
        let left = DyInterval::closed(d("1"), d("2"));
        assert_eq!(count_ap_in_interval(&d("15"), &step, &BigInt::from(161), &left), BigInt::zero());
        let pt = DyInterval::point(d("15"));
        assert_eq!(count_ap_in_interval(&d("15"), &step, &BigInt::from(161), &pt), BigInt::one());
    }

    #[test]
    fn lattice_points_in_half_open_window() {
        let iv = DyInterval::new(d("8"), d("10"), true, false).unwrap();
        let ap = Ap::lattice_in(&d("1/16"), &iv).unwrap();
        assert_eq!(ap.start, d("8"));
        assert_eq!(ap.count, BigInt::from(32));
        assert_eq!(ap.last(), d("9.9375"));
        assert!(Ap::lattice_in(&d("4"), &DyInterval::open(d("0"), d("4"))).is_none());
    }

    proptest! {
        #[test]
        fn matches_enumeration(
            start in -200i64..200, step in 1i64..40, count in 0i64..300,
            lo in -400i64..400, len in 0i64..200, lc: bool, hc: bool, shift in -6i64..6
        ) {
            let sc = |v: i64| Dyadic::from_int(v).mul_pow2(shift);
            let (lc, hc) = if len == 0 { (true, true) } else { (lc, hc) };
            let iv = DyInterval::new(sc(lo), sc(lo + len), lc, hc).unwrap();
            let expected = (0..count).filter(|k| iv.contains(&sc(start + k * step))).count();
            prop_assert_eq!(
                count_ap_in_interval(&sc(start), &sc(step), &BigInt::from(count), &iv),
                BigInt::from(expected)
            );
        }
    }
}
