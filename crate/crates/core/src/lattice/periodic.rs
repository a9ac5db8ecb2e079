use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::floor_sum::count_residues_in_window;
use super::seq::{bigint_string, GapBlockSeq};
use crate::error::{Error, Result};
use crate::exactnum::{dy_ceil_ratio, DyInterval, Dyadic};

/// `count` equally spaced components `[base + i*period, base + i*period + width]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicIntervalSet {
    pub base: Dyadic,
    pub period: Dyadic,
    pub width: Dyadic,
    #[serde(with = "bigint_string")]
    pub count: BigInt,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl PeriodicIntervalSet {
    /// Closed components.
    pub fn new(base: Dyadic, period: Dyadic, width: Dyadic, count: BigInt) -> Result<Self> {
        Self::with_closedness(base, period, width, count, true, true)
    }

    pub fn with_closedness(
        base: Dyadic,
        period: Dyadic,
        width: Dyadic,
        count: BigInt,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        if width.is_negative() || width >= period {
            return Err(Error::InvalidArgument(format!(
                "width {width} must lie in [0, period {period})"
            )));
        }
        if width.is_zero() && !(lo_closed && hi_closed) {
            return Err(Error::InvalidArgument("degenerate components must be closed".into()));
        }
        if count < BigInt::one() {
            return Err(Error::InvalidArgument("component count must be >= 1".into()));
        }
        Ok(PeriodicIntervalSet {
            base,
            period,
            width,
            count,
            lo_closed,
            hi_closed,
        })
    }

    pub fn measure(&self) -> Dyadic {
        &self.width * &self.count
    }

    pub fn component(&self, i: &BigInt) -> DyInterval {
        let lo = &self.base + &(&self.period * i);
        let hi = &lo + &self.width;
        DyInterval::new(lo, hi, self.lo_closed, self.hi_closed).expect("validated on construction")
    }

    /// Hull `[base, base + (count-1)*period + width]`.
    pub fn hull(&self) -> DyInterval {
        let last = self.component(&(&self.count - 1u32));
        DyInterval::new(self.base.clone(), last.hi().clone(), self.lo_closed, self.hi_closed)
            .expect("validated on construction")
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        let (i, _) = crate::exactnum::dy_floor_ratio(&(x - &self.base), &self.period);
        !i.is_negative() && i < self.count && self.component(&i).contains(x)
    }
}

/// Integer mantissas of `vals` over the common smallest exponent.
fn common_scale(vals: &[&Dyadic]) -> Vec<BigInt> {
    let e = vals
        .iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.exponent())
        .min()
        .unwrap_or(0);
    vals.iter()
        .map(|v| {
            v.mul_pow2(-e)
                .to_integer()
                .expect("scaled to the smallest exponent")
        })
        .collect()
}

/// `#{k in [0, count) : start + k*step in ps}` by a floor-sum residue count.
pub fn count_ap_in_periodic(
    start: &Dyadic,
    step: &Dyadic,
    count: &BigInt,
    ps: &PeriodicIntervalSet,
) -> BigInt {
    assert!(step.is_positive(), "progression step must be positive");
    if !count.is_positive() {
        return BigInt::zero();
    }
    let ints = common_scale(&[start, step, &ps.base, &ps.period, &ps.width]);
    let [s0, s, b, p, w] = <[BigInt; 5]>::try_from(ints).expect("five values");
    // y_k = s0 + k*s - b must lie in [0, count*P)
    let top = &p * &ps.count;
    let ratio = |num: BigInt| dy_ceil_ratio(&Dyadic::from(num), &Dyadic::from(s.clone()));
    let k_lo = ratio(&b - &s0).max(BigInt::zero());
    let k_hi = ratio(&b + &top - &s0).min(count.clone());
    if k_lo >= k_hi {
        return BigInt::zero();
    }
    let lo = if ps.lo_closed { BigInt::zero() } else { BigInt::one() };
    let hi = if ps.hi_closed { w } else { w - 1u32 };
    let y0 = &s0 + &s * &k_lo - &b;
    count_residues_in_window(&(k_hi - &k_lo), &y0, &s, &p, &lo, &hi)
}

/// `#{n : x + lambda_n in ps}` over every point of `seq`.
pub fn count_seq_in_periodic(x: &Dyadic, seq: &GapBlockSeq, ps: &PeriodicIntervalSet) -> BigInt {
    seq.aps()
        .iter()
        .map(|ap| count_ap_in_periodic(&(x + &ap.start), &ap.step, &ap.count, ps))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::count_ap_in_interval;
    use proptest::prelude::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn int(v: i64) -> Dyadic {
        Dyadic::from_int(v)
    }

    #[test]
    fn examples() {
        let ps = PeriodicIntervalSet::new(int(0), int(8), int(2), BigInt::one()).unwrap();
        assert_eq!(count_ap_in_periodic(&int(0), &int(3), &BigInt::from(8), &ps), BigInt::from(1));
        // many periods so that every residue class is reachable
        let ps = PeriodicIntervalSet::new(int(0), int(8), int(2), BigInt::from(3)).unwrap();
        assert_eq!(count_ap_in_periodic(&int(0), &int(3), &BigInt::from(8), &ps), BigInt::from(3));

        let ps = PeriodicIntervalSet::new(int(5), int(4), int(3), BigInt::from(10)).unwrap();
        assert_eq!(count_ap_in_periodic(&int(5), &int(1), &BigInt::from(40), &ps), BigInt::from(40));
    }

    #[test]
    fn universal_block_against_first_u_set() {
        let ps = PeriodicIntervalSet::new(int(16), d("2^-8"), d("2^-12"), BigInt::from(16)).unwrap();
        let step = d("15*2^-12");
        let x = d("3/4");
        // lambda_n for n in [69, 160] sits in the first fine block
        let start = &x + &(d("15") + &step * &int(69));
        let count = BigInt::from(92);
        let oracle = (0..92)
            .filter(|k| ps.contains(&(&start + &(&step * &int(*k)))))
            .count();
        assert_eq!(count_ap_in_periodic(&start, &step, &count, &ps), BigInt::from(oracle));
        assert!(oracle >= 1);
    }

    #[test]
    fn open_ends() {
        let ps = PeriodicIntervalSet::with_closedness(int(0), int(4), int(2), BigInt::from(2), false, true)
            .unwrap();
        // points 0..7: components (0,2], (4,6]
        assert_eq!(count_ap_in_periodic(&int(0), &int(1), &BigInt::from(8), &ps), BigInt::from(4));
        assert!(PeriodicIntervalSet::with_closedness(int(0), int(4), int(0), BigInt::one(), false, true).is_err());
        assert!(PeriodicIntervalSet::new(int(0), int(4), int(4), BigInt::one()).is_err());
    }

    proptest! {
        #[test]
        fn matches_enumeration(
            start in -300i64..300, step in 1i64..50, count in 0i64..400,
            base in -300i64..300, period in 1i64..60, wfrac in 0i64..60, pcount in 1i64..20,
            lc: bool, hc: bool, shift in -8i64..8
        ) {
            let width = wfrac % period;
            let (lc, hc) = if width == 0 { (true, true) } else { (lc, hc) };
            let sc = |v: i64| int(v).mul_pow2(shift);
            let ps = PeriodicIntervalSet::with_closedness(
                sc(base), sc(period), sc(width), BigInt::from(pcount), lc, hc).unwrap();
            let expected = (0..count).filter(|k| ps.contains(&sc(start + k * step))).count();
            let got = count_ap_in_periodic(&sc(start), &sc(step), &BigInt::from(count), &ps);
            prop_assert_eq!(&got, &BigInt::from(expected));
            let by_parts: BigInt = (0..pcount)
                .map(|i| count_ap_in_interval(&sc(start), &sc(step), &BigInt::from(count),
                    &ps.component(&BigInt::from(i))))
                .sum();
            prop_assert_eq!(got, by_parts);
        }
    }
}
