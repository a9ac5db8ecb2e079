use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use dyadlab::dense_divergence::{self as dd, Thm31};
use dyadlab::exactnum::{dy_ceil_ratio, dy_floor_ratio, Dyadic, DyInterval};
use dyadlab::interior_gap as ig;
use dyadlab::lattice::seq_check_monotone_gaps;

fn rational(d: &Dyadic) -> BigRational {
    let m = BigRational::from_integer(d.mantissa().clone());
    let two = BigRational::from_integer(BigInt::from(2));
    let e = d.exponent();
    if e >= 0 {
        m * num_traits::pow(two, e as usize)
    } else {
        m / num_traits::pow(two, (-e) as usize)
    }
}

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (-(1i64 << 40)..(1i64 << 40), -60i64..60).prop_map(|(m, e)| Dyadic::new(BigInt::from(m), e))
}

fn unit_point() -> impl Strategy<Value = Dyadic> {
    (0i64..=(1 << 20)).prop_map(|m| Dyadic::ratio_pow2(m, 20))
}

proptest! {
    #[test]
    fn arithmetic_matches_rationals(a in dyadic(), b in dyadic()) {
        prop_assert_eq!(rational(&(&a + &b)), rational(&a) + rational(&b));
        prop_assert_eq!(rational(&(&a - &b)), rational(&a) - rational(&b));
        prop_assert_eq!(rational(&(&a * &b)), rational(&a) * rational(&b));
        prop_assert_eq!(a.cmp(&b), rational(&a).cmp(&rational(&b)));
    }

    #[test]
    fn floor_ratio_matches_rationals(a in dyadic(), b in dyadic()) {
        prop_assume!(b.is_positive());
        let q = rational(&a) / rational(&b);
        let (fl, rem) = dy_floor_ratio(&a, &b);
        prop_assert_eq!(BigRational::from_integer(fl.clone()), q.floor());
        prop_assert_eq!(rational(&rem), rational(&a) - rational(&b) * BigRational::from_integer(fl));
        prop_assert_eq!(BigRational::from_integer(dy_ceil_ratio(&a, &b)), q.ceil());
    }

    #[test]
    fn text_round_trip(a in dyadic()) {
        prop_assert_eq!(a.to_string().parse::<Dyadic>().unwrap(), a.clone());
        if let Some(dec) = a.to_decimal() {
            prop_assert_eq!(dec.parse::<Dyadic>().unwrap(), a);
        }
    }

    #[test]
    fn divergence_grows_by_the_floor(x in unit_point()) {
        let mut prev = Dyadic::zero();
        for j in 1..=4 {
            let s = ig::divergence_partial(&x, j).unwrap();
            prop_assert!(&s - &prev >= ig::divergence_floor());
            prev = s;
        }
    }

    #[test]
    fn convergence_bounds_hold(m in 0i64..=(1 << 20)) {
        let x = &Dyadic::from_int(4) + &Dyadic::ratio_pow2(m, 20);
        for r in ig::convergence_tail_check(&x, 6).unwrap() {
            prop_assert!(r.passed(), "{:?}", r);
        }
    }

    #[test]
    fn thm31_lower_and_outside(j in 1u32..=12, t in 0i64..=(1 << 16)) {
        let c = Thm31::new(j);
        let e = c.interval(j);
        let x = e.interval.lo() + &(&e.interval.length() * &Dyadic::ratio_pow2(t, 16));
        prop_assert!(dd::lower_bound_check(e, &x).unwrap().passed());
        let outside = dd::outside_domain(e);
        for part in outside.parts() {
            let y = part.lo() + &(&part.length() * &Dyadic::ratio_pow2(t, 16));
            if part.contains(&y) {
                prop_assert!(dd::outside_zero_check(e, &y).unwrap().passed());
            }
        }
    }
}

#[test]
fn thm33_gaps_monotone_through_six_decades() {
    for jmax in 1..=6 {
        let (seq, f) = ig::build_thm33(jmax).unwrap();
        assert!(seq_check_monotone_gaps(&seq).passed(), "jmax={jmax}");
        let heights: Vec<Dyadic> = (1..=jmax).map(ig::plateau_height).collect();
        assert!(heights.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(f.max_value(), ig::plateau_height(1));
    }
}

#[test]
fn thm31_density_window_gaps() {
    let seq = Thm31::new(14).merged(true).unwrap();
    for j in 10..=14 {
        assert!(dd::density_check(&seq, j).passed(), "j={j}");
    }
    assert!(dd::gap_increase_check(&seq).passed());
}

#[test]
fn enumeration_covers_small_dyadic_intervals() {
    let e = dd::enum_intervals(1000);
    for (level, lo, hi) in [(0u32, -3i64, 3i64), (1, -2, 2), (2, -1, 1)] {
        for k in (lo << level) + 1..=(hi << level) {
            let unit = Dyadic::pow2(-(level as i64));
            let iv = DyInterval::closed(&unit * &Dyadic::from_int(k - 1), &unit * &Dyadic::from_int(k));
            assert!(e.iter().any(|x| x.interval == iv), "{iv} missing");
        }
    }
    assert!(e.iter().all(|x| &x.interval.length() * &Dyadic::from_int(x.j as i64) >= Dyadic::one()));
}
