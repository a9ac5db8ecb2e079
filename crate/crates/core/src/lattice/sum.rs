use num_bigint::BigInt;
use num_traits::Signed;

use super::ap::{ap_index_range, Ap};
use super::seq::GapBlockSeq;
use crate::error::Result;
use crate::exactnum::{dy_div_exact, DyInterval, Dyadic, PiecewiseLinear};

/// Exact `sum_{k<count} f(start + k*step)`, one arithmetic series per linear piece.
pub fn sum_pl_over_ap(f: &PiecewiseLinear, start: &Dyadic, step: &Dyadic, count: &BigInt) -> Result<Dyadic> {
    assert!(step.is_positive(), "progression step must be positive");
    let mut total = Dyadic::zero();
    if !count.is_positive() {
        return Ok(total);
    }
    let ap = Ap {
        start: start.clone(),
        step: step.clone(),
        count: count.clone(),
    };
    for (x0, v0, x1, v1) in f.pieces() {
        if v0.is_zero() && v1.is_zero() {
            continue;
        }
        // f vanishes at both ends of its support, so half-open pieces suffice
        let piece = DyInterval::new(x0.clone(), x1.clone(), true, false).expect("breakpoints increase");
        let (k0, k1) = ap_index_range(&ap, &piece);
        if k0 > k1 {
            continue;
        }
        let n = &k1 - &k0 + 1u32;
        // sum of (p_k - x0) over the piece
        let index_sum = &n * &k0 + (&n * (&n - 1u32)) / 2u32;
        let offsets = &(&(start - x0) * &n) + &(step * &index_sum);
        let rise = dy_div_exact(&(&(v1 - v0) * &offsets), &(x1 - x0))?;
        total += &(&(v0 * &n) + &rise);
    }
    Ok(total)
}

/// Exact `sum_n f(x + lambda_n)` over every point of `seq`.
pub fn sum_pl_over_seq(f: &PiecewiseLinear, x: &Dyadic, seq: &GapBlockSeq) -> Result<Dyadic> {
    seq.aps().iter().try_fold(Dyadic::zero(), |acc, ap| {
        Ok(acc + sum_pl_over_ap(f, &(x + &ap.start), &ap.step, &ap.count)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::pl_eval;
    use proptest::prelude::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn ramp_fixture() {
        let f = PiecewiseLinear::trapezoid(d("9.75"), d("10"), d("11"), d("11.25"), d("1/16")).unwrap();
        let got = sum_pl_over_ap(&f, &d("9.8125"), &d("2^-4"), &BigInt::from(3)).unwrap();
        assert_eq!(got, d("6*2^-6"));
        let oracle: Dyadic = (0..3)
            .map(|k| pl_eval(&f, &(d("9.8125") + d("2^-4") * Dyadic::from_int(k))).unwrap())
            .sum();
        assert_eq!(got, oracle);
        assert_eq!(sum_pl_over_ap(&f, &d("0"), &d("1"), &BigInt::from(9)).unwrap(), Dyadic::zero());
        assert_eq!(
            sum_pl_over_ap(&f, &d("10.5"), &d("1"), &BigInt::from(1)).unwrap(),
            pl_eval(&f, &d("10.5")).unwrap()
        );
    }

    proptest! {
        #[test]
        fn matches_term_by_term(
            xs in proptest::collection::vec(0u32..4, 2..6),
            vs in proptest::collection::vec(0i64..50, 4),
            start in -100i64..100, step in 1i64..16, count in 0i64..500
        ) {
            // power-of-two piece widths keep every interpolant dyadic
            let mut pts = Vec::new();
            let mut x = 0i64;
            for (i, dx) in xs.iter().enumerate() {
                let v = if i == 0 { 0 } else { vs[i % vs.len()] };
                pts.push((Dyadic::from_int(x).mul_pow2(2), Dyadic::from_int(v)));
                x += 1i64 << dx;
            }
            pts.push((Dyadic::from_int(x).mul_pow2(2), Dyadic::zero()));
            let f = PiecewiseLinear::new(pts).unwrap();
            let (st, sp) = (Dyadic::from_int(start), Dyadic::from_int(step));
            let expected: Dyadic = (0..count)
                .map(|k| pl_eval(&f, &(&st + &(&sp * &Dyadic::from_int(k)))).unwrap())
                .sum();
            prop_assert_eq!(sum_pl_over_ap(&f, &st, &sp, &BigInt::from(count)).unwrap(), expected);
        }
    }
}
