//! Euclidean-style floor sums over big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// `sum_{i=0}^{n-1} floor((a*i + b) / m)` for `n >= 0`, `m > 0`, any `a`, `b`.
///
/// Runs in `O(log max(a, m))` big-integer steps.
pub fn floor_sum(n: &BigInt, m: &BigInt, a: &BigInt, b: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "floor_sum: n must be non-negative");
    assert!(m.is_positive(), "floor_sum: m must be positive");
    if n.is_zero() {
        return BigInt::zero();
    }
    let mut ans = BigInt::zero();
    let pairs = n * (n - 1u32) / 2u32;
    let (qa, mut a) = a.div_mod_floor(m);
    let (qb, mut b) = b.div_mod_floor(m);
    ans += &pairs * qa;
    ans += n * qb;
    let mut n = n.clone();
    let mut m = m.clone();
    // now 0 <= a, b < m
    loop {
        if a >= m {
            let (q, r) = a.div_rem(&m);
            ans += &n * (&n - 1u32) / 2u32 * q;
            a = r;
        }
        if b >= m {
            let (q, r) = b.div_rem(&m);
            ans += &n * q;
            b = r;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            break;
        }
        let (q, r) = y_max.div_rem(&m);
        n = q;
        b = r;
        std::mem::swap(&mut m, &mut a);
    }
    ans
}

/// `#{i in [0, n) : (y0 + i*step) mod period in [lo, hi]}` for integer window
/// `0 <= lo <= hi < period`.
pub fn count_residues_in_window(
    n: &BigInt,
    y0: &BigInt,
    step: &BigInt,
    period: &BigInt,
    lo: &BigInt,
    hi: &BigInt,
) -> BigInt {
    if n.is_zero() || lo > hi {
        return BigInt::zero();
    }
    // [lo <= r <= hi] = floor((y - lo)/P) - floor((y - hi - 1)/P)
    floor_sum(n, period, step, &(y0 - lo)) - floor_sum(n, period, step, &(y0 - hi - 1u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(n: i64, m: i64, a: i64, b: i64) -> i64 {
        (0..n).map(|i| (a * i + b).div_euclid(m)).sum()
    }

    #[test]
    fn small_cases() {
        let b = |v: i64| BigInt::from(v);
        assert_eq!(floor_sum(&b(4), &b(10), &b(6), &b(3)), b(naive(4, 10, 6, 3)));
        assert_eq!(floor_sum(&b(0), &b(3), &b(1), &b(1)), b(0));
        assert_eq!(floor_sum(&b(7), &b(3), &b(-5), &b(-2)), b(naive(7, 3, -5, -2)));
        // residues of 3k mod 8 for k < 8 hitting [0, 2]
        assert_eq!(
            count_residues_in_window(&b(8), &b(0), &b(3), &b(8), &b(0), &b(2)),
            b(3)
        );
    }

    proptest! {
        #[test]
        fn matches_naive(n in 0i64..200, m in 1i64..500, a in -1000i64..1000, b in -1000i64..1000) {
            let big = |v: i64| BigInt::from(v);
            prop_assert_eq!(floor_sum(&big(n), &big(m), &big(a), &big(b)), big(naive(n, m, a, b)));
        }

        #[test]
        fn residue_window_matches_naive(
            n in 0i64..300, y0 in 0i64..1000, s in 1i64..200, p in 1i64..200, w1 in 0i64..200, w2 in 0i64..200
        ) {
            let (lo, hi) = (w1.min(w2) % p, w1.max(w2) % p);
            let (lo, hi) = (lo.min(hi), lo.max(hi));
            let expected = (0..n).filter(|i| {
                let r = (y0 + i * s).rem_euclid(p);
                lo <= r && r <= hi
            }).count() as i64;
            let big = |v: i64| BigInt::from(v);
            prop_assert_eq!(
                count_residues_in_window(&big(n), &big(y0), &big(s), &big(p), &big(lo), &big(hi)),
                big(expected)
            );
        }
    }
}
