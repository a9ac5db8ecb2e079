//! A decreasing-gap set whose divergence set contains `[0,1]` and whose
//! convergence set contains `[4,5]`.
//!
//! Decade `j` consists of `Λ1_j = 2^-2^j Z ∩ [10j-10, 10j-2)` followed by
//! `Λ2_j = 2^-2^(j+1) Z ∩ [10j-2, 10j)`. The function `f` is a trapezoid per
//! decade: zero at `10j - 1/4` and `10j + 5/4`, equal to `2^-2^(j+1)` on
//! `[10j, 10j+1]`, and zero between decades.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactnum::{DyInterval, Dyadic, PiecewiseLinear};
use crate::exec::Exec;
use crate::lattice::{merge_lattice_aps, sum_pl_over_ap, sum_pl_over_seq, Ap, GapBlockSeq};
use crate::params;
use crate::report::{Relation, WitnessReport};
use crate::sampling::{rng, sample_many};

fn step_exp(j: u32) -> i64 {
    1i64 << j
}

/// `Λ1_j`.
pub fn lambda1(j: u32) -> Ap {
    let jj = j as i64;
    let window = DyInterval::new(
        Dyadic::from_int(10 * jj - 10),
        Dyadic::from_int(10 * jj - 2),
        true,
        false,
    )
    .expect("non-empty window");
    Ap::lattice_in(&Dyadic::pow2(-step_exp(j)), &window).expect("window holds lattice points")
}

/// `Λ2_j`.
pub fn lambda2(j: u32) -> Ap {
    let jj = j as i64;
    let window = DyInterval::new(Dyadic::from_int(10 * jj - 2), Dyadic::from_int(10 * jj), true, false)
        .expect("non-empty window");
    Ap::lattice_in(&Dyadic::pow2(-step_exp(j + 1)), &window).expect("window holds lattice points")
}

pub fn plateau_height(j: u32) -> Dyadic {
    Dyadic::pow2(-step_exp(j + 1))
}

pub fn trapezoid(j: u32) -> PiecewiseLinear {
    let c = Dyadic::from_int(10 * j as i64);
    let quarter = Dyadic::pow2(-2);
    PiecewiseLinear::trapezoid(
        &c - &quarter,
        c.clone(),
        &c + &Dyadic::one(),
        &c + &Dyadic::from_int(1) + quarter,
        plateau_height(j),
    )
    .expect("trapezoid breakpoints increase")
}

/// `f` restricted to the first `tents` decades.
pub fn f_upto(tents: u32) -> PiecewiseLinear {
    PiecewiseLinear::concat((1..=tents).map(trapezoid)).expect("decade supports are disjoint")
}

/// The first `jmax` decades of the set, and `f` over the same decades.
pub fn build_thm33(jmax: u32) -> Result<(GapBlockSeq, PiecewiseLinear)> {
    if jmax == 0 {
        return Err(Error::InvalidArgument("jmax must be >= 1".into()));
    }
    let aps: Vec<(Ap, String)> = (1..=jmax)
        .flat_map(|j| [(lambda1(j), format!("L1 j={j}")), (lambda2(j), format!("L2 j={j}"))])
        .collect();
    let mut seq = merge_lattice_aps(&aps)?;
    seq.set_monotone(true);
    Ok((seq, f_upto(jmax)))
}

fn unit_interval() -> DyInterval {
    DyInterval::closed(Dyadic::zero(), Dyadic::one())
}

fn convergent_interval() -> DyInterval {
    DyInterval::closed(Dyadic::from_int(4), Dyadic::from_int(5))
}

fn require(x: &Dyadic, domain: &DyInterval) -> Result<()> {
    if domain.contains(x) {
        Ok(())
    } else {
        Err(Error::OutOfInterval {
            point: x.to_string(),
            domain: domain.to_string(),
        })
    }
}

/// `sum_{λ < 10 jmax} f(x + λ)` for `x` in `[0,1]`.
pub fn divergence_partial(x: &Dyadic, jmax: u32) -> Result<Dyadic> {
    require(x, &unit_interval())?;
    let (seq, f) = build_thm33(jmax)?;
    sum_pl_over_seq(&f, x, &seq)
}

/// Contribution of decade `j` (both blocks) at `x` under `f`.
pub fn decade_sum(f: &PiecewiseLinear, x: &Dyadic, j: u32) -> Result<Dyadic> {
    let mut s = Dyadic::zero();
    for ap in [lambda1(j), lambda2(j)] {
        s += &sum_pl_over_ap(f, &(x + &ap.start), &ap.step, &ap.count)?;
    }
    Ok(s)
}

/// `2 * 2^2^j * 2^-2^(j+1) = 2^(1 - 2^j)`.
pub fn convergence_bound(j: u32) -> Dyadic {
    Dyadic::pow2(1 - step_exp(j))
}

/// Majorant of `sum_{j > jmax} 2^(1 - 2^j)`, namely `2^(2 - 2^(jmax+1))`.
pub fn convergence_tail(jmax: u32) -> Dyadic {
    Dyadic::pow2(2 - step_exp(jmax + 1))
}

/// Per-decade bound at `x` in `[4,5]` for every `j <= jmax`, plus the total.
pub fn convergence_tail_check(x: &Dyadic, jmax: u32) -> Result<Vec<WitnessReport>> {
    require(x, &convergent_interval())?;
    let f = f_upto(jmax);
    let mut reports = Vec::new();
    let mut total = Dyadic::zero();
    let mut bound_total = Dyadic::zero();
    for j in 1..=jmax {
        let s = decade_sum(&f, x, j)?;
        let b = convergence_bound(j);
        reports.push(WitnessReport::compare(
            "converge: decade sum <= 2*2^2^j*2^-2^(j+1)",
            params! {"j" => j, "x" => x},
            &s,
            Relation::Le,
            &b,
        ));
        total += &s;
        bound_total += &b;
    }
    let tail = convergence_tail(jmax);
    reports.push(
        WitnessReport::compare(
            "converge: partial sum <= sum of decade bounds",
            params! {"jmax" => jmax, "x" => x},
            &total,
            Relation::Le,
            &bound_total,
        )
        .with_note(format!("tail majorant for j > jmax: {tail}")),
    );
    Ok(reports)
}

/// Bound on decade `j` at any `y >= 4`: its points meet only trapezoids of
/// index `>= j` from `Λ1_j` and `>= j+1` from `Λ2_j`.
pub fn probe_bound(j: u32) -> Dyadic {
    &convergence_bound(j) + &Dyadic::pow2(1 - step_exp(j + 1))
}

/// Seeded points `y` in `[xC, 10 jmax]`; each decade contribution is
/// compared with [`probe_bound`] and the total with their sum.
pub fn thm34_probe(x_c: &Dyadic, jmax: u32, samples: usize, seed: u64, exec: Exec) -> Result<Vec<WitnessReport>> {
    let claim = "probe: partial sum right of xC <= sum of decade bounds";
    if samples == 0 {
        return Ok(vec![WitnessReport::with_values(
            claim,
            params! {"xC" => x_c, "jmax" => jmax, "samples" => 0},
            "0".into(),
            Relation::Le,
            "0".into(),
            true,
        )
        .with_note("vacuous")]);
    }
    if x_c < &Dyadic::from_int(4) {
        return Err(Error::OutOfInterval {
            point: x_c.to_string(),
            domain: "[4, +inf)".into(),
        });
    }
    let hi = Dyadic::from_int(10 * jmax as i64);
    if x_c >= &hi {
        return Err(Error::InvalidArgument(format!("xC must lie below 10*jmax = {hi}")));
    }
    let window = DyInterval::closed(x_c.clone(), hi);
    let mut r = rng(seed);
    let ys = sample_many(&mut r, &window, samples);
    let f = f_upto(2 * jmax + 1);
    let rows = exec.try_map(&ys, |y| -> Result<WitnessReport> {
        let mut total = Dyadic::zero();
        let mut bound = Dyadic::zero();
        let mut worst: Option<(u32, Dyadic)> = None;
        for j in 1..=jmax {
            let s = decade_sum(&f, y, j)?;
            if s > probe_bound(j) {
                worst.get_or_insert((j, s.clone()));
            }
            total += &s;
            bound += &probe_bound(j);
        }
        let rep = WitnessReport::compare(claim, params! {"y" => y, "jmax" => jmax}, &total, Relation::Le, &bound);
        Ok(match worst {
            Some((j, s)) => WitnessReport::with_values(claim, rep.params.clone(), rep.lhs, Relation::Le, rep.rhs, false)
                .with_note(format!("decade {j} contributes {s} above its bound {}", probe_bound(j))),
            None => rep,
        })
    })?;
    Ok(rows)
}

/// Smallest decade increment on `[0,1]`, attained by decade 1 at `x = 0`.
pub fn divergence_floor() -> Dyadic {
    Dyadic::ratio_pow2(3, 5)
}

/// `divergence_partial(x, jmax) - divergence_partial(x, jmax - 1)`: decade
/// `jmax` meets the plateau of trapezoid `jmax - 1` through `Λ1_jmax` and
/// the left ramp of trapezoid `jmax` through `Λ2_jmax`.
pub fn divergence_increment(x: &Dyadic, jmax: u32) -> Result<Dyadic> {
    require(x, &unit_interval())?;
    let f = f_upto(jmax);
    decade_sum(&f, x, jmax)
}

/// Count of `Λ2_j` points whose translate by `x` lies in the plateau.
pub fn plateau_hits(x: &Dyadic, j: u32) -> BigInt {
    let ap = lambda2(j);
    let c = Dyadic::from_int(10 * j as i64);
    let plateau = DyInterval::closed(&c - x, &(&c + &Dyadic::one()) - x);
    crate::lattice::count_ap_in_interval(&ap.start, &ap.step, &ap.count, &plateau)
}
