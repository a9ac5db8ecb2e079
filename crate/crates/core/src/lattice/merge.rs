use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::ap::{ap_index_range, Ap};
use super::seq::GapBlockSeq;
use crate::error::{Error, Result};
use crate::exactnum::{dy_div_exact, DyInterval, Dyadic};

/// A maximal stretch of equally spaced output points.
struct Run<'a> {
    first: Dyadic,
    step: Dyadic,
    count: BigInt,
    tag: &'a str,
}

fn finest<'a>(active: &[&'a (Ap, String)]) -> Option<&'a (Ap, String)> {
    active.iter().min_by(|a, b| a.0.step.cmp(&b.0.step)).copied()
}

fn check_nested(fine: &Ap, coarse: &Ap) -> Result<()> {
    let on_lattice = |v: &Dyadic| dy_div_exact(v, &fine.step).map(|q| q.is_integer()).unwrap_or(false);
    if on_lattice(&coarse.step) && on_lattice(&(&coarse.start - &fine.start)) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "progressions with steps {} and {} overlap off a common lattice",
            fine.step, coarse.step
        )))
    }
}

/// Union of tagged progressions as a gap-block sequence, duplicates removed.
///
/// Wherever progressions overlap, every coarser one must lie on the lattice
/// of the finest one, which holds for the nested power-of-two lattices used
/// by the constructions.
pub fn merge_lattice_aps(aps: &[(Ap, String)]) -> Result<GapBlockSeq> {
    let aps: Vec<&(Ap, String)> = aps.iter().filter(|(ap, _)| !ap.is_empty()).collect();
    let mut bounds: Vec<Dyadic> = aps
        .iter()
        .flat_map(|(ap, _)| [ap.start.clone(), ap.last()])
        .collect();
    bounds.sort();
    bounds.dedup();
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("nothing to merge".into()));
    }

    let mut runs: Vec<Run> = Vec::new();
    for (i, b) in bounds.iter().enumerate() {
        let holders: Vec<_> = aps.iter().copied().filter(|(ap, _)| ap.contains(b)).collect();
        let (_, tag) = finest(&holders).expect("every bound is a point of some progression");
        runs.push(Run {
            first: b.clone(),
            step: Dyadic::one(),
            count: BigInt::one(),
            tag,
        });
        let Some(next) = bounds.get(i + 1) else { break };
        let active: Vec<_> = aps
            .iter()
            .copied()
            .filter(|(ap, _)| ap.count > BigInt::one() && &ap.start <= b && &ap.last() >= next)
            .collect();
        let Some((fine, tag)) = finest(&active) else { continue };
        for (other, _) in &active {
            check_nested(fine, other)?;
        }
        let (k0, k1) = ap_index_range(fine, &DyInterval::open(b.clone(), next.clone()));
        if k0 <= k1 {
            runs.push(Run {
                first: fine.at(&k0),
                step: fine.step.clone(),
                count: k1 - k0 + 1u32,
                tag,
            });
        }
    }

    let mut seq = GapBlockSeq::new(runs[0].first.clone());
    let mut last = runs[0].first.clone();
    for run in &runs[1..] {
        let join = &run.first - &last;
        let inner = &run.count - 1u32;
        if run.count > BigInt::one() && join == run.step {
            seq.push_coalescing(join, run.count.clone(), run.tag)?;
        } else {
            seq.push_extending(join, BigInt::one(), run.tag)?;
            if !inner.is_zero() {
                seq.push_coalescing(run.step.clone(), inner.clone(), run.tag)?;
            }
        }
        last = &run.first + &(&run.step * &inner);
    }
    Ok(seq)
}
