//! Verification suites: each runs one family of checks over a construction
//! and returns the (unsorted) witness reports.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;

use crate::dense_divergence::{self as dd, Thm31};
use crate::error::{Error, Result};
use crate::exactnum::{DyInterval, Dyadic, IntervalUnion};
use crate::exec::Exec;
use crate::interior_gap as ig;
use crate::lattice::{seq_check_monotone_gaps, GapBlockSeq};
use crate::params;
use crate::report::{Relation, WitnessReport};
use crate::sampling::{derive_seed, rng, sample_in, sample_many, SAMPLE_BITS};
use crate::universal::{self as uv, IndexJK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub samples: usize,
    pub seed: u64,
    pub exec: Exec,
    /// Enumeration budget for brute-force checks.
    pub budget: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            samples: 10,
            seed: 0,
            exec: Exec::default(),
            budget: uv::ESCAPE_BUDGET,
        }
    }
}

macro_rules! suite_enum {
    ($name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum $name {
            $($variant),*
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),*
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.name() == s)
                    .ok_or_else(|| {
                        let names: Vec<&str> = $name::ALL.iter().map(|v| v.name()).collect();
                        Error::Parse(format!("unknown suite {s:?}, expected one of {}", names.join("|")))
                    })
            }
        }
    };
}

suite_enum!(UniversalSuite {
    Lemma => "lemma",
    Gaps => "gaps",
    Integrality => "integrality",
    Covering => "covering",
    Escape => "escape",
    Series => "series",
    Smooth => "smooth",
});

suite_enum!(Thm31Suite {
    Enum => "enum",
    Lower => "lower",
    Outside => "outside",
    Cross => "cross",
    Lambda2 => "lambda2",
    Density => "density",
    Tail => "tail",
});

suite_enum!(Thm33Suite {
    Gaps => "gaps",
    Diverge => "diverge",
    Converge => "converge",
    Probe => "probe",
});

/// Compares a sequence block by block with the canonical one.
pub fn matches_construction(seq: &GapBlockSeq, canonical: &GapBlockSeq) -> WitnessReport {
    let claim = "gaps: blocks match the construction";
    let differ = if seq.origin() != canonical.origin() {
        Some(format!("origin {} != {}", seq.origin(), canonical.origin()))
    } else {
        let n = seq.blocks().len().max(canonical.blocks().len());
        (0..n).find_map(|b| match (seq.blocks().get(b), canonical.blocks().get(b)) {
            (Some(x), Some(y)) if x.gap == y.gap && x.count == y.count => None,
            (x, y) => Some(format!(
                "block {b}: {} != {}",
                x.map_or("none".into(), |x| format!("{}x{}", x.count, x.gap)),
                y.map_or("none".into(), |y| format!("{}x{}", y.count, y.gap))
            )),
        })
    };
    let blocks = params! {"blocks" => canonical.blocks().len()};
    match differ {
        None => WitnessReport::compare_display(
            claim,
            blocks,
            &seq.blocks().len(),
            Relation::Eq,
            &canonical.blocks().len(),
        ),
        Some(d) => WitnessReport::failed(claim, blocks, d),
    }
}

/// The smallest universal prefix whose last point is at least `reach`.
pub fn universal_prefix_reaching(reach: &Dyadic, from: IndexJK) -> Result<GapBlockSeq> {
    let mut i = from;
    loop {
        let c = uv::step_constants(i);
        if &(&c.a - &c.bi) >= reach {
            return uv::build_universal(i);
        }
        i = i.succ();
    }
}

/// Runs a universal suite over the steps up to and including `limit`; `seq`
/// must contain those steps, as `build_universal(limit.succ())` does.
pub fn run_universal(
    suite: UniversalSuite,
    seq: &GapBlockSeq,
    limit: IndexJK,
    g: &IntervalUnion,
    opts: &SuiteOptions,
) -> Result<Vec<WitnessReport>> {
    let indices = IndexJK::upto(limit);
    let exec = opts.exec;
    Ok(match suite {
        UniversalSuite::Lemma => exec.map(&indices, |&i| uv::check_lemma_useful(i)),
        UniversalSuite::Gaps => vec![
            seq_check_monotone_gaps(seq),
            matches_construction(seq, &uv::build_universal(limit.succ())?),
        ],
        UniversalSuite::Integrality => exec
            .try_map(&indices, |&i| -> Result<Vec<WitnessReport>> {
                let mut r = uv::check_integrality(seq, i);
                r.extend(uv::check_step_bounds(seq, i)?);
                Ok(r)
            })?
            .into_iter()
            .flatten()
            .collect(),
        UniversalSuite::Covering => uv::covering_sweep(&indices, seq, opts.samples, opts.seed, exec),
        UniversalSuite::Escape => {
            let mut out = exec.map(&indices, |&i| match uv::escape_measure_bruteforce(i, seq, opts.budget) {
                Ok((_, r)) => r,
                Err(e @ Error::BudgetExceeded { .. }) => WitnessReport::skipped(
                    "escape: measure <= 4jE + (2E - 2^-j E - 2E^2) + E",
                    params! {"j" => i.j, "k" => i.k},
                    e.to_string(),
                ),
                Err(e) => WitnessReport::failed(
                    "escape: measure <= 4jE + (2E - 2^-j E - 2E^2) + E",
                    params! {"j" => i.j, "k" => i.k},
                    e.to_string(),
                ),
            });
            for j in 1..=limit.j {
                out.push(uv::check_borel_cantelli_ratio(j));
                let bc = uv::borel_cantelli_partial(j);
                out.push(
                    WitnessReport::with_values(
                        "borel-cantelli: partial sum and tail majorant",
                        params! {"jmax" => j},
                        bc.partial.to_string(),
                        Relation::Le,
                        (&bc.partial + &bc.tail).to_string(),
                        true,
                    )
                    .informational()
                    .with_note(format!("term {} tail {}", uv::borel_cantelli_term(j), bc.tail)),
                );
            }
            out
        }
        UniversalSuite::Series => {
            let ug = uv::build_ug(g, limit);
            let ug_ref = &ug;
            exec.map(&ug, |(i, _)| {
                let mut r = rng(derive_seed(opts.seed, &[i.j as u64, i.k]));
                let xs = sample_many(&mut r, &uv::target_interval(*i), opts.samples);
                xs.iter()
                    .map(|x| {
                        let hits = ug_ref
                            .iter()
                            .filter(|(i2, _)| uv::target_interval(*i2).contains(x))
                            .count();
                        WitnessReport::compare_display(
                            "series: partial sum of f_G >= #{(j,k) in U_G : x in I}",
                            params! {"j" => i.j, "k" => i.k, "x" => x},
                            &uv::fg_partial_sum(x, ug_ref, seq),
                            Relation::Ge,
                            &BigInt::from(hits),
                        )
                    })
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect()
        }
        UniversalSuite::Smooth => {
            let ug = uv::build_ug(g, limit);
            if ug.is_empty() {
                return Ok(vec![WitnessReport::skipped(
                    "smoothing: added measure in [N-1,N] < 2^-N / 2^ceil(log2 L_N)",
                    params! {"limit" => limit},
                    "no I_{j,k} inside G",
                )]);
            }
            let top = ug
                .iter()
                .map(|(_, ps)| ps.hull().hi().clone())
                .max()
                .expect("non-empty");
            let reach = Dyadic::from(top.ceil() + 1u32) * Dyadic::from_int(10);
            let prefix = universal_prefix_reaching(&reach, limit.succ())?;
            match uv::smooth_indicator(&ug, &prefix, opts.budget.min(uv::SMOOTH_BUDGET)) {
                Ok((_, delta, mut reports)) => {
                    reports.push(
                        WitnessReport::with_values(
                            "smoothing: ramp width",
                            params! {"components" => ug.len()},
                            delta.to_string(),
                            Relation::Eq,
                            delta.to_string(),
                            true,
                        )
                        .informational(),
                    );
                    reports
                }
                Err(e @ Error::BudgetExceeded { .. }) => vec![WitnessReport::skipped(
                    "smoothing: added measure in [N-1,N] < 2^-N / 2^ceil(log2 L_N)",
                    params! {"limit" => limit},
                    e.to_string(),
                )],
                Err(e) => return Err(e),
            }
        }
    })
}

fn sample_union<R: Rng>(r: &mut R, u: &IntervalUnion, n: usize) -> Vec<Dyadic> {
    (0..n)
        .map(|_| {
            let part = &u.parts()[r.gen_range(0..u.len())];
            sample_in(r, part, SAMPLE_BITS)
        })
        .collect()
}

/// Runs a dense-divergence suite over `j <= c.jmax`.
pub fn run_thm31(suite: Thm31Suite, c: &Thm31, g: &IntervalUnion, opts: &SuiteOptions) -> Result<Vec<WitnessReport>> {
    let exec = opts.exec;
    let js: Vec<u32> = (1..=c.jmax).collect();
    let seeded = |tag: u64, j: u32| rng(derive_seed(opts.seed, &[tag, j as u64]));
    let flat = |v: Vec<Vec<WitnessReport>>| v.into_iter().flatten().collect::<Vec<_>>();
    Ok(match suite {
        Thm31Suite::Enum => {
            let count = (c.jmax as usize).max(1000);
            let all = dd::enum_intervals(count);
            let mut out: Vec<WitnessReport> = all.iter().map(dd::check_emission).filter(|r| !r.passed()).collect();
            out.push(WitnessReport::compare_display(
                "enumeration: emissions satisfying both constraints",
                params! {"count" => count},
                &(count - out.len()),
                Relation::Eq,
                &count,
            ));
            let target = DyInterval::closed(Dyadic::zero(), Dyadic::pow2(-1));
            let at = all.iter().find(|e| e.interval == target).map(|e| e.j);
            out.push(match at {
                Some(j) => WitnessReport::compare_display(
                    "enumeration: [0,1/2] is emitted",
                    params! {"count" => count},
                    &j,
                    Relation::Le,
                    &(count as u32),
                ),
                None => WitnessReport::failed("enumeration: [0,1/2] is emitted", params! {"count" => count}, "absent"),
            });
            out
        }
        Thm31Suite::Lower => flat(exec.try_map(&js, |&j| {
            let e = c.interval(j);
            let mut xs = vec![e.interval.lo().clone(), e.interval.hi().clone()];
            xs.extend(sample_many(&mut seeded(1, j), &e.interval, opts.samples));
            xs.iter().map(|x| dd::lower_bound_check(e, x)).collect::<Result<Vec<_>>>()
        })?),
        Thm31Suite::Outside => flat(exec.try_map(&js, |&j| {
            let e = c.interval(j);
            let dom = dd::outside_domain(e);
            let xs = sample_union(&mut seeded(2, j), &dom, opts.samples);
            xs.iter().map(|x| dd::outside_zero_check(e, x)).collect::<Result<Vec<_>>>()
        })?),
        Thm31Suite::Cross => {
            let wider = Thm31::new(c.jmax + 1);
            let wider = &wider;
            flat(exec.try_map(&js, |&j0| {
                let span = Dyadic::from_int(j0 as i64);
                let mut xs = vec![Dyadic::zero()];
                xs.extend(sample_many(&mut seeded(3, j0), &DyInterval::closed(-&span, span), opts.samples));
                let mut out = Vec::new();
                for j in [j0.saturating_sub(1), j0 + 1] {
                    if j == 0 {
                        continue;
                    }
                    for x in &xs {
                        out.push(dd::cross_term_zero_check(j0, wider.interval(j), x)?);
                    }
                }
                Ok(out)
            })?)
        }
        Thm31Suite::Lambda2 => flat(exec.map(&js, |&j| {
            let span = Dyadic::from_int(j as i64);
            let mut xs = vec![Dyadic::zero()];
            xs.extend(sample_many(&mut seeded(4, j), &DyInterval::closed(-&span, span), opts.samples));
            xs.iter().map(|x| dd::lambda2_hit_report(j, x)).collect()
        })),
        Thm31Suite::Density => {
            let top = c.jmax.max(dd::LAMBDA2_FROM);
            let seq = Thm31::new(top).merged(true)?;
            let mut out: Vec<WitnessReport> = (dd::LAMBDA2_FROM..=top).map(|j| dd::density_check(&seq, j)).collect();
            out.push(dd::gap_increase_check(&seq));
            out
        }
        Thm31Suite::Tail => {
            let span = Dyadic::from_int(c.jmax as i64);
            let mut xs = vec![Dyadic::zero()];
            xs.extend(sample_many(&mut seeded(5, 0), &DyInterval::closed(-&span, span), opts.samples));
            flat(exec.try_map(&xs, |x| dd::lambda2_tail_check(x, g, c))?)
        }
    })
}

/// Runs an interior-gap suite over the first `jmax` decades.
pub fn run_thm33(suite: Thm33Suite, seq: &GapBlockSeq, jmax: u32, opts: &SuiteOptions) -> Result<Vec<WitnessReport>> {
    let exec = opts.exec;
    Ok(match suite {
        Thm33Suite::Gaps => vec![
            seq_check_monotone_gaps(seq),
            matches_construction(seq, &ig::build_thm33(jmax)?.0),
        ],
        Thm33Suite::Diverge => {
            let unit = DyInterval::closed(Dyadic::zero(), Dyadic::one());
            let mut xs: Vec<Dyadic> = ["0", "1/2", "1"].iter().map(|s| s.parse().expect("literal")).collect();
            xs.extend(sample_many(&mut rng(derive_seed(opts.seed, &[6])), &unit, opts.samples));
            let rows = exec.try_map(&xs, |x| -> Result<Vec<WitnessReport>> {
                let mut out = Vec::new();
                for j in 1..=jmax {
                    let inc = ig::divergence_increment(x, j)?;
                    out.push(WitnessReport::compare(
                        "diverge: decade increment >= floor",
                        params! {"j" => j, "x" => x},
                        &inc,
                        Relation::Ge,
                        &ig::divergence_floor(),
                    ));
                }
                out.push(
                    WitnessReport::compare(
                        "diverge: partial sum >= jmax * floor",
                        params! {"jmax" => jmax, "x" => x},
                        &ig::divergence_partial(x, jmax)?,
                        Relation::Ge,
                        &(&ig::divergence_floor() * &Dyadic::from_int(jmax as i64)),
                    ),
                );
                Ok(out)
            })?;
            rows.into_iter().flatten().collect()
        }
        Thm33Suite::Converge => {
            let iv = DyInterval::closed(Dyadic::from_int(4), Dyadic::from_int(5));
            let mut xs = vec![Dyadic::from_int(4), Dyadic::from_int(5)];
            xs.extend(sample_many(&mut rng(derive_seed(opts.seed, &[7])), &iv, opts.samples));
            exec.try_map(&xs, |x| ig::convergence_tail_check(x, jmax))?
                .into_iter()
                .flatten()
                .collect()
        }
        Thm33Suite::Probe => {
            let x_c = Dyadic::ratio_pow2(9, 1);
            ig::thm34_probe(&x_c, jmax.max(1), opts.samples, derive_seed(opts.seed, &[8]), exec)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SuiteOptions {
        SuiteOptions {
            samples: 3,
            seed: 11,
            exec: Exec::Sequential,
            budget: uv::ESCAPE_BUDGET,
        }
    }

    #[test]
    fn names_round_trip() {
        for s in UniversalSuite::ALL {
            assert_eq!(s.name().parse::<UniversalSuite>().unwrap(), *s);
        }
        assert!("nope".parse::<Thm33Suite>().is_err());
    }

    #[test]
    fn universal_suites_pass_on_first_row() {
        let limit = IndexJK::new(1, 1).unwrap();
        let seq = uv::build_universal(limit.succ()).unwrap();
        let g: IntervalUnion = serde_json::from_str(r#"["(1/4,5/4)"]"#).unwrap();
        for &s in UniversalSuite::ALL {
            let r = run_universal(s, &seq, limit, &g, &opts()).unwrap();
            assert!(!r.is_empty(), "{s}");
            assert!(r.iter().all(|r| !r.failed_claim()), "{s}: {r:?}");
        }
    }

    #[test]
    fn thm31_and_thm33_suites_pass() {
        let c = Thm31::new(4);
        let g: IntervalUnion = serde_json::from_str(r#"["(-4,4)"]"#).unwrap();
        for &s in Thm31Suite::ALL {
            let r = run_thm31(s, &c, &g, &opts()).unwrap();
            assert!(r.iter().all(|r| !r.failed_claim()), "{s}");
        }
        let (seq, _) = ig::build_thm33(3).unwrap();
        for &s in Thm33Suite::ALL {
            let r = run_thm33(s, &seq, 3, &opts()).unwrap();
            assert!(r.iter().all(|r| r.passed()), "{s}");
        }
    }

    #[test]
    fn tampered_sequence_fails_gaps() {
        let (seq, _) = ig::build_thm33(2).unwrap();
        let mut json: serde_json::Value = serde_json::to_value(&seq).unwrap();
        json["blocks"][1]["gap"] = serde_json::Value::String("1*2^0".into());
        let bad: GapBlockSeq = serde_json::from_value(json).unwrap();
        let r = run_thm33(Thm33Suite::Gaps, &bad, 2, &opts()).unwrap();
        assert!(r.iter().all(|r| r.failed_claim()));
    }
}
