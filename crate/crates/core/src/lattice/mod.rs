//! Implicit arithmetic-progression sets: gap-block sequences, exact lattice
//! counting, and exact sums of piecewise-linear functions over progressions.

mod ap;
mod floor_sum;
mod merge;
mod periodic;
mod seq;
mod sum;

pub use ap::{ap_index_range, count_ap_in_interval, Ap};
pub use floor_sum::{count_residues_in_window, floor_sum};
pub use merge::merge_lattice_aps;
pub use periodic::{count_ap_in_periodic, count_seq_in_periodic, PeriodicIntervalSet};
pub use seq::{bigint_string, seq_check_monotone_gaps, seq_count_upto, seq_value_at, GapBlock, GapBlockSeq};
pub use sum::{sum_pl_over_ap, sum_pl_over_seq};
