//! Exact dyadic scalars, intervals, interval unions and piecewise-linear functions.

mod dyadic;
mod interval;
mod piecewise;
mod union;

pub use dyadic::{
    check_span, dy_add, dy_ceil_ratio, dy_div_exact, dy_floor_ratio, dy_mul, dy_sub,
    set_span_guard_bits, span_guard_bits, Dyadic, DEFAULT_SPAN_GUARD_BITS,
};
pub use interval::DyInterval;
pub use piecewise::{pl_eval, PiecewiseLinear};
pub use union::{union_insert, IntervalUnion};
