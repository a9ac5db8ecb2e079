use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{dy_div_exact, Dyadic};
use crate::error::{Error, Result};

/// A compactly supported, continuous, non-negative piecewise-linear function.
///
/// The function interpolates linearly between consecutive breakpoints and is
/// zero outside `[first.x, last.x]`. An empty breakpoint list is the zero
/// function.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PiecewiseLinear {
    points: Vec<(Dyadic, Dyadic)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(Dyadic, Dyadic)>) -> Result<Self> {
        if points.is_empty() {
            return Ok(Self::default());
        }
        if points.len() < 2 {
            return Err(Error::InvalidArgument(
                "a non-zero piecewise-linear function needs at least two breakpoints".into(),
            ));
        }
        if !points.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::InvalidArgument("breakpoints must strictly increase".into()));
        }
        if points.iter().any(|(_, v)| v.is_negative()) {
            return Err(Error::InvalidArgument("values must be non-negative".into()));
        }
        if !points[0].1.is_zero() || !points[points.len() - 1].1.is_zero() {
            return Err(Error::InvalidArgument(
                "first and last values must be zero (compact support)".into(),
            ));
        }
        Ok(PiecewiseLinear { points })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Trapezoid: zero at `outer_lo`, `height` on `[inner_lo, inner_hi]`, zero at `outer_hi`.
    pub fn trapezoid(
        outer_lo: Dyadic,
        inner_lo: Dyadic,
        inner_hi: Dyadic,
        outer_hi: Dyadic,
        height: Dyadic,
    ) -> Result<Self> {
        Self::new(vec![
            (outer_lo, Dyadic::zero()),
            (inner_lo, height.clone()),
            (inner_hi, height),
            (outer_hi, Dyadic::zero()),
        ])
    }

    /// Concatenates functions whose supports are ordered and disjoint
    /// (touching at a shared zero is allowed).
    pub fn concat<I: IntoIterator<Item = PiecewiseLinear>>(parts: I) -> Result<Self> {
        let mut points: Vec<(Dyadic, Dyadic)> = Vec::new();
        for part in parts {
            for p in part.points {
                match points.last() {
                    Some(last) if last.0 == p.0 && last.1.is_zero() && p.1.is_zero() => {}
                    _ => points.push(p),
                }
            }
        }
        Self::new(points)
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.points
    }

    pub fn is_zero(&self) -> bool {
        self.points.is_empty()
    }

    /// `[first.x, last.x]`, or `None` for the zero function.
    pub fn support(&self) -> Option<(&Dyadic, &Dyadic)> {
        Some((&self.points.first()?.0, &self.points.last()?.0))
    }

    pub fn max_value(&self) -> Dyadic {
        self.points
            .iter()
            .map(|(_, v)| v.clone())
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    /// The linear pieces `(x0, v0, x1, v1)`.
    pub fn pieces(&self) -> impl Iterator<Item = (&Dyadic, &Dyadic, &Dyadic, &Dyadic)> {
        self.points
            .windows(2)
            .map(|w| (&w[0].0, &w[0].1, &w[1].0, &w[1].1))
    }
}

/// Exact evaluation; `NotExact` if the interpolant at `x` is not dyadic.
pub fn pl_eval(f: &PiecewiseLinear, x: &Dyadic) -> Result<Dyadic> {
    let pts = &f.points;
    let Some((lo, hi)) = f.support() else {
        return Ok(Dyadic::zero());
    };
    if x <= lo || x >= hi {
        return Ok(Dyadic::zero());
    }
    // first breakpoint strictly right of x; x > lo guarantees idx >= 1
    let idx = pts.partition_point(|(bx, _)| bx <= x);
    let (x0, v0) = &pts[idx - 1];
    if x == x0 {
        return Ok(v0.clone());
    }
    let (x1, v1) = &pts[idx];
    let rise = (v1 - v0) * (x - x0);
    Ok(v0 + &dy_div_exact(&rise, &(x1 - x0))?)
}

impl Serialize for PiecewiseLinear {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewiseLinear {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<(Dyadic, Dyadic)>::deserialize(deserializer)?;
        PiecewiseLinear::new(points).map_err(serde::de::Error::custom)
    }
}
