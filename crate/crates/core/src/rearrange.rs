//! Symmetric and odd rearrangements, and the partial order `μ ⪯ μ'`.
//!
//! `μ ⪯ μ'` holds when, for every Lebesgue budget `s`, the largest `μ`-mass
//! carried by a set of measure `≤ s` is dominated by the same quantity for
//! `μ'`. Equivalently the odd rearrangements satisfy `v̂(x) ≤ v̂'(x)` for all
//! `x > 0`. Both rearrangements are concave polylines on `x > 0`, so the
//! comparison reduces to finitely many point evaluations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DensityPiece, LineMeasure};
use crate::profile::{merged_abscissae, OddConcaveProfile};

/// Absolute slack (mass units) below which a negative margin still counts as ordered.
pub const ORDER_TOL: f64 = 1e-12;

/// Outcome of comparing two profiles on `x > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub holds: bool,
    /// `inf_{x>0} (b(x) − a(x))`, in mass units.
    pub margin: f64,
    /// Where the infimum is attained (`0` stands for `0+`).
    pub at: f64,
}

/// Even, radially nonincreasing density equimeasurable with `z`.
///
/// Pieces are laid out from the origin outwards in decreasing order of level;
/// equal levels keep their left-to-right order.
pub fn symmetric_rearrange(z: &LineMeasure) -> Result<LineMeasure> {
    if !z.atoms().is_empty() {
        return Err(Error::InvalidMeasure("symmetric rearrangement takes a pure density".into()));
    }
    if z.density().iter().any(|p| p.value < 0.0) {
        return Err(Error::SignedMeasure);
    }
    let mut pieces = z.density().to_vec();
    pieces.sort_by(|p, q| q.value.total_cmp(&p.value));
    let mut out = Vec::with_capacity(2 * pieces.len());
    let mut filled = 0.0;
    for p in pieces {
        let next = filled + p.len();
        out.push(DensityPiece { a: -next / 2.0, b: -filled / 2.0, value: p.value });
        out.push(DensityPiece { a: filled / 2.0, b: next / 2.0, value: p.value });
        filled = next;
    }
    LineMeasure::new(Vec::new(), out)
}

/// `v̂(x) = sgn(x)·sup_{meas(A) ≤ 2|x|} μ(A)/2` for a positive measure.
pub fn odd_rearrangement(m: &LineMeasure) -> Result<OddConcaveProfile> {
    if !m.is_positive() {
        return Err(Error::SignedMeasure);
    }
    let origin = m.atomic_mass() / 2.0;
    let mut levels: Vec<(f64, f64)> = m.density().iter().map(|p| (p.value, p.len())).collect();
    levels.sort_by(|p, q| q.0.total_cmp(&p.0));
    let mut points = Vec::with_capacity(levels.len());
    let (mut len, mut mass) = (0.0, 0.0);
    for (value, l) in levels {
        len += l;
        mass += value * l;
        points.push((len / 2.0, origin + mass / 2.0));
    }
    OddConcaveProfile::from_trusted(origin, points)
}

/// Decides `m ⪯ m2` through the odd rearrangements.
pub fn precedes(m: &LineMeasure, m2: &LineMeasure) -> Result<Comparison> {
    Ok(profile_leq(&odd_rearrangement(m)?, &odd_rearrangement(m2)?))
}

/// Exact comparison `a(x) ≤ b(x)` for all `x > 0`.
///
/// The difference of two polylines is linear between consecutive points of
/// the union of their breakpoints and constant beyond the last one, so its
/// infimum is attained at `0+` or at a breakpoint.
pub fn profile_leq(a: &OddConcaveProfile, b: &OddConcaveProfile) -> Comparison {
    let mut margin = b.origin() - a.origin();
    let mut at = 0.0;
    for x in merged_abscissae(a, b) {
        let d = b.value(x) - a.value(x);
        if d < margin {
            margin = d;
            at = x;
        }
    }
    Comparison {
        holds: margin >= -ORDER_TOL,
        margin,
        at,
    }
}

/// `a + sgn(x)·c`.
pub fn shift_profile(a: &OddConcaveProfile, c: f64) -> Result<OddConcaveProfile> {
    if !(c >= 0.0) {
        return Err(Error::param("shift", format!("must be >= 0, got {c}")));
    }
    let points = a.points().iter().map(|&(x, v)| (x, v + c)).collect();
    OddConcaveProfile::from_trusted(a.origin() + c, points)
}
