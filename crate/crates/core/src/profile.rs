//! Odd, nondecreasing profiles that are concave and piecewise linear on `x > 0`.
//!
//! A profile is stored by its branch on `x > 0`: the right limit at the origin,
//! then a polyline of breakpoints, then a constant plateau. The branch on
//! `x < 0` is the odd reflection. This is exactly the set of functions closed
//! under Burgers' flow and origin-centered `sgn(x)` impulses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, DensityPiece, LineMeasure};

const SLOPE_RTOL: f64 = 1e-12;
const CONCAVITY_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct OddConcaveProfile {
    origin: f64,
    points: Vec<(f64, f64)>,
    plateau: f64,
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    origin: f64,
    points: Vec<(f64, f64)>,
    plateau: f64,
}

impl TryFrom<ProfileRepr> for OddConcaveProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        let p = OddConcaveProfile::new(r.origin, r.points)?;
        if (p.plateau - r.plateau).abs() > 1e-9 * r.plateau.abs().max(1.0) {
            return Err(Error::InvalidProfile(format!(
                "plateau {} does not match last breakpoint value {}",
                r.plateau, p.plateau
            )));
        }
        Ok(p)
    }
}

impl From<OddConcaveProfile> for ProfileRepr {
    fn from(p: OddConcaveProfile) -> Self {
        ProfileRepr {
            origin: p.origin,
            points: p.points,
            plateau: p.plateau,
        }
    }
}

impl OddConcaveProfile {
    /// Validating constructor. `points` are the breakpoints `(x, value)` of
    /// the branch on `x > 0`; the plateau is the last value.
    pub fn new(origin: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        let p = Self::build(origin, points)?;
        p.check_concave()?;
        Ok(p)
    }

    /// Like [`new`](Self::new) but without the concavity check. Used for
    /// profiles produced by exact transformations of class-F data, where the
    /// only possible violations are rounding-level.
    pub(crate) fn from_trusted(origin: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        Self::build(origin, points)
    }

    fn build(origin: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        if !origin.is_finite() || origin < -1e-12 {
            return Err(Error::InvalidProfile(format!("origin value {origin} must be >= 0")));
        }
        let origin = origin.max(0.0);
        let scale = points
            .iter()
            .map(|p| p.1.abs())
            .fold(origin.max(1e-300), f64::max);
        let mut kept: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        let (mut px, mut pv) = (0.0, origin);
        for (x, v) in points {
            if !x.is_finite() || !v.is_finite() {
                return Err(Error::InvalidProfile(format!("non-finite breakpoint ({x}, {v})")));
            }
            if x <= px {
                return Err(Error::InvalidProfile(format!(
                    "breakpoints must be positive and strictly increasing, got {x} after {px}"
                )));
            }
            if v < pv - 1e-12 * scale {
                return Err(Error::InvalidProfile(format!(
                    "profile decreases from {pv} to {v} at x = {x}"
                )));
            }
            if v <= pv {
                // flat from here on; concavity makes every later point flat too
                continue;
            }
            kept.push((x, v));
            px = x;
            pv = v;
        }
        let kept = drop_collinear(origin, kept);
        let plateau = kept.last().map_or(origin, |p| p.1);
        Ok(Self {
            origin,
            points: kept,
            plateau,
        })
    }

    fn check_concave(&self) -> Result<()> {
        let mut prev = f64::INFINITY;
        for (k, s) in self.slopes().enumerate() {
            if s > prev * (1.0 + CONCAVITY_RTOL) + 1e-12 {
                return Err(Error::InvalidProfile(format!(
                    "slope increases from {prev} to {s} at segment {k}"
                )));
            }
            prev = s;
        }
        Ok(())
    }

    pub fn zero() -> Self {
        Self {
            origin: 0.0,
            points: Vec::new(),
            plateau: 0.0,
        }
    }

    /// `sgn(x)·h`.
    pub fn step(h: f64) -> Result<Self> {
        Self::new(h, Vec::new())
    }

    /// `sgn(x)·min(slope·|x|, height)`.
    pub fn ramp(slope: f64, height: f64) -> Result<Self> {
        if !(slope > 0.0) || !(height >= 0.0) {
            return Err(Error::param("ramp", format!("slope {slope}, height {height}")));
        }
        Self::new(0.0, vec![(height / slope, height)])
    }

    /// Right limit at the origin, `w(0+)`.
    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Value for `x` beyond the last breakpoint; half the total mass of the
    /// derivative measure.
    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    /// Slopes of the linear pieces on `x > 0`, left to right (excluding the
    /// final zero slope of the plateau).
    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        let starts = std::iter::once((0.0, self.origin)).chain(self.points.iter().copied());
        starts
            .zip(self.points.iter())
            .map(|((x0, v0), &(x1, v1))| (v1 - v0) / (x1 - x0))
    }

    pub fn value(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.value_right(x)
        } else if x < 0.0 {
            -self.value_right(-x)
        } else {
            0.0
        }
    }

    fn value_right(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|p| p.0 < x);
        if k == self.points.len() {
            return self.plateau;
        }
        let (x1, v1) = self.points[k];
        let (x0, v0) = if k == 0 { (0.0, self.origin) } else { self.points[k - 1] };
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// The distributional derivative `D_x w`: an atom `2·w(0+)` at the origin
    /// plus an even, piecewise-constant density.
    pub fn derivative_measure(&self) -> LineMeasure {
        let atoms = if self.origin > 0.0 {
            vec![Atom { x: 0.0, mass: 2.0 * self.origin }]
        } else {
            Vec::new()
        };
        let mut density = Vec::with_capacity(2 * self.points.len());
        let mut x0 = 0.0;
        for (s, &(x1, _)) in self.slopes().zip(self.points.iter()) {
            density.push(DensityPiece { a: x0, b: x1, value: s });
            density.push(DensityPiece { a: -x1, b: -x0, value: s });
            x0 = x1;
        }
        LineMeasure::new(atoms, density).expect("finite profile yields a finite measure")
    }

    /// Pointwise sum; class F is closed under addition.
    pub fn sum(&self, other: &Self) -> Self {
        let xs = merged_abscissae(self, other);
        let points = xs
            .into_iter()
            .map(|x| (x, self.value_right(x) + other.value_right(x)))
            .collect();
        Self::from_trusted(self.origin + other.origin, points).expect("sum of class-F profiles")
    }

    /// Rows `(x, value)` tracing the graph on both sides of the origin,
    /// including both one-sided limits at zero.
    pub fn graph(&self) -> Vec<(f64, f64)> {
        let mut rows: Vec<(f64, f64)> = self.points.iter().rev().map(|&(x, v)| (-x, -v)).collect();
        rows.push((0.0, -self.origin));
        rows.push((0.0, self.origin));
        rows.extend(self.points.iter().copied());
        rows
    }
}

pub(crate) fn merged_abscissae(a: &OddConcaveProfile, b: &OddConcaveProfile) -> Vec<f64> {
    let mut xs: Vec<f64> = a
        .points
        .iter()
        .chain(b.points.iter())
        .map(|p| p.0)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn drop_collinear(origin: f64, points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        while let Some(&last) = out.last() {
            let before = if out.len() >= 2 { out[out.len() - 2] } else { (0.0, origin) };
            let s_in = (last.1 - before.1) / (last.0 - before.0);
            let s_out = (p.1 - last.1) / (p.0 - last.0);
            if (s_in - s_out).abs() <= SLOPE_RTOL * s_in.abs().max(s_out.abs()) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}
