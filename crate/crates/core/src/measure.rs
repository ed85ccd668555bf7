//! Finite signed Radon measures on the real line.
//!
//! A [`LineMeasure`] is a finite sum of point masses plus a piecewise-constant
//! density supported on finitely many bounded half-open intervals `[a, b)`.
//! Every constructor canonicalizes: atoms are sorted and merged, density pieces
//! are refined to a disjoint sorted family with adjacent equal levels joined.
//! Singular-continuous parts are not representable, which keeps every
//! operation here an exact finite computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positions closer than this are treated as the same point.
pub const POSITION_TOL: f64 = 1e-12;
/// Atoms (and density pieces) carrying less mass than this are dropped.
pub const MASS_FLOOR: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

/// Constant density `value` on `[a, b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityPiece {
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

impl DensityPiece {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn mass(&self) -> f64 {
        self.value * (self.b - self.a)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct LineMeasure {
    atoms: Vec<Atom>,
    density: Vec<DensityPiece>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
    #[serde(default)]
    density: Vec<(f64, f64, f64)>,
}

impl TryFrom<MeasureRepr> for LineMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        LineMeasure::new(
            r.atoms.into_iter().map(|(x, mass)| Atom { x, mass }).collect(),
            r.density
                .into_iter()
                .map(|(a, b, value)| DensityPiece { a, b, value })
                .collect(),
        )
    }
}

impl From<LineMeasure> for MeasureRepr {
    fn from(m: LineMeasure) -> Self {
        MeasureRepr {
            atoms: m.atoms.iter().map(|a| (a.x, a.mass)).collect(),
            density: m.density.iter().map(|p| (p.a, p.b, p.value)).collect(),
        }
    }
}

impl LineMeasure {
    /// Builds a measure from arbitrary atoms and density pieces.
    ///
    /// Overlapping density pieces are summed and coincident atoms merged.
    pub fn new(atoms: Vec<Atom>, density: Vec<DensityPiece>) -> Result<Self> {
        for a in &atoms {
            if !a.x.is_finite() || !a.mass.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite atom {a:?}")));
            }
        }
        for p in &density {
            if !p.a.is_finite() || !p.b.is_finite() || !p.value.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite piece {p:?}")));
            }
            if p.b < p.a {
                return Err(Error::InvalidMeasure(format!(
                    "density interval [{}, {}) is reversed",
                    p.a, p.b
                )));
            }
        }
        Ok(Self {
            atoms: canonical_atoms(atoms),
            density: canonical_density(density),
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Purely atomic measure from `(position, mass)` pairs.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Self::new(
            atoms.into_iter().map(|(x, mass)| Atom { x, mass }).collect(),
            Vec::new(),
        )
    }

    /// Absolutely continuous measure from `(a, b, value)` pieces.
    pub fn from_density(pieces: impl IntoIterator<Item = (f64, f64, f64)>) -> Result<Self> {
        Self::new(
            Vec::new(),
            pieces
                .into_iter()
                .map(|(a, b, value)| DensityPiece { a, b, value })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &[DensityPiece] {
        &self.density
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.is_empty()
    }

    pub fn atomic_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn density_mass(&self) -> f64 {
        self.density.iter().map(DensityPiece::mass).sum()
    }

    /// `m(ℝ)`.
    pub fn total_mass(&self) -> f64 {
        self.atomic_mass() + self.density_mass()
    }

    /// `|m|(ℝ)`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass.abs()).sum::<f64>()
            + self.density.iter().map(|p| p.mass().abs()).sum::<f64>()
    }

    /// Lebesgue measure of the support of the density part.
    pub fn density_support_length(&self) -> f64 {
        self.density.iter().map(DensityPiece::len).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.atoms.iter().all(|a| a.mass >= 0.0) && self.density.iter().all(|p| p.value >= 0.0)
    }

    fn map_signs(&self, f: impl Fn(f64) -> f64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { x: a.x, mass: f(a.mass) })
            .filter(|a| a.mass != 0.0)
            .collect();
        let density = self
            .density
            .iter()
            .map(|p| DensityPiece { value: f(p.value), ..*p })
            .filter(|p| p.value != 0.0)
            .collect();
        Self { atoms, density }
    }

    /// Jordan positive part `m⁺`.
    pub fn positive_part(&self) -> Self {
        self.map_signs(|v| v.max(0.0))
    }

    /// Jordan negative part `m⁻`, returned as a positive measure.
    pub fn negative_part(&self) -> Self {
        self.map_signs(|v| (-v).max(0.0))
    }

    /// Total variation measure `|m| = m⁺ + m⁻`.
    pub fn total_variation_measure(&self) -> Self {
        self.map_signs(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        let mut out = self.map_signs(|v| v * c);
        out.atoms.retain(|a| a.mass.abs() >= MASS_FLOOR);
        out
    }

    pub fn translate(&self, dx: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| Atom { x: a.x + dx, ..*a }).collect(),
            density: self
                .density
                .iter()
                .map(|p| DensityPiece { a: p.a + dx, b: p.b + dx, ..*p })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let mut density = self.density.clone();
        density.extend_from_slice(&other.density);
        Self {
            atoms: canonical_atoms(atoms),
            density: canonical_density(density),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// `m⌊J`: agrees with `m` on subsets of `J` and vanishes outside.
    pub fn restrict(&self, set: &IntervalSet) -> Self {
        let atoms = self
            .atoms
            .iter()
            .filter(|a| set.contains(a.x))
            .copied()
            .collect();
        let mut density = Vec::new();
        for p in &self.density {
            for iv in set.intervals() {
                let a = p.a.max(iv.lo);
                let b = p.b.min(iv.hi);
                if b - a > 0.0 {
                    density.push(DensityPiece { a, b, value: p.value });
                }
            }
        }
        Self {
            atoms,
            density: canonical_density(density),
        }
    }

    /// `m(J)` for a single interval.
    pub fn mass_on(&self, iv: &Interval) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| iv.contains(a.x))
            .map(|a| a.mass)
            .sum();
        let dens: f64 = self
            .density
            .iter()
            .map(|p| (p.b.min(iv.hi) - p.a.max(iv.lo)).max(0.0) * p.value)
            .sum();
        atoms + dens
    }

    /// `sup { m(A) : meas(A) ≤ s }` for a positive measure.
    ///
    /// Atoms carry no Lebesgue measure, so all of them are always included;
    /// the density contributes the integral of its decreasing rearrangement
    /// over `[0, s]`. Since the measure has no singular-continuous part, the
    /// strict and non-strict budget constraints give the same supremum.
    pub fn sup_mass(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::NegativeBudget(s));
        }
        if !self.is_positive() {
            return Err(Error::SignedMeasure);
        }
        let mut levels: Vec<(f64, f64)> = self.density.iter().map(|p| (p.value, p.len())).collect();
        levels.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut left = s;
        let mut total = self.atomic_mass();
        for (value, len) in levels {
            if left <= 0.0 {
                break;
            }
            let take = len.min(left);
            total += value * take;
            left -= take;
        }
        Ok(total)
    }
}

fn canonical_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|p, q| p.x.total_cmp(&q.x));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    let mut anchor = f64::NEG_INFINITY;
    for a in atoms {
        match out.last_mut() {
            Some(last) if a.x - anchor <= POSITION_TOL => last.mass += a.mass,
            _ => {
                anchor = a.x;
                out.push(a);
            }
        }
    }
    out.retain(|a| a.mass.abs() >= MASS_FLOOR);
    out
}

fn canonical_density(pieces: Vec<DensityPiece>) -> Vec<DensityPiece> {
    let mut events: Vec<(f64, f64, i32)> = Vec::with_capacity(2 * pieces.len());
    for p in pieces {
        if p.b - p.a <= 0.0 || p.value == 0.0 {
            continue;
        }
        events.push((p.a, p.value, 1));
        events.push((p.b, -p.value, -1));
    }
    if events.is_empty() {
        return Vec::new();
    }
    events.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut out: Vec<DensityPiece> = Vec::new();
    let mut level = 0.0;
    let mut active = 0i32;
    let mut i = 0;
    let mut start = events[0].0;
    while i < events.len() {
        // snap coordinates within POSITION_TOL of the group anchor
        let anchor = events[i].0;
        if active > 0 && level != 0.0 && anchor > start {
            push_piece(&mut out, start, anchor, level);
        }
        while i < events.len() && events[i].0 - anchor <= POSITION_TOL {
            level += events[i].1;
            active += events[i].2;
            i += 1;
        }
        if active == 0 {
            level = 0.0;
        }
        start = anchor;
    }
    out.retain(|p| p.mass().abs() >= MASS_FLOOR);
    out
}

fn push_piece(out: &mut Vec<DensityPiece>, a: f64, b: f64, value: f64) {
    if let Some(last) = out.last_mut() {
        let scale = last.value.abs().max(value.abs());
        if last.b == a && (last.value - value).abs() <= 1e-12 * scale {
            let mass = last.mass() + value * (b - a);
            last.b = b;
            last.value = mass / (b - last.a);
            return;
        }
    }
    out.push(DensityPiece { a, b, value });
}

/// An interval with explicit endpoint closedness. Endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || hi < lo {
            return Err(Error::param("interval", format!("bad endpoints {lo}, {hi}")));
        }
        Ok(Self { lo, hi, lo_closed, hi_closed })
    }

    /// `[a, b]`
    pub fn closed(a: f64, b: f64) -> Self {
        Self { lo: a, hi: b, lo_closed: true, hi_closed: true }
    }

    /// `(a, b)`
    pub fn open(a: f64, b: f64) -> Self {
        Self { lo: a, hi: b, lo_closed: false, hi_closed: false }
    }

    /// `[a, b)`
    pub fn closed_open(a: f64, b: f64) -> Self {
        Self { lo: a, hi: b, lo_closed: true, hi_closed: false }
    }

    /// `(a, b]`
    pub fn open_closed(a: f64, b: f64) -> Self {
        Self { lo: a, hi: b, lo_closed: false, hi_closed: true }
    }

    pub fn whole_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if (x - self.lo).abs() <= POSITION_TOL {
            self.lo_closed
        } else {
            x > self.lo
        };
        let below = if (x - self.hi).abs() <= POSITION_TOL {
            self.hi_closed
        } else {
            x < self.hi
        };
        above && below
    }
}

/// Finite union of pairwise disjoint intervals, sorted left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet(Vec<Interval>);

impl IntervalSet {
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        intervals.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        for w in intervals.windows(2) {
            let (l, r) = (w[0], w[1]);
            let touching = l.hi == r.lo && !(l.hi_closed && r.lo_closed);
            if l.hi > r.lo || (l.hi == r.lo && !touching) {
                return Err(Error::param("intervals", format!("{l:?} overlaps {r:?}")));
            }
        }
        Ok(Self(intervals))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.0.iter().any(|iv| iv.contains(x))
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        Self(vec![iv])
    }
}
