//! Exact Burgers' flow on odd concave profiles, with impulsive `sgn(x)` sources.
//!
//! On `x > 0` a profile is concave and nondecreasing, so characteristics
//! spread out and never cross: every breakpoint `(x, v)` simply moves to
//! `(x + dt·v, v)`. A jump `h` at the origin opens a centered fan, which after
//! time `dt` is the segment from `(0, 0)` to `(dt·h, h)`.

use crate::error::{Error, Result};
use crate::measure::LineMeasure;
use crate::profile::OddConcaveProfile;
use crate::rearrange::{odd_rearrangement, shift_profile};
use crate::tracking::EventLog;

/// Drops below this magnitude are treated as rounding noise.
pub const DROP_TOL: f64 = 1e-12;

/// Initial comparison profile `w(0, x) = sgn(x)·sup_{meas(A) ≤ 2|x|} m(A)/2`.
pub fn profile_from_measure(m: &LineMeasure) -> Result<OddConcaveProfile> {
    odd_rearrangement(m)
}

pub fn burgers_evolve(w: &OddConcaveProfile, dt: f64) -> Result<OddConcaveProfile> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("must be > 0, got {dt}")));
    }
    let h = w.origin();
    let mut points = Vec::with_capacity(w.points().len() + 1);
    if h > 0.0 {
        points.push((dt * h, h));
    }
    points.extend(w.points().iter().map(|&(x, v)| (x + dt * v, v)));
    OddConcaveProfile::from_trusted(0.0, points)
}

pub fn apply_impulse(w: &OddConcaveProfile, dq: f64, kappa: f64) -> Result<OddConcaveProfile> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::param("kappa", format!("must be >= 0, got {kappa}")));
    }
    if dq < -DROP_TOL || !dq.is_finite() {
        return Err(Error::param("dq", format!("Q must not increase, got drop {dq}")));
    }
    shift_profile(w, kappa * dq.max(0.0))
}

/// Characteristic carrying a fixed breakpoint, stored relative to the
/// cumulative impulse `C` and its time integral `S` at creation.
#[derive(Clone, Copy, Debug)]
struct Particle {
    x: f64,
    v: f64,
    t: f64,
    c: f64,
    s: f64,
}

/// Evolution under Burgers' flow interleaved with impulses, evaluated lazily.
///
/// Between impulses each breakpoint moves with its current value, and every
/// impulse raises all values by the same amount, so with `C(t)` the cumulative
/// impulse and `S(t) = ∫₀ᵗ C` a particle's state is a closed form in
/// `(C, S)`. Advancing through `k` impulses therefore costs `O(k)` instead of
/// `O(k²)`.
struct ImpulsiveFlow {
    /// Newest (leftmost) particle last.
    particles: Vec<Particle>,
    origin: f64,
    origin_born: f64,
    time: f64,
    c: f64,
    s: f64,
}

impl ImpulsiveFlow {
    fn new(w0: &OddConcaveProfile) -> Self {
        let mut particles: Vec<Particle> = w0
            .points()
            .iter()
            .map(|&(x, v)| Particle { x, v, t: 0.0, c: 0.0, s: 0.0 })
            .collect();
        particles.reverse();
        Self {
            particles,
            origin: w0.origin(),
            origin_born: 0.0,
            time: 0.0,
            c: 0.0,
            s: 0.0,
        }
    }

    fn advance(&mut self, t: f64) {
        if t <= self.time {
            return;
        }
        if self.origin > 0.0 {
            // the pending origin jump starts its fan at the last impulse
            self.particles.push(Particle {
                x: 0.0,
                v: self.origin,
                t: self.origin_born,
                c: self.c,
                s: self.s,
            });
            self.origin = 0.0;
        }
        self.s += self.c * (t - self.time);
        self.time = t;
    }

    fn impulse(&mut self, amount: f64) {
        if amount <= 0.0 {
            return;
        }
        self.c += amount;
        self.origin += amount;
        self.origin_born = self.time;
    }

    fn profile(&self) -> Result<OddConcaveProfile> {
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(self.particles.len());
        for p in self.particles.iter().rev() {
            let x = p.x + (p.v - p.c) * (self.time - p.t) + self.s - p.s;
            let v = p.v + self.c - p.c;
            match points.last() {
                // rounding can pinch two neighbouring characteristics together
                Some(&(px, pv)) if x <= px || v <= pv => *points.last_mut().unwrap() = (px.max(x), pv.max(v)),
                _ => points.push((x, v)),
            }
        }
        OddConcaveProfile::from_trusted(self.origin, points)
    }
}

/// `w(t)` for the impulsive problem driven by the logged `Q` drops at times `≤ t`.
pub fn solve_impulsive(
    w0: &OddConcaveProfile,
    events: &EventLog,
    kappa: f64,
    t: f64,
) -> Result<OddConcaveProfile> {
    Ok(solve_impulsive_series(w0, events, kappa, &[t])?.remove(0))
}

/// [`solve_impulsive`] at several sorted times in one pass.
pub fn solve_impulsive_series(
    w0: &OddConcaveProfile,
    events: &EventLog,
    kappa: f64,
    times: &[f64],
) -> Result<Vec<OddConcaveProfile>> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::param("kappa", format!("must be >= 0, got {kappa}")));
    }
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("times", "must be nonnegative and sorted"));
    }
    if events.records().windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::param("events", "must be sorted by time"));
    }
    let mut flow = ImpulsiveFlow::new(w0);
    let mut out = Vec::with_capacity(times.len());
    let mut records = events.records().iter().peekable();
    for &t in times {
        while let Some(e) = records.next_if(|e| e.t <= t) {
            if e.dq < -DROP_TOL {
                return Err(Error::param("events", format!("Q increases by {} at t = {}", -e.dq, e.t)));
            }
            flow.advance(e.t);
            flow.impulse(kappa * e.dq.max(0.0));
        }
        flow.advance(t);
        out.push(flow.profile()?);
    }
    Ok(out)
}
