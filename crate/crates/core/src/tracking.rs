//! Event-driven front tracking for systems with one or two equations.
//!
//! Between interactions every front moves on a straight line, so the
//! approximation is advanced exactly from one collision to the next. At a
//! collision the Riemann problem between the outer states is solved and its
//! waves become the new fronts:
//!
//! * shocks travel with the exact Rankine–Hugoniot speed;
//! * rarefaction fronts travel with the characteristic speed of their right
//!   state;
//! * a rarefaction of a family that was not among the incoming fronts is
//!   split into pieces of strength at most `delta`; otherwise it stays a
//!   single front, so the front count grows by at most a constant per event.
//!
//! Each rarefaction front also carries the width of the fan slice it stands
//! for. The width grows at rate `σ` (the spread of the edge characteristics)
//! and is inherited, at constant density, across interactions. This lets
//! [`FrontState::positive_fan_measure`] rebuild the density of positive waves
//! that the purely atomic wave measure of a step function cannot express.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, DensityPiece, LineMeasure};
use crate::pcfn::PiecewiseConstantFn;
use crate::system::{HyperbolicSystem, State, WaveKind};
use crate::waves::{interaction_potential, KeyedWave, WaveDecomposition};

/// Outgoing waves weaker than this are not turned into fronts.
pub const WAVE_DROP: f64 = 1e-13;
/// Collisions closer in time than this (relative to `max(1, t)`) are simultaneous.
pub const TIME_TIE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TrackingConfig {
    /// Maximal strength of a rarefaction front.
    pub delta: f64,
    pub max_fronts: usize,
    pub max_events: usize,
}

impl TrackingConfig {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::param("delta", format!("must be > 0, got {delta}")));
        }
        Ok(Self {
            delta,
            max_fronts: 200_000,
            max_events: 2_000_000,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub family: usize,
    pub strength: f64,
    pub speed: f64,
    pub kind: WaveKind,
    pub birth_time: f64,
    pub birth_x: f64,
    /// Width of the represented fan slice at `birth_time` (zero for shocks).
    pub birth_width: f64,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.birth_x + self.speed * (t - self.birth_time)
    }

    pub fn width(&self, t: f64) -> f64 {
        match self.kind {
            WaveKind::Shock => 0.0,
            WaveKind::Rarefaction => self.birth_width + self.strength * (t - self.birth_time),
        }
    }
}

/// Fronts ordered left to right together with the constant states between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontState {
    pub time: f64,
    fronts: Vec<Front>,
    /// `states[k]` lies left of `fronts[k]`; one more state than fronts.
    states: Vec<State>,
}

impl FrontState {
    pub fn fronts(&self) -> &[Front] {
        &self.fronts
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn left_state(&self) -> &[f64] {
        &self.states[0]
    }

    pub fn right_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    /// Same fronts, viewed at a later time `t` (no interactions applied).
    pub fn at_time(&self, t: f64) -> FrontState {
        FrontState {
            time: t,
            ..self.clone()
        }
    }

    pub fn keyed_waves(&self) -> Vec<KeyedWave> {
        self.fronts
            .iter()
            .enumerate()
            .map(|(k, f)| KeyedWave {
                key: k as f64,
                family: f.family,
                strength: f.strength,
            })
            .collect()
    }

    /// Total wave strength.
    pub fn glimm_v(&self) -> f64 {
        self.fronts.iter().map(|f| f.strength.abs()).sum()
    }

    /// Interaction potential with fronts ordered as listed, so fronts that
    /// coincide at an interaction instant are counted as just before it.
    pub fn glimm_q(&self, families: usize) -> f64 {
        interaction_potential(&self.keyed_waves(), families)
    }

    /// Atomic wave measures at the current time, one per family.
    pub fn decomposition(&self, families: usize) -> Result<WaveDecomposition> {
        let mut atoms = vec![Vec::new(); families];
        for f in &self.fronts {
            atoms[f.family].push(Atom {
                x: f.position(self.time),
                mass: f.strength,
            });
        }
        Ok(WaveDecomposition::new(
            atoms
                .into_iter()
                .map(|a| LineMeasure::new(a, Vec::new()))
                .collect::<Result<Vec<_>>>()?,
        ))
    }

    /// Positive `i`-waves with every rarefaction front spread uniformly over
    /// the fan slice `[x − width, x)` it represents. Slices are cut at the
    /// previous positive front of the family so that they never overlap.
    /// Fronts of zero width remain atoms.
    pub fn positive_fan_measure(&self, family: usize) -> Result<LineMeasure> {
        let t = self.time;
        let mut atoms = Vec::new();
        let mut density = Vec::new();
        let mut prev = f64::NEG_INFINITY;
        for f in self.fronts.iter().filter(|f| f.family == family && f.strength > 0.0) {
            let x = f.position(t);
            let w = f.width(t).min(x - prev);
            prev = x;
            if w > 1e-14 {
                density.push(DensityPiece { a: x - w, b: x, value: f.strength / w });
            } else {
                atoms.push(Atom { x, mass: f.strength });
            }
        }
        LineMeasure::new(atoms, density)
    }

    /// The step function represented by the fronts at the current time.
    pub fn to_pcfn(&self) -> Result<PiecewiseConstantFn> {
        let t = self.time;
        let mut breaks: Vec<f64> = Vec::with_capacity(self.fronts.len());
        let mut values: Vec<State> = vec![self.states[0].clone()];
        for (k, f) in self.fronts.iter().enumerate() {
            let x = f.position(t);
            let right = self.states[k + 1].clone();
            match breaks.last() {
                // coincident fronts (at their birth instant) form one jump
                Some(&last) if x <= last + 1e-12 => *values.last_mut().unwrap() = right,
                _ => {
                    breaks.push(x);
                    values.push(right);
                }
            }
        }
        PiecewiseConstantFn::new(breaks, values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub x: f64,
    /// `Q` before minus `Q` after the interaction.
    pub dq: f64,
    pub q_before: f64,
    pub q_after: f64,
    pub v_before: f64,
    pub v_after: f64,
    /// Zero-based families of the incoming fronts.
    pub families: Vec<usize>,
}

impl EventRecord {
    pub fn d_upsilon(&self, c0: f64) -> f64 {
        (self.v_after + c0 * self.q_after) - (self.v_before + c0 * self.q_before)
    }
}

/// Interaction events ordered by time, and left to right among simultaneous ones.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog(pub Vec<EventRecord>);

impl EventLog {
    pub fn records(&self) -> &[EventRecord] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(t, ΔQ)` for events at times `≤ t`.
    pub fn drops_until(&self, t: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.0.iter().take_while(move |e| e.t <= t).map(|e| (e.t, e.dq))
    }

    pub fn total_drop(&self) -> f64 {
        self.0.iter().map(|e| e.dq).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub v: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq)]
struct Splice {
    time: f64,
    start: usize,
    removed: usize,
    fronts: Vec<Front>,
    interior: Vec<State>,
    /// Number of states removed to the right of the removed fronts; one when an
    /// interaction cancels completely and its two outer states merge.
    drop_right_state: bool,
}

/// Straight piece of a front's path.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontSegment {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub speed: f64,
    pub left: State,
    pub right: State,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    initial: FrontState,
    splices: Vec<Splice>,
    pub events: EventLog,
    pub samples: Vec<Sample>,
    pub snapshots: Vec<FrontState>,
    pub end_time: f64,
    pub families: usize,
}

impl Trajectory {
    pub fn initial(&self) -> &FrontState {
        &self.initial
    }

    /// Front configuration valid at time `t` (after any event at exactly `t`).
    pub fn state_at(&self, t: f64) -> Result<FrontState> {
        if !(t >= self.initial.time) || t > self.end_time {
            return Err(Error::TimeOutOfRange { time: t, end: self.end_time });
        }
        let mut st = self.initial.clone();
        for sp in self.splices.iter().take_while(|sp| sp.time <= t) {
            apply_splice(&mut st, sp);
        }
        st.time = t;
        Ok(st)
    }

    pub fn solution_at(&self, t: f64) -> Result<PiecewiseConstantFn> {
        self.state_at(t)?.to_pcfn()
    }

    /// Every front path as a list of straight segments with its side states.
    pub fn segments(&self) -> Vec<FrontSegment> {
        let mut out = Vec::new();
        let mut st = self.initial.clone();
        let seg = |st: &FrontState, k: usize, t1: f64| {
            let f = &st.fronts[k];
            FrontSegment {
                t0: f.birth_time,
                t1,
                x0: f.birth_x,
                speed: f.speed,
                left: st.states[k].clone(),
                right: st.states[k + 1].clone(),
            }
        };
        for sp in &self.splices {
            for k in sp.start..sp.start + sp.removed {
                out.push(seg(&st, k, sp.time));
            }
            apply_splice(&mut st, sp);
        }
        for k in 0..st.fronts.len() {
            out.push(seg(&st, k, self.end_time));
        }
        out
    }
}

fn apply_splice(st: &mut FrontState, sp: &Splice) {
    let (a, b) = (sp.start, sp.start + sp.removed);
    st.fronts.splice(a..b, sp.fronts.iter().cloned());
    let right_end = if sp.drop_right_state { b + 1 } else { b };
    st.states.splice(a + 1..right_end, sp.interior.iter().cloned());
    st.time = sp.time;
}

fn rarefaction_pieces(
    sys: &HyperbolicSystem,
    family: usize,
    from: &[f64],
    to: &[f64],
    pieces: usize,
) -> Result<Vec<(State, f64)>> {
    let sigma = sys.lambda(family, to) - sys.lambda(family, from);
    let mut out = Vec::with_capacity(pieces);
    let mut prev = from.to_vec();
    for p in 1..=pieces {
        let right = if p == pieces {
            to.to_vec()
        } else {
            sys.wave_curve(family, from, sigma * p as f64 / pieces as f64)?
        };
        let s = sys.lambda(family, &right) - sys.lambda(family, &prev);
        out.push((right.clone(), s));
        prev = right;
    }
    Ok(out)
}

fn split_count(sigma: f64, delta: f64) -> usize {
    ((sigma / delta) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Resolves every initial jump and splits rarefactions into fronts of
/// strength at most `delta`.
pub fn init_approx(
    sys: &HyperbolicSystem,
    u0: &PiecewiseConstantFn,
    config: &TrackingConfig,
) -> Result<FrontState> {
    if u0.dim() != sys.n() {
        return Err(Error::Config(format!(
            "initial data has {} components, system has {}",
            u0.dim(),
            sys.n()
        )));
    }
    for v in u0.values() {
        sys.check_admissible(v)?;
    }
    let mut fronts = Vec::new();
    let mut states = vec![u0.values()[0].clone()];
    for jump in u0.jumps() {
        let fan = sys.riemann_solve(jump.left, jump.right)?;
        for (i, w) in fan.waves.iter().enumerate() {
            if w.strength.abs() <= WAVE_DROP {
                continue;
            }
            let (from, to) = (&fan.states[i], &fan.states[i + 1]);
            match w.kind {
                WaveKind::Shock => {
                    fronts.push(Front {
                        family: i,
                        strength: w.strength,
                        speed: w.speeds.0,
                        kind: WaveKind::Shock,
                        birth_time: 0.0,
                        birth_x: jump.x,
                        birth_width: 0.0,
                    });
                    states.push(to.clone());
                }
                WaveKind::Rarefaction => {
                    let pieces = split_count(w.strength, config.delta);
                    for (right, s) in rarefaction_pieces(sys, i, from, to, pieces)? {
                        fronts.push(Front {
                            family: i,
                            strength: s,
                            speed: sys.lambda(i, &right),
                            kind: WaveKind::Rarefaction,
                            birth_time: 0.0,
                            birth_x: jump.x,
                            birth_width: 0.0,
                        });
                        states.push(right);
                    }
                }
            }
        }
        // dropped waves leave the last state within WAVE_DROP of the jump's right value
        *states.last_mut().unwrap() = jump.right.to_vec();
    }
    let st = FrontState { time: 0.0, fronts, states };
    let v = st.glimm_v();
    if v > sys.region().tv_budget * (1.0 + 1e-12) {
        return Err(Error::BudgetExceeded {
            time: 0.0,
            reason: format!(
                "initial total wave strength {v} exceeds budget {}",
                sys.region().tv_budget
            ),
        });
    }
    if st.fronts.len() > config.max_fronts {
        return Err(Error::BudgetExceeded {
            time: 0.0,
            reason: format!("{} initial fronts exceed cap {}", st.fronts.len(), config.max_fronts),
        });
    }
    Ok(st)
}

fn next_collisions(st: &FrontState) -> Option<(f64, Vec<usize>)> {
    let now = st.time;
    let times: Vec<Option<f64>> = st
        .fronts
        .windows(2)
        .map(|w| {
            let ds = w[0].speed - w[1].speed;
            if ds <= 0.0 {
                return None;
            }
            let gap = w[1].position(now) - w[0].position(now);
            Some(now + gap.max(0.0) / ds)
        })
        .collect();
    let t_star = times.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    if !t_star.is_finite() {
        return None;
    }
    let tie = TIME_TIE * t_star.abs().max(1.0);
    let pairs = times
        .iter()
        .enumerate()
        .filter_map(|(k, t)| t.filter(|&t| t <= t_star + tie).map(|_| k))
        .collect();
    Some((t_star, pairs))
}

/// Consecutive colliding pairs `k, k+1, …` merged into front ranges `[a, b]`.
fn runs(pairs: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &k in pairs {
        match out.last_mut() {
            Some(r) if r.1 == k => r.1 = k + 1,
            _ => out.push((k, k + 1)),
        }
    }
    out
}

struct Tracker<'a> {
    sys: &'a HyperbolicSystem,
    config: &'a TrackingConfig,
    st: FrontState,
    splices: Vec<Splice>,
    events: Vec<EventRecord>,
}

impl Tracker<'_> {
    fn resolve(&mut self, a: usize, b: usize, t: f64) -> Result<isize> {
        let sys = self.sys;
        let n = sys.n();
        let incoming = &self.st.fronts[a..=b];
        let x = incoming.iter().map(|f| f.position(t)).sum::<f64>() / incoming.len() as f64;
        let mut families: Vec<usize> = incoming.iter().map(|f| f.family).collect();
        families.sort_unstable();
        families.dedup();

        // density of incoming rarefaction slices, per family
        let mut inherit = vec![(0.0, 0.0); n];
        for f in incoming.iter().filter(|f| f.kind == WaveKind::Rarefaction) {
            inherit[f.family].0 += f.strength;
            inherit[f.family].1 += f.width(t);
        }

        let ul = self.st.states[a].clone();
        let ur = self.st.states[b + 1].clone();
        let fan = sys.riemann_solve(&ul, &ur)?;

        let mut fronts = Vec::new();
        let mut rights: Vec<State> = Vec::new();
        for (i, w) in fan.waves.iter().enumerate() {
            if w.strength.abs() <= WAVE_DROP {
                continue;
            }
            let (from, to) = (&fan.states[i], &fan.states[i + 1]);
            match w.kind {
                WaveKind::Shock => {
                    fronts.push(Front {
                        family: i,
                        strength: w.strength,
                        speed: w.speeds.0,
                        kind: WaveKind::Shock,
                        birth_time: t,
                        birth_x: x,
                        birth_width: 0.0,
                    });
                    rights.push(to.clone());
                }
                WaveKind::Rarefaction => {
                    let pieces = if families.contains(&i) {
                        1
                    } else {
                        split_count(w.strength, self.config.delta)
                    };
                    let (mass_in, width_in) = inherit[i];
                    for (right, s) in rarefaction_pieces(sys, i, from, to, pieces)? {
                        let width = if pieces == 1 && mass_in > 0.0 && width_in > 0.0 {
                            s * width_in / mass_in
                        } else {
                            0.0
                        };
                        fronts.push(Front {
                            family: i,
                            strength: s,
                            speed: sys.lambda(i, &right),
                            kind: WaveKind::Rarefaction,
                            birth_time: t,
                            birth_x: x,
                            birth_width: width,
                        });
                        rights.push(right);
                    }
                }
            }
        }

        let q_before = self.st.glimm_q(n);
        let v_before = self.st.glimm_v();
        let removed = b - a + 1;
        let added = fronts.len();
        let splice = Splice {
            time: t,
            start: a,
            removed,
            drop_right_state: fronts.is_empty(),
            interior: rights.into_iter().take(added.saturating_sub(1)).collect(),
            fronts,
        };
        apply_splice(&mut self.st, &splice);
        self.st.time = t;
        let q_after = self.st.glimm_q(n);
        let v_after = self.st.glimm_v();
        self.splices.push(splice);
        self.events.push(EventRecord {
            t,
            x,
            dq: q_before - q_after,
            q_before,
            q_after,
            v_before,
            v_after,
            families,
        });

        let budget = sys.region().tv_budget;
        if v_after > budget * (1.0 + 1e-12) {
            return Err(Error::BudgetExceeded {
                time: t,
                reason: format!("total wave strength {v_after} exceeds budget {budget} at x = {x}"),
            });
        }
        if self.st.fronts.len() > self.config.max_fronts {
            return Err(Error::BudgetExceeded {
                time: t,
                reason: format!("front count exceeds cap {}", self.config.max_fronts),
            });
        }
        if self.events.len() > self.config.max_events {
            return Err(Error::BudgetExceeded {
                time: t,
                reason: format!("event count exceeds cap {}", self.config.max_events),
            });
        }
        Ok(added as isize - removed as isize)
    }
}

/// Advances `state` to `t_end`, recording every interaction and a snapshot
/// (with `V`, `Q`) at each of the sorted `sample_times`.
pub fn evolve(
    sys: &HyperbolicSystem,
    state: &FrontState,
    t_end: f64,
    config: &TrackingConfig,
    sample_times: &[f64],
) -> Result<Trajectory> {
    if !(t_end > state.time) {
        return Err(Error::param("t_end", format!("must exceed the current time {}", state.time)));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0])
        || sample_times.iter().any(|&s| s < state.time || s > t_end)
    {
        return Err(Error::param("sample_times", "must be sorted and within the run"));
    }
    let n = sys.n();
    let mut tr = Tracker {
        sys,
        config,
        st: state.clone(),
        splices: Vec::new(),
        events: Vec::new(),
    };
    let mut samples = Vec::with_capacity(sample_times.len());
    let mut snapshots = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    let record = |st: &FrontState, t: f64, samples: &mut Vec<Sample>, snaps: &mut Vec<FrontState>| {
        samples.push(Sample { t, v: st.glimm_v(), q: st.glimm_q(n) });
        snaps.push(st.at_time(t));
    };

    loop {
        let next = next_collisions(&tr.st).filter(|(t, _)| *t <= t_end);
        let horizon = next.as_ref().map_or(f64::INFINITY, |(t, _)| *t);
        while next_sample < sample_times.len() && sample_times[next_sample] < horizon {
            record(&tr.st, sample_times[next_sample], &mut samples, &mut snapshots);
            next_sample += 1;
        }
        let Some((t_star, pairs)) = next else { break };
        let mut offset: isize = 0;
        for (a, b) in runs(&pairs) {
            let a = (a as isize + offset) as usize;
            let b = (b as isize + offset) as usize;
            offset += tr.resolve(a, b, t_star)?;
        }
        log::trace!("t = {t_star}: {} fronts", tr.st.fronts.len());
    }
    log::debug!(
        "front tracking reached t = {t_end} after {} events, {} fronts",
        tr.events.len(),
        tr.st.fronts.len()
    );
    Ok(Trajectory {
        initial: state.clone(),
        splices: tr.splices,
        events: EventLog(tr.events),
        samples,
        snapshots,
        end_time: t_end,
        families: n,
    })
}

/// Smooth test function for the weak formulation.
pub trait TestFunction {
    fn value(&self, t: f64, x: f64) -> f64;
}

/// Product bump `ψ((t − tc)/rt)·ψ((x − xc)/rx)` with `ψ(z) = exp(−1/(1 − z²))`.
#[derive(Clone, Copy, Debug)]
pub struct Bump {
    pub tc: f64,
    pub xc: f64,
    pub rt: f64,
    pub rx: f64,
}

impl Bump {
    fn psi(z: f64) -> f64 {
        if z.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - z * z)).exp()
        }
    }
}

impl TestFunction for Bump {
    fn value(&self, t: f64, x: f64) -> f64 {
        Self::psi((t - self.tc) / self.rt) * Self::psi((x - self.xc) / self.rx)
    }
}

/// `∬ (u φ_t + f(u) φ_x) dx dt + ∫ u₀ φ(0, x) dx` for the front-tracking
/// solution, one entry per component.
///
/// For a step function with straight fronts the area integral collapses onto
/// the fronts: each contributes `∫ (ẋ [u] − [f(u)]) φ(t, x(t)) dt`.
pub fn weak_residual(sys: &HyperbolicSystem, traj: &Trajectory, phi: &dyn TestFunction) -> Vec<f64> {
    // 5-point Gauss–Legendre on [-1, 1]
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let mut res = vec![0.0; sys.n()];
    for seg in traj.segments() {
        let len = seg.t1 - seg.t0;
        if len <= 0.0 {
            continue;
        }
        let (fl, fr) = (sys.flux(&seg.left), sys.flux(&seg.right));
        let defect: Vec<f64> = (0..sys.n())
            .map(|c| seg.speed * (seg.right[c] - seg.left[c]) - (fr[c] - fl[c]))
            .collect();
        let chunks = (len / 0.02).ceil().max(1.0) as usize;
        let h = len / chunks as f64;
        let mut integral = 0.0;
        for j in 0..chunks {
            let mid = seg.t0 + (j as f64 + 0.5) * h;
            for (z, w) in NODES.iter().zip(WEIGHTS) {
                let t = mid + 0.5 * h * z;
                integral += w * 0.5 * h * phi.value(t, seg.x0 + seg.speed * (t - seg.t0));
            }
        }
        for c in 0..sys.n() {
            res[c] += defect[c] * integral;
        }
    }
    res
}
