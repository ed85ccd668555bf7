//! End-to-end decay check: track the solution, rearrange the positive waves of
//! each family and compare them with the impulsive Burgers profile.

use serde::{Deserialize, Serialize};

use crate::burgers::{profile_from_measure, solve_impulsive_series};
use crate::error::{Error, Result};
use crate::pcfn::PiecewiseConstantFn;
use crate::profile::OddConcaveProfile;
use crate::rearrange::{odd_rearrangement, profile_leq};
use crate::system::HyperbolicSystem;
use crate::tracking::{evolve, init_approx, TrackingConfig, Trajectory};
use crate::waves::{glimm_v, wave_measures};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub kappa: f64,
    pub c0: f64,
    pub delta: f64,
    /// Defaults to `1e-8 + 2·delta·V₀`, `V₀` the initial total wave strength.
    pub tolerance: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { kappa: 20.0, c0: 10.0, delta: 1e-3, tolerance: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeCheck {
    pub t: f64,
    /// One-based family number.
    pub family: usize,
    pub margin: f64,
    pub at: f64,
    pub holds: bool,
    pub rearranged: OddConcaveProfile,
    pub comparison: OddConcaveProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSample {
    pub t: f64,
    pub v: f64,
    pub q: f64,
    pub upsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub per_time: Vec<TimeCheck>,
    pub kappa_used: f64,
    pub c0_used: f64,
    pub delta_used: f64,
    pub tolerance: f64,
    pub q_series: Vec<QSample>,
    pub events: usize,
}

impl DecayReport {
    pub fn all_hold(&self) -> bool {
        self.per_time.iter().all(|c| c.holds)
    }

    pub fn min_margin(&self) -> f64 {
        self.per_time.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Simulation shared by every `κ` in a sweep.
#[derive(Clone, Debug)]
pub struct DecayRun {
    pub trajectory: Trajectory,
    /// Initial comparison profile of each family.
    pub initial_profiles: Vec<OddConcaveProfile>,
    /// Rearranged positive waves of each family at each requested time.
    pub rearranged: Vec<Vec<OddConcaveProfile>>,
    pub times: Vec<f64>,
    pub families: Vec<usize>,
    pub initial_strength: f64,
    pub delta: f64,
    pub c0: f64,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("times", "must be a nonempty, strictly increasing list of positive times"));
    }
    Ok(())
}

/// Tracks `u0` up to the last requested time and rearranges the positive
/// waves of the zero-based `families` at every time.
pub fn prepare(
    sys: &HyperbolicSystem,
    u0: &PiecewiseConstantFn,
    families: &[usize],
    times: &[f64],
    delta: f64,
    c0: f64,
) -> Result<DecayRun> {
    check_times(times)?;
    if families.is_empty() || families.iter().any(|&i| i >= sys.n()) {
        return Err(Error::param("family", format!("must be between 1 and {}", sys.n())));
    }
    let config = TrackingConfig::new(delta)?;
    let d0 = wave_measures(sys, u0)?;
    let initial_profiles = families
        .iter()
        .map(|&i| profile_from_measure(&d0.family(i).positive_part()))
        .collect::<Result<Vec<_>>>()?;
    let start = init_approx(sys, u0, &config)?;
    let trajectory = evolve(sys, &start, *times.last().unwrap(), &config, times)?;
    let rearranged = trajectory
        .snapshots
        .iter()
        .map(|snap| {
            families
                .iter()
                .map(|&i| odd_rearrangement(&snap.positive_fan_measure(i)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayRun {
        trajectory,
        initial_profiles,
        rearranged,
        times: times.to_vec(),
        families: families.to_vec(),
        initial_strength: glimm_v(&d0),
        delta,
        c0,
    })
}

impl DecayRun {
    pub fn default_tolerance(&self) -> f64 {
        1e-8 + 2.0 * self.delta * self.initial_strength
    }

    pub fn report(&self, kappa: f64, tolerance: Option<f64>) -> Result<DecayReport> {
        let tolerance = tolerance.unwrap_or_else(|| self.default_tolerance());
        if !(tolerance >= 0.0) {
            return Err(Error::param("tolerance", format!("must be >= 0, got {tolerance}")));
        }
        let events = &self.trajectory.events;
        let comparisons = self
            .initial_profiles
            .iter()
            .map(|w0| solve_impulsive_series(w0, events, kappa, &self.times))
            .collect::<Result<Vec<_>>>()?;
        let mut per_time = Vec::with_capacity(self.times.len() * self.families.len());
        for (k, &t) in self.times.iter().enumerate() {
            for (j, &i) in self.families.iter().enumerate() {
                let v = &self.rearranged[k][j];
                let w = &comparisons[j][k];
                let c = profile_leq(v, w);
                per_time.push(TimeCheck {
                    t,
                    family: i + 1,
                    margin: c.margin,
                    at: c.at,
                    holds: c.margin >= -tolerance,
                    rearranged: v.clone(),
                    comparison: w.clone(),
                });
            }
        }
        let q_series = self
            .trajectory
            .samples
            .iter()
            .map(|s| QSample { t: s.t, v: s.v, q: s.q, upsilon: s.v + self.c0 * s.q })
            .collect();
        Ok(DecayReport {
            per_time,
            kappa_used: kappa,
            c0_used: self.c0,
            delta_used: self.delta,
            tolerance,
            q_series,
            events: events.len(),
        })
    }
}

/// Runs the full check for the zero-based `families` at the given times.
pub fn verify_decay(
    sys: &HyperbolicSystem,
    u0: &PiecewiseConstantFn,
    families: &[usize],
    times: &[f64],
    config: &VerifyConfig,
) -> Result<DecayReport> {
    prepare(sys, u0, families, times, config.delta, config.c0)?.report(config.kappa, config.tolerance)
}

/// Smallest margin over all checks, for each `κ`; the simulation is shared.
pub fn kappa_sweep(run: &DecayRun, kappas: &[f64], tolerance: Option<f64>) -> Result<Vec<(f64, f64)>> {
    if kappas.is_empty() {
        return Err(Error::param("kappa_range", "needs at least one value"));
    }
    kappas
        .iter()
        .map(|&k| Ok((k, run.report(k, tolerance)?.min_margin())))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OleinikPoint {
    pub t: f64,
    pub max_density: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Largest positive-jump density `strength/gap` over neighbouring
/// rarefaction fronts, against the bound `1/t`.
pub fn oleinik_check(traj: &Trajectory, times: &[f64], tolerance: f64) -> Result<Vec<OleinikPoint>> {
    if traj.families != 1 {
        return Err(Error::NotScalar(traj.families));
    }
    check_times(times)?;
    times
        .iter()
        .map(|&t| {
            let st = traj.state_at(t)?;
            let max_density = st
                .fronts()
                .windows(2)
                .filter(|w| w[0].strength > 0.0 && w[1].strength > 0.0)
                .map(|w| w[1].strength / (w[1].position(t) - w[0].position(t)))
                .fold(0.0, f64::max);
            let bound = 1.0 / t;
            Ok(OleinikPoint { t, max_density, bound, holds: max_density <= bound + tolerance })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Region;

    fn burgers() -> HyperbolicSystem {
        HyperbolicSystem::burgers()
            .with_region(Region::new(vec![0.0], 2.0, 2.0).unwrap())
            .unwrap()
    }

    #[test]
    fn centered_fan_is_sharp() {
        let u0 = PiecewiseConstantFn::new(vec![0.0], vec![vec![0.0], vec![1.0]]).unwrap();
        let cfg = VerifyConfig { delta: 0.01, ..Default::default() };
        let r = verify_decay(&burgers(), &u0, &[0], &[0.5, 1.0, 2.0], &cfg).unwrap();
        assert!(r.all_hold());
        for c in &r.per_time {
            assert!(c.margin.abs() < 1e-12, "margin {} at t = {}", c.margin, c.t);
        }
    }

    #[test]
    fn nonpositive_jumps_hold_with_plateau_margin() {
        let u0 = PiecewiseConstantFn::new(vec![0.0, 1.0], vec![vec![1.0], vec![0.5], vec![0.0]]).unwrap();
        let cfg = VerifyConfig { delta: 0.1, kappa: 3.0, ..Default::default() };
        let r = verify_decay(&burgers(), &u0, &[0], &[1.0, 2.0, 3.0], &cfg).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.per_time[0].margin, 0.0);
        // both shocks count each other, so Q drops by 0.5 at t = 2; right at
        // the impulse the margin is the whole plateau, afterwards the origin
        // jump has opened into a fan
        assert!((r.per_time[1].margin - 1.5).abs() < 1e-12);
        assert_eq!(r.per_time[2].margin, 0.0);
        assert!((r.per_time[2].comparison.plateau() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn oleinik_on_fan() {
        let sys = burgers();
        let cfg = TrackingConfig::new(0.05).unwrap();
        let u0 = PiecewiseConstantFn::new(vec![0.0], vec![vec![0.0], vec![1.0]]).unwrap();
        let traj = evolve(&sys, &init_approx(&sys, &u0, &cfg).unwrap(), 10.0, &cfg, &[]).unwrap();
        let pts = oleinik_check(&traj, &[0.5, 2.0, 10.0], 1e-12).unwrap();
        for p in &pts {
            assert!(p.holds);
            assert!((p.max_density - p.bound).abs() < 1e-9);
        }
    }

    #[test]
    fn bad_times_rejected() {
        let u0 = PiecewiseConstantFn::constant(vec![0.0]).unwrap();
        let cfg = VerifyConfig::default();
        assert!(verify_decay(&burgers(), &u0, &[0], &[], &cfg).is_err());
        assert!(verify_decay(&burgers(), &u0, &[0], &[1.0, 0.5], &cfg).is_err());
        assert!(verify_decay(&burgers(), &u0, &[1], &[1.0], &cfg).is_err());
    }
}
