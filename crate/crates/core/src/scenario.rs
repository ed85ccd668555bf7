//! JSON scenario files, pipeline runners and artifact export.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::LineMeasure;
use crate::pcfn::PiecewiseConstantFn;
use crate::profile::OddConcaveProfile;
use crate::rearrange::odd_rearrangement;
use crate::system::{HyperbolicSystem, Region, State};
use crate::tracking::{evolve, init_approx, TrackingConfig, Trajectory};
use crate::verify::{kappa_sweep, prepare, DecayReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Burgers,
    PSystem { gamma: f64, k: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub center: State,
    pub radius: f64,
    pub tv_budget: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomInitial {
    /// Number of constant pieces.
    pub pieces: usize,
    /// Total variation `Σ|Δu|₁` of the drawn data.
    pub tv: f64,
    pub span: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Random { random: RandomInitial },
    Explicit(PiecewiseConstantFn),
}

impl<'de> Deserialize<'de> for InitialSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(d)?;
        let parsed = if value.get("random").is_some() {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Wrapper {
                random: RandomInitial,
            }
            serde_json::from_value::<Wrapper>(value).map(|w| InitialSpec::Random { random: w.random })
        } else {
            serde_json::from_value(value).map(InitialSpec::Explicit)
        };
        parsed.map_err(|e| D::Error::custom(format!("initial: {e}")))
    }
}

fn default_kappa() -> f64 {
    20.0
}
fn default_c0() -> f64 {
    10.0
}
fn default_delta() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    pub system: SystemSpec,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    pub initial: InitialSpec,
    /// One-based family; all families when absent.
    #[serde(default)]
    pub family: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default)]
    pub tolerance: Option<f64>,
    pub times: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.schema != SCHEMA_VERSION {
            return cfg(format!("schema: unsupported version {}, expected {SCHEMA_VERSION}", self.schema));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return cfg(format!("delta: must be > 0, got {}", self.delta));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return cfg(format!("kappa: must be >= 0, got {}", self.kappa));
        }
        if !(self.c0 >= 0.0) || !self.c0.is_finite() {
            return cfg(format!("c0: must be >= 0, got {}", self.c0));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return cfg(format!("tolerance: must be >= 0, got {t}"));
            }
        }
        if self.times.is_empty()
            || self.times.iter().any(|t| !(*t > 0.0) || !t.is_finite())
            || self.times.windows(2).any(|w| w[1] <= w[0])
        {
            return cfg("times: must be a nonempty, strictly increasing list of positive times".into());
        }
        let n = self.system()?.n();
        if let Some(i) = self.family {
            if i == 0 || i > n {
                return cfg(format!("family: must be between 1 and {n}, got {i}"));
            }
        }
        if let InitialSpec::Random { random } = &self.initial {
            if random.pieces == 0 || !(random.tv >= 0.0) || !(random.span.1 > random.span.0) {
                return cfg("initial.random: needs pieces >= 1, tv >= 0 and span lo < hi".into());
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<HyperbolicSystem> {
        let sys = match self.system {
            SystemSpec::Burgers => HyperbolicSystem::burgers(),
            SystemSpec::PSystem { gamma, k } => HyperbolicSystem::p_system(gamma, k)
                .map_err(|e| Error::Config(format!("system: {e}")))?,
        };
        match &self.region {
            None => Ok(sys),
            Some(r) => {
                let region = Region::new(r.center.clone(), r.radius, r.tv_budget)
                    .map_err(|e| Error::Config(format!("region: {e}")))?;
                sys.with_region(region).map_err(|e| Error::Config(format!("region: {e}")))
            }
        }
    }

    /// Zero-based families to check.
    pub fn families(&self) -> Result<Vec<usize>> {
        Ok(match self.family {
            Some(i) => vec![i - 1],
            None => (0..self.system()?.n()).collect(),
        })
    }

    pub fn initial_data(&self) -> Result<PiecewiseConstantFn> {
        match &self.initial {
            InitialSpec::Explicit(u) => Ok(u.clone()),
            InitialSpec::Random { random } => {
                let sys = self.system()?;
                random_initial(&sys.region().center, random, self.seed)
            }
        }
    }

    /// Copy with `κ`, `δ`, times or seed overridden.
    pub fn with_overrides(
        &self,
        kappa: Option<f64>,
        delta: Option<f64>,
        times: Option<Vec<f64>>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let mut s = self.clone();
        if let Some(k) = kappa {
            s.kappa = k;
        }
        if let Some(d) = delta {
            s.delta = d;
        }
        if let Some(t) = times {
            s.times = t;
        }
        if let Some(seed) = seed {
            s.seed = seed;
        }
        s.validate()?;
        Ok(s)
    }
}

/// Step data around `center` with uniformly placed jumps whose sizes add up to `tv`.
pub fn random_initial(center: &[f64], spec: &RandomInitial, seed: u64) -> Result<PiecewiseConstantFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jumps = spec.pieces - 1;
    let mut breaks: Vec<f64> = (0..jumps).map(|_| rng.gen_range(spec.span.0..spec.span.1)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let deltas: Vec<State> = (0..breaks.len())
        .map(|_| center.iter().map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let total: f64 = deltas.iter().flatten().map(|d: &f64| d.abs()).sum();
    let scale = if total > 0.0 { spec.tv / total } else { 0.0 };
    // start half a jump budget below the center so the data stay near it
    let mut values = vec![center.to_vec()];
    for d in &deltas {
        let prev = values.last().unwrap();
        values.push(prev.iter().zip(d).map(|(p, d)| p + scale * d).collect());
    }
    let n = values.len() as f64;
    let mean: State = (0..center.len())
        .map(|c| values.iter().map(|v| v[c]).sum::<f64>() / n - center[c])
        .collect();
    for v in &mut values {
        for (x, m) in v.iter_mut().zip(&mean) {
            *x -= m;
        }
    }
    PiecewiseConstantFn::new(breaks, values)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

pub fn margins_csv(report: &DecayReport) -> Result<Vec<u8>> {
    csv_bytes(
        &["t", "family", "margin", "holds"],
        report
            .per_time
            .iter()
            .map(|c| vec![num(c.t), c.family.to_string(), num(c.margin), c.holds.to_string()]),
    )
}

fn profile_rows(t: f64, family: usize, kind: &str, p: &OddConcaveProfile, grid: &[f64]) -> Vec<Vec<String>> {
    let mut xs: Vec<(f64, f64)> = p.graph();
    xs.extend(grid.iter().map(|&x| (x, p.value(x))));
    xs.sort_by(|a, b| a.0.total_cmp(&b.0));
    xs.into_iter()
        .map(|(x, v)| vec![num(t), family.to_string(), kind.to_string(), num(x), num(v)])
        .collect()
}

/// Both profiles of every check at their breakpoints plus a uniform grid.
pub fn profiles_csv(report: &DecayReport, grid_points: usize) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for c in &report.per_time {
        let reach = c
            .rearranged
            .points()
            .iter()
            .chain(c.comparison.points())
            .map(|p| p.0)
            .fold(1.0, f64::max)
            * 1.25;
        let grid: Vec<f64> = (0..grid_points)
            .map(|k| -reach + 2.0 * reach * k as f64 / (grid_points.max(2) - 1) as f64)
            .filter(|x| *x != 0.0)
            .collect();
        rows.extend(profile_rows(c.t, c.family, "rearranged", &c.rearranged, &grid));
        rows.extend(profile_rows(c.t, c.family, "comparison", &c.comparison, &grid));
    }
    csv_bytes(&["t", "family", "profile", "x", "w"], rows)
}

pub fn q_series_csv(report: &DecayReport) -> Result<Vec<u8>> {
    csv_bytes(
        &["t", "V", "Q", "upsilon"],
        report
            .q_series
            .iter()
            .map(|s| vec![num(s.t), num(s.v), num(s.q), num(s.upsilon)]),
    )
}

pub fn events_csv(traj: &Trajectory, c0: f64) -> Result<Vec<u8>> {
    csv_bytes(
        &["t", "x", "families", "dQ", "Q_before", "Q_after", "V_before", "V_after", "dUpsilon"],
        traj.events.records().iter().map(|e| {
            let fam = e.families.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
            vec![
                num(e.t),
                num(e.x),
                fam,
                num(e.dq),
                num(e.q_before),
                num(e.q_after),
                num(e.v_before),
                num(e.v_after),
                num(e.d_upsilon(c0)),
            ]
        }),
    )
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// Runs the decay check and, when `out` is given, writes `report.json`,
/// `margins.csv`, `profiles.csv` and `q_series.csv` there.
pub fn run_verify(scenario: &Scenario, out: Option<&Path>) -> Result<DecayReport> {
    let sys = scenario.system()?;
    let u0 = scenario.initial_data()?;
    let run = prepare(&sys, &u0, &scenario.families()?, &scenario.times, scenario.delta, scenario.c0)?;
    let report = run.report(scenario.kappa, scenario.tolerance)?;
    if let Some(dir) = out {
        write_atomic(&dir.join("report.json"), &json_bytes(&report)?)?;
        write_atomic(&dir.join("margins.csv"), &margins_csv(&report)?)?;
        write_atomic(&dir.join("profiles.csv"), &profiles_csv(&report, 101)?)?;
        write_atomic(&dir.join("q_series.csv"), &q_series_csv(&report)?)?;
    }
    Ok(report)
}

/// `(κ, min margin)` for each `κ`, written to `sweep.csv` when `out` is given.
pub fn run_sweep(scenario: &Scenario, kappas: &[f64], out: Option<&Path>) -> Result<Vec<(f64, f64)>> {
    if kappas.is_empty() {
        return Err(Error::Config("kappa_range: needs at least one value".into()));
    }
    if kappas.iter().any(|k| !(*k >= 0.0) || !k.is_finite()) {
        return Err(Error::Config("kappa_range: values must be finite and >= 0".into()));
    }
    let sys = scenario.system()?;
    let u0 = scenario.initial_data()?;
    let run = prepare(&sys, &u0, &scenario.families()?, &scenario.times, scenario.delta, scenario.c0)?;
    let rows = kappa_sweep(&run, kappas, scenario.tolerance)?;
    if let Some(dir) = out {
        let bytes = csv_bytes(&["kappa", "min_margin"], rows.iter().map(|(k, m)| vec![num(*k), num(*m)]))?;
        write_atomic(&dir.join("sweep.csv"), &bytes)?;
    }
    Ok(rows)
}

/// Parses `"a:b:n"` (inclusive, `n` points) or `"k1,k2,…"`.
pub fn parse_kappa_range(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("kappa_range: cannot parse {text:?}"));
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Config("kappa_range: needs at least one value".into()));
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return match n {
            0 => Err(Error::Config("kappa_range: needs at least one value".into())),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
        };
    }
    parse_list(text).map_err(|_| bad())
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("not a number: {s:?}"))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
struct SnapshotLine<'a> {
    t: f64,
    fronts: usize,
    v: f64,
    q: f64,
    solution: &'a PiecewiseConstantFn,
}

/// Tracks the scenario to its last time. Writes `trajectory.jsonl` (one
/// snapshot per output time) and `events.csv` when `out` is given.
pub fn simulate(scenario: &Scenario, out: Option<&Path>) -> Result<Trajectory> {
    let sys = scenario.system()?;
    let u0 = scenario.initial_data()?;
    let config = TrackingConfig::new(scenario.delta)?;
    let start = init_approx(&sys, &u0, &config)?;
    let traj = evolve(&sys, &start, *scenario.times.last().unwrap(), &config, &scenario.times)?;
    if let Some(dir) = out {
        let mut lines = String::new();
        for (snap, sample) in traj.snapshots.iter().zip(&traj.samples) {
            let u = snap.to_pcfn()?;
            let line = SnapshotLine { t: sample.t, fronts: snap.fronts().len(), v: sample.v, q: sample.q, solution: &u };
            let json = serde_json::to_string(&line).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(lines, "{json}").expect("writing to a string");
        }
        write_atomic(&dir.join("trajectory.jsonl"), lines.as_bytes())?;
        write_atomic(&dir.join("events.csv"), &events_csv(&traj, scenario.c0)?)?;
    }
    Ok(traj)
}

/// Odd rearrangement of a positive measure given as JSON.
pub fn rearrange_json(measure_json: &str) -> Result<OddConcaveProfile> {
    let m: LineMeasure = serde_json::from_str(measure_json).map_err(|e| Error::Config(format!("measure: {e}")))?;
    odd_rearrangement(&m)
}

pub fn profile_csv(p: &OddConcaveProfile) -> Result<Vec<u8>> {
    csv_bytes(&["x", "w"], p.graph().into_iter().map(|(x, v)| vec![num(x), num(v)]))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    json_bytes(value)
}
