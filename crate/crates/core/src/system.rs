//! Strictly hyperbolic, genuinely nonlinear systems with one or two equations.
//!
//! Eigenvectors are normalized so that `∇λ_i · r_i = 1` and `l_i · r_j = δ_ij`.
//! With that normalization the strength of an `i`-wave is the jump of `λ_i`
//! across it, and the forward wave curves below are parametrized directly by
//! strength: positive values follow the rarefaction (integral) curve, negative
//! values the admissible branch of the Hugoniot locus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type State = Vec<f64>;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

impl WaveKind {
    pub fn of_strength(sigma: f64) -> Self {
        if sigma < 0.0 {
            WaveKind::Shock
        } else {
            WaveKind::Rarefaction
        }
    }
}

/// Eigenvalue with its normalized right and left eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigen {
    pub lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    /// `u_t + (u²/2)_x = 0`.
    Burgers,
    /// `v_t − u_x = 0`, `u_t + p(v)_x = 0` with `p(v) = k·v^(−γ)`; state `(v, u)`.
    PSystem { gamma: f64, k: f64 },
}

/// Box around a reference state plus a budget on the total wave strength.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub center: State,
    pub radius: f64,
    pub tv_budget: f64,
}

impl Region {
    pub const DEFAULT_TV_BUDGET: f64 = 0.3;

    pub fn new(center: State, radius: f64, tv_budget: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::param("radius", format!("must be > 0, got {radius}")));
        }
        if !(tv_budget > 0.0) {
            return Err(Error::param("tv_budget", format!("must be > 0, got {tv_budget}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("ref_state", "must be finite"));
        }
        Ok(Self { center, radius, tv_budget })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicSystem {
    model: Model,
    region: Region,
}

/// One elementary wave of a Riemann fan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wave {
    pub strength: f64,
    pub kind: WaveKind,
    /// Shock: both entries equal the Rankine–Hugoniot speed. Rarefaction:
    /// characteristic speeds at the left and right edge.
    pub speeds: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiemannFan {
    /// `ω_0 = u⁻, ω_1, …, ω_n = u⁺`.
    pub states: Vec<State>,
    pub waves: Vec<Wave>,
}

impl RiemannFan {
    pub fn strengths(&self) -> Vec<f64> {
        self.waves.iter().map(|w| w.strength).collect()
    }
}

impl HyperbolicSystem {
    /// Scalar Burgers' equation; `λ(u) = u`, `l = r = 1`.
    pub fn burgers() -> Self {
        Self {
            model: Model::Burgers,
            region: Region {
                center: vec![0.0],
                radius: 2.0,
                tv_budget: Region::DEFAULT_TV_BUDGET,
            },
        }
    }

    /// Isentropic γ-law p-system around the reference state `(v, u) = (1, 0)`.
    pub fn p_system(gamma: f64, k: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::param("gamma", format!("must be > 1, got {gamma}")));
        }
        if !(k > 0.0) {
            return Err(Error::param("k", format!("must be > 0, got {k}")));
        }
        Ok(Self {
            model: Model::PSystem { gamma, k },
            region: Region {
                center: vec![1.0, 0.0],
                radius: 0.5,
                tv_budget: Region::DEFAULT_TV_BUDGET,
            },
        })
    }

    pub fn with_region(mut self, region: Region) -> Result<Self> {
        if region.center.len() != self.n() {
            return Err(Error::param(
                "ref_state",
                format!("expected {} components, got {}", self.n(), region.center.len()),
            ));
        }
        if let Model::PSystem { .. } = self.model {
            if region.center[0] - region.radius <= 0.0 {
                return Err(Error::param("radius", "p-system region must keep v > 0"));
            }
        }
        self.region = region;
        Ok(self)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn n(&self) -> usize {
        match self.model {
            Model::Burgers => 1,
            Model::PSystem { .. } => 2,
        }
    }

    pub fn check_admissible(&self, u: &[f64]) -> Result<()> {
        let reject = |reason: String| Error::NonAdmissibleState {
            state: u.to_vec(),
            reason,
        };
        if u.len() != self.n() {
            return Err(reject(format!("expected {} components", self.n())));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(reject("non-finite component".into()));
        }
        if let Model::PSystem { .. } = self.model {
            if u[0] <= 0.0 {
                return Err(reject("specific volume must be positive".into()));
            }
        }
        let dist = u
            .iter()
            .zip(&self.region.center)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dist > self.region.radius {
            return Err(reject(format!(
                "distance {dist} from reference state exceeds radius {}",
                self.region.radius
            )));
        }
        Ok(())
    }

    pub fn flux(&self, u: &[f64]) -> State {
        match self.model {
            Model::Burgers => vec![0.5 * u[0] * u[0]],
            Model::PSystem { gamma, k } => vec![-u[1], k * u[0].powf(-gamma)],
        }
    }

    /// Sound speed `c(v) = sqrt(−p'(v))`.
    fn sound_speed(gamma: f64, k: f64, v: f64) -> f64 {
        (k * gamma * v.powf(-gamma - 1.0)).sqrt()
    }

    /// Characteristic speed `λ_i(u)`, `i` zero-based.
    pub fn lambda(&self, i: usize, u: &[f64]) -> f64 {
        match self.model {
            Model::Burgers => u[0],
            Model::PSystem { gamma, k } => {
                let c = Self::sound_speed(gamma, k, u[0]);
                if i == 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    pub fn eigen(&self, u: &[f64]) -> Vec<Eigen> {
        match self.model {
            Model::Burgers => vec![Eigen {
                lambda: u[0],
                right: vec![1.0],
                left: vec![1.0],
            }],
            Model::PSystem { gamma, k } => {
                let v = u[0];
                let c = Self::sound_speed(gamma, k, v);
                // c'(v) < 0
                let dc = -(gamma + 1.0) / (2.0 * v) * c;
                let lf = -dc / (2.0 * c);
                vec![
                    Eigen {
                        lambda: -c,
                        right: vec![1.0 / -dc, c / -dc],
                        left: vec![lf * c, lf],
                    },
                    Eigen {
                        lambda: c,
                        right: vec![1.0 / dc, -c / dc],
                        left: vec![-lf * c, lf],
                    },
                ]
            }
        }
    }

    /// State reached from `u` along the forward `i`-wave curve with strength `sigma`.
    pub fn wave_curve(&self, i: usize, u: &[f64], sigma: f64) -> Result<State> {
        match self.model {
            Model::Burgers => Ok(vec![u[0] + sigma]),
            Model::PSystem { gamma, k } => {
                let kg = k * gamma;
                let (v, vel) = (u[0], u[1]);
                let c = Self::sound_speed(gamma, k, v);
                let c_new = if i == 0 { c - sigma } else { c + sigma };
                if !(c_new > 0.0) {
                    return Err(Error::NonAdmissibleState {
                        state: u.to_vec(),
                        reason: format!("wave of strength {sigma} in family {} reaches vacuum", i + 1),
                    });
                }
                let v_new = (c_new / kg.sqrt()).powf(-2.0 / (gamma + 1.0));
                let vel_new = if sigma >= 0.0 {
                    // ∫ c dv along the integral curve of r_i
                    let g = |v: f64| 2.0 * kg.sqrt() / (1.0 - gamma) * v.powf((1.0 - gamma) / 2.0);
                    let du = g(v_new) - g(v);
                    if i == 0 {
                        vel + du
                    } else {
                        vel - du
                    }
                } else {
                    let dp = k * v_new.powf(-gamma) - k * v.powf(-gamma);
                    vel - (-(dp * (v_new - v))).max(0.0).sqrt()
                };
                Ok(vec![v_new, vel_new])
            }
        }
    }

    /// Rankine–Hugoniot speed of a discontinuity joining `ul` to `ur`.
    pub fn shock_speed(&self, i: usize, ul: &[f64], ur: &[f64]) -> f64 {
        match self.model {
            Model::Burgers => 0.5 * (ul[0] + ur[0]),
            Model::PSystem { .. } => {
                let dv = ur[0] - ul[0];
                if dv == 0.0 {
                    self.lambda(i, ul)
                } else {
                    -(ur[1] - ul[1]) / dv
                }
            }
        }
    }

    fn compose(&self, ul: &[f64], sigmas: &[f64]) -> Result<Vec<State>> {
        let mut states = Vec::with_capacity(sigmas.len() + 1);
        states.push(ul.to_vec());
        for (i, &s) in sigmas.iter().enumerate() {
            let next = self.wave_curve(i, states.last().unwrap(), s)?;
            states.push(next);
        }
        Ok(states)
    }

    /// Solves the Riemann problem with data `ul`, `ur`.
    pub fn riemann_solve(&self, ul: &[f64], ur: &[f64]) -> Result<RiemannFan> {
        self.check_admissible(ul)?;
        self.check_admissible(ur)?;
        let sigmas = match self.model {
            Model::Burgers => vec![ur[0] - ul[0]],
            Model::PSystem { .. } => self.newton_strengths(ul, ur)?,
        };
        let mut states = self.compose(ul, &sigmas)?;
        *states.last_mut().unwrap() = ur.to_vec();
        let waves = (0..self.n())
            .map(|i| {
                let (a, b) = (&states[i], &states[i + 1]);
                let strength = self.lambda(i, b) - self.lambda(i, a);
                let kind = WaveKind::of_strength(strength);
                let speeds = match kind {
                    WaveKind::Shock => {
                        let s = self.shock_speed(i, a, b);
                        (s, s)
                    }
                    WaveKind::Rarefaction => (self.lambda(i, a), self.lambda(i, b)),
                };
                Wave { strength, kind, speeds }
            })
            .collect();
        Ok(RiemannFan { states, waves })
    }

    fn newton_strengths(&self, ul: &[f64], ur: &[f64]) -> Result<Vec<f64>> {
        let residual = |s: &[f64]| -> Result<[f64; 2]> {
            let end = self.compose(ul, s)?.pop().unwrap();
            Ok([end[0] - ur[0], end[1] - ur[1]])
        };
        let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());

        let mid: Vec<f64> = ul.iter().zip(ur).map(|(a, b)| 0.5 * (a + b)).collect();
        let jump = [ur[0] - ul[0], ur[1] - ul[1]];
        let mut sig: Vec<f64> = self
            .eigen(&mid)
            .iter()
            .map(|e| e.left[0] * jump[0] + e.left[1] * jump[1])
            .collect();
        let mut r = residual(&sig)?;
        let mut it = 0;
        while norm(&r) > 0.01 * NEWTON_TOL && it < NEWTON_MAX_ITER {
            it += 1;
            let mut jac = [[0.0; 2]; 2];
            for j in 0..2 {
                let h = 1e-7 * sig[j].abs().max(1e-3);
                let mut sp = sig.clone();
                let mut sm = sig.clone();
                sp[j] += h;
                sm[j] -= h;
                let (rp, rm) = (residual(&sp)?, residual(&sm)?);
                for row in 0..2 {
                    jac[row][j] = (rp[row] - rm[row]) / (2.0 * h);
                }
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let step = [
                (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
                (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
            ];
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial = vec![sig[0] - t * step[0], sig[1] - t * step[1]];
                if let Ok(rt) = residual(&trial) {
                    if norm(&rt) < norm(&r) {
                        sig = trial;
                        r = rt;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if norm(&r) <= NEWTON_TOL {
            Ok(sig)
        } else {
            Err(Error::NoConvergence {
                iterations: it,
                residual: norm(&r),
            })
        }
    }

    /// Largest deviation from `∇λ_i·r_i = 1` and `l_i·r_j = δ_ij` at `u`,
    /// with `∇λ_i` from central differences.
    pub fn normalization_residual(&self, u: &[f64]) -> f64 {
        let eig = self.eigen(u);
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut grad_dot_r = 0.0;
            for j in 0..n {
                let h = 1e-5 * u[j].abs().max(1.0);
                let mut up = u.to_vec();
                let mut um = u.to_vec();
                up[j] += h;
                um[j] -= h;
                let d = (self.lambda(i, &up) - self.lambda(i, &um)) / (2.0 * h);
                grad_dot_r += d * eig[i].right[j];
            }
            worst = worst.max((grad_dot_r - 1.0).abs());
            for (j, ej) in eig.iter().enumerate() {
                let dot: f64 = eig[i].left.iter().zip(&ej.right).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `min_i (λ_{i+1} − λ_i)` at `u`; infinite for scalar laws.
    pub fn spectral_gap(&self, u: &[f64]) -> f64 {
        let eig = self.eigen(u);
        eig.windows(2)
            .map(|w| w[1].lambda - w[0].lambda)
            .fold(f64::INFINITY, f64::min)
    }
}
