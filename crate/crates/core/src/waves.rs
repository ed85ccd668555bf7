//! Wave measures `μⁱ` of piecewise-constant states and the Glimm functionals.
//!
//! For a step function every `μⁱ` is purely atomic: at each jump the atom of
//! family `i` is the strength `σ_i` of the `i`-wave in the Riemann fan.
//!
//! The interaction potential counts, for `i < j`, every `j`-wave lying
//! strictly to the left of an `i`-wave, and for each family every ordered pair
//! (negative atom, any atom) at distinct positions, both weighted by the
//! product of absolute strengths.

use crate::error::Result;
use crate::measure::LineMeasure;
use crate::pcfn::PiecewiseConstantFn;
use crate::system::HyperbolicSystem;

#[derive(Clone, Debug, PartialEq)]
pub struct WaveDecomposition {
    per_family: Vec<LineMeasure>,
}

impl WaveDecomposition {
    pub fn new(per_family: Vec<LineMeasure>) -> Self {
        Self { per_family }
    }

    pub fn families(&self) -> usize {
        self.per_family.len()
    }

    /// `μⁱ` for zero-based family `i`.
    pub fn family(&self, i: usize) -> &LineMeasure {
        &self.per_family[i]
    }

    pub fn per_family(&self) -> &[LineMeasure] {
        &self.per_family
    }
}

/// Wave in an ordered list; `key` encodes spatial order, equal keys mean the
/// same position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyedWave {
    pub key: f64,
    pub family: usize,
    pub strength: f64,
}

pub fn wave_measures(sys: &HyperbolicSystem, u: &PiecewiseConstantFn) -> Result<WaveDecomposition> {
    let n = sys.n();
    let mut atoms: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    for jump in u.jumps() {
        let fan = sys.riemann_solve(jump.left, jump.right)?;
        for (i, w) in fan.waves.iter().enumerate() {
            atoms[i].push((jump.x, w.strength));
        }
    }
    let per_family = atoms
        .into_iter()
        .map(LineMeasure::from_atoms)
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveDecomposition { per_family })
}

/// `V = Σ_i |μⁱ|(ℝ)`.
pub fn glimm_v(d: &WaveDecomposition) -> f64 {
    d.per_family.iter().map(LineMeasure::total_variation).sum()
}

/// Interaction potential of the atomic part of `d`.
pub fn glimm_q(d: &WaveDecomposition) -> f64 {
    let mut waves: Vec<KeyedWave> = d
        .per_family
        .iter()
        .enumerate()
        .flat_map(|(family, m)| {
            m.atoms().iter().map(move |a| KeyedWave {
                key: a.x,
                family,
                strength: a.mass,
            })
        })
        .collect();
    waves.sort_by(|a, b| a.key.total_cmp(&b.key));
    interaction_potential(&waves, d.families())
}

/// `Υ = V + C₀·Q`.
pub fn glimm_upsilon(d: &WaveDecomposition, c0: f64) -> f64 {
    glimm_v(d) + c0 * glimm_q(d)
}

/// Interaction potential of waves sorted by `key`, in `O(N·n²)`.
pub fn interaction_potential(waves: &[KeyedWave], families: usize) -> f64 {
    debug_assert!(waves.windows(2).all(|w| w[0].key <= w[1].key));
    let mut tv = vec![0.0; families];
    for w in waves {
        tv[w.family] += w.strength.abs();
    }

    let mut cross = 0.0;
    let mut same = 0.0;
    let mut left_of = vec![0.0; families];
    let mut group_tv = vec![0.0; families];
    let mut start = 0;
    while start < waves.len() {
        let key = waves[start].key;
        let end = start + waves[start..].iter().take_while(|w| w.key == key).count();
        let group = &waves[start..end];
        group_tv.iter_mut().for_each(|g| *g = 0.0);
        for w in group {
            group_tv[w.family] += w.strength.abs();
        }
        for w in group {
            let faster_left: f64 = left_of[w.family + 1..].iter().sum();
            cross += w.strength.abs() * faster_left;
            if w.strength < 0.0 {
                same += -w.strength * (tv[w.family] - group_tv[w.family]);
            }
        }
        for w in group {
            left_of[w.family] += w.strength.abs();
        }
        start = end;
    }
    cross + same
}
