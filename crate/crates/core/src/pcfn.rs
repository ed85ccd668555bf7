use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::State;

/// Vector-valued step function with finitely many jumps.
///
/// `values[k]` holds on `[breaks[k-1], breaks[k])`, with `values[0]` extending
/// to `−∞` and the last value to `+∞`. The function is right-continuous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PcfnRepr", into = "PcfnRepr")]
pub struct PiecewiseConstantFn {
    breaks: Vec<f64>,
    values: Vec<State>,
}

#[derive(Serialize, Deserialize)]
struct PcfnRepr {
    breaks: Vec<f64>,
    values: Vec<StateRepr>,
}

/// Scalar states may be written as bare numbers.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StateRepr {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl TryFrom<PcfnRepr> for PiecewiseConstantFn {
    type Error = Error;

    fn try_from(r: PcfnRepr) -> Result<Self> {
        let values = r
            .values
            .into_iter()
            .map(|s| match s {
                StateRepr::Scalar(x) => vec![x],
                StateRepr::Vector(v) => v,
            })
            .collect();
        PiecewiseConstantFn::new(r.breaks, values)
    }
}

impl From<PiecewiseConstantFn> for PcfnRepr {
    fn from(f: PiecewiseConstantFn) -> Self {
        PcfnRepr {
            breaks: f.breaks,
            values: f.values.into_iter().map(StateRepr::Vector).collect(),
        }
    }
}

/// One discontinuity: position and the one-sided limits.
#[derive(Clone, Copy, Debug)]
pub struct Jump<'a> {
    pub x: f64,
    pub left: &'a [f64],
    pub right: &'a [f64],
}

impl PiecewiseConstantFn {
    pub fn new(breaks: Vec<f64>, values: Vec<State>) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("piecewise-constant data: {msg}"));
        if values.len() != breaks.len() + 1 {
            return Err(bad(format!(
                "{} breaks need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        if breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("breaks must be finite and strictly increasing".into()));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(bad("values must be finite vectors of equal length".into()));
        }
        Ok(Self { breaks, values })
    }

    pub fn constant(value: State) -> Result<Self> {
        Self::new(Vec::new(), vec![value])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[State] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn value_at(&self, x: f64) -> &[f64] {
        let k = self.breaks.partition_point(|&b| b <= x);
        &self.values[k]
    }

    pub fn jumps(&self) -> impl Iterator<Item = Jump<'_>> + '_ {
        self.breaks.iter().enumerate().map(move |(k, &x)| Jump {
            x,
            left: &self.values[k],
            right: &self.values[k + 1],
        })
    }

    /// `Σ |u(x+) − u(x−)|₁` over all jumps.
    pub fn total_variation(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .sum()
    }
}
