//! Error sampling for Monte Carlo runs.
//!
//! Every shot draws from its own ChaCha8 stream: the generator is seeded
//! with the experiment seed and the stream number is the shot index, so a
//! shot's sample does not depend on which thread runs it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{CssCode, ErrorType};
use crate::error::{Error, Result};
use crate::gf2::BinVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseModel {
    /// X, Y or Z on each qubit with probability `p / 3` each.
    Depolarizing { p: f64 },
    IndependentXz { px: f64, pz: f64 },
    /// Depolarizing data noise plus independent syndrome bit flips.
    Phenomenological { p_data: f64, p_meas: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let ps: &[f64] = match self {
            NoiseModel::Depolarizing { p } => &[*p],
            NoiseModel::IndependentXz { px, pz } => &[*px, *pz],
            NoiseModel::Phenomenological { p_data, p_meas } => &[*p_data, *p_meas],
        };
        for &p in ps {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1)")));
            }
        }
        Ok(())
    }

    /// The headline physical error rate, as reported in result tables.
    pub fn nominal_p(&self) -> f64 {
        match *self {
            NoiseModel::Depolarizing { p } => p,
            NoiseModel::IndependentXz { px, .. } => px,
            NoiseModel::Phenomenological { p_data, .. } => p_data,
        }
    }

    /// Same model with its headline rate replaced. For the independent
    /// model both rates are set; for the phenomenological one only the data
    /// rate moves.
    pub fn with_p(&self, p: f64) -> Self {
        match *self {
            NoiseModel::Depolarizing { .. } => NoiseModel::Depolarizing { p },
            NoiseModel::IndependentXz { .. } => NoiseModel::IndependentXz { px: p, pz: p },
            NoiseModel::Phenomenological { p_meas, .. } => NoiseModel::Phenomenological { p_data: p, p_meas },
        }
    }

    /// Per-qubit probability of an error of type `t`.
    pub fn marginal(&self, t: ErrorType) -> f64 {
        match (*self, t) {
            (NoiseModel::Depolarizing { p }, _) => 2.0 * p / 3.0,
            (NoiseModel::IndependentXz { px, .. }, ErrorType::X) => px,
            (NoiseModel::IndependentXz { pz, .. }, ErrorType::Z) => pz,
            (NoiseModel::Phenomenological { p_data, .. }, _) => 2.0 * p_data / 3.0,
        }
    }

    pub fn measurement_flip_rate(&self) -> f64 {
        match *self {
            NoiseModel::Phenomenological { p_meas, .. } => p_meas,
            _ => 0.0,
        }
    }
}

/// Generator for one shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Data-qubit error `(ex, ez)` on `n` qubits.
pub fn sample_error(model: &NoiseModel, n: usize, rng: &mut impl Rng) -> (BinVector, BinVector) {
    let mut ex = Vec::new();
    let mut ez = Vec::new();
    match *model {
        NoiseModel::Depolarizing { p } | NoiseModel::Phenomenological { p_data: p, .. } => {
            for q in 0..n {
                let r: f64 = rng.random();
                if r < p {
                    // X, Y, Z in equal thirds of [0, p).
                    match (3.0 * r / p) as u32 {
                        0 => ex.push(q),
                        1 => {
                            ex.push(q);
                            ez.push(q);
                        }
                        _ => ez.push(q),
                    }
                }
            }
        }
        NoiseModel::IndependentXz { px, pz } => {
            for q in 0..n {
                if rng.random::<f64>() < px {
                    ex.push(q);
                }
                if rng.random::<f64>() < pz {
                    ez.push(q);
                }
            }
        }
    }
    (
        BinVector::new(n, ex).expect("indices in range"),
        BinVector::new(n, ez).expect("indices in range"),
    )
}

fn flips(len: usize, p: f64, rng: &mut impl Rng) -> BinVector {
    let support = (0..len).filter(|_| rng.random::<f64>() < p).collect();
    BinVector::new(len, support).expect("indices in range")
}

/// One shot: data errors and, for the phenomenological model, flips of the
/// measured syndrome bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorSample {
    pub ex: BinVector,
    pub ez: BinVector,
    /// Flips of the Z-check outcomes (the syndrome of `ex`).
    pub meas_flips_z_checks: Option<BinVector>,
    /// Flips of the X-check outcomes (the syndrome of `ez`).
    pub meas_flips_x_checks: Option<BinVector>,
}

impl ErrorSample {
    pub fn error(&self, t: ErrorType) -> &BinVector {
        match t {
            ErrorType::X => &self.ex,
            ErrorType::Z => &self.ez,
        }
    }

    /// Measured syndrome for errors of type `t`.
    pub fn syndrome(&self, code: &CssCode, t: ErrorType) -> Result<BinVector> {
        let s = code.checks_for(t).matvec(self.error(t))?;
        let flips = match t {
            ErrorType::X => &self.meas_flips_z_checks,
            ErrorType::Z => &self.meas_flips_x_checks,
        };
        match flips {
            Some(f) => s.xor(f),
            None => Ok(s),
        }
    }
}

pub fn sample_shot(model: &NoiseModel, code: &CssCode, rng: &mut impl Rng) -> ErrorSample {
    let (ex, ez) = sample_error(model, code.n, rng);
    let (mz, mx) = match *model {
        NoiseModel::Phenomenological { p_meas, .. } => (
            Some(flips(code.hz.rows(), p_meas, rng)),
            Some(flips(code.hx.rows(), p_meas, rng)),
        ),
        _ => (None, None),
    };
    ErrorSample {
        ex,
        ez,
        meas_flips_z_checks: mz,
        meas_flips_x_checks: mx,
    }
}
