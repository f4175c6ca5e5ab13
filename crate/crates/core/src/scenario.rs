//! Scenario files and coherence time series.
//!
//! A scenario file is TOML with four tables:
//!
//! ```toml
//! [initial]            # either angles ...
//! alpha = 1.0471975511965976
//! beta = 0.0
//! # ... or an explicit triple of [re, im] pairs:
//! # d_a = [0.5, 0.0]
//! # d_b = [0.8660254037844386, 0.0]
//! # d_c = [0.0, 0.0]
//!
//! [params]
//! gamma0 = 10.0
//! kappa = 1.0
//! delta = 20.0
//! theta = 1.0
//!
//! [strengths]          # optional; q defaults to p and qr to pr
//! p = 0.0
//! pr = 0.9
//!
//! [time_grid]
//! t_max = 10.0
//! num_points = 2000    # optional
//! ```

use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{AmplitudeVector, SystemParams};
use crate::error::{Error, Result};
use crate::measurement::{protocol_state, MeasurementStrengths};
use crate::state::{l1_coherence, DensityMatrix3};

pub const DEFAULT_NUM_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// `cos α |A⟩ + e^{iβ} sin α |B⟩`
    Angles {
        alpha: f64,
        beta: f64,
    },
    Explicit(AmplitudeVector),
}

impl InitialState {
    pub fn amplitudes(&self) -> AmplitudeVector {
        match *self {
            InitialState::Angles { alpha, beta } => AmplitudeVector::from_angles(alpha, beta),
            InitialState::Explicit(amp) => amp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub num_points: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, num_points: usize) -> Self {
        Self { t_max, num_points }
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_max * i as f64 / (self.num_points - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|i| self.time(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub initial: InitialState,
    pub params: SystemParams,
    pub strengths: MeasurementStrengths,
    pub time_grid: TimeGrid,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.strengths.validate()?;
        if let InitialState::Explicit(amp) = self.initial {
            if !amp.is_finite() || (amp.norm_sqr() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidScenario(format!(
                    "explicit initial state must be normalized, norm is {}",
                    amp.norm_sqr()
                )));
            }
        }
        let grid = self.time_grid;
        if !(grid.t_max.is_finite() && grid.t_max > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "t_max must be positive, got {}",
                grid.t_max
            )));
        }
        if grid.num_points < 2 {
            return Err(Error::InvalidScenario(format!(
                "num_points must be at least 2, got {}",
                grid.num_points
            )));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&ScenarioFile::from(self)).expect("scenario serializes to TOML")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub t: f64,
    pub xi: f64,
    pub rho: DensityMatrix3,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoherenceSeries {
    pub points: Vec<SeriesPoint>,
}

impl CoherenceSeries {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn coherence(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.xi).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Conditioned state and ℓ1 coherence at every grid time.
pub fn run_scenario(s: &Scenario) -> Result<CoherenceSeries> {
    s.validate()?;
    let initial = s.initial.amplitudes();
    let points = (0..s.time_grid.num_points)
        .into_par_iter()
        .map(|i| {
            let t = s.time_grid.time(i);
            let rho = protocol_state(&initial, &s.params, &s.strengths, t)?;
            Ok(SeriesPoint {
                t,
                xi: l1_coherence(&rho),
                rho,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceSeries { points })
}

// On-disk representation.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    initial: InitialFile,
    params: ParamsFile,
    #[serde(default)]
    strengths: StrengthsFile,
    time_grid: TimeGridFile,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_a: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_b: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_c: Option<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    gamma0: f64,
    kappa: f64,
    #[serde(default)]
    delta: f64,
    #[serde(default)]
    theta: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrengthsFile {
    #[serde(default)]
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(default)]
    pr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    qr: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeGridFile {
    t_max: f64,
    #[serde(default = "default_num_points")]
    num_points: usize,
}

fn default_num_points() -> usize {
    DEFAULT_NUM_POINTS
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(file: ScenarioFile) -> Result<Self> {
        let init = file.initial;
        let has_angles = init.alpha.is_some() || init.beta.is_some();
        let has_explicit = init.d_a.is_some() || init.d_b.is_some() || init.d_c.is_some();
        let initial = match (has_angles, has_explicit) {
            (true, false) => InitialState::Angles {
                alpha: init.alpha.ok_or_else(|| {
                    Error::InvalidScenario("initial.alpha is required with initial.beta".into())
                })?,
                beta: init.beta.unwrap_or(0.0),
            },
            (false, true) => {
                let c =
                    |z: Option<[f64; 2]>| z.map_or(C64::new(0.0, 0.0), |[re, im]| C64::new(re, im));
                InitialState::Explicit(AmplitudeVector::new(c(init.d_a), c(init.d_b), c(init.d_c)))
            }
            (true, true) => {
                return Err(Error::InvalidScenario(
                    "initial state given both as angles and as explicit amplitudes".into(),
                ))
            }
            (false, false) => return Err(Error::InvalidScenario("initial state is empty".into())),
        };
        let p = file.params;
        let s = file.strengths;
        let scenario = Scenario {
            initial,
            params: SystemParams {
                gamma0: p.gamma0,
                kappa: p.kappa,
                delta: p.delta,
                theta: p.theta,
            },
            strengths: MeasurementStrengths {
                p: s.p,
                q: s.q.unwrap_or(s.p),
                pr: s.pr,
                qr: s.qr.unwrap_or(s.pr),
            },
            time_grid: TimeGrid::new(file.time_grid.t_max, file.time_grid.num_points),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let initial = match s.initial {
            InitialState::Angles { alpha, beta } => InitialFile {
                alpha: Some(alpha),
                beta: Some(beta),
                ..Default::default()
            },
            InitialState::Explicit(amp) => {
                let pair = |z: C64| Some([z.re, z.im]);
                InitialFile {
                    d_a: pair(amp.d_a),
                    d_b: pair(amp.d_b),
                    d_c: pair(amp.d_c),
                    ..Default::default()
                }
            }
        };
        ScenarioFile {
            initial,
            params: ParamsFile {
                gamma0: s.params.gamma0,
                kappa: s.params.kappa,
                delta: s.params.delta,
                theta: s.params.theta,
            },
            strengths: StrengthsFile {
                p: s.strengths.p,
                q: Some(s.strengths.q),
                pr: s.strengths.pr,
                qr: Some(s.strengths.qr),
            },
            time_grid: TimeGridFile {
                t_max: s.time_grid.t_max,
                num_points: s.time_grid.num_points,
            },
        }
    }
}
