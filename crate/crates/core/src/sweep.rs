//! Cartesian parameter sweeps summarised by their coherence events.
//!
//! A sweep file holds a base scenario under `[base]` and the grid under
//! `[axes]`:
//!
//! ```toml
//! [base.initial]
//! alpha = 0.7853981633974483
//! [base.params]
//! gamma0 = 0.1
//! kappa = 1.0
//! [base.time_grid]
//! t_max = 100.0
//!
//! [axes]
//! theta = [0.0, 0.3, 0.7, 1.0]
//! ```
//!
//! Recognised axes, in row-ordering priority: `gamma0_over_kappa` (sets
//! `γ0 = ratio · κ`), `delta`, `theta`, `p` (sets `p = q`), `pr` (sets
//! `pr = qr`), `alpha`, `beta`. Rows enumerate the grid lexicographically,
//! the last axis varying fastest.

use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::events::{detect_events, first_crossing_below};
use crate::output::fmt_f64;
use crate::scenario::{run_scenario, InitialState, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Gamma0OverKappa,
    Delta,
    Theta,
    P,
    Pr,
    Alpha,
    Beta,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 7] = [
        SweepAxis::Gamma0OverKappa,
        SweepAxis::Delta,
        SweepAxis::Theta,
        SweepAxis::P,
        SweepAxis::Pr,
        SweepAxis::Alpha,
        SweepAxis::Beta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Gamma0OverKappa => "gamma0_over_kappa",
            SweepAxis::Delta => "delta",
            SweepAxis::Theta => "theta",
            SweepAxis::P => "p",
            SweepAxis::Pr => "pr",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Beta => "beta",
        }
    }

    fn apply(self, s: &mut Scenario, value: f64) -> Result<()> {
        match self {
            SweepAxis::Gamma0OverKappa => s.params.gamma0 = value * s.params.kappa,
            SweepAxis::Delta => s.params.delta = value,
            SweepAxis::Theta => s.params.theta = value,
            SweepAxis::P => {
                s.strengths.p = value;
                s.strengths.q = value;
            }
            SweepAxis::Pr => {
                s.strengths.pr = value;
                s.strengths.qr = value;
            }
            SweepAxis::Alpha | SweepAxis::Beta => {
                let InitialState::Angles { alpha, beta } = s.initial else {
                    return Err(Error::InvalidScenario(format!(
                        "sweeping {} requires an angle-parametrized initial state",
                        self.name()
                    )));
                };
                s.initial = if self == SweepAxis::Alpha {
                    InitialState::Angles { alpha: value, beta }
                } else {
                    InitialState::Angles { alpha, beta: value }
                };
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    /// Axes in row-ordering priority, each with its values in file order.
    pub axes: Vec<(SweepAxis, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub values: Vec<(SweepAxis, f64)>,
    pub scenario: Scenario,
    pub steady_value: Option<f64>,
    pub first_peak: Option<f64>,
    pub death_count: usize,
    /// First time ξ falls to 0.5 from above.
    pub t_half: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    base: toml::Value,
    #[serde(default)]
    axes: AxesFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxesFile {
    gamma0_over_kappa: Option<Vec<f64>>,
    delta: Option<Vec<f64>>,
    theta: Option<Vec<f64>>,
    p: Option<Vec<f64>>,
    pr: Option<Vec<f64>>,
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SweepFile = toml::from_str(text)?;
        let base = Scenario::from_toml_str(
            &toml::to_string(&file.base).map_err(|e| Error::InvalidScenario(e.to_string()))?,
        )?;
        let a = file.axes;
        let axes = [
            a.gamma0_over_kappa,
            a.delta,
            a.theta,
            a.p,
            a.pr,
            a.alpha,
            a.beta,
        ]
        .into_iter()
        .zip(SweepAxis::ALL)
        .filter_map(|(values, axis)| values.map(|v| (axis, v)))
        .collect();
        Ok(Self { base, axes })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Grid points in lexicographic order.
    pub fn points(&self) -> Result<Vec<Vec<(SweepAxis, f64)>>> {
        if self.axes.iter().any(|(_, values)| values.is_empty()) {
            return Err(Error::EmptyGrid);
        }
        let mut points: Vec<Vec<(SweepAxis, f64)>> = vec![Vec::new()];
        for (axis, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push((*axis, v));
                        p
                    })
                })
                .collect();
        }
        Ok(points)
    }
}

/// Runs every grid point (in parallel) and returns rows in grid order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let points = spec.points()?;
    points
        .into_par_iter()
        .map(|values| {
            let mut scenario = spec.base;
            for &(axis, v) in &values {
                axis.apply(&mut scenario, v)?;
            }
            let series = run_scenario(&scenario)?;
            let report = detect_events(&series);
            Ok(SweepRow {
                t_half: first_crossing_below(&series.times(), &series.coherence(), 0.5),
                values,
                scenario,
                steady_value: report.steady_value,
                first_peak: report.first_peak(),
                death_count: report.deaths.len(),
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(
    spec: &SweepSpec,
    rows: &[SweepRow],
    mut out: W,
) -> io::Result<()> {
    let mut header: Vec<&str> = spec.axes.iter().map(|(a, _)| a.name()).collect();
    header.extend(["steady_value", "first_peak", "death_count", "t_half"]);
    writeln!(out, "{}", header.join(","))?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for row in rows {
        let mut fields: Vec<String> = row.values.iter().map(|&(_, v)| fmt_f64(v)).collect();
        fields.push(opt(row.steady_value));
        fields.push(opt(row.first_peak));
        fields.push(row.death_count.to_string());
        fields.push(opt(row.t_half));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
