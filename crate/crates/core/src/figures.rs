//! Parameter table for the reference figures and their CSV/gnuplot export.
//!
//! Both coupling regimes use `κ = 1` as the unit of rate, so times and
//! detunings are in units of `1/κ` and `κ` respectively:
//!
//! | regime | γ0   | κ | t range  |
//! |--------|------|---|----------|
//! | weak   | 0.1  | 1 | [0, 100] |
//! | strong | 10   | 1 | [0, 10]  |
//!
//! Panels `a`/`b` start in the maximal coherent state, `c`/`d` in
//! `(|A⟩ + √3|B⟩)/2`, and `e`/`f` in `|B⟩`; odd letters are weak coupling,
//! even letters strong coupling. Figure 2 holds surfaces over the initial
//! phases in the strong regime.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dynamics::SystemParams;
use crate::error::{Error, Result};
use crate::measurement::MeasurementStrengths;
use crate::output::write_series_csv;
use crate::scenario::{run_scenario, InitialState, Scenario, TimeGrid, DEFAULT_NUM_POINTS};

/// Number of slices in the phase surfaces of figure 2.
pub const SURFACE_SLICES: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Weak,
    Strong,
}

impl Regime {
    pub fn gamma0(self) -> f64 {
        match self {
            Regime::Weak => 0.1,
            Regime::Strong => 10.0,
        }
    }

    pub fn kappa(self) -> f64 {
        1.0
    }

    pub fn t_max(self) -> f64 {
        match self {
            Regime::Weak => 100.0,
            Regime::Strong => 10.0,
        }
    }
}

/// Initial states used by the panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `(|A⟩ + |B⟩)/√2`, coherence 1.
    MaximalCoherent,
    /// `(|A⟩ + √3|B⟩)/2`, coherence √3/2.
    PartialCoherent,
    /// `|B⟩`, incoherent.
    ExcitedB,
}

impl Preset {
    pub fn state(self) -> InitialState {
        let alpha = match self {
            Preset::MaximalCoherent => FRAC_PI_4,
            Preset::PartialCoherent => FRAC_PI_3,
            Preset::ExcitedB => FRAC_PI_2,
        };
        InitialState::Angles { alpha, beta: 0.0 }
    }
}

/// Quantity varied across the curves of one panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveAxis {
    Theta,
    P,
    Pr,
    Delta,
    Alpha,
    Beta,
}

impl CurveAxis {
    pub fn name(self) -> &'static str {
        match self {
            CurveAxis::Theta => "theta",
            CurveAxis::P => "p",
            CurveAxis::Pr => "pr",
            CurveAxis::Delta => "delta",
            CurveAxis::Alpha => "alpha",
            CurveAxis::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub value: f64,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: String,
    pub title: String,
    pub axis: CurveAxis,
    /// Curves are stacked slices of a surface rather than overlaid lines.
    pub surface: bool,
    pub curves: Vec<Curve>,
}

pub const FIGURE_IDS: [&str; 26] = [
    "2a", "2b", "3a", "3b", "3c", "3d", "3e", "3f", "4a", "4b", "4c", "4d", "4e", "4f", "5a", "5b",
    "5c", "5d", "5e", "5f", "6a", "6b", "6c", "6d", "6e", "6f",
];

const CAPTION_VALUES: [f64; 4] = [0.0, 0.3, 0.7, 1.0];
const STRENGTH_VALUES: [f64; 4] = [0.0, 0.2, 0.5, 0.9];
const DETUNING_VALUES: [f64; 4] = [0.0, 5.0, 10.0, 20.0];

struct PanelBase {
    initial: InitialState,
    regime: Regime,
    delta: f64,
    theta: f64,
    p: f64,
    pr: f64,
}

impl PanelBase {
    fn scenario(&self) -> Scenario {
        Scenario {
            initial: self.initial,
            params: SystemParams {
                gamma0: self.regime.gamma0(),
                kappa: self.regime.kappa(),
                delta: self.delta,
                theta: self.theta,
            },
            strengths: MeasurementStrengths {
                p: self.p,
                q: self.p,
                pr: self.pr,
                qr: self.pr,
            },
            time_grid: TimeGrid::new(self.regime.t_max(), DEFAULT_NUM_POINTS),
        }
    }
}

fn with_axis(mut s: Scenario, axis: CurveAxis, value: f64) -> Scenario {
    match axis {
        CurveAxis::Theta => s.params.theta = value,
        CurveAxis::P => {
            s.strengths.p = value;
            s.strengths.q = value;
        }
        CurveAxis::Pr => {
            s.strengths.pr = value;
            s.strengths.qr = value;
        }
        CurveAxis::Delta => s.params.delta = value,
        CurveAxis::Alpha | CurveAxis::Beta => {
            let InitialState::Angles {
                mut alpha,
                mut beta,
            } = s.initial
            else {
                unreachable!("phase axes are only used with angle initial states")
            };
            if axis == CurveAxis::Alpha {
                alpha = value;
            } else {
                beta = value;
            }
            s.initial = InitialState::Angles { alpha, beta };
        }
    }
    s
}

/// Looks up the parameter set of a figure panel.
pub fn figure_spec(id: &str) -> Result<FigureSpec> {
    let unknown = || Error::UnknownFigure(id.to_string());
    let mut chars = id.chars();
    let (number, panel) = match (chars.next(), chars.next(), chars.next()) {
        (Some(n), Some(p), None) => (n, p),
        _ => return Err(unknown()),
    };

    if number == '2' {
        let slices = |max: f64| {
            (0..SURFACE_SLICES).map(move |i| max * i as f64 / (SURFACE_SLICES - 1) as f64)
        };
        let (axis, initial, values, title): (_, _, Vec<f64>, _) = match panel {
            'a' => (
                CurveAxis::Beta,
                InitialState::Angles {
                    alpha: FRAC_PI_4,
                    beta: 0.0,
                },
                slices(2.0 * PI).collect(),
                "coherence over (beta, t), alpha = pi/4",
            ),
            'b' => (
                CurveAxis::Alpha,
                InitialState::Angles {
                    alpha: 0.0,
                    beta: 0.0,
                },
                slices(PI).collect(),
                "coherence over (alpha, t), beta = 0",
            ),
            _ => return Err(unknown()),
        };
        let base = PanelBase {
            initial,
            regime: Regime::Strong,
            delta: 0.0,
            theta: 0.0,
            p: 0.0,
            pr: 0.0,
        }
        .scenario();
        return Ok(FigureSpec {
            id: id.to_string(),
            title: title.to_string(),
            axis,
            surface: true,
            curves: values
                .into_iter()
                .map(|value| Curve {
                    value,
                    scenario: with_axis(base, axis, value),
                })
                .collect(),
        });
    }

    let (preset, regime) = match panel {
        'a' => (Preset::MaximalCoherent, Regime::Weak),
        'b' => (Preset::MaximalCoherent, Regime::Strong),
        'c' => (Preset::PartialCoherent, Regime::Weak),
        'd' => (Preset::PartialCoherent, Regime::Strong),
        'e' => (Preset::ExcitedB, Regime::Weak),
        'f' => (Preset::ExcitedB, Regime::Strong),
        _ => return Err(unknown()),
    };
    // figures 4-6 use θ = 0 for the maximal coherent panels, θ = 1 otherwise
    let optimal_theta = if preset == Preset::MaximalCoherent {
        0.0
    } else {
        1.0
    };
    let (axis, values, theta, pr) = match number {
        '3' => (CurveAxis::Theta, CAPTION_VALUES, 0.0, 0.0),
        '4' => (CurveAxis::P, STRENGTH_VALUES, optimal_theta, 0.0),
        '5' => (CurveAxis::Pr, STRENGTH_VALUES, optimal_theta, 0.0),
        '6' => (CurveAxis::Delta, DETUNING_VALUES, optimal_theta, 0.9),
        _ => return Err(unknown()),
    };
    let base = PanelBase {
        initial: preset.state(),
        regime,
        delta: 0.0,
        theta,
        p: 0.0,
        pr,
    }
    .scenario();
    let regime_name = match regime {
        Regime::Weak => "weak coupling",
        Regime::Strong => "strong coupling",
    };
    Ok(FigureSpec {
        id: id.to_string(),
        title: format!(
            "Fig. {id}: {preset:?}, {regime_name}, varying {}",
            axis.name()
        ),
        axis,
        surface: false,
        curves: values
            .iter()
            .map(|&value| Curve {
                value,
                scenario: with_axis(base, axis, value),
            })
            .collect(),
    })
}

fn curve_file_name(spec: &FigureSpec, index: usize, value: f64) -> String {
    if spec.surface {
        format!("fig{}_{}_{:02}.csv", spec.id, spec.axis.name(), index)
    } else {
        format!("fig{}_{}_{}.csv", spec.id, spec.axis.name(), value)
    }
}

/// gnuplot script plotting the emitted CSVs (paths relative to the script).
pub fn plot_script(spec: &FigureSpec, files: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for figure {}", spec.id);
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output 'fig{}.png'", spec.id);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set title \"{}\"", spec.title);
    let _ = writeln!(s, "set xlabel 't'");
    let _ = writeln!(s, "set key autotitle columnhead");
    if spec.surface {
        let _ = writeln!(s, "set ylabel '{}'", spec.axis.name());
        let _ = writeln!(s, "set zlabel 'xi'");
        let _ = writeln!(s, "set hidden3d");
        let lines: Vec<String> = files
            .iter()
            .zip(&spec.curves)
            .map(|(f, c)| format!("'{f}' using 1:({}):2 with lines notitle", c.value))
            .collect();
        let _ = writeln!(s, "splot {}", lines.join(", \\\n      "));
    } else {
        let _ = writeln!(s, "set ylabel 'xi'");
        let lines: Vec<String> = files
            .iter()
            .zip(&spec.curves)
            .map(|(f, c)| {
                format!(
                    "'{f}' using 1:2 with lines title '{} = {}'",
                    spec.axis.name(),
                    c.value
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", lines.join(", \\\n     "));
    }
    s
}

/// Writes one CSV per curve and a `fig<id>.gp` script into `out_dir`.
/// Returns the paths written, script last.
pub fn reproduce_figure(id: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = figure_spec(id)?;
    fs::create_dir_all(out_dir)?;
    let names: Vec<String> = spec
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| curve_file_name(&spec, i, c.value))
        .collect();
    let mut paths = spec
        .curves
        .par_iter()
        .zip(names.par_iter())
        .map(|(curve, name)| {
            let series = run_scenario(&curve.scenario)?;
            let path = out_dir.join(name);
            let file = fs::File::create(&path)?;
            let mut writer = std::io::BufWriter::new(file);
            write_series_csv(&series, &mut writer)?;
            std::io::Write::flush(&mut writer)?;
            Ok(path)
        })
        .collect::<Result<Vec<_>>>()?;
    let script = out_dir.join(format!("fig{id}.gp"));
    fs::write(&script, plot_script(&spec, &names))?;
    paths.push(script);
    Ok(paths)
}
