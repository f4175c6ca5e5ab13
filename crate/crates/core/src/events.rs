//! Coherence sudden death / sudden birth detection on sampled series.
//!
//! A death starts when ξ falls below [`DEATH_THRESHOLD`] after having been
//! above [`BIRTH_THRESHOLD`], and ends when ξ climbs back to the death
//! threshold. A birth is recorded when ξ exceeds the birth threshold after a
//! death, or after an initially incoherent start. The factor of ten between
//! the thresholds gives hysteresis against sampling noise.
//!
//! A sub-threshold tail that never recovers is an asymptotic decay, not a
//! sudden death, and is not reported.

use crate::scenario::CoherenceSeries;

pub const DEATH_THRESHOLD: f64 = 1e-3;
pub const BIRTH_THRESHOLD: f64 = 10.0 * DEATH_THRESHOLD;
/// Fraction of the series, taken from the end, used for the steady value.
pub const STEADY_WINDOW: f64 = 0.05;
/// Maximum relative spread `(max - min) / |mean|` of a steady window.
pub const STEADY_SPREAD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Death {
    pub t_enter: f64,
    pub t_exit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Birth {
    pub t_birth: f64,
    /// Largest ξ between this birth and the next death (or the end).
    pub peak_value: f64,
    pub t_peak: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventReport {
    pub deaths: Vec<Death>,
    pub births: Vec<Birth>,
    pub steady_value: Option<f64>,
}

impl EventReport {
    pub fn first_peak(&self) -> Option<f64> {
        self.births.first().map(|b| b.peak_value)
    }
}

pub fn detect_events(series: &CoherenceSeries) -> EventReport {
    detect_events_in(&series.times(), &series.coherence())
}

enum Phase {
    Alive {
        armed: bool,
    },
    Dead {
        t_enter: Option<f64>,
        t_exit: Option<f64>,
    },
}

/// Event detection on parallel `times` / `values` slices.
pub fn detect_events_in(times: &[f64], values: &[f64]) -> EventReport {
    assert_eq!(
        times.len(),
        values.len(),
        "times and values must have equal length"
    );
    let mut report = EventReport {
        steady_value: steady_value(values),
        ..Default::default()
    };
    if values.is_empty() {
        return report;
    }

    // birth index ranges, closed when the next death starts
    let mut open_birth: Option<usize> = None;
    let mut birth_windows: Vec<(usize, usize)> = Vec::new();

    let mut phase = if values[0] < DEATH_THRESHOLD {
        Phase::Dead {
            t_enter: None,
            t_exit: None,
        }
    } else {
        Phase::Alive {
            armed: values[0] > BIRTH_THRESHOLD,
        }
    };

    for (i, (&t, &xi)) in times.iter().zip(values).enumerate() {
        match &mut phase {
            Phase::Alive { armed } => {
                if xi > BIRTH_THRESHOLD {
                    *armed = true;
                }
                if *armed && xi < DEATH_THRESHOLD {
                    if let Some(start) = open_birth.take() {
                        birth_windows.push((start, i));
                    }
                    phase = Phase::Dead {
                        t_enter: Some(t),
                        t_exit: None,
                    };
                }
            }
            Phase::Dead { t_enter, t_exit } => {
                if xi < DEATH_THRESHOLD {
                    *t_exit = None;
                } else if t_exit.is_none() {
                    *t_exit = Some(t);
                }
                if xi > BIRTH_THRESHOLD {
                    if let Some(t_enter) = *t_enter {
                        report.deaths.push(Death {
                            t_enter,
                            t_exit: t_exit.unwrap_or(t),
                        });
                    }
                    open_birth = Some(i);
                    phase = Phase::Alive { armed: true };
                }
            }
        }
    }
    if let Phase::Dead {
        t_enter: Some(t_enter),
        t_exit: Some(t_exit),
    } = phase
    {
        report.deaths.push(Death { t_enter, t_exit });
    }
    if let Some(start) = open_birth {
        birth_windows.push((start, values.len()));
    }

    for (start, end) in birth_windows {
        let (t_peak, peak_value) = refine_max(times, values, start, end);
        report.births.push(Birth {
            t_birth: times[start],
            peak_value,
            t_peak,
        });
    }
    report
}

/// Location and value of the largest sample, refined by a parabola through
/// the neighbouring samples.
pub fn locate_maximum(times: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    Some(refine_max(times, values, 0, values.len()))
}

/// Mean of the final [`STEADY_WINDOW`] of samples, if they are flat.
pub fn steady_value(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let window = ((values.len() as f64 * STEADY_WINDOW).ceil() as usize).clamp(1, values.len());
    let tail = &values[values.len() - window..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    (hi - lo <= STEADY_SPREAD * mean.abs()).then_some(mean)
}

/// First time ξ drops to `level` from above, by linear interpolation.
pub fn first_crossing_below(times: &[f64], values: &[f64], level: f64) -> Option<f64> {
    if values.first().is_some_and(|&x| x <= level) {
        return None;
    }
    values.windows(2).zip(times.windows(2)).find_map(|(v, t)| {
        (v[0] > level && v[1] <= level)
            .then(|| t[0] + (t[1] - t[0]) * (v[0] - level) / (v[0] - v[1]))
    })
}

fn refine_max(times: &[f64], values: &[f64], start: usize, end: usize) -> (f64, f64) {
    let mut best = start;
    for i in start..end {
        if values[i] > values[best] {
            best = i;
        }
    }
    if best == 0 || best + 1 >= values.len() {
        return (times[best], values[best]);
    }
    let (t0, t1, t2) = (times[best - 1], times[best], times[best + 1]);
    let (y0, y1, y2) = (values[best - 1], values[best], values[best + 1]);
    // vertex of the interpolating parabola
    let d01 = (y1 - y0) / (t1 - t0);
    let d12 = (y2 - y1) / (t2 - t1);
    let curvature = (d12 - d01) / (t2 - t0);
    if !(curvature < 0.0) {
        return (t1, y1);
    }
    let slope_mid = d01 + curvature * (t1 - t0);
    let shift = (-slope_mid / (2.0 * curvature)).clamp(t0 - t1, t2 - t1);
    let t_peak = t1 + shift;
    let peak = y1 + slope_mid * shift + curvature * shift * shift;
    (t_peak, peak.clamp(0.0, 2.0).max(y1))
}
