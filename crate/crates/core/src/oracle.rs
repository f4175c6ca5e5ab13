//! Direct numerical integration of the memory-kernel amplitude equations
//!
//! ```text
//! dD_m/dt = -Σ_n ∫_0^t f_mn(t - t') D_n(t') dt',   m, n ∈ {A, B}
//! ```
//!
//! used as an independent check on the closed-form propagators. Two methods
//! are provided:
//!
//! * [`OracleMethod::Rk4Auxiliary`] introduces `F_m(t) = ∫ e^{-(κ+iΔ)(t-t')} D_m(t') dt'`,
//!   which turns the integro-differential system into a local linear ODE
//!   integrated with classical fixed-step RK4.
//! * [`OracleMethod::TrapezoidVolterra`] discretizes both the history
//!   integral and the time derivative with the trapezoidal rule. It is O(N²)
//!   and second order, and uses nothing about the kernel beyond its values.

use num_complex::Complex64 as C64;

use crate::dynamics::{evolve_amplitudes, memory_kernel, AmplitudeVector, SystemParams};
use crate::error::{Error, Result};

/// Errors above this are flagged by [`compare_closed_form`].
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;

/// Target number of recorded samples when the record stride is chosen
/// automatically.
const DEFAULT_RECORDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleMethod {
    Rk4Auxiliary,
    TrapezoidVolterra,
}

impl std::fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleMethod::Rk4Auxiliary => "rk4-auxiliary",
            OracleMethod::TrapezoidVolterra => "trapezoid-volterra",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Requested step. The step actually used is `max_time / n` with
    /// `n = ceil(max_time / step_size)`, so the last grid point is `max_time`.
    pub step_size: f64,
    pub method: OracleMethod,
    pub max_time: f64,
    /// Record every `record_every`-th step (the final step is always kept).
    pub record_every: usize,
}

impl OracleConfig {
    /// Default step `1e-3 / max(γ0, κ, |Δ|, 1)`, resolving the fastest
    /// oscillation, and a stride giving about a thousand records.
    pub fn new(params: &SystemParams, max_time: f64, method: OracleMethod) -> Self {
        Self::with_step(1e-3 / params.fastest_rate(), max_time, method)
    }

    pub fn with_step(step_size: f64, max_time: f64, method: OracleMethod) -> Self {
        let steps = (max_time / step_size).ceil().max(1.0) as usize;
        Self {
            step_size,
            method,
            max_time,
            record_every: (steps / DEFAULT_RECORDS).max(1),
        }
    }

    pub fn record_every(mut self, stride: usize) -> Self {
        self.record_every = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if !(self.max_time.is_finite() && self.max_time > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "max time must be positive, got {}",
                self.max_time
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig(
                "record stride must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        // guard against ceil pushing an exact multiple one step further
        let ratio = self.max_time / self.step_size;
        let rounded = ratio.round();
        let n = if (ratio - rounded).abs() < 1e-9 * ratio.max(1.0) {
            rounded
        } else {
            ratio.ceil()
        };
        (n as usize).max(1)
    }

    pub fn effective_step(&self) -> f64 {
        self.max_time / self.num_steps() as f64
    }
}

/// Amplitudes sampled on a strictly increasing time grid starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries {
    pub times: Vec<f64>,
    pub values: Vec<AmplitudeVector>,
}

impl AmplitudeSeries {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, value: AmplitudeVector) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite { time: t });
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub method: OracleMethod,
    /// Largest `|closed form - oracle|` over recorded times and the `A`, `B`
    /// components.
    pub max_abs_error: f64,
    pub worst_time: f64,
    /// Set when `max_abs_error` exceeds [`AGREEMENT_TOLERANCE`].
    pub flagged: bool,
}

/// Integrates the amplitude equations from `initial` up to `cfg.max_time`.
pub fn oracle_integrate(
    initial: &AmplitudeVector,
    params: &SystemParams,
    cfg: &OracleConfig,
) -> Result<AmplitudeSeries> {
    cfg.validate()?;
    params.validate()?;
    if !initial.is_finite() {
        return Err(Error::NonFinite { time: 0.0 });
    }
    match cfg.method {
        OracleMethod::Rk4Auxiliary => integrate_rk4(initial, params, cfg),
        OracleMethod::TrapezoidVolterra => integrate_trapezoid(initial, params, cfg),
    }
}

/// Runs the oracle and measures its distance to [`evolve_amplitudes`].
pub fn compare_closed_form(
    initial: &AmplitudeVector,
    params: &SystemParams,
    cfg: &OracleConfig,
) -> Result<ComparisonReport> {
    let series = oracle_integrate(initial, params, cfg)?;
    let mut max_abs_error = 0.0f64;
    let mut worst_time = 0.0;
    for (&t, oracle) in series.times.iter().zip(&series.values) {
        let exact = evolve_amplitudes(initial, params, t);
        let err = (exact.d_a - oracle.d_a)
            .norm()
            .max((exact.d_b - oracle.d_b).norm());
        if err > max_abs_error {
            max_abs_error = err;
            worst_time = t;
        }
    }
    Ok(ComparisonReport {
        method: cfg.method,
        max_abs_error,
        worst_time,
        flagged: max_abs_error > AGREEMENT_TOLERANCE,
    })
}

/// `[D_A, D_B, F_A, F_B]`
type AuxState = [C64; 4];

fn integrate_rk4(
    initial: &AmplitudeVector,
    params: &SystemParams,
    cfg: &OracleConfig,
) -> Result<AmplitudeSeries> {
    let n = cfg.num_steps();
    let h = cfg.effective_step();
    let decay = -params.cavity_rate();
    let strength = 0.5 * params.gamma0 * params.kappa;
    let theta = params.theta;

    let rhs = |y: &AuxState| -> AuxState {
        [
            -strength * (y[2] + theta * y[3]),
            -strength * (theta * y[2] + y[3]),
            y[0] + decay * y[2],
            y[1] + decay * y[3],
        ]
    };
    let axpy = |y: &AuxState, k: &AuxState, s: f64| -> AuxState {
        [
            y[0] + k[0] * s,
            y[1] + k[1] * s,
            y[2] + k[2] * s,
            y[3] + k[3] * s,
        ]
    };

    let zero = C64::new(0.0, 0.0);
    let mut y: AuxState = [initial.d_a, initial.d_b, zero, zero];
    let mut series = AmplitudeSeries::with_capacity(n / cfg.record_every + 2);
    series.push(0.0, *initial)?;

    for step in 1..=n {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, 0.5 * h));
        let k3 = rhs(&axpy(&y, &k2, 0.5 * h));
        let k4 = rhs(&axpy(&y, &k3, h));
        for i in 0..4 {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
        if step % cfg.record_every == 0 || step == n {
            let t = step as f64 * h;
            series.push(t, AmplitudeVector::new(y[0], y[1], initial.d_c))?;
        }
    }
    Ok(series)
}

fn integrate_trapezoid(
    initial: &AmplitudeVector,
    params: &SystemParams,
    cfg: &OracleConfig,
) -> Result<AmplitudeSeries> {
    let n = cfg.num_steps();
    let h = cfg.effective_step();
    let theta = params.theta;

    // kernel at every lag on the grid
    let kernel: Vec<C64> = (0..=n)
        .map(|j| memory_kernel(params, j as f64 * h).direct)
        .collect();
    // K(lag) applied to (a, b): f * [[1, θ], [θ, 1]]
    let apply = |f: C64, d: [C64; 2]| [f * (d[0] + theta * d[1]), f * (theta * d[0] + d[1])];

    // (I + h²/4 K(0))⁻¹ for the implicit end-point term
    let eps = kernel[0] * (0.25 * h * h);
    let m11 = 1.0 + eps;
    let m12 = eps * theta;
    let det = m11 * m11 - m12 * m12;
    let solve = |r: [C64; 2]| {
        [
            (m11 * r[0] - m12 * r[1]) / det,
            (m11 * r[1] - m12 * r[0]) / det,
        ]
    };

    let zero = C64::new(0.0, 0.0);
    let mut history: Vec<[C64; 2]> = Vec::with_capacity(n + 1);
    history.push([initial.d_a, initial.d_b]);
    let mut derivative = [zero, zero];

    let mut series = AmplitudeSeries::with_capacity(n / cfg.record_every + 2);
    series.push(0.0, *initial)?;

    for step in 1..=n {
        // history sum without the unknown end point
        let mut acc = apply(kernel[step] * 0.5, history[0]);
        for (j, d) in history.iter().enumerate().skip(1) {
            let term = apply(kernel[step - j], *d);
            acc[0] += term[0];
            acc[1] += term[1];
        }
        let partial = [-acc[0] * h, -acc[1] * h];

        let prev = history[step - 1];
        let rhs = [
            prev[0] + (derivative[0] + partial[0]) * (0.5 * h),
            prev[1] + (derivative[1] + partial[1]) * (0.5 * h),
        ];
        let next = solve(rhs);
        let end = apply(kernel[0], next);
        derivative = [
            partial[0] - end[0] * (0.5 * h),
            partial[1] - end[1] * (0.5 * h),
        ];
        history.push(next);

        if step % cfg.record_every == 0 || step == n {
            let t = step as f64 * h;
            series.push(t, AmplitudeVector::new(next[0], next[1], initial.d_c))?;
        }
    }
    Ok(series)
}

/// One point of the standard closed-form verification grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationCase {
    pub label: &'static str,
    pub initial: AmplitudeVector,
    pub params: SystemParams,
    pub max_time: f64,
}

/// Weak (γ0 = 0.1, κ = 1, t ≤ 100) and strong (γ0 = 1, κ = 0.1, t ≤ 10)
/// coupling × Δ ∈ {0, 5, 10, 20} × θ ∈ {0, 0.5, 1} × the maximal coherent,
/// (1/2, √3/2) and |B⟩ initial states.
pub fn verification_grid() -> Vec<VerificationCase> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};
    let states = [
        ("maximal", FRAC_PI_4),
        ("partial", FRAC_PI_3),
        ("excited-b", FRAC_PI_2),
    ];
    let mut cases = Vec::new();
    for (gamma0, kappa, max_time) in [(0.1, 1.0, 100.0), (1.0, 0.1, 10.0)] {
        for delta in [0.0, 5.0, 10.0, 20.0] {
            for theta in [0.0, 0.5, 1.0] {
                for (label, alpha) in states {
                    cases.push(VerificationCase {
                        label,
                        initial: AmplitudeVector::from_angles(alpha, 0.0),
                        params: SystemParams {
                            gamma0,
                            kappa,
                            delta,
                            theta,
                        },
                        max_time,
                    });
                }
            }
        }
    }
    cases
}
