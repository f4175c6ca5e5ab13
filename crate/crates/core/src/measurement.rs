//! Weak measurement before the evolution and its reversal afterwards.
//!
//! The weak measurement acts at `t = 0` with the diagonal operator
//! `diag(1, sqrt(1-p), sqrt(1-q))` in the `{|C⟩, |B⟩, |A⟩}` basis. The
//! measured amplitudes are **not** renormalized: the missing norm is carried
//! by the reservoir weight `1 - Σ|D'|²`, which joins the ground-state
//! population of the reduced density matrix. Only the reversal at time `t`,
//! `diag(sqrt((1-p_r)(1-q_r)), sqrt(1-q_r), sqrt(1-p_r))`, is followed by a
//! renormalization (the factor `C1`).

use crate::dynamics::{evolve_amplitudes, AmplitudeVector, SystemParams};
use crate::error::{Error, Result};
use crate::state::{density_from_amplitudes, DensityMatrix3, NORM_TOLERANCE};

/// Strengths of the weak measurement (`p` on `|B⟩`, `q` on `|A⟩`) and of the
/// reversal (`pr`, `qr`), each in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasurementStrengths {
    pub p: f64,
    pub q: f64,
    pub pr: f64,
    pub qr: f64,
}

impl MeasurementStrengths {
    pub fn new(p: f64, q: f64, pr: f64, qr: f64) -> Result<Self> {
        let s = Self { p, q, pr, qr };
        s.validate()?;
        Ok(s)
    }

    /// `p = q` and `pr = qr`.
    pub fn symmetric(p: f64, pr: f64) -> Result<Self> {
        Self::new(p, p, pr, pr)
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("p", self.p),
            ("q", self.q),
            ("pr", self.pr),
            ("qr", self.qr),
        ] {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidStrength { name, value });
            }
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        self.p == 0.0 && self.q == 0.0 && self.pr == 0.0 && self.qr == 0.0
    }
}

/// Scales `d_b` by `sqrt(1-p)` and `d_a` by `sqrt(1-q)`; the result is
/// sub-normalized.
pub fn apply_weak_measurement(
    amp: &AmplitudeVector,
    strengths: &MeasurementStrengths,
) -> Result<AmplitudeVector> {
    strengths.validate()?;
    let norm_sqr = amp.norm_sqr();
    if !((norm_sqr - 1.0).abs() <= NORM_TOLERANCE) {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(AmplitudeVector {
        d_a: amp.d_a * (1.0 - strengths.q).sqrt(),
        d_b: amp.d_b * (1.0 - strengths.p).sqrt(),
        d_c: amp.d_c,
    })
}

/// Trace of the reversed, unnormalized density matrix.
pub fn normalization_factor(
    amp: &AmplitudeVector,
    strengths: &MeasurementStrengths,
) -> Result<f64> {
    strengths.validate()?;
    let norm_sqr = amp.norm_sqr();
    if !norm_sqr.is_finite() || norm_sqr > 1.0 + NORM_TOLERANCE {
        return Err(Error::Unphysical { norm_sqr });
    }
    let keep_a = 1.0 - strengths.pr;
    let keep_b = 1.0 - strengths.qr;
    let ground = amp.reservoir_weight() + amp.d_c.norm_sqr();
    let c1 = ground * keep_a * keep_b + amp.d_b.norm_sqr() * keep_b + amp.d_a.norm_sqr() * keep_a;
    if !(c1 > 0.0) {
        return Err(Error::NonPositiveNormalization(c1));
    }
    Ok(c1)
}

/// Applies the reversal to the evolved amplitudes and renormalizes.
pub fn apply_reversal(
    amp: &AmplitudeVector,
    strengths: &MeasurementStrengths,
) -> Result<DensityMatrix3> {
    let c1 = normalization_factor(amp, strengths)?;
    // diagonal of the reversal operator in {|C⟩, |B⟩, |A⟩} order
    let keep_a = 1.0 - strengths.pr;
    let keep_b = 1.0 - strengths.qr;
    let m_c = (keep_a * keep_b).sqrt();
    let m_b = keep_b.sqrt();
    let m_a = keep_a.sqrt();

    let AmplitudeVector { d_a, d_b, d_c } = *amp;
    let ground = amp.reservoir_weight() + d_c.norm_sqr();
    Ok(DensityMatrix3::from_upper(
        [
            ground * m_c * m_c / c1,
            d_b.norm_sqr() * m_b * m_b / c1,
            d_a.norm_sqr() * m_a * m_a / c1,
        ],
        d_c * d_b.conj() * (m_c * m_b / c1),
        d_c * d_a.conj() * (m_c * m_a / c1),
        d_b * d_a.conj() * (m_b * m_a / c1),
    ))
}

/// Weak measurement at `t = 0`, free evolution to `t`, then reversal.
///
/// With all strengths zero this is the bare reduced state at time `t`.
pub fn protocol_state(
    initial: &AmplitudeVector,
    params: &SystemParams,
    strengths: &MeasurementStrengths,
    t: f64,
) -> Result<DensityMatrix3> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    params.validate()?;
    let measured = apply_weak_measurement(initial, strengths)?;
    let evolved = evolve_amplitudes(&measured, params, t);
    if strengths.pr == 0.0 && strengths.qr == 0.0 {
        return density_from_amplitudes(&evolved);
    }
    apply_reversal(&evolved, strengths)
}
