//! Reduced atomic density matrix and its ℓ1-norm coherence.
//!
//! Matrices are stored in the basis order `{|C⟩, |B⟩, |A⟩}`: index 0 is the
//! ground state, 1 is `|B⟩`, 2 is `|A⟩`.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::dynamics::AmplitudeVector;
use crate::error::{Error, Result};

/// Slack allowed on `|d_a|² + |d_b|² + |d_c|² <= 1`.
pub const NORM_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3 {
    pub entries: [[C64; 3]; 3],
}

impl DensityMatrix3 {
    pub fn from_entries(entries: [[C64; 3]; 3]) -> Self {
        Self { entries }
    }

    /// Builds a Hermitian matrix from its diagonal and upper triangle.
    pub fn from_upper(diag: [f64; 3], rho12: C64, rho13: C64, rho23: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        let mut entries = [[z; 3]; 3];
        for (i, d) in diag.iter().enumerate() {
            entries[i][i] = C64::new(*d, 0.0);
        }
        entries[0][1] = rho12;
        entries[0][2] = rho13;
        entries[1][2] = rho23;
        entries[1][0] = rho12.conj();
        entries[2][0] = rho13.conj();
        entries[2][1] = rho23.conj();
        Self { entries }
    }

    /// Entry with one-based indices, matching the usual `ρ_ij` notation.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i - 1][j - 1]
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    /// Largest `|ρ_ij - conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in i..3 {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in descending order, from the closed-form roots of the
    /// characteristic polynomial of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 3] {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[2]
    }

    /// Checks unit trace, Hermiticity and positive semidefiniteness.
    pub fn check_physical(&self) -> std::result::Result<(), String> {
        let tr = self.trace();
        if (tr - 1.0).norm() > TRACE_TOLERANCE {
            return Err(format!("trace {tr} differs from 1"));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(format!("hermiticity error {herm:e}"));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOLERANCE {
            return Err(format!("negative eigenvalue {min:e}"));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }
}

impl fmt::Display for DensityMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            writeln!(
                f,
                "[{:>9.5}{:+.5}i  {:>9.5}{:+.5}i  {:>9.5}{:+.5}i]",
                row[0].re, row[0].im, row[1].re, row[1].im, row[2].re, row[2].im
            )?;
        }
        Ok(())
    }
}

/// Traces the reservoir out of the pure system–reservoir state.
///
/// The reservoir weight is lumped into the ground-state population `ρ11`,
/// since every single-excitation reservoir state pairs with `|C⟩`.
pub fn density_from_amplitudes(amp: &AmplitudeVector) -> Result<DensityMatrix3> {
    let norm_sqr = amp.norm_sqr();
    if !norm_sqr.is_finite() || norm_sqr > 1.0 + NORM_TOLERANCE {
        return Err(Error::Unphysical { norm_sqr });
    }
    let AmplitudeVector { d_a, d_b, d_c } = *amp;
    Ok(DensityMatrix3::from_upper(
        [
            amp.reservoir_weight() + d_c.norm_sqr(),
            d_b.norm_sqr(),
            d_a.norm_sqr(),
        ],
        d_c * d_b.conj(),
        d_c * d_a.conj(),
        d_b * d_a.conj(),
    ))
}

/// Sum of the moduli of all six off-diagonal entries.
pub fn l1_coherence(rho: &DensityMatrix3) -> f64 {
    let e = &rho.entries;
    let mut sum = 0.0;
    for (i, row) in e.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if i != j {
                sum += z.norm();
            }
        }
    }
    sum
}

/// Eigenvalues of a 3×3 Hermitian matrix by cyclic Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// a real Givens rotation, so the result stays Hermitian throughout. Accurate
/// to a few ulps of the matrix norm, including degenerate spectra.
fn hermitian_eigenvalues(m: &[[C64; 3]; 3]) -> [f64; 3] {
    let mut a = *m;
    let scale: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    for _sweep in 0..32 {
        let off = a[0][1].norm_sqr() + a[0][2].norm_sqr() + a[1][2].norm_sqr();
        if off <= 1e-36 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            let mag = apq.norm();
            if mag == 0.0 {
                continue;
            }
            let tau = (a[q][q].re - a[p][p].re) / (2.0 * mag);
            let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            let phase = (apq / mag).conj();
            // u = diag(1, phase at q) · Givens(c, s)
            let mut u = [[C64::new(0.0, 0.0); 3]; 3];
            for (i, row) in u.iter_mut().enumerate() {
                row[i] = C64::new(1.0, 0.0);
            }
            u[p][p] = C64::new(c, 0.0);
            u[p][q] = C64::new(s, 0.0);
            u[q][p] = phase * -s;
            u[q][q] = phase * c;
            a = conjugate_by(&a, &u);
            a[p][q] = C64::new(0.0, 0.0);
            a[q][p] = C64::new(0.0, 0.0);
        }
    }
    let mut eig = [a[0][0].re, a[1][1].re, a[2][2].re];
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

/// `u† a u`
fn conjugate_by(a: &[[C64; 3]; 3], u: &[[C64; 3]; 3]) -> [[C64; 3]; 3] {
    let mut au = [[C64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            au[i][j] = (0..3).map(|k| a[i][k] * u[k][j]).sum();
        }
    }
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| u[k][i].conj() * au[k][j]).sum();
        }
    }
    out
}
