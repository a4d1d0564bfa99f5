//! Density-matrix state and its real coordinate chart.
//!
//! Only the upper triangle is stored: three real populations and the three
//! coherences rho01, rho02, rho12. The lower triangle exists implicitly by
//! conjugation, so every `DensityMatrix` is Hermitian by construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for accepting an external 3x3 matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Unit-trace tolerance for physical states.
pub const TRACE_TOL: f64 = 1e-12;

/// Slack allowed on population bounds for solver outputs.
pub const POPULATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho01: Complex64,
    pub rho02: Complex64,
    pub rho12: Complex64,
}

/// The 9 real coordinates the linear generator acts on, in the fixed order
/// (rho00, rho11, rho22, Re rho01, Im rho01, Re rho02, Im rho02,
///  Re rho12, Im rho12).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealStateVector(pub [f64; 9]);

impl RealStateVector {
    pub fn zero() -> Self {
        RealStateVector([0.0; 9])
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn inf_norm(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl DensityMatrix {
    /// Ground state |0⟩⟨0|.
    pub fn ground() -> Self {
        DensityMatrix::diagonal(1.0, 0.0, 0.0)
    }

    pub fn diagonal(rho00: f64, rho11: f64, rho22: f64) -> Self {
        DensityMatrix {
            rho00,
            rho11,
            rho22,
            rho01: Complex64::ZERO,
            rho02: Complex64::ZERO,
            rho12: Complex64::ZERO,
        }
    }

    /// Accepts a full 3x3 complex matrix, validating Hermiticity to
    /// [`HERMITICITY_TOL`]; keeps the upper triangle and the real diagonal.
    #[allow(clippy::needless_range_loop)]
    pub fn from_matrix(m: &[[Complex64; 3]; 3]) -> Result<Self> {
        let mut max_dev = 0.0f64;
        for i in 0..3 {
            max_dev = max_dev.max(m[i][i].im.abs());
            for j in (i + 1)..3 {
                max_dev = max_dev.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
        if max_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                max_dev,
                tol: HERMITICITY_TOL,
            });
        }
        Ok(DensityMatrix {
            rho00: m[0][0].re,
            rho11: m[1][1].re,
            rho22: m[2][2].re,
            rho01: m[0][1],
            rho02: m[0][2],
            rho12: m[1][2],
        })
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11 + self.rho22
    }

    /// Checks the physical-state invariants: unit trace to [`TRACE_TOL`] and
    /// populations inside [-POPULATION_SLACK, 1+POPULATION_SLACK].
    pub fn validate_physical(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Unphysical(format!(
                "trace = {tr} deviates from 1 by more than {TRACE_TOL:.0e}"
            )));
        }
        for (name, v) in [
            ("rho00", self.rho00),
            ("rho11", self.rho11),
            ("rho22", self.rho22),
        ] {
            if !(-POPULATION_SLACK..=1.0 + POPULATION_SLACK).contains(&v) {
                return Err(Error::Unphysical(format!(
                    "population {name} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Field-by-field move into the real chart; bit-exact.
    pub fn to_real(&self) -> RealStateVector {
        RealStateVector([
            self.rho00,
            self.rho11,
            self.rho22,
            self.rho01.re,
            self.rho01.im,
            self.rho02.re,
            self.rho02.im,
            self.rho12.re,
            self.rho12.im,
        ])
    }

    /// Inverse of [`to_real`](Self::to_real); bit-exact.
    pub fn from_real(x: &RealStateVector) -> Self {
        let v = x.0;
        DensityMatrix {
            rho00: v[0],
            rho11: v[1],
            rho22: v[2],
            rho01: Complex64::new(v[3], v[4]),
            rho02: Complex64::new(v[5], v[6]),
            rho12: Complex64::new(v[7], v[8]),
        }
    }
}
