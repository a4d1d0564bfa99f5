//! Physical parameters of the driven, tunnel-coupled three-level system.
//!
//! The levels are |0⟩ (ground), |1⟩ (directly driven), |2⟩ (coupled to |1⟩
//! by tunneling). Every rate is expressed in units of a common reference
//! rate, so the parameter set is dimensionless.

use std::fmt;

use crate::error::{Error, Result};

/// Which form of the tunneling term enters the rho02 equation of motion.
///
/// `Corrected` couples rho02 to rho01, which is what a tunneling Hamiltonian
/// between |1⟩ and |2⟩ produces and what yields detuning-symmetric spectra.
/// `Verbatim` keeps the self term (rho02 coupled to itself), which acts as a
/// shift of the effective two-photon detuning by `t_e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationMode {
    Corrected,
    Verbatim,
}

impl EquationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EquationMode::Corrected => "corrected",
            EquationMode::Verbatim => "verbatim",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(EquationMode::Corrected),
            "verbatim" => Ok(EquationMode::Verbatim),
            other => Err(Error::Config(format!(
                "invalid mode '{other}' (expected 'corrected' or 'verbatim')"
            ))),
        }
    }
}

impl fmt::Display for EquationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full parameter set of the equations of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Rabi frequency of the drive on the |0⟩↔|1⟩ transition.
    pub omega_rabi: f64,
    /// Laser detuning from the |0⟩↔|1⟩ transition.
    pub delta1: f64,
    /// Level splitting between |1⟩ and |2⟩; the |0⟩↔|2⟩ detuning is
    /// derived, never stored.
    pub omega12: f64,
    /// Electron tunneling coupling between |1⟩ and |2⟩.
    pub t_e: f64,
    /// Coherence decay rate of rho10.
    pub gamma1: f64,
    /// Coherence decay rate of rho12.
    pub gamma2: f64,
    /// Coherence decay rate of rho20.
    pub gamma3: f64,
    /// Population decay rate |1⟩ → |0⟩.
    pub big_gamma10: f64,
    /// Population decay rate |1⟩ → |2⟩.
    pub big_gamma12: f64,
    /// Population decay rate |2⟩ → |0⟩.
    pub big_gamma20: f64,
    pub mode: EquationMode,
}

impl Default for ModelParams {
    /// The spectra's reference operating point: unit coherence decay on the
    /// driven transition, slow rho20 decay, equal population decay channels.
    fn default() -> Self {
        ModelParams {
            omega_rabi: 0.5,
            delta1: 0.0,
            omega12: 0.0,
            t_e: 0.5,
            gamma1: 1.0,
            gamma2: 1.0,
            gamma3: 0.25,
            big_gamma10: 0.5,
            big_gamma12: 0.5,
            big_gamma20: 0.5,
            mode: EquationMode::Corrected,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_rabi", self.omega_rabi),
            ("delta1", self.delta1),
            ("omega12", self.omega12),
            ("t_e", self.t_e),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("big_gamma10", self.big_gamma10),
            ("big_gamma12", self.big_gamma12),
            ("big_gamma20", self.big_gamma20),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        let rates = [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("big_gamma10", self.big_gamma10),
            ("big_gamma12", self.big_gamma12),
            ("big_gamma20", self.big_gamma20),
        ];
        for (name, v) in rates {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must be >= 0")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "omega_rabi={} delta1={} omega12={} t_e={} gamma1={} gamma2={} gamma3={} \
             big_gamma10={} big_gamma12={} big_gamma20={} mode={}",
            self.omega_rabi,
            self.delta1,
            self.omega12,
            self.t_e,
            self.gamma1,
            self.gamma2,
            self.gamma3,
            self.big_gamma10,
            self.big_gamma12,
            self.big_gamma20,
            self.mode,
        )
    }
}

/// Detuning of the |0⟩↔|2⟩ two-photon pathway: delta1 - omega12.
pub fn derive_delta2(p: &ModelParams) -> f64 {
    p.delta1 - p.omega12
}
