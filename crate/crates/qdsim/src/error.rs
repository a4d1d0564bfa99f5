use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not Hermitian: max deviation {max_dev:.3e} exceeds {tol:.0e}")]
    NotHermitian { max_dev: f64, tol: f64 },

    #[error("state is not physical: {0}")]
    Unphysical(String),

    #[error("degenerate steady state (pivot {pivot:.3e} below 1e-13) for {params}")]
    DegenerateSteadyState { pivot: f64, params: String },

    #[error("steady-state residual {residual:.3e} exceeds 1e-10 for {params}")]
    ResidualCheck { residual: f64, params: String },

    #[error("relaxation did not converge by t_max = {t_max}: residual {residual:.3e}")]
    NoConvergence { t_max: f64, residual: f64 },

    #[error("integration unstable at t = {t:.4}: population left [-0.1, 1.1]; reduce dt")]
    Unstable { t: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("config line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),
}
