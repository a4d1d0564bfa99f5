//! Deterministic CSV serialization.
//!
//! Layout, for every artifact: `# qdsim v1`, then `# ` + the config echo,
//! then the column header, then data rows. Every line ends in LF and every
//! float renders in scientific notation at the configured number of
//! significant digits, so identical runs produce byte-identical files.

use std::path::Path;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::observe::{SweepResult, SweepRow};
use crate::solve::Trajectory;
use crate::state::DensityMatrix;

pub const FORMAT_TAG: &str = "# qdsim v1";

pub const TRAJECTORY_HEADER: &str =
    "t,rho00,rho11,rho22,re_rho01,im_rho01,re_rho02,im_rho02,re_rho12,im_rho12";

pub const GRID_HEADER: &str = "t_e,delta1,re_rho10,im_rho10,rho00,rho11,rho22,residual";

/// `precision` significant digits in scientific notation; precision 3
/// renders -0.049261 as `-4.93e-2`. Zero never carries a sign.
pub fn format_sci(x: f64, precision: usize) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", precision.saturating_sub(1), x)
}

fn push_row(out: &mut String, fields: &[f64], precision: usize) {
    for (i, x) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format_sci(*x, precision));
    }
    out.push('\n');
}

fn preamble(cfg: &RunConfig, header: &str) -> String {
    format!("{FORMAT_TAG}\n# {}\n{header}\n", cfg.echo())
}

fn sweep_fields(row: &SweepRow) -> [f64; 7] {
    [
        row.swept,
        row.re_rho10,
        row.im_rho10,
        row.rho00,
        row.rho11,
        row.rho22,
        row.residual,
    ]
}

pub fn sweep_csv(result: &SweepResult, cfg: &RunConfig) -> String {
    let header = format!(
        "{},re_rho10,im_rho10,rho00,rho11,rho22,residual",
        result.param.key()
    );
    let mut out = preamble(cfg, &header);
    for row in &result.rows {
        push_row(&mut out, &sweep_fields(row), cfg.precision);
    }
    out
}

pub fn trajectory_csv(traj: &Trajectory, cfg: &RunConfig) -> String {
    let mut out = preamble(cfg, TRAJECTORY_HEADER);
    for (t, x) in &traj.samples {
        let mut fields = [0.0; 10];
        fields[0] = *t;
        fields[1..].copy_from_slice(&x.0);
        push_row(&mut out, &fields, cfg.precision);
    }
    out
}

/// Rows ordered with T_e as the slow axis and Δ₁ as the fast axis; each
/// block is one spectrum.
pub fn grid_csv(blocks: &[(f64, SweepResult)], cfg: &RunConfig) -> String {
    let mut out = preamble(cfg, GRID_HEADER);
    for (te, result) in blocks {
        for row in &result.rows {
            let s = sweep_fields(row);
            let mut fields = [0.0; 8];
            fields[0] = *te;
            fields[1..].copy_from_slice(&s);
            push_row(&mut out, &fields, cfg.precision);
        }
    }
    out
}

/// Fixed-point state printout for the terminal: 9 coordinates, one per
/// line, then the residual in scientific notation.
pub fn steady_report(rho: &DensityMatrix, residual: f64, precision: usize) -> String {
    let x = rho.to_real();
    let names = [
        "rho00", "rho11", "rho22", "re_rho01", "im_rho01", "re_rho02", "im_rho02", "re_rho12",
        "im_rho12",
    ];
    let mut out = String::new();
    for (name, v) in names.iter().zip(x.0.iter()) {
        let v = if *v == 0.0 { 0.0 } else { *v };
        out.push_str(&format!("{name} = {v:.precision$}\n"));
    }
    out.push_str(&format!("residual = {}\n", format_sci(residual, precision)));
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
