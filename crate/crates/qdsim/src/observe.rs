//! Observables and parameter sweeps.
//!
//! A sweep varies exactly one parameter over a uniform grid, solves the
//! steady state at every point (direct method), and evaluates the reported
//! quantities: the probe coherence rho10 (imaginary part = absorption-like
//! signal, real part = dispersion), the populations, and the residual of the
//! independent rhs route. Grid points are evaluated in parallel but rows are
//! assembled in grid order, so results are independent of thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::solve::{residual_norm, steady_state_direct};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParam {
    Delta1,
    TE,
    OmegaRabi,
}

impl SweptParam {
    pub fn key(self) -> &'static str {
        match self {
            SweptParam::Delta1 => "delta1",
            SweptParam::TE => "t_e",
            SweptParam::OmegaRabi => "omega_rabi",
        }
    }

    fn apply(self, base: &ModelParams, value: f64) -> ModelParams {
        let mut p = *base;
        match self {
            SweptParam::Delta1 => p.delta1 = value,
            SweptParam::TE => p.t_e = value,
            SweptParam::OmegaRabi => p.omega_rabi = value,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweptParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub base: ModelParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !self.start.is_finite() || !self.stop.is_finite() || self.start >= self.stop {
            return Err(Error::Domain(format!(
                "sweep start {} must be finite and below stop {}",
                self.start, self.stop
            )));
        }
        if self.count < 2 {
            return Err(Error::Domain(format!(
                "sweep count {} must be >= 2",
                self.count
            )));
        }
        Ok(())
    }

    /// i-th grid value; endpoints are hit exactly, and a symmetric range
    /// with odd count hits the midpoint exactly.
    pub fn grid_value(&self, i: usize) -> f64 {
        self.start + (self.stop - self.start) * (i as f64 / (self.count - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub swept: f64,
    pub re_rho10: f64,
    pub im_rho10: f64,
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub swept: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: SweptParam,
    pub rows: Vec<SweepRow>,
    /// Grid points whose solve failed; reported, not silently dropped.
    pub failures: Vec<SweepFailure>,
}

/// rho10 = conj(rho01). Im rho10 is the absorption-like signal (negative
/// values mean gain), Re rho10 the dispersion.
pub fn coherence_rho10(rho: &DensityMatrix) -> Complex64 {
    rho.rho01.conj()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let outcomes: Vec<(f64, Result<SweepRow>)> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let value = spec.grid_value(i);
            let p = spec.param.apply(&spec.base, value);
            let row = steady_state_direct(&p).map(|rho| {
                let r10 = coherence_rho10(&rho);
                SweepRow {
                    swept: value,
                    re_rho10: r10.re,
                    im_rho10: r10.im,
                    rho00: rho.rho00,
                    rho11: rho.rho11,
                    rho22: rho.rho22,
                    residual: residual_norm(&rho, &p),
                }
            });
            (value, row)
        })
        .collect();

    let mut rows = Vec::with_capacity(spec.count);
    let mut failures = Vec::new();
    for (value, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(SweepFailure {
                swept: value,
                error: e.to_string(),
            }),
        }
    }
    Ok(SweepResult {
        param: spec.param,
        rows,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    ReRho10,
    ImRho10,
    Rho00,
    Rho11,
    Rho22,
}

impl Column {
    fn get(self, row: &SweepRow) -> f64 {
        match self {
            Column::ReRho10 => row.re_rho10,
            Column::ImRho10 => row.im_rho10,
            Column::Rho00 => row.rho00,
            Column::Rho11 => row.rho11,
            Column::Rho22 => row.rho22,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub swept: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Interior extrema of a column: grid points where the sign of the first
/// difference changes. Plateaus resolve to their first point (ties toward
/// the smaller swept value); endpoints are never reported.
pub fn find_local_extrema(result: &SweepResult, column: Column) -> Vec<Extremum> {
    let rows = &result.rows;
    let mut out = Vec::new();
    if rows.len() < 3 {
        return out;
    }
    // index of the last nonzero difference seen, and its sign
    let mut prev_sign = 0i8;
    let mut prev_at = 0usize;
    for j in 0..rows.len() - 1 {
        let d = column.get(&rows[j + 1]) - column.get(&rows[j]);
        let sign = if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            continue;
        };
        if prev_sign != 0 && sign != prev_sign {
            let at = prev_at + 1; // first point of any flat run
            out.push(Extremum {
                swept: rows[at].swept,
                value: column.get(&rows[at]),
                kind: if sign > 0 {
                    ExtremumKind::Min
                } else {
                    ExtremumKind::Max
                },
            });
        }
        prev_sign = sign;
        prev_at = j;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransparencyMetrics {
    /// |Im rho10| linearly interpolated at delta1 = 0.
    pub value_at_zero: f64,
    /// Width of the maximal interval around delta1 = 0 where |Im rho10|
    /// stays at or below 0.1 * max |Im rho10| over the sweep. Edges are
    /// interpolated; a window reaching the sweep boundary is cut there.
    pub window_width: f64,
}

/// Threshold rule: epsilon = 0.1 * max |Im rho10| over the sweep.
pub const TRANSPARENCY_EPSILON_FACTOR: f64 = 0.1;

pub fn transparency_metrics(result: &SweepResult) -> Result<TransparencyMetrics> {
    let rows = delta1_rows_containing_zero(result)?;
    let n = rows.len();
    let mag: Vec<f64> = rows.iter().map(|r| r.im_rho10.abs()).collect();

    let i0 = nearest_to_zero(rows);
    let value_at_zero = if rows[i0].swept == 0.0 {
        mag[i0]
    } else {
        // bracket 0 between consecutive grid points and interpolate |Im|
        let (a, b) = if rows[i0].swept < 0.0 {
            (i0, i0 + 1)
        } else {
            (i0 - 1, i0)
        };
        let t = (0.0 - rows[a].swept) / (rows[b].swept - rows[a].swept);
        mag[a] + (mag[b] - mag[a]) * t
    };

    let eps = TRANSPARENCY_EPSILON_FACTOR * mag.iter().cloned().fold(0.0f64, f64::max);
    if value_at_zero > eps {
        return Ok(TransparencyMetrics {
            value_at_zero,
            window_width: 0.0,
        });
    }

    let mut lo = i0;
    while lo > 0 && mag[lo - 1] <= eps {
        lo -= 1;
    }
    let mut hi = i0;
    while hi + 1 < n && mag[hi + 1] <= eps {
        hi += 1;
    }
    let left = if lo == 0 {
        rows[0].swept
    } else {
        crossing(
            rows[lo - 1].swept,
            mag[lo - 1],
            rows[lo].swept,
            mag[lo],
            eps,
        )
    };
    let right = if hi == n - 1 {
        rows[n - 1].swept
    } else {
        crossing(
            rows[hi + 1].swept,
            mag[hi + 1],
            rows[hi].swept,
            mag[hi],
            eps,
        )
    };
    Ok(TransparencyMetrics {
        value_at_zero,
        window_width: right - left,
    })
}

/// Central difference of Re rho10 at the grid point nearest delta1 = 0.
pub fn dispersion_slope_at_resonance(result: &SweepResult) -> Result<f64> {
    let rows = delta1_rows_containing_zero(result)?;
    let i0 = nearest_to_zero(rows);
    if i0 == 0 || i0 == rows.len() - 1 {
        return Err(Error::Domain(
            "resonance sits on the sweep boundary; no central difference".into(),
        ));
    }
    Ok((rows[i0 + 1].re_rho10 - rows[i0 - 1].re_rho10) / (rows[i0 + 1].swept - rows[i0 - 1].swept))
}

fn delta1_rows_containing_zero(result: &SweepResult) -> Result<&[SweepRow]> {
    if result.param != SweptParam::Delta1 {
        return Err(Error::Domain(format!(
            "expected a delta1 sweep, got {}",
            result.param.key()
        )));
    }
    let rows = result.rows.as_slice();
    if rows.len() < 2 {
        return Err(Error::Domain("sweep has fewer than 2 rows".into()));
    }
    if rows.first().unwrap().swept > 0.0 || rows.last().unwrap().swept < 0.0 {
        return Err(Error::Domain(
            "delta1 = 0 lies outside the sweep range".into(),
        ));
    }
    Ok(rows)
}

fn nearest_to_zero(rows: &[SweepRow]) -> usize {
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.swept.abs() < rows[best].swept.abs() {
            best = i;
        }
    }
    best
}

/// Linear interpolation of the |Im rho10| = eps crossing between an outside
/// point (value above eps) and an inside point (at or below eps).
fn crossing(x_out: f64, v_out: f64, x_in: f64, v_in: f64, eps: f64) -> f64 {
    if v_out == v_in {
        return x_in;
    }
    let t = (v_out - eps) / (v_out - v_in);
    x_out + (x_in - x_out) * t
}
