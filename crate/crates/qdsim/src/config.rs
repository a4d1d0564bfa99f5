//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, unknown keys are rejected
//! with a nearest-key suggestion. Command-line flags override file values
//! (with a notice). Defaults are the spectra's reference parameter set.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{EquationMode, ModelParams};
use crate::solve::SolverSettings;

pub const VALID_KEYS: &[&str] = &[
    "omega_rabi",
    "delta1",
    "omega12",
    "t_e",
    "gamma1",
    "gamma2",
    "gamma3",
    "big_gamma10",
    "big_gamma12",
    "big_gamma20",
    "mode",
    "dt",
    "t_max",
    "relax_tol",
    "sample_stride",
    "sweep_start",
    "sweep_stop",
    "sweep_count",
    "te_start",
    "te_stop",
    "te_count",
    "precision",
    "omega10",
];

/// A non-fatal remark produced while parsing (override precedence, ignored
/// keys). The CLI prints these on the diagnostic stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Notice(pub String);

impl fmt::Display for Notice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub solver: SolverSettings,
    /// Sweep axis; None picks the subcommand's default range.
    pub sweep_start: Option<f64>,
    pub sweep_stop: Option<f64>,
    pub sweep_count: Option<usize>,
    /// Second axis of the 2-D grid subcommand.
    pub te_start: f64,
    pub te_stop: f64,
    pub te_count: usize,
    /// Significant digits in CSV and printed floats.
    pub precision: usize,
    /// Accepted for compatibility with captions that quote a level spacing;
    /// the detunings already encode it, so the value is ignored.
    pub omega10: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ModelParams::default(),
            solver: SolverSettings::default(),
            sweep_start: None,
            sweep_stop: None,
            sweep_count: None,
            te_start: 0.0,
            te_stop: 10.0,
            te_count: 101,
            precision: 9,
            omega10: None,
        }
    }
}

impl RunConfig {
    /// Single-line echo of every value-affecting setting, in a fixed order.
    /// `# ` + this line is the second line of every CSV; re-parsing the
    /// pairs reproduces the config.
    pub fn echo(&self) -> String {
        let mut s = format!(
            "{} dt={} t_max={} relax_tol={} sample_stride={}",
            self.params,
            self.solver.dt,
            self.solver.t_max,
            self.solver.relax_tol,
            self.solver.sample_stride,
        );
        if let (Some(a), Some(b), Some(n)) = (self.sweep_start, self.sweep_stop, self.sweep_count) {
            s.push_str(&format!(" sweep_start={a} sweep_stop={b} sweep_count={n}"));
        }
        s.push_str(&format!(
            " te_start={} te_stop={} te_count={} precision={}",
            self.te_start, self.te_stop, self.te_count, self.precision
        ));
        if let Some(w) = self.omega10 {
            s.push_str(&format!(" omega10={w}"));
        }
        s
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let bad_num = |what: &str| Error::ConfigLine {
            line,
            msg: format!("malformed {what} for '{key}': '{value}'"),
        };
        let f = value.parse::<f64>().map_err(|_| bad_num("number"));
        let n = value.parse::<usize>().map_err(|_| bad_num("integer"));
        match key {
            "omega_rabi" => self.params.omega_rabi = f?,
            "delta1" => self.params.delta1 = f?,
            "omega12" => self.params.omega12 = f?,
            "t_e" => self.params.t_e = f?,
            "gamma1" => self.params.gamma1 = f?,
            "gamma2" => self.params.gamma2 = f?,
            "gamma3" => self.params.gamma3 = f?,
            "big_gamma10" => self.params.big_gamma10 = f?,
            "big_gamma12" => self.params.big_gamma12 = f?,
            "big_gamma20" => self.params.big_gamma20 = f?,
            "mode" => {
                self.params.mode = EquationMode::parse(value).map_err(|e| Error::ConfigLine {
                    line,
                    msg: e.to_string(),
                })?
            }
            "dt" => self.solver.dt = f?,
            "t_max" => self.solver.t_max = f?,
            "relax_tol" => self.solver.relax_tol = f?,
            "sample_stride" => self.solver.sample_stride = n?,
            "sweep_start" => self.sweep_start = Some(f?),
            "sweep_stop" => self.sweep_stop = Some(f?),
            "sweep_count" => self.sweep_count = Some(n?),
            "te_start" => self.te_start = f?,
            "te_stop" => self.te_stop = f?,
            "te_count" => self.te_count = n?,
            "precision" => self.precision = n?,
            "omega10" => self.omega10 = Some(f?),
            other => {
                return Err(Error::ConfigLine {
                    line,
                    msg: format!(
                        "unknown key '{}' (nearest valid key: '{}')",
                        other,
                        nearest_key(other)
                    ),
                })
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.solver.validate()?;
        if let (Some(a), Some(b)) = (self.sweep_start, self.sweep_stop) {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::Config(format!(
                    "sweep_start = {a} must be finite and below sweep_stop = {b}"
                )));
            }
        }
        if let Some(n) = self.sweep_count {
            if n < 2 {
                return Err(Error::Config(format!("sweep_count = {n} must be >= 2")));
            }
        }
        if !self.te_start.is_finite() || !self.te_stop.is_finite() || self.te_start >= self.te_stop
        {
            return Err(Error::Config(format!(
                "te_start = {} must be finite and below te_stop = {}",
                self.te_start, self.te_stop
            )));
        }
        if self.te_count < 2 {
            return Err(Error::Config(format!(
                "te_count = {} must be >= 2",
                self.te_count
            )));
        }
        if !(1..=17).contains(&self.precision) {
            return Err(Error::Config(format!(
                "precision = {} must be in 1..=17",
                self.precision
            )));
        }
        Ok(())
    }
}

/// Parses a config document and applies command-line overrides on top
/// (flag wins, with a notice naming both values).
pub fn parse_config(
    text: &str,
    overrides: &[(String, String)],
) -> Result<(RunConfig, Vec<Notice>)> {
    let mut cfg = RunConfig::default();
    let mut notices = Vec::new();
    let mut file_values: Vec<(String, String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigLine {
            line: line_no,
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(Error::ConfigLine {
                line: line_no,
                msg: format!("empty value for '{key}'"),
            });
        }
        cfg.set(key, value, line_no)?;
        file_values.push((key.to_string(), value.to_string(), line_no));
    }

    let from_file: HashSet<&str> = file_values.iter().map(|(k, _, _)| k.as_str()).collect();
    for (key, value) in overrides {
        if from_file.contains(key.as_str()) {
            let old = &file_values
                .iter()
                .rev()
                .find(|(k, _, _)| k == key)
                .unwrap()
                .1;
            if old != value {
                notices.push(Notice(format!(
                    "{key}: command-line value {value} overrides file value {old}"
                )));
            }
        }
        cfg.set(key, value, 0)?;
    }

    if cfg.omega10.is_some() {
        notices.push(Notice(
            "omega10 is accepted for compatibility and ignored (set delta1/omega12 instead)".into(),
        ));
    }
    cfg.validate()?;
    Ok((cfg, notices))
}

fn nearest_key(unknown: &str) -> &'static str {
    VALID_KEYS
        .iter()
        .min_by_key(|k| levenshtein(unknown, k))
        .unwrap()
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn empty_config_yields_reference_defaults() {
        let (cfg, notices) = parse_config("", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert!(notices.is_empty());
        assert_eq!(cfg.params.gamma1, 1.0);
        assert_eq!(cfg.params.gamma2, 1.0);
        assert_eq!(cfg.params.gamma3, 0.25);
        assert_eq!(cfg.params.big_gamma10, 0.5);
        assert_eq!(cfg.params.omega_rabi, 0.5);
        assert_eq!(cfg.params.omega12, 0.0);
        assert_eq!(cfg.params.mode, EquationMode::Corrected);
        assert_eq!(cfg.precision, 9);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "\n# full-line comment\n  t_e = 2.0  # trailing comment\n\n";
        let (cfg, _) = parse_config(text, &[]).unwrap();
        assert_eq!(cfg.params.t_e, 2.0);
    }

    #[test]
    fn flag_overrides_file_with_notice() {
        let (cfg, notices) = parse_config("t_e = 6.0\n", &ov(&[("t_e", "10.0")])).unwrap();
        assert_eq!(cfg.params.t_e, 10.0);
        assert_eq!(notices.len(), 1);
        assert!(notices[0].0.contains("overrides file value 6.0"));
    }

    #[test]
    fn equal_flag_and_file_values_need_no_notice() {
        let (_, notices) = parse_config("t_e = 6.0\n", &ov(&[("t_e", "6.0")])).unwrap();
        assert!(notices.is_empty());
    }

    #[test]
    fn unknown_key_suggests_nearest() {
        let err = parse_config("bogus = 1\n", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown key 'bogus'"), "{msg}");
        assert!(msg.contains("nearest valid key"), "{msg}");
        assert!(msg.contains("line 1"), "{msg}");

        let err = parse_config("gamma_1 = 1\n", &[]).unwrap_err();
        assert!(err.to_string().contains("'gamma1'"));
    }

    #[test]
    fn malformed_number_reports_line() {
        let err = parse_config("t_e = 2.0\ndelta1 = abc\n", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("delta1"), "{msg}");
    }

    #[test]
    fn omega10_is_ignored_with_notice() {
        let (cfg, notices) = parse_config("omega10 = 0.2\n", &[]).unwrap();
        assert_eq!(cfg.omega10, Some(0.2));
        assert_eq!(cfg.params, ModelParams::default());
        assert!(notices.iter().any(|n| n.0.contains("ignored")));
    }

    #[test]
    fn mode_values_are_checked() {
        let (cfg, _) = parse_config("mode = verbatim\n", &[]).unwrap();
        assert_eq!(cfg.params.mode, EquationMode::Verbatim);
        let err = parse_config("mode = fixed\n", &[]).unwrap_err();
        assert!(err.to_string().contains("invalid mode"));
    }

    #[test]
    fn bad_sweep_bounds_are_rejected() {
        assert!(parse_config("sweep_start = 2\nsweep_stop = 1\n", &[]).is_err());
        assert!(parse_config("sweep_count = 1\n", &[]).is_err());
        assert!(parse_config("precision = 0\n", &[]).is_err());
        assert!(parse_config("precision = 18\n", &[]).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let (mut cfg, _) = parse_config(
            "t_e = 6\ngamma3 = 0.3\nmode = verbatim\nprecision = 6\nomega10 = 0.2\n",
            &[],
        )
        .unwrap();
        cfg.sweep_start = Some(-10.0);
        cfg.sweep_stop = Some(10.0);
        cfg.sweep_count = Some(401);

        let echo = cfg.echo();
        let as_doc = echo.split(' ').collect::<Vec<_>>().join("\n");
        let (back, _) = parse_config(&as_doc, &[]).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.echo(), echo);
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(nearest_key("omega_rab"), "omega_rabi");
        assert_eq!(nearest_key("tmax"), "t_max");
    }
}
