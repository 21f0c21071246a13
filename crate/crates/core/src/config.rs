//! Run configuration: CLI-level knobs plus a flat key-value config file.
//! Unknown keys are rejected.

use crate::quad::QuadratureSpec;
use crate::{Error, Result};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub slow: bool,
    pub quad: QuadratureSpec,
    pub out_dir: Option<String>,
    pub emit_plots: bool,
    /// Optional directory for the case/identity data files; the builtin
    /// copies are used when absent.
    pub data_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            slow: false,
            quad: QuadratureSpec::default(),
            out_dir: None,
            emit_plots: false,
            data_dir: None,
        }
    }
}

impl RunConfig {
    /// Apply a flat key = value config file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let parse_f = |v: &str| -> Result<f64> {
                v.parse().map_err(|_| Error::config(format!("bad number for {key}: {v}")))
            };
            let parse_u = |v: &str| -> Result<usize> {
                v.parse().map_err(|_| Error::config(format!("bad integer for {key}: {v}")))
            };
            match key {
                "radius" => self.quad.radius = parse_f(value)?,
                "width" => self.quad.width = parse_f(value)?,
                "nodes_per_axis" => self.quad.nodes_per_axis = parse_u(value)?,
                "stages" => self.quad.stages = parse_u(value)?,
                "stage_growth" => self.quad.stage_growth = parse_f(value)?,
                "tolerance" => self.quad.tolerance = parse_f(value)?,
                "oversample" => self.quad.oversample = parse_u(value)?,
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|_| Error::config(format!("bad seed: {value}")))?;
                }
                "slow" => {
                    self.slow = match value {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        _ => return Err(Error::config(format!("bad boolean for slow: {value}"))),
                    }
                }
                "out_dir" => self.out_dir = Some(value.to_string()),
                "data_dir" => self.data_dir = Some(value.to_string()),
                other => return Err(Error::config(format!("unknown config key: {other}"))),
            }
        }
        self.quad.validate()
    }

    pub fn echo(&self) -> String {
        format!(
            "seed={} slow={} radius={} width={} nodes_per_axis={} stages={} stage_growth={} tolerance={} oversample={}",
            self.seed,
            self.slow,
            self.quad.radius,
            self.quad.width,
            self.quad.nodes_per_axis,
            self.quad.stages,
            self.quad.stage_growth,
            self.quad.tolerance,
            self.quad.oversample
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let mut c = RunConfig::default();
        c.apply_text("radius = 2.5\nnodes_per_axis = 128\nseed = 42\nslow = true\n# comment\n")
            .unwrap();
        assert_eq!(c.quad.radius, 2.5);
        assert_eq!(c.quad.nodes_per_axis, 128);
        assert_eq!(c.seed, 42);
        assert!(c.slow);
    }

    #[test]
    fn rejects_unknown_keys() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("radiuss = 2.5\n").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("nodes_per_axis = twelve\n").is_err());
        assert!(c.apply_text("nodes_per_axis = 4\n").is_err());
    }
}
