//! Key-value configuration file (TOML syntax). Every key mirrors a command
//! line flag or a solver setting, and a value given here wins over the flag.
//!
//! ```toml
//! problems = "ext_rosenbrock,testquad"
//! n = 1000
//! solvers = "dense:c=1,lambda=0.5;conventional"
//! reps = 10
//! epsilon = 1e-10
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use lmtr_core::{SolverConfig, StopRule};
use serde::Deserialize;

use crate::{BenchError, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub problems: Option<String>,
    pub n: Option<usize>,
    pub solvers: Option<String>,
    pub reps: Option<usize>,
    pub discard: Option<usize>,
    pub out: Option<PathBuf>,
    pub parallel: Option<bool>,
    pub metric: Option<String>,
    pub format: Option<String>,
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,

    pub m: Option<usize>,
    pub epsilon: Option<f64>,
    pub c3: Option<f64>,
    pub eps_r: Option<f64>,
    pub delta0: Option<f64>,
    pub gamma0_perp: Option<f64>,
    pub max_iter: Option<usize>,
    pub stop_rule: Option<StopRule>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::parse(&text).map_err(|message| BenchError::ConfigFile {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    /// Overrides the solver settings present in the file.
    pub fn apply(&self, base: &mut SolverConfig) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        if let Some(m) = self.m {
            base.m = m;
        }
        set(&mut base.epsilon, self.epsilon);
        set(&mut base.c3, self.c3);
        set(&mut base.eps_r, self.eps_r);
        set(&mut base.delta0, self.delta0);
        set(&mut base.gamma0_perp, self.gamma0_perp);
        if let Some(k) = self.max_iter {
            base.max_iter = k;
        }
        if let Some(rule) = self.stop_rule {
            base.stop_rule = rule;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let cfg = FileConfig::parse(
            "n = 50\nsolvers = \"conventional\"\nin = \"runs\"\nstop_rule = \"absolute-inf-norm\"\nepsilon = 1e-6\n",
        )
        .unwrap();
        assert_eq!(cfg.n, Some(50));
        assert_eq!(cfg.input, Some(PathBuf::from("runs")));
        let mut base = SolverConfig::default();
        cfg.apply(&mut base);
        assert_eq!(base.stop_rule, StopRule::AbsoluteInfNorm);
        assert_eq!(base.epsilon, 1e-6);
        assert_eq!(base.m, 5);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(FileConfig::parse("nn = 3").is_err());
    }

    #[test]
    fn load_error_names_file() {
        let err = FileConfig::load(Path::new("/nonexistent/bench.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/bench.toml"));
    }
}
