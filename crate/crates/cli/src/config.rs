use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Tolerances, sample sizes and the seed for `verify-all`. Two runs with
/// equal configurations produce byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Float tolerance for group membership and decompositions.
    pub structure_tol: f64,
    /// Requested absolute error for every quadrature.
    pub quad_tol: f64,
    /// Largest accepted transfer-identity residual.
    pub transfer_tol: f64,
    pub seed: u64,
    pub group_samples: usize,
    pub iwasawa_samples: usize,
    pub orbit_samples: usize,
    pub elliptic_pairs: usize,
    pub theta_k_min: i32,
    pub theta_k_max: i32,
    pub transfer_grid_n: usize,
    pub fiber_points: usize,
    pub enumeration_bound: u32,
    /// Where the JSON summary is written besides stdout. Not part of the
    /// report, so that runs writing to different files still compare equal.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            structure_tol: 1e-10,
            quad_tol: 1e-10,
            transfer_tol: 1e-8,
            seed: 20_160_901,
            group_samples: 1000,
            iwasawa_samples: 100,
            orbit_samples: 1000,
            elliptic_pairs: 20,
            theta_k_min: 3,
            theta_k_max: 10,
            transfer_grid_n: 32,
            fiber_points: 100,
            enumeration_bound: 5,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("structure_tol", self.structure_tol),
            ("quad_tol", self.quad_tol),
            ("transfer_tol", self.transfer_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [
            ("group_samples", self.group_samples),
            ("iwasawa_samples", self.iwasawa_samples),
            ("orbit_samples", self.orbit_samples),
            ("elliptic_pairs", self.elliptic_pairs),
            ("transfer_grid_n", self.transfer_grid_n),
            ("fiber_points", self.fiber_points),
        ] {
            if v == 0 {
                return Err(CliError::Usage(format!("{name} must be at least 1")));
            }
        }
        if self.enumeration_bound == 0 {
            return Err(CliError::Usage("enumeration_bound must be at least 1".into()));
        }
        if self.theta_k_min < 1 || self.theta_k_max - self.theta_k_min < 7 {
            return Err(CliError::Usage(format!(
                "theta levels {}..={} need k_min >= 1 and at least 8 levels",
                self.theta_k_min, self.theta_k_max
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let c = RunConfig { transfer_tol: 0.0, ..RunConfig::default() };
        assert!(matches!(c.validate(), Err(CliError::Usage(_))));
        let c = RunConfig { quad_tol: f64::NAN, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"seed": 5, "transfer_tol": 1e-20}"#).unwrap();
        assert_eq!(c.seed, 5);
        assert_eq!(c.transfer_tol, 1e-20);
        assert_eq!(c.orbit_samples, 1000);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 5}"#).is_err());
    }
}
