//! Run configuration shared by the CLI commands.

use crate::error::{Error, Result};

/// Tolerances, solver budget and RNG seed. Every command is a pure function
/// of its input files and this configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol_aff: f64,
    pub tol_psd: f64,
    pub span_tol: f64,
    pub max_iter: usize,
    pub stall_window: usize,
    pub stall_ratio: f64,
    pub seed: u64,
    pub verbosity: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol_aff: 1e-8,
            tol_psd: 1e-10,
            span_tol: 1e-8,
            max_iter: 50_000,
            stall_window: 1000,
            stall_ratio: 1e-12,
            seed: 0,
            verbosity: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol_aff <= 0.0 || self.tol_psd <= 0.0 || self.span_tol <= 0.0 || self.stall_ratio <= 0.0 {
            return Err(Error::PreconditionViolation("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Apply the NCKERN_SEED environment override.
    pub fn with_env_seed(mut self) -> Self {
        if let Ok(s) = std::env::var("NCKERN_SEED") {
            if let Ok(v) = s.parse() {
                self.seed = v;
            }
        }
        self
    }
}
