use std::path::{Path, PathBuf};

use geowave::analysis::{RankConfig, StabilityConfig};
use geowave::averaging::{KarcherOptions, Kernel, KernelShape, Placement, SmoothingOptions};
use geowave::pyramid::ThresholdRule;
use geowave::schemes::{Filter, Scheme, SchemeKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::{read_filter, read_text};

/// Every tunable of a run. Loaded from `--config FILE` (JSON), then
/// overridden by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `haar`, `four-point`, `interpolating` (needs `mask`) or `midpoint`.
    pub scheme: String,
    /// Upscaling mask file for `interpolating` / `midpoint`.
    pub mask: Option<PathBuf>,
    pub levels: usize,
    /// Detail threshold for `compress`.
    pub eps: f64,
    /// Level ratio: geometric thresholds in `compress`, budget schedule in
    /// `analyze stability` (default 0.5 there).
    pub mu: Option<f64>,
    /// Quantization step for `compress`.
    pub quantize: Option<f64>,
    /// Smoothing radius for `smooth`, in units of the curve period.
    pub rho: f64,
    /// Radii for `analyze smoothing`.
    pub rhos: Vec<f64>,
    pub kernel: KernelShape,
    pub placement: Placement,
    /// Quadrature nodes over the kernel support.
    pub nodes: usize,
    pub karcher_tolerance: f64,
    pub karcher_max_iterations: usize,
    pub seed: u64,
    pub trials: usize,
    pub e1: f64,
    pub e2: f64,
    pub halvings: usize,
    pub iterations: usize,
    /// Chain length for `analyze rank`.
    pub n: usize,
    pub rank_step: f64,
    pub jacobian_step: f64,
    pub rank_tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rank = RankConfig::default();
        let karcher = KarcherOptions::default();
        RunConfig {
            scheme: "haar".into(),
            mask: None,
            levels: 3,
            eps: 0.0,
            mu: None,
            quantize: None,
            rho: 0.05,
            rhos: vec![0.2, 0.1, 0.05],
            kernel: KernelShape::Box,
            placement: Placement::Forward,
            nodes: SmoothingOptions::default().nodes,
            karcher_tolerance: karcher.tolerance,
            karcher_max_iterations: karcher.max_iterations,
            seed: 0,
            trials: 50,
            e1: 1e-3,
            e2: 1e-3,
            halvings: 4,
            iterations: 6,
            n: rank.n,
            rank_step: rank.step,
            jacobian_step: rank.h,
            rank_tolerance: rank.tau,
        }
    }
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::new("config", format!("`{name}` must be positive, got {x}")))
    }
}

fn nonnegative(name: &str, x: f64) -> CliResult<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::new("config", format!("`{name}` must be nonnegative, got {x}")))
    }
}

fn at_least(name: &str, x: usize, min: usize) -> CliResult<()> {
    if x >= min {
        Ok(())
    } else {
        Err(CliError::new("config", format!("`{name}` must be at least {min}, got {x}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        serde_json::from_str(&read_text(path)?).map_err(|e| CliError::new("config", format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        at_least("levels", self.levels, 1)?;
        nonnegative("eps", self.eps)?;
        if let Some(mu) = self.mu {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(CliError::new("config", format!("`mu` must lie in (0, 1), got {mu}")));
            }
        }
        if let Some(q) = self.quantize {
            positive("quantize", q)?;
        }
        positive("rho", self.rho)?;
        if self.rhos.is_empty() {
            return Err(CliError::new("config", "`rhos` must not be empty"));
        }
        for &r in &self.rhos {
            positive("rhos", r)?;
        }
        at_least("nodes", self.nodes, 1)?;
        positive("karcher_tolerance", self.karcher_tolerance)?;
        at_least("karcher_max_iterations", self.karcher_max_iterations, 1)?;
        at_least("trials", self.trials, 1)?;
        nonnegative("e1", self.e1)?;
        nonnegative("e2", self.e2)?;
        at_least("halvings", self.halvings, 1)?;
        at_least("iterations", self.iterations, 2)?;
        at_least("n", self.n, 1)?;
        positive("rank_step", self.rank_step)?;
        positive("jacobian_step", self.jacobian_step)?;
        positive("rank_tolerance", self.rank_tolerance)
    }

    pub fn karcher(&self) -> KarcherOptions {
        KarcherOptions { tolerance: self.karcher_tolerance, max_iterations: self.karcher_max_iterations }
    }

    pub fn scheme(&self) -> CliResult<Scheme> {
        let mask = self.mask.as_deref().map(read_filter).transpose()?;
        let kind = match (self.scheme.as_str(), mask) {
            ("haar", None) => SchemeKind::Haar,
            ("four-point", None) => SchemeKind::four_point(),
            ("interpolating", Some(m)) => SchemeKind::interpolating(m).map_err(|e| CliError::core("config", e))?,
            ("interpolating", None) => return Err(CliError::new("config", "scheme `interpolating` needs --mask")),
            ("midpoint", m) => {
                SchemeKind::midpoint(m.unwrap_or_else(Filter::haar_upscale)).map_err(|e| CliError::core("config", e))?
            }
            ("haar" | "four-point", Some(_)) => {
                return Err(CliError::new("config", format!("scheme `{}` takes no mask", self.scheme)))
            }
            (other, _) => return Err(CliError::new("config", format!("unknown scheme `{other}`"))),
        };
        Ok(Scheme::new(kind).map_err(|e| CliError::core("config", e))?.with_karcher(self.karcher()))
    }

    pub fn threshold(&self) -> ThresholdRule {
        match self.mu {
            Some(mu) => ThresholdRule::Geometric { eps: self.eps, mu },
            None => ThresholdRule::Absolute { eps: self.eps },
        }
    }

    pub fn kernel(&self) -> Kernel {
        Kernel { shape: self.kernel, placement: self.placement }
    }

    pub fn smoothing(&self) -> SmoothingOptions {
        SmoothingOptions { nodes: self.nodes, karcher: self.karcher() }
    }

    pub fn stability(&self) -> StabilityConfig {
        StabilityConfig {
            levels: self.levels,
            trials: self.trials,
            e1: self.e1,
            e2: self.e2,
            mu: self.mu.unwrap_or(0.5),
            seed: self.seed,
        }
    }

    pub fn rank(&self) -> RankConfig {
        RankConfig { n: self.n, step: self.rank_step, seed: self.seed, h: self.jacobian_step, tau: self.rank_tolerance }
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
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"levles": 3}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"levels": 5, "kernel": "hat"}"#).unwrap();
        assert_eq!((c.levels, c.kernel), (5, KernelShape::Hat));
    }

    #[test]
    fn invalid_values() {
        for bad in [
            RunConfig { levels: 0, ..Default::default() },
            RunConfig { eps: -1.0, ..Default::default() },
            RunConfig { mu: Some(1.0), ..Default::default() },
            RunConfig { rho: 0.0, ..Default::default() },
            RunConfig { karcher_tolerance: f64::NAN, ..Default::default() },
            RunConfig { rhos: vec![], ..Default::default() },
        ] {
            assert_eq!(bad.validate().unwrap_err().stage, "config");
        }
    }

    #[test]
    fn scheme_names() {
        let mk = |s: &str| RunConfig { scheme: s.into(), ..Default::default() }.scheme();
        assert_eq!(mk("haar").unwrap().kind, SchemeKind::Haar);
        assert_eq!(mk("four-point").unwrap().kind, SchemeKind::four_point());
        assert_eq!(mk("midpoint").unwrap().kind, SchemeKind::midpoint_haar());
        assert!(mk("interpolating").is_err());
        assert!(mk("spline").is_err());
    }
}
