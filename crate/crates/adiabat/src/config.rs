use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use vortexfield::{FlatBundleFamily, HolonomyPath, TauProfile};

use crate::error::{CliError, Result};

/// Optional JSON scenario; every key has a default and unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Summand holonomies for `vortex` when no braid is given.
    pub holonomies: Option<Vec<[f64; 2]>>,
    /// Summand (0-based) carrying `Φ`.
    pub active: usize,
    /// Smooth family used by `transport`, `newton` and `check-identities` instead of a braid.
    pub family: Option<FamilySpec>,
    /// Requested fixed strands per class for `braid-make`, keyed like `"(0,1)"`.
    pub targets: BTreeMap<String, usize>,
    pub tau_amp: f64,
    pub tau_osc: f64,
    pub tau_mode: [i64; 2],
    pub vortex_tol: f64,
    pub moment_tol: f64,
    pub psi_tol: f64,
    pub max_halvings: u32,
    /// Transport steps per time slice in `newton` and `check-identities`.
    pub substeps: usize,
    pub assemble_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub linear_tol: f64,
    pub max_linear_iter: usize,
    pub samples: usize,
    /// Fourier band of the identity test vectors.
    pub test_modes: i64,
    /// Amplitude of the `cos 2πt` perturbation of `Φ` used as negative control.
    pub control_amp: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            holonomies: None,
            active: 0,
            family: None,
            targets: BTreeMap::new(),
            tau_amp: 0.0,
            tau_osc: 0.0,
            tau_mode: [1, 0],
            vortex_tol: 1e-10,
            moment_tol: 1e-6,
            psi_tol: 1e-10,
            max_halvings: 6,
            substeps: 4,
            assemble_tol: 1e-6,
            newton_tol: 1e-9,
            newton_max_iter: 12,
            linear_tol: 1e-11,
            max_linear_iter: 4000,
            samples: 50,
            test_modes: 2,
            control_amp: 0.1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub paths: Vec<PathSpec>,
    #[serde(default = "identity")]
    pub fstar: [[i64; 2]; 2],
    /// One-based images of the closing permutation; identity when absent.
    #[serde(default)]
    pub closing: Option<Vec<usize>>,
}

fn identity() -> [[i64; 2]; 2] {
    [[1, 0], [0, 1]]
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PathSpec {
    Constant { point: [f64; 2] },
    Circle {
        center: [f64; 2],
        radius: f64,
        #[serde(default = "one")]
        turns: f64,
        #[serde(default)]
        phase: f64,
    },
    Polyline { times: Vec<f64>, points: Vec<[f64; 2]> },
}

impl ScenarioConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let positive = [
            ("vortex_tol", self.vortex_tol),
            ("moment_tol", self.moment_tol),
            ("psi_tol", self.psi_tol),
            ("assemble_tol", self.assemble_tol),
            ("newton_tol", self.newton_tol),
            ("linear_tol", self.linear_tol),
        ];
        if let Some((k, _)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(CliError::Config(format!("{k} must be a positive number")));
        }
        if self.substeps == 0 || self.newton_max_iter == 0 || self.max_linear_iter == 0 || self.samples == 0 {
            return Err(CliError::Config("substeps, iteration caps and samples must be positive".into()));
        }
        if self.test_modes < 0 {
            return Err(CliError::Config("test_modes must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn tau(&self, mean: f64) -> TauProfile {
        TauProfile { mean, amp: self.tau_amp, osc: self.tau_osc, mode: self.tau_mode }
    }
}

impl FamilySpec {
    pub fn build(&self, tau: TauProfile) -> Result<FlatBundleFamily> {
        let n = self.paths.len();
        let closing = match &self.closing {
            None => (0..n).collect(),
            Some(c) => c
                .iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| CliError::Config("closing is 1-based".into())))
                .collect::<Result<Vec<_>>>()?,
        };
        let paths = self
            .paths
            .iter()
            .map(|p| match p {
                PathSpec::Constant { point } => HolonomyPath::constant(*point),
                PathSpec::Circle { center, radius, turns, phase } => {
                    HolonomyPath::Circle { center: *center, radius: *radius, turns: *turns, phase: *phase }
                }
                PathSpec::Polyline { times, points } => HolonomyPath::Polyline { times: times.clone(), points: points.clone() },
            })
            .collect();
        Ok(FlatBundleFamily { paths, fstar: self.fstar, closing, tau })
    }
}
