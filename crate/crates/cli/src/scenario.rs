//! Scenario file schema and construction of the objects a run needs.
//!
//! Scenarios are JSON documents:
//!
//! ```json
//! {
//!   "kind": "two_bath",
//!   "parameters": { "gap": 1.0, "t_a": 1.0, "t_b": 2.0, "alpha": "max" },
//!   "checks": ["clausius", "cop"],
//!   "optimizer": { "restarts": 4, "max_iters": 200, "step_init": 0.5,
//!                  "step_shrink": 0.5, "convergence_tol": 1e-9, "seed": 0 }
//! }
//! ```
//!
//! Unknown fields are rejected with the offending field named; incomplete
//! parameter sets are rejected with the missing field named.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use corrtherm::linalg::DIM_CAP;
use corrtherm::optimize::SearchConfig;
use corrtherm::process::{complete_erasure, example1, example2, planar_rotation, Transition};
use corrtherm::states::{
    correlated_thermal_pair, correlation_bound, gibbs, random_density, random_hamiltonian,
    random_unitary, DensityMatrix, Hamiltonian,
};
use corrtherm::BipartiteLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Example1,
    Example2,
    TwoBath,
    Erasure,
    Zeroth,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    FirstLaw,
    InfoSecondLaw,
    LandauerGeneralized,
    LandauerClassic,
    Clausius,
    Cop,
    ClausiusChain,
    Zeroth,
}

/// Correlation strength: a number or the keyword `"max"` for the largest
/// feasible value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bath_qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Search objective selector for the `optimize` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    AnomalousFlow,
    Cop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<SearchConfig>,
    #[serde(default, skip_serializing_if = "is_default_objective")]
    pub objective: Objective,
}

fn is_default_objective(objective: &Objective) -> bool {
    *objective == Objective::AnomalousFlow
}

/// Two-bath inputs kept around for optimization and sweeps.
pub struct TwoBathSetup {
    pub rho: DensityMatrix,
    pub h_a: Hamiltonian,
    pub h_b: Hamiltonian,
    pub t_a: f64,
    pub t_b: f64,
    pub alpha: f64,
}

/// A scenario resolved into concrete objects.
pub struct BuiltScenario {
    pub transition: Option<Transition>,
    pub two_bath: Option<TwoBathSetup>,
    pub zeroth: Option<ZerothSetup>,
    pub checks: Vec<CheckName>,
}

pub struct ZerothSetup {
    pub rho: DensityMatrix,
    pub dims: Vec<usize>,
    pub hamiltonians: Vec<Hamiltonian>,
    pub temperature: f64,
}

/// Effective joint-dimension cap: `CORRTHERM_MAX_DIM` can lower the
/// built-in cap of 64, never raise it.
pub fn effective_dim_cap() -> anyhow::Result<usize> {
    match std::env::var("CORRTHERM_MAX_DIM") {
        Ok(raw) => {
            let parsed: usize = raw
                .parse()
                .with_context(|| format!("CORRTHERM_MAX_DIM must be an integer, got {raw:?}"))?;
            if parsed == 0 {
                bail!("CORRTHERM_MAX_DIM must be positive");
            }
            Ok(parsed.min(DIM_CAP))
        }
        Err(_) => Ok(DIM_CAP),
    }
}

fn check_cap(dim: usize, cap: usize) -> anyhow::Result<()> {
    if dim > cap {
        bail!("joint dimension {dim} exceeds the cap of {cap}");
    }
    Ok(())
}

impl Scenario {
    pub fn from_file(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario file {}", path.display()))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .with_context(|| format!("invalid scenario file {}", path.display()))?;
        Ok(scenario)
    }

    pub fn resolve_alpha(&self, h: &Hamiltonian, t_a: f64, t_b: f64) -> anyhow::Result<f64> {
        match &self.parameters.alpha {
            None => Ok(correlation_bound(h, h, t_a, t_b)?),
            Some(AlphaSpec::Value(v)) => Ok(*v),
            Some(AlphaSpec::Keyword(word)) if word == "max" => {
                Ok(correlation_bound(h, h, t_a, t_b)?)
            }
            Some(AlphaSpec::Keyword(word)) => {
                bail!("parameters.alpha: unknown keyword {word:?}, expected \"max\" or a number")
            }
        }
    }

    fn default_checks(&self) -> Vec<CheckName> {
        match self.kind {
            ScenarioKind::Example1 | ScenarioKind::Example2 => vec![
                CheckName::FirstLaw,
                CheckName::InfoSecondLaw,
                CheckName::LandauerGeneralized,
            ],
            ScenarioKind::Erasure | ScenarioKind::Custom => vec![
                CheckName::FirstLaw,
                CheckName::InfoSecondLaw,
                CheckName::LandauerGeneralized,
                CheckName::LandauerClassic,
                CheckName::ClausiusChain,
            ],
            ScenarioKind::TwoBath => vec![CheckName::Clausius],
            ScenarioKind::Zeroth => vec![CheckName::Zeroth],
        }
    }

    pub fn build(&self) -> anyhow::Result<BuiltScenario> {
        let cap = effective_dim_cap()?;
        let checks = if self.checks.is_empty() {
            self.default_checks()
        } else {
            self.checks.clone()
        };
        let built = match self.kind {
            ScenarioKind::Example1 | ScenarioKind::Example2 => {
                let p = self.parameters.p.clone().unwrap_or_else(|| vec![0.5, 0.5]);
                let temperature = self.parameters.temperature.unwrap_or(1.0);
                check_cap(p.len() * p.len(), cap)?;
                let transition = if self.kind == ScenarioKind::Example1 {
                    example1(&p, temperature)
                } else {
                    example2(&p, temperature)
                }
                .context("parameters.p")?;
                BuiltScenario {
                    transition: Some(transition),
                    two_bath: None,
                    zeroth: None,
                    checks,
                }
            }
            ScenarioKind::Erasure => {
                let temperature = self.parameters.temperature.unwrap_or(0.4);
                let qubits = self.parameters.bath_qubits.unwrap_or(2);
                let gap = self.parameters.gap.unwrap_or(1.0);
                let d_s = self.parameters.d_s.unwrap_or(2);
                if qubits == 0 {
                    bail!("parameters.bath_qubits: must be at least 1");
                }
                check_cap(d_s << qubits, cap)?;
                let mut h_bath = Hamiltonian::qubit(gap);
                for _ in 1..qubits {
                    h_bath = h_bath.joint_with(&Hamiltonian::qubit(gap))?;
                }
                let system = DensityMatrix::maximally_mixed(d_s)?;
                let transition =
                    complete_erasure(&system, &h_bath, temperature).context("erasure scenario")?;
                BuiltScenario {
                    transition: Some(transition),
                    two_bath: None,
                    zeroth: None,
                    checks,
                }
            }
            ScenarioKind::TwoBath => {
                let gap = self.parameters.gap.unwrap_or(1.0);
                let t_a = self.parameters.t_a.unwrap_or(1.0);
                let t_b = self.parameters.t_b.unwrap_or(2.0);
                check_cap(4, cap)?;
                let h = Hamiltonian::qubit(gap);
                let alpha = self.resolve_alpha(&h, t_a, t_b)?;
                let rho =
                    correlated_thermal_pair(&h, &h, t_a, t_b, alpha).context("parameters.alpha")?;
                // No angle means the identity transition, on which the
                // Clausius bound saturates at zero.
                let theta = self.parameters.theta.unwrap_or(0.0);
                let transition = Transition::from_unitary(
                    rho.clone(),
                    &planar_rotation(4, 1, 2, theta),
                    BipartiteLayout::new(2, 2),
                    h.clone(),
                    h.clone(),
                    Some(t_a),
                    t_b,
                )?;
                BuiltScenario {
                    transition: Some(transition),
                    two_bath: Some(TwoBathSetup {
                        rho,
                        h_a: h.clone(),
                        h_b: h,
                        t_a,
                        t_b,
                        alpha,
                    }),
                    zeroth: None,
                    checks,
                }
            }
            ScenarioKind::Zeroth => {
                let gap = self.parameters.gap.unwrap_or(1.0);
                let temperature = self.parameters.temperature.unwrap_or(1.0);
                check_cap(8, cap)?;
                let h = Hamiltonian::qubit(gap);
                let alpha = self.resolve_alpha(&h, temperature, temperature)?;
                let rho_ac = correlated_thermal_pair(&h, &h, temperature, temperature, alpha)
                    .context("parameters.alpha")?;
                let tau_b = gibbs(&h, temperature)?;
                let rho = tau_b.product(&rho_ac)?;
                BuiltScenario {
                    transition: None,
                    two_bath: None,
                    zeroth: Some(ZerothSetup {
                        rho,
                        dims: vec![2, 2, 2],
                        hamiltonians: vec![h.clone(), h.clone(), h],
                        temperature,
                    }),
                    checks,
                }
            }
            ScenarioKind::Custom => {
                let d_s = self.parameters.d_s.unwrap_or(2);
                let d_b = self.parameters.d_b.unwrap_or(2);
                let temperature = self.parameters.temperature.unwrap_or(1.0);
                let seed = self.parameters.seed.unwrap_or(0);
                check_cap(d_s * d_b, cap)?;
                let h_s = random_hamiltonian(d_s, seed.wrapping_add(1))?;
                let h_b = random_hamiltonian(d_b, seed.wrapping_add(2))?;
                let rho_s = random_density(d_s, d_s, seed.wrapping_add(3))?;
                let tau_b = gibbs(&h_b, temperature)?;
                let initial = rho_s.product(&tau_b)?;
                let u = random_unitary(d_s * d_b, seed.wrapping_add(4))?;
                let transition = Transition::from_unitary(
                    initial,
                    &u,
                    BipartiteLayout::new(d_s, d_b),
                    h_s,
                    h_b,
                    None,
                    temperature,
                )?;
                BuiltScenario {
                    transition: Some(transition),
                    two_bath: None,
                    zeroth: None,
                    checks,
                }
            }
        };
        Ok(built)
    }
}
