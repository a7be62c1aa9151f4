//! Entropic and energetic functionals on density matrices.
//!
//! Entropies are computed in nats; [`EntropyValue`] carries the exact
//! bits conversion alongside. Energies are in the same natural units as
//! temperatures (`k = 1`).
//!
//! Sign conventions used crate-wide for a transition of a system S
//! coupled to a bath B at temperature `T`:
//!
//! - `heat_absorbed_by_system = T * dS(S|B)`, which equals `-T * dS_B`
//!   whenever the global entropy is preserved;
//! - `heat_dissipated_to_bath = -heat_absorbed_by_system`;
//! - the energetic heat `-dE_B` is a separate, first-class quantity so
//!   the two definitions can be compared on the same transition.
//!
//! Reports always print both signed heats with explicit labels.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, BipartiteLayout, Keep};
use crate::states::{gibbs, DensityMatrix, Hamiltonian};

/// Entropy in nats with its exact bits rendering (`bits = nats / ln 2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub nats: f64,
    pub bits: f64,
}

impl EntropyValue {
    pub fn from_nats(nats: f64) -> Self {
        Self {
            nats,
            bits: nats / LN_2,
        }
    }

    pub fn zero() -> Self {
        Self::from_nats(0.0)
    }
}

/// Scalar energy in natural units (`k = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyValue {
    pub value: f64,
}

impl EnergyValue {
    pub fn new(value: f64) -> Self {
        Self { value }
    }
}

/// Von Neumann entropy `-sum lambda ln lambda` with `0 ln 0 = 0`.
pub fn entropy(rho: &DensityMatrix) -> Result<EntropyValue> {
    let eigenvalues = rho.clamped_eigenvalues()?;
    let nats: f64 = eigenvalues
        .iter()
        .map(|&lambda| {
            if lambda > 0.0 {
                -lambda * lambda.ln()
            } else {
                0.0
            }
        })
        .sum();
    // Rounding can leave a tiny negative total on nearly pure states.
    Ok(EntropyValue::from_nats(nats.max(0.0)))
}

/// Conditional entropy `S(first|second) = S(joint) - S(second)`. Negative
/// values signal entanglement across the cut.
pub fn conditional_entropy(
    rho_joint: &DensityMatrix,
    layout: BipartiteLayout,
) -> Result<EntropyValue> {
    layout.check_joint(rho_joint.dim())?;
    let s_joint = entropy(rho_joint)?.nats;
    let s_second = entropy(&rho_joint.marginal(layout, Keep::Second)?)?.nats;
    Ok(EntropyValue::from_nats(s_joint - s_second))
}

/// Mutual information `I(first:second) = S_1 + S_2 - S_12`; zero exactly
/// on product states and non-negative up to solver noise.
pub fn mutual_information(
    rho_joint: &DensityMatrix,
    layout: BipartiteLayout,
) -> Result<EntropyValue> {
    layout.check_joint(rho_joint.dim())?;
    let s_first = entropy(&rho_joint.marginal(layout, Keep::First)?)?.nats;
    let s_second = entropy(&rho_joint.marginal(layout, Keep::Second)?)?.nats;
    let s_joint = entropy(rho_joint)?.nats;
    Ok(EntropyValue::from_nats(s_first + s_second - s_joint))
}

/// Internal energy `E = tr(H rho)`.
pub fn internal_energy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<EnergyValue> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: rho.dim(),
        });
    }
    let value = (h.matrix() * rho.matrix())
        .diagonal()
        .iter()
        .map(|z| z.re)
        .sum();
    Ok(EnergyValue::new(value))
}

/// Helmholtz free energy `F = E - T S`.
pub fn free_energy(rho: &DensityMatrix, h: &Hamiltonian, temperature: f64) -> Result<EnergyValue> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    let e = internal_energy(rho, h)?.value;
    let s = entropy(rho)?.nats;
    Ok(EnergyValue::new(e - temperature * s))
}

/// Free energy of a joint state generalized to correlated baths:
/// `E_S - T S(S|B)`. Coincides with the marginal's [`free_energy`] on
/// product states.
pub fn generalized_free_energy(
    rho_joint: &DensityMatrix,
    h_system: &Hamiltonian,
    temperature: f64,
    layout: BipartiteLayout,
) -> Result<EnergyValue> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    layout.check_joint(rho_joint.dim())?;
    let rho_s = rho_joint.marginal(layout, Keep::First)?;
    let e_s = internal_energy(&rho_s, h_system)?.value;
    let cond = conditional_entropy(rho_joint, layout)?.nats;
    Ok(EnergyValue::new(e_s - temperature * cond))
}

/// Work potential stored in correlations, `T * I(first:second)`.
pub fn work_from_correlations(
    rho_joint: &DensityMatrix,
    temperature: f64,
    layout: BipartiteLayout,
) -> Result<EnergyValue> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    let mi = mutual_information(rho_joint, layout)?;
    Ok(EnergyValue::new(temperature * mi.nats))
}

/// Total extractable work from the system: the local part
/// `F(rho_S) - F(tau_S)` plus the correlation part `T I(S:B)`.
///
/// The same quantity also equals the generalized free energy of the joint
/// state minus `F(tau_S)`; both routes are evaluated and must agree to
/// 1e-9, otherwise an internal identity error is raised.
pub fn extractable_work_total(
    rho_joint: &DensityMatrix,
    h_system: &Hamiltonian,
    temperature: f64,
    layout: BipartiteLayout,
) -> Result<EnergyValue> {
    layout.check_joint(rho_joint.dim())?;
    let rho_s = rho_joint.marginal(layout, Keep::First)?;
    let tau_s = gibbs(h_system, temperature)?;
    let local = free_energy(&rho_s, h_system, temperature)?.value
        - free_energy(&tau_s, h_system, temperature)?.value;
    let from_correlations = work_from_correlations(rho_joint, temperature, layout)?.value;
    let total = local + from_correlations;

    let alternate = generalized_free_energy(rho_joint, h_system, temperature, layout)?.value
        - free_energy(&tau_s, h_system, temperature)?.value;
    let residual = (total - alternate).abs();
    if residual > 1e-9 * total.abs().max(1.0) {
        return Err(Error::IdentityCheckFailed {
            context: "local-plus-correlation work vs generalized free-energy difference".into(),
            residual,
        });
    }
    Ok(EnergyValue::new(total))
}

/// Trace distance `|a - b|_1 / 2`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let diff = a.matrix() - b.matrix();
    let spectrum = herm_eig(&diff)?;
    Ok(0.5 * spectrum.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
