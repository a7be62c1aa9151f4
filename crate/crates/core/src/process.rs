//! Transitions between joint states and the unitaries that realize them.
//!
//! A [`Transition`] is a pair of joint states under fixed local
//! Hamiltonians; it is the unit every law verifier operates on. The
//! operational class is entropy preservation, validated numerically by
//! [`check_entropy_preserving`] rather than by constructing asymptotic
//! circuits. Explicit unitaries are available where they exist at desk
//! scale: eigenbasis rebasings, planar rotations, and block unitaries
//! commuting with a joint Hamiltonian.
//!
//! Hamiltonians are the same at both endpoints by construction. A
//! process that ends under a different Hamiltonian `H'` is the same
//! transition followed by a quench: its work corrects to
//! `W' = W + tr((H - H') rho_final)` while the heat is unchanged, so
//! fixed-Hamiltonian accounting loses no generality.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius_norm, herm_eig, herm_exp_i, BipartiteLayout, CMatrix, Keep};
use crate::states::{
    basis_state, classically_correlated, entangled_pure, gibbs, superposition_state,
    validate_probabilities, DensityMatrix, Hamiltonian,
};
use crate::thermo::{self, EnergyValue, EntropyValue};

/// Default tolerance for entropy-preservation checks.
pub const DEFAULT_ENTROPY_TOL: f64 = 1e-7;

/// Absolute gap below which two sorted eigenvalues of a joint Hamiltonian
/// are treated as degenerate when forming unitary blocks.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Tolerance for accepting an operator as unitary.
pub const UNITARITY_TOL: f64 = 1e-9;

/// A state pair under fixed Hamiltonians. The Hamiltonians apply to both
/// endpoints; `t_first` is only set when the first factor is itself a
/// bath (two-bath scenarios), `t_second` is the bath temperature.
#[derive(Debug, Clone)]
pub struct Transition {
    pub initial: DensityMatrix,
    pub final_state: DensityMatrix,
    pub layout: BipartiteLayout,
    pub h_first: Hamiltonian,
    pub h_second: Hamiltonian,
    pub t_first: Option<f64>,
    pub t_second: f64,
}

impl Transition {
    pub fn new(
        initial: DensityMatrix,
        final_state: DensityMatrix,
        layout: BipartiteLayout,
        h_first: Hamiltonian,
        h_second: Hamiltonian,
        t_first: Option<f64>,
        t_second: f64,
    ) -> Result<Self> {
        layout.check_joint(initial.dim())?;
        layout.check_joint(final_state.dim())?;
        if h_first.dim() != layout.d_first {
            return Err(Error::DimensionMismatch {
                expected: layout.d_first,
                actual: h_first.dim(),
            });
        }
        if h_second.dim() != layout.d_second {
            return Err(Error::DimensionMismatch {
                expected: layout.d_second,
                actual: h_second.dim(),
            });
        }
        if let Some(t) = t_first {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::NonPositiveTemperature(t));
            }
        }
        if !t_second.is_finite() || t_second <= 0.0 {
            return Err(Error::NonPositiveTemperature(t_second));
        }
        Ok(Self {
            initial,
            final_state,
            layout,
            h_first,
            h_second,
            t_first,
            t_second,
        })
    }

    /// Builds the transition realized by conjugating `initial` with `u`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_unitary(
        initial: DensityMatrix,
        u: &CMatrix,
        layout: BipartiteLayout,
        h_first: Hamiltonian,
        h_second: Hamiltonian,
        t_first: Option<f64>,
        t_second: f64,
    ) -> Result<Self> {
        let final_state = apply_unitary(&initial, u)?;
        Self::new(
            initial,
            final_state,
            layout,
            h_first,
            h_second,
            t_first,
            t_second,
        )
    }

    pub fn initial_first(&self) -> Result<DensityMatrix> {
        self.initial.marginal(self.layout, Keep::First)
    }

    pub fn initial_second(&self) -> Result<DensityMatrix> {
        self.initial.marginal(self.layout, Keep::Second)
    }

    pub fn final_first(&self) -> Result<DensityMatrix> {
        self.final_state.marginal(self.layout, Keep::First)
    }

    pub fn final_second(&self) -> Result<DensityMatrix> {
        self.final_state.marginal(self.layout, Keep::Second)
    }

    /// `H_first (x) I + I (x) H_second`.
    pub fn joint_hamiltonian(&self) -> Result<Hamiltonian> {
        self.h_first.joint_with(&self.h_second)
    }

    /// Change in total internal energy across the transition.
    pub fn total_energy_change(&self) -> Result<f64> {
        let h = self.joint_hamiltonian()?;
        let before = thermo::internal_energy(&self.initial, &h)?.value;
        let after = thermo::internal_energy(&self.final_state, &h)?.value;
        Ok(after - before)
    }
}

/// Outcome of an entropy-preservation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyPreservation {
    pub preserved: bool,
    /// `|S(final) - S(initial)|` in nats.
    pub drift: f64,
}

/// Compares initial and final global entropies at the given tolerance.
pub fn check_entropy_preserving(t: &Transition, tol: f64) -> Result<EntropyPreservation> {
    let before = thermo::entropy(&t.initial)?.nats;
    let after = thermo::entropy(&t.final_state)?.nats;
    let drift = (after - before).abs();
    Ok(EntropyPreservation {
        preserved: drift <= tol,
        drift,
    })
}

/// Unitary mapping the eigenbasis of `rho` onto the eigenbasis of
/// `sigma`. Exists exactly when the two spectra agree; spectra are
/// compared after sorting, at tolerance 1e-7.
pub fn eigenbasis_unitary(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<CMatrix> {
    const SPECTRUM_TOL: f64 = 1e-7;
    let spec_rho = herm_eig(rho.matrix())?;
    let spec_sigma = herm_eig(sigma.matrix())?;
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let mismatch = spec_rho
        .eigenvalues
        .iter()
        .zip(&spec_sigma.eigenvalues)
        .any(|(a, b)| (a - b).abs() > SPECTRUM_TOL);
    if mismatch {
        return Err(Error::SpectrumMismatch {
            lhs: spec_rho.eigenvalues,
            rhs: spec_sigma.eigenvalues,
            tol: SPECTRUM_TOL,
        });
    }
    let u = &spec_sigma.eigenvectors * spec_rho.eigenvectors.adjoint();
    linalg::ensure_unitary(&u, UNITARITY_TOL)?;
    let conjugated = &u * rho.matrix() * u.adjoint();
    let residual = frobenius_norm(&(&conjugated - sigma.matrix()));
    if residual > SPECTRUM_TOL {
        return Err(Error::IdentityCheckFailed {
            context: "eigenbasis unitary does not map the states onto each other".into(),
            residual,
        });
    }
    Ok(u)
}

/// Conjugation `U rho U^dagger`; entropy preserving by construction.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: u.nrows(),
        });
    }
    linalg::ensure_unitary(u, UNITARITY_TOL)?;
    DensityMatrix::new(u * rho.matrix() * u.adjoint())
}

fn require_diagonal(h: &Hamiltonian, dim: usize) -> Result<()> {
    if h.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: h.dim(),
        });
    }
    if !h.is_diagonal() {
        return Err(Error::ScenarioConstraint {
            reason: "scenario Hamiltonian must be diagonal in the correlation basis".into(),
        });
    }
    Ok(())
}

/// Erasure of classical correlations: `sum_i p_i |ii><ii|` goes to
/// `|phi><phi| (x) diag(p)` with `|phi> = sum_i sqrt(p_i)|i>`. The bath
/// marginal never changes; local energies are untouched for any diagonal
/// Hamiltonian, and both endpoints have global entropy `H(p)`.
pub fn example1(p: &[f64], temperature: f64) -> Result<Transition> {
    example1_with_hamiltonian(p, temperature, &Hamiltonian::zero(p.len()))
}

/// [`example1`] with a nonzero (diagonal) local Hamiltonian shared by
/// system and bath.
pub fn example1_with_hamiltonian(
    p: &[f64],
    temperature: f64,
    h: &Hamiltonian,
) -> Result<Transition> {
    validate_probabilities(p)?;
    let d = p.len();
    require_diagonal(h, d)?;
    let initial = classically_correlated(p)?;
    let phi = DensityMatrix::pure(&superposition_state(p))?;
    let bath = DensityMatrix::from_populations(p)?;
    let final_state = phi.product(&bath)?;
    Transition::new(
        initial,
        final_state,
        BipartiteLayout::new(d, d),
        h.clone(),
        h.clone(),
        None,
        temperature,
    )
}

/// Erasure of entanglement: `|Psi> = sum_i sqrt(p_i)|i>|i>` goes to the
/// product `|phi>|phi>`. Both endpoints are globally pure; the bath
/// entropy drops by `H(p)`, so the bath cools while the system is erased.
pub fn example2(p: &[f64], temperature: f64) -> Result<Transition> {
    example2_with_hamiltonian(p, temperature, &Hamiltonian::zero(p.len()))
}

/// [`example2`] with a nonzero (diagonal) local Hamiltonian shared by
/// system and bath.
pub fn example2_with_hamiltonian(
    p: &[f64],
    temperature: f64,
    h: &Hamiltonian,
) -> Result<Transition> {
    validate_probabilities(p)?;
    let d = p.len();
    require_diagonal(h, d)?;
    let initial = entangled_pure(p)?;
    let phi = DensityMatrix::pure(&superposition_state(p))?;
    let final_state = phi.product(&phi)?;
    Transition::new(
        initial,
        final_state,
        BipartiteLayout::new(d, d),
        h.clone(),
        h.clone(),
        None,
        temperature,
    )
}

/// Accounting for the correlation-to-work protocol: attach a maximally
/// mixed ancilla carrying the mutual information, decorrelate, extract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Box1Ledger {
    /// Whole-qubit ancilla count, `ceil` of the mutual information in bits.
    pub ancilla_qubits: u32,
    /// Exact correlation content; the ancilla entropy used by the
    /// bookkeeping below.
    pub mutual_information: EntropyValue,
    /// `T * I(S:B)` in nats-energy.
    pub work_extracted: EnergyValue,
    /// `S(AS|B)` before decorrelation, with the exact-valued ancilla.
    pub conditional_entropy_before: EntropyValue,
    /// `S(AS|B)` after decorrelation (= the system's local entropy).
    pub conditional_entropy_after: EntropyValue,
}

/// Builds the work-extraction ledger for a joint state at temperature
/// `T`. The decorrelation step is checked abstractly: the conditional
/// entropy of ancilla-plus-system given the bath must be unchanged, which
/// pins the ancilla entropy to exactly `I(S:B)`.
pub fn box1_ledger(
    rho_joint: &DensityMatrix,
    temperature: f64,
    layout: BipartiteLayout,
) -> Result<Box1Ledger> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    layout.check_joint(rho_joint.dim())?;
    let mi = thermo::mutual_information(rho_joint, layout)?;
    let s_joint = thermo::entropy(rho_joint)?.nats;
    let s_bath = thermo::entropy(&rho_joint.marginal(layout, Keep::Second)?)?.nats;
    let s_system = thermo::entropy(&rho_joint.marginal(layout, Keep::First)?)?.nats;

    let before = mi.nats + s_joint - s_bath;
    let after = s_system;
    let residual = (before - after).abs();
    if residual > 1e-9 {
        return Err(Error::IdentityCheckFailed {
            context: "decorrelation bookkeeping".into(),
            residual,
        });
    }

    let qubits = mi.bits.max(0.0).ceil() as u32;
    Ok(Box1Ledger {
        ancilla_qubits: qubits,
        mutual_information: mi,
        work_extracted: EnergyValue::new(temperature * mi.nats),
        conditional_entropy_before: EntropyValue::from_nats(before),
        conditional_entropy_after: EntropyValue::from_nats(after),
    })
}

/// Sizes of the degenerate eigenspaces of `h`, in descending-eigenvalue
/// order, grouped at absolute tolerance [`DEGENERACY_TOL`].
pub fn degenerate_blocks(h: &Hamiltonian) -> Result<Vec<usize>> {
    let spectrum = herm_eig(h.matrix())?;
    let mut blocks = Vec::new();
    let mut current = 1usize;
    for w in spectrum.eigenvalues.windows(2) {
        if (w[0] - w[1]).abs() <= DEGENERACY_TOL {
            current += 1;
        } else {
            blocks.push(current);
            current = 1;
        }
    }
    blocks.push(current);
    Ok(blocks)
}

/// Number of real parameters of the block-generator family for `h`:
/// `sum d_block^2` over its degenerate eigenspaces.
pub fn generator_param_count(h: &Hamiltonian) -> Result<usize> {
    Ok(degenerate_blocks(h)?.iter().map(|d| d * d).sum())
}

/// Energy-preserving unitary `exp(i G)` with a Hermitian generator `G`
/// that is block diagonal in the eigenbasis of `h_total`.
///
/// Parameters are consumed block by block (descending eigenvalue order);
/// within a block of size `d` the first `d` entries are the diagonal of
/// the generator and each off-diagonal pair `(i, j)` with `i < j`, in
/// row-major order, takes two entries `(re, im)` for `G[i][j] = re + i im`.
pub fn energy_preserving_unitary(h_total: &Hamiltonian, params: &[f64]) -> Result<CMatrix> {
    let spectrum = herm_eig(h_total.matrix())?;
    let blocks = degenerate_blocks(h_total)?;
    let expected: usize = blocks.iter().map(|d| d * d).sum();
    if params.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            actual: params.len(),
        });
    }

    let dim = h_total.dim();
    let mut u_eig = linalg::zeros(dim);
    let mut offset = 0usize;
    let mut cursor = 0usize;
    for &size in &blocks {
        let mut g = linalg::zeros(size);
        for i in 0..size {
            g[(i, i)] = Complex64::new(params[cursor], 0.0);
            cursor += 1;
        }
        for i in 0..size {
            for j in (i + 1)..size {
                let re = params[cursor];
                let im = params[cursor + 1];
                cursor += 2;
                g[(i, j)] = Complex64::new(re, im);
                g[(j, i)] = Complex64::new(re, -im);
            }
        }
        let u_block = herm_exp_i(&g)?;
        for i in 0..size {
            for j in 0..size {
                u_eig[(offset + i, offset + j)] = u_block[(i, j)];
            }
        }
        offset += size;
    }

    let u = &spectrum.eigenvectors * u_eig * spectrum.eigenvectors.adjoint();
    linalg::ensure_unitary(&u, UNITARITY_TOL)?;
    Ok(u)
}

/// Real rotation by `theta` in the plane of basis vectors `i` and `j`,
/// identity elsewhere.
pub fn planar_rotation(dim: usize, i: usize, j: usize, theta: f64) -> CMatrix {
    let mut u = linalg::identity(dim);
    let c = Complex64::new(theta.cos(), 0.0);
    let s = Complex64::new(theta.sin(), 0.0);
    u[(i, i)] = c;
    u[(j, j)] = c;
    u[(i, j)] = -s;
    u[(j, i)] = s;
    u
}

/// Complete erasure of an uncorrelated system into a thermal bath: the
/// system ends in its first basis state and the bath absorbs the entropy,
/// moving along the mixing path `(1-s) tau_B + s I/d` to the exactly
/// matching entropy. Fails when the bath has too little entropy headroom.
pub fn complete_erasure(
    system: &DensityMatrix,
    h_bath: &Hamiltonian,
    temperature: f64,
) -> Result<Transition> {
    let d_s = system.dim();
    let d_b = h_bath.dim();
    let tau_b = gibbs(h_bath, temperature)?;
    let s_system = thermo::entropy(system)?.nats;
    let s_bath = thermo::entropy(&tau_b)?.nats;
    let target = s_bath + s_system;
    let capacity = (d_b as f64).ln();
    if target > capacity + 1e-12 {
        return Err(Error::NoEntropyHeadroom {
            required_nats: target,
            capacity_nats: capacity,
        });
    }

    let uniform = DensityMatrix::maximally_mixed(d_b)?;
    let mix = |s: f64| -> Result<DensityMatrix> {
        DensityMatrix::new(tau_b.matrix().scale(1.0 - s) + uniform.matrix().scale(s))
    };
    // Entropy is monotone along the mixing path; bisect to the target.
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut bath_final = tau_b.clone();
    if s_system > 1e-15 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let candidate = mix(mid)?;
            let s_mid = thermo::entropy(&candidate)?.nats;
            if s_mid < target {
                lo = mid;
            } else {
                hi = mid;
            }
            bath_final = candidate;
            if (s_mid - target).abs() <= 1e-13 {
                break;
            }
        }
    }

    let erased = DensityMatrix::pure(&basis_state(d_s, 0))?;
    let initial = system.product(&tau_b)?;
    let final_state = erased.product(&bath_final)?;
    Transition::new(
        initial,
        final_state,
        BipartiteLayout::new(d_s, d_b),
        Hamiltonian::zero(d_s),
        h_bath.clone(),
        None,
        temperature,
    )
}
