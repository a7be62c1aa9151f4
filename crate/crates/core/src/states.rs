//! Constructors for physical states and Hamiltonians.
//!
//! Density matrices are validated on construction (Hermitian, positive
//! semidefinite after clamping, unit trace), so downstream code can take
//! their invariants for granted. Randomized constructors are seeded and
//! reproducible.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    self, frobenius_norm, herm_eig, kron, partial_trace, trace, BipartiteLayout, CMatrix, CVector,
    Keep, DIM_CAP, EIGENVALUE_CLAMP, HERMITICITY_TOL,
};

/// Tolerance on `tr(rho) = 1` at construction.
pub const TRACE_TOL: f64 = 1e-9;

/// Hermitian, positive-semidefinite, unit-trace complex matrix. The
/// universal state object of the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a raw matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = linalg::ensure_square(&matrix)?;
        if dim == 0 || dim > DIM_CAP {
            return Err(Error::DimensionOverflow { dim, cap: DIM_CAP });
        }
        linalg::ensure_hermitian(&matrix)?;
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace {
                trace: tr,
                tol: TRACE_TOL,
            });
        }
        let spectrum = herm_eig(&matrix)?;
        if let Some(&lambda) = spectrum
            .eigenvalues
            .iter()
            .find(|&&lambda| lambda < -EIGENVALUE_CLAMP)
        {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: lambda,
                tol: EIGENVALUE_CLAMP,
            });
        }
        Ok(Self { matrix })
    }

    /// Rank-1 projector onto the given state vector (normalized here).
    pub fn pure(state: &CVector) -> Result<Self> {
        let norm = state.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NonFiniteEntries);
        }
        let normalized = state.unscale(norm);
        Self::new(&normalized * normalized.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(linalg::identity(dim).unscale(dim as f64))
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        let dim = populations.len();
        Self::new(CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(populations[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Reduced state of one tensor factor.
    pub fn marginal(&self, layout: BipartiteLayout, keep: Keep) -> Result<Self> {
        Self::new(partial_trace(&self.matrix, layout, keep)?)
    }

    /// Tensor product with `other`, this state leftmost.
    pub fn product(&self, other: &Self) -> Result<Self> {
        Self::new(kron(&self.matrix, &other.matrix)?)
    }

    /// Eigenvalues sorted descending, with the clamping rule applied:
    /// values in `[-1e-10, 0)` become 0, anything lower is an error.
    pub fn clamped_eigenvalues(&self) -> Result<Vec<f64>> {
        let spectrum = herm_eig(&self.matrix)?;
        spectrum
            .eigenvalues
            .into_iter()
            .map(|lambda| {
                if lambda < -EIGENVALUE_CLAMP {
                    Err(Error::NotPositiveSemidefinite {
                        eigenvalue: lambda,
                        tol: EIGENVALUE_CLAMP,
                    })
                } else {
                    Ok(lambda.max(0.0))
                }
            })
            .collect()
    }
}

/// Hermitian matrix defining energies; `k = 1` natural units, so
/// temperatures carry energy units.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
}

impl Hamiltonian {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = linalg::ensure_square(&matrix)?;
        if dim == 0 || dim > DIM_CAP {
            return Err(Error::DimensionOverflow { dim, cap: DIM_CAP });
        }
        linalg::ensure_hermitian(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: linalg::zeros(dim),
        }
    }

    pub fn diagonal(levels: &[f64]) -> Self {
        let dim = levels.len();
        Self {
            matrix: CMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    Complex64::new(levels[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Two-level Hamiltonian `diag(0, gap)`.
    pub fn qubit(gap: f64) -> Self {
        Self::diagonal(&[0.0, gap])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Non-interacting joint Hamiltonian `H (x) I + I (x) H_other`.
    pub fn joint_with(&self, other: &Hamiltonian) -> Result<Hamiltonian> {
        let left = kron(&self.matrix, &linalg::identity(other.dim()))?;
        let right = kron(&linalg::identity(self.dim()), &other.matrix)?;
        Hamiltonian::new(left + right)
    }

    /// True when every off-diagonal entry is negligible against the scale
    /// of the matrix.
    pub fn is_diagonal(&self) -> bool {
        let scale = frobenius_norm(&self.matrix).max(1.0);
        let mut off = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if i != j {
                    off += self.matrix[(i, j)].norm_sqr();
                }
            }
        }
        off.sqrt() <= HERMITICITY_TOL * scale
    }
}

/// Gibbs state `exp(-H/T)/Z`. `T = +inf` is accepted and yields the
/// maximally mixed state; `T <= 0` is rejected.
pub fn gibbs(h: &Hamiltonian, temperature: f64) -> Result<DensityMatrix> {
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    if temperature.is_infinite() {
        return DensityMatrix::maximally_mixed(h.dim());
    }
    let spectrum = herm_eig(h.matrix())?;
    // Shift by the ground energy so the exponentials cannot overflow.
    let e_min = spectrum
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|&e| (-(e - e_min) / temperature).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let matrix = spectrum.assemble_indexed(|k, _| weights[k] / z);
    DensityMatrix::new(matrix)
}

/// Validates a probability vector: entries in `[0, 1)`, strictly below 1,
/// summing to 1.
pub fn validate_probabilities(p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::InvalidProbabilityVector {
            reason: format!("need at least 2 outcomes, got {}", p.len()),
        });
    }
    for (i, &pi) in p.iter().enumerate() {
        if !pi.is_finite() || pi < 0.0 {
            return Err(Error::InvalidProbabilityVector {
                reason: format!("entry {i} is {pi}"),
            });
        }
        if pi >= 1.0 {
            return Err(Error::InvalidProbabilityVector {
                reason: format!("entry {i} is {pi}, but every weight must be strictly below 1"),
            });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidProbabilityVector {
            reason: format!("weights sum to {sum}, expected 1"),
        });
    }
    Ok(())
}

/// `sum_i sqrt(p_i) |i>`, the coherent superposition with weights `p`.
pub fn superposition_state(p: &[f64]) -> CVector {
    DVector::from_iterator(p.len(), p.iter().map(|&pi| Complex64::new(pi.sqrt(), 0.0)))
}

pub fn basis_state(dim: usize, index: usize) -> CVector {
    let mut v = DVector::zeros(dim);
    v[index] = Complex64::new(1.0, 0.0);
    v
}

/// Perfectly classically correlated joint state
/// `sum_i p_i |i><i| (x) |i><i|` on a `d x d` layout. Both marginals are
/// `diag(p)` and the mutual information equals the Shannon entropy of `p`.
pub fn classically_correlated(p: &[f64]) -> Result<DensityMatrix> {
    validate_probabilities(p)?;
    let d = p.len();
    let joint = d * d;
    if joint > DIM_CAP {
        return Err(Error::DimensionOverflow {
            dim: joint,
            cap: DIM_CAP,
        });
    }
    let mut m = linalg::zeros(joint);
    for (i, &pi) in p.iter().enumerate() {
        let idx = i * d + i;
        m[(idx, idx)] = Complex64::new(pi, 0.0);
    }
    DensityMatrix::new(m)
}

/// Entangled pure joint state `|Psi> = sum_i sqrt(p_i) |i>|i>`. Marginals
/// are `diag(p)`; the global entropy is zero.
pub fn entangled_pure(p: &[f64]) -> Result<DensityMatrix> {
    validate_probabilities(p)?;
    let d = p.len();
    let joint = d * d;
    if joint > DIM_CAP {
        return Err(Error::DimensionOverflow {
            dim: joint,
            cap: DIM_CAP,
        });
    }
    let mut psi = DVector::zeros(joint);
    for (i, &pi) in p.iter().enumerate() {
        psi[i * d + i] = Complex64::new(pi.sqrt(), 0.0);
    }
    DensityMatrix::pure(&psi)
}

fn require_diagonal_qubit(h: &Hamiltonian, label: &str) -> Result<()> {
    if h.dim() != 2 {
        return Err(Error::ScenarioConstraint {
            reason: format!(
                "{label} must be a qubit Hamiltonian, got dimension {}",
                h.dim()
            ),
        });
    }
    if !h.is_diagonal() {
        return Err(Error::ScenarioConstraint {
            reason: format!("{label} must be diagonal in the computational basis"),
        });
    }
    Ok(())
}

fn qubit_gap(h: &Hamiltonian) -> f64 {
    h.matrix()[(1, 1)].re - h.matrix()[(0, 0)].re
}

/// Largest correlation strength for which [`correlated_thermal_pair`]
/// stays positive semidefinite: `sqrt(q_01 q_10)` of the product-state
/// weights on `|01>` and `|10>`.
pub fn correlation_bound(h_a: &Hamiltonian, h_b: &Hamiltonian, t_a: f64, t_b: f64) -> Result<f64> {
    require_diagonal_qubit(h_a, "first Hamiltonian")?;
    require_diagonal_qubit(h_b, "second Hamiltonian")?;
    let tau_a = gibbs(h_a, t_a)?;
    let tau_b = gibbs(h_b, t_b)?;
    let q01 = tau_a.matrix()[(0, 0)].re * tau_b.matrix()[(1, 1)].re;
    let q10 = tau_a.matrix()[(1, 1)].re * tau_b.matrix()[(0, 0)].re;
    Ok((q01 * q10).sqrt())
}

/// Correlated two-qubit X-state with exactly thermal marginals:
/// `tau_A (x) tau_B + alpha (|01><10| + |10><01|)`.
///
/// Requires diagonal qubit Hamiltonians with equal gaps so that
/// `{|01>, |10>}` spans a degenerate energy block of the joint
/// Hamiltonian; the off-diagonal term is then energetically neutral and
/// traceless in both factors.
pub fn correlated_thermal_pair(
    h_a: &Hamiltonian,
    h_b: &Hamiltonian,
    t_a: f64,
    t_b: f64,
    alpha: f64,
) -> Result<DensityMatrix> {
    require_diagonal_qubit(h_a, "first Hamiltonian")?;
    require_diagonal_qubit(h_b, "second Hamiltonian")?;
    let gap_a = qubit_gap(h_a);
    let gap_b = qubit_gap(h_b);
    if (gap_a - gap_b).abs() > 1e-9 {
        return Err(Error::ScenarioConstraint {
            reason: format!("gaps must match, got {gap_a} and {gap_b}"),
        });
    }
    let bound = correlation_bound(h_a, h_b, t_a, t_b)?;
    if alpha.abs() > bound + 1e-12 {
        return Err(Error::CorrelationOutOfRange { alpha, bound });
    }
    let tau_a = gibbs(h_a, t_a)?;
    let tau_b = gibbs(h_b, t_b)?;
    let mut m = kron(tau_a.matrix(), tau_b.matrix())?;
    m[(1, 2)] += Complex64::new(alpha, 0.0);
    m[(2, 1)] += Complex64::new(alpha, 0.0);
    DensityMatrix::new(m)
}

/// Seeded random density matrix of the given rank, drawn by normalizing
/// `G G^dagger` for a Gaussian `dim x rank` matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 || dim > DIM_CAP {
        return Err(Error::DimensionOverflow { dim, cap: DIM_CAP });
    }
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let psd = &g * g.adjoint();
    let tr = trace(&psd).re;
    DensityMatrix::new(psd.unscale(tr))
}

/// Seeded Haar-random unitary via the QR decomposition of a Gaussian
/// matrix, with the phase convention fixed on the diagonal of `R`.
pub fn random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    if dim == 0 || dim > DIM_CAP {
        return Err(Error::DimensionOverflow { dim, cap: DIM_CAP });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let scaled = q.column(k) * phase;
        q.set_column(k, &scaled);
    }
    linalg::ensure_unitary(&q, 1e-9)?;
    Ok(q)
}

/// Seeded random Hermitian Hamiltonian with entries of order one.
pub fn random_hamiltonian(dim: usize, seed: u64) -> Result<Hamiltonian> {
    if dim == 0 || dim > DIM_CAP {
        return Err(Error::DimensionOverflow { dim, cap: DIM_CAP });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    Hamiltonian::new((&g + g.adjoint()).scale(0.5))
}
