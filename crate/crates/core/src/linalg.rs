//! Dense complex Hermitian linear-algebra kernel.
//!
//! Everything downstream runs through the four operations here:
//! eigendecomposition of Hermitian matrices, spectral matrix functions,
//! Kronecker products, and partial traces. All functions are pure and
//! operate on `DMatrix<Complex64>` carriers; dimension bookkeeping for
//! bipartite spaces goes through [`BipartiteLayout`].
//!
//! Tensor ordering is fixed globally: the first factor is leftmost, so a
//! joint index decomposes as `i = i_first * d_second + i_second`. All
//! layouts in the crate are documented against this convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hard cap on joint-space dimensions. Keeps eigendecompositions and
/// optimizer sweeps interactive at desk scale.
pub const DIM_CAP: usize = 64;

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Eigenvalues in `[-EIGENVALUE_CLAMP, 0)` are clamped to zero before
/// entering logarithms; anything more negative is a genuine positivity
/// violation and is reported as an error.
pub const EIGENVALUE_CLAMP: f64 = 1e-10;

/// Dimension pair giving the tensor-factor structure of a joint matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteLayout {
    pub d_first: usize,
    pub d_second: usize,
}

impl BipartiteLayout {
    pub fn new(d_first: usize, d_second: usize) -> Self {
        Self { d_first, d_second }
    }

    pub fn joint(&self) -> usize {
        self.d_first * self.d_second
    }

    pub fn check_joint(&self, dim: usize) -> Result<()> {
        if self.joint() != dim {
            return Err(Error::LayoutMismatch {
                d_first: self.d_first,
                d_second: self.d_second,
                joint: dim,
            });
        }
        Ok(())
    }
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues sorted in
/// descending order and the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// Reassembles `V diag(f(lambda)) V^dagger`.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        self.assemble_indexed(|_, lambda| f(lambda))
    }

    /// Like [`Spectrum::assemble`] but the function also sees the position
    /// of each eigenvalue in the sorted spectrum.
    pub fn assemble_indexed(&self, f: impl Fn(usize, f64) -> f64) -> CMatrix {
        let dim = self.eigenvalues.len();
        let diag = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(f(i, self.eigenvalues[i]), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::zeros(dim, dim)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteEntries);
    }
    Ok(())
}

/// Frobenius deviation from Hermiticity, `|M - M^dagger| / max(1, |M|)`.
/// The floor keeps the check meaningful for near-zero matrices, where a
/// plain relative deviation would be roundoff divided by roundoff.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let norm = frobenius_norm(m);
    let dev = frobenius_norm(&(m - m.adjoint()));
    dev / norm.max(1.0)
}

pub fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let deviation = hermiticity_deviation(m);
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tol: HERMITICITY_TOL,
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(M + M^dagger)/2` before decomposing, so
/// numerical drift below [`HERMITICITY_TOL`] never reaches the solver.
/// Eigenvalues come back sorted descending; the reconstruction
/// `V diag(lambda) V^dagger` matches the input to 1e-9 relative Frobenius.
pub fn herm_eig(m: &CMatrix) -> Result<Spectrum> {
    ensure_hermitian(m)?;
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();

    let dim = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a Hermitian matrix are finite")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        eigenvectors.set_column(col, &eig.eigenvectors.column(src));
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral function `f(M) = V diag(f(lambda)) V^dagger` of a Hermitian
/// matrix. Conventions such as `0 log 0 = 0` are the caller's business:
/// pass an `f` with explicit zero handling.
pub fn mat_func(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let spectrum = herm_eig(m)?;
    for &lambda in &spectrum.eigenvalues {
        if !f(lambda).is_finite() {
            return Err(Error::FunctionUndefined { eigenvalue: lambda });
        }
    }
    let out = spectrum.assemble(&f);
    // Symmetrize away the rounding from the two-sided product.
    Ok((&out + out.adjoint()).scale(0.5))
}

/// `exp(i G)` for Hermitian `G`; the result is unitary by construction.
pub fn herm_exp_i(g: &CMatrix) -> Result<CMatrix> {
    let spectrum = herm_eig(g)?;
    let dim = spectrum.eigenvalues.len();
    let phases = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, spectrum.eigenvalues[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(&spectrum.eigenvectors * phases * spectrum.eigenvectors.adjoint())
}

/// Kronecker product with the first factor leftmost. Errors when the
/// joint dimension would exceed [`DIM_CAP`].
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let dim = a.nrows() * b.nrows();
    if dim > DIM_CAP {
        return Err(Error::DimensionOverflow { dim, cap: DIM_CAP });
    }
    Ok(a.kronecker(b))
}

/// Partial trace over one tensor factor of a bipartite matrix.
///
/// With `Keep::First` the second factor is traced out and vice versa;
/// `partial_trace(kron(a, b), layout, Keep::First) = tr(b) * a`.
pub fn partial_trace(m: &CMatrix, layout: BipartiteLayout, keep: Keep) -> Result<CMatrix> {
    let dim = ensure_square(m)?;
    layout.check_joint(dim)?;
    let (da, db) = (layout.d_first, layout.d_second);
    match keep {
        Keep::First => {
            let mut out = CMatrix::zeros(da, da);
            for i1 in 0..da {
                for i2 in 0..da {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..db {
                        acc += m[(i1 * db + j, i2 * db + j)];
                    }
                    out[(i1, i2)] = acc;
                }
            }
            Ok(out)
        }
        Keep::Second => {
            let mut out = CMatrix::zeros(db, db);
            for j1 in 0..db {
                for j2 in 0..db {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..da {
                        acc += m[(i * db + j1, i * db + j2)];
                    }
                    out[(j1, j2)] = acc;
                }
            }
            Ok(out)
        }
    }
}

/// `|U^dagger U - I|_F`, the unitarity defect.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let dim = u.nrows();
    frobenius_norm(&(u.adjoint() * u - identity(dim)))
}

pub fn ensure_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(u)?;
    ensure_finite(u)?;
    let deviation = unitarity_deviation(u);
    if deviation > tol {
        return Err(Error::NotUnitary { deviation, tol });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        (&g + g.adjoint()).scale(0.5)
    }

    fn diag(entries: &[f64]) -> CMatrix {
        CMatrix::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j {
                Complex64::new(entries[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn herm_eig_identity_eigenvalues() {
        let spectrum = herm_eig(&identity(3)).unwrap();
        for &lambda in &spectrum.eigenvalues {
            assert_relative_eq!(lambda, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn herm_eig_diagonal_sorted_descending() {
        let spectrum = herm_eig(&diag(&[0.0, 1.0])).unwrap();
        assert_relative_eq!(spectrum.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(spectrum.eigenvalues[1], 0.0, epsilon = 1e-12);
        // Eigenvectors permute the computational basis.
        assert_relative_eq!(spectrum.eigenvectors[(1, 0)].norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(spectrum.eigenvectors[(0, 1)].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn herm_eig_reconstructs_random_matrix() {
        let m = random_hermitian(8, 7);
        let spectrum = herm_eig(&m).unwrap();
        let rebuilt = spectrum.assemble(|x| x);
        let err = frobenius_norm(&(&rebuilt - &m)) / frobenius_norm(&m).max(1.0);
        assert!(err <= 1e-9, "reconstruction error {err:.3e}");
        let ortho = unitarity_deviation(&spectrum.eigenvectors);
        assert!(ortho <= 1e-9, "orthonormality defect {ortho:.3e}");
    }

    #[test]
    fn herm_eig_rejects_non_square() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let mut m = identity(2);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn mat_func_identity_function_returns_input() {
        let m = random_hermitian(5, 11);
        let out = mat_func(&m, |x| x).unwrap();
        assert!(frobenius_norm(&(&out - &m)) <= 1e-10);
    }

    #[test]
    fn mat_func_exp_on_diagonal() {
        let out = mat_func(&diag(&[0.0, -1.0]), f64::exp).unwrap();
        assert_relative_eq!(out[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(out[(1, 1)].re, (-1.0f64).exp(), epsilon = 1e-12);
        assert!(out[(0, 1)].norm() <= 1e-12);
    }

    #[test]
    fn mat_func_x_ln_x_on_maximally_mixed_qubit() {
        let m = diag(&[0.5, 0.5]);
        let out = mat_func(&m, |x| if x > 0.0 { x * x.ln() } else { 0.0 }).unwrap();
        let expected = -0.5 * std::f64::consts::LN_2;
        assert_relative_eq!(out[(0, 0)].re, expected, epsilon = 1e-12);
        assert_relative_eq!(out[(1, 1)].re, expected, epsilon = 1e-12);
    }

    #[test]
    fn mat_func_rejects_undefined_values() {
        let m = diag(&[1.0, 0.0]);
        let result = mat_func(&m, |x| x.ln());
        assert!(matches!(result, Err(Error::FunctionUndefined { .. })));
    }

    #[test]
    fn herm_exp_i_zero_generator_is_identity() {
        let u = herm_exp_i(&zeros(4)).unwrap();
        assert!(frobenius_norm(&(&u - identity(4))) <= 1e-12);
    }

    #[test]
    fn kron_identities() {
        let out = kron(&identity(2), &identity(2)).unwrap();
        assert!(frobenius_norm(&(&out - identity(4))) <= 1e-15);
        let out = kron(&diag(&[1.0, 0.0]), &diag(&[1.0, 0.0])).unwrap();
        assert!(frobenius_norm(&(&out - diag(&[1.0, 0.0, 0.0, 0.0]))) <= 1e-15);
    }

    #[test]
    fn kron_matches_index_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CMatrix::from_fn(2, 2, |_, _| Complex64::new(rng.gen(), rng.gen()));
        let b = CMatrix::from_fn(3, 3, |_, _| Complex64::new(rng.gen(), rng.gen()));
        let out = kron(&a, &b).unwrap();
        for i1 in 0..2 {
            for i2 in 0..2 {
                for j1 in 0..3 {
                    for j2 in 0..3 {
                        let expected = a[(i1, i2)] * b[(j1, j2)];
                        let got = out[(i1 * 3 + j1, i2 * 3 + j2)];
                        assert!((expected - got).norm() <= 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_rejects_dimension_overflow() {
        let a = identity(16);
        let b = identity(8);
        assert!(matches!(
            kron(&a, &b),
            Err(Error::DimensionOverflow { dim: 128, cap: 64 })
        ));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = random_hermitian(2, 21);
        let b = random_hermitian(3, 22);
        let joint = kron(&a, &b).unwrap();
        let layout = BipartiteLayout::new(2, 3);
        let kept = partial_trace(&joint, layout, Keep::First).unwrap();
        let expected = a.scale(trace(&b).re);
        assert!(frobenius_norm(&(&kept - &expected)) <= 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let mut bell = zeros(4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = Complex64::new(0.5, 0.0);
        }
        let layout = BipartiteLayout::new(2, 2);
        for keep in [Keep::First, Keep::Second] {
            let kept = partial_trace(&bell, layout, keep).unwrap();
            assert!(frobenius_norm(&(&kept - identity(2).scale(0.5))) <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_matches_double_sum_oracle() {
        let m = random_hermitian(4, 40);
        let layout = BipartiteLayout::new(2, 2);
        let kept = partial_trace(&m, layout, Keep::Second).unwrap();
        for j1 in 0..2 {
            for j2 in 0..2 {
                let expected = m[(j1, j2)] + m[(2 + j1, 2 + j2)];
                assert!((kept[(j1, j2)] - expected).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_layout_mismatch() {
        let m = identity(6);
        let layout = BipartiteLayout::new(2, 2);
        assert!(matches!(
            partial_trace(&m, layout, Keep::First),
            Err(Error::LayoutMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eig_reconstruction_invariant(seed in 0u64..1000, dim in 2usize..9) {
            let m = random_hermitian(dim, seed);
            let spectrum = herm_eig(&m).unwrap();
            let rebuilt = spectrum.assemble(|x| x);
            let err = frobenius_norm(&(&rebuilt - &m));
            prop_assert!(err <= 1e-9 * frobenius_norm(&m).max(1.0));
            prop_assert!(unitarity_deviation(&spectrum.eigenvectors) <= 1e-9);
            for w in spectrum.eigenvalues.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }

        #[test]
        fn partial_trace_preserves_trace_and_positivity(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = CMatrix::from_fn(4, 4, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let psd = &g * g.adjoint();
            let rho = psd.scale(1.0 / trace(&psd).re);
            let layout = BipartiteLayout::new(2, 2);
            for keep in [Keep::First, Keep::Second] {
                let kept = partial_trace(&rho, layout, keep).unwrap();
                prop_assert!((trace(&kept).re - 1.0).abs() <= 1e-12);
                let spectrum = herm_eig(&kept).unwrap();
                for &lambda in &spectrum.eigenvalues {
                    prop_assert!(lambda >= -1e-10);
                }
            }
        }

        #[test]
        fn kron_trace_is_product_of_traces(sa in 0u64..500, sb in 0u64..500) {
            let a = random_hermitian(3, sa);
            let b = random_hermitian(2, sb);
            let joint = kron(&a, &b).unwrap();
            let expected = trace(&a) * trace(&b);
            prop_assert!((trace(&joint) - expected).norm() <= 1e-12);
        }
    }
}
