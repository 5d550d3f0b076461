use nalgebra::{SymmetricEigen, SVD};
use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tol;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// V diag(f(λ)) V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Hermitian eigendecomposition. The input is symmetrized as (M + M†)/2 first.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigen> {
    m.ensure_square()?;
    let n = m.rows();
    let h = m.hermitian_part();
    let eig = SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigen { values, vectors })
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.min())
}

pub fn min_eigenvector(m: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let e = hermitian_eig(m)?;
    Ok((e.min(), e.vector(0)))
}

pub fn max_eigenvector(m: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let e = hermitian_eig(m)?;
    let last = e.values.len() - 1;
    Ok((e.max(), e.vector(last)))
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let svd = SVD::new(m.to_nalgebra(), false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Schatten-1 norm.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// D_tr(a, b) = ‖a − b‖₁ / 2.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let diff = a - b;
    if diff.is_square() && diff.is_hermitian(1e-10 * (1.0 + diff.max_abs())) {
        let e = hermitian_eig(&diff)?;
        Ok(0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>())
    } else {
        Ok(0.5 * trace_norm(&diff))
    }
}

/// Square root of a PSD matrix; negative eigenvalues within tolerance are clipped.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    if e.min() < -tol::PSD {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min(),
        });
    }
    Ok(e.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// M^{-1/2} for a positive definite matrix.
pub fn inverse_sqrt_psd(m: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    if e.min() <= floor {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min(),
        });
    }
    Ok(e.reconstruct_with(|x| 1.0 / x.sqrt()))
}

/// Uhlmann fidelity F(ρ, σ) = ‖√ρ √σ‖₁ (root convention, F(ρ,ρ) = tr ρ).
pub fn uhlmann_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.ensure_square()?;
    b.ensure_square()?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let sa = sqrt_psd(a)?;
    let sb = sqrt_psd(b)?;
    Ok(trace_norm(&sa.matmul(&sb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{partial_transpose, projector, swap_operator, DimProfile};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn swap_spectrum_is_one_antisymmetric_direction() {
        let e = hermitian_eig(&swap_operator(2)).unwrap();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (v, x) in e.values.iter().zip(expected) {
            assert!((v - x).abs() < 1e-14);
        }
    }

    #[test]
    fn partial_transpose_of_phi_plus_has_negative_half() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = projector(&[c(s), c(0.0), c(0.0), c(s)]);
        let dims = DimProfile::bipartite(2, 2).unwrap();
        let pt = partial_transpose(&phi, &dims, 1).unwrap();
        let e = hermitian_eig(&pt).unwrap();
        assert!((e.min() + 0.5).abs() < 1e-14);
        for v in &e.values[1..] {
            assert!((v - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_rejects_non_square() {
        assert!(hermitian_eig(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn reconstruction_residual_is_small() {
        let m = ComplexMatrix::from_fn(5, 5, |i, j| {
            C64::new((i + 2 * j) as f64 * 0.3, (i as f64 - j as f64) * 0.7)
        })
        .hermitian_part();
        let e = hermitian_eig(&m).unwrap();
        let scale = m.max_abs();
        assert!(e.reconstruct().max_abs_diff(&m) <= 1e-10 * scale);
    }

    #[test]
    fn fidelity_and_trace_distance_of_orthogonal_pure_states() {
        let a = projector(&[c(1.0), c(0.0)]);
        let b = projector(&[c(0.0), c(1.0)]);
        assert!(uhlmann_fidelity(&a, &b).unwrap().abs() < 1e-7);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        assert!((uhlmann_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&a, &a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn fidelity_rejects_non_psd() {
        let bad = ComplexMatrix::from_real_diag(&[1.5, -0.5]);
        let good = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(
            uhlmann_fidelity(&bad, &good),
            Err(Error::NotPsd { .. })
        ));
    }
}
