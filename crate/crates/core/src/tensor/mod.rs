//! Dense complex linear algebra used throughout the toolkit.
//!
//! Index convention: composite basis states are ordered lexicographically,
//! `|i j⟩ = |i⟩ ⊗ |j⟩` has flat index `i * d_j + j`, and matrices are stored
//! row-major.

mod linalg;
mod matrix;

pub use linalg::{
    hermitian_eig, inverse_sqrt_psd, max_eigenvector, min_eigenvalue, min_eigenvector,
    singular_values, sqrt_psd, trace_distance, trace_norm, uhlmann_fidelity, Eigen,
};
pub use matrix::ComplexMatrix;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered subsystem dimensions `(d_1, …, d_n)`, each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DimProfile(Vec<usize>);

impl DimProfile {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("dimension list is empty".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimension {d} is below 2"
            )));
        }
        Ok(Self(dims))
    }

    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn bipartite(d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(vec![d_a, d_b])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// `(d_A, d_B)` for a bipartite profile.
    pub fn as_bipartite(&self) -> Result<(usize, usize)> {
        match self.0.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::DimensionMismatch(format!(
                "expected a bipartite profile, got {:?}",
                self.0
            ))),
        }
    }

    pub fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        m.ensure_square()?;
        if m.rows() != self.total() {
            return Err(Error::DimensionMismatch(format!(
                "matrix side {} does not equal product of dims {:?}",
                m.rows(),
                self.0
            )));
        }
        Ok(())
    }

    /// Mixed-radix digits of a flat index.
    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (k, &d) in self.0.iter().enumerate().rev() {
            out[k] = index % d;
            index /= d;
        }
        out
    }
}

impl TryFrom<Vec<usize>> for DimProfile {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DimProfile> for Vec<usize> {
    fn from(p: DimProfile) -> Self {
        p.0
    }
}

/// Kronecker (tensor) product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = (*iter.next().expect("kron_all needs at least one factor")).clone();
    iter.fold(first, |acc, m| kron(&acc, m))
}

pub fn ket_kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// |v⟩⟨v|.
pub fn projector(v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// |u⟩⟨v|.
pub fn outer(u: &[C64], v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|z| z / n).collect()
}

pub fn basis_ket(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[i] = C64::new(1.0, 0.0);
    v
}

pub fn conj_ket(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| z.conj()).collect()
}

/// Fix the global phase so the first non-negligible amplitude is real positive.
pub fn canonical_phase(v: &[C64]) -> Vec<C64> {
    match v.iter().find(|z| z.norm() > 1e-12) {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v.iter().map(|x| x * phase).collect()
        }
        None => v.to_vec(),
    }
}

/// Trace out every subsystem not listed in `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &DimProfile, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check_matrix(m)?;
    let n = dims.len();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: bad, count: n });
    }
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims.dims()[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced: Vec<usize> = (0..n).filter(|k| !keep_sorted.contains(k)).collect();

    let total = dims.total();
    let digits: Vec<Vec<usize>> = (0..total).map(|i| dims.digits(i)).collect();
    let reduced_index = |d: &[usize]| -> usize {
        keep_sorted
            .iter()
            .zip(&kept_dims)
            .fold(0, |acc, (&k, &dk)| acc * dk + d[k])
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..total {
        let dr = &digits[r];
        let rr = reduced_index(dr);
        for c in 0..total {
            let dc = &digits[c];
            if traced.iter().all(|&t| dr[t] == dc[t]) {
                out[(rr, reduced_index(dc))] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Transpose the indices of one subsystem.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &DimProfile,
    subsystem: usize,
) -> Result<ComplexMatrix> {
    dims.check_matrix(m)?;
    let n = dims.len();
    if subsystem >= n {
        return Err(Error::IndexOutOfRange {
            index: subsystem,
            count: n,
        });
    }
    let stride: usize = dims.dims()[subsystem + 1..].iter().product();
    let d = dims.dims()[subsystem];
    let total = dims.total();
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let dr = (r / stride) % d;
        for c in 0..total {
            let dc = (c / stride) % d;
            let r2 = r - dr * stride + dc * stride;
            let c2 = c - dc * stride + dr * stride;
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Realignment `R(ρ)_{(i k),(j l)} = ρ_{(i j),(k l)}` for a bipartite operator.
pub fn realign(m: &ComplexMatrix, dims: &DimProfile) -> Result<ComplexMatrix> {
    dims.check_matrix(m)?;
    let (da, db) = dims.as_bipartite()?;
    let mut out = ComplexMatrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * da + k, j * db + l)] = m[(i * db + j, k * db + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Swap operator Π_d = Σ |i j⟩⟨j i|.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// Pauli matrices X, Y, Z.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static shape")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("static shape")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static shape")
}

/// Orthonormal (Hilbert–Schmidt) Hermitian basis of d×d matrices:
/// `I/√d` first, then the generalized Gell-Mann matrices scaled by 1/√2.
pub fn gell_mann_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = vec![ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt())];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = C64::new(s, 0.0);
            sym[(k, j)] = C64::new(s, 0.0);
            basis.push(sym);
            let mut asym = ComplexMatrix::zeros(d, d);
            asym[(j, k)] = C64::new(0.0, -s);
            asym[(k, j)] = C64::new(0.0, s);
            basis.push(asym);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for item in diag.iter_mut().take(l) {
            *item = norm;
        }
        diag[l] = -(l as f64) * norm;
        basis.push(ComplexMatrix::from_real_diag(&diag));
    }
    basis
}
