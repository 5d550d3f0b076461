//! Multi-start minimization of ⟨e⊗f|M|e⊗f⟩ over unit product vectors.
//!
//! Each start alternates exact minimizations over one factor with the other
//! held fixed (a minimum eigenvector of the partial contraction), so the value
//! is monotone non-increasing within a start. Starts are independent and use
//! their own RNG stream `seed` / `start`, which makes the outcome independent
//! of thread scheduling.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::random_ket;
use crate::tensor::{ket_kron, kron, min_eigenvector, normalized, projector, ComplexMatrix};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Stop a start once a sweep improves the value by less than this.
    pub tolerance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            max_sweeps: 300,
            tolerance: 1e-14,
        }
    }
}

impl SearchOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }
}

#[derive(Clone, Debug)]
pub struct ProductPoint {
    pub value: f64,
    pub ket_a: Vec<C64>,
    pub ket_b: Vec<C64>,
}

impl ProductPoint {
    pub fn ket(&self) -> Vec<C64> {
        ket_kron(&self.ket_a, &self.ket_b)
    }
}

/// One term w |a⟩⟨a| ⊗ |b⟩⟨b| of a separable decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub weight: f64,
    pub ket_a: Vec<C64>,
    pub ket_b: Vec<C64>,
}

impl SeparableTerm {
    pub fn new(weight: f64, ket_a: &[C64], ket_b: &[C64]) -> Self {
        Self {
            weight,
            ket_a: normalized(ket_a),
            ket_b: normalized(ket_b),
        }
    }

    pub fn operator(&self) -> ComplexMatrix {
        kron(&projector(&self.ket_a), &projector(&self.ket_b)).scale(self.weight)
    }
}

/// Σ w |a⟩⟨a| ⊗ |b⟩⟨b|.
pub fn reconstruct(terms: &[SeparableTerm]) -> Option<ComplexMatrix> {
    let first = terms.first()?;
    let n = first.ket_a.len() * first.ket_b.len();
    Some(
        terms
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, t| &acc + &t.operator()),
    )
}

/// max elementwise |Σ terms − target|; infinite for an empty or mis-shaped list.
pub fn reconstruction_residual(terms: &[SeparableTerm], target: &ComplexMatrix) -> f64 {
    match reconstruct(terms) {
        Some(m) if m.rows() == target.rows() && m.cols() == target.cols() => m.max_abs_diff(target),
        _ => f64::INFINITY,
    }
}

#[derive(Clone, Debug)]
pub struct ProductSearch {
    pub best: ProductPoint,
    /// Final point of every start, in start order.
    pub minima: Vec<ProductPoint>,
}

/// (⟨f| on B) M (|f⟩ on B), a d_a × d_a operator.
pub fn contract_b(m: &ComplexMatrix, d_a: usize, d_b: usize, f: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_a, d_a, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..d_b {
            let fk = f[k].conj();
            if fk == C64::new(0.0, 0.0) {
                continue;
            }
            for l in 0..d_b {
                acc += fk * m[(i * d_b + k, j * d_b + l)] * f[l];
            }
        }
        acc
    })
}

/// (⟨e| on A) M (|e⟩ on A), a d_b × d_b operator.
pub fn contract_a(m: &ComplexMatrix, d_a: usize, d_b: usize, e: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_b, d_b, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d_a {
            let ei = e[i].conj();
            if ei == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d_a {
                acc += ei * m[(i * d_b + k, j * d_b + l)] * e[j];
            }
        }
        acc
    })
}

/// Minimizes the product expectation starting from a given B factor.
pub fn refine_from(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    f0: Vec<C64>,
    max_sweeps: usize,
    tolerance: f64,
) -> Result<ProductPoint> {
    let mut f = f0;
    let mut e;
    let mut value = f64::INFINITY;
    let mut sweeps = 0;
    loop {
        let (_, e_new) = min_eigenvector(&contract_b(m, d_a, d_b, &f))?;
        e = e_new;
        let (v, f_new) = min_eigenvector(&contract_a(m, d_a, d_b, &e))?;
        f = f_new;
        sweeps += 1;
        let improved = value - v;
        value = v;
        if improved.abs() < tolerance || sweeps >= max_sweeps {
            break;
        }
    }
    Ok(ProductPoint {
        value,
        ket_a: e,
        ket_b: f,
    })
}

/// Multi-start product minimization of a Hermitian operator on d_a·d_b.
pub fn minimize_product_expectation(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    opts: &SearchOptions,
) -> Result<ProductSearch> {
    if !m.is_square() || m.rows() != d_a * d_b {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} does not act on {d_a}x{d_b}",
            m.rows(),
            m.cols()
        )));
    }
    if opts.starts == 0 {
        return Err(Error::InvalidParameter("at least one start is required".into()));
    }
    let h = m.hermitian_part();
    let run = |start: usize| -> Result<ProductPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(start as u64);
        let f0 = random_ket(d_b, &mut rng);
        refine_from(&h, d_a, d_b, f0, opts.max_sweeps, opts.tolerance)
    };
    let minima: Vec<ProductPoint> = if opts.starts >= 16 {
        (0..opts.starts)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        (0..opts.starts).map(run).collect::<Result<_>>()?
    };
    let best = minima
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
        .map(|(_, p)| p.clone())
        .expect("at least one start");
    Ok(ProductSearch { best, minima })
}

/// Multi-start maximization; returns the point with the largest expectation.
pub fn maximize_product_expectation(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    opts: &SearchOptions,
) -> Result<ProductSearch> {
    let mut search = minimize_product_expectation(&m.scale(-1.0), d_a, d_b, opts)?;
    search.best.value = -search.best.value;
    for p in &mut search.minima {
        p.value = -p.value;
    }
    Ok(search)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::swap_operator;

    #[test]
    fn swap_minimum_is_zero_on_orthogonal_pairs() {
        let s = minimize_product_expectation(&swap_operator(3), 3, 3, &SearchOptions::default())
            .unwrap();
        assert!(s.best.value.abs() < 1e-12);
        let overlap: C64 = s
            .best
            .ket_a
            .iter()
            .zip(&s.best.ket_b)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm() < 1e-6);
    }

    #[test]
    fn product_minimum_of_identity_is_one() {
        let s = minimize_product_expectation(
            &ComplexMatrix::identity(6),
            2,
            3,
            &SearchOptions::with_seed(3).starts(4),
        )
        .unwrap();
        assert!((s.best.value - 1.0).abs() < 1e-12);
        assert_eq!(s.minima.len(), 4);
    }

    #[test]
    fn maximization_flips_sign() {
        let s = maximize_product_expectation(&swap_operator(2), 2, 2, &SearchOptions::default())
            .unwrap();
        assert!((s.best.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_result() {
        let m = swap_operator(2).scale(-1.0);
        let o = SearchOptions::with_seed(11).starts(20);
        let a = minimize_product_expectation(&m, 2, 2, &o).unwrap();
        let b = minimize_product_expectation(&m, 2, 2, &o).unwrap();
        assert_eq!(a.best.ket_a, b.best.ket_a);
        assert_eq!(a.best.value, b.best.value);
    }

    #[test]
    fn shape_is_checked() {
        assert!(minimize_product_expectation(
            &ComplexMatrix::identity(5),
            2,
            2,
            &SearchOptions::default()
        )
        .is_err());
    }
}
