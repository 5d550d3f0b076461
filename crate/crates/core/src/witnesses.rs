//! Entanglement witnesses: construction from positive maps, SPAed witnesses,
//! local decompositions and the measurement-device-independent variant.

use log::warn;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::channels::QuantumMap;
use crate::designs::{is_prime, mub, sic, symmetric_target};
use crate::detect::nearest_separable;
use crate::error::{Error, Result};
use crate::product::{minimize_product_expectation, reconstruction_residual, SearchOptions, SeparableTerm};
use crate::states::DensityMatrix;
use crate::tensor::{gell_mann_basis, hermitian_eig, kron, min_eigenvalue, ComplexMatrix, DimProfile};
use crate::tol;

/// Starts used for heuristic witness checks.
pub const WITNESS_STARTS: usize = 128;

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub operator: ComplexMatrix,
    pub dims: DimProfile,
    pub trace_normalized: bool,
}

impl Witness {
    pub fn new(operator: ComplexMatrix, dims: DimProfile) -> Result<Self> {
        dims.as_bipartite()?;
        dims.check_matrix(&operator)?;
        let dev = operator.hermiticity_deviation();
        if dev > 1e-12 * (1.0 + operator.max_abs()) {
            return Err(Error::InvalidParameter(format!(
                "witness is not Hermitian (deviation {dev:e})"
            )));
        }
        let operator = operator.hermitian_part();
        let trace_normalized = (operator.trace().re - 1.0).abs() < 1e-12;
        Ok(Self {
            operator,
            dims,
            trace_normalized,
        })
    }

    pub fn bipartite_dims(&self) -> (usize, usize) {
        self.dims.as_bipartite().expect("checked on construction")
    }

    /// Multi-start minimum of ⟨ef|W|ef⟩ over product vectors.
    pub fn product_minimum(&self, starts: usize, seed: u64) -> Result<f64> {
        let (da, db) = self.bipartite_dims();
        Ok(minimize_product_expectation(
            &self.operator,
            da,
            db,
            &SearchOptions::with_seed(seed).starts(starts),
        )?
        .best
        .value)
    }

    /// Non-negative on product states (heuristic) and not PSD.
    pub fn is_witness_heuristic(&self, seed: u64) -> Result<bool> {
        let psd = min_eigenvalue(&self.operator)? >= -tol::PSD;
        Ok(!psd && self.product_minimum(WITNESS_STARTS, seed)? >= -tol::WITNESS_FLOOR)
    }

    pub fn normalized(&self) -> Result<Witness> {
        let tr = self.operator.trace().re;
        if tr <= 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "witness trace {tr} is not positive"
            )));
        }
        Witness::new(self.operator.scale(1.0 / tr), self.dims.clone())
    }
}

/// Swap witness Π_d / d.
pub fn swap_witness(d: usize) -> Result<Witness> {
    Witness::new(
        crate::tensor::swap_operator(d).scale(1.0 / d as f64),
        DimProfile::bipartite(d, d)?,
    )
}

/// W_Λ = χ_Λ by default, or (id ⊗ Λ†)[Q] for a given PSD Q on d_in·d_out.
pub fn witness_from_map(map: &QuantumMap, q: Option<&ComplexMatrix>) -> Result<Witness> {
    let mu = map.min_choi_eigenvalue()?;
    if mu >= -tol::PSD {
        return Err(Error::CompletelyPositive { min_eigenvalue: mu });
    }
    let est = map.positivity_estimate(&SearchOptions::with_seed(0))?;
    if est.is_certified_nonpositive() {
        return Err(Error::InvalidParameter(format!(
            "map {map} is not positive; its Choi matrix is not a witness"
        )));
    }
    match q {
        None => Witness::new(map.choi().clone(), map.dims()),
        Some(q) => {
            let (d_in, d_out) = (map.d_in(), map.d_out());
            if q.rows() != d_in * d_out || q.cols() != d_in * d_out {
                return Err(Error::DimensionMismatch(format!(
                    "Q is {}x{}, expected {}",
                    q.rows(),
                    q.cols(),
                    d_in * d_out
                )));
            }
            let qmin = min_eigenvalue(q)?;
            if qmin < -tol::PSD {
                return Err(Error::NotPsd {
                    min_eigenvalue: qmin,
                });
            }
            let ext = map.dual()?.tensor_with_identity(d_in)?;
            Witness::new(ext.apply(q)?, DimProfile::bipartite(d_in, d_in)?)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessEvaluation {
    pub value: f64,
    pub detected: bool,
}

pub fn evaluate_witness(w: &Witness, rho: &DensityMatrix) -> Result<WitnessEvaluation> {
    if rho.dims() != &w.dims {
        return Err(Error::DimensionMismatch(format!(
            "witness on {:?}, state on {:?}",
            w.dims.dims(),
            rho.dims().dims()
        )));
    }
    let value = w.operator.trace_of_product(rho.matrix()).re;
    Ok(WitnessEvaluation {
        value,
        detected: value < -tol::DETECTION,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaWitness {
    pub witness: Witness,
    /// W̃ = (1 − p*) W + p* I/D, a unit-trace PSD operator.
    pub state: DensityMatrix,
    pub p_star: f64,
    pub lambda: f64,
    /// p*/D: tr[W̃ρ] below it ⇔ tr[Wρ] < 0.
    pub threshold: f64,
}

impl SpaWitness {
    pub fn value(&self, rho: &DensityMatrix) -> f64 {
        self.state.overlap(rho)
    }

    pub fn detects(&self, rho: &DensityMatrix) -> bool {
        self.threshold - self.value(rho) > tol::DETECTION
    }

    /// Product-state decomposition of W̃ if one is known or found.
    pub fn separable_decomposition(&self, seed: u64) -> Result<Option<Vec<SeparableTerm>>> {
        let m = self.state.matrix();
        let (da, db) = self.witness.bipartite_dims();
        if da == db && m.max_abs_diff(&symmetric_target(da)) <= 1e-10 {
            let set = match da {
                2 | 3 => Some(sic(da, None)?),
                d if is_prime(d) => Some(mub(d)?),
                _ => None,
            };
            if let Some(set) = set {
                return Ok(Some(set.decomposition()));
            }
        }
        let approx = nearest_separable(&self.state, 5000, seed)?;
        if reconstruction_residual(&approx.decomposition, m) <= 1e-8 {
            Ok(Some(approx.decomposition))
        } else {
            Ok(None)
        }
    }
}

/// SPA of a witness: the smallest white-noise admixture that is PSD.
pub fn spa_witness(w: &Witness) -> Result<SpaWitness> {
    let w = if w.trace_normalized {
        w.clone()
    } else {
        warn!("witness trace {} rescaled to one", w.operator.trace().re);
        w.normalized()?
    };
    let d = w.dims.total() as f64;
    let lambda = (-min_eigenvalue(&w.operator)?).max(0.0);
    let p_star = d * lambda / (1.0 + d * lambda);
    let state = &w.operator.scale(1.0 - p_star) + &ComplexMatrix::identity(w.dims.total()).scale(p_star / d);
    let state = DensityMatrix::new_normalized(state, w.dims.clone())?;
    Ok(SpaWitness {
        threshold: p_star / d,
        witness: w,
        state,
        p_star,
        lambda,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalTerm {
    pub coefficient: f64,
    /// PSD with largest eigenvalue one, so a valid POVM effect.
    pub factor_a: ComplexMatrix,
    pub factor_b: ComplexMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalDecomposition {
    pub dims: DimProfile,
    pub terms: Vec<LocalTerm>,
}

impl LocalDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dims.total();
        self.terms.iter().fold(ComplexMatrix::zeros(n, n), |acc, t| {
            &acc + &kron(&t.factor_a, &t.factor_b).scale(t.coefficient)
        })
    }

    /// Σ c tr[(A ⊗ B) ρ].
    pub fn evaluate(&self, rho: &ComplexMatrix) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * kron(&t.factor_a, &t.factor_b).trace_of_product(rho).re)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Gell-Mann elements shifted to PSD and scaled to unit top eigenvalue,
/// with T such that B_i = Σ_k T_ik E_k. E_0 is the identity.
fn shifted_basis(d: usize) -> Result<(Vec<ComplexMatrix>, Vec<Vec<f64>>)> {
    let basis = gell_mann_basis(d);
    let n = basis.len();
    let mut t = vec![vec![0.0; n]; n];
    let mut effects = Vec::with_capacity(n);
    for (i, b) in basis.iter().enumerate() {
        let shift = if i == 0 { 0.0 } else { (-min_eigenvalue(b)?).max(0.0) };
        let a = b + &ComplexMatrix::identity(d).scale(shift);
        let top = hermitian_eig(&a)?.max();
        t[i][i] += top;
        t[i][0] -= shift;
        effects.push(a.scale(1.0 / top));
    }
    Ok((effects, t))
}

/// Expands W in the Gell-Mann product basis and shifts every factor to a
/// POVM effect, redistributing the shifts onto I ⊗ · and · ⊗ I.
pub fn decompose_local(w: &Witness) -> Result<LocalDecomposition> {
    let (da, db) = w.bipartite_dims();
    let ga = gell_mann_basis(da);
    let gb = gell_mann_basis(db);
    let (ea, ta) = shifted_basis(da)?;
    let (eb, tb) = shifted_basis(db)?;
    let (na, nb) = (ga.len(), gb.len());
    let mut c = vec![vec![0.0; nb]; na];
    for (i, a) in ga.iter().enumerate() {
        for (j, b) in gb.iter().enumerate() {
            c[i][j] = kron(a, b).trace_of_product(&w.operator).re;
        }
    }
    // c' = Tᵀ c U.
    let mut terms = Vec::new();
    for k in 0..na {
        for l in 0..nb {
            let mut v = 0.0;
            for i in 0..na {
                if ta[i][k] == 0.0 {
                    continue;
                }
                for j in 0..nb {
                    v += ta[i][k] * c[i][j] * tb[j][l];
                }
            }
            if v.abs() > 1e-14 {
                terms.push(LocalTerm {
                    coefficient: v,
                    factor_a: ea[k].clone(),
                    factor_b: eb[l].clone(),
                });
            }
        }
    }
    Ok(LocalDecomposition {
        dims: w.dims.clone(),
        terms,
    })
}

/// Transposes every factor: the MDI form evaluated on ρ equals tr[W ρᵀ].
pub fn mdi_witness(dec: &LocalDecomposition) -> LocalDecomposition {
    LocalDecomposition {
        dims: dec.dims.clone(),
        terms: dec
            .terms
            .iter()
            .map(|t| LocalTerm {
                coefficient: t.coefficient,
                factor_a: t.factor_a.transpose(),
                factor_b: t.factor_b.transpose(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationStep {
    pub candidate: ComplexMatrix,
    /// Heuristic: multi-start product minimum ≥ −1e-6.
    pub still_witness: bool,
    pub product_minimum: f64,
}

/// W − εP with a product-state check of the result.
pub fn optimize_witness_step(w: &Witness, p_sub: &ComplexMatrix, epsilon: f64, seed: u64) -> Result<OptimizationStep> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} is negative")));
    }
    w.dims.check_matrix(p_sub)?;
    let mu = min_eigenvalue(p_sub)?;
    if mu < -tol::PSD {
        return Err(Error::NotPsd { min_eigenvalue: mu });
    }
    let candidate = &w.operator - &p_sub.scale(epsilon);
    let (da, db) = w.bipartite_dims();
    let product_minimum = minimize_product_expectation(
        &candidate,
        da,
        db,
        &SearchOptions::with_seed(seed).starts(WITNESS_STARTS),
    )?
    .best
    .value;
    Ok(OptimizationStep {
        candidate,
        still_witness: product_minimum >= -tol::WITNESS_FLOOR,
        product_minimum,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanningReport {
    pub kernel_states: usize,
    /// Rank of the span of the collected |e⟩|f⟩.
    pub span_dimension: usize,
}

/// Collects product vectors with ⟨ef|W|ef⟩ ≈ 0 from a multi-start search
/// and reports the dimension of their span.
pub fn spanning_property_check(w: &Witness, samples: usize, seed: u64) -> Result<SpanningReport> {
    let (da, db) = w.bipartite_dims();
    let search = minimize_product_expectation(
        &w.operator,
        da,
        db,
        &SearchOptions::with_seed(seed).starts(samples.max(1)),
    )?;
    let kets: Vec<Vec<C64>> = search
        .minima
        .iter()
        .filter(|p| p.value.abs() < 1e-8)
        .map(|p| p.ket())
        .collect();
    Ok(SpanningReport {
        kernel_states: kets.len(),
        span_dimension: span_rank(&kets)?,
    })
}

/// Numerical rank of a set of vectors through their Gram matrix.
pub fn span_rank(kets: &[Vec<C64>]) -> Result<usize> {
    if kets.is_empty() {
        return Ok(0);
    }
    let n = kets.len();
    let gram = ComplexMatrix::from_fn(n, n, |i, j| crate::tensor::inner(&kets[i], &kets[j]));
    let e = hermitian_eig(&gram)?;
    let top = e.max();
    Ok(e.values.iter().filter(|&&v| v > 1e-8 * top.max(1.0)).count())
}
