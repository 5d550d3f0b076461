//! Structural physical approximation.
//!
//! For a Hermiticity-preserving map with Choi matrix χ (trace-normalized
//! first), the SPA admixes white noise,
//! `χ_p = (1 − p) χ + p I/D` with `D = d_in d_out`, at the smallest `p` for
//! which `χ_p ⪰ 0`. Because the noise is proportional to the identity the
//! spectrum moves affinely, which gives `p* = Dλ/(1 + Dλ)` with
//! `λ = max(0, −μ_min(χ))`. Every closed form here is cross-checked against a
//! bisection on the PSD condition.

use log::debug;
use serde::Serialize;

use crate::channels::{NamedMap, QuantumMap};
use crate::designs::{mub, sic, symmetric_target, is_prime, DesignKind};
use crate::detect::{ccnr_value, nearest_separable_with, GilbertOptions};
use crate::error::{Error, Result};
use crate::product::{reconstruction_residual, SeparableTerm};
use crate::states::{isotropic, DensityMatrix};
use crate::tensor::{hermitian_eig, inverse_sqrt_psd, kron, min_eigenvalue, partial_transpose, ComplexMatrix, DimProfile};
use crate::tol;

/// Allowed gap between a closed form and its bisection check.
pub const CROSS_CHECK: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SpaResult {
    /// The map whose SPA was taken (for bipartite SPAs this is id ⊗ Λ).
    pub original: QuantumMap,
    pub spa_map: QuantumMap,
    pub p_star: f64,
    /// max(0, −μ_min) of the trace-normalized Choi matrix.
    pub lambda: f64,
    pub min_eigenvalue: f64,
    /// Detection cut p*/d_out: an output eigenvalue below it certifies a
    /// negative eigenvalue of the unapproximated map's output.
    pub threshold: f64,
    /// Independent bisection estimate of p*.
    pub p_bisection: f64,
}

impl SpaResult {
    pub fn summary(&self) -> SpaSummary {
        SpaSummary {
            map: self.original.label().unwrap_or("map").to_string(),
            d_in: self.original.d_in(),
            d_out: self.original.d_out(),
            p_star: self.p_star,
            lambda: self.lambda,
            min_eigenvalue: self.min_eigenvalue,
            threshold: self.threshold,
            p_bisection: self.p_bisection,
            spa_min_eigenvalue: self.spa_map.min_choi_eigenvalue().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaSummary {
    pub map: String,
    pub d_in: usize,
    pub d_out: usize,
    pub p_star: f64,
    pub lambda: f64,
    pub min_eigenvalue: f64,
    pub threshold: f64,
    pub p_bisection: f64,
    pub spa_min_eigenvalue: f64,
}

/// Smallest p ∈ [0, 1] with `feasible(p)`, assuming feasibility is monotone.
pub fn bisect_min_p(feasible: impl Fn(f64) -> Result<bool>, tolerance: f64) -> Result<f64> {
    if feasible(0.0)? {
        return Ok(0.0);
    }
    if !feasible(1.0)? {
        return Err(Error::NumericalFailure(
            "mixture is not PSD even at p = 1".into(),
        ));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Choi matrix scaled to unit trace; errors for non-positive trace.
pub fn normalized_map(map: &QuantumMap) -> Result<QuantumMap> {
    let tr = map.choi().trace().re;
    if tr <= 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "Choi trace {tr} is not positive; no white-noise SPA exists in this form"
        )));
    }
    if (tr - 1.0).abs() <= 1e-12 {
        return Ok(map.clone());
    }
    let label = map.label().map(|l| l.to_string());
    QuantumMap::from_choi(map.d_in(), map.d_out(), map.choi().scale(1.0 / tr), label)
}

/// SPA of a bare map.
pub fn spa(map: &QuantumMap) -> Result<SpaResult> {
    let norm = normalized_map(map)?;
    let d = (norm.d_in() * norm.d_out()) as f64;
    let mu = norm.min_choi_eigenvalue()?;
    let lambda = (-mu).max(0.0);
    let p_star = d * lambda / (1.0 + d * lambda);
    let identity = ComplexMatrix::identity(norm.choi().rows());
    let p_bisection = bisect_min_p(
        |p| {
            let m = &norm.choi().scale(1.0 - p) + &identity.scale(p / d);
            Ok(min_eigenvalue(&m)? >= 0.0)
        },
        1e-12,
    )?;
    if (p_bisection - p_star).abs() > CROSS_CHECK {
        return Err(Error::NumericalFailure(format!(
            "closed-form p* = {p_star} disagrees with bisection {p_bisection}"
        )));
    }
    let spa_map = norm.mix_with_noise(p_star)?;
    debug!("spa {}: lambda={lambda} p*={p_star}", map);
    Ok(SpaResult {
        original: map.clone(),
        spa_map,
        p_star,
        lambda,
        min_eigenvalue: mu,
        threshold: p_star / norm.d_out() as f64,
        p_bisection,
    })
}

/// Generalized SPA: noise `X ↦ tr(X) K` for a full-rank state K on the output.
pub fn spa_general(map: &QuantumMap, k_state: &DensityMatrix) -> Result<SpaResult> {
    let norm = normalized_map(map)?;
    if k_state.dim() != norm.d_out() {
        return Err(Error::DimensionMismatch(format!(
            "noise state of dimension {} for d_out = {}",
            k_state.dim(),
            norm.d_out()
        )));
    }
    let k_min = min_eigenvalue(k_state.matrix())?;
    if k_min <= tol::PSD {
        return Err(Error::InvalidState(format!(
            "noise state must be full rank (min eigenvalue {k_min:e})"
        )));
    }
    let noise = kron(
        &ComplexMatrix::identity(norm.d_in()).scale(1.0 / norm.d_in() as f64),
        k_state.matrix(),
    );
    let white = inverse_sqrt_psd(&noise, 0.0)?;
    let whitened = white.matmul(norm.choi()).matmul(&white);
    let mu = min_eigenvalue(&whitened)?;
    let t = (-mu).max(0.0);
    let p_star = t / (1.0 + t);
    let p_bisection = bisect_min_p(
        |p| {
            let m = &norm.choi().scale(1.0 - p) + &noise.scale(p);
            Ok(min_eigenvalue(&m)? >= 0.0)
        },
        1e-12,
    )?;
    if (p_bisection - p_star).abs() > CROSS_CHECK {
        return Err(Error::NumericalFailure(format!(
            "closed-form p_K = {p_star} disagrees with bisection {p_bisection}"
        )));
    }
    let spa_map = norm.mix_with(p_star, k_state.matrix())?;
    let choi_mu = norm.min_choi_eigenvalue()?;
    Ok(SpaResult {
        original: map.clone(),
        spa_map,
        p_star,
        lambda: (-choi_mu).max(0.0),
        min_eigenvalue: choi_mu,
        threshold: p_star * k_min,
        p_bisection,
    })
}

/// SPA of id_{d_id} ⊗ Λ; `spa_bipartite` uses d_id = d_in of Λ.
pub fn spa_bipartite_with(map: &QuantumMap, d_id: usize) -> Result<SpaResult> {
    let norm = normalized_map(map)?;
    let ext = norm.tensor_with_identity(d_id)?;
    spa(&ext)
}

/// SPA of id ⊗ Λ on d_A ⊗ d_A with d_A = d_in of Λ;
/// p* = λ d_A³ d_B / (1 + λ d_A³ d_B), threshold p*/(d_A d_B).
pub fn spa_bipartite(map: &QuantumMap) -> Result<SpaResult> {
    spa_bipartite_with(map, map.d_in())
}

/// SPA of the inversion Θ = −id on d × d:
/// Θ̃ = Θ/(d² − 1) + d² D/(d² − 1).
pub fn spa_inversion(d: usize) -> Result<QuantumMap> {
    let theta = NamedMap::Inversion(d).build()?;
    let d2 = (d * d) as f64;
    let dep = NamedMap::Depolarize { d_in: d, d_out: d }.build()?;
    let choi = &theta.choi().scale(1.0 / (d2 - 1.0)) + &dep.choi().scale(d2 / (d2 - 1.0));
    QuantumMap::from_choi(d, d, choi, Some(format!("spa(inversion({d}))")))
}

#[derive(Clone, Debug)]
pub struct LoccDecomposition {
    /// Weight of the second term.
    pub q: f64,
    /// id ⊗ Λ̃.
    pub term_a: QuantumMap,
    /// Θ̃ ⊗ D.
    pub term_b: QuantumMap,
}

impl LoccDecomposition {
    pub fn weights(&self) -> (f64, f64) {
        (1.0 - self.q, self.q)
    }

    pub fn mixture_choi(&self) -> ComplexMatrix {
        &self.term_a.choi().scale(1.0 - self.q) + &self.term_b.choi().scale(self.q)
    }
}

/// Local decomposition of the SPA of id ⊗ Λ:
/// `(1 − q) id ⊗ Λ̃ + q Θ̃ ⊗ D` with
/// `q = (λ d_A³ d_B − λ d_A d_B)/(1 + λ d_A³ d_B)`.
pub fn spa_locc(map: &QuantumMap) -> Result<LoccDecomposition> {
    let norm = normalized_map(map)?;
    let (da, db) = (norm.d_in() as f64, norm.d_out() as f64);
    let lambda = (-norm.min_choi_eigenvalue()?).max(0.0);
    let big = lambda * da * da * da * db;
    let q = (big - lambda * da * db) / (1.0 + big);
    let local = spa(&norm)?;
    let term_a = local.spa_map.tensor_with_identity(norm.d_in())?;
    let dep = NamedMap::Depolarize {
        d_in: norm.d_in(),
        d_out: norm.d_out(),
    }
    .build()?;
    let term_b = spa_inversion(norm.d_in())?.tensor(&dep)?;
    Ok(LoccDecomposition { q, term_a, term_b })
}

/// POVM elements with matching preparations.
#[derive(Clone, Debug)]
pub struct MeasurePrepareChannel {
    povm: Vec<ComplexMatrix>,
    preparations: Vec<DensityMatrix>,
}

impl MeasurePrepareChannel {
    pub fn new(povm: Vec<ComplexMatrix>, preparations: Vec<DensityMatrix>) -> Result<Self> {
        if povm.is_empty() || povm.len() != preparations.len() {
            return Err(Error::InvalidParameter(format!(
                "{} POVM elements for {} preparations",
                povm.len(),
                preparations.len()
            )));
        }
        let d_in = povm[0].rows();
        let d_out = preparations[0].dim();
        for m in &povm {
            if m.rows() != d_in || m.cols() != d_in {
                return Err(Error::DimensionMismatch("POVM elements differ in shape".into()));
            }
            let mu = min_eigenvalue(m)?;
            if mu < -tol::PSD {
                return Err(Error::NotPsd { min_eigenvalue: mu });
            }
        }
        if preparations.iter().any(|s| s.dim() != d_out) {
            return Err(Error::DimensionMismatch("preparations differ in dimension".into()));
        }
        let ch = Self { povm, preparations };
        let dev = ch.completeness_deviation();
        if dev > 1e-9 {
            return Err(Error::IncompletePovm { deviation: dev });
        }
        Ok(ch)
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn preparations(&self) -> &[DensityMatrix] {
        &self.preparations
    }

    pub fn d_in(&self) -> usize {
        self.povm[0].rows()
    }

    pub fn d_out(&self) -> usize {
        self.preparations[0].dim()
    }

    /// max |Σ M_i − I|.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.d_in();
        self.povm
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, m| &acc + m)
            .max_abs_diff(&ComplexMatrix::identity(d))
    }

    /// Σ tr(M_i X) σ_i.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d_in() || x.cols() != self.d_in() {
            return Err(Error::DimensionMismatch(format!(
                "input {}x{} for d_in = {}",
                x.rows(),
                x.cols(),
                self.d_in()
            )));
        }
        let d = self.d_out();
        Ok(self
            .povm
            .iter()
            .zip(&self.preparations)
            .fold(ComplexMatrix::zeros(d, d), |acc, (m, s)| {
                &acc + &s.matrix().scale_c(m.trace_of_product(x))
            }))
    }

    /// Choi matrix (1/d_in) Σ M_iᵀ ⊗ σ_i.
    pub fn to_map(&self) -> Result<QuantumMap> {
        let (di, d_o) = (self.d_in(), self.d_out());
        let choi = self
            .povm
            .iter()
            .zip(&self.preparations)
            .fold(ComplexMatrix::zeros(di * d_o, di * d_o), |acc, (m, s)| {
                &acc + &kron(&m.transpose(), s.matrix())
            })
            .scale(1.0 / di as f64);
        QuantumMap::from_choi(di, d_o, choi, Some("measure-prepare".into()))
    }
}

/// Measure-and-prepare channel whose Choi matrix is Σ w |e⟩⟨e| ⊗ |f⟩⟨f|:
/// POVM `d_in w |e*⟩⟨e*|`, preparation `|f⟩⟨f|`.
pub fn measure_prepare_from(terms: &[SeparableTerm]) -> Result<MeasurePrepareChannel> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty decomposition".into()))?;
    let d_in = first.ket_a.len();
    let d_out = first.ket_b.len();
    let dims = DimProfile::single(d_out)?;
    let mut povm = Vec::with_capacity(terms.len());
    let mut preps = Vec::with_capacity(terms.len());
    for t in terms {
        if t.weight <= 0.0 {
            return Err(Error::InvalidParameter(format!("non-positive weight {}", t.weight)));
        }
        if t.ket_a.len() != d_in || t.ket_b.len() != d_out {
            return Err(Error::DimensionMismatch("kets of differing length".into()));
        }
        let e = crate::tensor::normalized(&crate::tensor::conj_ket(&t.ket_a));
        povm.push(crate::tensor::projector(&e).scale(d_in as f64 * t.weight));
        preps.push(DensityMatrix::pure(&t.ket_b, dims.clone())?);
    }
    MeasurePrepareChannel::new(povm, preps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EbStatus {
    #[serde(rename = "EB")]
    Eb,
    #[serde(rename = "NotEB")]
    NotEb,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EbCertificate {
    /// PPT Choi matrix in a dimension pair where PPT implies separability,
    /// with a Gilbert approximation attached.
    PptExact {
        min_pt_eigenvalue: f64,
        gilbert_distance: f64,
        gilbert_terms: usize,
    },
    /// Explicit design decomposition of the Choi matrix.
    Design {
        design: DesignKind,
        residual: f64,
        decomposition: Vec<SeparableTerm>,
    },
    /// Product-state decomposition found by the Gilbert search.
    Decomposition {
        residual: f64,
        decomposition: Vec<SeparableTerm>,
    },
    /// Negative eigenvalue of the partially transposed Choi matrix.
    Npt { min_pt_eigenvalue: f64 },
    /// Realignment trace norm above one.
    Ccnr { value: f64 },
    /// No certificate; nearest product-mixture distance reached.
    NearestSeparable { distance: f64, iterations: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct EbVerdict {
    pub status: EbStatus,
    pub certificate: EbCertificate,
    pub min_pt_eigenvalue: f64,
    pub ccnr: f64,
}

impl EbVerdict {
    /// Re-checks the certificate against the Choi matrix it refers to.
    pub fn validate(&self, map: &QuantumMap) -> Result<bool> {
        let choi = map.choi();
        let dims = map.dims();
        Ok(match &self.certificate {
            EbCertificate::PptExact {
                min_pt_eigenvalue, ..
            } => {
                let mu = min_eigenvalue(&partial_transpose(choi, &dims, 1)?)?;
                let small = map.d_in() * map.d_out() <= 6;
                small && mu >= -tol::PSD && (mu - min_pt_eigenvalue).abs() < 1e-9
            }
            EbCertificate::Design { decomposition, .. }
            | EbCertificate::Decomposition { decomposition, .. } => {
                decomposition.iter().all(|t| t.weight > 0.0)
                    && reconstruction_residual(decomposition, choi) <= 1e-8
            }
            EbCertificate::Npt { min_pt_eigenvalue } => {
                let mu = min_eigenvalue(&partial_transpose(choi, &dims, 1)?)?;
                mu < -tol::PSD && (mu - min_pt_eigenvalue).abs() < 1e-9
            }
            EbCertificate::Ccnr { value } => {
                let v = ccnr_value(choi, &dims)?;
                v > 1.0 + tol::PSD && (v - value).abs() < 1e-9
            }
            EbCertificate::NearestSeparable { .. } => self.status == EbStatus::Inconclusive,
        })
    }
}

#[derive(Clone, Debug)]
pub struct EbOptions {
    pub seed: u64,
    pub gilbert: GilbertOptions,
}

impl Default for EbOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            gilbert: GilbertOptions::default().max_iter(1500),
        }
    }
}

/// Known design decomposition of χ, if χ = 2S_d/(d(d+1)).
pub fn design_decomposition(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Option<(DesignKind, Vec<SeparableTerm>)> {
    if d_in != d_out || choi.max_abs_diff(&symmetric_target(d_in)) > 1e-10 {
        return None;
    }
    let set = match d_in {
        2 | 3 => sic(d_in, None).ok()?,
        d if is_prime(d) => mub(d).ok()?,
        _ => return None,
    };
    Some((set.kind, set.decomposition()))
}

/// Entanglement-breaking verdict for a CP map, cheapest test first.
pub fn eb_verdict(map: &QuantumMap, opts: &EbOptions) -> Result<EbVerdict> {
    let mu = map.min_choi_eigenvalue()?;
    if mu < -tol::PSD {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: mu });
    }
    let map = normalized_map(map)?;
    let choi = map.choi();
    let dims = map.dims();
    let pt_min = min_eigenvalue(&partial_transpose(choi, &dims, 1)?)?;
    let ccnr = ccnr_value(choi, &dims)?;
    let verdict = |status, certificate| EbVerdict {
        status,
        certificate,
        min_pt_eigenvalue: pt_min,
        ccnr,
    };
    if pt_min < -tol::PSD {
        return Ok(verdict(
            EbStatus::NotEb,
            EbCertificate::Npt {
                min_pt_eigenvalue: pt_min,
            },
        ));
    }
    let rho = DensityMatrix::new_normalized(choi.clone(), dims.clone())?;
    if map.d_in() * map.d_out() <= 6 {
        let approx = nearest_separable_with(&rho, &opts.gilbert, opts.seed)?;
        return Ok(verdict(
            EbStatus::Eb,
            EbCertificate::PptExact {
                min_pt_eigenvalue: pt_min,
                gilbert_distance: approx.distance,
                gilbert_terms: approx.decomposition.len(),
            },
        ));
    }
    if let Some((design, decomposition)) = design_decomposition(choi, map.d_in(), map.d_out()) {
        let residual = reconstruction_residual(&decomposition, choi);
        if residual <= 1e-10 {
            return Ok(verdict(
                EbStatus::Eb,
                EbCertificate::Design {
                    design,
                    residual,
                    decomposition,
                },
            ));
        }
    }
    if ccnr > 1.0 + tol::PSD {
        return Ok(verdict(EbStatus::NotEb, EbCertificate::Ccnr { value: ccnr }));
    }
    let approx = nearest_separable_with(&rho, &opts.gilbert, opts.seed)?;
    let residual = reconstruction_residual(&approx.decomposition, choi);
    if residual <= 1e-8 {
        Ok(verdict(
            EbStatus::Eb,
            EbCertificate::Decomposition {
                residual,
                decomposition: approx.decomposition,
            },
        ))
    } else {
        Ok(verdict(
            EbStatus::Inconclusive,
            EbCertificate::NearestSeparable {
                distance: approx.distance,
                iterations: approx.iterations,
            },
        ))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotropicScan {
    pub dim: usize,
    /// Smallest grid noise level at which id ⊗ Λ no longer detects the state.
    pub boundary_estimate: f64,
    /// d/(d+1): isotropic states are entangled exactly below it.
    pub entanglement_boundary: f64,
    pub detects_all_entangled: bool,
    pub grid: GridSpec,
}

/// Scans isotropic(d, p) with d = d_in of Λ and records where id ⊗ Λ stops
/// producing a negative eigenvalue.
pub fn isotropic_scan(map: &QuantumMap, step: f64) -> Result<IsotropicScan> {
    let d = map.d_in();
    let ext = map.tensor_with_identity(d)?;
    let points = (1.0 / step).round() as usize + 1;
    let boundary = d as f64 / (d as f64 + 1.0);
    let mut first_miss = None;
    let mut all = true;
    for k in 0..points {
        let p = (k as f64 * step).min(1.0);
        let rho = isotropic(d, p)?;
        let out = ext.apply(rho.matrix())?;
        let detected = min_eigenvalue(&out)? < -tol::DETECTION;
        if !detected && first_miss.is_none() {
            first_miss = Some(p);
        }
        if !detected && p < boundary - step {
            all = false;
        }
    }
    Ok(IsotropicScan {
        dim: d,
        boundary_estimate: first_miss.unwrap_or(1.0),
        entanglement_boundary: boundary,
        detects_all_entangled: all,
        grid: GridSpec {
            start: 0.0,
            stop: 1.0,
            step,
            points,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub map: String,
    pub d_in: usize,
    pub d_out: usize,
    pub p_star: f64,
    pub lambda: f64,
    pub verdict: EbStatus,
    pub certificate: EbCertificate,
    pub certificate_valid: bool,
    pub min_pt_eigenvalue: f64,
    pub ccnr: f64,
    pub isotropic_scan: Option<IsotropicScan>,
}

/// SPA, EB verdict of the SPAed map and an isotropic detection scan.
pub fn conjecture_report(map: &QuantumMap, opts: &EbOptions) -> Result<ConjectureReport> {
    let s = spa(map)?;
    let v = eb_verdict(&s.spa_map, opts)?;
    let valid = v.validate(&s.spa_map)?;
    let scan = if map.d_in() == map.d_out() {
        Some(isotropic_scan(map, 1e-3)?)
    } else {
        None
    };
    Ok(ConjectureReport {
        map: map.label().unwrap_or("map").to_string(),
        d_in: map.d_in(),
        d_out: map.d_out(),
        p_star: s.p_star,
        lambda: s.lambda,
        verdict: v.status,
        certificate_valid: valid,
        min_pt_eigenvalue: v.min_pt_eigenvalue,
        ccnr: v.ccnr,
        certificate: v.certificate,
        isotropic_scan: scan,
    })
}

/// Eigenvalues of the Choi matrix, ascending.
pub fn choi_spectrum(map: &QuantumMap) -> Result<Vec<f64>> {
    Ok(hermitian_eig(map.choi())?.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{design_channel, sic};
    use crate::states::Bell;
    use crate::tensor::{pauli_y, swap_operator};

    #[test]
    fn transpose_constants() {
        for d in 2..7 {
            let r = spa(&NamedMap::Transpose(d).build().unwrap()).unwrap();
            assert!((r.p_star - d as f64 / (d as f64 + 1.0)).abs() < 1e-12);
            assert!((r.lambda - 1.0 / d as f64).abs() < 1e-12);
            assert!((r.p_bisection - r.p_star).abs() < 1e-9);
        }
    }

    #[test]
    fn cp_input_needs_no_noise() {
        let dep = NamedMap::Depolarize { d_in: 2, d_out: 3 }.build().unwrap();
        let r = spa(&dep).unwrap();
        assert_eq!(r.p_star, 0.0);
        assert!(r.spa_map.choi().max_abs_diff(dep.choi()) < 1e-15);
    }

    #[test]
    fn minimality() {
        for m in [
            NamedMap::Transpose(3).build().unwrap(),
            NamedMap::Reduction(3).build().unwrap(),
            NamedMap::ChoiMap.build().unwrap(),
        ] {
            let r = spa(&m).unwrap();
            let norm = normalized_map(&m).unwrap();
            let below = norm.mix_with_noise(r.p_star - 1e-6).unwrap();
            assert!(below.min_choi_eigenvalue().unwrap() < -1e-9);
            assert!(r.spa_map.min_choi_eigenvalue().unwrap() >= -1e-9);
        }
    }

    #[test]
    fn ha_map_is_normalized_first() {
        let h = crate::channels::make_named_map("ha_map", None, &[1.0, 1.0, 1.0, 0.5]).unwrap();
        let r = spa(&h).unwrap();
        assert!((r.spa_map.choi().trace().re - 1.0).abs() < 1e-12);
        assert!(r.p_star > 0.0 && r.p_star < 1.0);
    }

    #[test]
    fn spa_general_with_white_noise_is_spa() {
        let t = NamedMap::Transpose(2).build().unwrap();
        let white = DensityMatrix::maximally_mixed(DimProfile::single(2).unwrap());
        let g = spa_general(&t, &white).unwrap();
        assert!((g.p_star - 2.0 / 3.0).abs() < 1e-12);
        let skew = DensityMatrix::new(
            ComplexMatrix::from_real_diag(&[0.9, 0.1]),
            DimProfile::single(2).unwrap(),
        )
        .unwrap();
        let s = spa_general(&t, &skew).unwrap();
        assert!(s.p_star >= 2.0 / 3.0 - 1e-12);
        assert!((s.p_star - s.p_bisection).abs() < 1e-9);
        let cp = spa_general(&NamedMap::Identity(2).build().unwrap(), &skew).unwrap();
        assert!(cp.p_star.abs() < 1e-12);
        let pure = DensityMatrix::new(
            ComplexMatrix::from_real_diag(&[1.0, 0.0]),
            DimProfile::single(2).unwrap(),
        )
        .unwrap();
        assert!(spa_general(&t, &pure).is_err());
    }

    #[test]
    fn bipartite_transpose() {
        let r = spa_bipartite(&NamedMap::Transpose(2).build().unwrap()).unwrap();
        assert!((r.lambda - 0.5).abs() < 1e-12);
        assert!((r.p_star - 8.0 / 9.0).abs() < 1e-12);
        assert!((r.threshold - 2.0 / 9.0).abs() < 1e-12);
        let id = spa_bipartite(&NamedMap::Identity(2).build().unwrap()).unwrap();
        assert_eq!(id.p_star, 0.0);
    }

    #[test]
    fn bipartite_reduction() {
        // χ = I/2 − P⁺ has minimum eigenvalue −1/2.
        let r = spa_bipartite(&NamedMap::Reduction(2).build().unwrap()).unwrap();
        assert!((r.lambda - 0.5).abs() < 1e-12);
        assert!((r.p_star - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn locc_transpose_weights_and_mixture() {
        for m in [
            NamedMap::Transpose(2).build().unwrap(),
            NamedMap::Reduction(2).build().unwrap(),
            NamedMap::Transpose(3).build().unwrap(),
        ] {
            let dec = spa_locc(&m).unwrap();
            let target = spa_bipartite(&m).unwrap();
            assert!(dec.mixture_choi().max_abs_diff(target.spa_map.choi()) < 1e-9, "{m}");
        }
        let dec = spa_locc(&NamedMap::Transpose(2).build().unwrap()).unwrap();
        let (a, b) = dec.weights();
        assert!((a - 1.0 / 3.0).abs() < 1e-12 && (b - 2.0 / 3.0).abs() < 1e-12);
        let id = spa_locc(&NamedMap::Identity(2).build().unwrap()).unwrap();
        assert!(id.q.abs() < 1e-12);
    }

    #[test]
    fn inversion_spa_is_rotated_symmetric_projector() {
        let th = spa_inversion(2).unwrap();
        let y = kron(&ComplexMatrix::identity(2), &pauli_y());
        let s = symmetric_target(2);
        let expected = y.matmul(&s).matmul(&y);
        assert!(th.choi().max_abs_diff(&expected) < 1e-15);
        let phi = Bell::PhiPlus.state().into_matrix();
        let alt = (&ComplexMatrix::identity(4) - &phi).scale(1.0 / 3.0);
        assert!(th.choi().max_abs_diff(&alt) < 1e-15);
    }

    #[test]
    fn measure_prepare_examples() {
        let set = sic(2, None).unwrap();
        let ch = measure_prepare_from(&set.decomposition()).unwrap();
        let map = ch.to_map().unwrap();
        assert!(map.choi().max_abs_diff(&swap_operator(2).scale(1.0 / 6.0).clone().scale(1.0)) > 0.0);
        assert!(map.choi().max_abs_diff(&symmetric_target(2)) < 1e-12);
        let m = measure_prepare_from(&crate::designs::mub(2).unwrap().decomposition()).unwrap();
        assert!(m.to_map().unwrap().choi().max_abs_diff(map.choi()) < 1e-10);
        let d = design_channel(&set).unwrap();
        for (a, b) in d.povm().iter().zip(ch.povm()) {
            assert!(a.max_abs_diff(b) < 1e-14);
        }
        let one = crate::tensor::basis_ket(2, 0);
        assert!(matches!(
            measure_prepare_from(&[SeparableTerm::new(1.0, &one, &one)]),
            Err(Error::IncompletePovm { .. })
        ));
    }

    #[test]
    fn eb_examples() {
        let opts = EbOptions::default();
        let t2 = spa(&NamedMap::Transpose(2).build().unwrap()).unwrap();
        let v = eb_verdict(&t2.spa_map, &opts).unwrap();
        assert_eq!(v.status, EbStatus::Eb);
        assert!(matches!(v.certificate, EbCertificate::PptExact { .. }));
        assert!(v.validate(&t2.spa_map).unwrap());

        let t3 = spa(&NamedMap::Transpose(3).build().unwrap()).unwrap();
        let v3 = eb_verdict(&t3.spa_map, &opts).unwrap();
        assert_eq!(v3.status, EbStatus::Eb);
        match &v3.certificate {
            EbCertificate::Design { residual, .. } => assert!(*residual < 1e-10),
            other => panic!("unexpected {other:?}"),
        }
        assert!(v3.validate(&t3.spa_map).unwrap());

        assert!(matches!(
            eb_verdict(&NamedMap::Transpose(2).build().unwrap(), &opts),
            Err(Error::NotCompletelyPositive { .. })
        ));
        let id = eb_verdict(&NamedMap::Identity(3).build().unwrap(), &opts).unwrap();
        assert_eq!(id.status, EbStatus::NotEb);
    }

    #[test]
    fn transpose_scan_finds_the_isotropic_boundary() {
        let scan = isotropic_scan(&NamedMap::Transpose(3).build().unwrap(), 1e-3).unwrap();
        assert!(scan.detects_all_entangled);
        assert!((scan.boundary_estimate - 0.75).abs() <= 1e-3 + 1e-12);
    }
}
