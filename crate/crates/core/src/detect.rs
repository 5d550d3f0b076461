//! Detection pipelines: SPA spectrum test, PPT and CCNR criteria, a Gilbert
//! nearest-separable search and the HOM coincidence estimator.

use std::io::Write;

use log::debug;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::Serialize;

use crate::channels::QuantumMap;
use crate::error::{Error, Result};
use crate::product::{maximize_product_expectation, reconstruct, refine_from, SearchOptions, SeparableTerm};
use crate::spa::spa_bipartite_with;
use crate::states::{isotropic, random_ket, DensityMatrix};
use crate::tensor::{hermitian_eig, inner, kron, min_eigenvalue, partial_transpose, projector, realign, trace_norm, ComplexMatrix, DimProfile};
use crate::tol;
use crate::witnesses::SpaWitness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMethod {
    SpaSpectrum,
    Witness,
    Ppt,
    Ccnr,
    Hom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    NotDetected,
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectionReport {
    pub method: DetectionMethod,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub shots: Option<u64>,
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DetectionReport {
    fn exact(method: DetectionMethod, statistic: f64, threshold: f64, entangled: bool) -> Self {
        Self {
            method,
            statistic,
            threshold,
            verdict: if entangled {
                Verdict::Entangled
            } else {
                Verdict::NotDetected
            },
            shots: None,
            stderr: None,
            note: None,
        }
    }

    pub fn is_entangled(&self) -> bool {
        self.verdict == Verdict::Entangled
    }
}

fn bipartite(rho: &DensityMatrix) -> Result<(usize, usize)> {
    rho.dims().as_bipartite()
}

/// SPA of id_{d_A} ⊗ Λ prepared once for repeated detection.
#[derive(Clone, Debug)]
pub struct SpaDetector {
    spa: crate::spa::SpaResult,
    direct: QuantumMap,
    d_a: usize,
    /// (1 − p*)/tr χ_Λ: slope of the affine eigenvalue law.
    slope: f64,
}

impl SpaDetector {
    pub fn new(map: &QuantumMap, d_a: usize) -> Result<Self> {
        let spa = spa_bipartite_with(map, d_a)?;
        let direct = map.tensor_with_identity(d_a)?;
        let slope = (1.0 - spa.p_star) / map.choi().trace().re;
        Ok(Self {
            spa,
            direct,
            d_a,
            slope,
        })
    }

    pub fn spa(&self) -> &crate::spa::SpaResult {
        &self.spa
    }

    pub fn threshold(&self) -> f64 {
        self.spa.threshold
    }

    pub fn detect(&self, rho: &DensityMatrix) -> Result<DetectionReport> {
        let (da, db) = bipartite(rho)?;
        if da != self.d_a || da * db != self.direct.d_in() {
            return Err(Error::DimensionMismatch(format!(
                "state is {da}x{db} but the detector acts on {}",
                self.direct.d_in()
            )));
        }
        let statistic = min_eigenvalue(&self.spa.spa_map.apply(rho.matrix())?)?;
        let entangled = self.spa.threshold - statistic > tol::DETECTION;
        let direct = min_eigenvalue(&self.direct.apply(rho.matrix())?)?;
        if entangled != (direct < 0.0) && direct.abs() * self.slope > 1e-9 {
            return Err(Error::NumericalFailure(format!(
                "SPA statistic {statistic} vs threshold {} disagrees with direct eigenvalue {direct}",
                self.spa.threshold
            )));
        }
        Ok(DetectionReport::exact(
            DetectionMethod::SpaSpectrum,
            statistic,
            self.spa.threshold,
            entangled,
        ))
    }
}

/// Minimum eigenvalue of the SPA of id ⊗ Λ applied to ρ, against p*/(d_A d_out).
/// The verdict is cross-checked against the sign of the minimum eigenvalue of
/// (id ⊗ Λ)[ρ].
pub fn spa_detect(rho: &DensityMatrix, map: &QuantumMap) -> Result<DetectionReport> {
    let (da, db) = bipartite(rho)?;
    if db != map.d_in() {
        return Err(Error::DimensionMismatch(format!(
            "state is {da}x{db} but the map acts on dimension {}",
            map.d_in()
        )));
    }
    SpaDetector::new(map, da)?.detect(rho)
}

/// Peres criterion: minimum eigenvalue of ρ^Γ (transpose on the second factor).
pub fn ppt_test(rho: &DensityMatrix) -> Result<DetectionReport> {
    let (da, db) = bipartite(rho)?;
    let statistic = min_eigenvalue(&rho.partial_transpose(1)?)?;
    let entangled = statistic < -tol::DETECTION;
    let mut report = DetectionReport::exact(DetectionMethod::Ppt, statistic, 0.0, entangled);
    if !entangled && da * db <= 6 {
        report.note = Some("separable (exact)".into());
    }
    Ok(report)
}

/// Trace norm of the realigned operator.
pub fn ccnr_value(m: &ComplexMatrix, dims: &DimProfile) -> Result<f64> {
    Ok(trace_norm(&realign(m, dims)?))
}

pub fn ccnr_test(rho: &DensityMatrix) -> Result<DetectionReport> {
    bipartite(rho)?;
    let statistic = ccnr_value(rho.matrix(), rho.dims())?;
    Ok(DetectionReport::exact(
        DetectionMethod::Ccnr,
        statistic,
        1.0,
        statistic > 1.0 + tol::PSD,
    ))
}

#[derive(Clone, Debug)]
pub struct GilbertOptions {
    pub max_iter: usize,
    /// Run a fully corrective reweighting every this many iterations.
    pub corrective_every: usize,
    /// Stop once the distance improved by less than `stall_tolerance` over this many iterations.
    pub stall_window: usize,
    pub stall_tolerance: f64,
    pub target_distance: f64,
    /// Random restarts of the product oracle besides the warm start.
    pub oracle_starts: usize,
    /// Alternating sweeps per oracle start.
    pub oracle_sweeps: usize,
}

impl Default for GilbertOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            corrective_every: 25,
            stall_window: 200,
            stall_tolerance: 1e-10,
            target_distance: 1e-12,
            oracle_starts: 1,
            oracle_sweeps: 50,
        }
    }
}

impl GilbertOptions {
    pub fn max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparableApproximation {
    pub decomposition: Vec<SeparableTerm>,
    /// Hilbert–Schmidt distance to the target.
    pub distance: f64,
    pub iterations: usize,
    /// Distance after every iteration, starting with the initial product state.
    #[serde(skip)]
    pub distances: Vec<f64>,
}

impl SeparableApproximation {
    pub fn state(&self) -> ComplexMatrix {
        reconstruct(&self.decomposition).expect("decomposition is never empty")
    }
}

/// Nearest separable state found by the Gilbert algorithm with default options.
pub fn nearest_separable(rho: &DensityMatrix, max_iter: usize, seed: u64) -> Result<SeparableApproximation> {
    nearest_separable_with(rho, &GilbertOptions::default().max_iter(max_iter), seed)
}

pub fn nearest_separable_with(
    rho: &DensityMatrix,
    opts: &GilbertOptions,
    seed: u64,
) -> Result<SeparableApproximation> {
    let (da, db) = bipartite(rho)?;
    let target = rho.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = maximize_product_expectation(
        target,
        da,
        db,
        &SearchOptions::with_seed(seed).starts(8),
    )?
    .best;
    let mut terms = vec![SeparableTerm::new(1.0, &start.ket_a, &start.ket_b)];
    let mut sigma = terms[0].operator();
    let mut dist = (target - &sigma).frobenius_norm();
    let mut distances = vec![dist];
    let mut warm = start.ket_b.clone();
    let mut iterations = 0;

    while iterations < opts.max_iter && dist > opts.target_distance {
        iterations += 1;
        let g = target - &sigma;
        let neg = g.scale(-1.0);
        let mut best = refine_from(&neg, da, db, warm.clone(), opts.oracle_sweeps, 1e-13)?;
        for _ in 0..opts.oracle_starts {
            let p = refine_from(&neg, da, db, random_ket(db, &mut rng), opts.oracle_sweeps, 1e-13)?;
            if p.value < best.value {
                best = p;
            }
        }
        warm = best.ket_b.clone();
        let tau = kron(&projector(&best.ket_a), &projector(&best.ket_b));
        let diff = &tau - &sigma;
        let gain = g.hs_inner(&diff).re;
        let norm2 = diff.frobenius_norm().powi(2);
        if gain > 0.0 && norm2 > 0.0 {
            let t = (gain / norm2).clamp(0.0, 1.0);
            for term in &mut terms {
                term.weight *= 1.0 - t;
            }
            terms.push(SeparableTerm::new(t, &best.ket_a, &best.ket_b));
            terms.retain(|term| term.weight > 1e-16);
            sigma = &sigma.scale(1.0 - t) + &tau.scale(t);
            dist = (target - &sigma).frobenius_norm().min(dist);
        }
        if iterations % opts.corrective_every == 0 {
            if let Some((new_terms, new_sigma, d)) = corrective_step(&terms, target)? {
                if d < dist {
                    terms = new_terms;
                    sigma = new_sigma;
                    dist = d;
                }
            }
        }
        distances.push(dist);
        if iterations >= opts.stall_window {
            let past = distances[iterations - opts.stall_window];
            if past - dist < opts.stall_tolerance {
                break;
            }
        }
    }
    debug!("gilbert: {iterations} iterations, {} terms, distance {dist:e}", terms.len());
    Ok(SeparableApproximation {
        decomposition: terms,
        distance: dist,
        iterations,
        distances,
    })
}

/// Isometric real coordinates of a Hermitian matrix.
fn real_vec(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut v = Vec::with_capacity(n * n);
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        v.push(m[(i, i)].re);
        for j in i + 1..n {
            v.push(r2 * m[(i, j)].re);
            v.push(r2 * m[(i, j)].im);
        }
    }
    v
}

/// Reweights the current atoms by non-negative least squares with a
/// heavily weighted unit-trace row; weights are renormalized afterwards.
fn corrective_step(
    terms: &[SeparableTerm],
    target: &ComplexMatrix,
) -> Result<Option<(Vec<SeparableTerm>, ComplexMatrix, f64)>> {
    let atoms: Vec<ComplexMatrix> = terms
        .iter()
        .map(|t| SeparableTerm { weight: 1.0, ..t.clone() }.operator())
        .collect();
    let b_vec = real_vec(target);
    let rows = b_vec.len() + 1;
    let trace_weight = 1e3;
    let columns: Vec<Vec<f64>> = atoms.iter().map(real_vec).collect();
    let a = DMatrix::from_fn(rows, atoms.len(), |r, c| {
        if r < b_vec.len() {
            columns[c][r]
        } else {
            trace_weight
        }
    });
    let mut b = DVector::from_vec(b_vec);
    b = b.push(trace_weight);
    let x0 = DVector::from_iterator(terms.len(), terms.iter().map(|t| t.weight));
    let w = nnls_from(&a, &b, x0, 3 * atoms.len() + 50);
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Ok(None);
    }
    let new_terms: Vec<SeparableTerm> = terms
        .iter()
        .zip(w.iter())
        .filter(|(_, &wi)| wi > 0.0)
        .map(|(t, &wi)| SeparableTerm {
            weight: wi / total,
            ..t.clone()
        })
        .collect();
    let Some(sigma) = reconstruct(&new_terms) else {
        return Ok(None);
    };
    let d = (target - &sigma).frobenius_norm();
    Ok(Some((new_terms, sigma, d)))
}

/// Lawson–Hanson non-negative least squares.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> DVector<f64> {
    nnls_from(a, b, DVector::zeros(a.ncols()), max_iter)
}

/// Lawson–Hanson started from a feasible point; its support seeds the passive set.
pub fn nnls_from(a: &DMatrix<f64>, b: &DVector<f64>, x0: DVector<f64>, max_iter: usize) -> DVector<f64> {
    let n = a.ncols();
    let mut x = x0.map(|v| v.max(0.0));
    let mut passive: Vec<bool> = x.iter().map(|&v| v > 0.0).collect();
    let tol = 1e-12 * a.norm().max(1.0);
    let ata = a.transpose() * a;
    let atb = a.transpose() * b;
    // Normal equations on the passive columns; SVD if they are singular.
    let solve = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let gram = DMatrix::from_fn(idx.len(), idx.len(), |r, c| ata[(idx[r], idx[c])]);
        let rhs = DVector::from_fn(idx.len(), |r, _| atb[idx[r]]);
        let sol = match gram.cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => {
                let sub = DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
                sub.svd(true, true)
                    .solve(b, 1e-14)
                    .unwrap_or_else(|_| DVector::zeros(idx.len()))
            }
        };
        let mut z = DVector::zeros(n);
        for (k, &j) in idx.iter().enumerate() {
            z[j] = sol[k];
        }
        z
    };
    let mut warm = passive.iter().any(|&p| p);
    for _ in 0..max_iter {
        if !warm {
            let grad = &atb - &ata * &x;
            let candidate = (0..n)
                .filter(|&j| !passive[j])
                .max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
            match candidate {
                Some(j) if grad[j] > tol => passive[j] = true,
                _ => break,
            }
        }
        warm = false;
        loop {
            let z = solve(&passive);
            if (0..n).filter(|&j| passive[j]).all(|j| z[j] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for j in (0..n).filter(|&j| passive[j] && z[j] <= 0.0) {
                alpha = alpha.min(x[j] / (x[j] - z[j]));
            }
            x = &x + (&z - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= tol {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

/// p_c = (1 − tr σ₁σ₂)/2.
pub fn hom_coincidence(sigma1: &DensityMatrix, sigma2: &DensityMatrix) -> Result<f64> {
    if sigma1.dim() != sigma2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            sigma1.dim(),
            sigma2.dim()
        )));
    }
    Ok((1.0 - sigma1.overlap(sigma2)) / 2.0)
}

/// Pure-state mixture from an eigendecomposition; weights below 1e-14 dropped.
fn mixture(rho: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let e = hermitian_eig(rho)?;
    let mut w = Vec::new();
    let mut kets = Vec::new();
    for (k, &v) in e.values.iter().enumerate() {
        if v > 1e-14 {
            w.push(v);
            kets.push(e.vector(k));
        }
    }
    Ok((w, kets))
}

/// Shots above this draw the coincidence count from its exact binomial law.
pub const HOM_DIRECT_LIMIT: u64 = 10_000_000;

/// Monte Carlo estimate of tr[W̃ρ] = 1 − 2 p_c from simulated HOM coincidences.
pub fn hom_witness_estimate(
    spa_w: &SpaWitness,
    rho: &DensityMatrix,
    shots: u64,
    seed: u64,
) -> Result<DetectionReport> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    if spa_w.state.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "witness state of dimension {} for a state of dimension {}",
            spa_w.state.dim(),
            rho.dim()
        )));
    }
    let (wa, ka) = mixture(spa_w.state.matrix())?;
    let (wb, kb) = mixture(rho.matrix())?;
    let pair_p: Vec<Vec<f64>> = ka
        .iter()
        .map(|a| {
            kb.iter()
                .map(|b| ((1.0 - inner(a, b).norm_sqr()) / 2.0).clamp(0.0, 0.5))
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coincidences = if shots > HOM_DIRECT_LIMIT {
        let p_c: f64 = wa
            .iter()
            .enumerate()
            .flat_map(|(i, a)| wb.iter().enumerate().map(move |(j, b)| (i, j, a * b)))
            .map(|(i, j, w)| w * pair_p[i][j])
            .sum::<f64>()
            / (wa.iter().sum::<f64>() * wb.iter().sum::<f64>());
        let dist = Binomial::new(shots, p_c.clamp(0.0, 1.0))
            .map_err(|e| Error::NumericalFailure(format!("binomial law: {e}")))?;
        dist.sample(&mut rng)
    } else {
        let da = WeightedIndex::new(&wa).map_err(|e| Error::NumericalFailure(e.to_string()))?;
        let db = WeightedIndex::new(&wb).map_err(|e| Error::NumericalFailure(e.to_string()))?;
        let mut count = 0u64;
        for _ in 0..shots {
            let i = da.sample(&mut rng);
            let j = db.sample(&mut rng);
            if rng.random::<f64>() < pair_p[i][j] {
                count += 1;
            }
        }
        count
    };
    let p_hat = coincidences as f64 / shots as f64;
    let estimate = 1.0 - 2.0 * p_hat;
    let stderr = 2.0 * (p_hat * (1.0 - p_hat) / shots as f64).sqrt();
    let margin = if stderr > 0.0 { 3.0 * stderr } else { tol::DETECTION };
    let entangled = estimate < spa_w.threshold - margin;
    Ok(DetectionReport {
        method: DetectionMethod::Hom,
        statistic: estimate,
        threshold: spa_w.threshold,
        verdict: if entangled {
            Verdict::Entangled
        } else {
            Verdict::NotDetected
        },
        shots: Some(shots),
        stderr: Some(stderr),
        note: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// spa_detect over isotropic(d, p) on a uniform grid of p in [0, 1].
pub fn isotropic_sweep(map: &QuantumMap, step: f64) -> Result<Vec<SweepRow>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter(format!("grid step {step} outside (0, 1]")));
    }
    let d = map.d_in();
    let n = (1.0 / step).round() as usize;
    let detector = SpaDetector::new(map, d)?;
    (0..=n)
        .map(|k| {
            let p = (k as f64 * step).min(1.0);
            let r = detector.detect(&isotropic(d, p)?)?;
            Ok(SweepRow {
                p,
                statistic: r.statistic,
                threshold: r.threshold,
                verdict: r.verdict,
            })
        })
        .collect()
}

/// Smallest grid point that is not detected.
pub fn sweep_boundary(rows: &[SweepRow]) -> Option<f64> {
    rows.iter()
        .find(|r| r.verdict == Verdict::NotDetected)
        .map(|r| r.p)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "p,statistic,threshold,verdict")?;
    for r in rows {
        let verdict = match r.verdict {
            Verdict::Entangled => "entangled",
            Verdict::NotDetected => "not_detected",
        };
        writeln!(out, "{},{},{},{}", r.p, r.statistic, r.threshold, verdict)?;
    }
    Ok(())
}

/// Random state on d_a × d_b together with its PT minimum, for property tests.
pub fn random_bipartite<R: Rng + ?Sized>(d_a: usize, d_b: usize, rank: usize, rng: &mut R) -> Result<(DensityMatrix, f64)> {
    let dims = DimProfile::bipartite(d_a, d_b)?;
    let rho = crate::states::random_density(&dims, rank, rng);
    let mu = min_eigenvalue(&partial_transpose(rho.matrix(), &dims, 1)?)?;
    Ok((rho, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::NamedMap;
    use crate::states::Bell;
    use crate::tensor::basis_ket;

    fn qubit(k: &[C64]) -> DensityMatrix {
        DensityMatrix::pure(k, DimProfile::single(k.len()).unwrap()).unwrap()
    }

    #[test]
    fn bell_states_are_detected() {
        let t = NamedMap::Transpose(2).build().unwrap();
        for b in Bell::ALL {
            let r = spa_detect(&b.state(), &t).unwrap();
            assert!((r.statistic - 1.0 / 6.0).abs() < 1e-12);
            assert!((r.threshold - 2.0 / 9.0).abs() < 1e-12);
            assert!(r.is_entangled());
        }
        let mixed = DensityMatrix::maximally_mixed(DimProfile::bipartite(2, 2).unwrap());
        let r = spa_detect(&mixed, &t).unwrap();
        assert!(!r.is_entangled() && r.statistic >= r.threshold);
    }

    #[test]
    fn ppt_examples() {
        let r = ppt_test(&Bell::PsiMinus.state()).unwrap();
        assert!((r.statistic + 0.5).abs() < 1e-12 && r.is_entangled());
        let prod = DensityMatrix::product(&qubit(&basis_ket(2, 0)), &qubit(&basis_ket(2, 1)));
        let r = ppt_test(&prod).unwrap();
        assert_eq!(r.note.as_deref(), Some("separable (exact)"));
        let iso = ppt_test(&isotropic(3, 0.9).unwrap()).unwrap();
        assert!(!iso.is_entangled() && iso.note.is_none());
    }

    #[test]
    fn ccnr_examples() {
        let r = ccnr_test(&Bell::PhiPlus.state()).unwrap();
        assert!((r.statistic - 2.0).abs() < 1e-12 && r.is_entangled());
        let prod = DensityMatrix::product(&qubit(&basis_ket(2, 0)), &qubit(&basis_ket(2, 1)));
        assert!((ccnr_test(&prod).unwrap().statistic - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(DimProfile::bipartite(2, 2).unwrap());
        let r = ccnr_test(&mixed).unwrap();
        // Realigned I/4 is the rank-one |I⟩⟨I|/4 with singular value 2/4.
        assert!((r.statistic - 0.5).abs() < 1e-12 && !r.is_entangled());
    }

    #[test]
    fn nnls_matches_known_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, -1.0, 0.0]);
        let x = nnls(&a, &b, 20);
        assert!(x[1].abs() < 1e-15);
        assert!((x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gilbert_on_separable_and_entangled() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims1 = DimProfile::single(2).unwrap();
        let a = crate::states::random_density(&dims1, 2, &mut rng);
        let b = crate::states::random_density(&dims1, 2, &mut rng);
        let prod = DensityMatrix::product(&a, &b);
        let s = nearest_separable(&prod, 5000, 1).unwrap();
        assert!(s.distance < 1e-4);
        assert!(s.distances.windows(2).all(|w| w[1] <= w[0]));
        let total: f64 = s.decomposition.iter().map(|t| t.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let e = nearest_separable(&Bell::PhiPlus.state(), 2000, 1).unwrap();
        assert!(e.distance > 0.1);

        let t2 = crate::spa::spa(&NamedMap::Transpose(2).build().unwrap()).unwrap();
        let chi = DensityMatrix::new(t2.spa_map.choi().clone(), t2.spa_map.dims()).unwrap();
        let c = nearest_separable(&chi, 5000, 2).unwrap();
        assert!(c.distance < 1e-3);
    }

    #[test]
    fn hom_exact_values() {
        let z = qubit(&basis_ket(2, 0));
        let o = qubit(&basis_ket(2, 1));
        assert_eq!(hom_coincidence(&z, &z).unwrap(), 0.0);
        assert_eq!(hom_coincidence(&z, &o).unwrap(), 0.5);
        let m = DensityMatrix::maximally_mixed(DimProfile::single(3).unwrap());
        let k = qubit(&basis_ket(3, 2));
        assert!((hom_coincidence(&k, &m).unwrap() - (1.0 - 1.0 / 3.0) / 2.0).abs() < 1e-15);
        assert!(hom_coincidence(&z, &k).is_err());
    }

    #[test]
    fn sweep_flips_at_boundary() {
        for d in [2usize, 3] {
            let rows = isotropic_sweep(&NamedMap::Transpose(d).build().unwrap(), 1e-3).unwrap();
            let b = sweep_boundary(&rows).unwrap();
            assert!((b - d as f64 / (d as f64 + 1.0)).abs() <= 1e-3 + 1e-12);
        }
        let mut buf = Vec::new();
        let rows = isotropic_sweep(&NamedMap::Transpose(2).build().unwrap(), 0.5).unwrap();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("p,statistic,threshold,verdict\n0,"));
        assert_eq!(text.lines().count(), 4);
    }
}
