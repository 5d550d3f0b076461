//! Complex projective two-designs: mutually unbiased bases for prime `d`,
//! the qubit tetrahedron and the nine-state qutrit SIC set.
//!
//! A set {|x_k⟩} of N unit vectors is a two-design iff
//! `(1/N) Σ |x_k⟩⟨x_k|^{⊗2} = 2 S_d / (d (d + 1))`, the normalized projector
//! onto the symmetric subspace. The same operator is the Choi matrix of the
//! noisy transpose `d/(d+1)`-admixture, which is why a two-design yields a
//! measure-and-prepare realization of it.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::product::SeparableTerm;
use crate::spa::MeasurePrepareChannel;
use crate::states::{sym_antisym_projectors, Bell, DensityMatrix};
use crate::tensor::{basis_ket, conj_ket, inner, kron, norm, normalized, projector, ComplexMatrix, DimProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Mub,
    Sic,
    Custom,
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignSet {
    pub kind: DesignKind,
    pub dim: usize,
    pub vectors: Vec<Vec<C64>>,
    /// Two-design frame error, see [`two_design_check`].
    pub residual: f64,
}

impl DesignSet {
    /// Wraps arbitrary unit vectors; residual is computed on construction.
    pub fn custom(vectors: Vec<Vec<C64>>) -> Result<Self> {
        Self::build(DesignKind::Custom, vectors)
    }

    fn build(kind: DesignKind, vectors: Vec<Vec<C64>>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidParameter("empty vector set".into()))?;
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch("vectors of differing length".into()));
            }
            if (norm(v) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "vector of norm {} is not normalized",
                    norm(v)
                )));
            }
        }
        let mut set = DesignSet {
            kind,
            dim,
            vectors,
            residual: 0.0,
        };
        set.residual = two_design_check(&set);
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// (1/N) Σ |x⟩⟨x| ⊗ |x⟩⟨x| as weighted product terms.
    pub fn decomposition(&self) -> Vec<SeparableTerm> {
        let w = 1.0 / self.len() as f64;
        self.vectors
            .iter()
            .map(|v| SeparableTerm::new(w, v, v))
            .collect()
    }

    /// Largest deviation of |⟨x_i|x_j⟩|² from the value its kind prescribes.
    pub fn overlap_error(&self) -> f64 {
        let d = self.dim as f64;
        let mut err: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i + 1) {
                let o = inner(a, b).norm_sqr();
                let target = match self.kind {
                    DesignKind::Sic => 1.0 / (d + 1.0),
                    DesignKind::Mub => {
                        if i / self.dim == j / self.dim {
                            0.0
                        } else {
                            1.0 / d
                        }
                    }
                    DesignKind::Custom => continue,
                };
                err = err.max((o - target).abs());
            }
        }
        err
    }
}

/// 2 S_d / (d (d + 1)).
pub fn symmetric_target(d: usize) -> ComplexMatrix {
    let (s, _) = sym_antisym_projectors(d);
    s.scale(2.0 / (d * (d + 1)) as f64)
}

/// max elementwise |(1/N) Σ P⊗P − 2 S_d/(d(d+1))|.
pub fn two_design_check(set: &DesignSet) -> f64 {
    let d = set.dim;
    let n = set.vectors.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let frame = set
        .vectors
        .iter()
        .fold(ComplexMatrix::zeros(d * d, d * d), |acc, v| {
            let p = projector(v);
            &acc + &kron(&p, &p)
        })
        .scale(1.0 / n as f64);
    frame.max_abs_diff(&symmetric_target(d))
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// d + 1 mutually unbiased bases for prime d, stored basis by basis.
pub fn mub(d: usize) -> Result<DesignSet> {
    if !is_prime(d) {
        return Err(Error::InvalidParameter(format!(
            "MUB construction needs a prime dimension, got {d}"
        )));
    }
    let mut vectors: Vec<Vec<C64>> = (0..d).map(|i| basis_ket(d, i)).collect();
    if d == 2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| C64::new(x, 0.0);
        vectors.push(vec![r(s), r(s)]);
        vectors.push(vec![r(s), r(-s)]);
        vectors.push(vec![r(s), C64::new(0.0, s)]);
        vectors.push(vec![r(s), C64::new(0.0, -s)]);
    } else {
        let amp = 1.0 / (d as f64).sqrt();
        for a in 0..d {
            for b in 0..d {
                vectors.push(
                    (0..d)
                        .map(|k| {
                            let e = (a * k * k + b * k) % d;
                            C64::from_polar(amp, 2.0 * PI * e as f64 / d as f64)
                        })
                        .collect(),
                );
            }
        }
    }
    DesignSet::build(DesignKind::Mub, vectors)
}

/// Default qubit phases (θ₂, θ₃, θ₄).
pub const DEFAULT_TETRAHEDRON_PHASES: [f64; 3] = [0.0, PI / 3.0, -PI / 3.0];

/// |e^{−2iθ₂} + e^{−2iθ₃} + e^{−2iθ₄}|.
pub fn phase_condition(phases: [f64; 3]) -> f64 {
    phases
        .iter()
        .map(|&t| C64::from_polar(1.0, -2.0 * t))
        .sum::<C64>()
        .norm()
}

/// The four two-qubit vectors z_i built from the magic basis. Each is of the
/// form v⊗v/2, and Σ |z_i⟩⟨z_i| = S₂/3.
pub fn tetrahedron_product_vectors(phases: [f64; 3]) -> Vec<Vec<C64>> {
    let third = 1.0 / 3.0f64.sqrt();
    let x2 = Bell::PsiPlus.ket();
    let x3 = Bell::PhiMinus.ket();
    let x4: Vec<C64> = Bell::PhiPlus.ket().iter().map(|z| z * C64::i()).collect();
    let signs = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    signs
        .iter()
        .map(|s| {
            (0..4)
                .map(|k| {
                    let terms = [(&x2, phases[0], s[0]), (&x3, phases[1], s[1]), (&x4, phases[2], s[2])];
                    terms
                        .iter()
                        .map(|(x, th, sg)| x[k] * C64::from_polar(0.5 * third * sg, *th))
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Factor a symmetric rank-one two-qubit vector z ∝ v⊗v and return unit v.
fn symmetric_factor(z: &[C64]) -> Result<Vec<C64>> {
    let col0 = [z[0], z[2]];
    let col1 = [z[1], z[3]];
    let col = if norm(&col0) >= norm(&col1) { col0 } else { col1 };
    let v = normalized(&col);
    let outer: Vec<C64> = crate::tensor::ket_kron(&v, &v);
    let amp: C64 = inner(&outer, z);
    let resid = z
        .iter()
        .zip(&outer)
        .map(|(a, b)| (a - b * amp).norm())
        .fold(0.0, f64::max);
    if resid > 1e-12 {
        return Err(Error::NumericalFailure(format!(
            "tetrahedron vector is not a symmetric product (residual {resid:e})"
        )));
    }
    Ok(v)
}

/// SIC set for d = 2 (tetrahedron with the given phases) or d = 3.
pub fn sic(d: usize, phases: Option<[f64; 3]>) -> Result<DesignSet> {
    match d {
        2 => {
            let phases = phases.unwrap_or(DEFAULT_TETRAHEDRON_PHASES);
            let cond = phase_condition(phases);
            if cond > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "phases violate e^(-2i t2) + e^(-2i t3) + e^(-2i t4) = 0 (|sum| = {cond:e})"
                )));
            }
            let vectors = tetrahedron_product_vectors(phases)
                .iter()
                .map(|z| symmetric_factor(z))
                .collect::<Result<Vec<_>>>()?;
            DesignSet::build(DesignKind::Sic, vectors)
        }
        3 => {
            if phases.is_some() {
                return Err(Error::InvalidParameter("phases apply to d = 2 only".into()));
            }
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let zero = C64::new(0.0, 0.0);
            let one = C64::new(s, 0.0);
            let mut vectors = Vec::with_capacity(9);
            for pattern in 0..3 {
                for k in 1..=3 {
                    let w = C64::from_polar(s, 2.0 * PI * k as f64 / 3.0);
                    vectors.push(match pattern {
                        0 => vec![one, w, zero],
                        1 => vec![zero, one, w],
                        _ => vec![w, zero, one],
                    });
                }
            }
            DesignSet::build(DesignKind::Sic, vectors)
        }
        _ => Err(Error::InvalidParameter(format!(
            "SIC sets are provided for d = 2, 3 only (got {d})"
        ))),
    }
}

/// Measure in {w |x*⟩⟨x*|} with w = d/N and prepare |x⟩⟨x|.
pub fn design_channel(set: &DesignSet) -> Result<MeasurePrepareChannel> {
    let residual = two_design_check(set);
    if residual > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "vector set is not a two-design (residual {residual:e})"
        )));
    }
    let d = set.dim;
    let w = d as f64 / set.len() as f64;
    let dims = DimProfile::single(d)?;
    let povm = set
        .vectors
        .iter()
        .map(|v| projector(&conj_ket(v)).scale(w))
        .collect();
    let preparations = set
        .vectors
        .iter()
        .map(|v| DensityMatrix::pure(v, dims.clone()))
        .collect::<Result<Vec<_>>>()?;
    MeasurePrepareChannel::new(povm, preparations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::NamedMap;
    use crate::tensor::canonical_phase;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_mub_matches_pauli_eigenbases() {
        let m = mub(2).unwrap();
        assert_eq!(m.len(), 6);
        assert!(m.overlap_error() < 1e-12);
        assert!(m.residual < 1e-10);
    }

    #[test]
    fn prime_mubs_are_unbiased() {
        for d in [3, 5, 7] {
            let m = mub(d).unwrap();
            assert_eq!(m.len(), d * (d + 1));
            assert!(m.overlap_error() < 1e-9, "d={d}");
            assert!(m.residual < 1e-10, "d={d}");
        }
        assert!(mub(4).is_err());
        assert!(mub(1).is_err());
    }

    #[test]
    fn tetrahedron_vectors_are_symmetric_products() {
        let zs = tetrahedron_product_vectors(DEFAULT_TETRAHEDRON_PHASES);
        let sum = zs
            .iter()
            .fold(ComplexMatrix::zeros(4, 4), |acc, z| &acc + &projector(z));
        assert!(sum.max_abs_diff(&symmetric_target(2)) < 1e-14);
        for z in &zs {
            assert!((norm(z) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn default_tetrahedron_agrees_with_printed_vectors() {
        // v1, v3, v4 as printed; v2 needs the other denominator to be normalized.
        let e = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let em = C64::from_polar(1.0, -2.0 * PI / 3.0);
        let i = C64::i();
        let cp = i * e / (i + em);
        let cm = i * e / (i - em);
        let small = ((3.0 - 3f64.sqrt()) / 6.0).sqrt();
        let large = ((3.0 + 3f64.sqrt()) / 6.0).sqrt();
        let one = C64::new(1.0, 0.0);
        let printed = [
            vec![one * small, cp * small],
            vec![one * large, -cm * large],
            vec![one * large, cm * large],
            vec![one * small, -cp * small],
        ];
        for p in &printed {
            assert!((norm(p) - 1.0).abs() < 1e-12);
        }
        let set = sic(2, None).unwrap();
        for p in &printed {
            let hit = set
                .vectors
                .iter()
                .any(|v| inner(v, p).norm() > 1.0 - 1e-12);
            assert!(hit, "{p:?} not in the tetrahedron");
        }
        assert!(set.overlap_error() < 1e-12);
        assert!(set.residual < 1e-10);
    }

    #[test]
    fn qutrit_sic_overlaps() {
        let s = sic(3, None).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.overlap_error() < 1e-12);
        assert!(s.residual < 1e-10);
        assert!(sic(4, None).is_err());
    }

    #[test]
    fn phase_condition_is_enforced() {
        assert!(sic(2, Some([0.0, PI / 2.0, 0.3])).is_err());
        for alpha in [0.1, 0.7, -1.3] {
            let set = sic(2, Some([alpha, alpha + PI / 3.0, alpha - PI / 3.0])).unwrap();
            assert!(set.residual < 1e-10);
        }
    }

    #[test]
    fn admissible_phases_share_one_channel() {
        let same_set = |a: &DesignSet, b: &DesignSet| {
            a.vectors
                .iter()
                .all(|v| b.vectors.iter().any(|w| inner(v, w).norm() > 1.0 - 1e-9))
        };
        let a = sic(2, None).unwrap();
        // A common shift only rephases each vector.
        let rotated = sic(2, Some([0.4, 0.4 + PI / 3.0, 0.4 - PI / 3.0])).unwrap();
        assert!(same_set(&a, &rotated));
        // Swapping the two offsets gives the mirrored tetrahedron.
        let mirrored = sic(2, Some([0.4, 0.4 - PI / 3.0, 0.4 + PI / 3.0])).unwrap();
        assert!(!same_set(&a, &mirrored));
        let ca = design_channel(&a).unwrap().to_map().unwrap();
        for b in [rotated, mirrored] {
            let cb = design_channel(&b).unwrap().to_map().unwrap();
            assert!(ca.choi().max_abs_diff(cb.choi()) < 1e-10);
        }
    }

    #[test]
    fn random_kets_are_not_a_design() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vs = (0..4).map(|_| crate::states::random_ket(2, &mut rng)).collect();
        let set = DesignSet::custom(vs).unwrap();
        assert!(set.residual > 1e-3);
        assert!(design_channel(&set).is_err());
    }

    #[test]
    fn design_channels_realize_the_noisy_transpose() {
        for (set, d) in [
            (sic(2, None).unwrap(), 2),
            (mub(2).unwrap(), 2),
            (sic(3, None).unwrap(), 3),
            (mub(3).unwrap(), 3),
            (mub(5).unwrap(), 5),
        ] {
            let ch = design_channel(&set).unwrap();
            assert!(ch.completeness_deviation() < 1e-10);
            let map = ch.to_map().unwrap();
            let t = NamedMap::Transpose(d).build().unwrap();
            let p = d as f64 / (d as f64 + 1.0);
            let spa_t = t.mix_with_noise(p).unwrap();
            assert!(map.choi().max_abs_diff(spa_t.choi()) < 1e-10, "d={d}");
        }
    }

    #[test]
    fn canonical_phase_normalizes_leading_entry() {
        let v = sic(2, None).unwrap().vectors[0].clone();
        let c = canonical_phase(&v);
        assert!(c[0].im.abs() < 1e-15 && c[0].re > 0.0);
    }
}
