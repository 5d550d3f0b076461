//! Canonical states: maximally entangled and Weyl–Bell states, isotropic
//! states, symmetric/antisymmetric projectors, plus state validation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{
    self, hermitian_eig, kron, partial_trace, partial_transpose, projector, ComplexMatrix,
    DimProfile,
};
use crate::tol;

/// Positive, unit-trace operator with its subsystem structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: DimProfile,
}

/// One violated state axiom and its magnitude.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    DimensionMismatch { side: usize, expected: usize },
    NotHermitian { deviation: f64 },
    TraceDeviation { deviation: f64 },
    NegativeEigenvalue { value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => write!(f, "not square ({rows}x{cols})"),
            Violation::DimensionMismatch { side, expected } => {
                write!(f, "side {side} does not match dims product {expected}")
            }
            Violation::NotHermitian { deviation } => {
                write!(f, "not Hermitian (deviation {deviation:e})")
            }
            Violation::TraceDeviation { deviation } => {
                write!(f, "trace deviation {deviation:e}")
            }
            Violation::NegativeEigenvalue { value } => write!(f, "negative eigenvalue {value:e}"),
        }
    }
}

/// Outcome of [`validate_state`].
#[derive(Clone, Debug)]
pub enum StateCheck {
    Valid(DensityMatrix),
    Invalid(Vec<Violation>),
}

impl StateCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, StateCheck::Valid(_))
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            StateCheck::Valid(_) => &[],
            StateCheck::Invalid(v) => v,
        }
    }

    pub fn into_result(self) -> Result<DensityMatrix> {
        match self {
            StateCheck::Valid(s) => Ok(s),
            StateCheck::Invalid(v) => Err(Error::InvalidState(
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            )),
        }
    }
}

/// Checks the state axioms and reports every violated one.
pub fn validate_state(m: &ComplexMatrix, dims: &DimProfile) -> StateCheck {
    let mut violations = Vec::new();
    if !m.is_square() {
        violations.push(Violation::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
        return StateCheck::Invalid(violations);
    }
    if m.rows() != dims.total() {
        violations.push(Violation::DimensionMismatch {
            side: m.rows(),
            expected: dims.total(),
        });
    }
    let herm = m.hermiticity_deviation();
    if herm > tol::STATE {
        violations.push(Violation::NotHermitian { deviation: herm });
    }
    let trace_dev = (m.trace() - C64::new(1.0, 0.0)).norm();
    if trace_dev > tol::STATE {
        violations.push(Violation::TraceDeviation {
            deviation: trace_dev,
        });
    }
    match hermitian_eig(m) {
        Ok(e) if e.min() < -tol::PSD => {
            violations.push(Violation::NegativeEigenvalue { value: e.min() })
        }
        Ok(_) => {}
        Err(_) => violations.push(Violation::NegativeEigenvalue { value: f64::NAN }),
    }
    if violations.is_empty() {
        StateCheck::Valid(DensityMatrix {
            matrix: m.hermitian_part(),
            dims: dims.clone(),
        })
    } else {
        StateCheck::Invalid(violations)
    }
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: DimProfile) -> Result<Self> {
        validate_state(&matrix, &dims).into_result()
    }

    /// Normalizes trace and Hermiticity before validating; for outputs of
    /// channels that are only trace-preserving up to rounding.
    pub fn new_normalized(matrix: ComplexMatrix, dims: DimProfile) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.abs() < 1e-300 {
            return Err(Error::InvalidState("zero trace".into()));
        }
        Self::new(matrix.hermitian_part().scale(1.0 / tr), dims)
    }

    pub fn pure(ket: &[C64], dims: DimProfile) -> Result<Self> {
        Self::new(projector(&tensor::normalized(ket)), dims)
    }

    pub fn maximally_mixed(dims: DimProfile) -> Self {
        let n = dims.total();
        Self {
            matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            dims,
        }
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        let mut dims = a.dims.dims().to_vec();
        dims.extend_from_slice(b.dims.dims());
        Self {
            matrix: kron(&a.matrix, &b.matrix),
            dims: DimProfile::new(dims).expect("dims of valid states"),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &DimProfile {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_of_product(&self.matrix).re
    }

    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        let dims = DimProfile::new(keep_sorted.iter().map(|&k| self.dims.dims()[k]).collect())?;
        DensityMatrix::new_normalized(m, dims)
    }

    pub fn partial_transpose(&self, subsystem: usize) -> Result<ComplexMatrix> {
        partial_transpose(&self.matrix, &self.dims, subsystem)
    }

    /// Full transpose ρᵀ (again a valid state).
    pub fn transpose(&self) -> DensityMatrix {
        Self {
            matrix: self.matrix.transpose(),
            dims: self.dims.clone(),
        }
    }

    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        tensor::uhlmann_fidelity(&self.matrix, &other.matrix)
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        tensor::trace_distance(&self.matrix, &other.matrix)
    }

    /// tr(ρ σ).
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        self.matrix.trace_of_product(&other.matrix).re
    }
}

/// Vector of |φ⁺_d⟩ = Σ |ii⟩/√d.
pub fn max_entangled_ket(d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = C64::new(amp, 0.0);
    }
    v
}

/// P⁺_d as a plain matrix.
pub fn max_entangled_projector(d: usize) -> ComplexMatrix {
    projector(&max_entangled_ket(d))
}

pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
    }
    DensityMatrix::new(max_entangled_projector(d), DimProfile::bipartite(d, d)?)
}

/// Weyl operator W_{m,n} = Σ_k e^{2πi kn/d} |k⟩⟨k+m|.
pub fn weyl_operator(d: usize, m: usize, n: usize) -> ComplexMatrix {
    let mut w = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * PI * (k * n) as f64 / d as f64;
        w[(k, (k + m) % d)] = C64::from_polar(1.0, phase);
    }
    w
}

pub fn weyl_basis_ket(d: usize, m: usize, n: usize) -> Result<Vec<C64>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
    }
    if m >= d || n >= d {
        return Err(Error::InvalidParameter(format!(
            "Weyl indices ({m}, {n}) out of range for d = {d}"
        )));
    }
    let op = kron(&ComplexMatrix::identity(d), &weyl_operator(d, m, n));
    Ok(op.mul_vec(&max_entangled_ket(d)))
}

/// (id ⊗ W_{m,n}) |φ⁺_d⟩ as a density matrix.
pub fn weyl_basis_state(d: usize, m: usize, n: usize) -> Result<DensityMatrix> {
    DensityMatrix::pure(&weyl_basis_ket(d, m, n)?, DimProfile::bipartite(d, d)?)
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn ket(self) -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = match self {
            Bell::PhiPlus => [s, 0.0, 0.0, s],
            Bell::PhiMinus => [s, 0.0, 0.0, -s],
            Bell::PsiPlus => [0.0, s, s, 0.0],
            Bell::PsiMinus => [0.0, s, -s, 0.0],
        };
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    pub fn state(self) -> DensityMatrix {
        DensityMatrix::pure(&self.ket(), DimProfile::bipartite(2, 2).expect("2x2"))
            .expect("Bell states are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            Bell::PhiPlus => "phi+",
            Bell::PhiMinus => "phi-",
            Bell::PsiPlus => "psi+",
            Bell::PsiMinus => "psi-",
        }
    }
}

/// (1 − p) P⁺_d + (p/d²) I, with p the white-noise weight.
pub fn isotropic(d: usize, p: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "isotropic noise weight {p} outside [0, 1]"
        )));
    }
    let n = d * d;
    let m = &max_entangled_projector(d).scale(1.0 - p)
        + &ComplexMatrix::identity(n).scale(p / n as f64);
    DensityMatrix::new(m, DimProfile::bipartite(d, d)?)
}

/// (S_d, A_d) = ((I + Π)/2, (I − Π)/2).
pub fn sym_antisym_projectors(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let swap = tensor::swap_operator(d);
    let id = ComplexMatrix::identity(d * d);
    ((&id + &swap).scale(0.5), (&id - &swap).scale(0.5))
}

/// Haar-random pure state.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    tensor::normalized(&v)
}

/// Random mixed state G G† / tr(G G†) with a d×rank complex Gaussian G.
pub fn random_density<R: Rng + ?Sized>(dims: &DimProfile, rank: usize, rng: &mut R) -> DensityMatrix {
    let n = dims.total();
    let rank = rank.clamp(1, n);
    let g = ComplexMatrix::from_fn(n, rank, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = g.matmul(&g.adjoint());
    DensityMatrix::new_normalized(m, dims.clone()).expect("Gram matrices are PSD")
}

/// Named-state registry: `bell:phi+`, `bell:psi-`, `isotropic:d=3,p=0.5`,
/// `maxent:d=4`, `mixed:d=2`, `product:00` (computational basis, qubits).
pub fn named_state(desc: &str) -> Result<DensityMatrix> {
    let (family, args) = desc.split_once(':').unwrap_or((desc, ""));
    let kv = parse_kv(args)?;
    let get_usize = |key: &str| -> Result<usize> {
        kv.iter()
            .find(|(k, _)| k == key)
            .ok_or_else(|| Error::InvalidParameter(format!("`{desc}` needs `{key}=`")))?
            .1
            .parse::<usize>()
            .map_err(|e| Error::InvalidParameter(format!("`{key}` in `{desc}`: {e}")))
    };
    match family {
        "bell" => {
            let bell = Bell::ALL
                .into_iter()
                .find(|b| b.name() == args)
                .ok_or_else(|| Error::UnknownName(desc.to_string()))?;
            Ok(bell.state())
        }
        "isotropic" => {
            let d = get_usize("d")?;
            let p = kv
                .iter()
                .find(|(k, _)| k == "p")
                .ok_or_else(|| Error::InvalidParameter(format!("`{desc}` needs `p=`")))?
                .1
                .parse::<f64>()
                .map_err(|e| Error::InvalidParameter(format!("`p` in `{desc}`: {e}")))?;
            isotropic(d, p)
        }
        "maxent" => max_entangled(get_usize("d")?),
        "mixed" => {
            let d = get_usize("d")?;
            Ok(DensityMatrix::maximally_mixed(DimProfile::bipartite(d, d)?))
        }
        "product" => {
            let bits: Vec<usize> = args
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::InvalidParameter(format!("bad qubit label in `{desc}`"))),
                })
                .collect::<Result<_>>()?;
            if bits.len() < 2 {
                return Err(Error::InvalidParameter(format!(
                    "`{desc}` needs at least two qubits"
                )));
            }
            let index = bits.iter().fold(0, |acc, b| acc * 2 + b);
            let n = 1 << bits.len();
            DensityMatrix::pure(&tensor::basis_ket(n, index), DimProfile::new(vec![2; bits.len()])?)
        }
        _ => Err(Error::UnknownName(desc.to_string())),
    }
}

fn parse_kv(args: &str) -> Result<Vec<(String, String)>> {
    if args.is_empty() || !args.contains('=') {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|pair| {
            pair.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidParameter(format!("malformed argument `{pair}`")))
        })
        .collect()
}
