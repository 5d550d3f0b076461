//! Linear maps between operator spaces, stored as normalized Choi matrices.
//!
//! For Λ: B(C^{d_in}) → B(C^{d_out}),
//! `χ = (1/d_in) Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`, input factor first. Trace-preserving
//! maps therefore have unit-trace Choi matrices, and
//! `Λ(X)[k, l] = d_in Σ_ij X[i, j] χ[(i, k), (j, l)]`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::product::{minimize_product_expectation, SearchOptions};
use crate::states::{max_entangled_projector, DensityMatrix};
use crate::tensor::{
    self, conj_ket, hermitian_eig, inverse_sqrt_psd, kron, partial_trace, pauli_y, trace_distance,
    ComplexMatrix, DimProfile,
};
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumMap {
    d_in: usize,
    d_out: usize,
    choi: ComplexMatrix,
    label: Option<String>,
}

impl QuantumMap {
    /// Wraps a Choi matrix. It must be Hermitian; it is symmetrized on entry.
    pub fn from_choi(
        d_in: usize,
        d_out: usize,
        choi: ComplexMatrix,
        label: Option<String>,
    ) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(Error::DimensionMismatch("map dimensions must be positive".into()));
        }
        let n = d_in * d_out;
        if choi.rows() != n || choi.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix {}x{} does not match d_in={d_in}, d_out={d_out}",
                choi.rows(),
                choi.cols()
            )));
        }
        let dev = choi.hermiticity_deviation();
        if dev > 1e-9 * (1.0 + choi.max_abs()) {
            return Err(Error::InvalidParameter(format!(
                "Choi matrix is not Hermitian (deviation {dev:e}); only Hermiticity-preserving maps are supported"
            )));
        }
        Ok(Self {
            d_in,
            d_out,
            choi: choi.hermitian_part(),
            label,
        })
    }

    /// Builds χ from the images Λ(|i⟩⟨j|), indexed `i * d_in + j`.
    pub fn choi_of(
        d_in: usize,
        d_out: usize,
        images: &[ComplexMatrix],
        label: Option<String>,
    ) -> Result<Self> {
        if images.len() != d_in * d_in {
            return Err(Error::DimensionMismatch(format!(
                "{} basis images supplied, {} needed",
                images.len(),
                d_in * d_in
            )));
        }
        let mut choi = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
        let scale = 1.0 / d_in as f64;
        for i in 0..d_in {
            for j in 0..d_in {
                let img = &images[i * d_in + j];
                if img.rows() != d_out || img.cols() != d_out {
                    return Err(Error::DimensionMismatch(format!(
                        "image of |{i}><{j}| is {}x{}, expected {d_out}x{d_out}",
                        img.rows(),
                        img.cols()
                    )));
                }
                for k in 0..d_out {
                    for l in 0..d_out {
                        choi[(i * d_out + k, j * d_out + l)] = img[(k, l)] * scale;
                    }
                }
            }
        }
        Self::from_choi(d_in, d_out, choi, label)
    }

    /// Builds a map from its action on matrix units.
    pub fn from_action(
        d_in: usize,
        d_out: usize,
        label: Option<String>,
        action: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let images = (0..d_in * d_in)
            .map(|ij| action(&ComplexMatrix::unit(d_in, ij / d_in, ij % d_in)))
            .collect::<Result<Vec<_>>>()?;
        Self::choi_of(d_in, d_out, &images, label)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dims(&self) -> DimProfile {
        DimProfile::new(vec![self.d_in, self.d_out]).expect("map dimensions >= 2")
    }

    /// Λ(X) for any d_in × d_in operator X.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d_in || x.cols() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "input {}x{} for a map with d_in = {}",
                x.rows(),
                x.cols(),
                self.d_in
            )));
        }
        let (di, d_o) = (self.d_in, self.d_out);
        let mut out = ComplexMatrix::zeros(d_o, d_o);
        for i in 0..di {
            for j in 0..di {
                let xij = x[(i, j)];
                if xij == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..d_o {
                    for l in 0..d_o {
                        out[(k, l)] += xij * self.choi[(i * d_o + k, j * d_o + l)];
                    }
                }
            }
        }
        Ok(out.scale(di as f64))
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.apply(rho.matrix())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &QuantumMap) -> Result<QuantumMap> {
        if inner.d_out != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: inner d_out = {} but outer d_in = {}",
                inner.d_out, self.d_in
            )));
        }
        let label = match (self.label(), inner.label()) {
            (Some(a), Some(b)) => Some(format!("{a}∘{b}")),
            _ => None,
        };
        QuantumMap::from_action(inner.d_in, self.d_out, label, |x| self.apply(&inner.apply(x)?))
    }

    /// `self ⊗ other` acting on the joint input (self first).
    pub fn tensor(&self, other: &QuantumMap) -> Result<QuantumMap> {
        let (a_in, b_in) = (self.d_in, other.d_in);
        let mut images = Vec::with_capacity(a_in * a_in * b_in * b_in);
        let unit_a: Vec<ComplexMatrix> = (0..a_in * a_in)
            .map(|ij| self.apply(&ComplexMatrix::unit(a_in, ij / a_in, ij % a_in)))
            .collect::<Result<_>>()?;
        let unit_b: Vec<ComplexMatrix> = (0..b_in * b_in)
            .map(|ij| other.apply(&ComplexMatrix::unit(b_in, ij / b_in, ij % b_in)))
            .collect::<Result<_>>()?;
        let d_in = a_in * b_in;
        for row in 0..d_in {
            for col in 0..d_in {
                let (ia, ib) = (row / b_in, row % b_in);
                let (ja, jb) = (col / b_in, col % b_in);
                images.push(kron(&unit_a[ia * a_in + ja], &unit_b[ib * b_in + jb]));
            }
        }
        let label = match (self.label(), other.label()) {
            (Some(a), Some(b)) => Some(format!("{a}⊗{b}")),
            _ => None,
        };
        QuantumMap::choi_of(d_in, self.d_out * other.d_out, &images, label)
    }

    /// id_{d_id} ⊗ Λ.
    pub fn tensor_with_identity(&self, d_id: usize) -> Result<QuantumMap> {
        let id = NamedMap::Identity(d_id).build()?;
        id.tensor(self)
    }

    /// Hilbert–Schmidt adjoint Λ†: tr[A† Λ(B)] = tr[Λ†(A)† B].
    pub fn dual(&self) -> Result<QuantumMap> {
        let images: Vec<ComplexMatrix> = (0..self.d_in * self.d_in)
            .map(|ij| self.apply(&ComplexMatrix::unit(self.d_in, ij / self.d_in, ij % self.d_in)))
            .collect::<Result<_>>()?;
        let label = self.label().map(|l| format!("{l}†"));
        QuantumMap::from_action(self.d_out, self.d_in, label, |y| {
            Ok(ComplexMatrix::from_fn(self.d_in, self.d_in, |i, j| {
                images[i * self.d_in + j].hs_inner(y)
            }))
        })
    }

    /// (1 − p) Λ + p D with D the completely depolarizing map to I/d_out.
    pub fn mix_with_noise(&self, p: f64) -> Result<QuantumMap> {
        self.mix_with(p, &ComplexMatrix::identity(self.d_out).scale(1.0 / self.d_out as f64))
    }

    /// (1 − p) Λ + p D_K with D_K(X) = tr(X)·K.
    pub fn mix_with(&self, p: f64, k: &ComplexMatrix) -> Result<QuantumMap> {
        let noise = kron(&ComplexMatrix::identity(self.d_in).scale(1.0 / self.d_in as f64), k);
        let choi = &self.choi.scale(1.0 - p) + &noise.scale(p);
        QuantumMap::from_choi(self.d_in, self.d_out, choi, self.label.clone())
    }

    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        tensor::min_eigenvalue(&self.choi)
    }

    pub fn is_cp(&self) -> Result<bool> {
        Ok(self.min_choi_eigenvalue()? >= -tol::PSD)
    }

    /// max |tr_out χ − I/d_in|.
    pub fn tp_deviation(&self) -> f64 {
        let red = partial_trace(&self.choi, &self.dims(), &[0]).expect("dims match");
        red.max_abs_diff(&ComplexMatrix::identity(self.d_in).scale(1.0 / self.d_in as f64))
    }

    /// max |Λ(I) − I|.
    pub fn unital_deviation(&self) -> f64 {
        let red = partial_trace(&self.choi, &self.dims(), &[1]).expect("dims match");
        red.scale(self.d_in as f64)
            .max_abs_diff(&ComplexMatrix::identity(self.d_out))
    }

    /// Minimum of ⟨f|Λ(|e⟩⟨e|)|f⟩ over unit vectors, by multi-start search.
    pub fn positivity_estimate(&self, opts: &SearchOptions) -> Result<PositivityEstimate> {
        let search = minimize_product_expectation(&self.choi, self.d_in, self.d_out, opts)?;
        let value = self.d_in as f64 * search.best.value;
        let input = conj_ket(&search.best.ket_a);
        let output = search.best.ket_b;
        if value < -tol::PSD {
            Ok(PositivityEstimate::CertifiedNonpositive {
                value,
                input,
                output,
            })
        } else {
            Ok(PositivityEstimate::NumericallyPositive {
                min_value: value,
                starts: opts.starts,
            })
        }
    }

    pub fn classify(&self, opts: &SearchOptions) -> Result<MapClassification> {
        let min_eig = self.min_choi_eigenvalue()?;
        let tp = self.tp_deviation();
        let un = self.unital_deviation();
        Ok(MapClassification {
            is_cp: min_eig >= -tol::PSD,
            min_choi_eigenvalue: min_eig,
            is_tp: tp <= tol::TP,
            tp_deviation: tp,
            is_unital: un <= tol::TP,
            unital_deviation: un,
            positivity: self.positivity_estimate(opts)?,
        })
    }

    /// Kraus operators from the Choi eigendecomposition (eigenvalues > 1e-10).
    pub fn kraus(&self) -> Result<KrausSet> {
        let e = hermitian_eig(&self.choi)?;
        if e.min() < -tol::PSD {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: e.min(),
            });
        }
        let (di, d_o) = (self.d_in, self.d_out);
        let operators = e
            .values
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &v)| v > tol::KRAUS_CUTOFF)
            .map(|(k, &v)| {
                let vec = e.vector(k);
                let s = (di as f64 * v).sqrt();
                ComplexMatrix::from_fn(d_o, di, |out, inp| vec[inp * d_o + out] * s)
            })
            .collect();
        Ok(KrausSet { operators })
    }
}

impl fmt::Display for QuantumMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} -> {})",
            self.label().unwrap_or("map"),
            self.d_in,
            self.d_out
        )
    }
}

/// Heuristic positivity verdict. A negative value found is a certificate;
/// a nonnegative minimum is only numerical evidence.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PositivityEstimate {
    CertifiedNonpositive {
        value: f64,
        #[serde(skip)]
        input: Vec<C64>,
        #[serde(skip)]
        output: Vec<C64>,
    },
    NumericallyPositive {
        min_value: f64,
        starts: usize,
    },
}

impl PositivityEstimate {
    pub fn is_certified_nonpositive(&self) -> bool {
        matches!(self, PositivityEstimate::CertifiedNonpositive { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MapClassification {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub is_tp: bool,
    pub tp_deviation: f64,
    pub is_unital: bool,
    pub unital_deviation: f64,
    pub positivity: PositivityEstimate,
}

#[derive(Clone, Debug)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Σ K ρ K†.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d_out = self.operators[0].rows();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d_out, d_out), |acc, k| {
                &acc + &k.matmul(rho).matmul(&k.adjoint())
            })
    }

    /// max |Σ K†K − I|.
    pub fn completeness_deviation(&self) -> f64 {
        let d_in = self.operators[0].cols();
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(d_in, d_in), |acc, k| {
                &acc + &k.adjoint().matmul(k)
            });
        sum.max_abs_diff(&ComplexMatrix::identity(d_in))
    }
}

/// max(0, 1 − d_in · D_tr(χ_a, χ_b)), clamped to [0, 1].
pub fn channel_fidelity_bound(a: &QuantumMap, b: &QuantumMap) -> Result<f64> {
    if a.d_in != b.d_in || a.d_out != b.d_out {
        return Err(Error::DimensionMismatch(format!(
            "maps {}->{} and {}->{}",
            a.d_in, a.d_out, b.d_in, b.d_out
        )));
    }
    let dist = trace_distance(&a.choi, &b.choi)?;
    Ok((1.0 - a.d_in as f64 * dist).clamp(0.0, 1.0))
}

/// Random CPTP map: a Gaussian PSD operator normalized so that tr_out χ = I/d_in.
/// The Kraus rank is raised to at least ⌈d_in/d_out⌉, below which no trace
/// preserving map exists.
pub fn random_channel<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    rank: usize,
    rng: &mut R,
) -> Result<QuantumMap> {
    if d_in == 0 || d_out == 0 {
        return Err(Error::DimensionMismatch("map dimensions must be positive".into()));
    }
    let n = d_in * d_out;
    let g = ComplexMatrix::from_fn(n, rank.clamp(d_in.div_ceil(d_out).max(1), n), |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let x = g.matmul(&g.adjoint());
    let dims = DimProfile::bipartite(d_in, d_out)?;
    let t = partial_trace(&x, &dims, &[0])?;
    let t_inv = kron(&inverse_sqrt_psd(&t, 1e-12)?, &ComplexMatrix::identity(d_out));
    let choi = t_inv.matmul(&x).matmul(&t_inv).scale(1.0 / d_in as f64);
    QuantumMap::from_choi(d_in, d_out, choi, Some("random".into()))
}

/// The map registry.
#[derive(Clone, Debug, PartialEq)]
pub enum NamedMap {
    Identity(usize),
    Transpose(usize),
    /// X ↦ (tr(X) I − X)/(d − 1).
    Reduction(usize),
    /// Choi's qutrit map.
    ChoiMap,
    /// Generalized Choi map on qutrits with parameters a, b, c ≥ 0 and phase θ.
    HaMap { a: f64, b: f64, c: f64, theta: f64 },
    /// Θ = −id.
    Inversion(usize),
    /// X ↦ tr(X) I/d_out.
    Depolarize { d_in: usize, d_out: usize },
    /// X ↦ Y Xᵀ Y on a qubit.
    Unot,
}

impl NamedMap {
    pub const NAMES: [&'static str; 8] = [
        "identity",
        "transpose",
        "reduction",
        "choi_map",
        "ha_map",
        "inversion",
        "depolarize",
        "unot",
    ];

    /// Resolves a registry name. `dim` is used by dimension-generic maps
    /// (default 2); `params` feeds `ha_map` (a, b, c, θ) and `depolarize`
    /// (optional d_out).
    pub fn parse(name: &str, dim: Option<usize>, params: &[f64]) -> Result<NamedMap> {
        let d = dim.unwrap_or(2);
        let check_dim = |d: usize| -> Result<usize> {
            if d < 2 {
                Err(Error::InvalidParameter(format!("dimension {d} < 2")))
            } else {
                Ok(d)
            }
        };
        let map = match name.replace('-', "_").as_str() {
            "identity" | "id" => NamedMap::Identity(check_dim(d)?),
            "transpose" | "t" => NamedMap::Transpose(check_dim(d)?),
            "reduction" => NamedMap::Reduction(check_dim(d)?),
            "choi_map" | "choi" => NamedMap::ChoiMap,
            "ha_map" | "ha" => {
                let p = match params.len() {
                    0 => [1.0, 1.0, 1.0, PI / 6.0],
                    4 => [params[0], params[1], params[2], params[3]],
                    n => {
                        return Err(Error::InvalidParameter(format!(
                            "ha_map takes 4 parameters a,b,c,theta; got {n}"
                        )))
                    }
                };
                NamedMap::HaMap {
                    a: p[0],
                    b: p[1],
                    c: p[2],
                    theta: p[3],
                }
            }
            "inversion" | "theta" => NamedMap::Inversion(check_dim(d)?),
            "depolarize" | "depolarizing" => {
                let d_out = match params {
                    [] => d,
                    [x] if *x >= 2.0 && x.fract() == 0.0 => *x as usize,
                    _ => {
                        return Err(Error::InvalidParameter(
                            "depolarize takes an optional integer d_out >= 2".into(),
                        ))
                    }
                };
                NamedMap::Depolarize {
                    d_in: check_dim(d)?,
                    d_out,
                }
            }
            "unot" => NamedMap::Unot,
            _ => return Err(Error::UnknownName(name.to_string())),
        };
        Ok(map)
    }

    pub fn label(&self) -> String {
        match self {
            NamedMap::Identity(d) => format!("identity({d})"),
            NamedMap::Transpose(d) => format!("transpose({d})"),
            NamedMap::Reduction(d) => format!("reduction({d})"),
            NamedMap::ChoiMap => "choi_map".into(),
            NamedMap::HaMap { a, b, c, theta } => format!("ha_map({a},{b},{c},{theta})"),
            NamedMap::Inversion(d) => format!("inversion({d})"),
            NamedMap::Depolarize { d_in, d_out } => format!("depolarize({d_in},{d_out})"),
            NamedMap::Unot => "unot".into(),
        }
    }

    pub fn build(&self) -> Result<QuantumMap> {
        let label = Some(self.label());
        match *self {
            NamedMap::Identity(d) => {
                if d < 1 {
                    return Err(Error::InvalidParameter("dimension 0".into()));
                }
                QuantumMap::from_choi(d, d, max_entangled_projector(d), label)
            }
            NamedMap::Transpose(d) => QuantumMap::from_action(d, d, label, |x| Ok(x.transpose())),
            NamedMap::Reduction(d) => QuantumMap::from_action(d, d, label, |x| {
                let id = ComplexMatrix::identity(d).scale_c(x.trace());
                Ok((&id - x).scale(1.0 / (d - 1) as f64))
            }),
            NamedMap::ChoiMap => QuantumMap::from_action(3, 3, label, |x| Ok(choi_map_action(x))),
            NamedMap::HaMap { a, b, c, theta } => {
                if a < 0.0 || b < 0.0 || c < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "ha_map needs a, b, c >= 0; got ({a}, {b}, {c})"
                    )));
                }
                QuantumMap::from_action(3, 3, label, |x| Ok(ha_map_action(a, b, c, theta, x)))
            }
            NamedMap::Inversion(d) => {
                QuantumMap::from_choi(d, d, max_entangled_projector(d).scale(-1.0), label)
            }
            NamedMap::Depolarize { d_in, d_out } => QuantumMap::from_choi(
                d_in,
                d_out,
                ComplexMatrix::identity(d_in * d_out).scale(1.0 / (d_in * d_out) as f64),
                label,
            ),
            NamedMap::Unot => {
                let y = pauli_y();
                QuantumMap::from_action(2, 2, label, |x| Ok(y.matmul(&x.transpose()).matmul(&y)))
            }
        }
    }
}

/// Convenience: `make_named_map("transpose", Some(3), &[])`.
pub fn make_named_map(name: &str, dim: Option<usize>, params: &[f64]) -> Result<QuantumMap> {
    NamedMap::parse(name, dim, params)?.build()
}

fn choi_map_action(x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = x.scale(-1.0);
    for i in 0..3 {
        let prev = (i + 2) % 3;
        out[(i, i)] += x[(i, i)] * 2.0;
        out[(prev, prev)] += x[(i, i)];
    }
    out.scale(0.5)
}

fn ha_map_action(a: f64, b: f64, c: f64, theta: f64, x: &ComplexMatrix) -> ComplexMatrix {
    let p = C64::from_polar(1.0, theta);
    let m = C64::from_polar(1.0, -theta);
    let d = |i: usize| x[(i, i)];
    let mut out = ComplexMatrix::zeros(3, 3);
    out[(0, 0)] = d(0) * a + d(1) * b + d(2) * c;
    out[(1, 1)] = d(0) * c + d(1) * a + d(2) * b;
    out[(2, 2)] = d(0) * b + d(1) * c + d(2) * a;
    out[(0, 1)] = -p * x[(0, 1)];
    out[(0, 2)] = -m * x[(0, 2)];
    out[(1, 0)] = -m * x[(1, 0)];
    out[(1, 2)] = -p * x[(1, 2)];
    out[(2, 0)] = -p * x[(2, 0)];
    out[(2, 1)] = -m * x[(2, 1)];
    out
}
