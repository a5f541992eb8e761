//! Two- and three-qubit state families, validation and random sampling.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hermitian_eigenvalues, identity2, pauli, qubit_from_bloch, tensor_product, Axis,
    ComplexMatrix, C64,
};
use crate::rng::SeedRng;

/// Validation tolerance on Hermiticity, trace and minimum eigenvalue.
pub const VALIDATION_TOL: f64 = 1e-9;
const PARAM_TOL: f64 = 1e-9;

/// Outcome of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub hermiticity_residual: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

/// Hermiticity residual, trace deviation and minimum eigenvalue of a candidate state.
pub fn validate(m: &ComplexMatrix) -> Diagnostics {
    let hermiticity_residual = m.hermiticity_residual();
    let trace_deviation = (m.trace() - c(1.0, 0.0)).norm();
    let herm = (m + &m.adjoint()).scale(0.5);
    let min_eigenvalue = hermitian_eigenvalues(&herm).map_or(f64::NAN, |ev| ev[0]);
    let passes = hermiticity_residual <= VALIDATION_TOL
        && trace_deviation <= VALIDATION_TOL
        && min_eigenvalue >= -VALIDATION_TOL;
    Diagnostics {
        hermiticity_residual,
        trace_deviation,
        min_eigenvalue,
        passes,
    }
}

/// A validated density matrix: Hermitian, unit trace, PSD (all within 1e-9).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let d = validate(&m);
        if d.passes {
            return Ok(Self(m));
        }
        if d.hermiticity_residual > VALIDATION_TOL {
            Err(Error::HermitianRequired(d.hermiticity_residual))
        } else if d.min_eigenvalue < -VALIDATION_TOL {
            Err(Error::NotPsd(d.min_eigenvalue))
        } else {
            Err(Error::InvalidState(format!(
                "trace deviates from 1 by {:e}",
                d.trace_deviation
            )))
        }
    }

    /// Wrap a matrix that is a density matrix by construction.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        debug_assert!(validate(&m).passes, "{m:?}");
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let id = ComplexMatrix::identity(dim)?;
        Ok(Self(id.scale(1.0 / dim as f64)))
    }

    /// Projector onto a (normalized on entry) state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self(ComplexMatrix::outer(&unit)?))
    }

    /// Convex combination `α·self + (1−α)·other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self(&self.0.scale(alpha) + &other.0.scale(1.0 - alpha)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl Deref for DensityMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Fano parameters of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochTwoQubit {
    pub m: [f64; 3],
    pub n: [f64; 3],
    #[serde(rename = "T")]
    pub t: [[f64; 3]; 3],
}

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl BlochTwoQubit {
    pub fn correlations(t: [[f64; 3]; 3]) -> Self {
        Self {
            m: [0.0; 3],
            n: [0.0; 3],
            t,
        }
    }

    pub fn check_range(&self) -> Result<()> {
        if norm3(&self.m) > 1.0 + PARAM_TOL {
            return Err(Error::BlochOutOfRange(format!("|m| = {}", norm3(&self.m))));
        }
        if norm3(&self.n) > 1.0 + PARAM_TOL {
            return Err(Error::BlochOutOfRange(format!("|n| = {}", norm3(&self.n))));
        }
        for (i, row) in self.t.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() || x.abs() > 1.0 + PARAM_TOL {
                    return Err(Error::BlochOutOfRange(format!("t{}{} = {x}", i + 1, j + 1)));
                }
            }
        }
        if self.m.iter().chain(&self.n).any(|x| !x.is_finite()) {
            return Err(Error::BlochOutOfRange("non-finite component".into()));
        }
        Ok(())
    }
}

/// Pauli tensor products `σ_i ⊗ σ_j` indexed by 0 = identity, 1..3 = x, y, z.
fn pauli4(i: usize, j: usize) -> ComplexMatrix {
    let one = |k: usize| match k {
        0 => identity2(),
        k => pauli(Axis::ALL[k - 1]),
    };
    tensor_product(&one(i), &one(j)).expect("2x2 ⊗ 2x2")
}

/// `¼[I + Σ mᵢ σᵢ⊗I + Σ nⱼ I⊗σⱼ + Σ tᵢⱼ σᵢ⊗σⱼ]`.
///
/// The result is Hermitian with unit trace but need not be positive; run
/// [`validate`] or [`DensityMatrix::new`] on it.
pub fn from_bloch(p: &BlochTwoQubit) -> Result<ComplexMatrix> {
    p.check_range()?;
    let mut out = pauli4(0, 0);
    for i in 0..3 {
        out = &out + &pauli4(i + 1, 0).scale(p.m[i]);
        out = &out + &pauli4(0, i + 1).scale(p.n[i]);
        for j in 0..3 {
            out = &out + &pauli4(i + 1, j + 1).scale(p.t[i][j]);
        }
    }
    Ok(out.scale(0.25))
}

/// Fano parameters of a 4×4 Hermitian matrix.
pub fn to_bloch(rho: &ComplexMatrix) -> Result<BlochTwoQubit> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let mut residue: f64 = 0.0;
    let mut expect = |i: usize, j: usize| {
        let z = pauli4(i, j).trace_product(rho);
        residue = residue.max(z.im.abs());
        z.re
    };
    let mut p = BlochTwoQubit {
        m: [0.0; 3],
        n: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        p.m[i] = expect(i + 1, 0);
        p.n[i] = expect(0, i + 1);
        for j in 0..3 {
            p.t[i][j] = expect(i + 1, j + 1);
        }
    }
    if residue > 1e-10 {
        return Err(Error::ImaginaryResidue(residue));
    }
    Ok(p)
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

/// Singlet `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> DensityMatrix {
    let s = FRAC_1_SQRT_2;
    DensityMatrix::pure(&[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]).expect("nonzero")
}

/// The four Bell states in the order φ⁺, φ⁻, ψ⁺, ψ⁻.
pub fn bell_states() -> [DensityMatrix; 4] {
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let p = c(s, 0.0);
    let m = c(-s, 0.0);
    [
        DensityMatrix::pure(&[p, z, z, p]).expect("nonzero"),
        DensityMatrix::pure(&[p, z, z, m]).expect("nonzero"),
        DensityMatrix::pure(&[z, p, p, z]).expect("nonzero"),
        DensityMatrix::pure(&[z, p, m, z]).expect("nonzero"),
    ]
}

/// `v·|ψ⁻⟩⟨ψ⁻| + (1−v)·I/4`.
pub fn werner(v: f64) -> Result<DensityMatrix> {
    check_unit_interval("v", v)?;
    let noise = ComplexMatrix::identity(4)?.scale((1.0 - v) / 4.0);
    Ok(DensityMatrix::new_unchecked(
        &singlet().scale(v) + &noise,
    ))
}

/// The seven real parameters of an X-state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XStateParams {
    #[serde(default, rename = "z0", alias = "beta_z0")]
    pub beta_z0: f64,
    #[serde(default, rename = "0z", alias = "beta_0z")]
    pub beta_0z: f64,
    #[serde(default, rename = "xx", alias = "beta_xx")]
    pub beta_xx: f64,
    #[serde(default, rename = "xy", alias = "beta_xy")]
    pub beta_xy: f64,
    #[serde(default, rename = "yx", alias = "beta_yx")]
    pub beta_yx: f64,
    #[serde(default, rename = "yy", alias = "beta_yy")]
    pub beta_yy: f64,
    #[serde(default, rename = "zz", alias = "beta_zz")]
    pub beta_zz: f64,
}

impl XStateParams {
    /// Matrix entries without any positivity check.
    pub fn matrix(&self) -> ComplexMatrix {
        let b = self;
        let mut m = ComplexMatrix::zeros(4).expect("dim 4");
        m[(0, 0)] = c(0.25 * (1.0 + b.beta_z0 + b.beta_0z + b.beta_zz), 0.0);
        m[(1, 1)] = c(0.25 * (1.0 + b.beta_z0 - b.beta_0z - b.beta_zz), 0.0);
        m[(2, 2)] = c(0.25 * (1.0 - b.beta_z0 + b.beta_0z - b.beta_zz), 0.0);
        m[(3, 3)] = c(0.25 * (1.0 - b.beta_z0 - b.beta_0z + b.beta_zz), 0.0);
        let r14 = c(
            0.25 * (b.beta_xx - b.beta_yy),
            -0.25 * (b.beta_xy + b.beta_yx),
        );
        let r23 = c(
            0.25 * (b.beta_xx + b.beta_yy),
            0.25 * (b.beta_xy - b.beta_yx),
        );
        m[(0, 3)] = r14;
        m[(3, 0)] = r14.conj();
        m[(1, 2)] = r23;
        m[(2, 1)] = r23.conj();
        m
    }

    /// Smallest eigenvalue of the induced matrix, from its two 2×2 blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.matrix();
        let block = |a: usize, b: usize| {
            let (p, q) = (m[(a, a)].re, m[(b, b)].re);
            0.5 * (p + q) - (0.25 * (p - q) * (p - q) + m[(a, b)].norm_sqr()).sqrt()
        };
        block(0, 3).min(block(1, 2))
    }
}

/// X-state with the given β parameters.
pub fn x_state(p: &XStateParams) -> Result<DensityMatrix> {
    let fields = [
        p.beta_z0, p.beta_0z, p.beta_xx, p.beta_xy, p.beta_yx, p.beta_yy, p.beta_zz,
    ];
    if fields.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidXState(f64::NAN));
    }
    let min = p.min_eigenvalue();
    if min < -1e-12 {
        return Err(Error::InvalidXState(min));
    }
    Ok(DensityMatrix::new_unchecked(p.matrix()))
}

/// Points of the β_zz grid tried by [`region_completion`].
pub const REGION_ZZ_POINTS: usize = 41;

/// X-state with the given `β_xx, β_yy`, all other β zero except `β_zz`.
///
/// `β_zz = 0` when that is a state. Otherwise `β_zz` is the point of the
/// 41-point grid on [−1, 1] closest to 0 (lower value on ties) that gives a
/// state, and failing that the closest-to-0 point of the exact feasible
/// interval `|β_xx − β_yy| − 1 ≤ β_zz ≤ 1 − |β_xx + β_yy|`. Returns `None`
/// when no completion exists.
pub fn region_completion(beta_xx: f64, beta_yy: f64) -> Option<XStateParams> {
    let with = |beta_zz: f64| XStateParams {
        beta_xx,
        beta_yy,
        beta_zz,
        ..Default::default()
    };
    let valid = |b: &XStateParams| b.min_eigenvalue() >= -1e-12;
    if !beta_xx.is_finite() || !beta_yy.is_finite() {
        return None;
    }
    if valid(&with(0.0)) {
        return Some(with(0.0));
    }
    let step = 2.0 / (REGION_ZZ_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..REGION_ZZ_POINTS).map(|k| -1.0 + k as f64 * step).collect();
    grid.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    if let Some(b) = grid.into_iter().map(with).find(valid) {
        return Some(b);
    }
    let lo = (beta_xx - beta_yy).abs() - 1.0;
    let hi = 1.0 - (beta_xx + beta_yy).abs();
    let zz = if lo <= hi { 0f64.clamp(lo, hi) } else { 0.5 * (lo + hi) };
    Some(with(zz)).filter(valid)
}

/// The piecewise `𝔥(C)` of the maximally entangled mixed states.
pub fn mems_h(c: f64) -> f64 {
    if c < 2.0 / 3.0 {
        1.0 / 3.0
    } else {
        c / 2.0
    }
}

/// Maximally entangled mixed state of concurrence `c`.
pub fn mems(conc: f64) -> Result<DensityMatrix> {
    check_unit_interval("c", conc)?;
    let h = mems_h(conc);
    let mut m = ComplexMatrix::zeros(4)?;
    m[(0, 0)] = c(h, 0.0);
    m[(1, 1)] = c(1.0 - 2.0 * h, 0.0);
    m[(3, 3)] = c(h, 0.0);
    m[(0, 3)] = c(conc / 2.0, 0.0);
    m[(3, 0)] = c(conc / 2.0, 0.0);
    Ok(DensityMatrix::new_unchecked(m))
}

/// X-state parameters reproducing [`mems`].
pub fn mems_x_params(conc: f64) -> XStateParams {
    let h = mems_h(conc);
    XStateParams {
        beta_xx: conc,
        beta_yy: -conc,
        beta_z0: 1.0 - 2.0 * h,
        beta_0z: -(1.0 - 2.0 * h),
        beta_zz: 4.0 * h - 1.0,
        ..Default::default()
    }
}

/// Amplitudes `η₀…η₄` and phase `θ` of the three-qubit family
/// `η₀|000⟩ + η₁e^{iθ}|100⟩ + η₂|101⟩ + η₃|110⟩ + η₄|111⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripartiteParams {
    pub eta: [f64; 5],
    pub theta: f64,
}

impl TripartiteParams {
    pub fn new(eta: [f64; 5], theta: f64) -> Result<Self> {
        let p = Self { eta, theta };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        for &e in &self.eta {
            if !(-1e-12..=1.0 + 1e-12).contains(&e) {
                return Err(Error::InvalidParameter {
                    name: "eta",
                    value: e,
                });
            }
        }
        let norm: f64 = self.eta.iter().map(|e| e * e).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "sum of eta squared",
                value: norm,
            });
        }
        if !(-1e-12..=PI + 1e-12).contains(&self.theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: self.theta,
            });
        }
        Ok(())
    }

    /// State vector in the A⊗B⊗C computational basis.
    pub fn amplitudes(&self) -> [C64; 8] {
        let [e0, e1, e2, e3, e4] = self.eta;
        let mut psi = [c(0.0, 0.0); 8];
        psi[0] = c(e0, 0.0);
        psi[4] = C64::from_polar(e1, self.theta);
        psi[5] = c(e2, 0.0);
        psi[6] = c(e3, 0.0);
        psi[7] = c(e4, 0.0);
        psi
    }

    /// Maximizer of the AB + AC imaginarity steering sum.
    pub fn monogamy_maximizer() -> Self {
        Self {
            eta: [FRAC_1_SQRT_2, 0.0, 0.5, 0.5, 0.0],
            theta: 0.0,
        }
    }

    pub fn ghz() -> Self {
        Self {
            eta: [FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2],
            theta: 0.0,
        }
    }
}

/// Projector onto the three-qubit pure state.
pub fn tripartite_state(p: &TripartiteParams) -> Result<DensityMatrix> {
    p.check()?;
    Ok(DensityMatrix::new_unchecked(ComplexMatrix::outer(
        &p.amplitudes(),
    )?))
}

/// Random ensembles for property testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleKind {
    /// Haar-random two-qubit pure state.
    Pure4,
    /// Ginibre-random two-qubit mixed state.
    Mixed4,
    /// Tensor product of two Ginibre qubits.
    Product4,
    /// Mixture of up to 16 pure product states.
    Separable4,
    /// Ginibre-random qubit.
    Qubit,
    /// Haar-random pure qubit.
    Pure2,
}

impl std::str::FromStr for SampleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pure4" => SampleKind::Pure4,
            "mixed4" => SampleKind::Mixed4,
            "product4" => SampleKind::Product4,
            "separable4" => SampleKind::Separable4,
            "qubit" => SampleKind::Qubit,
            "pure2" => SampleKind::Pure2,
            other => return Err(Error::InvalidState(format!("unknown sample kind {other}"))),
        })
    }
}

fn gaussian_vector(rng: &mut SeedRng, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| c(rng.normal(), rng.normal())).collect()
}

fn haar_pure(rng: &mut SeedRng, dim: usize) -> DensityMatrix {
    loop {
        let v = gaussian_vector(rng, dim);
        if v.iter().any(|z| z.norm_sqr() > 0.0) {
            return DensityMatrix::pure(&v).expect("nonzero vector");
        }
    }
}

fn ginibre(rng: &mut SeedRng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| c(rng.normal(), rng.normal())).expect("dim");
    let p = g.matmul(&g.adjoint());
    let tr = p.trace().re;
    // Exact Hermitian symmetrization removes rounding asymmetry.
    let p = (&p + &p.adjoint()).scale(0.5 / tr);
    DensityMatrix::new_unchecked(p)
}

fn product(a: &ComplexMatrix, b: &ComplexMatrix) -> DensityMatrix {
    DensityMatrix::new_unchecked(tensor_product(a, b).expect("2x2 ⊗ 2x2"))
}

/// Draw one state of the requested class from `rng`.
pub fn sample_with(kind: SampleKind, rng: &mut SeedRng) -> DensityMatrix {
    match kind {
        SampleKind::Pure4 => haar_pure(rng, 4),
        SampleKind::Mixed4 => ginibre(rng, 4),
        SampleKind::Qubit => ginibre(rng, 2),
        SampleKind::Pure2 => haar_pure(rng, 2),
        SampleKind::Product4 => {
            let a = ginibre(rng, 2);
            let b = ginibre(rng, 2);
            product(&a, &b)
        }
        SampleKind::Separable4 => {
            let k = 1 + (rng.next_u64() % 16) as usize;
            let weights: Vec<f64> = (0..k).map(|_| -(1.0 - rng.uniform()).ln()).collect();
            let total: f64 = weights.iter().sum();
            let mut acc = ComplexMatrix::zeros(4).expect("dim 4");
            for w in weights {
                let a = haar_pure(rng, 2);
                let b = haar_pure(rng, 2);
                acc = &acc + &product(&a, &b).scale(w / total);
            }
            DensityMatrix::new_unchecked((&acc + &acc.adjoint()).scale(0.5))
        }
    }
}

/// One state of the requested class, deterministic in `seed`.
pub fn sample_state(kind: SampleKind, seed: u64) -> DensityMatrix {
    sample_with(kind, &mut SeedRng::new(seed))
}

/// Qubit state with Bloch vector `r`.
pub fn qubit(r: [f64; 3]) -> Result<DensityMatrix> {
    if norm3(&r) > 1.0 + PARAM_TOL {
        return Err(Error::BlochOutOfRange(format!("|r| = {}", norm3(&r))));
    }
    DensityMatrix::new(qubit_from_bloch(r))
}

/// State description accepted on the command line and in state files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpec {
    Werner {
        v: f64,
    },
    Xstate {
        beta: XStateParams,
    },
    Mems {
        c: f64,
    },
    Bloch {
        m: [f64; 3],
        n: [f64; 3],
        #[serde(rename = "T")]
        t: [[f64; 3]; 3],
    },
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Vec<Vec<f64>>,
    },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Werner { v } => werner(*v),
            StateSpec::Xstate { beta } => x_state(beta),
            StateSpec::Mems { c } => mems(*c),
            StateSpec::Bloch { m, n, t } => DensityMatrix::new(from_bloch(&BlochTwoQubit {
                m: *m,
                n: *n,
                t: *t,
            })?),
            StateSpec::Matrix { re, im } => {
                let im = if im.is_empty() {
                    re.iter().map(|r| vec![0.0; r.len()]).collect()
                } else {
                    im.clone()
                };
                let m = ComplexMatrix::from_re_im(re, &im)?;
                if m.dim() != 4 {
                    return Err(Error::DimensionMismatch {
                        expected: 4,
                        got: m.dim(),
                    });
                }
                DensityMatrix::new(m)
            }
        }
    }
}

/// Partial transpose on the second qubit of a 4×4 matrix.
pub fn partial_transpose_b(m: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(m.dim(), 4, "two-qubit matrix required");
    ComplexMatrix::from_fn(4, |r, s| {
        let (a, b) = (r / 2, r % 2);
        let (a2, b2) = (s / 2, s % 2);
        m[(2 * a + b2, 2 * a2 + b)]
    })
    .expect("dim 4")
}

/// Reduced state of qubit B.
pub fn reduced_b(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new_unchecked(
        linalg::partial_trace(rho, linalg::Keep::B).expect("two-qubit state"),
    )
}
