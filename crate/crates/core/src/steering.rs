//! Conditional states and steering criteria.
//!
//! Alice measures a ±1 observable along a Bloch direction (sharply or with
//! sharpness λ); Bob is left with an unnormalized conditional state per
//! outcome. The two-setting imaginarity functional, the CFFW inequality, and
//! the three-setting coherence (NAQC) and imaginarity (NAQI) criteria are all
//! evaluated from these ensembles.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaginarity::{
    coherence_measure, imaginarity_measure, robustness_of_imaginarity, CoherenceMeasure,
    ImaginarityMeasure, QubitBasis,
};
use crate::linalg::{
    c, identity2, partial_trace, pauli, psd_sqrt, qubit_from_bloch, tensor_product, Axis,
    ComplexMatrix, Keep, C64,
};
use crate::states::{to_bloch, BlochTwoQubit, DensityMatrix};
use crate::{ISI_BOUND, VIOLATION_MARGIN};

/// Branches with probability at or below this are treated as absent.
pub const ZERO_PROBABILITY: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-12;

pub const CFFW_BOUND: f64 = 2.0;

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn bloch_operator(d: &[f64; 3]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2).expect("dim 2");
    for axis in Axis::ALL {
        out = &out + &pauli(axis).scale(d[axis.index()]);
    }
    out
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() == 4 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        })
    }
}

/// Measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// Sharp ±1 measurement along a unit Bloch direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveMeasurement {
    direction: [f64; 3],
}

impl ProjectiveMeasurement {
    pub fn new(direction: [f64; 3]) -> Result<Self> {
        let n = norm3(&direction);
        if (n - 1.0).abs() > UNIT_TOL || !n.is_finite() {
            return Err(Error::NotUnitVector(n));
        }
        Ok(Self { direction })
    }

    pub fn along(axis: Axis) -> Self {
        Self {
            direction: axis.unit(),
        }
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    /// `(I ± d·σ)/2`.
    pub fn projector(&self, outcome: Outcome) -> ComplexMatrix {
        let s = outcome.sign();
        qubit_from_bloch([
            s * self.direction[0],
            s * self.direction[1],
            s * self.direction[2],
        ])
    }

    pub fn observable(&self) -> ComplexMatrix {
        bloch_operator(&self.direction)
    }
}

/// Two-outcome POVM `E± = λΠ± + (1−λ)I/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnsharpMeasurement {
    sharp: ProjectiveMeasurement,
    lambda: f64,
}

impl UnsharpMeasurement {
    pub fn new(direction: [f64; 3], lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            sharp: ProjectiveMeasurement::new(direction)?,
            lambda,
        })
    }

    pub fn along(axis: Axis, lambda: f64) -> Result<Self> {
        Self::new(axis.unit(), lambda)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn direction(&self) -> [f64; 3] {
        self.sharp.direction
    }

    pub fn effect(&self, outcome: Outcome) -> ComplexMatrix {
        let half_noise = identity2().scale((1.0 - self.lambda) / 2.0);
        &self.sharp.projector(outcome).scale(self.lambda) + &half_noise
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
        })
    }
}

/// How Alice's ±1 observables are implemented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MeasurementModel {
    Projective,
    /// Unsharp with sharpness λ ∈ [0, 1].
    Unsharp(f64),
}

/// One outcome of Alice's measurement as seen by Bob.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    /// Unnormalized conditional state `σ = p·ρ`.
    pub sigma: ComplexMatrix,
    /// Normalized conditional state; `None` when `p ≤ 1e-12`.
    pub state: Option<ComplexMatrix>,
}

impl Branch {
    fn from_sigma(outcome: Outcome, sigma: ComplexMatrix) -> Self {
        let sigma = (&sigma + &sigma.adjoint()).scale(0.5);
        let probability = sigma.trace().re;
        let state = (probability > ZERO_PROBABILITY).then(|| sigma.scale(1.0 / probability));
        Self {
            outcome,
            probability,
            sigma,
            state,
        }
    }

    /// `p·f(ρ)`, or 0 for an absent branch.
    pub fn weighted(&self, f: impl Fn(&ComplexMatrix) -> f64) -> f64 {
        match &self.state {
            Some(rho) => self.probability * f(rho),
            None => 0.0,
        }
    }
}

/// Bob's assemblage for one Alice setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalEnsemble {
    pub branches: [Branch; 2],
}

impl ConditionalEnsemble {
    pub fn branch(&self, outcome: Outcome) -> &Branch {
        match outcome {
            Outcome::Plus => &self.branches[0],
            Outcome::Minus => &self.branches[1],
        }
    }

    /// `Σ_a 𝓘_R(σ_a)` in `basis`; equals `Σ_a p(a)𝓘_R(ρ_a)`.
    pub fn robustness(&self, basis: &QubitBasis) -> f64 {
        self.branches
            .iter()
            .map(|b| robustness_of_imaginarity(&b.sigma, basis))
            .sum()
    }

    /// `Tr[O(σ₊ − σ₋)]` for a Bob observable `O`.
    pub fn correlator(&self, bob: &ComplexMatrix) -> f64 {
        let diff = &self.branches[0].sigma - &self.branches[1].sigma;
        bob.trace_product(&diff).re
    }
}

/// `σ_a = Tr_A[(Π_a ⊗ I)ρ]`.
pub fn condition_on(rho: &DensityMatrix, meas: &ProjectiveMeasurement) -> Result<ConditionalEnsemble> {
    require_two_qubit(rho)?;
    let branch = |outcome| -> Result<Branch> {
        let op = tensor_product(&meas.projector(outcome), &identity2())?;
        let sigma = partial_trace(&op.matmul(rho), Keep::B)?;
        Ok(Branch::from_sigma(outcome, sigma))
    };
    Ok(ConditionalEnsemble {
        branches: [branch(Outcome::Plus)?, branch(Outcome::Minus)?],
    })
}

/// `σ_a = Tr_A[(√E_a ⊗ I)ρ(√E_a ⊗ I)]`.
pub fn condition_on_unsharp(
    rho: &DensityMatrix,
    meas: &UnsharpMeasurement,
) -> Result<ConditionalEnsemble> {
    require_two_qubit(rho)?;
    let branch = |outcome| -> Result<Branch> {
        let root = psd_sqrt(&meas.effect(outcome))?;
        let op = tensor_product(&root, &identity2())?;
        let sigma = partial_trace(&op.matmul(rho).matmul(&op), Keep::B)?;
        Ok(Branch::from_sigma(outcome, sigma))
    };
    Ok(ConditionalEnsemble {
        branches: [branch(Outcome::Plus)?, branch(Outcome::Minus)?],
    })
}

/// Condition on a unit `direction` under the given measurement model.
pub fn condition(
    rho: &DensityMatrix,
    direction: [f64; 3],
    model: MeasurementModel,
) -> Result<ConditionalEnsemble> {
    match model {
        MeasurementModel::Projective => condition_on(rho, &ProjectiveMeasurement::new(direction)?),
        MeasurementModel::Unsharp(l) => {
            condition_on_unsharp(rho, &UnsharpMeasurement::new(direction, l)?)
        }
    }
}

/// `I₂` under a measurement model: Alice measures y and x; Bob reads
/// imaginarity in the x-basis after y and in the y-basis after x.
pub fn isi_with(rho: &DensityMatrix, model: MeasurementModel) -> Result<f64> {
    let after_y = condition(rho, Axis::Y.unit(), model)?;
    let after_x = condition(rho, Axis::X.unit(), model)?;
    Ok(after_y.robustness(&QubitBasis::x()) + after_x.robustness(&QubitBasis::y()))
}

/// `I₂` from conditional states with sharp measurements.
pub fn isi_operational(rho: &DensityMatrix) -> Result<f64> {
    isi_with(rho, MeasurementModel::Projective)
}

/// `I₂` from the four Fano parameters `n₁, n₂, t₁₁, t₂₂`.
pub fn isi_closed(p: &BlochTwoQubit) -> f64 {
    let (n1, n2) = (p.n[0], p.n[1]);
    let (t11, t22) = (p.t[0][0], p.t[1][1]);
    0.5 * ((n1 - t11).abs() + (n1 + t11).abs() + (n2 - t22).abs() + (n2 + t22).abs())
}

/// True iff `i2` exceeds √2 by more than the violation margin.
pub fn violates_isi(i2: f64) -> bool {
    i2 > ISI_BOUND + VIOLATION_MARGIN
}

pub fn isi_violated(rho: &DensityMatrix) -> Result<bool> {
    isi_operational(rho).map(violates_isi)
}

/// `I₂` of `rho` when Alice's measurements have sharpness λ.
pub fn isi_unsharp(rho: &DensityMatrix, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    isi_with(rho, MeasurementModel::Unsharp(lambda))
}

/// Value of a criterion together with its local bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionValue {
    pub value: f64,
    pub bound: f64,
}

impl CriterionValue {
    pub fn violated(&self) -> bool {
        self.value > self.bound + VIOLATION_MARGIN
    }
}

/// CFFW value for Alice settings `a1, a2` and orthogonal Bob settings `b1, b2`.
pub fn cffw_with(
    rho: &DensityMatrix,
    a: [[f64; 3]; 2],
    b: [[f64; 3]; 2],
    model: MeasurementModel,
) -> Result<f64> {
    for d in a.iter().chain(&b) {
        ProjectiveMeasurement::new(*d)?;
    }
    let overlap = dot3(&b[0], &b[1]);
    if overlap.abs() > UNIT_TOL {
        return Err(Error::NonOrthogonalAxes(overlap));
    }
    let ens = [condition(rho, a[0], model)?, condition(rho, a[1], model)?];
    let bob = [bloch_operator(&b[0]), bloch_operator(&b[1])];
    let corr = |k: usize, l: usize| ens[k].correlator(&bob[l]);
    let plus = (corr(0, 0) + corr(1, 0)).hypot(corr(0, 1) + corr(1, 1));
    let minus = (corr(0, 0) - corr(1, 0)).hypot(corr(0, 1) - corr(1, 1));
    Ok(plus + minus)
}

pub fn cffw_value(
    rho: &DensityMatrix,
    a1: &ProjectiveMeasurement,
    a2: &ProjectiveMeasurement,
    b1: &ProjectiveMeasurement,
    b2: &ProjectiveMeasurement,
) -> Result<f64> {
    cffw_with(
        rho,
        [a1.direction(), a2.direction()],
        [b1.direction(), b2.direction()],
        MeasurementModel::Projective,
    )
}

/// CFFW with Alice and Bob both measuring x and y.
pub fn cffw_canonical(rho: &DensityMatrix, model: MeasurementModel) -> Result<f64> {
    let xy = [Axis::X.unit(), Axis::Y.unit()];
    cffw_with(rho, xy, xy, model)
}

/// Local bound of the three-setting coherence criterion.
pub fn naqc_bound(g: CoherenceMeasure) -> f64 {
    match g {
        CoherenceMeasure::L1 => 6f64.sqrt(),
        CoherenceMeasure::RelEntropy => 2.23,
        CoherenceMeasure::Skew => 2.0,
    }
}

/// `½ Σ_{i} Σ_{j≠i} Σ_a p(a|j) C_i(ρ_{a|j})` over the axes x, y, z.
pub fn naqc_with(
    rho: &DensityMatrix,
    g: CoherenceMeasure,
    model: MeasurementModel,
) -> Result<CriterionValue> {
    let mut total = 0.0;
    for j in Axis::ALL {
        let ens = condition(rho, j.unit(), model)?;
        for i in Axis::ALL.into_iter().filter(|&i| i != j) {
            for b in &ens.branches {
                total += b.weighted(|s| coherence_measure(s, i, g));
            }
        }
    }
    Ok(CriterionValue {
        value: 0.5 * total,
        bound: naqc_bound(g),
    })
}

pub fn naqc_value(rho: &DensityMatrix, g: CoherenceMeasure) -> Result<CriterionValue> {
    naqc_with(rho, g, MeasurementModel::Projective)
}

/// Local bound of the three-setting imaginarity criterion.
pub fn naqi_bound(g: ImaginarityMeasure) -> f64 {
    match g {
        ImaginarityMeasure::L1 => 5f64.sqrt(),
        ImaginarityMeasure::RelEntropy => 2.02685,
    }
}

/// Bob's unbiased triad paired with Alice's x, y, z settings.
///
/// Member `i` has imaginary axis `i`: its robustness of imaginarity reads
/// `|r_x|`, `|r_y|`, `|r_z|` respectively.
pub fn canonical_bob_triad() -> [QubitBasis; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        QubitBasis::new([one, z], [z, i]).expect("orthonormal"),
        QubitBasis::x(),
        QubitBasis::new([c(s, 0.0), c(0.0, s)], [c(0.0, s), c(s, 0.0)]).expect("orthonormal"),
    ]
}

/// Z-Y-Z Euler angles.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self {
            alpha: a[0],
            beta: a[1],
            gamma: a[2],
        }
    }

    /// `R_z(α) R_y(β) R_z(γ)` as a real rotation matrix.
    pub fn rotation(&self) -> [[f64; 3]; 3] {
        let rz = |t: f64| {
            let (s, c) = t.sin_cos();
            [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
        };
        let ry = |t: f64| {
            let (s, c) = t.sin_cos();
            [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
        };
        let mul = |a: [[f64; 3]; 3], b: [[f64; 3]; 3]| {
            let mut out = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
                }
            }
            out
        };
        mul(mul(rz(self.alpha), ry(self.beta)), rz(self.gamma))
    }

    /// `R_z(α) R_y(β) R_z(γ)` as an SU(2) matrix.
    pub fn unitary(&self) -> [[C64; 2]; 2] {
        let rz = |t: f64| {
            [
                [C64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)],
                [c(0.0, 0.0), C64::from_polar(1.0, t / 2.0)],
            ]
        };
        let ry = |t: f64| {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        };
        let mul = |a: [[C64; 2]; 2], b: [[C64; 2]; 2]| {
            let mut out = [[c(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                }
            }
            out
        };
        mul(mul(rz(self.alpha), ry(self.beta)), rz(self.gamma))
    }
}

/// Alice's orthonormal triad: the columns of the rotation.
pub fn alice_triad(angles: &EulerAngles) -> [[f64; 3]; 3] {
    let r = angles.rotation();
    [
        [r[0][0], r[1][0], r[2][0]],
        [r[0][1], r[1][1], r[2][1]],
        [r[0][2], r[1][2], r[2][2]],
    ]
}

/// Bob's unbiased triad: the canonical triad with every ket rotated by the unitary.
pub fn bob_triad(angles: &EulerAngles) -> [QubitBasis; 3] {
    let u = angles.unitary();
    let apply = |k: &[C64; 2]| [u[0][0] * k[0] + u[0][1] * k[1], u[1][0] * k[0] + u[1][1] * k[1]];
    canonical_bob_triad().map(|b| {
        let [e0, e1] = b.kets();
        QubitBasis::new(apply(e0), apply(e1)).expect("unitary image of a basis")
    })
}

/// Search performed by [`naqi_value`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NaqiSearch {
    /// Alice measures x, y, z; Bob uses [`canonical_bob_triad`].
    Canonical,
    /// Grid plus coordinate-descent search over both triads; the value is a
    /// lower bound on the maximum.
    Refined,
}

/// NAQI value, bound and the triads that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaqiResult {
    pub value: f64,
    pub bound: f64,
    pub search: NaqiSearch,
    pub alice: EulerAngles,
    pub bob: EulerAngles,
}

impl NaqiResult {
    pub fn criterion(&self) -> CriterionValue {
        CriterionValue {
            value: self.value,
            bound: self.bound,
        }
    }
}

fn naqi_term(
    rho: &DensityMatrix,
    alice: &[[f64; 3]; 3],
    bob: &[QubitBasis; 3],
    g: ImaginarityMeasure,
    model: MeasurementModel,
) -> Result<f64> {
    let mut total = 0.0;
    for (dir, basis) in alice.iter().zip(bob) {
        let ens = condition(rho, *dir, model)?;
        total += match g {
            ImaginarityMeasure::L1 => ens
                .branches
                .iter()
                .map(|b| {
                    let r = basis.rewrite(&b.sigma);
                    r[(0, 1)].im.abs() + r[(1, 0)].im.abs()
                })
                .sum::<f64>(),
            ImaginarityMeasure::RelEntropy => ens
                .branches
                .iter()
                .map(|b| b.weighted(|s| imaginarity_measure(s, basis, g)))
                .sum::<f64>(),
        };
    }
    Ok(total)
}

/// `Σ_i Σ_a p(a|i) 𝓘^g_{M_i}(ρ_{a|i})` for explicit triads.
pub fn naqi_for_triads(
    rho: &DensityMatrix,
    g: ImaginarityMeasure,
    alice: &EulerAngles,
    bob: &EulerAngles,
    model: MeasurementModel,
) -> Result<f64> {
    naqi_term(rho, &alice_triad(alice), &bob_triad(bob), g, model)
}

const GRID: usize = 12;
const REFINE_STOP: f64 = 1e-4;

fn grid_angles(idx: usize) -> EulerAngles {
    let (a, rest) = (idx / (GRID * GRID), idx % (GRID * GRID));
    let (b, g) = (rest / GRID, rest % GRID);
    let step = 2.0 * PI / GRID as f64;
    EulerAngles {
        alpha: a as f64 * step,
        beta: b as f64 * PI / (GRID - 1) as f64,
        gamma: g as f64 * step,
    }
}

/// Largest value; the lowest index wins ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    best
}

fn naqi_refined(
    rho: &DensityMatrix,
    g: ImaginarityMeasure,
    model: MeasurementModel,
) -> Result<(f64, EulerAngles, EulerAngles)> {
    let eval = |a: &EulerAngles, b: &EulerAngles| naqi_for_triads(rho, g, a, b, model);
    let canonical = EulerAngles::default();
    let n = GRID * GRID * GRID;

    let alice_vals = (0..n)
        .into_par_iter()
        .map(|k| eval(&grid_angles(k), &canonical))
        .collect::<Result<Vec<f64>>>()?;
    let alice = grid_angles(argmax(&alice_vals));

    let bob_vals = (0..n)
        .into_par_iter()
        .map(|k| eval(&alice, &grid_angles(k)))
        .collect::<Result<Vec<f64>>>()?;
    let bob = grid_angles(argmax(&bob_vals));

    let mut x = [alice.as_array(), bob.as_array()].concat();
    let split = |x: &[f64]| {
        (
            EulerAngles::from_array([x[0], x[1], x[2]]),
            EulerAngles::from_array([x[3], x[4], x[5]]),
        )
    };
    let mut best = {
        let (a, b) = split(&x);
        eval(&a, &b)?
    };
    let coarse = [2.0 * PI / GRID as f64, PI / (GRID - 1) as f64, 2.0 * PI / GRID as f64];
    let mut steps: Vec<f64> = coarse.iter().chain(&coarse).copied().collect();
    while steps[0] >= REFINE_STOP {
        let mut improved = false;
        for k in 0..6 {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += dir * steps[k];
                let (a, b) = split(&y);
                let v = eval(&a, &b)?;
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in &mut steps {
                *s *= 0.5;
            }
        }
    }
    let (a, b) = split(&x);
    Ok((best, a, b))
}

pub fn naqi_with(
    rho: &DensityMatrix,
    g: ImaginarityMeasure,
    search: NaqiSearch,
    model: MeasurementModel,
) -> Result<NaqiResult> {
    require_two_qubit(rho)?;
    let (value, alice, bob) = match search {
        NaqiSearch::Canonical => {
            let id = EulerAngles::default();
            (naqi_for_triads(rho, g, &id, &id, model)?, id, id)
        }
        NaqiSearch::Refined => naqi_refined(rho, g, model)?,
    };
    Ok(NaqiResult {
        value,
        bound: naqi_bound(g),
        search,
        alice,
        bob,
    })
}

pub fn naqi_value(rho: &DensityMatrix, g: ImaginarityMeasure, search: NaqiSearch) -> Result<NaqiResult> {
    naqi_with(rho, g, search, MeasurementModel::Projective)
}

/// Criterion selector for threshold scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Criterion {
    Isi,
    Cffw,
    Naqc(CoherenceMeasure),
    Naqi(ImaginarityMeasure, NaqiSearch),
}

impl Criterion {
    pub fn label(&self) -> String {
        let g = |s: &str| s.to_string();
        match self {
            Criterion::Isi => g("isi"),
            Criterion::Cffw => g("cffw"),
            Criterion::Naqc(m) => format!("naqc_{}", coherence_label(*m)),
            Criterion::Naqi(m, NaqiSearch::Canonical) => format!("naqi_{}", imaginarity_label(*m)),
            Criterion::Naqi(m, NaqiSearch::Refined) => {
                format!("naqi_{}_refined", imaginarity_label(*m))
            }
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix, model: MeasurementModel) -> Result<CriterionValue> {
        match *self {
            Criterion::Isi => Ok(CriterionValue {
                value: isi_with(rho, model)?,
                bound: ISI_BOUND,
            }),
            Criterion::Cffw => Ok(CriterionValue {
                value: cffw_canonical(rho, model)?,
                bound: CFFW_BOUND,
            }),
            Criterion::Naqc(g) => naqc_with(rho, g, model),
            Criterion::Naqi(g, s) => naqi_with(rho, g, s, model).map(|r| r.criterion()),
        }
    }
}

pub fn coherence_label(g: CoherenceMeasure) -> &'static str {
    match g {
        CoherenceMeasure::L1 => "l1",
        CoherenceMeasure::RelEntropy => "rel_entropy",
        CoherenceMeasure::Skew => "skew",
    }
}

pub fn imaginarity_label(g: ImaginarityMeasure) -> &'static str {
    match g {
        ImaginarityMeasure::L1 => "l1",
        ImaginarityMeasure::RelEntropy => "rel_entropy",
    }
}

const PRESCAN_POINTS: usize = 21;
const BISECTION_WIDTH: f64 = 1e-9;

/// Root of `margin(x) = value − bound` on [0, 1] by bisection.
///
/// A 21-point pre-scan must show exactly one sign change.
pub fn threshold_scan(margin: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let positive = |x: f64| margin(x).map(|m| m > 0.0);
    let signs = (0..PRESCAN_POINTS)
        .map(|k| positive(k as f64 / (PRESCAN_POINTS - 1) as f64))
        .collect::<Result<Vec<bool>>>()?;
    let changes: Vec<usize> = (1..PRESCAN_POINTS).filter(|&k| signs[k] != signs[k - 1]).collect();
    match changes.len() {
        0 => return Err(Error::NoThreshold),
        1 => {}
        n => return Err(Error::NotMonotone(n)),
    }
    let k = changes[0];
    let step = 1.0 / (PRESCAN_POINTS - 1) as f64;
    let (mut lo, mut hi) = ((k - 1) as f64 * step, k as f64 * step);
    let lo_sign = signs[k - 1];
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Critical visibility of a criterion on the Werner family.
pub fn werner_threshold(criterion: Criterion) -> Result<f64> {
    threshold_scan(|v| {
        let r = criterion.evaluate(&crate::states::werner(v)?, MeasurementModel::Projective)?;
        Ok(r.value - r.bound - VIOLATION_MARGIN)
    })
}

/// Critical sharpness of a criterion for the singlet under unsharp measurements.
pub fn unsharp_singlet_threshold(criterion: Criterion) -> Result<f64> {
    let singlet = crate::states::singlet();
    threshold_scan(|l| {
        let r = criterion.evaluate(&singlet, MeasurementModel::Unsharp(l))?;
        Ok(r.value - r.bound - VIOLATION_MARGIN)
    })
}

/// `I₂` of a state given as Fano parameters, via the closed form.
pub fn isi_closed_of(rho: &DensityMatrix) -> Result<f64> {
    Ok(isi_closed(&to_bloch(rho)?))
}

/// Exact Werner thresholds where closed forms exist.
pub fn werner_isi_threshold_exact() -> f64 {
    1.0 / SQRT_2
}
