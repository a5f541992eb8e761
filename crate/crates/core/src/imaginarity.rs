//! Imaginarity and coherence of qubit states relative to a chosen basis.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigenvalues, pauli, psd_sqrt, trace_norm, Axis, ComplexMatrix, C64,
};

const ORTHONORMAL_TOL: f64 = 1e-12;
/// Eigenvalues in `[-ENTROPY_CLAMP, 0)` are treated as zero.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// An orthonormal basis of ℂ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBasis {
    kets: [[C64; 2]; 2],
}

/// Which member of an unbiased triad a closed form refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MubMember {
    B1,
    B2,
    B3,
}

fn inner(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

impl QubitBasis {
    pub fn new(e0: [C64; 2], e1: [C64; 2]) -> Result<Self> {
        let n0 = (inner(&e0, &e0).re - 1.0).abs();
        let n1 = (inner(&e1, &e1).re - 1.0).abs();
        let ov = inner(&e0, &e1).norm();
        if n0 > ORTHONORMAL_TOL || n1 > ORTHONORMAL_TOL || ov > ORTHONORMAL_TOL {
            return Err(Error::InvalidBasis(format!(
                "norm deviations {n0:e}, {n1:e}, overlap {ov:e}"
            )));
        }
        Ok(Self { kets: [e0, e1] })
    }

    /// Computational basis.
    pub fn z() -> Self {
        Self {
            kets: [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        }
    }

    /// `{(|0⟩ ± |1⟩)/√2}`.
    pub fn x() -> Self {
        let s = FRAC_1_SQRT_2;
        Self {
            kets: [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        }
    }

    /// `{(|0⟩ ± i|1⟩)/√2}`.
    pub fn y() -> Self {
        let s = FRAC_1_SQRT_2;
        Self {
            kets: [[c(s, 0.0), c(0.0, s)], [c(s, 0.0), c(0.0, -s)]],
        }
    }

    /// Eigenbasis of the Pauli matrix along `axis`.
    pub fn axis(axis: Axis) -> Self {
        match axis {
            Axis::X => Self::x(),
            Axis::Y => Self::y(),
            Axis::Z => Self::z(),
        }
    }

    /// Member of the unbiased triad built from
    /// `|u⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and
    /// `|d⟩ = sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩`:
    /// B1 = {u, d}, B2 = {(u ± d)/√2}, B3 = {(u ± i d)/√2}.
    pub fn mub(member: MubMember, theta: f64, phi: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, phi);
        let u = [c(co, 0.0), e * s];
        let d = [c(s, 0.0), -e * co];
        let comb = |w: C64| {
            [
                (u[0] + w * d[0]) * FRAC_1_SQRT_2,
                (u[1] + w * d[1]) * FRAC_1_SQRT_2,
            ]
        };
        let kets = match member {
            MubMember::B1 => [u, d],
            MubMember::B2 => [comb(c(1.0, 0.0)), comb(c(-1.0, 0.0))],
            MubMember::B3 => [comb(c(0.0, 1.0)), comb(c(0.0, -1.0))],
        };
        Self { kets }
    }

    pub fn mub_triad(theta: f64, phi: f64) -> [Self; 3] {
        [
            Self::mub(MubMember::B1, theta, phi),
            Self::mub(MubMember::B2, theta, phi),
            Self::mub(MubMember::B3, theta, phi),
        ]
    }

    pub fn kets(&self) -> &[[C64; 2]; 2] {
        &self.kets
    }

    /// Largest `|⟨e|f⟩|` deviation from `1/√2` across the two bases.
    pub fn unbiasedness_defect(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.kets {
            for b in &other.kets {
                worst = worst.max((inner(a, b).norm() - FRAC_1_SQRT_2).abs());
            }
        }
        worst
    }

    /// Unitary whose rows are the basis bras.
    pub fn unitary(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |r, col| self.kets[r][col].conj()).expect("dim 2")
    }

    /// `U m U†`: the matrix written in this basis.
    pub fn rewrite(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = self.unitary();
        u.matmul(m).matmul(&u.adjoint())
    }
}

/// `½‖ρ − ρᵀ‖₁` with the transpose taken in `basis`.
///
/// Accepts any 2×2 Hermitian matrix; on an unnormalized conditional state
/// `σ = p·ρ` it returns `p·𝓘_R(ρ)`.
pub fn robustness_of_imaginarity(rho: &ComplexMatrix, basis: &QubitBasis) -> f64 {
    let r = basis.rewrite(rho);
    0.5 * trace_norm(&(&r - &r.transpose()))
}

/// Closed form of the robustness of imaginarity in an unbiased triad
/// member for Bloch vector `n`. B1 and B2 share the same value.
pub fn robustness_closed_form(n: [f64; 3], member: MubMember, theta: f64, phi: f64) -> f64 {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    match member {
        MubMember::B1 | MubMember::B2 => (n[1] * cp - n[0] * sp).abs(),
        MubMember::B3 => (n[0] * ct * cp + n[1] * ct * sp - n[2] * st).abs(),
    }
}

/// Imaginarity quantifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImaginarityMeasure {
    L1,
    RelEntropy,
}

/// Coherence quantifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceMeasure {
    L1,
    RelEntropy,
    Skew,
}

/// `−Σ λ log₂ λ`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> f64 {
    let ev = hermitian_eigenvalues(rho).expect("density matrix is Hermitian");
    ev.iter()
        .map(|&l| if (-ENTROPY_CLAMP..=0.0).contains(&l) { 0.0 } else { l })
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum()
}

/// Imaginarity of a normalized qubit state in `basis`.
pub fn imaginarity_measure(rho: &ComplexMatrix, basis: &QubitBasis, g: ImaginarityMeasure) -> f64 {
    let r = basis.rewrite(rho);
    match g {
        ImaginarityMeasure::L1 => r[(0, 1)].im.abs() + r[(1, 0)].im.abs(),
        ImaginarityMeasure::RelEntropy => {
            let real_part = (&r + &r.transpose()).scale(0.5);
            (von_neumann_entropy(&real_part) - von_neumann_entropy(&r)).max(0.0)
        }
    }
}

/// Coherence of a normalized qubit state in the eigenbasis of `σ_axis`.
pub fn coherence_measure(rho: &ComplexMatrix, axis: Axis, g: CoherenceMeasure) -> f64 {
    match g {
        CoherenceMeasure::L1 => {
            let r = QubitBasis::axis(axis).rewrite(rho);
            r[(0, 1)].norm() + r[(1, 0)].norm()
        }
        CoherenceMeasure::RelEntropy => {
            let r = QubitBasis::axis(axis).rewrite(rho);
            let diag = ComplexMatrix::from_fn(2, |i, j| if i == j { r[(i, i)] } else { c(0.0, 0.0) })
                .expect("dim 2");
            (von_neumann_entropy(&diag) - von_neumann_entropy(&r)).max(0.0)
        }
        CoherenceMeasure::Skew => {
            let s = psd_sqrt(rho).expect("density matrix is PSD");
            let p = pauli(axis);
            let overlap = s.matmul(&p).matmul(&s).matmul(&p).trace().re;
            (rho.trace().re - overlap).max(0.0)
        }
    }
}

/// Pair of bases summed by [`complementarity_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Complementarity {
    /// x- and y-bases.
    Xy,
    /// Members B2 and B3 of the triad at `(θ, φ)`.
    Mub { theta: f64, phi: f64 },
}

/// Sum of robustness of imaginarity in two bases; never exceeds √2.
pub fn complementarity_sum(rho: &ComplexMatrix, mode: Complementarity) -> f64 {
    let (a, b) = match mode {
        Complementarity::Xy => (QubitBasis::x(), QubitBasis::y()),
        Complementarity::Mub { theta, phi } => (
            QubitBasis::mub(MubMember::B2, theta, phi),
            QubitBasis::mub(MubMember::B3, theta, phi),
        ),
    };
    robustness_of_imaginarity(rho, &a) + robustness_of_imaginarity(rho, &b)
}
