//! The sixteen witness operators `W̃ᵏᵢⱼ = √2·I − Wᵏᵢⱼ` and their local
//! projector decompositions.
//!
//! `Wᵏᵢⱼ = (−1)ⁱ A + (−1)ʲ B` where A is `1⊗σx` (k = 1, 2) or `σx⊗σx`
//! (k = 3, 4), and B is `1⊗σy` (k = 1, 3) or `σy⊗σy` (k = 2, 4).

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, identity2, pauli, tensor_product, Axis, ComplexMatrix, C64};
use crate::states::BlochTwoQubit;

const RESIDUE_TOL: f64 = 1e-10;

/// Witness operator with family `k ∈ 1..=4` and sign bits `i, j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOperator {
    pub k: u8,
    pub i: u8,
    pub j: u8,
    pub matrix: ComplexMatrix,
}

fn sign(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

fn x_slot_is_local(k: u8) -> bool {
    k <= 2
}

fn y_slot_is_local(k: u8) -> bool {
    k % 2 == 1
}

pub fn build_witness(k: u8, i: u8, j: u8) -> Result<WitnessOperator> {
    if !(1..=4).contains(&k) || i > 1 || j > 1 {
        return Err(Error::InvalidWitnessIndex { k, i, j });
    }
    let slot = |axis: Axis, local: bool| {
        let alice = if local { identity2() } else { pauli(axis) };
        tensor_product(&alice, &pauli(axis)).expect("2x2 ⊗ 2x2")
    };
    let w = &slot(Axis::X, x_slot_is_local(k)).scale(sign(i))
        + &slot(Axis::Y, y_slot_is_local(k)).scale(sign(j));
    let matrix = &ComplexMatrix::identity(4)?.scale(SQRT_2) - &w;
    Ok(WitnessOperator { k, i, j, matrix })
}

/// All sixteen witnesses in lexicographic `(k, i, j)` order.
pub fn all_witnesses() -> Vec<WitnessOperator> {
    let mut out = Vec::with_capacity(16);
    for k in 1..=4 {
        for i in 0..=1 {
            for j in 0..=1 {
                out.push(build_witness(k, i, j).expect("valid index"));
            }
        }
    }
    out
}

/// Local projector label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projector {
    ZeroX,
    OneX,
    ZeroY,
    OneY,
}

impl Projector {
    pub fn label(self) -> &'static str {
        match self {
            Projector::ZeroX => "0x",
            Projector::OneX => "1x",
            Projector::ZeroY => "0y",
            Projector::OneY => "1y",
        }
    }

    /// `|0x⟩ = (|0⟩+|1⟩)/√2`, `|1x⟩ = (|0⟩−|1⟩)/√2`,
    /// `|0y⟩ = (|0⟩+i|1⟩)/√2`, `|1y⟩ = (|0⟩−i|1⟩)/√2`.
    pub fn ket(self) -> [C64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            Projector::ZeroX => [c(s, 0.0), c(s, 0.0)],
            Projector::OneX => [c(s, 0.0), c(-s, 0.0)],
            Projector::ZeroY => [c(s, 0.0), c(0.0, s)],
            Projector::OneY => [c(s, 0.0), c(0.0, -s)],
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.ket()).expect("dim 2")
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Projector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// One weighted product term `ν · P_A ⊗ P_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectorTerm {
    pub coefficient: f64,
    pub alice: Projector,
    pub bob: Projector,
}

impl WitnessOperator {
    /// `ν₁ = √2 − (−1)ⁱ`, `ν₂ = √2 + (−1)ⁱ`, `ν₃ = −(−1)ʲ`, `ν₄ = (−1)ʲ`.
    pub fn nu(&self) -> [f64; 4] {
        let (si, sj) = (sign(self.i), sign(self.j));
        [SQRT_2 - si, SQRT_2 + si, -sj, sj]
    }

    /// Unit-trace form `W̃ / (4√2)`.
    pub fn normalized(&self) -> ComplexMatrix {
        self.matrix.scale(1.0 / (4.0 * SQRT_2))
    }

    /// Eight local product projectors whose weighted sum is the witness.
    pub fn projector_decomposition(&self) -> Vec<ProjectorTerm> {
        use Projector::*;
        let [n1, n2, n3, n4] = self.nu();
        let x_pairs: [(f64, [(Projector, Projector); 2]); 2] = if x_slot_is_local(self.k) {
            [
                (n1, [(ZeroX, ZeroX), (OneX, ZeroX)]),
                (n2, [(ZeroX, OneX), (OneX, OneX)]),
            ]
        } else {
            [
                (n1, [(ZeroX, ZeroX), (OneX, OneX)]),
                (n2, [(OneX, ZeroX), (ZeroX, OneX)]),
            ]
        };
        let y_pairs: [(f64, [(Projector, Projector); 2]); 2] = if y_slot_is_local(self.k) {
            [
                (n3, [(ZeroY, ZeroY), (OneY, ZeroY)]),
                (n4, [(ZeroY, OneY), (OneY, OneY)]),
            ]
        } else {
            [
                (n3, [(ZeroY, ZeroY), (OneY, OneY)]),
                (n4, [(OneY, ZeroY), (ZeroY, OneY)]),
            ]
        };
        x_pairs
            .iter()
            .chain(&y_pairs)
            .flat_map(|(nu, pairs)| {
                pairs.iter().map(move |&(alice, bob)| ProjectorTerm {
                    coefficient: *nu,
                    alice,
                    bob,
                })
            })
            .collect()
    }

    /// `Tr[W̃ρ]` from Fano parameters.
    pub fn expectation_bloch(&self, p: &BlochTwoQubit) -> f64 {
        let a = if x_slot_is_local(self.k) { p.n[0] } else { p.t[0][0] };
        let b = if y_slot_is_local(self.k) { p.n[1] } else { p.t[1][1] };
        SQRT_2 - sign(self.i) * a - sign(self.j) * b
    }
}

/// Weighted sum of the decomposition terms.
pub fn reconstruct(terms: &[ProjectorTerm]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(4).expect("dim 4");
    for t in terms {
        let p = tensor_product(&t.alice.matrix(), &t.bob.matrix()).expect("2x2 ⊗ 2x2");
        acc = &acc + &p.scale(t.coefficient);
    }
    acc
}

/// `Tr[W̃ρ]`; a non-negligible imaginary part signals a non-Hermitian input.
pub fn witness_expectation(w: &WitnessOperator, rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let z = w.matrix.trace_product(rho);
    if z.im.abs() >= RESIDUE_TOL {
        return Err(Error::ImaginaryResidue(z.im.abs()));
    }
    Ok(z.re)
}

/// The witness with smallest expectation and that expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub witness: WitnessOperator,
    pub expectation: f64,
}

fn first_minimum(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, v) in values.enumerate() {
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// Minimize the expectation over all sixteen witnesses; ties go to the
/// lowest `(k, i, j)`.
pub fn select_witness(rho: &ComplexMatrix) -> Result<Selection> {
    let all = all_witnesses();
    let values = all
        .iter()
        .map(|w| witness_expectation(w, rho))
        .collect::<Result<Vec<f64>>>()?;
    let (idx, expectation) = first_minimum(values.into_iter());
    Ok(Selection {
        witness: all[idx].clone(),
        expectation,
    })
}

/// [`select_witness`] on Fano parameters.
pub fn select_witness_bloch(p: &BlochTwoQubit) -> Selection {
    let all = all_witnesses();
    let (idx, expectation) = first_minimum(all.iter().map(|w| w.expectation_bloch(p)));
    Selection {
        witness: all[idx].clone(),
        expectation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;
    use crate::states::{mems, sample_state, to_bloch, werner, DensityMatrix, SampleKind};
    use crate::steering::{isi_operational, violates_isi};

    fn pauli4(a: Option<Axis>, b: Axis) -> ComplexMatrix {
        let left = a.map_or_else(identity2, pauli);
        tensor_product(&left, &pauli(b)).unwrap()
    }

    #[test]
    fn explicit_members() {
        let id = ComplexMatrix::identity(4).unwrap().scale(SQRT_2);
        let xx = pauli4(Some(Axis::X), Axis::X);
        let yy = pauli4(Some(Axis::Y), Axis::Y);
        let ix = pauli4(None, Axis::X);
        let iy = pauli4(None, Axis::Y);
        let w = build_witness(4, 1, 1).unwrap();
        assert!(w.matrix.max_abs_diff(&(&(&id + &xx) + &yy)) < 1e-15);
        let w = build_witness(4, 0, 1).unwrap();
        assert!(w.matrix.max_abs_diff(&(&(&id - &xx) + &yy)) < 1e-15);
        let w = build_witness(1, 0, 0).unwrap();
        assert!(w.matrix.max_abs_diff(&(&(&id - &ix) - &iy)) < 1e-15);
        let w = build_witness(2, 1, 0).unwrap();
        assert!(w.matrix.max_abs_diff(&(&(&id + &ix) - &yy)) < 1e-15);
        let w = build_witness(3, 0, 1).unwrap();
        assert!(w.matrix.max_abs_diff(&(&(&id - &xx) + &iy)) < 1e-15);
    }

    #[test]
    fn invalid_indices() {
        for (k, i, j) in [(0, 0, 0), (5, 0, 0), (1, 2, 0), (1, 0, 2)] {
            assert!(matches!(
                build_witness(k, i, j),
                Err(Error::InvalidWitnessIndex { .. })
            ));
        }
    }

    #[test]
    fn structural_invariants() {
        for w in all_witnesses() {
            assert!(w.matrix.is_hermitian(1e-12));
            assert!((w.matrix.trace().re - 4.0 * SQRT_2).abs() < 1e-12);
            assert!((w.normalized().trace().re - 1.0).abs() < 1e-12);
            let ev = hermitian_eigenvalues(&w.matrix).unwrap();
            assert!(ev[0] >= SQRT_2 - 2.0 - 1e-12 && ev[3] <= SQRT_2 + 2.0 + 1e-12);
        }
    }

    #[test]
    fn decompositions_reconstruct() {
        for w in all_witnesses() {
            let terms = w.projector_decomposition();
            assert_eq!(terms.len(), 8);
            assert!(terms.iter().all(|t| t.coefficient.abs() > 1e-12));
            let err = reconstruct(&terms).max_abs_diff(&w.matrix);
            assert!(err < 1e-12, "({}, {}, {}): {err}", w.k, w.i, w.j);
        }
    }

    #[test]
    fn nu_for_werner_witness() {
        let nu = build_witness(4, 1, 1).unwrap().nu();
        let expect = [SQRT_2 + 1.0, SQRT_2 - 1.0, 1.0, -1.0];
        for (a, b) in nu.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let terms = build_witness(4, 1, 1).unwrap().projector_decomposition();
        let labels: Vec<String> = terms
            .iter()
            .map(|t| format!("{}{}", t.alice, t.bob))
            .collect();
        assert_eq!(labels, ["0x0x", "1x1x", "1x0x", "0x1x", "0y0y", "1y1y", "1y0y", "0y1y"]);
        let terms = build_witness(1, 0, 0).unwrap().projector_decomposition();
        let labels: Vec<String> = terms
            .iter()
            .map(|t| format!("{}{}", t.alice, t.bob))
            .collect();
        assert_eq!(labels, ["0x0x", "1x0x", "0x1x", "1x1x", "0y0y", "1y0y", "0y1y", "1y1y"]);
    }

    #[test]
    fn werner_expectations() {
        let w = build_witness(4, 1, 1).unwrap();
        let e = witness_expectation(&w, &werner(0.8).unwrap()).unwrap();
        assert!((e - (SQRT_2 - 1.6)).abs() < 1e-12);
        assert!((e + 0.185_786_438).abs() < 1e-9);
        let e = witness_expectation(&w, &werner(0.5).unwrap()).unwrap();
        assert!((e - (SQRT_2 - 1.0)).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        for w in all_witnesses() {
            assert!((witness_expectation(&w, &mixed).unwrap() - SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn non_hermitian_input_flagged() {
        let mut m = ComplexMatrix::zeros(4).unwrap();
        m[(0, 0)] = c(0.0, 1.0);
        let err = witness_expectation(&build_witness(1, 0, 0).unwrap(), &m).unwrap_err();
        assert!(matches!(err, Error::ImaginaryResidue(_)));
    }

    #[test]
    fn selection_examples() {
        for v in [0.3, 0.8, 1.0] {
            let s = select_witness(&werner(v).unwrap()).unwrap();
            assert_eq!((s.witness.k, s.witness.i, s.witness.j), (4, 1, 1));
            assert!((s.expectation - (SQRT_2 - 2.0 * v)).abs() < 1e-12);
        }
        let s = select_witness(&mems(0.9).unwrap()).unwrap();
        assert_eq!((s.witness.k, s.witness.i, s.witness.j), (4, 0, 1));
        assert!((s.expectation - (SQRT_2 - 1.8)).abs() < 1e-12);
        let s = select_witness(&DensityMatrix::maximally_mixed(4).unwrap()).unwrap();
        assert_eq!((s.witness.k, s.witness.i, s.witness.j), (1, 0, 0));
        assert!((s.expectation - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn duality_and_routes_agree() {
        for seed in 0..2000 {
            let rho = sample_state(SampleKind::Mixed4, seed);
            let i2 = isi_operational(&rho).unwrap();
            let s = select_witness(&rho).unwrap();
            assert!((s.expectation - (SQRT_2 - i2)).abs() < 1e-9);
            let sb = select_witness_bloch(&to_bloch(&rho).unwrap());
            assert!((sb.expectation - s.expectation).abs() < 1e-12);
            assert_eq!(s.expectation < 0.0, violates_isi(i2));
        }
    }

    #[test]
    fn separable_states_never_negative() {
        for seed in 0..2000 {
            let rho = sample_state(SampleKind::Separable4, seed);
            for w in all_witnesses() {
                assert!(witness_expectation(&w, &rho).unwrap() >= -1e-9);
            }
        }
    }
}
