//! Tripartite monogamy of imaginarity steering.
//!
//! For `η₀|000⟩ + η₁e^{iθ}|100⟩ + η₂|101⟩ + η₃|110⟩ + η₄|111⟩`, Alice steers
//! Bob (pair AB) and Charlie (pair AC). Both reduced states and all eight
//! conditional imaginarities have closed forms in `(η, θ)`.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{c, ComplexMatrix, C64};
use crate::rng::SeedRng;
use crate::states::{DensityMatrix, TripartiteParams};
use crate::steering::{Outcome, ZERO_PROBABILITY};

/// Upper bound on `I₂(ρ_AB) + I₂(ρ_AC)`.
pub const MONOGAMY_BOUND: f64 = 2.0 * SQRT_2;
/// Samples per parallel block of [`monogamy_scan`].
pub const BLOCK_SIZE: u64 = 1 << 14;

/// Which pair Alice steers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pair {
    AB,
    AC,
}

/// Alice's measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AliceAxis {
    X,
    Y,
}

fn reduced_from(
    e0: f64,
    e1: C64,
    kept: f64,
    traced: f64,
    e4: f64,
) -> ComplexMatrix {
    // ρ = |a⟩⟨a| + |b⟩⟨b| with a = (η₀, 0, η₁e^{iθ}, kept), b = (0, 0, traced, η₄).
    let mut m = ComplexMatrix::zeros(4).expect("dim 4");
    m[(0, 0)] = c(e0 * e0, 0.0);
    m[(0, 2)] = e1.conj() * e0;
    m[(0, 3)] = c(e0 * kept, 0.0);
    m[(2, 2)] = c(e1.norm_sqr() + traced * traced, 0.0);
    m[(2, 3)] = e1 * kept + traced * e4;
    m[(3, 3)] = c(kept * kept + e4 * e4, 0.0);
    for (i, j) in [(0, 2), (0, 3), (2, 3)] {
        m[(j, i)] = m[(i, j)].conj();
    }
    m
}

/// `(ρ_AB, ρ_AC)` from the explicit entry formulas.
pub fn reduced_pair(p: &TripartiteParams) -> Result<(DensityMatrix, DensityMatrix)> {
    p.check()?;
    let [e0, _, e2, e3, e4] = p.eta;
    let e1 = C64::from_polar(p.eta[1], p.theta);
    let ab = reduced_from(e0, e1, e3, e2, e4);
    let ac = reduced_from(e0, e1, e2, e3, e4);
    Ok((DensityMatrix::new(ab)?, DensityMatrix::new(ac)?))
}

/// `p(a|axis)` for Alice's outcome; identical for both pairs.
pub fn outcome_probability(p: &TripartiteParams, axis: AliceAxis, outcome: Outcome) -> f64 {
    let [e0, e1, ..] = p.eta;
    let trig = match axis {
        AliceAxis::X => p.theta.cos(),
        AliceAxis::Y => p.theta.sin(),
    };
    0.5 + outcome.sign() * e0 * e1 * trig
}

/// `p(a|axis)·𝓘` of the conditional state; Bob reads the y-basis after x
/// and the x-basis after y.
pub fn weighted_conditional_imaginarity(
    p: &TripartiteParams,
    pair: Pair,
    axis: AliceAxis,
    outcome: Outcome,
) -> f64 {
    let [e0, e1, e2, e3, e4] = p.eta;
    let s = outcome.sign();
    let (steered, other) = match pair {
        Pair::AB => (e3, e2),
        Pair::AC => (e2, e3),
    };
    match axis {
        AliceAxis::X => (other * e4 + steered * (e1 * p.theta.cos() + s * e0)).abs(),
        AliceAxis::Y => (steered * (e1 * p.theta.sin() + s * e0)).abs(),
    }
}

/// Imaginarity of the normalized conditional state, or `None` when the
/// outcome has vanishing probability.
pub fn tripartite_conditional_imaginarity(
    p: &TripartiteParams,
    pair: Pair,
    axis: AliceAxis,
    outcome: Outcome,
) -> Option<f64> {
    let prob = outcome_probability(p, axis, outcome);
    (prob > ZERO_PROBABILITY).then(|| weighted_conditional_imaginarity(p, pair, axis, outcome) / prob)
}

/// `I₂` for both pairs and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonogamyValue {
    pub i2_ab: f64,
    pub i2_ac: f64,
    pub sum: f64,
}

fn pair_i2(p: &TripartiteParams, pair: Pair) -> f64 {
    let mut total = 0.0;
    for axis in [AliceAxis::X, AliceAxis::Y] {
        for o in Outcome::BOTH {
            total += weighted_conditional_imaginarity(p, pair, axis, o);
        }
    }
    total
}

pub fn monogamy_sum(p: &TripartiteParams) -> MonogamyValue {
    let i2_ab = pair_i2(p, Pair::AB);
    let i2_ac = pair_i2(p, Pair::AC);
    MonogamyValue {
        i2_ab,
        i2_ac,
        sum: i2_ab + i2_ac,
    }
}

/// `η` as normalized absolute values of a 5-dim Gaussian, `θ` uniform on [0, π].
pub fn sample_params(rng: &mut SeedRng) -> TripartiteParams {
    loop {
        let g: [f64; 5] = std::array::from_fn(|_| rng.normal().abs());
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return TripartiteParams {
                eta: g.map(|x| x / norm),
                theta: PI * rng.uniform(),
            };
        }
    }
}

/// Outcome of [`monogamy_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    pub max_sum: f64,
    pub argmax: TripartiteParams,
    pub argmax_value: MonogamyValue,
    /// Largest single-pair `I₂`.
    pub max_pair: f64,
    /// Points where both pairs exceed √2.
    pub exclusivity_violations: u64,
    pub samples: u64,
}

#[derive(Clone, Copy)]
struct BlockBest {
    value: MonogamyValue,
    params: TripartiteParams,
    max_pair: f64,
    exclusive_violations: u64,
}

fn fold_point(best: &mut Option<BlockBest>, params: TripartiteParams) {
    let value = monogamy_sum(&params);
    let both = value.i2_ab > SQRT_2 && value.i2_ac > SQRT_2;
    let pair_max = value.i2_ab.max(value.i2_ac);
    match best {
        None => {
            *best = Some(BlockBest {
                value,
                params,
                max_pair: pair_max,
                exclusive_violations: both as u64,
            })
        }
        Some(b) => {
            b.max_pair = b.max_pair.max(pair_max);
            b.exclusive_violations += both as u64;
            if value.sum > b.value.sum {
                b.value = value;
                b.params = params;
            }
        }
    }
}

/// Monte-Carlo maximum of the monogamy sum.
///
/// Block `b` draws its samples from stream `b` of `seed`; blocks are reduced
/// in index order, so the result does not depend on the worker count. With
/// `include_maximizer`, the known maximizer is evaluated ahead of the samples.
pub fn monogamy_scan(n_samples: u64, seed: u64, include_maximizer: bool) -> ScanResult {
    assert!(n_samples >= 1, "at least one sample");
    let blocks = n_samples.div_ceil(BLOCK_SIZE);
    let per_block: Vec<BlockBest> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = SeedRng::stream(seed, b);
            let count = BLOCK_SIZE.min(n_samples - b * BLOCK_SIZE);
            let mut best = None;
            for _ in 0..count {
                fold_point(&mut best, sample_params(&mut rng));
            }
            best.expect("non-empty block")
        })
        .collect();

    let mut total = None;
    if include_maximizer {
        fold_point(&mut total, TripartiteParams::monogamy_maximizer());
    }
    for block in per_block {
        match &mut total {
            None => total = Some(block),
            Some(t) => {
                t.max_pair = t.max_pair.max(block.max_pair);
                t.exclusive_violations += block.exclusive_violations;
                if block.value.sum > t.value.sum {
                    t.value = block.value;
                    t.params = block.params;
                }
            }
        }
    }
    let t = total.expect("at least one point");
    ScanResult {
        max_sum: t.value.sum,
        argmax: t.params,
        argmax_value: t.value,
        max_pair: t.max_pair,
        exclusivity_violations: t.exclusive_violations,
        samples: n_samples,
    }
}
