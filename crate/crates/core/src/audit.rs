//! Seeded invariant sweeps over random states.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaginarity::{complementarity_sum, Complementarity};
use crate::rng::SeedRng;
use crate::states::{sample_with, to_bloch, SampleKind};
use crate::steering::{isi_closed, isi_operational};
use crate::witness::select_witness;
use crate::ISI_BOUND;

/// Tolerance used by every suite.
pub const AUDIT_TOL: f64 = 1e-9;
const AUDIT_BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Largest `I₂` over separable states, against √2.
    Separable,
    /// Largest `I₂(αρ₁ + (1−α)ρ₂) − αI₂(ρ₁) − (1−α)I₂(ρ₂)`, against 0.
    Convexity,
    /// Largest `|min Tr[W̃ρ] − (√2 − I₂)|`, against 0.
    Duality,
    /// Largest single-qubit two-basis robustness sum, against √2.
    Complementarity,
    /// Largest `|I₂ − I₂^closed|`, against 0.
    ClosedForm,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Separable,
        Suite::Convexity,
        Suite::Duality,
        Suite::Complementarity,
        Suite::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Separable => "separable",
            Suite::Convexity => "convexity",
            Suite::Duality => "duality",
            Suite::Complementarity => "complementarity",
            Suite::ClosedForm => "closed_form",
        }
    }

    pub fn default_samples(self) -> u64 {
        match self {
            Suite::Separable | Suite::Complementarity => 100_000,
            Suite::Convexity | Suite::Duality | Suite::ClosedForm => 10_000,
        }
    }

    /// Value the worst case is compared against.
    pub fn limit(self) -> f64 {
        match self {
            Suite::Separable | Suite::Complementarity => ISI_BOUND + AUDIT_TOL,
            Suite::Convexity | Suite::Duality | Suite::ClosedForm => AUDIT_TOL,
        }
    }

    fn sample(self, rng: &mut SeedRng) -> Result<f64> {
        match self {
            Suite::Separable => isi_operational(&sample_with(SampleKind::Separable4, rng)),
            Suite::Convexity => {
                let kind = |rng: &mut SeedRng| {
                    if rng.uniform() < 0.5 {
                        SampleKind::Pure4
                    } else {
                        SampleKind::Mixed4
                    }
                };
                let k1 = kind(rng);
                let r1 = sample_with(k1, rng);
                let k2 = kind(rng);
                let r2 = sample_with(k2, rng);
                let alpha = rng.uniform();
                let mixed = r1.mix(&r2, alpha)?;
                Ok(isi_operational(&mixed)?
                    - alpha * isi_operational(&r1)?
                    - (1.0 - alpha) * isi_operational(&r2)?)
            }
            Suite::Duality => {
                let rho = sample_with(SampleKind::Mixed4, rng);
                let sel = select_witness(&rho)?;
                Ok((sel.expectation - (ISI_BOUND - isi_operational(&rho)?)).abs())
            }
            Suite::Complementarity => {
                let rho = sample_with(SampleKind::Qubit, rng);
                let theta = PI * rng.uniform();
                let phi = 2.0 * PI * rng.uniform();
                Ok(complementarity_sum(&rho, Complementarity::Xy)
                    .max(complementarity_sum(&rho, Complementarity::Mub { theta, phi })))
            }
            Suite::ClosedForm => {
                let rho = sample_with(SampleKind::Mixed4, rng);
                Ok((isi_operational(&rho)? - isi_closed(&to_bloch(&rho)?)).abs())
            }
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s || (s == "closed-form" && *suite == Suite::ClosedForm))
            .ok_or_else(|| Error::InvalidState(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub samples: u64,
    pub seed: u64,
    /// Largest value of the suite's statistic.
    pub worst: f64,
    pub limit: f64,
    pub passed: bool,
}

/// Run `suite` on `n` samples. Block `b` uses stream `b` of `seed`.
pub fn run_suite(suite: Suite, n: u64, seed: u64) -> Result<SuiteReport> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: 0.0,
        });
    }
    let blocks = n.div_ceil(AUDIT_BLOCK);
    let per_block: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = SeedRng::stream(seed, b);
            let count = AUDIT_BLOCK.min(n - b * AUDIT_BLOCK);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..count {
                let v = suite.sample(&mut rng)?;
                // NaN must not hide behind max().
                worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let worst = per_block.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let limit = suite.limit();
    Ok(SuiteReport {
        suite,
        samples: n,
        seed,
        worst,
        limit,
        passed: worst <= limit,
    })
}
