//! Resolve `--state` into a density matrix.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use imsteer_core::states::{mems, region_completion, singlet, werner, x_state};
use imsteer_core::{DensityMatrix, StateSpec};
use serde_json::{json, Value};

use crate::StateArgs;

/// A resolved state and a JSON description of where it came from.
pub struct Resolved {
    pub rho: DensityMatrix,
    pub source: Value,
}

fn required(value: Option<f64>, flag: &str, name: &str) -> Result<f64> {
    value.ok_or_else(|| anyhow!("--state {name} needs {flag}"))
}

pub fn resolve(args: &StateArgs) -> Result<Resolved> {
    let name = args.state.as_str();
    let (rho, source) = match name {
        "werner" => {
            let v = required(args.v, "--v", name)?;
            (werner(v)?, json!({"family": "werner", "v": v}))
        }
        "mems" => {
            let c = required(args.c, "--c", name)?;
            (mems(c)?, json!({"family": "mems", "c": c}))
        }
        "mixed" => (DensityMatrix::maximally_mixed(4)?, json!({"family": "mixed"})),
        "singlet" => (singlet(), json!({"family": "singlet"})),
        "xstate" => {
            let params = region_completion(args.bxx, args.byy)
                .ok_or_else(|| anyhow!("no X-state with beta_xx = {}, beta_yy = {}", args.bxx, args.byy))?;
            (x_state(&params)?, json!({"family": "xstate", "beta": params}))
        }
        path => {
            let spec = read_spec(Path::new(path))?;
            let rho = spec.build().with_context(|| format!("state file {path}"))?;
            (rho, json!({"file": path, "spec": spec}))
        }
    };
    Ok(Resolved { rho, source })
}

fn read_spec(path: &Path) -> Result<StateSpec> {
    if !path.exists() {
        bail!(
            "{:?} is neither a state name (werner, mems, mixed, singlet, xstate) nor an existing file",
            path.display().to_string()
        );
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing state file {}", path.display()))
}
