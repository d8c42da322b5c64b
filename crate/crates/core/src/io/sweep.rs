//! Parameter sweeps: run a spec at each value of a grid and find the
//! largest value reached before the first failure.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::warp::Outcome;

use super::spec::DeformationSpec;

/// Inclusive grid `start, start + step, ...` up to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    /// Digits after the decimal point used when printing values.
    pub decimals: usize,
}

impl ParamGrid {
    /// Parses `a:b:step`.
    pub fn parse(s: &str) -> Result<ParamGrid> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::InvalidSpec(format!("parameter grid must be a:b:step, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut v = [0.0f64; 3];
        for (x, p) in v.iter_mut().zip(&parts) {
            *x = p.parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(bad());
            }
        }
        let [start, end, step] = v;
        if !(step > 0.0) || end < start {
            return Err(Error::InvalidSpec(format!(
                "parameter grid needs step > 0 and b >= a, got {s:?}"
            )));
        }
        let decimals = parts
            .iter()
            .map(|p| p.split_once('.').map_or(0, |(_, f)| f.len()))
            .max()
            .unwrap_or(0);
        Ok(ParamGrid {
            start,
            end,
            step,
            decimals,
        })
    }

    /// Grid values, computed as `start + k · step` to avoid drift.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub outcome: Outcome,
    /// Reversed elements in the result, or in the last rejected trial when
    /// a small-step run stops early on a valid mesh.
    pub reversals: usize,
    pub n_factorizations: usize,
}

/// Runs `spec` once per grid value. The swept value replaces the spec's
/// own (`theta_outer` for annulus motions, `alpha` otherwise).
pub fn run_sweep(mesh: &Mesh, spec: &DeformationSpec, values: &[f64]) -> Result<Vec<SweepRow>> {
    let name = spec
        .sweep_parameter()
        .ok_or_else(|| Error::InvalidSpec("only annulus, shear and paper3d motions can be swept".into()))?;
    values
        .iter()
        .map(|&v| {
            let out = spec.with_parameter(v)?.run(mesh)?;
            let r = &out.report;
            let reversals = match (r.quality.reversals, r.steps.last()) {
                (0, Some(last)) if !r.is_success() => last.reversals,
                (n, _) => n,
            };
            log::info!("{name} = {v}: {}", r.outcome);
            Ok(SweepRow {
                param: v,
                outcome: r.outcome,
                reversals,
                n_factorizations: r.n_factorizations,
            })
        })
        .collect()
}

/// Last successful row before the first failure.
pub fn param_max(rows: &[SweepRow]) -> Option<&SweepRow> {
    rows.iter().take_while(|r| r.outcome == Outcome::Success).last()
}

/// CSV with header `param,outcome,reversals,n_factorizations`.
pub fn to_csv(rows: &[SweepRow], decimals: usize) -> String {
    let mut s = String::from("param,outcome,reversals,n_factorizations\n");
    for r in rows {
        writeln!(
            s,
            "{:.*},{},{},{}",
            decimals, r.param, r.outcome, r.reversals, r.n_factorizations
        )
        .expect("writing to a String");
    }
    s
}
