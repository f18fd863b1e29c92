//! `sweep`: bound checks over a parameter grid.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use cocycle_lab::bounds::BoundReport;
use cocycle_lab::cocycle::ModelParams;
use cocycle_lab::engine::{le_estimate, le_profile, spectrum_membership, LeEstimate, ProfileConfig, Sampling};
use cocycle_lab::LabError;

use crate::output::{write_all_atomic, Table};
use crate::plan::{Cell, SweepPlan, WARN_ORBIT};
use crate::Failure;

pub struct CellResult {
    pub cell: Cell,
    pub estimate: LeEstimate<f64>,
    pub bounds: BoundReport<f64>,
    /// `(regime, membership)` when profiles were requested.
    pub profile: Option<(String, String)>,
}

#[derive(Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundTally {
    pub applicable: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_margin: Option<f64>,
    /// `(a1, a2, E, eps)` of the worst cell.
    pub worst_cell: Option<[f64; 4]>,
}

impl BoundTally {
    fn add(&mut self, cell: &Cell, margin: Option<f64>, slack: f64) {
        let Some(m) = margin else { return };
        self.applicable += 1;
        if m + slack >= 0.0 {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        if self.worst_margin.map_or(true, |w| m < w) {
            self.worst_margin = Some(m);
            self.worst_cell = Some([cell.a1, cell.a2, cell.energy, cell.eps]);
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub cells: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub phases: usize,
    pub alpha: f64,
    pub seed: u64,
    pub herman: BoundTally,
    pub theorem: BoundTally,
    /// Cells whose every applicable bound held within slack.
    pub satisfied: usize,
    pub regimes: BTreeMap<String, usize>,
    pub membership: BTreeMap<String, usize>,
}

pub fn run_plan(plan: &SweepPlan) -> Result<Vec<CellResult>, LabError> {
    let sampling = Sampling::new(plan.n, plan.phases).offset(plan.phase_offset);
    plan.cells()
        .into_par_iter()
        .map(|cell| {
            let p = ModelParams::new(cell.a1, cell.a2, cell.energy, plan.alpha)?;
            let estimate = le_estimate(&p, cell.eps, &sampling);
            // bounds concern ε = 0; other shifts are reported without a verdict
            let bounds = BoundReport::new(&p, (cell.eps == 0.0).then_some(&estimate), &plan.tolerances);
            let profile = if plan.profile {
                let cfg = ProfileConfig::new(ProfileConfig::default_eps_max(&p), 24, sampling).tolerances(plan.tolerances);
                let prof = le_profile(&p, &cfg)?;
                Some((prof.regime.to_string(), spectrum_membership(&prof).to_string()))
            } else {
                None
            };
            Ok(CellResult {
                cell,
                estimate,
                bounds,
                profile,
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn cells_table(results: &[CellResult]) -> Table {
    let mut t = Table::new(&[
        "a1",
        "a2",
        "E",
        "eps",
        "le",
        "stdError",
        "hermanBound",
        "theoremBound",
        "epsilon0",
        "chosenDelta",
        "hermanMargin",
        "theoremMargin",
        "satisfied",
        "regime",
        "membership",
    ]);
    for r in results {
        let b = &r.bounds;
        let (regime, membership) = r.profile.clone().unwrap_or_default();
        t.row(vec![
            r.cell.a1.to_string(),
            r.cell.a2.to_string(),
            r.cell.energy.to_string(),
            r.cell.eps.to_string(),
            r.estimate.value.to_string(),
            r.estimate.std_error.to_string(),
            opt(b.herman_bound),
            opt(b.theorem_bound),
            opt(b.epsilon0),
            opt(b.chosen_delta),
            opt(b.margins.herman),
            opt(b.margins.theorem),
            b.satisfied.map(|s| s.to_string()).unwrap_or_default(),
            regime,
            membership,
        ]);
    }
    t
}

pub fn summarize(plan: &SweepPlan, results: &[CellResult]) -> Summary {
    let mut s = Summary {
        cells: results.len(),
        n: plan.n,
        phases: plan.phases,
        alpha: plan.alpha,
        seed: plan.seed,
        herman: BoundTally::default(),
        theorem: BoundTally::default(),
        satisfied: 0,
        regimes: BTreeMap::new(),
        membership: BTreeMap::new(),
    };
    let tol = &plan.tolerances;
    for r in results {
        let slack = tol.sigma * r.estimate.std_error + tol.bound_slack;
        s.herman.add(&r.cell, r.bounds.margins.herman, slack);
        s.theorem.add(&r.cell, r.bounds.margins.theorem, slack);
        if r.bounds.satisfied == Some(true) {
            s.satisfied += 1;
        }
        if let Some((regime, membership)) = &r.profile {
            *s.regimes.entry(regime.clone()).or_default() += 1;
            *s.membership.entry(membership.clone()).or_default() += 1;
        }
    }
    s
}

pub fn cmd_sweep(config: &Path, out: &Path, overrides: &[String]) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", config.display())))?;
    let mut plan = SweepPlan::parse(&text).map_err(|e| Failure::usage(e.to_string()))?;
    for kv in overrides {
        plan.tolerances.apply(kv)?;
    }
    crate::check_alpha(plan.alpha);
    if plan.n < WARN_ORBIT {
        eprintln!("warning: n = {} is below {WARN_ORBIT}; finite-n bias may dominate", plan.n);
    }
    if !out.is_dir() {
        std::fs::create_dir_all(out)
            .map_err(|e| Failure::usage(format!("cannot create {}: {e}", out.display())))?;
    }
    let started = Instant::now();
    let results = run_plan(&plan)?;
    let summary = summarize(&plan, &results);
    let csv = cells_table(&results).render();
    let json = serde_json::to_string_pretty(&summary).expect("serializable") + "\n";
    let cells_path = out.join("cells.csv");
    let summary_path = out.join("summary.json");
    write_all_atomic(&[(&cells_path, csv.as_bytes()), (&summary_path, json.as_bytes())])?;
    eprintln!(
        "{} cells, theorem applicable {} (failed {}), herman applicable {} (failed {}) in {:.1?}",
        summary.cells,
        summary.theorem.applicable,
        summary.theorem.failed,
        summary.herman.applicable,
        summary.herman.failed,
        started.elapsed()
    );
    Ok(u8::from(summary.theorem.failed > 0))
}
