//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p cocycle-lab --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use cocycle_lab::bounds::{herman_bound, theorem_bound};
use cocycle_lab::cocycle::{transfer_matrix, ModelParams, PhasePoint};
use cocycle_lab::engine::{le_estimate, LeProfile, Regime, Sampling, SegmentKind};
use cocycle_lab::oracles::{
    ellipse_suite, jensen_suite, lemma31_exhaustive, quantization_profiles, quantization_report, separation_suite,
    OracleReport, Suite,
};
use cocycle_lab::Tolerances;

const SEED: u64 = 20_240_917;

struct Gate {
    failures: usize,
}

impl Gate {
    fn record(&mut self, id: u32, title: &str, passed: bool, detail: String, started: Instant) {
        if !passed {
            self.failures += 1;
        }
        println!(
            "[{}] criterion {id}: {title} :: {detail} ({:.1}s)",
            if passed { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
}

fn main_sampling() -> Sampling<f64> {
    Sampling::new(100_000, 256)
}

fn span(a1: f64, a2: f64, pad: f64, count: usize) -> Vec<f64> {
    let half = 2.0 * a1.abs() + 2.0 * a2.abs() + pad;
    (0..count)
        .map(|i| -half + 2.0 * half * i as f64 / (count - 1) as f64)
        .collect()
}

fn theorem_reproduction(gate: &mut Gate, tol: &Tolerances) {
    let t = Instant::now();
    let mut cells = Vec::new();
    for a1 in [1.5, 2.0, 4.0, 10.0] {
        for a2 in [a1 / 200.0, a1 / 1e4] {
            for e in span(a1, a2, 2.5, 101) {
                cells.push(ModelParams::golden(a1, a2, e).unwrap());
            }
        }
    }
    let sampling = main_sampling();
    let margins: Vec<(f64, ModelParams<f64>)> = cells
        .par_iter()
        .map(|p| {
            let est = le_estimate(p, 0.0, &sampling);
            let bound = theorem_bound(p).expect("theorem hypotheses hold");
            (est.value + tol.sigma * est.std_error + tol.bound_slack - bound, *p)
        })
        .collect();
    let violations = margins.iter().filter(|(m, _)| *m < 0.0).count();
    let (worst, at) = margins
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .copied()
        .unwrap();
    gate.record(
        1,
        "L + 3se + 0.02 >= ln a1 - 10 sqrt(a2/a1)",
        violations == 0,
        format!(
            "{} cells, {violations} violations, worst slack margin {worst:.4} at a1={} a2={} E={:.3}",
            margins.len(),
            at.a1,
            at.a2,
            at.energy
        ),
        t,
    );
}

fn herman(gate: &mut Gate, tol: &Tolerances) {
    let t = Instant::now();
    let mut cells = Vec::new();
    for a2 in [2.0, 3.0, 5.0] {
        for a1 in [0.0, 0.5, 1.0] {
            for e in span(a1, a2, 2.5, 21) {
                cells.push(ModelParams::golden(a1, a2, e).unwrap());
            }
        }
    }
    let sampling = main_sampling();
    let margins: Vec<f64> = cells
        .par_iter()
        .map(|p| {
            let est = le_estimate(p, 0.0, &sampling);
            est.value + tol.sigma * est.std_error - (herman_bound(p).unwrap() - tol.bound_slack)
        })
        .collect();
    let violations = margins.iter().filter(|m| **m < 0.0).count();
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    gate.record(
        2,
        "L + 3se >= ln a2 - 0.02",
        violations == 0,
        format!("{} cells, {violations} violations, worst margin {worst:.4}", margins.len()),
        t,
    );
}

fn quantization(gate: &mut Gate, profiles: &[LeProfile<f64>], tol: &Tolerances, t: Instant) {
    let report = quantization_report(profiles, tol);
    let unresolved: usize = profiles
        .iter()
        .map(|p| p.segments.iter().filter(|s| s.kind == SegmentKind::Unresolved).count())
        .sum();
    let regimes: Vec<String> = profiles.iter().map(|p| p.regime.to_string()).collect();
    gate.record(
        3,
        "resolved slopes/2pi within 0.1 of {0,1,2}",
        report.passed,
        format!(
            "{} resolved segments, worst margin {:.4}, {unresolved} unresolved segments, regimes [{}]",
            report.trials,
            report.worst_case_margin,
            regimes.join(" ")
        ),
        t,
    );
}

fn asymptote(gate: &mut Gate) {
    let t = Instant::now();
    let sampling = main_sampling();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (a1, a2) in Suite::PROFILE_PARAMS {
        for e in Suite::PROFILE_ENERGIES {
            let p = ModelParams::golden(a1, a2, e).unwrap();
            let eps = cocycle_lab::bounds::epsilon0(&p)
                .map(|e0| (3.0 * e0).max(1.5))
                .unwrap_or(1.5);
            let (residual, _) = cocycle_lab::engine::asymptote_residual(&p, eps, &sampling).unwrap();
            worst = worst.max(residual.abs());
            count += 1;
        }
    }
    gate.record(
        4,
        "|L(eps) - (4 pi eps + ln|a2|)| < 5e-3 at eps = max(3 eps0, 1.5)",
        worst < 5e-3,
        format!("{count} points, worst |residual| {worst:.2e}"),
        t,
    );
}

fn oracle_line(r: &OracleReport) -> String {
    format!("{} trials={} worst={:.3e}", r.name, r.trials, r.worst_case_margin)
}

fn separation(gate: &mut Gate) {
    let t = Instant::now();
    let floor = separation_suite(10_000, SEED);
    let grid = ellipse_suite(10_000, 1_000_000, SEED).unwrap();
    gate.record(
        5,
        "sup-distance >= (19/60) a1 e^{4 pi eps0}; closed form = grid oracle within 1e-6 rel",
        floor.passed && grid.passed,
        format!("{}; {}", oracle_line(&floor), oracle_line(&grid)),
        t,
    );
}

fn product_floor(gate: &mut Gate) {
    let t = Instant::now();
    let r = lemma31_exhaustive(100_000, 20, (2.01, 50.0), SEED).unwrap();
    gate.record(
        6,
        "||prod B_j|| >= prod(|v_j| - 1) with prefix invariants",
        r.passed && r.worst_case_margin >= 0.0,
        oracle_line(&r),
        t,
    );
}

fn jensen(gate: &mut Gate) {
    let t = Instant::now();
    let [agree, floor] = jensen_suite(1000, 100_000, SEED).unwrap();
    gate.record(
        7,
        "Jensen vs 1e5-node quadrature within 1e-5; value >= 2 pi delta + ln|a1| - 1e-9",
        agree.passed && floor.passed,
        format!("{}; {}", oracle_line(&agree), oracle_line(&floor)),
        t,
    );
}

fn constant_cocycle(gate: &mut Gate) {
    let t = Instant::now();
    let s = Sampling::new(10_000, 256);
    let l3 = le_estimate(&ModelParams::golden(0.0, 0.0, 3.0).unwrap(), 0.0, &s).value;
    let l0 = le_estimate(&ModelParams::golden(0.0, 0.0, 0.0).unwrap(), 0.0, &s).value;
    let target = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    gate.record(
        8,
        "constant cocycle: E=3 -> ln((3+sqrt5)/2) within 1e-3, E=0 -> 0 within 1e-9",
        (l3 - target).abs() < 1e-3 && l0.abs() < 1e-9,
        format!("E=3 error {:.2e}, E=0 value {l0:.2e}", (l3 - target).abs()),
        t,
    );
}

fn engine_invariants(gate: &mut Gate, profiles: &[LeProfile<f64>]) {
    let t = Instant::now();
    let sampling = main_sampling();
    let mut notes = Vec::new();
    let mut ok = true;

    // evenness in ε
    let mut worst_even: f64 = f64::NEG_INFINITY;
    for (a1, a2) in Suite::PROFILE_PARAMS {
        for e in Suite::PROFILE_ENERGIES {
            let p = ModelParams::golden(a1, a2, e).unwrap();
            for eps in [0.1, 0.5] {
                let up = le_estimate(&p, eps, &sampling);
                let down = le_estimate(&p, -eps, &sampling);
                let excess = (up.value - down.value).abs() - 3.0 * (up.std_error + down.std_error);
                worst_even = worst_even.max(excess);
            }
        }
    }
    ok &= worst_even <= 1e-12;
    notes.push(format!("evenness excess {worst_even:.1e}"));

    // midpoint convexity on consecutive triples
    let mut worst_convex: f64 = f64::NEG_INFINITY;
    for prof in profiles {
        for w in prof.le_values.windows(3) {
            let (l, m, r) = (&w[0], &w[1], &w[2]);
            let chord = l.value + (r.value - l.value) * (m.eps - l.eps) / (r.eps - l.eps);
            worst_convex = worst_convex.max(m.value - chord);
        }
    }
    ok &= worst_convex <= 0.01;
    notes.push(format!("convexity excess {worst_convex:.1e}"));

    // Fekete: n = 2e4 against n = 1e4
    let mut worst_fekete: f64 = f64::NEG_INFINITY;
    for (a1, a2) in Suite::PROFILE_PARAMS {
        for e in Suite::PROFILE_ENERGIES {
            let p = ModelParams::golden(a1, a2, e).unwrap();
            let short = le_estimate(&p, 0.0, &Sampling::new(10_000, 256));
            let long = le_estimate(&p, 0.0, &Sampling::new(20_000, 256));
            worst_fekete = worst_fekete.max(long.value - short.value);
        }
    }
    ok &= worst_fekete <= 0.01;
    notes.push(format!("Fekete increase {worst_fekete:.1e}"));

    // unit determinant at random complex points
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_det: f64 = 0.0;
    for _ in 0..10_000 {
        let p = ModelParams::golden(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-10.0..10.0)).unwrap();
        let z = PhasePoint::new(rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0));
        worst_det = worst_det.max((transfer_matrix(&p, &z).det() - 1.0).norm());
    }
    ok &= worst_det < 1e-12;
    notes.push(format!("|det - 1| max {worst_det:.1e}"));

    gate.record(9, "engine invariants", ok, notes.join(", "), t);
}

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let mut gate = Gate { failures: 0 };
    let total = Instant::now();

    theorem_reproduction(&mut gate, &tol);
    herman(&mut gate, &tol);
    let t = Instant::now();
    let profiles = quantization_profiles(main_sampling(), &tol).unwrap();
    quantization(&mut gate, &profiles, &tol, t);
    asymptote(&mut gate);
    separation(&mut gate);
    product_floor(&mut gate);
    jensen(&mut gate);
    constant_cocycle(&mut gate);
    engine_invariants(&mut gate, &profiles);

    let unresolved = profiles.iter().filter(|p| p.regime == Regime::Unresolved).count();
    println!(
        "acceptance: {} failed, {unresolved} unresolved profiles, {:.0}s total",
        gate.failures,
        total.elapsed().as_secs_f64()
    );
    if gate.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
