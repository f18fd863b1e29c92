//! Brute-force twins of the closed forms in [`crate::bounds`].
//!
//! Nothing here reuses the closed-form algebra: distances come from grid
//! search, integrals from the midpoint rule and product floors from explicit
//! multiplication. Random plans draw from ChaCha8 with one stream per trial,
//! so a report depends only on `(seed, plan)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    best_ellipse_shift, ellipse_distance, epsilon0, first_harmonic_roots, jensen_integral, EllipseSpec,
    MIN_RATIO,
};
use crate::cocycle::{potential_value, product_log_norm, ModelParams, PhasePoint, TransferMatrix};
use crate::engine::{le_profile, LeProfile, ProfileConfig, Sampling, SegmentKind};
use crate::error::{LabError, Result};
use crate::scalar::Real;
use crate::sum::CompensatedSum;
use crate::tolerances::Tolerances;

/// Outcome of one randomized or exhaustive check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub name: String,
    pub trials: usize,
    /// Claimed value minus bound, minimized over trials.
    pub worst_case_margin: f64,
    pub worst_case_input: Vec<(String, f64)>,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    fn from_trials(name: &str, tolerance: f64, trials: Vec<(f64, Vec<(String, f64)>)>) -> Self {
        let count = trials.len();
        // first minimum in trial order; NaN counts as a failure
        let worst = trials.into_iter().fold(None::<(f64, Vec<(String, f64)>)>, |best, t| match best {
            None => Some(t),
            Some(b) if t.0 < b.0 || (t.0.is_nan() && !b.0.is_nan()) => Some(t),
            Some(b) => Some(b),
        });
        let (margin, input) = worst.unwrap_or((f64::INFINITY, Vec::new()));
        Self {
            name: name.to_string(),
            trials: count,
            worst_case_margin: margin,
            worst_case_input: input,
            tolerance,
            passed: margin >= -tolerance,
        }
    }
}

fn input(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// `|E − a1 e^{2πδ} e^{−2πix} − a1 e^{−2πδ} e^{2πix}|`, evaluated literally.
fn first_harmonic_modulus<T: Real>(a1: T, delta: T, energy: T, x: T) -> T {
    use num_complex::Complex;
    let t = T::two_pi() * delta;
    let w = Complex::new(T::zero(), T::two_pi() * x).exp();
    let z = Complex::new(energy, T::zero()) - w.conj() * (a1 * t.exp()) - w * (a1 * (-t).exp());
    z.norm()
}

/// Cached `cos`, `sin` of `2πk/N` for `k ≤ N/2`; the modulus is symmetric
/// under `x ↦ 1 − x`, so the other half adds nothing.
#[derive(Debug, Clone)]
pub struct GridOracle<T> {
    size: usize,
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> GridOracle<T> {
    pub fn new(size: usize) -> Result<Self> {
        if size < 1000 {
            return Err(LabError::InvalidParameter {
                name: "grid_size",
                reason: format!("{size} is below 1000"),
            });
        }
        let (sin, cos) = (0..=size / 2)
            .map(|k| (T::two_pi() * T::count(k) / T::count(size)).sin_cos())
            .unzip();
        Ok(Self { size, cos, sin })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Grid minimum over `x = k/N`, then golden-section search on the two
    /// adjacent cells.
    pub fn min_modulus(&self, a1: T, delta: T, energy: T) -> T {
        let t = T::two_pi() * delta;
        let two = T::lit(2.0);
        let big_a = two * a1 * t.cosh();
        let big_b = two * a1 * t.sinh();
        let mut best = (T::infinity(), 0usize);
        for (k, (&c, &s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let re = energy - big_a * c;
            let im = big_b * s;
            let f = re * re + im * im;
            if f < best.0 {
                best = (f, k);
            }
        }
        let h = T::one() / T::count(self.size);
        let centre = T::count(best.1) * h;
        let f = |x: T| first_harmonic_modulus(a1, delta, energy, x);
        let grid_value = f(centre);
        golden_section(f, centre - h, centre + h).min(grid_value)
    }
}

fn golden_section<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let r = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// `min_x |E − a1 e^{−2πδ} e^{2πix} − a1 e^{2πδ} e^{−2πix}|` by grid search
/// over `x = k/grid_size` with a golden-section polish. Approaches
/// [`ellipse_distance`] from above.
pub fn grid_min_modulus<T: Real>(p: &ModelParams<T>, delta: T, grid_size: usize) -> Result<T> {
    Ok(GridOracle::new(grid_size)?.min_modulus(p.a1, delta, p.energy))
}

/// Midpoint-rule value of `∫₀¹ ln|E − a1 e^{2πδ} e^{−2πix} − a1 e^{−2πδ} e^{2πix}| dx`.
///
/// Fails with [`LabError::NearSingular`] when the integrand's modulus gets
/// below `1e-8`.
pub fn quadrature_log_integral<T: Real>(p: &ModelParams<T>, delta: T, nodes: usize) -> Result<T> {
    if nodes < 1000 {
        return Err(LabError::InvalidParameter {
            name: "nodes",
            reason: format!("{nodes} is below 1000"),
        });
    }
    MidpointRule::new(nodes).log_integral(p.a1, delta, p.energy)
}

/// Midpoint nodes `(k + 1/2)/N` with their cosines and sines.
#[derive(Debug, Clone)]
pub struct MidpointRule<T> {
    grid: GridOracle<T>,
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> MidpointRule<T> {
    pub fn new(nodes: usize) -> Self {
        let nodes = nodes.max(1000);
        let (sin, cos) = (0..nodes)
            .map(|k| (T::two_pi() * (T::count(k) + T::lit(0.5)) / T::count(nodes)).sin_cos())
            .unzip();
        Self {
            grid: GridOracle::new(nodes).expect("nodes >= 1000"),
            cos,
            sin,
        }
    }

    pub fn log_integral(&self, a1: T, delta: T, energy: T) -> Result<T> {
        let floor = self.grid.min_modulus(a1, delta, energy);
        if floor < T::lit(1e-8) {
            return Err(LabError::NearSingular(floor.to_f64().unwrap_or(0.0)));
        }
        let t = T::two_pi() * delta;
        let two = T::lit(2.0);
        let big_a = two * a1 * t.cosh();
        let big_b = two * a1 * t.sinh();
        let sum: CompensatedSum<T> = self
            .cos
            .iter()
            .zip(&self.sin)
            .map(|(&c, &s)| {
                let re = energy - big_a * c;
                let im = big_b * s;
                (re * re + im * im).ln() / two
            })
            .collect();
        Ok(sum.value() / T::count(self.cos.len()))
    }
}

/// Exact products of `[[v_j, −1], [1, 0]]` with `|v_j|` drawn from `v_range`
/// and random signs, `n ≤ n_max`.
///
/// On every prefix `k` it checks `‖B^k‖ ≥ ∏(|v_j| − 1)`, `|b₁₁^k| ≥ ∏(|v_j| − 1)`
/// and `|b₂₁^k| ≤ |b₁₁^k|`; the margin is the smallest of the three log gaps.
pub fn lemma31_exhaustive(trials: usize, n_max: usize, v_range: (f64, f64), seed: u64) -> Result<OracleReport> {
    let (lo, hi) = v_range;
    if !(lo > 2.0 && hi > lo && hi.is_finite()) {
        return Err(LabError::InvalidParameter {
            name: "v_range",
            reason: format!("({lo}, {hi}) must lie in (2, inf)"),
        });
    }
    if n_max == 0 {
        return Err(LabError::InvalidParameter {
            name: "n_max",
            reason: "must be at least 1".into(),
        });
    }
    let results: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let n = rng.gen_range(1..=n_max);
            let vs: Vec<f64> = (0..n)
                .map(|_| {
                    let v = rng.gen_range(lo..hi);
                    if rng.gen::<bool>() {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            let margin = product_floor_margin(&vs);
            let mut inp = input(&[("trial", trial as f64), ("n", n as f64)]);
            inp.extend(vs.iter().enumerate().map(|(j, v)| (format!("v{}", j + 1), *v)));
            (margin, inp)
        })
        .collect();
    Ok(OracleReport::from_trials("product-floor", 1e-12, results))
}

/// Smallest log margin of the three product-floor claims over all prefixes.
pub fn product_floor_margin(vs: &[f64]) -> f64 {
    const CHUNK: i32 = 128;
    let shrink = 2f64.powi(-CHUNK);
    let ln2 = std::f64::consts::LN_2;
    // rows (m11, m12), (m21, m22) of B^k, scaled by 2^{-exp}
    let mut m = [[1.0f64, 0.0], [0.0, 1.0]];
    let mut exp = 0i32;
    let mut floor = CompensatedSum::new();
    let mut worst = f64::INFINITY;
    for &v in vs {
        let row1 = [v * m[0][0] - m[1][0], v * m[0][1] - m[1][1]];
        m = [row1, m[0]];
        floor.add((v.abs() - 1.0).ln());
        if m.iter().flatten().any(|e| e.abs() > 1.0 / shrink) {
            m.iter_mut().flatten().for_each(|e| *e *= shrink);
            exp += CHUNK;
        }
        let scale = exp as f64 * ln2;
        let b11 = m[0][0].abs().ln() + scale;
        let b21 = m[1][0].abs().ln() + scale;
        let norm = TransferMatrix::from_real(m[0][0], m[0][1], m[1][0], m[1][1])
            .operator_norm()
            .ln()
            + scale;
        let f = floor.value();
        worst = worst.min(norm - f).min(b11 - f).min(b11 - b21);
    }
    worst
}

/// `(ln‖A_n(x + iε)‖, Σ_j ln(|v_j| − 1))` along the orbit `x + jα + iε`.
///
/// Requires `|v_j| > 2` at every orbit point.
pub fn entrywise_product_floor<T: Real>(p: &ModelParams<T>, eps: T, x: T, n: usize) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let mut rhs = CompensatedSum::new();
    for j in 0..n {
        let z = PhasePoint::new(x + T::count(j) * p.alpha, eps);
        let v = potential_value(p, &z).norm();
        if !(v > two) {
            return Err(LabError::OrbitBelowTwo {
                index: j,
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        rhs.add((v - T::one()).ln());
    }
    let lhs = product_log_norm(p, &PhasePoint::new(x, eps), n).log_operator_norm();
    Ok((lhs, rhs.value()))
}

/// Closed-form separation against the floor `(19/60)|a1| e^{4πε₀}`, with
/// `|a1/a2|` log-uniform in `[100, 10⁶]`, `|a1|` log-uniform in `[0.5, 20]`
/// and `E` uniform over `±1.25 a_{2ε₀}`.
pub fn separation_suite(samples: usize, seed: u64) -> OracleReport {
    let results = (0..samples)
        .into_par_iter()
        .map(|trial| {
            let p = random_separation_params(seed, trial);
            let choice = best_ellipse_shift(&p).expect("ratio within range");
            let margin = (choice.distance - choice.floor) / choice.floor;
            (margin, params_input(trial, &p, choice.delta))
        })
        .collect();
    OracleReport::from_trials("separation-floor", 0.0, results)
}

/// Closed-form ellipse distance at the selected shift against the grid
/// oracle; margin `1e-6·(1 + d) − |grid − d|`, negative when the grid sits
/// below the closed form.
pub fn ellipse_suite(samples: usize, grid_size: usize, seed: u64) -> Result<OracleReport> {
    let grid = GridOracle::<f64>::new(grid_size)?;
    let results = (0..samples)
        .into_par_iter()
        .map(|trial| {
            let p = random_separation_params(seed, trial);
            let delta = best_ellipse_shift(&p).expect("ratio within range").delta;
            let closed = ellipse_distance(&p, delta).expect("a1 nonzero");
            let brute = grid.min_modulus(p.a1, delta, p.energy);
            let gap = brute - closed;
            let margin = if gap < -1e-12 * (1.0 + closed) {
                gap
            } else {
                1e-6 * (1.0 + closed) - gap.abs()
            };
            (margin, params_input(trial, &p, delta))
        })
        .collect();
    Ok(OracleReport::from_trials("ellipse-grid", 0.0, results))
}

fn random_separation_params(seed: u64, trial: usize) -> ModelParams<f64> {
    let mut rng = trial_rng(seed, trial);
    let ratio = log_uniform(&mut rng, MIN_RATIO, 1e6);
    let a1 = log_uniform(&mut rng, 0.5, 20.0);
    let p = ModelParams::golden(a1, a1 / ratio, 0.0).expect("finite");
    let eps0 = epsilon0(&p).expect("ratio >= 100");
    let a_axis = EllipseSpec::new(a1, 2.0 * eps0).expect("a1 > 0").a_axis;
    let e = rng.gen_range(-1.25 * a_axis..1.25 * a_axis);
    p.with_energy(e)
}

fn params_input(trial: usize, p: &ModelParams<f64>, delta: f64) -> Vec<(String, f64)> {
    input(&[
        ("trial", trial as f64),
        ("a1", p.a1),
        ("a2", p.a2),
        ("E", p.energy),
        ("delta", delta),
    ])
}

/// Jensen evaluation against `nodes`-point quadrature on nonsingular draws
/// (both roots at distance `> 0.01` from the unit circle). Returns the
/// agreement report (tolerance `1e-5`) and the floor report
/// `J − (2πδ + ln|a1|) ≥ −1e-9`.
pub fn jensen_suite(samples: usize, nodes: usize, seed: u64) -> Result<[OracleReport; 2]> {
    let rule = MidpointRule::<f64>::new(nodes);
    let results: Vec<_> = (0..samples)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let p = loop {
                let a1 = log_uniform(&mut rng, 0.1, 10.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let delta = rng.gen_range(0.0..0.5);
                let a_axis = EllipseSpec::new(a1, delta).expect("a1 nonzero").a_axis;
                let e = rng.gen_range(-1.5 * a_axis..1.5 * a_axis);
                let p = ModelParams::golden(a1, 0.0, e).expect("finite");
                let roots = first_harmonic_roots(&p, delta).expect("a1 nonzero");
                if roots.iter().all(|z| (z.norm() - 1.0).abs() > 0.01) {
                    break (p, delta);
                }
            };
            let (p, delta) = p;
            let exact = jensen_integral(&p, delta).expect("a1 nonzero");
            let inp = params_input(trial, &p, delta);
            let agreement = match rule.log_integral(p.a1, delta, p.energy) {
                Ok(q) => 1e-5 - (exact - q).abs(),
                Err(_) => f64::NEG_INFINITY,
            };
            let floor = exact - (std::f64::consts::TAU * delta + p.a1.abs().ln());
            ((agreement, inp.clone()), (floor, inp))
        })
        .collect();
    let (agree, floor): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok([
        OracleReport::from_trials("jensen-quadrature", 0.0, agree),
        OracleReport::from_trials("jensen-floor", 1e-9, floor),
    ])
}

/// Distance of every resolved segment slope from an admissible integer,
/// measured against the slope tolerance.
pub fn quantization_report<T: Real>(profiles: &[LeProfile<T>], tol: &Tolerances) -> OracleReport {
    let mut trials = Vec::new();
    for prof in profiles {
        for s in prof.segments.iter().filter(|s| s.kind == SegmentKind::Quantized) {
            let residual = s.residual.to_f64().unwrap_or(f64::NAN);
            trials.push((
                tol.slope - residual,
                input(&[
                    ("a1", prof.params.a1.to_f64().unwrap_or(f64::NAN)),
                    ("a2", prof.params.a2.to_f64().unwrap_or(f64::NAN)),
                    ("E", prof.params.energy.to_f64().unwrap_or(f64::NAN)),
                    ("epsLeft", s.eps_left.to_f64().unwrap_or(f64::NAN)),
                    ("slopeOver2pi", s.slope_over_2pi.to_f64().unwrap_or(f64::NAN)),
                ]),
            ));
        }
    }
    OracleReport::from_trials("quantization", 0.0, trials)
}

/// Named oracle plans run by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma31,
    Ellipse,
    Jensen,
    Quantization,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Lemma31, Suite::Ellipse, Suite::Jensen, Suite::Quantization];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma31 => "lemma31",
            Suite::Ellipse => "ellipse",
            Suite::Jensen => "jensen",
            Suite::Quantization => "quantization",
        }
    }

    /// Parameter triples for the quantization plan.
    pub const PROFILE_PARAMS: [(f64, f64); 3] = [(2.0, 0.05), (0.5, 2.0), (3.0, 0.01)];
    pub const PROFILE_ENERGIES: [f64; 3] = [0.0, 1.0, 2.5];

    /// Runs the documented plan for this suite; `sampling` only matters for
    /// the quantization profiles.
    pub fn run(self, seed: u64, sampling: Sampling<f64>, tol: &Tolerances) -> Result<Vec<OracleReport>> {
        Ok(match self {
            Suite::Lemma31 => vec![lemma31_exhaustive(100_000, 20, (2.01, 50.0), seed)?],
            Suite::Ellipse => vec![separation_suite(10_000, seed), ellipse_suite(10_000, 1_000_000, seed)?],
            Suite::Jensen => jensen_suite(1000, 100_000, seed)?.to_vec(),
            Suite::Quantization => {
                vec![quantization_report(&quantization_profiles(sampling, tol)?, tol)]
            }
        })
    }
}

/// Profiles over [`Suite::PROFILE_PARAMS`] × [`Suite::PROFILE_ENERGIES`] on
/// `[0, 1]` with 24 steps.
pub fn quantization_profiles(sampling: Sampling<f64>, tol: &Tolerances) -> Result<Vec<LeProfile<f64>>> {
    let mut out = Vec::new();
    for (a1, a2) in Suite::PROFILE_PARAMS {
        for e in Suite::PROFILE_ENERGIES {
            let p = ModelParams::golden(a1, a2, e)?;
            let cfg = ProfileConfig::new(1.0, 24, sampling).tolerances(*tol);
            out.push(le_profile(&p, &cfg)?);
        }
    }
    Ok(out)
}

impl std::str::FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| LabError::InvalidParameter {
                name: "suite",
                reason: format!("unknown suite {s:?}"),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{epsilon0, EllipseSpec};
    use proptest::prelude::*;

    fn params(a1: f64, a2: f64, e: f64) -> ModelParams<f64> {
        ModelParams::golden(a1, a2, e).unwrap()
    }

    #[test]
    fn grid_hits_symmetry_targets() {
        let delta = 0.1;
        let spec = EllipseSpec::new(1.0, delta).unwrap();
        let d = grid_min_modulus(&params(1.0, 0.0, 0.0), delta, 1_000_000).unwrap();
        assert!((d - spec.b_axis).abs() < 1e-6);
        let d = grid_min_modulus(&params(1.0, 0.0, spec.a_axis), delta, 1_000_000).unwrap();
        assert!(d <= 1e-4);
    }

    #[test]
    fn grid_rejects_small_sizes() {
        assert!(grid_min_modulus(&params(1.0, 0.0, 0.0), 0.1, 999).is_err());
    }

    #[test]
    fn quadrature_examples() {
        let q = quadrature_log_integral(&params(1.0, 0.0, 0.0), 0.5, 100_000).unwrap();
        assert!((q - std::f64::consts::PI).abs() < 1e-6);
        let q = quadrature_log_integral(&params(1.0, 0.0, 0.0), 1e-5, 100_000).unwrap();
        assert!(q.abs() < 1e-4);
        // E on the ellipse
        let a = EllipseSpec::new(1.0, 0.2).unwrap().a_axis;
        assert!(matches!(
            quadrature_log_integral(&params(1.0, 0.0, a), 0.2, 4096),
            Err(LabError::NearSingular(_))
        ));
        assert!(quadrature_log_integral(&params(1.0, 0.0, 0.0), 0.5, 10).is_err());
    }

    #[test]
    fn quadrature_converges() {
        let p = params(1.3, 0.0, 1.1);
        let exact = jensen_integral(&p, 0.02).unwrap();
        let q1 = quadrature_log_integral(&p, 0.02, 1000).unwrap();
        let q2 = quadrature_log_integral(&p, 0.02, 2000).unwrap();
        let q4 = quadrature_log_integral(&p, 0.02, 4000).unwrap();
        let (e1, e2) = ((q1 - exact).abs(), (q2 - exact).abs());
        assert!(e2 * 3.0 <= e1 || e2 < 1e-13, "{e1} {e2}");
        assert!((q4 - exact).abs() < 1e-10);
    }

    #[test]
    fn product_floor_small_cases() {
        // all v = 3, n = 2: b11 = 8, b21 = 3, floor 4
        // the binding gap is |b11| = 3 against 2 at k = 1
        let m = product_floor_margin(&[3.0, 3.0]);
        assert!((m - 1.5f64.ln()).abs() < 1e-12);
        let one = product_floor_margin(&[-2.5]);
        assert!((one - (2.5f64.ln() - 1.5f64.ln()).min(2.5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn product_floor_survives_overflow_range() {
        let vs = vec![50.0; 400];
        assert!(product_floor_margin(&vs).is_finite());
        assert!(product_floor_margin(&vs) > 0.0);
    }

    #[test]
    fn exhaustive_is_deterministic() {
        let a = lemma31_exhaustive(2000, 20, (2.01, 50.0), 9).unwrap();
        let b = lemma31_exhaustive(2000, 20, (2.01, 50.0), 9).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
        assert_eq!(a.trials, 2000);
        assert!(lemma31_exhaustive(10, 20, (1.5, 50.0), 9).is_err());
    }

    #[test]
    fn entrywise_floor_in_theorem_regime() {
        let p = params(100.0, 1.0, 0.0);
        let eps0 = epsilon0(&p).unwrap();
        let (lhs, rhs) = entrywise_product_floor(&p, 2.0 * eps0, 0.1, 1000).unwrap();
        assert!(lhs >= rhs - 1e-9);
        let (lhs, rhs) = entrywise_product_floor(&p, 2.0 * eps0, 0.1, 1).unwrap();
        assert!(lhs >= rhs);
    }

    #[test]
    fn entrywise_floor_reports_small_factor() {
        let p = params(1.0, 0.0, 0.0);
        assert!(matches!(
            entrywise_product_floor(&p, 0.0, 0.25, 10),
            Err(LabError::OrbitBelowTwo { index: 0, .. })
        ));
    }

    #[test]
    fn small_suites_pass() {
        assert!(separation_suite(500, 3).passed);
        assert!(ellipse_suite(50, 100_000, 3).unwrap().passed);
        for r in jensen_suite(30, 20_000, 3).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn grid_approaches_closed_form_from_above(
            a1 in 0.2f64..8.0, delta in 0.0f64..0.4, t in -1.3f64..1.3,
        ) {
            let a_axis = EllipseSpec::new(a1, delta).unwrap().a_axis;
            let p = params(a1, 0.0, t * a_axis);
            let closed = ellipse_distance(&p, delta).unwrap();
            let grid = grid_min_modulus(&p, delta, 20_000).unwrap();
            prop_assert!(grid - closed >= -1e-12 * (1.0 + closed));
            prop_assert!(grid - closed <= 1e-6 * (1.0 + closed));
        }

        #[test]
        fn quadrature_respects_floor(a1 in 0.2f64..5.0, delta in 0.01f64..0.4, t in -1.2f64..1.2) {
            let a_axis = EllipseSpec::new(a1, delta).unwrap().a_axis;
            let p = params(a1, 0.0, t * a_axis);
            if let Ok(q) = quadrature_log_integral(&p, delta, 20_000) {
                prop_assert!(q >= std::f64::consts::TAU * delta + a1.ln() - 1e-6);
            }
        }
    }
}
