//! The graph `ε ↦ L^E(ε)`: sampling, slope quantization, regime labels.
//!
//! `L^E(ε)` is even, convex and piecewise affine in `ε` with slopes in
//! `2π·{0, 1, 2}`. After the last break it follows
//! `ℓ₂: L = 4πε + ln|a2|`. The sequence of accelerations read off from
//! `ε = 0⁺` determines the shape:
//!
//! | label  | accelerations | lines            |
//! |--------|---------------|------------------|
//! | `w2`   | 2             | ℓ₂               |
//! | `w12`  | 1, 2          | ℓ₁, ℓ₂           |
//! | `w012` | 0, 1, 2       | ℓ₃, ℓ₁′, ℓ₂      |
//! | `w02`  | 0, 2          | ℓ₃, ℓ₂           |
//!
//! For `L^E > 0`, `E` is in the spectrum exactly when the acceleration at
//! `0⁺` is positive (`w2`, `w12`).

use serde::{Deserialize, Serialize};

use super::estimate::{le_estimate, LeEstimate, Sampling};
use crate::bounds::epsilon0;
use crate::cocycle::ModelParams;
use crate::error::{LabError, Result};
use crate::scalar::Real;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// ℓ₂ from `ε = 0`.
    W2,
    /// ℓ₁ through `(0, L^E)`, then ℓ₂.
    W12,
    /// Flat, then slope 1, then ℓ₂.
    W012,
    /// Flat, then ℓ₂.
    W02,
    /// Flat over the whole sampled window; `w012` and `w02` not told apart.
    W0,
    /// `L^E(0)` indistinguishable from zero; not given a shape label.
    ZeroExponent,
    Unresolved,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::W2 => "w2",
            Regime::W12 => "w12",
            Regime::W012 => "w012",
            Regime::W02 => "w02",
            Regime::W0 => "w0",
            Regime::ZeroExponent => "zero-le",
            Regime::Unresolved => "unresolved",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    InSpectrum,
    NotInSpectrum,
    #[serde(rename = "ZeroLE")]
    ZeroLe,
    Unresolved,
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Membership::InSpectrum => "InSpectrum",
            Membership::NotInSpectrum => "NotInSpectrum",
            Membership::ZeroLe => "ZeroLE",
            Membership::Unresolved => "Unresolved",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    /// Slope/2π close to an admissible integer.
    Quantized,
    /// Secant across a break, bracketed by the neighbouring integer slopes.
    Kink,
    Unresolved,
}

/// One gap of the ε grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Segment<T> {
    pub eps_left: T,
    pub eps_right: T,
    pub slope_over_2pi: T,
    pub kind: SegmentKind,
    /// Nearest integer, for quantized segments.
    pub acceleration: Option<i64>,
    /// `|slope/2π − nearest integer|`.
    pub residual: T,
    /// Location of the break, for kinks.
    pub breakpoint: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProfileConfig<T> {
    pub eps_max: T,
    pub grid_steps: usize,
    pub sampling: Sampling<T>,
    pub tolerances: Tolerances,
}

impl<T: Real> ProfileConfig<T> {
    pub fn new(eps_max: T, grid_steps: usize, sampling: Sampling<T>) -> Self {
        Self {
            eps_max,
            grid_steps,
            sampling,
            tolerances: Tolerances::default(),
        }
    }

    pub fn tolerances(self, tolerances: Tolerances) -> Self {
        Self { tolerances, ..self }
    }

    /// `3ε₀` when `ε₀` is defined, else `1`.
    pub fn default_eps_max(p: &ModelParams<T>) -> T {
        epsilon0(p)
            .map(|e| T::lit(3.0) * e)
            .unwrap_or_else(|_| T::one())
    }
}

/// Sampled graph of `ε ↦ L^E(ε)` on `[0, eps_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeProfile<T> {
    pub params: ModelParams<T>,
    pub eps_grid: Vec<T>,
    pub le_values: Vec<LeEstimate<T>>,
    /// `segments[i]` spans `eps_grid[i]..eps_grid[i+1]`.
    pub segments: Vec<Segment<T>>,
    /// First node where `L` is within tolerance of `4πε + ln|a2|`.
    pub asymptote_onset: Option<T>,
    pub regime: Regime,
    pub tolerances: Tolerances,
}

impl<T: Real> LeProfile<T> {
    pub fn segment_slopes(&self) -> Vec<T> {
        self.segments.iter().map(|s| s.slope_over_2pi).collect()
    }

    pub fn accelerations(&self) -> Vec<Option<i64>> {
        self.segments.iter().map(|s| s.acceleration).collect()
    }

    pub fn le0(&self) -> &LeEstimate<T> {
        &self.le_values[0]
    }

    pub fn breakpoints(&self) -> Vec<T> {
        self.segments.iter().filter_map(|s| s.breakpoint).collect()
    }

    /// Collapsed sequence of accelerations, kinks at either end of the grid
    /// contributing the slope implied beyond them.
    pub fn acceleration_pattern(&self) -> Vec<i64> {
        let mut out: Vec<i64> = Vec::new();
        let n = self.segments.len();
        for (i, s) in self.segments.iter().enumerate() {
            let ks: Vec<i64> = match s.kind {
                SegmentKind::Quantized => s.acceleration.into_iter().collect(),
                SegmentKind::Kink => {
                    let (l, r) = bracket(&self.segments, i, self.params.degree());
                    let mut v = Vec::new();
                    if i == 0 || !has_quantized(&self.segments[..i]) {
                        v.push(l);
                    }
                    if i + 1 == n || !has_quantized(&self.segments[i + 1..]) {
                        v.push(r);
                    }
                    v
                }
                SegmentKind::Unresolved => Vec::new(),
            };
            for k in ks {
                if out.last() != Some(&k) {
                    out.push(k);
                }
            }
        }
        out
    }
}

fn has_quantized<T>(segs: &[Segment<T>]) -> bool {
    segs.iter().any(|s| s.kind == SegmentKind::Quantized)
}

/// Nearest quantized accelerations left and right of segment `i`; missing
/// neighbours default to 0 on the left (evenness) and to `degree` on the right.
fn bracket<T>(segs: &[Segment<T>], i: usize, degree: i64) -> (i64, i64) {
    let left = segs[..i]
        .iter()
        .rev()
        .find(|s| s.kind == SegmentKind::Quantized)
        .and_then(|s| s.acceleration)
        .unwrap_or(0);
    let right = segs[i + 1..]
        .iter()
        .find(|s| s.kind == SegmentKind::Quantized)
        .and_then(|s| s.acceleration)
        .unwrap_or(degree);
    (left, right)
}

fn slope_over_2pi<T: Real>(l: &LeEstimate<T>, r: &LeEstimate<T>) -> T {
    (r.value - l.value) / (T::two_pi() * (r.eps - l.eps))
}

fn nearest_admissible<T: Real>(s: T, degree: i64) -> (i64, T) {
    let k = s.round().to_i64().unwrap_or(i64::MAX).clamp(0, degree.max(0));
    (k, (s - T::lit(k as f64)).abs())
}

struct Builder<'a, T> {
    p: &'a ModelParams<T>,
    cfg: &'a ProfileConfig<T>,
}

impl<T: Real> Builder<'_, T> {
    fn eval(&self, eps: T) -> LeEstimate<T> {
        le_estimate(self.p, eps, &self.cfg.sampling)
    }

    fn settled(&self, l: &LeEstimate<T>, r: &LeEstimate<T>) -> bool {
        let (_, res) = nearest_admissible(slope_over_2pi(l, r), self.p.degree());
        res < T::lit(self.cfg.tolerances.refine)
    }

    /// Interior nodes added by bisecting a gap whose slope is off an integer.
    fn refine(&self, l: &LeEstimate<T>, r: &LeEstimate<T>, depth: usize) -> Vec<LeEstimate<T>> {
        if depth >= self.cfg.tolerances.refine_depth || self.settled(l, r) {
            return Vec::new();
        }
        let m = self.eval((l.eps + r.eps) / T::lit(2.0));
        let mut out = self.refine(l, &m, depth + 1);
        let right = self.refine(&m, r, depth + 1);
        out.push(m);
        out.extend(right);
        out
    }
}

/// Samples `L^E(ε)` on a uniform grid over `[0, eps_max]`, bisects gaps whose
/// slope is not quantized, and labels the result.
pub fn le_profile<T: Real>(p: &ModelParams<T>, cfg: &ProfileConfig<T>) -> Result<LeProfile<T>> {
    if !(cfg.eps_max > T::zero() && cfg.eps_max.is_finite()) {
        return Err(LabError::InvalidParameter {
            name: "eps_max",
            reason: format!("{} must be positive", cfg.eps_max),
        });
    }
    if cfg.grid_steps < 8 {
        return Err(LabError::InvalidParameter {
            name: "grid_steps",
            reason: format!("{} is below 8", cfg.grid_steps),
        });
    }
    let b = Builder { p, cfg };
    let coarse: Vec<LeEstimate<T>> = (0..=cfg.grid_steps)
        .map(|i| b.eval(cfg.eps_max * T::count(i) / T::count(cfg.grid_steps)))
        .collect();
    let mut nodes = vec![coarse[0]];
    for w in coarse.windows(2) {
        nodes.extend(b.refine(&w[0], &w[1], 0));
        nodes.push(w[1]);
    }
    Ok(assemble(*p, nodes, cfg.tolerances))
}

/// Builds segments, the asymptote onset and the regime from evaluated nodes
/// (sorted by ε, starting at ε = 0).
pub(crate) fn assemble<T: Real>(
    params: ModelParams<T>,
    nodes: Vec<LeEstimate<T>>,
    tolerances: Tolerances,
) -> LeProfile<T> {
    let degree = params.degree();
    let tol = &tolerances;
    let mut segments: Vec<Segment<T>> = nodes
        .windows(2)
        .map(|w| {
            let slope = slope_over_2pi(&w[0], &w[1]);
            let (k, residual) = nearest_admissible(slope, degree);
            let quantized = residual < T::lit(tol.slope);
            Segment {
                eps_left: w[0].eps,
                eps_right: w[1].eps,
                slope_over_2pi: slope,
                kind: if quantized {
                    SegmentKind::Quantized
                } else {
                    SegmentKind::Unresolved
                },
                acceleration: quantized.then_some(k),
                residual,
                breakpoint: None,
            }
        })
        .collect();

    let slack = T::lit(tol.slope);
    let strict: Vec<bool> = segments
        .iter()
        .map(|s| s.kind == SegmentKind::Quantized)
        .collect();
    for i in 0..segments.len() {
        if strict[i] {
            continue;
        }
        // a break occupies one gap; its neighbours must be clean
        let isolated = (i == 0 || strict[i - 1]) && (i + 1 == strict.len() || strict[i + 1]);
        let (kl, kr) = bracket(&segments, i, degree);
        let s = segments[i].slope_over_2pi;
        let (l, r) = (&nodes[i], &nodes[i + 1]);
        if isolated && kl < kr && s >= T::lit(kl as f64) - slack && s <= T::lit(kr as f64) + slack {
            // intersect the two bracketing lines through the gap's end nodes
            let (fl, fr) = (T::lit(kl as f64), T::lit(kr as f64));
            let x = (r.value - l.value + T::two_pi() * (fl * l.eps - fr * r.eps))
                / (T::two_pi() * (fl - fr));
            segments[i].kind = SegmentKind::Kink;
            segments[i].breakpoint = Some(x.max(l.eps).min(r.eps));
        } else if segments[i].residual <= T::lit(tol.unresolved) {
            let (k, _) = nearest_admissible(s, degree);
            segments[i].kind = SegmentKind::Quantized;
            segments[i].acceleration = Some(k);
        }
    }

    let asymptote_onset = if params.a2 != T::zero() {
        let ln_a2 = params.a2.abs().ln();
        nodes
            .iter()
            .find(|n| {
                let line = T::lit(4.0) * T::PI() * n.eps + ln_a2;
                (n.value - line).abs() < T::lit(tol.asymptote) + T::lit(tol.sigma) * n.std_error
            })
            .map(|n| n.eps)
    } else {
        None
    };

    let mut profile = LeProfile {
        params,
        eps_grid: nodes.iter().map(|n| n.eps).collect(),
        le_values: nodes,
        segments,
        asymptote_onset,
        regime: Regime::Unresolved,
        tolerances,
    };
    profile.regime = classify_profile(&profile);
    profile
}

/// Shape label of a sampled profile.
pub fn classify_profile<T: Real>(profile: &LeProfile<T>) -> Regime {
    let tol = &profile.tolerances;
    if profile.segments.is_empty()
        || profile
            .segments
            .iter()
            .any(|s| s.kind == SegmentKind::Unresolved)
    {
        return Regime::Unresolved;
    }
    let le0 = profile.le0();
    if le0.value < T::lit(tol.sigma) * le0.std_error + T::lit(tol.zero_le) {
        return Regime::ZeroExponent;
    }

    let pattern = profile.acceleration_pattern();
    if pattern.windows(2).any(|w| w[0] > w[1]) {
        return Regime::Unresolved;
    }

    let intercept_tol = T::lit(tol.intercept);
    // every slope-2 piece lies on ℓ₂ and every slope-1 piece starting at 0 on ℓ₁
    let ln_a2 = profile.params.a2.abs().ln();
    for (s, node) in profile.segments.iter().zip(&profile.le_values) {
        if s.kind != SegmentKind::Quantized {
            continue;
        }
        let k = s.acceleration.unwrap_or(-1);
        if k == 2 {
            let intercept = node.value - T::lit(4.0) * T::PI() * node.eps;
            if (intercept - ln_a2).abs() > intercept_tol {
                return Regime::Unresolved;
            }
        }
    }
    if pattern.first() == Some(&1) {
        let first = profile
            .segments
            .iter()
            .zip(&profile.le_values)
            .find(|(s, _)| s.kind == SegmentKind::Quantized);
        if let Some((_, node)) = first {
            let intercept = node.value - T::two_pi() * node.eps;
            if (intercept - le0.value).abs() > intercept_tol {
                return Regime::Unresolved;
            }
        }
    }

    match pattern.as_slice() {
        [2] => Regime::W2,
        [1] | [1, 2] => Regime::W12,
        [0, 1] | [0, 1, 2] => Regime::W012,
        [0, 2] => Regime::W02,
        [0] => Regime::W0,
        _ => Regime::Unresolved,
    }
}

/// Spectrum membership read off the profile: zero exponent implies
/// membership, otherwise membership iff the acceleration at `0⁺` is positive.
pub fn spectrum_membership<T: Real>(profile: &LeProfile<T>) -> Membership {
    let le0 = profile.le0();
    let tol = &profile.tolerances;
    if le0.value < T::lit(tol.sigma) * le0.std_error + T::lit(tol.zero_le) {
        return Membership::ZeroLe;
    }
    match classify_profile(profile) {
        Regime::W2 | Regime::W12 => Membership::InSpectrum,
        Regime::W012 | Regime::W02 | Regime::W0 => Membership::NotInSpectrum,
        Regime::ZeroExponent => Membership::ZeroLe,
        Regime::Unresolved => Membership::Unresolved,
    }
}

/// Right difference quotient of `L^E` at `eps`, in units of 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AccelerationReport<T> {
    pub eps: T,
    pub h: T,
    pub raw: T,
    pub nearest: i64,
    pub residual: T,
    /// `residual < slope tolerance`; otherwise `h` straddles a break or the
    /// sampling is too coarse.
    pub quantized: bool,
}

/// `ε₀/16` when `ε₀` is defined, else `0.01`.
pub fn default_acceleration_step<T: Real>(p: &ModelParams<T>) -> T {
    epsilon0(p)
        .map(|e| e / T::lit(16.0))
        .unwrap_or_else(|_| T::lit(0.01))
}

pub fn acceleration_at<T: Real>(
    p: &ModelParams<T>,
    eps: T,
    h: T,
    sampling: &Sampling<T>,
    tol: &Tolerances,
) -> Result<AccelerationReport<T>> {
    if !(h > T::zero()) {
        return Err(LabError::InvalidParameter {
            name: "h",
            reason: format!("{h} must be positive"),
        });
    }
    if eps < T::zero() {
        return Err(LabError::InvalidParameter {
            name: "eps",
            reason: format!("{eps} must be nonnegative"),
        });
    }
    let l = le_estimate(p, eps, sampling);
    let r = le_estimate(p, eps + h, sampling);
    let raw = slope_over_2pi(&l, &r);
    let nearest = raw.round().to_i64().unwrap_or(i64::MAX);
    let residual = (raw - T::lit(nearest as f64)).abs();
    Ok(AccelerationReport {
        eps,
        h,
        raw,
        nearest,
        residual,
        quantized: residual < T::lit(tol.slope),
    })
}

/// `L^E(ε) − (4πε + ln|a2|)`, with the estimate behind it.
pub fn asymptote_residual<T: Real>(
    p: &ModelParams<T>,
    eps: T,
    sampling: &Sampling<T>,
) -> Result<(T, LeEstimate<T>)> {
    if p.a2 == T::zero() {
        return Err(LabError::VanishingA2);
    }
    let est = le_estimate(p, eps, sampling);
    let line = T::lit(4.0) * T::PI() * eps + p.a2.abs().ln();
    Ok((est.value - line, est))
}
