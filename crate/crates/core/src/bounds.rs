//! Closed-form lower bounds for the Lyapunov exponent and the auxiliary
//! quantities of the argument behind them.
//!
//! All routines take `|a1|`, `|a2|`: the substitutions `x → x + 1/2` and
//! `E → −E` flip the coupling signs without changing `L^E`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::cocycle::ModelParams;
use crate::engine::LeEstimate;
use crate::error::{LabError, Result};
use crate::scalar::Real;
use crate::tolerances::Tolerances;

/// Smallest `|a1/a2|` for which `e^{4πε₀} = |a1/a2|^{1/2} ≥ 10`.
pub const MIN_RATIO: f64 = 100.0;

/// Constant in the ellipse separation estimate `dist ≥ (19/60)|a1| e^{4πε₀}`.
pub const SEPARATION_CONSTANT: f64 = 19.0 / 60.0;

/// `L^E ≥ ln|a2|`, or `ln|a1|` when `a2 = 0`. May be negative (vacuous).
pub fn herman_bound<T: Real>(p: &ModelParams<T>) -> Option<T> {
    if p.a2 != T::zero() {
        Some(p.a2.abs().ln())
    } else if p.a1 != T::zero() {
        Some(p.a1.abs().ln())
    } else {
        None
    }
}

/// Whether `|a1| > 1` and `0 < |a2| < |a1|/100`.
pub fn theorem_applies<T: Real>(p: &ModelParams<T>) -> bool {
    let (a1, a2) = (p.a1.abs(), p.a2.abs());
    a1 > T::one() && a2 > T::zero() && a2 < a1 / T::lit(MIN_RATIO)
}

/// `ln|a1| − 10 |a2/a1|^{1/2}` inside its hypotheses, `None` outside.
pub fn theorem_bound<T: Real>(p: &ModelParams<T>) -> Option<T> {
    theorem_applies(p).then(|| {
        let (a1, a2) = (p.a1.abs(), p.a2.abs());
        a1.ln() - T::lit(10.0) * (a2 / a1).sqrt()
    })
}

/// The working shift `ε₀ = ln|a1/a2| / (8π)`, i.e. `e^{4πε₀} = |a1/a2|^{1/2}`.
pub fn epsilon0<T: Real>(p: &ModelParams<T>) -> Result<T> {
    if p.a1 == T::zero() {
        return Err(LabError::VanishingA1);
    }
    if p.a2 == T::zero() {
        return Err(LabError::VanishingA2);
    }
    let ratio = p.a1.abs() / p.a2.abs();
    if ratio < T::lit(MIN_RATIO) {
        return Err(LabError::RatioTooSmall {
            ratio: ratio.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(ratio.ln() / (T::lit(8.0) * T::PI()))
}

/// The ellipse `x²/a_δ² + y²/b_δ² = 1` traced by
/// `a1 e^{−2πδ} e^{2πix} + a1 e^{2πδ} e^{−2πix}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EllipseSpec<T> {
    /// `a_δ = |a1| (e^{2πδ} + e^{−2πδ})`
    pub a_axis: T,
    /// `b_δ = |a1| (e^{2πδ} − e^{−2πδ})`
    pub b_axis: T,
    pub delta: T,
}

impl<T: Real> EllipseSpec<T> {
    pub fn new(a1: T, delta: T) -> Result<Self> {
        if a1 == T::zero() {
            return Err(LabError::VanishingA1);
        }
        if !(delta.is_finite() && delta >= T::zero()) {
            return Err(LabError::InvalidParameter {
                name: "delta",
                reason: format!("{delta} must be finite and nonnegative"),
            });
        }
        let a1 = a1.abs();
        let t = T::two_pi() * delta;
        let two = T::lit(2.0);
        Ok(Self {
            a_axis: two * a1 * t.cosh(),
            b_axis: two * a1 * t.sinh(),
            delta,
        })
    }

    /// `a_δ² − b_δ² = 4a1²`, computed without cancellation.
    pub fn focal_sqr(&self) -> T {
        let a1 = self.a_axis / (T::lit(2.0) * (T::two_pi() * self.delta).cosh());
        T::lit(4.0) * a1 * a1
    }

    /// `|E|` above which the nearest point is the vertex `(±a_δ, 0)`.
    pub fn vertex_threshold(&self) -> T {
        self.focal_sqr() / self.a_axis
    }

    /// Distance from `(E, 0)` to the ellipse.
    pub fn distance_from_axis_point(&self, energy: T) -> T {
        let e = energy.abs();
        let c2 = self.focal_sqr();
        if e > self.vertex_threshold() {
            (e - self.a_axis).abs()
        } else {
            let q = (T::one() - e * e / c2).max(T::zero());
            self.b_axis * q.sqrt()
        }
    }
}

/// `inf_x |E − a1 e^{−2πδ} e^{2πix} − a1 e^{2πδ} e^{−2πix}|`, the distance
/// from `(E, 0)` to the ellipse `S_δ`.
pub fn ellipse_distance<T: Real>(p: &ModelParams<T>, delta: T) -> Result<T> {
    Ok(EllipseSpec::new(p.a1, delta)?.distance_from_axis_point(p.energy))
}

/// Which of the two shifts `ε₀`, `2ε₀` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shift {
    #[serde(rename = "eps0")]
    Single,
    #[serde(rename = "2eps0")]
    Double,
}

impl Shift {
    pub fn delta<T: Real>(self, eps0: T) -> T {
        match self {
            Shift::Single => eps0,
            Shift::Double => eps0 + eps0,
        }
    }
}

/// The three energy ranges of the separation argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationCase {
    /// `|E| ≥ (a_{ε₀} + a_{2ε₀})/2`: vertex of `S_{ε₀}`.
    OuterVertex,
    /// `4a1²/a_{2ε₀} ≤ |E| < (a_{ε₀} + a_{2ε₀})/2`: vertex of `S_{2ε₀}`.
    InnerVertex,
    /// `|E| < 4a1²/a_{2ε₀}`: interior nearest point on `S_{2ε₀}`.
    Interior,
}

impl SeparationCase {
    pub fn shift(self) -> Shift {
        match self {
            SeparationCase::OuterVertex => Shift::Single,
            _ => Shift::Double,
        }
    }
}

/// Winner of `sup_{δ ∈ {ε₀, 2ε₀}} dist(E, S_δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShiftChoice<T> {
    pub shift: Shift,
    pub delta: T,
    pub distance: T,
    pub epsilon0: T,
    /// `(19/60)|a1| e^{4πε₀}`.
    pub floor: T,
    pub case: SeparationCase,
}

impl<T: Real> ShiftChoice<T> {
    pub fn margin(&self) -> T {
        self.distance - self.floor
    }
}

/// Energy range of `E` in the separation argument.
pub fn separation_case<T: Real>(p: &ModelParams<T>) -> Result<SeparationCase> {
    let eps0 = epsilon0(p)?;
    let near = EllipseSpec::new(p.a1, eps0)?;
    let far = EllipseSpec::new(p.a1, eps0 + eps0)?;
    let e = p.energy.abs();
    Ok(if e >= (near.a_axis + far.a_axis) / T::lit(2.0) {
        SeparationCase::OuterVertex
    } else if e >= far.vertex_threshold() {
        SeparationCase::InnerVertex
    } else {
        SeparationCase::Interior
    })
}

/// Evaluates the ellipse distance at `ε₀` and `2ε₀` and keeps the larger.
///
/// Requires `|a1/a2| ≥ 100`, equivalently `e^{4πε₀} ≥ 10`.
pub fn best_ellipse_shift<T: Real>(p: &ModelParams<T>) -> Result<ShiftChoice<T>> {
    let eps0 = epsilon0(p)?;
    let d1 = ellipse_distance(p, eps0)?;
    let d2 = ellipse_distance(p, eps0 + eps0)?;
    let (shift, distance) = if d1 >= d2 {
        (Shift::Single, d1)
    } else {
        (Shift::Double, d2)
    };
    let growth = (T::lit(4.0) * T::PI() * eps0).exp();
    Ok(ShiftChoice {
        shift,
        delta: shift.delta(eps0),
        distance,
        epsilon0: eps0,
        floor: T::lit(SEPARATION_CONSTANT) * p.a1.abs() * growth,
        case: separation_case(p)?,
    })
}

/// Lower bound for `inf_x |E − V(x + iδ)|`: the ellipse distance minus the
/// largest possible size `|a2|(e^{4πδ} + e^{−4πδ})` of the second harmonic.
pub fn potential_floor<T: Real>(p: &ModelParams<T>, delta: T) -> Result<T> {
    let t = T::lit(4.0) * T::PI() * delta;
    Ok(ellipse_distance(p, delta)? - p.a2.abs() * (t.exp() + (-t).exp()))
}

/// Roots of `a1 e^{−2πδ} z² − E z + a1 e^{2πδ}`, the polynomial whose
/// restriction to `|z| = 1` is `z · (E − a1 e^{2πδ} z̄ − a1 e^{−2πδ} z)` up to sign.
pub fn first_harmonic_roots<T: Real>(p: &ModelParams<T>, delta: T) -> Result<[Complex<T>; 2]> {
    if p.a1 == T::zero() {
        return Err(LabError::VanishingA1);
    }
    let t = T::two_pi() * delta;
    let a = Complex::new(p.a1 * (-t).exp(), T::zero());
    let b = Complex::new(-p.energy, T::zero());
    let c = Complex::new(p.a1 * t.exp(), T::zero());
    let disc = (b * b - a * c * T::lit(4.0)).sqrt();
    // pick the sign that avoids cancellation in b ± √disc
    let s = if (b.conj() * disc).re >= T::zero() {
        b + disc
    } else {
        b - disc
    };
    let q = -s / T::lit(2.0);
    Ok([q / a, c / q])
}

/// `∫₀¹ ln|E − a1 e^{2πδ} e^{−2πix} − a1 e^{−2πδ} e^{2πix}| dx` by Jensen's
/// formula: `ln|a1 e^{−2πδ}| + Σ_roots ln max(1, |z|)`.
///
/// Always `≥ 2πδ + ln|a1|`, with equality when both roots have modulus `e^{2πδ}`.
pub fn jensen_integral<T: Real>(p: &ModelParams<T>, delta: T) -> Result<T> {
    let roots = first_harmonic_roots(p, delta)?;
    let t = T::two_pi() * delta;
    debug_assert!({
        let prod = roots[0].norm() * roots[1].norm();
        let expect = (t + t).exp();
        (prod - expect).abs() <= T::lit(1e-9) * expect
    });
    let lead = p.a1.abs().ln() - t;
    Ok(roots
        .iter()
        .fold(lead, |acc, z| acc + z.norm().max(T::one()).ln()))
}

/// `ln(1 − (60/19)(|a2|e^{4πδ} + |a2|e^{−4πδ} + 1) / (|a1| e^{4πε₀}))`, the
/// floor for the correction term left after splitting off the first harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorrectionBound<T> {
    pub value: T,
    /// `−10 |a2/a1|^{1/2}`.
    pub claimed: T,
}

impl<T: Real> CorrectionBound<T> {
    pub fn holds(&self) -> bool {
        self.value >= self.claimed - T::lit(1e-9)
    }
}

pub fn correction_bound<T: Real>(p: &ModelParams<T>, delta: T) -> Result<CorrectionBound<T>> {
    if !theorem_applies(p) {
        return Err(LabError::InvalidParameter {
            name: "a1, a2",
            reason: "need |a1| > 1 and 0 < |a2| < |a1|/100".into(),
        });
    }
    let (a1, a2) = (p.a1.abs(), p.a2.abs());
    let growth = (a1 / a2).sqrt();
    let t = T::lit(4.0) * T::PI() * delta;
    let arg = T::one()
        - T::lit(SEPARATION_CONSTANT).recip() * (a2 * t.exp() + a2 * (-t).exp() + T::one())
            / (a1 * growth);
    if !(arg > T::zero()) {
        return Err(LabError::NonpositiveLogArgument(arg.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(CorrectionBound {
        value: arg.ln(),
        claimed: -T::lit(10.0) * (a2 / a1).sqrt(),
    })
}

/// Numbers behind ruling out that `(δ, L^E(δ))` lies on `ℓ₂`.
///
/// On `ℓ₂` at `δ = ε₀` one would need `(40/3)√r ≥ ln(1/r)`, at `δ = 2ε₀`
/// `20√r ≥ ln(1/r)`, with `r = |a2/a1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExclusionVerdict<T> {
    pub log_ratio: T,
    pub single_shift_lhs: T,
    pub double_shift_lhs: T,
    /// `ln|a1/a2| − (40/3)√r`.
    pub single_shift_margin: T,
    /// `ln|a1/a2| − 20√r`.
    pub double_shift_margin: T,
}

impl<T: Real> ExclusionVerdict<T> {
    pub fn excluded(&self) -> bool {
        self.single_shift_margin > T::zero() && self.double_shift_margin > T::zero()
    }
}

pub fn line_exclusion<T: Real>(p: &ModelParams<T>) -> Result<ExclusionVerdict<T>> {
    if p.a1 == T::zero() {
        return Err(LabError::VanishingA1);
    }
    if p.a2 == T::zero() {
        return Err(LabError::VanishingA2);
    }
    let r = p.a2.abs() / p.a1.abs();
    let log_ratio = -r.ln();
    let single = T::lit(40.0 / 3.0) * r.sqrt();
    let double = T::lit(20.0) * r.sqrt();
    Ok(ExclusionVerdict {
        log_ratio,
        single_shift_lhs: single,
        double_shift_lhs: double,
        single_shift_margin: log_ratio - single,
        double_shift_margin: log_ratio - double,
    })
}

/// Every applicable bound at one parameter point, optionally against a measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport<T> {
    pub params: ModelParams<T>,
    pub herman_bound: Option<T>,
    pub theorem_bound: Option<T>,
    pub epsilon0: Option<T>,
    pub chosen_delta: Option<T>,
    pub chosen_shift: Option<Shift>,
    pub separation_distance: Option<T>,
    #[serde(rename = "measuredLE")]
    pub measured_le: Option<T>,
    pub std_error: Option<T>,
    pub margins: Margins<T>,
    /// `None` without a measurement.
    pub satisfied: Option<bool>,
}

/// Measured exponent minus each bound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Margins<T> {
    pub herman: Option<T>,
    pub theorem: Option<T>,
}

impl<T: Real> BoundReport<T> {
    pub fn new(p: &ModelParams<T>, measured: Option<&LeEstimate<T>>, tol: &Tolerances) -> Self {
        let herman = herman_bound(p);
        let theorem = theorem_bound(p);
        let eps0 = epsilon0(p).ok();
        let choice = best_ellipse_shift(p).ok();
        let margins = Margins {
            herman: measured.and_then(|m| herman.map(|b| m.value - b)),
            theorem: measured.and_then(|m| theorem.map(|b| m.value - b)),
        };
        let satisfied = measured.map(|m| {
            let slack = T::lit(tol.sigma) * m.std_error + T::lit(tol.bound_slack);
            [margins.herman, margins.theorem]
                .into_iter()
                .flatten()
                .all(|margin| margin + slack >= T::zero())
        });
        Self {
            params: *p,
            herman_bound: herman,
            theorem_bound: theorem,
            epsilon0: eps0,
            chosen_delta: choice.map(|c| c.delta),
            chosen_shift: choice.map(|c| c.shift),
            separation_distance: choice.map(|c| c.distance),
            measured_le: measured.map(|m| m.value),
            std_error: measured.map(|m| m.std_error),
            margins,
            satisfied,
        }
    }
}
