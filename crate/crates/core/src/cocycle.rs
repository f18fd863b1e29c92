//! The two-harmonic Schrödinger cocycle and overflow-free products of its
//! transfer matrices.
//!
//! The operator is
//! `(Hu)_n = u_{n+1} + u_{n-1} + (2 a1 cos 2π(x+nα) + 2 a2 cos 4π(x+nα)) u_n`
//! and the one-step transfer matrix at the complex phase `x + iε` is
//! `[[E − V(x+iε), −1], [1, 0]]`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::scalar::Real;
use crate::sum::CompensatedSum;

/// Parameters `(a1, a2, E, α)` of the generalized Harper cocycle.
///
/// Signs of the couplings are kept as given; bound computations take
/// absolute values themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub a1: T,
    pub a2: T,
    #[serde(rename = "E")]
    pub energy: T,
    pub alpha: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(a1: T, a2: T, energy: T, alpha: T) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("E", energy), ("alpha", alpha)] {
            if !v.is_finite() {
                return Err(LabError::InvalidParameter {
                    name,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(LabError::InvalidParameter {
                name: "alpha",
                reason: format!("{alpha} is outside (0, 1)"),
            });
        }
        Ok(Self {
            a1,
            a2,
            energy,
            alpha,
        })
    }

    /// Same couplings and frequency, golden-mean default.
    pub fn golden(a1: T, a2: T, energy: T) -> Result<Self> {
        Self::new(a1, a2, energy, crate::scalar::golden_mean())
    }

    pub fn with_energy(self, energy: T) -> Self {
        Self { energy, ..self }
    }

    /// Highest harmonic actually present; bounds the acceleration.
    pub fn degree(&self) -> i64 {
        if self.a2 != T::zero() {
            2
        } else if self.a1 != T::zero() {
            1
        } else {
            0
        }
    }
}

/// A point `x + iε` of the complexified torus, `x` reduced mod 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<T> {
    pub x: T,
    pub eps: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(x: T, eps: T) -> Self {
        Self {
            x: x.frac_mod1(),
            eps,
        }
    }

    pub fn real(x: T) -> Self {
        Self::new(x, T::zero())
    }
}

/// A 2×2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> TransferMatrix<T> {
    pub fn new(m11: Complex<T>, m12: Complex<T>, m21: Complex<T>, m22: Complex<T>) -> Self {
        Self {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn from_real(m11: T, m12: T, m21: T, m22: T) -> Self {
        let c = |v: T| Complex::new(v, T::zero());
        Self::new(c(m11), c(m12), c(m21), c(m22))
    }

    pub fn identity() -> Self {
        Self::from_real(T::one(), T::zero(), T::zero(), T::one())
    }

    /// The Schrödinger block `[[v, −1], [1, 0]]`.
    pub fn schrodinger(v: Complex<T>) -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self::new(v, -one, one, Complex::new(T::zero(), T::zero()))
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn frobenius_sqr(&self) -> T {
        self.m.iter().flatten().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_sqr().sqrt()
    }

    /// Singular values `(σ_max, σ_min)`.
    pub fn singular_values(&self) -> (T, T) {
        singular_values_from(self.frobenius_sqr(), self.det().norm())
    }

    pub fn operator_norm(&self) -> T {
        self.singular_values().0
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for z in out.m.iter_mut().flatten() {
            *z = z.scale(s);
        }
        out
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.m.iter().flatten().all(|z| z.im.abs() <= tol)
    }
}

impl<T: Real> Mul for TransferMatrix<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// `σ_max, σ_min` of a 2×2 matrix from `‖M‖_F²` and `|det M|`.
pub(crate) fn singular_values_from<T: Real>(frob_sqr: T, det_abs: T) -> (T, T) {
    let two = T::lit(2.0);
    let gap = ((frob_sqr - two * det_abs).max(T::zero()) * (frob_sqr + two * det_abs)).sqrt();
    let smax = ((frob_sqr + gap) / two).sqrt();
    let smin = if smax > T::zero() {
        det_abs / smax
    } else {
        T::zero()
    };
    (smax, smin)
}

/// Fourier coefficients of `E − V(x + iε)` folded into cosh/sinh form:
///
/// `E − V = E − c1·cos θ − c2·cos 2θ + i(s1·sin θ + s2·sin 2θ)`, θ = 2πx,
/// with `c_k = 2 a_k cosh(2πkε)` and `s_k = 2 a_k sinh(2πkε)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ShiftedPotential<T> {
    energy: T,
    c1: T,
    s1: T,
    c2: T,
    s2: T,
}

impl<T: Real> ShiftedPotential<T> {
    pub(crate) fn new(p: &ModelParams<T>, eps: T) -> Self {
        let two = T::lit(2.0);
        let t1 = T::two_pi() * eps;
        let t2 = two * t1;
        Self {
            energy: p.energy,
            c1: two * p.a1 * t1.cosh(),
            s1: two * p.a1 * t1.sinh(),
            c2: two * p.a2 * t2.cosh(),
            s2: two * p.a2 * t2.sinh(),
        }
    }

    pub(crate) fn is_real(&self) -> bool {
        self.s1 == T::zero() && self.s2 == T::zero()
    }

    /// Value at the phase whose `(cos 2πx, sin 2πx)` is `(c, s)`.
    #[inline(always)]
    pub(crate) fn eval(&self, c: T, s: T) -> (T, T) {
        let cos2 = c * c - s * s;
        let sin2 = (c + c) * s;
        (
            self.energy - self.c1 * c - self.c2 * cos2,
            self.s1 * s + self.s2 * sin2,
        )
    }
}

/// Diagonal entry `E − 2a1 cos 2π(x+iε) − 2a2 cos 4π(x+iε)` of the transfer matrix.
pub fn potential_value<T: Real>(p: &ModelParams<T>, z: &PhasePoint<T>) -> Complex<T> {
    let (s, c) = (T::two_pi() * z.x).sin_cos();
    let (re, im) = ShiftedPotential::new(p, z.eps).eval(c, s);
    Complex::new(re, im)
}

/// One-step transfer matrix `A(x + iε)`.
pub fn transfer_matrix<T: Real>(p: &ModelParams<T>, z: &PhasePoint<T>) -> TransferMatrix<T> {
    TransferMatrix::schrodinger(potential_value(p, z))
}

/// Norm used when turning a product into a single log-norm number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Largest singular value. Exactly 1 on rotations, `≥ 1` on SL(2).
    #[default]
    Operator,
    Frobenius,
}

/// `A_n = ‖A_n‖_F · direction` with the scale kept as a logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledProduct<T> {
    /// `ln ‖A_n‖_F`.
    pub log_norm: T,
    /// `A_n / ‖A_n‖_F`.
    pub direction: TransferMatrix<T>,
    pub steps: usize,
}

impl<T: Real> RescaledProduct<T> {
    pub fn log_frobenius(&self) -> T {
        self.log_norm + self.direction.frobenius_norm().ln()
    }

    pub fn log_operator_norm(&self) -> T {
        self.log_norm + self.direction.operator_norm().ln()
    }

    pub fn log_norm_of(&self, kind: NormKind) -> T {
        match kind {
            NormKind::Operator => self.log_operator_norm(),
            NormKind::Frobenius => self.log_frobenius(),
        }
    }

    /// Reconstructs the product itself; overflows for long products.
    pub fn to_matrix(&self) -> TransferMatrix<T> {
        self.direction.scale(self.log_norm.exp())
    }
}

/// Entry type of the product kernel: plain reals on the real torus,
/// complex numbers off it.
trait Entry<T: Real>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    const IS_COMPLEX: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_parts(re: T, im: T) -> Self;
    fn norm_sqr(self) -> T;
    fn scale(self, s: T) -> Self;
    fn into_complex(self) -> Complex<T>;
}

impl<T: Real> Entry<T> for T {
    const IS_COMPLEX: bool = false;
    fn zero() -> Self {
        T::zero()
    }
    fn one() -> Self {
        T::one()
    }
    #[inline(always)]
    fn from_parts(re: T, _im: T) -> Self {
        re
    }
    #[inline(always)]
    fn norm_sqr(self) -> T {
        self * self
    }
    #[inline(always)]
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn into_complex(self) -> Complex<T> {
        Complex::new(self, T::zero())
    }
}

impl<T: Real> Entry<T> for Complex<T> {
    const IS_COMPLEX: bool = true;
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn one() -> Self {
        Complex::new(T::one(), T::zero())
    }
    #[inline(always)]
    fn from_parts(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
    #[inline(always)]
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    #[inline(always)]
    fn scale(self, s: T) -> Self {
        Complex::scale(&self, s)
    }
    fn into_complex(self) -> Complex<T> {
        self
    }
}

/// Steps between exact recomputations of `(cos 2πx_j, sin 2πx_j)`; in
/// between, the phasor is advanced by a fixed rotation.
const RESYNC: usize = 64;

/// Orbit product along `x_j = x0 + jα`, shared by every caller that needs
/// `ln ‖A_n(x + iε)‖`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OrbitKernel<T> {
    potential: ShiftedPotential<T>,
    alpha: T,
    rot_c: T,
    rot_s: T,
}

impl<T: Real> OrbitKernel<T> {
    pub(crate) fn new(p: &ModelParams<T>, eps: T) -> Self {
        let (rot_s, rot_c) = (T::two_pi() * p.alpha).sin_cos();
        Self {
            potential: ShiftedPotential::new(p, eps),
            alpha: p.alpha,
            rot_c,
            rot_s,
        }
    }

    pub(crate) fn product(&self, x0: T, n: usize) -> RescaledProduct<T> {
        if self.potential.is_real() {
            self.run::<T>(x0, n)
        } else {
            self.run::<Complex<T>>(x0, n)
        }
    }

    pub(crate) fn log_norm(&self, x0: T, n: usize, kind: NormKind) -> T {
        self.product(x0, n).log_norm_of(kind)
    }

    fn run<E: Entry<T>>(&self, x0: T, n: usize) -> RescaledProduct<T> {
        // rows of the running product; A(x) only mixes rows, so A·M is
        // (v·row1 − row2, row1)
        let mut r1 = [E::one(), E::zero()];
        let mut r2 = [E::zero(), E::one()];
        let mut log_scale = CompensatedSum::new();
        let hi = T::max_value().sqrt();
        let lo = T::min_positive_value().sqrt();

        let mut x = x0.frac_mod1();
        let mut done = 0;
        while done < n {
            let (mut s, mut c) = (T::two_pi() * x).sin_cos();
            let chunk = RESYNC.min(n - done);
            for _ in 0..chunk {
                let (re, im) = self.potential.eval(c, s);
                let v = E::from_parts(re, im);
                let n1 = [v * r1[0] - r2[0], v * r1[1] - r2[1]];
                r2 = r1;
                r1 = n1;
                let f2 = r1[0].norm_sqr() + r1[1].norm_sqr() + r2[0].norm_sqr() + r2[1].norm_sqr();
                if f2 > hi || f2 < lo {
                    let f = f2.sqrt();
                    let inv = f.recip();
                    r1 = [r1[0].scale(inv), r1[1].scale(inv)];
                    r2 = [r2[0].scale(inv), r2[1].scale(inv)];
                    log_scale.add(f.ln());
                }
                let c_next = c * self.rot_c - s * self.rot_s;
                s = s * self.rot_c + c * self.rot_s;
                c = c_next;
                x += self.alpha;
                if x >= T::one() {
                    x -= T::one();
                }
            }
            done += chunk;
        }

        let f = (r1[0].norm_sqr() + r1[1].norm_sqr() + r2[0].norm_sqr() + r2[1].norm_sqr()).sqrt();
        log_scale.add(f.ln());
        let inv = f.recip();
        let direction = TransferMatrix::new(
            r1[0].scale(inv).into_complex(),
            r1[1].scale(inv).into_complex(),
            r2[0].scale(inv).into_complex(),
            r2[1].scale(inv).into_complex(),
        );
        debug_assert!(E::IS_COMPLEX || direction.is_real(T::zero()));
        RescaledProduct {
            log_norm: log_scale.value(),
            direction,
            steps: n,
        }
    }
}

/// Rescaled representation of `A_n(x+iε) = A(x+iε+(n−1)α) ··· A(x+iε)`.
///
/// `n = 0` yields the identity with `log_norm = ln √2`, so that the
/// direction keeps unit Frobenius norm.
pub fn product_log_norm<T: Real>(p: &ModelParams<T>, z: &PhasePoint<T>, n: usize) -> RescaledProduct<T> {
    if n == 0 {
        let id = TransferMatrix::<T>::identity();
        let f = id.frobenius_norm();
        return RescaledProduct {
            log_norm: f.ln(),
            direction: id.scale(f.recip()),
            steps: 0,
        };
    }
    OrbitKernel::new(p, z.eps).product(z.x, n)
}

/// `ln ∏ (|v_j| − 1)`, the logarithmic floor for `‖∏ [[v_j, −1], [1, 0]]‖`
/// valid when every `|v_j| > 2`.
pub fn log_product_norm_floor<T: Real>(vs: &[T]) -> Result<T> {
    let two = T::lit(2.0);
    let mut acc = CompensatedSum::new();
    for (index, v) in vs.iter().enumerate() {
        if !(v.abs() > two) {
            return Err(LabError::FactorTooSmall {
                index,
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        acc.add((v.abs() - T::one()).ln());
    }
    Ok(acc.value())
}

/// `∏ (|v_j| − 1)`.
pub fn product_norm_floor<T: Real>(vs: &[T]) -> Result<T> {
    log_product_norm_floor(vs).map(T::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(a1: f64, a2: f64, e: f64) -> ModelParams<f64> {
        ModelParams::golden(a1, a2, e).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Plain left-multiplied product, no rescaling.
    fn direct_product(p: &ModelParams<f64>, z: &PhasePoint<f64>, n: usize) -> TransferMatrix<f64> {
        let mut m = TransferMatrix::identity();
        for j in 0..n {
            let zj = PhasePoint::new(z.x + j as f64 * p.alpha, z.eps);
            m = transfer_matrix(p, &zj) * m;
        }
        m
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 0.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::INFINITY, 0.5).is_err());
    }

    #[test]
    fn phase_point_reduces_mod_one() {
        let z = PhasePoint::new(2.75, 0.1);
        assert_eq!(z.x, 0.75);
        assert_eq!(PhasePoint::<f64>::real(-0.25).x, 0.75);
    }

    #[test]
    fn potential_examples() {
        let v = potential_value(&params(1.0, 0.0, 0.0), &PhasePoint::real(0.0));
        assert!(close(v.re, -2.0, 1e-15) && v.im == 0.0);

        let v = potential_value(&params(1.0, 1.0, 0.0), &PhasePoint::real(0.25));
        assert!(close(v.re, 2.0, 1e-12) && close(v.im, 0.0, 1e-12));

        for eps in [0.0, 0.1, -0.3, 1.2] {
            let v = potential_value(&params(1.0, 0.0, 0.0), &PhasePoint::new(0.0, eps));
            let expect = -2.0 * (std::f64::consts::TAU * eps).cosh();
            assert!(close(v.re, expect, 1e-12 * expect.abs()), "eps={eps}");
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn potential_matches_exponential_form() {
        let p = params(1.3, -0.7, 0.4);
        let tau = std::f64::consts::TAU;
        for (x, eps) in [(0.1, 0.2), (0.77, -0.05), (0.5, 0.6)] {
            let v = potential_value(&p, &PhasePoint::new(x, eps));
            let w = Complex::from_polar(1.0, tau * x);
            let e1 = (tau * eps).exp();
            let e2 = (2.0 * tau * eps).exp();
            let expect = Complex::new(p.energy, 0.0)
                - w.conj() * (p.a1 * e1)
                - w * (p.a1 / e1)
                - (w.conj() * w.conj()) * (p.a2 * e2)
                - (w * w) * (p.a2 / e2);
            assert!((v - expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn transfer_matrix_examples() {
        let m = transfer_matrix(&params(1.0, 0.0, 0.0), &PhasePoint::real(0.0));
        assert_eq!(m, TransferMatrix::from_real(-2.0, -1.0, 1.0, 0.0));
        let m = transfer_matrix(&params(0.0, 0.0, 3.0), &PhasePoint::real(0.37));
        assert_eq!(m, TransferMatrix::from_real(3.0, -1.0, 1.0, 0.0));
    }

    #[test]
    fn unit_determinant_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let p = ModelParams::new(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-30.0..30.0),
                rng.gen_range(0.01..0.99),
            )
            .unwrap();
            let z = PhasePoint::new(rng.gen_range(0.0..1.0), rng.gen_range(-2.0..2.0));
            let det = transfer_matrix(&p, &z).det();
            assert!((det - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_step_product() {
        let p = params(1.2, 0.3, -0.4);
        let z = PhasePoint::new(0.3, 0.15);
        let r = product_log_norm(&p, &z, 1);
        let direct = transfer_matrix(&p, &z).frobenius_norm().ln();
        assert!(close(r.log_norm, direct, 1e-13));
        assert_eq!(r.steps, 1);
    }

    #[test]
    fn rotation_product_has_constant_norm() {
        let p = params(0.0, 0.0, 0.0);
        let r = product_log_norm(&p, &PhasePoint::real(0.123), 4);
        assert!(close(r.log_norm, 2f64.sqrt().ln(), 1e-15));
        assert!(close(r.log_operator_norm(), 0.0, 1e-15));
        let id = r.to_matrix();
        assert!((id.m[0][0].re - 1.0).abs() < 1e-14 && id.m[0][1].norm() < 1e-14);
    }

    #[test]
    fn empty_product_is_identity() {
        let r = product_log_norm(&params(1.0, 1.0, 1.0), &PhasePoint::real(0.0), 0);
        assert_eq!(r.steps, 0);
        assert!(close(r.log_frobenius(), 2f64.sqrt().ln(), 1e-15));
        assert!(close(r.log_operator_norm(), 0.0, 1e-15));
    }

    #[test]
    fn constant_cocycle_growth() {
        // ln‖[[3,−1],[1,0]]^10‖_F / 10, from exact integer matrix power
        let r = product_log_norm(&params(0.0, 0.0, 3.0), &PhasePoint::real(0.0), 10);
        assert!(close(r.log_norm / 10.0, 0.991_812_983_170_084_9, 1e-12));
        let target = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let r = product_log_norm(&params(0.0, 0.0, 3.0), &PhasePoint::real(0.0), 1000);
        assert!((r.log_norm / 1000.0 - target).abs() < 1e-3);
    }

    #[test]
    fn rescaled_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = params(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-6.0..6.0));
            let z = PhasePoint::real(rng.gen_range(0.0..1.0));
            let n = rng.gen_range(1..=30);
            let r = product_log_norm(&p, &z, n);
            let direct = direct_product(&p, &z, n);
            assert!(direct.is_real(0.0));
            assert!(r.direction.is_real(0.0));
            assert!(close(r.log_norm, direct.frobenius_norm().ln(), 1e-9));
            assert!((r.direction.frobenius_norm() - 1.0).abs() < 1e-12);
            assert!(close(r.log_operator_norm(), direct.operator_norm().ln(), 1e-9));
        }
    }

    #[test]
    fn complex_rescaled_matches_direct_product() {
        let p = params(1.5, 0.4, 0.7);
        let z = PhasePoint::new(0.31, 0.2);
        for n in [1, 5, 17, 30] {
            let r = product_log_norm(&p, &z, n);
            let direct = direct_product(&p, &z, n);
            assert!(close(r.log_norm, direct.frobenius_norm().ln(), 1e-9), "n={n}");
            assert!((r.direction.det().norm() - (-2.0 * r.log_norm).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn long_products_do_not_overflow() {
        // one-step growth ~ e^{4πε}·a2 ≈ 1e9
        let p = params(1.0, 2.0, 0.0);
        let r = product_log_norm(&p, &PhasePoint::new(0.1, 1.6), 100_000);
        assert!(r.log_norm.is_finite());
        let per_step = r.log_norm / 1e5;
        let asym = 4.0 * std::f64::consts::PI * 1.6 + 2f64.ln();
        assert!((per_step - asym).abs() < 1e-3, "{per_step} vs {asym}");
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = TransferMatrix::from_real(3.0, 0.0, 0.0, 0.5);
        let (smax, smin) = m.singular_values();
        assert!(close(smax, 3.0, 1e-14) && close(smin, 0.5, 1e-14));
    }

    #[test]
    fn product_floor_examples() {
        assert!(close(product_norm_floor(&[3.0]).unwrap(), 2.0, 1e-14));
        assert!(close(product_norm_floor(&[3.0, 3.0]).unwrap(), 4.0, 1e-14));
        assert!(close(product_norm_floor(&[2.5, 4.0, 10.0]).unwrap(), 40.5, 1e-12));
        assert!(close(product_norm_floor(&[-2.5, 4.0, -10.0]).unwrap(), 40.5, 1e-12));
        let m = TransferMatrix::from_real(3.0, -1.0, 1.0, 0.0);
        assert_eq!(m * m, TransferMatrix::from_real(8.0, -3.0, 3.0, -1.0));
        assert!(m.operator_norm() >= 2.0);
    }

    #[test]
    fn product_floor_rejects_small_factor() {
        assert_eq!(
            product_norm_floor(&[3.0, 2.0, 5.0]),
            Err(LabError::FactorTooSmall { index: 1, value: 2.0 })
        );
        assert!(product_norm_floor(&[-1.5]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let p = ModelParams::<f32>::golden(0.0, 0.0, 3.0).unwrap();
        let r = product_log_norm(&p, &PhasePoint::real(0.0), 1000);
        let target = ((3.0f32 + 5f32.sqrt()) / 2.0).ln();
        assert!((r.log_norm / 1000.0 - target).abs() < 2e-3);
    }

    proptest! {
        #[test]
        fn submultiplicative(
            a1 in -5.0f64..5.0, a2 in -5.0f64..5.0, e in -8.0f64..8.0,
            x in 0.0f64..1.0, eps in -0.5f64..0.5, m in 1usize..=16, n in 1usize..=16,
        ) {
            let p = params(a1, a2, e);
            let whole = product_log_norm(&p, &PhasePoint::new(x, eps), m + n).log_operator_norm();
            let first = product_log_norm(&p, &PhasePoint::new(x, eps), n).log_operator_norm();
            let second = product_log_norm(&p, &PhasePoint::new(x + n as f64 * p.alpha, eps), m)
                .log_operator_norm();
            prop_assert!(whole <= first + second + 1e-9);
        }

        #[test]
        fn product_floor_holds(vs in proptest::collection::vec((2.0001f64..50.0, any::<bool>()), 1..20)) {
            let vs: Vec<f64> = vs.into_iter().map(|(v, neg)| if neg { -v } else { v }).collect();
            let mut m = TransferMatrix::identity();
            for &v in &vs {
                m = TransferMatrix::schrodinger(Complex::new(v, 0.0)) * m;
            }
            let floor = log_product_norm_floor(&vs).unwrap();
            prop_assert!(m.operator_norm().ln() >= floor - 1e-12);
        }
    }
}
