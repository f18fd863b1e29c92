use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{ModelParams, NormKind, OrbitKernel};
use crate::scalar::Real;
use crate::sum::CompensatedSum;

/// Orbit length, phase grid and norm for one finite-volume estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling<T> {
    pub n: usize,
    pub phases: usize,
    pub phase_offset: T,
    pub norm: NormKind,
}

impl<T: Real> Sampling<T> {
    pub fn new(n: usize, phases: usize) -> Self {
        Self {
            n: n.max(1),
            phases: phases.max(1),
            phase_offset: T::zero(),
            norm: NormKind::Operator,
        }
    }

    pub fn offset(self, phase_offset: T) -> Self {
        Self {
            phase_offset,
            ..self
        }
    }

    pub fn norm(self, norm: NormKind) -> Self {
        Self { norm, ..self }
    }

    pub fn phase(&self, k: usize) -> T {
        (self.phase_offset + T::count(k) / T::count(self.phases)).frac_mod1()
    }
}

/// Phase-averaged `(1/n) ln ‖A_n(x + iε)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeEstimate<T> {
    pub value: T,
    pub eps: T,
    pub orbit_length: usize,
    pub phase_count: usize,
    /// Sample standard deviation of the per-phase values over `√K`.
    pub std_error: T,
    pub norm: NormKind,
}

/// Finite-volume Lyapunov exponent at imaginary shift `eps`, averaged over
/// the phases `offset + k/K`.
///
/// Phases are evaluated in parallel and reduced in index order, so the
/// result does not depend on the worker count.
pub fn le_estimate<T: Real>(p: &ModelParams<T>, eps: T, sampling: &Sampling<T>) -> LeEstimate<T> {
    let kernel = OrbitKernel::new(p, eps);
    let n = sampling.n.max(1);
    let k = sampling.phases.max(1);
    let inv_n = T::count(n).recip();
    let values: Vec<T> = (0..k)
        .into_par_iter()
        .map(|i| kernel.log_norm(sampling.phase(i), n, sampling.norm) * inv_n)
        .collect();

    let mean = values.iter().copied().collect::<CompensatedSum<T>>().value() / T::count(k);
    let std_error = if k > 1 {
        let ss = values
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .collect::<CompensatedSum<T>>()
            .value();
        (ss / T::count(k - 1)).sqrt() / T::count(k).sqrt()
    } else {
        T::zero()
    };
    LeEstimate {
        value: mean,
        eps,
        orbit_length: n,
        phase_count: k,
        std_error,
        norm: sampling.norm,
    }
}
