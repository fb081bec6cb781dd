//! Monte Carlo estimate of the classical decoherence factor.
//!
//! With `H_s = 0` the mean position is frozen and each bath mode follows
//!
//! ```text
//! q(t) = C f(Qbar) / (m w^2) [cos(w t) - 1] + q(0) cos(w t) + p(0) / (m w) sin(w t)
//! ```
//!
//! Along a trajectory the Fourier-transformed distribution picks up the phase
//! `-(i / hbar) dQ f'(Qbar) sum_k C_k int_0^t q_k`. Averaging that phase over
//! initial conditions drawn from the thermal Wigner distribution of the bath
//! gives the factor. The time integral is done in closed form per mode.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::model::CouplingFunction;
use crate::sum::ComplexSum;

pub const MIN_SAMPLES: usize = 1000;
pub const JACKKNIFE_BLOCKS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: Complex64,
    /// Jackknife standard error of the complex mean (root of the summed
    /// real and imaginary variances).
    pub std_error: f64,
    pub n_samples: usize,
}

impl McEstimate {
    /// `|mean - reference|` in units of the standard error. Zero when both
    /// the difference and the error vanish.
    pub fn sigma_distance(&self, reference: Complex64) -> f64 {
        let diff = (self.mean - reference).norm();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

/// Per-mode coefficients of `int_0^t q(s) ds = drift + a q(0) + b p(0)`.
struct ModeIntegral {
    coupling: f64,
    drift: f64,
    a: f64,
    b: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn mc_classical_factor(
    q1: f64,
    q2: f64,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::Samples {
            requested: n_samples,
            minimum: MIN_SAMPLES,
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::config("time", "t must be finite and >= 0"));
    }
    let dq = q1 - q2;
    let qbar = 0.5 * (q1 + q2);
    let fbar = f.eval(qbar)?;
    let slope = f.slope(qbar)?;
    let scale = dq * slope / bath.hbar();

    let modes: Vec<ModeIntegral> = bath
        .modes()
        .iter()
        .map(|m| {
            let w = m.omega;
            let half = (0.5 * w * t).sin();
            ModeIntegral {
                coupling: m.coupling,
                drift: m.coupling * fbar / (m.mass * w * w) * ((w * t).sin() / w - t),
                a: (w * t).sin() / w,
                b: 2.0 * half * half / (m.mass * w * w),
            }
        })
        .collect();

    let n = n_samples as u64;
    let blocks = JACKKNIFE_BLOCKS as u64;
    let block_sums: Vec<(Complex64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let (start, end) = (b * n / blocks, (b + 1) * n / blocks);
            let mut acc = ComplexSum::new();
            for index in start..end {
                let point = bath.sample_thermal(seed, index);
                let mut integral = 0.0;
                for (k, mode) in modes.iter().enumerate() {
                    integral += mode.coupling * (mode.drift + mode.a * point.q[k] + mode.b * point.p[k]);
                }
                acc.add(Complex64::from_polar(1.0, -scale * integral));
            }
            (acc.value(), end - start)
        })
        .collect();

    let mut total = ComplexSum::new();
    for (s, _) in &block_sums {
        total.add(*s);
    }
    let total = total.value();
    let mean = total / n as f64;

    let leave_one_out: Vec<Complex64> = block_sums
        .iter()
        .map(|&(s, count)| (total - s) / (n - count) as f64)
        .collect();
    let centre = leave_one_out.iter().sum::<Complex64>() / blocks as f64;
    let spread: f64 = leave_one_out.iter().map(|z| (z - centre).norm_sqr()).sum();
    let std_error = ((blocks - 1) as f64 / blocks as f64 * spread).sqrt();

    Ok(McEstimate {
        mean,
        std_error,
        n_samples,
    })
}
