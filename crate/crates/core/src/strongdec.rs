//! Strong-decoherence evolution (system Hamiltonian set to zero).
//!
//! Each density-matrix element is multiplied by
//!
//! ```text
//! rho(Q1, Q2, t) / rho(Q1, Q2, 0) = exp(i phi(t) - dQ^2 g^2 B2(t)),
//! phi(t) = dQ f(Qbar) g B1(t) / hbar,
//! ```
//!
//! with `g` the classical slope or the quantum finite difference (see
//! [`Side`]). The diagonal is untouched, so the trace is preserved exactly.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::model::{CouplingFunction, Side};
use crate::states::DensityMatrixGrid;
use crate::sum;

/// `exp(log_modulus + i phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceFactor {
    pub log_modulus: f64,
    pub phase: f64,
}

impl DecoherenceFactor {
    pub const IDENTITY: DecoherenceFactor = DecoherenceFactor {
        log_modulus: 0.0,
        phase: 0.0,
    };

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.log_modulus.exp(), self.phase)
    }

    pub fn modulus(&self) -> f64 {
        self.log_modulus.exp()
    }
}

/// Bath kernels at one instant.
#[derive(Debug, Clone, Copy)]
struct Kernels {
    b1: f64,
    b2: f64,
    hbar: f64,
}

impl Kernels {
    fn at(bath: &BathSpec, t: f64) -> Self {
        Self {
            b1: bath.b1(t),
            b2: bath.b2(t),
            hbar: bath.hbar(),
        }
    }

    #[inline]
    fn factor(&self, f: &CouplingFunction, side: Side, q1: f64, q2: f64) -> DecoherenceFactor {
        let dq = q1 - q2;
        let qbar = 0.5 * (q1 + q2);
        let g = side.effective_slope(f, qbar, dq);
        let jump = dq * g;
        DecoherenceFactor {
            log_modulus: -jump * jump * self.b2,
            phase: jump * f.eval_unchecked(qbar) * self.b1 / self.hbar,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::config("time", format!("t must be finite and >= 0, got {t}")))
    }
}

fn check_pair(f: &CouplingFunction, q1: f64, q2: f64) -> Result<()> {
    f.ensure_domain(q1.min(q2), q1.max(q2))
}

/// Decoherence factor of `rho(q1, q2)` at time `t` for either dynamics.
pub fn factor(
    q1: f64,
    q2: f64,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
    side: Side,
) -> Result<DecoherenceFactor> {
    check_time(t)?;
    check_pair(f, q1, q2)?;
    Ok(Kernels::at(bath, t).factor(f, side, q1, q2))
}

pub fn classical_factor(
    q1: f64,
    q2: f64,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
) -> Result<DecoherenceFactor> {
    factor(q1, q2, t, f, bath, Side::Classical)
}

pub fn quantum_factor(
    q1: f64,
    q2: f64,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
) -> Result<DecoherenceFactor> {
    factor(q1, q2, t, f, bath, Side::Quantum)
}

/// `gamma(t) = d ln|rho(q1, q2, t)| / dt = -dQ^2 g^2 dB2/dt`.
///
/// Uses the analytic kernel derivative, so it is finite even where the
/// modulus itself underflows.
pub fn gamma(
    q1: f64,
    q2: f64,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
    side: Side,
) -> Result<f64> {
    check_time(t)?;
    check_pair(f, q1, q2)?;
    let dq = q1 - q2;
    let jump = dq * side.effective_slope(f, 0.5 * (q1 + q2), dq);
    Ok(-jump * jump * bath.b2_dot(t))
}

/// Applies the decoherence factor to every element of `rho0`.
pub fn evolve_matrix(
    rho0: &DensityMatrixGrid,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
    side: Side,
) -> Result<DensityMatrixGrid> {
    check_time(t)?;
    let grid = *rho0.grid();
    f.ensure_domain(grid.q_min, grid.q_max)?;
    let kernels = Kernels::at(bath, t);
    let q = grid.points();
    let n = grid.n_points;
    let mut values = rho0.values().clone();
    values
        .axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            for j in 0..n {
                if i != j {
                    row[j] *= kernels.factor(f, side, q[i], q[j]).value();
                }
            }
        });
    DensityMatrixGrid::from_values(grid, values, rho0.hbar())
}

/// Linear entropy `S(t) = 1 - int |rho0|^2 exp(-2 dQ^2 g^2 B2(t))` for one
/// state and dynamics, as a function of `B2`.
///
/// Per-cell weights `|rho0|^2` and exponents `dQ^2 g^2` are computed once;
/// the sum is accumulated as `(1 - Tr rho0^2) + int |rho0|^2 (1 - exp(...))`
/// with `expm1`, so `S(t) - S(0)` keeps full relative precision at short
/// times.
#[derive(Debug, Clone)]
pub struct EntropyEvaluator {
    weights: Array2<f64>,
    exponents: Array2<f64>,
    cell: f64,
    initial: f64,
}

impl EntropyEvaluator {
    pub fn new(rho0: &DensityMatrixGrid, f: &CouplingFunction, side: Side) -> Result<Self> {
        let grid = rho0.grid();
        f.ensure_domain(grid.q_min, grid.q_max)?;
        let q = grid.points();
        let n = grid.n_points;
        let weights = rho0.values().mapv(|z| z.norm_sqr());
        let exponents = Array2::from_shape_fn((n, n), |(i, j)| {
            let dq = q[i] - q[j];
            let jump = dq * side.effective_slope(f, 0.5 * (q[i] + q[j]), dq);
            jump * jump
        });
        let h = grid.spacing();
        let initial = 1.0 - rho0.purity();
        Ok(Self {
            weights,
            exponents,
            cell: h * h,
            initial,
        })
    }

    /// `S(0) = 1 - Tr rho0^2`.
    pub fn initial(&self) -> f64 {
        self.initial
    }

    /// `S - S(0)` at kernel value `b2`.
    pub fn growth(&self, b2: f64) -> f64 {
        let n = self.weights.nrows();
        self.cell
            * sum::par_rows(n, |i| {
                let w = self.weights.row(i);
                let x = self.exponents.row(i);
                sum::sum(
                    w.iter()
                        .zip(x.iter())
                        .map(|(w, x)| -w * (-2.0 * x * b2).exp_m1()),
                )
            })
    }

    pub fn entropy(&self, b2: f64) -> f64 {
        (self.initial + self.growth(b2)).max(0.0)
    }
}

pub fn entropy(
    rho0: &DensityMatrixGrid,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
    side: Side,
) -> Result<f64> {
    check_time(t)?;
    Ok(EntropyEvaluator::new(rho0, f, side)?.entropy(bath.b2(t)))
}

/// Classical linear entropy `S_c(t)`.
pub fn entropy_classical(
    rho0: &DensityMatrixGrid,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
) -> Result<f64> {
    entropy(rho0, t, f, bath, Side::Classical)
}

/// Quantum linear entropy `S_q(t)`.
pub fn entropy_quantum(
    rho0: &DensityMatrixGrid,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
) -> Result<f64> {
    entropy(rho0, t, f, bath, Side::Quantum)
}

/// Time series of kernels, decay exponents, entropies and phases at a probe
/// pair `(Q1*, Q2*)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceSeries {
    pub probe: (f64, f64),
    pub times: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub gamma_c: Vec<f64>,
    pub gamma_q: Vec<f64>,
    pub entropy_c: Vec<f64>,
    pub entropy_q: Vec<f64>,
    pub phase_c: Vec<f64>,
    pub phase_q: Vec<f64>,
    pub log_modulus_c: Vec<f64>,
    pub log_modulus_q: Vec<f64>,
    /// `S(0)` of the initial state, for fits of `S(t) - S(0)`.
    pub initial_entropy: f64,
    /// `S_c(t) - S_c(0)` and `S_q(t) - S_q(0)` at full relative precision.
    pub growth_c: Vec<f64>,
    pub growth_q: Vec<f64>,
}

impl DecoherenceSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn entropy(&self, side: Side) -> &[f64] {
        match side {
            Side::Classical => &self.entropy_c,
            Side::Quantum => &self.entropy_q,
        }
    }

    pub fn growth(&self, side: Side) -> &[f64] {
        match side {
            Side::Classical => &self.growth_c,
            Side::Quantum => &self.growth_q,
        }
    }

    pub fn gamma(&self, side: Side) -> &[f64] {
        match side {
            Side::Classical => &self.gamma_c,
            Side::Quantum => &self.gamma_q,
        }
    }
}

/// Uniform time grid `t_k = k t_max / n_steps`, `k = 0..=n_steps`.
pub fn time_grid(t_max: f64, n_steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::config("time.t_max", "must be finite and > 0"));
    }
    if n_steps == 0 {
        return Err(Error::config("time.n_steps", "must be >= 1"));
    }
    Ok((0..=n_steps)
        .map(|k| t_max * k as f64 / n_steps as f64)
        .collect())
}

pub fn decoherence_series(
    rho0: &DensityMatrixGrid,
    f: &CouplingFunction,
    bath: &BathSpec,
    probe: (f64, f64),
    times: &[f64],
) -> Result<DecoherenceSeries> {
    for &t in times {
        check_time(t)?;
    }
    check_pair(f, probe.0, probe.1)?;
    let classical = EntropyEvaluator::new(rho0, f, Side::Classical)?;
    let quantum = EntropyEvaluator::new(rho0, f, Side::Quantum)?;
    let (q1, q2) = probe;

    let mut series = DecoherenceSeries {
        probe,
        times: times.to_vec(),
        b1: Vec::with_capacity(times.len()),
        b2: Vec::with_capacity(times.len()),
        gamma_c: Vec::with_capacity(times.len()),
        gamma_q: Vec::with_capacity(times.len()),
        entropy_c: Vec::with_capacity(times.len()),
        entropy_q: Vec::with_capacity(times.len()),
        phase_c: Vec::with_capacity(times.len()),
        phase_q: Vec::with_capacity(times.len()),
        log_modulus_c: Vec::with_capacity(times.len()),
        log_modulus_q: Vec::with_capacity(times.len()),
        initial_entropy: quantum.initial(),
        growth_c: Vec::with_capacity(times.len()),
        growth_q: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let kernels = Kernels::at(bath, t);
        let fc = kernels.factor(f, Side::Classical, q1, q2);
        let fq = kernels.factor(f, Side::Quantum, q1, q2);
        let growth_c = classical.growth(kernels.b2);
        let growth_q = quantum.growth(kernels.b2);
        series.b1.push(kernels.b1);
        series.b2.push(kernels.b2);
        series.gamma_c.push(gamma(q1, q2, t, f, bath, Side::Classical)?);
        series.gamma_q.push(gamma(q1, q2, t, f, bath, Side::Quantum)?);
        series.entropy_c.push((classical.initial() + growth_c).max(0.0));
        series.entropy_q.push((quantum.initial() + growth_q).max(0.0));
        series.phase_c.push(fc.phase);
        series.phase_q.push(fq.phase);
        series.log_modulus_c.push(fc.log_modulus);
        series.log_modulus_q.push(fq.log_modulus);
        series.growth_c.push(growth_c);
        series.growth_q.push(growth_q);
    }
    Ok(series)
}
