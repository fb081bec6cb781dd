//! Single bath mode propagated in a truncated number basis.
//!
//! For fixed system position `Q` the bath Hamiltonian is
//!
//! ```text
//! H_Q = hbar w (a^dag a + 1/2) + C f(Q) sqrt(hbar / (2 m w)) (a + a^dag)
//! ```
//!
//! which is tridiagonal in the number basis. It is diagonalised once and
//! `exp(-i H_Q t / hbar)` applied exactly. The decoherence factor for the
//! pair `(Q1, Q2)` is `<chi_Q2(t) | chi_Q1(t)>` with both branches starting
//! from the bath ground state.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{BathMode, BathSpec};
use crate::error::{Error, Result};
use crate::model::{CouplingFunction, Temperature};

pub const MIN_LEVELS: usize = 8;
/// Largest change allowed when the basis is doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;
/// Thermal populations below this are dropped.
const POPULATION_CUTOFF: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    pub n_levels: usize,
    pub time_step: f64,
    pub t_max: f64,
}

impl FockConfig {
    pub fn new(n_levels: usize, time_step: f64, t_max: f64) -> Result<Self> {
        let cfg = Self {
            n_levels,
            time_step,
            t_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_levels < MIN_LEVELS {
            return Err(Error::config(
                "fock.n_levels",
                format!("need at least {MIN_LEVELS} levels, got {}", self.n_levels),
            ));
        }
        if !(self.time_step.is_finite() && self.time_step > 0.0) {
            return Err(Error::config("fock.time_step", "must be finite and > 0"));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::config("fock.t_max", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// `0, dt, 2 dt, ...` up to and including `t_max` (within rounding).
    pub fn times(&self) -> Vec<f64> {
        let steps = (self.t_max / self.time_step + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.time_step).collect()
    }
}

/// Spectral decomposition of one conditional Hamiltonian.
struct Propagator {
    vectors: DMatrix<f64>,
    energies: Vec<f64>,
    hbar: f64,
}

impl Propagator {
    fn new(mode: &BathMode, hbar: f64, force: f64, n: usize) -> Self {
        let w = mode.omega;
        let lambda = force * (hbar / (2.0 * mode.mass * w)).sqrt();
        let mut h = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            h[(k, k)] = hbar * w * (k as f64 + 0.5);
            if k + 1 < n {
                let off = lambda * ((k + 1) as f64).sqrt();
                h[(k, k + 1)] = off;
                h[(k + 1, k)] = off;
            }
        }
        let eig = SymmetricEigen::new(h);
        Self {
            vectors: eig.eigenvectors,
            energies: eig.eigenvalues.iter().copied().collect(),
            hbar,
        }
    }

    /// Column `start` of `exp(-i H t / hbar)`.
    fn evolve_basis(&self, start: usize, t: f64) -> Vec<Complex64> {
        let n = self.energies.len();
        let weights: Vec<Complex64> = (0..n)
            .map(|e| {
                Complex64::from_polar(self.vectors[(start, e)], -self.energies[e] * t / self.hbar)
            })
            .collect();
        (0..n)
            .map(|k| (0..n).map(|e| weights[e] * self.vectors[(k, e)]).sum())
            .collect()
    }
}

fn single_mode(bath: &BathSpec) -> Result<BathMode> {
    match bath.modes() {
        [mode] => Ok(*mode),
        modes => Err(Error::config(
            "bath",
            format!("Fock propagation needs exactly one mode, got {}", modes.len()),
        )),
    }
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Populations `p_n` of the thermal state of `mode`, truncated to `n`.
fn populations(bath: &BathSpec, mode: &BathMode, n: usize) -> Vec<f64> {
    match bath.temperature() {
        Temperature::Zero => {
            let mut p = vec![0.0; n];
            p[0] = 1.0;
            p
        }
        Temperature::Beta(beta) => {
            let x = beta * bath.hbar() * mode.omega;
            let z = -(-x).exp_m1();
            (0..n).map(|k| z * (-(k as f64) * x).exp()).collect()
        }
    }
}

fn thermal_factor_at(
    mode: &BathMode,
    bath: &BathSpec,
    f1: f64,
    f2: f64,
    t: f64,
    n: usize,
) -> Result<Complex64> {
    let p = populations(bath, mode, n);
    if p[n - 1] > POPULATION_CUTOFF {
        return Err(Error::Convergence(format!(
            "{n} levels leave thermal population {:.3e} in the top state",
            p[n - 1]
        )));
    }
    let one = Propagator::new(mode, bath.hbar(), mode.coupling * f1, n);
    let two = Propagator::new(mode, bath.hbar(), mode.coupling * f2, n);
    let mut total = Complex64::new(0.0, 0.0);
    for (k, &pk) in p.iter().enumerate() {
        if pk < POPULATION_CUTOFF {
            break;
        }
        total += pk * overlap(&two.evolve_basis(k, t), &one.evolve_basis(k, t));
    }
    Ok(total)
}

fn check_inputs(q1: f64, q2: f64, t: f64, fock: &FockConfig) -> Result<()> {
    fock.validate()?;
    if !(q1.is_finite() && q2.is_finite()) {
        return Err(Error::config("probe", "positions must be finite"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::config("time", "t must be finite and >= 0"));
    }
    Ok(())
}

fn converged<F>(n: usize, eval: F) -> Result<Complex64>
where
    F: Fn(usize) -> Result<Complex64>,
{
    let coarse = eval(n)?;
    let fine = eval(2 * n)?;
    let change = (fine - coarse).norm();
    if change > CONVERGENCE_TOLERANCE {
        return Err(Error::Convergence(format!(
            "doubling {n} levels changed the factor by {change:.3e}"
        )));
    }
    Ok(fine)
}

/// Ground-state decoherence factor for a single mode. The temperature of
/// `bath` is ignored.
pub fn fock_quantum_factor(
    q1: f64,
    q2: f64,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
    fock: &FockConfig,
) -> Result<Complex64> {
    check_inputs(q1, q2, t, fock)?;
    let mode = single_mode(bath)?;
    let (f1, f2) = (f.eval(q1)?, f.eval(q2)?);
    let hbar = bath.hbar();
    converged(fock.n_levels, |n| {
        let one = Propagator::new(&mode, hbar, mode.coupling * f1, n);
        let two = Propagator::new(&mode, hbar, mode.coupling * f2, n);
        Ok(overlap(&two.evolve_basis(0, t), &one.evolve_basis(0, t)))
    })
}

/// `sum_n p_n <n| U_Q2^dag U_Q1 |n>` over the thermal populations of `bath`.
pub fn fock_quantum_factor_thermal(
    q1: f64,
    q2: f64,
    t: f64,
    f: &CouplingFunction,
    bath: &BathSpec,
    fock: &FockConfig,
) -> Result<Complex64> {
    check_inputs(q1, q2, t, fock)?;
    let mode = single_mode(bath)?;
    let (f1, f2) = (f.eval(q1)?, f.eval(q2)?);
    converged(fock.n_levels, |n| thermal_factor_at(&mode, bath, f1, f2, t, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strongdec::quantum_factor;
    use std::f64::consts::PI;

    fn cfg() -> FockConfig {
        FockConfig::new(64, 0.1, 2.0 * PI).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(FockConfig::new(7, 0.1, 1.0).is_err());
        assert!(FockConfig::new(8, 0.0, 1.0).is_err());
        assert!(FockConfig::new(8, 0.1, -1.0).is_err());
        assert_eq!(FockConfig::new(8, 0.5, 2.0).unwrap().times().len(), 5);
    }

    #[test]
    fn rejects_multimode_bath() {
        let bath = BathSpec::discretize_ohmic(1.0, 1.0, 3, 3.0, Temperature::Zero, 1.0).unwrap();
        let err = fock_quantum_factor(1.0, -1.0, 1.0, &CouplingFunction::linear(1.0), &bath, &cfg());
        assert!(matches!(err, Err(Error::Config { .. })));
    }

    #[test]
    fn modulus_matches_closed_form_at_zero_temperature() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        for f in [CouplingFunction::linear(1.0), CouplingFunction::cubic()] {
            for k in 0..10 {
                let t = 2.0 * PI * k as f64 / 9.0;
                let z = fock_quantum_factor(1.2, -0.4, t, &f, &bath, &cfg()).unwrap();
                let exact = quantum_factor(1.2, -0.4, t, &f, &bath).unwrap().modulus();
                assert!((z.norm() - exact).abs() < 1e-10, "t={t} {} {exact}", z.norm());
            }
        }
    }

    #[test]
    fn full_recurrence_after_one_period() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let z = fock_quantum_factor(1.0, -1.0, 2.0 * PI, &CouplingFunction::cubic(), &bath, &cfg())
            .unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn equal_branches_give_unity() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let z = fock_quantum_factor(0.7, 0.7, 3.0, &CouplingFunction::cubic(), &bath, &cfg()).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn thermal_modulus_matches_closed_form() {
        let bath = BathSpec::unit_mode(Temperature::Beta(1.0), 1.0);
        let f = CouplingFunction::linear(1.0);
        for &t in &[0.5, 1.0, PI, 4.0] {
            let z = fock_quantum_factor_thermal(0.5, -0.5, t, &f, &bath, &cfg()).unwrap();
            let exact = quantum_factor(0.5, -0.5, t, &f, &bath).unwrap().modulus();
            assert!((z.norm() - exact).abs() < 1e-9, "t={t} {} {exact}", z.norm());
        }
    }

    #[test]
    fn thermal_equals_ground_state_at_zero_temperature() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let f = CouplingFunction::quadratic(0.3, 1.0);
        let a = fock_quantum_factor(1.0, -0.5, 2.0, &f, &bath, &cfg()).unwrap();
        let b = fock_quantum_factor_thermal(1.0, -0.5, 2.0, &f, &bath, &cfg()).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn too_small_basis_is_reported() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let small = FockConfig::new(8, 0.1, 1.0).unwrap();
        let err = fock_quantum_factor(3.0, -3.0, 1.0, &CouplingFunction::linear(1.0), &bath, &small);
        assert!(matches!(err, Err(Error::Convergence(_))));
    }

    fn wrapped(a: f64) -> f64 {
        (a + PI).rem_euclid(2.0 * PI) - PI
    }

    #[test]
    fn phase_matches_closed_form_for_linear_coupling() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let f = CouplingFunction::linear(1.0);
        for &t in &[0.5, 1.0, 2.0, 4.0] {
            let z = fock_quantum_factor(1.2, -0.4, t, &f, &bath, &cfg()).unwrap();
            let q = quantum_factor(1.2, -0.4, t, &f, &bath).unwrap();
            assert!(wrapped(z.arg() - q.phase).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn nonlinear_phase_follows_branch_average() {
        // Exact single-mode phase: dQ g [f(Q1) + f(Q2)] / 2 * B1 / hbar.
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let f = CouplingFunction::cubic();
        let (q1, q2) = (1.2, -0.4);
        let (f1, f2) = (f.eval(q1).unwrap(), f.eval(q2).unwrap());
        for &t in &[0.5, 1.0, 2.0, 4.0] {
            let z = fock_quantum_factor(q1, q2, t, &f, &bath, &cfg()).unwrap();
            let expected = 0.5 * (f1 - f2) * (f1 + f2) * bath.b1(t) / bath.hbar();
            assert!(wrapped(z.arg() - expected).abs() < 1e-10, "t={t}");
        }
    }
}
