//! Discrete harmonic bath, its thermal strength and memory kernels.
//!
//! Mode `j` has Hamiltonian `p^2 / 2m + m omega^2 q^2 / 2` and couples to the
//! system through `C_j f(Q) q_j`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Temperature;
use crate::sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    pub mass: f64,
    pub omega: f64,
    pub coupling: f64,
}

impl BathMode {
    pub fn new(mass: f64, omega: f64, coupling: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::config("bath.modes.m", "mass must be finite and > 0"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::config(
                "bath.modes.omega",
                "frequency must be finite and > 0",
            ));
        }
        if !coupling.is_finite() {
            return Err(Error::config("bath.modes.c", "coupling must be finite"));
        }
        Ok(Self {
            mass,
            omega,
            coupling,
        })
    }
}

/// A finite set of bath modes at a given temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    modes: Vec<BathMode>,
    temperature: Temperature,
    hbar: f64,
    /// Per-mode `C^2 coth(beta hbar omega / 2) / (2 m hbar omega^3)`, the
    /// prefactor of `1 - cos(omega t)` in `B2`.
    b2_weights: Vec<f64>,
}

impl BathSpec {
    pub fn new(modes: Vec<BathMode>, temperature: Temperature, hbar: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::config("bath", "at least one mode required"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::config("model.hbar", "must be finite and > 0"));
        }
        let b2_weights = modes
            .iter()
            .map(|m| {
                let coth = temperature.coth_factor(hbar, m.omega);
                m.coupling * m.coupling * coth / (2.0 * m.mass * hbar * m.omega.powi(3))
            })
            .collect();
        Ok(Self {
            modes,
            temperature,
            hbar,
            b2_weights,
        })
    }

    /// A single mode with `m = omega = C = 1`.
    pub fn unit_mode(temperature: Temperature, hbar: f64) -> Self {
        Self::new(vec![BathMode::new(1.0, 1.0, 1.0).unwrap()], temperature, hbar)
            .expect("unit mode is valid")
    }

    /// Ohmic bath `J(omega) = eta omega exp(-omega / omega_c)` sampled at
    /// `omega_j = j omega_max / N` with unit masses and
    /// `C_j = sqrt(2 m_j omega_j J(omega_j) d_omega / pi)`.
    ///
    /// `omega_c = inf` removes the cutoff.
    pub fn discretize_ohmic(
        eta: f64,
        omega_cutoff: f64,
        n_modes: usize,
        omega_max: f64,
        temperature: Temperature,
        hbar: f64,
    ) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::config("bath.ohmic.eta", "must be finite and > 0"));
        }
        if !(omega_cutoff > 0.0) || omega_cutoff.is_nan() {
            return Err(Error::config("bath.ohmic.omega_c", "must be > 0"));
        }
        if n_modes == 0 {
            return Err(Error::config("bath.ohmic.n_modes", "must be >= 1"));
        }
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::config("bath.ohmic.omega_max", "must be finite and > 0"));
        }
        let d_omega = omega_max / n_modes as f64;
        let modes = (1..=n_modes)
            .map(|j| {
                let omega = j as f64 * d_omega;
                let mass = 1.0;
                let spectral = eta * omega * (-omega / omega_cutoff).exp();
                let coupling = (2.0 * mass * omega * spectral * d_omega / std::f64::consts::PI).sqrt();
                BathMode::new(mass, omega, coupling)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(modes, temperature, hbar)
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn temperature(&self) -> Temperature {
        self.temperature
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Same modes and temperature at a different `hbar`.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.modes.clone(), self.temperature, hbar)
    }

    pub fn max_frequency(&self) -> f64 {
        self.modes.iter().map(|m| m.omega).fold(0.0, f64::max)
    }

    pub fn coth_factor(&self, mode: &BathMode) -> f64 {
        self.temperature.coth_factor(self.hbar, mode.omega)
    }

    /// `C_b = sum_j C_j^2 coth(beta hbar omega_j / 2) / (2 m_j omega_j)`.
    pub fn thermal_strength(&self) -> f64 {
        sum::sum(self.modes.iter().map(|m| {
            m.coupling * m.coupling * self.coth_factor(m) / (2.0 * m.mass * m.omega)
        }))
    }

    /// `B1(t) = sum_j C_j^2 [t - sin(omega_j t) / omega_j] / (m_j omega_j^2)`.
    pub fn b1(&self, t: f64) -> f64 {
        sum::sum(self.modes.iter().map(|m| {
            let x = m.omega * t;
            m.coupling * m.coupling * x_minus_sin(x) / (m.mass * m.omega.powi(3))
        }))
    }

    /// `B2(t) = sum_j C_j^2 coth(beta hbar omega_j / 2) [1 - cos(omega_j t)] / (2 m_j hbar omega_j^3)`.
    ///
    /// `1 - cos` is evaluated as `2 sin^2(x / 2)`, which keeps full relative
    /// precision at short times.
    pub fn b2(&self, t: f64) -> f64 {
        sum::sum(self.modes.iter().zip(&self.b2_weights).map(|(m, w)| {
            let s = (0.5 * m.omega * t).sin();
            w * 2.0 * s * s
        }))
    }

    /// `dB2/dt = sum_j C_j^2 coth(beta hbar omega_j / 2) sin(omega_j t) / (2 m_j hbar omega_j^2)`.
    pub fn b2_dot(&self, t: f64) -> f64 {
        sum::sum(
            self.modes
                .iter()
                .zip(&self.b2_weights)
                .map(|(m, w)| w * m.omega * (m.omega * t).sin()),
        )
    }

    /// Thermal Wigner variances `(var_q, var_p)` of one mode.
    pub fn thermal_variances(&self, mode: &BathMode) -> (f64, f64) {
        let coth = self.coth_factor(mode);
        let var_q = self.hbar * coth / (2.0 * mode.mass * mode.omega);
        let var_p = mode.mass * self.hbar * mode.omega * coth / 2.0;
        (var_q, var_p)
    }

    /// Draws initial bath conditions from the thermal Wigner distribution.
    ///
    /// Draw `index` of stream `seed` depends only on `(seed, index)`, so
    /// workers can split an index range without sharing generator state.
    pub fn sample_thermal(&self, seed: u64, index: u64) -> BathPhasePoint {
        let mut rng = sample_rng(seed, index);
        let mut q = Vec::with_capacity(self.modes.len());
        let mut p = Vec::with_capacity(self.modes.len());
        for mode in &self.modes {
            let (var_q, var_p) = self.thermal_variances(mode);
            let zq: f64 = StandardNormal.sample(&mut rng);
            let zp: f64 = StandardNormal.sample(&mut rng);
            q.push(zq * var_q.sqrt());
            p.push(zp * var_p.sqrt());
        }
        BathPhasePoint { q, p }
    }
}

pub(crate) fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `x - sin(x)`, with a series for small `x` where the subtraction cancels.
fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x - x.sin()
    }
}

/// Bath positions and momenta, one entry per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BathPhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}
