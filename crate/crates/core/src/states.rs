//! Initial states on uniform position grids.
//!
//! A state is a superposition of Gaussian packets. Its density matrix
//! `rho(Q1, Q2)` lives on a square grid; the Wigner function is the Fourier
//! transform of `rho(Qbar + dQ/2, Qbar - dQ/2)` over `dQ` at fixed `Qbar`.
//!
//! The classical distribution starts out equal to the Wigner function of the
//! initial quantum state, so the same `DensityMatrixGrid` is both
//! `<Q1|rho(0)|Q2>` and its classical analog at `t = 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::{self, NeumaierSum};

/// Half-width of the required grid coverage around each packet, in units of
/// its width.
pub const COVERAGE_SIGMAS: f64 = 8.0;
/// Largest grid spacing chosen by [`GridSpec::auto`], in units of the
/// narrowest packet width.
pub const AUTO_POINTS_PER_SIGMA: f64 = 8.0;
pub const MIN_GRID_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center_q: f64,
    pub center_p: f64,
    pub sigma: f64,
    pub amplitude: Complex64,
}

impl GaussianPacket {
    pub fn new(center_q: f64, center_p: f64, sigma: f64, amplitude: Complex64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::config("state.packets.sigma", "must be finite and > 0"));
        }
        if !(center_q.is_finite() && center_p.is_finite()) {
            return Err(Error::config("state.packets", "centers must be finite"));
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::config("state.packets", "amplitude must be finite"));
        }
        Ok(Self {
            center_q,
            center_p,
            sigma,
            amplitude,
        })
    }

    /// Unit-norm packet `(2 pi sigma^2)^(-1/4) exp(-(Q - q0)^2 / 4 sigma^2 + i p0 Q / hbar)`
    /// times the amplitude; `|psi|^2` has variance `sigma^2`.
    pub fn value(&self, q: f64, hbar: f64) -> Complex64 {
        let norm = (2.0 * PI * self.sigma * self.sigma).powf(-0.25);
        let x = q - self.center_q;
        let envelope = norm * (-x * x / (4.0 * self.sigma * self.sigma)).exp();
        self.amplitude * Complex64::from_polar(envelope, self.center_p * q / hbar)
    }

    /// `<self|other>` of the unit-amplitude packets, in closed form.
    fn overlap(&self, other: &GaussianPacket, hbar: f64) -> Complex64 {
        let (s1, s2) = (self.sigma, other.sigma);
        let a = 1.0 / (4.0 * s1 * s1) + 1.0 / (4.0 * s2 * s2);
        let b = Complex64::new(
            self.center_q / (2.0 * s1 * s1) + other.center_q / (2.0 * s2 * s2),
            (other.center_p - self.center_p) / hbar,
        );
        let c = -self.center_q.powi(2) / (4.0 * s1 * s1) - other.center_q.powi(2) / (4.0 * s2 * s2);
        let norm = (2.0 * PI * s1 * s1).powf(-0.25) * (2.0 * PI * s2 * s2).powf(-0.25);
        norm * (PI / a).sqrt() * (b * b / (4.0 * a) + c).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionState {
    pub packets: Vec<GaussianPacket>,
    /// Whether amplitudes have been rescaled to unit continuum norm.
    pub normalized: bool,
}

impl SuperpositionState {
    pub fn new(packets: Vec<GaussianPacket>) -> Result<Self> {
        if packets.is_empty() {
            return Err(Error::config("state.packets", "at least one packet required"));
        }
        Ok(Self {
            packets,
            normalized: false,
        })
    }

    pub fn gaussian(center_q: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![GaussianPacket::new(
            center_q,
            0.0,
            sigma,
            Complex64::new(1.0, 0.0),
        )?])
    }

    /// Equal-weight cat with packets at `mean -/+ separation / 2`.
    pub fn cat(mean: f64, separation: f64, sigma: f64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::new(vec![
            GaussianPacket::new(mean - 0.5 * separation, 0.0, sigma, one)?,
            GaussianPacket::new(mean + 0.5 * separation, 0.0, sigma, one)?,
        ])
    }

    /// Continuum norm `sum_ab conj(c_a) c_b <a|b>`.
    pub fn norm_squared(&self, hbar: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for a in &self.packets {
            for b in &self.packets {
                acc.add((a.amplitude.conj() * b.amplitude * a.overlap(b, hbar)).re);
            }
        }
        acc.value()
    }

    /// Rescales amplitudes to unit continuum norm.
    pub fn normalize(mut self, hbar: f64) -> Result<Self> {
        let norm = self.norm_squared(hbar);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::config("state.packets", "state has zero norm"));
        }
        let scale = norm.sqrt().recip();
        for p in &mut self.packets {
            p.amplitude *= scale;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn value(&self, q: f64, hbar: f64) -> Complex64 {
        self.packets.iter().map(|p| p.value(q, hbar)).sum()
    }

    /// `(min, max)` positions the grid must contain.
    pub fn required_span(&self) -> (f64, f64) {
        let lo = self
            .packets
            .iter()
            .map(|p| p.center_q - COVERAGE_SIGMAS * p.sigma)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .packets
            .iter()
            .map(|p| p.center_q + COVERAGE_SIGMAS * p.sigma)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn min_sigma(&self) -> f64 {
        self.packets.iter().map(|p| p.sigma).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(q_min: f64, q_max: f64, n_points: usize) -> Result<Self> {
        if !(q_min.is_finite() && q_max.is_finite() && q_max > q_min) {
            return Err(Error::config("state.grid", "need finite q_min < q_max"));
        }
        if n_points < MIN_GRID_POINTS {
            return Err(Error::config(
                "state.grid.n_points",
                format!("must be >= {MIN_GRID_POINTS}"),
            ));
        }
        Ok(Self {
            q_min,
            q_max,
            n_points,
        })
    }

    /// Grid covering every packet center +/- 8 sigma with spacing at most
    /// `sigma_min / 8`. The point count is rounded up to an even number.
    pub fn auto(state: &SuperpositionState) -> Result<Self> {
        let (lo, hi) = state.required_span();
        let max_step = state.min_sigma() / AUTO_POINTS_PER_SIGMA;
        let mut n = ((hi - lo) / max_step).ceil() as usize + 1;
        n = n.max(MIN_GRID_POINTS);
        n += n % 2;
        Self::new(lo, hi, n)
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Errors unless `[lo, hi]` lies inside the grid.
    pub fn ensure_covers(&self, lo: f64, hi: f64) -> Result<()> {
        let slack = 1e-12 * (self.q_max - self.q_min);
        if lo < self.q_min - slack || hi > self.q_max + slack {
            return Err(Error::Coverage {
                grid_min: self.q_min,
                grid_max: self.q_max,
                required_min: lo.min(self.q_min),
                required_max: hi.max(self.q_max),
            });
        }
        Ok(())
    }
}

/// `rho(Q1, Q2)` sampled on a square grid; row index is `Q1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixGrid {
    grid: GridSpec,
    values: Array2<Complex64>,
    hbar: f64,
}

impl DensityMatrixGrid {
    pub fn from_values(grid: GridSpec, values: Array2<Complex64>, hbar: f64) -> Result<Self> {
        let n = grid.n_points;
        if values.dim() != (n, n) {
            return Err(Error::Shape(format!(
                "density matrix is {:?}, grid has {n} points",
                values.dim()
            )));
        }
        Ok(Self { grid, values, hbar })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    /// Same values, reinterpreted at a different `hbar`.
    pub fn with_hbar(&self, hbar: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.clone(),
            hbar,
        }
    }

    /// `h sum_i rho(Q_i, Q_i)`.
    pub fn trace(&self) -> f64 {
        let h = self.spacing();
        h * sum::sum(self.values.diag().iter().map(|z| z.re))
    }

    /// Discrete `Tr rho^2 = h^2 sum |rho(Q1, Q2)|^2`.
    pub fn purity(&self) -> f64 {
        let h = self.spacing();
        let rows = self.grid.n_points;
        h * h * sum::par_rows(rows, |i| {
            sum::sum(self.values.row(i).iter().map(|z| z.norm_sqr()))
        })
    }

    /// Variance of the diagonal position distribution.
    pub fn position_variance(&self) -> f64 {
        let h = self.spacing();
        let diag: Vec<(f64, f64)> = self
            .values
            .diag()
            .iter()
            .enumerate()
            .map(|(i, z)| (self.grid.point(i), z.re))
            .collect();
        let norm = h * sum::sum(diag.iter().map(|&(_, w)| w));
        let mean = h * sum::sum(diag.iter().map(|&(q, w)| q * w)) / norm;
        h * sum::sum(diag.iter().map(|&(q, w)| (q - mean).powi(2) * w)) / norm
    }

    /// `max |rho(Q1, Q2) - conj(rho(Q2, Q1))|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.grid.n_points;
        (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| (self.values[[i, j]] - self.values[[j, i]].conj()).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Most negative diagonal entry (zero if none is negative).
    pub fn min_diagonal(&self) -> f64 {
        self.values.diag().iter().map(|z| z.re).fold(0.0, f64::min)
    }
}

/// Builds `rho(Q1, Q2) = psi(Q1) conj(psi(Q2))` with `psi` normalized so that
/// `h sum |psi|^2 = 1`.
pub fn build_density_matrix(
    state: &SuperpositionState,
    grid: &GridSpec,
    hbar: f64,
) -> Result<DensityMatrixGrid> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::config("model.hbar", "must be finite and > 0"));
    }
    let (lo, hi) = state.required_span();
    grid.ensure_covers(lo, hi)?;

    let h = grid.spacing();
    let mut psi: Vec<Complex64> = grid.points().iter().map(|&q| state.value(q, hbar)).collect();
    let norm = h * sum::sum(psi.iter().map(|z| z.norm_sqr()));
    if !(norm > 0.0) {
        return Err(Error::config("state.packets", "state has zero norm on the grid"));
    }
    let scale = norm.sqrt().recip();
    psi.iter_mut().for_each(|z| *z *= scale);

    let n = grid.n_points;
    let values = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj());
    DensityMatrixGrid::from_values(*grid, values, hbar)
}

/// `rho_W(Qbar, P)` on a phase-space grid.
///
/// `Qbar` runs over the `2n - 1` midpoints `(Q_i + Q_j) / 2` of the source
/// position grid (spacing `h / 2`). For each `Qbar` the available
/// separations `dQ = Q_i - Q_j` share the parity of `i + j` and are spaced by
/// `2h`, so `P` has `M` points (`M` even, `M >= n`) spaced by
/// `pi hbar / (h M)`, stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    source: GridSpec,
    q: Vec<f64>,
    p: Vec<f64>,
    values: Array2<f64>,
    hbar: f64,
}

impl WignerGrid {
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn source_grid(&self) -> &GridSpec {
        &self.source
    }

    fn cell(&self) -> f64 {
        (self.q[1] - self.q[0]) * (self.p[1] - self.p[0])
    }

    /// `int int rho_W dQ dP`.
    pub fn integral(&self) -> f64 {
        self.cell() * sum::sum(self.values.iter().copied())
    }

    /// `2 pi hbar int int rho_W^2 dQ dP`.
    pub fn purity(&self) -> f64 {
        2.0 * PI * self.hbar * self.cell() * sum::sum(self.values.iter().map(|w| w * w))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn transform_length(n: usize) -> usize {
    n + n % 2
}

/// `rho_W(Qbar, P) = (1 / 2 pi hbar) int d(dQ) rho(Qbar + dQ/2, Qbar - dQ/2) exp(-i P dQ / hbar)`.
pub fn wigner_transform(rho: &DensityMatrixGrid) -> WignerGrid {
    let grid = *rho.grid();
    let n = grid.n_points;
    let m = transform_length(n);
    let h = grid.spacing();
    let hbar = rho.hbar();
    let scale = 2.0 * h / (2.0 * PI * hbar);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);

    let rows: Vec<Vec<f64>> = (0..2 * n - 1)
        .into_par_iter()
        .map(|s| {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for_each_pair(n, m, s, |k, i, j| buf[k] = rho.values[[i, j]]);
            fft.process(&mut buf);
            let parity = (s % 2) as f64;
            (0..m)
                .map(|idx| {
                    let signed = idx as i64 - (m / 2) as i64;
                    let bin = signed.rem_euclid(m as i64) as usize;
                    let phase = Complex64::from_polar(1.0, -PI * signed as f64 * parity / m as f64);
                    scale * (buf[bin] * phase).re
                })
                .collect()
        })
        .collect();

    let values = Array2::from_shape_fn((2 * n - 1, m), |(s, idx)| rows[s][idx]);
    let q = (0..2 * n - 1).map(|s| grid.q_min + 0.5 * h * s as f64).collect();
    let dp = PI * hbar / (h * m as f64);
    let p = (0..m)
        .map(|idx| (idx as i64 - (m / 2) as i64) as f64 * dp)
        .collect();
    WignerGrid {
        source: grid,
        q,
        p,
        values,
        hbar,
    }
}

/// Inverse of [`wigner_transform`].
pub fn inverse_wigner(w: &WignerGrid) -> Result<DensityMatrixGrid> {
    let grid = w.source;
    let n = grid.n_points;
    let m = transform_length(n);
    if w.values.dim() != (2 * n - 1, m) || w.q.len() != 2 * n - 1 || w.p.len() != m {
        return Err(Error::Shape(format!(
            "Wigner grid {:?} does not match a {n}-point position grid (expected {:?})",
            w.values.dim(),
            (2 * n - 1, m)
        )));
    }
    let h = grid.spacing();
    let scale = 2.0 * PI * w.hbar / (2.0 * h) / m as f64;
    let ifft: Arc<dyn Fft<f64>> = FftPlanner::<f64>::new().plan_fft_inverse(m);

    let rows: Vec<Vec<(usize, usize, Complex64)>> = (0..2 * n - 1)
        .into_par_iter()
        .map(|s| {
            let parity = (s % 2) as f64;
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for idx in 0..m {
                let signed = idx as i64 - (m / 2) as i64;
                let bin = signed.rem_euclid(m as i64) as usize;
                let phase = Complex64::from_polar(1.0, PI * signed as f64 * parity / m as f64);
                buf[bin] = w.values[[s, idx]] * phase;
            }
            ifft.process(&mut buf);
            let mut out = Vec::new();
            for_each_pair(n, m, s, |k, i, j| out.push((i, j, buf[k] * scale)));
            out
        })
        .collect();

    let mut values = Array2::zeros((n, n));
    for (i, j, z) in rows.into_iter().flatten() {
        values[[i, j]] = z;
    }
    DensityMatrixGrid::from_values(grid, values, w.hbar)
}

/// Visits every `(i, j)` with `i + j = s`, passing the FFT bin of
/// `d = i - j = 2k + (s mod 2)`.
fn for_each_pair(n: usize, m: usize, s: usize, mut visit: impl FnMut(usize, usize, usize)) {
    let lo = s.saturating_sub(n - 1);
    let hi = s.min(n - 1);
    for j in lo..=hi {
        let i = s - j;
        let d = i as i64 - j as i64;
        let k = (d - (s % 2) as i64).div_euclid(2);
        visit(k.rem_euclid(m as i64) as usize, i, j);
    }
}
