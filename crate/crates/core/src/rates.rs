//! Second-order short-time decoherence rates.
//!
//! Expanding the linear entropy as `S(t) = S(0) + t / tau_1 + t^2 / tau_2^2`,
//! the first-order term vanishes for both dynamics and
//!
//! ```text
//! 1/tau_2^2 = (C_b / hbar) int dQ1 dQ2 |rho(Q1, Q2, 0)|^2 dQ^2 g^2
//! ```
//!
//! with `g = df/dQ (Qbar)` classically and `g = Delta f / Delta Q` quantum
//! mechanically. The integrals use the state's own grid with the trapezoidal
//! rule (the endpoints carry negligible weight for the covered states).

use serde::Serialize;

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::model::{CouplingFunction, Side};
use crate::states::{build_density_matrix, DensityMatrixGrid, GridSpec, SuperpositionState};
use crate::sum;

/// Classical rates below this are treated as zero when forming the ratio.
pub const RATE_UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub classical_rate: f64,
    pub quantum_rate: f64,
    /// `quantum_rate / classical_rate`; infinite when only the classical rate
    /// vanishes, one when both do.
    pub ratio: f64,
}

impl RatePair {
    pub fn new(classical_rate: f64, quantum_rate: f64) -> Self {
        let ratio = if classical_rate.abs() < RATE_UNDERFLOW {
            if quantum_rate.abs() < RATE_UNDERFLOW {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            quantum_rate / classical_rate
        };
        Self {
            classical_rate,
            quantum_rate,
            ratio,
        }
    }
}

/// `int dQ1 dQ2 |rho|^2 dQ^2 g^2`, the state-dependent factor of the rate.
pub fn rate_integral(rho: &DensityMatrixGrid, f: &CouplingFunction, side: Side) -> Result<f64> {
    let grid = rho.grid();
    f.ensure_domain(grid.q_min, grid.q_max)?;
    let h = grid.spacing();
    let n = grid.n_points;
    let q = grid.points();
    let values = rho.values();
    let total = sum::par_rows(n, |i| {
        let row = values.row(i);
        sum::sum((0..n).map(|j| {
            let dq = q[i] - q[j];
            let qbar = 0.5 * (q[i] + q[j]);
            let jump = dq * side.effective_slope(f, qbar, dq);
            row[j].norm_sqr() * jump * jump
        }))
    });
    Ok(h * h * total)
}

fn check_scale(cb: f64, hbar: f64) -> Result<()> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::config("model.hbar", "must be finite and > 0"));
    }
    if !(cb.is_finite() && cb >= 0.0) {
        return Err(Error::config("bath", "thermal strength must be finite and >= 0"));
    }
    Ok(())
}

/// Classical `1/tau_{c,2}^2`.
pub fn classical_rate2(
    rho0: &DensityMatrixGrid,
    f: &CouplingFunction,
    cb: f64,
    hbar: f64,
) -> Result<f64> {
    check_scale(cb, hbar)?;
    Ok(cb / hbar * rate_integral(rho0, f, Side::Classical)?)
}

/// Quantum `1/tau_{q,2}^2`.
pub fn quantum_rate2(
    rho0: &DensityMatrixGrid,
    f: &CouplingFunction,
    cb: f64,
    hbar: f64,
) -> Result<f64> {
    check_scale(cb, hbar)?;
    Ok(cb / hbar * rate_integral(rho0, f, Side::Quantum)?)
}

pub fn rate2(
    rho0: &DensityMatrixGrid,
    f: &CouplingFunction,
    bath: &BathSpec,
    side: Side,
) -> Result<f64> {
    let cb = bath.thermal_strength();
    match side {
        Side::Classical => classical_rate2(rho0, f, cb, bath.hbar()),
        Side::Quantum => quantum_rate2(rho0, f, cb, bath.hbar()),
    }
}

/// Both rates at the bath's `hbar`.
pub fn rate_pair(rho0: &DensityMatrixGrid, f: &CouplingFunction, bath: &BathSpec) -> Result<RatePair> {
    let cb = bath.thermal_strength();
    let hbar = bath.hbar();
    Ok(RatePair::new(
        classical_rate2(rho0, f, cb, hbar)?,
        quantum_rate2(rho0, f, cb, hbar)?,
    ))
}

/// Closed form for `f = Q` and a pure state of position variance `delta2q`:
/// `2 delta2q C_b / hbar`.
pub fn linear_closed_form(delta2q: f64, bath: &BathSpec) -> Result<f64> {
    if !(delta2q.is_finite() && delta2q >= 0.0) {
        return Err(Error::config("delta2q", "variance must be finite and >= 0"));
    }
    Ok(2.0 * delta2q * bath.thermal_strength() / bath.hbar())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub separation: f64,
    pub grid_points: usize,
    pub grid_spacing: f64,
    pub rates: RatePair,
}

/// Rates for equal cats centered at the origin with each listed separation.
/// Each cat gets its own auto-sized grid.
pub fn separation_scan(
    f: &CouplingFunction,
    separations: &[f64],
    sigma: f64,
    bath: &BathSpec,
) -> Result<Vec<ScanPoint>> {
    if separations.is_empty() {
        return Err(Error::config("scan.separations", "at least one separation"));
    }
    if separations.windows(2).any(|w| w[1] <= w[0]) || separations[0] <= 0.0 {
        return Err(Error::config(
            "scan.separations",
            "must be positive and strictly increasing",
        ));
    }
    if !(sigma > 0.0 && sigma < separations[0]) {
        return Err(Error::config(
            "scan.sigma",
            "must be positive and smaller than the smallest separation",
        ));
    }
    separations
        .iter()
        .map(|&separation| {
            let state = SuperpositionState::cat(0.0, separation, sigma)?;
            let grid = GridSpec::auto(&state)?;
            let rho = build_density_matrix(&state, &grid, bath.hbar())?;
            Ok(ScanPoint {
                separation,
                grid_points: grid.n_points,
                grid_spacing: grid.spacing(),
                rates: rate_pair(&rho, f, bath)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HbarScanPoint {
    pub hbar: f64,
    pub rates: RatePair,
}

/// Rates for a fixed density-matrix grid at several values of `hbar`. The
/// bath keeps its modes and temperature; only `hbar` changes.
pub fn hbar_scan(
    rho0: &DensityMatrixGrid,
    f: &CouplingFunction,
    bath: &BathSpec,
    hbars: &[f64],
) -> Result<Vec<HbarScanPoint>> {
    if hbars.is_empty() {
        return Err(Error::config("scan.hbar", "at least one value"));
    }
    // The integrals do not involve hbar; only the prefactor C_b / hbar does.
    let classical = rate_integral(rho0, f, Side::Classical)?;
    let quantum = rate_integral(rho0, f, Side::Quantum)?;
    hbars
        .iter()
        .map(|&hbar| {
            let scaled = bath.with_hbar(hbar)?;
            let prefactor = scaled.thermal_strength() / hbar;
            Ok(HbarScanPoint {
                hbar,
                rates: RatePair::new(prefactor * classical, prefactor * quantum),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Temperature;
    use num_complex::Complex64;

    fn gaussian(sigma: f64, center: f64) -> DensityMatrixGrid {
        let state = SuperpositionState::gaussian(center, sigma).unwrap();
        let grid = GridSpec::auto(&state).unwrap();
        build_density_matrix(&state, &grid, 1.0).unwrap()
    }

    fn cat(separation: f64, sigma: f64) -> DensityMatrixGrid {
        let state = SuperpositionState::cat(0.0, separation, sigma).unwrap();
        let grid = GridSpec::auto(&state).unwrap();
        build_density_matrix(&state, &grid, 1.0).unwrap()
    }

    #[test]
    fn linear_gaussian_matches_closed_form_substitution() {
        let rho = gaussian(0.5f64.sqrt(), 0.0);
        let rate = classical_rate2(&rho, &CouplingFunction::linear(1.0), 0.5, 1.0).unwrap();
        assert!((rate - 0.5).abs() < 1e-10, "{rate}");
    }

    #[test]
    fn zero_thermal_strength_gives_zero_rates() {
        let rho = cat(3.0, 0.2);
        let f = CouplingFunction::cubic();
        assert_eq!(classical_rate2(&rho, &f, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(quantum_rate2(&rho, &f, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_and_quadratic_sides_agree_exactly() {
        let rho = cat(2.5, 0.3);
        for f in [
            CouplingFunction::linear(1.7),
            CouplingFunction::quadratic(1.0, 0.3),
            CouplingFunction::polynomial(vec![0.2, -1.0, 0.8]).unwrap(),
        ] {
            let c = rate_integral(&rho, &f, Side::Classical).unwrap();
            let q = rate_integral(&rho, &f, Side::Quantum).unwrap();
            assert_eq!(c, q);
        }
    }

    // Leading-order block decomposition of the cat integrals: the two
    // coherence blocks (weight 1/4 each, dQ ~ dQ_ab, Qbar ~ 0) and the two
    // packet blocks (weight 1/4 each, dQ ~ N(0, 2 sigma^2), Qbar ~ Q_a or Q_b).
    //   cubic: classical ~ 9 sigma^2 dQ_ab^4 / 16, quantum ~ dQ_ab^6 / 32
    //   matched sine: classical ~ pi^2, quantum ~ 4 pi^2 sigma^2 / dQ_ab^2
    // The packet blocks put a floor under the ratios that only shrinks as
    // sigma / dQ_ab -> 0.

    #[test]
    fn cubic_cat_ratio_follows_packet_width_scaling() {
        let separation = 4.0;
        let f = CouplingFunction::cubic();
        for (div, tol) in [(40.0, 0.05), (200.0, 0.01)] {
            let rho = cat(separation, separation / div);
            let pair = RatePair::new(
                classical_rate2(&rho, &f, 0.5, 1.0).unwrap(),
                quantum_rate2(&rho, &f, 0.5, 1.0).unwrap(),
            );
            let predicted = div * div / 18.0;
            assert!((pair.ratio / predicted - 1.0).abs() < tol, "{pair:?}");
        }
        let rho = cat(separation, separation / 200.0);
        let pair = rate_pair(&rho, &f, &BathSpec::unit_mode(Temperature::Zero, 1.0)).unwrap();
        assert!(pair.ratio > 1e3);
    }

    #[test]
    fn matched_sine_cat_ratio_follows_packet_width_scaling() {
        let separation = 4.0;
        let f = CouplingFunction::sinusoidal(1.0, separation, std::f64::consts::FRAC_PI_4).unwrap();
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        for (div, tol) in [(40.0, 0.05), (200.0, 0.01)] {
            let rho = cat(separation, separation / div);
            let pair = rate_pair(&rho, &f, &bath).unwrap();
            let predicted = div * div / 4.0;
            assert!((1.0 / pair.ratio / predicted - 1.0).abs() < tol, "{pair:?}");
            let classical = std::f64::consts::PI.powi(2) * bath.thermal_strength();
            assert!((pair.classical_rate / classical - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn bounded_quantum_rate_is_capped() {
        let bath = BathSpec::unit_mode(Temperature::Beta(0.7), 1.0);
        let f = CouplingFunction::sinusoidal(1.5, 0.9, 0.3).unwrap();
        let cap = bath.thermal_strength() / bath.hbar() * 4.0 * 1.5 * 1.5;
        for sep in [1.0, 5.0, 17.0] {
            let rho = cat(sep, 0.2);
            assert!(rate2(&rho, &f, &bath, Side::Quantum).unwrap() <= cap);
        }
    }

    #[test]
    fn rates_invariant_under_phase_and_adjoint() {
        let rho = cat(2.0, 0.25);
        let f = CouplingFunction::polynomial(vec![0.0, 0.5, 0.0, 1.0]).unwrap();
        let phase = Complex64::from_polar(1.0, 0.9);
        let rotated = DensityMatrixGrid::from_values(
            *rho.grid(),
            rho.values().mapv(|z| z * phase * phase.conj()),
            1.0,
        )
        .unwrap();
        let adjoint = DensityMatrixGrid::from_values(
            *rho.grid(),
            rho.values().t().mapv(|z| z.conj()),
            1.0,
        )
        .unwrap();
        for side in Side::BOTH {
            let base = rate_integral(&rho, &f, side).unwrap();
            for other in [&rotated, &adjoint] {
                let value = rate_integral(other, &f, side).unwrap();
                assert!((value - base).abs() < 1e-13 * base);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        assert_eq!(linear_closed_form(0.5, &bath).unwrap(), 0.5);
        assert_eq!(linear_closed_form(0.0, &bath).unwrap(), 0.0);
        assert!(linear_closed_form(-1.0, &bath).is_err());
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(RatePair::new(0.0, 1.0).ratio, f64::INFINITY);
        assert_eq!(RatePair::new(0.0, 0.0).ratio, 1.0);
        assert_eq!(RatePair::new(2.0, 1.0).ratio, 0.5);
    }

    #[test]
    fn linear_scan_has_unit_ratio() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let points =
            separation_scan(&CouplingFunction::linear(1.0), &[1.0, 2.0, 4.0], 0.2, &bath).unwrap();
        assert!(points.iter().all(|p| p.rates.ratio == 1.0));
    }

    #[test]
    fn scan_rejects_unsorted_separations() {
        let bath = BathSpec::unit_mode(Temperature::Zero, 1.0);
        let f = CouplingFunction::linear(1.0);
        assert!(separation_scan(&f, &[2.0, 1.0], 0.1, &bath).is_err());
        assert!(separation_scan(&f, &[1.0, 2.0], 1.5, &bath).is_err());
    }

    #[test]
    fn hbar_scan_ratio_is_hbar_independent() {
        let rho = cat(3.0, 0.2);
        let bath = BathSpec::unit_mode(Temperature::Beta(1.0), 1.0);
        let f = CouplingFunction::cubic();
        let points = hbar_scan(&rho, &f, &bath, &[1.0, 100.0]).unwrap();
        let (a, b) = (points[0].rates.ratio, points[1].rates.ratio);
        assert!((a - b).abs() <= 1e-12 * a.abs());
        assert!(points[0].rates.classical_rate != points[1].rates.classical_rate);
    }
}
