//! Model parameters and the system-bath coupling function `f(Q)`.
//!
//! Every quantum/classical difference in this crate comes down to how
//! `f` is probed: the classical dynamics only sees the local slope
//! `df/dQ` at the mean position, while the quantum dynamics sees the
//! finite difference `[f(Qbar + dQ/2) - f(Qbar - dQ/2)] / dQ` across the
//! two branches of the superposition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bath temperature. Zero temperature is kept as its own variant so that the
/// thermal factor `coth(beta hbar omega / 2)` is exactly one there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Temperature {
    Zero,
    Beta(f64),
}

impl Temperature {
    /// `coth(beta * hbar * omega / 2)`.
    pub fn coth_factor(&self, hbar: f64, omega: f64) -> f64 {
        match *self {
            Temperature::Zero => 1.0,
            Temperature::Beta(beta) => 1.0 / (0.5 * beta * hbar * omega).tanh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub hbar: f64,
    pub temperature: Temperature,
    /// Carried through configs and manifests. None of the implemented
    /// formulas depend on the system Hamiltonian.
    pub system_mass: f64,
}

impl ModelConfig {
    pub fn new(hbar: f64, temperature: Temperature, system_mass: f64) -> Result<Self> {
        let config = Self {
            hbar,
            temperature,
            system_mass,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::config("model.hbar", "must be finite and > 0"));
        }
        if let Temperature::Beta(beta) = self.temperature {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(Error::config(
                    "model.beta",
                    "must be finite and > 0 (omit for zero temperature)",
                ));
            }
        }
        if !(self.system_mass.is_finite() && self.system_mass > 0.0) {
            return Err(Error::config("model.system_mass", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Which dynamics propagates the reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Classical Liouville dynamics; sees `df/dQ` at the mean position.
    Classical,
    /// Quantum dynamics; sees the finite difference across the branches.
    Quantum,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Classical, Side::Quantum];

    /// `df/dQ (qbar)` for the classical side, `Delta f / Delta Q` for the
    /// quantum side.
    pub(crate) fn effective_slope(self, f: &CouplingFunction, qbar: f64, dq: f64) -> f64 {
        match self {
            Side::Classical => f.slope_unchecked(qbar),
            Side::Quantum => f.finite_difference_unchecked(qbar, dq),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Classical => "classical",
            Side::Quantum => "quantum",
        }
    }
}

/// Coupling function `f(Q)` entering `V_sb = sum_j C_j f(Q) q_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingFunction {
    /// `f = a Q`
    Linear { a: f64 },
    /// `f = a Q + b Q^2`
    Quadratic { a: f64, b: f64 },
    /// `f = sum_k c_k Q^k`, lowest order first.
    Polynomial { coefficients: Vec<f64> },
    /// `f = A sin(2 pi Q / L + theta)`
    Sinusoidal {
        amplitude: f64,
        period: f64,
        phase: f64,
    },
    Tabulated(TabulatedCoupling),
}

impl CouplingFunction {
    pub fn linear(a: f64) -> Self {
        CouplingFunction::Linear { a }
    }

    pub fn quadratic(a: f64, b: f64) -> Self {
        CouplingFunction::Quadratic { a, b }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::config(
                "coupling.polynomial.coefficients",
                "at least one coefficient required",
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::config(
                "coupling.polynomial.coefficients",
                "coefficients must be finite",
            ));
        }
        Ok(CouplingFunction::Polynomial { coefficients })
    }

    /// `f = Q^3`, the cubic model.
    pub fn cubic() -> Self {
        CouplingFunction::Polynomial {
            coefficients: vec![0.0, 0.0, 0.0, 1.0],
        }
    }

    pub fn sinusoidal(amplitude: f64, period: f64, phase: f64) -> Result<Self> {
        if !(period.is_finite() && period != 0.0) {
            return Err(Error::config(
                "coupling.sinusoidal.period",
                "must be finite and nonzero",
            ));
        }
        if !(amplitude.is_finite() && phase.is_finite()) {
            return Err(Error::config(
                "coupling.sinusoidal",
                "amplitude and phase must be finite",
            ));
        }
        Ok(CouplingFunction::Sinusoidal {
            amplitude,
            period,
            phase,
        })
    }

    pub fn tabulated(q: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        TabulatedCoupling::new(q, values).map(CouplingFunction::Tabulated)
    }

    /// `f(Q)`.
    pub fn eval(&self, q: f64) -> Result<f64> {
        self.check_point(q)?;
        Ok(self.eval_unchecked(q))
    }

    /// `df/dQ` at `qbar`; analytic for the parametric variants.
    pub fn slope(&self, qbar: f64) -> Result<f64> {
        self.check_point(qbar)?;
        Ok(self.slope_unchecked(qbar))
    }

    /// `[f(qbar + dq/2) - f(qbar - dq/2)] / dq`, and the slope at `dq = 0`.
    pub fn finite_difference(&self, qbar: f64, dq: f64) -> Result<f64> {
        let half = 0.5 * dq.abs();
        self.check_point(qbar - half)?;
        self.check_point(qbar + half)?;
        Ok(self.finite_difference_unchecked(qbar, dq))
    }

    /// Errors if any point of `[lo, hi]` lies outside a tabulated range.
    /// Parametric variants are defined everywhere.
    pub fn ensure_domain(&self, lo: f64, hi: f64) -> Result<()> {
        self.check_point(lo)?;
        self.check_point(hi)
    }

    /// Upper bound on `|f|`, when one exists.
    ///
    /// Sinusoids and constants are bounded; nonconstant polynomials are not.
    /// Tabulated couplings only exist on a finite interval and report `None`.
    pub fn bound(&self) -> Option<f64> {
        match self {
            CouplingFunction::Sinusoidal { amplitude, .. } => Some(amplitude.abs()),
            CouplingFunction::Linear { a } => (*a == 0.0).then_some(0.0),
            CouplingFunction::Quadratic { a, b } => (*a == 0.0 && *b == 0.0).then_some(0.0),
            CouplingFunction::Polynomial { coefficients } => {
                let constant = coefficients[1..].iter().all(|&c| c == 0.0);
                constant.then(|| coefficients[0].abs())
            }
            CouplingFunction::Tabulated(_) => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.bound().is_some()
    }

    /// True when `f = a Q + b Q^2 (+ const)`, where the finite difference and
    /// the slope coincide identically.
    pub fn is_at_most_quadratic(&self) -> bool {
        match self {
            CouplingFunction::Linear { .. } | CouplingFunction::Quadratic { .. } => true,
            CouplingFunction::Polynomial { coefficients } => {
                coefficients.iter().skip(3).all(|&c| c == 0.0)
            }
            _ => false,
        }
    }

    fn check_point(&self, q: f64) -> Result<()> {
        match self {
            CouplingFunction::Tabulated(t) => t.check(q),
            _ => Ok(()),
        }
    }

    pub(crate) fn eval_unchecked(&self, q: f64) -> f64 {
        match self {
            CouplingFunction::Linear { a } => a * q,
            CouplingFunction::Quadratic { a, b } => a * q + b * q * q,
            CouplingFunction::Polynomial { coefficients } => horner(coefficients, q),
            CouplingFunction::Sinusoidal {
                amplitude,
                period,
                phase,
            } => amplitude * (2.0 * PI * q / period + phase).sin(),
            CouplingFunction::Tabulated(t) => t.value(q),
        }
    }

    pub(crate) fn slope_unchecked(&self, q: f64) -> f64 {
        match self {
            CouplingFunction::Linear { a } => *a,
            CouplingFunction::Quadratic { a, b } => a + 2.0 * b * q,
            CouplingFunction::Polynomial { coefficients } => poly_slope(coefficients, q),
            CouplingFunction::Sinusoidal {
                amplitude,
                period,
                phase,
            } => {
                let k = 2.0 * PI / period;
                amplitude * k * (k * q + phase).cos()
            }
            CouplingFunction::Tabulated(t) => t.derivative(q),
        }
    }

    pub(crate) fn finite_difference_unchecked(&self, qbar: f64, dq: f64) -> f64 {
        if dq == 0.0 {
            return self.slope_unchecked(qbar);
        }
        match self {
            // The difference quotient of a quadratic is its midpoint slope.
            CouplingFunction::Linear { .. } | CouplingFunction::Quadratic { .. } => {
                self.slope_unchecked(qbar)
            }
            CouplingFunction::Polynomial { coefficients } => {
                poly_slope(coefficients, qbar) + poly_odd_remainder(coefficients, qbar, dq)
            }
            CouplingFunction::Sinusoidal {
                amplitude,
                period,
                phase,
            } => {
                let k = 2.0 * PI / period;
                2.0 * amplitude * (k * qbar + phase).cos() * (0.5 * k * dq).sin() / dq
            }
            CouplingFunction::Tabulated(t) => {
                (t.value(qbar + 0.5 * dq) - t.value(qbar - 0.5 * dq)) / dq
            }
        }
    }
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_slope(coefficients: &[f64], x: f64) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
}

/// Terms of `[p(x + d/2) - p(x - d/2)] / d` beyond the slope:
/// `sum_k c_k sum_{j odd >= 3} C(k, j) x^(k-j) (d/2)^(j-1)`.
/// Expanded this way the quotient stays accurate as `d -> 0`.
fn poly_odd_remainder(coefficients: &[f64], x: f64, d: f64) -> f64 {
    let half = 0.5 * d;
    let mut total = 0.0;
    for (k, &c) in coefficients.iter().enumerate().skip(3) {
        if c == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        let mut j = 3;
        while j <= k {
            inner += binomial(k, j) * x.powi((k - j) as i32) * half.powi((j - 1) as i32);
            j += 2;
        }
        total += c * inner;
    }
    total
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coupling sampled on a strictly increasing grid.
///
/// Values are interpolated with a cubic Hermite spline whose node slopes are
/// centered differences (one-sided at the ends), so both `f` and `df/dQ` are
/// accurate to O(h^2).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCoupling {
    q: Vec<f64>,
    values: Vec<f64>,
    node_slopes: Vec<f64>,
}

impl TabulatedCoupling {
    pub fn new(q: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if q.len() != values.len() {
            return Err(Error::config(
                "coupling.tabulated",
                format!("{} positions but {} values", q.len(), values.len()),
            ));
        }
        if q.len() < 3 {
            return Err(Error::config(
                "coupling.tabulated",
                "at least three nodes required",
            ));
        }
        if q.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::config("coupling.tabulated", "non-finite entry"));
        }
        if q.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "coupling.tabulated.q",
                "positions must be strictly increasing",
            ));
        }
        let n = q.len();
        let node_slopes = (0..n)
            .map(|i| {
                let (lo, hi) = match i {
                    0 => (0, 1),
                    i if i == n - 1 => (n - 2, n - 1),
                    i => (i - 1, i + 1),
                };
                (values[hi] - values[lo]) / (q[hi] - q[lo])
            })
            .collect();
        Ok(Self {
            q,
            values,
            node_slopes,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.q[0], self.q[self.q.len() - 1])
    }

    fn check(&self, q: f64) -> Result<()> {
        let (min, max) = self.range();
        if q >= min && q <= max {
            Ok(())
        } else {
            Err(Error::Domain { q, min, max })
        }
    }

    fn interval(&self, x: f64) -> usize {
        let idx = self.q.partition_point(|&node| node <= x);
        idx.clamp(1, self.q.len() - 1) - 1
    }

    fn value(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.q[i + 1] - self.q[i];
        let s = (x - self.q[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[i]
            + h10 * h * self.node_slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.node_slopes[i + 1]
    }

    fn derivative(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.q[i + 1] - self.q[i];
        let s = (x - self.q[i]) / h;
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        (d00 * self.values[i] + d01 * self.values[i + 1]) / h
            + d10 * self.node_slopes[i]
            + d11 * self.node_slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn eval_examples() {
        assert_eq!(CouplingFunction::linear(1.0).eval(3.0).unwrap(), 3.0);
        let sine = CouplingFunction::sinusoidal(1.0, 4.0, FRAC_PI_4).unwrap();
        assert!((sine.eval(2.0).unwrap() + 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(CouplingFunction::cubic().eval(-1.0).unwrap(), -1.0);
    }

    #[test]
    fn slope_examples() {
        assert_eq!(CouplingFunction::cubic().slope(0.0).unwrap(), 0.0);
        let square = CouplingFunction::polynomial(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(square.slope(1.5).unwrap(), 3.0);
        let l = 3.0;
        let theta = 0.4;
        let sine = CouplingFunction::sinusoidal(1.0, l, theta).unwrap();
        let expected = 2.0 * PI / l * theta.cos();
        assert!((sine.slope(0.0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn cubic_difference_at_origin_differs_from_slope() {
        let cubic = CouplingFunction::cubic();
        assert_eq!(cubic.finite_difference(0.0, 2.0).unwrap(), 1.0);
        assert_eq!(cubic.slope(0.0).unwrap(), 0.0);
    }

    #[test]
    fn sine_matched_to_separation_has_zero_difference() {
        let dq = 6.0;
        let sine = CouplingFunction::sinusoidal(1.0, dq, FRAC_PI_4).unwrap();
        assert!(sine.finite_difference(0.0, dq).unwrap().abs() < 1e-15);
        // Direct evaluation agrees: f(Q_a) = f(Q_b).
        let fa = sine.eval(-dq / 2.0).unwrap();
        let fb = sine.eval(dq / 2.0).unwrap();
        assert!((fa - fb).abs() < 1e-15);
    }

    #[test]
    fn zero_separation_returns_slope() {
        let f = CouplingFunction::polynomial(vec![0.3, -1.0, 0.5, 2.0, -0.7]).unwrap();
        assert_eq!(
            f.finite_difference(0.8, 0.0).unwrap(),
            f.slope(0.8).unwrap()
        );
    }

    #[test]
    fn sinusoid_rejects_zero_period() {
        assert!(CouplingFunction::sinusoidal(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn boundedness_flags() {
        assert!(CouplingFunction::sinusoidal(2.0, 1.0, 0.0).unwrap().is_bounded());
        assert_eq!(
            CouplingFunction::sinusoidal(-2.0, 1.0, 0.0).unwrap().bound(),
            Some(2.0)
        );
        assert!(!CouplingFunction::linear(1.0).is_bounded());
        assert!(!CouplingFunction::cubic().is_bounded());
        assert!(CouplingFunction::polynomial(vec![4.0, 0.0]).unwrap().is_bounded());
    }

    #[test]
    fn tabulated_rejects_unsorted_grid() {
        let err = CouplingFunction::tabulated(vec![0.0, 2.0, 1.0], vec![0.0; 3]);
        assert!(err.is_err());
    }

    #[test]
    fn tabulated_out_of_range_is_domain_error() {
        let f = CouplingFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert!(matches!(f.eval(2.5), Err(Error::Domain { .. })));
        assert!(matches!(f.finite_difference(1.5, 2.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn tabulated_sine_is_second_order_accurate() {
        let errors: Vec<(f64, f64)> = [50usize, 100, 200]
            .iter()
            .map(|&n| {
                let q: Vec<f64> = (0..=n).map(|i| -2.0 + 4.0 * i as f64 / n as f64).collect();
                let v: Vec<f64> = q.iter().map(|x| x.sin()).collect();
                let f = CouplingFunction::tabulated(q, v).unwrap();
                let probes = (0..97).map(|i| -1.9 + 3.8 * i as f64 / 96.0);
                let (mut ev, mut es) = (0.0f64, 0.0f64);
                for x in probes {
                    ev = ev.max((f.eval(x).unwrap() - x.sin()).abs());
                    es = es.max((f.slope(x).unwrap() - x.cos()).abs());
                }
                (ev, es)
            })
            .collect();
        for pair in errors.windows(2) {
            // halving h cuts the error by about 4
            assert!(pair[1].0 < pair[0].0 / 3.0, "{errors:?}");
            assert!(pair[1].1 < pair[0].1 / 3.0, "{errors:?}");
        }
        assert!(errors[2].0 < 1e-4 && errors[2].1 < 1e-3);
    }

    #[test]
    fn tabulated_reproduces_nodes() {
        let q = vec![-1.0, 0.0, 0.5, 2.0];
        let v = vec![3.0, -1.0, 0.25, 7.0];
        let f = CouplingFunction::tabulated(q.clone(), v.clone()).unwrap();
        for (x, y) in q.iter().zip(&v) {
            assert!((f.eval(*x).unwrap() - y).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_temperature_factor_is_exactly_one() {
        assert_eq!(Temperature::Zero.coth_factor(1.0, 1e-300), 1.0);
        assert_eq!(Temperature::Beta(1e300).coth_factor(1.0, 1.0), 1.0);
    }

    #[test]
    fn model_config_validation() {
        assert!(ModelConfig::new(1.0, Temperature::Zero, 1.0).is_ok());
        assert!(ModelConfig::new(0.0, Temperature::Zero, 1.0).is_err());
        assert!(ModelConfig::new(1.0, Temperature::Beta(-1.0), 1.0).is_err());
    }

    proptest! {
        #[test]
        fn quadratic_difference_equals_slope(
            a in -5.0..5.0f64, b in -5.0..5.0f64,
            qbar in -10.0..10.0f64, dq in -20.0..20.0f64,
        ) {
            let f = CouplingFunction::quadratic(a, b);
            prop_assert_eq!(
                f.finite_difference(qbar, dq).unwrap(),
                f.slope(qbar).unwrap()
            );
            let p = CouplingFunction::polynomial(vec![0.7, a, b]).unwrap();
            prop_assert_eq!(
                p.finite_difference(qbar, dq).unwrap(),
                p.slope(qbar).unwrap()
            );
        }

        #[test]
        fn polynomial_difference_matches_direct_quotient(
            c in proptest::collection::vec(-2.0..2.0f64, 1..7),
            qbar in -2.0..2.0f64, dq in 0.5..4.0f64,
        ) {
            let f = CouplingFunction::polynomial(c).unwrap();
            let direct = (f.eval(qbar + dq / 2.0).unwrap() - f.eval(qbar - dq / 2.0).unwrap()) / dq;
            let fd = f.finite_difference(qbar, dq).unwrap();
            prop_assert!((fd - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
        }

        #[test]
        fn bounded_difference_respects_amplitude(
            amp in -3.0..3.0f64, period in 0.1..10.0f64, phase in -3.0..3.0f64,
            qbar in -50.0..50.0f64, dq in -100.0..100.0f64,
        ) {
            let f = CouplingFunction::sinusoidal(amp, period, phase).unwrap();
            let jump = dq * f.finite_difference(qbar, dq).unwrap();
            prop_assert!(jump.abs() <= 2.0 * amp.abs() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn difference_converges_quadratically_to_slope() {
        let f = CouplingFunction::polynomial(vec![0.0, 1.0, -0.5, 0.3, 0.1]).unwrap();
        let sine = CouplingFunction::sinusoidal(1.3, 2.0, 0.2).unwrap();
        for func in [f, sine] {
            let qbar = 0.37;
            let slope = func.slope(qbar).unwrap();
            let err = |dq: f64| (func.finite_difference(qbar, dq).unwrap() - slope).abs();
            let ratio = err(1e-2) / err(5e-3);
            assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
        }
    }
}
