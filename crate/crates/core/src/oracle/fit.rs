//! Least-squares `S(t) - S(0) ~ c1 t + c2 t^2` over a short window.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Side;
use crate::strongdec::DecoherenceSeries;
use crate::sum::NeumaierSum;

pub const MIN_FIT_POINTS: usize = 8;
const CONDITION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub linear: f64,
    pub quadratic: f64,
    pub points: usize,
}

/// Fit `growth` (already offset so that it vanishes at `t = 0`) on
/// `0 <= t <= window`. No constant term is fitted.
pub fn short_time_fit(times: &[f64], growth: &[f64], window: f64) -> Result<QuadraticFit> {
    if times.len() != growth.len() {
        return Err(Error::Shape(format!(
            "{} times but {} values",
            times.len(),
            growth.len()
        )));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::Fit(format!("window must be finite and > 0, got {window}")));
    }
    let mut s2 = NeumaierSum::new();
    let mut s3 = NeumaierSum::new();
    let mut s4 = NeumaierSum::new();
    let mut y1 = NeumaierSum::new();
    let mut y2 = NeumaierSum::new();
    let mut points = 0;
    for (&t, &y) in times.iter().zip(growth) {
        if !(0.0..=window).contains(&t) {
            continue;
        }
        let u = t / window;
        points += 1;
        s2.add(u * u);
        s3.add(u * u * u);
        s4.add(u * u * u * u);
        y1.add(y * u);
        y2.add(y * u * u);
    }
    if points < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{points} points in window {window:e}, need {MIN_FIT_POINTS}"
        )));
    }
    let (s2, s3, s4) = (s2.value(), s3.value(), s4.value());
    let det = s2 * s4 - s3 * s3;
    if !(det > CONDITION_FLOOR * s2 * s4) {
        return Err(Error::Fit("normal equations are singular".into()));
    }
    let (y1, y2) = (y1.value(), y2.value());
    let a = (y1 * s4 - y2 * s3) / det;
    let b = (s2 * y2 - s3 * y1) / det;
    Ok(QuadraticFit {
        linear: a / window,
        quadratic: b / (window * window),
        points,
    })
}

pub fn series_short_time_fit(
    series: &DecoherenceSeries,
    side: Side,
    window: f64,
) -> Result<QuadraticFit> {
    short_time_fit(&series.times, series.growth(side), window)
}
