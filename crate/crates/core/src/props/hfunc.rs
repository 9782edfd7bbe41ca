use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this argument both functions switch to their Taylor forms.
const SERIES_CUTOFF: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HKind {
    /// `x^2 (x + sin x) / (x - sin x)`
    Sin,
    /// `x^2 (sinh x + x) / (sinh x - x)`
    Hyp,
}

impl HKind {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            HKind::Sin => h_sin(x),
            HKind::Hyp => h_hyp(x),
        }
    }
}

// (x - sin x) / (x^3/6) and (sinh x - x) / (x^3/6), alternating vs all-plus
fn cubic_ratio(x2: f64, sign: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    // coefficients 3!/(2k+3)!
    for k in 1..7 {
        let n = (2 * k + 2) * (2 * k + 3);
        term *= sign * x2 / n as f64;
        sum += term;
    }
    sum
}

pub fn h_sin(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_CUTOFF {
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        return 6.0 * (1.0 + sinc) / cubic_ratio(x * x, -1.0);
    }
    let t = x.sin() / x;
    x * x * (1.0 + t) / (1.0 - t)
}

pub fn h_hyp(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_CUTOFF {
        let shc = if x == 0.0 { 1.0 } else { x.sinh() / x };
        return 6.0 * (shc + 1.0) / cubic_ratio(x * x, 1.0);
    }
    // x / sinh x underflows to 0 for huge x, giving the x^2 asymptote
    let t = x / x.sinh();
    x * x * (1.0 + t) / (1.0 - t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HMinimum {
    pub kind: HKind,
    pub x: f64,
    pub h: f64,
}

pub const MIN_X_MAX: f64 = 50.0;
pub const MIN_SCAN: usize = 10_000;

/// Global minimum of `h` on `[0, x_max]`: uniform scan (the `x = 0` point
/// takes the limit value 12), then golden-section refinement around the best
/// scan point.
pub fn minimize_h(kind: HKind, x_max: f64, n_scan: usize) -> Result<HMinimum> {
    if !(x_max >= MIN_X_MAX && x_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "x_max must be at least {MIN_X_MAX}, got {x_max}"
        )));
    }
    if n_scan < MIN_SCAN {
        return Err(Error::InvalidInput(format!(
            "n_scan must be at least {MIN_SCAN}, got {n_scan}"
        )));
    }
    let dx = x_max / n_scan as f64;
    let (best, hbest) = (0..=n_scan)
        .map(|i| (i, kind.eval(i as f64 * dx)))
        .fold((0, f64::INFINITY), |acc, (i, h)| if h < acc.1 { (i, h) } else { acc });
    let lo = best.saturating_sub(1) as f64 * dx;
    let hi = ((best + 1).min(n_scan)) as f64 * dx;
    let (x, h) = golden_section(|x| kind.eval(x), lo, hi, 1e-12);
    Ok(if h < hbest {
        HMinimum { kind, x, h }
    } else {
        HMinimum {
            kind,
            x: best as f64 * dx,
            h: hbest,
        }
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `(x, h_sin, h_hyp)` rows on `x = step, 2 step, ..., x_max`.
pub fn h_curves(step: f64, x_max: f64) -> Vec<(f64, f64, f64)> {
    let n = (x_max / step + 1e-9).floor() as usize;
    (1..=n)
        .map(|i| {
            let x = i as f64 * step;
            (x, h_sin(x), h_hyp(x))
        })
        .collect()
}
