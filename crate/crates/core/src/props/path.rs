use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 64;

/// Moments of a sampled path over `[0, beta]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub mean: f64,
    pub mean_sq: f64,
    pub variance: f64,
}

/// How the time derivative of a [`SampledPath`] is obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivativeRule {
    /// Centered differences, wrapping around (`f(0) = f(beta)`).
    Periodic,
    /// Centered differences inside, second-order one-sided at the ends.
    Clamped,
    /// Exact derivative samples supplied with the path.
    Exact(Vec<f64>),
}

/// A function sampled on `n_t` uniform points `t_j = j beta / (n_t - 1)`.
#[derive(Clone, Debug)]
pub struct SampledPath {
    beta: f64,
    values: Vec<f64>,
    derivative: DerivativeRule,
}

impl SampledPath {
    pub fn new(beta: f64, values: Vec<f64>, derivative: DerivativeRule) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidBeta(beta));
        }
        if values.len() < MIN_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "path needs at least {MIN_SAMPLES} samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("path has non-finite samples".into()));
        }
        if let DerivativeRule::Exact(d) = &derivative {
            if d.len() != values.len() || d.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("derivative samples do not match the path".into()));
            }
        }
        Ok(Self {
            beta,
            values,
            derivative,
        })
    }

    pub fn from_fn(beta: f64, n_t: usize, f: impl Fn(f64) -> f64, derivative: DerivativeRule) -> Result<Self> {
        let values = time_grid(beta, n_t).into_iter().map(f).collect();
        Self::new(beta, values, derivative)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.beta / (self.values.len() - 1) as f64
    }

    /// `(1/beta) ∫_0^beta f dt` by the trapezoidal rule.
    pub fn time_average(&self, samples: &[f64]) -> f64 {
        trapezoid_mean(samples)
    }

    pub fn derivative(&self) -> Vec<f64> {
        let f = &self.values;
        let n = f.len();
        let h = self.step();
        match &self.derivative {
            DerivativeRule::Exact(d) => d.clone(),
            DerivativeRule::Periodic => (0..n)
                .map(|j| {
                    // the last sample repeats the first
                    let next = if j + 1 >= n - 1 { (j + 1) % (n - 1) } else { j + 1 };
                    let prev = if j == 0 { n - 2 } else { j - 1 };
                    (f[next] - f[prev]) / (2.0 * h)
                })
                .collect(),
            DerivativeRule::Clamped => (0..n)
                .map(|j| match j {
                    0 => (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h),
                    j if j == n - 1 => (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h),
                    j => (f[j + 1] - f[j - 1]) / (2.0 * h),
                })
                .collect(),
        }
    }

    /// `(1/beta) ∫ ḟ^2 dt`.
    pub fn mean_sq_derivative(&self) -> f64 {
        let d: Vec<f64> = self.derivative().iter().map(|x| x * x).collect();
        trapezoid_mean(&d)
    }
}

pub fn time_grid(beta: f64, n_t: usize) -> Vec<f64> {
    let h = beta / (n_t - 1) as f64;
    (0..n_t).map(|j| j as f64 * h).collect()
}

fn trapezoid_mean(samples: &[f64]) -> f64 {
    let n = samples.len();
    let inner: f64 = samples[1..n - 1].iter().sum();
    (inner + 0.5 * (samples[0] + samples[n - 1])) / (n - 1) as f64
}

/// Trapezoidal mean, mean square and variance.
pub fn path_stats(path: &SampledPath) -> PathStats {
    let mean = trapezoid_mean(path.values());
    let sq: Vec<f64> = path.values().iter().map(|x| x * x).collect();
    let mean_sq = trapezoid_mean(&sq);
    PathStats {
        mean,
        mean_sq,
        variance: mean_sq - mean * mean,
    }
}

/// Real trigonometric polynomial with period `beta`:
/// `c0 + Σ_n [a_n cos(2π n t/β) + b_n sin(2π n t/β)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPath {
    pub beta: f64,
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierPath {
    /// Independent standard normal coefficients for modes `1..=n_modes` and
    /// the constant term.
    pub fn gaussian<R: Rng + ?Sized>(beta: f64, n_modes: usize, rng: &mut R) -> Self {
        let mut draw = || -> f64 { StandardNormal.sample(rng) };
        let constant = draw();
        let mut cos = Vec::with_capacity(n_modes);
        let mut sin = Vec::with_capacity(n_modes);
        for _ in 0..n_modes {
            cos.push(draw());
            sin.push(draw());
        }
        Self {
            beta,
            constant,
            cos,
            sin,
        }
    }

    /// Low-pass filtered uniform noise: `n_noise` samples uniform in `[-1, 1]`,
    /// discrete Fourier modes above `cutoff` dropped, then rescaled so the
    /// supremum (estimated on a fine grid) is `0.99 * bound`.
    pub fn low_pass_noise<R: Rng + ?Sized>(beta: f64, n_noise: usize, cutoff: usize, bound: f64, rng: &mut R) -> Self {
        let u: Vec<f64> = (0..n_noise).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let m = n_noise as f64;
        let constant = u.iter().sum::<f64>() / m;
        let kmax = cutoff.min((n_noise - 1) / 2);
        let mut cos = Vec::with_capacity(kmax);
        let mut sin = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, uj) in u.iter().enumerate() {
                let phase = std::f64::consts::TAU * (k * j) as f64 / m;
                a += uj * phase.cos();
                b += uj * phase.sin();
            }
            cos.push(2.0 * a / m);
            sin.push(2.0 * b / m);
        }
        let mut p = Self {
            beta,
            constant,
            cos,
            sin,
        };
        let sup = p.sup_norm(64 * (kmax + 1));
        if sup > 0.0 {
            p.scale(0.99 * bound / sup);
        }
        p
    }

    pub fn scale(&mut self, s: f64) {
        self.constant *= s;
        self.cos.iter_mut().for_each(|c| *c *= s);
        self.sin.iter_mut().for_each(|c| *c *= s);
    }

    fn omega(&self) -> f64 {
        std::f64::consts::TAU / self.beta
    }

    pub fn value(&self, t: f64) -> f64 {
        let w = self.omega();
        self.constant
            + self
                .cos
                .iter()
                .zip(&self.sin)
                .enumerate()
                .map(|(k, (a, b))| {
                    let (s, c) = (w * (k + 1) as f64 * t).sin_cos();
                    a * c + b * s
                })
                .sum::<f64>()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let w = self.omega();
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(k, (a, b))| {
                let wk = w * (k + 1) as f64;
                let (s, c) = (wk * t).sin_cos();
                wk * (b * c - a * s)
            })
            .sum()
    }

    /// Exact variance over one period.
    pub fn variance(&self) -> f64 {
        0.5 * self.cos.iter().zip(&self.sin).map(|(a, b)| a * a + b * b).sum::<f64>()
    }

    /// Exact `(1/beta) ∫ ḟ^2`.
    pub fn mean_sq_derivative(&self) -> f64 {
        let w = self.omega();
        0.5 * self
            .cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(k, (a, b))| (w * (k + 1) as f64).powi(2) * (a * a + b * b))
            .sum::<f64>()
    }

    pub fn sup_norm(&self, n: usize) -> f64 {
        time_grid(self.beta, n.max(2))
            .into_iter()
            .map(|t| self.value(t).abs())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.cos.len().max(other.cos.len());
        let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        Self {
            beta: self.beta,
            constant: self.constant + other.constant,
            cos: (0..n).map(|k| get(&self.cos, k) + get(&other.cos, k)).collect(),
            sin: (0..n).map(|k| get(&self.sin, k) + get(&other.sin, k)).collect(),
        }
    }

    /// Samples with exact derivative samples attached.
    pub fn sample(&self, n_t: usize) -> Result<SampledPath> {
        let t = time_grid(self.beta, n_t);
        let values = t.iter().map(|&x| self.value(x)).collect();
        let d = t.iter().map(|&x| self.derivative(x)).collect();
        SampledPath::new(self.beta, values, DerivativeRule::Exact(d))
    }
}
