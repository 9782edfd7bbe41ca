use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Even polynomial `V(x) = a2 x^2 + a4 x^4 + a6 x^6` with nonnegative
/// coefficients, so the global minimum sits at `x = 0` with `V(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct PolynomialPotential {
    coeffs_even: [f64; 3],
}

impl PolynomialPotential {
    pub fn new(a2: f64, a4: f64, a6: f64) -> Result<Self> {
        let c = [a2, a4, a6];
        if c.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidPotential(format!(
                "coefficients must be finite and nonnegative, got {c:?}"
            )));
        }
        if c.iter().all(|a| *a == 0.0) {
            return Err(Error::InvalidPotential(
                "at least one coefficient must be positive".into(),
            ));
        }
        Ok(Self { coeffs_even: c })
    }

    pub fn harmonic(a2: f64) -> Result<Self> {
        Self::new(a2, 0.0, 0.0)
    }

    pub fn coeffs(&self) -> [f64; 3] {
        self.coeffs_even
    }

    pub fn a2(&self) -> f64 {
        self.coeffs_even[0]
    }

    /// Only the quadratic coefficient is nonzero.
    pub fn is_harmonic(&self) -> bool {
        self.coeffs_even[1] == 0.0 && self.coeffs_even[2] == 0.0
    }

    pub fn value(&self, x: f64) -> f64 {
        let [a2, a4, a6] = self.coeffs_even;
        let x2 = x * x;
        x2 * (a2 + x2 * (a4 + x2 * a6))
    }
}

impl TryFrom<[f64; 3]> for PolynomialPotential {
    type Error = Error;

    fn try_from(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }
}

impl From<PolynomialPotential> for [f64; 3] {
    fn from(p: PolynomialPotential) -> Self {
        p.coeffs_even
    }
}

/// One-dimensional potential used for free environment potentials and for
/// continuous-variable system potentials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FreePotential {
    Zero,
    /// `depth * (1 - exp(-alpha (x - center)))^2`
    Morse {
        depth: f64,
        alpha: f64,
        center: f64,
    },
    /// `a2 x^2 + a4 x^4 + a6 x^6`, coefficients unrestricted in sign.
    Polynomial {
        a2: f64,
        a4: f64,
        a6: f64,
    },
}

impl FreePotential {
    /// `(1 - e^{-x})^2`.
    pub fn unit_morse() -> Self {
        FreePotential::Morse {
            depth: 1.0,
            alpha: 1.0,
            center: 0.0,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            FreePotential::Zero => 0.0,
            FreePotential::Morse { depth, alpha, center } => {
                let s = -(-alpha * (x - center)).exp_m1();
                depth * s * s
            }
            FreePotential::Polynomial { a2, a4, a6 } => {
                let x2 = x * x;
                x2 * (a2 + x2 * (a4 + x2 * a6))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FreePotential::Zero)
    }
}

impl Default for FreePotential {
    fn default() -> Self {
        Self::unit_morse()
    }
}

/// Environment particle of the spring-coupled model: free potential
/// `U_free(q) + offset` and spring `(c/2)(q - A - spring_min)^2`, whose unique
/// global minimum sits at `q - A = spring_min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZwanzigEnvSpec {
    #[serde(default)]
    pub u_free: FreePotential,
    #[serde(default)]
    pub spring_min: f64,
    #[serde(default)]
    pub offset: f64,
}

impl ZwanzigEnvSpec {
    pub fn new(u_free: FreePotential) -> Self {
        Self {
            u_free,
            spring_min: 0.0,
            offset: 0.0,
        }
    }

    pub fn free_value(&self, q: f64) -> f64 {
        self.u_free.value(q) + self.offset
    }

    /// Spring potential `U_k(x) = (x - spring_min)^2`; the coupling energy
    /// is `(c/2) U_k(q - A)`.
    pub fn spring(&self, x: f64) -> f64 {
        let d = x - self.spring_min;
        d * d
    }
}

impl Default for ZwanzigEnvSpec {
    fn default() -> Self {
        Self::new(FreePotential::unit_morse())
    }
}
