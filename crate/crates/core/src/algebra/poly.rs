use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::Rational;

/// Polynomial in λ with rational coefficients, lowest degree first.
///
/// Trailing zero coefficients are always stripped, so structural equality
/// is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LambdaPoly {
    coeffs: Vec<Rational>,
}

impl LambdaPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial `λ`.
    pub fn lambda() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Horner evaluation at a concrete λ.
    pub fn eval(&self, lambda: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * lambda + c)
    }
}

impl From<Rational> for LambdaPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;

    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                match rhs.coeffs.get(i) {
                    Some(b) => a + b,
                    None => a,
                }
            })
            .collect();
        LambdaPoly::from_coeffs(coeffs)
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;

    fn neg(self) -> LambdaPoly {
        LambdaPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;

    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        self + &(-rhs)
    }
}

impl Mul for &LambdaPoly {
    type Output = LambdaPoly;

    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        if self.is_zero() || rhs.is_zero() {
            return LambdaPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LambdaPoly::from_coeffs(coeffs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for LambdaPoly {
            type Output = LambdaPoly;
            fn $method(self, rhs: LambdaPoly) -> LambdaPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        -&self
    }
}

/// Prints in the input grammar, ascending degree: `3*l - l^2`, `1/2 + l`.
impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            let monomial = match deg {
                0 => None,
                1 => Some("l".to_string()),
                d => Some(format!("l^{d}")),
            };
            match (monomial, magnitude.is_one()) {
                (None, _) => write!(f, "{magnitude}")?,
                (Some(m), true) => f.write_str(&m)?,
                (Some(m), false) => write!(f, "{magnitude}*{m}")?,
            }
        }
        Ok(())
    }
}
