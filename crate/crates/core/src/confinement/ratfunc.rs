use std::fmt;

use rug::Rational;

use super::poly::Poly;
use crate::error::{Error, Result};

/// Element of `Q(r)`: reduced fraction with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunctionR {
    num: Poly,
    den: Poly,
}

impl RationalFunctionR {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPivot);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().expect("nonzero").clone();
        let inv = Rational::from(lead.recip_ref());
        Ok(RationalFunctionR {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn zero() -> Self {
        RationalFunctionR {
            num: Poly::zero(),
            den: Poly::constant(Rational::from(1)),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunctionR {
            num: Poly::constant(c),
            den: Poly::constant(Rational::from(1)),
        }
    }

    pub fn symbol() -> Self {
        RationalFunctionR {
            num: Poly::symbol(),
            den: Poly::constant(Rational::from(1)),
        }
    }

    /// `c * r`.
    pub fn linear(c: Rational) -> Self {
        Self::from_poly(Poly::from_coeffs(vec![Rational::new(), c]))
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunctionR {
            num: p,
            den: Poly::constant(Rational::from(1)),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Whether the value varies with `r`.
    pub fn depends_on_r(&self) -> bool {
        self.num.degree().unwrap_or(0) > 0 || self.den.degree().unwrap_or(0) > 0
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.depends_on_r() {
            None
        } else {
            Some(self.num.coeffs().first().cloned().unwrap_or_default())
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den).expect("nonzero denominators")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunctionR {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.num * &other.num, &self.den * &other.den).expect("nonzero denominators")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::ZeroPivot);
        }
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn eval(&self, r: &Rational) -> Result<Rational> {
        let d = self.den.eval(r);
        if d == 0 {
            return Err(Error::ZeroPivot);
        }
        Ok(self.num.eval(r) / d)
    }
}

impl fmt::Display for RationalFunctionR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.coeffs().iter().filter(|c| **c != 0).count() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}
