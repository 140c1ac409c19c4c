//! Exact Gaussian rationals `a + b·i` with arbitrary-precision `a`, `b`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of Q(i). All arithmetic is exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into a rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    BigRational::from_str(t).map_err(|_| Error::Parse {
        position: 0,
        message: format!("invalid rational number {t:?}"),
    })
}

/// Formats a rational as `"p/q"` (or `"p"` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Scalar {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::real(rational(num, den))
    }

    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|²`, always a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Scalar {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn mul_i(&self) -> Self {
        Scalar {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Floating-point approximation, used only for screening.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    pub fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    pub fn is_negative_real(&self) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }

    pub fn is_nonnegative_real(&self) -> bool {
        self.im.is_zero() && !self.re.is_negative()
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::from_int(1)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::real(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::real(&self.re * &o.re);
        }
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        let inv = o.inv().expect("division by zero scalar");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => write!(f, "{}i", format_rational(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(
                        f,
                        "{}-{}i",
                        format_rational(&self.re),
                        format_rational(&-self.im.clone())
                    )
                } else {
                    write!(
                        f,
                        "{}+{}i",
                        format_rational(&self.re),
                        format_rational(&self.im)
                    )
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
