//! Function values: exact cyclotomic numbers or double-precision complex
//! numbers. Mixed arithmetic degrades to floating point.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::Cyclotomic;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Cyclotomic),
    Float(Complex64),
}

/// A value table indexed by element.
pub type Table = Vec<Scalar>;

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Cyclotomic::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Cyclotomic::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar::Exact(Cyclotomic::from_i64(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(Cyclotomic::from_ratio(num, den))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar::Exact(Cyclotomic::from_rational(q))
    }

    /// `re + im·i` with rational parts.
    pub fn gaussian(re: (i64, i64), im: (i64, i64)) -> Self {
        let r = Cyclotomic::from_ratio(re.0, re.1);
        let i = Cyclotomic::i().mul(&Cyclotomic::from_ratio(im.0, im.1));
        Scalar::Exact(r.add(&i))
    }

    pub fn i() -> Self {
        Scalar::Exact(Cyclotomic::i())
    }

    pub fn root_of_unity(l: u32, k: i64) -> Self {
        Scalar::Exact(Cyclotomic::root_of_unity(l, k))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Cyclotomic> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Float(_) => None,
        }
    }

    /// Exactly zero (floats compare against 0.0).
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    /// Exact zero test for exact values, `|z| <= tol` for floats.
    pub fn approx_zero(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(z) => z.norm() <= tol,
        }
    }

    pub fn close_to(&self, other: &Scalar, tol: f64) -> bool {
        (self - other).approx_zero(tol)
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex())
    }

    /// Modulus. A nonzero exact value never reports 0.
    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(c) if c.is_zero() => 0.0,
            Scalar::Exact(c) => c.to_complex().norm().max(f64::MIN_POSITIVE),
            Scalar::Float(z) => z.norm(),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.div(b).map(Scalar::Exact),
            _ => {
                let d = other.to_complex();
                if d.re == 0.0 && d.im == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(self.to_complex() / d))
                }
            }
        }
    }

    pub fn recip(&self) -> Option<Scalar> {
        Scalar::one().checked_div(self)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.pow(e)),
            Scalar::Float(z) => Scalar::Float(z.powu(e)),
        }
    }

    /// Square root: exact when an exact root is found, principal floating
    /// root otherwise.
    pub fn sqrt(&self) -> Scalar {
        self.exact_sqrt()
            .unwrap_or_else(|| Scalar::Float(self.to_complex().sqrt()))
    }

    pub fn exact_sqrt(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(c) => c.sqrt().map(Scalar::Exact),
            Scalar::Float(_) => None,
        }
    }

    /// Total order on the complex value (real part, then imaginary part).
    pub fn canonical_cmp(&self, other: &Scalar) -> core::cmp::Ordering {
        let a = self.to_complex();
        let b = other.to_complex();
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_complex() == other.to_complex(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => write!(f, "{c}"),
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Scalar::Float(z) if z.im < 0.0 => write!(f, "{}-{}i", z.re, -z.im),
            Scalar::Float(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $exact:ident, $float:tt) => {
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$exact(b)),
                    _ => Scalar::Float(self.to_complex() $float rhs.to_complex()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add, +);
binop!(Sub, sub, sub, -);
binop!(Mul, mul, mul, *);

impl<'b> Div<&'b Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero; use [`Scalar::checked_div`] when
    /// the divisor may vanish.
    fn div(self, rhs: &'b Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(_), Scalar::Exact(_)) => {
                self.checked_div(rhs).expect("exact division by zero")
            }
            _ => Scalar::Float(self.to_complex() / rhs.to_complex()),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl<'a> Div<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        &self / rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.neg()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

/// Maximum modulus over a slice of values.
pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> f64 {
    values.into_iter().map(Scalar::abs).fold(0.0, f64::max)
}

pub fn zero_table(n: usize) -> Table {
    alloc::vec![Scalar::zero(); n]
}

pub fn table_to_float(t: &[Scalar]) -> Table {
    t.iter().map(Scalar::to_float).collect()
}

pub fn table_is_exact(t: &[Scalar]) -> bool {
    t.iter().all(Scalar::is_exact)
}

// ---- serde ----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn from_bigint(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(alloc::format!("{n}")),
        }
    }

    fn to_bigint(&self) -> Option<BigInt> {
        match self {
            IntRepr::Small(v) => Some(BigInt::from(*v)),
            IntRepr::Big(s) => BigInt::parse_bytes(s.as_bytes(), 10),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Exact {
        #[serde(rename = "L")]
        order: u32,
        coeffs: Vec<(IntRepr, IntRepr)>,
    },
    Float {
        re: f64,
        im: f64,
    },
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Exact(c) => ScalarRepr::Exact {
                order: c.order(),
                coeffs: c
                    .coeffs()
                    .iter()
                    .map(|q| (IntRepr::from_bigint(q.numer()), IntRepr::from_bigint(q.denom())))
                    .collect(),
            },
            Scalar::Float(z) => ScalarRepr::Float { re: z.re, im: z.im },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match ScalarRepr::deserialize(deserializer)? {
            ScalarRepr::Float { re, im } => Ok(Scalar::float(re, im)),
            ScalarRepr::Exact { order, coeffs } => {
                if order == 0 || order > crate::cyclotomic::MAX_ORDER {
                    return Err(D::Error::custom("cyclotomic order out of range"));
                }
                let mut qs = Vec::with_capacity(coeffs.len());
                for (n, d) in &coeffs {
                    let n = n.to_bigint().ok_or_else(|| D::Error::custom("bad numerator"))?;
                    let d = d.to_bigint().ok_or_else(|| D::Error::custom("bad denominator"))?;
                    if d.is_zero() {
                        return Err(D::Error::custom("zero denominator"));
                    }
                    qs.push(BigRational::new(n, d));
                }
                Ok(Scalar::Exact(Cyclotomic::from_coeffs(order, qs)))
            }
        }
    }
}
