//! Exact arithmetic in cyclotomic fields `Q(ζ_L)`.
//!
//! An element is stored as its coefficient vector in the power basis
//! `1, ζ_L, ..., ζ_L^{φ(L)-1}`, reduced modulo the `L`-th cyclotomic
//! polynomial. The representation is canonical for a fixed order `L`;
//! elements of different orders are compared and combined after lifting
//! both into `Q(ζ_lcm)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest supported field order. Corpus domains stay far below this.
pub const MAX_ORDER: u32 = 2520;

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

pub fn totient(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(n: u32) -> i32 {
    let mut n = n;
    let mut primes = 0;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if n > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

fn poly_mul_i64(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic integer polynomial; the caller guarantees
/// divisibility.
fn poly_div_monic_i64(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = num.len() - dd;
    let mut quot = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Coefficients (low degree first) of the `n`-th cyclotomic polynomial,
/// computed from `Φ_n = Π_{d | n} (x^d - 1)^{μ(n/d)}`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!((1..=MAX_ORDER).contains(&n), "cyclotomic order {n} out of range");
    let mut num = vec![1i64];
    let mut den = vec![1i64];
    for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let mut factor = vec![0i64; d as usize + 1];
        factor[0] = -1;
        factor[d as usize] = 1;
        match mobius(n / d) {
            1 => num = poly_mul_i64(&num, &factor),
            -1 => den = poly_mul_i64(&den, &factor),
            _ => {}
        }
    }
    poly_div_monic_i64(&num, &den)
}

fn reduce(mut poly: Vec<BigRational>, order: u32) -> Vec<BigRational> {
    let phi = cyclotomic_polynomial(order);
    let deg = phi.len() - 1;
    if poly.len() > deg {
        for k in (deg..poly.len()).rev() {
            let c = core::mem::replace(&mut poly[k], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, &p) in phi.iter().enumerate().take(deg) {
                if p != 0 {
                    let t = &c * BigRational::from_integer(BigInt::from(p));
                    poly[k - deg + j] -= t;
                }
            }
        }
    }
    poly.resize(deg, BigRational::zero());
    poly
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    a.gcd(&b)
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer();
    let d = q.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic {
            order: 1,
            coeffs: vec![BigRational::zero()],
        }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclotomic {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Build from an arbitrary-length coefficient list in powers of `ζ_order`.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Self {
        assert!((1..=MAX_ORDER).contains(&order), "cyclotomic order {order} out of range");
        let mut poly = coeffs;
        // fold x^order = 1 first so reduction only sees degree < order
        if poly.len() > order as usize {
            let mut folded = vec![BigRational::zero(); order as usize];
            for (k, c) in poly.into_iter().enumerate() {
                folded[k % order as usize] += c;
            }
            poly = folded;
        }
        Cyclotomic {
            order,
            coeffs: reduce(poly, order),
        }
    }

    /// `ζ_l^k`, stored at the minimal order `l / gcd(k, l)`.
    pub fn root_of_unity(l: u32, k: i64) -> Self {
        assert!(l >= 1);
        let k = k.rem_euclid(l as i64) as u32;
        let g = gcd_u32(k, l);
        let order = l / g;
        let exp = (k / g) as usize;
        let mut poly = vec![BigRational::zero(); exp + 1];
        poly[exp] = BigRational::one();
        Cyclotomic {
            order,
            coeffs: reduce(poly, order),
        }
    }

    pub fn i() -> Self {
        Self::root_of_unity(4, 1)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    /// Re-express in `Q(ζ_m)`; `m` must be a multiple of the current order.
    pub fn lift(&self, m: u32) -> Self {
        assert!(m.is_multiple_of(self.order), "cannot lift order {} to {}", self.order, m);
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = c.clone();
        }
        Cyclotomic {
            order: m,
            coeffs: reduce(poly, m),
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let m = lcm_u32(self.order, other.order);
        (self.lift(m), other.lift(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Cyclotomic {
            order: a.order,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Cyclotomic {
            order: a.order,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (a, b) = self.aligned(other);
        let mut poly = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        Cyclotomic {
            order: a.order,
            coeffs: reduce(poly, a.order),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// The automorphism `ζ ↦ ζ^k`, `gcd(k, L) = 1`.
    pub fn galois(&self, k: u32) -> Self {
        let l = self.order;
        debug_assert_eq!(gcd_u32(k % l.max(1), l), 1);
        let mut poly = vec![BigRational::zero(); l as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            let e = (j as u64 * k as u64 % l as u64) as usize;
            poly[e] += c;
        }
        Cyclotomic {
            order: l,
            coeffs: reduce(poly, l),
        }
    }

    pub fn conj(&self) -> Self {
        if self.order <= 2 {
            return self.clone();
        }
        self.galois(self.order - 1)
    }

    /// Multiplicative inverse via the product of the non-trivial conjugates
    /// divided by the (rational) field norm.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let l = self.order;
        let mut prod = Self::one().lift(l);
        for k in 2..l {
            if gcd_u32(k, l) == 1 {
                prod = prod.mul(&self.galois(k));
            }
        }
        let norm = self.mul(&prod);
        let n = norm
            .as_rational()
            .expect("field norm of a cyclotomic element is rational");
        Some(prod.scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self.mul(&inv))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        let l = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = rational_to_f64(c);
            let angle = 2.0 * core::f64::consts::PI * j as f64 / l;
            re += v * libm::cos(angle);
            im += v * libm::sin(angle);
        }
        Complex64::new(re, im)
    }

    /// Real and imaginary parts when the element lies in `Q(i)`.
    pub fn as_gaussian(&self) -> Option<(BigRational, BigRational)> {
        if let Some(q) = self.as_rational() {
            return Some((q, BigRational::zero()));
        }
        let m = lcm_u32(self.order, 4);
        let x = self.lift(m);
        if m == 4 {
            return Some((x.coeffs[0].clone(), x.coeffs[1].clone()));
        }
        let c = x.conj();
        let two = BigRational::from_integer(BigInt::from(2));
        let re = x.add(&c).scale(&two.recip());
        let im_i = x.sub(&c).scale(&two.recip());
        let im = im_i.mul(&Self::i().neg());
        Some((re.as_rational()?, im.as_rational()?))
    }

    /// Exact square root when one is found in `Q(i)`; `None` otherwise.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (a, b) = self.as_gaussian()?;
        if b.is_zero() {
            return if a.is_negative() {
                rational_sqrt(&-a).map(|r| Self::i().scale(&r))
            } else {
                rational_sqrt(&a).map(Self::from_rational)
            };
        }
        let r = rational_sqrt(&(&a * &a + &b * &b))?;
        let two = BigRational::from_integer(BigInt::from(2));
        let x = rational_sqrt(&((&a + &r) / &two))?;
        if x.is_zero() {
            return None;
        }
        let y = &b / (&two * &x);
        Some(Self::from_rational(x).add(&Self::i().scale(&y)))
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((re, im)) = self.as_gaussian() {
            return match (re.is_zero(), im.is_zero()) {
                (_, true) => write!(f, "{re}"),
                (true, false) => write!(f, "{im}i"),
                (false, false) if im.is_negative() => write!(f, "{re}-{}i", -im),
                (false, false) => write!(f, "{re}+{im}i"),
            };
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})*z{}^{j}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials_match_known_values() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        for n in 1..60 {
            assert_eq!(cyclotomic_polynomial(n).len() as u32 - 1, totient(n));
        }
    }

    #[test]
    fn roots_of_unity_have_expected_powers() {
        let w = Cyclotomic::root_of_unity(3, 1);
        assert_eq!(w.pow(3), Cyclotomic::one());
        assert_ne!(w.pow(2), Cyclotomic::one());
        // 1 + w + w^2 = 0
        assert!(Cyclotomic::one().add(&w).add(&w.pow(2)).is_zero());
        assert_eq!(Cyclotomic::root_of_unity(2, 1), Cyclotomic::from_i64(-1));
        assert_eq!(Cyclotomic::i().mul(&Cyclotomic::i()), Cyclotomic::from_i64(-1));
        assert_eq!(Cyclotomic::root_of_unity(12, 3), Cyclotomic::i());
    }

    #[test]
    fn mixed_orders_are_compared_after_lifting() {
        let a = Cyclotomic::root_of_unity(3, 1).lift(12);
        assert_eq!(a, Cyclotomic::root_of_unity(3, 1));
        let s = Cyclotomic::i().add(&Cyclotomic::root_of_unity(3, 1));
        assert_eq!(s.order(), 12);
        assert_eq!(s.sub(&Cyclotomic::i()), Cyclotomic::root_of_unity(3, 1));
    }

    #[test]
    fn inverse_round_trips() {
        let x = Cyclotomic::from_coeffs(12, vec![q(1, 2), q(-3, 1), q(0, 1), q(2, 7)]);
        let inv = x.inv().unwrap();
        assert_eq!(x.mul(&inv), Cyclotomic::one());
        assert!(Cyclotomic::zero().inv().is_none());
    }

    #[test]
    fn complex_conversion_is_accurate() {
        let w = Cyclotomic::root_of_unity(5, 2);
        let z = w.to_complex();
        let angle = 4.0 * core::f64::consts::PI / 5.0;
        assert!((z.re - libm::cos(angle)).abs() < 1e-15);
        assert!((z.im - libm::sin(angle)).abs() < 1e-15);
    }

    #[test]
    fn gaussian_square_roots() {
        let i = Cyclotomic::i();
        // (1 + 2i)^2 = -3 + 4i
        let x = Cyclotomic::from_i64(-3).add(&i.scale(&q(4, 1)));
        let r = x.sqrt().unwrap();
        assert_eq!(r.mul(&r), x);
        assert_eq!(Cyclotomic::from_i64(-4).sqrt().unwrap(), i.scale(&q(2, 1)));
        assert!(Cyclotomic::from_i64(2).sqrt().is_none());
        // same value expressed in Q(ζ12)
        let lifted = x.lift(12);
        assert_eq!(lifted.sqrt().unwrap().pow(2), x);
        assert!(Cyclotomic::root_of_unity(3, 1).sqrt().is_none());
    }
}
