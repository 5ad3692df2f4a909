//! Field tags and exact scalars.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::LinAlgError;

/// Coefficient field: the rationals or a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Q,
    Fp(u32),
}

impl Field {
    /// Prime field `F_p`; rejects non-primes.
    pub fn prime(p: u32) -> Result<Field, LinAlgError> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(LinAlgError::NotPrime(p));
        }
        Ok(Field::Fp(p))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Q => 0,
            Field::Fp(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        self.int(0)
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            Field::Q => Scalar::Q(Rational64::from_integer(n)),
            Field::Fp(p) => Scalar::Fp {
                v: n.rem_euclid(p as i64) as u32,
                p,
            },
        }
    }

    /// `n/d` in this field; `None` when `d` vanishes in the field.
    pub fn frac(self, n: i64, d: i64) -> Option<Scalar> {
        let den = self.int(d);
        if den.is_zero() {
            return None;
        }
        Some(&self.int(n) * &den.inv())
    }

    /// `(-1)^k` as a scalar.
    pub fn sign(self, odd: bool) -> Scalar {
        if odd {
            self.int(-1)
        } else {
            self.int(1)
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

/// An exact field element. Rationals use `i64` parts and promote to
/// big integers on overflow; residues carry their modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(Rational64),
    QBig(Box<BigRational>),
    Fp { v: u32, p: u32 },
}

fn big(r: &Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn demote(b: BigRational) -> Scalar {
    match (b.numer().to_i64(), b.denom().to_i64()) {
        (Some(n), Some(d)) => Scalar::Q(Rational64::new_raw(n, d)),
        _ => Scalar::QBig(Box::new(b)),
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) | Scalar::QBig(_) => Field::Q,
            Scalar::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::QBig(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::QBig(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Q(r) => match r.numer().checked_abs() {
                Some(_) => Scalar::Q(r.recip()),
                None => demote(big(r).recip()),
            },
            Scalar::QBig(r) => demote(r.recip()),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: pow_mod(*v as u64, *p as u64 - 2, *p as u64) as u32,
                p: *p,
            },
        }
    }

    fn as_big(&self) -> BigRational {
        match self {
            Scalar::Q(r) => big(r),
            Scalar::QBig(r) => (**r).clone(),
            Scalar::Fp { .. } => unreachable!("residue used as rational"),
        }
    }

    fn binop(
        &self,
        rhs: &Scalar,
        small: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        large: impl Fn(BigRational, BigRational) -> BigRational,
        modular: impl Fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp {
                    v: modular(*a as u64, *b as u64, *p as u64) as u32,
                    p: *p,
                }
            }
            (Scalar::Q(a), Scalar::Q(b)) => match small(a, b) {
                Some(r) => Scalar::Q(r),
                None => demote(large(big(a), big(b))),
            },
            (Scalar::Fp { .. }, _) | (_, Scalar::Fp { .. }) => panic!("field mismatch"),
            _ => demote(large(self.as_big(), rhs.as_big())),
        }
    }

    /// Sign-preserving rational view, for display and serialization.
    pub fn to_ratio_string(&self) -> String {
        self.to_string()
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_negative(),
            Scalar::QBig(r) => r.is_negative(),
            Scalar::Fp { .. } => false,
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a.checked_add(b), |a, b| a + b, |a, b, p| (a + b) % p)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a.checked_sub(b), |a, b| a - b, |a, b, p| (a + p - b) % p)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a.checked_mul(b), |a, b| a * b, |a, b, p| a * b % p)
    }
}

impl Scalar {
    /// Exact division. Panics on zero divisor.
    pub fn div(&self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => match a.checked_div(b) {
                Some(r) => Scalar::Q(r),
                None => demote(big(a) / big(b)),
            },
            _ => self * &rhs.inv(),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(r) => match r.numer().checked_neg() {
                Some(n) => Scalar::Q(Rational64::new_raw(n, *r.denom())),
                None => demote(-big(r)),
            },
            Scalar::QBig(r) => demote(-(**r).clone()),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: (p - v) % p,
                p: *p,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::QBig(r) => write!(f, "{r}"),
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let f = Field::Q;
        let a = f.int(i64::MAX);
        let b = &a + &a;
        assert!(matches!(b, Scalar::QBig(_)));
        let c = &b - &a;
        assert_eq!(c, a);
        let d = f.frac(1, i64::MAX).unwrap();
        let e = &d * &d;
        assert!(matches!(e, Scalar::QBig(_)));
        assert_eq!(e.div(&d), d);
    }

    #[test]
    fn residues() {
        let f = Field::prime(7).unwrap();
        assert_eq!(&f.int(3) * &f.int(5), f.int(1));
        assert_eq!(f.int(3).inv(), f.int(5));
        assert_eq!(-f.int(0), f.int(0));
        assert_eq!(f.frac(1, 2).unwrap(), f.int(4));
        assert!(Field::prime(2).unwrap().frac(1, 2).is_none());
        assert!(Field::prime(9).is_err());
    }

    #[test]
    fn rational_arithmetic() {
        let f = Field::Q;
        let h = f.frac(1, 2).unwrap();
        assert_eq!(&h + &h, f.one());
        assert_eq!(h.inv(), f.int(2));
        assert_eq!(f.frac(-3, 6).unwrap().to_string(), "-1/2");
    }
}
