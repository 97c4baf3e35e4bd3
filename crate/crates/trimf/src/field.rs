//! Exact coefficient arithmetic: arbitrary-precision rationals or a
//! prime field F_p with machine-word residues. Every computation in the
//! crate is exact; there is no floating point anywhere.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Which field coefficients live in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FieldCtx {
    Q,
    Fp(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldError {
    Mismatch(FieldCtx, FieldCtx),
    NotPrime(u64),
    BadScalar(String),
    /// Division by zero or a residue not invertible.
    NotInvertible,
    /// Reduction Q -> F_p hit a denominator divisible by p.
    BadReduction(u64),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::Mismatch(a, b) => write!(f, "field mismatch: {a} vs {b}"),
            FieldError::NotPrime(p) => write!(f, "{p} is not prime"),
            FieldError::BadScalar(s) => write!(f, "cannot parse scalar {s:?}"),
            FieldError::NotInvertible => write!(f, "element is not invertible"),
            FieldError::BadReduction(p) => {
                write!(f, "denominator divisible by {p}; reduction undefined")
            }
        }
    }
}

impl std::error::Error for FieldError {}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldCtx::Q => write!(f, "Q"),
            FieldCtx::Fp(p) => write!(f, "F{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Parse "q" / "Q" or "f<p>" / "F<p>".
    pub fn parse(s: &str) -> Result<FieldCtx, FieldError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldCtx::Q);
        }
        if let Some(rest) = t.strip_prefix('f').or_else(|| t.strip_prefix('F')) {
            if let Ok(p) = rest.parse::<u64>() {
                if !is_prime(p) {
                    return Err(FieldError::NotPrime(p));
                }
                return Ok(FieldCtx::Fp(p));
            }
        }
        Err(FieldError::BadScalar(s.to_string()))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldCtx::Q => 0,
            FieldCtx::Fp(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldCtx::Q => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            FieldCtx::Fp(p) => Scalar::Fp {
                p: *p,
                v: n.rem_euclid(*p as i64) as u64,
            },
        }
    }

    /// Parse the JSON "coef" string: a decimal or fraction for Q, a
    /// residue for F_p.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, FieldError> {
        match self {
            FieldCtx::Q => BigRational::from_str(s)
                .map(Scalar::Q)
                .map_err(|_| FieldError::BadScalar(s.to_string())),
            FieldCtx::Fp(p) => {
                let n = i128::from_str(s).map_err(|_| FieldError::BadScalar(s.to_string()))?;
                Ok(Scalar::Fp {
                    p: *p,
                    v: n.rem_euclid(*p as i128) as u64,
                })
            }
        }
    }
}

/// A field element, tagged with the field it belongs to.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { p: u64, v: u64 },
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

impl Scalar {
    pub fn ctx(&self) -> FieldCtx {
        match self {
            Scalar::Q(_) => FieldCtx::Q,
            Scalar::Fp { p, .. } => FieldCtx::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    fn lift(a: &Scalar, b: &Scalar) -> Result<(), FieldError> {
        if a.ctx() == b.ctx() {
            Ok(())
        } else {
            Err(FieldError::Mismatch(a.ctx(), b.ctx()))
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar, FieldError> {
        Scalar::lift(self, rhs)?;
        Ok(match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => Scalar::Fp {
                p: *p,
                v: (a + b) % p,
            },
            _ => unreachable!(),
        })
    }

    pub fn sub(&self, rhs: &Scalar) -> Result<Scalar, FieldError> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar, FieldError> {
        Scalar::lift(self, rhs)?;
        Ok(match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => Scalar::Fp {
                p: *p,
                v: mulmod(*a, *b, *p),
            },
            _ => unreachable!(),
        })
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(r) => Scalar::Q(-r),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
        }
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::NotInvertible);
        }
        Ok(match self {
            Scalar::Q(r) => Scalar::Q(r.recip()),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: powmod(*v, p - 2, *p),
            },
        })
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar, FieldError> {
        self.mul(&rhs.inv()?)
    }

    /// Reduce a rational with denominator prime to p into F_p; identity
    /// on matching F_p scalars.
    pub fn reduce(&self, target: FieldCtx) -> Result<Scalar, FieldError> {
        match (self, target) {
            (Scalar::Q(r), FieldCtx::Q) => Ok(Scalar::Q(r.clone())),
            (Scalar::Fp { p, v }, FieldCtx::Fp(q)) if *p == q => Ok(Scalar::Fp { p: *p, v: *v }),
            (Scalar::Q(r), FieldCtx::Fp(p)) => {
                let pb = BigInt::from(p);
                let num = r.numer().mod_floor(&pb);
                let den = r.denom().mod_floor(&pb);
                let num: u64 = num.try_into().unwrap();
                let den: u64 = den.try_into().unwrap();
                if den == 0 {
                    return Err(FieldError::BadReduction(p));
                }
                let inv = powmod(den, p - 2, p);
                Ok(Scalar::Fp {
                    p,
                    v: mulmod(num, inv, p),
                })
            }
            _ => Err(FieldError::Mismatch(self.ctx(), target)),
        }
    }

    /// Exact integer value if the scalar is a small integer (used by
    /// search output and displays).
    pub fn as_small_int(&self) -> Option<i64> {
        match self {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    r.numer().try_into().ok()
                } else {
                    None
                }
            }
            Scalar::Fp { p, v } => {
                if *v <= p / 2 {
                    Some(*v as i64)
                } else {
                    Some(*v as i64 - *p as i64)
                }
            }
        }
    }
}

use num_integer::Integer;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

impl Scalar {
    /// True if the scalar is ±1 or 0 (search alphabet of the
    /// specialization search).
    pub fn is_sign_scalar(&self) -> bool {
        self.is_zero() || self.is_one() || self.neg().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fields() {
        assert_eq!(FieldCtx::parse("q").unwrap(), FieldCtx::Q);
        assert_eq!(FieldCtx::parse("F7").unwrap(), FieldCtx::Fp(7));
        assert!(matches!(
            FieldCtx::parse("f6"),
            Err(FieldError::NotPrime(6))
        ));
        assert!(FieldCtx::parse("x").is_err());
    }

    #[test]
    fn fp_arithmetic() {
        let f = FieldCtx::Fp(5);
        let three = f.from_i64(3);
        let four = f.from_i64(-1);
        assert_eq!(three.add(&four).unwrap(), f.from_i64(2));
        assert_eq!(three.mul(&four).unwrap(), f.from_i64(12));
        assert!(three.mul(&three.inv().unwrap()).unwrap().is_one());
        let q = FieldCtx::Q.one();
        assert!(matches!(q.add(&three), Err(FieldError::Mismatch(_, _))));
    }

    #[test]
    fn rational_reduction() {
        let half = FieldCtx::Q.parse_scalar("1/2").unwrap();
        let r = half.reduce(FieldCtx::Fp(5)).unwrap();
        assert_eq!(r, FieldCtx::Fp(5).from_i64(3)); // 2*3 = 6 = 1 mod 5
        assert!(half.reduce(FieldCtx::Fp(2)).is_err());
    }
}
