//! Sparse exact polynomials in x1, x2, x3 with an L-degree notion per
//! monomial. Canonical term order is lexicographic on the exponent
//! triple, which keeps printing and JSON output deterministic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::{FieldCtx, FieldError, Scalar};
use crate::lgroup::{LElement, WeightTriple};

/// Monomial x1^a1 · x2^a2 · x3^a3.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(pub [i64; 3]);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial([0, 0, 0])
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        Monomial([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }

    /// L-degree a1·x1 + a2·x2 + a3·x3.
    pub fn ldegree(&self, w: WeightTriple) -> LElement {
        w.element(self.0[0], self.0[1], self.0[2], 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == [0, 0, 0] {
            return write!(f, "1");
        }
        let names = ["x", "y", "z"];
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", names[i])?;
            } else {
                write!(f, "{}^{}", names[i], e)?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial over a fixed field; zero coefficients are never
/// stored. `degree` records a declared L-degree when one is known;
/// it is metadata and does not take part in equality.
#[derive(Clone)]
pub struct GradedPoly {
    field: FieldCtx,
    terms: BTreeMap<Monomial, Scalar>,
    degree: Option<LElement>,
}

impl PartialEq for GradedPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.terms == other.terms
    }
}

impl Eq for GradedPoly {}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub coef: String,
    pub exp: [i64; 3],
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg_one = c.neg().is_one() && !c.is_one();
            if first {
                if neg_one && *m != Monomial::one() {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg_one && *m != Monomial::one() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *m == Monomial::one() {
                write!(f, "{c}")?;
            } else if c.is_one() || neg_one {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

impl GradedPoly {
    pub fn zero(field: FieldCtx) -> GradedPoly {
        GradedPoly {
            field,
            terms: BTreeMap::new(),
            degree: None,
        }
    }

    pub fn one(field: FieldCtx) -> GradedPoly {
        GradedPoly::term(field, Monomial::one(), field.one())
    }

    pub fn term(field: FieldCtx, m: Monomial, c: Scalar) -> GradedPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedPoly {
            field,
            terms,
            degree: None,
        }
    }

    pub fn with_degree(mut self, d: LElement) -> GradedPoly {
        self.degree = Some(d);
        self
    }

    pub fn field(&self) -> FieldCtx {
        self.field
    }

    pub fn declared_degree(&self) -> Option<&LElement> {
        self.degree.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one())
    }

    fn check_field(&self, other: &GradedPoly) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.field, other.field))
        }
    }

    pub fn add(&self, rhs: &GradedPoly) -> Result<GradedPoly, FieldError> {
        self.check_field(rhs)?;
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let cur = terms.remove(m).unwrap_or_else(|| self.field.zero());
            let s = cur.add(c)?;
            if !s.is_zero() {
                terms.insert(*m, s);
            }
        }
        let degree = match (&self.degree, &rhs.degree) {
            (Some(a), Some(b)) if a == b => Some(*a),
            _ => None,
        };
        Ok(GradedPoly {
            field: self.field,
            terms,
            degree,
        })
    }

    pub fn sub(&self, rhs: &GradedPoly) -> Result<GradedPoly, FieldError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> GradedPoly {
        GradedPoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
            degree: self.degree,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Result<GradedPoly, FieldError> {
        if c.ctx() != self.field {
            return Err(FieldError::Mismatch(self.field, c.ctx()));
        }
        let mut terms = BTreeMap::new();
        for (m, a) in &self.terms {
            let s = a.mul(c)?;
            if !s.is_zero() {
                terms.insert(*m, s);
            }
        }
        Ok(GradedPoly {
            field: self.field,
            terms,
            degree: self.degree,
        })
    }

    pub fn mul(&self, rhs: &GradedPoly) -> Result<GradedPoly, FieldError> {
        self.check_field(rhs)?;
        let mut terms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m = m1.mul(m2);
                let prod = c1.mul(c2)?;
                let cur = terms.remove(&m).unwrap_or_else(|| self.field.zero());
                let s = cur.add(&prod)?;
                if !s.is_zero() {
                    terms.insert(m, s);
                }
            }
        }
        let degree = match (&self.degree, &rhs.degree) {
            (Some(a), Some(b)) => a.checked_add(b).ok(),
            _ => None,
        };
        Ok(GradedPoly {
            field: self.field,
            terms,
            degree,
        })
    }

    /// Every stored monomial has L-degree d. The zero polynomial is
    /// homogeneous of every degree.
    pub fn is_homogeneous(&self, w: WeightTriple, d: &LElement) -> bool {
        self.terms.keys().all(|m| m.ldegree(w) == *d)
    }

    /// Map integer-coefficient rationals into F_p (or between equal
    /// fields); errors if a denominator vanishes mod p.
    pub fn reduce(&self, target: FieldCtx) -> Result<GradedPoly, FieldError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let r = c.reduce(target)?;
            if !r.is_zero() {
                terms.insert(*m, r);
            }
        }
        Ok(GradedPoly {
            field: target,
            terms,
            degree: self.degree,
        })
    }

    pub fn to_terms_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                coef: c.to_string(),
                exp: m.0,
            })
            .collect()
    }

    pub fn from_terms_json(field: FieldCtx, terms: &[TermJson]) -> Result<GradedPoly, FieldError> {
        let mut p = GradedPoly::zero(field);
        for t in terms {
            let c = field.parse_scalar(&t.coef)?;
            p = p.add(&GradedPoly::term(field, Monomial(t.exp), c))?;
        }
        Ok(p)
    }
}

/// The triangle singularity f = x1^p1 + x2^p2 + x3^p3, homogeneous of
/// degree c.
pub fn f_of(w: WeightTriple, field: FieldCtx) -> GradedPoly {
    let [a, b, c] = w.weights();
    let one = field.one();
    let mut p = GradedPoly::zero(field);
    for m in [
        Monomial([a, 0, 0]),
        Monomial([0, b, 0]),
        Monomial([0, 0, c]),
    ] {
        p = p
            .add(&GradedPoly::term(field, m, one.clone()))
            .expect("same field");
    }
    p.with_degree(w.canonical())
}

/// Parse a compact monomial expression like "0", "x", "-z^4", "y*z^2",
/// "2*x^2*y". Only signed integer coefficients are accepted.
pub fn parse_entry(field: FieldCtx, s: &str) -> Result<GradedPoly, FieldError> {
    let t = s.trim();
    let bad = || FieldError::BadScalar(s.to_string());
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1i64, r.trim()),
        None => (1i64, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    if rest.is_empty() {
        return Err(bad());
    }
    let mut coef: i64 = sign;
    let mut exps = [0i64; 3];
    for factor in rest.split('*') {
        let f = factor.trim();
        if f.is_empty() {
            return Err(bad());
        }
        if f.chars().next().unwrap().is_ascii_digit() {
            let n: i64 = f.parse().map_err(|_| bad())?;
            coef *= n;
            continue;
        }
        let (var, pow) = match f.split_once('^') {
            Some((v, p)) => (v.trim(), p.trim().parse::<i64>().map_err(|_| bad())?),
            None => (f, 1),
        };
        let idx = match var {
            "x" | "x1" => 0,
            "y" | "x2" => 1,
            "z" | "x3" => 2,
            _ => return Err(bad()),
        };
        if pow < 0 {
            return Err(bad());
        }
        exps[idx] += pow;
    }
    Ok(GradedPoly::term(
        field,
        Monomial(exps),
        field.from_i64(coef),
    ))
}
