//! Sparse multivariate polynomials over a prime field.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`] in degree-lexicographic
//! order, so iteration (and every matrix built from it) is deterministic.
//! Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bounds::binomial;
use crate::error::{Error, Result};
use crate::field::{Point, PrimeField};

/// Exponent vector. Ordered by total degree, then lexicographically with
/// `X_1 > X_2 > ... > X_n`, so `1 < X_1 < X_2 < X_1^2 < X_1 X_2 < X_2^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Self(exps)
    }

    pub fn one(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn evaluate(&self, field: PrimeField, x: &[u64]) -> u64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&e, _)| e != 0)
            .fold(1, |acc, (&e, &xi)| field.mul(acc, field.pow(xi, e as u64)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree `<= d` in `n` variables, ascending in
/// degree-lex order. There are exactly `C(d+n, n)` of them.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out.sort();
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: PrimeField,
    n: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl MultiPoly {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        Self {
            field,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, n: usize, c: u64) -> Self {
        Self::from_terms(field, n, [(Monomial::one(n), c)]).expect("constant is well formed")
    }

    /// The coordinate function `X_{i+1}` (zero-based `i`).
    pub fn var(field: PrimeField, n: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for {n} variables");
        Self::from_terms(field, n, [(Monomial::var(n, i), 1)]).expect("variable is well formed")
    }

    pub fn monomial(field: PrimeField, m: Monomial, c: u64) -> Self {
        let n = m.nvars();
        Self::from_terms(field, n, [(m, c)]).expect("monomial is well formed")
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, summing
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(field: PrimeField, n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, u64)>,
    {
        let mut out = Self::zero(field, n);
        for (m, c) in terms {
            if m.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.nvars(),
                });
            }
            out.add_term(m, field.reduce(c));
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let f = self.field;
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = f.add(*v, c);
                if *v == 0 {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending degree-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Largest exponent of variable `i` among the stored terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn coefficient(&self, mu: &[u32]) -> Result<u64> {
        if mu.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: mu.len(),
            });
        }
        Ok(self.terms.get(&Monomial(mu.to_vec())).copied().unwrap_or(0))
    }

    pub fn evaluate(&self, x: &[u64]) -> Result<u64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[u64]) -> u64 {
        let f = self.field;
        self.terms
            .iter()
            .fold(0, |acc, (m, &c)| f.add(acc, f.mul(c, m.evaluate(f, x))))
    }

    pub fn evaluate_point(&self, x: &Point) -> Result<u64> {
        self.evaluate(x)
    }

    /// Sum of the terms of top total degree.
    pub fn leading_homogeneous_component(&self) -> Result<MultiPoly> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        Ok(Self {
            field: self.field,
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        })
    }

    pub fn scale(&self, c: u64) -> MultiPoly {
        let f = self.field;
        MultiPoly::from_terms(f, self.n, self.terms().map(|(m, v)| (m.clone(), f.mul(v, c))))
            .expect("same shape")
    }

    fn check_compatible(&self, other: &MultiPoly) {
        assert_eq!(self.field, other.field, "polynomials over different fields");
        assert_eq!(self.n, other.n, "polynomials in different variable counts");
    }

    /// Dense coefficient vector against `basis` (monomials not in `basis`
    /// are an error).
    pub fn coefficients_on(&self, basis: &[Monomial]) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(basis.len());
        let mut seen = 0;
        for m in basis {
            let c = self.terms.get(m).copied().unwrap_or(0);
            if c != 0 {
                seen += 1;
            }
            out.push(c);
        }
        if seen != self.terms.len() {
            return Err(Error::InvalidInput(
                "polynomial has monomials outside the requested basis".into(),
            ));
        }
        Ok(out)
    }

    pub fn from_coefficients(field: PrimeField, n: usize, basis: &[Monomial], coeffs: &[u64]) -> Self {
        Self::from_terms(field, n, basis.iter().cloned().zip(coeffs.iter().copied()))
            .expect("basis monomials share the variable count")
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let f = self.field;
        MultiPoly {
            field: f,
            n: self.n,
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), f.neg(c))).collect(),
        }
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_compatible(rhs);
        let f = self.field;
        let mut out = MultiPoly::zero(f, self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                out.add_term(a.mul(b), f.mul(ca, cb));
            }
        }
        out
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.field)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("X{}", i + 1)
                    } else {
                        format!("X{}^{}", i + 1, e)
                    }
                })
                .collect();
            match (c, vars.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                _ => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: i64,
    e: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    p: u64,
    n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            p: self.field.modulus(),
            n: self.n,
            terms: self
                .terms()
                .map(|(m, c)| TermJson {
                    c: c as i64,
                    e: m.exps().to_vec(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyJson::deserialize(d)?;
        let field = PrimeField::new(raw.p).map_err(D::Error::custom)?;
        MultiPoly::from_terms(
            field,
            raw.n,
            raw.terms
                .into_iter()
                .map(|t| (Monomial(t.e), field.from_i64(t.c))),
        )
        .map_err(D::Error::custom)
    }
}

/// Degree list `(d_1, ..., d_m)` of a polynomial list in `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub n: usize,
    pub degrees: Vec<u32>,
}

impl DegreeProfile {
    pub fn new(n: usize, degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidInput("degree profile needs m >= 1".into()));
        }
        Ok(Self { n, degrees })
    }

    pub fn single(n: usize, d: u32) -> Self {
        Self { n, degrees: vec![d] }
    }

    pub fn m(&self) -> usize {
        self.degrees.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// `N_(d) = sum_i C(d_i + n, n)`, the dimension of the dense space.
    pub fn dimension(&self) -> BigUint {
        self.degrees
            .iter()
            .map(|&d| binomial(d as u64 + self.n as u64, self.n as u64))
            .sum()
    }

    pub fn dimension_u64(&self) -> Result<u64> {
        u64::try_from(self.dimension()).map_err(|_| Error::ResourceCapExceeded {
            needed: u128::MAX,
            cap: u64::MAX,
        })
    }
}
