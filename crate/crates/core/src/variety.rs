//! Brute-force geometry over `F_q^n`: constructible-set membership, point
//! enumeration, projections and counting checks.
//!
//! Degrees and dimensions of constructible sets are declared metadata. The
//! routines here count points and compare the counts with bounds built from
//! those declarations; nothing is computed symbolically.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Point, PrimeField};
use crate::poly::MultiPoly;

/// Default cap on membership tests.
pub const DEFAULT_POINT_CAP: u64 = 100_000_000;

/// `V(g_1, ..., g_s) \ V(h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(rename = "eqs")]
    pub equations: Vec<MultiPoly>,
    #[serde(default)]
    pub avoid: Option<MultiPoly>,
}

impl Piece {
    pub fn closed(equations: Vec<MultiPoly>) -> Self {
        Self {
            equations,
            avoid: None,
        }
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.equations.iter().all(|g| g.eval_unchecked(x) == 0)
            && self.avoid.as_ref().is_none_or(|h| h.eval_unchecked(x) != 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructibleSet {
    pub n: usize,
    pub p: u64,
    pub pieces: Vec<Piece>,
    #[serde(rename = "dim", skip_serializing_if = "Option::is_none")]
    pub declared_dim: Option<u64>,
    #[serde(rename = "deg_lci", skip_serializing_if = "Option::is_none")]
    pub declared_deg_lci: Option<u64>,
}

impl ConstructibleSet {
    pub fn new(field: PrimeField, n: usize, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("a constructible set needs at least one piece".into()));
        }
        for g in pieces
            .iter()
            .flat_map(|pc| pc.equations.iter().chain(pc.avoid.as_ref()))
        {
            if g.field() != field {
                return Err(Error::FieldMismatch(field.modulus(), g.field().modulus()));
            }
            if g.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.nvars(),
                });
            }
        }
        Ok(Self {
            n,
            p: field.modulus(),
            pieces,
            declared_dim: None,
            declared_deg_lci: None,
        })
    }

    /// `V(equations)`.
    pub fn variety(field: PrimeField, n: usize, equations: Vec<MultiPoly>) -> Result<Self> {
        Self::new(field, n, vec![Piece::closed(equations)])
    }

    /// A finite set given by its points, one piece per point; zero-dimensional
    /// with degree equal to its cardinality.
    pub fn from_points(field: PrimeField, n: usize, points: &[Point]) -> Result<Self> {
        let mut pieces = Vec::new();
        let distinct: BTreeSet<&Point> = points.iter().collect();
        for x in &distinct {
            x.check_dim(n)?;
            let eqs = (0..n)
                .map(|i| {
                    &MultiPoly::var(field, n, i) - &MultiPoly::constant(field, n, field.reduce(x[i]))
                })
                .collect();
            pieces.push(Piece::closed(eqs));
        }
        if pieces.is_empty() {
            // empty set: V(1)
            pieces.push(Piece::closed(vec![MultiPoly::constant(field, n, 1)]));
        }
        Ok(Self::new(field, n, pieces)?.with_declared(Some(0), Some(distinct.len() as u64)))
    }

    pub fn with_declared(mut self, dim: Option<u64>, deg_lci: Option<u64>) -> Self {
        self.declared_dim = dim.or(self.declared_dim);
        self.declared_deg_lci = deg_lci.or(self.declared_deg_lci);
        self
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.p).expect("validated on construction")
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.pieces.iter().any(|pc| pc.contains(x))
    }

    /// Union of the pieces of both sets.
    pub fn union(&self, other: &ConstructibleSet) -> Result<ConstructibleSet> {
        if (self.n, self.p) != (other.n, other.p) {
            return Err(Error::InvalidInput("sets live in different ambient spaces".into()));
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        ConstructibleSet::new(self.field(), self.n, pieces)
    }
}

#[derive(Deserialize)]
struct SetJson {
    n: usize,
    p: u64,
    pieces: Vec<Piece>,
    dim: Option<u64>,
    deg_lci: Option<u64>,
}

impl<'de> Deserialize<'de> for ConstructibleSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SetJson::deserialize(d)?;
        let field = PrimeField::new(raw.p).map_err(serde::de::Error::custom)?;
        ConstructibleSet::new(field, raw.n, raw.pieces)
            .map(|c| c.with_declared(raw.dim, raw.deg_lci))
            .map_err(serde::de::Error::custom)
    }
}

fn check_cap(p: u64, n: usize, cap: u64) -> Result<()> {
    let needed = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(Error::ResourceCapExceeded { needed, cap });
    }
    Ok(())
}

/// Points of `F_p^n` satisfying `keep`, in lexicographic order. Work is split
/// by the first coordinate and merged in order.
fn scan(field: PrimeField, n: usize, cap: u64, keep: impl Fn(&[u64]) -> bool + Sync) -> Result<Vec<Point>> {
    check_cap(field.modulus(), n, cap)?;
    if n == 0 {
        let origin = Point(Vec::new());
        return Ok(if keep(&origin) { vec![origin] } else { Vec::new() });
    }
    let p = field.modulus();
    let chunks: Vec<Vec<Point>> = field
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut x = vec![0u64; n];
            x[0] = first;
            loop {
                if keep(&x) {
                    out.push(Point(x.clone()));
                }
                // odometer over coordinates 1..n
                let Some(k) = (1..n).rev().find(|&k| x[k] + 1 < p) else {
                    break;
                };
                x[k] += 1;
                x[k + 1..].iter_mut().for_each(|c| *c = 0);
            }
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// All `F_p`-points of `c`, in lexicographic order.
pub fn enumerate_points(c: &ConstructibleSet, cap: u64) -> Result<Vec<Point>> {
    scan(c.field(), c.n, cap, |x| c.contains(x))
}

/// Image of `points` under the projection onto the first `keep` coordinates,
/// sorted and deduplicated.
pub fn project(points: &[Point], keep: usize) -> Vec<Point> {
    let set: BTreeSet<Point> = points.iter().map(|x| Point(x[..keep].to_vec())).collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs <= rhs`
    Le,
    /// `lhs >= rhs`
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: u128,
    pub relation: Relation,
    /// saturates at `u128::MAX`
    pub rhs: u128,
    pub holds: bool,
}

impl BoundCheck {
    fn new(name: &str, lhs: u128, relation: Relation, rhs: u128) -> Self {
        let holds = match relation {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        };
        Self {
            name: name.to_string(),
            lhs,
            relation,
            rhs,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub total: u64,
    pub per_set: Vec<u64>,
    pub checks: Vec<BoundCheck>,
}

impl CountReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn sat_pow(base: u64, exp: u64) -> u128 {
    (base as u128).checked_pow(exp.min(u32::MAX as u64) as u32).unwrap_or(u128::MAX)
}

/// Counts `F_q`-points of `c` and compares with `deg_lci(c) q^dim(c)` when both
/// are declared.
pub fn count_points(c: &ConstructibleSet, cap: u64) -> Result<CountReport> {
    let pts = enumerate_points(c, cap)?;
    let per_set = c
        .pieces
        .iter()
        .map(|pc| pts.iter().filter(|x| pc.contains(x)).count() as u64)
        .collect();
    let mut checks = Vec::new();
    if let (Some(dim), Some(deg)) = (c.declared_dim, c.declared_deg_lci) {
        let rhs = (deg as u128).saturating_mul(sat_pow(c.p, dim));
        checks.push(BoundCheck::new("rational_points", pts.len() as u128, Relation::Le, rhs));
    }
    Ok(CountReport {
        total: pts.len() as u64,
        per_set,
        checks,
    })
}

/// Nonzero count of `f` over `F_q^n` against `(q - deg f) q^(n-1)`.
pub fn ore_check(f: &MultiPoly, cap: u64) -> Result<CountReport> {
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    let field = f.field();
    let q = field.modulus();
    if deg as u64 > q - 1 {
        return Err(Error::DegreeTooLarge {
            degree: deg,
            max: q - 1,
        });
    }
    let n = f.nvars();
    let nonzeros = scan(field, n, cap, |x| f.eval_unchecked(x) != 0)?.len() as u64;
    let rhs = ((q - deg as u64) as u128).saturating_mul(sat_pow(q, n.saturating_sub(1) as u64));
    Ok(CountReport {
        total: nonzeros,
        per_set: Vec::new(),
        checks: vec![BoundCheck::new("nonzeros", nonzeros as u128, Relation::Ge, rhs)],
    })
}

/// Options for [`intersect_count`].
#[derive(Debug, Clone, Default)]
pub struct IntersectOptions {
    /// Compare against declared degrees; requires every set to declare one.
    pub compare: bool,
    /// Dimension of the intersection; defaults to the smallest declared dim.
    pub intersection_dim: Option<u64>,
}

/// Brute-force count of `C_1 ∩ ... ∩ C_s`.
///
/// With `compare` set the report holds two checks:
/// * `product`: `count <= prod deg_lci(C_i) * q^dim`;
/// * `dim_exponent`: `count <= deg_lci(C_1) * (max_{i>=2} deg_lci(C_i))^dim(C_1) * q^dim`.
pub fn intersect_count(sets: &[ConstructibleSet], opts: &IntersectOptions, cap: u64) -> Result<CountReport> {
    let first = sets
        .first()
        .ok_or_else(|| Error::InvalidInput("nothing to intersect".into()))?;
    if sets.iter().any(|c| (c.n, c.p) != (first.n, first.p)) {
        return Err(Error::InvalidInput("sets live in different ambient spaces".into()));
    }
    let field = first.field();
    let pts = scan(field, first.n, cap, |x| sets.iter().all(|c| c.contains(x)))?;
    let per_set = sets
        .iter()
        .map(|c| enumerate_points(c, cap).map(|v| v.len() as u64))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    if opts.compare {
        let degs: Vec<u64> = sets
            .iter()
            .map(|c| c.declared_deg_lci)
            .collect::<Option<_>>()
            .ok_or(Error::MissingDeclaration("every set needs a declared deg_lci"))?;
        let dim = opts
            .intersection_dim
            .or_else(|| sets.iter().filter_map(|c| c.declared_dim).min())
            .ok_or(Error::MissingDeclaration("intersection dimension"))?;
        let q_dim = sat_pow(first.p, dim);
        let count = pts.len() as u128;
        let product = degs
            .iter()
            .fold(1u128, |acc, &d| acc.saturating_mul(d as u128))
            .saturating_mul(q_dim);
        checks.push(BoundCheck::new("product", count, Relation::Le, product));
        if let Some(dim1) = first.declared_dim {
            let max_rest = degs[1..].iter().copied().max().unwrap_or(1);
            let rhs = (degs[0] as u128)
                .saturating_mul(sat_pow(max_rest, dim1))
                .saturating_mul(q_dim);
            checks.push(BoundCheck::new("dim_exponent", count, Relation::Le, rhs));
        }
    }
    Ok(CountReport {
        total: pts.len() as u64,
        per_set,
        checks,
    })
}

/// Point counts reproducing the projection counterexample built from the
/// cubic surface `ZXY + X^2 + Y^2 - 1` and the quadric `XZ + Y^2 - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CroixReport {
    pub p: u64,
    /// `#π(W)` for the cubic surface `W`
    pub projected_points: u64,
    /// `#(π(W) ∩ V(XY))`
    pub boundary_points: u64,
    /// `deg_z(π(W)) * deg V(XY) = 1 * 2`
    pub bezout_rhs: u64,
    pub violation: bool,
    /// `#(π(W') ∩ V(X))` for the quadric `W'`
    pub quadric_boundary_points: u64,
    /// `#π(W' ∩ V(Z))`, expected `2p`
    pub defect_points: u64,
}

pub fn croix_de_berny(p: u64) -> Result<CroixReport> {
    let field = PrimeField::new(p)?;
    if p == 2 {
        return Err(Error::BadCharacteristic);
    }
    let x = MultiPoly::var(field, 3, 0);
    let y = MultiPoly::var(field, 3, 1);
    let z = MultiPoly::var(field, 3, 2);
    let one = MultiPoly::constant(field, 3, 1);
    let cubic = &(&(&(&z * &x) * &y) + &(&(&x * &x) + &(&y * &y))) - &one;
    let quadric = &(&(&x * &z) + &(&y * &y)) - &one;

    let w = enumerate_points(&ConstructibleSet::variety(field, 3, vec![cubic])?, u64::MAX)?;
    let c = project(&w, 2);
    let boundary = c
        .iter()
        .filter(|pt| field.mul(pt[0], pt[1]) == 0)
        .count() as u64;

    let w2 = enumerate_points(&ConstructibleSet::variety(field, 3, vec![quadric.clone()])?, u64::MAX)?;
    let quadric_boundary = project(&w2, 2).iter().filter(|pt| pt[0] == 0).count() as u64;

    let w3 = enumerate_points(&ConstructibleSet::variety(field, 3, vec![quadric, z])?, u64::MAX)?;
    let defect = project(&w3, 2).len() as u64;

    let bezout_rhs = 2;
    Ok(CroixReport {
        p,
        projected_points: c.len() as u64,
        boundary_points: boundary,
        bezout_rhs,
        violation: boundary > bezout_rhs,
        quadric_boundary_points: quadric_boundary,
        defect_points: defect,
    })
}
