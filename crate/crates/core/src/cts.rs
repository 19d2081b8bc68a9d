//! Correct test sequences.
//!
//! A finite point set `Q` is a correct test sequence (CTS) for a family `Ω`
//! of polynomial lists with discriminant `Σ ⊆ Ω` when every `f ∈ Ω` that
//! vanishes at all points of `Q` lies in `Σ`.
//!
//! Two verification routes are provided:
//!
//! * **rank**: for a linear family with `Σ = {0}`, `Q` is a CTS iff the
//!   evaluation map restricted to `Ω` is injective, i.e. the evaluation
//!   matrix on a basis of `Ω` has full column rank. Rank over `F_p` equals
//!   rank over the algebraic closure, so this verdict is exact for the
//!   family over the closure as well.
//! * **enumeration**: scan every member of an enumerable family.
//!
//! Sampling experiments derive one child [`Rng`] per trial, so reports are a
//! pure function of `(seed, trials)` whatever the worker count.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{density_failure, floor_root};
use crate::error::{Error, Result};
use crate::field::{GridIter, Point, PrimeField, Rng};
use crate::linalg::Matrix;
use crate::poly::{monomials_up_to, DegreeProfile, Monomial, MultiPoly};

/// Default cap on enumerated family members and subset searches.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

pub type PolyList = Vec<MultiPoly>;

fn is_zero_list(f: &[MultiPoly]) -> bool {
    f.iter().all(MultiPoly::is_zero)
}

fn vanishes_on(f: &[MultiPoly], points: &[Point]) -> bool {
    points
        .iter()
        .all(|x| f.iter().all(|g| g.eval_unchecked(x) == 0))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// All of `P_(d)`.
    Dense(DegreeProfile),
    /// `F_p`-span of the given polynomial lists.
    Linear { basis: Vec<PolyList> },
    /// Image of a parameter grid under coordinate polynomials; `maps[j]` is
    /// the `j`-th dense coefficient (components concatenated, monomials in
    /// degree-lex order).
    Parameterized {
        profile: DegreeProfile,
        params: Vec<Vec<u64>>,
        maps: Vec<MultiPoly>,
    },
    Enumerated { members: Vec<PolyList> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFamily {
    field: PrimeField,
    n: usize,
    m: usize,
    kind: FamilyKind,
    declared_dim: Option<u64>,
    declared_deg_lci: Option<u64>,
}

fn check_list(field: PrimeField, n: usize, m: usize, f: &[MultiPoly]) -> Result<()> {
    if f.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: f.len(),
        });
    }
    for g in f {
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
    Ok(())
}

impl PolyFamily {
    pub fn dense(field: PrimeField, profile: DegreeProfile) -> Self {
        Self {
            field,
            n: profile.n,
            m: profile.m(),
            kind: FamilyKind::Dense(profile),
            declared_dim: None,
            declared_deg_lci: None,
        }
    }

    pub fn linear(field: PrimeField, n: usize, basis: Vec<PolyList>) -> Result<Self> {
        let m = basis.first().map(Vec::len).ok_or_else(|| {
            Error::InvalidInput("a linear family needs at least one basis element".into())
        })?;
        for b in &basis {
            check_list(field, n, m, b)?;
        }
        Ok(Self {
            field,
            n,
            m,
            kind: FamilyKind::Linear { basis },
            declared_dim: None,
            declared_deg_lci: None,
        })
    }

    pub fn parameterized(
        field: PrimeField,
        profile: DegreeProfile,
        params: Vec<Vec<u64>>,
        maps: Vec<MultiPoly>,
    ) -> Result<Self> {
        let expected = profile.dimension_u64()? as usize;
        if maps.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: maps.len(),
            });
        }
        for g in &maps {
            if g.nvars() != params.len() || g.field() != field {
                return Err(Error::InvalidInput(
                    "coordinate maps must be polynomials in the parameters".into(),
                ));
            }
        }
        Ok(Self {
            field,
            n: profile.n,
            m: profile.m(),
            kind: FamilyKind::Parameterized {
                profile,
                params,
                maps,
            },
            declared_dim: None,
            declared_deg_lci: None,
        })
    }

    pub fn enumerated(field: PrimeField, n: usize, members: Vec<PolyList>) -> Result<Self> {
        let m = members
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("empty enumerated family".into()))?;
        for f in &members {
            check_list(field, n, m, f)?;
        }
        Ok(Self {
            field,
            n,
            m,
            kind: FamilyKind::Enumerated { members },
            declared_dim: None,
            declared_deg_lci: None,
        })
    }

    pub fn with_declared(mut self, dim: Option<u64>, deg_lci: Option<u64>) -> Self {
        if dim.is_some() {
            self.declared_dim = dim;
        }
        if deg_lci.is_some() {
            self.declared_deg_lci = deg_lci;
        }
        self
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn num_outputs(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, FamilyKind::Dense(_) | FamilyKind::Linear { .. })
    }

    /// Declared dimension, auto-filled for linear families.
    pub fn dim(&self) -> Option<u64> {
        self.declared_dim.or_else(|| match &self.kind {
            FamilyKind::Dense(p) => p.dimension_u64().ok(),
            FamilyKind::Linear { .. } => self.independent_basis().ok().map(|b| b.len() as u64),
            _ => None,
        })
    }

    /// Declared LCI-degree; linear spaces have degree 1.
    pub fn deg_lci(&self) -> Option<u64> {
        self.declared_deg_lci.or(match self.kind {
            FamilyKind::Dense(_) | FamilyKind::Linear { .. } => Some(1),
            _ => None,
        })
    }

    /// Largest total degree appearing in the family.
    pub fn max_degree(&self) -> u32 {
        let list_deg = |f: &PolyList| f.iter().filter_map(MultiPoly::degree).max().unwrap_or(0);
        match &self.kind {
            FamilyKind::Dense(p) | FamilyKind::Parameterized { profile: p, .. } => p.max_degree(),
            FamilyKind::Linear { basis } => basis.iter().map(list_deg).max().unwrap_or(0),
            FamilyKind::Enumerated { members } => members.iter().map(list_deg).max().unwrap_or(0),
        }
    }

    fn dense_basis(&self, profile: &DegreeProfile) -> Vec<PolyList> {
        let mut out = Vec::new();
        for (k, &d) in profile.degrees.iter().enumerate() {
            for mono in monomials_up_to(self.n, d) {
                let mut list: PolyList = (0..self.m).map(|_| MultiPoly::zero(self.field, self.n)).collect();
                list[k] = MultiPoly::monomial(self.field, mono, 1);
                out.push(list);
            }
        }
        out
    }

    /// A linearly independent basis of a linear family (deterministic:
    /// earlier basis elements are preferred).
    pub fn independent_basis(&self) -> Result<Vec<PolyList>> {
        let basis = match &self.kind {
            FamilyKind::Dense(p) => return Ok(self.dense_basis(p)),
            FamilyKind::Linear { basis } => basis,
            _ => return Err(Error::NotLinearFamily),
        };
        // coordinates of every basis element on the union of their supports
        let mut support: Vec<(usize, Monomial)> = basis
            .iter()
            .flat_map(|f| {
                f.iter()
                    .enumerate()
                    .flat_map(|(k, g)| g.terms().map(move |(mono, _)| (k, mono.clone())))
            })
            .collect();
        support.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        support.dedup();
        let mut coords = Matrix::zeros(self.field, support.len(), basis.len());
        for (j, f) in basis.iter().enumerate() {
            for (i, (k, mono)) in support.iter().enumerate() {
                coords.set(i, j, f[*k].coefficient(mono.exps())?);
            }
        }
        let pivots = coords.clone().rref();
        Ok(pivots.into_iter().map(|j| basis[j].clone()).collect())
    }

    /// Every member of the family, materialized. Errors when more than
    /// `cap` members would be produced.
    pub fn members(&self, cap: u64) -> Result<Vec<PolyList>> {
        let p = self.field.modulus();
        match &self.kind {
            FamilyKind::Enumerated { members } => {
                if members.len() as u64 > cap {
                    return Err(Error::ResourceCapExceeded {
                        needed: members.len() as u128,
                        cap,
                    });
                }
                Ok(members.clone())
            }
            FamilyKind::Dense(_) | FamilyKind::Linear { .. } => {
                let basis = self.independent_basis()?;
                let count = BigUint::from(p).pow(basis.len() as u32);
                if count > BigUint::from(cap) {
                    return Err(Error::ResourceCapExceeded {
                        needed: count.to_u128().unwrap_or(u128::MAX),
                        cap,
                    });
                }
                let axes = vec![self.field.elements().collect::<Vec<_>>(); basis.len()];
                Ok(GridIter::new(axes)
                    .map(|c| self.combine(&basis, &c))
                    .collect())
            }
            FamilyKind::Parameterized {
                profile,
                params,
                maps,
            } => {
                let count: BigUint = params.iter().map(|a| BigUint::from(a.len())).product();
                if count > BigUint::from(cap) {
                    return Err(Error::ResourceCapExceeded {
                        needed: count.to_u128().unwrap_or(u128::MAX),
                        cap,
                    });
                }
                let basis = self.dense_basis(profile);
                GridIter::new(params.clone())
                    .map(|t| {
                        let coeffs: Vec<u64> = maps
                            .iter()
                            .map(|g| g.evaluate(&t))
                            .collect::<Result<_>>()?;
                        Ok(self.combine(&basis, &coeffs))
                    })
                    .collect()
            }
        }
    }

    fn combine(&self, basis: &[PolyList], coeffs: &[u64]) -> PolyList {
        let mut out: PolyList = (0..self.m).map(|_| MultiPoly::zero(self.field, self.n)).collect();
        for (b, &c) in basis.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (o, g) in out.iter_mut().zip(b) {
                *o = &*o + &g.scale(c);
            }
        }
        out
    }

    fn check_points(&self, points: &[Point]) -> Result<()> {
        points.iter().try_for_each(|x| x.check_dim(self.n))
    }
}

/// The discriminant `Σ`.
#[derive(Clone)]
pub enum Discriminant {
    ZeroOnly,
    Predicate(Arc<dyn Fn(&[MultiPoly]) -> bool + Send + Sync>),
    Enumerated(Vec<PolyList>),
}

impl Discriminant {
    pub fn predicate<F>(f: F) -> Self
    where
        F: Fn(&[MultiPoly]) -> bool + Send + Sync + 'static,
    {
        Discriminant::Predicate(Arc::new(f))
    }

    pub fn contains(&self, f: &[MultiPoly]) -> bool {
        match self {
            Discriminant::ZeroOnly => is_zero_list(f),
            Discriminant::Predicate(p) => p(f),
            Discriminant::Enumerated(list) => list.iter().any(|g| g.as_slice() == f),
        }
    }

    pub fn is_zero_only(&self) -> bool {
        matches!(self, Discriminant::ZeroOnly)
    }
}

impl fmt::Debug for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discriminant::ZeroOnly => write!(f, "ZeroOnly"),
            Discriminant::Predicate(_) => write!(f, "Predicate(..)"),
            Discriminant::Enumerated(l) => write!(f, "Enumerated({} members)", l.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rank,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtsVerdict {
    pub is_cts: bool,
    /// A member vanishing on every point but outside the discriminant.
    pub witness: Option<PolyList>,
    pub method: Method,
}

/// `L x C(d+n, n)` matrix of the monomials of degree `<= d` (columns, in
/// degree-lex order) evaluated at the points (rows).
pub fn evaluation_matrix(field: PrimeField, n: usize, d: u32, points: &[Point]) -> Result<Matrix> {
    let monos = monomials_up_to(n, d);
    let mut m = Matrix::zeros(field, points.len(), monos.len());
    for (r, x) in points.iter().enumerate() {
        x.check_dim(n)?;
        for (c, mono) in monos.iter().enumerate() {
            m.set(r, c, mono.evaluate(field, x));
        }
    }
    Ok(m)
}

/// Rank-based verdict for linear families and `Σ = {0}`.
pub fn is_cts_linear(family: &PolyFamily, points: &[Point]) -> Result<CtsVerdict> {
    family.check_points(points)?;
    let basis = family.independent_basis()?;
    if let Some(declared) = family.declared_dim {
        if declared != basis.len() as u64 {
            return Err(Error::InvalidInput(format!(
                "declared dimension {declared} but the basis spans {}",
                basis.len()
            )));
        }
    }
    let m = family.m;
    let mut ev = Matrix::zeros(family.field, points.len() * m, basis.len());
    for (j, b) in basis.iter().enumerate() {
        for (i, x) in points.iter().enumerate() {
            for (k, g) in b.iter().enumerate() {
                ev.set(i * m + k, j, g.eval_unchecked(x));
            }
        }
    }
    let witness = ev.kernel_vector().map(|c| family.combine(&basis, &c));
    Ok(CtsVerdict {
        is_cts: witness.is_none(),
        witness,
        method: Method::Rank,
    })
}

/// Verdict by scanning every member of the family.
pub fn is_cts_enumerated(
    family: &PolyFamily,
    sigma: &Discriminant,
    points: &[Point],
    cap: u64,
) -> Result<CtsVerdict> {
    family.check_points(points)?;
    let members = family.members(cap)?;
    let witness = members
        .into_iter()
        .find(|f| vanishes_on(f, points) && !sigma.contains(f));
    Ok(CtsVerdict {
        is_cts: witness.is_none(),
        witness,
        method: Method::Enumeration,
    })
}

/// Rank route when applicable, enumeration otherwise.
pub fn is_cts(family: &PolyFamily, sigma: &Discriminant, points: &[Point], cap: u64) -> Result<CtsVerdict> {
    if family.is_linear() && sigma.is_zero_only() {
        is_cts_linear(family, points)
    } else {
        is_cts_enumerated(family, sigma, points, cap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringResult {
    /// minimal CTS length found in the pool
    pub length: usize,
    pub points: Vec<Point>,
    /// `dim Ω - dim Σ` from the declarations (when available)
    pub lower_bound: Option<i64>,
    pub lower_bound_holds: bool,
    pub subsets_examined: u64,
}

/// Lexicographic k-subsets of `0..n`.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<bool>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx)? {
            return Ok(());
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return Ok(());
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Smallest `L` such that some `L` distinct pool points form a CTS.
///
/// `sigma_dim` is the declared dimension of `Σ` (0 for `Σ = {0}`); with the
/// family's declared dimension it yields the length lower bound.
pub fn covering_number(
    family: &PolyFamily,
    sigma: &Discriminant,
    sigma_dim: Option<u64>,
    pool: &[Point],
    cap: u64,
) -> Result<CoveringResult> {
    family.check_points(pool)?;
    let total: BigUint = (0..=pool.len() as u64)
        .map(|k| crate::bounds::binomial(pool.len() as u64, k))
        .sum();
    let use_rank = family.is_linear() && sigma.is_zero_only();

    // enumeration route: nonvanishing masks of each relevant member
    let masks: Vec<Vec<bool>> = if use_rank {
        Vec::new()
    } else {
        family
            .members(cap)?
            .into_iter()
            .filter(|f| !sigma.contains(f))
            .map(|f| {
                pool.iter()
                    .map(|x| f.iter().any(|g| g.eval_unchecked(x) != 0))
                    .collect()
            })
            .collect()
    };

    let sigma_dim = sigma_dim.or(if sigma.is_zero_only() { Some(0) } else { None });
    let lower_bound = family
        .dim()
        .zip(sigma_dim)
        .map(|(a, b)| a as i64 - b as i64);

    let mut examined = 0u64;
    for k in 0..=pool.len() {
        let batch = crate::bounds::binomial(pool.len() as u64, k as u64);
        if BigUint::from(examined) + &batch > BigUint::from(cap) {
            return Err(Error::ResourceCapExceeded {
                needed: total.to_u128().unwrap_or(u128::MAX),
                cap,
            });
        }
        let mut found: Option<Vec<usize>> = None;
        for_each_subset(pool.len(), k, |idx| {
            examined += 1;
            let ok = if use_rank {
                let pts: Vec<Point> = idx.iter().map(|&i| pool[i].clone()).collect();
                is_cts_linear(family, &pts)?.is_cts
            } else {
                masks.iter().all(|mask| idx.iter().any(|&i| mask[i]))
            };
            if ok {
                found = Some(idx.to_vec());
            }
            Ok(ok)
        })?;
        if let Some(idx) = found {
            return Ok(CoveringResult {
                length: k,
                points: idx.iter().map(|&i| pool[i].clone()).collect(),
                lower_bound,
                lower_bound_holds: lower_bound.is_none_or(|b| k as i64 >= b),
                subsets_examined: examined,
            });
        }
    }
    Err(Error::NoCtsInPool)
}

/// Sample length and grid radius of the evaluation-only decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtsParameters {
    #[serde(rename = "L")]
    pub length: u64,
    #[serde(rename = "R")]
    pub radius: u64,
}

/// `L = 6 dim(Ω)`, `R = max{(6(d+1))^2, floor(deg_lci^(2/dim))}`; the root
/// is the exact integer floor (largest `R` with `R^dim <= deg^2`).
pub fn cts_params(dim: u64, deg_lci: u64, d: u64) -> Result<CtsParameters> {
    if dim == 0 || deg_lci == 0 {
        return Err(Error::InvalidInput("dim(Ω) and deg_lci(Ω) must be >= 1".into()));
    }
    let grid = BigUint::from(6 * (d + 1)).pow(2);
    let root = floor_root(&BigUint::from(deg_lci).pow(2), dim);
    let radius = grid.max(root).to_u64().ok_or_else(|| {
        Error::InvalidInput("sampling radius does not fit in 64 bits".into())
    })?;
    Ok(CtsParameters {
        length: 6 * dim,
        radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityHypotheses {
    /// `L >= 6 dim(Ω)`
    pub length_ok: bool,
    /// `#Q0 >= max{(2(d+1))^2, deg_lci^(2/dim)}`
    pub grid_ok: bool,
    /// the larger grid `(6(d+1))^2` used by the decision algorithm
    pub grid_ok_algorithm: bool,
    pub required_grid: u64,
    pub required_grid_algorithm: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub trials: u64,
    pub cts_count: u64,
    pub rate: f64,
    /// `log10` of the failure bound `1/(deg_lci e^(dim + (m-1) L))`
    pub bound_log10: f64,
    /// the success lower bound `1 - 10^bound_log10`
    pub bound: f64,
    pub hypotheses: DensityHypotheses,
    pub warnings: Vec<String>,
    pub seed: u64,
    pub length: u64,
    pub grid_size: u64,
    pub dim: u64,
    pub deg_lci: u64,
}

/// Samples `trials` lists of `length` points from `values^n` and records how
/// many are correct test sequences.
pub fn density_experiment(
    family: &PolyFamily,
    sigma: &Discriminant,
    values: &[u64],
    length: u64,
    trials: u64,
    seed: u64,
    cap: u64,
) -> Result<DensityReport> {
    let dim = family
        .dim()
        .ok_or(Error::MissingDeclaration("dim(Ω) is required for the density bound"))?;
    let deg = family
        .deg_lci()
        .ok_or(Error::MissingDeclaration("deg_lci(Ω) is required for the density bound"))?;
    if dim == 0 || deg == 0 {
        return Err(Error::InvalidInput("dim(Ω) and deg_lci(Ω) must be >= 1".into()));
    }
    let mut grid: Vec<u64> = values.iter().map(|&v| family.field.reduce(v)).collect();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty value grid".into()));
    }
    if !family.is_linear() || !sigma.is_zero_only() {
        // fail fast instead of once per trial
        family.members(cap)?;
    }

    let d = family.max_degree() as u64;
    let lci_root = floor_root(&BigUint::from(deg).pow(2), dim).to_u64().unwrap_or(u64::MAX);
    let required_grid = (2 * (d + 1)).pow(2).max(lci_root);
    let required_grid_algorithm = (6 * (d + 1)).pow(2).max(lci_root);
    // #Q0 >= deg^(2/dim)  <=>  #Q0^dim >= deg^2
    let lci_ok = BigUint::from(grid.len()).pow(dim as u32) >= BigUint::from(deg).pow(2);
    let hypotheses = DensityHypotheses {
        length_ok: length >= 6 * dim,
        grid_ok: grid.len() as u64 >= (2 * (d + 1)).pow(2) && lci_ok,
        grid_ok_algorithm: grid.len() as u64 >= (6 * (d + 1)).pow(2) && lci_ok,
        required_grid,
        required_grid_algorithm,
    };
    let mut warnings = Vec::new();
    if !hypotheses.length_ok {
        warnings.push(format!("length {length} < 6 dim(Ω) = {}", 6 * dim));
    }
    if !hypotheses.grid_ok {
        warnings.push(format!(
            "grid size {} below the required {}",
            grid.len(),
            required_grid
        ));
    }

    let n = family.n;
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = Rng::derive(seed, t);
            let pts: Vec<Point> = (0..length)
                .map(|_| family.field.sample_value_point(&grid, n, &mut rng))
                .collect::<Result<_>>()?;
            Ok(is_cts(family, sigma, &pts, cap)?.is_cts)
        })
        .collect::<Result<_>>()?;
    let cts_count = outcomes.iter().filter(|&&b| b).count() as u64;

    let failure = density_failure(dim, deg, family.m as u64, length);
    Ok(DensityReport {
        trials,
        cts_count,
        rate: if trials == 0 { 0.0 } else { cts_count as f64 / trials as f64 },
        bound_log10: failure.log10(),
        bound: failure.complement(),
        hypotheses,
        warnings,
        seed,
        length,
        grid_size: grid.len() as u64,
        dim,
        deg_lci: deg,
    })
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FamilyJson {
    Dense {
        p: u64,
        n: usize,
        degrees: Vec<u32>,
        dim: Option<u64>,
        deg_lci: Option<u64>,
    },
    Linear {
        p: u64,
        n: usize,
        basis: Vec<PolyList>,
        dim: Option<u64>,
        deg_lci: Option<u64>,
    },
    Parameterized {
        p: u64,
        n: usize,
        degrees: Vec<u32>,
        params: Vec<Vec<u64>>,
        maps: Vec<MultiPoly>,
        dim: Option<u64>,
        deg_lci: Option<u64>,
    },
    Enumerated {
        p: u64,
        n: usize,
        members: Vec<PolyList>,
        dim: Option<u64>,
        deg_lci: Option<u64>,
    },
}

impl TryFrom<FamilyJson> for PolyFamily {
    type Error = Error;

    fn try_from(raw: FamilyJson) -> Result<Self> {
        Ok(match raw {
            FamilyJson::Dense {
                p,
                n,
                degrees,
                dim,
                deg_lci,
            } => PolyFamily::dense(PrimeField::new(p)?, DegreeProfile::new(n, degrees)?)
                .with_declared(dim, deg_lci),
            FamilyJson::Linear {
                p,
                n,
                basis,
                dim,
                deg_lci,
            } => PolyFamily::linear(PrimeField::new(p)?, n, basis)?.with_declared(dim, deg_lci),
            FamilyJson::Parameterized {
                p,
                n,
                degrees,
                params,
                maps,
                dim,
                deg_lci,
            } => PolyFamily::parameterized(
                PrimeField::new(p)?,
                DegreeProfile::new(n, degrees)?,
                params,
                maps,
            )?
            .with_declared(dim, deg_lci),
            FamilyJson::Enumerated {
                p,
                n,
                members,
                dim,
                deg_lci,
            } => PolyFamily::enumerated(PrimeField::new(p)?, n, members)?.with_declared(dim, deg_lci),
        })
    }
}

impl<'de> Deserialize<'de> for PolyFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FamilyJson::deserialize(d)?;
        PolyFamily::try_from(raw).map_err(serde::de::Error::custom)
    }
}
