//! Grid algebras `K[E] = K[X]/I(E)` for product grids `E = E_1 x ... x E_n`.
//!
//! The ideal `I(E)` is generated by `h_i(X_i) = prod_{ζ in E_i} (X_i - ζ)`,
//! and the monomials `X^μ` with `μ_i < d_i` form a basis of `K[E]`. The
//! univariate dual bases `g_k^(i)` satisfy
//! `sum_{ζ in E_i} g_k(ζ) ζ^r = δ_{k,r}`; products of them read off
//! coefficients of `f` from its values on `E` alone.

use serde::{Deserialize, Serialize};

use crate::circuit::Evaluable;
use crate::error::{Error, Result};
use crate::field::{GridIter, Point, PrimeField};
use crate::linalg::Matrix;
use crate::poly::{Monomial, MultiPoly};

/// Default cap on the grid size `D = prod d_i`.
pub const DEFAULT_GRID_CAP: u64 = 100_000_000;
/// Default cap on `D` for the multiplication-matrix check.
pub const DEFAULT_MATRIX_CAP: u64 = 256;

/// Coefficients (constant term first) of `prod (T - r)`.
fn poly_from_roots(field: PrimeField, roots: &[u64]) -> Vec<u64> {
    let mut c = vec![1u64];
    for &r in roots {
        let mut next = vec![0u64; c.len() + 1];
        for (j, &a) in c.iter().enumerate() {
            next[j + 1] = field.add(next[j + 1], a);
            next[j] = field.sub(next[j], field.mul(a, r));
        }
        c = next;
    }
    c
}

fn horner(field: PrimeField, c: &[u64], t: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &a| field.add(field.mul(acc, t), a))
}

/// Lagrange interpolation through `(xs[j], ys[j])`, degree `< xs.len()`.
fn interpolate(field: PrimeField, xs: &[u64], ys: &[u64]) -> Result<Vec<u64>> {
    let mut out = vec![0u64; xs.len()];
    for (j, (&xj, &yj)) in xs.iter().zip(ys).enumerate() {
        if yj == 0 {
            continue;
        }
        let others: Vec<u64> = xs.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
        let basis = poly_from_roots(field, &others);
        let denom = others.iter().fold(1, |acc, &x| field.mul(acc, field.sub(xj, x)));
        let scale = field.mul(yj, field.inv(denom)?);
        for (o, &b) in out.iter_mut().zip(&basis) {
            *o = field.add(*o, field.mul(scale, b));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridAlgebra {
    #[serde(skip)]
    field: PrimeField,
    pub p: u64,
    pub grids: Vec<Vec<u64>>,
    /// `h_i` coefficients, constant term first; monic of degree `d_i`
    pub h: Vec<Vec<u64>>,
    /// `duals[i][k]`: coefficients of `g_k^(i)`
    pub duals: Vec<Vec<Vec<u64>>>,
    /// `dual_values[i][k][j] = g_k^(i)(E_i[j])`
    #[serde(skip)]
    dual_values: Vec<Vec<Vec<u64>>>,
}

impl GridAlgebra {
    pub fn new(field: PrimeField, grids: Vec<Vec<u64>>) -> Result<Self> {
        Self::with_cap(field, grids, DEFAULT_GRID_CAP)
    }

    pub fn with_cap(field: PrimeField, grids: Vec<Vec<u64>>, cap: u64) -> Result<Self> {
        if grids.is_empty() || grids.iter().any(Vec::is_empty) {
            return Err(Error::InvalidInput("every grid coordinate needs at least one node".into()));
        }
        let grids: Vec<Vec<u64>> = grids
            .into_iter()
            .map(|g| g.into_iter().map(|v| field.reduce(v)).collect())
            .collect();
        for (i, g) in grids.iter().enumerate() {
            let mut seen = g.clone();
            seen.sort_unstable();
            if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateNode {
                    coordinate: i,
                    value: w[0],
                });
            }
        }
        let size = grids
            .iter()
            .try_fold(1u128, |acc, g| acc.checked_mul(g.len() as u128))
            .unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::ResourceCapExceeded { needed: size, cap });
        }

        let mut h = Vec::new();
        let mut duals = Vec::new();
        let mut dual_values = Vec::new();
        for g in &grids {
            let d = g.len();
            h.push(poly_from_roots(field, g));
            // rows r: ζ_j^r
            let vander = Matrix::from_rows(
                field,
                (0..d as u64)
                    .map(|r| g.iter().map(|&z| field.pow(z, r)).collect())
                    .collect(),
            )?;
            let mut gi = Vec::new();
            let mut vi = Vec::new();
            for k in 0..d {
                let mut e = vec![0; d];
                e[k] = 1;
                let w = vander.solve(&e)?;
                gi.push(interpolate(field, g, &w)?);
                vi.push(w);
            }
            duals.push(gi);
            dual_values.push(vi);
        }
        Ok(Self {
            field,
            p: field.modulus(),
            grids,
            h,
            duals,
            dual_values,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.grids.len()
    }

    pub fn dims(&self) -> Vec<u32> {
        self.grids.iter().map(|g| g.len() as u32).collect()
    }

    /// `D = prod d_i`, the dimension of `K[E]`.
    pub fn size(&self) -> u64 {
        self.grids.iter().map(|g| g.len() as u64).product()
    }

    /// `sum d_i - n`, the largest degree with a box monomial.
    pub fn top_degree(&self) -> u32 {
        self.dims().iter().map(|d| d - 1).sum()
    }

    /// Grid points in lexicographic order.
    pub fn points(&self) -> GridIter {
        GridIter::new(self.grids.clone())
    }

    /// Exponents of the monomial basis (the box `μ_i < d_i`), lexicographic.
    pub fn box_exponents(&self) -> impl Iterator<Item = Vec<u32>> {
        GridIter::new(self.grids.iter().map(|g| (0..g.len() as u64).collect()).collect())
            .map(|p| p.iter().map(|&v| v as u32).collect())
    }

    pub fn in_box(&self, theta: &[u32]) -> bool {
        theta.len() == self.nvars() && theta.iter().zip(&self.grids).all(|(&t, g)| (t as usize) < g.len())
    }

    fn check_box(&self, theta: &[u32]) -> Result<()> {
        if self.in_box(theta) {
            Ok(())
        } else {
            Err(Error::ThetaOutOfBox(theta.to_vec()))
        }
    }

    /// `g_k^(i)(t)` for arbitrary `t`.
    pub fn dual_eval(&self, i: usize, k: usize, t: u64) -> u64 {
        horner(self.field, &self.duals[i][k], t)
    }

    /// Grid points with their weights `prod_i g_{θ_i}(z_i)`, skipping zero
    /// weights.
    fn weighted_points<'a>(&'a self, theta: &'a [u32]) -> impl Iterator<Item = (Point, u64)> + 'a {
        let f = self.field;
        GridIter::new(self.grids.iter().map(|g| (0..g.len() as u64).collect()).collect()).filter_map(
            move |idx| {
                let w = idx.iter().enumerate().fold(1, |acc, (i, &j)| {
                    f.mul(acc, self.dual_values[i][theta[i] as usize][j as usize])
                });
                (w != 0).then(|| {
                    let z = Point(idx.iter().enumerate().map(|(i, &j)| self.grids[i][j as usize]).collect());
                    (z, w)
                })
            },
        )
    }

    /// `sum_{z in E} prod_i g_{θ_i}(z_i) z^μ`, summed point by point.
    pub fn pairing(&self, theta: &[u32], mu: &[u32]) -> Result<u64> {
        self.check_box(theta)?;
        if mu.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                got: mu.len(),
            });
        }
        let f = self.field;
        let mono = Monomial::new(mu.to_vec());
        Ok(self
            .weighted_points(theta)
            .fold(0, |acc, (z, w)| f.add(acc, f.mul(w, mono.evaluate(f, &z)))))
    }

    /// `(pairing(θ, μ))` over the box in both indices; the identity matrix
    /// when the dual bases are correct.
    pub fn duality_matrix(&self) -> Result<Matrix> {
        let boxes: Vec<Vec<u32>> = self.box_exponents().collect();
        let mut m = Matrix::zeros(self.field, boxes.len(), boxes.len());
        for (r, theta) in boxes.iter().enumerate() {
            for (c, mu) in boxes.iter().enumerate() {
                m.set(r, c, self.pairing(theta, mu)?);
            }
        }
        Ok(m)
    }

    /// Coefficient of `X^θ` in `f`, read off from values on the grid.
    /// `declared_degree` must equal `|θ|`.
    pub fn extract_coefficient(&self, f: &Evaluable, theta: &[u32], declared_degree: u32) -> Result<u64> {
        self.check_box(theta)?;
        let weight: u32 = theta.iter().sum();
        if weight != declared_degree {
            return Err(Error::DegreeMismatch {
                declared: declared_degree,
                theta: weight,
            });
        }
        self.check_scalar(f)?;
        let k = self.field;
        self.weighted_points(theta).try_fold(0, |acc, (z, w)| {
            Ok(k.add(acc, k.mul(w, f.evaluate(&z)?[0])))
        })
    }

    fn check_scalar(&self, f: &Evaluable) -> Result<()> {
        if f.field() != self.field {
            return Err(Error::FieldMismatch(self.p, f.field().modulus()));
        }
        if f.num_inputs() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                got: f.num_inputs(),
            });
        }
        if f.num_outputs() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: f.num_outputs(),
            });
        }
        Ok(())
    }

    /// First grid point (lexicographic) where `f` does not vanish.
    pub fn find_witness(&self, f: &Evaluable) -> Result<Option<Point>> {
        self.check_scalar(f)?;
        for z in self.points() {
            if f.evaluate(&z)?[0] != 0 {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    /// `f = 0`, or some `μ` in the box has `f_μ != 0` and `|μ| = deg f`.
    pub fn in_alon_family(&self, f: &MultiPoly) -> bool {
        let Some(deg) = f.degree() else {
            return true;
        };
        f.terms()
            .any(|(mono, _)| mono.degree() == deg && self.in_box(mono.exps()))
    }

    /// `T^e mod h_i` for `e = 0..=max`, as length-`d_i` coefficient vectors.
    fn power_table(&self, i: usize, max: u32) -> Vec<Vec<u64>> {
        let f = self.field;
        let d = self.grids[i].len();
        let h = &self.h[i];
        let mut table = Vec::with_capacity(max as usize + 1);
        let mut cur = vec![0u64; d];
        cur[0] = 1;
        for _ in 0..=max {
            table.push(cur.clone());
            // multiply by T and reduce with T^d = -sum_{j<d} h_j T^j
            let top = cur[d - 1];
            let mut next = vec![0u64; d];
            for j in (1..d).rev() {
                next[j] = cur[j - 1];
            }
            for j in 0..d {
                next[j] = f.sub(next[j], f.mul(top, h[j]));
            }
            cur = next;
        }
        table
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.nvars();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.grids[i + 1].len();
        }
        s
    }

    /// Adds `c * NF(X^μ)` to the dense box vector `acc`.
    fn add_reduced_monomial(&self, tables: &[Vec<Vec<u64>>], strides: &[usize], mu: &[u32], c: u64, acc: &mut [u64]) {
        let f = self.field;
        // expand prod_i table[i][μ_i] as a tensor
        let mut partial: Vec<(usize, u64)> = vec![(0, c)];
        for (i, &e) in mu.iter().enumerate() {
            let row = &tables[i][e as usize];
            let mut next = Vec::with_capacity(partial.len() * row.len());
            for &(off, v) in &partial {
                for (j, &r) in row.iter().enumerate() {
                    if r != 0 {
                        next.push((off + j * strides[i], f.mul(v, r)));
                    }
                }
            }
            partial = next;
        }
        for (off, v) in partial {
            acc[off] = f.add(acc[off], v);
        }
    }

    fn check_poly(&self, g: &MultiPoly) -> Result<()> {
        if g.field() != self.field {
            return Err(Error::FieldMismatch(self.p, g.field().modulus()));
        }
        if g.nvars() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                got: g.nvars(),
            });
        }
        Ok(())
    }

    /// Remainder of `g` modulo `h_1(X_1), ..., h_n(X_n)`; every variable ends up
    /// with degree `< d_i`.
    pub fn normal_form(&self, g: &MultiPoly) -> Result<MultiPoly> {
        self.check_poly(g)?;
        let tables: Vec<Vec<Vec<u64>>> = (0..self.nvars())
            .map(|i| self.power_table(i, g.degree_in(i)))
            .collect();
        let strides = self.strides();
        let mut acc = vec![0u64; self.size() as usize];
        for (mono, c) in g.terms() {
            self.add_reduced_monomial(&tables, &strides, mono.exps(), c, &mut acc);
        }
        let basis: Vec<Monomial> = self.box_exponents().map(Monomial::new).collect();
        MultiPoly::from_terms(self.field, self.nvars(), basis.into_iter().zip(acc))
    }

    /// Matrix of multiplication by `h` on the box monomial basis
    /// (lexicographic); column `b` holds `NF(h X^b)`.
    pub fn multiplication_matrix(&self, h: &MultiPoly, cap: u64) -> Result<Matrix> {
        self.check_poly(h)?;
        let size = self.size();
        if size > cap {
            return Err(Error::ResourceCapExceeded {
                needed: size as u128,
                cap,
            });
        }
        let dims = self.dims();
        let tables: Vec<Vec<Vec<u64>>> = (0..self.nvars())
            .map(|i| self.power_table(i, h.degree_in(i) + dims[i] - 1))
            .collect();
        let strides = self.strides();
        let boxes: Vec<Vec<u32>> = self.box_exponents().collect();
        let mut m = Matrix::zeros(self.field, boxes.len(), boxes.len());
        let mut col = vec![0u64; boxes.len()];
        for (b, beta) in boxes.iter().enumerate() {
            col.iter_mut().for_each(|v| *v = 0);
            for (mono, c) in h.terms() {
                let mu: Vec<u32> = mono.exps().iter().zip(beta).map(|(a, b)| a + b).collect();
                self.add_reduced_monomial(&tables, &strides, &mu, c, &mut col);
            }
            for (a, &v) in col.iter().enumerate() {
                m.set(a, b, v);
            }
        }
        Ok(m)
    }

    pub fn homothety_trace_check(&self, h: &MultiPoly, cap: u64) -> Result<TraceReport> {
        let m = self.multiplication_matrix(h, cap)?;
        let f = self.field;
        let mut sum = 0;
        for z in self.points() {
            sum = f.add(sum, h.evaluate(&z)?);
        }
        let trace = m.trace();
        Ok(TraceReport {
            size: self.size(),
            matrix_trace: trace,
            evaluation_sum: sum,
            equal: trace == sum,
        })
    }

    /// Checks `pairing(θ, μ) = δ_{θ,μ}` for every `θ` in the box and every
    /// `μ` with `|μ| <= |θ|`.
    pub fn delta_pattern(&self) -> Result<DeltaPatternReport> {
        let mut report = DeltaPatternReport::default();
        for theta in self.box_exponents() {
            let weight: u32 = theta.iter().sum();
            for mu in exponents_up_to(self.nvars(), weight) {
                let v = self.pairing(&theta, &mu)?;
                let expected = u64::from(mu == theta);
                let outside = mu.iter().zip(&self.grids).any(|(&m, g)| m as usize >= g.len());
                let same_degree = mu.iter().sum::<u32>() == weight;
                report.checked += 1;
                if outside && same_degree {
                    report.outside_box_checked += 1;
                }
                if v != expected {
                    report.violations.push((theta.clone(), mu.clone()));
                }
            }
        }
        Ok(report)
    }
}

/// All exponent vectors of total degree `<= d` in `n` variables.
fn exponents_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    crate::poly::monomials_up_to(n, d)
        .into_iter()
        .map(|m| m.exps().to_vec())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DeltaPatternReport {
    pub checked: u64,
    /// pairs with `|μ| = |θ|` and some `μ_i >= d_i`
    pub outside_box_checked: u64,
    pub violations: Vec<(Vec<u32>, Vec<u32>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub size: u64,
    pub matrix_trace: u64,
    pub evaluation_sum: u64,
    pub equal: bool,
}

#[derive(Deserialize)]
struct GridJson {
    p: u64,
    grids: Vec<Vec<u64>>,
}

impl<'de> Deserialize<'de> for GridAlgebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GridJson::deserialize(d)?;
        let field = PrimeField::new(raw.p).map_err(serde::de::Error::custom)?;
        GridAlgebra::new(field, raw.grids).map_err(serde::de::Error::custom)
    }
}
