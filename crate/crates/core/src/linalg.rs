//! Dense matrices over `F_p`: rank, kernel vectors and square solves by
//! Gaussian elimination. Pivots are the first nonzero entry in column order,
//! so echelon forms (and kernel witnesses) are reproducible.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(field: PrimeField, rows: Vec<Vec<u64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: r.len(),
            });
        }
        let nrows = rows.len();
        let data = rows.into_iter().flatten().map(|v| field.reduce(v)).collect();
        Ok(Self {
            field,
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn trace(&self) -> u64 {
        let f = self.field;
        (0..self.rows.min(self.cols)).fold(0, |acc, i| f.add(acc, self.get(i, i)))
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for k in c..self.cols {
                let v = f.mul(self.get(r, k), inv);
                self.data[r * self.cols + k] = v;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                for k in c..self.cols {
                    let v = f.sub(self.get(i, k), f.mul(factor, self.get(r, k)));
                    self.data[i * self.cols + k] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// A nonzero vector `v` with `self * v = 0`, or `None` when the columns
    /// are independent. The first free column gets coefficient 1.
    pub fn kernel_vector(&self) -> Option<Vec<u64>> {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.rref();
        let free = (0..self.cols).find(|c| !pivots.contains(c))?;
        let mut v = vec![0; self.cols];
        v[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(m.get(row, free));
        }
        Some(v)
    }

    /// Solves `self * x = b` for square invertible `self`.
    pub fn solve(&self, b: &[u64]) -> Result<Vec<u64>> {
        if self.rows != self.cols || b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: b.len(),
            });
        }
        let mut aug = Matrix::zeros(self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.rref();
        if pivots.len() != self.rows || pivots.last() == Some(&self.cols) {
            return Err(Error::InvalidInput("singular system".into()));
        }
        Ok((0..self.rows).map(|r| aug.get(r, self.cols)).collect())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rng;

    #[test]
    fn rank_examples() {
        let f = PrimeField::new(7).unwrap();
        let m = Matrix::from_rows(f, vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::identity(f, 4).rank(), 4);
        assert_eq!(Matrix::zeros(f, 3, 5).rank(), 0);
        // rank depends on the characteristic
        let m = Matrix::from_rows(f, vec![vec![1, 3], vec![3, 2]]).unwrap();
        assert_eq!(m.rank(), 1); // det = 2 - 9 = -7 = 0 mod 7
    }

    #[test]
    fn kernel_vector_is_in_kernel() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = Rng::new(3);
        for _ in 0..200 {
            let rows = 1 + rng.below(5) as usize;
            let cols = 1 + rng.below(6) as usize;
            let mut m = Matrix::zeros(f, rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    // sparse-ish entries so that rank deficiency is common
                    if rng.below(3) == 0 {
                        m.set(r, c, rng.element(f));
                    }
                }
            }
            match m.kernel_vector() {
                Some(v) => {
                    assert!(v.iter().any(|&x| x != 0));
                    assert!(m.mul_vec(&v).iter().all(|&x| x == 0));
                    assert!(m.rank() < cols);
                }
                None => assert_eq!(m.rank(), cols),
            }
        }
    }

    #[test]
    fn solve_round_trip() {
        let f = PrimeField::new(10007).unwrap();
        let mut rng = Rng::new(9);
        let mut solved = 0;
        for _ in 0..50 {
            let n = 1 + rng.below(6) as usize;
            let mut m = Matrix::zeros(f, n, n);
            for r in 0..n {
                for c in 0..n {
                    m.set(r, c, rng.element(f));
                }
            }
            let b: Vec<u64> = (0..n).map(|_| rng.element(f)).collect();
            if let Ok(x) = m.solve(&b) {
                assert_eq!(m.mul_vec(&x), b);
                solved += 1;
            } else {
                assert!(m.rank() < n);
            }
        }
        assert!(solved > 40);
    }

    #[test]
    fn trace_of_identity() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(Matrix::identity(f, 7).trace(), 2);
    }
}
