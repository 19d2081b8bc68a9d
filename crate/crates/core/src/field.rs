//! Prime-field arithmetic, points of `F_p^n` and the seeded random source
//! used by every sampler in the crate.
//!
//! Field elements are plain `u64` values kept canonical in `[0, p)`; the
//! [`PrimeField`] value carries the modulus and performs all arithmetic.
//! Products go through a 128-bit intermediate, which is why the modulus is
//! capped below `2^61`.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary unsigned value.
    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    /// Reduces a signed value, mapping negatives to their residues.
    #[inline]
    pub fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }

    /// Centered representative in `(-p/2, p/2]`, handy for printing.
    pub fn to_signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// All elements `0, 1, ..., p-1`.
    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.p
    }

    /// Draws a point of `{1, ..., radius}^n` (the sampling grid of the
    /// evaluation-only algorithms). Consumes exactly `n` draws from `rng`.
    pub fn sample_grid_point(&self, radius: u64, n: usize, rng: &mut Rng) -> Result<Point> {
        if radius == 0 || radius >= self.p {
            return Err(Error::RadiusExceedsField { radius, p: self.p });
        }
        Ok(Point((0..n).map(|_| 1 + rng.below(radius)).collect()))
    }

    /// Draws a point whose coordinates are chosen uniformly from `values`.
    /// Consumes exactly `n` draws from `rng`.
    pub fn sample_value_point(&self, values: &[u64], n: usize, rng: &mut Rng) -> Result<Point> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty value list".into()));
        }
        Ok(Point(
            (0..n)
                .map(|_| self.reduce(values[rng.below(values.len() as u64) as usize]))
                .collect(),
        ))
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl<'de> Deserialize<'de> for PrimeField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: u64,
        }
        let raw = Raw::deserialize(d)?;
        PrimeField::new(raw.p).map_err(serde::de::Error::custom)
    }
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &sp in &SMALL {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A point of `F_p^n`, stored as canonical residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<u64>);

impl Point {
    pub fn new(coords: Vec<u64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

impl Deref for Point {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for Point {
    fn from(v: Vec<u64>) -> Self {
        Self(v)
    }
}

/// Iterates `F_p^n` in lexicographic order, last coordinate fastest.
pub fn all_points(field: PrimeField, n: usize) -> impl Iterator<Item = Point> {
    GridIter::new((0..n).map(|_| field.elements().collect()).collect())
}

/// Lexicographic iterator over a Cartesian product of value lists.
pub struct GridIter {
    axes: Vec<Vec<u64>>,
    idx: Vec<usize>,
    done: bool,
}

impl GridIter {
    pub fn new(axes: Vec<Vec<u64>>) -> Self {
        let done = axes.iter().any(|a| a.is_empty());
        let idx = vec![0; axes.len()];
        Self { axes, idx, done }
    }
}

impl Iterator for GridIter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.done {
            return None;
        }
        let out = Point(self.idx.iter().zip(&self.axes).map(|(&i, a)| a[i]).collect());
        // odometer increment
        let mut k = self.axes.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.axes[k].len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(out)
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based SplitMix64 stream.
///
/// The `k`-th output is `mix(seed + k * gamma)`, so the stream is a pure
/// function of `(seed, counter)`. Not suitable for cryptography.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rng {
    seed: u64,
    counter: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// Independent child stream for trial `index`.
    pub fn derive(seed: u64, index: u64) -> Self {
        Self::new(seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Value in `[0, bound)` from a single draw (multiply-high reduction,
    /// bias at most `bound / 2^64`).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Uniform element of `F_p`.
    pub fn element(&mut self, field: PrimeField) -> u64 {
        self.below(field.modulus())
    }

    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.inv(2).unwrap(), 4);
        assert_eq!(f.inv(0), Err(Error::ZeroInverse));
    }

    #[test]
    fn inverse_sweep_p101() {
        let f = PrimeField::new(101).unwrap();
        for a in 1..101 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn rejects_composites_and_huge_moduli() {
        for p in [0, 1, 4, 9, 15, 561, 1105, 3_215_031_751] {
            assert!(PrimeField::new(p).is_err(), "{p}");
        }
        assert!(PrimeField::new(MAX_MODULUS + 1).is_err());
        // largest admissible prime
        assert!(PrimeField::new((1 << 61) - 1).is_ok());
        assert!(is_prime(10007));
        assert!(is_prime(2));
    }

    #[test]
    fn primality_matches_trial_division() {
        let naive = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), naive(n), "{n}");
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p {
                assert_eq!(f.pow(a, p), a, "Fermat fails at p={p}, a={a}");
                for b in 0..p {
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    if b != 0 {
                        assert_eq!(f.mul(f.mul(a, b), f.inv(b).unwrap()), a);
                    }
                }
            }
        }
    }

    #[test]
    fn field_axioms_randomized_large() {
        let f = PrimeField::new((1 << 61) - 1).unwrap();
        let mut rng = Rng::new(7);
        for _ in 0..2000 {
            let a = rng.element(f);
            let b = rng.element(f);
            assert_eq!(f.sub(f.add(a, b), b), a);
            if b != 0 {
                assert_eq!(f.mul(f.mul(a, b), f.inv(b).unwrap()), a);
            }
        }
    }

    #[test]
    fn signed_reduction() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.from_i64(-15), 6);
        assert_eq!(f.to_signed(6), -1);
    }

    #[test]
    fn singleton_grid() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = Rng::new(3);
        assert_eq!(f.sample_grid_point(1, 3, &mut rng).unwrap().0, vec![1, 1, 1]);
        assert_eq!(rng.counter(), 3);
    }

    #[test]
    fn grid_radius_must_be_below_p() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = Rng::new(0);
        assert!(matches!(
            f.sample_grid_point(7, 2, &mut rng),
            Err(Error::RadiusExceedsField { .. })
        ));
        assert!(f.sample_grid_point(0, 2, &mut rng).is_err());
    }

    #[test]
    fn grid_sampling_replays_under_same_seed() {
        let f = PrimeField::new(101).unwrap();
        let a = f.sample_grid_point(10, 2, &mut Rng::new(99)).unwrap();
        let b = f.sample_grid_point(10, 2, &mut Rng::new(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_sampling_is_uniform() {
        // 40000 draws over {1,..,4}: each count within 4 sigma of 10000
        let f = PrimeField::new(101).unwrap();
        let mut rng = Rng::new(2024);
        let mut counts = [0u32; 5];
        for _ in 0..40_000 {
            let x = f.sample_grid_point(4, 1, &mut rng).unwrap();
            counts[x[0] as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        let sigma = (40_000f64 * 0.25 * 0.75).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - 10_000.0).abs() <= 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn grid_never_emits_zero_or_out_of_range() {
        let f = PrimeField::new(13).unwrap();
        let mut rng = Rng::new(5);
        for _ in 0..5000 {
            let x = f.sample_grid_point(12, 3, &mut rng).unwrap();
            assert!(x.iter().all(|&c| (1..=12).contains(&c)));
        }
    }

    #[test]
    fn derived_streams_differ_and_replay() {
        let mut a = Rng::derive(42, 0);
        let mut b = Rng::derive(42, 1);
        let mut a2 = Rng::derive(42, 0);
        let xa: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let xa2: Vec<u64> = (0..4).map(|_| a2.next_u64()).collect();
        assert_ne!(xa, xb);
        assert_eq!(xa, xa2);
    }

    #[test]
    fn lexicographic_enumeration() {
        let f = PrimeField::new(3).unwrap();
        let pts: Vec<Point> = all_points(f, 2).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].0, vec![0, 0]);
        assert_eq!(pts[1].0, vec![0, 1]);
        assert_eq!(pts[8].0, vec![2, 2]);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all_points(f, 0).count(), 1);
    }
}
