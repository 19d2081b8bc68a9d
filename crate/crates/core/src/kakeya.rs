//! Kakeya sets over `F_q^n` and their use as correct test sequences.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::binomial;
use crate::cts::{is_cts_linear, PolyFamily};
use crate::error::{Error, Result};
use crate::field::{all_points, Point, PrimeField, Rng};
use crate::poly::DegreeProfile;

/// Projective directions, each normalized so its first nonzero coordinate
/// is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectionSet {
    #[serde(skip)]
    field: PrimeField,
    pub n: usize,
    pub directions: Vec<Point>,
}

impl DirectionSet {
    /// All of `P_(n-1)(F_q)`: `(q^n - 1)/(q - 1)` directions.
    pub fn full(field: PrimeField, n: usize) -> Self {
        let directions = all_points(field, n)
            .filter(|v| v.iter().find(|&&c| c != 0) == Some(&1))
            .collect();
        Self { field, n, directions }
    }

    /// Normalizes and deduplicates the given vectors; zero vectors are
    /// rejected.
    pub fn from_vectors(field: PrimeField, n: usize, vectors: &[Point]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for v in vectors {
            v.check_dim(n)?;
            let lead = v
                .iter()
                .map(|&c| field.reduce(c))
                .find(|&c| c != 0)
                .ok_or_else(|| Error::InvalidInput("the zero vector is not a direction".into()))?;
            let inv = field.inv(lead)?;
            set.insert(Point(v.iter().map(|&c| field.mul(field.reduce(c), inv)).collect()));
        }
        Ok(Self {
            field,
            n,
            directions: set.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// A deduplicated point set in `F_q^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointSet {
    pub p: u64,
    pub n: usize,
    pub points: Vec<Point>,
}

impl PointSet {
    pub fn new(field: PrimeField, n: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for x in points {
            x.check_dim(n)?;
            set.insert(Point(x.iter().map(|&c| field.reduce(c)).collect()));
        }
        Ok(Self {
            p: field.modulus(),
            n,
            points: set.into_iter().collect(),
        })
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.p).expect("validated on construction")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.points.binary_search(x).is_ok()
    }

    /// Whether the whole line `{x + t v}` lies in the set.
    pub fn contains_line(&self, x: &Point, v: &Point) -> bool {
        let f = self.field();
        (0..self.p).all(|t| {
            let y = Point(x.iter().zip(v.iter()).map(|(&a, &b)| f.add(a, f.mul(t, b))).collect());
            self.contains(&y)
        })
    }
}

#[derive(Deserialize)]
struct PointSetJson {
    p: u64,
    n: usize,
    points: Vec<Point>,
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PointSetJson::deserialize(d)?;
        let field = PrimeField::new(raw.p).map_err(serde::de::Error::custom)?;
        PointSet::new(field, raw.n, raw.points).map_err(serde::de::Error::custom)
    }
}

/// Union of all lines through `center`, one per direction of `P_(n-1)(F_q)`.
pub fn build_star(field: PrimeField, n: usize, center: &Point) -> Result<PointSet> {
    center.check_dim(n)?;
    let dirs = DirectionSet::full(field, n);
    let pts = dirs.directions.iter().flat_map(|v| {
        field.elements().map(move |t| {
            Point(
                center
                    .iter()
                    .zip(v.iter())
                    .map(|(&c, &b)| field.add(field.reduce(c), field.mul(t, b)))
                    .collect(),
            )
        })
    });
    PointSet::new(field, n, pts.collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KakeyaReport {
    pub is_kakeya: bool,
    /// one base point per direction whose full line lies in the set
    pub witnesses: Vec<Option<Point>>,
    pub directions: Vec<Point>,
}

/// Checks that every direction has a full line inside `e`.
pub fn is_kakeya_with(e: &PointSet, dirs: &DirectionSet) -> Result<KakeyaReport> {
    if dirs.n != e.n || dirs.field.modulus() != e.p {
        return Err(Error::InvalidInput("direction set does not match the point set".into()));
    }
    let witnesses: Vec<Option<Point>> = dirs
        .directions
        .par_iter()
        .map(|v| e.points.iter().find(|x| e.contains_line(x, v)).cloned())
        .collect();
    Ok(KakeyaReport {
        is_kakeya: witnesses.iter().all(Option::is_some),
        witnesses,
        directions: dirs.directions.clone(),
    })
}

pub fn is_kakeya(e: &PointSet) -> KakeyaReport {
    is_kakeya_with(e, &DirectionSet::full(e.field(), e.n)).expect("matching direction set")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KakeyaCtsReport {
    pub d: u32,
    pub cardinality: u64,
    /// `C(d + n, n)`
    pub required: u64,
    pub cardinality_ok: bool,
    pub is_cts: bool,
}

/// Rank check of `e` as a CTS for `P_d`, together with `#E >= C(d+n, n)`.
pub fn kakeya_cts_check(e: &PointSet, d: u32) -> Result<KakeyaCtsReport> {
    let q = e.p;
    if d as u64 > q - 1 {
        return Err(Error::DegreeTooLarge {
            degree: d,
            max: q - 1,
        });
    }
    let fam = PolyFamily::dense(e.field(), DegreeProfile::single(e.n, d));
    let verdict = is_cts_linear(&fam, &e.points)?;
    let required = binomial(d as u64 + e.n as u64, e.n as u64)
        .to_u64()
        .unwrap_or(u64::MAX);
    Ok(KakeyaCtsReport {
        d,
        cardinality: e.len() as u64,
        required,
        cardinality_ok: e.len() as u64 >= required,
        is_cts: verdict.is_cts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonKakeyaReport {
    pub q: u64,
    pub n: usize,
    pub d: u32,
    pub k: u64,
    pub seed: u64,
    pub trials: u64,
    /// list length `k C(d+n, n)`
    pub length: u64,
    pub cts_count: u64,
    pub cts_rate: f64,
    pub kakeya_count: u64,
    /// sampled CTS that are also Kakeya sets
    pub cts_and_kakeya: u64,
    /// `(k - 1) - k log_q(d + 1)`
    pub lambda: f64,
    /// `1 - q^(-lambda dim)`
    pub bound: f64,
    /// `q^n / 2^n`
    pub kakeya_min_size: f64,
    /// `length < q^n / 2^n`, so no sample can be a Kakeya set
    pub below_kakeya_size: bool,
}

/// Samples lists of length `k C(d+n, n)` and counts how many are CTS for
/// `P_d` and how many are Kakeya sets. Requires `(d+1)^k < q^(k-1)`.
pub fn cts_not_kakeya_experiment(
    field: PrimeField,
    n: usize,
    d: u32,
    k: u64,
    trials: u64,
    seed: u64,
) -> Result<NonKakeyaReport> {
    let q = field.modulus();
    if k == 0 {
        return Err(Error::HypothesisUnmet("k must be positive".into()));
    }
    let lhs = num_bigint::BigUint::from(d as u64 + 1).pow(k as u32);
    let rhs = num_bigint::BigUint::from(q).pow((k - 1) as u32);
    if lhs >= rhs {
        return Err(Error::HypothesisUnmet(format!(
            "need (d+1)^k < q^(k-1): ({})^{k} >= {q}^{}",
            d + 1,
            k - 1
        )));
    }
    let dim = binomial(d as u64 + n as u64, n as u64)
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("family dimension overflows".into()))?;
    let length = k * dim;
    let dirs = DirectionSet::full(field, n);

    let outcomes: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = Rng::derive(seed, t);
            let pts: Vec<Point> = (0..length)
                .map(|_| Point((0..n).map(|_| rng.element(field)).collect()))
                .collect();
            let e = PointSet::new(field, n, pts)?;
            let cts = kakeya_cts_check(&e, d)?.is_cts;
            let kak = is_kakeya_with(&e, &dirs)?.is_kakeya;
            Ok((cts, kak))
        })
        .collect::<Result<_>>()?;

    let cts_count = outcomes.iter().filter(|o| o.0).count() as u64;
    let kakeya_count = outcomes.iter().filter(|o| o.1).count() as u64;
    let cts_and_kakeya = outcomes.iter().filter(|o| o.0 && o.1).count() as u64;
    let qf = q as f64;
    let lambda = (k as f64 - 1.0) - k as f64 * ((d as f64 + 1.0).ln() / qf.ln());
    let kakeya_min_size = (qf / 2.0).powi(n as i32);
    // length < q^n / 2^n  <=>  length * 2^n < q^n
    let below = num_bigint::BigUint::from(length) << n < num_bigint::BigUint::from(q).pow(n as u32);
    Ok(NonKakeyaReport {
        q,
        n,
        d,
        k,
        seed,
        trials,
        length,
        cts_count,
        cts_rate: if trials == 0 { 0.0 } else { cts_count as f64 / trials as f64 },
        kakeya_count,
        cts_and_kakeya,
        lambda,
        bound: -(-lambda * dim as f64 * qf.ln()).exp_m1(),
        kakeya_min_size,
        below_kakeya_size: below,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn full(q: u64, n: usize) -> PointSet {
        PointSet::new(f(q), n, all_points(f(q), n)).unwrap()
    }

    #[test]
    fn direction_counts() {
        for (q, n) in [(2, 2), (3, 2), (5, 2), (3, 3), (7, 2)] {
            let dirs = DirectionSet::full(f(q), n);
            assert_eq!(dirs.len() as u64, (q.pow(n as u32) - 1) / (q - 1));
        }
        let d = DirectionSet::from_vectors(f(5), 2, &[Point(vec![2, 4]), Point(vec![1, 2]), Point(vec![0, 3])]).unwrap();
        assert_eq!(d.directions, vec![Point(vec![0, 1]), Point(vec![1, 2])]);
        assert!(DirectionSet::from_vectors(f(5), 2, &[Point(vec![0, 0])]).is_err());
    }

    #[test]
    fn star_examples() {
        let e = build_star(f(5), 2, &Point(vec![0, 0])).unwrap();
        assert_eq!(e.len(), 25);
        let e = build_star(f(3), 2, &Point(vec![1, 2])).unwrap();
        assert_eq!(e.len(), 9);
        assert!(e.len() as u64 <= (3 - 1) * 4 + 1);
        for q in [3, 5, 7] {
            for n in [2, 3] {
                let c = Point(vec![1; n]);
                let e = build_star(f(q), n, &c).unwrap();
                assert!(e.contains(&c));
                let dirs = DirectionSet::full(f(q), n).len() as u64;
                assert!(e.len() as u64 <= (q - 1) * dirs + 1);
                assert!(is_kakeya(&e).is_kakeya, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn kakeya_examples() {
        assert!(is_kakeya(&full(3, 2)).is_kakeya);
        let single = PointSet::new(f(3), 2, vec![Point(vec![0, 0])]).unwrap();
        let r = is_kakeya(&single);
        assert!(!r.is_kakeya);
        assert!(r.witnesses.iter().all(Option::is_none));
        // a line plus a point misses every other direction
        let line = PointSet::new(f(5), 2, (0..5).map(|t| Point(vec![t, 0]))).unwrap();
        let r = is_kakeya(&line);
        assert!(!r.is_kakeya);
        assert_eq!(r.witnesses.iter().filter(|w| w.is_some()).count(), 1);
    }

    #[test]
    fn cts_check_examples() {
        let r = kakeya_cts_check(&full(5, 2), 4).unwrap();
        assert!(r.is_cts && r.cardinality_ok);
        assert_eq!((r.cardinality, r.required), (25, 15));
        let r = kakeya_cts_check(&full(3, 2), 2).unwrap();
        assert!(r.is_cts);
        assert_eq!(r.required, 6);
        let one = PointSet::new(f(7), 2, vec![Point(vec![3, 4])]).unwrap();
        let r = kakeya_cts_check(&one, 0).unwrap();
        assert!(r.is_cts && r.cardinality_ok);
        assert!(matches!(kakeya_cts_check(&full(3, 2), 3), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn kakeya_sets_are_cts() {
        for q in [3, 5, 7] {
            let e = build_star(f(q), 2, &Point(vec![0, 1])).unwrap();
            assert!(e.len() as f64 >= (q as f64 / 2.0).powi(2));
            for d in 0..q as u32 {
                let r = kakeya_cts_check(&e, d).unwrap();
                assert!(r.is_cts && r.cardinality_ok, "q={q} d={d}");
            }
        }
    }

    #[test]
    fn experiment_example_and_replay() {
        let r = cts_not_kakeya_experiment(f(7), 2, 1, 2, 100, 1).unwrap();
        assert_eq!(r.length, 6);
        assert!(r.below_kakeya_size);
        assert!(r.cts_count >= 90);
        assert_eq!(r.cts_and_kakeya, 0);
        assert!(r.lambda > 0.0 && r.bound > 0.0 && r.bound < 1.0);
        assert_eq!(r, cts_not_kakeya_experiment(f(7), 2, 1, 2, 100, 1).unwrap());
    }

    #[test]
    fn experiment_hypothesis_is_enforced() {
        // (1+1)^2 = 4 >= 3^1
        assert!(matches!(
            cts_not_kakeya_experiment(f(3), 2, 1, 2, 10, 0),
            Err(Error::HypothesisUnmet(_))
        ));
        assert!(matches!(
            cts_not_kakeya_experiment(f(7), 2, 1, 0, 10, 0),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn long_lists_can_be_kakeya() {
        // constants with very long lists: most samples cover all of F_3^2
        let r = cts_not_kakeya_experiment(f(3), 2, 0, 40, 50, 3).unwrap();
        assert!(!r.below_kakeya_size);
        assert!(r.kakeya_count > 0);
    }

    #[test]
    fn point_set_json() {
        let s: PointSet = serde_json::from_str(r#"{"p":5,"n":2,"points":[[1,2],[1,2],[6,0]]}"#).unwrap();
        assert_eq!(s.points, vec![Point(vec![1, 0]), Point(vec![1, 2])]);
        assert!(serde_json::from_str::<PointSet>(r#"{"p":5,"n":2,"points":[[1]]}"#).is_err());
    }
}
