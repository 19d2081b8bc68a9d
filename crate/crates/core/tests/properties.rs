use ctslab::cts::{density_experiment, is_cts_linear, Discriminant, PolyFamily, DEFAULT_ENUM_CAP};
use ctslab::field::{Point, PrimeField, Rng};
use ctslab::kakeya::{build_star, kakeya_cts_check};
use ctslab::poly::DegreeProfile;
use ctslab::secante::{build_case, truth_harness, CaseClass};
use proptest::prelude::*;

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn in_pool<R>(threads: usize, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn density_report_ignores_thread_count() {
    let fam = PolyFamily::dense(field(101), DegreeProfile::single(2, 2));
    let values: Vec<u64> = (1..=36).collect();
    let run = || density_experiment(&fam, &Discriminant::ZeroOnly, &values, 20, 200, 77, DEFAULT_ENUM_CAP).unwrap();
    assert_eq!(in_pool(1, run), in_pool(4, run));
}

#[test]
fn harness_report_ignores_thread_count() {
    let k = field(10007);
    let mut rng = Rng::new(1);
    let cases: Vec<_> = CaseClass::ALL.iter().map(|&c| build_case(k, 3, 2, c, &mut rng).unwrap()).collect();
    let run = || truth_harness(&cases, 40, 3).unwrap();
    assert_eq!(in_pool(1, run), in_pool(3, run));
}

#[test]
fn stars_are_cts_for_every_admissible_degree() {
    for q in [3u64, 5, 7] {
        let k = field(q);
        for c in [vec![0, 0], vec![2, 1]] {
            let e = build_star(k, 2, &Point(c)).unwrap();
            for d in 0..q as u32 {
                let r = kakeya_cts_check(&e, d).unwrap();
                assert!(r.is_cts && r.cardinality_ok);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adding points never destroys the CTS property, and every CTS has at
    /// least `dim` points.
    #[test]
    fn cts_is_monotone_and_long_enough(seed in any::<u64>(), d in 0u32..3, len in 0usize..12) {
        let k = field(13);
        let fam = PolyFamily::dense(k, DegreeProfile::single(2, d));
        let dim = fam.dim().unwrap() as usize;
        let mut rng = Rng::new(seed);
        let mut q: Vec<Point> = (0..len).map(|_| Point(vec![rng.element(k), rng.element(k)])).collect();
        let before = is_cts_linear(&fam, &q).unwrap().is_cts;
        if before {
            let mut distinct = q.clone();
            distinct.sort();
            distinct.dedup();
            prop_assert!(distinct.len() >= dim);
        }
        q.push(Point(vec![rng.element(k), rng.element(k)]));
        let after = is_cts_linear(&fam, &q).unwrap().is_cts;
        prop_assert!(!before || after);
    }

    /// A non-CTS verdict always comes with a nonzero member vanishing on the sample.
    #[test]
    fn witnesses_vanish_on_the_sample(seed in any::<u64>(), len in 0usize..6) {
        let k = field(7);
        let fam = PolyFamily::dense(k, DegreeProfile::new(2, vec![1, 2]).unwrap());
        let mut rng = Rng::new(seed);
        let q: Vec<Point> = (0..len).map(|_| Point(vec![rng.element(k), rng.element(k)])).collect();
        let v = is_cts_linear(&fam, &q).unwrap();
        if let Some(w) = v.witness {
            prop_assert!(w.iter().any(|g| !g.is_zero()));
            for x in &q {
                for g in &w {
                    prop_assert_eq!(g.evaluate(x).unwrap(), 0);
                }
            }
        } else {
            prop_assert!(v.is_cts);
        }
    }
}
