//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ctslab::bounds::{density_failure, extrinsic_bound, LogProb};
use ctslab::circuit::Evaluable;
use ctslab::cts::{
    covering_number, cts_params, density_experiment, is_cts_enumerated, is_cts_linear, Discriminant,
    PolyFamily, DEFAULT_ENUM_CAP,
};
use ctslab::field::{all_points, Point, PrimeField, Rng};
use ctslab::kakeya::{cts_not_kakeya_experiment, is_kakeya, kakeya_cts_check, PointSet};
use ctslab::nullsatz::{GridAlgebra, DEFAULT_MATRIX_CAP};
use ctslab::poly::{monomials_up_to, DegreeProfile, Monomial, MultiPoly};
use ctslab::secante::{build_case, error_bound, truth_harness, CaseClass};
use ctslab::variety::{croix_de_berny, ore_check, DEFAULT_POINT_CAP};
use ctslab::Matrix;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).expect("prime")
}

fn random_dense(k: PrimeField, n: usize, d: u32, rng: &mut Rng) -> MultiPoly {
    MultiPoly::from_terms(k, n, monomials_up_to(n, d).into_iter().map(|m| (m, rng.element(k)))).unwrap()
}

fn croix() -> Outcome {
    for p in [101, 3, 5, 7] {
        let r = croix_de_berny(p).map_err(|e| e.to_string())?;
        ensure(
            r.boundary_points == 4 && r.bezout_rhs == 2 && r.violation,
            format!("p={p}: {r:?}"),
        )?;
    }
    Ok("4 boundary points > 2 for p in {101, 3, 5, 7}".into())
}

fn quadric() -> Outcome {
    for p in [3, 101] {
        let r = croix_de_berny(p).map_err(|e| e.to_string())?;
        ensure(r.quadric_boundary_points == 2, format!("p={p}: {r:?}"))?;
        ensure(r.defect_points == 2 * p, format!("p={p}: defect {}", r.defect_points))?;
    }
    Ok("#(π(W') ∩ V(X)) = 2 for p in {3, 101}".into())
}

fn rank_vs_enumeration() -> Outcome {
    let k = field(3);
    let fam = PolyFamily::dense(k, DegreeProfile::single(2, 1));
    let grid: Vec<Point> = all_points(k, 2).collect();
    let mut subsets = 0;
    for mask in 0u32..(1 << 9) {
        if mask.count_ones() > 4 {
            continue;
        }
        let q: Vec<Point> = (0..9).filter(|i| mask >> i & 1 == 1).map(|i| grid[i].clone()).collect();
        let a = is_cts_linear(&fam, &q).map_err(|e| e.to_string())?.is_cts;
        let b = is_cts_enumerated(&fam, &Discriminant::ZeroOnly, &q, DEFAULT_ENUM_CAP)
            .map_err(|e| e.to_string())?
            .is_cts;
        ensure(a == b, format!("disagreement on {q:?}"))?;
        subsets += 1;
    }
    ensure(subsets == 256, format!("{subsets} subsets"))?;
    Ok("256 subsets agree".into())
}

fn covering() -> Outcome {
    let k = field(3);
    let fam = PolyFamily::dense(k, DegreeProfile::single(2, 1));
    let pool: Vec<Point> = all_points(k, 2).collect();
    let r = covering_number(&fam, &Discriminant::ZeroOnly, None, &pool, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())?;
    ensure(r.length == 3 && r.lower_bound == Some(3), format!("{r:?}"))?;
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            let q = [pool[i].clone(), pool[j].clone()];
            ensure(
                !is_cts_linear(&fam, &q).map_err(|e| e.to_string())?.is_cts,
                format!("length-2 CTS {q:?}"),
            )?;
        }
    }
    Ok("N_cts = 3 = dim, no length-2 CTS".into())
}

fn density() -> Outcome {
    let fam = PolyFamily::dense(field(101), DegreeProfile::single(2, 2));
    let values: Vec<u64> = (1..=36).collect();
    let r = density_experiment(&fam, &Discriminant::ZeroOnly, &values, 36, 500, 2024, DEFAULT_ENUM_CAP)
        .map_err(|e| e.to_string())?;
    let expected = -(-6f64).exp_m1();
    ensure((r.bound - expected).abs() < 1e-12, format!("bound {}", r.bound))?;
    ensure(r.hypotheses.length_ok && r.hypotheses.grid_ok, format!("{:?}", r.hypotheses))?;
    ensure(r.rate >= 0.98, format!("rate {}", r.rate))?;
    Ok(format!("rate {:.3} ({} / {}), bound {:.5}", r.rate, r.cts_count, r.trials, r.bound))
}

fn secante() -> Outcome {
    let k = field(10007);
    let mut rng = Rng::new(6);
    let cases: Vec<_> = CaseClass::ALL
        .iter()
        .map(|&c| build_case(k, 3, 2, c, &mut rng))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let r = truth_harness(&cases, 1000, 6).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for c in &r.classes {
        ensure(c.trials == 1000, format!("{:?}: {} trials", c.class, c.trials))?;
        match c.class {
            CaseClass::ZeroList => ensure(c.no_rate == 1.0, format!("zero list No rate {}", c.no_rate))?,
            CaseClass::SecantCoordinate => ensure(c.yes_rate == 1.0, format!("secant Yes rate {}", c.yes_rate))?,
            _ => notes.push(format!("{:?} Yes rate {} (divergent)", c.class, c.yes_rate)),
        }
    }
    let b = error_bound(6, 1, 1);
    ensure(((b.ln + 36.0) / 36.0).abs() <= LogProb::REL_TOL, format!("ln bound {}", b.ln))?;
    Ok(format!("{}; dense bound ln = {}", notes.join(", "), b.ln))
}

fn kakeya() -> Outcome {
    for q in [3u64, 5, 7] {
        let k = field(q);
        let e = PointSet::new(k, 2, all_points(k, 2)).map_err(|e| e.to_string())?;
        ensure(is_kakeya(&e).is_kakeya, format!("F_{q}^2 not Kakeya"))?;
        for d in 0..q as u32 {
            let r = kakeya_cts_check(&e, d).map_err(|e| e.to_string())?;
            ensure(r.is_cts && r.cardinality_ok, format!("q={q} d={d}: {r:?}"))?;
        }
    }
    Ok("q in {3, 5, 7}, all d <= q-1".into())
}

fn not_kakeya() -> Outcome {
    let r = cts_not_kakeya_experiment(field(7), 2, 1, 2, 100, 8).map_err(|e| e.to_string())?;
    ensure(r.length == 6 && r.below_kakeya_size, format!("{r:?}"))?;
    ensure(r.cts_count >= 90, format!("{} CTS", r.cts_count))?;
    ensure(r.cts_and_kakeya == 0, format!("{} CTS were Kakeya", r.cts_and_kakeya))?;
    Ok(format!("{} / 100 CTS, none Kakeya", r.cts_count))
}

/// Twenty grids over `F_101` with `D <= 64`.
fn grid_catalog(k: PrimeField) -> Vec<GridAlgebra> {
    let shapes: [&[usize]; 20] = [
        &[1],
        &[2],
        &[5],
        &[8],
        &[64],
        &[2, 2],
        &[3, 2],
        &[4, 4],
        &[1, 7],
        &[8, 8],
        &[5, 3],
        &[2, 2, 2],
        &[3, 3, 3],
        &[4, 4, 4],
        &[2, 3, 4],
        &[1, 1, 1],
        &[4, 2, 8],
        &[2, 2, 2, 2],
        &[2, 2, 2, 2, 2, 2],
        &[3, 1, 3, 2],
    ];
    let mut rng = Rng::new(101);
    shapes
        .iter()
        .map(|shape| {
            let grids = shape
                .iter()
                .map(|&d| {
                    // distinct nodes: a random start and a random nonzero step
                    let start = rng.element(k);
                    let step = 1 + rng.below(100);
                    (0..d as u64).map(|j| k.add(start, k.mul(j, step))).collect()
                })
                .collect();
            GridAlgebra::new(k, grids).unwrap()
        })
        .collect()
}

fn duality() -> Outcome {
    let k = field(101);
    let catalog = grid_catalog(k);
    for a in &catalog {
        ensure(a.size() <= 64, "catalog grid too large")?;
        let m = a.duality_matrix().map_err(|e| e.to_string())?;
        ensure(
            m == Matrix::identity(k, a.size() as usize),
            format!("pairing matrix of {:?} is not the identity", a.grids),
        )?;
    }
    let mut shapes = 0;
    let mut outside = 0;
    for n in 1..=3usize {
        let count = 3usize.pow(n as u32);
        for code in 0..count {
            let dims: Vec<u64> = (0..n).map(|i| (code / 3usize.pow(i as u32) % 3 + 1) as u64).collect();
            let a = GridAlgebra::new(k, dims.iter().map(|&d| (0..d).map(|v| v * 7 + 2).collect()).collect())
                .map_err(|e| e.to_string())?;
            let r = a.delta_pattern().map_err(|e| e.to_string())?;
            ensure(r.violations.is_empty(), format!("dims {dims:?}: {:?}", r.violations))?;
            outside += r.outside_box_checked;
            shapes += 1;
        }
    }
    Ok(format!("20 catalog grids, {shapes} shapes, {outside} out-of-box pairs zero"))
}

fn extraction() -> Outcome {
    let k = field(101);
    let mut rng = Rng::new(10);
    let mut extractions = 0u64;
    for _ in 0..1000 {
        let n = 1 + rng.below(3) as usize;
        let dims: Vec<u64> = (0..n).map(|_| 1 + rng.below(4)).collect();
        let a = GridAlgebra::new(k, dims.iter().map(|&d| (0..d).map(|v| v * 5 + 1).collect()).collect())
            .map_err(|e| e.to_string())?;
        let f = loop {
            let t = rng.below(a.top_degree() as u64 + 1) as u32;
            let f = random_dense(k, n, t, &mut rng);
            if !f.is_zero() && a.in_alon_family(&f) {
                break f;
            }
        };
        let deg = f.degree().unwrap();
        let ev: Evaluable = f.clone().into();
        for theta in a.box_exponents().filter(|t| t.iter().sum::<u32>() == deg) {
            let got = a.extract_coefficient(&ev, &theta, deg).map_err(|e| e.to_string())?;
            ensure(got == f.coefficient(&theta).unwrap(), format!("θ={theta:?} f={f}"))?;
            extractions += 1;
        }
        ensure(a.find_witness(&ev).map_err(|e| e.to_string())?.is_some(), format!("no witness for {f}"))?;
    }
    Ok(format!("1000 polynomials, {extractions} coefficients"))
}

fn trace() -> Outcome {
    let k = field(101);
    let mut rng = Rng::new(11);
    for a in grid_catalog(k) {
        let n = a.nvars();
        let max = 2 * a.size();
        for _ in 0..100 {
            let terms = (0..1 + rng.below(6)).map(|_| {
                let e: Vec<u32> = (0..n).map(|_| rng.below(max / n as u64 + 1) as u32).collect();
                (Monomial::new(e), rng.element(k))
            });
            let h = MultiPoly::from_terms(k, n, terms.collect::<Vec<_>>()).unwrap();
            let r = a.homothety_trace_check(&h, DEFAULT_MATRIX_CAP).map_err(|e| e.to_string())?;
            ensure(r.equal, format!("{:?}: {r:?}", a.grids))?;
        }
    }
    Ok("2000 multiplication matrices".into())
}

fn ore() -> Outcome {
    let k = field(11);
    let mut rng = Rng::new(12);
    for _ in 0..50 {
        let f = loop {
            let f = random_dense(k, 2, 1 + rng.below(10) as u32, &mut rng);
            if !f.is_zero() {
                break f;
            }
        };
        let r = ore_check(&f, DEFAULT_POINT_CAP).map_err(|e| e.to_string())?;
        ensure(r.all_hold(), format!("{f}: {r:?}"))?;
    }
    Ok("50 polynomials over F_11".into())
}

fn golden() -> Outcome {
    let r = extrinsic_bound(&[3, 2], 5, 2, 1, 6).map_err(|e| e.to_string())?;
    let got = (
        r.n_big.to_string(),
        r.n_tilde.to_string(),
        r.m_sum.to_string(),
        r.n_prime.to_string(),
        r.bound.to_string(),
    );
    let want = ("6", "84", "55", "6", "1296");
    ensure(
        (got.0.as_str(), got.1.as_str(), got.2.as_str(), got.3.as_str(), got.4.as_str()) == want,
        format!("{got:?}"),
    )?;
    let p = cts_params(6, 1, 2).map_err(|e| e.to_string())?;
    ensure((p.length, p.radius) == (36, 324), format!("{p:?}"))?;
    let dens = density_failure(6, 1, 1, 36);
    ensure((dens.ln + 6.0).abs() < 1e-12, "density bound")?;
    Ok("1296 with (6, 84, 55, 6); (L, R) = (36, 324)".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 13] = [
        ("projection breaks Bézout for deg_z", croix, 1),
        ("quadric variant boundary count", quadric, 1),
        ("rank and enumeration verdicts agree", rank_vs_enumeration, 10),
        ("covering number equals dimension", covering, 1),
        ("grid density of CTS", density, 60),
        ("Suite Sécante harness", secante, 30),
        ("Kakeya sets are CTS", kakeya, 10),
        ("most CTS are not Kakeya", not_kakeya, 10),
        ("grid duality and zero pattern", duality, 30),
        ("coefficient extraction", extraction, 30),
        ("multiplication trace identity", trace, 30),
        ("nonzero count lower bound", ore, 10),
        ("bound calculator golden values", golden, 1),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(note) if took > Duration::from_secs(*limit) => {
                Err(format!("{note}; took {took:.2?} > {limit} s"))
            }
            other => other,
        };
        match outcome {
            Ok(note) => println!("PASS {:>2} {name}: {note} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
