//! Suite Sécante testing by evaluation at random grid points.
//!
//! The decision procedure samples `L = 6 dim(Ω)` points from `{1..R}^n` and
//! answers `No` exactly when the input vanishes at all of them. It is kept
//! literal: inputs that are not secant but fail to vanish on the sample
//! (repeated equations, inconsistent systems) are answered `Yes`, and the
//! harness below measures how often that happens per input class.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::LogProb;
use crate::circuit::Evaluable;
use crate::cts::{cts_params, CtsParameters};
use crate::error::{Error, Result};
use crate::field::{Point, PrimeField, Rng};
use crate::linalg::Matrix;
use crate::poly::{DegreeProfile, MultiPoly};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecanteInput {
    pub f: Evaluable,
    pub profile: DegreeProfile,
    pub dim_omega: u64,
    pub deg_lci_omega: u64,
}

impl SecanteInput {
    /// Input from the dense family `P_(d)`: `dim(Ω) = N_(d)`, `deg_lci(Ω) = 1`
    /// unless overridden.
    pub fn new(
        f: Evaluable,
        profile: DegreeProfile,
        dim_omega: Option<u64>,
        deg_lci_omega: Option<u64>,
    ) -> Result<Self> {
        f.validate()?;
        let n = f.num_inputs();
        let m = f.num_outputs();
        if profile.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: profile.n,
            });
        }
        if profile.m() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: profile.m(),
            });
        }
        if m > n {
            return Err(Error::DimensionMismatch { expected: n, got: m });
        }
        if let Evaluable::Polys(polys) = &f {
            for (g, &d) in polys.iter().zip(&profile.degrees) {
                if let Some(deg) = g.degree() {
                    if deg > d {
                        return Err(Error::DegreeTooLarge {
                            degree: deg,
                            max: d as u64,
                        });
                    }
                }
            }
        }
        let dim_omega = match dim_omega {
            Some(v) => v,
            None => profile.dimension_u64()?,
        };
        Ok(Self {
            f,
            profile,
            dim_omega,
            deg_lci_omega: deg_lci_omega.unwrap_or(1),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.f.field()
    }

    pub fn n(&self) -> usize {
        self.f.num_inputs()
    }

    pub fn m(&self) -> usize {
        self.f.num_outputs()
    }
}

#[derive(Deserialize)]
struct InputJson {
    f: Evaluable,
    degrees: Vec<u32>,
    #[serde(default)]
    dim_omega: Option<u64>,
    #[serde(default)]
    deg_lci_omega: Option<u64>,
}

impl<'de> Deserialize<'de> for SecanteInput {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = InputJson::deserialize(d)?;
        let profile = DegreeProfile::new(raw.f.num_inputs(), raw.degrees).map_err(serde::de::Error::custom)?;
        SecanteInput::new(raw.f, profile, raw.dim_omega, raw.deg_lci_omega).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `m = 1`: plain zero testing
    ZeroTest,
    Secante,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecanteTranscript {
    pub params: CtsParameters,
    pub mode: Mode,
    pub seed: u64,
    pub points: Vec<Point>,
    pub evaluations: Vec<Vec<u64>>,
    pub verdict: Verdict,
    /// `log10(1 / (deg_lci e^(6 m dim)))`
    pub error_bound_log10: f64,
    pub evaluation_count: u64,
    /// arithmetic operations spent on evaluation (`L` times the circuit size)
    pub op_count: u64,
}

/// `1 / (deg_lci e^(6 m dim))` in log space.
pub fn error_bound(dim_omega: u64, deg_lci_omega: u64, m: u64) -> LogProb {
    LogProb::from_ln(-((deg_lci_omega as f64).ln() + 6.0 * m as f64 * dim_omega as f64))
}

/// `No` iff every evaluation is the zero vector.
pub fn verdict_on_points(f: &Evaluable, points: &[Point]) -> Result<(Vec<Vec<u64>>, Verdict)> {
    let evals: Vec<Vec<u64>> = points.iter().map(|x| f.evaluate(x)).collect::<Result<_>>()?;
    let verdict = if evals.iter().all(|v| v.iter().all(|&c| c == 0)) {
        Verdict::No
    } else {
        Verdict::Yes
    };
    Ok((evals, verdict))
}

pub fn decide_secante(input: &SecanteInput, rng: &mut Rng) -> Result<SecanteTranscript> {
    let field = input.field();
    let d = input.profile.max_degree() as u64;
    let params = cts_params(input.dim_omega, input.deg_lci_omega, d)?;
    if field.modulus() <= params.radius {
        return Err(Error::FieldTooSmall {
            p: field.modulus(),
            radius: params.radius,
        });
    }
    let seed = rng.seed();
    let points: Vec<Point> = (0..params.length)
        .map(|_| field.sample_grid_point(params.radius, input.n(), rng))
        .collect::<Result<_>>()?;
    let (evaluations, verdict) = verdict_on_points(&input.f, &points)?;
    let m = input.m() as u64;
    Ok(SecanteTranscript {
        params,
        mode: if m == 1 { Mode::ZeroTest } else { Mode::Secante },
        seed,
        points,
        evaluations,
        verdict,
        error_bound_log10: error_bound(input.dim_omega, input.deg_lci_omega, m).log10(),
        evaluation_count: params.length,
        op_count: params.length * input.f.op_count() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseClass {
    /// coordinate subspace after a random invertible linear change
    SecantCoordinate,
    ZeroList,
    /// e.g. `(X1, X1)`
    RepeatedEquation,
    /// e.g. `(X1, X1 + 1)`, empty zero set
    InconsistentConstant,
}

impl CaseClass {
    pub const ALL: [CaseClass; 4] = [
        CaseClass::SecantCoordinate,
        CaseClass::ZeroList,
        CaseClass::RepeatedEquation,
        CaseClass::InconsistentConstant,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessCase {
    pub input: SecanteInput,
    /// ground truth by construction
    pub secant: bool,
    pub class: CaseClass,
}

/// One case of the given class over `F_p^n` with `m` linear equations
/// (`m = 1` gives the zero-test variants).
pub fn build_case(field: PrimeField, n: usize, m: usize, class: CaseClass, rng: &mut Rng) -> Result<HarnessCase> {
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 1 <= m <= n, got m={m} n={n}")));
    }
    let x = |i| MultiPoly::var(field, n, i);
    let zero = MultiPoly::zero(field, n);
    let one = MultiPoly::constant(field, n, 1);
    let polys: Vec<MultiPoly> = match class {
        CaseClass::SecantCoordinate => {
            let a = random_invertible(field, n, rng);
            (0..m)
                .map(|i| {
                    (0..n).fold(zero.clone(), |acc, j| &acc + &x(j).scale(a.get(i, j)))
                })
                .collect()
        }
        CaseClass::ZeroList => vec![zero; m],
        CaseClass::RepeatedEquation if m == 1 => vec![&x(0) * &x(0)],
        CaseClass::RepeatedEquation => vec![x(0); m],
        CaseClass::InconsistentConstant if m == 1 => vec![one],
        CaseClass::InconsistentConstant => {
            let mut v = vec![x(0); m];
            v[m - 1] = &x(0) + &one;
            v
        }
    };
    let degrees = polys.iter().map(|g| g.degree().unwrap_or(0).max(1)).collect();
    let profile = DegreeProfile::new(n, degrees)?;
    Ok(HarnessCase {
        input: SecanteInput::new(polys.into(), profile, None, None)?,
        secant: class == CaseClass::SecantCoordinate,
        class,
    })
}

fn random_invertible(field: PrimeField, n: usize, rng: &mut Rng) -> Matrix {
    loop {
        let mut a = Matrix::zeros(field, n, n);
        for r in 0..n {
            for c in 0..n {
                a.set(r, c, rng.element(field));
            }
        }
        if a.rank() == n {
            return a;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: CaseClass,
    pub secant: bool,
    pub cases: u64,
    pub trials: u64,
    pub yes: u64,
    pub no: u64,
    pub yes_rate: f64,
    pub no_rate: f64,
    /// fraction of runs whose verdict matches the ground truth
    pub agreement_rate: f64,
    /// the literal procedure disagrees with the ground truth on some run
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessReport {
    pub seed: u64,
    pub trials: u64,
    pub classes: Vec<ClassReport>,
}

/// Runs every case `trials` times with fresh randomness. Run `t` of case `i`
/// uses the stream derived from `(seed, i * trials + t)`.
pub fn truth_harness(cases: &[HarnessCase], trials: u64, seed: u64) -> Result<HarnessReport> {
    let runs: Vec<(usize, Verdict)> = (0..cases.len() as u64 * trials)
        .into_par_iter()
        .map(|k| {
            let i = (k / trials.max(1)) as usize;
            let mut rng = Rng::derive(seed, k);
            decide_secante(&cases[i].input, &mut rng).map(|t| (i, t.verdict))
        })
        .collect::<Result<_>>()?;

    let mut classes: Vec<CaseClass> = cases.iter().map(|c| c.class).collect();
    classes.sort();
    classes.dedup();
    let reports = classes
        .into_iter()
        .map(|class| {
            let members: Vec<usize> = (0..cases.len()).filter(|&i| cases[i].class == class).collect();
            let mut yes = 0u64;
            let mut no = 0u64;
            let mut agree = 0u64;
            for &(i, v) in runs.iter().filter(|(i, _)| cases[*i].class == class) {
                match v {
                    Verdict::Yes => yes += 1,
                    Verdict::No => no += 1,
                }
                if (v == Verdict::Yes) == cases[i].secant {
                    agree += 1;
                }
            }
            let total = (yes + no).max(1) as f64;
            ClassReport {
                class,
                secant: members.iter().all(|&i| cases[i].secant),
                cases: members.len() as u64,
                trials: yes + no,
                yes,
                no,
                yes_rate: yes as f64 / total,
                no_rate: no as f64 / total,
                agreement_rate: agree as f64 / total,
                divergent: agree < yes + no,
            }
        })
        .collect();
    Ok(HarnessReport {
        seed,
        trials,
        classes: reports,
    })
}
