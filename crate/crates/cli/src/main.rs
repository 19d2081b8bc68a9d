//! `ctslab` command-line front end.
//!
//! Every run prints one JSON document on stdout (with a `schema` field) and
//! a run manifest on stderr, or to `--manifest FILE`. Exit codes: 0 on
//! success, 2 on invalid input, 3 when a resource cap is hit.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use ctslab::bounds::{
    density_failure, density_hypotheses, extrinsic_bound, intersection_bounds, sz_bound, DensityInputs, SumStart,
};
use ctslab::circuit::Evaluable;
use ctslab::cts::{
    covering_number, cts_params, density_experiment, is_cts, is_cts_enumerated, is_cts_linear, Discriminant,
    PolyFamily, DEFAULT_ENUM_CAP,
};
use ctslab::field::{all_points, Point, PrimeField, Rng};
use ctslab::kakeya::{build_star, cts_not_kakeya_experiment, is_kakeya, kakeya_cts_check, PointSet};
use ctslab::nullsatz::{GridAlgebra, DEFAULT_MATRIX_CAP};
use ctslab::poly::{DegreeProfile, MultiPoly};
use ctslab::secante::{build_case, decide_secante, truth_harness, CaseClass, SecanteInput};
use ctslab::variety::{
    count_points, croix_de_berny, intersect_count, ore_check, ConstructibleSet, IntersectOptions, DEFAULT_POINT_CAP,
};
use ctslab::{Error, Matrix};

#[derive(Parser)]
#[command(name = "ctslab", version, about = "Correct test sequences, Kakeya sets and grid duality over prime fields")]
struct Cli {
    /// Seed for every random choice made by the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the command's resource cap.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Correct test sequence verification and search.
    #[command(subcommand)]
    Cts(CtsCmd),
    /// Suite Sécante decision by sampling.
    Secante(SecanteArgs),
    #[command(subcommand)]
    Kakeya(KakeyaCmd),
    /// Grid algebras: coefficient extraction, witnesses, duality, traces.
    #[command(subcommand)]
    Nullsatz(NullsatzCmd),
    /// Point counts of constructible sets.
    #[command(subcommand)]
    Variety(VarietyCmd),
    /// Closed-form bound calculators.
    #[command(subcommand)]
    Bounds(BoundsCmd),
}

/// A family from `--input FILE`, or the dense `P_d` in `n` variables over `F_p`.
#[derive(Args)]
struct FamilySource {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Rank,
    Enumerate,
}

#[derive(Subcommand)]
enum CtsCmd {
    /// Decide whether a point list is a CTS for the family (Σ = {0}).
    Verify {
        #[command(flatten)]
        family: FamilySource,
        /// Point set JSON: {"p","n","points"}.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Smallest CTS inside a pool (all of F_p^n by default).
    Cover {
        #[command(flatten)]
        family: FamilySource,
        #[arg(long)]
        pool: Option<PathBuf>,
    },
    /// Fraction of random lists from {1..grid}^n that are CTS.
    Density {
        #[command(flatten)]
        family: FamilySource,
        #[arg(long)]
        grid_size: u64,
        /// List length (default 6 dim).
        #[arg(long)]
        length: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Sample length and grid radius for the decision procedure.
    Params(ParamsArgs),
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long)]
    dim: u64,
    #[arg(long)]
    deg: u64,
    #[arg(long)]
    d: u64,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SecanteArgs {
    #[command(subcommand)]
    harness: Option<SecanteCmd>,
    /// Input JSON: {"f": <circuit or polynomial list>, "degrees": [...]}.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    dim_omega: Option<u64>,
    #[arg(long)]
    deg_omega: Option<u64>,
}

#[derive(Subcommand)]
enum SecanteCmd {
    /// Yes/No rates on inputs with known answers.
    Harness {
        #[arg(long, default_value_t = 10007)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum KakeyaCmd {
    /// Union of all lines through a center.
    Build {
        #[arg(long, alias = "p")]
        q: u64,
        #[arg(long)]
        n: usize,
        /// Comma-separated coordinates (default: origin).
        #[arg(long, value_delimiter = ',')]
        center: Option<Vec<u64>>,
    },
    /// Check that every direction has a full line in the set.
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Rank check of the set as a CTS for P_d.
    CtsCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: u32,
    },
    /// Random lists of length k C(d+n, n): CTS rate and Kakeya count.
    Experiment {
        #[arg(long, alias = "p")]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum NullsatzCmd {
    /// Coefficient of X^theta from grid values only.
    Coeff {
        /// Grid JSON: {"p", "grids": [[...], ...]}.
        #[arg(long)]
        input: PathBuf,
        /// Polynomial or circuit JSON.
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_delimiter = ',')]
        theta: Vec<u32>,
        /// Degree of the input (must equal |theta|).
        #[arg(long)]
        degree: u32,
    },
    /// First grid point where the input does not vanish.
    Witness {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Pairing matrix and Kronecker-delta pattern.
    Duality {
        #[arg(long)]
        input: PathBuf,
    },
    /// Trace of multiplication by h against the sum of its values.
    Trace {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
}

#[derive(Subcommand)]
enum VarietyCmd {
    /// Projection counterexample over F_p.
    Croix {
        #[arg(long)]
        p: u64,
    },
    /// Points of a constructible set.
    Count {
        #[arg(long)]
        input: PathBuf,
        /// Include the points themselves.
        #[arg(long)]
        list: bool,
    },
    /// Nonzero count of a polynomial against (q - deg) q^(n-1).
    Ore {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Intersection count with degree-based bounds.
    Intersect {
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        /// Compare with the declared degrees.
        #[arg(long)]
        compare: bool,
        /// Dimension of the intersection (default: smallest declared).
        #[arg(long)]
        dim: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SumFrom {
    First,
    Second,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Three upper bounds for the degree of an intersection.
    Intersection {
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u64>,
        /// Dimension of the first set.
        #[arg(long)]
        r: u64,
        #[arg(long, value_enum, default_value_t = SumFrom::Second)]
        sum_from: SumFrom,
    },
    /// Degree bound for the extrinsic construction with its intermediates.
    Extrinsic {
        /// Non-increasing degrees.
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u64>,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        dim_w: u64,
        #[arg(long)]
        deg_v: u64,
    },
    /// Hypothesis checklist of the density theorem.
    Hypotheses {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        length: u64,
        #[arg(long)]
        dim: u64,
        #[arg(long)]
        deg: u64,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        delta_max: u64,
        #[arg(long)]
        codim: u64,
    },
    /// Probability that a random point of Q^n avoids a set of given degree.
    Sz {
        #[arg(long)]
        deg: u64,
        #[arg(long)]
        card: u64,
        #[arg(long)]
        codim: u64,
    },
    /// Density lower bound 1 - 1/(deg e^(dim + (m-1) L)).
    Prob {
        #[arg(long)]
        dim: u64,
        #[arg(long)]
        deg: u64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        length: u64,
    },
    /// Sample length and grid radius.
    Params(ParamsArgs),
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = Result<Value, Failure>;

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input_err(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// A single polynomial, a polynomial list or a circuit.
fn read_evaluable(path: &Path) -> Result<Evaluable, Failure> {
    let text = read_text(path)?;
    if let Ok(p) = serde_json::from_str::<MultiPoly>(&text) {
        return Ok(p.into());
    }
    let ev: Evaluable = serde_json::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    ev.validate()?;
    Ok(ev)
}

fn read_poly(path: &Path) -> Result<MultiPoly, Failure> {
    read_json(path)
}

fn to_value<T: Serialize>(v: &T) -> Outcome {
    serde_json::to_value(v).map_err(|e| input_err(e.to_string()))
}

impl FamilySource {
    fn family(&self) -> Result<PolyFamily, Failure> {
        if let Some(path) = &self.input {
            return read_json(path);
        }
        match (self.p, self.n, self.d) {
            (Some(p), Some(n), Some(d)) => Ok(PolyFamily::dense(PrimeField::new(p)?, DegreeProfile::single(n, d))),
            _ => Err(input_err("give --input FILE or all of --p, --n, --d")),
        }
    }
}

fn check_points(fam: &PolyFamily, set: &PointSet) -> Result<(), Failure> {
    if set.p != fam.field().modulus() || set.n != fam.nvars() {
        return Err(input_err("point set and family live in different spaces"));
    }
    Ok(())
}

fn run_cts(cmd: &CtsCmd, cli: &Cli) -> Outcome {
    let cap = cli.cap.unwrap_or(DEFAULT_ENUM_CAP);
    match cmd {
        CtsCmd::Verify {
            family,
            points,
            method,
        } => {
            let fam = family.family()?;
            let set: PointSet = read_json(points)?;
            check_points(&fam, &set)?;
            let sigma = Discriminant::ZeroOnly;
            let v = match method {
                Method::Auto => is_cts(&fam, &sigma, &set.points, cap)?,
                Method::Rank => is_cts_linear(&fam, &set.points)?,
                Method::Enumerate => is_cts_enumerated(&fam, &sigma, &set.points, cap)?,
            };
            let mut out = to_value(&v)?;
            out["points"] = json!(set.points.len());
            out["dim"] = json!(fam.dim());
            Ok(out)
        }
        CtsCmd::Cover { family, pool } => {
            let fam = family.family()?;
            let pool: Vec<Point> = match pool {
                Some(path) => {
                    let set: PointSet = read_json(path)?;
                    check_points(&fam, &set)?;
                    set.points
                }
                None => all_points(fam.field(), fam.nvars()).collect(),
            };
            to_value(&covering_number(&fam, &Discriminant::ZeroOnly, None, &pool, cap)?)
        }
        CtsCmd::Density {
            family,
            grid_size,
            length,
            trials,
        } => {
            let fam = family.family()?;
            let dim = fam
                .dim()
                .ok_or_else(|| input_err("the family needs a declared dimension"))?;
            let values: Vec<u64> = (1..=*grid_size).collect();
            let length = length.unwrap_or(6 * dim);
            to_value(&density_experiment(
                &fam,
                &Discriminant::ZeroOnly,
                &values,
                length,
                *trials,
                cli.seed,
                cap,
            )?)
        }
        CtsCmd::Params(a) => params(a),
    }
}

fn params(a: &ParamsArgs) -> Outcome {
    to_value(&cts_params(a.dim, a.deg, a.d)?)
}

fn run_secante(args: &SecanteArgs, cli: &Cli) -> Outcome {
    if let Some(SecanteCmd::Harness { p, n, m, trials }) = &args.harness {
        let field = PrimeField::new(*p)?;
        let mut rng = Rng::new(cli.seed);
        let cases = CaseClass::ALL
            .iter()
            .map(|&c| build_case(field, *n, *m, c, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        return to_value(&truth_harness(&cases, *trials, cli.seed)?);
    }
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| input_err("secante needs --input FILE or the harness subcommand"))?;
    let mut input: SecanteInput = read_json(path)?;
    if let Some(v) = args.dim_omega {
        input.dim_omega = v;
    }
    if let Some(v) = args.deg_omega {
        input.deg_lci_omega = v;
    }
    to_value(&decide_secante(&input, &mut Rng::new(cli.seed))?)
}

fn run_kakeya(cmd: &KakeyaCmd, cli: &Cli) -> Outcome {
    match cmd {
        KakeyaCmd::Build { q, n, center } => {
            let field = PrimeField::new(*q)?;
            let center = Point(center.clone().unwrap_or_else(|| vec![0; *n]));
            to_value(&build_star(field, *n, &center)?)
        }
        KakeyaCmd::Verify { input } => {
            let set: PointSet = read_json(input)?;
            let mut out = to_value(&is_kakeya(&set))?;
            out["cardinality"] = json!(set.len());
            Ok(out)
        }
        KakeyaCmd::CtsCheck { input, d } => {
            let set: PointSet = read_json(input)?;
            to_value(&kakeya_cts_check(&set, *d)?)
        }
        KakeyaCmd::Experiment { q, n, d, k, trials } => {
            let field = PrimeField::new(*q)?;
            to_value(&cts_not_kakeya_experiment(field, *n, *d, *k, *trials, cli.seed)?)
        }
    }
}

fn run_nullsatz(cmd: &NullsatzCmd, cli: &Cli) -> Outcome {
    match cmd {
        NullsatzCmd::Coeff {
            input,
            poly,
            theta,
            degree,
        } => {
            let alg: GridAlgebra = read_json(input)?;
            let f = read_evaluable(poly)?;
            let c = alg.extract_coefficient(&f, theta, *degree)?;
            Ok(json!({ "theta": theta, "coefficient": c }))
        }
        NullsatzCmd::Witness { input, poly } => {
            let alg: GridAlgebra = read_json(input)?;
            let f = read_evaluable(poly)?;
            Ok(json!({ "witness": alg.find_witness(&f)? }))
        }
        NullsatzCmd::Duality { input } => {
            let alg: GridAlgebra = read_json(input)?;
            let cap = cli.cap.unwrap_or(DEFAULT_MATRIX_CAP);
            if alg.size() > cap {
                return Err(Failure::Cap(format!("grid size {} exceeds cap {cap}", alg.size())));
            }
            let m = alg.duality_matrix()?;
            let identity = m == Matrix::identity(alg.field(), alg.size() as usize);
            Ok(json!({
                "size": alg.size(),
                "identity": identity,
                "delta_pattern": to_value(&alg.delta_pattern()?)?,
            }))
        }
        NullsatzCmd::Trace { input, poly } => {
            let alg: GridAlgebra = read_json(input)?;
            let h = read_poly(poly)?;
            to_value(&alg.homothety_trace_check(&h, cli.cap.unwrap_or(DEFAULT_MATRIX_CAP))?)
        }
    }
}

fn run_variety(cmd: &VarietyCmd, cli: &Cli) -> Outcome {
    let cap = cli.cap.unwrap_or(DEFAULT_POINT_CAP);
    match cmd {
        VarietyCmd::Croix { p } => to_value(&croix_de_berny(*p)?),
        VarietyCmd::Count { input, list } => {
            let set: ConstructibleSet = read_json(input)?;
            let mut out = to_value(&count_points(&set, cap)?)?;
            if *list {
                out["points"] = to_value(&ctslab::variety::enumerate_points(&set, cap)?)?;
            }
            Ok(out)
        }
        VarietyCmd::Ore { poly } => to_value(&ore_check(&read_poly(poly)?, cap)?),
        VarietyCmd::Intersect { inputs, compare, dim } => {
            let sets = inputs
                .iter()
                .map(|p| read_json::<ConstructibleSet>(p))
                .collect::<Result<Vec<_>, _>>()?;
            let opts = IntersectOptions {
                compare: *compare,
                intersection_dim: *dim,
            };
            to_value(&intersect_count(&sets, &opts, cap)?)
        }
    }
}

fn run_bounds(cmd: &BoundsCmd) -> Outcome {
    match cmd {
        BoundsCmd::Intersection { degrees, r, sum_from } => {
            let start = match sum_from {
                SumFrom::First => SumStart::First,
                SumFrom::Second => SumStart::Second,
            };
            to_value(&intersection_bounds(degrees, *r, start)?)
        }
        BoundsCmd::Extrinsic {
            degrees,
            n,
            m,
            dim_w,
            deg_v,
        } => to_value(&extrinsic_bound(degrees, *n, *m, *dim_w, *deg_v)?),
        BoundsCmd::Hypotheses {
            n,
            m,
            d,
            length,
            dim,
            deg,
            delta,
            delta_max,
            codim,
        } => to_value(&density_hypotheses(&DensityInputs {
            n: *n,
            m: *m,
            d: *d,
            length: *length,
            dim_omega: *dim,
            deg_lci_omega: *deg,
            delta: *delta,
            delta_max: *delta_max,
            codim: *codim,
        })),
        BoundsCmd::Sz { deg, card, codim } => to_value(&sz_bound(*deg, *card, *codim)?),
        BoundsCmd::Prob { dim, deg, m, length } => {
            let f = density_failure(*dim, *deg, *m, *length);
            Ok(json!({
                "failure_ln": f.ln,
                "failure_log10": f.log10(),
                "bound": f.complement(),
            }))
        }
        BoundsCmd::Params(a) => params(a),
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Cts(c) => run_cts(c, cli),
        Command::Secante(a) => run_secante(a, cli),
        Command::Kakeya(c) => run_kakeya(c, cli),
        Command::Nullsatz(c) => run_nullsatz(c, cli),
        Command::Variety(c) => run_variety(c, cli),
        Command::Bounds(c) => run_bounds(c),
    }
}

/// `"bounds params"` and the like, from the parsed subcommand chain.
fn command_path(m: &ArgMatches) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = m;
    while let Some((name, sub)) = cur.subcommand() {
        out.push(name.to_string());
        cur = sub;
    }
    out
}

#[derive(Serialize)]
struct RunManifest {
    schema: &'static str,
    subcommand: String,
    argv: Vec<String>,
    seed: u64,
    threads: Option<usize>,
    cap: Option<u64>,
    version: &'static str,
    wall_time_ms: f64,
    cap_hit: bool,
    exit_code: u8,
}

fn main() -> ExitCode {
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let matches = Cli::command().try_get_matches_from(&argv).unwrap_or_else(|e| e.exit());
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let path = command_path(&matches);
    let Format::Json = cli.format;

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }

    let (code, cap_hit) = match run(&cli) {
        Ok(mut value) => {
            let schema = format!("ctslab.{}/1", path.join("."));
            match value.as_object_mut() {
                Some(obj) => {
                    obj.insert("schema".into(), Value::String(schema));
                }
                None => value = json!({ "schema": schema, "result": value }),
            }
            println!("{value}");
            (0, false)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            (2, false)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            (3, true)
        }
    };

    let manifest = RunManifest {
        schema: "ctslab.manifest/1",
        subcommand: path.join(" "),
        argv: argv[1..].to_vec(),
        seed: cli.seed,
        threads: cli.threads,
        cap: cli.cap,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        cap_hit,
        exit_code: code,
    };
    let text = serde_json::to_string(&manifest).expect("manifest serializes");
    match &cli.manifest {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("error: cannot write manifest {}: {e}", path.display());
            }
        }
        None => eprintln!("{text}"),
    }
    ExitCode::from(code)
}
