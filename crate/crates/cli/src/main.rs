use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use apolar::apolarity::{expected_perp_dim, perp_space, FormSystem};
use apolar::betti::{generic_betti_mod, points_betti};
use apolar::cohomology::{count_trace, quadruple_to_symprod};
use apolar::constructions::{
    base_locus_polyhedra, diagonalize_quadric_pencil, grove_case1_rank, hb_plane_construct_2347, inverse_associated_2428,
    london_count, london_hexahedra, random_octuple, residual_construct, BaseLocusCase, DiagonalizationJson, Generality,
    ResidualCase, Verification, Verified,
};
use apolar::json::{complex_vec_json, points_from_json, points_to_json, read_system, system_to_json, PointsJson};
use apolar::points::{PointSet, Quadruple};
use apolar::random::{random_general_system, random_rational_vec, rng, Rng64};
use apolar::{PrimeField, Rationals};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

const SCHEMA: u32 = 1;
const DEFAULT_TOL: f64 = 1e-8;
const ASSOCIATED_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "apolar", version, about = "Perp spaces, polar polyhedra, enumerative counts and Betti tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where a system of forms comes from.
#[derive(Args, Clone)]
struct Source {
    /// JSON file with a system `{"n","d","r","basis"}`.
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generate a general random system with shape `n,d,r`.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    gen: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of the perp spaces of a system.
    Perp {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        degree: Option<u32>,
        /// Fail unless the perp space in `--degree` has this dimension.
        #[arg(long, requires = "degree")]
        expect: Option<usize>,
    },
    /// Number of polar polyhedra with vertices on a curve.
    Count {
        #[arg(long)]
        quadruple: String,
        #[arg(long)]
        curve_degree: usize,
    },
    /// Construct polar polyhedra of a seeded or given system.
    Construct {
        #[arg(long)]
        quadruple: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Auxiliary point `x:y:z`, random when omitted.
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Starting points for the numeric search on nets of cubics.
        #[arg(long, default_value_t = 40)]
        starts: usize,
    },
    /// Count (and optionally exhibit) the polar hexahedra of a net of plane cubics.
    London {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 32003)]
        prime: u64,
        #[arg(long)]
        exhibit: bool,
        #[arg(long, default_value_t = 40)]
        starts: usize,
    },
    /// Betti table of a point set modulo a prime.
    Betti {
        /// JSON file with points `{"n","points"}`.
        #[arg(long, conflicts_with = "gen")]
        input: Option<PathBuf>,
        /// Random points, `n,s`.
        #[arg(long)]
        gen: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32003)]
        prime: u64,
        /// Print the Betti diagram instead of the JSON report.
        #[arg(long)]
        text: bool,
    },
    /// Rank condition for eight points of the line attached to the quadrics of a quartic curve.
    GroveCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Explicit points `a:b,a:b,...` instead of a seeded octuple.
        #[arg(long)]
        points: Option<String>,
    },
    /// Simultaneous diagonalization of a pencil of quadrics.
    Diagonalize {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Lib(#[from] apolar::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_degenerate() => 3,
            CliError::Lib(apolar::Error::NotZeroDimensional | apolar::Error::CoefficientBlowup(_)) => 3,
            _ => 2,
        }
    }
}

type Res<T> = Result<T, CliError>;

/// What a command produced: the inputs needed to rerun it and the result.
struct Outcome {
    passed: bool,
    seed: Option<u64>,
    field: &'static str,
    inputs: Value,
    result: Value,
    text: Option<String>,
}

fn tolerance() -> Res<f64> {
    match std::env::var("APOLAR_TOL") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Input(format!("APOLAR_TOL must be a positive number, got {s:?}"))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, len: usize, what: &str) -> Res<Vec<T>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != len {
        return Err(CliError::Input(format!("{what} needs {len} comma-separated values, got {s:?}")));
    }
    parts.iter().map(|p| p.parse().map_err(|_| CliError::Input(format!("bad {what} entry {p:?}")))).collect()
}

fn parse_quadruple(s: &str) -> Res<Quadruple> {
    let v: Vec<u32> = parse_list(s, 4, "--quadruple")?;
    Ok(Quadruple { n: v[0], d: v[1], r: v[2], s: v[3] })
}

fn parse_rational(s: &str) -> Res<BigRational> {
    s.trim().parse().map_err(|_| CliError::Input(format!("not a rational number: {s:?}")))
}

fn parse_point(s: &str, len: usize) -> Res<Vec<BigRational>> {
    let v = s.split(':').map(parse_rational).collect::<Res<Vec<_>>>()?;
    if v.len() != len {
        return Err(CliError::Input(format!("point {s:?} needs {len} coordinates")));
    }
    if v.iter().all(|c| *c == BigRational::from_integer(0.into())) {
        return Err(CliError::Input("the zero vector is not a point".into()));
    }
    Ok(v)
}

fn read_file(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Loads `--input` or generates from `--gen`; a fixed `shape` fills in a bare `--gen`
/// and is enforced on files.
fn load_system(src: &Source, shape: Option<(usize, u32, usize)>, g: &mut Rng64) -> Res<FormSystem<Rationals>> {
    if let Some(path) = &src.input {
        let sys = read_system(&read_file(path)?)?;
        if let Some(shape) = shape {
            if (sys.n(), sys.d(), sys.r()) != shape {
                return Err(CliError::Input(format!(
                    "system has shape ({},{},{}), expected {shape:?}",
                    sys.n(),
                    sys.d(),
                    sys.r()
                )));
            }
        }
        return Ok(sys);
    }
    let (n, d, r) = match (src.gen.as_deref(), shape) {
        (Some(""), Some(shape)) | (None, Some(shape)) => shape,
        (Some(""), None) | (None, None) => return Err(CliError::Input("give --input FILE or --gen n,d,r".into())),
        (Some(s), _) => {
            let v: Vec<usize> = parse_list(s, 3, "--gen")?;
            let got = (v[0], v[1] as u32, v[2]);
            if shape.is_some_and(|sh| sh != got) {
                return Err(CliError::Input(format!("--gen {s} does not match the required shape {:?}", shape.unwrap())));
            }
            got
        }
    };
    Ok(random_general_system(g, n, d, r)?)
}

fn verification_ok(v: &Verification, tol: f64) -> bool {
    v.apolar && v.reye_residual <= tol && v.resolution == Generality::General
}

fn point_strings(p: &[BigRational]) -> Vec<String> {
    p.iter().map(|c| c.to_string()).collect()
}

fn cmd_perp(src: &Source, degree: Option<u32>, expect: Option<usize>) -> Res<Outcome> {
    let lam = load_system(src, None, &mut rng(src.seed))?;
    let degrees: Vec<u32> = match degree {
        Some(i) => vec![i],
        None => (0..=lam.d()).collect(),
    };
    let mut dims = Vec::new();
    for &i in &degrees {
        let dim = perp_space(&lam, i).dim();
        let expected = expected_perp_dim(lam.n() as i64, i64::from(lam.d()), lam.r() as i64, i64::from(i))?;
        dims.push(json!({"degree": i, "dim": dim, "expected": expected}));
    }
    let got = dims[0]["dim"].as_u64().map(|x| x as usize);
    let passed = expect.is_none_or(|e| degree.is_some() && got == Some(e));
    Ok(Outcome {
        passed,
        seed: Some(src.seed),
        field: "QQ",
        inputs: json!({"system": system_to_json(&lam), "degree": degree, "expect": expect}),
        result: json!({"dims": dims}),
        text: None,
    })
}

fn cmd_count(quadruple: &str, curve_degree: usize) -> Res<Outcome> {
    let q = parse_quadruple(quadruple)?;
    let params = quadruple_to_symprod(q.n as usize, q.d, q.r as usize, q.s as usize, curve_degree)?;
    let trace = count_trace(params.m, params.big_d, params.q)?;
    Ok(Outcome {
        passed: true,
        seed: None,
        field: "ZZ",
        inputs: json!({"quadruple": q, "curve_degree": curve_degree}),
        result: json!({"params": params, "trace": trace, "count": trace.count}),
        text: None,
    })
}

fn polyhedron_checks(v: &Verified, tol: f64) -> bool {
    verification_ok(&v.verification, tol)
}

fn london_outcome(
    lam: &FormSystem<Rationals>,
    seed: u64,
    prime: u64,
    exhibit: bool,
    starts: usize,
    tol: f64,
) -> Res<(bool, Value)> {
    let count = london_count(lam, prime, seed)?;
    let mut passed = count.hexahedra == 2;
    let mut result = json!({"count": count, "hexahedra": count.hexahedra});
    if exhibit {
        let data = london_hexahedra(lam, seed, starts)?;
        let found = data.hexahedra.len();
        let ok = data
            .hexahedra
            .iter()
            .all(|h| polyhedron_checks(&h.result, tol) && h.mutual_pairs == 30 && h.generators_annihilate);
        passed &= found == 0 || (found == count.hexahedra && ok);
        result["exhibition"] = data.to_json();
        result["exhibited"] = json!(found);
    }
    Ok((passed, result))
}

fn cmd_construct(quadruple: &str, seed: u64, point: Option<&str>, input: Option<&PathBuf>, starts: usize) -> Res<Outcome> {
    let tol = tolerance()?;
    let q = parse_quadruple(quadruple)?;
    let (n, d, r) = (q.n as usize, q.d, q.r as usize);
    let mut g = rng(seed);
    let constructible = BaseLocusCase::from_quadruple(q).is_some()
        || ResidualCase::from_quadruple(q).is_some()
        || [(2, 3, 4, 7), (2, 4, 2, 8), (2, 3, 3, 6)].contains(&(n, d, r, q.s))
        || (d == 2 && r == 2 && q.s as usize == n + 1);
    if !constructible {
        if apolar::cohomology::ELLIPTIC_QUADRUPLES.contains(&(n, d, r, q.s as usize)) {
            return Err(CliError::Input(format!("{quadruple} is counted, not constructed; use `count`")));
        }
        return Err(CliError::Input(format!("no construction for the quadruple {quadruple}")));
    }
    let src = Source { input: input.cloned(), gen: None, seed };
    let pick_point = |g: &mut Rng64| -> Res<Vec<BigRational>> {
        match point {
            Some(s) => parse_point(s, n + 1),
            None => Ok(random_rational_vec(g, n + 1)),
        }
    };
    let lam = load_system(&src, Some((n, d, r)), &mut g)?;
    let mut point_used = None;
    let (passed, result) = if let Some(case) = BaseLocusCase::from_quadruple(q) {
        let rep = base_locus_polyhedra(&lam, case)?;
        let expected = if case == BaseLocusCase::Plane { 9 } else { 8 };
        (rep.polyhedra.len() == expected && rep.polyhedra.iter().all(|p| polyhedron_checks(p, tol)), rep.to_json())
    } else if let Some(case) = ResidualCase::from_quadruple(q) {
        let p = point_used.insert(pick_point(&mut g)?);
        let rep = residual_construct(&lam, p, case)?;
        (polyhedron_checks(&rep.result, tol) && rep.associated_error <= ASSOCIATED_TOL, rep.to_json())
    } else if (n, d, r, q.s) == (2, 3, 4, 7) {
        let t = point_used.insert(pick_point(&mut g)?);
        let rep = hb_plane_construct_2347(&lam, t)?;
        (rep.solution_dim == 6 && rep.trivial_contained && polyhedron_checks(&rep.result, tol), rep.to_json())
    } else if (n, d, r, q.s) == (2, 4, 2, 8) {
        let p = point_used.insert(pick_point(&mut g)?);
        let rep = inverse_associated_2428(&lam, p, seed)?;
        (polyhedron_checks(&rep.result, tol) && rep.associated_error <= ASSOCIATED_TOL, rep.to_json())
    } else if (n, d, r, q.s) == (2, 3, 3, 6) {
        london_outcome(&lam, seed, 32003, true, starts, tol)?
    } else {
        diagonalize_outcome(&lam, seed, tol)?
    };
    Ok(construct_outcome(passed, seed, &lam, point_used.as_deref(), q, result))
}

fn construct_outcome(
    passed: bool,
    seed: u64,
    lam: &FormSystem<Rationals>,
    point: Option<&[BigRational]>,
    q: Quadruple,
    result: Value,
) -> Outcome {
    Outcome {
        passed,
        seed: Some(seed),
        field: "QQ -> CC",
        inputs: json!({"quadruple": q, "system": system_to_json(lam), "point": point.map(point_strings)}),
        result,
        text: None,
    }
}

fn cmd_london(src: &Source, prime: u64, exhibit: bool, starts: usize) -> Res<Outcome> {
    let tol = tolerance()?;
    let lam = load_system(src, Some((2, 3, 3)), &mut rng(src.seed))?;
    let (passed, result) = london_outcome(&lam, src.seed, prime, exhibit, starts, tol)?;
    Ok(Outcome {
        passed,
        seed: Some(src.seed),
        field: "QQ -> GF(p), CC",
        inputs: json!({"system": system_to_json(&lam), "prime": prime, "exhibit": exhibit, "starts": starts}),
        result,
        text: None,
    })
}

fn cmd_betti(input: Option<&PathBuf>, gen: Option<&str>, seed: u64, prime: u64, text: bool) -> Res<Outcome> {
    let z: PointSet<Rationals> = match (input, gen) {
        (Some(path), _) => {
            let j: PointsJson = serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Input(e.to_string()))?;
            points_from_json(&Rationals, &j)?
        }
        (None, Some(s)) => {
            let v: Vec<usize> = parse_list(s, 2, "--gen")?;
            let mut g = rng(seed);
            let pts = (0..v[1]).map(|_| random_rational_vec(&mut g, v[0] + 1)).collect();
            PointSet::new(&Rationals, v[0], pts)?
        }
        (None, None) => return Err(CliError::Input("give --input FILE or --gen n,s".into())),
    };
    let fp = PrimeField::new(prime)?;
    let zp = z.to_prime(&fp).ok_or_else(|| CliError::Input(format!("points do not reduce modulo {prime}")))?;
    let table = points_betti(&zp)?;
    let general = generic_betti_mod(z.n(), z.len(), seed, prime)?;
    let diagram = table.diagram();
    Ok(Outcome {
        passed: true,
        seed: Some(seed),
        field: "GF(p)",
        inputs: json!({"points": points_to_json(&z), "prime": prime}),
        result: json!({"table": table, "diagram": diagram, "general": table == general}),
        text: text.then_some(diagram),
    })
}

fn cmd_grove(seed: u64, points: Option<&str>) -> Res<Outcome> {
    let p = match points {
        Some(s) => s
            .split(',')
            .map(|q| {
                let v = parse_point(q, 2)?;
                Ok([v[0].clone(), v[1].clone()])
            })
            .collect::<Res<Vec<_>>>()?,
        None => random_octuple(seed),
    };
    let report = grove_case1_rank(&p)?;
    Ok(Outcome {
        passed: report.grove_free && report.distinct,
        seed: Some(seed),
        field: "QQ",
        inputs: json!({"p": report.p}),
        result: serde_json::to_value(&report).expect("serializable"),
        text: None,
    })
}

fn diagonalize_outcome(lam: &FormSystem<Rationals>, seed: u64, tol: f64) -> Res<(bool, Value)> {
    let basis = lam.basis();
    let d = diagonalize_quadric_pencil(&basis[0], &basis[1], seed)?;
    let passed = verification_ok(&d.result.verification, tol) && d.vertex_residual <= tol;
    let mut result = serde_json::to_value(DiagonalizationJson::from(&d)).expect("serializable");
    result["vertices"] = json!(d.vertices.iter().map(|v| complex_vec_json(v)).collect::<Vec<_>>());
    result["eigenvalues"] = json!(d.eigenvalues.iter().map(|e| e.map(|c| complex_vec_json(&[c])[0].clone())).collect::<Vec<_>>());
    Ok((passed, result))
}

fn cmd_diagonalize(src: &Source) -> Res<Outcome> {
    let tol = tolerance()?;
    let lam = load_system(src, None, &mut rng(src.seed))?;
    if lam.d() != 2 || lam.r() != 2 {
        return Err(CliError::Input(format!("expected a pencil of quadrics, got shape ({},{},{})", lam.n(), lam.d(), lam.r())));
    }
    let (passed, result) = diagonalize_outcome(&lam, src.seed, tol)?;
    Ok(Outcome { passed, seed: Some(src.seed), field: "QQ -> CC", inputs: json!({"system": system_to_json(&lam)}), result, text: None })
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Perp { .. } => "perp",
        Command::Count { .. } => "count",
        Command::Construct { .. } => "construct",
        Command::London { .. } => "london",
        Command::Betti { .. } => "betti",
        Command::GroveCheck { .. } => "grove-check",
        Command::Diagonalize { .. } => "diagonalize",
    }
}

fn run(c: &Command) -> Res<Outcome> {
    match c {
        Command::Perp { source, degree, expect } => cmd_perp(source, *degree, *expect),
        Command::Count { quadruple, curve_degree } => cmd_count(quadruple, *curve_degree),
        Command::Construct { quadruple, seed, point, input, starts } => {
            cmd_construct(quadruple, *seed, point.as_deref(), input.as_ref(), *starts)
        }
        Command::London { source, prime, exhibit, starts } => cmd_london(source, *prime, *exhibit, *starts),
        Command::Betti { input, gen, seed, prime, text } => cmd_betti(input.as_ref(), gen.as_deref(), *seed, *prime, *text),
        Command::GroveCheck { seed, points } => cmd_grove(*seed, points.as_deref()),
        Command::Diagonalize { source } => cmd_diagonalize(source),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let outcome = tolerance().and_then(|tol| run(&cli.command).map(|o| (tol, o)));
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut report = json!({
        "schema": SCHEMA,
        "version": apolar::VERSION,
        "command": name(&cli.command),
        "argv": argv,
    });
    let code = match outcome {
        Ok((tol, o)) => {
            if let Some(text) = &o.text {
                println!("{text}");
                return ExitCode::from(if o.passed { 0 } else { 1 });
            }
            report["seed"] = json!(o.seed);
            report["field"] = json!(o.field);
            report["tolerance"] = json!(tol);
            report["inputs"] = o.inputs;
            report["result"] = o.result;
            report["passed"] = json!(o.passed);
            u8::from(!o.passed)
        }
        Err(e) => {
            eprintln!("error: {e}");
            report["error"] = json!(e.to_string());
            report["passed"] = json!(false);
            e.exit_code()
        }
    };
    report["exit_code"] = json!(code);
    report["timings"] = json!({"elapsed_ms": elapsed});
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    ExitCode::from(code)
}
