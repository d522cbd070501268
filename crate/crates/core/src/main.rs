use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use liftedve::corpus::{random_one_logvar_model, random_two_logvar_model, Family};
use liftedve::ground::DEFAULT_CAP;
use liftedve::io::{fmt_ln_real, fmt_real, parse_model, parse_query, parse_wmc, serialize_model, serialize_result};
use liftedve::planner::{marginal, Answer, Query, Strategy};
use liftedve::wmc::{check_equivalence, import_wmc};
use liftedve::{Error, Model, Scalar};

#[derive(Parser)]
#[command(name = "liftedve", version, about = "Exact lifted inference for parfactor models")]
struct Cli {
    /// Largest ground table or enumeration the oracles may build.
    #[arg(long, global = true, env = "LIFTEDVE_CAP", default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F64,
    F32,
}

#[derive(Subcommand)]
enum Command {
    /// Print Z or the marginal of the query atom.
    Infer {
        model: PathBuf,
        query: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        /// Append the elimination trace.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "f64")]
        precision: Precision,
        /// Write the result here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the lifted answer with the ground answer.
    Verify {
        /// Model to check; without it a random corpus is checked.
        model: Option<PathBuf>,
        query: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long, default_value_t = 1e-9, value_parser = parse_tol)]
        tol: f64,
        /// Seed for the random corpus.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random models per generator.
        #[arg(long, default_value_t = 20)]
        corpus: usize,
        /// Scales one potential entry of the lifted input.
        #[arg(long, hide = true)]
        perturb: bool,
    },
    /// Emit a CSV of cost measurements over domain sizes.
    Bench {
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80,160")]
        sizes: Vec<usize>,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        /// Accepted for symmetry with verify; the families are fixed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Translate a WMC model into a parfactor model.
    ImportWmc {
        wmc: PathBuf,
        out: PathBuf,
        /// Also check equivalence at this domain size.
        #[arg(long)]
        check: Option<usize>,
        #[arg(long, default_value_t = 1e-9, value_parser = parse_tol)]
        tol: f64,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid tolerance {s}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("tolerance must be positive".into())
    }
}

fn parse_cap(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("cap must be a positive integer, got {s}")),
    }
}

/// Failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Declaration(_)
            | Error::Domain(_)
            | Error::Range(_)
            | Error::Arity(_)
            | Error::NotFound(_) => 2,
            Error::Capacity(_) => 3,
            Error::NotApplicable(_) | Error::Alignment(_) | Error::Undefined(_) | Error::Internal(_) => 1,
        };
        Fail(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    let bytes = fs::read(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    String::from_utf8(bytes).map_err(|_| Fail(2, format!("{}: not valid UTF-8", path.display())))
}

fn with_path(path: &Path, e: Error) -> Fail {
    let f = Fail::from(e);
    Fail(f.0, format!("{}:{}", path.display(), f.1))
}

fn load(model: &Path, query: Option<&Path>) -> Result<(Model, Query), Fail> {
    let m = parse_model(&read(model)?).map_err(|e| with_path(model, e))?;
    let q = match query {
        Some(p) => parse_query(&read(p)?).map_err(|e| with_path(p, e))?,
        None => Query::partition(),
    };
    Ok((m, q))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Fail> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Fail(1, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn range_of<T: Scalar>(m: &Model<T>, a: &Answer<T>) -> Vec<String> {
    a.marginal
        .as_ref()
        .and_then(|(t, _)| m.vocab.predicate(&t.pred).ok())
        .map(|p| p.range.clone())
        .unwrap_or_default()
}

fn infer<T: Scalar>(m: &Model<T>, q: &Query, strategy: Strategy, cap: usize, trace: bool) -> Result<String, Fail> {
    let a = marginal(m, q, strategy, cap)?;
    Ok(serialize_result(&a, &range_of(m, &a), trace))
}

/// Largest deviation between two answers: relative on Z, absolute on the
/// marginal.
fn deviation(a: &Answer, b: &Answer) -> f64 {
    let dz = if a.ln_z == b.ln_z { 0.0 } else { (a.ln_z - b.ln_z).abs().exp_m1() };
    let dm = match (&a.marginal, &b.marginal) {
        (Some((_, p)), Some((_, q))) => p.iter().zip(q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        _ => 0.0,
    };
    if dz.is_nan() {
        f64::INFINITY
    } else {
        dz.max(dm)
    }
}

fn perturb(m: &mut Model) {
    if let Some(pf) = m.parfactors.first_mut() {
        pf.potential = pf.potential.map_ln(|i, v| if i == 0 { v + 1.5f64.ln() } else { v });
    }
}

fn verify_one(m: &Model, q: &Query, strategy: Strategy, cap: usize, tol: f64, corrupt: bool) -> Result<(bool, String), Fail> {
    let ground = marginal(m, q, Strategy::Ground, cap)?;
    let mut lifted_in = m.clone();
    if corrupt {
        perturb(&mut lifted_in);
    }
    let lifted = marginal(&lifted_in, q, strategy, cap)?;
    let dev = deviation(&lifted, &ground);
    let ok = dev <= tol;
    let text = format!(
        "lifted Z = {} ({})\nground Z = {}\nmax relative deviation = {}\n{}\n",
        fmt_ln_real(lifted.ln_z),
        lifted.strategy,
        fmt_ln_real(ground.ln_z),
        fmt_real(dev),
        if ok { "PASS" } else { "FAIL" }
    );
    Ok((ok, text))
}

fn verify_corpus(seed: u64, count: usize, strategy: Strategy, cap: usize, tol: f64) -> Result<bool, Fail> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut models: Vec<(String, Model)> = Vec::new();
    for f in Family::ALL {
        models.push((f.to_string(), f.model(3)?));
    }
    for i in 0..count {
        models.push((format!("one-logvar-{i}"), random_one_logvar_model(&mut rng, 3, 4)?));
        models.push((format!("two-logvar-{i}"), random_two_logvar_model(&mut rng, 3)?));
    }
    let mut all = true;
    for (name, m) in &models {
        let (ok, _) = verify_one(m, &Query::partition(), strategy, cap, tol, false)?;
        println!("{name} {}", if ok { "PASS" } else { "FAIL" });
        all &= ok;
    }
    Ok(all)
}

fn bench(family: &str, sizes: &[usize], strategy: Strategy, cap: usize) -> Result<(), Fail> {
    let family: Family = family.parse().map_err(|e: Error| Fail(2, e.to_string()))?;
    println!("n,strategy,muladds,maxcells,ms");
    for &n in sizes {
        let m = family.model(n)?;
        let t0 = Instant::now();
        let a = marginal(&m, &Query::partition(), strategy, cap)?;
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        let name = if a.trace.fallback { format!("{}-fallback", a.strategy) } else { a.strategy.to_string() };
        println!("{n},{name},{},{},{ms:.3}", a.trace.muladds, a.trace.max_cells);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    let cap = cli.cap;
    match cli.command {
        Command::Infer { model, query, strategy, trace, precision, output } => {
            let (m, q) = load(&model, query.as_deref())?;
            let text = match precision {
                Precision::F64 => infer(&m, &q, strategy, cap, trace)?,
                Precision::F32 => infer(&m.cast::<f32>(), &q, strategy, cap, trace)?,
            };
            write_out(output.as_deref(), &text)
        }
        Command::Verify { model, query, strategy, tol, seed, corpus, perturb } => {
            let ok = match model {
                Some(path) => {
                    let (m, q) = load(&path, query.as_deref())?;
                    let (ok, text) = verify_one(&m, &q, strategy, cap, tol, perturb)?;
                    print!("{text}");
                    ok
                }
                None => verify_corpus(seed, corpus, strategy, cap, tol)?,
            };
            if ok {
                Ok(())
            } else {
                Err(Fail(1, "lifted and ground answers differ".into()))
            }
        }
        Command::Bench { family, sizes, strategy, seed: _ } => bench(&family, &sizes, strategy, cap),
        Command::ImportWmc { wmc, out, check, tol } => {
            let w = parse_wmc(&read(&wmc)?).map_err(|e| with_path(&wmc, e))?;
            let m: Model = import_wmc(&w)?;
            fs::write(&out, serialize_model(&m)).map_err(|e| Fail(1, format!("{}: {e}", out.display())))?;
            if let Some(n) = check {
                let ok = check_equivalence(&w, &m, n, tol, cap)?;
                println!("check n={n}: {}", if ok { "PASS" } else { "FAIL" });
                if !ok {
                    return Err(Fail(1, "imported model is not equivalent".into()));
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
