use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use plonka::classify::{classify, ProbeConfig};
use plonka::iso::{describe_map, iso_map, ladder_shift_equiv, signature_mismatch};
use plonka::laws::{self, Sampler};
use plonka::rational;
use plonka::spec::{ladder_to_window, SpecFile};
use plonka::{
    fixtures, AlgebraHandle, BlockKind, EaterSpec, Error, GapTag, LadderSpec, LocateMode, NumericOp, Param, Point,
    PointDist,
};

/// Monotone, one-sidedly continuous convex algebras on [0,1].
#[derive(Parser)]
#[command(name = "plonka", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a spec or ladder file.
    Validate { file: PathBuf },
    /// Evaluate x ⊕_p y.
    Eval {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        p: String,
    },
    /// Barycenter of a distribution file.
    Bary {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        dist: PathBuf,
    },
    /// Recover the eater set and gap tags; writes a spec file.
    Classify {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long, default_value_t = 64)]
        grid: u32,
        #[arg(long, default_value_t = 30)]
        depth: u32,
        #[arg(long, default_value_t = 1e3)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide isomorphy of two specs.
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Print Φ of a point of the first algebra.
        #[arg(long)]
        map_point: Option<String>,
        /// Where to write the description of Φ (default: stdout).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run the sampled law suites; exits 1 on any failure.
    Laws {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 40)]
        depth: u32,
        /// Samples for the (LC-bar) probe.
        #[arg(long, default_value_t = 100)]
        lc_bar_samples: usize,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Sample the path t ↦ y ⊕_t x as CSV.
    Path {
        #[command(flatten)]
        alg: AlgArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 100)]
        steps: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a ladder and write its finite window as a spec file.
    Ladder {
        #[arg(long)]
        r: String,
        /// Index window `lo..hi`.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value = "1")]
        left: String,
        #[arg(long, default_value = "1")]
        right: String,
        /// Exception `n=1` or `n=inf`; repeatable.
        #[arg(long = "exception", allow_hyphen_values = true)]
        exceptions: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the ladder description itself.
        #[arg(long)]
        ladder_out: Option<PathBuf>,
    },
    /// Decide shift equivalence of two ladder files.
    Shift { a: PathBuf, b: PathBuf },
}

#[derive(Args)]
struct AlgArg {
    /// `linear|max|cap|exp`, `numeric:<block>`, `fixture:<name>`,
    /// `probe:<spec-file>`, or a spec / ladder file (`file@lo..hi` for a ladder window).
    algebra: String,
    /// Accept ambient points inside ∞-gaps, approximating their offset.
    #[arg(long)]
    allow_approx: bool,
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| fail(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_window(s: &str) -> Result<(i64, i64), Error> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| fail(format!("window must be lo..hi, got {s:?}")))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| fail(format!("bad window bound {t:?}")));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(fail(format!("empty window {s:?}")));
    }
    Ok((lo, hi))
}

impl AlgArg {
    fn mode(&self) -> LocateMode {
        if self.allow_approx {
            LocateMode::AllowApprox
        } else {
            LocateMode::ExactOnly
        }
    }

    fn handle(&self) -> Result<AlgebraHandle, Error> {
        let a = self.algebra.as_str();
        if let Ok(kind) = a.parse::<BlockKind>() {
            return Ok(AlgebraHandle::Block(kind));
        }
        if let Some(name) = a.strip_prefix("fixture:") {
            return fixtures::by_name(name)
                .ok_or_else(|| fail(format!("unknown fixture {name:?} ({})", fixtures::NAMES.join("|"))));
        }
        if let Some(kind) = a.strip_prefix("numeric:") {
            return Ok(AlgebraHandle::Numeric(NumericOp::from_block(kind.parse()?)));
        }
        if let Some(file) = a.strip_prefix("probe:") {
            let spec = EaterSpec::from_json(&read(Path::new(file))?)?;
            return Ok(AlgebraHandle::Numeric(NumericOp::probe(spec)));
        }
        let (file, window) = match a.rsplit_once('@') {
            Some((f, w)) => (f, Some(parse_window(w)?)),
            None => (a, None),
        };
        match SpecFile::parse(&read(Path::new(file))?)? {
            SpecFile::Eater(spec) => Ok(AlgebraHandle::structured(spec)),
            SpecFile::Ladder(l) => {
                let (lo, hi) = window.unwrap_or((0, 3));
                AlgebraHandle::ladder(l, lo, hi)
            }
        }
    }

    fn point(&self, alg: &AlgebraHandle, text: &str) -> Result<Point, Error> {
        match alg.plonka() {
            Some(p) => {
                let located = p.parse_point(text, self.mode())?;
                if located.approximate {
                    eprintln!("note: {text} lies in an ∞-gap; offset approximated as {}", located.point);
                }
                Ok(Point::Structured(located.point))
            }
            None => alg.point(&rational::parse(text)?, self.mode()),
        }
    }
}

fn ambient(p: &Point) -> String {
    match p {
        Point::Structured(s) => match s.embed_exact() {
            Some(q) => format!("{p}\tambient {}", rational::display(&q)),
            None => format!("{p}\tambient ≈ {}", s.embed()),
        },
        _ => p.to_string(),
    }
}

fn parse_param(s: &str) -> Result<Param, Error> {
    Param::new(rational::parse(s)?)
}

fn eval(alg: &AlgArg, x: &str, y: &str, p: &str) -> Result<ExitCode, Error> {
    let h = alg.handle()?;
    let r = h.combine(&alg.point(&h, x)?, &alg.point(&h, y)?, &parse_param(p)?)?;
    println!("{}", ambient(&r));
    Ok(ExitCode::SUCCESS)
}

fn bary(alg: &AlgArg, dist: &Path) -> Result<ExitCode, Error> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct DistFile {
        weights: BTreeMap<String, String>,
        points: BTreeMap<String, String>,
    }
    let h = alg.handle()?;
    let file: DistFile = serde_json::from_str(&read(dist)?)?;
    let entries = file
        .weights
        .iter()
        .map(|(label, w)| {
            let pt = file.points.get(label).ok_or_else(|| fail(format!("no point for label {label:?}")))?;
            Ok((alg.point(&h, pt)?, rational::parse(w)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    println!("{}", ambient(&h.barycenter(&PointDist::new(entries)?)?));
    Ok(ExitCode::SUCCESS)
}

fn run_classify(alg: &AlgArg, cfg: ProbeConfig, out: Option<&Path>) -> Result<ExitCode, Error> {
    let c = classify(&alg.handle()?, &cfg)?;
    write_or_print(out, &format!("{}\n", c.spec.to_json()))?;
    eprintln!("provenance: {}", c.provenance);
    Ok(ExitCode::SUCCESS)
}

fn load_spec(path: &Path) -> Result<EaterSpec, Error> {
    EaterSpec::from_json(&read(path)?)
}

fn iso(a: &Path, b: &Path, map_point: Option<&str>, witness: Option<&Path>) -> Result<ExitCode, Error> {
    let (sa, sb) = (load_spec(a)?, load_spec(b)?);
    if let Some(m) = signature_mismatch(&sa, &sb) {
        println!("not isomorphic (signature mismatch at position {}: {} vs {})", m.position, m.left, m.right);
        return Ok(ExitCode::SUCCESS);
    }
    println!("isomorphic (witness emitted)");
    write_or_print(witness, &describe_map(&sa, &sb)?)?;
    if let Some(text) = map_point {
        let alg = plonka::build(sa.clone());
        let located = alg.parse_point(text, LocateMode::ExactOnly)?;
        println!("Φ({}) = {}", located.point, ambient(&Point::Structured(iso_map(&sa, &sb, &located.point)?)));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_laws(alg: &AlgArg, seed: u64, samples: usize, depth: u32, lc_bar: usize) -> Result<ExitCode, Error> {
    let h = alg.handle()?;
    let s = Sampler::new(seed, samples);
    let mut reports = laws::run_core_suites(&h, &s, depth);
    reports.push(laws::check_lc_bar_sampled(&h, &Sampler::new(seed, lc_bar), depth));
    if h.plonka().is_some() {
        reports.push(laws::check_structure(&h, &s));
    }
    reports.push(laws::check_kernel_eats(&h, &s));
    println!("algebra: {}  seed: {seed}  depth: {depth}", h.name());
    for r in &reports {
        println!("{r}");
    }
    Ok(if reports.iter().all(|r| r.passed()) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn path(alg: &AlgArg, x: &str, y: &str, steps: u32, out: Option<&Path>) -> Result<ExitCode, Error> {
    if steps == 0 {
        return Err(fail("--steps must be positive"));
    }
    let h = alg.handle()?;
    let (px, py) = (alg.point(&h, x)?, alg.point(&h, y)?);
    let mut csv = String::from("t,value\n");
    for i in 0..=steps {
        let t = rational::ratio(i as i64, steps as i64);
        let v = h.gamma(&px, &py, &Param::new(t.clone())?)?;
        csv.push_str(&format!("{},{}\n", rational::to_f64(&t), v.to_f64()));
    }
    write_or_print(out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_exception(s: &str) -> Result<(i64, GapTag), Error> {
    let (n, t) = s.split_once('=').ok_or_else(|| fail(format!("exception must be n=tag, got {s:?}")))?;
    let n = n.trim().parse().map_err(|_| fail(format!("bad exception index {n:?}")))?;
    Ok((n, GapTag::parse(t.trim())?))
}

#[allow(clippy::too_many_arguments)]
fn ladder(
    r: &str,
    window: &str,
    left: &str,
    right: &str,
    exceptions: &[String],
    out: Option<&Path>,
    ladder_out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let l = LadderSpec::new(
        rational::parse(r)?,
        GapTag::parse(left)?,
        GapTag::parse(right)?,
        exceptions.iter().map(|e| parse_exception(e)).collect::<Result<Vec<_>, _>>()?,
    )?;
    let (lo, hi) = parse_window(window)?;
    let spec = ladder_to_window(&l, lo, hi)?;
    if let Some(p) = ladder_out {
        fs::write(p, format!("{}\n", l.to_json())).map_err(|e| fail(format!("{}: {e}", p.display())))?;
    }
    write_or_print(out, &format!("{}\n", spec.to_json()))?;
    eprintln!("{spec}");
    Ok(ExitCode::SUCCESS)
}

fn shift(a: &Path, b: &Path) -> Result<ExitCode, Error> {
    let (la, lb) = (LadderSpec::from_json(&read(a)?)?, LadderSpec::from_json(&read(b)?)?);
    match ladder_shift_equiv(&la, &lb) {
        Some(s) if s.periodic => println!("shift m = 0 (constant sequences: isomorphic for every m)"),
        Some(s) => println!("shift m = {}", s.m),
        None => println!("not shift-equivalent"),
    }
    if la.r != lb.r {
        println!("note: ratios differ; decided on the order-isomorphic eater skeletons alone");
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Validate { file } => {
            match SpecFile::parse(&read(&file)?)? {
                SpecFile::Eater(s) => println!("valid: {s}"),
                SpecFile::Ladder(l) => println!(
                    "valid ladder: r = {}, σ = {} (n < 0) / {} (n ≥ 0), {} exception(s)",
                    rational::display(&l.r),
                    l.left,
                    l.right,
                    l.exceptions.len()
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { alg, x, y, p } => eval(&alg, &x, &y, &p),
        Command::Bary { alg, dist } => bary(&alg, &dist),
        Command::Classify { alg, grid, depth, threshold, out } => {
            let cfg = ProbeConfig { grid, depth, threshold, ..ProbeConfig::default() };
            run_classify(&alg, cfg, out.as_deref())
        }
        Command::Iso { a, b, map_point, witness } => iso(&a, &b, map_point.as_deref(), witness.as_deref()),
        Command::Laws { alg, seed, samples, depth, lc_bar_samples, jobs } => {
            if let Some(j) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build_global()
                    .map_err(|e| fail(e.to_string()))?;
            }
            run_laws(&alg, seed, samples, depth, lc_bar_samples)
        }
        Command::Path { alg, x, y, steps, out } => path(&alg, &x, &y, steps, out.as_deref()),
        Command::Ladder { r, window, left, right, exceptions, out, ladder_out } => {
            ladder(&r, &window, &left, &right, &exceptions, out.as_deref(), ladder_out.as_deref())
        }
        Command::Shift { a, b } => shift(&a, &b),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

