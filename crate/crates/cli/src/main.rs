//! `stabplane`: command-line front end.
//!
//! Exit codes: 0 ok, 1 internal invariant breach, 2 invalid input,
//! 3 honest uncertainty.

mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stabplane::error::Error;
use stabplane::exceptional::{make_triple, tree, BundleCache, DyadicLabel, TripleShape};
use stabplane::gldim::{gldim_algebraic, gldim_geometric, scan_grid, scan_to_csv, GldimCase};
use stabplane::lepotier::LPApprox;
use stabplane::numk::CharVector;
use stabplane::rat::{parse_rat, parse_rat_list, Rat};
use stabplane::stability::{find_region, AlgebraicSC, GeometricSC, MZTag};
use stabplane::verify;
use stabplane::walls::wall;

#[derive(Parser, Debug)]
#[command(name = "stabplane", version, about = "Global dimension on Stab(P^2)")]
struct Cli {
    /// Bundle cache to seed the exceptional tree from.
    #[arg(long, global = true, env = "STABPLANE_CACHE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate gldim at a geometric point or on an algebraic chart.
    Gldim(GldimArgs),
    /// List exceptional bundles with slope in a window.
    Exc(ExcArgs),
    /// Locate a point in the MZ decomposition.
    Region(PointArgs),
    /// Dump the Le Potier curve approximation as CSV.
    Lepotier(WindowArgs),
    /// Clip the wall of a character through a point.
    Wall(WallArgs),
    /// Evaluate gldim on a grid and print CSV.
    Scan(ScanArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
    /// Render an SVG figure.
    Plot(PlotArgs),
}

#[derive(clap::Args, Debug)]
struct GldimArgs {
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Center label of the triple, e.g. `0` or `3/4`.
    #[arg(long, allow_hyphen_values = true)]
    triple: Option<String>,
    #[arg(long, default_value = "consecutive")]
    shape: String,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Algebraic chart as JSON, instead of the separate flags.
    #[arg(long)]
    json: Option<String>,
    #[arg(long, default_value_t = 6)]
    depth: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args, Debug)]
struct ExcArgs {
    #[arg(long, default_value = "-1,2", allow_hyphen_values = true)]
    window: String,
    #[arg(long, default_value_t = 6)]
    depth: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the memo for labels in [0, 1) at this depth to a file.
    #[arg(long)]
    save_cache: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    #[arg(long, default_value_t = 6)]
    depth: u32,
}

#[derive(clap::Args, Debug)]
struct WindowArgs {
    #[arg(long, default_value = "-1,2", allow_hyphen_values = true)]
    window: String,
    #[arg(long, default_value_t = 6)]
    depth: u32,
}

#[derive(clap::Args, Debug)]
struct WallArgs {
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Character `ch0,ch1,ch2`.
    #[arg(long, allow_hyphen_values = true)]
    ch: String,
    #[arg(long, default_value_t = 6)]
    depth: u32,
}

#[derive(clap::Args, Debug)]
struct ScanArgs {
    /// Shorthand `s0,s1,q0,q1`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q_range: Option<String>,
    /// Points per axis, `n` or `ns,nq`.
    #[arg(long, default_value = "21")]
    res: String,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 6)]
    depth: u32,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
}

#[derive(clap::Args, Debug)]
pub struct PlotArgs {
    #[arg(long, default_value = "-1.6,1.6", allow_hyphen_values = true)]
    pub window: String,
    /// Vertical range; derived from the window when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub q_range: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    #[arg(long, value_enum)]
    pub overlay: Vec<plot::Overlay>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub triple: String,
    #[arg(long, default_value = "consecutive")]
    pub shape: String,
    /// Heat cells per axis for the gldim overlay.
    #[arg(long, default_value_t = 40)]
    pub res: usize,
    /// Extra wall to draw: `s,q,ch0,ch1,ch2`.
    #[arg(long, allow_hyphen_values = true)]
    pub wall: Vec<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn uncertain(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateSystem(_) | Error::InconsistentLegs => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("stabplane: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    if let Some(path) = &cli.cache {
        if path.exists() {
            let cache = BundleCache::load(path)?;
            tree().load_cache(&cache)?;
        }
    }
    match cli.cmd {
        Cmd::Gldim(a) => cmd_gldim(a),
        Cmd::Exc(a) => cmd_exc(a),
        Cmd::Region(a) => cmd_region(a),
        Cmd::Lepotier(a) => cmd_lepotier(a),
        Cmd::Wall(a) => cmd_wall(a),
        Cmd::Scan(a) => cmd_scan(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Plot(a) => plot::cmd_plot(a),
    }
}

pub fn pair(text: &str, what: &str) -> Result<(Rat, Rat), Failure> {
    let v = parse_rat_list(text)?;
    match <[Rat; 2]>::try_from(v) {
        Ok([a, b]) if a < b => Ok((a, b)),
        _ => Err(Failure::usage(format!("{what} needs two increasing values"))),
    }
}

fn floats3(text: &str, what: &str) -> Result<[f64; 3], Failure> {
    let v: Vec<f64> = text
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("{what}: expected three numbers")))?;
    <[f64; 3]>::try_from(v).map_err(|_| Failure::usage(format!("{what}: expected three numbers")))
}

pub fn parse_triple(center: &str, shape: &str) -> Result<stabplane::exceptional::ExceptionalTriple, Failure> {
    let center = DyadicLabel::parse(center)?;
    let shape = TripleShape::parse(shape)?;
    Ok(make_triple(center, shape)?)
}

fn cmd_gldim(a: GldimArgs) -> CmdResult {
    let result = match (&a.s, &a.q, &a.triple, &a.json) {
        (Some(s), Some(q), None, None) => {
            let sigma = GeometricSC::unchecked(parse_rat(s)?, parse_rat(q)?);
            gldim_geometric(&sigma, a.depth)?
        }
        (None, None, Some(center), None) => {
            let m = floats3(a.m.as_deref().unwrap_or("1,1,1"), "--m")?;
            let phi = a
                .phi
                .as_deref()
                .ok_or_else(|| Failure::usage("--triple needs --phi"))?;
            let sigma = AlgebraicSC::new(parse_triple(center, &a.shape)?, m, floats3(phi, "--phi")?)?;
            gldim_algebraic(&sigma)?
        }
        (None, None, None, Some(json)) => gldim_algebraic(&AlgebraicSC::from_json(json)?)?,
        _ => return Err(Failure::usage("give either --s and --q, --triple, or --json")),
    };
    println!("{result}");
    if result.case == GldimCase::Uncertain {
        return Err(Failure::uncertain(""));
    }
    Ok(())
}

fn cmd_exc(a: ExcArgs) -> CmdResult {
    let (lo, hi) = pair(&a.window, "--window")?;
    let bundles: Vec<_> = tree()
        .generate_window(&lo, &hi, a.depth)
        .into_iter()
        .filter(|e| {
            let s = e.slope();
            lo <= s && s <= hi
        })
        .collect();
    match a.format {
        Format::Text => {
            for e in &bundles {
                let ch = serde_json::to_string(&e.ch).expect("serializable");
                println!("{e}\t{ch}");
            }
        }
        Format::Json => {
            let rows: Vec<_> = bundles
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "label": e.label.to_string(),
                        "rank": e.rank().to_string(),
                        "slope": e.slope().to_string(),
                        "ch": e.ch,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("serializable"));
        }
    }
    if let Some(path) = a.save_cache {
        tree().to_cache(a.depth).save(&path)?;
    }
    Ok(())
}

fn cmd_region(a: PointArgs) -> CmdResult {
    let p = stabplane::plane::PlanePoint::rational(parse_rat(&a.s)?, parse_rat(&a.q)?);
    let (tag, triple) = find_region(&p, a.depth)?;
    match &triple {
        Some(t) => println!("{tag}\ttriple={} {}", t.center, t.shape.name()),
        None => println!("{tag}"),
    }
    if tag == MZTag::Uncertain {
        return Err(Failure::uncertain(""));
    }
    Ok(())
}

fn cmd_lepotier(a: WindowArgs) -> CmdResult {
    let window = pair(&a.window, "--window")?;
    print!("{}", LPApprox::build(window, a.depth).to_csv()?);
    Ok(())
}

fn cmd_wall(a: WallArgs) -> CmdResult {
    let s = parse_rat(&a.s)?;
    let q = parse_rat(&a.q)?;
    let v = CharVector::parse(&a.ch)?;
    let sigma = GeometricSC::new(s.clone(), q, a.depth)?;
    let n = stabplane::rat::floor_int(&s);
    let n = Rat::from_integer(n);
    let window = (&n - Rat::from_integer(3.into()), &n + Rat::from_integer(4.into()));
    let approx = LPApprox::build(window, a.depth);
    let w = wall(&sigma, &v, &approx)?;
    let (a0, b0, c0) = w.line.coefficients();
    println!("line\t{a0}*s + {b0}*q + {c0} = 0");
    for (label, p, end) in [("start", &w.clipped.0, w.ends.0), ("end", &w.clipped.1, w.ends.1)] {
        println!(
            "{label}\t{}\t{}\t{end:?}\t{}\t{}",
            p.s.to_decimal(12),
            p.q.to_decimal(12),
            p.s.exact_triple(),
            p.q.exact_triple()
        );
    }
    println!("depth\t{}", w.depth);
    Ok(())
}

fn cmd_scan(a: ScanArgs) -> CmdResult {
    let (s_range, q_range) = match (&a.grid, &a.s_range, &a.q_range) {
        (Some(g), None, None) => {
            let v = parse_rat_list(g)?;
            if v.len() != 4 || v[0] >= v[1] || v[2] >= v[3] {
                return Err(Failure::usage("--grid needs s0,s1,q0,q1 with s0<s1, q0<q1"));
            }
            ((v[0].clone(), v[1].clone()), (v[2].clone(), v[3].clone()))
        }
        (None, Some(s), Some(q)) => (pair(s, "--s-range")?, pair(q, "--q-range")?),
        _ => return Err(Failure::usage("give --grid or both --s-range and --q-range")),
    };
    let res: Vec<usize> = a
        .res
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage("--res takes n or ns,nq"))?;
    let res = match res[..] {
        [n] => (n, n),
        [ns, nq] => (ns, nq),
        _ => return Err(Failure::usage("--res takes n or ns,nq")),
    };
    let rows = scan_grid(
        (&s_range.0, &s_range.1),
        (&q_range.0, &q_range.1),
        res,
        a.depth,
        a.jobs,
    )?;
    print!("{}", scan_to_csv(&rows));
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let reports = verify::run(&a.suite)?;
    let mut failed = 0;
    for r in &reports {
        println!("{r}");
        for f in r.failures.iter().take(5) {
            println!("    {f}");
        }
        failed += r.failures.len();
    }
    let checks: usize = reports.iter().map(|r| r.checks).sum();
    println!("total        checks={checks} failures={failed}");
    if failed > 0 {
        return Err(Failure {
            code: 1,
            message: format!("{failed} invariant checks failed"),
        });
    }
    Ok(())
}
