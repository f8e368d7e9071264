use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use wlab::bounds::{BoundsInput, DEFAULT_ROTATION_SEED};
use wlab::config::Tolerances;
use wlab::error::{Error, Result};
use wlab::exact::Q;
use wlab::mesh::{build_mesh, export_mesh, MeshFormat, Projection, Region};
use wlab::report::{
    cmd_bounds, cmd_bounds_abstract, cmd_check, cmd_ramify, cmd_report, cmd_unicity, parse_point,
    InputDocument, ReportDocument,
};
use wlab::sphere::SpherePoint;

const AFTER_HELP: &str = "\
Expressions are rational functions of z: + - * / ^, parentheses, complex
literals such as 2, 0.5, 3i or (1+2i). `^` binds tighter than unary minus,
so -z^2 means -(z^2). Exponents are integers up to 64 in magnitude.

Exit codes: 0 pass, 1 usage, parse or I/O error, 2 mathematical failure.
WLAB_TOLERANCE_SCALE multiplies every tolerance before --tol overrides.";

#[derive(Parser)]
#[command(name = "wlab", version, about = "Weierstrass data analysis for minimal surfaces in R^4", after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Override a tolerance, e.g. `--tol eps_pt=1e-7` (repeatable).
    /// Keys: eps_pt, eps_res, eps_gcd, eps_period, eps_coeff, quad_rel.
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    tol: Vec<String>,
    /// Seed of the rotation normalization.
    #[arg(long, global = true, default_value_t = DEFAULT_ROTATION_SEED)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Conformality, regularity and period conditions, and the ends.
    Check { file: PathBuf },
    /// Exceptional and totally ramified values of the Gauss map components.
    Ramify {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        component: Option<u8>,
    },
    /// Bounds on the totally ramified value numbers.
    Bounds(BoundsArgs),
    /// Shared values of two Gauss maps on the same domain.
    Unicity { a: PathBuf, b: PathBuf },
    /// Sample the immersion on a grid and export it.
    Mesh(MeshArgs),
    /// Everything: check, both components, bounds and total curvature.
    Report { file: PathBuf },
}

#[derive(Args)]
struct BoundsArgs {
    /// Weierstrass data file.
    #[arg(
        required_unless_present = "abstract_values",
        conflicts_with = "abstract_values"
    )]
    file: Option<PathBuf>,
    /// Abstract mode: G k d1 d2 nu1 nu2 (nu as integers or fractions like 5/2).
    #[arg(long = "abstract", num_args = 6, value_names = ["G", "K", "D1", "D2", "NU1", "NU2"])]
    abstract_values: Option<Vec<String>>,
    /// Pole orders of h dz at the punctures, comma separated.
    #[arg(long, value_delimiter = ',', requires = "abstract_values")]
    mu: Option<Vec<i64>>,
    /// Exceptional value counts of g1 and g2 for the plane criterion.
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 1,
        requires = "abstract_values"
    )]
    r0: Option<Vec<usize>>,
    /// Treat the abstract surface as algebraic.
    #[arg(long, requires = "abstract_values")]
    algebraic: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Obj,
}

#[derive(Args)]
struct MeshArgs {
    /// Weierstrass data file
    file: PathBuf,
    /// `rect:RE0,RE1,IM0,IM1` or `annulus:CX,CY,R0,R1[,THETA0,THETA1]`.
    #[arg(long)]
    region: String,
    /// Vertices per side, `N` or `NUxNV`.
    #[arg(long, default_value = "33")]
    res: String,
    /// Base point where the immersion vanishes.
    #[arg(long, default_value = "0")]
    base: String,
    /// Mesh file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// OBJ projection: three 1-based coordinates `1,2,3`, or twelve matrix
    /// entries (row-major, orthonormal rows).
    #[arg(long, default_value = "1,2,3")]
    project: String,
    /// Exclusion radius around punctures and poles; default 1e-3 x region diameter.
    #[arg(long)]
    exclusion: Option<f64>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidData(msg.into())
}

fn tolerances(overrides: &[String]) -> Result<Tolerances> {
    let mut t = Tolerances::from_env();
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| usage(format!("--tol expects KEY=VALUE, got {o:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad tolerance value {value:?}")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(usage(format!("tolerance {key} must be positive")));
        }
        let slot = match key.trim() {
            "eps_pt" => &mut t.eps_pt,
            "eps_res" => &mut t.eps_res,
            "eps_gcd" => &mut t.eps_gcd,
            "eps_period" => &mut t.eps_period,
            "eps_coeff" => &mut t.eps_coeff,
            "quad_rel" => &mut t.quad_rel,
            other => return Err(usage(format!("unknown tolerance {other:?}"))),
        };
        *slot = v;
    }
    Ok(t)
}

fn parse_ratio(s: &str) -> Result<Q> {
    let bad = || usage(format!("expected an integer or fraction, got {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
        None => Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad number {x:?}")))
        })
        .collect()
}

fn parse_region(s: &str) -> Result<Region> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| usage("region must be rect:... or annulus:..."))?;
    let v = parse_floats(rest)?;
    match (kind, v.as_slice()) {
        ("rect", &[re0, re1, im0, im1]) => Ok(Region::Rectangle { re0, re1, im0, im1 }),
        ("annulus", &[cx, cy, r0, r1]) => Ok(Region::Annulus {
            center: [cx, cy],
            r0,
            r1,
            theta0: 0.0,
            theta1: std::f64::consts::TAU,
        }),
        ("annulus", &[cx, cy, r0, r1, theta0, theta1]) => Ok(Region::Annulus {
            center: [cx, cy],
            r0,
            r1,
            theta0,
            theta1,
        }),
        _ => Err(usage(format!("cannot read region {s:?}"))),
    }
}

fn parse_resolution(s: &str) -> Result<[usize; 2]> {
    let bad = || usage(format!("bad resolution {s:?}"));
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once('x') {
        Some((a, b)) => Ok([parse(a)?, parse(b)?]),
        None => {
            let n = parse(s)?;
            Ok([n, n])
        }
    }
}

fn parse_projection(s: &str) -> Result<Projection> {
    let v = parse_floats(s)?;
    let p = match v.len() {
        3 => {
            let idx = v.iter().map(|&x| {
                if x.fract() == 0.0 && (1.0..=4.0).contains(&x) {
                    Ok(x as usize - 1)
                } else {
                    Err(usage(format!("projection coordinates are 1..4, got {x}")))
                }
            });
            let idx = idx.collect::<Result<Vec<_>>>()?;
            Projection::Coordinates([idx[0], idx[1], idx[2]])
        }
        12 => Projection::Matrix(std::array::from_fn(|r| {
            std::array::from_fn(|c| v[4 * r + c])
        })),
        _ => return Err(usage("projection needs 3 coordinates or 12 matrix entries")),
    };
    p.validate()?;
    Ok(p)
}

fn load(path: &Path) -> Result<InputDocument> {
    InputDocument::load(path).map_err(|e| match e {
        Error::Io(io) => usage(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn emit(doc: &ReportDocument, output: Option<&Path>) -> Result<()> {
    let text = doc.to_json();
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_mesh(args: &MeshArgs, tol: &Tolerances) -> Result<i32> {
    let input = load(&args.file)?;
    let d = input.to_data(tol)?;
    let region = parse_region(&args.region)?;
    let resolution = parse_resolution(&args.res)?;
    let projection = parse_projection(&args.project)?;
    let z0 = match parse_point(&args.base)? {
        SpherePoint::Finite(z) => z,
        SpherePoint::Infinity => return Err(usage("the base point must be finite")),
    };
    let mesh = build_mesh(&d, region, resolution, z0, args.exclusion, tol)?;
    let format = match args.format {
        FormatArg::Csv => MeshFormat::Csv,
        FormatArg::Obj => MeshFormat::Obj,
    };
    let mut out = BufWriter::new(File::create(&args.out)?);
    export_mesh(&mesh, format, &projection, &mut out)?;
    out.flush()?;
    eprintln!(
        "wrote {} vertices and {} faces to {}",
        mesh.included_count(),
        mesh.faces.len(),
        args.out.display()
    );
    if mesh.universal_cover_patch {
        eprintln!("warning: periods do not close; the patch lives on the universal cover");
    }
    if !mesh.path_independent {
        eprintln!(
            "warning: integration paths disagree by {:.3e}",
            mesh.path_discrepancy
        );
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<i32> {
    let tol = tolerances(&cli.global.tol)?;
    let seed = cli.global.seed;
    let doc = match &cli.command {
        Command::Check { file } => cmd_check(&load(file)?, &tol, seed)?,
        Command::Ramify { file, component } => cmd_ramify(&load(file)?, *component, &tol, seed)?,
        Command::Bounds(b) => match (&b.file, &b.abstract_values) {
            (Some(file), _) => cmd_bounds(&load(file)?, &tol, seed)?,
            (None, Some(v)) => {
                let int = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| usage(format!("expected a nonnegative integer, got {s:?}")))
                };
                let r0 = match b.r0.as_deref() {
                    None => None,
                    Some([a, b]) => Some((*a, *b)),
                    Some(_) => return Err(usage("--r0 takes two counts")),
                };
                let input = BoundsInput {
                    genus: int(&v[0])? as u32,
                    k: int(&v[1])?,
                    d1: int(&v[2])?,
                    d2: int(&v[3])?,
                    nu1: Some(parse_ratio(&v[4])?),
                    nu2: Some(parse_ratio(&v[5])?),
                    r0,
                    mu: b.mu.clone(),
                    algebraic: b.algebraic,
                };
                cmd_bounds_abstract(&input, &tol, seed)?
            }
            (None, None) => return Err(usage("bounds needs a file or --abstract")),
        },
        Command::Unicity { a, b } => cmd_unicity(&load(a)?, &load(b)?, &tol, seed)?,
        Command::Report { file } => cmd_report(&load(file)?, &tol, seed)?,
        Command::Mesh(m) => return run_mesh(m, &tol),
    };
    emit(&doc, cli.global.output.as_deref())?;
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    for f in &doc.failures {
        eprintln!("failed: {f}");
    }
    Ok(doc.exit_code())
}

fn report_error(e: &Error) {
    eprintln!("error: {e}");
    if let Error::Field { text, source, .. } = e {
        eprintln!("  {text}");
        eprintln!("  {}^", " ".repeat(source.position().min(text.len())));
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            report_error(&e);
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
