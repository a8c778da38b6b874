//! Command-line front end: compute maps, evaluate them, export grids, and
//! inspect map files.
//!
//! Process contract: exit 0 success, 2 invalid geometry, 3 convergence
//! failure, 4 I/O, schema, or usage problems.

use clap::{Parser, Subcommand, ValueEnum};
use plgcirmap::error::Error;
use plgcirmap::geometry::domain_from_json;
use plgcirmap::grids::{emit, map_polylines, polar_grid, rect_grid, MapDirection};
use plgcirmap::mapdata::{ConformalMap, EvalReport, Normalization};
use plgcirmap::{compute_map, RunConfig, C64};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "plgcirmap",
    about = "Conformal maps from polygonal multiply connected domains onto circular domains",
    long_about = "Computes the conformal map w = f(z) from a polygonal multiply connected \
domain onto a circular domain, together with the inverse map and first derivatives.\n\n\
Note: the direct O(N^2) build makes the default mesh (n = 512 per side) expensive for \
high connectivity; n between 32 and 128 already gives accurate results for most domains.",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Eq1,
    Eq2,
    Eq3,
    Eq4,
}

impl From<NormArg> for Normalization {
    fn from(v: NormArg) -> Self {
        match v {
            NormArg::Eq1 => Normalization::Eq1,
            NormArg::Eq2 => Normalization::Eq2,
            NormArg::Eq3 => Normalization::Eq3,
            NormArg::Eq4 => Normalization::Eq4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    Rec,
    Plr,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridSide {
    D,
    V,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a map from a domain JSON file and write a map JSON file.
    Map {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Nodes per polygon side (even, >= 4).
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// Corner-grading exponent.
        #[arg(long, default_value_t = 3)]
        grading_p: u32,
        #[arg(long, default_value_t = 0.5e-12)]
        gmres_tol: f64,
        #[arg(long, default_value_t = 100)]
        gmres_maxit: usize,
        #[arg(long, default_value_t = 1e-12)]
        koebe_tol: f64,
        #[arg(long, default_value_t = 100)]
        koebe_maxit: usize,
        /// Normalization condition; defaults to eq1 (bounded) or eq3
        /// (unbounded), switching to eq2/eq4 when a beta vertex is set.
        #[arg(long)]
        normalization: Option<NormArg>,
        /// Trusted-evaluation margin override.
        #[arg(long)]
        delta: Option<f64>,
        /// 1-based vertex of the last polygon to be mapped to 1.
        #[arg(long)]
        beta_vertex: Option<usize>,
    },
    /// Evaluate a stored map (or its derivative) at points from a CSV file.
    Eval {
        #[arg(long)]
        map: PathBuf,
        /// CSV file with one `x,y` pair per line.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Evaluate the first derivative as well.
        #[arg(long)]
        deriv: bool,
        /// Output CSV file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a coordinate grid on one side, map it, and emit SVG + JSONL.
    Grid {
        #[arg(long)]
        map: PathBuf,
        /// rec: rectangular grid (side d); plr: polar grid (side v).
        #[arg(long, value_enum)]
        kind: GridKind,
        /// d: polygonal domain; v: circular domain.
        #[arg(long, value_enum)]
        side: GridSide,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        /// SVG output stem; `_src`/`_img` suffixes are inserted.
        #[arg(long)]
        svg: PathBuf,
        /// JSONL output stem; `_src`/`_img` suffixes are inserted.
        #[arg(long)]
        data: PathBuf,
    },
    /// Print a summary of a stored map.
    Info {
        #[arg(long)]
        map: PathBuf,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::Schema(_)
        | Error::VersionMismatch { .. }
        | Error::BadMeshSize { .. } => 4,
        Error::GmresNoConvergence { .. }
        | Error::KoebeNoConvergence { .. }
        | Error::KoebeSubStep { .. }
        | Error::NotConverged => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("PLGCIR_THREADS") {
        if let Ok(threads) = v.trim().parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Map {
            input,
            output,
            n,
            grading_p,
            gmres_tol,
            gmres_maxit,
            koebe_tol,
            koebe_maxit,
            normalization,
            delta,
            beta_vertex,
        } => cmd_map(
            &input,
            &output,
            RunConfig {
                n,
                grading_p,
                gmres_tol,
                gmres_maxit,
                koebe_tol,
                koebe_maxit,
                normalization: normalization.map(Into::into),
                delta,
            },
            beta_vertex,
        ),
        Command::Eval {
            map,
            points,
            direction,
            deriv,
            output,
        } => cmd_eval(&map, &points, direction, deriv, output.as_deref()),
        Command::Grid {
            map,
            kind,
            side,
            n1,
            n2,
            svg,
            data,
        } => cmd_grid(&map, kind, side, n1, n2, &svg, &data),
        Command::Info { map, json } => cmd_info(&map, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn cmd_map(
    input: &Path,
    output: &Path,
    cfg: RunConfig,
    beta_vertex: Option<usize>,
) -> Result<(), Error> {
    let text = std::fs::read_to_string(input)?;
    let (mut domain, warnings) = domain_from_json(&text)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if let Some(k) = beta_vertex {
        let outer = domain.polygons.len() - 1;
        if k == 0 || k > domain.polygons[outer].len() {
            return Err(Error::BetaNotVertex { vertex: k });
        }
        domain.beta = Some(k - 1);
    }
    let map = compute_map(&domain, &cfg)?;
    map.save(output)?;
    let d = &map.diagnostics;
    let iters = &d.gmres_iterations;
    println!(
        "m={} normalization={} cycles={} max_deviation={:.3e} gmres_iters[min/mean/max]={}/{:.1}/{} im_h_residual={:.3e}",
        map.connectivity(),
        map.normalization.tag(),
        d.cycles,
        d.max_deviation,
        iters.iter().min().copied().unwrap_or(0),
        iters.iter().sum::<usize>() as f64 / iters.len().max(1) as f64,
        iters.iter().max().copied().unwrap_or(0),
        d.max_im_h_residual,
    );
    Ok(())
}

fn read_points(path: &Path) -> Result<Vec<C64>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let parse = |field: Option<&str>| {
            field
                .and_then(|f| f.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Schema(format!("bad point on line {}", lineno + 1)))
        };
        let x = parse(it.next())?;
        let y = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Schema(format!(
                "too many fields on line {}",
                lineno + 1
            )));
        }
        out.push(C64::new(x, y));
    }
    Ok(out)
}

fn cmd_eval(
    map_path: &Path,
    points_path: &Path,
    direction: Direction,
    deriv: bool,
    output: Option<&Path>,
) -> Result<(), Error> {
    let map = ConformalMap::load(map_path)?;
    let pts = read_points(points_path)?;
    let values: EvalReport = match direction {
        Direction::Forward => map.eval_forward(&pts),
        Direction::Inverse => map.eval_inverse(&pts),
    };
    let derivs: Option<EvalReport> = deriv.then(|| match direction {
        Direction::Forward => map.deriv_forward(&pts),
        Direction::Inverse => map.deriv_inverse(&pts),
    });
    let mut out = String::new();
    for (i, p) in pts.iter().enumerate() {
        let v = values.values[i];
        out.push_str(&format!("{},{},{},{}", p.re, p.im, v.re, v.im));
        if let Some(d) = &derivs {
            let dv = d.values[i];
            out.push_str(&format!(",{},{}", dv.re, dv.im));
        }
        out.push('\n');
    }
    match output {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }
    if !values.outside.is_empty() {
        eprintln!("{} point(s) outside the region", values.outside.len());
    }
    if !values.near_boundary.is_empty() {
        eprintln!(
            "{} point(s) within the near-boundary margin",
            values.near_boundary.len()
        );
    }
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let mut name = format!("{stem}{suffix}");
    if let Some(ext) = path.extension() {
        name.push('.');
        name.push_str(&ext.to_string_lossy());
    }
    path.with_file_name(name)
}

fn cmd_grid(
    map_path: &Path,
    kind: GridKind,
    side: GridSide,
    n1: usize,
    n2: usize,
    svg: &Path,
    data: &Path,
) -> Result<(), Error> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Schema("grid sizes n1, n2 must be positive".into()));
    }
    let map = ConformalMap::load(map_path)?;
    let (src, direction) = match (kind, side) {
        (GridKind::Rec, GridSide::D) => (rect_grid(&map.domain, n1, n2), MapDirection::Forward),
        (GridKind::Plr, GridSide::V) => (
            polar_grid(&map.circular_domain(), n1, n2),
            MapDirection::Inverse,
        ),
        _ => {
            return Err(Error::Schema(
                "unsupported grid: use --kind rec --side d or --kind plr --side v".into(),
            ))
        }
    };
    let (img, dropped) = map_polylines(&map, &src, direction);
    if dropped > 0 {
        eprintln!("{dropped} sample point(s) dropped during mapping");
    }
    emit(
        &[&src],
        &with_suffix(svg, "_src"),
        &with_suffix(data, "_src"),
    )?;
    emit(
        &[&img],
        &with_suffix(svg, "_img"),
        &with_suffix(data, "_img"),
    )?;
    Ok(())
}

fn cmd_info(map_path: &Path, json: bool) -> Result<(), Error> {
    let map = ConformalMap::load(map_path)?;
    let circ = map.circular_domain();
    let imgver = map.vertex_images();
    let d = &map.diagnostics;
    if json {
        let value = serde_json::json!({
            "m": map.connectivity(),
            "normalization": map.normalization.tag(),
            "bounded": map.domain.bounded,
            "cent": circ.centers.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "rad": circ.radii,
            "imgver": imgver
                .iter()
                .map(|vs| vs.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "cycles": d.cycles,
            "converged": d.converged,
            "max_deviation": d.max_deviation,
            "deviation_history": d.deviation_history,
            "gmres_iterations": d.gmres_iterations,
            "max_im_h_residual": d.max_im_h_residual,
        });
        println!("{value}");
        return Ok(());
    }
    println!("connectivity m = {}", map.connectivity());
    println!(
        "domain: {} with {} boundary component(s)",
        if map.domain.bounded {
            "bounded"
        } else {
            "unbounded"
        },
        map.domain.polygons.len()
    );
    println!("normalization: {}", map.normalization.tag());
    for (j, (c, r)) in circ.centers.iter().zip(&circ.radii).enumerate() {
        println!(
            "circle {}: center = {:+.15e} {:+.15e}i  radius = {:.15e}",
            j + 1,
            c.re,
            c.im,
            r
        );
    }
    for (j, vs) in imgver.iter().enumerate() {
        println!("component {} vertex images:", j + 1);
        for v in vs {
            println!("  {:+.15e} {:+.15e}i", v.re, v.im);
        }
    }
    let iters = &d.gmres_iterations;
    println!(
        "koebe cycles = {} (converged = {}), max circle deviation = {:.3e}",
        d.cycles, d.converged, d.max_deviation
    );
    println!(
        "gmres iterations: min {} / mean {:.1} / max {} over {} solves",
        iters.iter().min().copied().unwrap_or(0),
        iters.iter().sum::<usize>() as f64 / iters.len().max(1) as f64,
        iters.iter().max().copied().unwrap_or(0),
        iters.len()
    );
    println!("max |Im h| residual = {:.3e}", d.max_im_h_residual);
    Ok(())
}
