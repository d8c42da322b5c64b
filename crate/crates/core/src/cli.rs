//! Command-line front end shared by the `femwarp` binary and tests.
//!
//! Exit codes: 0 on success, 2 when a warp finished with reversed
//! elements, 1 on any usage, parse or runtime error. Errors are printed to
//! the error stream as a single `CODE: message` line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analytic::{annulus_coeffs, annulus_min_jac_det, type1_cutoff, type1_margin, type1_predicate, AnnulusSpec};
use crate::error::{Error, Result};
use crate::generators::{annulus_resolution, gen_annulus, gen_rectangle, gen_rectangle_jittered};
use crate::io::spec::parse_angle;
use crate::io::{
    param_max, read_mesh_base, run_sweep, to_csv, write_mesh_base, Algorithm, DeformationSpec, ParamGrid,
};

#[derive(Debug, Parser)]
#[command(name = "femwarp", version, about = "Warp, untangle and inspect simplicial meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Warp a mesh as described by a spec file and write the result.
    Warp {
        /// Mesh base name (reads <base>.node and <base>.ele).
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Output base name.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a spec over a grid of motion parameters and emit CSV.
    Sweep {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Inclusive grid a:b:step.
        #[arg(long)]
        param_grid: String,
        /// Overrides the spec's algorithm.
        #[arg(long)]
        algorithm: Option<String>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print quality statistics of a mesh.
    Quality {
        #[arg(long)]
        mesh: PathBuf,
    },
    /// Closed-form reference solutions.
    #[command(subcommand)]
    Oracle(Oracle),
    /// Write a structured mesh.
    #[command(subcommand)]
    Genmesh(Genmesh),
}

#[derive(Debug, Subcommand)]
enum Oracle {
    /// Laplace map of the annulus: coefficients, orientation predicate and
    /// minimum Jacobian determinant. Angles in radians or with a `deg`
    /// suffix.
    Annulus {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
    },
}

#[derive(Debug, Args)]
struct AnnulusArgs {
    /// Inner radius (the outer radius is 1).
    #[arg(long)]
    r: f64,
    /// Target longest edge; sets rings and sectors unless given.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    rings: Option<usize>,
    #[arg(long)]
    sectors: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RectangleArgs {
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    #[arg(long, default_value_t = 1.0)]
    height: f64,
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    ny: usize,
    /// Random interior displacement in cell widths, below 0.25.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Genmesh {
    Annulus(AnnulusArgs),
    Rectangle(RectangleArgs),
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
                    let _ = writeln!(err, "USAGE: {first}");
                    1
                }
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}: {}", e.code(), e.to_string().replace('\n', " "));
            1
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("-"),
        msg: e.to_string(),
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Warp { mesh, spec, out: base } => {
            let m = read_mesh_base(&mesh)?;
            let spec = DeformationSpec::read(&spec)?;
            let res = spec.run(&m)?;
            write_mesh_base(&res.mesh, &base)?;
            writeln!(out, "algorithm = {}", spec.algorithm).map_err(io_err)?;
            writeln!(out, "scheme = {}", spec.scheme).map_err(io_err)?;
            if let Some(k) = res.failed_frame {
                writeln!(out, "failed_frame = {k}").map_err(io_err)?;
            }
            write!(out, "{}", res.report).map_err(io_err)?;
            Ok(if res.report.is_success() { 0 } else { 2 })
        }
        Command::Sweep {
            mesh,
            spec,
            param_grid,
            algorithm,
            out: csv_path,
        } => {
            let m = read_mesh_base(&mesh)?;
            let mut spec = DeformationSpec::read(&spec)?;
            if let Some(a) = algorithm {
                spec.algorithm = a.parse::<Algorithm>()?;
            }
            let grid = ParamGrid::parse(&param_grid)?;
            let rows = run_sweep(&m, &spec, &grid.values())?;
            let csv = to_csv(&rows, grid.decimals);
            let name = spec.sweep_parameter().unwrap_or("param");
            let best = param_max(&rows);
            let mut summary = format!("algorithm = {}\nparameter = {name}\n", spec.algorithm);
            match best {
                Some(r) => summary.push_str(&format!(
                    "param_max = {:.*}\nn_factorizations_at_max = {}\n",
                    grid.decimals, r.param, r.n_factorizations
                )),
                None => summary.push_str("param_max = none\n"),
            }
            match csv_path {
                Some(p) => {
                    std::fs::write(&p, csv).map_err(|e| Error::Io {
                        path: p.clone(),
                        msg: e.to_string(),
                    })?;
                    write!(out, "{summary}").map_err(io_err)?;
                }
                None => {
                    write!(out, "{csv}").map_err(io_err)?;
                    write!(err, "{summary}").map_err(io_err)?;
                }
            }
            Ok(0)
        }
        Command::Quality { mesh } => {
            let m = read_mesh_base(&mesh)?;
            writeln!(out, "n_nodes = {}", m.n_nodes()).map_err(io_err)?;
            writeln!(out, "dim = {}", m.dim()).map_err(io_err)?;
            write!(out, "{}", m.quality()).map_err(io_err)?;
            Ok(0)
        }
        Command::Oracle(Oracle::Annulus { r, s, theta }) => {
            let theta = parse_angle("theta", &theta)?;
            let spec = AnnulusSpec::new(r, s.unwrap_or(r), theta)?;
            let c = annulus_coeffs(&spec)?;
            writeln!(out, "a = {:e}\nb = {:e}\nc = {:e}\nd = {:e}", c.a, c.b, c.c, c.d).map_err(io_err)?;
            writeln!(out, "type1_predicate = {}", type1_predicate(&spec)).map_err(io_err)?;
            writeln!(out, "type1_margin = {:e}", type1_margin(&spec)).map_err(io_err)?;
            match type1_cutoff(spec.r, spec.s) {
                Some(t) => writeln!(out, "cutoff_deg = {:.4}", t.to_degrees()),
                None => writeln!(out, "cutoff_deg = none"),
            }
            .map_err(io_err)?;
            writeln!(out, "min_jac_det = {:e}", annulus_min_jac_det(&spec)?).map_err(io_err)?;
            Ok(0)
        }
        Command::Genmesh(g) => {
            let (m, base) = match g {
                Genmesh::Annulus(a) => {
                    let (rings, sectors) = match (a.h, a.rings, a.sectors) {
                        (_, Some(k), Some(n)) => (k, n),
                        (Some(h), k, n) => {
                            let (dk, dn) = annulus_resolution(a.r, h);
                            (k.unwrap_or(dk), n.unwrap_or(dn))
                        }
                        _ => {
                            return Err(Error::InvalidSpec(
                                "annulus needs --h or both --rings and --sectors".into(),
                            ))
                        }
                    };
                    (gen_annulus(a.r, rings, sectors)?, a.out)
                }
                Genmesh::Rectangle(a) => {
                    let m = if a.jitter > 0.0 {
                        gen_rectangle_jittered(a.width, a.height, a.nx, a.ny, a.jitter, a.seed)?
                    } else {
                        gen_rectangle(a.width, a.height, a.nx, a.ny)?
                    };
                    (m, a.out)
                }
            };
            write_mesh_base(&m, &base)?;
            writeln!(out, "n_nodes = {}\nn_elements = {}\nh = {:e}", m.n_nodes(), m.n_elements(), m.max_edge_length())
                .map_err(io_err)?;
            Ok(0)
        }
    }
}
