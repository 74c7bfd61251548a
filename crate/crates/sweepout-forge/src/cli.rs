//! Command-line front end: argument parsing, pipeline dispatch and report
//! emission. Exit codes: 0 success, 1 usage or input error, 2 when a
//! requested audit computes fine but an inequality clause fails.

use crate::decomp::build_decomposition;
use crate::filling::{fh_profile, theorem_bounds, ChainWeighting, FillingFunctionTable};
use crate::fillrad::{fillrad_estimate, inequality_audit, FiniteMetricSpace, SweepSurrogates};
use crate::homology::pseudo::check_pseudomanifold;
use crate::homology::ChainComplexData;
use crate::lattice::json::{read_complex, to_off};
use crate::rat::{parse_rat, rat, rat_int, rat_str, to_f64, Rat};
use crate::report::{digest_file, fiber_off, real12, RunReport};
use crate::sweepout::bundle::{build_bundle, fiber, homology_audit, waist_upper_bound, BuildOptions};
use crate::sweepout::input::FillingInput;
use crate::sweepout::starfish::{hexapodize, make_starfish};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "sweepout-forge", version, about = "cubical sweepouts, filling radius estimates and inequality audits")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Standard decomposition of the cube in dimension n+1 with profile p.
    Decompose {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        p: usize,
        /// Band half-width, a rational in (0, 1).
        #[arg(long, default_value = "1/2")]
        epsilon: String,
    },
    /// Pseudomanifold checks for a glued complex.
    Validate {
        /// complex.json document.
        #[arg(long)]
        input: PathBuf,
    },
    /// Build the sweepout bundle of a filling and measure its waist.
    Sweep {
        /// filling.json document (complex + metric + vertex images).
        #[arg(long)]
        input: PathBuf,
        /// "normal" or "strict" (reject charts with several boundary faces).
        #[arg(long, default_value = "normal")]
        mode: String,
        /// Directory receiving one OFF file per fiber plus the swept
        /// hypersurface.
        #[arg(long)]
        export_fibers: Option<PathBuf>,
    },
    /// Filling-radius estimate of a finite metric space.
    Fillrad {
        /// space.json document.
        #[arg(long)]
        metric: PathBuf,
        /// Fundamental degree; defaults to the space's metadata.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Homological filling function table of a complex.
    Fh {
        /// complex.json document.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Comma-separated rational volume thresholds, e.g. "1,2,7/2".
        #[arg(long)]
        grid: String,
    },
    /// Waist upper bounds from a filling radius and FH tables.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// complex.json supplying the FH tables.
        #[arg(long)]
        input: PathBuf,
        /// space.json supplying the filling radius.
        #[arg(long)]
        metric: PathBuf,
        /// Fundamental degree for the filling radius.
        #[arg(long)]
        degree: Option<usize>,
        /// Comma-separated rational thresholds for the FH tables.
        #[arg(long)]
        grid: String,
    },
    /// Build the starfish sphere, hexapodize it and audit both.
    Starfish {
        /// Tube radius (rational).
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// Vertices around each tube.
        #[arg(long, default_value = "6")]
        grid: usize,
        #[arg(long, default_value = "0.05")]
        tolerance: f64,
    },
    /// Inequality audit of a metric space, with sweepout surrogates from an
    /// optional filling input.
    Audit {
        /// space.json document.
        #[arg(long)]
        metric: PathBuf,
        /// Optional filling.json whose bundle supplies W/UW surrogates.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value = "1e-9")]
        tolerance: f64,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn add_digest(inputs: &mut BTreeMap<String, String>, path: &Path) -> Result<(), Failure> {
    inputs.insert(
        path.display().to_string(),
        digest_file(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?,
    );
    Ok(())
}

fn parse_grid(grid: &str) -> Result<Vec<Rat>, Failure> {
    grid.split(',')
        .map(|s| parse_rat(s.trim()).map_err(Failure))
        .collect()
}

fn resolve_degree(flag: Option<usize>, space: &FiniteMetricSpace) -> Result<usize, Failure> {
    flag.or(space.degree)
        .ok_or_else(|| Failure("no --degree given and the space carries no degree metadata".into()))
}

/// Runs one subcommand; Ok carries (results, exit code).
fn dispatch(cmd: &Cmd, inputs: &mut BTreeMap<String, String>) -> Result<(Value, i32), Failure> {
    match cmd {
        Cmd::Decompose { n, p, epsilon } => {
            let eps = parse_rat(epsilon).map_err(Failure)?;
            let ds = build_decomposition(*n, *p, eps)?;
            let y = ds.validate_y()?;
            Ok((
                json!({
                    "summary": ds.summary(),
                    "y_check": {
                        "pseudomanifold": y.pseudomanifold,
                        "boundary_in_cube_boundary": y.boundary_in_cube_boundary,
                    },
                }),
                0,
            ))
        }
        Cmd::Validate { input } => {
            add_digest(inputs, input)?;
            let gc = read_complex(input)?;
            let report = check_pseudomanifold(&gc)?;
            Ok((json!({ "pseudomanifold": report }), 0))
        }
        Cmd::Sweep {
            input,
            mode,
            export_fibers,
        } => {
            add_digest(inputs, input)?;
            let filling = FillingInput::from_json_str(&read_to_string(input)?)?;
            let options = match mode.as_str() {
                "normal" => BuildOptions::default(),
                "strict" => BuildOptions {
                    require_subdivided: true,
                },
                other => return Err(Failure(format!("unknown mode {other:?}"))),
            };
            let bundle = build_bundle(&filling, &options)?;
            let waist = waist_upper_bound(&bundle)?;
            let audit = homology_audit(&bundle)?;
            if let Some(dir) = export_fibers {
                std::fs::create_dir_all(dir)?;
                for (i, (tc, cell)) in bundle.t_cells().iter().enumerate() {
                    let rec = fiber(&bundle, *tc, cell)?;
                    std::fs::write(dir.join(format!("fiber_{i:05}.off")), fiber_off(&rec))?;
                }
                std::fs::write(dir.join("hypersurface.off"), to_off(&bundle.n_complex)?)?;
            }
            let ok = waist.within_bound && audit.homologous && audit.boundary_matches;
            Ok((
                json!({
                    "n": bundle.n,
                    "epsilon": rat_str(bundle.eps),
                    "delta": rat_str(bundle.delta),
                    "orientable": bundle.orientation.is_some(),
                    "waist": {
                        "value": rat_str(waist.waist),
                        "bound": rat_str(waist.bound),
                        "within_bound": waist.within_bound,
                        "fibers_checked": waist.fibers_checked,
                        "threads": waist.threads,
                    },
                    "homology": audit,
                }),
                if ok { 0 } else { 2 },
            ))
        }
        Cmd::Fillrad { metric, degree } => {
            add_digest(inputs, metric)?;
            let space = FiniteMetricSpace::from_json(&read_to_string(metric)?)?;
            let degree = resolve_degree(*degree, &space)?;
            let (_, est) = fillrad_estimate(&space, degree)?;
            Ok((json!({ "fillrad": est }), 0))
        }
        Cmd::Fh {
            input,
            degree,
            grid,
        } => {
            add_digest(inputs, input)?;
            let gc = read_complex(input)?;
            let data = ChainComplexData::from_glued(&gc)?;
            let weights = ChainWeighting::unit(&data);
            let table = fh_profile(&data, *degree, &parse_grid(grid)?, &weights)?;
            Ok((json!({ "fh_table": table }), 0))
        }
        Cmd::Bound {
            n,
            p,
            input,
            metric,
            degree,
            grid,
        } => {
            add_digest(inputs, input)?;
            add_digest(inputs, metric)?;
            let space = FiniteMetricSpace::from_json(&read_to_string(metric)?)?;
            let degree = resolve_degree(*degree, &space)?;
            let (fr, est) = fillrad_estimate(&space, degree)?;
            let gc = read_complex(input)?;
            let data = ChainComplexData::from_glued(&gc)?;
            let weights = ChainWeighting::unit(&data);
            let v_grid = parse_grid(grid)?;
            let mut tables: Vec<FillingFunctionTable> = Vec::new();
            for k in 1..*p {
                tables.push(fh_profile(&data, k, &v_grid, &weights)?);
            }
            let bounds = theorem_bounds(*n, *p, fr, &tables)?;
            Ok((json!({ "fillrad": est, "bounds": bounds }), 0))
        }
        Cmd::Starfish {
            epsilon,
            grid,
            tolerance,
        } => {
            let r = parse_rat(epsilon).map_err(Failure)?;
            let star = make_starfish(rat_int(1), r, *grid)?;
            let hex = hexapodize(&star)?;
            let surrogates = SweepSurrogates {
                w_upper: Some(to_f64(star.max_fiber_length)),
                uw_upper: Some(to_f64(star.max_fiber_diameter)),
            };
            let audit = inequality_audit(&star.space, 2, surrogates, *tolerance)?;
            let hex_ok =
                hex.all_cycles && hex.proxy_ok && hex.length_ratio <= 2.0 * (1.0 + tolerance);
            Ok((
                json!({
                    "starfish": {
                        "vertices": star.vertex_count,
                        "circumference": rat_str(star.circumference),
                        "max_ray_fiber": rat_str(star.max_ray_fiber),
                        "max_fiber_length": rat_str(star.max_fiber_length),
                        "max_fiber_diameter": rat_str(star.max_fiber_diameter),
                    },
                    "hexapod": {
                        "all_cycles": hex.all_cycles,
                        "center_arcs": hex.center_arcs,
                        "center_digons": hex.center_digons,
                        "length_ratio": real12(hex.length_ratio),
                        "symdiff_max": rat_str(hex.symdiff_max),
                        "symdiff_bound": rat_str(hex.symdiff_bound),
                        "proxy_ok": hex.proxy_ok,
                    },
                    "audit": audit,
                    "hexapod_ok": hex_ok,
                }),
                if hex_ok && audit.all_passed { 0 } else { 2 },
            ))
        }
        Cmd::Audit {
            metric,
            input,
            degree,
            tolerance,
        } => {
            add_digest(inputs, metric)?;
            let space = FiniteMetricSpace::from_json(&read_to_string(metric)?)?;
            let degree = resolve_degree(*degree, &space)?;
            let surrogates = match input {
                None => SweepSurrogates {
                    w_upper: None,
                    uw_upper: None,
                },
                Some(path) => {
                    add_digest(inputs, path)?;
                    let filling = FillingInput::from_json_str(&read_to_string(path)?)?;
                    let bundle = build_bundle(&filling, &BuildOptions::default())?;
                    let mut w = rat(0, 1);
                    let mut uw = rat(0, 1);
                    for (tc, cell) in bundle.t_cells() {
                        let rec = fiber(&bundle, tc, &cell)?;
                        w = w.max(rec.total);
                        uw = uw.max(bundle.fiber_image_diameter(&rec));
                    }
                    SweepSurrogates {
                        w_upper: Some(to_f64(w)),
                        uw_upper: Some(to_f64(uw)),
                    }
                }
            };
            let audit = inequality_audit(&space, degree, surrogates, *tolerance)?;
            let code = if audit.all_passed { 0 } else { 2 };
            Ok((json!({ "audit": audit }), code))
        }
    }
}

/// CLI entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = std::time::Instant::now();
    let mut inputs = BTreeMap::new();
    let name = match &cli.cmd {
        Cmd::Decompose { .. } => "decompose",
        Cmd::Validate { .. } => "validate",
        Cmd::Sweep { .. } => "sweep",
        Cmd::Fillrad { .. } => "fillrad",
        Cmd::Fh { .. } => "fh",
        Cmd::Bound { .. } => "bound",
        Cmd::Starfish { .. } => "starfish",
        Cmd::Audit { .. } => "audit",
    };
    match dispatch(&cli.cmd, &mut inputs) {
        Ok((results, code)) => {
            let mut report = RunReport::new(name, inputs, results);
            report.timing_ms = start.elapsed().as_millis();
            let doc = report.to_json();
            match &cli.report {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, doc) {
                        eprintln!("error: {}: {e}", path.display());
                        return 1;
                    }
                }
                None => println!("{doc}"),
            }
            code
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
