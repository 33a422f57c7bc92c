//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::dynamics::{
    cycle_orbit, find_cycle, hopf_scan, integrate, CycleOptions, DynamicsError, HopfOptions,
    HopfVerdict, Options,
};
use crate::output::{csv, num, palette, points_csv, trajectory_csv, Svg, Window};
use crate::system::{isoclines, EquationSpec, SpecDocument};
use crate::theorems::{
    check_existence_general, check_existence_poly, check_massera, check_nonexistence,
    combined_exit_code, TheoremReport,
};
use crate::transforms::{level_pullback, LienardImage};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NUMERIC: i32 = 65;

#[derive(Debug, Parser)]
#[command(
    name = "cyclescope",
    version,
    about = "Limit cycles of x'' + Σ f_l(x) x'^l = 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    T1,
    T2,
    T3,
    T4,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plane {
    /// `(x, x')`.
    Phase,
    /// `(x, x' + F_1(x))`, where the zero isoclines live.
    Lienard,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report which theorems apply, as JSON.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        theorem: TheoremArg,
    },
    /// Trajectories from seeds, with optional energy levels and isoclines.
    Portrait {
        #[arg(long)]
        spec: PathBuf,
        /// `x,y;x,y;...`
        #[arg(long)]
        seeds: String,
        /// `xmin,xmax,ymin,ymax`
        #[arg(long, default_value = "-3,3,-3,3", allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 50.0)]
        tmax: f64,
        /// Energy levels of the unperturbed system, `l1,l2,...`.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long, value_enum, default_value = "phase")]
        plane: Plane,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Locate a limit cycle from a bracket on the positive y-axis.
    Cycle {
        #[arg(long)]
        spec: PathBuf,
        /// `lo,hi`
        #[arg(long)]
        bracket: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero isoclines `y = F_1 ± sqrt(-g/f_2)` and `y = F_1` for n = 2.
    Isoclines {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "-3,3,-3,3", allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan a parameter and tabulate cycles and amplitudes as CSV.
    HopfScan {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "b-values", allow_hyphen_values = true)]
        b_values: String,
        #[arg(long, default_value = "b")]
        parameter: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn numeric(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_NUMERIC,
        message: message.into(),
    }
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(|c| c == ',' || c == ';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| usage(format!("bad number {t:?} in {what}")))
        })
        .collect()
}

pub fn parse_window(s: &str) -> Result<Window, Failure> {
    match floats(s, "--window")?[..] {
        [a, b, c, d] => Window::new(a, b, c, d).map_err(usage),
        _ => Err(usage("--window needs xmin,xmax,ymin,ymax")),
    }
}

pub fn parse_seeds(s: &str) -> Result<Vec<(f64, f64)>, Failure> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| match floats(t, "--seeds")?[..] {
            [x, y] => Ok((x, y)),
            _ => Err(usage(format!("seed {t:?} is not x,y"))),
        })
        .collect()
}

fn positive(v: f64, what: &str) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{what} must be positive, got {v}")))
    }
}

fn load(path: &Path) -> Result<EquationSpec, Failure> {
    EquationSpec::load(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| usage(format!("{}: {e}", p.display())))
}

pub fn reports(spec: &EquationSpec, which: TheoremArg) -> Result<Vec<TheoremReport>, Failure> {
    let t2 = || check_existence_general(spec).map_err(|e| usage(e.to_string()));
    let t3 = || {
        spec.quadruple()
            .map(check_existence_poly)
            .ok_or_else(|| usage("the spec has no [theorem3] quadruple"))
    };
    Ok(match which {
        TheoremArg::T1 => vec![check_nonexistence(spec)],
        TheoremArg::T2 => vec![t2()?],
        TheoremArg::T3 => vec![t3()?],
        TheoremArg::T4 => vec![check_massera(spec)],
        TheoremArg::All => {
            let mut v = vec![check_nonexistence(spec)];
            if spec.n() == 2 {
                v.push(t2()?);
            }
            if spec.quadruple().is_some() {
                v.push(t3()?);
            }
            v.push(check_massera(spec));
            v
        }
    })
}

fn cmd_check(
    spec: &Path,
    theorem: TheoremArg,
    out: &mut dyn std::io::Write,
) -> Result<i32, Failure> {
    let spec = load(spec)?;
    let r = reports(&spec, theorem)?;
    let json = serde_json::to_string_pretty(&r).expect("reports serialize");
    let _ = writeln!(out, "{json}");
    Ok(combined_exit_code(&r))
}

#[allow(clippy::too_many_arguments)]
fn cmd_portrait(
    spec: &Path,
    seeds: &str,
    window: &str,
    tol: f64,
    tmax: f64,
    levels: Option<&str>,
    plane: Plane,
    dir: &Path,
    out: &mut dyn std::io::Write,
) -> Result<i32, Failure> {
    let spec = load(spec)?;
    let seeds = parse_seeds(seeds)?;
    if seeds.is_empty() {
        return Err(usage("--seeds is empty"));
    }
    let w = parse_window(window)?;
    let opts = Options {
        tmax: positive(tmax, "--tmax")?,
        ..Options::with_tol(positive(tol, "--tol")?)
    };
    opts.validate().map_err(usage)?;
    let lambdas = match levels {
        Some(l) => floats(l, "--levels")?,
        None => Vec::new(),
    };
    let trajectories: Vec<_> = seeds
        .par_iter()
        .map(|&s| integrate(&spec, s, &opts))
        .collect::<Result<_, _>>()
        .map_err(|e| numeric(e.to_string()))?;

    let lift = |x: f64, v: f64| match plane {
        Plane::Phase => (x, v),
        Plane::Lienard => (x, v + spec.f1_primitive().eval(x)),
    };
    let mut svg = Svg::new(w);
    for (i, tr) in trajectories.iter().enumerate() {
        let name = format!("trajectory_{i}.csv");
        let text = match plane {
            Plane::Phase => trajectory_csv(tr),
            Plane::Lienard => csv(
                &[format!("termination: {}", tr.termination)],
                &["t", "x", "y"],
                tr.samples.iter().map(|s| {
                    let (x, y) = lift(s.x, s.y);
                    vec![s.t, x, y]
                }),
            ),
        };
        write(dir, &name, &text)?;
        let pts: Vec<(f64, f64)> = tr.samples.iter().map(|s| lift(s.x, s.y)).collect();
        svg.polyline(&pts, palette(i), 1.0);
        svg.dot(pts[0], palette(i));
        let _ = writeln!(out, "{name}: {}", tr.termination);
    }

    if !lambdas.is_empty() {
        let img = LienardImage::unperturbed(&spec).map_err(|e| usage(e.to_string()))?;
        let reach = w.xmin.abs().max(w.xmax.abs());
        for (k, &l) in lambdas.iter().enumerate() {
            let c = level_pullback(&img, l, 720, reach).map_err(|e| numeric(e.to_string()))?;
            let mut rows = Vec::new();
            for (p, piece) in c.pieces.iter().enumerate() {
                for &(x, v) in piece {
                    let (x, y) = lift(x, v);
                    rows.push(vec![p as f64, x, y]);
                }
                let pts: Vec<(f64, f64)> = piece.iter().map(|&(x, v)| lift(x, v)).collect();
                svg.polyline(&pts, "#555555", 0.7);
            }
            let name = format!("level_{k}.csv");
            let comment = format!("level {} ({})", num(l), c.tag());
            write(dir, &name, &csv(&[comment], &["piece", "x", "y"], rows))?;
            let _ = writeln!(out, "{name}: lambda = {l}, {}", c.tag());
        }
    }

    if plane == Plane::Lienard && spec.n() == 2 {
        let iso = isoclines(&spec, w.xmin, w.xmax).map_err(|e| usage(e.to_string()))?;
        for (k, b) in iso.branches.iter().enumerate() {
            let name = format!("isocline_{k}.csv");
            let comment = format!("branch {:?} on [{}, {}]", b.sign, b.domain.0, b.domain.1);
            write(dir, &name, &points_csv(&[comment], &b.samples))?;
            svg.polyline(&b.samples, "#8c564b", 1.0);
        }
        let inf: Vec<(f64, f64)> = (0..=400)
            .map(|i| {
                let x = w.xmin + (w.xmax - w.xmin) * i as f64 / 400.0;
                (x, spec.f1_primitive().eval(x))
            })
            .collect();
        write(
            dir,
            "infinity_isocline.csv",
            &points_csv(&["y = F1(x)".into()], &inf),
        )?;
        svg.polyline(&inf, "#7f7f7f", 1.0);
    }
    write(dir, "portrait.svg", &svg.finish())?;
    Ok(0)
}

fn cmd_cycle(
    spec: &Path,
    bracket: &str,
    tol: f64,
    dir: Option<&Path>,
    out: &mut dyn std::io::Write,
) -> Result<i32, Failure> {
    let spec = load(spec)?;
    let b = match floats(bracket, "--bracket")?[..] {
        [lo, hi] if 0.0 < lo && lo < hi => (lo, hi),
        _ => return Err(usage("--bracket needs 0 < lo < hi")),
    };
    let copts = CycleOptions {
        integrator: Options::with_tol(positive(tol, "--tol")?),
        ..CycleOptions::default()
    };
    let c = match find_cycle(&spec, b, &copts) {
        Ok(c) => c,
        Err(DynamicsError::Bracket { lo, hi, r_lo, r_hi }) => {
            return Err(numeric(format!(
                "no sign change of R(y) - y on [{lo}, {hi}]: R({lo}) - {lo} = {r_lo:e}, R({hi}) - {hi} = {r_hi:e}"
            )))
        }
        Err(e) => return Err(numeric(e.to_string())),
    };
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&c).expect("serialize")
    );
    if let Some(dir) = dir {
        let orbit =
            cycle_orbit(&spec, &c, 2048, &copts.integrator).map_err(|e| numeric(e.to_string()))?;
        let comment = format!(
            "cycle through (0, {}), period {}",
            num(c.y_star),
            num(c.period)
        );
        write(dir, "cycle.csv", &points_csv(&[comment], &orbit))?;
        let m = orbit
            .iter()
            .fold(0.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs()))
            * 1.2;
        let mut svg = Svg::new(Window::new(-m, m, -m, m).map_err(numeric)?);
        svg.polyline(&orbit, palette(1), 1.5);
        write(dir, "cycle.svg", &svg.finish())?;
    }
    Ok(0)
}

fn cmd_isoclines(
    spec: &Path,
    window: &str,
    dir: Option<&Path>,
    out: &mut dyn std::io::Write,
) -> Result<i32, Failure> {
    let spec = load(spec)?;
    let w = parse_window(window)?;
    let iso = isoclines(&spec, w.xmin, w.xmax).map_err(|e| usage(e.to_string()))?;
    let rows = iso.branches.iter().enumerate().flat_map(|(k, b)| {
        b.samples
            .iter()
            .map(move |&(x, y)| vec![k as f64, b.sign.factor(), x, y])
    });
    let text = csv(&[], &["branch", "sign", "x", "y"], rows);
    match dir {
        Some(dir) => {
            write(dir, "isoclines.csv", &text)?;
            let mut svg = Svg::new(w);
            for (k, b) in iso.branches.iter().enumerate() {
                svg.polyline(&b.samples, palette(k), 1.0);
            }
            write(dir, "isoclines.svg", &svg.finish())?;
        }
        None => {
            let _ = write!(out, "{text}");
        }
    }
    Ok(0)
}

fn cmd_hopf(
    spec: &Path,
    b_values: &str,
    parameter: &str,
    tol: f64,
    dir: Option<&Path>,
    out: &mut dyn std::io::Write,
) -> Result<i32, Failure> {
    let values = floats(b_values, "--b-values")?;
    if values.is_empty() {
        return Err(usage("--b-values is empty"));
    }
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(usage(format!("parameter values must be >= 0, got {v}")));
    }
    let text = fs::read_to_string(spec).map_err(|e| usage(format!("{}: {e}", spec.display())))?;
    let doc: SpecDocument =
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", spec.display())))?;
    let opts = HopfOptions {
        parameter: parameter.to_string(),
        cycle: CycleOptions {
            integrator: Options::with_tol(positive(tol, "--tol")?),
            ..CycleOptions::default()
        },
        ..HopfOptions::default()
    };
    let rows = hopf_scan(&doc, &values, &opts);
    let mut s = format!("{parameter},verdict,amplitude,y_star,multiplier,note\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), num);
    for r in &rows {
        let verdict = match r.verdict {
            HopfVerdict::NoCycle => "no-cycle",
            HopfVerdict::Cycle => "cycle",
            HopfVerdict::Failed => "failed",
        };
        s.push_str(&format!(
            "{},{verdict},{},{},{},\"{}\"\n",
            num(r.value),
            opt(r.amplitude),
            opt(r.y_star),
            opt(r.multiplier),
            r.note.replace('"', "'")
        ));
    }
    match dir {
        Some(dir) => write(dir, "hopf.csv", &s)?,
        None => {
            let _ = write!(out, "{s}");
        }
    }
    Ok(0)
}

/// Thread count from `CYCLESCOPE_THREADS`, if set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CYCLESCOPE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        usage(format!(
            "CYCLESCOPE_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    // A pool that already exists (e.g. in tests) is left alone.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn execute(cli: Cli, out: &mut dyn std::io::Write) -> Result<i32, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Check { spec, theorem } => cmd_check(&spec, theorem, out),
        Command::Portrait {
            spec,
            seeds,
            window,
            tol,
            tmax,
            levels,
            plane,
            out: dir,
        } => cmd_portrait(
            &spec,
            &seeds,
            &window,
            tol,
            tmax,
            levels.as_deref(),
            plane,
            &dir,
            out,
        ),
        Command::Cycle {
            spec,
            bracket,
            tol,
            out: dir,
        } => cmd_cycle(&spec, &bracket, tol, dir.as_deref(), out),
        Command::Isoclines {
            spec,
            window,
            out: dir,
        } => cmd_isoclines(&spec, &window, dir.as_deref(), out),
        Command::HopfScan {
            spec,
            b_values,
            parameter,
            tol,
            out: dir,
        } => cmd_hopf(&spec, &b_values, &parameter, tol, dir.as_deref(), out),
    }
}

/// Parse `args`, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
