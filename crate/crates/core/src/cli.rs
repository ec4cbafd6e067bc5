//! The `helfrich` command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::annulus::{flux_drift, integrate_annulus, noncmc_violation};
use crate::conformal::gauss_map_norm_identity;
use crate::energy::{energy, lower_bound};
use crate::error::{Error, Result};
use crate::io::config::{parse_intervals, AnnulusConfig, RunConfig};
use crate::io::csv::{annulus_csv, profile_csv, read_profile};
use crate::io::record::{build_record, timestamp_now, ResultRecord};
use crate::io::svg::render_silhouette;
use crate::io::{fmt17, to_json};
use crate::run::{solve, solve_all, Outcome};
use crate::stability::{f_ddot_finite_difference, f_ddot_general, f_dot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_SOLUTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "helfrich", version, about = "Critical discs of the Euler-Helfrich energy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// output directory (render: output file)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// worker threads for table and sweep; defaults to the number of logical cores
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// boundary residual tolerance, overrides the config
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// z_o bracket as lo:hi[,lo:hi...], overrides the config
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub bracket: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one configuration and write its JSON record and profile CSV
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve every *.conf file of a directory and compare with the reference values
    Table {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-solve a base configuration over a grid of one parameter
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// one of a, c_o, b, alpha, beta
        #[arg(long)]
        axis: String,
        /// comma-separated values
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Integrate an annulus with prescribed flux
    Annulus {
        #[arg(long)]
        config: PathBuf,
    },
    /// Draw the silhouette of a profile CSV as SVG
    Render {
        /// profile CSV
        #[arg(long)]
        config: PathBuf,
    },
    /// Validate a configuration and report the identity checks of its selected disc
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    NoSolution(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::NoSolution(_) => EXIT_NO_SOLUTION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::NoSolution(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoRoot | Error::NoEvent { .. } | Error::NoZeroCrossing => Failure::NoSolution(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<String, Failure>;

/// Runs a parsed command line and returns the exit code. Normal output goes to
/// stdout, diagnostics to stderr.
pub fn run(cli: Cli) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Solve { config } => cmd_solve(config, g),
        Command::Table { config } => cmd_table(config, g),
        Command::Sweep { config, axis, grid } => cmd_sweep(config, axis, grid, g),
        Command::Annulus { config } => cmd_annulus(config, g),
        Command::Render { config } => cmd_render(config, g),
        Command::Check { config } => cmd_check(config, g),
    }
}

fn load_run_config(path: &Path, g: &Global) -> std::result::Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    apply_overrides(&mut cfg, g)?;
    Ok(cfg)
}

fn apply_overrides(cfg: &mut RunConfig, g: &Global) -> std::result::Result<(), Failure> {
    if let Some(t) = g.tol {
        if !(t > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
        }
        cfg.shoot.tol = t;
    }
    if let Some(b) = &g.bracket {
        cfg.bracket_intervals = Some(parse_intervals(b).map_err(|m| Failure::Usage(format!("--bracket: {m}")))?);
        cfg.bracket().validate().map_err(|e| Failure::Usage(format!("--bracket: {e}")))?;
    }
    Ok(())
}

fn out_dir(g: &Global) -> std::result::Result<PathBuf, Failure> {
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into())
}

fn root_line(out: &mut String, rec: &ResultRecord, i: usize) {
    let r = &rec.roots[i];
    let e = r.energy.as_ref().map_or("n/a".to_string(), |e| format!("{:.4}", e.total));
    let mark = if rec.selected == Some(i) { '*' } else { ' ' };
    let _ = writeln!(
        out,
        "{mark} z_o {:>12.6}  L {:>9.5}  r {:>8.5}  E {:>9}  k {}  {}{}",
        r.z_o,
        r.length,
        r.radius,
        e,
        r.event_index,
        r.case.name(),
        if r.embedded { "" } else { "  (self-intersecting)" }
    );
}

fn cmd_solve(path: &Path, g: &Global) -> CmdResult {
    let cfg = load_run_config(path, g)?;
    let dir = out_dir(g)?;
    let outcome = solve(&cfg)?;
    if outcome.is_empty() && outcome.cmc.is_empty() {
        return Err(Failure::NoSolution(format!("{}: no root in the bracket", path.display())));
    }
    let rec = build_record(&cfg, &outcome, timestamp_now());
    let name = stem(path);
    let json = cfg.outputs.record_json.clone().unwrap_or_else(|| format!("{name}.json"));
    write(&dir.join(&json), &to_json(&rec))?;
    let mut out = String::new();
    let _ = writeln!(out, "{} roots for {} ({})", rec.roots.len(), if cfg.label.is_empty() { &name } else { &cfg.label }, cfg.case.name());
    for i in 0..rec.roots.len() {
        root_line(&mut out, &rec, i);
    }
    for c in &rec.cmc {
        let _ = writeln!(out, "  closed form {:?}: r {:.5}  E {:.4}", c.kind, c.radius, c.energy);
    }
    if let Some(sol) = outcome.selected_root() {
        let csv = cfg.outputs.profile_csv.clone().unwrap_or_else(|| format!("{name}.csv"));
        write(&dir.join(&csv), &profile_csv(&sol.trajectory))?;
    }
    Ok(out)
}

fn conf_files(dir: &Path) -> std::result::Result<Vec<PathBuf>, Failure> {
    let rd = fs::read_dir(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> =
        rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "conf")).collect();
    files.sort();
    Ok(files)
}

/// One row of a table run.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub name: String,
    /// `None` when the file did not parse
    pub config: Option<RunConfig>,
    pub radius: Option<f64>,
    pub energy: Option<f64>,
    pub e_d: f64,
    pub matched: Option<bool>,
    pub error: Option<String>,
}

const TABLE_HEADER: &str = "name,case,a,c_o,b,alpha,beta,radius,energy,e_d,reference_radius,reference_energy,d_radius,d_energy,match";

fn table_csv_row(r: &TableRow) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), fmt17);
    let p = |f: fn(&RunConfig) -> f64| opt(r.config.as_ref().map(f));
    let re = r.config.as_ref().and_then(|c| c.reference);
    let d = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => fmt17(x - y),
        _ => String::new(),
    };
    [
        r.name.clone(),
        r.config.as_ref().map_or("", |c| c.case.name()).to_string(),
        p(|c| c.params.a),
        p(|c| c.params.c_o),
        p(|c| c.params.b),
        p(|c| c.params.alpha),
        p(|c| c.params.beta),
        opt(r.radius),
        opt(r.energy),
        fmt17(r.e_d),
        opt(re.map(|x| x.radius)),
        opt(re.map(|x| x.energy)),
        d(r.radius, re.map(|x| x.radius)),
        d(r.energy, re.map(|x| x.energy)),
        r.matched.map_or(String::new(), |m| m.to_string()),
    ]
    .join(",")
}

/// Solves all configurations of a directory; rows keep file-name order.
pub fn table_rows(dir: &Path, g: &Global) -> std::result::Result<Vec<TableRow>, Failure> {
    let files = conf_files(dir)?;
    let mut cfgs = Vec::new();
    let mut rows: Vec<Option<TableRow>> = Vec::new();
    for f in &files {
        match load_run_config(f, g) {
            Ok(c) => {
                cfgs.push(c);
                rows.push(None);
            }
            Err(e) => {
                log::warn!("{}: {}", f.display(), e.message());
                rows.push(Some(TableRow {
                    name: stem(f),
                    config: None,
                    radius: None,
                    energy: None,
                    e_d: f64::NAN,
                    matched: None,
                    error: Some(e.message().to_string()),
                }))
            }
        }
    }
    let mut results = solve_all(&cfgs).into_iter().zip(cfgs);
    let names: Vec<String> = files.iter().map(|f| stem(f)).collect();
    Ok(rows
        .into_iter()
        .zip(names)
        .map(|(row, name)| {
            row.unwrap_or_else(|| {
                let (res, cfg) = results.next().expect("one result per parsed config");
                table_row(name, cfg, res)
            })
        })
        .collect())
}

fn table_row(name: String, cfg: RunConfig, res: Result<Outcome>) -> TableRow {
    let e_d = lower_bound(&cfg.params).e_d;
    let reference = cfg.reference;
    let mut row = TableRow { name, radius: None, energy: None, e_d, matched: None, error: None, config: Some(cfg) };
    match res {
        Ok(o) => match (o.selected_root(), o.selected_ranked()) {
            (Some(sol), Some(rk)) => {
                row.radius = Some(sol.radius());
                row.energy = rk.energy.as_ref().map(|e| e.total);
                row.matched = reference.map(|re| row.energy.is_some_and(|e| re.matches(sol.radius(), e)));
            }
            _ => row.error = Some("no root".into()),
        },
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn cmd_table(dir: &Path, g: &Global) -> CmdResult {
    let rows = table_rows(dir, g)?;
    if rows.is_empty() {
        return Err(Failure::NoSolution(format!("{}: no .conf files", dir.display())));
    }
    let out_d = out_dir(g)?;
    let mut csv = format!("{TABLE_HEADER}\n");
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<24} {:<16} {:>6} {:>6} {:>6} {:>6} {:>6} {:>8} {:>9} {:>8} {:>7} {:>7}  match",
        "name", "case", "a", "c_o", "b", "alpha", "beta", "radius", "energy", "E_D", "ref r", "ref E"
    );
    for r in &rows {
        csv.push_str(&table_csv_row(r));
        csv.push('\n');
        let f = |v: Option<f64>, w: usize, d: usize| v.map_or(format!("{:>w$}", "-"), |x| format!("{x:>w$.d$}"));
        let p = |g: fn(&RunConfig) -> f64| r.config.as_ref().map_or("-".to_string(), |c| g(c).to_string());
        let re = r.config.as_ref().and_then(|c| c.reference);
        let _ = writeln!(
            text,
            "{:<24} {:<16} {:>6} {:>6} {:>6} {:>6} {:>6} {} {} {:>8.2} {} {}  {}",
            r.name,
            r.config.as_ref().map_or("-", |c| c.case.name()),
            p(|c| c.params.a),
            p(|c| c.params.c_o),
            p(|c| c.params.b),
            p(|c| c.params.alpha),
            p(|c| c.params.beta),
            f(r.radius, 8, 4),
            f(r.energy, 9, 3),
            r.e_d,
            f(re.map(|x| x.radius), 7, 2),
            f(re.map(|x| x.energy), 7, 2),
            match (&r.error, r.matched) {
                (Some(e), _) => format!("error: {e}"),
                (None, Some(true)) => "yes".into(),
                (None, Some(false)) => "NO".into(),
                (None, None) => "".into(),
            }
        );
    }
    write(&out_d.join("table.csv"), &csv)?;
    if rows.iter().all(|r| r.error.is_some()) {
        eprint!("{text}");
        return Err(Failure::NoSolution("no row produced a solution".into()));
    }
    Ok(text)
}

fn set_axis(cfg: &mut RunConfig, axis: &str, v: f64) -> std::result::Result<(), Failure> {
    let p = &mut cfg.params;
    match axis {
        "a" => p.a = v,
        "c_o" => p.c_o = v,
        "b" => p.b = v,
        "alpha" => p.alpha = v,
        "beta" => p.beta = v,
        _ => return Err(Failure::Usage(format!("unknown sweep axis '{axis}', expected a, c_o, b, alpha or beta"))),
    }
    Ok(())
}

/// One sweep point: the axis value and the selected root, if any.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub z_o: Option<f64>,
    pub length: Option<f64>,
    pub radius: Option<f64>,
    pub energy: Option<f64>,
    pub status: String,
}

pub fn sweep_points(base: &RunConfig, axis: &str, grid: &[f64]) -> std::result::Result<Vec<SweepPoint>, Failure> {
    let mut cfgs = Vec::new();
    for &v in grid {
        let mut c = base.clone();
        set_axis(&mut c, axis, v)?;
        // a reference belongs to one parameter set only
        c.reference = None;
        if c.select == crate::select::SelectRule::Nearest {
            c.select = crate::select::SelectRule::Principal;
        }
        cfgs.push(c);
    }
    Ok(solve_all(&cfgs)
        .into_iter()
        .zip(grid)
        .map(|(res, &value)| {
            let mut pt = SweepPoint { value, z_o: None, length: None, radius: None, energy: None, status: String::new() };
            match res {
                Ok(o) => match (o.selected_root(), o.selected_ranked()) {
                    (Some(s), Some(rk)) => {
                        pt.z_o = Some(s.z_o);
                        pt.length = Some(s.length);
                        pt.radius = Some(s.radius());
                        pt.energy = rk.energy.as_ref().map(|e| e.total);
                        pt.status = "ok".into();
                    }
                    _ => pt.status = "no_root".into(),
                },
                Err(Error::NoRoot) => pt.status = "no_root".into(),
                Err(e) => pt.status = format!("error: {e}"),
            }
            pt
        })
        .collect())
}

fn cmd_sweep(path: &Path, axis: &str, grid: &str, g: &Global) -> CmdResult {
    let base = load_run_config(path, g)?;
    let values: Vec<f64> = grid
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("--grid: bad value '{}'", s.trim()))))
        .collect::<std::result::Result<_, _>>()?;
    let pts = sweep_points(&base, axis, &values)?;
    let dir = out_dir(g)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), fmt17);
    let mut csv = format!("{axis},z_o,L,radius,energy,status\n");
    let mut text = String::new();
    for p in &pts {
        let _ = writeln!(csv, "{},{},{},{},{},{}", fmt17(p.value), opt(p.z_o), opt(p.length), opt(p.radius), opt(p.energy), p.status);
        let _ = writeln!(
            text,
            "{axis} = {:<8} r = {:<10} E = {:<10} {}",
            p.value,
            p.radius.map_or("-".into(), |v| format!("{v:.5}")),
            p.energy.map_or("-".into(), |v| format!("{v:.4}")),
            p.status
        );
    }
    write(&dir.join(format!("sweep_{axis}.csv")), &csv)?;
    if pts.iter().all(|p| p.radius.is_none()) {
        eprint!("{text}");
        return Err(Failure::NoSolution("no grid point produced a solution".into()));
    }
    Ok(text)
}

fn cmd_annulus(path: &Path, g: &Global) -> CmdResult {
    let cfg = AnnulusConfig::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let traj = integrate_annulus(&cfg.init, cfg.a_bar, &cfg.params, &cfg.integrator, &cfg.stop)?;
    let dir = out_dir(g)?;
    let name = cfg.profile_csv.clone().unwrap_or_else(|| format!("{}.csv", stem(path)));
    write(&dir.join(name), &annulus_csv(&traj))?;
    Ok(format!(
        "stopped: {:?} at sigma = {:.6}\nflux drift {:.3e}\nmax |(H + c_o) z + cos(phi)| {:.3e}\n",
        traj.event,
        traj.end_sigma(),
        flux_drift(&traj),
        noncmc_violation(&traj)
    ))
}

fn cmd_render(path: &Path, g: &Global) -> CmdResult {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let pts = read_profile(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let svg = render_silhouette(&pts)?;
    match &g.out {
        Some(o) => {
            write(o, &svg)?;
            Ok(String::new())
        }
        None => Ok(svg),
    }
}

fn cmd_check(path: &Path, g: &Global) -> CmdResult {
    let cfg = load_run_config(path, g)?;
    let mut out = format!("{}: config ok ({}, selection {})\n", path.display(), cfg.case.name(), cfg.select.name());
    let outcome = solve(&cfg)?;
    let Some(sol) = outcome.selected_root() else {
        return Err(Failure::NoSolution(format!("{}: no root in the bracket", path.display())));
    };
    let e = energy(sol)?;
    let noncmc = sol.trajectory.samples.iter().map(|s| s.noncmc_residual(&sol.params).abs()).fold(0.0, f64::max);
    let fdd = f_ddot_general(sol);
    let fd = f_ddot_finite_difference(sol, 1e-3 * sol.length)?;
    let conformal = gauss_map_norm_identity(sol);
    let mut line = |name: &str, value: f64, limit: f64| {
        let _ = writeln!(out, "{:<4} {name:<34} {value:>12.3e}  (< {limit:e})", if value.abs() < limit { "ok" } else { "FAIL" });
    };
    line("(H + c_o) z + cos(phi)", noncmc, 1e-7);
    line("Gauss-Bonnet", e.gauss_bonnet_residual, 1e-7);
    line("flux", e.flux_max, 1e-7);
    line("rescaling", e.rescaling_residual, 1e-6);
    line("first variation f'(0)", f_dot(sol), 1e-7);
    line("f''(0) vs finite difference (rel)", (fdd - fd).abs() / fdd.abs().max(1e-300), 1e-3);
    line("|dY|^2 identity", conformal.max_residual, 1e-4);
    let _ = writeln!(out, "selected root: z_o {:.9}, L {:.9}, r {:.9}, E {:.9}", sol.z_o, sol.length, sol.radius(), e.total);
    Ok(out)
}
