use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use curveflow::harness::{self, output, parse_real, presets, ExperimentConfig, OutputFormat};
use curveflow::{Error, Result};

#[derive(Parser)]
#[command(
    name = "curveflow",
    version,
    about = "Finite element curve shortening flow and curve diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a single curve and write per-step diagnostics (and frames).
    Evolve(CommonArgs),
    /// Manufactured-solution error table over a doubling sequence of J with dt = 1/J.
    Converge(CommonArgs),
    /// Fixed J, a list of time steps: temporal error decay and spatial plateau.
    RefineDt(CommonArgs),
    /// Run a named preset: csf-pc, csf-first-order, cd-pc, cd-first-order, nonconvex, rings.
    Table {
        preset: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Flat `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// csf | cd
    #[arg(long)]
    flow: Option<String>,
    /// first_order | predictor_corrector (or fo | pc)
    #[arg(long)]
    scheme: Option<String>,
    /// Number of elements; a comma separated list for `converge`.
    #[arg(long = "J")]
    j: Option<String>,
    /// Time step; a comma separated list for `refine-dt`. Accepts `2^-k`.
    #[arg(long)]
    dt: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    t: Option<String>,
    /// circle | circle(R) | nonconvex | interlocked_rings | manufactured
    #[arg(long)]
    curve: Option<String>,
    /// Add the manufactured forcing (requires the manufactured curve).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    forced: Option<String>,
    /// Perturbation amplitude of the manufactured solutions.
    #[arg(long)]
    delta: Option<String>,
    /// Output directory; results go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Write a frame every this many steps (0 disables).
    #[arg(long)]
    frame_stride: Option<String>,
}

/// Scalar settings plus the raw `J` and `dt` strings, which some subcommands read as lists.
struct Resolved {
    cfg: ExperimentConfig,
    js: Option<Vec<usize>>,
    dts: Option<Vec<f64>>,
}

fn parse_list<T>(raw: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    raw.split(',')
        .map(|s| f(s.trim()).ok_or_else(|| Error::Config(format!("bad {what} entry '{s}'"))))
        .collect()
}

fn resolve(args: &CommonArgs, base: ExperimentConfig) -> Result<Resolved> {
    let mut cfg = base;
    let mut raw_j = None;
    let mut raw_dt = None;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            match line.split_once('=') {
                Some((k, v)) if k.trim() == "J" => raw_j = Some(v.trim().to_string()),
                Some((k, v)) if k.trim() == "dt" => raw_dt = Some(v.trim().to_string()),
                _ => {}
            }
        }
        let filtered: String = text
            .lines()
            .filter(|l| {
                let key = l.split('=').next().unwrap_or("").trim();
                key != "J" && key != "dt"
            })
            .map(|l| format!("{l}\n"))
            .collect();
        cfg.apply_text(&filtered)?;
    }
    let flags = [
        ("flow", &args.flow),
        ("scheme", &args.scheme),
        ("T", &args.t),
        ("curve", &args.curve),
        ("forced", &args.forced),
        ("delta", &args.delta),
        ("format", &args.format),
        ("frame_stride", &args.frame_stride),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    raw_j = args.j.clone().or(raw_j);
    raw_dt = args.dt.clone().or(raw_dt);
    let js = raw_j
        .map(|r| parse_list(&r, "J", |s| s.parse().ok()))
        .transpose()?;
    let dts = raw_dt
        .map(|r| parse_list(&r, "dt", parse_real))
        .transpose()?;
    Ok(Resolved { cfg, js, dts })
}

fn single<T: Copy>(list: &Option<Vec<T>>, what: &str) -> Result<Option<T>> {
    match list.as_deref() {
        None => Ok(None),
        Some([v]) => Ok(Some(*v)),
        Some(_) => Err(Error::Config(format!("{what} takes a single value here"))),
    }
}

fn write_result(dir: Option<&Path>, name: &str, format: OutputFormat, content: &str) -> Result<()> {
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let path = dir.map(|d| d.join(format!("{name}.{ext}")));
    output::emit(path.as_deref(), content)?;
    if let Some(p) = path {
        info!("wrote {}", p.display());
    }
    Ok(())
}

fn evolve(r: Resolved) -> Result<()> {
    let mut cfg = r.cfg;
    if let Some(j) = single(&r.js, "J")? {
        cfg.num_elements = j;
    }
    if let Some(dt) = single(&r.dts, "dt")? {
        cfg.dt = dt;
    }
    cfg.validate()?;
    let result = harness::run_evolution(&cfg)?;
    let diag = output::render(cfg.format, &result.diagnostics, || {
        Ok(output::diagnostics_csv(&result.diagnostics))
    })?;
    write_result(cfg.out.as_deref(), "diagnostics", cfg.format, &diag)?;
    if let Some(dir) = cfg.out.as_deref() {
        let grid = curveflow::PeriodicGrid::uniform(cfg.num_elements)?;
        for frame in &result.frames {
            let path = dir.join(format!("frame_{:06}.csv", frame.m));
            output::emit(Some(&path), &output::frame_csv(&grid, &frame.x))?;
        }
    }
    if let Some(e) = result.errors {
        eprintln!("max L2 error {} max H1 error {}", e.l2_x, e.h1_x);
    }
    Ok(())
}

fn converge(r: Resolved) -> Result<()> {
    let cfg = r.cfg;
    let js = r.js.unwrap_or_else(|| presets::CONVERGENCE_JS.to_vec());
    if let Some(&j) = js.iter().find(|&&j| j < 3) {
        return Err(Error::Config(format!("J must be at least 3, got {j}")));
    }
    let table = harness::run_convergence_study(cfg.flow, cfg.scheme, &js, cfg.t_end, cfg.delta)?;
    let text = output::render(cfg.format, &table, || output::convergence_csv(&table))?;
    write_result(cfg.out.as_deref(), "convergence", cfg.format, &text)
}

fn refine_dt(r: Resolved) -> Result<()> {
    let cfg = r.cfg;
    let j = single(&r.js, "J")?.unwrap_or(512);
    if j < 3 {
        return Err(Error::Config(format!("J must be at least 3, got {j}")));
    }
    let dts = r
        .dts
        .ok_or_else(|| Error::Config("refine-dt needs --dt with a list of time steps".into()))?;
    let rows =
        harness::run_timestep_refinement(cfg.flow, cfg.scheme, j, &dts, cfg.t_end, cfg.delta)?;
    let text = output::render(cfg.format, &rows, || Ok(output::refinement_csv(&rows)))?;
    write_result(cfg.out.as_deref(), "refinement", cfg.format, &text)
}

fn table(preset: &str, args: &CommonArgs) -> Result<()> {
    match preset {
        "nonconvex" => evolve(resolve(args, presets::nonconvex_evolution())?),
        "rings" => evolve(resolve(args, presets::rings_evolution())?),
        name => {
            let p = presets::convergence_preset(name)
                .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
            let base = ExperimentConfig {
                flow: p.flow,
                scheme: p.scheme,
                t_end: p.t_end,
                delta: p.delta,
                ..Default::default()
            };
            let mut r = resolve(args, base)?;
            r.js = r.js.or_else(|| Some(p.js.to_vec()));
            converge(r)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(a) => evolve(resolve(&a, ExperimentConfig::default())?),
        Command::Converge(a) => {
            let base = ExperimentConfig {
                t_end: 0.25,
                ..Default::default()
            };
            converge(resolve(&a, base)?)
        }
        Command::RefineDt(a) => {
            let base = ExperimentConfig {
                t_end: 0.25,
                ..Default::default()
            };
            refine_dt(resolve(&a, base)?)
        }
        Command::Table { preset, common } => table(&preset, &common),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
