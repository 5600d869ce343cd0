use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use vdsens::report::{self, boxplot_svg, rank_columns, summarize, BoxGroup};
use vdsens::scenario::{Config, ScenarioKind};
use vdsens::sim::{
    circle_sweep, fault_sweep, locked_steering_fault, odd_batch, read_csv_file, run_config, write_csv_file, RunSetup,
    SimOutput, SWEEP_RADIUS,
};
use vdsens::Error;

#[derive(Parser)]
#[command(name = "vdsens", version, about = "Vehicle dynamics parameter sensitivities")]
struct Cli {
    /// Directory for all written files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a configuration file and list every violation.
    Validate { config: PathBuf },
    /// Run the configured scenario and write `run.csv`.
    Simulate { config: PathBuf },
    /// Single-track steady-state sensitivities on a circle.
    CircleSweep {
        config: PathBuf,
        /// Lateral accelerations [m/s²].
        #[arg(long, value_delimiter = ',', default_value = "3,4,4.9,6")]
        ay: Vec<f64>,
        /// Circle radius [m]; defaults to the configured circle, if any.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Nominal run against the same run with faults injected.
    FaultSweep {
        config: PathBuf,
        /// Sensitivity parameters to report and plot.
        #[arg(long, value_delimiter = ',', default_value = "mu,l_f")]
        params: Vec<String>,
    },
    /// Synthetic operating-domain trajectories on both models.
    OddBatch {
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write one CSV per run and model.
        #[arg(long)]
        csv: bool,
    },
    /// Boxplot and ranking of sensitivity columns from run CSVs.
    Report {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(long)]
        state: String,
        /// Parameters to plot; all present ones when omitted.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
}

fn load(path: &Path) -> anyhow::Result<Config> {
    let cfg = Config::load(path).with_context(|| format!("reading {}", path.display()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_run(out: &SimOutput, dir: &Path, name: &str) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    write_csv_file(out, &path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn simulate(cfg: &Config, dir: &Path) -> anyhow::Result<()> {
    let out = run_config(cfg)?;
    ensure_dir(dir)?;
    let path = write_run(&out, dir, "run.csv")?;
    println!("{} samples -> {}", out.len(), path.display());
    if let Some(ss) = &out.steady_state {
        for (name, v) in out.state_names.iter().zip(&ss.x) {
            println!("steady {name} = {v:.6e}");
        }
    }
    Ok(())
}

fn sweep(cfg: &Config, ay: &[f64], radius: Option<f64>, dir: &Path) -> anyhow::Result<()> {
    let radius = radius.unwrap_or(match cfg.scenario.kind {
        ScenarioKind::Circle { radius, .. } => radius,
        _ => SWEEP_RADIUS,
    });
    let rows = circle_sweep(&cfg.params, radius, ay)?;
    ensure_dir(dir)?;
    let path = dir.join("circle_sweep.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    let names = vdsens::params::ST_PARAM_NAMES;
    let mut header = vec!["a_y".to_string(), "speed".into(), "delta_f".into(), "beta".into(), "psi_dot".into()];
    for s in vdsens::state::ST_STATE_NAMES {
        header.extend(names.iter().map(|p| format!("Z_{s}_{p}")));
    }
    w.write_record(&header)?;
    println!("radius {radius} m");
    println!("{:>6} {:>8} {:>12} {:>14} {:>14}", "a_y", "v", "delta_f", "Z_beta,c_f", "Z_psi_dot,c_f");
    for r in &rows {
        println!("{:>6} {:>8.3} {:>12.5e} {:>14.4e} {:>14.4e}", r.a_y, r.speed, r.delta_f, r.z_ss[(0, 4)], r.z_ss[(1, 4)]);
        let mut rec = vec![r.a_y, r.speed, r.delta_f, r.x_ss[0], r.x_ss[1]];
        for i in 0..2 {
            rec.extend((0..names.len()).map(|k| r.z_ss[(i, k)]));
        }
        w.write_record(rec.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

fn faults(cfg: &Config, params: &[String], dir: &Path) -> anyhow::Result<()> {
    let events = if cfg.scenario.faults.is_empty() { vec![locked_steering_fault()] } else { cfg.scenario.faults.clone() };
    let sweep = fault_sweep(&cfg.scenario, &events, &RunSetup::from(cfg))?;
    ensure_dir(dir)?;
    write_run(&sweep.nominal, dir, "nominal.csv")?;
    write_run(&sweep.faulted, dir, "faulted.csv")?;
    for p in params {
        let s = report::fault_shift_report(&sweep.nominal, &sweep.faulted, "psi_dot", p)?;
        println!(
            "Z_psi_dot,{p}: mean {:.3e} -> {:.3e} (x{:.3}), max {:.3e} -> {:.3e} (x{:.3}), buckets {} -> {}",
            s.nominal_mean, s.faulted_mean, s.mean_ratio, s.nominal_max, s.faulted_max, s.max_ratio, s.nominal_bucket, s.faulted_bucket
        );
        report::emit(dir, &format!("fault_psi_dot_{p}.svg"), &report::fault_figure(&sweep, "psi_dot", p)?)?;
    }
    Ok(())
}

fn batch(cfg: &Config, n: usize, seed: u64, csv: bool, dir: &Path) -> anyhow::Result<()> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let a_limit = match cfg.scenario.kind {
        ScenarioKind::OddSynthetic { a_limit, .. } => a_limit,
        _ => 3.0,
    };
    let runs = odd_batch(n, seed, cfg.scenario.duration, a_limit, &RunSetup::from(cfg))?;
    ensure_dir(dir)?;
    if csv {
        for r in &runs {
            write_run(&r.dt, dir, &format!("odd_{}_dt.csv", r.seed))?;
            write_run(&r.st, dir, &format!("odd_{}_st.csv", r.seed))?;
        }
    }
    let st: Vec<&SimOutput> = runs.iter().map(|r| &r.st).collect();
    for state in ["beta", "psi_dot"] {
        println!("single-track ranking for {state}:");
        for e in report::dominance_ranking(&st, state)? {
            println!("  {:<10} {:.3e} (1e{})", e.param, e.median_abs, e.bucket);
        }
        let params: Vec<&str> = vdsens::params::ST_PARAM_NAMES.iter().copied().filter(|p| *p != "v").collect();
        report::emit(dir, &format!("odd_st_{state}.svg"), &report::sensitivity_boxplot(&st, state, &params)?)?;
    }
    Ok(())
}

fn report_csv(files: &[PathBuf], state: &str, params: &[String], dir: &Path) -> anyhow::Result<()> {
    let tables = files
        .iter()
        .map(|f| read_csv_file(f).with_context(|| format!("reading {}", f.display())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let params = if params.is_empty() { tables[0].z_params(state) } else { params.to_vec() };
    if params.is_empty() {
        bail!("no sensitivity columns for state `{state}`");
    }
    let mut columns = Vec::with_capacity(params.len());
    for p in &params {
        let mut col = Vec::new();
        for t in &tables {
            col.extend(t.column(&format!("Z_{state}_{p}"))?);
        }
        columns.push(col);
    }
    for e in rank_columns(&params, &columns)? {
        println!("{:<10} {:.3e} (1e{})", e.param, e.median_abs, e.bucket);
    }
    let groups = params
        .iter()
        .zip(&columns)
        .map(|(p, c)| {
            let abs: Vec<f64> = c.iter().map(|v| v.abs()).collect();
            Ok(BoxGroup { label: p.clone(), stats: summarize(&abs)? })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let svg = boxplot_svg(&format!("|Z| of {state}"), &format!("|d {state} / d p|"), &groups);
    let path = report::emit(dir, &format!("report_{state}.svg"), &svg)?;
    println!("-> {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let dir = cli.out.as_path();
    match cli.cmd {
        Cmd::Validate { config } => {
            load(&config)?;
            println!("{}: ok", config.display());
            Ok(())
        }
        Cmd::Simulate { config } => simulate(&load(&config)?, dir),
        Cmd::CircleSweep { config, ay, radius } => sweep(&load(&config)?, &ay, radius, dir),
        Cmd::FaultSweep { config, params } => faults(&load(&config)?, &params, dir),
        Cmd::OddBatch { config, n, seed, csv } => batch(&load(&config)?, n, seed, csv, dir),
        Cmd::Report { csv, state, params } => report_csv(&csv, &state, &params, dir),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Diverged { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
