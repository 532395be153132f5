use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mssc::branch_bound::{root_bound, solve_exact, SearchStatus};
use mssc::dataset::{generate_gaussian, load_csv, write_csv, DataMatrix, SyntheticSpec};
use mssc::heuristic::{multistart_baseline, InitKind};
use mssc::RunConfig;

/// Exact minimum sum-of-squares clustering.
#[derive(Parser)]
#[command(name = "mssc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance to certified optimality.
    Solve {
        input: PathBuf,
        #[arg(long, value_parser = parse_k)]
        k: usize,
        #[command(flatten)]
        flags: SolverFlags,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare the relaxation heuristic with multi-start k-means.
    Baseline {
        input: PathBuf,
        #[arg(long, value_parser = parse_k)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the root relaxation and report UB_0 and UB_CP.
        #[arg(long)]
        with_sdp: bool,
    },
    /// Write a synthetic Gaussian instance named `{n}_{k}_{sigma}.csv`.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_k)]
        k: usize,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Objective as a function of k.
    Sweep {
        input: PathBuf,
        #[arg(long, value_parser = parse_k)]
        k_min: usize,
        #[arg(long, value_parser = parse_k)]
        k_max: usize,
        /// Multi-start k-means only, no certificate.
        #[arg(long)]
        heuristic_only: bool,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[command(flatten)]
        flags: SolverFlags,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolverFlags {
    /// Relative gap to certify; defaults to 1e-4 below 1000 points, 1e-3 above.
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long, default_value_t = 50)]
    cp_max_root: usize,
    #[arg(long, default_value_t = 30)]
    cp_max_child: usize,
    #[arg(long, default_value_t = 1e-4)]
    eps_viol: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps_act: f64,
    /// Relative bound change that ends the cut loop (default 1e-4 at the root, 1e-3 below).
    #[arg(long)]
    eps_cp: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    sdp_tol: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolverFlags {
    fn config(&self, k: usize) -> RunConfig {
        let mut c = RunConfig::new(k);
        c.gap_tol = self.gap_tol;
        c.cp_max_root = self.cp_max_root;
        c.cp_max_child = self.cp_max_child;
        c.eps_viol = self.eps_viol;
        c.eps_act = self.eps_act;
        if let Some(e) = self.eps_cp {
            c.eps_cp_root = e;
            c.eps_cp_child = e;
        }
        c.sdp_tol = self.sdp_tol;
        c.workers = self.workers;
        c.seed = self.seed;
        c.time_limit = self.time_limit;
        c
    }
}

fn parse_k(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("k must be ≥ 1".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(format!("invalid k: {e}")),
    }
}

/// `1.28811e+04` style, as in the usual result tables.
fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.5e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn load(path: &Path) -> Result<DataMatrix> {
    load_csv(path).with_context(|| format!("loading {}", path.display()))
}

fn cmd_solve(input: &Path, k: usize, flags: &SolverFlags, json: Option<&Path>) -> Result<ExitCode> {
    let data = load(input)?;
    let r = solve_exact(&data, &flags.config(k))?;
    println!(
        "{}  k={k}  f_opt={}  cp={}  cuts_cp={}  gap0={:.2e} ({:.2e})  N={}  time={:.2}s",
        dataset_name(input),
        sci(r.f_opt),
        r.cp_root,
        r.cuts_cp_root,
        r.gap0,
        r.gap_cp,
        r.nodes,
        r.wall_time
    );
    if let Some(path) = json {
        r.write_json(path)?;
    }
    Ok(match r.status {
        SearchStatus::Certified => ExitCode::SUCCESS,
        SearchStatus::GapLimited => {
            eprintln!("stopped with gap {:.3e}", r.gap);
            ExitCode::from(2)
        }
    })
}

fn cmd_baseline(input: &Path, k: usize, restarts: usize, seed: u64, with_sdp: bool) -> Result<ExitCode> {
    if restarts == 0 {
        bail!("at least one restart is required");
    }
    let data = load(input)?;
    if k > data.n() {
        bail!(mssc::Error::InvalidK { k, n: data.n() });
    }
    let mut header = vec!["dataset", "k"];
    let mut row = vec![dataset_name(input), k.to_string()];
    if with_sdp {
        let mut cfg = RunConfig::new(k);
        cfg.seed = seed;
        let root = root_bound(&data, &cfg)?;
        let show = |x: Option<f64>| x.map_or_else(|| "-".to_string(), sci);
        header.extend(["CP", "LB_0", "LB_CP", "UB_0", "UB_CP"]);
        row.extend([
            root.rounds.to_string(),
            sci(root.lb0),
            sci(root.lb_cp),
            show(root.ub_0),
            show(root.ub_cp),
        ]);
    }
    let (_, pp) = multistart_baseline(&data, k, restarts, seed, InitKind::PlusPlus);
    let (_, rand) = multistart_baseline(&data, k, restarts, seed, InitKind::Random);
    header.extend(["UB_++", "UB_RAND"]);
    row.extend([sci(pp), sci(rand)]);
    println!("{}", header.join("\t"));
    println!("{}", row.join("\t"));
    Ok(ExitCode::SUCCESS)
}

fn cmd_generate(n: usize, k: usize, sigma: f64, seed: u64, out: &Path) -> Result<ExitCode> {
    let spec = SyntheticSpec { n, k, sigma, seed };
    let data = generate_gaussian(&spec)?;
    let path = out.join(format!("{}.csv", spec.name()));
    write_csv(&data, &path)?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SweepRow {
    k: usize,
    objective: f64,
    lb: Option<f64>,
    gap: Option<f64>,
    certified: bool,
    seconds: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    input: &Path,
    k_min: usize,
    k_max: usize,
    heuristic_only: bool,
    restarts: usize,
    flags: &SolverFlags,
    json: Option<&Path>,
) -> Result<ExitCode> {
    let data = load(input)?;
    if k_min > k_max || k_max > data.n() {
        bail!("need k_min <= k_max <= n = {}", data.n());
    }
    println!("k\tobjective\tlb\tgap\tseconds");
    let mut rows = Vec::new();
    let mut failed = false;
    let mut limited = false;
    for k in k_min..=k_max {
        let start = std::time::Instant::now();
        let row = if heuristic_only {
            let (_, f) = multistart_baseline(&data, k, restarts.max(1), flags.seed, InitKind::PlusPlus);
            SweepRow {
                k,
                objective: f,
                lb: None,
                gap: None,
                certified: false,
                seconds: start.elapsed().as_secs_f64(),
            }
        } else {
            match solve_exact(&data, &flags.config(k)) {
                Ok(r) => SweepRow {
                    k,
                    objective: r.f_opt,
                    lb: Some(r.lb),
                    gap: Some(r.gap),
                    certified: r.certified(),
                    seconds: r.wall_time,
                },
                Err(e) => {
                    eprintln!("k={k}: {e}");
                    failed = true;
                    continue;
                }
            }
        };
        limited |= !heuristic_only && !row.certified;
        let opt = |x: Option<f64>, f: fn(f64) -> String| x.map_or_else(|| "-".to_string(), f);
        println!(
            "{k}\t{}\t{}\t{}\t{:.2}",
            sci(row.objective),
            opt(row.lb, sci),
            opt(row.gap, |g| format!("{g:.2e}")),
            row.seconds
        );
        rows.push(row);
    }
    if let Some(path) = json {
        std::fs::write(path, serde_json::to_string_pretty(&rows)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if failed {
        ExitCode::FAILURE
    } else if limited {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { input, k, flags, json } => cmd_solve(&input, k, &flags, json.as_deref()),
        Command::Baseline {
            input,
            k,
            restarts,
            seed,
            with_sdp,
        } => cmd_baseline(&input, k, restarts, seed, with_sdp),
        Command::Generate { n, k, sigma, seed, out } => cmd_generate(n, k, sigma, seed, &out),
        Command::Sweep {
            input,
            k_min,
            k_max,
            heuristic_only,
            restarts,
            flags,
            json,
        } => cmd_sweep(&input, k_min, k_max, heuristic_only, restarts, &flags, json.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
