//! Parameter sweeps: many independent validations fanned out over a thread
//! pool, one CSV per run and an `index.json` written once at the end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorConfig;
use crate::quadrature::geodesic_quadrature;
use crate::reduction::{state_from_charges, ConservedCharges};

use super::validate::cross_validate;
use super::{trace_table, uniform_grid, Failure};

/// Caps the sweep's worker count.
pub const THREADS_ENV: &str = "H5GEO_THREADS";

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSpec {
    pub name: Option<String>,
    pub charges: ConservedCharges,
    pub r0: f64,
    #[serde(default = "one")]
    pub sign_pr: f64,
    #[serde(default = "one")]
    pub sign_pth1: f64,
}

fn one() -> f64 {
    1.0
}

/// Cartesian product of charge values; every run starts at each `r0`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GridSpec {
    pub c0: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub c3: Vec<f64>,
    #[serde(default = "half")]
    pub c4: Vec<f64>,
    pub r0: Vec<f64>,
}

fn half() -> Vec<f64> {
    vec![0.5]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub out_dir: PathBuf,
    pub t_end: f64,
    pub samples: usize,
    pub tol: f64,
    pub integrator: IntegratorConfig,
    pub runs: Vec<RunSpec>,
    pub grid: Option<GridSpec>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("sweep-out"),
            t_end: 10.0,
            samples: 101,
            tol: 1e-6,
            integrator: IntegratorConfig::default(),
            runs: Vec::new(),
            grid: None,
        }
    }
}

impl SweepConfig {
    /// Explicit runs followed by the grid product, with names filled in.
    pub fn expand(&self) -> Vec<RunSpec> {
        let mut out = self.runs.clone();
        if let Some(g) = &self.grid {
            for &c0 in &g.c0 {
                for &c1 in &g.c1 {
                    for &c2 in &g.c2 {
                        for &c3 in &g.c3 {
                            for &c4 in &g.c4 {
                                for &r0 in &g.r0 {
                                    out.push(RunSpec {
                                        name: None,
                                        charges: ConservedCharges::new(c0, c1, c2, c3, c4),
                                        r0,
                                        sign_pr: 1.0,
                                        sign_pth1: 1.0,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        for (i, r) in out.iter_mut().enumerate() {
            if r.name.is_none() {
                r.name = Some(format!("run{i:04}"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunResult {
    pub name: String,
    pub charges: ConservedCharges,
    pub r0: f64,
    pub case: String,
    /// `ok`, `tolerance` or `error`.
    pub status: String,
    pub message: Option<String>,
    pub max_discrepancy: Option<f64>,
    pub file: Option<String>,
}

fn run_one(spec: &RunSpec, cfg: &SweepConfig, grid: &[f64], dir: &Path) -> RunResult {
    let name = spec.name.clone().unwrap_or_default();
    let case = crate::classify::profile_from_charges(&spec.charges)
        .map(|p| p.case_tag.to_string())
        .unwrap_or_else(|_| "unclassified".into());
    let mut res = RunResult {
        name: name.clone(),
        charges: spec.charges,
        r0: spec.r0,
        case,
        status: "error".into(),
        message: None,
        max_discrepancy: None,
        file: None,
    };
    let out = (|| -> crate::Result<_> {
        let s0 = state_from_charges(&spec.charges, spec.r0, spec.sign_pr, spec.sign_pth1)?;
        let rep = cross_validate(&spec.charges, &s0, grid, &cfg.integrator, cfg.tol)?;
        let tr = geodesic_quadrature(&spec.charges, &s0, grid)?;
        Ok((rep, tr))
    })();
    match out {
        Err(e) => res.message = Some(e.to_string()),
        Ok((rep, tr)) => {
            res.max_discrepancy = Some(rep.checks.iter().map(|c| c.value).fold(0.0, f64::max));
            res.status = if rep.passed() { "ok" } else { "tolerance" }.into();
            let file = format!("{name}.csv");
            let mut t = trace_table(&tr, true);
            t.meta("run", &name).meta("case", &res.case);
            match fs::File::create(dir.join(&file)).and_then(|mut f| t.write_csv(&mut f)) {
                Ok(()) => res.file = Some(file),
                Err(e) => {
                    res.status = "error".into();
                    res.message = Some(e.to_string());
                }
            }
        }
    }
    res
}

/// Worker count: `--threads`, capped by `H5GEO_THREADS` and the machine.
pub fn thread_count(requested: Option<usize>) -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(hw);
    requested.unwrap_or(hw).min(cap).max(1)
}

/// Runs the sweep; results come back in configuration order.
pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> Result<Vec<RunResult>, Failure> {
    cfg.integrator.validate()?;
    let grid = uniform_grid(cfg.t_end, cfg.samples)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let runs = cfg.expand();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::runtime(e.to_string()))?;
    let results: Vec<RunResult> = pool.install(|| {
        runs.par_iter()
            .map(|r| run_one(r, cfg, &grid, &cfg.out_dir))
            .collect()
    });
    let index = serde_json::to_string_pretty(&results).map_err(|e| Failure::runtime(e.to_string()))?;
    fs::write(cfg.out_dir.join("index.json"), index + "\n")?;
    Ok(results)
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", a.config.display())))?;
    let mut cfg: SweepConfig =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("bad sweep config: {e}")))?;
    if let Some(d) = &a.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(t) = a.t_end {
        cfg.t_end = t;
    }
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    if let Some(t) = a.tol {
        cfg.tol = t;
    }
    let results = run_sweep(&cfg, thread_count(a.threads))?;
    let mut bad = 0;
    for r in &results {
        writeln!(
            out,
            "{:<12} case {:<12} {:<9} {}",
            r.name,
            r.case,
            r.status,
            r.max_discrepancy
                .map(|d| format!("{d:.3e}"))
                .or_else(|| r.message.clone())
                .unwrap_or_default()
        )?;
        bad += (r.status != "ok") as usize;
    }
    writeln!(out, "index: {}", cfg.out_dir.join("index.json").display())?;
    if bad > 0 {
        return Err(Failure::runtime(format!("{bad} of {} runs failed", results.len())));
    }
    Ok(())
}
