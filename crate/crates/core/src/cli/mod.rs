//! The `h5geo` command line. Everything here is reachable as a library
//! call ([`run`]) so the commands can be tested without spawning processes.
//!
//! Exit codes: 0 success, 1 runtime or tolerance failure, 2 malformed input.

pub mod figures;
pub mod sweep;
pub mod table;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{classify, profile_from_charges, CaseTag, QuarticProfile, TrajectoryType};
use crate::dynamics::{integrate_reduced_on_grid, IntegratorConfig};
use crate::error::Error;
use crate::heisenberg::hamiltonian_full;
use crate::quadrature::geodesic_quadrature;
use crate::reduction::{charges_from_state, from_reduced, hyper_to_cart, state_from_charges, ConservedCharges, HypersphericalState};
use crate::trace::GeodesicTrace;

use table::{Cell, Table};

pub const TRACE_COLUMNS: [&str; 14] = [
    "t", "r", "theta1", "theta2", "theta3", "p_r", "p_theta1", "p_theta2", "p_theta3", "I1", "I2", "I3", "I4", "H",
];

#[derive(Debug, Parser)]
#[command(name = "h5geo", version, about = "Geodesics of the sub-Riemannian LR structure on the Heisenberg group H5")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radial profile, case and trajectory type of a charge set.
    Classify(ClassifyArgs),
    /// Integrate the reduced equations numerically.
    Trace(RunArgs),
    /// Evaluate the analytic solution.
    Quadrature(RunArgs),
    /// Compare the analytic solution against the integrator.
    Validate(ValidateArgs),
    /// Write the data behind the t(r) and worked-example figures.
    Figures(figures::FigureArgs),
    /// Run many validations from a JSON config, in parallel.
    Sweep(sweep::SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct ChargeArgs {
    /// Level of λ5; must be nonzero.
    #[arg(long, allow_negative_numbers = true)]
    pub c0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c3: Option<f64>,
    /// Energy level; 0.5 is arc length.
    #[arg(long, allow_negative_numbers = true)]
    pub c4: Option<f64>,
}

impl ChargeArgs {
    fn any_given(&self) -> bool {
        self.c1.is_some() || self.c2.is_some() || self.c3.is_some() || self.c4.is_some()
    }

    pub fn charges(&self) -> Result<ConservedCharges, Failure> {
        let need = |v: Option<f64>, n: &str| v.ok_or_else(|| Failure::input(format!("--{n} is required")));
        Ok(ConservedCharges::new(
            need(self.c0, "c0")?,
            need(self.c1, "c1")?,
            need(self.c2, "c2")?,
            need(self.c3, "c3")?,
            self.c4.unwrap_or(0.5),
        ))
    }
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Initial state `r,theta1,theta2,theta3,p_r,p_theta1,p_theta2,p_theta3` (needs --c0).
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
    /// Initial radius when starting from charges.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Sign of p_r at the start when starting from charges.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sign_pr: f64,
    /// Sign of p_theta1 at the start when starting from charges.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sign_pth1: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
}

impl GridArgs {
    pub fn grid(&self) -> Result<Vec<f64>, Failure> {
        uniform_grid(self.t_end, self.samples)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, Failure> {
        let cfg = IntegratorConfig::with_tolerances(self.rtol, self.atol);
        cfg.validate().map_err(Failure::from)?;
        Ok(cfg)
    }
}

pub fn uniform_grid(t_end: f64, samples: usize) -> Result<Vec<f64>, Failure> {
    if !(t_end >= 0.0 && t_end.is_finite()) || samples == 0 {
        return Err(Failure::input(format!(
            "need t_end >= 0 and samples >= 1 (got {t_end}, {samples})"
        )));
    }
    if t_end == 0.0 || samples == 1 {
        return Ok(vec![0.0]);
    }
    let n = samples - 1;
    Ok((0..=n).map(|i| t_end * i as f64 / n as f64).collect())
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub charges: ChargeArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub charges: ChargeArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub charges: ChargeArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Every reported discrepancy must be below this.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// A command that did not succeed, with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    /// Errors about the inputs are exit 2, failures of the computation exit 1.
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Degenerate { .. } | Error::Unsupported(_) | Error::StepUnderflow { .. } | Error::Elliptic(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::runtime(format!("i/o error: {e}"))
    }
}

/// Initial state and, when known, the charges it should carry.
pub fn resolve_initial(
    ch: &ChargeArgs,
    st: &StateArgs,
    allow_both: bool,
) -> Result<(HypersphericalState, Option<ConservedCharges>), Failure> {
    let from_charges = ch.any_given() || st.r0.is_some();
    match (&st.state, from_charges) {
        (Some(_), true) if !allow_both => Err(Failure::input(
            "give either an initial state (--state) or charges (--c1 --c2 --c3 [--c4] --r0), not both",
        )),
        (None, false) => Err(Failure::input(
            "no initial condition: give --state with --c0, or --c0 --c1 --c2 --c3 [--c4] --r0",
        )),
        (Some(text), _) => {
            let c0 = ch.c0.ok_or_else(|| Failure::input("--state needs --c0"))?;
            let v: Vec<f64> = text
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::input(format!("cannot parse --state: {e}")))?;
            if v.len() != 8 {
                return Err(Failure::input(format!("--state needs 8 numbers, got {}", v.len())));
            }
            let s = HypersphericalState::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], c0)?;
            let c = if from_charges { Some(ch.charges()?) } else { None };
            Ok((s, c))
        }
        (None, true) => {
            let c = ch.charges()?;
            let r0 = st.r0.ok_or_else(|| Failure::input("starting from charges needs --r0"))?;
            let s = state_from_charges(&c, r0, st.sign_pr, st.sign_pth1)?;
            Ok((s, Some(c)))
        }
    }
}

/// Case tag of the state's level set, or a short reason it has none.
fn case_label(c: &ConservedCharges) -> String {
    match profile_from_charges(c) {
        Ok(p) => p.case_tag.to_string(),
        Err(e) => format!("unclassified ({e})"),
    }
}

fn charges_meta(t: &mut Table, c: &ConservedCharges) {
    t.meta(
        "charges",
        format!(
            "c0={:.16e} c1={:.16e} c2={:.16e} c3={:.16e} c4={:.16e}",
            c.c0, c.c1, c.c2, c.c3, c.c4
        ),
    );
    t.meta("case", case_label(c));
}

/// One row per sample: state, integrals and the full Hamiltonian.
pub fn trace_table(tr: &GeodesicTrace, with_branch: bool) -> Table {
    let mut cols: Vec<&str> = TRACE_COLUMNS.to_vec();
    if with_branch {
        cols.push("branch");
    }
    let mut t = Table::new(&cols);
    for (k, s) in tr.states.iter().enumerate() {
        let mut row = vec![Cell::Real(tr.times[k])];
        row.extend(s.to_array().iter().map(|&v| Cell::Real(v)));
        row.extend(tr.integrals[k].iter().map(|&v| Cell::Real(v)));
        let h = hyper_to_cart(s)
            .map(|c| {
                let cs = from_reduced(&c, 0.0);
                hamiltonian_full(&cs.q, &cs.lam)
            })
            .unwrap_or(f64::NAN);
        row.push(Cell::Real(h));
        if with_branch {
            row.push(Cell::Int(tr.branch.as_ref().map_or(0, |b| b[k])));
        }
        t.push(row);
    }
    t
}

fn emit(table: &Table, out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut file;
    let w: &mut dyn Write = match &out.output {
        Some(p) => {
            file = BufWriter::new(File::create(p)?);
            &mut file
        }
        None => stdout,
    };
    match out.format {
        Format::Json => table.write_json(w)?,
        _ => table.write_csv(w)?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub charges: ConservedCharges,
    pub a: f64,
    pub b: f64,
    pub c_q: f64,
    /// Nonnegative roots of `f` as radii, with multiplicity.
    pub radial_roots: Vec<(f64, u8)>,
    pub case: CaseTag,
    pub trajectory: Option<TrajectoryType>,
    pub degenerate_radius: Option<f64>,
    pub notes: Vec<String>,
}

pub fn classify_report(c: &ConservedCharges) -> Result<ClassifyReport, Failure> {
    c.validate()?;
    let p: QuarticProfile = profile_from_charges(c)?;
    let (trajectory, degenerate_radius) = match classify(&p) {
        Ok(t) => (Some(t), None),
        Err(Error::Degenerate { r_star }) => (None, Some(r_star)),
        Err(e) => return Err(e.into()),
    };
    Ok(ClassifyReport {
        charges: *c,
        a: p.a,
        b: p.b,
        c_q: p.c_q,
        radial_roots: crate::classify::solve_radial_roots(&p),
        case: p.case_tag,
        trajectory,
        degenerate_radius,
        notes: p.notes(),
    })
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let rep = classify_report(&a.charges.charges()?)?;
    if a.format == Format::Json {
        serde_json::to_writer_pretty(&mut *out, &rep).map_err(|e| Failure::runtime(e.to_string()))?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(out, "profile   f(r) = A r^4 + B r^2 + C")?;
    writeln!(out, "A         {:.16e}", rep.a)?;
    writeln!(out, "B         {:.16e}", rep.b)?;
    writeln!(out, "C         {:.16e}", rep.c_q)?;
    let roots: Vec<String> = rep
        .radial_roots
        .iter()
        .map(|(r, m)| if *m == 1 { format!("{r:.16e}") } else { format!("{r:.16e} (x{m})") })
        .collect();
    writeln!(out, "roots     {}", if roots.is_empty() { "none".into() } else { roots.join(", ") })?;
    writeln!(out, "case      {}", rep.case)?;
    match (rep.trajectory, rep.degenerate_radius) {
        (Some(TrajectoryType::TypeI { r0 }), _) => writeln!(out, "type      I (r >= r0)\nr0        {r0:.16e}")?,
        (Some(TrajectoryType::TypeII { r1, r2 }), _) => {
            writeln!(out, "type      II (r1 <= r <= r2)\nr1        {r1:.16e}\nr2        {r2:.16e}")?
        }
        (None, Some(r)) => writeln!(out, "type      degenerate: constant-radius orbit only\nr*        {r:.16e}")?,
        _ => {}
    }
    for n in &rep.notes {
        writeln!(out, "note      {n}")?;
    }
    Ok(())
}

fn cmd_trace(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let (s0, _) = resolve_initial(&a.charges, &a.state, false)?;
    let grid = a.grid.grid()?;
    let cfg = a.grid.integrator()?;
    let tr = integrate_reduced_on_grid(&s0, &grid, &cfg)?;
    let mut t = trace_table(&tr, false);
    t.meta("mode", "trace");
    charges_meta(&mut t, &charges_from_state(&s0)?);
    emit(&t, &a.output, out)?;
    if let Some(x) = &tr.exit {
        writeln!(err, "chart exit at t = {:.16e}: {}", x.t, x.reason)?;
        return Err(Failure::runtime(format!("integration left the chart at t = {}", x.t)));
    }
    Ok(())
}

fn cmd_quadrature(a: &RunArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (s0, c) = resolve_initial(&a.charges, &a.state, false)?;
    let c = match c {
        Some(c) => c,
        None => charges_from_state(&s0)?,
    };
    let grid = a.grid.grid()?;
    let tr = geodesic_quadrature(&c, &s0, &grid).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{} (case {})", f.message, case_label(&c));
        f
    })?;
    let mut t = trace_table(&tr, true);
    t.meta("mode", "quadrature");
    charges_meta(&mut t, &c);
    emit(&t, &a.output, out)
}

/// Runs one command line; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let res = match &cli.command {
        Command::Classify(a) => cmd_classify(a, out),
        Command::Trace(a) => cmd_trace(a, out, err),
        Command::Quadrature(a) => cmd_quadrature(a, out),
        Command::Validate(a) => validate::cmd_validate(a, out),
        Command::Figures(a) => figures::cmd_figures(a, out),
        Command::Sweep(a) => sweep::cmd_sweep(a, out),
    };
    match res {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "h5geo: {}", f.message);
            f.code
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run(std::env::args_os(), &mut out, &mut err)
}
