//! Data behind the two figure families: `t(r)` for `f = A r⁴ + r²`, and the
//! worked example `f = ½r² − ½`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use crate::classify::QuarticProfile;
use crate::dynamics::{integrate_reduced_on_grid, IntegratorConfig};
use crate::error::Result;
use crate::quadrature::{geodesic_quadrature, time_of_radius, Primitive};
use crate::reduction::{state_from_charges, ConservedCharges};

use super::table::{Cell, Table};
use super::{uniform_grid, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    FigTr,
    FigExample,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub which: Figure,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Radii per curve (fig-tr).
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Largest radius on the unbounded curves (fig-tr).
    #[arg(long, default_value_t = 3.0)]
    pub r_max: f64,
    /// Time span of the worked example (fig-example).
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 501)]
    pub samples: usize,
}

pub const FIG_TR_A: [f64; 4] = [-1.0, 0.0, 0.5, 2.0];

/// Charges whose profile is `½r² − ½` at arc length.
pub fn example_charges() -> ConservedCharges {
    ConservedCharges::new(2.0, 0.5, 0.1, -0.1, 0.5)
}

/// `(r, t+, t−)` for `f = A r⁴ + r²`: the outgoing and incoming branches
/// of `t(r)` through the origin, on `(0, r_max]` or `(0, r2]`.
pub fn fig_tr_table(a: f64, points: usize, r_max: f64) -> Result<Table> {
    let p = QuarticProfile::new(a, 1.0, 0.0)?;
    let prim = Primitive::new(&p)?;
    let top = if prim.is_bounded() {
        p.roots_sq[1].s.sqrt()
    } else {
        r_max
    };
    let mut t = Table::new(&["r", "t_outgoing", "t_incoming"]);
    t.meta("profile", format!("f(r) = {a} r^4 + r^2"))
        .meta("case", p.case_tag);
    for i in 1..=points {
        let r = top * i as f64 / points as f64;
        let tp = time_of_radius(&p, r, 1.0, 0.0)?;
        let tm = time_of_radius(&p, r, -1.0, 0.0)?;
        t.push(vec![Cell::Real(r), Cell::Real(tp), Cell::Real(tm)]);
    }
    Ok(t)
}

/// `(t, r, θ1)` for the worked example from its turning radius, with the
/// integrator's `θ1` alongside.
pub fn fig_example_table(t_end: f64, samples: usize) -> Result<Table> {
    let c = example_charges();
    let s0 = state_from_charges(&c, 1.0, 1.0, 1.0)?;
    let grid = uniform_grid(t_end, samples).map_err(|f| crate::Error::Config(f.message))?;
    let ana = geodesic_quadrature(&c, &s0, &grid)?;
    let ode = integrate_reduced_on_grid(&s0, &grid, &IntegratorConfig::default())?;
    let mut t = Table::new(&["t", "r", "theta1", "theta1_ode"]);
    t.meta("profile", "f(r) = 0.5 r^2 - 0.5")
        .meta("charges", "c0=2 c1=0.5 c2=0.1 c3=-0.1 c4=0.5");
    for (k, s) in ana.states.iter().enumerate() {
        let th_ode = ode.states.get(k).map_or(f64::NAN, |o| o.th1);
        t.push(vec![
            Cell::Real(grid[k]),
            Cell::Real(s.r),
            Cell::Real(s.th1),
            Cell::Real(th_ode),
        ]);
    }
    Ok(t)
}

pub fn fig_tr_file(dir: &Path, a: f64) -> PathBuf {
    dir.join(format!("fig-tr_A{a}.csv"))
}

pub fn cmd_figures(a: &FigureArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    fs::create_dir_all(&a.out_dir)?;
    let mut written = Vec::new();
    match a.which {
        Figure::FigTr => {
            if !(a.r_max > 0.0) || a.points == 0 {
                return Err(Failure::input("need --r-max > 0 and --points >= 1"));
            }
            for &coef in &FIG_TR_A {
                let t = fig_tr_table(coef, a.points, a.r_max)?;
                let path = fig_tr_file(&a.out_dir, coef);
                let mut f = fs::File::create(&path)?;
                t.write_csv(&mut f)?;
                written.push(path);
            }
        }
        Figure::FigExample => {
            let t = fig_example_table(a.t_end, a.samples)?;
            let path = a.out_dir.join("fig-example.csv");
            let mut f = fs::File::create(&path)?;
            t.write_csv(&mut f)?;
            written.push(path);
        }
    }
    for p in written {
        writeln!(out, "{}", p.display())?;
    }
    Ok(())
}
