//! A small parameter sweep over a thread pool. Set H5GEO_THREADS to cap the
//! worker count.

use h5geo::cli::sweep::{run_sweep, thread_count, GridSpec, SweepConfig};

fn main() {
    let cfg = SweepConfig {
        out_dir: std::env::temp_dir().join("h5geo-sweep-example"),
        t_end: 5.0,
        samples: 51,
        grid: Some(GridSpec {
            c0: vec![1.5, 2.0, 3.0],
            c1: vec![0.2],
            c2: vec![0.3],
            c3: vec![0.2],
            c4: vec![0.5],
            r0: vec![0.9],
        }),
        ..Default::default()
    };
    let results = match run_sweep(&cfg, thread_count(None)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", e.message);
            std::process::exit(e.code);
        }
    };
    for r in &results {
        println!(
            "{} c0 = {} case {:<11} {:<9} {}",
            r.name,
            r.charges.c0,
            r.case,
            r.status,
            r.max_discrepancy.map(|d| format!("{d:.2e}")).or(r.message.clone()).unwrap_or_default()
        );
    }
    println!("written to {}", cfg.out_dir.display());
}
