//! Figure data without the CLI: t(r) for f = A r^4 + r^2 and the worked
//! example f = r^2/2 - 1/2, printed as CSV.

use h5geo::cli::figures::{fig_example_table, fig_tr_table, FIG_TR_A};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut out = std::io::stdout().lock();
    for a in FIG_TR_A {
        fig_tr_table(a, 10, 2.0)?.write_csv(&mut out)?;
        println!();
    }
    fig_example_table(5.0, 11)?.write_csv(&mut out)?;
    Ok(())
}
