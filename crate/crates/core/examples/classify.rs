//! Radial profile, case and trajectory type for a few charge sets.

use h5geo::classify::{classify, profile_from_charges, solve_radial_roots};
use h5geo::reduction::ConservedCharges;

fn main() -> h5geo::Result<()> {
    let sets = [
        ("unbounded, A = 0", ConservedCharges::new(2.0, 0.5, 0.1, -0.1, 0.5)),
        ("through the origin", ConservedCharges::new(1.0, 0.0, 0.0, 0.0, 0.5)),
        ("beta = 1", ConservedCharges::new(1.0, 0.5, -0.25, -0.25, 0.5)),
        ("beta > 1", ConservedCharges::new(1.0, 0.52, 0.35, 0.52, 0.5)),
        ("bounded", ConservedCharges::new(3.0, 0.2, 0.3, 0.2, 0.5)),
    ];
    for (label, c) in sets {
        let p = profile_from_charges(&c)?;
        println!("{label:<20} f(r) = {:+.4} r^4 {:+.4} r^2 {:+.4}", p.a, p.b, p.c_q);
        println!("{:<20} case {}, roots {:?}", "", p.case_tag, solve_radial_roots(&p));
        println!("{:<20} {:?}", "", classify(&p)?);
        for n in p.notes() {
            println!("{:<20} note: {n}", "");
        }
    }
    // No real geodesic has these charges.
    let bad = ConservedCharges::new(4.0, 4.0, 0.0, 0.0, 0.5);
    println!("(4, 4, 0, 0, 1/2): {}", classify(&profile_from_charges(&bad)?).unwrap_err());
    Ok(())
}
