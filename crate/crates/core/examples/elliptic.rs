//! Jacobi functions and incomplete integrals of the first and second kind.

use h5geo::elliptic::*;

fn main() -> h5geo::Result<()> {
    let k = Modulus::new(0.8)?;
    println!("K(0.8) = {:.15}  E(0.8) = {:.15}", complete_k(k), complete_e(k));
    for u in [0.0, 0.5, 1.0, complete_k(k)] {
        let j = jacobi_sncndn(u, k)?;
        let am = jacobi_am(u, k)?;
        println!(
            "u = {u:.6}: sn {:+.12} cn {:+.12} dn {:.12}  F(am u) - u = {:+.1e}",
            j.sn,
            j.cn,
            j.dn,
            ellint_f(am, k)? - u
        );
    }
    let (f, e) = ellint_fe(0.7, Modulus::new(0.6)?)?;
    println!("F(0.7 | 0.6) = {f:.15}  E(0.7 | 0.6) = {e:.15}");
    println!("epsilon(1.2 | 0.6) = {:.15}", jacobi_epsilon(1.2, Modulus::new(0.6)?)?);
    Ok(())
}
