//! Curvature package of a six-dimensional Einstein metric, compared with its
//! closed-form component table.

use roter::catalog::{build_met2, met2_oracle, table_deviation};
use roter::curvature::{curvature_package, second_bianchi_violation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chart = build_met2();
    let p = [0.2, -0.1, 0.4, 0.3, 1.5, 0.0];
    let pkg = curvature_package(&chart, &p)?;

    println!("point {p:?}");
    println!("Γ^1_22 = {:.12}", pkg.gamma.at(0, 1, 1));
    for (idx, want) in met2_oracle(&p).r {
        let [a, b, c, d] = idx;
        println!("R_{}{}{}{} = {:+.15} (table {:+.15})", a + 1, b + 1, c + 1, d + 1, pkg.r.at4(a, b, c, d), want);
    }
    println!("S_66 = {:.15}, g_66/2 = {:.15}", pkg.s.at2(5, 5), pkg.g.at2(5, 5) / 2.0);
    println!("κ = {:.15}, κ⁽²⁾ = {:.15}", pkg.kappa, pkg.kappa2);
    println!("worst deviation from the table {:.2e}", table_deviation(&met2_oracle(&p), &pkg.r, &pkg.s));
    if let Some(nr) = &pkg.nabla_r {
        println!("second Bianchi residual {:.2e}", second_bianchi_violation(nr));
    }
    println!("‖C‖ = {:.6}, ‖W‖ = {:.6}, ‖K‖ = {:.6}", pkg.c.norm(), pkg.w.norm(), pkg.k.norm());
    Ok(())
}
