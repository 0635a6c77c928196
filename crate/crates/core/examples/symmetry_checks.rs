//! Semisymmetry and pseudosymmetry verdicts for every curvature tensor
//! acting on R, S and C, with the cross-checks that hold on generalized
//! Roter type packages.

use std::collections::BTreeMap;

use roter::catalog::build;
use roter::classify::{classify_curvature_form, Tolerances, Verdict};
use roter::curvature::curvature_package;
use roter::symmetry::{equivalence_matrix, local_symmetry_residuals};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tols = Tolerances::default();
    for name in ["met1-case-iii", "met1-case-ii", "sphere3"] {
        let m = build(name, &BTreeMap::new())?;
        let p: Vec<f64> = m.sample_box.lower.iter().zip(&m.sample_box.upper).map(|(a, b)| 0.4 * a + 0.6 * b).collect();
        let pkg = curvature_package(&m.chart, &p)?;
        let form = classify_curvature_form(&pkg, &tols)?;
        let table = equivalence_matrix(&pkg, form.generalized.membership == Verdict::Holds, &tols)?;
        println!("{name} ({})", form.label());
        for row in &table.semisymmetry {
            println!("    {:?}·{:?} = 0: {:?} (residual {:.1e})", row.d, row.t, row.verdict, row.residual);
        }
        for row in &table.pseudosymmetry {
            let l = row.verdict.l.map_or("-".to_string(), |l| format!("{l:+.6}"));
            println!("    {:?}·{:?} = L Q({}, {:?}): {:?}, L = {l}", row.d, row.t, row.a, row.t, row.verdict.status);
        }
        if let Some((r, s)) = local_symmetry_residuals(&pkg) {
            println!("    ‖∇R‖ ratio {r:.2e}, ‖∇S‖ ratio {s:.2e}");
        }
        println!("    implication violations: {}", table.violations.len());
    }
    Ok(())
}
