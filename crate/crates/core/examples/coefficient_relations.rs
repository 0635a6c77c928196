//! Coefficient relations between Roter, generalized Roter and
//! quasi-constant curvature forms.

use std::collections::BTreeMap;

use roter::catalog::{build, build_met1, build_met2_block};
use roter::classify::{
    classify_curvature_form, constant_curvature_relations, einstein_grt_constant_coefficient, einstein_level,
    grt_remainder, quasi_constant_alpha, quasi_constant_curvature, quasi_einstein, rt_to_grt_coefficients, Tolerances,
};
use roter::curvature::curvature_package;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tols = Tolerances::default();

    // Any (L4, L5, L6) extends a Roter form to an equivalent six-term form.
    let m = build("met1-case-iii", &BTreeMap::new())?;
    let pkg = curvature_package(&m.chart, &[0.3, 0.6, 0.2, 0.8, 0.5])?;
    let n = classify_curvature_form(&pkg, &tols)?.roter.coefficients;
    println!("Roter coefficients N = [{:.6}, {:.6}, {:.6}]", n[0], n[1], n[2]);
    for (l4, l5, l6) in [(0.0, 0.0, 0.0), (1.0, -0.5, 0.25), (-2.0, 3.0, 1.5)] {
        let (l1, l2, l3) = rt_to_grt_coefficients(n[0], n[1], n[2], pkg.kappa, pkg.dim(), l4, l5, l6)?;
        let rem = grt_remainder(&pkg, &[l1, l2, l3, l4, l5, l6])?;
        println!(
            "  L4..L6 = ({l4}, {l5}, {l6}) -> L1..L3 = ({l1:.6}, {l2:.6}, {l3:.6}), ‖R - GW‖/‖R‖ = {:.1e}",
            rem.norm() / pkg.r.norm()
        );
    }

    // Einstein and generalized Roter: R is a multiple of G.
    let block = build_met2_block();
    let pkg = curvature_package(&block, &[0.2, 0.5, 0.7])?;
    let form = classify_curvature_form(&pkg, &tols)?;
    let ein = einstein_level(&pkg, &tols)?;
    let predicted = einstein_grt_constant_coefficient(&pkg, &form.generalized, &ein)?;
    println!(
        "3-dimensional block: predicted G coefficient {predicted:.12}, R1212/G1212 = {:.12}",
        pkg.r.at4(0, 1, 0, 1) / pkg.gg.at4(0, 1, 0, 1)
    );
    let rel = constant_curvature_relations(&form, pkg.kappa, pkg.dim(), 1e-8)?;
    println!(
        "  coefficient relations hold: Roter {} ({:.1e}), generalized {} ({:.1e})",
        rel.roter_holds, rel.roter_violation, rel.generalized_holds, rel.generalized_violation
    );

    // Quasi-Einstein and generalized Roter: quasi-constant curvature with a predicted α'.
    let chart = build_met1("exp(x1)", "1")?;
    let pkg = curvature_package(&chart, &[0.3, 0.6, 0.2, 0.8, 0.5])?;
    let form = classify_curvature_form(&pkg, &tols)?;
    if let Some(qe) = quasi_einstein(&pkg, &tols) {
        let qcc = quasi_constant_curvature(&pkg, &qe.eta, &tols)?;
        let alpha = quasi_constant_alpha(&form.generalized.coefficients, qe.alpha);
        println!("conformally flat met1: S = {:.6} g + {:.6} η⊗η", qe.alpha, qe.beta);
        println!(
            "  α' predicted {alpha:.12}, fitted {:.12} (fit residual {:.1e})",
            qcc.alpha, qcc.fit.relative_residual
        );
    }
    Ok(())
}
