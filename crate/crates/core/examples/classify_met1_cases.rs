//! Curvature form and Einstein level of the five-dimensional conformally
//! warped family for several choices of (f, h).

use std::collections::BTreeMap;

use roter::catalog::{build, met1_case};
use roter::classify::{classify_curvature_form, einstein_level, Tolerances};
use roter::curvature::curvature_package;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tols = Tolerances::default();
    let p = [0.3, 0.6, 0.2, 0.8, 0.5];
    for name in ["met1-case-i", "met1-case-ii", "met1-case-iii", "met1-case-vi"] {
        let (f, h) = met1_case(name).expect("preset");
        let m = build(name, &BTreeMap::new())?;
        let pkg = curvature_package(&m.chart, &p)?;
        let form = classify_curvature_form(&pkg, &tols)?;
        let ein = einstein_level(&pkg, &tols)?;
        println!("f = {f:<8} h = {h:<13} {:<24} {}", form.label(), ein.level.label());
        println!(
            "    residuals: constant {:.1e}, conformal {:.1e}, Roter {:.1e}, generalized {:.1e}",
            form.constant.relative_residual,
            form.conformal.relative_residual,
            form.roter.relative_residual,
            form.generalized.relative_residual
        );
    }
    Ok(())
}
