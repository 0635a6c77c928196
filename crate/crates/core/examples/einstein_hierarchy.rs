//! Polynomial relations among the Ricci powers: the detected level, its
//! monic relation and the null spaces of the power families.

use std::collections::BTreeMap;

use roter::catalog::build;
use roter::classify::{einstein_level, Tolerances};
use roter::curvature::curvature_package;

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:+.4}")).collect::<Vec<_>>().join(", ")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tols = Tolerances::default();
    for (name, p) in [
        ("met2", vec![0.2, 0.4, 0.1, 0.3, 1.2, 0.5]),
        ("met1-case-iii", vec![0.3, 0.6, 0.2, 0.8, 0.5]),
        ("met1-case-ii", vec![0.3, 0.6, 0.2, 0.8, 0.5]),
        ("met1-case-i", vec![0.3, 0.6, 0.2, 0.8, 0.5]),
    ] {
        let m = build(name, &BTreeMap::new())?;
        let pkg = curvature_package(&m.chart, &p)?;
        let v = einstein_level(&pkg, &tols)?;
        println!("{name}: {} with relation [{}]", v.level.label(), fmt(&v.relation));
        println!(
            "    residuals by degree: {}",
            v.level_residuals.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>().join(" ")
        );
        for (k, kernel) in v.kernels.iter().enumerate() {
            for vec in kernel {
                println!("    null vector of [g..S^{}]: [{}]", k + 1, fmt(vec));
            }
        }
    }
    Ok(())
}
