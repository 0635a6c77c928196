//! Read a metric from chart-file text and classify it at a few points.

use roter::chart::parse_chart_file;
use roter::classify::{classify_curvature_form, einstein_level, Tolerances};
use roter::curvature::curvature_package;

const CHART: &str = "\
# de Sitter-like warped product in 4 dimensions
dim = 4
coordinates = t, x, y, z
param.h = 0.7
g[1][1] = -1
g[2][2] = exp(2*h*t)
g[3][3] = exp(2*h*t)
g[4][4] = exp(2*h*t)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut chart = parse_chart_file(CHART)?;
    let tols = Tolerances::default();
    for h in [0.7, 0.0] {
        chart.set_parameter("h", h);
        for p in [[0.0, 0.1, 0.2, 0.3], [1.5, -2.0, 0.0, 4.0]] {
            let pkg = curvature_package(&chart, &p)?;
            let form = classify_curvature_form(&pkg, &tols)?;
            let ein = einstein_level(&pkg, &tols)?;
            println!("h = {h}, point {p:?}: {}, {}, κ = {:.6}", form.label(), ein.level.label(), pkg.kappa);
        }
    }
    println!();
    print!("{}", chart.to_chart_text());
    Ok(())
}
