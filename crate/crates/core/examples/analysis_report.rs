//! Run the full sampled analysis from code and print the aggregate and the
//! start of the JSON report.

use roter::analysis::{analyze, render_text, AnalysisConfig, SampleSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["met2", "met1-case-iii", "sphere3"] {
        let mut cfg = AnalysisConfig::catalog(name);
        cfg.samples = SampleSpec::Random { count: 4, sample_box: None };
        cfg.seed = 11;
        let report = analyze(&cfg)?;
        let agg = report.aggregate.as_ref().expect("at least one point");
        println!("{name}: {} | κ in [{:.6}, {:.6}]", agg.summary, agg.kappa.min, agg.kappa.max);
        for (i, s) in agg.coefficient_spreads.iter().enumerate() {
            println!("    coefficient {i}: [{:.6}, {:.6}]", s.min, s.max);
        }
    }

    let mut cfg = AnalysisConfig::catalog("met2-block");
    cfg.samples = SampleSpec::Points(vec![vec![0.1, 0.2, 0.3]]);
    let report = analyze(&cfg)?;
    let json = report.to_json();
    println!("\n{}...", &json[..json.len().min(300)]);
    println!("\n{}", render_text(&report).lines().take(12).collect::<Vec<_>>().join("\n"));
    Ok(())
}
