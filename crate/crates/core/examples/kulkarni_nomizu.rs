//! Kulkarni–Nomizu products and the curvature action on a small example.

use roter::tensor::{
    curvature_action, endo_action, kn_product, kn_product_general, q_product, DenseTensor, Endomorphism,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = DenseTensor::diagonal(&[-1.0, 1.0, 1.0, 1.0]);
    let s =
        DenseTensor::sym2(4, vec![2.0, 0.5, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.3, 0.0, 0.0, 0.3, -1.0])?;

    let gg = kn_product(&g, &g)?;
    let gs = kn_product(&g, &s)?;
    println!("(g∧g)_0101 = {}", gg.at4(0, 1, 0, 1));
    println!("(g∧S)_0101 = {}", gs.at4(0, 1, 0, 1));
    println!("g∧S = S∧g: {}", gs.max_abs_diff(&kn_product(&s, &g)?) == 0.0);

    // Endomorphisms act as derivations on the product.
    let h = Endomorphism::from_fn(4, |i, j| (i as f64 - 2.0 * j as f64) / 3.0);
    let lhs = endo_action(&h, &gs)?;
    let rhs = &kn_product_general(&endo_action(&h, &g)?, &s)? + &kn_product_general(&g, &endo_action(&h, &s)?)?;
    println!("‖H(g∧S) - (Hg)∧S - g∧(HS)‖ = {:.2e}", (&lhs - &rhs).norm());

    // Any generalized curvature tensor annihilates the metric.
    let d = &gs + &kn_product(&s, &s)?;
    println!("‖D·g‖ = {:.2e}", curvature_action(&d, &g, &g)?.norm());
    println!("‖Q(g, g∧g)‖ = {:.2e}", q_product(&g, &gg)?.norm());
    println!("‖Q(g, S)‖ = {:.3}", q_product(&g, &s)?.norm());
    Ok(())
}
