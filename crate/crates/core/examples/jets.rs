//! Third-order jets: propagate derivatives through an expression.

use roter::expr::{evaluate_jet, parse_expression, ParamMap, ParseContext};
use roter::jet::Jet3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Direct arithmetic: u = x*y at (2, 3), then exp(u).
    let x = Jet3::seed(2, 0, 2.0);
    let y = Jet3::seed(2, 1, 3.0);
    let u = x.mul(&y)?.exp();
    println!("exp(xy) at (2,3): value {:.6e}, d/dx {:.6e}, d²/dxdy {:.6e}", u.value(), u.d1(0), u.d2(0, 1));

    let ctx = ParseContext::with_dim(3).with_parameters(["c"]);
    let e = parse_expression("exp(c*x1) * sin(x2) + x3^3 / (1 + x1^2)", &ctx)?;
    let mut params = ParamMap::new();
    params.insert("c".into(), 0.5);
    let p = [0.3, 1.1, -0.4];
    let j = evaluate_jet(&e, &p, &params)?;
    println!("{e} at {p:?}");
    println!("  value      {:.12}", j.value());
    println!("  gradient   {:?}", j.grad());
    println!("  ∂²/∂x1∂x2  {:.12}", j.d2(0, 1));
    println!("  ∂³/∂x3³    {:.12}", j.d3(2, 2, 2));
    println!("  ∂³/∂x1²∂x2 {:.12}", j.d3(0, 0, 1));
    Ok(())
}
