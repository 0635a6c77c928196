//! Parse, print and evaluate metric-component expressions; show diagnostics.

use roter::expr::{evaluate_value, parse_expression, ParamMap, ParseContext};

fn main() {
    let ctx = ParseContext::new(["t", "r", "theta", "phi"]).with_parameters(["m"]);
    let mut params = ParamMap::new();
    params.insert("m".into(), 1.0);

    for src in ["-(1 - 2*m/r)", "r^2 * sin(theta)^2", "2^-1^2", "-x^2", "exp(log(r))", "r + * t", "tan(r)", "1 + q"] {
        match parse_expression(src, &ctx) {
            Ok(e) => {
                let v = evaluate_value(&e, &[0.0, 3.0, 0.7, 0.0], &params);
                println!("{src:<22} parsed as {e:<26} = {v:?}");
            }
            Err(err) => {
                println!("{src:<22} error: {err}");
                println!("{:<22}        {}^", "", " ".repeat(err.offset));
            }
        }
    }
}
