//! The operator spec grammar and the structured metadata it produces.
//!
//! ```bash
//! cargo run --release --example operator_specs
//! ```

use lyscan::operators::parse_operator;

fn main() {
    let specs = [
        (
            "unit backward shift",
            "kind = backward_shift\nweights = constant 1",
        ),
        (
            "compact quasinilpotent forward shift",
            "kind = forward_shift\nweights = reciprocal",
        ),
        (
            "unimodular diagonal",
            "kind = diagonal\nentries = list 1,(0,1),-1;tail=(0,-1)",
        ),
        (
            "doubled shift, translated",
            "kind = translate\nlambda = 0.5,0\ninner = doubled\n\n[doubled]\nkind = scale\nfactor = 2\ninner = base\n\n[base]\nkind = backward_shift\nweights = constant 1",
        ),
        (
            "direct sum",
            "kind = direct_sum\nparts = a, b\n\n[a]\nkind = backward_shift\nweights = constant 1\n\n[b]\nkind = kalisch",
        ),
    ];
    for (label, text) in specs {
        let op = parse_operator(text).unwrap();
        println!("== {label}");
        println!("   canonical: {}", op.describe());
        println!("{}", serde_json::to_string_pretty(&op.metadata_json()).unwrap());
        println!();
    }
}
