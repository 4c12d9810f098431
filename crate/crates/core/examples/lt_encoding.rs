//! Categorical variables through the Less-Than code: values map to
//! threshold bit strings, so a binary CDF circuit over the bits answers
//! categorical CDF queries.
//!
//! cargo run --example lt_encoding

use pcirc::binary::pmf_to_cdf_circuit;
use pcirc::categorical::{categorical_cdf_query, lift_categorical_circuit, lt_encode};
use pcirc::circuit::VarDecl;
use pcirc::{CircuitBuilder, LeafFn};

fn main() {
    let k = 4;
    for v in 0..k {
        println!("lt({v}) = {}", lt_encode(v, k).unwrap());
    }

    // two independent categorical variables, each with its own marginal
    let marg = [[0.1, 0.2, 0.3, 0.4], [0.25, 0.25, 0.4, 0.1]];
    let mut b = CircuitBuilder::new(vec![VarDecl::categorical(0, k), VarDecl::categorical(1, k)]);
    let mut factors = Vec::new();
    for (var, p) in marg.iter().enumerate() {
        let terms: Vec<_> = (0..k).map(|v| (p[v], b.leaf(var, LeafFn::Eq(v)))).collect();
        factors.push(b.sum(&terms));
    }
    let root = b.product(&factors);
    let cat = b.finish(root).unwrap();

    let lifted = lift_categorical_circuit(&cat).unwrap();
    let cdf = pmf_to_cdf_circuit(&lifted).unwrap();
    println!("{} binary variables, {} edges", cdf.num_vars(), cdf.size());
    for x in [[0, 0], [1, 2], [3, 1], [3, 3]] {
        let expected: f64 = marg[0][..=x[0]].iter().sum::<f64>() * marg[1][..=x[1]].iter().sum::<f64>();
        let got = categorical_cdf_query(&cdf, &x, k).unwrap();
        println!("F({}, {}) = {got:.4}  (expected {expected:.4})", x[0], x[1]);
    }
}
