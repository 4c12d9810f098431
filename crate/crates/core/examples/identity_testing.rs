//! Randomized identity testing: a round trip through the CDF circuit is the
//! same polynomial as the input, and a small perturbation is caught.
//!
//! cargo run --example identity_testing

use pcirc::binary::{cdf_to_pmf_circuit, pmf_to_cdf_circuit, round_trip_check};
use pcirc::oracle::{equiv_random_points, random_structured_circuit};
use pcirc::{Node, SemanticsTag};

fn main() {
    let c = random_structured_circuit(16, 4, 7).unwrap().circuit;
    let back = cdf_to_pmf_circuit(&pmf_to_cdf_circuit(&c).unwrap()).unwrap();
    println!("round trip: {:?}", equiv_random_points(&c, &back, 50, 1));

    let mut nodes = c.nodes().to_vec();
    let i = nodes.iter().position(|n| matches!(n, Node::Sum { .. })).unwrap();
    if let Node::Sum { weights, .. } = &mut nodes[i] {
        weights[0] += 1e-3;
    }
    let tweaked = pcirc::Circuit::build(c.var_decls(), nodes, c.root()).unwrap();
    println!("perturbed:  {:?}", equiv_random_points(&c, &tweaked, 50, 1));

    // small circuits are also checked against dense polynomials
    let small = random_structured_circuit(6, 3, 7).unwrap().circuit;
    let report = round_trip_check(&small, SemanticsTag::Pmf, 0).unwrap();
    println!("{}", serde_json::to_string(&report).unwrap());
}
