//! Transforms and queries on a circuit with about a million edges.
//!
//! cargo run --release --example large_circuit

use std::time::Instant;

use pcirc::binary::{cdf_to_pmf_circuit, pmf_to_cdf_circuit, query, QueryMark, QueryMarks};
use pcirc::oracle::{random_structured_circuit_with, StructuredConfig};

fn main() {
    let cfg = StructuredConfig {
        vars: 2000,
        depth: 12,
        seed: 9,
        max_sum_children: 3,
        edge_budget: 1_000_000,
        reuse_prob: 0.0,
    };
    let t = Instant::now();
    let c = random_structured_circuit_with(&cfg).unwrap().circuit;
    println!("generated {} edges in {:.2?}", c.size(), t.elapsed());

    let t = Instant::now();
    let cdf = pmf_to_cdf_circuit(&c).unwrap();
    println!("pmf -> cdf in {:.2?}", t.elapsed());

    let t = Instant::now();
    let mut marks = vec![QueryMark::Marginalized; cfg.vars];
    marks[0] = QueryMark::Evidence1;
    marks[1] = QueryMark::Evidence0;
    let p = query(&cdf, &QueryMarks(marks)).unwrap();
    println!("P(x0=1, x1=0) = {p:.6} in {:.2?}", t.elapsed());

    let t = Instant::now();
    let back = cdf_to_pmf_circuit(&cdf).unwrap();
    println!("cdf -> pmf in {:.2?}, identical: {}", t.elapsed(), back.nodes() == c.nodes());
}
