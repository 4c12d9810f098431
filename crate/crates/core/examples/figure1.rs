//! Two binary variables: build the joint CDF as a circuit, recover the mass
//! function with a leaf substitution, and answer a marginal query on both.
//!
//! cargo run --example figure1

use pcirc::binary::{cdf_to_pmf_circuit, pmf_query, query, QueryMark, QueryMarks};
use pcirc::structure::check_structure;
use pcirc::{CircuitBuilder, SemanticsTag};

fn main() {
    let mut b = CircuitBuilder::binary(2);
    let (nx0, x0, nx1, x1) = (b.neg_ind(0), b.ind(0), b.neg_ind(1), b.ind(1));
    let p00 = b.product(&[nx0, nx1]);
    let p10 = b.product(&[x0, nx1]);
    let p01 = b.product(&[nx0, x1]);
    let p11 = b.product(&[x0, x1]);
    // F(x0, x1) for each corner of the cube
    let root = b.sum(&[(0.1, p00), (0.3, p10), (0.5, p01), (1.0, p11)]);
    let cdf = b.finish(root).unwrap().with_tag(Some(SemanticsTag::Cdf));

    let report = check_structure(&cdf);
    println!("smooth {} decomposable {}", report.is_smooth(), report.is_decomposable());

    let pmf = cdf_to_pmf_circuit(&cdf).unwrap();
    println!("size {} -> {}", cdf.size(), pmf.size());
    println!(" x0 x1   F      p");
    for (a, bb) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let f = cdf.evaluate(&[a, bb]).unwrap();
        let p = pmf.evaluate(&[a, bb]).unwrap();
        println!("  {a}  {bb}  {f:.3}  {p:.3}");
    }

    let m = QueryMarks(vec![QueryMark::Evidence1, QueryMark::Marginalized]);
    println!("P(x0=1) from the CDF circuit: {:.3}", query(&cdf, &m).unwrap());
    println!("P(x0=1) from the PMF circuit: {:.3}", pmf_query(&pmf, &m).unwrap());
}
