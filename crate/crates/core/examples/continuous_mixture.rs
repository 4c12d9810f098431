//! A two-component continuous mixture: density to distribution function and
//! back, with the result checked by numerical integration.
//!
//! cargo run --example continuous_mixture

use pcirc::circuit::ContinuousFamily;
use pcirc::continuous::{cdf_to_pdf, pdf_to_cdf};
use pcirc::oracle::{numeric_box_probability, numeric_mixed_partial, BoxMethod};
use pcirc::{CircuitBuilder, LeafMode};

fn main() {
    let mut b = CircuitBuilder::continuous(2);
    let g0 = b.continuous_leaf(0, ContinuousFamily::Gaussian { mean: 0.0, std_dev: 1.0 }, LeafMode::Pdf);
    let e1 = b.continuous_leaf(1, ContinuousFamily::Exponential { rate: 2.0 }, LeafMode::Pdf);
    let u0 = b.continuous_leaf(0, ContinuousFamily::Uniform { lo: -1.0, hi: 2.0 }, LeafMode::Pdf);
    let l1 = b.continuous_leaf(1, ContinuousFamily::Logistic { loc: 0.5, scale: 0.3 }, LeafMode::Pdf);
    let a = b.product(&[g0, e1]);
    let c = b.product(&[u0, l1]);
    let root = b.sum(&[(0.7, a), (0.3, c)]);
    let pdf = b.finish(root).unwrap();

    let cdf = pdf_to_cdf(&pdf).unwrap();
    for x in [[0.0, 0.5], [1.0, 1.0], [-0.5, 0.2]] {
        let closed = cdf.evaluate(&x).unwrap();
        let quad = numeric_box_probability(&pdf, &x, BoxMethod::Quadrature { rel_tol: 1e-8 }).unwrap();
        let mc = numeric_box_probability(&pdf, &x, BoxMethod::MonteCarlo { samples: 100_000, seed: 1 }).unwrap();
        println!(
            "F({:>4}, {:>4}) = {closed:.8}  quadrature {:.8}  monte carlo {:.4} ± {:.4}",
            x[0], x[1], quad.value, mc.value, mc.error
        );
    }

    let back = cdf_to_pdf(&cdf).unwrap();
    println!("round trip identical: {}", back.nodes() == pdf.nodes());
    let x = [0.3, 0.4];
    println!(
        "density at {x:?}: {:.6}, mixed difference of F: {:.6}",
        back.evaluate(&x).unwrap(),
        numeric_mixed_partial(&cdf, &x, 1e-3).unwrap()
    );
}
