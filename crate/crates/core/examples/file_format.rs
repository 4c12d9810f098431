//! Reading, writing and rejecting circuit files.
//!
//! cargo run --example file_format

use pcirc::binary::cdf_to_pmf_circuit;
use pcirc::format::{parse, serialize};

const BROKEN: &str = "pcirc 1
var 0 binary
leaf a ind 0
prod p a b
root p
";

fn main() {
    let text = include_str!("data/fig1_cdf.pc");
    let cdf = parse(text).unwrap();
    println!("parsed {} nodes over {} variables, tag {:?}", cdf.num_nodes(), cdf.num_vars(), cdf.tag());

    let pmf = cdf_to_pmf_circuit(&cdf).unwrap();
    let out = serialize(&pmf);
    print!("{out}");
    assert_eq!(parse(&out).unwrap(), pmf);

    match parse(BROKEN) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected at {}:{}: {}", e.line, e.column, e.kind),
    }
}
