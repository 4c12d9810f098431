//! Marginal and evidence queries on a random circuit, checked against
//! brute-force enumeration of its table.
//!
//! cargo run --example marginal_queries

use pcirc::binary::{pmf_query, pmf_to_cdf_circuit, query, QueryMark, QueryMarks};
use pcirc::oracle::random_structured_circuit;

fn main() {
    let n = 5;
    let s = random_structured_circuit(n, 3, 42).unwrap();
    let table = s.table.unwrap();
    let cdf = pmf_to_cdf_circuit(&s.circuit).unwrap();

    let cases = [
        vec![
            QueryMark::Evidence1,
            QueryMark::Marginalized,
            QueryMark::Marginalized,
            QueryMark::Marginalized,
            QueryMark::Marginalized,
        ],
        vec![
            QueryMark::Evidence0,
            QueryMark::Evidence1,
            QueryMark::Marginalized,
            QueryMark::Evidence0,
            QueryMark::Marginalized,
        ],
        vec![QueryMark::Marginalized; 5],
    ];
    for marks in cases {
        let brute: f64 = (0..1usize << n)
            .filter(|mask| {
                marks.iter().enumerate().all(|(i, m)| match m {
                    QueryMark::Evidence0 => mask >> i & 1 == 0,
                    QueryMark::Evidence1 => mask >> i & 1 == 1,
                    QueryMark::Marginalized => true,
                })
            })
            .map(|mask| table.cell(mask))
            .sum();
        let label: String = marks
            .iter()
            .map(|m| match m {
                QueryMark::Evidence0 => '0',
                QueryMark::Evidence1 => '1',
                QueryMark::Marginalized => '*',
            })
            .collect();
        let m = QueryMarks(marks);
        let via_cdf = query(&cdf, &m).unwrap();
        let via_pmf = pmf_query(&s.circuit, &m).unwrap();
        println!("{label}  cdf {via_cdf:.6}  pmf {via_pmf:.6}  enumeration {brute:.6}");
    }
}
