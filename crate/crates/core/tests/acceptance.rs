//! End-to-end acceptance checks, run sequentially so the timed ones are not
//! disturbed by other tests. Prints one PASS/FAIL line per criterion.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcirc::binary::{
    cdf_to_pmf_circuit, pmf_query, pmf_to_cdf_circuit, query, round_trip_check, QueryMark, QueryMarks, SemanticsTag,
};
use pcirc::categorical::{
    categorical_cdf_query, encode_assignment, encode_point, lift_categorical_circuit, lift_pmf_table, lt_decode,
    lt_encode, CategoricalTable,
};
use pcirc::circuit::{Circuit, CircuitBuilder, LeafMode, VarDecl};
use pcirc::continuous::{cdf_to_pdf, pdf_to_cdf};
use pcirc::format::{parse, serialize};
use pcirc::oracle::{
    cdf_poly_to_pmf_poly, cdf_poly_to_pmf_poly_exact, mobius_invert, numeric_box_probability, numeric_mixed_partial,
    pmf_to_cdf_poly, pmf_to_cdf_poly_exact, pmf_to_cdf_table, pmf_to_pgf, pmf_to_pmf_poly, pmf_to_pmf_poly_exact,
    random_continuous_circuit, random_distribution, random_structured_circuit, random_structured_circuit_with,
    sample_points, BoxMethod, ContinuousConfig, DensePoly, PmfTable, SetFunction, StructuredConfig, IDENTITY_GRID,
};
use pcirc::structure::is_pair_indicator_form;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn max_coeff_diff(a: &DensePoly, b: &DensePoly) -> f64 {
    a.max_abs_diff(b)
}

fn cube_points(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n).map(|m| (0..n).map(|i| (m >> i & 1) as f64).collect()).collect()
}

fn grid_points(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-IDENTITY_GRID..=IDENTITY_GRID) as f64).collect()).collect()
}

// 1
fn figure_one() -> Outcome {
    let table = PmfTable::new(2, vec![0.1, 0.2, 0.4, 0.3]).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let p = pmf_to_pmf_poly(&table).map_err(|e| e.to_string())?;
    let c = pmf_to_cdf_poly(&table).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let want_p = DensePoly::from_pairs(2, [(0, 0.1), (1, 0.1), (2, 0.3), (3, -0.2)]);
    let want_c = DensePoly::from_pairs(2, [(0, 0.1), (1, 0.2), (2, 0.4), (3, 0.3)]);
    let dev = max_coeff_diff(&p, &want_p).max(max_coeff_diff(&c, &want_c));
    ensure(dev <= 1e-12, || format!("coefficient deviation {dev:e}"))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("max coefficient deviation {dev:.1e}, {elapsed:?}"))
}

// 2
fn cdf_equals_pgf() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for s in 0..500u64 {
        let n = 1 + (s % 10) as usize;
        let t = random_distribution(n, s).map_err(|e| e.to_string())?;
        let c = pmf_to_cdf_poly(&t).map_err(|e| e.to_string())?;
        let g = pmf_to_pgf(&t).map_err(|e| e.to_string())?;
        worst = worst.max(max_coeff_diff(&c, &g));
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("500 distributions, max deviation {worst:.1e}, {elapsed:.2?}"))
}

// 3
fn circuit_transforms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for s in 0..200u64 {
        let n = 1 + (s % 10) as usize;
        let depth = 1 + (s % 4) as usize;
        let sc = random_structured_circuit(n, depth, 1000 + s).map_err(|e| e.to_string())?;
        let pmf = &sc.circuit;
        ensure(is_pair_indicator_form(pmf), || format!("seed {s}: generator left pair-indicator form"))?;
        let table = sc.table.as_ref().expect("small circuits carry their table");
        let want_cdf = pmf_to_cdf_poly_exact(table).map_err(|e| e.to_string())?;
        let want_pmf = pmf_to_pmf_poly_exact(table).map_err(|e| e.to_string())?;

        let cdf = pmf_to_cdf_circuit(pmf).map_err(|e| e.to_string())?;
        ensure(cdf.size() == pmf.size(), || format!("seed {s}: pmf_to_cdf size {} -> {}", pmf.size(), cdf.size()))?;
        // the PMF circuit read as a CDF circuit is a second, independent input
        let pmf_of_input = cdf_to_pmf_circuit(pmf).map_err(|e| e.to_string())?;
        ensure(pmf_of_input.size() == pmf.size(), || format!("seed {s}: cdf_to_pmf changed size"))?;
        let want_pmf_of_input = cdf_poly_to_pmf_poly_exact(&want_pmf).map_err(|e| e.to_string())?;
        let back = cdf_to_pmf_circuit(&cdf).map_err(|e| e.to_string())?;

        let cube = cube_points(n);
        let grid = grid_points(n, 100, &mut rng);
        for (x, on_cube) in cube.iter().map(|x| (x, true)).chain(grid.iter().map(|x| (x, false))) {
            for (circ, poly) in [(&cdf, &want_cdf), (&back, &want_pmf), (&pmf_of_input, &want_pmf_of_input)] {
                // large grid points need the exact sum to keep the oracle's own rounding out
                let want = if on_cube { poly.eval(x) } else { poly.eval_exact(x) };
                let d = rel(circ.evaluate(x).unwrap(), want);
                worst = worst.max(d);
                ensure(d <= 1e-9, || format!("seed {s}: deviation {d:e} at {x:?}"))?;
            }
        }
        for tag in [SemanticsTag::Pmf, SemanticsTag::Cdf] {
            let r = round_trip_check(pmf, tag, s).map_err(|e| e.to_string())?;
            ensure(r.passed, || format!("seed {s}: round_trip_check {r:?}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("200 circuits, size delta 0, max relative deviation {worst:.1e}, {elapsed:.2?}"))
}

// 4
fn mobius_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0usize;
    for i in 0..100usize {
        let n = 1 + i % 12;
        let values: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(-1000i64..=1000) as f64).collect();
        let f = SetFunction::new(n, values).map_err(|e| e.to_string())?;
        let g = f.zeta();
        // every entry of g is an explicit subset sum
        for a in 0..1usize << n {
            let mut sum = 0.0;
            let mut b = a;
            loop {
                sum += f.values()[b];
                if b == 0 {
                    break;
                }
                b = (b - 1) & a;
            }
            ensure(g.values()[a] == sum, || format!("zeta mismatch at n={n}, A={a:b}"))?;
        }
        ensure(mobius_invert(&g) == f, || format!("inversion not exact at n={n}"))?;
        checked += 1 << n;
    }
    let mut worst = 0.0f64;
    for s in 0..100u64 {
        let n = 1 + (s % 12) as usize;
        let t = random_distribution(n, 40_000 + s).map_err(|e| e.to_string())?;
        let c = pmf_to_cdf_poly(&t).map_err(|e| e.to_string())?;
        let p = cdf_poly_to_pmf_poly(&c).map_err(|e| e.to_string())?;
        worst = worst.max(max_coeff_diff(&p, &pmf_to_pmf_poly(&t).map_err(|e| e.to_string())?));
    }
    ensure(worst <= 1e-12, || format!("polynomial round trip deviation {worst:e}"))?;
    Ok(format!("100 set functions ({checked} subsets) exact, polynomial round trip {worst:.1e}"))
}

fn brute_force_query(table: &PmfTable, marks: &[QueryMark]) -> f64 {
    (0..1usize << marks.len())
        .filter(|&m| {
            marks.iter().enumerate().all(|(i, mark)| match mark {
                QueryMark::Evidence0 => m >> i & 1 == 0,
                QueryMark::Evidence1 => m >> i & 1 == 1,
                QueryMark::Marginalized => true,
            })
        })
        .map(|m| table.cell(m))
        .sum()
}

// 5
fn marginal_queries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut marginalized = 0;
    for s in 0..200u64 {
        let n = 1 + (s % 10) as usize;
        let sc = random_structured_circuit(n, 1 + (s % 3) as usize, 5000 + s).map_err(|e| e.to_string())?;
        let table = sc.table.as_ref().expect("tracked");
        let cdf = pmf_to_cdf_circuit(&sc.circuit).map_err(|e| e.to_string())?;
        let marks: Vec<QueryMark> = (0..n)
            .map(|_| match rng.gen_range(0..3) {
                0 => QueryMark::Evidence0,
                1 => QueryMark::Evidence1,
                _ => QueryMark::Marginalized,
            })
            .collect();
        marginalized += marks.iter().filter(|m| **m == QueryMark::Marginalized).count();
        let want = brute_force_query(table, &marks);
        let m = QueryMarks(marks);
        let got = query(&cdf, &m).map_err(|e| e.to_string())?;
        let got_pmf = pmf_query(&sc.circuit, &m).map_err(|e| e.to_string())?;
        let d = (got - want).abs().max((got_pmf - want).abs());
        worst = worst.max(d);
        ensure(d <= 1e-9, || format!("seed {s}: query {got} / {got_pmf} vs enumeration {want}"))?;
    }
    Ok(format!("200 queries ({marginalized} marginalized marks), max deviation {worst:.1e}"))
}

/// Random smooth, decomposable circuit over categorical indicators with a
/// normalized weight at every sum.
fn random_categorical_circuit(n: usize, k: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = CircuitBuilder::new((0..n).map(|i| VarDecl::categorical(i, k)).collect());
    let eq: Vec<Vec<_>> = (0..n).map(|v| (0..k).map(|c| b.leaf(v, pcirc::LeafFn::Eq(c))).collect()).collect();
    let normalized = |rng: &mut ChaCha8Rng, m: usize| {
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
        let t: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / t).collect::<Vec<_>>()
    };
    let components = rng.gen_range(1..=3);
    let mut terms = Vec::new();
    for _ in 0..components {
        let factors: Vec<_> = (0..n)
            .map(|v| {
                let ws = normalized(&mut rng, k);
                let t: Vec<_> = ws.into_iter().zip(eq[v].iter().copied()).collect();
                b.sum(&t)
            })
            .collect();
        terms.push(b.product(&factors));
    }
    let ws = normalized(&mut rng, components);
    let t: Vec<_> = ws.into_iter().zip(terms).collect();
    let root = b.sum(&t);
    b.finish(root).expect("valid circuit")
}

// 6
fn less_than_encoding() -> Outcome {
    for k in 1..=8usize {
        for x in 0..k {
            let cx = lt_encode(x, k).map_err(|e| e.to_string())?;
            ensure(lt_decode(cx.bits(), k) == Ok(x), || format!("decode failed for {x} in {k}"))?;
            for y in 0..k {
                let cy = lt_encode(y, k).map_err(|e| e.to_string())?;
                ensure((x <= y) == cx.le(&cy), || format!("order not embedded: {x}, {y}, k={k}"))?;
            }
        }
    }
    let mut worst = 0.0f64;
    let mut cells = 0usize;
    for n in 1..=4usize {
        for k in 1..=5usize {
            let seed = (n * 10 + k) as u64;
            let cat = random_categorical_circuit(n, k, seed);
            let cells_k: usize = k.pow(n as u32);
            let mass: Vec<f64> = (0..cells_k)
                .map(|idx| {
                    let x: Vec<f64> = (0..n).map(|i| ((idx / k.pow(i as u32)) % k) as f64).collect();
                    cat.evaluate(&x).unwrap()
                })
                .collect();
            let table = CategoricalTable::new(n, k, mass).map_err(|e| e.to_string())?;
            let lifted_table = lift_pmf_table(&table).map_err(|e| e.to_string())?;
            let lifted_cdf_table = pmf_to_cdf_table(&lifted_table);
            let lifted = lift_categorical_circuit(&cat).map_err(|e| e.to_string())?;
            let lifted_cdf = pmf_to_cdf_circuit(&lifted).map_err(|e| e.to_string())?;
            for idx in 0..cells_k {
                let x = table.point(idx);
                let bits = encode_assignment(&x, k).map_err(|e| e.to_string())?;
                let mask = encode_point(&x, k).map_err(|e| e.to_string())?;
                let (p, f) = (table.pmf(&x), table.cdf(&x));
                let devs = [
                    (lifted_table.cell(mask) - p).abs(),
                    (lifted_cdf_table.cell(mask) - f).abs(),
                    (lifted.evaluate(&bits).unwrap() - p).abs(),
                    (lifted_cdf.evaluate(&bits).unwrap() - f).abs(),
                    (categorical_cdf_query(&lifted_cdf, &x, k).map_err(|e| e.to_string())? - f).abs(),
                ];
                let d = devs.iter().copied().fold(0.0, f64::max);
                worst = worst.max(d);
                ensure(d <= 1e-9, || format!("n={n}, k={k}, x={x:?}: deviations {devs:?}"))?;
                cells += 1;
            }
        }
    }
    Ok(format!("order embedding k<=8, {cells} cells n<=4 k<=5, max deviation {worst:.1e}"))
}

// 7
fn continuous_cdf() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut points = 0;
    for s in 0..10u64 {
        let n = 1 + (s % 3) as usize;
        let depth = 1 + (s % 4) as usize;
        let pdf = random_continuous_circuit(&ContinuousConfig::new(n, depth, 700 + s, LeafMode::Pdf));
        let cdf = pdf_to_cdf(&pdf).map_err(|e| e.to_string())?;
        ensure(cdf.size() == pdf.size(), || format!("seed {s}: size changed"))?;
        for x in sample_points(&pdf, 5, 0.0, s) {
            let want = numeric_box_probability(&pdf, &x, BoxMethod::default()).map_err(|e| e.to_string())?;
            let got = cdf.evaluate(&x).unwrap();
            let d = (got - want.value).abs();
            worst = worst.max(d);
            ensure(d <= 1e-5, || format!("seed {s}, x={x:?}: {got} vs quadrature {want:?}"))?;
            points += 1;
        }
    }
    Ok(format!("{points} points, size delta 0, max |Δ| {worst:.1e}, {:.2?}", start.elapsed()))
}

// 8
fn continuous_pdf() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    for s in 0..10u64 {
        let n = 1 + (s % 4) as usize;
        let depth = 1 + (s % 4) as usize;
        let pdf = random_continuous_circuit(&ContinuousConfig::new(n, depth, 800 + s, LeafMode::Pdf));
        let cdf = pdf_to_cdf(&pdf).map_err(|e| e.to_string())?;
        let back = cdf_to_pdf(&cdf).map_err(|e| e.to_string())?;
        ensure(back == pdf, || format!("seed {s}: round trip is not structurally identical"))?;
        ensure(back.size() <= cdf.size(), || format!("seed {s}: size increased"))?;
        for x in sample_points(&cdf, 5, 2e-3, s) {
            let want = numeric_mixed_partial(&cdf, &x, 1e-3).map_err(|e| e.to_string())?;
            let got = back.evaluate(&x).unwrap();
            let d = (got - want).abs() / got.abs().max(want.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max(d);
            ensure(d <= 1e-3, || format!("seed {s}, x={x:?}: {got} vs differences {want}"))?;
            points += 1;
        }
    }
    // a non-smooth input, where derivative routing drops a sum child
    let mut b = CircuitBuilder::continuous(2);
    let g = pcirc::circuit::ContinuousFamily::Gaussian { mean: 0.0, std_dev: 1.0 };
    let f1 = b.continuous_leaf(0, g, LeafMode::Cdf);
    let f2 = b.continuous_leaf(1, g, LeafMode::Cdf);
    let p = b.product(&[f1, f2]);
    let s = b.sum(&[(0.5, f1), (0.5, p)]);
    let c = b.finish(s).unwrap();
    let d = cdf_to_pdf(&c).map_err(|e| e.to_string())?;
    ensure(d.size() < c.size(), || "non-smooth input did not shrink".into())?;
    let x = [0.3, -0.2];
    let (got, want) = (d.evaluate(&x).unwrap(), numeric_mixed_partial(&c, &x, 1e-3).map_err(|e| e.to_string())?);
    ensure(rel(got, want) <= 1e-3, || format!("non-smooth: {got} vs {want}"))?;
    Ok(format!("{points} points, max relative error {worst:.1e}, round trip identical"))
}

// 9
fn scalability() -> Outcome {
    let cfg = StructuredConfig {
        vars: 2000,
        depth: 12,
        seed: 9,
        max_sum_children: 3,
        edge_budget: 1_000_000,
        reuse_prob: 0.0,
    };
    let sc = random_structured_circuit_with(&cfg).map_err(|e| e.to_string())?;
    let pmf = sc.circuit;
    ensure(pmf.size() >= 1_000_000, || format!("only {} edges", pmf.size()))?;
    ensure(is_pair_indicator_form(&pmf), || "not in pair-indicator form".into())?;
    let start = Instant::now();
    let cdf = pmf_to_cdf_circuit(&pmf).map_err(|e| e.to_string())?;
    let marks = QueryMarks(
        (0..cfg.vars)
            .map(|i| match i % 3 {
                0 => QueryMark::Evidence0,
                1 => QueryMark::Evidence1,
                _ => QueryMark::Marginalized,
            })
            .collect(),
    );
    let p = query(&cdf, &marks).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(cdf.size() == pmf.size(), || "size changed".into())?;
    ensure(p.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&p), || format!("query gave {p}"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{} edges, transform + query in {elapsed:.2?}", pmf.size()))
}

const FUZZ_ALPHABET: &[u8] = b"0123456789 .-+e#\nabcdfgilnopqrstuvx*\t";

fn mutate(base: &str, rng: &mut ChaCha8Rng) -> String {
    let mut bytes = base.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..=4) {
        let len = bytes.len();
        match rng.gen_range(0..7) {
            0 if len > 0 => {
                bytes.remove(rng.gen_range(0..len));
            }
            1 => bytes.insert(rng.gen_range(0..=len), FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())]),
            2 if len > 0 => {
                let i = rng.gen_range(0..len);
                bytes[i] = FUZZ_ALPHABET[rng.gen_range(0..FUZZ_ALPHABET.len())];
            }
            3 => bytes.truncate(rng.gen_range(0..=len)),
            4 if len > 0 => {
                // arbitrary byte, possibly breaking UTF-8
                let i = rng.gen_range(0..len);
                bytes[i] = rng.gen();
            }
            _ => {
                let text = String::from_utf8_lossy(&bytes).into_owned();
                let mut lines: Vec<&str> = text.lines().collect();
                if !lines.is_empty() {
                    let (i, j) = (rng.gen_range(0..lines.len()), rng.gen_range(0..lines.len()));
                    match rng.gen_range(0..3) {
                        0 => lines.swap(i, j),
                        1 => lines.insert(i, lines[j]),
                        _ => {
                            lines.remove(i);
                        }
                    }
                }
                bytes = lines.join("\n").into_bytes();
            }
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

// 10
fn parser_robustness() -> Outcome {
    let mut corpus: Vec<Circuit> = Vec::new();
    corpus.push(parse(include_str!("../examples/data/fig1_cdf.pc")).map_err(|e| e.to_string())?);
    for s in 0..5u64 {
        corpus.push(random_structured_circuit(1 + s as usize * 2, 2, s).map_err(|e| e.to_string())?.circuit);
        corpus.push(random_continuous_circuit(&ContinuousConfig::new(1 + s as usize, 2, s, LeafMode::Pdf)));
        corpus.push(random_categorical_circuit(2, 3, s));
    }
    corpus.push(pmf_to_cdf_circuit(&corpus[1]).map_err(|e| e.to_string())?);
    corpus.push(cdf_to_pmf_circuit(&corpus[0]).map_err(|e| e.to_string())?);
    let mut texts = Vec::new();
    for c in &corpus {
        let text = serialize(c);
        let again = parse(&text).map_err(|e| format!("reparse failed: {e}"))?;
        ensure(&again == c, || "parse ∘ serialize is not the identity".into())?;
        ensure(serialize(&again) == text, || "serialization is not stable".into())?;
        texts.push(text);
    }
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut ok, mut rejected, mut panics) = (0usize, 0usize, 0usize);
    for _ in 0..100_000 {
        let base = &texts[rng.gen_range(0..texts.len())];
        let text = mutate(base, &mut rng);
        match panic::catch_unwind(AssertUnwindSafe(|| parse(&text).map(|c| (c.size(), serialize(&c))))) {
            Ok(Ok((_, s))) => {
                // anything accepted must round-trip too
                let again = parse(&s).map_err(|e| format!("accepted file does not reparse: {e}"))?;
                ensure(serialize(&again) == s, || "unstable serialization of a mutated file".into())?;
                ok += 1;
            }
            Ok(Err(e)) => {
                ensure(e.line >= 1 && e.column >= 1, || format!("error without position: {e:?}"))?;
                rejected += 1;
            }
            Err(_) => panics += 1,
        }
    }
    panic::set_hook(hook);
    ensure(panics == 0, || format!("{panics} panics"))?;
    Ok(format!(
        "{} round trips; 100000 mutants: {rejected} rejected with position, {ok} accepted, 0 panics",
        corpus.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("figure-1 polynomials", figure_one),
        ("CDF polynomial equals generating function", cdf_equals_pgf),
        ("circuit-level PMF/CDF transforms", circuit_transforms),
        ("Möbius inversion round trip", mobius_round_trip),
        ("marginal queries on CDF circuits", marginal_queries),
        ("Less-Than encoding", less_than_encoding),
        ("continuous PDF to CDF", continuous_cdf),
        ("continuous CDF to PDF", continuous_pdf),
        ("scalability", scalability),
        ("parser robustness", parser_robustness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
