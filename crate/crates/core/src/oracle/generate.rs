//! Seeded generators for tables and structured circuits.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_scale, OracleError, PmfTable, MAX_NETWORK_VARS, MAX_TABLE_VARS};
use crate::circuit::{Circuit, CircuitBuilder, ContinuousFamily, LeafMode, NodeId, VarIndex};

/// Random normalized table over `{0,1}^n`.
pub fn random_distribution(n: usize, seed: u64) -> Result<PmfTable, OracleError> {
    check_scale(n, MAX_TABLE_VARS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mass: Vec<f64> = (0..1usize << n).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = mass.iter().sum();
    for m in &mut mass {
        *m /= total;
    }
    PmfTable::new(n, mass)
}

#[derive(Clone, Debug)]
pub struct StructuredConfig {
    pub vars: usize,
    pub depth: usize,
    pub seed: u64,
    /// Largest number of children of a mixture node.
    pub max_sum_children: usize,
    /// Once the circuit has this many edges, remaining subcircuits are fully factorized.
    pub edge_budget: usize,
    /// Probability of reusing an existing node with the same scope.
    pub reuse_prob: f64,
}

impl StructuredConfig {
    pub fn new(vars: usize, depth: usize, seed: u64) -> Self {
        StructuredConfig { vars, depth, seed, max_sum_children: 3, edge_budget: 100_000, reuse_prob: 0.2 }
    }
}

/// A pair-indicator-form circuit, with the table it induces on the cube when
/// the variable count is small enough to enumerate.
#[derive(Clone, Debug)]
pub struct StructuredCircuit {
    pub circuit: Circuit,
    pub table: Option<PmfTable>,
}

pub fn random_structured_circuit(n: usize, depth: usize, seed: u64) -> Result<StructuredCircuit, OracleError> {
    random_structured_circuit_with(&StructuredConfig::new(n, depth, seed))
}

/// Random smooth, decomposable circuit over indicator leaves whose mixture
/// weights are normalized, so the induced cube function is a distribution.
///
/// The table is assembled alongside the circuit from mixture and product rules,
/// without evaluating the circuit.
pub fn random_structured_circuit_with(cfg: &StructuredConfig) -> Result<StructuredCircuit, OracleError> {
    if cfg.vars == 0 {
        return Err(OracleError::ScaleExceeded { n: 0, max: 0 });
    }
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        b: CircuitBuilder::binary(cfg.vars),
        edges: 0,
        cfg,
        track: cfg.vars <= MAX_NETWORK_VARS,
        leaves: vec![None; cfg.vars],
        pool: HashMap::new(),
    };
    let vars: Vec<VarIndex> = (0..cfg.vars).collect();
    let (root, table) = g.node(&vars, cfg.depth);
    let circuit = g.b.finish(root).expect("generator emits valid circuits");
    let table = table.map(|t| PmfTable::new(cfg.vars, t).expect("table has 2^n cells"));
    Ok(StructuredCircuit { circuit, table })
}

type Table = Option<Vec<f64>>;

struct Gen<'a> {
    rng: ChaCha8Rng,
    b: CircuitBuilder,
    edges: usize,
    cfg: &'a StructuredConfig,
    track: bool,
    leaves: Vec<Option<(NodeId, NodeId)>>,
    pool: HashMap<Vec<VarIndex>, Vec<(NodeId, Table)>>,
}

impl Gen<'_> {
    fn literals(&mut self, v: VarIndex) -> (NodeId, NodeId) {
        if let Some(l) = self.leaves[v] {
            return l;
        }
        let l = (self.b.ind(v), self.b.neg_ind(v));
        self.leaves[v] = Some(l);
        l
    }

    fn sum(&mut self, terms: &[(f64, NodeId)]) -> NodeId {
        self.edges += terms.len();
        self.b.sum(terms)
    }

    fn product(&mut self, children: &[NodeId]) -> NodeId {
        self.edges += children.len();
        self.b.product(children)
    }

    fn weights(&mut self, k: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| self.rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// Subcircuit over the sorted variable list `vars`.
    fn node(&mut self, vars: &[VarIndex], depth: usize) -> (NodeId, Table) {
        if let Some(cands) = self.pool.get(vars) {
            if !cands.is_empty() && self.rng.gen_bool(self.cfg.reuse_prob) {
                let pick = self.rng.gen_range(0..cands.len());
                return cands[pick].clone();
            }
        }
        let out = self.fresh(vars, depth);
        self.pool.entry(vars.to_vec()).or_default().push(out.clone());
        out
    }

    fn fresh(&mut self, vars: &[VarIndex], depth: usize) -> (NodeId, Table) {
        if vars.len() == 1 {
            let (x, nx) = self.literals(vars[0]);
            let theta = self.rng.gen_range(0.05..0.95);
            let id = self.sum(&[(theta, x), (1.0 - theta, nx)]);
            return (id, self.track.then(|| vec![1.0 - theta, theta]));
        }
        let over_budget = self.edges >= self.cfg.edge_budget;
        if depth == 0 || over_budget {
            let parts: Vec<Vec<VarIndex>> = vars.iter().map(|&v| vec![v]).collect();
            return self.product_of(vars, &parts, 0);
        }
        if self.rng.gen_bool(0.5) {
            let k = self.rng.gen_range(2..=self.cfg.max_sum_children.max(2));
            let ws = self.weights(k);
            let mut terms = Vec::with_capacity(k);
            let mut table = self.track.then(|| vec![0.0; 1 << vars.len()]);
            for w in ws {
                let (id, t) = self.node(vars, depth - 1);
                terms.push((w, id));
                if let (Some(acc), Some(t)) = (table.as_mut(), t) {
                    for (a, v) in acc.iter_mut().zip(t) {
                        *a += w * v;
                    }
                }
            }
            (self.sum(&terms), table)
        } else {
            let mut shuffled = vars.to_vec();
            shuffled.shuffle(&mut self.rng);
            let m = self.rng.gen_range(2..=vars.len().min(3));
            let mut cuts: Vec<usize> =
                rand::seq::index::sample(&mut self.rng, vars.len() - 1, m - 1).into_iter().map(|c| c + 1).collect();
            cuts.sort_unstable();
            let mut parts = Vec::with_capacity(m);
            let mut start = 0;
            for c in cuts.into_iter().chain(std::iter::once(vars.len())) {
                let mut p = shuffled[start..c].to_vec();
                p.sort_unstable();
                parts.push(p);
                start = c;
            }
            self.product_of(vars, &parts, depth - 1)
        }
    }

    fn product_of(&mut self, vars: &[VarIndex], parts: &[Vec<VarIndex>], depth: usize) -> (NodeId, Table) {
        let mut ids = Vec::with_capacity(parts.len());
        let mut tables = Vec::with_capacity(parts.len());
        for p in parts {
            let (id, t) = self.node(p, depth);
            ids.push(id);
            tables.push(t);
        }
        let id = self.product(&ids);
        let table = if self.track {
            let tables: Vec<Vec<f64>> = tables.into_iter().map(|t| t.expect("tracked")).collect();
            Some(outer_product(vars, parts, &tables))
        } else {
            None
        };
        (id, table)
    }
}

/// Table over `vars` of the product of independent tables over `parts`.
fn outer_product(vars: &[VarIndex], parts: &[Vec<VarIndex>], tables: &[Vec<f64>]) -> Vec<f64> {
    let pos: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| p.iter().map(|v| vars.iter().position(|u| u == v).expect("part of vars")).collect())
        .collect();
    (0..1usize << vars.len())
        .map(|mask| {
            pos.iter()
                .zip(tables)
                .map(|(ps, t)| {
                    let sub = ps.iter().enumerate().fold(0, |acc, (j, &p)| acc | ((mask >> p & 1) << j));
                    t[sub]
                })
                .product()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ContinuousConfig {
    pub vars: usize,
    pub depth: usize,
    pub seed: u64,
    pub mode: LeafMode,
    /// Leaf families to draw from.
    pub families: Vec<FamilyKind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Gaussian,
    Uniform,
    Exponential,
    Logistic,
}

impl ContinuousConfig {
    pub fn new(vars: usize, depth: usize, seed: u64, mode: LeafMode) -> Self {
        ContinuousConfig {
            vars,
            depth,
            seed,
            mode,
            families: vec![FamilyKind::Gaussian, FamilyKind::Uniform, FamilyKind::Exponential, FamilyKind::Logistic],
        }
    }
}

/// Random smooth, decomposable mixture circuit over continuous leaves with
/// nonnegative weights summing to one at every sum node.
pub fn random_continuous_circuit(cfg: &ContinuousConfig) -> Circuit {
    assert!(cfg.vars >= 1 && !cfg.families.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = CircuitBuilder::continuous(cfg.vars);
    let vars: Vec<VarIndex> = (0..cfg.vars).collect();
    let root = continuous_node(&mut rng, &mut b, cfg, &vars, cfg.depth);
    b.finish(root).expect("generator emits valid circuits")
}

fn random_family(rng: &mut ChaCha8Rng, kinds: &[FamilyKind]) -> ContinuousFamily {
    match kinds[rng.gen_range(0..kinds.len())] {
        FamilyKind::Gaussian => {
            ContinuousFamily::Gaussian { mean: rng.gen_range(-1.5..1.5), std_dev: rng.gen_range(0.5..2.0) }
        }
        FamilyKind::Uniform => {
            let lo = rng.gen_range(-3.0..0.0);
            ContinuousFamily::Uniform { lo, hi: lo + rng.gen_range(1.0..4.0) }
        }
        FamilyKind::Exponential => ContinuousFamily::Exponential { rate: rng.gen_range(0.5..2.0) },
        FamilyKind::Logistic => {
            ContinuousFamily::Logistic { loc: rng.gen_range(-1.5..1.5), scale: rng.gen_range(0.3..1.5) }
        }
    }
}

fn normalized(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn continuous_node(
    rng: &mut ChaCha8Rng,
    b: &mut CircuitBuilder,
    cfg: &ContinuousConfig,
    vars: &[VarIndex],
    depth: usize,
) -> NodeId {
    if vars.len() == 1 {
        let k = rng.gen_range(1..=3);
        let leaves: Vec<NodeId> = (0..k)
            .map(|_| {
                let fam = random_family(rng, &cfg.families);
                b.continuous_leaf(vars[0], fam, cfg.mode)
            })
            .collect();
        if k == 1 {
            return leaves[0];
        }
        let ws = normalized(rng, k);
        let terms: Vec<(f64, NodeId)> = ws.into_iter().zip(leaves).collect();
        return b.sum(&terms);
    }
    if depth == 0 {
        let kids: Vec<NodeId> = vars.iter().map(|&v| continuous_node(rng, b, cfg, &[v], 0)).collect();
        return b.product(&kids);
    }
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(2..=3);
        let ws = normalized(rng, k);
        let terms: Vec<(f64, NodeId)> =
            ws.into_iter().map(|w| (w, continuous_node(rng, b, cfg, vars, depth - 1))).collect();
        b.sum(&terms)
    } else {
        let mut shuffled = vars.to_vec();
        shuffled.shuffle(rng);
        let cut = rng.gen_range(1..vars.len());
        let (l, r) = shuffled.split_at(cut);
        let a = continuous_node(rng, b, cfg, l, depth - 1);
        let c = continuous_node(rng, b, cfg, r, depth - 1);
        b.product(&[a, c])
    }
}
