//! Line-oriented text format.
//!
//! ```text
//! pcirc 1
//! tag cdf
//! var 0 binary
//! var 1 binary
//! leaf n0 ind 0
//! leaf n1 nind 1
//! prod n2 n0 n1
//! sum n3 0.5 n2 0.5 n0
//! root n3
//! ```
//!
//! Tokens are separated by whitespace and `#` starts a comment. Variables are
//! declared in index order, and every node must be declared before it is used
//! as a child, which makes the DAG acyclic by construction. Other directives:
//! `var <i> continuous`, `var <i> categorical <k>`, `leaf <id> aff <var> <a> <b>`,
//! `leaf <id> eq <var> <value>`, `const <id> <value>`, and
//! `leaf <id> gauss|unif|expo|logi <var> pdf|cdf <params>` with parameters
//! `mean std`, `lo hi`, `rate` and `loc scale` respectively.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::circuit::{
    BuildError, Circuit, ContinuousFamily, LeafFn, LeafMode, Node, NodeId, SemanticsTag, VarDecl, VarKind,
};

pub const HEADER: &str = "pcirc 1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}")]
    Syntax { expected: String },
    #[error("node id `{0}` is already declared")]
    DuplicateId(String),
    #[error("`{0}` is used before it is declared")]
    UseBeforeDecl(String),
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("directive `{0}` appears more than once")]
    Repeated(&'static str),
    #[error(transparent)]
    Invalid(BuildError),
}

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn syntax(line: usize, column: usize, expected: impl Into<String>) -> Self {
        ParseError { line, column, kind: ParseErrorKind::Syntax { expected: expected.into() } }
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    // column just past the last token, for "expected more" errors
    end: usize,
}

impl<'a> Line<'a> {
    fn split(number: usize, raw: &'a str) -> Self {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        let mut column = 1;
        for (pos, ch) in content.char_indices() {
            if ch.is_whitespace() {
                if let Some((s, col)) = start.take() {
                    tokens.push(Token { text: &content[s..pos], column: col });
                }
            } else if start.is_none() {
                start = Some((pos, column));
            }
            column += 1;
        }
        if let Some((s, col)) = start {
            tokens.push(Token { text: &content[s..], column: col });
        }
        Line { number, tokens, end: column }
    }

    fn get(&self, i: usize, expected: &str) -> Result<Token<'a>, ParseError> {
        self.tokens.get(i).copied().ok_or_else(|| ParseError::syntax(self.number, self.end, expected))
    }

    fn no_more(&self, i: usize) -> Result<(), ParseError> {
        match self.tokens.get(i) {
            Some(t) => Err(ParseError::syntax(self.number, t.column, "end of line")),
            None => Ok(()),
        }
    }

    fn number(&self, i: usize, what: &str) -> Result<f64, ParseError> {
        let t = self.get(i, what)?;
        match t.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseError::syntax(self.number, t.column, format!("{what} (a finite number)"))),
        }
    }

    fn index(&self, i: usize, what: &str) -> Result<usize, ParseError> {
        let t = self.get(i, what)?;
        t.text
            .parse::<usize>()
            .map_err(|_| ParseError::syntax(self.number, t.column, format!("{what} (a non-negative integer)")))
    }
}

struct Parser {
    vars: Vec<VarDecl>,
    var_lines: Vec<(usize, usize)>,
    nodes: Vec<Node>,
    node_pos: Vec<(usize, usize)>,
    ids: HashMap<String, NodeId>,
    root: Option<(NodeId, usize, usize)>,
    tag: Option<SemanticsTag>,
}

impl Parser {
    fn declare(&mut self, line: &Line, id: Token, node: Node) -> Result<(), ParseError> {
        if self.ids.contains_key(id.text) {
            return Err(ParseError {
                line: line.number,
                column: id.column,
                kind: ParseErrorKind::DuplicateId(id.text.to_string()),
            });
        }
        self.ids.insert(id.text.to_string(), NodeId::new(self.nodes.len()));
        self.nodes.push(node);
        self.node_pos.push((line.number, id.column));
        Ok(())
    }

    fn child(&self, line: &Line, i: usize) -> Result<NodeId, ParseError> {
        let t = line.get(i, "child node id")?;
        self.ids.get(t.text).copied().ok_or_else(|| ParseError {
            line: line.number,
            column: t.column,
            kind: ParseErrorKind::UseBeforeDecl(t.text.to_string()),
        })
    }

    fn leaf_var(&self, line: &Line, i: usize) -> Result<usize, ParseError> {
        let v = line.index(i, "variable index")?;
        if v >= self.vars.len() {
            let t = line.tokens[i];
            return Err(ParseError {
                line: line.number,
                column: t.column,
                kind: ParseErrorKind::UseBeforeDecl(format!("variable {v}")),
            });
        }
        Ok(v)
    }

    fn directive(&mut self, line: &Line) -> Result<(), ParseError> {
        let kw = line.tokens[0];
        match kw.text {
            "var" => {
                let idx = line.index(1, "variable index")?;
                if idx != self.vars.len() {
                    return Err(ParseError::syntax(
                        line.number,
                        line.tokens[1].column,
                        format!("variable index {}", self.vars.len()),
                    ));
                }
                let kind = line.get(2, "binary, continuous or categorical")?;
                let (decl, used) = match kind.text {
                    "binary" => (VarDecl::binary(idx), 3),
                    "continuous" => (VarDecl::continuous(idx), 3),
                    "categorical" => (VarDecl::categorical(idx, line.index(3, "domain size")?), 4),
                    _ => return Err(ParseError::syntax(line.number, kind.column, "binary, continuous or categorical")),
                };
                line.no_more(used)?;
                self.vars.push(decl);
                self.var_lines.push((line.number, kw.column));
            }
            "leaf" => {
                let id = line.get(1, "node id")?;
                let kind = line.get(2, "leaf kind")?;
                let var = self.leaf_var(line, 3)?;
                let (func, used) = match kind.text {
                    "ind" => (LeafFn::Ind, 4),
                    "nind" => (LeafFn::NegInd, 4),
                    "aff" => (LeafFn::Affine { a: line.number(4, "a")?, b: line.number(5, "b")? }, 6),
                    "eq" => (LeafFn::Eq(line.index(4, "category")?), 5),
                    "gauss" | "unif" | "expo" | "logi" => {
                        let mode_tok = line.get(4, "pdf or cdf")?;
                        let mode = match mode_tok.text {
                            "pdf" => LeafMode::Pdf,
                            "cdf" => LeafMode::Cdf,
                            _ => return Err(ParseError::syntax(line.number, mode_tok.column, "pdf or cdf")),
                        };
                        let (family, used) = match kind.text {
                            "gauss" => (
                                ContinuousFamily::Gaussian {
                                    mean: line.number(5, "mean")?,
                                    std_dev: line.number(6, "std")?,
                                },
                                7,
                            ),
                            "unif" => {
                                (ContinuousFamily::Uniform { lo: line.number(5, "lo")?, hi: line.number(6, "hi")? }, 7)
                            }
                            "expo" => (ContinuousFamily::Exponential { rate: line.number(5, "rate")? }, 6),
                            _ => (
                                ContinuousFamily::Logistic {
                                    loc: line.number(5, "loc")?,
                                    scale: line.number(6, "scale")?,
                                },
                                7,
                            ),
                        };
                        (LeafFn::Continuous { family, mode }, used)
                    }
                    _ => {
                        return Err(ParseError::syntax(
                            line.number,
                            kind.column,
                            "leaf kind (ind, nind, aff, eq, gauss, unif, expo or logi)",
                        ))
                    }
                };
                line.no_more(used)?;
                self.declare(line, id, Node::Leaf { var, func })?;
            }
            "const" => {
                let id = line.get(1, "node id")?;
                let v = line.number(2, "value")?;
                line.no_more(3)?;
                self.declare(line, id, Node::Const(v))?;
            }
            "sum" => {
                let id = line.get(1, "node id")?;
                let (mut children, mut weights) = (Vec::new(), Vec::new());
                let mut i = 2;
                loop {
                    weights.push(line.number(i, "weight")?);
                    children.push(self.child(line, i + 1)?);
                    i += 2;
                    if i >= line.tokens.len() {
                        break;
                    }
                }
                self.declare(line, id, Node::Sum { children, weights })?;
            }
            "prod" => {
                let id = line.get(1, "node id")?;
                let mut children = vec![self.child(line, 2)?];
                for i in 3..line.tokens.len() {
                    children.push(self.child(line, i)?);
                }
                self.declare(line, id, Node::Product { children })?;
            }
            "root" => {
                if self.root.is_some() {
                    return Err(ParseError {
                        line: line.number,
                        column: kw.column,
                        kind: ParseErrorKind::Repeated("root"),
                    });
                }
                let r = self.child(line, 1)?;
                line.no_more(2)?;
                self.root = Some((r, line.number, kw.column));
            }
            "tag" => {
                if self.tag.is_some() {
                    return Err(ParseError {
                        line: line.number,
                        column: kw.column,
                        kind: ParseErrorKind::Repeated("tag"),
                    });
                }
                let t = line.get(1, "pmf, cdf or pgf")?;
                self.tag = Some(match t.text {
                    "pmf" => SemanticsTag::Pmf,
                    "cdf" => SemanticsTag::Cdf,
                    "pgf" => SemanticsTag::Pgf,
                    _ => return Err(ParseError::syntax(line.number, t.column, "pmf, cdf or pgf")),
                });
                line.no_more(2)?;
            }
            other => {
                return Err(ParseError {
                    line: line.number,
                    column: kw.column,
                    kind: ParseErrorKind::UnknownKeyword(other.to_string()),
                })
            }
        }
        Ok(())
    }

    fn position_of(&self, e: &BuildError, fallback: (usize, usize)) -> (usize, usize) {
        let node = match *e {
            BuildError::DanglingChild { node, .. }
            | BuildError::WeightArityMismatch { node, .. }
            | BuildError::UndeclaredVariable { node, .. }
            | BuildError::LeafKindMismatch { node, .. }
            | BuildError::InvalidParameter { node, .. } => Some(node),
            BuildError::NoChildren(node) => Some(node),
            BuildError::BadVariableIndex(v) | BuildError::EmptyDomain(v) => {
                return self.var_lines.get(v).copied().unwrap_or(fallback)
            }
            BuildError::EmptyCircuit | BuildError::DanglingRoot(_) => None,
        };
        node.and_then(|n| self.node_pos.get(n).copied()).unwrap_or(fallback)
    }
}

/// Parses a circuit file.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, raw)| Line::split(i + 1, raw)).filter(|l| !l.tokens.is_empty());
    let header = lines.next().ok_or_else(|| ParseError::syntax(1, 1, format!("header `{HEADER}`")))?;
    if header.tokens.len() != 2 || header.tokens[0].text != "pcirc" || header.tokens[1].text != "1" {
        return Err(ParseError::syntax(header.number, 1, format!("header `{HEADER}`")));
    }
    let mut p = Parser {
        vars: Vec::new(),
        var_lines: Vec::new(),
        nodes: Vec::new(),
        node_pos: Vec::new(),
        ids: HashMap::new(),
        root: None,
        tag: None,
    };
    let mut last = header.number;
    for line in lines {
        last = line.number;
        p.directive(&line)?;
    }
    let (root, rl, rc) = p.root.ok_or_else(|| ParseError::syntax(last + 1, 1, "`root` directive"))?;
    let Parser { vars, nodes, .. } = &p;
    Circuit::build(vars.clone(), nodes.clone(), root).map(|c| c.with_tag(p.tag)).map_err(|e| {
        let (line, column) = p.position_of(&e, (rl, rc));
        ParseError { line, column, kind: ParseErrorKind::Invalid(e) }
    })
}

/// Number formatting shared with the command line: the shortest decimal that
/// reads back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

struct Serialized<'a>(&'a Circuit);

impl fmt::Display for Serialized<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.0;
        writeln!(f, "{HEADER}")?;
        if let Some(tag) = c.tag() {
            writeln!(f, "tag {}", tag.as_str())?;
        }
        for (i, kind) in c.var_kinds().iter().enumerate() {
            match kind {
                VarKind::Binary => writeln!(f, "var {i} binary")?,
                VarKind::Continuous => writeln!(f, "var {i} continuous")?,
                VarKind::Categorical { k } => writeln!(f, "var {i} categorical {k}")?,
            }
        }
        let mut line = String::new();
        for (i, node) in c.nodes().iter().enumerate() {
            line.clear();
            match node {
                Node::Leaf { var, func } => {
                    write!(line, "leaf n{i} ")?;
                    match func {
                        LeafFn::Ind => write!(line, "ind {var}")?,
                        LeafFn::NegInd => write!(line, "nind {var}")?,
                        LeafFn::Affine { a, b } => write!(line, "aff {var} {} {}", fmt_f64(*a), fmt_f64(*b))?,
                        LeafFn::Eq(v) => write!(line, "eq {var} {v}")?,
                        LeafFn::Continuous { family, mode } => {
                            let mode = match mode {
                                LeafMode::Pdf => "pdf",
                                LeafMode::Cdf => "cdf",
                            };
                            match *family {
                                ContinuousFamily::Gaussian { mean, std_dev } => {
                                    write!(line, "gauss {var} {mode} {} {}", fmt_f64(mean), fmt_f64(std_dev))?
                                }
                                ContinuousFamily::Uniform { lo, hi } => {
                                    write!(line, "unif {var} {mode} {} {}", fmt_f64(lo), fmt_f64(hi))?
                                }
                                ContinuousFamily::Exponential { rate } => {
                                    write!(line, "expo {var} {mode} {}", fmt_f64(rate))?
                                }
                                ContinuousFamily::Logistic { loc, scale } => {
                                    write!(line, "logi {var} {mode} {} {}", fmt_f64(loc), fmt_f64(scale))?
                                }
                            }
                        }
                    }
                }
                Node::Const(v) => write!(line, "const n{i} {}", fmt_f64(*v))?,
                Node::Sum { children, weights } => {
                    write!(line, "sum n{i}")?;
                    for (ch, w) in children.iter().zip(weights) {
                        write!(line, " {} {ch}", fmt_f64(*w))?;
                    }
                }
                Node::Product { children } => {
                    write!(line, "prod n{i}")?;
                    for ch in children {
                        write!(line, " {ch}")?;
                    }
                }
            }
            writeln!(f, "{line}")?;
        }
        writeln!(f, "root {}", c.root())
    }
}

/// Deterministic text for a circuit; node `i` of the arena is named `n{i}`.
pub fn serialize(c: &Circuit) -> String {
    Serialized(c).to_string()
}
