//! Plain-text instance, solution and rate-tree files.
//!
//! One record per line, `#` starts a comment, vertex ids are 1-based.
//!
//! ```text
//! PST 1                      # or PNWST 1
//! k 2
//! levels 1 2                 # optional level values, default 1..k
//! nodes 3
//! source 1
//! terminal 3 2
//! edge 1 2 1 3               # PST: k weights; PNWST: bare "edge u v"
//! node 2 4 5                 # PNWST only; unlisted vertices weigh 0
//! ```
//!
//! Solutions list `rate <id> <level>` where the id is a 1-based edge index
//! for PST and a vertex for PNWST; PNWST solutions add `edge u v` lines.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::instance::{AnyInstance, Level, PnwstInstance, PriorityGraph, PstInstance};
use crate::solution::{EdgeRateSolution, VertexRateSolution};
use crate::spider::RateTree;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based line, absent for whole-file problems.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line: Some(line),
        message: message.into(),
    })
}

fn whole<T>(message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line: None,
        message: message.into(),
    })
}

/// Non-empty lines with comments stripped, as `(line number, fields)`.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn num<T: FromStr>(line: usize, field: &str, what: &str) -> Result<T, ParseError> {
    field
        .parse()
        .or_else(|_| err(line, format!("invalid {what} '{field}'")))
}

fn arity(line: usize, fields: &[&str], want: usize) -> Result<(), ParseError> {
    if fields.len() != want {
        return err(
            line,
            format!(
                "'{}' takes {} fields, found {}",
                fields[0],
                want - 1,
                fields.len() - 1
            ),
        );
    }
    Ok(())
}

/// A 1-based vertex field, returned 0-based.
fn vertex(line: usize, field: &str, n: Option<usize>) -> Result<usize, ParseError> {
    let v: usize = num(line, field, "vertex")?;
    let Some(n) = n else {
        return err(line, "'nodes' must come before vertex references");
    };
    if v == 0 || v > n {
        return err(line, format!("vertex {v} outside 1..={n}"));
    }
    Ok(v - 1)
}

fn weight(line: usize, field: &str) -> Result<f64, ParseError> {
    let w: f64 = num(line, field, "weight")?;
    if !w.is_finite() || w < 0.0 {
        return err(
            line,
            format!("weight {field} must be finite and nonnegative"),
        );
    }
    Ok(w)
}

pub fn parse_instance(text: &str) -> Result<AnyInstance, ParseError> {
    let mut lines = records(text);
    let Some((hl, header)) = lines.next() else {
        return whole("empty instance file");
    };
    let pst = match header.as_slice() {
        ["PST", v] | ["PNWST", v] => {
            let version: u32 = num(hl, v, "format version")?;
            if version != FORMAT_VERSION {
                return err(hl, format!("unsupported format version {version}"));
            }
            header[0] == "PST"
        }
        _ => return err(hl, "expected header 'PST 1' or 'PNWST 1'"),
    };

    let mut k: Option<usize> = None;
    let mut levels: Option<Vec<f64>> = None;
    let mut n: Option<usize> = None;
    let mut source: Option<usize> = None;
    let mut terminals: Vec<(usize, Level)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_weights: Vec<Vec<f64>> = Vec::new();
    let mut nodes: BTreeMap<usize, Vec<f64>> = BTreeMap::new();

    for (ln, f) in lines {
        match f[0] {
            "k" => {
                arity(ln, &f, 2)?;
                if k.is_some() {
                    return err(ln, "duplicate 'k'");
                }
                let value: usize = num(ln, f[1], "level count")?;
                if value == 0 {
                    return err(ln, "k must be at least 1");
                }
                k = Some(value);
            }
            "levels" => {
                let Some(k) = k else {
                    return err(ln, "'k' must come before 'levels'");
                };
                arity(ln, &f, k + 1)?;
                let values = f[1..]
                    .iter()
                    .map(|x| num::<f64>(ln, x, "level value"))
                    .collect::<Result<Vec<_>, _>>()?;
                levels = Some(values);
            }
            "nodes" => {
                arity(ln, &f, 2)?;
                if n.is_some() {
                    return err(ln, "duplicate 'nodes'");
                }
                n = Some(num(ln, f[1], "vertex count")?);
            }
            "source" => {
                arity(ln, &f, 2)?;
                if source.is_some() {
                    return err(ln, "duplicate 'source'");
                }
                source = Some(vertex(ln, f[1], n)?);
            }
            "terminal" => {
                arity(ln, &f, 3)?;
                let v = vertex(ln, f[1], n)?;
                let Some(k) = k else {
                    return err(ln, "'k' must come before terminals");
                };
                let level: u32 = num(ln, f[2], "level")?;
                if level == 0 || level as usize > k {
                    return err(ln, format!("level {level} outside 1..={k}"));
                }
                if terminals.iter().any(|&(t, _)| t == v) {
                    return err(ln, format!("terminal {} declared twice", v + 1));
                }
                terminals.push((v, Level(level)));
            }
            "edge" => {
                let a = vertex(ln, f.get(1).copied().unwrap_or(""), n)?;
                let b = vertex(ln, f.get(2).copied().unwrap_or(""), n)?;
                if pst {
                    let Some(k) = k else {
                        return err(ln, "'k' must come before edges");
                    };
                    arity(ln, &f, k + 3)?;
                    let row = f[3..]
                        .iter()
                        .map(|x| weight(ln, x))
                        .collect::<Result<Vec<_>, _>>()?;
                    edge_weights.push(row);
                } else {
                    arity(ln, &f, 3)?;
                }
                edges.push((a, b));
            }
            "node" => {
                if pst {
                    return err(ln, "'node' records are only allowed in PNWST files");
                }
                let Some(k) = k else {
                    return err(ln, "'k' must come before nodes");
                };
                arity(ln, &f, k + 2)?;
                let v = vertex(ln, f[1], n)?;
                let row = f[2..]
                    .iter()
                    .map(|x| weight(ln, x))
                    .collect::<Result<Vec<_>, _>>()?;
                if nodes.insert(v, row).is_some() {
                    return err(ln, format!("node {} listed twice", v + 1));
                }
            }
            other => return err(ln, format!("unknown record '{other}'")),
        }
    }

    let Some(k) = k else {
        return whole("missing 'k'");
    };
    let Some(n) = n else {
        return whole("missing 'nodes'");
    };
    let Some(source) = source else {
        return whole("missing 'source'");
    };
    let values = levels.unwrap_or_else(|| (1..=k).map(|p| p as f64).collect());
    let graph =
        PriorityGraph::with_level_values(n, edges, values).or_else(|e| whole(e.to_string()))?;
    let inst = if pst {
        AnyInstance::Pst(
            PstInstance::new(graph, source, &terminals, edge_weights)
                .or_else(|e| whole(e.to_string()))?,
        )
    } else {
        let mut weights = vec![vec![0.0; k]; n];
        for (v, row) in nodes {
            weights[v] = row;
        }
        AnyInstance::Pnwst(
            PnwstInstance::new(graph, source, &terminals, weights)
                .or_else(|e| whole(e.to_string()))?,
        )
    };
    Ok(inst)
}

fn write_row(out: &mut String, row: &[f64]) {
    for w in row {
        let _ = write!(out, " {w}");
    }
}

/// Serialize an instance; `comments` become leading `#` lines.
pub fn write_instance(inst: &AnyInstance, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let g = inst.graph();
    let d = inst.demands();
    let _ = writeln!(out, "{} {FORMAT_VERSION}", inst.kind());
    let _ = writeln!(out, "k {}", g.k());
    let default: Vec<f64> = (1..=g.k()).map(|p| p as f64).collect();
    if g.level_values() != default.as_slice() {
        out.push_str("levels");
        write_row(&mut out, g.level_values());
        out.push('\n');
    }
    let _ = writeln!(out, "nodes {}", g.n());
    let _ = writeln!(out, "source {}", d.source() + 1);
    for &t in d.terminals() {
        let _ = writeln!(out, "terminal {} {}", t + 1, d.priority(t));
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let _ = write!(out, "edge {} {}", a + 1, b + 1);
        if let AnyInstance::Pst(p) = inst {
            write_row(&mut out, &p.edge_weights()[e]);
        }
        out.push('\n');
    }
    if let AnyInstance::Pnwst(p) = inst {
        for (v, row) in p.vertex_weights().iter().enumerate() {
            if row.iter().any(|&w| w != 0.0) {
                let _ = write!(out, "node {}", v + 1);
                write_row(&mut out, row);
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_edge_solution(sol: &EdgeRateSolution) -> String {
    let mut out = String::from("# rate <edge index> <level>\n");
    for (e, r) in sol.rates().iter().enumerate() {
        if !r.is_absent() {
            let _ = writeln!(out, "rate {} {}", e + 1, r);
        }
    }
    out
}

pub fn write_vertex_solution(inst: &PnwstInstance, sol: &VertexRateSolution) -> String {
    let mut out = String::from("# rate <vertex> <level>, then tree edges\n");
    for (v, r) in sol.rates().iter().enumerate() {
        if !r.is_absent() {
            let _ = writeln!(out, "rate {} {}", v + 1, r);
        }
    }
    for &e in sol.tree_edges() {
        let (a, b) = inst.graph().edge(e);
        let _ = writeln!(out, "edge {} {}", a + 1, b + 1);
    }
    out
}

fn rate_line(
    ln: usize,
    f: &[&str],
    bound: usize,
    k: usize,
    what: &str,
) -> Result<(usize, Level), ParseError> {
    arity(ln, f, 3)?;
    let id: usize = num(ln, f[1], what)?;
    if id == 0 || id > bound {
        return err(ln, format!("{what} {id} outside 1..={bound}"));
    }
    let level: u32 = num(ln, f[2], "level")?;
    if level as usize > k {
        return err(ln, format!("level {level} outside 0..={k}"));
    }
    Ok((id - 1, Level(level)))
}

pub fn parse_edge_solution(text: &str, inst: &PstInstance) -> Result<EdgeRateSolution, ParseError> {
    let g = inst.graph();
    let mut rates = vec![Level::ABSENT; g.m()];
    for (ln, f) in records(text) {
        match f[0] {
            "rate" => {
                let (e, r) = rate_line(ln, &f, g.m(), g.k(), "edge index")?;
                rates[e] = r;
            }
            other => return err(ln, format!("unknown record '{other}'")),
        }
    }
    Ok(EdgeRateSolution::new(rates))
}

pub fn parse_vertex_solution(
    text: &str,
    inst: &PnwstInstance,
) -> Result<VertexRateSolution, ParseError> {
    let g = inst.graph();
    let mut rates = vec![Level::ABSENT; g.n()];
    let mut edges = Vec::new();
    for (ln, f) in records(text) {
        match f[0] {
            "rate" => {
                let (v, r) = rate_line(ln, &f, g.n(), g.k(), "vertex")?;
                rates[v] = r;
            }
            "edge" => {
                arity(ln, &f, 3)?;
                let a = vertex(ln, f[1], Some(g.n()))?;
                let b = vertex(ln, f[2], Some(g.n()))?;
                match g.find_edge(a, b) {
                    Some(e) => edges.push(e),
                    None => {
                        return err(ln, format!("no edge ({},{}) in the instance", a + 1, b + 1))
                    }
                }
            }
            other => return err(ln, format!("unknown record '{other}'")),
        }
    }
    Ok(VertexRateSolution::new(rates, edges))
}

/// Rate-tree files: `root v`, `vertex v level` and `edge u v` lines.
pub fn parse_rate_tree(text: &str) -> Result<RateTree, ParseError> {
    let mut root = None;
    let mut rates = Vec::new();
    let mut edges = Vec::new();
    let id = |ln: usize, field: &str| -> Result<usize, ParseError> {
        let v: usize = num(ln, field, "vertex")?;
        if v == 0 {
            return err(ln, "vertex ids start at 1");
        }
        Ok(v - 1)
    };
    for (ln, f) in records(text) {
        match f[0] {
            "root" => {
                arity(ln, &f, 2)?;
                root = Some(id(ln, f[1])?);
            }
            "vertex" => {
                arity(ln, &f, 3)?;
                rates.push((id(ln, f[1])?, Level(num(ln, f[2], "level")?)));
            }
            "edge" => {
                arity(ln, &f, 3)?;
                edges.push((id(ln, f[1])?, id(ln, f[2])?));
            }
            other => return err(ln, format!("unknown record '{other}'")),
        }
    }
    let Some(root) = root else {
        return whole("missing 'root'");
    };
    RateTree::new(root, rates, edges).or_else(|e| whole(e.to_string()))
}

pub fn write_rate_tree(tree: &RateTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "root {}", tree.root() + 1);
    for (&v, r) in tree.rates() {
        let _ = writeln!(out, "vertex {} {}", v + 1, r);
    }
    for &(a, b) in tree.edges() {
        let _ = writeln!(out, "edge {} {}", a + 1, b + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_random_pnwst, gen_random_pst, gen_tightness_pnwst, RandomSpec};

    #[test]
    fn parses_small_pst() {
        let text =
            "PST 1\n# a comment\nk 2\nnodes 2\nsource 1\nterminal 2 2\nedge 1 2 1 3 # trailing\n";
        let AnyInstance::Pst(inst) = parse_instance(text).unwrap() else {
            panic!("expected PST");
        };
        assert_eq!(inst.graph().n(), 2);
        assert_eq!(inst.weight(0, Level(2)), 3.0);
        assert_eq!(inst.priority(1), Level(2));
    }

    #[test]
    fn pnwst_nodes_default_to_zero() {
        let text = "PNWST 1\nk 1\nnodes 3\nsource 1\nterminal 3 1\nedge 1 2\nedge 2 3\nnode 2 5\n";
        let AnyInstance::Pnwst(inst) = parse_instance(text).unwrap() else {
            panic!("expected PNWST");
        };
        assert_eq!(inst.weight(1, Level(1)), 5.0);
        assert_eq!(inst.weight(2, Level(1)), 0.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "PST 1\nk 1\nnodes 2\nsource 1\nedge 1 3 1\n";
        let e = parse_instance(text).unwrap_err();
        assert_eq!(e.line, Some(5));
        assert!(e.to_string().starts_with("line 5:"), "{e}");
        let e = parse_instance("PST 1\nk 1\nnodes 2\nsource 1\nedge 1 2\n").unwrap_err();
        assert_eq!(e.line, Some(5));
        let e = parse_instance("STP 1\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = parse_instance("PST 1\nk 1\nnodes 2\nbogus 3\n").unwrap_err();
        assert_eq!(e.line, Some(4));
        let e = parse_instance("PST 1\nk 1\nnodes 2\n").unwrap_err();
        assert_eq!(e.line, None);
    }

    #[test]
    fn round_trips() {
        let spec = RandomSpec::new(8, 0.4, 3, 0.5, 11);
        for inst in [
            AnyInstance::Pst(gen_random_pst(&spec).unwrap()),
            AnyInstance::Pnwst(gen_random_pnwst(&spec).unwrap()),
            AnyInstance::Pnwst(gen_tightness_pnwst(5).unwrap()),
        ] {
            let text = write_instance(&inst, &["seed 11".to_string()]);
            assert_eq!(parse_instance(&text).unwrap(), inst);
        }
    }

    #[test]
    fn solutions_round_trip() {
        let AnyInstance::Pnwst(inst) = parse_instance(
            "PNWST 1\nk 2\nnodes 3\nsource 1\nterminal 3 2\nedge 1 2\nedge 2 3\nnode 2 1 2\n",
        )
        .unwrap() else {
            panic!()
        };
        let sol = VertexRateSolution::new(vec![Level(2); 3], vec![0, 1]);
        let text = write_vertex_solution(&inst, &sol);
        assert_eq!(parse_vertex_solution(&text, &inst).unwrap(), sol);

        let edge_sol = EdgeRateSolution::new(vec![Level(1), Level(0), Level(2)]);
        let text = write_edge_solution(&edge_sol);
        assert!(text.contains("rate 3 2"));
    }

    #[test]
    fn rate_tree_round_trip() {
        let text = "root 1\nvertex 1 2\nvertex 2 2\nvertex 3 1\nedge 1 2\nedge 2 3\n";
        let tree = parse_rate_tree(text).unwrap();
        assert_eq!(tree.len(), 3);
        assert_eq!(parse_rate_tree(&write_rate_tree(&tree)).unwrap(), tree);
    }
}
