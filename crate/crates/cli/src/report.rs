//! Run reports as JSON and as plain text.

use std::fmt::Write as _;

use priority_steiner::pnwst::PnwstRunReport;
use priority_steiner::pst::PstRunReport;
use priority_steiner::{AnyInstance, PnwstInstance, PstInstance};
use serde_json::{json, Map, Value};

pub const SCHEMA: u32 = 1;

/// Round to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(sig12(x)).map_or(Value::Null, Value::Number)
}

/// `weight / opt`, with 0/0 read as 1.
pub fn ratio(weight: f64, opt: f64) -> Option<f64> {
    if opt > 0.0 {
        Some(weight / opt)
    } else if weight == 0.0 {
        Some(1.0)
    } else {
        None
    }
}

pub enum Outcome<'a> {
    Pst(&'a PstInstance, &'a PstRunReport),
    Pnwst(&'a PnwstInstance, &'a PnwstRunReport),
}

pub struct RunReport<'a> {
    pub instance: &'a AnyInstance,
    /// Solver name as requested; `best` reports its pick separately.
    pub solver: &'static str,
    pub outcome: Outcome<'a>,
    pub feasible: Result<(), String>,
    pub opt: Option<f64>,
    pub wall_time: Option<f64>,
}

impl RunReport<'_> {
    pub fn weight(&self) -> f64 {
        match self.outcome {
            Outcome::Pst(_, r) => r.weight,
            Outcome::Pnwst(_, r) => r.weight,
        }
    }

    pub fn to_json(&self) -> Value {
        let g = self.instance.graph();
        let mut doc = Map::new();
        doc.insert("schema".into(), json!(SCHEMA));
        doc.insert(
            "instance".into(),
            json!({
                "kind": self.instance.kind(),
                "n": g.n(),
                "m": g.m(),
                "k": g.k(),
                "terminals": self.instance.demands().terminals().len(),
            }),
        );
        doc.insert("solver".into(), json!(self.solver));
        doc.insert("weight".into(), num(self.weight()));
        match self.outcome {
            Outcome::Pst(inst, r) => {
                let rates: Vec<Value> = r
                    .solution
                    .rates()
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| !l.is_absent())
                    .map(|(e, l)| {
                        let (a, b) = inst.graph().edge(e);
                        json!({"edge": e + 1, "u": a + 1, "v": b + 1, "level": l.0})
                    })
                    .collect();
                doc.insert("rates".into(), Value::Array(rates));
                let costs: Vec<Value> = r
                    .attachments
                    .iter()
                    .map(|a| json!({"terminal": a.terminal + 1, "cost": num(a.cost)}))
                    .collect();
                doc.insert("connection_costs".into(), Value::Array(costs));
                if !r.candidates.is_empty() {
                    doc.insert("chosen".into(), json!(r.tag.name()));
                    let c: Vec<Value> = r
                        .candidates
                        .iter()
                        .map(|(t, w)| json!({"solver": t.name(), "weight": num(*w)}))
                        .collect();
                    doc.insert("candidates".into(), Value::Array(c));
                }
            }
            Outcome::Pnwst(inst, r) => {
                let rates: Vec<Value> = r
                    .solution
                    .rates()
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| !l.is_absent())
                    .map(|(v, l)| json!({"vertex": v + 1, "level": l.0}))
                    .collect();
                doc.insert("rates".into(), Value::Array(rates));
                let edges: Vec<Value> = r
                    .solution
                    .tree_edges()
                    .iter()
                    .map(|&e| {
                        let (a, b) = inst.graph().edge(e);
                        json!([a + 1, b + 1])
                    })
                    .collect();
                doc.insert("tree_edges".into(), Value::Array(edges));
                doc.insert("cost_mode".into(), json!(r.config.cost_mode.name()));
                doc.insert("raw_weight".into(), num(r.raw_weight));
                let its: Vec<Value> = r
                    .iterations
                    .iter()
                    .map(|it| {
                        json!({
                            "gamma": num(it.gamma),
                            "h": it.h,
                            "forest_size": it.forest_size,
                            "delta_c": num(it.delta_c),
                        })
                    })
                    .collect();
                doc.insert("iterations".into(), Value::Array(its));
            }
        }
        doc.insert("feasible".into(), json!(self.feasible.is_ok()));
        if let Err(why) = &self.feasible {
            doc.insert("infeasibility".into(), json!(why));
        }
        if let Some(opt) = self.opt {
            doc.insert("opt".into(), num(opt));
            doc.insert(
                "ratio".into(),
                ratio(self.weight(), opt).map_or(Value::Null, num),
            );
        }
        if let Some(t) = self.wall_time {
            doc.insert("wall_time_s".into(), num(t));
        }
        Value::Object(doc)
    }

    pub fn to_text(&self) -> String {
        let g = self.instance.graph();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "instance {} n={} m={} k={} terminals={}",
            self.instance.kind(),
            g.n(),
            g.m(),
            g.k(),
            self.instance.demands().terminals().len()
        );
        let _ = writeln!(out, "solver {}", self.solver);
        let _ = writeln!(out, "weight {}", sig12(self.weight()));
        match self.outcome {
            Outcome::Pst(inst, r) => {
                if !r.candidates.is_empty() {
                    let _ = writeln!(out, "chosen {}", r.tag.name());
                }
                for (t, w) in &r.candidates {
                    let _ = writeln!(out, "  candidate {} {}", t.name(), sig12(*w));
                }
                for (e, l) in r.solution.rates().iter().enumerate() {
                    if !l.is_absent() {
                        let (a, b) = inst.graph().edge(e);
                        let _ = writeln!(out, "  edge ({},{}) rate {l}", a + 1, b + 1);
                    }
                }
                for a in &r.attachments {
                    let _ = writeln!(out, "  terminal {} cost {}", a.terminal + 1, sig12(a.cost));
                }
            }
            Outcome::Pnwst(_, r) => {
                let _ = writeln!(out, "cost-mode {}", r.config.cost_mode.name());
                for (v, l) in r.solution.rates().iter().enumerate() {
                    if !l.is_absent() {
                        let _ = writeln!(out, "  vertex {} rate {l}", v + 1);
                    }
                }
                for (i, it) in r.iterations.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  iteration {} gamma {} h {} forest {} delta {}",
                        i + 1,
                        sig12(it.gamma),
                        it.h,
                        it.forest_size,
                        sig12(it.delta_c)
                    );
                }
            }
        }
        match &self.feasible {
            Ok(()) => out.push_str("feasible yes\n"),
            Err(why) => {
                let _ = writeln!(out, "feasible no ({why})");
            }
        }
        if let Some(opt) = self.opt {
            let _ = writeln!(out, "opt {}", sig12(opt));
            match ratio(self.weight(), opt) {
                Some(r) => {
                    let _ = writeln!(out, "ratio {}", sig12(r));
                }
                None => out.push_str("ratio inf\n"),
            }
        }
        if let Some(t) = self.wall_time {
            let _ = writeln!(out, "time {}s", sig12(t));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(13.0 / 6.0), 2.16666666667);
        assert_eq!(sig12(3.0), 3.0);
        assert_eq!(num(0.1 + 0.2).to_string(), "0.3");
    }

    #[test]
    fn zero_optimum_ratio() {
        assert_eq!(ratio(0.0, 0.0), Some(1.0));
        assert_eq!(ratio(1.0, 0.0), None);
        assert_eq!(ratio(3.0, 2.0), Some(1.5));
    }
}
