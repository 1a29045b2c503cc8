//! Rooted flow model in CPLEX LP text format.
//!
//! Variables (1-based ids): `x_<i>` binary site choice, `y_<j>_<k>` flow on
//! the directed reach arc `j -> k`, `y_0_<r>` flow from the source into the
//! root, `x0` residue absorbed at the source. The source emits `n` units;
//! every selected site absorbs one, the rest returns as `x0`. Flow may only
//! enter selected sites, so the selection is connected to the root.

use std::fmt::Write;

use crate::error::Result;
use crate::instance::{Instance, ReachGraph};

use super::check_node;

fn num(v: f64) -> String {
    format!("{v}")
}

/// Writes `terms` as an LP expression; an empty expression becomes `0 x_<fallback>`.
fn expr(terms: &[(f64, String)], fallback: usize) -> String {
    if terms.is_empty() {
        return format!("0 x_{}", fallback + 1);
    }
    let mut s = String::new();
    for (k, (c, v)) in terms.iter().enumerate() {
        let sign = if *c < 0.0 { "-" } else { "+" };
        if k == 0 {
            if *c < 0.0 {
                s.push_str("- ");
            }
        } else {
            let _ = write!(s, " {sign} ");
        }
        let a = c.abs();
        if a == 1.0 {
            s.push_str(v);
        } else {
            let _ = write!(s, "{} {v}", num(a));
        }
    }
    s
}

/// The rooted model for `root` (0-based).
pub fn export_milp(inst: &Instance, reach: &ReachGraph, root: usize) -> Result<String> {
    check_node(inst, root)?;
    let n = inst.node_count();
    let nn = n as f64;
    let x = |i: usize| format!("x_{}", i + 1);
    let y = |j: usize, k: usize| format!("y_{}_{}", j + 1, k + 1);
    let source = format!("y_0_{}", root + 1);

    let mut out = String::new();
    let _ = writeln!(out, "\\ rooted flow model: instance {}, root {}", inst.name(), root + 1);
    out.push_str("Minimize\n");
    let obj: Vec<(f64, String)> = (0..n).map(|i| (inst.cost(i), x(i))).collect();
    let _ = writeln!(out, " obj: {}", expr(&obj, root));

    out.push_str("Subject To\n");
    for i in 0..n {
        let terms: Vec<(f64, String)> = reach
            .neighborhood(i)
            .iter()
            .filter(|&&j| inst.capacity(j) != 0.0)
            .map(|&j| (inst.capacity(j), x(j)))
            .collect();
        let _ = writeln!(out, " demand_{}: {} >= {}", i + 1, expr(&terms, i), num(inst.demand(i)));
    }
    for k in 0..n {
        let mut terms: Vec<(f64, String)> = Vec::new();
        if k == root {
            terms.push((1.0, source.clone()));
        }
        for &j in reach.neighbors(k) {
            terms.push((1.0, y(j, k)));
        }
        for &j in reach.neighbors(k) {
            terms.push((-1.0, y(k, j)));
        }
        terms.push((-1.0, x(k)));
        let _ = writeln!(out, " flow_{}: {} = 0", k + 1, expr(&terms, k));
    }
    let _ = writeln!(out, " source: x0 + {source} = {n}");
    let mut sink: Vec<(f64, String)> = (0..n).map(|i| (1.0, x(i))).collect();
    sink.push((-1.0, source.clone()));
    let _ = writeln!(out, " sink: {} = 0", expr(&sink, root));
    let _ = writeln!(out, " root: {} = 1", x(root));
    let _ = writeln!(out, " cap_0_{}: {source} - {} {} <= 0", root + 1, num(nn), x(root));
    for j in 0..n {
        for &k in reach.neighbors(j) {
            let _ = writeln!(out, " cap_{}_{}: {} - {} {} <= 0", j + 1, k + 1, y(j, k), num(nn), x(k));
        }
    }

    out.push_str("Bounds\n");
    let _ = writeln!(out, " 0 <= x0 <= {n}");
    let _ = writeln!(out, " 0 <= {source} <= {n}");
    for j in 0..n {
        for &k in reach.neighbors(j) {
            let _ = writeln!(out, " 0 <= {} <= {n}", y(j, k));
        }
    }
    out.push_str("Binaries\n");
    for i in 0..n {
        let _ = writeln!(out, " {}", x(i));
    }
    out.push_str("End\n");
    Ok(out)
}
