//! CPLEX-LP text dump for debugging subproblems.

use std::fmt::Write as _;

use super::problem::LinearProgram;

fn term(out: &mut String, coef: f64, name: &str, first: bool) {
    if first {
        if coef < 0.0 {
            let _ = write!(out, "- {} {}", -coef, name);
        } else {
            let _ = write!(out, "{coef} {name}");
        }
    } else if coef < 0.0 {
        let _ = write!(out, " - {} {}", -coef, name);
    } else {
        let _ = write!(out, " + {coef} {name}");
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.[]".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Renders `lp` in CPLEX LP format.
pub fn write_lp(lp: &LinearProgram) -> String {
    let names: Vec<String> = lp.names.iter().map(|n| sanitize(n)).collect();
    let mut out = String::from("Minimize\n obj: ");
    let mut first = true;
    for (j, &c) in lp.objective.iter().enumerate() {
        if c != 0.0 {
            term(&mut out, c, &names[j], first);
            first = false;
        }
    }
    if lp.objective_offset != 0.0 {
        if first {
            let _ = write!(out, "{}", lp.objective_offset);
        } else {
            let _ = write!(out, " + {}", lp.objective_offset);
        }
    } else if first {
        out.push('0');
    }
    out.push_str("\nSubject To\n");
    for row in &lp.constraints {
        let _ = write!(out, " {}: ", sanitize(&row.name));
        let mut first = true;
        for &(j, a) in &row.terms {
            term(&mut out, a, &names[j], first);
            first = false;
        }
        if first {
            out.push_str("0 ");
            out.push_str(&names.first().cloned().unwrap_or_default());
        }
        let _ = writeln!(out, " {} {}", row.sense.symbol(), row.rhs);
    }
    out.push_str("Bounds\n");
    for (j, name) in names.iter().enumerate() {
        if lp.integer[j] {
            continue;
        }
        let (l, u) = (lp.lower[j], lp.upper[j]);
        match (l.is_finite(), u.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {name} free");
            }
            (true, true) => {
                let _ = writeln!(out, " {l} <= {name} <= {u}");
            }
            (true, false) => {
                let _ = writeln!(out, " {name} >= {l}");
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {name} <= {u}");
            }
        }
    }
    let binaries: Vec<&String> = names
        .iter()
        .enumerate()
        .filter(|(j, _)| lp.integer[*j])
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for n in binaries {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}
