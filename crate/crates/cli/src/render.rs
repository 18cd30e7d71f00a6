//! Human-readable report text. Numbers carry 12 significant digits.

use std::fmt::Write as _;

use mesostab::analysis::{EdgeReport, IdentityReport, MinorReport, StabilityReport};

use crate::selftest::SelfTestReport;

/// Rounds to 12 significant digits and prints the shortest form.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let magnitude = rounded.abs();
    if (1e-4..1e12).contains(&magnitude) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn labels(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn edge(e: &EdgeReport) -> String {
    format!("{}-{} ({})", e.u, e.v, sig(e.weight))
}

fn minor(m: &MinorReport) -> String {
    format!("det[{}] = {}", labels(&m.subset), sig(m.value))
}

pub fn stability(r: &StabilityReport) -> String {
    let mut out = String::new();
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(out, "verdict: {}", r.verdict.as_str());
    let _ = writeln!(out, "subject: {} (n = {}), tested matrix {}", r.subject, r.dimension, r.tested);
    if let Some(kind) = r.definiteness {
        let name = serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let _ = writeln!(out, "definiteness: {name}");
    }
    if let Some(rank) = r.rank_estimate {
        let _ = writeln!(out, "rank estimate: {rank}");
    }
    let _ = writeln!(out, "zero row sums: {}", yes_no(r.zero_row_sum));
    if r.zero_row_sum {
        let _ = writeln!(out, "maximal-rank certificate: {}", yes_no(r.maximal_rank_certificate));
    }
    if let Some(m) = &r.leading_minor_witness {
        let _ = writeln!(out, "failed leading minor: {}", minor(m));
    }
    if let Some(m) = &r.minor_witness {
        let _ = writeln!(out, "negative principal minor: {}", minor(m));
    }
    if let Some(v) = &r.vector_witness {
        let entries: Vec<String> = v.vector.iter().map(|x| sig(*x)).collect();
        let _ = writeln!(out, "negative direction: v = ({}), v^T M v = {}", entries.join(", "), sig(v.quadratic_form));
    }
    if let Some(s) = &r.structure {
        let _ = writeln!(out, "graph: {} vertices, {} edges", s.vertices, s.edges);
        match &s.positive_spanning_tree {
            Some(tree) => {
                let edges: Vec<String> = tree.iter().map(edge).collect();
                let _ = writeln!(out, "positive spanning tree: {}", edges.join(", "));
            }
            None => {
                let _ = writeln!(out, "positive spanning tree: none");
            }
        }
        if let Some(cut) = &s.negative_cut {
            let edges: Vec<String> = cut.crossing.iter().map(edge).collect();
            let _ = writeln!(out, "negative cut: V1 = {{{}}}, crossing {}", labels(&cut.side), edges.join(", "));
        }
        let _ = writeln!(out, "induced lines: {} ({} violating)", s.lines.len(), s.line_violations);
        for line in &s.lines {
            let path: Vec<String> = line.path.iter().map(usize::to_string).collect();
            let mut desc = format!("  {}", path.join("-"));
            match (line.negative_edges.as_slice(), line.bound) {
                ([], _) => desc.push_str(": no negative edge"),
                ([e], Some(b)) => {
                    let _ = write!(desc, ": negative edge {}, bound {}", edge(e), sig(b));
                }
                (many, _) => {
                    let _ = write!(desc, ": {} negative edges", many.len());
                }
            }
            if line.violated {
                desc.push_str(", violated");
            }
            let _ = writeln!(out, "{desc}");
        }
    }
    if let Some(k) = &r.kuramoto {
        let _ = writeln!(out, "oscillators: {}, mean frequency {}", k.oscillators, sig(k.mean_frequency));
        if let Some(phases) = &k.phases {
            let entries: Vec<String> = phases.iter().map(|x| sig(*x)).collect();
            let _ = writeln!(out, "equilibrium phases: ({})", entries.join(", "));
        }
        if let (Some(res), Some(it)) = (k.residual_norm, k.iterations) {
            let _ = writeln!(out, "residual norm: {} after {} Newton iteration(s)", sig(res), it);
        }
        if let Some(c) = k.spanning_phase_condition {
            let _ = writeln!(out, "spanning tree with |phase difference| < pi/2: {}", yes_no(c));
        }
    }
    for note in &r.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

pub fn identity(r: &IdentityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cut identity on {} vertices: {}", r.vertices, if r.all_hold { "holds" } else { "FAILS" });
    for c in &r.cases {
        let _ = writeln!(
            out,
            "  V1 = {{{}}}: residual {} (term scale {}, {} terms){}",
            labels(&c.v1),
            sig(c.residual),
            sig(c.magnitude),
            c.terms,
            if c.holds { "" } else { "  FAIL" }
        );
    }
    out
}

pub fn self_test(r: &SelfTestReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let _ = writeln!(out, "{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
    }
    let passed = r.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "{passed}/{} checks passed", r.checks.len());
    out
}
