//! Small built-in checks with known answers.

use serde::Serialize;

use mesostab::analysis::{analyze_kuramoto, analyze_matrix, identity_report, AnalysisOptions, Verdict};
use mesostab::kuramoto::{classify_stability, KuramotoSystem, NewtonOptions, PhaseState, StabilityVerdict};
use mesostab::minors::{characteristic_polynomial, principal_minor_combinatorial, principal_minor_direct};
use mesostab::sylvester::SylvesterOptions;
use mesostab::{SymmetricMatrix, WeightedGraph};

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct SelfTestReport {
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

fn indefinite_zero_row_sum() -> bool {
    let Ok(c) = SymmetricMatrix::from_rows(&[
        vec![0.0, 0.0, 1.0, -1.0],
        vec![0.0, -1.0, 1.0, 0.0],
        vec![1.0, 1.0, -2.0, 0.0],
        vec![-1.0, 0.0, 0.0, 1.0],
    ]) else {
        return false;
    };
    let poly_ok = characteristic_polynomial(&c).map(|p| p == vec![1.0, 2.0, -4.0, -4.0, 0.0]).unwrap_or(false);
    let report_ok = analyze_matrix(&c, &AnalysisOptions::default())
        .map(|r| r.verdict == Verdict::Fails && r.minor_witness.is_some_and(|m| m.value < 0.0))
        .unwrap_or(false);
    poly_ok && report_ok
}

fn signed_laplacian() -> bool {
    let Ok(g) = WeightedGraph::new(4, [(0, 1, 0.5), (0, 3, -3.0), (1, 2, 1.0), (1, 3, -2.0), (2, 3, 1.0)]) else {
        return false;
    };
    let expected = [
        [-2.5, -0.5, 0.0, 3.0],
        [-0.5, -0.5, -1.0, 2.0],
        [0.0, -1.0, 2.0, -1.0],
        [3.0, 2.0, -1.0, -4.0],
    ];
    let l = g.laplacian();
    (0..4).all(|i| (0..4).all(|j| l.get(i, j) == expected[i][j]))
}

fn forest_expansion() -> bool {
    let Ok(g) = WeightedGraph::new(4, [(0, 1, 0.5), (0, 3, -3.0), (1, 2, 1.0), (1, 3, -2.0), (2, 3, 1.0)]) else {
        return false;
    };
    let l = g.laplacian();
    (1u32..15).all(|mask| {
        let s: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
        match (principal_minor_combinatorial(&g, &s), principal_minor_direct(&l, &s)) {
            (Ok(a), Ok(b)) => (a - b).abs() <= 1e-9 * b.abs().max(1e-3),
            _ => false,
        }
    })
}

fn two_oscillators() -> bool {
    let Ok(sys) = KuramotoSystem::from_edges(vec![0.5, -0.5], [(0, 1, 1.0)]) else {
        return false;
    };
    let lock = analyze_kuramoto(
        &sys,
        &PhaseState::new(vec![0.0, 0.1]),
        &NewtonOptions::default(),
        &AnalysisOptions::default(),
    )
    .map(|r| r.verdict == Verdict::Passes)
    .unwrap_or(false);
    let anti = PhaseState::new(vec![std::f64::consts::PI - 0.5f64.asin(), 0.0]);
    let anti_fails = classify_stability(&sys, &anti)
        .map(|r| r.verdict == StabilityVerdict::Fails && r.positive_spanning_tree.is_none())
        .unwrap_or(false);
    lock && anti_fails
}

fn cut_identity() -> bool {
    let Ok(g) = WeightedGraph::new(4, [(0, 1, 0.5), (0, 3, -3.0), (1, 2, 1.0), (1, 3, -2.0), (2, 3, 1.0)]) else {
        return false;
    };
    identity_report(&g, None, &SylvesterOptions::default()).is_ok_and(|r| r.all_hold)
}

pub fn run() -> SelfTestReport {
    let checks = vec![
        Check { name: "indefinite zero-row-sum matrix is rejected", passed: indefinite_zero_row_sum() },
        Check { name: "signed graph Laplacian", passed: signed_laplacian() },
        Check { name: "principal minors as forest sums", passed: forest_expansion() },
        Check { name: "two-oscillator lock and anti-lock", passed: two_oscillators() },
        Check { name: "alternating cut identity", passed: cut_identity() },
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    SelfTestReport { checks, all_passed }
}
