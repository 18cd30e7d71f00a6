//! End-to-end analyses producing serializable reports.
//!
//! Reports use 1-based vertex labels, matching the input formats.

use serde::Serialize;

use crate::error::Result;
use crate::graph::{coates_graph, Edge, WeightedGraph};
use crate::kuramoto::{
    classify_stability_with, solve_equilibrium, spanning_phase_condition, KuramotoSystem, NewtonOptions,
    PhaseState, StabilityVerdict,
};
use crate::matrix::SymmetricMatrix;
use crate::structure::{find_negative_cut, line_obstruction_scan_with, positive_spanning_tree, verify_cut_identity};
use crate::sylvester::{
    is_psd_full, is_psd_zero_row_sum, Definiteness, DefinitenessVerdict, SylvesterOptions, Witness,
};

/// Which semi-definiteness a matrix analysis tests for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Test `M` itself for positive semi-definiteness.
    #[default]
    Psd,
    /// Test `M` for negative semi-definiteness, i.e. `-M` for positive.
    Nsd,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub sylvester: SylvesterOptions,
    pub target: Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "passes necessary condition")]
    Passes,
    #[serde(rename = "fails necessary condition")]
    Fails,
    #[serde(rename = "degenerate")]
    Degenerate,
    #[serde(rename = "no equilibrium")]
    NoEquilibrium,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Passes => 0,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Passes => "passes necessary condition",
            Verdict::Fails => "fails necessary condition",
            Verdict::Degenerate => "degenerate",
            Verdict::NoEquilibrium => "no equilibrium",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeReport {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl From<&Edge> for EdgeReport {
    fn from(e: &Edge) -> Self {
        EdgeReport { u: e.u + 1, v: e.v + 1, weight: e.weight }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorReport {
    pub subset: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorReport {
    pub vector: Vec<f64>,
    pub quadratic_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutReport {
    pub side: Vec<usize>,
    pub crossing: Vec<EdgeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineReport {
    pub path: Vec<usize>,
    pub negative_edges: Vec<EdgeReport>,
    pub bound: Option<f64>,
    pub violated: bool,
}

/// Diagnostics on the graph whose Laplacian is the tested matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub vertices: usize,
    pub edges: usize,
    pub positive_spanning_tree: Option<Vec<EdgeReport>>,
    pub negative_cut: Option<CutReport>,
    pub lines: Vec<LineReport>,
    pub line_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KuramotoReport {
    pub oscillators: usize,
    pub mean_frequency: f64,
    pub phases: Option<Vec<f64>>,
    pub residual_norm: Option<f64>,
    pub iterations: Option<usize>,
    pub singular_steps: Option<usize>,
    pub spanning_phase_condition: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub subject: &'static str,
    pub verdict: Verdict,
    pub dimension: usize,
    /// The matrix tested for positive semi-definiteness.
    pub tested: &'static str,
    pub definiteness: Option<Definiteness>,
    pub rank_estimate: Option<usize>,
    pub zero_row_sum: bool,
    /// Leading minors of sizes `1..n-1` all strictly positive.
    pub maximal_rank_certificate: bool,
    pub leading_minor_witness: Option<MinorReport>,
    /// A negative principal minor of the tested matrix.
    pub minor_witness: Option<MinorReport>,
    /// A vector with negative quadratic form.
    pub vector_witness: Option<VectorReport>,
    pub structure: Option<StructureReport>,
    pub kuramoto: Option<KuramotoReport>,
    pub notes: Vec<String>,
}

fn minor_report(w: &Witness) -> Option<MinorReport> {
    match w {
        Witness::Minor { subset, value } => Some(MinorReport {
            subset: subset.iter().map(|x| x + 1).collect(),
            value: *value,
        }),
        Witness::Vector { .. } => None,
    }
}

/// Eigenvector of the smallest eigenvalue if its quadratic form is negative,
/// sign-normalized so the first nonzero entry is positive.
fn negative_direction(m: &SymmetricMatrix) -> Option<VectorReport> {
    let (_, mut v) = m.eigenpairs().into_iter().next()?;
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12).copied() {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let quadratic_form = m.quadratic_form(&v);
    (quadratic_form < 0.0).then_some(VectorReport { vector: v, quadratic_form })
}

pub fn structure_report(g: &WeightedGraph, opts: &SylvesterOptions) -> StructureReport {
    let tree = positive_spanning_tree(g).map(|t| t.edges().map(EdgeReport::from).collect());
    let negative_cut = find_negative_cut(g).map(|side| {
        let crossing = g
            .cut_edges(&side)
            .expect("proper side")
            .edges()
            .map(EdgeReport::from)
            .collect();
        CutReport { side: side.iter().map(|x| x + 1).collect(), crossing }
    });
    let lines: Vec<LineReport> = line_obstruction_scan_with(g, &opts.tol)
        .into_iter()
        .map(|r| LineReport {
            path: r.path.iter().map(|x| x + 1).collect(),
            negative_edges: r.negative_edges.iter().map(|&i| EdgeReport::from(g.edge(i))).collect(),
            bound: r.bound,
            violated: r.violated,
        })
        .collect();
    let line_violations = lines.iter().filter(|l| l.violated).count();
    StructureReport {
        vertices: g.vertex_count(),
        edges: g.edges().iter().filter(|e| !e.is_loop()).count(),
        positive_spanning_tree: tree,
        negative_cut,
        lines,
        line_violations,
    }
}

struct Assessment {
    kind: Definiteness,
    rank: usize,
    certificate: bool,
    leading: Option<MinorReport>,
    minor: Option<MinorReport>,
    notes: Vec<String>,
}

/// Definiteness of a matrix with zero row sums: the leading-minor
/// certificate first, then the exhaustive sweep for a negative minor when
/// the dimension is within the guard.
fn zero_row_sum_definiteness(l: &SymmetricMatrix, opts: &SylvesterOptions) -> Result<Assessment> {
    let n = l.dim();
    let cert = is_psd_zero_row_sum(l, opts)?;
    let certificate = cert.is_maximal_rank_psd(n) && cert.witness.is_none();
    let leading = cert.witness.as_ref().and_then(minor_report);
    let mut notes = Vec::new();
    if certificate {
        return Ok(Assessment { kind: cert.kind, rank: cert.rank_estimate, certificate, leading, minor: None, notes });
    }
    if n > opts.nmax {
        notes.push(format!(
            "dimension {n} exceeds the minor-sweep guard {}; kind taken from the spectrum",
            opts.nmax
        ));
        return Ok(Assessment { kind: cert.kind, rank: cert.rank_estimate, certificate, leading, minor: None, notes });
    }
    let full = is_psd_full(l, opts)?;
    Ok(Assessment {
        kind: full.kind,
        rank: cert.rank_estimate,
        certificate,
        leading,
        minor: full.witness.as_ref().and_then(minor_report),
        notes,
    })
}

fn general_definiteness(l: &SymmetricMatrix, opts: &SylvesterOptions) -> Result<Assessment> {
    let DefinitenessVerdict { kind, rank_estimate, witness } = is_psd_full(l, opts)?;
    Ok(Assessment {
        kind,
        rank: rank_estimate,
        certificate: false,
        leading: None,
        minor: witness.as_ref().and_then(minor_report),
        notes: vec!["row sums are not zero; graph diagnostics skipped".into()],
    })
}

fn structural_notes(verdict: Verdict, s: &StructureReport, notes: &mut Vec<String>) {
    if s.positive_spanning_tree.is_none() {
        notes.push("no positive spanning tree: some cut has only negative edges".into());
    }
    if s.line_violations > 0 {
        notes.push(format!("{} induced line(s) violate the weight bound", s.line_violations));
    }
    if verdict == Verdict::Passes && (s.positive_spanning_tree.is_none() || s.line_violations > 0) {
        notes.push("inconsistent: certified matrix shows a structural obstruction".into());
    }
}

fn laplacian_report(
    subject: &'static str,
    tested: &'static str,
    l: &SymmetricMatrix,
    g: &WeightedGraph,
    opts: &SylvesterOptions,
) -> Result<StabilityReport> {
    let d = zero_row_sum_definiteness(l, opts)?;
    let verdict = if d.kind.is_positive_semidefinite() { Verdict::Passes } else { Verdict::Fails };
    let structure = structure_report(g, opts);
    let mut notes = d.notes;
    structural_notes(verdict, &structure, &mut notes);
    if verdict == Verdict::Passes && !d.certificate {
        notes.push(format!("positive semi-definite with rank {} below n - 1", d.rank));
    }
    Ok(StabilityReport {
        subject,
        verdict,
        dimension: l.dim(),
        tested,
        definiteness: Some(d.kind),
        rank_estimate: Some(d.rank),
        zero_row_sum: true,
        maximal_rank_certificate: d.certificate,
        leading_minor_witness: d.leading,
        minor_witness: d.minor,
        vector_witness: (verdict == Verdict::Fails).then(|| negative_direction(l)).flatten(),
        structure: Some(structure),
        kuramoto: None,
        notes,
    })
}

pub fn analyze_matrix(m: &SymmetricMatrix, opts: &AnalysisOptions) -> Result<StabilityReport> {
    let (tested, label) = match opts.target {
        Target::Psd => (m.clone(), "M"),
        Target::Nsd => (-m, "-M"),
    };
    if tested.has_zero_row_sums_within(&opts.sylvester.tol) {
        let g = coates_graph(&-&tested);
        return laplacian_report("matrix", label, &tested, &g, &opts.sylvester);
    }
    let d = general_definiteness(&tested, &opts.sylvester)?;
    let verdict = if d.kind.is_positive_semidefinite() { Verdict::Passes } else { Verdict::Fails };
    Ok(StabilityReport {
        subject: "matrix",
        verdict,
        dimension: tested.dim(),
        tested: label,
        definiteness: Some(d.kind),
        rank_estimate: Some(d.rank),
        zero_row_sum: false,
        maximal_rank_certificate: false,
        leading_minor_witness: None,
        minor_witness: d.minor,
        vector_witness: (verdict == Verdict::Fails).then(|| negative_direction(&tested)).flatten(),
        structure: None,
        kuramoto: None,
        notes: d.notes,
    })
}

pub fn analyze_graph(g: &WeightedGraph, opts: &AnalysisOptions) -> Result<StabilityReport> {
    laplacian_report("graph", "L(G)", &g.laplacian(), g, &opts.sylvester)
}

pub fn analyze_kuramoto(
    sys: &KuramotoSystem,
    seed: &PhaseState,
    newton: &NewtonOptions,
    opts: &AnalysisOptions,
) -> Result<StabilityReport> {
    let n = sys.len();
    let Some(outcome) = solve_equilibrium(sys, seed, newton)? else {
        return Ok(StabilityReport {
            subject: "kuramoto",
            verdict: Verdict::NoEquilibrium,
            dimension: n,
            tested: "-A",
            definiteness: None,
            rank_estimate: None,
            zero_row_sum: true,
            maximal_rank_certificate: false,
            leading_minor_witness: None,
            minor_witness: None,
            vector_witness: None,
            structure: None,
            kuramoto: Some(KuramotoReport {
                oscillators: n,
                mean_frequency: sys.mean_frequency(),
                phases: None,
                residual_norm: None,
                iterations: None,
                singular_steps: None,
                spanning_phase_condition: None,
            }),
            notes: vec!["Newton iteration did not converge from the seed".into()],
        });
    };
    let x = &outcome.state;
    let stability = classify_stability_with(sys, x, &opts.sylvester)?;
    let neg = -&stability.jacobian;
    let mut report = laplacian_report("kuramoto", "-A", &neg, &stability.jacobian_graph, &opts.sylvester)?;
    report.verdict = match stability.verdict {
        StabilityVerdict::Passes => Verdict::Passes,
        StabilityVerdict::Fails => Verdict::Fails,
        StabilityVerdict::Degenerate => Verdict::Degenerate,
    };
    report.rank_estimate = Some(stability.rank_estimate);
    if report.verdict == Verdict::Degenerate {
        report.notes.push(format!("Jacobian rank {} is below N - 1", stability.rank_estimate));
    }
    if outcome.singular_steps > 0 {
        report.notes.push(format!("{} singular Newton step(s)", outcome.singular_steps));
    }
    report.kuramoto = Some(KuramotoReport {
        oscillators: n,
        mean_frequency: sys.mean_frequency(),
        phases: Some(x.theta().to_vec()),
        residual_norm: Some(outcome.residual_norm),
        iterations: Some(outcome.iterations),
        singular_steps: Some(outcome.singular_steps),
        spanning_phase_condition: Some(spanning_phase_condition(sys, x)?),
    });
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCase {
    pub v1: Vec<usize>,
    pub residual: f64,
    pub magnitude: f64,
    pub terms: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub vertices: usize,
    pub cases: Vec<IdentityCase>,
    pub all_hold: bool,
}

/// Evaluates the cut identity for each given 0-based `V1`, or for every
/// proper non-empty `V1` when `sides` is `None`.
pub fn identity_report(
    g: &WeightedGraph,
    sides: Option<Vec<Vec<usize>>>,
    opts: &SylvesterOptions,
) -> Result<IdentityReport> {
    let n = g.vertex_count();
    let sides = match sides {
        Some(s) => s,
        None => {
            if n > opts.nmax.min(crate::minors::SUBSET_LIMIT) {
                return Err(crate::error::Error::GuardExceeded { n, nmax: opts.nmax });
            }
            (1u64..(1u64 << n) - 1)
                .map(|mask| crate::matrix::mask_members(mask).collect())
                .collect()
        }
    };
    let cases = sides
        .iter()
        .map(|v1| {
            let id = verify_cut_identity(g, v1)?;
            let holds = id.holds(&opts.tol);
            let mut labels: Vec<usize> = v1.iter().map(|x| x + 1).collect();
            labels.sort_unstable();
            labels.dedup();
            Ok(IdentityCase { v1: labels, residual: id.residual, magnitude: id.magnitude, terms: id.terms, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_hold = cases.iter().all(|c| c.holds);
    Ok(IdentityReport { vertices: n, cases, all_hold })
}
