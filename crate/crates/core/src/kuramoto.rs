//! Phase-locked states of the Kuramoto model in the rotating frame
//! `x_i = θ_i - Ωt`, and the linear-stability diagnostics of their Jacobian.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{coates_graph_with_cutoff, EdgeSubset, WeightedGraph};
use crate::matrix::SymmetricMatrix;
use crate::structure::{find_negative_cut, line_obstruction_scan_with, positive_spanning_tree, LineBoundReport};
use crate::sylvester::{is_psd_zero_row_sum, DefinitenessVerdict, SylvesterOptions};

/// Reduces an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KuramotoSystem {
    omega: Vec<f64>,
    coupling: SymmetricMatrix,
    mean_frequency: f64,
}

impl KuramotoSystem {
    pub fn new(omega: Vec<f64>, coupling: SymmetricMatrix) -> Result<Self> {
        let n = omega.len();
        if n == 0 {
            return Err(Error::InvalidSystem("no oscillators".into()));
        }
        if coupling.dim() != n {
            return Err(Error::SizeMismatch(format!(
                "{n} frequencies but a {0}x{0} coupling matrix",
                coupling.dim()
            )));
        }
        if let Some(&w) = omega.iter().find(|w| !w.is_finite()) {
            return Err(Error::NonFinite { value: w, context: "frequency".into() });
        }
        for i in 0..n {
            if coupling.get(i, i) != 0.0 {
                return Err(Error::InvalidSystem(format!("coupling diagonal at {} is nonzero", i + 1)));
            }
            for j in i + 1..n {
                if coupling.get(i, j) < 0.0 {
                    return Err(Error::InvalidSystem(format!(
                        "coupling between {} and {} is negative",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let mean_frequency = omega.iter().sum::<f64>() / n as f64;
        Ok(KuramotoSystem { omega, coupling, mean_frequency })
    }

    /// Builds the coupling matrix from 0-based `(i, j, B_ij)` triples.
    pub fn from_edges(omega: Vec<f64>, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let n = omega.len();
        let mut b = DMatrix::zeros(n, n);
        for (i, j, w) in edges {
            for x in [i, j] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if i == j {
                return Err(Error::InvalidSystem(format!("self-coupling at {}", i + 1)));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite { value: w, context: "coupling".into() });
            }
            if b[(i, j)] != 0.0 {
                return Err(Error::DuplicateEdge { u: i.min(j), v: i.max(j) });
            }
            b[(i, j)] = w;
            b[(j, i)] = w;
        }
        Self::new(omega, SymmetricMatrix::from_dmatrix(&b)?)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn coupling(&self) -> &SymmetricMatrix {
        &self.coupling
    }

    pub fn mean_frequency(&self) -> f64 {
        self.mean_frequency
    }

    /// The physical coupling network: an edge wherever `B_ij > 0`.
    pub fn coupling_graph(&self) -> WeightedGraph {
        let n = self.len();
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.coupling.get(i, j) > 0.0)
            .map(|(i, j)| (i, j, self.coupling.get(i, j)));
        WeightedGraph::new(n, edges).expect("validated coupling")
    }

    pub fn default_tolerance(&self) -> f64 {
        let norm = self.omega.iter().map(|w| w * w).sum::<f64>().sqrt();
        1e-10 * norm.max(1.0)
    }
}

/// Phases stored in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    theta: Vec<f64>,
}

impl PhaseState {
    pub fn new(theta: Vec<f64>) -> Self {
        let theta = theta
            .into_iter()
            .map(|t| {
                let r = t.rem_euclid(TAU);
                if r >= TAU {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        PhaseState { theta }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `φ_ji = x_j - x_i` reduced to `(-π, π]`.
    pub fn difference(&self, i: usize, j: usize) -> f64 {
        wrap_angle(self.theta[j] - self.theta[i])
    }

    /// The same state rotated by a constant phase.
    pub fn shifted(&self, c: f64) -> Self {
        PhaseState::new(self.theta.iter().map(|t| t + c).collect())
    }
}

fn check_len(sys: &KuramotoSystem, x: &PhaseState) -> Result<()> {
    if sys.len() != x.len() {
        return Err(Error::SizeMismatch(format!(
            "{} oscillators but {} phases",
            sys.len(),
            x.len()
        )));
    }
    Ok(())
}

fn residual_raw(sys: &KuramotoSystem, x: &[f64]) -> Vec<f64> {
    let n = sys.len();
    (0..n)
        .map(|i| {
            let coupling: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| sys.coupling.get(i, j) * (x[j] - x[i]).sin())
                .sum();
            sys.omega[i] - sys.mean_frequency + coupling
        })
        .collect()
}

fn jacobian_raw(sys: &KuramotoSystem, x: &[f64]) -> DMatrix<f64> {
    let n = sys.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let b = sys.coupling.get(i, j);
            if b != 0.0 {
                let v = b * wrap_angle(x[j] - x[i]).cos();
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
        a[(i, i)] = -off;
    }
    a
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Right-hand side `ω_i - Ω + sum_j B_ij sin(x_j - x_i)`.
pub fn rotating_frame_residual(sys: &KuramotoSystem, x: &PhaseState) -> Result<Vec<f64>> {
    check_len(sys, x)?;
    Ok(residual_raw(sys, x.theta()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the residual norm; `None` selects
    /// `1e-10 * max(1, |ω|)`.
    pub tolerance: Option<f64>,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tolerance: None, max_iterations: 200, max_halvings: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub state: PhaseState,
    pub iterations: usize,
    pub residual_norm: f64,
    /// Iterations whose reduced Jacobian was numerically singular.
    pub singular_steps: usize,
}

/// Damped Newton iteration with the last phase pinned to zero.
///
/// Returns `Ok(None)` when the iteration cap is hit or no damped step
/// reduces the residual.
pub fn solve_equilibrium(
    sys: &KuramotoSystem,
    x0: &PhaseState,
    opts: &NewtonOptions,
) -> Result<Option<NewtonOutcome>> {
    check_len(sys, x0)?;
    let n = sys.len();
    let tolerance = opts.tolerance.unwrap_or_else(|| sys.default_tolerance());
    let pin = x0.theta()[n - 1];
    let mut x: Vec<f64> = x0.theta().iter().map(|t| wrap_angle(t - pin)).collect();
    x[n - 1] = 0.0;
    let mut r = residual_raw(sys, &x);
    let mut r_norm = norm(&r);
    let mut singular_steps = 0;

    for iteration in 0..=opts.max_iterations {
        if r_norm < tolerance {
            return Ok(Some(NewtonOutcome {
                state: PhaseState::new(x),
                iterations: iteration,
                residual_norm: r_norm,
                singular_steps,
            }));
        }
        if iteration == opts.max_iterations {
            break;
        }
        let m = n - 1;
        let jac = jacobian_raw(sys, &x).view((0, 0), (m, m)).into_owned();
        let rhs = DVector::from_iterator(m, r[..m].iter().map(|v| -v));
        let svd = jac.svd(true, true);
        let s_max = svd.singular_values.max();
        let s_min = svd.singular_values.min();
        let eps = 1e-12 * s_max;
        if s_min <= eps {
            singular_steps += 1;
            log::warn!("singular reduced Jacobian at iteration {iteration} (sigma_min = {s_min:e})");
        }
        let step = match svd.solve(&rhs, eps) {
            Ok(step) => step,
            Err(_) => return Ok(None),
        };
        if step.iter().all(|s| *s == 0.0) {
            return Ok(None);
        }

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = (0..n)
                .map(|i| if i < m { x[i] + scale * step[i] } else { 0.0 })
                .collect();
            let tr = residual_raw(sys, &trial);
            let tn = norm(&tr);
            if tn < r_norm {
                accepted = Some((trial, tr, tn));
                break;
            }
            scale *= 0.5;
        }
        match accepted {
            Some((trial, tr, tn)) => {
                x = trial.into_iter().map(wrap_angle).collect();
                r = tr;
                r_norm = tn;
            }
            None => {
                log::debug!("damping exhausted at iteration {iteration}, residual {r_norm:e}");
                return Ok(None);
            }
        }
    }
    Ok(None)
}

/// Equilibrium reached from `x0` with default solver settings, if any.
pub fn find_equilibrium(sys: &KuramotoSystem, x0: &PhaseState) -> Result<Option<PhaseState>> {
    Ok(solve_equilibrium(sys, x0, &NewtonOptions::default())?.map(|o| o.state))
}

/// Linearization `A_ij = B_ij cos(x_j - x_i)` with zero row sums.
pub fn jacobian(sys: &KuramotoSystem, x: &PhaseState) -> Result<SymmetricMatrix> {
    check_len(sys, x)?;
    SymmetricMatrix::from_dmatrix(&jacobian_raw(sys, x.theta()))
}

/// Whether every component of the coupling network has a spanning tree of
/// edges with `|φ_ji| < π/2`.
pub fn spanning_phase_condition(sys: &KuramotoSystem, x: &PhaseState) -> Result<bool> {
    check_len(sys, x)?;
    let coupling = sys.coupling_graph();
    let (tight, _) = coupling.filter_edges(|e| x.difference(e.u, e.v).abs() < PI / 2.0);
    Ok(tight.connected_components().len() == coupling.connected_components().len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityVerdict {
    /// `-A` is positive semi-definite of rank `N - 1`; necessary, not
    /// sufficient, for stability.
    Passes,
    Fails,
    /// The Jacobian has rank below `N - 1`.
    Degenerate,
}

/// Outcome of the necessary-condition test at one equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct KuramotoStability {
    pub verdict: StabilityVerdict,
    pub jacobian: SymmetricMatrix,
    /// Coates graph of the Jacobian; its Laplacian is `-A`.
    pub jacobian_graph: WeightedGraph,
    pub rank_estimate: usize,
    pub definiteness: DefinitenessVerdict,
    /// Edge indices into `jacobian_graph`.
    pub positive_spanning_tree: Option<Vec<usize>>,
    pub negative_cut: Option<Vec<usize>>,
    pub lines: Vec<LineBoundReport>,
}

impl KuramotoStability {
    pub fn spanning_tree<'g>(&'g self) -> Option<EdgeSubset<'g>> {
        self.positive_spanning_tree
            .as_ref()
            .map(|ids| self.jacobian_graph.subset(ids.iter().copied()).expect("own edges"))
    }
}

pub fn classify_stability(sys: &KuramotoSystem, x: &PhaseState) -> Result<KuramotoStability> {
    classify_stability_with(sys, x, &SylvesterOptions::default())
}

pub fn classify_stability_with(
    sys: &KuramotoSystem,
    x: &PhaseState,
    opts: &SylvesterOptions,
) -> Result<KuramotoStability> {
    let a = jacobian(sys, x)?;
    let neg = -&a;
    let n = a.dim();
    let jacobian_graph = coates_graph_with_cutoff(&a, opts.tol.zero);
    let definiteness = is_psd_zero_row_sum(&neg, opts)?;
    let rank_estimate = a.rank_estimate(&opts.tol);
    let verdict = if rank_estimate + 1 < n {
        StabilityVerdict::Degenerate
    } else if definiteness.is_maximal_rank_psd(n) {
        StabilityVerdict::Passes
    } else {
        StabilityVerdict::Fails
    };
    let positive_spanning_tree = positive_spanning_tree(&jacobian_graph).map(|t| t.members().to_vec());
    let negative_cut = find_negative_cut(&jacobian_graph);
    let lines = line_obstruction_scan_with(&jacobian_graph, &opts.tol);
    Ok(KuramotoStability {
        verdict,
        jacobian: a,
        jacobian_graph,
        rank_estimate,
        definiteness,
        positive_spanning_tree,
        negative_cut,
        lines,
    })
}
