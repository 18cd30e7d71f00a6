//! Semi-definiteness verdicts from principal minors.
//!
//! [`is_psd_full`] sweeps all `2^n - 1` principal minors. For symmetric
//! matrices with zero row sums, [`is_psd_zero_row_sum`] only needs the
//! `n - 1` leading minors: they are all strictly positive exactly when the
//! matrix is positive semi-definite of rank `n - 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{determinant, is_positive_definite_cholesky, mask_members, SymmetricMatrix, Tolerances};
use crate::minors::SUBSET_LIMIT;

/// Default guard on the dimension for exhaustive minor sweeps.
pub const DEFAULT_NMAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemiDefinite,
    NegativeDefinite,
    NegativeSemiDefinite,
    Indefinite,
}

impl Definiteness {
    pub fn is_positive_semidefinite(self) -> bool {
        matches!(self, Definiteness::PositiveDefinite | Definiteness::PositiveSemiDefinite)
    }

    pub fn is_negative_semidefinite(self) -> bool {
        matches!(self, Definiteness::NegativeDefinite | Definiteness::NegativeSemiDefinite)
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A principal minor `det L[S, S]` (0-based `S`) whose sign disqualifies.
    Minor { subset: Vec<usize>, value: f64 },
    /// A vector with its quadratic form `v^T L v`.
    Vector { vector: Vec<f64>, quadratic_form: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefinitenessVerdict {
    pub kind: Definiteness,
    pub rank_estimate: usize,
    pub witness: Option<Witness>,
}

impl DefinitenessVerdict {
    /// Positive semi-definite with rank `n - 1`: the certificate the
    /// zero-row-sum criterion delivers.
    pub fn is_maximal_rank_psd(&self, n: usize) -> bool {
        self.kind.is_positive_semidefinite() && self.rank_estimate + 1 == n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SylvesterOptions {
    pub nmax: usize,
    pub tol: Tolerances,
}

impl Default for SylvesterOptions {
    fn default() -> Self {
        SylvesterOptions { nmax: DEFAULT_NMAX, tol: Tolerances::default() }
    }
}

fn check_guard(n: usize, opts: &SylvesterOptions) -> Result<()> {
    let nmax = opts.nmax.min(SUBSET_LIMIT);
    if n > nmax {
        return Err(Error::GuardExceeded { n, nmax });
    }
    Ok(())
}

/// First principal minor, in lexicographic order of the sorted index
/// lists, that is below `-tol` (scaled by the submatrix Hadamard bound).
fn first_negative_minor(l: &SymmetricMatrix, tol: &Tolerances) -> Option<(Vec<usize>, f64)> {
    fn visit(
        l: &SymmetricMatrix,
        tol: &Tolerances,
        prefix: &mut Vec<usize>,
        next: usize,
    ) -> Option<(Vec<usize>, f64)> {
        for i in next..l.dim() {
            prefix.push(i);
            let sub = l.principal_submatrix(prefix);
            let value = determinant(&sub);
            if value < -tol.minor(&sub) {
                return Some((prefix.clone(), value));
            }
            if let Some(hit) = visit(l, tol, prefix, i + 1) {
                return Some(hit);
            }
            prefix.pop();
        }
        None
    }
    visit(l, tol, &mut Vec::new(), 0)
}

/// Leading minors `det L[{0..k}, {0..k}]` for `k = 1..=count`.
pub fn leading_minors(l: &SymmetricMatrix, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| {
            let s: Vec<usize> = (0..k).collect();
            determinant(&l.principal_submatrix(&s))
        })
        .collect()
}

/// Index (1-based size) and value of the first leading minor that is not
/// strictly positive beyond the tolerance.
fn first_nonpositive_leading(l: &SymmetricMatrix, count: usize, tol: &Tolerances) -> Option<(usize, f64)> {
    (1..=count).find_map(|k| {
        let s: Vec<usize> = (0..k).collect();
        let sub = l.principal_submatrix(&s);
        let value = determinant(&sub);
        (value <= tol.minor(&sub)).then_some((k, value))
    })
}

/// Spectrum-based classification, used as an oracle and as a fallback when
/// the minor certificate is inconclusive.
pub fn classify_by_eigenvalues(l: &SymmetricMatrix, tol: &Tolerances) -> Definiteness {
    let ev = l.eigenvalues();
    let t = tol.eigenvalue(l);
    let min = ev.first().copied().unwrap_or(0.0);
    let max = ev.last().copied().unwrap_or(0.0);
    if min > t {
        Definiteness::PositiveDefinite
    } else if min >= -t {
        Definiteness::PositiveSemiDefinite
    } else if max < -t {
        Definiteness::NegativeDefinite
    } else if max <= t {
        Definiteness::NegativeSemiDefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Full Sylvester test: PSD iff every principal minor is non-negative.
///
/// The witness is the first negative minor of `l` in lexicographic order.
/// Negative (semi-)definiteness is decided by a second sweep over `-l`.
pub fn is_psd_full(l: &SymmetricMatrix, opts: &SylvesterOptions) -> Result<DefinitenessVerdict> {
    let n = l.dim();
    check_guard(n, opts)?;
    let tol = &opts.tol;
    let rank_estimate = l.rank_estimate(tol);
    let kind = match first_negative_minor(l, tol) {
        None => {
            if first_nonpositive_leading(l, n, tol).is_none() {
                Definiteness::PositiveDefinite
            } else {
                Definiteness::PositiveSemiDefinite
            }
        }
        Some((subset, value)) => {
            let neg = -l;
            let kind = match first_negative_minor(&neg, tol) {
                None if first_nonpositive_leading(&neg, n, tol).is_none() => Definiteness::NegativeDefinite,
                None => Definiteness::NegativeSemiDefinite,
                Some(_) => Definiteness::Indefinite,
            };
            return Ok(DefinitenessVerdict {
                kind,
                rank_estimate,
                witness: Some(Witness::Minor { subset, value }),
            });
        }
    };
    Ok(DefinitenessVerdict { kind, rank_estimate, witness: None })
}

fn require_zero_row_sum(l: &SymmetricMatrix, tol: &Tolerances) -> Result<()> {
    let t = tol.row_sum(l);
    match l.row_sums().iter().position(|s| s.abs() > t) {
        Some(row) => Err(Error::NotZeroRowSum { row, sum: l.row_sums()[row], tolerance: t }),
        None => Ok(()),
    }
}

/// Zero-row-sum Sylvester criterion: checks the leading minors of sizes
/// `1..n-1` for strict positivity.
///
/// When all pass the verdict is positive semi-definite with rank `n - 1`.
/// Otherwise the witness is the first failing leading minor and the kind
/// and rank come from the spectrum; the failure alone cannot tell a
/// rank-deficient PSD matrix from an indefinite one.
pub fn is_psd_zero_row_sum(l: &SymmetricMatrix, opts: &SylvesterOptions) -> Result<DefinitenessVerdict> {
    let n = l.dim();
    let tol = &opts.tol;
    require_zero_row_sum(l, tol)?;
    match first_nonpositive_leading(l, n - 1, tol) {
        None => Ok(DefinitenessVerdict {
            kind: Definiteness::PositiveSemiDefinite,
            rank_estimate: n - 1,
            witness: None,
        }),
        Some((k, value)) => Ok(DefinitenessVerdict {
            kind: classify_by_eigenvalues(l, tol),
            rank_estimate: l.rank_estimate(tol),
            witness: Some(Witness::Minor { subset: (0..k).collect(), value }),
        }),
    }
}

/// The five equivalent conditions for a symmetric zero-row-sum matrix,
/// each evaluated on its own route.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// (i) PSD with rank `n - 1`, from the spectrum.
    pub psd_maximal_rank: bool,
    /// (ii) every proper principal minor is strictly positive.
    pub proper_minors_positive: bool,
    /// (iii) every proper principal submatrix is positive definite (Cholesky).
    pub proper_submatrices_pd: bool,
    /// (iv) the leading minors of sizes `1..n-1` are strictly positive.
    pub leading_minors_positive: bool,
    /// (v) the leading `(n-1)`-block is positive definite (Cholesky).
    pub leading_block_pd: bool,
    pub spectrum: Definiteness,
    pub rank_estimate: usize,
    /// Size of the first leading minor that failed condition (iv).
    pub failed_leading_minor: Option<usize>,
}

impl EquivalenceReport {
    pub fn conditions(&self) -> [bool; 5] {
        [
            self.psd_maximal_rank,
            self.proper_minors_positive,
            self.proper_submatrices_pd,
            self.leading_minors_positive,
            self.leading_block_pd,
        ]
    }

    pub fn agree(&self) -> bool {
        self.first_disagreement().is_none()
    }

    /// First pair of conditions (1-based numbering) with different values.
    pub fn first_disagreement(&self) -> Option<(usize, usize)> {
        let c = self.conditions();
        (1..5).find(|&k| c[k] != c[0]).map(|k| (1, k + 1))
    }
}

const CHOLESKY_RELATIVE: f64 = 1e-12;

pub fn check_equivalences(l: &SymmetricMatrix, opts: &SylvesterOptions) -> Result<EquivalenceReport> {
    let n = l.dim();
    check_guard(n, opts)?;
    let tol = &opts.tol;
    require_zero_row_sum(l, tol)?;

    let spectrum = classify_by_eigenvalues(l, tol);
    let rank_estimate = l.rank_estimate(tol);
    let psd_maximal_rank = spectrum.is_positive_semidefinite() && rank_estimate + 1 == n;

    let full = (1u64 << n) - 1;
    let mut proper_minors_positive = true;
    let mut proper_submatrices_pd = true;
    for mask in 1..full {
        let s: Vec<usize> = mask_members(mask).collect();
        let sub = l.principal_submatrix(&s);
        if proper_minors_positive && determinant(&sub) <= tol.minor(&sub) {
            proper_minors_positive = false;
        }
        if proper_submatrices_pd && !is_positive_definite_cholesky(&sub, CHOLESKY_RELATIVE) {
            proper_submatrices_pd = false;
        }
        if !proper_minors_positive && !proper_submatrices_pd {
            break;
        }
    }

    let failed = first_nonpositive_leading(l, n - 1, tol);
    let block: Vec<usize> = (0..n - 1).collect();
    let leading_block_pd = is_positive_definite_cholesky(&l.principal_submatrix(&block), CHOLESKY_RELATIVE);

    Ok(EquivalenceReport {
        psd_maximal_rank,
        proper_minors_positive,
        proper_submatrices_pd,
        leading_minors_positive: failed.is_none(),
        leading_block_pd,
        spectrum,
        rank_estimate,
        failed_leading_minor: failed.map(|(k, _)| k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn remark_matrix() -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&[
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, -1.0, 1.0, 0.0],
            vec![1.0, 1.0, -2.0, 0.0],
            vec![-1.0, 0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    fn m(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn triangle_laplacian() -> SymmetricMatrix {
        m(&[&[2., -1., -1.], &[-1., 2., -1.], &[-1., -1., 2.]])
    }

    #[test]
    fn remark_matrix_is_indefinite() {
        let c = remark_matrix();
        let v = is_psd_full(&c, &SylvesterOptions::default()).unwrap();
        assert_eq!(v.kind, Definiteness::Indefinite);
        assert_eq!(v.rank_estimate, 3);
        match v.witness {
            Some(Witness::Minor { ref subset, value }) => {
                assert_eq!(subset, &vec![0, 2]);
                assert_eq!(value, -1.0);
            }
            ref other => panic!("unexpected witness {other:?}"),
        }
        assert_eq!(leading_minors(&c, 3), vec![0.0, 0.0, 1.0]);
        assert_eq!(c.quadratic_form(&[1.0, 1.0, 0.0, 0.0]), -1.0);
    }

    #[test]
    fn identity_and_triangle() {
        let id = is_psd_full(&SymmetricMatrix::identity(4), &SylvesterOptions::default()).unwrap();
        assert_eq!(id.kind, Definiteness::PositiveDefinite);
        assert_eq!(id.rank_estimate, 4);
        let t = is_psd_full(&triangle_laplacian(), &SylvesterOptions::default()).unwrap();
        assert_eq!(t.kind, Definiteness::PositiveSemiDefinite);
        assert_eq!(t.rank_estimate, 2);
        assert!(t.witness.is_none());
    }

    #[test]
    fn negative_kinds() {
        let nd = is_psd_full(&-&SymmetricMatrix::identity(3), &SylvesterOptions::default()).unwrap();
        assert_eq!(nd.kind, Definiteness::NegativeDefinite);
        let nsd = is_psd_full(&-&triangle_laplacian(), &SylvesterOptions::default()).unwrap();
        assert_eq!(nsd.kind, Definiteness::NegativeSemiDefinite);
    }

    #[test]
    fn guard_refuses_large_matrices() {
        let opts = SylvesterOptions { nmax: 3, ..Default::default() };
        assert_eq!(
            is_psd_full(&SymmetricMatrix::identity(4), &opts),
            Err(Error::GuardExceeded { n: 4, nmax: 3 })
        );
    }

    #[test]
    fn zero_row_sum_path_graph() {
        let l = m(&[&[1., -1., 0.], &[-1., 2., -1.], &[0., -1., 1.]]);
        assert_eq!(leading_minors(&l, 2), vec![1.0, 1.0]);
        let v = is_psd_zero_row_sum(&l, &SylvesterOptions::default()).unwrap();
        assert_eq!(v.kind, Definiteness::PositiveSemiDefinite);
        assert_eq!(v.rank_estimate, 2);
        assert!(v.is_maximal_rank_psd(3));
    }

    #[test]
    fn zero_row_sum_two_node_lock() {
        let b = 1.0_f64;
        let c = b * (0.5_f64).asin().cos();
        let l = m(&[&[c, -c], &[-c, c]]);
        let v = is_psd_zero_row_sum(&l, &SylvesterOptions::default()).unwrap();
        assert!(v.is_maximal_rank_psd(2));
    }

    #[test]
    fn zero_row_sum_refuses_remark_matrix() {
        let l = -&remark_matrix();
        let v = is_psd_zero_row_sum(&l, &SylvesterOptions::default()).unwrap();
        assert!(!v.is_maximal_rank_psd(4));
        assert_eq!(v.kind, Definiteness::Indefinite);
        assert_eq!(v.witness, Some(Witness::Minor { subset: vec![0], value: 0.0 }));
    }

    #[test]
    fn zero_row_sum_rejects_other_matrices() {
        assert!(matches!(
            is_psd_zero_row_sum(&SymmetricMatrix::identity(2), &SylvesterOptions::default()),
            Err(Error::NotZeroRowSum { row: 0, .. })
        ));
    }

    #[test]
    fn equivalences_on_examples() {
        let opts = SylvesterOptions::default();
        let t = check_equivalences(&triangle_laplacian(), &opts).unwrap();
        assert_eq!(t.conditions(), [true; 5]);

        let c = check_equivalences(&-&remark_matrix(), &opts).unwrap();
        assert_eq!(c.conditions(), [false; 5]);
        assert_eq!(c.spectrum, Definiteness::Indefinite);
        assert_eq!(c.failed_leading_minor, Some(1));

        let z = check_equivalences(&SymmetricMatrix::zeros(2), &opts).unwrap();
        assert_eq!(z.conditions(), [false; 5]);
        assert_eq!(z.rank_estimate, 0);
        assert!(z.agree());
    }
}
