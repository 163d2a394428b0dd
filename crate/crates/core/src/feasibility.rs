//! The feasibility problem shared by edge and vertex convexity.
//!
//! Items (edges of one color, or coset vertices) are indexed `0..m`. Each
//! block belongs to one cut or plane `k` and lists the items strictly on its
//! `R` side together with their mirror images. A symmetric matrix `P` per
//! block induces `M_{x, k(y)} = P(x, y)`, and the requirement is that for
//! every pair of distinct items the induced entries of the blocks
//! separating them add up to one, with every `P` positive semidefinite.
//!
//! Entry `(i, j)` of a block feeds exactly one pair, `{r_i, k(r_j)}`, so the
//! affine constraints touch disjoint sets of matrix entries.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const COMPOSED_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_SWEEPS: usize = 50_000;

/// How a certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Constructed,
    Solved,
    Composed,
}

impl Provenance {
    /// Tolerances a certificate of this origin is held to.
    pub fn tolerances(self) -> Tolerances {
        match self {
            Provenance::Composed => Tolerances::composed(),
            _ => Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sum: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sum: DEFAULT_TOLERANCE,
            psd: DEFAULT_TOLERANCE,
        }
    }
}

impl Tolerances {
    pub fn composed() -> Self {
        Self {
            sum: COMPOSED_TOLERANCE,
            psd: DEFAULT_TOLERANCE,
        }
    }

    /// Componentwise minimum.
    pub fn stricter(self, other: Self) -> Self {
        Self {
            sum: self.sum.min(other.sum),
            psd: self.psd.min(other.psd),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Cut or plane id this block belongs to.
    pub source: usize,
    /// Items strictly on the `R` side, sorted.
    pub r_items: Vec<usize>,
    /// `mirror[j]` is the image `k(r_items[j])`, an item on the `L` side.
    pub mirror: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PairSystem {
    item_count: usize,
    blocks: Vec<Block>,
    /// Distinct unordered pairs `(a, b)`, `a < b`, in lexicographic order.
    pairs: Vec<(usize, usize)>,
    /// Per pair, the block entries `(block, i, j)` feeding it.
    entries: Vec<Vec<(usize, usize, usize)>>,
}

fn pair_id(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    // pairs (a, b) with a < b enumerated row by row
    a * m - a * (a + 1) / 2 + (b - a - 1)
}

impl PairSystem {
    pub fn new(item_count: usize, blocks: Vec<Block>) -> Self {
        let m = item_count;
        let mut pairs = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for a in 0..m {
            for b in a + 1..m {
                pairs.push((a, b));
            }
        }
        let mut entries = vec![Vec::new(); pairs.len()];
        for (bi, block) in blocks.iter().enumerate() {
            for (i, &x) in block.r_items.iter().enumerate() {
                for (j, &y) in block.mirror.iter().enumerate() {
                    entries[pair_id(m, x, y)].push((bi, i, j));
                }
            }
        }
        Self {
            item_count,
            blocks,
            pairs,
            entries,
        }
    }

    pub fn item_count(&self) -> usize {
        self.item_count
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of blocks separating each pair, aligned with [`Self::pairs`].
    pub fn separation_counts(&self) -> Vec<usize> {
        self.entries.iter().map(Vec::len).collect()
    }

    /// Pairs that no block separates; any such pair makes the system
    /// infeasible.
    pub fn unseparated(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .zip(&self.entries)
            .filter(|(_, e)| e.is_empty())
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn zero_matrices(&self) -> Vec<DMatrix<f64>> {
        self.blocks
            .iter()
            .map(|b| DMatrix::zeros(b.r_items.len(), b.r_items.len()))
            .collect()
    }

    /// Sum of the induced entries for every pair, aligned with [`Self::pairs`].
    pub fn pair_sums(&self, mats: &[DMatrix<f64>]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| e.iter().map(|&(b, i, j)| mats[b][(i, j)]).sum())
            .collect()
    }

    /// Induced entry of one block for a pair, or `None` if the block does
    /// not separate the pair.
    pub fn pair_entry(&self, mats: &[DMatrix<f64>], block: usize, a: usize, b: usize) -> Option<f64> {
        self.entries[pair_id(self.item_count, a, b)]
            .iter()
            .find(|e| e.0 == block)
            .map(|&(bl, i, j)| mats[bl][(i, j)])
    }

    pub fn verify(&self, mats: &[DMatrix<f64>], tol: Tolerances) -> VerificationReport {
        let sums = self.pair_sums(mats);
        let mut report = VerificationReport {
            passed: true,
            max_sum_residual: 0.0,
            worst_pair: None,
            min_eigenvalue: f64::INFINITY,
            worst_block: None,
            max_asymmetry: 0.0,
            unseparated_pairs: 0,
            first_unseparated: None,
            tolerances: tol,
        };
        for ((&pair, s), e) in self.pairs.iter().zip(&sums).zip(&self.entries) {
            if e.is_empty() {
                report.unseparated_pairs += 1;
                report.first_unseparated.get_or_insert(pair);
                continue;
            }
            let r = (s - 1.0).abs();
            if report.worst_pair.is_none() || r > report.max_sum_residual {
                report.max_sum_residual = r;
                report.worst_pair = Some(pair);
            }
        }
        for (bi, p) in mats.iter().enumerate() {
            if p.nrows() == 0 {
                continue;
            }
            let asym = (p - p.transpose()).abs().max();
            report.max_asymmetry = report.max_asymmetry.max(asym);
            let lam = min_eigenvalue(p);
            if lam < report.min_eigenvalue {
                report.min_eigenvalue = lam;
                report.worst_block = Some(bi);
            }
        }
        if report.min_eigenvalue == f64::INFINITY {
            report.min_eigenvalue = 0.0;
        }
        report.passed = report.unseparated_pairs == 0
            && report.max_sum_residual <= tol.sum
            && report.min_eigenvalue >= -tol.psd
            && report.max_asymmetry <= tol.psd;
        report
    }

    /// Alternating projections between the affine unit-sum set and the cone
    /// of symmetric PSD block matrices, started from the equal split.
    pub fn solve(&self, options: &SolverOptions) -> SolveOutcome {
        if let Some(&pair) = self.unseparated().first() {
            return SolveOutcome::Infeasible { pair };
        }
        let mut x = self.zero_matrices();
        for e in &self.entries {
            let share = 1.0 / e.len() as f64;
            for &(b, i, j) in e {
                x[b][(i, j)] = share;
            }
        }
        let mut best: Option<(f64, Vec<DMatrix<f64>>)> = None;
        for sweep in 1..=options.max_sweeps {
            let y: Vec<DMatrix<f64>> = x.iter().map(project_psd).collect();
            let sums = self.pair_sums(&y);
            let residual = sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
            if residual <= options.tolerances.sum {
                log::debug!("pair system converged after {sweep} sweeps");
                return SolveOutcome::Certified {
                    matrices: y,
                    sweeps: sweep,
                };
            }
            if best.as_ref().is_none_or(|(r, _)| residual < *r) {
                best = Some((residual, y.clone()));
            }
            x = y;
            for (e, s) in self.entries.iter().zip(&sums) {
                let delta = (s - 1.0) / e.len() as f64;
                for &(b, i, j) in e {
                    x[b][(i, j)] -= delta;
                }
            }
        }
        let (residual, matrices) = best.unwrap_or((0.0, self.zero_matrices()));
        SolveOutcome::NotConverged {
            matrices,
            sum_residual: residual,
            sweeps: options.max_sweeps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub max_sum_residual: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub min_eigenvalue: f64,
    pub worst_block: Option<usize>,
    pub max_asymmetry: f64,
    pub unseparated_pairs: usize,
    pub first_unseparated: Option<(usize, usize)>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_sweeps: usize,
    pub tolerances: Tolerances,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_sweeps: DEFAULT_MAX_SWEEPS,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Certified {
        matrices: Vec<DMatrix<f64>>,
        sweeps: usize,
    },
    /// Some pair is separated by no block.
    Infeasible { pair: (usize, usize) },
    NotConverged {
        matrices: Vec<DMatrix<f64>>,
        sum_residual: f64,
        sweeps: usize,
    },
}

pub fn min_eigenvalue(p: &DMatrix<f64>) -> f64 {
    if p.nrows() == 0 {
        return 0.0;
    }
    let sym = (p + p.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// Nearest symmetric PSD matrix in Frobenius norm.
pub fn project_psd(p: &DMatrix<f64>) -> DMatrix<f64> {
    if p.nrows() == 0 {
        return p.clone();
    }
    let sym = (p + p.transpose()) * 0.5;
    let mut eig = SymmetricEigen::new(sym);
    eig.eigenvalues.apply(|l| *l = l.max(0.0));
    let out = eig.recompose();
    (&out + out.transpose()) * 0.5
}

pub(crate) fn to_rows(p: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..p.nrows()).map(|i| p.row(i).iter().copied().collect()).collect()
}

pub(crate) fn from_rows(rows: &[Vec<f64>], n: usize) -> Option<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_items() -> PairSystem {
        PairSystem::new(
            2,
            vec![Block {
                source: 0,
                r_items: vec![0],
                mirror: vec![1],
            }],
        )
    }

    #[test]
    fn pair_ids_are_dense() {
        let m = 5;
        let mut k = 0;
        for a in 0..m {
            for b in a + 1..m {
                assert_eq!(pair_id(m, a, b), k);
                assert_eq!(pair_id(m, b, a), k);
                k += 1;
            }
        }
    }

    #[test]
    fn single_block_verdicts() {
        let sys = two_items();
        let ok = sys.verify(&[DMatrix::from_element(1, 1, 1.0)], Tolerances::default());
        assert!(ok.passed);
        let half = sys.verify(&[DMatrix::from_element(1, 1, 0.5)], Tolerances::default());
        assert!(!half.passed);
        assert!((half.max_sum_residual - 0.5).abs() < 1e-15);
        let neg = sys.verify(&[DMatrix::from_element(1, 1, -1.0)], Tolerances::default());
        assert!(!neg.passed);
        assert!((neg.min_eigenvalue + 1.0).abs() < 1e-15);
    }

    #[test]
    fn unseparated_pair_is_infeasible() {
        let sys = PairSystem::new(3, two_items().blocks().to_vec());
        assert_eq!(sys.unseparated(), vec![(0, 2), (1, 2)]);
        assert!(matches!(sys.solve(&SolverOptions::default()), SolveOutcome::Infeasible { pair: (0, 2) }));
    }

    #[test]
    fn solver_finds_trivial_certificate() {
        match two_items().solve(&SolverOptions::default()) {
            SolveOutcome::Certified { matrices, .. } => {
                assert!((matrices[0][(0, 0)] - 1.0).abs() < 1e-8)
            }
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn psd_projection_is_psd_and_idempotent(entries in proptest::collection::vec(-5.0f64..5.0, 16)) {
            let p = DMatrix::from_vec(4, 4, entries);
            let q = project_psd(&p);
            prop_assert!(min_eigenvalue(&q) >= -1e-10);
            let q2 = project_psd(&q);
            prop_assert!((&q - &q2).abs().max() < 1e-9);
            prop_assert!((&q - q.transpose()).abs().max() < 1e-12);
        }

        #[test]
        fn psd_projection_fixes_gram_matrices(entries in proptest::collection::vec(-2.0f64..2.0, 12)) {
            let a = DMatrix::from_vec(4, 3, entries);
            let g = &a * a.transpose();
            prop_assert!((project_psd(&g) - &g).abs().max() < 1e-9);
        }
    }
}
