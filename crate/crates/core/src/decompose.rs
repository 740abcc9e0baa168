//! Auxiliary graphs, the partition of the state space into cells, the
//! restricted and projection chains, and explicit product chains.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::chain::{ordered_quadruples, ChainState, RsoChain};
use crate::enumerate::StateSpace;
use crate::error::{Error, Result};
use crate::spectra::{eigen_symmetric, DenseMatrix, ExactMatrix};

pub const DEFAULT_PRODUCT_CAP: usize = 4096;

/// For each class `i`, an `n_i x k` bit matrix whose entry `(v, j)` is set iff
/// `d_j(v)` equals the ceiling of `theta[i][j]`. Rows follow the vertex order
/// inside the class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AuxiliaryVector {
    k: usize,
    graphs: Vec<Vec<bool>>,
}

/// One auxiliary swap: in class `class`, rows `a` and `b` exchange columns
/// `p` and `q` (`a` held `p`, `b` held `q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuxSwap {
    pub class: usize,
    pub a: usize,
    pub b: usize,
    pub p: usize,
    pub q: usize,
}

impl AuxiliaryVector {
    pub fn of(chain: &RsoChain, state: &ChainState) -> Result<Self> {
        let k = chain.jdm().num_classes();
        let theta = chain.theta();
        let spectrum = state.spectrum();
        let mut graphs = Vec::with_capacity(k);
        for i in 0..k {
            let range = chain.sizes().range(i);
            let mut bits = Vec::with_capacity(range.len() * k);
            let mut row_degree = None;
            for v in range {
                let mut deg = 0;
                for j in 0..k {
                    let on = spectrum.get(v, j) == theta.ceil(i, j);
                    deg += usize::from(on);
                    bits.push(on);
                }
                if *row_degree.get_or_insert(deg) != deg {
                    return Err(Error::HalfRegularityViolation { class: i });
                }
            }
            graphs.push(bits);
        }
        Ok(Self { k, graphs })
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.graphs[class].len() / self.k.max(1)
    }

    pub fn get(&self, class: usize, row: usize, col: usize) -> bool {
        self.graphs[class][row * self.k + col]
    }

    /// Common row degree of the auxiliary graph of `class`, if it has rows.
    pub fn row_degree(&self, class: usize) -> Option<usize> {
        (self.class_size(class) > 0)
            .then(|| (0..self.k).filter(|&j| self.get(class, 0, j)).count())
    }

    pub fn apply(&self, s: AuxSwap) -> Self {
        let mut out = self.clone();
        let g = &mut out.graphs[s.class];
        for (row, from, to) in [(s.a, s.p, s.q), (s.b, s.q, s.p)] {
            g[row * self.k + from] = false;
            g[row * self.k + to] = true;
        }
        out
    }

    /// Every auxiliary swap available from `self`, each rectangle once.
    pub fn swaps(&self) -> Vec<AuxSwap> {
        let mut out = Vec::new();
        for class in 0..self.graphs.len() {
            let rows = self.class_size(class);
            for a in 0..rows {
                for b in a + 1..rows {
                    for p in 0..self.k {
                        for q in 0..self.k {
                            if p != q
                                && self.get(class, a, p)
                                && !self.get(class, a, q)
                                && !self.get(class, b, p)
                                && self.get(class, b, q)
                            {
                                out.push(AuxSwap { class, a, b, p, q });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// True iff the vectors differ in exactly one coordinate, and there by a
    /// four-edge symmetric difference forming a swap rectangle.
    pub fn is_one_swap_from(&self, other: &Self) -> bool {
        if self.k != other.k || self.graphs.len() != other.graphs.len() {
            return false;
        }
        let differing: Vec<usize> = (0..self.graphs.len())
            .filter(|&c| self.graphs[c] != other.graphs[c])
            .collect();
        let [class] = differing[..] else {
            return false;
        };
        let diff: Vec<(usize, usize)> = (0..self.graphs[class].len())
            .filter(|&x| self.graphs[class][x] != other.graphs[class][x])
            .map(|x| (x / self.k, x % self.k))
            .collect();
        if diff.len() != 4 {
            return false;
        }
        let mut rows: Vec<usize> = diff.iter().map(|d| d.0).collect();
        let mut cols: Vec<usize> = diff.iter().map(|d| d.1).collect();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        if rows.len() != 2 || cols.len() != 2 {
            return false;
        }
        // each row loses one column and gains the other
        rows.iter().all(|&r| {
            let [p, q] = [cols[0], cols[1]];
            self.get(class, r, p) != self.get(class, r, q)
        }) && cols.iter().all(|&c| self.get(class, rows[0], c) != self.get(class, rows[1], c))
    }
}

/// The cells `Y_x` of an enumerated space, in order of their keys.
#[derive(Debug, Clone)]
pub struct Partition {
    keys: Vec<AuxiliaryVector>,
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_states(&self) -> usize {
        self.cell_of.len()
    }

    pub fn keys(&self) -> &[AuxiliaryVector] {
        &self.keys
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, x: usize) -> &[usize] {
        &self.cells[x]
    }

    pub fn cell_of(&self, state: usize) -> usize {
        self.cell_of[state]
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    /// For each cell, the realized cells one auxiliary swap away, plus the
    /// number of swap neighbours that no enumerated state realizes.
    pub fn swap_adjacency(&self) -> (Vec<Vec<usize>>, usize) {
        let lookup: HashMap<&AuxiliaryVector, usize> =
            self.keys.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut unrealized = 0;
        let adjacency = self
            .keys
            .iter()
            .map(|x| {
                let mut nbrs: Vec<usize> = Vec::new();
                for s in x.swaps() {
                    match lookup.get(&x.apply(s)) {
                        Some(&y) => nbrs.push(y),
                        None => unrealized += 1,
                    }
                }
                nbrs.sort_unstable();
                nbrs.dedup();
                nbrs
            })
            .collect();
        (adjacency, unrealized)
    }
}

pub fn partition_states(chain: &RsoChain, space: &StateSpace) -> Result<Partition> {
    let mut groups: BTreeMap<AuxiliaryVector, Vec<usize>> = BTreeMap::new();
    for (i, s) in space.states().iter().enumerate() {
        groups.entry(AuxiliaryVector::of(chain, s)?).or_default().push(i);
    }
    let mut cell_of = vec![usize::MAX; space.len()];
    let (keys, cells): (Vec<_>, Vec<_>) = groups.into_iter().unzip();
    for (x, cell) in cells.iter().enumerate() {
        for &y in cell {
            assert_eq!(cell_of[y], usize::MAX, "cells overlap");
            cell_of[y] = x;
        }
    }
    assert!(cell_of.iter().all(|&x| x != usize::MAX), "cells do not cover");
    Ok(Partition {
        keys,
        cells,
        cell_of,
    })
}

/// `M_x`: the full kernel restricted to one cell, mass leaving the cell moved
/// onto the diagonal.
pub fn restricted_chain(cell: &[usize], full: &ExactMatrix) -> ExactMatrix {
    let m = cell.len();
    let mut num = vec![0u64; m * m];
    for (a, &ya) in cell.iter().enumerate() {
        for (b, &yb) in cell.iter().enumerate() {
            if a != b {
                num[a * m + b] = full.numer(ya, yb);
            }
        }
    }
    ExactMatrix::with_completed_diagonal(m, full.denom(), num)
        .expect("a sub-row of a stochastic row cannot exceed one")
}

/// `M'`: one over `n(n-1)(n-2)(n-3)` between cells one auxiliary swap apart.
pub fn projection_chain(partition: &Partition, n: usize) -> Result<ExactMatrix> {
    let cells = partition.num_cells();
    let quads = ordered_quadruples(n);
    if quads == 0 {
        return Ok(ExactMatrix::identity(cells));
    }
    let (adjacency, _) = partition.swap_adjacency();
    let mut num = vec![0u64; cells * cells];
    for (x, nbrs) in adjacency.iter().enumerate() {
        for &y in nbrs {
            num[x * cells + y] = 1;
        }
    }
    ExactMatrix::with_completed_diagonal(cells, quads, num)
}

/// The average-flow projection `(1/|Y_x1|) sum T(y2|y1)` over cells. It is
/// reversible with respect to the cell sizes rather than symmetric.
pub fn average_flow_projection(partition: &Partition, full: &ExactMatrix) -> DenseMatrix {
    let cells = partition.num_cells();
    let mut out = DenseMatrix::zeros(cells);
    for (x1, cell) in partition.cells().iter().enumerate() {
        for &y1 in cell {
            for y2 in 0..full.len() {
                let x2 = partition.cell_of(y2);
                let add = full.numer(y1, y2) as f64 / full.denom() as f64 / cell.len() as f64;
                out.set(x1, x2, out.get(x1, x2) + add);
            }
        }
    }
    out
}

/// Eigenvalues of the average-flow projection, via the symmetric similarity
/// transform by the square roots of the cell sizes.
pub fn average_flow_eigenvalues(partition: &Partition, full: &ExactMatrix) -> Result<Vec<f64>> {
    let t = average_flow_projection(partition, full);
    let w: Vec<f64> = partition.cell_sizes().iter().map(|&s| (s as f64).sqrt()).collect();
    let mut sym = DenseMatrix::zeros(t.len());
    for i in 0..t.len() {
        for j in 0..t.len() {
            sym.set(i, j, w[i] * t.get(i, j) / w[j]);
        }
    }
    // average the rounding asymmetry away before the symmetric solve
    for i in 0..t.len() {
        for j in 0..i {
            let m = 0.5 * (sym.get(i, j) + sym.get(j, i));
            sym.set(i, j, m);
            sym.set(j, i, m);
        }
    }
    eigen_symmetric(&sym)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapTheoremReport {
    /// Off-diagonal transitions `(y1, y2)` examined for part (i).
    pub transitions_checked: usize,
    /// Transitions whose auxiliary vectors are neither equal nor one swap apart.
    pub part_i_violations: Vec<(usize, usize)>,
    /// `(y1, x2)` pairs examined for part (ii).
    pub pairs_checked: usize,
    /// States `y1` with no single move into a realized neighbouring cell `x2`.
    pub part_ii_violations: Vec<(usize, usize)>,
    /// Auxiliary swap neighbours not realized by any enumerated state.
    pub unrealized_neighbors: usize,
    pub holds: bool,
}

pub fn verify_swap_theorem(partition: &Partition, full: &ExactMatrix) -> SwapTheoremReport {
    let n = full.len();
    let mut report = SwapTheoremReport {
        transitions_checked: 0,
        part_i_violations: Vec::new(),
        pairs_checked: 0,
        part_ii_violations: Vec::new(),
        unrealized_neighbors: 0,
        holds: true,
    };
    let keys = partition.keys();
    for y1 in 0..n {
        for y2 in 0..n {
            if y1 == y2 || full.numer(y1, y2) == 0 {
                continue;
            }
            report.transitions_checked += 1;
            let (x1, x2) = (partition.cell_of(y1), partition.cell_of(y2));
            if x1 != x2 && !keys[x1].is_one_swap_from(&keys[x2]) {
                report.part_i_violations.push((y1, y2));
            }
        }
    }
    let (adjacency, unrealized) = partition.swap_adjacency();
    report.unrealized_neighbors = unrealized;
    for y1 in 0..n {
        let x1 = partition.cell_of(y1);
        let mut reached = vec![false; partition.num_cells()];
        for y2 in 0..n {
            if full.numer(y1, y2) > 0 {
                reached[partition.cell_of(y2)] = true;
            }
        }
        for &x2 in &adjacency[x1] {
            report.pairs_checked += 1;
            if !reached[x2] {
                report.part_ii_violations.push((y1, x2));
            }
        }
    }
    report.holds = report.part_i_violations.is_empty() && report.part_ii_violations.is_empty();
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSummary {
    pub state_count: usize,
    pub cell_count: usize,
    pub cell_sizes: Vec<usize>,
    /// Number of cells with each projection-chain degree.
    pub projection_degree_histogram: BTreeMap<usize, usize>,
}

impl PartitionSummary {
    pub fn of(partition: &Partition) -> Self {
        let (adjacency, _) = partition.swap_adjacency();
        let mut projection_degree_histogram = BTreeMap::new();
        for nbrs in &adjacency {
            *projection_degree_histogram.entry(nbrs.len()).or_insert(0) += 1;
        }
        Self {
            state_count: partition.num_states(),
            cell_count: partition.num_cells(),
            cell_sizes: partition.cell_sizes(),
            projection_degree_histogram,
        }
    }
}

/// Factor coordinates of the assembly: `(i, i)` then `(i, j)` with `i < j`,
/// `k(k+1)/2` in total.
pub fn assembly_coordinates(k: usize) -> Vec<(usize, usize)> {
    (0..k)
        .map(|i| (i, i))
        .chain((0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))))
        .collect()
}

/// `(1/K) sum_i I x ... x M_i x ... x I`, built explicitly.
pub fn product_chain(components: &[DenseMatrix], cap: usize) -> Result<DenseMatrix> {
    assert!(!components.is_empty(), "product of no chains");
    let dims: Vec<usize> = components.iter().map(DenseMatrix::len).collect();
    let size = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&s| s <= cap)
        .ok_or_else(|| Error::DimensionOverflow {
            size: dims.iter().fold(1usize, |acc, &d| acc.saturating_mul(d)),
            cap,
        })?;
    let k = components.len() as f64;
    // mixed radix, first component most significant
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut out = DenseMatrix::zeros(size);
    for s in 0..size {
        for (i, m) in components.iter().enumerate() {
            let c = (s / strides[i]) % dims[i];
            let base = s - c * strides[i];
            for t in 0..dims[i] {
                let target = base + t * strides[i];
                out.set(s, target, out.get(s, target) + m.get(c, t) / k);
            }
        }
    }
    Ok(out)
}

/// `(K - 1 + max lambda) / K`.
pub fn product_second_eigenvalue(lambdas: &[f64], k: usize) -> f64 {
    assert!(k >= 1);
    let max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (k as f64 - 1.0 + max) / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_balanced, DEFAULT_BFS_CAP};
    use crate::jdm::JointDegreeMatrix;
    use crate::spectra::transition_matrix;
    use num_rational::Ratio;

    fn setup(degrees: &[u32], rows: &[&[u64]]) -> (RsoChain, StateSpace, Partition, ExactMatrix) {
        let j = JointDegreeMatrix::new(degrees.to_vec(), rows.iter().map(|r| r.to_vec()).collect())
            .unwrap();
        let chain = RsoChain::new(j).unwrap();
        let space = enumerate_balanced(&chain, DEFAULT_BFS_CAP).unwrap();
        let partition = partition_states(&chain, &space).unwrap();
        let full = transition_matrix(&chain, &space).unwrap();
        (chain, space, partition, full)
    }

    fn jdm_c() -> (RsoChain, StateSpace, Partition, ExactMatrix) {
        setup(&[1, 2], &[&[1, 2], &[2, 0]])
    }

    #[test]
    fn jdm_a_is_one_cell_with_complete_aux_graphs() {
        let (chain, space, partition, full) = setup(&[1, 2], &[&[0, 2], &[2, 1]]);
        assert_eq!(partition.cell_sizes(), vec![2]);
        for s in space.states() {
            let x = AuxiliaryVector::of(&chain, s).unwrap();
            for c in 0..2 {
                for v in 0..x.class_size(c) {
                    assert!((0..2).all(|j| x.get(c, v, j)));
                }
            }
        }
        assert_eq!(restricted_chain(&[0, 1], &full), full);
        assert_eq!(projection_chain(&partition, 4).unwrap(), ExactMatrix::identity(1));
        assert!(verify_swap_theorem(&partition, &full).holds);
    }

    #[test]
    fn jdm_c_hub_neighbours_fix_the_aux_vector() {
        let (chain, space, partition, _) = jdm_c();
        assert_eq!(partition.cell_sizes(), vec![1; 6]);
        // class 0 is the four leaves-or-pairs 0..4, vertex 4 is the hub
        for s in space.states() {
            let x = AuxiliaryVector::of(&chain, s).unwrap();
            assert_eq!(x.row_degree(0), Some(1));
            for v in 0..4 {
                let to_hub = s.realization().has_edge(v, 4);
                assert_eq!(x.get(0, v, 1), to_hub);
                assert_eq!(x.get(0, v, 0), !to_hub);
            }
            assert_eq!(x.row_degree(1), Some(2));
        }
    }

    #[test]
    fn jdm_c_projection_is_the_two_subset_swap_graph() {
        let (chain, space, partition, _) = jdm_c();
        let p = projection_chain(&partition, 5).unwrap();
        assert!(p.is_symmetric() && p.is_row_stochastic());
        let hubs: Vec<Vec<usize>> = partition
            .cells()
            .iter()
            .map(|c| (0..4).filter(|&v| space.get(c[0]).realization().has_edge(v, 4)).collect())
            .collect();
        for a in 0..6 {
            for b in 0..6 {
                if a == b {
                    continue;
                }
                let shared = hubs[a].iter().filter(|v| hubs[b].contains(v)).count();
                let expect = if shared == 1 { Ratio::new(1, 120) } else { Ratio::from_integer(0) };
                assert_eq!(p.get(a, b), expect, "{a} {b}");
            }
        }
        let summary = PartitionSummary::of(&partition);
        assert_eq!(summary.projection_degree_histogram, BTreeMap::from([(4, 6)]));
        let _ = chain;
    }

    #[test]
    fn swap_theorem_holds_on_jdm_c() {
        let (_, _, partition, full) = jdm_c();
        let r = verify_swap_theorem(&partition, &full);
        assert!(r.holds, "{r:?}");
        assert_eq!(r.transitions_checked, 24);
        assert_eq!(r.pairs_checked, 24);
        assert_eq!(r.unrealized_neighbors, 0);
    }

    #[test]
    fn one_swap_relation() {
        let x = AuxiliaryVector {
            k: 2,
            graphs: vec![vec![true, false, false, true, true, false]],
        };
        let swaps = x.swaps();
        // rows (0,1) and (1,2) each admit one rectangle
        assert_eq!(swaps.len(), 2);
        for s in swaps {
            let y = x.apply(s);
            assert!(x.is_one_swap_from(&y) && y.is_one_swap_from(&x));
            assert!(!x.is_one_swap_from(&x));
        }
        // flipping two bits in one row is not a swap
        let z = AuxiliaryVector {
            k: 2,
            graphs: vec![vec![false, true, false, true, true, false]],
        };
        assert!(!x.is_one_swap_from(&z));
    }

    #[test]
    fn restricted_chain_completes_rows() {
        let full = ExactMatrix::new(3, 10, vec![7, 2, 1, 2, 8, 0, 1, 0, 9]);
        let r = restricted_chain(&[0, 1], &full);
        assert_eq!(r, ExactMatrix::new(2, 10, vec![8, 2, 2, 8]));
        assert_eq!(restricted_chain(&[2], &full), ExactMatrix::new(1, 10, vec![10]));
    }

    #[test]
    fn product_of_two_flips() {
        let flip = |p: f64| DenseMatrix::from_rows(&[vec![1.0 - p, p], vec![p, 1.0 - p]]);
        let (p, q) = (0.1, 0.3);
        let prod = product_chain(&[flip(p), flip(q)], DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(prod.len(), 4);
        let eig = eigen_symmetric(&prod).unwrap();
        let formula = product_second_eigenvalue(&[1.0 - 2.0 * p, 1.0 - 2.0 * q], 2);
        assert!((eig[1] - formula).abs() < 1e-12);
        assert!((formula - (1.0 - p.min(q))).abs() < 1e-12);
        let single = product_chain(&[flip(p)], 16).unwrap();
        assert_eq!(single, flip(p));
        let id = product_chain(&[DenseMatrix::identity(2), DenseMatrix::identity(3)], 16).unwrap();
        assert_eq!(id, DenseMatrix::identity(6));
        assert!((product_second_eigenvalue(&[0.5, 0.9, 0.7], 3) - 29.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn product_cap() {
        let m = DenseMatrix::identity(20);
        assert!(matches!(
            product_chain(&[m.clone(), m.clone(), m], DEFAULT_PRODUCT_CAP),
            Err(Error::DimensionOverflow { size: 8000, cap: 4096 })
        ));
    }

    #[test]
    fn assembly_coordinate_count() {
        assert_eq!(assembly_coordinates(3), vec![(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]);
        for k in 0..6 {
            assert_eq!(assembly_coordinates(k).len(), k * (k + 1) / 2);
        }
    }

    #[test]
    fn average_flow_on_singleton_cells_is_the_full_chain() {
        let (_, _, partition, full) = jdm_c();
        let avg = average_flow_projection(&partition, &full);
        for a in 0..6 {
            for b in 0..6 {
                let (ya, yb) = (partition.cell(a)[0], partition.cell(b)[0]);
                assert!((avg.get(a, b) - full.numer(ya, yb) as f64 / 240.0).abs() < 1e-15);
            }
        }
        let eig = average_flow_eigenvalues(&partition, &full).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-12);
    }
}
