//! Joint degree matrices, their degree classes and balanced realizations.
//!
//! Classes are indexed by position in the degree list, which is strictly
//! increasing. In every [`Realization`] the vertices of class `i` occupy a
//! contiguous id range, classes laid out in ascending degree order.

use std::fmt;
use std::ops::Range;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric matrix of edge counts between degree classes.
///
/// `entry(i, j)` is the number of edges joining the class of degree
/// `degrees[i]` to the class of degree `degrees[j]`. The diagonal counts
/// internal edges once.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointDegreeMatrix {
    degrees: Vec<u32>,
    matrix: Vec<u64>,
}

impl JointDegreeMatrix {
    pub fn new(degrees: Vec<u32>, rows: Vec<Vec<u64>>) -> Result<Self> {
        let k = degrees.len();
        if k == 0 {
            return Err(Error::InvalidMatrix("no degree classes".into()));
        }
        if degrees[0] == 0 {
            return Err(Error::InvalidMatrix("degrees must be positive".into()));
        }
        if degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMatrix(
                "degrees must be strictly increasing".into(),
            ));
        }
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidMatrix(format!("matrix must be {k}x{k}")));
        }
        for i in 0..k {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidMatrix(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            degrees,
            matrix: rows.into_iter().flatten().collect(),
        })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn num_classes(&self) -> usize {
        self.degrees.len()
    }

    pub fn max_degree(&self) -> u32 {
        *self.degrees.last().expect("at least one class")
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.matrix[i * self.num_classes() + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.matrix
            .chunks(self.num_classes())
            .map(|r| r.to_vec())
            .collect()
    }

    /// Number of edge endpoints in class `i` whose other end lies in class `j`.
    pub fn endpoint_total(&self, i: usize, j: usize) -> u64 {
        if i == j {
            2 * self.entry(i, i)
        } else {
            self.entry(i, j)
        }
    }

    /// Class sizes `n_i = (J_ii + sum_j J_ij) / degree_i`.
    pub fn class_sizes(&self) -> Result<ClassSizes> {
        let k = self.num_classes();
        let mut sizes = Vec::with_capacity(k);
        for (i, &deg) in self.degrees.iter().enumerate() {
            let endpoints: u64 = (0..k).map(|j| self.endpoint_total(i, j)).sum();
            if !endpoints.is_multiple_of(u64::from(deg)) {
                return Err(Error::NonIntegralClassSize {
                    class: i,
                    degree: deg,
                });
            }
            sizes.push((endpoints / u64::from(deg)) as usize);
        }
        Ok(ClassSizes::new(sizes))
    }

    pub fn is_graphical(&self) -> GraphicalReport {
        let k = self.num_classes();
        let mut violations = Vec::new();
        let mut sizes = Vec::with_capacity(k);
        for (i, &deg) in self.degrees.iter().enumerate() {
            let endpoints: u64 = (0..k).map(|j| self.endpoint_total(i, j)).sum();
            if endpoints.is_multiple_of(u64::from(deg)) {
                sizes.push(Some(endpoints / u64::from(deg)));
            } else {
                violations.push(Violation::NonIntegralClassSize {
                    class: i,
                    degree: deg,
                    endpoints,
                });
                sizes.push(None);
            }
        }
        for i in 0..k {
            let Some(ni) = sizes[i] else { continue };
            let capacity = ni * ni.saturating_sub(1) / 2;
            if self.entry(i, i) > capacity {
                violations.push(Violation::InternalOverflow {
                    class: i,
                    edges: self.entry(i, i),
                    capacity,
                });
            }
            for j in i + 1..k {
                let Some(nj) = sizes[j] else { continue };
                if self.entry(i, j) > ni * nj {
                    violations.push(Violation::CrossOverflow {
                        classes: (i, j),
                        edges: self.entry(i, j),
                        capacity: ni * nj,
                    });
                }
            }
        }
        GraphicalReport {
            graphical: violations.is_empty(),
            violations,
        }
    }

    /// Fails with [`Error::NotGraphical`] unless every graphicality condition holds.
    pub fn require_graphical(&self) -> Result<ClassSizes> {
        let report = self.is_graphical();
        if !report.graphical {
            return Err(Error::NotGraphical(report.violations));
        }
        self.class_sizes()
    }

    pub fn theta(&self, mode: ThetaMode) -> Result<ThetaTable> {
        let sizes = self.class_sizes()?;
        let k = self.num_classes();
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            let ni = sizes.size(i) as i64;
            for j in 0..k {
                let num = match mode {
                    ThetaMode::Consistent => self.endpoint_total(i, j),
                    ThetaMode::Literal => self.entry(i, j),
                } as i64;
                entries.push(if ni == 0 {
                    Ratio::from_integer(0)
                } else {
                    Ratio::new(num, ni)
                });
            }
        }
        Ok(ThetaTable { k, entries })
    }
}

impl fmt::Display for JointDegreeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degs: Vec<String> = self.degrees.iter().map(u32::to_string).collect();
        writeln!(f, "{}", degs.join(" "))?;
        for row in self.matrix.chunks(self.num_classes()) {
            let row: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// A failed graphicality condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonIntegralClassSize {
        class: usize,
        degree: u32,
        endpoints: u64,
    },
    InternalOverflow {
        class: usize,
        edges: u64,
        capacity: u64,
    },
    CrossOverflow {
        classes: (usize, usize),
        edges: u64,
        capacity: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphicalReport {
    pub graphical: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSizes {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl ClassSizes {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in &sizes {
            acc += s;
            offsets.push(acc);
        }
        Self { sizes, offsets }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, class: usize) -> usize {
        self.sizes[class]
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Contiguous vertex ids of `class`.
    pub fn range(&self, class: usize) -> Range<usize> {
        self.offsets[class]..self.offsets[class + 1]
    }

    /// Class index of every vertex under the contiguous layout.
    pub fn class_of_vertices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total());
        for (class, &s) in self.sizes.iter().enumerate() {
            out.extend(std::iter::repeat_n(class, s));
        }
        out
    }
}

/// How the diagonal of the average-neighbour table is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// `2 J_ii / n_i` on the diagonal: the mean number of same-class neighbours.
    #[default]
    Consistent,
    /// `J_ii / n_i` on the diagonal, taken literally from the edge count.
    Literal,
}

/// Exact average number of class-`j` neighbours of a class-`i` vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTable {
    k: usize,
    entries: Vec<Ratio<i64>>,
}

impl ThetaTable {
    pub fn get(&self, i: usize, j: usize) -> Ratio<i64> {
        self.entries[i * self.k + j]
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn floor(&self, i: usize, j: usize) -> u32 {
        self.get(i, j).floor().to_integer() as u32
    }

    pub fn ceil(&self, i: usize, j: usize) -> u32 {
        self.get(i, j).ceil().to_integer() as u32
    }

    /// Whether `count` lies strictly within distance one of `theta[i][j]`.
    pub fn admits(&self, i: usize, j: usize, count: u32) -> bool {
        let t = self.get(i, j);
        within_one(count, *t.numer(), *t.denom())
    }
}

/// `|count - numer/denom| < 1`, decided in integers. `denom` must be positive.
pub fn within_one(count: u32, numer: i64, denom: i64) -> bool {
    debug_assert!(denom > 0);
    let diff = i128::from(count) * i128::from(denom) - i128::from(numer);
    diff.abs() < i128::from(denom)
}

/// A labelled simple graph together with its degree-class partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Realization {
    class_degrees: Vec<u32>,
    class_of: Vec<usize>,
    adj: Vec<bool>,
}

impl Realization {
    /// Builds a simple graph; rejects loops, repeated edges and bad ids.
    pub fn new(
        class_degrees: Vec<u32>,
        class_of: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = class_of.len();
        if let Some(v) = class_of.iter().position(|&c| c >= class_degrees.len()) {
            return Err(Error::InvalidRealization(format!(
                "vertex {v} has unknown class {}",
                class_of[v]
            )));
        }
        let mut g = Self {
            class_degrees,
            class_of,
            adj: vec![false; n * n],
        };
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidRealization(format!(
                    "edge ({u}, {v}) references a missing vertex"
                )));
            }
            if u == v {
                return Err(Error::InvalidRealization(format!("self-loop at {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidRealization(format!(
                    "repeated edge ({u}, {v})"
                )));
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    pub fn empty(class_degrees: Vec<u32>, class_of: Vec<usize>) -> Self {
        let n = class_of.len();
        Self {
            class_degrees,
            class_of,
            adj: vec![false; n * n],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_degrees.len()
    }

    pub fn class_degrees(&self) -> &[u32] {
        &self.class_degrees
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class_of
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.num_vertices() + v]
    }

    pub(crate) fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        let n = self.num_vertices();
        self.adj[u * n + v] = present;
        self.adj[v * n + u] = present;
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.num_vertices();
        self.adj[v * n..(v + 1) * n]
            .iter()
            .enumerate()
            .filter_map(|(u, &e)| e.then_some(u))
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.neighbors(v).count() as u32
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.num_vertices();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count() / 2
    }

    /// Per-vertex neighbour counts by class.
    pub fn degree_spectrum(&self) -> Result<DegreeSpectrum> {
        let spectrum = self.raw_spectrum();
        for v in 0..self.num_vertices() {
            let expected = self.class_degrees[self.class_of[v]];
            let actual: u32 = spectrum.row(v).iter().sum();
            if actual != expected {
                return Err(Error::InconsistentDegrees {
                    vertex: v,
                    expected,
                    actual,
                });
            }
        }
        Ok(spectrum)
    }

    pub(crate) fn raw_spectrum(&self) -> DegreeSpectrum {
        let k = self.num_classes();
        let n = self.num_vertices();
        let mut counts = vec![0u32; n * k];
        for v in 0..n {
            for u in self.neighbors(v) {
                counts[v * k + self.class_of[u]] += 1;
            }
        }
        DegreeSpectrum { k, counts }
    }

    /// Edge counts between class pairs, diagonal counted once per edge.
    pub fn jdm(&self) -> JointDegreeMatrix {
        let k = self.num_classes();
        let mut rows = vec![vec![0u64; k]; k];
        for (u, v) in self.edges() {
            let (a, b) = (self.class_of[u], self.class_of[v]);
            rows[a][b] += 1;
            if a != b {
                rows[b][a] += 1;
            }
        }
        JointDegreeMatrix {
            degrees: self.class_degrees.clone(),
            matrix: rows.into_iter().flatten().collect(),
        }
    }

    pub fn is_balanced(&self, jdm: &JointDegreeMatrix) -> Result<bool> {
        self.is_balanced_with(jdm, ThetaMode::Consistent)
    }

    pub fn is_balanced_with(&self, jdm: &JointDegreeMatrix, mode: ThetaMode) -> Result<bool> {
        if &self.jdm() != jdm {
            return Err(Error::JdmMismatch);
        }
        let sizes = jdm.class_sizes()?;
        if sizes.sizes() != class_counts(&self.class_of, self.num_classes()).as_slice() {
            return Err(Error::JdmMismatch);
        }
        let spectrum = self.degree_spectrum()?;
        let theta = jdm.theta(mode)?;
        Ok(spectrum.is_balanced(&self.class_of, &theta))
    }
}

fn class_counts(class_of: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0; k];
    for &c in class_of {
        counts[c] += 1;
    }
    counts
}

/// `counts[v][j]`: number of neighbours of `v` in class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSpectrum {
    k: usize,
    counts: Vec<u32>,
}

impl DegreeSpectrum {
    pub fn num_vertices(&self) -> usize {
        self.counts.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn row(&self, v: usize) -> &[u32] {
        &self.counts[v * self.k..(v + 1) * self.k]
    }

    pub fn get(&self, v: usize, class: usize) -> u32 {
        self.counts[v * self.k + class]
    }

    pub(crate) fn shift(&mut self, v: usize, lose: usize, gain: usize) {
        self.counts[v * self.k + lose] -= 1;
        self.counts[v * self.k + gain] += 1;
    }

    pub fn vertex_is_balanced(&self, v: usize, class: usize, theta: &ThetaTable) -> bool {
        self.row(v)
            .iter()
            .enumerate()
            .all(|(j, &d)| theta.admits(class, j, d))
    }

    pub fn is_balanced(&self, class_of: &[usize], theta: &ThetaTable) -> bool {
        (0..self.num_vertices()).all(|v| self.vertex_is_balanced(v, class_of[v], theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn jdm(degrees: &[u32], rows: &[&[u64]]) -> JointDegreeMatrix {
        JointDegreeMatrix::new(degrees.to_vec(), rows.iter().map(|r| r.to_vec()).collect())
            .unwrap()
    }

    fn jdm_a_realization() -> Realization {
        // a1=0, a2=1 (degree 1); b1=2, b2=3 (degree 2)
        Realization::new(vec![1, 2], vec![0, 0, 1, 1], [(0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn class_sizes_match_hand_evaluation() {
        let a = jdm(&[1, 2], &[&[0, 2], &[2, 1]]);
        let s = a.class_sizes().unwrap();
        assert_eq!(s.sizes(), &[2, 2]);
        assert_eq!(s.total(), 4);

        let b = jdm(&[2, 3], &[&[0, 6], &[6, 0]]);
        let s = b.class_sizes().unwrap();
        assert_eq!(s.sizes(), &[3, 2]);
        assert_eq!(s.total(), 5);

        let empty = jdm(&[1], &[&[0]]);
        let s = empty.class_sizes().unwrap();
        assert_eq!(s.sizes(), &[0]);
        assert_eq!(s.total(), 0);
    }

    #[test]
    fn non_integral_class_size_names_the_class() {
        let bad = jdm(&[1, 2], &[&[0, 3], &[3, 0]]);
        assert_eq!(
            bad.class_sizes(),
            Err(Error::NonIntegralClassSize { class: 1, degree: 2 })
        );
        let report = bad.is_graphical();
        assert!(!report.graphical);
        assert!(matches!(
            report.violations[0],
            Violation::NonIntegralClassSize { class: 1, .. }
        ));
    }

    #[test]
    fn graphicality_conditions() {
        assert!(jdm(&[1, 2], &[&[0, 2], &[2, 1]]).is_graphical().graphical);
        assert!(jdm(&[2], &[&[4]]).is_graphical().graphical);
        // n_1 = 2 but three internal edges requested
        let r = jdm(&[3], &[&[3]]).is_graphical();
        assert!(!r.graphical);
        assert!(matches!(r.violations[0], Violation::InternalOverflow { .. }));
        // n_1 = 1, n_2 = 1 but 2 cross edges would need a multi-edge
        let r = jdm(&[2], &[&[1]]).is_graphical();
        assert!(!r.graphical);
    }

    #[test]
    fn rejects_malformed_matrices() {
        assert!(JointDegreeMatrix::new(vec![2, 1], vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(JointDegreeMatrix::new(vec![0], vec![vec![0]]).is_err());
        assert!(JointDegreeMatrix::new(vec![1, 2], vec![vec![0, 1], vec![2, 0]]).is_err());
        assert!(JointDegreeMatrix::new(vec![1, 2], vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn spectrum_of_small_graphs() {
        let g = jdm_a_realization();
        let s = g.degree_spectrum().unwrap();
        assert_eq!(s.row(0), &[0, 1]);
        assert_eq!(s.row(2), &[1, 1]);

        let cycle =
            Realization::new(vec![2], vec![0; 4], [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let s = cycle.degree_spectrum().unwrap();
        assert!((0..4).all(|v| s.row(v) == [2]));

        let empty = Realization::empty(vec![1], vec![]);
        assert_eq!(empty.degree_spectrum().unwrap().num_vertices(), 0);
    }

    #[test]
    fn spectrum_detects_inconsistent_degree() {
        let g = Realization::new(vec![2], vec![0; 3], [(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            g.degree_spectrum(),
            Err(Error::InconsistentDegrees { vertex: 0, .. })
        ));
    }

    #[test]
    fn jdm_round_trips() {
        assert_eq!(jdm_a_realization().jdm(), jdm(&[1, 2], &[&[0, 2], &[2, 1]]));
        let k4 = Realization::new(
            vec![3],
            vec![0; 4],
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        assert_eq!(k4.jdm(), jdm(&[3], &[&[6]]));
        let empty = Realization::empty(vec![1, 2], vec![]);
        assert_eq!(empty.jdm(), jdm(&[1, 2], &[&[0, 0], &[0, 0]]));
    }

    #[test]
    fn balancedness_examples() {
        let a = jdm(&[1, 2], &[&[0, 2], &[2, 1]]);
        assert!(jdm_a_realization().is_balanced(&a).unwrap());

        // hub = 4 adjacent to 0 and 1; edge {2, 3}
        let c = jdm(&[1, 2], &[&[1, 2], &[2, 0]]);
        let g = Realization::new(vec![1, 2], vec![0, 0, 0, 0, 1], [(0, 4), (1, 4), (2, 3)])
            .unwrap();
        assert!(g.is_balanced(&c).unwrap());

        let k4 = Realization::new(
            vec![3],
            vec![0; 4],
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        assert!(k4.is_balanced(&jdm(&[3], &[&[6]])).unwrap());
    }

    #[test]
    fn literal_theta_rejects_the_regular_cycle() {
        let b = jdm(&[2], &[&[4]]);
        let cycle =
            Realization::new(vec![2], vec![0; 4], [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(cycle.is_balanced_with(&b, ThetaMode::Consistent).unwrap());
        assert!(!cycle.is_balanced_with(&b, ThetaMode::Literal).unwrap());
    }

    #[test]
    fn balancedness_requires_matching_jdm() {
        let other = jdm(&[1, 2], &[&[1, 2], &[2, 0]]);
        assert_eq!(jdm_a_realization().is_balanced(&other), Err(Error::JdmMismatch));
    }

    #[test]
    fn theta_diagonal_convention() {
        let c = jdm(&[1, 2], &[&[1, 2], &[2, 0]]);
        let t = c.theta(ThetaMode::Consistent).unwrap();
        assert_eq!(t.get(0, 0), Ratio::new(1, 2));
        assert_eq!(t.get(0, 1), Ratio::new(1, 2));
        assert_eq!(t.get(1, 0), Ratio::from_integer(2));
        let lit = c.theta(ThetaMode::Literal).unwrap();
        assert_eq!(lit.get(0, 0), Ratio::new(1, 4));
    }

    #[test]
    fn boundary_distance_one_is_not_balanced() {
        assert!(!within_one(2, 1, 1));
        assert!(within_one(1, 1, 2));
        assert!(within_one(0, 1, 2));
        assert!(!within_one(2, 2, 2));
        assert!(!within_one(0, 3, 3));
    }

    #[test]
    fn class_ranges_are_contiguous() {
        let s = ClassSizes::new(vec![2, 0, 3]);
        assert_eq!(s.range(0), 0..2);
        assert_eq!(s.range(1), 2..2);
        assert_eq!(s.range(2), 2..5);
        assert_eq!(s.class_of_vertices(), vec![0, 0, 2, 2, 2]);
    }
}
