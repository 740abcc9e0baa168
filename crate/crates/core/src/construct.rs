//! Deterministic construction of a balanced realization.
//!
//! Every vertex gets a per-class degree prescription (floor or ceiling of the
//! class average), after which each class pair is realized independently as a
//! near-regular factor and the factors are united on their shared labels.

use crate::error::{Error, Result};
use crate::jdm::{ClassSizes, JointDegreeMatrix, Realization, ThetaMode, ThetaTable};

/// Which vertices of each class carry the ceiling of the class average toward
/// each other class. `carries_ceiling(i, r, j)` refers to the `r`-th vertex of
/// class `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeilingAssignment {
    k: usize,
    per_class: Vec<Vec<bool>>,
}

impl CeilingAssignment {
    pub fn carries_ceiling(&self, class: usize, rank: usize, toward: usize) -> bool {
        self.per_class[class][rank * self.k + toward]
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.per_class[class].len() / self.k.max(1)
    }

    pub fn ceiling_count(&self, class: usize, toward: usize) -> usize {
        (0..self.class_size(class))
            .filter(|&r| self.carries_ceiling(class, r, toward))
            .count()
    }

    /// Prescribed `d_toward(v)` for the `rank`-th vertex of `class`.
    pub fn prescribed(&self, theta: &ThetaTable, class: usize, rank: usize, toward: usize) -> u32 {
        if self.carries_ceiling(class, rank, toward) {
            theta.ceil(class, toward)
        } else {
            theta.floor(class, toward)
        }
    }
}

/// Excess endpoints of class `i` toward `j` beyond `n_i * floor(theta_ij)`.
fn excess(jdm: &JointDegreeMatrix, sizes: &ClassSizes, i: usize, j: usize) -> usize {
    let ni = sizes.size(i) as u64;
    if ni == 0 {
        return 0;
    }
    (jdm.endpoint_total(i, j) % ni) as usize
}

/// Distributes ceiling tokens round-robin over each class, classes `j` taken
/// in ascending order with the vertex cursor carried across `j`.
pub fn ceiling_assignment(jdm: &JointDegreeMatrix) -> Result<CeilingAssignment> {
    let sizes = jdm.require_graphical()?;
    let k = jdm.num_classes();
    let mut per_class = Vec::with_capacity(k);
    for i in 0..k {
        let ni = sizes.size(i);
        let mut marks = vec![false; ni * k];
        let total: usize = (0..k).map(|j| excess(jdm, &sizes, i, j)).sum();
        if ni > 0 && !total.is_multiple_of(ni) {
            return Err(Error::NotGraphical(Vec::new()));
        }
        let mut cursor = 0;
        for j in 0..k {
            for _ in 0..excess(jdm, &sizes, i, j) {
                marks[cursor * k + j] = true;
                cursor = (cursor + 1) % ni;
            }
        }
        per_class.push(marks);
    }
    Ok(CeilingAssignment { k, per_class })
}

/// Side of a factor graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Internal { class: usize },
    Bipartite { rows: usize, cols: usize },
}

/// One factor of the labelled union. Edges use local indices: for an internal
/// factor both ends index the class; for a bipartite factor `(row, col)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    pub kind: FactorKind,
    pub edges: Vec<(usize, usize)>,
}

impl FactorGraph {
    /// Largest minus smallest degree on each side.
    pub fn degree_spread(&self, sides: (usize, usize)) -> (u32, u32) {
        let spread = |d: &[u32]| match (d.iter().max(), d.iter().min()) {
            (Some(hi), Some(lo)) => hi - lo,
            _ => 0,
        };
        match self.kind {
            FactorKind::Internal { .. } => {
                let mut deg = vec![0u32; sides.0];
                for &(u, v) in &self.edges {
                    deg[u] += 1;
                    deg[v] += 1;
                }
                let s = spread(&deg);
                (s, s)
            }
            FactorKind::Bipartite { .. } => {
                let mut rows = vec![0u32; sides.0];
                let mut cols = vec![0u32; sides.1];
                for &(r, c) in &self.edges {
                    rows[r] += 1;
                    cols[c] += 1;
                }
                (spread(&rows), spread(&cols))
            }
        }
    }
}

/// Greedy bipartite realization: rows by descending prescription (ties by
/// index), each joined to the columns with the largest remaining demand
/// (ties by ascending column index).
pub fn build_bipartite_factor(
    rows: &[u32],
    cols: &[u32],
    kind: FactorKind,
) -> Result<FactorGraph> {
    let infeasible = || Error::Infeasible {
        factor: format!("{kind:?}"),
    };
    let row_sum: u64 = rows.iter().map(|&d| u64::from(d)).sum();
    let col_sum: u64 = cols.iter().map(|&d| u64::from(d)).sum();
    if row_sum != col_sum {
        return Err(infeasible());
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&r| (std::cmp::Reverse(rows[r]), r));
    let mut residual = cols.to_vec();
    let mut edges = Vec::with_capacity(row_sum as usize);
    for r in order {
        let need = rows[r] as usize;
        if need == 0 {
            continue;
        }
        let mut cand: Vec<usize> = (0..cols.len()).filter(|&c| residual[c] > 0).collect();
        if cand.len() < need {
            return Err(infeasible());
        }
        cand.sort_by_key(|&c| (std::cmp::Reverse(residual[c]), c));
        for &c in &cand[..need] {
            residual[c] -= 1;
            edges.push((r, c));
        }
    }
    edges.sort_unstable();
    Ok(FactorGraph { kind, edges })
}

/// Havel-Hakimi: repeatedly take the vertex of highest residual degree
/// (lowest index on ties) and join it to the next-highest residuals.
pub fn build_internal_factor(degrees: &[u32], kind: FactorKind) -> Result<FactorGraph> {
    let infeasible = || Error::Infeasible {
        factor: format!("{kind:?}"),
    };
    let n = degrees.len();
    if !degrees.iter().map(|&d| u64::from(d)).sum::<u64>().is_multiple_of(2) {
        return Err(infeasible());
    }
    let mut residual = degrees.to_vec();
    let mut done = vec![false; n];
    let mut edges = Vec::new();
    while let Some(v) = (0..n)
        .filter(|&v| !done[v] && residual[v] > 0)
        .min_by_key(|&v| (std::cmp::Reverse(residual[v]), v))
    {
        done[v] = true;
        let need = residual[v] as usize;
        residual[v] = 0;
        let mut cand: Vec<usize> = (0..n).filter(|&u| !done[u] && residual[u] > 0).collect();
        if cand.len() < need {
            return Err(infeasible());
        }
        cand.sort_by_key(|&u| (std::cmp::Reverse(residual[u]), u));
        for &u in &cand[..need] {
            residual[u] -= 1;
            edges.push((v.min(u), v.max(u)));
        }
    }
    edges.sort_unstable();
    Ok(FactorGraph { kind, edges })
}

/// The factors of the labelled union, internal factors first, then bipartite
/// factors for `i < j` in lexicographic order.
pub fn balanced_factors(jdm: &JointDegreeMatrix) -> Result<Vec<FactorGraph>> {
    let sizes = jdm.require_graphical()?;
    let theta = jdm.theta(ThetaMode::Consistent)?;
    let ceil = ceiling_assignment(jdm)?;
    let k = jdm.num_classes();
    let prescription = |i: usize, j: usize| -> Vec<u32> {
        (0..sizes.size(i))
            .map(|r| ceil.prescribed(&theta, i, r, j))
            .collect()
    };
    let mut factors = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        factors.push(build_internal_factor(
            &prescription(i, i),
            FactorKind::Internal { class: i },
        )?);
    }
    for i in 0..k {
        for j in i + 1..k {
            factors.push(build_bipartite_factor(
                &prescription(i, j),
                &prescription(j, i),
                FactorKind::Bipartite { rows: i, cols: j },
            )?);
        }
    }
    Ok(factors)
}

/// Collapses factors onto global vertex ids.
pub fn labeled_union(jdm: &JointDegreeMatrix, factors: &[FactorGraph]) -> Result<Realization> {
    let sizes = jdm.class_sizes()?;
    let mut edges = Vec::new();
    for f in factors {
        match f.kind {
            FactorKind::Internal { class } => {
                let base = sizes.range(class).start;
                edges.extend(f.edges.iter().map(|&(u, v)| (base + u, base + v)));
            }
            FactorKind::Bipartite { rows, cols } => {
                let (rb, cb) = (sizes.range(rows).start, sizes.range(cols).start);
                edges.extend(f.edges.iter().map(|&(r, c)| (rb + r, cb + c)));
            }
        }
    }
    Realization::new(jdm.degrees().to_vec(), sizes.class_of_vertices(), edges)
}

/// Splits a realization into its per-class-pair factors (inverse of
/// [`labeled_union`]).
pub fn split_factors(g: &Realization, sizes: &ClassSizes) -> Vec<FactorGraph> {
    let k = g.num_classes();
    let mut factors = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        let r = sizes.range(i);
        let edges = g
            .edges()
            .into_iter()
            .filter(|&(u, v)| r.contains(&u) && r.contains(&v))
            .map(|(u, v)| (u - r.start, v - r.start))
            .collect();
        factors.push(FactorGraph {
            kind: FactorKind::Internal { class: i },
            edges,
        });
    }
    for i in 0..k {
        for j in i + 1..k {
            let (ri, rj) = (sizes.range(i), sizes.range(j));
            let mut edges: Vec<_> = g
                .edges()
                .into_iter()
                .filter_map(|(u, v)| {
                    if ri.contains(&u) && rj.contains(&v) {
                        Some((u - ri.start, v - rj.start))
                    } else if ri.contains(&v) && rj.contains(&u) {
                        Some((v - ri.start, u - rj.start))
                    } else {
                        None
                    }
                })
                .collect();
            edges.sort_unstable();
            factors.push(FactorGraph {
                kind: FactorKind::Bipartite { rows: i, cols: j },
                edges,
            });
        }
    }
    factors
}

/// A balanced realization of a graphical JDM.
pub fn construct_balanced(jdm: &JointDegreeMatrix) -> Result<Realization> {
    let factors = balanced_factors(jdm)?;
    labeled_union(jdm, &factors)
}
