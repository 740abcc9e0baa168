//! Exact transition matrices and their spectral and conductance analysis.
//!
//! Transition probabilities are kept as integer numerators over one common
//! denominator, so stochasticity, symmetry, flows and conductance are decided
//! exactly. Only eigenvalues are floating point.

use std::cmp::Ordering;

use num_rational::Ratio;
use serde::Serialize;

use crate::chain::{ordered_quadruples, RsoChain};
use crate::decompose::Partition;
use crate::enumerate::StateSpace;
use crate::error::{Error, Result};

pub const DEFAULT_EXACT_CAP: usize = 24;
pub const DEFAULT_TV_CAP: usize = 4096;
/// Target off-diagonal Frobenius norm for the Jacobi sweep.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
/// Slack allowed on the eigenvalue side of every inequality check.
pub const CHECK_SLACK: f64 = 1e-9;

/// Row-stochastic matrix `num[i][j] / denom`. Equality compares values, not
/// representations.
#[derive(Debug, Clone)]
pub struct ExactMatrix {
    n: usize,
    denom: u64,
    num: Vec<u64>,
}

impl PartialEq for ExactMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.num.iter().zip(&other.num).all(|(&a, &b)| {
                u128::from(a) * u128::from(other.denom) == u128::from(b) * u128::from(self.denom)
            })
    }
}

impl Eq for ExactMatrix {}

impl ExactMatrix {
    pub fn new(n: usize, denom: u64, num: Vec<u64>) -> Self {
        assert_eq!(num.len(), n * n);
        assert!(denom > 0);
        Self { n, denom, num }
    }

    pub fn identity(n: usize) -> Self {
        let mut num = vec![0; n * n];
        for i in 0..n {
            num[i * n + i] = 1;
        }
        Self::new(n, 1, num)
    }

    /// Builds a matrix from off-diagonal numerators, completing each diagonal
    /// so rows sum to one. Fails if a row already exceeds the denominator.
    pub fn with_completed_diagonal(n: usize, denom: u64, mut num: Vec<u64>) -> Result<Self> {
        for i in 0..n {
            num[i * n + i] = 0;
            let off: u64 = num[i * n..(i + 1) * n].iter().sum();
            num[i * n + i] = denom.checked_sub(off).ok_or_else(|| {
                Error::TooLarge(format!("row {i} has off-diagonal mass above one"))
            })?;
        }
        Ok(Self::new(n, denom, num))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    #[inline]
    pub fn numer(&self, i: usize, j: usize) -> u64 {
        self.num[i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> Ratio<u64> {
        Ratio::new(self.numer(i, j), self.denom)
    }

    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .find(|&(i, j)| self.numer(i, j) != self.numer(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    pub fn is_row_stochastic(&self) -> bool {
        (0..self.n).all(|i| self.num[i * self.n..(i + 1) * self.n].iter().sum::<u64>() == self.denom)
    }

    /// `uniform * T == uniform`, exactly: every column sums to the denominator.
    pub fn fixes_uniform(&self) -> bool {
        (0..self.n).all(|j| (0..self.n).map(|i| self.numer(i, j)).sum::<u64>() == self.denom)
    }

    /// Largest `|(uniform * T)_j - 1/n|` as an exact rational.
    pub fn uniform_residual(&self) -> Ratio<u64> {
        let n = self.n as u64;
        (0..self.n)
            .map(|j| {
                let col: u64 = (0..self.n).map(|i| self.numer(i, j)).sum();
                Ratio::new(col.abs_diff(self.denom), n * self.denom)
            })
            .max()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let d = self.denom as f64;
        DenseMatrix {
            n: self.n,
            data: self.num.iter().map(|&x| x as f64 / d).collect(),
        }
    }

    /// Symmetric weights `(i, j, numer)` with `i != j` and a non-zero entry.
    fn neighbor_lists(&self) -> Vec<Vec<(usize, u64)>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| j != i && self.numer(i, j) > 0)
                    .map(|j| (j, self.numer(i, j)))
                    .collect()
            })
            .collect()
    }
}

/// Dense square matrix of floats.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// in descending order.
pub fn eigen_symmetric(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = m.len();
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (m.get(i, j), m.get(j, i));
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let mut a = m.clone();
    let off_norm = |a: &DenseMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j) * a.get(i, j);
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off_norm(&a) < JACOBI_TOLERANCE {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

/// The exact kernel of the chain over an enumerated state space.
pub fn transition_matrix(chain: &RsoChain, space: &StateSpace) -> Result<ExactMatrix> {
    let n = space.len();
    let quads = ordered_quadruples(chain.num_vertices());
    if quads == 0 {
        return Ok(ExactMatrix::identity(n));
    }
    let denom = 2 * quads;
    let mut num = vec![0u64; n * n];
    for (a, s) in space.states().iter().enumerate() {
        for m in chain.accepted_moves(s) {
            let next = chain.rso_apply(s, m).expect("accepted move");
            let b = space.index_of(next.realization()).ok_or(Error::NotClosed)?;
            num[a * n + b] += 1;
        }
    }
    let matrix = ExactMatrix::with_completed_diagonal(n, denom, num)?;
    if let Some((row, col)) = matrix.first_asymmetry() {
        return Err(Error::NotSymmetric { row, col });
    }
    Ok(matrix)
}

/// `sum_{a in S, b not in S} num[a][b]` for a subset given as indices.
fn cut_numer(m: &ExactMatrix, inside: &[bool]) -> u64 {
    let mut cut = 0;
    for a in 0..m.len() {
        if !inside[a] {
            continue;
        }
        for b in 0..m.len() {
            if !inside[b] {
                cut += m.numer(a, b);
            }
        }
    }
    cut
}

/// Conditional flow out of a subset under the uniform distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowReport {
    pub subset: Vec<usize>,
    pub pi_subset: Ratio<u64>,
    pub flow: Ratio<u64>,
    pub complement_flow: Ratio<u64>,
}

pub fn conditional_flow(m: &ExactMatrix, subset: &[usize]) -> Result<FlowReport> {
    let n = m.len();
    let mut inside = vec![false; n];
    for &s in subset {
        if s >= n {
            return Err(Error::EmptyOrFull);
        }
        inside[s] = true;
    }
    let size = inside.iter().filter(|&&x| x).count();
    if size == 0 || size == n {
        return Err(Error::EmptyOrFull);
    }
    let cut = cut_numer(m, &inside);
    let outside: Vec<bool> = inside.iter().map(|&x| !x).collect();
    let back = cut_numer(m, &outside);
    let mut sorted: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
    sorted.dedup();
    Ok(FlowReport {
        subset: sorted,
        pi_subset: Ratio::new(size as u64, n as u64),
        flow: Ratio::new(cut, m.denom() * size as u64),
        complement_flow: Ratio::new(back, m.denom() * (n - size) as u64),
    })
}

/// Minimum conditional flow and the lexicographically least subset achieving it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conductance {
    pub phi: Ratio<u64>,
    pub witness: Vec<usize>,
}

impl Conductance {
    pub fn phi_f64(&self) -> f64 {
        *self.phi.numer() as f64 / *self.phi.denom() as f64
    }
}

/// Walks every subset in Gray-code order, keeping the cut numerator current.
/// `visit(mask, size, cut)` is called for each non-empty proper subset.
fn gray_sweep(m: &ExactMatrix, mut visit: impl FnMut(u64, usize, u64)) {
    let n = m.len();
    debug_assert!(n < 64);
    let nbrs = m.neighbor_lists();
    let out: Vec<u64> = nbrs.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
    let mut mask = 0u64;
    let mut size = 0usize;
    let mut cut: i128 = 0;
    for i in 1u64..(1u64 << n) {
        let s = i.trailing_zeros() as usize;
        let inner: u64 = nbrs[s]
            .iter()
            .filter(|&&(b, _)| mask & (1 << b) != 0)
            .map(|&(_, w)| w)
            .sum();
        if mask & (1 << s) == 0 {
            cut += i128::from(out[s]) - 2 * i128::from(inner);
            size += 1;
        } else {
            cut -= i128::from(out[s]) - 2 * i128::from(inner);
            size -= 1;
        }
        mask ^= 1 << s;
        if size < n {
            visit(mask, size, cut as u64);
        }
    }
}

/// Lexicographic order on the ascending index lists of two masks.
fn lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let low = (a ^ b).trailing_zeros();
    let above = !((2u64 << low) - 1);
    if a & (1 << low) != 0 {
        // a continues with `low`; b continues with something larger, or ends
        if b & above == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if a & above == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn mask_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Exact conductance over all subsets of stationary mass at most one half.
/// Returns `None` for spaces with fewer than two states.
pub fn conductance_exact(m: &ExactMatrix, cap: usize) -> Result<Option<Conductance>> {
    let n = m.len();
    if n > cap.min(63) {
        return Err(Error::TooLarge(format!(
            "exact conductance is limited to {} states, space has {n}",
            cap.min(63)
        )));
    }
    if n < 2 {
        return Ok(None);
    }
    let mut best: Option<(u64, usize, u64)> = None;
    gray_sweep(m, |mask, size, cut| {
        if 2 * size > n {
            return;
        }
        let better = match best {
            None => true,
            Some((bcut, bsize, bmask)) => {
                let lhs = u128::from(cut) * bsize as u128;
                let rhs = u128::from(bcut) * size as u128;
                lhs < rhs || (lhs == rhs && lex_cmp(mask, bmask) == Ordering::Less)
            }
        };
        if better {
            best = Some((cut, size, mask));
        }
    });
    let (cut, size, mask) = best.expect("n >= 2 has a singleton subset");
    Ok(Some(Conductance {
        phi: Ratio::new(cut, m.denom() * size as u64),
        witness: mask_indices(mask),
    }))
}

/// Sampled upper estimate of the conductance for spaces above the exact cap:
/// the minimum over singletons and random subsets. Heuristic only.
pub fn conductance_sampled<R: rand::Rng>(
    m: &ExactMatrix,
    samples: usize,
    rng: &mut R,
) -> Option<Conductance> {
    let n = m.len();
    if n < 2 {
        return None;
    }
    let mut best: Option<Conductance> = None;
    let mut consider = |subset: Vec<usize>| {
        if let Ok(f) = conditional_flow(m, &subset) {
            if best.as_ref().is_none_or(|b| f.flow < b.phi) {
                best = Some(Conductance {
                    phi: f.flow,
                    witness: f.subset,
                });
            }
        }
    };
    for i in 0..n {
        consider(vec![i]);
    }
    for _ in 0..samples {
        let size = rng.random_range(1..=n / 2);
        let subset = rand::seq::index::sample(rng, n, size).into_vec();
        consider(subset);
    }
    best
}

/// Spectrum and conductance of an enumerated chain.
#[derive(Debug, Clone)]
pub struct ChainAnalysis {
    pub matrix: ExactMatrix,
    pub eigenvalues: Vec<f64>,
    pub conductance: Option<Conductance>,
    /// Set when the space exceeded the exact cap and conductance was skipped.
    pub conductance_skipped: bool,
}

impl ChainAnalysis {
    pub fn new(matrix: ExactMatrix, exact_cap: usize) -> Result<Self> {
        if !matrix.is_row_stochastic() {
            return Err(Error::InvalidMatrix("rows do not sum to one".into()));
        }
        let eigenvalues = eigen_symmetric(&matrix.to_dense())?;
        let (conductance, conductance_skipped) = match conductance_exact(&matrix, exact_cap) {
            Ok(c) => (c, false),
            Err(Error::TooLarge(_)) => (None, true),
            Err(e) => return Err(e),
        };
        Ok(Self {
            matrix,
            eigenvalues,
            conductance,
            conductance_skipped,
        })
    }

    pub fn state_count(&self) -> usize {
        self.matrix.len()
    }

    pub fn lambda2(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }

    pub fn relaxation(&self) -> f64 {
        relaxation_time(self.lambda2())
    }

    /// Largest eigenvalue is one and the spectrum lies in `[-1, 1]`.
    pub fn spectrum_is_sane(&self) -> bool {
        let tol = 1e-10;
        self.eigenvalues
            .first()
            .is_none_or(|&top| (top - 1.0).abs() <= tol)
            && self.eigenvalues.iter().all(|&l| (-1.0 - tol..=1.0 + tol).contains(&l))
    }
}

/// `1 / (1 - lambda2)`; a one-state chain has relaxation time one.
pub fn relaxation_time(lambda2: Option<f64>) -> f64 {
    match lambda2 {
        None => 1.0,
        Some(l) if l >= 1.0 => f64::INFINITY,
        Some(l) => 1.0 / (1.0 - l),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerReport {
    /// `false` when there was nothing to check or exact conductance was
    /// skipped; `holds` is then vacuously true.
    pub applicable: bool,
    pub phi: Option<f64>,
    pub lambda2: Option<f64>,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub holds: bool,
    pub note: Option<String>,
}

/// `1 - 2 phi <= lambda2 <= 1 - phi^2 / 2`.
pub fn check_cheeger(analysis: &ChainAnalysis) -> CheegerReport {
    let (Some(l2), Some(c)) = (analysis.lambda2(), analysis.conductance.as_ref()) else {
        let note = if analysis.conductance_skipped {
            "exact conductance skipped: space above the exact cap"
        } else {
            "single-state space: lambda2 undefined, no admissible subset"
        };
        return CheegerReport {
            applicable: false,
            phi: None,
            lambda2: analysis.lambda2(),
            lower_ok: true,
            upper_ok: true,
            holds: true,
            note: Some(note.into()),
        };
    };
    let phi = c.phi_f64();
    let lower_ok = 1.0 - 2.0 * phi <= l2 + CHECK_SLACK;
    let upper_ok = l2 <= 1.0 - phi * phi / 2.0 + CHECK_SLACK;
    CheegerReport {
        applicable: true,
        phi: Some(phi),
        lambda2: Some(l2),
        lower_ok,
        upper_ok,
        holds: lower_ok && upper_ok,
        note: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedCheegerReport {
    pub subsets_checked: u64,
    pub violations: u64,
    /// Smallest `flow - bound` over all subsets; negative beyond the slack means failure.
    pub min_surplus: Option<f64>,
    pub first_violation: Option<Vec<usize>>,
    pub holds: bool,
}

/// `((1 - lambda2) / 2) * min(pi(S), pi(S^c)) <= flow(S)` for every proper subset.
pub fn check_modified_cheeger(
    m: &ExactMatrix,
    lambda2: Option<f64>,
    cap: usize,
) -> Result<ModifiedCheegerReport> {
    let n = m.len();
    if n > cap.min(63) {
        return Err(Error::TooLarge(format!(
            "subset sweep is limited to {} states, space has {n}",
            cap.min(63)
        )));
    }
    let Some(l2) = lambda2 else {
        return Ok(ModifiedCheegerReport {
            subsets_checked: 0,
            violations: 0,
            min_surplus: None,
            first_violation: None,
            holds: true,
        });
    };
    let scale = m.denom() as f64 * n as f64;
    let mut report = ModifiedCheegerReport {
        subsets_checked: 0,
        violations: 0,
        min_surplus: None,
        first_violation: None,
        holds: true,
    };
    gray_sweep(m, |mask, size, cut| {
        let bound = (1.0 - l2) / 2.0 * size.min(n - size) as f64 / n as f64;
        let surplus = cut as f64 / scale - bound;
        report.subsets_checked += 1;
        report.min_surplus = Some(report.min_surplus.map_or(surplus, |s: f64| s.min(surplus)));
        if surplus < -CHECK_SLACK {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(mask_indices(mask));
            }
        }
    });
    report.holds = report.violations == 0;
    Ok(report)
}

/// `256 / (1 - 1/sqrt(2))^4`.
pub fn decomposition_constant() -> f64 {
    256.0 / (1.0 - std::f64::consts::FRAC_1_SQRT_2).powi(4)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionBound {
    pub r1: f64,
    pub r2: f64,
    pub value: f64,
    /// Inputs below the assumed minimum were raised to it.
    pub clamped: bool,
}

/// Certified upper bound `256 r1^2 r2^2 / (1 - 1/sqrt 2)^4` on the relaxation
/// time of a chain whose cells relax within `r1` and whose projection relaxes
/// within `r2`.
pub fn decomposition_bound(r1: f64, r2: f64) -> DecompositionBound {
    const EPS: f64 = 1e-9;
    let (c1, c2) = (r1.max(1.0), r2.max(1.0 + EPS));
    let clamped = c1 != r1 || c2 != r2;
    DecompositionBound {
        r1: c1,
        r2: c2,
        value: decomposition_constant() * c1 * c1 * c2 * c2,
        clamped,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceViolation {
    pub state: usize,
    pub from_cell: usize,
    pub to_cell: usize,
    pub flow: Ratio<u64>,
    pub required: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceReport {
    pub triples_checked: u64,
    pub violations: Vec<DominanceViolation>,
    pub holds: bool,
}

/// For every state `y1` in cell `x1` and every other cell `x2`: the total
/// probability of stepping from `y1` into `x2` is at least `projection[x1][x2]`.
pub fn check_projection_dominance(
    full: &ExactMatrix,
    partition: &Partition,
    projection: &ExactMatrix,
) -> DominanceReport {
    let cells = partition.num_cells();
    let mut report = DominanceReport {
        triples_checked: 0,
        violations: Vec::new(),
        holds: true,
    };
    for y1 in 0..full.len() {
        let x1 = partition.cell_of(y1);
        let mut into = vec![0u64; cells];
        for y2 in 0..full.len() {
            into[partition.cell_of(y2)] += full.numer(y1, y2);
        }
        for (x2, &flow) in into.iter().enumerate() {
            if x2 == x1 {
                continue;
            }
            report.triples_checked += 1;
            let lhs = u128::from(flow) * u128::from(projection.denom());
            let rhs = u128::from(projection.numer(x1, x2)) * u128::from(full.denom());
            if lhs < rhs {
                report.violations.push(DominanceViolation {
                    state: y1,
                    from_cell: x1,
                    to_cell: x2,
                    flow: Ratio::new(flow, full.denom()),
                    required: projection.get(x1, x2),
                });
            }
        }
    }
    report.holds = report.violations.is_empty();
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvCurve {
    pub start: usize,
    /// `(t, TV(t))` for `t = 0..=t_max`.
    pub points: Vec<(usize, f64)>,
    pub monotone: bool,
    /// `false` when produced by the empirical multi-walker estimate.
    pub exact: bool,
}

/// Total-variation distance to uniform after `t` steps from `start`, by
/// repeated vector-matrix products.
pub fn tv_decay(m: &ExactMatrix, start: usize, t_max: usize, cap: usize) -> Result<TvCurve> {
    let n = m.len();
    if n > cap {
        return Err(Error::TooLarge(format!(
            "matrix-power mode is limited to {cap} states, space has {n}"
        )));
    }
    if start >= n {
        return Err(Error::InvalidMatrix(format!("start state {start} out of range")));
    }
    let dense = m.to_dense();
    let uniform = 1.0 / n as f64;
    let tv = |p: &[f64]| 0.5 * p.iter().map(|&x| (x - uniform).abs()).sum::<f64>();
    let mut p = vec![0.0; n];
    p[start] = 1.0;
    let mut points = vec![(0, tv(&p))];
    let mut next = vec![0.0; n];
    for t in 1..=t_max {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, x) in next.iter_mut().enumerate() {
                *x += pi * dense.get(i, j);
            }
        }
        std::mem::swap(&mut p, &mut next);
        points.push((t, tv(&p)));
    }
    let monotone = points.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-15);
    Ok(TvCurve {
        start,
        points,
        monotone,
        exact: true,
    })
}

/// Multi-walker estimate of the same curve for spaces too large for the
/// matrix. Each walker starts at `start` and is recorded at every `t`.
pub fn tv_decay_empirical<R: rand::Rng>(
    chain: &RsoChain,
    space: &StateSpace,
    start: usize,
    t_max: usize,
    walkers: usize,
    rng: &mut R,
) -> Result<TvCurve> {
    let n = space.len();
    let mut states: Vec<_> = (0..walkers).map(|_| space.get(start).clone()).collect();
    let uniform = 1.0 / n as f64;
    let mut points = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            for s in &mut states {
                chain.step(s, rng);
            }
        }
        let mut counts = vec![0usize; n];
        for s in &states {
            let i = space.index_of(s.realization()).ok_or(Error::NotClosed)?;
            counts[i] += 1;
        }
        let tv = 0.5
            * counts
                .iter()
                .map(|&c| (c as f64 / walkers as f64 - uniform).abs())
                .sum::<f64>();
        points.push((t, tv));
    }
    Ok(TvCurve {
        start,
        points,
        monotone: false,
        exact: false,
    })
}
