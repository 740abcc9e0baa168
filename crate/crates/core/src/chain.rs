//! The lazy restricted-swap chain on balanced realizations.
//!
//! A move picks an ordered 4-tuple `(v1, v2, v3, v4)` of distinct vertices
//! with `v1`, `v2` in the same class, and replaces edges `v1v3`, `v2v4` by
//! `v1v4`, `v2v3`. The move is accepted only if the result is balanced.
//!
//! When `v3`, `v4` also share a class the same swap could be proposed with
//! the two pairs in exchanged roles. Only the pair holding the smallest of
//! the four vertices may play `(v1, v2)`, so every swap is reached by exactly
//! two ordered tuples and each transition has probability `1 / n(n-1)(n-2)(n-3)`.

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::construct::construct_balanced;
use crate::error::{Error, Result};
use crate::jdm::{ClassSizes, DegreeSpectrum, JointDegreeMatrix, Realization, ThetaMode, ThetaTable};

/// The problem instance a walker moves in.
#[derive(Debug, Clone)]
pub struct RsoChain {
    jdm: JointDegreeMatrix,
    sizes: ClassSizes,
    theta: ThetaTable,
}

/// A balanced realization with its spectrum kept in sync across moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainState {
    realization: Realization,
    spectrum: DegreeSpectrum,
}

impl ChainState {
    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn spectrum(&self) -> &DegreeSpectrum {
        &self.spectrum
    }

    pub fn into_realization(self) -> Realization {
        self.realization
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RsoMove {
    pub v1: usize,
    pub v2: usize,
    pub v3: usize,
    pub v4: usize,
}

impl RsoMove {
    pub fn new(v1: usize, v2: usize, v3: usize, v4: usize) -> Self {
        Self { v1, v2, v3, v4 }
    }

    fn distinct(&self) -> bool {
        let v = [self.v1, self.v2, self.v3, self.v4];
        (0..4).all(|a| (a + 1..4).all(|b| v[a] != v[b]))
    }
}

/// Why a proposed move was not applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    NotDistinct,
    ClassMismatch,
    NotFeasible,
    /// The same swap is also available with the roles of the two pairs
    /// exchanged; only the pair holding the smallest vertex may act.
    NonCanonicalRoles,
    NotBalanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Lazy,
    Moved,
    Rejected(Rejection),
}

/// Tallies of step outcomes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounters {
    pub lazy: u64,
    pub accepted: u64,
    pub not_distinct: u64,
    pub class_mismatch: u64,
    pub not_feasible: u64,
    pub non_canonical_roles: u64,
    pub not_balanced: u64,
}

impl StepCounters {
    pub fn record(&mut self, outcome: StepOutcome) {
        match outcome {
            StepOutcome::Lazy => self.lazy += 1,
            StepOutcome::Moved => self.accepted += 1,
            StepOutcome::Rejected(Rejection::NotDistinct) => self.not_distinct += 1,
            StepOutcome::Rejected(Rejection::ClassMismatch) => self.class_mismatch += 1,
            StepOutcome::Rejected(Rejection::NotFeasible) => self.not_feasible += 1,
            StepOutcome::Rejected(Rejection::NonCanonicalRoles) => self.non_canonical_roles += 1,
            StepOutcome::Rejected(Rejection::NotBalanced) => self.not_balanced += 1,
        }
    }

    pub fn steps(&self) -> u64 {
        self.lazy
            + self.accepted
            + self.not_distinct
            + self.class_mismatch
            + self.not_feasible
            + self.non_canonical_roles
            + self.not_balanced
    }

    pub fn acceptance_rate(&self) -> f64 {
        match self.steps() {
            0 => 0.0,
            s => self.accepted as f64 / s as f64,
        }
    }
}

/// `n (n-1) (n-2) (n-3)`: the number of ordered 4-tuples of distinct vertices.
pub fn ordered_quadruples(n: usize) -> u64 {
    if n < 4 {
        return 0;
    }
    let n = n as u64;
    n * (n - 1) * (n - 2) * (n - 3)
}

impl RsoChain {
    pub fn new(jdm: JointDegreeMatrix) -> Result<Self> {
        let sizes = jdm.require_graphical()?;
        let theta = jdm.theta(ThetaMode::Consistent)?;
        Ok(Self { jdm, sizes, theta })
    }

    pub fn jdm(&self) -> &JointDegreeMatrix {
        &self.jdm
    }

    pub fn sizes(&self) -> &ClassSizes {
        &self.sizes
    }

    pub fn theta(&self) -> &ThetaTable {
        &self.theta
    }

    pub fn num_vertices(&self) -> usize {
        self.sizes.total()
    }

    /// The deterministic constructed realization.
    pub fn initial_state(&self) -> Result<ChainState> {
        self.state_from(construct_balanced(&self.jdm)?)
    }

    /// Validates a user-supplied realization as a state of this chain.
    pub fn state_from(&self, realization: Realization) -> Result<ChainState> {
        if realization.classes() != self.sizes.class_of_vertices().as_slice() {
            return Err(Error::JdmMismatch);
        }
        if !realization.is_balanced(&self.jdm)? {
            return Err(Error::NotBalanced);
        }
        let spectrum = realization.degree_spectrum()?;
        Ok(ChainState {
            realization,
            spectrum,
        })
    }

    fn check(&self, s: &ChainState, m: RsoMove) -> std::result::Result<(), Rejection> {
        let n = self.num_vertices();
        if !m.distinct() || [m.v1, m.v2, m.v3, m.v4].iter().any(|&v| v >= n) {
            return Err(Rejection::NotDistinct);
        }
        let g = &s.realization;
        let c1 = g.class_of(m.v1);
        if c1 != g.class_of(m.v2) {
            return Err(Rejection::ClassMismatch);
        }
        if !g.has_edge(m.v1, m.v3)
            || !g.has_edge(m.v2, m.v4)
            || g.has_edge(m.v1, m.v4)
            || g.has_edge(m.v2, m.v3)
        {
            return Err(Rejection::NotFeasible);
        }
        let (c3, c4) = (g.class_of(m.v3), g.class_of(m.v4));
        if c3 == c4 && m.v3.min(m.v4) < m.v1.min(m.v2) {
            return Err(Rejection::NonCanonicalRoles);
        }
        if c3 != c4 {
            // only v1 and v2 change their spectra: v1 trades c3 for c4, v2 the reverse
            let sp = &s.spectrum;
            let ok = self.theta.admits(c1, c3, sp.get(m.v1, c3) - 1)
                && self.theta.admits(c1, c4, sp.get(m.v1, c4) + 1)
                && self.theta.admits(c1, c4, sp.get(m.v2, c4) - 1)
                && self.theta.admits(c1, c3, sp.get(m.v2, c3) + 1);
            if !ok {
                return Err(Rejection::NotBalanced);
            }
        }
        Ok(())
    }

    /// Applies `m` in place if it is an accepted move.
    pub fn apply(&self, s: &mut ChainState, m: RsoMove) -> std::result::Result<(), Rejection> {
        self.check(s, m)?;
        let g = &mut s.realization;
        g.set_edge(m.v1, m.v3, false);
        g.set_edge(m.v2, m.v4, false);
        g.set_edge(m.v1, m.v4, true);
        g.set_edge(m.v2, m.v3, true);
        let (c3, c4) = (g.class_of(m.v3), g.class_of(m.v4));
        if c3 != c4 {
            s.spectrum.shift(m.v1, c3, c4);
            s.spectrum.shift(m.v2, c4, c3);
        }
        Ok(())
    }

    /// The state reached by `m`, or the reason it is rejected.
    pub fn rso_apply(
        &self,
        s: &ChainState,
        m: RsoMove,
    ) -> std::result::Result<ChainState, Rejection> {
        self.check(s, m)?;
        let mut next = s.clone();
        self.apply(&mut next, m)?;
        Ok(next)
    }

    /// Uniform ordered 4-tuple of distinct vertices.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<RsoMove> {
        let n = self.num_vertices();
        if n < 4 {
            return None;
        }
        let mut picked = [0usize; 4];
        for slot in 0..4 {
            let mut v = rng.random_range(0..n - slot);
            let mut taken: Vec<usize> = picked[..slot].to_vec();
            taken.sort_unstable();
            for t in taken {
                if v >= t {
                    v += 1;
                }
            }
            picked[slot] = v;
        }
        Some(RsoMove::new(picked[0], picked[1], picked[2], picked[3]))
    }

    /// One lazy step.
    pub fn step<R: Rng + ?Sized>(&self, s: &mut ChainState, rng: &mut R) -> StepOutcome {
        if rng.random::<bool>() {
            return StepOutcome::Lazy;
        }
        let Some(m) = self.propose(rng) else {
            return StepOutcome::Rejected(Rejection::NotDistinct);
        };
        match self.apply(s, m) {
            Ok(()) => StepOutcome::Moved,
            Err(r) => StepOutcome::Rejected(r),
        }
    }

    /// Every accepted ordered 4-tuple from `s`.
    pub fn accepted_moves(&self, s: &ChainState) -> Vec<RsoMove> {
        let g = &s.realization;
        let mut out = Vec::new();
        for class in 0..g.num_classes() {
            let range = self.sizes.range(class);
            for v1 in range.clone() {
                for v2 in range.clone() {
                    if v1 == v2 {
                        continue;
                    }
                    for v3 in g.neighbors(v1) {
                        for v4 in g.neighbors(v2) {
                            let m = RsoMove::new(v1, v2, v3, v4);
                            if self.check(s, m).is_ok() {
                                out.push(m);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Exact one-step probability of moving from `a` to `b`.
    pub fn transition_prob(&self, a: &ChainState, b: &ChainState) -> Ratio<u64> {
        let quads = ordered_quadruples(self.num_vertices());
        if quads == 0 {
            return Ratio::from_integer(u64::from(a == b));
        }
        let denom = 2 * quads;
        if a == b {
            let out = self.accepted_moves(a).len() as u64;
            return Ratio::new(denom - out, denom);
        }
        Ratio::new(self.tuples_between(a, b), denom)
    }

    /// Ordered 4-tuples carrying `a` to `b` (for `a != b`).
    fn tuples_between(&self, a: &ChainState, b: &ChainState) -> u64 {
        let (ga, gb) = (&a.realization, &b.realization);
        let removed: Vec<_> = ga.edges().into_iter().filter(|&(u, v)| !gb.has_edge(u, v)).collect();
        let added: Vec<_> = gb.edges().into_iter().filter(|&(u, v)| !ga.has_edge(u, v)).collect();
        if removed.len() != 2 || added.len() != 2 {
            return 0;
        }
        let mut verts: Vec<usize> = removed.iter().flat_map(|&(u, v)| [u, v]).collect();
        verts.sort_unstable();
        verts.dedup();
        if verts.len() != 4 {
            return 0;
        }
        let mut count = 0;
        for p in permutations4(&verts) {
            let m = RsoMove::new(p[0], p[1], p[2], p[3]);
            if let Ok(next) = self.rso_apply(a, m) {
                if &next == b {
                    count += 1;
                }
            }
        }
        count
    }
}

fn permutations4(v: &[usize]) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out.push([v[a], v[b], v[c], v[d]]);
                    }
                }
            }
        }
    }
    out
}

/// Burn-in, then one realization every `thin` steps for `steps` steps.
pub struct Sampler<'a, R> {
    chain: &'a RsoChain,
    state: ChainState,
    rng: R,
    remaining: u64,
    thin: u64,
    counters: StepCounters,
}

impl<'a, R: Rng> Sampler<'a, R> {
    pub fn new(
        chain: &'a RsoChain,
        mut state: ChainState,
        mut rng: R,
        burnin: u64,
        steps: u64,
        thin: u64,
    ) -> Self {
        let mut counters = StepCounters::default();
        for _ in 0..burnin {
            counters.record(chain.step(&mut state, &mut rng));
        }
        Self {
            chain,
            state,
            rng,
            remaining: steps,
            thin: thin.max(1),
            counters,
        }
    }

    pub fn counters(&self) -> &StepCounters {
        &self.counters
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }
}

impl<R: Rng> Iterator for Sampler<'_, R> {
    type Item = Realization;

    fn next(&mut self) -> Option<Realization> {
        if self.remaining < self.thin {
            return None;
        }
        for _ in 0..self.thin {
            let outcome = self.chain.step(&mut self.state, &mut self.rng);
            self.counters.record(outcome);
        }
        self.remaining -= self.thin;
        Some(self.state.realization.clone())
    }
}
