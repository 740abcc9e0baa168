//! State-space enumeration: BFS over accepted swaps, and a brute-force
//! backtracking oracle over all labelled realizations for tiny instances.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chain::{ChainState, RsoChain};
use crate::error::{Error, Result};
use crate::jdm::{JointDegreeMatrix, Realization};

pub const DEFAULT_BFS_CAP: usize = 200_000;
pub const BRUTE_FORCE_MAX_VERTICES: usize = 10;

/// Sorted edge list; equal keys iff equal edge sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<(u32, u32)>);

impl CanonicalKey {
    pub fn of(g: &Realization) -> Self {
        Self(
            g.edges()
                .into_iter()
                .map(|(u, v)| (u as u32, v as u32))
                .collect(),
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .iter()
            .flat_map(|&(u, v)| u.to_le_bytes().into_iter().chain(v.to_le_bytes()))
            .collect()
    }
}

/// Balanced states in canonical order, with key lookup.
#[derive(Debug, Clone)]
pub struct StateSpace {
    states: Vec<ChainState>,
    index: HashMap<CanonicalKey, usize>,
}

impl StateSpace {
    fn from_states(mut states: Vec<ChainState>) -> Self {
        states.sort_by_cached_key(|s| CanonicalKey::of(s.realization()));
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (CanonicalKey::of(s.realization()), i))
            .collect();
        Self { states, index }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ChainState] {
        &self.states
    }

    pub fn get(&self, i: usize) -> &ChainState {
        &self.states[i]
    }

    pub fn index_of(&self, g: &Realization) -> Option<usize> {
        self.index.get(&CanonicalKey::of(g)).copied()
    }

    pub fn keys(&self) -> Vec<CanonicalKey> {
        self.states
            .iter()
            .map(|s| CanonicalKey::of(s.realization()))
            .collect()
    }
}

/// Every balanced state reachable from the constructed one.
pub fn enumerate_balanced(chain: &RsoChain, cap: usize) -> Result<StateSpace> {
    let start = chain.initial_state()?;
    let mut seen: HashMap<CanonicalKey, ()> = HashMap::new();
    seen.insert(CanonicalKey::of(start.realization()), ());
    let mut found = vec![start.clone()];
    let mut frontier = VecDeque::from([start]);
    while let Some(s) = frontier.pop_front() {
        for m in chain.accepted_moves(&s) {
            let next = chain.rso_apply(&s, m).expect("accepted move");
            let key = CanonicalKey::of(next.realization());
            if seen.insert(key, ()).is_none() {
                if found.len() == cap {
                    return Err(Error::CapExceeded { cap });
                }
                found.push(next.clone());
                frontier.push_back(next);
            }
        }
    }
    Ok(StateSpace::from_states(found))
}

/// All labelled realizations of `jdm` on the contiguous class layout,
/// optionally only the balanced ones, in canonical order.
pub fn brute_force_realizations(
    jdm: &JointDegreeMatrix,
    balanced_only: bool,
    max_vertices: usize,
) -> Result<Vec<Realization>> {
    let sizes = jdm
        .class_sizes()
        .map_err(|_| Error::NotGraphical(jdm.is_graphical().violations))?;
    let n = sizes.total();
    if n > max_vertices {
        return Err(Error::TooLarge(format!(
            "brute force is limited to {max_vertices} vertices, instance has {n}"
        )));
    }
    let class_of = sizes.class_of_vertices();
    let k = jdm.num_classes();
    let mut search = Search {
        n,
        k,
        class_of: &class_of,
        residual: class_of.iter().map(|&c| jdm.degrees()[c]).collect(),
        remaining: (0..k * k).map(|x| jdm.entry(x / k, x % k)).collect(),
        edges: Vec::new(),
        out: Vec::new(),
    };
    search.vertex(0);
    let mut out = Vec::with_capacity(search.out.len());
    for edges in search.out {
        let g = Realization::new(jdm.degrees().to_vec(), class_of.clone(), edges)?;
        debug_assert_eq!(&g.jdm(), jdm);
        if !balanced_only || g.is_balanced(jdm)? {
            out.push(g);
        }
    }
    out.sort_by_cached_key(CanonicalKey::of);
    Ok(out)
}

struct Search<'a> {
    n: usize,
    k: usize,
    class_of: &'a [usize],
    residual: Vec<u32>,
    remaining: Vec<u64>,
    edges: Vec<(usize, usize)>,
    out: Vec<Vec<(usize, usize)>>,
}

impl Search<'_> {
    fn vertex(&mut self, u: usize) {
        if u == self.n {
            if self.remaining.iter().all(|&r| r == 0) {
                self.out.push(self.edges.clone());
            }
            return;
        }
        // later vertices can only be matched among themselves
        let later = (self.n - u - 1) as u32;
        if (u..self.n).any(|v| self.residual[v] > later) {
            return;
        }
        self.partners(u, u + 1);
    }

    fn partners(&mut self, u: usize, from: usize) {
        if self.residual[u] == 0 {
            self.vertex(u + 1);
            return;
        }
        let cu = self.class_of[u];
        for v in from..self.n {
            if (self.n - v) < self.residual[u] as usize {
                break;
            }
            let cv = self.class_of[v];
            let (a, b) = (cu * self.k + cv, cv * self.k + cu);
            if self.residual[v] == 0 || self.remaining[a] == 0 {
                continue;
            }
            self.residual[u] -= 1;
            self.residual[v] -= 1;
            self.remaining[a] -= 1;
            if a != b {
                self.remaining[b] -= 1;
            }
            self.edges.push((u, v));
            self.partners(u, v + 1);
            self.edges.pop();
            self.residual[u] += 1;
            self.residual[v] += 1;
            self.remaining[a] += 1;
            if a != b {
                self.remaining[b] += 1;
            }
        }
    }
}

/// Set comparison between BFS states and oracle states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub bfs_count: usize,
    pub oracle_count: usize,
    pub equal: bool,
    /// Oracle states the BFS never reached, in the realization text format.
    pub missing_from_bfs: Vec<String>,
    pub missing_from_oracle: Vec<String>,
}

pub fn check_connectivity(bfs: &[Realization], oracle: &[Realization]) -> ConnectivityReport {
    let bfs_keys: HashMap<_, _> = bfs.iter().map(|g| (CanonicalKey::of(g), g)).collect();
    let oracle_keys: HashMap<_, _> = oracle.iter().map(|g| (CanonicalKey::of(g), g)).collect();
    let mut missing_from_bfs: Vec<_> = oracle_keys
        .iter()
        .filter(|(k, _)| !bfs_keys.contains_key(*k))
        .map(|(_, g)| crate::io::write_realization(g))
        .collect();
    let mut missing_from_oracle: Vec<_> = bfs_keys
        .iter()
        .filter(|(k, _)| !oracle_keys.contains_key(*k))
        .map(|(_, g)| crate::io::write_realization(g))
        .collect();
    missing_from_bfs.sort();
    missing_from_oracle.sort();
    ConnectivityReport {
        bfs_count: bfs_keys.len(),
        oracle_count: oracle_keys.len(),
        equal: missing_from_bfs.is_empty() && missing_from_oracle.is_empty(),
        missing_from_bfs,
        missing_from_oracle,
    }
}
