//! End-to-end analysis of one instance: enumerate, partition, build the
//! kernels and run every check.

use num_rational::Ratio;
use serde::Serialize;

use crate::chain::RsoChain;
use crate::decompose::{
    average_flow_eigenvalues, partition_states, projection_chain, restricted_chain,
    verify_swap_theorem, Partition, PartitionSummary, SwapTheoremReport,
};
use crate::enumerate::{
    brute_force_realizations, check_connectivity, enumerate_balanced, ConnectivityReport,
    StateSpace, BRUTE_FORCE_MAX_VERTICES, DEFAULT_BFS_CAP,
};
use crate::error::{Error, Result};
use crate::jdm::JointDegreeMatrix;
use crate::spectra::{
    check_cheeger, check_projection_dominance, check_modified_cheeger, decomposition_bound,
    eigen_symmetric, relaxation_time, transition_matrix, ChainAnalysis, CheegerReport,
    DominanceReport, DecompositionBound, ExactMatrix, ModifiedCheegerReport, DEFAULT_EXACT_CAP,
};

/// Largest space the subset sweep of the modified Cheeger check runs on.
pub const DEFAULT_SUBSET_CAP: usize = 20;
/// Largest space for which dense kernels are built and eigensolved.
pub const DEFAULT_MATRIX_CAP: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Options {
    pub bfs_cap: usize,
    pub matrix_cap: usize,
    pub exact_cap: usize,
    pub subset_cap: usize,
    /// Brute-force connectivity check runs when `n` is at most this.
    pub brute_force_max: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            bfs_cap: DEFAULT_BFS_CAP,
            matrix_cap: DEFAULT_MATRIX_CAP,
            exact_cap: DEFAULT_EXACT_CAP,
            subset_cap: DEFAULT_SUBSET_CAP,
            brute_force_max: BRUTE_FORCE_MAX_VERTICES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StationarityReport {
    pub symmetric: bool,
    pub row_stochastic: bool,
    pub uniform_fixed: bool,
}

impl StationarityReport {
    pub fn of(m: &ExactMatrix) -> Self {
        Self {
            symmetric: m.is_symmetric(),
            row_stochastic: m.is_row_stochastic(),
            uniform_fixed: m.fixes_uniform(),
        }
    }

    pub fn holds(&self) -> bool {
        self.symmetric && self.row_stochastic && self.uniform_fixed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub vertex_count: usize,
    pub state_count: usize,
    pub lambda2: Option<f64>,
    pub relaxation: f64,
    pub spectrum_sane: bool,
    pub phi: Option<Ratio<u64>>,
    pub phi_value: Option<f64>,
    pub witness: Option<Vec<usize>>,
    pub stationarity: StationarityReport,
    pub cheeger: CheegerReport,
    /// `None` when the space is above the subset-sweep cap.
    pub modified_cheeger: Option<ModifiedCheegerReport>,
    pub partition: PartitionSummary,
    pub swap_theorem: SwapTheoremReport,
    pub projection_dominance: DominanceReport,
    /// Restricted and projection chains are symmetric and row-stochastic.
    pub components_ok: bool,
    pub r1: f64,
    pub r2: f64,
    pub bound: DecompositionBound,
    pub bound_ok: bool,
    pub average_flow_lambda2: Option<f64>,
    /// `None` when the instance is above the brute-force vertex cap.
    pub connectivity: Option<ConnectivityReport>,
}

impl Report {
    /// Every check that ran passed.
    pub fn all_hold(&self) -> bool {
        self.spectrum_sane
            && self.stationarity.holds()
            && self.cheeger.holds
            && self.modified_cheeger.as_ref().is_none_or(|r| r.holds)
            && self.swap_theorem.holds
            && self.projection_dominance.holds
            && self.components_ok
            && self.bound_ok
            && self.connectivity.as_ref().is_none_or(|c| c.equal)
    }
}

/// Everything built for one instance.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub chain: RsoChain,
    pub space: StateSpace,
    pub partition: Partition,
    pub analysis: ChainAnalysis,
    pub projection: ExactMatrix,
}

impl Pipeline {
    pub fn build(jdm: &JointDegreeMatrix, opts: &Options) -> Result<Self> {
        let chain = RsoChain::new(jdm.clone())?;
        let space = enumerate_balanced(&chain, opts.bfs_cap)?;
        if space.len() > opts.matrix_cap {
            return Err(Error::TooLarge(format!(
                "{} balanced states, dense analysis is limited to {}",
                space.len(),
                opts.matrix_cap
            )));
        }
        let partition = partition_states(&chain, &space)?;
        let matrix = transition_matrix(&chain, &space)?;
        let analysis = ChainAnalysis::new(matrix, opts.exact_cap)?;
        let projection = projection_chain(&partition, chain.num_vertices())?;
        Ok(Self {
            chain,
            space,
            partition,
            analysis,
            projection,
        })
    }

    pub fn report(&self, opts: &Options) -> Result<Report> {
        let full = &self.analysis.matrix;
        let n = self.chain.num_vertices();

        let mut components_ok = self.projection.is_symmetric() && self.projection.is_row_stochastic();
        let mut r1: f64 = 1.0;
        for cell in self.partition.cells() {
            let m = restricted_chain(cell, full);
            components_ok &= m.is_symmetric() && m.is_row_stochastic();
            let eig = eigen_symmetric(&m.to_dense())?;
            r1 = r1.max(relaxation_time(eig.get(1).copied()));
        }
        let proj_eig = eigen_symmetric(&self.projection.to_dense())?;
        let r2 = relaxation_time(proj_eig.get(1).copied());
        let bound = decomposition_bound(r1, r2);
        let relaxation = self.analysis.relaxation();

        let modified_cheeger = if self.space.len() <= opts.subset_cap {
            Some(check_modified_cheeger(full, self.analysis.lambda2(), opts.subset_cap)?)
        } else {
            None
        };
        let connectivity = if n <= opts.brute_force_max {
            let oracle = brute_force_realizations(self.chain.jdm(), true, opts.brute_force_max)?;
            let bfs: Vec<_> = self.space.states().iter().map(|s| s.realization().clone()).collect();
            Some(check_connectivity(&bfs, &oracle))
        } else {
            None
        };
        let average_flow_lambda2 =
            average_flow_eigenvalues(&self.partition, full)?.get(1).copied();
        let conductance = self.analysis.conductance.as_ref();

        Ok(Report {
            vertex_count: n,
            state_count: self.space.len(),
            lambda2: self.analysis.lambda2(),
            relaxation,
            spectrum_sane: self.analysis.spectrum_is_sane(),
            phi: conductance.map(|c| c.phi),
            phi_value: conductance.map(|c| c.phi_f64()),
            witness: conductance.map(|c| c.witness.clone()),
            stationarity: StationarityReport::of(full),
            cheeger: check_cheeger(&self.analysis),
            modified_cheeger,
            partition: PartitionSummary::of(&self.partition),
            swap_theorem: verify_swap_theorem(&self.partition, full),
            projection_dominance: check_projection_dominance(full, &self.partition, &self.projection),
            components_ok,
            r1,
            r2,
            bound_ok: relaxation <= bound.value,
            bound,
            average_flow_lambda2,
            connectivity,
        })
    }
}
