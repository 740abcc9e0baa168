#![allow(dead_code)]

use balanced_jdm::{JointDegreeMatrix, Realization};
use rand::Rng;

pub fn jdm(degrees: &[u32], rows: &[&[u64]]) -> JointDegreeMatrix {
    JointDegreeMatrix::new(degrees.to_vec(), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

pub fn jdm_a() -> JointDegreeMatrix {
    jdm(&[1, 2], &[&[0, 2], &[2, 1]])
}

pub fn jdm_b() -> JointDegreeMatrix {
    jdm(&[2], &[&[4]])
}

pub fn jdm_c() -> JointDegreeMatrix {
    jdm(&[1, 2], &[&[1, 2], &[2, 0]])
}

pub fn three_class() -> JointDegreeMatrix {
    jdm(&[1, 2, 3], &[&[0, 2, 1], &[2, 1, 2], &[1, 2, 3]])
}

/// Named fixed instances.
pub fn fixed_corpus() -> Vec<(&'static str, JointDegreeMatrix)> {
    vec![
        ("jdm-a", jdm_a()),
        ("jdm-b", jdm_b()),
        ("jdm-c", jdm_c()),
        ("k4", jdm(&[3], &[&[6]])),
        ("three-class", three_class()),
        ("path-p5", jdm(&[1, 2], &[&[0, 2], &[2, 2]])),
        ("c6", jdm(&[2], &[&[6]])),
    ]
}

/// Edge list of G(n, p).
pub fn gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// The joint degree matrix of a graph, isolated vertices dropped; `None`
/// for an edgeless graph.
pub fn jdm_of_edges(n: usize, edges: &[(usize, usize)]) -> Option<JointDegreeMatrix> {
    let mut deg = vec![0u32; n];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut degrees: Vec<u32> = deg.iter().copied().filter(|&d| d > 0).collect();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.is_empty() {
        return None;
    }
    let class = |v: usize| degrees.binary_search(&deg[v]).unwrap();
    let k = degrees.len();
    let mut rows = vec![vec![0u64; k]; k];
    for &(u, v) in edges {
        let (a, b) = (class(u), class(v));
        rows[a][b] += 1;
        if a != b {
            rows[b][a] += 1;
        }
    }
    Some(JointDegreeMatrix::new(degrees, rows).unwrap())
}

/// A graphical JDM on at most `max_n` non-isolated vertices.
pub fn random_jdm<R: Rng>(rng: &mut R, min_n: usize, max_n: usize) -> JointDegreeMatrix {
    loop {
        let n = rng.random_range(min_n..=max_n);
        let p = rng.random_range(0.15..0.85);
        if let Some(j) = jdm_of_edges(n, &gnp(rng, n, p)) {
            return j;
        }
    }
}

/// Relabels the vertices of `g` by a permutation that maps every class to itself.
pub fn permute_within_classes<R: Rng>(rng: &mut R, g: &Realization) -> Realization {
    use rand::seq::SliceRandom;
    let n = g.num_vertices();
    let mut perm: Vec<usize> = (0..n).collect();
    for c in 0..g.num_classes() {
        let mut members: Vec<usize> = (0..n).filter(|&v| g.class_of(v) == c).collect();
        let targets = members.clone();
        members.shuffle(rng);
        for (t, m) in targets.into_iter().zip(members) {
            perm[t] = m;
        }
    }
    Realization::new(
        g.class_degrees().to_vec(),
        g.classes().to_vec(),
        g.edges().into_iter().map(|(u, v)| (perm[u], perm[v])),
    )
    .unwrap()
}
