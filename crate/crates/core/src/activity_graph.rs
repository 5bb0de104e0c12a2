//! Activity co-occurrence network and modularity-based clustering.
//!
//! Co-occurrence weights count (paper, author) profiles in which two
//! activities appear together. Clustering is greedy agglomerative
//! modularity maximization (Louvain-style local moves plus community
//! merges), deterministic under a seed. The canonical three-cluster
//! partition is shipped as a reference; clustering validates it on user
//! data rather than replacing it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lexicon::{RoleCluster, ACTIVITY_COUNT, ALL_ACTIVITIES};
use crate::parser::ActivityProfile;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Dense symmetric weighted graph. The diagonal stores twice the self-loop
/// weight so that degree sums and aggregation keep modularity exact.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    a: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Set the symmetric weight of edge (i, j), i != j.
    pub fn set_edge(&mut self, i: usize, j: usize, w: f64) {
        assert_ne!(i, j, "use add_self for self-loops");
        self.a[i * self.n + j] = w;
        self.a[j * self.n + i] = w;
    }

    pub fn add_edge(&mut self, i: usize, j: usize, w: f64) {
        assert_ne!(i, j);
        self.a[i * self.n + j] += w;
        self.a[j * self.n + i] += w;
    }

    fn add_self(&mut self, i: usize, w: f64) {
        self.a[i * self.n + i] += 2.0 * w;
    }

    pub fn degree(&self, i: usize) -> f64 {
        (0..self.n).map(|j| self.weight(i, j)).sum()
    }

    /// Sum of all degrees (2m).
    pub fn total_degree(&self) -> f64 {
        self.a.iter().sum()
    }
}

/// A node partition together with its modularity score.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// cluster label per node, compacted to 0..n_clusters in order of first
    /// appearance
    pub labels: Vec<usize>,
    pub q: Option<f64>,
    pub n_clusters: usize,
}

impl Partition {
    fn from_labels(graph: &WeightedGraph, labels: Vec<usize>, resolution: f64) -> Partition {
        let labels = canonical_labels(&labels);
        let q = modularity_with_resolution(graph, &labels, resolution);
        let n_clusters = labels.iter().copied().max().map_or(0, |m| m + 1);
        Partition {
            labels,
            q,
            n_clusters,
        }
    }
}

fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut remap: Vec<Option<usize>> = vec![None; labels.len().max(labels.iter().max().map_or(0, |m| m + 1))];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            *remap[l].get_or_insert_with(|| {
                let v = next;
                next += 1;
                v
            })
        })
        .collect()
}

/// Weighted Newman modularity; `None` on a zero-weight graph.
pub fn modularity(graph: &WeightedGraph, labels: &[usize]) -> Option<f64> {
    modularity_with_resolution(graph, labels, 1.0)
}

pub fn modularity_with_resolution(
    graph: &WeightedGraph,
    labels: &[usize],
    resolution: f64,
) -> Option<f64> {
    assert_eq!(labels.len(), graph.n_nodes());
    let m2 = graph.total_degree();
    if m2 <= 0.0 {
        return None;
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut internal = vec![0.0f64; k];
    let mut degree = vec![0.0f64; k];
    for i in 0..graph.n_nodes() {
        degree[labels[i]] += graph.degree(i);
        for j in 0..graph.n_nodes() {
            if labels[i] == labels[j] {
                internal[labels[i]] += graph.weight(i, j);
            }
        }
    }
    let mut q = 0.0;
    for c in 0..k {
        q += internal[c] / m2 - resolution * (degree[c] / m2).powi(2);
    }
    Some(q)
}

/// Greedy agglomerative modularity maximization, deterministic under `seed`.
///
/// Runs several restarts of Louvain local moving + aggregation with seeded
/// node orders, then a community-merge refinement; returns the best-Q
/// partition found (ties resolved by restart order).
pub fn cluster_modularity(graph: &WeightedGraph, seed: u64, resolution: f64) -> Partition {
    let n = graph.n_nodes();
    if n == 0 {
        return Partition {
            labels: Vec::new(),
            q: None,
            n_clusters: 0,
        };
    }
    if graph.total_degree() <= 0.0 {
        return Partition::from_labels(graph, (0..n).collect(), resolution);
    }

    const RESTARTS: u64 = 8;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..RESTARTS {
        let mut labels = louvain(graph, seed.wrapping_add(r), resolution);
        merge_refine(graph, &mut labels, resolution);
        let q = modularity_with_resolution(graph, &canonical_labels(&labels), resolution)
            .unwrap_or(f64::NEG_INFINITY);
        if best.as_ref().map_or(true, |(bq, _)| q > *bq) {
            best = Some((q, labels));
        }
    }
    let (_, labels) = best.expect("at least one restart");
    Partition::from_labels(graph, labels, resolution)
}

fn louvain(graph: &WeightedGraph, seed: u64, resolution: f64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // assignment of original nodes to communities of the current level
    let mut assignment: Vec<usize> = (0..graph.n_nodes()).collect();
    let mut level = graph.clone();
    loop {
        let mut labels: Vec<usize> = (0..level.n_nodes()).collect();
        let moved = local_moving(&level, &mut labels, resolution, &mut rng);
        if !moved {
            break;
        }
        let labels = canonical_labels(&labels);
        for slot in assignment.iter_mut() {
            *slot = labels[*slot];
        }
        level = aggregate(&level, &labels);
        if level.n_nodes() <= 1 {
            break;
        }
    }
    assignment
}

fn local_moving(
    graph: &WeightedGraph,
    labels: &mut [usize],
    resolution: f64,
    rng: &mut ChaCha8Rng,
) -> bool {
    let n = graph.n_nodes();
    let m2 = graph.total_degree();
    let degrees: Vec<f64> = (0..n).map(|i| graph.degree(i)).collect();
    let mut comm_degree = vec![0.0f64; n];
    for i in 0..n {
        comm_degree[labels[i]] += degrees[i];
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut any_move = false;
    const MAX_PASSES: usize = 16;
    for _ in 0..MAX_PASSES {
        let mut moves = 0;
        for &node in &order {
            let current = labels[node];
            let k_i = degrees[node];
            comm_degree[current] -= k_i;

            // weight from node to each community (self-loops excluded)
            let mut w_to = vec![0.0f64; n];
            for j in 0..n {
                if j != node {
                    let w = graph.weight(node, j);
                    if w != 0.0 {
                        w_to[labels[j]] += w;
                    }
                }
            }

            let removal =
                -(w_to[current] / m2) + resolution * comm_degree[current] * k_i / (m2 * m2);
            let mut best_comm = current;
            let mut best_gain = 0.0f64;
            for cand in 0..n {
                if cand == current || (w_to[cand] == 0.0 && comm_degree[cand] == 0.0) {
                    continue;
                }
                let addition =
                    w_to[cand] / m2 - resolution * comm_degree[cand] * k_i / (m2 * m2);
                let gain = removal + addition;
                // strict improvement; ascending candidate order makes the
                // lowest community id win exact ties
                if gain > best_gain {
                    best_gain = gain;
                    best_comm = cand;
                }
            }

            comm_degree[best_comm] += k_i;
            if best_comm != current {
                labels[node] = best_comm;
                moves += 1;
                any_move = true;
            }
        }
        if moves == 0 {
            break;
        }
    }
    any_move
}

fn aggregate(graph: &WeightedGraph, labels: &[usize]) -> WeightedGraph {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = WeightedGraph::new(k);
    for i in 0..graph.n_nodes() {
        for j in 0..graph.n_nodes() {
            let w = graph.weight(i, j);
            if w == 0.0 {
                continue;
            }
            let (ci, cj) = (labels[i], labels[j]);
            if ci == cj {
                if i < j {
                    out.add_self(ci, w);
                } else if i == j {
                    out.a[ci * k + ci] += w;
                }
            } else if i < j {
                out.add_edge(ci, cj, w);
            }
        }
    }
    out
}

/// Try merging every pair of communities while any merge improves Q.
fn merge_refine(graph: &WeightedGraph, labels: &mut Vec<usize>, resolution: f64) {
    loop {
        let canon = canonical_labels(labels);
        let k = canon.iter().copied().max().map_or(0, |m| m + 1);
        if k <= 1 {
            *labels = canon;
            return;
        }
        let base = match modularity_with_resolution(graph, &canon, resolution) {
            Some(q) => q,
            None => {
                *labels = canon;
                return;
            }
        };
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..k {
            for b in (a + 1)..k {
                let merged: Vec<usize> = canon
                    .iter()
                    .map(|&l| if l == b { a } else { l })
                    .collect();
                if let Some(q) = modularity_with_resolution(graph, &merged, resolution) {
                    if q > base && best.as_ref().map_or(true, |(bq, _, _)| q > *bq) {
                        best = Some((q, a, b));
                    }
                }
            }
        }
        match best {
            Some((_, a, b)) => {
                *labels = canon
                    .into_iter()
                    .map(|l| if l == b { a } else { l })
                    .collect();
            }
            None => {
                *labels = canon;
                return;
            }
        }
    }
}

/// Co-occurrence of the 25 activities over (paper, author) profiles:
/// weight(a, b) = number of profiles whose activity set contains both.
pub fn build_cooccurrence(profiles: &[ActivityProfile]) -> WeightedGraph {
    let counts = count_pairs(profiles);
    let mut g = WeightedGraph::new(ACTIVITY_COUNT);
    for i in 0..ACTIVITY_COUNT {
        for j in (i + 1)..ACTIVITY_COUNT {
            let c = counts[i * ACTIVITY_COUNT + j];
            if c > 0 {
                g.set_edge(i, j, c as f64);
            }
        }
    }
    g
}

fn count_pairs(profiles: &[ActivityProfile]) -> Vec<u64> {
    let fold_one = |mut acc: Vec<u64>, p: &ActivityProfile| {
        let acts: Vec<usize> = p.activities.iter().map(|a| a.index()).collect();
        for (i, &a) in acts.iter().enumerate() {
            for &b in &acts[i + 1..] {
                acc[a * ACTIVITY_COUNT + b] += 1;
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    {
        profiles
            .par_iter()
            .fold(
                || vec![0u64; ACTIVITY_COUNT * ACTIVITY_COUNT],
                fold_one,
            )
            .reduce(
                || vec![0u64; ACTIVITY_COUNT * ACTIVITY_COUNT],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    }
    #[cfg(not(feature = "parallel"))]
    {
        profiles
            .iter()
            .fold(vec![0u64; ACTIVITY_COUNT * ACTIVITY_COUNT], fold_one)
    }
}

/// The fixed three-cluster partition over the 25 activities
/// (lead = 0, direct = 1, indirect = 2).
pub fn reference_labels() -> Vec<usize> {
    ALL_ACTIVITIES
        .iter()
        .map(|a| match a.reference_cluster() {
            RoleCluster::Lead => 0,
            RoleCluster::DirectSupport => 1,
            RoleCluster::IndirectSupport => 2,
        })
        .collect()
}

/// Rand index between two partitions: fraction of node pairs on which they
/// agree (co-clustered in both or separated in both). Label-permutation
/// invariant.
pub fn pair_agreement(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut agree = 0usize;
    let mut total = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            total += 1;
            if (a[i] == a[j]) == (b[i] == b[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / total as f64
}

/// Map each discovered cluster to the role held by the majority of its
/// activities in the reference partition (ties broken Lead > Direct >
/// Indirect).
pub fn map_clusters_to_roles(labels: &[usize]) -> Vec<RoleCluster> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let mut counts = [0usize; 3];
        for (i, &l) in labels.iter().enumerate() {
            if l == c {
                match ALL_ACTIVITIES[i].reference_cluster() {
                    RoleCluster::Lead => counts[0] += 1,
                    RoleCluster::DirectSupport => counts[1] += 1,
                    RoleCluster::IndirectSupport => counts[2] += 1,
                }
            }
        }
        let best = if counts[0] >= counts[1] && counts[0] >= counts[2] {
            RoleCluster::Lead
        } else if counts[1] >= counts[2] {
            RoleCluster::DirectSupport
        } else {
            RoleCluster::IndirectSupport
        };
        out.push(best);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::{AuthorIdx, PaperIdx};
    use crate::lexicon::{Activity, ActivitySet};
    use rand::Rng;

    fn profile(acts: &[Activity]) -> ActivityProfile {
        ActivityProfile {
            paper: PaperIdx(0),
            author: AuthorIdx(0),
            activities: acts.iter().copied().collect(),
            unmatched_verbs: Vec::new(),
        }
    }

    #[test]
    fn single_pair_cooccurrence() {
        let g = build_cooccurrence(&[profile(&[Activity::Design, Activity::Write])]);
        let (d, w) = (Activity::Design.index(), Activity::Write.index());
        assert_eq!(g.weight(d, w), 1.0);
        assert_eq!(g.weight(w, d), 1.0);
        assert_eq!(g.total_degree(), 2.0);
    }

    #[test]
    fn singleton_profile_no_pairs() {
        let g = build_cooccurrence(&[profile(&[Activity::Design])]);
        assert_eq!(g.total_degree(), 0.0);
    }

    #[test]
    fn cooccurrence_matches_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut profiles = Vec::new();
        for _ in 0..50 {
            let k = rng.gen_range(0..5);
            let mut set = ActivitySet::empty();
            for _ in 0..k {
                set.insert(ALL_ACTIVITIES[rng.gen_range(0..ACTIVITY_COUNT)]);
            }
            profiles.push(ActivityProfile {
                paper: PaperIdx(0),
                author: AuthorIdx(0),
                activities: set,
                unmatched_verbs: Vec::new(),
            });
        }
        let g = build_cooccurrence(&profiles);
        for a in ALL_ACTIVITIES {
            for b in ALL_ACTIVITIES {
                if a == b {
                    continue;
                }
                let expected = profiles
                    .iter()
                    .filter(|p| p.activities.contains(a) && p.activities.contains(b))
                    .count() as f64;
                assert_eq!(g.weight(a.index(), b.index()), expected);
            }
        }
    }

    #[test]
    fn symmetry_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let profiles: Vec<ActivityProfile> = (0..30)
            .map(|_| {
                let mut set = ActivitySet::empty();
                for _ in 0..rng.gen_range(0..6) {
                    set.insert(ALL_ACTIVITIES[rng.gen_range(0..ACTIVITY_COUNT)]);
                }
                ActivityProfile {
                    paper: PaperIdx(0),
                    author: AuthorIdx(0),
                    activities: set,
                    unmatched_verbs: Vec::new(),
                }
            })
            .collect();
        let g = build_cooccurrence(&profiles);
        for i in 0..ACTIVITY_COUNT {
            assert_eq!(g.weight(i, i), 0.0);
            for j in 0..ACTIVITY_COUNT {
                assert_eq!(g.weight(i, j), g.weight(j, i));
            }
        }
    }

    fn two_triangles() -> WeightedGraph {
        let mut g = WeightedGraph::new(6);
        for (a, b) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            g.set_edge(a, b, 1.0);
        }
        g
    }

    #[test]
    fn all_in_one_cluster_q_zero() {
        let g = two_triangles();
        let q = modularity(&g, &[0; 6]).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn two_triangles_q_half() {
        let g = two_triangles();
        let q = modularity(&g, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((q - 0.5).abs() < 1e-12, "q = {q}");
    }

    #[test]
    fn zero_weight_graph_undefined() {
        let g = WeightedGraph::new(3);
        assert_eq!(modularity(&g, &[0, 1, 2]), None);
    }

    /// Every restricted-growth string = one set partition of n nodes.
    pub(crate) fn exhaustive_best_q(g: &WeightedGraph) -> (f64, Vec<usize>) {
        let n = g.n_nodes();
        let mut labels = vec![0usize; n];
        let mut best = (f64::NEG_INFINITY, vec![0; n]);
        fn rec(
            g: &WeightedGraph,
            labels: &mut Vec<usize>,
            i: usize,
            max_used: usize,
            best: &mut (f64, Vec<usize>),
        ) {
            let n = g.n_nodes();
            if i == n {
                if let Some(q) = modularity(g, labels) {
                    if q > best.0 {
                        *best = (q, labels.clone());
                    }
                }
                return;
            }
            for l in 0..=max_used + 1 {
                labels[i] = l;
                rec(g, labels, i + 1, max_used.max(l), best);
            }
        }
        labels[0] = 0;
        rec(g, &mut labels, 1, 0, &mut best);
        (best.0, best.1)
    }

    #[test]
    fn random_partition_never_beats_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(3..=6);
            let mut g = WeightedGraph::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.5) {
                        g.set_edge(i, j, rng.gen_range(1..=4) as f64);
                    }
                }
            }
            if g.total_degree() == 0.0 {
                continue;
            }
            let (opt, _) = exhaustive_best_q(&g);
            for _ in 0..10 {
                let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                let q = modularity(&g, &labels).unwrap();
                assert!(q <= opt + 1e-12);
            }
        }
    }

    #[test]
    fn two_cliques_recovered() {
        let mut g = WeightedGraph::new(8);
        for c in [0usize, 4] {
            for i in c..c + 4 {
                for j in (i + 1)..c + 4 {
                    g.set_edge(i, j, 1.0);
                }
            }
        }
        let p = cluster_modularity(&g, 42, 1.0);
        assert_eq!(p.n_clusters, 2);
        assert_eq!(p.labels[0..4], [0, 0, 0, 0]);
        assert_eq!(p.labels[4..8], [1, 1, 1, 1]);
        let (opt, _) = exhaustive_best_q(&g);
        assert!((p.q.unwrap() - opt).abs() < 1e-12);
    }

    #[test]
    fn planted_three_blocks_recovered() {
        let mut g = WeightedGraph::new(9);
        for b in 0..3usize {
            let base = b * 3;
            for i in base..base + 3 {
                for j in (i + 1)..base + 3 {
                    g.set_edge(i, j, 20.0);
                }
            }
        }
        // weak cross-block links
        g.set_edge(0, 3, 1.0);
        g.set_edge(3, 6, 1.0);
        g.set_edge(6, 1, 1.0);
        let p = cluster_modularity(&g, 9, 1.0);
        assert_eq!(p.n_clusters, 3);
        for b in 0..3usize {
            let base = b * 3;
            assert_eq!(p.labels[base], p.labels[base + 1]);
            assert_eq!(p.labels[base], p.labels[base + 2]);
        }
    }

    #[test]
    fn single_node_degenerate() {
        let g = WeightedGraph::new(1);
        let p = cluster_modularity(&g, 0, 1.0);
        assert_eq!(p.labels, vec![0]);
        assert_eq!(p.n_clusters, 1);
        assert_eq!(p.q, None);
    }

    #[test]
    fn seed_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10;
        let mut g = WeightedGraph::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.4) {
                    g.set_edge(i, j, rng.gen_range(1..=3) as f64);
                }
            }
        }
        let a = cluster_modularity(&g, 123, 1.0);
        let b = cluster_modularity(&g, 123, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn monotone_vs_singletons() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..25 {
            let n = rng.gen_range(2..=8);
            let mut g = WeightedGraph::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.5) {
                        g.set_edge(i, j, rng.gen_range(1..=5) as f64);
                    }
                }
            }
            if g.total_degree() == 0.0 {
                continue;
            }
            let singleton_q = modularity(&g, &(0..n).collect::<Vec<_>>()).unwrap();
            let p = cluster_modularity(&g, trial, 1.0);
            assert!(p.q.unwrap() >= singleton_q - 1e-12);
        }
    }

    #[test]
    fn reference_partition_shape() {
        let labels = reference_labels();
        assert_eq!(labels.len(), 25);
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 7);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 12);
        assert_eq!(labels.iter().filter(|&&l| l == 2).count(), 6);
        assert_eq!(pair_agreement(&labels, &labels), 1.0);
    }

    #[test]
    fn cluster_role_mapping_majority() {
        let labels = reference_labels();
        let roles = map_clusters_to_roles(&labels);
        assert_eq!(
            roles,
            vec![
                RoleCluster::Lead,
                RoleCluster::DirectSupport,
                RoleCluster::IndirectSupport
            ]
        );
    }
}
