//! Synthetic planted-partition instances, label noise, and file formats.
//!
//! A planted instance starts as disjoint `+` cliques (one per cluster, all
//! inter-cluster pairs `-`) and is then perturbed by one of three flip
//! models. Vertex IDs are laid out cluster by cluster in the order the sizes
//! are generated.

pub mod io;

use crate::graph::{Clustering, GraphError, SignedGraph, Vertex};
use crate::rng::{stream_rng, Stream};
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub use io::{
    format_clustering, format_graph, parse_clustering, parse_graph, parse_weighted,
    read_clustering, read_graph, read_weighted, write_clustering, write_graph, IoError,
};

/// Default intra-noise budget for the small families.
pub const SMALL_FLIP_BUDGET: u64 = 100;
pub const L1: f64 = 0.01;
pub const L2: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatagenError {
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("truth clustering covers {truth} vertices but graph has {graph}")]
    TruthMismatch { graph: usize, truth: usize },
    #[error("weight {weight} for pair ({u}, {v}) outside [0, 1]")]
    WeightOutOfRange { u: Vertex, v: Vertex, weight: f64 },
    #[error("pair ({u}, {v}) listed with conflicting weights {first} and {second}")]
    ConflictingWeight {
        u: Vertex,
        v: Vertex,
        first: f64,
        second: f64,
    },
    #[error("unknown family `{0}` (expected N, S, D, skew, sqrtn or explicit)")]
    UnknownFamily(String),
    #[error("unknown noise model `{0}` (expected none, I, II or III)")]
    UnknownNoise(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `clusters` cliques with sizes drawn from Normal(mean, sd).
    Normal {
        clusters: usize,
        mean: f64,
        sd: f64,
    },
    /// Five clusters of 5, four of 15, one of 30.
    Skewed,
    /// Cluster proportions drawn from Dirichlet(alpha), scaled to `total`.
    Dirichlet {
        total: usize,
        alpha: Vec<f64>,
    },
    /// About log n large clusters, about sqrt n medium ones, and a tail of
    /// pairs and singletons.
    Skew {
        n: usize,
    },
    /// sqrt n clusters of size sqrt n.
    Sqrtn {
        n: usize,
    },
    Explicit(Vec<usize>),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Normal { .. } => "N",
            Family::Skewed => "S",
            Family::Dirichlet { .. } => "D",
            Family::Skew { .. } => "skew",
            Family::Sqrtn { .. } => "sqrtn",
            Family::Explicit(_) => "explicit",
        }
    }

    /// Family by name with its default parameters; `n` applies to the large
    /// families.
    pub fn by_name(name: &str, n: Option<usize>) -> Result<Family, DatagenError> {
        let large_n = n.unwrap_or(900);
        match name {
            "N" | "n" => Ok(Family::Normal {
                clusters: 10,
                mean: 8.0,
                sd: 2.0,
            }),
            "S" | "s" => Ok(Family::Skewed),
            "D" | "d" => Ok(Family::Dirichlet {
                total: n.unwrap_or(100),
                alpha: vec![3.0, 1.0, 1.0],
            }),
            "skew" => Ok(Family::Skew { n: large_n }),
            "sqrtn" => Ok(Family::Sqrtn { n: large_n }),
            other => Err(DatagenError::UnknownFamily(other.to_string())),
        }
    }

    /// Large families use a flip budget proportional to the pair count.
    pub fn is_large(&self) -> bool {
        matches!(self, Family::Skew { .. } | Family::Sqrtn { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(family: Family, seed: u64) -> Self {
        FamilySpec { family, seed }
    }

    /// Cluster sizes in vertex-layout order.
    pub fn cluster_sizes(&self) -> Result<Vec<usize>, DatagenError> {
        let mut rng = stream_rng(self.seed, Stream::Family);
        let sizes = match &self.family {
            Family::Normal { clusters, mean, sd } => normal_sizes(*clusters, *mean, *sd, &mut rng)?,
            Family::Skewed => [5, 5, 5, 5, 5, 15, 15, 15, 15, 30].to_vec(),
            Family::Dirichlet { total, alpha } => dirichlet_sizes(*total, alpha, &mut rng)?,
            Family::Skew { n } => skew_sizes(*n),
            Family::Sqrtn { n } => sqrtn_sizes(*n),
            Family::Explicit(sizes) => sizes.clone(),
        };
        if sizes.contains(&0) {
            return Err(DatagenError::InvalidFamily(format!(
                "non-positive cluster size in {sizes:?}"
            )));
        }
        Ok(sizes)
    }
}

fn normal_sizes(
    clusters: usize,
    mean: f64,
    sd: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>, DatagenError> {
    if mean < 2.0 {
        return Err(DatagenError::InvalidFamily(format!(
            "normal mean {mean} below minimum cluster size 2"
        )));
    }
    let dist = Normal::new(mean, sd)
        .map_err(|e| DatagenError::InvalidFamily(format!("normal({mean}, {sd}): {e}")))?;
    let mut sizes = Vec::with_capacity(clusters);
    while sizes.len() < clusters {
        let draw: f64 = dist.sample(rng).round();
        // resample draws that would not form a clique of at least two
        if draw >= 2.0 {
            sizes.push(draw as usize);
        }
    }
    Ok(sizes)
}

fn dirichlet_sizes(
    total: usize,
    alpha: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>, DatagenError> {
    if alpha.is_empty() || alpha.len() > total {
        return Err(DatagenError::InvalidFamily(format!(
            "dirichlet with {} components over {total} vertices",
            alpha.len()
        )));
    }
    let mut draws = Vec::with_capacity(alpha.len());
    for &a in alpha {
        let gamma = Gamma::new(a, 1.0)
            .map_err(|e| DatagenError::InvalidFamily(format!("dirichlet alpha {a}: {e}")))?;
        draws.push(gamma.sample(rng));
    }
    let sum: f64 = draws.iter().sum();
    let shares: Vec<f64> = draws.iter().map(|d| d / sum * total as f64).collect();
    Ok(apportion(total, &shares))
}

/// Largest-remainder rounding of `shares` (summing to `total`), with every
/// part at least 1.
pub(crate) fn apportion(total: usize, shares: &[f64]) -> Vec<usize> {
    let mut sizes: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let largest = (0..sizes.len())
            .max_by_key(|&i| (sizes[i], usize::MAX - i))
            .unwrap();
        if sizes[largest] <= 1 {
            break;
        }
        sizes[largest] -= 1;
        sizes[empty] += 1;
    }
    sizes
}

fn skew_sizes(n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    if n == 0 {
        return sizes;
    }
    let mut left = n;
    if n >= 4 {
        let log = (n as f64).log2();
        let large_count = log.floor() as usize;
        let large_size = (n as f64 / log).floor() as usize;
        for _ in 0..large_count {
            let s = large_size.min(left);
            if s == 0 {
                break;
            }
            sizes.push(s);
            left -= s;
        }
        let root = (n as f64).sqrt().floor() as usize;
        for _ in 0..root {
            if left < root || root < 2 {
                break;
            }
            sizes.push(root);
            left -= root;
        }
    }
    while left >= 2 {
        sizes.push(2);
        left -= 2;
    }
    if left == 1 {
        sizes.push(1);
    }
    sizes
}

fn sqrtn_sizes(n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let k = ((n as f64).sqrt().round() as usize).max(1);
    let base = n / k;
    let extra = n % k;
    (0..k).map(|i| base + usize::from(i < extra)).collect()
}

/// Noiseless planted instance: disjoint `+` cliques and the matching truth.
pub fn generate_planted(spec: &FamilySpec) -> Result<(SignedGraph, Clustering), DatagenError> {
    let sizes = spec.cluster_sizes()?;
    let n: usize = sizes.iter().sum();
    let assignment: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(id, &s)| std::iter::repeat_n(id, s))
        .collect();
    debug_assert_eq!(assignment.len(), n);
    let truth = Clustering::from_assignment(assignment);
    Ok((truth.to_graph(), truth))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseModel {
    /// Flip `L` pairs chosen uniformly among all pairs.
    Uniform,
    /// Flip `min(floor(L/k), |C|-1)` pairs inside each cluster.
    IntraCluster,
    /// As [`NoiseModel::IntraCluster`], plus `ceil(l1 |Ci||Cj|)` pairs between
    /// every two clusters.
    IntraInter,
}

impl NoiseModel {
    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::Uniform => "I",
            NoiseModel::IntraCluster => "II",
            NoiseModel::IntraInter => "III",
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseModel {
    type Err = DatagenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "1" => Ok(NoiseModel::Uniform),
            "II" | "2" => Ok(NoiseModel::IntraCluster),
            "III" | "3" => Ok(NoiseModel::IntraInter),
            other => Err(DatagenError::UnknownNoise(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub model: NoiseModel,
    /// Flip budget `L`.
    pub flips: u64,
    pub l1: f64,
    pub l2: f64,
    pub seed: u64,
}

impl NoiseSpec {
    /// Small-instance setting: `L = 100`.
    pub fn small(model: NoiseModel, seed: u64) -> Self {
        NoiseSpec {
            model,
            flips: SMALL_FLIP_BUDGET,
            l1: L1,
            l2: L2,
            seed,
        }
    }

    /// Large-instance setting: `L = floor(l2 * C(n, 2))`.
    pub fn large(model: NoiseModel, n: usize, seed: u64) -> Self {
        let pairs = (n * n.saturating_sub(1) / 2) as f64;
        NoiseSpec {
            model,
            flips: (L2 * pairs).floor() as u64,
            l1: L1,
            l2: L2,
            seed,
        }
    }
}

/// Result of [`apply_noise_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub graph: SignedGraph,
    /// Flipped pairs `(u, v)` with `u < v`, in sampling order.
    pub flipped: Vec<(Vertex, Vertex)>,
    /// Strata whose requested flip count was clamped to the available pairs.
    pub clamped: Vec<String>,
}

pub fn apply_noise(
    g: &SignedGraph,
    truth: &Clustering,
    spec: &NoiseSpec,
) -> Result<SignedGraph, DatagenError> {
    apply_noise_report(g, truth, spec).map(|r| r.graph)
}

/// Index `0..C(n,2)` to the pair `(u, v)`, `u < v`, in row-major order.
fn decode_pair(mut index: usize, n: usize) -> (usize, usize) {
    let mut u = 0;
    loop {
        let row = n - u - 1;
        if index < row {
            return (u, u + 1 + index);
        }
        index -= row;
        u += 1;
    }
}

pub fn apply_noise_report(
    g: &SignedGraph,
    truth: &Clustering,
    spec: &NoiseSpec,
) -> Result<NoiseReport, DatagenError> {
    let n = g.n();
    if truth.n() != n {
        return Err(DatagenError::TruthMismatch {
            graph: n,
            truth: truth.n(),
        });
    }
    let mut rng = stream_rng(spec.seed, Stream::Noise);
    let mut flipped = Vec::new();
    let mut clamped = Vec::new();
    let mut take = |available: usize, wanted: u64, label: String| -> usize {
        if wanted > available as u64 {
            log::warn!(
                "{label}: flip budget {wanted} exceeds {available} available pairs; clamped"
            );
            clamped.push(label);
            available
        } else {
            wanted as usize
        }
    };

    match spec.model {
        NoiseModel::Uniform => {
            let total = g.pair_count();
            let amount = take(total, spec.flips, "all pairs".to_string());
            for i in index::sample(&mut rng, total, amount) {
                flipped.push(decode_pair(i, n));
            }
        }
        NoiseModel::IntraCluster | NoiseModel::IntraInter => {
            let clusters = truth.clusters();
            let k = clusters.len() as u64;
            for (ci, members) in clusters.iter().enumerate() {
                let s = members.len();
                let wanted = (spec.flips / k).min(s.saturating_sub(1) as u64);
                let amount = take(s * s.saturating_sub(1) / 2, wanted, format!("cluster {ci}"));
                for i in index::sample(&mut rng, s * s.saturating_sub(1) / 2, amount) {
                    let (a, b) = decode_pair(i, s);
                    flipped.push((members[a], members[b]));
                }
            }
            if spec.model == NoiseModel::IntraInter {
                for i in 0..clusters.len() {
                    for j in i + 1..clusters.len() {
                        let (a, b) = (&clusters[i], &clusters[j]);
                        let available = a.len() * b.len();
                        let wanted = (spec.l1 * available as f64).ceil() as u64;
                        let amount = take(available, wanted, format!("clusters {i}-{j}"));
                        for x in index::sample(&mut rng, available, amount) {
                            let (u, v) = (a[x / b.len()], b[x % b.len()]);
                            flipped.push((u.min(v), u.max(v)));
                        }
                    }
                }
            }
        }
    }

    let mut graph = g.clone();
    for &(u, v) in &flipped {
        graph.flip(u, v)?;
    }
    Ok(NoiseReport {
        graph,
        flipped,
        clamped,
    })
}

/// `+` iff the weight is at least 1/2; unlisted pairs have weight 0.
pub fn threshold_weighted(
    pairs: &[(Vertex, Vertex, f64)],
    n: usize,
) -> Result<SignedGraph, DatagenError> {
    let mut seen: std::collections::HashMap<(Vertex, Vertex), f64> =
        std::collections::HashMap::with_capacity(pairs.len());
    let mut g = SignedGraph::empty(n);
    for &(u, v, w) in pairs {
        g.check_pair(u, v)?;
        if !(0.0..=1.0).contains(&w) {
            return Err(DatagenError::WeightOutOfRange { u, v, weight: w });
        }
        let key = (u.min(v), u.max(v));
        if let Some(&first) = seen.get(&key) {
            if first != w {
                return Err(DatagenError::ConflictingWeight {
                    u: key.0,
                    v: key.1,
                    first,
                    second: w,
                });
            }
            continue;
        }
        seen.insert(key, w);
        if w >= 0.5 {
            g.set_plus(u, v);
        }
    }
    Ok(g)
}

/// Graph on `n` vertices with each pair `+` independently with probability `plus`.
pub fn random_signed_graph(n: usize, plus: f64, seed: u64) -> SignedGraph {
    let mut rng = stream_rng(seed, Stream::Family);
    let mut g = SignedGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < plus {
                g.set_plus(u, v);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::count_disagreements;

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn s_family_shape() {
        let (g, truth) = generate_planted(&FamilySpec::new(Family::Skewed, 0)).unwrap();
        assert_eq!(g.n(), 115);
        let sizes = sorted(truth.clusters().iter().map(Vec::len).collect());
        assert_eq!(sizes, vec![5, 5, 5, 5, 5, 15, 15, 15, 15, 30]);
        assert_eq!(count_disagreements(&g, &truth).unwrap(), 0);
    }

    #[test]
    fn sqrtn_shape() {
        let (g, truth) = generate_planted(&FamilySpec::new(Family::Sqrtn { n: 900 }, 1)).unwrap();
        assert_eq!(g.n(), 900);
        assert!(truth.clusters().iter().all(|c| c.len() == 30));
        assert_eq!(truth.cluster_count(), 30);
    }

    #[test]
    fn n_family_sizes_are_at_least_two() {
        for seed in 0..50 {
            let sizes = FamilySpec::new(Family::by_name("N", None).unwrap(), seed)
                .cluster_sizes()
                .unwrap();
            assert_eq!(sizes.len(), 10);
            assert!(sizes.iter().all(|&s| s >= 2));
        }
    }

    #[test]
    fn d_family_totals_hundred() {
        for seed in 0..50 {
            let sizes = FamilySpec::new(Family::by_name("D", None).unwrap(), seed)
                .cluster_sizes()
                .unwrap();
            assert_eq!(sizes.len(), 3);
            assert_eq!(sizes.iter().sum::<usize>(), 100);
            assert!(sizes.iter().all(|&s| s >= 1));
        }
    }

    #[test]
    fn skew_totals_n() {
        for n in [1, 2, 3, 10, 100, 900, 1000] {
            let sizes = skew_sizes(n);
            assert_eq!(sizes.iter().sum::<usize>(), n, "n={n}");
        }
        let sizes = skew_sizes(900);
        assert_eq!(&sizes[..9], &[91; 9]);
        assert!(sizes[9..].iter().all(|&s| s <= 30));
    }

    #[test]
    fn apportion_keeps_total_and_minimum() {
        assert_eq!(apportion(10, &[3.5, 3.5, 3.0]), vec![4, 3, 3]);
        assert_eq!(apportion(10, &[9.99, 0.005, 0.005]), vec![8, 1, 1]);
    }

    #[test]
    fn explicit_zero_size_rejected() {
        let spec = FamilySpec::new(Family::Explicit(vec![3, 0]), 0);
        assert!(matches!(
            generate_planted(&spec),
            Err(DatagenError::InvalidFamily(_))
        ));
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            Family::by_name("Q", None),
            Err(DatagenError::UnknownFamily(_))
        ));
        assert!("IV".parse::<NoiseModel>().is_err());
        assert_eq!(
            "II".parse::<NoiseModel>().unwrap(),
            NoiseModel::IntraCluster
        );
    }

    #[test]
    fn zero_budget_is_identity() {
        let (g, truth) = generate_planted(&FamilySpec::new(Family::Skewed, 0)).unwrap();
        let mut spec = NoiseSpec::small(NoiseModel::Uniform, 3);
        spec.flips = 0;
        assert_eq!(apply_noise(&g, &truth, &spec).unwrap(), g);
    }

    #[test]
    fn uniform_flips_exact_count() {
        let (g, truth) = generate_planted(&FamilySpec::new(Family::Skewed, 0)).unwrap();
        let r = apply_noise_report(&g, &truth, &NoiseSpec::small(NoiseModel::Uniform, 3)).unwrap();
        assert_eq!(r.flipped.len(), 100);
        assert_eq!(count_disagreements(&r.graph, &truth).unwrap(), 100);
    }

    #[test]
    fn uniform_budget_clamps() {
        let truth = Clustering::from_assignment(vec![0, 0, 1]);
        let g = truth.to_graph();
        let r = apply_noise_report(&g, &truth, &NoiseSpec::small(NoiseModel::Uniform, 3)).unwrap();
        assert_eq!(r.flipped.len(), 3);
        assert_eq!(r.clamped.len(), 1);
    }

    #[test]
    fn model_three_between_two_tens() {
        let spec = FamilySpec::new(Family::Explicit(vec![10, 10]), 0);
        let (g, truth) = generate_planted(&spec).unwrap();
        let r =
            apply_noise_report(&g, &truth, &NoiseSpec::small(NoiseModel::IntraInter, 9)).unwrap();
        let inter = r
            .flipped
            .iter()
            .filter(|&&(u, v)| !truth.same_cluster(u, v))
            .count();
        assert_eq!(inter, 1);
        // intra: min(100/2, 9) per cluster
        assert_eq!(r.flipped.len() - inter, 18);
    }

    #[test]
    fn noise_truth_mismatch() {
        let g = SignedGraph::empty(3);
        assert!(matches!(
            apply_noise(
                &g,
                &Clustering::singletons(4),
                &NoiseSpec::small(NoiseModel::Uniform, 0)
            ),
            Err(DatagenError::TruthMismatch { .. })
        ));
    }

    #[test]
    fn decode_pair_covers_all() {
        let n = 7;
        let pairs: Vec<_> = (0..21).map(|i| decode_pair(i, n)).collect();
        let mut expected = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                expected.push((u, v));
            }
        }
        assert_eq!(pairs, expected);
    }

    #[test]
    fn threshold_rule() {
        let g = threshold_weighted(&[(0, 1, 0.5), (1, 2, 0.499), (0, 2, 0.73)], 4).unwrap();
        assert!(g.is_plus(0, 1));
        assert!(!g.is_plus(1, 2));
        assert!(g.is_plus(0, 2));
        assert!(!g.is_plus(0, 3));
    }

    #[test]
    fn threshold_all_ones_is_complete() {
        let mut pairs = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                pairs.push((u, v, 1.0));
            }
        }
        assert_eq!(
            threshold_weighted(&pairs, 5).unwrap(),
            SignedGraph::complete(5)
        );
    }

    #[test]
    fn threshold_errors() {
        assert!(matches!(
            threshold_weighted(&[(0, 1, 1.2)], 2),
            Err(DatagenError::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            threshold_weighted(&[(0, 1, f64::NAN)], 2),
            Err(DatagenError::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            threshold_weighted(&[(0, 1, 0.2), (1, 0, 0.7)], 2),
            Err(DatagenError::ConflictingWeight { .. })
        ));
        assert!(threshold_weighted(&[(0, 1, 0.7), (1, 0, 0.7)], 2).is_ok());
        assert!(matches!(
            threshold_weighted(&[(0, 2, 0.7)], 2),
            Err(DatagenError::Graph(GraphError::VertexOutOfRange { .. }))
        ));
    }
}
