use ccq::datagen::{
    apply_noise, apply_noise_report, format_graph, generate_planted, parse_graph, parse_weighted,
    read_graph, threshold_weighted, write_graph, Family, FamilySpec, NoiseModel, NoiseSpec,
};
use ccq::{count_disagreements, Clustering, SignedGraph};
use std::collections::BTreeMap;

/// Per-cluster intra flips and total inter flips between `before` and `after`.
fn flip_profile(
    before: &SignedGraph,
    after: &SignedGraph,
    truth: &Clustering,
) -> (BTreeMap<usize, u64>, BTreeMap<(usize, usize), u64>) {
    let a = truth.assignment();
    let mut intra = BTreeMap::new();
    let mut inter = BTreeMap::new();
    for c in a {
        intra.insert(*c, 0);
    }
    for u in 0..before.n() {
        for v in u + 1..before.n() {
            if before.is_plus(u, v) != after.is_plus(u, v) {
                if a[u] == a[v] {
                    *intra.get_mut(&a[u]).unwrap() += 1;
                } else {
                    *inter.entry((a[u].min(a[v]), a[u].max(a[v]))).or_insert(0) += 1;
                }
            }
        }
    }
    (intra, inter)
}

fn sizes(truth: &Clustering) -> BTreeMap<usize, u64> {
    let mut m = BTreeMap::new();
    for &c in truth.assignment() {
        *m.entry(c).or_insert(0) += 1;
    }
    m
}

#[test]
fn model_two_on_s_family_flips_the_clique_formula() {
    for seed in 0..5 {
        let (g, truth) = generate_planted(&FamilySpec::new(Family::Skewed, seed)).unwrap();
        let noisy = apply_noise(
            &g,
            &truth,
            &NoiseSpec::small(NoiseModel::IntraCluster, seed),
        )
        .unwrap();
        let (intra, inter) = flip_profile(&g, &noisy, &truth);
        assert!(inter.is_empty());
        let k = sizes(&truth).len() as u64;
        assert_eq!(k, 10);
        for (c, size) in sizes(&truth) {
            assert_eq!(
                intra[&c],
                (100 / k).min(size - 1),
                "cluster {c} of size {size}"
            );
        }
        let counts: Vec<u64> = intra.values().copied().collect();
        assert_eq!(counts, vec![4, 4, 4, 4, 4, 10, 10, 10, 10, 10]);
    }
}

#[test]
fn model_three_adds_ceil_share_between_every_pair() {
    for family in [
        Family::Skewed,
        Family::Explicit(vec![10, 10]),
        Family::Explicit(vec![7, 3, 12, 1]),
    ] {
        let (g, truth) = generate_planted(&FamilySpec::new(family, 2)).unwrap();
        let noisy = apply_noise(&g, &truth, &NoiseSpec::small(NoiseModel::IntraInter, 2)).unwrap();
        let (intra, inter) = flip_profile(&g, &noisy, &truth);
        let sz = sizes(&truth);
        let k = sz.len() as u64;
        for (&c, &s) in &sz {
            assert_eq!(intra[&c], (100 / k).min(s.saturating_sub(1)));
            for (&d, &t) in sz.range(c + 1..) {
                let expected = (0.01 * (s * t) as f64).ceil() as u64;
                assert_eq!(inter.get(&(c, d)).copied().unwrap_or(0), expected);
            }
        }
    }
}

#[test]
fn model_one_flips_exactly_l_pairs() {
    for (seed, flips) in [(0u64, 0u64), (1, 1), (2, 100), (3, 250)] {
        let (g, truth) =
            generate_planted(&FamilySpec::new(Family::by_name("N", None).unwrap(), seed)).unwrap();
        let spec = NoiseSpec {
            flips,
            ..NoiseSpec::small(NoiseModel::Uniform, seed)
        };
        let report = apply_noise_report(&g, &truth, &spec).unwrap();
        let (intra, inter) = flip_profile(&g, &report.graph, &truth);
        let total: u64 = intra.values().sum::<u64>() + inter.values().sum::<u64>();
        assert_eq!(total, flips);
        assert_eq!(report.flipped.len() as u64, flips);
        assert!(report.clamped.is_empty());
        assert_eq!(count_disagreements(&report.graph, &truth).unwrap(), flips);
    }
}

#[test]
fn noise_is_deterministic_in_the_seed() {
    let (g, truth) =
        generate_planted(&FamilySpec::new(Family::by_name("D", None).unwrap(), 4)).unwrap();
    for model in [
        NoiseModel::Uniform,
        NoiseModel::IntraCluster,
        NoiseModel::IntraInter,
    ] {
        let a = apply_noise(&g, &truth, &NoiseSpec::small(model, 9)).unwrap();
        let b = apply_noise(&g, &truth, &NoiseSpec::small(model, 9)).unwrap();
        let c = apply_noise(&g, &truth, &NoiseSpec::small(model, 10)).unwrap();
        assert_eq!(format_graph(&a), format_graph(&b));
        assert_ne!(format_graph(&a), format_graph(&c));
    }
}

#[test]
fn family_shapes() {
    let s = FamilySpec::new(Family::Skewed, 0).cluster_sizes().unwrap();
    assert_eq!(s, vec![5, 5, 5, 5, 5, 15, 15, 15, 15, 30]);

    let (g, truth) = generate_planted(&FamilySpec::new(
        Family::by_name("sqrtn", Some(900)).unwrap(),
        0,
    ))
    .unwrap();
    assert_eq!(g.n(), 900);
    assert!(sizes(&truth).values().all(|&s| s == 30));
    assert_eq!(sizes(&truth).len(), 30);

    for seed in 0..20 {
        let n = FamilySpec::new(Family::by_name("N", None).unwrap(), seed)
            .cluster_sizes()
            .unwrap();
        assert_eq!(n.len(), 10);
        assert!(n.iter().all(|&s| s >= 2));
        let d = FamilySpec::new(Family::by_name("D", None).unwrap(), seed)
            .cluster_sizes()
            .unwrap();
        assert_eq!((d.len(), d.iter().sum::<usize>()), (3, 100));
        for family in [
            Family::by_name("skew", Some(400)).unwrap(),
            Family::Explicit(vec![3, 1, 4]),
        ] {
            let (g, truth) = generate_planted(&FamilySpec::new(family, seed)).unwrap();
            assert_eq!(count_disagreements(&g, &truth).unwrap(), 0);
        }
    }
}

#[test]
fn a_hundred_instances_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100u64 {
        let family = [
            Family::Skewed,
            Family::by_name("N", None).unwrap(),
            Family::by_name("D", None).unwrap(),
        ][seed as usize % 3]
            .clone();
        let model = [
            NoiseModel::Uniform,
            NoiseModel::IntraCluster,
            NoiseModel::IntraInter,
        ][seed as usize / 3 % 3];
        let (g, truth) = generate_planted(&FamilySpec::new(family, seed)).unwrap();
        let g = apply_noise(&g, &truth, &NoiseSpec::small(model, seed)).unwrap();
        let path = dir.path().join(format!("{seed}.graph"));
        write_graph(&g, &path).unwrap();
        let back = read_graph(&path).unwrap();
        assert_eq!(back.n(), g.n());
        assert!(back.plus_edges().eq(g.plus_edges()));
    }
}

#[test]
fn weighted_input_thresholds_at_one_half() {
    let g = parse_weighted("4 4\n0 1 0.73\n1 2 0.5\n2 3 0.499\n0 3 0\n").unwrap();
    assert!(g.is_plus(0, 1) && g.is_plus(1, 2));
    assert!(!g.is_plus(2, 3) && !g.is_plus(0, 3) && !g.is_plus(0, 2));
    assert!(threshold_weighted(&[(0, 1, 1.2)], 2).is_err());
    assert!(threshold_weighted(&[(0, 1, 0.2), (1, 0, 0.7)], 2).is_err());
    assert!(threshold_weighted(&[(0, 1, 0.7), (1, 0, 0.7)], 2)
        .unwrap()
        .is_plus(0, 1));
}

#[test]
fn minimal_graph_file() {
    let g = parse_graph("3 1\n0 1 +\n").unwrap();
    assert_eq!((g.n(), g.plus_edge_count()), (3, 1));
    assert!(g.is_plus(1, 0));
}
