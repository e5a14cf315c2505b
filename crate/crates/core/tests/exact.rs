mod common;

use ccq::datagen::{apply_noise, generate_planted, Family, FamilySpec, NoiseModel, NoiseSpec};
use ccq::exact::{lower_bound_ppm, solve_exact, ExactConfig, ExactError, Strategy};
use ccq::oracle::{make_optimal_oracle, opt_makes_mistake, Oracle};
use ccq::{count_disagreements, Clustering, SignedGraph};
use common::{brute_force, graph_corpus, random_clustering, rng};

fn config(strategy: Strategy) -> ExactConfig {
    ExactConfig {
        strategy,
        ..ExactConfig::default()
    }
}

#[test]
fn both_strategies_match_partition_enumeration() {
    for g in graph_corpus(200, 1..=9, 1) {
        let (cost, lexmin) = brute_force(&g);
        for strategy in [Strategy::Enumerate, Strategy::BranchAndBound] {
            let r = solve_exact(&g, &config(strategy)).unwrap();
            assert_eq!(r.cost, cost, "{strategy:?} on {g:?}");
            assert_eq!(
                r.clustering.assignment(),
                &lexmin[..],
                "{strategy:?} on {g:?}"
            );
            assert!(r.clustering.is_canonical());
        }
    }
}

#[test]
fn branch_and_bound_matches_enumeration_up_to_twelve() {
    for g in graph_corpus(12, 10..=12, 2) {
        let e = solve_exact(&g, &config(Strategy::Enumerate)).unwrap();
        let b = solve_exact(&g, &config(Strategy::BranchAndBound)).unwrap();
        assert_eq!(e.cost, b.cost);
        assert_eq!(e.clustering, b.clustering);
    }
}

#[test]
fn bounds_bracket_the_optimum() {
    for g in graph_corpus(150, 2..=9, 3) {
        let r = solve_exact(&g, &ExactConfig::default()).unwrap();
        assert!(lower_bound_ppm(&g) <= r.cost);
        assert!(r.cost <= g.plus_edge_count() as u64);
        assert_eq!(count_disagreements(&g, &r.clustering).unwrap(), r.cost);
    }
}

#[test]
fn no_random_clustering_beats_the_optimum() {
    let mut r = rng(4);
    for g in graph_corpus(30, 4..=9, 4) {
        let opt = solve_exact(&g, &ExactConfig::default()).unwrap().cost;
        for _ in 0..1000 {
            let c = random_clustering(g.n(), &mut r);
            assert!(opt <= count_disagreements(&g, &c).unwrap());
        }
    }
}

#[test]
fn optimal_mistakes_lie_in_ppm_triangles() {
    for g in graph_corpus(300, 3..=9, 5) {
        let c = solve_exact(&g, &ExactConfig::default()).unwrap().clustering;
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                if g.is_plus(u, v) != c.same_cluster(u, v) {
                    assert!(g.edge_in_ppm_triangle(u, v), "({u}, {v}) in {g:?}");
                }
            }
        }
    }
}

#[test]
fn optimal_oracle_mistake_set_has_size_c_opt() {
    for g in graph_corpus(60, 3..=8, 6) {
        let (cost, _) = brute_force(&g);
        let mut oracle = make_optimal_oracle(&g, &ExactConfig::default()).unwrap();
        let mut mistakes = 0;
        let mut asked = 0;
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                mistakes += opt_makes_mistake(&mut oracle, &g, u, v).unwrap() as u64;
                asked += 1;
            }
        }
        assert_eq!(mistakes, cost);
        assert_eq!(oracle.queries(), asked);
    }
}

#[test]
fn planted_instances_of_moderate_size() {
    for seed in 0..4 {
        let truth = Clustering::from_assignment((0..30).map(|v| v / 6).collect());
        let clean = truth.to_graph();
        let noisy = apply_noise(
            &clean,
            &truth,
            &NoiseSpec {
                flips: 12,
                ..NoiseSpec::small(NoiseModel::Uniform, seed)
            },
        )
        .unwrap();
        let r = solve_exact(&noisy, &ExactConfig::default()).unwrap();
        assert!(r.cost <= 12);
        assert!(lower_bound_ppm(&noisy) <= r.cost);
        assert!(r.clustering.is_canonical());
    }
}

#[test]
fn tiny_budget_is_an_error_not_an_answer() {
    let g = ccq::datagen::random_signed_graph(40, 0.5, 7);
    let err = solve_exact(&g, &ExactConfig::with_budget(1_000)).unwrap_err();
    let ExactError::BudgetExhausted {
        n,
        budget,
        lower_bound,
        best_known,
    } = err;
    assert_eq!((n, budget), (40, 1_000));
    assert!(lower_bound <= best_known);
}

#[test]
fn relabeling_preserves_the_cost() {
    let (g, truth) =
        generate_planted(&FamilySpec::new(Family::Explicit(vec![4, 3, 3, 2]), 0)).unwrap();
    let g = apply_noise(
        &g,
        &truth,
        &NoiseSpec {
            flips: 8,
            ..NoiseSpec::small(NoiseModel::Uniform, 3)
        },
    )
    .unwrap();
    let n = g.n();
    let reversed =
        SignedGraph::new(n, g.plus_edges().map(|(u, v)| (n - 1 - u, n - 1 - v))).unwrap();
    let a = solve_exact(&g, &config(Strategy::BranchAndBound)).unwrap();
    let b = solve_exact(&reversed, &config(Strategy::BranchAndBound)).unwrap();
    assert_eq!(a.cost, b.cost);
}
