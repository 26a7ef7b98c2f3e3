//! Property tests of cross-module invariants.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use mmcut::aggregation::{aggregate, AggregateParams};
use mmcut::graph::{cut_weight, Graph, Partition};
use mmcut::instances::{gen_random, recursive_boost, Family};
use mmcut::io::{parse_edgelist, parse_json, to_edgelist, to_json, LabeledGraph};
use mmcut::pipeline::{run_minmax_kpart, PipelineConfig};
use mmcut::rng::stream;
use mmcut::sse::Backend;

fn family(kind: u8, n: usize) -> Family {
    match kind % 3 {
        0 => Family::Gnp { n, p: 0.4 },
        1 => Family::Tree { n },
        _ => Family::Planar { n },
    }
}

fn assert_covers(n: usize, p: &Partition) {
    let mut seen = vec![0; n];
    for part in &p.parts {
        for &v in part {
            seen[v] += 1;
        }
    }
    assert!(seen.iter().all(|&c| c == 1), "not a partition: {seen:?}");
}

/// Random sets of at most `n/k` vertices, topped up with singletons so every
/// vertex is covered at least once.
fn random_cover(n: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = stream(seed, "cover");
    let mut verts: Vec<usize> = (0..n).collect();
    let mut sets = Vec::new();
    for _ in 0..count {
        verts.shuffle(&mut rng);
        let size = rng.random_range(1..=n / k);
        sets.push(verts[..size].to_vec());
    }
    let mut hit = vec![false; n];
    for s in &sets {
        for &v in s {
            hit[v] = true;
        }
    }
    sets.extend((0..n).filter(|&v| !hit[v]).map(|v| vec![v]));
    sets
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn aggregation_respects_its_caps(kind in 0u8..3, n in 6usize..16, k in 2usize..4, count in 4usize..24, seed in 0u64..1000, eps in 0.1f64..1.0) {
        let g = gen_random(&family(kind, n), 3, seed).unwrap();
        let sets = random_cover(n, k, count, seed);
        let mut hits = vec![0usize; n];
        for s in &sets {
            for &v in s {
                hits[v] += 1;
            }
        }
        let c = (*hits.iter().min().unwrap() as f64 * k as f64 / sets.len() as f64).min(1.0);
        let b = sets.iter().map(|s| cut_weight(&g, s).unwrap()).fold(0.0, f64::max);
        let params = AggregateParams { k, c, b, epsilon: eps };
        let a = aggregate(&g, &sets, params, &mut stream(seed, "aggregate"), None).unwrap();
        assert_covers(n, &a.partition);
        prop_assert!(a.partition.num_nonempty() <= k);
        prop_assert!(a.partition.max_size() as f64 <= 2.0 * (1.0 + eps) * n as f64 / k as f64 + 1e-9);
        prop_assert!(a.b_prime >= 2.0 * b);
        prop_assert!(a.partition.max_cut(&g) <= 2.0 * a.b_prime / eps + 1e-9);
    }

    #[test]
    fn boosting_with_a_chunking_solver(k in 10usize..60, per in 1usize..4, half in any::<bool>()) {
        let eps = if half { 0.5 } else { 1.0 };
        let n = k * per;
        let g = Graph::new(n, (1..n).map(|v| (v - 1, v, 1.0))).unwrap();
        // consecutive chunks of the cap: at most `parts` parts since cap ≥ ⌈n/parts⌉
        let mut solver = |h: &Graph, parts: usize, cap: usize| {
            let chunks: Vec<Vec<usize>> = (0..h.n()).collect::<Vec<_>>().chunks(cap).map(<[usize]>::to_vec).collect();
            assert!(chunks.len() <= parts);
            Partition::from_parts(h.n(), chunks)
        };
        let r = recursive_boost(&g, k, eps, &mut solver).unwrap();
        assert_covers(n, &r.partition);
        prop_assert_eq!(r.instance_counts.len(), r.schedule.depth + 1);
        prop_assert!(r.partition.num_nonempty() <= k);
        prop_assert!(r.partition.max_size() as f64 <= 3f64.powf(2.0 / eps) * n as f64 / k as f64 + 1e-9);
        if k as f64 > 3f64.powf(2.0 / eps) {
            prop_assert!(r.schedule.depth > 0);
        }
    }

    #[test]
    fn exact_pipeline_is_seeded(kind in 0u8..3, m in 3usize..5, k in 2usize..4, seed in 0u64..100) {
        let n = m * k;
        let g = gen_random(&family(kind, n), 2, seed).unwrap();
        let cfg = PipelineConfig::new(Backend::Exact, 0.25, seed);
        let a = run_minmax_kpart(&g, k, &cfg, None).unwrap();
        let b = run_minmax_kpart(&g, k, &cfg, None).unwrap();
        prop_assert_eq!(&a.partition, &b.partition);
        assert_covers(n, &a.partition);
        prop_assert!(a.partition.num_nonempty() <= k);
        prop_assert!(a.partition.max_size() as f64 <= 2.0 * 1.25 * n as f64 / k as f64 + 1e-9);
    }

    #[test]
    fn graph_files_round_trip(kind in 0u8..3, n in 3usize..20, w in 1u32..5, seed in 0u64..1000) {
        let g = LabeledGraph::unlabeled(gen_random(&family(kind, n), w, seed).unwrap());
        let e = parse_edgelist(&to_edgelist(&g)).unwrap();
        let j = parse_json(&to_json(&g).unwrap()).unwrap();
        prop_assert_eq!(j.graph.edges(), g.graph.edges());
        prop_assert_eq!(&j.labels, &g.labels);
        // edge-list labels are renumbered by first appearance
        let mut rng = stream(seed, "probe");
        for _ in 0..8 {
            let set: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
            let mapped: Vec<usize> = set.iter().map(|&v| e.index(&g.labels[v]).unwrap()).collect();
            let (x, y) = (cut_weight(&g.graph, &set).unwrap(), cut_weight(&e.graph, &mapped).unwrap());
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
