use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treesq::product::{
    bounds, bounds_from_degrees, colour_product, mixed_radix_decode, mixed_radix_encode,
    span_offsets, total_span_bound, wrap, ProductInstance,
};
use treesq::spancol::{colour_tree_square, Colour};
use treesq::tree::{prufer_decode, prufer_encode, random_tree, tree_from_edges, Tree};
use treesq::verify::{
    build_product_graph, check_proper, check_spans, chi_exact, chi_exact_seeded,
    clique_certificate, square, ExplicitGraph,
};

const CAP: usize = 100_000;

fn arb_tree(max_n: usize) -> impl Strategy<Value = Tree> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0..n, n - 2).prop_map(|seq| prufer_decode(&seq).unwrap())
    })
}

fn arb_instance(max_d: usize, max_n: usize) -> impl Strategy<Value = ProductInstance> {
    prop::collection::vec(arb_tree(max_n), 1..=max_d)
        .prop_map(|trees| ProductInstance::new(trees).unwrap())
}

fn explicit_square(instance: &ProductInstance) -> ExplicitGraph {
    square(&build_product_graph(instance, CAP).unwrap(), CAP).unwrap()
}

/// Plain backtracking over vertices in index order, trying every colour.
fn naive_colourable(g: &ExplicitGraph, k: usize, colour: &mut Vec<usize>) -> bool {
    let v = colour.len();
    if v == g.n() {
        return true;
    }
    for c in 0..k {
        if g.neighbours(v).iter().all(|&w| w >= v || colour[w] != c) {
            colour.push(c);
            if naive_colourable(g, k, colour) {
                return true;
            }
            colour.pop();
        }
    }
    false
}

fn naive_chi(g: &ExplicitGraph) -> usize {
    (0..=g.n())
        .find(|&k| naive_colourable(g, k, &mut Vec::new()))
        .unwrap()
}

fn distinct(colours: &[Colour]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trees_are_valid(t in arb_tree(20)) {
        prop_assert_eq!(t.edges().len(), t.n() - 1);
        prop_assert_eq!(t.bfs(0).0.len(), t.n());
        let delta = t.max_degree();
        prop_assert!(delta >= 1 && delta < t.n());
        prop_assert_eq!(delta, (0..t.n()).map(|v| t.neighbours(v).len()).max().unwrap());
        prop_assert_eq!(tree_from_edges(t.edges()).unwrap(), t);
    }

    #[test]
    fn prufer_round_trip(seq in (0usize..=10).prop_flat_map(|len| prop::collection::vec(0..len + 2, len))) {
        prop_assert_eq!(prufer_encode(&prufer_decode(&seq).unwrap()), seq);
    }

    #[test]
    fn random_trees_are_valid(n in 2usize..40, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(n, &mut rng);
        prop_assert_eq!(t.n(), n);
        prop_assert_eq!(t.bfs(0).0.len(), n);
    }

    #[test]
    fn tree_colouring_is_proper_and_span_confined(t in arb_tree(12), s in prop::sample::select(vec![0u64, 1, 2, 5])) {
        let c = colour_tree_square(&t, s).unwrap();
        let sq = square(&ExplicitGraph::from_tree(&t), CAP).unwrap();
        prop_assert!(check_proper(&sq, c.colours()).unwrap().is_ok());
        let hi = s + (t.max_degree() as u64).div_ceil(2);
        for &(u, v) in t.edges() {
            let span = c.colour(u).abs_diff(c.colour(v));
            prop_assert!(span > s && span <= hi);
        }
        prop_assert_eq!(c.colour(0), 0);
        prop_assert_eq!(&c, &colour_tree_square(&t, s).unwrap());
    }

    #[test]
    fn mixed_radix_bijection(dims in prop::collection::vec(1usize..6, 1..5), seed: usize) {
        let total: usize = dims.iter().product();
        let flat = seed % total;
        let coords = mixed_radix_decode(flat, &dims).unwrap();
        prop_assert!(coords.iter().zip(&dims).all(|(c, n)| c < n));
        prop_assert_eq!(mixed_radix_encode(&coords, &dims).unwrap(), flat);
    }

    #[test]
    fn windows_partition_span_range(inst in arb_instance(4, 10)) {
        let s = span_offsets(&inst);
        let big_s = total_span_bound(&inst);
        let mut covered = Vec::new();
        for (i, t) in inst.trees().iter().enumerate() {
            let half = (t.max_degree() as u64).div_ceil(2);
            covered.extend(s[i] + 1..=s[i] + half);
        }
        prop_assert_eq!(covered, (1..=big_s).collect::<Vec<_>>());
    }

    #[test]
    fn spans_identify_dimension(inst in arb_instance(3, 7)) {
        let pc = colour_product(&inst).unwrap();
        let colours = pc.colours().unwrap();
        prop_assert!(check_spans(&inst, colours).unwrap().is_ok());
        let s = span_offsets(&inst);
        let strides = inst.strides();
        let g = build_product_graph(&inst, CAP).unwrap();
        for (u, v) in g.edges() {
            let dim = (0..inst.dimension())
                .find(|&i| (u / strides[i]) % inst.dims()[i] != (v / strides[i]) % inst.dims()[i])
                .unwrap();
            let span = colours[u].abs_diff(colours[v]);
            let owners: Vec<usize> = (0..inst.dimension())
                .filter(|&i| {
                    let half = (inst.tree(i).max_degree() as u64).div_ceil(2);
                    span > s[i] && span <= s[i] + half
                })
                .collect();
            prop_assert_eq!(owners, vec![dim]);
        }
    }

    #[test]
    fn wrapped_colouring_within_upper_bound(inst in arb_instance(3, 8)) {
        let b = bounds(&inst);
        let w = wrap(&colour_product(&inst).unwrap()).unwrap();
        let used = w.distinct_colours() as u64;
        prop_assert!(used <= b.upper);
        if inst.max_degrees().iter().all(|d| d % 2 == 0) {
            prop_assert_eq!(used, b.lower);
        }
        prop_assert!(check_proper(&explicit_square(&inst), w.colours().unwrap()).unwrap().is_ok());
    }

    #[test]
    fn unwrapped_colouring_is_proper(inst in arb_instance(3, 7)) {
        let pc = colour_product(&inst).unwrap();
        let sq = explicit_square(&inst);
        prop_assert!(check_proper(&sq, pc.colours().unwrap()).unwrap().is_ok());
    }

    #[test]
    fn square_contains_product(inst in arb_instance(3, 6)) {
        let g = build_product_graph(&inst, CAP).unwrap();
        let sq = square(&g, CAP).unwrap();
        prop_assert!(g.edges().all(|(u, v)| sq.has_edge(u, v)));
        for v in 0..g.n() {
            prop_assert!(!sq.neighbours(v).contains(&v));
            for &w in sq.neighbours(v) {
                prop_assert!(sq.has_edge(w, v));
            }
        }
    }

    #[test]
    fn bounds_ordering(degrees in prop::collection::vec(1usize..15, 1..5)) {
        let b = bounds_from_degrees(&degrees);
        prop_assert!(b.lower <= b.upper);
        if degrees.iter().all(|d| d % 2 == 0) {
            prop_assert_eq!(b.lower, b.upper);
        }
        if let Some(jmv) = b.jmv {
            prop_assert!(b.upper <= jmv);
            prop_assert_eq!(b.upper == jmv, degrees.iter().all(|&d| d == 2 || d == 3));
        } else {
            prop_assert!(degrees.contains(&1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Lower bound <= chi <= colours used <= upper bound, with the clique certificate checked on the explicit
    /// square and the exact search cross-checked against naive backtracking.
    #[test]
    fn sandwich_on_small_products(inst in arb_instance(3, 4).prop_filter("small", |i| i.total() <= 18)) {
        let b = bounds(&inst);
        let sq = explicit_square(&inst);
        let cert = clique_certificate(&inst);
        prop_assert!(cert.verify_in(&sq));
        prop_assert_eq!(cert.size() as u64, b.lower);

        let chi = chi_exact(&sq, 64).unwrap();
        prop_assert_eq!(chi, naive_chi(&sq));
        prop_assert_eq!(chi_exact_seeded(&sq, 64, &cert.members).unwrap(), chi);

        let used = wrap(&colour_product(&inst).unwrap()).unwrap().distinct_colours();
        prop_assert!(b.lower as usize <= chi && chi <= used && used as u64 <= b.upper);
    }
}

#[test]
fn naive_and_exact_agree_on_assorted_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..12 {
        let t = random_tree(n, &mut rng);
        let g = ExplicitGraph::from_tree(&t);
        for graph in [g.clone(), square(&g, CAP).unwrap()] {
            assert_eq!(chi_exact(&graph, 64).unwrap(), naive_chi(&graph));
        }
    }
}

#[test]
fn star_times_edge_is_between_bounds() {
    let star = tree_from_edges(&[(0, 1), (0, 2), (0, 3)]).unwrap();
    let edge = tree_from_edges(&[(0, 1)]).unwrap();
    let inst = ProductInstance::new(vec![star, edge]).unwrap();
    let b = bounds(&inst);
    assert_eq!((b.lower, b.upper), (5, 7));
    let sq = explicit_square(&inst);
    let chi = chi_exact(&sq, 64).unwrap();
    assert_eq!(chi, naive_chi(&sq));
    assert!((5..=7).contains(&chi));
    assert_eq!(
        distinct(
            wrap(&colour_product(&inst).unwrap())
                .unwrap()
                .colours()
                .unwrap()
        ) as u64,
        7
    );
}
