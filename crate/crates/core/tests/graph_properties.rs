mod common;

use std::collections::{BTreeMap, BTreeSet};

use m1taut::graphs::{enumerate, enumerate_all, identity_matching, StableGraph};
use proptest::prelude::*;

#[test]
fn enumeration_matches_naive_search() {
    for n in 1..=4 {
        for c in 0..=n {
            let naive = common::naive_classes(n, c);
            let ours = enumerate(n, c);
            let keys: BTreeSet<Vec<u8>> = ours.iter().map(|g| common::NaiveGraph::from_stable(g).canonical()).collect();
            assert_eq!(keys.len(), ours.len(), "duplicate classes at n={n} codim={c}");
            assert_eq!(keys, naive, "n={n} codim={c}");
        }
    }
}

#[test]
fn relabeling_permutes_classes() {
    for n in 2..=4 {
        for level in enumerate_all(n) {
            let keys: BTreeSet<_> = level.iter().map(|g| g.canonical_form().unwrap()).collect();
            for sigma in common::all_permutations(n) {
                let moved: BTreeSet<_> =
                    level.iter().map(|g| g.relabel_legs(|l| sigma[l as usize - 1] as u32 + 1).canonical_form().unwrap()).collect();
                assert_eq!(moved, keys);
            }
        }
    }
}

#[test]
fn automorphism_routes_agree() {
    for n in 1..=4 {
        for level in enumerate_all(n) {
            for g in level {
                let auts = g.automorphisms();
                assert_eq!(auts.len() as u64, g.automorphism_count(), "{g}");
                let distinct: BTreeSet<_> = auts.iter().cloned().collect();
                assert_eq!(distinct.len(), auts.len());
                for a in &auts {
                    // legs fixed, vertex incidence and edge pairing preserved
                    for &h in g.legs().values() {
                        assert_eq!(a[h], h);
                    }
                    let edges: BTreeSet<(usize, usize)> = g.edges().iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
                    for &(x, y) in g.edges() {
                        let (u, v) = (a[x], a[y]);
                        assert!(edges.contains(&(u.min(v), u.max(v))));
                    }
                    let mut vmap = BTreeMap::new();
                    for (h, &image) in a.iter().enumerate() {
                        let prev = vmap.insert(g.half_edge_vertex(h), g.half_edge_vertex(image));
                        assert!(prev.is_none_or(|p| p == g.half_edge_vertex(image)));
                    }
                }
            }
        }
    }
}

#[test]
fn keys_roundtrip() {
    for level in enumerate_all(4) {
        for g in level {
            let k = g.canonical_form().unwrap();
            assert_eq!(StableGraph::from_key(&k).unwrap().canonical_form().unwrap(), k);
            assert_eq!(StableGraph::from_json(&g.to_half_edge_json()).unwrap(), g);
            assert_eq!(StableGraph::from_json(&g.to_json()).unwrap().canonical_form().unwrap(), k);
        }
    }
}

#[test]
fn codimension_counts_stay_within_bounds() {
    for n in 1..=5 {
        let levels = enumerate_all(n);
        assert_eq!(levels.len(), n + 1);
        assert!(enumerate(n, n + 1).is_empty());
        for (c, level) in levels.iter().enumerate() {
            assert!(!level.is_empty(), "n={n} codim={c}");
        }
    }
}

fn arb_graph() -> impl Strategy<Value = StableGraph> {
    (1usize..=4).prop_flat_map(|n| {
        let levels = enumerate_all(n);
        let all: Vec<StableGraph> = levels.into_iter().flatten().collect();
        proptest::sample::select(all)
    })
}

fn shuffle(g: &StableGraph, seed: u64) -> StableGraph {
    let nv = g.num_vertices();
    let nh = g.num_half_edges();
    let mut vperm: Vec<usize> = (0..nv).collect();
    let mut hperm: Vec<usize> = (0..nh).collect();
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 33) as usize
    };
    for i in (1..nv).rev() {
        vperm.swap(i, next() % (i + 1));
    }
    for i in (1..nh).rev() {
        hperm.swap(i, next() % (i + 1));
    }
    g.renumbered(&vperm, &hperm)
}

proptest! {
    #[test]
    fn keys_invariant_under_renumbering(g in arb_graph(), seed in any::<u64>()) {
        let h = shuffle(&g, seed);
        h.validate().unwrap();
        prop_assert_eq!(h.canonical_form().unwrap(), g.canonical_form().unwrap());
        prop_assert_eq!(h.automorphism_count(), g.automorphism_count());
    }

    #[test]
    fn substitution_respects_isomorphism(g in arb_graph(), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let v = pick.index(g.num_vertices());
        let degs = g.degenerations_at(v);
        prop_assume!(!degs.is_empty());
        let guest = &degs[seed as usize % degs.len()];
        let direct = g.substitute_vertex(v, guest, &identity_matching(guest)).unwrap();
        // an isomorphic copy of the guest with the same matching
        let copy = shuffle(guest, seed ^ 0x9e37);
        let via_copy = g.substitute_vertex(v, &copy, &identity_matching(&copy)).unwrap();
        prop_assert_eq!(direct.canonical_form().unwrap(), via_copy.canonical_form().unwrap());
        prop_assert_eq!(direct.codim(), g.codim() + 1);
    }

    #[test]
    fn distributed_legs_stay_valid(g in arb_graph(), extra in 0usize..3) {
        let out = g.distribute_legs(extra);
        prop_assert_eq!(out.len(), g.num_vertices().pow(extra as u32));
        for h in out {
            h.validate().unwrap();
            prop_assert_eq!(h.n(), g.n() + extra);
            prop_assert_eq!(h.codim(), g.codim());
        }
    }
}

#[test]
fn documented_layouts_agree() {
    let vertex: serde_json::Value = serde_json::from_str(
        r#"{"vertices": [{"genus": 1}, {"genus": 0}],
            "legs": [{"label": 1, "vertex": 1}, {"label": 2, "vertex": 1}],
            "edges": [[0, 1]]}"#,
    )
    .unwrap();
    let half: serde_json::Value = serde_json::from_str(
        r#"{"halfedges": {"genus": [1, 0], "vertex_of": [0, 1, 1, 1],
            "legs": [{"label": 1, "halfedge": 2}, {"label": 2, "halfedge": 3}],
            "edges": [[0, 1]]}}"#,
    )
    .unwrap();
    let a = StableGraph::from_json(&vertex).unwrap();
    let b = StableGraph::from_json(&half).unwrap();
    assert_eq!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
    assert_eq!(a.automorphism_count(), 1);
}
