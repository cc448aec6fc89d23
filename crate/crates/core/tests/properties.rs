use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use selfcontained::dsl::{emit_spec, graph_or_panic, parse_graph_spec};
use selfcontained::window::{ball, index_box, link};
use selfcontained::zoo::{Zoo, ZooEntry};
use selfcontained::{DegreeValue, GraphOracle, VertexId};

const ENTRIES: [&str; 12] = [
    "complete_inf",
    "double_ray",
    "empty_inf",
    "example11a",
    "example15",
    "example9",
    "grid",
    "infinite_star",
    "rado",
    "ray",
    "rhomb_star",
    "roller_brush",
];

fn entry(i: usize) -> ZooEntry {
    Zoo::builtin().get(ENTRIES[i % ENTRIES.len()]).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

/// A random spec on one unary sort: a lower domain bound, then `m = n + step`
/// rules filtered by a residue class.
fn spec_strategy() -> impl Strategy<Value = String> {
    (
        -3i64..=3,
        prop::collection::vec((1i64..=4, 1i64..=3, 0i64..3, any::<bool>()), 1..4),
    )
        .prop_map(|(lo, rules)| {
            let mut s = format!("graph random\nsort v arity 1 where x1 >= {lo}\n");
            for (step, modulus, residue, filtered) in rules {
                if filtered && modulus > 1 {
                    let r = residue % modulus;
                    s.push_str(&format!(
                        "edge v(n) ~ v(m) when m = n + {step} and n mod {modulus} = {r}\n"
                    ));
                } else {
                    s.push_str(&format!("edge v(n) ~ v(m) when m = n + {step}\n"));
                }
            }
            s
        })
}

fn sort_name() -> impl Strategy<Value = String> {
    prop_oneof!["[a-z][a-z0-9]{0,4}", "[a-z]{1,3}_x_[a-z]{1,3}"]
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn windows_are_symmetric_and_faithful(i in 0usize..12, radius in 0usize..4) {
        let e = entry(i);
        let w = e.window(radius).unwrap();
        for a in 0..w.len() {
            prop_assert!(!w.has_edge(a, a));
            for b in 0..w.len() {
                prop_assert_eq!(w.has_edge(a, b), w.has_edge(b, a));
                let truth = e.graph.adjacent(&w.vertices()[a], &w.vertices()[b]).unwrap();
                prop_assert_eq!(w.has_edge(a, b), truth);
            }
        }
    }

    #[test]
    fn complement_is_an_involution(i in 0usize..12, lo in -3i64..=0, width in 0i64..4) {
        let g = entry(i).graph;
        let c = g.complement();
        let cc = c.complement();
        let vs = g.vertices_in_box(lo, lo + width).unwrap();
        for u in &vs {
            for v in &vs {
                let a = g.adjacent(u, v).unwrap();
                prop_assert_eq!(cc.adjacent(u, v).unwrap(), a);
                prop_assert_eq!(c.adjacent(u, v).unwrap(), u != v && !a);
            }
        }
    }

    #[test]
    fn removing_a_set_restricts_adjacency(i in 0usize..12, k in 0usize..4) {
        let e = entry(i);
        prop_assume!(!e.certificates.is_empty());
        let c = &e.certificates[k % e.certificates.len()].cert;
        let rest = c.host.minus(&c.removed).unwrap();
        let vs = c.host.vertices_in_box(-3, 3).unwrap();
        for u in &vs {
            prop_assert_eq!(rest.is_vertex(u), !c.removed.contains(u));
            for v in &vs {
                if rest.is_vertex(u) && rest.is_vertex(v) {
                    prop_assert_eq!(rest.adjacent(u, v).unwrap(), c.host.adjacent(u, v).unwrap());
                }
            }
        }
    }

    #[test]
    fn product_degree_is_additive(a in 0usize..12, b in 0usize..12, x in 0usize..20, y in 0usize..20) {
        let (g, h) = (entry(a).graph, entry(b).graph);
        let gv = g.vertices_in_box(-3, 3).unwrap();
        let hv = h.vertices_in_box(-3, 3).unwrap();
        prop_assume!(!gv.is_empty() && !hv.is_empty());
        let (u, v) = (&gv[x % gv.len()], &hv[y % hv.len()]);
        let p = g.cartesian_product(&h);
        let mut idx = u.index.clone();
        idx.extend(&v.index);
        let pv = VertexId::new(GraphOracle::product_sort(&u.sort, &v.sort), idx);
        let want = g.degree(u).unwrap() + h.degree(v).unwrap();
        prop_assert_eq!(p.degree(&pv).unwrap(), want);
        if let DegreeValue::Finite(d) = want {
            let nb = p.neighbors(&pv).unwrap().unwrap();
            prop_assert_eq!(nb.len() as u64, d);
        }
    }

    #[test]
    fn link_partitions_window_edges(i in 0usize..12, k in 0usize..4, radius in 1usize..4) {
        let e = entry(i);
        prop_assume!(e.native_certificates().count() > 0);
        let certs: Vec<_> = e.native_certificates().collect();
        let c = &certs[k % certs.len()].cert;
        let w = e.window(radius).unwrap();
        let l: BTreeSet<_> = link(&e.graph, &c.removed, &w).unwrap().into_iter().collect();
        let inside = w.edge_pairs().into_iter().filter(|(a, b)| c.removed.contains(a) && c.removed.contains(b)).count();
        let outside = w.edge_pairs().into_iter().filter(|(a, b)| !c.removed.contains(a) && !c.removed.contains(b)).count();
        prop_assert_eq!(l.len() + inside + outside, w.edges().len());
        for (a, b) in &l {
            prop_assert!(c.removed.contains(a) != c.removed.contains(b));
        }
    }

    #[test]
    fn dsl_round_trip_keeps_adjacency(src in spec_strategy()) {
        let g1 = parse_graph_spec(&src).unwrap().value;
        let text = emit_spec(&g1);
        let g2 = parse_graph_spec(&text).unwrap().value;
        let (w1, w2) = (index_box(&g1, -8, 8).unwrap(), index_box(&g2, -8, 8).unwrap());
        prop_assert_eq!(w1.vertices(), w2.vertices());
        prop_assert_eq!(w1.edge_pairs(), w2.edge_pairs());
        prop_assert_eq!(emit_spec(&g2), text);
    }

    #[test]
    fn vertex_names_round_trip(sort in sort_name(), index in prop::collection::vec(-1000i64..1000, 0..4)) {
        // a bare sort ending in `_<int>` would read back as unary
        prop_assume!(!(index.is_empty() && sort.rsplit_once('_').is_some_and(|(_, r)| r.parse::<i64>().is_ok())));
        let v = VertexId::new(sort, index);
        let s = v.to_string();
        prop_assert_eq!(s.parse::<VertexId>().unwrap(), v.clone());
        let j = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<VertexId>(&j).unwrap(), v);
    }

    #[test]
    fn balls_grow_with_radius(i in 0usize..12, r in 0usize..3) {
        let e = entry(i);
        let small = e.window(r).unwrap();
        let big = e.window(r + 1).unwrap();
        for v in small.vertices() {
            prop_assert!(big.contains(v));
        }
        for root in &e.roots {
            prop_assert!(small.contains(root));
        }
    }
}

#[test]
fn double_complement_matches_on_a_ball() {
    let g = Arc::new(graph_or_panic(
        "graph p\nsort v arity 1 where x1 >= 0\nedge v(n) ~ v(m) when m = n + 1\n",
    ));
    let cc = g.complement().complement();
    let w = ball(&g, &[VertexId::new("v", vec![0])], 5).unwrap();
    for u in w.vertices() {
        for v in w.vertices() {
            assert_eq!(cc.adjacent(u, v).unwrap(), g.adjacent(u, v).unwrap());
        }
    }
}
