//! Acceptance suite: one pass/fail line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use selfcontained::dsl::{emit_spec, parse_graph_spec};
use selfcontained::embedding::{complement_transfer, iterate_copies, product_lift, verify_certificate};
use selfcontained::finite::{induced_isomorphic, induced_isomorphic_seeded, Mapping};
use selfcontained::guard::Guard;
use selfcontained::oracle::{AdjacencyRule, IndexBound, SortDecl};
use selfcontained::ray::{build_ray, IterateCover};
use selfcontained::structure::{
    census_obstruction, conjecture2_probe, covering_check, foundation_monotonicity_check, monomer_check,
    relative_foundation, torsion, torsion_monotonicity_check, torsion_symmetry_check, CensusVerdict, Outcome,
    ProbeOutcome,
};
use selfcontained::window::{ball, index_box, subset};
use selfcontained::zoo::{census_case, Zoo, ZooCertificate, ZooEntry};
use selfcontained::{FiniteWindow, GraphOracle, IsoCertificate, VertexId};

type Check = Result<String, String>;
type Snapshot = (Vec<VertexId>, Vec<(VertexId, VertexId)>);
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

trait Ctx<T> {
    fn ctx(self, what: &str) -> Result<T, String>;
}

impl<T, E: std::fmt::Display> Ctx<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

fn vx(s: &str) -> VertexId {
    s.parse().unwrap_or_else(|e| panic!("bad vertex literal {s}: {e:?}"))
}

fn entry(name: &str) -> Result<ZooEntry, String> {
    Zoo::builtin().get(name).ctx(name)
}

fn all_entries() -> Result<Vec<ZooEntry>, String> {
    let z = Zoo::builtin();
    z.list().ctx("list")?.iter().map(|n| z.get(n).ctx(n)).collect()
}

/// Every certificate in the zoo, foundation-graph ones included.
fn all_certificates() -> Result<Vec<(String, ZooCertificate)>, String> {
    let mut out = Vec::new();
    for e in all_entries()? {
        for c in &e.certificates {
            out.push((e.name.clone(), c.clone()));
        }
        if let Some(fg) = &e.foundation_graph {
            for c in &fg.certificates {
                out.push((format!("{}/foundation", e.name), c.clone()));
            }
        }
    }
    Ok(out)
}

fn c1_torsion_ground_truth() -> Check {
    let e = entry("example15")?;
    let w = ball(&e.graph, &[vx("z_0")], 8).ctx("ball")?;
    let r = torsion(e.family().ctx("family")?, e.certificate("a1").ctx("a1")?, 8, &w).ctx("torsion")?;
    ensure!(r.torsion_rel == vec![vx("b_1")], "torsion {:?}", r.torsion_rel);
    ensure!(r.exact, "not flagged exact");
    ensure!(r.definition_agrees, "image formula disagrees with the definition");
    Ok(format!("Tor = {{b_1}} on {} vertices", r.window_size))
}

fn c2_foundation_ground_truths() -> Check {
    type Pred = fn(&VertexId) -> bool;
    let cases: [(&str, Pred); 4] = [
        ("example9", |v| v.sort == "v" && v.index == [0]),
        ("grid", |_| false),
        ("example11a", |v| v.sort == "a1"),
        ("roller_brush", |v| v.sort == "apex"),
    ];
    let mut sizes = Vec::new();
    for (name, truth) in cases {
        let e = entry(name)?;
        let w = e.window(8).ctx("window")?;
        let depth = e.depth_for(&w);
        let r = relative_foundation(e.family().ctx(name)?, depth, &w).ctx(name)?;
        let expected: Vec<VertexId> = w.vertices().iter().filter(|v| truth(v)).cloned().collect();
        ensure!(
            r.foundation_rel == expected,
            "{name}: got {:?}, expected {:?}",
            r.foundation_rel,
            expected
        );
        ensure!(r.exact, "{name}: depth {depth} below required {}", r.required_depth);
        sizes.push(format!("{name} {}/{}", expected.len(), w.len()));
    }
    Ok(sizes.join(", "))
}

fn c3_removability_positives() -> Check {
    let certs = all_certificates()?;
    let mut names = BTreeSet::new();
    for (owner, c) in &certs {
        let r = verify_certificate(&c.cert, 6, &c.roots).ctx(&format!("{owner}/{}", c.cert.name))?;
        ensure!(
            r.passed && r.counterexample.is_none(),
            "{owner}/{} fails: {:?}",
            c.cert.name,
            r.counterexample
        );
        names.insert(c.cert.name.clone());
    }
    ensure!(certs.len() >= 10, "only {} certificates", certs.len());
    for need in [
        "P",
        "Q",
        "R",
        "P+R",
        "shift_c",
        "shift_x_ray",
        "row_c",
        "row_x_ray",
        "tail_x_ray",
    ] {
        ensure!(names.contains(need), "missing certificate {need}");
    }
    Ok(format!("{} certificates verified at radius 6", certs.len()))
}

/// Rhomb star written out by hand: hub 0, pendant 1, rhombi 0-(3k-1)-3k-(3k+1)-0.
fn rhomb_adjacent(a: i64, b: i64) -> bool {
    let (a, b) = (a.min(b), a.max(b));
    (a == 0 && b >= 1 && b % 3 != 0) || (a >= 2 && b % 3 == 0 && b - a == 1) || (a >= 3 && a % 3 == 0 && b - a == 1)
}

fn rhomb_degree_count(removed: &BTreeSet<i64>, degree: usize, upto: i64) -> usize {
    let alive: Vec<i64> = (0..=upto + 3).filter(|n| !removed.contains(n)).collect();
    (1..=upto)
        .filter(|n| !removed.contains(n))
        .filter(|&n| alive.iter().filter(|&&m| rhomb_adjacent(n, m)).count() == degree)
        .count()
}

fn c4_removability_negatives() -> Check {
    let e = entry("rhomb_star")?;
    let truth = e.ground_truth.census.clone().ok_or("no census truth")?;
    let sets: BTreeMap<&str, Vec<i64>> =
        BTreeMap::from([("P", vec![2, 3, 4]), ("Q", vec![1, 2, 3]), ("R", vec![1, 5, 6])]);
    let mut seen = Vec::new();
    for (pair, want) in [(["P", "Q"], (1usize, 0usize)), (["Q", "R"], (1, 2))] {
        let case = truth
            .cases
            .iter()
            .find(|c| c.remove == pair)
            .ok_or(format!("no census case for {pair:?}"))?;
        let (verdict, _) = census_case(&e, &truth, case).ctx("census")?;
        match verdict {
            CensusVerdict::Distinguished {
                degree,
                count_first,
                count_second,
                ..
            } => {
                ensure!(degree == 1, "{pair:?}: distinguished at degree {degree}");
                ensure!(
                    (count_first, count_second) == want,
                    "{pair:?}: counts {count_first} vs {count_second}"
                );
            }
            CensusVerdict::Indistinguishable { .. } => return Err(format!("{pair:?}: indistinguishable")),
        }
        let removed: BTreeSet<i64> = pair.iter().flat_map(|p| sets[p].iter().copied()).collect();
        let indep = (
            rhomb_degree_count(&BTreeSet::new(), 1, 60),
            rhomb_degree_count(&removed, 1, 60),
        );
        ensure!(indep == want, "{pair:?}: hand count {indep:?}");
        seen.push(format!("{}: {} vs {}", pair.join("+"), want.0, want.1));
    }
    let w = index_box(&e.graph, -truth.validity_bound, truth.validity_bound).ctx("box")?;
    ensure!(
        census_obstruction(&e.graph, &w, &e.graph, &w, truth.k, None).is_err(),
        "census ran without a validity bound"
    );
    Ok(seen.join(", "))
}

fn c5_iterate_copies() -> Check {
    let certs = all_certificates()?;
    let mut total = 0;
    for (owner, c) in &certs {
        let label = format!("{owner}/{}", c.cert.name);
        let w = ball(&c.cert.host, &c.roots, 6).ctx(&label)?;
        let copies = iterate_copies(&c.cert, 6, &w).ctx(&label)?;
        ensure!(copies.len() == 6, "{label}: {} copies", copies.len());
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        for (i, copy) in copies.iter().enumerate() {
            for v in &copy.members_in_window {
                ensure!(w.contains(v) && copy.set.contains(v), "{label}: copy {i} lists {v}");
                ensure!(seen.insert(v), "{label}: {v} lies in two copies");
            }
        }
        ensure!(
            !copies[0].members_in_window.is_empty(),
            "{label}: removed set misses the window"
        );
        total += 1;
    }
    Ok(format!("{total} certificates, 6 copies each"))
}

fn c6_foundation_monotonicity() -> Check {
    let mut pairs = 0;
    let mut vacuous = 0;
    for e in all_entries()? {
        let Some(fam) = &e.family else { continue };
        let w = e.window(6).ctx("window")?;
        let depth = e.depth_for(&w);
        for c in e.native_certificates() {
            let r = foundation_monotonicity_check(fam, &c.cert, depth, &w).ctx(&e.name)?;
            ensure!(r.passed(), "{}/{}: {:?}", e.name, c.cert.name, r);
            pairs += 1;
            vacuous += usize::from(r.outcome == Outcome::Vacuous);
        }
    }
    Ok(format!("{pairs} pairs ({vacuous} with empty foundation)"))
}

fn c7_torsion_structure() -> Check {
    let e = entry("example15")?;
    let fam = e.family().ctx("family")?;
    let w = ball(&e.graph, &[vx("z_0")], 8).ctx("ball")?;
    let a1 = e.certificate("a1").ctx("a1")?;
    let nested = torsion_monotonicity_check(fam, a1, e.certificate("a1a2").ctx("a1a2")?, 8, &w).ctx("nested")?;
    ensure!(
        nested.outcome == Outcome::Pass && !nested.witness.is_empty(),
        "nested: {nested:?}"
    );
    let crossed = torsion_symmetry_check(fam, a1, e.certificate("b1").ctx("b1")?, 8, &w).ctx("crossed")?;
    ensure!(crossed.outcome == Outcome::Pass, "crossed: {crossed:?}");

    let r = entry("roller_brush")?;
    let w = r.window(6).ctx("window")?;
    let depth = r.depth_for(&w);
    let probe = conjecture2_probe(
        r.family().ctx("family")?,
        r.certificate("p1").ctx("p1")?,
        r.certificate("q1").ctx("q1")?,
        &r.curl_witnesses_for("p1"),
        depth,
        &w,
    )
    .ctx("probe")?;
    match probe {
        ProbeOutcome::HypothesisFails { witness } if !witness.is_empty() => Ok(format!(
            "tensub and symmetry pass; probe (p1, q1) fails at {}",
            witness[0]
        )),
        other => Err(format!("probe (p1, q1): {other:?}")),
    }
}

fn check_path(name: &str, path: &[VertexId], adjacent: impl Fn(&VertexId, &VertexId) -> bool) -> Check {
    ensure!(path.len() >= 21, "{name}: only {} vertices", path.len());
    let prefix = &path[..21];
    let distinct: BTreeSet<&VertexId> = prefix.iter().collect();
    ensure!(distinct.len() == 21, "{name}: repeated vertex");
    for p in prefix.windows(2) {
        ensure!(adjacent(&p[0], &p[1]), "{name}: {} and {} not adjacent", p[0], p[1]);
    }
    Ok(format!("{name} {} -> {}", prefix[0], prefix[20]))
}

fn lattice_adjacent(u: &VertexId, v: &VertexId) -> bool {
    u.index.len() == 2 && v.index.len() == 2 && (u.index[0] - v.index[0]).abs() + (u.index[1] - v.index[1]).abs() == 1
}

fn c8_ray_construction() -> Check {
    let grid = entry("grid")?;
    let row = grid.certificate("row").ctx("row")?.clone();
    let p = build_ray(&IterateCover::new(row), &vx("v_(0,0)"), 20).ctx("grid ray")?;
    p.verify(&grid.graph).ctx("grid verify")?;
    let a = check_path("grid", &p.vertices, |u, v| {
        lattice_adjacent(u, v) && grid.graph.adjacent(u, v).unwrap_or(false)
    })?;

    let ray = entry("ray")?;
    let tail = ray.certificate("tail_x_ray").ctx("tail_x_ray")?.clone();
    let host = tail.host.clone();
    let start = VertexId::new(GraphOracle::product_sort("v", "v"), vec![0, 0]);
    let p = build_ray(&IterateCover::new(tail), &start, 20).ctx("ray x ray")?;
    p.verify(&host).ctx("ray x ray verify")?;
    let b = check_path("ray x ray", &p.vertices, |u, v| {
        lattice_adjacent(u, v) && host.adjacent(u, v).unwrap_or(false)
    })?;
    Ok(format!("{a}; {b}"))
}

fn c9_covering() -> Check {
    let mut seen = Vec::new();
    for name in ["example9", "grid", "example11a"] {
        let e = entry(name)?;
        let w = e.window(6).ctx("window")?;
        let depth = e.depth_for(&w);
        let classes = e.classes().ctx("classes")?;
        let fam = e.family().ctx("family")?;
        let r = covering_check(&classes, fam, depth, &w).ctx(name)?;
        ensure!(r.outcome == Outcome::Pass, "{name}: {r:?}");
        if classes.len() == 1 {
            let m = monomer_check(&classes[0], fam, depth, &w).ctx(name)?;
            ensure!(m.outcome == Outcome::Pass, "{name} monomer: {m:?}");
        }
        seen.push(format!("{name} ({} classes)", classes.len()));
    }
    let e = entry("example11a")?;
    let w = e.window(6).ctx("window")?;
    let m = monomer_check(
        &[e.certificate("leaf2").ctx("leaf2")?.clone()],
        e.family().ctx("family")?,
        e.depth_for(&w),
        &w,
    )
    .ctx("monomer")?;
    ensure!(m.outcome == Outcome::Fail, "leaf2 monomer did not fail: {m:?}");
    let leaf = m
        .witness
        .iter()
        .find(|v| v.sort == "a3")
        .ok_or(format!("no uncovered star-leaf in {:?}", m.witness))?;
    Ok(format!("{} cover; monomer leaf2 misses {leaf}", seen.join(", ")))
}

fn c10_transfers() -> Check {
    let mut done = Vec::new();
    let ray = entry("ray")?;
    for (name, cert) in [("example9", "shift"), ("grid", "row"), ("grid", "col")] {
        let e = entry(name)?;
        let c = e.certificate(cert).ctx(cert)?;
        let comp = complement_transfer(c);
        let mut comp_roots = e.roots.clone();
        comp_roots.extend(comp.host.vertices_in_box(0, 1).ctx("box")?);
        let r = verify_certificate(&comp, 6, &comp_roots).ctx("complement")?;
        ensure!(r.passed, "{name}/{cert} complement: {:?}", r.counterexample);
        let prod = product_lift(c, &ray.graph);
        let root = e.roots[0].clone();
        let mut idx = root.index.clone();
        idx.push(0);
        let proot = VertexId::new(GraphOracle::product_sort(&root.sort, "v"), idx);
        let r = verify_certificate(&prod, 6, &[proot]).ctx("product")?;
        ensure!(r.passed, "{name}/{cert} product: {:?}", r.counterexample);
        done.push(format!("{name}/{cert}"));
    }

    let grid = entry("grid")?;
    let rr = ray.graph.cartesian_product(&ray.graph);
    let sort = GraphOracle::product_sort("v", "v");
    let w = ball(&rr, &[VertexId::new(sort.as_str(), vec![0, 0])], 5).ctx("ball")?;
    let mut pairs = 0;
    for (i, u) in w.vertices().iter().enumerate() {
        for (j, v) in w.vertices().iter().enumerate() {
            let gu = VertexId::new("v", u.index.clone());
            let gv = VertexId::new("v", v.index.clone());
            let want = grid.graph.adjacent(&gu, &gv).ctx("grid adjacency")?;
            ensure!(
                want == lattice_adjacent(u, v),
                "grid spec disagrees with the lattice at {gu}, {gv}"
            );
            ensure!(w.has_edge(i, j) == want, "ray x ray and grid differ at {u}, {v}");
            pairs += 1;
        }
    }
    Ok(format!(
        "transfers verify for {}; {pairs} ordered pairs agree",
        done.join(", ")
    ))
}

/// The ball truncated to its `n` vertices nearest the roots (BFS order).
fn nearest(w: &FiniteWindow, roots: &[VertexId], n: usize) -> Vec<VertexId> {
    let mut dist = vec![usize::MAX; w.len()];
    let mut queue = VecDeque::new();
    for r in roots {
        if let Some(i) = w.position(r) {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for &j in w.neighbors_of(i) {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    let mut order: Vec<usize> = (0..w.len()).filter(|&i| dist[i] != usize::MAX).collect();
    order.sort_by_key(|&i| (dist[i], w.vertices()[i].clone()));
    order.truncate(n);
    order.into_iter().map(|i| w.vertices()[i].clone()).collect()
}

fn mapping_is_isomorphism(m: &Mapping, a: &FiniteWindow, b: &FiniteWindow) -> bool {
    if m.pairs.len() != a.len() || a.len() != b.len() {
        return false;
    }
    let img: BTreeSet<&VertexId> = m.pairs.iter().map(|(_, y)| y).collect();
    if img.len() != b.len() || !img.iter().all(|y| b.contains(y)) {
        return false;
    }
    let pos = |w: &FiniteWindow, v: &VertexId| w.position(v).expect("member");
    m.pairs.iter().all(|(x1, y1)| {
        m.pairs
            .iter()
            .all(|(x2, y2)| a.has_edge(pos(a, x1), pos(a, x2)) == b.has_edge(pos(b, y1), pos(b, y2)))
    })
}

fn certificate_vf2(c: &IsoCertificate, roots: &[VertexId]) -> Result<(), String> {
    let name = &c.name;
    let ball4 = ball(&c.host, roots, 4).ctx(name)?;
    let dom = nearest(&ball4, roots, 12);
    let w = subset(&c.host, &dom).ctx(name)?;
    let image: Vec<VertexId> = dom
        .iter()
        .map(|v| c.apply(v).ok_or(format!("{name} undefined at {v}")))
        .collect::<Result<_, _>>()?;
    let rest = c.host.minus(&c.removed).ctx(name)?;
    let wi = subset(&rest, &image).ctx(name)?;
    let own = Mapping {
        pairs: dom.iter().cloned().zip(image.iter().cloned()).collect(),
    };
    ensure!(
        mapping_is_isomorphism(&own, &w, &wi),
        "{name}: its own map is not an induced isomorphism"
    );
    let free = induced_isomorphic(&w, &wi)
        .ctx(name)?
        .ok_or(format!("{name}: VF2 finds no isomorphism"))?;
    ensure!(mapping_is_isomorphism(&free, &w, &wi), "{name}: VF2 mapping invalid");
    let seed = [(dom[0].clone(), image[0].clone())];
    let seeded = induced_isomorphic_seeded(&w, &wi, &seed)
        .ctx(name)?
        .ok_or(format!("{name}: seeded VF2 finds no isomorphism"))?;
    ensure!(
        mapping_is_isomorphism(&seeded, &w, &wi),
        "{name}: seeded mapping invalid"
    );
    ensure!(seeded.get(&dom[0]) == Some(&image[0]), "{name}: seed not respected");
    Ok(())
}

fn edge_slots(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest relabelled edge mask over all vertex permutations.
fn canonical(mask: u32, slots: &[(usize, usize)], slot_of: &[Vec<usize>], perms: &[Vec<usize>]) -> u32 {
    perms
        .iter()
        .map(|p| {
            slots
                .iter()
                .enumerate()
                .filter(|(s, _)| mask >> s & 1 == 1)
                .fold(0u32, |acc, (_, &(i, j))| acc | 1 << slot_of[p[i]][p[j]])
        })
        .min()
        .expect("at least one permutation")
}

fn small_graph(n: usize, mask: u32, slots: &[(usize, usize)]) -> Result<FiniteWindow, String> {
    let points = |pts: Vec<Vec<i64>>| {
        Guard::from_conjuncts(pts.iter().map(|p| Guard::point(p).conjuncts()[0].clone()).collect())
    };
    let domain = points((0..n as i64).map(|i| vec![i]).collect());
    let edges: Vec<Vec<i64>> = slots
        .iter()
        .enumerate()
        .filter(|(s, _)| mask >> s & 1 == 1)
        .map(|(_, &(i, j))| vec![i as i64, j as i64])
        .collect();
    let rules = if edges.is_empty() {
        Vec::new()
    } else {
        vec![AdjacencyRule {
            left: "v".into(),
            right: "v".into(),
            guard: points(edges),
        }]
    };
    let sorts = vec![SortDecl {
        name: "v".into(),
        arity: 1,
        domain,
    }];
    let g = GraphOracle::new(format!("g{n}_{mask}"), sorts, rules, IndexBound::default(), None).ctx("small graph")?;
    let w = index_box(&g, 0, n as i64 - 1).ctx("box")?;
    ensure!(
        w.len() == n && w.edges().len() == mask.count_ones() as usize,
        "small graph {n}/{mask} built wrong"
    );
    Ok(w)
}

fn c11_oracle_equivalence() -> Check {
    let certs = all_certificates()?;
    for (owner, c) in &certs {
        certificate_vf2(&c.cert, &c.roots).map_err(|e| format!("{owner}: {e}"))?;
    }
    let mut comparisons = 0usize;
    let mut classes_total = 0usize;
    for n in 1..=6usize {
        let slots = edge_slots(n);
        let mut slot_of = vec![vec![0usize; n]; n];
        for (s, &(i, j)) in slots.iter().enumerate() {
            slot_of[i][j] = s;
            slot_of[j][i] = s;
        }
        let perms = permutations(n);
        let mut reps: BTreeMap<u32, FiniteWindow> = BTreeMap::new();
        let mut labelled = Vec::new();
        for mask in 0..1u32 << slots.len() {
            let canon = canonical(mask, &slots, &slot_of, &perms);
            if let std::collections::btree_map::Entry::Vacant(v) = reps.entry(canon) {
                v.insert(small_graph(n, canon, &slots)?);
            }
            labelled.push((mask, canon));
        }
        for (mask, canon) in labelled {
            let w = small_graph(n, mask, &slots)?;
            let rep = &reps[&canon];
            let m = induced_isomorphic(&w, rep).ctx("vf2")?;
            ensure!(
                m.as_ref().is_some_and(|m| mapping_is_isomorphism(m, &w, rep)),
                "n={n}: VF2 misses the isomorphism of mask {mask} onto its class"
            );
            comparisons += 1;
        }
        let reps: Vec<(&u32, &FiniteWindow)> = reps.iter().collect();
        for (ca, wa) in &reps {
            for (cb, wb) in &reps {
                let found = induced_isomorphic(wa, wb).ctx("vf2")?.is_some();
                ensure!(found == (ca == cb), "n={n}: VF2 says {found} for classes {ca}, {cb}");
                comparisons += 1;
            }
        }
        classes_total += reps.len();
    }
    ensure!(
        classes_total == 1 + 2 + 4 + 11 + 34 + 156,
        "class count {classes_total}"
    );
    Ok(format!(
        "{} certificates confirmed on 12-vertex balls; {comparisons} small-graph comparisons agree",
        certs.len()
    ))
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// `path:line:col: error: ...` with positive line and column.
fn is_located(stderr: &str, path: &str) -> bool {
    stderr.lines().any(|l| {
        let Some(rest) = l.strip_prefix(path).and_then(|r| r.strip_prefix(':')) else {
            return false;
        };
        let mut parts = rest.splitn(3, ':');
        let line = parts.next().and_then(|s| s.parse::<usize>().ok());
        let col = parts.next().and_then(|s| s.parse::<usize>().ok());
        let msg = parts.next().unwrap_or("");
        line.is_some_and(|x| x > 0) && col.is_some_and(|x| x > 0) && msg.starts_with(" error: ")
    })
}

fn adjacency_snapshot(g: &GraphOracle) -> Result<Snapshot, String> {
    let w = index_box(g, -6, 6).ctx("box")?;
    Ok((w.vertices().to_vec(), w.edge_pairs()))
}

fn c12_dsl_round_trip() -> Check {
    let entries = all_entries()?;
    ensure!(entries.len() == 12, "{} zoo entries", entries.len());
    for e in &entries {
        let g1 = parse_graph_spec(&e.graph_source)
            .map_err(|d| format!("{}: {d:?}", e.name))?
            .value;
        let emitted = emit_spec(&g1);
        let g2 = parse_graph_spec(&emitted)
            .map_err(|d| format!("{}: emitted spec rejected: {d:?}", e.name))?
            .value;
        ensure!(
            adjacency_snapshot(&g1)? == adjacency_snapshot(&g2)?,
            "{}: round trip changes adjacency",
            e.name
        );
        ensure!(emit_spec(&g2) == emitted, "{}: emission is not a fixed point", e.name);
    }

    let dir = crate_dir().join("tests/data/malformed");
    let grid = crate_dir().join("zoo/grid/graph.sgr");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .ctx("corpus")?
        .map(|d| d.map(|d| d.path()))
        .collect::<Result<_, _>>()
        .ctx("corpus")?;
    files.sort();
    ensure!(files.len() >= 10, "only {} malformed cases", files.len());
    for f in &files {
        let path = f.to_string_lossy().to_string();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sgraph"));
        cmd.arg("validate").arg(f);
        if f.extension().is_some_and(|x| x == "sgc") {
            cmd.arg("--graph").arg(&grid);
        }
        let out = cmd.output().ctx("spawn")?;
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure!(out.status.code() == Some(2), "{path}: exit {:?}", out.status.code());
        ensure!(is_located(&stderr, &path), "{path}: unlocated diagnostic {stderr:?}");
    }
    Ok(format!(
        "{} specs round-trip; {} malformed inputs located with exit 2",
        entries.len(),
        files.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("torsion ground truth", c1_torsion_ground_truth),
        ("foundation ground truths", c2_foundation_ground_truths),
        ("removability positives", c3_removability_positives),
        ("removability negatives", c4_removability_negatives),
        ("disjoint iterate copies", c5_iterate_copies),
        ("foundation monotonicity", c6_foundation_monotonicity),
        ("torsion nesting, symmetry and probe", c7_torsion_structure),
        ("ray construction", c8_ray_construction),
        ("coverings and monomers", c9_covering),
        ("complement and product transfers", c10_transfers),
        ("finite oracle equivalence", c11_oracle_equivalence),
        ("DSL round trip and diagnostics", c12_dsl_round_trip),
    ];
    let mut failed = 0;
    let start = Instant::now();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}) [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
