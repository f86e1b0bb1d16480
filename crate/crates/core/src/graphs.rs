//! Stable dual graphs of genus at most one.
//!
//! A graph is stored at the half-edge level: every half-edge belongs to a
//! vertex and is either a leg (carrying a marking label) or half of an edge.
//! Loops and parallel edges are allowed. Isomorphisms fix leg labels
//! pointwise, so two graphs are isomorphic exactly when some bijection of
//! vertices preserves genera, leg sets and the edge multiplicity between
//! every pair of vertices. [`CanonicalKey`] encodes that vertex-level data
//! under the lexicographically smallest admissible vertex order, so it is
//! also a lossless description of the isomorphism class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed half-edge structure: {0}")]
    Malformed(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex genera must be 0 or 1 and the total genus at most 1 (found {0})")]
    Genus(i64),
    #[error("vertex {vertex} (genus {genus}) has {valence} half-edges and is unstable")]
    Unstable { vertex: usize, genus: u8, valence: usize },
    #[error("substitution mismatch: {0}")]
    Substitution(String),
    #[error("bad graph JSON: {0}")]
    Json(String),
    #[error("malformed canonical key")]
    BadKey,
}

/// Bytes identifying an isomorphism class of marked graphs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        CanonicalKey(bytes)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match StableGraph::from_key(self) {
            Ok(g) => write!(f, "CanonicalKey({g})"),
            Err(_) => write!(f, "CanonicalKey({:?})", self.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableGraph {
    genus: Vec<u8>,
    half_vertex: Vec<usize>,
    legs: BTreeMap<u32, usize>,
    edges: Vec<(usize, usize)>,
}

/// Vertex-level view used for canonical forms.
struct VertexData {
    genus: Vec<u8>,
    legs: Vec<Vec<u32>>,
    adj: Vec<Vec<u8>>,
}

impl StableGraph {
    /// Builds and validates a graph from explicit half-edge data.
    pub fn from_half_edges(
        genus: Vec<u8>,
        half_vertex: Vec<usize>,
        legs: BTreeMap<u32, usize>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        let g = StableGraph { genus, half_vertex, legs, edges };
        g.validate()?;
        Ok(g)
    }

    /// Builds a graph from vertex genera, `(label, vertex)` legs and vertex-pair edges.
    pub fn from_vertices(
        genus: Vec<u8>,
        legs: &[(u32, usize)],
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let g = Self::from_vertices_unchecked(genus, legs, edges)?;
        g.validate()?;
        Ok(g)
    }

    fn from_vertices_unchecked(
        genus: Vec<u8>,
        legs: &[(u32, usize)],
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let nv = genus.len();
        let mut half_vertex = Vec::new();
        let mut leg_map = BTreeMap::new();
        for &(label, v) in legs {
            if v >= nv {
                return Err(GraphError::Malformed(format!("leg {label} on missing vertex {v}")));
            }
            if leg_map.insert(label, half_vertex.len()).is_some() {
                return Err(GraphError::Malformed(format!("duplicate leg label {label}")));
            }
            half_vertex.push(v);
        }
        let mut edge_list = Vec::new();
        for &(u, v) in edges {
            if u >= nv || v >= nv {
                return Err(GraphError::Malformed(format!("edge {u}-{v} on missing vertex")));
            }
            let h = half_vertex.len();
            half_vertex.push(u);
            half_vertex.push(v);
            edge_list.push((h, h + 1));
        }
        Ok(StableGraph { genus, half_vertex, legs: leg_map, edges: edge_list })
    }

    /// The open stratum: one genus-one vertex carrying legs `1..=n`.
    pub fn smooth(n: u32) -> Self {
        let legs: Vec<(u32, usize)> = (1..=n).map(|l| (l, 0)).collect();
        Self::from_vertices(vec![1], &legs, &[]).expect("smooth graph is stable")
    }

    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.half_vertex.len()
    }

    pub fn vertex_genus(&self, v: usize) -> u8 {
        self.genus[v]
    }

    pub fn half_edge_vertex(&self, h: usize) -> usize {
        self.half_vertex[h]
    }

    /// Number of edges, which is the codimension of the stratum.
    pub fn codim(&self) -> usize {
        self.edges.len()
    }

    /// Number of legs.
    pub fn n(&self) -> usize {
        self.legs.len()
    }

    pub fn legs(&self) -> &BTreeMap<u32, usize> {
        &self.legs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn leg_labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.legs.keys().copied()
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.half_vertex.len()).filter(|&h| self.half_vertex[h] == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.half_vertex.iter().filter(|&&x| x == v).count()
    }

    pub fn legs_at(&self, v: usize) -> Vec<u32> {
        self.legs.iter().filter(|(_, &h)| self.half_vertex[h] == v).map(|(&l, _)| l).collect()
    }

    /// Sum of vertex genera plus the first Betti number.
    pub fn arithmetic_genus(&self) -> i64 {
        self.genus.iter().map(|&g| g as i64).sum::<i64>() + self.edges.len() as i64
            - self.genus.len() as i64
            + 1
    }

    pub fn first_betti_number(&self) -> i64 {
        self.edges.len() as i64 - self.genus.len() as i64 + 1
    }

    /// The genus-one vertex, if there is one.
    pub fn genus_one_vertex(&self) -> Option<usize> {
        self.genus.iter().position(|&g| g == 1)
    }

    /// The half-edge paired with `h` by an edge, if `h` is not a leg.
    pub fn partner(&self, h: usize) -> Option<usize> {
        self.edges.iter().find_map(|&(a, b)| {
            if a == h {
                Some(b)
            } else if b == h {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let nv = self.genus.len();
        let nh = self.half_vertex.len();
        if nv == 0 {
            return Err(GraphError::Malformed("no vertices".into()));
        }
        if let Some(h) = self.half_vertex.iter().position(|&v| v >= nv) {
            return Err(GraphError::Malformed(format!("half-edge {h} on missing vertex")));
        }
        let mut used = vec![false; nh];
        let mut mark = |h: usize, what: &str| -> Result<(), GraphError> {
            if h >= nh {
                return Err(GraphError::Malformed(format!("{what} uses missing half-edge {h}")));
            }
            if std::mem::replace(&mut used[h], true) {
                return Err(GraphError::Malformed(format!("half-edge {h} used twice")));
            }
            Ok(())
        };
        for (&l, &h) in &self.legs {
            mark(h, &format!("leg {l}"))?;
        }
        for &(a, b) in &self.edges {
            mark(a, "edge")?;
            mark(b, "edge")?;
        }
        if let Some(h) = used.iter().position(|&u| !u) {
            return Err(GraphError::Malformed(format!("half-edge {h} is neither leg nor edge")));
        }
        if self.genus.iter().any(|&g| g > 1) {
            return Err(GraphError::Genus(self.arithmetic_genus()));
        }
        // connectivity
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, self.half_vertex[a]), find(&mut parent, self.half_vertex[b]));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        if (0..nv).any(|v| find(&mut parent, v) != root) {
            return Err(GraphError::Disconnected);
        }
        let g = self.arithmetic_genus();
        if !(0..=1).contains(&g) {
            return Err(GraphError::Genus(g));
        }
        for v in 0..nv {
            let val = self.valence(v);
            let needed = if self.genus[v] == 0 { 3 } else { 1 };
            if val < needed {
                return Err(GraphError::Unstable { vertex: v, genus: self.genus[v], valence: val });
            }
        }
        Ok(())
    }

    fn vertex_data(&self) -> VertexData {
        let nv = self.genus.len();
        let mut legs = vec![Vec::new(); nv];
        for (&l, &h) in &self.legs {
            legs[self.half_vertex[h]].push(l);
        }
        let mut adj = vec![vec![0u8; nv]; nv];
        for &(a, b) in &self.edges {
            let (u, v) = (self.half_vertex[a], self.half_vertex[b]);
            adj[u][v] += 1;
            if u != v {
                adj[v][u] += 1;
            }
        }
        VertexData { genus: self.genus.clone(), legs, adj }
    }

    /// Canonical key of the isomorphism class.
    pub fn canonical_form(&self) -> Result<CanonicalKey, GraphError> {
        self.validate()?;
        Ok(self.canonical_search().0)
    }

    /// Key of a graph already known to be valid.
    pub(crate) fn key(&self) -> CanonicalKey {
        self.canonical_search().0
    }

    /// Smallest encoding over all colour-respecting vertex orders, together
    /// with every order that attains it.
    fn canonical_search(&self) -> (CanonicalKey, Vec<Vec<usize>>) {
        let data = self.vertex_data();
        let colors = refine_colors(&data);
        let mut order: Vec<usize> = (0..data.genus.len()).collect();
        order.sort_by_key(|&v| colors[v]);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match groups.last_mut() {
                Some(g) if colors[g[0]] == colors[v] => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        let mut best: Option<Vec<u8>> = None;
        let mut best_orders = Vec::new();
        let mut current = Vec::with_capacity(order.len());
        permute_groups(&groups, 0, &mut current, &mut |ord| {
            let enc = encode(&data, ord);
            match &best {
                Some(b) if enc > *b => {}
                Some(b) if enc == *b => best_orders.push(ord.to_vec()),
                _ => {
                    best = Some(enc);
                    best_orders.clear();
                    best_orders.push(ord.to_vec());
                }
            }
        });
        (CanonicalKey(best.expect("at least one vertex order")), best_orders)
    }

    /// Decodes a canonical key into the canonical representative.
    pub fn from_key(key: &CanonicalKey) -> Result<Self, GraphError> {
        let b = &key.0;
        let mut pos = 0;
        let mut next = || -> Result<u8, GraphError> {
            let x = *b.get(pos).ok_or(GraphError::BadKey)?;
            pos += 1;
            Ok(x)
        };
        let nv = next()? as usize;
        let mut genus = Vec::with_capacity(nv);
        let mut legs = Vec::new();
        for v in 0..nv {
            genus.push(next()?);
            let nl = next()?;
            for _ in 0..nl {
                let l = u16::from_be_bytes([next()?, next()?]);
                legs.push((l as u32, v));
            }
        }
        let mut edges = Vec::new();
        for u in 0..nv {
            for v in u..nv {
                for _ in 0..next()? {
                    edges.push((u, v));
                }
            }
        }
        if pos != b.len() {
            return Err(GraphError::BadKey);
        }
        Self::from_vertices(genus, &legs, &edges)
    }

    /// Order of the group of marked-graph automorphisms.
    pub fn automorphism_count(&self) -> u64 {
        let (_, orders) = self.canonical_search();
        let data = self.vertex_data();
        let nv = data.genus.len();
        let mut edge_factor = 1u64;
        for u in 0..nv {
            for v in u..nv {
                let m = data.adj[u][v] as u64;
                edge_factor *= (1..=m).product::<u64>();
                if u == v {
                    edge_factor *= 1 << m;
                }
            }
        }
        orders.len() as u64 * edge_factor
    }

    /// All automorphisms, as permutations of half-edge indices.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let (_, orders) = self.canonical_search();
        let base = &orders[0];
        let nv = self.genus.len();
        // group edges by unordered vertex pair
        let mut by_pair: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            let (u, v) = (self.half_vertex[a], self.half_vertex[b]);
            let e = if u <= v { (a, b) } else { (b, a) };
            by_pair.entry((u.min(v), u.max(v))).or_default().push(e);
        }
        let mut out = Vec::new();
        for ord in &orders {
            let mut pi = vec![0; nv];
            for (i, &v) in base.iter().enumerate() {
                pi[v] = ord[i];
            }
            // each group maps onto the group of the image pair; try all matchings
            let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; self.half_vertex.len()]];
            for (&l, &h) in &self.legs {
                partial[0][h] = self.legs[&l];
            }
            for (&(u, v), src) in &by_pair {
                let (pu, pv) = (pi[u], pi[v]);
                let dst_key = (pu.min(pv), pu.max(pv));
                let dst = &by_pair[&dst_key];
                let mut next = Vec::new();
                for perm in permutations(src.len()) {
                    let flips: u32 = if u == v { 1 << src.len() } else { 1 };
                    for mask in 0..flips {
                        for p in &partial {
                            let mut p = p.clone();
                            for (i, &(a, b)) in src.iter().enumerate() {
                                let (c, d) = dst[perm[i]];
                                // a sits at u, which maps to pu
                                let (ca, cb) = if u == v {
                                    if mask & (1 << i) != 0 { (d, c) } else { (c, d) }
                                } else if self.half_vertex[c] == pu {
                                    (c, d)
                                } else {
                                    (d, c)
                                };
                                p[a] = ca;
                                p[b] = cb;
                            }
                            next.push(p);
                        }
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
        out
    }

    /// Replaces vertex `v` of `host` by `guest`.
    ///
    /// `matching` sends each leg label of `guest` to a distinct half-edge at
    /// `v`, and must be a bijection onto the half-edges at `v`. The guest must
    /// have the same genus as `v`. Host legs and edges keep their half-edge
    /// indices; guest internal half-edges are appended.
    pub fn substitute_vertex(
        &self,
        v: usize,
        guest: &StableGraph,
        matching: &BTreeMap<u32, usize>,
    ) -> Result<StableGraph, GraphError> {
        if v >= self.genus.len() {
            return Err(GraphError::Substitution(format!("no vertex {v}")));
        }
        if guest.arithmetic_genus() != self.genus[v] as i64 {
            return Err(GraphError::Substitution(format!(
                "guest genus {} differs from vertex genus {}",
                guest.arithmetic_genus(),
                self.genus[v]
            )));
        }
        let at_v: BTreeSet<usize> = self.half_edges_at(v).into_iter().collect();
        let guest_labels: BTreeSet<u32> = guest.legs.keys().copied().collect();
        let dom: BTreeSet<u32> = matching.keys().copied().collect();
        let img: BTreeSet<usize> = matching.values().copied().collect();
        if dom != guest_labels || img != at_v || img.len() != dom.len() {
            return Err(GraphError::Substitution(
                "matching must biject guest legs onto the half-edges at the vertex".into(),
            ));
        }
        let remap = |u: usize| if u < v { u } else { u - 1 };
        let offset = self.genus.len() - 1;
        let mut genus: Vec<u8> = self.genus.iter().enumerate().filter(|&(u, _)| u != v).map(|(_, &g)| g).collect();
        genus.extend(&guest.genus);
        let mut half_vertex: Vec<usize> = self.half_vertex.iter().map(|&u| if u == v { usize::MAX } else { remap(u) }).collect();
        for (&label, &h) in matching {
            let gh = guest.legs[&label];
            half_vertex[h] = offset + guest.half_vertex[gh];
        }
        let mut guest_half = vec![usize::MAX; guest.half_vertex.len()];
        let mut edges = self.edges.clone();
        for &(a, b) in &guest.edges {
            for h in [a, b] {
                guest_half[h] = half_vertex.len();
                half_vertex.push(offset + guest.half_vertex[h]);
            }
            edges.push((guest_half[a], guest_half[b]));
        }
        StableGraph::from_half_edges(genus, half_vertex, self.legs.clone(), edges)
    }

    /// Adds a new leg with the given label at vertex `v`.
    pub fn with_leg(&self, v: usize, label: u32) -> StableGraph {
        assert!(!self.legs.contains_key(&label), "leg label {label} already present");
        let mut g = self.clone();
        g.legs.insert(label, g.half_vertex.len());
        g.half_vertex.push(v);
        g
    }

    /// All ways of attaching the given new legs to vertices, one graph per assignment.
    pub fn distribute_labeled_legs(&self, labels: &[u32]) -> Vec<StableGraph> {
        let mut out = vec![self.clone()];
        for &l in labels {
            out = out
                .iter()
                .flat_map(|g| (0..g.num_vertices()).map(move |v| g.with_leg(v, l)))
                .collect();
        }
        out
    }

    /// Attaches `extra` new legs labelled after the current largest label.
    pub fn distribute_legs(&self, extra: usize) -> Vec<StableGraph> {
        let start = self.legs.keys().next_back().copied().unwrap_or(0) + 1;
        let labels: Vec<u32> = (start..start + extra as u32).collect();
        self.distribute_labeled_legs(&labels)
    }

    /// Renames every leg label through `f`, which must be injective on the labels.
    pub fn relabel_legs(&self, f: impl Fn(u32) -> u32) -> StableGraph {
        let mut g = self.clone();
        g.legs = self.legs.iter().map(|(&l, &h)| (f(l), h)).collect();
        assert_eq!(g.legs.len(), self.legs.len(), "relabeling must be injective");
        g
    }

    /// Returns the same graph with vertices and half-edges renumbered by the
    /// given permutations (`vperm[old] = new`, `hperm[old] = new`).
    pub fn renumbered(&self, vperm: &[usize], hperm: &[usize]) -> StableGraph {
        let mut genus = vec![0; self.genus.len()];
        for (v, &g) in self.genus.iter().enumerate() {
            genus[vperm[v]] = g;
        }
        let mut half_vertex = vec![0; self.half_vertex.len()];
        for (h, &v) in self.half_vertex.iter().enumerate() {
            half_vertex[hperm[h]] = vperm[v];
        }
        StableGraph {
            genus,
            half_vertex,
            legs: self.legs.iter().map(|(&l, &h)| (l, hperm[h])).collect(),
            edges: self.edges.iter().rev().map(|&(a, b)| (hperm[b], hperm[a])).collect(),
        }
    }

    /// All graphs obtained by adding one edge inside vertex `v`, as guests
    /// whose leg labels are the half-edge indices at `v`.
    pub fn degenerations_at(&self, v: usize) -> Vec<StableGraph> {
        let hs: Vec<u32> = self.half_edges_at(v).into_iter().map(|h| h as u32).collect();
        single_edge_degenerations(self.genus[v], &hs)
    }

    /// All graphs with one more edge, obtained by degenerating a single vertex.
    pub fn degenerations(&self) -> Vec<StableGraph> {
        let mut out = Vec::new();
        for v in 0..self.num_vertices() {
            for guest in self.degenerations_at(v) {
                let matching = identity_matching(&guest);
                out.push(self.substitute_vertex(v, &guest, &matching).expect("degeneration is stable"));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.vertex_data();
        let vertices: Vec<_> = d.genus.iter().map(|&g| serde_json::json!({ "genus": g })).collect();
        let legs: Vec<_> = self
            .legs
            .iter()
            .map(|(&l, &h)| serde_json::json!({"label": l, "vertex": self.half_vertex[h]}))
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (u, v) = (self.half_vertex[a], self.half_vertex[b]);
                serde_json::json!([u.min(v), u.max(v)])
            })
            .collect();
        serde_json::json!({ "vertices": vertices, "legs": legs, "edges": edges })
    }

    /// Lossless half-edge interchange format.
    pub fn to_half_edge_json(&self) -> serde_json::Value {
        let h = HalfEdgeBody {
            genus: self.genus.clone(),
            vertex_of: self.half_vertex.clone(),
            legs: self.legs.iter().map(|(&label, &halfedge)| HalfEdgeLeg { label, halfedge }).collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::json!({ "halfedges": h })
    }

    /// Parses either JSON format and validates the result.
    pub fn from_json(value: &serde_json::Value) -> Result<Self, GraphError> {
        let err = |e: serde_json::Error| GraphError::Json(e.to_string());
        if let Some(body) = value.get("halfedges") {
            let h: HalfEdgeBody = serde_json::from_value(body.clone()).map_err(err)?;
            let mut legs = BTreeMap::new();
            for leg in h.legs {
                if legs.insert(leg.label, leg.halfedge).is_some() {
                    return Err(GraphError::Malformed(format!("duplicate leg label {}", leg.label)));
                }
            }
            let edges = h.edges.into_iter().map(|[a, b]| (a, b)).collect();
            return StableGraph::from_half_edges(h.genus, h.vertex_of, legs, edges);
        }
        let g: VertexJson = serde_json::from_value(value.clone()).map_err(err)?;
        let genus = g.vertices.iter().map(|v| v.genus).collect();
        let legs: Vec<(u32, usize)> = g.legs.iter().map(|l| (l.label, l.vertex)).collect();
        let edges: Vec<(usize, usize)> = g.edges.iter().map(|&[a, b]| (a, b)).collect();
        StableGraph::from_vertices(genus, &legs, &edges)
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.vertex_data();
        for v in 0..d.genus.len() {
            if v > 0 {
                write!(f, " ")?;
            }
            write!(f, "v{v}:g{}{{", d.genus[v])?;
            for (i, l) in d.legs[v].iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, "}}")?;
        }
        let mut first = true;
        for u in 0..d.genus.len() {
            for v in u..d.genus.len() {
                for _ in 0..d.adj[u][v] {
                    write!(f, "{}{u}-{v}", if first { " | " } else { " " })?;
                    first = false;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    vertices: Vec<VertexGenusJson>,
    legs: Vec<LegJson>,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct VertexGenusJson {
    genus: u8,
}

#[derive(Serialize, Deserialize)]
struct LegJson {
    label: u32,
    vertex: usize,
}

#[derive(Serialize, Deserialize)]
struct HalfEdgeBody {
    genus: Vec<u8>,
    vertex_of: Vec<usize>,
    legs: Vec<HalfEdgeLeg>,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct HalfEdgeLeg {
    label: u32,
    halfedge: usize,
}

/// Identity matching for guests whose leg labels are host half-edge indices.
pub fn identity_matching(guest: &StableGraph) -> BTreeMap<u32, usize> {
    guest.leg_labels().map(|l| (l, l as usize)).collect()
}

/// One-edge degenerations of a vertex of the given genus whose half-edges
/// carry the labels `hs`. Each result is a guest graph with legs `hs`.
pub fn single_edge_degenerations(genus: u8, hs: &[u32]) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let k = hs.len();
    if genus == 1 {
        // irreducible node
        let legs: Vec<(u32, usize)> = hs.iter().map(|&l| (l, 0)).collect();
        if let Ok(g) = StableGraph::from_vertices(vec![0], &legs, &[(0, 0)]) {
            out.push(g);
        }
    }
    for mask in 0u64..(1 << k) {
        // genus 0: vertex 0 holds the first half-edge, so each split appears once
        if genus == 0 && mask & 1 == 0 {
            continue;
        }
        let legs: Vec<(u32, usize)> =
            hs.iter().enumerate().map(|(i, &l)| (l, if mask & (1 << i) != 0 { 0 } else { 1 })).collect();
        if let Ok(g) = StableGraph::from_vertices(vec![genus, 0], &legs, &[(0, 1)]) {
            out.push(g);
        }
    }
    out
}

fn refine_colors(d: &VertexData) -> Vec<usize> {
    let nv = d.genus.len();
    let valence = |v: usize| -> usize {
        d.legs[v].len() + (0..nv).map(|u| d.adj[v][u] as usize).sum::<usize>() + d.adj[v][v] as usize
    };
    let initial: Vec<(bool, Vec<u32>, u8, usize, u8)> =
        (0..nv).map(|v| (d.legs[v].is_empty(), d.legs[v].clone(), d.genus[v], valence(v), d.adj[v][v])).collect();
    let mut colors = rank_signatures(&initial);
    loop {
        let sigs: Vec<(usize, Vec<(usize, u8)>)> = (0..nv)
            .map(|v| {
                let mut nb: Vec<(usize, u8)> =
                    (0..nv).filter(|&u| u != v && d.adj[v][u] > 0).map(|u| (colors[u], d.adj[v][u])).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let next = rank_signatures(&sigs);
        let count = |c: &[usize]| c.iter().collect::<BTreeSet<_>>().len();
        if count(&next) == count(&colors) {
            return next;
        }
        colors = next;
    }
}

fn rank_signatures<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let sorted: BTreeSet<T> = sigs.iter().cloned().collect();
    let index: BTreeMap<T, usize> = sorted.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    sigs.iter().map(|s| index[s]).collect()
}

fn permute_groups(groups: &[Vec<usize>], i: usize, current: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if i == groups.len() {
        f(current);
        return;
    }
    for perm in permutations(groups[i].len()) {
        let base = current.len();
        current.extend(perm.iter().map(|&j| groups[i][j]));
        permute_groups(groups, i + 1, current, f);
        current.truncate(base);
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn go(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..k {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(k, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(k, &mut cur, &mut used, &mut out);
    out
}

fn encode(d: &VertexData, order: &[usize]) -> Vec<u8> {
    let mut out = vec![order.len() as u8];
    for &v in order {
        out.push(d.genus[v]);
        out.push(d.legs[v].len() as u8);
        for &l in &d.legs[v] {
            out.extend_from_slice(&(l as u16).to_be_bytes());
        }
    }
    for i in 0..order.len() {
        for j in i..order.len() {
            out.push(d.adj[order[i]][order[j]]);
        }
    }
    out
}

/// One representative per isomorphism class of genus-one stable graphs with
/// legs `1..=n`, for every codimension `0..=n`, each level sorted by key.
pub fn enumerate_all(n: usize) -> Vec<Vec<StableGraph>> {
    assert!(n >= 1, "genus-one stable graphs need at least one leg");
    let mut levels = vec![vec![StableGraph::smooth(n as u32)]];
    for _ in 1..=n {
        let prev = levels.last().unwrap();
        let found: Vec<(CanonicalKey, StableGraph)> = prev
            .par_iter()
            .flat_map_iter(|g| g.degenerations().into_iter().map(|d| (d.key(), d)))
            .collect();
        let mut classes: BTreeMap<CanonicalKey, StableGraph> = BTreeMap::new();
        for (k, g) in found {
            classes.entry(k).or_insert(g);
        }
        levels.push(classes.into_keys().map(|k| StableGraph::from_key(&k).expect("own key decodes")).collect());
    }
    levels
}

/// Isomorphism classes of codimension `codim`.
pub fn enumerate(n: usize, codim: usize) -> Vec<StableGraph> {
    if codim > n {
        return Vec::new();
    }
    enumerate_all(n).swap_remove(codim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_one_leg() -> StableGraph {
        StableGraph::from_vertices(vec![0], &[(1, 0)], &[(0, 0)]).unwrap()
    }

    fn banana() -> StableGraph {
        StableGraph::from_vertices(vec![0, 0], &[(1, 0), (2, 1)], &[(0, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            StableGraph::from_vertices(vec![0], &[(1, 0), (2, 0)], &[]).unwrap_err(),
            GraphError::Unstable { vertex: 0, genus: 0, valence: 2 }
        );
        assert_eq!(StableGraph::from_vertices(vec![1, 1], &[(1, 0), (2, 1)], &[(0, 1)]).unwrap_err(), GraphError::Genus(2));
        assert_eq!(
            StableGraph::from_vertices(vec![1, 0], &[(1, 0), (2, 1), (3, 1), (4, 1)], &[]).unwrap_err(),
            GraphError::Disconnected
        );
        assert!(matches!(
            StableGraph::from_vertices(vec![1], &[(1, 0), (1, 0)], &[]).unwrap_err(),
            GraphError::Malformed(_)
        ));
        assert!(matches!(
            StableGraph::from_half_edges(vec![1], vec![0, 0], [(1, 0)].into_iter().collect(), vec![]).unwrap_err(),
            GraphError::Malformed(_)
        ));
        assert_eq!(StableGraph::from_vertices(vec![1], &[], &[]).unwrap_err(), GraphError::Unstable { vertex: 0, genus: 1, valence: 0 });
    }

    #[test]
    fn keys_distinguish_one_pointed_strata() {
        let smooth = StableGraph::smooth(1);
        assert_ne!(smooth.canonical_form().unwrap(), loop_one_leg().canonical_form().unwrap());
    }

    #[test]
    fn keys_ignore_numbering() {
        let g = banana();
        let swapped_edges = g.renumbered(&[0, 1], &[0, 1, 4, 5, 2, 3]);
        assert_eq!(g.canonical_form().unwrap(), swapped_edges.canonical_form().unwrap());
        let swapped_vertices = g.renumbered(&[1, 0], &[1, 0, 3, 2, 5, 4]);
        assert_eq!(g.canonical_form().unwrap(), swapped_vertices.canonical_form().unwrap());
        let back = StableGraph::from_key(&g.key()).unwrap();
        assert_eq!(back.key(), g.key());
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(StableGraph::smooth(3).automorphism_count(), 1);
        assert_eq!(loop_one_leg().automorphism_count(), 2);
        assert_eq!(banana().automorphism_count(), 2);
        assert_eq!(loop_one_leg().automorphisms().len(), 2);
        assert_eq!(banana().automorphisms().len(), 2);
    }

    #[test]
    fn enumeration_small_cases() {
        let one = enumerate_all(1);
        assert_eq!(one.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 1]);
        let two = enumerate_all(2);
        assert_eq!(two.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 2]);
        assert!(enumerate(2, 3).is_empty());
    }

    #[test]
    fn enumerated_graphs_have_genus_one() {
        for (c, level) in enumerate_all(4).iter().enumerate() {
            for g in level {
                assert_eq!(g.codim(), c);
                assert_eq!(g.arithmetic_genus(), 1);
                if g.genus_one_vertex().is_some() {
                    assert_eq!(g.first_betti_number(), 0);
                } else {
                    assert_eq!(g.first_betti_number(), 1);
                }
            }
        }
    }

    #[test]
    fn substitution_examples() {
        let host = StableGraph::smooth(2);
        // trivial guest
        let guest = StableGraph::from_vertices(vec![1], &[(0, 0), (1, 0)], &[]).unwrap();
        let out = host.substitute_vertex(0, &guest, &identity_matching(&guest)).unwrap();
        assert_eq!(out.key(), host.key());
        // split off both legs onto a rational tail
        let guest = StableGraph::from_vertices(vec![1, 0], &[(0, 1), (1, 1)], &[(0, 1)]).unwrap();
        let out = host.substitute_vertex(0, &guest, &identity_matching(&guest)).unwrap();
        let expect = StableGraph::from_vertices(vec![1, 0], &[(1, 1), (2, 1)], &[(0, 1)]).unwrap();
        assert_eq!(out.key(), expect.key());
        assert_eq!(out.codim(), 1);
        // loop half-edges are routed independently
        let host = StableGraph::from_vertices(vec![0], &[(1, 0)], &[(0, 0)]).unwrap();
        let hs = host.half_edges_at(0);
        assert_eq!(hs.len(), 3);
        let guest = StableGraph::from_vertices(
            vec![0, 0],
            &[(hs[0] as u32, 0), (hs[1] as u32, 0), (hs[2] as u32, 1)],
            &[(0, 1)],
        );
        assert!(guest.is_err(), "rational tail with one half-edge is unstable");
    }

    #[test]
    fn substitution_rejects_bad_matchings() {
        let host = StableGraph::smooth(2);
        let guest = StableGraph::from_vertices(vec![0], &[(0, 0), (1, 0)], &[(0, 0)]).unwrap();
        let mut m = identity_matching(&guest);
        m.insert(1, 0);
        assert!(matches!(host.substitute_vertex(0, &guest, &m), Err(GraphError::Substitution(_))));
        let g0 = StableGraph::from_vertices(vec![0, 0], &[(0, 0), (1, 1), (7, 0), (8, 1)], &[(0, 1)]).unwrap();
        assert!(matches!(host.substitute_vertex(0, &g0, &identity_matching(&g0)), Err(GraphError::Substitution(_))));
    }

    #[test]
    fn leg_distribution() {
        let g = StableGraph::smooth(2);
        assert_eq!(g.distribute_legs(0), vec![g.clone()]);
        assert_eq!(g.distribute_legs(2).len(), 1);
        let two = StableGraph::from_vertices(vec![1, 0], &[(1, 1), (2, 1)], &[(0, 1)]).unwrap();
        let out = two.distribute_legs(1);
        assert_eq!(out.len(), 2);
        for h in &out {
            h.validate().unwrap();
            assert_eq!(h.n(), 3);
        }
        assert_eq!(two.distribute_legs(3).len(), 8);
    }

    #[test]
    fn json_formats() {
        let g = banana();
        let v = g.to_json();
        assert_eq!(StableGraph::from_json(&v).unwrap().key(), g.key());
        let h = g.to_half_edge_json();
        assert_eq!(StableGraph::from_json(&h).unwrap(), g);
        let spec_example = serde_json::json!({
            "vertices":[{"genus":0},{"genus":1}],
            "legs":[{"label":1,"vertex":0}],
            "edges":[[0,1],[0,0]]
        });
        assert_eq!(StableGraph::from_json(&spec_example).unwrap_err(), GraphError::Genus(2));
        let ok = serde_json::json!({
            "vertices":[{"genus":0},{"genus":1}],
            "legs":[{"label":1,"vertex":0},{"label":2,"vertex":0}],
            "edges":[[0,1]]
        });
        assert_eq!(StableGraph::from_json(&ok).unwrap().codim(), 1);
        assert!(matches!(StableGraph::from_json(&serde_json::json!({"x":1})), Err(GraphError::Json(_))));
    }
}
