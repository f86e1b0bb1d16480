//! Strata generators of the even cohomology of genus-one moduli spaces and
//! the two relation families between them.
//!
//! A generator is an isomorphism class of stable graphs; it stands for the
//! pushforward of the fundamental class along the gluing map of the graph.
//! In that normalization boundary restrictions and forgetful pullbacks are
//! plain sums over graphs with multiplicity one, which is what the relation
//! generators below rely on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::graphs::{enumerate_all, identity_matching, CanonicalKey, GraphError, StableGraph};
use crate::linalg::{self, format_rational, parse_rational, BasisKey, Rational, SparseMatrix, SparseVector};

#[derive(Debug, Error)]
pub enum TautError {
    #[error("cannot read relation data: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed relation data: {0}")]
    Format(String),
    #[error("invalid graph in relation data: {0}")]
    Graph(#[from] GraphError),
    #[error("relation term has n = {n}, codim = {codim}; expected n = 4, codim = 2")]
    WrongStratum { n: usize, codim: usize },
    #[error("relation data sums to the zero vector")]
    ZeroRelation,
    #[error("vector key is not a graph of the stated codimension")]
    ForeignKey,
}

type Levels = Arc<Vec<Vec<StableGraph>>>;

/// All isomorphism classes of graphs with `n` legs, by codimension; cached per `n`.
pub fn strata(n: usize) -> Levels {
    static CACHE: OnceLock<Mutex<HashMap<usize, Levels>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().unwrap().get(&n) {
        return s.clone();
    }
    let computed = Arc::new(enumerate_all(n));
    cache.lock().unwrap().entry(n).or_insert(computed).clone()
}

/// Basis of the codimension-`codim` part of the generator space.
pub fn generators(n: usize, codim: usize) -> Vec<CanonicalKey> {
    if codim > n {
        return Vec::new();
    }
    strata(n)[codim].iter().map(|g| g.canonical_form().expect("enumerated graphs are valid")).collect()
}

/// A rational combination of strata of fixed `n` and codimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataVector {
    n: usize,
    codim: usize,
    coeffs: BTreeMap<CanonicalKey, Rational>,
}

impl StrataVector {
    pub fn zero(n: usize, codim: usize) -> Self {
        StrataVector { n, codim, coeffs: BTreeMap::new() }
    }

    /// Single generator with coefficient one.
    pub fn basis(g: &StableGraph) -> Self {
        let mut v = StrataVector::zero(g.n(), g.codim());
        v.add_graph(g, &Rational::one());
        v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalKey, &Rational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, key: &CanonicalKey) -> Rational {
        self.coeffs.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c` times the class of `g`, which must have the vector's `n` and codimension.
    pub fn add_graph(&mut self, g: &StableGraph, c: &Rational) {
        assert_eq!((g.n(), g.codim()), (self.n, self.codim), "graph outside the vector's stratum");
        self.add_key(g.canonical_form().expect("valid graph"), c);
    }

    fn add_key(&mut self, key: CanonicalKey, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&mut self, other: &StrataVector) {
        self.add_scaled(other, &Rational::one());
    }

    pub fn add_scaled(&mut self, other: &StrataVector, c: &Rational) {
        assert_eq!((self.n, self.codim), (other.n, other.codim), "vectors of different strata");
        for (k, v) in &other.coeffs {
            self.add_key(k.clone(), &(v * c));
        }
    }

    pub fn scaled(&self, c: &Rational) -> StrataVector {
        let mut out = StrataVector::zero(self.n, self.codim);
        out.add_scaled(self, c);
        out
    }

    pub fn to_sparse(&self) -> SparseVector {
        self.coeffs.iter().map(|(k, c)| (BasisKey::new(k.as_bytes().to_vec()), c.clone())).collect()
    }

    /// Clears denominators and content, making the leading coefficient positive.
    pub fn normalized(&self) -> StrataVector {
        let sparse = self.to_sparse().normalized();
        let coeffs = sparse.iter().map(|(k, c)| (CanonicalKey::from_bytes(k.as_bytes().to_vec()), c.clone())).collect();
        StrataVector { n: self.n, codim: self.codim, coeffs }
    }

    /// Relabels legs by `sigma`, given as the images of `1..=n` in order.
    pub fn relabel(&self, sigma: &[u32]) -> StrataVector {
        assert_eq!(sigma.len(), self.n);
        let mut out = StrataVector::zero(self.n, self.codim);
        for (k, c) in &self.coeffs {
            let g = StableGraph::from_key(k).expect("own key");
            out.add_graph(&g.relabel_legs(|l| sigma[l as usize - 1]), c);
        }
        out
    }

    /// Forgetful pullback adding `extra` legs, each stratum replaced by the sum
    /// over all placements of the new legs.
    pub fn pullback(&self, extra: usize) -> StrataVector {
        let mut out = StrataVector::zero(self.n + extra, self.codim);
        for (k, c) in &self.coeffs {
            let g = StableGraph::from_key(k).expect("own key");
            for h in g.distribute_legs(extra) {
                out.add_graph(&h, c);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let g = StableGraph::from_key(k).expect("own key");
                serde_json::json!({ "graph": g.to_json(), "coeff": format_rational(c) })
            })
            .collect();
        serde_json::json!({ "n": self.n, "codim": self.codim, "terms": terms })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, TautError> {
        let raw: RawVector = serde_json::from_value(value.clone()).map_err(|e| TautError::Format(e.to_string()))?;
        let mut v = StrataVector::zero(raw.n, raw.codim);
        for t in raw.terms {
            let g = StableGraph::from_json(&t.graph)?;
            if (g.n(), g.codim()) != (raw.n, raw.codim) || g.leg_labels().ne(1..=raw.n as u32) {
                return Err(TautError::ForeignKey);
            }
            let c = parse_rational(&t.coeff).map_err(|e| TautError::Format(e.to_string()))?;
            v.add_graph(&g, &c);
        }
        Ok(v)
    }
}

#[derive(Deserialize)]
struct RawVector {
    n: usize,
    codim: usize,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
struct RawTerm {
    graph: serde_json::Value,
    coeff: String,
}

#[derive(Deserialize)]
struct RawRelation {
    provenance: String,
    terms: Vec<RawTerm>,
}

/// The codimension-two relation on four-pointed genus-one curves.
#[derive(Clone, Debug)]
pub struct GetzlerRelationData {
    pub provenance: String,
    pub terms: Vec<(StableGraph, Rational)>,
}

const BUNDLED_RELATION: &str = include_str!("../data/getzler_relation.json");

impl GetzlerRelationData {
    /// The copy compiled into the library.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_RELATION).expect("bundled relation data is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TautError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, TautError> {
        let raw: RawRelation = serde_json::from_str(text).map_err(|e| TautError::Format(e.to_string()))?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let g = StableGraph::from_json(&t.graph)?;
            let c = parse_rational(&t.coeff).map_err(|e| TautError::Format(e.to_string()))?;
            terms.push((g, c));
        }
        let data = GetzlerRelationData { provenance: raw.provenance, terms };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<(), TautError> {
        for (g, _) in &self.terms {
            if g.n() != 4 || g.codim() != 2 || g.leg_labels().ne(1..=4) {
                return Err(TautError::WrongStratum { n: g.n(), codim: g.codim() });
            }
        }
        if self.to_vector().is_zero() {
            return Err(TautError::ZeroRelation);
        }
        Ok(())
    }

    pub fn to_vector(&self) -> StrataVector {
        let mut v = StrataVector::zero(4, 2);
        for (g, c) in &self.terms {
            v.add_graph(g, c);
        }
        v
    }
}

/// Every `k`-subset of `items`, in lexicographic order of positions.
fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RelationOptions {
    /// Keep one 4-subset per orbit of the graph's automorphism group.
    pub dedup_by_automorphisms: bool,
}

/// `(vertex, 4-subset of half-edges)` choices at vertices of the given genus.
fn insertion_sites(g: &StableGraph, genus: u8, opts: RelationOptions) -> Vec<(usize, Vec<usize>)> {
    let mut sites = Vec::new();
    for v in 0..g.num_vertices() {
        if g.vertex_genus(v) != genus {
            continue;
        }
        let hs = g.half_edges_at(v);
        if hs.len() >= 4 {
            sites.extend(subsets(&hs, 4).into_iter().map(|f| (v, f)));
        }
    }
    if !opts.dedup_by_automorphisms {
        return sites;
    }
    let auts = g.automorphisms();
    let mut seen = BTreeSet::new();
    let mut kept = Vec::new();
    for (v, f) in sites {
        if seen.contains(&f) {
            continue;
        }
        for a in &auts {
            let mut img: Vec<usize> = f.iter().map(|&h| a[h]).collect();
            img.sort_unstable();
            seen.insert(img);
        }
        kept.push((v, f));
    }
    kept
}

/// Sum over splittings of vertex `v` into two rational vertices joined by a
/// new edge, with `left` on one side, `right` on the other and every other
/// half-edge at `v` placed on either side.
fn split_sum(g: &StableGraph, v: usize, left: [usize; 2], right: [usize; 2], out: &mut StrataVector, sign: &Rational) {
    let rest: Vec<usize> = g.half_edges_at(v).into_iter().filter(|h| !left.contains(h) && !right.contains(h)).collect();
    for mask in 0u64..(1 << rest.len()) {
        let mut legs: Vec<(u32, usize)> = left.iter().map(|&h| (h as u32, 0)).chain(right.iter().map(|&h| (h as u32, 1))).collect();
        legs.extend(rest.iter().enumerate().map(|(i, &h)| (h as u32, ((mask >> i) & 1) as usize)));
        let guest = StableGraph::from_vertices(vec![0, 0], &legs, &[(0, 1)]).expect("both sides carry three half-edges");
        if let Ok(h) = g.substitute_vertex(v, &guest, &identity_matching(&guest)) {
            out.add_graph(&h, sign);
        }
    }
}

/// The two WDVV relations at one vertex and 4-subset of a graph.
pub fn wdvv_at(g: &StableGraph, v: usize, f: &[usize]) -> [StrataVector; 2] {
    let (n, c) = (g.n(), g.codim() + 1);
    let (a, b, cc, d) = (f[0], f[1], f[2], f[3]);
    let mut first = StrataVector::zero(n, c);
    split_sum(g, v, [a, b], [cc, d], &mut first, &Rational::one());
    let mut second = first.clone();
    split_sum(g, v, [a, cc], [b, d], &mut first, &-Rational::one());
    split_sum(g, v, [a, d], [b, cc], &mut second, &-Rational::one());
    [first, second]
}

/// WDVV relations landing in codimension `codim`, normalized and deduplicated.
pub fn wdvv_relations(n: usize, codim: usize) -> Vec<StrataVector> {
    wdvv_relations_with(n, codim, RelationOptions::default())
}

pub fn wdvv_relations_with(n: usize, codim: usize, opts: RelationOptions) -> Vec<StrataVector> {
    if codim == 0 || codim > n {
        return Vec::new();
    }
    let all = strata(n);
    let raw: Vec<StrataVector> = all[codim - 1]
        .par_iter()
        .flat_map_iter(|g| {
            insertion_sites(g, 0, opts).into_iter().flat_map(move |(v, f)| wdvv_at(g, v, &f))
        })
        .collect();
    dedup(raw)
}

/// Inserts the relation at genus-one vertex `v` of `g`, matching its legs
/// `1..=4` to the half-edges `f` in order.
pub fn getzler_at(g: &StableGraph, v: usize, f: &[usize], data: &GetzlerRelationData) -> StrataVector {
    let mut out = StrataVector::zero(g.n(), g.codim() + 2);
    let rest: Vec<u32> = g.half_edges_at(v).into_iter().filter(|h| !f.contains(h)).map(|h| h as u32).collect();
    for (term, c) in &data.terms {
        let renamed = term.relabel_legs(|l| f[l as usize - 1] as u32);
        for guest in renamed.distribute_labeled_legs(&rest) {
            if let Ok(h) = g.substitute_vertex(v, &guest, &identity_matching(&guest)) {
                out.add_graph(&h, c);
            }
        }
    }
    out
}

/// Raw insertions of the relation before normalization, in enumeration order.
pub fn getzler_insertions(n: usize, codim: usize, data: &GetzlerRelationData) -> Vec<StrataVector> {
    if codim < 2 || codim > n {
        return Vec::new();
    }
    let all = strata(n);
    all[codim - 2]
        .par_iter()
        .flat_map_iter(|g| {
            insertion_sites(g, 1, RelationOptions::default())
                .into_iter()
                .map(move |(v, f)| getzler_at(g, v, &f, data))
        })
        .collect()
}

/// Insertions of the relation landing in codimension `codim`, normalized and deduplicated.
pub fn getzler_relations(n: usize, codim: usize, data: &GetzlerRelationData) -> Vec<StrataVector> {
    dedup(getzler_insertions(n, codim, data))
}

fn dedup(raw: Vec<StrataVector>) -> Vec<StrataVector> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in raw {
        let v = v.normalized();
        if v.is_zero() {
            continue;
        }
        let key: Vec<_> = v.coeffs.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        if seen.insert(key) {
            out.push(v);
        }
    }
    out
}

/// Rank of a family of vectors of the same stratum, inside the generator space.
pub fn relation_rank(n: usize, codim: usize, vectors: &[StrataVector]) -> usize {
    let cols = generators(n, codim).into_iter().map(|k| BasisKey::new(k.as_bytes().to_vec()));
    let m = SparseMatrix::from_rows(cols, vectors.iter().map(StrataVector::to_sparse))
        .expect("relation keys are enumerated classes");
    linalg::rank(&m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiRow {
    pub codim: usize,
    pub generators: usize,
    pub relation_rank: usize,
    pub betti: usize,
}

/// Generators, relation ranks and coranks for every codimension.
pub fn betti_table(n: usize, data: Option<&GetzlerRelationData>) -> Vec<BettiRow> {
    assert!(n >= 1, "need at least one marking");
    (0..=n)
        .map(|k| {
            let gens = generators(n, k).len();
            let mut rels = wdvv_relations(n, k);
            if let Some(d) = data {
                rels.extend(getzler_relations(n, k, d));
            }
            let r = relation_rank(n, k, &rels);
            BettiRow { codim: k, generators: gens, relation_rank: r, betti: gens - r }
        })
        .collect()
}

/// Even Betti numbers as coranks of both relation families.
pub fn even_betti(n: usize) -> Vec<usize> {
    betti_table(n, Some(&GetzlerRelationData::bundled())).into_iter().map(|r| r.betti).collect()
}

/// Coranks using WDVV relations only.
pub fn even_betti_without_getzler(n: usize) -> Vec<usize> {
    betti_table(n, None).into_iter().map(|r| r.betti).collect()
}

/// All permutations of `1..=n` as image lists.
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for i in 1..=n as u32 {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out.sort();
    out
}

/// Sum of all leg relabelings of `v`.
pub fn symmetrize(v: &StrataVector) -> StrataVector {
    let perms = permutations(v.n());
    let parts: Vec<StrataVector> = perms.par_iter().map(|s| v.relabel(s)).collect();
    let mut out = StrataVector::zero(v.n(), v.codim());
    for p in &parts {
        out.add(p);
    }
    out
}
