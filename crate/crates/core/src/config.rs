//! The Cohen–Taylor model for configuration spaces of a once-punctured
//! elliptic curve U.
//!
//! The algebra is generated by letters `a_i`, `b_i` (a symplectic basis of
//! H¹(U) pulled back from the i-th factor) and classes `ω_ij`, all odd.
//! Relations: `ω_ij = ω_ji`, `ω_ij² = 0`, the Arnold identity, products of
//! two letters at one position vanish (H²(U) = 0), and
//! `ω_ij x_i = ω_ij x_j`. A basis is given by forests of pairs `i < j` with
//! distinct `j`, and at most one letter per tree, placed at its minimum.
//!
//! `ω_ij` has bidegree (0,1) and Hodge weight 2, a letter has bidegree (1,0)
//! and weight 1. The torus of SL₂ acts with weight +1 on `a` and −1 on `b`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{rank, rat, BasisKey, Echelon, Rational, SparseMatrix, SparseVector};
use crate::reps::{decompose_character, partitions, Partition, RepError, Sl2Rep, SnModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    fn weight(self) -> i64 {
        match self {
            Letter::A => 1,
            Letter::B => -1,
        }
    }
}

/// An odd generator of the algebra; positions are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Omega(u8, u8),
    Letter(u8, Letter),
}

/// A normal-form monomial: pairs sorted by their strictly increasing second
/// index, then letters sorted by position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CTBasisElement {
    n: u8,
    pairs: Vec<(u8, u8)>,
    letters: Vec<(u8, Letter)>,
}

/// Integer combination of basis elements.
pub type Combination = BTreeMap<CTBasisElement, i64>;

impl CTBasisElement {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    pub fn letters(&self) -> &[(u8, Letter)] {
        &self.letters
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.letters.len(), self.pairs.len())
    }

    pub fn hodge_weight(&self) -> usize {
        self.letters.len() + 2 * self.pairs.len()
    }

    pub fn torus_weight(&self) -> i64 {
        self.letters.iter().map(|(_, l)| l.weight()).sum()
    }

    /// The monomial as a product of odd symbols in normal order.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.pairs
            .iter()
            .map(|&(i, j)| Symbol::Omega(i, j))
            .chain(self.letters.iter().map(|&(p, l)| Symbol::Letter(p, l)))
            .collect()
    }

    /// Parses a product of symbols into normal form.
    pub fn from_symbols(n: usize, symbols: &[Symbol]) -> Combination {
        normalize(n, symbols)
    }
}

impl fmt::Display for CTBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() && self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(i, j) in &self.pairs {
            write!(f, "{}w{i}{j}", if first { "" } else { "*" })?;
            first = false;
        }
        for &(p, l) in &self.letters {
            let c = if l == Letter::A { 'a' } else { 'b' };
            write!(f, "{}{c}{p}", if first { "" } else { "*" })?;
            first = false;
        }
        Ok(())
    }
}

/// Sorts by insertion, returning the Koszul sign, or `None` on a repeated item.
fn sort_with_sign<T: Ord>(v: &mut [T]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] >= v[j] {
            if v[j - 1] == v[j] {
                return None;
            }
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    Some(sign)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// Straightens a product of ω's into forests with distinct second indices.
fn reduce_omegas(mut pairs: Vec<(u8, u8)>, coeff: i64, out: &mut Vec<(Vec<(u8, u8)>, i64)>) {
    // sort by (j, i)
    let mut keyed: Vec<(u8, u8)> = pairs.iter().map(|&(i, j)| (j, i)).collect();
    let Some(sign) = sort_with_sign(&mut keyed) else { return };
    pairs = keyed.iter().map(|&(j, i)| (i, j)).collect();
    let coeff = coeff * sign;
    let top = pairs.iter().map(|&(_, j)| j as usize).max().unwrap_or(0);
    let mut parent: Vec<usize> = (0..=top).collect();
    for &(i, j) in &pairs {
        let (ri, rj) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
        if ri == rj {
            return;
        }
        parent[ri] = rj;
    }
    match (1..pairs.len()).find(|&t| pairs[t - 1].1 == pairs[t].1) {
        None => out.push((pairs, coeff)),
        Some(t) => {
            // ω_ik ω_jk = ω_ij ω_jk - ω_ij ω_ik
            let ((i, k), (j, _)) = (pairs[t - 1], pairs[t]);
            let mut first = pairs.clone();
            first[t - 1] = (i, j);
            first[t] = (j, k);
            reduce_omegas(first, coeff, out);
            let mut second = pairs;
            second[t - 1] = (i, j);
            second[t] = (i, k);
            reduce_omegas(second, -coeff, out);
        }
    }
}

/// Normal form of a product of odd symbols in `E_U(n)`.
pub fn normalize(n: usize, symbols: &[Symbol]) -> Combination {
    let mut out = Combination::new();
    normalize_into(n, symbols, 1, &mut out);
    out
}

fn normalize_into(n: usize, symbols: &[Symbol], coeff: i64, out: &mut Combination) {
    // move ω's in front of letters
    let mut sign = 1;
    let mut letters_seen = 0;
    let mut pairs = Vec::new();
    let mut letters = Vec::new();
    for s in symbols {
        match *s {
            Symbol::Omega(i, j) => {
                assert!(i != j && (i.max(j) as usize) <= n, "bad pair ({i},{j}) for n = {n}");
                if letters_seen % 2 == 1 {
                    sign = -sign;
                }
                pairs.push((i.min(j), i.max(j)));
            }
            Symbol::Letter(p, l) => {
                assert!(p >= 1 && (p as usize) <= n, "bad position {p} for n = {n}");
                letters_seen += 1;
                letters.push((p, l));
            }
        }
    }
    let mut forests = Vec::new();
    reduce_omegas(pairs, coeff * sign, &mut forests);
    for (forest, c) in forests {
        let mut parent: Vec<usize> = (0..=n).collect();
        for &(i, j) in &forest {
            let (ri, rj) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
            // union keeping the smaller root, which is then the block minimum
            let (lo, hi) = (ri.min(rj), ri.max(rj));
            parent[hi] = lo;
        }
        let mut rooted: Vec<(u8, Letter)> =
            letters.iter().map(|&(p, l)| (find(&mut parent, p as usize) as u8, l)).collect();
        // letters at one position multiply to zero, whatever their kind
        let mut positions: Vec<u8> = rooted.iter().map(|&(p, _)| p).collect();
        let Some(s) = sort_with_sign(&mut positions) else { continue };
        rooted.sort_by_key(|&(p, _)| p);
        let e = CTBasisElement { n: n as u8, pairs: forest, letters: rooted };
        let entry = out.entry(e.clone()).or_insert(0);
        *entry += c * s;
        if *entry == 0 {
            out.remove(&e);
        }
    }
}

/// All basis elements of bidegree `(p, q)`, sorted.
pub fn basis(n: usize, p: usize, q: usize) -> Vec<CTBasisElement> {
    let mut out = Vec::new();
    if n == 0 || q >= n || p + q > n {
        return out;
    }
    // each j in 2..=n either starts a tree or attaches to some i < j
    let mut choice = vec![0usize; n + 1];
    loop {
        let pairs: Vec<(u8, u8)> =
            (2..=n).filter(|&j| choice[j] > 0).map(|j| (choice[j] as u8, j as u8)).collect();
        if pairs.len() == q {
            let mut parent: Vec<usize> = (0..=n).collect();
            for &(i, j) in &pairs {
                let r = find(&mut parent, i as usize);
                parent[j as usize] = r;
            }
            let minima: Vec<u8> = (1..=n).filter(|&v| find(&mut parent, v) == v).map(|v| v as u8).collect();
            for mask in 0u64..(1 << minima.len()) {
                if mask.count_ones() as usize != p {
                    continue;
                }
                let chosen: Vec<u8> = (0..minima.len()).filter(|&b| mask >> b & 1 == 1).map(|b| minima[b]).collect();
                for kinds in 0u64..(1 << p) {
                    let letters = chosen
                        .iter()
                        .enumerate()
                        .map(|(t, &m)| (m, if kinds >> t & 1 == 0 { Letter::A } else { Letter::B }))
                        .collect();
                    out.push(CTBasisElement { n: n as u8, pairs: pairs.clone(), letters });
                }
            }
        }
        // advance the mixed-radix counter; digit j ranges over 0..j
        let mut j = 2;
        while j <= n {
            choice[j] += 1;
            if choice[j] < j {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
        if j > n {
            break;
        }
    }
    out.sort();
    out
}

/// The differential: `d ω_ij = a_i b_j − b_i a_j`, `d` of a letter is zero,
/// extended as an odd derivation.
pub fn differential(x: &CTBasisElement) -> Combination {
    let n = x.n();
    let mut out = Combination::new();
    let rest: Vec<Symbol> = x.letters.iter().map(|&(p, l)| Symbol::Letter(p, l)).collect();
    for k in 0..x.pairs.len() {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let (i, j) = x.pairs[k];
        for (first, second, s) in [(Letter::A, Letter::B, 1), (Letter::B, Letter::A, -1)] {
            let mut syms: Vec<Symbol> =
                x.pairs.iter().enumerate().filter(|&(t, _)| t != k).map(|(_, &(u, v))| Symbol::Omega(u, v)).collect();
            syms.push(Symbol::Letter(i, first));
            syms.push(Symbol::Letter(j, second));
            syms.extend(rest.iter().copied());
            normalize_into(n, &syms, sign * s, &mut out);
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Applies `d` to a combination.
pub fn differential_of(v: &Combination) -> Combination {
    let mut out = Combination::new();
    for (x, c) in v {
        for (y, d) in differential(x) {
            *out.entry(y).or_insert(0) += c * d;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Relabels positions by `sigma` (0-based images of positions `1..=n`).
pub fn permute(x: &CTBasisElement, sigma: &[usize]) -> Combination {
    let n = x.n();
    assert_eq!(sigma.len(), n);
    let map = |p: u8| (sigma[p as usize - 1] + 1) as u8;
    let syms: Vec<Symbol> = x
        .symbols()
        .into_iter()
        .map(|s| match s {
            Symbol::Omega(i, j) => Symbol::Omega(map(i), map(j)),
            Symbol::Letter(p, l) => Symbol::Letter(map(p), l),
        })
        .collect();
    normalize(n, &syms)
}

/// The raising operator: `b ↦ a`, `a ↦ 0`, as an even derivation.
pub fn raise(x: &CTBasisElement) -> Combination {
    let mut out = Combination::new();
    for (t, &(_, l)) in x.letters.iter().enumerate() {
        if l == Letter::B {
            let mut y = x.clone();
            y.letters[t].1 = Letter::A;
            *out.entry(y).or_insert(0) += 1;
        }
    }
    out
}

/// Forgetful pullback along an injection of positions `[n] → [target_n]`
/// (0-based images).
pub fn pullback(x: &CTBasisElement, target_n: usize, injection: &[usize]) -> Combination {
    assert_eq!(injection.len(), x.n(), "injection must be defined on every position");
    let mut seen = vec![false; target_n];
    for &t in injection {
        assert!(t < target_n && !std::mem::replace(&mut seen[t], true), "injection is not injective");
    }
    let map = |p: u8| (injection[p as usize - 1] + 1) as u8;
    let syms: Vec<Symbol> = x
        .symbols()
        .into_iter()
        .map(|s| match s {
            Symbol::Omega(i, j) => Symbol::Omega(map(i), map(j)),
            Symbol::Letter(p, l) => Symbol::Letter(map(p), l),
        })
        .collect();
    normalize(target_n, &syms)
}

/// Bases and differentials of `E_U(n)`, indexed per bidegree.
pub struct CtComplex {
    n: usize,
    bases: BTreeMap<(usize, usize), Vec<CTBasisElement>>,
    index: HashMap<CTBasisElement, usize>,
}

/// One entry of a page: its dimension and SL₂ decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageEntry {
    pub p: usize,
    pub q: usize,
    pub dim: u64,
    pub sl2: Sl2Rep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtPage {
    pub n: usize,
    pub page: u8,
    pub entries: BTreeMap<(usize, usize), PageEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    p: usize,
    q: usize,
    dim: u64,
    sl2: serde_json::Value,
}

impl CtPage {
    pub fn entry(&self, p: usize, q: usize) -> Option<&PageEntry> {
        self.entries.get(&(p, q))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .values()
            .map(|e| serde_json::json!({"p": e.p, "q": e.q, "dim": e.dim, "sl2": e.sl2.summand_list()}))
            .collect();
        serde_json::json!({ "n": self.n, "page": self.page, "entries": entries })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let n = v["n"].as_u64().ok_or("missing n")? as usize;
        let page = v["page"].as_u64().ok_or("missing page")? as u8;
        let raw: Vec<EntryJson> = serde_json::from_value(v["entries"].clone()).map_err(|e| e.to_string())?;
        let mut entries = BTreeMap::new();
        for e in raw {
            let sl2 = Sl2Rep::from_summand_list(&e.sl2)?;
            if sl2.dimension() != e.dim {
                return Err(format!("entry ({},{}) has dim {} but its SL2 summands give {}", e.p, e.q, e.dim, sl2.dimension()));
            }
            entries.insert((e.p, e.q), PageEntry { p: e.p, q: e.q, dim: e.dim, sl2 });
        }
        Ok(CtPage { n, page, entries })
    }
}

fn weight_profile_to_sl2(h: &BTreeMap<i64, u64>, hodge_weight: usize) -> Sl2Rep {
    let mut rep = Sl2Rep::zero();
    let get = |w: i64| h.get(&w).copied().unwrap_or(0);
    for (&w, _) in h.range(0..) {
        let m = get(w) - get(w + 2);
        if m > 0 {
            let twist = (hodge_weight as i64 - w) / 2;
            rep.add(w as u32, twist as u32, m);
        }
    }
    rep
}

fn key(i: usize) -> BasisKey {
    BasisKey::from_index(i)
}

fn combination_to_sparse(c: &Combination, index: &HashMap<CTBasisElement, usize>) -> SparseVector {
    c.iter().map(|(x, &v)| (key(index[x]), rat(v))).collect()
}

impl CtComplex {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one point");
        let degrees: Vec<(usize, usize)> =
            (0..n).flat_map(|q| (0..=n - q).map(move |p| (p, q))).collect();
        let bases: BTreeMap<(usize, usize), Vec<CTBasisElement>> =
            degrees.par_iter().map(|&(p, q)| ((p, q), basis(n, p, q))).collect();
        let mut index = HashMap::new();
        for b in bases.values() {
            for (i, x) in b.iter().enumerate() {
                index.insert(x.clone(), i);
            }
        }
        CtComplex { n, bases, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self, p: usize, q: usize) -> &[CTBasisElement] {
        self.bases.get(&(p, q)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn index_of(&self, x: &CTBasisElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    fn columns(&self, p: usize, q: usize) -> Arc<std::collections::BTreeSet<BasisKey>> {
        Arc::new((0..self.basis(p, q).len()).map(key).collect())
    }

    fn to_sparse(&self, c: &Combination) -> SparseVector {
        combination_to_sparse(c, &self.index)
    }

    /// Image of `d` on the torus-weight-`w` part of `E^{p,q}`, as rows in `E^{p+2,q-1}`.
    fn image_rows(&self, p: usize, q: usize, w: Option<i64>) -> SparseMatrix {
        let cols = if q == 0 { Arc::new(Default::default()) } else { self.columns(p + 2, q - 1) };
        let mut m = SparseMatrix::with_shared_columns(cols);
        for x in self.basis(p, q) {
            if w.is_some_and(|w| x.torus_weight() != w) {
                continue;
            }
            let d = differential(x);
            if !d.is_empty() {
                m.push_row(self.to_sparse(&d)).expect("differential lands in the next bidegree");
            }
        }
        m
    }

    fn weight_dims(&self, p: usize, q: usize) -> BTreeMap<i64, u64> {
        let mut h = BTreeMap::new();
        for x in self.basis(p, q) {
            *h.entry(x.torus_weight()).or_insert(0) += 1;
        }
        h
    }

    pub fn page2_entry(&self, p: usize, q: usize) -> PageEntry {
        let h = self.weight_dims(p, q);
        let sl2 = weight_profile_to_sl2(&h, p + 2 * q);
        PageEntry { p, q, dim: h.values().sum(), sl2 }
    }

    /// Dimensions of the cohomology at `(p, q)` per torus weight.
    fn cohomology_weights(&self, p: usize, q: usize) -> BTreeMap<i64, u64> {
        let e = self.weight_dims(p, q);
        let mut h = BTreeMap::new();
        for (&w, &dim) in &e {
            let out_rank = if q == 0 { 0 } else { rank(&self.image_rows(p, q, Some(w))) };
            let in_rank = if p < 2 { 0 } else { rank(&self.image_rows(p - 2, q + 1, Some(w))) };
            let d = dim - out_rank as u64 - in_rank as u64;
            if d > 0 {
                h.insert(w, d);
            }
        }
        h
    }

    pub fn page3_entry(&self, p: usize, q: usize) -> PageEntry {
        let h = self.cohomology_weights(p, q);
        let sl2 = weight_profile_to_sl2(&h, p + 2 * q);
        PageEntry { p, q, dim: h.values().sum(), sl2 }
    }

    pub fn bidegrees(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bases.keys().copied()
    }

    pub fn page(&self, page: u8) -> CtPage {
        assert!(page == 2 || page == 3, "only pages 2 and 3 exist");
        let degrees: Vec<_> = self.bidegrees().collect();
        let entries = degrees
            .par_iter()
            .map(|&(p, q)| ((p, q), if page == 2 { self.page2_entry(p, q) } else { self.page3_entry(p, q) }))
            .collect();
        CtPage { n: self.n, page, entries }
    }

    /// Applies a permutation (0-based images) to a sparse vector over `E^{p,q}`.
    fn act(&self, p: usize, q: usize, sigma: &[usize], v: &SparseVector) -> SparseVector {
        let b = self.basis(p, q);
        let mut out = SparseVector::new();
        for (k, c) in v.iter() {
            let i = k.as_bytes().iter().fold(0usize, |acc, &x| acc << 8 | x as usize);
            let img = permute(&b[i], sigma);
            out.add_scaled(&self.to_sparse(&img), c);
        }
        out
    }

    fn trace_on_span(&self, p: usize, q: usize, sigma: &[usize], rows: &SparseMatrix) -> Rational {
        let ech = Echelon::new(rows);
        let mut tr = Rational::zero();
        for (i, b) in ech.basis().iter().enumerate() {
            let img = self.act(p, q, sigma, b);
            let coords = ech.coordinates(&img).expect("the image of d is stable under permutations");
            tr += &coords[i];
        }
        tr
    }

    fn trace_on_weight(&self, p: usize, q: usize, sigma: &[usize], w: i64) -> Rational {
        let mut tr = Rational::zero();
        for x in self.basis(p, q).iter().filter(|x| x.torus_weight() == w) {
            if let Some(&c) = permute(x, sigma).get(x) {
                tr += rat(c);
            }
        }
        if q > 0 {
            tr -= self.trace_on_span(p + 2, q - 1, sigma, &self.image_rows(p, q, Some(w)));
        }
        if p >= 2 {
            tr -= self.trace_on_span(p, q, sigma, &self.image_rows(p - 2, q + 1, Some(w)));
        }
        tr
    }

    /// Trace of a permutation of the given cycle type on the cohomology at
    /// `(p, q)`, or on its SL₂-invariant part.
    pub fn sn_character(&self, p: usize, q: usize, cycle_type: &Partition, invariants_only: bool) -> Rational {
        assert_eq!(cycle_type.size(), self.n, "cycle type of the wrong size");
        let sigma = cycle_type.representative();
        if invariants_only {
            self.trace_on_weight(p, q, &sigma, 0) - self.trace_on_weight(p, q, &sigma, 2)
        } else {
            self.weight_dims(p, q).keys().map(|&w| self.trace_on_weight(p, q, &sigma, w)).sum()
        }
    }

    /// The S_n-module carried by the cohomology at `(p, q)` or its SL₂-invariants.
    pub fn sn_module(&self, p: usize, q: usize, invariants_only: bool) -> Result<SnModule, RepError> {
        let chars: BTreeMap<Partition, Rational> = partitions(self.n)
            .into_par_iter()
            .map(|mu| {
                let c = self.sn_character(p, q, &mu, invariants_only);
                (mu, c)
            })
            .collect();
        decompose_character(self.n, &chars)
    }

    /// For each total degree `i`: SL₂-invariant dimensions of the bottom-row
    /// class `gr^W_i H^i` and of the second-row class `gr^W_{i+1} H^i`.
    pub fn weight_row_report(&self) -> BTreeMap<usize, (u64, u64)> {
        (0..=self.n)
            .map(|i| {
                let bottom = self.page3_entry(i, 0).sl2.invariants();
                let second = if i >= 1 && self.n >= 2 { self.page3_entry(i - 1, 1).sl2.invariants() } else { 0 };
                (i, (bottom, second))
            })
            .collect()
    }
}

/// Multiplicity of trivial summands, any twist.
pub fn sl2_invariants(d: &Sl2Rep) -> u64 {
    d.invariants()
}

/// Page 2 or 3 of the spectral sequence for `F(U, n)`.
pub fn build_page(n: usize, page: u8) -> CtPage {
    CtComplex::new(n).page(page)
}

/// Integer vector of a combination, for callers that need rational coefficients.
pub fn combination_coefficients(c: &Combination) -> Vec<(CTBasisElement, Rational)> {
    c.iter().map(|(x, &v)| (x.clone(), rat(v))).collect()
}

/// Checks `value` is an exact small integer.
pub fn as_integer(r: &Rational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn om(i: u8, j: u8) -> Symbol {
        Symbol::Omega(i, j)
    }

    fn elem(n: u8, pairs: &[(u8, u8)], letters: &[(u8, Letter)]) -> CTBasisElement {
        CTBasisElement { n, pairs: pairs.to_vec(), letters: letters.to_vec() }
    }

    #[test]
    fn arnold_and_squares() {
        assert!(normalize(2, &[om(1, 2), om(1, 2)]).is_empty());
        assert!(normalize(3, &[om(1, 2), om(2, 3), om(1, 3)]).is_empty());
        // ω13 ω23 = ω12 ω23 - ω12 ω13
        let got = normalize(3, &[om(1, 3), om(2, 3)]);
        let want: Combination =
            [(elem(3, &[(1, 2), (2, 3)], &[]), 1), (elem(3, &[(1, 2), (1, 3)], &[]), -1)].into_iter().collect();
        assert_eq!(got, want);
        // the three Arnold terms sum to zero
        let mut total = Combination::new();
        for (s, c) in [([om(1, 2), om(2, 3)], 1), ([om(2, 3), om(1, 3)], 1), ([om(1, 3), om(1, 2)], 1)] {
            for (x, v) in normalize(3, &s) {
                *total.entry(x).or_insert(0) += c * v;
            }
        }
        total.retain(|_, c| *c != 0);
        assert!(total.is_empty());
    }

    #[test]
    fn letter_rules() {
        let l = |p, k| Symbol::Letter(p, k);
        assert!(normalize(2, &[l(1, Letter::A), l(1, Letter::B)]).is_empty());
        assert!(normalize(2, &[l(1, Letter::A), l(1, Letter::A)]).is_empty());
        // ω12 a2 = ω12 a1, and ω12 a1 b2 = 0
        assert_eq!(normalize(2, &[om(1, 2), l(2, Letter::A)]), normalize(2, &[om(1, 2), l(1, Letter::A)]));
        assert!(normalize(2, &[om(1, 2), l(1, Letter::A), l(2, Letter::B)]).is_empty());
        // odd symbols anticommute
        let ab = normalize(2, &[l(1, Letter::A), l(2, Letter::B)]);
        let ba = normalize(2, &[l(2, Letter::B), l(1, Letter::A)]);
        assert_eq!(ab.values().next(), Some(&1));
        assert_eq!(ba.values().next(), Some(&-1));
    }

    #[test]
    fn differential_of_omega() {
        let d = differential(&elem(2, &[(1, 2)], &[]));
        let want: Combination = [
            (elem(2, &[], &[(1, Letter::A), (2, Letter::B)]), 1),
            (elem(2, &[], &[(1, Letter::B), (2, Letter::A)]), -1),
        ]
        .into_iter()
        .collect();
        assert_eq!(d, want);
        assert!(differential(&elem(2, &[], &[(1, Letter::A), (2, Letter::B)])).is_empty());
    }

    #[test]
    fn d_squared_vanishes() {
        for n in 1..=4 {
            let c = CtComplex::new(n);
            for (p, q) in c.bidegrees().collect::<Vec<_>>() {
                for x in c.basis(p, q) {
                    assert!(differential_of(&differential(x)).is_empty(), "d^2 x != 0 for {x}");
                }
            }
        }
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(basis(2, 0, 1), vec![elem(2, &[(1, 2)], &[])]);
        assert_eq!(basis(1, 1, 0).len(), 2);
        let total: usize = CtComplex::new(4).bases.values().map(Vec::len).sum();
        assert_eq!(total, 3 * 4 * 5 * 6);
        for x in basis(3, 2, 1) {
            assert_eq!(x.hodge_weight(), 4);
            assert_eq!(normalize(3, &x.symbols()), [(x.clone(), 1)].into_iter().collect());
        }
    }

    #[test]
    fn small_pages() {
        let c = CtComplex::new(1);
        assert_eq!(c.page3_entry(0, 0).sl2, Sl2Rep::irreducible(0, 0));
        assert_eq!(c.page3_entry(1, 0).sl2, Sl2Rep::irreducible(1, 0));
        let c2 = CtComplex::new(2);
        assert_eq!(c2.page2_entry(0, 1).sl2, Sl2Rep::irreducible(0, 1));
        let t = Partition::new(vec![2]).unwrap();
        assert_eq!(c2.sn_character(0, 1, &t, false), rat(0), "ω12 is killed by d");
        // on the page-2 term the transposition fixes ω12
        let swapped = permute(&elem(2, &[(1, 2)], &[]), &[1, 0]);
        assert_eq!(swapped, [(elem(2, &[(1, 2)], &[]), 1)].into_iter().collect());
        for n in 1..=4 {
            assert_eq!(CtComplex::new(n).page3_entry(0, 0).sl2, Sl2Rep::irreducible(0, 0));
        }
    }

    #[test]
    fn pullback_identity_and_injective() {
        let x = elem(3, &[(1, 3)], &[(1, Letter::B), (2, Letter::A)]);
        assert_eq!(pullback(&x, 3, &[0, 1, 2]), [(x.clone(), 1)].into_iter().collect());
        let y = pullback(&x, 5, &[4, 0, 2]);
        assert_eq!(y.len(), 1);
        assert_eq!(differential_of(&y), {
            let mut acc = Combination::new();
            for (z, c) in differential(&x) {
                for (w, e) in pullback(&z, 5, &[4, 0, 2]) {
                    *acc.entry(w).or_insert(0) += c * e;
                }
            }
            acc.retain(|_, c| *c != 0);
            acc
        });
    }

    #[test]
    fn raising_commutes_with_d() {
        let c = CtComplex::new(3);
        for (p, q) in c.bidegrees().collect::<Vec<_>>() {
            for x in c.basis(p, q) {
                let lhs = differential_of(&raise(x));
                let mut rhs = Combination::new();
                for (y, v) in differential(x) {
                    for (z, w) in raise(&y) {
                        *rhs.entry(z).or_insert(0) += v * w;
                    }
                }
                rhs.retain(|_, c| *c != 0);
                let mut lhs_n = Combination::new();
                for (y, v) in lhs {
                    *lhs_n.entry(y).or_insert(0) += v;
                }
                lhs_n.retain(|_, c| *c != 0);
                assert_eq!(lhs_n, rhs);
            }
        }
    }

    #[test]
    fn invariant_count() {
        let mut r = Sl2Rep::irreducible(2, 1);
        r.add(2, 1, 2);
        r.add(0, 2, 1);
        assert_eq!(sl2_invariants(&r), 1);
        assert_eq!(sl2_invariants(&Sl2Rep::irreducible(3, 0)), 0);
    }
}
