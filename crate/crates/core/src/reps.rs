//! Symmetric-group and SL2 representations.
//!
//! SL2 modules are kept semisimple: a multiset of Tate-twisted irreducibles
//! `V_k(-m)`, where `V_k` is the `k`-th symmetric power of the standard
//! representation and `(-m)` shifts the Hodge weight by `2m`. Symmetric-group
//! modules are multisets of Specht modules indexed by partitions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error("parts must be positive and weakly decreasing, got {0:?}")]
    BadPartition(Vec<u32>),
    #[error("partition {lambda} has size {found}, expected {expected}")]
    WrongSize { lambda: Partition, expected: usize, found: usize },
    #[error("character is missing the class {0}")]
    MissingClass(Partition),
    #[error("character is inconsistent: multiplicity of {lambda} would be {value}")]
    InconsistentCharacter { lambda: Partition, value: String },
}

/// A weakly decreasing list of positive integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, RepError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(RepError::BadPartition(parts));
        }
        Ok(Partition(parts))
    }

    /// Sorts and drops zeros.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((1..=first).map(|c| self.0.iter().filter(|&&p| p >= c).count() as u32).collect())
    }

    /// Dimension of the Specht module, by the hook length formula.
    pub fn dimension(&self) -> u64 {
        let n = self.size();
        let conj = self.conjugate();
        let mut num = BigInt::from(1);
        for k in 2..=n {
            num *= k;
        }
        let mut hooks = BigInt::from(1);
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row as usize {
                let arm = row as usize - j - 1;
                let leg = conj.0[j] as usize - i - 1;
                hooks *= arm + leg + 1;
            }
        }
        (num / hooks).to_u64().expect("dimension fits in u64")
    }

    /// Partitions obtained by removing one corner box.
    pub fn remove_corner(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            let next = self.0.get(i + 1).copied().unwrap_or(0);
            if self.0[i] > next {
                let mut p = self.0.clone();
                p[i] -= 1;
                out.push(Partition::from_unsorted(p));
            }
        }
        out
    }

    /// Partitions obtained by adding one box.
    pub fn add_box(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..=self.0.len() {
            let cur = self.0.get(i).copied().unwrap_or(0);
            if i == 0 || self.0[i - 1] > cur {
                let mut p = self.0.clone();
                if i == p.len() {
                    p.push(1);
                } else {
                    p[i] += 1;
                }
                out.push(Partition(p));
            }
        }
        out
    }

    /// Order of the centralizer of a permutation with this cycle type.
    pub fn centralizer_order(&self) -> BigInt {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in &self.0 {
            *counts.entry(p).or_default() += 1;
        }
        let mut z = BigInt::from(1);
        for (part, m) in counts {
            for k in 1..=m {
                z *= BigInt::from(part) * BigInt::from(k);
            }
        }
        z
    }

    /// A permutation of `0..n` with this cycle type, as an image table.
    pub fn representative(&self) -> Vec<usize> {
        let mut perm = Vec::with_capacity(self.size());
        let mut start = 0;
        for &p in &self.0 {
            let p = p as usize;
            for i in 0..p {
                perm.push(start + (i + 1) % p);
            }
            start += p;
        }
        perm
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{self}")
    }
}

/// All partitions of `n`, in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            cur.push(p);
            go(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n as u32, n as u32, &mut Vec::new(), &mut out);
    out
}

/// Finite-dimensional representation of S_n, as multiplicities of irreducibles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnModule {
    n: usize,
    summands: BTreeMap<Partition, u64>,
}

impl SnModule {
    pub fn zero(n: usize) -> Self {
        SnModule { n, summands: BTreeMap::new() }
    }

    pub fn irreducible(lambda: Partition) -> Self {
        let mut m = SnModule::zero(lambda.size());
        m.add(lambda, 1).expect("size matches");
        m
    }

    pub fn from_summands(
        n: usize,
        summands: impl IntoIterator<Item = (Partition, u64)>,
    ) -> Result<Self, RepError> {
        let mut m = SnModule::zero(n);
        for (l, k) in summands {
            m.add(l, k)?;
        }
        Ok(m)
    }

    pub fn add(&mut self, lambda: Partition, mult: u64) -> Result<(), RepError> {
        if lambda.size() != self.n {
            return Err(RepError::WrongSize { expected: self.n, found: lambda.size(), lambda });
        }
        if mult > 0 {
            *self.summands.entry(lambda).or_default() += mult;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn multiplicity(&self, lambda: &Partition) -> u64 {
        self.summands.get(lambda).copied().unwrap_or(0)
    }

    pub fn summands(&self) -> impl Iterator<Item = (&Partition, u64)> {
        self.summands.iter().map(|(l, &m)| (l, m))
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn dimension(&self) -> u64 {
        self.summands.iter().map(|(l, m)| m * l.dimension()).sum()
    }

    pub fn direct_sum(&self, other: &SnModule) -> SnModule {
        assert_eq!(self.n, other.n, "direct sum of modules over different groups");
        let mut out = self.clone();
        for (l, m) in other.summands() {
            out.add(l.clone(), m).expect("same n");
        }
        out
    }

    /// Character value on the class of the given cycle type.
    pub fn character(&self, cycle_type: &Partition) -> i64 {
        self.summands
            .iter()
            .map(|(l, &m)| m as i64 * irreducible_character(l, cycle_type))
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let summands: Vec<_> = self
            .summands
            .iter()
            .map(|(l, m)| SnSummandJson { lambda: l.0.clone(), mult: *m })
            .collect();
        serde_json::json!({ "sn": { "n": self.n, "summands": summands } })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let body = v.get("sn").ok_or("missing \"sn\"")?;
        let parsed: SnModuleJson = serde_json::from_value(body.clone()).map_err(|e| e.to_string())?;
        let mut m = SnModule::zero(parsed.n);
        for s in parsed.summands {
            let l = Partition::new(s.lambda).map_err(|e| e.to_string())?;
            m.add(l, s.mult).map_err(|e| e.to_string())?;
        }
        Ok(m)
    }
}

impl fmt::Display for SnModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, m)) in self.summands.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *m > 1 {
                write!(f, "{m}")?;
            }
            write!(f, "V{l}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SnSummandJson {
    lambda: Vec<u32>,
    mult: u64,
}

#[derive(Serialize, Deserialize)]
struct SnModuleJson {
    n: usize,
    summands: Vec<SnSummandJson>,
}

static CHARACTER_CACHE: Mutex<Option<HashMap<(Partition, Partition), i64>>> = Mutex::new(None);

/// Irreducible character `chi^lambda` on the class `mu`, by Murnaghan–Nakayama.
///
/// Rim hooks are removed on the beta-set (abacus) of `lambda`: a hook of
/// length `r` is a bead at position `b` moving to an empty `b - r`, with
/// sign given by the parity of the beads jumped over.
pub fn irreducible_character(lambda: &Partition, mu: &Partition) -> i64 {
    assert_eq!(lambda.size(), mu.size(), "character of mismatched sizes");
    let key = (lambda.clone(), mu.clone());
    if let Some(v) = CHARACTER_CACHE.lock().unwrap().as_ref().and_then(|c| c.get(&key)) {
        return *v;
    }
    let v = mn_rec(lambda, mu.parts());
    CHARACTER_CACHE.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, v);
    v
}

fn mn_rec(lambda: &Partition, mu: &[u32]) -> i64 {
    let Some((&r, rest)) = mu.split_first() else {
        return if lambda.is_empty() { 1 } else { 0 };
    };
    let len = lambda.len();
    let beta: Vec<i64> =
        lambda.0.iter().enumerate().map(|(i, &p)| p as i64 + (len - 1 - i) as i64).collect();
    let r = r as i64;
    let mut total = 0;
    for (i, &b) in beta.iter().enumerate() {
        let target = b - r;
        if target < 0 || beta.contains(&target) {
            continue;
        }
        let jumped = beta.iter().filter(|&&x| x > target && x < b).count();
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        let mut nb = beta.clone();
        nb[i] = target;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let k = nb.len();
        let parts: Vec<u32> = nb.iter().enumerate().map(|(j, &x)| (x - (k - 1 - j) as i64) as u32).collect();
        total += sign * mn_rec(&Partition::from_unsorted(parts), rest);
    }
    total
}

/// Splits a class function into irreducible multiplicities.
pub fn decompose_character(
    n: usize,
    character: &BTreeMap<Partition, Rational>,
) -> Result<SnModule, RepError> {
    let classes = partitions(n);
    for c in &classes {
        if !character.contains_key(c) {
            return Err(RepError::MissingClass(c.clone()));
        }
    }
    let mut out = SnModule::zero(n);
    for lambda in &classes {
        let mut ip = Rational::zero();
        for mu in &classes {
            let chi = irreducible_character(lambda, mu);
            if chi == 0 {
                continue;
            }
            ip += &character[mu] * Rational::new(BigInt::from(chi), mu.centralizer_order());
        }
        if !ip.is_integer() || ip < Rational::zero() {
            return Err(RepError::InconsistentCharacter {
                lambda: lambda.clone(),
                value: crate::linalg::format_rational(&ip),
            });
        }
        let m = ip.to_integer().to_u64().expect("multiplicity fits in u64");
        out.add(lambda.clone(), m)?;
    }
    Ok(out)
}

/// Induction from S_m × S_|lambda| of trivial ⊠ V_lambda: add a horizontal strip of size `m`.
pub fn pieri_induce(m: usize, lambda: &Partition) -> SnModule {
    let n = m + lambda.size();
    let mut out = SnModule::zero(n);
    let lam = &lambda.0;
    let rows = lam.len() + 1;
    fn go(
        row: usize,
        left: usize,
        lam: &[u32],
        rows: usize,
        cur: &mut Vec<u32>,
        out: &mut SnModule,
    ) {
        if row == rows {
            if left == 0 {
                out.add(Partition::from_unsorted(cur.clone()), 1).expect("size matches");
            }
            return;
        }
        let base = lam.get(row).copied().unwrap_or(0);
        // horizontal strip: lam[row] <= mu[row] <= lam[row - 1]
        let cap = if row == 0 { base as usize + left } else { lam[row - 1] as usize };
        for extra in 0..=left.min(cap.saturating_sub(base as usize)) {
            cur.push(base + extra as u32);
            go(row + 1, left - extra, lam, rows, cur, out);
            cur.pop();
        }
    }
    go(0, m, lam, rows, &mut Vec::new(), &mut out);
    out
}

/// Restriction from S_n to S_{n-1}: remove a corner box in all ways.
pub fn restrict(module: &SnModule) -> SnModule {
    assert!(module.n >= 1, "cannot restrict from S_0");
    let mut out = SnModule::zero(module.n - 1);
    for (l, m) in module.summands() {
        for mu in l.remove_corner() {
            out.add(mu, m).expect("size matches");
        }
    }
    out
}

/// Looks for an S_{n+1}-module whose restriction is exactly `module`.
///
/// Bounded exhaustive search: the multiplicity of a candidate `mu` can be no
/// larger than the smallest remaining multiplicity among the constituents of
/// its restriction.
pub fn is_restriction(module: &SnModule) -> Option<SnModule> {
    let n = module.n;
    let candidates: Vec<(Partition, Vec<Partition>)> = partitions(n + 1)
        .into_iter()
        .map(|mu| {
            let res = mu.remove_corner();
            (mu, res)
        })
        .filter(|(_, res)| res.iter().all(|nu| module.multiplicity(nu) > 0))
        .collect();
    let mut remaining: BTreeMap<Partition, u64> =
        module.summands().map(|(l, m)| (l.clone(), m)).collect();
    let mut chosen = vec![0u64; candidates.len()];

    fn search(
        idx: usize,
        candidates: &[(Partition, Vec<Partition>)],
        remaining: &mut BTreeMap<Partition, u64>,
        chosen: &mut Vec<u64>,
    ) -> bool {
        if remaining.values().all(|&m| m == 0) {
            return true;
        }
        if idx == candidates.len() {
            return false;
        }
        // every remaining constituent must still be coverable by some later candidate
        for (nu, &m) in remaining.iter() {
            if m > 0 && !candidates[idx..].iter().any(|(_, res)| res.contains(nu)) {
                return false;
            }
        }
        let res = &candidates[idx].1;
        let bound = res.iter().map(|nu| remaining.get(nu).copied().unwrap_or(0)).min().unwrap_or(0);
        for k in (0..=bound).rev() {
            for nu in res {
                *remaining.get_mut(nu).unwrap() -= k;
            }
            chosen[idx] = k;
            if search(idx + 1, candidates, remaining, chosen) {
                return true;
            }
            for nu in res {
                *remaining.get_mut(nu).unwrap() += k;
            }
        }
        chosen[idx] = 0;
        false
    }

    if search(0, &candidates, &mut remaining, &mut chosen) {
        let mut w = SnModule::zero(n + 1);
        for ((mu, _), k) in candidates.into_iter().zip(chosen) {
            w.add(mu, k).expect("size matches");
        }
        Some(w)
    } else {
        None
    }
}

/// Semisimple SL2 module: multiplicities of `V_k(-m)` keyed by `(k, m)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sl2Rep {
    summands: BTreeMap<(u32, u32), u64>,
}

impl Sl2Rep {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `V_k(-twist)`.
    pub fn irreducible(k: u32, twist: u32) -> Self {
        let mut r = Sl2Rep::zero();
        r.add(k, twist, 1);
        r
    }

    pub fn add(&mut self, k: u32, twist: u32, mult: u64) {
        if mult > 0 {
            *self.summands.entry((k, twist)).or_default() += mult;
        }
    }

    pub fn multiplicity(&self, k: u32, twist: u32) -> u64 {
        self.summands.get(&(k, twist)).copied().unwrap_or(0)
    }

    pub fn summands(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.summands.iter().map(|(&km, &m)| (km, m))
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn dimension(&self) -> u64 {
        self.summands.iter().map(|(&(k, _), &m)| m * (k as u64 + 1)).sum()
    }

    /// Multiplicity of the trivial representation, across all twists.
    pub fn invariants(&self) -> u64 {
        self.summands.iter().filter(|((k, _), _)| *k == 0).map(|(_, &m)| m).sum()
    }

    /// The common Hodge weight `k + 2m` of all summands, if there is one.
    pub fn pure_weight(&self) -> Option<u32> {
        let mut weights = self.summands.keys().map(|&(k, m)| k + 2 * m);
        let w = weights.next()?;
        weights.all(|x| x == w).then_some(w)
    }

    pub fn is_pure_of_weight(&self, w: u32) -> bool {
        self.summands.keys().all(|&(k, m)| k + 2 * m == w)
    }

    pub fn direct_sum(&self, other: &Sl2Rep) -> Sl2Rep {
        let mut out = self.clone();
        for ((k, m), c) in other.summands() {
            out.add(k, m, c);
        }
        out
    }

    /// Multiset of torus weights, as a map weight -> multiplicity.
    pub fn torus_weights(&self) -> BTreeMap<i64, u64> {
        let mut out = BTreeMap::new();
        for (&(k, _), &m) in &self.summands {
            let k = k as i64;
            for w in (-k..=k).step_by(2) {
                *out.entry(w).or_default() += m;
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "sl2": self.summand_list() })
    }

    pub fn summand_list(&self) -> Vec<serde_json::Value> {
        self.summands
            .iter()
            .map(|(&(k, m), &c)| serde_json::json!({"k": k, "twist": m, "mult": c}))
            .collect()
    }

    pub fn from_summand_list(list: &serde_json::Value) -> Result<Self, String> {
        #[derive(Deserialize)]
        struct S {
            k: u32,
            twist: u32,
            mult: u64,
        }
        let items: Vec<S> = serde_json::from_value(list.clone()).map_err(|e| e.to_string())?;
        let mut r = Sl2Rep::zero();
        for s in items {
            r.add(s.k, s.twist, s.mult);
        }
        Ok(r)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        Self::from_summand_list(v.get("sl2").ok_or("missing \"sl2\"")?)
    }
}

impl fmt::Display for Sl2Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(k, m), &c)) in self.summands.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c > 1 {
                write!(f, "{c}")?;
            }
            if k == 0 {
                write!(f, "Q")?;
            } else {
                write!(f, "V{k}")?;
            }
            if m > 0 {
                write!(f, "(-{m})")?;
            }
        }
        Ok(())
    }
}

/// Tensor product, via `V_a(-s) ⊗ V_b(-t) = ⊕_{i ≤ min(a,b)} V_{a+b-2i}(-s-t-i)`.
pub fn clebsch_gordan(a: &Sl2Rep, b: &Sl2Rep) -> Sl2Rep {
    let mut out = Sl2Rep::zero();
    for ((ka, sa), ma) in a.summands() {
        for ((kb, sb), mb) in b.summands() {
            for i in 0..=ka.min(kb) {
                out.add(ka + kb - 2 * i, sa + sb + i, ma * mb);
            }
        }
    }
    out
}

/// Decomposes `H^{⊗p}` for the two-dimensional odd-degree space `H = V_1`.
///
/// Only two-row shapes `(a, b)` contribute; the Schur functor is
/// `V_{a-b}(-b)` and, because `H` sits in odd degree, it is paired with the
/// Specht module of the conjugate shape.
pub fn schur_weyl(p: usize) -> Vec<(Sl2Rep, Partition)> {
    let mut out = Vec::new();
    for b in 0..=p / 2 {
        let a = p - b;
        let shape = Partition::from_unsorted(vec![a as u32, b as u32]);
        out.push((Sl2Rep::irreducible((a - b) as u32, b as u32), shape.conjugate()));
    }
    out
}
