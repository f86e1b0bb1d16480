//! Exact rational linear algebra over opaque basis keys.
//!
//! Vectors are sparse maps from [`BasisKey`] to [`Rational`]. A matrix fixes
//! its column key space at construction and every row must live in it. Rank
//! is computed by fraction-free elimination on integer rows (each row is
//! cleared of denominators and divided by its content after every update),
//! pivoting on the smallest column key. A modular fast path is available
//! for large inputs; it is cross-checked against the exact path in tests.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-1/2"` and friends.
pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let s = s.trim();
    let bad = || LinalgError::BadRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Renders `n` or `n/d` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("row key {0} is not in the matrix column space")]
    KeyOutsideColumnSpace(BasisKey),
    #[error("matrices have different column key spaces")]
    KeySpaceMismatch,
    #[error("malformed rational {0:?}")]
    BadRational(String),
}

/// Canonical encoding of a basis element, compared bytewise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey(Box<[u8]>);

impl BasisKey {
    pub fn new(bytes: impl Into<Box<[u8]>>) -> Self {
        BasisKey(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Key for a plain index, big-endian so that byte order is numeric order.
    pub fn from_index(i: usize) -> Self {
        BasisKey::new((i as u64).to_be_bytes().to_vec())
    }
}

impl fmt::Debug for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisKey(")?;
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVector {
    entries: BTreeMap<BasisKey, Rational>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (BasisKey, Rational)>>(entries: I) -> Self {
        let mut v = SparseVector::new();
        for (k, c) in entries {
            v.add_term(k, &c);
        }
        v
    }

    /// Adds `coeff` to the entry at `key`, dropping it if it cancels.
    pub fn add_term(&mut self, key: BasisKey, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SparseVector, factor: &Rational) {
        for (k, c) in &other.entries {
            self.add_term(k.clone(), &(c * factor));
        }
    }

    pub fn scaled(&self, factor: &Rational) -> SparseVector {
        if factor.is_zero() {
            return SparseVector::new();
        }
        SparseVector {
            entries: self.entries.iter().map(|(k, c)| (k.clone(), c * factor)).collect(),
        }
    }

    pub fn get(&self, key: &BasisKey) -> Rational {
        self.entries.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisKey, &Rational)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &BasisKey> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Clears denominators, divides by the content and makes the entry at the
    /// smallest key positive. The zero vector is left alone.
    pub fn normalized(&self) -> SparseVector {
        let ints = integer_row(self.entries.iter().map(|(k, c)| (k.clone(), c.clone())));
        SparseVector {
            entries: ints.into_iter().map(|(k, c)| (k, Rational::from_integer(c))).collect(),
        }
    }
}

impl FromIterator<(BasisKey, Rational)> for SparseVector {
    fn from_iter<T: IntoIterator<Item = (BasisKey, Rational)>>(iter: T) -> Self {
        SparseVector::from_entries(iter)
    }
}

#[derive(Clone, Debug)]
pub struct SparseMatrix {
    columns: Arc<BTreeSet<BasisKey>>,
    rows: Vec<SparseVector>,
}

impl SparseMatrix {
    pub fn new(columns: impl IntoIterator<Item = BasisKey>) -> Self {
        SparseMatrix { columns: Arc::new(columns.into_iter().collect()), rows: Vec::new() }
    }

    pub fn with_shared_columns(columns: Arc<BTreeSet<BasisKey>>) -> Self {
        SparseMatrix { columns, rows: Vec::new() }
    }

    pub fn from_rows(
        columns: impl IntoIterator<Item = BasisKey>,
        rows: impl IntoIterator<Item = SparseVector>,
    ) -> Result<Self, LinalgError> {
        let mut m = SparseMatrix::new(columns);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    /// Dense convenience constructor; columns are keyed by index.
    pub fn from_dense(ncols: usize, rows: &[Vec<Rational>]) -> Self {
        let mut m = SparseMatrix::new((0..ncols).map(BasisKey::from_index));
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            let v = row
                .iter()
                .enumerate()
                .map(|(j, c)| (BasisKey::from_index(j), c.clone()))
                .collect();
            m.rows.push(v);
        }
        m
    }

    pub fn push_row(&mut self, row: SparseVector) -> Result<(), LinalgError> {
        if let Some(k) = row.keys().find(|k| !self.columns.contains(*k)) {
            return Err(LinalgError::KeyOutsideColumnSpace(k.clone()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &Arc<BTreeSet<BasisKey>> {
        &self.columns
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    /// Rows become columns keyed by row index.
    pub fn transpose(&self) -> SparseMatrix {
        let col_index: BTreeMap<&BasisKey, usize> =
            self.columns.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut out: Vec<SparseVector> = vec![SparseVector::new(); self.columns.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for (k, c) in row.iter() {
                out[col_index[k]].add_term(BasisKey::from_index(i), c);
            }
        }
        SparseMatrix {
            columns: Arc::new((0..self.rows.len()).map(BasisKey::from_index).collect()),
            rows: out,
        }
    }

    fn same_space(&self, other: &SparseMatrix) -> bool {
        Arc::ptr_eq(&self.columns, &other.columns) || self.columns == other.columns
    }

    fn column_indices(&self) -> HashMap<&BasisKey, usize> {
        self.columns.iter().enumerate().map(|(i, k)| (k, i)).collect()
    }

    fn integer_rows(&self) -> Vec<IntRow> {
        let idx = self.column_indices();
        let mut rows: Vec<IntRow> = self
            .rows
            .iter()
            .map(|r| integer_row(r.iter().map(|(k, c)| (idx[k], c.clone()))))
            .filter(|r| !r.is_empty())
            .collect();
        // sparse rows first, dense rows last
        rows.sort_by_key(|r| r.len());
        rows
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// Clears denominators and content; the leading entry ends up positive.
fn integer_row<K: Ord + Clone>(entries: impl Iterator<Item = (K, Rational)>) -> Vec<(K, BigInt)> {
    let mut entries: Vec<(K, Rational)> = entries.filter(|(_, c)| !c.is_zero()).collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    if entries.is_empty() {
        return Vec::new();
    }
    let lcm = entries.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut ints: Vec<(K, BigInt)> = entries
        .into_iter()
        .map(|(k, c)| (k, c.numer() * (&lcm / c.denom())))
        .collect();
    normalize_int_row(&mut ints);
    ints
}

fn normalize_int_row<K>(row: &mut [(K, BigInt)]) {
    if row.is_empty() {
        return;
    }
    let mut g = BigInt::zero();
    for (_, c) in row.iter() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if row[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c /= &g;
        }
    }
}

/// `a * row - b * pivot`, assuming both have their leading entry in the same column.
fn eliminate(row: &IntRow, pivot: &IntRow) -> IntRow {
    let a = &pivot[0].1;
    let b = &row[0].1;
    let g = a.gcd(b);
    let (a, b) = (a / &g, b / &g);
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push((row[i].0, &a * &row[i].1));
            i += 1;
        } else if take_piv {
            out.push((pivot[j].0, -(&b * &pivot[j].1)));
            j += 1;
        } else {
            let c = &a * &row[i].1 - &b * &pivot[j].1;
            if !c.is_zero() {
                out.push((row[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    normalize_int_row(&mut out);
    out
}

/// Incremental fraction-free row reduction keeping one pivot row per leading column.
#[derive(Default)]
struct Reducer {
    pivots: HashMap<usize, IntRow>,
}

impl Reducer {
    /// Returns true when the row was independent of the pivots seen so far.
    fn insert(&mut self, mut row: IntRow) -> bool {
        while let Some(&(lead, _)) = row.first() {
            match self.pivots.get(&lead) {
                Some(p) => row = eliminate(&row, p),
                None => {
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
        false
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Dimension over Q of the row span.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut red = Reducer::default();
    for r in m.integer_rows() {
        red.insert(r);
    }
    red.rank()
}

/// `rank(a ∪ b) - rank(a)`: how many independent directions `b` adds.
pub fn intersect_rank(a: &SparseMatrix, b: &SparseMatrix) -> Result<usize, LinalgError> {
    if !a.same_space(b) {
        return Err(LinalgError::KeySpaceMismatch);
    }
    let mut red = Reducer::default();
    for r in a.integer_rows() {
        red.insert(r);
    }
    let base = red.rank();
    let idx = b.column_indices();
    let mut rows: Vec<IntRow> = b
        .rows
        .iter()
        .map(|r| integer_row(r.iter().map(|(k, c)| (idx[k], c.clone()))))
        .filter(|r| !r.is_empty())
        .collect();
    rows.sort_by_key(|r| r.len());
    for r in rows {
        red.insert(r);
    }
    Ok(red.rank() - base)
}

/// Primes below 2^62 used by the modular path.
const MODULI: [u64; 3] = [4611686018427387847, 4611686018427387817, 4611686018427387787];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    let m = x.mod_floor(&BigInt::from(p));
    m.to_u64().expect("residue fits in u64")
}

/// Rank modulo a single prime, or `None` if some denominator vanishes mod `p`.
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> Option<usize> {
    let idx = m.column_indices();
    let mut rows: Vec<Vec<(usize, u64)>> = Vec::with_capacity(m.rows.len());
    for r in &m.rows {
        let mut row = Vec::with_capacity(r.len());
        for (k, c) in r.iter() {
            let den = reduce_mod(c.denom(), p);
            if den == 0 {
                return None;
            }
            let v = mul_mod(reduce_mod(c.numer(), p), pow_mod(den, p - 2, p), p);
            if v != 0 {
                row.push((idx[k], v));
            }
        }
        row.sort_unstable_by_key(|e| e.0);
        if !row.is_empty() {
            rows.push(row);
        }
    }
    rows.sort_by_key(|r| r.len());
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for mut row in rows {
        while let Some(&(lead, lv)) = row.first() {
            let Some(piv) = pivots.get(&lead) else {
                let inv = pow_mod(lv, p - 2, p);
                for e in row.iter_mut() {
                    e.1 = mul_mod(e.1, inv, p);
                }
                pivots.insert(lead, row);
                break;
            };
            // piv is monic
            let mut out = Vec::with_capacity(row.len() + piv.len());
            let (mut i, mut j) = (1, 1);
            while i < row.len() || j < piv.len() {
                if j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0) {
                    out.push(row[i]);
                    i += 1;
                } else if i >= row.len() || piv[j].0 < row[i].0 {
                    out.push((piv[j].0, p - mul_mod(lv, piv[j].1, p)));
                    j += 1;
                } else {
                    let s = (row[i].1 + p - mul_mod(lv, piv[j].1, p)) % p;
                    if s != 0 {
                        out.push((row[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
            row = out;
        }
    }
    Some(pivots.len())
}

/// Multi-modular rank: the maximum of the ranks modulo a few large primes.
///
/// This is a lower bound for the rational rank that agrees with it unless
/// every prime divides some nonzero maximal minor. Use [`rank`] when an exact
/// certificate is needed.
pub fn rank_modular(m: &SparseMatrix) -> usize {
    MODULI.iter().filter_map(|&p| rank_mod_p(m, p)).max().unwrap_or_else(|| rank(m))
}

/// Reduced row echelon basis of a row span.
///
/// Every basis vector has a 1 at its own pivot column and 0 at all other
/// pivots, so the coordinate of any vector in the span along basis vector
/// `i` is simply its entry at pivot `i`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pivots: Vec<BasisKey>,
    basis: Vec<SparseVector>,
}

impl Echelon {
    pub fn new(m: &SparseMatrix) -> Self {
        let mut basis: BTreeMap<BasisKey, SparseVector> = BTreeMap::new();
        for row in m.rows() {
            let mut r = row.clone();
            for (pk, pv) in &basis {
                let c = r.get(pk);
                if !c.is_zero() {
                    r.add_scaled(pv, &-c);
                }
            }
            let Some((lead, lc)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
                continue;
            };
            let r = r.scaled(&lc.recip());
            for v in basis.values_mut() {
                let c = v.get(&lead);
                if !c.is_zero() {
                    v.add_scaled(&r, &-c);
                }
            }
            basis.insert(lead, r);
        }
        let (pivots, basis) = basis.into_iter().unzip();
        Echelon { pivots, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> &[BasisKey] {
        &self.pivots
    }

    pub fn basis(&self) -> &[SparseVector] {
        &self.basis
    }

    /// Coordinates of `v` in this basis, or `None` when `v` is not in the span.
    pub fn coordinates(&self, v: &SparseVector) -> Option<Vec<Rational>> {
        let coords: Vec<Rational> = self.pivots.iter().map(|k| v.get(k)).collect();
        let mut rest = v.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            rest.add_scaled(b, &-c);
        }
        rest.is_empty().then_some(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        SparseMatrix::from_dense(ncols, &rows)
    }

    #[test]
    fn zero_and_identity() {
        assert_eq!(rank(&dense(&[&[0, 0, 0], &[0, 0, 0]])), 0);
        assert_eq!(rank(&SparseMatrix::new(Vec::new())), 0);
        assert_eq!(rank(&dense(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])), 3);
    }

    #[test]
    fn single_arnold_row() {
        // w12 w13 - w12 w23 + w13 w23 over the three degree-two monomials
        assert_eq!(rank(&dense(&[&[1, -1, 1]])), 1);
    }

    #[test]
    fn incremental_rank_examples() {
        let a = dense(&[&[1, 0], &[0, 1]]);
        let b = SparseMatrix::from_rows(a.columns().iter().cloned(), dense(&[&[1, 1]]).rows().to_vec()).unwrap();
        assert_eq!(intersect_rank(&a, &b).unwrap(), 0);

        let empty = SparseMatrix::new(a.columns().iter().cloned());
        assert_eq!(intersect_rank(&empty, &a).unwrap(), 2);

        let a = dense(&[&[1, 0]]);
        let b = dense(&[&[1, 1], &[2, 1]]);
        assert_eq!(intersect_rank(&a, &b).unwrap(), 1);
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = dense(&[&[1, 0]]);
        let b = dense(&[&[1, 0, 0]]);
        assert_eq!(intersect_rank(&a, &b), Err(LinalgError::KeySpaceMismatch));
    }

    #[test]
    fn row_outside_space() {
        let mut m = SparseMatrix::new([BasisKey::from_index(0)]);
        let v = SparseVector::from_entries([(BasisKey::from_index(7), rat(1))]);
        assert!(matches!(m.push_row(v), Err(LinalgError::KeyOutsideColumnSpace(_))));
    }

    #[test]
    fn rational_entries() {
        let half = Rational::new(1.into(), 2.into());
        let third = Rational::new(1.into(), 3.into());
        let m = SparseMatrix::from_dense(
            2,
            &[vec![half.clone(), third.clone()], vec![rat(3), rat(2)]],
        );
        assert_eq!(rank(&m), 1);
        assert_eq!(rank_modular(&m), 1);
    }

    #[test]
    fn normalization_clears_content() {
        let v = SparseVector::from_entries([
            (BasisKey::from_index(0), Rational::new((-2).into(), 3.into())),
            (BasisKey::from_index(1), Rational::new(4.into(), 3.into())),
        ]);
        let n = v.normalized();
        assert_eq!(n.get(&BasisKey::from_index(0)), rat(1));
        assert_eq!(n.get(&BasisKey::from_index(1)), rat(-2));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-1/2").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("12").unwrap(), rat(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&Rational::new(6.into(), (-4).into())), "-3/2");
    }

    #[test]
    fn echelon_coordinates() {
        let m = dense(&[&[1, 2, 0], &[2, 4, 1], &[3, 6, 1]]);
        let e = Echelon::new(&m);
        assert_eq!(e.dim(), 2);
        let v = m.rows()[2].clone();
        let coords = e.coordinates(&v).unwrap();
        let mut back = SparseVector::new();
        for (c, b) in coords.iter().zip(e.basis()) {
            back.add_scaled(b, c);
        }
        assert_eq!(back, v);
        let outside = SparseVector::from_entries([(BasisKey::from_index(1), rat(1))]);
        assert!(e.coordinates(&outside).is_none());
    }
}
