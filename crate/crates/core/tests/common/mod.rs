//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use m1taut::graphs::StableGraph;
use m1taut::linalg::Rational;
use num_traits::{One, Zero};

/// Vertex-level graph: genera, the vertex of each leg `1..=n`, and edge multiplicities.
#[derive(Clone, Debug)]
pub struct NaiveGraph {
    pub genus: Vec<u8>,
    pub leg_vertex: Vec<usize>,
    pub adj: Vec<Vec<u8>>,
}

impl NaiveGraph {
    /// Smallest encoding over every vertex permutation.
    pub fn canonical(&self) -> Vec<u8> {
        let nv = self.genus.len();
        let mut best: Option<Vec<u8>> = None;
        for perm in all_permutations(nv) {
            // perm[old] = new
            let mut inv = vec![0; nv];
            for (old, &new) in perm.iter().enumerate() {
                inv[new] = old;
            }
            let mut enc = vec![nv as u8];
            for &old in &inv {
                enc.push(self.genus[old]);
            }
            for &v in &self.leg_vertex {
                enc.push(perm[v] as u8);
            }
            for i in 0..nv {
                for j in i..nv {
                    enc.push(self.adj[inv[i]][inv[j]]);
                }
            }
            if best.as_ref().is_none_or(|b| enc < *b) {
                best = Some(enc);
            }
        }
        best.unwrap()
    }

    pub fn from_stable(g: &StableGraph) -> Self {
        let v = g.to_json();
        let genus: Vec<u8> = v["vertices"].as_array().unwrap().iter().map(|x| x["genus"].as_u64().unwrap() as u8).collect();
        let nv = genus.len();
        let legs = v["legs"].as_array().unwrap();
        let mut leg_vertex = vec![usize::MAX; legs.len()];
        for l in legs {
            leg_vertex[l["label"].as_u64().unwrap() as usize - 1] = l["vertex"].as_u64().unwrap() as usize;
        }
        let mut adj = vec![vec![0u8; nv]; nv];
        for e in v["edges"].as_array().unwrap() {
            let (a, b) = (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize);
            adj[a][b] += 1;
            if a != b {
                adj[b][a] += 1;
            }
        }
        NaiveGraph { genus, leg_vertex, adj }
    }
}

pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn multisets(pairs: &[(usize, usize)], size: usize, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for i in start..pairs.len() {
        cur.push(pairs[i]);
        multisets(pairs, size, i, cur, out);
        cur.pop();
    }
}

/// Every genus-one stable graph with legs `1..=n` and `codim` edges, up to
/// isomorphism, found by exhaustive search over vertex-level data.
pub fn naive_classes(n: usize, codim: usize) -> BTreeSet<Vec<u8>> {
    let mut classes = BTreeSet::new();
    for nv in 1..=codim + 1 {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|u| (u..nv).map(move |v| (u, v))).collect();
        let mut edge_sets = Vec::new();
        multisets(&pairs, codim, 0, &mut Vec::new(), &mut edge_sets);
        for gmask in 0u32..(1 << nv) {
            let genus: Vec<u8> = (0..nv).map(|v| (gmask >> v & 1) as u8).collect();
            let total = genus.iter().map(|&g| g as i64).sum::<i64>() + codim as i64 - nv as i64 + 1;
            if total != 1 {
                continue;
            }
            for edges in &edge_sets {
                let mut adj = vec![vec![0u8; nv]; nv];
                for &(a, b) in edges {
                    adj[a][b] += 1;
                    if a != b {
                        adj[b][a] += 1;
                    }
                }
                if !connected(&adj) {
                    continue;
                }
                let edge_val: Vec<usize> = (0..nv).map(|v| (0..nv).map(|u| adj[v][u] as usize).sum::<usize>() + adj[v][v] as usize).collect();
                let mut legs = vec![0usize; n];
                loop {
                    let mut val = edge_val.clone();
                    for &v in &legs {
                        val[v] += 1;
                    }
                    if (0..nv).all(|v| val[v] >= if genus[v] == 0 { 3 } else { 1 }) {
                        let g = NaiveGraph { genus: genus.clone(), leg_vertex: legs.clone(), adj: adj.clone() };
                        classes.insert(g.canonical());
                    }
                    let mut i = 0;
                    while i < n {
                        legs[i] += 1;
                        if legs[i] < nv {
                            break;
                        }
                        legs[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
    }
    classes
}

fn connected(adj: &[Vec<u8>]) -> bool {
    let nv = adj.len();
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for v in 0..nv {
            if adj[u][v] > 0 && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Rank by dense Gaussian elimination over the rationals.
pub fn dense_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = &row[c] * &inv;
                for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Cusp form dimension as the number of monomials `E4^x E6^y` of weight `w`, minus one.
pub fn cusp_forms_by_monomials(w: usize) -> u64 {
    if !w.is_multiple_of(2) || w < 4 {
        return 0;
    }
    let count = (0..=w / 4).filter(|&x| (w - 4 * x).is_multiple_of(6)).count() as u64;
    count - 1
}
