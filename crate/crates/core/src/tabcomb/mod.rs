//! Multipartitions, standard tableaux, dominance and residues.

mod coeffs;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{Poly, Variant};
use crate::symgrp::Perm;

pub use coeffs::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TabError {
    #[error("invalid multipartition: {0}")]
    InvalidShape(String),
    #[error("invalid tableau: {0}")]
    InvalidTableau(String),
    #[error("entry {0} out of range")]
    OutOfRange(usize),
    #[error("sizes differ")]
    SizeMismatch,
    #[error("specialization is not separated: zero denominator")]
    NotSeparated,
    #[error("coefficient belongs to the other algebra variant")]
    VariantMismatch,
}

/// A box `(row, col, comp)` of a Young diagram, all 1-based. The derived
/// order is by component, then row, then column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub comp: usize,
    pub row: usize,
    pub col: usize,
}

impl Node {
    pub fn new(row: usize, col: usize, comp: usize) -> Self {
        Node { comp, row, col }
    }

    /// `col - row`.
    pub fn diagonal(&self) -> i64 {
        self.col as i64 - self.row as i64
    }

    /// `q^{c-b} Q_l` or `(c-b) + u_l`.
    pub fn residue(&self, variant: Variant) -> Poly {
        match variant {
            Variant::NonDegenerate => &Poly::q_pow(self.diagonal() as i32) * &Poly::var(self.comp),
            Variant::Degenerate => &Poly::constant(self.diagonal()) + &Poly::var(self.comp),
        }
    }

    /// `self ≺ x`: a later component, or the same component and an earlier column.
    pub fn precedes(&self, x: &Node) -> bool {
        self.comp > x.comp || (self.comp == x.comp && self.col < x.col)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.row, self.col, self.comp)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiPartition {
    comps: Vec<Vec<usize>>,
}

impl MultiPartition {
    pub fn new(comps: Vec<Vec<usize>>) -> Result<Self, TabError> {
        if comps.is_empty() {
            return Err(TabError::InvalidShape("need at least one component".into()));
        }
        for c in &comps {
            if c.contains(&0) || c.windows(2).any(|w| w[0] < w[1]) {
                return Err(TabError::InvalidShape(format!("{comps:?}")));
            }
        }
        Ok(MultiPartition { comps })
    }

    pub fn empty(ell: usize) -> Self {
        MultiPartition { comps: vec![Vec::new(); ell] }
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.comps
    }

    pub fn ell(&self) -> usize {
        self.comps.len()
    }

    pub fn size(&self) -> usize {
        self.comps.iter().flatten().sum()
    }

    /// `𝔞_s = |λ^(1)| + ⋯ + |λ^(s-1)|` for `s = 1..=ℓ`.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.ell());
        let mut acc = 0;
        for c in &self.comps {
            out.push(acc);
            acc += c.iter().sum::<usize>();
        }
        out
    }

    /// Row lengths of all components, in order.
    pub fn composition(&self) -> Vec<usize> {
        self.comps.iter().flatten().copied().collect()
    }

    pub fn contains(&self, x: &Node) -> bool {
        x.comp >= 1
            && x.comp <= self.ell()
            && x.row >= 1
            && x.col >= 1
            && self.comps[x.comp - 1].get(x.row - 1).is_some_and(|&r| x.col <= r)
    }

    /// Nodes in (component, row, column) order.
    pub fn nodes(&self) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.size());
        for (l, c) in self.comps.iter().enumerate() {
            for (r, &len) in c.iter().enumerate() {
                for col in 1..=len {
                    out.push(Node::new(r + 1, col, l + 1));
                }
            }
        }
        out
    }

    pub fn addable(&self) -> Vec<Node> {
        let mut out = Vec::new();
        for (l, c) in self.comps.iter().enumerate() {
            for r in 0..=c.len() {
                let len = c.get(r).copied().unwrap_or(0);
                if r == 0 || c[r - 1] > len {
                    out.push(Node::new(r + 1, len + 1, l + 1));
                }
            }
        }
        out
    }

    pub fn removable(&self) -> Vec<Node> {
        let mut out = Vec::new();
        for (l, c) in self.comps.iter().enumerate() {
            for (r, &len) in c.iter().enumerate() {
                if c.get(r + 1).copied().unwrap_or(0) < len {
                    out.push(Node::new(r + 1, len, l + 1));
                }
            }
        }
        out
    }

    fn with_node(&self, x: &Node) -> Self {
        let mut comps = self.comps.clone();
        let c = &mut comps[x.comp - 1];
        if x.row > c.len() {
            c.push(1);
        } else {
            c[x.row - 1] += 1;
        }
        MultiPartition { comps }
    }

    /// Prefix sums `Σ_{t<s}|λ^(t)| + Σ_{j≤i} λ^(s)_j` for `s = 1..ℓ`, `i = 1..n`.
    pub fn dominance_vector(&self) -> Vec<usize> {
        let n = self.size();
        let mut out = Vec::with_capacity(self.ell() * n.max(1));
        let mut acc = 0;
        for c in &self.comps {
            for i in 0..n.max(1) {
                acc += c.get(i).copied().unwrap_or(0);
                out.push(acc);
            }
        }
        out
    }

    pub fn dominates(&self, other: &MultiPartition) -> Result<bool, TabError> {
        if self.ell() != other.ell() || self.size() != other.size() {
            return Err(TabError::SizeMismatch);
        }
        Ok(self.dominance_vector().iter().zip(other.dominance_vector()).all(|(a, b)| *a >= b))
    }

    /// Sum of `λ_i(λ_i - 1)/2` over all rows.
    pub fn alpha(&self) -> usize {
        self.comps.iter().flatten().map(|&r| r * (r - 1) / 2).sum()
    }
}

impl fmt::Display for MultiPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|c| {
                if c.is_empty() {
                    "∅".to_string()
                } else {
                    let rows: Vec<String> = c.iter().map(|r| r.to_string()).collect();
                    format!("({})", rows.join(","))
                }
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for MultiPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for MultiPartition {
    type Err = TabError;

    /// Accepts the display form, e.g. `((2,1),∅)`; `()` also denotes an
    /// empty component.
    fn from_str(s: &str) -> Result<Self, TabError> {
        let bad = || TabError::InvalidShape(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
        let mut comps = Vec::new();
        let mut rest = inner;
        loop {
            if let Some(r) = rest.strip_prefix('∅') {
                comps.push(Vec::new());
                rest = r;
            } else if let Some(r) = rest.strip_prefix('(') {
                let end = r.find(')').ok_or_else(bad)?;
                let body = &r[..end];
                let rows = if body.is_empty() {
                    Vec::new()
                } else {
                    body.split(',').map(|x| x.parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?
                };
                comps.push(rows);
                rest = &r[end + 1..];
            } else {
                return Err(bad());
            }
            if rest.is_empty() {
                break;
            }
            rest = rest.strip_prefix(',').ok_or_else(bad)?;
        }
        MultiPartition::new(comps)
    }
}

/// All `ℓ`-partitions of `n`, most dominant first. The order is decreasing
/// lexicographic on [`MultiPartition::dominance_vector`], which extends
/// dominance.
pub fn enum_multipartitions(n: usize, ell: usize) -> Vec<MultiPartition> {
    fn partitions(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for first in (1..=n.min(max)).rev() {
            prefix.push(first);
            partitions(n - first, first, prefix, out);
            prefix.pop();
        }
    }
    fn rec(n: usize, comps_left: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<MultiPartition>) {
        if comps_left == 1 {
            let mut ps = Vec::new();
            partitions(n, n, &mut Vec::new(), &mut ps);
            for p in ps {
                cur.push(p);
                out.push(MultiPartition { comps: cur.clone() });
                cur.pop();
            }
            return;
        }
        for k in (0..=n).rev() {
            let mut ps = Vec::new();
            partitions(k, k, &mut Vec::new(), &mut ps);
            for p in ps {
                cur.push(p);
                rec(n - k, comps_left - 1, cur, out);
                cur.pop();
            }
        }
    }
    assert!(ell >= 1);
    let mut out = Vec::new();
    rec(n, ell, &mut Vec::new(), &mut out);
    out.sort_by_key(|b| std::cmp::Reverse(b.dominance_vector()));
    out
}

/// Standard tableau stored as the node of each entry.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StdTableau {
    shape: MultiPartition,
    entries: Vec<Node>,
}

impl StdTableau {
    /// From the node of each entry `1..=n`, in order.
    pub fn from_entries(shape: MultiPartition, entries: Vec<Node>) -> Result<Self, TabError> {
        if entries.len() != shape.size() {
            return Err(TabError::InvalidTableau("wrong number of entries".into()));
        }
        let mut sub = MultiPartition::empty(shape.ell());
        for x in &entries {
            if !shape.contains(x) || !sub.addable().contains(x) {
                return Err(TabError::InvalidTableau(format!("entry at {x} breaks standardness")));
            }
            sub = sub.with_node(x);
        }
        Ok(StdTableau { shape, entries })
    }

    /// From rows of entries per component, e.g. `[[[1,3],[2]], []]`.
    pub fn from_rows(rows: &[Vec<Vec<usize>>]) -> Result<Self, TabError> {
        let comps: Vec<Vec<usize>> = rows.iter().map(|c| c.iter().map(|r| r.len()).collect()).collect();
        let shape = MultiPartition::new(comps)?;
        let n = shape.size();
        let mut entries = vec![None; n];
        for (l, c) in rows.iter().enumerate() {
            for (r, row) in c.iter().enumerate() {
                for (col, &v) in row.iter().enumerate() {
                    if v == 0 || v > n || entries[v - 1].is_some() {
                        return Err(TabError::InvalidTableau(format!("bad entry {v}")));
                    }
                    entries[v - 1] = Some(Node::new(r + 1, col + 1, l + 1));
                }
            }
        }
        Self::from_entries(shape, entries.into_iter().map(|e| e.unwrap()).collect())
    }

    pub fn shape(&self) -> &MultiPartition {
        &self.shape
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Node] {
        &self.entries
    }

    /// Node holding entry `j` (1-based).
    pub fn node_of(&self, j: usize) -> Result<Node, TabError> {
        if j == 0 || j > self.size() {
            return Err(TabError::OutOfRange(j));
        }
        Ok(self.entries[j - 1])
    }

    pub fn comp_of(&self, j: usize) -> usize {
        self.entries[j - 1].comp
    }

    /// Rows of entries per component.
    pub fn rows(&self) -> Vec<Vec<Vec<usize>>> {
        let mut out: Vec<Vec<Vec<usize>>> =
            self.shape.comps.iter().map(|c| c.iter().map(|&len| vec![0; len]).collect()).collect();
        for (k, x) in self.entries.iter().enumerate() {
            out[x.comp - 1][x.row - 1][x.col - 1] = k + 1;
        }
        out
    }

    /// `t_{↓≤k}`.
    pub fn restrict(&self, k: usize) -> StdTableau {
        let entries = self.entries[..k].to_vec();
        let mut shape = MultiPartition::empty(self.shape.ell());
        for x in &entries {
            shape = shape.with_node(x);
        }
        StdTableau { shape, entries }
    }

    pub fn is_superstandard(&self) -> bool {
        self.entries == self.shape.nodes()
    }

    /// `d(t)` with `t = t^λ d(t)`: the entry `(t^λ(x))d` is `t(x)`.
    pub fn d_of(&self) -> Perm {
        let n = self.size();
        let mut w = vec![0u8; n];
        for (pos, x) in self.shape.nodes().iter().enumerate() {
            let k = self.entries.iter().position(|e| e == x).unwrap();
            w[pos] = k as u8;
        }
        Perm::from_zero_based(&w)
    }

    /// `k(t)`: the entry of `t^λ` at the node holding the maximal entry of `t`.
    pub fn k_of(&self) -> usize {
        let last = self.entries.last().expect("nonempty tableau");
        self.shape.nodes().iter().position(|x| x == last).unwrap() + 1
    }

    pub fn residue(&self, k: usize, variant: Variant) -> Result<Poly, TabError> {
        Ok(self.node_of(k)?.residue(variant))
    }

    /// `𝒜_t(i)`: addable nodes of `Shape(t_{↓≤i})` below `t^{-1}(i)` in `≺`.
    pub fn a_set(&self, i: usize) -> Vec<Node> {
        let x = self.entries[i - 1];
        self.restrict(i).shape.addable().into_iter().filter(|y| y.precedes(&x)).collect()
    }

    /// `ℛ_t(i)`: removable nodes of `Shape(t_{↓≤i-1})` below `t^{-1}(i)` in `≺`.
    pub fn r_set(&self, i: usize) -> Vec<Node> {
        let x = self.entries[i - 1];
        self.restrict(i - 1).shape.removable().into_iter().filter(|y| y.precedes(&x)).collect()
    }

    /// `self ⊵ other`: restricted shapes dominate at every size.
    pub fn dominates(&self, other: &StdTableau) -> Result<bool, TabError> {
        if self.size() != other.size() || self.shape.ell() != other.shape.ell() {
            return Err(TabError::SizeMismatch);
        }
        for k in 1..=self.size() {
            if !self.restrict(k).shape.dominates(&other.restrict(k).shape)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fill: Vec<Vec<usize>> = self.rows().into_iter().map(|c| c.into_iter().flatten().collect()).collect();
        serde_json::json!({ "shape": self.shape.comps, "filling": fill })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, TabError> {
        let bad = || TabError::InvalidTableau(v.to_string());
        let shape: Vec<Vec<usize>> =
            serde_json::from_value(v.get("shape").ok_or_else(bad)?.clone()).map_err(|_| bad())?;
        let fill: Vec<Vec<usize>> =
            serde_json::from_value(v.get("filling").ok_or_else(bad)?.clone()).map_err(|_| bad())?;
        if shape.len() != fill.len() {
            return Err(bad());
        }
        let mut rows = Vec::new();
        for (c, f) in shape.iter().zip(&fill) {
            if c.iter().sum::<usize>() != f.len() {
                return Err(bad());
            }
            let mut it = f.iter().copied();
            rows.push(c.iter().map(|&len| it.by_ref().take(len).collect()).collect());
        }
        Self::from_rows(&rows)
    }
}

impl fmt::Display for StdTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rows()
            .iter()
            .map(|c| {
                if c.is_empty() {
                    "∅".to_string()
                } else {
                    let rows: Vec<String> = c
                        .iter()
                        .map(|r| format!("({})", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
                        .collect();
                    format!("[{}]", rows.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl fmt::Debug for StdTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `(s,t) ⊵ (u,v)`.
pub fn dominates_pair(s: &StdTableau, t: &StdTableau, u: &StdTableau, v: &StdTableau) -> Result<bool, TabError> {
    Ok(s.dominates(u)? && t.dominates(v)?)
}

/// The tableau `t^λ`.
pub fn superstandard(shape: &MultiPartition) -> StdTableau {
    StdTableau { shape: shape.clone(), entries: shape.nodes() }
}

/// `Std(λ)`, lexicographic on the node sequence of entries `1, 2, ..`.
pub fn enum_std_tableaux(shape: &MultiPartition) -> Vec<StdTableau> {
    fn rec(target: &MultiPartition, sub: &MultiPartition, entries: &mut Vec<Node>, out: &mut Vec<StdTableau>) {
        if entries.len() == target.size() {
            out.push(StdTableau { shape: target.clone(), entries: entries.clone() });
            return;
        }
        let mut next: Vec<Node> = sub.addable().into_iter().filter(|x| target.contains(x)).collect();
        next.sort();
        for x in next {
            entries.push(x);
            rec(target, &sub.with_node(&x), entries, out);
            entries.pop();
        }
    }
    let mut out = Vec::new();
    rec(shape, &MultiPartition::empty(shape.ell()), &mut Vec::new(), &mut out);
    out
}

/// `Std²(𝒫_{ℓ,n})` as `(shape index, s index, t index)`, in shape order,
/// then `s`, then `t`.
#[derive(Clone, Debug)]
pub struct TableauPairs {
    pub shapes: Vec<MultiPartition>,
    pub tableaux: Vec<Vec<StdTableau>>,
    pub pairs: Vec<(usize, usize, usize)>,
}

impl TableauPairs {
    pub fn new(n: usize, ell: usize) -> Self {
        let shapes = enum_multipartitions(n, ell);
        let tableaux: Vec<Vec<StdTableau>> = shapes.iter().map(enum_std_tableaux).collect();
        let mut pairs = Vec::new();
        for (li, ts) in tableaux.iter().enumerate() {
            for si in 0..ts.len() {
                for ti in 0..ts.len() {
                    pairs.push((li, si, ti));
                }
            }
        }
        TableauPairs { shapes, tableaux, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_of(&self, s: &StdTableau, t: &StdTableau) -> Option<usize> {
        let li = self.shapes.iter().position(|x| x == s.shape())?;
        let si = self.tableaux[li].iter().position(|x| x == s)?;
        let ti = self.tableaux[li].iter().position(|x| x == t)?;
        self.pairs.iter().position(|&p| p == (li, si, ti))
    }

    pub fn pair(&self, idx: usize) -> (&StdTableau, &StdTableau) {
        let (li, si, ti) = self.pairs[idx];
        (&self.tableaux[li][si], &self.tableaux[li][ti])
    }
}

/// Residue or content classes `C(k)` for `k = 1..n`, as polynomials.
pub fn residue_classes(n: usize, ell: usize, variant: Variant) -> Vec<Vec<Poly>> {
    let mut out: Vec<Vec<Poly>> = vec![Vec::new(); n];
    for shape in enum_multipartitions(n, ell) {
        for t in enum_std_tableaux(&shape) {
            for (k, x) in t.entries.iter().enumerate() {
                let r = x.residue(variant);
                if !out[k].contains(&r) {
                    out[k].push(r);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(s: &str) -> MultiPartition {
        s.parse().unwrap()
    }

    fn tab(rows: &[Vec<Vec<usize>>]) -> StdTableau {
        StdTableau::from_rows(rows).unwrap()
    }

    #[test]
    fn multipartition_enumeration() {
        assert_eq!(enum_multipartitions(0, 3), vec![MultiPartition::empty(3)]);
        assert_eq!(enum_multipartitions(2, 1), vec![mp("((2))"), mp("((1,1))")]);
        let five = enum_multipartitions(2, 2);
        assert_eq!(five.len(), 5);
        for want in ["((2),∅)", "((1,1),∅)", "((1),(1))", "(∅,(2))", "(∅,(1,1))"] {
            assert!(five.contains(&mp(want)));
        }
    }

    #[test]
    fn enumeration_refines_dominance() {
        for (n, ell) in [(3, 2), (4, 1), (4, 2), (3, 3)] {
            let all = enum_multipartitions(n, ell);
            for i in 0..all.len() {
                for j in i + 1..all.len() {
                    assert!(!all[j].dominates(&all[i]).unwrap() || all[i] == all[j]);
                }
            }
        }
    }

    #[test]
    fn dominance_examples() {
        let l = mp("((2,1),(1))");
        assert!(l.dominates(&l).unwrap());
        assert!(mp("((2),∅)").dominates(&mp("((1,1),∅)")).unwrap());
        assert!(mp("((1),(1))").dominates(&mp("(∅,(2))")).unwrap());
        assert!(!mp("(∅,(2))").dominates(&mp("((1),(1))")).unwrap());
        assert!(mp("((1),(1))").dominates(&mp("((2))")).is_err());
    }

    #[test]
    fn parse_and_display() {
        let l = mp("((2,1),∅,(1))");
        assert_eq!(l.to_string(), "((2,1),∅,(1))");
        assert_eq!(mp("((2,1),(),(1))"), l);
        assert_eq!(l.offsets(), vec![0, 3, 3]);
        assert!("((1,2))".parse::<MultiPartition>().is_err());
        assert!("(2)".parse::<MultiPartition>().is_err());
    }

    #[test]
    fn tableau_counts() {
        assert_eq!(enum_std_tableaux(&mp("((4))")).len(), 1);
        assert_eq!(enum_std_tableaux(&mp("((2,1))")).len(), 2);
        assert_eq!(enum_std_tableaux(&mp("((1),(1))")).len(), 2);
        for n in 0..=4 {
            for ell in 1..=3 {
                let total: usize = enum_multipartitions(n, ell).iter().map(|l| enum_std_tableaux(l).len().pow(2)).sum();
                let fact: usize = (1..=n).product();
                assert_eq!(total, ell.pow(n as u32) * fact, "n={n} ell={ell}");
            }
        }
    }

    #[test]
    fn superstandard_comes_first_and_has_identity_d() {
        for l in enum_multipartitions(4, 2) {
            let ts = enum_std_tableaux(&l);
            assert_eq!(ts[0], superstandard(&l));
            assert!(ts[0].d_of().is_identity());
            assert!(ts[0].is_superstandard());
            for t in &ts {
                assert!(ts[0].dominates(t).unwrap());
            }
        }
    }

    #[test]
    fn d_of_examples() {
        let t = tab(&[vec![vec![1, 3], vec![2]]]);
        assert_eq!(t.d_of(), Perm::simple(2, 3).unwrap());
        let t = tab(&[vec![], vec![vec![1]]]);
        assert!(t.d_of().is_identity());
        let t = tab(&[vec![vec![2]], vec![vec![1]]]);
        assert_eq!(t.d_of(), Perm::simple(1, 2).unwrap());
        // four boxes: (1,3,4),(2) has d = σ3σ2
        let t = tab(&[vec![vec![1, 3, 4], vec![2]]]);
        assert_eq!(t.d_of(), Perm::from_word(&[3, 2], 4).unwrap());
    }

    #[test]
    fn d_of_recursion() {
        for l in enum_multipartitions(4, 2) {
            for t in enum_std_tableaux(&l) {
                let n = t.size();
                let k = t.k_of();
                let dprev = t.restrict(n - 1).d_of().extend(n);
                let want = if k == n { dprev } else { &crate::symgrp::beta(k, n - 1, n).unwrap() * &dprev };
                assert_eq!(t.d_of(), want, "{t}");
            }
        }
    }

    #[test]
    fn length_counts_out_of_order_pairs() {
        for l in enum_multipartitions(4, 2) {
            let nodes = l.nodes();
            for t in enum_std_tableaux(&l) {
                let pos: Vec<usize> = t.entries().iter().map(|x| nodes.iter().position(|y| y == x).unwrap()).collect();
                let inv = (0..pos.len())
                    .flat_map(|i| (i + 1..pos.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| pos[i] > pos[j])
                    .count();
                assert_eq!(t.d_of().length(), inv);
            }
        }
    }

    #[test]
    fn k_of_examples() {
        let l = mp("((2,1))");
        assert_eq!(superstandard(&l).k_of(), 3);
        assert_eq!(tab(&[vec![vec![1, 3], vec![2]]]).k_of(), 2);
        assert_eq!(tab(&[vec![vec![2]], vec![vec![1]]]).k_of(), 1);
    }

    #[test]
    fn k_of_all_maximal_iff_superstandard() {
        for l in enum_multipartitions(4, 2) {
            for t in enum_std_tableaux(&l) {
                let all = (1..=t.size()).all(|k| t.restrict(k).k_of() == k);
                assert_eq!(all, t.is_superstandard());
            }
        }
    }

    #[test]
    fn node_of_examples() {
        assert_eq!(superstandard(&mp("((2),∅)")).node_of(2).unwrap(), Node::new(1, 2, 1));
        assert_eq!(superstandard(&mp("((1),(1))")).node_of(2).unwrap(), Node::new(1, 1, 2));
        assert_eq!(tab(&[vec![vec![1, 3], vec![2]]]).node_of(2).unwrap(), Node::new(2, 1, 1));
        assert!(superstandard(&mp("((1))")).node_of(2).is_err());
    }

    #[test]
    fn residue_examples() {
        let t = superstandard(&mp("((2),∅)"));
        assert_eq!(t.residue(2, Variant::NonDegenerate).unwrap(), &Poly::var(0) * &Poly::var(1));
        let t = superstandard(&mp("((1),(1))"));
        assert_eq!(t.residue(2, Variant::Degenerate).unwrap(), Poly::var(2));
        assert_eq!(t.residue(1, Variant::NonDegenerate).unwrap(), Poly::var(1));
        assert_eq!(t.residue(1, Variant::Degenerate).unwrap(), Poly::var(1));
    }

    #[test]
    fn addable_removable_examples() {
        let e = MultiPartition::empty(1);
        assert_eq!(e.addable(), vec![Node::new(1, 1, 1)]);
        let l = mp("((2))");
        assert_eq!(l.addable(), vec![Node::new(1, 3, 1), Node::new(2, 1, 1)]);
        assert_eq!(l.removable(), vec![Node::new(1, 2, 1)]);
        assert!(Node::new(2, 1, 1).precedes(&Node::new(1, 2, 1)));
        assert!(Node::new(1, 5, 2).precedes(&Node::new(1, 1, 1)));
        assert!(!Node::new(1, 1, 1).precedes(&Node::new(1, 1, 2)));
    }

    #[test]
    fn pair_dominance_example() {
        let l = mp("((2,1))");
        let top = superstandard(&l);
        let other = tab(&[vec![vec![1, 3], vec![2]]]);
        assert!(dominates_pair(&top, &top, &top, &top).unwrap());
        assert!(dominates_pair(&top, &top, &top, &other).unwrap());
        assert!(!dominates_pair(&top, &other, &top, &top).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let t = tab(&[vec![vec![1, 3], vec![4]], vec![vec![2]]]);
        let j = t.to_json();
        assert_eq!(j, serde_json::json!({"shape": [[2, 1], [1]], "filling": [[1, 3, 4], [2]]}));
        assert_eq!(StdTableau::from_json(&j).unwrap(), t);
        assert!(StdTableau::from_json(&serde_json::json!({"shape": [[2]], "filling": [[2, 1]]})).is_err());
    }

    #[test]
    fn pair_index_is_triangular_for_dominance() {
        let pairs = TableauPairs::new(3, 2);
        for i in 0..pairs.len() {
            for j in 0..pairs.len() {
                let (s, t) = pairs.pair(i);
                let (u, v) = pairs.pair(j);
                if i != j && dominates_pair(u, v, s, t).unwrap() {
                    assert!(j < i);
                }
            }
        }
    }
}
