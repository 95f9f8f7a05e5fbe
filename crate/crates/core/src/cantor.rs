//! Cantor-space coding of cell unions: an interleaved-digit surjection with padding bits,
//! its preimage prefix trees and the reindexed surjection onto a target set.

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{Cell, DyadicCompactum};

/// Level-`r` cell addressed by `2·d·r` bits: bit `2(k·d + j)` is digit `k + 1` of coordinate `j`,
/// odd positions are padding.
pub fn phi_cell(bits: &[bool], d: usize, r: u32) -> Result<Cell> {
    if bits.len() != 2 * d * r as usize {
        return Err(Error::InvalidParameter(format!("expected {} bits, got {}", 2 * d * r as usize, bits.len())));
    }
    let mut coords = vec![0u32; d];
    for k in 0..r as usize {
        for (j, c) in coords.iter_mut().enumerate() {
            *c = (*c << 1) | bits[2 * (k * d + j)] as u32;
        }
    }
    Cell::new(r, coords)
}

type NodeId = u32;

#[derive(Clone, Debug)]
enum Node {
    Branch([Option<NodeId>; 2]),
    Leaf(Vec<u32>),
}

/// Binary tree of the bit strings of length `2·d·r` whose [`phi_cell`] lies in a target set.
///
/// Both children of a padding node are the same subtree and are stored once.
#[derive(Clone, Debug)]
pub struct PrefixTree {
    dim: usize,
    level: u32,
    nodes: Vec<Node>,
    root: NodeId,
}

/// Which coordinate and digit a bit position addresses; `None` for padding.
fn address(pos: usize, d: usize) -> Option<(usize, usize)> {
    (pos % 2 == 0).then(|| ((pos / 2) % d, (pos / 2) / d))
}

/// Prefix tree of `k` at its own level.
pub fn code(k: &DyadicCompactum) -> PrefixTree {
    let (d, r) = (k.dim(), k.level());
    let cells: Vec<Vec<u32>> = k.cells().collect();
    let mut tree = PrefixTree { dim: d, level: r, nodes: Vec::new(), root: 0 };
    let all: Vec<usize> = (0..cells.len()).collect();
    tree.root = tree.build(&cells, &all, 0).expect("nonempty compactum");
    tree
}

impl PrefixTree {
    fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        (self.nodes.len() - 1) as NodeId
    }

    fn build(&mut self, cells: &[Vec<u32>], live: &[usize], pos: usize) -> Option<NodeId> {
        if live.is_empty() {
            return None;
        }
        if pos == self.depth() {
            return Some(self.push(Node::Leaf(cells[live[0]].clone())));
        }
        match address(pos, self.dim) {
            None => {
                let child = self.build(cells, live, pos + 1);
                Some(self.push(Node::Branch([child, child])))
            }
            Some((j, k)) => {
                let shift = self.level as usize - 1 - k;
                let (zero, one): (Vec<usize>, Vec<usize>) = live.iter().partition(|&&c| (cells[c][j] >> shift) & 1 == 0);
                let z = self.build(cells, &zero, pos + 1);
                let o = self.build(cells, &one, pos + 1);
                Some(self.push(Node::Branch([z, o])))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Bits per root-to-leaf path, `2·d·r`.
    pub fn depth(&self) -> usize {
        2 * self.dim * self.level as usize
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    /// Number of root-to-leaf paths.
    pub fn leaf_count(&self) -> u128 {
        let mut memo = vec![None; self.nodes.len()];
        self.count(self.root, &mut memo)
    }

    fn count(&self, id: NodeId, memo: &mut Vec<Option<u128>>) -> u128 {
        if let Some(c) = memo[id as usize] {
            return c;
        }
        let c = match self.node(id) {
            Node::Leaf(_) => 1,
            Node::Branch(ch) => ch.iter().flatten().map(|&c| self.count(c, memo)).sum(),
        };
        memo[id as usize] = Some(c);
        c
    }

    /// Every root-to-leaf path with its cell, paths in increasing binary order.
    pub fn leaves(&self) -> Vec<(Vec<bool>, Cell)> {
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(self.depth());
        self.walk(self.root, &mut path, &mut out);
        out
    }

    fn walk(&self, id: NodeId, path: &mut Vec<bool>, out: &mut Vec<(Vec<bool>, Cell)>) {
        match self.node(id) {
            Node::Leaf(c) => out.push((path.clone(), Cell::new(self.level, c.clone()).expect("valid leaf"))),
            Node::Branch(ch) => {
                for (b, c) in ch.iter().enumerate() {
                    if let Some(c) = c {
                        path.push(b == 1);
                        self.walk(*c, path, out);
                        path.pop();
                    }
                }
            }
        }
    }

    /// Distinct leaf cells.
    pub fn image(&self) -> Result<DyadicCompactum> {
        let mut seen = vec![false; self.nodes.len()];
        let mut cells = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id as usize], true) {
                continue;
            }
            match self.node(id) {
                Node::Leaf(c) => cells.push(c.clone()),
                Node::Branch(ch) => stack.extend(ch.iter().flatten()),
            }
        }
        DyadicCompactum::new(self.dim, self.level, cells)
    }

    /// Follows `bits`, one per two-child node; one-child nodes are descended without input.
    pub fn reindex(&self, bits: &[bool]) -> Result<Cell> {
        let mut id = self.root;
        let mut used = 0;
        loop {
            match self.node(id) {
                Node::Leaf(c) => return Cell::new(self.level, c.clone()),
                Node::Branch([Some(z), Some(o)]) => {
                    let b = *bits.get(used).ok_or_else(|| {
                        Error::InvalidParameter(format!("input ended after {used} bits"))
                    })?;
                    used += 1;
                    id = if b { *o } else { *z };
                }
                Node::Branch([Some(c), None]) | Node::Branch([None, Some(c)]) => id = *c,
                Node::Branch([None, None]) => unreachable!("childless node"),
            }
        }
    }

    /// One [`reindex`](Self::reindex) input per leaf cell, taking the 0 branch at padding nodes.
    pub fn witnesses(&self) -> Vec<(Vec<bool>, Cell)> {
        let mut out = Vec::new();
        let mut input = Vec::new();
        self.witness(self.root, &mut input, &mut out);
        let mut seen = std::collections::HashSet::new();
        out.retain(|(_, c)| seen.insert(c.clone()));
        out
    }

    fn witness(&self, id: NodeId, input: &mut Vec<bool>, out: &mut Vec<(Vec<bool>, Cell)>) {
        match self.node(id) {
            Node::Leaf(c) => out.push((input.clone(), Cell::new(self.level, c.clone()).expect("valid leaf"))),
            Node::Branch([Some(z), Some(o)]) => {
                for (b, c) in [(false, z), (true, o)] {
                    input.push(b);
                    self.witness(*c, input, out);
                    input.pop();
                    if z == o {
                        break;
                    }
                }
            }
            Node::Branch([Some(c), None]) | Node::Branch([None, Some(c)]) => self.witness(*c, input, out),
            Node::Branch([None, None]) => {}
        }
    }

    /// Greatest number of two-child nodes on a root-to-leaf path.
    pub fn input_bits(&self) -> usize {
        let mut memo = vec![None; self.nodes.len()];
        self.binary_depth(self.root, &mut memo)
    }

    fn binary_depth(&self, id: NodeId, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(v) = memo[id as usize] {
            return v;
        }
        let v = match self.node(id) {
            Node::Leaf(_) => 0,
            Node::Branch(ch) => {
                let sub = ch.iter().flatten().map(|&c| self.binary_depth(c, memo)).max().unwrap_or(0);
                sub + ch.iter().all(Option::is_some) as usize
            }
        };
        memo[id as usize] = Some(v);
        v
    }

    /// The tree cut at depth `2·d·r'`, leaves relabelled with the level-`r'` ancestor cells.
    pub fn truncate(&self, level: u32) -> Result<PrefixTree> {
        if level == 0 || level > self.level {
            return Err(Error::Coarsening { level: self.level, target: level });
        }
        let mut out = PrefixTree { dim: self.dim, level, nodes: Vec::new(), root: 0 };
        out.root = self.cut(self.root, 0, &mut vec![0u32; self.dim], &mut out);
        Ok(out)
    }

    fn cut(&self, id: NodeId, pos: usize, prefix: &mut [u32], out: &mut PrefixTree) -> NodeId {
        if pos == out.depth() {
            return out.push(Node::Leaf(prefix.to_vec()));
        }
        let Node::Branch(ch) = self.node(id) else { unreachable!("leaf above cut depth") };
        let mut kids = [None, None];
        for (b, c) in ch.iter().enumerate() {
            let Some(c) = c else { continue };
            if b == 1 && ch[0] == ch[1] {
                kids[1] = kids[0];
                continue;
            }
            let saved = prefix.to_vec();
            if let Some((j, _)) = address(pos, self.dim) {
                prefix[j] = (prefix[j] << 1) | b as u32;
            }
            kids[b] = Some(self.cut(*c, pos + 1, prefix, out));
            prefix.copy_from_slice(&saved);
        }
        out.push(Node::Branch(kids))
    }

    /// Structural problems: wrong path lengths, childless nodes, leaves off their address.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut path = vec![0u32; self.dim];
        self.check(self.root, 0, &mut path, &mut out);
        out
    }

    fn check(&self, id: NodeId, pos: usize, prefix: &mut [u32], out: &mut Vec<String>) {
        match self.node(id) {
            Node::Leaf(c) => {
                if pos != self.depth() {
                    out.push(format!("leaf at depth {pos}"));
                } else if c.as_slice() != &*prefix {
                    out.push(format!("leaf {c:?} at address {prefix:?}"));
                }
            }
            Node::Branch(ch) => {
                if pos >= self.depth() {
                    out.push(format!("branch at depth {pos}"));
                    return;
                }
                if ch.iter().all(Option::is_none) {
                    out.push(format!("childless node at depth {pos}"));
                }
                for (b, c) in ch.iter().enumerate() {
                    if let Some(c) = c {
                        let saved = prefix.to_vec();
                        if let Some((j, _)) = address(pos, self.dim) {
                            prefix[j] = (prefix[j] << 1) | b as u32;
                        }
                        self.check(*c, pos + 1, prefix, out);
                        prefix.copy_from_slice(&saved);
                    }
                }
            }
        }
    }

    fn same_shape(&self, a: NodeId, other: &PrefixTree, b: NodeId) -> bool {
        match (self.node(a), other.node(b)) {
            (Node::Leaf(x), Node::Leaf(y)) => x == y,
            (Node::Branch(x), Node::Branch(y)) => x.iter().zip(y).all(|(p, q)| match (p, q) {
                (None, None) => true,
                (Some(p), Some(q)) => self.same_shape(*p, other, *q),
                _ => false,
            }),
            _ => false,
        }
    }
}

impl PartialEq for PrefixTree {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.level == other.level && self.same_shape(self.root, other, other.root)
    }
}

impl Eq for PrefixTree {}

struct NodeRef<'a> {
    tree: &'a PrefixTree,
    id: NodeId,
}

impl Serialize for NodeRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.tree.node(self.id) {
            Node::Leaf(c) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("cell", c)?;
                m.end()
            }
            Node::Branch(ch) => {
                let mut m = s.serialize_map(Some(ch.iter().flatten().count()))?;
                for (key, c) in ["0", "1"].iter().zip(ch) {
                    if let Some(c) = c {
                        m.serialize_entry(key, &NodeRef { tree: self.tree, id: *c })?;
                    }
                }
                m.end()
            }
        }
    }
}

#[derive(Serialize)]
struct TreeOut<'a> {
    dim: usize,
    level: u32,
    depth: usize,
    leaves: String,
    root: NodeRef<'a>,
}

impl Serialize for PrefixTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TreeOut {
            dim: self.dim,
            level: self.level,
            depth: self.depth(),
            leaves: self.leaf_count().to_string(),
            root: NodeRef { tree: self, id: self.root },
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNode {
    Leaf {
        cell: Vec<u32>,
    },
    Branch {
        #[serde(rename = "0")]
        zero: Option<Box<RawNode>>,
        #[serde(rename = "1")]
        one: Option<Box<RawNode>>,
    },
}

#[derive(Deserialize)]
struct TreeIn {
    dim: usize,
    level: u32,
    root: RawNode,
}

impl PrefixTree {
    fn load(&mut self, raw: RawNode) -> NodeId {
        match raw {
            RawNode::Leaf { cell } => self.push(Node::Leaf(cell)),
            RawNode::Branch { zero, one } => {
                let z = zero.map(|n| self.load(*n));
                let o = one.map(|n| self.load(*n));
                self.push(Node::Branch([z, o]))
            }
        }
    }
}

impl<'de> Deserialize<'de> for PrefixTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TreeIn::deserialize(d)?;
        let mut tree = PrefixTree { dim: raw.dim, level: raw.level, nodes: Vec::new(), root: 0 };
        tree.root = tree.load(raw.root);
        if let Some(v) = tree.violations().into_iter().next() {
            return Err(D::Error::custom(v));
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0u64..1 << n).map(move |m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
    }

    fn from_mask(d: usize, r: u32, mask: u64) -> Option<DyadicCompactum> {
        let side = 1u32 << r;
        let cells: Vec<[u32; 2]> = (0..side * side)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| [i / side, i % side])
            .collect();
        (!cells.is_empty()).then(|| DyadicCompactum::new(d, r, cells).unwrap())
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_cell(&bits("0000"), 2, 1).unwrap().coords(), &[0, 0]);
        assert_eq!(phi_cell(&bits("1000"), 2, 1).unwrap().coords(), &[1, 0]);
        assert_eq!(phi_cell(&bits("0010"), 2, 1).unwrap().coords(), &[0, 1]);
        assert_eq!(phi_cell(&bits("0101"), 2, 1).unwrap().coords(), &[0, 0]);
        assert_eq!(phi_cell(&bits("1111"), 2, 1).unwrap().coords(), &[1, 1]);
        assert_eq!(phi_cell(&bits("10000010"), 2, 2).unwrap().coords(), &[2, 1]);
        assert!(phi_cell(&bits("000"), 2, 1).is_err());
    }

    #[test]
    fn phi_matches_box_oracle() {
        // The cylinder of a bit prefix maps into the box of cells sharing the decided digits.
        let (d, r) = (2usize, 2u32);
        for input in all_inputs(2 * d * r as usize) {
            let c = phi_cell(&input, d, r).unwrap();
            for j in 0..d {
                let mut lo = 0u32;
                let mut hi = (1u32 << r) - 1;
                for k in 0..r as usize {
                    let half = (hi - lo).div_ceil(2);
                    if input[2 * (k * d + j)] {
                        lo += half;
                    } else {
                        hi -= half;
                    }
                }
                assert_eq!((lo, hi), (c.coords()[j], c.coords()[j]));
            }
        }
    }

    #[test]
    fn full_cube_is_complete() {
        let k = DyadicCompactum::full(2, 2).unwrap();
        let t = code(&k);
        assert_eq!(t.depth(), 8);
        assert_eq!(t.leaf_count(), 256);
        assert_eq!(t.input_bits(), 8);
        for input in all_inputs(8) {
            assert_eq!(t.reindex(&input).unwrap(), phi_cell(&input, 2, 2).unwrap());
        }
    }

    #[test]
    fn single_cell() {
        let k = DyadicCompactum::new(2, 2, [[3u32, 1]]).unwrap();
        let t = code(&k);
        assert_eq!(t.leaf_count(), 16);
        assert_eq!(t.input_bits(), 4);
        for input in all_inputs(8) {
            assert_eq!(t.reindex(&input).unwrap().coords(), &[3, 1]);
        }
        assert!(t.reindex(&bits("01")).is_err());
    }

    #[test]
    fn leaves_are_the_preimage() {
        let k = DyadicCompactum::new(2, 2, [[0u32, 0], [1, 2], [3, 3]]).unwrap();
        let t = code(&k);
        let leaves = t.leaves();
        assert_eq!(leaves.len() as u128, t.leaf_count());
        let expect: Vec<Vec<bool>> = all_inputs(8).filter(|b| k.contains_cell(phi_cell(b, 2, 2).unwrap().coords())).collect();
        assert_eq!(leaves.iter().map(|(b, _)| b.clone()).collect::<Vec<_>>(), expect);
        for (b, c) in &leaves {
            assert_eq!(*c, phi_cell(b, 2, 2).unwrap());
        }
        assert!(t.violations().is_empty());
        assert_eq!(t.image().unwrap(), k);
        let w = t.witnesses();
        assert_eq!(w.len(), k.len());
        for (input, c) in &w {
            assert_eq!(t.reindex(input).unwrap(), *c);
        }
    }

    #[test]
    fn exhaustive_small_targets() {
        for r in 1..=2u32 {
            let n = 1u64 << (2 * r);
            let inputs: Vec<Vec<bool>> = all_inputs(4 * r as usize).collect();
            for mask in 1..(1u64 << n) {
                let k = from_mask(2, r, mask).unwrap();
                let t = code(&k);
                assert_eq!(t.image().unwrap(), k);
                let mut hit = vec![false; n as usize];
                for input in &inputs {
                    let c = t.reindex(input).unwrap();
                    assert!(k.contains_cell(c.coords()));
                    hit[(c.coords()[0] * (1 << r) + c.coords()[1]) as usize] = true;
                }
                assert_eq!(hit.iter().filter(|h| **h).count(), k.len());
            }
        }
    }

    #[test]
    fn continuity_modulus() {
        let k = DyadicCompactum::new(2, 3, [[0u32, 0], [1, 2], [5, 7], [6, 6], [7, 0]]).unwrap();
        let t = code(&k);
        let inputs: Vec<Vec<bool>> = all_inputs(12).collect();
        for kk in 1..=3usize {
            let n = 4 * kk;
            for w in inputs.chunks(1 << (12 - n)) {
                let first = t.reindex(&w[0]).unwrap();
                let direct = phi_cell(&w[0], 2, 3).unwrap();
                for input in w {
                    let c = t.reindex(input).unwrap();
                    let p = phi_cell(input, 2, 3).unwrap();
                    for j in 0..2 {
                        assert_eq!(c.coords()[j] >> (3 - kk), first.coords()[j] >> (3 - kk));
                        assert_eq!(p.coords()[j] >> (3 - kk), direct.coords()[j] >> (3 - kk));
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_matches_parent_code() {
        let k = DyadicCompactum::new(2, 3, [[0u32, 0], [1, 2], [5, 7], [6, 6]]).unwrap();
        let t = code(&k);
        for r in 1..=3 {
            let parent = k.parent_cover(r).unwrap();
            assert_eq!(t.truncate(r).unwrap(), code(&parent), "level {r}");
        }
        assert!(t.truncate(0).is_err());
        assert!(t.truncate(4).is_err());
    }

    #[test]
    fn json_round_trip() {
        let k = DyadicCompactum::new(2, 1, [[1u32, 0]]).unwrap();
        let t = code(&k);
        let s = serde_json::to_string(&t).unwrap();
        let x = r#"{"0":{"0":{"cell":[1,0]},"1":{"cell":[1,0]}}}"#;
        let expect = format!(r#"{{"dim":2,"level":1,"depth":4,"leaves":"4","root":{{"1":{{"0":{x},"1":{x}}}}}}}"#);
        assert_eq!(s, expect);
        let back: PrefixTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let bad = s.replacen("[1,0]", "[0,0]", 1);
        assert!(serde_json::from_str::<PrefixTree>(&bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn random_level3_targets(mask in any::<u64>()) {
            prop_assume!(mask != 0);
            let k = from_mask(2, 3, mask).unwrap();
            let t = code(&k);
            prop_assert!(t.violations().is_empty());
            prop_assert_eq!(t.image().unwrap(), k.clone());
            let mut reached = std::collections::BTreeSet::new();
            for input in all_inputs(12) {
                let c = t.reindex(&input).unwrap();
                prop_assert!(k.contains_cell(c.coords()));
                reached.insert(c.coords().to_vec());
            }
            prop_assert_eq!(reached.len(), k.len());
        }
    }
}
