//! Random recursive trees, percolation marks, depth statistics, the exact
//! first-moment oracle for the root-cluster size, and the equivalent
//! Pólya–Hoppe urn.
//!
//! Vertices are labeled `1..=n`; vertex 1 is the root. A tree is stored as
//! a flat parent sequence (`parent[i] < i`), so every downstream kernel is
//! a single forward pass over vertex labels. Edge `i` means the edge from
//! vertex `i` to its parent.

use std::io::{Read, Write};

use crate::rng::Stream;
use crate::{Error, Result};

/// Largest supported vertex count (parents are stored as `u32`).
pub const MAX_VERTICES: u64 = u32::MAX as u64;

const DUMP_MAGIC: &[u8; 5] = b"PCLB1";

/// Uniform random recursive tree on `{1..n}` as a parent-pointer array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveTree {
    // parents[i - 2] is the parent of vertex i, for i in 2..=n.
    parents: Vec<u32>,
}

impl RecursiveTree {
    /// Draw a uniform recursive tree of size `n`: vertex `i` attaches to a
    /// uniform vertex of `{1..i-1}`, independently for each `i`.
    pub fn sample(n: u64, rng: &mut Stream) -> Result<RecursiveTree> {
        check_size(n)?;
        let mut parents = Vec::with_capacity((n - 1) as usize);
        for i in 2..=n {
            parents.push((1 + rng.below(i - 1)) as u32);
        }
        Ok(RecursiveTree { parents })
    }

    /// Build from an explicit parent sequence (`parents[i-2]` for vertex
    /// `i`), validating the increasing-tree property.
    pub fn from_parents(parents: Vec<u32>) -> Result<RecursiveTree> {
        check_size(parents.len() as u64 + 1)?;
        for (idx, &p) in parents.iter().enumerate() {
            let child = idx as u64 + 2;
            if p == 0 || (p as u64) >= child {
                return Err(Error::invalid(
                    "parents",
                    format!("parent of vertex {child} must lie in 1..{child}, got {p}"),
                ));
            }
        }
        Ok(RecursiveTree { parents })
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> u64 {
        self.parents.len() as u64 + 1
    }

    /// Parent of vertex `v`, or `None` for the root.
    pub fn parent(&self, v: u64) -> Option<u32> {
        if v <= 1 {
            None
        } else {
            Some(self.parents[(v - 2) as usize])
        }
    }

    /// Number of edges on the branch from `v` to the root.
    pub fn depth(&self, v: u64) -> Result<u32> {
        if v < 1 || v > self.vertex_count() {
            return Err(Error::invalid(
                "v",
                format!("vertex {v} out of range 1..={}", self.vertex_count()),
            ));
        }
        let mut d = 0;
        let mut cur = v;
        while cur > 1 {
            cur = self.parents[(cur - 2) as usize] as u64;
            d += 1;
        }
        Ok(d)
    }

    /// Depths of all vertices in one forward pass
    /// (`depth[i] = depth[parent[i]] + 1`).
    pub fn depths(&self) -> Vec<u32> {
        let n = self.vertex_count() as usize;
        let mut depths = vec![0u32; n + 1];
        for i in 2..=n {
            depths[i] = depths[self.parents[i - 2] as usize] + 1;
        }
        depths.remove(0);
        depths
    }

    /// Children lists in compressed (CSR) form.
    pub fn children(&self) -> ChildrenCsr {
        let n = self.vertex_count() as usize;
        let mut offsets = vec![0u32; n + 2];
        for &p in &self.parents {
            offsets[p as usize + 1] += 1;
        }
        for v in 1..offsets.len() {
            offsets[v] += offsets[v - 1];
        }
        let mut targets = vec![0u32; self.parents.len()];
        let mut cursor = offsets.clone();
        for (idx, &p) in self.parents.iter().enumerate() {
            let child = idx as u32 + 2;
            targets[cursor[p as usize] as usize] = child;
            cursor[p as usize] += 1;
        }
        ChildrenCsr { offsets, targets }
    }
}

/// Compressed children adjacency: `children(v)` slices into one flat array.
#[derive(Debug, Clone)]
pub struct ChildrenCsr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl ChildrenCsr {
    pub fn children(&self, v: u64) -> &[u32] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.targets[lo..hi]
    }
}

/// Whether percolation marks are drawn while the tree grows or after it is
/// complete. The joint law of `(tree, marks)` is identical either way; the
/// two modes only consume the random stream in a different order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkOrder {
    DuringGrowth,
    AfterGrowth,
}

/// A recursive tree together with immutable per-edge removal marks.
#[derive(Debug, Clone)]
pub struct MarkedTree {
    tree: RecursiveTree,
    removed: BitVec,
    survival_prob: f64,
}

impl MarkedTree {
    /// Grow a uniform recursive tree of size `n` and remove each edge
    /// independently with probability `1 - p`.
    pub fn sample(n: u64, p: f64, rng: &mut Stream, order: MarkOrder) -> Result<MarkedTree> {
        check_size(n)?;
        check_prob(p)?;
        let edges = (n - 1) as usize;
        match order {
            MarkOrder::DuringGrowth => {
                let mut parents = Vec::with_capacity(edges);
                let mut removed = BitVec::zeros(edges);
                for i in 2..=n {
                    parents.push((1 + rng.below(i - 1)) as u32);
                    if rng.bernoulli(1.0 - p) {
                        removed.set((i - 2) as usize);
                    }
                }
                Ok(MarkedTree {
                    tree: RecursiveTree { parents },
                    removed,
                    survival_prob: p,
                })
            }
            MarkOrder::AfterGrowth => {
                let tree = RecursiveTree::sample(n, rng)?;
                let mut removed = BitVec::zeros(edges);
                for e in 0..edges {
                    if rng.bernoulli(1.0 - p) {
                        removed.set(e);
                    }
                }
                Ok(MarkedTree {
                    tree,
                    removed,
                    survival_prob: p,
                })
            }
        }
    }

    /// Attach an explicit mark pattern to a tree. `removed[i - 2]` refers
    /// to the edge from vertex `i` to its parent.
    pub fn from_parts(tree: RecursiveTree, removed: &[bool], survival_prob: f64) -> Result<MarkedTree> {
        check_prob(survival_prob)?;
        if removed.len() as u64 != tree.vertex_count() - 1 {
            return Err(Error::invalid(
                "removed",
                format!("expected {} marks, got {}", tree.vertex_count() - 1, removed.len()),
            ));
        }
        let mut bits = BitVec::zeros(removed.len());
        for (e, &r) in removed.iter().enumerate() {
            if r {
                bits.set(e);
            }
        }
        Ok(MarkedTree {
            tree,
            removed: bits,
            survival_prob,
        })
    }

    pub fn tree(&self) -> &RecursiveTree {
        &self.tree
    }

    pub fn vertex_count(&self) -> u64 {
        self.tree.vertex_count()
    }

    pub fn survival_prob(&self) -> f64 {
        self.survival_prob
    }

    /// Whether the edge from vertex `v` (>= 2) to its parent was removed.
    pub fn removed(&self, v: u64) -> bool {
        self.removed.get((v - 2) as usize)
    }

    pub fn removed_count(&self) -> u64 {
        self.removed.count_ones()
    }

    /// Binary dump: magic `PCLB1`, `n` and `p` as 8-byte little-endian,
    /// parents as 8-byte little-endian, removal flags as packed bits with
    /// edge 2 in the least significant bit of the first byte.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&self.vertex_count().to_le_bytes())?;
        w.write_all(&self.survival_prob.to_le_bytes())?;
        for &p in &self.tree.parents {
            w.write_all(&(p as u64).to_le_bytes())?;
        }
        w.write_all(&self.removed.to_packed_bytes())?;
        Ok(())
    }

    /// Read back a [`MarkedTree`] written by [`MarkedTree::write_to`].
    pub fn read_from<R: Read>(mut r: R) -> Result<MarkedTree> {
        let io_err = |source| Error::Io {
            path: "<marked tree dump>".into(),
            source,
        };
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(io_err)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Format("bad magic bytes in marked-tree dump".into()));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8).map_err(io_err)?;
        let n = u64::from_le_bytes(buf8);
        check_size(n)?;
        r.read_exact(&mut buf8).map_err(io_err)?;
        let p = f64::from_le_bytes(buf8);
        check_prob(p)?;
        let edges = (n - 1) as usize;
        let mut parents = Vec::with_capacity(edges);
        for _ in 0..edges {
            r.read_exact(&mut buf8).map_err(io_err)?;
            let v = u64::from_le_bytes(buf8);
            if v > MAX_VERTICES {
                return Err(Error::Format(format!("parent value {v} out of range")));
            }
            parents.push(v as u32);
        }
        let tree = RecursiveTree::from_parents(parents)?;
        let mut packed = vec![0u8; edges.div_ceil(8)];
        r.read_exact(&mut packed).map_err(io_err)?;
        let removed = BitVec::from_packed_bytes(&packed, edges);
        Ok(MarkedTree {
            tree,
            removed,
            survival_prob: p,
        })
    }
}

/// Exact expectation of `G_n / n`, the root-cluster fraction after
/// percolation with survival probability `p`, computed in `O(n)`.
///
/// Vertex `j` stays connected to the root exactly when all edges on its
/// branch survive; by the record decomposition of recursive-tree depths the
/// branch indicators are independent Bernoulli(1/i), giving
/// `P(j connected) = prod_{i=1}^{j-1} (i - 1 + p) / i`.
pub fn exact_mean_root_fraction(n: u64, p: f64) -> Result<f64> {
    check_size(n)?;
    check_prob(p)?;
    let mut sum = 0.0;
    let mut connected_prob = 1.0; // vertex 1
    for j in 1..=n {
        if j > 1 {
            let i = (j - 1) as f64;
            connected_prob *= (i - 1.0 + p) / i;
        }
        sum += connected_prob;
    }
    Ok(sum / n as f64)
}

/// State of the Pólya–Hoppe urn equivalent to percolated tree growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrnState {
    pub red: u64,
    pub black: u64,
}

impl UrnState {
    pub fn size(&self) -> u64 {
        self.red + self.black
    }
}

/// Run the urn to size `n`: start from one red ball; at each step add a
/// black ball with probability `1 - p`, otherwise duplicate the color of a
/// uniformly chosen ball. The final black count has exactly the law of the
/// number of vertices disconnected from the root after percolation.
pub fn urn_run(n: u64, p: f64, rng: &mut Stream) -> Result<UrnState> {
    check_size(n)?;
    check_prob(p)?;
    let mut state = UrnState { red: 1, black: 0 };
    while state.size() < n {
        if rng.bernoulli(1.0 - p) || rng.below(state.size()) < state.black {
            state.black += 1;
        } else {
            state.red += 1;
        }
    }
    Ok(state)
}

/// Black-ball count of [`urn_run`] at urn size `n`; equal in law to `Δ_n`.
pub fn urn_black_count(n: u64, p: f64, rng: &mut Stream) -> Result<u64> {
    urn_run(n, p, rng).map(|s| s.black)
}

/// Visit every recursive tree on `n` vertices exactly once, as parent
/// arrays in odometer order. There are `(n-1)!` of them; intended for the
/// exhaustive small-`n` verification sweeps.
pub fn for_each_tree(n: u64, mut f: impl FnMut(&RecursiveTree)) {
    assert!(n >= 1, "tree enumeration needs n >= 1");
    if n == 1 {
        f(&RecursiveTree { parents: vec![] });
        return;
    }
    let mut parents: Vec<u32> = (0..(n - 1) as usize).map(|_| 1).collect();
    loop {
        f(&RecursiveTree {
            parents: parents.clone(),
        });
        let mut pos = parents.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            let child = pos as u32 + 2;
            if parents[pos] + 1 < child {
                parents[pos] += 1;
                parents[pos + 1..].fill(1);
                break;
            }
        }
    }
}

fn check_size(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("n", "vertex count must be positive"))
    } else if n > MAX_VERTICES {
        Err(Error::invalid("n", format!("vertex count {n} exceeds {MAX_VERTICES}")))
    } else {
        Ok(())
    }
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("probability {p} outside [0, 1]")))
    }
}

/// Fixed-size bit vector used for percolation marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec {
            words: vec![0u64; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    // Packed little-endian bytes: bit i of the vector is bit (i % 8) of
    // byte i / 8.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, byte) in out.iter_mut().enumerate() {
            let word = self.words[i / 8];
            *byte = (word >> (8 * (i % 8))) as u8;
        }
        out
    }

    pub fn from_packed_bytes(bytes: &[u8], len: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        for i in 0..len {
            if bytes[i / 8] >> (i % 8) & 1 == 1 {
                v.set(i);
            }
        }
        v
    }
}
