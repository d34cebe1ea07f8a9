//! Set partitions of `{1, …, n}` ordered by refinement.
//!
//! A [`Partition`] is stored as a restricted-growth string: element `i`
//! (0-based internally) carries the id of its block, element 0 is in block
//! 0, and each id is at most one more than the largest id seen before it.
//! Two partitions are equal exactly when their strings are equal.
//!
//! Ordering convention: `p ≤ q` when `p` is finer than `q`. The bottom is
//! `1|2|…|n`, the top is the one-block partition.
//!
//! A [`Bipartition`] is a two-block partition stored as the bitmask of the
//! block that contains element 1, which caps it at 32 elements.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ground set for which bipartitions (bitmask form) are supported.
pub const MAX_BIPARTITION_N: usize = 32;

/// Largest `n` accepted by [`enumerate_partitions`].
pub const MAX_ENUMERATE_N: usize = 10;

/// Largest block count accepted by [`enumerate_coarsenings`].
pub const MAX_COARSENING_BLOCKS: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<u32>,
}

impl Partition {
    /// Builds a partition from any block labelling, relabelling blocks in
    /// order of first appearance.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("partition of an empty ground set"));
        }
        let mut seen = std::collections::HashMap::new();
        let blocks = labels
            .iter()
            .map(|l| {
                let next = seen.len() as u32;
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Partition { blocks })
    }

    /// Accepts a string that is already in restricted-growth form.
    pub fn from_rgs(rgs: Vec<u32>) -> Result<Self> {
        if rgs.is_empty() {
            return Err(Error::Empty("partition of an empty ground set"));
        }
        let mut max_seen: i64 = -1;
        for (i, &b) in rgs.iter().enumerate() {
            if b as i64 > max_seen + 1 {
                return Err(Error::OutOfRange {
                    what: "restricted-growth entry",
                    value: format!("{b} at position {i}"),
                    range: "at most 1 + max of the prefix",
                });
            }
            max_seen = max_seen.max(b as i64);
        }
        Ok(Partition { blocks: rgs })
    }

    /// Builds a partition from explicit blocks of 1-based elements.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(Error::Empty("partition of an empty ground set"));
        }
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parse {
                    text: format!("{blocks:?}"),
                    reason: "empty block".into(),
                });
            }
            for &e in block {
                if e == 0 || e > n {
                    return Err(Error::Parse {
                        text: format!("{blocks:?}"),
                        reason: format!("element {e} outside 1..={n}"),
                    });
                }
                if labels[e - 1] != usize::MAX {
                    return Err(Error::Parse {
                        text: format!("{blocks:?}"),
                        reason: format!("duplicate element {e}"),
                    });
                }
                labels[e - 1] = b;
            }
        }
        Partition::from_labels(&labels)
    }

    /// `1|2|…|n`, the finest partition.
    pub fn singletons(n: usize) -> Self {
        assert!(n >= 1, "partition of an empty ground set");
        Partition {
            blocks: (0..n as u32).collect(),
        }
    }

    /// The one-block partition `12…n`.
    pub fn one_block(n: usize) -> Self {
        assert!(n >= 1, "partition of an empty ground set");
        Partition { blocks: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.iter().copied().max().map_or(0, |m| m as usize + 1)
    }

    /// Block id of each element, in restricted-growth form.
    pub fn rgs(&self) -> &[u32] {
        &self.blocks
    }

    /// Block id of the 0-based element `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.blocks[i] as usize
    }

    /// Blocks as sorted lists of 0-based elements, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &b) in self.blocks.iter().enumerate() {
            out[b as usize].push(i);
        }
        out
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.blocks[i] == self.blocks[j]
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_partition(self))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({})", format_partition(self))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_partition(self))
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_partition(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    n: u8,
    members: u32,
}

impl Bipartition {
    /// `members` is the bitmask (bit `i` = element `i + 1`) of the block
    /// holding element 1.
    pub fn new(n: usize, members: u32) -> Result<Self> {
        if !(2..=MAX_BIPARTITION_N).contains(&n) {
            return Err(Error::OutOfRange {
                what: "bipartition ground set size",
                value: n.to_string(),
                range: "2..=32",
            });
        }
        let full = full_mask(n);
        if members & 1 == 0 || members & !full != 0 || members == full {
            return Err(Error::OutOfRange {
                what: "bipartition mask",
                value: format!("{members:#b}"),
                range: "proper subset of 1..=n containing element 1",
            });
        }
        Ok(Bipartition { n: n as u8, members })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn members(&self) -> u32 {
        self.members
    }

    pub fn complement(&self) -> u32 {
        full_mask(self.n()) & !self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members >> i & 1 == 1
    }

    /// Sizes of the two blocks, `(|a|, |ā|)`, where `a` holds element 1.
    pub fn sizes(&self) -> (usize, usize) {
        let na = self.members.count_ones() as usize;
        (na, self.n() - na)
    }

    /// 0-based elements of the block holding element 1.
    pub fn block(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.contains(i)).collect()
    }

    /// 0-based elements of the other block.
    pub fn complement_block(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.contains(i)).collect()
    }

    pub fn to_partition(&self) -> Partition {
        let blocks = (0..self.n())
            .map(|i| if self.contains(i) { 0 } else { 1 })
            .collect();
        Partition { blocks }
    }

    /// Converts a two-block partition; `None` for any other block count.
    pub fn from_partition(p: &Partition) -> Option<Self> {
        if p.num_blocks() != 2 || p.n() > MAX_BIPARTITION_N {
            return None;
        }
        let members = p
            .rgs()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 0)
            .fold(0u32, |m, (i, _)| m | 1 << i);
        Some(Bipartition {
            n: p.n() as u8,
            members,
        })
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_partition(&self.to_partition()))
    }
}

impl fmt::Debug for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bipartition({self})")
    }
}

impl Serialize for Bipartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn check_same_n(p: &Partition, q: &Partition) -> Result<()> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            left: p.n(),
            right: q.n(),
        });
    }
    Ok(())
}

/// Greatest lower bound: `i` and `j` share a block iff they share one in
/// both `p` and `q`.
pub fn meet(p: &Partition, q: &Partition) -> Result<Partition> {
    check_same_n(p, q)?;
    let pairs: Vec<(u32, u32)> = p.blocks.iter().copied().zip(q.blocks.iter().copied()).collect();
    Partition::from_labels(&pairs)
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Least upper bound: connected components of the union of both block
/// relations.
pub fn join(p: &Partition, q: &Partition) -> Result<Partition> {
    check_same_n(p, q)?;
    let n = p.n();
    let mut sets = DisjointSets::new(n);
    for part in [p, q] {
        let mut first = vec![usize::MAX; part.num_blocks()];
        for (i, &b) in part.blocks.iter().enumerate() {
            let b = b as usize;
            if first[b] == usize::MAX {
                first[b] = i;
            } else {
                sets.union(first[b], i);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| sets.find(i)).collect();
    Partition::from_labels(&roots)
}

/// True iff every block of `p` lies inside a block of `q` (`p ≤ q`).
pub fn is_refinement(p: &Partition, q: &Partition) -> Result<bool> {
    check_same_n(p, q)?;
    let mut image = vec![u32::MAX; p.num_blocks()];
    for (&pb, &qb) in p.blocks.iter().zip(&q.blocks) {
        let slot = &mut image[pb as usize];
        if *slot == u32::MAX {
            *slot = qb;
        } else if *slot != qb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Meet of a nonempty collection.
pub fn meet_all<'a, I>(parts: I) -> Result<Partition>
where
    I: IntoIterator<Item = &'a Partition>,
{
    let mut iter = parts.into_iter();
    let first = iter
        .next()
        .ok_or(Error::Empty("meet over an empty collection"))?
        .clone();
    iter.try_fold(first, |acc, p| meet(&acc, p))
}

/// All `2^(n-1) - 1` bipartitions of `{1..n}`, by ascending mask.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if !(2..=MAX_BIPARTITION_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n.to_string(),
            range: "2..=32",
        });
    }
    let free = (n - 1) as u32;
    // members = 1 | (s << 1) for s over the free bits, excluding the full set
    let count: u64 = (1u64 << free) - 1;
    Ok((0..count)
        .map(|s| Bipartition {
            n: n as u8,
            members: 1 | ((s as u32) << 1),
        })
        .collect())
}

/// Every bipartition that `mu` refines: unions of `mu`'s blocks split into
/// two nonempty groups. Exactly `2^(k-1) - 1` of them for `k` blocks,
/// returned by ascending mask.
pub fn entailed_dichotomies(mu: &Partition) -> Result<Vec<Bipartition>> {
    let n = mu.n();
    let k = mu.num_blocks();
    if k <= 1 {
        return Ok(Vec::new());
    }
    if n > MAX_BIPARTITION_N {
        return Err(Error::OutOfRange {
            what: "n",
            value: n.to_string(),
            range: "1..=32",
        });
    }
    let mut block_masks = vec![0u32; k];
    for (i, &b) in mu.blocks.iter().enumerate() {
        block_masks[b as usize] |= 1 << i;
    }
    // block 0 always sits with element 1; choose which of blocks 1..k join it
    let choices = (1u64 << (k - 1)) - 1;
    let mut out: Vec<Bipartition> = (0..choices)
        .map(|s| {
            let members = (1..k)
                .filter(|&b| s >> (b - 1) & 1 == 1)
                .fold(block_masks[0], |m, b| m | block_masks[b]);
            Bipartition {
                n: n as u8,
                members,
            }
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Advances a restricted-growth string to its lexicographic successor.
fn next_rgs(a: &mut [u32], prefix_max: &mut [u32]) -> bool {
    let n = a.len();
    for i in (1..n).rev() {
        if a[i] <= prefix_max[i - 1] {
            a[i] += 1;
            prefix_max[i] = prefix_max[i - 1].max(a[i]);
            for j in i + 1..n {
                a[j] = 0;
                prefix_max[j] = prefix_max[i];
            }
            return true;
        }
    }
    false
}

fn all_rgs(n: usize) -> Vec<Vec<u32>> {
    let mut a = vec![0u32; n];
    let mut prefix_max = vec![0u32; n];
    let mut out = vec![a.clone()];
    while next_rgs(&mut a, &mut prefix_max) {
        out.push(a.clone());
    }
    out
}

/// All Bell(n) partitions of `{1..n}` in lexicographic restricted-growth
/// order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    if !(1..=MAX_ENUMERATE_N).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n.to_string(),
            range: "1..=10",
        });
    }
    Ok(all_rgs(n)
        .into_iter()
        .map(|blocks| Partition { blocks })
        .collect())
}

/// Every partition `π` with `mu ≤ π`: one per partition of `mu`'s blocks,
/// so Bell(k) of them.
pub fn enumerate_coarsenings(mu: &Partition) -> Result<Vec<Partition>> {
    let k = mu.num_blocks();
    if k > MAX_COARSENING_BLOCKS {
        return Err(Error::OutOfRange {
            what: "block count",
            value: k.to_string(),
            range: "1..=12",
        });
    }
    Ok(all_rgs(k)
        .into_iter()
        .map(|merge| {
            let labels: Vec<u32> = mu.blocks.iter().map(|&b| merge[b as usize]).collect();
            // merge is itself an rgs over blocks ordered by least element,
            // so the composed labelling is already canonical
            Partition { blocks: labels }
        })
        .collect())
}

/// Stirling numbers of the second kind `S(n, k)`, exact in `u64`.
pub fn stirling2(n: usize, k: usize) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    if n == 0 {
        return Ok(1);
    }
    // row[j] = S(i, j)
    let mut row = vec![0u64; k + 1];
    row[0] = 1;
    for i in 1..=n {
        let top = k.min(i);
        for j in (1..=top).rev() {
            let v = (j as u64)
                .checked_mul(row[j])
                .and_then(|x| x.checked_add(row[j - 1]))
                .ok_or_else(|| Error::Overflow(format!("stirling2({n}, {k})")))?;
            row[j] = v;
        }
        row[0] = 0;
    }
    Ok(row[k])
}

/// Bell numbers, exact up to `n = 25` (Bell(26) exceeds `u64`).
pub fn bell_number(n: usize) -> Result<u64> {
    if n == 0 {
        return Ok(1);
    }
    let mut row = vec![0u64; n + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=i).rev() {
            row[j] = (j as u64)
                .checked_mul(row[j])
                .and_then(|x| x.checked_add(row[j - 1]))
                .ok_or_else(|| Error::Overflow(format!("bell_number({n})")))?;
        }
        row[0] = 0;
    }
    row.iter().try_fold(0u64, |acc, &s| {
        acc.checked_add(s)
            .ok_or_else(|| Error::Overflow(format!("bell_number({n})")))
    })
}

/// Canonical text: blocks by least element, ascending elements, blocks
/// joined with `|`. Digit runs (`12|3`) when `n ≤ 9`, commas otherwise.
pub fn format_partition(p: &Partition) -> String {
    let compact = p.n() <= 9;
    p.blocks()
        .iter()
        .map(|block| {
            let items: Vec<String> = block.iter().map(|e| (e + 1).to_string()).collect();
            if compact {
                items.concat()
            } else {
                items.join(",")
            }
        })
        .collect::<Vec<_>>()
        .join("|")
}

fn parse_error(text: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        text: text.to_string(),
        reason: reason.into(),
    }
}

/// Parses `12|3|4`, `1,2,3,5,6|4`, `1 2 | 3 4` and similar.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let raw_blocks: Vec<Vec<&str>> = text
        .trim()
        .split('|')
        .map(|b| {
            b.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect()
        })
        .collect();
    if raw_blocks.iter().any(Vec::is_empty) {
        return Err(parse_error(text, "empty block"));
    }
    for token in raw_blocks.iter().flatten() {
        if !token.bytes().all(|c| c.is_ascii_digit()) {
            return Err(parse_error(text, format!("malformed token {token:?}")));
        }
    }

    let single_tokens = raw_blocks.iter().all(|b| b.len() == 1);
    if single_tokens {
        let digit_blocks: Vec<Vec<usize>> = raw_blocks
            .iter()
            .map(|b| b[0].bytes().map(|c| (c - b'0') as usize).collect())
            .collect();
        let n: usize = digit_blocks.iter().map(Vec::len).sum();
        if n <= 9 {
            match build_checked(text, &digit_blocks) {
                Ok(p) => return Ok(p),
                // a single-token form may still be a list of multi-digit
                // indices, e.g. "1|2|…|10"
                Err(e) if n < 2 || raw_blocks.iter().all(|b| b[0].len() == 1) => return Err(e),
                Err(_) => {}
            }
        }
    }

    let mut int_blocks = Vec::with_capacity(raw_blocks.len());
    for block in &raw_blocks {
        let mut items = Vec::with_capacity(block.len());
        for token in block {
            let v: usize = token
                .parse()
                .map_err(|_| parse_error(text, format!("malformed token {token:?}")))?;
            items.push(v);
        }
        int_blocks.push(items);
    }
    build_checked(text, &int_blocks)
}

fn build_checked(text: &str, blocks: &[Vec<usize>]) -> Result<Partition> {
    let n: usize = blocks.iter().map(Vec::len).sum();
    let mut seen = vec![false; n + 1];
    for &e in blocks.iter().flatten() {
        if e == 0 {
            return Err(parse_error(text, "element 0 (indices are 1-based)"));
        }
        if e <= n {
            if seen[e] {
                return Err(parse_error(text, format!("duplicate element {e}")));
            }
            seen[e] = true;
        }
    }
    for &e in blocks.iter().flatten() {
        if e > n {
            // any element above n means some index in 1..=n is missing,
            // unless it is a duplicate that was already reported
            let missing = (1..=n).find(|&i| !seen[i]).unwrap_or(n);
            return Err(parse_error(
                text,
                format!("element {e} exceeds n = {n}; missing element {missing}"),
            ));
        }
    }
    Partition::from_blocks(blocks).map_err(|e| match e {
        Error::Parse { reason, .. } => parse_error(text, reason),
        other => other,
    })
}
