//! Set partitions, the refinement poset, its Möbius function, and disc
//! crossing tests on partitions.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

use crate::permcore::GroundSet;

/// Default cap for full-lattice enumeration (Bell numbers explode fast).
pub const DEFAULT_PARTITION_GUARD: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("blocks must be non-empty")]
    EmptyBlock,
    #[error("blocks do not partition the ground set (label {0})")]
    NotAPartition(u32),
    #[error("partitions live on different ground sets")]
    GroundMismatch,
    #[error("first partition is not a refinement of the second")]
    NotComparable,
    #[error("n = {n} exceeds the enumeration guard {guard}")]
    GuardExceeded { n: u32, guard: u32 },
}

#[derive(Serialize, Deserialize, Clone)]
struct PartitionWire {
    ground: Vec<u32>,
    blocks: Vec<Vec<u32>>,
}

/// A partition of a ground set into disjoint non-empty blocks, kept in
/// canonical form: elements sorted inside each block, blocks sorted by their
/// minima. Structural equality is therefore semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PartitionWire", into = "PartitionWire")]
pub struct SetPartition {
    ground: GroundSet,
    blocks: Vec<Vec<u32>>,
}

impl TryFrom<PartitionWire> for SetPartition {
    type Error = String;
    fn try_from(w: PartitionWire) -> Result<Self, String> {
        let ground = GroundSet::new(w.ground).map_err(|e| e.to_string())?;
        SetPartition::new(ground, w.blocks).map_err(|e| e.to_string())
    }
}

impl From<SetPartition> for PartitionWire {
    fn from(p: SetPartition) -> PartitionWire {
        PartitionWire {
            ground: p.ground.labels().to_vec(),
            blocks: p.blocks,
        }
    }
}

impl SetPartition {
    /// Build a partition, validating cover/disjointness and canonicalizing
    /// the block order.
    pub fn new(ground: GroundSet, mut blocks: Vec<Vec<u32>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; ground.len()];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            block.sort_unstable();
            for &label in block.iter() {
                match ground.position(label) {
                    Some(i) if !seen[i] => seen[i] = true,
                    _ => return Err(PartitionError::NotAPartition(label)),
                }
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(PartitionError::NotAPartition(ground.label_at(i)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { ground, blocks })
    }

    /// The all-singletons partition (the bottom of the refinement order).
    pub fn singletons(ground: GroundSet) -> Self {
        let blocks = ground.labels().iter().map(|&l| vec![l]).collect();
        SetPartition { ground, blocks }
    }

    /// The one-block partition (the top of the refinement order).
    pub fn full(ground: GroundSet) -> Self {
        let blocks = vec![ground.labels().to_vec()];
        SetPartition { ground, blocks }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `label`, if the label is present.
    pub fn block_index_of(&self, label: u32) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&label).is_ok())
    }

    /// Block indices as a restricted-growth string over ground positions;
    /// canonical, so usable as a hash key.
    pub fn rgs_key(&self) -> Vec<u32> {
        let mut key = vec![0u32; self.ground.len()];
        for (bi, block) in self.blocks.iter().enumerate() {
            for &label in block {
                key[self.ground.position(label).expect("in ground")] = bi as u32;
            }
        }
        key
    }

    /// Least interleaved quadruple `a < b < c < d` with `a, c` in one block
    /// and `b, d` in another, if any.
    pub fn crossing_witness(&self) -> Option<[u32; 4]> {
        let labels = self.ground.labels();
        let block_of: Vec<usize> = labels
            .iter()
            .map(|&l| self.block_index_of(l).expect("in ground"))
            .collect();
        let n = labels.len();
        for a in 0..n {
            for b in (a + 1)..n {
                if block_of[b] == block_of[a] {
                    continue;
                }
                for c in (b + 1)..n {
                    if block_of[c] != block_of[a] {
                        continue;
                    }
                    for d in (c + 1)..n {
                        if block_of[d] == block_of[b] {
                            return Some([labels[a], labels[b], labels[c], labels[d]]);
                        }
                    }
                }
            }
        }
        None
    }

    /// Whether no two blocks interleave in the ground order.
    pub fn is_noncrossing_disc(&self) -> bool {
        self.crossing_witness().is_none()
    }

    /// Refinement order: true when every block of `self` is contained in a
    /// block of `other`.
    pub fn leq(&self, other: &SetPartition) -> Result<bool, PartitionError> {
        if self.ground != other.ground {
            return Err(PartitionError::GroundMismatch);
        }
        for block in &self.blocks {
            let target = other.block_index_of(block[0]).expect("in ground");
            if block
                .iter()
                .any(|&l| other.block_index_of(l) != Some(target))
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every block has exactly two elements.
    pub fn is_complete_matching(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    /// The partition induced on a subset of the ground: intersect each block
    /// with the subset and drop what vanishes.
    pub fn restricted_to(&self, subset: &GroundSet) -> Result<SetPartition, PartitionError> {
        if !subset.is_subset_of(&self.ground) {
            return Err(PartitionError::GroundMismatch);
        }
        let blocks: Vec<Vec<u32>> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .copied()
                    .filter(|&l| subset.contains(l))
                    .collect::<Vec<u32>>()
            })
            .filter(|b| !b.is_empty())
            .collect();
        SetPartition::new(subset.clone(), blocks)
    }

    /// Möbius function of the refinement poset, evaluated on the interval
    /// `[self, other]`. Computed by the defining recursion (the interval sums
    /// vanish), memoized over the interval; requires `self ≤ other`.
    pub fn mobius(&self, other: &SetPartition) -> Result<i64, PartitionError> {
        if !self.leq(other)? {
            return Err(PartitionError::NotComparable);
        }
        let mut memo: HashMap<Vec<u32>, i64> = HashMap::new();
        Ok(mobius_rec(self, other, &mut memo))
    }
}

/// Möbius values against the one-block partition, shared across calls.
/// Filling the table for a ground size computes the same recursion once for
/// the whole lattice; concurrent readers see consistent values because a
/// key's value never changes.
pub(crate) fn mobius_to_top_cached(pi: &SetPartition) -> i64 {
    type MuCache = Mutex<HashMap<(u32, Vec<u32>), i64>>;
    static TABLE: OnceLock<MuCache> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    let n = pi.ground().len() as u32;
    let key = (n, pi.rgs_key());
    if let Some(&v) = table.lock().expect("mobius cache").get(&key) {
        return v;
    }
    // Run the recursion from the bottom of the contiguous lattice; its memo
    // then holds the value for every partition of the same size.
    let ground = GroundSet::contiguous(n);
    let bottom = SetPartition::singletons(ground.clone());
    let top = SetPartition::full(ground);
    let mut memo = HashMap::new();
    mobius_rec(&bottom, &top, &mut memo);
    let mut guard = table.lock().expect("mobius cache");
    for (rgs, value) in memo {
        guard.insert((n, rgs), value);
    }
    *guard.get(&key).expect("bottom recursion covers the lattice")
}

fn mobius_rec(theta: &SetPartition, rho: &SetPartition, memo: &mut HashMap<Vec<u32>, i64>) -> i64 {
    let key = theta.rgs_key();
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let value = if theta == rho {
        1
    } else {
        let mut sum = 0i64;
        for pi in interval_strictly_above(theta, rho) {
            sum += mobius_rec(&pi, rho, memo);
        }
        -sum
    };
    memo.insert(key, value);
    value
}

/// All partitions `π` with `theta < π ≤ rho`, enumerated by regrouping the
/// blocks of `theta` within each block of `rho`.
fn interval_strictly_above(theta: &SetPartition, rho: &SetPartition) -> Vec<SetPartition> {
    // For each rho-block, the theta-blocks inside it.
    let groups: Vec<Vec<&Vec<u32>>> = rho
        .blocks()
        .iter()
        .map(|rb| {
            theta
                .blocks()
                .iter()
                .filter(|tb| rb.binary_search(&tb[0]).is_ok())
                .collect()
        })
        .collect();

    // Ways to partition each group of theta-blocks.
    let per_group: Vec<Vec<Vec<Vec<u32>>>> = groups
        .iter()
        .map(|group| {
            let k = group.len() as u32;
            let mut ways = Vec::new();
            for p in
                enumerate_partitions_with_guard(k, k).expect("guard equals n")
            {
                let merged: Vec<Vec<u32>> = p
                    .blocks()
                    .iter()
                    .map(|idx_block| {
                        let mut merged_block: Vec<u32> = idx_block
                            .iter()
                            .flat_map(|&i| group[(i - 1) as usize].iter().copied())
                            .collect();
                        merged_block.sort_unstable();
                        merged_block
                    })
                    .collect();
                ways.push(merged);
            }
            ways
        })
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; per_group.len()];
    loop {
        let blocks: Vec<Vec<u32>> = choice
            .iter()
            .enumerate()
            .flat_map(|(g, &c)| per_group[g][c].iter().cloned())
            .collect();
        let pi = SetPartition::new(theta.ground().clone(), blocks).expect("valid regrouping");
        if &pi != theta {
            out.push(pi);
        }
        // odometer
        let mut g = 0usize;
        loop {
            if g == per_group.len() {
                return out;
            }
            choice[g] += 1;
            if choice[g] < per_group[g].len() {
                break;
            }
            choice[g] = 0;
            g += 1;
        }
    }
}

/// Streaming enumeration of all partitions of `{1, ..., n}` in
/// restricted-growth-string order.
pub struct Partitions {
    ground: GroundSet,
    rgs: Vec<u32>,
    maxes: Vec<u32>,
    done: bool,
}

pub fn enumerate_partitions(n: u32) -> Result<Partitions, PartitionError> {
    enumerate_partitions_with_guard(n, DEFAULT_PARTITION_GUARD)
}

pub fn enumerate_partitions_with_guard(n: u32, guard: u32) -> Result<Partitions, PartitionError> {
    if n == 0 || n > guard {
        return Err(PartitionError::GuardExceeded { n, guard });
    }
    Ok(Partitions {
        ground: GroundSet::contiguous(n),
        rgs: vec![0; n as usize],
        maxes: vec![0; n as usize],
        done: false,
    })
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let num_blocks = (*self.rgs.iter().max().expect("non-empty") + 1) as usize;
        let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); num_blocks];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b as usize].push(self.ground.label_at(i));
        }
        let current = SetPartition {
            ground: self.ground.clone(),
            blocks,
        };

        // Advance: rightmost position that can still grow by one.
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.maxes[i - 1] {
                self.rgs[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.rgs[i]);
                for j in (i + 1)..n {
                    self.rgs[j] = 0;
                    self.maxes[j] = self.maxes[j - 1];
                }
                return Some(current);
            }
        }
        self.done = true;
        Some(current)
    }
}
