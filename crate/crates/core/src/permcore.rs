//! Ground sets, permutations, cycle notation, orbits, induced permutations
//! and Cayley-graph distances.
//!
//! Permutations act on an explicit [`GroundSet`] (any strictly increasing
//! list of positive labels, not just `1..=n`), because restricting a
//! permutation to an arbitrary subset by first return is used everywhere
//! downstream. All values are immutable after construction and all
//! operations are pure.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::partitions::SetPartition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("ground set must be non-empty")]
    EmptyGround,
    #[error("ground labels must be strictly increasing positive integers (offending label {0})")]
    BadGround(u32),
    #[error("images are not a bijection of the ground set")]
    NotBijective,
    #[error("permutations live on different ground sets")]
    GroundMismatch,
    #[error("label {label} at byte {at}: not in the ground set")]
    UnknownLabel { label: u32, at: usize },
    #[error("label {label} at byte {at}: appears more than once")]
    DuplicateLabel { label: u32, at: usize },
    #[error("malformed cycle notation at byte {at}: {what}")]
    Malformed { at: usize, what: &'static str },
    #[error("subset is empty")]
    EmptySubset,
    #[error("subset contains labels outside the ground set")]
    NotASubset,
}

/// A finite, strictly increasing sequence of positive integer labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct GroundSet {
    labels: Vec<u32>,
}

impl GroundSet {
    pub fn new(labels: Vec<u32>) -> Result<Self, PermError> {
        if labels.is_empty() {
            return Err(PermError::EmptyGround);
        }
        let mut prev = 0u32; // labels are positive, so 0 works as sentinel
        for &l in &labels {
            if l <= prev {
                return Err(PermError::BadGround(l));
            }
            prev = l;
        }
        Ok(GroundSet { labels })
    }

    /// The ground set `{1, ..., n}`.
    pub fn contiguous(n: u32) -> Self {
        assert!(n >= 1, "a ground set needs at least one element");
        GroundSet {
            labels: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn contains(&self, label: u32) -> bool {
        self.position(label).is_some()
    }

    /// Index of `label` in the increasing order, if present.
    pub fn position(&self, label: u32) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn label_at(&self, idx: usize) -> u32 {
        self.labels[idx]
    }

    pub fn is_subset_of(&self, other: &GroundSet) -> bool {
        self.labels.iter().all(|&l| other.contains(l))
    }
}

impl TryFrom<Vec<u32>> for GroundSet {
    type Error = PermError;
    fn try_from(labels: Vec<u32>) -> Result<Self, PermError> {
        GroundSet::new(labels)
    }
}

impl From<GroundSet> for Vec<u32> {
    fn from(g: GroundSet) -> Vec<u32> {
        g.labels
    }
}

#[derive(Serialize, Deserialize, Clone)]
struct PermWire {
    ground: Vec<u32>,
    images: Vec<u32>,
}

/// A bijection of a [`GroundSet`] onto itself.
///
/// `images[i]` is the image of the `i`-th ground label. Two permutations are
/// equal exactly when they have the same ground set and the same images, so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermWire", into = "PermWire")]
pub struct Permutation {
    ground: GroundSet,
    images: Vec<u32>,
}

impl TryFrom<PermWire> for Permutation {
    type Error = PermError;
    fn try_from(w: PermWire) -> Result<Self, PermError> {
        Permutation::from_images(GroundSet::new(w.ground)?, w.images)
    }
}

impl From<Permutation> for PermWire {
    fn from(p: Permutation) -> PermWire {
        PermWire {
            ground: p.ground.labels,
            images: p.images,
        }
    }
}

impl Permutation {
    pub fn identity(ground: GroundSet) -> Self {
        let images = ground.labels.clone();
        Permutation { ground, images }
    }

    pub fn from_images(ground: GroundSet, images: Vec<u32>) -> Result<Self, PermError> {
        if images.len() != ground.len() {
            return Err(PermError::NotBijective);
        }
        let mut seen = vec![false; ground.len()];
        for &img in &images {
            match ground.position(img) {
                Some(i) if !seen[i] => seen[i] = true,
                _ => return Err(PermError::NotBijective),
            }
        }
        Ok(Permutation { ground, images })
    }

    /// Internal constructor for images already known to be a bijection.
    fn new_unchecked(ground: GroundSet, images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(ground.clone(), images.clone()).is_ok());
        Permutation { ground, images }
    }

    /// Parse cycle notation such as `"(1,4,6)(3,9)"` over the given ground
    /// set. Whitespace is ignored, omitted labels become fixed points, and
    /// one-element cycles are accepted. The empty string is the identity.
    pub fn from_cycles(text: &str, ground: &GroundSet) -> Result<Self, PermError> {
        let bytes = text.as_bytes();
        let mut images = ground.labels.clone();
        let mut seen = vec![false; ground.len()];
        let mut i = 0usize;

        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };

        loop {
            skip_ws(&mut i);
            if i >= bytes.len() {
                break;
            }
            if bytes[i] != b'(' {
                return Err(PermError::Malformed {
                    at: i,
                    what: "expected '('",
                });
            }
            i += 1;
            let mut cycle: Vec<u32> = Vec::new();
            loop {
                skip_ws(&mut i);
                let start = i;
                let mut value: u64 = 0;
                let mut digits = 0usize;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    value = value * 10 + u64::from(bytes[i] - b'0');
                    if value > u64::from(u32::MAX) {
                        return Err(PermError::Malformed {
                            at: start,
                            what: "label out of range",
                        });
                    }
                    digits += 1;
                    i += 1;
                }
                if digits == 0 {
                    return Err(PermError::Malformed {
                        at: i,
                        what: "expected a label",
                    });
                }
                let label = value as u32;
                let pos = ground
                    .position(label)
                    .ok_or(PermError::UnknownLabel { label, at: start })?;
                if seen[pos] {
                    return Err(PermError::DuplicateLabel { label, at: start });
                }
                seen[pos] = true;
                cycle.push(label);
                skip_ws(&mut i);
                match bytes.get(i) {
                    Some(b',') => {
                        i += 1;
                    }
                    Some(b')') => {
                        i += 1;
                        break;
                    }
                    _ => {
                        return Err(PermError::Malformed {
                            at: i,
                            what: "expected ',' or ')'",
                        })
                    }
                }
            }
            for k in 0..cycle.len() {
                let from = cycle[k];
                let to = cycle[(k + 1) % cycle.len()];
                let pos = ground.position(from).expect("cycle label checked above");
                images[pos] = to;
            }
        }
        Ok(Permutation::new_unchecked(ground.clone(), images))
    }

    pub fn transposition(ground: GroundSet, a: u32, b: u32) -> Result<Self, PermError> {
        if a == b {
            return Err(PermError::Malformed {
                at: 0,
                what: "transposition needs two distinct labels",
            });
        }
        let pa = ground.position(a).ok_or(PermError::UnknownLabel { label: a, at: 0 })?;
        let pb = ground.position(b).ok_or(PermError::UnknownLabel { label: b, at: 0 })?;
        let mut images = ground.labels.clone();
        images[pa] = b;
        images[pb] = a;
        Ok(Permutation { ground, images })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Image of a label. Panics if the label is not in the ground set.
    pub fn apply(&self, label: u32) -> u32 {
        let i = self
            .ground
            .position(label)
            .expect("label not in the ground set");
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images == self.ground.labels
    }

    /// Composition with the right factor applied first:
    /// `a.compose(&b)` maps `x` to `a(b(x))`.
    pub fn compose(&self, rhs: &Permutation) -> Result<Permutation, PermError> {
        if self.ground != rhs.ground {
            return Err(PermError::GroundMismatch);
        }
        let images = rhs.images.iter().map(|&x| self.apply(x)).collect();
        Ok(Permutation::new_unchecked(self.ground.clone(), images))
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            let j = self.ground.position(img).expect("image is in the ground");
            images[j] = self.ground.label_at(i);
        }
        Permutation::new_unchecked(self.ground.clone(), images)
    }

    /// `k`-th power; negative exponents use the inverse.
    pub fn power(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Permutation::identity(self.ground.clone());
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base).expect("same ground");
        }
        out
    }

    /// Conjugation `rho ∘ self ∘ rho⁻¹`.
    pub fn conjugate_by(&self, rho: &Permutation) -> Result<Permutation, PermError> {
        rho.compose(self)?.compose(&rho.inverse())
    }

    /// The orbit of `label`, listed in traversal order starting at `label`.
    pub fn orbit_of(&self, label: u32) -> Vec<u32> {
        let mut orbit = vec![label];
        let mut cur = self.apply(label);
        while cur != label {
            orbit.push(cur);
            cur = self.apply(cur);
        }
        orbit
    }

    /// All cycles in canonical form: each cycle starts at its minimum and
    /// cycles are sorted by their minima. Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut visited = vec![false; self.ground.len()];
        let mut cycles = Vec::new();
        for i in 0..self.ground.len() {
            if visited[i] {
                continue;
            }
            let start = self.ground.label_at(i);
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                let pos = self.ground.position(cur).expect("in ground");
                visited[pos] = true;
                cycle.push(cur);
                cur = self.images[pos];
                if cur == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Number of orbits.
    pub fn orbit_count(&self) -> usize {
        let mut visited = vec![false; self.ground.len()];
        let mut count = 0usize;
        for i in 0..self.ground.len() {
            if visited[i] {
                continue;
            }
            count += 1;
            let mut cur = i;
            while !visited[cur] {
                visited[cur] = true;
                cur = self
                    .ground
                    .position(self.images[cur])
                    .expect("image in ground");
            }
        }
        count
    }

    /// The partition of the ground set into orbits.
    pub fn orbit_partition(&self) -> SetPartition {
        SetPartition::new(self.ground.clone(), self.cycles())
            .expect("orbits always partition the ground set")
    }

    /// The permutation induced on a non-empty subset by first return: the
    /// image of `b` is the first of `self(b)`, `self²(b)`, … lying in the
    /// subset.
    pub fn induced(&self, subset: &GroundSet) -> Result<Permutation, PermError> {
        if subset.is_empty() {
            return Err(PermError::EmptySubset);
        }
        if !subset.is_subset_of(&self.ground) {
            return Err(PermError::NotASubset);
        }
        let images = subset
            .labels()
            .iter()
            .map(|&b| {
                let mut cur = self.apply(b);
                while !subset.contains(cur) {
                    cur = self.apply(cur);
                }
                cur
            })
            .collect();
        Ok(Permutation::new_unchecked(subset.clone(), images))
    }

    /// Distance in the Cayley graph of the symmetric group generated by all
    /// transpositions: `n` minus the number of orbits of `self⁻¹ ∘ other`.
    pub fn cayley_distance(&self, other: &Permutation) -> Result<usize, PermError> {
        let prod = self.inverse().compose(other)?;
        Ok(self.len() - prod.orbit_count())
    }

    /// Number of orbits of the joint action of the two permutations,
    /// computed as connected components over both orbit structures.
    pub fn joint_orbit_count(&self, other: &Permutation) -> Result<usize, PermError> {
        if self.ground != other.ground {
            return Err(PermError::GroundMismatch);
        }
        let n = self.len();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            let a = self.ground.position(self.images[i]).expect("in ground");
            let b = self.ground.position(other.images[i]).expect("in ground");
            uf.union(i, a);
            uf.union(i, b);
        }
        Ok(uf.component_count())
    }

    /// Canonical cycle notation; fixed points are omitted and the identity
    /// formats as the empty string.
    pub fn format_cycles(&self) -> String {
        let mut out = String::new();
        for cycle in self.cycles() {
            if cycle.len() < 2 {
                continue;
            }
            out.push('(');
            for (i, label) in cycle.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&label.to_string());
            }
            out.push(')');
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_cycles())
    }
}

/// Plain union-find over `0..n`, used for joint orbits.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    pub(crate) fn component_count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

/// Iterator over all permutations of a ground set, in lexicographic order of
/// their image sequences.
pub struct SymmetricGroup {
    ground: GroundSet,
    next: Option<Vec<u32>>,
}

/// All permutations of the given ground set, smallest image vector first.
pub fn symmetric_group(ground: &GroundSet) -> SymmetricGroup {
    SymmetricGroup {
        ground: ground.clone(),
        next: Some(ground.labels().to_vec()),
    }
}

impl Iterator for SymmetricGroup {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut advanced = current.clone();
        self.next = next_permutation(&mut advanced).then_some(advanced);
        Some(Permutation::new_unchecked(self.ground.clone(), current))
    }
}

/// In-place lexicographic successor; returns false after the last one.
fn next_permutation(seq: &mut [u32]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}
