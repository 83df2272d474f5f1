//! Disc non-crossing permutations: standardness, the two disc patterns
//! (reversed triple, crossing quadruple), the geodesic characterization, and
//! the bijection with non-crossing partitions.
//!
//! Everything here works over an arbitrary [`GroundSet`]; the circular order
//! is the order of the ground labels, so the order isomorphism onto any
//! other totally ordered set preserves all predicates.

use thiserror::Error;

use crate::partitions::{PartitionError, SetPartition};
use crate::permcore::{GroundSet, PermError, Permutation};

/// Default cap on non-crossing enumeration (Catalan growth).
pub const DEFAULT_NC_GUARD: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscError {
    #[error("partition has a crossing at {witness:?}")]
    NotNoncrossing { witness: [u32; 4] },
    #[error("reference permutation is not standard in the disc sense")]
    NotStandard,
    #[error("n = {n} exceeds the enumeration guard {guard}")]
    GuardExceeded { n: u32, guard: u32 },
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Going around the cycle `Z_len` from `a`: does `b` come strictly before
/// `c`? All three must be distinct residues.
pub(crate) fn cyclically_before(a: usize, b: usize, c: usize, len: usize) -> bool {
    ((b + len - a) % len) < ((c + len - a) % len)
}

/// Cycle positions of a permutation's elements, for O(1) induced-order tests
/// on subsets of a single orbit.
pub(crate) struct OrbitCtx {
    /// Orbit id per ground position.
    pub orbit_id: Vec<usize>,
    /// Index of each element inside its cycle traversal.
    pub cycle_pos: Vec<usize>,
    /// Length per orbit id.
    pub orbit_len: Vec<usize>,
}

impl OrbitCtx {
    pub(crate) fn new(tau: &Permutation) -> Self {
        let n = tau.len();
        let mut orbit_id = vec![usize::MAX; n];
        let mut cycle_pos = vec![0usize; n];
        let mut orbit_len = Vec::new();
        for (id, cycle) in tau.cycles().into_iter().enumerate() {
            orbit_len.push(cycle.len());
            for (k, label) in cycle.into_iter().enumerate() {
                let p = tau.ground().position(label).expect("in ground");
                orbit_id[p] = id;
                cycle_pos[p] = k;
            }
        }
        OrbitCtx {
            orbit_id,
            cycle_pos,
            orbit_len,
        }
    }

    pub(crate) fn same_orbit(&self, a: usize, b: usize) -> bool {
        self.orbit_id[a] == self.orbit_id[b]
    }

    /// For `a, b, c` in one orbit: walking the cycle from `a`, is `b` met
    /// strictly before `c`?
    pub(crate) fn before_in_cycle(&self, a: usize, b: usize, c: usize) -> bool {
        let len = self.orbit_len[self.orbit_id[a]];
        cyclically_before(self.cycle_pos[a], self.cycle_pos[b], self.cycle_pos[c], len)
    }
}

/// The forward cycle `(1, ..., n)`.
pub fn gamma_disc(n: u32) -> Permutation {
    gamma_disc_on(&GroundSet::contiguous(n))
}

/// The forward cycle of an arbitrary ground set, in label order.
pub fn gamma_disc_on(ground: &GroundSet) -> Permutation {
    let n = ground.len();
    let images = (0..n).map(|i| ground.label_at((i + 1) % n)).collect();
    Permutation::from_images(ground.clone(), images).expect("rotation is a bijection")
}

/// Least triple `(a, b, c)` in circular order whose induced pattern under
/// `tau` is the reversed 3-cycle, if any. Such a triple exists exactly when
/// `tau` is not standard in the disc sense.
pub fn dns_witness(tau: &Permutation) -> Option<[u32; 3]> {
    let ctx = OrbitCtx::new(tau);
    let n = tau.len();
    let labels = tau.ground().labels();
    for a in 0..n {
        for b in 0..n {
            if b == a || !ctx.same_orbit(a, b) {
                continue;
            }
            for c in 0..n {
                if c == a || c == b || !ctx.same_orbit(a, c) {
                    continue;
                }
                // circular order (a, b, c) on the ground, reversed under tau
                if cyclically_before(a, b, c, n) && ctx.before_in_cycle(a, c, b) {
                    return Some([labels[a], labels[b], labels[c]]);
                }
            }
        }
    }
    None
}

/// Every cycle of `tau` runs through its orbit in increasing ground order.
pub fn is_disc_standard(tau: &Permutation) -> bool {
    let standard = tau
        .cycles()
        .iter()
        .all(|cycle| cycle.windows(2).all(|w| w[0] < w[1]));
    debug_assert_eq!(standard, dns_witness(tau).is_none());
    standard
}

/// Least quadruple `(a, b, c, d)` in circular order with `a, c` in one orbit
/// and `b, d` in another, if any. Exists exactly when the orbit partition
/// has a crossing.
pub fn find_dc(tau: &Permutation) -> Option<[u32; 4]> {
    let ctx = OrbitCtx::new(tau);
    let n = tau.len();
    let labels = tau.ground().labels();
    for a in 0..n {
        for b in 0..n {
            if b == a || ctx.same_orbit(a, b) {
                continue;
            }
            for c in 0..n {
                if c == a || c == b || !ctx.same_orbit(a, c) {
                    continue;
                }
                if !cyclically_before(a, b, c, n) {
                    continue;
                }
                for d in 0..n {
                    if d == a || d == b || d == c || !ctx.same_orbit(b, d) {
                        continue;
                    }
                    if cyclically_before(a, c, d, n) {
                        return Some([labels[a], labels[b], labels[c], labels[d]]);
                    }
                }
            }
        }
    }
    None
}

/// Standard and crossing-free: the definitional membership test.
pub fn is_disc_nc(tau: &Permutation) -> bool {
    is_disc_standard(tau) && find_dc(tau).is_none()
}

/// The geodesic characterization of membership: the orbit counts of `tau`
/// and of `tau⁻¹` times the forward cycle sum to `n + 1`.
pub fn is_disc_nc_geodesic(tau: &Permutation) -> bool {
    let gamma_o = gamma_disc_on(tau.ground());
    let k = tau
        .inverse()
        .compose(&gamma_o)
        .expect("same ground")
        .orbit_count();
    tau.orbit_count() + k == tau.len() + 1
}

/// Membership relative to a disc-standard reference `omega`: `tau` lies on
/// a Cayley-graph geodesic from the identity to `omega`.
pub fn is_disc_nc_relative(tau: &Permutation, omega: &Permutation) -> Result<bool, DiscError> {
    if !is_disc_standard(omega) {
        return Err(DiscError::NotStandard);
    }
    let id = Permutation::identity(tau.ground().clone());
    let lhs = id.cayley_distance(tau)? + tau.cayley_distance(omega)?;
    Ok(lhs == id.cayley_distance(omega)?)
}

/// The unique disc-standard permutation whose orbits are the blocks of a
/// non-crossing partition: each block, sorted increasingly, becomes a cycle.
pub fn perm_of_nc_partition(pi: &SetPartition) -> Result<Permutation, DiscError> {
    if let Some(witness) = pi.crossing_witness() {
        return Err(DiscError::NotNoncrossing { witness });
    }
    Ok(standard_perm_of_blocks(pi.ground(), pi.blocks()))
}

/// Build the disc-standard permutation with the given (sorted) blocks as
/// orbits, without any non-crossing check.
pub(crate) fn standard_perm_of_blocks(ground: &GroundSet, blocks: &[Vec<u32>]) -> Permutation {
    let mut images = ground.labels().to_vec();
    for block in blocks {
        for k in 0..block.len() {
            let from = block[k];
            let to = block[(k + 1) % block.len()];
            let pos = ground.position(from).expect("in ground");
            images[pos] = to;
        }
    }
    Permutation::from_images(ground.clone(), images).expect("disjoint cycles form a bijection")
}

/// All non-crossing partitions of an ordered label list, as block lists.
/// Runs in time proportional to the (Catalan-sized) output.
pub fn nc_partition_blocks(labels: &[u32]) -> Vec<Vec<Vec<u32>>> {
    if labels.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut block = vec![labels[0]];
    extend_first_block(&mut block, &labels[1..], &mut out);
    out
}

/// Grow the block containing the least label. Members must be chosen left to
/// right; the labels skipped between two consecutive members form a region
/// that must be partitioned among themselves, as must the labels after the
/// last member.
fn extend_first_block(block: &mut Vec<u32>, rest: &[u32], out: &mut Vec<Vec<Vec<u32>>>) {
    for mut tail in nc_partition_blocks(rest) {
        let mut blocks = Vec::with_capacity(tail.len() + 1);
        blocks.push(block.clone());
        blocks.append(&mut tail);
        out.push(blocks);
    }
    for i in 0..rest.len() {
        let gap_ways = nc_partition_blocks(&rest[..i]);
        block.push(rest[i]);
        let mut continuations = Vec::new();
        extend_first_block(block, &rest[i + 1..], &mut continuations);
        block.pop();
        for gap in &gap_ways {
            for cont in &continuations {
                let mut blocks = cont.clone();
                blocks.extend(gap.iter().cloned());
                out.push(blocks);
            }
        }
    }
}

/// All non-crossing partitions of a ground set.
pub fn nc_partitions_of(ground: &GroundSet) -> Vec<SetPartition> {
    nc_partition_blocks(ground.labels())
        .into_iter()
        .map(|blocks| SetPartition::new(ground.clone(), blocks).expect("generator emits partitions"))
        .collect()
}

/// All disc non-crossing permutations of `{1, ..., n}`, generated through
/// non-crossing partitions rather than by filtering the symmetric group.
pub fn enumerate_disc_nc(n: u32) -> Result<Vec<Permutation>, DiscError> {
    enumerate_disc_nc_with_guard(n, DEFAULT_NC_GUARD)
}

pub fn enumerate_disc_nc_with_guard(n: u32, guard: u32) -> Result<Vec<Permutation>, DiscError> {
    if n == 0 || n > guard {
        return Err(DiscError::GuardExceeded { n, guard });
    }
    Ok(enumerate_disc_nc_on(&GroundSet::contiguous(n)))
}

/// Same, over an arbitrary ground set (no guard: the caller controls size).
pub fn enumerate_disc_nc_on(ground: &GroundSet) -> Vec<Permutation> {
    nc_partition_blocks(ground.labels())
        .into_iter()
        .map(|blocks| standard_perm_of_blocks(ground, &blocks))
        .collect()
}
