//! Non-crossing permutations on two concentric circles, and the parts of the
//! story that survive on more circles.
//!
//! A shape `(p, q)` puts labels `1..=p` clockwise on the external circle and
//! `p+1..=p+q` counter-clockwise on the internal one. Membership in the
//! annular non-crossing set has two equivalent formulations, both
//! implemented: the definitional one via standardness plus three forbidden
//! induced patterns (`AC1`/`AC2`/`AC3`), and the fast geodesic one via orbit
//! counts. For three or more circles no membership predicate is offered —
//! only the even genus defect, connectivity, and the circle partition. A
//! zero defect is conjectured to characterize planarity there as well, but
//! that is an untested hypothesis and this crate does not assume it.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::disc_nc::{
    cyclically_before, enumerate_disc_nc_on, enumerate_disc_nc_with_guard, gamma_disc_on,
    standard_perm_of_blocks, DiscError, OrbitCtx,
};
use crate::partitions::{PartitionError, SetPartition};
use crate::permcore::{GroundSet, PermError, Permutation, UnionFind};

/// Default cap on annular enumeration.
pub const DEFAULT_ENUM_GUARD: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnularError {
    #[error("a shape needs at least one circle, every circle at least one point")]
    BadShape,
    #[error("operation is defined for exactly two circles, shape has {found}")]
    NotTwoCircles { found: usize },
    #[error("permutation must live on the contiguous ground set 1..={expected}")]
    WrongGround { expected: u32 },
    #[error("anchors must sit on the external and internal circle respectively (got {x}, {y})")]
    AnchorsNotOnBothCircles { x: u32, y: u32 },
    #[error("permutation is not annular non-crossing")]
    NotMember,
    #[error("permutation is not connected across the circles")]
    NotConnected,
    #[error("n = {n} exceeds the enumeration guard {guard}")]
    GuardExceeded { n: u32, guard: u32 },
    #[error("shape string must be comma-separated positive integers")]
    UnparsableShape,
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

#[derive(Serialize, Deserialize, Clone)]
struct ShapeWire {
    circles: Vec<u32>,
}

/// Circle sizes `(p_1, ..., p_l)`; the two-circle case is `l = 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeWire", into = "ShapeWire")]
pub struct AnnulusShape {
    circles: Vec<u32>,
}

impl TryFrom<ShapeWire> for AnnulusShape {
    type Error = AnnularError;
    fn try_from(w: ShapeWire) -> Result<Self, AnnularError> {
        AnnulusShape::new(w.circles)
    }
}

impl From<AnnulusShape> for ShapeWire {
    fn from(s: AnnulusShape) -> ShapeWire {
        ShapeWire { circles: s.circles }
    }
}

impl AnnulusShape {
    pub fn new(circles: Vec<u32>) -> Result<Self, AnnularError> {
        if circles.is_empty() || circles.contains(&0) {
            return Err(AnnularError::BadShape);
        }
        Ok(AnnulusShape { circles })
    }

    pub fn two(p: u32, q: u32) -> Self {
        AnnulusShape::new(vec![p, q]).expect("positive circle sizes")
    }

    pub fn circles(&self) -> &[u32] {
        &self.circles
    }

    pub fn num_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn total(&self) -> u32 {
        self.circles.iter().sum()
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::contiguous(self.total())
    }

    /// Zero-based index of the circle carrying `label`.
    pub fn circle_of(&self, label: u32) -> usize {
        let mut acc = 0u32;
        for (i, &c) in self.circles.iter().enumerate() {
            acc += c;
            if label <= acc {
                return i;
            }
        }
        panic!("label {label} outside the shape");
    }

    /// Inclusive label range of circle `i`.
    pub fn circle_range(&self, i: usize) -> (u32, u32) {
        let first: u32 = self.circles[..i].iter().sum::<u32>() + 1;
        (first, first + self.circles[i] - 1)
    }

    pub fn as_two(&self) -> Result<(u32, u32), AnnularError> {
        match self.circles[..] {
            [p, q] => Ok((p, q)),
            _ => Err(AnnularError::NotTwoCircles {
                found: self.circles.len(),
            }),
        }
    }
}

impl FromStr for AnnulusShape {
    type Err = AnnularError;
    fn from_str(s: &str) -> Result<Self, AnnularError> {
        let circles = s
            .split(',')
            .map(|part| part.trim().parse::<u32>())
            .collect::<Result<Vec<u32>, _>>()
            .map_err(|_| AnnularError::UnparsableShape)?;
        AnnulusShape::new(circles)
    }
}

impl fmt::Display for AnnulusShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.circles.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// The forbidden induced patterns, in search order. `DNS`/`DC` are the disc
/// patterns; `ANS1`/`ANS2` detect annular non-standardness; `AC1`–`AC3` are
/// the annular crossing patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WitnessKind {
    #[serde(rename = "DNS")]
    Dns,
    #[serde(rename = "DC")]
    Dc,
    #[serde(rename = "ANS1")]
    Ans1,
    #[serde(rename = "ANS2")]
    Ans2,
    #[serde(rename = "AC1")]
    Ac1,
    #[serde(rename = "AC2")]
    Ac2,
    #[serde(rename = "AC3")]
    Ac3,
}

/// A concrete tuple of labels exhibiting one of the forbidden patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingWitness {
    pub kind: WitnessKind,
    pub elements: Vec<u32>,
}

impl CrossingWitness {
    fn new(kind: WitnessKind, elements: Vec<u32>) -> Self {
        CrossingWitness { kind, elements }
    }

    /// Re-check the defining induced-permutation equations of this witness,
    /// using only generic induced permutations (independent of the search
    /// code that produced it).
    pub fn holds(&self, tau: &Permutation, shape: &AnnulusShape) -> Result<bool, AnnularError> {
        let n = shape.total();
        if tau.ground() != &shape.ground() {
            return Err(AnnularError::WrongGround { expected: n });
        }
        let mut sorted = self.elements.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.elements.len() || sorted.iter().any(|&l| l < 1 || l > n) {
            return Ok(false);
        }
        let sub = GroundSet::new(sorted)?;
        let induced_tau = tau.induced(&sub)?;
        let pattern = |cycles: &[&[u32]]| -> Permutation {
            let mut images = sub.labels().to_vec();
            for cycle in cycles {
                for k in 0..cycle.len() {
                    let pos = sub.position(cycle[k]).expect("witness label");
                    images[pos] = cycle[(k + 1) % cycle.len()];
                }
            }
            Permutation::from_images(sub.clone(), images).expect("disjoint cycles")
        };
        let gamma = gammas(shape).1;
        let e = &self.elements;
        Ok(match self.kind {
            WitnessKind::Dns => {
                let [a, b, c] = [e[0], e[1], e[2]];
                let gamma_o = gamma_disc_on(tau.ground());
                gamma_o.induced(&sub)? == pattern(&[&[a, b, c]])
                    && induced_tau == pattern(&[&[a, c, b]])
            }
            WitnessKind::Dc => {
                let [a, b, c, d] = [e[0], e[1], e[2], e[3]];
                let gamma_o = gamma_disc_on(tau.ground());
                gamma_o.induced(&sub)? == pattern(&[&[a, b, c, d]])
                    && induced_tau == pattern(&[&[a, c], &[b, d]])
            }
            WitnessKind::Ans1 => {
                let [a, b, c] = [e[0], e[1], e[2]];
                gamma.induced(&sub)? == pattern(&[&[a, b, c]])
                    && induced_tau == pattern(&[&[a, c, b]])
            }
            WitnessKind::Ans2 => {
                let [a, b, c, d] = [e[0], e[1], e[2], e[3]];
                gamma.induced(&sub)? == pattern(&[&[a, b], &[c, d]])
                    && induced_tau == pattern(&[&[a, c, b, d]])
            }
            WitnessKind::Ac1 => {
                let [a, b, c, d] = [e[0], e[1], e[2], e[3]];
                gamma.induced(&sub)? == pattern(&[&[a, b, c, d]])
                    && induced_tau == pattern(&[&[a, c], &[b, d]])
            }
            WitnessKind::Ac2 => {
                let [a, b, c, x, y] = [e[0], e[1], e[2], e[3], e[4]];
                if shape.circle_of(x) == shape.circle_of(y) {
                    return Ok(false);
                }
                let lam = lambda_normalized(shape, x, y)?;
                let tri = GroundSet::new({
                    let mut v = vec![a, b, c];
                    v.sort_unstable();
                    v
                })?;
                lam.induced(&tri)? == {
                    let mut images = tri.labels().to_vec();
                    for (k, &from) in [a, b, c].iter().enumerate() {
                        let to = [a, b, c][(k + 1) % 3];
                        images[tri.position(from).unwrap()] = to;
                    }
                    Permutation::from_images(tri.clone(), images).unwrap()
                } && induced_tau == pattern(&[&[a, c, b], &[x, y]])
            }
            WitnessKind::Ac3 => {
                let [a, b, c, d, x, y] = [e[0], e[1], e[2], e[3], e[4], e[5]];
                if shape.circle_of(x) == shape.circle_of(y) {
                    return Ok(false);
                }
                let lam = lambda_normalized(shape, x, y)?;
                let quad = GroundSet::new({
                    let mut v = vec![a, b, c, d];
                    v.sort_unstable();
                    v
                })?;
                let cyc = [a, b, c, d];
                lam.induced(&quad)? == {
                    let mut images = quad.labels().to_vec();
                    for (k, &from) in cyc.iter().enumerate() {
                        images[quad.position(from).unwrap()] = cyc[(k + 1) % 4];
                    }
                    Permutation::from_images(quad.clone(), images).unwrap()
                } && induced_tau == pattern(&[&[a, c], &[b, d], &[x, y]])
            }
        })
    }
}

/// Which membership test drives a decision: the definitional pattern search
/// or the orbit-count geodesic shortcut. They agree everywhere; the pattern
/// path is the oracle, the geodesic path is the fast path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MembershipMethod {
    Patterns,
    #[default]
    Geodesic,
}

/// Connectivity filter for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectivityFilter {
    All,
    ConnectedOnly,
    DisconnectedOnly,
}

fn check_two_circle(tau: &Permutation, shape: &AnnulusShape) -> Result<(usize, usize), AnnularError> {
    let (p, q) = shape.as_two()?;
    let n = p + q;
    if tau.ground() != &GroundSet::contiguous(n) {
        return Err(AnnularError::WrongGround { expected: n });
    }
    Ok((p as usize, q as usize))
}

fn check_ground(tau: &Permutation, shape: &AnnulusShape) -> Result<(), AnnularError> {
    let n = shape.total();
    if tau.ground() != &GroundSet::contiguous(n) {
        return Err(AnnularError::WrongGround { expected: n });
    }
    Ok(())
}

/// The per-circle forward cycles and their commuting product.
pub fn gammas(shape: &AnnulusShape) -> (Vec<Permutation>, Permutation) {
    let ground = shape.ground();
    let mut product_images = ground.labels().to_vec();
    let mut per_circle = Vec::with_capacity(shape.num_circles());
    for i in 0..shape.num_circles() {
        let (first, last) = shape.circle_range(i);
        let mut images = ground.labels().to_vec();
        for label in first..=last {
            let image = if label == last { first } else { label + 1 };
            images[(label - 1) as usize] = image;
            product_images[(label - 1) as usize] = image;
        }
        per_circle.push(Permutation::from_images(ground.clone(), images).expect("rotation"));
    }
    let product = Permutation::from_images(ground, product_images).expect("disjoint rotations");
    (per_circle, product)
}

/// Ground positions along the cut cycle anchored at external `x` and
/// internal `y`: first the external circle from `x` exclusive, then the
/// internal circle from `y` exclusive. Returns `(position per ground
/// position, cycle length)`; the anchors get `usize::MAX`.
fn lambda_position_table(p: usize, q: usize, x: u32, y: u32) -> (Vec<usize>, usize) {
    let n = p + q;
    let mut pos = vec![usize::MAX; n];
    let mut idx = 0usize;
    let mut cur = (x as usize) - 1;
    for _ in 1..p {
        cur = (cur + 1) % p;
        pos[cur] = idx;
        idx += 1;
    }
    let mut cur = (y as usize) - 1 - p;
    for _ in 1..q {
        cur = (cur + 1) % q;
        pos[p + cur] = idx;
        idx += 1;
    }
    (pos, idx)
}

/// The cut permutation for anchors on the external and internal circle: both
/// anchors are fixed and the remaining `p+q−2` labels form a single cycle
/// that runs the external circle forward from `x` and then the internal
/// circle forward from `y`.
pub fn lambda(shape: &AnnulusShape, x: u32, y: u32) -> Result<Permutation, AnnularError> {
    let (p, q) = shape.as_two()?;
    if !(1..=p).contains(&x) || !((p + 1)..=(p + q)).contains(&y) {
        return Err(AnnularError::AnchorsNotOnBothCircles { x, y });
    }
    let ground = shape.ground();
    let (pos, len) = lambda_position_table(p as usize, q as usize, x, y);
    let mut order = vec![0u32; len];
    for (ground_pos, &k) in pos.iter().enumerate() {
        if k != usize::MAX {
            order[k] = (ground_pos + 1) as u32;
        }
    }
    let mut images = ground.labels().to_vec();
    if len > 1 {
        for k in 0..len {
            images[(order[k] - 1) as usize] = order[(k + 1) % len];
        }
    }
    Ok(Permutation::from_images(ground, images).expect("cycle plus fixed points"))
}

/// `lambda` with the anchors given in either order.
fn lambda_normalized(shape: &AnnulusShape, x: u32, y: u32) -> Result<Permutation, AnnularError> {
    if shape.circle_of(x) == 0 {
        lambda(shape, x, y)
    } else {
        lambda(shape, y, x)
    }
}

/// At most one descent in the cyclic reading means the sequence is a
/// rotation of its sorted order.
fn circularly_increasing(seq: &[usize]) -> bool {
    if seq.len() <= 1 {
        return true;
    }
    let mut descents = 0;
    for i in 0..seq.len() {
        if seq[i] > seq[(i + 1) % seq.len()] {
            descents += 1;
        }
    }
    descents <= 1
}

/// Standardness on two circles: every cycle respects both circular orders
/// and crosses between the circles at most once in each direction.
pub fn is_ann_standard(tau: &Permutation, shape: &AnnulusShape) -> Result<bool, AnnularError> {
    let (p, _q) = check_two_circle(tau, shape)?;
    let standard = tau.cycles().iter().all(|cycle| {
        let mut ext_seq = Vec::new();
        let mut int_seq = Vec::new();
        let mut crossings_out = 0usize;
        let mut crossings_in = 0usize;
        for (i, &label) in cycle.iter().enumerate() {
            let here_ext = (label as usize) <= p;
            if here_ext {
                ext_seq.push((label as usize) - 1);
            } else {
                int_seq.push((label as usize) - 1 - p);
            }
            let next = cycle[(i + 1) % cycle.len()];
            let next_ext = (next as usize) <= p;
            match (here_ext, next_ext) {
                (true, false) => crossings_out += 1,
                (false, true) => crossings_in += 1,
                _ => {}
            }
        }
        let order_ok = circularly_increasing(&ext_seq) && circularly_increasing(&int_seq);
        let crossing_ok = if ext_seq.is_empty() || int_seq.is_empty() {
            crossings_out == 0 && crossings_in == 0
        } else {
            crossings_out == 1 && crossings_in == 1
        };
        order_ok && crossing_ok
    });
    debug_assert_eq!(
        standard,
        ans_witness(tau, shape)?.is_none(),
        "direct standardness and witness search disagree for {tau}"
    );
    Ok(standard)
}

/// Least non-standardness witness (`ANS1` before `ANS2`, then by tuple).
pub fn ans_witness(
    tau: &Permutation,
    shape: &AnnulusShape,
) -> Result<Option<CrossingWitness>, AnnularError> {
    let (p, q) = check_two_circle(tau, shape)?;
    let n = p + q;
    let orb = OrbitCtx::new(tau);
    let circle = |pos: usize| usize::from(pos >= p);
    let circ_pos = |pos: usize| if pos < p { pos } else { pos - p };
    let circ_len = |pos: usize| if pos < p { p } else { q };

    // ANS1: a triple on one circle, in circular order, reversed by tau.
    for a in 0..n {
        for b in 0..n {
            if b == a || circle(b) != circle(a) {
                continue;
            }
            for c in 0..n {
                if c == a
                    || c == b
                    || circle(c) != circle(a)
                    || !orb.same_orbit(a, b)
                    || !orb.same_orbit(a, c)
                {
                    continue;
                }
                if cyclically_before(circ_pos(a), circ_pos(b), circ_pos(c), circ_len(a))
                    && orb.before_in_cycle(a, c, b)
                {
                    return Ok(Some(CrossingWitness::new(
                        WitnessKind::Ans1,
                        vec![(a + 1) as u32, (b + 1) as u32, (c + 1) as u32],
                    )));
                }
            }
        }
    }

    // ANS2: a, b on one circle, c, d on the other, all in one orbit of tau
    // which visits them in the interleaved order (a, c, b, d).
    for a in 0..n {
        for b in 0..n {
            if b == a || circle(b) != circle(a) || !orb.same_orbit(a, b) {
                continue;
            }
            for c in 0..n {
                if c == a || c == b || circle(c) == circle(a) || !orb.same_orbit(a, c) {
                    continue;
                }
                for d in 0..n {
                    if d == a
                        || d == b
                        || d == c
                        || circle(d) != circle(c)
                        || !orb.same_orbit(a, d)
                    {
                        continue;
                    }
                    if orb.before_in_cycle(a, c, b) && orb.before_in_cycle(a, b, d) {
                        return Ok(Some(CrossingWitness::new(
                            WitnessKind::Ans2,
                            vec![
                                (a + 1) as u32,
                                (b + 1) as u32,
                                (c + 1) as u32,
                                (d + 1) as u32,
                            ],
                        )));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Least crossing witness among the three annular patterns (`AC1`, then
/// `AC2`, then `AC3`; lexicographic tuple within a pattern).
pub fn find_crossing(
    tau: &Permutation,
    shape: &AnnulusShape,
) -> Result<Option<CrossingWitness>, AnnularError> {
    let (p, q) = check_two_circle(tau, shape)?;
    let n = p + q;
    let orb = OrbitCtx::new(tau);
    let circle = |pos: usize| usize::from(pos >= p);
    let circ_pos = |pos: usize| if pos < p { pos } else { pos - p };
    let circ_len = |pos: usize| if pos < p { p } else { q };

    // AC1: four labels on one circle in circular order, paired crosswise
    // into two distinct orbits.
    for a in 0..n {
        for b in 0..n {
            if b == a || circle(b) != circle(a) || orb.same_orbit(a, b) {
                continue;
            }
            for c in 0..n {
                if c == a || c == b || circle(c) != circle(a) || !orb.same_orbit(a, c) {
                    continue;
                }
                if !cyclically_before(circ_pos(a), circ_pos(b), circ_pos(c), circ_len(a)) {
                    continue;
                }
                for d in 0..n {
                    if d == a || d == b || d == c || circle(d) != circle(a) || !orb.same_orbit(b, d)
                    {
                        continue;
                    }
                    if cyclically_before(circ_pos(a), circ_pos(c), circ_pos(d), circ_len(a)) {
                        return Ok(Some(CrossingWitness::new(
                            WitnessKind::Ac1,
                            vec![
                                (a + 1) as u32,
                                (b + 1) as u32,
                                (c + 1) as u32,
                                (d + 1) as u32,
                            ],
                        )));
                    }
                }
            }
        }
    }

    let mut lambda_cache: HashMap<(usize, usize), (Vec<usize>, usize)> = HashMap::new();
    let mut lambda_table = |xp: usize, yp: usize| -> (Vec<usize>, usize) {
        let (e, i) = if xp < p { (xp, yp) } else { (yp, xp) };
        lambda_cache
            .entry((e, i))
            .or_insert_with(|| {
                lambda_position_table(p, q, (e + 1) as u32, (i + 1) as u32)
            })
            .clone()
    };

    // AC2: a cut pair (x, y) in one orbit, and a triple in another orbit
    // reversed relative to the cut order.
    for a in 0..n {
        for b in 0..n {
            if b == a || !orb.same_orbit(a, b) {
                continue;
            }
            for c in 0..n {
                if c == a || c == b || !orb.same_orbit(a, c) || !orb.before_in_cycle(a, c, b) {
                    continue;
                }
                for x in 0..n {
                    if x == a || x == b || x == c || orb.same_orbit(x, a) {
                        continue;
                    }
                    for y in 0..n {
                        if y == a
                            || y == b
                            || y == c
                            || y == x
                            || !orb.same_orbit(x, y)
                            || circle(y) == circle(x)
                        {
                            continue;
                        }
                        let (pos, len) = lambda_table(x, y);
                        if pos[a] == usize::MAX || pos[b] == usize::MAX || pos[c] == usize::MAX {
                            continue;
                        }
                        if cyclically_before(pos[a], pos[b], pos[c], len) {
                            // A standard permutation can only show this
                            // pattern across the two circles.
                            debug_assert!(
                                !(circle(a) == circle(b) && circle(b) == circle(c))
                                    || !is_standard_no_witness_check(tau, p),
                                "cut-pattern triple on one circle for standard {tau}"
                            );
                            return Ok(Some(CrossingWitness::new(
                                WitnessKind::Ac2,
                                vec![
                                    (a + 1) as u32,
                                    (b + 1) as u32,
                                    (c + 1) as u32,
                                    (x + 1) as u32,
                                    (y + 1) as u32,
                                ],
                            )));
                        }
                    }
                }
            }
        }
    }

    // AC3: a cut pair (x, y) in one orbit and two further orbits whose pairs
    // interleave in the cut order.
    for a in 0..n {
        for b in 0..n {
            if b == a || orb.same_orbit(a, b) {
                continue;
            }
            for c in 0..n {
                if c == a || c == b || !orb.same_orbit(a, c) {
                    continue;
                }
                for d in 0..n {
                    if d == a || d == b || d == c || !orb.same_orbit(b, d) {
                        continue;
                    }
                    for x in 0..n {
                        if x == a
                            || x == b
                            || x == c
                            || x == d
                            || orb.same_orbit(x, a)
                            || orb.same_orbit(x, b)
                        {
                            continue;
                        }
                        for y in 0..n {
                            if y == a
                                || y == b
                                || y == c
                                || y == d
                                || y == x
                                || !orb.same_orbit(x, y)
                                || circle(y) == circle(x)
                            {
                                continue;
                            }
                            let (pos, len) = lambda_table(x, y);
                            if [a, b, c, d].iter().any(|&m| pos[m] == usize::MAX) {
                                continue;
                            }
                            if cyclically_before(pos[a], pos[b], pos[c], len)
                                && cyclically_before(pos[a], pos[c], pos[d], len)
                            {
                                return Ok(Some(CrossingWitness::new(
                                    WitnessKind::Ac3,
                                    vec![
                                        (a + 1) as u32,
                                        (b + 1) as u32,
                                        (c + 1) as u32,
                                        (d + 1) as u32,
                                        (x + 1) as u32,
                                        (y + 1) as u32,
                                    ],
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Standardness without the witness cross-check, for use inside debug
/// assertions (avoids mutual recursion between the two debug checks).
fn is_standard_no_witness_check(tau: &Permutation, p: usize) -> bool {
    tau.cycles().iter().all(|cycle| {
        let mut ext_seq = Vec::new();
        let mut int_seq = Vec::new();
        let mut crossings_out = 0usize;
        for (i, &label) in cycle.iter().enumerate() {
            if (label as usize) <= p {
                ext_seq.push((label as usize) - 1);
            } else {
                int_seq.push((label as usize) - 1 - p);
            }
            let next = cycle[(i + 1) % cycle.len()];
            if (label as usize) <= p && (next as usize) > p {
                crossings_out += 1;
            }
        }
        circularly_increasing(&ext_seq)
            && circularly_increasing(&int_seq)
            && if ext_seq.is_empty() || int_seq.is_empty() {
                crossings_out == 0
            } else {
                crossings_out == 1
            }
    })
}

/// First witness against membership: non-standardness first, then the
/// crossing patterns.
pub fn membership_witness(
    tau: &Permutation,
    shape: &AnnulusShape,
) -> Result<Option<CrossingWitness>, AnnularError> {
    if let Some(w) = ans_witness(tau, shape)? {
        return Ok(Some(w));
    }
    find_crossing(tau, shape)
}

/// Definitional membership: standard and free of all three crossing
/// patterns.
pub fn is_ann_nc(tau: &Permutation, shape: &AnnulusShape) -> Result<bool, AnnularError> {
    Ok(is_ann_standard(tau, shape)? && find_crossing(tau, shape)?.is_none())
}

/// Whether some orbit meets both circles (two-circle case), or more
/// generally whether the joint action of the permutation and the circle
/// rotation is transitive.
pub fn is_connected(tau: &Permutation, shape: &AnnulusShape) -> Result<bool, AnnularError> {
    check_ground(tau, shape)?;
    let gamma = gammas(shape).1;
    let transitive = tau.joint_orbit_count(&gamma)? == 1;
    if shape.num_circles() == 2 {
        let (p, _) = shape.as_two()?;
        let by_orbit = tau.cycles().iter().any(|cycle| {
            cycle.iter().any(|&l| l <= p) && cycle.iter().any(|&l| l > p)
        });
        debug_assert_eq!(transitive, by_orbit);
    }
    Ok(transitive)
}

/// Geodesic membership test: the orbit counts of `tau` and `tau⁻¹ γ` sum to
/// `p+q` for connected permutations and to `p+q+2` for disconnected ones.
pub fn is_ann_nc_geodesic(tau: &Permutation, shape: &AnnulusShape) -> Result<bool, AnnularError> {
    let (p, q) = check_two_circle(tau, shape)?;
    let gamma = gammas(shape).1;
    let k = tau.inverse().compose(&gamma)?.orbit_count();
    let target = if is_connected(tau, shape)? {
        p + q
    } else {
        p + q + 2
    };
    Ok(tau.orbit_count() + k == target)
}

/// Membership through the chosen decision path.
pub fn is_member(
    tau: &Permutation,
    shape: &AnnulusShape,
    method: MembershipMethod,
) -> Result<bool, AnnularError> {
    match method {
        MembershipMethod::Patterns => is_ann_nc(tau, shape),
        MembershipMethod::Geodesic => is_ann_nc_geodesic(tau, shape),
    }
}

/// The annular Kreweras complement `tau⁻¹ γ`; a bijection of the membership
/// set onto itself.
pub fn kreweras(tau: &Permutation, shape: &AnnulusShape) -> Result<Permutation, AnnularError> {
    if !is_ann_nc_geodesic(tau, shape)? {
        return Err(AnnularError::NotMember);
    }
    let gamma = gammas(shape).1;
    Ok(tau.inverse().compose(&gamma)?)
}

/// Exact Catalan number.
pub fn catalan(n: u32) -> BigInt {
    if n == 0 {
        return BigInt::from(1);
    }
    let num = binomial(BigInt::from(2 * n), BigInt::from(n));
    let (quot, rem) = num_integer::div_rem(num, BigInt::from(n + 1));
    debug_assert!(rem.is_zero());
    quot
}

/// Closed-form count of connected members: `2pq/(p+q) · C(2p−1, p) · C(2q−1, q)`.
pub fn count_connected_closed_form(p: u32, q: u32) -> BigInt {
    assert!(p >= 1 && q >= 1);
    let num = BigInt::from(2) * p * q
        * binomial(BigInt::from(2 * p - 1), BigInt::from(p))
        * binomial(BigInt::from(2 * q - 1), BigInt::from(q));
    let (quot, rem) = num_integer::div_rem(num, BigInt::from(p + q));
    assert!(rem.is_zero(), "count formula must divide exactly");
    quot
}

/// Closed-form count of disconnected members: a product of Catalan numbers.
pub fn count_disconnected_closed_form(p: u32, q: u32) -> BigInt {
    catalan(p) * catalan(q)
}

/// All members for the shape, each exactly once, sorted. Disconnected
/// members come from pairs of disc non-crossing permutations of the two
/// circles; connected members are generated as the closure of the disc
/// non-crossing set under conjugation by the circle rotations, anchored at
/// permutations sending `p` to `p+1`.
pub fn enumerate_ann_nc(
    shape: &AnnulusShape,
    filter: ConnectivityFilter,
) -> Result<Vec<Permutation>, AnnularError> {
    enumerate_ann_nc_with_guard(shape, filter, DEFAULT_ENUM_GUARD)
}

pub fn enumerate_ann_nc_with_guard(
    shape: &AnnulusShape,
    filter: ConnectivityFilter,
    guard: u32,
) -> Result<Vec<Permutation>, AnnularError> {
    let (p, q) = shape.as_two()?;
    let n = p + q;
    if n > guard {
        return Err(AnnularError::GuardExceeded { n, guard });
    }
    let ground = shape.ground();
    let mut out: Vec<Permutation> = Vec::new();

    if filter != ConnectivityFilter::ConnectedOnly {
        let ext_ground = GroundSet::new((1..=p).collect())?;
        let int_ground = GroundSet::new(((p + 1)..=n).collect())?;
        for ext in enumerate_disc_nc_on(&ext_ground) {
            for int in enumerate_disc_nc_on(&int_ground) {
                let mut images: Vec<u32> = ext.images().to_vec();
                images.extend_from_slice(int.images());
                out.push(Permutation::from_images(ground.clone(), images)?);
            }
        }
    }

    if filter != ConnectivityFilter::DisconnectedOnly {
        let (per_circle, _) = gammas(shape);
        let (gamma_ext, gamma_int) = (&per_circle[0], &per_circle[1]);
        let mut seen: HashSet<Permutation> = HashSet::new();
        for sigma in enumerate_disc_nc_with_guard(n, guard.max(n))? {
            if sigma.apply(p) != p + 1 {
                continue;
            }
            let sigma = Permutation::from_images(ground.clone(), sigma.images().to_vec())?;
            for u in 0..p {
                let outer = gamma_ext.power(i64::from(u));
                for v in 0..q {
                    let rho = outer.compose(&gamma_int.power(i64::from(v)))?;
                    seen.insert(sigma.conjugate_by(&rho)?);
                }
            }
        }
        out.extend(seen);
    }

    out.sort();
    Ok(out)
}

/// All members whose orbit partition equals `pi` (possibly none). The size
/// is 0 or 1 except when `pi` has exactly one block meeting both circles, in
/// which case every way of picking the crossing points of that block gives a
/// member or none do.
pub fn nc_ann_fiber(
    pi: &SetPartition,
    shape: &AnnulusShape,
) -> Result<Vec<Permutation>, AnnularError> {
    let (p, q) = shape.as_two()?;
    let n = p + q;
    if pi.ground() != &shape.ground() {
        return Err(AnnularError::WrongGround { expected: n });
    }
    let ground = shape.ground();
    let connecting: Vec<usize> = (0..pi.num_blocks())
        .filter(|&i| {
            let b = &pi.blocks()[i];
            b.iter().any(|&l| l <= p) && b.iter().any(|&l| l > p)
        })
        .collect();

    let mut candidates: Vec<Permutation> = Vec::new();
    match connecting.len() {
        0 => {
            candidates.push(standard_perm_of_blocks(&ground, pi.blocks()));
        }
        1 => {
            let b0 = &pi.blocks()[connecting[0]];
            let ext_part: Vec<u32> = b0.iter().copied().filter(|&l| l <= p).collect();
            let int_part: Vec<u32> = b0.iter().copied().filter(|&l| l > p).collect();
            for (ei, _) in ext_part.iter().enumerate() {
                for (ij, _) in int_part.iter().enumerate() {
                    // External run ends at the chosen crossing point,
                    // internal run starts at its partner.
                    let mut cycle: Vec<u32> = Vec::with_capacity(b0.len());
                    for k in 0..ext_part.len() {
                        cycle.push(ext_part[(ei + 1 + k) % ext_part.len()]);
                    }
                    for k in 0..int_part.len() {
                        cycle.push(int_part[(ij + k) % int_part.len()]);
                    }
                    let mut images = ground.labels().to_vec();
                    for k in 0..cycle.len() {
                        images[(cycle[k] - 1) as usize] = cycle[(k + 1) % cycle.len()];
                    }
                    for (bi, block) in pi.blocks().iter().enumerate() {
                        if bi == connecting[0] {
                            continue;
                        }
                        for k in 0..block.len() {
                            images[(block[k] - 1) as usize] = block[(k + 1) % block.len()];
                        }
                    }
                    candidates.push(Permutation::from_images(ground.clone(), images)?);
                }
            }
        }
        _ => {
            // Any member must restrict, on every block, to the cut order
            // anchored in a different connecting block; assemble that single
            // candidate and let the membership check decide.
            let mut images = ground.labels().to_vec();
            for (bi, block) in pi.blocks().iter().enumerate() {
                let anchor = *connecting.iter().find(|&&a| a != bi).expect("two anchors");
                let anchor_block = &pi.blocks()[anchor];
                let x = *anchor_block.iter().find(|&&l| l <= p).expect("connecting");
                let y = *anchor_block.iter().find(|&&l| l > p).expect("connecting");
                let (pos, _) = lambda_position_table(p as usize, q as usize, x, y);
                let mut ordered = block.clone();
                ordered.sort_by_key(|&l| pos[(l - 1) as usize]);
                for k in 0..ordered.len() {
                    images[(ordered[k] - 1) as usize] = ordered[(k + 1) % ordered.len()];
                }
            }
            candidates.push(Permutation::from_images(ground, images)?);
        }
    }

    let mut fiber = Vec::new();
    for tau in candidates {
        if &tau.orbit_partition() == pi && is_ann_nc(&tau, shape)? {
            fiber.push(tau);
        }
    }
    fiber.sort();
    Ok(fiber)
}

/// Double a connected member into a parity-alternating pair permutation on
/// twice the shape: interleave the member on odd labels with its Kreweras
/// complement on even labels, then complement once more on the doubled
/// annulus.
pub fn parity_double(tau: &Permutation, shape: &AnnulusShape) -> Result<Permutation, AnnularError> {
    let (p, q) = shape.as_two()?;
    check_two_circle(tau, shape).map(|_| ())?;
    if !is_ann_nc_geodesic(tau, shape)? {
        return Err(AnnularError::NotMember);
    }
    if !is_connected(tau, shape)? {
        return Err(AnnularError::NotConnected);
    }
    let k = kreweras(tau, shape)?;
    let doubled = AnnulusShape::two(2 * p, 2 * q);
    let big_ground = doubled.ground();
    let mut images = big_ground.labels().to_vec();
    for i in 1..=(p + q) {
        images[(2 * i - 2) as usize] = 2 * tau.apply(i) - 1; // odd labels follow tau
        images[(2 * i - 1) as usize] = 2 * k.apply(i); // even labels follow the complement
    }
    let sigma = Permutation::from_images(big_ground, images)?;
    kreweras(&sigma, &doubled)
}

/// The non-negative even gap in the orbit-count bound
/// `#τ + #(τ⁻¹γ) ≤ Σpᵢ − l + 2·#(τ ∨ γ)`. Zero characterizes membership on
/// one or two circles; on more circles it is only an upper-bound diagnostic.
pub fn genus_defect(tau: &Permutation, shape: &AnnulusShape) -> Result<u64, AnnularError> {
    check_ground(tau, shape)?;
    let gamma = gammas(shape).1;
    let joint = tau.joint_orbit_count(&gamma)?;
    let k = tau.inverse().compose(&gamma)?.orbit_count();
    let total = shape.total() as i64;
    let l = shape.num_circles() as i64;
    let defect = (total - l + 2 * joint as i64) - (tau.orbit_count() as i64 + k as i64);
    debug_assert!(defect % 2 == 0, "odd defect {defect} for {tau}");
    Ok(u64::try_from(defect).expect("orbit-count bound holds for every permutation"))
}

/// Which circles end up in a common joint orbit of the permutation and the
/// circle rotation: a partition of `{1, ..., l}`.
pub fn circle_partition(
    tau: &Permutation,
    shape: &AnnulusShape,
) -> Result<SetPartition, AnnularError> {
    check_ground(tau, shape)?;
    let l = shape.num_circles();
    let mut uf = UnionFind::new(l);
    for label in 1..=shape.total() {
        uf.union(shape.circle_of(label), shape.circle_of(tau.apply(label)));
    }
    let mut groups: HashMap<usize, Vec<u32>> = HashMap::new();
    for i in 0..l {
        groups.entry(uf.find(i)).or_default().push((i + 1) as u32);
    }
    let blocks: Vec<Vec<u32>> = groups.into_values().collect();
    Ok(SetPartition::new(
        GroundSet::contiguous(l as u32),
        blocks,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc_nc::{enumerate_disc_nc, is_disc_nc};
    use crate::permcore::symmetric_group;

    fn perm(text: &str, n: u32) -> Permutation {
        Permutation::from_cycles(text, &GroundSet::contiguous(n)).unwrap()
    }

    fn shapes_with_total(n: u32) -> Vec<AnnulusShape> {
        (1..n).map(|p| AnnulusShape::two(p, n - p)).collect()
    }

    #[test]
    fn shape_basics() {
        let s = AnnulusShape::two(5, 3);
        assert_eq!(s.total(), 8);
        assert_eq!(s.circle_of(5), 0);
        assert_eq!(s.circle_of(6), 1);
        assert_eq!("5,3".parse::<AnnulusShape>().unwrap(), s);
        assert_eq!(s.to_string(), "5,3");
        assert!("5,0".parse::<AnnulusShape>().is_err());
        assert!("".parse::<AnnulusShape>().is_err());
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json, serde_json::json!({"circles": [5, 3]}));
    }

    #[test]
    fn gammas_examples() {
        let (per, gamma) = gammas(&AnnulusShape::two(5, 3));
        assert_eq!(gamma, perm("(1,2,3,4,5)(6,7,8)", 8));
        assert_eq!(per[0], perm("(1,2,3,4,5)", 8));
        assert_eq!(per[1], perm("(6,7,8)", 8));
        assert!(gammas(&AnnulusShape::two(1, 1)).1.is_identity());
        for shape in [
            AnnulusShape::two(2, 2),
            AnnulusShape::new(vec![3, 2, 2]).unwrap(),
            AnnulusShape::new(vec![4]).unwrap(),
        ] {
            assert_eq!(gammas(&shape).1.orbit_count(), shape.num_circles());
        }
    }

    #[test]
    fn lambda_examples() {
        let shape = AnnulusShape::two(5, 3);
        assert_eq!(lambda(&shape, 5, 6).unwrap(), perm("(1,2,3,4,7,8)", 8));
        assert!(lambda(&AnnulusShape::two(1, 1), 1, 2).unwrap().is_identity());
        assert_eq!(
            lambda(&shape, 6, 5),
            Err(AnnularError::AnchorsNotOnBothCircles { x: 6, y: 5 })
        );
    }

    #[test]
    fn lambda_at_the_seam_matches_the_disc_cycle() {
        // Anchored at (p, p+1), the cut order agrees with the disc forward
        // cycle away from the anchors.
        for p in 1..=4u32 {
            for q in 1..=4u32 {
                let shape = AnnulusShape::two(p, q);
                let n = p + q;
                if n < 3 {
                    continue;
                }
                let lam = lambda(&shape, p, p + 1).unwrap();
                let gamma_o = crate::disc_nc::gamma_disc(n);
                let others: Vec<u32> = (1..=n).filter(|&l| l != p && l != p + 1).collect();
                let sub = GroundSet::new(others).unwrap();
                assert_eq!(
                    lam.induced(&sub).unwrap(),
                    gamma_o.induced(&sub).unwrap(),
                    "p={p}, q={q}"
                );
            }
        }
    }

    #[test]
    fn lambda_matches_compact_product_form() {
        // For p, q ≥ 2 the cut permutation factors as
        // γ_int · (γ_ext(x), x, y, γ_int⁻¹(y)) · γ_ext.
        for p in 2..=4u32 {
            for q in 2..=4u32 {
                let shape = AnnulusShape::two(p, q);
                let (per, _) = gammas(&shape);
                let (ge, gi) = (&per[0], &per[1]);
                let ground = shape.ground();
                for x in 1..=p {
                    for y in (p + 1)..=(p + q) {
                        let four = Permutation::from_cycles(
                            &format!("({},{},{},{})", ge.apply(x), x, y, gi.inverse().apply(y)),
                            &ground,
                        )
                        .unwrap();
                        let product = gi.compose(&four).unwrap().compose(ge).unwrap();
                        assert_eq!(lambda(&shape, x, y).unwrap(), product, "p={p} q={q} x={x} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn standardness_examples() {
        let shape = AnnulusShape::two(5, 3);
        assert!(is_ann_standard(&perm("(1,8)(3,4,7)(5,6)", 8), &shape).unwrap());
        assert!(is_ann_standard(&perm("(4,5,1,7,8,6)", 8), &shape).unwrap());
        let bad = perm("(1,3,2)", 5);
        let shape41 = AnnulusShape::two(4, 1);
        assert!(!is_ann_standard(&bad, &shape41).unwrap());
        assert_eq!(
            ans_witness(&bad, &shape41).unwrap(),
            Some(CrossingWitness::new(WitnessKind::Ans1, vec![1, 2, 3]))
        );
    }

    #[test]
    fn standardness_matches_witness_search_exhaustively() {
        for n in 2..=6u32 {
            for shape in shapes_with_total(n) {
                for tau in symmetric_group(&GroundSet::contiguous(n)) {
                    let direct = is_ann_standard(&tau, &shape).unwrap();
                    let witness = ans_witness(&tau, &shape).unwrap();
                    assert_eq!(direct, witness.is_none(), "{tau} in {shape}");
                    if let Some(w) = witness {
                        assert!(w.holds(&tau, &shape).unwrap(), "{w:?} for {tau} in {shape}");
                    }
                }
            }
        }
    }

    #[test]
    fn crossing_examples() {
        let shape41 = AnnulusShape::two(4, 1);
        let w = find_crossing(&perm("(1,3)(2,4)", 5), &shape41).unwrap().unwrap();
        assert_eq!(w.kind, WitnessKind::Ac1);
        assert_eq!(w.elements, vec![1, 2, 3, 4]);

        // Crosswise pairs across the circles are fine: (1,3)(2,4) is a
        // member for the 2+2 shape.
        let shape22 = AnnulusShape::two(2, 2);
        let tau = perm("(1,3)(2,4)", 4);
        assert!(is_ann_standard(&tau, &shape22).unwrap());
        assert_eq!(find_crossing(&tau, &shape22).unwrap(), None);
        assert!(is_ann_nc(&tau, &shape22).unwrap());
        assert!(is_ann_nc_geodesic(&tau, &shape22).unwrap());
    }

    #[test]
    fn disc_members_never_show_annular_crossings() {
        for n in 2..=7u32 {
            for shape in shapes_with_total(n) {
                for tau in enumerate_disc_nc(n).unwrap() {
                    assert_eq!(
                        membership_witness(&tau, &shape).unwrap(),
                        None,
                        "{tau} in {shape}"
                    );
                }
            }
        }
    }

    #[test]
    fn membership_examples() {
        let shape = AnnulusShape::two(5, 3);
        assert!(is_ann_nc(&perm("(1,8)(3,4,7)(5,6)", 8), &shape).unwrap());
        assert!(is_ann_nc(&perm("(1,2,7)(4,6)(5,8)", 8), &shape).unwrap());
        assert!(!is_ann_nc(&perm("(1,3)(2,4)", 8), &shape).unwrap());
    }

    #[test]
    fn witnesses_recheck_and_respect_kind_order() {
        for n in 4..=6u32 {
            for shape in shapes_with_total(n) {
                for tau in symmetric_group(&GroundSet::contiguous(n)) {
                    if let Some(w) = find_crossing(&tau, &shape).unwrap() {
                        assert!(w.holds(&tau, &shape).unwrap(), "{w:?} for {tau} in {shape}");
                    }
                }
            }
        }
    }

    #[test]
    fn crossing_witness_is_least_kind_then_lexicographic() {
        // Brute-force oracle: re-check every ordered tuple with the generic
        // induced-pattern checker, in kind order then tuple order, and
        // compare with the search.
        fn brute_least(tau: &Permutation, shape: &AnnulusShape) -> Option<CrossingWitness> {
            let n = shape.total();
            let kinds = [
                (WitnessKind::Ac1, 4usize),
                (WitnessKind::Ac2, 5),
                (WitnessKind::Ac3, 6),
            ];
            for (kind, arity) in kinds {
                let mut tuple = vec![0u32; arity];
                if let Some(w) = brute_rec(tau, shape, kind, &mut tuple, 0, n) {
                    return Some(w);
                }
            }
            None
        }
        fn brute_rec(
            tau: &Permutation,
            shape: &AnnulusShape,
            kind: WitnessKind,
            tuple: &mut Vec<u32>,
            depth: usize,
            n: u32,
        ) -> Option<CrossingWitness> {
            if depth == tuple.len() {
                let w = CrossingWitness::new(kind, tuple.clone());
                return w.holds(tau, shape).unwrap().then_some(w);
            }
            for label in 1..=n {
                if tuple[..depth].contains(&label) {
                    continue;
                }
                tuple[depth] = label;
                if let Some(w) = brute_rec(tau, shape, kind, tuple, depth + 1, n) {
                    return Some(w);
                }
            }
            None
        }
        fn brute_least_ans(tau: &Permutation, shape: &AnnulusShape) -> Option<CrossingWitness> {
            for (kind, arity) in [(WitnessKind::Ans1, 3usize), (WitnessKind::Ans2, 4)] {
                let mut tuple = vec![0u32; arity];
                if let Some(w) = brute_rec(tau, shape, kind, &mut tuple, 0, shape.total()) {
                    return Some(w);
                }
            }
            None
        }
        for shape in [AnnulusShape::two(3, 3), AnnulusShape::two(4, 2)] {
            for (i, tau) in symmetric_group(&GroundSet::contiguous(6)).enumerate() {
                if i % 7 != 0 {
                    continue; // deterministic sample, ~100 permutations
                }
                assert_eq!(
                    find_crossing(&tau, &shape).unwrap(),
                    brute_least(&tau, &shape),
                    "{tau} in {shape}"
                );
                assert_eq!(
                    ans_witness(&tau, &shape).unwrap(),
                    brute_least_ans(&tau, &shape),
                    "{tau} in {shape}"
                );
            }
        }
    }

    #[test]
    fn connected_examples() {
        let shape = AnnulusShape::two(5, 3);
        assert!(is_connected(&perm("(1,8)(3,4,7)(5,6)", 8), &shape).unwrap());
        assert!(!is_connected(&gammas(&shape).1, &shape).unwrap());
        assert!(is_connected(&perm("(1,2,3,4,5,6,7,8)", 8), &shape).unwrap());
    }

    #[test]
    fn geodesic_examples() {
        let shape11 = AnnulusShape::two(1, 1);
        assert!(is_ann_nc_geodesic(&perm("(1,2)", 2), &shape11).unwrap());

        let shape21 = AnnulusShape::two(2, 1);
        let connected_members: Vec<Permutation> = symmetric_group(&GroundSet::contiguous(3))
            .filter(|t| {
                is_connected(t, &shape21).unwrap() && is_ann_nc_geodesic(t, &shape21).unwrap()
            })
            .collect();
        let expected = vec![
            perm("(1,3)", 3),
            perm("(2,3)", 3),
            perm("(1,2,3)", 3),
            perm("(1,3,2)", 3),
        ];
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(connected_members, sorted);
    }

    #[test]
    fn geodesic_agrees_with_patterns_up_to_seven() {
        for n in 2..=7u32 {
            for shape in shapes_with_total(n) {
                for tau in symmetric_group(&GroundSet::contiguous(n)) {
                    assert_eq!(
                        is_ann_nc(&tau, &shape).unwrap(),
                        is_ann_nc_geodesic(&tau, &shape).unwrap(),
                        "{tau} in {shape}"
                    );
                }
            }
        }
    }

    #[test]
    fn kreweras_examples() {
        let shape = AnnulusShape::two(5, 3);
        let tau = perm("(1,8)(3,4,7)(5,6)", 8);
        assert_eq!(kreweras(&tau, &shape).unwrap(), perm("(1,2,7)(4,6)(5,8)", 8));
        let id = Permutation::identity(GroundSet::contiguous(8));
        assert_eq!(kreweras(&id, &shape).unwrap(), gammas(&shape).1);
        assert_eq!(
            kreweras(&perm("(1,3)(2,4)", 8), &shape),
            Err(AnnularError::NotMember)
        );
    }

    #[test]
    fn kreweras_is_a_bijection_of_members() {
        for n in 2..=7u32 {
            for shape in shapes_with_total(n) {
                let members: Vec<Permutation> =
                    enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap();
                let mut images: Vec<Permutation> = members
                    .iter()
                    .map(|t| kreweras(t, &shape).unwrap())
                    .collect();
                images.sort();
                images.dedup();
                assert_eq!(images, members, "{shape}");
            }
        }
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(count_connected_closed_form(1, 1), BigInt::from(1));
        assert_eq!(count_connected_closed_form(2, 1), BigInt::from(4));
        assert_eq!(count_connected_closed_form(2, 2), BigInt::from(18));
        assert_eq!(count_disconnected_closed_form(1, 1), BigInt::from(1));
        assert_eq!(count_disconnected_closed_form(2, 2), BigInt::from(4));
        assert_eq!(count_disconnected_closed_form(3, 2), BigInt::from(10));
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        for n in 2..=6u32 {
            for shape in shapes_with_total(n) {
                let brute: Vec<Permutation> = symmetric_group(&GroundSet::contiguous(n))
                    .filter(|t| is_ann_nc(t, &shape).unwrap())
                    .collect();
                let mut brute_sorted = brute.clone();
                brute_sorted.sort();
                let enumerated = enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap();
                assert_eq!(enumerated, brute_sorted, "{shape}");
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let shape11 = AnnulusShape::two(1, 1);
        let all = enumerate_ann_nc(&shape11, ConnectivityFilter::All).unwrap();
        assert_eq!(all.len(), 2);
        let shape21 = AnnulusShape::two(2, 1);
        let connected = enumerate_ann_nc(&shape21, ConnectivityFilter::ConnectedOnly).unwrap();
        assert_eq!(connected.len(), 4);
        assert!(matches!(
            enumerate_ann_nc(&AnnulusShape::two(6, 6), ConnectivityFilter::All),
            Err(AnnularError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn fiber_examples() {
        let shape22 = AnnulusShape::two(2, 2);
        let ground = GroundSet::contiguous(4);
        let one_block = SetPartition::full(ground.clone());
        assert_eq!(nc_ann_fiber(&one_block, &shape22).unwrap().len(), 4);

        let two_connecting =
            SetPartition::new(ground.clone(), vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert_eq!(
            nc_ann_fiber(&two_connecting, &shape22).unwrap(),
            vec![perm("(1,3)(2,4)", 4)]
        );

        let gamma_orbits = gammas(&shape22).1.orbit_partition();
        assert_eq!(
            nc_ann_fiber(&gamma_orbits, &shape22).unwrap(),
            vec![gammas(&shape22).1]
        );
    }

    #[test]
    fn fibers_partition_the_membership_set() {
        use std::collections::HashMap;
        for n in 2..=6u32 {
            for shape in shapes_with_total(n) {
                let mut by_partition: HashMap<Vec<u32>, Vec<Permutation>> = HashMap::new();
                for tau in enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap() {
                    by_partition
                        .entry(tau.orbit_partition().rgs_key())
                        .or_default()
                        .push(tau);
                }
                for pi in crate::partitions::enumerate_partitions(n).unwrap() {
                    let fiber = nc_ann_fiber(&pi, &shape).unwrap();
                    let expected = by_partition.remove(&pi.rgs_key()).unwrap_or_default();
                    assert_eq!(fiber, expected, "{pi:?} in {shape}");
                }
                assert!(by_partition.is_empty());
            }
        }
    }

    #[test]
    fn parity_double_smallest_case() {
        let shape = AnnulusShape::two(1, 1);
        let tau = perm("(1,2)", 2);
        let image = parity_double(&tau, &shape).unwrap();
        assert_eq!(image, perm("(1,4)(2,3)", 4));
        let doubled = AnnulusShape::two(2, 2);
        assert!(is_ann_nc(&image, &doubled).unwrap());
        assert!(is_connected(&image, &doubled).unwrap());
        assert!(image.cycles().iter().all(|c| c.len() == 2));
    }

    #[test]
    fn parity_double_rejects_bad_input() {
        let shape = AnnulusShape::two(2, 2);
        let disconnected = perm("(1,2)(3,4)", 4);
        assert_eq!(
            parity_double(&disconnected, &shape),
            Err(AnnularError::NotConnected)
        );
        // Double-crossing cycle: connected but not a member.
        let crossing = perm("(1,3,2,4)", 4);
        assert!(!is_ann_nc(&crossing, &shape).unwrap());
        assert_eq!(parity_double(&crossing, &shape), Err(AnnularError::NotMember));
    }

    #[test]
    fn defect_examples() {
        let disc = AnnulusShape::new(vec![4]).unwrap();
        let id4 = Permutation::identity(GroundSet::contiguous(4));
        assert_eq!(genus_defect(&id4, &disc).unwrap(), 0);
        let shape22 = AnnulusShape::two(2, 2);
        assert_eq!(genus_defect(&perm("(1,3)(2,4)", 4), &shape22).unwrap(), 0);
        // A genuine crossing inside one circle costs a handle.
        let shape41 = AnnulusShape::two(4, 1);
        assert_eq!(genus_defect(&perm("(1,3)(2,4)", 5), &shape41).unwrap(), 2);
    }

    #[test]
    fn defect_even_and_zero_iff_member_small() {
        for n in 2..=6u32 {
            for shape in shapes_with_total(n) {
                for tau in symmetric_group(&GroundSet::contiguous(n)) {
                    let d = genus_defect(&tau, &shape).unwrap();
                    assert_eq!(d % 2, 0);
                    assert_eq!(d == 0, is_ann_nc_geodesic(&tau, &shape).unwrap());
                }
            }
        }
    }

    #[test]
    fn circle_partition_examples() {
        let shape = AnnulusShape::new(vec![2, 1]).unwrap();
        let id = Permutation::identity(GroundSet::contiguous(3));
        assert_eq!(
            circle_partition(&id, &shape).unwrap(),
            SetPartition::singletons(GroundSet::contiguous(2))
        );
        let full = perm("(1,2,3)", 3);
        assert_eq!(
            circle_partition(&full, &shape).unwrap(),
            SetPartition::full(GroundSet::contiguous(2))
        );
        let cross = perm("(1,3)", 3);
        assert_eq!(
            circle_partition(&cross, &shape).unwrap(),
            SetPartition::full(GroundSet::contiguous(2))
        );
        // Connectivity on three circles is transitivity of the joint action.
        let shape3 = AnnulusShape::new(vec![1, 1, 1]).unwrap();
        let pair = perm("(1,2)", 3);
        assert!(!is_connected(&pair, &shape3).unwrap());
        assert_eq!(
            circle_partition(&pair, &shape3).unwrap().blocks(),
            &[vec![1, 2], vec![3]]
        );
    }

    #[test]
    fn membership_refused_beyond_two_circles() {
        let shape = AnnulusShape::new(vec![2, 2, 2]).unwrap();
        let tau = Permutation::identity(GroundSet::contiguous(6));
        assert!(matches!(
            is_ann_nc(&tau, &shape),
            Err(AnnularError::NotTwoCircles { found: 3 })
        ));
        assert!(matches!(
            is_ann_nc_geodesic(&tau, &shape),
            Err(AnnularError::NotTwoCircles { found: 3 })
        ));
        // The diagnostics that do generalize keep working.
        assert!(genus_defect(&tau, &shape).is_ok());
        assert!(is_connected(&tau, &shape).is_ok());
        assert!(circle_partition(&tau, &shape).is_ok());
    }

    #[test]
    fn conjugation_by_circle_rotations_preserves_membership() {
        for n in 2..=7u32 {
            for shape in shapes_with_total(n) {
                let (per, _) = gammas(&shape);
                for tau in enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap() {
                    for rho in &per {
                        let conj = tau.conjugate_by(rho).unwrap();
                        assert!(is_ann_nc(&conj, &shape).unwrap(), "{tau} conj in {shape}");
                    }
                }
            }
        }
    }

    #[test]
    fn members_fixing_the_seam_are_disc_members() {
        // tau(p) = p+1 forces disc membership.
        for n in 2..=7u32 {
            for shape in shapes_with_total(n) {
                let (p, _) = shape.as_two().unwrap();
                for tau in enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap() {
                    if tau.apply(p) == p + 1 {
                        assert!(is_disc_nc(&tau), "{tau} in {shape}");
                    }
                }
            }
        }
    }

    #[test]
    fn disconnected_members_are_disc_members_and_vice_versa() {
        for n in 2..=7u32 {
            for shape in shapes_with_total(n) {
                let (p, _) = shape.as_two().unwrap();
                for tau in symmetric_group(&GroundSet::contiguous(n)) {
                    if is_connected(&tau, &shape).unwrap() {
                        continue;
                    }
                    let member = is_ann_nc(&tau, &shape).unwrap();
                    assert_eq!(member, is_disc_nc(&tau), "{tau} in {shape}");
                    // And both circle restrictions decide it.
                    let ext = GroundSet::new((1..=p).collect()).unwrap();
                    let int = GroundSet::new(((p + 1)..=n).collect()).unwrap();
                    let split = is_disc_nc(&tau.induced(&ext).unwrap())
                        && is_disc_nc(&tau.induced(&int).unwrap());
                    assert_eq!(member, split, "{tau} in {shape}");
                }
            }
        }
    }

    #[test]
    fn pair_permutations_biject_with_matching_partitions() {
        // Restricted to permutations with all orbits of size two, the orbit
        // map hits each non-crossing matching partition exactly once.
        for n in [4u32, 6] {
            for shape in shapes_with_total(n) {
                let members = enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap();
                let pair_members: Vec<&Permutation> = members
                    .iter()
                    .filter(|t| t.cycles().iter().all(|c| c.len() == 2))
                    .collect();
                let mut images: Vec<Vec<u32>> = pair_members
                    .iter()
                    .map(|t| t.orbit_partition().rgs_key())
                    .collect();
                images.sort();
                images.dedup();
                assert_eq!(images.len(), pair_members.len());
                let matching_partitions: Vec<SetPartition> = members
                    .iter()
                    .map(|t| t.orbit_partition())
                    .filter(|p| p.is_complete_matching())
                    .collect();
                let mut keys: Vec<Vec<u32>> =
                    matching_partitions.iter().map(|p| p.rgs_key()).collect();
                keys.sort();
                keys.dedup();
                assert_eq!(images, keys, "{shape}");
            }
        }
    }
}
