//! Exact trace-moment combinatorics for complex Wishart and GUE matrices.
//!
//! Finite-size joint moments of normalized traces are weighted sums over
//! word-preserving permutations: each `τ` with `w ∘ τ = w` contributes
//! `M^#(τ) · N^#(τ⁻¹γ)`, where `γ` rotates each trace's index block, and the
//! whole sum carries the prefactor `1/N^(n+l)`. GUE moments run over
//! complete matchings instead. Everything here is exact: values are big
//! rationals, limits are integer polynomials in the ratio `c`.
//!
//! Sums never run over the whole symmetric group: only over the stabilizer
//! of the word, enumerated as a product of symmetric groups on the letter
//! classes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use thiserror::Error;

use crate::annular_nc::{
    enumerate_ann_nc_with_guard, is_ann_nc, AnnularError, AnnulusShape, ConnectivityFilter,
};
use crate::disc_nc::{enumerate_disc_nc_with_guard, nc_partition_blocks, DiscError};
use crate::partitions::{enumerate_partitions_with_guard, PartitionError};
use crate::permcore::{GroundSet, PermError, Permutation, UnionFind};

/// Default cap on the total word length in exact sums.
pub const DEFAULT_SUM_GUARD: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MomentError {
    #[error("words must be non-empty")]
    EmptyWord,
    #[error("letter {letter} outside the alphabet 1..={alphabet}")]
    LetterOutOfRange { letter: u32, alphabet: u32 },
    #[error("total word length {total} exceeds the guard {guard}")]
    GuardExceeded { total: u32, guard: u32 },
    #[error("this moment takes one or two words, got {got}")]
    WordCount { got: usize },
    #[error("matrix dimensions must be at least 1")]
    BadDimension,
    #[error(transparent)]
    Annular(#[from] AnnularError),
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A word over the alphabet `{1, ..., s}`, selecting which matrix each
/// factor of a trace monomial comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u32>,
    alphabet: u32,
}

impl Word {
    pub fn new(letters: Vec<u32>, alphabet: u32) -> Result<Self, MomentError> {
        if letters.is_empty() {
            return Err(MomentError::EmptyWord);
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l > alphabet) {
            return Err(MomentError::LetterOutOfRange {
                letter: bad,
                alphabet,
            });
        }
        Ok(Word { letters, alphabet })
    }

    /// Word with the alphabet inferred as the largest letter used.
    pub fn from_letters(letters: Vec<u32>) -> Result<Self, MomentError> {
        let alphabet = letters.iter().copied().max().unwrap_or(0);
        Word::new(letters, alphabet.max(1))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Integer-coefficient polynomial in the dimension ratio `c`;
/// `coeffs[k]` multiplies `c^k` and trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CPoly {
    coeffs: Vec<BigInt>,
}

impl CPoly {
    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn add_to_coeff(&mut self, power: usize, value: BigInt) {
        if self.coeffs.len() <= power {
            self.coeffs.resize(power + 1, BigInt::zero());
        }
        self.coeffs[power] += value;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, c: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for coeff in self.coeffs.iter().rev() {
            acc = acc * c + BigRational::from(coeff.clone());
        }
        acc
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, coeff) in self.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{coeff}")?,
                1 if coeff.is_one() => write!(f, "c")?,
                1 => write!(f, "{coeff}c")?,
                _ if coeff.is_one() => write!(f, "c^{k}")?,
                _ => write!(f, "{coeff}c^{k}")?,
            }
        }
        Ok(())
    }
}

/// First- and second-order limit data for one word: the limit moment
/// polynomial and the polynomial multiplying the offset `c'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitPair {
    pub e_w: CPoly,
    pub e_w_prime_coeff: CPoly,
}

fn total_length(words: &[Word]) -> u32 {
    words.iter().map(|w| w.len() as u32).sum()
}

fn check_guard(words: &[Word], guard: u32) -> Result<(), MomentError> {
    if words.is_empty() {
        return Err(MomentError::WordCount { got: 0 });
    }
    let total = total_length(words);
    if total > guard {
        return Err(MomentError::GuardExceeded { total, guard });
    }
    Ok(())
}

fn concatenated_letters(words: &[Word]) -> Vec<u32> {
    words.iter().flat_map(|w| w.letters.iter().copied()).collect()
}

/// 0-based image table of the block rotation: each word's index range is a
/// forward cycle.
fn gamma_images(words: &[Word]) -> Vec<usize> {
    let n = total_length(words) as usize;
    let mut gamma = vec![0usize; n];
    let mut offset = 0usize;
    for w in words {
        let len = w.len();
        for k in 0..len {
            gamma[offset + k] = offset + (k + 1) % len;
        }
        offset += len;
    }
    gamma
}

fn cycle_count(map: &[usize]) -> usize {
    let mut visited = vec![false; map.len()];
    let mut count = 0;
    for start in 0..map.len() {
        if visited[start] {
            continue;
        }
        count += 1;
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            cur = map[cur];
        }
    }
    count
}

/// Visit every permutation fixing the word, as a 0-based image table. The
/// stabilizer is the direct product of the symmetric groups on the letter
/// classes, so this never touches permutations that move letters.
fn for_each_stabilizer(letters: &[u32], f: &mut dyn FnMut(&[usize])) {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    {
        let mut by_letter: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &l) in letters.iter().enumerate() {
            by_letter.entry(l).or_default().push(i);
        }
        classes.extend(by_letter.into_values());
    }
    let mut images: Vec<usize> = (0..letters.len()).collect();
    walk_classes(&classes, 0, &mut images, f);
}

fn walk_classes(
    classes: &[Vec<usize>],
    ci: usize,
    images: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if ci == classes.len() {
        f(images);
        return;
    }
    let class = classes[ci].clone();
    let mut used = vec![false; class.len()];
    walk_within(&class, 0, &mut used, classes, ci, images, f);
}

fn walk_within(
    class: &[usize],
    k: usize,
    used: &mut Vec<bool>,
    classes: &[Vec<usize>],
    ci: usize,
    images: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if k == class.len() {
        walk_classes(classes, ci + 1, images, f);
        return;
    }
    for t in 0..class.len() {
        if used[t] {
            continue;
        }
        used[t] = true;
        images[class[k]] = class[t];
        walk_within(class, k + 1, used, classes, ci, images, f);
        used[t] = false;
    }
}

/// Visit every complete matching of the word positions that pairs equal
/// letters, as a 0-based image table. No-op for odd lengths.
fn for_each_matching(letters: &[u32], f: &mut dyn FnMut(&[usize])) {
    let n = letters.len();
    if !n.is_multiple_of(2) {
        return;
    }
    let mut images: Vec<usize> = (0..n).collect();
    let mut matched = vec![false; n];
    match_rec(letters, &mut matched, &mut images, f);
}

fn match_rec(
    letters: &[u32],
    matched: &mut Vec<bool>,
    images: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    let Some(i) = matched.iter().position(|&m| !m) else {
        f(images);
        return;
    };
    matched[i] = true;
    for j in (i + 1)..letters.len() {
        if matched[j] || letters[j] != letters[i] {
            continue;
        }
        matched[j] = true;
        images[i] = j;
        images[j] = i;
        match_rec(letters, matched, images, f);
        matched[j] = false;
    }
    matched[i] = false;
    images[i] = i;
}

/// Does the permutation connect all the word blocks into one piece?
fn connects_blocks(images: &[usize], words: &[Word]) -> bool {
    let l = words.len();
    let mut block_of = vec![0usize; images.len()];
    let mut offset = 0usize;
    for (bi, w) in words.iter().enumerate() {
        for k in 0..w.len() {
            block_of[offset + k] = bi;
        }
        offset += w.len();
    }
    let mut uf = UnionFind::new(l);
    for (m, &img) in images.iter().enumerate() {
        uf.union(block_of[m], block_of[img]);
    }
    uf.component_count() == 1
}

/// Joint tally of `(#τ, #(τ⁻¹γ))` over the word stabilizer; the exact
/// moment is then a two-variable polynomial evaluation.
fn stabilizer_profile(
    words: &[Word],
    connected_only: bool,
) -> BTreeMap<(usize, usize), u64> {
    let letters = concatenated_letters(words);
    let gamma = gamma_images(words);
    let n = letters.len();
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut inv = vec![0usize; n];
    let mut composite = vec![0usize; n];
    for_each_stabilizer(&letters, &mut |images| {
        if connected_only && !connects_blocks(images, words) {
            return;
        }
        for (m, &img) in images.iter().enumerate() {
            inv[img] = m;
        }
        for m in 0..n {
            composite[m] = inv[gamma[m]];
        }
        let key = (cycle_count(images), cycle_count(&composite));
        *counts.entry(key).or_insert(0) += 1;
    });
    counts
}

/// The tally only depends on the letters and block lengths, never on the
/// matrix dimensions, so evaluating one word family at many dimensions can
/// share it.
fn stabilizer_profile_cached(
    words: &[Word],
    connected_only: bool,
) -> Rc<BTreeMap<(usize, usize), u64>> {
    thread_local! {
        #[allow(clippy::type_complexity)]
        static CACHE: RefCell<
            HashMap<(Vec<u32>, Vec<u32>, bool), Rc<BTreeMap<(usize, usize), u64>>>,
        > = RefCell::new(HashMap::new());
    }
    let key = (
        concatenated_letters(words),
        words.iter().map(|w| w.len() as u32).collect::<Vec<u32>>(),
        connected_only,
    );
    CACHE.with(|cache| {
        if let Some(hit) = cache.borrow().get(&key) {
            return Rc::clone(hit);
        }
        let profile = Rc::new(stabilizer_profile(words, connected_only));
        cache.borrow_mut().insert(key, Rc::clone(&profile));
        profile
    })
}

/// Same tally over letter-preserving complete matchings.
fn matching_profile(
    words: &[Word],
    connected_only: bool,
) -> BTreeMap<(usize, usize), u64> {
    let letters = concatenated_letters(words);
    let gamma = gamma_images(words);
    let n = letters.len();
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut composite = vec![0usize; n];
    for_each_matching(&letters, &mut |images| {
        if connected_only && !connects_blocks(images, words) {
            return;
        }
        // A matching is its own inverse.
        for m in 0..n {
            composite[m] = images[gamma[m]];
        }
        let key = (n / 2, cycle_count(&composite));
        *counts.entry(key).or_insert(0) += 1;
    });
    counts
}

fn pow_table(base: u64, up_to: usize) -> Vec<BigInt> {
    let mut table = Vec::with_capacity(up_to + 1);
    table.push(BigInt::one());
    for k in 1..=up_to {
        table.push(&table[k - 1] * BigInt::from(base));
    }
    table
}

fn profile_numerator(profile: &BTreeMap<(usize, usize), u64>, m: u64, n_dim: u64, max_exp: usize) -> BigInt {
    let m_pow = pow_table(m, max_exp);
    let n_pow = pow_table(n_dim, max_exp);
    let mut num = BigInt::zero();
    for (&(a, b), &count) in profile {
        num += BigInt::from(count) * &m_pow[a] * &n_pow[b];
    }
    num
}

/// Exact expectation of a product of normalized Wishart trace monomials, at
/// integer dimensions `M × N`.
pub fn wishart_trace_product_exact(
    words: &[Word],
    m: u64,
    n_dim: u64,
) -> Result<BigRational, MomentError> {
    wishart_trace_product_exact_with_guard(words, m, n_dim, DEFAULT_SUM_GUARD)
}

pub fn wishart_trace_product_exact_with_guard(
    words: &[Word],
    m: u64,
    n_dim: u64,
    guard: u32,
) -> Result<BigRational, MomentError> {
    check_guard(words, guard)?;
    if m == 0 || n_dim == 0 {
        return Err(MomentError::BadDimension);
    }
    let total = total_length(words) as usize;
    let profile = stabilizer_profile_cached(words, false);
    let num = profile_numerator(&profile, m, n_dim, total + words.len());
    let den = pow_table(n_dim, total + words.len())[total + words.len()].clone();
    Ok(BigRational::new(num, den))
}

/// Exact expectation of one or a product of two normalized GUE trace
/// monomials at dimension `N`; odd total length gives exactly zero.
pub fn gue_trace_product_exact(words: &[Word], n_dim: u64) -> Result<BigRational, MomentError> {
    gue_trace_product_exact_with_guard(words, n_dim, DEFAULT_SUM_GUARD)
}

pub fn gue_trace_product_exact_with_guard(
    words: &[Word],
    n_dim: u64,
    guard: u32,
) -> Result<BigRational, MomentError> {
    if !(1..=2).contains(&words.len()) {
        return Err(MomentError::WordCount { got: words.len() });
    }
    check_guard(words, guard)?;
    if n_dim == 0 {
        return Err(MomentError::BadDimension);
    }
    let total = total_length(words) as usize;
    if total % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let profile = matching_profile(words, false);
    let mut num = BigInt::zero();
    let n_pow = pow_table(n_dim, total + words.len());
    for (&(a, b), &count) in &profile {
        num += BigInt::from(count) * &n_pow[a + b];
    }
    let den = n_pow[total + words.len()].clone();
    Ok(BigRational::new(num, den))
}

/// Limit of the Wishart moment of one word, as a polynomial in the ratio
/// `c`: one `c^(blocks)` per non-crossing partition on which the word is
/// constant.
pub fn wishart_limit_moment(w: &Word) -> Result<CPoly, MomentError> {
    check_guard(std::slice::from_ref(w), crate::disc_nc::DEFAULT_NC_GUARD)?;
    let labels: Vec<u32> = (1..=w.len() as u32).collect();
    let mut poly = CPoly::zero();
    for blocks in nc_partition_blocks(&labels) {
        let constant = blocks.iter().all(|block| {
            let first = w.letters[(block[0] - 1) as usize];
            block.iter().all(|&l| w.letters[(l - 1) as usize] == first)
        });
        if constant {
            poly.add_to_coeff(blocks.len(), BigInt::one());
        }
    }
    Ok(poly)
}

/// Second-order Wishart limit for a pair of words: one `c^#(τ)` for every
/// connected annular non-crossing permutation fixing the joined word.
pub fn wishart_limit_covariance(v: &Word, w: &Word) -> Result<CPoly, MomentError> {
    wishart_limit_covariance_with_guard(v, w, DEFAULT_SUM_GUARD)
}

pub fn wishart_limit_covariance_with_guard(
    v: &Word,
    w: &Word,
    guard: u32,
) -> Result<CPoly, MomentError> {
    let words = [v.clone(), w.clone()];
    check_guard(&words, guard)?;
    let letters = concatenated_letters(&words);
    let shape = AnnulusShape::two(v.len() as u32, w.len() as u32);
    let mut poly = CPoly::zero();
    for tau in enumerate_ann_nc_with_guard(&shape, ConnectivityFilter::ConnectedOnly, guard)? {
        let symmetric = (1..=letters.len() as u32)
            .all(|m| letters[(tau.apply(m) - 1) as usize] == letters[(m - 1) as usize]);
        if symmetric {
            poly.add_to_coeff(tau.orbit_count(), BigInt::one());
        }
    }
    Ok(poly)
}

/// First-order GUE limit of one word: the number of disc non-crossing
/// complete matchings fixing the word (zero for odd lengths).
pub fn gue_limit_moment(w: &Word) -> Result<u64, MomentError> {
    check_guard(std::slice::from_ref(w), DEFAULT_SUM_GUARD)?;
    let n = w.len();
    if n % 2 == 1 {
        return Ok(0);
    }
    let ground = GroundSet::contiguous(n as u32);
    let mut count = 0u64;
    for_each_matching(w.letters(), &mut |images| {
        let tau = Permutation::from_images(
            ground.clone(),
            images.iter().map(|&i| (i + 1) as u32).collect(),
        )
        .expect("matching is a bijection");
        if crate::disc_nc::is_disc_nc(&tau) {
            count += 1;
        }
    });
    Ok(count)
}

/// Second-order GUE limit for a pair of words: the number of connected
/// annular non-crossing complete matchings fixing the joined word.
pub fn gue_limit_covariance(v: &Word, w: &Word) -> Result<u64, MomentError> {
    gue_limit_covariance_with_guard(v, w, DEFAULT_SUM_GUARD)
}

pub fn gue_limit_covariance_with_guard(
    v: &Word,
    w: &Word,
    guard: u32,
) -> Result<u64, MomentError> {
    let words = [v.clone(), w.clone()];
    check_guard(&words, guard)?;
    let total = total_length(&words) as usize;
    if total % 2 == 1 {
        return Ok(0);
    }
    let letters = concatenated_letters(&words);
    let shape = AnnulusShape::two(v.len() as u32, w.len() as u32);
    let ground = GroundSet::contiguous(total as u32);
    let mut count = 0u64;
    let mut result: Result<(), MomentError> = Ok(());
    for_each_matching(&letters, &mut |images| {
        if result.is_err() || !connects_blocks(images, &words) {
            return;
        }
        let tau = Permutation::from_images(
            ground.clone(),
            images.iter().map(|&i| (i + 1) as u32).collect(),
        )
        .expect("matching is a bijection");
        match is_ann_nc(&tau, &shape) {
            Ok(true) => count += 1,
            Ok(false) => {}
            Err(e) => result = Err(MomentError::Annular(e)),
        }
    });
    result.map(|()| count)
}

/// Classical cumulant of the Wishart trace family, by Möbius inversion over
/// the partition lattice of the word indices.
pub fn classical_cumulant_exact(
    words: &[Word],
    m: u64,
    n_dim: u64,
) -> Result<BigRational, MomentError> {
    classical_cumulant_exact_with_guard(words, m, n_dim, DEFAULT_SUM_GUARD)
}

/// Block lists with Möbius weights, one entry per partition of the index
/// set.
type MuTable = Rc<Vec<(Vec<Vec<u32>>, i64)>>;

/// Partitions of `{1, ..., l}` with their Möbius values against the
/// one-block partition, cached per size.
fn partition_mu_table(l: u32) -> Result<MuTable, MomentError> {
    thread_local! {
        static CACHE: RefCell<HashMap<u32, MuTable>> = RefCell::new(HashMap::new());
    }
    CACHE.with(|cache| {
        if let Some(hit) = cache.borrow().get(&l) {
            return Ok(Rc::clone(hit));
        }
        let mut table = Vec::new();
        for pi in enumerate_partitions_with_guard(l, l)? {
            let mu = crate::partitions::mobius_to_top_cached(&pi);
            table.push((pi.blocks().to_vec(), mu));
        }
        let table = Rc::new(table);
        cache.borrow_mut().insert(l, Rc::clone(&table));
        Ok(table)
    })
}

pub fn classical_cumulant_exact_with_guard(
    words: &[Word],
    m: u64,
    n_dim: u64,
    guard: u32,
) -> Result<BigRational, MomentError> {
    check_guard(words, guard)?;
    let l = words.len() as u32;
    let mut block_moments: HashMap<Vec<u32>, BigRational> = HashMap::new();
    let mut total = BigRational::zero();
    for (blocks, mu) in partition_mu_table(l)?.iter() {
        let mut product = BigRational::from(BigInt::from(*mu));
        for block in blocks {
            let moment = match block_moments.get(block) {
                Some(v) => v.clone(),
                None => {
                    let sub: Vec<Word> = block
                        .iter()
                        .map(|&i| words[(i - 1) as usize].clone())
                        .collect();
                    let v = wishart_trace_product_exact_with_guard(&sub, m, n_dim, guard)?;
                    block_moments.insert(block.clone(), v.clone());
                    v
                }
            };
            product *= moment;
        }
        total += product;
    }
    Ok(total)
}

/// The same cumulant computed directly: the moment sum restricted to
/// permutations connecting all the word blocks. Agrees exactly with
/// [`classical_cumulant_exact`].
pub fn connected_cumulant_exact(
    words: &[Word],
    m: u64,
    n_dim: u64,
) -> Result<BigRational, MomentError> {
    connected_cumulant_exact_with_guard(words, m, n_dim, DEFAULT_SUM_GUARD)
}

pub fn connected_cumulant_exact_with_guard(
    words: &[Word],
    m: u64,
    n_dim: u64,
    guard: u32,
) -> Result<BigRational, MomentError> {
    check_guard(words, guard)?;
    if m == 0 || n_dim == 0 {
        return Err(MomentError::BadDimension);
    }
    let total = total_length(words) as usize;
    let profile = stabilizer_profile_cached(words, true);
    let num = profile_numerator(&profile, m, n_dim, total + words.len());
    let den = pow_table(n_dim, total + words.len())[total + words.len()].clone();
    Ok(BigRational::new(num, den))
}

/// First-order limit `E_w` and the coefficient polynomial of the
/// second-order offset for one word; the offset polynomial is to be
/// multiplied by the scale `c' = lim (M − cN)`.
pub fn fluctuation_limits(w: &Word) -> Result<LimitPair, MomentError> {
    let n = w.len() as u32;
    check_guard(std::slice::from_ref(w), crate::disc_nc::DEFAULT_NC_GUARD)?;
    let mut e_w = CPoly::zero();
    let mut e_w_prime = CPoly::zero();
    for tau in enumerate_disc_nc_with_guard(n, n)? {
        let symmetric = (1..=n).all(|m| {
            w.letters[(tau.apply(m) - 1) as usize] == w.letters[(m - 1) as usize]
        });
        if !symmetric {
            continue;
        }
        let k = tau.orbit_count();
        e_w.add_to_coeff(k, BigInt::one());
        e_w_prime.add_to_coeff(k - 1, BigInt::from(k));
    }
    Ok(LimitPair {
        e_w,
        e_w_prime_coeff: e_w_prime,
    })
}

/// Both sides of the exact finite-size covariance identity:
/// `N²·(E[tr X_v tr X_w] − E[tr X_v]·E[tr X_w])` on the left, the connected
/// permutation sum on the right. They agree for every `M, N`.
pub fn finite_n_covariance_identity(
    v: &Word,
    w: &Word,
    m: u64,
    n_dim: u64,
) -> Result<(BigRational, BigRational), MomentError> {
    finite_n_covariance_identity_with_guard(v, w, m, n_dim, DEFAULT_SUM_GUARD)
}

pub fn finite_n_covariance_identity_with_guard(
    v: &Word,
    w: &Word,
    m: u64,
    n_dim: u64,
    guard: u32,
) -> Result<(BigRational, BigRational), MomentError> {
    let words = [v.clone(), w.clone()];
    check_guard(&words, guard)?;
    if m == 0 || n_dim == 0 {
        return Err(MomentError::BadDimension);
    }
    let joint = wishart_trace_product_exact_with_guard(&words, m, n_dim, guard)?;
    let single_v =
        wishart_trace_product_exact_with_guard(std::slice::from_ref(v), m, n_dim, guard)?;
    let single_w =
        wishart_trace_product_exact_with_guard(std::slice::from_ref(w), m, n_dim, guard)?;
    let n_sq = BigRational::from(BigInt::from(n_dim) * BigInt::from(n_dim));
    let lhs = n_sq * (joint - single_v * single_w);

    // Σ over connected word-fixing τ of (M/N)^#(τ) N^(#(τ)+#(τ⁻¹γ)−(p+q)),
    // assembled as an integer polynomial over the common denominator N^(p+q).
    let total = total_length(&words) as usize;
    let profile = stabilizer_profile_cached(&words, true);
    let num = profile_numerator(&profile, m, n_dim, total + 2);
    let den = pow_table(n_dim, total)[total].clone();
    let rhs = BigRational::new(num, den);
    Ok((lhs, rhs))
}

/// All permutations fixing the joined word, materialized (the stabilizer of
/// the letter classes).
pub fn word_symmetric_perms(words: &[Word]) -> Result<Vec<Permutation>, MomentError> {
    word_symmetric_perms_with_guard(words, DEFAULT_SUM_GUARD)
}

pub fn word_symmetric_perms_with_guard(
    words: &[Word],
    guard: u32,
) -> Result<Vec<Permutation>, MomentError> {
    check_guard(words, guard)?;
    let letters = concatenated_letters(words);
    let ground = GroundSet::contiguous(letters.len() as u32);
    let mut out = Vec::new();
    for_each_stabilizer(&letters, &mut |images| {
        out.push(
            Permutation::from_images(
                ground.clone(),
                images.iter().map(|&i| (i + 1) as u32).collect(),
            )
            .expect("stabilizer images are bijections"),
        );
    });
    out.sort();
    Ok(out)
}
