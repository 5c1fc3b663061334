//! Bloom filters for content-name advertisement, plus the aggregation
//! algebra routers need when they union advertisement filters in flight:
//! identity and subset tests on raw bit vectors, a conservative inserted
//! element counter, capacity-bounded union admission, and a bit-exact wire
//! encoding.
//!
//! All nodes that want to combine filters must build them with identical
//! [`BfParams`] (same size, hash count, and hash seed). Hashing is double
//! hashing over two 64-bit digests of the key, both derived from a single
//! seeded SHA-256 digest, so bit patterns are reproducible across runs and
//! platforms.
//!
//! For protocol testing there is an exact-set oracle mode
//! ([`BloomFilter::new_exact`]): the filter keeps the inserted keys next to
//! the bit vector and answers membership and algebra queries from the exact
//! set, so the false positive probability is effectively zero while the
//! interface and the wire size stay the same.

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Well-known default hash seed shared by all nodes.
pub const DEFAULT_SEED: &[u8] = b"NDN";

#[derive(Debug, Error, PartialEq)]
pub enum BloomError {
    #[error("false positive probability must be in (0, 1), got {0}")]
    InvalidProbability(f64),
    #[error("capacity must be at least one element")]
    ZeroCapacity,
    #[error("bit vector must be at least one bit")]
    ZeroBits,
    #[error("bit vector of {m_bits} bits cannot hold any element at p={p}")]
    NoCapacity { m_bits: u32, p: f64 },
    #[error("filters have mismatched parameters and cannot be combined")]
    ParamsMismatch,
    #[error("encoded filter is malformed: {0}")]
    Decode(String),
}

/// Bit vector size and hash count for holding `n` elements at false
/// positive probability `p`: `m = ceil(-n ln p / (ln 2)^2)`,
/// `k = round(m/n * ln 2)` clamped to at least one hash.
pub fn size_for(n: u32, p: f64) -> Result<(u32, u32), BloomError> {
    if n == 0 {
        return Err(BloomError::ZeroCapacity);
    }
    check_probability(p)?;
    let n_f = f64::from(n);
    let ln2 = std::f64::consts::LN_2;
    let m = (-n_f * p.ln() / (ln2 * ln2)).ceil();
    let m_bits = m as u32;
    let k = ((f64::from(m_bits) / n_f) * ln2).round().max(1.0) as u32;
    Ok((m_bits, k))
}

/// Inverse of [`size_for`]: the largest element count an `m_bits` vector
/// supports at false positive probability `p`, rounded down.
pub fn capacity_for(m_bits: u32, p: f64) -> Result<u32, BloomError> {
    if m_bits == 0 {
        return Err(BloomError::ZeroBits);
    }
    check_probability(p)?;
    let ln2 = std::f64::consts::LN_2;
    let n = (-f64::from(m_bits) * ln2 * ln2 / p.ln()).floor();
    Ok(n as u32)
}

fn check_probability(p: f64) -> Result<(), BloomError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(BloomError::InvalidProbability(p));
    }
    Ok(())
}

/// Shared filter geometry. Two filters are combinable only if their
/// parameters are equal field by field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfParams {
    m_bits: u32,
    k: u32,
    seed: Vec<u8>,
    n_max: u32,
}

impl BfParams {
    /// Parameters sized for `n` elements at probability `p`. The admissible
    /// capacity is re-derived from the ceiled bit count, so it is at least
    /// `n`.
    pub fn for_design(n: u32, p: f64, seed: impl Into<Vec<u8>>) -> Result<Self, BloomError> {
        let (m_bits, k) = size_for(n, p)?;
        let n_max = capacity_for(m_bits, p)?;
        Ok(Self::assemble(m_bits, k, seed.into(), n_max, p)?)
    }

    /// Parameters for a fixed bit vector size; `k` and the capacity follow
    /// from `(m_bits, p)`.
    pub fn from_geometry(m_bits: u32, p: f64, seed: impl Into<Vec<u8>>) -> Result<Self, BloomError> {
        if m_bits == 0 {
            return Err(BloomError::ZeroBits);
        }
        check_probability(p)?;
        let n_max = capacity_for(m_bits, p)?;
        if n_max == 0 {
            return Err(BloomError::NoCapacity { m_bits, p });
        }
        let ln2 = std::f64::consts::LN_2;
        let k = ((f64::from(m_bits) / f64::from(n_max)) * ln2).round().max(1.0) as u32;
        Self::assemble(m_bits, k, seed.into(), n_max, p)
    }

    fn assemble(m_bits: u32, k: u32, seed: Vec<u8>, n_max: u32, p: f64) -> Result<Self, BloomError> {
        if n_max == 0 {
            return Err(BloomError::NoCapacity { m_bits, p });
        }
        debug_assert!(m_bits >= k && k >= 1);
        Ok(Self { m_bits, k, seed, n_max })
    }

    pub fn m_bits(&self) -> u32 {
        self.m_bits
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn seed(&self) -> &[u8] {
        &self.seed
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Bytes the packed bit vector occupies on the wire.
    pub fn payload_bytes(&self) -> u32 {
        (self.m_bits + 7) / 8
    }
}

/// Outcome of the pre-union admission check two filters go through before
/// a router folds them together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateDecision {
    /// Bit vectors are identical; either filter stands for both.
    Identical,
    /// `b` is contained in `a`; `a` already covers the pair.
    UseA,
    /// `a` is contained in `b`; `b` already covers the pair.
    UseB,
    /// Neither contains the other and the summed counts fit the capacity.
    Union,
    /// Folding would exceed the capacity bound; keep the filters separate.
    Refuse,
}

/// A fixed-size Bloom filter with a conservative inserted-element counter.
///
/// `count` goes up by one on every insert, including duplicates, and is
/// never decremented; unions add the two counts. That makes it an upper
/// bound on the number of distinct insertions, which is what the capacity
/// admission check needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BloomFilter {
    params: BfParams,
    bits: Vec<u8>,
    count: u32,
    exact: Option<BTreeSet<Vec<u8>>>,
}

impl BloomFilter {
    pub fn new(params: BfParams) -> Self {
        let len = params.payload_bytes() as usize;
        Self { params, bits: vec![0u8; len], count: 0, exact: None }
    }

    /// Oracle-mode filter: maintains the same bit vector but answers
    /// membership and algebra queries from the exact key set (p = 0).
    pub fn new_exact(params: BfParams) -> Self {
        let mut f = Self::new(params);
        f.exact = Some(BTreeSet::new());
        f
    }

    pub fn params(&self) -> &BfParams {
        &self.params
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn bit_vector(&self) -> &[u8] {
        &self.bits
    }

    pub fn popcount(&self) -> u32 {
        self.bits.iter().map(|b| b.count_ones()).sum()
    }

    fn digests(&self, key: &[u8]) -> (u64, u64) {
        let mut h = Sha256::new();
        h.update(&self.params.seed);
        h.update(key);
        let d = h.finalize();
        let h1 = u64::from_le_bytes(d[0..8].try_into().unwrap());
        let h2 = u64::from_le_bytes(d[8..16].try_into().unwrap());
        (h1, h2)
    }

    fn bit_indices(&self, key: &[u8]) -> impl Iterator<Item = u32> + '_ {
        let (h1, h2) = self.digests(key);
        let m = u64::from(self.params.m_bits);
        (0..u64::from(self.params.k))
            .map(move |i| (h1.wrapping_add(i.wrapping_mul(h2)) % m) as u32)
    }

    pub fn insert(&mut self, key: impl AsRef<[u8]>) {
        let key = key.as_ref();
        let indices: Vec<u32> = self.bit_indices(key).collect();
        for idx in indices {
            self.bits[(idx / 8) as usize] |= 1 << (idx % 8);
        }
        self.count = self.count.saturating_add(1);
        if let Some(set) = &mut self.exact {
            set.insert(key.to_vec());
        }
    }

    pub fn contains(&self, key: impl AsRef<[u8]>) -> bool {
        let key = key.as_ref();
        if let Some(set) = &self.exact {
            return set.contains(key);
        }
        self.bit_indices(key)
            .all(|idx| self.bits[(idx / 8) as usize] & (1 << (idx % 8)) != 0)
    }

    fn check_combinable(&self, other: &Self) -> Result<(), BloomError> {
        if self.params != other.params || self.exact.is_some() != other.exact.is_some() {
            return Err(BloomError::ParamsMismatch);
        }
        Ok(())
    }

    /// XOR identity test: true iff the bit vectors coincide. In oracle mode
    /// the exact sets are compared instead.
    pub fn is_identical(&self, other: &Self) -> Result<bool, BloomError> {
        self.check_combinable(other)?;
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return Ok(a == b);
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .all(|(x, y)| x ^ y == 0))
    }

    /// Intersection subset test: true iff `self AND other` equals `self`,
    /// i.e. every set bit of `self` is set in `other`.
    pub fn is_subset(&self, other: &Self) -> Result<bool, BloomError> {
        self.check_combinable(other)?;
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return Ok(a.is_subset(b));
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .all(|(x, y)| x & y == *x))
    }

    /// Bitwise OR of the vectors; the counts add up as a conservative upper
    /// bound on the combined element count.
    pub fn union(&self, other: &Self) -> Result<Self, BloomError> {
        self.check_combinable(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(x, y)| x | y)
            .collect();
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.union(b).cloned().collect()),
            _ => None,
        };
        Ok(Self {
            params: self.params.clone(),
            bits,
            count: self.count.saturating_add(other.count),
            exact,
        })
    }

    /// Admission check applied before folding two filters, in this order:
    /// identical, subset either way, then union only while the summed
    /// counts stay below the capacity.
    pub fn may_aggregate(&self, other: &Self) -> Result<AggregateDecision, BloomError> {
        if self.is_identical(other)? {
            return Ok(AggregateDecision::Identical);
        }
        if self.is_subset(other)? {
            return Ok(AggregateDecision::UseB);
        }
        if other.is_subset(self)? {
            return Ok(AggregateDecision::UseA);
        }
        if u64::from(self.count) + u64::from(other.count) < u64::from(self.params.n_max) {
            Ok(AggregateDecision::Union)
        } else {
            Ok(AggregateDecision::Refuse)
        }
    }

    /// Wire encoding: `m_bits`, `k`, `count` as u32 little-endian, the seed
    /// with a u32 length prefix, then the bit vector packed little-endian
    /// (bit `j` of byte `i` is index `8i + j`).
    pub fn to_bytes(&self) -> Vec<u8> {
        let seed = &self.params.seed;
        let mut out = Vec::with_capacity(16 + seed.len() + self.bits.len());
        out.extend_from_slice(&self.params.m_bits.to_le_bytes());
        out.extend_from_slice(&self.params.k.to_le_bytes());
        out.extend_from_slice(&self.count.to_le_bytes());
        out.extend_from_slice(&(seed.len() as u32).to_le_bytes());
        out.extend_from_slice(seed);
        out.extend_from_slice(&self.bits);
        out
    }

    /// Decodes a filter encoded by [`to_bytes`](Self::to_bytes). The caller
    /// supplies the expected parameters; the header must match them. The
    /// decoded filter is always in hashed mode.
    pub fn from_bytes(bytes: &[u8], params: &BfParams) -> Result<Self, BloomError> {
        let take_u32 = |at: usize| -> Result<u32, BloomError> {
            bytes
                .get(at..at + 4)
                .map(|s| u32::from_le_bytes(s.try_into().unwrap()))
                .ok_or_else(|| BloomError::Decode("truncated header".into()))
        };
        let m_bits = take_u32(0)?;
        let k = take_u32(4)?;
        let count = take_u32(8)?;
        let seed_len = take_u32(12)? as usize;
        let seed = bytes
            .get(16..16 + seed_len)
            .ok_or_else(|| BloomError::Decode("truncated seed".into()))?;
        if m_bits != params.m_bits || k != params.k || seed != params.seed.as_slice() {
            return Err(BloomError::ParamsMismatch);
        }
        let bits_at = 16 + seed_len;
        let want = params.payload_bytes() as usize;
        let bits = bytes
            .get(bits_at..bits_at + want)
            .ok_or_else(|| BloomError::Decode("truncated bit vector".into()))?;
        if bytes.len() != bits_at + want {
            return Err(BloomError::Decode("trailing bytes".into()));
        }
        Ok(Self { params: params.clone(), bits: bits.to_vec(), count, exact: None })
    }
}

impl fmt::Display for BloomFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BloomFilter(m={}, k={}, count={}, ones={}{})",
            self.params.m_bits,
            self.params.k,
            self.count,
            self.popcount(),
            if self.exact.is_some() { ", exact" } else { "" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BfParams {
        BfParams::for_design(1000, 0.0638, DEFAULT_SEED).unwrap()
    }

    #[test]
    fn sizing_matches_design_point() {
        // m = ceil(1000 * 2.752002 / 0.480453) = 5728 bits = 716 bytes, k = 4
        assert_eq!(size_for(1000, 0.0638).unwrap(), (5728, 4));
        assert_eq!(params().payload_bytes(), 716);
        assert_eq!(size_for(1, 0.5).unwrap(), (2, 1));
    }

    #[test]
    fn capacity_inverts_sizing() {
        assert_eq!(capacity_for(5728, 0.0638).unwrap(), 1000);
        assert_eq!(capacity_for(2, 0.5).unwrap(), 1);
        // Exact floor(-m (ln2)^2 / ln p) values for the wider p settings.
        assert_eq!(capacity_for(5728, 0.1276).unwrap(), 1336);
        assert_eq!(capacity_for(5728, 0.2552).unwrap(), 2015);
        // Round trip: sizing for n then inverting lands back on n.
        let (m, _) = size_for(1000, 0.0638).unwrap();
        assert_eq!(capacity_for(m, 0.0638).unwrap(), 1000);
    }

    #[test]
    fn sizing_rejects_bad_inputs() {
        assert_eq!(size_for(0, 0.5), Err(BloomError::ZeroCapacity));
        assert!(matches!(size_for(10, 0.0), Err(BloomError::InvalidProbability(_))));
        assert!(matches!(size_for(10, 1.0), Err(BloomError::InvalidProbability(_))));
        assert!(matches!(capacity_for(0, 0.5), Err(BloomError::ZeroBits)));
        assert!(matches!(capacity_for(100, -0.1), Err(BloomError::InvalidProbability(_))));
    }

    #[test]
    fn insert_then_contains() {
        let mut bf = BloomFilter::new(params());
        assert!(!bf.contains("/a/b"));
        bf.insert("/a/b");
        assert!(bf.contains("/a/b"));
    }

    #[test]
    fn duplicate_insert_is_bit_idempotent_but_counted() {
        let mut bf = BloomFilter::new(params());
        bf.insert("/a/b");
        let bits = bf.bit_vector().to_vec();
        bf.insert("/a/b");
        assert_eq!(bf.bit_vector(), &bits[..]);
        assert_eq!(bf.count(), 2);
    }

    #[test]
    fn empty_filter_contains_nothing_saturated_contains_everything() {
        let bf = BloomFilter::new(params());
        assert!(!bf.contains("/anything"));
        let mut sat = BloomFilter::new(params());
        sat.bits.iter_mut().for_each(|b| *b = 0xff);
        assert!(sat.contains("/anything"));
        assert!(sat.contains("/else"));
    }

    #[test]
    fn popcount_bounded_by_count_times_k() {
        let mut bf = BloomFilter::new(params());
        for i in 0..50 {
            bf.insert(format!("/n/{i}"));
        }
        assert!(bf.popcount() <= bf.count() * bf.params().k());
        assert!(bf.popcount() <= bf.params().m_bits());
    }

    #[test]
    fn identity_ignores_insertion_order() {
        let mut a = BloomFilter::new(params());
        let mut b = BloomFilter::new(params());
        for name in ["/x", "/y", "/z"] {
            a.insert(name);
        }
        for name in ["/z", "/x", "/y"] {
            b.insert(name);
        }
        assert!(a.is_identical(&b).unwrap());
        let mut c = BloomFilter::new(params());
        c.insert("/w");
        assert!(!a.is_identical(&c).unwrap());
        assert!(a.is_identical(&a.clone()).unwrap());
    }

    #[test]
    fn subset_follows_set_inclusion() {
        let empty = BloomFilter::new(params());
        let mut small = BloomFilter::new(params());
        small.insert("/a");
        let mut big = small.clone();
        big.insert("/b");
        assert!(empty.is_subset(&small).unwrap());
        assert!(small.is_subset(&big).unwrap());
        assert!(!big.is_subset(&small).unwrap());
    }

    #[test]
    fn union_is_or_and_counts_add() {
        let mut a = BloomFilter::new(params());
        a.insert("/x");
        let empty = BloomFilter::new(params());
        let u = a.union(&empty).unwrap();
        assert_eq!(u.bit_vector(), a.bit_vector());
        assert_eq!(u.count(), a.count());

        let mut b = BloomFilter::new(params());
        b.insert("/y");
        let u = a.union(&b).unwrap();
        assert!(u.contains("/x") && u.contains("/y"));
        assert_eq!(u.count(), 2);
    }

    #[test]
    fn union_count_is_sum_at_scale() {
        let mut a = BloomFilter::new(params());
        let mut b = BloomFilter::new(params());
        for i in 0..600 {
            a.insert(format!("/a/{i}"));
        }
        for i in 0..500 {
            b.insert(format!("/b/{i}"));
        }
        assert_eq!(a.union(&b).unwrap().count(), 1100);
        // 600 + 500 >= n_max = 1000, so admission refuses the fold.
        assert_eq!(a.may_aggregate(&b).unwrap(), AggregateDecision::Refuse);
    }

    #[test]
    fn may_aggregate_decision_order() {
        let mut a = BloomFilter::new(params());
        a.insert("/a");
        assert_eq!(a.may_aggregate(&a.clone()).unwrap(), AggregateDecision::Identical);

        let mut sup = a.clone();
        sup.insert("/b");
        assert_eq!(a.may_aggregate(&sup).unwrap(), AggregateDecision::UseB);
        assert_eq!(sup.may_aggregate(&a).unwrap(), AggregateDecision::UseA);

        let mut x = BloomFilter::new(params());
        let mut y = BloomFilter::new(params());
        for i in 0..100 {
            x.insert(format!("/x/{i}"));
            y.insert(format!("/y/{i}"));
        }
        assert_eq!(x.may_aggregate(&y).unwrap(), AggregateDecision::Union);
        assert_eq!(x.union(&y).unwrap().count(), 200);
    }

    #[test]
    fn params_mismatch_is_rejected() {
        let a = BloomFilter::new(params());
        let b = BloomFilter::new(BfParams::for_design(1000, 0.2552, DEFAULT_SEED).unwrap());
        assert_eq!(a.is_identical(&b), Err(BloomError::ParamsMismatch));
        assert_eq!(a.is_subset(&b), Err(BloomError::ParamsMismatch));
        assert_eq!(a.union(&b).unwrap_err(), BloomError::ParamsMismatch);
        let exact = BloomFilter::new_exact(params());
        assert_eq!(a.union(&exact).unwrap_err(), BloomError::ParamsMismatch);
    }

    #[test]
    fn exact_mode_has_no_false_positives_and_same_wire_shape() {
        let mut bf = BloomFilter::new_exact(params());
        bf.insert("/a/b");
        assert!(bf.contains("/a/b"));
        assert!(!bf.contains("/a/c"));
        // The bit vector is still maintained so accounting sizes match.
        assert!(bf.popcount() > 0);
        assert_eq!(bf.to_bytes().len(), 16 + 3 + 716);
    }

    #[test]
    fn exact_mode_algebra_uses_sets() {
        let mut a = BloomFilter::new_exact(params());
        let mut b = BloomFilter::new_exact(params());
        a.insert("/a");
        b.insert("/a");
        b.insert("/b");
        assert!(a.is_subset(&b).unwrap());
        assert!(!b.is_subset(&a).unwrap());
        let u = a.union(&b).unwrap();
        assert!(u.contains("/a") && u.contains("/b") && !u.contains("/c"));
        assert_eq!(u.count(), 3);
    }

    #[test]
    fn wire_roundtrip_and_bit_order() {
        let p = BfParams::from_geometry(16, 0.5, b"s".to_vec()).unwrap();
        let mut bf = BloomFilter::new(p.clone());
        bf.insert("/k");
        let bytes = bf.to_bytes();
        // Header: m, k, count, seed length, seed "s", then 2 payload bytes.
        assert_eq!(&bytes[0..4], &16u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &1u32.to_le_bytes());
        assert_eq!(&bytes[16..17], b"s");
        assert_eq!(bytes.len(), 17 + 2);
        let back = BloomFilter::from_bytes(&bytes, &p).unwrap();
        assert_eq!(back, bf);

        // Bit j of byte i addresses index 8i + j.
        let mut single = BloomFilter::new(p.clone());
        single.bits[1] = 0b0000_0100; // index 10
        let encoded = single.to_bytes();
        assert_eq!(encoded[18], 0b0000_0100);
    }

    #[test]
    fn from_bytes_rejects_garbage() {
        let p = params();
        let bf = BloomFilter::new(p.clone());
        let mut bytes = bf.to_bytes();
        bytes.truncate(10);
        assert!(matches!(BloomFilter::from_bytes(&bytes, &p), Err(BloomError::Decode(_))));
        let other = BfParams::for_design(1000, 0.1276, DEFAULT_SEED).unwrap();
        assert_eq!(
            BloomFilter::from_bytes(&bf.to_bytes(), &other),
            Err(BloomError::ParamsMismatch)
        );
    }

    #[test]
    fn hashing_is_stable() {
        // Frozen bit indices for "/a/b" under the default seed; a change
        // here breaks cross-version reproducibility of every golden file.
        let bf = BloomFilter::new(params());
        let idx: Vec<u32> = bf.bit_indices(b"/a/b").collect();
        assert_eq!(idx, vec![3854, 5364, 4602, 3840]);
    }
}
