//! Per-node forwarding state shared by every strategy: the Pending Interest
//! Table with in- and out-records, the longest-prefix-match FIB, an LRU
//! Content Store, and the advertisement store that retains received CAR/CA
//! filters with their arrival faces.

use std::collections::{BTreeMap, BTreeSet};

use ndn_bloom::BloomFilter;

use crate::message::Nonce;
use crate::name::Name;
use crate::types::{FaceId, SimTime};

/// Outcome of recording an arriving Interest-typed message in the PIT.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PitInsertOutcome {
    /// No entry existed; the caller decides how to forward.
    New,
    /// Entry existed and the (face, nonce) pair is fresh; the arrival was
    /// folded in and must not be forwarded again.
    Aggregated,
    /// The nonce was already recorded: a looped or replayed copy. Drop.
    DuplicateNonce,
}

#[derive(Clone, Debug)]
pub struct InRecord {
    pub face: FaceId,
    pub nonce: Nonce,
    pub arrival: SimTime,
}

#[derive(Clone, Debug)]
pub struct OutRecord {
    pub face: FaceId,
    pub sent: SimTime,
}

#[derive(Clone, Debug)]
pub struct PitEntry {
    pub name: Name,
    pub in_records: Vec<InRecord>,
    pub out_records: Vec<OutRecord>,
    /// Out-record faces that answered with a Nack for this entry.
    pub nacked: BTreeSet<FaceId>,
    pub expiry: SimTime,
}

impl PitEntry {
    pub fn has_out_record(&self, face: FaceId) -> bool {
        self.out_records.iter().any(|o| o.face == face)
    }

    pub fn has_in_face(&self, face: FaceId) -> bool {
        self.in_records.iter().any(|i| i.face == face)
    }

    pub fn all_out_records_nacked(&self) -> bool {
        !self.out_records.is_empty()
            && self.out_records.iter().all(|o| self.nacked.contains(&o.face))
    }
}

/// Pending Interest Table. Entry expiry is fixed at creation: aggregating a
/// later arrival does not push it out, so a stale entry off the Data path
/// cannot pin later requesters forever.
#[derive(Default, Debug)]
pub struct Pit {
    entries: BTreeMap<Name, PitEntry>,
}

impl Pit {
    pub fn insert(
        &mut self,
        name: &Name,
        face: FaceId,
        nonce: Nonce,
        now: SimTime,
        expiry: SimTime,
    ) -> PitInsertOutcome {
        match self.entries.get_mut(name) {
            Some(entry) => {
                if entry.in_records.iter().any(|r| r.nonce == nonce) {
                    return PitInsertOutcome::DuplicateNonce;
                }
                entry.in_records.push(InRecord { face, nonce, arrival: now });
                PitInsertOutcome::Aggregated
            }
            None => {
                self.entries.insert(
                    name.clone(),
                    PitEntry {
                        name: name.clone(),
                        in_records: vec![InRecord { face, nonce, arrival: now }],
                        out_records: Vec::new(),
                        nacked: BTreeSet::new(),
                        expiry,
                    },
                );
                PitInsertOutcome::New
            }
        }
    }

    pub fn add_out_record(&mut self, name: &Name, face: FaceId, now: SimTime) {
        if let Some(entry) = self.entries.get_mut(name) {
            if !entry.has_out_record(face) {
                entry.out_records.push(OutRecord { face, sent: now });
            }
        }
    }

    pub fn entry(&self, name: &Name) -> Option<&PitEntry> {
        self.entries.get(name)
    }

    pub fn entry_mut(&mut self, name: &Name) -> Option<&mut PitEntry> {
        self.entries.get_mut(name)
    }

    pub fn remove(&mut self, name: &Name) -> Option<PitEntry> {
        self.entries.remove(name)
    }

    /// Removes the entry if its recorded expiry matches the timer that
    /// fired; a refreshed entry ignores stale timers.
    pub fn remove_if_expired(&mut self, name: &Name, scheduled: SimTime) -> Option<PitEntry> {
        if self.entries.get(name).is_some_and(|e| e.expiry <= scheduled) {
            return self.entries.remove(name);
        }
        None
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Forwarding Information Base mapping name prefixes to next-hop face sets.
#[derive(Default, Debug)]
pub struct Fib {
    entries: BTreeMap<Name, BTreeSet<FaceId>>,
}

impl Fib {
    /// Longest-prefix match over the stored prefixes.
    pub fn lookup_lpm(&self, name: &Name) -> Option<(&Name, &BTreeSet<FaceId>)> {
        for prefix in name.prefixes().iter().rev() {
            if let Some((key, faces)) = self.entries.get_key_value(prefix) {
                return Some((key, faces));
            }
        }
        None
    }

    pub fn add_next_hops(&mut self, prefix: Name, faces: impl IntoIterator<Item = FaceId>) {
        let entry = self.entries.entry(prefix).or_default();
        entry.extend(faces);
    }

    /// Removes one next hop; deletes the entry when it empties. Missing
    /// entries and faces are a no-op so Nack-driven repair is idempotent.
    pub fn remove_next_hop(&mut self, prefix: &Name, face: FaceId) {
        if let Some(faces) = self.entries.get_mut(prefix) {
            faces.remove(&face);
            if faces.is_empty() {
                self.entries.remove(prefix);
            }
        }
    }

    pub fn entry(&self, prefix: &Name) -> Option<&BTreeSet<FaceId>> {
        self.entries.get(prefix)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// LRU Content Store; stores segment payload sizes only.
#[derive(Debug)]
pub struct ContentStore {
    capacity: usize,
    // Most recently used at the back.
    entries: Vec<(Name, u64)>,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        ContentStore { capacity, entries: Vec::new() }
    }

    pub fn insert(&mut self, name: Name, bytes: u64) {
        if self.capacity == 0 {
            return;
        }
        if let Some(pos) = self.entries.iter().position(|(n, _)| *n == name) {
            self.entries.remove(pos);
        } else if self.entries.len() == self.capacity {
            self.entries.remove(0);
        }
        self.entries.push((name, bytes));
    }

    /// A hit refreshes recency.
    pub fn lookup(&mut self, name: &Name) -> Option<u64> {
        let pos = self.entries.iter().position(|(n, _)| n == name)?;
        let entry = self.entries.remove(pos);
        let bytes = entry.1;
        self.entries.push(entry);
        Some(bytes)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum AdvertKind {
    Car,
    Ca,
}

/// One retained advertisement-class message, keyed by its origin name.
#[derive(Clone, Debug)]
pub struct AdvertEntry {
    pub origin: Name,
    pub kind: AdvertKind,
    pub filter: BloomFilter,
    /// Faces the message arrived over; CA arrival faces become FIB next
    /// hops at demand time.
    pub faces: BTreeSet<FaceId>,
    pub expiry: SimTime,
    pub stored_bytes: u64,
}

/// Received CAR/CA messages retained with their arrival faces. This plays
/// the role the reference forwarding daemon's PIT plays for advertisement
/// Interests, as a dedicated table with the same face semantics.
#[derive(Default, Debug)]
pub struct AdvertStore {
    entries: BTreeMap<Name, AdvertEntry>,
}

impl AdvertStore {
    /// Inserts a new entry or merges a further arrival face into an
    /// existing one, keeping the later expiry.
    pub fn insert_or_merge(
        &mut self,
        origin: Name,
        kind: AdvertKind,
        filter: &BloomFilter,
        face: FaceId,
        expiry: SimTime,
    ) {
        let stored_bytes = u64::from(filter.params().payload_bytes());
        match self.entries.get_mut(&origin) {
            Some(entry) => {
                entry.faces.insert(face);
                entry.expiry = entry.expiry.max(expiry);
            }
            None => {
                self.entries.insert(
                    origin.clone(),
                    AdvertEntry {
                        origin,
                        kind,
                        filter: filter.clone(),
                        faces: BTreeSet::from([face]),
                        expiry,
                        stored_bytes,
                    },
                );
            }
        }
    }

    pub fn entry(&self, origin: &Name) -> Option<&AdvertEntry> {
        self.entries.get(origin)
    }

    pub fn remove_if_expired(&mut self, origin: &Name, scheduled: SimTime) -> bool {
        if self.entries.get(origin).is_some_and(|e| e.expiry <= scheduled) {
            self.entries.remove(origin);
            return true;
        }
        false
    }

    pub fn prune(&mut self, now: SimTime) {
        self.entries.retain(|_, e| e.expiry > now);
    }

    /// Live CA entries in deterministic (name) order.
    pub fn live_ca_entries(&self, now: SimTime) -> impl Iterator<Item = &AdvertEntry> {
        self.entries
            .values()
            .filter(move |e| e.kind == AdvertKind::Ca && e.expiry > now)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Bytes of routing information currently held; the storage metric
    /// integrates this over time.
    pub fn total_bytes(&self) -> u64 {
        self.entries.values().map(|e| e.stored_bytes).sum()
    }
}
