//! Deterministic event queue. Events pop in (time, seq) order where `seq`
//! is assigned at scheduling, so runs with the same inputs replay the same
//! order regardless of heap internals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::message::Message;
use crate::name::Name;
use crate::types::{FaceId, SimTime};

#[derive(Clone, Debug)]
pub enum EventKind {
    MsgArrival { node: usize, face: FaceId, msg: Message },
    Timer { node: usize, timer: TimerKind },
    WorkloadTick { client: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TimerKind {
    /// The per-face aggregation threshold elapsed; flush the buffer.
    AggFlush { face: FaceId },
    /// A PIT entry reached its lifetime. Guarded by the recorded expiry so
    /// refreshed entries ignore stale timers.
    PitExpiry { name: Name, expiry: SimTime },
    /// A stored advertisement reached its lifetime.
    AdvertExpiry { name: Name, expiry: SimTime },
    /// Push-based servers re-advertise their catalog at this cadence.
    AdvertRefresh,
}

#[derive(Debug)]
struct Scheduled {
    time: SimTime,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl Eq for Scheduled {}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the earliest first.
        (other.time, other.seq).cmp(&(self.time, self.seq))
    }
}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default, Debug)]
pub struct EventQueue {
    heap: BinaryHeap<Scheduled>,
    next_seq: u64,
}

pub struct Event {
    pub time: SimTime,
    pub kind: EventKind,
}

impl EventQueue {
    pub fn schedule(&mut self, time: SimTime, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Scheduled { time, seq, kind });
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop().map(|s| Event { time: s.time, kind: s.kind })
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_time_then_seq_order() {
        let mut q = EventQueue::default();
        q.schedule(SimTime::from_ns(20), EventKind::WorkloadTick { client: 0 });
        q.schedule(SimTime::from_ns(10), EventKind::WorkloadTick { client: 1 });
        q.schedule(SimTime::from_ns(10), EventKind::WorkloadTick { client: 2 });
        let order: Vec<(u64, usize)> = std::iter::from_fn(|| q.pop())
            .map(|e| match e.kind {
                EventKind::WorkloadTick { client } => (e.time.ns(), client),
                _ => unreachable!(),
            })
            .collect();
        // Ties broken by scheduling order.
        assert_eq!(order, vec![(10, 1), (10, 2), (20, 0)]);
    }
}
