//! Point-to-point links with per-direction FIFO serialization. Delivery
//! time is `max(now, busy_until) + size_bits/bandwidth + propagation`, all
//! in integer nanoseconds.

use crate::types::{SimDuration, SimTime};

/// Ceiling division keeps the serialization time exact in nanoseconds; the
/// analytic round-trip fixtures mirror this formula.
pub fn serialization_ns(bits: u64, bandwidth_bps: u64) -> u64 {
    let num = u128::from(bits) * 1_000_000_000u128;
    let den = u128::from(bandwidth_bps.max(1));
    num.div_ceil(den) as u64
}

#[derive(Debug)]
pub struct LinkState {
    /// Effective bandwidth after capacity scaling.
    pub bandwidth_bps: u64,
    pub propagation: SimDuration,
    busy_until: [SimTime; 2],
}

impl LinkState {
    pub fn new(bandwidth_bps: u64, propagation: SimDuration, capacity_scale: f64) -> Self {
        let scaled = ((bandwidth_bps as f64) * capacity_scale).round().max(1.0) as u64;
        LinkState { bandwidth_bps: scaled, propagation, busy_until: [SimTime::ZERO; 2] }
    }

    /// Queues one message in the given direction and returns its delivery
    /// time at the far end.
    pub fn transmit(&mut self, direction: usize, now: SimTime, size_bytes: u64) -> SimTime {
        let start = now.max(self.busy_until[direction]);
        let ser = SimDuration::from_ns(serialization_ns(size_bytes * 8, self.bandwidth_bps));
        self.busy_until[direction] = start + ser;
        start + ser + self.propagation
    }
}
