//! Message variants exchanged on the wire. Payloads are modeled, not
//! serialized: Data carries only its byte size, advertisement messages carry
//! the filter value directly, and `size_bytes` is what the link layer
//! accounts for.

use ndn_bloom::BloomFilter;
use serde::Serialize;

use crate::name::Name;
use crate::types::SimDuration;

pub type Nonce = u64;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum MessageKind {
    Interest,
    Data,
    NackNoData,
    Car,
    Ca,
}

impl MessageKind {
    pub fn label(self) -> &'static str {
        match self {
            MessageKind::Interest => "interest",
            MessageKind::Data => "data",
            MessageKind::NackNoData => "nack",
            MessageKind::Car => "car",
            MessageKind::Ca => "ca",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    None,
    /// Data content, size only.
    Data { bytes: u64 },
    /// The advertisement filter of a CAR or CA.
    Filter(BloomFilter),
}

/// Accounting sizes for each message kind, all configurable.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct WireSizes {
    pub interest_bytes: u64,
    pub data_header_bytes: u64,
    pub data_payload_bytes: u64,
    pub nack_bytes: u64,
    pub advert_header_bytes: u64,
}

impl Default for WireSizes {
    fn default() -> Self {
        WireSizes {
            interest_bytes: 40,
            data_header_bytes: 40,
            data_payload_bytes: 1024,
            nack_bytes: 40,
            advert_header_bytes: 40,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Message {
    pub kind: MessageKind,
    pub name: Name,
    pub nonce: Nonce,
    pub lifetime: SimDuration,
    pub payload: Payload,
    pub size_bytes: u64,
}

impl Message {
    pub fn interest(name: Name, nonce: Nonce, lifetime: SimDuration, sizes: &WireSizes) -> Self {
        Message {
            kind: MessageKind::Interest,
            name,
            nonce,
            lifetime,
            payload: Payload::None,
            size_bytes: sizes.interest_bytes,
        }
    }

    pub fn data(name: Name, nonce: Nonce, payload_bytes: u64, sizes: &WireSizes) -> Self {
        Message {
            kind: MessageKind::Data,
            name,
            nonce,
            lifetime: SimDuration::ZERO,
            payload: Payload::Data { bytes: payload_bytes },
            size_bytes: sizes.data_header_bytes + payload_bytes,
        }
    }

    /// A "No Data" Nack echoes the name and nonce of the Interest it
    /// answers.
    pub fn nack_no_data(interest: &Message, sizes: &WireSizes) -> Self {
        Message {
            kind: MessageKind::NackNoData,
            name: interest.name.clone(),
            nonce: interest.nonce,
            lifetime: SimDuration::ZERO,
            payload: Payload::None,
            size_bytes: sizes.nack_bytes,
        }
    }

    pub fn advert(
        kind: MessageKind,
        name: Name,
        filter: BloomFilter,
        nonce: Nonce,
        lifetime: SimDuration,
        sizes: &WireSizes,
    ) -> Self {
        debug_assert!(matches!(kind, MessageKind::Car | MessageKind::Ca));
        let size_bytes = sizes.advert_header_bytes + u64::from(filter.params().payload_bytes());
        Message { kind, name, nonce, lifetime, payload: Payload::Filter(filter), size_bytes }
    }

    pub fn filter(&self) -> Option<&BloomFilter> {
        match &self.payload {
            Payload::Filter(f) => Some(f),
            _ => None,
        }
    }

    pub fn data_bytes(&self) -> Option<u64> {
        match &self.payload {
            Payload::Data { bytes } => Some(*bytes),
            _ => None,
        }
    }
}

/// `/CAR/<origin>/<seq>`
pub fn car_name(origin: &str, seq: u64) -> Name {
    Name::from_components(["CAR".to_string(), origin.to_string(), seq.to_string()])
        .expect("non-empty components")
}

/// `/CAR/aggregated/<router>/<seq>`
pub fn car_aggregated_name(router: &str, seq: u64) -> Name {
    Name::from_components([
        "CAR".to_string(),
        "aggregated".to_string(),
        router.to_string(),
        seq.to_string(),
    ])
    .expect("non-empty components")
}

/// `/CA/<server>/<seq>`
pub fn ca_name(server: &str, seq: u64) -> Name {
    Name::from_components(["CA".to_string(), server.to_string(), seq.to_string()])
        .expect("non-empty components")
}

/// `/CA/aggregated/<router>/<seq>`
pub fn ca_aggregated_name(router: &str, seq: u64) -> Name {
    Name::from_components([
        "CA".to_string(),
        "aggregated".to_string(),
        router.to_string(),
        seq.to_string(),
    ])
    .expect("non-empty components")
}

pub fn aggregated_advert_name(kind: MessageKind, router: &str, seq: u64) -> Name {
    match kind {
        MessageKind::Car => car_aggregated_name(router, seq),
        MessageKind::Ca => ca_aggregated_name(router, seq),
        _ => unreachable!("only adverts aggregate"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndn_bloom::{BfParams, BloomFilter, DEFAULT_SEED};

    #[test]
    fn advert_names_match_the_wire_shapes() {
        assert_eq!(car_name("C1", 7).to_canonical(), "/CAR/C1/7");
        assert_eq!(car_aggregated_name("R3", 2).to_canonical(), "/CAR/aggregated/R3/2");
        assert_eq!(ca_name("S2", 0).to_canonical(), "/CA/S2/0");
        assert_eq!(ca_aggregated_name("R4", 5).to_canonical(), "/CA/aggregated/R4/5");
    }

    #[test]
    fn sizes_follow_configured_accounting() {
        let sizes = WireSizes::default();
        let name = Name::parse("/a/b/s0").unwrap();
        let i = Message::interest(name.clone(), 1, SimDuration::from_secs(4), &sizes);
        assert_eq!(i.size_bytes, 40);
        let d = Message::data(name.clone(), 1, sizes.data_payload_bytes, &sizes);
        assert_eq!(d.size_bytes, 40 + 1024);
        let n = Message::nack_no_data(&i, &sizes);
        assert_eq!(n.size_bytes, 40);
        assert_eq!(n.name, i.name);
        assert_eq!(n.nonce, i.nonce);

        // At the 716-byte design point an advert costs 40 + 716 bytes.
        let params = BfParams::for_design(1000, 0.0638, DEFAULT_SEED).unwrap();
        let car = Message::advert(
            MessageKind::Car,
            car_name("c1", 0),
            BloomFilter::new(params),
            9,
            SimDuration::from_secs(4),
            &sizes,
        );
        assert_eq!(car.size_bytes, 40 + 716);
        assert!(car.filter().is_some());
    }
}
