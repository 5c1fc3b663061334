//! Line-oriented topology files and endpoint placement.
//!
//! Format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! node <id> <client|server|router>
//! link <idA> <idB> <bandwidth_bps> <propagation_ns>
//! ```
//!
//! Face ids are dense per node, assigned in link declaration order. A file
//! may carry routers only; servers and clients are then attached to random
//! routers by a seeded placement step so the same master seed always yields
//! the same layout.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::types::{FaceId, SimDuration};

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: link endpoint '{endpoint}' is not a declared node")]
    DanglingEndpoint { line: usize, endpoint: String },
    #[error("line {line}: duplicate node id '{id}'")]
    DuplicateNode { line: usize, id: String },
    #[error("topology is not connected: node '{0}' is unreachable")]
    Disconnected(String),
    #[error("topology needs at least one {0} node")]
    MissingRole(&'static str),
    #[error("topology has no nodes")]
    Empty,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum NodeRole {
    Client,
    Server,
    Router,
}

impl NodeRole {
    fn parse(s: &str) -> Option<NodeRole> {
        match s {
            "client" => Some(NodeRole::Client),
            "server" => Some(NodeRole::Server),
            "router" => Some(NodeRole::Router),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TopoNode {
    pub label: String,
    pub role: NodeRole,
}

#[derive(Clone, Debug)]
pub struct LinkSpec {
    pub a: usize,
    pub b: usize,
    pub face_a: FaceId,
    pub face_b: FaceId,
    pub bandwidth_bps: u64,
    pub propagation: SimDuration,
}

/// One neighbor reachable through a face.
#[derive(Clone, Copy, Debug)]
pub struct FaceTarget {
    pub link: usize,
    /// 0 if this node is endpoint `a` of the link, else 1.
    pub direction: usize,
    pub peer: usize,
    pub peer_face: FaceId,
}

#[derive(Debug, Default)]
pub struct Topology {
    pub nodes: Vec<TopoNode>,
    pub links: Vec<LinkSpec>,
    /// Per node, indexed by face id.
    pub faces: Vec<Vec<FaceTarget>>,
}

impl Topology {
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut topo = Topology::default();
        let mut by_label: BTreeMap<String, usize> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let fields: Vec<&str> = stripped.split_whitespace().collect();
            match fields[0] {
                "node" => {
                    if fields.len() != 3 {
                        return Err(TopologyError::Parse {
                            line,
                            msg: format!("expected 'node <id> <role>', got '{stripped}'"),
                        });
                    }
                    let label = fields[1].to_string();
                    let role = NodeRole::parse(fields[2]).ok_or_else(|| TopologyError::Parse {
                        line,
                        msg: format!("unknown role '{}'", fields[2]),
                    })?;
                    if by_label.contains_key(&label) {
                        return Err(TopologyError::DuplicateNode { line, id: label });
                    }
                    by_label.insert(label.clone(), topo.nodes.len());
                    topo.nodes.push(TopoNode { label, role });
                    topo.faces.push(Vec::new());
                }
                "link" => {
                    if fields.len() != 5 {
                        return Err(TopologyError::Parse {
                            line,
                            msg: format!(
                                "expected 'link <idA> <idB> <bandwidth_bps> <propagation_ns>', got '{stripped}'"
                            ),
                        });
                    }
                    let a = *by_label.get(fields[1]).ok_or_else(|| {
                        TopologyError::DanglingEndpoint { line, endpoint: fields[1].to_string() }
                    })?;
                    let b = *by_label.get(fields[2]).ok_or_else(|| {
                        TopologyError::DanglingEndpoint { line, endpoint: fields[2].to_string() }
                    })?;
                    if a == b {
                        return Err(TopologyError::Parse {
                            line,
                            msg: "self links are not allowed".to_string(),
                        });
                    }
                    let bandwidth_bps: u64 = fields[3].parse().map_err(|_| TopologyError::Parse {
                        line,
                        msg: format!("bad bandwidth '{}'", fields[3]),
                    })?;
                    if bandwidth_bps == 0 {
                        return Err(TopologyError::Parse {
                            line,
                            msg: "bandwidth must be positive".to_string(),
                        });
                    }
                    let prop_ns: u64 = fields[4].parse().map_err(|_| TopologyError::Parse {
                        line,
                        msg: format!("bad propagation '{}'", fields[4]),
                    })?;
                    topo.add_link(a, b, bandwidth_bps, SimDuration::from_ns(prop_ns));
                }
                other => {
                    return Err(TopologyError::Parse {
                        line,
                        msg: format!("unknown directive '{other}'"),
                    });
                }
            }
        }
        if topo.nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        Ok(topo)
    }

    pub fn add_node(&mut self, label: String, role: NodeRole) -> usize {
        self.nodes.push(TopoNode { label, role });
        self.faces.push(Vec::new());
        self.nodes.len() - 1
    }

    pub fn add_link(&mut self, a: usize, b: usize, bandwidth_bps: u64, propagation: SimDuration) {
        let link = self.links.len();
        let face_a = FaceId(self.faces[a].len() as u32);
        let face_b = FaceId(self.faces[b].len() as u32);
        self.faces[a].push(FaceTarget { link, direction: 0, peer: b, peer_face: face_b });
        self.faces[b].push(FaceTarget { link, direction: 1, peer: a, peer_face: face_a });
        self.links.push(LinkSpec { a, b, face_a, face_b, bandwidth_bps, propagation });
    }

    /// Attaches `num_servers` servers and `num_clients` clients to routers
    /// drawn from the placement RNG. Only roles absent from the file are
    /// placed; a file that already declares clients or servers keeps them.
    pub fn place_endpoints(
        &mut self,
        num_servers: u32,
        num_clients: u32,
        edge_bandwidth_bps: u64,
        edge_propagation: SimDuration,
        rng: &mut impl Rng,
    ) -> Result<(), TopologyError> {
        let routers: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.role == NodeRole::Router)
            .map(|(i, _)| i)
            .collect();
        let have_servers = self.nodes.iter().any(|n| n.role == NodeRole::Server);
        let have_clients = self.nodes.iter().any(|n| n.role == NodeRole::Client);
        if (!have_servers && num_servers > 0) || (!have_clients && num_clients > 0) {
            if routers.is_empty() {
                return Err(TopologyError::MissingRole("router"));
            }
        }
        if !have_servers {
            for i in 0..num_servers {
                let at = routers[rng.gen_range(0..routers.len())];
                let idx = self.add_node(format!("server{i}"), NodeRole::Server);
                self.add_link(idx, at, edge_bandwidth_bps, edge_propagation);
            }
        }
        if !have_clients {
            for i in 0..num_clients {
                let at = routers[rng.gen_range(0..routers.len())];
                let idx = self.add_node(format!("client{i}"), NodeRole::Client);
                self.add_link(idx, at, edge_bandwidth_bps, edge_propagation);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        if !self.nodes.iter().any(|n| n.role == NodeRole::Server) {
            return Err(TopologyError::MissingRole("server"));
        }
        if !self.nodes.iter().any(|n| n.role == NodeRole::Client) {
            return Err(TopologyError::MissingRole("client"));
        }
        // Connectivity by breadth-first search from node 0.
        let mut seen = vec![false; self.nodes.len()];
        let mut frontier = vec![0usize];
        seen[0] = true;
        while let Some(n) = frontier.pop() {
            for target in &self.faces[n] {
                if !seen[target.peer] {
                    seen[target.peer] = true;
                    frontier.push(target.peer);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(TopologyError::Disconnected(self.nodes[i].label.clone()));
        }
        Ok(())
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    pub fn servers(&self) -> Vec<usize> {
        self.role_indices(NodeRole::Server)
    }

    pub fn clients(&self) -> Vec<usize> {
        self.role_indices(NodeRole::Client)
    }

    pub fn routers(&self) -> Vec<usize> {
        self.role_indices(NodeRole::Router)
    }

    fn role_indices(&self, role: NodeRole) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.role == role)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn degree(&self, node: usize) -> u32 {
        self.faces[node].len() as u32
    }

    pub fn min_bandwidth_bps(&self) -> Option<u64> {
        self.links.iter().map(|l| l.bandwidth_bps).min()
    }
}
