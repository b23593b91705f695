//! Propagation networks: single-source, time-ordered, arc-weighted DAGs that
//! record which users a message traversed and via which relationship types.
//!
//! A network decomposes into *dipaths* — maximal directed paths from the
//! source to a leaf. The dipath, represented as the ordered sequence of its
//! arc weight vectors, is the unit the DTW distance compares.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-arc relationship strengths: follow, mention and retweet weights,
/// each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    pub follow: f64,
    pub mention: f64,
    pub retweet: f64,
}

impl WeightVector {
    pub const ZERO: WeightVector = WeightVector {
        follow: 0.0,
        mention: 0.0,
        retweet: 0.0,
    };

    pub fn new(follow: f64, mention: f64, retweet: f64) -> Result<Self> {
        let v = WeightVector {
            follow,
            mention,
            retweet,
        };
        if !v.is_valid() {
            return Err(Error::domain(format!(
                "weight components must be finite and in [0, 1], got ({follow}, {mention}, {retweet})"
            )));
        }
        Ok(v)
    }

    pub fn is_valid(&self) -> bool {
        self.as_array()
            .iter()
            .all(|w| w.is_finite() && (0.0..=1.0).contains(w))
    }

    /// Maps each component to 1 if it is strictly positive, else 0.
    pub fn discretize(self) -> Self {
        let step = |w: f64| if w > 0.0 { 1.0 } else { 0.0 };
        WeightVector {
            follow: step(self.follow),
            mention: step(self.mention),
            retweet: step(self.retweet),
        }
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.follow, self.mention, self.retweet]
    }

    pub fn from_array(w: [f64; 3]) -> Result<Self> {
        WeightVector::new(w[0], w[1], w[2])
    }
}

/// One directed propagation link.
///
/// `rank` is the propagation order of the arc: it must strictly increase
/// along every directed path. Ingestion derives it from timestamps; the core
/// type stores only the order.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub src: String,
    pub dst: String,
    pub weight: WeightVector,
    pub rank: u32,
}

impl Arc {
    pub fn new(
        src: impl Into<String>,
        dst: impl Into<String>,
        weight: WeightVector,
        rank: u32,
    ) -> Self {
        Arc {
            src: src.into(),
            dst: dst.into(),
            weight,
            rank,
        }
    }
}

/// A single-source DAG of propagation links, optionally carrying the class
/// label of the message it traces.
///
/// The node set is derived from the source and the arc endpoints. Instances
/// are immutable after construction; structural invariants are checked by
/// [`PropagationNetwork::validate`], not by the constructor, so that invalid
/// inputs can be diagnosed rather than rejected wholesale.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationNetwork {
    source: String,
    label: Option<String>,
    arcs: Vec<Arc>,
    nodes: BTreeSet<String>,
}

/// A structural invariant violated by a [`PropagationNetwork`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The set of in-degree-0 nodes is not exactly `{source}`.
    SingleSource { in_degree_zero: Vec<String> },
    /// The arc relation contains a directed cycle.
    Cycle,
    /// Nodes that cannot be reached from the source.
    Unreachable { nodes: Vec<String> },
    /// A node with an incoming arc whose rank is not strictly below the rank
    /// of one of its outgoing arcs.
    RankOrder { node: String, in_rank: u32, out_rank: u32 },
    /// An arc whose weight vector has a component outside [0, 1].
    WeightRange { src: String, dst: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SingleSource { in_degree_zero } => write!(
                f,
                "single source violated: in-degree-0 nodes are [{}]",
                in_degree_zero.join(", ")
            ),
            Violation::Cycle => write!(f, "acyclic violated: arc relation contains a cycle"),
            Violation::Unreachable { nodes } => write!(
                f,
                "reachability violated: [{}] unreachable from source",
                nodes.join(", ")
            ),
            Violation::RankOrder { node, in_rank, out_rank } => write!(
                f,
                "rank order violated at {node}: incoming rank {in_rank} >= outgoing rank {out_rank}"
            ),
            Violation::WeightRange { src, dst } => {
                write!(f, "weight out of range on arc {src} -> {dst}")
            }
        }
    }
}

impl PropagationNetwork {
    pub fn new(source: impl Into<String>, label: Option<String>, arcs: Vec<Arc>) -> Self {
        let source = source.into();
        let mut nodes: BTreeSet<String> = BTreeSet::new();
        nodes.insert(source.clone());
        for arc in &arcs {
            nodes.insert(arc.src.clone());
            nodes.insert(arc.dst.clone());
        }
        PropagationNetwork {
            source,
            label,
            arcs,
            nodes,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Returns every violated structural invariant; an empty list means the
    /// network is valid. Violations are reported, not thrown.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        for arc in &self.arcs {
            if !arc.weight.is_valid() {
                violations.push(Violation::WeightRange {
                    src: arc.src.clone(),
                    dst: arc.dst.clone(),
                });
            }
        }

        let mut in_degree: BTreeMap<&str, usize> =
            self.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        let mut out_arcs: BTreeMap<&str, Vec<&Arc>> = BTreeMap::new();
        for arc in &self.arcs {
            *in_degree.get_mut(arc.dst.as_str()).expect("derived node") += 1;
            out_arcs.entry(arc.src.as_str()).or_default().push(arc);
        }

        let in_degree_zero: Vec<String> = in_degree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| n.to_string())
            .collect();
        if in_degree_zero != [self.source.clone()] {
            violations.push(Violation::SingleSource { in_degree_zero });
        }

        // Kahn peeling; leftover nodes sit on a cycle.
        let mut degrees = in_degree.clone();
        let mut queue: VecDeque<&str> = degrees
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| *n)
            .collect();
        let mut peeled = 0usize;
        while let Some(node) = queue.pop_front() {
            peeled += 1;
            for arc in out_arcs.get(node).map(Vec::as_slice).unwrap_or(&[]) {
                let d = degrees.get_mut(arc.dst.as_str()).expect("derived node");
                *d -= 1;
                if *d == 0 {
                    queue.push_back(arc.dst.as_str());
                }
            }
        }
        if peeled != self.nodes.len() {
            violations.push(Violation::Cycle);
        }

        let mut reached: BTreeSet<&str> = BTreeSet::new();
        let mut frontier = vec![self.source.as_str()];
        reached.insert(self.source.as_str());
        while let Some(node) = frontier.pop() {
            for arc in out_arcs.get(node).map(Vec::as_slice).unwrap_or(&[]) {
                if reached.insert(arc.dst.as_str()) {
                    frontier.push(arc.dst.as_str());
                }
            }
        }
        let unreachable: Vec<String> = self
            .nodes
            .iter()
            .filter(|n| !reached.contains(n.as_str()))
            .cloned()
            .collect();
        if !unreachable.is_empty() {
            violations.push(Violation::Unreachable { nodes: unreachable });
        }

        // Rank must strictly increase along every directed path. Checking
        // each in-arc/out-arc pair at every node is equivalent: any such pair
        // lies on some source-to-leaf path of a single-source DAG.
        let mut max_in: BTreeMap<&str, u32> = BTreeMap::new();
        for arc in &self.arcs {
            let e = max_in.entry(arc.dst.as_str()).or_insert(arc.rank);
            *e = (*e).max(arc.rank);
        }
        for arc in &self.arcs {
            if let Some(&in_rank) = max_in.get(arc.src.as_str()) {
                if in_rank >= arc.rank {
                    violations.push(Violation::RankOrder {
                        node: arc.src.clone(),
                        in_rank,
                        out_rank: arc.rank,
                    });
                }
            }
        }

        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

/// A maximal source-to-leaf path, reduced to the sequence of arc weight
/// vectors it traverses. `node_trace` is kept for diagnostics only.
#[derive(Debug, Clone, PartialEq)]
pub struct Dipath {
    pub elements: Vec<WeightVector>,
    pub node_trace: Vec<String>,
}

/// Default guard against path explosion in dense DAGs.
pub const DEFAULT_DIPATH_CAP: usize = 10_000;

/// Enumerates every maximal source-to-leaf dipath of a valid network.
///
/// A source-only network yields no dipaths. Networks with more than
/// [`DEFAULT_DIPATH_CAP`] dipaths are refused; use
/// [`extract_dipaths_capped`] to raise the cap.
pub fn extract_dipaths(net: &PropagationNetwork) -> Result<Vec<Dipath>> {
    extract_dipaths_capped(net, DEFAULT_DIPATH_CAP)
}

/// As [`extract_dipaths`] with an explicit dipath cap.
pub fn extract_dipaths_capped(net: &PropagationNetwork, cap: usize) -> Result<Vec<Dipath>> {
    let violations = net.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidNetwork(violations));
    }

    let mut out_arcs: BTreeMap<&str, Vec<&Arc>> = BTreeMap::new();
    for arc in &net.arcs {
        out_arcs.entry(arc.src.as_str()).or_default().push(arc);
    }
    for arcs in out_arcs.values_mut() {
        arcs.sort_by(|a, b| (a.rank, &a.dst).cmp(&(b.rank, &b.dst)));
    }

    // Depth-first walk with an explicit stack of (child arcs, next index)
    // frames; deep chains must not overflow the call stack.
    fn arcs_of<'a>(map: &'a BTreeMap<&'a str, Vec<&'a Arc>>, node: &str) -> &'a [&'a Arc] {
        map.get(node).map(Vec::as_slice).unwrap_or(&[])
    }
    let mut paths = Vec::new();
    let mut elements: Vec<WeightVector> = Vec::new();
    let mut trace = vec![net.source.clone()];
    let mut stack: Vec<(&[&Arc], usize)> = vec![(arcs_of(&out_arcs, &net.source), 0)];
    while let Some((arcs, next)) = stack.last_mut() {
        if arcs.is_empty() && !elements.is_empty() {
            // Entered a leaf; the bare source is not a dipath.
            if paths.len() >= cap {
                return Err(Error::DipathCapExceeded { cap });
            }
            paths.push(Dipath {
                elements: elements.clone(),
                node_trace: trace.clone(),
            });
        }
        if *next < arcs.len() {
            let arc = arcs[*next];
            *next += 1;
            elements.push(arc.weight);
            trace.push(arc.dst.clone());
            stack.push((arcs_of(&out_arcs, &arc.dst), 0));
        } else {
            stack.pop();
            if !stack.is_empty() {
                elements.pop();
                trace.pop();
            }
        }
    }
    Ok(paths)
}

// --- network file format -----------------------------------------------
//
// One JSON object per network:
//   {"source": str, "label": str|null,
//    "arcs": [{"src": str, "dst": str, "w": [f, m, r], "rank": int}]}
// Arc order in the file is not significant; rank is.

#[derive(Debug, Serialize, Deserialize)]
struct ArcRecord {
    src: String,
    dst: String,
    w: [f64; 3],
    rank: u32,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NetworkRecord {
    source: String,
    #[serde(default)]
    label: Option<String>,
    arcs: Vec<ArcRecord>,
}

impl From<&PropagationNetwork> for NetworkRecord {
    fn from(net: &PropagationNetwork) -> Self {
        NetworkRecord {
            source: net.source.clone(),
            label: net.label.clone(),
            arcs: net
                .arcs
                .iter()
                .map(|a| ArcRecord {
                    src: a.src.clone(),
                    dst: a.dst.clone(),
                    w: a.weight.as_array(),
                    rank: a.rank,
                })
                .collect(),
        }
    }
}

impl TryFrom<NetworkRecord> for PropagationNetwork {
    type Error = Error;

    fn try_from(record: NetworkRecord) -> Result<Self> {
        let mut arcs = Vec::with_capacity(record.arcs.len());
        for a in record.arcs {
            arcs.push(Arc {
                weight: WeightVector::from_array(a.w)?,
                src: a.src,
                dst: a.dst,
                rank: a.rank,
            });
        }
        Ok(PropagationNetwork::new(record.source, record.label, arcs))
    }
}

/// Reads networks from JSON Lines, one object per line. Blank lines are
/// skipped; malformed lines are reported with their line number.
pub fn read_networks<R: BufRead>(reader: R) -> Result<Vec<PropagationNetwork>> {
    let mut networks = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: NetworkRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        networks.push(record.try_into().map_err(|e: Error| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?);
    }
    Ok(networks)
}

/// Writes networks as JSON Lines, one object per line.
pub fn write_networks<W: Write>(writer: &mut W, networks: &[PropagationNetwork]) -> Result<()> {
    for net in networks {
        let record = NetworkRecord::from(net);
        serde_json::to_writer(&mut *writer, &record)
            .map_err(|e| Error::domain(format!("serialize network: {e}")))?;
        writeln!(writer)?;
    }
    Ok(())
}
