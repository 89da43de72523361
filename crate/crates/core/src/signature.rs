//! Node signatures and pair feature vectors.
//!
//! A node's signature is the binned degree distribution of its exact 1-hop
//! and 2-hop neighbourhoods (NDD) and, for labeled graphs, the attribute
//! counts of the same two rings (NAD) plus the node's own attribute. Degrees
//! are measured in the graph the node lives in. Bin `j` holds degrees in
//! `[j·b, (j+1)·b)`; the last bin also absorbs everything larger.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{AttrValue, Graph, Hop, HopRing, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignatureConfig {
    pub bin_size: usize,
    pub bins_per_hop: usize,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        SignatureConfig {
            bin_size: 50,
            bins_per_hop: 21,
        }
    }
}

impl SignatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bin_size == 0 || self.bins_per_hop == 0 {
            return Err(Error::invalid("bin size and bin count must be positive"));
        }
        Ok(())
    }

    pub fn bin_of(&self, degree: usize) -> usize {
        (degree / self.bin_size).min(self.bins_per_hop - 1)
    }

    pub fn feature_count(&self, mode: FeatureMode) -> usize {
        let per_node = 2 * self.bins_per_hop
            + match mode {
                FeatureMode::Gs => 0,
                FeatureMode::GsLbl => 5,
            };
        2 * per_node
    }
}

/// GS uses topology only; GS(LBL) adds neighbourhood attribute counts and
/// the nodes' own attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureMode {
    #[serde(rename = "GS")]
    Gs,
    #[serde(rename = "GS(LBL)")]
    GsLbl,
}

impl FeatureMode {
    pub const BOTH: [FeatureMode; 2] = [FeatureMode::Gs, FeatureMode::GsLbl];
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMode::Gs => "GS",
            FeatureMode::GsLbl => "GS(LBL)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    /// Neighbour counts per value, indexed by [`AttrValue::index`], per hop.
    pub nad: [[u32; 2]; 2],
    /// 0 for `R`, 1 for `B`.
    pub own_attr: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSignature {
    pub config: SignatureConfig,
    pub ndd: [Vec<u32>; 2],
    pub labels: Option<LabelCounts>,
}

impl NodeSignature {
    pub fn compute(graph: &Graph, u: NodeId, config: SignatureConfig) -> Result<NodeSignature> {
        config.validate()?;
        if u >= graph.node_count() {
            return Err(Error::UnknownNode(u.to_string()));
        }
        let mut ring = HopRing::new(graph);
        Ok(signature_with(graph, u, config, &mut ring))
    }

    fn append_to(&self, mode: FeatureMode, out: &mut Vec<f64>) -> Result<()> {
        for hop in &self.ndd {
            out.extend(hop.iter().map(|&c| c as f64));
        }
        if mode == FeatureMode::GsLbl {
            let l = self.labels.as_ref().ok_or(Error::Unlabeled)?;
            for hop in &l.nad {
                out.extend(hop.iter().map(|&c| c as f64));
            }
            out.push(l.own_attr as f64);
        }
        Ok(())
    }
}

fn ndd_of(graph: &Graph, ring: &[NodeId], config: SignatureConfig) -> Vec<u32> {
    let mut bins = vec![0u32; config.bins_per_hop];
    for &v in ring {
        bins[config.bin_of(graph.degree(v))] += 1;
    }
    bins
}

fn nad_of(values: &[AttrValue], ring: &[NodeId]) -> [u32; 2] {
    let mut counts = [0u32; 2];
    for &v in ring {
        counts[values[v].index()] += 1;
    }
    counts
}

fn signature_with(graph: &Graph, u: NodeId, config: SignatureConfig, ring: &mut HopRing) -> NodeSignature {
    let first = graph.neighbors(u);
    let second = ring.second(u);
    let labels = graph.attributes().map(|a| LabelCounts {
        nad: [nad_of(&a.values, first), nad_of(&a.values, second)],
        own_attr: a.values[u].index() as u8,
    });
    NodeSignature {
        config,
        ndd: [ndd_of(graph, first, config), ndd_of(graph, second, config)],
        labels,
    }
}

/// Binned degree distribution of `u`'s exact `hop` ring.
pub fn compute_ndd(graph: &Graph, u: NodeId, hop: Hop, config: SignatureConfig) -> Result<Vec<u32>> {
    config.validate()?;
    let ring = graph.neighbors_at_hop(u, hop)?;
    Ok(ndd_of(graph, &ring, config))
}

/// Attribute counts `[R, B]` of `u`'s exact `hop` ring.
pub fn compute_nad(graph: &Graph, u: NodeId, hop: Hop) -> Result<[u32; 2]> {
    let attrs = graph.attributes().ok_or(Error::Unlabeled)?;
    let ring = graph.neighbors_at_hop(u, hop)?;
    Ok(nad_of(&attrs.values, &ring))
}

/// Signatures of every node of one graph.
#[derive(Debug, Clone)]
pub struct SignatureTable {
    pub config: SignatureConfig,
    pub signatures: Vec<NodeSignature>,
}

impl SignatureTable {
    pub fn build(graph: &Graph, config: SignatureConfig) -> Result<SignatureTable> {
        config.validate()?;
        let signatures = (0..graph.node_count())
            .into_par_iter()
            .map_init(|| HopRing::new(graph), |ring, u| signature_with(graph, u, config, ring))
            .collect();
        Ok(SignatureTable { config, signatures })
    }

    pub fn get(&self, u: NodeId) -> &NodeSignature {
        &self.signatures[u]
    }

    /// CSV with a `node` column followed by the single-node feature names.
    pub fn write_csv<W: Write>(&self, mut w: W, mode: FeatureMode) -> Result<()> {
        let io = |e| Error::io("<signatures>", e);
        let names: Vec<String> = feature_names(self.config, mode)
            .into_iter()
            .filter(|f| f.node() == 1)
            .map(|f| f.to_string()[3..].to_string())
            .collect();
        writeln!(w, "node,{}", names.join(",")).map_err(io)?;
        let mut row = Vec::new();
        for (u, sig) in self.signatures.iter().enumerate() {
            row.clear();
            sig.append_to(mode, &mut row)?;
            let cells: Vec<String> = row.iter().map(|v| (*v as u64).to_string()).collect();
            writeln!(w, "{u},{}", cells.join(",")).map_err(io)?;
        }
        Ok(())
    }
}

/// Name of one pair feature, rendered as `N{1,2}-H{1,2}-B{j}` (bins counted
/// from 1), `N{1,2}-H{1,2}-{R,B}` or `N{1,2}-ATTR`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureName {
    Ndd { node: u8, hop: u8, bin: usize },
    Nad { node: u8, hop: u8, value: AttrValue },
    Attr { node: u8 },
}

impl FeatureName {
    pub fn node(&self) -> u8 {
        match *self {
            FeatureName::Ndd { node, .. } | FeatureName::Nad { node, .. } | FeatureName::Attr { node } => node,
        }
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureName::Ndd { node, hop, bin } => write!(f, "N{node}-H{hop}-B{bin}"),
            FeatureName::Nad { node, hop, value } => write!(f, "N{node}-H{hop}-{value}"),
            FeatureName::Attr { node } => write!(f, "N{node}-ATTR"),
        }
    }
}

impl Serialize for FeatureName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Node-major; NDD, then NAD, then ATTR; hop-minor; bin-minor.
pub fn feature_names(config: SignatureConfig, mode: FeatureMode) -> Vec<FeatureName> {
    let mut names = Vec::with_capacity(config.feature_count(mode));
    for node in 1..=2u8 {
        for hop in 1..=2u8 {
            names.extend((1..=config.bins_per_hop).map(|bin| FeatureName::Ndd { node, hop, bin }));
        }
        if mode == FeatureMode::GsLbl {
            for hop in 1..=2u8 {
                for value in [AttrValue::R, AttrValue::B] {
                    names.push(FeatureName::Nad { node, hop, value });
                }
            }
            names.push(FeatureName::Attr { node });
        }
    }
    names
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairFeatureVector {
    pub values: Vec<f64>,
    pub names: Vec<FeatureName>,
}

/// Appends the pair vector `[sig(san) ‖ sig(aux)]` to `out`.
pub fn append_pair_features(
    san: &NodeSignature,
    aux: &NodeSignature,
    mode: FeatureMode,
    out: &mut Vec<f64>,
) -> Result<()> {
    if san.config != aux.config {
        return Err(Error::ConfigMismatch);
    }
    san.append_to(mode, out)?;
    aux.append_to(mode, out)
}

/// Position 1 is always the sanitized-graph node.
pub fn pair_features(san: &NodeSignature, aux: &NodeSignature, mode: FeatureMode) -> Result<PairFeatureVector> {
    let mut values = Vec::with_capacity(san.config.feature_count(mode));
    append_pair_features(san, aux, mode, &mut values)?;
    Ok(PairFeatureVector {
        values,
        names: feature_names(san.config, mode),
    })
}
