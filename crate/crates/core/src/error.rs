use std::path::PathBuf;

use crate::labeling::LabelingResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("attribute is not binary: found values {0:?}")]
    NotBinary(Vec<String>),

    #[error("node {0} has no attribute")]
    MissingAttribute(String),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("node {node} has conflicting attribute values {first:?} and {second:?}")]
    ConflictingAttribute {
        node: String,
        first: String,
        second: String,
    },

    #[error("graph is not labeled")]
    Unlabeled,

    #[error("graph carries a single attribute value")]
    SingleLabel,

    #[error("{0}")]
    InvalidParameter(String),

    #[error("operation needs at least {needed} nodes, graph has {found}")]
    TooFewNodes { needed: usize, found: usize },

    #[error("graph has no edges")]
    NoEdges,

    #[error("BFS from the highest-degree node reaches {reached} nodes, overlap needs {needed}")]
    ComponentTooSmall { reached: usize, needed: usize },

    #[error("split leaf {lineage} has {nodes} nodes, below the floor of {floor}")]
    LeafTooSmall {
        lineage: String,
        nodes: usize,
        floor: usize,
    },

    #[error("split has an empty overlap")]
    EmptyOverlap,

    #[error("population of {population} pairs is smaller than a subsample of {needed}")]
    PopulationTooSmall { population: u64, needed: usize },

    #[error("signature configurations differ")]
    ConfigMismatch,

    #[error("feature vector has length {found}, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset holds a single class")]
    SingleClass,

    #[error("minority class has {0} rows, SMOTE needs at least 2")]
    MinorityTooSmall(usize),

    #[error("class {class} has {rows} rows, 5x2 cross-validation needs at least {needed}")]
    TooFewRows { class: u8, rows: usize, needed: usize },

    #[error("differences have zero variance")]
    ZeroVariance,

    #[error("samples have zero variance (point mass at {at})")]
    PointMass { at: f64 },

    #[error("labeling did not converge: {} cross ties left, target {}", .0.achieved_cross_ties, .0.target_delta)]
    NotConverged(Box<LabelingResult>),

    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Strips any stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
