//! Combinatorial metric model of the universal cover of a flip graph
//! manifold: validated specs, exact base-tree geometry, and the lazily
//! explored tree of piece charts.

pub mod model;
pub mod spec;
pub mod tree;

pub use model::{CopyAddress, Crossing, Model, PointCoord, WallGapReport, WallId};
pub use spec::{
    load_spec, self_glued_reference, two_piece_reference, CycleData, FlipManifoldSpec, GluingSpec,
    PieceSpec,
};
pub use tree::{base_dist, line_bridge, line_relation, BasePos, LineRelation, WallLine};
