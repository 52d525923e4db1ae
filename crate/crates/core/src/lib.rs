//! Linear layouts (stack and queue book embeddings) of graphs via SAT.
//!
//! The usual flow is [`Graph`] + [`LayoutSpec`] into [`compute_layout`], which
//! encodes the problem as CNF, runs a SAT backend and hands back a
//! [`LinearLayout`] that has been re-checked by [`verify`].

pub mod brute;
pub mod constructions;
pub mod encode;
pub mod experiments;
pub mod graph;
pub mod graphml;
pub mod job;
pub mod layout;
pub mod pipeline;
pub mod solver;
pub mod svg;
pub mod verify;

pub use brute::brute_force_solve;
pub use constructions::{
    generate_skeleton, generate_stellated_skeleton, generate_step2_gadget, goldner_harary, random_triangulated_quad,
    QuadFrame, SkeletonLabels, Step2Labels,
};
pub use encode::{decode, emit_dimacs, encode, CnfInstance, Model, VarMap};
pub use graphml::{parse_graphml, read_graphml, write_graphml, write_graphml_document, GraphmlDocument, GraphmlError};
pub use job::{GeneratorSpec, JobError, JobRequest};
pub use graph::{Edge, EdgeId, Graph, GraphError, Point, VertexId};
pub use layout::{
    Constraint, ConstraintError, ConstraintKind, GroupMode, IncidenceScope, LayoutSpec, LinearLayout, OrderMode, Page,
    PageRestriction, PageType, SpecError,
};
pub use pipeline::{compute_layout, compute_layout_cancellable, LayoutOutcome, PipelineError};
pub use solver::{solve_cnf, Backend, CancelToken, SolveResult, SolveStats, SolveStatus, SolverConfig, SolverError};
pub use svg::{render_arc_diagram, Side, SvgOptions};
pub use verify::{verify, Violation, ViolationCode};
