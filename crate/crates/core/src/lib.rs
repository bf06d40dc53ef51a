//! Toolkit for 3-uniform hypergraph Lagrangians, palette Lagrangians,
//! palette satisfaction, and uniform-density audits.
//!
//! The building blocks:
//! - [`Hypergraph`]: k-uniform hypergraphs with labelled vertices and a
//!   canonical text format;
//! - [`Palette`]: finite sets of ordered colour triples with the derived
//!   colour set, the vvv/ev/ee Lagrangians, and the `p_t` construction;
//! - [`satisfaction`]: deciding whether a 3-graph admits an ordering and
//!   pair colouring whose edge shadows stay inside a palette;
//! - [`construction`]: seeded random palette constructions and
//!   (d, eta, star)-density audits with exact counting.

pub mod construction;
pub mod error;
pub mod hypergraph;
pub mod lagrangian;
mod opt;
pub mod palette;
pub mod satisfaction;
pub mod weighting;

pub use construction::{
    audit_density, count_colour_triangles, count_eev, count_evvv, count_kee_and_eee,
    generate_construction, random_hypergraph, witness_ratio, AuditConfig, AuditMode, DensityAudit,
    PaletteConstruction, Witness,
};
pub use error::{Error, Result};
pub use hypergraph::Hypergraph;
pub use satisfaction::{
    almost_satisfies_distance, satisfies, verify_certificate, DistanceBudget, DistanceReport,
    Satisfaction, SatisfactionCertificate, SearchBudget,
};
pub use lagrangian::{
    lagrange_grad, lagrange_poly, lagrangian, lagrangian_grid_oracle, LagrangianReport, Method,
    SolverConfig,
};
pub use palette::{
    build_pt, codegree_lagrangian, degree_lagrangian, lambda_ee, lambda_ev, lambda_vvv,
    palette_grid_oracle, palette_lagrangian, random_palette, Palette, PaletteLagrangianReport,
    PaletteSolverConfig, PerColourReport,
};
pub use weighting::{StarMode, Weighting, POSITIVITY_EPS, SIMPLEX_TOL};
