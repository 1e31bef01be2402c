//! Convex constraint sets, integrands of determinant type, Jensen and
//! semicontinuity experiments on DPT fields, the shrinking map, the cut-off
//! construction and quasiconvexity probes.

mod convex;
mod cutoff;
mod dpt;
mod encoding;
mod functional;
mod jensen;
mod jet;
mod probe;

pub use convex::{project_check, shrink_to_interior, ConvexSet, ProjectReport, MEMBERSHIP_TOL};
pub use cutoff::{cutoff_construct, CutoffResult, CutoffSpec};
pub use dpt::{dpt_generate, DptGenerator};
pub use encoding::Encoding;
pub use functional::{young_moment, EmpiricalMeasure, FunctionalDescriptor, PSD_TOL};
pub use jensen::{
    jensen_batch, jensen_check, oscillate, semicontinuity_experiment, Direction, JensenBatch, JensenReport,
    JensenTrial, SemicontinuityReport, SemicontinuityRow, AFREE_TOL, JENSEN_TOL, QUADRATURE_TOL,
};
pub use probe::{kaq_probe, ProbeConfig, ProbeReport, ProbeTrial};
