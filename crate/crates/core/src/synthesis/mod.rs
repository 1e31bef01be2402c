//! Potential and annihilator synthesis from a constant-rank operator, with
//! exactness checks and Leibniz tables.

mod checks;
mod leibniz;
mod triple;

pub use checks::{expand_g_in_a, verify_exactness, ExactnessReport, ExpansionReport, RankSample};
pub use leibniz::{leibniz_table, LeibnizTable};
pub use triple::{annihilator_operator, potential_operator, PotentialTriple, SynthesisOptions};
