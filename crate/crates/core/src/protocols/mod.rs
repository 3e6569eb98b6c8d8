//! Concrete protocols and the structured strategy families they are checked against.

pub mod complement;
pub mod expmrip;
pub mod expnexp;
pub mod mip;
pub mod negated;
pub mod scoring;
pub mod simple;
pub mod two_five;

pub use complement::{complement_wrap, Complement, ComplementProfile};
pub use expmrip::{make_fig_expmrip, FigExpMrip, GateOracleProfile};
pub use expnexp::{make_fig_expnexp, FigExpNexp, NexpGateProfile, SubPolicy};
pub use mip::MipVariant;
pub use negated::SignFlip;
pub use scoring::{make_fig_scoring, CommittedOracleProfile, FigScoring};
pub use simple::{make_fig_simple, FigSimple, SimpleProfile};
pub use two_five::{lifted_family, two_five_wrap, LiftedProfile, TwoFive};

use crate::engine::Bits;
use crate::oracle3sat::OracleTable;

/// Answers a packed list of `s`-bit oracle queries from `oracle`; `None` if
/// the message is not a whole number of queries.
pub(crate) fn answer_queries(oracle: &OracleTable, query: &Bits) -> Option<Bits> {
    let s = oracle.width() as usize;
    if query.len() % s != 0 {
        return None;
    }
    let mut r = query.reader();
    let answers = (0..query.len() / s)
        .map(|_| r.u64(s as u32).map(|b| oracle.get(b as usize)))
        .collect::<Option<Vec<_>>>()?;
    Some(Bits::new(answers))
}
