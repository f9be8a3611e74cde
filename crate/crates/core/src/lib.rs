//! Finite-scale topos theory: finite categories, finite modules over `Z/n`,
//! presheaves, Grothendieck topologies, sheafification, the Hom-tensor
//! adjunction and executable checks of Giraud's axioms.

pub mod category;
pub mod error;
pub mod giraud;
pub mod materialize;
pub mod modules;
pub mod presheaf;
pub mod random;
pub mod reconstruction;
pub mod sheaf;
pub mod site;

pub use category::{ArrowFamily, ArrowId, FinCategory, ObjId};
pub use error::{Error, Result};
