//! Translation-lattice equivariant chains, quotient complexes and their
//! Smith normal form homology.

mod action;
mod chain;
mod quotient;
mod snf;
mod transport;

pub use action::TranslationAction;
pub use chain::{
    equivariant_sign_identity_residual, equivariant_wrong_way, kuhn_fundamental_cycle, restrict_equivariance,
    tangent_action, EquivariantChain,
};
pub use quotient::{
    build_quotient_complex, identify_class, snf_homology, snf_homology_transposed, torus_homology, HomologyReport,
    QuotientComplex,
};
pub use snf::{smith_normal_form, IntMatrix, SmithForm};
pub use transport::{shear_normal, transport_fundamental_class, transport_sheared, TransportReport};
pub(crate) use transport::transport_with;
