//! Unextendible sets of maximal commuting operator classes and the
//! corresponding mutually unbiased bases in dimension `d = p²`.
//!
//! - [`pauli`]: exponent-vector arithmetic for two-qudit Pauli words.
//! - [`lattice`]: maximal commuting classes as canonical Lagrangian subspaces.
//! - [`spread`]: complete sets, new-class formation, unextendibility certificates.
//! - [`states`]: dense matrices, analytic eigenprojectors, unbiasedness checks.
//! - [`entropy`]: Shannon/collision entropies and uncertainty-relation bounds.
//! - [`records`], [`fixtures`]: JSON formats and the golden datasets.
//!
//! Inner loops run on rayon when the default `parallel` feature is enabled
//! and sequentially otherwise; results are identical either way.

pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod par;
pub mod pauli;
pub mod records;
pub mod spread;
pub mod states;

pub use error::{MubError, Result};
pub use lattice::{check_property2, enumerate_all_classes, partner_exponent, ClassLattice, CommutingClass, WordSet};
pub use pauli::{PauliWord, Prime};
pub use spread::{
    assemble_unextendible, build_complete_set, certify_unextendible, new_classes_from_subset, search_unextendible,
    theorem2_scan, Certification, ClassSet, SetKind, TieBreak, UnextCertificate,
};
pub use states::{build_basis, projector_from_label, realize_word, verify_unbiased, Basis, BasisLabel};
