//! # obpers
//!
//! Persistence modules over the real line, represented exactly: a module is
//! constant on the pieces cut out by finitely many critical values, and every
//! vector space and structure map lives over a prime field GF(p).
//!
//! The crate works in two categories side by side:
//!
//! * the strict category, where morphisms are natural families of linear maps
//!   ([`persmod::Morphism`]) and modules decompose into interval modules
//!   ([`decomp::decompose`]);
//! * the observable category, where modules supported on isolated points are
//!   invisible. Morphisms there are only defined between strictly increasing
//!   parameters ([`observable::ObMorphism`]), and two modules are isomorphic
//!   exactly when their undecorated diagrams agree ([`diagrams::ob_isomorphic`]).
//!
//! Distances between modules are computed through diagrams
//! ([`distances::bottleneck`]) and certified by explicit interleavings
//! ([`distances::build_interleaving`], [`distances::verify_interleaving`]).
//!
//! ```
//! use obpers::{FieldSpec, Real};
//! use obpers::persmod::{interval_module, DecoratedInterval};
//! use obpers::decomp::barcode_formula;
//!
//! let f2 = FieldSpec::new(2).unwrap();
//! let crit = [Real::from(1), Real::from(2)];
//! let v = interval_module(f2, &DecoratedInterval::closed(1, 2), &crit).unwrap();
//! assert_eq!(v.dims(), &[0, 1, 1, 1, 0]);
//! assert_eq!(barcode_formula(&v).to_string(), "[1, 2] x 1\n");
//! ```

pub mod decomp;
pub mod diagrams;
pub mod distances;
pub mod error;
pub mod exactfield;
pub mod observable;
pub mod persmod;
pub mod real;

pub use error::{Error, Result};
pub use exactfield::{FieldSpec, Mat, Subspace};
pub use real::{ExtReal, Real};
