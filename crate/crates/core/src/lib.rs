//! Finite chain geometries `Σ(F_q, R)`.
//!
//! Build an F_q-algebra from a ring spec, construct its projective line and
//! chains, and study blocking sets:
//!
//! ```
//! use chaingeo_core::{blocking, Geometry};
//!
//! let geom = Geometry::from_spec("gf(4)/gf(2)").unwrap();
//! assert_eq!(geom.v(), 5);
//! assert_eq!(geom.lambda().as_array(), [10, 6, 3, 1]);
//! let best = blocking::min_blocking(&geom, None).unwrap();
//! assert_eq!(best.min, Some(3));
//! ```

pub mod algebra;
pub mod blocking;
pub mod chains;
pub mod error;
pub mod field;
pub mod incidence;
pub mod linalg;
pub mod projline;
pub mod quadric;
pub mod ringspec;

pub use algebra::{Algebra, Elem, ResidueField};
pub use blocking::{BlockingReport, Bounds, IntersectionDistribution, ResidueMap};
pub use chains::{Chain, Geometry, Lambda, LambdaTable};
pub use error::{Error, Result};
pub use field::{Fe, Field};
pub use incidence::Incidence;
pub use projline::{Mat2, Point, ProjectiveLine};
pub use quadric::{Plane3, ProjPoint3, QuadricModel};
pub use ringspec::{build_algebra, RingSpec};
