//! Affine unitals of order q built from hat systems in SL(2,q), their
//! closures, automorphism groups, O'Nan configurations and hat search.

pub mod catalog;
pub mod design;
pub mod gf2e;
pub mod hatsearch;
pub mod morphisms;
pub mod onan;
pub mod sl2q;

/// Sets the size of the global worker pool used by the parallel scans.
/// Only the first call has an effect.
pub fn set_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}
