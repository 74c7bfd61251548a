//! Sweepout bundles: the pseudomanifold N swept over the target complex T,
//! fiber extraction with image-length accounting, the simplex quotient of T,
//! loop families over generic parameters, boundary pairing certificates and
//! the starfish/hexapod example.

pub mod bundle;
pub mod input;
pub mod loops;
pub mod starfish;

pub use bundle::{build_bundle, fiber, homology_audit, thread_count, waist_upper_bound, BuildOptions, FiberEdge, FiberRecord, HomologyAudit, SweepoutBundle, TPiece, WaistReport};
pub use input::{FillingInput, SweepError};
pub use loops::{
    boundary_pairing, collar_extend, default_delta_sample, hbar_fiber, placements,
    simplex_quotient, HbarFiber, LoopRecord, PairingCertificate, PairingGroup, Placement,
    SimplexQuotient,
};
pub use starfish::{hexapodize, make_starfish, Hexapod, Starfish, StarfishFiber};


