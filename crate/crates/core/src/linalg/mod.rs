//! Exact linear algebra over the integers and rationals, with modular fast
//! paths for rank.

pub mod adjugate;
pub mod certify;
pub mod exact;
pub mod form;
pub mod modp;
pub mod nullspace;

pub use adjugate::adjugate;
pub use certify::{certify_rank, RankCertificate};
pub use exact::{det_exact, rank_exact};
pub use form::{augmented_det_form, QuadraticFormInt};
pub use modp::{default_primes, is_prime, rank_mod_p};
pub use nullspace::nullspace_rational;
