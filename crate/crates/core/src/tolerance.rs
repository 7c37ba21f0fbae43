//! Process-wide numerical tolerance.
//!
//! Rank tests, orthogonality checks and the "last row is zero" test of
//! [`crate::coords::unembed`] all read the same default, which starts at
//! `1e-10` and can be overridden once at startup (the CLI does this from
//! `--tol` or `GRAFF_TOL`).

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3DDB_7CDF_D9D7_BDBB); // 1e-10

/// Current default tolerance.
pub fn default_tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Replace the default tolerance. Non-positive or non-finite values are ignored.
pub fn set_default_tolerance(tol: f64) -> bool {
    if tol.is_finite() && tol > 0.0 {
        TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
        true
    } else {
        false
    }
}
