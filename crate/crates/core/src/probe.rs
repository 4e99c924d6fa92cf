//! Process-wide counters over the expensive kernels.
//!
//! The parameter search is required to recombine cached similarity
//! components without ever re-running a string kernel or the phonetic
//! encoder. These counters make that property observable: snapshot before,
//! snapshot after, assert the delta is zero. Counting is relaxed-atomic and
//! cheap enough to stay on in release builds.

use std::sync::atomic::{AtomicU64, Ordering};

static STRING_KERNEL_CALLS: AtomicU64 = AtomicU64::new(0);
static PHONETIC_ENCODE_CALLS: AtomicU64 = AtomicU64::new(0);

pub(crate) fn count_string_kernel() {
    STRING_KERNEL_CALLS.fetch_add(1, Ordering::Relaxed);
}

pub(crate) fn count_phonetic_encode() {
    PHONETIC_ENCODE_CALLS.fetch_add(1, Ordering::Relaxed);
}

/// Cumulative kernel invocation counts for this process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelCounts {
    /// Edit-distance and LCS table fills (one per kernel call).
    pub string_kernel_calls: u64,
    /// Double Metaphone encodings.
    pub phonetic_encode_calls: u64,
}

impl KernelCounts {
    pub fn total(&self) -> u64 {
        self.string_kernel_calls + self.phonetic_encode_calls
    }

    /// Counts accumulated since `earlier` was taken.
    pub fn since(&self, earlier: KernelCounts) -> KernelCounts {
        KernelCounts {
            string_kernel_calls: self.string_kernel_calls - earlier.string_kernel_calls,
            phonetic_encode_calls: self.phonetic_encode_calls - earlier.phonetic_encode_calls,
        }
    }
}

/// Snapshot the current counters. Counters only ever grow; concurrent tests
/// in the same process can inflate deltas, so callers that assert exact
/// values must serialize themselves.
pub fn kernel_counts() -> KernelCounts {
    KernelCounts {
        string_kernel_calls: STRING_KERNEL_CALLS.load(Ordering::Relaxed),
        phonetic_encode_calls: PHONETIC_ENCODE_CALLS.load(Ordering::Relaxed),
    }
}
