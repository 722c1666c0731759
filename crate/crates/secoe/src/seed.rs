//! Deterministic derivation of child seeds from a base seed.

/// splitmix64 finalizer; decorrelates sequential salts.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for a (base, salt) pair. Pure, so concurrently trained models
/// can precompute their seeds and stay reproducible regardless of schedule.
pub(crate) fn derive_seed(base: u64, salt: u64) -> u64 {
    splitmix64(base ^ splitmix64(salt))
}
