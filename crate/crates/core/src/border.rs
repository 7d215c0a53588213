//! Border index mapping shared by the blur and the tiler.

/// Maps a possibly out-of-range coordinate into `[0, len)` by mirroring
/// without repeating the edge sample (`gfedcb|abcdefgh|gfedcba`).
///
/// Works for arbitrarily distant coordinates by folding over the period
/// `2 * (len - 1)`.
pub(crate) fn reflect101(i: isize, len: usize) -> usize {
    debug_assert!(len > 0);
    if len == 1 {
        return 0;
    }
    let n = len as isize;
    if (0..n).contains(&i) {
        return i as usize;
    }
    let period = 2 * (n - 1);
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - m;
    }
    m as usize
}

/// Clamps a coordinate to the nearest edge sample (`aaaa|abcdefgh|hhhh`).
pub(crate) fn replicate(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}
