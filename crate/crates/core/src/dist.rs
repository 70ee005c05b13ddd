//! Distance arithmetic with an unreachable sentinel.

/// Hop distance in an unweighted graph.
pub type Dist = usize;

/// Unreachable / absent. Strictly greater than any depth bound, and
/// `INF + INF` does not overflow, so sums can be formed before clamping.
pub const INF: Dist = usize::MAX / 2;

/// Saturating sum: any operand at or above INF yields INF.
#[inline]
pub fn dist_add(a: Dist, b: Dist) -> Dist {
    if a >= INF || b >= INF {
        INF
    } else {
        a + b
    }
}

/// Renders a distance for text output, using `INF` for unreachable.
pub fn dist_str(d: Dist) -> String {
    if d >= INF {
        "INF".to_string()
    } else {
        d.to_string()
    }
}

/// Largest integer strictly below `x` (for open cutoffs like `value < 8β/ε`).
/// `x` must be positive.
pub fn strict_below(x: f64) -> Dist {
    debug_assert!(x > 0.0);
    let f = x.floor();
    if f == x {
        (f as Dist).saturating_sub(1)
    } else {
        f as Dist
    }
}
