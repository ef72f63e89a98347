//! Rounding helpers for the places where real-valued parameters meet integer counts.

const REL_TOL: f64 = 1e-9;

fn slack(x: f64) -> f64 {
    x.abs().max(1.0) * REL_TOL
}

/// Floor that tolerates representation error, so `floor_tol(0.57 * 100.0)` is 57.
pub fn floor_tol(x: f64) -> f64 {
    (x + slack(x)).floor()
}

/// Ceiling counterpart of [`floor_tol`]; `ceil_tol((0.1 + 0.2) * 10.0)` is 3, not 4.
pub fn ceil_tol(x: f64) -> f64 {
    (x - slack(x)).ceil()
}

/// Palette size `⌈(1+ε)Δ⌉`.
pub fn palette_size(eps: f64, delta: usize) -> u32 {
    ceil_tol((1.0 + eps) * delta as f64).max(0.0) as u32
}

/// `x^{2/3}` extended to negative inputs through the real cube root.
pub fn pow_two_thirds(x: f64) -> f64 {
    let c = x.cbrt();
    c * c
}
