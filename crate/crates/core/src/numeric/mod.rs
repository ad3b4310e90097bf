//! Scalar kernel: exact rationals and certified balls.

pub mod ball;
pub mod dyadic;
pub mod rational;

pub use ball::{Ball, BallJson, DEFAULT_PRECISION, MAX_PRECISION};
pub use dyadic::{Dyadic, Round};
pub use rational::{binomial, factorial, rat, ratio, Rational};

/// Runs `f` at increasing precision until `decided` accepts the result or
/// the ceiling is reached. Returns the last result and the precision used.
pub fn escalate<T>(
    start: u32,
    mut f: impl FnMut(u32) -> T,
    mut decided: impl FnMut(&T) -> bool,
) -> (T, u32, bool) {
    let mut prec = start.max(16);
    loop {
        let out = f(prec);
        if decided(&out) {
            return (out, prec, true);
        }
        if prec >= MAX_PRECISION {
            return (out, prec, false);
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}
