//! Index grids and log-log slope fits.

use crate::error::{Error, Result};
use crate::numeric::Ball;

/// `start, 2 start, 4 start, ...` up to `end` inclusive.
pub fn geometric_grid(start: u64, end: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if start == 0 {
        out.push(0);
    }
    let mut n = start.max(1);
    while n <= end {
        out.push(n);
        n = match n.checked_mul(2) {
            Some(m) => m,
            None => break,
        };
    }
    out
}

/// Parses `geom:a:b`, `range:a:b` or an explicit list `1,10,100`.
pub fn parse_grid(spec: &str) -> Result<Vec<u64>> {
    let s = spec.trim();
    let num = |x: &str| {
        x.trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("bad grid value {x:?} in {s:?}")))
    };
    let grid = if let Some(rest) = s.strip_prefix("geom:") {
        let (a, b) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("grid {s:?}: expected geom:start:end")))?;
        geometric_grid(num(a)?, num(b)?)
    } else if let Some(rest) = s.strip_prefix("range:") {
        let (a, b) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("grid {s:?}: expected range:start:end")))?;
        (num(a)?..=num(b)?).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() {
        return Err(Error::Parse(format!("grid {s:?} is empty")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse(format!(
            "grid {s:?} must be strictly increasing"
        )));
    }
    Ok(grid)
}

/// Least-squares slope of `(ln n, ln y)` as a ball enclosing the slope for
/// every choice of `y` inside the given enclosures. `None` when fewer than
/// two usable points remain (n = 0 or y possibly 0 are skipped).
pub fn loglog_slope(points: &[(u64, Ball)], prec: u32) -> Option<Ball> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, y) in points {
        if *n == 0 {
            continue;
        }
        if y.lower().is_negative() || y.lower().is_zero() {
            return None;
        }
        xs.push(Ball::from_i64(*n as i64, prec).ln().ok()?);
        ys.push(y.with_prec(prec).ln().ok()?);
    }
    if xs.len() < 2 {
        return None;
    }
    let k = Ball::from_i64(xs.len() as i64, prec);
    let sum = |v: &[Ball]| v.iter().fold(Ball::zero(prec), |a, b| a.add(b));
    let xbar = sum(&xs).div(&k).ok()?;
    let ybar = sum(&ys).div(&k).ok()?;
    let mut sxy = Ball::zero(prec);
    let mut sxx = Ball::zero(prec);
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x.sub(&xbar);
        sxy = sxy.add(&dx.mul(&y.sub(&ybar)));
        sxx = sxx.add(&dx.sqr());
    }
    sxy.div(&sxx).ok()
}

/// The last half of a grid (at least two points when available).
pub fn last_half<T: Clone>(v: &[T]) -> Vec<T> {
    let start = v.len() / 2;
    let start = start.min(v.len().saturating_sub(2));
    v[start..].to_vec()
}
