//! One dimensional searches used by the Remez exchange and the root finders.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximise `g` on `[lo, hi]`, where `guess` is the best grid point.
///
/// Golden section narrows the bracket; an interior maximum is then located
/// as the zero of a central-difference derivative by bisection. The ends of
/// the bracket are also candidates. Returns `(argmax, max)`.
pub fn maximize<F>(mut g: F, lo: f64, guess: f64, hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut best = (guess, g(guess)?);
    if hi <= lo {
        return Ok(best);
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    for _ in 0..200 {
        if b - a <= 1e-10 {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d)?;
        }
    }
    let golden = if gc >= gd { (c, gc) } else { (d, gd) };
    if golden.1 >= best.1 {
        best = golden;
    }

    let h = 1e-6f64.min(0.1 * (hi - lo));
    let delta = 1e-6f64.min(0.25 * (hi - lo));
    let (l, r) = ((best.0 - delta).max(lo + h), (best.0 + delta).min(hi - h));
    if l < r {
        let mut slope = |u: f64| -> Result<f64> { Ok(g(u + h)? - g(u - h)?) };
        let (mut l, mut r) = (l, r);
        if slope(l)? > 0.0 && slope(r)? < 0.0 {
            for _ in 0..60 {
                let mid = 0.5 * (l + r);
                if mid <= l || mid >= r {
                    break;
                }
                if slope(mid)? > 0.0 {
                    l = mid;
                } else {
                    r = mid;
                }
            }
            let x = 0.5 * (l + r);
            best = (x, g(x)?);
        }
    }

    for end in [lo, hi] {
        let v = g(end)?;
        if v > best.1 {
            best = (end, v);
        }
    }
    Ok(best)
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
