use std::cmp::Ordering;

use super::{BinaryMask, RasterImage};

/// Result of global thresholding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binarization {
    pub mask: BinaryMask,
    /// Pixels strictly above this value are foreground.
    pub threshold: u8,
    /// Set when the image has fewer than two distinct values; the mask is
    /// then all background.
    pub degenerate: bool,
}

/// Otsu binarization: foreground is every pixel strictly above the threshold
/// that maximizes the between-class variance of the 256-bin histogram.
pub fn threshold_otsu(img: &RasterImage) -> Binarization {
    let mut hist = [0u64; 256];
    for &v in img.pixels() {
        hist[v as usize] += 1;
    }
    match otsu_threshold(&hist) {
        Some(t) => Binarization {
            mask: BinaryMask::from_fn(img.width(), img.height(), |x, y| img.get(x, y) > t),
            threshold: t,
            degenerate: false,
        },
        None => Binarization {
            mask: BinaryMask::empty(img.width(), img.height()),
            threshold: img.pixels().iter().copied().max().unwrap_or(0),
            degenerate: true,
        },
    }
}

/// Smallest threshold maximizing between-class variance, or `None` when no
/// threshold separates two nonempty classes.
///
/// For a split at `t` with `n0` pixels (sum `s0`) at or below `t`, the
/// between-class variance is proportional to `(s0 * N - S * n0)^2 / (n0 * n1)`.
/// Candidates are compared exactly as rationals so ties resolve to the
/// smallest threshold regardless of floating-point rounding.
pub fn otsu_threshold(hist: &[u64; 256]) -> Option<u8> {
    let total: u64 = hist.iter().sum();
    let sum: u128 = hist.iter().enumerate().map(|(v, &c)| v as u128 * c as u128).sum();
    let mut best: Option<(u8, Score)> = None;
    let (mut n0, mut s0) = (0u64, 0u128);
    for t in 0..256usize {
        n0 += hist[t];
        s0 += t as u128 * hist[t] as u128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let score = Score::new(s0, n0, sum, total);
        if score.is_zero() {
            continue;
        }
        match &best {
            Some((_, b)) if score.cmp(b) != Ordering::Greater => {}
            _ => best = Some((t as u8, score)),
        }
    }
    best.map(|(t, _)| t)
}

#[derive(Debug, Clone, Copy)]
enum Score {
    Exact { num: u128, den: u128 },
    Approx(f64),
}

impl Score {
    fn new(s0: u128, n0: u64, sum: u128, total: u64) -> Self {
        let a = s0 as i128 * total as i128;
        let b = sum as i128 * n0 as i128;
        let diff = (a - b).unsigned_abs();
        let n1 = total - n0;
        let den = n0 as u128 * n1 as u128;
        match diff.checked_mul(diff) {
            Some(num) => Score::Exact { num, den },
            None => Score::Approx((diff as f64).powi(2) / den as f64),
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            Score::Exact { num, .. } => num == 0,
            Score::Approx(v) => v == 0.0,
        }
    }

    fn as_f64(&self) -> f64 {
        match *self {
            Score::Exact { num, den } => num as f64 / den as f64,
            Score::Approx(v) => v,
        }
    }

    fn cmp(&self, other: &Score) -> Ordering {
        match (*self, *other) {
            (Score::Exact { num: a, den: b }, Score::Exact { num: c, den: d }) => {
                cmp_fractions(a, b, c, d)
            }
            _ => self.as_f64().total_cmp(&other.as_f64()),
        }
    }
}

/// Exact comparison of `a/b` with `c/d` (`b, d > 0`) by continued-fraction
/// expansion, avoiding the overflow of cross-multiplication.
fn cmp_fractions(mut a: u128, mut b: u128, mut c: u128, mut d: u128) -> Ordering {
    let mut flipped = false;
    loop {
        let (q1, r1) = (a / b, a % b);
        let (q2, r2) = (c / d, c % d);
        let ord = if q1 != q2 {
            q1.cmp(&q2)
        } else if r1 == 0 || r2 == 0 {
            r1.cmp(&r2)
        } else {
            // r1/b < r2/d  <=>  b/r1 > d/r2
            (a, b, c, d) = (b, r1, d, r2);
            flipped = !flipped;
            continue;
        };
        return if flipped { ord.reverse() } else { ord };
    }
}
