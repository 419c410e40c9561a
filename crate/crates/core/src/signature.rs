//! Border signature of a region: the distance from the region centroid to its
//! boundary as a function of polar angle, and the maxima of that function.
//!
//! Angles are measured counterclockwise from `+x` in the mathematical frame,
//! i.e. with the image row axis negated: `theta = atan2(-(y - row), x - col)`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::polygeom::Point;
use crate::raster::{BinaryMask, NEIGHBORS_CW};

/// Mean pixel location of a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub row: f64,
    pub col: f64,
}

impl Centroid {
    pub fn new(row: f64, col: f64) -> Self {
        Self { row, col }
    }

    /// The centroid as an image-frame point (`x = col`, `y = row`).
    pub fn point(&self) -> Point {
        Point::new(self.col, self.row)
    }
}

pub fn region_centroid(mask: &BinaryMask) -> Result<Centroid> {
    let (mut n, mut sr, mut sc) = (0usize, 0f64, 0f64);
    for (x, y) in mask.foreground() {
        n += 1;
        sr += y as f64;
        sc += x as f64;
    }
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    Ok(Centroid { row: sr / n as f64, col: sc / n as f64 })
}

/// Closed boundary as a sequence of `(x, y)` pixels; consecutive points,
/// including last to first, are 8-adjacent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryChain {
    points: Vec<(usize, usize)>,
}

impl BoundaryChain {
    pub fn new(points: Vec<(usize, usize)>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Moore-neighbor boundary tracing with Jacob's stopping criterion.
///
/// Starts at the top-most, then left-most foreground pixel and walks clockwise
/// on screen. The walk stops when it repeats its first move, i.e. enters the
/// second pixel again from the same backtrack cell. Checking the first move
/// rather than the start pixel keeps 1-pixel-wide shapes from looping, since
/// their start pixel is re-entered from a different side. Only the component
/// containing the start pixel is traced.
pub fn trace_boundary(mask: &BinaryMask) -> Result<BoundaryChain> {
    let start = mask.foreground().next().ok_or(Error::EmptyRegion)?;
    let fg = |(x, y): (isize, isize)| mask.get_or_bg(x, y);
    let step = |(x, y): (usize, usize), d: usize| {
        (x as isize + NEIGHBORS_CW[d].0, y as isize + NEIGHBORS_CW[d].1)
    };
    // one move: next pixel and the direction from it back to its backtrack cell
    let advance = |p: (usize, usize), back: usize| -> Option<((usize, usize), usize)> {
        let dir = (1..8).map(|k| (back + k) % 8).find(|&d| fg(step(p, d)))?;
        let (nx, ny) = step(p, dir);
        let (bx, by) = step(p, (dir + 7) % 8);
        let offset = (bx - nx, by - ny);
        let next_back = NEIGHBORS_CW
            .iter()
            .position(|&o| o == offset)
            .expect("consecutive ring cells are adjacent");
        Some(((nx as usize, ny as usize), next_back))
    };

    // west of the first raster pixel is always background
    let mut state = (start, 0usize);
    let mut chain = vec![start];
    let mut first_move = None;
    let limit = 8 * mask.count() + 16;
    for _ in 0..limit {
        let Some(next) = advance(state.0, state.1) else {
            break; // isolated pixel
        };
        if first_move == Some(next) {
            if chain.len() > 1 && chain.last() == Some(&start) {
                chain.pop();
            }
            break;
        }
        first_move.get_or_insert(next);
        chain.push(next.0);
        state = next;
    }
    Ok(BoundaryChain { points: chain })
}

/// Polar angle of image point `(x, y)` around `c`, in `[0, 2pi)`.
pub fn polar_angle(x: f64, y: f64, c: &Centroid) -> f64 {
    let t = (-(y - c.row)).atan2(x - c.col);
    let t = if t < 0.0 { t + TAU } else { t };
    if t >= TAU { 0.0 } else { t }
}

/// Radius per angular bin; bin `k` covers `[2pi k / n, 2pi (k + 1) / n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSignature {
    pub centroid: Centroid,
    pub radii: Vec<f64>,
}

impl RadialSignature {
    pub fn n_bins(&self) -> usize {
        self.radii.len()
    }

    pub fn bin_width(&self) -> f64 {
        TAU / self.radii.len() as f64
    }

    /// Angle at the middle of bin `k`.
    pub fn bin_angle(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.bin_width()
    }

    pub fn bin_of(&self, theta: f64) -> usize {
        bin_index(theta, self.radii.len())
    }

    pub fn mean(&self) -> f64 {
        self.radii.iter().sum::<f64>() / self.radii.len() as f64
    }

    /// Coefficient of variation (population standard deviation over mean).
    pub fn coefficient_of_variation(&self) -> f64 {
        let m = self.mean();
        let var = self.radii.iter().map(|r| (r - m).powi(2)).sum::<f64>() / self.radii.len() as f64;
        var.sqrt() / m
    }

    /// CSV with columns `bin_index,theta_radians,radius_px`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_index,theta_radians,radius_px\n");
        for (k, r) in self.radii.iter().enumerate() {
            let _ = writeln!(out, "{k},{},{}", sig6(self.bin_angle(k)), sig6(*r));
        }
        out
    }
}

fn bin_index(theta: f64, n: usize) -> usize {
    ((theta / TAU * n as f64).floor() as usize).min(n - 1)
}

/// Builds the radial distance signature of a boundary.
///
/// Each bin holds the largest centroid distance among the boundary points
/// falling in it, so spicule tips survive on non-star-shaped contours. Empty
/// bins are filled by circular linear interpolation between the nearest
/// nonempty bins on either side.
pub fn radial_signature(chain: &BoundaryChain, centroid: Centroid, n_bins: usize) -> Result<RadialSignature> {
    if n_bins < 8 {
        return Err(Error::InvalidParameter(format!("n_bins {n_bins} < 8")));
    }
    if chain.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut bins: Vec<Option<f64>> = vec![None; n_bins];
    let mut extent = 0f64;
    for &(x, y) in chain.points() {
        let (x, y) = (x as f64, y as f64);
        let d = (x - centroid.col).hypot(y - centroid.row);
        extent = extent.max(d);
        let k = bin_index(polar_angle(x, y, &centroid), n_bins);
        bins[k] = Some(bins[k].map_or(d, |v: f64| v.max(d)));
    }
    if extent == 0.0 {
        return Err(Error::ZeroExtent);
    }
    Ok(RadialSignature { centroid, radii: fill_circular(&bins) })
}

fn fill_circular(bins: &[Option<f64>]) -> Vec<f64> {
    let n = bins.len();
    let known: Vec<usize> = (0..n).filter(|&i| bins[i].is_some()).collect();
    if known.len() == 1 {
        return vec![bins[known[0]].unwrap(); n];
    }
    let mut out: Vec<f64> = bins.iter().map(|b| b.unwrap_or(0.0)).collect();
    for (j, &lo) in known.iter().enumerate() {
        let hi = known[(j + 1) % known.len()];
        let gap = (hi + n - lo) % n;
        let (a, b) = (bins[lo].unwrap(), bins[hi].unwrap());
        for s in 1..gap {
            out[(lo + s) % n] = a + (b - a) * s as f64 / gap as f64;
        }
    }
    out
}

/// Circular moving average over an odd `window`.
pub fn smooth_signature(sig: &RadialSignature, window: usize) -> Result<RadialSignature> {
    let n = sig.n_bins();
    if window == 0 || window % 2 == 0 || window >= n {
        return Err(Error::InvalidParameter(format!(
            "smoothing window {window} must be odd and in [1, {n})"
        )));
    }
    if window == 1 {
        return Ok(sig.clone());
    }
    let half = window / 2;
    let radii = (0..n)
        .map(|i| {
            (0..window).map(|j| sig.radii[(i + n + j - half) % n]).sum::<f64>() / window as f64
        })
        .collect();
    Ok(RadialSignature { centroid: sig.centroid, radii })
}

/// One signature maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub bin: usize,
    pub theta: f64,
    pub radius: f64,
}

/// Signature maxima sorted by ascending angle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignatureExtrema {
    pub points: Vec<Extremum>,
}

impl SignatureExtrema {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with columns `theta,r,x,y`; `x, y` are image coordinates.
    pub fn to_csv(&self, centroid: &Centroid) -> String {
        let mut out = String::from("theta,r,x,y\n");
        for e in &self.points {
            let p = polar_to_cartesian(e.radius, e.theta, centroid);
            let _ = writeln!(out, "{},{},{},{}", sig6(e.theta), sig6(e.radius), sig6(p.x), sig6(p.y));
        }
        out
    }
}

/// Extremum detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Minimum height, in pixels, above the higher flanking minimum.
    pub prominence: f64,
    /// Minimum circular distance, in bins, between kept maxima.
    pub min_separation: usize,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self { prominence: 2.0, min_separation: 5 }
    }
}

fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Local maxima of the signature.
///
/// A run of equal bins (usually a single bin) is a candidate when the first
/// difference entering it is positive, the one leaving it is negative and the
/// second difference across it is negative; the candidate sits at the middle
/// of the run. Candidates whose topographic prominence is below
/// `params.prominence` are dropped, then candidates closer than
/// `params.min_separation` bins are thinned, keeping the larger radius and,
/// on ties, the smaller bin.
pub fn find_maxima(sig: &RadialSignature, params: DetectorParams) -> SignatureExtrema {
    let r = &sig.radii;
    let n = r.len();
    let Some(origin) = (0..n).find(|&i| r[i] != r[(i + n - 1) % n]) else {
        return SignatureExtrema::default();
    };

    let mut candidates = Vec::new();
    let mut i = 0;
    while i < n {
        let first = (origin + i) % n;
        let mut len = 1;
        while len < n && r[(first + len) % n] == r[first] {
            len += 1;
        }
        let last = (first + len - 1) % n;
        let rise = r[first] - r[(first + n - 1) % n];
        let fall = r[(last + 1) % n] - r[last];
        if rise > 0.0 && fall < 0.0 && fall - rise < 0.0 {
            let peak = (first + (len - 1) / 2) % n;
            if prominence(r, first, last) >= params.prominence {
                candidates.push(peak);
            }
        }
        i += len;
    }

    candidates.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for c in candidates {
        if kept.iter().all(|&k| circular_distance(c, k, n) >= params.min_separation) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    SignatureExtrema {
        points: kept
            .into_iter()
            .map(|bin| Extremum { bin, theta: sig.bin_angle(bin), radius: r[bin] })
            .collect(),
    }
}

/// Topographic prominence of the plateau `first..=last` on a circular signal:
/// walk outward on each side until a higher bin (or all the way round), take
/// the minimum seen on each side, and measure the height above the larger of
/// the two. Among equal heights the smaller bin index counts as higher, so
/// exactly one of several equal summits keeps its full height.
fn prominence(r: &[f64], first: usize, last: usize) -> f64 {
    let n = r.len();
    let v = r[first];
    let len = (last + n - first) % n + 1;
    let in_plateau = |j: usize| (j + n - first) % n < len;
    let higher = |j: usize| r[j] > v || (r[j] == v && j < first && !in_plateau(j));
    let side_min = |start: usize, forward: bool| {
        let mut m = v;
        let mut j = start;
        for _ in 0..n {
            j = if forward { (j + 1) % n } else { (j + n - 1) % n };
            if higher(j) {
                break;
            }
            m = m.min(r[j]);
        }
        m
    };
    v - side_min(first, false).max(side_min(last, true))
}

/// Maxima with a guaranteed minimum of three points.
///
/// When the detector finds fewer than three maxima, the three largest-radius
/// bins spaced at least `min_separation` apart are returned instead and the
/// second element of the tuple is `true`.
pub fn select_extrema(sig: &RadialSignature, params: DetectorParams) -> (SignatureExtrema, bool) {
    let found = find_maxima(sig, params);
    if found.len() >= 3 {
        return (found, false);
    }
    let n = sig.n_bins();
    let best = |lo: isize, hi: isize| -> usize {
        (lo..=hi)
            .map(|k| k.rem_euclid(n as isize) as usize)
            .max_by(|&a, &b| sig.radii[a].total_cmp(&sig.radii[b]).then(b.cmp(&a)))
            .expect("nonempty arc")
    };
    let top = best(0, n as isize - 1);
    // remaining picks: largest bins in arcs centered a third of a turn away
    let half = (n / 72) as isize;
    let mut kept = vec![top];
    for j in 1..3 {
        let c = (top + j * n / 3) as isize;
        kept.push(best(c - half, c + half));
    }
    kept.sort_unstable();
    let points = kept
        .into_iter()
        .map(|bin| Extremum { bin, theta: sig.bin_angle(bin), radius: sig.radii[bin] })
        .collect();
    (SignatureExtrema { points }, true)
}

/// Image-frame point at polar `(r, theta)` around `centroid`:
/// `x = col + r cos(theta)`, `y = row - r sin(theta)`.
pub fn polar_to_cartesian(r: f64, theta: f64, centroid: &Centroid) -> Point {
    Point::new(centroid.col + r * theta.cos(), centroid.row - r * theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn block(w: usize, h: usize, x0: usize, y0: usize, side: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| x >= x0 && x < x0 + side && y >= y0 && y < y0 + side)
    }

    fn disk(size: usize, r: f64) -> BinaryMask {
        let c = (size / 2) as f64;
        BinaryMask::from_fn(size, size, |x, y| {
            let (dx, dy) = (x as f64 - c, y as f64 - c);
            dx * dx + dy * dy <= r * r
        })
    }

    fn sig_from(radii: Vec<f64>) -> RadialSignature {
        RadialSignature { centroid: Centroid::new(0.0, 0.0), radii }
    }

    #[test]
    fn centroid_examples() {
        let c = region_centroid(&block(3, 3, 0, 0, 3)).unwrap();
        assert_eq!((c.row, c.col), (1.0, 1.0));
        let mut m = BinaryMask::empty(10, 10);
        m.set(7, 5, true);
        let c = region_centroid(&m).unwrap();
        assert_eq!((c.row, c.col), (5.0, 7.0));
        let mut m = BinaryMask::empty(3, 3);
        m.set(0, 0, true);
        m.set(0, 2, true);
        let c = region_centroid(&m).unwrap();
        assert_eq!((c.row, c.col), (1.0, 0.0));
        assert!(matches!(region_centroid(&BinaryMask::empty(2, 2)), Err(Error::EmptyRegion)));
    }

    #[test]
    fn trace_single_pixel() {
        let mut m = BinaryMask::empty(5, 5);
        m.set(2, 3, true);
        assert_eq!(trace_boundary(&m).unwrap().points(), &[(2, 3)]);
        assert!(trace_boundary(&BinaryMask::empty(3, 3)).is_err());
    }

    #[test]
    fn trace_block_clockwise() {
        let chain = trace_boundary(&block(5, 5, 1, 1, 3)).unwrap();
        assert_eq!(
            chain.points(),
            &[(1, 1), (2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2)]
        );
        // touching the canvas edge traces the same way
        let chain = trace_boundary(&block(3, 3, 0, 0, 3)).unwrap();
        assert_eq!(chain.len(), 8);
        assert_eq!(chain.points()[0], (0, 0));
        assert_eq!(chain.points()[1], (1, 0));
    }

    #[test]
    fn trace_thin_limb_revisits() {
        // a horizontal line is walked out and back
        let m = BinaryMask::from_fn(6, 3, |x, y| y == 1 && (1..5).contains(&x));
        let chain = trace_boundary(&m).unwrap();
        assert_eq!(chain.points(), &[(1, 1), (2, 1), (3, 1), (4, 1), (3, 1), (2, 1)]);
    }

    #[test]
    fn trace_is_closed_and_adjacent() {
        let m = disk(50, 20.0);
        let chain = trace_boundary(&m).unwrap();
        let pts = chain.points();
        for i in 0..pts.len() {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            assert!(a.0.abs_diff(b.0) <= 1 && a.1.abs_diff(b.1) <= 1 && a != b);
        }
    }

    #[test]
    fn square_signature_geometry() {
        // half-side 20 square centered on (30, 30)
        let m = BinaryMask::from_fn(61, 61, |x, y| (10..=50).contains(&x) && (10..=50).contains(&y));
        let c = region_centroid(&m).unwrap();
        let sig = radial_signature(&trace_boundary(&m).unwrap(), c, 360).unwrap();
        assert!((sig.radii[sig.bin_of(0.0)] - 20.0).abs() <= 1.0);
        assert!((sig.radii[sig.bin_of(FRAC_PI_4)] - 20.0 * 2f64.sqrt()).abs() <= 1.0);
    }

    #[test]
    fn single_point_fills_all_bins() {
        let chain = BoundaryChain::new(vec![(8, 3)]);
        let sig = radial_signature(&chain, Centroid::new(3.0, 3.0), 16).unwrap();
        assert!(sig.radii.iter().all(|&r| r == 5.0));
    }

    #[test]
    fn signature_errors() {
        let chain = BoundaryChain::new(vec![(2, 2)]);
        assert!(matches!(radial_signature(&chain, Centroid::new(2.0, 2.0), 16), Err(Error::ZeroExtent)));
        assert!(radial_signature(&chain, Centroid::new(0.0, 0.0), 4).is_err());
        assert!(radial_signature(&BoundaryChain::new(vec![]), Centroid::new(0.0, 0.0), 16).is_err());
    }

    #[test]
    fn empty_bins_interpolate_circularly() {
        // points at 0 and 90 degrees with radii 2 and 4, 8 bins
        let chain = BoundaryChain::new(vec![(12, 10), (10, 6)]);
        let sig = radial_signature(&chain, Centroid::new(10.0, 10.0), 8).unwrap();
        assert_abs_diff_eq!(sig.radii[0], 2.0);
        assert_abs_diff_eq!(sig.radii[1], 3.0);
        assert_abs_diff_eq!(sig.radii[2], 4.0);
        // the long way round from bin 2 back to bin 0 spans 6 steps
        assert_abs_diff_eq!(sig.radii[5], 4.0 - 2.0 * 3.0 / 6.0);
    }

    #[test]
    fn smoothing_rules() {
        let sig = sig_from((0..16).map(|i| (i * i) as f64).collect());
        assert_eq!(smooth_signature(&sig, 1).unwrap(), sig);
        let flat = sig_from(vec![3.5; 12]);
        for w in [3, 5, 11] {
            let s = smooth_signature(&flat, w).unwrap();
            for r in s.radii {
                assert_abs_diff_eq!(r, 3.5, epsilon = 1e-12);
            }
        }
        let mut imp = vec![0.0; 20];
        imp[10] = 10.0;
        let s = smooth_signature(&sig_from(imp), 5).unwrap();
        for (i, r) in s.radii.iter().enumerate() {
            let want = if (8..=12).contains(&i) { 2.0 } else { 0.0 };
            assert_abs_diff_eq!(*r, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(smooth_signature(&sig, 7).unwrap().mean(), sig.mean(), epsilon = 1e-9);
        assert!(smooth_signature(&sig, 4).is_err());
        assert!(smooth_signature(&sig, 0).is_err());
        assert!(smooth_signature(&sig, 17).is_err());
    }

    #[test]
    fn constant_signature_has_no_maxima() {
        assert!(find_maxima(&sig_from(vec![7.0; 90]), DetectorParams::default()).is_empty());
    }

    #[test]
    fn cosine_maxima() {
        let n = 360;
        let radii = (0..n)
            .map(|k| {
                let t = (k as f64 + 0.5) * TAU / n as f64;
                10.0 + 2.0 * (4.0 * t).cos()
            })
            .collect();
        let ex = find_maxima(&sig_from(radii), DetectorParams::default());
        assert_eq!(ex.len(), 4);
        for target in [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
            let target_bin = ((target / TAU * n as f64).round() as usize) % n;
            let d = ex.points.iter().map(|e| circular_distance(e.bin, target_bin, n)).min().unwrap();
            assert!(d <= 1, "no maximum near bin {target_bin}");
        }
        let thetas: Vec<f64> = ex.points.iter().map(|e| e.theta).collect();
        assert!(thetas.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn equal_shoulders_count_once() {
        // flat tip: two equal summits over a shallow dip, twice round the circle
        let mut r = vec![20.0; 120];
        for base in [20, 80] {
            r[base] = 29.0;
            r[base + 1] = 30.0;
            r[base + 2] = 29.8;
            r[base + 3] = 30.0;
            r[base + 4] = 29.0;
        }
        let ex = find_maxima(&sig_from(r), DetectorParams { prominence: 2.0, min_separation: 1 });
        assert_eq!(ex.points.iter().map(|e| e.bin).collect::<Vec<_>>(), vec![21, 81]);
    }

    #[test]
    fn prominence_and_separation_filters() {
        let mut r = vec![10.0; 100];
        r[20] = 15.0; // strong peak
        r[50] = 11.0; // weak peak, prominence 1
        r[70] = 14.0;
        r[73] = 13.0; // close to 70
        let sig = sig_from(r);
        let ex = find_maxima(&sig, DetectorParams { prominence: 2.0, min_separation: 5 });
        let bins: Vec<usize> = ex.points.iter().map(|e| e.bin).collect();
        assert_eq!(bins, vec![20, 70]);
        let ex = find_maxima(&sig, DetectorParams { prominence: 0.5, min_separation: 1 });
        let bins: Vec<usize> = ex.points.iter().map(|e| e.bin).collect();
        assert_eq!(bins, vec![20, 50, 70, 73]);
    }

    #[test]
    fn equal_peaks_tie_to_smaller_bin() {
        let mut r = vec![0.0; 40];
        r[10] = 5.0;
        r[12] = 5.0;
        let ex = find_maxima(&sig_from(r), DetectorParams { prominence: 1.0, min_separation: 5 });
        assert_eq!(ex.points.iter().map(|e| e.bin).collect::<Vec<_>>(), vec![10]);
    }

    #[test]
    fn fallback_picks_three_spread_bins() {
        let mut r = vec![10.0; 60];
        r[30] = 20.0;
        r[31] = 19.0;
        r[40] = 18.0;
        r[50] = 12.0;
        let (ex, fallback) = select_extrema(&sig_from(r), DetectorParams { prominence: 50.0, min_separation: 5 });
        assert!(fallback);
        assert_eq!(ex.points.iter().map(|e| e.bin).collect::<Vec<_>>(), vec![10, 30, 50]);
    }

    #[test]
    fn polar_conversion() {
        let o = Centroid::new(0.0, 0.0);
        let p = polar_to_cartesian(1.0, 0.0, &o);
        assert_abs_diff_eq!(p.x, 1.0);
        assert_abs_diff_eq!(p.y, 0.0);
        let p = polar_to_cartesian(2.0, FRAC_PI_2, &o);
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, -2.0);
        let c = Centroid::new(4.0, 9.0);
        let p = polar_to_cartesian(0.0, 1.234, &c);
        assert_eq!((p.x, p.y), (9.0, 4.0));
    }

    #[test]
    fn angle_convention_round_trip() {
        let c = Centroid::new(10.0, 20.0);
        for k in 0..36 {
            let t = k as f64 * TAU / 36.0;
            let p = polar_to_cartesian(5.0, t, &c);
            assert_abs_diff_eq!(polar_angle(p.x, p.y, &c), t, epsilon = 1e-9);
        }
    }

    #[test]
    fn csv_exports() {
        let sig = sig_from(vec![1.0; 8]);
        let csv = sig.to_csv();
        assert!(csv.starts_with("bin_index,theta_radians,radius_px\n0,0.392699,1\n"));
        assert_eq!(csv.lines().count(), 9);
        let ex = SignatureExtrema { points: vec![Extremum { bin: 0, theta: 0.0, radius: 2.0 }] };
        assert_eq!(ex.to_csv(&Centroid::new(1.0, 1.0)), "theta,r,x,y\n0,2,3,1\n");
    }
}
