use super::BinaryMask;

/// Sobel edge map of a binary mask.
///
/// The 3x3 Sobel kernels run over the mask as 0/1 values, with out-of-canvas
/// taps replicating the nearest in-bounds pixel. A pixel is an edge iff it is
/// foreground and either gradient component is nonzero.
pub fn sobel_edges(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let at = |x: isize, y: isize| -> i32 {
        let cx = x.clamp(0, w - 1) as usize;
        let cy = y.clamp(0, h - 1) as usize;
        mask.get(cx, cy) as i32
    };
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        let (x, y) = (x as isize, y as isize);
        let gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
        let gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
        gx != 0 || gy != 0
    })
}
