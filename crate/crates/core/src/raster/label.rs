use super::BinaryMask;
use crate::error::{Error, Result};

/// Component labels of a mask; 0 is background, components are `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    /// `component_areas[k - 1]` is the pixel count of label `k`.
    component_areas: Vec<usize>,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn component_count(&self) -> usize {
        self.component_areas.len()
    }

    /// Area of component `label` (1-based).
    pub fn area(&self, label: u32) -> Option<usize> {
        (label as usize).checked_sub(1).and_then(|i| self.component_areas.get(i).copied())
    }

    pub fn component_areas(&self) -> &[usize] {
        &self.component_areas
    }

    pub fn mask_of(&self, label: u32) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| self.get(x, y) == label)
    }
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        let p = parent[i as usize];
        parent[i as usize] = parent[p as usize];
        i = p;
    }
    i
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// 8-connected labeling by two-pass union-find. Final labels follow the
/// raster-scan order in which each component is first encountered.
pub fn connected_components(mask: &BinaryMask) -> LabelMap {
    let (w, h) = (mask.width(), mask.height());
    let mut provisional = vec![0u32; w * h];
    let mut parent: Vec<u32> = vec![0];
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            // previously visited 8-neighbors: W, NW, N, NE
            let mut current = 0u32;
            for (dx, dy) in [(-1isize, 0isize), (-1, -1), (0, -1), (1, -1)] {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx as usize >= w {
                    continue;
                }
                let l = provisional[ny as usize * w + nx as usize];
                if l == 0 {
                    continue;
                }
                if current == 0 {
                    current = l;
                } else {
                    union(&mut parent, current, l);
                }
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            provisional[y * w + x] = current;
        }
    }

    let mut remap = vec![0u32; parent.len()];
    let mut areas = Vec::new();
    let mut labels = vec![0u32; w * h];
    for (i, &p) in provisional.iter().enumerate() {
        if p == 0 {
            continue;
        }
        let root = find(&mut parent, p) as usize;
        if remap[root] == 0 {
            areas.push(0);
            remap[root] = areas.len() as u32;
        }
        let l = remap[root];
        labels[i] = l;
        areas[l as usize - 1] += 1;
    }
    LabelMap { width: w, height: h, labels, component_areas: areas }
}

/// Mask of the largest component with area at least `min_area`; ties go to
/// the smaller label.
pub fn largest_component(labels: &LabelMap, min_area: usize) -> Result<BinaryMask> {
    let mut best: Option<(u32, usize)> = None;
    for (i, &area) in labels.component_areas.iter().enumerate() {
        if area < min_area {
            continue;
        }
        if best.map_or(true, |(_, a)| area > a) {
            best = Some((i as u32 + 1, area));
        }
    }
    match best {
        Some((label, _)) => Ok(labels.mask_of(label)),
        None => Err(Error::NoComponent {
            min_area,
            largest: labels.component_areas.iter().copied().max().unwrap_or(0),
        }),
    }
}
