use std::collections::VecDeque;

use massround::raster::{
    connected_components, dilate, erode, largest_component, open, otsu_threshold, read_pgm, sobel_edges,
    threshold_otsu, write_pgm, BinaryMask, RasterImage, StructuringElement,
};
use massround::synth::{generate_shape, ShapeSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mask(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density))
}

fn random_se(rng: &mut impl Rng) -> StructuringElement {
    let side = [1, 3, 5][rng.gen_range(0..3)];
    let mut bits: Vec<bool> = (0..side * side).map(|_| rng.gen_bool(0.6)).collect();
    bits[side * side / 2] = true;
    StructuringElement::new(side, bits).unwrap()
}

fn naive_erode(m: &BinaryMask, side: usize, bits: &[bool]) -> BinaryMask {
    let half = (side / 2) as isize;
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        for j in 0..side {
            for i in 0..side {
                if !bits[j * side + i] {
                    continue;
                }
                let (sx, sy) = (x as isize + i as isize - half, y as isize + j as isize - half);
                let inside = sx >= 0 && sy >= 0 && (sx as usize) < m.width() && (sy as usize) < m.height();
                if !inside || !m.get(sx as usize, sy as usize) {
                    return false;
                }
            }
        }
        true
    })
}

fn flood_fill_count(m: &BinaryMask) -> usize {
    let (w, h) = (m.width(), m.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for (x, y) in m.foreground() {
        if seen[y * w + x] {
            continue;
        }
        count += 1;
        seen[y * w + x] = true;
        let mut queue = VecDeque::from([(x, y)]);
        while let Some((cx, cy)) = queue.pop_front() {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (cx as isize + dx, cy as isize + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if m.get(nx, ny) && !seen[ny * w + nx] {
                        seen[ny * w + nx] = true;
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
    }
    count
}

/// Exhaustive sweep with exact integer cross-multiplication.
fn brute_force_otsu(img: &RasterImage) -> Option<u8> {
    let n = img.pixels().len() as i128;
    let s: i128 = img.pixels().iter().map(|&v| v as i128).sum();
    let mut best: Option<(u8, i128, i128)> = None;
    for t in 0..=255u8 {
        let (n0, s0) = img
            .pixels()
            .iter()
            .filter(|&&v| v <= t)
            .fold((0i128, 0i128), |(c, acc), &v| (c + 1, acc + v as i128));
        let n1 = n - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let num = (s0 * n - s * n0).pow(2);
        let den = n0 * n1;
        match best {
            Some((_, bn, bd)) if num * bd <= bn * den => {}
            _ => best = Some((t, num, den)),
        }
    }
    best.map(|(t, _, _)| t)
}

#[test]
fn erosion_matches_naive_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let density = rng.gen_range(0.3..0.95);
        let m = random_mask(&mut rng, 32, 32, density);
        let se = random_se(&mut rng);
        let side = se.side();
        let half = (side / 2) as isize;
        let mut bits = vec![false; side * side];
        for (dx, dy) in se.offsets() {
            bits[((dy + half) as usize) * side + (dx + half) as usize] = true;
        }
        assert_eq!(erode(&m, &se), naive_erode(&m, side, &bits));
    }
}

#[test]
fn component_count_matches_flood_fill() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let density = rng.gen_range(0.05..0.6);
        let m = random_mask(&mut rng, 32, 32, density);
        let labels = connected_components(&m);
        assert_eq!(labels.component_count(), flood_fill_count(&m));
        assert_eq!(labels.component_areas().iter().sum::<usize>(), m.count());
    }
}

#[test]
fn otsu_matches_exhaustive_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..50 {
        let levels: Vec<u8> = (0..rng.gen_range(1..6)).map(|_| rng.gen()).collect();
        let img = RasterImage::from_fn(24, 24, |_, _| {
            if i % 2 == 0 {
                levels[rng.gen_range(0..levels.len())]
            } else {
                rng.gen()
            }
        })
        .unwrap();
        let mut hist = [0u64; 256];
        for &v in img.pixels() {
            hist[v as usize] += 1;
        }
        assert_eq!(otsu_threshold(&hist), brute_force_otsu(&img));
        let bin = threshold_otsu(&img);
        assert_eq!(bin.degenerate, brute_force_otsu(&img).is_none());
        if let Some(t) = brute_force_otsu(&img) {
            assert_eq!(bin.mask.count(), img.pixels().iter().filter(|&&v| v > t).count());
        }
    }
}

#[test]
fn opening_removes_specks_and_keeps_block() {
    let m = BinaryMask::from_fn(20, 20, |x, y| (5..12).contains(&x) && (5..12).contains(&y) || (x, y) == (16, 3));
    let opened = open(&m, &StructuringElement::square(3).unwrap());
    assert!(!opened.get(16, 3));
    assert_eq!(opened.count(), 49);
    let largest = largest_component(&connected_components(&m), 5).unwrap();
    assert_eq!(largest.count(), 49);
}

fn adjacent_to_background(m: &BinaryMask, x: usize, y: usize, eight: bool) -> bool {
    (-1isize..=1).any(|dy| {
        (-1isize..=1).any(|dx| {
            (dx, dy) != (0, 0) && (eight || dx == 0 || dy == 0) && !m.get_or_bg(x as isize + dx, y as isize + dy)
        })
    })
}

#[test]
fn sobel_disk_edges_match_neighborhood_scan() {
    let m = generate_shape(&ShapeSpec::disk(30.0, (40.0, 40.0)), 81, 81).unwrap();
    let edges = sobel_edges(&m);
    let oracle = BinaryMask::from_fn(81, 81, |x, y| m.get(x, y) && adjacent_to_background(&m, x, y, true));
    assert_eq!(edges, oracle);
    assert_eq!(edges.count(), 236);
    let l1_length = 8.0 * 30.0;
    assert!((edges.count() as f64 - l1_length).abs() <= 0.2 * l1_length);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erosion_and_opening_are_subsets(seed in any::<u64>(), density in 0.2f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mask(&mut rng, 24, 20, density);
        let se = random_se(&mut rng);
        prop_assert!(erode(&m, &se).is_subset_of(&m));
        prop_assert!(open(&m, &se).is_subset_of(&m));
        prop_assert_eq!(open(&open(&m, &se), &se), open(&m, &se));
        prop_assert!(m.is_subset_of(&dilate(&m, &se)));
    }

    #[test]
    fn sobel_edges_lie_on_region_border(seed in any::<u64>(), density in 0.2f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_mask(&mut rng, 20, 20, density);
        let e = sobel_edges(&m);
        prop_assert!(e.is_subset_of(&m));
        for (x, y) in e.foreground() {
            let on_border = x == 0 || y == 0 || x == 19 || y == 19;
            prop_assert!(on_border || adjacent_to_background(&m, x, y, true));
        }
    }

    #[test]
    fn pgm_round_trip(w in 1usize..40, h in 1usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img = RasterImage::from_fn(w, h, |_, _| rng.gen()).unwrap();
        prop_assert_eq!(read_pgm(&write_pgm(&img)).unwrap(), img);
    }
}
