#![allow(dead_code)]

use catchen::{PixelGrid, SecretKey};
use rand::Rng;

pub fn random_key<R: Rng>(rng: &mut R) -> SecretKey {
    SecretKey::new(
        rng.gen_range(1..=50),
        rng.gen_range(1..=50),
        rng.gen_range(1..=20),
        rng.gen_range(-10.0..10.0),
        rng.gen_range(-10.0..10.0),
        rng.gen_range(0.0..30.0),
        rng.gen_range(20.0..=28.4),
    )
    .expect("generated key is valid")
}

pub fn random_grid<R: Rng>(rng: &mut R, side: usize) -> PixelGrid {
    let mut data = vec![0u8; side * side];
    rng.fill(&mut data[..]);
    PixelGrid::new(side, data).expect("square")
}

/// Smooth 100x100-style test picture: concentric rings over a gradient.
pub fn synthetic_picture(side: usize) -> PixelGrid {
    let c = side as f64 / 2.0;
    let data = (0..side * side)
        .map(|i| {
            let (x, y) = ((i / side) as f64, (i % side) as f64);
            let r = ((x - c).powi(2) + (y - c).powi(2)).sqrt();
            let ring = (r / 3.0).sin() * 60.0;
            (128.0 + ring + (x - c) * 0.6).clamp(0.0, 255.0) as u8
        })
        .collect();
    PixelGrid::new(side, data).expect("square")
}
