//! Deterministic test-signal generators.
//!
//! Text kinds: uniform random characters, repeated random units, a
//! five-word simplified-English stream, and the prime-modulo generator — a
//! compact arithmetic model whose output looks random locally and which
//! the score should therefore *not* reward.
//!
//! Image kinds: white noise, stripes, half/half fields, and a synthetic
//! "scene" class (smooth colour fields plus a few solid shapes plus fine
//! texture) that stands in for natural photos at desk scale.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hierarchy::DataTensor;

/// 26 lowercase letters plus space, the default random-text alphabet.
pub const RAND_TEXT_ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz ";

/// The fixed word list for the simplified-English stream.
pub const SIMPLE_WORDS: [&str; 5] = ["time", "water", "light", "sound", "earth"];

/// Uniform random text over [`RAND_TEXT_ALPHABET`].
pub fn rand_text(len: usize, seed: u64) -> String {
    let chars: Vec<char> = RAND_TEXT_ALPHABET.chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| chars[rng.gen_range(0..chars.len())]).collect()
}

/// A random unit of `k` lowercase letters repeated out to `len` characters.
pub fn repeat_text(k: usize, len: usize, seed: u64) -> String {
    assert!(k >= 1, "repeat unit must be non-empty");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit: Vec<char> = (0..k).map(|_| (b'a' + rng.gen_range(0..26u8)) as char).collect();
    (0..len).map(|i| unit[i % k]).collect()
}

/// The same five English words sampled uniformly, space separated.
pub fn simple_english(len: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(len + 8);
    while out.len() < len {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(SIMPLE_WORDS[rng.gen_range(0..SIMPLE_WORDS.len())]);
    }
    out.truncate(len);
    out
}

/// The prime-modulo text model: `N = inp[0]`; for each further term `z`,
/// pick the next prime cyclically, build the sequence of its powers mod
/// `N`, rotate it right by `z`, and accumulate; finally map each total
/// through `chars[total mod 53]` over lowercase, uppercase, space.
pub fn prime_modulo_text(primes: &[u64], inp: &[u64]) -> String {
    assert!(!primes.is_empty() && !inp.is_empty());
    let n = inp[0] as usize;
    let mut totals = vec![0u64; n];
    for (p_idx, &offset) in inp[1..].iter().enumerate() {
        let p = primes[p_idx % primes.len()];
        let mut to_add = Vec::with_capacity(n);
        let mut cur_pow = 1u64;
        for _ in 0..n {
            to_add.push(cur_pow);
            cur_pow = cur_pow * p % n as u64;
        }
        let off = (offset as usize) % n.max(1);
        to_add.rotate_right(off);
        for (t, a) in totals.iter_mut().zip(&to_add) {
            *t += a;
        }
    }
    let chars: Vec<char> = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ "
        .chars()
        .collect();
    totals.iter().map(|&t| chars[(t % 53) as usize]).collect()
}

/// Uniform RGB noise in [0,1], quantised to 8 bits per channel.
pub fn white_noise_image(rows: usize, cols: usize, seed: u64) -> DataTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..rows * cols * 3)
        .map(|_| rng.gen_range(0..=255u32) as f64 / 255.0)
        .collect();
    DataTensor::new(vec![rows, cols], 3, data).expect("valid tensor")
}

/// Black and white stripes of the given width; `angle` in {0, 45, 90}
/// degrees.
pub fn stripes_image(rows: usize, cols: usize, width: usize, angle: u32, _seed: u64) -> DataTensor {
    let width = width.max(1);
    let mut data = Vec::with_capacity(rows * cols * 3);
    for r in 0..rows {
        for c in 0..cols {
            let phase = match angle {
                90 => r,
                45 => r + c,
                _ => c,
            };
            let v = if (phase / width) % 2 == 0 { 0.0 } else { 1.0 };
            data.extend_from_slice(&[v, v, v]);
        }
    }
    DataTensor::new(vec![rows, cols], 3, data).expect("valid tensor")
}

/// Half black, half white with the dividing line at `angle` in {0, 45, 90}.
/// A stripe of width equal to the full image degenerates to this at angle 0.
pub fn halves_image(rows: usize, cols: usize, angle: u32, _seed: u64) -> DataTensor {
    let mut data = Vec::with_capacity(rows * cols * 3);
    for r in 0..rows {
        for c in 0..cols {
            let dark = match angle {
                90 => r < rows / 2,
                45 => r + c < (rows + cols) / 2,
                _ => c < cols / 2,
            };
            let v = if dark { 0.0 } else { 1.0 };
            data.extend_from_slice(&[v, v, v]);
        }
    }
    DataTensor::new(vec![rows, cols], 3, data).expect("valid tensor")
}

/// Synthetic stand-in for a natural photo at desk scale: a smooth
/// low-frequency colour field, a few solid shapes, and fine texture,
/// quantised to 8 bits.
pub fn scene_image(rows: usize, cols: usize, seed: u64) -> DataTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // bilinear background from a coarse control grid
    let grid = 4usize;
    let mut control = vec![[0.0f64; 3]; (grid + 1) * (grid + 1)];
    for cell in control.iter_mut() {
        for ch in cell.iter_mut() {
            *ch = rng.gen_range(0.15..0.85);
        }
    }
    let mut data = vec![0.0f64; rows * cols * 3];
    for r in 0..rows {
        for c in 0..cols {
            let fy = r as f64 / rows as f64 * grid as f64;
            let fx = c as f64 / cols as f64 * grid as f64;
            let (gy, gx) = (fy.floor() as usize, fx.floor() as usize);
            let (ty, tx) = (fy - gy as f64, fx - gx as f64);
            for ch in 0..3 {
                let p00 = control[gy * (grid + 1) + gx][ch];
                let p01 = control[gy * (grid + 1) + gx + 1][ch];
                let p10 = control[(gy + 1) * (grid + 1) + gx][ch];
                let p11 = control[(gy + 1) * (grid + 1) + gx + 1][ch];
                let v = p00 * (1.0 - ty) * (1.0 - tx)
                    + p01 * (1.0 - ty) * tx
                    + p10 * ty * (1.0 - tx)
                    + p11 * ty * tx;
                data[(r * cols + c) * 3 + ch] = v;
            }
        }
    }
    // a few solid shapes
    let shapes = rng.gen_range(2..=4);
    for _ in 0..shapes {
        let colour = [
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.05..0.95),
        ];
        let h = rng.gen_range(rows / 6..rows / 2);
        let w = rng.gen_range(cols / 6..cols / 2);
        let r0 = rng.gen_range(0..rows - h);
        let c0 = rng.gen_range(0..cols - w);
        let round = rng.gen_bool(0.5);
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                if round {
                    let dy = (r as f64 - (r0 as f64 + h as f64 / 2.0)) / (h as f64 / 2.0);
                    let dx = (c as f64 - (c0 as f64 + w as f64 / 2.0)) / (w as f64 / 2.0);
                    if dy * dy + dx * dx > 1.0 {
                        continue;
                    }
                }
                for ch in 0..3 {
                    data[(r * cols + c) * 3 + ch] = colour[ch];
                }
            }
        }
    }
    // fine texture, then 8-bit quantisation
    let amp = 0.22;
    for v in data.iter_mut() {
        *v += rng.gen_range(-amp..amp);
        *v = (v.clamp(0.0, 1.0) * 255.0).round() / 255.0;
    }
    DataTensor::new(vec![rows, cols], 3, data).expect("valid tensor")
}

/// The 8x8 worked-example image.
///
/// 19 identical blue-ish pixels concentrated bottom-left, 18 identical
/// green-ish pixels top-right, and 27 scattered distinct outlier colours.
/// Tiled 2x2, the patch compositions form three groups of three (mostly
/// outlier, mostly blue, mostly green) with the remaining seven patches
/// mixed.
pub fn toy_image() -> DataTensor {
    let blue = [64.0 / 255.0, 90.0 / 255.0, 204.0 / 255.0];
    let green = [77.0 / 255.0, 191.0 / 255.0, 89.0 / 255.0];

    // per 2x2 patch: composition (x, blue, green) summing to 4, laid out
    // over the 4x4 patch grid
    const A: (u8, u8, u8) = (3, 1, 0); // mostly outliers
    const B: (u8, u8, u8) = (1, 3, 0); // mostly blue
    const C: (u8, u8, u8) = (1, 0, 3); // mostly green
    let comps: [[(u8, u8, u8); 4]; 4] = [
        [A, (4, 0, 0), C, C],
        [(2, 2, 0), A, (2, 0, 2), C],
        [B, (0, 1, 3), A, (1, 2, 1)],
        [B, B, (1, 1, 2), (2, 1, 1)],
    ];
    // totals: x = 9+3+3+12 = 27, blue = 3+9+7 = 19, green = 9+9 = 18.
    // The seven mixed compositions are pairwise distinct, none matches a
    // group composition, and no coordinate plane carries more than two of
    // them: under diagonal covariances a shared zero axis is nearly free,
    // so a plane-aligned clique of four would cluster on its own.
    let mut data = vec![0.0f64; 8 * 8 * 3];
    let mut outlier_idx = 0u32;
    for pr in 0..4 {
        for pc in 0..4 {
            let (x, b, _g) = comps[pr][pc];
            // fill the patch cells in raster order: x's first, then blue,
            // then green
            for cell in 0..4u8 {
                let r = pr * 2 + (cell / 2) as usize;
                let c = pc * 2 + (cell % 2) as usize;
                let colour = if cell < x {
                    // scattered distinct outliers on a fixed lattice
                    let k = outlier_idx;
                    outlier_idx += 1;
                    [
                        ((23 + 67 * k) % 256) as f64 / 255.0,
                        ((211 + 97 * k) % 256) as f64 / 255.0,
                        ((128 + 151 * k) % 256) as f64 / 255.0,
                    ]
                } else if cell < x + b {
                    blue
                } else {
                    green
                };
                for ch in 0..3 {
                    data[(r * 8 + c) * 3 + ch] = colour[ch];
                }
            }
        }
    }
    debug_assert_eq!(outlier_idx, 27);
    DataTensor::new(vec![8, 8], 3, data).expect("valid tensor")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(rand_text(100, 5), rand_text(100, 5));
        assert_ne!(rand_text(100, 5), rand_text(100, 6));
        assert_eq!(scene_image(16, 16, 9).data, scene_image(16, 16, 9).data);
    }

    #[test]
    fn repeat_text_repeats() {
        let s = repeat_text(5, 23, 1);
        let unit: Vec<char> = s.chars().take(5).collect();
        for (i, ch) in s.chars().enumerate() {
            assert_eq!(ch, unit[i % 5]);
        }
        assert_eq!(s.len(), 23);
    }

    #[test]
    fn simple_english_uses_only_the_word_list() {
        let s = simple_english(200, 3);
        for word in s.split(' ') {
            assert!(
                SIMPLE_WORDS.iter().any(|w| w.starts_with(word)),
                "unexpected token {word:?}"
            );
        }
    }

    #[test]
    fn stripes_degenerate_to_halves() {
        let s = stripes_image(16, 16, 8, 0, 0);
        let h = halves_image(16, 16, 0, 0);
        // stripe width = half the image width at angle 0 alternates once
        assert_eq!(s.data, h.data);
    }

    #[test]
    fn toy_image_has_the_worked_counts() {
        let img = toy_image();
        let blue = [64.0 / 255.0, 90.0 / 255.0, 204.0 / 255.0];
        let green = [77.0 / 255.0, 191.0 / 255.0, 89.0 / 255.0];
        let mut blues = 0;
        let mut greens = 0;
        let mut others: Vec<[u8; 3]> = Vec::new();
        for i in 0..64 {
            let c = img.cell(i);
            if c == blue {
                blues += 1;
            } else if c == green {
                greens += 1;
            } else {
                others.push([
                    (c[0] * 255.0).round() as u8,
                    (c[1] * 255.0).round() as u8,
                    (c[2] * 255.0).round() as u8,
                ]);
            }
        }
        assert_eq!(blues, 19);
        assert_eq!(greens, 18);
        assert_eq!(others.len(), 27);
        let distinct: std::collections::HashSet<[u8; 3]> = others.iter().copied().collect();
        assert_eq!(distinct.len(), 27, "outlier colours must all differ");
    }

    #[test]
    fn prime_modulo_is_exact_on_a_small_case() {
        // hand-checked: N=4, primes (3), offsets (1): powers of 3 mod 4 =
        // [1,3,1,3], rotated right by 1 = [3,1,3,1]
        let out = prime_modulo_text(&[3], &[4, 1]);
        let chars: Vec<char> = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ "
            .chars()
            .collect();
        let expect: String = [3usize, 1, 3, 1].iter().map(|&i| chars[i]).collect();
        assert_eq!(out, expect);
    }
}
