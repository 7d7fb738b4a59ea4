#![allow(dead_code)]

use ph_feedback::generators::{gaussian, random_skew, random_spd, Knobs};
use ph_feedback::linalg::{block_diag, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `(n, m, knobs)` for a mixed random instance; every draw is feasible.
pub fn sample_instance(seed: u64, max_n: usize, max_m: usize) -> (usize, usize, Knobs) {
    let mut r = rng(seed ^ 0x5eed_0000_0000);
    let n = r.random_range(1..=max_n);
    let m = r.random_range(1..=max_m);
    let sing = n >= 2 && r.random_bool(0.15);
    let axis = n >= 2 + usize::from(sing) && r.random_bool(0.15);
    let a = if axis { 2 } else { 0 };
    let s = usize::from(sing);
    let core = n - a - s;
    let rank_e = r.random_bool(0.7).then(|| r.random_range(a..=n - s));
    let s_definite = r.random_bool(0.2);
    let lo = if s_definite { m } else { 0 };
    let rank_w = r.random_bool(0.7).then(|| r.random_range(lo..=core + m));
    let knobs = Knobs {
        rank_e,
        rank_w,
        force_axis_modes: axis,
        force_singular: sing,
        s_definite,
    };
    (n, m, knobs)
}

/// Plain `(E, J, R)` with `R = diag(R₁₁ ≻ 0, 0)`; `decouple` zeroes the
/// off-diagonal `E` and `J` blocks so the second block behaves on its own.
pub fn lemma1_instance(seed: u64) -> (Mat, Mat, Mat, usize) {
    let mut r = rng(seed ^ 0x1e33_a001);
    let n = r.random_range(1..=7);
    let n1 = r.random_range(0..=n);
    let n2 = n - n1;
    let rank_e = r.random_range(0..=n);
    let decouple = r.random_bool(0.35);
    let l = gaussian(&mut r, n, rank_e);
    let mut e = &l * l.transpose();
    let mut j = random_skew(&mut r, n);
    if decouple {
        let e11 = e.view((0, 0), (n1, n1)).into_owned();
        let e22 = e.view((n1, n1), (n2, n2)).into_owned();
        e = block_diag(&[&e11, &e22]);
        let j11 = j.view((0, 0), (n1, n1)).into_owned();
        let mut j22 = j.view((n1, n1), (n2, n2)).into_owned();
        if r.random_bool(0.5) {
            j22.fill(0.0);
        }
        j = block_diag(&[&j11, &j22]);
    }
    let r11 = random_spd(&mut r, n1, 0.3, 2.0);
    let rr = block_diag(&[&r11, &Mat::zeros(n2, n2)]);
    (e, j, rr, n1)
}

/// `(E, J, R, B)` for the admissible-feedback checks: `E ⪰ 0`, `R ⪰ 0` of random ranks.
pub fn lemma23_instance(seed: u64) -> (Mat, Mat, Mat, Mat) {
    let mut r = rng(seed ^ 0x1e33_a023);
    let n = r.random_range(1..=7);
    let k = r.random_range(0..=3);
    let (ke, kr) = (r.random_range(0..=n), r.random_range(0..=n));
    let le = gaussian(&mut r, n, ke);
    let lr = gaussian(&mut r, n, kr);
    let e = &le * le.transpose();
    let rr = &lr * lr.transpose();
    let j = random_skew(&mut r, n);
    let b = gaussian(&mut r, n, k);
    (e, j, rr, b)
}
