//! Independent reference implementations used across the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rydberg_floquet::{Boundary, ConstrainedBasis};

pub type M2 = [[C64; 2]; 2];

const O: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

// bit 0 = ground = +1 eigenstate of Z
pub const X: M2 = [[O, ONE], [ONE, O]];
pub const Y: M2 = [[O, C64 { re: 0.0, im: -1.0 }], [I, O]];
pub const Z: M2 = [[ONE, O], [O, C64 { re: -1.0, im: 0.0 }]];
pub const P: M2 = [[ONE, O], [O, O]];
pub const N: M2 = [[O, O], [O, ONE]];

/// Dense `2^L` matrix of a product of single-site factors.
pub fn product(sites: usize, factors: &[(usize, M2)]) -> Vec<Vec<C64>> {
    let dim = 1usize << sites;
    let mut out = vec![vec![O; dim]; dim];
    let mask: usize = factors.iter().map(|(s, _)| 1 << s).sum();
    for col in 0..dim {
        for pattern in 0..(1usize << factors.len()) {
            let mut row = col & !mask;
            let mut amp = ONE;
            for (k, (s, m)) in factors.iter().enumerate() {
                let rb = pattern >> k & 1;
                row |= rb << s;
                amp *= m[rb][col >> s & 1];
            }
            if amp != O {
                out[row][col] += amp;
            }
        }
    }
    out
}

pub fn add(acc: &mut [Vec<C64>], term: &[Vec<C64>], scale: f64) {
    for (a, t) in acc.iter_mut().zip(term) {
        for (x, y) in a.iter_mut().zip(t) {
            *x += y * scale;
        }
    }
}

fn wrap(sites: usize, bc: Boundary, i: isize) -> Option<usize> {
    match bc {
        Boundary::Periodic => Some(i.rem_euclid(sites as isize) as usize),
        Boundary::Open => (0..sites as isize).contains(&i).then_some(i as usize),
    }
}

/// `sum_i P_{i-1} A_i P_{i+1}`, missing neighbours dropped.
pub fn pap(sites: usize, bc: Boundary, a: M2) -> Vec<Vec<C64>> {
    let mut acc = vec![vec![O; 1 << sites]; 1 << sites];
    for i in 0..sites as isize {
        let mut f = vec![(i as usize, a)];
        for d in [-1, 1] {
            if let Some(j) = wrap(sites, bc, i + d) {
                f.push((j, P));
            }
        }
        add(&mut acc, &product(sites, &f), 1.0);
    }
    acc
}

/// `(1/2) sum_i P_{i-1} (X_i X_{i+1} + Y_i Y_{i+1}) P_{i+2}` over bonds inside the chain.
pub fn pxyp(sites: usize, bc: Boundary) -> Vec<Vec<C64>> {
    let mut acc = vec![vec![O; 1 << sites]; 1 << sites];
    for i in 0..sites as isize {
        let Some(j) = wrap(sites, bc, i + 1) else { continue };
        let mut outer = Vec::new();
        for d in [-1, 2] {
            if let Some(k) = wrap(sites, bc, i + d) {
                outer.push((k, P));
            }
        }
        for m in [X, Y] {
            let mut f = vec![(i as usize, m), (j, m)];
            f.extend(outer.iter().copied());
            add(&mut acc, &product(sites, &f), 0.5);
        }
    }
    acc
}

pub fn ziz(sites: usize, bc: Boundary) -> Vec<Vec<C64>> {
    let mut acc = vec![vec![O; 1 << sites]; 1 << sites];
    for i in 0..sites as isize {
        if let Some(j) = wrap(sites, bc, i + 2) {
            add(&mut acc, &product(sites, &[(i as usize, Z), (j, Z)]), 1.0);
        }
    }
    acc
}

pub fn number(sites: usize) -> Vec<Vec<C64>> {
    let mut acc = vec![vec![O; 1 << sites]; 1 << sites];
    for i in 0..sites {
        add(&mut acc, &product(sites, &[(i, N)]), 1.0);
    }
    acc
}

/// Legal configurations by brute force over all bit strings.
pub fn legal_states(sites: usize, bc: Boundary) -> Vec<u64> {
    (0..1u64 << sites)
        .filter(|&s| {
            (0..sites).all(|i| match wrap(sites, bc, i as isize + 1) {
                Some(j) => !(s >> i & 1 == 1 && s >> j & 1 == 1),
                None => true,
            })
        })
        .collect()
}

/// Largest entrywise deviation between `full` projected onto `basis` and `get(r, c)`.
pub fn projected_error(basis: &ConstrainedBasis, full: &[Vec<C64>], get: impl Fn(usize, usize) -> C64) -> f64 {
    let states = basis.states();
    let mut worst: f64 = 0.0;
    for (c, &sc) in states.iter().enumerate() {
        for (r, &sr) in states.iter().enumerate() {
            worst = worst.max((full[sr as usize][sc as usize] - get(r, c)).norm());
        }
    }
    worst
}

/// Seeded normalized random vector.
pub fn random_state(dim: usize, seed: u64) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}
