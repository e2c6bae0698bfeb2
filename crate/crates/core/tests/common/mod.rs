#![allow(dead_code)]

use nctorus::algebra::{AlgebraElement, PhaseContext};
use nctorus::lattice::{Int, IntMatrix, LatticeVector};
use nctorus::scalar::{GaussianRational, PhaseScalar};
use nctorus::states::StateCandidate;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vector(rng: &mut impl Rng, bound: Int) -> LatticeVector {
    LatticeVector::pair(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

pub fn rational(rng: &mut impl Rng) -> BigRational {
    BigRational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=4).into())
}

pub fn gaussian(rng: &mut impl Rng) -> GaussianRational {
    GaussianRational::new(rational(rng), rational(rng))
}

pub fn element(rng: &mut impl Rng, terms: usize, bound: Int) -> AlgebraElement {
    let mut a = AlgebraElement::zero(2);
    for _ in 0..rng.gen_range(1..=terms) {
        let c = PhaseScalar::monomial(gaussian(rng), rng.gen_range(-3..=3));
        a.add_term(vector(rng, bound), c);
    }
    a
}

/// Values are dyadic, so exact and numeric evaluation see the same numbers.
pub fn state(rng: &mut impl Rng, max_orbit: u128) -> StateCandidate {
    let mut pairs: Vec<(u128, f64)> = Vec::new();
    for j in 1..=max_orbit {
        if rng.gen_bool(0.7) {
            pairs.push((j, f64::from(rng.gen_range(-8i32..=8)) / 8.0));
        }
    }
    StateCandidate::from_pairs(&pairs).unwrap()
}

pub fn distinct_vectors(rng: &mut impl Rng, count: usize, bound: Int) -> Vec<LatticeVector> {
    let mut out: Vec<LatticeVector> = Vec::new();
    while out.len() < count {
        let v = vector(rng, bound);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

pub fn context(h: f64) -> PhaseContext {
    PhaseContext::genus_one(h).unwrap()
}

fn elementary(rng: &mut impl Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n);
    while j == i {
        j = rng.gen_range(0..n);
    }
    m.set(i, j, rng.gen_range(-2..=2));
    m
}

/// Product of elementary shears, optionally with a reflection: `|det| = 1`.
pub fn unimodular(rng: &mut impl Rng, n: usize, steps: usize, allow_reflection: bool) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..steps {
        m = m.mul(&elementary(rng, n)).unwrap();
    }
    if allow_reflection && rng.gen_bool(0.5) {
        let mut r = IntMatrix::identity(n);
        r.set(0, 0, -1);
        m = m.mul(&r).unwrap();
    }
    m
}

/// `S = [[0,-1],[1,0]]`, `T = [[1,1],[0,1]]` and their inverses.
pub fn sl2_generators() -> Vec<IntMatrix> {
    [
        [[0, -1], [1, 0]],
        [[0, 1], [-1, 0]],
        [[1, 1], [0, 1]],
        [[1, -1], [0, 1]],
    ]
    .iter()
    .map(|r| IntMatrix::from_rows(r.iter().map(|x| x.to_vec()).collect()).unwrap())
    .collect()
}

pub fn random_word(rng: &mut impl Rng, len: usize) -> IntMatrix {
    let gens = sl2_generators();
    let mut m = IntMatrix::identity(2);
    for _ in 0..len {
        m = m.mul(gens.choose(rng).unwrap()).unwrap();
    }
    m
}

fn scalar_text(rng: &mut impl Rng) -> String {
    let r = |rng: &mut dyn rand::RngCore| -> String {
        let n = rng.gen_range(0..=7);
        match rng.gen_range(0..3) {
            0 => format!("{n}/{}", rng.gen_range(1..=5)),
            _ => n.to_string(),
        }
    };
    let mut s = match rng.gen_range(0..4) {
        0 => format!("{}i", r(rng)),
        1 => format!("{}{}{}i", r(rng), ["+", "-"][rng.gen_range(0..2)], r(rng)),
        2 => format!("-{}", r(rng)),
        _ => r(rng),
    };
    if rng.gen_bool(0.3) {
        s += &format!(" z^{}", rng.gen_range(-4..=4));
    }
    s
}

/// Random well-formed expression text in the element grammar.
pub fn expression(rng: &mut impl Rng, depth: u32) -> String {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return if rng.gen_bool(0.6) {
            format!("W[{},{}]", rng.gen_range(-3..=3), rng.gen_range(-3..=3))
        } else {
            scalar_text(rng)
        };
    }
    let sub = |rng: &mut ChaCha8Rng| expression(rng, depth - 1);
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    match rng.gen_range(0..6) {
        0 => format!("{} + {}", sub(&mut local), sub(&mut local)),
        1 => format!("{} - ({})", sub(&mut local), sub(&mut local)),
        2 => format!("({}) * ({})", sub(&mut local), sub(&mut local)),
        3 => format!("({})^*", sub(&mut local)),
        4 => format!("-({})", sub(&mut local)),
        _ => format!("({})", sub(&mut local)),
    }
}
