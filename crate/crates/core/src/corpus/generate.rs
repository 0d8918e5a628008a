//! Random programs `A = P·D·P⁻¹` with `P` unimodular and `D` a rational
//! Jordan matrix, so every spectrum is rational and the analysis never stops
//! on an irrational eigenvalue.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{manifest_for, Corpus, CorpusEntry};
use crate::arith::rational::{int, rat};
use crate::arith::{QMatrix, Rational};
use crate::loopfront::{ClassTag, LoopProgram};

pub const CONSTRUCTION: &str = "A = P*D*P^-1, P unimodular (integer row operations and a permutation), \
D block diagonal with Jordan blocks of size <= 2 over {0, +-1/2, +-1, +-3/2, +-2, +-3}";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Guard count range; homogeneous programs always get one guard and
    /// generalized homogeneous ones at least two.
    pub m_min: usize,
    pub m_max: usize,
    /// Cycled through in order.
    pub classes: Vec<ClassTag>,
    pub count: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_min: 3,
            n_max: 4,
            m_min: 1,
            m_max: 3,
            classes: vec![ClassTag::Homogeneous],
            count: 10,
            seed: 42,
        }
    }
}

const EIGENVALUES: [(i64, i64); 11] =
    [(1, 1), (2, 1), (3, 1), (-1, 1), (-2, 1), (-3, 1), (1, 2), (-1, 2), (3, 2), (-3, 2), (0, 1)];

fn jordan_matrix(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    let mut d = QMatrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        let (p, q) = EIGENVALUES[rng.gen_range(0..EIGENVALUES.len())];
        let size = if i + 1 < n && rng.gen_bool(0.25) { 2 } else { 1 };
        for k in i..i + size {
            d.set(k, k, rat(p, q));
            if k > i {
                d.set(k - 1, k, Rational::one());
            }
        }
        i += size;
    }
    d
}

fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    let mut p = QMatrix::identity(n);
    if n < 2 {
        return p;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let s = if rng.gen_bool(0.5) { int(1) } else { int(-1) };
        for col in 0..n {
            let v = p.get(i, col) + &s * p.get(j, col);
            p.set(i, col, v);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    p.select_rows(&order)
}

fn small_vector(rng: &mut ChaCha8Rng, n: usize, bound: i64, nonzero: bool) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-bound..=bound))).collect();
        if !nonzero || v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

fn program(rng: &mut ChaCha8Rng, class: ClassTag, n: usize, m: usize) -> LoopProgram {
    let d = jordan_matrix(rng, n);
    let p = unimodular(rng, n);
    let p_inv = p.inverse().expect("unimodular matrices are invertible");
    let a = &(&p * &d) * &p_inv;
    let rows: Vec<Vec<Rational>> = (0..m).map(|_| small_vector(rng, n, 2, true)).collect();
    let f = QMatrix::from_rows(rows).expect("rectangular");
    let (c, b) = match class {
        ClassTag::Affine => (small_vector(rng, n, 2, true), small_vector(rng, m, 3, true)),
        _ => (vec![Rational::zero(); n], vec![Rational::zero(); m]),
    };
    let names = (1..=n).map(|i| format!("x{i}")).collect();
    let prog = LoopProgram::new(names, a, c, f, b).expect("consistent dimensions");
    debug_assert_eq!(prog.class_tag, class);
    prog
}

/// `count` programs, deterministic in `seed`.
pub fn generate(cfg: &GenConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let classes = if cfg.classes.is_empty() { vec![ClassTag::Homogeneous] } else { cfg.classes.clone() };
    let n_hi = cfg.n_max.max(cfg.n_min).max(1);
    let n_lo = cfg.n_min.clamp(1, n_hi);
    let entries: Vec<CorpusEntry> = (0..cfg.count)
        .map(|i| {
            let class = classes[i % classes.len()];
            let n = rng.gen_range(n_lo..=n_hi);
            let (m_lo, m_hi) = match class {
                ClassTag::Homogeneous => (1, 1),
                ClassTag::GeneralizedHomogeneous => (cfg.m_min.max(2), cfg.m_max.max(2)),
                ClassTag::Affine => (cfg.m_min.max(1), cfg.m_max.max(1)),
            };
            let m = rng.gen_range(m_lo..=m_hi.max(m_lo));
            let id = format!("{}{:03}", class.short().to_lowercase(), i);
            CorpusEntry { id, program: program(&mut rng, class, n, m), expected_locus: None }
        })
        .collect();
    let mut manifest = manifest_for(Some(cfg.seed), CONSTRUCTION, &entries);
    manifest.classes = classes.iter().map(|c| c.short().to_string()).collect();
    manifest.n_range = [n_lo, n_hi];
    manifest.m_range = [cfg.m_min, cfg.m_max];
    Corpus { manifest, entries }
}
