//! The tower GL_2(q) ⊂ GL_4(q) ⊂ GL_8(q) ⊂ ... under diagonal embeddings
//! `h ↦ diag(h, h)`, with the normalized projective rank metric, and the
//! finite-level bounds on word images used for its completion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::ser_rational;
use crate::linalg::Matrix;
use crate::seminorm::{critical_length, projective_dist, projective_norm};
use crate::words::{evaluate, is_reduced, Word};

/// Largest matrix size handled at any level.
pub const MAX_TOWER_DIM: usize = 256;

/// An invertible `2^level x 2^level` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerElement {
    level: u32,
    matrix: Matrix,
}

fn level_of(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Validation(format!("dimension {n} is not a power of two")));
    }
    Ok(n.trailing_zeros())
}

fn dim_of(level: u32) -> Result<usize> {
    let n = 1usize.checked_shl(level).filter(|&n| n <= MAX_TOWER_DIM);
    n.ok_or_else(|| Error::Validation(format!("level {level} exceeds dimension cap {MAX_TOWER_DIM}")))
}

fn rational(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

impl TowerElement {
    pub fn new(matrix: Matrix) -> Result<TowerElement> {
        let level = level_of(matrix.rows())?;
        dim_of(level)?;
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("tower elements are square".into()));
        }
        if !matrix.is_invertible() {
            return Err(Error::NotInvertible);
        }
        Ok(TowerElement { level, matrix })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn normalized_norm(&self) -> Result<BigRational> {
        Ok(rational(projective_norm(&self.matrix)?, self.matrix.rows()))
    }
}

/// `diag(g, .., g)` with `2^(target - level)` blocks.
pub fn diagonal_embed(g: &TowerElement, target_level: u32) -> Result<TowerElement> {
    if target_level < g.level {
        return Err(Error::LevelDecrease { from: g.level, to: target_level });
    }
    dim_of(target_level)?;
    let copies = 1usize << (target_level - g.level);
    Ok(TowerElement { level: target_level, matrix: g.matrix.block_diagonal_repeat(copies) })
}

/// `dist(a, b) / 2^level`.
pub fn normalized_dist(a: &TowerElement, b: &TowerElement) -> Result<BigRational> {
    if a.level != b.level {
        return Err(Error::LevelMismatch(a.level, b.level));
    }
    Ok(rational(projective_dist(&a.matrix, &b.matrix)?, a.matrix.rows()))
}

/// The word with every constant embedded at `level`.
pub fn embed_word(w: &Word, level: u32) -> Result<Word> {
    let base = level_of(w.n())?;
    if level < base {
        return Err(Error::LevelDecrease { from: base, to: level });
    }
    let n = dim_of(level)?;
    let copies = 1usize << (level - base);
    let constants = w.constants().iter().map(|c| c.block_diagonal_repeat(copies)).collect();
    Word::new(w.field(), n, w.r(), w.letters().to_vec(), constants)
}

/// `crit / (l·2^m) - 1/2^m`.
fn normalized_floor(crit: usize, l: usize, dim: usize) -> BigRational {
    rational(crit, l * dim) - rational(1, dim)
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    #[serde(serialize_with = "ser_rational")]
    pub epsilon: BigRational,
    pub seed: u64,
    /// Rank budget `⌊ε·2^m⌋` of each correction.
    pub rank_budget: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub distances: Vec<BigRational>,
    pub critical_length: usize,
    #[serde(serialize_with = "ser_rational")]
    pub floor: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub difference: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub bound: BigRational,
    pub within_bound: bool,
    /// Sampled `dist(w(h), w'(h)) <= (l+1)ε`.
    pub pointwise_within: bool,
    pub attempts: usize,
}

fn ser_rationals<S: serde::Serializer>(xs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&crate::io::rational_to_string(x))?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: u32,
    pub dim: usize,
    pub length: usize,
    pub critical_length: usize,
    #[serde(serialize_with = "ser_rational")]
    pub normalized_critical_length: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub floor: BigRational,
    pub floor_positive: bool,
    pub perturbation: Option<PerturbationReport>,
}

/// `c·(I + A·B)` with `A`, `B` random of inner size `rank`, retried until
/// invertible; its distance to `c` is at most `rank / 2^m`.
fn perturb<R: rand::Rng + ?Sized>(c: &Matrix, rank: usize, rng: &mut R) -> Matrix {
    let n = c.rows();
    let id = Matrix::identity(c.field(), n);
    if rank == 0 {
        return c.clone();
    }
    loop {
        let a = Matrix::random(c.field(), n, rank, rng);
        let b = Matrix::random(c.field(), rank, n, rng);
        let step = id.add(&a.mul(&b)).expect("same shape");
        if step.is_invertible() {
            return c.mul(&step);
        }
    }
}

const PERTURBATION_ATTEMPTS: usize = 64;
const POINTWISE_SAMPLES: u64 = 4;

/// Embeds `w` at level `m`, reports the normalized diameter floor there, and
/// optionally perturbs every constant by at most `epsilon` to compare floors.
pub fn levelwise_image_floor(w: &Word, m: u32, epsilon: Option<&BigRational>, seed: u64) -> Result<LevelReport> {
    let wm = embed_word(w, m)?;
    let dim = wm.n();
    let l = wm.len();
    if l < 2 {
        return Err(Error::TooShort(l));
    }
    let crit = critical_length(&wm)?;
    let floor = normalized_floor(crit, l, dim);
    let zero = BigRational::from_integer(BigInt::from(0));
    let perturbation = match epsilon {
        None => None,
        Some(eps) => {
            if eps < &zero {
                return Err(Error::Validation("epsilon must be nonnegative".into()));
            }
            let scaled = eps * BigInt::from(dim);
            let rank_budget = (scaled.floor().to_integer()).try_into().unwrap_or(usize::MAX).min(dim);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut attempts = 0;
            let perturbed = loop {
                attempts += 1;
                let cs: Vec<Matrix> = wm.constants().iter().map(|c| perturb(c, rank_budget, &mut rng)).collect();
                let candidate = Word::new(wm.field(), dim, wm.r(), wm.letters().to_vec(), cs)?;
                if is_reduced(&candidate).reduced {
                    break candidate;
                }
                if attempts >= PERTURBATION_ATTEMPTS {
                    return Err(Error::HypothesesFail("perturbations keep producing non-reduced words".into()));
                }
            };
            let distances: Vec<BigRational> = wm
                .constants()
                .iter()
                .zip(perturbed.constants())
                .map(|(a, b)| Ok(rational(projective_dist(a, b)?, dim)))
                .collect::<Result<_>>()?;
            let p_crit = critical_length(&perturbed)?;
            let p_floor = normalized_floor(p_crit, l, dim);
            let difference = (&p_floor - &floor).abs();
            let bound = eps * BigInt::from(2 * (l + 1));
            let pointwise_bound = eps * BigInt::from(l + 1);
            let mut pointwise_within = true;
            for s in 0..POINTWISE_SAMPLES {
                let mut prng = ChaCha8Rng::seed_from_u64(seed);
                prng.set_stream(s + 1);
                let h: Vec<Matrix> =
                    (0..wm.r()).map(|_| Matrix::random_invertible(wm.field(), dim, &mut prng)).collect();
                let d = rational(projective_dist(&evaluate(&wm, &h)?, &evaluate(&perturbed, &h)?)?, dim);
                pointwise_within &= d <= pointwise_bound;
            }
            Some(PerturbationReport {
                epsilon: eps.clone(),
                seed,
                rank_budget,
                distances,
                critical_length: p_crit,
                floor: p_floor,
                within_bound: difference <= bound,
                difference,
                bound,
                pointwise_within,
                attempts,
            })
        }
    };
    Ok(LevelReport {
        level: m,
        dim,
        length: l,
        critical_length: crit,
        normalized_critical_length: rational(crit, dim),
        floor_positive: floor > zero,
        floor,
        perturbation,
    })
}

/// [`levelwise_image_floor`] for every level in `levels`, computed in parallel.
pub fn level_sweep(
    w: &Word,
    levels: std::ops::RangeInclusive<u32>,
    epsilon: Option<&BigRational>,
    seed: u64,
) -> Result<Vec<LevelReport>> {
    let levels: Vec<u32> = levels.collect();
    levels.par_iter().map(|&m| levelwise_image_floor(w, m, epsilon, seed.wrapping_add(m as u64))).collect()
}
