//! Lower bounds on the diameter of word images `w(SL_n(q)^r)` in the
//! projective rank metric: the critical-length floor, an explicit pair of
//! distant image points, sampling, and the bound for non-singular words
//! obtained along the strong-reduction chain.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::LinearGroup;
use crate::io::rational_to_string;
use crate::linalg::{rank_of, unit_vector, Matrix, Vector};
use crate::seminorm::{critical_length, projective_dist};
use crate::witness::construct_witness;
use crate::words::{evaluate, is_singular, require_reduced, strong_reduction_chain, Word};

fn require_length(w: &Word) -> Result<()> {
    if w.len() < 2 {
        return Err(Error::TooShort(w.len()));
    }
    require_reduced(w)
}

/// `⌈crit / l⌉ - 1`.
pub fn diameter_floor(w: &Word) -> Result<usize> {
    require_length(w)?;
    let crit = critical_length(w)?;
    Ok(crit.div_ceil(w.len()) - 1)
}

/// `crit / l - 1` as an exact rational.
pub fn diameter_floor_exact(w: &Word) -> Result<BigRational> {
    require_length(w)?;
    let crit = critical_length(w)?;
    Ok(BigRational::new(BigInt::from(crit), BigInt::from(w.len())) - BigRational::from_integer(BigInt::from(1)))
}

/// Largest `d` the witness construction admits for realizing image points:
/// `⌊min(crit - 1, n) / l⌋`.
pub fn admissible_d(w: &Word) -> Result<usize> {
    require_length(w)?;
    let crit = critical_length(w)?;
    Ok(crit.saturating_sub(1).min(w.n()) / w.len())
}

/// Two image points `g = w(a)`, `h = w(b)` with `a, b` in SL and their exact
/// distance, certified by `g^{-1}h` moving `d` independent vectors.
#[derive(Clone, Debug)]
pub struct DistantPair {
    pub g: Matrix,
    pub h: Matrix,
    pub d: usize,
    pub dist: usize,
}

/// [`realize_distant_pair`] for a chosen block size `d`.
pub fn realize_distant_pair_with(w: &Word, d: usize, seed: u64) -> Result<DistantPair> {
    require_length(w)?;
    let n = w.n();
    if d == 0 {
        return Err(Error::HypothesesFail("block size d is 0".into()));
    }
    if 3 * d > n {
        return Err(Error::HypothesesFail(format!("3d = {} exceeds n = {n}", 3 * d)));
    }
    // Bi-invariance: strip the boundary constants, realize there, put them back.
    let id = Matrix::identity(w.field(), n);
    let inner = w.with_constant(0, id.clone())?.with_constant(w.len(), id)?;
    let block = |k: usize| -> Vec<Vector> { (k * d..(k + 1) * d).map(|i| unit_vector(n, i)).collect() };
    let to_fail = |e: Error| match e {
        Error::HypothesisViolation(v) => Error::HypothesesFail(v.join("; ")),
        other => other,
    };
    let first = construct_witness(&inner, &block(0), &block(1), LinearGroup::Sl, seed).map_err(to_fail)?;
    let second =
        construct_witness(&inner, &block(0), &block(2), LinearGroup::Sl, seed.wrapping_add(1)).map_err(to_fail)?;
    let g = evaluate(w, &first.h)?;
    let h = evaluate(w, &second.h)?;
    let dist = projective_dist(&g, &h)?;
    Ok(DistantPair { g, h, d, dist })
}

/// Distant pair for the largest admissible `d`.
pub fn realize_distant_pair(w: &Word, seed: u64) -> Result<DistantPair> {
    let d = admissible_d(w)?;
    realize_distant_pair_with(w, d, seed)
}

/// Whether `rank(g^{-1}h - λI) >= d` for every nonzero λ.
pub fn pair_certificate_holds(pair: &DistantPair) -> Result<bool> {
    let m = pair.g.inverse()?.mul(&pair.h);
    Ok(m.field().nonzero().all(|lambda| m.minus_scalar(lambda).rank() >= pair.d))
}

fn sample_tuple(w: &Word, group: LinearGroup, seed: u64, index: u64) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..w.r())
        .map(|_| match group {
            LinearGroup::Gl => Matrix::random_invertible(w.field(), w.n(), &mut rng),
            _ => Matrix::random_special(w.field(), w.n(), &mut rng),
        })
        .collect()
}

/// Largest pairwise distance among `samples` image points; sample `i` only
/// depends on `(seed, i)`.
pub fn empirical_diameter_in(w: &Word, samples: usize, seed: u64, group: LinearGroup) -> Result<usize> {
    let points: Vec<Matrix> = (0..samples as u64)
        .into_par_iter()
        .map(|i| evaluate(w, &sample_tuple(w, group, seed, i)))
        .collect::<Result<_>>()?;
    let inverses: Vec<Matrix> = points.par_iter().map(|g| g.inverse()).collect::<Result<_>>()?;
    let best = (0..points.len())
        .into_par_iter()
        .map(|a| {
            (a + 1..points.len())
                .map(|b| crate::seminorm::projective_norm(&inverses[a].mul(&points[b])))
                .try_fold(0usize, |acc, d| d.map(|d| acc.max(d)))
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(best.into_iter().max().unwrap_or(0))
}

/// [`empirical_diameter_in`] over SL.
pub fn empirical_diameter(w: &Word, samples: usize, seed: u64) -> Result<usize> {
    empirical_diameter_in(w, samples, seed, LinearGroup::Sl)
}

/// `1 / ((1 + 2l)^⌊l/2⌋ · l)`.
pub fn chain_constant(l: usize) -> BigRational {
    let base = BigInt::from(1 + 2 * l).pow((l / 2) as u32);
    BigRational::new(BigInt::from(1), base * BigInt::from(l))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepVerdict {
    Consistent,
    /// The lower bounds contradict the step inequality.
    Inconsistent,
    /// One side has no constructive certificate.
    Unverified,
}

/// One word of the strong-reduction chain with its certified lower bound.
#[derive(Clone, Debug, Serialize)]
pub struct ChainLink {
    pub length: usize,
    pub critical_length: usize,
    pub floor: usize,
    pub realized: Option<usize>,
    pub lower_bound: usize,
    /// `l·(lower_bound + 1) >= crit`; only meaningful when realized.
    pub inequality_holds: bool,
    /// Step inequality against the previous link (absent for the first).
    pub step: Option<StepVerdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub length: usize,
    #[serde(serialize_with = "ser_rational")]
    pub bound: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub scaled_bound: BigRational,
    pub lower_bound: usize,
    pub holds: bool,
    pub links: Vec<ChainLink>,
}

pub(crate) fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(x))
}

/// Realized distance with the largest block size that fits (`3d <= n`).
fn certified_lower_bound(w: &Word, seed: u64) -> Result<Option<usize>> {
    let d = admissible_d(w)?.min(w.n() / 3);
    if d == 0 {
        return Ok(None);
    }
    Ok(Some(realize_distant_pair_with(w, d, seed)?.dist))
}

/// Checks `n·B(w) <= LB + 1` where `LB` is the best certified lower bound on
/// the image diameter (realized pair or sampling), and records the step
/// inequality along the strong-reduction chain.
pub fn chain_bound(w: &Word, samples: usize, seed: u64) -> Result<ChainReport> {
    require_length(w)?;
    if is_singular(w) {
        return Err(Error::SingularWord);
    }
    let chain = strong_reduction_chain(w)?;
    let mut links: Vec<ChainLink> = Vec::with_capacity(chain.len());
    for (k, cw) in chain.iter().enumerate() {
        let crit = critical_length(cw)?;
        let length = cw.len();
        let (floor, realized) = if length >= 2 {
            (crit.div_ceil(length) - 1, certified_lower_bound(cw, seed.wrapping_add(2 * k as u64))?)
        } else {
            (0, None)
        };
        let lower_bound = realized.unwrap_or(0).max(floor);
        let step = links.last().map(|prev: &ChainLink| match (prev.realized, realized) {
            (Some(a), Some(b)) => {
                if b < (1 + 2 * prev.length) * (a + 1) {
                    StepVerdict::Consistent
                } else {
                    StepVerdict::Inconsistent
                }
            }
            _ => StepVerdict::Unverified,
        });
        links.push(ChainLink {
            length,
            critical_length: crit,
            floor,
            realized,
            lower_bound,
            inequality_holds: length * (lower_bound + 1) >= crit,
            step,
        });
    }
    let sampled = if samples >= 2 { empirical_diameter(w, samples, seed)? } else { 0 };
    let lower_bound = links[0].lower_bound.max(sampled);
    let bound = chain_constant(w.len());
    let scaled_bound = &bound * BigInt::from(w.n());
    let holds = scaled_bound <= BigRational::from_integer(BigInt::from(lower_bound + 1));
    Ok(ChainReport { n: w.n(), length: w.len(), bound, scaled_bound, lower_bound, holds, links })
}

/// Whether the image acts linearly `d`-transitively on `samples` random
/// target sets: each rank-`d` target set is reached from `e_1..e_d`.
pub fn rank_d_subquotient_check(w: &Word, d: usize, samples: usize, group: LinearGroup, seed: u64) -> Result<bool> {
    if d == 0 {
        return Ok(true);
    }
    let n = w.n();
    let field = w.field();
    let sources: Vec<Vector> = (0..d).map(|i| unit_vector(n, i)).collect();
    let (head, tail) = (w.letter(1), w.letter(w.len()));
    let disjoint = !w.is_empty() && head.var == tail.var && head.exp == -tail.exp;
    let c0 = w.constant(0).clone();
    let cl_inv = w.constant(w.len()).inverse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let targets = loop {
            let t: Vec<Vector> = (0..d).map(|_| (0..n).map(|_| field.random(&mut rng)).collect()).collect();
            if rank_of(field, &t, n) != d {
                continue;
            }
            if disjoint {
                let mut both: Vec<Vector> = sources.iter().map(|u| c0.apply(u)).collect();
                both.extend(t.iter().map(|v| cl_inv.apply(v)));
                if rank_of(field, &both, n) != 2 * d {
                    continue;
                }
            }
            break t;
        };
        match construct_witness(w, &sources, &targets, group, seed.wrapping_add(s as u64)) {
            Ok(_) => {}
            Err(Error::HypothesisViolation(v)) => return Err(Error::HypothesesFail(v.join("; "))),
            Err(Error::VerificationFailed(_)) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterReport {
    pub n: usize,
    pub q: u32,
    pub length: usize,
    pub word: String,
    pub critical_length: usize,
    pub theoretical_floor: usize,
    #[serde(serialize_with = "ser_rational")]
    pub theoretical_floor_exact: BigRational,
    pub realized: Option<usize>,
    pub realized_d: Option<usize>,
    pub empirical_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub chain: Option<ChainReport>,
}

/// Everything above for one word; the chain part only for non-singular words.
pub fn diameter_report(w: &Word, samples: usize, seed: u64) -> Result<DiameterReport> {
    require_length(w)?;
    let d = admissible_d(w)?.min(w.n() / 3);
    let pair = if d > 0 { Some(realize_distant_pair_with(w, d, seed)?) } else { None };
    let chain = if is_singular(w) { None } else { Some(chain_bound(w, samples, seed)?) };
    Ok(DiameterReport {
        n: w.n(),
        q: w.field().q(),
        length: w.len(),
        word: w.to_string(),
        critical_length: critical_length(w)?,
        theoretical_floor: diameter_floor(w)?,
        theoretical_floor_exact: diameter_floor_exact(w)?,
        realized: pair.as_ref().map(|p| p.dist),
        realized_d: pair.as_ref().map(|p| p.d),
        empirical_max: if samples >= 2 { empirical_diameter(w, samples, seed)? } else { 0 },
        samples,
        seed,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{field_make, Field};
    use crate::words::Letter;

    fn norm_k(f: &Field, n: usize, k: usize) -> Matrix {
        let mut m = Matrix::identity(f, n);
        for i in 0..k {
            m.set(i, i + k, f.one());
        }
        m
    }

    fn critical_word(f: &Field, n: usize, k: usize) -> Word {
        let id = Matrix::identity(f, n);
        Word::new(f, n, 1, vec![Letter::pos(1), Letter::neg(1)], vec![id.clone(), norm_k(f, n, k), id]).unwrap()
    }

    #[test]
    fn floor_examples() {
        let f = field_make(3, 1).unwrap();
        let w = Word::free(&f, 24, 2, vec![Letter::pos(1), Letter::pos(2)]).unwrap();
        assert_eq!(critical_length(&w).unwrap(), 24);
        let w12 = critical_word(&f, 24, 12);
        assert_eq!(diameter_floor(&w12).unwrap(), 5);
        let strong = Word::free(&f, 16, 2, vec![Letter::pos(1), Letter::pos(2), Letter::pos(1), Letter::pos(2)]).unwrap();
        assert_eq!(diameter_floor(&strong).unwrap(), 3);
        assert_eq!(diameter_floor(&critical_word(&f, 4, 1)).unwrap(), 0);
        assert_eq!(diameter_floor_exact(&w12).unwrap(), BigRational::from_integer(5.into()));
        let short = Word::free(&f, 4, 1, vec![Letter::pos(1)]).unwrap();
        assert_eq!(diameter_floor(&short), Err(Error::TooShort(1)));
    }

    #[test]
    fn distant_pairs() {
        let f = field_make(2, 1).unwrap();
        let w = critical_word(&f, 4, 3);
        assert_eq!(admissible_d(&w).unwrap(), 1);
        let pair = realize_distant_pair(&w, 3).unwrap();
        assert!(pair.dist >= 1);
        assert!(pair_certificate_holds(&pair).unwrap());

        let f3 = field_make(3, 1).unwrap();
        let strong = Word::free(&f3, 12, 2, vec![Letter::pos(1), Letter::pos(2)]).unwrap();
        assert_eq!(admissible_d(&strong).unwrap(), 5);
        assert!(matches!(realize_distant_pair(&strong, 0), Err(Error::HypothesesFail(_))));
        let pair = realize_distant_pair_with(&strong, 4, 0).unwrap();
        assert!(pair.dist >= 4);
        assert!(pair_certificate_holds(&pair).unwrap());
    }

    #[test]
    fn sampled_diameters() {
        let f = field_make(2, 1).unwrap();
        let mut c = Matrix::identity(&f, 2);
        c.set(0, 1, f.one());
        assert_eq!(empirical_diameter(&Word::constant_word(c).unwrap(), 8, 1).unwrap(), 0);
        let x = Word::free(&f, 2, 1, vec![Letter::pos(1)]).unwrap();
        assert_eq!(empirical_diameter_in(&x, 40, 1, LinearGroup::Gl).unwrap(), 2);
        let w = Word::free(&f, 6, 2, vec![Letter::pos(1), Letter::pos(2), Letter::neg(1)]).unwrap();
        let mut last = 0;
        for s in [2, 4, 8, 16] {
            let d = empirical_diameter(&w, s, 77).unwrap();
            assert!(d >= last);
            last = d;
        }
    }

    #[test]
    fn chain_constants() {
        assert_eq!(chain_constant(2), BigRational::new(1.into(), 10.into()));
        assert_eq!(chain_constant(4), BigRational::new(1.into(), 324.into()));
    }

    #[test]
    fn chain_for_strong_word_is_the_floor_inequality() {
        let f = field_make(3, 1).unwrap();
        let w = Word::free(&f, 12, 2, vec![Letter::pos(1), Letter::pos(2)]).unwrap();
        let report = chain_bound(&w, 0, 5).unwrap();
        assert_eq!(report.links.len(), 1);
        let link = &report.links[0];
        assert!(link.inequality_holds);
        assert!(link.length * (link.lower_bound + 1) >= link.critical_length);
        assert!(report.holds);
        assert!(matches!(chain_bound(&critical_word(&f, 12, 6), 0, 0), Err(Error::SingularWord)));
    }

    #[test]
    fn subquotient_examples() {
        let f = field_make(3, 1).unwrap();
        let w = Word::free(&f, 8, 2, vec![Letter::pos(1), Letter::pos(2)]).unwrap();
        assert!(rank_d_subquotient_check(&w, 3, 50, LinearGroup::Gl, 1).unwrap());
        assert!(rank_d_subquotient_check(&w, 0, 50, LinearGroup::Gl, 1).unwrap());
        assert!(matches!(rank_d_subquotient_check(&w, 4, 5, LinearGroup::Gl, 1), Err(Error::HypothesesFail(_))));
    }
}
