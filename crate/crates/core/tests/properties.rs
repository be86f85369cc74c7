//! Property tests for the invariants each module promises, driven through the
//! public API only.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixid_core::identity::{enumerate_group, is_mixed_identity, GroupWord, SmallGroup};
use mixid_core::image::{pair_certificate_holds, realize_distant_pair};
use mixid_core::io::{ConstantTable, MatrixFile};
use mixid_core::linalg::{field_make, Field, Matrix, Subspace, Vector};
use mixid_core::seminorm::{critical_length, projective_dist, projective_norm};
use mixid_core::tower::{diagonal_embed, levelwise_image_floor, TowerElement};
use mixid_core::witness::{construct_witness, random_instance};
use mixid_core::words::{
    classify_indices, dsl, evaluate, is_reduced, is_strong, reduce, strong_reduction_chain, Letter, Word,
};
use mixid_core::{Error, LinearGroup};

const FIELDS: [(u64, u32); 6] = [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)];

fn field_at(i: usize) -> Field {
    let (p, e) = FIELDS[i % FIELDS.len()];
    field_make(p, e).unwrap()
}

fn random_vectors(f: &Field, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    (0..k).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect()
}

/// Words whose constants are mostly identity or scalar, so reduction has work to do.
fn messy_word(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Word {
    let l = rng.gen_range(0..=7);
    let r = rng.gen_range(1..=3);
    let letters: Vec<Letter> =
        (0..l).map(|_| Letter::new(rng.gen_range(1..=r), if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
    let constants = (0..=l)
        .map(|_| match rng.gen_range(0..3) {
            0 => Matrix::identity(f, n),
            1 => Matrix::scalar(f, n, f.random_nonzero(rng)),
            _ => Matrix::random_invertible(f, n, rng),
        })
        .collect();
    Word::new(f, n, r, letters, constants).unwrap()
}

fn tuple(f: &Field, n: usize, r: usize, rng: &mut ChaCha8Rng) -> Vec<Matrix> {
    (0..r).map(|_| Matrix::random_invertible(f, n, rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // ---- finite fields and subspaces

    #[test]
    fn field_axioms(fi in 0usize..6, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }
    }

    #[test]
    fn rref_is_canonical(fi in 0usize..6, n in 1usize..7, k in 0usize..8, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs = random_vectors(&f, n, k, &mut rng);
        let mut shuffled = vs.clone();
        shuffled.reverse();
        // add a redundant combination as well
        if let (Some(a), Some(b)) = (vs.first(), vs.last()) {
            shuffled.push(a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect());
        }
        prop_assert_eq!(Subspace::from_vectors(&f, n, &vs), Subspace::from_vectors(&f, n, &shuffled));
    }

    #[test]
    fn dimension_formula(fi in 0usize..6, n in 1usize..8, ka in 0usize..8, kb in 0usize..8, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Subspace::from_vectors(&f, n, &random_vectors(&f, n, ka, &mut rng));
        let b = Subspace::from_vectors(&f, n, &random_vectors(&f, n, kb, &mut rng));
        let sum = a.sum(&b).unwrap();
        let meet = a.intersect(&b).unwrap();
        prop_assert_eq!(a.dim() + b.dim(), sum.dim() + meet.dim());
        prop_assert!(sum.contains_subspace(&a) && a.contains_subspace(&meet) && b.contains_subspace(&meet));
    }

    // ---- words

    #[test]
    fn classification_partitions_inner_indices(fi in 0usize..4, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = messy_word(&f, 3, &mut rng);
        let cls = classify_indices(&w);
        let mut all: Vec<usize> = cls.j0.iter().chain(&cls.jplus).chain(&cls.jminus).copied().collect();
        all.sort_unstable();
        let expected: Vec<usize> = (1..w.len()).collect();
        prop_assert_eq!(all, expected);
    }

    #[test]
    fn evaluation_is_multiplicative(fi in 0usize..4, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (messy_word(&f, 3, &mut rng), messy_word(&f, 3, &mut rng));
        let h = tuple(&f, 3, 3, &mut rng);
        let joined = a.concat(&b).unwrap();
        prop_assert_eq!(evaluate(&joined, &h).unwrap(), evaluate(&a, &h).unwrap().mul(&evaluate(&b, &h).unwrap()));
    }

    #[test]
    fn reduce_preserves_evaluation(fi in 0usize..4, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = messy_word(&f, 3, &mut rng);
        let red = reduce(&w);
        prop_assert!(is_reduced(&red).reduced);
        prop_assert_eq!(reduce(&red), red.clone());
        for _ in 0..20 {
            let h = tuple(&f, 3, w.r(), &mut rng);
            prop_assert_eq!(evaluate(&red, &h).unwrap(), evaluate(&w, &h).unwrap());
        }
    }

    #[test]
    fn strong_reduction_chain_shape(fi in 0usize..4, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = reduce(&messy_word(&f, 3, &mut rng));
        let chain = strong_reduction_chain(&w).unwrap();
        prop_assert!(chain[1..].iter().all(|c| is_reduced(c).reduced));
        prop_assert!(is_strong(chain.last().unwrap()));
        prop_assert!(chain.windows(2).all(|p| p[1].len() + 2 <= p[0].len()));
    }

    #[test]
    fn dsl_round_trip(fi in 0usize..6, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = messy_word(&f, 2, &mut rng);
        let (text, table) = dsl::to_text(&w);
        let back = dsl::parse_word(&text, &table, Some(w.r())).unwrap();
        prop_assert_eq!(back, w);
    }

    // ---- seminorm

    #[test]
    fn seminorm_axioms(fi in 0usize..6, n in 1usize..7, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h, k) = (
            Matrix::random_invertible(&f, n, &mut rng),
            Matrix::random_invertible(&f, n, &mut rng),
            Matrix::random_invertible(&f, n, &mut rng),
        );
        let norm = |m: &Matrix| projective_norm(m).unwrap();
        prop_assert!(norm(&g.mul(&h)) <= norm(&g) + norm(&h));
        prop_assert_eq!(norm(&g), norm(&g.inverse().unwrap()));
        prop_assert_eq!(norm(&k.mul(&g).mul(&k.inverse().unwrap())), norm(&g));
        let d = projective_dist(&g, &h).unwrap();
        prop_assert_eq!(projective_dist(&k.mul(&g), &k.mul(&h)).unwrap(), d);
        prop_assert_eq!(projective_dist(&g.mul(&k), &h.mul(&k)).unwrap(), d);
        prop_assert!(norm(&g) <= n);
    }

    // ---- witness

    #[test]
    fn witness_invariants(fi in 0usize..4, l in 2usize..6, r in 1usize..4, sl in any::<bool>(), seed in any::<u64>()) {
        let f = field_at(fi);
        let group = if sl { LinearGroup::Sl } else { LinearGroup::Gl };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&f, 10, l, r, group, &mut rng).unwrap();
        let res = construct_witness(&inst.word, &inst.sources, &inst.targets, group, seed).unwrap();
        let value = evaluate(&inst.word, &res.h).unwrap();
        for (u, t) in inst.sources.iter().zip(&inst.targets) {
            prop_assert_eq!(&value.apply(u), t);
        }
        prop_assert!(res.trace.classes_independent());
        prop_assert!(res.trace.certificates.iter().all(|c| c.holds && c.norm_consistent));
        let again = construct_witness(&inst.word, &inst.sources, &inst.targets, group, seed).unwrap();
        prop_assert_eq!(again.h, res.h);
    }

    // ---- image analysis

    #[test]
    fn distant_pairs_pass_the_rank_check(fi in 0usize..2, l in 2usize..5, seed in any::<u64>()) {
        let f = field_at(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&f, 12, l, 2, LinearGroup::Gl, &mut rng).unwrap();
        let crit = critical_length(&inst.word).unwrap();
        match realize_distant_pair(&inst.word, seed) {
            Ok(pair) => {
                prop_assert!(pair_certificate_holds(&pair).unwrap());
                prop_assert!(l * (pair.dist + 1) >= crit);
            }
            // 3d ≤ n fails for l = 2 with long critical length
            Err(Error::HypothesesFail(_)) => prop_assert!(3 * ((crit - 1).min(12) / l) > 12),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    // ---- tower

    #[test]
    fn embedding_is_an_isometric_homomorphism(p in prop::sample::select(vec![2u64, 3]), from in 1u32..4, up in 1u32..3, seed in any::<u64>()) {
        let f = field_make(p, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1usize << from;
        let (g, h) = (Matrix::random_invertible(&f, n, &mut rng), Matrix::random_invertible(&f, n, &mut rng));
        let embed = |m: &Matrix| diagonal_embed(&TowerElement::new(m.clone()).unwrap(), from + up).unwrap();
        prop_assert_eq!(embed(&g.mul(&h)).matrix().clone(), embed(&g).matrix().mul(embed(&h).matrix()));
        prop_assert_eq!(embed(&g.inverse().unwrap()).matrix().clone(), embed(&g).matrix().inverse().unwrap());
        prop_assert_eq!(embed(&g).normalized_norm().unwrap(), TowerElement::new(g).unwrap().normalized_norm().unwrap());
    }

    #[test]
    fn floors_are_monotone_along_the_tower(seed in any::<u64>()) {
        let f = field_make(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&f, 4, rng.gen_range(2..4), 2, LinearGroup::Gl, &mut rng).unwrap();
        let reports: Vec<_> = (2..=5).map(|m| levelwise_image_floor(&inst.word, m, None, seed).unwrap()).collect();
        for (i, a) in reports.iter().enumerate() {
            for b in &reports[i + 1..] {
                if a.floor_positive {
                    let slack = mixid_core::io::parse_rational(&format!("1/{}", a.dim)).unwrap()
                        - mixid_core::io::parse_rational(&format!("1/{}", b.dim)).unwrap();
                    prop_assert!(b.floor >= &a.floor - slack);
                }
            }
        }
    }

    // ---- identity search symmetries on a larger group

    #[test]
    fn identity_status_is_symmetric(seed in any::<u64>()) {
        let g = gl23();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = rng.gen_range(1..5);
        let letters: Vec<Letter> = (0..l).map(|_| Letter::new(1, if rng.gen() { 1 } else { -1 })).collect();
        let order = g.order() as u32;
        let constants: Vec<u32> = (0..=l).map(|_| rng.gen_range(0..order)).collect();
        let w = GroupWord::new(1, letters.clone(), constants.clone(), &g).unwrap();
        let status = |w: &GroupWord| is_mixed_identity(w, &g).map(|c| c.holds);
        let t = rng.gen_range(0..order);

        // conjugation w ↦ t w t⁻¹
        let mut conj = constants.clone();
        conj[0] = g.mul(t, conj[0]);
        conj[l] = g.mul(conj[l], g.inv(t));
        // translation x ↦ t x
        let mut moved = constants.clone();
        for (j, letter) in letters.iter().enumerate() {
            if letter.exp > 0 {
                moved[j] = g.mul(moved[j], t);
            } else {
                moved[j + 1] = g.mul(g.inv(t), moved[j + 1]);
            }
        }
        let base = status(&w);
        prop_assert_eq!(&base, &status(&GroupWord::new(1, letters.clone(), conj, &g).unwrap()));
        prop_assert_eq!(&base, &status(&GroupWord::new(1, letters, moved, &g).unwrap()));
    }
}

fn gl23() -> SmallGroup {
    enumerate_group(LinearGroup::Gl, 2, 3).unwrap()
}

/// A root-free irreducible polynomial gives a companion matrix of full norm.
#[test]
fn diameter_is_realized_by_irreducible_companions() {
    for (p, n) in [(2u64, 2usize), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (5, 3)] {
        let f = field_make(p, 1).unwrap();
        // monic x^n + c_{n-1}x^{n-1} + ... + c_0, coefficients low to high
        let found = (0..(p as u32).pow(n as u32)).find_map(|mut code| {
            let coeffs: Vec<i64> = (0..n)
                .map(|_| {
                    let c = code % p as u32;
                    code /= p as u32;
                    c as i64
                })
                .collect();
            irreducible_mod_p(&coeffs, p as i64).then_some(coeffs)
        });
        let coeffs = found.expect("irreducible polynomials exist in every degree");
        let elems: Vec<_> = coeffs.iter().map(|&c| f.from_int(c)).collect();
        let comp = Matrix::companion(&f, &elems);
        assert_eq!(projective_norm(&comp).unwrap(), n, "p = {p}, n = {n}, poly {coeffs:?}");
    }
}

/// Trial division by every monic polynomial of degree 1..=n/2.
fn irreducible_mod_p(low_coeffs: &[i64], p: i64) -> bool {
    let n = low_coeffs.len();
    let mut poly: Vec<i64> = low_coeffs.to_vec();
    poly.push(1);
    for deg in 1..=n / 2 {
        for mut code in 0..p.pow(deg as u32) {
            let mut div: Vec<i64> = (0..deg)
                .map(|_| {
                    let c = code % p;
                    code /= p;
                    c
                })
                .collect();
            div.push(1);
            if remainder_is_zero(&poly, &div, p) {
                return false;
            }
        }
    }
    true
}

fn remainder_is_zero(num: &[i64], monic: &[i64], p: i64) -> bool {
    let mut rem = num.to_vec();
    let d = monic.len() - 1;
    while rem.len() > d {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - d;
        for (i, &c) in monic.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] - lead * c).rem_euclid(p);
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

#[test]
fn matrix_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for fi in 0..FIELDS.len() {
        let f = field_at(fi);
        let m = Matrix::random_invertible(&f, 5, &mut rng);
        let text = serde_json::to_string(&MatrixFile::from_matrix(&m)).unwrap();
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
        let mut table = ConstantTable::empty(&f, 5);
        table.insert("m", m.clone());
        let again = table.to_file().to_table().unwrap();
        assert_eq!(again.constants["m"], m);
    }
}
