//! A quick, seeded run of the main invariants, for the `selftest` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::group::LinearGroup;
use crate::identity::{enumerate_group, is_law};
use crate::linalg::{avoid_union, field_make, subspace_preimage, Matrix, Subspace, Vector};
use crate::seminorm::{projective_dist, projective_norm};
use crate::tower::{diagonal_embed, TowerElement};
use crate::witness::{construct_witness, random_instance};
use crate::words::{evaluate, Letter};
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

fn all_vectors(field: &crate::linalg::Field, n: usize) -> Vec<Vector> {
    let q = field.q() as u64;
    (0..q.pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let d = (idx % q) as u32;
                    idx /= q;
                    field.element(d).unwrap()
                })
                .collect()
        })
        .collect()
}

fn field_axioms(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut cases = 0;
    for (p, e) in [(2, 3), (3, 2), (5, 1), (2, 4)] {
        let f = field_make(p, e)?;
        for _ in 0..200 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            cases += 1;
            let distributes = f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
            let associates = f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c));
            let inverts = a.is_zero() || f.mul(a, f.inv(a).unwrap()) == f.one();
            if !(distributes && associates && inverts) {
                failures += 1;
            }
        }
    }
    Ok(CheckOutcome { name: "field-axioms".into(), cases, failures })
}

fn subspace_oracle(seed: u64) -> Result<CheckOutcome> {
    let f = field_make(2, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let cases = 100;
    for _ in 0..cases {
        let n = rng.gen_range(1..=5);
        let every = all_vectors(&f, n);
        let span = |rng: &mut ChaCha8Rng| {
            let k = rng.gen_range(0..=n);
            let vs: Vec<Vector> = (0..k).map(|_| every[rng.gen_range(0..every.len())].clone()).collect();
            Subspace::from_vectors(&f, n, &vs)
        };
        let (a, b) = (span(&mut rng), span(&mut rng));
        let c = Matrix::random(&f, n, n, &mut rng);
        let inter = a.intersect(&b)?;
        let pre = subspace_preimage(&c, &b)?;
        let ok_inter = every.iter().all(|v| inter.contains(v) == (a.contains(v) && b.contains(v)));
        let ok_pre = every.iter().all(|v| pre.contains(v) == b.contains(&c.apply(v)));
        let ok_avoid = match avoid_union(&f, n, &[a.clone(), b.clone()], &mut rng) {
            Ok(v) => !a.contains(&v) && !b.contains(&v),
            Err(_) => every.iter().all(|v| a.contains(v) || b.contains(v)),
        };
        if !(ok_inter && ok_pre && ok_avoid) {
            failures += 1;
        }
    }
    Ok(CheckOutcome { name: "subspace-oracle".into(), cases, failures })
}

fn witness_soundness(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let cases = 24;
    for k in 0..cases {
        let (p, e) = [(2, 1), (3, 1), (2, 2), (5, 1)][k % 4];
        let f = field_make(p, e)?;
        let n = [8, 12][k % 2];
        let group = if k % 3 == 0 { LinearGroup::Sl } else { LinearGroup::Gl };
        let inst = random_instance(&f, n, rng.gen_range(2..=4), rng.gen_range(1..=3), group, &mut rng)?;
        let ok = match construct_witness(&inst.word, &inst.sources, &inst.targets, group, k as u64) {
            Ok(res) => {
                let value = evaluate(&inst.word, &res.h)?;
                inst.sources.iter().zip(&inst.targets).all(|(u, t)| &value.apply(u) == t)
            }
            Err(_) => false,
        };
        if !ok {
            failures += 1;
        }
    }
    Ok(CheckOutcome { name: "witness-soundness".into(), cases, failures })
}

fn seminorm_axioms(seed: u64) -> Result<CheckOutcome> {
    let f = field_make(3, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let cases = 200;
    for _ in 0..cases {
        let n = 6;
        let (g, h, k) = (
            Matrix::random_invertible(&f, n, &mut rng),
            Matrix::random_invertible(&f, n, &mut rng),
            Matrix::random_invertible(&f, n, &mut rng),
        );
        let sub = projective_norm(&g.mul(&h))? <= projective_norm(&g)? + projective_norm(&h)?;
        let sym = projective_norm(&g)? == projective_norm(&g.inverse()?)?;
        let conj = projective_norm(&k.mul(&g).mul(&k.inverse()?))? == projective_norm(&g)?;
        let bi = projective_dist(&k.mul(&g), &k.mul(&h))? == projective_dist(&g, &h)?
            && projective_dist(&g.mul(&k), &h.mul(&k))? == projective_dist(&g, &h)?;
        if !(sub && sym && conj && bi) {
            failures += 1;
        }
    }
    Ok(CheckOutcome { name: "seminorm-axioms".into(), cases, failures })
}

fn tower_isometry(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut cases = 0;
    for p in [2, 3] {
        let f = field_make(p, 1)?;
        for level in 1..=3 {
            for _ in 0..10 {
                cases += 1;
                let g = TowerElement::new(Matrix::random_invertible(&f, 1 << level, &mut rng))?;
                if diagonal_embed(&g, level + 2)?.normalized_norm()? != g.normalized_norm()? {
                    failures += 1;
                }
            }
        }
    }
    Ok(CheckOutcome { name: "tower-isometry".into(), cases, failures })
}

fn small_group_laws() -> Result<CheckOutcome> {
    let g = enumerate_group(LinearGroup::Gl, 2, 2)?;
    let x6 = vec![Letter::pos(1); 6];
    let x2 = vec![Letter::pos(1); 2];
    let failures = usize::from(!is_law(&x6, &g)?) + usize::from(is_law(&x2, &g)?);
    Ok(CheckOutcome { name: "small-group-laws".into(), cases: 2, failures })
}

pub fn run_selftest(seed: u64) -> Result<SelftestReport> {
    let checks = vec![
        field_axioms(seed)?,
        subspace_oracle(seed)?,
        witness_soundness(seed)?,
        seminorm_axioms(seed)?,
        tower_isometry(seed)?,
        small_group_laws()?,
    ];
    Ok(SelftestReport { seed, passed: checks.iter().all(|c| c.failures == 0), checks })
}
