//! Explicit witnesses for linear transitivity of word maps: given a reduced
//! word `w`, independent sources `u_1..u_d` and targets `t_1..t_d`, build
//! `h_1..h_r` in GL_n(q) or SL_n(q) with `u_i.w(h) = t_i`.
//!
//! Each row `i` is threaded through the word letter by letter. At slot
//! `(i, j)` the vector entering the letter `x_k^e` is fixed by the previous
//! slot and the vector leaving it is chosen to keep, for every class
//! `(k, sign)`, the vectors that `h_k` must move linearly independent.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::LinearGroup;
use crate::io::{element_to_json, matrix_to_json, vector_to_json};
use crate::linalg::{
    avoid_union, basis_extend, eigen_spectrum, rank_of, subspace_preimage, Field, FieldElement, Matrix, Subspace,
    Vector,
};
use crate::seminorm::{critical_length, projective_norm};
use crate::words::{evaluate, is_reduced, Letter, Word};

/// How the constant after slot `j` links letter `j` to letter `j + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepCase {
    /// Different variables, or the same variable with the same exponent.
    Shifted,
    /// The same variable with opposite exponents.
    Cancelling,
    /// Last letter: the outgoing vector is the target.
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AvoidedKind {
    /// Span of the outgoing class plus its anchor.
    Outgoing,
    /// Preimage under the next constant of the next incoming class plus anchor.
    NextIncoming,
    /// Preimage of the outgoing class plus anchor under `c - λI`.
    Shift(FieldElement),
}

#[derive(Clone, Debug)]
pub struct AvoidedSubspace {
    pub kind: AvoidedKind,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct AvoidanceStep {
    pub i: usize,
    pub j: usize,
    pub case: StepCase,
    pub avoided: Vec<AvoidedSubspace>,
    pub chosen: Vector,
}

/// The vector count that a cancelling step must stay below.
#[derive(Clone, Debug)]
pub struct CountingCertificate {
    pub i: usize,
    pub j: usize,
    pub q: u32,
    pub n: usize,
    pub dl: usize,
    /// Nonzero eigenvalues of the constant with geometric multiplicities.
    pub spectrum: Vec<(FieldElement, usize)>,
    pub excluded: BigUint,
    pub space: BigUint,
    pub holds: bool,
    /// `n - d_k >= |c|` for every eigenvalue.
    pub norm_consistent: bool,
}

/// A subspace that had to be avoided and exceeded `dl - 1` dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionFlag {
    pub i: usize,
    pub j: usize,
    pub dim: usize,
    pub bound: usize,
}

/// Every vector placed by the construction. Slot `(i, j)` (0-based in the
/// arrays) holds the vector entering letter `j` (`v^{e(j)}`) in `inbound`
/// and the vector leaving it (`v^{-e(j)}`) in `outbound`.
#[derive(Clone, Debug)]
pub struct TrajectoryTrace {
    pub field: Field,
    pub n: usize,
    pub r: usize,
    pub letters: Vec<Letter>,
    pub inbound: Vec<Vec<Vector>>,
    pub outbound: Vec<Vec<Vector>>,
    /// Final spans per class, indexed by [`class_index`].
    pub class_spans: Vec<Subspace>,
    pub anchors: Vec<Subspace>,
    pub log: Vec<AvoidanceStep>,
    pub certificates: Vec<CountingCertificate>,
    pub dimension_flags: Vec<DimensionFlag>,
}

#[derive(Clone, Debug)]
pub struct WitnessResult {
    pub h: Vec<Matrix>,
    pub trace: TrajectoryTrace,
    pub group: LinearGroup,
}

/// Position of class `(var, sign)` in per-class vectors.
pub fn class_index(var: usize, sign: i8) -> usize {
    2 * (var - 1) + usize::from(sign < 0)
}

impl TrajectoryTrace {
    pub fn d(&self) -> usize {
        self.inbound.len()
    }

    /// `v_{i,j}^sign`, 1-based.
    pub fn vector(&self, i: usize, j: usize, sign: i8) -> &Vector {
        if self.letters[j - 1].exp == sign {
            &self.inbound[i - 1][j - 1]
        } else {
            &self.outbound[i - 1][j - 1]
        }
    }

    /// Members of class `(var, sign)` in placement order.
    pub fn class_members(&self, var: usize, sign: i8) -> Vec<Vector> {
        let mut out = Vec::new();
        for i in 1..=self.d() {
            for (j, l) in self.letters.iter().enumerate() {
                if l.var == var {
                    out.push(self.vector(i, j + 1, sign).clone());
                }
            }
        }
        out
    }

    /// Whether every class is linearly independent.
    pub fn classes_independent(&self) -> bool {
        (1..=self.r).all(|k| {
            [1i8, -1].iter().all(|&s| {
                let m = self.class_members(k, s);
                rank_of(&self.field, &m, self.n) == m.len()
            })
        })
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        let grid = |g: &Vec<Vec<Vector>>| -> Value {
            g.iter().map(|row| row.iter().map(|v| json!(vector_to_json(f, v))).collect::<Vec<_>>()).collect()
        };
        let span = |s: &Subspace| -> Value { json!(matrix_to_json(s.basis())) };
        let classes: Vec<Value> = (1..=self.r)
            .flat_map(|k| [1i8, -1].map(|s| (k, s)))
            .map(|(k, s)| {
                json!({
                    "var": k,
                    "sign": s,
                    "span": span(&self.class_spans[class_index(k, s)]),
                    "anchor": span(&self.anchors[class_index(k, s)]),
                })
            })
            .collect();
        let log: Vec<Value> = self
            .log
            .iter()
            .map(|st| {
                let avoided: Vec<Value> = st
                    .avoided
                    .iter()
                    .map(|a| match a.kind {
                        AvoidedKind::Outgoing => json!({"kind": "outgoing", "dim": a.dim}),
                        AvoidedKind::NextIncoming => json!({"kind": "next-incoming", "dim": a.dim}),
                        AvoidedKind::Shift(l) => {
                            json!({"kind": "shift", "lambda": element_to_json(f, l), "dim": a.dim})
                        }
                    })
                    .collect();
                json!({
                    "i": st.i,
                    "j": st.j,
                    "case": st.case,
                    "avoided": avoided,
                    "chosen": vector_to_json(f, &st.chosen),
                })
            })
            .collect();
        let certs: Vec<Value> = self
            .certificates
            .iter()
            .map(|c| {
                json!({
                    "i": c.i,
                    "j": c.j,
                    "q": c.q,
                    "n": c.n,
                    "dl": c.dl,
                    "spectrum": c.spectrum.iter().map(|(l, m)| json!([element_to_json(f, *l), m])).collect::<Vec<_>>(),
                    "excluded": c.excluded.to_string(),
                    "space": c.space.to_string(),
                    "holds": c.holds,
                    "norm_consistent": c.norm_consistent,
                })
            })
            .collect();
        json!({
            "field": {"p": f.p(), "e": f.e()},
            "n": self.n,
            "r": self.r,
            "letters": self.letters,
            "inbound": grid(&self.inbound),
            "outbound": grid(&self.outbound),
            "classes": classes,
            "log": log,
            "certificates": certs,
            "dimension_flags": self.dimension_flags,
        })
    }
}

fn transitivity_degree(group: LinearGroup, n: usize) -> Result<usize> {
    match group {
        LinearGroup::Gl => Ok(n),
        LinearGroup::Sl => Ok(n - 1),
        LinearGroup::Psl => Err(Error::Validation("witnesses are built in gl or sl".into())),
    }
}

fn check_vectors(field: &Field, n: usize, vs: &[Vector], name: &str, out: &mut Vec<String>) -> bool {
    if vs.iter().any(|v| v.len() != n) {
        out.push(format!("{name}-dimension: vectors must have length {n}"));
        return false;
    }
    if rank_of(field, vs, n) != vs.len() {
        out.push(format!("{name}-independent: {name} are linearly dependent"));
        return false;
    }
    true
}

/// Checks every hypothesis of the construction and names each violated one.
pub fn check_hypotheses(w: &Word, sources: &[Vector], targets: &[Vector], group: LinearGroup) -> Result<()> {
    let big_d = transitivity_degree(group, w.n())?;
    let (field, n, l, d) = (w.field(), w.n(), w.len(), sources.len());
    let mut violations = Vec::new();
    if l < 2 {
        violations.push(format!("length: word length {l} is below 2"));
    }
    if sources.len() != targets.len() {
        violations.push(format!("pairing: {} sources but {} targets", sources.len(), targets.len()));
    }
    let reduced = is_reduced(w);
    if !reduced.reduced {
        violations.push(format!("reduced: word is not reduced at {:?}", reduced.offending));
    }
    if !w.constant(0).is_identity() || !w.constant(l).is_identity() {
        violations.push("boundary-constants: c_0 and c_l must be the identity".into());
    }
    let src_ok = check_vectors(field, n, sources, "sources", &mut violations);
    let tgt_ok = check_vectors(field, n, targets, "targets", &mut violations);
    if reduced.reduced && l >= 1 {
        let crit = critical_length(w)?;
        let cap = (crit.saturating_sub(1)).min(big_d);
        if d * l > cap {
            violations.push(format!("dimension-bound: d*l = {} exceeds min(crit - 1, D) = {cap}", d * l));
        }
    }
    if group == LinearGroup::Sl && d > 0 && d * l >= n {
        violations.push(format!("sl-headroom: d*l = {} leaves no free row in dimension {n}", d * l));
    }
    if l >= 2 && src_ok && tgt_ok {
        let (a, b) = (w.letter(1), w.letter(l));
        if a.var == b.var && a.exp == -b.exp {
            let mut both = sources.to_vec();
            both.extend_from_slice(targets);
            if rank_of(field, &both, n) != sources.len() + targets.len() {
                violations.push("trivial-intersection: spans of sources and targets meet".into());
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::HypothesisViolation(violations))
    }
}

/// Moves the boundary constants onto the vectors: `w = c_0 w' c_l`, sources
/// become `u.c_0` and targets `t.c_l^{-1}`.
pub fn normalize_for_witness(w: &Word, sources: &[Vector], targets: &[Vector]) -> Result<(Word, Vec<Vector>, Vec<Vector>)> {
    let l = w.len();
    let first = w.constant(0).clone();
    let last_inv = w.constant(l).inverse()?;
    let id = Matrix::identity(w.field(), w.n());
    let mut inner = w.with_constant(0, id.clone())?;
    inner = inner.with_constant(l, id)?;
    let s = sources.iter().map(|u| first.apply(u)).collect();
    let t = targets.iter().map(|v| last_inv.apply(v)).collect();
    Ok((inner, s, t))
}

struct Classes {
    spans: Vec<Subspace>,
}

impl Classes {
    fn insert(&mut self, var: usize, sign: i8, v: &Vector, i: usize, j: usize) -> Result<()> {
        let s = &mut self.spans[class_index(var, sign)];
        if s.contains(v) {
            return Err(Error::IndependenceBroken { var, sign, i, j });
        }
        *s = s.with_vector(v);
        Ok(())
    }

    fn with_anchor(&self, var: usize, sign: i8, anchors: &[Subspace]) -> Result<Subspace> {
        let idx = class_index(var, sign);
        self.spans[idx].sum(&anchors[idx])
    }
}

fn pow_big(q: u32, k: usize) -> BigUint {
    BigUint::from(q).pow(k as u32)
}

fn counting_certificate(c: &Matrix, i: usize, j: usize, dl: usize) -> Result<CountingCertificate> {
    let field = c.field();
    let (q, n) = (field.q(), c.rows());
    let spectrum: Vec<(FieldElement, usize)> = eigen_spectrum(c).into_iter().filter(|(l, _)| !l.is_zero()).collect();
    let m = spectrum.len();
    let base = pow_big(q, dl.saturating_sub(1));
    let mut excluded = BigUint::from(q as usize - m + 1) * &base;
    for &(_, dk) in &spectrum {
        excluded += &base * pow_big(q, dk);
    }
    let space = pow_big(q, n) - 1u32;
    let norm = projective_norm(c)?;
    Ok(CountingCertificate {
        i,
        j,
        q,
        n,
        dl,
        norm_consistent: spectrum.iter().all(|&(_, dk)| n - dk >= norm),
        holds: excluded < space,
        excluded,
        space,
        spectrum,
    })
}

/// Runs the letter-by-letter construction for a word with identity boundary
/// constants.
pub fn build_trajectories(w: &Word, sources: &[Vector], targets: &[Vector], seed: u64) -> Result<TrajectoryTrace> {
    let (field, n, r, l, d) = (w.field().clone(), w.n(), w.r(), w.len(), sources.len());
    if targets.len() != d {
        return Err(Error::HypothesisViolation(vec!["pairing: sources and targets differ in number".into()]));
    }
    if d > 0 && (!w.constant(0).is_identity() || !w.constant(l).is_identity()) {
        return Err(Error::HypothesisViolation(vec!["boundary-constants: c_0 and c_l must be the identity".into()]));
    }
    let mut trace = TrajectoryTrace {
        field: field.clone(),
        n,
        r,
        letters: w.letters().to_vec(),
        inbound: Vec::with_capacity(d),
        outbound: Vec::with_capacity(d),
        class_spans: vec![Subspace::zero(&field, n); 2 * r],
        anchors: vec![Subspace::zero(&field, n); 2 * r],
        log: Vec::new(),
        certificates: Vec::new(),
        dimension_flags: Vec::new(),
    };
    if d == 0 || l == 0 {
        return Ok(trace);
    }
    let u_span = Subspace::from_vectors(&field, n, sources);
    let t_span = Subspace::from_vectors(&field, n, targets);
    let (head, tail) = (w.letter(1), w.letter(l));
    for k in 1..=r {
        for s in [1i8, -1] {
            let at_start = (k, s) == (head.var, head.exp);
            let at_end = (k, s) == (tail.var, -tail.exp);
            trace.anchors[class_index(k, s)] = match (at_start, at_end) {
                (true, false) => u_span.clone(),
                (false, true) => t_span.clone(),
                (true, true) => u_span.sum(&t_span)?,
                (false, false) => Subspace::zero(&field, n),
            };
        }
    }
    let anchors = trace.anchors.clone();
    let mut classes = Classes { spans: vec![Subspace::zero(&field, n); 2 * r] };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim_bound = d * l - 1;

    for i in 1..=d {
        let mut row_in = Vec::with_capacity(l);
        let mut row_out: Vec<Vector> = Vec::with_capacity(l);
        for j in 1..=l {
            let Letter { var, exp } = w.letter(j);
            let incoming = if j == 1 { sources[i - 1].clone() } else { w.constant(j - 1).apply(&row_out[j - 2]) };
            classes.insert(var, exp, &incoming, i, j)?;
            row_in.push(incoming);

            if j == l {
                let target = targets[i - 1].clone();
                classes.insert(var, -exp, &target, i, j)?;
                row_out.push(target);
                continue;
            }

            let outgoing_span = classes.with_anchor(var, -exp, &anchors)?;
            let next = w.letter(j + 1);
            let c = w.constant(j);
            let mut subs = vec![outgoing_span.clone()];
            let mut avoided = vec![AvoidedSubspace { kind: AvoidedKind::Outgoing, dim: outgoing_span.dim() }];
            let mut flagged = vec![outgoing_span.dim()];
            let case = if next.var == var && next.exp == -exp {
                // The next incoming class is the outgoing one, which will also
                // contain the chosen vector; excluding every eigen-shift of the
                // constant covers it.
                trace.certificates.push(counting_certificate(c, i, j, d * l)?);
                for lambda in field.elements() {
                    let pre = subspace_preimage(&c.minus_scalar(lambda), &outgoing_span)?;
                    avoided.push(AvoidedSubspace { kind: AvoidedKind::Shift(lambda), dim: pre.dim() });
                    subs.push(pre);
                }
                StepCase::Cancelling
            } else {
                let next_span = classes.with_anchor(next.var, next.exp, &anchors)?;
                flagged.push(next_span.dim());
                let pre = subspace_preimage(c, &next_span)?;
                avoided.push(AvoidedSubspace { kind: AvoidedKind::NextIncoming, dim: pre.dim() });
                subs.push(pre);
                StepCase::Shifted
            };
            for dim in flagged {
                if dim > dim_bound {
                    trace.dimension_flags.push(DimensionFlag { i, j, dim, bound: dim_bound });
                }
            }
            let chosen = avoid_union(&field, n, &subs, &mut rng).map_err(|e| match e {
                Error::UnionCoversSpace => Error::AvoidanceImpossible { i, j },
                other => other,
            })?;
            if subs.iter().any(|s| s.contains(&chosen)) {
                return Err(Error::AvoidanceImpossible { i, j });
            }
            classes.insert(var, -exp, &chosen, i, j)?;
            trace.log.push(AvoidanceStep { i, j, case, avoided, chosen: chosen.clone() });
            row_out.push(chosen);
        }
        trace.inbound.push(row_in);
        trace.outbound.push(row_out);
    }
    trace.class_spans = classes.spans;
    Ok(trace)
}

/// One `h_k` per variable mapping every `v^+` of its class onto the matching
/// `v^-`; unused variables get the identity.
pub fn solve_group_elements(trace: &TrajectoryTrace, group: LinearGroup) -> Result<Vec<Matrix>> {
    transitivity_degree(group, trace.n)?;
    let field = &trace.field;
    let n = trace.n;
    (1..=trace.r)
        .map(|k| {
            let from = trace.class_members(k, 1);
            let to = trace.class_members(k, -1);
            if from.is_empty() {
                return Ok(Matrix::identity(field, n));
            }
            let s = basis_extend(field, n, &from)?;
            let mut t = basis_extend(field, n, &to)?;
            let mut h = s.inverse()?.mul(&t);
            if group == LinearGroup::Sl {
                let det = h.determinant();
                if det != field.one() {
                    let free = from.len();
                    if free >= n {
                        return Err(Error::DeterminantUnfixable(k));
                    }
                    let fix = field.inv(det).expect("invertible");
                    for col in 0..n {
                        let v = field.mul(t.get(free, col), fix);
                        t.set(free, col, v);
                    }
                    h = s.inverse()?.mul(&t);
                }
            }
            Ok(h)
        })
        .collect()
}

/// Full pipeline with an exact final check of `u_i.w(h) = t_i`.
pub fn construct_witness(
    w: &Word,
    sources: &[Vector],
    targets: &[Vector],
    group: LinearGroup,
    seed: u64,
) -> Result<WitnessResult> {
    transitivity_degree(group, w.n())?;
    let reduced = is_reduced(w);
    if !reduced.reduced {
        return Err(Error::HypothesisViolation(vec![format!("reduced: word is not reduced at {:?}", reduced.offending)]));
    }
    let (inner, s, t) = normalize_for_witness(w, sources, targets)?;
    check_hypotheses(&inner, &s, &t, group)?;
    let trace = build_trajectories(&inner, &s, &t, seed)?;
    let h = solve_group_elements(&trace, group)?;
    let value = evaluate(w, &h)?;
    for (i, (u, v)) in sources.iter().zip(targets).enumerate() {
        if &value.apply(u) != v {
            return Err(Error::VerificationFailed(i + 1));
        }
    }
    Ok(WitnessResult { h, trace, group })
}

/// A random admissible instance with the largest allowed `d`.
#[derive(Clone, Debug)]
pub struct WitnessInstance {
    pub word: Word,
    pub sources: Vec<Vector>,
    pub targets: Vec<Vector>,
    pub group: LinearGroup,
}

fn random_independent<R: Rng + ?Sized>(field: &Field, n: usize, d: usize, rng: &mut R) -> Vec<Vector> {
    loop {
        let vs: Vec<Vector> = (0..d).map(|_| (0..n).map(|_| field.random(rng)).collect()).collect();
        if rank_of(field, &vs, n) == d {
            return vs;
        }
    }
}

/// Samples a reduced word of length `l` in `r` variables with random inner
/// constants and random boundary constants, then independent sources and
/// targets of the maximal admissible size.
pub fn random_instance<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    l: usize,
    r: usize,
    group: LinearGroup,
    rng: &mut R,
) -> Result<WitnessInstance> {
    let big_d = transitivity_degree(group, n)?;
    let word = loop {
        let letters: Vec<Letter> = (0..l)
            .map(|_| Letter::new(rng.gen_range(1..=r), if rng.gen_bool(0.5) { 1 } else { -1 }))
            .collect();
        let constants = (0..=l).map(|_| Matrix::random_invertible(field, n, rng)).collect();
        let w = Word::new(field, n, r, letters, constants)?;
        if is_reduced(&w).reduced {
            break w;
        }
    };
    let crit = critical_length(&word)?;
    let d = crit.saturating_sub(1).min(big_d) / l;
    let sources = random_independent(field, n, d, rng);
    let (head, tail) = (word.letter(1), word.letter(l));
    let needs_disjoint = head.var == tail.var && head.exp == -tail.exp;
    let c0 = word.constant(0).clone();
    let cl_inv = word.constant(l).inverse()?;
    let targets = loop {
        let t = random_independent(field, n, d, rng);
        if !needs_disjoint {
            break t;
        }
        let mut both: Vec<Vector> = sources.iter().map(|u| c0.apply(u)).collect();
        both.extend(t.iter().map(|v| cl_inv.apply(v)));
        if rank_of(field, &both, n) == 2 * d {
            break t;
        }
    };
    Ok(WitnessInstance { word, sources, targets, group })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{field_make, unit_vector};
    use proptest::prelude::*;

    fn e(n: usize, i: usize) -> Vector {
        unit_vector(n, i)
    }

    /// Unipotent matrix `I + N` with `N` of rank `k`, so its norm is `k`.
    fn norm_k(f: &Field, n: usize, k: usize) -> Matrix {
        let mut m = Matrix::identity(f, n);
        for i in 0..k {
            m.set(i, i + k, f.one());
        }
        m
    }

    #[test]
    fn admissible_d_follows_the_bound() {
        let f = field_make(3, 1).unwrap();
        let n = 12;
        // x1 c x1^-1 with |c| = 6 has critical length 6: d*2 <= 5.
        let c = norm_k(&f, n, 6);
        let id = Matrix::identity(&f, n);
        let w = Word::new(&f, n, 1, vec![Letter::pos(1), Letter::neg(1)], vec![id.clone(), c, id.clone()]).unwrap();
        assert_eq!(critical_length(&w).unwrap(), 6);
        // Strong word of length 2: critical length n = 12, so d <= 5.
        let strong = Word::free(&f, n, 2, vec![Letter::pos(1), Letter::pos(2)]).unwrap();
        let five: Vec<Vector> = (0..5).map(|i| e(n, i)).collect();
        let five_t: Vec<Vector> = (5..10).map(|i| e(n, i)).collect();
        assert!(check_hypotheses(&strong, &five, &five_t, LinearGroup::Gl).is_ok());
        let six: Vec<Vector> = (0..6).map(|i| e(n, i)).collect();
        let six_t: Vec<Vector> = (6..12).map(|i| e(n, i)).collect();
        let err = check_hypotheses(&strong, &six, &six_t, LinearGroup::Gl).unwrap_err();
        match err {
            Error::HypothesisViolation(v) => assert!(v.iter().any(|s| s.starts_with("dimension-bound"))),
            other => panic!("{other:?}"),
        }
        let two: Vec<Vector> = (0..2).map(|i| e(n, i)).collect();
        let two_t: Vec<Vector> = (2..4).map(|i| e(n, i)).collect();
        assert!(check_hypotheses(&w, &two, &two_t, LinearGroup::Gl).is_ok());
        let three: Vec<Vector> = (0..3).map(|i| e(n, 2 * i)).collect();
        let three_t: Vec<Vector> = (0..3).map(|i| e(n, 2 * i + 1)).collect();
        assert!(check_hypotheses(&w, &three, &three_t, LinearGroup::Gl).is_err());
    }

    #[test]
    fn trivial_intersection_is_required_for_inverse_ends() {
        let f = field_make(2, 1).unwrap();
        let n = 6;
        let c = norm_k(&f, n, 3);
        let id = Matrix::identity(&f, n);
        let w = Word::new(&f, n, 1, vec![Letter::pos(1), Letter::neg(1)], vec![id.clone(), c, id]).unwrap();
        let err = check_hypotheses(&w, &[e(n, 0)], &[e(n, 0)], LinearGroup::Gl).unwrap_err();
        match err {
            Error::HypothesisViolation(v) => assert!(v.iter().any(|s| s.starts_with("trivial-intersection"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn normalization_moves_boundary_constants() {
        let f = field_make(2, 1).unwrap();
        let n = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = Matrix::random_invertible(&f, n, &mut rng);
        let id = Matrix::identity(&f, n);
        let w = Word::new(&f, n, 1, vec![Letter::pos(1)], vec![c.clone(), id.clone()]).unwrap();
        let (inner, s, t) = normalize_for_witness(&w, &[e(n, 0)], &[e(n, 1)]).unwrap();
        assert_eq!(inner, Word::free(&f, n, 1, vec![Letter::pos(1)]).unwrap());
        assert_eq!(s, vec![c.apply(&e(n, 0))]);
        assert_eq!(t, vec![e(n, 1)]);
        let plain = Word::free(&f, n, 1, vec![Letter::pos(1), Letter::pos(1)]).unwrap();
        let (same, s2, t2) = normalize_for_witness(&plain, &[e(n, 0)], &[e(n, 1)]).unwrap();
        assert_eq!(same, plain);
        assert_eq!((s2, t2), (vec![e(n, 0)], vec![e(n, 1)]));
    }

    #[test]
    fn trace_for_square_with_constant() {
        let f = field_make(2, 1).unwrap();
        let n = 5;
        let c = Matrix::companion(&f, &[f.one(), f.one(), f.zero(), f.one(), f.zero()]);
        assert!(!c.is_scalar());
        let id = Matrix::identity(&f, n);
        let w = Word::new(&f, n, 1, vec![Letter::pos(1), Letter::pos(1)], vec![id.clone(), c.clone(), id]).unwrap();
        check_hypotheses(&w, &[e(n, 0)], &[e(n, 1)], LinearGroup::Gl).unwrap();
        let trace = build_trajectories(&w, &[e(n, 0)], &[e(n, 1)], 11).unwrap();
        assert_eq!(trace.vector(1, 1, 1), &e(n, 0));
        assert_eq!(trace.vector(1, 2, 1), &c.apply(trace.vector(1, 1, -1)));
        assert_eq!(trace.vector(1, 2, -1), &e(n, 1));
        let plus = vec![trace.vector(1, 1, 1).clone(), trace.vector(1, 2, 1).clone()];
        let minus = vec![trace.vector(1, 1, -1).clone(), trace.vector(1, 2, -1).clone()];
        assert_eq!(rank_of(&f, &plus, n), 2);
        assert_eq!(rank_of(&f, &minus, n), 2);
    }

    #[test]
    fn empty_instance_is_vacuous() {
        let f = field_make(2, 1).unwrap();
        let w = Word::free(&f, 4, 1, vec![Letter::pos(1), Letter::pos(1)]).unwrap();
        let trace = build_trajectories(&w, &[], &[], 0).unwrap();
        assert_eq!(trace.d(), 0);
        assert!(trace.log.is_empty());
        let h = solve_group_elements(&trace, LinearGroup::Gl).unwrap();
        assert!(h[0].is_identity());
    }

    #[test]
    fn single_pair_in_gl2() {
        let f = field_make(2, 1).unwrap();
        let trace = TrajectoryTrace {
            field: f.clone(),
            n: 2,
            r: 2,
            letters: vec![Letter::pos(1)],
            inbound: vec![vec![e(2, 0)]],
            outbound: vec![vec![e(2, 1)]],
            class_spans: vec![],
            anchors: vec![],
            log: vec![],
            certificates: vec![],
            dimension_flags: vec![],
        };
        let h = solve_group_elements(&trace, LinearGroup::Gl).unwrap();
        assert_eq!(h[0], Matrix::from_ints(&f, &[&[0, 1], &[1, 0]]));
        assert!(h[1].is_identity());
        assert_eq!(h[0].apply(&e(2, 0)), e(2, 1));
    }

    #[test]
    fn special_linear_fix_keeps_pairs() {
        let f = field_make(5, 1).unwrap();
        let n = 4;
        let trace = TrajectoryTrace {
            field: f.clone(),
            n,
            r: 1,
            letters: vec![Letter::pos(1)],
            inbound: vec![vec![e(n, 0)], vec![e(n, 1)]],
            outbound: vec![
                vec![vec![f.from_int(2), f.zero(), f.zero(), f.zero()]],
                vec![vec![f.zero(), f.from_int(3), f.zero(), f.one()]],
            ],
            class_spans: vec![],
            anchors: vec![],
            log: vec![],
            certificates: vec![],
            dimension_flags: vec![],
        };
        let h = solve_group_elements(&trace, LinearGroup::Sl).unwrap();
        assert_eq!(h[0].determinant(), f.one());
        assert_eq!(h[0].apply(&e(n, 0)), trace.outbound[0][0]);
        assert_eq!(h[0].apply(&e(n, 1)), trace.outbound[1][0]);
    }

    #[test]
    fn determinant_unfixable_without_free_row() {
        let f = field_make(3, 1).unwrap();
        let trace = TrajectoryTrace {
            field: f.clone(),
            n: 2,
            r: 1,
            letters: vec![Letter::pos(1)],
            inbound: vec![vec![e(2, 0)], vec![e(2, 1)]],
            outbound: vec![vec![e(2, 1)], vec![e(2, 0)]],
            class_spans: vec![],
            anchors: vec![],
            log: vec![],
            certificates: vec![],
            dimension_flags: vec![],
        };
        assert_eq!(solve_group_elements(&trace, LinearGroup::Sl), Err(Error::DeterminantUnfixable(1)));
    }

    #[test]
    fn witness_examples() {
        let f2 = field_make(2, 1).unwrap();
        let w = Word::free(&f2, 4, 2, vec![Letter::pos(1), Letter::pos(2)]).unwrap();
        let res = construct_witness(&w, &[e(4, 0)], &[e(4, 1)], LinearGroup::Gl, 1).unwrap();
        assert_eq!(res.h[0].mul(&res.h[1]).apply(&e(4, 0)), e(4, 1));

        let f3 = field_make(3, 1).unwrap();
        let w = Word::free(&f3, 12, 2, vec![Letter::pos(1), Letter::neg(2)]).unwrap();
        let (s, t) = (vec![e(12, 0), e(12, 1)], vec![e(12, 2), e(12, 3)]);
        let res = construct_witness(&w, &s, &t, LinearGroup::Gl, 2).unwrap();
        let value = evaluate(&w, &res.h).unwrap();
        for (u, v) in s.iter().zip(&t) {
            assert_eq!(&value.apply(u), v);
        }

        let bad = construct_witness(&w, &[e(12, 0)], &[e(12, 0), e(12, 1)], LinearGroup::Gl, 0);
        assert!(matches!(bad, Err(Error::HypothesisViolation(_))));
        assert!(matches!(construct_witness(&w, &s, &t, LinearGroup::Psl, 0), Err(Error::Validation(_))));
    }

    #[test]
    fn deterministic_in_seed() {
        let f = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inst = random_instance(&f, 10, 3, 2, LinearGroup::Gl, &mut rng).unwrap();
        let a = construct_witness(&inst.word, &inst.sources, &inst.targets, inst.group, 5).unwrap();
        let b = construct_witness(&inst.word, &inst.sources, &inst.targets, inst.group, 5).unwrap();
        assert_eq!(a.h, b.h);
        assert_eq!(a.trace.to_json(), b.trace.to_json());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn witnesses_are_exact(seed in any::<u64>(), which in 0usize..4, n in 4usize..12, l in 2usize..5,
                               r in 1usize..4, sl in any::<bool>()) {
            let (p, e) = [(2, 1), (3, 1), (2, 2), (5, 1)][which];
            let f = field_make(p, e).unwrap();
            let group = if sl { LinearGroup::Sl } else { LinearGroup::Gl };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(&f, n, l, r, group, &mut rng).unwrap();
            let res = construct_witness(&inst.word, &inst.sources, &inst.targets, group, seed).unwrap();
            prop_assert!(res.trace.classes_independent());
            prop_assert!(res.trace.certificates.iter().all(|c| c.holds && c.norm_consistent));
            if sl {
                prop_assert!(res.h.iter().all(|h| h.determinant() == f.one()));
            }
            for k in 1..=res.trace.r {
                let from = res.trace.class_members(k, 1);
                let to = res.trace.class_members(k, -1);
                for (a, b) in from.iter().zip(&to) {
                    prop_assert_eq!(&res.h[k - 1].apply(a), b);
                }
            }
        }
    }
}
