//! Exhaustive search for the shortest mixed identities of a small group.
//!
//! Candidates are enumerated length by length. With pruning on, only one
//! representative per symmetry class is tested:
//! - variables appear in order of first occurrence, each first with exponent +1;
//! - the constant left of each variable's first occurrence is trivial
//!   (`x -> g x` is a bijection), with `c_0` allowed to be any central element;
//! - the first non-central constant after `c_0` is the smallest element of its
//!   conjugacy class (simultaneous conjugation of all constants);
//! - only words reduced relative to the center are tested (in both modes).
//!
//! The work is cut into units (letter pattern, last constant) that are run in
//! waves; results are merged in unit order so any worker count yields the
//! same report.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_all_tuples, verify_with_matrices, GroupWord, SmallGroup};
use crate::error::{Error, Result};
use crate::words::{free_reduce, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    All,
    NonsingularOnly,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub r: usize,
    pub max_length: usize,
    pub mode: SearchMode,
    pub pruned: bool,
    /// Maximal number of word evaluations.
    pub budget: Option<u64>,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub timing: bool,
}

impl SearchConfig {
    pub fn new(r: usize, max_length: usize, mode: SearchMode) -> SearchConfig {
        SearchConfig { r, max_length, mode, pruned: true, budget: None, workers: 1, checkpoint: None, timing: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FoundIdentity {
    pub length: usize,
    pub letters: Vec<Letter>,
    pub constants: Vec<u32>,
    pub text: String,
    pub singular: bool,
}

/// Words removed by each rule, counted over all constant choices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneCounts {
    pub raw: u64,
    pub singular: u64,
    pub relabeling: u64,
    pub not_reduced: u64,
    pub normalization: u64,
    pub conjugation: u64,
    pub tested: u64,
}

impl PruneCounts {
    fn add(&mut self, o: &PruneCounts) {
        self.raw = self.raw.saturating_add(o.raw);
        self.singular = self.singular.saturating_add(o.singular);
        self.relabeling = self.relabeling.saturating_add(o.relabeling);
        self.not_reduced = self.not_reduced.saturating_add(o.not_reduced);
        self.normalization = self.normalization.saturating_add(o.normalization);
        self.conjugation = self.conjugation.saturating_add(o.conjugation);
        self.tested = self.tested.saturating_add(o.tested);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthStats {
    pub length: usize,
    pub tested: u64,
    pub evaluations: u64,
    pub identities: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub group: String,
    pub order: usize,
    pub r: usize,
    pub max_length: usize,
    pub mode: SearchMode,
    pub pruned: bool,
    /// Longest length searched completely.
    pub searched_length: Option<usize>,
    pub minimal_length: Option<usize>,
    pub identities: Vec<FoundIdentity>,
    pub per_length: Vec<LengthStats>,
    pub counts: PruneCounts,
    pub evaluations: u64,
    pub budget: Option<u64>,
    pub budget_exhausted: bool,
    /// Only filled when timing was requested, so reports stay reproducible.
    pub wall_time_ms: Option<u64>,
}

impl SearchReport {
    /// `Err(BudgetExceeded)` for a partial report.
    pub fn into_result(self) -> Result<SearchReport> {
        match (self.budget_exhausted, self.budget) {
            (true, Some(budget)) => Err(Error::BudgetExceeded { budget }),
            _ => Ok(self),
        }
    }
}

/// Position classes used when enumerating constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Any,
    Central,
    Trivial,
    NonCentral,
    TrivialOrNonCentral,
}

struct Pattern {
    letters: Vec<Letter>,
    slots: Vec<Slot>,
}

fn letter_patterns(r: usize, l: usize) -> Vec<Vec<Letter>> {
    let alphabet: Vec<Letter> = (1..=r).flat_map(|k| [Letter::pos(k), Letter::neg(k)]).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..l {
        out = out
            .into_iter()
            .flat_map(|p| {
                alphabet.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// First occurrences in order 1, 2, .., each with exponent +1.
fn is_canonical_pattern(letters: &[Letter]) -> bool {
    let mut seen = 0;
    for l in letters {
        if l.var > seen {
            if l.var != seen + 1 || l.exp != 1 {
                return false;
            }
            seen += 1;
        }
    }
    true
}

fn slots_for(letters: &[Letter], pruned: bool) -> Vec<Slot> {
    let l = letters.len();
    let mut slots = vec![Slot::Any; l + 1];
    if l == 0 {
        return slots;
    }
    let mut seen = vec![false; letters.iter().map(|x| x.var).max().unwrap_or(0) + 1];
    for j in 0..l {
        let first = !seen[letters[j].var];
        seen[letters[j].var] = true;
        slots[j] = if j == 0 {
            if pruned {
                Slot::Central
            } else {
                Slot::Any
            }
        } else if pruned && first {
            Slot::Trivial
        } else if letters[j - 1].var == letters[j].var && letters[j - 1].exp == -letters[j].exp {
            Slot::NonCentral
        } else {
            Slot::TrivialOrNonCentral
        };
    }
    slots
}

fn slot_values(g: &SmallGroup, slot: Slot) -> Vec<u32> {
    let all = 0..g.order() as u32;
    match slot {
        Slot::Any => all.collect(),
        Slot::Central => all.filter(|&a| g.is_central(a)).collect(),
        Slot::Trivial => vec![g.identity()],
        Slot::NonCentral => all.filter(|&a| !g.is_central(a)).collect(),
        Slot::TrivialOrNonCentral => all.filter(|&a| a == g.identity() || !g.is_central(a)).collect(),
    }
}

fn count_values(g: &SmallGroup, slot: Slot, pruned: bool) -> u64 {
    // Counts before normalization: forced slots count as their unpruned range.
    let s = match (slot, pruned) {
        (Slot::Central, false) | (Slot::Trivial, false) => unreachable!(),
        (s, _) => s,
    };
    slot_values(g, s).len() as u64
}

fn product(xs: impl Iterator<Item = u64>) -> u64 {
    xs.fold(1u64, |a, b| a.saturating_mul(b))
}

struct UnitResult {
    tested: u64,
    conjugation: u64,
    evaluations: u64,
    identities: Vec<FoundIdentity>,
}

fn run_unit(g: &SmallGroup, r: usize, pattern: &Pattern, last: u32, pruned: bool) -> UnitResult {
    let l = pattern.letters.len();
    let mut res = UnitResult { tested: 0, conjugation: 0, evaluations: 0, identities: Vec::new() };
    let values: Vec<Vec<u32>> = pattern.slots[..l].iter().map(|&s| slot_values(g, s)).collect();
    if values.iter().any(|v| v.is_empty()) {
        return res;
    }
    let mut pos = vec![0usize; l];
    let mut constants: Vec<u32> = values.iter().map(|v| v[0]).chain(std::iter::once(last)).collect();
    loop {
        for (j, v) in values.iter().enumerate() {
            constants[j] = v[pos[j]];
        }
        let canonical_conjugate = !pruned
            || constants[1..]
                .iter()
                .find(|&&c| !g.is_central(c))
                .is_none_or(|&c| g.class_min(c) == c);
        if canonical_conjugate {
            let w = GroupWord { r, letters: pattern.letters.clone(), constants: constants.clone() };
            if l > 0 || w.constants[0] != g.identity() {
                res.tested += 1;
                let check = check_all_tuples(&w, g);
                res.evaluations += check.evaluations;
                if check.holds {
                    res.identities.push(FoundIdentity {
                        length: l,
                        text: w.text(g),
                        singular: w.is_singular(),
                        letters: w.letters,
                        constants: w.constants,
                    });
                }
            }
        } else {
            res.conjugation += 1;
        }
        let mut k = 0;
        loop {
            if k == l {
                return res;
            }
            pos[k] += 1;
            if pos[k] < values[k].len() {
                break;
            }
            pos[k] = 0;
            k += 1;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    length: usize,
    next_unit: usize,
    report: SearchReport,
}

fn fingerprint(g: &SmallGroup, cfg: &SearchConfig) -> String {
    format!("{g}|r={}|max={}|{:?}|pruned={}|budget={:?}", cfg.r, cfg.max_length, cfg.mode, cfg.pruned, cfg.budget)
}

fn load_checkpoint(path: &PathBuf, fp: &str) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
    let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
    if cp.fingerprint != fp {
        return Err(Error::Validation("checkpoint belongs to a different search".into()));
    }
    Ok(Some(cp))
}

fn save_checkpoint(path: &PathBuf, cp: &Checkpoint) -> Result<()> {
    let text = serde_json::to_string(cp).map_err(|e| Error::Validation(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::Validation(format!("checkpoint: {e}")))
}

/// Searches lengths `0..=max_length` and stops after the first length at which
/// identities exist. Every reported identity is re-checked with matrix
/// arithmetic.
pub fn shortest_identity_search(g: &SmallGroup, cfg: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    let fp = fingerprint(g, cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Validation(e.to_string()))?;
    let mut report = SearchReport {
        group: g.to_string(),
        order: g.order(),
        r: cfg.r,
        max_length: cfg.max_length,
        mode: cfg.mode,
        pruned: cfg.pruned,
        searched_length: None,
        minimal_length: None,
        identities: Vec::new(),
        per_length: Vec::new(),
        counts: PruneCounts::default(),
        evaluations: 0,
        budget: cfg.budget,
        budget_exhausted: false,
        wall_time_ms: None,
    };
    let (mut first_length, mut first_unit) = (0, 0);
    if let Some(path) = &cfg.checkpoint {
        if let Some(cp) = load_checkpoint(path, &fp)? {
            report = cp.report;
            first_length = cp.length;
            first_unit = cp.next_unit;
        }
    }
    let order = g.order() as u64;
    let wave = 8 * cfg.workers.max(1);

    for l in first_length..=cfg.max_length {
        if report.minimal_length.is_some() || report.budget_exhausted {
            break;
        }
        let mut patterns = Vec::new();
        if first_unit == 0 || l != first_length {
            let mut counts = PruneCounts::default();
            for letters in letter_patterns(cfg.r, l) {
                let raw = product(std::iter::repeat_n(order, l + 1));
                counts.raw = counts.raw.saturating_add(raw);
                if cfg.mode == SearchMode::NonsingularOnly && (l > 0 && free_reduce(&letters).is_empty()) {
                    counts.singular = counts.singular.saturating_add(raw);
                    continue;
                }
                if cfg.pruned && !is_canonical_pattern(&letters) {
                    counts.relabeling = counts.relabeling.saturating_add(raw);
                    continue;
                }
                let reduced = product(slots_for(&letters, false).iter().map(|&s| count_values(g, s, false)));
                counts.not_reduced = counts.not_reduced.saturating_add(raw - reduced);
                if cfg.pruned {
                    let normalized = product(slots_for(&letters, true).iter().map(|&s| slot_values(g, s).len() as u64));
                    counts.normalization = counts.normalization.saturating_add(reduced - normalized);
                }
                patterns.push(letters);
            }
            report.counts.add(&counts);
            report.per_length.push(LengthStats { length: l, ..Default::default() });
        } else {
            for letters in letter_patterns(cfg.r, l) {
                let singular = l > 0 && free_reduce(&letters).is_empty();
                if (cfg.mode == SearchMode::NonsingularOnly && singular) || (cfg.pruned && !is_canonical_pattern(&letters)) {
                    continue;
                }
                patterns.push(letters);
            }
        }
        let patterns: Vec<Pattern> = patterns
            .into_iter()
            .map(|letters| Pattern { slots: slots_for(&letters, cfg.pruned), letters })
            .collect();
        let units: Vec<(usize, u32)> = patterns
            .iter()
            .enumerate()
            .flat_map(|(p, pat)| slot_values(g, pat.slots[l]).into_iter().map(move |c| (p, c)))
            .collect();
        let mut next = if l == first_length { first_unit } else { 0 };
        while next < units.len() {
            let end = (next + wave).min(units.len());
            let results: Vec<UnitResult> = pool.install(|| {
                units[next..end]
                    .par_iter()
                    .map(|&(p, c)| run_unit(g, cfg.r, &patterns[p], c, cfg.pruned))
                    .collect()
            });
            for res in results {
                if let Some(budget) = cfg.budget {
                    if report.evaluations.saturating_add(res.evaluations) > budget {
                        report.budget_exhausted = true;
                        break;
                    }
                }
                report.evaluations += res.evaluations;
                report.counts.tested += res.tested;
                report.counts.conjugation += res.conjugation;
                let stats = report.per_length.last_mut().expect("length entry");
                stats.tested += res.tested;
                stats.evaluations += res.evaluations;
                stats.identities += res.identities.len();
                report.identities.extend(res.identities);
                next += 1;
            }
            if let Some(path) = &cfg.checkpoint {
                save_checkpoint(path, &Checkpoint { fingerprint: fp.clone(), length: l, next_unit: next, report: report.clone() })?;
            }
            if report.budget_exhausted {
                break;
            }
        }
        if report.budget_exhausted {
            break;
        }
        report.searched_length = Some(l);
        if !report.identities.is_empty() {
            report.minimal_length = Some(l);
        }
        if let Some(path) = &cfg.checkpoint {
            save_checkpoint(path, &Checkpoint { fingerprint: fp.clone(), length: l + 1, next_unit: 0, report: report.clone() })?;
        }
    }
    for found in &report.identities {
        let w = GroupWord { r: cfg.r, letters: found.letters.clone(), constants: found.constants.clone() };
        if !verify_with_matrices(&w, g)? {
            return Err(Error::Validation(format!("identity {} failed the matrix re-check", found.text)));
        }
    }
    if cfg.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}
