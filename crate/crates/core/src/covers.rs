//! Contracting covers: the finitely presented group on the nucleus with
//! relators of length at most three, its induced recursion, the standard
//! (self-replicating) cover and membership in the kernel chain.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::contraction::{Budget, Engine, Nucleus};
use crate::error::{Error, Result};
use crate::kernel::{Generator, Letter, Word, WreathRecursion, DEFAULT_LEVEL_CAP};
use crate::rewriting::{complete, CompletionBudget, Presentation, RewriteSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PruneReason {
    Identity,
    /// Kept as the inverse of this nucleus element.
    InverseOf(usize),
    /// Equal to the product of these two nucleus elements.
    Product(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneRecord {
    pub element: usize,
    pub reason: PruneReason,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverPresentation {
    presentation: Presentation,
    generator_element: Vec<usize>,
    images: Vec<Word>,
    recursion: WreathRecursion,
    expressions: Vec<Word>,
    pruned: Vec<PruneRecord>,
}

impl CoverPresentation {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn generators(&self) -> &[String] {
        self.presentation.generators()
    }

    /// Nucleus element behind each cover generator.
    pub fn generator_element(&self) -> &[usize] {
        &self.generator_element
    }

    /// Word in the original generators for each cover generator.
    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn recursion(&self) -> &WreathRecursion {
        &self.recursion
    }

    /// Each nucleus element as a word over cover generators.
    pub fn expression(&self, element: usize) -> &Word {
        &self.expressions[element]
    }

    pub fn pruned(&self) -> &[PruneRecord] {
        &self.pruned
    }

    /// The cover map into the original group, on words.
    pub fn project(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.presentation.parse_word(text)
    }

    pub fn show(&self, w: &Word) -> String {
        self.presentation.show(w)
    }
}

fn fresh_name(taken: &HashSet<String>) -> String {
    for c in 'a'..='z' {
        let s = c.to_string();
        if !taken.contains(&s) {
            return s;
        }
    }
    let mut i = 0;
    loop {
        let s = format!("n{i}");
        if !taken.contains(&s) {
            return s;
        }
        i += 1;
    }
}

/// Builds the universal contracting cover from a nucleus. `names` are the
/// generator names of the original recursion.
pub fn universal_cover(nucleus: &Nucleus, names: &[String], prune: bool) -> CoverPresentation {
    let n = nucleus.len();
    // expressions over temporary letters indexed by nucleus element
    let mut expr: Vec<Word> = (0..n)
        .map(|i| {
            if i == 0 {
                Word::empty()
            } else {
                Word::letter(Letter::pos(i))
            }
        })
        .collect();
    let mut kept: Vec<bool> = (0..n).map(|i| i != 0).collect();
    let mut pruned = vec![PruneRecord {
        element: 0,
        reason: PruneReason::Identity,
    }];
    for i in 1..n {
        let j = nucleus.inverse(i);
        if j > i && kept[i] && kept[j] {
            kept[j] = false;
            expr[j] = expr[i].inverse();
            pruned.push(PruneRecord {
                element: j,
                reason: PruneReason::InverseOf(i),
            });
        }
    }
    if prune {
        let mentions = |w: &Word, k: usize| w.letters().iter().any(|l| l.generator() == k);
        for k in (1..n).rev() {
            if !kept[k] {
                continue;
            }
            let mut choice = None;
            'search: for i in 1..n {
                for j in 1..n {
                    if nucleus.product(i, j) == Some(k) && !mentions(&expr[i], k) && !mentions(&expr[j], k) {
                        choice = Some((i, j));
                        break 'search;
                    }
                }
            }
            if let Some((i, j)) = choice {
                let value = expr[i].mul(&expr[j]);
                let mut subst: Vec<Word> = (0..n).map(|g| Word::letter(Letter::pos(g))).collect();
                subst[k] = value;
                for e in expr.iter_mut() {
                    *e = e.substitute(&subst);
                }
                kept[k] = false;
                pruned.push(PruneRecord {
                    element: k,
                    reason: PruneReason::Product(i, j),
                });
            }
        }
    }
    let generator_element: Vec<usize> = (0..n).filter(|&i| kept[i]).collect();
    let mut to_gen = vec![usize::MAX; n];
    for (g, &i) in generator_element.iter().enumerate() {
        to_gen[i] = g;
    }
    let remap: Vec<Word> = (0..n)
        .map(|i| {
            if kept[i] {
                Word::letter(Letter::pos(to_gen[i]))
            } else {
                Word::empty()
            }
        })
        .collect();
    let expressions: Vec<Word> = expr.iter().map(|w| w.substitute(&remap)).collect();

    let mut taken: HashSet<String> = names.iter().cloned().collect();
    let mut gen_names = Vec::new();
    for &i in &generator_element {
        let rep = nucleus.representative(i);
        let name = if rep.len() == 1 && !rep.letters()[0].is_inverse() {
            names[rep.letters()[0].generator()].clone()
        } else {
            let s = fresh_name(&taken);
            taken.insert(s.clone());
            s
        };
        gen_names.push(name);
    }

    let involution: Vec<bool> = generator_element.iter().map(|&i| nucleus.inverse(i) == i).collect();
    let mut relators: HashSet<Word> = HashSet::new();
    let mut add = |w: Word| {
        if let Some(c) = canonical_relator(&w, &involution) {
            relators.insert(c);
        }
    };
    for i in 1..n {
        add(expressions[i].mul(&expressions[nucleus.inverse(i)]));
        for j in 1..n {
            if let Some(p) = nucleus.product(i, j) {
                if p == 0 {
                    continue;
                }
                for k in 1..n {
                    if nucleus.inverse(k) == p {
                        add(expressions[i].mul(&expressions[j]).mul(&expressions[k]));
                    }
                }
            }
        }
    }
    let mut relators: Vec<Word> = relators.into_iter().collect();
    relators.sort_by(|a, b| a.shortlex_cmp(b));
    let presentation = Presentation::new(gen_names.clone(), relators).expect("valid cover presentation");

    let generators: Vec<Generator> = generator_element
        .iter()
        .zip(&gen_names)
        .map(|(&i, name)| Generator {
            name: name.clone(),
            perm: nucleus.permutation(i).clone(),
            sections: (0..nucleus.degree())
                .map(|x| expressions[nucleus.section(i, x)].clone())
                .collect(),
        })
        .collect();
    let recursion = WreathRecursion::new(nucleus.degree(), generators).expect("induced recursion is well formed");
    let images = generator_element
        .iter()
        .map(|&i| nucleus.representative(i).clone())
        .collect();
    CoverPresentation {
        presentation,
        generator_element,
        images,
        recursion,
        expressions,
        pruned,
    }
}

/// Normalizes a relator up to cyclic permutation and inversion, treating
/// involution letters as self-inverse. Returns `None` for consequences of
/// the involution relators.
fn canonical_relator(w: &Word, involution: &[bool]) -> Option<Word> {
    let fold = |w: &Word| -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for &l in w.letters() {
            let l = if involution[l.generator()] {
                Letter::pos(l.generator())
            } else {
                l
            };
            out.push(l);
        }
        Word::from_raw(out)
    };
    let w = w.cyclically_reduced();
    if w.is_empty() {
        return None;
    }
    let w = fold(&w);
    if w.len() == 2 && w.letters()[0] == w.letters()[1] && involution[w.letters()[0].generator()] {
        return Some(w);
    }
    // cancel g·g for involutions, cyclically
    let mut stack: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        let cancels = stack.last() == Some(&l.inverse()) || (stack.last() == Some(&l) && involution[l.generator()]);
        if cancels {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    while stack.len() >= 2 {
        let (f, b) = (stack[0], stack[stack.len() - 1]);
        if f == b.inverse() || (f == b && involution[f.generator()]) {
            stack.remove(0);
            stack.pop();
        } else {
            break;
        }
    }
    if stack.is_empty() {
        return None;
    }
    let w = Word::from_raw(stack);
    let inv = fold(&w.inverse());
    let mut best = w.clone();
    for k in 0..w.len() {
        for cand in [w.rotate(k), inv.rotate(k)] {
            if cand.shortlex_cmp(&best).is_lt() {
                best = cand;
            }
        }
    }
    Some(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverWitness {
    pub letter: usize,
    pub generator: usize,
    pub word: Word,
    /// The `x`-section of the witness is the generator itself in the cover.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StandardCoverResult {
    pub cover: CoverPresentation,
    pub extra_relators: Vec<Word>,
    pub witnesses: Vec<CoverWitness>,
}

impl StandardCoverResult {
    pub fn universal_is_self_replicating(&self) -> bool {
        self.extra_relators.is_empty()
    }

    pub fn presentation(&self) -> Presentation {
        self.cover.presentation.with_relators(&self.extra_relators)
    }
}

/// Picks a witness `h(x, s)` for every letter and cover generator and
/// collects the sections of the defect words `h_x s⁻¹`.
pub fn standard_cover(cover: &CoverPresentation, engine: &Engine, budget: Budget) -> Result<StandardCoverResult> {
    let sys = complete(cover.presentation(), CompletionBudget::default())?;
    let rec = cover.recursion();
    let d = rec.degree();
    let k = rec.rank();
    let mut exact: HashMap<(usize, usize), Word> = HashMap::new();
    let mut fallback: HashMap<(usize, usize), (Word, Word)> = HashMap::new();
    let gen_elems: Vec<_> = cover
        .images()
        .iter()
        .map(|w| engine.element(w))
        .collect::<Result<Vec<_>>>()?;
    let letters: Vec<Letter> = (0..k)
        .flat_map(|g| {
            if sys.is_involution(g) {
                vec![Letter::pos(g)]
            } else {
                vec![Letter::pos(g), Letter::neg(g)]
            }
        })
        .collect();
    let mut seen: HashSet<Word> = HashSet::from([Word::empty()]);
    let mut queue: VecDeque<Word> = VecDeque::from([Word::empty()]);
    while let Some(h) = queue.pop_front() {
        for x in 0..d {
            let (sec, y) = rec.section_at(&h, x);
            if y != x {
                continue;
            }
            let nf = sys.normal_form(&sec);
            for (g, target) in gen_elems.iter().enumerate().take(k) {
                if exact.contains_key(&(x, g)) {
                    continue;
                }
                if nf.len() == 1 && nf.letters()[0] == Letter::pos(g) {
                    exact.insert((x, g), h.clone());
                } else if !fallback.contains_key(&(x, g)) && nf.len() <= budget.max_word_length {
                    let e = engine.element(&cover.project(&nf))?;
                    if e == *target {
                        fallback.insert((x, g), (h.clone(), nf.clone()));
                    }
                }
            }
        }
        if exact.len() == d * k || seen.len() >= budget.max_states {
            break;
        }
        for &l in &letters {
            let nh = sys.append(&h, l);
            if seen.insert(nh.clone()) {
                queue.push_back(nh);
            }
        }
    }
    let mut witnesses = Vec::new();
    let mut defects = Vec::new();
    for x in 0..d {
        for g in 0..k {
            if let Some(h) = exact.get(&(x, g)) {
                witnesses.push(CoverWitness {
                    letter: x,
                    generator: g,
                    word: h.clone(),
                    exact: true,
                });
            } else if let Some((h, sec)) = fallback.get(&(x, g)) {
                witnesses.push(CoverWitness {
                    letter: x,
                    generator: g,
                    word: h.clone(),
                    exact: false,
                });
                defects.push(sec.mul(&Word::letter(Letter::neg(g))));
            } else {
                return Err(Error::BudgetExceeded {
                    what: "standard cover witness search",
                    limit: budget.max_states,
                    frontier: seen.len(),
                });
            }
        }
    }
    let extra = defect_sections(rec, &sys, &defects, budget)?;
    Ok(StandardCoverResult {
        cover: cover.clone(),
        extra_relators: extra,
        witnesses,
    })
}

/// All nontrivial normal forms among the sections of the given words.
pub fn defect_sections(
    rec: &WreathRecursion,
    sys: &RewriteSystem,
    words: &[Word],
    budget: Budget,
) -> Result<Vec<Word>> {
    let mut seen: HashSet<Word> = HashSet::new();
    let mut queue: VecDeque<Word> = VecDeque::new();
    for w in words {
        let nf = sys.normal_form(w);
        if seen.insert(nf.clone()) {
            queue.push_back(nf);
        }
    }
    while let Some(w) = queue.pop_front() {
        if seen.len() > budget.max_states {
            return Err(Error::BudgetExceeded {
                what: "defect section closure",
                limit: budget.max_states,
                frontier: seen.len(),
            });
        }
        for x in 0..rec.degree() {
            let nf = sys.normal_form(&rec.section_at(&w, x).0);
            if seen.insert(nf.clone()) {
                queue.push_back(nf);
            }
        }
    }
    let mut out: Vec<Word> = seen.into_iter().filter(|w| !w.is_empty()).collect();
    out.sort_by(|a, b| a.shortlex_cmp(b));
    Ok(out)
}

/// Membership of `w` in `N_n`: trivial permutation on the first `n`
/// levels and every level-`n` section trivial in the cover.
pub fn kernel_member(cover: &CoverPresentation, sys: &RewriteSystem, w: &Word, n: usize) -> Result<bool> {
    recursive_kernel_member(cover.recursion(), sys, w, n)
}

pub(crate) fn recursive_kernel_member(rec: &WreathRecursion, sys: &RewriteSystem, w: &Word, n: usize) -> Result<bool> {
    let size = (rec.degree() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let mut level = vec![sys.normal_form(w)];
    for depth in 0..n {
        if level.iter().all(|s| s.is_empty()) {
            return Ok(true);
        }
        let mut next = Vec::with_capacity(level.len() * rec.degree());
        for s in &level {
            if s.is_empty() {
                continue;
            }
            for x in 0..rec.degree() {
                let (sec, y) = rec.section_at(s, x);
                if y != x {
                    return Ok(false);
                }
                next.push(sys.normal_form(&sec));
            }
        }
        if next.len() > DEFAULT_LEVEL_CAP {
            return Err(Error::LevelCap {
                level: depth + 1,
                size,
                cap: DEFAULT_LEVEL_CAP,
            });
        }
        level = next;
    }
    Ok(level.iter().all(|s| s.is_empty()))
}

/// Least `n ≤ n_max` with `w ∈ N_n`.
pub fn kernel_chain_profile(
    cover: &CoverPresentation,
    sys: &RewriteSystem,
    w: &Word,
    n_max: usize,
) -> Result<Option<usize>> {
    for n in 0..=n_max {
        if kernel_member(cover, sys, w, n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
