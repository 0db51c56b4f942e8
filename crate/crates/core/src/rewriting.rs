//! Finite presentations and shortlex Knuth–Bendix completion.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{parse_word, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    gens: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(gens: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        let mut seen = HashSet::new();
        for g in &gens {
            if !seen.insert(g.as_str()) {
                return Err(Error::invalid(format!("generator `{g}` listed twice")));
            }
        }
        let mut rels = Vec::new();
        for r in relators {
            let r = Word::from_letters(r.letters().iter().copied());
            if r.is_empty() {
                continue;
            }
            if r.max_generator().unwrap_or(0) >= gens.len() {
                return Err(Error::invalid("relator uses an unknown generator"));
            }
            rels.push(r);
        }
        Ok(Presentation { gens, relators: rels })
    }

    pub fn from_names(gens: &[&str], relators: &[&str]) -> Result<Self> {
        let gens: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
        let rels = relators
            .iter()
            .map(|r| parse_word(r, &gens))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(gens, rels)
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.gens)
    }

    pub fn show(&self, w: &Word) -> String {
        w.display(&self.gens).to_string()
    }

    /// Generators `g` with `g²` among the relators.
    pub fn involutions(&self) -> Vec<bool> {
        let mut inv = vec![false; self.gens.len()];
        for r in &self.relators {
            let l = r.letters();
            if l.len() == 2 && l[0] == l[1] {
                inv[l[0].generator()] = true;
            }
        }
        inv
    }

    pub fn with_relators(&self, extra: &[Word]) -> Presentation {
        let mut rels = self.relators.clone();
        rels.extend(extra.iter().filter(|w| !w.is_empty()).cloned());
        Presentation {
            gens: self.gens.clone(),
            relators: rels,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("pres\ngens {}\n", self.gens.join(" "));
        for r in &self.relators {
            s.push_str(&format!("rel {}\n", spaced(r, &self.gens)));
        }
        s
    }
}

fn spaced(w: &Word, names: &[String]) -> String {
    w.display(names).to_string()
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.show(r)).collect();
        let rels = if rels.is_empty() {
            "∅".to_string()
        } else {
            rels.join(", ")
        };
        write!(f, "<{} | {}>", self.gens.join(", "), rels)
    }
}

/// A presentation file together with its named words (`let` lines).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationFile {
    pub presentation: Presentation,
    pub named: Vec<(String, Word)>,
}

impl PresentationFile {
    pub fn named(&self, name: &str) -> Option<&Word> {
        self.named.iter().find(|(n, _)| n == name).map(|(_, w)| w)
    }
}

/// Parses
///
/// ```text
/// pres
/// gens a b c d
/// rel a^2
/// let t = (ab)^2
/// ```
pub fn parse_presentation(text: &str) -> Result<PresentationFile> {
    let mut gens: Option<Vec<String>> = None;
    let mut header = false;
    let mut rels = Vec::new();
    let mut named = Vec::new();
    for (ln, full) in text.lines().enumerate() {
        let line = ln + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Parse {
            line,
            column: 1,
            message: m.to_string(),
        };
        let shift = |e: Error| match e {
            Error::Parse { column, message, .. } => Error::Parse { line, column, message },
            other => other,
        };
        if content == "pres" {
            header = true;
            continue;
        }
        if !header {
            return Err(err("expected `pres` header"));
        }
        if let Some(rest) = content.strip_prefix("gens") {
            gens = Some(rest.split_whitespace().map(String::from).collect());
        } else if let Some(rest) = content.strip_prefix("rel ") {
            let g = gens.as_ref().ok_or_else(|| err("`rel` before `gens`"))?;
            rels.push(parse_word(rest, g).map_err(shift)?);
        } else if let Some(rest) = content.strip_prefix("let ") {
            let g = gens.as_ref().ok_or_else(|| err("`let` before `gens`"))?;
            let (name, body) = rest
                .split_once('=')
                .ok_or_else(|| err("expected `let <name> = <word>`"))?;
            named.push((name.trim().to_string(), parse_word(body, g).map_err(shift)?));
        } else {
            return Err(err("expected `gens`, `rel` or `let`"));
        }
    }
    if !header {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "missing `pres` header".into(),
        });
    }
    let gens = gens.ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "missing `gens` line".into(),
    })?;
    Ok(PresentationFile {
        presentation: Presentation::new(gens, rels)?,
        named,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionBudget {
    pub max_rules: usize,
    pub max_steps: usize,
}

impl Default for CompletionBudget {
    fn default() -> Self {
        CompletionBudget {
            max_rules: 2_000,
            max_steps: 200_000,
        }
    }
}

/// Length-reducing-or-equal shortlex rewriting system. Involutions (`g²`
/// among the relators) are single self-inverse letters; every other
/// generator has an inverse letter ordered right after it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RewriteSystem {
    gens: Vec<String>,
    involution: Vec<bool>,
    rules: Vec<Rule>,
    complete: bool,
    #[serde(skip)]
    by_last: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Rule {
    lhs: Vec<u32>,
    rhs: Vec<u32>,
}

fn shortlex(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn index_rules(rules: &[Rule], letters: usize) -> Vec<Vec<usize>> {
    let mut by_last = vec![Vec::new(); letters];
    for (i, r) in rules.iter().enumerate() {
        by_last[*r.lhs.last().expect("nonempty lhs") as usize].push(i);
    }
    by_last
}

fn rewrite_with(rules: &[Rule], by_last: &[Vec<usize>], start: Vec<u32>, input: &[u32]) -> Vec<u32> {
    let mut out = start;
    let mut todo: Vec<u32> = input.iter().rev().copied().collect();
    while let Some(c) = todo.pop() {
        out.push(c);
        for &ri in &by_last[c as usize] {
            let l = &rules[ri].lhs;
            if out.ends_with(l) {
                out.truncate(out.len() - l.len());
                todo.extend(rules[ri].rhs.iter().rev());
                break;
            }
        }
    }
    out
}

impl RewriteSystem {
    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn is_involution(&self, g: usize) -> bool {
        self.involution[g]
    }

    fn encode(&self, w: &Word) -> Vec<u32> {
        w.letters()
            .iter()
            .map(|l| {
                if self.involution[l.generator()] {
                    Letter::pos(l.generator()).index() as u32
                } else {
                    l.index() as u32
                }
            })
            .collect()
    }

    fn decode(v: &[u32]) -> Word {
        Word::from_raw(v.iter().map(|&i| Letter::from_index(i as usize)).collect())
    }

    /// The rules, excluding the implicit free-reduction rules `x x⁻¹ → 1`.
    pub fn rules(&self) -> Vec<RewriteRule> {
        self.rules
            .iter()
            .filter(|r| !is_free_rule(r))
            .map(|r| RewriteRule {
                lhs: Self::decode(&r.lhs),
                rhs: Self::decode(&r.rhs),
            })
            .collect()
    }

    pub fn normal_form(&self, w: &Word) -> Word {
        let input = self.encode(w);
        Self::decode(&rewrite_with(&self.rules, &self.by_last, Vec::new(), &input))
    }

    /// Normal form of `nf · l` for `nf` already in normal form.
    pub fn append(&self, nf: &Word, l: Letter) -> Word {
        let start = self.encode(nf);
        let input = self.encode(&Word::letter(l));
        Self::decode(&rewrite_with(&self.rules, &self.by_last, start, &input))
    }

    pub fn is_identity(&self, w: &Word) -> bool {
        self.normal_form(w).is_empty()
    }

    pub fn show_rules(&self) -> Vec<String> {
        self.rules()
            .iter()
            .map(|r| format!("{} -> {}", r.lhs.display(&self.gens), r.rhs.display(&self.gens)))
            .collect()
    }

    /// Rebuilds the lookup index (needed after deserialization).
    pub fn reindex(&mut self) {
        self.by_last = index_rules(&self.rules, 2 * self.gens.len());
    }
}

fn is_free_rule(r: &Rule) -> bool {
    r.rhs.is_empty() && r.lhs.len() == 2 && r.lhs[0] ^ 1 == r.lhs[1]
}

/// Shortlex Knuth–Bendix completion.
pub fn complete(p: &Presentation, budget: CompletionBudget) -> Result<RewriteSystem> {
    let sys = complete_partial(p, budget);
    if sys.complete {
        Ok(sys)
    } else {
        Err(Error::Incomplete {
            rules: sys.rules.len(),
            steps: budget.max_steps,
        })
    }
}

/// Runs completion and returns whatever was reached; check `is_complete`.
pub fn complete_partial(p: &Presentation, budget: CompletionBudget) -> RewriteSystem {
    let k = p.rank();
    let involution = p.involutions();
    let letters = 2 * k;
    let enc = |w: &Word| -> Vec<u32> {
        w.letters()
            .iter()
            .map(|l| {
                if involution[l.generator()] {
                    Letter::pos(l.generator()).index() as u32
                } else {
                    l.index() as u32
                }
            })
            .collect()
    };
    let mut pending: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for (g, &inv) in involution.iter().enumerate().take(k) {
        let x = Letter::pos(g).index() as u32;
        if inv {
            pending.push((vec![x, x], vec![]));
        } else {
            pending.push((vec![x, x + 1], vec![]));
            pending.push((vec![x + 1, x], vec![]));
        }
    }
    for r in p.relators() {
        pending.push((enc(r), vec![]));
    }
    pending.reverse();

    let mut rules: Vec<Option<Rule>> = Vec::new();
    let mut steps = 0usize;
    let mut checked = 0usize;
    let mut complete = false;

    let live = |rules: &[Option<Rule>]| -> (Vec<Rule>, Vec<usize>) {
        let ids: Vec<usize> = (0..rules.len()).filter(|&i| rules[i].is_some()).collect();
        (ids.iter().map(|&i| rules[i].clone().unwrap()).collect(), ids)
    };

    'outer: loop {
        while let Some((a, b)) = pending.pop() {
            steps += 1;
            if steps > budget.max_steps {
                break 'outer;
            }
            let (cur, _) = live(&rules);
            let idx = index_rules(&cur, letters);
            let a = rewrite_with(&cur, &idx, Vec::new(), &a);
            let b = rewrite_with(&cur, &idx, Vec::new(), &b);
            if a == b {
                continue;
            }
            let (lhs, rhs) = if shortlex(&a, &b) == Ordering::Greater {
                (a, b)
            } else {
                (b, a)
            };
            // rules whose left side contains the new one go back to pending
            for slot in rules.iter_mut() {
                if let Some(r) = slot {
                    if r.lhs.windows(lhs.len()).any(|w| w == lhs.as_slice()) {
                        pending.push((r.lhs.clone(), r.rhs.clone()));
                        *slot = None;
                    }
                }
            }
            rules.push(Some(Rule { lhs, rhs }));
            if rules.iter().flatten().count() > budget.max_rules {
                break 'outer;
            }
            // keep right sides reduced
            let (cur, ids) = live(&rules);
            let idx = index_rules(&cur, letters);
            for (pos, &i) in ids.iter().enumerate() {
                let r = rewrite_with(&cur, &idx, Vec::new(), &cur[pos].rhs);
                if let Some(rule) = rules[i].as_mut() {
                    rule.rhs = r;
                }
            }
        }
        // critical pairs involving at least one rule added since the last pass
        let n = rules.len();
        let (cur, _) = live(&rules);
        let idx = index_rules(&cur, letters);
        for i in 0..n {
            for j in 0..n {
                if i < checked && j < checked {
                    continue;
                }
                let (Some(r1), Some(r2)) = (&rules[i], &rules[j]) else {
                    continue;
                };
                let (l1, l2) = (&r1.lhs, &r2.lhs);
                for ov in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - ov..] != l2[..ov] {
                        continue;
                    }
                    let mut x = r1.rhs.clone();
                    x.extend_from_slice(&l2[ov..]);
                    let mut y = l1[..l1.len() - ov].to_vec();
                    y.extend_from_slice(&r2.rhs);
                    let x = rewrite_with(&cur, &idx, Vec::new(), &x);
                    let y = rewrite_with(&cur, &idx, Vec::new(), &y);
                    if x != y {
                        pending.push((x, y));
                    }
                }
            }
        }
        checked = n;
        if pending.is_empty() {
            complete = true;
            break;
        }
    }
    let (mut cur, _) = live(&rules);
    cur.sort_by(|a, b| shortlex(&a.lhs, &b.lhs));
    let by_last = index_rules(&cur, letters);
    RewriteSystem {
        gens: p.generators().to_vec(),
        involution,
        rules: cur,
        complete,
        by_last,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2v() -> Presentation {
        Presentation::from_names(&["a", "b", "c", "d"], &["a^2", "b^2", "c^2", "d^2", "bcd"]).unwrap()
    }

    #[test]
    fn c2v_has_ten_rules() {
        let sys = complete(&c2v(), CompletionBudget::default()).unwrap();
        let mut shown = sys.show_rules();
        shown.sort();
        let mut expected = vec![
            "a^2 -> 1", "b^2 -> 1", "c^2 -> 1", "d^2 -> 1", "bc -> d", "cb -> d", "bd -> c", "db -> c", "cd -> b",
            "dc -> b",
        ];
        expected.sort();
        assert_eq!(shown, expected);
    }

    #[test]
    fn c2v_normal_forms() {
        let p = c2v();
        let sys = complete(&p, CompletionBudget::default()).unwrap();
        let w = |s: &str| p.parse_word(s).unwrap();
        assert_eq!(sys.normal_form(&w("bc")), w("d"));
        assert_eq!(sys.normal_form(&w("abab")), w("abab"));
        assert!(sys.normal_form(&Word::empty()).is_empty());
        assert!(sys.is_identity(&w("b^-1 b")));
        assert_eq!(sys.normal_form(&w("a^-1 d^-1")), w("ad"));
    }

    #[test]
    fn free_group_has_no_rules() {
        let p = Presentation::from_names(&["a"], &[]).unwrap();
        let sys = complete(&p, CompletionBudget::default()).unwrap();
        assert!(sys.rules().is_empty());
        let w = p.parse_word("a a^-1 a").unwrap();
        assert_eq!(sys.normal_form(&w), p.parse_word("a").unwrap());
    }

    #[test]
    fn c3_free_c3() {
        let p = Presentation::from_names(&["a", "b"], &["a^3", "b^3"]).unwrap();
        let sys = complete(&p, CompletionBudget::default()).unwrap();
        // shortlex turns a^2 into a^-1, so syllables are a^1 or a^-1 (= a^2)
        let nf = sys.normal_form(&p.parse_word("a^-1 b^4 a^5").unwrap());
        assert_eq!(nf, p.parse_word("a^-1 b a^-1").unwrap());
        let ls = nf.letters();
        for pair in ls.windows(2) {
            assert_ne!(pair[0].generator(), pair[1].generator());
        }
    }

    #[test]
    fn append_matches_normal_form() {
        let p = c2v();
        let sys = complete(&p, CompletionBudget::default()).unwrap();
        let w = p.parse_word("abcadbcd").unwrap();
        let mut nf = Word::empty();
        for &l in w.letters() {
            nf = sys.append(&nf, l);
        }
        assert_eq!(nf, sys.normal_form(&w));
    }

    #[test]
    fn incomplete_on_tiny_budget() {
        let p = Presentation::from_names(&["a", "b"], &["a b a^-1 b^-2"]).unwrap();
        let r = complete(
            &p,
            CompletionBudget {
                max_rules: 3,
                max_steps: 50,
            },
        );
        assert!(matches!(r, Err(Error::Incomplete { .. })));
    }

    #[test]
    fn presentation_file_roundtrip() {
        let text = "pres\ngens a b c d\nrel a^2\nrel b c d\nlet t = (ab)^2\n";
        let f = parse_presentation(text).unwrap();
        assert_eq!(f.presentation.relators().len(), 2);
        assert_eq!(f.named("t").unwrap().len(), 4);
        let again = parse_presentation(&f.presentation.to_text()).unwrap();
        assert_eq!(again.presentation, f.presentation);
        assert!(parse_presentation("gens a\n").is_err());
        assert!(matches!(
            parse_presentation("pres\ngens a\nrel a z\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
