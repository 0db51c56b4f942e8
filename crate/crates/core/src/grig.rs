//! The first Grigorchuk group: Lysenok's substitution and relators, the
//! truncated presentations, the level-one section map on the stabilizer
//! subgroup and generator words for the subgroups used in index checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{parse_word, Letter, Word};
use crate::rewriting::Presentation;

pub const NAMES: [&str; 4] = ["a", "b", "c", "d"];
pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;

/// Default cap on relator length.
pub const MAX_RELATOR_LENGTH: usize = 1 << 16;

pub fn names() -> Vec<String> {
    NAMES.iter().map(|s| s.to_string()).collect()
}

pub fn word(text: &str) -> Result<Word> {
    parse_word(text, &NAMES)
}

fn w(text: &str) -> Word {
    word(text).expect("static word")
}

pub fn show(w: &Word) -> String {
    w.display(&NAMES).to_string()
}

/// `σ: a ↦ aca, b ↦ d, c ↦ b, d ↦ c`.
pub fn sigma_images() -> [Word; 4] {
    [w("aca"), w("d"), w("b"), w("c")]
}

pub fn sigma_apply(word: &Word, k: usize) -> Word {
    let images = sigma_images();
    let mut cur = word.clone();
    for _ in 0..k {
        cur = cur.substitute(&images);
    }
    cur
}

fn sigma_apply_capped(word: &Word, k: usize, cap: usize) -> Result<Word> {
    let images = sigma_images();
    let mut cur = word.clone();
    for _ in 0..k {
        cur = cur.substitute(&images);
        if cur.len() > cap {
            return Err(Error::BudgetExceeded {
                what: "relator length",
                limit: cap,
                frontier: cur.len(),
            });
        }
    }
    Ok(cur)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelatorKind {
    U,
    V,
}

impl std::str::FromStr for RelatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" | "U" => Ok(RelatorKind::U),
            "v" | "V" => Ok(RelatorKind::V),
            other => Err(Error::invalid(format!("relator kind must be u or v, got `{other}`"))),
        }
    }
}

pub fn u0() -> Word {
    w("(ad)^4")
}

pub fn v0() -> Word {
    w("(adacac)^4")
}

pub fn lysenok_relator(kind: RelatorKind, n: usize) -> Result<Word> {
    let base = match kind {
        RelatorKind::U => u0(),
        RelatorKind::V => v0(),
    };
    sigma_apply_capped(&base, n, MAX_RELATOR_LENGTH)
}

/// Lysenok relators with their σ-iterates cached.
#[derive(Clone, Debug, Default)]
pub struct LysenokData {
    u: Vec<Word>,
    v: Vec<Word>,
}

impl LysenokData {
    pub fn new() -> Self {
        LysenokData {
            u: vec![u0()],
            v: vec![v0()],
        }
    }

    pub fn relator(&mut self, kind: RelatorKind, n: usize) -> Result<&Word> {
        let list = match kind {
            RelatorKind::U => &mut self.u,
            RelatorKind::V => &mut self.v,
        };
        while list.len() <= n {
            let next = sigma_apply_capped(list.last().expect("seeded"), 1, MAX_RELATOR_LENGTH)?;
            list.push(next);
        }
        Ok(&list[n])
    }
}

/// `⟨a,b,c,d | a², b², c², d², bcd, u_0..u_n, v_0..v_{n−1}⟩`.
pub fn g_n_presentation(n: usize) -> Result<Presentation> {
    let mut data = LysenokData::new();
    let mut rels: Vec<Word> = ["a^2", "b^2", "c^2", "d^2", "bcd"].iter().map(|s| w(s)).collect();
    for i in 0..=n {
        rels.push(data.relator(RelatorKind::U, i)?.clone());
    }
    for i in 0..n {
        rels.push(data.relator(RelatorKind::V, i)?.clone());
    }
    Presentation::new(names(), rels)
}

/// `C2 ∗ V = ⟨a,b,c,d | a², b², c², d², bcd⟩`.
pub fn c2_free_v() -> Presentation {
    Presentation::new(
        names(),
        ["a^2", "b^2", "c^2", "d^2", "bcd"].iter().map(|s| w(s)).collect(),
    )
    .expect("static")
}

/// Generators `b, c, d, aba, aca, ada` of the index-two subgroup.
pub fn xi0_generators() -> Vec<(String, Word)> {
    ["b", "c", "d", "aba", "aca", "ada"]
        .iter()
        .map(|s| (s.to_string(), w(s)))
        .collect()
}

/// `ξ1 = b, ξ2 = aba, ξ3 = dabad, ξ4 = adabada`.
pub fn b0_generators() -> Vec<(String, Word)> {
    [("xi1", "b"), ("xi2", "aba"), ("xi3", "dabad"), ("xi4", "adabada")]
        .iter()
        .map(|(n, s)| (n.to_string(), w(s)))
        .collect()
}

/// `t = (ab)², v = (bada)², w = (abad)²`.
pub fn k0_generators() -> Vec<(String, Word)> {
    [("t", "(ab)^2"), ("v", "(bada)^2"), ("w", "(abad)^2")]
        .iter()
        .map(|(n, s)| (n.to_string(), w(s)))
        .collect()
}

/// Generators of `H_n`: `H_0 = {t, v, w}` and
/// `H_n = {a σ(g) a} ∪ {σ(g)}` over the generators `g` of `H_{n−1}`.
pub fn h_n_generators(n: usize) -> Vec<Word> {
    let mut gens: Vec<Word> = k0_generators().into_iter().map(|(_, w)| w).collect();
    let a = Word::letter(Letter::pos(A));
    for _ in 0..n {
        let sig: Vec<Word> = gens.iter().map(|g| sigma_apply(g, 1)).collect();
        let mut next: Vec<Word> = sig.iter().map(|s| a.mul(s).mul(&a)).collect();
        next.extend(sig);
        gens = next;
    }
    gens
}

/// Index of `H_n` in `𝔊_n` predicted by `2^(2^(n+1)+2)`.
pub fn predicted_h_index(n: u32) -> u128 {
    1u128 << ((1u32 << (n + 1)) + 2)
}

/// Level-one images of the stabilizer generators.
fn psi0_table(token: &[Letter]) -> Option<(Word, Word)> {
    let g = |l: &Letter| if l.is_inverse() { None } else { Some(l.generator()) };
    let pair = |x: &str, y: &str| Some((w(x), w(y)));
    match token {
        [x] => match g(x)? {
            B => pair("a", "c"),
            C => pair("a", "d"),
            D => pair("1", "b"),
            _ => None,
        },
        [p, x, q] if g(p)? == A && g(q)? == A => match g(x)? {
            B => pair("c", "a"),
            C => pair("d", "a"),
            D => pair("b", "1"),
            _ => None,
        },
        _ => None,
    }
}

/// Image of a word over the stabilizer generators, read as a product of
/// tokens `b, c, d, aba, aca, ada`.
pub fn psi0_image(word: &Word) -> Result<(Word, Word)> {
    let letters = word.letters();
    let mut left = Word::empty();
    let mut right = Word::empty();
    let mut i = 0;
    while i < letters.len() {
        let len = if letters[i] == Letter::pos(A) { 3 } else { 1 };
        let token = letters
            .get(i..i + len)
            .ok_or_else(|| Error::invalid(format!("token at position {i} is not a stabilizer generator")))?;
        let (x, y) = psi0_table(token)
            .ok_or_else(|| Error::invalid(format!("token at position {i} is not a stabilizer generator")))?;
        left.extend_from(&x);
        right.extend_from(&y);
        i += len;
    }
    Ok((left, right))
}
