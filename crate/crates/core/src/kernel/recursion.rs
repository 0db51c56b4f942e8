use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::parse::{parse_word, parse_word_at};
use super::perm::Permutation;
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Default cap on the number of vertices a level computation may touch.
pub const DEFAULT_LEVEL_CAP: usize = 1 << 20;

/// A vertex of the rooted tree, as a sequence of letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex(pub Vec<usize>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    /// Digits for alphabets up to ten letters (`"012"`), otherwise a
    /// comma-separated list.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let text = text.trim();
        let letters: Vec<usize> = if text.contains(',') {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::invalid(format!("bad vertex `{text}`")))
                })
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::invalid(format!("bad vertex `{text}`")))
                })
                .collect::<Result<_>>()?
        };
        for &x in &letters {
            if x >= degree {
                return Err(Error::LetterOutOfRange { letter: x, degree });
            }
        }
        Ok(Vertex(letters))
    }

    /// Index of the vertex among its level in lexicographic order.
    pub fn index(&self, degree: usize) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * degree + x)
    }

    pub fn from_index(mut index: usize, level: usize, degree: usize) -> Self {
        let mut v = vec![0; level];
        for slot in v.iter_mut().rev() {
            *slot = index % degree;
            index /= degree;
        }
        Vertex(v)
    }

    pub fn display(&self, degree: usize) -> String {
        if degree <= 10 {
            self.0.iter().map(|x| char::from(b'0' + *x as u8)).collect()
        } else {
            self.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub perm: Permutation,
    pub sections: Vec<Word>,
}

/// A finite self-similarity structure: for each generator a permutation of
/// the alphabet and one section word per letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WreathRecursion {
    degree: usize,
    generators: Vec<Generator>,
    names: Vec<String>,
}

impl WreathRecursion {
    pub fn new(degree: usize, generators: Vec<Generator>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid(format!(
                "alphabet degree must be at least 2, got {degree}"
            )));
        }
        let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
        let mut seen = HashSet::new();
        for g in &generators {
            if !seen.insert(g.name.as_str()) {
                return Err(Error::Semantic {
                    generator: g.name.clone(),
                    message: "declared twice".into(),
                });
            }
            if g.perm.degree() != degree {
                return Err(Error::Semantic {
                    generator: g.name.clone(),
                    message: format!("permutation has {} entries, expected {degree}", g.perm.degree()),
                });
            }
            if g.sections.len() != degree {
                return Err(Error::Semantic {
                    generator: g.name.clone(),
                    message: format!("{} sections given, expected {degree}", g.sections.len()),
                });
            }
            if let Some(m) = g.sections.iter().filter_map(|w| w.max_generator()).max() {
                if m >= generators.len() {
                    return Err(Error::Semantic {
                        generator: g.name.clone(),
                        message: format!("section refers to undeclared generator index {m}"),
                    });
                }
            }
        }
        Ok(WreathRecursion {
            degree,
            generators,
            names,
        })
    }

    /// The recursion with no generators.
    pub fn trivial(degree: usize) -> Self {
        WreathRecursion {
            degree,
            generators: Vec::new(),
            names: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.names)
    }

    pub fn show(&self, w: &Word) -> String {
        w.display(&self.names).to_string()
    }

    /// Section and image of a single letter at `x`. For inverse letters the
    /// data is derived from the stored generator: `(s⁻¹)_x = (s_{x·s⁻¹})⁻¹`.
    pub fn letter_section(&self, l: Letter, x: usize) -> (Word, usize) {
        let g = &self.generators[l.generator()];
        if l.is_inverse() {
            let y = g.perm.preimage(x);
            (g.sections[y].inverse(), y)
        } else {
            (g.sections[x].clone(), g.perm.apply(x))
        }
    }

    /// `(g_x, x·g)` computed left to right with `(gh)_x = g_x h_{x·g}`.
    pub fn section_at(&self, g: &Word, x: usize) -> (Word, usize) {
        let mut out = Word::empty();
        let mut cur = x;
        for &l in g.letters() {
            let gen = &self.generators[l.generator()];
            if l.is_inverse() {
                let y = gen.perm.preimage(cur);
                out.extend_from(&gen.sections[y].inverse());
                cur = y;
            } else {
                out.extend_from(&gen.sections[cur]);
                cur = gen.perm.apply(cur);
            }
        }
        (out, cur)
    }

    /// Image of `x` under the root permutation of `g`.
    pub fn root_image(&self, g: &Word, x: usize) -> usize {
        let mut cur = x;
        for &l in g.letters() {
            let gen = &self.generators[l.generator()];
            cur = if l.is_inverse() {
                gen.perm.preimage(cur)
            } else {
                gen.perm.apply(cur)
            };
        }
        cur
    }

    pub fn root_permutation(&self, g: &Word) -> Permutation {
        Permutation::from_images_unchecked((0..self.degree).map(|x| self.root_image(g, x)).collect())
    }

    fn check_vertex(&self, v: &Vertex) -> Result<()> {
        for &x in &v.0 {
            if x >= self.degree {
                return Err(Error::LetterOutOfRange {
                    letter: x,
                    degree: self.degree,
                });
            }
        }
        Ok(())
    }

    pub fn act(&self, g: &Word, v: &Vertex) -> Result<Vertex> {
        self.check_vertex(v)?;
        let mut cur = g.clone();
        let mut out = Vec::with_capacity(v.level());
        for &x in &v.0 {
            let (s, y) = self.section_at(&cur, x);
            out.push(y);
            cur = s;
        }
        Ok(Vertex(out))
    }

    pub fn section(&self, g: &Word, v: &Vertex) -> Result<Word> {
        self.check_vertex(v)?;
        let mut cur = g.clone();
        for &x in &v.0 {
            cur = self.section_at(&cur, x).0;
        }
        Ok(cur)
    }

    fn level_size(&self, n: usize, cap: usize) -> Result<usize> {
        let size = (self.degree as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::LevelCap { level: n, size, cap });
        }
        Ok(size as usize)
    }

    /// Permutation of the `d^n` vertices of level `n`, indexed
    /// lexicographically.
    pub fn level_permutation(&self, g: &Word, n: usize) -> Result<Permutation> {
        self.level_permutation_capped(g, n, DEFAULT_LEVEL_CAP)
    }

    pub fn level_permutation_capped(&self, g: &Word, n: usize, cap: usize) -> Result<Permutation> {
        self.level_size(n, cap)?;
        let mut images = vec![0usize];
        let mut sections = vec![g.clone()];
        for _ in 0..n {
            let mut next_images = Vec::with_capacity(images.len() * self.degree);
            let mut next_sections = Vec::with_capacity(images.len() * self.degree);
            for (img, s) in images.iter().zip(&sections) {
                for x in 0..self.degree {
                    let (sx, y) = self.section_at(s, x);
                    next_images.push(img * self.degree + y);
                    next_sections.push(sx);
                }
            }
            images = next_images;
            sections = next_sections;
        }
        Ok(Permutation::from_images_unchecked(images))
    }

    /// The level-`n` iterate: all sections `g_v` for `v` of length `n`
    /// (lexicographic order) and the permutation of the level.
    pub fn iterate_recursion(&self, g: &Word, n: usize) -> Result<(Vec<Word>, Permutation)> {
        self.iterate_recursion_capped(g, n, DEFAULT_LEVEL_CAP)
    }

    pub fn iterate_recursion_capped(&self, g: &Word, n: usize, cap: usize) -> Result<(Vec<Word>, Permutation)> {
        self.level_size(n, cap)?;
        let mut images = vec![0usize];
        let mut sections = vec![g.clone()];
        for _ in 0..n {
            let mut next_images = Vec::with_capacity(images.len() * self.degree);
            let mut next_sections = vec![Word::empty(); images.len() * self.degree];
            for (i, s) in sections.iter().enumerate() {
                for x in 0..self.degree {
                    let (sx, y) = self.section_at(s, x);
                    next_images.push(images[i] * self.degree + y);
                    next_sections[i * self.degree + x] = sx;
                }
            }
            images = next_images;
            sections = next_sections;
        }
        Ok((sections, Permutation::from_images_unchecked(images)))
    }

    /// Serializes back into the definition-file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("alphabet {}\n", self.degree);
        for g in &self.generators {
            let perm: Vec<String> = g.perm.images().iter().map(|x| x.to_string()).collect();
            let secs: Vec<String> = g
                .sections
                .iter()
                .map(|w| {
                    if w.is_empty() {
                        "1".to_string()
                    } else {
                        spaced(w, &self.names)
                    }
                })
                .collect();
            s.push_str(&format!(
                "gen {} = perm({}) sections({})\n",
                g.name,
                perm.join(" "),
                secs.join(", ")
            ));
        }
        s
    }
}

fn spaced(w: &Word, names: &[String]) -> String {
    w.letters()
        .iter()
        .map(|l| {
            let n = &names[l.generator()];
            if l.is_inverse() {
                format!("{n}^-1")
            } else {
                n.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for WreathRecursion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct RawGen {
    name: String,
    line: usize,
    perm: Vec<usize>,
    perm_col: usize,
    sections: Vec<(String, usize)>,
}

/// Parses the line-oriented definition format:
///
/// ```text
/// alphabet 2
/// gen a = perm(1 0) sections(1, 1)
/// gen b = perm(0 1) sections(a, c)
/// ```
pub fn parse_recursion(text: &str) -> Result<WreathRecursion> {
    let mut degree: Option<usize> = None;
    let mut raw: Vec<RawGen> = Vec::new();
    for (ln, full) in text.lines().enumerate() {
        let line = ln + 1;
        let content = full.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let err = |col: usize, msg: String| Error::Parse {
            line,
            column: col + 1,
            message: msg,
        };
        if let Some(rest) = trimmed.strip_prefix("alphabet") {
            if degree.is_some() {
                return Err(err(indent, "alphabet declared twice".into()));
            }
            let d = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| err(indent + 8, "expected alphabet degree".into()))?;
            if d < 2 {
                return Err(err(indent + 8, "alphabet degree must be at least 2".into()));
            }
            degree = Some(d);
            continue;
        }
        let Some(rest) = trimmed.strip_prefix("gen ") else {
            return Err(err(indent, "expected `alphabet` or `gen`".into()));
        };
        if degree.is_none() {
            return Err(err(indent, "`gen` before `alphabet`".into()));
        }
        let base = indent + 4;
        let eq = rest
            .find('=')
            .ok_or_else(|| err(base, "expected `=` after generator name".into()))?;
        let name = rest[..eq].trim().to_string();
        if !is_name(&name) {
            return Err(err(base, format!("invalid generator name `{name}`")));
        }
        let body = &rest[eq + 1..];
        let body_col = base + eq + 1;
        let p_at = body
            .find("perm(")
            .ok_or_else(|| err(body_col, "expected `perm(...)`".into()))?;
        let p_end = body[p_at..]
            .find(')')
            .map(|i| p_at + i)
            .ok_or_else(|| err(body_col + p_at, "unclosed `perm(`".into()))?;
        let perm_col = body_col + p_at + 5;
        let perm: Vec<usize> = body[p_at + 5..p_end]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| err(perm_col, format!("bad permutation entry `{t}`")))
            })
            .collect::<Result<_>>()?;
        let s_at = body[p_end..]
            .find("sections(")
            .map(|i| p_end + i)
            .ok_or_else(|| err(body_col + p_end, "expected `sections(...)`".into()))?;
        let s_end = body
            .rfind(')')
            .filter(|&i| i > s_at + 8)
            .ok_or_else(|| err(body_col + s_at, "unclosed `sections(`".into()))?;
        if !body[s_end + 1..].trim().is_empty() {
            return Err(err(body_col + s_end + 1, "trailing text".into()));
        }
        let inner_start = s_at + 9;
        let inner = &body[inner_start..s_end];
        let mut sections = Vec::new();
        let mut start = 0;
        for (i, c) in inner.char_indices() {
            if c == ',' {
                sections.push((inner[start..i].to_string(), body_col + inner_start + start + 1));
                start = i + 1;
            }
        }
        sections.push((inner[start..].to_string(), body_col + inner_start + start + 1));
        raw.push(RawGen {
            name,
            line,
            perm,
            perm_col,
            sections,
        });
    }
    let degree = degree.ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "missing `alphabet` declaration".into(),
    })?;
    let names: Vec<String> = raw.iter().map(|r| r.name.clone()).collect();
    let mut generators = Vec::with_capacity(raw.len());
    for r in raw {
        let sem = |message: String| Error::Semantic {
            generator: r.name.clone(),
            message,
        };
        if r.perm.len() != degree {
            return Err(sem(format!(
                "permutation has {} entries, expected {degree} (line {}, column {})",
                r.perm.len(),
                r.line,
                r.perm_col
            )));
        }
        let perm = Permutation::from_images(r.perm.clone()).map_err(|_| {
            sem(format!(
                "permutation {:?} is not a bijection of 0..{}",
                r.perm,
                degree - 1
            ))
        })?;
        if r.sections.len() != degree {
            return Err(sem(format!("{} sections given, expected {degree}", r.sections.len())));
        }
        let mut sections = Vec::with_capacity(degree);
        for (text, col) in &r.sections {
            if text.trim().is_empty() {
                return Err(sem(format!("empty section at line {}, column {col}", r.line)));
            }
            let w = parse_word_at(text, &names, r.line, *col).map_err(|e| match e {
                Error::Parse { message, line, column } if message.starts_with("unknown generator") => Error::Semantic {
                    generator: r.name.clone(),
                    message: format!("{message} (line {line}, column {column})"),
                },
                other => other,
            })?;
            sections.push(w);
        }
        generators.push(Generator {
            name: r.name,
            perm,
            sections,
        });
    }
    WreathRecursion::new(degree, generators)
}
