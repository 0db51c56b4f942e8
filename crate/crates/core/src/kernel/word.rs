use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A generator or its inverse, packed as `2 * generator + inverse_bit`.
///
/// The derived ordering puts every inverse right after its generator,
/// which is the letter order used by shortlex comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u32) << 1 | inverse as u32)
    }

    pub fn pos(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn neg(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        Letter(index as u32)
    }
}

/// A freely reduced word over generators and their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Builds a word and freely reduces it.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Wraps letters that the caller knows are already reduced
    /// (or that must stay unreduced, as for monoid words).
    pub fn from_raw(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Appends a letter, cancelling against the last letter if possible.
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn pop(&mut self) -> Option<Letter> {
        self.0.pop()
    }

    pub fn extend_from(&mut self, other: &Word) {
        for &l in &other.0 {
            self.push(l);
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::empty();
        for _ in 0..e.unsigned_abs() {
            w.extend_from(&base);
        }
        w
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.mul(y).mul(&x.inverse()).mul(&y.inverse())
    }

    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.inverse().mul(self).mul(g)
    }

    /// Removes cancelling pairs that wrap around the ends.
    pub fn cyclically_reduced(&self) -> Word {
        let v = &self.0;
        let (mut i, mut j) = (0, v.len());
        while j >= i + 2 && v[i] == v[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        Word(v[i..j].to_vec())
    }

    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        Word(v)
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> WordDisplay<'a, S> {
        WordDisplay { word: self, names }
    }

    /// Applies a substitution `generator -> word` and freely reduces.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut w = Word::empty();
        for &l in &self.0 {
            let img = &images[l.generator()];
            if l.is_inverse() {
                w.extend_from(&img.inverse());
            } else {
                w.extend_from(img);
            }
        }
        w
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::from_letters(iter)
    }
}

pub struct WordDisplay<'a, S> {
    word: &'a Word,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for WordDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        let name = |g: usize| {
            self.names
                .get(g)
                .map(|s| s.as_ref().to_string())
                .unwrap_or_else(|| format!("x{g}"))
        };
        let letters = self.word.letters();
        let compact = self.names.iter().all(|n| n.as_ref().chars().count() == 1)
            && letters.iter().all(|l| !l.is_inverse())
            && letters.windows(2).all(|p| p[0] != p[1]);
        if compact {
            for l in letters {
                f.write_str(&name(l.generator()))?;
            }
            return Ok(());
        }
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == l {
                run += 1;
            }
            if i > 0 {
                f.write_str(" ")?;
            }
            let exp = if l.is_inverse() { -(run as i64) } else { run as i64 };
            if exp == 1 {
                write!(f, "{}", name(l.generator()))?;
            } else {
                write!(f, "{}^{exp}", name(l.generator()))?;
            }
            i += run;
        }
        Ok(())
    }
}
