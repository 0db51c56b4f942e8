//! Word grammar shared by definition files, presentation files and the CLI.
//!
//! ```text
//! word  := item*
//! item  := atom ('^' int)?
//! atom  := name | '1' | '(' word ')' | '[' word ',' word ']'
//! ```
//!
//! When every generator name is a single character, an unknown identifier
//! such as `adacac` is read letter by letter; an exponent then binds to the
//! last letter only, as in ordinary notation.

use super::word::{Letter, Word};
use crate::error::{Error, Result};

pub fn parse_word<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Word> {
    parse_word_at(text, names, 1, 1)
}

pub(crate) fn parse_word_at<S: AsRef<str>>(text: &str, names: &[S], line: usize, column: usize) -> Result<Word> {
    let mut p = WordParser {
        chars: text.chars().collect(),
        pos: 0,
        names: names.iter().map(|s| s.as_ref()).collect(),
        line,
        column,
    };
    let w = p.sequence(&[])?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(w)
}

/// Splits a comma-separated list of words, respecting brackets.
pub fn parse_word_list<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for &(i, c) in &chars {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(parse_word_at(&text[start..i], names, 1, start + 1)?);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    let tail = &text[start..];
    if !tail.trim().is_empty() || !out.is_empty() {
        out.push(parse_word_at(tail, names, 1, start + 1)?);
    }
    Ok(out)
}

struct WordParser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: Vec<&'a str>,
    line: usize,
    column: usize,
}

impl WordParser<'_> {
    fn error(&self, message: String) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column + self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self, stops: &[char]) -> Result<Word> {
        let mut w = Word::empty();
        loop {
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(c) if stops.contains(&c) => break,
                Some(_) => {}
            }
            let (prefix, base) = self.atom()?;
            self.skip_ws();
            let exp = if self.peek() == Some('^') {
                self.pos += 1;
                self.skip_ws();
                self.integer()?
            } else {
                1
            };
            w.extend_from(&prefix);
            w.extend_from(&base.pow(exp));
        }
        Ok(w)
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<i64>().map_err(|_| {
            self.pos = start;
            self.error("expected an integer exponent".into())
        })
    }

    fn atom(&mut self) -> Result<(Word, Word)> {
        let c = self.peek().expect("caller checked");
        match c {
            '1' => {
                self.pos += 1;
                if matches!(self.peek(), Some(d) if d.is_ascii_alphanumeric()) {
                    return Err(self.error("malformed identity token".into()));
                }
                Ok((Word::empty(), Word::empty()))
            }
            '(' => {
                self.pos += 1;
                let inner = self.sequence(&[')'])?;
                self.expect(')')?;
                Ok((Word::empty(), inner))
            }
            '[' => {
                self.pos += 1;
                let x = self.sequence(&[','])?;
                self.expect(',')?;
                let y = self.sequence(&[']'])?;
                self.expect(']')?;
                Ok((Word::empty(), Word::commutator(&x, &y)))
            }
            c if c.is_ascii_alphabetic() => self.identifier(),
            other => Err(self.error(format!("unexpected `{other}`"))),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn identifier(&mut self) -> Result<(Word, Word)> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let ident: String = self.chars[start..self.pos].iter().collect();
        if let Some(g) = self.names.iter().position(|n| *n == ident) {
            return Ok((Word::empty(), Word::letter(Letter::pos(g))));
        }
        let single = !self.names.is_empty() && self.names.iter().all(|n| n.chars().count() == 1);
        if single {
            let mut letters = Vec::new();
            for (k, ch) in ident.chars().enumerate() {
                let mut buf = [0u8; 4];
                let s: &str = ch.encode_utf8(&mut buf);
                match self.names.iter().position(|n| *n == s) {
                    Some(g) => letters.push(Letter::pos(g)),
                    None => {
                        self.pos = start + k;
                        return Err(self.error(format!("unknown generator `{ch}`")));
                    }
                }
            }
            let last = letters.pop().expect("nonempty identifier");
            return Ok((Word::from_letters(letters), Word::letter(last)));
        }
        self.pos = start;
        Err(self.error(format!("unknown generator `{ident}`")))
    }
}
