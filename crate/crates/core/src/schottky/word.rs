//! Reduced words in the free group on `a, b, c, ...`.
//!
//! Lower-case letters are generators, upper-case letters their inverses,
//! so `"bAB"` is `b a^-1 b^-1`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        if ch.is_ascii_lowercase() {
            Some(Letter::new(ch as usize - 'a' as usize, false))
        } else if ch.is_ascii_uppercase() {
            Some(Letter::new(ch as usize - 'A' as usize, true))
        } else {
            None
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.inverse { b'A' } else { b'a' };
        (base + self.generator as u8) as char
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// Rejects words containing an adjacent cancelling pair.
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if let Some(i) = letters.windows(2).position(|w| w[0] == w[1].inv()) {
            let shown: String = letters.iter().map(|l| l.to_char()).collect();
            return Err(Error::NotReduced(format!("{shown} (position {i})")));
        }
        if letters.iter().any(|l| l.generator >= 26) {
            return Err(Error::InvalidInput("at most 26 generators".into()));
        }
        Ok(Word { letters })
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for ch in s.chars() {
            if ch.is_whitespace() || ch == '1' && s.trim() == "1" {
                continue;
            }
            letters.push(
                Letter::from_char(ch)
                    .ok_or_else(|| Error::InvalidInput(format!("bad letter {ch:?} in word {s:?}")))?,
            );
        }
        Word::new(letters)
    }

    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(i: usize) -> Self {
        Word {
            letters: vec![Letter::new(i, false)],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &Word) -> Self {
        Word::reduce(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut w = Word::identity();
        for _ in 0..n {
            w = w.concat(self);
        }
        w
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(f), Some(l)) => self.letters.len() == 1 || *f != l.inv(),
            _ => true,
        }
    }

    /// Strips conjugating letters until the word is cyclically reduced.
    pub fn cyclically_reduced(&self) -> Self {
        let mut lo = 0;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == self.letters[hi - 1].inv() {
            lo += 1;
            hi -= 1;
        }
        Word {
            letters: self.letters[lo..hi].to_vec(),
        }
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    /// Only meaningful (reduced) for cyclically reduced words.
    pub fn rotate(&self, k: usize) -> Self {
        if self.letters.is_empty() {
            return self.clone();
        }
        let mut letters = self.letters.clone();
        letters.rotate_left(k % self.letters.len());
        Word { letters }
    }

    /// All cyclic rotations of a cyclically reduced word.
    pub fn rotations(&self) -> Vec<Word> {
        (0..self.len().max(1)).map(|k| self.rotate(k)).collect()
    }

    /// Number of letters equal to generator `g` or its inverse.
    pub fn count(&self, g: usize) -> usize {
        self.letters.iter().filter(|l| l.generator == g).count()
    }

    /// Whether two cyclically reduced words are conjugate in the free group.
    pub fn is_conjugate_to(&self, other: &Word) -> bool {
        let a = self.cyclically_reduced();
        let b = other.cyclically_reduced();
        a.len() == b.len() && a.rotations().contains(&b)
    }

    /// Every cyclically reduced word of length `1..=max_len` in `rank` generators.
    pub fn cyclically_reduced_up_to(rank: usize, max_len: usize) -> Vec<Word> {
        let alphabet: Vec<Letter> = (0..rank)
            .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
            .collect();
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(frontier.len() * (2 * rank - 1).max(1));
            for w in &frontier {
                for &l in &alphabet {
                    if w.last() == Some(&l.inv()) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            for w in &next {
                let word = Word { letters: w.clone() };
                if word.is_cyclically_reduced() {
                    out.push(word);
                }
            }
            frontier = next;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}
