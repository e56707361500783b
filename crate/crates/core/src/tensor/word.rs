use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// A finite sequence of letters. Letter 0 is the clock when a path is time augmented.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: &[u8]) -> Self {
        Word(letters.to_vec())
    }

    pub fn letter(i: u8) -> Self {
        Word(vec![i])
    }

    /// Single-digit letters, e.g. `"110"`; the empty string is the empty word.
    pub fn from_digits(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("letter '{c}' in word \"{s}\"")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, letter: u8) {
        self.0.push(letter);
    }

    pub fn ends_with(&self, suffix: &Word) -> bool {
        self.0.ends_with(&suffix.0)
    }

    /// `self` repeated `k` times.
    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn check(&self, width: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l as usize >= width) {
            Some(&l) => Err(Error::InvalidLetter { letter: l as usize, width }),
            None => Ok(()),
        }
    }
}

/// CSV form: letters joined by `-`, the empty word is `e`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("-")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" {
            return Ok(Word::empty());
        }
        s.split('-')
            .map(|t| t.parse::<u8>().map_err(|_| Error::Parse(format!("word \"{s}\""))))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        let w = Word::new(&[1, 0, 12]);
        assert_eq!(w.to_string(), "1-0-12");
        assert_eq!("1-0-12".parse::<Word>().unwrap(), w);
        assert_eq!(Word::empty().to_string(), "e");
        assert_eq!("e".parse::<Word>().unwrap(), Word::empty());
        assert!("1--2".parse::<Word>().is_err());
        assert_eq!(Word::from_digits("110").unwrap(), Word::new(&[1, 1, 0]));
    }

    #[test]
    fn letter_check() {
        assert!(Word::new(&[0, 2]).check(3).is_ok());
        assert!(Word::new(&[0, 3]).check(3).is_err());
    }
}
