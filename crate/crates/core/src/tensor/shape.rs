use super::Word;
use crate::error::{Error, Result};

/// Default cap on the total number of stored coefficients.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Alphabet size and truncation order of a truncated tensor sequence.
///
/// Coefficients are stored level after level; inside level `n` a word
/// `i_1 … i_n` sits at `Σ_k i_k·width^(n−k)` (base `width`, most significant letter first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    width: usize,
    order: usize,
}

impl Shape {
    pub fn new(width: usize, order: usize) -> Result<Self> {
        Self::with_budget(width, order, DEFAULT_BUDGET)
    }

    pub fn with_budget(width: usize, order: usize, budget: usize) -> Result<Self> {
        if width == 0 || width > 256 {
            return Err(Error::InvalidArgument(format!("alphabet size {width} not in 1..=256")));
        }
        let mut total: u128 = 0;
        let mut level: u128 = 1;
        for _ in 0..=order {
            total += level;
            if total > budget as u128 {
                return Err(Error::Budget { requested: Self::total_u128(width, order), budget: budget as u128 });
            }
            level *= width as u128;
        }
        Ok(Shape { width, order })
    }

    fn total_u128(width: usize, order: usize) -> u128 {
        let mut total: u128 = 0;
        let mut level: u128 = 1;
        for _ in 0..=order {
            total = total.saturating_add(level);
            level = level.saturating_mul(width as u128);
        }
        total
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same alphabet, different order; no budget check beyond the original.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        Shape::new(self.width, order)
    }

    pub fn level_len(&self, n: usize) -> usize {
        self.width.pow(n as u32)
    }

    pub fn offset(&self, n: usize) -> usize {
        if self.width == 1 {
            n
        } else {
            (self.level_len(n) - 1) / (self.width - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.offset(self.order + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn level_range(&self, n: usize) -> std::ops::Range<usize> {
        let o = self.offset(n);
        o..o + self.level_len(n)
    }

    /// Index of `w` in the flat coefficient array.
    pub fn index(&self, w: &Word) -> Result<usize> {
        w.check(self.width)?;
        if w.len() > self.order {
            return Err(Error::WordTooLong { len: w.len(), order: self.order });
        }
        Ok(self.offset(w.len()) + self.index_in_level(w.letters()))
    }

    pub fn index_in_level(&self, letters: &[u8]) -> usize {
        letters.iter().fold(0, |acc, &l| acc * self.width + l as usize)
    }

    pub fn level_of(&self, index: usize) -> usize {
        (0..=self.order).find(|&n| index < self.offset(n + 1)).expect("index out of range")
    }

    pub fn word(&self, index: usize) -> Word {
        let n = self.level_of(index);
        self.word_in_level(n, index - self.offset(n))
    }

    pub fn word_in_level(&self, n: usize, mut j: usize) -> Word {
        let mut letters = vec![0u8; n];
        for slot in letters.iter_mut().rev() {
            *slot = (j % self.width) as u8;
            j /= self.width;
        }
        Word::new(&letters)
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.len()).map(|i| self.word(i))
    }
}
