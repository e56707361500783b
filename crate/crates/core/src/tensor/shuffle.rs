use super::{Scalar, TensorSeq};
use crate::error::Result;

/// Bit masks of length `n` with exactly `p` bits set, in increasing order.
fn interleavings(n: usize, p: usize) -> Vec<u64> {
    if p == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut m: u64 = (1u64 << p) - 1;
    let limit = 1u64 << n;
    while m < limit {
        out.push(m);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

type Entries<S> = Vec<Vec<(Vec<u8>, S)>>;

fn nonzero_by_level<S: Scalar>(t: &TensorSeq<S>, order: usize) -> Entries<S> {
    let shape = t.shape();
    (0..=order)
        .map(|n| {
            t.level(n)
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, &c)| (shape.word_in_level(n, j).letters().to_vec(), c))
                .collect()
        })
        .collect()
}

impl<S: Scalar> TensorSeq<S> {
    /// Shuffle product, truncated at the smaller order. Zero coefficients are skipped.
    pub fn shuffle(&self, other: &Self) -> Result<Self> {
        let shape = self.common_shape(other)?;
        let order = shape.order();
        let width = shape.width();
        let a = nonzero_by_level(self, order);
        let b = nonzero_by_level(other, order);
        let mut out = Self::zeros(shape);
        for p in 0..=order {
            if a[p].is_empty() {
                continue;
            }
            for q in 0..=order - p {
                if b[q].is_empty() {
                    continue;
                }
                let n = p + q;
                let masks = interleavings(n, p);
                let dst = out.level_mut(n);
                for (u, cu) in &a[p] {
                    for (v, cv) in &b[q] {
                        let c = *cu * *cv;
                        for &m in &masks {
                            let (mut iu, mut iv, mut idx) = (0, 0, 0usize);
                            for j in 0..n {
                                let letter = if m >> j & 1 == 1 {
                                    iu += 1;
                                    u[iu - 1]
                                } else {
                                    iv += 1;
                                    v[iv - 1]
                                };
                                idx = idx * width + letter as usize;
                            }
                            dst[idx] += c;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Shape, Word};
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_digits(s).unwrap()
    }

    fn word_seq(shape: Shape, s: &str) -> TensorSeq {
        TensorSeq::from_word(shape, &w(s), 1.0).unwrap()
    }

    #[test]
    fn mask_counts() {
        assert_eq!(interleavings(5, 2).len(), 10);
        assert_eq!(interleavings(3, 3), vec![7]);
        assert_eq!(interleavings(4, 0), vec![0]);
    }

    #[test]
    fn small_shuffles() {
        let s = Shape::new(4, 3).unwrap();
        let r = word_seq(s, "1").shuffle(&word_seq(s, "2")).unwrap();
        let expect = word_seq(s, "12").add(&word_seq(s, "21")).unwrap();
        assert_eq!(r, expect);
        let r = word_seq(s, "12").shuffle(&word_seq(s, "3")).unwrap();
        let mut expect = TensorSeq::zeros(s);
        for x in ["123", "132", "312"] {
            expect.add_to(&w(x), 1.0).unwrap();
        }
        assert_eq!(r, expect);
        let e = TensorSeq::unit(s);
        assert_eq!(word_seq(s, "12").shuffle(&e).unwrap(), word_seq(s, "12"));
    }

    #[test]
    fn repeated_letters_accumulate() {
        let s = Shape::new(2, 2).unwrap();
        let r = word_seq(s, "1").shuffle(&word_seq(s, "1")).unwrap();
        assert_eq!(r.get(&w("11")), 2.0);
    }
}
