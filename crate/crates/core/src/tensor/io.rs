use super::{Scalar, Shape, TensorSeq, Word};
use crate::error::{Error, Result};
use std::io::{Read, Write};

/// Writes `word,value` rows for every coefficient, nonzero or not, in index order.
pub fn write_coeff_csv<S: Scalar, W: Write>(t: &TensorSeq<S>, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["word", "value"])?;
    let shape = t.shape();
    for (i, c) in t.coeffs().iter().enumerate() {
        wtr.write_record([shape.word(i).to_string(), c.format()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a coefficient CSV into the given shape; words absent from the file are zero.
pub fn read_coeff_csv<S: Scalar, R: Read>(shape: Shape, input: R) -> Result<TensorSeq<S>> {
    let rows = read_rows::<S, R>(input)?;
    let mut t = TensorSeq::zeros(shape);
    for (w, v) in rows {
        t.add_to(&w, v)?;
    }
    Ok(t)
}

/// Raw `(word, value)` rows of a coefficient CSV.
pub fn read_rows<S: Scalar, R: Read>(input: R) -> Result<Vec<(Word, S)>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "word" || &headers[1] != "value" {
        return Err(Error::Parse(format!("expected header word,value, found {headers:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let w: Word = rec[0].parse()?;
        let v = S::parse(&rec[1]).ok_or_else(|| Error::Parse(format!("value \"{}\"", &rec[1])))?;
        rows.push((w, v));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn round_trip_is_bitwise() {
        let s = Shape::new(3, 3).unwrap();
        let coeffs: Vec<f64> = (0..s.len()).map(|i| ((i as f64) * 0.7).sin() / 3.0).collect();
        let t = TensorSeq::from_coeffs(s, coeffs).unwrap();
        let mut buf = Vec::new();
        write_coeff_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("word,value\ne,"));
        let back: TensorSeq = read_coeff_csv(s, buf.as_slice()).unwrap();
        for (a, b) in t.coeffs().iter().zip(back.coeffs()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn complex_rows() {
        let s = Shape::new(2, 2).unwrap();
        let csv = "word,value\ne,1.5\n1-1,0.5-2j\n";
        let t: TensorSeq<Complex64> = read_coeff_csv(s, csv.as_bytes()).unwrap();
        assert_eq!(t.get(&Word::new(&[1, 1])), Complex64::new(0.5, -2.0));
        assert!(read_coeff_csv::<f64, _>(s, "w,v\n".as_bytes()).is_err());
    }
}
