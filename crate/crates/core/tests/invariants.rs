use efmsig::efm::{signature_of_path, EfmStream, Origin, PiecewisePath};
use efmsig::exp_poly::ExpPoly;
use efmsig::{Rates, Shape, TensorSeq, Word};
use proptest::prelude::*;

fn shape_strategy(max_width: usize, max_order: usize) -> impl Strategy<Value = Shape> {
    (1..=max_width, 1..=max_order).prop_map(|(w, n)| Shape::new(w, n).unwrap())
}

fn seq_in(shape: Shape) -> impl Strategy<Value = TensorSeq> {
    prop::collection::vec(-2.0f64..2.0, shape.len()).prop_map(move |c| TensorSeq::from_coeffs(shape, c).unwrap())
}

fn seq_pair(max_width: usize, max_order: usize) -> impl Strategy<Value = (TensorSeq, TensorSeq)> {
    shape_strategy(max_width, max_order).prop_flat_map(|s| (seq_in(s), seq_in(s)))
}

fn rates_for(width: usize) -> impl Strategy<Value = Rates> {
    prop::collection::vec(0.2f64..3.0, width).prop_map(|l| Rates::new(l).unwrap())
}

fn path_strategy(dim: usize, aug: bool) -> impl Strategy<Value = PiecewisePath> {
    prop::collection::vec((0.05f64..1.0, prop::collection::vec(-1.0f64..1.0, dim)), 2..8).prop_map(move |segs| {
        let mut times = vec![0.0];
        let mut values = vec![vec![0.0; dim]];
        for (dt, dx) in segs {
            times.push(times.last().unwrap() + dt);
            let prev = values.last().unwrap().clone();
            values.push(prev.iter().zip(&dx).map(|(a, b)| a + b).collect());
        }
        PiecewisePath::new(times, values, aug).unwrap()
    })
}

fn path_and_rates() -> impl Strategy<Value = (PiecewisePath, Rates, usize)> {
    (1usize..=3, any::<bool>(), 2usize..=4).prop_flat_map(|(d, aug, n)| {
        let width = d + aug as usize;
        (path_strategy(d, aug), rates_for(width), Just(n))
    })
}

/// Breakpoints on the 1/64 grid, so shifting by a multiple of 1/8 keeps every duration exact.
fn dyadic_path_and_rates() -> impl Strategy<Value = (PiecewisePath, Rates, usize)> {
    (1usize..=3, any::<bool>(), 2usize..=4).prop_flat_map(|(d, aug, n)| {
        let width = d + aug as usize;
        let path = prop::collection::vec((1u32..64, prop::collection::vec(-1.0f64..1.0, d)), 2..8).prop_map(move |segs| {
            let mut times = vec![0.0];
            let mut values = vec![vec![0.0; d]];
            for (k, dx) in segs {
                times.push(times.last().unwrap() + k as f64 / 64.0);
                let prev = values.last().unwrap().clone();
                values.push(prev.iter().zip(&dx).map(|(a, b)| a + b).collect());
            }
            PiecewisePath::new(times, values, aug).unwrap()
        });
        (path, rates_for(width), Just(n))
    })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shuffle_commutes((a, b) in seq_pair(4, 5)) {
        prop_assert!(a.shuffle(&b).unwrap().max_abs_diff(&b.shuffle(&a).unwrap()) <= 1e-12);
    }

    #[test]
    fn shuffle_of_disjoint_words_counts_interleavings(p in 0usize..4, q in 0usize..4) {
        let shape = Shape::new(2, p + q).unwrap();
        let u = TensorSeq::from_word(shape, &Word::new(&vec![0; p]), 1.0).unwrap();
        let w = TensorSeq::from_word(shape, &Word::new(&vec![1; q]), 1.0).unwrap();
        let s = u.shuffle(&w).unwrap();
        let terms: Vec<_> = s.terms().collect();
        prop_assert_eq!(terms.len(), binomial(p + q, p));
        prop_assert!(terms.iter().all(|(_, c)| *c == 1.0));
    }

    #[test]
    fn tensor_matches_brute_force((a, b) in seq_pair(3, 3)) {
        let shape = a.shape();
        let mut want = TensorSeq::zeros(shape);
        for (u, x) in a.terms() {
            for (w, y) in b.terms() {
                if u.len() + w.len() <= shape.order() {
                    want.add_to(&u.concat(&w), x * y).unwrap();
                }
            }
        }
        prop_assert!(a.tensor(&b).unwrap().max_abs_diff(&want) <= 1e-12);
    }

    #[test]
    fn projection_undoes_letter_append((a, _) in seq_pair(3, 4), i in 0u8..3) {
        let shape = a.shape();
        let i = i % shape.width() as u8;
        // drop the top level so appending a letter stays within the truncation
        let low = a.with_order(shape.order() - 1).unwrap().with_order(shape.order()).unwrap();
        let appended = low.tensor(&TensorSeq::letter(shape, i).unwrap()).unwrap();
        prop_assert_eq!(appended.project(&Word::letter(i)), low);
    }

    #[test]
    fn dilation_is_a_semigroup_and_commutes_with_shuffle(
        (a, b) in seq_pair(3, 4), h in 0.0f64..2.0, k in 0.0f64..2.0, seed in prop::collection::vec(0.2f64..3.0, 3)
    ) {
        let r = Rates::new(seed[..a.width()].to_vec()).unwrap();
        let hk = r.apply_d(h, &r.apply_d(k, &a).unwrap()).unwrap();
        prop_assert!(hk.max_abs_diff(&r.apply_d(h + k, &a).unwrap()) <= 1e-12);
        let lhs = r.apply_d(h, &a.shuffle(&b).unwrap()).unwrap();
        let rhs = r.apply_d(h, &a).unwrap().shuffle(&r.apply_d(h, &b).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11 * lhs.max_abs().max(1.0));
        // Λ C_h + D_h = id
        let back = r.apply_lambda(&r.apply_c(h, &a).unwrap()).unwrap().add(&r.apply_d(h, &a).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&a) <= 1e-12);
    }

    #[test]
    fn dilation_contracts((a, _) in seq_pair(3, 4), h in 0.0f64..3.0, seed in prop::collection::vec(0.2f64..3.0, 3)) {
        let r = Rates::new(seed[..a.width()].to_vec()).unwrap();
        let mut a = a;
        a.set(&Word::empty(), 0.0).unwrap();
        let bound = (-h * r.min()).exp() * a.norm_l2();
        prop_assert!(r.apply_d(h, &a).unwrap().norm_l2() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn iterated_integrals_vanish_at_zero_and_match_distinct_rate_formula(mus in prop::collection::vec(0.1f64..4.0, 1..=4), t in 0.0f64..3.0) {
        // partial sums are increasing, hence distinct
        let mut rates = vec![0.0];
        for m in &mus {
            rates.push(rates.last().unwrap() + m);
        }
        let mut g = ExpPoly::constant(1.0);
        for &nu in &rates[1..] {
            g = g.step_integrate(nu);
        }
        prop_assert!(g.eval(0.0).abs() <= 1e-12);
        let terms: Vec<f64> = (0..rates.len())
            .map(|k| {
                let c: f64 = (0..rates.len()).filter(|&l| l != k).map(|l| 1.0 / (rates[l] - rates[k])).product();
                c * (-rates[k] * t).exp()
            })
            .collect();
        let formula: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum();
        prop_assert!((g.eval(t) - formula).abs() <= 1e-12 * scale);
    }

    #[test]
    fn group_like_and_chen((path, r, n) in path_and_rates(), split in 1usize..6) {
        let sig = signature_of_path(&r, &path, n, Origin::Start).unwrap().sig;
        let shape = sig.shape();
        for (u, _) in TensorSeq::unit(shape).terms().chain(shape.words().take(8).map(|w| (w, 1.0))) {
            for w in shape.words().filter(|w| w.len() + u.len() <= n).take(8) {
                let uw = TensorSeq::from_word(shape, &u, 1.0).unwrap().shuffle(&TensorSeq::from_word(shape, &w, 1.0).unwrap()).unwrap();
                prop_assert!((sig.get(&u) * sig.get(&w) - sig.bracket(&uw).unwrap()).abs() <= 1e-10);
            }
        }
        let k = 1 + split % (path.len() - 1).max(1);
        if k < path.len() - 1 {
            let u = path.times()[k];
            let left = signature_of_path(&r, &path.restrict(path.start(), u).unwrap(), n, Origin::Start).unwrap().sig;
            let right = signature_of_path(&r, &path.restrict(u, path.end()).unwrap(), n, Origin::Start).unwrap().sig;
            let chen = r.apply_d(path.end() - u, &left).unwrap().tensor(&right).unwrap();
            prop_assert!(chen.max_abs_diff(&sig) <= 1e-12);
        }
    }

    #[test]
    fn time_shift_invariance((path, r, n) in dyadic_path_and_rates(), h in 0u32..80) {
        let h = h as f64 / 8.0;
        let base = signature_of_path(&r, &path, n, Origin::Start).unwrap().sig;
        let moved = signature_of_path(&r, &path.shifted(h), n, Origin::Start).unwrap().sig;
        for (a, b) in base.coeffs().iter().zip(moved.coeffs()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn fundamental_solution((path, r, n) in path_and_rates(), start in prop::collection::vec(-1.0f64..1.0, 1..400)) {
        let shape = Shape::new(path.width(), n).unwrap();
        let mut x = TensorSeq::from_coeffs(shape, (0..shape.len()).map(|i| start[i % start.len()]).collect()).unwrap();
        let sig = signature_of_path(&r, &path, n, Origin::Start).unwrap().sig;
        let want = r.apply_d(path.end() - path.start(), &x).unwrap().tensor(&sig).unwrap();
        let mut stream = EfmStream::new(&r, shape).unwrap();
        stream.fold(&mut x, &path, 0, path.len() - 1);
        prop_assert!(x.max_abs_diff(&want) <= 1e-12 * want.max_abs().max(1.0));
    }

    #[test]
    fn ode_along_a_segment((r, x) in (1usize..=3).prop_flat_map(|w| (rates_for(w), prop::collection::vec(-1.5f64..1.5, w))), t in 0.1f64..2.0) {
        let n = 3;
        let h = 1e-5;
        let at = |s: f64| efmsig::efm::segment_signature(&r, &x, s, n).unwrap();
        let (lo, mid, hi) = (at(t - h), at(t), at(t + h));
        let table = r.table(mid.shape()).unwrap();
        for (i, w) in mid.shape().words().enumerate().skip(1) {
            let deriv = (hi.coeffs()[i] - lo.coeffs()[i]) / (2.0 * h);
            let last = *w.letters().last().unwrap();
            let parent = Word::new(&w.letters()[..w.len() - 1]);
            let rhs = -table.rates()[i] * mid.coeffs()[i] + mid.get(&parent) * x[last as usize];
            prop_assert!((deriv - rhs).abs() <= 1e-6, "word {} {} {}", w, deriv, rhs);
        }
    }
}
