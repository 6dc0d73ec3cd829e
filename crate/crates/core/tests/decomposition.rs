mod common;

use chromalg::genset::{decompose_basis, evaluate_cached, multi_edge_coefficient, Decomposer};
use chromalg::ncpartition::enumerate_basis;
use chromalg::rewrite::{contract, normalize};
use chromalg::{AlgebraElement, Endpoint, ProductCache, RationalFunction};
use common::*;

#[test]
fn round_trip_through_order_four() {
    let cache = ProductCache::new();
    let mut dec = Decomposer::new();
    let mut count = 0;
    for n in 1..=4 {
        for p in enumerate_basis(n).unwrap() {
            let expr = dec.decompose_basis(&p).unwrap();
            assert!(expr.has_integer_polynomial_coeffs(), "{p:?}: {expr}");
            assert_eq!(evaluate_cached(&expr, &cache).unwrap(), AlgebraElement::basis(p.clone()), "{p:?}");
            count += 1;
        }
    }
    assert_eq!(count, 1 + 3 + 15 + 91);
}

#[test]
fn agrees_with_span_oracle() {
    for n in 1..=3 {
        let basis: Vec<Blocks> = enumerate_basis(n).unwrap().into_iter().map(|p| p.blocks().to_vec()).collect();
        let mut naive = NaiveAlgebra::new(n, 77);
        let oracle = SpanOracle::build(n, &basis, &mut naive);
        assert_eq!(oracle.rank(), basis.len(), "generators do not span order {n}");
        assert!(oracle.max_word_len <= 2 * n);
        for p in enumerate_basis(n).unwrap() {
            let target = AlgebraElement::basis(p.clone());
            let comb = oracle.solve(&lib_to_elem(&target)).expect("in span");
            assert_eq!(naive_eval_words(n, &comb, &mut naive), target);
            let ours = decompose_basis(&p).unwrap();
            let ours_as_words = ours
                .terms()
                .iter()
                .map(|(w, c)| (w.iter().map(|s| (s.i(), s.j())).collect::<Word>(), c.clone()))
                .collect();
            assert_eq!(naive_eval_words(n, &ours_as_words, &mut naive), target, "{p:?}");
        }
    }
}

#[test]
fn multi_edge_law() {
    let qm1 = RationalFunction::q_minus_one();
    let mut prev = normalize(&multi_edge_gadget(0)).unwrap();
    assert_eq!(prev, AlgebraElement::identity(2));
    for k in 1..=6 {
        let g = multi_edge_gadget(k);
        let f = normalize(&g).unwrap();
        // G/e keeps the other k - 1 edges as loops on the merged vertex.
        let contracted = normalize(&contract(&g, (Endpoint::Inner(0), Endpoint::Inner(1))).unwrap()).unwrap();
        let one_vertex = AlgebraElement::basis(chromalg::Partition::full(2));
        assert_eq!(contracted, one_vertex.scale(&qm1.pow(k as u32 - 1)));
        assert_eq!(f, contracted.sub(&prev).unwrap(), "k = {k}");

        let full = chromalg::Partition::full(2);
        let id = chromalg::Partition::identity(2);
        assert_eq!(f.coeff(&full), multi_edge_coefficient(k));
        let sign = if k % 2 == 0 { 1 } else { -1 };
        assert_eq!(f.coeff(&id), RationalFunction::from_int(sign));
        prev = f;
    }
}
