use flagforms_core::charpoly::{schur_decompose, ChernPoly, SchurVector};
use flagforms_core::combinat::{DimensionSequence, Partition};
use flagforms_core::formlab::ExtForm;
use flagforms_core::gysin::pushforward_dp;
use flagforms_core::rootcalc::{expand_expression, universal_total_chern, BundleSymbol, ChernExpr, RootPoly, UniversalBundleSpec};
use flagforms_core::{BigRational, Complex64};
use proptest::prelude::*;

fn cx() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Complex64::new(a, b))
}

/// Random form on 4 generators with a handful of terms.
fn form() -> impl Strategy<Value = ExtForm> {
    prop::collection::vec((0u32..16, 0u32..16, cx()), 0..5).prop_map(|terms| {
        terms.into_iter().fold(ExtForm::zero(4), |acc, (s, t, c)| {
            let idx = |m: u32| (0..4).filter(|i| m & (1 << i) != 0).collect::<Vec<usize>>();
            acc.add(&ExtForm::term(4, &idx(s), &idx(t), c))
        })
    })
}

fn rho() -> impl Strategy<Value = DimensionSequence> {
    (1usize..=4).prop_flat_map(|r| {
        let all = DimensionSequence::all_for_rank(r);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

/// A sequence with at least two steps and indices ell < l < lp.
fn triple() -> impl Strategy<Value = (DimensionSequence, usize, usize, usize)> {
    rho().prop_filter("two steps", |r| r.steps() >= 2).prop_flat_map(|rho| {
        let m = rho.steps();
        (Just(rho), 0..m - 1).prop_flat_map(move |(rho, ell)| {
            (Just(rho), Just(ell), ell + 1..m).prop_flat_map(move |(rho, ell, l)| (Just(rho), Just(ell), Just(l), l + 1..=m))
        })
    })
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn chern_poly(r: usize) -> impl Strategy<Value = ChernPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, r), -4i64..5), 0..5)
        .prop_map(move |t| ChernPoly::from_terms(r, t.into_iter().map(|(e, c)| (e, rat(c)))))
}

proptest! {
    #[test]
    fn wedge_is_associative(a in form(), b in form(), c in form()) {
        let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(l.sub(&r).max_abs() < 1e-9);
    }

    #[test]
    fn one_forms_anticommute(i in 0usize..4, j in 0usize..4, bar in any::<bool>()) {
        let a = ExtForm::dz(4, i);
        let b = if bar { ExtForm::dzbar(4, j) } else { ExtForm::dz(4, j) };
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert_eq!(ab.add(&ba), ExtForm::zero(4));
        if !bar && i == j {
            prop_assert!(ab.is_zero());
        }
    }

    #[test]
    fn conjugation_is_an_involution(a in form()) {
        prop_assert!(a.conj().conj().sub(&a).max_abs() < 1e-15);
    }

    #[test]
    fn segre_round_trip(p in (1usize..=4).prop_flat_map(chern_poly)) {
        prop_assert_eq!(p.to_segre().to_chern(p.rank()), p);
    }

    #[test]
    fn schur_coordinates_round_trip(r in 1usize..=4, k in 0usize..=5, coeffs in prop::collection::vec(-5i64..6, 30)) {
        let parts = Partition::all_with_max_part(k, r);
        let coords: Vec<(Partition, BigRational)> =
            parts.iter().zip(&coeffs).map(|(p, &c)| (p.clone(), rat(c))).collect();
        let v = SchurVector::from_coords(k, r, &coords).unwrap();
        let back = schur_decompose(&v.reconstruct(), k).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn whitney_on_nested_triples((rho, ell, l, lp) in triple()) {
        let sp = |x, y| UniversalBundleSpec::new(rho.clone(), x, y).unwrap();
        let lhs = universal_total_chern(&sp(ell, l)).mul(&universal_total_chern(&sp(l, lp)));
        prop_assert_eq!(lhs, universal_total_chern(&sp(ell, lp)));
    }

    #[test]
    fn expansion_is_a_ring_map(rho in rho(), j in 1usize..3, k in 1usize..3, p in 1u32..3) {
        let r = rho.rank();
        prop_assume!(j <= r && k <= r);
        let x = ChernExpr::chern(j, BundleSymbol::E);
        let y = ChernExpr::chern(k, BundleSymbol::Sub(rho.steps())).pow(p);
        let ex = expand_expression(&x, &rho).unwrap();
        let ey = expand_expression(&y, &rho).unwrap();
        prop_assert_eq!(expand_expression(&x.clone().add(y.clone()), &rho).unwrap(), ex.add(&ey));
        let prod = expand_expression(&x.mul(y), &rho).unwrap();
        prop_assert_eq!(&prod, &ex.mul(&ey));
        prop_assert!(prod.is_block_symmetric(&rho));
    }

    #[test]
    fn pushforward_is_linear(rho in rho(), e1 in prop::collection::vec(0u32..4, 4), e2 in prop::collection::vec(0u32..4, 4), a in -3i64..4, b in -3i64..4) {
        let r = rho.rank();
        let f = RootPoly::monomial(&e1[..r]);
        let g = RootPoly::monomial(&e2[..r]);
        let lhs = pushforward_dp(&f.scale(&rat(a)).add(&g.scale(&rat(b))), &rho);
        let rhs = pushforward_dp(&f, &rho).scale(&rat(a)).add(&pushforward_dp(&g, &rho).scale(&rat(b)));
        prop_assert_eq!(lhs, rhs);
    }
}
