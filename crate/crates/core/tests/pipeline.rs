mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::Signed;
use tightsurg::contact::{
    enumerate_stabilization_choices, fillability_verdict, n_alpha_diagram, tightness_verdict,
    translate_contact_surgery, Fillability, Tightness,
};
use tightsurg::floer::{backward_induction, lspace_propagate, surgery_corner, SlopeKnowledge};
use tightsurg::kirby::{intersection_matrix, plumbing_presentation, Definiteness};
use tightsurg::lattice::{
    contains_sublattice, donaldson_certificate, embed_bound, embed_in_diagonal, lambda_gram, search_diagonal,
};
use tightsurg::{GramLattice, KnotInfo, LegendrianKnot, Rational};

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

/// Every stabilization choice of a translated surgery presents the smooth
/// surgery: the (+-1) presentation has the same H1 as `tb + r` surgery on the
/// knot.
#[test]
fn translations_are_homologically_sound() {
    let knots = [KnotInfo::unknot(), KnotInfo::torus(3, 2).unwrap(), KnotInfo::torus(5, 2).unwrap()];
    for knot in &knots {
        let leg = LegendrianKnot::max_tb(knot);
        for r in ["-3", "-5/2", "-1/3", "1", "1/2", "2", "7/3", "5"] {
            let r = q(r);
            let t = translate_contact_surgery(&leg, &r, None).unwrap();
            let smooth = &r + &Rational::from_int(knot.max_tb);
            let expected = if smooth.is_zero() { None } else { Some(smooth.numer().abs()) };
            let choices = t.negative.as_ref().map(|n| enumerate_stabilization_choices(&n.expansion).unwrap());
            let choices = choices.unwrap_or_else(|| vec![vec![]]);
            assert_eq!(BigInt::from(choices.len()), t.choices());
            for c in choices {
                let p = t.presentation(&c).unwrap();
                assert_eq!(p.diagram().h1().order(), expected, "{} r = {r} choice {c:?}", knot.id);
            }
        }
    }
}

#[test]
fn verdicts_follow_the_slope_regions() {
    let t = KnotInfo::torus(3, 2).unwrap();
    assert_eq!(tightness_verdict(&t, &q("2")).unwrap().verdict, Tightness::TightNonzeroInvariant);
    assert_eq!(tightness_verdict(&t, &q("1")).unwrap().verdict, Tightness::Excluded);
    assert_eq!(fillability_verdict(1, &q("3")).unwrap().verdict, Fillability::NoFillable);
    assert_eq!(fillability_verdict(1, &q("4")).unwrap().verdict, Fillability::SteinFillable);
    assert_eq!(fillability_verdict(1, &q("1/2")).unwrap().verdict, Fillability::SteinFillable);
}

#[test]
fn n_alpha_orders_match_formula() {
    for alpha in 1..=50u64 {
        for i in [0, alpha - 1] {
            let h = n_alpha_diagram(alpha, i).unwrap().h1();
            assert_eq!(h.invariant_factors, vec![BigInt::from(2 * alpha + 3)]);
        }
    }
}

#[test]
fn plumbing_determinant_and_definiteness_boundary() {
    for n in 1..=3i64 {
        for r in reduced_slopes(-2, 4 * n, 4) {
            if r >= Rational::from_int(4 * n) {
                continue;
            }
            let p = plumbing_presentation(n as u64, &r).unwrap();
            assert_eq!(p.determinant.abs(), r.numer().abs(), "n = {n}, r = {r}");
            let definite = p.definiteness == Definiteness::PositiveDefinite;
            // observed boundary: positive definite exactly for r > 0
            assert_eq!(definite, r > Rational::from_int(0), "n = {n}, r = {r}");
            if r.is_zero() {
                assert_eq!(p.definiteness, Definiteness::Degenerate);
            }
            assert_eq!(intersection_matrix(&p.tree).determinant().unwrap(), p.determinant);
        }
    }
}

#[test]
fn lambda_lattices_embed_in_reversed_plumbings() {
    for n in 1..=3u64 {
        let lo = 2 * n as i64 - 1;
        for r in reduced_slopes(lo, 4 * n as i64, 3).into_iter().filter(|r| *r < Rational::from_int(4 * n as i64)) {
            let p = plumbing_presentation(n, &r).unwrap();
            let a1 = p.a1().try_into().unwrap();
            let lam = lambda_gram(a1, n).unwrap();
            let target = GramLattice::of_plumbing(&p.tree).unwrap().negated();
            let w = contains_sublattice(&target, &lam).unwrap();
            assert!(w.is_some_and(|w| w.verify(target.gram(), lam.gram())), "n = {n}, r = {r}");
        }
    }
}

#[test]
fn lambda_never_embeds_diagonally() {
    for a1 in 2..=4u64 {
        for n in 1..=3u64 {
            let l = lambda_gram(a1, n).unwrap();
            for m in 1..=embed_bound(&l).unwrap() as usize {
                assert!(embed_in_diagonal(&l, m).unwrap().is_none(), "Lambda({a1},{n}) in D_{m}");
            }
        }
    }
}

#[test]
fn diagonal_search_is_deterministic() {
    let l = lambda_gram(3, 2).unwrap();
    let a = search_diagonal(&l, 14).unwrap();
    let b = search_diagonal(&l, 14).unwrap();
    assert_eq!(a, b);
}

#[test]
fn certificates_across_the_interval() {
    for (n, r) in [(1, "1"), (1, "2"), (1, "3"), (1, "7/2"), (1, "11/3"), (2, "3"), (2, "5"), (2, "15/2"), (3, "5"), (3, "23/2")] {
        let c = donaldson_certificate(n, &q(r)).unwrap_or_else(|e| panic!("n = {n}, r = {r}: {e}"));
        c.verify().unwrap();
        let json = serde_json::to_value(&c).unwrap();
        for part in ["lspace", "plumbing", "sublattice", "diagonal"] {
            assert!(json.get(part).is_some(), "{part} missing");
        }
    }
}

#[test]
fn lspace_ledger_soundness() {
    for n in 1..=5u64 {
        let knot = KnotInfo::torus(2 * n + 1, 2).unwrap();
        let ledger = backward_induction(&knot, 4 * n + 1, 2 * n - 1).unwrap();
        assert_eq!(ledger.dim(&surgery_corner(2 * n as i64 - 1)), Some(2 * n - 1));
        assert!(backward_induction(&knot, 4 * n + 1, 2 * n - 2).is_err() || n == 1);
    }
}

#[test]
fn lspace_completeness_for_trefoil() {
    let kb = SlopeKnowledge::from_knot(&KnotInfo::torus(3, 2).unwrap());
    for r in reduced_slopes(0, 10, 10) {
        let chain = lspace_propagate(&kb, &r).unwrap();
        assert_eq!(chain.is_some(), r >= Rational::from_int(1), "{r}");
        if let Some(c) = chain {
            c.verify(&kb).unwrap();
        }
    }
}
