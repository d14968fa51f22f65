use std::collections::HashSet;
use std::sync::OnceLock;

use h4_core::coxeter::{delta_factor_forms, delta_products, paper_weights, reflection, CoxeterGroup, LinearForm};
use h4_core::model::{CartesianOperator, ModelSpec};
use h4_core::pipeline::spot_point;
use h4_core::{Context, ExactScalar, Polynomial};
use proptest::prelude::*;

fn group() -> &'static CoxeterGroup {
    static G: OnceLock<CoxeterGroup> = OnceLock::new();
    G.get_or_init(|| CoxeterGroup::h4().unwrap())
}

fn lines() -> HashSet<[ExactScalar; 4]> {
    group().roots.roots.iter().map(LinearForm::line_key).collect()
}

#[test]
fn delta_forms_are_sixty_distinct_lines() {
    let forms = delta_factor_forms();
    assert_eq!(forms.len(), 60);
    assert_eq!(forms.iter().map(LinearForm::line_key).collect::<HashSet<_>>().len(), 60);
}

#[test]
fn orbit_lengths_divide_the_order() {
    for (w, printed) in paper_weights() {
        let n = group().orbit(&w).len();
        assert_eq!(n, printed);
        assert_eq!(14400 % n, 0);
    }
}

#[test]
fn every_reflection_is_generated() {
    assert!(group().contains_all_reflections());
}

#[test]
fn delta_product_changes_sign_under_reflections() {
    let d = delta_products();
    let x0: [ExactScalar; 4] = std::array::from_fn(|i| spot_point()[i].clone());
    let at = |x: &[ExactScalar; 4]| -> ExactScalar { d.iter().map(|p| p.evaluate(x).unwrap()).product() };
    let base = at(&x0);
    assert!(!base.is_zero());
    for alpha in &group().roots.roots {
        let image = reflection(alpha).apply(&x0);
        assert_eq!(at(&image), -base.clone(), "{alpha}");
    }
}

#[test]
fn potential_coefficients() {
    // −2H carries −2·(g/2)|α|² over (α·x)²: g/2 on the axes, 2g elsewhere
    let spec = ModelSpec::h4();
    let h = CartesianOperator::hamiltonian(&spec);
    let g = spec.coupling();
    let axes = spec.roots.iter().filter(|a| a.coeffs().iter().filter(|c| !c.is_zero()).count() == 1).count();
    assert_eq!(axes, 4);
    let mut counts = [0; 2];
    for (a, c) in spec.roots.iter().zip(&h.inverse_square) {
        if *c == -g.clone() {
            counts[0] += 1;
            assert_eq!(a.norm2(), ExactScalar::one());
        } else {
            assert_eq!(*c, g.scale(&ExactScalar::from_int(-4)), "{a}");
            counts[1] += 1;
        }
    }
    assert_eq!(counts, [4, 56]);
    let e0 = Polynomial::parse("2*omega + 60*nu*omega", Context::Cartesian).unwrap();
    assert_eq!(spec.ground_energy(), e0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elements_permute_the_root_lines(k in 0usize..14400) {
        let g = &group().elements[k];
        let lines = lines();
        for a in &group().roots.roots {
            let image = LinearForm::new(g.apply(a.coeffs()));
            prop_assert!(lines.contains(&image.line_key()));
        }
    }

    #[test]
    fn sampled_products_close(a in 0usize..14400, b in 0usize..14400) {
        let els = &group().elements;
        let p = els[a].mul(&els[b]);
        prop_assert!(p.is_orthogonal());
        prop_assert!(els.contains(&p));
    }

    #[test]
    fn canonical_text_roundtrip(k in 0usize..14400) {
        let g = &group().elements[k];
        let text = g.canonical_text();
        prop_assert_eq!(&h4_core::coxeter::GroupElement::from_canonical_text(&text).unwrap(), g);
    }
}
