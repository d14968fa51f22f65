use std::sync::OnceLock;

use h4_core::invariants::{invariantize, jacobian, wpt_substitution, FlagVector, TauMap, WptParams};
use h4_core::pipeline::{spot_point, Pipeline};
use h4_core::spectral::flag_basis;
use h4_core::{Context, Error, ExactScalar, Monomial, Polynomial};
use proptest::prelude::*;

fn pipeline() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(|| Pipeline::embedded().unwrap())
}

fn tau() -> &'static TauMap {
    &pipeline().tau().unwrap().map
}

fn t(s: &str) -> Polynomial {
    Polynomial::parse(s, Context::Invariant).unwrap()
}

fn small_scalar() -> impl Strategy<Value = ExactScalar> {
    (-6i64..7, -3i64..4, 1i64..4).prop_map(|(a, b, d)| {
        &ExactScalar::from_ratio(a, d) + &(&ExactScalar::sqrt5() * &ExactScalar::from_ratio(b, d))
    })
}

/// τ-polynomials in τ₁, τ₂ of x-degree at most 16.
fn small_tau_poly() -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec(small_scalar(), 4).prop_map(|c| {
        ["1", "tau1^3", "tau1*tau2", "tau2"]
            .iter()
            .zip(&c)
            .fold(Polynomial::zero(Context::Invariant), |acc, (m, k)| acc + t(m).scale(k))
    })
}

#[test]
fn gradients_along_roots_vanish_on_mirrors() {
    let g = pipeline().group().unwrap();
    for (a, ta) in tau().tau.iter().enumerate() {
        for alpha in g.roots.roots.iter().step_by(if a == 3 { 6 } else { 1 }) {
            let c = alpha.coeffs();
            let dir = (0..4).fold(Polynomial::zero(Context::Cartesian), |acc, i| acc + ta.derivative(i).scale(&c[i]));
            let (_, rem) = dir.div_rem_linear(c).unwrap();
            assert!(rem.is_zero(), "tau{} along {alpha}", a + 1);
        }
    }
}

#[test]
fn odd_input_is_rejected() {
    let x1 = Polynomial::parse("x1", Context::Cartesian).unwrap();
    assert!(matches!(invariantize(&x1, tau()), Err(Error::NotInvariant(_))));
    let x1sq = Polynomial::parse("x1^2", Context::Cartesian).unwrap();
    assert!(matches!(invariantize(&x1sq, tau()), Err(Error::NotInvariant(_))));
}

#[test]
fn quadratic_orbit_sum_is_tau1() {
    let r2 = Polynomial::parse("x1^2 + x2^2 + x3^2 + x4^2", Context::Cartesian).unwrap();
    let q = invariantize(&r2, tau()).unwrap();
    assert_eq!(q.terms().len(), 1);
    assert_eq!(q.leading_term().unwrap().0, Monomial::var(0));
}

#[test]
fn jacobian_is_alternating() {
    let j = jacobian(tau());
    assert_eq!(j.coord_degree(), Some(60));
    let x0: [ExactScalar; 4] = std::array::from_fn(|i| spot_point()[i].clone());
    let at = j.evaluate(&x0).unwrap();
    assert!(!at.is_zero());
    for s in pipeline().group().unwrap().roots.simple_reflections() {
        assert_eq!(j.evaluate(&s.apply(&x0)).unwrap(), -at.clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn invariantize_roundtrips_and_multiplies(p in small_tau_poly(), q in small_tau_poly()) {
        let (px, qx) = (tau().compose(&p).unwrap(), tau().compose(&q).unwrap());
        prop_assert_eq!(invariantize(&px, tau()).unwrap(), p.clone());
        let pq = invariantize(&(&px * &qx), tau()).unwrap();
        prop_assert_eq!(pq, &p * &q);
    }

    #[test]
    fn wpt_preserves_the_minimal_flag(
        a in small_scalar(),
        b in proptest::collection::vec(small_scalar(), 6),
        c in proptest::collection::vec(small_scalar(), 13),
        d in proptest::collection::vec(small_scalar(), 26),
        n in 0u32..13,
    ) {
        let params = WptParams {
            a,
            b: b.try_into().unwrap(),
            c: c.try_into().unwrap(),
            d: d.try_into().unwrap(),
        };
        let flag = FlagVector::MINIMAL;
        for m in &flag_basis(flag.clone(), n).monomials {
            let p = Polynomial::monomial(Context::Invariant, *m, ExactScalar::one());
            let image = wpt_substitution(&p, &params).unwrap();
            prop_assert!(flag.degree_of(&image) <= n);
        }
    }
}
