use std::sync::OnceLock;

use h4_core::invariants::{FlagVector, H4_DEGREES};
use h4_core::model::Jet;
use h4_core::operator::DiffOperator;
use h4_core::pipeline::{operator_spot_identity, tau_jets, Pipeline};
use h4_core::poly::{NU, OMEGA};
use h4_core::spectral::{check_eigen, epsilon_of, flag_basis, laguerre_family, matrix_on_basis};
use h4_core::{Context, ExactScalar, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pipeline() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(|| Pipeline::embedded().unwrap())
}

fn h() -> &'static DiffOperator {
    pipeline().hamiltonian().unwrap()
}

fn f() -> &'static DiffOperator {
    &pipeline().integral().unwrap().operator
}

fn t(s: &str) -> Polynomial {
    Polynomial::parse(s, Context::Invariant).unwrap()
}

/// x₁..x₄, ν, ω with every root form nonzero at x.
fn random_point(rng: &mut ChaCha8Rng) -> Vec<ExactScalar> {
    let roots = &pipeline().group().unwrap().roots.roots;
    loop {
        let p: Vec<ExactScalar> = (0..6).map(|_| ExactScalar::from_ratio(rng.gen_range(-20..=20), rng.gen_range(1..=9))).collect();
        let x: [ExactScalar; 4] = std::array::from_fn(|i| p[i].clone());
        if roots.iter().all(|a| !a.dot(&x).is_zero()) {
            return p;
        }
    }
}

#[test]
fn constants_are_annihilated() {
    let one = Polynomial::one(Context::Invariant);
    assert!(h().apply(&one).unwrap().is_zero());
    assert!(f().apply(&one).unwrap().is_zero());
    assert!(h().free_term().is_zero() && f().free_term().is_zero());
}

#[test]
fn action_on_tau2() {
    assert_eq!(h().apply(&t("tau2")).unwrap(), t("12*(1 + 10*nu)*tau1^5 - 24*omega*tau2"));
    assert_eq!(f().apply(&t("tau2")).unwrap(), t("-6*(1 + 10*nu)*tau1^6 + 12*(7 + 60*nu)*tau2"));
}

#[test]
fn integral_ignores_tau1() {
    for i in 0..4 {
        assert!(f().second(0, i).is_zero());
    }
    assert!(f().first(0).is_zero());
    assert!(f().terms().all(|(_, c)| c.degree_in(OMEGA) == 0));
}

/// Each coefficient can only raise the weighted degree by what its
/// derivative removes.
fn respects_flag(op: &DiffOperator, v: &FlagVector) -> bool {
    op.terms().all(|(m, c)| {
        let removed: u32 = (0..4).map(|i| v.0[i] * m[i] as u32).sum();
        v.degree_of(c) <= removed
    })
}

#[test]
fn weighted_degree_bookkeeping() {
    assert!(respects_flag(h(), &FlagVector::MINIMAL));
    assert!(respects_flag(h(), &FlagVector::SECOND));
    assert!(respects_flag(f(), &FlagVector::SECOND));
    assert!(!respects_flag(f(), &FlagVector::MINIMAL));
}

#[test]
fn spot_identity_for_both_operators() {
    let p = pipeline();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let point = random_point(&mut rng);
    let jets = tau_jets(&p.tau().unwrap().map, &point).unwrap();
    assert!(operator_spot_identity(h(), p.gauge_hamiltonian().unwrap(), &jets, &point).unwrap());
    assert!(operator_spot_identity(f(), &p.gauge_integral().unwrap().0, &jets, &point).unwrap());
    // a wrong coefficient is caught
    let bent = h().try_add(&DiffOperator::partial(Context::Invariant, 2)).unwrap();
    assert!(!operator_spot_identity(&bent, p.gauge_hamiltonian().unwrap(), &jets, &point).unwrap());
}

#[test]
fn integral_matches_cartesian_form_at_random_points() {
    let p = pipeline();
    let cart = &p.gauge_integral().unwrap().0;
    let basis = flag_basis(FlagVector::SECOND, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let point = random_point(&mut rng);
        let params = [point[4].clone(), point[5].clone()];
        let jets = tau_jets(&p.tau().unwrap().map, &point).unwrap();
        let at: Vec<ExactScalar> = jets.iter().map(|j| j.value.clone()).chain(params.iter().cloned()).collect();
        for m in &basis.monomials {
            let q = Polynomial::monomial(Context::Invariant, *m, ExactScalar::one());
            let lhs = f().apply(&q).unwrap().evaluate(&at).unwrap();
            let rhs = cart.apply_at(&point, &Jet::compose(&q, &jets, &params).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "{q} at {point:?}");
        }
    }
}

#[test]
fn laguerre_functions_are_killed_by_the_integral() {
    for n in [1, 7] {
        let (l, eps) = laguerre_family(n).unwrap();
        assert!(f().apply(&l).unwrap().is_zero());
        assert!(check_eigen(h(), &l, &eps.scale(&ExactScalar::from_int(-2))).unwrap().is_ok());
    }
}

#[test]
fn free_case_keeps_the_oscillator_spectrum() {
    // ν = 1 makes g = 0
    let h1 = h().specialize(NU, &ExactScalar::one());
    let m = matrix_on_basis(&h1, &flag_basis(FlagVector::MINIMAL, 10)).unwrap();
    assert!(m.is_upper_triangular());
    // ε of the diagonal entry at τ^k is ω times the x-degree of τ^k
    let basis = flag_basis(FlagVector::MINIMAL, 10);
    for (m, d) in basis.monomials.iter().zip(m.diagonal()) {
        let xdeg: u32 = (0..4).map(|i| H4_DEGREES[i] * m.exponent(i)).sum();
        assert_eq!(epsilon_of(&d), t(&format!("{xdeg}*omega")));
    }
    let commutator = h1.commutator(&f().specialize(NU, &ExactScalar::one())).unwrap();
    assert!(commutator.is_zero());
}
