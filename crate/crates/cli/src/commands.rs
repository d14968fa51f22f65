//! One function per subcommand, each producing a [`Report`].

use std::io::Write;

use h4_core::coxeter::{delta_factor_forms, paper_weights, CoxeterGroup, LinearForm, RootSystem};
use h4_core::invariants::{FlagVector, H4_DEGREES};
use h4_core::operator::DiffOperator;
use h4_core::pipeline::Pipeline;
use h4_core::poly::{NU, OMEGA};
use h4_core::reference::EigenEntry;
use h4_core::spectral::{check_eigen, degeneracy, epsilon_of, flag_basis, joint_eigenfunctions, matrix_on_basis};
use h4_core::verify::{run_all, Status, VerifyConfig};
use h4_core::{Context, ExactScalar, Polynomial};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::report::Report;
use crate::row;

type Out = Result<Report, CliError>;

fn tau(s: &str) -> Result<Polynomial, CliError> {
    Ok(Polynomial::parse(s, Context::Invariant)?)
}

/// Fixes whichever of ν, ω are numeric.
fn specialize(p: &Polynomial, cfg: &RunConfig) -> Polynomial {
    let mut q = p.clone();
    if let Some(nu) = cfg.nu.value() {
        q = q.specialize(NU, nu);
    }
    if let Some(omega) = cfg.omega.value() {
        q = q.specialize(OMEGA, omega);
    }
    q
}

pub fn group(p: &Pipeline, cfg: &RunConfig, corrupt_root: bool) -> Out {
    let owned;
    let g = if corrupt_root {
        let mut forms = delta_factor_forms();
        let c = &forms[7].0;
        forms[7] = LinearForm::new([&c[0] + &ExactScalar::one(), c[1].clone(), c[2].clone(), c[3].clone()]);
        owned = CoxeterGroup::from_roots(RootSystem::from_forms(forms)?)?;
        &owned
    } else {
        p.group()?
    };
    let orbits: Vec<usize> = paper_weights().iter().map(|(w, _)| g.orbit(w).len()).collect();
    let expected = &p.reference().group;
    let mut r = Report::new("group", cfg);
    r.push(row! { "order" => g.order(), "orbits" => orbits });
    r.matched = g.order() == expected.order && orbits == expected.orbit_lengths;
    Ok(r)
}

pub fn tau_report(p: &Pipeline, cfg: &RunConfig) -> Out {
    let printed = p.tau_printed()?;
    let simple = p.group()?.roots.simple_reflections();
    let invariant = |t: &Polynomial| -> Result<bool, CliError> {
        for s in &simple {
            if s.compose(t)? != *t {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut r = Report::new("tau", cfg);
    for (a, t) in printed.tau.iter().enumerate() {
        let ok = invariant(t)?;
        let degree = t.coord_degree().unwrap_or(0);
        r.matched &= ok && degree == H4_DEGREES[a];
        r.push(row! { "tau" => format!("tau{}", a + 1), "source" => "printed", "degree" => degree, "terms" => t.len(), "invariant" => ok });
    }
    let fixed = &p.tau()?.relabel;
    r.push(row! {
        "tau" => "tau4",
        "source" => "relabelled",
        "degree" => fixed.tau4.coord_degree().unwrap_or(0),
        "terms" => fixed.tau4.len(),
        "invariant" => invariant(&fixed.tau4)?,
        "moved" => fixed.moved,
        "factor" => fixed.factor.to_string(),
    });
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DeriveKind {
    Hamiltonian,
    Integral,
    Boundary,
}

fn coefficient_rows(
    r: &mut Report,
    op: &DiffOperator,
    names: (&str, &str),
    a_ref: impl Fn(usize, usize) -> h4_core::Result<Polynomial>,
    b_ref: impl Fn(usize) -> h4_core::Result<Polynomial>,
    scale: &ExactScalar,
) -> Result<(), CliError> {
    let mut add = |name: String, derived: Polynomial, printed: Polynomial| {
        let printed = printed.scale(scale);
        let ok = derived == printed;
        r.matched &= ok;
        r.push(row! { "coefficient" => name, "derived" => derived.to_string(), "printed" => printed.to_string(), "match" => ok });
    };
    for i in 0..4 {
        for j in i..4 {
            add(format!("{}{}{}", names.0, i + 1, j + 1), op.second(i, j), a_ref(i + 1, j + 1)?);
        }
    }
    for i in 0..4 {
        add(format!("{}{}", names.1, i + 1), op.first(i), b_ref(i + 1)?);
    }
    Ok(())
}

pub fn derive(p: &Pipeline, cfg: &RunConfig, kind: DeriveKind) -> Out {
    let refd = p.reference();
    match kind {
        DeriveKind::Hamiltonian => {
            let mut r = Report::new("derive hamiltonian", cfg);
            coefficient_rows(&mut r, p.hamiltonian()?, ("A", "B"), |i, j| refd.hamiltonian_a(i, j), |i| refd.hamiltonian_b(i), &ExactScalar::one())?;
            Ok(r)
        }
        DeriveKind::Integral => {
            let f = p.integral()?;
            let mut r = Report::new("derive integral", cfg);
            let printed_g0 = refd.gamma0()?;
            let ok = f.gamma0 == printed_g0;
            r.matched &= ok;
            r.push(row! { "coefficient" => "gamma0", "derived" => f.gamma0.to_string(), "printed" => printed_g0.to_string(), "match" => ok });
            let g2 = refd.integral_g(2)?;
            let (m, c) = g2.leading_term().ok_or_else(|| CliError::Config("printed G2 is zero".into()))?;
            let scale = f.operator.first(1).coefficient(*m).checked_div(c)?;
            r.push(row! { "coefficient" => "convention scalar", "derived" => scale.to_string(), "printed" => "1", "match" => scale.is_one() });
            coefficient_rows(&mut r, &f.operator, ("F", "G"), |i, j| refd.integral_f(i, j), |i| refd.integral_g(i), &scale)?;
            Ok(r)
        }
        DeriveKind::Boundary => {
            let b = p.boundary()?;
            let printed = refd.boundary_polynomial()?;
            let mut r = Report::new("derive boundary", cfg);
            let kappa = b.surface.ratio.clone();
            r.matched = kappa.is_some();
            r.push(row! { "monomial" => "kappa", "derived" => kappa.as_ref().map(ToString::to_string).unwrap_or_else(|| "none".into()) });
            let derived = &b.surface.jacobian_squared;
            let mut monos: Vec<_> = printed.terms().iter().chain(derived.terms()).map(|(m, _)| *m).collect();
            monos.sort();
            monos.dedup();
            monos.reverse();
            for m in monos {
                let (pc, dc) = (printed.coefficient(m), derived.coefficient(m));
                let ok = kappa.as_ref().is_some_and(|k| &pc * k == dc);
                r.push(row! { "monomial" => m.display(Context::Invariant), "printed" => pc.to_string(), "derived" => dc.to_string(), "match" => ok });
            }
            Ok(r)
        }
    }
}

pub fn boundary(p: &Pipeline, cfg: &RunConfig) -> Out {
    let b = p.boundary()?;
    let mut r = Report::new("boundary", cfg);
    r.push(row! { "quantity" => "c", "value" => b.jacobian_factor.to_string() });
    r.matched = !b.jacobian_factor.is_zero();
    let Some(kappa) = &b.surface.ratio else {
        r.push(row! { "quantity" => "kappa", "value" => "none" });
        r.matched = false;
        return Ok(r);
    };
    r.push(row! { "quantity" => "kappa", "value" => kappa.to_string() });
    for (mono, printed) in &p.reference().boundary.anchors {
        let m = tau(mono)?.leading_term().map(|t| t.0).ok_or_else(|| CliError::Config(format!("bad anchor {mono}")))?;
        let derived = b.surface.jacobian_squared.coefficient(m);
        let ok = derived == kappa * &ExactScalar::from_int(*printed);
        r.matched &= ok;
        r.push(row! { "quantity" => mono, "value" => derived.to_string(), "printed" => printed, "match" => ok });
    }
    Ok(r)
}

pub fn spectrum(p: &Pipeline, cfg: &RunConfig) -> Out {
    let basis = flag_basis(FlagVector::SECOND, cfg.level);
    let m = matrix_on_basis(p.hamiltonian()?, &basis)?;
    let diag: Vec<Polynomial> = m.diagonal().iter().map(|d| specialize(&epsilon_of(d), cfg)).collect();
    let mut r = Report::new("spectrum", cfg);
    r.matched = m.is_upper_triangular();
    for level in 0..=cfg.level {
        let predicted = specialize(&tau(&format!("{}*omega", 2 * level))?, cfg);
        let multiplicity = diag.iter().filter(|d| **d == predicted).count();
        let expected = degeneracy(level);
        let ok = multiplicity == expected;
        r.matched &= ok;
        r.push(row! {
            "level" => level,
            "eigenvalue" => predicted.to_string(),
            "degeneracy" => expected,
            "multiplicity" => multiplicity,
            "match" => ok,
        });
    }
    // every diagonal value must be one of the predicted levels
    r.matched &= diag.len() == (0..=cfg.level).map(degeneracy).sum::<usize>();
    Ok(r)
}

fn printed_entry_row(p: &Pipeline, e: &EigenEntry, source: &str, joint: bool) -> Result<(serde_json::Map<String, serde_json::Value>, bool), CliError> {
    let phi = p.reference().eigenfunction(e)?;
    let lambda = tau(&e.epsilon)?.scale(&ExactScalar::from_int(-2));
    let h_ok = check_eigen(p.hamiltonian()?, &phi, &lambda)?.is_ok();
    let f_ok = if joint || e.gamma.is_some() {
        let gamma = tau(e.gamma.as_deref().unwrap_or("0"))?;
        Some(check_eigen(&p.integral()?.operator, &phi, &gamma)?.is_ok())
    } else {
        None
    };
    let ok = h_ok && f_ok.unwrap_or(true);
    let mut row = row! { "label" => e.label, "source" => source, "epsilon" => e.epsilon, "h" => h_ok };
    if let Some(f) = f_ok {
        row.insert("f".into(), f.into());
        row.insert("gamma".into(), e.gamma.clone().unwrap_or_else(|| "0".into()).into());
    }
    Ok((row, ok))
}

pub fn eigenfunctions(p: &Pipeline, cfg: &RunConfig) -> Out {
    let mut r = Report::new("eigenfunctions", cfg);
    let refd = p.reference();
    for e in refd.eigen.joint.iter().filter(|e| e.level <= cfg.level) {
        let (row, ok) = printed_entry_row(p, e, "printed", true)?;
        r.matched &= ok;
        r.push(row);
    }
    for e in refd.eigen.corrected.iter().filter(|e| e.level <= cfg.level) {
        r.push(printed_entry_row(p, e, "corrected", false)?.0);
    }
    if let Some((nu, omega)) = cfg.numeric() {
        let basis = flag_basis(FlagVector::SECOND, cfg.level);
        let hm = matrix_on_basis(p.hamiltonian()?, &basis)?;
        let fm = matrix_on_basis(&p.integral()?.operator, &basis)?;
        for v in joint_eigenfunctions(&hm, Some(&fm), &nu, &omega)? {
            r.push(row! {
                "source" => "solver",
                "epsilon" => v.value.to_string(),
                "gamma" => v.gamma.map(|g| g.to_string()).unwrap_or_default(),
                "phi" => v.phi.to_string(),
            });
        }
    }
    Ok(r)
}

pub fn verify_all(p: &Pipeline, cfg: &RunConfig) -> Out {
    let vc = VerifyConfig { nu: cfg.nu.value().cloned(), omega: cfg.omega.value().cloned() };
    let stream = cfg.format == Format::Text;
    let reports = run_all(p, &vc, |rep| {
        if stream {
            println!("{rep}");
            let _ = std::io::stdout().flush();
        }
    });
    let mut r = Report::new("verify-all", cfg);
    for rep in &reports {
        r.matched &= rep.status != Status::Fail;
        r.push(row! { "id" => rep.id, "name" => rep.name, "status" => rep.status.to_string(), "detail" => rep.detail });
    }
    Ok(r)
}
