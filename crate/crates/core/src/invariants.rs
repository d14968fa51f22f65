//! The H4 invariant ring: orbit power sums, the explicit τ coordinates,
//! re-expression of invariants in τ, the Jacobian and the boundary surface,
//! flags and the weighted projective transformation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;

use crate::coxeter::{LinearForm, Vector4};
use crate::error::{Error, Result};
use crate::modular::{self, Elem, Fp2, PowerTable, ReducedPoly};
use crate::poly::{Context, Monomial, Polynomial, COORDS, NU, OMEGA};
use crate::reference::ReferenceData;
use crate::scalar::{ExactScalar, Rational};
use crate::special::BracketForm;

/// Degrees of τ₁..τ₄ as polynomials in the squares x_k².
pub const TAU_WEIGHTS: [u32; 4] = [1, 6, 10, 15];
/// The H4 degrees, i.e. x-degrees of τ₁..τ₄.
pub const H4_DEGREES: [u32; 4] = [2, 12, 20, 30];

const POINT_SEED: u64 = 0x4834_7461_755f_7074;

/// Invariant coordinates τ₁..τ₄ as Cartesian polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct TauMap {
    pub tau: [Polynomial; 4],
}

impl TauMap {
    pub fn new(tau: [Polynomial; 4]) -> Self {
        Self { tau }
    }

    pub fn x_degrees(&self) -> [Option<u32>; 4] {
        std::array::from_fn(|a| self.tau[a].coord_degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.tau.iter().all(|t| t.homogeneous_parts().len() == 1)
    }

    /// `q(τ(x))` for a polynomial `q` in the invariant context.
    pub fn compose(&self, q: &Polynomial) -> Result<Polynomial> {
        if q.context() != Context::Invariant {
            return Err(Error::ContextMismatch("compose expects a tau polynomial".into()));
        }
        q.substitute(&self.tau)
    }
}

/// The explicit τ's from the published symmetric-function formulas.
pub fn tau_explicit(reference: &ReferenceData) -> Result<TauMap> {
    Ok(TauMap::new(reference.tau_polynomials()?))
}

/// `t_a(x) = Σ_{w ∈ orbit} (w·x)^a`, expanded multinomially.
pub fn orbit_power_sum(a: u32, orbit: &[Vector4]) -> Polynomial {
    let mut fact = vec![BigInt::from(1)];
    for k in 1..=a as usize {
        let next = &fact[k - 1] * BigInt::from(k);
        fact.push(next);
    }
    let mut acc: FxHashMap<Monomial, ExactScalar> = FxHashMap::default();
    for w in orbit {
        let pw: Vec<Vec<ExactScalar>> = w
            .iter()
            .map(|c| {
                let mut v = vec![ExactScalar::one()];
                for k in 1..=a as usize {
                    let next = &v[k - 1] * c;
                    v.push(next);
                }
                v
            })
            .collect();
        let nz: Vec<usize> = (0..COORDS).filter(|&i| !w[i].is_zero()).collect();
        for_each_composition(a, nz.len(), &mut |ks: &[u32]| {
            let mut exps = [0u32; COORDS];
            let mut coef = ExactScalar::from_bigint(fact[a as usize].clone());
            let mut denom = BigInt::from(1);
            for (slot, &i) in nz.iter().enumerate() {
                exps[i] = ks[slot];
                denom *= &fact[ks[slot] as usize];
                coef = &coef * &pw[i][ks[slot] as usize];
            }
            let coef = coef / ExactScalar::from_bigint(denom);
            *acc.entry(Monomial::from_exponents(&exps)).or_default() += &coef;
        });
    }
    Polynomial::from_terms(Context::Cartesian, acc)
}

fn for_each_composition(total: u32, parts: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(rem: u32, idx: usize, cur: &mut Vec<u32>, parts: usize, f: &mut dyn FnMut(&[u32])) {
        if idx + 1 == parts {
            cur.push(rem);
            f(cur);
            cur.pop();
            return;
        }
        for k in 0..=rem {
            cur.push(k);
            rec(rem - k, idx + 1, cur, parts, f);
            cur.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(total, 0, &mut Vec::with_capacity(parts), parts, f);
}

/// Monomials `τ^p` with `Σ p_i v_i` equal to `w`, in ascending lex order of
/// the exponent vector.
pub fn weighted_monomials(v: [u32; 4], w: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for p4 in 0..=w / v[3] {
        let r4 = w - p4 * v[3];
        for p3 in 0..=r4 / v[2] {
            let r3 = r4 - p3 * v[2];
            for p2 in 0..=r3 / v[1] {
                let r2 = r3 - p2 * v[1];
                if r2 % v[0] == 0 {
                    out.push(Monomial::from_exponents(&[r2 / v[0], p2, p3, p4]));
                }
            }
        }
    }
    out.sort_unstable_by_key(|m| m.coord_exponents());
    out
}

/// Characteristic vector of a flag of τ-monomial spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlagVector(pub [u32; 4]);

impl FlagVector {
    pub const MINIMAL: FlagVector = FlagVector([1, 5, 8, 12]);
    pub const SECOND: FlagVector = FlagVector(TAU_WEIGHTS);

    pub fn weighted_degree(&self, m: Monomial) -> u32 {
        (0..4).map(|i| self.0[i] * m.exponent(i)).sum()
    }

    /// Largest weighted degree among the terms of `p` (0 for zero).
    pub fn degree_of(&self, p: &Polynomial) -> u32 {
        p.terms().iter().map(|(m, _)| self.weighted_degree(*m)).max().unwrap_or(0)
    }
}

impl fmt::Display for FlagVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        write!(f, "({},{},{},{})", v[0], v[1], v[2], v[3])
    }
}

/// Writes an H4-invariant Cartesian polynomial as a polynomial in τ.
///
/// Each homogeneous component (separately for every power of ν and ω) is
/// matched against the τ-monomials of the same weighted degree. The
/// coefficients come from a linear solve at fixed pseudo-random points
/// modulo several primes, followed by reconstruction and one full symbolic
/// substitution check.
pub fn invariantize(p: &Polynomial, tau: &TauMap) -> Result<Polynomial> {
    if p.context() != Context::Cartesian {
        return Err(Error::ContextMismatch("invariantize expects a Cartesian polynomial".into()));
    }
    let mut out = Polynomial::zero(Context::Invariant);
    for ((en, eo), part) in p.split_params() {
        let param = Monomial::from_exponents(&[0, 0, 0, 0, en, eo]);
        for (deg, hp) in part.homogeneous_parts() {
            if deg % 2 == 1 {
                return Err(Error::NotInvariant(format!("odd degree {deg} component {}", hp.summary())));
            }
            let q = invariantize_homogeneous(&hp, deg / 2, tau)?;
            out = out + q.mul_term(param, &ExactScalar::one());
        }
    }
    debug_assert!(out.terms().iter().all(|(m, _)| m.exponent(NU) + m.exponent(OMEGA) <= 255));
    Ok(out)
}

fn invariantize_homogeneous(p: &Polynomial, w: u32, tau: &TauMap) -> Result<Polynomial> {
    let candidates = weighted_monomials(TAU_WEIGHTS, w);
    if candidates.is_empty() {
        return Err(Error::NotInvariant(format!("no tau monomial of weight {w} for {}", p.summary())));
    }
    let n = candidates.len();
    let rows = n + 6;
    let build = |field: &Fp2| -> Option<(Vec<Vec<Elem>>, Vec<Elem>)> {
        let rp = ReducedPoly::new(p, field)?;
        let rt: Vec<ReducedPoly> = tau.tau.iter().map(|t| ReducedPoly::new(t, field)).collect::<Option<_>>()?;
        let mut maxd = rp.max_degrees();
        for t in &rt {
            let d = t.max_degrees();
            for i in 0..COORDS {
                maxd[i] = maxd[i].max(d[i]);
            }
        }
        let mut matrix = Vec::with_capacity(rows);
        let mut rhs = Vec::with_capacity(rows);
        for pt in field.sample_points(POINT_SEED, rows, COORDS) {
            let powers = PowerTable::new(field, &pt, maxd);
            let tv: Vec<Elem> = rt.iter().map(|t| t.eval(field, &powers)).collect();
            matrix.push(
                candidates
                    .iter()
                    .map(|m| {
                        (0..4).fold(field.one(), |acc, i| field.mul(acc, field.pow(tv[i], m.exponent(i))))
                    })
                    .collect(),
            );
            rhs.push(rp.eval(field, &powers));
        }
        Some((matrix, rhs))
    };
    let assemble = |coeffs: &[ExactScalar]| {
        Polynomial::from_terms(Context::Invariant, candidates.iter().copied().zip(coeffs.iter().cloned()))
    };
    let verify = |coeffs: &[ExactScalar]| -> Result<bool> { Ok(tau.compose(&assemble(coeffs))? == *p) };
    match modular::solve_exact(n, build, verify)? {
        Some(c) => Ok(assemble(&c)),
        None => Err(Error::NotInvariant(format!("{} is not a polynomial in tau", p.summary()))),
    }
}

/// The seven coefficients `A₁..A₇` of the lower-degree corrections.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbiguityParams(pub [Rational; 7]);

impl AmbiguityParams {
    pub fn from_reference(r: &ReferenceData) -> Result<Self> {
        Ok(Self(r.ambiguity_params()?))
    }

    fn scalar(&self, k: usize) -> ExactScalar {
        ExactScalar::from_rational(&self.0[k - 1])
    }
}

/// Applies the lower-degree corrections to scaled invariants
/// `t'_a = s_a t_a`:
/// `t'₂`, `t'₁₂ + A₁t'₂⁶`, `t'₂₀ + A₂t'₂⁴t'₁₂ + A₃t'₂¹⁰`,
/// `t'₃₀ + A₄t'₂⁵t'₂₀ + A₅t'₂³t'₁₂² + A₆t'₂⁹t'₁₂ + A₇t'₂¹⁵`.
pub fn apply_coords(t: &[Polynomial; 4], params: &AmbiguityParams, scales: &[ExactScalar; 4]) -> [Polynomial; 4] {
    let s: Vec<Polynomial> = (0..4).map(|a| t[a].scale(&scales[a])).collect();
    let (t2, t12, t20, t30) = (&s[0], &s[1], &s[2], &s[3]);
    let a = |k| params.scalar(k);
    let u2 = t12 + &t2.pow(6).scale(&a(1));
    let u3 = &(t20 + &(&t2.pow(4) * t12).scale(&a(2))) + &t2.pow(10).scale(&a(3));
    let u4 = t30
        + &(&t2.pow(5) * t20).scale(&a(4))
        + (&t2.pow(3) * &t12.pow(2)).scale(&a(5))
        + (&t2.pow(9) * t12).scale(&a(6))
        + t2.pow(15).scale(&a(7));
    [t2.clone(), u2, u3, u4]
}

/// The orbit power sums `t₂, t₁₂, t₂₀, t₃₀`.
pub fn orbit_sums(orbit: &[Vector4]) -> [Polynomial; 4] {
    std::array::from_fn(|a| orbit_power_sum(H4_DEGREES[a], orbit))
}

/// Result of matching the corrected orbit sums to target τ's.
#[derive(Clone, Debug)]
pub struct OrbitFit {
    /// orbit sums `t₂, t₁₂, t₂₀, t₃₀` written in τ
    pub sums_in_tau: Vec<Polynomial>,
    /// scales `s_a` (with `s₂ = 1`)
    pub scales: Vec<ExactScalar>,
    /// `λ_a` with corrected component `a` equal to `λ_a τ_a`
    pub proportionality: Vec<ExactScalar>,
}

/// Fits the scales of the first `count` components, given the orbit sums
/// already written in τ. A common rescaling `s_a → κ^{a/2}s_a` only
/// rescales the result, so `s₂ = 1`.
pub fn fit_scales(sums_in_tau: &[Polynomial], params: &AmbiguityParams, count: usize) -> Result<OrbitFit> {
    let padded: [Polynomial; 4] =
        std::array::from_fn(|a| sums_in_tau.get(a).cloned().unwrap_or_else(|| Polynomial::zero(Context::Invariant)));
    let mut scales: [ExactScalar; 4] = std::array::from_fn(|_| ExactScalar::zero());
    let mut lambda = Vec::with_capacity(count);
    for k in 0..count {
        let lower = apply_coords(&padded, params, &scales)[k].clone();
        let own = &padded[k];
        let target = Monomial::var(k);
        // s·own[m] + lower[m] = 0 for every m ≠ τ_k
        let mut s: Option<ExactScalar> = (k == 0).then(ExactScalar::one);
        let mut monos: Vec<Monomial> = own.terms().iter().chain(lower.terms()).map(|(m, _)| *m).collect();
        monos.sort_unstable();
        monos.dedup();
        monos.reverse();
        for m in monos.iter().filter(|&&m| m != target) {
            let (o, l) = (own.coefficient(*m), lower.coefficient(*m));
            match &s {
                None if !o.is_zero() => s = Some(-&l / &o),
                None if !l.is_zero() => return Err(inconsistent(k, *m, &l)),
                None => {}
                Some(sv) => {
                    let r = &(sv * &o) + &l;
                    if !r.is_zero() {
                        return Err(inconsistent(k, *m, &r));
                    }
                }
            }
        }
        let s = s.unwrap_or_else(ExactScalar::one);
        let l = &(&s * &own.coefficient(target)) + &lower.coefficient(target);
        if l.is_zero() {
            return Err(Error::InconsistentScales(format!("component {} vanishes", k + 1)));
        }
        lambda.push(l);
        scales[k] = s;
    }
    Ok(OrbitFit { sums_in_tau: sums_in_tau[..count].to_vec(), scales: scales[..count].to_vec(), proportionality: lambda })
}

/// Matches the corrected orbit sums to `tau` component by component and
/// confirms the result in x.
pub fn tau_from_orbit(orbit: &[Vector4], params: &AmbiguityParams, tau: &TauMap) -> Result<OrbitFit> {
    let t = orbit_sums(orbit);
    let sums: Vec<Polynomial> = t.iter().map(|p| invariantize(p, tau)).collect::<Result<_>>()?;
    let fit = fit_scales(&sums, params, 4)?;
    let scales: [ExactScalar; 4] = std::array::from_fn(|a| fit.scales[a].clone());
    let mapped = apply_coords(&t, params, &scales);
    for k in 0..4 {
        if mapped[k] != tau.tau[k].scale(&fit.proportionality[k]) {
            return Err(Error::InconsistentScales(format!("component {} differs in x", k + 1)));
        }
    }
    Ok(fit)
}

fn inconsistent(k: usize, m: Monomial, residual: &ExactScalar) -> Error {
    Error::InconsistentScales(format!(
        "component {}: coefficient of {} is {} for every admissible scale",
        k + 1,
        m.display(Context::Invariant),
        residual
    ))
}

/// τ₄ rebuilt from the corrected orbit sum so that its bracket
/// coefficients are exactly the printed ones, up to which partition each
/// value is attached to.
#[derive(Clone, Debug)]
pub struct RelabelledTau4 {
    pub tau4: Polynomial,
    /// `s₃₀` relative to the fitted `s₂ = 1, s₁₂, s₂₀`
    pub scale: ExactScalar,
    /// `λ` with `tau4 = λ·(s₃₀t₃₀ + A₄… terms)`
    pub factor: ExactScalar,
    /// partitions whose printed label differs from the invariant one
    pub moved: usize,
}

/// Finds the member of the one-parameter orbit family
/// `λ(s₃₀t₃₀ + A₄t₂⁵t₂₀ + A₅t₂³t₁₂² + A₆t₂⁹t₁₂ + A₇t₂¹⁵)` whose symmetric and
/// Δ₄ coefficient multisets equal those of `printed`.
///
/// `s₃₀` is the value that zeroes as many bracket coefficients as `printed`
/// has zeros; `λ` matches the largest coefficient in absolute value.
pub fn relabel_tau4(printed: &BracketForm, tau123: &TauMap, orbit: &[Vector4], params: &AmbiguityParams) -> Result<RelabelledTau4> {
    let t = orbit_sums(orbit);
    let sums: Vec<Polynomial> = t[..3].iter().map(|p| invariantize(p, tau123)).collect::<Result<_>>()?;
    let fit = fit_scales(&sums, params, 3)?;
    let mut scales: [ExactScalar; 4] = std::array::from_fn(|a| fit.scales.get(a).cloned().unwrap_or_else(ExactScalar::zero));
    let lower = apply_coords(&t, params, &scales)[3].clone();
    let top = BracketForm::decompose(&t[3])?;
    let low = BracketForm::decompose(&lower)?;
    let pairs: Vec<(&ExactScalar, &ExactScalar)> = top
        .symmetric
        .iter()
        .zip(&low.symmetric)
        .chain(top.alternating.iter().zip(&low.alternating))
        .map(|((_, a), (_, b))| (a, b))
        .collect();
    let printed_zeros = pairs.len()
        - printed.symmetric.iter().chain(&printed.alternating).filter(|(_, c)| !c.is_zero()).count();
    let mut counts: Vec<(ExactScalar, usize)> = Vec::new();
    for (a, b) in &pairs {
        if a.is_zero() {
            continue;
        }
        let s = -(*b) / *a;
        match counts.iter_mut().find(|(v, _)| *v == s) {
            Some(slot) => slot.1 += 1,
            None => counts.push((s, 1)),
        }
    }
    let always_zero = pairs.iter().filter(|(a, b)| a.is_zero() && b.is_zero()).count();
    let candidates: Vec<&ExactScalar> =
        counts.iter().filter(|(_, n)| n + always_zero == printed_zeros).map(|(s, _)| s).collect();
    let no_match = || Error::InconsistentScales("no member of the orbit family carries the printed coefficients of tau4".into());
    let [s30] = candidates.as_slice() else { return Err(no_match()) };
    scales[3] = (*s30).clone();
    let family = apply_coords(&t, params, &scales)[3].clone();
    let form = BracketForm::decompose(&family)?;
    let target = printed.coefficient_multisets();
    let have = form.coefficient_multisets();
    let largest = |v: &[Vec<ExactScalar>; 2]| {
        v.iter().flatten().max_by(|a, b| a.abs().cmp_real(&b.abs())).cloned().ok_or_else(no_match)
    };
    let (pt, ph) = (largest(&target)?, largest(&have)?);
    for factor in [&pt / &ph, -(&pt / &ph)] {
        let scaled: [Vec<ExactScalar>; 2] = std::array::from_fn(|b| {
            let mut v: Vec<ExactScalar> = have[b].iter().map(|c| c * &factor).collect();
            v.sort_by(|x, y| x.cmp_real(y));
            v
        });
        if scaled == target {
            let moved = form
                .symmetric
                .iter()
                .chain(&form.alternating)
                .zip(printed_lookup(printed, &form))
                .filter(|((_, c), p)| &(c * &factor) != p)
                .count();
            return Ok(RelabelledTau4 { tau4: family.scale(&factor), scale: (*s30).clone(), factor, moved });
        }
    }
    Err(no_match())
}

/// The printed τ₁..τ₃ together with the relabelled τ₄.
pub fn tau_relabelled(reference: &ReferenceData, orbit: &[Vector4]) -> Result<(TauMap, RelabelledTau4)> {
    let printed = tau_explicit(reference)?;
    let params = AmbiguityParams::from_reference(reference)?;
    let fix = relabel_tau4(&reference.tau_bracket_form(4)?, &printed, orbit, &params)?;
    let [t1, t2, t3, _] = printed.tau;
    Ok((TauMap::new([t1, t2, t3, fix.tau4.clone()]), fix))
}

fn printed_lookup(printed: &BracketForm, like: &BracketForm) -> Vec<ExactScalar> {
    let find = |v: &[(Vec<u32>, ExactScalar)], l: &[u32]| {
        v.iter().find(|(m, _)| m == l).map(|(_, c)| c.clone()).unwrap_or_else(ExactScalar::zero)
    };
    like.symmetric
        .iter()
        .map(|(l, _)| find(&printed.symmetric, l))
        .chain(like.alternating.iter().map(|(l, _)| find(&printed.alternating, l)))
        .collect()
}

/// `J = det(∂τ_a/∂x_k)` by Laplace expansion along the τ₁ row.
pub fn jacobian(map: &TauMap) -> Polynomial {
    let rows: Vec<Vec<Polynomial>> = map.tau.iter().map(|t| (0..COORDS).map(|k| t.derivative(k)).collect()).collect();
    let mut minor2: BTreeMap<(usize, usize), Polynomial> = BTreeMap::new();
    for k in 0..COORDS {
        for l in k + 1..COORDS {
            minor2.insert((k, l), &(&rows[2][k] * &rows[3][l]) - &(&rows[2][l] * &rows[3][k]));
        }
    }
    let minor3 = |c: usize| -> Polynomial {
        let cols: Vec<usize> = (0..COORDS).filter(|&k| k != c).collect();
        let (k, l, m) = (cols[0], cols[1], cols[2]);
        &(&(&rows[1][k] * &minor2[&(l, m)]) - &(&rows[1][l] * &minor2[&(k, m)])) + &(&rows[1][m] * &minor2[&(k, l)])
    };
    let mut j = Polynomial::zero(Context::Cartesian);
    for c in 0..COORDS {
        let term = &rows[0][c] * &minor3(c);
        j = if c % 2 == 0 { j + term } else { j - term };
    }
    j
}

/// Divides `J` by every root form in turn; returns the constant quotient
/// `c` with `J = c·Π forms`.
pub fn jacobian_root_factor(j: &Polynomial, roots: &[LinearForm]) -> Result<ExactScalar> {
    let mut q = j.clone();
    for r in roots {
        q = q.divide_by_linear(&r.0)?;
    }
    q.constant_value()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::NotDivisible(format!("quotient {} is not a nonzero constant", q.summary())))
}

/// `J²` written in τ, with its comparison against a reference polynomial.
#[derive(Clone, Debug)]
pub struct BoundarySurface {
    pub jacobian_squared: Polynomial,
    /// `κ` with `jacobian_squared = κ · reference`, when proportional
    pub ratio: Option<ExactScalar>,
}

/// Invariantizes `J²` and compares it with `reference` up to one scalar.
pub fn boundary_surface(j: &Polynomial, tau: &TauMap, reference: &Polynomial) -> Result<BoundarySurface> {
    let j2 = invariantize(&(j * j), tau)?;
    Ok(BoundarySurface { ratio: proportionality(&j2, reference), jacobian_squared: j2 })
}

/// `κ` with `p = κ q`, if one exists.
pub fn proportionality(p: &Polynomial, q: &Polynomial) -> Option<ExactScalar> {
    let (m, c) = q.leading_term()?;
    let kappa = p.coefficient(*m).checked_div(c).ok()?;
    (kappa.is_zero() || *p != q.scale(&kappa)).then_some(()).map_or(Some(kappa), |_| None)
}

/// Parameters of the weighted projective transformation: `a`, `b₁..b₆`,
/// `c₁..c₁₃`, `d₁..d₂₆`.
#[derive(Clone, Debug, PartialEq)]
pub struct WptParams {
    pub a: ExactScalar,
    pub b: [ExactScalar; 6],
    pub c: [ExactScalar; 13],
    pub d: [ExactScalar; 26],
}

impl WptParams {
    pub fn zero() -> Self {
        Self {
            a: ExactScalar::zero(),
            b: std::array::from_fn(|_| ExactScalar::zero()),
            c: std::array::from_fn(|_| ExactScalar::zero()),
            d: std::array::from_fn(|_| ExactScalar::zero()),
        }
    }

    /// The images of τ₁..τ₄.
    pub fn images(&self) -> [Polynomial; 4] {
        let ctx = Context::Invariant;
        let t = |e: [u32; 4]| Polynomial::monomial(ctx, Monomial::from_exponents(&e), ExactScalar::one());
        let lin = |pairs: Vec<(&ExactScalar, [u32; 4])>| {
            pairs.into_iter().fold(Polynomial::zero(ctx), |acc, (c, e)| acc + t(e).scale(c))
        };
        let img1 = t([1, 0, 0, 0]) + Polynomial::constant(ctx, self.a.clone());
        let mut b = Vec::new();
        for (k, c) in self.b.iter().enumerate() {
            b.push((c, [5 - k as u32, 0, 0, 0]));
        }
        let img2 = t([0, 1, 0, 0]) + lin(b);
        let mut c = Vec::new();
        for (k, v) in self.c.iter().enumerate() {
            c.push((v, if k < 4 { [3 - k as u32, 1, 0, 0] } else { [12 - k as u32, 0, 0, 0] }));
        }
        let img3 = t([0, 0, 1, 0]) + lin(c);
        let mut d = Vec::new();
        for (k, v) in self.d.iter().enumerate() {
            let e = match k {
                0..=4 => [4 - k as u32, 0, 1, 0],
                5..=12 => [12 - k as u32, 1, 0, 0],
                _ => [25 - k as u32, 0, 0, 0],
            };
            d.push((v, e));
        }
        let img4 = t([0, 0, 0, 1]) + lin(d);
        [img1, img2, img3, img4]
    }
}

/// Substitutes the shifted variables into a τ-polynomial.
pub fn wpt_substitution(p: &Polynomial, params: &WptParams) -> Result<Polynomial> {
    p.substitute(&params.images())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterGroup;

    fn t(s: &str) -> Polynomial {
        Polynomial::parse(s, Context::Invariant).unwrap()
    }

    #[test]
    fn weighted_monomial_counts() {
        assert_eq!(weighted_monomials(TAU_WEIGHTS, 6).len(), 2);
        assert_eq!(weighted_monomials(TAU_WEIGHTS, 0), vec![Monomial::ONE]);
        let f = FlagVector::MINIMAL;
        assert_eq!(f.weighted_degree(Monomial::var(3)), 12);
        assert_eq!(FlagVector::SECOND.weighted_degree(Monomial::var(3)), 15);
        assert_eq!(f.weighted_degree(Monomial::ONE), 0);
    }

    #[test]
    fn wpt_images_respect_the_minimal_flag() {
        let mut params = WptParams::zero();
        params.a = ExactScalar::one();
        assert_eq!(wpt_substitution(&t("tau1"), &params).unwrap(), t("tau1 + 1"));
        params.b[0] = ExactScalar::from_int(3);
        params.d[13] = ExactScalar::from_int(-2);
        let img = params.images();
        assert_eq!(img[1], t("tau2 + 3*tau1^5"));
        assert_eq!(img[3], t("tau4 - 2*tau1^12"));
        for (k, im) in img.iter().enumerate() {
            assert_eq!(FlagVector::MINIMAL.degree_of(im), FlagVector::MINIMAL.0[k]);
        }
    }

    #[test]
    fn orbit_sum_of_degree_two_is_a_multiple_of_r2() {
        let g = CoxeterGroup::h4().unwrap();
        let orbit = g.orbit(&crate::coxeter::paper_weights()[0].0);
        let t2 = orbit_power_sum(2, &orbit);
        let r2 = Polynomial::parse("x1^2+x2^2+x3^2+x4^2", Context::Cartesian).unwrap();
        let c = proportionality(&t2, &r2).expect("proportional");
        assert!(!c.is_zero());
        let t12 = orbit_power_sum(12, &orbit);
        assert_eq!(t12.homogeneous_parts().keys().copied().collect::<Vec<_>>(), vec![12]);
    }

    #[test]
    fn invariantize_small_cases() {
        let r = ReferenceData::embedded().unwrap();
        let tau = tau_explicit(&r).unwrap();
        let t1 = &tau.tau[0];
        let grad2: Polynomial = (0..4).map(|k| t1.derivative(k).pow(2)).fold(Polynomial::zero(Context::Cartesian), |a, b| a + b);
        assert_eq!(invariantize(&grad2, &tau).unwrap(), t("4*tau1"));
        let x = |s: &str| Polynomial::parse(s, Context::Cartesian).unwrap();
        assert!(matches!(invariantize(&x("x1"), &tau), Err(Error::NotInvariant(_))));
        assert!(matches!(invariantize(&x("x1^2"), &tau), Err(Error::NotInvariant(_))));
        let mixed = &x("nu*(x1^2+x2^2+x3^2+x4^2)^2 - 3*omega") + &tau.tau[1];
        assert_eq!(invariantize(&mixed, &tau).unwrap(), t("nu*tau1^2 - 3*omega + tau2"));
    }

    #[test]
    fn proportionality_detection() {
        assert_eq!(proportionality(&t("2*tau1 + 4"), &t("tau1 + 2")), Some(ExactScalar::from_int(2)));
        assert_eq!(proportionality(&t("2*tau1 + 5"), &t("tau1 + 2")), None);
    }
}
