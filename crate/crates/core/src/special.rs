//! Special polynomials: monomial symmetric functions of the squares in
//! bracket notation, the alternating Δ₄, and generalized Laguerre
//! polynomials.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::{Context, Monomial, Polynomial, COORDS};
use crate::scalar::ExactScalar;

/// Pads a partition to four parts after validating it.
fn padded(lambda: &[u32]) -> Result<[u32; COORDS]> {
    if lambda.len() > COORDS || lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidPartition(lambda.to_vec()));
    }
    let mut out = [0; COORDS];
    out[..lambda.len()].copy_from_slice(lambda);
    Ok(out)
}

fn permutations4() -> Vec<[usize; COORDS]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// `M_λ = Σ x₁^{2μ₁}⋯x₄^{2μ₄}` over the distinct permutations μ of λ.
pub fn monomial_symmetric(lambda: &[u32]) -> Result<Polynomial> {
    let lam = padded(lambda)?;
    let mus: BTreeSet<[u32; COORDS]> = permutations4()
        .into_iter()
        .map(|p| std::array::from_fn(|i| lam[p[i]]))
        .collect();
    Ok(Polynomial::from_terms(
        Context::Cartesian,
        mus.into_iter().map(|mu| {
            let e: Vec<u32> = mu.iter().map(|m| 2 * m).collect();
            (Monomial::from_exponents(&e), ExactScalar::one())
        }),
    ))
}

/// Parses the bracket notation `[p₁^{k₁}|⋯|p_m^{k_m}]` (without the
/// brackets being mandatory), e.g. `"3^2|0^2"` → `(3,3,0,0)`.
pub fn parse_bracket(text: &str) -> Result<Vec<u32>> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let mut out = Vec::new();
    for part in inner.split('|') {
        let (p, k) = match part.trim().split_once('^') {
            Some((p, k)) => (p, k),
            None => (part.trim(), "1"),
        };
        let p: u32 = p.trim().parse().map_err(|_| Error::Parse(format!("bad bracket part {part:?}")))?;
        let k: usize = k.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity in {part:?}")))?;
        out.extend(std::iter::repeat(p).take(k));
    }
    if out.len() != COORDS {
        return Err(Error::InvalidPartition(out));
    }
    padded(&out)?;
    Ok(out)
}

/// Parses an integer combination of bracket symbols such as
/// `"14[3^2|0^2] - 6[4|2|0^2] + [1^4]"`.
pub fn parse_symmetric_combination(text: &str) -> Result<Vec<(ExactScalar, Vec<u32>)>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let open = rest.find('[').ok_or_else(|| Error::Parse(format!("expected '[' in {rest:?}")))?;
        let close = rest.find(']').ok_or_else(|| Error::Parse(format!("unclosed bracket in {rest:?}")))?;
        let coef_text: String = rest[..open].chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let coef = match coef_text.as_str() {
            "" | "+" => ExactScalar::one(),
            "-" => -ExactScalar::one(),
            t => t.parse::<ExactScalar>()?,
        };
        out.push((coef, parse_bracket(&rest[open..=close])?));
        rest = rest[close + 1..].trim();
    }
    Ok(out)
}

/// Evaluates a bracket combination as a polynomial in x.
pub fn symmetric_combination(terms: &[(ExactScalar, Vec<u32>)]) -> Result<Polynomial> {
    let mut acc = Polynomial::zero(Context::Cartesian);
    for (c, lam) in terms {
        acc = acc + monomial_symmetric(lam)?.scale(c);
    }
    Ok(acc)
}

/// `Δ₄ = Π_{i<j}(x_i² − x_j²)`.
pub fn alternating_delta4() -> Polynomial {
    let sq: Vec<Polynomial> = (0..COORDS).map(|i| Polynomial::var(Context::Cartesian, i).pow(2)).collect();
    let mut acc = Polynomial::one(Context::Cartesian);
    for i in 0..COORDS {
        for j in i + 1..COORDS {
            acc = acc * (&sq[i] - &sq[j]);
        }
    }
    acc
}

/// Partitions of `n` into at most four parts, zero-padded, in decreasing
/// lexicographic order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for p in (0..=max.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, COORDS, &mut Vec::new(), &mut out);
    out
}

/// A polynomial `Σ s_λ M_λ + Δ₄ Σ a_μ M_μ` in bracket coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketForm {
    pub symmetric: Vec<(Vec<u32>, ExactScalar)>,
    pub alternating: Vec<(Vec<u32>, ExactScalar)>,
}

impl BracketForm {
    /// Splits a homogeneous polynomial in the squares that is invariant
    /// under even permutations into its symmetric part and its Δ₄ part.
    pub fn decompose(p: &Polynomial) -> Result<Self> {
        let half = ExactScalar::from_ratio(1, 2);
        let swapped = p.swap_vars(0, 1);
        let sym = (p + &swapped).scale(&half);
        let alt = (p - &swapped).scale(&half).exact_divide(&alternating_delta4())?;
        for (i, j) in [(0, 1), (1, 2), (2, 3)] {
            if sym.swap_vars(i, j) != sym || alt.swap_vars(i, j) != alt {
                return Err(Error::Unsupported(format!("{} is not of bracket form", p.summary())));
            }
        }
        let coords = |q: &Polynomial| -> Result<Vec<(Vec<u32>, ExactScalar)>> {
            let Some(deg) = q.coord_degree() else { return Ok(Vec::new()) };
            if q.terms().iter().any(|(m, _)| m.coord_exponents().iter().any(|e| e % 2 == 1)) {
                return Err(Error::Unsupported(format!("{} has odd exponents", q.summary())));
            }
            Ok(partitions(deg / 2)
                .into_iter()
                .map(|l| {
                    let e: Vec<u32> = l.iter().map(|k| 2 * k).collect();
                    let c = q.coefficient(Monomial::from_exponents(&e));
                    (l, c)
                })
                .collect())
        };
        Ok(Self { symmetric: coords(&sym)?, alternating: coords(&alt)? })
    }

    pub fn from_printed(symmetric: &str, factor: &ExactScalar, block: &str) -> Result<Self> {
        let collect = |text: &str, scale: &ExactScalar| -> Result<Vec<(Vec<u32>, ExactScalar)>> {
            let terms = parse_symmetric_combination(text)?;
            let mut out: Vec<(Vec<u32>, ExactScalar)> = Vec::new();
            for (c, l) in terms {
                match out.iter_mut().find(|(m, _)| *m == l) {
                    Some(slot) => slot.1 += &(&c * scale),
                    None => out.push((l, &c * scale)),
                }
            }
            Ok(out)
        };
        Ok(Self { symmetric: collect(symmetric, &ExactScalar::one())?, alternating: collect(block, factor)? })
    }

    pub fn to_polynomial(&self) -> Result<Polynomial> {
        let sym = symmetric_combination(&self.symmetric.iter().map(|(l, c)| (c.clone(), l.clone())).collect::<Vec<_>>())?;
        let alt = symmetric_combination(&self.alternating.iter().map(|(l, c)| (c.clone(), l.clone())).collect::<Vec<_>>())?;
        Ok(sym + &alternating_delta4() * &alt)
    }

    /// The nonzero coefficients of each block as sorted multisets.
    pub fn coefficient_multisets(&self) -> [Vec<ExactScalar>; 2] {
        let sorted = |v: &[(Vec<u32>, ExactScalar)]| {
            let mut c: Vec<ExactScalar> = v.iter().map(|(_, c)| c.clone()).filter(|c| !c.is_zero()).collect();
            c.sort_by(|a, b| a.cmp_real(b));
            c
        };
        [sorted(&self.symmetric), sorted(&self.alternating)]
    }
}

/// Generalized Laguerre polynomial
/// `L_n^{(α)}(z) = Σ_k (−1)^k C(n+α, n−k) z^k / k!`
/// with `C(n+α, n−k) = Π_{i=1}^{n−k}(α+k+i)/(n−k)!`. `alpha` and `z` may be
/// arbitrary polynomials in the same context.
pub fn laguerre(n: u32, alpha: &Polynomial, z: &Polynomial) -> Result<Polynomial> {
    let ctx = alpha.context();
    let mut acc = Polynomial::zero(ctx);
    let mut zk = Polynomial::one(ctx);
    let mut kfact = ExactScalar::one();
    for k in 0..=n {
        if k > 0 {
            zk = zk.try_mul(z)?;
            kfact = &kfact * &ExactScalar::from_int(k as i64);
        }
        let mut binom = Polynomial::one(ctx);
        let mut denom = ExactScalar::one();
        for i in 1..=(n - k) {
            let shift = Polynomial::from_int(ctx, (k + i) as i64);
            binom = binom.try_mul(&alpha.try_add(&shift)?)?;
            denom = &denom * &ExactScalar::from_int(i as i64);
        }
        let sign = if k % 2 == 0 { ExactScalar::one() } else { -ExactScalar::one() };
        let coef = &sign / &(&denom * &kfact);
        acc = acc.try_add(&binom.try_mul(&zk)?.scale(&coef))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(s: &str) -> Polynomial {
        Polynomial::parse(s, Context::Cartesian).unwrap()
    }

    fn pt(v: &[i64]) -> Vec<ExactScalar> {
        v.iter().map(|&k| ExactScalar::from_int(k)).collect()
    }

    #[test]
    fn bracket_symbols() {
        assert_eq!(monomial_symmetric(&parse_bracket("[1|0^3]").unwrap()).unwrap(), x("x1^2+x2^2+x3^2+x4^2"));
        assert_eq!(monomial_symmetric(&parse_bracket("[3^2|0^2]").unwrap()).unwrap().len(), 6);
        let m = monomial_symmetric(&parse_bracket("[2|1|0^2]").unwrap()).unwrap();
        assert_eq!(m.evaluate(&pt(&[1, 1, 1, 1])).unwrap(), ExactScalar::from_int(12));
        assert!(matches!(monomial_symmetric(&[1, 2]), Err(Error::InvalidPartition(_))));
        assert!(parse_bracket("[3|1]").is_err());
    }

    #[test]
    fn combination_parser() {
        let t = parse_symmetric_combination("14[3^2|0^2] - 6[4|2|0^2] + [1^4]").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[1].0, ExactScalar::from_int(-6));
        assert_eq!(t[2].1, vec![1, 1, 1, 1]);
    }

    #[test]
    fn delta4_values() {
        let d = alternating_delta4();
        assert_eq!(d.coord_degree(), Some(12));
        assert!(d.evaluate(&pt(&[1, 1, 0, 0])).unwrap().is_zero());
        let expected: i64 = (1 - 4) * (1 - 9) * (1 - 16) * (4 - 9) * (4 - 16) * (9 - 16);
        assert_eq!(expected, 151200);
        assert_eq!(d.evaluate(&pt(&[1, 2, 3, 4])).unwrap(), ExactScalar::from_int(expected));
        for (i, j) in [(0, 1), (0, 3), (1, 2), (2, 3)] {
            assert_eq!(d.swap_vars(i, j), -&d);
        }
    }

    #[test]
    fn low_laguerre() {
        let ctx = Context::Invariant;
        let t = |s: &str| Polynomial::parse(s, ctx).unwrap();
        let alpha = t("1+60*nu");
        let z = t("omega*tau1");
        assert_eq!(laguerre(0, &alpha, &z).unwrap(), t("1"));
        assert_eq!(laguerre(1, &alpha, &z).unwrap(), t("2+60*nu-omega*tau1"));
        // L₂^{(a)}(z) = (a+1)(a+2)/2 − (a+2)z + z²/2
        let a = t("nu");
        let zz = t("tau1");
        assert_eq!(
            laguerre(2, &a, &zz).unwrap(),
            t("(nu+1)*(nu+2)/2 - (nu+2)*tau1 + tau1^2/2")
        );
    }

    proptest! {
        #[test]
        fn symmetric_under_permutations(l in proptest::collection::vec(0u32..4, 4)) {
            let mut lam = l.clone();
            lam.sort_unstable_by(|a, b| b.cmp(a));
            let m = monomial_symmetric(&lam).unwrap();
            for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
                prop_assert_eq!(m.swap_vars(i, j), m.clone());
            }
        }

        #[test]
        fn laguerre_three_term_recurrence(n in 1u32..6) {
            // (n+1)L_{n+1} = (2n+1+α−z)L_n − (n+α)L_{n−1}
            let ctx = Context::Invariant;
            let a = Polynomial::parse("nu", ctx).unwrap();
            let z = Polynomial::parse("tau1", ctx).unwrap();
            let l = |k| laguerre(k, &a, &z).unwrap();
            let lhs = l(n + 1).scale(&ExactScalar::from_int(n as i64 + 1));
            let c1 = &(&Polynomial::from_int(ctx, 2 * n as i64 + 1) + &a) - &z;
            let c2 = &Polynomial::from_int(ctx, n as i64) + &a;
            prop_assert_eq!(lhs, &(&c1 * &l(n)) - &(&c2 * &l(n - 1)));
        }
    }
}
