//! Linear differential operators with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Context, Polynomial, COORDS};
use crate::scalar::ExactScalar;

/// Derivative orders `(k₁,k₂,k₃,k₄)` for `∂₁^{k₁}⋯∂₄^{k₄}`.
pub type MultiIndex = [u8; COORDS];

fn unit(i: usize) -> MultiIndex {
    let mut m = [0; COORDS];
    m[i] = 1;
    m
}

fn pair(i: usize, j: usize) -> MultiIndex {
    let mut m = unit(i);
    m[j] += 1;
    m
}

fn order_of(m: &MultiIndex) -> u32 {
    m.iter().map(|&k| k as u32).sum()
}

/// `Σ c_m ∂^m` with the multi-index as key. A mixed second derivative
/// `∂ᵢ∂ⱼ` appears once, so its stored coefficient is `2A_ij` for an
/// operator written as `Σ_{i,j} A_ij ∂ᵢ∂ⱼ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    context: Context,
    terms: BTreeMap<MultiIndex, Polynomial>,
}

impl DiffOperator {
    pub fn zero(context: Context) -> Self {
        Self { context, terms: BTreeMap::new() }
    }

    pub fn identity(context: Context) -> Self {
        Self::multiplication(Polynomial::one(context))
    }

    pub fn multiplication(p: Polynomial) -> Self {
        let mut op = Self::zero(p.context());
        op.add_term([0; COORDS], p);
        op
    }

    pub fn partial(context: Context, i: usize) -> Self {
        let mut op = Self::zero(context);
        op.add_term(unit(i), Polynomial::one(context));
        op
    }

    /// `Σ_{i,j} a[i][j] ∂ᵢ∂ⱼ + Σᵢ b[i] ∂ᵢ` for symmetric `a`.
    pub fn second_order(a: &[[Polynomial; COORDS]; COORDS], b: &[Polynomial; COORDS]) -> Result<Self> {
        let ctx = b[0].context();
        let mut op = Self::zero(ctx);
        for i in 0..COORDS {
            if a[i][i].context() != ctx || b[i].context() != ctx {
                return Err(Error::ContextMismatch("operator coefficients".into()));
            }
            op.add_term(pair(i, i), a[i][i].clone());
            op.add_term(unit(i), b[i].clone());
            for j in i + 1..COORDS {
                if a[i][j] != a[j][i] {
                    return Err(Error::InvalidParameter(format!("second-order part is not symmetric at ({}, {})", i + 1, j + 1)));
                }
                op.add_term(pair(i, j), a[i][j].scale(&ExactScalar::from_int(2)));
            }
        }
        Ok(op)
    }

    pub fn context(&self) -> Context {
        self.context
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Polynomial)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(order_of).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Polynomial {
        self.terms.get(m).cloned().unwrap_or_else(|| Polynomial::zero(self.context))
    }

    /// `A_ij` of `Σ_{i,j} A_ij ∂ᵢ∂ⱼ` (0-based indices).
    pub fn second(&self, i: usize, j: usize) -> Polynomial {
        let c = self.coefficient(&pair(i, j));
        if i == j {
            c
        } else {
            c.scale(&ExactScalar::from_ratio(1, 2))
        }
    }

    /// Coefficient of `∂ᵢ` (0-based).
    pub fn first(&self, i: usize) -> Polynomial {
        self.coefficient(&unit(i))
    }

    /// Coefficient of the identity.
    pub fn free_term(&self) -> Polynomial {
        self.coefficient(&[0; COORDS])
    }

    fn add_term(&mut self, m: MultiIndex, c: Polynomial) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(|| Polynomial::zero(c.context()));
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.context != other.context {
            return Err(Error::ContextMismatch(format!("{} operator with {} operator", self.context, other.context)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-ExactScalar::one()))
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero(self.context);
        for (m, p) in &self.terms {
            out.add_term(*m, p.scale(c));
        }
        out
    }

    /// Left multiplication by a polynomial.
    pub fn mul_poly(&self, p: &Polynomial) -> Result<Self> {
        let mut out = Self::zero(self.context);
        for (m, c) in &self.terms {
            out.add_term(*m, c.try_mul(p)?);
        }
        Ok(out)
    }

    /// Applies the operator to `p`.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        if p.context() != self.context {
            return Err(Error::ContextMismatch("operator applied across contexts".into()));
        }
        let mut acc = Polynomial::zero(self.context);
        for (m, c) in &self.terms {
            let d = differentiate(p, m);
            if !d.is_zero() {
                acc = acc + c * &d;
            }
        }
        Ok(acc)
    }

    /// `self ∘ other` by the Leibniz rule.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.context);
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                for_each_sub_index(alpha, &mut |gamma, binom| {
                    let db = differentiate(b, &gamma);
                    if db.is_zero() {
                        return;
                    }
                    let mut m = *beta;
                    for k in 0..COORDS {
                        m[k] += alpha[k] - gamma[k];
                    }
                    out.add_term(m, (a * &db).scale(&ExactScalar::from_int(binom)));
                });
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.try_sub(&other.compose(self)?)
    }

    pub fn specialize(&self, var: usize, value: &ExactScalar) -> Self {
        let mut out = Self::zero(self.context);
        for (m, c) in &self.terms {
            out.add_term(*m, c.specialize(var, value));
        }
        out
    }
}

impl DiffOperator {
    /// One line per term, `k1 k2 k3 k4: coefficient`, in canonical order,
    /// after a `context` header line.
    pub fn to_canonical_text(&self) -> String {
        let mut out = format!("{}\n", self.context);
        for (m, c) in &self.terms {
            out.push_str(&format!("{} {} {} {}: {c}\n", m[0], m[1], m[2], m[3]));
        }
        out
    }

    pub fn from_canonical_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let context = match lines.next().map(str::trim) {
            Some("cartesian") => Context::Cartesian,
            Some("invariant") => Context::Invariant,
            other => return Err(Error::Parse(format!("bad operator header {other:?}"))),
        };
        let mut op = Self::zero(context);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (idx, coef) = line.split_once(':').ok_or_else(|| Error::Parse(format!("bad operator line {line:?}")))?;
            let ks: Vec<u8> = idx
                .split_whitespace()
                .map(|k| k.parse().map_err(|_| Error::Parse(format!("bad multi-index {idx:?}"))))
                .collect::<Result<_>>()?;
            let m: MultiIndex = ks.try_into().map_err(|_| Error::Parse(format!("bad multi-index {idx:?}")))?;
            op.add_term(m, Polynomial::parse(coef, context)?);
        }
        Ok(op)
    }
}

/// `∂^m p`.
pub fn differentiate(p: &Polynomial, m: &MultiIndex) -> Polynomial {
    let mut d = p.clone();
    for (k, &e) in m.iter().enumerate() {
        for _ in 0..e {
            if d.is_zero() {
                return d;
            }
            d = d.derivative(k);
        }
    }
    d
}

fn for_each_sub_index(alpha: &MultiIndex, f: &mut dyn FnMut(MultiIndex, i64)) {
    fn binom(n: u8, k: u8) -> i64 {
        (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
    }
    let mut g = [0u8; COORDS];
    loop {
        let c = (0..COORDS).map(|k| binom(alpha[k], g[k])).product();
        f(g, c);
        let mut k = 0;
        loop {
            if k == COORDS {
                return;
            }
            if g[k] < alpha[k] {
                g[k] += 1;
                break;
            }
            g[k] = 0;
            k += 1;
        }
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (k, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*D[{}]", self.context.var_name(k))?,
                    _ => write!(f, "*D[{}]^{e}", self.context.var_name(k))?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Polynomial {
        Polynomial::parse(s, Context::Invariant).unwrap()
    }

    #[test]
    fn canonical_commutation() {
        let ctx = Context::Invariant;
        let d1 = DiffOperator::partial(ctx, 0);
        let x1 = DiffOperator::multiplication(t("tau1"));
        assert_eq!(d1.commutator(&x1).unwrap(), DiffOperator::identity(ctx));
        assert!(d1.commutator(&DiffOperator::partial(ctx, 1)).unwrap().is_zero());
        assert!(d1.compose(&DiffOperator::zero(ctx)).unwrap().is_zero());
    }

    #[test]
    fn second_order_storage() {
        let z = || Polynomial::zero(Context::Invariant);
        let mut a: [[Polynomial; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| z()));
        a[0][1] = t("tau2");
        a[1][0] = t("tau2");
        a[0][0] = t("4*tau1");
        let b = std::array::from_fn(|i| if i == 0 { t("1") } else { z() });
        let op = DiffOperator::second_order(&a, &b).unwrap();
        assert_eq!(op.second(0, 1), t("tau2"));
        assert_eq!(op.coefficient(&[1, 1, 0, 0]), t("2*tau2"));
        // 4τ₁∂₁²(τ₁²τ₂) + 2τ₂∂₁∂₂(τ₁²τ₂) + ∂₁(τ₁²τ₂)
        assert_eq!(op.apply(&t("tau1^2*tau2")).unwrap(), t("14*tau1*tau2"));
        a[1][0] = t("tau3");
        assert!(DiffOperator::second_order(&a, &b).is_err());
    }

    #[test]
    fn composition_matches_repeated_application() {
        let ctx = Context::Invariant;
        let op = DiffOperator::multiplication(t("tau1^2 + nu"))
            .compose(&DiffOperator::partial(ctx, 0))
            .unwrap()
            .try_add(&DiffOperator::partial(ctx, 1).mul_poly(&t("tau2*tau1")).unwrap())
            .unwrap();
        let sq = op.compose(&op).unwrap();
        for p in ["tau1^3*tau2^2", "tau2^3 + omega*tau1", "7"] {
            let p = t(p);
            assert_eq!(sq.apply(&p).unwrap(), op.apply(&op.apply(&p).unwrap()).unwrap());
        }
        assert_eq!(sq.order(), 2);
        assert_eq!(DiffOperator::from_canonical_text(&sq.to_canonical_text()).unwrap(), sq);
    }
}
