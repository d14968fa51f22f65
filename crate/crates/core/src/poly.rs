//! Sparse multivariate polynomials over Q(√5).
//!
//! A polynomial lives in a [`Context`]: four coordinate variables (either
//! the Cartesian `x1..x4` or the invariant `tau1..tau4`) followed by the two
//! model parameters `nu` and `omega`, which are ordinary ring
//! indeterminates. Terms are kept sorted in descending graded-lexicographic
//! order with no zero coefficients, so structural equality is mathematical
//! equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Number of coordinate variables.
pub const COORDS: usize = 4;
/// Index of the coupling parameter ν.
pub const NU: usize = 4;
/// Index of the frequency parameter ω.
pub const OMEGA: usize = 5;
/// Total number of variables in every context.
pub const NVARS: usize = 6;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Context {
    /// `x1..x4, nu, omega`
    Cartesian,
    /// `tau1..tau4, nu, omega`
    Invariant,
}

impl Context {
    pub fn var_name(self, i: usize) -> &'static str {
        const X: [&str; NVARS] = ["x1", "x2", "x3", "x4", "nu", "omega"];
        const T: [&str; NVARS] = ["tau1", "tau2", "tau3", "tau4", "nu", "omega"];
        match self {
            Context::Cartesian => X[i],
            Context::Invariant => T[i],
        }
    }

    fn var_index(self, name: &str) -> Option<usize> {
        (0..NVARS).find(|&i| self.var_name(i) == name)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Context::Cartesian => write!(f, "cartesian"),
            Context::Invariant => write!(f, "invariant"),
        }
    }
}

/// Exponent vector packed one byte per variable, variable 0 in the most
/// significant byte, so comparing the packed words is lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(u64);

const BYTE_TOPS: u64 = 0x8080_8080_8080_8080;

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    fn shift(i: usize) -> u32 {
        56 - 8 * i as u32
    }

    /// Panics if any exponent exceeds 255.
    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= NVARS);
        let mut w = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= 255, "exponent {e} out of range");
            w |= (e as u64) << Self::shift(i);
        }
        Monomial(w)
    }

    pub fn var(i: usize) -> Self {
        Monomial(1u64 << Self::shift(i))
    }

    pub fn exponent(self, i: usize) -> u32 {
        ((self.0 >> Self::shift(i)) & 0xff) as u32
    }

    pub fn exponents(self) -> [u32; NVARS] {
        std::array::from_fn(|i| self.exponent(i))
    }

    pub fn coord_exponents(self) -> [u32; COORDS] {
        std::array::from_fn(|i| self.exponent(i))
    }

    pub fn degree(self) -> u32 {
        (0..NVARS).map(|i| self.exponent(i)).sum()
    }

    pub fn coord_degree(self) -> u32 {
        (0..COORDS).map(|i| self.exponent(i)).sum()
    }

    /// The monomial restricted to the coordinate variables.
    pub fn coord_part(self) -> Monomial {
        Monomial(self.0 & 0xffff_ffff_0000_0000)
    }

    /// The monomial restricted to ν and ω.
    pub fn param_part(self) -> Monomial {
        Monomial(self.0 & 0x0000_0000_ffff_0000)
    }

    pub fn with_exponent(self, i: usize, e: u32) -> Self {
        assert!(e <= 255);
        let s = Self::shift(i);
        Monomial((self.0 & !(0xffu64 << s)) | ((e as u64) << s))
    }

    /// Product of monomials; panics on exponent overflow.
    pub fn mul(self, other: Monomial) -> Monomial {
        let sum = self.0.wrapping_add(other.0);
        let carries = (self.0 & other.0) | ((self.0 | other.0) & !sum);
        assert!(carries & BYTE_TOPS == 0, "monomial exponent overflow");
        Monomial(sum)
    }

    pub fn divides(self, other: Monomial) -> bool {
        (0..NVARS).all(|i| self.exponent(i) <= other.exponent(i))
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(self, other: Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial(other.0 - self.0)
    }

    fn grlex_cmp(self, other: Monomial) -> Ordering {
        self.degree().cmp(&other.degree()).then(self.0.cmp(&other.0))
    }

    pub fn display(self, ctx: Context) -> String {
        let mut parts = Vec::new();
        for i in 0..NVARS {
            match self.exponent(i) {
                0 => {}
                1 => parts.push(ctx.var_name(i).to_string()),
                e => parts.push(format!("{}^{}", ctx.var_name(i), e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grlex_cmp(*other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse polynomial in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ctx: Context,
    terms: Vec<(Monomial, ExactScalar)>,
}

impl Polynomial {
    pub fn zero(ctx: Context) -> Self {
        Self { ctx, terms: Vec::new() }
    }

    pub fn constant(ctx: Context, c: ExactScalar) -> Self {
        Self::monomial(ctx, Monomial::ONE, c)
    }

    pub fn one(ctx: Context) -> Self {
        Self::constant(ctx, ExactScalar::one())
    }

    pub fn from_int(ctx: Context, n: i64) -> Self {
        Self::constant(ctx, ExactScalar::from_int(n))
    }

    pub fn var(ctx: Context, i: usize) -> Self {
        Self::monomial(ctx, Monomial::var(i), ExactScalar::one())
    }

    pub fn monomial(ctx: Context, m: Monomial, c: ExactScalar) -> Self {
        if c.is_zero() {
            Self::zero(ctx)
        } else {
            Self { ctx, terms: vec![(m, c)] }
        }
    }

    /// Collects terms, merging equal monomials.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, ExactScalar)>>(ctx: Context, terms: I) -> Self {
        let mut map: FxHashMap<Monomial, ExactScalar> = FxHashMap::default();
        for (m, c) in terms {
            *map.entry(m).or_default() += &c;
        }
        Self::from_map(ctx, map)
    }

    fn from_map(ctx: Context, map: FxHashMap<Monomial, ExactScalar>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Self { ctx, terms }
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> &[(Monomial, ExactScalar)] {
        &self.terms
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    /// Reinterprets the variables in another context. Only meaningful for
    /// polynomials in ν, ω alone, or when the caller intends a relabelling.
    pub fn with_context(mut self, ctx: Context) -> Self {
        self.ctx = ctx;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<&(Monomial, ExactScalar)> {
        self.terms.first()
    }

    pub fn coefficient(&self, m: Monomial) -> ExactScalar {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    /// Total degree (all variables).
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Degree in the coordinate variables only.
    pub fn coord_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.coord_degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exponent(var)).max().unwrap_or(0)
    }

    /// The value if the polynomial is a constant.
    pub fn constant_value(&self) -> Option<ExactScalar> {
        match self.terms.as_slice() {
            [] => Some(ExactScalar::zero()),
            [(m, c)] if *m == Monomial::ONE => Some(c.clone()),
            _ => None,
        }
    }

    /// True when no coordinate variable occurs (only ν, ω).
    pub fn is_coord_free(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.coord_degree() == 0)
    }

    /// True when ν and ω do not occur.
    pub fn is_param_free(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.param_part() == Monomial::ONE)
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!("{} vs {}", self.ctx, other.ctx)))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => b.0.cmp(&a.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (m, c) = &other.terms[j];
                    out.push((*m, if negate { -c } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &self.terms[i].1 - &other.terms[j].1
                    } else {
                        &self.terms[i].1 + &other.terms[j].1
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Self { ctx: self.ctx, terms: out }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ctx);
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return big.mul_term(*m, c);
        }
        let mut map: FxHashMap<Monomial, ExactScalar> = FxHashMap::default();
        map.reserve((small.len() * big.len()).min(1 << 20));
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let prod = ca * cb;
                match map.entry(ma.mul(*mb)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += &prod,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                }
            }
        }
        Self::from_map(self.ctx, map)
    }

    /// Multiplication by a single term; order is preserved so no sort is
    /// needed.
    pub fn mul_term(&self, m: Monomial, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.ctx);
        }
        let terms = self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect();
        Self { ctx: self.ctx, terms }
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        self.mul_term(Monomial::ONE, c)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ctx);
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(var) > 0)
            .map(|(m, c)| {
                let e = m.exponent(var);
                (m.with_exponent(var, e - 1), c * &ExactScalar::from_int(e as i64))
            })
            .collect::<Vec<_>>();
        // lowering one exponent can reorder terms of different degree
        Self::from_terms(self.ctx, terms)
    }

    /// Evaluates at a point. `values` holds either the four coordinates (the
    /// polynomial must then be free of ν and ω) or all six variables.
    pub fn evaluate(&self, values: &[ExactScalar]) -> Result<ExactScalar> {
        if values.len() != COORDS && values.len() != NVARS {
            return Err(Error::InvalidParameter(format!("expected 4 or 6 values, got {}", values.len())));
        }
        if values.len() == COORDS && !self.is_param_free() {
            return Err(Error::InvalidParameter("polynomial depends on nu/omega".into()));
        }
        let n = values.len();
        let mut powers: Vec<Vec<ExactScalar>> = (0..n)
            .map(|i| {
                let mut v = vec![ExactScalar::one()];
                let d = self.degree_in(i);
                for k in 1..=d as usize {
                    let next = &v[k - 1] * &values[i];
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = ExactScalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exponent(i) as usize;
                if e > 0 {
                    t = &t * &pw[e];
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Replaces variable `var` by a scalar.
    pub fn specialize(&self, var: usize, value: &ExactScalar) -> Self {
        let d = self.degree_in(var);
        let mut pw = vec![ExactScalar::one()];
        for k in 1..=d as usize {
            let next = &pw[k - 1] * value;
            pw.push(next);
        }
        Self::from_terms(
            self.ctx,
            self.terms
                .iter()
                .map(|(m, c)| (m.with_exponent(var, 0), c * &pw[m.exponent(var) as usize])),
        )
    }

    /// Splits by powers of (ν, ω): returns `(e_nu, e_omega) -> part` with
    /// parameter-free parts, so that `self = Σ ν^a ω^b part`.
    pub fn split_params(&self) -> BTreeMap<(u32, u32), Polynomial> {
        let mut out: BTreeMap<(u32, u32), Vec<(Monomial, ExactScalar)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry((m.exponent(NU), m.exponent(OMEGA)))
                .or_default()
                .push((m.coord_part(), c.clone()));
        }
        out.into_iter()
            .map(|(k, v)| (k, Self::from_terms(self.ctx, v)))
            .collect()
    }

    /// Splits by total coordinate degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Vec<(Monomial, ExactScalar)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.coord_degree()).or_default().push((*m, c.clone()));
        }
        out.into_iter()
            .map(|(k, v)| (k, Self { ctx: self.ctx, terms: v }))
            .collect()
    }

    /// Substitutes `images[i]` for coordinate variable `i` (ν and ω are kept)
    /// and returns a polynomial in the images' context. Evaluated by a
    /// multivariate Horner scheme.
    pub fn substitute(&self, images: &[Polynomial; COORDS]) -> Result<Polynomial> {
        let target = images[0].ctx;
        if images.iter().any(|p| p.ctx != target) {
            return Err(Error::ContextMismatch("substitution images disagree".into()));
        }
        let terms: Vec<(Monomial, ExactScalar)> = self.terms.clone();
        Ok(horner(&terms, 0, images, target))
    }

    /// Multiplies by a linear form `Σ c_k x_k` in the coordinate variables.
    pub fn mul_linear(&self, coeffs: &[ExactScalar; COORDS]) -> Self {
        let lin = Self::linear(self.ctx, coeffs);
        self.mul_unchecked(&lin)
    }

    /// The linear form `Σ c_k x_k` as a polynomial.
    pub fn linear(ctx: Context, coeffs: &[ExactScalar; COORDS]) -> Self {
        Self::from_terms(ctx, (0..COORDS).map(|k| (Monomial::var(k), coeffs[k].clone())))
    }

    /// Division with remainder by a linear form `ℓ = Σ c_k x_k`, treating
    /// the polynomial as univariate in a pivot variable of `ℓ`. The
    /// remainder is free of the pivot variable.
    pub fn div_rem_linear(&self, coeffs: &[ExactScalar; COORDS]) -> Result<(Polynomial, Polynomial)> {
        let pivot = linear_pivot(coeffs).ok_or(Error::DivisionByZero)?;
        let lead_inv = coeffs[pivot].inv()?;
        let rest: Vec<(usize, ExactScalar)> = (0..COORDS)
            .filter(|&k| k != pivot && !coeffs[k].is_zero())
            .map(|k| (k, coeffs[k].clone()))
            .collect();
        // bucket by pivot exponent, pivot stripped
        let top = self.degree_in(pivot) as usize;
        let mut buckets: Vec<FxHashMap<Monomial, ExactScalar>> = vec![FxHashMap::default(); top + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(pivot) as usize;
            buckets[e].insert(m.with_exponent(pivot, 0), c.clone());
        }
        let mut quotient: Vec<(Monomial, ExactScalar)> = Vec::new();
        for e in (1..=top).rev() {
            let bucket = std::mem::take(&mut buckets[e]);
            for (m, c) in bucket {
                if c.is_zero() {
                    continue;
                }
                let q = &c * &lead_inv;
                for (k, ck) in &rest {
                    let entry = buckets[e - 1].entry(m.mul(Monomial::var(*k))).or_default();
                    *entry -= &(&q * ck);
                }
                quotient.push((m.with_exponent(pivot, (e - 1) as u32), q));
            }
        }
        let remainder = Self::from_map(self.ctx, std::mem::take(&mut buckets[0]));
        Ok((Self::from_terms(self.ctx, quotient), remainder))
    }

    /// Exact division by a linear form; `NotDivisible` if the remainder is
    /// not identically zero.
    pub fn divide_by_linear(&self, coeffs: &[ExactScalar; COORDS]) -> Result<Polynomial> {
        let (q, r) = self.div_rem_linear(coeffs)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible(format!(
                "remainder {} modulo {}",
                r.summary(),
                Self::linear(self.ctx, coeffs)
            )))
        }
    }

    /// Exact polynomial division by iterated leading-term elimination.
    pub fn exact_divide(&self, divisor: &Polynomial) -> Result<Polynomial> {
        self.check_ctx(divisor)?;
        let (lm, lc) = divisor.leading_term().ok_or(Error::DivisionByZero)?.clone();
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.leading_term().cloned() {
            if !lm.divides(m) {
                return Err(Error::NotDivisible(format!(
                    "leading term {} not divisible by {}",
                    m.display(self.ctx),
                    lm.display(self.ctx)
                )));
            }
            let qm = lm.quotient_of(m);
            let qc = &c * &lc_inv;
            rem = rem.merge(&divisor.mul_term(qm, &qc), true);
            quotient.push((qm, qc));
        }
        Ok(Self::from_terms(self.ctx, quotient))
    }

    /// Swaps two coordinate variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        Self::from_terms(
            self.ctx,
            self.terms.iter().map(|(m, c)| {
                let (ei, ej) = (m.exponent(i), m.exponent(j));
                (m.with_exponent(i, ej).with_exponent(j, ei), c.clone())
            }),
        )
    }

    /// Short human-readable description for error messages.
    pub fn summary(&self) -> String {
        if self.len() <= 6 {
            self.to_string()
        } else {
            format!("<{} terms, leading {}>", self.len(), Self { ctx: self.ctx, terms: vec![self.terms[0].clone()] })
        }
    }

    /// Parses an expression in the variables of `ctx` built from rational
    /// numbers, `sqrt5`, `+ - * /` (division by constants only), `^` with
    /// non-negative integer exponents and parentheses. This accepts the
    /// canonical text form produced by `Display`.
    pub fn parse(text: &str, ctx: Context) -> Result<Polynomial> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, ctx };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input in {text:?}")));
        }
        Ok(out)
    }
}

/// Pivot for division by a linear form: prefer a variable whose coefficient
/// is ±1, otherwise the first nonzero one.
pub(crate) fn linear_pivot(coeffs: &[ExactScalar; COORDS]) -> Option<usize> {
    let unit = (0..COORDS).find(|&k| {
        let c = &coeffs[k];
        c.is_one() || (-c).is_one()
    });
    unit.or_else(|| (0..COORDS).find(|&k| !coeffs[k].is_zero()))
}

fn horner(
    terms: &[(Monomial, ExactScalar)],
    var: usize,
    images: &[Polynomial; COORDS],
    target: Context,
) -> Polynomial {
    if terms.is_empty() {
        return Polynomial::zero(target);
    }
    if var == COORDS {
        return Polynomial::from_terms(target, terms.iter().map(|(m, c)| (m.param_part(), c.clone())));
    }
    let mut groups: BTreeMap<u32, Vec<(Monomial, ExactScalar)>> = BTreeMap::new();
    for (m, c) in terms {
        groups.entry(m.exponent(var)).or_default().push((m.with_exponent(var, 0), c.clone()));
    }
    let top = *groups.keys().next_back().unwrap();
    let mut acc = horner(&groups[&top], var + 1, images, target);
    for e in (0..top).rev() {
        acc = acc.mul_unchecked(&images[var]);
        if let Some(g) = groups.get(&e) {
            acc = acc.merge(&horner(g, var + 1, images, target), false);
        }
    }
    acc
}

fn coefficient_text(c: &ExactScalar) -> (bool, String) {
    // (negative, magnitude text) for coefficients with a single part
    let s = c.to_string();
    if let Some(rest) = s.strip_prefix('-') {
        if !rest.contains('+') && !rest.contains('-') {
            return (true, rest.to_string());
        }
    }
    (false, s)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let mixed = !c.is_rational() && !c.rational_part().is_zero();
            let (neg, mag) = if mixed { (false, format!("({c})")) } else { coefficient_text(c) };
            let body = if *m == Monomial::ONE {
                mag
            } else if mag == "1" {
                m.display(self.ctx)
            } else {
                format!("{}*{}", mag, m.display(self.ctx))
            };
            match (idx, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.ctx, self)
    }
}

macro_rules! poly_op {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl<'a> $tr<&'a Polynomial> for &'a Polynomial {
            type Output = Polynomial;
            /// Panics on mismatched contexts; the `try_*` methods report it.
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                self.$inner(rhs).expect("polynomial context mismatch")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}
poly_op!(Add, add, try_add);
poly_op!(Sub, sub, try_sub);
poly_op!(Mul, mul, try_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { ctx: self.ctx, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(num_bigint::BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Token::Num(lit.parse().map_err(|_| Error::Parse(lit.clone()))?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    ctx: Context,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                -self.term()?
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.merge(&rhs, false) } else { acc.merge(&rhs, true) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if op == '*' {
                acc.mul_unchecked(&rhs)
            } else {
                let c = rhs
                    .constant_value()
                    .ok_or_else(|| Error::Parse("division by a non-constant".into()))?;
                acc.scale(&c.inv()?)
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(n)) => {
                    let e: u32 = n.to_string().parse().map_err(|_| Error::Parse("exponent".into()))?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("expected exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Token::Num(n)) => Ok(Polynomial::constant(self.ctx, ExactScalar::from_bigint(n))),
            Some(Token::Ident(name)) => {
                if name == "sqrt5" {
                    Ok(Polynomial::constant(self.ctx, ExactScalar::sqrt5()))
                } else if let Some(i) = self.ctx.var_index(&name) {
                    Ok(Polynomial::var(self.ctx, i))
                } else {
                    Err(Error::Parse(format!("unknown identifier {name:?} in {} context", self.ctx)))
                }
            }
            Some(Token::Op('(')) => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Op('-')) => Ok(-self.factor()?),
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(s: &str) -> Polynomial {
        Polynomial::parse(s, Context::Cartesian).unwrap()
    }

    #[test]
    fn square_of_a_sum() {
        assert_eq!(x("(x1+x2)^2"), x("x1^2 + 2*x1*x2 + x2^2"));
    }

    #[test]
    fn derivative_and_evaluation() {
        let r2 = x("x1^2+x2^2+x3^2+x4^2");
        assert_eq!(r2.derivative(0), x("2*x1"));
        let pt: Vec<ExactScalar> = (1..=4).map(ExactScalar::from_int).collect();
        assert_eq!(r2.evaluate(&pt).unwrap(), ExactScalar::from_int(30));
        assert!(x("nu*x1").evaluate(&pt).is_err());
    }

    #[test]
    fn linear_division() {
        let one = ExactScalar::one();
        let l = [one.clone(), -&one, ExactScalar::zero(), ExactScalar::zero()];
        assert_eq!(x("x1^2-x2^2").divide_by_linear(&l).unwrap(), x("x1+x2"));
        assert!(matches!(x("x1^2+x2^2").divide_by_linear(&l), Err(Error::NotDivisible(_))));
        // α·∇τ₁ / α·x = 2 for any α
        let alpha = [ExactScalar::phi_plus(), ExactScalar::from_int(-3), ExactScalar::sqrt5(), ExactScalar::one()];
        let t1 = x("x1^2+x2^2+x3^2+x4^2");
        let grad: Polynomial = (0..4)
            .map(|k| t1.derivative(k).scale(&alpha[k]))
            .fold(Polynomial::zero(Context::Cartesian), |a, b| a + b);
        assert_eq!(grad.divide_by_linear(&alpha).unwrap(), x("2"));
    }

    #[test]
    fn exact_division() {
        let d = x("x1 - x2");
        let sq = d.pow(2);
        assert_eq!(sq.exact_divide(&d).unwrap(), d);
        assert!(matches!(x("x1*x2").exact_divide(&x("x3")), Err(Error::NotDivisible(_))));
    }

    #[test]
    fn context_mismatch_is_reported() {
        let t = Polynomial::var(Context::Invariant, 0);
        assert!(matches!(x("x1").try_add(&t), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn canonical_text_roundtrip() {
        let p = x("(1/2+1/2*sqrt5)*x1^3 - 4*x2*nu + sqrt5*omega - 7/3");
        let s = p.to_string();
        assert_eq!(s, "(1/2+1/2*sqrt5)*x1^3 - 4*x2*nu + sqrt5*omega - 7/3");
        assert_eq!(x(&s), p);
    }

    #[test]
    fn substitution_by_horner() {
        let p = x("x1^2*x2 + 3*x3 - nu");
        let images = [x("x1+x2"), x("x2"), x("x4^2"), x("0")];
        assert_eq!(p.substitute(&images).unwrap(), x("(x1+x2)^2*x2 + 3*x4^2 - nu"));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn monomial_overflow_panics() {
        let m = Monomial::from_exponents(&[200]);
        let _ = m.mul(m);
    }

    fn arb_scalar() -> impl Strategy<Value = ExactScalar> {
        (-20i64..20, -20i64..20, 1i64..6).prop_map(|(a, b, d)| {
            ExactScalar::from_parts(a.into(), b.into(), d.into())
        })
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec((arb_scalar(), proptest::collection::vec(0u32..3, 6)), 0..6).prop_map(|ts| {
            Polynomial::from_terms(
                Context::Cartesian,
                ts.into_iter().map(|(c, e)| (Monomial::from_exponents(&e), c)),
            )
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), ExactScalar::one());
            }
        }

        #[test]
        fn ring_axioms_and_leibniz(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p * &q, &q * &p);
            for v in 0..NVARS {
                let lhs = (&p * &q).derivative(v);
                let rhs = &(&p.derivative(v) * &q) + &(&p * &q.derivative(v));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn linear_division_roundtrip(p in arb_poly(), c in proptest::collection::vec(arb_scalar(), 4)) {
            let coeffs: [ExactScalar; 4] = [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()];
            prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
            let prod = p.mul_linear(&coeffs);
            prop_assert_eq!(prod.divide_by_linear(&coeffs).unwrap(), p.clone());
            let (q, r) = p.div_rem_linear(&coeffs).unwrap();
            prop_assert_eq!(&q.mul_linear(&coeffs) + &r, p);
        }

        #[test]
        fn text_roundtrip(p in arb_poly()) {
            prop_assert_eq!(Polynomial::parse(&p.to_string(), Context::Cartesian).unwrap(), p);
        }
    }
}
