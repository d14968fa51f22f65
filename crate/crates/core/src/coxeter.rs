//! The H4 root system, its Coxeter group of order 14400 and weight orbits.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Context, Polynomial, COORDS};
use crate::scalar::ExactScalar;

pub type Vector4 = [ExactScalar; COORDS];

/// `ℓ(x) = c·x`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearForm(pub Vector4);

impl LinearForm {
    pub fn new(c: Vector4) -> Self {
        Self(c)
    }

    pub fn coordinate(k: usize) -> Self {
        Self(std::array::from_fn(|i| if i == k { ExactScalar::one() } else { ExactScalar::zero() }))
    }

    pub fn coeffs(&self) -> &Vector4 {
        &self.0
    }

    pub fn dot(&self, v: &Vector4) -> ExactScalar {
        dot(&self.0, v)
    }

    pub fn norm2(&self) -> ExactScalar {
        dot(&self.0, &self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(ExactScalar::is_zero)
    }

    pub fn neg(&self) -> Self {
        Self(std::array::from_fn(|i| -&self.0[i]))
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::linear(Context::Cartesian, &self.0)
    }

    /// Representative of the line through this form: scaled so that the
    /// first nonzero coefficient is 1.
    pub fn line_key(&self) -> Vector4 {
        let lead = self.0.iter().find(|c| !c.is_zero()).expect("zero linear form");
        let inv = lead.inv().expect("nonzero");
        std::array::from_fn(|i| &self.0[i] * &inv)
    }

    pub fn is_proportional(&self, other: &LinearForm) -> bool {
        (0..COORDS).all(|i| (0..COORDS).all(|j| &self.0[i] * &other.0[j] == &self.0[j] * &other.0[i]))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_polynomial())
    }
}

pub fn dot(a: &Vector4, b: &Vector4) -> ExactScalar {
    let mut acc = ExactScalar::zero();
    for i in 0..COORDS {
        if !a[i].is_zero() && !b[i].is_zero() {
            acc += &(&a[i] * &b[i]);
        }
    }
    acc
}

/// A 4×4 matrix over Q(√5), row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement(pub [[ExactScalar; COORDS]; COORDS]);

impl GroupElement {
    pub fn identity() -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { ExactScalar::one() } else { ExactScalar::zero() })
        }))
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = ExactScalar::zero();
                for k in 0..COORDS {
                    if !self.0[i][k].is_zero() && !other.0[k][j].is_zero() {
                        acc += &(&self.0[i][k] * &other.0[k][j]);
                    }
                }
                acc
            })
        }))
    }

    pub fn apply(&self, v: &Vector4) -> Vector4 {
        std::array::from_fn(|i| dot(&self.0[i], v))
    }

    pub fn transpose(&self) -> GroupElement {
        GroupElement(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i].clone())))
    }

    pub fn is_orthogonal(&self) -> bool {
        self.transpose().mul(self) == Self::identity()
    }

    pub fn determinant(&self) -> ExactScalar {
        let m = &self.0;
        let mut det = ExactScalar::zero();
        // Leibniz expansion over the 24 permutations
        for (p, sign) in signed_permutations() {
            let mut t = ExactScalar::from_int(sign);
            for (i, &j) in p.iter().enumerate() {
                t = &t * &m[i][j];
                if t.is_zero() {
                    break;
                }
            }
            det += &t;
        }
        det
    }

    /// The images `(Mx)_i` as linear polynomials, for composing `p∘M`.
    pub fn coordinate_images(&self) -> [Polynomial; COORDS] {
        std::array::from_fn(|i| Polynomial::linear(Context::Cartesian, &self.0[i]))
    }

    /// `p(Mx)`.
    pub fn compose(&self, p: &Polynomial) -> Result<Polynomial> {
        p.substitute(&self.coordinate_images())
    }

    /// Canonical serialization: rows separated by `;`, entries by `,`.
    pub fn canonical_text(&self) -> String {
        self.0
            .iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn from_canonical_text(text: &str) -> Result<Self> {
        let rows: Vec<[ExactScalar; COORDS]> = text
            .trim()
            .split(';')
            .map(|r| {
                let v: Vec<ExactScalar> = r.split(',').map(|c| c.trim().parse()).collect::<Result<_>>()?;
                v.try_into().map_err(|_| Error::Parse(format!("matrix row {r:?} needs four entries")))
            })
            .collect::<Result<_>>()?;
        let m: [[ExactScalar; COORDS]; COORDS] =
            rows.try_into().map_err(|_| Error::Parse(format!("matrix {text:?} needs four rows")))?;
        Ok(Self(m))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.canonical_text())
    }
}

pub(crate) fn signed_permutations() -> Vec<([usize; COORDS], i64)> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        let mut inv = 0;
                        for i in 0..4 {
                            for j in i + 1..4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                            }
                        }
                        out.push((p, if inv % 2 == 0 { 1 } else { -1 }));
                    }
                }
            }
        }
    }
    out
}

/// `s_α(x) = x − 2(α·x)/(α·α) α`.
pub fn reflection(alpha: &LinearForm) -> GroupElement {
    let n2 = alpha.norm2().inv().expect("reflection in a zero form");
    let two = ExactScalar::from_int(2);
    let a = &alpha.0;
    GroupElement(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let d = if i == j { ExactScalar::one() } else { ExactScalar::zero() };
            &d - &(&(&two * &(&a[i] * &a[j])) * &n2)
        })
    }))
}

/// The 24 even permutations of four symbols, as 0-based index tuples, in
/// lexicographic order (12 of them).
pub fn even_permutations() -> Vec<[usize; COORDS]> {
    signed_permutations().into_iter().filter(|(_, s)| *s == 1).map(|(p, _)| p).collect()
}

/// The 60 linear factors of Δ₁Δ₂Δ₃ in printed order: `x_k`, then
/// `x₁ ± x₂ ± x₃ ± x₄`, then `x_i ± φ₊x_j ± φ₋x_k` over the even
/// permutations `(i,j,k,l)`.
pub fn delta_factor_forms() -> Vec<LinearForm> {
    let one = ExactScalar::one();
    let mut out: Vec<LinearForm> = (0..COORDS).map(LinearForm::coordinate).collect();
    for mu in 0..8u32 {
        let s = |bit: u32| if mu >> bit & 1 == 1 { -&one } else { one.clone() };
        out.push(LinearForm([one.clone(), s(0), s(1), s(2)]));
    }
    let (pp, pm) = (ExactScalar::phi_plus(), ExactScalar::phi_minus());
    for p in even_permutations() {
        for mu in 0..4u32 {
            let mut c: Vector4 = std::array::from_fn(|_| ExactScalar::zero());
            c[p[0]] = one.clone();
            c[p[1]] = if mu & 1 == 1 { -&pp } else { pp.clone() };
            c[p[2]] = if mu & 2 == 2 { -&pm } else { pm.clone() };
            out.push(LinearForm(c));
        }
    }
    out
}

/// The three Δ-products of the ground state prefactor, built from the
/// printed factors.
pub fn delta_products() -> [Polynomial; 3] {
    let forms = delta_factor_forms();
    let prod = |r: std::ops::Range<usize>| {
        forms[r].iter().fold(Polynomial::one(Context::Cartesian), |acc, f| acc.mul_linear(&f.0))
    };
    [prod(0..4), prod(4..12), prod(12..60)]
}

/// Reference orbit weights `w₁..w₄` and their expected orbit lengths.
pub fn paper_weights() -> [(Vector4, usize); 4] {
    let p = ExactScalar::phi_plus();
    let z = ExactScalar::zero;
    let one = ExactScalar::one;
    let two = ExactScalar::from_int(2);
    [
        ([z(), z(), z(), &two * &p], 120),
        ([one(), p.pow(2), z(), p.pow(4)], 600),
        ([z(), p.clone(), one(), &p.pow(4) - &one()], 720),
        ([z(), &two * &p, z(), &two * &p.pow(3)], 1200),
    ]
}

/// The H4 root system recovered from the Δ-factors.
#[derive(Clone, Debug)]
pub struct RootSystem {
    /// the 60 forms in printed order
    pub roots: Vec<LinearForm>,
    /// roots sign-normalized to be positive on a generic vector
    pub positive: Vec<LinearForm>,
    /// indices into `positive`
    pub simple: Vec<usize>,
    lines: HashMap<Vector4, usize>,
}

impl RootSystem {
    /// Builds the system from the printed factors and validates it.
    pub fn h4() -> Result<Self> {
        Self::from_forms(delta_factor_forms())
    }

    /// Validates an arbitrary list of forms: pairwise non-proportional,
    /// closed under all reflections, with four simple roots forming a
    /// 5-3-3 Coxeter chain.
    pub fn from_forms(roots: Vec<LinearForm>) -> Result<Self> {
        let mut lines = HashMap::new();
        for (i, r) in roots.iter().enumerate() {
            if r.is_zero() {
                return Err(Error::InvalidParameter(format!("zero root at index {i}")));
            }
            if let Some(j) = lines.insert(r.line_key(), i) {
                return Err(Error::InvalidParameter(format!("roots {j} and {i} are proportional")));
            }
        }
        let mut sys = RootSystem { roots, positive: Vec::new(), simple: Vec::new(), lines };
        sys.check_reflection_closure()?;
        sys.positive = sys.sign_normalized();
        sys.simple = sys.find_simple()?;
        sys.check_coxeter_chain()?;
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Index of the root proportional to `v`, if any.
    pub fn find_line(&self, v: &LinearForm) -> Option<usize> {
        if v.is_zero() {
            return None;
        }
        self.lines.get(&v.line_key()).copied()
    }

    fn check_reflection_closure(&self) -> Result<()> {
        for (a, alpha) in self.roots.iter().enumerate() {
            let s = reflection(alpha);
            for beta in &self.roots {
                let img = LinearForm(s.apply(&beta.0));
                if self.find_line(&img).is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "reflection in root {a} ({alpha}) maps {beta} outside the root set"
                    )));
                }
            }
        }
        Ok(())
    }

    fn generic_vector() -> Vector4 {
        [1, 10, 100, 1000].map(ExactScalar::from_int)
    }

    fn sign_normalized(&self) -> Vec<LinearForm> {
        let v = Self::generic_vector();
        self.roots
            .iter()
            .map(|r| {
                let s = r.dot(&v).signum();
                assert!(s != 0, "generic vector lies on a mirror");
                if s > 0 { r.clone() } else { r.neg() }
            })
            .collect()
    }

    fn is_positive(v: &Vector4) -> bool {
        dot(v, &Self::generic_vector()).signum() > 0
    }

    /// A positive root is simple iff its reflection makes no other positive
    /// root negative.
    fn find_simple(&self) -> Result<Vec<usize>> {
        let mut simple = Vec::new();
        for (i, alpha) in self.positive.iter().enumerate() {
            let s = reflection(alpha);
            let ok = self
                .positive
                .iter()
                .enumerate()
                .all(|(j, beta)| j == i || Self::is_positive(&s.apply(&beta.0)));
            if ok {
                simple.push(i);
            }
        }
        if simple.len() != COORDS {
            return Err(Error::InvalidParameter(format!("found {} simple roots, expected 4", simple.len())));
        }
        Ok(simple)
    }

    pub fn simple_reflections(&self) -> Vec<GroupElement> {
        self.simple.iter().map(|&i| reflection(&self.positive[i])).collect()
    }

    pub fn reflections(&self) -> Vec<GroupElement> {
        self.roots.iter().map(reflection).collect()
    }

    /// Orders `m_ij` of `s_i s_j` for the simple reflections.
    pub fn coxeter_matrix(&self) -> [[u32; COORDS]; COORDS] {
        let s = self.simple_reflections();
        let id = GroupElement::identity();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let g = s[i].mul(&s[j]);
                let mut acc = g.clone();
                let mut k = 1;
                while acc != id && k < 64 {
                    acc = acc.mul(&g);
                    k += 1;
                }
                k
            })
        })
    }

    fn check_coxeter_chain(&self) -> Result<()> {
        let m = self.coxeter_matrix();
        let mut edges: Vec<(usize, usize, u32)> = Vec::new();
        for i in 0..COORDS {
            for j in i + 1..COORDS {
                if m[i][j] > 2 {
                    edges.push((i, j, m[i][j]));
                }
            }
        }
        let mut labels: Vec<u32> = edges.iter().map(|e| e.2).collect();
        labels.sort_unstable();
        let mut degree = [0; COORDS];
        for &(i, j, _) in &edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        // a path: three edges, two endpoints of degree 1, the 5-edge at an end
        let is_path = edges.len() == 3 && degree.iter().filter(|&&d| d == 1).count() == 2;
        let five_at_end = edges.iter().any(|&(i, j, l)| l == 5 && (degree[i] == 1 || degree[j] == 1));
        if labels == [3, 3, 5] && is_path && five_at_end {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("simple reflections have Coxeter matrix {m:?}")))
        }
    }

    /// Number of roots orthogonal to `v`, i.e. the number of positive roots
    /// of its stabilizer.
    pub fn orthogonal_root_count(&self, v: &Vector4) -> usize {
        self.roots.iter().filter(|r| r.dot(v).is_zero()).count()
    }
}

/// Breadth-first closure of `generators` under multiplication, starting from
/// the identity. Elements are returned in discovery order.
pub fn generate_group(generators: &[GroupElement], bound: usize) -> Result<Vec<GroupElement>> {
    let id = GroupElement::identity();
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut order = vec![id.clone()];
    seen.insert(id);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for g in generators {
            let h = order[k].mul(g);
            if !seen.contains(&h) {
                if order.len() >= bound {
                    return Err(Error::GroupOverflow(bound));
                }
                seen.insert(h.clone());
                queue.push_back(order.len());
                order.push(h);
            }
        }
    }
    Ok(order)
}

/// Distinct images `g·v`, in the group's order.
pub fn orbit(v: &Vector4, group: &[GroupElement]) -> Vec<Vector4> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in group {
        let w = g.apply(v);
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// True iff `p∘g = p` for every given matrix (the reflections suffice).
pub fn verify_invariance(p: &Polynomial, elements: &[GroupElement]) -> Result<bool> {
    for g in elements {
        if g.compose(p)? != *p {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The group together with the root system that generated it.
#[derive(Clone, Debug)]
pub struct CoxeterGroup {
    pub roots: RootSystem,
    pub elements: Vec<GroupElement>,
}

impl CoxeterGroup {
    pub const SAFETY_BOUND: usize = 20_000;

    pub fn h4() -> Result<Self> {
        let roots = RootSystem::h4()?;
        Self::from_roots(roots)
    }

    pub fn from_roots(roots: RootSystem) -> Result<Self> {
        let elements = generate_group(&roots.simple_reflections(), Self::SAFETY_BOUND)?;
        Ok(Self { roots, elements })
    }

    /// Reassembles a previously generated group, checking that every
    /// element is orthogonal, every simple reflection is present and that
    /// a sample of products stays in the set.
    pub fn from_elements(roots: RootSystem, elements: Vec<GroupElement>) -> Result<Self> {
        let set: HashSet<&GroupElement> = elements.iter().collect();
        if set.len() != elements.len() {
            return Err(Error::InvalidParameter("repeated group element".into()));
        }
        if let Some(k) = elements.iter().position(|g| !g.is_orthogonal()) {
            return Err(Error::InvalidParameter(format!("element {k} is not orthogonal")));
        }
        let simple = roots.simple_reflections();
        if simple.iter().any(|s| !set.contains(s)) {
            return Err(Error::InvalidParameter("a simple reflection is missing".into()));
        }
        // closed under right multiplication by generators, so it holds the whole group
        for (k, g) in elements.iter().enumerate() {
            if let Some(s) = simple.iter().find(|s| !set.contains(&g.mul(s))) {
                return Err(Error::InvalidParameter(format!("element {k} times {} is missing", s.canonical_text())));
            }
        }
        drop(set);
        Ok(Self { roots, elements })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn orbit(&self, v: &Vector4) -> Vec<Vector4> {
        orbit(v, &self.elements)
    }

    /// Whether every reflection in a root belongs to the generated set.
    pub fn contains_all_reflections(&self) -> bool {
        let set: HashSet<&GroupElement> = self.elements.iter().collect();
        self.roots.reflections().iter().all(|r| set.contains(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn group() -> &'static CoxeterGroup {
        static G: OnceLock<CoxeterGroup> = OnceLock::new();
        G.get_or_init(|| CoxeterGroup::h4().unwrap())
    }

    #[test]
    fn reflection_basics() {
        let e1 = LinearForm::coordinate(0);
        let s = reflection(&e1);
        let v = [1, 2, 3, 4].map(ExactScalar::from_int);
        assert_eq!(s.apply(&v), [-1, 2, 3, 4].map(ExactScalar::from_int));
        let alpha = &delta_factor_forms()[20];
        let r = reflection(alpha);
        assert_eq!(r.mul(&r), GroupElement::identity());
        assert_eq!(r.apply(&alpha.0), alpha.neg().0);
        assert!(r.is_orthogonal());
        assert_eq!(r.determinant(), ExactScalar::from_int(-1));
    }

    #[test]
    fn closure_of_one_reflection() {
        let g = generate_group(&[reflection(&LinearForm::coordinate(0))], 10).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn root_system_structure() {
        let rs = &group().roots;
        assert_eq!(rs.len(), 60);
        let norms: Vec<i64> = rs.roots.iter().map(|r| r.norm2().to_i64().unwrap()).collect();
        assert!(norms[..4].iter().all(|&n| n == 1));
        assert!(norms[4..].iter().all(|&n| n == 4));
    }

    #[test]
    fn corrupted_root_is_rejected() {
        let mut forms = delta_factor_forms();
        forms[30].0[1] = ExactScalar::from_int(2);
        assert!(RootSystem::from_forms(forms).is_err());
    }

    #[test]
    fn group_order_and_orbits() {
        let g = group();
        assert_eq!(g.order(), 14400);
        assert!(g.contains_all_reflections());
        for (w, len) in paper_weights() {
            assert_eq!(g.orbit(&w).len(), len);
        }
        let zero: Vector4 = std::array::from_fn(|_| ExactScalar::zero());
        assert_eq!(g.orbit(&zero).len(), 1);
    }

    #[test]
    fn weight_stabilizers() {
        let rs = &group().roots;
        let counts: Vec<usize> = paper_weights().iter().map(|(w, _)| rs.orthogonal_root_count(w)).collect();
        assert_eq!(counts, vec![15, 6, 6, 4]);
    }

    #[test]
    fn sampled_products_stay_in_group() {
        let g = group();
        let set: HashSet<&GroupElement> = g.elements.iter().collect();
        for k in 0..50 {
            let a = &g.elements[(k * 7919) % g.order()];
            let b = &g.elements[(k * 104_729 + 13) % g.order()];
            let ab = a.mul(b);
            assert!(set.contains(&ab));
            assert!(ab.is_orthogonal());
        }
    }

    #[test]
    fn every_element_permutes_the_root_lines() {
        let g = group();
        for e in g.elements.iter().step_by(97) {
            let d = e.determinant();
            assert!(d.is_one() || (-&d).is_one());
            for r in &g.roots.roots {
                assert!(g.roots.find_line(&LinearForm(e.apply(&r.0))).is_some());
            }
        }
    }

    #[test]
    fn invariance_checks() {
        let refl = group().roots.reflections();
        let r2 = Polynomial::parse("x1^2+x2^2+x3^2+x4^2", Context::Cartesian).unwrap();
        assert!(verify_invariance(&r2, &refl).unwrap());
        let x1 = Polynomial::var(Context::Cartesian, 0);
        assert!(!verify_invariance(&x1, &refl).unwrap());
    }

    #[test]
    fn product_of_roots_is_anti_invariant() {
        let forms = delta_factor_forms();
        let prod_at = |v: &Vector4| forms.iter().map(|f| f.dot(v)).product::<ExactScalar>();
        let pts: Vec<Vector4> = vec![[3, -1, 4, 1].map(ExactScalar::from_int), [2, 7, -1, 8].map(ExactScalar::from_int)];
        for alpha in forms.iter().step_by(7) {
            let s = reflection(alpha);
            for p in &pts {
                assert_eq!(prod_at(&s.apply(p)), -prod_at(p));
            }
        }
    }

    #[test]
    fn element_text_roundtrip_and_reassembly() {
        let g = group();
        let texts: Vec<String> = g.elements.iter().map(|e| e.canonical_text()).collect();
        let back: Vec<GroupElement> = texts.iter().map(|t| GroupElement::from_canonical_text(t).unwrap()).collect();
        assert_eq!(back, g.elements);
        let again = CoxeterGroup::from_elements(g.roots.clone(), back.clone()).unwrap();
        assert_eq!(again.order(), 14400);
        let mut broken = back;
        broken.truncate(14000);
        assert!(CoxeterGroup::from_elements(g.roots.clone(), broken).is_err());
        assert!(GroupElement::from_canonical_text("1,0;0,1").is_err());
    }
}
