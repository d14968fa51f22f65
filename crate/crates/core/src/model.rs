//! The Cartesian model, its gauge rotation by the ground state and the
//! pushforward of the rotated operators to invariant coordinates.

use crate::coxeter::{delta_factor_forms, LinearForm, Vector4};
use crate::error::{Error, Result};
use crate::invariants::{invariantize, TauMap};
use crate::operator::DiffOperator;
use crate::poly::{Context, Polynomial, COORDS, NU, OMEGA};
use crate::rootrational::RootRational;
use crate::scalar::ExactScalar;

type Row = [Polynomial; COORDS];

fn zero() -> Polynomial {
    Polynomial::zero(Context::Cartesian)
}

fn int(n: i64) -> Polynomial {
    Polynomial::from_int(Context::Cartesian, n)
}

fn x(i: usize) -> Polynomial {
    Polynomial::var(Context::Cartesian, i)
}

fn r2() -> Polynomial {
    (0..COORDS).fold(zero(), |acc, i| acc + x(i).pow(2))
}

/// Coupling ν, frequency ω and the root forms, one per reflection line.
/// `nu` and `omega` are Cartesian polynomials free of x: either numbers or
/// the symbols `nu`, `omega`.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub roots: Vec<LinearForm>,
    pub nu: Polynomial,
    pub omega: Polynomial,
}

impl ModelSpec {
    /// H4 with symbolic ν and ω.
    pub fn h4() -> Self {
        Self::with_roots(
            delta_factor_forms(),
            Polynomial::var(Context::Cartesian, NU),
            Polynomial::var(Context::Cartesian, OMEGA),
        )
    }

    pub fn with_roots(roots: Vec<LinearForm>, nu: Polynomial, omega: Polynomial) -> Self {
        Self { roots, nu, omega }
    }

    /// `g = ν(ν−1)`.
    pub fn coupling(&self) -> Polynomial {
        &self.nu * &(&self.nu - &int(1))
    }

    /// `E₀ = ω(2 + Nν)` for N roots.
    pub fn ground_energy(&self) -> Polynomial {
        &self.omega * &(&int(2) + &self.nu.scale(&ExactScalar::from_int(self.roots.len() as i64)))
    }

    /// `γ₀ = Nν(1 + Nν/2)`, the ground state eigenvalue of the integral.
    pub fn integral_ground_value(&self) -> Polynomial {
        let n = ExactScalar::from_int(self.roots.len() as i64);
        let nn = self.nu.scale(&n);
        &nn + &(&nn * &nn).scale(&ExactScalar::from_ratio(1, 2))
    }
}

/// `Σ_{i,j} A_ij ∂ᵢ∂ⱼ + Σ bᵢ∂ᵢ + Σ_α c_α/(α·x)² + V` with symmetric `A`.
#[derive(Clone, Debug)]
pub struct CartesianOperator {
    pub second: [Row; COORDS],
    pub first: Row,
    /// `c_α` per root index
    pub inverse_square: Vec<Polynomial>,
    pub free: Polynomial,
}

impl CartesianOperator {
    /// `−2(H − E₀)` with `H = −½Δ + (g/2)Σ|α|²/(α·x)² + ½ω²r²`.
    pub fn hamiltonian(spec: &ModelSpec) -> Self {
        let g = spec.coupling();
        Self {
            second: std::array::from_fn(|i| std::array::from_fn(|j| if i == j { int(1) } else { zero() })),
            first: std::array::from_fn(|_| zero()),
            inverse_square: spec.roots.iter().map(|a| g.scale(&-a.norm2())).collect(),
            free: &spec.ground_energy().scale(&ExactScalar::from_int(2)) - &(&spec.omega * &spec.omega * r2()),
        }
    }

    /// `F = −½Σ_{i<j}J_ij² + r²(g/2)Σ|α|²/(α·x)²` with `J_ij = xᵢ∂ⱼ − xⱼ∂ᵢ`.
    pub fn integral(spec: &ModelSpec) -> Self {
        let half = ExactScalar::from_ratio(1, 2);
        let g = spec.coupling();
        let r = r2();
        Self {
            second: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let p = (&x(i) * &x(j)).scale(&half);
                    if i == j { &p - &r.scale(&half) } else { p }
                })
            }),
            first: std::array::from_fn(|i| x(i).scale(&ExactScalar::from_ratio(3, 2))),
            inverse_square: spec.roots.iter().map(|a| (&g * &r).scale(&(&a.norm2() * &half))).collect(),
            free: zero(),
        }
    }
}

/// `Ψ⁻¹ O Ψ` for `Ψ = Π|α·x|^ν e^{−ωr²/2}`. The first-order part keeps a
/// polynomial piece and, per root, a numerator vector over `α·x` reduced
/// modulo `α·x`.
#[derive(Clone, Debug)]
pub struct GaugeOperator {
    pub second: [Row; COORDS],
    pub first: Row,
    pub root_first: Vec<Row>,
    pub free: Polynomial,
    roots: Vec<LinearForm>,
}

/// Conjugates `op` by the ground state of `spec`.
pub fn gauge_rotate(op: &CartesianOperator, spec: &ModelSpec) -> Result<GaugeOperator> {
    if op.inverse_square.len() != spec.roots.len() {
        return Err(Error::InvalidParameter("one inverse-square coefficient per root expected".into()));
    }
    let (nu, om) = (&spec.nu, &spec.omega);
    let a = &op.second;
    let xs: Vec<Polynomial> = (0..COORDS).map(x).collect();
    let ax: Row = std::array::from_fn(|i| (0..COORDS).fold(zero(), |acc, j| acc + &a[i][j] * &xs[j]));
    let mut first: Row = std::array::from_fn(|i| &op.first[i] - &(om * &ax[i]).scale(&ExactScalar::from_int(2)));
    let mut root_first = Vec::with_capacity(spec.roots.len());
    let mut free = RootRational::new();
    let a_alpha: Vec<Row> = spec
        .roots
        .iter()
        .map(|r| std::array::from_fn(|i| (0..COORDS).fold(zero(), |acc, j| acc + a[i][j].scale(&r.0[j]))))
        .collect();
    for (k, r) in spec.roots.iter().enumerate() {
        let mut row: Row = std::array::from_fn(|_| zero());
        for i in 0..COORDS {
            let n = (nu * &a_alpha[k][i]).scale(&ExactScalar::from_int(2));
            let (q, rem) = n.div_rem_linear(&r.0)?;
            first[i] = &first[i] + &q;
            row[i] = rem;
        }
        root_first.push(row);
        let q_alpha = (0..COORDS).fold(zero(), |acc, i| acc + a_alpha[k][i].scale(&r.0[i]));
        let nn = nu * &(nu - &int(1));
        free.add_single(k, 2, &(&nn * &q_alpha) + &op.inverse_square[k]);
        let ax_alpha = (0..COORDS).fold(zero(), |acc, i| acc + &a_alpha[k][i] * &xs[i]);
        let b_alpha = (0..COORDS).fold(zero(), |acc, i| acc + op.first[i].scale(&r.0[i]));
        free.add_single(k, 1, &(nu * &b_alpha) - &(&(nu * om) * &ax_alpha).scale(&ExactScalar::from_int(2)));
        for (l, s) in spec.roots.iter().enumerate().skip(k + 1) {
            let cross = (0..COORDS).fold(zero(), |acc, i| acc + a_alpha[k][i].scale(&s.0[i]));
            if !cross.is_zero() {
                free.add_pair(k, l, (&(nu * nu) * &cross).scale(&ExactScalar::from_int(2)));
            }
        }
    }
    let trace = (0..COORDS).fold(zero(), |acc, i| acc + &a[i][i]);
    let xax = (0..COORDS).fold(zero(), |acc, i| acc + &ax[i] * &xs[i]);
    let bx = (0..COORDS).fold(zero(), |acc, i| acc + &op.first[i] * &xs[i]);
    free.add_poly(&(&(&(&(om * om) * &xax) - &(om * &trace)) - &(om * &bx)) + &op.free);
    Ok(GaugeOperator {
        second: op.second.clone(),
        first,
        root_first,
        free: free.into_polynomial(&spec.roots)?,
        roots: spec.roots.clone(),
    })
}

impl GaugeOperator {
    /// The operator without its free term applied to `p`; the root terms
    /// are exact divisions, so `p` must be invariant enough for them.
    pub fn apply_derivatives(&self, p: &Polynomial) -> Result<Polynomial> {
        let d: Vec<Polynomial> = (0..COORDS).map(|i| p.derivative(i)).collect();
        let mut acc = zero();
        for i in 0..COORDS {
            if d[i].is_zero() {
                continue;
            }
            for j in i..COORDS {
                let c = &self.second[i][j];
                if c.is_zero() {
                    continue;
                }
                let dd = d[i].derivative(j);
                acc = acc + if i == j { c * &dd } else { (c * &dd).scale(&ExactScalar::from_int(2)) };
            }
            acc = acc + &self.first[i] * &d[i];
        }
        for (row, r) in self.root_first.iter().zip(&self.roots) {
            let num = (0..COORDS).filter(|&i| !row[i].is_zero()).fold(zero(), |acc, i| acc + &row[i] * &d[i]);
            if !num.is_zero() {
                acc = acc + num.divide_by_linear(&r.0)?;
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        Ok(self.apply_derivatives(p)? + &self.free * p)
    }

    /// The operator applied to a function with 2-jet `jet` at `point`
    /// (coordinates, ν, ω); the point must lie off every mirror.
    pub fn apply_at(&self, point: &[ExactScalar], jet: &Jet) -> Result<ExactScalar> {
        let mut acc = &self.free.evaluate(point)? * &jet.value;
        for i in 0..COORDS {
            for j in 0..COORDS {
                acc += &(&self.second[i][j].evaluate(point)? * &jet.hess[i][j]);
            }
            acc += &(&self.first[i].evaluate(point)? * &jet.grad[i]);
        }
        let x: Vector4 = std::array::from_fn(|i| point[i].clone());
        for (row, r) in self.root_first.iter().zip(&self.roots) {
            let mut num = ExactScalar::zero();
            for i in 0..COORDS {
                num += &(&row[i].evaluate(point)? * &jet.grad[i]);
            }
            if !num.is_zero() {
                acc += &num.checked_div(&r.dot(&x))?;
            }
        }
        Ok(acc)
    }

    /// Subtracts a constant from the free term.
    pub fn shifted(mut self, c: &Polynomial) -> Self {
        self.free = &self.free - c;
        self
    }
}

/// Value, gradient and Hessian of a function at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: ExactScalar,
    pub grad: [ExactScalar; COORDS],
    pub hess: [[ExactScalar; COORDS]; COORDS],
}

impl Jet {
    /// The 2-jet of a Cartesian polynomial at `point`, given as the four
    /// coordinates followed by ν and ω.
    pub fn of(p: &Polynomial, point: &[ExactScalar]) -> Result<Self> {
        let d: Vec<Polynomial> = (0..COORDS).map(|i| p.derivative(i)).collect();
        let mut hess: [[ExactScalar; COORDS]; COORDS] = Default::default();
        for i in 0..COORDS {
            for j in i..COORDS {
                let v = d[i].derivative(j).evaluate(point)?;
                hess[j][i] = v.clone();
                hess[i][j] = v;
            }
        }
        let grad = d.iter().map(|q| q.evaluate(point)).collect::<Result<Vec<_>>>()?;
        Ok(Self { value: p.evaluate(point)?, grad: grad.try_into().expect("four"), hess })
    }

    /// The 2-jet of `q∘τ` from the jets of τ₁..τ₄, with `q` a τ-polynomial
    /// and `params = [ν, ω]`.
    pub fn compose(q: &Polynomial, tau: &[Jet; 4], params: &[ExactScalar; 2]) -> Result<Self> {
        let at: Vec<ExactScalar> = tau.iter().map(|j| j.value.clone()).chain(params.iter().cloned()).collect();
        let dq: Vec<Polynomial> = (0..4).map(|a| q.derivative(a)).collect();
        let qa = dq.iter().map(|p| p.evaluate(&at)).collect::<Result<Vec<_>>>()?;
        let mut qab = vec![vec![ExactScalar::zero(); 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                qab[a][b] = dq[a].derivative(b).evaluate(&at)?;
            }
        }
        let grad: [ExactScalar; COORDS] = std::array::from_fn(|i| (0..4).map(|a| &qa[a] * &tau[a].grad[i]).sum());
        let hess = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut v: ExactScalar = (0..4).map(|a| &qa[a] * &tau[a].hess[i][j]).sum();
                for a in 0..4 {
                    for b in 0..4 {
                        v += &(&qab[a][b] * &(&tau[a].grad[i] * &tau[b].grad[j]));
                    }
                }
                v
            })
        });
        Ok(Self { value: q.evaluate(&at)?, grad, hess })
    }
}

/// The gauge-rotated Hamiltonian `h`; its free term must vanish.
pub fn rotated_hamiltonian(spec: &ModelSpec) -> Result<GaugeOperator> {
    let h = gauge_rotate(&CartesianOperator::hamiltonian(spec), spec)?;
    if !h.free.is_zero() {
        return Err(Error::NonzeroFreeTerm(h.free.summary()));
    }
    Ok(h)
}

/// The gauge-rotated integral `f = Ψ⁻¹FΨ − γ₀` together with `γ₀`.
pub fn rotated_integral(spec: &ModelSpec) -> Result<(GaugeOperator, Polynomial)> {
    let f = gauge_rotate(&CartesianOperator::integral(spec), spec)?;
    if !f.free.is_coord_free() {
        return Err(Error::FNotEigen(format!("free term {} depends on x", f.free.summary())));
    }
    let gamma0 = f.free.clone();
    if gamma0 != spec.integral_ground_value() {
        return Err(Error::FNotEigen(format!("ground value {gamma0}, expected {}", spec.integral_ground_value())));
    }
    Ok((f.shifted(&gamma0), gamma0))
}

/// The operator in τ coordinates: `B_a = O(τ_a)` and
/// `A_ab = ½(O(τ_aτ_b) − τ_a O(τ_b) − τ_b O(τ_a))`, each rewritten in τ.
pub fn pushforward(op: &GaugeOperator, tau: &TauMap) -> Result<DiffOperator> {
    let t = &tau.tau;
    let b: Vec<Polynomial> = t.iter().map(|ta| op.apply_derivatives(ta)).collect::<Result<_>>()?;
    let half = ExactScalar::from_ratio(1, 2);
    let mut a: [Row; COORDS] = std::array::from_fn(|_| std::array::from_fn(|_| Polynomial::zero(Context::Invariant)));
    for i in 0..COORDS {
        for j in i..COORDS {
            let prod = op.apply_derivatives(&(&t[i] * &t[j]))?;
            let c = (&(&prod - &(&t[i] * &b[j])) - &(&t[j] * &b[i])).scale(&half);
            let inv = invariantize(&c, tau)?;
            a[i][j] = inv.clone();
            a[j][i] = inv;
        }
    }
    let bt: Row = b.iter().map(|p| invariantize(p, tau)).collect::<Result<Vec<_>>>()?.try_into().expect("four");
    let op_t = DiffOperator::second_order(&a, &bt)?;
    let free = invariantize(&op.free, tau)?;
    op_t.try_add(&DiffOperator::multiplication(free))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(v: &[[i64; 4]]) -> Vec<LinearForm> {
        v.iter().map(|r| LinearForm::new(r.map(ExactScalar::from_int))).collect()
    }

    fn sym(name: usize) -> Polynomial {
        Polynomial::var(Context::Cartesian, name)
    }

    #[test]
    fn coordinate_hyperplanes_have_no_free_term() {
        let spec = ModelSpec::with_roots(forms(&[[1, 0, 0, 0], [0, 1, 0, 0]]), sym(NU), sym(OMEGA));
        let h = rotated_hamiltonian(&spec).unwrap();
        // h(x₁²) = 2 + 4ν − 4ωx₁²
        let p = Polynomial::parse("x1^2", Context::Cartesian).unwrap();
        assert_eq!(h.apply(&p).unwrap(), Polynomial::parse("2 + 4*nu - 4*omega*x1^2", Context::Cartesian).unwrap());
        let (_, g0) = rotated_integral(&spec).unwrap();
        assert_eq!(g0, spec.integral_ground_value());
    }

    #[test]
    fn pointwise_application_agrees() {
        let spec = ModelSpec::with_roots(forms(&[[1, -1, 0, 0], [0, 1, -1, 0], [1, 0, -1, 0]]), sym(NU), sym(OMEGA));
        let h = rotated_hamiltonian(&spec).unwrap();
        let pt: Vec<ExactScalar> = [(1, 2), (3, 5), (-2, 7), (4, 3), (2, 9), (5, 4)]
            .iter()
            .map(|&(a, b)| ExactScalar::from_ratio(a, b))
            .collect();
        let sym_p = Polynomial::parse("x1^2*x2^2*x3^2 + x1*x2*x3*x4 + x4^3", Context::Cartesian).unwrap();
        let via_poly = h.apply(&sym_p).unwrap().evaluate(&pt).unwrap();
        assert_eq!(h.apply_at(&pt, &Jet::of(&sym_p, &pt).unwrap()).unwrap(), via_poly);
    }

    #[test]
    fn non_closed_root_set_leaves_a_pole() {
        // e₁ and e₁+e₂ are not closed under reflections
        let spec = ModelSpec::with_roots(forms(&[[1, 0, 0, 0], [1, 1, 0, 0]]), sym(NU), sym(OMEGA));
        assert!(matches!(rotated_hamiltonian(&spec), Err(Error::NonzeroFreeTerm(_))));
    }

    #[test]
    fn a2_integral_ground_value() {
        let spec = ModelSpec::with_roots(forms(&[[1, -1, 0, 0], [0, 1, -1, 0], [1, 0, -1, 0]]), sym(NU), sym(OMEGA));
        rotated_hamiltonian(&spec).unwrap();
        let (f, g0) = rotated_integral(&spec).unwrap();
        assert_eq!(g0, Polynomial::parse("3*nu + 9/2*nu^2", Context::Cartesian).unwrap());
        assert!(f.free.is_zero());
    }
}
