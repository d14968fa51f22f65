//! Flag spaces, matrices of τ-operators on them, and exact spectra.

use crate::error::{Error, Result};
use crate::invariants::{weighted_monomials, FlagVector, H4_DEGREES};
use crate::operator::DiffOperator;
use crate::poly::{Context, Monomial, Polynomial, NU, OMEGA};
use crate::scalar::ExactScalar;
use crate::special::laguerre;

/// τ-monomials of weighted degree ≤ n. Ordered by weighted degree, then by
/// x-degree, then by decreasing τ₁ exponent; both operators are upper
/// triangular in this order.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagBasis {
    pub vector: FlagVector,
    pub level: u32,
    pub monomials: Vec<Monomial>,
}

fn x_degree(m: Monomial) -> u32 {
    (0..4).map(|i| H4_DEGREES[i] * m.exponent(i)).sum()
}

pub fn flag_basis(v: FlagVector, n: u32) -> FlagBasis {
    let mut monomials: Vec<Monomial> = (0..=n).flat_map(|w| weighted_monomials(v.0, w)).collect();
    monomials.sort_by_key(|&m| (v.weighted_degree(m), x_degree(m), std::cmp::Reverse(m.exponent(0)), m));
    FlagBasis { vector: v, level: n, monomials }
}

impl FlagBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: Monomial) -> Option<usize> {
        self.monomials.iter().position(|&b| b == m)
    }

    /// The polynomial with the given coordinates.
    pub fn combine(&self, coords: &[ExactScalar]) -> Polynomial {
        Polynomial::from_terms(Context::Invariant, self.monomials.iter().copied().zip(coords.iter().cloned()))
    }
}

/// Number of `(n₁..n₄)` with `n₁+6n₂+10n₃+15n₄ = n`.
pub fn degeneracy(n: u32) -> usize {
    weighted_monomials(FlagVector::SECOND.0, n).len()
}

/// Matrix of an operator on a flag basis; `entries[row][col]` are
/// polynomials in ν and ω.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub basis: FlagBasis,
    pub entries: Vec<Vec<Polynomial>>,
}

/// Expands a τ-polynomial over the basis; coefficients keep ν and ω.
pub fn coordinates(p: &Polynomial, basis: &FlagBasis) -> Result<Vec<Polynomial>> {
    let mut out = vec![Polynomial::zero(Context::Invariant); basis.len()];
    for (m, c) in p.terms() {
        let coord = m.coord_part();
        let row = basis.index_of(coord).ok_or_else(|| {
            Error::NotInvariantSubspace(format!(
                "{} has weighted degree {} > {} under {}",
                coord.display(Context::Invariant),
                basis.vector.weighted_degree(coord),
                basis.level,
                basis.vector
            ))
        })?;
        out[row] = &out[row] + &Polynomial::monomial(Context::Invariant, m.param_part(), c.clone());
    }
    Ok(out)
}

pub fn matrix_on_basis(op: &DiffOperator, basis: &FlagBasis) -> Result<OperatorMatrix> {
    let n = basis.len();
    let mut entries = vec![vec![Polynomial::zero(Context::Invariant); n]; n];
    for (col, &m) in basis.monomials.iter().enumerate() {
        let image = op.apply(&Polynomial::monomial(Context::Invariant, m, ExactScalar::one()))?;
        for (row, c) in coordinates(&image, basis)?.into_iter().enumerate() {
            entries[row][col] = c;
        }
    }
    Ok(OperatorMatrix { basis: basis.clone(), entries })
}

impl OperatorMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// No entry maps a monomial to one of higher weighted degree.
    pub fn check_triangular(&self) -> bool {
        let deg: Vec<u32> = self.basis.monomials.iter().map(|&m| self.basis.vector.weighted_degree(m)).collect();
        self.entries
            .iter()
            .enumerate()
            .all(|(r, row)| row.iter().enumerate().all(|(c, e)| e.is_zero() || deg[r] <= deg[c]))
    }

    /// Upper triangular in the basis order.
    pub fn is_upper_triangular(&self) -> bool {
        self.entries.iter().enumerate().all(|(r, row)| row[..r].iter().all(Polynomial::is_zero))
    }

    pub fn diagonal(&self) -> Vec<Polynomial> {
        (0..self.size()).map(|i| self.entries[i][i].clone()).collect()
    }

    pub fn specialize(&self, nu: &ExactScalar, omega: &ExactScalar) -> Result<Vec<Vec<ExactScalar>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| specialize_value(e, nu, omega)).collect())
            .collect()
    }
}

/// Value of a polynomial in ν, ω at given numbers.
pub fn specialize_value(p: &Polynomial, nu: &ExactScalar, omega: &ExactScalar) -> Result<ExactScalar> {
    let q = p.specialize(NU, nu).specialize(OMEGA, omega);
    q.constant_value()
        .or_else(|| q.is_zero().then(ExactScalar::zero))
        .ok_or_else(|| Error::InvalidParameter(format!("{} still depends on tau", p.summary())))
}

/// `ε` from a diagonal entry of `h`, using `hφ = −2εφ`.
pub fn epsilon_of(diag: &Polynomial) -> Polynomial {
    diag.scale(&ExactScalar::from_ratio(-1, 2))
}

/// One eigenvalue with its multiplicity and the basis monomials whose
/// diagonal entries carry it.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralLine {
    pub value: Polynomial,
    pub multiplicity: usize,
    pub monomials: Vec<Monomial>,
}

/// Eigenvalues of a triangular operator, read off the diagonal in order of
/// first appearance.
pub fn spectrum(m: &OperatorMatrix) -> Result<Vec<SpectralLine>> {
    if !m.is_upper_triangular() {
        return Err(Error::NotInvariantSubspace("matrix is not triangular in the graded basis".into()));
    }
    let mut lines: Vec<SpectralLine> = Vec::new();
    for (i, d) in m.diagonal().into_iter().enumerate() {
        let mono = m.basis.monomials[i];
        match lines.iter_mut().find(|l| l.value == d) {
            Some(l) => {
                l.multiplicity += 1;
                l.monomials.push(mono);
            }
            None => lines.push(SpectralLine { value: d, multiplicity: 1, monomials: vec![mono] }),
        }
    }
    Ok(lines)
}

/// Null space of a matrix by reduced row echelon form; basis vectors are
/// normalized so that their last nonzero coordinate is 1.
pub fn nullspace(rows: &[Vec<ExactScalar>], ncols: usize) -> Vec<Vec<ExactScalar>> {
    let mut a: Vec<Vec<ExactScalar>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    // pivot from the last column so that free variables are the low ones
    for c in (0..ncols).rev() {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for v in a[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (k, v) in row.iter_mut().enumerate() {
                    if !pivot_row[k].is_zero() {
                        *v = &*v - &(&f * &pivot_row[k]);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![ExactScalar::zero(); ncols];
            v[f] = ExactScalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&a[row][f];
            }
            let last = v.iter().rposition(|x| !x.is_zero()).expect("nonzero vector");
            let inv = v[last].inv().expect("nonzero");
            v.iter().map(|x| x * &inv).collect()
        })
        .collect()
}

/// An eigenvector (as a τ-polynomial) with its eigenvalue label.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenVector {
    /// `ε` for h problems, otherwise the raw eigenvalue
    pub value: ExactScalar,
    /// `γ` for joint problems
    pub gamma: Option<ExactScalar>,
    pub phi: Polynomial,
}

fn shifted(m: &[Vec<ExactScalar>], lambda: &ExactScalar) -> Vec<Vec<ExactScalar>> {
    m.iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, v)| if i == j { v - lambda } else { v.clone() }).collect())
        .collect()
}

/// Eigenvectors of `h` at numeric ν, ω, block by block.
pub fn eigenfunctions(h: &OperatorMatrix, nu: &ExactScalar, omega: &ExactScalar) -> Result<Vec<EigenVector>> {
    joint_eigenfunctions(h, None, nu, omega)
}

/// Common eigenvectors of `h` and optionally `f` on the same basis, one
/// null space per pair of diagonal values.
pub fn joint_eigenfunctions(
    h: &OperatorMatrix,
    f: Option<&OperatorMatrix>,
    nu: &ExactScalar,
    omega: &ExactScalar,
) -> Result<Vec<EigenVector>> {
    if f.is_some_and(|f| f.basis != h.basis) {
        return Err(Error::InvalidParameter("operators on different bases".into()));
    }
    let hs = h.specialize(nu, omega)?;
    let fs = f.map(|f| f.specialize(nu, omega)).transpose()?;
    if !h.is_upper_triangular() || f.is_some_and(|f| !f.is_upper_triangular()) {
        return Err(Error::NotInvariantSubspace("matrix is not triangular in the graded basis".into()));
    }
    let n = hs.len();
    let mut keys: Vec<(ExactScalar, Option<ExactScalar>)> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for i in 0..n {
        let key = (hs[i][i].clone(), fs.as_ref().map(|f| f[i][i].clone()));
        match keys.iter().position(|k| *k == key) {
            Some(p) => counts[p] += 1,
            None => {
                keys.push(key);
                counts.push(1);
            }
        }
    }
    let mut out = Vec::new();
    for (idx, (lh, lf)) in keys.iter().enumerate() {
        let mut rows = shifted(&hs, lh);
        if let (Some(fs), Some(lf)) = (&fs, lf) {
            rows.extend(shifted(fs, lf));
        }
        let vs = nullspace(&rows, n);
        let expected = counts[idx];
        if vs.len() != expected {
            return Err(Error::DefectiveMatrix(format!(
                "eigenvalue {lh}{} has multiplicity {expected} but {} eigenvectors",
                lf.as_ref().map(|g| format!(", {g}")).unwrap_or_default(),
                vs.len()
            )));
        }
        let eps = lh * &ExactScalar::from_ratio(-1, 2);
        for v in vs {
            out.push(EigenVector { value: eps.clone(), gamma: lf.clone(), phi: h.basis.combine(&v) });
        }
    }
    Ok(out)
}

/// `L_{n₁}^{(1+60ν)}(ωτ₁)` with its `ε = 2ωn₁`.
pub fn laguerre_family(n1: u32) -> Result<(Polynomial, Polynomial)> {
    let ctx = Context::Invariant;
    let alpha = Polynomial::parse("1 + 60*nu", ctx)?;
    let z = Polynomial::parse("omega*tau1", ctx)?;
    let eps = Polynomial::var(ctx, OMEGA).scale(&ExactScalar::from_int(2 * n1 as i64));
    Ok((laguerre(n1, &alpha, &z)?, eps))
}

/// Checks `op φ = λφ` exactly; on failure returns the difference.
pub fn check_eigen(op: &DiffOperator, phi: &Polynomial, lambda: &Polynomial) -> Result<std::result::Result<(), Polynomial>> {
    let diff = &op.apply(phi)? - &lambda.try_mul(phi)?;
    Ok(if diff.is_zero() { Ok(()) } else { Err(diff) })
}

/// Whether `p` lies in the span of `spanning` over the scalars.
pub fn in_span(p: &Polynomial, spanning: &[Polynomial]) -> bool {
    let mut monos: Vec<Monomial> = spanning.iter().chain(std::iter::once(p)).flat_map(|q| q.terms().iter().map(|(m, _)| *m)).collect();
    monos.sort();
    monos.dedup();
    let cols = spanning.len() + 1;
    let rows: Vec<Vec<ExactScalar>> = monos
        .iter()
        .map(|&m| spanning.iter().chain(std::iter::once(p)).map(|q| q.coefficient(m)).collect())
        .collect();
    nullspace(&rows, cols).iter().any(|v| !v[cols - 1].is_zero())
}

/// The right-hand side of the Γ closed form for given `(k₂,k₃,k₄)`:
/// squares and cross terms of a quadratic form plus the linear part.
pub fn gamma_quadratic(squares: [i64; 3], cross: [i64; 3], linear: &Polynomial, k: [i64; 3]) -> Polynomial {
    let w = [6i64, 10, 15];
    let quad = squares[0] * k[0] * k[0]
        + squares[1] * k[1] * k[1]
        + squares[2] * k[2] * k[2]
        + cross[0] * k[0] * k[1]
        + cross[1] * k[0] * k[2]
        + cross[2] * k[1] * k[2];
    let weighted: i64 = (0..3).map(|a| w[a] * k[a]).sum();
    &linear.scale(&ExactScalar::from_int(weighted)) + &Polynomial::from_int(linear.context(), quad)
}

/// `Γ − γ₀ = 2K² + 2(1+60ν)K` with `K = 6k₂+10k₃+15k₄`.
pub fn gamma_derived(k: [i64; 3]) -> Polynomial {
    gamma_quadratic([72, 200, 450], [240, 360, 600], &Polynomial::parse("2 + 120*nu", Context::Invariant).expect("literal"), k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Polynomial {
        Polynomial::parse(s, Context::Invariant).unwrap()
    }

    #[test]
    fn basis_dimensions() {
        assert_eq!(flag_basis(FlagVector::MINIMAL, 0).len(), 1);
        assert_eq!(flag_basis(FlagVector::MINIMAL, 5).len(), 7);
        let b = flag_basis(FlagVector::SECOND, 6);
        assert!(b.index_of(Monomial::var(1)).is_some());
        assert!(b.index_of(Monomial::from_exponents(&[6])).is_some());
    }

    #[test]
    fn degeneracy_counts() {
        assert_eq!(degeneracy(0), 1);
        assert_eq!(degeneracy(10), 3);
        assert_eq!(degeneracy(15), 5);
        assert_eq!(degeneracy(6), 2);
        assert_eq!(degeneracy(12), 4);
    }

    #[test]
    fn triangularity_of_simple_operators() {
        let ctx = Context::Invariant;
        let b = flag_basis(FlagVector::MINIMAL, 4);
        let euler = DiffOperator::partial(ctx, 0).mul_poly(&t("tau1")).unwrap();
        let m = matrix_on_basis(&euler, &b).unwrap();
        assert!(m.check_triangular());
        let raise = DiffOperator::multiplication(t("tau1"));
        assert!(matches!(matrix_on_basis(&raise, &b), Err(Error::NotInvariantSubspace(_))));
        let z = matrix_on_basis(&DiffOperator::zero(ctx), &b).unwrap();
        assert!(z.entries.iter().flatten().all(Polynomial::is_zero));
    }

    #[test]
    fn nullspace_of_small_matrices() {
        let i = |v: i64| ExactScalar::from_int(v);
        let m = vec![vec![i(1), i(2), i(3)], vec![i(2), i(4), i(6)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s = &(&v[0] + &(&i(2) * &v[1])) + &(&i(3) * &v[2]);
            assert!(s.is_zero());
        }
    }

    #[test]
    fn gamma_forms_agree_below_mixed_excitations() {
        for k in [[1, 0, 0], [0, 1, 0], [0, 0, 2], [3, 0, 0]] {
            let printed = gamma_quadratic([72, 200, 450], [120, 180, 300], &t("2 + 120*nu"), k);
            assert_eq!(printed, gamma_derived(k));
        }
        assert_ne!(
            gamma_quadratic([72, 200, 450], [120, 180, 300], &t("2 + 120*nu"), [1, 1, 0]),
            gamma_derived([1, 1, 0])
        );
    }

    #[test]
    fn laguerre_low_members() {
        let (l1, e1) = laguerre_family(1).unwrap();
        assert_eq!(l1, t("2 + 60*nu - omega*tau1"));
        assert_eq!(e1, t("2*omega"));
        assert_eq!(laguerre_family(0).unwrap().0, t("1"));
    }
}
