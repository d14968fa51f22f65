//! Modular linear algebra for identity solving.
//!
//! For primes p ≡ ±2 (mod 5) the integer 5 is a quadratic non-residue, so
//! F_p[√5] is a field with p² elements into which Q(√5) reduces for all
//! but finitely many p. Exact solutions are recovered by Chinese remaindering
//! and rational reconstruction of both the rational and the √5 part.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, COORDS};
use crate::scalar::{ExactScalar, Rational};

/// An element `u + v√5` of F_p[√5].
pub type Elem = (u64, u64);

/// Primes below 2⁶² congruent to 2 or 3 mod 5, in decreasing order.
pub fn primes() -> impl Iterator<Item = u64> {
    let start = (1u64 << 62) - 1;
    (0..).map(move |k| start - 2 * k).filter(|&p| matches!(p % 5, 2 | 3) && num_prime::nt_funcs::is_prime64(p))
}

#[derive(Clone, Copy, Debug)]
pub struct Fp2 {
    pub p: u64,
}

impl Fp2 {
    pub fn new(p: u64) -> Self {
        Self { p }
    }

    #[inline]
    fn mulp(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    #[inline]
    fn addp(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p { s - self.p } else { s }
    }

    #[inline]
    fn subp(&self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { a + self.p - b }
    }

    pub const ZERO: Elem = (0, 0);

    pub fn one(&self) -> Elem {
        (1, 0)
    }

    pub fn from_u64(&self, n: u64) -> Elem {
        (n % self.p, 0)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        (self.addp(a.0, b.0), self.addp(a.1, b.1))
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        (self.subp(a.0, b.0), self.subp(a.1, b.1))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.1 == 0 && b.1 == 0 {
            return (self.mulp(a.0, b.0), 0);
        }
        let five_bd = self.mulp(5, self.mulp(a.1, b.1));
        (
            self.addp(self.mulp(a.0, b.0), five_bd),
            self.addp(self.mulp(a.0, b.1), self.mulp(a.1, b.0)),
        )
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(Self::ZERO, a)
    }

    fn powp(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulp(acc, b);
            }
            b = self.mulp(b, b);
            e >>= 1;
        }
        acc
    }

    fn invp(&self, a: u64) -> u64 {
        self.powp(a, self.p - 2)
    }

    pub fn is_zero(a: Elem) -> bool {
        a == Self::ZERO
    }

    /// `(u − v√5)/(u² − 5v²)`; the norm never vanishes for nonzero input.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if Self::is_zero(a) {
            return None;
        }
        let n = self.subp(self.mulp(a.0, a.0), self.mulp(5, self.mulp(a.1, a.1)));
        let ni = self.invp(n);
        Some((self.mulp(a.0, ni), self.mulp(self.subp(0, a.1), ni)))
    }

    pub fn pow(&self, a: Elem, mut e: u32) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits")
    }

    /// Image of an exact scalar; `None` when p divides its denominator.
    pub fn reduce(&self, s: &ExactScalar) -> Option<Elem> {
        let (a, b, d) = s.numerators();
        let dr = self.reduce_int(d);
        if dr == 0 {
            return None;
        }
        let di = self.invp(dr);
        Some((self.mulp(self.reduce_int(a), di), self.mulp(self.reduce_int(b), di)))
    }

    /// Deterministic pseudo-random elements of F_p, seeded by `seed` and p.
    pub fn sample_points(&self, seed: u64, count: usize, dim: usize) -> Vec<Vec<Elem>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ self.p.rotate_left(17));
        (0..count)
            .map(|_| (0..dim).map(|_| (rng.gen_range(1..self.p), 0)).collect())
            .collect()
    }
}

/// A coordinate polynomial reduced modulo p, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ReducedPoly {
    terms: Vec<([u32; COORDS], Elem)>,
    max_deg: [u32; COORDS],
}

impl ReducedPoly {
    /// `None` if p divides a coefficient denominator. The polynomial must not
    /// involve ν or ω.
    pub fn new(p: &Polynomial, field: &Fp2) -> Option<Self> {
        debug_assert!(p.is_param_free());
        let mut max_deg = [0; COORDS];
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let e = m.coord_exponents();
            for i in 0..COORDS {
                max_deg[i] = max_deg[i].max(e[i]);
            }
            terms.push((e, field.reduce(c)?));
        }
        Some(Self { terms, max_deg })
    }

    pub fn max_degrees(&self) -> [u32; COORDS] {
        self.max_deg
    }

    pub fn eval(&self, field: &Fp2, powers: &PowerTable) -> Elem {
        let mut acc = Fp2::ZERO;
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..COORDS {
                if e[i] > 0 {
                    t = field.mul(t, powers.0[i][e[i] as usize]);
                }
            }
            acc = field.add(acc, t);
        }
        acc
    }
}

/// Powers `v_i^k` of a point's coordinates.
#[derive(Debug, Clone)]
pub struct PowerTable(pub [Vec<Elem>; COORDS]);

impl PowerTable {
    pub fn new(field: &Fp2, point: &[Elem], max_deg: [u32; COORDS]) -> Self {
        PowerTable(std::array::from_fn(|i| {
            let mut v = vec![field.one()];
            for k in 1..=max_deg[i] as usize {
                v.push(field.mul(v[k - 1], point[i]));
            }
            v
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Unique(Vec<Elem>),
    /// no solution: the right-hand side is outside the column span
    Inconsistent,
    /// the column rank is deficient at these points
    Underdetermined,
}

/// Gaussian elimination for an overdetermined system `rows · c = rhs`.
pub fn solve(field: &Fp2, mut rows: Vec<Vec<Elem>>, mut rhs: Vec<Elem>, ncols: usize) -> SolveOutcome {
    let nrows = rows.len();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..nrows).find(|&k| !Fp2::is_zero(rows[k][c])) else {
            return SolveOutcome::Underdetermined;
        };
        rows.swap(r, k);
        rhs.swap(r, k);
        let inv = field.inv(rows[r][c]).expect("nonzero pivot");
        for j in c..ncols {
            rows[r][j] = field.mul(rows[r][j], inv);
        }
        rhs[r] = field.mul(rhs[r], inv);
        for k in 0..nrows {
            if k != r && !Fp2::is_zero(rows[k][c]) {
                let f = rows[k][c];
                for j in c..ncols {
                    let t = field.mul(f, rows[r][j]);
                    rows[k][j] = field.sub(rows[k][j], t);
                }
                let t = field.mul(f, rhs[r]);
                rhs[k] = field.sub(rhs[k], t);
            }
        }
        r += 1;
    }
    if rhs[r..].iter().any(|v| !Fp2::is_zero(*v)) {
        return SolveOutcome::Inconsistent;
    }
    SolveOutcome::Unique(rhs[..ncols].to_vec())
}

/// Chinese remaindering of vectors of F_p[√5] images, with rational
/// reconstruction into Q(√5).
#[derive(Debug, Clone, Default)]
pub struct Reconstructor {
    modulus: BigInt,
    residues: Vec<(BigInt, BigInt)>,
}

impl Reconstructor {
    pub fn new() -> Self {
        Self { modulus: BigInt::one(), residues: Vec::new() }
    }

    pub fn modulus_bits(&self) -> u64 {
        self.modulus.bits()
    }

    pub fn add(&mut self, p: u64, values: &[Elem]) {
        let pb = BigInt::from(p);
        if self.residues.is_empty() {
            self.residues = values.iter().map(|v| (BigInt::from(v.0), BigInt::from(v.1))).collect();
            self.modulus = pb;
            return;
        }
        assert_eq!(values.len(), self.residues.len());
        // x ≡ r (mod M), x ≡ v (mod p): x = r + M·((v − r)·M⁻¹ mod p)
        let m_inv = mod_inverse(&(&self.modulus % &pb), &pb);
        let lift = |r: &BigInt, v: u64| -> BigInt {
            let diff = (BigInt::from(v) - r).mod_floor(&pb);
            let t = (diff * &m_inv).mod_floor(&pb);
            r + &self.modulus * t
        };
        let new: Vec<(BigInt, BigInt)> =
            self.residues.iter().zip(values).map(|((ra, rb), v)| (lift(ra, v.0), lift(rb, v.1))).collect();
        self.residues = new;
        self.modulus *= pb;
    }

    pub fn reconstruct(&self) -> Option<Vec<ExactScalar>> {
        self.residues
            .iter()
            .map(|(a, b)| {
                let ra = rational_reconstruction(a, &self.modulus)?;
                let rb = rational_reconstruction(b, &self.modulus)?;
                Some(ExactScalar::new(&ra, &rb))
            })
            .collect()
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    e.x.mod_floor(m)
}

/// The fraction n/d with |n|, d ≤ √(m/2) congruent to `r` mod `m`, if any.
pub fn rational_reconstruction(r: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.abs() > bound || t1.is_zero() || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Solves a linear system with exact Q(√5) solution by working modulo
/// successive primes. `build` returns the system for a given field (or
/// `None` to skip a prime with bad reduction). A reconstruction that is
/// stable across two consecutive primes is passed to `verify`; the first
/// verified one is returned. `Ok(None)` means the system has no solution.
pub fn solve_exact<B, V>(ncols: usize, mut build: B, mut verify: V) -> Result<Option<Vec<ExactScalar>>>
where
    B: FnMut(&Fp2) -> Option<(Vec<Vec<Elem>>, Vec<Elem>)>,
    V: FnMut(&[ExactScalar]) -> Result<bool>,
{
    const MAX_PRIMES: usize = 200;
    let mut rec = Reconstructor::new();
    let mut previous: Option<Vec<ExactScalar>> = None;
    let mut degenerate = 0;
    for (used, p) in primes().enumerate() {
        if used >= MAX_PRIMES {
            break;
        }
        let field = Fp2::new(p);
        let Some((rows, rhs)) = build(&field) else { continue };
        match solve(&field, rows, rhs, ncols) {
            SolveOutcome::Inconsistent => return Ok(None),
            SolveOutcome::Underdetermined => {
                degenerate += 1;
                if degenerate > 3 {
                    return Err(Error::Unsupported("evaluation matrix is rank deficient".into()));
                }
                continue;
            }
            SolveOutcome::Unique(v) => rec.add(p, &v),
        }
        let current = rec.reconstruct();
        if let Some(cur) = &current {
            if previous.as_ref() == Some(cur) && verify(cur)? {
                return Ok(current);
            }
        }
        previous = current;
    }
    Err(Error::Unsupported(format!("no stable reconstruction after {MAX_PRIMES} primes")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_inert() {
        for p in primes().take(5) {
            assert!(matches!(p % 5, 2 | 3));
            let f = Fp2::new(p);
            let s5 = (0, 1);
            assert_eq!(f.mul(s5, s5), (5, 0));
            let x = (123456789, 987654321);
            assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
        }
    }

    #[test]
    fn reduction_is_a_homomorphism() {
        let f = Fp2::new(primes().next().unwrap());
        let a: ExactScalar = "3/7-5/11*sqrt5".parse().unwrap();
        let b: ExactScalar = "-2/3+1/2*sqrt5".parse().unwrap();
        let (ra, rb) = (f.reduce(&a).unwrap(), f.reduce(&b).unwrap());
        assert_eq!(f.reduce(&(&a * &b)).unwrap(), f.mul(ra, rb));
        assert_eq!(f.reduce(&(&a + &b)).unwrap(), f.add(ra, rb));
    }

    #[test]
    fn reconstruction_roundtrip() {
        let target: Vec<ExactScalar> =
            ["-43510/1809", "22081114965/7691704+3*sqrt5", "1/2+1/2*sqrt5"].iter().map(|s| s.parse().unwrap()).collect();
        let mut rec = Reconstructor::new();
        for p in primes().take(3) {
            let f = Fp2::new(p);
            rec.add(p, &target.iter().map(|t| f.reduce(t).unwrap()).collect::<Vec<_>>());
        }
        assert_eq!(rec.reconstruct().unwrap(), target);
    }

    #[test]
    fn exact_solve_and_inconsistency() {
        // x + √5 y = 1, x − y = 2/3, 2x + y = c
        let sys = |c: ExactScalar| {
            move |f: &Fp2| {
                let e = |s: &str| f.reduce(&s.parse().unwrap()).unwrap();
                let rows = vec![vec![e("1"), e("sqrt5")], vec![e("1"), e("-1")], vec![e("2"), e("1")]];
                Some((rows, vec![e("1"), e("2/3"), f.reduce(&c).unwrap()]))
            }
        };
        // consistent right-hand side from the exact solution
        let y = "1/3".parse::<ExactScalar>().unwrap() / "1+sqrt5".parse::<ExactScalar>().unwrap();
        let x = &"2/3".parse::<ExactScalar>().unwrap() + &y;
        let c = &(&x * &ExactScalar::from_int(2)) + &y;
        let sol = solve_exact(2, sys(c), |_| Ok(true)).unwrap().unwrap();
        assert_eq!(sol, vec![x, y]);
        assert_eq!(solve_exact(2, sys(ExactScalar::from_int(100)), |_| Ok(true)).unwrap(), None);
    }

}
