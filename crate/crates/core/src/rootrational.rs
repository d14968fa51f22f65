//! Rational functions whose denominators are products of at most two root
//! forms, kept term by term so that every cancellation is an exact
//! division by a linear form.

use std::collections::BTreeMap;

use crate::coxeter::LinearForm;
use crate::error::{Error, Result};
use crate::poly::{Context, Polynomial, COORDS};
use crate::scalar::ExactScalar;

/// `P + Σ N_{α,k}/(α·x)^k + Σ M_{αβ}/((α·x)(β·x))`, roots by index.
#[derive(Clone, Debug, Default)]
pub struct RootRational {
    poly: Option<Polynomial>,
    single: BTreeMap<(usize, u32), Polynomial>,
    pairs: BTreeMap<(usize, usize), Polynomial>,
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Polynomial>, key: K, p: Polynomial) {
    if p.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(slot) => {
            *slot = &*slot + &p;
            if slot.is_zero() {
                map.remove(&key);
            }
        }
        None => {
            map.insert(key, p);
        }
    }
}

impl RootRational {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_poly(&mut self, p: Polynomial) {
        self.poly = Some(match self.poly.take() {
            Some(q) => q + p,
            None => p,
        });
    }

    /// Adds `n/(α_i·x)^k`.
    pub fn add_single(&mut self, i: usize, k: u32, n: Polynomial) {
        if k == 0 {
            self.add_poly(n);
        } else {
            accumulate(&mut self.single, (i, k), n);
        }
    }

    /// Adds `n/((α_i·x)(α_j·x))`.
    pub fn add_pair(&mut self, i: usize, j: usize, n: Polynomial) {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.add_single(i, 2, n),
            std::cmp::Ordering::Less => accumulate(&mut self.pairs, (i, j), n),
            std::cmp::Ordering::Greater => accumulate(&mut self.pairs, (j, i), n),
        }
    }

    /// Reduces to a polynomial. Pair terms are summed over each rank-2
    /// plane of roots and divided by the product of that plane's forms. Any leftover pole is
    /// reported.
    pub fn into_polynomial(self, forms: &[LinearForm]) -> Result<Polynomial> {
        let coeffs: Vec<&[ExactScalar; COORDS]> = forms.iter().map(|f| &f.0).collect();
        let mut poly = self.poly.unwrap_or_else(|| Polynomial::zero(Context::Cartesian));
        let mut single = self.single;

        let mut planes: BTreeMap<Vec<usize>, Vec<(usize, usize, Polynomial)>> = BTreeMap::new();
        for ((i, j), n) in self.pairs {
            planes.entry(plane_of(forms, i, j)).or_default().push((i, j, n));
        }
        let mut leftovers = Vec::new();
        for (plane, terms) in planes {
            let mut num = Polynomial::zero(Context::Cartesian);
            for (i, j, n) in terms {
                let mut t = n;
                for &g in plane.iter().filter(|&&g| g != i && g != j) {
                    t = t.mul_linear(coeffs[g]);
                }
                num = num + t;
            }
            let mut q = num;
            for &g in &plane {
                if q.is_zero() {
                    break;
                }
                match q.divide_by_linear(coeffs[g]) {
                    Ok(d) => q = d,
                    Err(_) => {
                        leftovers.push(format!("pole on the plane of roots {plane:?}"));
                        q = Polynomial::zero(Context::Cartesian);
                    }
                }
            }
            poly = poly + q;
        }
        let max_k = single.keys().map(|&(_, k)| k).max().unwrap_or(0);
        for k in (1..=max_k).rev() {
            let level: Vec<(usize, Polynomial)> =
                single.iter().filter(|((_, kk), _)| *kk == k).map(|(&(i, _), n)| (i, n.clone())).collect();
            for (i, n) in level {
                single.remove(&(i, k));
                let (q, r) = n.div_rem_linear(coeffs[i])?;
                if k == 1 {
                    poly = poly + q;
                } else {
                    accumulate(&mut single, (i, k - 1), q);
                }
                if !r.is_zero() {
                    leftovers.push(format!("({})/({})^{k}", r.summary(), forms[i]));
                }
            }
        }
        if leftovers.is_empty() {
            Ok(poly)
        } else {
            Err(Error::NonzeroFreeTerm(leftovers.join("; ")))
        }
    }
}

/// Indices of the forms lying in the span of forms `i` and `j`.
pub fn plane_of(forms: &[LinearForm], i: usize, j: usize) -> Vec<usize> {
    let (a, b) = (&forms[i].0, &forms[j].0);
    forms
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            let c = &g.0;
            // all 3×3 minors of the rows a, b, c vanish
            (0..COORDS).all(|skip| {
                let cols: Vec<usize> = (0..COORDS).filter(|&k| k != skip).collect();
                let [a0, a1, a2] = [&a[cols[0]], &a[cols[1]], &a[cols[2]]];
                let [b0, b1, b2] = [&b[cols[0]], &b[cols[1]], &b[cols[2]]];
                let [c0, c1, c2] = [&c[cols[0]], &c[cols[1]], &c[cols[2]]];
                let det = &(&(a0 * &(&(b1 * c2) - &(b2 * c1))) - &(a1 * &(&(b0 * c2) - &(b2 * c0))))
                    + &(a2 * &(&(b0 * c1) - &(b1 * c0)));
                det.is_zero()
            })
        })
        .map(|(k, _)| k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::delta_factor_forms;

    fn x(s: &str) -> Polynomial {
        Polynomial::parse(s, Context::Cartesian).unwrap()
    }

    fn forms(v: &[[i64; 4]]) -> Vec<LinearForm> {
        v.iter().map(|r| LinearForm::new(r.map(ExactScalar::from_int))).collect()
    }

    #[test]
    fn single_terms_reduce_by_division() {
        let f = forms(&[[1, 0, 0, 0], [1, 1, 0, 0]]);
        let mut r = RootRational::new();
        r.add_single(0, 2, x("x1^3 + x1^2*x2"));
        r.add_single(1, 1, x("x1^2 - x2^2"));
        assert_eq!(r.into_polynomial(&f).unwrap(), x("2*x1"));
        let mut r = RootRational::new();
        r.add_single(1, 1, x("x1"));
        assert!(matches!(r.into_polynomial(&f), Err(Error::NonzeroFreeTerm(_))));
    }

    #[test]
    fn planar_pair_sums() {
        // A2: e1−e2, e2−e3, e1−e3; Σ_{α≠β} (α·β)/((α·x)(β·x)) = 0
        let f = forms(&[[1, -1, 0, 0], [0, 1, -1, 0], [1, 0, -1, 0]]);
        let mut r = RootRational::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    r.add_pair(i, j, Polynomial::constant(Context::Cartesian, crate::coxeter::dot(&f[i].0, &f[j].0)));
                }
            }
        }
        assert!(r.into_polynomial(&f).unwrap().is_zero());
        // a lone non-orthogonal pair leaves a pole
        let mut r = RootRational::new();
        r.add_pair(0, 1, x("1"));
        assert!(r.into_polynomial(&f).is_err());
    }

    #[test]
    fn h4_planes_partition_the_pairs() {
        let f = delta_factor_forms();
        let mut sizes = BTreeMap::new();
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                let p = plane_of(&f, i, j);
                assert!(p.contains(&i) && p.contains(&j));
                *sizes.entry(p.len()).or_insert(0usize) += 1;
            }
        }
        // pairs inside A1×A1, A2 and I2(5) planes
        assert_eq!(sizes.keys().copied().collect::<Vec<_>>(), vec![2, 3, 5]);
        assert_eq!(sizes.values().sum::<usize>(), 1770);
    }
}
