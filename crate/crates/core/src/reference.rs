//! Published reference values, embedded from `data/reference.toml`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Context, Polynomial};
use crate::scalar::{ExactScalar, Rational};
use crate::special::{alternating_delta4, BracketForm, parse_symmetric_combination, symmetric_combination};

pub const REFERENCE_TOML: &str = include_str!("../data/reference.toml");

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReferenceData {
    pub version: u32,
    pub group: GroupRef,
    pub tau: TauRef,
    pub ambiguity: BTreeMap<String, String>,
    pub hamiltonian: OperatorRef,
    pub integral: IntegralRef,
    pub gamma: GammaRef,
    pub flags: FlagsRef,
    pub boundary: BoundaryRef,
    pub eigen: EigenRef,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupRef {
    pub order: usize,
    pub orbit_lengths: [usize; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TauBlock {
    pub symmetric: String,
    pub delta4_factor: String,
    pub delta4_block: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TauRef {
    pub tau1: String,
    pub degrees: [u32; 4],
    pub tau2: TauBlock,
    pub tau3: TauBlock,
    pub tau4: TauBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[allow(non_snake_case)]
pub struct OperatorRef {
    pub A: BTreeMap<String, String>,
    pub B: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[allow(non_snake_case)]
pub struct IntegralRef {
    pub gamma0: String,
    pub F: BTreeMap<String, String>,
    pub G: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GammaRef {
    pub squares: [i64; 3],
    pub cross: BTreeMap<String, i64>,
    pub linear: String,
    pub weights: [u32; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FlagsRef {
    pub minimal: [u32; 4],
    pub second: [u32; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundaryRef {
    pub anchors: BTreeMap<String, i64>,
    pub degrees: BTreeMap<String, u32>,
    pub polynomial: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EigenRef {
    pub h: Vec<EigenEntry>,
    pub joint: Vec<EigenEntry>,
    /// replacements for printed entries that fail their equations
    #[serde(default)]
    pub corrected: Vec<EigenEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EigenEntry {
    pub label: String,
    pub level: u32,
    pub phi: Option<String>,
    pub laguerre: Option<u32>,
    pub epsilon: String,
    pub gamma: Option<String>,
}

fn tau_poly(s: &str) -> Result<Polynomial> {
    Polynomial::parse(s, Context::Invariant)
}

impl ReferenceData {
    pub fn embedded() -> Result<Self> {
        Self::from_toml(REFERENCE_TOML)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("reference data: {e}")))
    }

    /// The explicit τ's as Cartesian polynomials.
    pub fn tau_polynomials(&self) -> Result<[Polynomial; 4]> {
        let d4 = alternating_delta4();
        let block = |b: &TauBlock| -> Result<Polynomial> {
            let sym = symmetric_combination(&parse_symmetric_combination(&b.symmetric)?)?;
            let alt = symmetric_combination(&parse_symmetric_combination(&b.delta4_block)?)?;
            let factor: ExactScalar = b.delta4_factor.parse()?;
            Ok(sym + (&d4 * &alt).scale(&factor))
        };
        Ok([
            symmetric_combination(&parse_symmetric_combination(&self.tau.tau1)?)?,
            block(&self.tau.tau2)?,
            block(&self.tau.tau3)?,
            block(&self.tau.tau4)?,
        ])
    }

    /// Printed bracket coefficients of τ₂, τ₃ or τ₄ (`a` = 2, 3, 4).
    pub fn tau_bracket_form(&self, a: usize) -> Result<BracketForm> {
        let b = match a {
            2 => &self.tau.tau2,
            3 => &self.tau.tau3,
            4 => &self.tau.tau4,
            _ => return Err(Error::InvalidParameter(format!("no bracket block for tau{a}"))),
        };
        BracketForm::from_printed(&b.symmetric, &b.delta4_factor.parse()?, &b.delta4_block)
    }

    pub fn ambiguity_params(&self) -> Result<[Rational; 7]> {
        let mut out: Vec<Rational> = Vec::new();
        for k in 1..=7 {
            let s = self
                .ambiguity
                .get(&format!("A{k}"))
                .ok_or_else(|| Error::Parse(format!("missing A{k}")))?;
            let v: ExactScalar = s.parse()?;
            if !v.is_rational() {
                return Err(Error::Parse(format!("A{k} is not rational")));
            }
            out.push(v.rational_part());
        }
        Ok(out.try_into().expect("seven parameters"))
    }

    fn coefficient(map: &BTreeMap<String, String>, key: &str) -> Result<Polynomial> {
        tau_poly(map.get(key).ok_or_else(|| Error::Parse(format!("missing coefficient {key}")))?)
    }

    /// `A_ij` for 1 ≤ i ≤ j ≤ 4 (1-based indices).
    pub fn hamiltonian_a(&self, i: usize, j: usize) -> Result<Polynomial> {
        let (i, j) = (i.min(j), i.max(j));
        Self::coefficient(&self.hamiltonian.A, &format!("{i}{j}"))
    }

    pub fn hamiltonian_b(&self, i: usize) -> Result<Polynomial> {
        Self::coefficient(&self.hamiltonian.B, &i.to_string())
    }

    pub fn integral_f(&self, i: usize, j: usize) -> Result<Polynomial> {
        let (i, j) = (i.min(j), i.max(j));
        Self::coefficient(&self.integral.F, &format!("{i}{j}"))
    }

    pub fn integral_g(&self, i: usize) -> Result<Polynomial> {
        Self::coefficient(&self.integral.G, &i.to_string())
    }

    pub fn gamma0(&self) -> Result<Polynomial> {
        tau_poly(&self.integral.gamma0)
    }

    pub fn boundary_polynomial(&self) -> Result<Polynomial> {
        tau_poly(&self.boundary.polynomial)
    }

    /// The printed closed form for Γ − γ₀ at `(k₂, k₃, k₄)`, as a polynomial
    /// in ν.
    pub fn gamma_formula(&self, k: [i64; 3]) -> Result<Polynomial> {
        let g = &self.gamma;
        let mut quad = 0i64;
        for a in 0..3 {
            quad += g.squares[a] * k[a] * k[a];
        }
        let cross = |key: &str| g.cross.get(key).copied().unwrap_or(0);
        quad += cross("k2k3") * k[0] * k[1] + cross("k2k4") * k[0] * k[2] + cross("k3k4") * k[1] * k[2];
        let weighted: i64 = (0..3).map(|a| g.weights[a] as i64 * k[a]).sum();
        let lin = tau_poly(&g.linear)?.scale(&ExactScalar::from_int(weighted));
        Ok(lin + Polynomial::from_int(Context::Invariant, quad))
    }

    /// An eigenfunction entry resolved to a polynomial in τ, ν, ω.
    pub fn eigenfunction(&self, e: &EigenEntry) -> Result<Polynomial> {
        match (&e.phi, e.laguerre) {
            (Some(p), _) => tau_poly(p),
            (None, Some(n)) => crate::special::laguerre(n, &tau_poly("1 + 60*nu")?, &tau_poly("omega*tau1")?),
            _ => Err(Error::Parse(format!("entry {} has no form", e.label))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_parses() {
        let r = ReferenceData::embedded().unwrap();
        assert_eq!(r.group.order, 14400);
        assert_eq!(r.hamiltonian_a(2, 1).unwrap(), tau_poly("24*tau2").unwrap());
        assert_eq!(r.integral_g(1).unwrap(), tau_poly("0").unwrap());
        assert_eq!(r.boundary_polynomial().unwrap().len(), 38);
        assert_eq!(r.ambiguity_params().unwrap()[0], Rational::from_integer((-1).into()));
        assert_eq!(r.eigen.joint.len(), 8);
    }

    #[test]
    fn gamma_closed_form_for_a_single_excitation() {
        let r = ReferenceData::embedded().unwrap();
        // Γ₀,₁,₀,₀ − γ₀ = 72 + 12(1+60ν)
        assert_eq!(r.gamma_formula([1, 0, 0]).unwrap(), tau_poly("84 + 720*nu").unwrap());
    }

    #[test]
    fn roundtrip_through_toml() {
        let r = ReferenceData::embedded().unwrap();
        let text = toml::to_string(&r).unwrap();
        assert_eq!(ReferenceData::from_toml(&text).unwrap(), r);
    }
}
