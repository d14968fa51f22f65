//! Lazily derived artifacts (group, τ, h, f, boundary) with an optional
//! persistent store. Every artifact read back from a store is re-validated
//! by one spot identity before use.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use crate::coxeter::{delta_factor_forms, paper_weights, CoxeterGroup, GroupElement, RootSystem, Vector4};
use crate::error::{Error, Result};
use crate::invariants::{boundary_surface, jacobian, jacobian_root_factor, proportionality, tau_explicit, tau_relabelled, BoundarySurface, RelabelledTau4, TauMap};
use crate::model::{pushforward, rotated_hamiltonian, rotated_integral, GaugeOperator, Jet, ModelSpec};
use crate::operator::DiffOperator;
use crate::poly::{Context, Polynomial};
use crate::reference::ReferenceData;
use crate::scalar::ExactScalar;

/// Bumped whenever a serialization below changes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArtifactKind {
    Group,
    Tau,
    Hamiltonian,
    Integral,
    Boundary,
}

impl ArtifactKind {
    pub const ALL: [ArtifactKind; 5] = [Self::Group, Self::Tau, Self::Hamiltonian, Self::Integral, Self::Boundary];

    pub fn name(self) -> &'static str {
        match self {
            Self::Group => "group",
            Self::Tau => "tau",
            Self::Hamiltonian => "hamiltonian",
            Self::Integral => "integral",
            Self::Boundary => "boundary",
        }
    }
}

impl fmt::Display for ArtifactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Persistent storage keyed by artifact kind and the full input text.
pub trait ArtifactStore: Send + Sync {
    fn load(&self, kind: ArtifactKind, inputs: &str) -> Option<String>;
    fn save(&self, kind: ArtifactKind, inputs: &str, body: &str) -> Result<()>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
    /// stored content failed to parse or failed its spot identity
    Rejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEvent {
    pub kind: ArtifactKind,
    pub outcome: CacheOutcome,
}

#[derive(Clone, Debug)]
pub struct TauArtifact {
    pub map: TauMap,
    pub relabel: RelabelledTau4,
}

#[derive(Clone, Debug)]
pub struct IntegralArtifact {
    pub operator: DiffOperator,
    pub gamma0: Polynomial,
}

#[derive(Clone, Debug)]
pub struct BoundaryArtifact {
    /// `c` with `J = c·Δ₁Δ₂Δ₃`
    pub jacobian_factor: ExactScalar,
    pub surface: BoundarySurface,
}

/// Point off every mirror, followed by ν and ω, used by the spot identities.
pub fn spot_point() -> Vec<ExactScalar> {
    [(3, 7), (5, 11), (13, 17), (19, 23), (2, 7), (3, 5)]
        .iter()
        .map(|&(a, b)| ExactScalar::from_ratio(a, b))
        .collect()
}

fn coordinates_of(point: &[ExactScalar]) -> Vector4 {
    std::array::from_fn(|i| point[i].clone())
}

fn params_of(point: &[ExactScalar]) -> [ExactScalar; 2] {
    [point[4].clone(), point[5].clone()]
}

/// The 2-jets of τ₁..τ₄ at the spot point.
pub fn tau_jets(tau: &TauMap, point: &[ExactScalar]) -> Result<[Jet; 4]> {
    let jets: Vec<Jet> = tau.tau.iter().map(|t| Jet::of(t, &point[..4])).collect::<Result<_>>()?;
    Ok(jets.try_into().expect("four"))
}

/// Checks `(D q)(τ(x₀)) = (O (q∘τ))(x₀)` for a τ-operator `D`, its
/// Cartesian origin `O` and a fixed quadratic test function `q`.
pub fn operator_spot_identity(op: &DiffOperator, origin: &GaugeOperator, jets: &[Jet; 4], point: &[ExactScalar]) -> Result<bool> {
    let q = Polynomial::parse(
        "3 - 2*tau1 + 5*tau2 - 7*tau3 + 11*tau4 + 13*tau1^2 - 17*tau1*tau2 + 19*tau1*tau3 - 23*tau1*tau4 \
         + 29*tau2^2 - 31*tau2*tau3 + 37*tau2*tau4 - 41*tau3^2 + 43*tau3*tau4 - 47*tau4^2",
        Context::Invariant,
    )?;
    let at: Vec<ExactScalar> = jets.iter().map(|j| j.value.clone()).chain(params_of(point)).collect();
    let lhs = op.apply(&q)?.evaluate(&at)?;
    let rhs = origin.apply_at(point, &Jet::compose(&q, jets, &params_of(point))?)?;
    Ok(lhs == rhs)
}

fn jacobian_at(jets: &[Jet; 4]) -> ExactScalar {
    // Leibniz expansion over the 24 permutations
    let mut det = ExactScalar::zero();
    for (perm, sign) in crate::coxeter::signed_permutations() {
        let t: ExactScalar = (0..4).map(|a| jets[a].grad[perm[a]].clone()).product();
        det += &if sign > 0 { t } else { -t };
    }
    det
}

/// Group, τ, operators and boundary for one reference data set.
pub struct Pipeline {
    reference: ReferenceData,
    inputs: String,
    store: Option<Box<dyn ArtifactStore>>,
    events: Mutex<Vec<CacheEvent>>,
    group: OnceLock<CoxeterGroup>,
    tau: OnceLock<TauArtifact>,
    hamiltonian: OnceLock<DiffOperator>,
    integral: OnceLock<IntegralArtifact>,
    boundary: OnceLock<BoundaryArtifact>,
    gauge_h: OnceLock<GaugeOperator>,
    gauge_f: OnceLock<(GaugeOperator, Polynomial)>,
}

fn cell<'a, T>(slot: &'a OnceLock<T>, make: impl FnOnce() -> Result<T>) -> Result<&'a T> {
    if let Some(v) = slot.get() {
        return Ok(v);
    }
    let v = make()?;
    Ok(slot.get_or_init(|| v))
}

fn line_value<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<&'a str> {
    let line = lines.next().ok_or_else(|| Error::Parse(format!("missing line {key}")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::Parse(format!("expected {key}, found {line:?}")))
}

impl Pipeline {
    pub fn new(reference: ReferenceData) -> Self {
        let inputs = toml::to_string(&reference).unwrap_or_default();
        Self {
            reference,
            inputs,
            store: None,
            events: Mutex::new(Vec::new()),
            group: OnceLock::new(),
            tau: OnceLock::new(),
            hamiltonian: OnceLock::new(),
            integral: OnceLock::new(),
            boundary: OnceLock::new(),
            gauge_h: OnceLock::new(),
            gauge_f: OnceLock::new(),
        }
    }

    pub fn embedded() -> Result<Self> {
        Ok(Self::new(ReferenceData::embedded()?))
    }

    pub fn with_store(mut self, store: Box<dyn ArtifactStore>) -> Self {
        self.store = Some(store);
        self
    }

    pub fn reference(&self) -> &ReferenceData {
        &self.reference
    }

    /// The text every artifact key is derived from.
    pub fn input_text(&self, kind: ArtifactKind) -> String {
        format!("kind {kind}\nformat {FORMAT_VERSION}\n{}", self.inputs)
    }

    pub fn cache_events(&self) -> Vec<CacheEvent> {
        self.events.lock().map(|e| e.clone()).unwrap_or_default()
    }

    fn record(&self, kind: ArtifactKind, outcome: CacheOutcome) {
        if let Ok(mut e) = self.events.lock() {
            e.push(CacheEvent { kind, outcome });
        }
    }

    /// Loads from the store (validated by `parse`), or derives and saves.
    fn cached<T>(
        &self,
        kind: ArtifactKind,
        parse: impl FnOnce(&str) -> Result<T>,
        derive: impl FnOnce() -> Result<T>,
        serialize: impl FnOnce(&T) -> String,
    ) -> Result<T> {
        let Some(store) = &self.store else { return derive() };
        let inputs = self.input_text(kind);
        if let Some(body) = store.load(kind, &inputs) {
            match parse(&body) {
                Ok(v) => {
                    self.record(kind, CacheOutcome::Hit);
                    return Ok(v);
                }
                Err(e) => self.record(kind, CacheOutcome::Rejected(e.to_string())),
            }
        } else {
            self.record(kind, CacheOutcome::Miss);
        }
        let v = derive()?;
        store.save(kind, &inputs, &serialize(&v))?;
        Ok(v)
    }

    pub fn group(&self) -> Result<&CoxeterGroup> {
        cell(&self.group, || {
            self.cached(
                ArtifactKind::Group,
                |body| {
                    let elements = body.lines().filter(|l| !l.is_empty()).map(GroupElement::from_canonical_text).collect::<Result<Vec<_>>>()?;
                    CoxeterGroup::from_elements(RootSystem::h4()?, elements)
                },
                CoxeterGroup::h4,
                |g| g.elements.iter().map(|e| e.canonical_text() + "\n").collect(),
            )
        })
    }

    /// Orbit of the first fundamental weight (length 120).
    pub fn minimal_orbit(&self) -> Result<Vec<Vector4>> {
        Ok(self.group()?.orbit(&paper_weights()[0].0))
    }

    /// The published τ₁..τ₄ as printed.
    pub fn tau_printed(&self) -> Result<TauMap> {
        tau_explicit(&self.reference)
    }

    /// τ₁..τ₃ as printed and the relabelled τ₄.
    pub fn tau(&self) -> Result<&TauArtifact> {
        cell(&self.tau, || {
            self.cached(
                ArtifactKind::Tau,
                |body| self.parse_tau(body),
                || {
                    let (map, relabel) = tau_relabelled(&self.reference, &self.minimal_orbit()?)?;
                    Ok(TauArtifact { map, relabel })
                },
                |t| {
                    let mut out = format!("scale {}\nfactor {}\nmoved {}\n", t.relabel.scale, t.relabel.factor, t.relabel.moved);
                    for (a, p) in t.map.tau.iter().enumerate() {
                        out.push_str(&format!("tau{} {p}\n", a + 1));
                    }
                    out
                },
            )
        })
    }

    fn parse_tau(&self, body: &str) -> Result<TauArtifact> {
        let mut lines = body.lines();
        let scale: ExactScalar = line_value(&mut lines, "scale")?.parse()?;
        let factor: ExactScalar = line_value(&mut lines, "factor")?.parse()?;
        let moved: usize = line_value(&mut lines, "moved")?.parse().map_err(|_| Error::Parse("bad moved count".into()))?;
        let mut tau = Vec::new();
        for a in 1..=4 {
            tau.push(Polynomial::parse(line_value(&mut lines, &format!("tau{a}"))?, Context::Cartesian)?);
        }
        let map = TauMap::new(tau.try_into().expect("four"));
        let printed = self.tau_printed()?;
        if map.tau[..3] != printed.tau[..3] {
            return Err(Error::Parse("stored tau1..tau3 differ from the printed ones".into()));
        }
        if map.tau[3].homogeneous_parts().keys().collect::<Vec<_>>() != [&30] {
            return Err(Error::NotInvariant("stored tau4 is not homogeneous of degree 30".into()));
        }
        let point = spot_point();
        let x = coordinates_of(&point);
        let roots = RootSystem::h4()?;
        for s in roots.simple_reflections() {
            let y = s.apply(&x);
            if map.tau[3].evaluate(&x)? != map.tau[3].evaluate(&y)? {
                return Err(Error::NotInvariant("stored tau4 fails its spot identity".into()));
            }
        }
        let relabel = RelabelledTau4 { tau4: map.tau[3].clone(), scale, factor, moved };
        Ok(TauArtifact { map, relabel })
    }

    pub fn gauge_hamiltonian(&self) -> Result<&GaugeOperator> {
        cell(&self.gauge_h, || rotated_hamiltonian(&ModelSpec::h4()))
    }

    /// The rotated integral shifted by its ground value, with that value.
    pub fn gauge_integral(&self) -> Result<&(GaugeOperator, Polynomial)> {
        cell(&self.gauge_f, || rotated_integral(&ModelSpec::h4()))
    }

    fn checked_operator(&self, text: &str, origin: &GaugeOperator) -> Result<DiffOperator> {
        let op = DiffOperator::from_canonical_text(text)?;
        let point = spot_point();
        let jets = tau_jets(&self.tau()?.map, &point)?;
        if !operator_spot_identity(&op, origin, &jets, &point)? {
            return Err(Error::NotInvariant("stored operator fails its spot identity".into()));
        }
        Ok(op)
    }

    /// `h` in τ with symbolic ν, ω.
    pub fn hamiltonian(&self) -> Result<&DiffOperator> {
        cell(&self.hamiltonian, || {
            self.cached(
                ArtifactKind::Hamiltonian,
                |body| self.checked_operator(body, self.gauge_hamiltonian()?),
                || pushforward(self.gauge_hamiltonian()?, &self.tau()?.map),
                DiffOperator::to_canonical_text,
            )
        })
    }

    /// `f = F − γ₀` in τ with symbolic ν, ω.
    pub fn integral(&self) -> Result<&IntegralArtifact> {
        cell(&self.integral, || {
            self.cached(
                ArtifactKind::Integral,
                |body| {
                    let (first, rest) = body.split_once('\n').ok_or_else(|| Error::Parse("empty integral entry".into()))?;
                    let g = first.strip_prefix("gamma0 ").ok_or_else(|| Error::Parse("missing gamma0".into()))?;
                    let gamma0 = Polynomial::parse(g, Context::Invariant)?;
                    let (origin, g0) = self.gauge_integral()?;
                    if gamma0 != g0.clone().with_context(Context::Invariant) {
                        return Err(Error::FNotEigen("stored ground value differs".into()));
                    }
                    Ok(IntegralArtifact { operator: self.checked_operator(rest, origin)?, gamma0 })
                },
                || {
                    let (origin, g0) = self.gauge_integral()?;
                    let operator = pushforward(origin, &self.tau()?.map)?;
                    Ok(IntegralArtifact { operator, gamma0: g0.clone().with_context(Context::Invariant) })
                },
                |f| format!("gamma0 {}\n{}", f.gamma0, f.operator.to_canonical_text()),
            )
        })
    }

    /// `J = c·Δ₁Δ₂Δ₃` and `J²` rewritten in τ.
    pub fn boundary(&self) -> Result<&BoundaryArtifact> {
        cell(&self.boundary, || {
            let reference_poly = self.reference.boundary_polynomial()?;
            self.cached(
                ArtifactKind::Boundary,
                |body| {
                    let mut lines = body.lines();
                    let c: ExactScalar = line_value(&mut lines, "c")?.parse()?;
                    let j2 = Polynomial::parse(line_value(&mut lines, "j2")?, Context::Invariant)?;
                    let point = spot_point();
                    let jets = tau_jets(&self.tau()?.map, &point)?;
                    let j = jacobian_at(&jets);
                    let x = coordinates_of(&point);
                    let prod: ExactScalar = delta_factor_forms().iter().map(|f| f.dot(&x)).product();
                    let at: Vec<ExactScalar> = jets.iter().map(|j| j.value.clone()).collect();
                    if j != &c * &prod || j2.evaluate(&at)? != &j * &j {
                        return Err(Error::NotInvariant("stored boundary fails its spot identity".into()));
                    }
                    Ok(BoundaryArtifact { jacobian_factor: c, surface: BoundarySurface { ratio: proportionality(&j2, &reference_poly), jacobian_squared: j2 } })
                },
                || {
                    let tau = &self.tau()?.map;
                    let j = jacobian(tau);
                    let c = jacobian_root_factor(&j, &delta_factor_forms())?;
                    let surface = boundary_surface(&j, tau, &reference_poly)?;
                    Ok(BoundaryArtifact { jacobian_factor: c, surface })
                },
                |b| format!("c {}\nj2 {}\n", b.jacobian_factor, b.surface.jacobian_squared),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::sync::Arc;

    #[derive(Default, Clone)]
    struct Memory(Arc<Mutex<HashMap<(ArtifactKind, String), String>>>);

    impl ArtifactStore for Memory {
        fn load(&self, kind: ArtifactKind, inputs: &str) -> Option<String> {
            self.0.lock().unwrap().get(&(kind, inputs.to_string())).cloned()
        }

        fn save(&self, kind: ArtifactKind, inputs: &str, body: &str) -> Result<()> {
            self.0.lock().unwrap().insert((kind, inputs.to_string()), body.to_string());
            Ok(())
        }
    }

    impl Memory {
        fn edit(&self, kind: ArtifactKind, f: impl Fn(&str) -> String) {
            for ((k, _), v) in self.0.lock().unwrap().iter_mut() {
                if *k == kind {
                    *v = f(v);
                }
            }
        }
    }

    #[test]
    fn spot_point_avoids_mirrors() {
        let x = coordinates_of(&spot_point());
        assert!(delta_factor_forms().iter().all(|f| !f.dot(&x).is_zero()));
    }

    #[test]
    fn group_and_tau_survive_a_store_roundtrip() {
        let mem = Memory::default();
        let cold = Pipeline::embedded().unwrap().with_store(Box::new(mem.clone()));
        let tau = cold.tau().unwrap().map.clone();
        assert_eq!(cold.cache_events().iter().map(|e| &e.outcome).collect::<Vec<_>>(), vec![&CacheOutcome::Miss; 2]);

        let warm = Pipeline::embedded().unwrap().with_store(Box::new(mem.clone()));
        assert_eq!(warm.tau().unwrap().map, tau);
        assert_eq!(warm.group().unwrap().order(), 14400);
        assert!(warm.cache_events().iter().all(|e| e.outcome == CacheOutcome::Hit));

        // flip one coefficient of the stored tau4
        mem.edit(ArtifactKind::Tau, |body| {
            body.lines()
                .map(|l| if l.starts_with("tau4 ") { l.replacen("*x1", "1*x1", 1) } else { l.to_string() })
                .collect::<Vec<_>>()
                .join("\n")
        });
        let again = Pipeline::embedded().unwrap().with_store(Box::new(mem.clone()));
        assert_eq!(again.tau().unwrap().map, tau);
        assert!(again
            .cache_events()
            .iter()
            .any(|e| e.kind == ArtifactKind::Tau && matches!(e.outcome, CacheOutcome::Rejected(_))));
    }
}
