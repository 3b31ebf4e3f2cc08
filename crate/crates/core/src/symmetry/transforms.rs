use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{dirac_monopole_residual, FieldOp, FourierField};
use crate::clifford::{gamma_basis, Matrix4c, Spinor4};
use crate::potentials::{AxialPotential, PotentialTerm, ScalarField, SignMap};
use crate::{Error, Point4, Result, Units, C64};

/// Residual above which a configuration is not accepted as a solution.
pub const SOLUTION_THRESHOLD: f64 = 1e-8;

/// A transformation of a (field, potential) configuration.
pub trait SymmetryTransform: Send + Sync {
    fn name(&self) -> &str;

    fn apply(
        &self,
        field: &FourierField,
        pot: &AxialPotential,
        g: f64,
        units: Units,
    ) -> Result<(FourierField, AxialPotential)>;

    /// The pointwise spinor map, for transforms that have one.
    fn pointwise(&self, _psi: &Spinor4) -> Option<Spinor4> {
        None
    }
}

/// A discrete map `Ψ'(t, x) = M·Ψ(^*)(±t, ±x)` with a sign map on `(B, W)`.
struct Discrete {
    name: String,
    matrix: Matrix4c,
    conjugate: bool,
    time: f64,
    space: f64,
    pot_map: SignMap,
}

impl SymmetryTransform for Discrete {
    fn name(&self) -> &str {
        &self.name
    }

    fn apply(
        &self,
        field: &FourierField,
        pot: &AxialPotential,
        _g: f64,
        _units: Units,
    ) -> Result<(FourierField, AxialPotential)> {
        let f = field.with_op(FieldOp::Discrete {
            matrix: self.matrix,
            conjugate: self.conjugate,
            time: self.time,
            space: self.space,
        });
        Ok((f, pot.mapped(self.pot_map)))
    }

    fn pointwise(&self, psi: &Spinor4) -> Option<Spinor4> {
        let v = if self.conjugate { psi.conj() } else { *psi };
        Some(v.apply(&self.matrix))
    }
}

fn parity(name: &str, w: f64) -> Discrete {
    Discrete {
        name: name.into(),
        matrix: *gamma_basis().g(4),
        conjugate: false,
        time: 1.0,
        space: -1.0,
        pot_map: SignMap {
            time: 1.0,
            space: -1.0,
            b: 1.0,
            w,
        },
    }
}

fn time_reversal(name: &str, b: f64) -> Discrete {
    let gb = gamma_basis();
    Discrete {
        name: name.into(),
        matrix: gb.g(3) * gb.g(1) * C64::new(0.0, -1.0),
        conjugate: true,
        time: -1.0,
        space: 1.0,
        pot_map: SignMap {
            time: -1.0,
            space: 1.0,
            b,
            w: 1.0,
        },
    }
}

fn charge_conjugation(name: &str, conjugate: bool) -> Discrete {
    Discrete {
        name: name.into(),
        matrix: *gamma_basis().g(2),
        conjugate,
        time: 1.0,
        space: 1.0,
        pot_map: SignMap::default(),
    }
}

/// `Ψ ↦ e^{iφ}Ψ` with constant φ; the potential is untouched.
struct PhaseGauge {
    phi: ScalarField,
}

impl SymmetryTransform for PhaseGauge {
    fn name(&self) -> &str {
        "phase-gauge"
    }

    fn apply(
        &self,
        field: &FourierField,
        pot: &AxialPotential,
        _g: f64,
        _units: Units,
    ) -> Result<(FourierField, AxialPotential)> {
        Ok((field.with_op(FieldOp::GlobalPhase(self.phi.clone())), pot.clone()))
    }
}

/// `Ψ ↦ exp(i(g/ħc)γ₅φ)Ψ`, `W ↦ W + (1/c)∂_tφ`, `B ↦ B − ∇φ`.
struct ChiralGauge {
    name: &'static str,
    phi: ScalarField,
    shift_potential: bool,
}

impl SymmetryTransform for ChiralGauge {
    fn name(&self) -> &str {
        self.name
    }

    fn apply(
        &self,
        field: &FourierField,
        pot: &AxialPotential,
        g: f64,
        units: Units,
    ) -> Result<(FourierField, AxialPotential)> {
        let q = units.coupling(g);
        let f = field.with_op(FieldOp::ChiralPhase(self.phi.scaled(q)));
        let p = if self.shift_potential {
            pot.clone().with_term(PotentialTerm::GaugeShift {
                phi: self.phi.clone(),
                c: units.c,
            })
        } else {
            pot.clone()
        };
        Ok((f, p))
    }
}

type Factory = fn(Option<&ScalarField>) -> Result<Box<dyn SymmetryTransform>>;

/// Named transforms, selected at runtime.
pub struct TransformRegistry {
    entries: BTreeMap<String, Factory>,
}

fn no_param(name: &str, phi: Option<&ScalarField>) -> Result<()> {
    match phi {
        Some(_) => Err(Error::InvalidParameter(format!("transform `{name}` takes no gauge function"))),
        None => Ok(()),
    }
}

fn need_param<'a>(name: &str, phi: Option<&'a ScalarField>) -> Result<&'a ScalarField> {
    phi.ok_or_else(|| Error::InvalidParameter(format!("transform `{name}` needs a gauge function")))
}

impl Default for TransformRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl TransformRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// P, T, C, the two gauges, and the corrupted negative controls.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("P", |phi| {
            no_param("P", phi)?;
            Ok(Box::new(parity("P", -1.0)))
        });
        r.register("T", |phi| {
            no_param("T", phi)?;
            Ok(Box::new(time_reversal("T", -1.0)))
        });
        r.register("C", |phi| {
            no_param("C", phi)?;
            Ok(Box::new(charge_conjugation("C", true)))
        });
        r.register("phase-gauge", |phi| {
            let phi = need_param("phase-gauge", phi)?;
            if !phi.is_constant() {
                return Err(Error::InvalidParameter(
                    "phase gauge without an electric potential admits only a constant phase".into(),
                ));
            }
            Ok(Box::new(PhaseGauge { phi: phi.clone() }))
        });
        r.register("chiral-gauge", |phi| {
            Ok(Box::new(ChiralGauge {
                name: "chiral-gauge",
                phi: need_param("chiral-gauge", phi)?.clone(),
                shift_potential: true,
            }))
        });
        r.register("corrupt:T-no-B-flip", |phi| {
            no_param("corrupt:T-no-B-flip", phi)?;
            Ok(Box::new(time_reversal("corrupt:T-no-B-flip", 1.0)))
        });
        r.register("corrupt:P-no-W-flip", |phi| {
            no_param("corrupt:P-no-W-flip", phi)?;
            Ok(Box::new(parity("corrupt:P-no-W-flip", 1.0)))
        });
        r.register("corrupt:C-no-conjugation", |phi| {
            no_param("corrupt:C-no-conjugation", phi)?;
            Ok(Box::new(charge_conjugation("corrupt:C-no-conjugation", false)))
        });
        r.register("corrupt:chiral-gauge-no-shift", |phi| {
            Ok(Box::new(ChiralGauge {
                name: "corrupt:chiral-gauge-no-shift",
                phi: need_param("corrupt:chiral-gauge-no-shift", phi)?.clone(),
                shift_potential: false,
            }))
        });
        r
    }

    pub fn register(&mut self, name: &str, factory: Factory) {
        self.entries.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn create(&self, name: &str, phi: Option<&ScalarField>) -> Result<Box<dyn SymmetryTransform>> {
        let f = self.entries.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "transform",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        f(phi)
    }
}

/// A transform request: registry name plus optional gauge function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: String,
    #[serde(default)]
    pub phi: Option<ScalarField>,
}

impl TransformSpec {
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.into(),
            phi: None,
        }
    }

    pub fn gauge(kind: &str, phi: ScalarField) -> Self {
        Self {
            kind: kind.into(),
            phi: Some(phi),
        }
    }

    pub fn build(&self) -> Result<Box<dyn SymmetryTransform>> {
        TransformRegistry::with_defaults().create(&self.kind, self.phi.as_ref())
    }
}

/// Applies a phase or chiral gauge transformation.
pub fn apply_gauge(
    field: &FourierField,
    pot: &AxialPotential,
    spec: &TransformSpec,
    g: f64,
    units: Units,
) -> Result<(FourierField, AxialPotential)> {
    if !matches!(spec.kind.as_str(), "phase-gauge" | "chiral-gauge") {
        return Err(Error::InvalidParameter(format!("`{}` is not a gauge transform", spec.kind)));
    }
    spec.build()?.apply(field, pot, g, units)
}

/// Applies P, T or C.
pub fn apply_ptc(
    field: &FourierField,
    pot: &AxialPotential,
    spec: &TransformSpec,
    g: f64,
    units: Units,
) -> Result<(FourierField, AxialPotential)> {
    if !matches!(spec.kind.as_str(), "P" | "T" | "C") {
        return Err(Error::InvalidParameter(format!("`{}` is not one of P, T, C", spec.kind)));
    }
    spec.build()?.apply(field, pot, g, units)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of an invariance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub transform: String,
    pub residual_before: f64,
    pub residual_after: f64,
    pub verdict: Verdict,
}

/// Checks that a transform maps a solution to a solution: PASS iff the
/// residual after is at most `max(10·before, 1e-10)`.
pub fn invariance_certificate(
    field: &FourierField,
    pot: &AxialPotential,
    g: f64,
    units: Units,
    transform: &dyn SymmetryTransform,
    points: &[Point4],
) -> Result<Certificate> {
    let before = dirac_monopole_residual(field, pot, g, units, points)?;
    if before > SOLUTION_THRESHOLD {
        return Err(Error::NotASolution {
            residual: before,
            threshold: SOLUTION_THRESHOLD,
        });
    }
    let (f2, p2) = transform.apply(field, pot, g, units)?;
    let after = dirac_monopole_residual(&f2, &p2, g, units, points)?;
    let verdict = if after <= (10.0 * before).max(1e-10) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Certificate {
        transform: transform.name().to_string(),
        residual_before: before,
        residual_after: after,
        verdict,
    })
}
