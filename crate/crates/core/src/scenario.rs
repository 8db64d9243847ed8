//! Scenario files: a flat pair, explicit knobs and a pipeline of operations,
//! executed deterministically into a JSON report.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::coeffs::{format_rational, Coefficient, CoefficientGroup, Mod2};
use crate::equivariant::{
    build_quotient_complex, equivariant_sign_identity_residual, equivariant_wrong_way, identify_class,
    kuhn_fundamental_cycle, restrict_equivariance, snf_homology, EquivariantChain, TranslationAction,
};
use crate::error::{Error, Result};
use crate::geometry::FlatPair;
use crate::io::{self, AnyChain};
use crate::spaces::{LatticeSpace, Window};
use crate::verify::{general_position_tuple, random_coefficient, random_tuple};
use crate::wrongway::WrongWayContext;
use crate::chains::UfChain;

const STAT_RADII: [u32; 3] = [0, 1, 2];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Equivariant Kuhn cycle of `T^n`.
    Kuhn,
    /// Forget equivariance down to `Z^{n-q} × 0` within `radius` of the flat.
    Restrict,
    Boundary,
    WrongWay,
    SignIdentity,
    /// Class of the current equivariant cycle in its quotient complex.
    Identify,
}

impl Step {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "kuhn" => Self::Kuhn,
            "restrict" => Self::Restrict,
            "boundary" => Self::Boundary,
            "wrong-way" => Self::WrongWay,
            "sign-identity" => Self::SignIdentity,
            "identify" => Self::Identify,
            other => return Err(Error::Parse(format!("unknown pipeline step {other:?}"))),
        })
    }

    fn tag(&self) -> &'static str {
        match self {
            Self::Kuhn => "kuhn",
            Self::Restrict => "restrict",
            Self::Boundary => "boundary",
            Self::WrongWay => "wrong-way",
            Self::SignIdentity => "sign-identity",
            Self::Identify => "identify",
        }
    }
}

/// Seeded random chains, drawn in general position unless the scenario
/// perturbs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomInput {
    pub count: usize,
    pub degree: usize,
    pub terms: usize,
    pub extent: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    None,
    Chains(Vec<Value>),
    Random(RandomInput),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub pair: FlatPair,
    pub group: CoefficientGroup,
    pub perturb: bool,
    pub seed: u64,
    pub window: Window,
    pub r_max: i64,
    pub radius: i64,
    pub input: Input,
    pub pipeline: Vec<Step>,
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("scenario is missing {key:?}")))
}

fn int_field(v: &Value, key: &str) -> Result<i64> {
    field(v, key)?
        .as_i64()
        .ok_or_else(|| Error::Parse(format!("{key:?} must be an integer")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    let x = int_field(v, key)?;
    usize::try_from(x).map_err(|_| Error::Parse(format!("{key:?} must be non-negative")))
}

impl Scenario {
    /// Parses a scenario; chain files named in `inputs` resolve against `base`.
    pub fn from_json(v: &Value, base: Option<&Path>) -> Result<Self> {
        let name = field(v, "name")?
            .as_str()
            .ok_or_else(|| Error::Parse("name must be a string".into()))?
            .to_string();
        let pair_v = field(v, "pair")?
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse("pair must be [n, q]".into()))?;
        let dims: Vec<usize> = pair_v
            .iter()
            .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse("pair entries must be integers".into())))
            .collect::<Result<_>>()?;
        let orientation = int_field(v, "orientation")?;
        if orientation != 1 && orientation != -1 {
            return Err(Error::Parse("orientation must be 1 or -1".into()));
        }
        let pair = FlatPair::new(dims[0], dims[1])?.with_orientation(orientation);
        let group = io::group_from_json(field(v, "group")?)?;
        let perturb = field(v, "perturb")?
            .as_bool()
            .ok_or_else(|| Error::Parse("perturb must be a boolean".into()))?;
        let seed = field(v, "seed")?
            .as_u64()
            .ok_or_else(|| Error::Parse("seed must be a non-negative integer".into()))?;
        let window = io::window_from_json(field(v, "window")?)?;
        if window.dim() != pair.ambient_dim() {
            return Err(Error::Parse("window dimension must match the pair".into()));
        }
        let r_max = int_field(v, "r_max")?;
        let radius = int_field(v, "radius")?;
        let input = match field(v, "inputs")? {
            Value::Null => Input::None,
            Value::Object(obj) => parse_input(obj, base)?,
            _ => return Err(Error::Parse("inputs must be an object or null".into())),
        };
        let pipeline = field(v, "pipeline")?
            .as_array()
            .ok_or_else(|| Error::Parse("pipeline must be an array".into()))?
            .iter()
            .map(|s| s.as_str().ok_or_else(|| Error::Parse("pipeline steps are strings".into())).and_then(Step::parse))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name,
            pair,
            group,
            perturb,
            seed,
            window,
            r_max,
            radius,
            input,
            pipeline,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&io::parse_json(&text)?, path.parent())
    }

    /// Echo of every knob, included at the top of the report.
    pub fn config_json(&self) -> Value {
        json!({
            "name": self.name,
            "pair": [self.pair.ambient_dim(), self.pair.codim()],
            "orientation": self.pair.orientation(),
            "group": self.group.tag(),
            "perturb": self.perturb,
            "seed": self.seed,
            "window": io::window_to_json(&self.window),
            "r_max": self.r_max,
            "radius": self.radius,
            "pipeline": self.pipeline.iter().map(Step::tag).collect::<Vec<_>>(),
        })
    }

    fn context(&self) -> Result<WrongWayContext> {
        WrongWayContext::new(self.pair, self.window.clone(), self.perturb)
    }

    pub fn run(&self) -> Result<Value> {
        let mut state = self.initial_state()?;
        let mut steps = Vec::new();
        let mut summary = Map::new();
        for step in &self.pipeline {
            let (next, record) = self.apply(step, state, &mut summary)?;
            state = next;
            steps.push(json!({"op": step.tag(), "result": record}));
        }
        let mut report = Map::new();
        report.insert("scenario".into(), self.config_json());
        report.insert("steps".into(), Value::Array(steps));
        for (k, v) in summary {
            report.insert(k, v);
        }
        Ok(Value::Object(report))
    }

    fn initial_state(&self) -> Result<State> {
        match &self.input {
            Input::None => Ok(State::Empty),
            Input::Chains(values) => {
                let chains = values.iter().map(AnyChain::from_json).collect::<Result<Vec<_>>>()?;
                if let Some(c) = chains.iter().find(|c| c.group() != self.group) {
                    return Err(Error::GroupMismatch {
                        expected: self.group.to_string(),
                        found: c.group().to_string(),
                    });
                }
                Ok(State::Chains(chains))
            }
            Input::Random(spec) => Ok(State::Chains(self.random_chains(spec)?)),
        }
    }

    fn random_chains(&self, spec: &RandomInput) -> Result<Vec<AnyChain>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let ctx = self.context()?;
        let mut out = Vec::with_capacity(spec.count);
        while out.len() < spec.count {
            let chain = match self.group {
                CoefficientGroup::Integers => AnyChain::Z(self.random_chain(&mut rng, spec)?),
                CoefficientGroup::IntegersMod2 => AnyChain::Z2(self.random_chain::<Mod2>(&mut rng, spec)?),
                CoefficientGroup::Rationals => AnyChain::Q(self.random_chain::<BigRational>(&mut rng, spec)?),
            };
            // Keep only chains whose wrong-way data is defined.
            let defined = chain.wrong_way(&ctx).is_ok() && chain.boundary().and_then(|b| b.wrong_way(&ctx)).is_ok();
            if defined {
                out.push(chain);
            }
        }
        Ok(out)
    }

    fn random_chain<A: Coefficient>(&self, rng: &mut ChaCha8Rng, spec: &RandomInput) -> Result<UfChain<A>> {
        let n = self.pair.ambient_dim();
        let mut c = UfChain::zero(LatticeSpace::new(n)?, spec.degree);
        for _ in 0..spec.terms {
            let t = if self.perturb {
                random_tuple(rng, n, spec.degree + 1, spec.extent, 2)
            } else {
                general_position_tuple(rng, &self.pair, spec.degree + 1, spec.extent)
            };
            c.add_term(t, random_coefficient(rng))?;
        }
        Ok(c)
    }

    fn lambda(&self) -> Result<TranslationAction> {
        TranslationAction::coordinate_sublattice(LatticeSpace::new(self.pair.ambient_dim())?, self.pair.flat_dim())
    }

    fn apply(&self, step: &Step, state: State, summary: &mut Map<String, Value>) -> Result<(State, Value)> {
        match (step, state) {
            (Step::Kuhn, _) => {
                let k = kuhn_fundamental_cycle(self.pair.ambient_dim())?;
                let record = equivariant_stats(&k);
                Ok((State::Equivariant(k), record))
            }
            (Step::Restrict, State::Equivariant(c)) => {
                let r = restrict_equivariance(&c, &self.lambda()?, &self.pair, self.radius)?;
                let record = equivariant_stats(&r);
                Ok((State::Equivariant(r), record))
            }
            (Step::Boundary, State::Equivariant(c)) => {
                let b = c.boundary()?;
                let record = equivariant_stats(&b);
                Ok((State::Equivariant(b), record))
            }
            (Step::WrongWay, State::Equivariant(c)) => {
                let w = equivariant_wrong_way(&c, &self.context()?)?;
                let record = equivariant_stats(&w);
                Ok((State::Equivariant(w), record))
            }
            (Step::SignIdentity, State::Equivariant(c)) => {
                let residual = equivariant_sign_identity_residual(&c, &self.context()?)?;
                let norm = residual.orbits().map(|(_, a)| a.norm()).max().unwrap_or_else(BigRational::zero);
                summary.insert("residual_norm".into(), json!(format_rational(&norm)));
                let record = json!({"residual_orbits": residual.len(), "residual_norm": format_rational(&norm)});
                Ok((State::Equivariant(c), record))
            }
            (Step::Identify, State::Equivariant(c)) => {
                let complex = build_quotient_complex(c.action(), self.r_max, 0..c.degree() + 2)?;
                let mut reports = snf_homology(&complex)?;
                let class = identify_class(&c, &complex)?;
                for r in &mut reports {
                    if r.degree == c.degree() {
                        r.class = Some(class.clone());
                    }
                }
                let homology = serde_json::to_value(&reports).expect("reports serialize");
                summary.insert("class".into(), json!({"degree": c.degree(), "coordinates": class}));
                summary.insert("homology".into(), homology.clone());
                let record = json!({"basis_sizes": complex.basis_sizes(), "homology": homology});
                Ok((State::Equivariant(c), record))
            }
            (Step::Boundary, State::Chains(cs)) => {
                let next = cs.iter().map(AnyChain::boundary).collect::<Result<Vec<_>>>()?;
                let record = chains_stats(&next);
                Ok((State::Chains(next), record))
            }
            (Step::WrongWay, State::Chains(cs)) => {
                let ctx = self.context()?;
                let mut next = Vec::with_capacity(cs.len());
                let mut ratios = Vec::new();
                for c in &cs {
                    let w = c.wrong_way(&ctx)?;
                    ratios.push(norm_comparison(c, &w));
                    next.push(w);
                }
                let mut record = chains_stats(&next);
                let within: Vec<bool> = (0..=3).map(|k| ratios.iter().all(|r| r[k])).collect();
                record["norm_bound_holds_by_n"] = json!(within);
                Ok((State::Chains(next), record))
            }
            (Step::SignIdentity, State::Chains(cs)) => {
                let ctx = self.context()?;
                let mut worst = BigRational::zero();
                let mut nonzero = 0;
                for c in &cs {
                    let residual = c.sign_identity_residual(&ctx)?;
                    if !residual.is_zero() {
                        nonzero += 1;
                    }
                    worst = worst.max(residual.sup_norm());
                }
                summary.insert("residual_norm".into(), json!(format_rational(&worst)));
                let record = json!({
                    "chains": cs.len(),
                    "nonzero_residuals": nonzero,
                    "residual_norm": format_rational(&worst),
                });
                Ok((State::Chains(cs), record))
            }
            (step, State::Empty) => Err(Error::Parse(format!("step {:?} needs an input", step.tag()))),
            (step, _) => Err(Error::Parse(format!("step {:?} does not apply to this input", step.tag()))),
        }
    }
}

fn parse_input(obj: &Map<String, Value>, base: Option<&Path>) -> Result<Input> {
    if let Some(r) = obj.get("random") {
        return Ok(Input::Random(RandomInput {
            count: usize_field(r, "count")?,
            degree: usize_field(r, "degree")?,
            terms: usize_field(r, "terms")?,
            extent: int_field(r, "extent")?,
        }));
    }
    let mut chains = Vec::new();
    if let Some(inline) = obj.get("chains") {
        chains.extend(
            inline
                .as_array()
                .ok_or_else(|| Error::Parse("chains must be an array".into()))?
                .iter()
                .cloned(),
        );
    }
    if let Some(files) = obj.get("files") {
        for f in files.as_array().ok_or_else(|| Error::Parse("files must be an array".into()))? {
            let rel = f.as_str().ok_or_else(|| Error::Parse("file names are strings".into()))?;
            let path = base.map_or_else(|| PathBuf::from(rel), |b| b.join(rel));
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            chains.push(io::parse_json(&text)?);
        }
    }
    if chains.is_empty() {
        return Err(Error::Parse("inputs must name random, chains or files".into()));
    }
    Ok(Input::Chains(chains))
}

enum State {
    Empty,
    Chains(Vec<AnyChain>),
    Equivariant(EquivariantChain<i64>),
}

fn equivariant_stats(c: &EquivariantChain<i64>) -> Value {
    json!({
        "degree": c.degree(),
        "orbits": c.len(),
        "propagation": c.propagation(),
        "generators": c.action().generators(),
    })
}

fn chains_stats(cs: &[AnyChain]) -> Value {
    let stats: Vec<Value> = cs.iter().map(|c| c.stats_json(&STAT_RADII)).collect();
    json!({"chains": cs.len(), "stats": stats})
}

/// `‖w‖_{∞,k} ≤ ‖c‖_{∞,k}` for `k = 0..=3`.
fn norm_comparison(c: &AnyChain, w: &AnyChain) -> Vec<bool> {
    (0..=3).map(|k| w.uf_norm(k) <= c.uf_norm(k)).collect()
}

/// Maps an error to the CLI exit code: 2 for general-position failures,
/// 3 for truncation, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DegeneratePosition { .. } => 2,
        Error::RadiusTooSmall { .. } | Error::NotRepresentable { .. } | Error::OutsideWindow { .. } => 3,
        _ => 1,
    }
}

/// Machine-readable error object written to stderr.
pub fn error_json(e: &Error) -> Value {
    match e {
        Error::DegeneratePosition { vertices } => {
            json!({"error": "degenerate-position", "tuple": vertices, "message": e.to_string()})
        }
        Error::NotRepresentable { degree, tuple } => {
            json!({"error": "not-representable", "degree": degree, "tuple": tuple, "message": e.to_string()})
        }
        _ => json!({"error": error_kind(e), "message": e.to_string()}),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::RadiusTooSmall { .. } => "radius-too-small",
        Error::OutsideWindow { .. } => "outside-window",
        _ => "invalid-input",
    }
}

/// Bundled scenario files shipped with the crate.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "t2-to-s1" => Some(include_str!("../scenarios/t2-to-s1.json")),
        "t3-to-t2" => Some(include_str!("../scenarios/t3-to-t2.json")),
        "t3-to-s1" => Some(include_str!("../scenarios/t3-to-s1.json")),
        "sign-identity-z3-q2" => Some(include_str!("../scenarios/sign-identity-z3-q2.json")),
        "sign-identity-z2-q1-mod2" => Some(include_str!("../scenarios/sign-identity-z2-q1-mod2.json")),
        _ => None,
    }
}

pub const BUNDLED: [&str; 5] = [
    "t2-to-s1",
    "t3-to-t2",
    "t3-to-s1",
    "sign-identity-z3-q2",
    "sign-identity-z2-q1-mod2",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn load(name: &str) -> Scenario {
        Scenario::from_json(&io::parse_json(bundled(name).unwrap()).unwrap(), None).unwrap()
    }

    #[test]
    fn t2_to_s1_reports_unit_class() {
        let report = load("t2-to-s1").run().unwrap();
        let class = &report["class"];
        assert_eq!(class["degree"], json!(1));
        let coords = class["coordinates"].as_array().unwrap();
        assert_eq!(coords.len(), 1);
        assert_eq!(coords[0].as_i64().unwrap().abs(), 1);
    }

    #[test]
    fn sign_identity_scenario_has_zero_residual() {
        for name in ["sign-identity-z3-q2", "sign-identity-z2-q1-mod2"] {
            let report = load(name).run().unwrap();
            assert_eq!(report["residual_norm"], json!("0/1"), "{name}");
        }
    }

    #[test]
    fn all_bundled_scenarios_parse_and_run() {
        for name in BUNDLED {
            let s = load(name);
            assert_eq!(s.name, name);
            let a = io::to_canonical_string(&s.run().unwrap());
            let b = io::to_canonical_string(&s.run().unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 1);
        assert_eq!(exit_code(&Error::DegeneratePosition { vertices: vec![] }), 2);
        assert_eq!(exit_code(&Error::RadiusTooSmall { radius: 0, propagation: 1 }), 3);
    }

    #[test]
    fn too_small_radius_is_truncation() {
        let mut s = load("t2-to-s1");
        s.radius = 0;
        assert_eq!(exit_code(&s.run().unwrap_err()), 3);
    }
}
