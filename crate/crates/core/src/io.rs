//! JSON interchange for chains, equivariant chains, simplices and windows.
//!
//! Objects are built as `serde_json::Value`, whose maps keep keys sorted, and
//! chain terms are emitted in tuple order, so equal values always print to
//! identical bytes.

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::chains::{Tuple, UfChain};
use crate::coeffs::{format_rational, Coefficient, CoefficientGroup, Mod2};
use crate::equivariant::{EquivariantChain, TranslationAction};
use crate::error::{Error, Result};
use crate::geometry::{AffineSimplex, FlatPair};
use crate::spaces::{LatticeSpace, Point, Window};
use crate::wrongway::WrongWayContext;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(format!("{what} must be a non-negative integer")))
}

pub fn point_from_json(v: &Value) -> Result<Point> {
    v.as_array()
        .ok_or_else(|| parse_err("point must be an array"))?
        .iter()
        .map(|c| c.as_i64().ok_or_else(|| parse_err("point coordinates must be integers")))
        .collect()
}

pub fn tuple_from_json(v: &Value) -> Result<Tuple> {
    v.as_array()
        .ok_or_else(|| parse_err("tuple must be an array of points"))?
        .iter()
        .map(point_from_json)
        .collect()
}

pub fn space_to_json(space: LatticeSpace) -> Value {
    json!({"kind": "lattice", "dim": space.dim()})
}

pub fn space_from_json(v: &Value) -> Result<LatticeSpace> {
    match field(v, "kind")?.as_str() {
        Some("lattice") => LatticeSpace::new(as_usize(field(v, "dim")?, "dim")?),
        _ => Err(parse_err("space kind must be \"lattice\"")),
    }
}

pub fn window_to_json(w: &Window) -> Value {
    json!({"lo": w.lo, "hi": w.hi})
}

pub fn window_from_json(v: &Value) -> Result<Window> {
    Window::new(point_from_json(field(v, "lo")?)?, point_from_json(field(v, "hi")?)?)
}

pub fn group_from_json(v: &Value) -> Result<CoefficientGroup> {
    v.as_str().ok_or_else(|| parse_err("group must be a string"))?.parse()
}

/// `"n,q"` as used on the command line.
pub fn parse_pair(s: &str) -> Result<FlatPair> {
    let (n, q) = s
        .split_once(',')
        .ok_or_else(|| parse_err(format!("pair must look like n,q, got {s:?}")))?;
    let n = n.trim().parse().map_err(|_| parse_err(format!("bad ambient dimension {n:?}")))?;
    let q = q.trim().parse().map_err(|_| parse_err(format!("bad codimension {q:?}")))?;
    FlatPair::new(n, q)
}

fn terms_to_json<'a, A: Coefficient>(terms: impl Iterator<Item = (&'a Tuple, &'a A)>) -> Value {
    Value::Array(
        terms
            .map(|(t, a)| json!({"coeff": a.to_json(), "tuple": t}))
            .collect(),
    )
}

fn terms_from_json<A: Coefficient>(v: &Value) -> Result<Vec<(A, Tuple)>> {
    v.as_array()
        .ok_or_else(|| parse_err("terms must be an array"))?
        .iter()
        .map(|term| Ok((A::from_json(field(term, "coeff")?)?, tuple_from_json(field(term, "tuple")?)?)))
        .collect()
}

fn check_group<A: Coefficient>(v: &Value) -> Result<()> {
    let group = group_from_json(field(v, "group")?)?;
    if group != A::GROUP {
        return Err(Error::GroupMismatch {
            expected: A::GROUP.to_string(),
            found: group.to_string(),
        });
    }
    Ok(())
}

pub fn chain_to_json<A: Coefficient>(c: &UfChain<A>) -> Value {
    json!({
        "degree": c.degree(),
        "group": A::GROUP.tag(),
        "space": space_to_json(c.space()),
        "terms": terms_to_json(c.terms()),
    })
}

pub fn chain_from_json<A: Coefficient>(v: &Value) -> Result<UfChain<A>> {
    check_group::<A>(v)?;
    let space = space_from_json(field(v, "space")?)?;
    let degree = as_usize(field(v, "degree")?, "degree")?;
    UfChain::from_terms(space, degree, terms_from_json(field(v, "terms")?)?)
}

pub fn action_to_json(action: &TranslationAction) -> Value {
    json!({"space": space_to_json(action.space()), "generators": action.generators()})
}

pub fn action_from_json(v: &Value) -> Result<TranslationAction> {
    let space = space_from_json(field(v, "space")?)?;
    let generators = field(v, "generators")?
        .as_array()
        .ok_or_else(|| parse_err("generators must be an array"))?
        .iter()
        .map(point_from_json)
        .collect::<Result<Vec<_>>>()?;
    TranslationAction::new(space, generators)
}

pub fn equivariant_to_json<A: Coefficient>(c: &EquivariantChain<A>) -> Value {
    json!({
        "degree": c.degree(),
        "group": A::GROUP.tag(),
        "space": space_to_json(c.space()),
        "generators": c.action().generators(),
        "orbits": terms_to_json(c.orbits()),
    })
}

pub fn equivariant_from_json<A: Coefficient>(v: &Value) -> Result<EquivariantChain<A>> {
    check_group::<A>(v)?;
    let action = action_from_json(v)?;
    let degree = as_usize(field(v, "degree")?, "degree")?;
    EquivariantChain::from_orbits(action, degree, terms_from_json(field(v, "orbits")?)?)
}

pub fn simplex_to_json(s: &AffineSimplex) -> Value {
    Value::Array(
        s.vertices()
            .iter()
            .map(|v| Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect()))
            .collect(),
    )
}

/// Compact, key-sorted rendering.
pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

/// A chain over whichever coefficient group its JSON names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyChain {
    Z(UfChain<i64>),
    Z2(UfChain<Mod2>),
    Q(UfChain<BigRational>),
}

macro_rules! dispatch {
    ($value:expr, $c:ident => $body:expr) => {
        match $value {
            AnyChain::Z($c) => AnyChain::Z($body),
            AnyChain::Z2($c) => AnyChain::Z2($body),
            AnyChain::Q($c) => AnyChain::Q($body),
        }
    };
}

macro_rules! inspect {
    ($value:expr, $c:ident => $body:expr) => {
        match $value {
            AnyChain::Z($c) => $body,
            AnyChain::Z2($c) => $body,
            AnyChain::Q($c) => $body,
        }
    };
}

impl AnyChain {
    pub fn from_json(v: &Value) -> Result<Self> {
        match group_from_json(field(v, "group")?)? {
            CoefficientGroup::Integers => chain_from_json(v).map(Self::Z),
            CoefficientGroup::IntegersMod2 => chain_from_json(v).map(Self::Z2),
            CoefficientGroup::Rationals => chain_from_json(v).map(Self::Q),
        }
    }

    pub fn to_json(&self) -> Value {
        inspect!(self, c => chain_to_json(c))
    }

    pub fn group(&self) -> CoefficientGroup {
        match self {
            Self::Z(_) => CoefficientGroup::Integers,
            Self::Z2(_) => CoefficientGroup::IntegersMod2,
            Self::Q(_) => CoefficientGroup::Rationals,
        }
    }

    pub fn degree(&self) -> usize {
        inspect!(self, c => c.degree())
    }

    pub fn space(&self) -> LatticeSpace {
        inspect!(self, c => c.space())
    }

    pub fn len(&self) -> usize {
        inspect!(self, c => c.len())
    }

    pub fn is_zero(&self) -> bool {
        inspect!(self, c => c.is_zero())
    }

    pub fn propagation(&self) -> i64 {
        inspect!(self, c => c.propagation())
    }

    pub fn sup_norm(&self) -> BigRational {
        inspect!(self, c => c.sup_norm())
    }

    pub fn uf_norm(&self, n: u32) -> BigRational {
        inspect!(self, c => c.uf_norm(n))
    }

    pub fn support(&self) -> Vec<Tuple> {
        inspect!(self, c => c.terms().map(|(t, _)| t.clone()).collect())
    }

    pub fn boundary(&self) -> Result<Self> {
        Ok(dispatch!(self, c => c.boundary()?))
    }

    pub fn wrong_way(&self, ctx: &WrongWayContext) -> Result<Self> {
        Ok(dispatch!(self, c => ctx.wrong_way(c)?))
    }

    pub fn sign_identity_residual(&self, ctx: &WrongWayContext) -> Result<Self> {
        Ok(dispatch!(self, c => ctx.sign_identity_residual(c)?))
    }

    /// Window-bounded wrong-way context covering this chain's support.
    pub fn context(&self, pair: FlatPair, perturb: bool) -> Result<WrongWayContext> {
        inspect!(self, c => WrongWayContext::for_chain(pair, c, perturb))
    }

    /// Statistics object shared by reports.
    pub fn stats_json(&self, radii: &[u32]) -> Value {
        let stats = inspect!(self, c => c.chain_stats(radii));
        let multiplicity: Map<String, Value> = stats
            .multiplicity
            .iter()
            .map(|(r, k)| (r.to_string(), json!(k)))
            .collect();
        json!({
            "terms": self.len(),
            "propagation": stats.propagation,
            "sup_norm": format_rational(&stats.sup_norm),
            "multiplicity": multiplicity,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fill;

    #[test]
    fn chain_round_trip_is_bit_exact() {
        let text = r#"{"degree":1,"group":"Q","space":{"dim":2,"kind":"lattice"},"terms":[{"coeff":"-1/2","tuple":[[0,0],[1,0]]},{"coeff":"3/1","tuple":[[0,1],[1,1]]}]}"#;
        let chain = AnyChain::from_json(&parse_json(text).unwrap()).unwrap();
        assert_eq!(chain.group(), CoefficientGroup::Rationals);
        assert_eq!(to_canonical_string(&chain.to_json()), text);
    }

    #[test]
    fn terms_are_sorted_and_merged() {
        let text = r#"{"degree":0,"group":"Z","space":{"kind":"lattice","dim":1},"terms":[{"coeff":2,"tuple":[[3]]},{"coeff":1,"tuple":[[-1]]},{"coeff":-2,"tuple":[[3]]}]}"#;
        let chain = AnyChain::from_json(&parse_json(text).unwrap()).unwrap();
        assert_eq!(
            to_canonical_string(&chain.to_json()),
            r#"{"degree":0,"group":"Z","space":{"dim":1,"kind":"lattice"},"terms":[{"coeff":1,"tuple":[[-1]]}]}"#
        );
    }

    #[test]
    fn malformed_inputs() {
        for text in [
            r#"{"degree":1,"group":"R","space":{"kind":"lattice","dim":1},"terms":[]}"#,
            r#"{"degree":1,"group":"Z","space":{"kind":"graph","dim":1},"terms":[]}"#,
            r#"{"degree":1,"group":"Z","space":{"kind":"lattice","dim":1},"terms":[{"coeff":1,"tuple":[[0]]}]}"#,
            r#"{"degree":0,"group":"Z2","space":{"kind":"lattice","dim":1},"terms":[{"coeff":2,"tuple":[[0]]}]}"#,
            r#"{"group":"Z","space":{"kind":"lattice","dim":1},"terms":[]}"#,
        ] {
            assert!(AnyChain::from_json(&parse_json(text).unwrap()).is_err(), "{text}");
        }
        assert!(parse_json("{").is_err());
    }

    #[test]
    fn equivariant_round_trip() {
        let k = crate::equivariant::kuhn_fundamental_cycle(2).unwrap();
        let v = equivariant_to_json(&k);
        assert_eq!(v["generators"], json!([[1, 0], [0, 1]]));
        let back: EquivariantChain<i64> = equivariant_from_json(&v).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn simplex_and_window_json() {
        let s = fill(&[vec![0, 1], vec![2, -3]]).unwrap();
        assert_eq!(simplex_to_json(&s), json!([["0/1", "1/1"], ["2/1", "-3/1"]]));
        let w = window_from_json(&json!({"lo": [0, 0], "hi": [2, 1]})).unwrap();
        assert_eq!(w.len(), 6);
        assert!(window_from_json(&json!({"lo": [0], "hi": [-1]})).is_err());
    }

    #[test]
    fn pair_parsing() {
        let p = parse_pair("3,2").unwrap();
        assert_eq!((p.ambient_dim(), p.codim()), (3, 2));
        assert!(parse_pair("3").is_err());
        assert!(parse_pair("2,3").is_err());
    }
}
