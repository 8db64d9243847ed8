//! Seeded invariant battery behind `coarse-chains verify`.
//!
//! Every check draws its cases from a ChaCha stream keyed by the suite seed,
//! the check name and the case index, so results do not depend on thread
//! scheduling. Reports carry no timings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chains::{tuple_faces, Tuple, UfChain};
use crate::coeffs::{format_rational, Coefficient, CoefficientGroup, Mod2};
use crate::equivariant::{
    build_quotient_complex, equivariant_sign_identity_residual, identify_class, kuhn_fundamental_cycle,
    restrict_equivariance, snf_homology, snf_homology_transposed, EquivariantChain, HomologyReport,
    transport_with, TranslationAction,
};
use crate::error::{Error, Result};
use crate::geometry::{fill, FlatPair};
use crate::spaces::{LatticeSpace, Point, Window};
use crate::wrongway::WrongWayContext;

/// Deliberate bugs the verification suite must catch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Crossing numbers ignore orientation and count `|θ|`.
    ThomSignFlip,
    /// The `(-1)^q` in the sign identity is dropped.
    DropSignPower,
    /// One quotient boundary matrix is stored transposed.
    TransposeBoundary,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Self::ThomSignFlip, Self::DropSignPower, Self::TransposeBoundary];

    pub fn tag(self) -> &'static str {
        match self {
            Self::ThomSignFlip => "thom-sign-flip",
            Self::DropSignPower => "drop-sign-power",
            Self::TransposeBoundary => "transpose-boundary",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown mutation {s:?}")))
    }
}

pub const DEFAULT_SEED: u64 = 0x5eed_c0a5;

/// The `(n, q)` pairs exercised by the cocycle and sign-identity checks.
pub const PAIRS: [(usize, usize); 4] = [(2, 1), (3, 1), (3, 2), (4, 2)];

/// The pairs carried through the torus transport diagram.
pub const TRANSPORT_PAIRS: [(usize, usize); 3] = [(2, 1), (3, 1), (3, 2)];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub mutation: Option<Mutation>,
    pub boundary_cases: usize,
    pub filling_cases: usize,
    pub cocycle_cases: usize,
    pub sign_cases: usize,
    pub torus_rmax: i64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            mutation: None,
            boundary_cases: 1000,
            filling_cases: 1000,
            cocycle_cases: 200,
            sign_cases: 50,
            torus_rmax: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Whether the check decides the suite's exit status.
    pub gating: bool,
    pub details: Value,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub mutation: Option<Mutation>,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "cases": c.cases,
                    "failures": c.failures,
                    "gating": c.gating,
                    "passed": c.passed(),
                    "details": c.details,
                })
            })
            .collect();
        json!({
            "seed": self.seed,
            "mutation": self.mutation.map(Mutation::tag),
            "passed": self.passed(),
            "checks": checks,
        })
    }
}

fn case_rng(seed: u64, check: &str, index: usize) -> ChaCha8Rng {
    let mut key = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in check.bytes() {
        key = key.rotate_left(5) ^ u64::from(b);
        key = key.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index as u64);
    rng
}

pub fn random_coefficient<A: Coefficient>(rng: &mut impl Rng) -> A {
    match A::GROUP {
        CoefficientGroup::IntegersMod2 => A::from_int(1),
        CoefficientGroup::Integers => {
            let k = rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 };
            A::from_int(k)
        }
        CoefficientGroup::Rationals => {
            let p = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let q = rng.gen_range(1..=4);
            A::from_json(&Value::String(format!("{p}/{q}"))).expect("valid rational literal")
        }
    }
}

/// A tuple whose vertices lie within `spread` of a first vertex drawn from
/// `[-extent, extent]^dim`.
pub fn random_tuple(rng: &mut impl Rng, dim: usize, len: usize, extent: i64, spread: i64) -> Tuple {
    let first: Point = (0..dim).map(|_| rng.gen_range(-extent..=extent)).collect();
    let mut t = vec![first.clone()];
    for _ in 1..len {
        t.push(first.iter().map(|c| c + rng.gen_range(-spread..=spread)).collect());
    }
    t
}

pub fn random_chain<A: Coefficient>(
    rng: &mut impl Rng,
    dim: usize,
    degree: usize,
    terms: usize,
    extent: i64,
    spread: i64,
) -> UfChain<A> {
    let space = LatticeSpace::new(dim).expect("positive dimension");
    let mut c = UfChain::zero(space, degree);
    for _ in 0..terms {
        c.insert_unchecked(random_tuple(rng, dim, degree + 1, extent, spread), random_coefficient(rng));
    }
    c
}

fn boundary_squared<A: Coefficient>(cfg: &SuiteConfig, degree: usize) -> (usize, usize) {
    let name = format!("boundary-squared/{}/{degree}", A::GROUP);
    let failures = (0..cfg.boundary_cases)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = case_rng(cfg.seed, &name, i);
            let dim = rng.gen_range(1..=4);
            let terms = rng.gen_range(1..=6);
            let c: UfChain<A> = random_chain(&mut rng, dim, degree, terms, 4, 2);
            let bb = c.boundary().and_then(|b| b.boundary());
            !matches!(bb, Ok(z) if z.is_zero())
        })
        .count();
    (cfg.boundary_cases, failures)
}

fn check_boundary_squared(cfg: &SuiteConfig) -> CheckResult {
    let mut cases = 0;
    let mut failures = 0;
    let mut details = BTreeMap::new();
    for degree in 2..=4 {
        for (group, (c, f)) in [
            ("Z", boundary_squared::<i64>(cfg, degree)),
            ("Z2", boundary_squared::<Mod2>(cfg, degree)),
            ("Q", boundary_squared::<BigRational>(cfg, degree)),
        ] {
            cases += c;
            failures += f;
            details.insert(format!("{group}/{degree}"), json!(f));
        }
    }
    CheckResult {
        name: "boundary-squared".into(),
        cases,
        failures,
        gating: true,
        details: json!(details),
    }
}

fn check_filling(cfg: &SuiteConfig) -> CheckResult {
    let failures = (0..cfg.filling_cases)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = case_rng(cfg.seed, "filling-boundary", i);
            let dim = rng.gen_range(1..=4);
            let len = rng.gen_range(2..=5);
            let t = random_tuple(&mut rng, dim, len, 5, 3);
            let Ok(simplex) = fill(&t) else {
                return true;
            };
            let lhs = simplex.boundary();
            let rhs: Vec<_> = tuple_faces(&t).map(|(s, f)| fill(&f).map(|x| (s, x))).collect();
            let rhs: std::result::Result<Vec<_>, _> = rhs.into_iter().collect();
            rhs.map_or(true, |r| r != lhs)
        })
        .count();
    CheckResult {
        name: "filling-boundary".into(),
        cases: cfg.filling_cases,
        failures,
        gating: true,
        details: json!({}),
    }
}

fn pair_context(n: usize, q: usize, perturb: bool, cfg: &SuiteConfig) -> WrongWayContext {
    let pair = FlatPair::new(n, q).expect("valid pair");
    WrongWayContext::new(pair, Window::centered(n, 64), perturb)
        .expect("q below n")
        .with_mutation(cfg.mutation)
}

/// A tuple whose normal coordinates avoid zero. Crossings can still be
/// degenerate in strict mode; callers resample those.
pub fn general_position_tuple(rng: &mut impl Rng, pair: &FlatPair, len: usize, extent: i64) -> Tuple {
    let n = pair.ambient_dim();
    (0..len)
        .map(|_| {
            (0..n)
                .map(|k| {
                    if k < pair.flat_dim() {
                        rng.gen_range(-extent..=extent)
                    } else {
                        rng.gen_range(1..=extent) * if rng.gen_bool(0.5) { 1 } else { -1 }
                    }
                })
                .collect()
        })
        .collect()
}

fn check_cocycle(cfg: &SuiteConfig) -> CheckResult {
    let mut cases = 0;
    let mut failures = 0;
    let mut details = BTreeMap::new();
    for (n, q) in PAIRS {
        let ctx = pair_context(n, q, false, cfg);
        let name = format!("thom-cocycle/{n},{q}");
        let results: Vec<(bool, bool)> = (0..cfg.cocycle_cases)
            .into_par_iter()
            .map(|i| {
                let mut rng = case_rng(cfg.seed, &name, i);
                loop {
                    let t = general_position_tuple(&mut rng, ctx.pair(), q + 2, 3);
                    let mut total = 0;
                    let mut degenerate = false;
                    let mut crossing = false;
                    for (sign, face) in tuple_faces(&t) {
                        match ctx.thom_on_tuple(&face) {
                            Ok(theta) => {
                                crossing |= theta != 0;
                                total += sign * theta;
                            }
                            Err(_) => {
                                degenerate = true;
                                break;
                            }
                        }
                    }
                    if !degenerate {
                        return (total != 0, crossing);
                    }
                }
            })
            .collect();
        let f = results.iter().filter(|r| r.0).count();
        let crossing = results.iter().filter(|r| r.1).count();
        cases += results.len();
        failures += f;
        details.insert(format!("{n},{q}"), json!({"failures": f, "with_crossings": crossing}));
    }
    CheckResult {
        name: "thom-cocycle".into(),
        cases,
        failures,
        gating: true,
        details: json!(details),
    }
}

/// Case drawn for the sign identity: a chain whose wrong-way image and the
/// image of its boundary are both defined.
struct SignCase<A> {
    chain: UfChain<A>,
    residual_zero: bool,
    obstruction_zero: bool,
    local: bool,
    image_terms: usize,
    norms: Vec<(BigRational, BigRational)>,
    fiber: usize,
}

fn sign_case<A: Coefficient>(rng: &mut ChaCha8Rng, ctx: &WrongWayContext, degree: usize) -> SignCase<A> {
    let pair = *ctx.pair();
    loop {
        let terms = rng.gen_range(1..=5);
        let mut c = UfChain::zero(LatticeSpace::new(pair.ambient_dim()).expect("positive"), degree);
        for _ in 0..terms {
            let t = if ctx.perturb() {
                random_tuple(rng, pair.ambient_dim(), degree + 1, 2, 2)
            } else {
                general_position_tuple(rng, &pair, degree + 1, 3)
            };
            c.insert_unchecked(t, random_coefficient(rng));
        }
        let Ok(residual) = ctx.sign_identity_residual(&c) else {
            continue;
        };
        let Ok(obstruction) = ctx.obstruction_term(&c) else {
            continue;
        };
        let capped = ctx.cap_thom(&c).expect("defined whenever the residual is");
        let image = ctx.wrong_way(&c).expect("defined whenever the residual is");
        let norms = (0..=3).map(|k| (image.uf_norm(k), c.uf_norm(k))).collect();
        let mut fibers: BTreeMap<Tuple, usize> = BTreeMap::new();
        for (t, _) in capped.terms() {
            let tail: Tuple = t.iter().map(|x| pair.tangent(x).to_vec()).collect();
            *fibers.entry(tail).or_default() += 1;
        }
        // Tuples of c with a crossing, grouped by their projected tail.
        let mut crossing_fibers: BTreeMap<Tuple, usize> = BTreeMap::new();
        for (t, _) in c.terms() {
            if ctx.thom_on_tuple(t).map(|x| x != 0).unwrap_or(false) {
                let tail: Tuple = t[pair.codim()..].iter().map(|x| pair.tangent(x).to_vec()).collect();
                *crossing_fibers.entry(tail).or_default() += 1;
            }
        }
        return SignCase {
            local: ctx.is_local(&c, &capped),
            residual_zero: residual.is_zero(),
            obstruction_zero: obstruction.is_zero(),
            image_terms: image.len(),
            norms,
            fiber: crossing_fibers.values().copied().max().unwrap_or(0),
            chain: c,
        };
    }
}

#[derive(Default)]
struct SignTally {
    cases: usize,
    residual_failures: usize,
    obstruction_mismatches: usize,
    locality_failures: usize,
    image_terms: usize,
    norm_cases: usize,
    norm_failures: BTreeMap<u32, usize>,
    weighted_failures: usize,
    max_fiber: usize,
    worst_ratio: Option<BigRational>,
    first_norm_counterexample: Option<Value>,
}

fn tally_sign<A: Coefficient>(cfg: &SuiteConfig, perturb: bool, tally: &mut SignTally, details: &mut BTreeMap<String, Value>) {
    for (n, q) in PAIRS {
        let ctx = pair_context(n, q, perturb, cfg);
        for degree in [q + 1, q + 2] {
            let name = format!("sign-identity/{}/{n},{q}/{degree}/{perturb}", A::GROUP);
            let cases: Vec<SignCase<A>> = (0..cfg.sign_cases)
                .into_par_iter()
                .map(|i| sign_case(&mut case_rng(cfg.seed, &name, i), &ctx, degree))
                .collect();
            let mut failures = 0;
            for case in &cases {
                tally.cases += 1;
                if !case.residual_zero {
                    failures += 1;
                    tally.residual_failures += 1;
                }
                if case.residual_zero != case.obstruction_zero {
                    tally.obstruction_mismatches += 1;
                }
                if !case.local {
                    tally.locality_failures += 1;
                }
                tally.image_terms += case.image_terms;
                tally.norm_cases += 1;
                tally.max_fiber = tally.max_fiber.max(case.fiber);
                for (k, (out, input)) in case.norms.iter().enumerate() {
                    if out > input {
                        *tally.norm_failures.entry(k as u32).or_default() += 1;
                        if tally.first_norm_counterexample.is_none() {
                            tally.first_norm_counterexample = Some(json!({
                                "pair": [n, q],
                                "n": k,
                                "input_norm": format_rational(input),
                                "output_norm": format_rational(out),
                                "chain": crate::io::chain_to_json(&case.chain),
                            }));
                        }
                        if !input.is_zero() {
                            let ratio = out / input;
                            if tally.worst_ratio.as_ref().is_none_or(|w| &ratio > w) {
                                tally.worst_ratio = Some(ratio);
                            }
                        }
                    }
                    let bound = input * BigRational::from_integer(case.fiber.max(1).into());
                    if out > &bound {
                        tally.weighted_failures += 1;
                    }
                }
            }
            details.insert(format!("{}/{n},{q}/{degree}", A::GROUP), json!(failures));
        }
    }
}

fn check_sign_identity(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut norm = SignTally::default();
    for perturb in [false, true] {
        let mut tally = SignTally::default();
        let mut details = BTreeMap::new();
        tally_sign::<i64>(cfg, perturb, &mut tally, &mut details);
        tally_sign::<Mod2>(cfg, perturb, &mut tally, &mut details);
        tally_sign::<BigRational>(cfg, perturb, &mut tally, &mut details);
        let suffix = if perturb { "perturbed" } else { "strict" };
        out.push(CheckResult {
            name: format!("sign-identity-{suffix}"),
            cases: tally.cases,
            failures: tally.residual_failures + tally.obstruction_mismatches,
            gating: true,
            details: json!({
                "residual_nonzero": tally.residual_failures,
                "obstruction_mismatch": tally.obstruction_mismatches,
                "per_group_pair_degree": details,
            }),
        });
        out.push(CheckResult {
            name: format!("support-locality-{suffix}"),
            cases: tally.cases,
            failures: tally.locality_failures,
            gating: true,
            details: json!({"output_terms": tally.image_terms}),
        });
        norm.norm_cases += tally.norm_cases;
        norm.weighted_failures += tally.weighted_failures;
        norm.max_fiber = norm.max_fiber.max(tally.max_fiber);
        for (k, v) in tally.norm_failures {
            *norm.norm_failures.entry(k).or_default() += v;
        }
        if norm.first_norm_counterexample.is_none() {
            norm.first_norm_counterexample = tally.first_norm_counterexample;
        }
        if let Some(r) = tally.worst_ratio {
            if norm.worst_ratio.as_ref().is_none_or(|w| &r > w) {
                norm.worst_ratio = Some(r);
            }
        }
    }
    let per_n: BTreeMap<String, usize> = (0..=3)
        .map(|k| (k.to_string(), norm.norm_failures.get(&k).copied().unwrap_or(0)))
        .collect();
    out.push(CheckResult {
        name: "norm-continuity".into(),
        cases: norm.norm_cases * 4,
        failures: per_n.values().sum(),
        gating: false,
        details: json!({
            "violations_by_n": per_n,
            "worst_ratio": norm.worst_ratio.as_ref().map(format_rational),
            "first_counterexample": norm.first_norm_counterexample,
        }),
    });
    out.push(CheckResult {
        name: "norm-fiber-bound".into(),
        cases: norm.norm_cases * 4,
        failures: norm.weighted_failures,
        gating: true,
        details: json!({"max_fiber": norm.max_fiber}),
    });
    out
}

/// Λ-equivariant chains near the flat, compared against the plain checker
/// on window expansions.
fn check_equivariant_sign(cfg: &SuiteConfig) -> CheckResult {
    let mut cases = 0;
    let mut failures = 0;
    for (n, q) in TRANSPORT_PAIRS {
        let ctx = pair_context(n, q, true, cfg);
        let space = LatticeSpace::new(n).expect("positive");
        let lambda = TranslationAction::coordinate_sublattice(space, n - q).expect("independent");
        let name = format!("equivariant-sign/{n},{q}");
        let f = (0..cfg.sign_cases)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = case_rng(cfg.seed, &name, i);
                let degree = q + 1 + rng.gen_range(0..=1);
                let terms = rng.gen_range(1..=4);
                let orbits: Vec<(i64, Tuple)> = (0..terms)
                    .map(|_| (random_coefficient(&mut rng), random_tuple(&mut rng, n, degree + 1, 1, 1)))
                    .collect();
                let Ok(c) = EquivariantChain::from_orbits(lambda.clone(), degree, orbits) else {
                    return true;
                };
                let Ok(residual) = equivariant_sign_identity_residual(&c, &ctx) else {
                    return true;
                };
                // Non-equivariant residual on a window, away from its edge.
                let mut lo = vec![-4; n];
                let mut hi = vec![4; n];
                for k in 0..n - q {
                    lo[k] = -6;
                    hi[k] = 6;
                }
                let big = Window::new(lo, hi).expect("nonempty");
                // Far enough inside the tangent range that every term of the
                // residual near `inner` sees all of its input terms.
                let inner = Window::centered(n - q, 2);
                let Ok(expanded) = c.expand(&big) else {
                    return true;
                };
                let Ok(plain) = ctx.sign_identity_residual(&expanded) else {
                    return true;
                };
                let Ok(expected) = residual.expand(&inner) else {
                    return true;
                };
                let restricted: Vec<_> = plain
                    .terms()
                    .filter(|(t, _)| t.iter().all(|p| inner.contains(p)))
                    .map(|(t, a)| (t.clone(), *a))
                    .collect();
                let expected: Vec<_> = expected.terms().map(|(t, a)| (t.clone(), *a)).collect();
                restricted != expected || !residual.is_zero()
            })
            .count();
        cases += cfg.sign_cases;
        failures += f;
    }
    CheckResult {
        name: "equivariant-sign-identity".into(),
        cases,
        failures,
        gating: true,
        details: json!({}),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn report_json(reports: &[HomologyReport]) -> Value {
    serde_json::to_value(reports).expect("reports serialize")
}

fn check_torus(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut homology_failures = 0;
    let mut cross_failures = 0;
    let mut details = BTreeMap::new();
    for n in 1..=3 {
        let space = LatticeSpace::new(n).expect("positive");
        let action = TranslationAction::standard(space);
        let complex = build_quotient_complex(&action, cfg.torus_rmax, 0..n + 2).map(|mut c| {
            if cfg.mutation == Some(Mutation::TransposeBoundary) {
                c.transpose_boundary(n).expect("degree in range");
            }
            c
        });
        let entry = match complex {
            Err(e) => {
                homology_failures += 1;
                cross_failures += 1;
                json!({"error": e.to_string()})
            }
            Ok(complex) => {
                let direct = snf_homology(&complex);
                let transposed = snf_homology_transposed(&complex);
                match (&direct, &transposed) {
                    (Ok(d), Ok(t)) => {
                        let betti: Vec<usize> = d.iter().map(|r| r.betti).collect();
                        let expected: Vec<usize> = (0..=n).map(|k| binomial(n, k)).collect();
                        if betti != expected || d.iter().any(|r| !r.torsion.is_empty()) {
                            homology_failures += 1;
                        }
                        if d != t {
                            cross_failures += 1;
                        }
                        json!({"basis_sizes": complex.basis_sizes(), "homology": report_json(d)})
                    }
                    _ => {
                        homology_failures += 1;
                        cross_failures += 1;
                        let err = direct.err().or(transposed.err()).expect("one side failed");
                        json!({"error": err.to_string()})
                    }
                }
            }
        };
        details.insert(format!("T{n}"), entry);
    }
    vec![
        CheckResult {
            name: "torus-homology".into(),
            cases: 3,
            failures: homology_failures,
            gating: true,
            details: json!(details),
        },
        CheckResult {
            name: "snf-cross-check".into(),
            cases: 3,
            failures: cross_failures,
            gating: true,
            details: json!({}),
        },
    ]
}

fn check_transport(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut failures = 0;
    let mut details = BTreeMap::new();
    let mut shear_failures = 0;
    let mut shear_cases = 0;
    for (n, q) in TRANSPORT_PAIRS {
        let pair = FlatPair::new(n, q).expect("valid pair");
        let up = transport_with(pair, 1, 1, None, cfg.mutation);
        let down = transport_with(pair.flipped(), 1, 1, None, cfg.mutation);
        let entry = match (&up, &down) {
            (Ok(u), Ok(d)) => {
                let unit = u.class.len() == 1 && u.class[0].abs() == 1;
                let flips = d.class.len() == 1 && d.class[0] == -u.class.first().copied().unwrap_or(0);
                if !(unit && flips) {
                    failures += 1;
                }
                json!({"class": u.class, "flipped_class": d.class, "strip_orbits": u.strip_orbits})
            }
            _ => {
                failures += 1;
                let err = up.as_ref().err().or(down.as_ref().err()).expect("one side failed");
                json!({"error": err.to_string()})
            }
        };
        details.insert(format!("{n},{q}"), entry);
        let shears: Vec<Vec<Vec<i64>>> = if q == 1 {
            vec![vec![vec![-1]]]
        } else {
            vec![
                vec![vec![1, 1], vec![0, 1]],
                vec![vec![1, 0], vec![-1, 1]],
                vec![vec![0, 1], vec![1, 0]],
            ]
        };
        for s in shears {
            shear_cases += 1;
            let sheared = transport_with(pair, 1, 1, Some(&s), cfg.mutation);
            let same = matches!((&up, &sheared), (Ok(u), Ok(v)) if u.class == v.class);
            if !same {
                shear_failures += 1;
            }
        }
    }
    vec![
        CheckResult {
            name: "class-transport".into(),
            cases: TRANSPORT_PAIRS.len(),
            failures,
            gating: true,
            details: json!(details),
        },
        CheckResult {
            name: "filling-independence".into(),
            cases: shear_cases,
            failures: shear_failures,
            gating: true,
            details: json!({}),
        },
    ]
}

/// `identify_class(∂x) = 0` for random 2-chains on `T²` and `T³`.
fn check_boundary_classes(cfg: &SuiteConfig) -> CheckResult {
    let mut cases = 0;
    let mut failures = 0;
    for n in 2..=3 {
        let space = LatticeSpace::new(n).expect("positive");
        let action = TranslationAction::standard(space);
        let Ok(complex) = build_quotient_complex(&action, 1, 0..n + 2) else {
            failures += 1;
            continue;
        };
        let name = format!("boundary-class/{n}");
        for i in 0..20 {
            cases += 1;
            let mut rng = case_rng(cfg.seed, &name, i);
            let degree = rng.gen_range(2..=n);
            let basis = complex.basis(degree).expect("degree in range");
            let terms: Vec<(i64, Tuple)> = (0..rng.gen_range(1..=5))
                .map(|_| (random_coefficient(&mut rng), basis[rng.gen_range(0..basis.len())].clone()))
                .collect();
            let ok = EquivariantChain::from_orbits(action.clone(), degree, terms)
                .and_then(|x| x.boundary())
                .and_then(|b| identify_class(&b, &complex))
                .map(|class| class.iter().all(|&c| c == 0))
                .unwrap_or(false);
            if !ok {
                failures += 1;
            }
        }
    }
    CheckResult {
        name: "boundary-classes".into(),
        cases,
        failures,
        gating: true,
        details: json!({}),
    }
}

/// Runs every check of the suite.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut checks = vec![
        check_boundary_squared(cfg),
        check_filling(cfg),
        check_cocycle(cfg),
    ];
    checks.extend(check_sign_identity(cfg));
    checks.push(check_equivariant_sign(cfg));
    checks.extend(check_torus(cfg));
    checks.extend(check_transport(cfg));
    checks.push(check_boundary_classes(cfg));
    SuiteReport {
        seed: cfg.seed,
        mutation: cfg.mutation,
        checks,
    }
}

/// Kuhn strip for `(n, q)`, exposed for scenario runs.
pub fn kuhn_strip(pair: &FlatPair, radius: i64) -> Result<EquivariantChain<i64>> {
    let space = LatticeSpace::new(pair.ambient_dim())?;
    let lambda = TranslationAction::coordinate_sublattice(space, pair.flat_dim())?;
    restrict_equivariance(&kuhn_fundamental_cycle(pair.ambient_dim())?, &lambda, pair, radius)
}
