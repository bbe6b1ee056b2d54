//! Heegaard Floer bookkeeping at the level of dimensions and vanishing facts:
//! the adjunction-type vanishing criterion for cobordism maps, the surfaces of
//! the tightness induction, surgery-triangle dimension ledgers and the
//! propagation of L-space surgery slopes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::contact::KnotInfo;
use crate::error::{Error, Result};
use crate::exactnum::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceData {
    pub genus: u64,
    pub self_intersection: i64,
    /// Evaluation of `c1` of the spin^c structure on the surface.
    pub c1_evaluation: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vanishing {
    /// The cobordism map is zero.
    Vanishes,
    /// The inequality fails; nothing follows.
    NoConclusion,
    /// Genus zero or negative self-intersection.
    NotApplicable,
}

/// Three-valued form of [`vanishing_predicate`].
pub fn vanishing(s: &SurfaceData) -> Vanishing {
    if s.genus == 0 || s.self_intersection < 0 {
        return Vanishing::NotApplicable;
    }
    let lhs = i128::from(s.c1_evaluation).abs() + i128::from(s.self_intersection);
    if lhs > 2 * i128::from(s.genus) - 2 {
        Vanishing::Vanishes
    } else {
        Vanishing::NoConclusion
    }
}

/// Whether `|<c1, S>| + S.S > 2g - 2` forces the cobordism map to vanish.
pub fn vanishing_predicate(s: &SurfaceData) -> Result<bool> {
    match vanishing(s) {
        Vanishing::Vanishes => Ok(true),
        Vanishing::NoConclusion => Ok(false),
        Vanishing::NotApplicable => Err(Error::NotApplicable(format!(
            "needs genus > 0 and nonnegative self-intersection, got g = {}, S.S = {}",
            s.genus, s.self_intersection
        ))),
    }
}

/// The surface of genus `t(t-1)k/2 + (t+1)/2` and self-intersection
/// `t^2 k + t` in the cobordism of the tightness induction.
pub fn vk_surface(t: u64, k: u64) -> Result<SurfaceData> {
    if t.is_multiple_of(2) || k == 0 {
        return Err(Error::Domain(format!("need odd t >= 1 and k >= 1, got t = {t}, k = {k}")));
    }
    let sq = t.checked_mul(t).and_then(|x| x.checked_mul(k)).and_then(|x| x.checked_add(t));
    let genus = (t * (t - 1) / 2).checked_mul(k).and_then(|x| x.checked_add(t.div_ceil(2)));
    match (sq.and_then(|x| i64::try_from(x).ok()), genus) {
        (Some(self_intersection), Some(genus)) => Ok(SurfaceData { genus, self_intersection, c1_evaluation: 0 }),
        _ => Err(Error::Domain(format!("surface data for t = {t}, k = {k} overflows"))),
    }
}

/// `dim HF^(L(p,q)) = p`.
pub fn lens_dim(p: u64, q: i64) -> Result<u64> {
    if p == 0 {
        return Err(Error::Domain("L(0,q) is not a rational homology sphere".into()));
    }
    if p.gcd(&q.unsigned_abs()) != 1 {
        return Err(Error::Domain(format!("L({p},{q}) needs coprime parameters")));
    }
    Ok(p)
}

/// Whether a rational homology sphere with the given `dim HF^` and `|H1|` is an
/// L-space. A dimension below `|H1|` is impossible.
pub fn lspace_check(dim: u64, h1_order: u64) -> Result<bool> {
    if dim == 0 || h1_order == 0 {
        return Err(Error::InvalidInput("dimension and |H1| must be positive".into()));
    }
    if dim < h1_order {
        return Err(Error::InvalidInput(format!("dim {dim} is below |H1| = {h1_order}")));
    }
    Ok(dim == h1_order)
}

/// An exact triangle `V0 -> V1 -> V2 -> V0` of named groups. `F_i` is the
/// map between the two corners other than `V_i`; `vanishing` lists the `i`
/// with `F_i = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub corners: [String; 3],
    pub vanishing: BTreeSet<usize>,
}

impl Triangle {
    pub fn new(corners: [&str; 3], vanishing: &[usize]) -> Self {
        Triangle { corners: corners.map(String::from), vanishing: vanishing.iter().copied().collect() }
    }
}

/// Dimensions of named Floer groups and the triangles relating them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimLedger {
    pub dims: BTreeMap<String, Option<u64>>,
    pub triangles: Vec<Triangle>,
}

impl DimLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, corner: &str, dim: Option<u64>) -> Self {
        self.dims.insert(corner.to_string(), dim);
        self
    }

    pub fn dim(&self, corner: &str) -> Option<u64> {
        self.dims.get(corner).copied().flatten()
    }
}

/// Records a triangle, deducing a missing corner from a vanishing map and
/// checking `dim V_i <= dim V_j + dim V_k`. An equality among known dimensions
/// is recorded as the vanishing of the opposite map.
pub fn ledger_deduce(ledger: &DimLedger, triangle: &Triangle) -> Result<DimLedger> {
    if triangle.vanishing.iter().any(|&i| i > 2) {
        return Err(Error::InvalidInput("vanishing index out of range".into()));
    }
    let mut d: [Option<u64>; 3] = std::array::from_fn(|i| ledger.dim(&triangle.corners[i]));
    if d.iter().filter(|x| x.is_some()).count() < 2 {
        return Err(Error::Precondition("at least two corner dimensions must be known".into()));
    }
    let mut t = triangle.clone();
    let inconsistent = |why: String| Err(Error::InconsistentLedger(why));
    for &i in &triangle.vanishing {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        match (d[i], d[j], d[k]) {
            (None, Some(a), Some(b)) => d[i] = Some(a + b),
            (Some(s), None, Some(b)) | (Some(s), Some(b), None) => {
                let Some(x) = s.checked_sub(b) else {
                    return inconsistent(format!("{} = {s} cannot split off {b}", t.corners[i]));
                };
                d[if d[j].is_none() { j } else { k }] = Some(x);
            }
            (Some(s), Some(a), Some(b)) if s != a + b => {
                return inconsistent(format!("F_{i} = 0 forces {} = {a} + {b}, recorded {s}", t.corners[i]));
            }
            _ => {}
        }
    }
    if let [Some(a), Some(b), Some(c)] = d {
        let v = [a, b, c];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            if v[i] > v[j] + v[k] {
                return inconsistent(format!(
                    "dim {} = {} exceeds {} + {}",
                    t.corners[i], v[i], v[j], v[k]
                ));
            }
            if v[i] == v[j] + v[k] {
                t.vanishing.insert(i);
            }
        }
    }
    let mut out = ledger.clone();
    for (name, dim) in t.corners.iter().zip(d) {
        out.dims.insert(name.clone(), dim);
    }
    out.triangles.push(t);
    Ok(out)
}

/// Corner name of `S^3_m(K)`.
pub fn surgery_corner(m: i64) -> String {
    format!("S3_{m}(K)")
}

/// Runs the backward induction from an integer L-space slope `seed` down to
/// `stop`: the triangle `S^3, S^3_{m-1}(K), S^3_m(K)` splits because the
/// capped-off Seifert surface of square `m - 1` kills the map, so
/// `dim HF^(S^3_{m-1}) = dim HF^(S^3_m) - 1`. Each deduced dimension is
/// checked against `|H1| = m - 1`.
pub fn backward_induction(knot: &KnotInfo, seed: u64, stop: u64) -> Result<DimLedger> {
    if stop == 0 || stop > seed {
        return Err(Error::Precondition(format!("need 1 <= stop <= seed, got {stop}, {seed}")));
    }
    let mut ledger = DimLedger::new().with("S3", Some(1)).with(&surgery_corner(seed as i64), Some(seed));
    for m in (stop + 1..=seed).rev() {
        let surface = SurfaceData {
            genus: knot.slice_genus,
            self_intersection: m as i64 - 1,
            c1_evaluation: 0,
        };
        if !vanishing_predicate(&surface)? {
            return Err(Error::Precondition(format!(
                "the map for slope {m} is not forced to vanish (m <= 2 g_s - 1)"
            )));
        }
        let lower = surgery_corner(m as i64 - 1);
        let upper = surgery_corner(m as i64);
        ledger = ledger_deduce(&ledger.with(&lower, None), &Triangle::new(["S3", &lower, &upper], &[2]))?;
        let dim = ledger.dim(&lower).ok_or_else(|| Error::Internal("deduction left a gap".into()))?;
        if !lspace_check(dim, m - 1)? {
            return Err(Error::Internal(format!("{lower} is not an L-space")));
        }
    }
    Ok(ledger)
}

/// A slope `a/b` kept as an unreduced pair, `b >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopePair {
    pub a: BigInt,
    pub b: BigInt,
}

impl SlopePair {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if !b.is_positive() {
            return Err(Error::Domain(format!("slope denominator must be positive, got {b}")));
        }
        Ok(SlopePair { a, b })
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        SlopePair { a: n.into(), b: BigInt::one() }
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.a.clone(), self.b.clone()).expect("positive denominator")
    }
}

impl From<&Rational> for SlopePair {
    fn from(r: &Rational) -> Self {
        SlopePair { a: r.numer().clone(), b: r.denom().clone() }
    }
}

impl fmt::Display for SlopePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

impl FromStr for SlopePair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad slope pair {s:?}"));
        match s.split_once('/') {
            Some((a, b)) => SlopePair::new(a.parse::<BigInt>().map_err(|_| bad())?, b.parse::<BigInt>().map_err(|_| bad())?),
            None => Ok(SlopePair::integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for SlopePair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlopePair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// `a/b` an L-space slope implies `(a+1)/b` is one.
    R1,
    /// Integer `n > 2 g_s - 1` an L-space slope implies `n - 1` is one.
    R2,
    /// Rewriting `n/1` as `nb/b` or back; the slope is unchanged.
    Represent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub rule: Rule,
    pub from: SlopePair,
    pub to: SlopePair,
}

/// Replayable derivation of an L-space slope from a seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationChain {
    pub knot: String,
    pub seed: SlopePair,
    pub query: SlopePair,
    pub steps: Vec<DerivationStep>,
}

impl DerivationChain {
    /// Replays every step against the knot's data and the seeds of `kb`.
    pub fn verify(&self, kb: &SlopeKnowledge) -> Result<()> {
        let fail = |why: String| Err(Error::Internal(format!("derivation check: {why}")));
        if !kb.seeds.contains(&self.seed) {
            return fail(format!("{} is not a seed", self.seed));
        }
        let threshold = BigInt::from(kb.knot.bennequin_bound());
        let mut cur = self.seed.clone();
        for (i, s) in self.steps.iter().enumerate() {
            if s.from != cur {
                return fail(format!("step {i} starts at {} instead of {cur}", s.from));
            }
            let ok = match s.rule {
                Rule::R1 => s.to.b == s.from.b && s.to.a == &s.from.a + 1,
                Rule::R2 => {
                    s.from.b.is_one() && s.to.b.is_one() && s.from.a > threshold && s.to.a == &s.from.a - 1
                }
                Rule::Represent => {
                    s.from.value() == s.to.value() && (s.from.b.is_one() || s.to.b.is_one())
                }
            };
            if !ok {
                return fail(format!("step {i} ({:?}: {} -> {}) is invalid", s.rule, s.from, s.to));
            }
            cur = s.to.clone();
        }
        if cur.value() != self.query.value() {
            return fail(format!("chain ends at {cur}, not {}", self.query));
        }
        Ok(())
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }
}

impl fmt::Display for DerivationChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (seed)", self.seed)?;
        for s in &self.steps {
            match s.rule {
                Rule::Represent => write!(f, " = {}", s.to)?,
                r => write!(f, " -{r:?}-> {}", s.to)?,
            }
        }
        Ok(())
    }
}

/// L-space slopes of a knot known as seed facts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeKnowledge {
    pub knot: KnotInfo,
    pub seeds: Vec<SlopePair>,
}

impl SlopeKnowledge {
    pub fn new(knot: KnotInfo) -> Self {
        SlopeKnowledge { knot, seeds: vec![] }
    }

    /// Seeds with the knot's known integer L-space slope, if any.
    pub fn from_knot(knot: &KnotInfo) -> Self {
        let mut kb = SlopeKnowledge::new(knot.clone());
        if let Some(n) = knot.known_lspace_integer_slope {
            kb.seeds.push(SlopePair::integer(n));
        }
        kb
    }

    pub fn with_seed(mut self, s: SlopePair) -> Self {
        if !self.seeds.contains(&s) {
            self.seeds.push(s);
        }
        self
    }
}

/// Breadth-first search for a derivation of `query` from the seeds. States are
/// integers `n/1` and pairs `x/b` with `b` the reduced denominator of the
/// query; both are bounded by the query and the seeds, so the search ends.
pub fn lspace_propagate(kb: &SlopeKnowledge, query: &Rational) -> Result<Option<DerivationChain>> {
    if kb.seeds.is_empty() {
        return Err(Error::Precondition(format!("no L-space slope known for {}", kb.knot.id)));
    }
    let target = SlopePair::from(query);
    let b = target.b.clone();
    let threshold = BigInt::from(kb.knot.bennequin_bound());
    let int_hi = kb
        .seeds
        .iter()
        .filter(|s| s.b.is_one())
        .map(|s| s.a.clone())
        .chain([query.ceil()])
        .max()
        .expect("nonempty");
    let int_lo = kb
        .seeds
        .iter()
        .filter(|s| s.b.is_one())
        .map(|s| s.a.clone())
        .chain([query.floor()])
        .min()
        .expect("nonempty");
    let in_bounds = |s: &SlopePair| {
        if s.b.is_one() {
            s.a >= int_lo && s.a <= int_hi
        } else {
            s.b == b && s.a <= target.a
        }
    };

    let mut prev: HashMap<SlopePair, Option<(Rule, SlopePair)>> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut seeds = kb.seeds.clone();
    seeds.sort();
    for s in seeds {
        if prev.contains_key(&s) {
            continue;
        }
        prev.insert(s.clone(), None);
        queue.push_back(s);
    }
    let mut found = None;
    while let Some(s) = queue.pop_front() {
        if s.value() == *query {
            found = Some(s);
            break;
        }
        let mut next = Vec::new();
        next.push((Rule::R1, SlopePair { a: &s.a + 1, b: s.b.clone() }));
        if s.b.is_one() {
            if s.a > threshold {
                next.push((Rule::R2, SlopePair::integer(&s.a - 1)));
            }
            if !b.is_one() {
                next.push((Rule::Represent, SlopePair { a: &s.a * &b, b: b.clone() }));
            }
        } else if s.a.is_multiple_of(&s.b) {
            next.push((Rule::Represent, SlopePair::integer(&s.a / &s.b)));
        }
        for (rule, t) in next {
            if in_bounds(&t) && !prev.contains_key(&t) {
                prev.insert(t.clone(), Some((rule, s.clone())));
                queue.push_back(t);
            }
        }
    }
    let Some(end) = found else { return Ok(None) };
    let mut steps = Vec::new();
    let mut cur = end;
    while let Some(Some((rule, from))) = prev.get(&cur) {
        steps.push(DerivationStep { rule: *rule, from: from.clone(), to: cur.clone() });
        cur = from.clone();
    }
    steps.reverse();
    let chain = DerivationChain { knot: kb.knot.id.to_string(), seed: cur, query: target, steps };
    chain.verify(kb)?;
    Ok(Some(chain))
}
