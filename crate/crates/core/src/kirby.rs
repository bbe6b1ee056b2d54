//! Framed-link surgery diagrams as weighted graphs, the Kirby moves acting on
//! them, and the move sequence exhibiting `S^3_r(T(2n+1,2))` as the boundary
//! of a plumbing.
//!
//! Diagrams are abstract: a component is an unknot or a torus knot, carries a
//! rational surgery coefficient, and components are related only through
//! linking numbers. Every move is the induced update on that data, so a handle
//! slide of two unknots is assumed to produce an unknot.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ceil_cf_expand, neg_cf_eval, NegCF, Rational};
use crate::homology::{h1_of_surgery, FirstHomology, IntegerMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    Unknot,
    TorusKnot { p: u64, q: u64 },
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::Unknot => write!(f, "unknot"),
            ComponentKind::TorusKnot { p, q } => write!(f, "torus:{p},{q}"),
        }
    }
}

impl FromStr for ComponentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "unknot" {
            return Ok(ComponentKind::Unknot);
        }
        let bad = || Error::Parse(format!("bad component kind {s:?}"));
        let (p, q) = s.strip_prefix("torus:").and_then(|r| r.split_once(',')).ok_or_else(bad)?;
        let p: u64 = p.parse().map_err(|_| bad())?;
        let q: u64 = q.parse().map_err(|_| bad())?;
        Ok(torus_kind(p, q))
    }
}

/// `T(1,q)` and `T(p,1)` are unknots.
fn torus_kind(p: u64, q: u64) -> ComponentKind {
    if p <= 1 || q <= 1 {
        ComponentKind::Unknot
    } else {
        ComponentKind::TorusKnot { p, q }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramComponent {
    pub label: String,
    pub kind: ComponentKind,
    pub coefficient: Rational,
}

/// A framed link given by its components and pairwise linking numbers.
///
/// The optional root is the original knot being surgered; it alone may be
/// blown up while carrying a rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDiagram {
    components: Vec<DiagramComponent>,
    linking: Vec<Vec<BigInt>>,
    root: Option<usize>,
    next_label: u64,
}

impl Default for GraphDiagram {
    fn default() -> Self {
        Self::new()
    }
}

impl GraphDiagram {
    pub fn new() -> Self {
        GraphDiagram { components: vec![], linking: vec![], root: None, next_label: 1 }
    }

    /// `r`-surgery on `T(p,q)`, the torus knot marked as root.
    pub fn torus_surgery(p: u64, q: u64, r: Rational) -> Result<Self> {
        let mut d = GraphDiagram::new();
        let i = d.add_component("K", torus_kind(p, q), r)?;
        d.root = Some(i);
        Ok(d)
    }

    pub fn components(&self) -> &[DiagramComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn set_root(&mut self, i: usize) -> Result<()> {
        self.check_index(i)?;
        self.root = Some(i);
        Ok(())
    }

    pub fn linking(&self, i: usize, j: usize) -> &BigInt {
        &self.linking[i][j]
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.components.iter().position(|c| c.label == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.find(label).ok_or_else(|| Error::InvalidInput(format!("no component labelled {label:?}")))
    }

    pub fn relabel(&mut self, i: usize, label: &str) -> Result<()> {
        self.check_index(i)?;
        if self.find(label).is_some_and(|j| j != i) {
            return Err(Error::InvalidInput(format!("label {label:?} already used")));
        }
        self.components[i].label = label.to_string();
        Ok(())
    }

    pub fn add_component(&mut self, label: &str, kind: ComponentKind, coefficient: Rational) -> Result<usize> {
        if label.is_empty() || label.contains(char::is_whitespace) {
            return Err(Error::InvalidInput(format!("bad label {label:?}")));
        }
        if self.find(label).is_some() {
            return Err(Error::InvalidInput(format!("label {label:?} already used")));
        }
        let idx = self.components.len();
        for row in &mut self.linking {
            row.push(BigInt::zero());
        }
        self.linking.push(vec![BigInt::zero(); idx + 1]);
        self.components.push(DiagramComponent { label: label.to_string(), kind, coefficient });
        Ok(idx)
    }

    pub fn set_linking(&mut self, i: usize, j: usize, lk: impl Into<BigInt>) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::InvalidInput("self-linking is the framing".into()));
        }
        let lk = lk.into();
        self.linking[i][j] = lk.clone();
        self.linking[j][i] = lk;
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("no component {i}")))
        }
    }

    fn fresh_label(&mut self) -> String {
        loop {
            let l = format!("x{}", self.next_label);
            self.next_label += 1;
            if self.find(&l).is_none() {
                return l;
            }
        }
    }

    fn remove(&mut self, v: usize) {
        self.components.remove(v);
        self.linking.remove(v);
        for row in &mut self.linking {
            row.remove(v);
        }
        self.root = match self.root {
            Some(r) if r == v => None,
            Some(r) if r > v => Some(r - 1),
            r => r,
        };
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&u| u != v && !self.linking[u][v].is_zero())
    }

    fn add_to_coefficient(&mut self, u: usize, delta: &BigInt) {
        let c = &self.components[u].coefficient + &Rational::from_int(delta.clone());
        self.components[u].coefficient = c;
    }

    fn add_to_linking(&mut self, u: usize, w: usize, delta: &BigInt) {
        self.linking[u][w] += delta;
        self.linking[w][u] += delta;
    }

    fn forbid_torus_neighbors(&self, v: usize, mv: &str) -> Result<()> {
        if let Some(u) = self.neighbors(v).find(|&u| self.components[u].kind != ComponentKind::Unknot) {
            return Err(Error::Move(format!(
                "{mv} would twist torus-knot component {}",
                self.components[u].label
            )));
        }
        Ok(())
    }

    /// Coefficients and linking matrix of the surgery presentation.
    pub fn h1(&self) -> FirstHomology {
        let coeffs: Vec<Rational> = self.components.iter().map(|c| c.coefficient.clone()).collect();
        h1_of_surgery(&coeffs, |i, j| self.linking[i][j].clone())
    }

    /// `|H1|`, or `None` when infinite.
    pub fn h1_order(&self) -> Option<BigInt> {
        self.h1().order()
    }

    /// Linking matrix; requires integral coefficients.
    pub fn linking_matrix(&self) -> Result<IntegerMatrix> {
        let diag = self
            .components
            .iter()
            .map(|c| {
                c.coefficient
                    .to_integer()
                    .ok_or_else(|| Error::InvalidInput(format!("{} has rational coefficient", c.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntegerMatrix::from_fn(self.len(), self.len(), |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                self.linking[i][j].clone()
            }
        }))
    }

    /// Reads the diagram as a plumbing: integral unknots linked pairwise at
    /// most once, forming a forest.
    pub fn to_plumbing(&self) -> Result<PlumbingTree> {
        let m = self.linking_matrix()?;
        if let Some(c) = self.components.iter().find(|c| c.kind != ComponentKind::Unknot) {
            return Err(Error::InvalidInput(format!("{} is knotted", c.label)));
        }
        let mut edges = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                match m[(i, j)].abs() {
                    x if x.is_zero() => {}
                    x if x.is_one() => edges.push((i, j)),
                    x => return Err(Error::InvalidInput(format!("linking {x} is not a plumbing edge"))),
                }
            }
        }
        let weights = (0..self.len()).map(|i| m[(i, i)].clone()).collect();
        PlumbingTree::new(weights, edges)
    }
}

/// Blows up a new `sign`-framed unknot linking each target `(index, mult)`
/// algebraically `mult` times: a target's coefficient gains `sign * mult^2`
/// and two targets' linking gains `sign * mult_u * mult_w`.
///
/// A torus-knot target must be the root, blown up negatively through two
/// parallel strands of a `T(p,2)`, which removes a full twist: `T(p,2)`
/// becomes `T(p-2,2)`.
pub fn blow_up(d: &GraphDiagram, targets: &[(usize, i64)], sign: i64) -> Result<GraphDiagram> {
    if sign.abs() != 1 {
        return Err(Error::Move(format!("blow-up sign must be ±1, got {sign}")));
    }
    let distinct: BTreeSet<usize> = targets.iter().map(|t| t.0).collect();
    if distinct.len() != targets.len() {
        return Err(Error::Move("repeated blow-up target".into()));
    }
    let mut out = d.clone();
    for &(u, mult) in targets {
        d.check_index(u)?;
        let c = &d.components[u];
        let is_root = d.root == Some(u);
        if !c.coefficient.is_integer() && !is_root {
            return Err(Error::Move(format!("cannot blow up rational-framed {}", c.label)));
        }
        if let ComponentKind::TorusKnot { p, q } = c.kind {
            if !is_root || sign != -1 || mult != 2 || q != 2 {
                return Err(Error::Move(format!(
                    "torus knot {} only admits a negative blow-up through two parallel strands",
                    c.label
                )));
            }
            out.components[u].kind = torus_kind(p - 2, 2);
        }
    }
    let s = BigInt::from(sign);
    for (a, &(u, mu)) in targets.iter().enumerate() {
        out.add_to_coefficient(u, &(&s * mu * mu));
        for &(w, mw) in &targets[a + 1..] {
            out.add_to_linking(u, w, &(&s * mu * mw));
        }
    }
    let label = out.fresh_label();
    let e = out.add_component(&label, ComponentKind::Unknot, Rational::from_int(sign))?;
    for &(u, mult) in targets {
        out.set_linking(u, e, mult)?;
    }
    Ok(out)
}

/// Removes a `±1`-framed unknot `v`; `u` gains `-e lk(u,v)^2` and the linking
/// of `u`, `w` gains `-e lk(u,v) lk(w,v)`.
pub fn blow_down(d: &GraphDiagram, v: usize) -> Result<GraphDiagram> {
    d.check_index(v)?;
    let c = &d.components[v];
    let eps = match c.coefficient.to_i64() {
        Some(e @ (1 | -1)) if c.kind == ComponentKind::Unknot => BigInt::from(e),
        _ => return Err(Error::Move(format!("{} is not a ±1-framed unknot", c.label))),
    };
    d.forbid_torus_neighbors(v, "blow-down")?;
    let mut out = d.clone();
    let nbrs: Vec<usize> = d.neighbors(v).collect();
    for (a, &u) in nbrs.iter().enumerate() {
        let lu = &d.linking[u][v];
        out.add_to_coefficient(u, &(-(&eps * lu * lu)));
        for &w in &nbrs[a + 1..] {
            out.add_to_linking(u, w, &(-(&eps * lu * &d.linking[w][v])));
        }
    }
    out.remove(v);
    Ok(out)
}

/// Slides integral unknot `a` over integral unknot `b`, `a -> a + sign*b`.
pub fn handle_slide(d: &GraphDiagram, a: usize, b: usize, sign: i64) -> Result<GraphDiagram> {
    d.check_index(a)?;
    d.check_index(b)?;
    if a == b || sign.abs() != 1 {
        return Err(Error::Move("handle slide needs two components and sign ±1".into()));
    }
    let (ca, cb) = (&d.components[a], &d.components[b]);
    let (Some(fa), Some(fb)) = (ca.coefficient.to_integer(), cb.coefficient.to_integer()) else {
        return Err(Error::Move("handle slides need integral framings".into()));
    };
    if ca.kind != ComponentKind::Unknot || cb.kind != ComponentKind::Unknot {
        return Err(Error::Move("handle slides are restricted to unknots".into()));
    }
    let s = BigInt::from(sign);
    let mut out = d.clone();
    let lab = &d.linking[a][b];
    out.components[a].coefficient = Rational::from_int(&fa + &fb + BigInt::from(2) * &s * lab);
    out.set_linking(a, b, lab + &s * &fb)?;
    for c in 0..d.len() {
        if c != a && c != b {
            let v = &d.linking[a][c] + &s * &d.linking[b][c];
            out.set_linking(a, c, v)?;
        }
    }
    Ok(out)
}

/// `t` full twists along unknot `v`: its coefficient `p/q` becomes
/// `p/(q + tp)`, a neighbour `u` gains `t lk(u,v)^2`, and neighbours `u`, `w`
/// gain `t lk(u,v) lk(w,v)` linking. A resulting `p/0` component is deleted.
pub fn rolfsen_twist(d: &GraphDiagram, v: usize, t: i64) -> Result<GraphDiagram> {
    d.check_index(v)?;
    let c = &d.components[v];
    if c.kind != ComponentKind::Unknot {
        return Err(Error::Move(format!("Rolfsen twist needs an unknot, {} is knotted", c.label)));
    }
    if t == 0 {
        return Ok(d.clone());
    }
    d.forbid_torus_neighbors(v, "Rolfsen twist")?;
    let tb = BigInt::from(t);
    let (p, q) = (c.coefficient.numer().clone(), c.coefficient.denom().clone());
    let mut out = d.clone();
    let nbrs: Vec<usize> = d.neighbors(v).collect();
    for (a, &u) in nbrs.iter().enumerate() {
        let lu = &d.linking[u][v];
        out.add_to_coefficient(u, &(&tb * lu * lu));
        for &w in &nbrs[a + 1..] {
            out.add_to_linking(u, w, &(&tb * lu * &d.linking[w][v]));
        }
    }
    let den = &q + &tb * &p;
    if den.is_zero() {
        out.remove(v);
    } else {
        out.components[v].coefficient = Rational::new(p, den)?;
    }
    Ok(out)
}

/// Slam-dunk: `v`, an unknot linking only `u` and that once, merges into the
/// integrally framed `u`, whose coefficient `n` becomes `n - 1/x` for `v`'s
/// coefficient `x`.
pub fn slam_dunk(d: &GraphDiagram, v: usize) -> Result<GraphDiagram> {
    d.check_index(v)?;
    let c = &d.components[v];
    if c.kind != ComponentKind::Unknot {
        return Err(Error::Move(format!("slam-dunk needs an unknot, {} is knotted", c.label)));
    }
    let nbrs: Vec<usize> = d.neighbors(v).collect();
    let [u] = nbrs.as_slice() else {
        return Err(Error::Move(format!("{} must link exactly one component", c.label)));
    };
    if !d.linking[*u][v].abs().is_one() {
        return Err(Error::Move(format!("{} is not a meridian", c.label)));
    }
    let Some(n) = d.components[*u].coefficient.to_integer() else {
        return Err(Error::Move(format!("{} must be integrally framed", d.components[*u].label)));
    };
    let inv = c
        .coefficient
        .recip()
        .ok_or_else(|| Error::Move(format!("{} is 0-framed", c.label)))?;
    let mut out = d.clone();
    out.components[*u].coefficient = Rational::from_int(n) - inv;
    out.remove(v);
    Ok(out)
}

/// Integral chain `[w0, ..., wk]` whose slam-dunk value
/// `w0 - 1/(w1 - 1/(... - 1/wk))` is `x`: `|x|` expands as `ceil(|x|)` followed
/// by its negative continued fraction tail, negated when `x < 0`.
pub fn integer_chain(x: &Rational) -> Vec<BigInt> {
    if x.is_integer() {
        return vec![x.numer().clone()];
    }
    let flip = x.is_negative();
    let (a0, tail) = ceil_cf_expand(&x.abs());
    let mut chain = vec![a0];
    if let Some(t) = tail {
        chain.extend(t.terms().iter().cloned());
    }
    if flip {
        chain.iter_mut().for_each(|w| *w = -&*w);
    }
    chain
}

/// Replaces rationally framed `v` by an integral chain hanging off it.
/// New vertices are labelled `<label>.1`, `<label>.2`, ...
pub fn rational_to_integer(d: &GraphDiagram, v: usize) -> Result<GraphDiagram> {
    d.check_index(v)?;
    let c = &d.components[v];
    if c.coefficient.is_integer() {
        return Ok(d.clone());
    }
    if c.kind != ComponentKind::Unknot {
        return Err(Error::Move(format!("{} is a torus knot", c.label)));
    }
    let chain = integer_chain(&c.coefficient);
    let label = c.label.clone();
    let mut out = d.clone();
    out.components[v].coefficient = Rational::from_int(chain[0].clone());
    let mut prev = v;
    for (i, w) in chain[1..].iter().enumerate() {
        let l = format!("{label}.{}", i + 1);
        let idx = out.add_component(&l, ComponentKind::Unknot, Rational::from_int(w.clone()))?;
        out.set_linking(prev, idx, 1)?;
        prev = idx;
    }
    Ok(out)
}

/// Text format: component lines `label kind coeff` (with a trailing `root`
/// on the root), then linking lines `label label lk` for nonzero linkings.
impl fmt::Display for GraphDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            write!(f, "{} {} {}", c.label, c.kind, c.coefficient)?;
            if self.root == Some(i) {
                write!(f, " root")?;
            }
            writeln!(f)?;
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if !self.linking[i][j].is_zero() {
                    writeln!(f, "{} {} {}", self.components[i].label, self.components[j].label, self.linking[i][j])?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for GraphDiagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut d = GraphDiagram::new();
        for (n, line) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = |why: &str| Error::Parse(format!("line {}: {why}", n + 1));
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                [a, b, lk] if d.find(a).is_some() && d.find(b).is_some() => {
                    let lk: BigInt = lk.parse().map_err(|_| bad("bad linking number"))?;
                    d.set_linking(d.index_of(a)?, d.index_of(b)?, lk)?;
                }
                [label, kind, coeff, rest @ ..] if rest.is_empty() || rest == ["root"] => {
                    let i = d.add_component(label, kind.parse()?, coeff.parse()?)?;
                    if !rest.is_empty() {
                        d.root = Some(i);
                    }
                }
                _ => return Err(bad("expected `label kind coeff [root]` or `label label lk`")),
            }
        }
        Ok(d)
    }
}

/// Weighted forest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlumbingTree {
    #[serde(with = "crate::bigser::seq")]
    weights: Vec<BigInt>,
    edges: Vec<(usize, usize)>,
}

impl PlumbingTree {
    pub fn new(weights: Vec<BigInt>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = weights.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        for &(a, b) in &edges {
            if b >= n || a == b {
                return Err(Error::InvalidInput(format!("bad plumbing edge ({a},{b})")));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::InvalidInput("plumbing graph has a cycle".into()));
            }
            parent[ra] = rb;
        }
        Ok(PlumbingTree { weights, edges })
    }

    /// A linear chain with the given weights.
    pub fn chain<T: Into<BigInt> + Clone>(weights: &[T]) -> Self {
        let w: Vec<BigInt> = weights.iter().cloned().map(Into::into).collect();
        let edges = (1..w.len()).map(|i| (i - 1, i)).collect();
        PlumbingTree::new(w, edges).expect("a chain is a tree")
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn negated(&self) -> Self {
        PlumbingTree { weights: self.weights.iter().map(|w| -w).collect(), edges: self.edges.clone() }
    }
}

/// Vertex lines `id weight`, then edge lines `id id`.
impl fmt::Display for PlumbingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.weights.iter().enumerate() {
            writeln!(f, "{i} {w}")?;
        }
        for (a, b) in &self.edges {
            writeln!(f, "{a} {b}")?;
        }
        Ok(())
    }
}

impl FromStr for PlumbingTree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut weights = Vec::new();
        let mut edges = Vec::new();
        for (n, line) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || Error::Parse(format!("line {}: expected `id weight` or `id id`", n + 1));
            let f: Vec<&str> = line.split_whitespace().collect();
            let [a, b] = f.as_slice() else { return Err(bad()) };
            let a: usize = a.parse().map_err(|_| bad())?;
            if edges.is_empty() && a == weights.len() {
                weights.push(b.parse::<BigInt>().map_err(|_| bad())?);
            } else {
                edges.push((a, b.parse::<usize>().map_err(|_| bad())?));
            }
        }
        PlumbingTree::new(weights, edges)
    }
}

pub fn intersection_matrix(t: &PlumbingTree) -> IntegerMatrix {
    let mut m = IntegerMatrix::diagonal(&t.weights);
    for &(a, b) in &t.edges {
        m[(a, b)] = BigInt::one();
        m[(b, a)] = BigInt::one();
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

/// Signature type of a symmetric form via exact rational `LDL^T` pivots.
pub fn definiteness(a: &IntegerMatrix) -> Result<Definiteness> {
    if !a.is_symmetric() {
        return Err(Error::InvalidInput("definiteness needs a symmetric matrix".into()));
    }
    let pivots = ldl_pivots(a);
    let n = a.rows();
    if pivots.len() == n {
        if pivots.iter().all(Rational::is_positive) {
            return Ok(Definiteness::PositiveDefinite);
        }
        if pivots.iter().all(Rational::is_negative) {
            return Ok(Definiteness::NegativeDefinite);
        }
        return Ok(Definiteness::Indefinite);
    }
    // A vanishing leading minor rules out definiteness.
    if a.determinant()?.is_zero() {
        Ok(Definiteness::Degenerate)
    } else {
        Ok(Definiteness::Indefinite)
    }
}

/// Pivots `d_k = D_k / D_{k-1}` of symmetric Gaussian elimination without
/// pivoting, stopping at the first zero pivot.
pub(crate) fn ldl_pivots(a: &IntegerMatrix) -> Vec<Rational> {
    let n = a.rows();
    let mut m: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| Rational::from_int(a[(i, j)].clone())).collect()).collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let p = m[k][k].clone();
        if p.is_zero() {
            break;
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &p;
            for j in k + 1..n {
                let v = &m[i][j] - &(&f * &m[k][j]);
                m[i][j] = v;
            }
        }
        pivots.push(p);
    }
    pivots
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertData {
    /// `{p, q, |a - b p q|}`.
    #[serde(with = "crate::bigser::seq")]
    pub multiplicities: [BigInt; 3],
    pub lens_space: bool,
    pub degenerate: bool,
}

/// Exceptional fibre multiplicities of `S^3_{a/b}(T(p,q))`.
pub fn moser_seifert(p: u64, q: u64, r: &Rational) -> Result<SeifertData> {
    if p.gcd(&q) != 1 {
        return Err(Error::Domain(format!("T({p},{q}) needs coprime parameters")));
    }
    let third = (r.numer() - r.denom() * BigInt::from(p) * BigInt::from(q)).abs();
    let degenerate = third.is_zero();
    let lens_space = third.is_one();
    Ok(SeifertData { multiplicities: [BigInt::from(p), BigInt::from(q), third], lens_space, degenerate })
}

/// One recorded step of a move sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveStep {
    pub description: String,
    pub components: usize,
    #[serde(with = "crate::bigser::opt")]
    pub h1_order: Option<BigInt>,
}

/// Star-shaped plumbing bounding `S^3_r(T(2n+1,2))` and the checks run on it.
///
/// The tree has a weight-2 centre `c` with three legs: `[2, n+1]`, `[2]` and
/// `[2, a1, ..., ak]`, where `(r-4n-2)/(r-4n-1) = [2, a1, ..., ak]`. The
/// vertices `n+1, 2, c, 2, a1` with the `[2]` leg on `c` span the negative of
/// `Lambda(a1, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Plumbing {
    pub n: u64,
    pub slope: Rational,
    pub tree: PlumbingTree,
    pub labels: Vec<String>,
    pub center: usize,
    /// Legs from the centre outwards, as vertex lists.
    pub legs: Vec<Vec<usize>>,
    /// `[2, a1, ..., ak]` expanding `(r-4n-2)/(r-4n-1)`.
    pub tail: NegCF,
    #[serde(with = "crate::bigser")]
    pub determinant: BigInt,
    pub definiteness: Definiteness,
    pub seifert: SeifertData,
    pub steps: Vec<MoveStep>,
}

impl Plumbing {
    pub fn a1(&self) -> &BigInt {
        &self.tail.terms()[1]
    }

    pub fn intersection_matrix(&self) -> IntegerMatrix {
        intersection_matrix(&self.tree)
    }

    /// Vertices in `Lambda(a1, n)` order: `n+1`, the two 2's and the centre
    /// along the path, `a1`, then the single-vertex leg.
    pub fn lambda_vertices(&self) -> [usize; 6] {
        let leg_of = |len: usize, first_weight: Option<&BigInt>| {
            self.legs.iter().find(|l| {
                l.len() == len && first_weight.is_none_or(|w| self.tree.weights[l[l.len() - 1]] == *w)
            })
        };
        let short = leg_of(1, None).expect("single-vertex leg");
        let np1 = BigInt::from(self.n + 1);
        let n_leg = leg_of(2, Some(&np1))
            .filter(|l| l != &short)
            .expect("[2, n+1] leg");
        let a_leg = self.legs.iter().find(|l| *l != short && *l != n_leg).expect("a-leg");
        [n_leg[1], n_leg[0], self.center, a_leg[0], a_leg[1], short[0]]
    }
}

fn record(steps: &mut Vec<MoveStep>, d: &GraphDiagram, description: String) {
    steps.push(MoveStep { description, components: d.len(), h1_order: d.h1_order() });
}

/// Replays the six-step Kirby sequence from `r`-surgery on `T(2n+1,2)` to a
/// plumbing, checking `|H1|` after every move and the determinant,
/// definiteness and Seifert invariants of the result.
pub fn plumbing_presentation(n: u64, r: &Rational) -> Result<Plumbing> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let four_n = Rational::from_int(4 * n as i64);
    if *r >= four_n {
        return Err(Error::Domain(format!("slope {r} is not below 4n = {four_n}")));
    }
    let p = 2 * n + 1;
    // r = 0 gives b1 = 1, matched by an infinite H1 and a zero determinant.
    let expected_h1 = r.numer().abs();
    let expected_order = (!r.is_zero()).then(|| expected_h1.clone());
    let mut steps = Vec::new();
    let mut d = GraphDiagram::torus_surgery(p, 2, r.clone())?;
    record(&mut steps, &d, format!("{r}-surgery on T({p},2)"));

    let check = |d: &GraphDiagram, what: &str| -> Result<()> {
        match d.h1_order() {
            o if o == expected_order => Ok(()),
            o => Err(Error::Internal(format!("|H1| = {o:?} after {what}, expected {expected_order:?}"))),
        }
    };

    // 1. n negative blow-ups, each through two parallel strands of the root.
    for i in 1..=n {
        d = blow_up(&d, &[(0, 2)], -1)?;
        d.relabel(d.len() - 1, &format!("c{i}"))?;
    }
    check(&d, "blow-ups")?;
    record(&mut steps, &d, format!("{n} blow-ups: root {} unknotted", d.components[0].coefficient));

    // 2. Slide c_i over c_{i+1}, turning the parallel (-1)'s into a chain.
    for i in 1..n {
        let a = d.index_of(&format!("c{i}"))?;
        let b = d.index_of(&format!("c{}", i + 1))?;
        d = handle_slide(&d, a, b, -1)?;
    }
    check(&d, "handle slides")?;
    record(&mut steps, &d, format!("{} handle slides", n - 1));

    // 3. Two blow-ups each meeting the root and c_n once, then slam-dunk the
    //    chain c_1, ..., c_{n-1} into c_n.
    let cn = d.index_of(&format!("c{n}"))?;
    for label in ["e1", "e2"] {
        d = blow_up(&d, &[(0, 1), (cn, 1)], -1)?;
        d.relabel(d.len() - 1, label)?;
    }
    for i in 1..n {
        d = slam_dunk(&d, d.index_of(&format!("c{i}"))?)?;
    }
    d.relabel(d.index_of(&format!("c{n}"))?, "R")?;
    check(&d, "blow-ups and slam-dunks")?;
    record(&mut steps, &d, "two blow-ups and integer-to-rational conversion".into());

    // 4. Slide e1 over e2.
    d = handle_slide(&d, d.index_of("e1")?, d.index_of("e2")?, -1)?;
    check(&d, "handle slide")?;
    record(&mut steps, &d, "handle slide".into());

    // 5. One positive Rolfsen twist on each of the root, R and e1.
    for label in ["K", "R", "e1"] {
        d = rolfsen_twist(&d, d.index_of(label)?, 1)?;
    }
    check(&d, "Rolfsen twists")?;
    record(&mut steps, &d, "three Rolfsen twists".into());

    // 6. Rational to integer surgery.
    for label in ["K", "R"] {
        d = rational_to_integer(&d, d.index_of(label)?)?;
    }
    check(&d, "rational-to-integer conversion")?;
    record(&mut steps, &d, "rational-to-integer conversion".into());

    let tree = d.to_plumbing()?;
    let labels = d.components.iter().map(|c| c.label.clone()).collect();
    let m = intersection_matrix(&tree);
    let determinant = m.determinant()?;
    if determinant.abs() != expected_h1 {
        return Err(Error::Internal(format!("|det| = {} but |p| = {expected_h1}", determinant.abs())));
    }
    let definiteness = definiteness(&m)?;
    let lo = Rational::from_int(2 * n as i64 - 1);
    if *r >= lo && definiteness != Definiteness::PositiveDefinite {
        return Err(Error::Internal(format!("plumbing for r = {r} is {definiteness:?}")));
    }

    let center = (0..tree.len())
        .find(|&v| tree.degree(v) == 3)
        .ok_or_else(|| Error::Internal("plumbing is not star-shaped".into()))?;
    if (0..tree.len()).any(|v| v != center && tree.degree(v) > 2) {
        return Err(Error::Internal("plumbing has more than one node".into()));
    }
    let legs: Vec<Vec<usize>> = tree
        .neighbors(center)
        .into_iter()
        .map(|start| {
            let mut leg = vec![start];
            let mut prev = center;
            while let Some(next) = tree.neighbors(*leg.last().unwrap()).into_iter().find(|&x| x != prev) {
                prev = *leg.last().unwrap();
                leg.push(next);
            }
            leg
        })
        .collect();

    let seifert = moser_seifert(p, 2, r)?;
    let mut leg_orders: Vec<BigInt> = legs
        .iter()
        .map(|leg| {
            let w: Vec<BigInt> = leg.iter().map(|&v| tree.weights[v].clone()).collect();
            NegCF::new(w).map(|cf| neg_cf_eval(&cf).numer().clone())
        })
        .collect::<Result<_>>()?;
    leg_orders.sort();
    let mut mult = seifert.multiplicities.to_vec();
    mult.sort();
    if leg_orders != mult {
        return Err(Error::Internal(format!(
            "leg orders {leg_orders:?} do not match Seifert multiplicities {mult:?}"
        )));
    }

    let ratio = (r - &Rational::from_int(4 * n as i64 + 2)) / (r - &Rational::from_int(4 * n as i64 + 1));
    let tail = crate::exactnum::neg_cf_expand(&ratio)?;
    let plumbing = Plumbing {
        n,
        slope: r.clone(),
        tree,
        labels,
        center,
        legs,
        tail,
        determinant,
        definiteness,
        seifert,
        steps,
    };
    let lam = plumbing.lambda_vertices();
    let w = |i: usize| plumbing.tree.weights[lam[i]].clone();
    let expect = [BigInt::from(n + 1), 2.into(), 2.into(), 2.into(), plumbing.a1().clone(), 2.into()];
    if (0..6).any(|i| w(i) != expect[i]) {
        return Err(Error::Internal("plumbing does not carry the expected Lambda vertices".into()));
    }
    Ok(plumbing)
}

/// `n` for which `T(2n+1, 2)` is the given torus knot.
pub fn two_bridge_torus_index(p: u64, q: u64) -> Option<u64> {
    let (p, q) = if p >= q { (p, q) } else { (q, p) };
    (q == 2 && p % 2 == 1 && p >= 3).then(|| (p - 1) / 2)
}
