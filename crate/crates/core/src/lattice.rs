//! Integral lattices: the lattice `Lambda(a1, n)`, exact short-vector
//! enumeration, isometric embeddings into diagonal lattices and into other
//! lattices, and the certificate that rules out fillings of
//! `S^3_r(T(2n+1,2))` for `2n-1 <= r < 4n`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::contact::KnotInfo;
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::floer::{lspace_propagate, DerivationChain, SlopeKnowledge};
use crate::homology::IntegerMatrix;
use crate::kirby::{definiteness, intersection_matrix, plumbing_presentation, Definiteness, PlumbingTree};

/// A symmetric integral bilinear form with its signature type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    gram: IntegerMatrix,
    definiteness: Definiteness,
}

impl GramLattice {
    pub fn new(gram: IntegerMatrix) -> Result<Self> {
        if !gram.is_square() || !gram.is_symmetric() {
            return Err(Error::InvalidInput("Gram matrix must be square and symmetric".into()));
        }
        let definiteness = definiteness(&gram)?;
        Ok(GramLattice { gram, definiteness })
    }

    pub fn gram(&self) -> &IntegerMatrix {
        &self.gram
    }

    pub fn definiteness(&self) -> Definiteness {
        self.definiteness
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_negative_definite(&self) -> bool {
        self.definiteness == Definiteness::NegativeDefinite
    }

    pub fn negated(&self) -> Self {
        let definiteness = match self.definiteness {
            Definiteness::PositiveDefinite => Definiteness::NegativeDefinite,
            Definiteness::NegativeDefinite => Definiteness::PositiveDefinite,
            d => d,
        };
        GramLattice { gram: self.gram.neg(), definiteness }
    }

    /// Intersection lattice of a plumbing.
    pub fn of_plumbing(tree: &PlumbingTree) -> Result<Self> {
        GramLattice::new(intersection_matrix(tree))
    }

    fn require_negative_definite(&self, what: &str) -> Result<()> {
        if self.is_negative_definite() {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{what} needs a negative definite lattice, got {:?}", self.definiteness)))
        }
    }

    fn small_gram(&self) -> Result<Vec<Vec<i64>>> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.gram[(i, j)]
                            .to_i64()
                            .ok_or_else(|| Error::Domain("Gram entries must fit in 64 bits".into()))
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.gram.fmt(f)
    }
}

/// Parses the matrix file format.
impl FromStr for GramLattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GramLattice::new(s.parse()?)
    }
}

/// Images of the basis vectors as the columns of `b` (`m x rank`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWitness {
    pub b: IntegerMatrix,
}

impl EmbeddingWitness {
    fn from_columns(m: usize, cols: &[Vec<i64>]) -> Self {
        EmbeddingWitness { b: IntegerMatrix::from_fn(m, cols.len(), |i, j| BigInt::from(cols[j][i])) }
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.b.rows()).map(|i| self.b[(i, j)].clone()).collect()
    }

    /// Whether `B^T T B = G`.
    pub fn verify(&self, target: &IntegerMatrix, g: &IntegerMatrix) -> bool {
        if target.rows() != self.b.rows() || g.rows() != self.b.cols() {
            return false;
        }
        let bt = self.b.transpose();
        matches!(bt.mul(target).and_then(|x| x.mul(&self.b)), Ok(p) if p == *g)
    }

    /// Whether `B^T (-I) B = G`.
    pub fn verify_diagonal(&self, g: &IntegerMatrix) -> bool {
        self.verify(&IntegerMatrix::identity(self.b.rows()).neg(), g)
    }
}

/// `Lambda(a1, n)`: the path `-n-1, -2, -2, -2, -a1` with a further `-2`
/// attached to the middle vertex.
pub fn lambda_gram(a1: u64, n: u64) -> Result<GramLattice> {
    if a1 < 2 || n < 1 {
        return Err(Error::Domain(format!("Lambda needs a1 >= 2 and n >= 1, got a1 = {a1}, n = {n}")));
    }
    let diag = [-(n as i64) - 1, -2, -2, -2, -(a1 as i64), -2];
    let mut g = IntegerMatrix::diagonal(&diag);
    for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)] {
        g[(i, j)] = BigInt::from(1);
        g[(j, i)] = BigInt::from(1);
    }
    GramLattice::new(g)
}

/// `sum |G_ii|`: an image vector of norm `|G_ii|` in a diagonal lattice has at
/// most `|G_ii|` nonzero coordinates, so an embedding into some `D_m` gives
/// one into `D_m` for this `m`.
pub fn embed_bound(g: &GramLattice) -> Result<u64> {
    g.require_negative_definite("embed_bound")?;
    let mut total = BigInt::zero();
    for i in 0..g.rank() {
        total += g.gram[(i, i)].abs();
    }
    total.to_u64().ok_or_else(|| Error::Domain("embedding bound overflows".into()))
}

/// Result of an exhaustive embedding search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub witness: Option<EmbeddingWitness>,
    /// Partial embeddings visited.
    pub nodes: u64,
}

/// Isometric embedding of `g` into `D_m = m<-1>`, or `None` if none exists.
pub fn embed_in_diagonal(g: &GramLattice, m: usize) -> Result<Option<EmbeddingWitness>> {
    Ok(search_diagonal(g, m)?.witness)
}

/// Exhaustive search for vectors `v_i in Z^m` with `v_i . v_j = -G_ij`.
///
/// Vectors are placed in order of decreasing norm. The stabilizer of the
/// placed vectors contains every signed permutation of the coordinates none
/// of them touches, so a new vector's entries on such fresh coordinates are
/// taken positive, nonincreasing and on the lowest-numbered fresh coordinates.
/// The search is sequential, so the returned witness is the first in this
/// fixed order.
pub fn search_diagonal(g: &GramLattice, m: usize) -> Result<SearchOutcome> {
    g.require_negative_definite("embed_in_diagonal")?;
    let gram = g.small_gram()?;
    let r = g.rank();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by_key(|&i| (gram[i][i], i));
    let mut s = DiagonalSearch { gram: &gram, order, m, placed: vec![vec![0; m]; r], nodes: 0 };
    let found = s.place(0, 0);
    let witness = found.then(|| EmbeddingWitness::from_columns(m, &s.placed));
    if let Some(w) = &witness {
        if !w.verify_diagonal(&g.gram) {
            return Err(Error::Internal("diagonal embedding failed verification".into()));
        }
    }
    Ok(SearchOutcome { witness, nodes: s.nodes })
}

struct DiagonalSearch<'a> {
    gram: &'a [Vec<i64>],
    order: Vec<usize>,
    m: usize,
    placed: Vec<Vec<i64>>,
    nodes: u64,
}

impl DiagonalSearch<'_> {
    fn place(&mut self, pos: usize, used: usize) -> bool {
        self.nodes += 1;
        if pos == self.order.len() {
            return true;
        }
        let i = self.order[pos];
        let norm = -self.gram[i][i];
        let mut v = vec![0i64; self.m];
        self.used_part(pos, used, 0, norm, &mut v)
    }

    /// Assigns coordinates `c..used`, then the fresh part.
    fn used_part(&mut self, pos: usize, used: usize, c: usize, budget: i64, v: &mut Vec<i64>) -> bool {
        if c == used {
            if !self.inner_products_match(pos, used, v) {
                return false;
            }
            let mut parts = Vec::new();
            return self.fresh_part(pos, used, budget, i64::MAX, &mut parts, v);
        }
        let bound = isqrt(budget);
        for x in -bound..=bound {
            v[c] = x;
            if self.used_part(pos, used, c + 1, budget - x * x, v) {
                return true;
            }
        }
        v[c] = 0;
        false
    }

    fn inner_products_match(&self, pos: usize, used: usize, v: &[i64]) -> bool {
        let i = self.order[pos];
        self.order[..pos].iter().all(|&j| {
            let dot: i64 = (0..used).map(|c| v[c] * self.placed[j][c]).sum();
            dot == -self.gram[i][j]
        })
    }

    /// Writes `budget` as a nonincreasing sum of squares of positive entries
    /// on fresh coordinates `used, used+1, ...`.
    fn fresh_part(
        &mut self,
        pos: usize,
        used: usize,
        budget: i64,
        cap: i64,
        parts: &mut Vec<i64>,
        v: &mut Vec<i64>,
    ) -> bool {
        if budget == 0 {
            let new_used = used + parts.len();
            let i = self.order[pos];
            let mut w = v.clone();
            w[used..new_used].copy_from_slice(parts);
            self.placed[i] = w;
            if self.place(pos + 1, new_used) {
                return true;
            }
            self.placed[i] = vec![0; self.m];
            return false;
        }
        if used + parts.len() == self.m {
            return false;
        }
        let top = isqrt(budget).min(cap);
        for x in (1..=top).rev() {
            parts.push(x);
            if self.fresh_part(pos, used, budget - x * x, x, parts, v) {
                return true;
            }
            parts.pop();
        }
        false
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All nonzero `v` with `v^T G v = t`, sorted lexicographically, by
/// Fincke–Pohst enumeration over the exact rational Cholesky form
/// `v^T G v = sum_i q_ii (v_i + sum_{j>i} q_ij v_j)^2`.
pub fn short_vectors(g: &GramLattice, t: i64) -> Result<Vec<Vec<i64>>> {
    let (gram, t) = match g.definiteness {
        Definiteness::PositiveDefinite => (g.small_gram()?, t),
        Definiteness::NegativeDefinite => (g.negated().small_gram()?, -t),
        d => return Err(Error::Precondition(format!("short_vectors needs a definite lattice, got {d:?}"))),
    };
    if t <= 0 {
        return Ok(vec![]);
    }
    let n = gram.len();
    let mut q = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        let mut d = Rational::from_int(gram[i][i]);
        for k in 0..i {
            d = d - &q[k][k] * &(&q[k][i] * &q[k][i]);
        }
        q[i][i] = d;
        for j in i + 1..n {
            let mut e = Rational::from_int(gram[i][j]);
            for k in 0..i {
                e = e - &q[k][k] * &(&q[k][i] * &q[k][j]);
            }
            q[i][j] = e / &q[i][i];
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fincke_pohst(&q, n, Rational::from_int(t), &mut x, &mut out);
    out.retain(|v| v.iter().any(|&c| c != 0));
    out.sort();
    Ok(out)
}

fn fincke_pohst(q: &[Vec<Rational>], i: usize, budget: Rational, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if i == 0 {
        if budget.is_zero() {
            out.push(x.clone());
        }
        return;
    }
    let i = i - 1;
    let n = q.len();
    let mut c = Rational::zero();
    for j in i + 1..n {
        c = c - &q[i][j] * x[j];
    }
    let s = &budget / &q[i][i];
    let (cf, sf) = (c.to_f64(), s.to_f64().max(0.0).sqrt());
    let lo = (cf - sf).floor() as i64 - 1;
    let hi = (cf + sf).ceil() as i64 + 1;
    for v in lo..=hi {
        let d = Rational::from_int(v) - &c;
        let used = &q[i][i] * &(&d * &d);
        if used > budget {
            continue;
        }
        x[i] = v;
        fincke_pohst(q, i, &budget - &used, x, out);
    }
    x[i] = 0;
}

/// An isometric embedding of `g` into `target`: vectors `w_i` with
/// `w_i^T T w_j = G_ij`, found by backtracking over short vectors.
pub fn contains_sublattice(target: &GramLattice, g: &GramLattice) -> Result<Option<EmbeddingWitness>> {
    target.require_negative_definite("contains_sublattice")?;
    g.require_negative_definite("contains_sublattice")?;
    if g.rank() > target.rank() {
        return Ok(None);
    }
    let t = target.small_gram()?;
    let gg = g.small_gram()?;
    let mut by_norm: BTreeMap<i64, Vec<(Vec<i64>, Vec<i64>)>> = BTreeMap::new();
    for i in 0..g.rank() {
        let norm = gg[i][i];
        if let std::collections::btree_map::Entry::Vacant(e) = by_norm.entry(norm) {
            let vs = short_vectors(target, norm)?
                .into_iter()
                .map(|v| {
                    let tv = (0..t.len()).map(|r| (0..t.len()).map(|c| t[r][c] * v[c]).sum()).collect();
                    (v, tv)
                })
                .collect();
            e.insert(vs);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(g.rank());
    let cands: Vec<&Vec<(Vec<i64>, Vec<i64>)>> = (0..g.rank()).map(|i| &by_norm[&gg[i][i]]).collect();
    if !sublattice_step(&gg, &cands, &mut chosen) {
        return Ok(None);
    }
    let cols: Vec<Vec<i64>> = chosen.iter().enumerate().map(|(i, &k)| cands[i][k].0.clone()).collect();
    let w = EmbeddingWitness::from_columns(target.rank(), &cols);
    if !w.verify(&target.gram, &g.gram) {
        return Err(Error::Internal("sublattice embedding failed verification".into()));
    }
    Ok(Some(w))
}

fn sublattice_step(g: &[Vec<i64>], cands: &[&Vec<(Vec<i64>, Vec<i64>)>], chosen: &mut Vec<usize>) -> bool {
    let i = chosen.len();
    if i == g.len() {
        return true;
    }
    for (k, (v, _)) in cands[i].iter().enumerate() {
        let ok = chosen.iter().enumerate().all(|(j, &kj)| {
            let tw = &cands[j][kj].1;
            v.iter().zip(tw).map(|(a, b)| a * b).sum::<i64>() == g[i][j]
        });
        if ok {
            chosen.push(k);
            if sublattice_step(g, cands, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LSpacePart {
    #[serde(with = "crate::bigser")]
    pub h1_order: BigInt,
    pub derivation: DerivationChain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlumbingPart {
    pub tree: PlumbingTree,
    #[serde(with = "crate::bigser")]
    pub determinant: BigInt,
    pub definiteness: Definiteness,
    #[serde(with = "crate::bigser")]
    pub a1: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SublatticePart {
    pub lambda: GramLattice,
    /// The plumbing lattice with reversed orientation.
    pub target: GramLattice,
    pub witness: EmbeddingWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalPart {
    pub m: u64,
    pub embedding: Option<EmbeddingWitness>,
    pub nodes: u64,
}

/// Every piece of the argument that `S^3_r(T(2n+1,2))` has no symplectic
/// filling for `2n-1 <= r < 4n`: an L-space (so fillings are negative
/// definite), the positive definite plumbing `X` it bounds, `Lambda(a1, n)`
/// inside `-X`, and no embedding of `Lambda(a1, n)` into a diagonal lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DonaldsonCertificate {
    pub n: u64,
    pub slope: Rational,
    pub lspace: LSpacePart,
    pub plumbing: PlumbingPart,
    pub sublattice: SublatticePart,
    pub diagonal: DiagonalPart,
}

fn part_failure(part: &str, reason: impl fmt::Display) -> Error {
    Error::CertificateFailure { part: part.to_string(), reason: reason.to_string() }
}

fn knot_of(n: u64) -> Result<KnotInfo> {
    KnotInfo::torus(2 * n + 1, 2)
}

pub fn donaldson_certificate(n: u64, r: &Rational) -> Result<DonaldsonCertificate> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let lo = Rational::from_int(2 * n as i64 - 1);
    let hi = Rational::from_int(4 * n as i64);
    if *r < lo || *r >= hi {
        return Err(Error::Precondition(format!("slope {r} is outside [{lo}, {hi})")));
    }

    let kb = SlopeKnowledge::from_knot(&knot_of(n)?);
    let derivation = lspace_propagate(&kb, r)
        .map_err(|e| part_failure("lspace", e))?
        .ok_or_else(|| part_failure("lspace", format!("slope {r} not derivable")))?;
    let lspace = LSpacePart { h1_order: r.numer().abs(), derivation };

    let p = plumbing_presentation(n, r).map_err(|e| part_failure("plumbing", e))?;
    if p.definiteness != Definiteness::PositiveDefinite {
        return Err(part_failure("plumbing", format!("plumbing is {:?}", p.definiteness)));
    }
    let a1 = p.a1().clone();
    let plumbing = PlumbingPart { tree: p.tree.clone(), determinant: p.determinant.clone(), definiteness: p.definiteness, a1: a1.clone() };

    let a1_small = a1.to_u64().ok_or_else(|| part_failure("sublattice", "a1 too large"))?;
    let lambda = lambda_gram(a1_small, n)?;
    let target = GramLattice::of_plumbing(&p.tree)?.negated();
    let witness = contains_sublattice(&target, &lambda)
        .map_err(|e| part_failure("sublattice", e))?
        .ok_or_else(|| part_failure("sublattice", "Lambda does not embed in the reversed plumbing lattice"))?;
    let sublattice = SublatticePart { lambda: lambda.clone(), target, witness };

    let m = embed_bound(&lambda)?;
    let outcome = search_diagonal(&lambda, m as usize)?;
    if let Some(w) = &outcome.witness {
        return Err(part_failure("diagonal", format!("Lambda embeds in D_{m}: {:?}", w.b)));
    }
    let diagonal = DiagonalPart { m, embedding: None, nodes: outcome.nodes };

    let cert = DonaldsonCertificate { n, slope: r.clone(), lspace, plumbing, sublattice, diagonal };
    cert.verify()?;
    Ok(cert)
}

impl DonaldsonCertificate {
    /// Re-checks all four parts from the stored data, re-running the
    /// diagonal search.
    pub fn verify(&self) -> Result<()> {
        let kb = SlopeKnowledge::from_knot(&knot_of(self.n)?);
        self.lspace.derivation.verify(&kb).map_err(|e| part_failure("lspace", e))?;
        if self.lspace.derivation.query.value() != self.slope {
            return Err(part_failure("lspace", "derivation is for another slope"));
        }

        let m = intersection_matrix(&self.plumbing.tree);
        let det = m.determinant()?;
        if det != self.plumbing.determinant || det.abs() != self.slope.numer().abs() {
            return Err(part_failure("plumbing", format!("determinant {det} does not match |{}|", self.slope.numer())));
        }
        if definiteness(&m)? != Definiteness::PositiveDefinite {
            return Err(part_failure("plumbing", "not positive definite"));
        }

        let a1 = self.plumbing.a1.to_u64().ok_or_else(|| part_failure("sublattice", "a1 too large"))?;
        let lambda = lambda_gram(a1, self.n)?;
        if self.sublattice.lambda != lambda || self.sublattice.target.gram != m.neg() {
            return Err(part_failure("sublattice", "lattices do not match the plumbing"));
        }
        if !self.sublattice.witness.verify(&self.sublattice.target.gram, &lambda.gram) {
            return Err(part_failure("sublattice", "witness fails B^T T B = Lambda"));
        }

        if self.diagonal.m != embed_bound(&lambda)? {
            return Err(part_failure("diagonal", "wrong bound"));
        }
        if search_diagonal(&lambda, self.diagonal.m as usize)?.witness.is_some() || self.diagonal.embedding.is_some() {
            return Err(part_failure("diagonal", "Lambda embeds in the diagonal lattice"));
        }
        Ok(())
    }
}
