//! Legendrian knots, contact surgery diagrams and their translation into
//! contact (±1)-surgery presentations.
//!
//! Rotation convention: a positive stabilization adds +1 to the rotation
//! number and a negative one adds -1. Only orders of Chern classes are
//! meaningful, and those are invariant under the global sign flip.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{neg_cf_expand, NegCF, Rational};
use crate::homology::{h1_of_surgery, order_in_cyclic, surgery_relation_matrix, FirstHomology, IntegerMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum KnotId {
    Unknot,
    /// Positive torus knot with `p > q >= 2`.
    Torus { p: u64, q: u64 },
    /// Twist knot with `q < 0` twists.
    Twist { q: i64 },
    Custom { name: String },
}

/// The facts about a knot that the verdicts consume.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnotInfo {
    pub id: KnotId,
    pub slice_genus: u64,
    /// Maximal Thurston–Bennequin number.
    pub max_tb: i64,
    /// A positive integer slope known to give an L-space.
    pub known_lspace_integer_slope: Option<u64>,
}

impl KnotInfo {
    pub fn unknot() -> Self {
        KnotInfo { id: KnotId::Unknot, slice_genus: 0, max_tb: -1, known_lspace_integer_slope: Some(1) }
    }

    /// `T(p,q)`; the parameters may be given in either order.
    pub fn torus(p: u64, q: u64) -> Result<Self> {
        let (p, q) = if p >= q { (p, q) } else { (q, p) };
        if q < 2 || p.gcd(&q) != 1 || p == q {
            return Err(Error::Domain(format!("T({p},{q}) is not a nontrivial torus knot")));
        }
        let g = (p - 1) * (q - 1) / 2;
        let tb = (p * q) as i64 - p as i64 - q as i64;
        Ok(KnotInfo {
            id: KnotId::Torus { p, q },
            slice_genus: g,
            max_tb: tb,
            // pq - 1 surgery on T(p,q) is a lens space (Moser).
            known_lspace_integer_slope: Some(p * q - 1),
        })
    }

    pub fn twist(q: i64) -> Result<Self> {
        if q >= 0 {
            return Err(Error::Domain(format!("twist knot needs q < 0, got {q}")));
        }
        Ok(KnotInfo { id: KnotId::Twist { q }, slice_genus: 1, max_tb: 1, known_lspace_integer_slope: None })
    }

    pub fn custom(name: &str, slice_genus: u64, max_tb: i64, lspace_slope: Option<u64>) -> Result<Self> {
        if name.is_empty() || name.contains(|c: char| c == ',' || c.is_whitespace()) {
            return Err(Error::InvalidInput(format!("bad knot name {name:?}")));
        }
        if max_tb > 2 * slice_genus as i64 - 1 {
            return Err(Error::Domain(format!(
                "max tb {max_tb} violates the slice Bennequin bound 2*{slice_genus}-1"
            )));
        }
        Ok(KnotInfo {
            id: KnotId::Custom { name: name.to_string() },
            slice_genus,
            max_tb,
            known_lspace_integer_slope: lspace_slope,
        })
    }

    /// `2 g_s - 1`.
    pub fn bennequin_bound(&self) -> i64 {
        2 * self.slice_genus as i64 - 1
    }
}

impl fmt::Display for KnotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotId::Unknot => write!(f, "unknot"),
            KnotId::Torus { p, q } => write!(f, "torus:{p},{q}"),
            KnotId::Twist { q } => write!(f, "twist:{q}"),
            KnotId::Custom { name } => write!(f, "custom:{name}"),
        }
    }
}

impl From<KnotId> for String {
    fn from(id: KnotId) -> String {
        id.to_string()
    }
}

impl TryFrom<String> for KnotId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Ok(s.parse::<KnotInfo>()?.id)
    }
}

/// Displays the knot in the shorthand accepted by `FromStr`.
impl fmt::Display for KnotInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            KnotId::Custom { name } => {
                write!(f, "custom:{name},{},{}", self.slice_genus, self.max_tb)?;
                if let Some(n) = self.known_lspace_integer_slope {
                    write!(f, ",{n}")?;
                }
                Ok(())
            }
            id => write!(f, "{id}"),
        }
    }
}

/// `unknot`, `torus:p,q`, `twist:q` or `custom:name,g_s,max_tb[,lspace_slope]`.
impl FromStr for KnotInfo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("knot {s:?}: {why}"));
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<&str> = if args.is_empty() { vec![] } else { args.split(',').collect() };
        let int = |t: &str| t.parse::<i64>().map_err(|_| bad("expected an integer"));
        match (kind, args.as_slice()) {
            ("unknot", []) => Ok(KnotInfo::unknot()),
            ("torus", [p, q]) => {
                let (p, q) = (int(p)?, int(q)?);
                if p < 0 || q < 0 {
                    return Err(bad("torus parameters must be positive"));
                }
                KnotInfo::torus(p as u64, q as u64)
            }
            ("twist", [q]) => KnotInfo::twist(int(q)?),
            ("custom", [name, g, tb, rest @ ..]) if rest.len() <= 1 => {
                let g = int(g)?;
                if g < 0 {
                    return Err(bad("negative slice genus"));
                }
                let slope = match rest.first() {
                    Some(n) => Some(u64::try_from(int(n)?).map_err(|_| bad("L-space slope must be positive"))?),
                    None => None,
                };
                KnotInfo::custom(name, g as u64, int(tb)?, slope)
            }
            _ => Err(bad("expected unknot, torus:p,q, twist:q or custom:name,g,tb[,n]")),
        }
    }
}

/// A Legendrian representative obtained from a base Legendrian (of known tb and
/// rotation) by stabilizations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendrianKnot {
    pub knot: KnotInfo,
    pub base_tb: i64,
    pub base_rot: i64,
    pub stab_pos: u64,
    pub stab_neg: u64,
}

impl LegendrianKnot {
    /// The max-tb representative, taken with rotation number 0.
    pub fn max_tb(knot: &KnotInfo) -> Self {
        LegendrianKnot { knot: knot.clone(), base_tb: knot.max_tb, base_rot: 0, stab_pos: 0, stab_neg: 0 }
    }

    pub fn tb(&self) -> i64 {
        self.base_tb - (self.stab_pos + self.stab_neg) as i64
    }

    pub fn rot(&self) -> i64 {
        self.base_rot + self.stab_pos as i64 - self.stab_neg as i64
    }

    pub fn stabilized(&self, pos: u64, neg: u64) -> Self {
        LegendrianKnot { stab_pos: self.stab_pos + pos, stab_neg: self.stab_neg + neg, ..self.clone() }
    }

    /// A contact-framing pushoff, then `pos`/`neg` further stabilizations.
    pub fn pushoff(&self, pos: u64, neg: u64) -> Self {
        LegendrianKnot {
            knot: self.knot.clone(),
            base_tb: self.tb(),
            base_rot: self.rot(),
            stab_pos: pos,
            stab_neg: neg,
        }
    }
}

/// Smooth surgery coefficient (Seifert framing) of contact `r`-surgery on a
/// Legendrian with the given tb.
pub fn smooth_coefficient(tb: i64, r_contact: &Rational) -> Result<Rational> {
    if r_contact.is_zero() {
        return Err(Error::Domain("contact 0-surgery undefined here".into()));
    }
    Ok(r_contact + &Rational::from_int(tb))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactComponent {
    pub knot: LegendrianKnot,
    pub coefficient: Rational,
    /// Index of the component this one is a Legendrian pushoff of.
    pub parent: Option<usize>,
}

/// Contact surgery diagram: Legendrian components with contact coefficients
/// and pairwise linking numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactDiagram {
    components: Vec<ContactComponent>,
    linking: Vec<Vec<i64>>,
}

impl Default for ContactDiagram {
    fn default() -> Self {
        Self::new()
    }
}

impl ContactDiagram {
    pub fn new() -> Self {
        ContactDiagram { components: vec![], linking: vec![] }
    }

    pub fn components(&self) -> &[ContactComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn linking(&self, i: usize, j: usize) -> i64 {
        self.linking[i][j]
    }

    fn push(&mut self, comp: ContactComponent) -> Result<usize> {
        if comp.coefficient.is_zero() {
            return Err(Error::Domain("contact coefficient must be nonzero".into()));
        }
        let idx = self.components.len();
        for row in &mut self.linking {
            row.push(0);
        }
        self.linking.push(vec![0; idx + 1]);
        self.components.push(comp);
        Ok(idx)
    }

    /// Adds a component unlinked from everything so far.
    pub fn add_root(&mut self, knot: LegendrianKnot, coefficient: Rational) -> Result<usize> {
        self.push(ContactComponent { knot, coefficient, parent: None })
    }

    /// Adds a pushoff of `parent`, stabilized `pos`/`neg` times.
    ///
    /// A pushoff lies in a standard neighborhood of its parent, so its linking
    /// with any earlier component `c` is `tb(parent)` when `c` is the parent
    /// and `lk(parent, c)` otherwise.
    pub fn add_pushoff(&mut self, parent: usize, pos: u64, neg: u64, coefficient: Rational) -> Result<usize> {
        let par = self
            .components
            .get(parent)
            .ok_or_else(|| Error::InvalidInput(format!("no component {parent}")))?;
        let knot = par.knot.pushoff(pos, neg);
        let parent_tb = par.knot.tb();
        let idx = self.push(ContactComponent { knot, coefficient, parent: Some(parent) })?;
        for c in 0..idx {
            let lk = if c == parent { parent_tb } else { self.linking[parent][c] };
            self.linking[idx][c] = lk;
            self.linking[c][idx] = lk;
        }
        Ok(idx)
    }

    /// Sets the linking number of two components in different pushoff trees.
    pub fn set_linking(&mut self, i: usize, j: usize, lk: i64) -> Result<()> {
        if i == j || i >= self.len() || j >= self.len() {
            return Err(Error::InvalidInput(format!("bad component pair ({i},{j})")));
        }
        if self.root_of(i) == self.root_of(j) {
            return Err(Error::InvalidInput("linking inside a pushoff tree is determined by tb".into()));
        }
        self.linking[i][j] = lk;
        self.linking[j][i] = lk;
        Ok(())
    }

    fn root_of(&self, mut i: usize) -> usize {
        while let Some(p) = self.components[i].parent {
            i = p;
        }
        i
    }

    /// Smooth coefficients `tb + r` of every component.
    pub fn smooth_coefficients(&self) -> Vec<Rational> {
        self.components
            .iter()
            .map(|c| &c.coefficient + &Rational::from_int(c.knot.tb()))
            .collect()
    }

    /// Relation matrix of the smooth surgery (the linking matrix when every
    /// smooth coefficient is integral).
    pub fn relation_matrix(&self) -> IntegerMatrix {
        surgery_relation_matrix(&self.smooth_coefficients(), |i, j| BigInt::from(self.linking[i][j]))
    }

    /// First homology of the surgered manifold, generated by the meridians.
    pub fn h1(&self) -> FirstHomology {
        h1_of_surgery(&self.smooth_coefficients(), |i, j| BigInt::from(self.linking[i][j]))
    }

    /// Poincaré dual of `c1` as a combination of meridians: `sum rot_i m_i`
    /// over components with integral smooth coefficient.
    pub fn c1_meridian_coefficients(&self) -> Vec<BigInt> {
        self.components.iter().map(|c| BigInt::from(c.knot.rot())).collect()
    }
}

/// One line per component, `knot-id tb rot coeff parent-index` (`-` for no
/// parent), followed by `link i j lk` lines for nonzero linkings between
/// different pushoff trees.
impl fmt::Display for ContactDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            let parent = c.parent.map_or("-".to_string(), |p| p.to_string());
            writeln!(f, "{} {} {} {} {}", c.knot.knot, c.knot.tb(), c.knot.rot(), c.coefficient, parent)?;
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.root_of(i) != self.root_of(j) && self.linking[i][j] != 0 {
                    writeln!(f, "link {i} {j} {}", self.linking[i][j])?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for ContactDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut d = ContactDiagram::new();
        for (n, line) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = |why: &str| Error::Parse(format!("line {}: {why}", n + 1));
            let f: Vec<&str> = line.split_whitespace().collect();
            if f[0] == "link" {
                let [_, i, j, lk] = f.as_slice() else { return Err(bad("expected `link i j lk`")) };
                let i = i.parse().map_err(|_| bad("bad index"))?;
                let j = j.parse().map_err(|_| bad("bad index"))?;
                let lk = lk.parse().map_err(|_| bad("bad linking number"))?;
                d.set_linking(i, j, lk)?;
                continue;
            }
            let [id, tb, rot, coeff, parent] = f.as_slice() else {
                return Err(bad("expected `knot-id tb rot coeff parent-index`"));
            };
            let knot: KnotInfo = id.parse()?;
            let tb: i64 = tb.parse().map_err(|_| bad("bad tb"))?;
            let rot: i64 = rot.parse().map_err(|_| bad("bad rotation number"))?;
            let coeff: Rational = coeff.parse()?;
            let parent: Option<usize> = match *parent {
                "-" => None,
                p => Some(p.parse().map_err(|_| bad("bad parent index"))?),
            };
            let (base_tb, base_rot) = match parent {
                None => (knot.max_tb, 0),
                Some(p) => {
                    let par = d.components.get(p).ok_or_else(|| bad("parent must precede child"))?;
                    if par.knot.knot != knot {
                        return Err(bad("pushoff of a different knot type"));
                    }
                    (par.knot.tb(), par.knot.rot())
                }
            };
            let (total, diff) = (base_tb - tb, rot - base_rot);
            if total < 0 || diff.abs() > total || (total - diff) % 2 != 0 {
                return Err(bad("tb/rot not reachable by stabilization"));
            }
            let pos = ((total + diff) / 2) as u64;
            let neg = ((total - diff) / 2) as u64;
            match parent {
                None => {
                    let leg = LegendrianKnot { knot, base_tb, base_rot, stab_pos: pos, stab_neg: neg };
                    d.add_root(leg, coeff)?;
                }
                Some(p) => {
                    d.add_pushoff(p, pos, neg, coeff)?;
                }
            }
        }
        Ok(d)
    }
}

/// A contact surgery diagram in which every coefficient is ±1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlusMinusPresentation {
    diagram: ContactDiagram,
}

impl PlusMinusPresentation {
    pub fn new(diagram: ContactDiagram) -> Result<Self> {
        let one = Rational::one();
        if let Some(c) = diagram.components.iter().find(|c| c.coefficient.abs() != one) {
            return Err(Error::InvalidInput(format!("coefficient {} is not ±1", c.coefficient)));
        }
        Ok(PlusMinusPresentation { diagram })
    }

    pub fn diagram(&self) -> &ContactDiagram {
        &self.diagram
    }

    pub fn into_diagram(self) -> ContactDiagram {
        self.diagram
    }

    pub fn count(&self, sign: i64) -> usize {
        let s = Rational::from_int(sign);
        self.diagram.components.iter().filter(|c| c.coefficient == s).count()
    }
}

/// Smallest `k` with `q - k p < 0`.
pub fn default_split_k(r: &Rational) -> Result<u64> {
    if !r.is_positive() {
        return Err(Error::Precondition(format!("split needs r > 0, got {r}")));
    }
    (r.denom() / r.numer() + 1u32)
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("split index for {r} too large")))
}

/// Contact `p/q`-surgery equals contact `1/k` followed by contact
/// `p/(q - kp)` on a pushoff, for any `k` with `q - kp < 0`.
pub fn split_positive_surgery(r: &Rational, k: u64) -> Result<(Rational, Rational)> {
    if !r.is_positive() {
        return Err(Error::Precondition(format!("split needs r > 0, got {r}")));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let (p, q) = (r.numer(), r.denom());
    let rest = q - BigInt::from(k) * p;
    if !rest.is_negative() {
        return Err(Error::Precondition(format!("q - kp = {rest} is not negative for r = {r}, k = {k}")));
    }
    Ok((Rational::new(1, k)?, Rational::new(p.clone(), rest)?))
}

/// Contact `1/k`-surgery on `knot` as `k` chained (+1)-pushoffs, the first
/// being the knot itself.
pub fn one_over_k_to_plus_ones(knot: &LegendrianKnot, k: u64) -> Result<PlusMinusPresentation> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let mut d = ContactDiagram::new();
    let mut last = d.add_root(knot.clone(), Rational::one())?;
    for _ in 1..k {
        last = d.add_pushoff(last, 0, 0, Rational::one())?;
    }
    PlusMinusPresentation::new(d)
}

/// The Legendrian link realizing a negative contact surgery: component `i` is
/// a pushoff of component `i-1` (component 0 of the surgered knot) carrying
/// `terms[i] - 2` stabilizations, where `terms` expands `1 - r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeChain {
    pub coefficient: Rational,
    pub expansion: NegCF,
    pub budgets: Vec<u64>,
}

impl NegativeChain {
    pub fn choices(&self) -> BigInt {
        count_structures(&self.expansion)
    }
}

pub fn negative_surgery_to_legendrian(r: &Rational) -> Result<NegativeChain> {
    if !r.is_negative() {
        return Err(Error::Precondition(format!("negative surgery needs r < 0, got {r}")));
    }
    let expansion = neg_cf_expand(&(Rational::one() - r.clone()))?;
    let budgets = expansion.small_terms()?.into_iter().map(|a| a - 2).collect();
    Ok(NegativeChain { coefficient: r.clone(), expansion, budgets })
}

/// `prod (a_i - 1)`: the number of stabilization choices.
pub fn count_structures(cf: &NegCF) -> BigInt {
    cf.terms().iter().map(|a| a - 1u32).product()
}

/// Upper limit on materialized stabilization choices.
pub const MAX_ENUMERATION: u64 = 1 << 20;

/// Every way to distribute the stabilization budgets `a_i - 2` into
/// (positive, negative) counts, positive-heavy choices first.
pub fn enumerate_stabilization_choices(cf: &NegCF) -> Result<Vec<Vec<(u64, u64)>>> {
    let total = count_structures(cf);
    if total > BigInt::from(MAX_ENUMERATION) {
        return Err(Error::Domain(format!("{total} choices exceed the enumeration limit")));
    }
    let budgets: Vec<u64> = cf.small_terms()?.into_iter().map(|a| a - 2).collect();
    let mut out: Vec<Vec<(u64, u64)>> = vec![vec![]];
    for b in budgets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).rev().map(move |pos| {
                    let mut v = prefix.clone();
                    v.push((pos, b - pos));
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

/// A rational contact surgery resolved into its (±1) ingredients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurgeryTranslation {
    pub knot: LegendrianKnot,
    pub contact_coefficient: Rational,
    pub smooth_coefficient: Rational,
    /// `(1/k, p/(q - kp))` when a positive surgery had to be split.
    pub split: Option<(Rational, Rational)>,
    pub plus_ones: u64,
    pub negative: Option<NegativeChain>,
}

impl SurgeryTranslation {
    pub fn choices(&self) -> BigInt {
        self.negative.as_ref().map_or_else(BigInt::one, NegativeChain::choices)
    }

    pub fn budgets(&self) -> &[u64] {
        self.negative.as_ref().map_or(&[], |n| n.budgets.as_slice())
    }

    /// Materializes the presentation for one stabilization choice (one
    /// `(pos, neg)` pair per chain component).
    pub fn presentation(&self, choice: &[(u64, u64)]) -> Result<PlusMinusPresentation> {
        let budgets = self.budgets();
        if choice.len() != budgets.len()
            || choice.iter().zip(budgets).any(|((p, n), b)| p + n != *b)
        {
            return Err(Error::InvalidInput(format!(
                "stabilization choice {choice:?} does not match budgets {budgets:?}"
            )));
        }
        let mut d = ContactDiagram::new();
        let mut last = None;
        if self.plus_ones > 0 {
            let mut i = d.add_root(self.knot.clone(), Rational::one())?;
            for _ in 1..self.plus_ones {
                i = d.add_pushoff(i, 0, 0, Rational::one())?;
            }
            last = Some(i);
        }
        let minus = -Rational::one();
        for (idx, &(pos, neg)) in choice.iter().enumerate() {
            let i = match last {
                Some(parent) => d.add_pushoff(parent, pos, neg, minus.clone())?,
                // Negative surgery on the knot itself: the first chain
                // component is the knot, stabilized.
                None if idx == 0 => d.add_root(self.knot.stabilized(pos, neg), minus.clone())?,
                None => unreachable!(),
            };
            last = Some(i);
        }
        PlusMinusPresentation::new(d)
    }

    /// The presentation with every stabilization positive.
    pub fn first_presentation(&self) -> Result<PlusMinusPresentation> {
        let choice: Vec<(u64, u64)> = self.budgets().iter().map(|&b| (b, 0)).collect();
        self.presentation(&choice)
    }
}

/// Translates contact `r`-surgery on `knot` into (±1)-surgeries. Positive
/// `r = 1/k` becomes `k` (+1)-pushoffs; other positive `r` is split with the
/// given `k` (default: smallest valid); negative `r` becomes a Legendrian
/// surgery chain.
pub fn translate_contact_surgery(knot: &LegendrianKnot, r: &Rational, k: Option<u64>) -> Result<SurgeryTranslation> {
    let smooth = smooth_coefficient(knot.tb(), r)?;
    let mut t = SurgeryTranslation {
        knot: knot.clone(),
        contact_coefficient: r.clone(),
        smooth_coefficient: smooth,
        split: None,
        plus_ones: 0,
        negative: None,
    };
    if r.is_negative() {
        t.negative = Some(negative_surgery_to_legendrian(r)?);
    } else if r.numer().is_one() && k.is_none() {
        t.plus_ones = r
            .denom()
            .to_u64()
            .ok_or_else(|| Error::Domain(format!("{r} needs too many pushoffs")))?;
    } else {
        let k = match k {
            Some(k) => k,
            None => default_split_k(r)?,
        };
        let (plus, rest) = split_positive_surgery(r, k)?;
        t.plus_ones = k;
        t.negative = Some(negative_surgery_to_legendrian(&rest)?);
        t.split = Some((plus, rest));
    }
    Ok(t)
}

/// Coefficient of `PD[mu]` in `c1` for the structure with `i` positive out of
/// `alpha - 1` stabilizations: `2i - (alpha - 1)`.
pub fn c1_coefficient(alpha: &BigInt, i: &BigInt) -> Result<BigInt> {
    if *alpha < BigInt::one() {
        return Err(Error::Precondition(format!("alpha = {alpha} must be at least 1")));
    }
    if i.is_negative() || *i >= *alpha {
        return Err(Error::Precondition(format!("i = {i} outside [0, {}]", alpha - 1u32)));
    }
    Ok(BigInt::from(2) * i - (alpha - 1u32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tightness {
    /// Realized by Legendrian surgery, hence Stein fillable and tight.
    SteinFillable,
    /// Positive contact surgery with nonvanishing contact invariant.
    TightNonzeroInvariant,
    /// The slope `2 g_s - 1`, about which nothing is claimed.
    Excluded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessVerdict {
    pub knot: KnotInfo,
    pub slope: Rational,
    /// `r - tb` for the max-tb representative.
    pub contact_coefficient: Rational,
    pub verdict: Tightness,
    pub recipe: Option<SurgeryTranslation>,
}

/// Verdict for `S^3_r(K)` when `K` has `g_s > 0` and `TB(K) = 2 g_s - 1`.
pub fn tightness_verdict(knot: &KnotInfo, r: &Rational) -> Result<TightnessVerdict> {
    if knot.slice_genus == 0 || knot.max_tb != knot.bennequin_bound() {
        return Err(Error::UnsupportedKnot(format!(
            "{} needs g_s > 0 and max tb = 2 g_s - 1 (g_s = {}, tb = {})",
            knot.id, knot.slice_genus, knot.max_tb
        )));
    }
    let t = Rational::from_int(knot.max_tb);
    let r_contact = r - &t;
    let (verdict, recipe) = if r_contact.is_zero() {
        (Tightness::Excluded, None)
    } else {
        let leg = LegendrianKnot::max_tb(knot);
        let recipe = translate_contact_surgery(&leg, &r_contact, None)?;
        let v = if r_contact.is_negative() { Tightness::SteinFillable } else { Tightness::TightNonzeroInvariant };
        (v, Some(recipe))
    };
    Ok(TightnessVerdict { knot: knot.clone(), slope: r.clone(), contact_coefficient: r_contact, verdict, recipe })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum FillabilityReason {
    /// `r` in `[2n-1, 4n)`: a filling would contradict Donaldson's theorem;
    /// the lattice certificate discharges it.
    DonaldsonObstruction,
    /// `r >= 4n`: contact `-(n+1)/n` on one Legendrian unknot and
    /// `-1/(r-4n)` on another (absent when `r = 4n`).
    NegativeUnknotSurgeries { first: Rational, second: Option<Rational> },
    /// `r < 2n-1`: Legendrian surgery on the max-tb torus knot.
    LegendrianSurgery { contact_coefficient: Rational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fillability {
    NoFillable,
    SteinFillable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillabilityVerdict {
    pub n: u64,
    pub slope: Rational,
    pub verdict: Fillability,
    pub reason: FillabilityReason,
}

/// Fillability of contact structures on `S^3_r(T(2n+1,2))`.
pub fn fillability_verdict(n: u64, r: &Rational) -> Result<FillabilityVerdict> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let lo = Rational::from_int(2 * n as i64 - 1);
    let hi = Rational::from_int(4 * n as i64);
    let (verdict, reason) = if *r < lo {
        (Fillability::SteinFillable, FillabilityReason::LegendrianSurgery { contact_coefficient: r - &lo })
    } else if *r < hi {
        (Fillability::NoFillable, FillabilityReason::DonaldsonObstruction)
    } else {
        let first = -Rational::new(n as i64 + 1, n as i64)?;
        let second = (r - &hi).recip().map(|x| -x);
        (Fillability::SteinFillable, FillabilityReason::NegativeUnknotSurgeries { first, second })
    };
    Ok(FillabilityVerdict { n, slope: r.clone(), verdict, reason })
}

/// The contact diagram of structure `i` on `N_alpha`: contact (+1) on the
/// max-tb trefoil and Legendrian surgery on a meridian unknot stabilized
/// `alpha - 1` times, `i` of them positively.
pub fn n_alpha_diagram(alpha: u64, i: u64) -> Result<ContactDiagram> {
    if alpha == 0 || i >= alpha {
        return Err(Error::Precondition(format!("need 0 <= i < alpha, got i = {i}, alpha = {alpha}")));
    }
    let trefoil = KnotInfo::torus(3, 2)?;
    let mut d = ContactDiagram::new();
    let t = d.add_root(LegendrianKnot::max_tb(&trefoil), Rational::one())?;
    let unknot = LegendrianKnot::max_tb(&KnotInfo::unknot()).stabilized(i, alpha - 1 - i);
    let u = d.add_root(unknot, -Rational::one())?;
    d.set_linking(t, u, 1)?;
    Ok(d)
}

/// Surgery slope of `N_alpha` on the trefoil: `2 + 1/(1 + alpha)`.
pub fn n_alpha_slope(alpha: &BigInt) -> Rational {
    Rational::from_int(2) + Rational::new(1, alpha + 1u32).expect("alpha >= 0")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub prime: u64,
    #[serde(with = "crate::bigser")]
    pub index: BigInt,
    #[serde(with = "crate::bigser")]
    pub c1_coefficient: BigInt,
    #[serde(with = "crate::bigser")]
    pub order: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedWindow {
    pub primes: Vec<u64>,
    pub reason: String,
}

/// `m` pairwise non-isomorphic tight structures on `N_alpha`, distinguished by
/// the prime orders of their Chern classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub m: u64,
    pub primes: Vec<u64>,
    #[serde(with = "crate::bigser")]
    pub product: BigInt,
    #[serde(with = "crate::bigser")]
    pub k: BigInt,
    #[serde(with = "crate::bigser")]
    pub alpha: BigInt,
    pub slope: Rational,
    #[serde(with = "crate::bigser")]
    pub h1_order: BigInt,
    pub entries: Vec<WitnessEntry>,
    pub rejected: Vec<RejectedWindow>,
}

impl WitnessReport {
    /// Re-derives every claim in the report from its primes.
    pub fn verify(&self) -> Result<()> {
        let fail = |why: String| Err(Error::Internal(format!("witness check: {why}")));
        if self.primes.len() as u64 != self.m || self.entries.len() as u64 != self.m {
            return fail("wrong number of primes".into());
        }
        if self.primes.windows(2).any(|w| next_odd_prime(w[0]) != w[1]) || !is_prime(self.primes[0]) || self.primes[0] < 3 {
            return fail("primes are not consecutive odd primes".into());
        }
        let product: BigInt = self.primes.iter().map(|&p| BigInt::from(p)).product();
        if product != self.product || product.mod_floor(&BigInt::from(4)) != BigInt::from(3) || product == BigInt::from(3) {
            return fail(format!("product {product} is not 3 mod 4 and > 3"));
        }
        if &self.k * 4u32 + 3u32 != product || self.alpha != &self.k * 2 {
            return fail("k or alpha inconsistent".into());
        }
        if self.h1_order != &self.alpha * 2u32 + 3u32 || self.slope != n_alpha_slope(&self.alpha) {
            return fail("N_alpha data inconsistent".into());
        }
        for (e, &p) in self.entries.iter().zip(&self.primes) {
            if e.prime != p {
                return fail("entry prime mismatch".into());
            }
            let c1 = c1_coefficient(&self.alpha, &e.index)?;
            if c1 != e.c1_coefficient || c1.clone() * p != self.h1_order {
                return fail(format!("c1 coefficient for p = {p}"));
            }
            if order_in_cyclic(&self.h1_order, &c1)? != BigInt::from(p) || e.order != BigInt::from(p) {
                return fail(format!("order for p = {p}"));
            }
        }
        let mut orders: Vec<&BigInt> = self.entries.iter().map(|e| &e.order).collect();
        orders.sort();
        orders.dedup();
        if orders.len() != self.entries.len() {
            return fail("orders not pairwise distinct".into());
        }
        Ok(())
    }
}

pub const DEFAULT_WITNESS_BOUND: u64 = 100_000;

pub fn witness_nonisomorphic(m: u64, bound: u64) -> Result<WitnessReport> {
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let mut rejected = Vec::new();
    let mut start = 3;
    while start < bound {
        let mut primes = vec![start];
        while (primes.len() as u64) < m {
            primes.push(next_odd_prime(*primes.last().unwrap()));
        }
        let product: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
        let residue = product.mod_floor(&BigInt::from(4));
        if product == BigInt::from(3) {
            rejected.push(RejectedWindow { primes, reason: "product 3 gives alpha = 0".into() });
        } else if residue != BigInt::from(3) {
            rejected.push(RejectedWindow { primes, reason: format!("product {product} is {residue} mod 4") });
        } else {
            let report = build_witness(m, primes, product, rejected)?;
            report.verify()?;
            return Ok(report);
        }
        start = next_odd_prime(start);
    }
    Err(Error::SearchExhausted { bound })
}

fn build_witness(m: u64, primes: Vec<u64>, product: BigInt, rejected: Vec<RejectedWindow>) -> Result<WitnessReport> {
    let k = (&product - 3u32) / 4u32;
    let alpha = &k * 2u32;
    let h1_order = &alpha * 2u32 + 3u32;
    let entries = primes
        .iter()
        .map(|&p| {
            let cofactor = &product / p;
            let twice = &cofactor + &alpha - 1u32;
            if twice.is_odd() {
                return Err(Error::Internal(format!("i(j) not integral for p = {p}")));
            }
            let index = twice / 2u32;
            let c1 = c1_coefficient(&alpha, &index)?;
            let order = order_in_cyclic(&h1_order, &c1)?;
            Ok(WitnessEntry { prime: p, index, c1_coefficient: c1, order })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessReport { m, slope: n_alpha_slope(&alpha), primes, product, k, alpha, h1_order, entries, rejected })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest odd prime greater than `n`.
pub fn next_odd_prime(n: u64) -> u64 {
    let mut c = if n < 3 { 3 } else { n + 1 + (n % 2) };
    while !is_prime(c) {
        c += 2;
    }
    c
}
