//! Integer matrices, Smith normal form with transforms, and first homology of
//! surgery presentations.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    #[serde(with = "crate::bigser::seq")]
    entries: Vec<BigInt>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    #[serde(with = "crate::bigser::seq")]
    entries: Vec<BigInt>,
}

impl TryFrom<RawMatrix> for IntegerMatrix {
    type Error = Error;
    fn try_from(r: RawMatrix) -> Result<Self> {
        if r.rows.checked_mul(r.cols) != Some(r.entries.len()) {
            return Err(Error::Parse(format!("{}x{} matrix with {} entries", r.rows, r.cols, r.entries.len())));
        }
        Ok(IntegerMatrix { rows: r.rows, cols: r.cols, entries: r.entries })
    }
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        let entries = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        Ok(IntegerMatrix { rows: r, cols: c, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntegerMatrix { rows, cols, entries }
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone().into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn neg(&self) -> Self {
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| &self[(i, k)] * &other[(k, j)]).sum()
        }))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::InvalidInput("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * c;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * c;
            self[(i, dst)] += v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.entries[i * self.cols + j]
    }
}

/// Text format: a `rows cols` header line, then one line per row with
/// entries separated by single spaces.
impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let line: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", line.join(" "))?;
        }
        write!(f, "]")
    }
}

impl FromStr for IntegerMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let mut dim = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what} in matrix header")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let rows = dim("rows")?;
        let cols = dim("cols")?;
        let entries = tokens
            .map(|t| t.parse::<BigInt>().map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != rows * cols {
            return Err(Error::Parse(format!(
                "expected {} entries for a {rows}x{cols} matrix, found {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntegerMatrix { rows, cols, entries })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form `U * A * V = D`.
///
/// Pivots on the smallest nonzero absolute value in the active block, which
/// makes the transforms deterministic.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&d, t) else {
                return SnfResult { d, u, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and redo.
            let p = d[(t, t)].clone();
            let offending = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&p)));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_col(t);
            v.negate_col(t);
        }
    }
    SnfResult { d, u, v }
}

fn smallest_nonzero(d: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d[(i, j)].abs();
            if x.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| x < *b) {
                best = Some(((i, j), x));
            }
        }
    }
    best.map(|(idx, _)| idx)
}

/// A finitely generated abelian group `Z^free ⊕ Z/d1 ⊕ ... ⊕ Z/dk` with
/// `1 < d1 | d2 | ... | dk`, together with the image of each generator of the
/// presenting free module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstHomology {
    #[serde(with = "crate::bigser::seq")]
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
    /// `generator_map[i]` lists the coordinates of generator `i` in
    /// `Z/d1 ⊕ ... ⊕ Z/dk ⊕ Z^free` (torsion first, reduced mod `dj`).
    #[serde(with = "crate::bigser::seq2")]
    pub generator_map: Vec<Vec<BigInt>>,
}

impl FirstHomology {
    pub fn trivial() -> Self {
        FirstHomology { invariant_factors: vec![], free_rank: 0, generator_map: vec![] }
    }

    pub fn cyclic(order: BigInt) -> Self {
        if order.is_zero() {
            FirstHomology { invariant_factors: vec![], free_rank: 1, generator_map: vec![vec![BigInt::one()]] }
        } else if order.abs().is_one() {
            FirstHomology { invariant_factors: vec![], free_rank: 0, generator_map: vec![vec![]] }
        } else {
            FirstHomology {
                invariant_factors: vec![order.abs()],
                free_rank: 0,
                generator_map: vec![vec![BigInt::one()]],
            }
        }
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() + self.free_rank <= 1
    }

    /// Coordinates of `sum_i coeffs[i] * generator_i`, torsion parts reduced.
    pub fn class_of(&self, coeffs: &[BigInt]) -> Result<Vec<BigInt>> {
        if coeffs.len() != self.generator_map.len() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for {} generators",
                coeffs.len(),
                self.generator_map.len()
            )));
        }
        let width = self.invariant_factors.len() + self.free_rank;
        let mut out = vec![BigInt::zero(); width];
        for (c, g) in coeffs.iter().zip(&self.generator_map) {
            for (o, x) in out.iter_mut().zip(g) {
                *o += c * x;
            }
        }
        for (o, d) in out.iter_mut().zip(&self.invariant_factors) {
            *o = o.mod_floor(d);
        }
        Ok(out)
    }

    /// Order of the class with the given coordinates; `None` for infinite order.
    pub fn order_of_class(&self, class: &[BigInt]) -> Option<BigInt> {
        let k = self.invariant_factors.len();
        if class[k..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(
            self.invariant_factors
                .iter()
                .zip(class)
                .map(|(d, c)| d / d.gcd(c))
                .fold(BigInt::one(), |acc, o| acc.lcm(&o)),
        )
    }
}

impl fmt::Display for FirstHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel of `A: Z^cols -> Z^rows`, generators being the standard basis of
/// `Z^rows`.
pub fn cokernel(a: &IntegerMatrix) -> FirstHomology {
    let snf = smith_normal_form(a);
    let m = a.rows;
    let diag: Vec<BigInt> = (0..m)
        .map(|k| if k < a.cols { snf.d[(k, k)].clone() } else { BigInt::zero() })
        .collect();
    let torsion: Vec<usize> = (0..m).filter(|&k| diag[k] > BigInt::one()).collect();
    let free: Vec<usize> = (0..m).filter(|&k| diag[k].is_zero()).collect();
    let generator_map = (0..m)
        .map(|i| {
            torsion
                .iter()
                .map(|&k| snf.u[(k, i)].mod_floor(&diag[k]))
                .chain(free.iter().map(|&k| snf.u[(k, i)].clone()))
                .collect()
        })
        .collect();
    FirstHomology {
        invariant_factors: torsion.iter().map(|&k| diag[k].clone()).collect(),
        free_rank: free.len(),
        generator_map,
    }
}

/// First homology of integral surgery on a link with the given linking matrix;
/// generators are the meridians.
pub fn h1_from_linking(a: &IntegerMatrix) -> Result<FirstHomology> {
    if !a.is_symmetric() {
        return Err(Error::InvalidInput("linking matrix must be symmetric".into()));
    }
    Ok(cokernel(a))
}

/// Relation matrix of rational surgery on a link: row `i` reads
/// `p_i m_i + q_i sum_j lk_ij m_j = 0` for coefficient `p_i/q_i`, with `m_i`
/// the meridians. For integral coefficients this is the linking matrix.
pub fn surgery_relation_matrix(coeffs: &[Rational], linking: impl Fn(usize, usize) -> BigInt) -> IntegerMatrix {
    let n = coeffs.len();
    IntegerMatrix::from_fn(n, n, |i, j| {
        if i == j {
            coeffs[i].numer().clone()
        } else {
            coeffs[i].denom() * linking(i, j)
        }
    })
}

/// First homology of rational surgery on a link, generated by the meridians.
pub fn h1_of_surgery(coeffs: &[Rational], linking: impl Fn(usize, usize) -> BigInt) -> FirstHomology {
    cokernel(&surgery_relation_matrix(coeffs, linking).transpose())
}

/// `H1(S^3_{p/q}(K)) = Z/|p|`, or `Z` when `p = 0`.
pub fn h1_rational_surgery(p: &BigInt, q: &BigInt) -> Result<FirstHomology> {
    if !q.is_positive() {
        return Err(Error::Precondition(format!("denominator {q} must be positive")));
    }
    if !p.gcd(q).is_one() {
        return Err(Error::Precondition(format!("{p}/{q} is not reduced")));
    }
    Ok(FirstHomology::cyclic(p.clone()))
}

/// Order of `x` in `Z/N`.
pub fn order_in_cyclic(n: &BigInt, x: &BigInt) -> Result<BigInt> {
    if !n.is_positive() {
        return Err(Error::Precondition(format!("modulus {n} must be positive")));
    }
    let r = x.mod_floor(n);
    Ok(n / n.gcd(&r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn check(a: &IntegerMatrix) -> SnfResult {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        assert!(s.u.determinant().unwrap().abs().is_one());
        assert!(s.v.determinant().unwrap().abs().is_one());
        s
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check(&mat(&[&[2]])).diagonal(), vec![b(2)]);
        assert_eq!(check(&mat(&[&[2, 1], &[1, -3]])).diagonal(), vec![b(1), b(7)]);
        assert_eq!(check(&IntegerMatrix::zeros(3, 3)).diagonal(), vec![b(0); 3]);
        assert_eq!(check(&mat(&[&[-4]])).diagonal(), vec![b(4)]);
        assert_eq!(check(&mat(&[&[2, 0], &[0, 3]])).diagonal(), vec![b(1), b(6)]);
        assert_eq!(check(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])).diagonal(), vec![b(2), b(6), b(12)]);
        check(&mat(&[&[1, 2, 3], &[4, 5, 6]]));
        check(&IntegerMatrix::zeros(0, 2));
    }

    #[test]
    fn homology_examples() {
        let h = h1_from_linking(&mat(&[&[0]])).unwrap();
        assert_eq!((h.free_rank, h.invariant_factors.len()), (1, 0));
        assert_eq!(h.to_string(), "Z");
        let h = h1_from_linking(&IntegerMatrix::identity(4)).unwrap();
        assert_eq!(h, FirstHomology { invariant_factors: vec![], free_rank: 0, generator_map: vec![vec![]; 4] });
        assert_eq!(h.to_string(), "0");
        // trefoil +2 with a -3 framed meridian: Z/7 generated by the meridian.
        let h = h1_from_linking(&mat(&[&[2, 1], &[1, -3]])).unwrap();
        assert_eq!(h.invariant_factors, vec![b(7)]);
        let cls = h.class_of(&[b(0), b(1)]).unwrap();
        assert_eq!(h.order_of_class(&cls), Some(b(7)));
        assert!(h1_from_linking(&mat(&[&[1, 2], &[0, 1]])).is_err());
    }

    #[test]
    fn rational_surgery_homology() {
        assert_eq!(h1_rational_surgery(&b(15), &b(7)).unwrap().to_string(), "Z/15");
        assert_eq!(h1_rational_surgery(&b(5), &b(1)).unwrap().to_string(), "Z/5");
        assert_eq!(h1_rational_surgery(&b(0), &b(1)).unwrap().to_string(), "Z");
        assert_eq!(h1_rational_surgery(&b(-1), &b(3)).unwrap().to_string(), "0");
        assert!(h1_rational_surgery(&b(4), &b(2)).is_err());
    }

    #[test]
    fn cyclic_orders() {
        assert_eq!(order_in_cyclic(&b(15), &b(5)).unwrap(), b(3));
        assert_eq!(order_in_cyclic(&b(9), &b(0)).unwrap(), b(1));
        assert_eq!(order_in_cyclic(&b(7), &b(3)).unwrap(), b(7));
        assert_eq!(order_in_cyclic(&b(15), &b(-5)).unwrap(), b(3));
        assert!(order_in_cyclic(&b(0), &b(1)).is_err());
    }

    #[test]
    fn matrix_text_format() {
        let a = mat(&[&[2, -1], &[-1, 3]]);
        assert_eq!(a.to_string(), "2 2\n2 -1\n-1 3\n");
        assert_eq!(a.to_string().parse::<IntegerMatrix>().unwrap(), a);
        assert!("2 2\n1 2 3".parse::<IntegerMatrix>().is_err());
        assert!("x 2".parse::<IntegerMatrix>().is_err());
    }

    #[test]
    fn bareiss_determinant() {
        assert_eq!(mat(&[&[2, 1], &[1, -3]]).determinant().unwrap(), b(-7));
        assert_eq!(mat(&[&[0, 1], &[1, 0]]).determinant().unwrap(), b(-1));
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).determinant().unwrap(), b(0));
    }
}
