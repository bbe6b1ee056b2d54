//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use tightsurg::homology::smith_normal_form;
use tightsurg::kirby::{self, ComponentKind};
use tightsurg::{GraphDiagram, IntegerMatrix, Rational};

pub fn b(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, range: i64) -> IntegerMatrix {
    IntegerMatrix::from_fn(rows, cols, |_, _| b(rng.gen_range(-range..=range)))
}

/// Cofactor-expansion determinant, independent of the library's elimination.
pub fn laplace_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * laplace_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `D_k`: gcd of all `k x k` minors, for `k = 1..=min(rows, cols)`.
pub fn determinantal_divisors(a: &IntegerMatrix) -> Vec<BigInt> {
    let r = a.rows().min(a.cols());
    (1..=r)
        .map(|k| {
            let mut g = BigInt::zero();
            for rows in subsets(a.rows(), k) {
                for cols in subsets(a.cols(), k) {
                    let minor: Vec<Vec<BigInt>> =
                        rows.iter().map(|&i| cols.iter().map(|&j| a[(i, j)].clone()).collect()).collect();
                    g = g.gcd(&laplace_det(&minor));
                }
            }
            g
        })
        .collect()
}

/// Checks `U A V = D`, unimodularity, the divisibility chain and that the
/// diagonal agrees with the determinantal divisors.
pub fn check_snf(a: &IntegerMatrix) -> Result<(), String> {
    let s = smith_normal_form(a);
    let prod = s.u.mul(a).and_then(|x| x.mul(&s.v)).map_err(|e| e.to_string())?;
    if prod != s.d {
        return Err(format!("U A V != D for {a:?}"));
    }
    for (name, m) in [("U", &s.u), ("V", &s.v)] {
        let rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        if !laplace_det(&rows).abs().is_one() {
            return Err(format!("{name} is not unimodular"));
        }
    }
    for i in 0..s.d.rows() {
        for j in 0..s.d.cols() {
            if i != j && !s.d[(i, j)].is_zero() {
                return Err("D is not diagonal".into());
            }
        }
    }
    let diag = s.diagonal();
    if diag.iter().any(|x| x.is_negative()) {
        return Err("negative invariant factor".into());
    }
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
        if !ok {
            return Err(format!("divisibility fails in {diag:?}"));
        }
    }
    let dd = determinantal_divisors(a);
    let mut running = BigInt::one();
    for (k, d) in diag.iter().enumerate() {
        running *= d;
        if running != dd[k] {
            return Err(format!("prod of first {} factors {running} != D_{} = {}", k + 1, k + 1, dd[k]));
        }
    }
    Ok(())
}

/// `|det|` of the surgery presentation, built from the diagram directly:
/// row `i` is `p_i m_i + q_i sum_j lk_ij m_j`. Zero means infinite `H1`.
pub fn presentation_det(d: &GraphDiagram) -> BigInt {
    let n = d.len();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let c = &d.components()[i].coefficient;
            (0..n).map(|j| if i == j { c.numer().clone() } else { c.denom() * d.linking(i, j) }).collect()
        })
        .collect();
    laplace_det(&rows).abs()
}

/// Up to 6 unknots with small integral or rational coefficients and linking.
pub fn random_diagram(rng: &mut impl Rng) -> GraphDiagram {
    let mut d = GraphDiagram::new();
    let n = rng.gen_range(1..=5);
    for i in 0..n {
        let c = if rng.gen_bool(0.7) {
            Rational::from_int(rng.gen_range(-5i64..=5))
        } else {
            let q = rng.gen_range(2i64..=4);
            let p = loop {
                let p = rng.gen_range(-9i64..=9);
                if p != 0 && p.gcd(&q) == 1 {
                    break p;
                }
            };
            Rational::new(p, q).unwrap()
        };
        d.add_component(&format!("c{i}"), ComponentKind::Unknot, c).unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                d.set_linking(i, j, rng.gen_range(-2i64..=2)).unwrap();
            }
        }
    }
    d
}

/// Applies a random applicable Kirby move; `None` if the drawn move does not
/// apply to the drawn components.
pub fn random_move(rng: &mut impl Rng, d: &GraphDiagram) -> Option<(String, GraphDiagram)> {
    let n = d.len();
    let v = rng.gen_range(0..n);
    let w = rng.gen_range(0..n);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let (name, r) = match rng.gen_range(0..6) {
        0 => {
            let mut targets = Vec::new();
            for i in 0..n {
                if rng.gen_bool(0.5) {
                    targets.push((i, rng.gen_range(-2i64..=2)));
                }
            }
            ("blow_up", kirby::blow_up(d, &targets, sign))
        }
        1 => ("blow_down", kirby::blow_down(d, v)),
        2 => ("handle_slide", kirby::handle_slide(d, v, w, sign)),
        3 => ("rolfsen_twist", kirby::rolfsen_twist(d, v, rng.gen_range(-2i64..=2))),
        4 => ("slam_dunk", kirby::slam_dunk(d, v)),
        _ => ("rational_to_integer", kirby::rational_to_integer(d, v)),
    };
    r.ok().filter(|e| e != d).map(|e| (name.to_string(), e))
}

/// All reduced `p/q` with `lo <= p/q <= hi` and `1 <= q <= max_q`.
pub fn reduced_slopes(lo: i64, hi: i64, max_q: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in 1..=max_q {
        for p in lo * q..=hi * q {
            if p.gcd(&q) == 1 {
                out.push(Rational::new(p, q).unwrap());
            }
        }
    }
    out.sort();
    out
}

/// Evaluates `a0 - 1/(a1 - 1/(...))` from the back.
pub fn eval_chain(terms: &[BigInt]) -> Rational {
    let mut it = terms.iter().rev();
    let mut acc = Rational::from_int(it.next().expect("nonempty").clone());
    for a in it {
        acc = Rational::from_int(a.clone()) - acc.recip().expect("nonzero partial quotient");
    }
    acc
}

/// Every `v` in the box `|v_i| <= sqrt(t (G^-1)_ii)` with `v^T G v = t`, for a
/// positive definite `G` and `t > 0`.
pub fn brute_force_vectors(g: &[Vec<i64>], t: i64) -> Vec<Vec<i64>> {
    let n = g.len();
    let big: Vec<Vec<BigInt>> = g.iter().map(|r| r.iter().map(|&x| b(x)).collect()).collect();
    let det = laplace_det(&big);
    let bounds: Vec<i64> = (0..n)
        .map(|i| {
            let minor: Vec<Vec<BigInt>> = big
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, x)| x.clone()).collect())
                .collect();
            // (G^-1)_ii = cofactor / det
            let cof = laplace_det(&minor);
            let mut k = 0i64;
            while b((k + 1) * (k + 1)) * &det <= b(t) * &cof {
                k += 1;
            }
            k
        })
        .collect();
    let mut out = Vec::new();
    let mut v = vec![0i64; n];
    fn rec(i: usize, bounds: &[i64], v: &mut Vec<i64>, g: &[Vec<i64>], t: i64, out: &mut Vec<Vec<i64>>) {
        if i == v.len() {
            let q: i64 = (0..v.len()).map(|a| (0..v.len()).map(|c| v[a] * g[a][c] * v[c]).sum::<i64>()).sum();
            if q == t && v.iter().any(|&x| x != 0) {
                out.push(v.clone());
            }
            return;
        }
        for x in -bounds[i]..=bounds[i] {
            v[i] = x;
            rec(i + 1, bounds, v, g, t, out);
        }
        v[i] = 0;
    }
    rec(0, &bounds, &mut v, g, t, &mut out);
    out.sort();
    out
}

/// A random symmetric matrix with entries in `[-5, 5]` that is positive
/// definite, by rejection.
pub fn random_positive_definite(rng: &mut impl Rng, n: usize) -> Vec<Vec<i64>> {
    loop {
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = rng.gen_range(1..=5);
            for j in i + 1..n {
                let x = rng.gen_range(-5..=5);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        // leading principal minors positive
        let ok = (1..=n).all(|k| {
            let m: Vec<Vec<BigInt>> = (0..k).map(|i| (0..k).map(|j| b(g[i][j])).collect()).collect();
            laplace_det(&m).is_positive()
        });
        if ok {
            return g;
        }
    }
}
