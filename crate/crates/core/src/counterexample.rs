//! Exact checks of matrix actions on real projective space `PR^m` used in
//! the obstruction to equivariant cocycle liftings for `GL_m^+(R)`, `m`
//! even.
//!
//! Points are the tuple `(e_0, e_1, …, e_m, e_{1,2})` where `e_0` is the
//! class of the all-ones vector and `e_{1,2}` that of `e_1 + e_2`. For each
//! `j ∈ {0, …, m}` a matrix of positive determinant should swap one pair of
//! the tuple with `e_j` removed and fix everything else.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A point of `PR^m`, stored as a primitive integer vector whose first
/// nonzero entry is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint(Vec<BigInt>);

impl ProjPoint {
    pub fn new(coords: &[BigRational]) -> Result<Self> {
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::InvalidParameter(
                "projective point needs a nonzero coordinate".into(),
            ));
        }
        let denom = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = coords
            .iter()
            .map(|c| (c * BigRational::from(denom.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let first_negative = ints.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
        for c in &mut ints {
            *c = &*c / &g;
            if first_negative {
                *c = -&*c;
            }
        }
        Ok(Self(ints))
    }

    pub fn from_integers(coords: &[i64]) -> Result<Self> {
        let q: Vec<BigRational> = coords.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        Self::new(&q)
    }

    /// `e_i` for `1 ≤ i ≤ m`, `e_0` for `i = 0`.
    pub fn basis(m: usize, i: usize) -> Self {
        let v: Vec<i64> = (1..=m).map(|k| if i == 0 || k == i { 1 } else { 0 }).collect();
        Self::from_integers(&v).unwrap()
    }

    /// `e_{1,2}`.
    pub fn e12(m: usize) -> Self {
        let v: Vec<i64> = (1..=m).map(|k| i64::from(k <= 2)).collect();
        Self::from_integers(&v).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Square matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(n: usize, entries: Vec<BigRational>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "{} entries do not form a {n}×{n} matrix",
                entries.len()
            )));
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("rows must form a square matrix".into()));
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Self::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        Self { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = BigRational::from_integer(v.into());
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                let factor = &a[r * n + col] / &p;
                if factor.is_zero() {
                    continue;
                }
                for k in col..n {
                    let sub = &factor * &a[col * n + k];
                    a[r * n + k] -= sub;
                }
            }
        }
        det
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.n != other.n {
            return Err(Error::InvalidParameter("matrix sizes differ".into()));
        }
        let n = self.n;
        let entries = (0..n * n)
            .map(|k| {
                (0..n).fold(BigRational::zero(), |acc, l| {
                    acc + self.get(k / n, l) * other.get(l, k % n)
                })
            })
            .collect();
        Ok(RationalMatrix { n, entries })
    }

    pub fn rows_as_strings(&self) -> Vec<String> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    }
}

/// `g·p` in `PR^m`.
pub fn gl_action(g: &RationalMatrix, p: &ProjPoint) -> Result<ProjPoint> {
    if g.n != p.dim() {
        return Err(Error::InvalidParameter(format!(
            "{}×{} matrix on a point of dimension {}",
            g.n,
            g.n,
            p.dim()
        )));
    }
    if g.determinant().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let image: Vec<BigRational> = (0..g.n)
        .map(|i| {
            (0..g.n).fold(BigRational::zero(), |acc, j| {
                acc + g.get(i, j) * BigRational::from_integer(p.0[j].clone())
            })
        })
        .collect();
    ProjPoint::new(&image)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    /// E.g. `"fixes e_0"`, `"sends e_3 to e_4"`.
    pub claim: String,
    pub image: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixReport {
    pub j: usize,
    pub label: String,
    /// One of `stated`, `analogous`, `candidate-repair`, `corrected-repair`.
    pub origin: String,
    pub rows: Vec<String>,
    pub determinant: String,
    pub determinant_positive: bool,
    pub claims: Vec<ClaimResult>,
    pub all_pass: bool,
}

impl MatrixReport {
    pub fn failing_claims(&self) -> impl Iterator<Item = &ClaimResult> {
        self.claims.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlReport {
    pub m: usize,
    pub matrices: Vec<MatrixReport>,
}

impl GlReport {
    pub fn find(&self, j: usize, origin: &str) -> Option<&MatrixReport> {
        self.matrices.iter().find(|r| r.j == j && r.origin == origin)
    }
}

fn point_name(i: usize, m: usize) -> String {
    if i == m + 1 {
        "e_{1,2}".into()
    } else {
        format!("e_{i}")
    }
}

fn point(i: usize, m: usize) -> ProjPoint {
    if i == m + 1 {
        ProjPoint::e12(m)
    } else {
        ProjPoint::basis(m, i)
    }
}

/// Checks that `g` has positive determinant, swaps the points with indices
/// `swap` and fixes every other point of the tuple with index `j` removed.
/// Index `m + 1` stands for `e_{1,2}`.
fn check(m: usize, j: usize, label: &str, origin: &str, g: RationalMatrix, swap: (usize, usize)) -> MatrixReport {
    let det = g.determinant();
    let determinant_positive = det.is_positive();
    let mut claims = vec![];
    for i in (0..=m + 1).filter(|&i| i != j) {
        let target = if i == swap.0 {
            swap.1
        } else if i == swap.1 {
            swap.0
        } else {
            i
        };
        let image = gl_action(&g, &point(i, m));
        let expected = point(target, m);
        let claim = if target == i {
            format!("fixes {}", point_name(i, m))
        } else {
            format!("sends {} to {}", point_name(i, m), point_name(target, m))
        };
        let (image, pass) = match image {
            Ok(p) => (p.to_string(), p == expected),
            Err(e) => (e.to_string(), false),
        };
        claims.push(ClaimResult {
            claim,
            image,
            expected: expected.to_string(),
            pass,
        });
    }
    let all_pass = determinant_positive && claims.iter().all(|c| c.pass);
    MatrixReport {
        j,
        label: label.into(),
        origin: origin.into(),
        rows: g.rows_as_strings(),
        determinant: det.to_string(),
        determinant_positive,
        claims,
        all_pass,
    }
}

/// `block ⊕ Id` in dimension `m`.
fn embed(m: usize, block: &[[i64; 4]; 4]) -> RationalMatrix {
    let mut g = RationalMatrix::identity(m);
    for (i, row) in block.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            g.set(i, k, v);
        }
    }
    g
}

/// Builds and checks every matrix of the argument for even `m ≥ 4`.
#[allow(clippy::vec_init_then_push)]
pub fn verify_gl_matrices(m: usize) -> Result<GlReport> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "m must be even and at least 4, got {m}"
        )));
    }
    let e12 = m + 1;
    let mut out = vec![];

    out.push(check(
        m,
        0,
        "swap(1,2) ⊕ (-1) ⊕ Id",
        "stated",
        embed(m, &[[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]),
        (1, 2),
    ));

    out.push(check(
        m,
        1,
        "rows (1,0,0,0),(0,1,0,0),(0,0,0,1),(2,0,-1,0)",
        "stated",
        embed(m, &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [2, 0, -1, 0]]),
        (3, 4),
    ));
    out.push(check(
        m,
        1,
        "rows (1,0,0,0),(0,1,0,0),(0,0,0,1),(2,-2,-1,0)",
        "candidate-repair",
        embed(m, &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [2, -2, -1, 0]]),
        (3, 4),
    ));
    out.push(check(
        m,
        1,
        "rows (1,0,0,0),(2,-1,0,0),(0,0,0,1),(0,0,1,0)",
        "corrected-repair",
        embed(m, &[[1, 0, 0, 0], [2, -1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
        (3, 4),
    ));

    out.push(check(
        m,
        2,
        "rows (1,0,0,0),(0,1,0,0),(0,0,0,1),(0,2,-1,0)",
        "analogous",
        embed(m, &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 2, -1, 0]]),
        (3, 4),
    ));
    out.push(check(
        m,
        2,
        "rows (-1,2,0,0),(0,1,0,0),(0,0,0,1),(0,0,1,0)",
        "corrected-repair",
        embed(m, &[[-1, 2, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
        (3, 4),
    ));

    out.push(check(
        m,
        3,
        "swap(1,2) ⊕ (1,0;2,-1) ⊕ Id",
        "stated",
        embed(m, &[[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 2, -1]]),
        (1, 2),
    ));

    for j in 4..=m {
        // Row 3 becomes 2e_j - e_3: it fixes e_0 and e_3, moves only e_j.
        let mut g = embed(m, &[[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]);
        g.set(2, j - 1, 2);
        out.push(check(
            m,
            j,
            &format!("swap(1,2), row 3 = 2e_{j} - e_3"),
            "analogous",
            g,
            (1, 2),
        ));
    }
    debug_assert!(out.iter().all(|r| r.claims.len() == m + 1 && r.j <= e12));
    Ok(GlReport { m, matrices: out })
}
