//! Univariate polynomial arithmetic over the differential-operator symbol
//! and Smith normal form factorization of operator matrices.
//!
//! Matrices over the operator ring are reduced with exact rational
//! arithmetic; floating point only enters later, when kernels are built
//! from a parametrization.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigRational, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficient field of the operator ring.
pub type Coeff = BigRational;

/// Bit-size cap for numerators/denominators during SNF reduction.
const OVERFLOW_BITS: u64 = 8192;

/// A univariate polynomial in the differentiation symbol, lowest degree
/// first. The zero polynomial is the empty coefficient list.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Coeff>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Coeff>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Polynomial::new(vec![c])
    }

    /// The bare differentiation symbol.
    pub fn symbol() -> Self {
        Polynomial::new(vec![Coeff::zero(), Coeff::one()])
    }

    /// `c * ∂^k`.
    pub fn monomial(k: usize, c: Coeff) -> Self {
        let mut coeffs = vec![Coeff::zero(); k + 1];
        coeffs[k] = c;
        Polynomial::new(coeffs)
    }

    /// Convenience constructor from integer coefficients, lowest degree first.
    pub fn from_integers(coeffs: &[i64]) -> Self {
        Polynomial::new(
            coeffs
                .iter()
                .map(|&c| Coeff::from_integer(c.into()))
                .collect(),
        )
    }

    /// Exact conversion from binary floating-point coefficients.
    pub fn from_f64s(coeffs: &[f64]) -> Self {
        Polynomial::new(
            coeffs
                .iter()
                .map(|&c| Coeff::from_f64(c).expect("finite coefficient"))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Coeff> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Coeff {
        self.coeffs.get(k).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().expect("coefficient representable as f64"))
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: `self = q * div + r` with `deg r < deg div`.
    pub fn div_rem(&self, div: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        let lead = div.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Coeff::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / lead;
            for (i, c) in div.coeffs.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &(c * &factor);
            }
            // the leading term cancels exactly in rational arithmetic
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
            quot[k] = factor;
        }
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        if other.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        other.div_rem(self).1.is_zero()
    }

    /// Largest numerator/denominator bit size over all coefficients.
    fn coeff_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    /// Infinity norm of the coefficients, used for pivot tie-breaking.
    fn coeff_magnitude(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "D")?;
                    } else {
                        write!(f, "D^{k}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Polynomial::new(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        Polynomial::new(coeffs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Coeff::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Polynomial::new(coeffs)
    }
}

/// Rectangular matrix with polynomial entries, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Polynomial>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must match shape");
        PolyMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Polynomial) -> Self {
        let data = (0..rows * cols)
            .map(|k| f(k / cols, k % cols))
            .collect();
        PolyMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix::from_fn(rows, cols, |_, _| Polynomial::zero())
    }

    pub fn identity(n: usize) -> Self {
        PolyMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Polynomial::one()
            } else {
                Polynomial::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.data[i * self.cols + j] = p;
    }

    pub fn matmul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        PolyMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Polynomial::zero();
            for k in 0..self.cols {
                acc = &acc + &(self.get(i, k) * rhs.get(k, j));
            }
            acc
        })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows)
            .all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Polynomial::is_zero)
    }

    /// Exact determinant by Laplace expansion; intended for the small
    /// unimodularity checks, not for large matrices.
    pub fn determinant(&self) -> Polynomial {
        assert_eq!(self.rows, self.cols, "determinant of a square matrix");
        match self.rows {
            0 => Polynomial::one(),
            1 => self.get(0, 0).clone(),
            n => {
                let mut det = Polynomial::zero();
                for j in 0..n {
                    if self.get(0, j).is_zero() {
                        continue;
                    }
                    let minor = PolyMatrix::from_fn(n - 1, n - 1, |r, c| {
                        self.get(r + 1, if c < j { c } else { c + 1 }).clone()
                    });
                    let term = self.get(0, j) * &minor.determinant();
                    det = if j % 2 == 0 { &det + &term } else { &det - &term };
                }
                det
            }
        }
    }

    /// Determinant is a nonzero constant, i.e. the matrix is invertible
    /// over the polynomial ring.
    pub fn is_unimodular(&self) -> bool {
        let det = self.determinant();
        det.is_constant() && !det.is_zero()
    }

    fn max_coeff_bits(&self) -> u64 {
        self.data.iter().map(Polynomial::coeff_bits).max().unwrap_or(0)
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Factorization `Q · H · V = D` with `D` diagonal and `Q`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub q: PolyMatrix,
    pub d: PolyMatrix,
    pub v: PolyMatrix,
}

impl SnfResult {
    /// Diagonal entries of `D` up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<Polynomial> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

/// Builds the operator matrix of the state equation: the state block is
/// `A − ∂·I` and the input block is `B`, acting on the stacked channel
/// vector `(x, u)`.
pub fn system_to_operator_matrix(
    a: &nalgebra::DMatrix<f64>,
    b: &nalgebra::DMatrix<f64>,
) -> Result<PolyMatrix> {
    let n_x = a.nrows();
    if a.ncols() != n_x {
        return Err(Error::DimensionMismatch(format!(
            "state matrix must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if b.nrows() != n_x {
        return Err(Error::DimensionMismatch(format!(
            "input matrix has {} rows, expected {}",
            b.nrows(),
            n_x
        )));
    }
    let n_u = b.ncols();
    if n_x == 0 || n_u == 0 {
        return Err(Error::DimensionMismatch(
            "system must have at least one state and one input".into(),
        ));
    }
    let rational = |x: f64| {
        Coeff::from_f64(x).ok_or_else(|| {
            Error::DimensionMismatch(format!("non-finite system entry {x}"))
        })
    };
    let mut h = PolyMatrix::zeros(n_x, n_x + n_u);
    for i in 0..n_x {
        for j in 0..n_x {
            let mut p = Polynomial::constant(rational(a[(i, j)])?);
            if i == j {
                p = &p - &Polynomial::symbol();
            }
            h.set(i, j, p);
        }
        for j in 0..n_u {
            h.set(i, n_x + j, Polynomial::constant(rational(b[(i, j)])?));
        }
    }
    Ok(h)
}

/// Smith normal form over the operator ring.
///
/// Pivots are chosen by minimal degree (ties broken by smallest coefficient
/// magnitude), entries are reduced by Euclidean division, and each nonzero
/// diagonal entry is left monic and divides the next one.
pub fn smith_normal_form(h: &PolyMatrix) -> Result<SnfResult> {
    if h.rows() == 0 || h.cols() == 0 {
        return Err(Error::DimensionMismatch(
            "smith normal form of an empty matrix".into(),
        ));
    }
    let mut w = SnfWork {
        d: h.clone(),
        q: PolyMatrix::identity(h.rows()),
        v: PolyMatrix::identity(h.cols()),
    };
    let r = h.rows().min(h.cols());
    for t in 0..r {
        if !w.reduce_pivot(t)? {
            break;
        }
    }
    for t in 0..r {
        w.normalize_pivot(t);
    }
    Ok(SnfResult { q: w.q, d: w.d, v: w.v })
}

/// Free columns of `V`: the columns multiplying a zero diagonal entry of
/// `D` or no equation at all. Satisfies `H · P = 0` exactly.
pub fn parametrization(snf: &SnfResult) -> Result<PolyMatrix> {
    let m = snf.d.rows();
    let n = snf.d.cols();
    let free: Vec<usize> = (0..n)
        .filter(|&j| j >= m || snf.d.get(j, j).is_zero())
        .collect();
    if free.is_empty() {
        return Err(Error::NoFreeParameters);
    }
    let mut p = PolyMatrix::from_fn(n, free.len(), |i, c| snf.v.get(i, free[c]).clone());
    // normalize each column so its first nonzero entry is monic
    for c in 0..p.cols() {
        let lead = (0..p.rows())
            .map(|i| p.get(i, c))
            .find(|e| !e.is_zero())
            .and_then(|e| e.leading().cloned());
        if let Some(lead) = lead {
            if !lead.is_one() {
                let inv = Coeff::one() / lead;
                for i in 0..p.rows() {
                    let scaled = p.get(i, c).scale(&inv);
                    p.set(i, c, scaled);
                }
            }
        }
    }
    Ok(p)
}

struct SnfWork {
    d: PolyMatrix,
    q: PolyMatrix,
    v: PolyMatrix,
}

impl SnfWork {
    fn swap_rows(&mut self, i: usize, k: usize) {
        for j in 0..self.d.cols() {
            self.d.data.swap(i * self.d.cols + j, k * self.d.cols + j);
        }
        for j in 0..self.q.cols() {
            self.q.data.swap(i * self.q.cols + j, k * self.q.cols + j);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        for i in 0..self.d.rows() {
            self.d.data.swap(i * self.d.cols + j, i * self.d.cols + k);
        }
        for i in 0..self.v.rows() {
            self.v.data.swap(i * self.v.cols + j, i * self.v.cols + k);
        }
    }

    /// row_i -= f * row_k (applied to D and mirrored in Q).
    fn row_axpy(&mut self, i: usize, k: usize, f: &Polynomial) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.d.cols() {
            let new = self.d.get(i, j) - &(f * self.d.get(k, j));
            self.d.set(i, j, new);
        }
        for j in 0..self.q.cols() {
            let new = self.q.get(i, j) - &(f * self.q.get(k, j));
            self.q.set(i, j, new);
        }
    }

    /// col_j -= f * col_k (applied to D and mirrored in V).
    fn col_axpy(&mut self, j: usize, k: usize, f: &Polynomial) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.d.rows() {
            let new = self.d.get(i, j) - &(f * self.d.get(i, k));
            self.d.set(i, j, new);
        }
        for i in 0..self.v.rows() {
            let new = self.v.get(i, j) - &(f * self.v.get(i, k));
            self.v.set(i, j, new);
        }
    }

    fn select_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize, f64)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let e = self.d.get(i, j);
                let Some(deg) = e.degree() else { continue };
                let mag = e.coeff_magnitude();
                let better = match &best {
                    None => true,
                    Some((_, _, bdeg, bmag)) => match deg.cmp(bdeg) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => mag < *bmag,
                    },
                };
                if better {
                    best = Some((i, j, deg, mag));
                }
            }
        }
        best.map(|(i, j, _, _)| (i, j))
    }

    /// Brings the pivot block at `t` into Smith position: pivot alone in its
    /// row and column, dividing every remaining entry. Returns false when
    /// the trailing submatrix is zero.
    fn reduce_pivot(&mut self, t: usize) -> Result<bool> {
        'restart: loop {
            if self.d.max_coeff_bits() > OVERFLOW_BITS {
                return Err(Error::CoefficientOverflow(OVERFLOW_BITS));
            }
            let Some((pi, pj)) = self.select_pivot(t) else {
                return Ok(false);
            };
            if pi != t {
                self.swap_rows(pi, t);
            }
            if pj != t {
                self.swap_cols(pj, t);
            }
            // Euclidean elimination of row and column t; swaps promote a
            // smaller-degree remainder to the pivot, so degrees strictly
            // decrease and the loop terminates.
            loop {
                let mut changed = false;
                for i in t + 1..self.d.rows() {
                    if self.d.get(i, t).is_zero() {
                        continue;
                    }
                    let (quo, _) = self.d.get(i, t).div_rem(self.d.get(t, t));
                    self.row_axpy(i, t, &quo);
                    if !self.d.get(i, t).is_zero() {
                        self.swap_rows(i, t);
                        changed = true;
                    }
                }
                for j in t + 1..self.d.cols() {
                    if self.d.get(t, j).is_zero() {
                        continue;
                    }
                    let (quo, _) = self.d.get(t, j).div_rem(self.d.get(t, t));
                    self.col_axpy(j, t, &quo);
                    if !self.d.get(t, j).is_zero() {
                        self.swap_cols(j, t);
                        changed = true;
                    }
                }
                let row_clean = (t + 1..self.d.cols()).all(|j| self.d.get(t, j).is_zero());
                let col_clean = (t + 1..self.d.rows()).all(|i| self.d.get(i, t).is_zero());
                if row_clean && col_clean {
                    break;
                }
                if !changed {
                    break;
                }
            }
            // Divisibility: merge an offending row and redo the elimination.
            // The pivot degree strictly decreases each round.
            for i in t + 1..self.d.rows() {
                for j in t + 1..self.d.cols() {
                    if !self.d.get(t, t).divides(self.d.get(i, j)) {
                        let minus_one = Polynomial::constant(-Coeff::one());
                        self.row_axpy(t, i, &minus_one);
                        continue 'restart;
                    }
                }
            }
            return Ok(true);
        }
    }

    fn normalize_pivot(&mut self, t: usize) {
        let Some(lead) = self.d.get(t, t).leading().cloned() else {
            return;
        };
        if lead.is_one() {
            return;
        }
        let inv = Polynomial::constant(Coeff::one() / lead);
        for j in 0..self.d.cols() {
            let new = &inv * self.d.get(t, j);
            self.d.set(t, j, new);
        }
        for j in 0..self.q.cols() {
            let new = &inv * self.q.get(t, j);
            self.q.set(t, j, new);
        }
    }
}
