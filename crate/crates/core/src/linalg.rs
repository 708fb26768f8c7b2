//! Exact dense matrices over the integers and the integers mod m.
//!
//! Everything over `Z/m` is reduced to integer linear algebra: a system
//! `A x = b (mod m)` is solved as `[A | mI] (x; y) = b` over `Z`, and the
//! Smith form over `Z/m` is read off the integer Smith form of a lift.
//! Entries are arbitrary-precision; intermediate growth in the elimination
//! is never truncated.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Int = BigInt;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ring mismatch between operands")]
    RingMismatch,
    #[error("no solution")]
    NoSolution,
}

/// The base ring: `Z` or `Z/m` with `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingSpec {
    Integers,
    IntegersMod(u64),
}

impl RingSpec {
    pub fn zmod(m: u64) -> Result<Self, LinalgError> {
        if m < 2 {
            return Err(LinalgError::BadModulus(m));
        }
        Ok(RingSpec::IntegersMod(m))
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            RingSpec::Integers => None,
            RingSpec::IntegersMod(m) => Some(*m),
        }
    }

    pub fn modulus_int(&self) -> Option<Int> {
        self.modulus().map(Int::from)
    }

    pub fn is_integers(&self) -> bool {
        matches!(self, RingSpec::Integers)
    }

    /// Canonical representative: unchanged over `Z`, `0 <= e < m` over `Z/m`.
    pub fn reduce(&self, v: &Int) -> Int {
        match self {
            RingSpec::Integers => v.clone(),
            RingSpec::IntegersMod(m) => v.mod_floor(&Int::from(*m)),
        }
    }

    pub fn reduce_in_place(&self, v: &mut Int) {
        if let RingSpec::IntegersMod(m) = self {
            if v.is_negative() || *v >= Int::from(*m) {
                *v = v.mod_floor(&Int::from(*m));
            }
        }
    }

    pub fn is_unit(&self, v: &Int) -> bool {
        match self {
            RingSpec::Integers => v.abs().is_one(),
            RingSpec::IntegersMod(m) => v.gcd(&Int::from(*m)).is_one(),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::IntegersMod(m) => write!(f, "Z/{m}"),
        }
    }
}

/// Dense row-major matrix with canonical entries for its ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Int>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} over {} [", self.rows, self.cols, self.ring)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn new(
        ring: RingSpec,
        rows: usize,
        cols: usize,
        mut entries: Vec<Int>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        for e in entries.iter_mut() {
            ring.reduce_in_place(e);
        }
        Ok(ExactMatrix {
            ring,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(ring: RingSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            ring,
            rows,
            cols,
            entries: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(ring: RingSpec, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Int::one();
        }
        m
    }

    /// Builds from small integer rows. Panics on ragged input.
    pub fn from_rows(ring: RingSpec, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows.iter().flatten().map(|&v| Int::from(v)).collect();
        Self::new(ring, r, c, entries).expect("entry count checked")
    }

    pub fn from_columns(ring: RingSpec, rows: usize, columns: &[Vec<Int>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(ring, rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn diagonal(ring: RingSpec, rows: usize, cols: usize, diag: &[Int]) -> Self {
        let mut m = Self::zeros(ring, rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Int] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &Int {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Int) {
        let mut v = v;
        self.ring.reduce_in_place(&mut v);
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Int> {
        self.entries[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<Int> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Same entries viewed over `Z`.
    pub fn lift(&self) -> ExactMatrix {
        ExactMatrix {
            ring: RingSpec::Integers,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
        }
    }

    pub fn reduce_to(&self, ring: RingSpec) -> ExactMatrix {
        ExactMatrix::new(ring, self.rows, self.cols, self.entries.clone())
            .expect("same shape")
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = Self::zeros(self.ring, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.ring, other.ring, "ring mismatch in product");
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        for e in out.entries.iter_mut() {
            self.ring.reduce_in_place(e);
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                self.ring.reduce(&acc)
            })
            .collect()
    }

    fn zip_with(&self, other: &ExactMatrix, f: impl Fn(&Int, &Int) -> Int) -> ExactMatrix {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        ExactMatrix::new(self.ring, self.rows, self.cols, entries).expect("same shape")
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> ExactMatrix {
        self.scale(&int(-1))
    }

    pub fn scale(&self, s: &Int) -> ExactMatrix {
        let entries = self.entries.iter().map(|e| e * s).collect();
        ExactMatrix::new(self.ring, self.rows, self.cols, entries).expect("same shape")
    }

    pub fn hcat(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        assert_eq!(self.rows, other.rows, "row mismatch in hcat");
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(self.ring, self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[r * cols + c] = self.get(r, c).clone();
            }
            for c in 0..other.cols {
                out.entries[r * cols + self.cols + c] = other.get(r, c).clone();
            }
        }
        out
    }

    pub fn vcat(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        assert_eq!(self.cols, other.cols, "column mismatch in vcat");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        ExactMatrix {
            ring: self.ring,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn block_diag(&self, other: &ExactMatrix) -> ExactMatrix {
        let top = self.hcat(&ExactMatrix::zeros(self.ring, self.rows, other.cols));
        let bottom = ExactMatrix::zeros(self.ring, other.rows, self.cols).hcat(other);
        top.vcat(&bottom)
    }

    pub fn select_rows(&self, idx: &[usize]) -> ExactMatrix {
        let mut entries = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            entries.extend_from_slice(&self.entries[r * self.cols..(r + 1) * self.cols]);
        }
        ExactMatrix {
            ring: self.ring,
            rows: idx.len(),
            cols: self.cols,
            entries,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> ExactMatrix {
        let mut out = Self::zeros(self.ring, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.entries[r * idx.len() + j] = self.get(r, c).clone();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(self.ring, rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = a * other.get(k, l);
                        out.set(i * other.rows + k, j * other.cols + l, v);
                    }
                }
            }
        }
        out
    }

    /// Column-major flattening, the layout used for unknown matrices.
    pub fn vec_column_major(&self) -> Vec<Int> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                v.push(self.get(r, c).clone());
            }
        }
        v
    }

    pub fn from_column_major(ring: RingSpec, rows: usize, cols: usize, v: &[Int]) -> ExactMatrix {
        assert_eq!(v.len(), rows * cols);
        let mut out = Self::zeros(ring, rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                out.set(r, c, v[c * rows + r].clone());
            }
        }
        out
    }
}

/// `U · A · V = D` with `U`, `V` invertible over the ring and `D` diagonal
/// with `d1 | d2 | ...`, zeros last.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: ExactMatrix,
    pub d: ExactMatrix,
    pub v: ExactMatrix,
    pub u_inv: ExactMatrix,
    pub v_inv: ExactMatrix,
    pub rank: usize,
    pub source_rows: usize,
    pub source_cols: usize,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    /// Non-unit diagonal entries (zeros kept, they mark free summands).
    pub fn invariant_factors(&self) -> Vec<Int> {
        self.diagonal()
            .into_iter()
            .filter(|d| !self.d.ring().is_unit(d))
            .collect()
    }
}

/// Working state for the integer elimination. Transforms are tracked
/// alongside their inverses so callers never need to invert a unimodular
/// matrix afterwards.
struct IntSnf {
    a: Vec<Vec<Int>>,
    u: Vec<Vec<Int>>,
    u_inv: Vec<Vec<Int>>,
    v: Vec<Vec<Int>>,
    v_inv: Vec<Vec<Int>>,
    m: usize,
    n: usize,
}

fn identity_rows(n: usize) -> Vec<Vec<Int>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect()
}

impl IntSnf {
    fn new(a: &ExactMatrix) -> Self {
        let m = a.rows();
        let n = a.cols();
        IntSnf {
            a: (0..m).map(|r| a.row(r)).collect(),
            u: identity_rows(m),
            u_inv: identity_rows(m),
            v: identity_rows(n),
            v_inv: identity_rows(n),
            m,
            n,
        }
    }

    // row_i -= q * row_t
    fn row_axpy(&mut self, i: usize, t: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.n {
            let d = &self.a[t][c] * q;
            self.a[i][c] -= d;
        }
        for c in 0..self.m {
            let d = &self.u[t][c] * q;
            self.u[i][c] -= d;
        }
        for r in 0..self.m {
            let d = &self.u_inv[r][i] * q;
            self.u_inv[r][t] += d;
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in 0..self.m {
            self.u_inv[r].swap(i, j);
        }
    }

    fn row_negate(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        for x in self.u[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        for r in 0..self.m {
            let x = std::mem::take(&mut self.u_inv[r][i]);
            self.u_inv[r][i] = -x;
        }
    }

    // col_j -= q * col_t
    fn col_axpy(&mut self, j: usize, t: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.m {
            let d = &self.a[r][t] * q;
            self.a[r][j] -= d;
        }
        for r in 0..self.n {
            let d = &self.v[r][t] * q;
            self.v[r][j] -= d;
        }
        for c in 0..self.n {
            let d = &self.v_inv[j][c] * q;
            self.v_inv[t][c] += d;
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.m {
            self.a[r].swap(i, j);
        }
        for r in 0..self.n {
            self.v[r].swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// Smallest nonzero |entry| in the trailing block, ties to lowest
    /// row-major index.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for r in t..self.m {
            for c in t..self.n {
                let x = &self.a[r][c];
                if x.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((r, c)),
                    Some((br, bc)) => {
                        if x.abs() < self.a[br][bc].abs() {
                            best = Some((r, c));
                        }
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) -> usize {
        let k = self.m.min(self.n);
        let mut rank = 0;
        for t in 0..k {
            let Some((pr, pc)) = self.find_pivot(t) else {
                break;
            };
            self.row_swap(t, pr);
            self.col_swap(t, pc);
            loop {
                // clear column t and row t, re-pivoting on any remainder
                let mut dirty = false;
                for i in (t + 1)..self.m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&self.a[t][t]);
                    self.row_axpy(i, t, &q);
                    if !self.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
                for j in (t + 1)..self.n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&self.a[t][t]);
                    self.col_axpy(j, t, &q);
                    if !self.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    let mut best = (t, t);
                    for i in (t + 1)..self.m {
                        if !self.a[i][t].is_zero()
                            && self.a[i][t].abs() < self.a[best.0][best.1].abs()
                        {
                            best = (i, t);
                        }
                    }
                    for j in (t + 1)..self.n {
                        if !self.a[t][j].is_zero()
                            && self.a[t][j].abs() < self.a[best.0][best.1].abs()
                        {
                            best = (t, j);
                        }
                    }
                    self.row_swap(t, best.0);
                    self.col_swap(t, best.1);
                    continue;
                }
                // divisibility of the trailing block by the pivot
                let mut offender = None;
                'outer: for i in (t + 1)..self.m {
                    for j in (t + 1)..self.n {
                        if !self.a[i][j].is_multiple_of(&self.a[t][t]) {
                            offender = Some(i);
                            break 'outer;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        self.row_axpy(t, i, &int(-1));
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.row_negate(t);
            }
            rank += 1;
        }
        rank
    }
}

fn rows_to_matrix(ring: RingSpec, rows: Vec<Vec<Int>>, ncols: usize) -> ExactMatrix {
    let nrows = rows.len();
    let entries = rows.into_iter().flatten().collect();
    ExactMatrix::new(ring, nrows, ncols, entries).expect("rectangular")
}

/// Integer Smith form of the lift of `a`, transforms included.
pub(crate) fn snf_integer(a: &ExactMatrix) -> SnfDecomposition {
    let mut st = IntSnf::new(a);
    let rank = st.run();
    let (m, n) = (st.m, st.n);
    let z = RingSpec::Integers;
    SnfDecomposition {
        d: rows_to_matrix(z, st.a, n),
        u: rows_to_matrix(z, st.u, m),
        u_inv: rows_to_matrix(z, st.u_inv, m),
        v: rows_to_matrix(z, st.v, n),
        v_inv: rows_to_matrix(z, st.v_inv, n),
        rank,
        source_rows: m,
        source_cols: n,
    }
}

/// Smith normal form over the matrix's ring.
///
/// Over `Z/m` the integer form of the lift is reduced mod `m` and each
/// diagonal entry `d` is rescaled by a unit to `gcd(d, m)`, so the
/// diagonal is the canonical generator of each invariant ideal.
pub fn snf(a: &ExactMatrix) -> SnfDecomposition {
    let integer = snf_integer(&a.lift());
    let ring = a.ring();
    let Some(m) = ring.modulus_int() else {
        return integer;
    };
    let mut u = integer.u.reduce_to(ring);
    let mut u_inv = integer.u_inv.reduce_to(ring);
    let mut d = integer.d.reduce_to(ring);
    let v = integer.v.reduce_to(ring);
    let v_inv = integer.v_inv.reduce_to(ring);
    let mut rank = 0;
    for i in 0..d.rows().min(d.cols()) {
        let di = integer.d.get(i, i).clone();
        let g = di.gcd(&m);
        if g == m {
            d.set(i, i, Int::zero());
            continue;
        }
        rank += 1;
        if di.is_zero() || di == g {
            continue;
        }
        // unit w with di * w == g (mod m); scale row i of U by w
        let w = unit_ratio(&di, &g, &m);
        let w_inv = mod_inverse(&w, &m).expect("unit");
        for c in 0..u.cols() {
            let x = u.get(i, c) * &w;
            u.set(i, c, x);
        }
        for r in 0..u_inv.rows() {
            let x = u_inv.get(r, i) * &w_inv;
            u_inv.set(r, i, x);
        }
        d.set(i, i, g);
    }
    SnfDecomposition {
        u,
        d,
        v,
        u_inv,
        v_inv,
        rank,
        source_rows: integer.source_rows,
        source_cols: integer.source_cols,
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// A unit `w` mod `m` with `d * w ≡ g (mod m)` where `g = gcd(d, m)`.
fn unit_ratio(d: &Int, g: &Int, m: &Int) -> Int {
    let m_g = m / g;
    let d_g = (d / g).mod_floor(&m_g);
    let base = if m_g.is_one() {
        Int::zero()
    } else {
        mod_inverse(&d_g, &m_g).expect("d/g is a unit mod m/g")
    };
    let mut w = base;
    loop {
        if w.gcd(m).is_one() {
            return w;
        }
        w += &m_g;
    }
}

/// Prepared solver for `A x = b` over `A`'s ring.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    ring: RingSpec,
    unknowns: usize,
    snf: SnfDecomposition,
}

/// A particular solution together with generators of the homogeneous
/// solution space.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vec<Int>,
    pub kernel: ExactMatrix,
}

impl LinearSystem {
    pub fn new(a: &ExactMatrix) -> Self {
        let ring = a.ring();
        let lifted = match ring.modulus_int() {
            None => a.lift(),
            Some(m) => {
                let mi = ExactMatrix::identity(RingSpec::Integers, a.rows()).scale(&m);
                a.lift().hcat(&mi)
            }
        };
        LinearSystem {
            ring,
            unknowns: a.cols(),
            snf: snf_integer(&lifted),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn equations(&self) -> usize {
        self.snf.source_rows
    }

    /// One solution, or `None` when `b` is not in the column image.
    pub fn solve(&self, b: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(b.len(), self.snf.source_rows, "rhs length");
        let c = self.snf.u.mul_vec(b);
        let mut y = vec![Int::zero(); self.snf.source_cols];
        for (i, ci) in c.iter().enumerate() {
            if i < self.snf.rank {
                let d = self.snf.d.get(i, i);
                let (q, r) = ci.div_rem(d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !ci.is_zero() {
                return None;
            }
        }
        let x = self.snf.v.mul_vec(&y);
        Some(
            x.into_iter()
                .take(self.unknowns)
                .map(|v| self.ring.reduce(&v))
                .collect(),
        )
    }

    pub fn is_solvable(&self, b: &[Int]) -> bool {
        let c = self.snf.u.mul_vec(b);
        c.iter().enumerate().all(|(i, ci)| {
            if i < self.snf.rank {
                ci.is_multiple_of(self.snf.d.get(i, i))
            } else {
                ci.is_zero()
            }
        })
    }

    /// Columns generating every solution of `A x = 0`.
    pub fn kernel(&self) -> ExactMatrix {
        let total = self.snf.source_cols;
        let mut cols = Vec::new();
        for j in self.snf.rank..total {
            let col: Vec<Int> = (0..self.unknowns)
                .map(|r| self.ring.reduce(self.snf.v.get(r, j)))
                .collect();
            if col.iter().any(|x| !x.is_zero()) {
                cols.push(col);
            }
        }
        ExactMatrix::from_columns(self.ring, self.unknowns, &cols)
    }
}

pub fn solve_linear(a: &ExactMatrix, b: &[Int]) -> Result<Solution, LinalgError> {
    if a.rows() != b.len() {
        return Err(LinalgError::Dimension(format!(
            "matrix has {} rows, rhs has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let sys = LinearSystem::new(a);
    let particular = sys.solve(b).ok_or(LinalgError::NoSolution)?;
    Ok(Solution {
        particular,
        kernel: sys.kernel(),
    })
}

pub fn kernel_columns(a: &ExactMatrix) -> ExactMatrix {
    LinearSystem::new(a).kernel()
}

/// Lexicographically smallest vector of the coset `x0 + L`, where `L` is
/// spanned by `generators` together with `orders[i] * e_i` (a zero order
/// contributes nothing). Coordinates with a nonzero order end up in
/// `[0, orders[i])`.
pub fn lex_min_in_coset(x0: &[Int], generators: &[Vec<Int>], orders: &[Int]) -> Vec<Int> {
    let n = x0.len();
    let mut vecs: Vec<Vec<Int>> = generators.to_vec();
    for (i, o) in orders.iter().enumerate() {
        if !o.is_zero() {
            let mut v = vec![Int::zero(); n];
            v[i] = o.clone();
            vecs.push(v);
        }
    }
    let mut x = x0.to_vec();
    for i in 0..n {
        // Euclid on coordinate i among vectors that are zero before i
        loop {
            let live: Vec<usize> = (0..vecs.len()).filter(|&k| !vecs[k][i].is_zero()).collect();
            if live.len() <= 1 {
                break;
            }
            let p = *live
                .iter()
                .min_by(|&&a, &&b| vecs[a][i].abs().cmp(&vecs[b][i].abs()))
                .expect("nonempty");
            for &k in &live {
                if k == p {
                    continue;
                }
                let q = vecs[k][i].div_floor(&vecs[p][i]);
                let pv = vecs[p].clone();
                for (a, b) in vecs[k].iter_mut().zip(&pv) {
                    *a -= b * &q;
                }
            }
        }
        let pos = (0..vecs.len()).find(|&k| !vecs[k][i].is_zero());
        if let Some(k) = pos {
            let mut pivot = vecs.swap_remove(k);
            if pivot[i].is_negative() {
                for e in pivot.iter_mut() {
                    *e = -std::mem::take(e);
                }
            }
            let q = x[i].div_floor(&pivot[i]);
            for (a, b) in x.iter_mut().zip(&pivot) {
                *a -= b * &q;
            }
            for (j, o) in orders.iter().enumerate().skip(i + 1) {
                if !o.is_zero() {
                    x[j] = x[j].mod_floor(o);
                }
            }
        }
        vecs.retain(|v| v.iter().any(|e| !e.is_zero()));
    }
    x
}

/// Integer determinant by fraction-free elimination (Bareiss).
pub fn determinant(a: &ExactMatrix) -> Int {
    assert_eq!(a.rows(), a.cols(), "determinant of non-square matrix");
    let n = a.rows();
    if n == 0 {
        return Int::one();
    }
    let mut m: Vec<Vec<Int>> = (0..n).map(|r| a.lift().row(r)).collect();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(s) = ((k + 1)..n).find(|&r| !m[r][k].is_zero()) else {
                return Int::zero();
            };
            m.swap(k, s);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    a.ring().reduce(&(sign * &m[n - 1][n - 1]))
}

pub fn to_i64(v: &Int) -> Option<i64> {
    v.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> RingSpec {
        RingSpec::Integers
    }

    fn check_snf(a: &ExactMatrix) -> SnfDecomposition {
        let s = snf(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U A V = D");
        assert!(a.ring().is_unit(&determinant(&s.u)));
        assert!(a.ring().is_unit(&determinant(&s.v)));
        assert_eq!(s.u.mul(&s.u_inv), ExactMatrix::identity(a.ring(), a.rows()));
        assert_eq!(s.v.mul(&s.v_inv), ExactMatrix::identity(a.ring(), a.cols()));
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero(), "zeros last");
            assert!(w[1].is_multiple_of(&w[0]), "divisibility chain");
        }
        s
    }

    #[test]
    fn snf_two_by_two() {
        let a = ExactMatrix::from_rows(z(), &[vec![2, 4], vec![6, 8]]);
        let s = check_snf(&a);
        assert_eq!(s.diagonal(), vec![int(2), int(4)]);
    }

    #[test]
    fn snf_identity_and_mod() {
        let s = check_snf(&ExactMatrix::identity(z(), 3));
        assert_eq!(s.d, ExactMatrix::identity(z(), 3));
        let r4 = RingSpec::zmod(4).unwrap();
        let s = check_snf(&ExactMatrix::from_rows(r4, &[vec![2]]));
        assert_eq!(s.diagonal(), vec![int(2)]);
        // 3 is a unit mod 4, 6 is an associate of 2 mod 4
        let s = check_snf(&ExactMatrix::from_rows(r4, &[vec![3, 0], vec![0, 6]]));
        assert_eq!(s.diagonal(), vec![int(1), int(2)]);
    }

    #[test]
    fn snf_mod_nine_normalizes_units() {
        let r9 = RingSpec::zmod(9).unwrap();
        let s = check_snf(&ExactMatrix::from_rows(r9, &[vec![6, 3], vec![3, 0]]));
        assert_eq!(s.diagonal(), vec![int(3), int(3)]);
    }

    #[test]
    fn solve_examples() {
        let a = ExactMatrix::from_rows(z(), &[vec![2]]);
        assert_eq!(solve_linear(&a, &[int(3)]).unwrap_err(), LinalgError::NoSolution);
        let r4 = RingSpec::zmod(4).unwrap();
        let a = ExactMatrix::from_rows(r4, &[vec![2]]);
        let s = solve_linear(&a, &[int(2)]).unwrap();
        assert_eq!(s.particular, vec![int(1)]);
        assert_eq!(s.kernel, ExactMatrix::from_rows(r4, &[vec![2]]));
        let id = ExactMatrix::identity(z(), 3);
        let b = vec![int(5), int(-7), int(0)];
        let s = solve_linear(&id, &b).unwrap();
        assert_eq!(s.particular, b);
        assert_eq!(s.kernel.cols(), 0);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_columns(&ExactMatrix::from_rows(z(), &[vec![1, 0]]));
        assert_eq!(k, ExactMatrix::from_rows(z(), &[vec![0], vec![1]]));
        let r4 = RingSpec::zmod(4).unwrap();
        let k = kernel_columns(&ExactMatrix::from_rows(r4, &[vec![2]]));
        assert_eq!(k, ExactMatrix::from_rows(r4, &[vec![2]]));
        let k = kernel_columns(&ExactMatrix::from_rows(z(), &[vec![3]]));
        assert_eq!(k.cols(), 0);
    }

    #[test]
    fn empty_matrices() {
        let a = ExactMatrix::zeros(z(), 0, 3);
        let s = check_snf(&a);
        assert_eq!(s.rank, 0);
        assert_eq!(kernel_columns(&a).cols(), 3);
        let b = ExactMatrix::zeros(z(), 2, 0);
        assert!(solve_linear(&b, &[int(0), int(0)]).is_ok());
        assert!(solve_linear(&b, &[int(1), int(0)]).is_err());
    }

    #[test]
    fn lex_min_examples() {
        // coset 3 + <2> in Z/4 -> 1
        let x = lex_min_in_coset(&[int(3)], &[vec![int(2)]], &[int(4)]);
        assert_eq!(x, vec![int(1)]);
        // (1,1) + <(1,1)> in (Z/2)^2 -> (0,0)
        let x = lex_min_in_coset(&[int(1), int(1)], &[vec![int(1), int(1)]], &[int(2), int(2)]);
        assert_eq!(x, vec![int(0), int(0)]);
        // (0,1) + <(1,1)> in (Z/2)^2 -> (0,1)
        let x = lex_min_in_coset(&[int(0), int(1)], &[vec![int(1), int(1)]], &[int(2), int(2)]);
        assert_eq!(x, vec![int(0), int(1)]);
    }

    #[test]
    fn bad_modulus() {
        assert_eq!(RingSpec::zmod(1), Err(LinalgError::BadModulus(1)));
    }
}
