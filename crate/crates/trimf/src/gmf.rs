//! Degree-labeled matrices over T = k\[x1,x2,x3\] and the matrix
//! factorization contract u·v = f·Id = v·u.
//!
//! Labels are line-bundle twists: a matrix describing a map P1 -> P0
//! between graded free modules carries `cols` = twists of the source
//! summands and `rows` = twists of the target summands, and entry (i,j)
//! must be homogeneous of L-degree `rows[i] − cols[j]`. (Equivalently,
//! in terms of generator degrees the entry degree is source minus
//! target; twists are the negatives of generator degrees.)

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::{FieldCtx, FieldError, Scalar};
use crate::lgroup::{LElement, LGroupError, LJson, WeightTriple};
use crate::poly::{f_of, GradedPoly, Monomial, TermJson};

#[derive(Clone, Debug)]
pub enum GmfError {
    Field(FieldError),
    Group(LGroupError),
    Shape(String),
    NotSquare(usize, usize),
    WeightNotTwo(WeightTriple),
    /// Indecomposability certification needs char 0 or p > dim End.
    SmallCharacteristic {
        p: u64,
        dim_end: usize,
    },
    Json(String),
}

impl fmt::Display for GmfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GmfError::Field(e) => write!(f, "{e}"),
            GmfError::Group(e) => write!(f, "{e}"),
            GmfError::Shape(s) => write!(f, "shape mismatch: {s}"),
            GmfError::NotSquare(r, c) => write!(f, "matrix is {r}x{c}, not square"),
            GmfError::WeightNotTwo(w) => {
                write!(f, "weight triple {w} does not have p1 = 2")
            }
            GmfError::SmallCharacteristic { p, dim_end } => write!(
                f,
                "cannot certify the radical over F{p} with dim End = {dim_end}; use Q or p > dim End"
            ),
            GmfError::Json(s) => write!(f, "bad factorization document: {s}"),
        }
    }
}

impl std::error::Error for GmfError {}

impl From<FieldError> for GmfError {
    fn from(e: FieldError) -> Self {
        GmfError::Field(e)
    }
}

impl From<LGroupError> for GmfError {
    fn from(e: LGroupError) -> Self {
        GmfError::Group(e)
    }
}

/// Polynomial matrix with twist labels on rows (targets) and columns
/// (sources).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedMatrix {
    pub rows: Vec<LElement>,
    pub cols: Vec<LElement>,
    pub entries: Vec<Vec<GradedPoly>>,
}

impl GradedMatrix {
    pub fn new(
        rows: Vec<LElement>,
        cols: Vec<LElement>,
        entries: Vec<Vec<GradedPoly>>,
    ) -> Result<GradedMatrix, GmfError> {
        if entries.len() != rows.len() || entries.iter().any(|r| r.len() != cols.len()) {
            return Err(GmfError::Shape(format!(
                "entry grid does not match {}x{} labels",
                rows.len(),
                cols.len()
            )));
        }
        Ok(GradedMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn zero(field: FieldCtx, rows: Vec<LElement>, cols: Vec<LElement>) -> GradedMatrix {
        let entries = vec![vec![GradedPoly::zero(field); cols.len()]; rows.len()];
        GradedMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(field: FieldCtx, labels: Vec<LElement>) -> GradedMatrix {
        let mut m = GradedMatrix::zero(field, labels.clone(), labels);
        for i in 0..m.nrows() {
            m.entries[i][i] = GradedPoly::one(field);
        }
        m
    }

    /// Shift all labels by x. The entries are unchanged; degree shift is
    /// an equivalence on graded maps.
    pub fn shift(&self, x: &LElement) -> GradedMatrix {
        GradedMatrix {
            rows: self.rows.iter().map(|r| r + x).collect(),
            cols: self.cols.iter().map(|c| c + x).collect(),
            entries: self.entries.clone(),
        }
    }

    /// Standard matrix product; sizes must agree. Label bookkeeping is
    /// the caller's concern (products of factorization halves differ by
    /// a canonical-element shift).
    pub fn mul(&self, rhs: &GradedMatrix) -> Result<GradedMatrix, GmfError> {
        if self.ncols() != rhs.nrows() {
            return Err(GmfError::Shape(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.ncols(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        let field = self.field();
        let mut out = GradedMatrix::zero(field, self.rows.clone(), rhs.cols.clone());
        for i in 0..self.nrows() {
            for j in 0..rhs.ncols() {
                let mut acc = GradedPoly::zero(field);
                for k in 0..self.ncols() {
                    acc = acc.add(&self.entries[i][k].mul(&rhs.entries[k][j])?)?;
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &GradedMatrix) -> Result<GradedMatrix, GmfError> {
        if self.nrows() != rhs.nrows() || self.ncols() != rhs.ncols() {
            return Err(GmfError::Shape("subtraction of unequal shapes".into()));
        }
        let mut out = self.clone();
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.entries[i][j] = self.entries[i][j].sub(&rhs.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn field(&self) -> FieldCtx {
        self.entries
            .iter()
            .flatten()
            .map(|p| p.field())
            .next()
            .unwrap_or(FieldCtx::Q)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_zero())
    }

    /// Per-entry homogeneity violations against `rows[i] − cols[j]`.
    pub fn grading_violations(&self, w: WeightTriple) -> Vec<GradingViolation> {
        let mut out = Vec::new();
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                let expected = &self.rows[i] - &self.cols[j];
                if !self.entries[i][j].is_homogeneous(w, &expected) {
                    out.push(GradingViolation {
                        row: i,
                        col: j,
                        expected: expected.to_json(),
                        entry: format!("{}", self.entries[i][j]),
                    });
                }
            }
        }
        out
    }

    /// Nonzero cells of the matrix keyed by (row twist, col twist);
    /// usable as an order-free support fingerprint while the labels are
    /// multiplicity-free.
    pub fn labeled_support(&self) -> Vec<(LElement, LElement, Monomial)> {
        let mut out = Vec::new();
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                for (m, _) in self.entries[i][j].terms() {
                    out.push((self.rows[i], self.cols[j], *m));
                }
            }
        }
        out.sort();
        out
    }

    pub fn reduce(&self, target: FieldCtx) -> Result<GradedMatrix, GmfError> {
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.reduce(target))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(GradedMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradingViolation {
    pub row: usize,
    pub col: usize,
    pub expected: LJson,
    pub entry: String,
}

/// A pair (u, v) with u: P1 -> P0 and v: P0 -> P1(c), intended to
/// satisfy u·v = f·Id = v·u.
#[derive(Clone, Debug)]
pub struct MatrixFactorization {
    pub weights: WeightTriple,
    pub u: GradedMatrix,
    pub v: GradedMatrix,
}

impl MatrixFactorization {
    pub fn field(&self) -> FieldCtx {
        self.u.field()
    }

    pub fn size(&self) -> usize {
        self.u.nrows()
    }

    /// The trivial factorization (f, 1) on the line bundle with twist y:
    /// P(y−c) --f--> P(y) --1--> P(y−c)(c).
    pub fn trivial(w: WeightTriple, field: FieldCtx, y: &LElement) -> MatrixFactorization {
        let c = w.canonical();
        let ymc = y - &c;
        let u = GradedMatrix {
            rows: vec![*y],
            cols: vec![ymc],
            entries: vec![vec![f_of(w, field)]],
        };
        let v = GradedMatrix {
            rows: vec![*y],
            cols: vec![*y],
            entries: vec![vec![GradedPoly::one(field)]],
        };
        MatrixFactorization { weights: w, u, v }
    }

    /// Symmetric factorization from a single matrix: v = u entrywise,
    /// rows = cover, cols = cover − x1 (requires p1 = 2).
    pub fn symmetric(
        w: WeightTriple,
        cover: Vec<LElement>,
        u_entries: Vec<Vec<GradedPoly>>,
    ) -> Result<MatrixFactorization, GmfError> {
        if w.weight(0) != 2 {
            return Err(GmfError::WeightNotTwo(w));
        }
        let x1 = w.gen(0);
        let cols: Vec<LElement> = cover.iter().map(|z| z - &x1).collect();
        let u = GradedMatrix::new(cover.clone(), cols, u_entries)?;
        let v = GradedMatrix {
            rows: cover.iter().map(|z| z + &x1).collect(),
            cols: cover,
            entries: u.entries.clone(),
        };
        Ok(MatrixFactorization { weights: w, u, v })
    }

    pub fn reduce(&self, target: FieldCtx) -> Result<MatrixFactorization, GmfError> {
        Ok(MatrixFactorization {
            weights: self.weights,
            u: self.u.reduce(target)?,
            v: self.v.reduce(target)?,
        })
    }

    /// Suspension: `(P1 -> P0)[1] = P0 -> P1(c)`, i.e. swap the two maps
    /// and shift the labels of the second by the canonical element.
    pub fn suspension(&self) -> MatrixFactorization {
        let c = self.weights.canonical();
        MatrixFactorization {
            weights: self.weights,
            u: self.v.clone(),
            v: self.u.shift(&c),
        }
    }
}

/// Outcome of `verify_mf`: grading violations per matrix plus the
/// residuals u·v − f·Id and v·u − f·Id (nonzero cells only).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub size: usize,
    pub grading_u: Vec<GradingViolation>,
    pub grading_v: Vec<GradingViolation>,
    pub label_defects: Vec<String>,
    pub residual_uv: Vec<ResidualCell>,
    pub residual_vu: Vec<ResidualCell>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualCell {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

fn residual_cells(m: &GradedMatrix) -> Vec<ResidualCell> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !m.entries[i][j].is_zero() {
                out.push(ResidualCell {
                    row: i,
                    col: j,
                    value: format!("{}", m.entries[i][j]),
                });
            }
        }
    }
    out
}

/// Check the full matrix-factorization contract: squareness, label
/// compatibility, entrywise homogeneity, and both residuals.
pub fn verify_mf(mf: &MatrixFactorization) -> Result<VerificationReport, GmfError> {
    let w = mf.weights;
    let n = mf.u.nrows();
    if mf.u.ncols() != n {
        return Err(GmfError::NotSquare(mf.u.nrows(), mf.u.ncols()));
    }
    if mf.v.nrows() != n || mf.v.ncols() != n {
        return Err(GmfError::Shape(format!(
            "v is {}x{}, u is {}x{}",
            mf.v.nrows(),
            mf.v.ncols(),
            n,
            n
        )));
    }
    if mf.u.field() != mf.v.field() {
        return Err(GmfError::Field(FieldError::Mismatch(
            mf.u.field(),
            mf.v.field(),
        )));
    }
    let c = w.canonical();
    let mut label_defects = Vec::new();
    for i in 0..n {
        if mf.v.cols[i] != mf.u.rows[i] {
            label_defects.push(format!(
                "v.cols[{i}] = {} but u.rows[{i}] = {}",
                mf.v.cols[i], mf.u.rows[i]
            ));
        }
        if mf.v.rows[i] != &mf.u.cols[i] + &c {
            label_defects.push(format!(
                "v.rows[{i}] = {} but u.cols[{i}] + c = {}",
                mf.v.rows[i],
                &mf.u.cols[i] + &c
            ));
        }
    }
    let grading_u = mf.u.grading_violations(w);
    let grading_v = mf.v.grading_violations(w);

    let field = mf.u.field();
    let f = f_of(w, field).reduce(field)?;
    let f_id = |labels: &[LElement]| -> Result<GradedMatrix, GmfError> {
        let mut m = GradedMatrix::zero(field, labels.to_vec(), labels.to_vec());
        for i in 0..n {
            m.entries[i][i] = f.clone();
        }
        Ok(m)
    };
    // u·v computes the composite P0 -> P1(c) -> P0(c); v·u the composite
    // P1 -> P0 -> P1(c). Both must be multiplication by f.
    let residual_uv = residual_cells(&mf.u.mul(&mf.v)?.sub(&f_id(&mf.u.rows)?)?);
    let residual_vu = residual_cells(&mf.v.mul(&mf.u)?.sub(&f_id(&mf.v.rows)?)?);

    let pass = grading_u.is_empty()
        && grading_v.is_empty()
        && label_defects.is_empty()
        && residual_uv.is_empty()
        && residual_vu.is_empty();
    Ok(VerificationReport {
        size: n,
        grading_u,
        grading_v,
        label_defects,
        residual_uv,
        residual_vu,
        pass,
    })
}

/// v = u entrywise and rows = cols + x1. Only meaningful for weight
/// type (2,a,b).
pub fn is_symmetric(mf: &MatrixFactorization) -> Result<bool, GmfError> {
    let w = mf.weights;
    if w.weight(0) != 2 {
        return Err(GmfError::WeightNotTwo(w));
    }
    let x1 = w.gen(0);
    let labels_ok =
        mf.u.rows
            .iter()
            .zip(mf.u.cols.iter())
            .all(|(r, c)| *r == c + &x1);
    Ok(labels_ok && mf.u.entries == mf.v.entries)
}

/// No entry of u or v has a nonzero constant term, i.e. both maps land
/// in the graded radical.
pub fn is_reduced(mf: &MatrixFactorization) -> bool {
    mf.u.entries
        .iter()
        .chain(mf.v.entries.iter())
        .flatten()
        .all(|p| p.constant_term().is_zero())
}

/// Block-diagonal direct sum.
pub fn direct_sum(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
) -> Result<MatrixFactorization, GmfError> {
    if a.weights != b.weights {
        return Err(GmfError::Group(LGroupError::MismatchedWeights(
            a.weights, b.weights,
        )));
    }
    if a.field() != b.field() {
        return Err(GmfError::Field(FieldError::Mismatch(a.field(), b.field())));
    }
    let field = a.field();
    let block = |x: &GradedMatrix, y: &GradedMatrix| -> GradedMatrix {
        let rows: Vec<LElement> = x.rows.iter().chain(y.rows.iter()).copied().collect();
        let cols: Vec<LElement> = x.cols.iter().chain(y.cols.iter()).copied().collect();
        let mut m = GradedMatrix::zero(field, rows, cols);
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                m.entries[i][j] = x.entries[i][j].clone();
            }
        }
        for i in 0..y.nrows() {
            for j in 0..y.ncols() {
                m.entries[x.nrows() + i][x.ncols() + j] = y.entries[i][j].clone();
            }
        }
        m
    };
    Ok(MatrixFactorization {
        weights: a.weights,
        u: block(&a.u, &b.u),
        v: block(&a.v, &b.v),
    })
}

/// Monomial basis of T in degree d (all exponent triples of that
/// L-degree).
pub fn monomial_basis(w: WeightTriple, d: &LElement) -> Vec<Monomial> {
    if !d.is_effective() {
        return Vec::new();
    }
    let parts = d.parts();
    let l = d.canonical_coeff();
    let mut out = Vec::new();
    for k1 in 0..=l {
        for k2 in 0..=l - k1 {
            let k3 = l - k1 - k2;
            out.push(Monomial([
                parts[0] + k1 * w.weight(0),
                parts[1] + k2 * w.weight(1),
                parts[2] + k3 * w.weight(2),
            ]));
        }
    }
    out
}

/// Degree-zero endomorphism algebra of a matrix factorization: pairs
/// (F0: P0 -> P0, F1: P1 -> P1) with F0·u = u·F1 and F1·v = v·F0.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    pub dim: usize,
    pub basis: Vec<(GradedMatrix, GradedMatrix)>,
    /// Structure constants: product of basis elements a·b expanded in
    /// the basis.
    pub table: Vec<Vec<Vec<Scalar>>>,
    field: FieldCtx,
    /// Free (defining) coordinates of the solution space, used to
    /// read off basis coefficients.
    free_cols: Vec<usize>,
    unknown_count: usize,
    slots_u: Vec<(usize, usize, Monomial)>,
    slots_v: Vec<(usize, usize, Monomial)>,
}

struct EndProblem {
    field: FieldCtx,
    /// Unknown slots for F0 and F1: position and monomial.
    slots_u: Vec<(usize, usize, Monomial)>,
    slots_v: Vec<(usize, usize, Monomial)>,
}

impl EndProblem {
    fn new(mf: &MatrixFactorization) -> EndProblem {
        let w = mf.weights;
        let slot_list = |labels: &[LElement]| {
            let mut slots = Vec::new();
            for i in 0..labels.len() {
                for j in 0..labels.len() {
                    let d = &labels[i] - &labels[j];
                    for m in monomial_basis(w, &d) {
                        slots.push((i, j, m));
                    }
                }
            }
            slots
        };
        EndProblem {
            field: mf.field(),
            slots_u: slot_list(&mf.u.rows),
            slots_v: slot_list(&mf.u.cols),
        }
    }

    fn matrices_from(
        &self,
        labels0: &[LElement],
        labels1: &[LElement],
        vector: &[Scalar],
    ) -> (GradedMatrix, GradedMatrix) {
        let mut f0 = GradedMatrix::zero(self.field, labels0.to_vec(), labels0.to_vec());
        let mut f1 = GradedMatrix::zero(self.field, labels1.to_vec(), labels1.to_vec());
        for (k, (i, j, m)) in self.slots_u.iter().enumerate() {
            if !vector[k].is_zero() {
                let t = GradedPoly::term(self.field, *m, vector[k].clone());
                f0.entries[*i][*j] = f0.entries[*i][*j].add(&t).unwrap();
            }
        }
        let off = self.slots_u.len();
        for (k, (i, j, m)) in self.slots_v.iter().enumerate() {
            if !vector[off + k].is_zero() {
                let t = GradedPoly::term(self.field, *m, vector[off + k].clone());
                f1.entries[*i][*j] = f1.entries[*i][*j].add(&t).unwrap();
            }
        }
        (f0, f1)
    }
}

/// Gaussian elimination helpers over an exact field.
pub(crate) mod linalg {
    use super::*;

    /// Reduce rows in place; returns pivot column indices.
    pub fn row_reduce(rows: &mut Vec<Vec<Scalar>>, ncols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = rows[r][c].inv().unwrap();
            for x in rows[r].iter_mut() {
                *x = x.mul(&inv).unwrap();
            }
            for i in 0..rows.len() {
                if i != r && !rows[i][c].is_zero() {
                    let factor = rows[i][c].clone();
                    for j in 0..ncols {
                        let t = rows[r][j].mul(&factor).unwrap();
                        rows[i][j] = rows[i][j].sub(&t).unwrap();
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        pivots
    }

    pub fn rank(mut rows: Vec<Vec<Scalar>>, ncols: usize) -> usize {
        row_reduce(&mut rows, ncols).len()
    }

    /// Basis of the right nullspace {x : A·x = 0}; each vector has a 1
    /// in its defining free coordinate.
    pub fn nullspace(
        mut rows: Vec<Vec<Scalar>>,
        ncols: usize,
        field: FieldCtx,
    ) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let pivots = row_reduce(&mut rows, ncols);
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..ncols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![field.zero(); ncols];
            v[fc] = field.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = rows[ri][fc].neg();
            }
            basis.push(v);
        }
        (basis, free)
    }
}

/// Solve for the degree-zero endomorphism pairs of a verified
/// factorization; the identity pair is always present.
pub fn endomorphism_algebra(mf: &MatrixFactorization) -> Result<EndAlgebra, GmfError> {
    let problem = EndProblem::new(mf);
    let field = problem.field;
    let n = mf.size();
    let total = problem.slots_u.len() + problem.slots_v.len();

    // Equations: coefficients of F0·u − u·F1 = 0 and F1·v − v·F0 = 0.
    // Each unknown appears linearly; build one row per (cell, monomial).
    let mut eq_rows: Vec<Vec<Scalar>> = Vec::new();
    let mut eq_index: BTreeMap<(usize, usize, usize, Monomial), usize> = BTreeMap::new();
    let touch = |eq_rows: &mut Vec<Vec<Scalar>>,
                 eq_index: &mut BTreeMap<(usize, usize, usize, Monomial), usize>,
                 key: (usize, usize, usize, Monomial),
                 unknown: usize,
                 value: Scalar| {
        let idx = *eq_index.entry(key).or_insert_with(|| {
            eq_rows.push(vec![field.zero(); total]);
            eq_rows.len() - 1
        });
        eq_rows[idx][unknown] = eq_rows[idx][unknown].add(&value).unwrap();
    };

    // F0·u contributions: (F0)[i][k] entry slot (i,k,m) times u[k][j].
    for (slot, (i, k, m)) in problem.slots_u.iter().enumerate() {
        for j in 0..n {
            for (um, uc) in mf.u.entries[*k][j].terms() {
                touch(
                    &mut eq_rows,
                    &mut eq_index,
                    (0, *i, j, m.mul(um)),
                    slot,
                    uc.clone(),
                );
            }
        }
    }
    // −u·F1 contributions: u[i][k] times (F1)[k][j] slot (k,j,m).
    let off = problem.slots_u.len();
    for (slot, (k, j, m)) in problem.slots_v.iter().enumerate() {
        for i in 0..n {
            for (um, uc) in mf.u.entries[i][*k].terms() {
                touch(
                    &mut eq_rows,
                    &mut eq_index,
                    (0, i, *j, m.mul(um)),
                    off + slot,
                    uc.neg(),
                );
            }
        }
    }
    // F1·v contributions.
    for (slot, (i, k, m)) in problem.slots_v.iter().enumerate() {
        for j in 0..n {
            for (vm, vc) in mf.v.entries[*k][j].terms() {
                touch(
                    &mut eq_rows,
                    &mut eq_index,
                    (1, *i, j, m.mul(vm)),
                    off + slot,
                    vc.clone(),
                );
            }
        }
    }
    // −v·F0 contributions.
    for (slot, (k, j, m)) in problem.slots_u.iter().enumerate() {
        for i in 0..n {
            for (vm, vc) in mf.v.entries[i][*k].terms() {
                touch(
                    &mut eq_rows,
                    &mut eq_index,
                    (1, i, *j, m.mul(vm)),
                    slot,
                    vc.neg(),
                );
            }
        }
    }

    let (basis_vecs, free_cols) = linalg::nullspace(eq_rows, total, field);
    let basis: Vec<(GradedMatrix, GradedMatrix)> = basis_vecs
        .iter()
        .map(|v| problem.matrices_from(&mf.u.rows, &mf.u.cols, v))
        .collect();

    let mut alg = EndAlgebra {
        dim: basis.len(),
        basis,
        table: Vec::new(),
        field,
        free_cols,
        unknown_count: total,
        slots_u: problem.slots_u,
        slots_v: problem.slots_v,
    };
    alg.table = alg.multiplication_table()?;
    Ok(alg)
}

impl EndAlgebra {
    fn coordinates(&self, f0: &GradedMatrix, f1: &GradedMatrix) -> Vec<Scalar> {
        // Solutions are determined by their free ("defining")
        // coordinates; read those off the slot values.
        let mut full = vec![self.field.zero(); self.unknown_count];
        for (k, (i, j, m)) in self.slots_u.iter().enumerate() {
            full[k] = f0.entries[*i][*j].coeff(m);
        }
        let off = self.slots_u.len();
        for (k, (i, j, m)) in self.slots_v.iter().enumerate() {
            full[off + k] = f1.entries[*i][*j].coeff(m);
        }
        self.free_cols.iter().map(|&c| full[c].clone()).collect()
    }

    fn multiplication_table(&self) -> Result<Vec<Vec<Vec<Scalar>>>, GmfError> {
        let mut table = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let mut row = Vec::with_capacity(self.dim);
            for b in 0..self.dim {
                let f0 = self.basis[a].0.mul(&self.basis[b].0)?;
                let f1 = self.basis[a].1.mul(&self.basis[b].1)?;
                row.push(self.coordinates(&f0, &f1));
            }
            table.push(row);
        }
        Ok(table)
    }

    /// Gram matrix of the trace form t(a,b) = tr(L_a ∘ L_b) of the left
    /// regular representation.
    fn trace_gram(&self) -> Vec<Vec<Scalar>> {
        let d = self.dim;
        let mut gram = vec![vec![self.field.zero(); d]; d];
        // tr(L_a L_b) = Σ_{c,e} table[a][c][e] · table[b][e][c]
        for a in 0..d {
            for b in 0..d {
                let mut acc = self.field.zero();
                for c in 0..d {
                    for e in 0..d {
                        let t = self.table[a][c][e].mul(&self.table[b][e][c]).unwrap();
                        acc = acc.add(&t).unwrap();
                    }
                }
                gram[a][b] = acc;
            }
        }
        gram
    }
}

/// Local endomorphism ring test via the trace-form radical: the
/// factorization is indecomposable iff dim(End / rad End) = 1. Valid
/// over Q, or over F_p with p > dim End.
pub fn is_indecomposable(mf: &MatrixFactorization) -> Result<bool, GmfError> {
    let end = endomorphism_algebra(mf)?;
    if let FieldCtx::Fp(p) = mf.field() {
        if (p as usize) <= end.dim {
            return Err(GmfError::SmallCharacteristic {
                p,
                dim_end: end.dim,
            });
        }
    }
    let gram = end.trace_gram();
    let semisimple_rank = linalg::rank(gram, end.dim);
    Ok(semisimple_rank == 1)
}

/// Canonical representative of a symmetric matrix under conjugation by
/// diagonal ±1 matrices (rows and columns flipped together).
pub fn sign_canonical_form(m: &GradedMatrix) -> Vec<String> {
    let n = m.nrows();
    let mut best: Option<Vec<String>> = None;
    for mask in 0u32..(1 << n) {
        let sign = |i: usize| if mask >> i & 1 == 1 { -1i64 } else { 1 };
        let mut rendered = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let e = &m.entries[i][j];
                let cell = if sign(i) * sign(j) == -1 {
                    format!("{}", e.neg())
                } else {
                    format!("{e}")
                };
                rendered.push(cell);
            }
        }
        if best.as_ref().map_or(true, |b| rendered < *b) {
            best = Some(rendered);
        }
    }
    best.unwrap()
}

/// Equality of two matrices up to independent signed permutations of
/// rows and columns that respect the degree labels, i.e. up to a base
/// change of the two graded free modules. Intended for small matrices.
pub fn equal_up_to_signed_row_col_permutation(a: &GradedMatrix, b: &GradedMatrix) -> bool {
    let n = a.nrows();
    if b.nrows() != n || a.ncols() != b.ncols() {
        return false;
    }
    let m = a.ncols();
    // candidate row images must carry equal labels
    let row_candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&k| a.rows[k] == b.rows[i]).collect())
        .collect();
    let col_candidates: Vec<Vec<usize>> = (0..m)
        .map(|j| (0..m).filter(|&k| a.cols[k] == b.cols[j]).collect())
        .collect();
    let mut row_perm = vec![usize::MAX; n];
    let mut row_used = vec![false; n];
    let mut col_perm = vec![usize::MAX; m];
    let mut col_used = vec![false; m];

    fn signs_consistent(a: &GradedMatrix, b: &GradedMatrix, rp: &[usize], cp: &[usize]) -> bool {
        // solve s_i · t_j = ratio(i,j) over {±1} by propagation
        let n = rp.len();
        let m = cp.len();
        let mut ratio = vec![vec![0i8; m]; n];
        for i in 0..n {
            for j in 0..m {
                let x = &a.entries[rp[i]][cp[j]];
                let y = &b.entries[i][j];
                if x.is_zero() != y.is_zero() {
                    return false;
                }
                if x.is_zero() {
                    continue;
                }
                if *x == *y {
                    ratio[i][j] = 1;
                } else if x.neg() == *y {
                    ratio[i][j] = -1;
                } else {
                    return false;
                }
            }
        }
        let mut s = vec![0i8; n];
        let mut t = vec![0i8; m];
        for start in 0..n {
            if s[start] != 0 || ratio[start].iter().all(|&r| r == 0) {
                continue;
            }
            s[start] = 1;
            let mut queue = vec![(true, start)];
            while let Some((is_row, idx)) = queue.pop() {
                if is_row {
                    for j in 0..m {
                        if ratio[idx][j] != 0 {
                            let want = s[idx] * ratio[idx][j];
                            if t[j] == 0 {
                                t[j] = want;
                                queue.push((false, j));
                            } else if t[j] != want {
                                return false;
                            }
                        }
                    }
                } else {
                    for i in 0..n {
                        if ratio[i][idx] != 0 {
                            let want = t[idx] * ratio[i][idx];
                            if s[i] == 0 {
                                s[i] = want;
                                queue.push((true, i));
                            } else if s[i] != want {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn assign(
        i: usize,
        a: &GradedMatrix,
        b: &GradedMatrix,
        row_candidates: &[Vec<usize>],
        col_candidates: &[Vec<usize>],
        row_perm: &mut Vec<usize>,
        row_used: &mut Vec<bool>,
        col_perm: &mut Vec<usize>,
        col_used: &mut Vec<bool>,
    ) -> bool {
        let n = row_perm.len();
        let m = col_perm.len();
        if i == n {
            // rows fixed; assign columns
            fn assign_cols(
                j: usize,
                a: &GradedMatrix,
                b: &GradedMatrix,
                col_candidates: &[Vec<usize>],
                row_perm: &[usize],
                col_perm: &mut Vec<usize>,
                col_used: &mut Vec<bool>,
            ) -> bool {
                let m = col_perm.len();
                if j == m {
                    return signs_consistent(a, b, row_perm, col_perm);
                }
                for &cand in &col_candidates[j] {
                    if col_used[cand] {
                        continue;
                    }
                    // support profile must match up to sign
                    let compatible = (0..row_perm.len()).all(|i| {
                        let x = &a.entries[row_perm[i]][cand];
                        let y = &b.entries[i][j];
                        x.is_zero() == y.is_zero() && (x.is_zero() || *x == *y || x.neg() == *y)
                    });
                    if !compatible {
                        continue;
                    }
                    col_perm[j] = cand;
                    col_used[cand] = true;
                    if assign_cols(j + 1, a, b, col_candidates, row_perm, col_perm, col_used) {
                        return true;
                    }
                    col_used[cand] = false;
                    col_perm[j] = usize::MAX;
                }
                false
            }
            let _ = m;
            return assign_cols(
                0,
                a,
                b,
                col_candidates,
                &row_perm.clone(),
                col_perm,
                col_used,
            );
        }
        for &cand in &row_candidates[i] {
            if row_used[cand] {
                continue;
            }
            row_perm[i] = cand;
            row_used[cand] = true;
            if assign(
                i + 1,
                a,
                b,
                row_candidates,
                col_candidates,
                row_perm,
                row_used,
                col_perm,
                col_used,
            ) {
                return true;
            }
            row_used[cand] = false;
            row_perm[i] = usize::MAX;
        }
        false
    }

    assign(
        0,
        a,
        b,
        &row_candidates,
        &col_candidates,
        &mut row_perm,
        &mut row_used,
        &mut col_perm,
        &mut col_used,
    )
}

/// Wire format for a matrix factorization document.
#[derive(Serialize, Deserialize)]
pub struct MfJson {
    pub weights: [i64; 3],
    pub field: String,
    pub rows: Vec<LJson>,
    pub cols: Vec<LJson>,
    pub u: Vec<Vec<Vec<TermJson>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<Vec<TermJson>>>>,
    pub symmetric: bool,
}

impl MatrixFactorization {
    pub fn to_json(&self) -> Result<MfJson, GmfError> {
        let symmetric = self.weights.weight(0) == 2 && is_symmetric(self)?;
        let grid = |m: &GradedMatrix| {
            m.entries
                .iter()
                .map(|row| row.iter().map(|p| p.to_terms_json()).collect())
                .collect()
        };
        Ok(MfJson {
            weights: self.weights.weights(),
            field: self.field().to_string(),
            rows: self.u.rows.iter().map(|x| x.to_json()).collect(),
            cols: self.u.cols.iter().map(|x| x.to_json()).collect(),
            u: grid(&self.u),
            v: if symmetric { None } else { Some(grid(&self.v)) },
            symmetric,
        })
    }

    pub fn from_json(doc: &MfJson) -> Result<MatrixFactorization, GmfError> {
        let w = WeightTriple::new(doc.weights[0], doc.weights[1], doc.weights[2])?;
        let field = FieldCtx::parse(&doc.field)?;
        let rows: Vec<LElement> = doc.rows.iter().map(|j| LElement::from_json(w, j)).collect();
        let cols: Vec<LElement> = doc.cols.iter().map(|j| LElement::from_json(w, j)).collect();
        let grid = |g: &Vec<Vec<Vec<TermJson>>>| -> Result<Vec<Vec<GradedPoly>>, GmfError> {
            g.iter()
                .map(|row| {
                    row.iter()
                        .map(|terms| Ok(GradedPoly::from_terms_json(field, terms)?))
                        .collect()
                })
                .collect()
        };
        let u = GradedMatrix::new(rows.clone(), cols.clone(), grid(&doc.u)?)?;
        let v = match (&doc.v, doc.symmetric) {
            (Some(g), _) => {
                let c = w.canonical();
                GradedMatrix::new(
                    cols.iter().map(|x| x + &c).collect(),
                    rows.clone(),
                    grid(g)?,
                )?
            }
            (None, true) => GradedMatrix {
                rows: cols.iter().map(|x| x + &w.canonical()).collect(),
                cols: rows.clone(),
                entries: u.entries.clone(),
            },
            (None, false) => {
                return Err(GmfError::Json(
                    "missing \"v\" on a non-symmetric factorization".into(),
                ))
            }
        };
        Ok(MatrixFactorization { weights: w, u, v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::DomesticBundleId;
    use crate::frame::{mf_domestic, mf_rank2_general, mf_rank2_symmetric};

    fn w(a: i64, b: i64, c: i64) -> WeightTriple {
        WeightTriple::new(a, b, c).unwrap()
    }

    const Q: FieldCtx = FieldCtx::Q;

    fn prop55(n: i64, i: i64) -> MatrixFactorization {
        let t = w(2, 2, n);
        mf_rank2_symmetric(&t.zero(), &t.gen(2).scale(i), Q).unwrap()
    }

    #[test]
    fn verify_trivial_factorization() {
        let t = w(2, 3, 4);
        let triv = MatrixFactorization::trivial(t, Q, &t.zero());
        let rep = verify_mf(&triv).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(!is_reduced(&triv));
        assert!(!is_symmetric(&triv).unwrap());
    }

    #[test]
    fn verify_22n_and_detect_sign_corruption() {
        let mf = prop55(2, 0);
        assert!(verify_mf(&mf).unwrap().pass);

        // flipping the sign of the (1,1) entry x leaves residuals
        // 2x·(other entries of row/column 1)
        let mut bad = mf.clone();
        bad.u.entries[0][0] = bad.u.entries[0][0].neg();
        bad.v.entries[0][0] = bad.v.entries[0][0].neg();
        let rep = verify_mf(&bad).unwrap();
        assert!(!rep.pass);
        assert!(!rep.residual_uv.is_empty());
        let cell = &rep.residual_uv[0];
        assert!(cell.row == 0 || cell.col == 0);
        assert!(cell.value.contains('2'), "residual {}", cell.value);
        // over F2 the sign flip is invisible and the corruption passes
        let bad2 = bad.reduce(FieldCtx::Fp(2)).unwrap();
        assert!(verify_mf(&bad2).unwrap().pass);
    }

    #[test]
    fn symmetry_checks() {
        for n in 2..=6 {
            for i in 0..=n - 2 {
                assert!(is_symmetric(&prop55(n, i)).unwrap());
            }
        }
        let g = mf_rank2_general(&w(3, 3, 3).zero(), &w(3, 3, 3).zero(), Q).unwrap();
        assert!(matches!(is_symmetric(&g), Err(GmfError::WeightNotTwo(_))));
    }

    #[test]
    fn reducedness() {
        let mf = prop55(3, 1);
        assert!(is_reduced(&mf));
        let t = w(2, 2, 3);
        let triv = MatrixFactorization::trivial(t, Q, &t.zero());
        assert!(!is_reduced(&triv));
        let sum = direct_sum(&mf, &triv).unwrap();
        assert!(verify_mf(&sum).unwrap().pass);
        assert!(!is_reduced(&sum));
    }

    #[test]
    fn direct_sum_blocks() {
        let t = w(2, 3, 4);
        let e2 = mf_domestic(&DomesticBundleId::new(t, "E2"), Q).unwrap();
        let sum = direct_sum(&e2, &e2).unwrap();
        assert_eq!(sum.size(), 8);
        assert!(verify_mf(&sum).unwrap().pass);
        let other = mf_domestic(&DomesticBundleId::new(w(2, 3, 3), "E2"), Q).unwrap();
        assert!(direct_sum(&e2, &other).is_err());
    }

    #[test]
    fn suspension_of_verified_factorization_verifies() {
        for t in [w(2, 3, 3), w(2, 3, 5)] {
            let mf = mf_domestic(&DomesticBundleId::new(t, "E3"), Q).unwrap();
            let sus = mf.suspension();
            assert!(verify_mf(&sus).unwrap().pass);
            let back = sus.suspension();
            assert!(verify_mf(&back).unwrap().pass);
            // double suspension is the degree shift by the canonical element
            assert_eq!(back.u.entries, mf.u.entries);
            let c = t.canonical();
            for (a, b) in back.u.rows.iter().zip(mf.u.rows.iter()) {
                assert_eq!(*a, b + &c);
            }
        }
    }

    #[test]
    fn endomorphisms_of_indecomposables_are_scalars() {
        let t = w(2, 3, 3);
        for name in ["E2", "F2", "G2", "E3"] {
            let mf = mf_domestic(&DomesticBundleId::new(t, name), Q).unwrap();
            let end = endomorphism_algebra(&mf).unwrap();
            assert_eq!(end.dim, 1, "dim End for {name}");
            assert!(is_indecomposable(&mf).unwrap(), "{name}");
        }
    }

    #[test]
    fn direct_sum_has_larger_endomorphism_algebra() {
        let t = w(2, 3, 4);
        let e2 = mf_domestic(&DomesticBundleId::new(t, "E2"), Q).unwrap();
        let sum = direct_sum(&e2, &e2).unwrap();
        let end = endomorphism_algebra(&sum).unwrap();
        assert!(end.dim >= 2, "dim {}", end.dim);
        assert!(!is_indecomposable(&sum).unwrap());
        // mixed sum: block projections survive
        let tg2 = mf_domestic(&DomesticBundleId::new(t, "TG2"), Q).unwrap();
        let g2 = mf_domestic(&DomesticBundleId::new(t, "G2"), Q).unwrap();
        let mixed = direct_sum(&tg2, &g2).unwrap();
        assert!(verify_mf(&mixed).unwrap().pass);
        assert!(!is_indecomposable(&mixed).unwrap());
        let e_end = endomorphism_algebra(&mixed).unwrap();
        assert!(
            e_end.dim
                >= endomorphism_algebra(&tg2).unwrap().dim + endomorphism_algebra(&g2).unwrap().dim
        );
    }

    #[test]
    fn small_characteristic_is_rejected_for_certification() {
        let t = w(2, 3, 3);
        let mf = mf_domestic(&DomesticBundleId::new(t, "E2"), Q).unwrap();
        let sum = direct_sum(&mf, &mf)
            .unwrap()
            .reduce(FieldCtx::Fp(2))
            .unwrap();
        match is_indecomposable(&sum) {
            Err(GmfError::SmallCharacteristic { p: 2, .. }) => {}
            other => panic!("expected SmallCharacteristic, got {other:?}"),
        }
    }

    #[test]
    fn monomial_basis_counts_match_dim_t() {
        let t = w(2, 3, 4);
        for raw in [(0, 0, 0, 0), (1, 2, 3, 1), (0, 1, 0, 2), (1, 0, 0, -1)] {
            let d = t.element(raw.0, raw.1, raw.2, raw.3);
            assert_eq!(monomial_basis(t, &d).len() as u64, d.dim_t());
        }
    }

    #[test]
    fn mf_json_round_trip() {
        let t = w(2, 3, 5);
        let mf = mf_domestic(&DomesticBundleId::new(t, "G3"), Q).unwrap();
        let doc = mf.to_json().unwrap();
        assert!(doc.symmetric);
        assert!(doc.v.is_none());
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: MfJson = serde_json::from_str(&text).unwrap();
        let back = MatrixFactorization::from_json(&parsed).unwrap();
        assert_eq!(back.u.entries, mf.u.entries);
        assert_eq!(back.u.rows, mf.u.rows);
        assert!(verify_mf(&back).unwrap().pass);

        // non-symmetric round trip keeps v explicitly
        let g = mf_rank2_general(&w(3, 4, 5).zero(), &w(3, 4, 5).zero(), Q).unwrap();
        let doc = g.to_json().unwrap();
        assert!(doc.v.is_some());
        let back = MatrixFactorization::from_json(&doc).unwrap();
        assert!(verify_mf(&back).unwrap().pass);
    }
}

#[cfg(test)]
mod timing {
    use super::*;
    use crate::covers::DomesticBundleId;
    use crate::frame::mf_domestic;

    #[test]
    #[ignore]
    fn time_large_endomorphism_solves() {
        let t = WeightTriple::new(2, 3, 5).unwrap();
        for name in ["E4", "F4", "E5", "E6", "E6ALT"] {
            let mf = mf_domestic(&DomesticBundleId::new(t, name), FieldCtx::Q).unwrap();
            let start = std::time::Instant::now();
            let end = endomorphism_algebra(&mf).unwrap();
            let indec = is_indecomposable(&mf).unwrap();
            println!(
                "{name}: dim End = {}, indecomposable = {indec}, {:?}",
                end.dim,
                start.elapsed()
            );
        }
    }
}

#[cfg(test)]
mod alternate_rank_six {
    use super::*;
    use crate::covers::DomesticBundleId;
    use crate::frame::mf_domestic;

    /// The two stored couplings for the alternate rank-six
    /// factorization: the completed one is indecomposable, the
    /// four-entry one splits along the duplicated cover twist.
    #[test]
    fn completed_coupling_is_essential_and_printed_one_splits() {
        let t = WeightTriple::new(2, 3, 5).unwrap();
        let q = FieldCtx::Q;
        let alt = mf_domestic(&DomesticBundleId::new(t, "E6ALT"), q).unwrap();
        let printed = mf_domestic(&DomesticBundleId::new(t, "E6ALT_PRINTED"), q).unwrap();
        let main = mf_domestic(&DomesticBundleId::new(t, "E6"), q).unwrap();
        for mf in [&alt, &printed, &main] {
            assert!(verify_mf(mf).unwrap().pass);
            assert!(is_symmetric(mf).unwrap());
        }
        assert_eq!(alt.u.rows, printed.u.rows);
        assert!(is_indecomposable(&alt).unwrap());
        assert!(!is_indecomposable(&printed).unwrap());
        assert!(is_indecomposable(&main).unwrap());
        // the factorizations are essentially different: zero counts differ
        let zeros = |m: &GradedMatrix| m.entries.iter().flatten().filter(|p| p.is_zero()).count();
        assert_ne!(zeros(&alt.u), zeros(&main.u));
        assert_ne!(zeros(&printed.u), zeros(&main.u));
    }
}
