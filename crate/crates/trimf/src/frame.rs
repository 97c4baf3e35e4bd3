//! Factorization frames and their specializations.
//!
//! A frame is the coefficient-free monomial skeleton of a matrix
//! factorization, read off a projective cover: entry (i,j) is the unique
//! small monomial spanning Hom between the corresponding line-bundle
//! summands, or absent when that Hom space vanishes. Specialization
//! assigns scalars from {0,±1} to the present entries; the search
//! enumerates assignments satisfying u·v = f·Id = v·u with
//! constraint propagation.
//!
//! The module also owns the explicit rank-two constructors valid for
//! every weight triple and the stored matrices for the domestic types.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::covers::{
    self, combo, domestic_class, resolve_orbit, CoverSpec, CoversError, DomesticBundleId,
    DomesticClass,
};
use crate::field::FieldCtx;
use crate::gmf::{self, GmfError, GradedMatrix, MatrixFactorization};
use crate::lgroup::{LElement, WeightTriple};
use crate::poly::{parse_entry, GradedPoly, Monomial};

#[derive(Debug)]
pub enum FrameError {
    Covers(CoversError),
    Gmf(GmfError),
    WeightNotTwo(WeightTriple),
    AmbiguousHom {
        row: LElement,
        col: LElement,
        dim: u64,
    },
    UnknownMatrix {
        name: String,
        valid: Vec<String>,
    },
    BadData(String),
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::Covers(e) => write!(f, "{e}"),
            FrameError::Gmf(e) => write!(f, "{e}"),
            FrameError::WeightNotTwo(w) => {
                write!(f, "frames need weight type (2,a,b); got {w}")
            }
            FrameError::AmbiguousHom { row, col, dim } => write!(
                f,
                "Hom space between {col} and {row} has dimension {dim} > 1; not a frame"
            ),
            FrameError::UnknownMatrix { name, valid } => {
                write!(f, "no stored matrix {name:?}; valid: {}", valid.join(", "))
            }
            FrameError::BadData(s) => write!(f, "bad matrix data: {s}"),
        }
    }
}

impl std::error::Error for FrameError {}

impl From<CoversError> for FrameError {
    fn from(e: CoversError) -> Self {
        FrameError::Covers(e)
    }
}

impl From<GmfError> for FrameError {
    fn from(e: GmfError) -> Self {
        FrameError::Gmf(e)
    }
}

/// Monomial skeleton of a symmetric factorization: square, rows = cover
/// twists, cols = cover − x1, entry (i,j) = small monomial of
/// `rows[i] − cols[j]` when the Hom space is one-dimensional.
#[derive(Clone, Debug)]
pub struct FrameSpec {
    pub weights: WeightTriple,
    pub rows: Vec<LElement>,
    pub cols: Vec<LElement>,
    pub entries: Vec<Vec<Option<Monomial>>>,
    pub forced: Vec<Vec<bool>>,
}

impl FrameSpec {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn present_count(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter(|e| e.is_some())
            .count()
    }

    /// Present cells keyed by labels; the labels must be
    /// multiplicity-free for this to be an injective fingerprint.
    pub fn labeled_support(&self) -> Vec<(LElement, LElement, Monomial)> {
        let mut out = Vec::new();
        for i in 0..self.size() {
            for j in 0..self.size() {
                if let Some(m) = self.entries[i][j] {
                    out.push((self.rows[i], self.cols[j], m));
                }
            }
        }
        out.sort();
        out
    }
}

/// Wire format of a frame: monomial exponents (or null) per cell plus
/// the forced mask.
#[derive(serde::Serialize, serde::Deserialize)]
pub struct FrameJson {
    pub weights: [i64; 3],
    pub rows: Vec<crate::lgroup::LJson>,
    pub cols: Vec<crate::lgroup::LJson>,
    pub entries: Vec<Vec<Option<[i64; 3]>>>,
    pub forced: Vec<Vec<bool>>,
}

impl FrameSpec {
    pub fn to_json(&self) -> FrameJson {
        FrameJson {
            weights: self.weights.weights(),
            rows: self.rows.iter().map(|r| r.to_json()).collect(),
            cols: self.cols.iter().map(|c| c.to_json()).collect(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.map(|m| m.0)).collect())
                .collect(),
            forced: self.forced.clone(),
        }
    }
}

/// Build the frame attached to a projective cover for weight type
/// (2,a,b). The forced mask is set on every present entry for ranks
/// <= 3, where the relevant Hom spaces to and from the bundle are known
/// to be one-dimensional; it is left unset for higher rank.
pub fn build_frame(cover: &CoverSpec) -> Result<FrameSpec, FrameError> {
    let w = cover.weights;
    if w.weight(0) != 2 {
        return Err(FrameError::WeightNotTwo(w));
    }
    let x1 = w.gen(0);
    let rows = cover.summands.clone();
    let cols: Vec<LElement> = rows.iter().map(|z| z - &x1).collect();
    let n = rows.len();
    let mut entries = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let d = &rows[i] - &cols[j];
            if !d.is_positive() {
                continue;
            }
            match d.small_monomial() {
                Some(exps) => entries[i][j] = Some(Monomial(exps)),
                None => {
                    // positive degree without a spanning small monomial
                    // cannot occur between summands of a minimal
                    // resolution
                    return Err(FrameError::AmbiguousHom {
                        row: rows[i],
                        col: cols[j],
                        dim: d.dim_s(),
                    });
                }
            }
        }
    }
    let force_all = cover.rank() <= 3;
    let forced = entries
        .iter()
        .map(|row| row.iter().map(|e| force_all && e.is_some()).collect())
        .collect();
    Ok(FrameSpec {
        weights: w,
        rows,
        cols,
        entries,
        forced,
    })
}

/// Outcome of the specialization search.
#[derive(Debug)]
pub struct SearchResult {
    pub factorizations: Vec<MatrixFactorization>,
    pub truncated: bool,
    pub nodes_visited: u64,
}

struct Constraint {
    /// Pairs of variable indices whose product contributes.
    pairs: Vec<(usize, usize)>,
    target: i64,
}

/// Generic backtracking engine: assign `values` to variables in
/// most-constrained-first order, checking each constraint as soon as
/// all of its variables are decided. `on_complete` consumes full
/// assignments and reports whether the search should stop.
fn dfs_search<F>(
    forced: &[bool],
    constraints: &[Constraint],
    values: &[i64],
    mut on_complete: F,
) -> Result<(bool, u64), FrameError>
where
    F: FnMut(&[i64]) -> Result<bool, FrameError>,
{
    let var_count = forced.len();
    let mut touch_count = vec![0usize; var_count];
    for cst in constraints {
        for &(p, q) in &cst.pairs {
            touch_count[p] += 1;
            touch_count[q] += 1;
        }
    }
    let mut order: Vec<usize> = (0..var_count).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(touch_count[v]));
    let position = {
        let mut pos = vec![0usize; var_count];
        for (rank, &v) in order.iter().enumerate() {
            pos[v] = rank;
        }
        pos
    };
    // a constraint is decidable once its last-assigned variable is set
    let mut ready_at: Vec<Vec<usize>> = vec![Vec::new(); var_count + 1];
    for (ci, cst) in constraints.iter().enumerate() {
        let last = cst
            .pairs
            .iter()
            .flat_map(|&(p, q)| [position[p], position[q]])
            .max()
            .unwrap_or(0);
        ready_at[last].push(ci);
    }

    let check = |cst: &Constraint, assignment: &[i64]| -> bool {
        let sum: i64 = cst
            .pairs
            .iter()
            .map(|&(p, q)| assignment[p] * assignment[q])
            .sum();
        sum == cst.target
    };

    let nonzero_count = values.iter().filter(|&&v| v != 0).count();
    let mut assignment = vec![0i64; var_count];
    let mut truncated = false;
    let mut nodes: u64 = 0;
    let mut depth = 0usize;
    let mut choice = vec![0usize; var_count + 1];
    'dfs: loop {
        if depth == var_count {
            if on_complete(&assignment)? {
                truncated = true;
                break;
            }
            loop {
                if depth == 0 {
                    break 'dfs;
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < values.len() {
                    break;
                }
            }
            continue;
        }
        let var = order[depth];
        let allowed = if forced[var] {
            nonzero_count
        } else {
            values.len()
        };
        if choice[depth] >= allowed {
            loop {
                if depth == 0 {
                    break 'dfs;
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < values.len() {
                    break;
                }
            }
            continue;
        }
        assignment[var] = values[choice[depth]];
        nodes += 1;
        if ready_at[depth]
            .iter()
            .all(|&ci| check(&constraints[ci], &assignment))
        {
            depth += 1;
            choice[depth] = 0;
        } else {
            choice[depth] += 1;
        }
    }
    Ok((truncated, nodes))
}

fn sanitize_alphabet(alphabet: &[i64]) -> Result<Vec<i64>, FrameError> {
    for v in alphabet {
        if ![0, 1, -1].contains(v) {
            return Err(FrameError::BadData(format!(
                "scalar {v} outside the search alphabet {{0,±1}}"
            )));
        }
    }
    let mut values: Vec<i64> = alphabet.iter().copied().filter(|&v| v != 0).collect();
    if alphabet.contains(&0) {
        values.push(0);
    }
    Ok(values)
}

fn present_cells(frame: &FrameSpec) -> (Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let n = frame.size();
    let mut var_of = vec![vec![usize::MAX; n]; n];
    let mut vars = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if frame.entries[i][j].is_some() {
                var_of[i][j] = vars.len();
                vars.push((i, j));
            }
        }
    }
    (vars, var_of)
}

fn f_monomials(w: WeightTriple) -> [Monomial; 3] {
    let [a, b, c] = w.weights();
    [
        Monomial([a, 0, 0]),
        Monomial([0, b, 0]),
        Monomial([0, 0, c]),
    ]
}

/// True when some diagonal product cell cannot reach one of the three
/// monomials of f, making the frame unsatisfiable outright.
fn diagonal_unreachable(frame: &FrameSpec) -> bool {
    let n = frame.size();
    for i in 0..n {
        for m in f_monomials(frame.weights) {
            let reachable = (0..n).any(|k| {
                matches!(
                    (frame.entries[i][k], frame.entries[k][i]),
                    (Some(p), Some(q)) if p.mul(&q) == m
                )
            });
            if !reachable {
                return true;
            }
        }
    }
    false
}

/// Enumerate {0,±1} specializations of a symmetric frame satisfying
/// u² = f·Id, deduplicated up to conjugation by diagonal ±1 matrices.
/// Forced entries are never assigned 0. Results are verified before
/// being returned.
pub fn search_specialization(
    frame: &FrameSpec,
    field: FieldCtx,
    limit: usize,
) -> Result<SearchResult, FrameError> {
    search_specialization_with(frame, field, limit, &[1, -1, 0])
}

/// Symmetric search with an explicit scalar alphabet (a subset of
/// {0, 1, −1}; nonzero values are tried first).
pub fn search_specialization_with(
    frame: &FrameSpec,
    field: FieldCtx,
    limit: usize,
    alphabet: &[i64],
) -> Result<SearchResult, FrameError> {
    let values = sanitize_alphabet(alphabet)?;
    let n = frame.size();
    let (vars, var_of) = present_cells(frame);

    if diagonal_unreachable(frame) {
        return Ok(SearchResult {
            factorizations: Vec::new(),
            truncated: false,
            nodes_visited: 0,
        });
    }

    // product-cell constraints grouped per resulting monomial
    let f_monos = f_monomials(frame.weights);
    let mut grouped: BTreeMap<(usize, usize, Monomial), Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if let (Some(mik), Some(mkj)) = (frame.entries[i][k], frame.entries[k][j]) {
                    grouped
                        .entry((i, j, mik.mul(&mkj)))
                        .or_default()
                        .push((var_of[i][k], var_of[k][j]));
                }
            }
        }
    }
    let constraints: Vec<Constraint> = grouped
        .into_iter()
        .map(|((i, j, m), pairs)| Constraint {
            pairs,
            target: if i == j && f_monos.contains(&m) { 1 } else { 0 },
        })
        .collect();
    let forced: Vec<bool> = vars.iter().map(|&(i, j)| frame.forced[i][j]).collect();

    let mut found: Vec<MatrixFactorization> = Vec::new();
    let mut canon_seen: Vec<Vec<String>> = Vec::new();
    let (truncated, nodes) = dfs_search(&forced, &constraints, &values, |assignment| {
        let mf = specialize(frame, field, assignment, &vars)?;
        if gmf::verify_mf(&mf)?.pass {
            let canon = gmf::sign_canonical_form(&mf.u);
            if !canon_seen.contains(&canon) {
                canon_seen.push(canon);
                found.push(mf);
            }
        }
        Ok(found.len() >= limit)
    })?;
    Ok(SearchResult {
        factorizations: found,
        truncated,
        nodes_visited: nodes,
    })
}

/// Search for general (not necessarily symmetric) pairs (u, v) over the
/// frame skeleton: independent scalars for the two matrices,
/// constrained by u·v = f·Id = v·u, deduplicated up to independent
/// diagonal ±1 base changes.
pub fn search_specialization_pair(
    frame: &FrameSpec,
    field: FieldCtx,
    limit: usize,
    alphabet: &[i64],
) -> Result<SearchResult, FrameError> {
    let values = sanitize_alphabet(alphabet)?;
    let n = frame.size();
    let (vars, var_of) = present_cells(frame);
    let nv = vars.len();
    if diagonal_unreachable(frame) {
        return Ok(SearchResult {
            factorizations: Vec::new(),
            truncated: false,
            nodes_visited: 0,
        });
    }

    // variables 0..nv are u-cells, nv..2nv the v-cells; both products
    // must be f·Id
    let f_monos = f_monomials(frame.weights);
    let mut grouped: BTreeMap<(u8, usize, usize, Monomial), Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if let (Some(mik), Some(mkj)) = (frame.entries[i][k], frame.entries[k][j]) {
                    let m = mik.mul(&mkj);
                    grouped
                        .entry((0, i, j, m))
                        .or_default()
                        .push((var_of[i][k], nv + var_of[k][j]));
                    grouped
                        .entry((1, i, j, m))
                        .or_default()
                        .push((nv + var_of[i][k], var_of[k][j]));
                }
            }
        }
    }
    let constraints: Vec<Constraint> = grouped
        .into_iter()
        .map(|((_, i, j, m), pairs)| Constraint {
            pairs,
            target: if i == j && f_monos.contains(&m) { 1 } else { 0 },
        })
        .collect();
    let mut forced: Vec<bool> = vars.iter().map(|&(i, j)| frame.forced[i][j]).collect();
    forced.extend(vars.iter().map(|&(i, j)| frame.forced[i][j]));

    let mut found: Vec<MatrixFactorization> = Vec::new();
    let mut canon_seen: Vec<Vec<String>> = Vec::new();
    let (truncated, nodes) = dfs_search(&forced, &constraints, &values, |assignment| {
        let mf = specialize_pair(frame, field, &assignment[..nv], &assignment[nv..], &vars)?;
        if gmf::verify_mf(&mf)?.pass {
            let canon = pair_sign_canonical_form(&mf);
            if !canon_seen.contains(&canon) {
                canon_seen.push(canon);
                found.push(mf);
            }
        }
        Ok(found.len() >= limit)
    })?;
    Ok(SearchResult {
        factorizations: found,
        truncated,
        nodes_visited: nodes,
    })
}

/// Canonical rendering of a pair under independent diagonal ±1 base
/// changes of P0 and P1 (u -> D0·u·D1, v -> D1·v·D0). The enumeration
/// is exponential in the size, so beyond 8x8 the raw rendering is used
/// and deduplication degrades to exact equality.
fn pair_sign_canonical_form(mf: &MatrixFactorization) -> Vec<String> {
    let n = mf.size();
    let mut best: Option<Vec<String>> = None;
    if n > 8 {
        let mut rendered = Vec::with_capacity(2 * n * n);
        for m in [&mf.u, &mf.v] {
            for row in &m.entries {
                for e in row {
                    rendered.push(format!("{e}"));
                }
            }
        }
        return rendered;
    }
    for mask in 0u32..(1 << (2 * n)) {
        let s0 = |i: usize| if mask >> i & 1 == 1 { -1i64 } else { 1 };
        let s1 = |j: usize| if mask >> (n + j) & 1 == 1 { -1i64 } else { 1 };
        let mut rendered = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                let e = &mf.u.entries[i][j];
                rendered.push(if s0(i) * s1(j) == -1 {
                    format!("{}", e.neg())
                } else {
                    format!("{e}")
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let e = &mf.v.entries[i][j];
                rendered.push(if s1(i) * s0(j) == -1 {
                    format!("{}", e.neg())
                } else {
                    format!("{e}")
                });
            }
        }
        if best.as_ref().map_or(true, |b| rendered < *b) {
            best = Some(rendered);
        }
    }
    best.unwrap()
}

fn specialize_pair(
    frame: &FrameSpec,
    field: FieldCtx,
    u_assign: &[i64],
    v_assign: &[i64],
    vars: &[(usize, usize)],
) -> Result<MatrixFactorization, FrameError> {
    let n = frame.size();
    let build = |assign: &[i64]| {
        let mut entries = vec![vec![GradedPoly::zero(field); n]; n];
        for (v, &(i, j)) in vars.iter().enumerate() {
            if assign[v] != 0 {
                entries[i][j] = GradedPoly::term(
                    field,
                    frame.entries[i][j].unwrap(),
                    field.from_i64(assign[v]),
                );
            }
        }
        entries
    };
    let x1 = frame.weights.gen(0);
    let u = GradedMatrix::new(frame.rows.clone(), frame.cols.clone(), build(u_assign))?;
    let v = GradedMatrix {
        rows: frame.rows.iter().map(|r| r + &x1).collect(),
        cols: frame.rows.clone(),
        entries: build(v_assign),
    };
    Ok(MatrixFactorization {
        weights: frame.weights,
        u,
        v,
    })
}

/// Assemble the symmetric factorization for a scalar assignment.
fn specialize(
    frame: &FrameSpec,
    field: FieldCtx,
    assignment: &[i64],
    vars: &[(usize, usize)],
) -> Result<MatrixFactorization, FrameError> {
    let n = frame.size();
    let mut entries = vec![vec![GradedPoly::zero(field); n]; n];
    for (v, &(i, j)) in vars.iter().enumerate() {
        if assignment[v] != 0 {
            entries[i][j] = GradedPoly::term(
                field,
                frame.entries[i][j].unwrap(),
                field.from_i64(assignment[v]),
            );
        }
    }
    Ok(MatrixFactorization::symmetric(
        frame.weights,
        frame.rows.clone(),
        entries,
    )?)
}

/// Apply an explicit {0,±1} assignment (row-major over present cells in
/// reading order) to a frame.
pub fn specialize_frame(
    frame: &FrameSpec,
    field: FieldCtx,
    scalars: &[i64],
) -> Result<MatrixFactorization, FrameError> {
    let mut vars = Vec::new();
    for i in 0..frame.size() {
        for j in 0..frame.size() {
            if frame.entries[i][j].is_some() {
                vars.push((i, j));
            }
        }
    }
    if scalars.len() != vars.len() {
        return Err(FrameError::BadData(format!(
            "expected {} scalars, got {}",
            vars.len(),
            scalars.len()
        )));
    }
    specialize(frame, field, scalars, &vars)
}

fn mono(e: [i64; 3]) -> Monomial {
    Monomial(e)
}

fn term(field: FieldCtx, sign: i64, e: [i64; 3]) -> GradedPoly {
    GradedPoly::term(field, mono(e), field.from_i64(sign))
}

/// The symmetric rank-two factorization of x² + y^a + z^b attached to
/// the extension bundle with data (L, x), x = l2·x2 + l3·x3:
/// u = v with u² = f·Id and cover labels
/// (ω, x−x1, l3·x3−x2, l2·x2−x3) shifted by L.
pub fn mf_rank2_symmetric(
    base: &LElement,
    x: &LElement,
    field: FieldCtx,
) -> Result<MatrixFactorization, FrameError> {
    let w = x.weights();
    if w.weight(0) != 2 {
        return Err(FrameError::WeightNotTwo(w));
    }
    let cover = covers::ext_cover(base, x)?;
    let [_, a, b] = w.weights();
    let [_, l2, l3] = x.parts();
    let z = GradedPoly::zero(field);
    let entries = vec![
        vec![
            term(field, 1, [1, 0, 0]),
            z.clone(),
            term(field, -1, [0, 0, b - l3 - 1]),
            term(field, 1, [0, a - l2 - 1, 0]),
        ],
        vec![
            z.clone(),
            term(field, 1, [1, 0, 0]),
            term(field, 1, [0, l2 + 1, 0]),
            term(field, 1, [0, 0, l3 + 1]),
        ],
        vec![
            term(field, -1, [0, 0, l3 + 1]),
            term(field, 1, [0, a - l2 - 1, 0]),
            term(field, -1, [1, 0, 0]),
            z.clone(),
        ],
        vec![
            term(field, 1, [0, l2 + 1, 0]),
            term(field, 1, [0, 0, b - l3 - 1]),
            z,
            term(field, -1, [1, 0, 0]),
        ],
    ];
    Ok(MatrixFactorization::symmetric(w, cover.summands, entries)?)
}

/// The general rank-two factorization of x^a + y^b + z^c attached to
/// the extension bundle with data (L, x) for an arbitrary weight
/// triple. The pair (u, v) is arranged so that the target labels of u
/// are the projective cover (ω, x−(1+l_i)x_i) shifted by L, and the
/// target labels of v are the injective hull.
pub fn mf_rank2_general(
    base: &LElement,
    x: &LElement,
    field: FieldCtx,
) -> Result<MatrixFactorization, FrameError> {
    let w = x.weights();
    let cover = covers::ext_cover(base, x)?;
    let hull = covers::ext_hull(base, x)?;
    let [a, b, c] = w.weights();
    let l = x.parts();
    let (e1, e2, e3) = (l[0] + 1, l[1] + 1, l[2] + 1);
    let (f1, f2, f3) = (a - e1, b - e2, c - e3);
    let z = GradedPoly::zero(field);

    // u: P1 -> P0 with rows = projective cover
    let u_entries = vec![
        vec![
            z.clone(),
            term(field, 1, [f1, 0, 0]),
            term(field, 1, [0, f2, 0]),
            term(field, 1, [0, 0, f3]),
        ],
        vec![
            term(field, 1, [f1, 0, 0]),
            z.clone(),
            term(field, -1, [0, 0, e3]),
            term(field, 1, [0, e2, 0]),
        ],
        vec![
            term(field, 1, [0, f2, 0]),
            term(field, 1, [0, 0, e3]),
            z.clone(),
            term(field, -1, [e1, 0, 0]),
        ],
        vec![
            term(field, 1, [0, 0, f3]),
            term(field, -1, [0, e2, 0]),
            term(field, 1, [e1, 0, 0]),
            z.clone(),
        ],
    ];
    // v: P0 -> P1(c) with rows = injective hull
    let v_entries = vec![
        vec![
            z.clone(),
            term(field, 1, [e1, 0, 0]),
            term(field, 1, [0, e2, 0]),
            term(field, 1, [0, 0, e3]),
        ],
        vec![
            term(field, 1, [e1, 0, 0]),
            z.clone(),
            term(field, 1, [0, 0, f3]),
            term(field, -1, [0, f2, 0]),
        ],
        vec![
            term(field, 1, [0, e2, 0]),
            term(field, -1, [0, 0, f3]),
            z.clone(),
            term(field, 1, [f1, 0, 0]),
        ],
        vec![
            term(field, 1, [0, 0, e3]),
            term(field, 1, [0, f2, 0]),
            term(field, -1, [f1, 0, 0]),
            z,
        ],
    ];

    // P1 twists: the injective hull shifted by −c.
    let cmc = w.canonical();
    let u_cols: Vec<LElement> = hull.summands.iter().map(|h| h - &cmc).collect();
    let u = GradedMatrix::new(cover.summands.clone(), u_cols, u_entries)?;
    let v = GradedMatrix::new(hull.summands, cover.summands, v_entries)?;
    Ok(MatrixFactorization { weights: w, u, v })
}

#[derive(Deserialize)]
struct MatrixTableJson {
    weights: [i64; 3],
    factorizations: Vec<MfEntryJson>,
}

#[derive(Deserialize, Clone)]
struct MfEntryJson {
    name: String,
    orbit: String,
    /// (l2, l3) when the matrix is an instance of the rank-two
    /// constructor; used as a cross-check, not to build the matrix.
    #[serde(default)]
    ext: Option<[i64; 2]>,
    /// Cover twists in matrix display order (a recorded permutation of
    /// the cover-table row).
    labels: Vec<[i64; 5]>,
    matrix: Vec<Vec<String>>,
}

/// A stored explicit matrix: entries, display-order labels and the name
/// of the cover-table orbit it belongs to.
#[derive(Clone, Debug)]
pub struct StoredMatrix {
    pub name: String,
    pub orbit: String,
    pub ext: Option<[i64; 2]>,
    pub labels: Vec<LElement>,
    pub entries: Vec<Vec<String>>,
}

static STORED_233: OnceLock<Vec<StoredMatrix>> = OnceLock::new();
static STORED_234: OnceLock<Vec<StoredMatrix>> = OnceLock::new();
static STORED_235: OnceLock<Vec<StoredMatrix>> = OnceLock::new();

fn parse_matrix_table(src: &str) -> Vec<StoredMatrix> {
    let doc: MatrixTableJson = serde_json::from_str(src).expect("embedded matrix table parses");
    let w = WeightTriple::new(doc.weights[0], doc.weights[1], doc.weights[2]).unwrap();
    doc.factorizations
        .into_iter()
        .map(|e| StoredMatrix {
            name: e.name,
            orbit: e.orbit,
            ext: e.ext,
            labels: e.labels.iter().map(|t| combo(w, t)).collect(),
            entries: e.matrix,
        })
        .collect()
}

/// All stored explicit matrices for a domestic weight triple of type
/// (2,3,q). The (2,2,n) family is generated by the rank-two
/// constructor instead.
pub fn stored_matrices(w: WeightTriple) -> Result<&'static [StoredMatrix], FrameError> {
    match domestic_class(w) {
        Some(DomesticClass::TwoThreeThree) => {
            Ok(STORED_233.get_or_init(|| parse_matrix_table(include_str!("../data/mf_233.json"))))
        }
        Some(DomesticClass::TwoThreeFour) => {
            Ok(STORED_234.get_or_init(|| parse_matrix_table(include_str!("../data/mf_234.json"))))
        }
        Some(DomesticClass::TwoThreeFive) => {
            Ok(STORED_235.get_or_init(|| parse_matrix_table(include_str!("../data/mf_235.json"))))
        }
        Some(DomesticClass::TwoTwoN(_)) => Ok(&[]),
        None => Err(FrameError::Covers(CoversError::NotDomestic(w))),
    }
}

pub fn stored_matrix_names(w: WeightTriple) -> Result<Vec<String>, FrameError> {
    match domestic_class(w) {
        Some(DomesticClass::TwoTwoN(n)) => Ok((0..=n - 2).map(|i| format!("E{i}")).collect()),
        _ => Ok(stored_matrices(w)?.iter().map(|s| s.name.clone()).collect()),
    }
}

fn build_stored(
    w: WeightTriple,
    stored: &StoredMatrix,
    field: FieldCtx,
    total_shift: &LElement,
) -> Result<MatrixFactorization, FrameError> {
    let entries: Vec<Vec<GradedPoly>> = stored
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| parse_entry(field, s).map_err(|e| FrameError::BadData(e.to_string())))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    let labels: Vec<LElement> = stored.labels.iter().map(|l| l + total_shift).collect();
    Ok(MatrixFactorization::symmetric(w, labels, entries)?)
}

/// The explicit symmetric matrix factorization for a domestic bundle
/// id. The matrix depends only on the orbit; the τ-power and extra
/// twist shift the degree labels. The (2,3,5) alternate rank-six
/// factorization is available under the name "E6ALT".
pub fn mf_domestic(
    id: &DomesticBundleId,
    field: FieldCtx,
) -> Result<MatrixFactorization, FrameError> {
    let w = id.weights;
    let class = domestic_class(w).ok_or(FrameError::Covers(CoversError::NotDomestic(w)))?;
    if let DomesticClass::TwoTwoN(_) = class {
        let (info, adjust) = resolve_orbit(w, &id.orbit)?;
        let i: i64 = info.name[1..].parse().map_err(|_| {
            FrameError::BadData(format!("orbit {} is not of the form E<i>", info.name))
        })?;
        let mut total = w.omega().scale(id.tau_power + adjust);
        if let Some(s) = &id.shift {
            total = &total + s;
        }
        let mf = mf_rank2_symmetric(&total, &w.gen(2).scale(i), field)?;
        return Ok(mf);
    }
    let stored = stored_matrices(w)?;
    let entry = stored
        .iter()
        .find(|s| s.name == id.orbit)
        .or_else(|| {
            // accept orbit aliases that resolve in the cover tables
            resolve_orbit(w, &id.orbit)
                .ok()
                .and_then(|(info, _)| stored.iter().find(|s| s.name == info.name))
        })
        .ok_or_else(|| FrameError::UnknownMatrix {
            name: id.orbit.clone(),
            valid: stored.iter().map(|s| s.name.clone()).collect(),
        })?;
    // alias adjustment (e.g. G2 = TG2 at τ^{-1} in type (2,3,4))
    let adjust = if entry.name != id.orbit {
        resolve_orbit(w, &id.orbit)?.1
    } else {
        0
    };
    let mut total = w.omega().scale(id.tau_power + adjust);
    if let Some(s) = &id.shift {
        total = &total + s;
    }
    build_stored(w, entry, field, &total)
}

/// All consistent assignments of the given twist multiset to the rows
/// of a symmetric matrix (cols = rows − x1): every nonzero entry must
/// be homogeneous. Used to confirm the recorded display orders.
pub fn find_label_orders(
    w: WeightTriple,
    entries: &[Vec<GradedPoly>],
    multiset: &[LElement],
) -> Vec<Vec<LElement>> {
    let n = entries.len();
    let x1 = w.gen(0);
    // degree difference constraints: rows[i] − rows[j] = deg(e_ij) − x1
    let mut diff: Vec<Vec<Option<LElement>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if let Some((m, _)) = entries[i][j].terms().next() {
                diff[i][j] = Some(&m.ldegree(w) - &x1);
            }
        }
    }
    let mut pool: BTreeMap<LElement, usize> = BTreeMap::new();
    for l in multiset {
        *pool.entry(*l).or_insert(0) += 1;
    }
    let mut assignment: Vec<Option<LElement>> = vec![None; n];
    let mut out = Vec::new();
    fn recurse(
        n: usize,
        diff: &[Vec<Option<LElement>>],
        pool: &mut BTreeMap<LElement, usize>,
        assignment: &mut Vec<Option<LElement>>,
        out: &mut Vec<Vec<LElement>>,
    ) {
        let Some(next) = (0..n).find(|&i| assignment[i].is_none()) else {
            out.push(assignment.iter().map(|a| a.unwrap()).collect());
            return;
        };
        let candidates: Vec<LElement> = pool
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(l, _)| *l)
            .collect();
        'cands: for cand in candidates {
            // consistency with already-assigned neighbors
            for j in 0..n {
                if let Some(other) = assignment[j] {
                    if let Some(d) = &diff[next][j] {
                        if &cand - &other != *d {
                            continue 'cands;
                        }
                    }
                    if let Some(d) = &diff[j][next] {
                        if &other - &cand != *d {
                            continue 'cands;
                        }
                    }
                }
            }
            assignment[next] = Some(cand);
            *pool.get_mut(&cand).unwrap() -= 1;
            recurse(n, diff, pool, assignment, out);
            *pool.get_mut(&cand).unwrap() += 1;
            assignment[next] = None;
        }
    }
    recurse(n, &diff, &mut pool, &mut assignment, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{domestic_cover, DomesticBundleId};
    use crate::gmf::{is_symmetric, verify_mf};

    fn w(a: i64, b: i64, c: i64) -> WeightTriple {
        WeightTriple::new(a, b, c).unwrap()
    }

    const Q: FieldCtx = FieldCtx::Q;

    #[test]
    fn rank2_symmetric_is_a_factorization() {
        for t in [w(2, 2, 2), w(2, 3, 3), w(2, 3, 4), w(2, 3, 5), w(2, 4, 7)] {
            for x in t.extension_range() {
                let mf = mf_rank2_symmetric(&t.zero(), &x, Q).unwrap();
                let rep = verify_mf(&mf).unwrap();
                assert!(rep.pass, "({t}, x={x}): {rep:?}");
                assert!(is_symmetric(&mf).unwrap());
            }
        }
    }

    #[test]
    fn rank2_general_is_a_factorization() {
        for t in [w(3, 3, 3), w(2, 3, 5), w(4, 5, 6), w(2, 2, 2)] {
            for x in t.extension_range() {
                let mf = mf_rank2_general(&t.zero(), &x, Q).unwrap();
                let rep = verify_mf(&mf).unwrap();
                assert!(rep.pass, "({t}, x={x}): {rep:?}");
            }
        }
    }

    #[test]
    fn rank2_general_verifies_over_f2() {
        let t = w(2, 2, 2);
        let mf = mf_rank2_general(&t.zero(), &t.zero(), FieldCtx::Fp(2)).unwrap();
        assert!(verify_mf(&mf).unwrap().pass);
    }

    #[test]
    fn general_agrees_with_symmetric_up_to_signed_permutation() {
        for t in [w(2, 3, 3), w(2, 3, 4), w(2, 2, 5)] {
            for x in t.extension_range() {
                let g = mf_rank2_general(&t.zero(), &x, Q).unwrap();
                let s = mf_rank2_symmetric(&t.zero(), &x, Q).unwrap();
                assert!(
                    gmf::equal_up_to_signed_row_col_permutation(&g.u, &s.u),
                    "({t}, x={x})"
                );
            }
        }
    }

    #[test]
    fn frame_support_matches_rank2_matrix() {
        let t = w(2, 3, 3);
        let cover = domestic_cover(&DomesticBundleId::new(t, "E2")).unwrap();
        let frame = build_frame(&cover).unwrap();
        let mf = mf_domestic(&DomesticBundleId::new(t, "E2"), Q).unwrap();
        assert_eq!(frame.labeled_support(), mf.u.labeled_support());
        assert_eq!(frame.present_count(), 12);
        // rank two: every present entry is forced
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(frame.forced[i][j], frame.entries[i][j].is_some());
            }
        }
    }

    #[test]
    fn frames_require_first_weight_two() {
        let t = w(3, 3, 3);
        let cover = covers::ext_cover(&t.zero(), &t.zero()).unwrap();
        assert!(matches!(
            build_frame(&cover),
            Err(FrameError::WeightNotTwo(_))
        ));
        assert!(matches!(
            mf_rank2_symmetric(&t.zero(), &t.zero(), Q),
            Err(FrameError::WeightNotTwo(_))
        ));
    }

    #[test]
    fn auslander_frame_222_uses_linear_monomials() {
        let t = w(2, 2, 2);
        let cover = covers::ext_cover(&t.zero(), &t.zero()).unwrap();
        let frame = build_frame(&cover).unwrap();
        for row in &frame.entries {
            for e in row.iter().flatten() {
                assert_eq!(e.total_degree(), 1, "entry {e:?}");
            }
        }
    }

    #[test]
    fn search_recovers_rank2_factorization() {
        let t = w(2, 2, 2);
        let cover = covers::ext_cover(&t.zero(), &t.zero()).unwrap();
        let frame = build_frame(&cover).unwrap();
        let result = search_specialization(&frame, Q, 64).unwrap();
        assert!(!result.factorizations.is_empty());
        let mut any_indecomposable = false;
        for mf in &result.factorizations {
            assert!(verify_mf(mf).unwrap().pass);
            if gmf::is_indecomposable(mf).unwrap() {
                any_indecomposable = true;
            }
        }
        assert!(any_indecomposable);
    }

    #[test]
    fn pair_search_covers_the_symmetric_classes() {
        let t = w(2, 2, 2);
        let cover = covers::ext_cover(&t.zero(), &t.zero()).unwrap();
        let frame = build_frame(&cover).unwrap();
        let pairs = search_specialization_pair(&frame, Q, 512, &[0, 1, -1]).unwrap();
        let symmetric = search_specialization(&frame, Q, 512).unwrap();
        assert!(!pairs.factorizations.is_empty());
        assert!(!symmetric.factorizations.is_empty());
        let mut symmetric_found = 0;
        for mf in &pairs.factorizations {
            assert!(verify_mf(mf).unwrap().pass);
            if gmf::is_symmetric(mf).unwrap() {
                symmetric_found += 1;
            }
        }
        assert!(symmetric_found >= 1);
    }

    #[test]
    fn blocked_rank_four_frame_search_finds_the_decomposable_pair() {
        // drop the coupling block from the rank-four frame: the search
        // can then only find factorizations splitting into the two
        // rank-two halves
        let t = w(2, 3, 4);
        let e4 = mf_domestic(&DomesticBundleId::new(t, "E4"), Q).unwrap();
        let cover = covers::CoverSpec::new(t, e4.u.rows.clone());
        let mut frame = build_frame(&cover).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let off_block = (i < 4) != (j < 4);
                if off_block {
                    frame.entries[i][j] = None;
                    frame.forced[i][j] = false;
                }
            }
        }
        let result = search_specialization(&frame, Q, 4).unwrap();
        assert!(!result.factorizations.is_empty());
        for mf in &result.factorizations {
            assert!(verify_mf(mf).unwrap().pass);
            assert!(!gmf::is_indecomposable(mf).unwrap());
        }
        // the stored matrix itself uses the coupling and stays whole
        assert!(gmf::is_indecomposable(&e4).unwrap());
    }

    #[test]
    fn search_respects_the_forced_mask() {
        let t = w(2, 3, 3);
        let cover = covers::ext_cover(&t.zero(), &t.zero()).unwrap();
        let frame = build_frame(&cover).unwrap();
        let result = search_specialization(&frame, Q, 64).unwrap();
        assert!(!result.factorizations.is_empty());
        for mf in &result.factorizations {
            for i in 0..frame.size() {
                for j in 0..frame.size() {
                    if frame.forced[i][j] {
                        assert!(!mf.u.entries[i][j].is_zero(), "forced ({i},{j}) is zero");
                    }
                }
            }
        }
    }

    #[test]
    fn sign_conjugation_preserves_the_factorization_property() {
        let t = w(2, 3, 4);
        let id = DomesticBundleId::new(t, "E4");
        let mf = mf_domestic(&id, Q).unwrap();
        let n = mf.size();
        for mask in [0b10110001u32, 0b01011010, 0b11111111] {
            let sign = |i: usize| if mask >> (i % 8) & 1 == 1 { -1 } else { 1 };
            let mut conj = mf.clone();
            for i in 0..n {
                for j in 0..n {
                    if sign(i) * sign(j) == -1 {
                        conj.u.entries[i][j] = conj.u.entries[i][j].neg();
                        conj.v.entries[i][j] = conj.v.entries[i][j].neg();
                    }
                }
            }
            assert!(verify_mf(&conj).unwrap().pass, "mask {mask:#b}");
        }
    }

    #[test]
    fn domestic_22n_matches_prop_row() {
        let t = w(2, 2, 5);
        for i in 0..=3 {
            let id = DomesticBundleId::new(t, &format!("E{i}"));
            let mf = mf_domestic(&id, Q).unwrap();
            assert!(verify_mf(&mf).unwrap().pass);
            let cover = domestic_cover(&id).unwrap();
            assert_eq!(mf.u.rows, cover.summands);
        }
    }

    #[test]
    fn frame_contains_every_stored_matrix_positionwise() {
        // the frame built from the matrix's own label order must cover
        // its support cell by cell, with the same monomials
        for t in [w(2, 3, 3), w(2, 3, 4), w(2, 3, 5)] {
            for stored in stored_matrices(t).unwrap() {
                let mf = mf_domestic(&DomesticBundleId::new(t, &stored.name), Q).unwrap();
                let cover = covers::CoverSpec::new(t, mf.u.rows.clone());
                let frame = build_frame(&cover).unwrap();
                for i in 0..mf.size() {
                    for j in 0..mf.size() {
                        let entry = &mf.u.entries[i][j];
                        if entry.is_zero() {
                            continue;
                        }
                        let (m, _) = entry.terms().next().unwrap();
                        assert_eq!(
                            frame.entries[i][j],
                            Some(*m),
                            "{t} {} cell ({i},{j})",
                            stored.name
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn stored_rank_two_matrices_match_the_constructor() {
        for t in [w(2, 3, 3), w(2, 3, 4), w(2, 3, 5)] {
            for stored in stored_matrices(t).unwrap() {
                let Some([l2, l3]) = stored.ext else { continue };
                let built = mf_rank2_symmetric(&t.zero(), &t.element(0, l2, l3, 0), Q).unwrap();
                let parsed: Vec<Vec<GradedPoly>> = stored
                    .entries
                    .iter()
                    .map(|r| r.iter().map(|s| parse_entry(Q, s).unwrap()).collect())
                    .collect();
                assert_eq!(built.u.entries, parsed, "{t} {}", stored.name);
            }
        }
        // the reflected representatives reuse the unreflected matrices
        let s234 = stored_matrices(w(2, 3, 4)).unwrap();
        let get = |n: &str| s234.iter().find(|s| s.name == n).unwrap();
        assert_eq!(get("F2").entries, get("E2").entries);
        assert_eq!(get("F3").entries, get("E3").entries);
    }

    #[test]
    fn frozen_22n_displays() {
        // n = 2, i = 0
        let t = w(2, 2, 2);
        let mf = mf_rank2_symmetric(&t.zero(), &t.zero(), Q).unwrap();
        let shown: Vec<Vec<String>> =
            mf.u.entries
                .iter()
                .map(|r| r.iter().map(|p| format!("{p}")).collect())
                .collect();
        assert_eq!(
            shown,
            vec![
                vec!["x", "0", "-z", "y"],
                vec!["0", "x", "y", "z"],
                vec!["-z", "y", "-x", "0"],
                vec!["y", "z", "0", "-x"],
            ]
        );
        // n = 5, i = 2
        let t = w(2, 2, 5);
        let mf = mf_rank2_symmetric(&t.zero(), &t.gen(2).scale(2), Q).unwrap();
        let shown: Vec<Vec<String>> =
            mf.u.entries
                .iter()
                .map(|r| r.iter().map(|p| format!("{p}")).collect())
                .collect();
        assert_eq!(
            shown,
            vec![
                vec!["x", "0", "-z^2", "y"],
                vec!["0", "x", "y", "z^3"],
                vec!["-z^3", "y", "-x", "0"],
                vec!["y", "z^2", "0", "-x"],
            ]
        );
    }

    #[test]
    fn tau_shift_only_moves_labels() {
        let t = w(2, 3, 3);
        let base = mf_domestic(&DomesticBundleId::new(t, "E3"), Q).unwrap();
        let moved = mf_domestic(&DomesticBundleId::new(t, "E3").at_tau(2), Q).unwrap();
        assert_eq!(base.u.entries, moved.u.entries);
        let shift = t.omega().scale(2);
        for (a, b) in base.u.rows.iter().zip(moved.u.rows.iter()) {
            assert_eq!(&(a + &shift), b);
        }
        assert!(verify_mf(&moved).unwrap().pass);
    }
}
