//! Projective covers and injective hulls of indecomposable vector
//! bundles: the closed-form expressions for extension bundles, the
//! stored cover tables for the domestic weight types, and the
//! degree/determinant/rank/slope bookkeeping used to tell bundles apart
//! by their covers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::lgroup::{LElement, LGroupError, WeightTriple};

#[derive(Clone, Debug)]
pub enum CoversError {
    Group(LGroupError),
    NotDomestic(WeightTriple),
    WeightNotTwo(WeightTriple),
    UnknownOrbit { name: String, valid: Vec<String> },
    XOutOfRange(LElement),
    OddCoverSize(usize),
    InvalidCover(String),
}

impl fmt::Display for CoversError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoversError::Group(e) => write!(f, "{e}"),
            CoversError::NotDomestic(w) => write!(f, "weight triple {w} is not domestic"),
            CoversError::WeightNotTwo(w) => write!(f, "weight triple {w} does not have p1 = 2"),
            CoversError::UnknownOrbit { name, valid } => {
                write!(
                    f,
                    "unknown orbit {name:?}; valid names: {}",
                    valid.join(", ")
                )
            }
            CoversError::XOutOfRange(x) => {
                write!(f, "{x} is not between 0 and the dominant element")
            }
            CoversError::OddCoverSize(n) => write!(f, "cover has odd size {n}"),
            CoversError::InvalidCover(s) => write!(f, "invalid cover: {s}"),
        }
    }
}

impl std::error::Error for CoversError {}

impl From<LGroupError> for CoversError {
    fn from(e: LGroupError) -> Self {
        CoversError::Group(e)
    }
}

/// Multiset of line-bundle twists, e.g. the summands of a projective
/// cover. Order is kept as constructed; comparisons are multiset-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverSpec {
    pub weights: WeightTriple,
    pub summands: Vec<LElement>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverJson {
    pub rank: usize,
    pub summands: Vec<crate::lgroup::LJson>,
}

impl CoverSpec {
    pub fn new(weights: WeightTriple, summands: Vec<LElement>) -> CoverSpec {
        CoverSpec { weights, summands }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.summands.len() / 2
    }

    /// Shift every twist by x (pc(E(x)) = pc(E)(x)).
    pub fn shift(&self, x: &LElement) -> CoverSpec {
        CoverSpec {
            weights: self.weights,
            summands: self.summands.iter().map(|s| s + x).collect(),
        }
    }

    fn sorted_key(&self) -> Vec<LElement> {
        let mut k = self.summands.clone();
        k.sort();
        k
    }

    pub fn to_json(&self) -> CoverJson {
        CoverJson {
            rank: self.rank(),
            summands: self.summands.iter().map(|s| s.to_json()).collect(),
        }
    }
}

/// Multiset equality of two covers.
pub fn covers_isomorphic(a: &CoverSpec, b: &CoverSpec) -> bool {
    a.weights == b.weights && a.sorted_key() == b.sorted_key()
}

/// pc(X) ⊕ pc(Y) as a projective cover of the middle term of a
/// distinguished exact sequence: plain multiset union.
pub fn horseshoe(pc_x: &CoverSpec, pc_y: &CoverSpec) -> CoverSpec {
    let mut summands = pc_x.summands.clone();
    summands.extend(pc_y.summands.iter().copied());
    CoverSpec {
        weights: pc_x.weights,
        summands,
    }
}

/// Count of each distinct twist in the cover.
pub fn multiplicity_profile(cover: &CoverSpec) -> BTreeMap<LElement, usize> {
    let mut out = BTreeMap::new();
    for s in &cover.summands {
        *out.entry(*s).or_insert(0) += 1;
    }
    out
}

fn check_extension_parameter(x: &LElement) -> Result<[i64; 3], CoversError> {
    let w = x.weights();
    let l = x.parts();
    let in_range = x.canonical_coeff() == 0 && (0..3).all(|i| l[i] <= w.weight(i) - 2);
    if in_range {
        Ok(l)
    } else {
        Err(CoversError::XOutOfRange(*x))
    }
}

/// Projective cover of the extension bundle with data (L, x):
/// L(ω) ⊕ ⊕_i L(x − (1+l_i)·x_i), for 0 <= x <= δ.
pub fn ext_cover(base: &LElement, x: &LElement) -> Result<CoverSpec, CoversError> {
    let l = check_extension_parameter(x)?;
    let w = x.weights();
    let mut summands = vec![base + &w.omega()];
    for i in 0..3 {
        summands.push(&(base + x) - &w.gen(i).scale(1 + l[i]));
    }
    Ok(CoverSpec {
        weights: w,
        summands,
    })
}

/// Injective hull of the extension bundle with data (L, x):
/// L(x) ⊕ ⊕_i L((1+l_i)·x_i + ω).
pub fn ext_hull(base: &LElement, x: &LElement) -> Result<CoverSpec, CoversError> {
    let l = check_extension_parameter(x)?;
    let w = x.weights();
    let mut summands = vec![base + x];
    for i in 0..3 {
        summands.push(&(base + &w.gen(i).scale(1 + l[i])) + &w.omega());
    }
    Ok(CoverSpec {
        weights: w,
        summands,
    })
}

/// All extension-bundle data (L, x) whose cover matches the given
/// multiset exactly.
pub fn extension_data_for_cover(cover: &CoverSpec) -> Vec<(LElement, LElement)> {
    let w = cover.weights;
    let key = cover.sorted_key();
    let omega = w.omega();
    let mut found = Vec::new();
    for x in w.extension_range() {
        for s in &cover.summands {
            let base = s - &omega;
            if let Ok(c) = ext_cover(&base, &x) {
                if c.sorted_key() == key && !found.contains(&(base, x)) {
                    found.push((base, x));
                }
            }
        }
    }
    found
}

/// One τ-orbit representative of the domestic cover tables.
#[derive(Clone, Debug)]
pub struct OrbitInfo {
    pub name: String,
    pub rank: usize,
    pub cover: CoverSpec,
}

#[derive(Deserialize)]
struct CoverTableJson {
    weights: [i64; 3],
    orbits: Vec<OrbitJson>,
}

#[derive(Deserialize)]
struct OrbitJson {
    name: String,
    rank: usize,
    cover: Vec<[i64; 5]>,
}

/// Evaluate a stored `[k1,k2,k3,kc,kw]` combination.
pub fn combo(w: WeightTriple, t: &[i64; 5]) -> LElement {
    let base = w.element(t[0], t[1], t[2], t[3]);
    &base + &w.omega().scale(t[4])
}

fn parse_table(src: &str) -> Vec<OrbitInfo> {
    let doc: CoverTableJson = serde_json::from_str(src).expect("embedded cover table parses");
    let w = WeightTriple::new(doc.weights[0], doc.weights[1], doc.weights[2])
        .expect("embedded weights valid");
    doc.orbits
        .into_iter()
        .map(|o| {
            let summands = o.cover.iter().map(|t| combo(w, t)).collect::<Vec<_>>();
            assert_eq!(summands.len(), 2 * o.rank, "table row size for {}", o.name);
            OrbitInfo {
                name: o.name,
                rank: o.rank,
                cover: CoverSpec {
                    weights: w,
                    summands,
                },
            }
        })
        .collect()
}

static TABLE_233: OnceLock<Vec<OrbitInfo>> = OnceLock::new();
static TABLE_234: OnceLock<Vec<OrbitInfo>> = OnceLock::new();
static TABLE_235: OnceLock<Vec<OrbitInfo>> = OnceLock::new();

/// The domestic families, matched on the literally ordered triple.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DomesticClass {
    TwoTwoN(i64),
    TwoThreeThree,
    TwoThreeFour,
    TwoThreeFive,
}

pub fn domestic_class(w: WeightTriple) -> Option<DomesticClass> {
    match w.weights() {
        [2, 2, n] if n >= 2 => Some(DomesticClass::TwoTwoN(n)),
        [2, 3, 3] => Some(DomesticClass::TwoThreeThree),
        [2, 3, 4] => Some(DomesticClass::TwoThreeFour),
        [2, 3, 5] => Some(DomesticClass::TwoThreeFive),
        _ => None,
    }
}

/// τ-orbit representatives of all indecomposables of rank >= 2 for a
/// domestic weight triple, with their projective covers.
pub fn domestic_orbits(w: WeightTriple) -> Result<Vec<OrbitInfo>, CoversError> {
    match domestic_class(w).ok_or(CoversError::NotDomestic(w))? {
        DomesticClass::TwoTwoN(n) => {
            let x3 = w.gen(2);
            Ok((0..=n - 2)
                .map(|i| {
                    let x = x3.scale(i);
                    OrbitInfo {
                        name: format!("E{i}"),
                        rank: 2,
                        cover: ext_cover(&w.zero(), &x).expect("i·x3 lies in range"),
                    }
                })
                .collect())
        }
        DomesticClass::TwoThreeThree => Ok(TABLE_233
            .get_or_init(|| parse_table(include_str!("../data/covers_233.json")))
            .clone()),
        DomesticClass::TwoThreeFour => Ok(TABLE_234
            .get_or_init(|| parse_table(include_str!("../data/covers_234.json")))
            .clone()),
        DomesticClass::TwoThreeFive => Ok(TABLE_235
            .get_or_init(|| parse_table(include_str!("../data/covers_235.json")))
            .clone()),
    }
}

pub fn orbit_names(w: WeightTriple) -> Result<Vec<String>, CoversError> {
    Ok(domestic_orbits(w)?.into_iter().map(|o| o.name).collect())
}

/// An indecomposable bundle of rank >= 2 named by its orbit
/// representative, a τ-power and an optional extra twist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomesticBundleId {
    pub weights: WeightTriple,
    pub orbit: String,
    pub tau_power: i64,
    pub shift: Option<LElement>,
}

impl DomesticBundleId {
    pub fn new(weights: WeightTriple, orbit: &str) -> DomesticBundleId {
        DomesticBundleId {
            weights,
            orbit: orbit.to_string(),
            tau_power: 0,
            shift: None,
        }
    }

    pub fn at_tau(mut self, k: i64) -> DomesticBundleId {
        self.tau_power = k;
        self
    }

    pub fn shifted(mut self, x: LElement) -> DomesticBundleId {
        self.shift = Some(x);
        self
    }
}

impl fmt::Display for DomesticBundleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.orbit, self.tau_power)?;
        if let Some(s) = &self.shift {
            write!(f, "+{s}")?;
        }
        Ok(())
    }
}

/// Resolve an orbit name, accepting the alias G2 = TG2 @ τ^{-1} in
/// weight type (2,3,4).
pub fn resolve_orbit(w: WeightTriple, name: &str) -> Result<(OrbitInfo, i64), CoversError> {
    let orbits = domestic_orbits(w)?;
    if let Some(info) = orbits.iter().find(|o| o.name == name) {
        return Ok((info.clone(), 0));
    }
    if domestic_class(w) == Some(DomesticClass::TwoThreeFour) && name == "G2" {
        let info = orbits.iter().find(|o| o.name == "TG2").unwrap();
        return Ok((info.clone(), -1));
    }
    Err(CoversError::UnknownOrbit {
        name: name.to_string(),
        valid: orbits.into_iter().map(|o| o.name).collect(),
    })
}

/// Table lookup plus the τ-power shift (ω per step) and extra twist.
pub fn domestic_cover(id: &DomesticBundleId) -> Result<CoverSpec, CoversError> {
    let (info, tau_adjust) = resolve_orbit(id.weights, &id.orbit)?;
    let w = id.weights;
    let mut total = w.omega().scale(id.tau_power + tau_adjust);
    if let Some(s) = &id.shift {
        total = &total + s;
    }
    Ok(info.cover.shift(&total))
}

/// Rank, determinant, degree and slope read off a projective cover,
/// for weight type (2,a,b): rank = |cover| / 2 and, from the sequence
/// 0 -> E(−x1) -> pc(E) -> E -> 0 together with
/// det(E(x)) = det(E) + rk(E)·x,
///
///   2·det(E) = Σ cover + rk(E)·x1.
#[derive(Clone, Debug)]
pub struct BundleStats {
    pub rank: usize,
    /// Canonical solution of the halving equation (lexicographically
    /// smallest normal form when 2-torsion makes it ambiguous).
    pub det: LElement,
    /// All solutions of the halving equation.
    pub det_candidates: Vec<LElement>,
    pub degree: i64,
    pub slope: Rational64,
}

pub fn bundle_stats(cover: &CoverSpec) -> Result<BundleStats, CoversError> {
    let w = cover.weights;
    if w.weight(0) != 2 {
        return Err(CoversError::WeightNotTwo(w));
    }
    if cover.len() % 2 != 0 || cover.is_empty() {
        return Err(CoversError::OddCoverSize(cover.len()));
    }
    let rank = cover.rank();
    let mut sum = w.zero();
    for s in &cover.summands {
        sum = &sum + s;
    }
    let twice_det = &sum + &w.gen(0).scale(rank as i64);
    let det_candidates = twice_det.halvings();
    let Some(det) = det_candidates.first().copied() else {
        return Err(CoversError::InvalidCover(format!(
            "{twice_det} is not twice an element of L"
        )));
    };
    let degree = det.delta();
    debug_assert_eq!(2 * degree, twice_det.delta());
    Ok(BundleStats {
        rank,
        det,
        det_candidates,
        degree,
        slope: Rational64::new(degree, rank as i64),
    })
}

/// Report of the uniqueness-by-cover audit over a τ-window.
#[derive(Clone, Debug)]
pub struct UniquenessAudit {
    pub vertices_checked: usize,
    pub collisions: Vec<(String, String)>,
}

impl UniquenessAudit {
    pub fn pass(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Enumerate all indecomposables of rank >= 2 over `window` τ-steps and
/// confirm that distinct bundles have non-isomorphic covers.
pub fn uniqueness_audit(w: WeightTriple, window: i64) -> Result<UniquenessAudit, CoversError> {
    let orbits = domestic_orbits(w)?;
    let mut seen: BTreeMap<Vec<LElement>, String> = BTreeMap::new();
    let mut collisions = Vec::new();
    let mut checked = 0;
    for t in 0..window {
        for o in &orbits {
            let id = format!("{}@{t}", o.name);
            let cover = o.cover.shift(&w.omega().scale(t));
            checked += 1;
            match seen.entry(cover.sorted_key()) {
                std::collections::btree_map::Entry::Occupied(e) => {
                    collisions.push((e.get().clone(), id));
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(id);
                }
            }
        }
    }
    Ok(UniquenessAudit {
        vertices_checked: checked,
        collisions,
    })
}
