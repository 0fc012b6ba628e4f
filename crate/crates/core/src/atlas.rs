//! Catalogue of orbifold groups, arc triples and graph invariants, with the
//! order tables and validators over it.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use num_integer::Roots;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{build_graph, euler_check, genus, AmalgamError, ArcData, MSGraph};
use crate::cosets::{default_budget, enumerate, regular_representation, CosetError, CosetTable};
use crate::graphs::{
    family, invariants, isomorphic, subdivide, GraphError, InvariantSet, IsoResult, Multigraph,
    DEFAULT_ISO_TIMEOUT,
};
use crate::permgrp::{
    evaluate_word, hom_by_images, is_isomorphism, PermError, Permutation, PermutationGroup,
};
use crate::spatial::{polytope_skeleton, SpatialError};
use crate::words::{parse_presentation, Presentation, SubgroupSpec, WordError};

pub const EMBEDDED_ATLAS: &str = include_str!("../data/atlas.json");
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("genus must be at least 2, got {0}")]
    DomainError(u64),
    #[error("atlas file: {0}")]
    Io(String),
    #[error("atlas format: {0}")]
    Format(String),
    #[error("unsupported atlas schema version {0}")]
    Schema(u32),
    #[error("unknown orbifold `{0}`")]
    UnknownOrbifold(String),
    #[error("unknown arc `{0}`")]
    UnknownArc(String),
    #[error("orbifold `{0}` has no presentation")]
    NoPresentation(String),
    #[error("{id}: enumerated order {found}, expected {expected}")]
    OrderMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("bad invariant string `{0}`")]
    Invariants(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}

// ---------------------------------------------------------------------------
// order tables

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrderFormula {
    /// `num (g − 1) / den`
    Linear { num: u64, den: u64 },
    /// `coef (√g + 1)²`
    Square { coef: u64 },
    /// `coef (g + 1)`
    Plus { coef: u64 },
}

impl OrderFormula {
    pub fn eval(self, g: u64) -> Option<u64> {
        match self {
            OrderFormula::Linear { num, den } => {
                let n = num * (g - 1);
                n.is_multiple_of(den).then_some(n / den)
            }
            OrderFormula::Square { coef } => {
                let k = g.sqrt();
                (k * k == g).then_some(coef * (k + 1) * (k + 1))
            }
            OrderFormula::Plus { coef } => Some(coef * (g + 1)),
        }
    }
}

impl std::fmt::Display for OrderFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            OrderFormula::Linear { num, den: 1 } => write!(f, "{num}(g-1)"),
            OrderFormula::Linear { num, den } => write!(f, "{num}(g-1)/{den}"),
            OrderFormula::Square { coef } => write!(f, "{coef}(sqrt(g)+1)^2"),
            OrderFormula::Plus { coef } => write!(f, "{coef}(g+1)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenusSet {
    List(&'static [u64]),
    /// `g = k²` with `k ≥ 2` and `k` not listed.
    Squares {
        excluded_roots: &'static [u64],
    },
}

impl GenusSet {
    pub fn contains(&self, g: u64) -> bool {
        match self {
            GenusSet::List(l) => l.contains(&g),
            GenusSet::Squares { excluded_roots } => {
                let k = g.sqrt();
                k >= 2 && k * k == g && !excluded_roots.contains(&k)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Clause {
    pub formula: OrderFormula,
    pub genera: GenusSet,
}

#[derive(Debug, Clone, Copy)]
pub enum Remainder {
    Exact(OrderFormula),
    /// `lo ≤ value < hi`
    Interval(OrderFormula, OrderFormula),
}

/// Clauses are tried in order and the first that contains `g` wins.
#[derive(Debug, Clone, Copy)]
pub struct OrderTable {
    pub name: &'static str,
    pub clauses: &'static [Clause],
    pub remainder: Remainder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum OrderValue {
    Exact(u64),
    Interval { lo: u64, hi: u64 },
}

impl std::fmt::Display for OrderValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrderValue::Exact(v) => write!(f, "{v}"),
            OrderValue::Interval { lo, hi } => write!(f, "[{lo}, {hi})"),
        }
    }
}

const fn lin(num: u64, den: u64) -> OrderFormula {
    OrderFormula::Linear { num, den }
}

const fn list(formula: OrderFormula, genera: &'static [u64]) -> Clause {
    Clause {
        formula,
        genera: GenusSet::List(genera),
    }
}

const fn squares(coef: u64, excluded_roots: &'static [u64]) -> Clause {
    Clause {
        formula: OrderFormula::Square { coef },
        genera: GenusSet::Squares { excluded_roots },
    }
}

/// Maximum order of an extendable action, m_g.
pub static MS_ORDERS: OrderTable = OrderTable {
    name: "m_g",
    clauses: &[
        list(
            lin(12, 1),
            &[2, 3, 4, 5, 6, 9, 11, 17, 25, 97, 121, 241, 601],
        ),
        list(lin(8, 1), &[7, 49, 73]),
        list(lin(20, 3), &[16, 19, 361]),
        list(lin(6, 1), &[21, 481]),
        list(lin(24, 5), &[41]),
        list(lin(30, 7), &[29, 841, 1681]),
        squares(4, &[3, 5, 7, 11, 19, 41]),
    ],
    remainder: Remainder::Exact(OrderFormula::Plus { coef: 4 }),
};

pub static M_ORDERS: OrderTable = OrderTable {
    name: "M_g",
    clauses: &[
        list(lin(24, 1), &[3, 4, 5, 6, 11, 17, 97, 601]),
        list(lin(16, 1), &[7, 9, 73]),
        list(lin(40, 3), &[16, 19]),
        list(lin(12, 1), &[2, 25, 121, 241]),
        list(lin(48, 5), &[41]),
        list(lin(60, 7), &[29, 841, 1681]),
        squares(8, &[11]),
    ],
    remainder: Remainder::Interval(
        OrderFormula::Plus { coef: 4 },
        OrderFormula::Plus { coef: 8 },
    ),
};

pub static MSTAR_ORDERS: OrderTable = OrderTable {
    name: "M*_g",
    clauses: &[
        list(lin(24, 1), &[2, 3, 4, 5, 6, 11, 17, 97, 601]),
        list(lin(16, 1), &[7, 9, 73]),
        list(lin(40, 3), &[16, 19]),
        list(lin(12, 1), &[25, 121, 241]),
        list(lin(48, 5), &[41]),
        list(lin(60, 7), &[29, 841, 1681]),
        squares(8, &[11]),
    ],
    remainder: Remainder::Exact(OrderFormula::Plus { coef: 8 }),
};

pub static EMINUS_ORDERS: OrderTable = OrderTable {
    name: "E_g(-,-)",
    clauses: &[
        list(lin(24, 1), &[3, 5, 6, 11, 17, 97, 601]),
        list(lin(16, 1), &[7, 73]),
        list(lin(40, 3), &[19]),
        list(lin(48, 5), &[41]),
        list(lin(60, 7), &[1681]),
        squares(8, &[]),
    ],
    remainder: Remainder::Exact(OrderFormula::Plus { coef: 8 }),
};

fn must(f: OrderFormula, g: u64) -> u64 {
    f.eval(g).expect("listed genera give integral orders")
}

impl OrderTable {
    pub fn resolve(&self, g: u64) -> Result<OrderValue, AtlasError> {
        if g < 2 {
            return Err(AtlasError::DomainError(g));
        }
        if let Some(c) = self.clauses.iter().find(|c| c.genera.contains(g)) {
            return Ok(OrderValue::Exact(must(c.formula, g)));
        }
        Ok(match self.remainder {
            Remainder::Exact(f) => OrderValue::Exact(must(f, g)),
            Remainder::Interval(lo, hi) => OrderValue::Interval {
                lo: must(lo, g),
                hi: must(hi, g),
            },
        })
    }

    /// Values of every clause containing `g`, in table order.
    pub fn covering(&self, g: u64) -> Vec<(OrderFormula, u64)> {
        self.clauses
            .iter()
            .filter(|c| c.genera.contains(g))
            .map(|c| (c.formula, must(c.formula, g)))
            .collect()
    }

    /// Genera up to `limit` where two clauses give different values.
    pub fn overlap_conflicts(&self, limit: u64) -> Vec<(u64, Vec<u64>)> {
        (2..=limit)
            .filter_map(|g| {
                let vals: Vec<u64> = self.covering(g).into_iter().map(|(_, v)| v).collect();
                vals.windows(2).any(|w| w[0] != w[1]).then_some((g, vals))
            })
            .collect()
    }
}

pub fn ms_order(g: u64) -> Result<u64, AtlasError> {
    match MS_ORDERS.resolve(g)? {
        OrderValue::Exact(v) => Ok(v),
        OrderValue::Interval { .. } => unreachable!("m_g is always exact"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralOrders {
    pub genus: u64,
    #[serde(rename = "m_g")]
    pub m: u64,
    #[serde(rename = "M_g")]
    pub big_m: OrderValue,
    #[serde(rename = "Mstar_g")]
    pub m_star: u64,
    #[serde(rename = "Eminus_g")]
    pub e_minus: u64,
}

pub fn general_orders(g: u64) -> Result<GeneralOrders, AtlasError> {
    let exact = |t: &OrderTable| match t.resolve(g) {
        Ok(OrderValue::Exact(v)) => Ok(v),
        Ok(OrderValue::Interval { .. }) => unreachable!("{} is always exact", t.name),
        Err(e) => Err(e),
    };
    Ok(GeneralOrders {
        genus: g,
        m: ms_order(g)?,
        big_m: M_ORDERS.resolve(g)?,
        m_star: exact(&MSTAR_ORDERS)?,
        e_minus: exact(&EMINUS_ORDERS)?,
    })
}

// ---------------------------------------------------------------------------
// catalogue

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub arc: String,
    pub u: String,
    pub ul: String,
    pub ur: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbifoldRecord {
    pub id: String,
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arcs: Vec<ArcRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRef {
    pub id: String,
    #[serde(default)]
    pub knotted: bool,
}

impl GraphRef {
    pub fn label(&self, genus: u64) -> String {
        if self.knotted {
            format!("{}({genus},k)", self.id)
        } else {
            format!("{}({genus})", self.id)
        }
    }

    pub fn orbifold_id(&self) -> &str {
        self.id.split('.').next().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRecord {
    pub graphs: Vec<GraphRef>,
    pub genus: u64,
    pub printed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

impl RowRecord {
    pub fn label(&self) -> String {
        let names: Vec<String> = self.graphs.iter().map(|g| g.label(self.genus)).collect();
        names.join(" / ")
    }

    pub fn expected(&self) -> Result<InvariantSet, AtlasError> {
        let s = self.corrected.as_ref().unwrap_or(&self.printed);
        s.parse().map_err(|_| AtlasError::Invariants(s.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceRecord {
    pub a: String,
    pub b: String,
    /// Images of `u, ul, ur` as words in `v, vl, vr`.
    pub images: Vec<String>,
    /// Replacement map when the printed one fails; both are checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_images: Option<Vec<String>>,
    #[serde(default)]
    pub cross: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atlas {
    pub schema_version: u32,
    pub orbifolds: Vec<OrbifoldRecord>,
    pub rows: Vec<RowRecord>,
    pub equivalences: Vec<EquivalenceRecord>,
}

impl Atlas {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_ATLAS).expect("embedded atlas is valid")
    }

    pub fn parse(text: &str) -> Result<Self, AtlasError> {
        let atlas: Atlas =
            serde_json::from_str(text).map_err(|e| AtlasError::Format(e.to_string()))?;
        if atlas.schema_version != SCHEMA_VERSION {
            return Err(AtlasError::Schema(atlas.schema_version));
        }
        Ok(atlas)
    }

    pub fn from_path(path: &Path) -> Result<Self, AtlasError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AtlasError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn orbifold(&self, id: &str) -> Result<&OrbifoldRecord, AtlasError> {
        self.orbifolds
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| AtlasError::UnknownOrbifold(id.to_string()))
    }

    /// Looks up `O34.a'` style ids.
    pub fn arc(&self, id: &str) -> Result<(&OrbifoldRecord, &ArcRecord), AtlasError> {
        let (orb, arc) = id
            .split_once('.')
            .ok_or_else(|| AtlasError::UnknownArc(id.to_string()))?;
        let o = self.orbifold(orb)?;
        let a = o
            .arcs
            .iter()
            .find(|a| a.arc == arc)
            .ok_or_else(|| AtlasError::UnknownArc(id.to_string()))?;
        Ok((o, a))
    }

    pub fn arc_ids(&self) -> Vec<String> {
        self.orbifolds
            .iter()
            .flat_map(|o| o.arcs.iter().map(move |a| format!("{}.{}", o.id, a.arc)))
            .collect()
    }
}

/// Graph named by a family call, including `polytope(120cell)`.
pub fn family_graph(spec: &str) -> Result<Multigraph, AtlasError> {
    let s = spec.trim();
    if let Some(inner) = s
        .strip_prefix("polytope(")
        .and_then(|r| r.strip_suffix(')'))
    {
        return Ok(polytope_skeleton(inner.trim())?);
    }
    Ok(family(s)?)
}

// ---------------------------------------------------------------------------
// loading

#[derive(Debug)]
pub struct LoadedOrbifold {
    pub id: String,
    pub presentation: Presentation,
    pub table: CosetTable,
    pub group: Arc<PermutationGroup>,
}

impl LoadedOrbifold {
    pub fn element(&self, word: &str) -> Result<Permutation, AtlasError> {
        let w = self.presentation.word(word)?;
        Ok(evaluate_word(&w, &self.table.action, self.table.n_cosets)?)
    }
}

#[derive(Debug, Clone)]
pub struct LoadedArc {
    pub id: String,
    pub orbifold: Arc<LoadedOrbifold>,
    /// `u, ul, ur` in the regular representation.
    pub triple: [Permutation; 3],
    pub data: ArcData,
}

/// Atlas plus enumeration settings and a cache of enumerated groups.
pub struct AtlasSession {
    pub atlas: Atlas,
    pub budget: Option<usize>,
    pub iso_timeout: Duration,
    cache: Mutex<HashMap<String, Arc<LoadedOrbifold>>>,
}

impl AtlasSession {
    pub fn new(atlas: Atlas) -> Self {
        AtlasSession {
            atlas,
            budget: None,
            iso_timeout: DEFAULT_ISO_TIMEOUT,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn embedded() -> Self {
        Self::new(Atlas::embedded())
    }

    pub fn with_budget(mut self, budget: Option<usize>) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.iso_timeout = timeout;
        self
    }

    pub fn orbifold(&self, id: &str) -> Result<Arc<LoadedOrbifold>, AtlasError> {
        if let Some(o) = self.cache.lock().expect("cache lock").get(id) {
            return Ok(o.clone());
        }
        let rec = self.atlas.orbifold(id)?;
        let text = rec
            .presentation
            .as_ref()
            .ok_or_else(|| AtlasError::NoPresentation(id.to_string()))?;
        let presentation = parse_presentation(text)?;
        let budget = self.budget.unwrap_or_else(|| default_budget(rec.order));
        let table = enumerate(&presentation, &SubgroupSpec::trivial(), budget)?;
        if let Some(expected) = rec.order {
            if table.n_cosets != expected {
                return Err(AtlasError::OrderMismatch {
                    id: id.to_string(),
                    expected,
                    found: table.n_cosets,
                });
            }
        }
        let group = Arc::new(regular_representation(&table)?);
        let loaded = Arc::new(LoadedOrbifold {
            id: id.to_string(),
            presentation,
            table,
            group,
        });
        self.cache
            .lock()
            .expect("cache lock")
            .insert(id.to_string(), loaded.clone());
        Ok(loaded)
    }

    pub fn arc(&self, id: &str) -> Result<LoadedArc, AtlasError> {
        let (o, a) = self.atlas.arc(id)?;
        let orb = self.orbifold(&o.id)?;
        let triple = [orb.element(&a.u)?, orb.element(&a.ul)?, orb.element(&a.ur)?];
        let g = &orb.group;
        let data = ArcData::new(
            id,
            g.clone(),
            g.subgroup_generated(&triple[..2])?,
            g.subgroup_generated(&[triple[0].clone(), triple[2].clone()])?,
            g.subgroup_generated(&triple[..1])?,
        )?;
        Ok(LoadedArc {
            id: id.to_string(),
            orbifold: orb,
            triple,
            data,
        })
    }

    pub fn graph(&self, id: &str) -> Result<MSGraph, AtlasError> {
        let arc = self.arc(id)?;
        let g = build_graph(&arc.data)?;
        euler_check(&arc.data, &g)?;
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Verified,
    Flagged,
    Failed,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Verified => "VERIFIED",
            Status::Flagged => "FLAGGED",
            Status::Failed => "FAILED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        ok,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub label: String,
    pub genus: u64,
    pub status: Status,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbifoldReport {
    pub id: String,
    pub expected_order: Option<usize>,
    pub enumerated_order: Option<usize>,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub verified: usize,
    pub flagged: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtlasReport {
    pub orbifolds: Vec<OrbifoldReport>,
    pub rows: Vec<RowReport>,
    pub summary: Summary,
}

impl AtlasReport {
    pub fn all_ok(&self) -> bool {
        self.summary.failed == 0 && self.orbifolds.iter().all(|o| o.ok)
    }
}

fn arithmetic(inv: &InvariantSet, genus: u64) -> (bool, bool) {
    (inv.handshake_ok(), inv.genus() == Some(genus as usize))
}

fn genus_text(inv: &InvariantSet) -> String {
    match inv.genus() {
        Some(g) => format!("E-V+1 = {g}"),
        None => "E-V+1 < 0".into(),
    }
}

fn iso_check(name: String, g: &Multigraph, h: &Multigraph, timeout: Duration) -> Check {
    match isomorphic(g, h, timeout) {
        IsoResult::Isomorphic(_) => check(name, true, "isomorphic"),
        IsoResult::NotIsomorphic => check(name, false, "not isomorphic"),
        IsoResult::Inconclusive => check(name, false, "inconclusive: timeout"),
    }
}

#[cfg(feature = "parallel")]
fn map_items<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_items<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

fn matches_filter(id: &str, filter: Option<&str>) -> bool {
    match filter {
        None => true,
        Some(f) => id == f || id.split('.').next() == Some(f),
    }
}

impl AtlasSession {
    fn validate_row(&self, row: &RowRecord) -> RowReport {
        let mut checks = Vec::new();
        let mut flagged = false;
        let mut rebuilt = Vec::new();
        let printed: Result<InvariantSet, _> = row.printed.parse();
        let expected = match row.expected() {
            Ok(e) => e,
            Err(e) => {
                return RowReport {
                    label: row.label(),
                    genus: row.genus,
                    status: Status::Failed,
                    checks: vec![check("parse", false, e.to_string())],
                }
            }
        };
        match (&printed, &row.corrected) {
            (Err(_), _) => checks.push(check("printed parse", false, row.printed.clone())),
            (Ok(p), None) => {
                let (hs, gen) = arithmetic(p, row.genus);
                checks.push(check("handshake", hs, format!("{p}")));
                checks.push(check("genus", gen, genus_text(p)));
            }
            (Ok(p), Some(c)) => {
                let (hs, gen) = arithmetic(p, row.genus);
                checks.push(check(
                    "printed inconsistent",
                    !(hs && gen),
                    format!("printed {p}: handshake {hs}, genus {gen}"),
                ));
                let (hs, gen) = arithmetic(&expected, row.genus);
                checks.push(check("corrected handshake", hs, c.clone()));
                checks.push(check("corrected genus", gen, genus_text(&expected)));
                flagged = true;
            }
        }
        for gref in &row.graphs {
            if let Ok(Some(order)) = self.atlas.orbifold(gref.orbifold_id()).map(|o| o.order) {
                let m = ms_order(row.genus);
                checks.push(check(
                    format!("order {}", gref.id),
                    m.as_ref().ok() == Some(&(order as u64)),
                    match &m {
                        Ok(m) => format!("|G| = {order}, m_g = {m}"),
                        Err(e) => format!("|G| = {order}, {e}"),
                    },
                ));
            }
            if self.atlas.arc(&gref.id).is_err() {
                continue;
            }
            match self.graph(&gref.id) {
                Ok(g) => {
                    let inv = invariants(&g.graph);
                    let ok = inv.as_ref().ok() == Some(&expected);
                    let detail = match &inv {
                        Ok(i) => format!("rebuilt {i}"),
                        Err(e) => e.to_string(),
                    };
                    checks.push(check(format!("rebuild {}", gref.id), ok, detail));
                    let gen = genus(&g).ok();
                    checks.push(check(
                        format!("genus {}", gref.id),
                        gen == Some(row.genus as usize),
                        gen.map_or("not connected".into(), |g| format!("genus {g}")),
                    ));
                    let act = g.verify_action();
                    checks.push(check(
                        format!("action {}", gref.id),
                        act.automorphic && act.faithful,
                        format!("kernel order {}", act.kernel_order),
                    ));
                    rebuilt.push((gref.id.clone(), g.graph));
                }
                Err(e) => checks.push(check(format!("rebuild {}", gref.id), false, e.to_string())),
            }
        }
        if let Some(spec) = &row.family {
            match family_graph(spec) {
                Ok(f) => {
                    let s = subdivide(&f);
                    let inv = invariants(&s);
                    checks.push(check(
                        format!("family {spec}"),
                        inv.as_ref().ok() == Some(&expected),
                        match &inv {
                            Ok(i) => format!("subdivided {i}"),
                            Err(e) => e.to_string(),
                        },
                    ));
                    for (id, g) in &rebuilt {
                        checks.push(iso_check(format!("{id} ~ {spec}"), g, &s, self.iso_timeout));
                    }
                }
                Err(e) => checks.push(check(format!("family {spec}"), false, e.to_string())),
            }
        }
        for w in rebuilt.windows(2) {
            checks.push(iso_check(
                format!("{} ~ {}", w[0].0, w[1].0),
                &w[0].1,
                &w[1].1,
                self.iso_timeout,
            ));
        }
        let status = if checks.iter().any(|c| !c.ok) {
            Status::Failed
        } else if flagged {
            Status::Flagged
        } else if !rebuilt.is_empty() {
            Status::Verified
        } else {
            Status::Pass
        };
        RowReport {
            label: row.label(),
            genus: row.genus,
            status,
            checks,
        }
    }

    fn validate_orbifold(&self, rec: &OrbifoldRecord) -> OrbifoldReport {
        let (ok, found, detail) = match self.orbifold(&rec.id) {
            Ok(o) => (
                true,
                Some(o.table.n_cosets),
                format!("{} definitions", o.table.definitions),
            ),
            Err(AtlasError::OrderMismatch { found, .. }) => {
                (false, Some(found), "order mismatch".into())
            }
            Err(e) => (false, None, e.to_string()),
        };
        OrbifoldReport {
            id: rec.id.clone(),
            expected_order: rec.order,
            enumerated_order: found,
            ok,
            detail,
        }
    }

    /// Runs every validator, restricted to one orbifold (`O34`) or graph
    /// (`O34.a'`) when a filter is given.
    pub fn validate(&self, filter: Option<&str>) -> AtlasReport {
        let orbifolds: Vec<OrbifoldReport> = self
            .atlas
            .orbifolds
            .iter()
            .filter(|o| {
                o.presentation.is_some()
                    && matches_filter(&o.id, filter.map(|f| f.split('.').next().unwrap_or(f)))
            })
            .map(|o| self.validate_orbifold(o))
            .collect();
        let rows: Vec<&RowRecord> = self
            .atlas
            .rows
            .iter()
            .filter(|r| r.graphs.iter().any(|g| matches_filter(&g.id, filter)))
            .collect();
        let rows = map_items(&rows, |r| self.validate_row(r));
        let mut summary = Summary::default();
        for r in &rows {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Verified => summary.verified += 1,
                Status::Flagged => summary.flagged += 1,
                Status::Failed => summary.failed += 1,
            }
        }
        AtlasReport {
            orbifolds,
            rows,
            summary,
        }
    }
}

// ---------------------------------------------------------------------------
// arc equivalences

/// One generator map `(u, ul, ur) ↦ images` checked against the groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapCheck {
    pub images: Vec<String>,
    pub hom_defined: bool,
    pub injective: bool,
    pub isomorphism: bool,
    /// The map carries H_A, H_B and H_e of one arc onto those of the other.
    pub subgroups_match: bool,
}

impl MapCheck {
    pub fn ok(&self) -> bool {
        self.isomorphism && self.subgroups_match
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub a: String,
    pub b: String,
    pub cross: bool,
    /// Both triples carry the amalgam data: `u`, `ul` commuting involutions,
    /// `u` inverting `ur`, and `⟨u⟩` the intersection of the vertex groups.
    pub triples_ok: bool,
    pub map: MapCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected: Option<MapCheck>,
    pub graphs: String,
    pub status: Status,
}

impl EquivalenceReport {
    pub fn graphs_isomorphic(&self) -> bool {
        self.graphs == "isomorphic"
    }
}

fn triple_ok(arc: &LoadedArc) -> bool {
    let [u, ul, ur] = &arc.triple;
    let n = ur.order();
    u.order() == 2
        && ul.order() == 2
        && u != ul
        && u.compose(ul) == ul.compose(u)
        && n >= 3
        && u.compose(ur).compose(u) == ur.inverse()
        && arc.data.h_a.order() == 4
        && arc.data.h_b.order() as u64 == 2 * n
        && arc
            .data
            .h_a
            .elements()
            .iter()
            .filter(|x| arc.data.h_b.contains(x))
            .count()
            == 2
}

fn index_set(group: &PermutationGroup, h: &PermutationGroup) -> BTreeSet<usize> {
    h.elements()
        .iter()
        .filter_map(|x| group.index_of(x))
        .collect()
}

impl AtlasSession {
    /// Checks the map `(u, ul, ur) ↦ images` from arc `a` to arc `b`, with
    /// images written as words in `v, vl, vr`.
    pub fn check_map(&self, a: &str, b: &str, images: &[String]) -> Result<MapCheck, AtlasError> {
        let la = self.arc(a)?;
        let lb = self.arc(b)?;
        let ctx = Presentation::new(vec!["v".into(), "vl".into(), "vr".into()], vec![])?;
        let gb = &lb.orbifold.group;
        let imgs = images
            .iter()
            .map(|w| Ok(evaluate_word(&ctx.word(w)?, &lb.triple, gb.degree())?))
            .collect::<Result<Vec<_>, AtlasError>>()?;
        let mut out = MapCheck {
            images: images.to_vec(),
            hom_defined: false,
            injective: false,
            isomorphism: false,
            subgroups_match: false,
        };
        let ga = &la.orbifold.group;
        let Some(h) = hom_by_images(ga, &la.triple, gb, &imgs)? else {
            return Ok(out);
        };
        out.hom_defined = true;
        out.injective = h.is_injective();
        out.isomorphism = is_isomorphism(&h);
        out.subgroups_match = [
            (&la.data.h_a, &lb.data.h_a),
            (&la.data.h_b, &lb.data.h_b),
            (&la.data.h_e, &lb.data.h_e),
        ]
        .iter()
        .all(|(ha, hb)| {
            let mapped: BTreeSet<usize> = index_set(ga, ha).iter().map(|&i| h.mapping[i]).collect();
            mapped == index_set(gb, hb)
        });
        Ok(out)
    }

    pub fn check_equivalence(
        &self,
        rec: &EquivalenceRecord,
    ) -> Result<EquivalenceReport, AtlasError> {
        let la = self.arc(&rec.a)?;
        let lb = self.arc(&rec.b)?;
        let triples_ok = triple_ok(&la) && triple_ok(&lb);
        let map = self.check_map(&rec.a, &rec.b, &rec.images)?;
        let corrected = match &rec.corrected_images {
            Some(imgs) => Some(self.check_map(&rec.a, &rec.b, imgs)?),
            None => None,
        };
        let ma = build_graph(&la.data)?;
        let mb = build_graph(&lb.data)?;
        let iso = isomorphic(&ma.graph, &mb.graph, self.iso_timeout);
        let graphs = match iso {
            IsoResult::Isomorphic(_) => "isomorphic",
            IsoResult::NotIsomorphic => "not isomorphic",
            IsoResult::Inconclusive => "inconclusive",
        };
        let status = match (&corrected, triples_ok && iso.is_isomorphic()) {
            (_, false) => Status::Failed,
            (None, true) if map.ok() => Status::Verified,
            (Some(c), true) if !map.ok() && c.ok() => Status::Flagged,
            _ => Status::Failed,
        };
        Ok(EquivalenceReport {
            a: rec.a.clone(),
            b: rec.b.clone(),
            cross: rec.cross,
            triples_ok,
            map,
            corrected,
            graphs: graphs.into(),
            status,
        })
    }

    pub fn equivalence_suite(&self) -> Result<Vec<EquivalenceReport>, AtlasError> {
        self.atlas
            .equivalences
            .iter()
            .map(|e| self.check_equivalence(e))
            .collect()
    }
}
