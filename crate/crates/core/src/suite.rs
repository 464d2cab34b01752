//! A catalog of relations between the standard generators, checked by
//! evaluation.
//!
//! Exact entries compare both sides with `==` on basis images. Sandwich
//! entries evaluate a conjugation in both orientations, `g x g^{-1}` and
//! `g^{-1} x g`, and record which of them reproduces the expected element.
//! An entry's orientation is the intersection over all of its instances, so
//! a pass means one orientation works uniformly across every index choice
//! and rank. When every conjugator is an involution the two orientations are
//! the same element and the entry resolves to `both`.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, GenExpr, Orientation};
use crate::finite::{
    default_shadow_generators, gl2_shadow, mod2_image, normal_closure_in_finite,
    DEFAULT_CLOSURE_CAP,
};
use crate::generators::{eps, signed_lambda, Perm, Special};
use crate::matrix::IntMatrix;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exact,
    Orientation,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Report,
    Skipped,
}

/// Which orientations of a sandwich reproduce the expected element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrientationMatch {
    pub forward: bool,
    pub backward: bool,
}

impl OrientationMatch {
    fn both() -> Self {
        OrientationMatch {
            forward: true,
            backward: true,
        }
    }

    fn meet(self, other: OrientationMatch) -> OrientationMatch {
        OrientationMatch {
            forward: self.forward && other.forward,
            backward: self.backward && other.backward,
        }
    }

    fn any(self) -> bool {
        self.forward || self.backward
    }

    /// The single orientation, if exactly one matches.
    pub fn unique(self) -> Option<Orientation> {
        match (self.forward, self.backward) {
            (true, false) => Some(Orientation::Forward),
            (false, true) => Some(Orientation::Backward),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolvedOrientation {
    Forward,
    Backward,
    Both,
}

impl From<OrientationMatch> for Option<ResolvedOrientation> {
    fn from(m: OrientationMatch) -> Self {
        match (m.forward, m.backward) {
            (true, true) => Some(ResolvedOrientation::Both),
            (true, false) => Some(ResolvedOrientation::Forward),
            (false, true) => Some(ResolvedOrientation::Backward),
            (false, false) => None,
        }
    }
}

/// Evaluates `g x g^{-1}` and `g^{-1} x g` and compares each to `expected`.
pub fn check_orientation(
    g: &GenExpr,
    x: &GenExpr,
    expected: &GenExpr,
    n: usize,
) -> Result<OrientationMatch> {
    let mut ev = Evaluator::new(n);
    let (m, forward, backward, expected) = ev.sandwich(g, x, expected)?;
    if m.any() {
        Ok(m)
    } else {
        Err(Error::NoOrientationMatches {
            forward: forward.to_string(),
            backward: backward.to_string(),
            expected: expected.to_string(),
        })
    }
}

/// Memoising evaluator at one rank.
struct Evaluator {
    n: usize,
    cache: HashMap<GenExpr, Endo>,
}

impl Evaluator {
    fn new(n: usize) -> Self {
        Evaluator {
            n,
            cache: HashMap::new(),
        }
    }

    fn eval(&mut self, e: &GenExpr) -> Result<Endo> {
        if let Some(f) = self.cache.get(e) {
            return Ok(f.clone());
        }
        let f = e.evaluate(self.n)?;
        self.cache.insert(e.clone(), f.clone());
        Ok(f)
    }

    fn sandwich(
        &mut self,
        g: &GenExpr,
        x: &GenExpr,
        expected: &GenExpr,
    ) -> Result<(OrientationMatch, Endo, Endo, Endo)> {
        let gf = self.eval(g)?;
        let gi = self.eval(&g.clone().inv())?;
        let xf = self.eval(x)?;
        let want = self.eval(expected)?;
        let forward = gf.compose(&xf)?.compose(&gi)?;
        let backward = gi.compose(&xf)?.compose(&gf)?;
        let m = OrientationMatch {
            forward: forward == want,
            backward: backward == want,
        };
        Ok((m, forward, backward, want))
    }
}

#[derive(Debug, Clone)]
pub enum InstanceKind {
    Exact {
        lhs: GenExpr,
        rhs: GenExpr,
    },
    Sandwich {
        g: GenExpr,
        x: GenExpr,
        expected: GenExpr,
    },
    Order {
        expr: GenExpr,
        order: u64,
    },
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub kind: InstanceKind,
}

impl Instance {
    fn exact(label: impl Into<String>, lhs: GenExpr, rhs: GenExpr) -> Self {
        Instance {
            label: label.into(),
            kind: InstanceKind::Exact { lhs, rhs },
        }
    }

    fn sandwich(label: impl Into<String>, g: GenExpr, x: GenExpr, expected: GenExpr) -> Self {
        Instance {
            label: label.into(),
            kind: InstanceKind::Sandwich { g, x, expected },
        }
    }
}

enum Body {
    Relations(fn(usize) -> Vec<Instance>),
    Fixed(Vec<Instance>),
    AbelianizationReport,
    ShadowNormalClosure,
}

/// One catalog entry.
pub struct IdentityCheck {
    pub id: String,
    pub name: String,
    pub mode: CheckMode,
    /// Ranks at which the entry is defined; intersected with the run range.
    pub ranks: RangeInclusive<usize>,
    body: Body,
}

impl IdentityCheck {
    fn new(
        id: &str,
        name: &str,
        mode: CheckMode,
        ranks: RangeInclusive<usize>,
        body: Body,
    ) -> Self {
        IdentityCheck {
            id: id.into(),
            name: name.into(),
            mode,
            ranks,
            body,
        }
    }

    /// Instances at rank `n`, for relation entries.
    pub fn instances(&self, n: usize) -> Vec<Instance> {
        match &self.body {
            Body::Relations(f) => f(n),
            Body::Fixed(v) => v.clone(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rank: usize,
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backward: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianizationEntry {
    pub expr: String,
    /// Rows are exponent sums of the basis images.
    pub matrix: IntMatrix,
    /// Same matrix recomputed by substituting factor by factor into words.
    pub recomputed: IntMatrix,
    pub paths_agree: bool,
    pub det: i64,
    pub matches_printed: bool,
    pub matches_printed_transposed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianizationReport {
    pub rank: usize,
    pub printed: IntMatrix,
    pub entries: Vec<AbelianizationEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub name: String,
    pub mode: CheckMode,
    pub ranks: Vec<usize>,
    pub instances: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<ResolvedOrientation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugators_involutive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abelianization: Option<AbelianizationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EntryReport {
    /// A sandwich entry resolved to one orientation, or to both because every
    /// conjugator is an involution.
    pub fn orientation_well_defined(&self) -> bool {
        match self.orientation {
            Some(ResolvedOrientation::Forward) | Some(ResolvedOrientation::Backward) => true,
            Some(ResolvedOrientation::Both) => self.conjugators_involutive == Some(true),
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub reports: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub ranks: [usize; 2],
    pub entries: Vec<EntryReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn entry(&self, id: &str) -> Option<&EntryReport> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn distinct_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (1..=n).permutations(k).collect()
}

fn perm_expr(p: &Perm) -> GenExpr {
    GenExpr::p(p.cycles())
}

fn r1(n: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for sigma in Perm::all(n) {
        for i in 1..=n {
            out.push(Instance::sandwich(
                format!("sigma={sigma} i={i}"),
                perm_expr(&sigma),
                GenExpr::e(i),
                GenExpr::e(sigma.image(i)),
            ));
        }
    }
    out
}

fn r2(n: usize) -> Vec<Instance> {
    distinct_tuples(n, 3)
        .into_iter()
        .map(|t| {
            let (i, j, k) = (t[0], t[1], t[2]);
            Instance::exact(
                format!("i={i} j={j} k={k}"),
                GenExpr::comm(GenExpr::l(i, j), GenExpr::l(j, k)),
                GenExpr::l(i, k),
            )
        })
        .collect()
}

fn r3(n: usize) -> Vec<Instance> {
    distinct_tuples(n, 3)
        .into_iter()
        .map(|t| {
            let (i, j, k) = (t[0], t[1], t[2]);
            Instance::exact(
                format!("i={i} j={j} k={k}"),
                GenExpr::comm(GenExpr::l(i, j), GenExpr::l(k, j)),
                GenExpr::one(),
            )
        })
        .collect()
}

fn r4(n: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for sigma in Perm::all(n) {
        for t in distinct_tuples(n, 2) {
            let (i, j) = (t[0], t[1]);
            out.push(Instance::sandwich(
                format!("sigma={sigma} i={i} j={j}"),
                perm_expr(&sigma),
                GenExpr::l(i, j),
                GenExpr::l(sigma.image(i), sigma.image(j)),
            ));
        }
    }
    out
}

fn eps_pair(i: usize, j: usize) -> GenExpr {
    GenExpr::e(i).then(GenExpr::e(j))
}

fn r5(n: usize) -> Vec<Instance> {
    distinct_tuples(n, 2)
        .into_iter()
        .map(|t| {
            let (i, j) = (t[0], t[1]);
            Instance::sandwich(
                format!("i={i} j={j}"),
                eps_pair(i, j),
                GenExpr::l(i, j),
                GenExpr::r(i, j),
            )
        })
        .collect()
}

fn r6(n: usize) -> Vec<Instance> {
    distinct_tuples(n, 3)
        .into_iter()
        .map(|t| {
            let (i, j, k) = (t[0], t[1], t[2]);
            Instance::sandwich(
                format!("i={i} j={j} k={k}"),
                GenExpr::p(vec![vec![i, j, k]]),
                GenExpr::l(j, k),
                GenExpr::l(i, j),
            )
        })
        .collect()
}

fn r7(n: usize) -> Vec<Instance> {
    distinct_tuples(n, 4)
        .into_iter()
        .map(|t| {
            let (i, j, k, l) = (t[0], t[1], t[2], t[3]);
            Instance::sandwich(
                format!("i={i} j={j} k={k} l={l}"),
                GenExpr::p(vec![vec![j, k], vec![i, l]]),
                GenExpr::l(j, k),
                GenExpr::l(k, j),
            )
        })
        .collect()
}

fn alpha() -> GenExpr {
    GenExpr::special(Special::Alpha)
}

fn beta() -> GenExpr {
    GenExpr::special(Special::Beta)
}

fn r8(_n: usize) -> Vec<Instance> {
    let order2 = |label: &str, expr: GenExpr| Instance {
        label: label.into(),
        kind: InstanceKind::Order { expr, order: 2 },
    };
    vec![
        order2("order(alpha)", alpha()),
        order2("order(beta)", beta()),
        order2("order(alpha beta)", alpha().then(beta())),
        Instance::exact(
            "alpha beta = beta alpha",
            alpha().then(beta()),
            beta().then(alpha()),
        ),
    ]
}

fn r9(_n: usize) -> Vec<Instance> {
    vec![Instance::sandwich(
        "beta l(1,2) beta",
        beta(),
        GenExpr::l(1, 2),
        GenExpr::l(3, 2).inv(),
    )]
}

fn r10(_n: usize) -> Vec<Instance> {
    vec![
        Instance::exact(
            "commutator",
            GenExpr::comm(GenExpr::l(1, 3), GenExpr::l(3, 2)),
            GenExpr::l(1, 2),
        ),
        Instance::exact(
            "expanded",
            GenExpr::seq(vec![
                GenExpr::seq(vec![
                    GenExpr::l(1, 3),
                    GenExpr::l(3, 2),
                    GenExpr::l(1, 3).inv(),
                ]),
                GenExpr::l(3, 2).inv(),
            ]),
            GenExpr::l(1, 2),
        ),
    ]
}

fn r11(n: usize) -> Vec<Instance> {
    distinct_tuples(n, 2)
        .into_iter()
        .map(|t| {
            let (i, j) = (t[0], t[1]);
            Instance::sandwich(
                format!("i={i} j={j}"),
                GenExpr::special(Special::Z),
                GenExpr::l(i, j),
                GenExpr::r(i, j),
            )
        })
        .collect()
}

fn r12(n: usize) -> Vec<Instance> {
    distinct_tuples(n, 2)
        .into_iter()
        .map(|t| {
            let (i, j) = (t[0], t[1]);
            Instance::sandwich(
                format!("e({i}) e({j}) l({i},{j}) e({j}) e({i})"),
                eps_pair(i, j),
                GenExpr::l(i, j),
                GenExpr::r(i, j),
            )
        })
        .collect()
}

pub const POWER_COMMUTATOR_EXPONENTS: RangeInclusive<i64> = 1..=6;

fn r13(_n: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for m in POWER_COMMUTATOR_EXPONENTS {
        out.push(Instance::exact(
            format!("[l(1,2), l(2,3)^{m}] m={m}"),
            GenExpr::comm(GenExpr::l(1, 2), GenExpr::l(2, 3).pow(m)),
            GenExpr::l(1, 3).pow(m),
        ));
        out.push(Instance::exact(
            format!("[l(1,3), l(3,2)^{m}] m={m}"),
            GenExpr::comm(GenExpr::l(1, 3), GenExpr::l(3, 2).pow(m)),
            GenExpr::l(1, 2).pow(m),
        ));
    }
    out
}

/// `l(2,1) l(3,1) ... l(n,1)`.
pub fn diagonal_generator(n: usize) -> GenExpr {
    GenExpr::seq((2..=n).map(|i| GenExpr::l(i, 1)).collect())
}

fn r14(n: usize) -> Vec<Instance> {
    vec![Instance::sandwich(
        format!("theta at n={n}"),
        GenExpr::special(Special::Theta),
        diagonal_generator(n),
        GenExpr::l(2, 1),
    )]
}

fn r15(n: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for i in 2..=n {
        for j in 2..=n {
            if i != j {
                out.push(Instance::exact(
                    format!("i={i} j={j}"),
                    GenExpr::comm(GenExpr::l(i, 1), GenExpr::l(j, 1)),
                    GenExpr::one(),
                ));
            }
        }
    }
    out
}

const UNBOUNDED: usize = usize::MAX;

/// The built-in catalog, in report order.
pub fn catalog() -> Vec<IdentityCheck> {
    use Body::Relations;
    use CheckMode::*;
    vec![
        IdentityCheck::new(
            "R1",
            "permutation conjugation of sign flips",
            Orientation,
            3..=UNBOUNDED,
            Relations(r1),
        ),
        IdentityCheck::new(
            "R2",
            "[l(i,j), l(j,k)] = l(i,k)",
            Exact,
            3..=UNBOUNDED,
            Relations(r2),
        ),
        IdentityCheck::new(
            "R3",
            "[l(i,j), l(k,j)] = 1",
            Exact,
            3..=UNBOUNDED,
            Relations(r3),
        ),
        IdentityCheck::new(
            "R4",
            "permutation conjugation of Nielsen moves",
            Orientation,
            3..=UNBOUNDED,
            Relations(r4),
        ),
        IdentityCheck::new(
            "R5",
            "conjugation by e(i) e(j) sends l(i,j) to r(i,j)",
            Orientation,
            3..=UNBOUNDED,
            Relations(r5),
        ),
        IdentityCheck::new(
            "R6",
            "three-cycle conjugation (i j k) l(j,k) (i j k)' = l(i,j)",
            Orientation,
            3..=UNBOUNDED,
            Relations(r6),
        ),
        IdentityCheck::new(
            "R7",
            "double transposition (j k)(i l) l(j,k) (j k)(i l) = l(k,j)",
            Orientation,
            4..=UNBOUNDED,
            Relations(r7),
        ),
        IdentityCheck::new(
            "R8",
            "alpha, beta generate a Klein four-group",
            Exact,
            3..=3,
            Relations(r8),
        ),
        IdentityCheck::new(
            "R9",
            "beta l(1,2) beta = l(3,2)'",
            Orientation,
            3..=3,
            Relations(r9),
        ),
        IdentityCheck::new(
            "R10",
            "l(1,2) = [l(1,3), l(3,2)]",
            Exact,
            3..=3,
            Relations(r10),
        ),
        IdentityCheck::new(
            "R11",
            "z l(i,j) z = r(i,j)",
            Orientation,
            3..=UNBOUNDED,
            Relations(r11),
        ),
        IdentityCheck::new(
            "R12",
            "e(i) e(j) l(i,j) e(j) e(i) = r(i,j)",
            Orientation,
            3..=UNBOUNDED,
            Relations(r12),
        ),
        IdentityCheck::new(
            "R13",
            "power commutators [l(1,2), l(2,3)^m] = l(1,3)^m and [l(1,3), l(3,2)^m] = l(1,2)^m",
            Exact,
            3..=UNBOUNDED,
            Relations(r13),
        ),
        IdentityCheck::new(
            "R14",
            "theta conjugates l(2,1) ... l(n,1) to l(2,1)",
            Orientation,
            3..=UNBOUNDED,
            Relations(r14),
        ),
        IdentityCheck::new(
            "R15",
            "l(i,1) and l(j,1) commute",
            Exact,
            3..=UNBOUNDED,
            Relations(r15),
        ),
        IdentityCheck::new(
            "R16",
            "abelianization of [l(1,2), e(1) e(2)] against I + 2E21",
            Report,
            3..=3,
            Body::AbelianizationReport,
        ),
        IdentityCheck::new(
            "R17",
            "normal closure of iota in the mod-2 shadow",
            Exact,
            3..=3,
            Body::ShadowNormalClosure,
        ),
    ]
}

pub fn run_suite(ranks: RangeInclusive<usize>) -> Result<SuiteReport> {
    run_checks(&catalog(), ranks)
}

pub fn run_checks(checks: &[IdentityCheck], ranks: RangeInclusive<usize>) -> Result<SuiteReport> {
    let entries = checks
        .iter()
        .map(|c| run_check(c, &ranks))
        .collect::<Result<Vec<_>>>()?;
    let count = |s: Status| entries.iter().filter(|e| e.status == s).count();
    let summary = Summary {
        total: entries.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        reports: count(Status::Report),
        skipped: count(Status::Skipped),
    };
    Ok(SuiteReport {
        ranks: [*ranks.start(), *ranks.end()],
        entries,
        summary,
    })
}

fn run_check(check: &IdentityCheck, range: &RangeInclusive<usize>) -> Result<EntryReport> {
    let lo = (*range.start()).max(*check.ranks.start());
    let hi = (*range.end()).min(*check.ranks.end());
    let ranks: Vec<usize> = (lo..=hi).collect();
    let mut report = EntryReport {
        id: check.id.clone(),
        name: check.name.clone(),
        mode: check.mode,
        ranks: ranks.clone(),
        instances: 0,
        status: Status::Pass,
        orientation: None,
        conjugators_involutive: None,
        witness: None,
        abelianization: None,
        note: None,
    };
    if ranks.is_empty() {
        report.status = Status::Skipped;
        return Ok(report);
    }
    match &check.body {
        Body::Relations(_) | Body::Fixed(_) => run_relations(check, &ranks, &mut report)?,
        Body::AbelianizationReport => {
            let ab = abelianization_report(ranks[0])?;
            report.instances = ab.entries.len();
            report.status = if ab.entries.iter().all(|e| e.paths_agree) {
                Status::Report
            } else {
                Status::Fail
            };
            let matches: Vec<&str> = ab
                .entries
                .iter()
                .filter(|e| e.matches_printed || e.matches_printed_transposed)
                .map(|e| e.expr.as_str())
                .collect();
            report.note = Some(if matches.is_empty() {
                "no commutator abelianizes to I + 2E21 in either orientation".into()
            } else {
                format!(
                    "I + 2E21 (in some orientation) arises from: {}",
                    matches.join(", ")
                )
            });
            report.abelianization = Some(ab);
        }
        Body::ShadowNormalClosure => {
            for &n in &ranks {
                let gens = default_shadow_generators(n)?;
                let group = gl2_shadow(n, &gens, DEFAULT_CLOSURE_CAP)?;
                let iota = mod2_image(&crate::generators::special(Special::Iota, n)?)?;
                let nc = normal_closure_in_finite(&group, &iota)?;
                report.instances += 1;
                report.note = Some(format!(
                    "shadow order {}, normal closure order {}",
                    group.len(),
                    nc.len()
                ));
                if nc.len() != group.len() {
                    report.status = Status::Fail;
                    report.witness = Some(Witness {
                        rank: n,
                        instance: "normal closure of iota".into(),
                        lhs: nc.len().to_string(),
                        rhs: group.len().to_string(),
                        backward: None,
                        reason: "normal closure is a proper subgroup".into(),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn run_relations(check: &IdentityCheck, ranks: &[usize], report: &mut EntryReport) -> Result<()> {
    let mut resolved = OrientationMatch::both();
    let mut involutive = true;
    let mut saw_sandwich = false;
    for &n in ranks {
        let mut ev = Evaluator::new(n);
        for inst in check.instances(n) {
            report.instances += 1;
            let failure = match &inst.kind {
                InstanceKind::Exact { lhs, rhs } => {
                    let a = ev.eval(lhs)?;
                    let b = ev.eval(rhs)?;
                    (a != b).then(|| Witness {
                        rank: n,
                        instance: inst.label.clone(),
                        lhs: a.to_string(),
                        rhs: b.to_string(),
                        backward: None,
                        reason: format!("{lhs} != {rhs}"),
                    })
                }
                InstanceKind::Order { expr, order } => {
                    let f = ev.eval(expr)?;
                    let got = f.order_with_cap(crate::endo::DEFAULT_ORDER_CAP);
                    (got != Ok(*order)).then(|| Witness {
                        rank: n,
                        instance: inst.label.clone(),
                        lhs: match got {
                            Ok(k) => k.to_string(),
                            Err(e) => e.to_string(),
                        },
                        rhs: order.to_string(),
                        backward: None,
                        reason: format!("order of {expr}"),
                    })
                }
                InstanceKind::Sandwich { g, x, expected } => {
                    saw_sandwich = true;
                    let (m, forward, backward, want) = ev.sandwich(g, x, expected)?;
                    let gf = ev.eval(g)?;
                    involutive &= gf.compose(&gf)?.is_identity();
                    let before = resolved;
                    resolved = resolved.meet(m);
                    let reason = if !m.any() {
                        Some("neither orientation matches")
                    } else if before.any() && !resolved.any() {
                        Some("orientation differs from earlier instances")
                    } else {
                        None
                    };
                    reason.map(|r| Witness {
                        rank: n,
                        instance: inst.label.clone(),
                        lhs: forward.to_string(),
                        rhs: want.to_string(),
                        backward: Some(backward.to_string()),
                        reason: r.into(),
                    })
                }
            };
            if let Some(w) = failure {
                if report.witness.is_none() {
                    report.witness = Some(w);
                }
                report.status = Status::Fail;
            }
        }
    }
    if saw_sandwich {
        report.orientation = resolved.into();
        report.conjugators_involutive = Some(involutive);
    }
    Ok(())
}

/// Abelianization by substituting the factors one at a time into each basis
/// letter and counting exponents. Independent of `Endo::compose`,
/// `Endo::abelianize` and Nielsen inversion.
fn abelianize_by_substitution(factors: &[Endo], n: usize) -> IntMatrix {
    let mut m = IntMatrix::zero(n);
    for i in 1..=n {
        let mut w = Word::generator(i, n).expect("index in range");
        for f in factors {
            w = f.apply(&w).expect("shared rank");
        }
        let mut counts = vec![0i64; n];
        for l in w.letters() {
            counts[l.index() - 1] += if l.is_inverse() { -1 } else { 1 };
        }
        for (j, c) in counts.into_iter().enumerate() {
            m.set(i - 1, j, c);
        }
    }
    m
}

/// The three commutators of `l(1,2)` with sign flips, their abelianizations
/// by two routes, and comparison against `I + 2E21` in both orientations.
pub fn abelianization_report(n: usize) -> Result<AbelianizationReport> {
    let printed = IntMatrix::elementary(2, 1, 2, n)?;
    let l12 = crate::generators::lambda(1, 2, n)?;
    let l12_inv = signed_lambda(1, 2, -1, n)?;
    let e1 = eps(1, n)?;
    let e2 = eps(2, n)?;
    // sign flips are involutions, so each factor inverse is written directly
    let cases: Vec<(GenExpr, Vec<Endo>)> = vec![
        (
            GenExpr::comm(GenExpr::l(1, 2), eps_pair(1, 2)),
            vec![
                l12.clone(),
                e1.clone(),
                e2.clone(),
                l12_inv.clone(),
                e2.clone(),
                e1.clone(),
            ],
        ),
        (
            GenExpr::comm(GenExpr::l(1, 2), GenExpr::e(1)),
            vec![l12.clone(), e1.clone(), l12_inv.clone(), e1.clone()],
        ),
        (
            GenExpr::comm(GenExpr::l(1, 2), GenExpr::e(2)),
            vec![l12, e2.clone(), l12_inv, e2],
        ),
    ];
    let mut entries = Vec::new();
    for (expr, factors) in cases {
        let matrix = expr.evaluate(n)?.abelianize();
        let recomputed = abelianize_by_substitution(&factors, n);
        entries.push(AbelianizationEntry {
            expr: expr.to_string(),
            paths_agree: matrix == recomputed,
            det: matrix.det()?,
            matches_printed: matrix == printed,
            matches_printed_transposed: matrix.transpose() == printed,
            matrix,
            recomputed,
        });
    }
    Ok(AbelianizationReport {
        rank: n,
        printed,
        entries,
    })
}

/// Parses a suite file. Lines are `name : LHS == RHS`, or
/// `name : G , X == RHS orient` for a sandwich of `X` by `G`; `#` starts a
/// comment and `n = 4` or `n = 3..5` sets the ranks for following lines.
pub fn parse_suite_file(text: &str, default: RangeInclusive<usize>) -> Result<Vec<IdentityCheck>> {
    let mut ranks = default;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| Error::Semantic(format!("line {}: {msg}", lineno + 1));
        if let Some(rest) = line.strip_prefix("n =").or_else(|| line.strip_prefix("n=")) {
            ranks =
                parse_range(rest.trim()).map_err(|_| at(format!("bad rank directive `{rest}`")))?;
            continue;
        }
        let (name, body) = line
            .split_once(':')
            .ok_or_else(|| at("expected `name : LHS == RHS`".into()))?;
        let mut body = body.trim();
        let mut orient = false;
        for suffix in ["[orient]", "orient"] {
            if let Some(b) = body.strip_suffix(suffix) {
                body = b.trim_end();
                orient = true;
                break;
            }
        }
        let (lhs, rhs) = body
            .split_once("==")
            .ok_or_else(|| at("expected `==`".into()))?;
        let probe = *ranks.start();
        let parse = |t: &str| parse_expr(t.trim(), probe).map_err(|e| at(e.to_string()));
        let rhs = parse(rhs)?;
        let instance = if orient {
            let (g, x) = split_top_level_comma(lhs)
                .ok_or_else(|| at("orient entries need `G , X`".into()))?;
            Instance::sandwich(name.trim(), parse(g)?, parse(x)?, rhs)
        } else {
            Instance::exact(name.trim(), parse(lhs)?, rhs)
        };
        out.push(IdentityCheck {
            id: name.trim().into(),
            name: body.into(),
            mode: if orient {
                CheckMode::Orientation
            } else {
                CheckMode::Exact
            },
            ranks: ranks.clone(),
            body: Body::Fixed(vec![instance]),
        });
    }
    Ok(out)
}

/// `3..6` (inclusive) or a single rank.
pub fn parse_range(text: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let bad = || format!("invalid rank range `{text}`");
    match text.split_once("..") {
        Some((a, b)) => {
            let lo: usize = a.trim().parse().map_err(|_| bad())?;
            let hi: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if lo == 0 || lo > hi {
                return Err(bad());
            }
            Ok(lo..=hi)
        }
        None => {
            let n: usize = text.trim().parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            Ok(n..=n)
        }
    }
}

fn split_top_level_comma(text: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (k, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => return Some((&text[..k], &text[k + 1..])),
            _ => {}
        }
    }
    None
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite over ranks {}..{}", self.ranks[0], self.ranks[1])?;
        for e in &self.entries {
            let status = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Report => "REPORT",
                Status::Skipped => "SKIP",
            };
            write!(f, "{status:<6} {:<4} {}", e.id, e.name)?;
            if !e.ranks.is_empty() {
                write!(
                    f,
                    " [n = {}..{}, {} instances]",
                    e.ranks[0],
                    e.ranks[e.ranks.len() - 1],
                    e.instances
                )?;
            }
            if let Some(o) = e.orientation {
                let o = match o {
                    ResolvedOrientation::Forward => "g x g'",
                    ResolvedOrientation::Backward => "g' x g",
                    ResolvedOrientation::Both => "both (involutive conjugator)",
                };
                write!(f, " orientation: {o}")?;
            }
            writeln!(f)?;
            if let Some(w) = &e.witness {
                writeln!(
                    f,
                    "       witness at n = {} ({}): {}",
                    w.rank, w.instance, w.reason
                )?;
                writeln!(f, "         lhs: {}", w.lhs)?;
                writeln!(f, "         rhs: {}", w.rhs)?;
                if let Some(b) = &w.backward {
                    writeln!(f, "         g' x g: {b}")?;
                }
            }
            if let Some(ab) = &e.abelianization {
                for entry in &ab.entries {
                    writeln!(
                        f,
                        "       {}: rows {:?}, det {}, paths agree: {}, = I+2E21: {}, transpose = I+2E21: {}",
                        entry.expr,
                        entry.matrix.rows(),
                        entry.det,
                        entry.paths_agree,
                        entry.matches_printed,
                        entry.matches_printed_transposed
                    )?;
                }
            }
            if let Some(note) = &e.note {
                writeln!(f, "       {note}")?;
            }
        }
        let s = &self.summary;
        write!(
            f,
            "{} entries: {} passed, {} failed, {} reports, {} skipped",
            s.total, s.passed, s.failed, s.reports, s.skipped
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_examples() {
        let sigma = GenExpr::p(vec![vec![1, 2, 3]]);
        // sigma = (1 2 3) sends 1 to 2
        let m = check_orientation(&sigma, &GenExpr::e(1), &GenExpr::e(2), 3).unwrap();
        assert_eq!(m.unique(), Some(Orientation::Backward));
        let m =
            check_orientation(&GenExpr::one(), &GenExpr::l(1, 2), &GenExpr::l(1, 2), 3).unwrap();
        assert!(m.forward && m.backward);
        let err = check_orientation(&sigma, &GenExpr::e(1), &GenExpr::e(1), 3);
        assert!(matches!(err, Err(Error::NoOrientationMatches { .. })));
    }

    #[test]
    fn theta_orientation() {
        for n in 3..=5 {
            let m = check_orientation(
                &GenExpr::special(Special::Theta),
                &diagonal_generator(n),
                &GenExpr::l(2, 1),
                n,
            )
            .unwrap();
            assert_eq!(m.unique(), Some(Orientation::Backward), "n = {n}");
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = run_suite(3..=4).unwrap();
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.entry("R16").unwrap().status, Status::Report);
    }

    #[test]
    fn skipped_outside_rank_range() {
        let report = run_suite(4..=4).unwrap();
        assert_eq!(report.entry("R8").unwrap().status, Status::Skipped);
        assert_eq!(report.entry("R7").unwrap().status, Status::Pass);
    }

    #[test]
    fn failing_entry_carries_witness() {
        let text = "n = 3\nbad : l(1,2) l(2,1) == l(2,1) l(1,2)\n";
        let checks = parse_suite_file(text, 3..=3).unwrap();
        let report = run_checks(&checks, 3..=3).unwrap();
        let entry = &report.entries[0];
        assert_eq!(entry.status, Status::Fail);
        let w = entry.witness.as_ref().unwrap();
        assert_eq!(w.rank, 3);
        assert!(!report.all_passed());
    }

    #[test]
    fn suite_file_syntax() {
        let text = "# a comment\nn = 3..4\nR2a : [l(1,2), l(2,3)] == l(1,3)\nsix : p(1 2 3) , l(2,3) == l(1,2) orient\nn = 4\nk : p(2 3)(1 4), l(2,3) == l(3,2) [orient]\n";
        let checks = parse_suite_file(text, 3..=6).unwrap();
        assert_eq!(checks.len(), 3);
        assert_eq!(checks[0].ranks, 3..=4);
        assert_eq!(checks[1].mode, CheckMode::Orientation);
        assert_eq!(checks[2].ranks, 4..=4);
        let report = run_checks(&checks, 3..=6).unwrap();
        assert!(report.all_passed(), "{report}");
        assert_eq!(
            report.entries[1].orientation,
            Some(ResolvedOrientation::Forward)
        );
        assert!(parse_suite_file("x : l(1,2)", 3..=3).is_err());
        assert!(parse_suite_file("n = 0\n", 3..=3).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..6"), Ok(3..=6));
        assert_eq!(parse_range("3..=6"), Ok(3..=6));
        assert_eq!(parse_range("4"), Ok(4..=4));
        assert!(parse_range("6..3").is_err());
        assert!(parse_range("x").is_err());
    }
}
