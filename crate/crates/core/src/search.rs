//! Orchestration: the three search strategies over a parameter rectangle,
//! ordered-mass filtering, and the composed proof over the whole parameter
//! domain.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifurcation::{self, ComponentCertificate, InnerClass, InnerOutcome};
use crate::interval::{Interval, PBox};
use crate::potential::{self, ParamRect};
use crate::small_masses::{self, LightPrimary, SmallMassContext, DISK_RADIUS};
use crate::solve::{self, box_order};

/// Parameter domain `[0, 1/2] × [0, 2/3]`.
pub const PARAM_DOMAIN: ((f64, f64), (f64, f64)) = ((0.0, 0.5), (0.0, 2.0 / 3.0));
/// Strategy-3 parameter bisection stops classifying below this width.
pub const INNER_PARAM_FLOOR: f64 = 1e-8;
/// Strategy-3 parameter rectangles are pre-split to this width.
pub const INNER_PARAM_COARSE: f64 = 5e-2;
/// Rectangles straddling `m2 = m3` with a multi-solution class are halved
/// down to this width; the mirrored unordered side inflates the bound.
pub const INNER_MIXED_REFINE: f64 = 1e-3;
/// Default cap on stored records per list; counts stay exact.
pub const DEFAULT_RECORD_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Explicit count of all zeros.
    Count = 1,
    /// No bifurcation anywhere in the configuration space.
    NoBifurcation = 2,
    /// Resolve bifurcations in the inner region.
    Resolve = 3,
}

impl Strategy {
    pub fn from_number(n: u8) -> Option<Strategy> {
        match n {
            1 => Some(Strategy::Count),
            2 => Some(Strategy::NoBifurcation),
            3 => Some(Strategy::Resolve),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Phase-space stopping width.
    pub tol: f64,
    /// Strategy-2 parameter rectangles are not split below this width.
    pub param_floor: f64,
    /// Use the small-mass certificate near light primaries.
    pub small_mass: bool,
    pub record_limit: usize,
}

impl SearchOptions {
    pub fn new(tol: f64) -> Self {
        SearchOptions { tol, param_floor: tol * tol, small_mass: true, record_limit: DEFAULT_RECORD_LIMIT }
    }
}

// ---------------------------------------------------------------------------
// Ordered masses
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    AllUnordered,
    AllOrdered,
    Mixed,
}

/// Classifies `pr` against `m1 ≤ m2 ≤ m3`, i.e. `s ≤ 1/2` and
/// `t ≤ 1/(2 − s)`.
pub fn ordered_filter(pr: &ParamRect) -> Ordering {
    let bound_at = |s: f64| (2.0 - Interval::point(s)).recip().unwrap_or(Interval::ENTIRE);
    // 1/(2 − s) is increasing in s
    let widest = bound_at(pr.s.hi().min(0.5));
    let tightest = bound_at(pr.s.lo());
    if pr.s.lo() > 0.5 || pr.t.lo() > widest.hi() {
        Ordering::AllUnordered
    } else if pr.s.hi() <= 0.5 && pr.t.hi() <= tightest.lo() {
        Ordering::AllOrdered
    } else {
        Ordering::Mixed
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub phase: PBox,
    pub param: ParamRect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub param: ParamRect,
    /// Covering of the zeros in the inner region, one hull per component.
    pub components: Vec<ComponentCertificate>,
}

/// A list of records with an exact count; only the first `record_limit`
/// records (in canonical order) are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordList<T> {
    pub count: usize,
    pub records: Vec<T>,
}

impl<T> Default for RecordList<T> {
    fn default() -> Self {
        RecordList { count: 0, records: Vec::new() }
    }
}

impl<T> RecordList<T> {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn truncated(&self) -> bool {
        self.records.len() < self.count
    }

    fn push(&mut self, x: T, limit: usize) {
        self.count += 1;
        if self.records.len() < limit {
            self.records.push(x);
        }
    }

    fn extend(&mut self, o: RecordList<T>, limit: usize) {
        self.count += o.count;
        let room = limit.saturating_sub(self.records.len());
        self.records.extend(o.records.into_iter().take(room));
    }
}

pub type BoxList = RecordList<BoxRecord>;
pub type ParamList = RecordList<ParamRecord>;

fn param_order(a: &ParamRect, b: &ParamRect) -> std::cmp::Ordering {
    let ka = [a.s.lo(), a.t.lo(), a.s.hi(), a.t.hi()];
    let kb = [b.s.lo(), b.t.lo(), b.s.hi(), b.t.hi()];
    ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
}

fn record_order(a: &BoxRecord, b: &BoxRecord) -> std::cmp::Ordering {
    param_order(&a.param, &b.param).then_with(|| box_order(&a.phase, &b.phase))
}

/// Every list a run can fill.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lists {
    pub small: BoxList,
    pub no: BoxList,
    pub yes: BoxList,
    pub tight: BoxList,
    pub ndt: BoxList,
    pub ndg: BoxList,
    /// Parameter rectangles left unresolved by the inner classification.
    pub inner_small: ParamList,
    pub s0: ParamList,
    pub s1: ParamList,
    pub s2: ParamList,
    pub s111: ParamList,
    pub s210: ParamList,
    pub s300: ParamList,
}

impl Lists {
    fn merge(mut self, o: Lists, limit: usize) -> Lists {
        self.small.extend(o.small, usize::MAX);
        self.no.extend(o.no, limit);
        self.yes.extend(o.yes, usize::MAX);
        self.tight.extend(o.tight, usize::MAX);
        self.ndt.extend(o.ndt, limit);
        self.ndg.extend(o.ndg, limit);
        self.inner_small.extend(o.inner_small, usize::MAX);
        self.s0.extend(o.s0, limit);
        self.s1.extend(o.s1, limit);
        self.s2.extend(o.s2, limit);
        self.s111.extend(o.s111, limit);
        self.s210.extend(o.s210, limit);
        self.s300.extend(o.s300, limit);
        self
    }

    fn canonicalize(&mut self) {
        for l in [&mut self.small, &mut self.no, &mut self.ndt, &mut self.ndg] {
            l.records.sort_by(record_order);
        }
        for l in [
            &mut self.inner_small,
            &mut self.s0,
            &mut self.s1,
            &mut self.s2,
            &mut self.s111,
            &mut self.s210,
            &mut self.s300,
        ] {
            l.records.sort_by(|a, b| param_order(&a.param, &b.param));
        }
    }

    /// `|s3List| = |s111List| + |s210List| + |s300List|`.
    pub fn s3_count(&self) -> usize {
        self.s111.count + self.s210.count + self.s300.count
    }

    /// The records of s111, s210 and s300 together.
    pub fn s3(&self) -> Vec<&ParamRecord> {
        self.s111.records.iter().chain(&self.s210.records).chain(&self.s300.records).collect()
    }
}

/// A named region of the configuration space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub bx: PBox,
}

/// Box-adjacency connectivity of the classified parameter sets.
///
/// Counts are anchored where they are known: s1 components meeting P1
/// (`t ≤ 0.55`, one zero in C0) and s111 components meeting P2 (`t ≥ 0.58`,
/// three zeros). A component touching an anchored one inherits the anchor:
/// its bifurcation-free components continue those of the neighbour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connectivity {
    pub s1_components: usize,
    pub s111_components: usize,
    pub s210_components: usize,
    pub s300_components: usize,
    /// Some s1 component meets P1.
    pub s1_meets_p1: bool,
    /// Some s111 component meets P2.
    pub s111_meets_p2: bool,
    /// Components of s1, s111, s210 or s300 not linked to either anchor.
    pub unanchored: usize,
    /// Whether the stored records cover the full lists.
    pub complete: bool,
}

impl Connectivity {
    pub fn verified(&self) -> bool {
        self.complete && self.s1_meets_p1 && self.s111_meets_p2 && self.unanchored == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub strategy: Strategy,
    pub param: ParamRect,
    pub tol: f64,
    pub regions: Vec<Region>,
    pub inner_region: Option<Region>,
    pub param_tolerances: Option<(f64, f64)>,
    pub lists: Lists,
    pub unordered_count: usize,
    pub small_mass_certificates: usize,
    pub outer_conclusive: bool,
    pub inner_conclusive: Option<bool>,
    pub conclusive: bool,
    /// Exact number of zeros; strategy 1 only.
    pub solution_count: Option<usize>,
    pub connectivity: Option<Connectivity>,
}

// ---------------------------------------------------------------------------
// Strategy 1
// ---------------------------------------------------------------------------

fn run_count(pr: &ParamRect, opts: &SearchOptions) -> RunReport {
    let region = solve::global_region();
    let lists = solve::count_solutions(&region, pr, opts.tol);
    let conclusive = lists.conclusive();
    let wrap = |v: &[PBox]| BoxList {
        count: v.len(),
        records: v.iter().map(|b| BoxRecord { phase: *b, param: *pr }).collect(),
    };
    let mut out = Lists {
        small: wrap(&lists.small),
        no: wrap(&lists.no),
        yes: wrap(&lists.yes),
        tight: wrap(&lists.tight),
        ndt: wrap(&lists.ndt),
        ..Default::default()
    };
    out.no.records.truncate(opts.record_limit);
    out.ndt.records.truncate(opts.record_limit);
    RunReport {
        strategy: Strategy::Count,
        param: *pr,
        tol: opts.tol,
        regions: vec![Region { name: "C".into(), bx: region }],
        inner_region: None,
        param_tolerances: None,
        solution_count: conclusive.then_some(lists.yes.len()),
        lists: out,
        unordered_count: 0,
        small_mass_certificates: 0,
        outer_conclusive: conclusive,
        inner_conclusive: None,
        conclusive,
        connectivity: None,
    }
}

// ---------------------------------------------------------------------------
// Strategy 2
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Unordered,
    NoZero,
    Determinant,
    Lemma,
    SmallMass,
    Undecided,
}

/// Exclusion or determinant test over `b × pr`, with the Jacobian for the
/// split heuristic.
fn resolved_by_enclosure(b: &PBox, pr: &ParamRect) -> (Option<Step>, Option<[[Interval; 2]; 2]>) {
    let Ok(e) = potential::evaluate(b, pr) else { return (None, None) };
    if !e.f[0].contains_zero() || !e.f[1].contains_zero() {
        return (Some(Step::NoZero), None);
    }
    if !potential::det(&e.jac).contains_zero() {
        return (Some(Step::Determinant), None);
    }
    (None, Some(e.jac))
}

fn classify_step(b: &PBox, pr: &ParamRect, ctx: Option<&SmallMassContext>) -> (Step, Option<[[Interval; 2]; 2]>) {
    if ordered_filter(pr) == Ordering::AllUnordered {
        return (Step::Unordered, None);
    }
    let masses = pr.masses();
    if potential::excluded_by_lemmas(b, &masses) {
        return (Step::Lemma, None);
    }
    if let Some(ctx) = ctx {
        let d = potential::primary_distances(b);
        for (k, which) in [LightPrimary::P1, LightPrimary::P2].into_iter().enumerate() {
            if d[k].hi() <= DISK_RADIUS && ctx.certify(pr, which) {
                return (Step::SmallMass, None);
            }
        }
    }
    match resolved_by_enclosure(b, pr) {
        (Some(step), _) => (step, None),
        (None, jac) => (Step::Undecided, jac),
    }
}

/// Parameter axis to split: the one moving the masses the most.
fn param_axis(pr: &ParamRect) -> usize {
    let ws = pr.s.width() * pr.t.mag();
    let wt = pr.t.width();
    if ws >= wt {
        0
    } else {
        1
    }
}

/// Dimension of `(r, φ, s, t)` to split: the largest share of the spread
/// of `F` over the box (maximal smear), among the dimensions still above
/// their stopping widths.
fn smear_dimension(b: &PBox, p: &ParamRect, jac: Option<[[Interval; 2]; 2]>, opts: &SearchOptions) -> Option<usize> {
    let w = [b[0].width(), b[1].width(), p.s.width(), p.t.width()];
    let open = [w[0] >= opts.tol, w[1] >= opts.tol, w[2] > opts.param_floor, w[3] > opts.param_floor];
    let mut score = [0.0f64; 4];
    if let (Some(j), Ok(pp)) = (jac, potential::param_partials(b, p)) {
        for i in 0..2 {
            let d = [j[i][0].mag(), j[i][1].mag(), pp[0][i].mag(), pp[1][i].mag()];
            let spread: f64 = (0..4).map(|k| d[k] * w[k]).sum();
            if spread.is_finite() && spread > 0.0 {
                for k in 0..4 {
                    score[k] += d[k] * w[k] / spread;
                }
            }
        }
    }
    if score.iter().all(|x| *x == 0.0) {
        // no usable derivatives (near a primary): geometric phase split
        score = [w[0], w[1] * b.r().mid().abs(), 0.0, 0.0];
    }
    (0..4).filter(|&k| open[k]).max_by(|&a, &c| score[a].total_cmp(&score[c]).then(c.cmp(&a)))
}

#[derive(Default)]
struct Stage2 {
    lists: Lists,
    unordered: usize,
    small_mass: usize,
}

fn no_bifurcation_dfs(seed: (PBox, ParamRect), opts: &SearchOptions, ctx: Option<&SmallMassContext>) -> Stage2 {
    let mut out = Stage2::default();
    let lim = opts.record_limit;
    let mut stack = vec![seed];
    while let Some((b, p)) = stack.pop() {
        let rec = BoxRecord { phase: b, param: p };
        let (step, jac) = classify_step(&b, &p, ctx);
        match step {
            Step::Unordered => out.unordered += 1,
            Step::NoZero => out.lists.no.push(rec, lim),
            Step::Determinant => out.lists.ndg.push(rec, lim),
            Step::Lemma => out.lists.ndt.push(rec, lim),
            Step::SmallMass => {
                out.small_mass += 1;
                out.lists.ndt.push(rec, lim);
            }
            Step::Undecided => match smear_dimension(&b, &p, jac, opts) {
                Some(k @ 0..=1) => {
                    let (l, r) = solve::split_box(&b, k);
                    stack.push((r, p));
                    stack.push((l, p));
                }
                Some(k) => {
                    let (l, r) = p.bisect(k - 2);
                    stack.push((b, r));
                    stack.push((b, l));
                }
                None => out.lists.small.push(rec, usize::MAX),
            },
        }
    }
    out
}

/// Strategy-2 search over `regions × pr`.
fn no_bifurcation_search(regions: &[PBox], pr: &ParamRect, opts: &SearchOptions) -> Stage2 {
    let ctx = opts.small_mass.then(small_masses::default_context);
    // fan out so independent subtrees can run in parallel
    let mut seeds: Vec<PBox> = regions.to_vec();
    for _ in 0..4 {
        seeds = seeds
            .iter()
            .flat_map(|b| {
                let (l, r) = solve::split_box(b, solve::split_axis(b));
                [l, r]
            })
            .collect();
    }
    let parts: Vec<Stage2> = seeds.par_iter().map(|b| no_bifurcation_dfs((*b, *pr), opts, ctx)).collect();
    let mut acc = Stage2::default();
    for p in parts {
        acc.lists = acc.lists.merge(p.lists, opts.record_limit);
        acc.unordered += p.unordered;
        acc.small_mass += p.small_mass;
    }
    acc.lists.canonicalize();
    acc
}

fn run_no_bifurcation(pr: &ParamRect, opts: &SearchOptions) -> RunReport {
    let region = solve::global_region();
    let st = no_bifurcation_search(&[region], pr, opts);
    let conclusive = st.lists.small.is_empty();
    RunReport {
        strategy: Strategy::NoBifurcation,
        param: *pr,
        tol: opts.tol,
        regions: vec![Region { name: "C".into(), bx: region }],
        inner_region: None,
        param_tolerances: None,
        lists: st.lists,
        unordered_count: st.unordered,
        small_mass_certificates: st.small_mass,
        outer_conclusive: conclusive,
        inner_conclusive: None,
        conclusive,
        solution_count: None,
        connectivity: None,
    }
}

// ---------------------------------------------------------------------------
// Strategy 3
// ---------------------------------------------------------------------------

/// The three outer regions where no bifurcation occurs for the strip
/// `t ∈ [0.55, 0.58]`.
pub fn outer_regions() -> Vec<Region> {
    let c = solve::global_region();
    let (r, phi) = (c.r(), c.phi());
    let mk = |name: &str, r: Interval, phi: Interval| Region { name: name.into(), bx: PBox::new([r, phi]) };
    vec![
        mk("C1", r, Interval::new(0.7, phi.hi())),
        mk("C2", r, Interval::new(phi.lo(), -0.2)),
        mk("C3", Interval::new(1.0, r.hi()), Interval::new(-0.2, 0.7)),
    ]
}

/// The inner region where bifurcations are resolved.
pub fn inner_region() -> Region {
    let c = solve::global_region();
    Region { name: "C0".into(), bx: PBox::new([Interval::new(c.r().lo(), 1.0), Interval::new(-0.2, 0.7)]) }
}

fn coarse_split(pr: &ParamRect, width: f64) -> Vec<ParamRect> {
    let mut out = Vec::new();
    let mut stack = vec![*pr];
    while let Some(p) = stack.pop() {
        if p.width() <= width {
            out.push(p);
        } else {
            let axis = if p.s.width() >= p.t.width() { 0 } else { 1 };
            let (l, r) = p.bisect(axis);
            stack.push(r);
            stack.push(l);
        }
    }
    out.sort_by(param_order);
    out
}

fn inner_dfs(seed: ParamRect, region: &PBox, limit: usize) -> Lists {
    let mut lists = Lists::default();
    let mut stack = vec![seed];
    while let Some(p) = stack.pop() {
        let order = ordered_filter(&p);
        if order == Ordering::AllUnordered {
            lists.s0.push(ParamRecord { param: p, components: vec![] }, limit);
            continue;
        }
        match bifurcation::classify_inner(region, &p) {
            // an unproven quadratic component usually resolves on halving
            InnerOutcome::Classified { class: InnerClass::S2, .. } if p.width() > INNER_PARAM_FLOOR => {
                let (l, r) = p.bisect(param_axis(&p));
                stack.push(r);
                stack.push(l);
            }
            InnerOutcome::Classified { class, .. }
                if class != InnerClass::S1 && order == Ordering::Mixed && p.width() > INNER_MIXED_REFINE =>
            {
                let (l, r) = p.bisect(param_axis(&p));
                stack.push(r);
                stack.push(l);
            }
            InnerOutcome::Classified { class, components } => {
                let rec = ParamRecord { param: p, components };
                match class {
                    InnerClass::S1 => lists.s1.push(rec, limit),
                    InnerClass::S2 => lists.s2.push(rec, limit),
                    InnerClass::S111 => lists.s111.push(rec, limit),
                    InnerClass::S210 => lists.s210.push(rec, limit),
                    InnerClass::S300 => lists.s300.push(rec, limit),
                }
            }
            InnerOutcome::Unresolved => {
                if p.width() <= INNER_PARAM_FLOOR {
                    lists.inner_small.push(ParamRecord { param: p, components: vec![] }, usize::MAX);
                } else {
                    let (l, r) = p.bisect(param_axis(&p));
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
    }
    lists
}

/// Box adjacency components of a list of parameter rectangles.
pub fn param_components(rects: &[ParamRect]) -> Vec<Vec<ParamRect>> {
    let n = rects.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if rects[i].touches(&rects[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<ParamRect>> = Default::default();
    for (i, r) in rects.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*r);
    }
    groups.into_values().collect()
}

/// Connectivity of the classified parameter lists. P1 and P2 are the
/// bifurcation-free strips below `t = 0.55` and above `t = 0.58`.
pub fn connectivity(lists: &Lists) -> Connectivity {
    let rects = |l: &ParamList| l.records.iter().map(|r| r.param).collect::<Vec<_>>();
    let s1 = param_components(&rects(&lists.s1));
    let s111 = param_components(&rects(&lists.s111));
    let s210 = param_components(&rects(&lists.s210));
    let s300 = param_components(&rects(&lists.s300));
    let meets_p1 = |c: &Vec<ParamRect>| c.iter().any(|p| p.t.lo() <= 0.55);
    let meets_p2 = |c: &Vec<ParamRect>| c.iter().any(|p| p.t.hi() >= 0.58);

    let mut comps: Vec<(&Vec<ParamRect>, bool)> = Vec::new();
    comps.extend(s1.iter().map(|c| (c, meets_p1(c))));
    comps.extend(s111.iter().map(|c| (c, meets_p2(c))));
    comps.extend(s210.iter().chain(&s300).map(|c| (c, false)));
    let adjacent = |a: &[ParamRect], b: &[ParamRect]| a.iter().any(|x| b.iter().any(|y| x.touches(y)));
    loop {
        let mut grew = false;
        for i in 0..comps.len() {
            if !comps[i].1 && (0..comps.len()).any(|j| comps[j].1 && adjacent(comps[i].0, comps[j].0)) {
                comps[i].1 = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    Connectivity {
        s1_components: s1.len(),
        s111_components: s111.len(),
        s210_components: s210.len(),
        s300_components: s300.len(),
        s1_meets_p1: s1.iter().any(meets_p1),
        s111_meets_p2: s111.iter().any(meets_p2),
        unanchored: comps.iter().filter(|c| !c.1).count(),
        complete: [&lists.s1, &lists.s111, &lists.s210, &lists.s300].iter().all(|l| !l.truncated()),
    }
}

fn run_resolve(pr: &ParamRect, opts: &SearchOptions) -> RunReport {
    let regions = outer_regions();
    let boxes: Vec<PBox> = regions.iter().map(|r| r.bx).collect();
    let outer = no_bifurcation_search(&boxes, pr, opts);
    let inner = inner_region();
    let seeds = coarse_split(pr, INNER_PARAM_COARSE);
    let parts: Vec<Lists> = seeds.par_iter().map(|p| inner_dfs(*p, &inner.bx, opts.record_limit)).collect();
    let mut lists = outer.lists;
    for p in parts {
        lists = lists.merge(p, opts.record_limit);
    }
    lists.canonicalize();
    let outer_conclusive = lists.small.is_empty();
    let inner_conclusive = lists.inner_small.is_empty();
    let conn = connectivity(&lists);
    RunReport {
        strategy: Strategy::Resolve,
        param: *pr,
        tol: opts.tol,
        regions,
        inner_region: Some(inner),
        param_tolerances: Some((INNER_PARAM_FLOOR, INNER_PARAM_COARSE)),
        unordered_count: outer.unordered,
        small_mass_certificates: outer.small_mass,
        outer_conclusive,
        inner_conclusive: Some(inner_conclusive),
        conclusive: outer_conclusive && inner_conclusive,
        solution_count: None,
        connectivity: Some(conn),
        lists,
    }
}

/// Runs one strategy on `pr`.
pub fn run_strategy(strategy: Strategy, pr: &ParamRect, opts: &SearchOptions) -> RunReport {
    match strategy {
        Strategy::Count => run_count(pr, opts),
        Strategy::NoBifurcation => run_no_bifurcation(pr, opts),
        Strategy::Resolve => run_resolve(pr, opts),
    }
}

// ---------------------------------------------------------------------------
// Full proof
// ---------------------------------------------------------------------------

/// The ten runs composing the proof: two point counts, P2, the four pieces
/// of P1 and the three pieces of P3.
pub fn proof_schedule() -> Vec<(Strategy, ParamRect)> {
    let e = 1e-6;
    let r = ParamRect::from_bounds;
    vec![
        (Strategy::Count, ParamRect::point(0.25, 0.25)),
        (Strategy::Count, ParamRect::point(0.45, 0.60)),
        (Strategy::NoBifurcation, r((0.0, 0.5), (0.58, 0.67))),
        (Strategy::NoBifurcation, r((0.0, e), (0.0, e))),
        (Strategy::NoBifurcation, r((e, 0.5), (0.0, e))),
        (Strategy::NoBifurcation, r((0.0, e), (e, 0.55))),
        (Strategy::NoBifurcation, r((e, 0.5), (e, 0.55))),
        (Strategy::Resolve, r((0.0, 0.2), (0.55, 0.58))),
        (Strategy::Resolve, r((0.2, 0.25), (0.55, 0.58))),
        (Strategy::Resolve, r((0.25, 0.5), (0.55, 0.58))),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofReport {
    pub runs: Vec<RunReport>,
    /// Connectivity of the strategy-3 lists merged over all of P3.
    pub connectivity: Connectivity,
    /// Strategy-1 counts, checked against 8 and 10.
    pub point_counts: Vec<Option<usize>>,
    /// Rectangles whose run was inconclusive.
    pub failures: Vec<ParamRect>,
    /// Every ordered mass has exactly 8, 9 or 10 relative equilibria.
    pub verdict: bool,
}

/// Runs `schedule` (normally [`proof_schedule`]) and checks the counting
/// argument.
pub fn full_proof_with(schedule: &[(Strategy, ParamRect)], opts: &SearchOptions) -> ProofReport {
    assemble_proof(schedule.iter().map(|(s, p)| run_strategy(*s, p, opts)).collect())
}

/// Aggregates finished schedule runs into the global verdict.
pub fn assemble_proof(runs: Vec<RunReport>) -> ProofReport {
    let failures: Vec<ParamRect> = runs.iter().filter(|r| !r.conclusive).map(|r| r.param).collect();
    let mut merged = Lists::default();
    for r in runs.iter().filter(|r| r.strategy == Strategy::Resolve) {
        merged = merged.merge(r.lists.clone(), usize::MAX);
    }
    let connectivity = connectivity(&merged);
    let point_counts: Vec<Option<usize>> =
        runs.iter().filter(|r| r.strategy == Strategy::Count).map(|r| r.solution_count).collect();
    let counts_ok = point_counts.iter().all(|c| matches!(c, Some(8..=10)));
    let verdict = failures.is_empty() && counts_ok && connectivity.verified() && merged.s2.is_empty();
    ProofReport { runs, connectivity, point_counts, failures, verdict }
}

pub fn full_proof(opts: &SearchOptions) -> ProofReport {
    full_proof_with(&proof_schedule(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_filter_examples() {
        assert_eq!(ordered_filter(&ParamRect::from_bounds((0.4, 0.5), (0.66, 0.67))), Ordering::Mixed);
        assert_eq!(ordered_filter(&ParamRect::from_bounds((0.0, 0.5), (0.0, 0.5))), Ordering::AllOrdered);
        assert_eq!(ordered_filter(&ParamRect::from_bounds((0.0, 0.4), (0.6667, 0.6668))), Ordering::AllUnordered);
        assert_eq!(ordered_filter(&ParamRect::from_bounds((0.6, 0.7), (0.0, 0.1))), Ordering::AllUnordered);
    }

    #[test]
    fn ordered_filter_matches_masses() {
        for i in 0..=20 {
            for j in 0..=20 {
                let (s, t) = (i as f64 / 40.0, j as f64 / 30.0);
                let m = ParamRect::point(s, t).masses();
                let ordered = m.m1.mid() <= m.m2.mid() && m.m2.mid() <= m.m3.mid() + 1e-12;
                let class = ordered_filter(&ParamRect::point(s, t));
                if ordered {
                    assert_ne!(class, Ordering::AllUnordered, "{s} {t}");
                } else {
                    assert_ne!(class, Ordering::AllOrdered, "{s} {t}");
                }
            }
        }
    }

    #[test]
    fn record_list_caps_storage_not_count() {
        let mut l: RecordList<u32> = RecordList::default();
        for k in 0..10 {
            l.push(k, 4);
        }
        assert_eq!(l.len(), 10);
        assert_eq!(l.records.len(), 4);
        assert!(l.truncated());
    }

    #[test]
    fn regions_cover_configuration_space() {
        let mut all: Vec<PBox> = outer_regions().iter().map(|r| r.bx).collect();
        all.push(inner_region().bx);
        let c = solve::global_region();
        // sample points land in some region
        for i in 0..50 {
            for j in 0..50 {
                let r = c.r().lo() + c.r().width() * (i as f64 + 0.5) / 50.0;
                let p = c.phi().lo() + c.phi().width() * (j as f64 + 0.5) / 50.0;
                assert!(all.iter().any(|b| b.r().contains(r) && b.phi().contains(p)), "{r} {p}");
            }
        }
    }

    #[test]
    fn param_components_connects_touching() {
        let a = ParamRect::from_bounds((0.0, 0.1), (0.0, 0.1));
        let b = ParamRect::from_bounds((0.1, 0.2), (0.1, 0.2));
        let c = ParamRect::from_bounds((0.3, 0.4), (0.0, 0.1));
        assert_eq!(param_components(&[a, b, c]).len(), 2);
    }

    #[test]
    fn strategy_one_quarter_point() {
        let r = run_strategy(Strategy::Count, &ParamRect::point(0.25, 0.25), &SearchOptions::new(1e-6));
        assert!(r.conclusive);
        assert_eq!(r.solution_count, Some(8));
        assert_eq!(r.lists.yes.len(), r.lists.tight.len());
    }

    #[test]
    fn strategy_two_small_rectangle() {
        let pr = ParamRect::from_bounds((0.3, 0.31), (0.4, 0.41));
        let r = run_strategy(Strategy::NoBifurcation, &pr, &SearchOptions::new(1e-6));
        assert!(r.conclusive);
        assert!(r.lists.ndg.len() >= 10);
        assert_eq!(r.unordered_count, 0);
    }
}
