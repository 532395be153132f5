use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};

use super::cutting_plane::{cutting_plane_loop, Incumbent, NodeOutcome, SearchContext};
use super::node::{
    extract_partition, k_colorable, select_branching_pair_excluding, separate, shrink_merge,
    BranchChoice, Node,
};
use super::report::{NodeDecision, NodeRecord, RootSummary, SearchStatus, SolveReport};
use crate::config::RunConfig;
use crate::cuts::CutPool;
use crate::dataset::{mssc_objective, Assignment, DataMatrix};
use crate::error::{Error, Result};
use crate::heuristic::{multistart_baseline, InitKind};
use crate::sdp::WarmStart;

/// Everything a solve produced: the report, root statistics and one record
/// per created node (sorted by id).
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub report: SolveReport,
    pub root: RootSummary,
    pub nodes: Vec<NodeRecord>,
}

struct Open {
    node: Node,
    parent: Option<usize>,
}

impl Open {
    fn key(&self) -> (f64, usize, usize) {
        (self.node.lb, self.node.depth, self.node.id)
    }
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    // BinaryHeap pops the maximum: smallest bound, then deepest, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        let (la, da, ia) = self.key();
        let (lb, db, ib) = other.key();
        lb.total_cmp(&la).then(da.cmp(&db)).then(ib.cmp(&ia))
    }
}

struct Shared {
    heap: BinaryHeap<Open>,
    active: HashMap<usize, f64>,
    closed_min: f64,
    next_id: usize,
    records: Vec<NodeRecord>,
    root: Option<RootSummary>,
    stop: bool,
    timed_out: bool,
    error: Option<Error>,
}

struct Processed {
    record: NodeRecord,
    /// Bound of a closed node; `None` when it branched or is infeasible.
    closed_lb: Option<f64>,
    children: Vec<Node>,
    root: Option<RootSummary>,
}

fn record(ctx: &SearchContext, node: &Node, parent: Option<usize>, decision: NodeDecision) -> NodeRecord {
    let keep = ctx.cfg.record_nodes;
    NodeRecord {
        id: node.id,
        parent,
        depth: node.depth,
        m: node.m(),
        lb: node.lb.is_finite().then_some(node.lb),
        decision,
        rounds: 0,
        cuts: node.pool.len(),
        sdp_iterations: 0,
        groups: keep.then(|| node.groups.clone()),
        cl_global: keep.then(|| node.cl_global.clone()),
        heuristic: Vec::new(),
    }
}

fn feasible(node: &Node, k: usize) -> bool {
    node.m() >= k
        && node
            .local_cannot_link()
            .is_ok_and(|cl| k_colorable(node.m(), &cl, k))
}

/// Heuristic values are rescored on the original data so they compare
/// exactly with baselines computed there.
fn root_summary(ctx: &SearchContext, outcome: &NodeOutcome) -> Result<RootSummary> {
    let values = outcome
        .heuristic
        .iter()
        .map(|h| mssc_objective(ctx.original, &h.labels))
        .collect::<Result<Vec<f64>>>()?;
    Ok(RootSummary {
        lb0: outcome.lbs.first().copied().unwrap_or(outcome.lb),
        lb_cp: outcome.lb,
        ub_0: values.first().copied(),
        ub_cp: values.iter().copied().reduce(f64::min),
        rounds: outcome.rounds,
        cuts: outcome.cuts_final(),
        lbs: outcome.lbs.clone(),
    })
}

/// Exact value of a node whose groups are the clusters (`m == k`) or that
/// has a single cluster.
fn evaluate_leaf(ctx: &SearchContext, node: &Node) -> Result<f64> {
    let labels = if ctx.cfg.k == 1 {
        Assignment {
            labels: vec![0; node.n()],
            k: 1,
        }
    } else {
        node.group_assignment()
    };
    let f = mssc_objective(ctx.data, &labels)?;
    ctx.offer(&labels, f);
    Ok(f)
}

fn process(ctx: &SearchContext, node: Node, parent: Option<usize>) -> Result<Processed> {
    let k = ctx.cfg.k;
    if ctx.prunable(node.lb) {
        return Ok(Processed {
            record: record(ctx, &node, parent, NodeDecision::PrunedOnArrival),
            closed_lb: Some(node.lb),
            children: Vec::new(),
            root: None,
        });
    }
    if node.m() == k || k == 1 {
        let f = evaluate_leaf(ctx, &node)?;
        let mut rec = record(ctx, &node, parent, NodeDecision::Leaf);
        rec.lb = Some(f);
        let root = (node.depth == 0).then(|| RootSummary {
            lb0: f,
            lb_cp: f,
            ub_0: None,
            ub_cp: None,
            rounds: 0,
            cuts: 0,
            lbs: vec![f],
        });
        return Ok(Processed {
            record: rec,
            closed_lb: Some(f),
            children: Vec::new(),
            root,
        });
    }

    let outcome = cutting_plane_loop(ctx, &node)?;
    let root = (node.depth == 0).then(|| root_summary(ctx, &outcome)).transpose()?;
    let mut rec = record(ctx, &node, parent, NodeDecision::Pruned);
    rec.lb = Some(outcome.lb);
    rec.rounds = outcome.rounds;
    rec.cuts = outcome.cuts_final();
    rec.sdp_iterations = outcome.sdp_iterations;
    if ctx.cfg.record_nodes {
        rec.heuristic = outcome.heuristic.iter().map(|h| h.labels.labels.clone()).collect();
    }
    let closed = |rec: NodeRecord| Processed {
        record: rec,
        closed_lb: Some(outcome.lb),
        children: Vec::new(),
        root: root.clone(),
    };
    let Some((problem, sol)) = outcome.last.as_ref() else {
        return Ok(closed(rec));
    };
    if outcome.pruned {
        return Ok(closed(rec));
    }

    let (pair, integral) = match select_branching_pair_excluding(&sol.z, &problem.cannot_link) {
        BranchChoice::Pair { i, j, .. } => ((i, j), false),
        BranchChoice::Integral { best } => {
            if let Some(local) = extract_partition(&sol.z, k) {
                if problem.cannot_link.iter().all(|&(a, b)| local[a] != local[b]) {
                    let labels = Assignment {
                        labels: node.local_index().iter().map(|&r| local[r]).collect(),
                        k,
                    };
                    if let Ok(f) = mssc_objective(ctx.data, &labels) {
                        ctx.offer(&labels, f);
                    }
                }
            }
            if ctx.prunable(outcome.lb) {
                return Ok(closed(rec));
            }
            match best {
                Some((i, j, _)) => ((i, j), true),
                None => return Ok(closed(rec)),
            }
        }
    };

    let mut base = node.clone();
    base.pool = outcome.pool.clone();
    base.lb = outcome.lb;
    base.warm = Some(WarmStart::from_solution(problem, sol));
    let must = shrink_merge(&base, pair)?;
    let cannot = separate(&base, pair);
    rec.decision = NodeDecision::Branched {
        i: pair.0,
        j: pair.1,
        integral,
    };
    Ok(Processed {
        record: rec,
        closed_lb: None,
        children: vec![must, cannot],
        root,
    })
}

fn log_node(rec: &NodeRecord, ub: f64) {
    log::info!(
        "node {} depth {} m {} lb {} ub {ub:.10} cp {} cuts {} sdp-it {} {:?}",
        rec.id,
        rec.depth,
        rec.m,
        rec.lb.map_or("infeasible".to_string(), |l| format!("{l:.10}")),
        rec.rounds,
        rec.cuts,
        rec.sdp_iterations,
        rec.decision
    );
}

fn integrate(ctx: &SearchContext, s: &mut Shared, p: Processed) {
    log_node(&p.record, ctx.upper_bound());
    let parent = p.record.id;
    if let Some(lb) = p.closed_lb {
        s.closed_min = s.closed_min.min(lb);
    }
    if p.root.is_some() {
        s.root = p.root;
    }
    s.records.push(p.record);
    for mut child in p.children {
        child.id = s.next_id;
        s.next_id += 1;
        if feasible(&child, ctx.cfg.k) {
            s.heap.push(Open {
                node: child,
                parent: Some(parent),
            });
        } else {
            let mut rec = record(ctx, &child, Some(parent), NodeDecision::Infeasible);
            rec.lb = None;
            log_node(&rec, ctx.upper_bound());
            s.records.push(rec);
        }
    }
}

fn worker(ctx: &SearchContext, shared: &Mutex<Shared>, cv: &Condvar) {
    loop {
        let open = {
            let mut g = shared.lock();
            loop {
                if g.stop {
                    return;
                }
                if ctx.timed_out() {
                    g.stop = true;
                    g.timed_out = true;
                    cv.notify_all();
                    return;
                }
                if let Some(o) = g.heap.pop() {
                    g.active.insert(o.node.id, o.node.lb);
                    break o;
                }
                if g.active.is_empty() {
                    g.stop = true;
                    cv.notify_all();
                    return;
                }
                cv.wait(&mut g);
            }
        };
        let id = open.node.id;
        let result = process(ctx, open.node, open.parent);
        let mut g = shared.lock();
        g.active.remove(&id);
        match result {
            Ok(p) => integrate(ctx, &mut g, p),
            Err(e) => {
                g.error.get_or_insert(e);
                g.stop = true;
            }
        }
        cv.notify_all();
    }
}

fn relative_gap(ub: f64, lb: f64) -> f64 {
    if ub > 0.0 {
        ((ub - lb) / ub).max(0.0)
    } else {
        0.0
    }
}

/// Solves the MSSC problem on `data` with `cfg.k` clusters to the configured
/// gap.
pub fn solve_exact(data: &DataMatrix, cfg: &RunConfig) -> Result<SolveReport> {
    Ok(solve_exact_detailed(data, cfg)?.report)
}

/// [`solve_exact`] that also returns root statistics and the node log.
pub fn solve_exact_detailed(data: &DataMatrix, cfg: &RunConfig) -> Result<SolveOutcome> {
    let start = Instant::now();
    let n = data.n();
    cfg.validate(n)?;
    let centered = data.centered();
    let trace_w = gram_trace(&centered);
    let incumbent = Mutex::new(Incumbent::empty());
    if cfg.initial_restarts > 0 {
        let (a, f) = multistart_baseline(&centered, cfg.k, cfg.initial_restarts, cfg.seed, InitKind::PlusPlus);
        incumbent.lock().offer(&a, f);
    }
    let ctx = SearchContext {
        data: &centered,
        original: data,
        trace_w,
        cfg,
        gap_tol: cfg.gap_tol_for(n),
        deadline: cfg.time_limit.map(|t| start + Duration::from_secs_f64(t)),
        incumbent: &incumbent,
    };

    let mut heap = BinaryHeap::new();
    heap.push(Open {
        node: Node::root(n, CutPool::new(cfg.eps_viol, cfg.eps_act)),
        parent: None,
    });
    let shared = Mutex::new(Shared {
        heap,
        active: HashMap::new(),
        closed_min: f64::INFINITY,
        next_id: 1,
        records: Vec::new(),
        root: None,
        stop: false,
        timed_out: false,
        error: None,
    });
    let cv = Condvar::new();
    if cfg.workers == 1 {
        worker(&ctx, &shared, &cv);
    } else {
        std::thread::scope(|s| {
            for _ in 0..cfg.workers {
                s.spawn(|| worker(&ctx, &shared, &cv));
            }
        });
    }

    let mut s = shared.into_inner();
    if let Some(e) = s.error.take() {
        return Err(e);
    }
    let mut open_min = f64::INFINITY;
    for o in s.heap.drain() {
        open_min = open_min.min(o.node.lb);
        let rec = record(&ctx, &o.node, o.parent, NodeDecision::Open);
        s.records.push(rec);
    }
    s.records.sort_by_key(|r| r.id);

    let inc = incumbent.lock().clone();
    let labels = inc
        .labels
        .ok_or_else(|| Error::InvalidConfig("search ended without a feasible partition".into()))?
        .canonical();
    let f_opt = mssc_objective(data, &labels)?;
    let lb = s.closed_min.min(open_min).min(f_opt).max(0.0);
    let gap = relative_gap(f_opt, lb);
    let root = s.root.unwrap_or(RootSummary {
        lb0: lb,
        lb_cp: lb,
        ub_0: None,
        ub_cp: None,
        rounds: 0,
        cuts: 0,
        lbs: Vec::new(),
    });
    let status = if gap <= ctx.gap_tol * (1.0 + 1e-9) {
        SearchStatus::Certified
    } else {
        SearchStatus::GapLimited
    };
    if s.timed_out {
        log::warn!("time limit reached with gap {gap:.3e}");
    }
    let report = SolveReport {
        f_opt,
        labels,
        lb,
        gap,
        nodes: s.records.len(),
        cp_root: root.rounds,
        cuts_cp_root: root.cuts,
        gap0: relative_gap(f_opt, root.lb0),
        gap_cp: relative_gap(f_opt, root.lb_cp),
        wall_time: start.elapsed().as_secs_f64(),
        status,
    };
    Ok(SolveOutcome {
        report,
        root,
        nodes: s.records,
    })
}

fn gram_trace(data: &DataMatrix) -> f64 {
    data.points().norm_squared()
}

/// Runs only the root cutting-plane loop with no starting incumbent, so the
/// upper bounds come from the relaxation heuristic alone.
pub fn root_bound(data: &DataMatrix, cfg: &RunConfig) -> Result<RootSummary> {
    let n = data.n();
    cfg.validate(n)?;
    let centered = data.centered();
    let incumbent = Mutex::new(Incumbent::empty());
    let ctx = SearchContext {
        data: &centered,
        original: data,
        trace_w: gram_trace(&centered),
        cfg,
        gap_tol: cfg.gap_tol_for(n),
        deadline: cfg.time_limit.map(|t| Instant::now() + Duration::from_secs_f64(t)),
        incumbent: &incumbent,
    };
    let root = Node::root(n, CutPool::new(cfg.eps_viol, cfg.eps_act));
    if n == cfg.k || cfg.k == 1 {
        let f = evaluate_leaf(&ctx, &root)?;
        return Ok(RootSummary {
            lb0: f,
            lb_cp: f,
            ub_0: Some(f),
            ub_cp: Some(f),
            rounds: 0,
            cuts: 0,
            lbs: vec![f],
        });
    }
    root_summary(&ctx, &cutting_plane_loop(&ctx, &root)?)
}
