use std::time::Instant;

use parking_lot::Mutex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::node::Node;
use crate::config::RunConfig;
use crate::cuts::{purge_inactive, separate_cliques, separate_pairs_triangles, CutPool};
use crate::dataset::{Assignment, DataMatrix};
use crate::error::Result;
use crate::heuristic::{cop_kmeans, kmeans_pp_init, sdp_init, ConstraintSet, CopResult};
use crate::safe_bound::safe_lower_bound;
use crate::sdp::{solve_with, SdpSolution, ShrunkProblem, SolverOptions, WarmStart};

/// Best partition found so far, valued on the centered data.
#[derive(Debug, Clone)]
pub struct Incumbent {
    pub value: f64,
    pub labels: Option<Assignment>,
}

impl Incumbent {
    pub fn empty() -> Self {
        Self {
            value: f64::INFINITY,
            labels: None,
        }
    }

    /// Takes `(a, f)` when it improves the value. Returns true if it did.
    pub fn offer(&mut self, a: &Assignment, f: f64) -> bool {
        if f < self.value {
            self.value = f;
            self.labels = Some(a.clone());
            true
        } else {
            false
        }
    }
}

/// Read-only inputs shared by every node.
pub struct SearchContext<'a> {
    /// Centered data; all node problems are built from it.
    pub data: &'a DataMatrix,
    /// The data as given, for reported objective values.
    pub original: &'a DataMatrix,
    pub trace_w: f64,
    pub cfg: &'a RunConfig,
    pub gap_tol: f64,
    pub deadline: Option<Instant>,
    pub incumbent: &'a Mutex<Incumbent>,
}

impl SearchContext<'_> {
    pub fn upper_bound(&self) -> f64 {
        self.incumbent.lock().value
    }

    pub fn prunable(&self, lb: f64) -> bool {
        prunable(lb, self.upper_bound(), self.gap_tol)
    }

    pub fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Offers a partition to the incumbent.
    pub fn offer(&self, a: &Assignment, f: f64) -> bool {
        let improved = self.incumbent.lock().offer(a, f);
        if improved {
            log::debug!("new incumbent {f:.10}");
        }
        improved
    }
}

/// `(ub - lb) / ub <= tol`, written so that `ub = 0` still works.
pub fn prunable(lb: f64, ub: f64, tol: f64) -> bool {
    ub.is_finite() && ub - lb <= tol * ub.abs()
}

/// One run of the relaxation-guided heuristic.
#[derive(Debug, Clone)]
pub struct HeuristicRun {
    pub labels: Assignment,
    pub value: f64,
}

/// What the cutting-plane loop learned about one node.
#[derive(Debug)]
pub struct NodeOutcome {
    /// Best valid bound: the larger of the inherited one and every safe bound.
    pub lb: f64,
    /// Safe bound of each solve, in order.
    pub lbs: Vec<f64>,
    pub pruned: bool,
    /// Rounds in which cuts were added and the relaxation solved again.
    pub rounds: usize,
    pub cuts_added: usize,
    pub cuts_purged: usize,
    pub sdp_iterations: usize,
    /// Pool of the last solve.
    pub pool: CutPool,
    pub last: Option<(ShrunkProblem, SdpSolution)>,
    pub heuristic: Vec<HeuristicRun>,
}

impl NodeOutcome {
    pub fn cuts_final(&self) -> usize {
        self.last.as_ref().map_or(0, |(p, _)| p.cuts.len())
    }
}

fn node_seed(seed: u64, id: usize) -> u64 {
    seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn heuristic(ctx: &SearchContext, node: &Node, z: &nalgebra::DMatrix<f64>) -> Option<HeuristicRun> {
    let k = ctx.cfg.k;
    let seed = node_seed(ctx.cfg.seed, node.id);
    let init = sdp_init(z, &node.groups, ctx.data, k, seed)
        .unwrap_or_else(|| kmeans_pp_init(ctx.data, k, seed));
    let cons = ConstraintSet::from_groups(&node.groups, &node.cl_global);
    match cop_kmeans(ctx.data, &init, &cons, 100) {
        CopResult::Partition(labels, value) => Some(HeuristicRun { labels, value }),
        CopResult::EmptyPartition => None,
    }
}

/// Bounds `node` by solving its relaxation, adding violated cuts until the
/// bound stalls, the node can be pruned, or the round cap is reached.
pub fn cutting_plane_loop(ctx: &SearchContext, node: &Node) -> Result<NodeOutcome> {
    let cfg = ctx.cfg;
    let root = node.depth == 0;
    let (cp_max, eps_cp) = if root {
        (cfg.cp_max_root, cfg.eps_cp_root)
    } else {
        (cfg.cp_max_child, cfg.eps_cp_child)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(node.id as u64);

    let mut current = node.clone();
    let mut warm = node.warm.clone();
    let mut out = NodeOutcome {
        lb: node.lb,
        lbs: Vec::new(),
        pruned: false,
        rounds: 0,
        cuts_added: 0,
        cuts_purged: 0,
        sdp_iterations: 0,
        pool: node.pool.clone(),
        last: None,
        heuristic: Vec::new(),
    };

    loop {
        let problem = current.problem(ctx.data, ctx.trace_w, cfg.k)?;
        let ub = ctx.upper_bound();
        let opts = SolverOptions {
            tol: cfg.sdp_tol,
            max_iter: cfg.sdp_max_iter,
            prune_target: ub.is_finite().then(|| ub - ctx.gap_tol * ub.abs()),
            deadline: ctx.deadline,
            ..SolverOptions::default()
        };
        let sol = solve_with(&problem, &opts, warm.as_ref())?;
        out.sdp_iterations += sol.iterations;
        let rep = safe_lower_bound(&problem, &sol)?;
        let lb_it = sol.best_checked_lb.map_or(rep.lb_mssc, |b| b.max(rep.lb_mssc));
        log::debug!(
            "node {} round {}: m {} cuts {} lb {lb_it:.10} ({:?}, {} it)",
            node.id,
            out.rounds,
            problem.m(),
            problem.cuts.len(),
            sol.status,
            sol.iterations
        );
        let prev = out.lbs.last().copied();
        out.lbs.push(lb_it);
        out.lb = out.lb.max(lb_it);

        if root || out.lbs.len() == 1 {
            if let Some(h) = heuristic(ctx, &current, &sol.z) {
                ctx.offer(&h.labels, h.value);
                out.heuristic.push(h);
            }
        }

        let z = sol.z.clone();
        let duals = sol.cut_duals();
        out.pool = problem.cuts.clone();
        warm = Some(WarmStart::from_solution(&problem, &sol));
        out.last = Some((problem, sol));

        if ctx.prunable(out.lb) {
            out.pruned = true;
            break;
        }
        if out.rounds >= cp_max || ctx.timed_out() {
            break;
        }
        if let Some(prev) = prev {
            if lb_it < prev {
                log::debug!("node {}: bound decreased, stopping cuts", node.id);
                break;
            }
            if (lb_it - prev).abs() <= eps_cp * prev.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }

        let mut pool = purge_inactive(&current.pool, &z, Some(&duals));
        out.cuts_purged += current.pool.len() - pool.len();
        let mut fresh = separate_pairs_triangles(&z, &pool, cfg.budget_t, cfg.keep_fraction, &mut rng);
        fresh.extend(separate_cliques(&z, cfg.k, ctx.data.n(), &pool));
        let added = pool.extend(fresh);
        if added == 0 {
            break;
        }
        out.cuts_added += added;
        out.rounds += 1;
        current.pool = pool;
    }
    Ok(out)
}
