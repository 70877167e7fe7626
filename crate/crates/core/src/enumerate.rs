//! Maximal halfspace families up to coordinate permutation.
//!
//! Every maximal halfspace support `I(r)>=0` is cut out by a hyperplane
//! through the barycenter and `n - 1` simplex points, so it suffices to run
//! over all `(n-1)`-subsets of the simplex, keep the normals that are
//! monotone (which removes the symmetric-group redundancy), orient them
//! descending, and take the maximal elements of the resulting supports.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{hull_locate, HullVerdict};
use crate::lattice::{halfspace_support_raw, SimplexContext, SupportSet, WeightVector};
use crate::linalg::{Echelon, MAX_COLS};

/// One maximal family `I(r)>=0` with a monotone descending reduced `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalFamily {
    /// Lexicographically largest vector among `alternates`.
    pub vector: WeightVector,
    /// Every monotone reduced vector found for this support, descending.
    pub alternates: Vec<WeightVector>,
    pub support: SupportSet,
    /// Position of the barycenter, filled in by [`split_by_eta`].
    pub hull: Option<HullVerdict>,
}

impl MaximalFamily {
    pub fn eta_in_hull(&self) -> Option<bool> {
        self.hull.map(|h| h != HullVerdict::Outside)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// Point subsets whose span with the barycenter has full dimension.
    pub full_rank_subsets: u64,
    /// Partial subsets discarded by the incremental rank check.
    pub pruned_prefixes: u64,
    pub monotone_normals: u64,
    pub distinct_supports: u64,
}

impl std::ops::AddAssign for EnumerationStats {
    fn add_assign(&mut self, o: Self) {
        self.full_rank_subsets += o.full_rank_subsets;
        self.pruned_prefixes += o.pruned_prefixes;
        self.monotone_normals += o.monotone_normals;
        self.distinct_supports += o.distinct_supports;
    }
}

#[derive(Default)]
pub struct EnumerateOptions<'a> {
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
    /// Called with `(finished, total)` outer slices.
    pub progress: Option<&'a (dyn Fn(usize, usize) + Sync)>,
}

pub fn enumerate_maximal(ctx: &SimplexContext) -> Result<Vec<MaximalFamily>> {
    Ok(enumerate_maximal_with(ctx, &EnumerateOptions::default())?.0)
}

type Candidates = HashMap<SupportSet, BTreeSet<WeightVector>>;

struct Slice {
    ctx_points: Vec<[i64; MAX_COLS]>,
    cols: usize,
    seen: HashSet<[i64; MAX_COLS]>,
    found: Candidates,
    stats: EnumerationStats,
}

impl Slice {
    /// Chooses `remaining` more points with indices below `upper`, in
    /// colexicographic order.
    fn descend(&mut self, ctx: &SimplexContext, state: &Echelon, upper: usize, remaining: usize) {
        if remaining == 0 {
            self.stats.full_rank_subsets += 1;
            if let Some(normal) = state.kernel_line() {
                self.record(ctx, normal);
            }
            return;
        }
        for idx in (remaining - 1)..upper {
            let mut next = *state;
            if next.push(&self.ctx_points[idx][..self.cols]) {
                self.descend(ctx, &next, idx, remaining - 1);
            } else {
                self.stats.pruned_prefixes += 1;
            }
        }
    }

    fn record(&mut self, ctx: &SimplexContext, mut normal: [i64; MAX_COLS]) {
        let r = &mut normal[..self.cols];
        let descending = r.windows(2).all(|w| w[0] >= w[1]);
        let ascending = r.windows(2).all(|w| w[0] <= w[1]);
        if !descending && !ascending {
            return;
        }
        if !descending {
            r.iter_mut().for_each(|x| *x = -*x);
        }
        self.stats.monotone_normals += 1;
        if !self.seen.insert(normal) {
            return;
        }
        let r = normal[..self.cols].to_vec();
        let support = halfspace_support_raw(ctx, &r, false);
        let v = WeightVector::new(r).expect("kernel of the all-ones row is weight 0 and nonzero");
        self.found.entry(support).or_default().insert(v);
    }
}

/// Runs the subset search and returns the canonical antichain.
pub fn enumerate_maximal_with(
    ctx: &SimplexContext,
    opts: &EnumerateOptions<'_>,
) -> Result<(Vec<MaximalFamily>, EnumerationStats)> {
    let cols = ctx.nvars();
    if cols > MAX_COLS {
        return Err(Error::Unsupported(format!("enumeration supports at most {MAX_COLS} variables")));
    }
    let k = ctx.n() - 1;
    let points: Vec<[i64; MAX_COLS]> = ctx
        .monomials()
        .iter()
        .map(|m| {
            let mut p = [0i64; MAX_COLS];
            for (j, &e) in m.0.iter().enumerate() {
                p[j] = e as i64;
            }
            p
        })
        .collect();
    let mut base = Echelon::new(cols);
    base.push(&vec![1i64; cols]);

    let run_slice = |top: Option<usize>| -> (Candidates, EnumerationStats) {
        let mut slice = Slice {
            ctx_points: points.clone(),
            cols,
            seen: HashSet::new(),
            found: HashMap::new(),
            stats: EnumerationStats::default(),
        };
        match top {
            None => slice.descend(ctx, &base, 0, 0),
            Some(top) => {
                let mut state = base;
                if state.push(&points[top][..cols]) {
                    slice.descend(ctx, &state, top, k - 1);
                } else {
                    slice.stats.pruned_prefixes += 1;
                }
            }
        }
        (slice.found, slice.stats)
    };

    let tops: Vec<Option<usize>> = if k == 0 { vec![None] } else { ((k - 1)..ctx.len()).map(Some).collect() };
    let done = AtomicUsize::new(0);
    let total = tops.len();
    let work = || -> Vec<(Candidates, EnumerationStats)> {
        tops.par_iter()
            .map(|&t| {
                let out = run_slice(t);
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(cb) = opts.progress {
                    cb(finished, total);
                }
                out
            })
            .collect()
    };
    let parts = if opts.workers == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::ResourceExhausted(format!("cannot start worker pool: {e}")))?
            .install(work)
    };

    let mut merged: Candidates = HashMap::new();
    let mut stats = EnumerationStats::default();
    for (found, s) in parts {
        stats += s;
        for (support, vs) in found {
            merged.entry(support).or_default().extend(vs);
        }
    }
    stats.distinct_supports = merged.len() as u64;
    Ok((canonical_antichain(merged), stats))
}

/// Maximal elements of the candidate supports, sorted by representative
/// vector in descending lexicographic order.
fn canonical_antichain(candidates: Candidates) -> Vec<MaximalFamily> {
    let mut all: Vec<(SupportSet, BTreeSet<WeightVector>)> = candidates.into_iter().collect();
    all.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    let mut kept: Vec<(SupportSet, BTreeSet<WeightVector>)> = Vec::new();
    for (s, vs) in all {
        if !kept.iter().any(|(k, _)| s.is_subset(k)) {
            kept.push((s, vs));
        }
    }
    let mut families: Vec<MaximalFamily> = kept
        .into_iter()
        .map(|(support, vs)| {
            let alternates: Vec<WeightVector> = vs.into_iter().rev().collect();
            MaximalFamily { vector: alternates[0].clone(), alternates, support, hull: None }
        })
        .collect();
    families.sort_by(|a, b| b.vector.cmp(&a.vector));
    families
}

/// Independent check: scans every descending reduced weight-0 vector with
/// entries in `[-bound, bound]`.
pub fn brute_force_oracle(ctx: &SimplexContext, bound: i64) -> Result<Vec<MaximalFamily>> {
    if bound < 1 {
        return Err(Error::InvalidBound);
    }
    let nv = ctx.nvars();
    let mut found: Candidates = HashMap::new();
    let mut current = vec![0i64; nv];
    scan_descending(ctx, &mut current, 0, bound, 0, bound, &mut found);
    Ok(canonical_antichain(found))
}

fn scan_descending(
    ctx: &SimplexContext,
    current: &mut Vec<i64>,
    pos: usize,
    cap: i64,
    partial: i64,
    bound: i64,
    found: &mut Candidates,
) {
    let nv = current.len();
    if pos == nv {
        if partial != 0 || current.iter().all(|&x| x == 0) {
            return;
        }
        let g = current.iter().fold(0i64, |g, &x| num_integer::Integer::gcd(&g, &x));
        if g != 1 {
            return;
        }
        let support = halfspace_support_raw(ctx, current, false);
        let v = WeightVector::new(current.clone()).expect("checked above");
        found.entry(support).or_default().insert(v);
        return;
    }
    let left = (nv - pos - 1) as i64;
    for x in (-bound..=cap).rev() {
        let rest = -(partial + x);
        // Remaining entries lie in [-bound, x].
        if rest < -bound * left || rest > x * left {
            continue;
        }
        current[pos] = x;
        scan_descending(ctx, current, pos + 1, x, partial + x, bound, found);
    }
    current[pos] = 0;
}

/// Stamps each family with its hull verdict and splits into families whose
/// hull contains the barycenter and those whose hull does not.
pub fn split_by_eta(
    ctx: &SimplexContext,
    families: &[MaximalFamily],
) -> Result<(Vec<MaximalFamily>, Vec<MaximalFamily>)> {
    let located: Vec<Result<MaximalFamily>> = families
        .par_iter()
        .map(|f| {
            let h = hull_locate(ctx, &f.support)?;
            Ok(MaximalFamily { hull: Some(h.verdict), ..f.clone() })
        })
        .collect();
    let mut semi = Vec::new();
    let mut unstable = Vec::new();
    for f in located {
        let f = f?;
        if f.hull == Some(HullVerdict::Outside) {
            unstable.push(f);
        } else {
            semi.push(f);
        }
    }
    Ok((semi, unstable))
}

pub fn is_antichain(families: &[MaximalFamily]) -> bool {
    families.iter().enumerate().all(|(i, a)| {
        families.iter().enumerate().all(|(j, b)| i == j || !a.support.is_subset(&b.support))
    })
}
