//! Recomputes the bundled tables and lists every disagreement.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::field::{Field, FieldSpec, PrimeField, RationalField};
use crate::algebra::groebner::GroebnerLimits;
use crate::algebra::hilbert::HilbertData;
use crate::algebra::jacobian::{jacobian_scheme_with, verify_locus_equations};
use crate::enumerate::{enumerate_maximal_with, EnumerateOptions, EnumerationStats, MaximalFamily};
use crate::error::{Error, Result};
use crate::hull::{hull_locate, HullVerdict};
use crate::lattice::{build_simplex, halfspace_support, SimplexContext, WeightVector};
use crate::orbit::chain::{verify_chain_with, ChainOptions, ChainReport, InclusionChain};
use crate::orbit::{antichain_screen, ScreenReport};
use crate::tables::{label_atlas, ExpectedTables};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    Enumerate,
    Singular,
    Inclusions,
    All,
}

impl Scope {
    fn covers(self, s: Scope) -> bool {
        self == Scope::All || self == s
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Enumerate => "enumerate",
            Scope::Singular => "singular",
            Scope::Inclusions => "inclusions",
            Scope::All => "all",
        })
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(Scope::Enumerate),
            "singular" => Ok(Scope::Singular),
            "inclusions" => Ok(Scope::Inclusions),
            "all" => Ok(Scope::All),
            _ => Err(Error::Unsupported(format!("unknown scope `{s}`"))),
        }
    }
}

pub struct ReproduceOptions<'a> {
    pub seeds: usize,
    /// `0` uses the global pool.
    pub workers: usize,
    pub field: FieldSpec,
    pub limits: GroebnerLimits,
    pub progress: Option<&'a (dyn Fn(&str) + Sync)>,
}

impl Default for ReproduceOptions<'_> {
    fn default() -> Self {
        ReproduceOptions {
            seeds: 3,
            workers: 0,
            field: FieldSpec::default(),
            limits: GroebnerLimits::default(),
            progress: None,
        }
    }
}

impl ReproduceOptions<'_> {
    fn say(&self, msg: &str) {
        if let Some(p) = self.progress {
            p(msg);
        }
    }
}

/// One disagreement with the bundled tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffRow {
    pub stage: String,
    pub item: String,
    pub expected: String,
    pub got: String,
}

fn diff(stage: &str, item: impl Into<String>, expected: impl fmt::Display, got: impl fmt::Display) -> DiffRow {
    DiffRow { stage: stage.into(), item: item.into(), expected: expected.to_string(), got: got.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyOutcome {
    /// Table id, when the support matches a tabulated family.
    pub id: Option<usize>,
    pub vector: Vec<i64>,
    pub alternates: Vec<Vec<i64>>,
    pub support_size: usize,
    pub eta_in_hull: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerateStage {
    pub families: Vec<FamilyOutcome>,
    pub stats: EnumerationStats,
    pub sample_support_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularOutcome {
    pub family: usize,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<HilbertData>,
    /// Value shared by a majority of seeds.
    pub dimension: i64,
    pub degree: u64,
    pub seeds_agree: bool,
    pub locus_check: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularStage {
    pub field: FieldSpec,
    pub rows: Vec<SingularOutcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionStage {
    pub chains: Vec<ChainReport>,
    pub negative_control: ChainReport,
    pub screen: ScreenReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReproduceReport {
    pub scope: Scope,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerate: Option<EnumerateStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular: Option<SingularStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inclusions: Option<InclusionStage>,
    pub diffs: Vec<DiffRow>,
}

impl ReproduceReport {
    pub fn is_clean(&self) -> bool {
        self.diffs.is_empty()
    }
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::ResourceExhausted(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

pub fn reproduce(scope: Scope, opts: &ReproduceOptions<'_>) -> Result<ReproduceReport> {
    let tables = ExpectedTables::bundled()?;
    let ctx = build_simplex(tables.n, tables.d)?;
    let atlas = tables.atlas(&ctx)?;
    let mut report = ReproduceReport { scope, enumerate: None, singular: None, inclusions: None, diffs: Vec::new() };
    if scope.covers(Scope::Enumerate) {
        let (stage, diffs) = enumerate_stage(&ctx, &tables, opts)?;
        report.enumerate = Some(stage);
        report.diffs.extend(diffs);
    }
    if scope.covers(Scope::Singular) {
        let ids: Vec<usize> = tables.singular_table.iter().map(|r| r.id).collect();
        let (stage, diffs) = singular_stage(&ctx, &tables, &atlas, &ids, opts)?;
        report.singular = Some(stage);
        report.diffs.extend(diffs);
    }
    if scope.covers(Scope::Inclusions) {
        let (stage, diffs) = inclusion_stage(&ctx, &tables, &atlas, opts)?;
        report.inclusions = Some(stage);
        report.diffs.extend(diffs);
    }
    Ok(report)
}

fn fmt_vec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn enumerate_stage(
    ctx: &SimplexContext,
    tables: &ExpectedTables,
    opts: &ReproduceOptions<'_>,
) -> Result<(EnumerateStage, Vec<DiffRow>)> {
    const STAGE: &str = "enumerate";
    opts.say("enumerating maximal families");
    let report_slices = |done: usize, total: usize| {
        if done % 8 == 0 || done == total {
            opts.say(&format!("enumerate: {done}/{total} slices"));
        }
    };
    let eopts = EnumerateOptions { workers: opts.workers, progress: Some(&report_slices) };
    let (families, stats) = enumerate_maximal_with(ctx, &eopts)?;
    let located: Vec<MaximalFamily> = in_pool(opts.workers, || {
        families
            .par_iter()
            .map(|f| Ok(MaximalFamily { hull: Some(hull_locate(ctx, &f.support)?.verdict), ..f.clone() }))
            .collect::<Result<Vec<_>>>()
    })??;
    let labels = label_atlas(ctx, &located, tables)?;
    let mut diffs = Vec::new();

    if located.len() != tables.len() {
        diffs.push(diff(STAGE, "family count", tables.len(), located.len()));
    }
    for id in &labels.missing {
        diffs.push(diff(STAGE, format!("r{id}"), fmt_vec(tables.vector(*id)?.weights()), "missing"));
    }
    let mut outcomes = Vec::with_capacity(located.len());
    for (f, id) in located.iter().zip(&labels.ids) {
        let inside = f.hull != Some(HullVerdict::Outside);
        outcomes.push(FamilyOutcome {
            id: *id,
            vector: f.vector.weights().to_vec(),
            alternates: f.alternates.iter().map(|a| a.weights().to_vec()).collect(),
            support_size: f.support.len(),
            eta_in_hull: inside,
        });
        let Some(id) = *id else {
            diffs.push(diff(STAGE, "unexpected family", "none", fmt_vec(f.vector.weights())));
            continue;
        };
        let item = format!("r{id}");
        if id == tables.unstable.id {
            if inside {
                diffs.push(diff(STAGE, format!("{item} hull"), "outside", "inside"));
            }
            let mut want: Vec<Vec<i64>> = tables.unstable.alternates.clone();
            want.sort_unstable_by(|a, b| b.cmp(a));
            let got: Vec<Vec<i64>> = f.alternates.iter().map(|a| a.weights().to_vec()).collect();
            if got != want {
                let show = |v: &[Vec<i64>]| v.iter().map(|x| fmt_vec(x)).collect::<Vec<_>>().join(" ");
                diffs.push(diff(STAGE, format!("{item} alternates"), show(&want), show(&got)));
            }
            for a in &tables.unstable.alternates {
                if halfspace_support(ctx, &WeightVector::new(a.clone())?, false)? != f.support {
                    diffs.push(diff(STAGE, format!("{item} alternate {}", fmt_vec(a)), "same support", "different"));
                }
            }
            if f.vector.weights() != tables.unstable.vector.as_slice() {
                diffs.push(diff(STAGE, item, fmt_vec(&tables.unstable.vector), fmt_vec(f.vector.weights())));
            }
        } else {
            if !inside {
                diffs.push(diff(STAGE, format!("{item} hull"), "inside", "outside"));
            }
            let want = &tables.families[id - 1].vector;
            if f.vector.weights() != want.as_slice() {
                diffs.push(diff(STAGE, item, fmt_vec(want), fmt_vec(f.vector.weights())));
            }
        }
    }

    let listed = ctx.support_from_strs(&tables.sample_support.monomials)?;
    let sample_id = tables.sample_support.family;
    let computed = labels.ids.iter().position(|id| *id == Some(sample_id)).map(|i| &located[i].support);
    if computed != Some(&listed) {
        diffs.push(diff(
            STAGE,
            format!("listed support of r{sample_id}"),
            format!("{} monomials", listed.len()),
            computed.map_or("missing".to_string(), |s| format!("{} monomials, different set", s.len())),
        ));
    }
    Ok((EnumerateStage { families: outcomes, stats, sample_support_size: listed.len() }, diffs))
}

fn majority(values: &[HilbertData]) -> HilbertData {
    // Ties go to the value seen first.
    let mut best = values[0];
    let mut best_count = 0;
    for v in values {
        let c = values.iter().filter(|w| *w == v).count();
        if c > best_count {
            best = *v;
            best_count = c;
        }
    }
    best
}

fn singular_rows<F: Field + Sync>(
    ctx: &SimplexContext,
    tables: &ExpectedTables,
    atlas: &[MaximalFamily],
    ids: &[usize],
    field: &F,
    opts: &ReproduceOptions<'_>,
) -> Result<Vec<SingularOutcome>>
where
    F::Elem: Send + Sync,
{
    let seeds = opts.seeds.max(1) as u64;
    in_pool(opts.workers, || {
        ids.par_iter()
            .map(|&id| {
                let support = &atlas[id - 1].support;
                let run = |s: u64| jacobian_scheme_with(ctx, support, field, s, opts.limits);
                let mut used: Vec<u64> = (1..=seeds).collect();
                let mut per_seed = used.iter().map(|&s| run(s)).collect::<Result<Vec<_>>>()?;
                // A disagreement means a non-generic draw (or an unlucky
                // prime): draw as many seeds again and take the majority.
                if per_seed.iter().any(|h| *h != per_seed[0]) {
                    for s in seeds + 1..=2 * seeds {
                        per_seed.push(run(s)?);
                        used.push(s);
                    }
                }
                let best = majority(&per_seed);
                let locus = &tables.equations_row(id)?.locus;
                let locus_check = verify_locus_equations(ctx, support, locus, field, 1, opts.limits)?;
                opts.say(&format!("singular: f{id} done"));
                Ok(SingularOutcome {
                    family: id,
                    seeds_agree: per_seed.iter().all(|h| *h == per_seed[0]),
                    seeds: used,
                    per_seed,
                    dimension: best.dimension,
                    degree: best.degree,
                    locus_check,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

/// Singular loci of the table families `ids`, diffed against the table.
pub fn singular_stage(
    ctx: &SimplexContext,
    tables: &ExpectedTables,
    atlas: &[MaximalFamily],
    ids: &[usize],
    opts: &ReproduceOptions<'_>,
) -> Result<(SingularStage, Vec<DiffRow>)> {
    const STAGE: &str = "singular";
    opts.say(&format!("singular loci over {}", opts.field));
    let rows = match opts.field {
        FieldSpec::Rational => singular_rows(ctx, tables, atlas, ids, &RationalField, opts)?,
        FieldSpec::Prime(p) => singular_rows(ctx, tables, atlas, ids, &PrimeField::new(p)?, opts)?,
    };
    let mut diffs = Vec::new();
    for row in &rows {
        let want = tables.singular_row(row.family)?;
        let item = format!("f{}", row.family);
        if (row.dimension, row.degree) != (want.dimension, want.degree) {
            diffs.push(diff(
                STAGE,
                &item,
                format!("({}, {})", want.dimension, want.degree),
                format!("({}, {})", row.dimension, row.degree),
            ));
        }
        if !row.seeds_agree {
            diffs.push(diff(STAGE, format!("{item} seeds"), "agree", "disagree"));
        }
        if !row.locus_check {
            diffs.push(diff(STAGE, format!("{item} locus"), tables.equations_row(row.family)?.equations.clone(), "not contained"));
        }
    }
    Ok((SingularStage { field: opts.field, rows }, diffs))
}

pub fn inclusion_stage(
    ctx: &SimplexContext,
    tables: &ExpectedTables,
    atlas: &[MaximalFamily],
    opts: &ReproduceOptions<'_>,
) -> Result<(InclusionStage, Vec<DiffRow>)> {
    const STAGE: &str = "inclusions";
    opts.say("verifying inclusion chains");
    let mut diffs = Vec::new();
    let mut chains = Vec::new();
    let mut first = None;
    for spec in &tables.chains {
        let chain = InclusionChain::resolve(ctx, spec, atlas)?;
        let r = verify_chain_with(ctx, &chain, ChainOptions::default())?;
        let item = format!("chain {} (r{} -> r{})", spec.id, spec.source, spec.target);
        let want_end_to_end = !chain.ends_asserted();
        if !r.verified {
            diffs.push(diff(STAGE, &item, "verified", "not verified"));
        } else if want_end_to_end && !r.end_to_end {
            diffs.push(diff(STAGE, &item, "end-to-end", "partial"));
        }
        if first.is_none() {
            first = Some(chain);
        }
        chains.push(r);
    }
    let first = first.ok_or_else(|| Error::MalformedChain("no chains bundled".into()))?;
    let control_target = 5;
    let control = first.retarget(atlas, control_target)?;
    let negative_control = verify_chain_with(ctx, &control, ChainOptions { seed: 1, max_attempts: 16 })?;
    if negative_control.verified {
        diffs.push(diff(STAGE, format!("chain {} retargeted at r{control_target}", first.id), "fails", "verified"));
    }
    opts.say("permutation screen");
    let keep = tables.final_19.ids();
    let screen = in_pool(opts.workers, || antichain_screen(ctx, atlas, &keep))??;
    for hit in &screen.hits {
        diffs.push(diff(STAGE, format!("screen r{} -> r{}", hit.from, hit.to), "no inclusion", format!("{:?}", hit.permutation)));
    }
    Ok((InclusionStage { chains, negative_control, screen }, diffs))
}
