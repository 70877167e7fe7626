use std::path::Path;

use cubicgit_core::algebra::jacobian::singular_locus_with;
use cubicgit_core::algebra::{Field, FieldSpec, GroebnerLimits, HilbertData, PrimeField, RationalField};
use cubicgit_core::document::PolynomialDocument;
use cubicgit_core::enumerate::{enumerate_maximal_with, EnumerateOptions, MaximalFamily};
use cubicgit_core::hull::{hull_locate, HullVerdict};
use cubicgit_core::lattice::{build_simplex, SimplexContext};
use cubicgit_core::orbit::chain::{verify_chain_with, ChainFile, ChainOptions, InclusionChain};
use cubicgit_core::reproduce::{
    inclusion_stage, reproduce, singular_stage, DiffRow, ReproduceOptions, ReproduceReport,
};
use cubicgit_core::stability::{classify_wrt_torus, containing_families};
use cubicgit_core::tables::{label_atlas, ExpectedTables};
use cubicgit_core::{Error, Result};
use serde_json::{json, Value};

use crate::emit::{Report, Table};
use crate::{exit, Cli, Command};

const DEFAULT_N: usize = 6;
const DEFAULT_D: u32 = 3;

pub fn run(cli: &Cli) -> Result<(Report, u8)> {
    match &cli.command {
        Command::Simplex => simplex(cli),
        Command::Enumerate => enumerate(cli),
        Command::Classify { input } => classify(cli, input),
        Command::Singular { family, input: Some(path) } if family.is_empty() => singular_document(cli, path),
        Command::Singular { family, .. } => singular_table(cli, family),
        Command::Inclusions { chains } => inclusions(cli, chains.as_deref()),
        Command::Reproduce { scope } => reproduce_cmd(cli, (*scope).into()),
    }
}

fn context(cli: &Cli) -> Result<SimplexContext> {
    build_simplex(cli.n.unwrap_or(DEFAULT_N), cli.d.unwrap_or(DEFAULT_D))
}

/// The bundled tables, refusing an explicit `--n`/`--d` they do not cover.
fn tables(cli: &Cli) -> Result<(ExpectedTables, SimplexContext, Vec<MaximalFamily>)> {
    let t = ExpectedTables::bundled()?;
    if cli.n.is_some_and(|n| n != t.n) || cli.d.is_some_and(|d| d != t.d) {
        return Err(Error::Unsupported(format!("bundled tables exist only for n={}, d={}", t.n, t.d)));
    }
    let ctx = build_simplex(t.n, t.d)?;
    let atlas = t.atlas(&ctx)?;
    Ok((t, ctx, atlas))
}

fn read_document(path: &Path) -> Result<PolynomialDocument> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    PolynomialDocument::parse(&bytes)
}

fn monomial(ctx: &SimplexContext, i: usize) -> String {
    ctx.monomial(i).to_string().replace(' ', "*")
}

fn vec_text(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

fn hull_name(h: HullVerdict) -> &'static str {
    match h {
        HullVerdict::Outside => "outside",
        HullVerdict::Boundary => "boundary",
        HullVerdict::RelativeInterior => "relative-interior",
    }
}

fn diff_table(diffs: &[DiffRow]) -> Table {
    let mut t = Table::new("differences", &["stage", "item", "expected", "got"]);
    for d in diffs {
        t.push(vec![d.stage.clone(), d.item.clone(), d.expected.clone(), d.got.clone()]);
    }
    t
}

fn status(diffs: &[DiffRow]) -> u8 {
    if diffs.is_empty() {
        exit::OK
    } else {
        exit::DIFF
    }
}

fn options<'a>(cli: &Cli, progress: &'a (dyn Fn(&str) + Sync)) -> ReproduceOptions<'a> {
    ReproduceOptions {
        seeds: cli.seeds,
        workers: cli.workers,
        field: cli.field,
        limits: cli.limits(cli.field),
        progress: Some(progress),
    }
}

fn simplex(cli: &Cli) -> Result<(Report, u8)> {
    let ctx = context(cli)?;
    let mut table = Table::new("", &["index", "exponent", "monomial"]);
    let mut rows = Vec::with_capacity(ctx.len());
    for (i, m) in ctx.monomials().iter().enumerate() {
        table.push(vec![i.to_string(), format!("{:?}", m.0), monomial(&ctx, i)]);
        rows.push(json!({"index": i, "exp": m.0, "monomial": monomial(&ctx, i)}));
    }
    let json = json!({"command": "simplex", "n": ctx.n(), "d": ctx.d(), "count": ctx.len(), "monomials": rows});
    let summary = vec![format!("{} monomials of degree {} in {} variables", ctx.len(), ctx.d(), ctx.nvars())];
    Ok((Report { json, summary, tables: vec![table] }, exit::OK))
}

fn enumerate(cli: &Cli) -> Result<(Report, u8)> {
    let ctx = context(cli)?;
    cli.progress(&format!("enumerating maximal families for n={}, d={}", ctx.n(), ctx.d()));
    let progress = |done: usize, total: usize| {
        if done % 8 == 0 || done == total {
            cli.progress(&format!("enumerate: {done}/{total} slices"));
        }
    };
    let (families, stats) =
        enumerate_maximal_with(&ctx, &EnumerateOptions { workers: cli.workers, progress: Some(&progress) })?;
    let verdicts = families.iter().map(|f| Ok(hull_locate(&ctx, &f.support)?.verdict)).collect::<Result<Vec<_>>>()?;
    let ids: Vec<Option<usize>> = match ExpectedTables::bundled() {
        Ok(t) if t.n == ctx.n() && t.d == ctx.d() => label_atlas(&ctx, &families, &t)?.ids,
        _ => vec![None; families.len()],
    };

    let mut table = Table::new("", &["index", "id", "vector", "support_size", "eta", "support"]);
    let mut rows = Vec::new();
    for (i, ((f, v), id)) in families.iter().zip(&verdicts).zip(&ids).enumerate() {
        let support: Vec<String> = f.support.iter().map(|k| monomial(&ctx, k)).collect();
        table.push(vec![
            (i + 1).to_string(),
            id.map_or(String::new(), |id| id.to_string()),
            f.vector.to_string(),
            f.support.len().to_string(),
            hull_name(*v).to_string(),
            support.join(" "),
        ]);
        rows.push(json!({
            "index": i + 1,
            "id": id,
            "vector": f.vector.weights(),
            "alternates": f.alternates.iter().map(|a| a.weights().to_vec()).collect::<Vec<_>>(),
            "support_size": f.support.len(),
            "eta": hull_name(*v),
            "support": support,
        }));
    }
    let outside = verdicts.iter().filter(|v| **v == HullVerdict::Outside).count();
    let json = json!({
        "command": "enumerate",
        "n": ctx.n(),
        "d": ctx.d(),
        "families": rows,
        "stats": stats,
    });
    let summary = vec![
        format!("{} maximal families, {} with the barycenter outside the hull", families.len(), outside),
        format!(
            "{} full-rank subsets, {} pruned prefixes, {} monotone normals, {} distinct supports",
            stats.full_rank_subsets, stats.pruned_prefixes, stats.monotone_normals, stats.distinct_supports
        ),
    ];
    Ok((Report { json, summary, tables: vec![table] }, exit::OK))
}

fn classify(cli: &Cli, input: &Path) -> Result<(Report, u8)> {
    let doc = read_document(input)?;
    if cli.n.is_some_and(|n| n != doc.n) || cli.d.is_some_and(|d| d != doc.d) {
        return Err(Error::ContextMismatch);
    }
    let ctx = build_simplex(doc.n, doc.d)?;
    let support = doc.support(&ctx)?;
    let verdict = classify_wrt_torus(&ctx, &support)?;
    if !verdict.verify(&ctx, &support) {
        return Err(Error::Internal("stability witness failed its own check".into()));
    }
    let bundled = ExpectedTables::bundled()?;
    let (atlas, source) = if bundled.n == doc.n && bundled.d == doc.d {
        (bundled.atlas(&ctx)?, "bundled")
    } else {
        cli.progress("no bundled atlas for this context; enumerating");
        let opts = EnumerateOptions { workers: cli.workers, progress: None };
        (enumerate_maximal_with(&ctx, &opts)?.0, "enumerated")
    };
    let hits = containing_families(&ctx, &support, &atlas)?;

    let witness = verdict.witness.as_ref().map(|w| w.weights().to_vec());
    let mut table = Table::new("containing families", &["family", "vector", "permutation"]);
    let mut rows = Vec::new();
    for h in &hits {
        let f = &atlas[h.index];
        table.push(vec![(h.index + 1).to_string(), f.vector.to_string(), format!("{:?}", h.permutation)]);
        rows.push(json!({"family": h.index + 1, "vector": f.vector.weights(), "permutation": h.permutation}));
    }
    let mut summary = vec![format!("class: {}", verdict.class)];
    if let Some(w) = &witness {
        summary.push(format!("witness: {}", vec_text(w)));
    }
    summary.push(format!("support size: {}", support.len()));
    summary.push(format!("contained in {} of {} {} families", hits.len(), atlas.len(), source));
    let json = json!({
        "command": "classify",
        "n": doc.n,
        "d": doc.d,
        "input": input.display().to_string(),
        "class": verdict.class,
        "witness": witness,
        "support_size": support.len(),
        "atlas": source,
        "containing": rows,
    });
    Ok((Report { json, summary, tables: vec![table] }, exit::OK))
}

fn singular_table(cli: &Cli, family: &[usize]) -> Result<(Report, u8)> {
    let (t, ctx, atlas) = tables(cli)?;
    let ids: Vec<usize> = if family.is_empty() { t.singular_table.iter().map(|r| r.id).collect() } else { family.to_vec() };
    for &id in &ids {
        t.singular_row(id)?;
    }
    let say = |m: &str| cli.progress(m);
    let (stage, diffs) = singular_stage(&ctx, &t, &atlas, &ids, &options(cli, &say))?;

    let mut table =
        Table::new("singular loci", &["family", "dimension", "degree", "expected", "seeds_agree", "locus_check", "locus"]);
    let mut rows = Vec::new();
    for r in &stage.rows {
        let want = t.singular_row(r.family)?;
        table.push(vec![
            format!("f{}", r.family),
            r.dimension.to_string(),
            r.degree.to_string(),
            format!("({}, {})", want.dimension, want.degree),
            r.seeds_agree.to_string(),
            r.locus_check.to_string(),
            want.locus.clone(),
        ]);
        let mut v = serde_json::to_value(r).expect("row serializes");
        v["expected"] = json!({"dimension": want.dimension, "degree": want.degree});
        rows.push(v);
    }
    let json = json!({
        "command": "singular",
        "n": ctx.n(),
        "d": ctx.d(),
        "field": stage.field,
        "seeds": cli.seeds,
        "rows": rows,
        "diffs": diffs,
    });
    let summary = vec![format!("{} families over {}, {} differences", stage.rows.len(), stage.field, diffs.len())];
    let mut tables = vec![table];
    if !diffs.is_empty() {
        tables.push(diff_table(&diffs));
    }
    Ok((Report { json, summary, tables }, status(&diffs)))
}

fn locus_of<F: Field>(doc: &PolynomialDocument, field: &F, limits: GroebnerLimits) -> Result<HilbertData> {
    singular_locus_with(&doc.to_polynomial(field)?, limits)
}

fn singular_document(cli: &Cli, path: &Path) -> Result<(Report, u8)> {
    let doc = read_document(path)?;
    let field = doc.field.unwrap_or(cli.field);
    let limits = cli.limits(field);
    let h = match field {
        FieldSpec::Rational => locus_of(&doc, &RationalField, limits)?,
        FieldSpec::Prime(p) => locus_of(&doc, &PrimeField::new(p)?, limits)?,
    };
    let mut table = Table::new("singular locus", &["input", "dimension", "degree"]);
    table.push(vec![path.display().to_string(), h.dimension.to_string(), h.degree.to_string()]);
    let json = json!({
        "command": "singular",
        "n": doc.n,
        "d": doc.d,
        "field": field,
        "input": path.display().to_string(),
        "dimension": h.dimension,
        "degree": h.degree,
    });
    let summary = vec![if h.dimension < 0 {
        "the hypersurface is smooth".to_string()
    } else {
        format!("singular locus of dimension {} and degree {}", h.dimension, h.degree)
    }];
    Ok((Report { json, summary, tables: vec![table] }, exit::OK))
}

fn chain_table(chains: &[cubicgit_core::orbit::chain::ChainReport]) -> Table {
    let mut t = Table::new("chains", &["chain", "source", "target", "verified", "end_to_end", "seed", "attempts"]);
    for c in chains {
        t.push(vec![
            c.id.to_string(),
            format!("r{}", c.source),
            format!("r{}", c.target),
            c.verified.to_string(),
            c.end_to_end.to_string(),
            c.seed.map_or(String::new(), |s| s.to_string()),
            c.attempts.to_string(),
        ]);
    }
    t
}

fn inclusions(cli: &Cli, chains: Option<&Path>) -> Result<(Report, u8)> {
    let (t, ctx, atlas) = tables(cli)?;
    if let Some(path) = chains {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let file: ChainFile = serde_json::from_str(&text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        let mut reports = Vec::new();
        let mut diffs = Vec::new();
        for spec in &file.chains {
            let chain = InclusionChain::resolve(&ctx, spec, &atlas)?;
            let r = verify_chain_with(&ctx, &chain, ChainOptions::default())?;
            if !r.verified {
                diffs.push(DiffRow {
                    stage: "inclusions".into(),
                    item: format!("chain {} (r{} -> r{})", spec.id, spec.source, spec.target),
                    expected: "verified".into(),
                    got: "not verified".into(),
                });
            }
            reports.push(r);
        }
        let json = json!({"command": "inclusions", "n": ctx.n(), "d": ctx.d(), "chains": reports, "diffs": diffs});
        let verified = reports.iter().filter(|r| r.verified).count();
        let summary = vec![format!("{verified} of {} chains verified", reports.len())];
        let mut tables = vec![chain_table(&reports)];
        if !diffs.is_empty() {
            tables.push(diff_table(&diffs));
        }
        return Ok((Report { json, summary, tables }, status(&diffs)));
    }

    let say = |m: &str| cli.progress(m);
    let (stage, diffs) = inclusion_stage(&ctx, &t, &atlas, &options(cli, &say))?;
    let json = json!({
        "command": "inclusions",
        "n": ctx.n(),
        "d": ctx.d(),
        "chains": stage.chains,
        "negative_control": stage.negative_control,
        "screen": stage.screen,
        "diffs": diffs,
    });
    let summary = vec![
        format!("{} of {} chains verified", stage.chains.iter().filter(|c| c.verified).count(), stage.chains.len()),
        format!(
            "negative control (chain {} retargeted at r{}): {}",
            stage.negative_control.id,
            stage.negative_control.target,
            if stage.negative_control.verified { "verified" } else { "fails" }
        ),
        format!(
            "permutation screen over {} families: {} ordered pairs, {} inclusions",
            stage.screen.families.len(),
            stage.screen.pairs_checked,
            stage.screen.hits.len()
        ),
    ];
    let mut tables = vec![chain_table(&stage.chains)];
    if !diffs.is_empty() {
        tables.push(diff_table(&diffs));
    }
    Ok((Report { json, summary, tables }, status(&diffs)))
}

fn reproduce_json(report: &ReproduceReport) -> Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    let obj = v.as_object_mut().expect("report is an object");
    obj.insert("command".into(), json!("reproduce"));
    obj.insert("clean".into(), json!(report.is_clean()));
    v
}

fn reproduce_cmd(cli: &Cli, scope: cubicgit_core::reproduce::Scope) -> Result<(Report, u8)> {
    // Validates --n/--d against the tables before the long run starts.
    tables(cli)?;
    let say = |m: &str| cli.progress(m);
    let report = reproduce(scope, &options(cli, &say))?;

    let mut summary = vec![format!("scope: {}", report.scope)];
    if let Some(e) = &report.enumerate {
        let labelled = e.families.iter().filter(|f| f.id.is_some()).count();
        summary.push(format!("enumerate: {} families, {} matched to the table", e.families.len(), labelled));
    }
    if let Some(s) = &report.singular {
        summary.push(format!("singular: {} families over {}", s.rows.len(), s.field));
    }
    if let Some(i) = &report.inclusions {
        summary.push(format!(
            "inclusions: {} chains, screen of {} pairs with {} inclusions",
            i.chains.len(),
            i.screen.pairs_checked,
            i.screen.hits.len()
        ));
    }
    summary.push(format!("differences: {}", report.diffs.len()));

    let mut tables = vec![diff_table(&report.diffs)];
    if let Some(e) = &report.enumerate {
        let mut t = Table::new("families", &["id", "vector", "support_size", "eta_in_hull"]);
        for f in &e.families {
            t.push(vec![
                f.id.map_or(String::new(), |id| format!("r{id}")),
                vec_text(&f.vector),
                f.support_size.to_string(),
                f.eta_in_hull.to_string(),
            ]);
        }
        tables.push(t);
    }
    if let Some(s) = &report.singular {
        let mut t = Table::new("singular loci", &["family", "dimension", "degree", "seeds_agree", "locus_check"]);
        for r in &s.rows {
            t.push(vec![
                format!("f{}", r.family),
                r.dimension.to_string(),
                r.degree.to_string(),
                r.seeds_agree.to_string(),
                r.locus_check.to_string(),
            ]);
        }
        tables.push(t);
    }
    if let Some(i) = &report.inclusions {
        tables.push(chain_table(&i.chains));
    }
    let code = status(&report.diffs);
    Ok((Report { json: reproduce_json(&report), summary, tables }, code))
}
