use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use linkrt::costmodel::{Family, RuntimeModel};
use linkrt::kb::{load_table, sample_table, split_halves, write_tsv, ResourceTable};
use linkrt::ls::{eval_semantics, parse_ls, LinkSpec, Similarity};
use linkrt::measures::Measure;
use linkrt::planner::{canonical_plan, execute_plan, helios_plan, random_spec, Estimator, Models, Plan, SizeModel};
use linkrt::synth;
use linkrt::trainer::{collect_samples, evaluate_models, train_all, write_evaluation_csv, write_samples_csv};
use linkrt::Mapping;

use crate::config::Config;
use crate::{BenchArgs, EvaluateArgs, GenerateArgs, PlanArgs, Tables, TrainArgs};

const SIZE_MODEL: &str = "size.model";

fn load_tables(t: &Tables) -> Result<(ResourceTable, ResourceTable)> {
    let source = load_table(&t.source, t.format, None).with_context(|| format!("loading {}", t.source.display()))?;
    let target = load_table(&t.target, t.format, None).with_context(|| format!("loading {}", t.target.display()))?;
    Ok((source, target))
}

/// Training and evaluation halves. The target split uses a different seed
/// so the two tables are not cut at the same positions.
fn halves(
    source: &ResourceTable,
    target: &ResourceTable,
    seed: u64,
) -> Result<((ResourceTable, ResourceTable), (ResourceTable, ResourceTable))> {
    let (s_train, s_test) = split_halves(source, seed)?;
    let (t_train, t_test) = split_halves(target, seed ^ 1)?;
    Ok(((s_train, t_train), (s_test, t_test)))
}

fn model_path(dir: &Path, measure: Measure, family: Family) -> PathBuf {
    dir.join(format!("{measure}.{family}.model"))
}

fn load_models(dir: &Path, family: Family, measures: impl IntoIterator<Item = Measure>) -> Result<Models> {
    measures
        .into_iter()
        .map(|m| {
            let path = model_path(dir, m, family);
            let (model, _) = RuntimeModel::load(&path).with_context(|| format!("loading {}", path.display()))?;
            Ok((m, model))
        })
        .collect()
}

fn load_sizes(dir: &Path) -> Result<SizeModel> {
    let path = dir.join(SIZE_MODEL);
    if path.exists() {
        SizeModel::load(&path).with_context(|| format!("loading {}", path.display()))
    } else {
        eprintln!("note: {} not found, using default size estimates", path.display());
        Ok(SizeModel::new())
    }
}

pub fn generate(a: GenerateArgs) -> Result<bool> {
    let (source, target) = match a.kind.as_str() {
        "products" => synth::product_tables(a.n_source, a.n_target, a.seed),
        "strings" => synth::string_tables(a.n_source, a.n_target, a.seed),
        other => bail!("unknown kind `{other}`; expected `products` or `strings`"),
    };
    fs::create_dir_all(&a.out)?;
    for (table, side) in [(&source, "source"), (&target, "target")] {
        let path = a.out.join(format!("{}_{side}.tsv", a.kind));
        let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_tsv(table, &mut file)?;
        println!("wrote {} ({} resources)", path.display(), table.len());
    }
    Ok(true)
}

pub fn train(a: TrainArgs) -> Result<bool> {
    let mut config = Config::load(a.tables.config.as_deref(), a.tables.seed)?;
    let p = &mut config.protocol;
    p.n_source_samples = a.n_source.unwrap_or(p.n_source_samples);
    p.n_target_samples = a.n_target.unwrap_or(p.n_target_samples);
    p.repetitions = a.repetitions.unwrap_or(p.repetitions);
    let protocol = config.protocol;

    let (source, target) = load_tables(&a.tables)?;
    let ((s_train, t_train), _) = halves(&source, &target, protocol.seed)?;
    fs::create_dir_all(&a.out)?;
    let mut sizes = if a.out.join(SIZE_MODEL).exists() {
        load_sizes(&a.out)?
    } else {
        SizeModel::new()
    };
    let measures = if a.measure.is_empty() { Measure::ALL.to_vec() } else { a.measure.clone() };
    let trained_on = format!("{} x {}", a.tables.source.display(), a.tables.target.display());
    for m in measures {
        let sim = Similarity::new(m, &a.properties.source_property, &a.properties.target_property);
        let collected = collect_samples(&sim, &s_train, &t_train, &protocol)?;
        for w in &collected.warnings {
            eprintln!("warning: {w}");
        }
        let samples_path = a.out.join(format!("{m}.samples.csv"));
        write_samples_csv(fs::File::create(&samples_path)?, &collected.samples)?;
        for (family, (model, report)) in train_all(&collected.samples)? {
            let model = model.with_metadata(&trained_on);
            model.save(model_path(&a.out, m, family), report.loss)?;
            println!(
                "{m} {family}: loss {:.6e}, {} iterations{}",
                report.loss,
                report.iterations,
                if report.converged { "" } else { ", not converged" }
            );
        }
        sizes.fit(m, &collected.samples, &collected.result_sizes)?;
        sizes.calibrate(m, 10_000, protocol.seed);
    }
    sizes.save(a.out.join(SIZE_MODEL))?;
    println!("models written to {}", a.out.display());
    Ok(true)
}

pub fn evaluate(a: EvaluateArgs) -> Result<bool> {
    let mut config = Config::load(a.tables.config.as_deref(), a.tables.seed)?;
    config.protocol.repetitions = a.repetitions.unwrap_or(config.protocol.repetitions);
    let runs = a.runs.unwrap_or(config.runs);
    let (source, target) = load_tables(&a.tables)?;
    let (_, (s_test, t_test)) = halves(&source, &target, config.protocol.seed)?;
    let models: BTreeMap<Family, RuntimeModel> = Family::ALL
        .into_iter()
        .map(|f| Ok((f, load_models(&a.models, f, [a.measure])?.remove(&a.measure).unwrap())))
        .collect::<Result<_>>()?;
    let sim = Similarity::new(a.measure, &a.properties.source_property, &a.properties.target_property);
    let evaluation = evaluate_models(&models, &sim, &s_test, &t_test, runs, &config.protocol)?;
    if let Some(out) = &a.out {
        write_evaluation_csv(fs::File::create(out).with_context(|| format!("creating {}", out.display()))?, &evaluation.records)?;
    }
    print!("{}", evaluation.markdown(&a.measure.to_string()));
    Ok(true)
}

fn spec_measures(spec: &LinkSpec) -> Vec<Measure> {
    let mut out: Vec<Measure> = spec.leaves().iter().map(|a| a.measure()).collect();
    out.sort();
    out.dedup();
    out
}

fn run(plan: &Plan, source: &ResourceTable, target: &ResourceTable) -> Result<(Mapping, f64)> {
    let (m, timings) = execute_plan(plan, source, target)?;
    Ok((m, timings.iter().sum()))
}

pub fn plan(a: PlanArgs) -> Result<bool> {
    let spec = parse_ls(&a.spec)?;
    let (source, target) = load_tables(&a.tables)?;
    let sizes = load_sizes(&a.models)?;
    let canonical = canonical_plan(&spec);
    let (reference, ms) = run(&canonical, &source, &target)?;
    println!("canonical ({} links, {ms:.3} ms):\n{canonical}", reference.len());

    let mut ok = true;
    let mut shapes = Vec::new();
    for family in Family::ALL {
        let models = load_models(&a.models, family, spec_measures(&spec))?;
        let plan = helios_plan(&spec, &models, &sizes, source.len(), target.len())?;
        let canonical_cost = Estimator::new(&models, &sizes, source.len(), target.len()).plan_cost(&canonical)?;
        let (mapping, ms) = run(&plan, &source, &target)?;
        let mut header = format!(
            "{family}: estimated {:.3} ms (canonical {canonical_cost:.3} ms), executed {ms:.3} ms",
            plan.estimated_cost_ms
        );
        if plan.steps != canonical.steps {
            header.push_str(", differs from canonical");
        }
        println!("{header}\n{plan}");
        for d in &plan.decisions {
            let costs: Vec<String> = d.costs.iter().map(|(alt, c)| format!("{alt} {c:.3}")).collect();
            println!("  {} -> {} [{}]", d.node, d.chosen, costs.join(", "));
        }
        if let Some(diff) = mapping.diff(&reference, 1e-12) {
            println!("  MISMATCH with canonical result: {diff}");
            ok = false;
        }
        shapes.push(plan.steps);
    }
    if shapes.windows(2).any(|w| w[0] != w[1]) {
        println!("the families chose different plans");
    }
    Ok(ok)
}

pub fn bench(a: BenchArgs) -> Result<bool> {
    let config = Config::load(a.tables.config.as_deref(), a.tables.seed)?;
    let seed = config.protocol.seed;
    if a.specs == 0 {
        bail!("--specs must be at least 1");
    }
    let (source, target) = load_tables(&a.tables)?;
    let measures: Vec<Measure> = Measure::ALL
        .into_iter()
        .filter(|m| Family::ALL.iter().all(|f| model_path(&a.models, *m, *f).exists()))
        .collect();
    if measures.is_empty() {
        bail!("no complete model set in {}", a.models.display());
    }
    let leaves: Vec<Similarity> = measures
        .iter()
        .map(|m| Similarity::new(*m, &a.properties.source_property, &a.properties.target_property))
        .collect();
    let sizes = load_sizes(&a.models)?;
    let models: BTreeMap<Family, Models> = Family::ALL
        .into_iter()
        .map(|f| Ok((f, load_models(&a.models, f, measures.iter().copied())?)))
        .collect::<Result<_>>()?;
    let small_s = sample_table(&source, source.len().min(30), seed)?;
    let small_t = sample_table(&target, target.len().min(30), seed ^ 1)?;

    let mut rows = String::from("spec_index,spec,planner,estimated_ms,executed_ms\n");
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    let mut rewritten: BTreeMap<Family, usize> = BTreeMap::new();
    let mut mismatches = 0usize;
    for i in 0..a.specs {
        let spec = random_spec(a.depth, &leaves, seed.wrapping_add(i as u64))?;
        let canonical = canonical_plan(&spec);
        let oracle = eval_semantics(&spec, &small_s, &small_t);
        let (reference, ms) = run(&canonical, &source, &target)?;
        if let Some(d) = run(&canonical, &small_s, &small_t)?.0.diff(&oracle, 1e-12) {
            println!("spec {i} canonical disagrees with the semantics: {d}");
            mismatches += 1;
        }
        *totals.entry("canonical".into()).or_default() += ms;
        let _ = writeln!(rows, "{i},\"{spec}\",canonical,,{ms}");
        for (family, models) in &models {
            let plan = helios_plan(&spec, models, &sizes, source.len(), target.len())?;
            let (mapping, ms) = run(&plan, &source, &target)?;
            *totals.entry(family.to_string()).or_default() += ms;
            *rewritten.entry(*family).or_default() += usize::from(plan.steps != canonical.steps);
            let _ = writeln!(rows, "{i},\"{spec}\",{family},{},{ms}", plan.estimated_cost_ms);
            let small = helios_plan(&spec, models, &sizes, small_s.len(), small_t.len())?;
            let checks = [
                mapping.diff(&reference, 1e-12),
                run(&small, &small_s, &small_t)?.0.diff(&oracle, 1e-12),
            ];
            for d in checks.into_iter().flatten() {
                println!("spec {i} {family} plan disagrees: {d}");
                mismatches += 1;
            }
        }
    }
    if let Some(path) = &a.plot_data {
        fs::write(path, rows).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("| planner | total ms | plans differing from canonical |");
    println!("|---|---:|---:|");
    println!("| canonical | {:.3} | |", totals["canonical"]);
    for family in Family::ALL {
        println!("| {family} | {:.3} | {} |", totals[&family.to_string()], rewritten[&family]);
    }
    println!("{} specifications, {mismatches} mismatches", a.specs);
    Ok(mismatches == 0)
}
