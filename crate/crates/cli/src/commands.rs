use std::fs;
use std::path::{Path, PathBuf};

use datadepth::bench::{
    generate, ordered_depths, sample_depths, subsample_study, LabeledSample, MethodConfig, Scenario, StudyCell,
};
use datadepth::detect::{build_model, fit_scored, load_model, save_model, score_batch, DepthReport, FitConfig, ThresholdPolicy};
use datadepth::explain::{anomaly_groups, depth_grid, direction_similarity, explain_point, Explanation};
use datadepth::optimize::SearchBudget;
use datadepth::seeding::derive;
use datadepth::DepthError;

use crate::error::{CliError, CliResult};
use crate::io::{coordinate_columns, direction_columns, num, read_table, Output, Table};
use crate::{BenchArgs, DepthArgs, ExplainArgs, FitArgs, MethodArgs, PolicyKind, ScenarioArgs, ScoreArgs, SimulateArgs};

/// Stream index separating search seeds from scenario seeds.
const METHOD_STREAM: u64 = 1;

impl MethodArgs {
    fn fit_config(&self, seed: u64) -> FitConfig {
        let mut budget = SearchBudget::new(self.strategy, self.directions, seed);
        budget.restarts = self.restarts;
        let mut cfg = FitConfig::new(self.notion, budget);
        cfg.simplex_samples = self.simplex_samples;
        cfg
    }
}

impl ScenarioArgs {
    fn scenario(&self, seed: u64) -> Scenario {
        let mut s = Scenario::new(self.scenario, seed);
        if let Some(split) = self.split {
            s = s.with_split(split);
        }
        if let Some(d) = self.d {
            s.d = d;
        }
        if let Some(n) = self.n {
            s.n = n;
        }
        if let Some(e) = self.epsilon {
            s.epsilon = e;
        }
        if let Some(r) = self.rho {
            s.params.rho = r;
        }
        if let Some(v) = self.shift {
            s.params.shift = v;
        }
        if let Some(p) = self.placement {
            s.params.placement = p;
        }
        if let Some(m) = self.normal_mean {
            s.params.normal_mean = m;
        }
        s
    }
}

fn check_dim(table: &Table, expected: usize) -> CliResult<()> {
    if !table.rows.is_empty() && table.dim != expected {
        return Err(DepthError::DimensionMismatch { expected, got: table.dim }.into());
    }
    Ok(())
}

fn report_header(d: usize, with_flags: bool) -> Vec<String> {
    let mut h: Vec<String> = ["index", "depth", "exactness"].map(String::from).to_vec();
    if with_flags {
        h.extend(["is_anomaly", "ambiguous"].map(String::from));
    }
    h.extend(direction_columns(d));
    h
}

fn report_row(i: usize, r: &DepthReport, d: usize, with_flags: bool) -> Vec<String> {
    let mut row = vec![i.to_string(), num(r.depth.value), r.depth.exactness.to_string()];
    if with_flags {
        row.push(u8::from(r.is_anomaly).to_string());
        row.push(u8::from(r.ambiguous).to_string());
    }
    match &r.direction {
        Some(u) => row.extend(u.as_slice().iter().map(|v| num(*v))),
        None => row.extend(std::iter::repeat_n(String::new(), d)),
    }
    row
}

fn parse_grid(text: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("--grid expects LO,HI,STEPS, got '{text}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].parse().map_err(|_| bad())?;
    let hi = parts[1].parse().map_err(|_| bad())?;
    let steps = parts[2].parse().map_err(|_| bad())?;
    Ok((lo, hi, steps))
}

pub fn depth(args: &DepthArgs, seed: u64) -> CliResult<()> {
    let reference = read_table(&args.reference)?;
    let data = reference.require_matrix(&args.reference)?;
    let model = build_model(&data, &args.method.fit_config(seed))?;
    let mut out = Output::create(args.output.as_deref())?;
    if let Some(grid) = &args.grid {
        let (lo, hi, steps) = parse_grid(grid)?;
        let grid = depth_grid(&model, [lo, lo], [hi, hi], steps)?;
        out.line(&["x1", "x2", "depth"].map(String::from))?;
        for (p, v) in grid {
            out.line(&[num(p[0]), num(p[1]), num(v)])?;
        }
        return out.finish();
    }
    let input = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("depth needs --input or --grid".into()))?;
    let queries = read_table(input)?;
    check_dim(&queries, model.dim)?;
    let reports = match queries.matrix()? {
        Some(q) => score_batch(&model, &q)?,
        None => Vec::new(),
    };
    out.line(&report_header(model.dim, false))?;
    for (i, r) in reports.iter().enumerate() {
        out.line(&report_row(i, r, model.dim, false))?;
    }
    out.finish()
}

fn policy(args: &FitArgs) -> CliResult<ThresholdPolicy> {
    Ok(match args.threshold_policy {
        PolicyKind::Quantile => ThresholdPolicy::Quantile { alpha: args.alpha },
        PolicyKind::DetectAll => ThresholdPolicy::DetectAll,
        PolicyKind::Fixed => ThresholdPolicy::Fixed {
            value: args
                .threshold
                .ok_or_else(|| CliError::Usage("--threshold-policy fixed needs --threshold".into()))?,
        },
    })
}

pub fn fit(args: &FitArgs, seed: u64) -> CliResult<()> {
    let table = read_table(&args.input)?;
    let data = table.require_matrix(&args.input)?;
    let mut cfg = args.method.fit_config(seed);
    cfg.policy = policy(args)?;
    cfg.subsample_fraction = args.fraction;
    let (model, reports) = fit_scored(&data, &cfg, table.labels.as_deref())?;
    let text = save_model(&model)?;
    fs::write(&args.output, text + "\n").map_err(|e| CliError::io(&args.output, e))?;
    eprintln!(
        "fitted {} model on {} rows: threshold {}, {} training rows flagged",
        model.notion,
        data.nrows(),
        model.threshold,
        reports.iter().filter(|r| r.is_anomaly).count()
    );
    Ok(())
}

fn read_model(path: &Path) -> CliResult<datadepth::detect::DepthModel> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(load_model(&text)?)
}

pub fn score(args: &ScoreArgs) -> CliResult<()> {
    let model = read_model(&args.model)?;
    let queries = read_table(&args.input)?;
    check_dim(&queries, model.dim)?;
    let reports = match queries.matrix()? {
        Some(q) => score_batch(&model, &q)?,
        None => Vec::new(),
    };
    let mut out = Output::create(args.output.as_deref())?;
    out.line(&report_header(model.dim, true))?;
    for (i, r) in reports.iter().enumerate() {
        out.line(&report_row(i, r, model.dim, true))?;
    }
    out.finish()?;
    let flagged = reports.iter().filter(|r| r.is_anomaly).count();
    let summary = format!("scored {} points, {flagged} flagged at threshold {}", reports.len(), model.threshold);
    if args.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn explanation_rows(e: &Explanation, point_rank: usize) -> Vec<Vec<String>> {
    e.sequence
        .projections
        .iter()
        .enumerate()
        .map(|(k, v)| {
            vec![
                e.point_index.to_string(),
                point_rank.to_string(),
                (k + 1).to_string(),
                num(*v),
                u8::from(k + 1 == e.sequence.own_position).to_string(),
            ]
        })
        .collect()
}

pub fn explain(args: &ExplainArgs) -> CliResult<()> {
    let model = read_model(&args.model)?;
    if !model.notion.is_projection() {
        return Err(DepthError::NoDirections(model.notion.to_string()).into());
    }
    let table = read_table(&args.input)?;
    check_dim(&table, model.dim)?;
    let data = table.require_matrix(&args.input)?;
    fs::create_dir_all(&args.output_dir).map_err(|e| CliError::io(&args.output_dir, e))?;
    let path = |name: &str| -> PathBuf { args.output_dir.join(name) };

    let sim = direction_similarity(&model, &data)?;
    let n = sim.len();
    let mut rank = vec![0usize; n];
    for (r, &i) in sim.order.iter().enumerate() {
        rank[i] = r + 1;
    }
    let flagged: Vec<bool> = (0..n).map(|i| sim.depths[rank[i] - 1] < model.threshold).collect();

    let mut out = Output::create(Some(&path("directions.csv")))?;
    let mut header: Vec<String> = ["index", "depth_rank", "depth", "is_anomaly"].map(String::from).to_vec();
    header.extend(direction_columns(model.dim));
    out.line(&header)?;
    for &i in &sim.order {
        let mut row = vec![i.to_string(), rank[i].to_string(), num(sim.depths[rank[i] - 1]), u8::from(flagged[i]).to_string()];
        row.extend(sim.directions[i].as_slice().iter().map(|v| num(*v)));
        out.line(&row)?;
    }
    out.finish()?;

    let points: Vec<usize> = match &args.points {
        Some(p) => p.clone(),
        None => {
            let f: Vec<usize> = sim.order.iter().copied().filter(|&i| flagged[i]).collect();
            if f.is_empty() {
                sim.order.first().copied().into_iter().collect()
            } else {
                f
            }
        }
    };
    let mut out = Output::create(Some(&path("sequences.csv")))?;
    out.line(&["index", "point_rank", "projection_rank", "value", "is_own"].map(String::from))?;
    for &i in &points {
        match explain_point(&model, &data, i) {
            Ok(e) => {
                for row in explanation_rows(&e, rank[i]) {
                    out.line(&row)?;
                }
            }
            Err(DepthError::AmbiguousDirection) if args.points.is_none() => {
                eprintln!("point {i}: optimal direction is ambiguous, no sequence written");
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.finish()?;

    let mut out = Output::create(Some(&path("similarity.csv")))?;
    out.line(&sim.order.iter().map(|i| format!("p{i}")).collect::<Vec<_>>())?;
    for a in 0..n {
        out.line(&(0..n).map(|b| num(sim.at(a, b))).collect::<Vec<_>>())?;
    }
    out.finish()?;

    let groups = anomaly_groups(&sim, &flagged, args.group_threshold)?;
    let mut out = Output::create(Some(&path("groups.csv")))?;
    out.line(&["group", "index", "depth"].map(String::from))?;
    for (g, members) in groups.iter().enumerate() {
        for &i in members {
            out.line(&[(g + 1).to_string(), i.to_string(), num(sim.depths[rank[i] - 1])])?;
        }
    }
    out.finish()?;
    eprintln!(
        "explained {n} points: {} flagged, {} anomaly groups at similarity >= {}",
        flagged.iter().filter(|&&f| f).count(),
        groups.len(),
        args.group_threshold
    );
    Ok(())
}

fn write_sample(sample: &LabeledSample, path: Option<&Path>) -> CliResult<()> {
    let mut out = Output::create(path)?;
    let mut header: Vec<String> = coordinate_columns(sample.data.ncols()).collect();
    header.push("label".into());
    out.line(&header)?;
    for (row, &label) in sample.data.rows().zip(&sample.labels) {
        let mut fields: Vec<String> = row.iter().map(|v| num(*v)).collect();
        fields.push(u8::from(label).to_string());
        out.line(&fields)?;
    }
    out.finish()
}

pub fn simulate(args: &SimulateArgs, seed: u64) -> CliResult<()> {
    let sample = generate(&args.scenario.scenario(seed))?;
    write_sample(&sample, args.output.as_deref())
}

fn methods(args: &BenchArgs, seed: u64) -> Vec<MethodConfig> {
    let method_seed = derive(seed, METHOD_STREAM);
    let mut out = Vec::new();
    for &notion in &args.notion {
        for &strategy in &args.strategy {
            let mut budget = SearchBudget::new(strategy, args.directions[0], method_seed);
            budget.restarts = args.restarts;
            let mut m = MethodConfig::new(notion, budget);
            m.simplex_samples = args.simplex_samples;
            out.push(m);
            if !notion.has_projection_property() {
                // the strategy does not matter for this notion
                break;
            }
        }
    }
    out
}

pub fn bench(args: &BenchArgs, seed: u64) -> CliResult<()> {
    if args.reps == 0 {
        return Err(DepthError::BadScenario("reps must be at least 1".into()).into());
    }
    let scenario = args.scenario.scenario(seed);
    scenario.validate()?;
    let methods = methods(args, seed);
    let mut cells: Vec<(MethodConfig, StudyCell)> = Vec::new();
    for m in &methods {
        let directions: &[usize] = if m.notion.has_projection_property() { &args.directions } else { &args.directions[..1] };
        for cell in subsample_study(&scenario, m, &args.fraction, directions, args.reps)? {
            cells.push((m.clone(), cell));
        }
    }

    let mut out = Output::create(args.output.as_deref())?;
    let keys = ["scenario", "method", "fraction", "directions"].map(String::from);
    let mut header = keys.to_vec();
    header.extend(["rep", "scenario_seed", "method_seed", "p", "millis"].map(String::from));
    out.tabbed(&header)?;
    let key = |cell: &StudyCell| {
        vec![
            cell.result.scenario.tag.to_string(),
            cell.result.method.label(),
            num(cell.fraction),
            cell.n_directions.to_string(),
        ]
    };
    for (_, cell) in &cells {
        for r in &cell.result.reps {
            let mut row = key(cell);
            row.extend([r.rep.to_string(), r.scenario_seed.to_string(), r.method_seed.to_string(), num(r.p), "-".into()]);
            out.tabbed(&row)?;
        }
    }
    out.raw("")?;
    out.raw("# summary")?;
    let mut header = keys.to_vec();
    header.extend(["reps", "min", "q1", "median", "q3", "max"].map(String::from));
    out.tabbed(&header)?;
    for (_, cell) in &cells {
        let s = &cell.result.summary;
        let mut row = key(cell);
        row.push(cell.result.reps.len().to_string());
        row.extend([s.min, s.q1, s.median, s.q3, s.max].map(num));
        out.tabbed(&row)?;
    }
    out.finish()?;

    if let Some(path) = &args.timings {
        let mut t = Output::create(Some(path))?;
        let mut header = keys.to_vec();
        header.extend(["rep", "millis"].map(String::from));
        t.tabbed(&header)?;
        for (_, cell) in &cells {
            for r in &cell.result.reps {
                let mut row = key(cell);
                row.extend([r.rep.to_string(), format!("{:.3}", r.millis)]);
                t.tabbed(&row)?;
            }
        }
        t.finish()?;
    }
    let total: f64 = cells.iter().flat_map(|(_, c)| c.result.reps.iter().map(|r| r.millis)).sum();
    eprintln!("{} cells, {} reps each, {:.1} s of depth computation", cells.len(), args.reps, total / 1e3);

    if let Some(path) = &args.ordered {
        let sample = generate(&scenario)?;
        let mut o = Output::create(Some(path))?;
        o.line(&["method", "rank", "index", "depth", "label"].map(String::from))?;
        for m in &methods {
            let m = MethodConfig { subsample_fraction: args.fraction[0], ..m.clone() };
            let depths = sample_depths(&sample, &m)?;
            for r in ordered_depths(&depths, &sample.labels)? {
                o.line(&[m.label(), r.rank.to_string(), r.index.to_string(), num(r.depth), u8::from(r.anomaly).to_string()])?;
            }
        }
        o.finish()?;
    }
    Ok(())
}
