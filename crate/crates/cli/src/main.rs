use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use msgraphs::atlas::{general_orders, Atlas, AtlasError, AtlasSession, OrderValue, Status};
use msgraphs::cosets::{default_budget, enumerate, regular_representation, CosetError};
use msgraphs::genpairs::{lemma44_report, named_group, GenPairsError, DEFAULT_PAIR_CAP};
use msgraphs::graphs::{invariants, GraphDoc, GraphError, DEFAULT_ISO_TIMEOUT};
use msgraphs::permgrp::{
    evaluate_word, hom_by_images, is_isomorphism, PermError, PermutationGroup,
};
use msgraphs::spatial::{
    export_scene, model_scene, Scene, SpatialError, DEFAULT_POLE, DEFAULT_SAMPLES,
};
use msgraphs::words::{parse_presentation, Presentation, SubgroupSpec};

const EXIT_VERIFY: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "msgraphs",
    version,
    about = "Maximum-symmetry graphs in the 3-sphere"
)]
struct Cli {
    /// Atlas JSON to use instead of the embedded one.
    #[arg(long, global = true, env = "MSG_ATLAS")]
    atlas: Option<PathBuf>,
    /// Coset definition budget (default: 100 x expected order, else 1000000).
    #[arg(long, global = true, env = "MSG_BUDGET", value_parser = positive)]
    budget: Option<usize>,
    /// Largest group order accepted by the generating-pair search.
    #[arg(long, global = true, env = "MSG_CAP", default_value_t = DEFAULT_PAIR_CAP, value_parser = positive)]
    cap: usize,
    /// Isomorphism search timeout in seconds.
    #[arg(long, global = true, env = "MSG_TIMEOUT", default_value_t = DEFAULT_ISO_TIMEOUT.as_secs(), value_parser = positive_u64)]
    timeout: u64,
    /// Worker threads for the parallel paths.
    #[arg(long, global = true, env = "MSG_JOBS", value_parser = positive)]
    jobs: Option<usize>,
    #[arg(long, global = true, env = "MSG_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order of a presented group, or the index of a subgroup.
    Order {
        file: PathBuf,
        /// Subgroup generators, `;`-separated.
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Rebuild an atlas graph, e.g. `O34.a'`.
    Build { id: String },
    /// Invariants of a graph JSON file (`-` for stdin).
    Invariants { file: PathBuf },
    /// Validate the atlas rows and generator maps.
    VerifyAtlas {
        #[arg(long)]
        id: Option<String>,
    },
    /// Check whether a generator assignment extends to a homomorphism.
    CheckHom {
        source: PathBuf,
        target: PathBuf,
        /// Source elements, e.g. `u=x;ul=y;ur=z`.
        #[arg(long)]
        map: String,
        /// Their images, e.g. `v=x;vl=y;vr=z`.
        #[arg(long)]
        images: String,
    },
    /// Generating (2,3)-pairs of a named group; all three when omitted.
    Lemma44 {
        #[arg(value_parser = ["a5z2", "a5s4", "ixo"])]
        group: Option<String>,
    },
    /// Maximum orders for a genus.
    Tables {
        #[arg(long)]
        genus: u64,
    },
    /// Project a model or a graph+embedding JSON file to a 3D scene.
    Project {
        model: String,
        /// Projection pole as `w,x,y,z`.
        #[arg(long, value_parser = parse_pole, allow_hyphen_values = true)]
        pole: Option<[f64; 4]>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Output file; `.obj` selects line-segment text. Stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|n| n as u64)
}

fn parse_pole(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let pole: [f64; 4] = parts
        .try_into()
        .map_err(|_| "expected four components w,x,y,z".to_string())?;
    if pole.iter().all(|c| *c == 0.0) || pole.iter().any(|c| !c.is_finite()) {
        return Err("pole must be a finite nonzero vector".into());
    }
    Ok(pole)
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn resource(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_RESOURCE,
            message: message.into(),
        }
    }
}

impl From<CosetError> for Failure {
    fn from(e: CosetError) -> Self {
        match e {
            CosetError::BudgetExceeded { .. }
            | CosetError::Perm(PermError::ExplosionGuard { .. }) => {
                Failure::resource(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<PermError> for Failure {
    fn from(e: PermError) -> Self {
        match e {
            PermError::ExplosionGuard { .. } => Failure::resource(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<AtlasError> for Failure {
    fn from(e: AtlasError) -> Self {
        match e {
            AtlasError::Coset(c) => c.into(),
            AtlasError::Perm(p) => p.into(),
            AtlasError::OrderMismatch { .. } => Failure {
                code: EXIT_VERIFY,
                message: e.to_string(),
            },
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<GenPairsError> for Failure {
    fn from(e: GenPairsError) -> Self {
        match e {
            GenPairsError::CapExceeded { .. } => Failure::resource(e.to_string()),
            GenPairsError::Perm(p) => p.into(),
            GenPairsError::NoPairs => Failure {
                code: EXIT_VERIFY,
                message: e.to_string(),
            },
        }
    }
}

impl From<SpatialError> for Failure {
    fn from(e: SpatialError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// What a subcommand produced: a JSON document, its text rendering, and
/// whether every check it ran held.
struct Output {
    json: Value,
    text: String,
    ok: bool,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output {
            json,
            text,
            ok: true,
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_presentation(path: &Path) -> Result<Presentation, Failure> {
    parse_presentation(&read_input(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn session(cli: &Cli) -> Result<AtlasSession, Failure> {
    let atlas = match &cli.atlas {
        Some(p) => Atlas::from_path(p)?,
        None => Atlas::embedded(),
    };
    Ok(AtlasSession::new(atlas)
        .with_budget(cli.budget)
        .with_timeout(Duration::from_secs(cli.timeout)))
}

fn cmd_order(cli: &Cli, file: &Path, subgroup: Option<&str>) -> Result<Output, Failure> {
    let pres = read_presentation(file)?;
    let sub = match subgroup {
        Some(s) => SubgroupSpec::parse(s, &pres).map_err(|e| Failure::usage(e.to_string()))?,
        None => SubgroupSpec::trivial(),
    };
    let budget = cli.budget.unwrap_or(default_budget(None));
    let table = enumerate(&pres, &sub, budget)?;
    Ok(if subgroup.is_some() {
        Output::ok(
            json!({"index": table.n_cosets, "definitions": table.definitions}),
            format!("index {}", table.n_cosets),
        )
    } else {
        Output::ok(
            json!({"order": table.n_cosets, "definitions": table.definitions}),
            format!("order {}", table.n_cosets),
        )
    })
}

fn cmd_build(cli: &Cli, id: &str) -> Result<Output, Failure> {
    let g = session(cli)?.graph(id)?;
    let inv = invariants(&g.graph)?;
    Ok(Output::ok(g.to_json(), format!("{id}: {inv}")))
}

fn cmd_invariants(file: &Path) -> Result<Output, Failure> {
    let doc: GraphDoc = serde_json::from_str(&read_input(file)?)
        .map_err(|e| Failure::usage(format!("graph JSON: {e}")))?;
    let inv = invariants(&doc.to_graph()?)?;
    let json = serde_json::to_value(&inv).expect("invariants serialize");
    Ok(Output::ok(json, inv.to_string()))
}

fn cmd_verify_atlas(cli: &Cli, id: Option<&str>) -> Result<Output, Failure> {
    let s = session(cli)?;
    if let Some(id) = id {
        let orbifold = id.split('.').next().unwrap_or(id);
        if s.atlas.orbifold(orbifold).is_err() {
            return Err(Failure::usage(format!("unknown atlas id `{id}`")));
        }
    }
    let report = s.validate(id);
    let touches = |x: &str| id.is_none_or(|f| x == f || x.split('.').next() == Some(f));
    let mut equivalences = Vec::new();
    for rec in s
        .atlas
        .equivalences
        .iter()
        .filter(|r| touches(&r.a) || touches(&r.b))
    {
        equivalences.push(s.check_equivalence(rec)?);
    }
    let ok = report.all_ok() && equivalences.iter().all(|e| e.status != Status::Failed);
    let mut text = String::new();
    for o in &report.orbifolds {
        let _ = writeln!(
            text,
            "{:<8} {:<4} {}",
            o.id,
            if o.ok { "ok" } else { "FAIL" },
            o.detail
        );
    }
    for r in &report.rows {
        let _ = writeln!(text, "{:<9} {}", r.status.to_string(), r.label);
        for c in r
            .checks
            .iter()
            .filter(|c| !c.ok || r.status != Status::Pass)
        {
            let _ = writeln!(
                text,
                "          {} {}: {}",
                if c.ok { "+" } else { "-" },
                c.name,
                c.detail
            );
        }
    }
    for e in &equivalences {
        let _ = writeln!(
            text,
            "{:<9} {} ~ {} (graphs {})",
            e.status.to_string(),
            e.a,
            e.b,
            e.graphs
        );
    }
    let sm = &report.summary;
    let _ = write!(
        text,
        "{} pass, {} verified, {} flagged, {} failed",
        sm.pass, sm.verified, sm.flagged, sm.failed
    );
    let mut json = serde_json::to_value(&report).expect("report serializes");
    json["equivalences"] = serde_json::to_value(&equivalences).expect("report serializes");
    Ok(Output { json, text, ok })
}

/// `a=w1; b=w2` as ordered `(name, word)` pairs.
fn assignments(spec: &str) -> Result<Vec<(String, String)>, Failure> {
    spec.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|part| match part.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
                Ok((k.trim().to_string(), v.trim().to_string()))
            }
            _ => Err(Failure::usage(format!("expected name=word, got `{part}`"))),
        })
        .collect()
}

fn regular_group(
    cli: &Cli,
    pres: &Presentation,
) -> Result<(Arc<PermutationGroup>, Vec<msgraphs::permgrp::Permutation>), Failure> {
    let budget = cli.budget.unwrap_or(default_budget(None));
    let table = enumerate(pres, &SubgroupSpec::trivial(), budget)?;
    let group = regular_representation(&table)?;
    Ok((Arc::new(group), table.action))
}

fn cmd_check_hom(
    cli: &Cli,
    source: &Path,
    target: &Path,
    map: &str,
    images: &str,
) -> Result<Output, Failure> {
    let p1 = read_presentation(source)?;
    let p2 = read_presentation(target)?;
    let map = assignments(map)?;
    let images = assignments(images)?;
    if map.len() != images.len() || map.is_empty() {
        return Err(Failure::usage(format!(
            "--map has {} entries, --images has {}",
            map.len(),
            images.len()
        )));
    }
    let (g1, act1) = regular_group(cli, &p1)?;
    let (g2, act2) = regular_group(cli, &p2)?;
    let eval = |pres: &Presentation, act: &[msgraphs::permgrp::Permutation], n: usize, w: &str| {
        let word = pres
            .word(w)
            .map_err(|e| Failure::usage(format!("`{w}`: {e}")))?;
        Ok::<_, Failure>(evaluate_word(&word, act, n)?)
    };
    let src = map
        .iter()
        .map(|(_, w)| eval(&p1, &act1, g1.degree(), w))
        .collect::<Result<Vec<_>, _>>()?;
    let dst = images
        .iter()
        .map(|(_, w)| eval(&p2, &act2, g2.degree(), w))
        .collect::<Result<Vec<_>, _>>()?;
    // the map is checked on the subgroup its source elements generate
    let domain = Arc::new(g1.subgroup_generated(&src)?);
    let hom = hom_by_images(&domain, &src, &g2, &dst)?;
    let verdict = match &hom {
        None => "undefined",
        Some(h) if domain.order() == g1.order() && is_isomorphism(h) => "isomorphism",
        Some(_) => "homomorphism",
    };
    let json = json!({
        "verdict": verdict,
        "source_order": g1.order(),
        "target_order": g2.order(),
        "domain_order": domain.order(),
        "image_order": hom.as_ref().map(|h| h.image_order),
        "injective": hom.as_ref().map(|h| h.is_injective()),
    });
    let text = format!(
        "{verdict}: |source| = {}, |target| = {}, |domain| = {}{}",
        g1.order(),
        g2.order(),
        domain.order(),
        hom.as_ref()
            .map(|h| format!(", |image| = {}", h.image_order))
            .unwrap_or_default()
    );
    Ok(Output {
        json,
        text,
        ok: hom.is_some(),
    })
}

fn cmd_lemma44(cli: &Cli, group: Option<&str>) -> Result<Output, Failure> {
    let names: Vec<&str> = group.map_or(vec!["a5z2", "a5s4", "ixo"], |g| vec![g]);
    let mut reports = Vec::new();
    let mut text = String::new();
    for name in names {
        let g =
            named_group(name).ok_or_else(|| Failure::usage(format!("unknown group `{name}`")))?;
        if g.order() > cli.cap {
            return Err(GenPairsError::CapExceeded {
                order: g.order(),
                cap: cli.cap,
            }
            .into());
        }
        let r = lemma44_report(name, &Arc::new(g))?;
        let _ = writeln!(
            text,
            "{name}: order {}, {} pairs, partners of y {}, all equivalent {}",
            r.order, r.pairs, r.partners_of_first_y, r.all_equivalent
        );
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.all_equivalent);
    let json = if reports.len() == 1 {
        serde_json::to_value(&reports[0])
    } else {
        serde_json::to_value(&reports)
    }
    .expect("report serializes");
    Ok(Output {
        json,
        text: text.trim_end().to_string(),
        ok,
    })
}

fn cmd_tables(genus: u64) -> Result<Output, Failure> {
    let o = general_orders(genus)?;
    let big_m = match o.big_m {
        OrderValue::Exact(v) => v.to_string(),
        OrderValue::Interval { lo, hi } => format!("{lo}..{hi}"),
    };
    let text = format!(
        "m_{g}={}\nM_{g}={big_m}\nM*_{g}={}\nE_{g}(-,-)={}",
        o.m,
        o.m_star,
        o.e_minus,
        g = o.genus
    );
    Ok(Output::ok(
        serde_json::to_value(&o).expect("orders serialize"),
        text,
    ))
}

/// A graph file with an `embedding` of unit 4-vectors, one per vertex.
fn file_scene(path: &Path, pole: [f64; 4], samples: usize) -> Result<Scene, Failure> {
    let mut doc: Value = serde_json::from_str(&read_input(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let embedding = doc
        .as_object_mut()
        .and_then(|m| m.remove("embedding"))
        .ok_or_else(|| Failure::usage(format!("{}: missing `embedding`", path.display())))?;
    let embedding: Vec<[f64; 4]> =
        serde_json::from_value(embedding).map_err(|e| Failure::usage(format!("embedding: {e}")))?;
    let graph: GraphDoc =
        serde_json::from_value(doc).map_err(|e| Failure::usage(format!("graph: {e}")))?;
    Ok(export_scene(
        &graph.to_graph()?,
        &embedding,
        pole,
        samples,
        &path.display().to_string(),
    )?)
}

fn cmd_project(
    model: &str,
    pole: Option<[f64; 4]>,
    samples: usize,
    output: Option<&Path>,
) -> Result<Output, Failure> {
    let pole = pole.unwrap_or(DEFAULT_POLE);
    let scene = if msgraphs::spatial::MODELS.contains(&model) {
        model_scene(model, pole, samples)?
    } else if Path::new(model).is_file() {
        file_scene(Path::new(model), pole, samples)?
    } else {
        return Err(Failure::usage(format!(
            "`{model}` is neither a model ({}) nor a file",
            msgraphs::spatial::MODELS.join(", ")
        )));
    };
    let summary = json!({
        "source": scene.meta.source,
        "vertices": scene.vertices.len(),
        "polylines": scene.polylines.len(),
        "samples_per_edge": scene.meta.samples_per_edge,
    });
    let text = format!(
        "{}: {} vertices, {} polylines",
        scene.meta.source,
        scene.vertices.len(),
        scene.polylines.len()
    );
    match output {
        Some(path) => {
            let body = if path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("obj"))
            {
                scene.to_obj()
            } else {
                serde_json::to_string(&scene).expect("scene serializes")
            };
            std::fs::write(path, body)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            Ok(Output::ok(summary, text))
        }
        None => Ok(Output::ok(
            serde_json::to_value(&scene).expect("scene serializes"),
            text,
        )),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Order { file, subgroup } => cmd_order(cli, file, subgroup.as_deref()),
        Command::Build { id } => cmd_build(cli, id),
        Command::Invariants { file } => cmd_invariants(file),
        Command::VerifyAtlas { id } => cmd_verify_atlas(cli, id.as_deref()),
        Command::CheckHom {
            source,
            target,
            map,
            images,
        } => cmd_check_hom(cli, source, target, map, images),
        Command::Lemma44 { group } => cmd_lemma44(cli, group.as_deref()),
        Command::Tables { genus } => cmd_tables(*genus),
        Command::Project {
            model,
            pole,
            samples,
            output,
        } => cmd_project(model, *pole, *samples, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RESOURCE);
        }
    }
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("valid JSON")
                ),
                Format::Text => println!("{}", out.text),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
