use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use treeemb::classify::{classify, direction, SampleParams};
use treeemb::gallery;
use treeemb::monoid::{
    directions, extract_subdivided_cubic, fixed_point_alternative, free_monoid_certificate, limit_diagnostics, limit_set,
    lps_alternative, AnalysisParams, FreeParams, LpsInput, MonoidPresentation,
};
use treeemb::{Address, Word};

use crate::dot;
use crate::spec::{parse_spec, SpecError, SpecFile};

pub const SCHEMA: &str = "treeemb-report/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("spec error: {0}")]
    Spec(#[from] SpecError),
    #[error("analysis error: {0}")]
    Analysis(#[from] treeemb::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for analysis failures, 2 for anything wrong with the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "treeemb", version, about = "Self-embeddings of locally finite trees")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Spec file declaring the tree, embeddings and monoids.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 32)]
    pub horizon: usize,
    #[arg(long, global = true, default_value_t = 8)]
    pub depth: usize,
    #[arg(long = "max-len", global = true, default_value_t = 4)]
    pub max_len: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write a DOT rendering here (`-` for standard output).
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check adjacency and injectivity on the truncation.
    Validate {
        #[arg(long)]
        embedding: Option<String>,
    },
    /// Elliptic, hyperbolic or parabolic, with certificates.
    Classify {
        #[arg(long)]
        embedding: Option<String>,
    },
    /// Depth-limited prefix of the direction g⁺.
    Direction {
        #[arg(long)]
        embedding: String,
    },
    /// Limit set and direction set approximations.
    LimitSet {
        #[arg(long)]
        monoid: String,
        #[arg(long, default_value = "ε")]
        basepoint: String,
    },
    /// Cardinality class, density and perfectness evidence.
    Diagnostics {
        #[arg(long)]
        monoid: String,
    },
    /// The fixed-point alternative.
    Alternative {
        #[arg(long)]
        monoid: String,
    },
    /// Ping-pong certificate for two words.
    FreeCert {
        #[arg(long)]
        monoid: String,
        /// Word over the generator names, e.g. `g` or `g·h`.
        #[arg(long, default_value = "")]
        g: String,
        #[arg(long, default_value = "")]
        h: String,
    },
    /// Subdivided 3-regular tree from a ping-pong certificate.
    ExtractCubic {
        #[arg(long)]
        monoid: String,
        #[arg(long, default_value = "")]
        g: String,
        #[arg(long, default_value = "")]
        h: String,
        #[arg(long = "word-len", default_value_t = 3)]
        word_len: usize,
    },
    /// Fixed vertex, edge or ends, or a subdivided 3-regular tree.
    Lps {
        #[arg(long, conflicts_with = "all_embeddings")]
        monoid: Option<String>,
        /// Use every automorphism of the (finite) tree.
        #[arg(long = "all-embeddings")]
        all_embeddings: bool,
    },
    /// The built-in gallery.
    Examples {
        #[arg(long)]
        list: bool,
        /// Print a gallery example as a spec file.
        #[arg(long)]
        show: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Classify { .. } => "classify",
            Command::Direction { .. } => "direction",
            Command::LimitSet { .. } => "limit-set",
            Command::Diagnostics { .. } => "diagnostics",
            Command::Alternative { .. } => "alternative",
            Command::FreeCert { .. } => "free-cert",
            Command::ExtractCubic { .. } => "extract-cubic",
            Command::Lps { .. } => "lps",
            Command::Examples { .. } => "examples",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub parameters: Value,
    pub result: Value,
    pub timing_ms: f64,
    /// Plain-text summary for the terminal.
    #[serde(skip)]
    pub summary: String,
    #[serde(skip)]
    pub dot: Option<String>,
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load_spec(common: &Common) -> Result<SpecFile, CliError> {
    let path = common
        .spec
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --spec FILE".into()))?;
    let text = std::fs::read_to_string(path)?;
    Ok(parse_spec(&text)?)
}

fn selected<'a>(spec: &'a SpecFile, name: &'a Option<String>) -> Result<Vec<(&'a str, &'a treeemb::Embedding)>, CliError> {
    Ok(match name {
        Some(n) => vec![(n.as_str(), spec.embedding(n)?)],
        None => spec.embeddings.iter().map(|(n, e)| (n.as_str(), e)).collect(),
    })
}

fn word(m: &MonoidPresentation, text: &str, default: usize) -> Result<Word, CliError> {
    if text.trim().is_empty() {
        if default >= m.rank() {
            return Err(CliError::Usage("the monoid has fewer than two generators; pass --g and --h".into()));
        }
        return Ok(vec![default]);
    }
    m.parse_word(text).map_err(|e| CliError::Usage(e.to_string()))
}

/// Runs one command against an already parsed spec (if the command needs one).
pub fn run_with_spec(common: &Common, command: &Command, spec: Option<&SpecFile>) -> Result<Report, CliError> {
    let start = Instant::now();
    let need = || spec.ok_or_else(|| CliError::Usage("this command needs --spec FILE".into()));
    let params = AnalysisParams::new(common.depth, common.max_len, common.horizon);
    let mut dot_out = None;
    let mut lines: Vec<String> = Vec::new();
    let result: Value = match command {
        Command::Validate { embedding } => {
            let spec = need()?;
            let mut out = serde_json::Map::new();
            for (n, e) in selected(spec, embedding)? {
                let r = e.validate(common.horizon);
                lines.push(format!("{n}: {}", if r.ok() { "ok".to_string() } else { format!("{:?}", r.first_violation) }));
                out.insert(n.to_string(), to_json(&r));
            }
            Value::Object(out)
        }
        Command::Classify { embedding } => {
            let spec = need()?;
            let mut out = serde_json::Map::new();
            let mut first = None;
            for (n, e) in selected(spec, embedding)? {
                let c = classify(e, common.horizon)?;
                let mut line = format!("{n}: {} (horizon {})", c.tag, c.horizon_used);
                if let Some(v) = &c.fixed_vertex {
                    line += &format!(", fixes {v}");
                }
                if let Some((a, b)) = &c.inverted_edge {
                    line += &format!(", swaps {a}–{b}");
                }
                if let Some(l) = c.translation_length {
                    line += &format!(", ℓ = {l}");
                }
                if let Some(p) = &c.g_plus {
                    line += &format!(", g+ = {p}");
                }
                if let Some(m) = &c.g_minus {
                    line += &format!(", g- = {m}");
                }
                lines.push(line);
                out.insert(n.to_string(), to_json(&c));
                first.get_or_insert(c);
            }
            if common.dot.is_some() {
                dot_out = Some(dot::export_tree(&spec.tree, common.depth, first.as_ref()));
            }
            Value::Object(out)
        }
        Command::Direction { embedding } => {
            let spec = need()?;
            let p = direction(spec.embedding(embedding)?, common.depth, common.horizon)?;
            lines.push(format!("{embedding}: g+ = {p} (depth {}, horizon {})", common.depth, common.horizon));
            json!({ "embedding": embedding, "direction": p })
        }
        Command::LimitSet { monoid, basepoint } => {
            let spec = need()?;
            let m = spec.monoid(monoid)?;
            let v: Address = basepoint
                .parse()
                .map_err(|_| CliError::Usage(format!("bad basepoint `{basepoint}`")))?;
            let l = limit_set(&m, &v, common.depth, common.max_len)?;
            let d = directions(&m, common.depth, common.max_len, common.horizon)?;
            lines.push(format!(
                "{} limit prefixes and {} directions at depth {} (words ≤ {})",
                l.prefixes.len(),
                d.prefixes.len(),
                common.depth,
                common.max_len
            ));
            lines.extend(l.prefixes.iter().map(|p| format!("  {p}")));
            json!({ "limit_set": l, "directions": d })
        }
        Command::Diagnostics { monoid } => {
            let spec = need()?;
            let m = spec.monoid(monoid)?;
            let root = Address::root();
            let l = limit_set(&m, &root, params.depth, params.max_len)?;
            let deeper = limit_set(&m, &root, params.deeper_depth, params.deeper_max_len)?;
            let d = directions(&m, params.depth, params.max_len, params.horizon)?;
            let diag = limit_diagnostics(&l, &d, &deeper)?;
            lines.push(format!(
                "class {:?}, density_ok {}, perfect_ok {} ({} prefixes at depth {}, {} at depth {})",
                diag.cardinality_class,
                diag.density_ok,
                diag.perfect_ok,
                diag.prefix_count,
                params.depth,
                diag.deeper_prefix_count,
                params.deeper_depth
            ));
            to_json(&diag)
        }
        Command::Alternative { monoid } => {
            let spec = need()?;
            let m = spec.monoid(monoid)?;
            let v = fixed_point_alternative(&m, &params)?;
            let checked = v.check(&m)?;
            lines.push(match &v.certificate {
                treeemb::monoid::AlternativeCertificate::None { diagnostics } => format!("{:?}: {diagnostics}", v.case),
                _ => format!("{:?} (certificate re-checked: {checked})", v.case),
            });
            json!({ "verdict": v, "certificate_checked": checked })
        }
        Command::FreeCert { monoid, g, h } => {
            let spec = need()?;
            let m = spec.monoid(monoid)?;
            let (gw, hw) = (word(&m, g, 0)?, word(&m, h, 1)?);
            let cert = free_monoid_certificate(&m, &gw, &hw, &free_params(common))?;
            lines.push(format!(
                "a = ({})^{}, b = ({})^{}, x = {}, U_g = {}, U_h = {}; words ≤ {} distinct at horizon {}",
                m.word_label(&gw),
                cert.m,
                m.word_label(&hw),
                cert.n,
                cert.x,
                cert.u_g,
                cert.u_h,
                cert.word_length_checked,
                cert.verified_horizon
            ));
            to_json(&cert)
        }
        Command::ExtractCubic { monoid, g, h, word_len } => {
            let spec = need()?;
            let m = spec.monoid(monoid)?;
            let (gw, hw) = (word(&m, g, 0)?, word(&m, h, 1)?);
            let cert = free_monoid_certificate(&m, &gw, &hw, &free_params(common))?;
            let t = extract_subdivided_cubic(&cert, *word_len)?;
            let hist = t.degree_histogram();
            lines.push(format!("{} vertices, degree histogram {hist:?}", t.vertex_count()));
            dot_out = Some(dot::export_finite(&t));
            let edges: Vec<(String, String)> = t
                .edges()
                .iter()
                .map(|&(u, v)| (t.label(u).unwrap().to_string(), t.label(v).unwrap().to_string()))
                .collect();
            json!({
                "certificate": cert,
                "word_len": word_len,
                "vertices": t.vertex_count(),
                "degree_histogram": hist,
                "edges": edges,
            })
        }
        Command::Lps { monoid, all_embeddings } => {
            let spec = need()?;
            let owned;
            let input = match (monoid, all_embeddings) {
                (_, true) => LpsInput::AllEmbeddingsOf(&spec.tree),
                (Some(n), false) => {
                    owned = spec.monoid(n)?;
                    LpsInput::Monoid(&owned)
                }
                (None, false) => return Err(CliError::Usage("pass --monoid NAME or --all-embeddings".into())),
            };
            let v = lps_alternative(input, &params, &free_params(common))?;
            let kind = to_json(&v)["kind"].as_str().unwrap_or("?").to_string();
            if let treeemb::monoid::LpsVerdict::SubdividedCubic { tree, degree_histogram, .. } = &v {
                lines.push(format!("{kind}: {} vertices, degree histogram {degree_histogram:?}", tree.vertex_count()));
                dot_out = Some(dot::export_finite(tree));
            } else {
                lines.push(kind);
            }
            to_json(&v)
        }
        Command::Examples { list, show } => match show {
            Some(name) => {
                let ex = gallery::example(name)?;
                let text = SpecFile::from_monoid("M", &ex.monoid).to_string();
                lines.push(text.trim_end().to_string());
                json!({ "name": ex.name, "description": ex.description, "spec": text })
            }
            None => {
                let _ = list;
                let examples = gallery::examples()?;
                for name in gallery::TREE_NAMES {
                    lines.push(format!("tree {name}"));
                }
                for ex in &examples {
                    lines.push(format!("monoid {}: {}", ex.name, ex.description));
                }
                json!({
                    "trees": gallery::TREE_NAMES,
                    "monoids": examples.iter().map(|e| json!({"name": e.name, "description": e.description})).collect::<Vec<_>>(),
                })
            }
        },
    };
    Ok(Report {
        schema: SCHEMA,
        command: command.name(),
        parameters: json!({
            "spec": common.spec,
            "horizon": common.horizon,
            "depth": common.depth,
            "max_len": common.max_len,
            "seed": common.seed,
            "deeper_depth": params.deeper_depth,
            "deeper_max_len": params.deeper_max_len,
            "options": to_json(command),
        }),
        result,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
        summary: lines.join("\n"),
        dot: dot_out,
    })
}

fn free_params(common: &Common) -> FreeParams {
    FreeParams {
        sample: SampleParams {
            seed: common.seed,
            ..SampleParams::default()
        },
        ..FreeParams::new(common.horizon)
    }
}

/// Loads the spec when the command needs one and runs it.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let spec = match &cli.command {
        Command::Examples { .. } => None,
        _ => Some(load_spec(&cli.common)?),
    };
    run_with_spec(&cli.common, &cli.command, spec.as_ref())
}

fn write_to(path: &std::path::Path, text: &str) -> std::io::Result<()> {
    if path.as_os_str() == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text)
    }
}

/// Prints the summary and writes the JSON and DOT outputs that were asked for.
pub fn emit(cli: &Cli, report: &Report) -> Result<(), CliError> {
    let json_to_stdout = cli.common.json.as_ref().is_some_and(|p| p.as_os_str() == "-");
    let dot_to_stdout = cli.common.dot.as_ref().is_some_and(|p| p.as_os_str() == "-");
    if !json_to_stdout && !dot_to_stdout {
        println!("{}", report.summary);
    }
    if let Some(path) = &cli.common.json {
        let text = serde_json::to_string_pretty(report).expect("reports serialize") + "\n";
        write_to(path, &text)?;
    }
    if let Some(path) = &cli.common.dot {
        let text = match &report.dot {
            Some(d) => d.clone(),
            None => {
                let spec = load_spec(&cli.common)?;
                dot::export_tree(&spec.tree, cli.common.depth, None)
            }
        };
        write_to(path, &text)?;
    }
    Ok(())
}
