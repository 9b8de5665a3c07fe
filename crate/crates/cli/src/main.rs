//! `oac`: validate, convert and inspect annotation documents, and run or
//! query the annotation service.
//!
//! Exit status is 0 on success, 1 when the input fails a check or an
//! operation fails, and 2 on a usage error.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use oac_core::model::Vocabulary;
use oac_core::rdf::{self, Graph, Iri, RdfFormat};
use oac_core::segments::{
    Point, bounding_box, contains_point, parse_media_fragment, parse_svg_constraint, serialize_media_fragment,
};
use oac_core::store::Store;
use oac_core::temporal::{TimeGateRegistry, resolve_annotation};
use oac_service::{AppState, Config, SearchParams};

#[derive(Parser)]
#[command(name = "oac", version, about = "Open Annotation tools")]
struct Cli {
    /// Service configuration file (TOML).
    #[arg(long, global = true, env = "OAC_CONFIG")]
    config: Option<PathBuf>,
    /// Vocabulary override table (TOML).
    #[arg(long, global = true)]
    vocabulary: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every annotation in a document; prints violations as JSON.
    Validate(Input),
    /// Re-serialize a document.
    Convert {
        #[command(flatten)]
        input: Input,
        /// Output format: turtle or ntriples.
        #[arg(long, default_value = "ntriples")]
        to: RdfFormat,
    },
    /// Parse a media fragment and print its canonical form.
    Frag { fragment: String },
    /// Bounding box of an SVG constraint, from a file or inline markup.
    SvgBbox {
        svg: String,
        /// Also test whether the point `x,y` lies inside the shape.
        #[arg(long, value_name = "X,Y")]
        contains: Option<String>,
    },
    /// Print the temporal class of each annotation.
    Classify(Input),
    /// Resolve each annotation against a memento list.
    Resolve {
        #[command(flatten)]
        input: Input,
        /// Lines of `original memento datetime`.
        #[arg(long)]
        mementos: PathBuf,
    },
    /// Run the annotation service until interrupted.
    Serve {
        #[arg(long)]
        listen: Option<std::net::SocketAddr>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        base_url: Option<String>,
    },
    /// Ingest every document listed in a feed.
    Harvest {
        feed: String,
        #[command(flatten)]
        target: Target,
    },
    /// Search stored annotations.
    Search {
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long = "text")]
        q: Option<String>,
        /// `x,y,w,h`; requires --target.
        #[arg(long)]
        region: Option<String>,
        #[command(flatten)]
        store: Target,
    },
    /// Rebuild the search index of a local store.
    Reindex {
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct Input {
    /// Document path, or `-` for standard input.
    file: PathBuf,
    /// Input format; guessed from the extension, else Turtle.
    #[arg(long)]
    format: Option<RdfFormat>,
}

#[derive(clap::Args)]
struct Target {
    /// Talk to a running service instead of the local data directory.
    #[arg(long, conflicts_with = "data_dir")]
    server: Option<String>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

type Outcome = Result<bool, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("oac: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let vocab = || load_vocabulary(cli.vocabulary.as_deref(), cli.config.as_deref());
    match cli.command {
        Command::Validate(input) => validate(&input, &vocab()?),
        Command::Convert { input, to } => {
            let (g, _) = read_graph(&input)?;
            print!("{}", rdf::serialize(&g, to));
            Ok(true)
        }
        Command::Frag { fragment } => {
            let parsed = parse_media_fragment(&fragment).map_err(|e| e.to_string())?;
            let out = json!({
                "canonical": serialize_media_fragment(&parsed.fragment),
                "fragment": parsed.fragment,
                "warnings": parsed.warnings,
            });
            println!("{out}");
            Ok(true)
        }
        Command::SvgBbox { svg, contains } => svg_bbox(&svg, contains.as_deref()),
        Command::Classify(input) => {
            let vocab = vocab()?;
            let (g, uris) = read_annotations(&input, &vocab)?;
            for uri in &uris {
                let a = vocab.from_graph(&g, uri).map_err(|e| e.to_string())?;
                let class = oac_core::model::classify_temporal(&a).map_err(|e| e.to_string())?;
                if uris.len() == 1 {
                    println!("{}", class.name());
                } else {
                    println!("{uri} {}", class.name());
                }
            }
            Ok(true)
        }
        Command::Resolve { input, mementos } => {
            let vocab = vocab()?;
            let text = std::fs::read_to_string(&mementos).map_err(|e| format!("{}: {e}", mementos.display()))?;
            let registry = TimeGateRegistry::import(&text).map_err(|e| format!("{}: {e}", mementos.display()))?;
            let (g, uris) = read_annotations(&input, &vocab)?;
            for uri in &uris {
                let a = vocab.from_graph(&g, uri).map_err(|e| e.to_string())?;
                let resolved = resolve_annotation(&a, &registry).map_err(|e| e.to_string())?;
                println!("{}", serde_json::to_string(&resolved).map_err(|e| e.to_string())?);
            }
            Ok(true)
        }
        Command::Serve {
            listen,
            data_dir,
            base_url,
        } => {
            let mut config = load_config(cli.config.as_deref())?;
            if let Some(v) = cli.vocabulary {
                config.vocabulary = Some(v);
            }
            if let Some(l) = listen {
                config.listen = l;
            }
            if let Some(d) = data_dir {
                config.data_dir = d;
            }
            if base_url.is_some() {
                config.base_url = base_url;
            }
            runtime()?.block_on(async {
                let shutdown = async {
                    let _ = tokio::signal::ctrl_c().await;
                };
                oac_service::serve(config, shutdown).await.map_err(|e| e.to_string())
            })?;
            Ok(true)
        }
        Command::Harvest { feed, target } => harvest(&feed, target, cli.config.as_deref(), cli.vocabulary),
        Command::Search {
            target,
            from,
            to,
            q,
            region,
            store,
        } => {
            let params = SearchParams {
                target,
                from,
                to,
                q,
                region,
            };
            search(params, store, cli.config.as_deref(), &vocab)
        }
        Command::Reindex { data_dir } => {
            let dir = match data_dir {
                Some(d) => d,
                None => load_config(cli.config.as_deref())?.data_dir,
            };
            let store = Store::open(dir.join("store"), vocab()?).map_err(|e| e.to_string())?;
            let records = store.reindex().map_err(|e| e.to_string())?;
            println!("{}", json!({ "records": records }));
            Ok(true)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, String> {
    Config::load(path).map_err(|e| e.to_string())
}

fn load_vocabulary(path: Option<&Path>, config: Option<&Path>) -> Result<Vocabulary, String> {
    let path = match path {
        Some(p) => Some(p.to_path_buf()),
        None if config.is_some() => load_config(config)?.vocabulary,
        None => None,
    };
    match path {
        None => Ok(Vocabulary::default()),
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            Vocabulary::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn runtime() -> Result<tokio::runtime::Runtime, String> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())
}

fn read_graph(input: &Input) -> Result<(Graph, RdfFormat), String> {
    let name = input.file.display().to_string();
    let text = if name == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        s
    } else {
        std::fs::read_to_string(&input.file).map_err(|e| format!("{name}: {e}"))?
    };
    let format = input
        .format
        .or_else(|| RdfFormat::from_extension(&name))
        .unwrap_or(RdfFormat::Turtle);
    let g = rdf::parse(&text, format).map_err(|e| format!("{name}: {e}"))?;
    Ok((g, format))
}

fn read_annotations(input: &Input, vocab: &Vocabulary) -> Result<(Graph, Vec<Iri>), String> {
    let (g, _) = read_graph(input)?;
    let uris = vocab.annotation_uris(&g);
    if uris.is_empty() {
        return Err(format!("{}: document contains no annotation", input.file.display()));
    }
    Ok((g, uris))
}

fn validate(input: &Input, vocab: &Vocabulary) -> Outcome {
    let (g, uris) = read_annotations(input, vocab)?;
    let violations: Vec<_> = uris.iter().flat_map(|u| vocab.validate_graph(&g, u)).collect();
    if violations.is_empty() {
        return Ok(true);
    }
    println!("{}", serde_json::to_string(&violations).map_err(|e| e.to_string())?);
    Ok(false)
}

fn svg_bbox(svg: &str, contains: Option<&str>) -> Outcome {
    let source = if svg.trim_start().starts_with('<') {
        svg.to_string()
    } else {
        std::fs::read_to_string(svg).map_err(|e| format!("{svg}: {e}"))?
    };
    let shape = parse_svg_constraint(&source).map_err(|e| e.to_string())?;
    let bbox = bounding_box(&shape);
    let out = match contains {
        None => json!(bbox),
        Some(p) => {
            let (x, y) = p
                .split_once(',')
                .and_then(|(x, y)| Some((x.trim().parse().ok()?, y.trim().parse().ok()?)))
                .ok_or_else(|| format!("point must be x,y, got {p:?}"))?;
            json!({ "bbox": bbox, "contains": contains_point(&shape, Point::new(x, y)) })
        }
    };
    println!("{out}");
    Ok(true)
}

fn harvest(feed: &str, target: Target, config: Option<&Path>, vocabulary: Option<PathBuf>) -> Outcome {
    let report: serde_json::Value = match target.server {
        Some(server) => runtime()?.block_on(async {
            let res = reqwest::Client::new()
                .post(format!("{}/harvest", server.trim_end_matches('/')))
                .header("content-type", "application/json")
                .body(json!({ "feed": feed }).to_string())
                .send()
                .await
                .map_err(|e| e.to_string())?;
            response_json(res).await
        })?,
        None => {
            let feed = Iri::parse(feed).map_err(|e| e.to_string())?;
            let mut config = load_config(config)?;
            if let Some(d) = target.data_dir {
                config.data_dir = d;
            }
            if vocabulary.is_some() {
                config.vocabulary = vocabulary;
            }
            let state = AppState::open(&config).map_err(|e| e.to_string())?;
            let report = runtime()?
                .block_on(oac_service::harvest_feed(&state, &feed))
                .map_err(|e| e.to_string())?;
            serde_json::to_value(report).map_err(|e| e.to_string())?
        }
    };
    println!("{report}");
    Ok(report["failures"].as_array().is_none_or(|f| f.is_empty()))
}

fn search(
    params: SearchParams,
    target: Target,
    config: Option<&Path>,
    vocab: &dyn Fn() -> Result<Vocabulary, String>,
) -> Outcome {
    let hits: serde_json::Value = match target.server {
        Some(server) => {
            let query: Vec<(&str, &String)> = [
                ("target", &params.target),
                ("from", &params.from),
                ("to", &params.to),
                ("q", &params.q),
                ("region", &params.region),
            ]
            .into_iter()
            .filter_map(|(k, v)| Some((k, v.as_ref()?)))
            .collect();
            let url = reqwest::Url::parse_with_params(&format!("{}/search", server.trim_end_matches('/')), query)
                .map_err(|e| e.to_string())?;
            runtime()?.block_on(async {
                let res = reqwest::get(url).await.map_err(|e| e.to_string())?;
                response_json(res).await
            })?
        }
        None => {
            let q = params.to_query()?;
            let dir = match target.data_dir {
                Some(d) => d,
                None => load_config(config)?.data_dir,
            };
            let store = Store::open(dir.join("store"), vocab()?).map_err(|e| e.to_string())?;
            json!(store.search(&q).map_err(|e| e.to_string())?)
        }
    };
    for uri in hits.as_array().into_iter().flatten() {
        println!("{}", uri.as_str().unwrap_or_default());
    }
    Ok(true)
}

async fn response_json(res: reqwest::Response) -> Result<serde_json::Value, String> {
    let status = res.status();
    let text = res.text().await.map_err(|e| e.to_string())?;
    let body: serde_json::Value = serde_json::from_str(&text).map_err(|_| format!("HTTP {status}: {text}"))?;
    if status.is_success() {
        Ok(body)
    } else {
        Err(format!("HTTP {status}: {}", body["error"].as_str().unwrap_or(&text)))
    }
}
