use std::fs;
use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use kichabi_core::analytics::report;
use kichabi_core::directory::{decode_snapshot, encode_snapshot, generate_synthetic, load_csv, write_csv};
use kichabi_core::search::EvalMode;
use kichabi_core::session::Strings;
use kichabi_core::Directory;
use kichabi_server::bench::{bench, BenchMode};
use kichabi_server::disclaimer::DisclaimerRegistry;
use kichabi_server::gateway::{Gateway, GatewayConfig};
use kichabi_server::hitlog::HitLog;
use kichabi_server::http::{router, AppState};
use kichabi_server::store::MemoryStore;
use kichabi_server::sync::{ActionStore, SyncService};
use kichabi_server::whitelist::Whitelist;
use tracing::info;
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "kichabi", version, about = "Agricultural business directory over USSD and offline sync")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic directory snapshot.
    Gen {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the directory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check a CSV or snapshot and print a summary. With both, also write the
    /// snapshot of the CSV.
    Validate {
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        whitelist: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 4096)]
        cache_capacity: usize,
        /// Render every screen afresh.
        #[arg(long)]
        no_cache: bool,
        #[arg(long, default_value = "hits.log")]
        hitlog: PathBuf,
        #[arg(long, default_value = "actions.log")]
        actions: PathBuf,
        /// Numbers that have seen the disclaimer; in memory when omitted.
        #[arg(long)]
        disclaimers: Option<PathBuf>,
        /// key=value overrides for screen text.
        #[arg(long)]
        strings: Option<PathBuf>,
        /// Static files served for any unmatched path.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
    /// Compute usage metrics from the hit log and action store.
    Report {
        #[arg(long)]
        hitlog: PathBuf,
        #[arg(long)]
        actions: PathBuf,
        #[arg(long)]
        demographics: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time random walks through the gateway in-process.
    Bench {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 1000)]
        walks: usize,
        #[arg(long, value_enum, default_value = "both")]
        mode: BenchMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_snapshot(path: &Path) -> Result<Directory> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode_snapshot(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn read_optional(path: &Path) -> Result<Vec<u8>> {
    if path.exists() {
        fs::read(path).with_context(|| format!("reading {}", path.display()))
    } else {
        Ok(Vec::new())
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn summary(d: &Directory) -> String {
    format!(
        "{} businesses, {} districts, {} villages, {} subvillages, version {}",
        d.len(),
        d.geo().districts().count(),
        d.geo().village_count(),
        d.geo().subvillage_count(),
        d.version()
    )
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt().with_env_filter(EnvFilter::from_default_env()).with_writer(std::io::stderr).init();
    match Cli::parse().command {
        Command::Gen { seed, n, out, csv } => {
            let d = generate_synthetic(seed, n)?;
            let bytes = encode_snapshot(&d);
            fs::write(&out, &bytes).with_context(|| format!("writing {}", out.display()))?;
            if let Some(csv) = csv {
                write_csv(&d, fs::File::create(&csv)?)?;
            }
            println!("{} ({} bytes)", summary(&d), bytes.len());
        }
        Command::Validate { csv, snapshot } => match (csv, snapshot) {
            (Some(csv), snapshot) => {
                let d = load_csv(&csv)?;
                println!("{}", summary(&d));
                if let Some(out) = snapshot {
                    fs::write(&out, encode_snapshot(&d))?;
                }
            }
            (None, Some(snapshot)) => println!("{}", summary(&read_snapshot(&snapshot)?)),
            (None, None) => bail!("give --csv or --snapshot"),
        },
        Command::Serve {
            snapshot,
            whitelist,
            port,
            host,
            cache_capacity,
            no_cache,
            hitlog,
            actions,
            disclaimers,
            strings,
            ui_dir,
        } => {
            let directory = read_snapshot(&snapshot)?;
            let whitelist = Whitelist::parse(&fs::read_to_string(&whitelist)?)
                .with_context(|| format!("loading {}", whitelist.display()))?;
            let strings = match strings {
                Some(p) => Strings::with_overrides(&fs::read_to_string(&p)?)?,
                None => Strings::default(),
            };
            let config = GatewayConfig {
                cache_capacity: if no_cache { None } else { NonZeroUsize::new(cache_capacity) },
                mode: EvalMode::Indexed,
                strings,
            };
            let disclaimers = match disclaimers {
                Some(p) => DisclaimerRegistry::open(&p)?,
                None => DisclaimerRegistry::in_memory(),
            };
            let gateway = Arc::new(Gateway::with_parts(
                directory,
                whitelist,
                config,
                Box::new(MemoryStore::default()),
                HitLog::open(&hitlog)?,
                disclaimers,
            ));
            let sync = Arc::new(SyncService::new(Arc::clone(&gateway), ActionStore::open(&actions)?));
            let app = router(AppState { gateway: Arc::clone(&gateway), sync }, ui_dir);
            let addr: SocketAddr = format!("{host}:{port}").parse()?;
            let listener = tokio::net::TcpListener::bind(addr).await?;
            info!(%addr, version = %gateway.current().version(), "listening");
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await?;
            gateway.hitlog().flush()?;
        }
        Command::Report { hitlog, actions, demographics, out } => {
            let hits = read_optional(&hitlog)?;
            let acts = read_optional(&actions)?;
            let demo = demographics.map(|p| fs::read(&p)).transpose()?;
            let r = report(&hits, &acts, demo.as_deref())?;
            write_or_print(out.as_deref(), &serde_json::to_string_pretty(&r)?)?;
        }
        Command::Bench { snapshot, walks, mode, seed, out } => {
            let d = read_snapshot(&snapshot)?;
            let r = tokio::task::spawn_blocking(move || bench(&d, walks, mode, seed)).await??;
            write_or_print(out.as_deref(), &serde_json::to_string_pretty(&r)?)?;
        }
    }
    Ok(())
}
