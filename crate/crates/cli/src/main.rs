use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ntnsim_core::geometry::LinkGeometry;
use ntnsim_core::harness::{
    emit_csv, load_config_params, load_sweep_spec, preset, resolve, run_sweep, tables_provenance,
    Param, ParamSet, ResultTable, SweepSpec, Value,
};
use ntnsim_core::relay::{evaluate_chain, Hop, RelayChain, RelayMode};
use ntnsim_core::{ChannelTables, Error};

/// Link-budget and Shannon-capacity simulator for non-terrestrial links.
#[derive(Parser)]
#[command(name = "ntnsim", version)]
struct Cli {
    /// Directory holding atmosphere.tbl and scenarios.tbl (default: built-in tables).
    #[arg(long, global = true, value_name = "DIR")]
    tables: Option<PathBuf>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Seed for sampled clutter; enables sampled mode.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one ground link, directly or through a HAP relay.
    Link(LinkArgs),
    /// Evaluate an explicit relay chain.
    Chain(ChainArgs),
    /// Run a sweep-spec file.
    Sweep {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
    /// Run a built-in figure sweep.
    Preset {
        /// fig2, fig3 or fig4.
        #[arg(long)]
        name: String,
    },
}

#[derive(Args)]
struct RadioArgs {
    /// Carrier frequency in GHz.
    #[arg(long)]
    fc: Option<f64>,
    /// Transmit power in dBm.
    #[arg(long)]
    txpow: Option<f64>,
    /// Transmit antenna gain in dBi.
    #[arg(long)]
    gtx: Option<f64>,
    /// Receive antenna gain in dBi; needs --temp.
    #[arg(long, conflicts_with = "got")]
    grx: Option<f64>,
    /// Receiver noise temperature in K.
    #[arg(long, requires = "grx")]
    temp: Option<f64>,
    /// Receive G/T in dBi/K.
    #[arg(long)]
    got: Option<f64>,
    /// Bandwidth, e.g. `400MHz`, `2e9` or `auto`.
    #[arg(long)]
    bandwidth: Option<String>,
    /// dense_urban, urban, suburban or rural.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Args)]
struct LinkArgs {
    /// Config file; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Platform altitude in km.
    #[arg(long)]
    alt: Option<f64>,
    /// Elevation angle in degrees.
    #[arg(long)]
    elev: Option<f64>,
    /// direct, relay-af or relay-df.
    #[arg(long)]
    mode: Option<String>,
    /// Relay HAP altitude in km.
    #[arg(long)]
    hap: Option<f64>,
    #[command(flatten)]
    radio: RadioArgs,
}

#[derive(Args)]
struct ChainArgs {
    /// Hop as `high_km:low_km:elevation_deg`, listed from the top of the chain down.
    #[arg(long = "hop", required = true, value_name = "HIGH:LOW:ELEV")]
    hops: Vec<String>,
    #[arg(long, default_value = "af")]
    mode: String,
    #[command(flatten)]
    radio: RadioArgs,
}

fn set(params: &mut ParamSet, p: Param, text: Option<String>) -> ntnsim_core::Result<()> {
    if let Some(t) = text {
        params.insert(p, p.parse_value(&t)?);
    }
    Ok(())
}

fn radio_params(params: &mut ParamSet, r: &RadioArgs) -> ntnsim_core::Result<()> {
    let num = |v: Option<f64>| v.map(|x| x.to_string());
    set(params, Param::FcGhz, num(r.fc))?;
    set(params, Param::TxPowerDbm, num(r.txpow))?;
    set(params, Param::GTxDbi, num(r.gtx))?;
    if r.grx.is_some() || r.got.is_some() {
        // A receive form given on the command line replaces the config's.
        for p in [
            Param::GRxDbi,
            Param::NoiseTemperatureK,
            Param::GOverTDbiPerK,
        ] {
            params.remove(&p);
        }
    }
    set(params, Param::GRxDbi, num(r.grx))?;
    set(params, Param::NoiseTemperatureK, num(r.temp))?;
    set(params, Param::GOverTDbiPerK, num(r.got))?;
    set(params, Param::BandwidthHz, r.bandwidth.clone())?;
    set(params, Param::Scenario, r.scenario.clone())?;
    Ok(())
}

fn seed_params(params: &mut ParamSet, seed: Option<u64>) {
    if let Some(s) = seed {
        params.remove(&Param::LossMode);
        params.insert(Param::Seed, Value::Seed(s));
    }
}

fn describe(params: &ParamSet) -> Vec<String> {
    params.iter().map(|(p, v)| format!("{p} = {v}")).collect()
}

fn link(args: LinkArgs, seed: Option<u64>, tables: &ChannelTables) -> anyhow::Result<ResultTable> {
    let mut params = match &args.config {
        Some(path) => load_config_params(path)?,
        None => ParamSet::new(),
    };
    let num = |v: Option<f64>| v.map(|x| x.to_string());
    set(&mut params, Param::AltitudeKm, num(args.alt))?;
    set(&mut params, Param::ElevationDeg, num(args.elev))?;
    set(&mut params, Param::Mode, args.mode)?;
    set(&mut params, Param::HapAltitudeKm, num(args.hap))?;
    radio_params(&mut params, &args.radio)?;
    seed_params(&mut params, seed);

    let config = resolve(&params)?;
    let result = config.evaluate(tables)?;
    let mut provenance = vec!["ntnsim link".to_string(), tables_provenance(tables)];
    provenance.extend(describe(&params));
    provenance.push(format!("loss mode: {}", config.loss_mode.name()));
    let mut results = Vec::new();
    if result.hops.len() > 1 {
        for (i, hop) in result.hops.iter().enumerate() {
            let mut hop = hop.clone();
            hop.label = format!("hop{i}");
            results.push(hop);
        }
    }
    results.push(result);
    Ok(ResultTable::from_results(results, provenance))
}

fn parse_hop(text: &str) -> ntnsim_core::Result<(f64, f64, f64)> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            Error::Config(format!(
                "hop `{text}`: expected HIGH:LOW:ELEV in km, km, degrees"
            ))
        })?;
    match parts.as_slice() {
        [high, low, elev] => Ok((*high, *low, *elev)),
        _ => Err(Error::Config(format!(
            "hop `{text}`: expected three fields"
        ))),
    }
}

fn chain(
    args: ChainArgs,
    seed: Option<u64>,
    tables: &ChannelTables,
) -> anyhow::Result<ResultTable> {
    let mode: RelayMode = args.mode.parse()?;
    let mut params = ParamSet::new();
    radio_params(&mut params, &args.radio)?;
    seed_params(&mut params, seed);
    let config = resolve(&params)?;

    let hops = args
        .hops
        .iter()
        .enumerate()
        .map(|(i, text)| {
            let (high, low, elev) = parse_hop(text)?;
            let geometry = LinkGeometry::new(low, high, elev).map_err(|e| Error::Chain {
                hop: i,
                reason: e.to_string(),
            })?;
            Ok(Hop::new(geometry, config.radio))
        })
        .collect::<ntnsim_core::Result<Vec<_>>>()?;
    let chain = RelayChain {
        hops,
        mode,
        scenario: config.scenario,
        loss_mode: config.loss_mode,
    };
    let result = evaluate_chain(&chain, tables)?;

    let mut provenance = vec![
        format!("ntnsim chain, mode {mode}"),
        tables_provenance(tables),
    ];
    provenance.extend(
        args.hops
            .iter()
            .enumerate()
            .map(|(i, h)| format!("hop{i} = {h}")),
    );
    provenance.extend(describe(&params));
    provenance.push(format!("loss mode: {}", config.loss_mode.name()));
    let mut results: Vec<_> = result
        .hops
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let mut h = h.clone();
            h.label = format!("hop{i}");
            h
        })
        .collect();
    results.push(result);
    Ok(ResultTable::from_results(results, provenance))
}

fn sweep(
    mut spec: SweepSpec,
    seed: Option<u64>,
    tables: &ChannelTables,
) -> anyhow::Result<ResultTable> {
    if seed.is_some() {
        spec.seed = seed;
    }
    Ok(run_sweep(&spec, tables)?)
}

fn write_output(table: &ResultTable, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            emit_csv(table, &mut file)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            emit_csv(table, &mut stdout).context("writing to stdout")?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let Format::Csv = cli.format;
    let tables = match &cli.tables {
        Some(dir) => ChannelTables::load_dir(dir)?,
        None => ChannelTables::builtin(),
    };
    let table = match cli.command {
        Command::Link(args) => link(args, cli.seed, &tables)?,
        Command::Chain(args) => chain(args, cli.seed, &tables)?,
        Command::Sweep { spec } => sweep(load_sweep_spec(&spec)?, cli.seed, &tables)?,
        Command::Preset { name } => sweep(preset(&name)?, cli.seed, &tables)?,
    };
    if table.rows.is_empty() && !table.errors.is_empty() {
        write_output(&table, cli.out.as_deref())?;
        bail!("every grid point failed; first: {}", table.errors[0].reason);
    }
    write_output(&table, cli.out.as_deref())
}

/// 1 for bad input, 2 for table and I/O problems, 3 for sweep specs and presets.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Spec(_) | Error::Preset { .. }) => 3,
        Some(Error::Table(_) | Error::TableDomain { .. } | Error::Io(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
