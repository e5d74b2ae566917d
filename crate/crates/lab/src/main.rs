use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use taylorlab::config::{load_config, ScenarioConfig};
use taylorlab::figures::{reproduce_figure, FigureId};
use taylorlab::report::AggregateReport;
use taylorlab::scenario::{run_scenario, LabError, OutputFormat, RunOptions};
use taylorlab::{presets, ComparisonReport};
use taylorlab_core::convergence::{estimate_radius, riccati_multistage_radius, riccati_radius};
use taylorlab_core::exact::sir_endpoints;
use taylorlab_core::field::SirParams;
use taylorlab_core::series::generate_taylor_solution;
use taylorlab_core::ModelInstance;

#[derive(Parser)]
#[command(
    name = "taylorlab",
    version,
    about = "Time-power-series laboratory for polynomial ODEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Svg => OutputFormat::Svg,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Args)]
struct Overrides {
    /// Series order, overriding the scenario.
    #[arg(long)]
    order: Option<usize>,
    /// Reference integrator tolerance, overriding the scenario.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a preset name.
    Run {
        config: String,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Reproduce one figure: fig1, fig2, fig3 or fig4.
    Figure {
        id: FigureId,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every preset and figure and print one reproduction table.
    ReportAll {
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Radius of convergence: closed form for the Riccati model, otherwise
    /// estimated from the series of a scenario.
    Radius {
        /// Riccati initial value.
        #[arg(long, conflicts_with = "scenario")]
        y0: Option<f64>,
        /// Re-expansion time along the Y0 = 0 Riccati trajectory.
        #[arg(long, conflicts_with = "scenario")]
        at: Option<f64>,
        /// Scenario file or preset name.
        #[arg(long)]
        scenario: Option<String>,
        /// Series order used for the estimate.
        #[arg(long, default_value_t = 30)]
        order: usize,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Final-size, epidemic-over and peak values of the SIR model.
    Endpoints {
        #[arg(long, default_value_t = 0.01)]
        beta: f64,
        #[arg(long, default_value_t = 0.02)]
        gamma: f64,
        #[arg(long, default_value_t = 20.0)]
        x0: f64,
        #[arg(long, default_value_t = 15.0)]
        y0: f64,
        #[arg(long, default_value_t = 10.0)]
        z0: f64,
    },
    /// List the bundled presets.
    Presets,
}

enum Failure {
    Usage(String),
    Rows,
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn resolve(config: &str) -> Result<ScenarioConfig, Failure> {
    let config_error =
        |errors: Vec<taylorlab::config::ConfigError>| Failure::from(LabError::Config(errors));
    let path = Path::new(config);
    if path.exists() {
        return load_config(path).map_err(config_error);
    }
    match presets::load(config) {
        Some(parsed) => parsed.map_err(config_error),
        None => Err(Failure::Usage(format!(
            "{config}: no such file or preset (presets: {})",
            presets::names().collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn print_report(report: &ComparisonReport) {
    let mut text = Vec::new();
    report.write_text(&mut text).expect("writing to memory");
    print!("{}", String::from_utf8_lossy(&text));
}

fn run(config: &str, output: &OutputArgs, overrides: &Overrides) -> Result<(), Failure> {
    let mut config = resolve(config)?;
    config
        .apply_overrides(overrides.order, overrides.tol)
        .map_err(|e| Failure::from(LabError::Config(e)))?;
    let out_dir = config
        .output
        .clone()
        .unwrap_or_else(|| output.out.join(&config.label));
    let outcome = run_scenario(
        &config,
        &RunOptions {
            out_dir: out_dir.clone(),
            format: output.format.into(),
        },
    )?;
    print_report(&outcome.report);
    println!("artifacts in {}", out_dir.display());
    if outcome.report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Rows)
    }
}

fn figure(id: FigureId, output: &OutputArgs) -> Result<(), Failure> {
    let outcome = reproduce_figure(id, &output.out, output.format.into())?;
    print_report(&outcome.report);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    if outcome.report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Rows)
    }
}

fn report_all(output: &OutputArgs, overrides: &Overrides) -> Result<(), Failure> {
    let mut configs = Vec::new();
    for name in presets::names() {
        let mut config = resolve(name)?;
        config
            .apply_overrides(overrides.order, overrides.tol)
            .map_err(|e| Failure::from(LabError::Config(e)))?;
        configs.push(config);
    }
    let format: OutputFormat = output.format.into();
    let out = &output.out;
    // Scenarios are independent; each writes to its own directory.
    let results: Vec<Result<ComparisonReport, LabError>> = std::thread::scope(|scope| {
        let scenarios: Vec<_> = configs
            .iter()
            .map(|config| {
                scope.spawn(move || {
                    let opts = RunOptions {
                        out_dir: out.join(&config.label),
                        format,
                    };
                    run_scenario(config, &opts).map(|o| o.report)
                })
            })
            .collect();
        let figures: Vec<_> = FigureId::ALL
            .into_iter()
            .map(|id| {
                scope.spawn(move || {
                    reproduce_figure(id, &out.join("figures"), format).map(|o| o.report)
                })
            })
            .collect();
        scenarios
            .into_iter()
            .chain(figures)
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });
    let mut aggregate = AggregateReport::default();
    for r in results {
        aggregate.reports.push(r?);
    }
    let mut text = Vec::new();
    aggregate.write_text(&mut text).expect("writing to memory");
    print!("{}", String::from_utf8_lossy(&text));
    let write = |name: &str, body: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| {
        let mut buf = Vec::new();
        body(&mut buf).expect("writing to memory");
        let path = out.join(name);
        std::fs::write(&path, buf).map_err(|source| LabError::Io { path, source })
    };
    write("report.txt", &|b| aggregate.write_text(b))?;
    write("report.csv", &|b| aggregate.write_csv(b))?;
    if aggregate.all_pass() {
        Ok(())
    } else {
        Err(Failure::Rows)
    }
}

fn radius(
    y0: Option<f64>,
    at: Option<f64>,
    scenario: Option<&str>,
    order: usize,
    window: usize,
) -> Result<(), Failure> {
    let usage = |e: taylorlab_core::Error| Failure::Usage(e.to_string());
    if let Some(name) = scenario {
        let config = resolve(name)?;
        let model = config.model.instance().map_err(usage)?;
        let series = generate_taylor_solution(&model, order).map_err(usage)?;
        for (i, name) in model.component_names().iter().enumerate() {
            match estimate_radius(series.component(i), window) {
                Ok(r) => println!("{name}: {} ({})", r.radius, r.detail),
                Err(e) => println!("{name}: not estimable ({e})"),
            }
        }
        return Ok(());
    }
    if let Some(t) = at {
        let r = riccati_multistage_radius(t).map_err(usage)?;
        println!("{} ({})", r.radius, r.detail);
        return Ok(());
    }
    let r = riccati_radius(y0.unwrap_or(0.0)).map_err(usage)?;
    println!("{} ({})", r.radius, r.detail);
    Ok(())
}

fn endpoints(beta: f64, gamma: f64, x0: f64, y0: f64, z0: f64) -> Result<(), Failure> {
    let usage = |e: taylorlab_core::Error| Failure::Usage(e.to_string());
    let model = ModelInstance::sir(SirParams::new(beta, gamma).map_err(usage)?, x0, y0, z0)
        .map_err(usage)?;
    let e = sir_endpoints(&model).map_err(usage)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    println!("epidemic_occurs,{}", e.epidemic_occurs);
    println!("x_limit,{}", e.x_limit);
    println!("x_over,{}", opt(e.x_over));
    println!("x_peak,{}", opt(e.x_peak));
    println!("y_peak,{}", opt(e.y_peak));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            config,
            output,
            overrides,
        } => run(config, output, overrides),
        Command::Figure { id, output } => figure(*id, output),
        Command::ReportAll { output, overrides } => report_all(output, overrides),
        Command::Radius {
            y0,
            at,
            scenario,
            order,
            window,
        } => radius(*y0, *at, scenario.as_deref(), *order, *window),
        Command::Endpoints {
            beta,
            gamma,
            x0,
            y0,
            z0,
        } => endpoints(*beta, *gamma, *x0, *y0, *z0),
        Command::Presets => {
            for name in presets::names() {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rows) => ExitCode::from(1),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
