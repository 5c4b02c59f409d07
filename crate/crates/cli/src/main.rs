use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hyperwitness::datalab::{REFERENCE_TABLE_FILE, REFERENCE_TABLE_JSON};
use hyperwitness::noise::DEFAULT_THRESHOLD_TOLERANCE;
use hyperwitness::{
    delay_grid, density, entropy_of_entanglement, evaluate_witness, fit_visibility, hyper_state,
    parse_table, pattern, read_pattern_csv, sample_pattern, settings_required,
    witness_from_measurements, witness_noise_threshold, witness_operator, Bipartition, Dof,
    FringeConfig, NoiseChannel, NoiseModel, PatternPoint, Stage, Witness, WitnessForm, WitnessKind,
};

const TABLE_DIR_VAR: &str = "HYPERWITNESS_TABLE_DIR";

#[derive(Parser)]
#[command(
    name = "hyperwitness",
    version,
    about = "Hyperentangled two-photon states and their witnesses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the hyperentangled state for the given Bell phases.
    State {
        /// Phases of the pi, k and c Bell pairs in radians.
        #[arg(long, value_parser = parse_phases, default_value = "0,0,0", allow_hyphen_values = true)]
        phases: Phases,
    },
    /// Evaluate a witness on the (optionally noisy) ideal state.
    Witness(WitnessArgs),
    /// Tabulate every witness against a noise level.
    NoiseSweep {
        /// `start:stop:step`
        #[arg(long, value_parser = parse_grid, default_value = "0:1:0.01")]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = ChannelArg::White)]
        channel: ChannelArg,
        /// Write CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Witnesses from a measured stabilizer table.
    Table {
        #[command(subcommand)]
        action: TableAction,
    },
    /// Simulate or fit coincidence interference patterns.
    Fringe {
        #[command(subcommand)]
        action: FringeAction,
    },
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: WitnessKind,
    #[arg(long, value_enum, default_value_t = FormArg::Evaluated)]
    form: FormArg,
    /// `white:p`, `dof-white:p`, `dephase:<dof>:q` or `visibility:<dof>:v`; repeatable.
    #[arg(long, value_parser = parse_noise)]
    noise: Vec<NoiseSpec>,
    /// NoiseModel JSON applied before any `--noise` overrides.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Also report the noise level at which the witness reaches zero.
    #[arg(long, value_enum)]
    threshold: Option<ChannelArg>,
}

#[derive(Subcommand)]
enum TableAction {
    /// Print a witness value and its uncertainty.
    Eval {
        #[arg(long, value_parser = parse_kind)]
        witness: WitnessKind,
        #[arg(long, value_enum, default_value_t = FormArg::Evaluated)]
        form: FormArg,
        /// Table JSON; defaults to the bundled table.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FringeAction {
    /// Write a pattern as CSV.
    Sim {
        #[command(flatten)]
        setup: FringeSetup,
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
        #[arg(long, default_value_t = 1000.0)]
        baseline: f64,
        /// Half width of the delay scan in micrometers.
        #[arg(long, default_value_t = 300.0)]
        range: f64,
        #[arg(long, default_value_t = 121)]
        points: usize,
        /// Seconds per point; enables Poisson counting noise.
        #[arg(long, requires = "seed")]
        integration_time: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit visibility, envelope width and baseline to a pattern CSV.
    Fit {
        #[command(flatten)]
        setup: FringeSetup,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct FringeSetup {
    #[arg(long, value_parser = parse_stage, default_value = "first")]
    stage: Stage,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phase: f64,
    #[arg(long, default_value_t = 728.0)]
    wavelength: f64,
    #[arg(long, default_value_t = 6.0)]
    bandwidth: f64,
    #[arg(long, default_value_t = 1.0)]
    dephasing_factor: f64,
}

impl FringeSetup {
    fn config(&self) -> FringeConfig {
        FringeConfig {
            wavelength_nm: self.wavelength,
            bandwidth_nm: self.bandwidth,
            phase: self.phase,
            stage: self.stage,
            dephasing_factor: self.dephasing_factor,
            ..FringeConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Evaluated,
    Printed,
}

impl From<FormArg> for WitnessForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Evaluated => WitnessForm::AsEvaluated,
            FormArg::Printed => WitnessForm::AsPrinted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    White,
    DofWhite,
}

impl From<ChannelArg> for NoiseChannel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::White => NoiseChannel::White,
            ChannelArg::DofWhite => NoiseChannel::DofWhite,
        }
    }
}

#[derive(Clone, Copy)]
enum NoiseSpec {
    White(f64),
    DofWhite(f64),
    Dephase(Dof, f64),
    Visibility(Dof, f64),
}

#[derive(Clone, Copy)]
struct Phases([f64; 3]);

#[derive(Clone, Copy)]
struct Grid {
    start: f64,
    stop: f64,
    step: f64,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

fn parse_kind(s: &str) -> Result<WitnessKind, String> {
    s.parse().map_err(|e: hyperwitness::Error| e.to_string())
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse().map_err(|e: hyperwitness::Error| e.to_string())
}

fn parse_number(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

fn parse_phases(s: &str) -> Result<Phases, String> {
    let parts = s
        .split(',')
        .map(|p| parse_number(p.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let [pi, k, c] = parts.as_slice() else {
        return Err(format!("expected three comma-separated phases, got `{s}`"));
    };
    Ok(Phases([*pi, *k, *c]))
}

fn parse_noise(s: &str) -> Result<NoiseSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let dof = |d: &str| d.parse::<Dof>().map_err(|e| e.to_string());
    match parts.as_slice() {
        ["white", p] => Ok(NoiseSpec::White(parse_number(p)?)),
        ["dof-white", p] => Ok(NoiseSpec::DofWhite(parse_number(p)?)),
        ["dephase", d, q] => Ok(NoiseSpec::Dephase(dof(d)?, parse_number(q)?)),
        ["visibility", d, v] => Ok(NoiseSpec::Visibility(dof(d)?, parse_number(v)?)),
        _ => Err(format!(
            "expected white:p, dof-white:p, dephase:<dof>:q or visibility:<dof>:v, got `{s}`"
        )),
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got `{s}`"));
    };
    let grid = Grid {
        start: parse_number(start)?,
        stop: parse_number(stop)?,
        step: parse_number(step)?,
    };
    if !grid.start.is_finite()
        || !grid.stop.is_finite()
        || !grid.step.is_finite()
        || grid.step <= 0.0
        || grid.stop < grid.start
    {
        return Err(format!(
            "grid `{s}` needs start <= stop and a positive step"
        ));
    }
    if (grid.stop - grid.start) / grid.step > 1e6 {
        return Err(format!("grid `{s}` has too many points"));
    }
    Ok(grid)
}

enum Failure {
    Domain(hyperwitness::Error),
    Io { path: PathBuf, message: String },
}

impl From<hyperwitness::Error> for Failure {
    fn from(e: hyperwitness::Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn io(path: &Path, e: impl ToString) -> Self {
        Failure::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Domain(e) => {
                let mut v =
                    serde_json::to_value(e).unwrap_or_else(|_| json!({ "error": "Unknown" }));
                if let Value::Object(map) = &mut v {
                    map.insert("message".into(), Value::String(e.to_string()));
                }
                v
            }
            Failure::Io { path, message } => json!({
                "error": "Io",
                "detail": { "path": path.display().to_string(), "message": message },
            }),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Rounds to six significant digits.
fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Six significant digits as text, switching to exponent form for very
/// small or very large magnitudes.
fn sig6_text(x: f64) -> String {
    let r = sig6(x);
    if r != 0.0 && r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

fn emit(value: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Failure::io(Path::new("<stdout>"), e))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::io(p, e))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

#[derive(Serialize)]
struct Amplitude {
    index: usize,
    ket: String,
    re: f64,
    im: f64,
}

fn run_state(Phases(phases): Phases) -> Outcome {
    let psi = hyper_state(phases[0], phases[1], phases[2])?;
    let amplitudes: Vec<Amplitude> = psi
        .support(1e-12)
        .into_iter()
        .map(|(index, a)| Amplitude {
            index,
            ket: psi.ket_label(index),
            re: sig6(a.re),
            im: sig6(a.im),
        })
        .collect();
    let entropy = entropy_of_entanglement(&psi, &Bipartition::parties())?;
    emit(&json!({
        "phases": phases.iter().map(|&p| sig6(p)).collect::<Vec<_>>(),
        "amplitudes": amplitudes,
        "entropy": sig6(entropy),
    }))
}

fn run_witness(args: &WitnessArgs) -> Outcome {
    let mut model = match &args.model {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            NoiseModel::from_json(&text)?
        }
        None => NoiseModel::default(),
    };
    for spec in &args.noise {
        match *spec {
            NoiseSpec::White(p) => model.white_fraction = p,
            NoiseSpec::DofWhite(p) => model.dof_white_fraction = p,
            NoiseSpec::Dephase(d, q) => model.dephase.set(d, q),
            NoiseSpec::Visibility(d, v) => model.visibility.set(d, v),
        }
    }
    let w = Witness {
        kind: args.kind,
        form: args.form.into(),
    };
    let value = evaluate_witness(&model.state()?, w)?;
    let settings = settings_required(&witness_operator(w))?;
    let mut report = json!({
        "witness": args.kind.to_string(),
        "form": match args.form {
            FormArg::Evaluated => "evaluated",
            FormArg::Printed => "printed",
        },
        "value": sig6(value),
        "settings": settings,
        "noise": model,
    });
    if let Some(channel) = args.threshold {
        let channel = NoiseChannel::from(channel);
        let p = witness_noise_threshold(w, channel, DEFAULT_THRESHOLD_TOLERANCE)?;
        report["threshold"] = json!({ "channel": channel.to_string(), "p": sig6(p) });
    }
    emit(&report)
}

fn run_noise_sweep(grid: Grid, channel: ChannelArg, out: Option<&Path>) -> Outcome {
    let channel = NoiseChannel::from(channel);
    let ideal = density(&hyper_state(0.0, 0.0, 0.0)?);
    let rows = grid
        .points()
        .into_par_iter()
        .map(|p| {
            let rho = channel.apply(&ideal, p)?;
            let mut row = vec![sig6(p)];
            for kind in WitnessKind::ALL {
                row.push(sig6(evaluate_witness(&rho, kind)?));
            }
            Ok(row)
        })
        .collect::<hyperwitness::Result<Vec<_>>>()?;
    let path = out.unwrap_or(Path::new("<stdout>"));
    let mut writer = csv::Writer::from_writer(output(out)?);
    let io_err = |e: csv::Error| Failure::io(path, e);
    writer
        .write_record(["p", "W_pi", "W_k", "W_c", "W_2", "W_3"])
        .map_err(io_err)?;
    for row in rows {
        writer
            .write_record(row.iter().map(|&v| sig6_text(v)))
            .map_err(io_err)?;
    }
    writer.flush().map_err(|e| Failure::io(path, e))
}

fn load_table(file: Option<&Path>) -> Result<(String, hyperwitness::StabilizerTable), Failure> {
    let path = match file {
        Some(p) => Some(p.to_path_buf()),
        None => {
            std::env::var_os(TABLE_DIR_VAR).map(|dir| Path::new(&dir).join(REFERENCE_TABLE_FILE))
        }
    };
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Failure::io(&p, e))?;
            Ok((p.display().to_string(), parse_table(&text)?))
        }
        None => Ok(("bundled".into(), parse_table(REFERENCE_TABLE_JSON)?)),
    }
}

fn run_table_eval(kind: WitnessKind, form: FormArg, file: Option<&Path>) -> Outcome {
    let (source, table) = load_table(file)?;
    let m = witness_from_measurements(
        &table,
        Witness {
            kind,
            form: form.into(),
        },
    )?;
    emit(&json!({
        "witness": kind.to_string(),
        "value": sig6(m.value),
        "sigma": sig6(m.sigma),
        "table": source,
    }))
}

#[allow(clippy::too_many_arguments)]
fn run_fringe_sim(
    setup: &FringeSetup,
    visibility: f64,
    baseline: f64,
    range: f64,
    points: usize,
    integration_time: Option<f64>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Outcome {
    let cfg = FringeConfig {
        visibility,
        baseline,
        ..setup.config()
    };
    if !range.is_finite() || range <= 0.0 {
        return Err(hyperwitness::Error::InvalidParameter(format!(
            "range {range} must be positive"
        ))
        .into());
    }
    let delays = delay_grid(range, points);
    let pts: Vec<PatternPoint> = match (integration_time, seed) {
        (Some(t), Some(seed)) => sample_pattern(&cfg, &delays, t, seed)?,
        _ => pattern(&cfg, &delays)?,
    };
    let path = out.unwrap_or(Path::new("<stdout>"));
    hyperwitness::write_pattern_csv(&pts, output(out)?, sig6_text).map_err(|e| match e {
        hyperwitness::Error::ParseError { message, .. } => Failure::io(path, message),
        other => other.into(),
    })
}

fn run_fringe_fit(setup: &FringeSetup, input: &Path) -> Outcome {
    let file = File::open(input).map_err(|e| Failure::io(input, e))?;
    let pts = read_pattern_csv(file)?;
    let fit = fit_visibility(&pts, &setup.config())?;
    let mv =
        |m: hyperwitness::MeasuredValue| json!({ "value": sig6(m.value), "sigma": sig6(m.sigma) });
    emit(&json!({
        "visibility": mv(fit.visibility),
        "fwhm_um": mv(fit.fwhm_um),
        "baseline": mv(fit.baseline),
        "iterations": fit.iterations,
        "points": pts.len(),
    }))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::State { phases } => run_state(phases),
        Command::Witness(args) => run_witness(&args),
        Command::NoiseSweep { grid, channel, out } => {
            run_noise_sweep(grid, channel, out.as_deref())
        }
        Command::Table {
            action:
                TableAction::Eval {
                    witness,
                    form,
                    file,
                },
        } => run_table_eval(witness, form, file.as_deref()),
        Command::Fringe { action } => match action {
            FringeAction::Sim {
                setup,
                visibility,
                baseline,
                range,
                points,
                integration_time,
                seed,
                out,
            } => run_fringe_sim(
                &setup,
                visibility,
                baseline,
                range,
                points,
                integration_time,
                seed,
                out.as_deref(),
            ),
            FringeAction::Fit { setup, input } => run_fringe_fit(&setup, &input),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(1)
        }
    }
}
