use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use toml::{Table, Value};

use rotalign::io::config::{parse_config_table, ResolvedConfig};
use rotalign::io::write_outputs;
use rotalign::oracle::oracle_propagate;
use rotalign::propagator::propagate;
use rotalign::state::initial_eigenstate;
use rotalign::sweep::{run_sweep, Figure, RunResult, RunSettings};

#[derive(Parser)]
#[command(
    name = "rotalign",
    version,
    about = "Laser alignment of linear rigid rotors (split-operator TDSE)"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a single configuration.
    Simulate(Common),
    /// Propagate every combination of the swept axes.
    Sweep(Common),
    /// Compare the split-operator trajectory with the RK4 reference.
    CompareOracle {
        #[command(flatten)]
        common: Common,
        /// Largest accepted |Δ⟨cos²θ⟩|; exit status is 2 above it.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// One color, Δω ∈ {100, 400, 900} × τ ∈ {0.05, 0.5, 5}.
    Fig1(Common),
    /// Two colors of equal amplitude, same grid as fig1.
    Fig2(Common),
    /// Two colors at τ = 0.05 with F₂/F₁ ∈ {1, √2}.
    Fig3(Common),
    /// Two colors at τ = 0.05 with t₂/t₁ ∈ {1, 1.5, 2}.
    Fig4(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    OneColor,
    TwoColor,
}

#[derive(Clone, Copy, ValueEnum)]
enum Interaction {
    CycleAveraged,
    FullCarrier,
}

#[derive(Clone, Copy, ValueEnum)]
enum DtControlArg {
    Fixed,
    Richardson,
}

/// Flags shared by every subcommand. Each flag overrides the matching key of
/// `--config`; see docs/config.md for meanings and defaults.
#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    #[arg(long, short)]
    workers: Option<usize>,

    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    delta_omega: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    tau_fwhm: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    amplitude_ratio: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    delay_ratio: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum)]
    interaction: Option<Interaction>,
    #[arg(long, allow_negative_numbers = true)]
    delta_omega_mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta_omega_perp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long)]
    j_max: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<i32>,
    #[arg(long)]
    j_initial: Option<usize>,
    #[arg(long)]
    n_nodes: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, value_enum)]
    dt_control: Option<DtControlArg>,
    #[arg(long, allow_negative_numbers = true)]
    richardson_tol: Option<f64>,
    #[arg(long)]
    max_halvings: Option<u32>,
    #[arg(long)]
    basis_check: Option<bool>,
    #[arg(long, allow_negative_numbers = true)]
    basis_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    populations: Option<bool>,
    #[arg(long, allow_negative_numbers = true)]
    field_cutoff: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    rotational_constant_cm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dipole_debye: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_parallel_a3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_perp_a3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    peak_intensity_w_cm2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau_fwhm_fs: Option<f64>,
}

fn axis(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| Value::Float(x)).collect())
}

fn int(v: usize) -> Value {
    Value::Integer(v as i64)
}

fn tag(s: &str) -> Value {
    Value::String(s.into())
}

impl Common {
    /// Flag values as config keys, in the same layout as the TOML file.
    fn overrides(&self) -> Table {
        let mut t = Table::new();
        let mut put = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                t.insert(key.into(), v);
            }
        };
        put("workers", self.workers.map(int));
        put("delta_omega", self.delta_omega.as_deref().map(axis));
        put("tau_fwhm", self.tau_fwhm.as_deref().map(axis));
        put("amplitude_ratio", self.amplitude_ratio.as_deref().map(axis));
        put("delay_ratio", self.delay_ratio.as_deref().map(axis));
        put(
            "mode",
            self.mode.map(|m| match m {
                Mode::OneColor => tag("one_color"),
                Mode::TwoColor => tag("two_color"),
            }),
        );
        put(
            "interaction",
            self.interaction.map(|m| match m {
                Interaction::CycleAveraged => tag("cycle_averaged"),
                Interaction::FullCarrier => tag("full_carrier"),
            }),
        );
        put("delta_omega_mu", self.delta_omega_mu.map(Value::Float));
        put("delta_omega_perp", self.delta_omega_perp.map(Value::Float));
        put("omega", self.omega.map(Value::Float));
        put("j_max", self.j_max.map(int));
        put("m", self.m.map(|m| Value::Integer(m.into())));
        put("j_initial", self.j_initial.map(int));
        put("n_nodes", self.n_nodes.map(int));
        put("dt", self.dt.map(Value::Float));
        put(
            "dt_control",
            self.dt_control.map(|c| match c {
                DtControlArg::Fixed => tag("fixed"),
                DtControlArg::Richardson => tag("richardson"),
            }),
        );
        put("richardson_tol", self.richardson_tol.map(Value::Float));
        put("max_halvings", self.max_halvings.map(|n| Value::Integer(n.into())));
        put("basis_check", self.basis_check.map(Value::Boolean));
        put("basis_tol", self.basis_tol.map(Value::Float));
        put("t_start", self.t_start.map(Value::Float));
        put("t_end", self.t_end.map(Value::Float));
        put("record_every", self.record_every.map(int));
        put("populations", self.populations.map(Value::Boolean));
        put("field_cutoff", self.field_cutoff.map(Value::Float));

        let mut physical = Table::new();
        for (key, v) in [
            ("rotational_constant_cm", self.rotational_constant_cm),
            ("dipole_debye", self.dipole_debye),
            ("alpha_parallel_a3", self.alpha_parallel_a3),
            ("alpha_perp_a3", self.alpha_perp_a3),
            ("peak_intensity_w_cm2", self.peak_intensity_w_cm2),
            ("tau_fwhm_fs", self.tau_fwhm_fs),
        ] {
            if let Some(v) = v {
                physical.insert(key.into(), Value::Float(v));
            }
        }
        if !physical.is_empty() {
            t.insert("physical".into(), Value::Table(physical));
        }
        t
    }

    /// `base`, then the config file, then the flags; later layers win.
    fn resolve(&self, base: Table) -> anyhow::Result<ResolvedConfig> {
        let mut table = base;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: Table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
            merge(&mut table, file);
        }
        merge(&mut table, self.overrides());
        parse_config_table(table).context("invalid configuration")
    }
}

fn merge(into: &mut Table, from: Table) {
    for (key, value) in from {
        match (into.get_mut(&key), value) {
            (Some(Value::Table(dst)), Value::Table(src)) => merge(dst, src),
            (_, value) => {
                into.insert(key, value);
            }
        }
    }
}

/// Sweep axes of a canned figure as config keys.
fn figure_table(figure: Figure) -> Table {
    let spec = figure.sweep(RunSettings::default());
    let mut t = Table::new();
    t.insert("delta_omega".into(), axis(&spec.delta_omegas));
    t.insert("tau_fwhm".into(), axis(&spec.tau_fwhms));
    t.insert("amplitude_ratio".into(), axis(&spec.amplitude_ratios));
    t.insert("delay_ratio".into(), axis(&spec.delay_ratios));
    let mode = match spec.color_mode {
        rotalign::sweep::ColorMode::OneColor => "one_color",
        rotalign::sweep::ColorMode::TwoColor => "two_color",
    };
    t.insert("mode".into(), tag(mode));
    t
}

/// At most six decimals, trailing zeros dropped.
fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn print_summary(results: &[RunResult]) {
    println!(
        "{:>5} {:>9} {:>8} {:>7} {:>7} {:>10} {:>10} {:>10} {:>10} {:>9}",
        "run", "Δω", "τ", "F2/F1", "t2/t1", "peak", "in-pulse", "post mean", "post amp", "converged"
    );
    for r in results {
        let p = &r.config.params;
        let s = &r.summary;
        println!(
            "{:>5} {:>9} {:>8} {:>7} {:>7} {:>10.6} {:>10.6} {:>10} {:>10} {:>9}",
            r.config.index,
            short(p.delta_omega),
            short(p.tau_fwhm),
            p.amplitude_ratio.map_or("-".into(), short),
            p.delay_ratio.map_or("-".into(), short),
            s.peak_alignment,
            s.pulse_peak_alignment,
            fmt_opt(s.post_pulse_mean()),
            fmt_opt(s.post_pulse_amplitude()),
            s.converged,
        );
    }
}

fn run_and_write(cfg: &ResolvedConfig, out: &Path) -> anyhow::Result<()> {
    let results = run_sweep(&cfg.sweep, cfg.workers)?;
    let manifest = write_outputs(out, cfg, &results)?;
    print_summary(&results);
    let unconverged = results.iter().filter(|r| !r.summary.converged).count();
    if unconverged > 0 {
        log::warn!("{unconverged} run(s) did not meet the convergence targets; see summary.csv");
    }
    println!(
        "wrote {} files to {} (config {})",
        manifest.output_paths.len(),
        out.display(),
        &manifest.config_hash[..12]
    );
    Ok(())
}

fn compare_oracle(cfg: &ResolvedConfig, out: &Path, tolerance: f64) -> anyhow::Result<bool> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut report = String::from("index,delta_omega,tau_fwhm,dt,max_alignment_deviation,max_orientation_deviation\n");
    let mut ok = true;
    println!(
        "{:>5} {:>9} {:>8} {:>10} {:>14} {:>14}",
        "run", "Δω", "τ", "dt", "max |Δcos²|", "max |Δcos|"
    );
    for run in cfg.runs()? {
        let plan = run.plan()?;
        let psi0 = initial_eigenstate(run.settings.j_initial, run.settings.m, plan.basis())?;
        let split = propagate(&psi0, &plan)?;
        let exact = oracle_propagate(&psi0, &plan)?;
        let (mut da, mut dc) = (0.0f64, 0.0f64);
        for (a, b) in split.records.iter().zip(&exact.records) {
            da = da.max((a.alignment - b.alignment).abs());
            dc = dc.max((a.orientation - b.orientation).abs());
        }
        ok &= da <= tolerance;
        let p = run.params;
        println!(
            "{:>5} {:>9} {:>8} {:>10.2e} {:>14.3e} {:>14.3e}",
            run.index,
            short(p.delta_omega),
            short(p.tau_fwhm),
            plan.dt(),
            da,
            dc
        );
        report.push_str(&format!(
            "{},{:?},{:?},{:?},{:?},{:?}\n",
            run.index,
            p.delta_omega,
            p.tau_fwhm,
            plan.dt(),
            da,
            dc
        ));
    }
    let path = out.join("oracle_report.csv");
    std::fs::write(&path, report).with_context(|| format!("writing {}", path.display()))?;
    println!(
        "{} (tolerance {tolerance:e})",
        if ok { "within tolerance" } else { "TOLERANCE EXCEEDED" }
    );
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<bool> {
    let (common, base) = match &command {
        Command::Simulate(c) | Command::Sweep(c) => (c, Table::new()),
        Command::CompareOracle { common, .. } => (common, Table::new()),
        Command::Fig1(c) => (c, figure_table(Figure::Fig1)),
        Command::Fig2(c) => (c, figure_table(Figure::Fig2)),
        Command::Fig3(c) => (c, figure_table(Figure::Fig3)),
        Command::Fig4(c) => (c, figure_table(Figure::Fig4)),
    };
    let cfg = common.resolve(base)?;
    match &command {
        Command::Simulate(_) => {
            let n = cfg.runs()?.len();
            if n != 1 {
                bail!("simulate expects a single run but the configuration expands to {n}; use `sweep`");
            }
            run_and_write(&cfg, &common.out)?;
            Ok(true)
        }
        Command::CompareOracle { tolerance, .. } => compare_oracle(&cfg, &common.out, *tolerance),
        _ => {
            run_and_write(&cfg, &common.out)?;
            Ok(true)
        }
    }
}
