use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eqlift::{BoundaryPoint, GroupElement, Window};

mod commands;
mod config;
mod report;

use commands::Element;
use config::{Format, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "eqlift",
    version,
    about = "Equivariant liftings of boundary functions for SL(2,R)"
)]
struct Cli {
    /// `key = value` file with tolerance, samples, seed, format, output.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true, conflicts_with = "format")]
    json: bool,
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Limit of the kernel averages of a named function at a boundary point.
    Lift {
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        xi: BoundaryPoint,
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        window: Window,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        schedule: Vec<f64>,
    },
    /// Monte Carlo average of the Poisson transform over the cone domain.
    DomainAverage {
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        xi: BoundaryPoint,
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        window: Window,
        #[arg(long, value_delimiter = ',', default_value = "8")]
        t: Vec<f64>,
    },
    /// Rows (t, x, M_t(x)).
    Kernel {
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required_unless_present = "grid"
        )]
        x: Vec<f64>,
        /// `lo,hi,n`: n evenly spaced points.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "x")]
        grid: Option<String>,
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        window: Window,
        /// Also evaluate by double quadrature and compare.
        #[arg(long)]
        check: bool,
    },
    /// Rows (t, ω, Fourier transform of M_t at ω), window [-1,1].
    KernelFft {
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required_unless_present = "grid"
        )]
        omega: Vec<f64>,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "omega")]
        grid: Option<String>,
    },
    /// L¹ equivariance defect of the kernel family under an element.
    Defect {
        /// `a,b,c,d` or piecewise `bp:a,b,c,d;bp:a,b,c,d`.
        #[arg(long, allow_hyphen_values = true)]
        g: Element,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        xi: BoundaryPoint,
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        window: Window,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        t: Vec<f64>,
    },
    /// Estimate |g·U_t ∩ U_t| / |U_t|.
    Folner {
        #[arg(long, allow_hyphen_values = true)]
        g: GroupElement,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        window: Window,
    },
    /// Check lifting against the coboundary on tuples read from a JSON list.
    CocycleCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "orientation")]
        function: String,
        #[arg(long, default_value_t = 16.0)]
        t: f64,
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        window: Window,
    },
    /// Exact check of the GL(m) matrices in projective space.
    VerifyGl {
        #[arg(long, default_value_t = 4)]
        m: usize,
    },
    /// Analytic-oracle checks with a pass/fail table.
    Selftest,
}

fn grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        anyhow::bail!("grid must be lo,hi,n")
    };
    let (lo, hi, n): (f64, f64, usize) = (lo.parse()?, hi.parse()?, n.parse()?);
    if n < 2 || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        anyhow::bail!("grid needs lo < hi and n ≥ 2");
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let flags = Overrides {
        tolerance: cli.tolerance,
        samples: cli.samples,
        seed: cli.seed,
        format: if cli.json { Some(Format::Json) } else { cli.format },
        output: cli.output,
    };
    let cfg = RunConfig::load(cli.config.as_deref(), flags)?;
    let (report, natural) = match &cli.command {
        Command::Lift {
            function,
            xi,
            window,
            schedule,
        } => (commands::lift(&cfg, function, *xi, *window, schedule)?, Format::Json),
        Command::DomainAverage {
            function,
            xi,
            window,
            t,
        } => (commands::domain_avg(&cfg, function, *xi, *window, t)?, Format::Csv),
        Command::Kernel {
            t,
            x,
            grid: g,
            window,
            check,
        } => {
            let xs = match g {
                Some(s) => grid(s)?,
                None => x.clone(),
            };
            (commands::kernel(&cfg, t, &xs, *window, *check)?, Format::Csv)
        }
        Command::KernelFft { t, omega, grid: g } => {
            let ws = match g {
                Some(s) => grid(s)?,
                None => omega.clone(),
            };
            (commands::kernel_fft(&cfg, t, &ws)?, Format::Csv)
        }
        Command::Defect { g, xi, window, t } => (commands::defect(&cfg, g, *xi, *window, t)?, Format::Csv),
        Command::Folner { g, t, window } => (commands::folner(&cfg, g, *t, *window)?, Format::Json),
        Command::CocycleCheck {
            input,
            function,
            t,
            window,
        } => (
            commands::cocycle_check(&cfg, input, function, *t, *window)?,
            Format::Json,
        ),
        Command::VerifyGl { m } => (commands::verify_gl(&cfg, *m)?, Format::Json),
        Command::Selftest => (commands::selftest(&cfg)?, Format::Csv),
    };
    let format = cfg.format.unwrap_or(natural);
    match &cfg.output {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let mut w = std::io::BufWriter::new(file);
            report.write(&mut w, format)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            report.write(stdout.lock(), format)?;
        }
    }
    if let Some(s) = &report.summary {
        eprintln!("{s}");
    }
    Ok(report.status)
}

/// Quadrature failures exit with 2, every other error with 1.
fn exit_status(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<eqlift::Error>() {
        Some(eqlift::Error::QuadratureNotConverged { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
