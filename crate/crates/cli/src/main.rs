use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use closed_sym3::{run, Command, Error, InputMode, InputSpec, Report};

#[derive(Parser)]
#[command(
    name = "closed-sym3",
    version,
    about = "Decide closedness of symmetric 3-differentials on C^2"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Full decision: web criterion, coordinate criterion and integration oracle.
    Check(InputArgs),
    /// Web frame invariants, connection form and curvature.
    Web(InputArgs),
    /// Integration oracle only.
    Oracle(InputArgs),
    /// Check plus the proof identities relating the two criteria.
    CrossValidate(InputArgs),
    /// Emit a random closed instance (optionally perturbed) as an input file.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Total degree bound of the random factors.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Magnitude of a single-monomial perturbation.
        #[arg(long)]
        perturb: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    common: Common,
    /// Input file; inline expressions are used when absent.
    input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, requires = "b", conflicts_with_all = ["input", "c0"])]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["c1", "c2", "c3"], conflicts_with = "input")]
    c0: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "c0")]
    c1: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "c0")]
    c2: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "c0")]
    c3: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl Common {
    fn apply(&self, spec: &mut InputSpec) {
        if let Some(n) = self.order {
            spec.order = n;
        }
        if let Some(t) = self.tol {
            spec.tolerance = t;
        }
        if self.seed.is_some() {
            spec.seed = self.seed;
        }
    }
}

impl InputArgs {
    fn spec(&self) -> Result<InputSpec, Error> {
        let mut spec = if let Some(path) = &self.input {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            InputSpec::from_toml(&text)?
        } else if let (Some(a), Some(b)) = (&self.a, &self.b) {
            InputSpec::new(InputMode::Adapted {
                a: a.clone(),
                b: b.clone(),
            })
        } else if let (Some(c0), Some(c1), Some(c2), Some(c3)) = (&self.c0, &self.c1, &self.c2, &self.c3) {
            InputSpec::new(InputMode::Cubic {
                c0: c0.clone(),
                c1: c1.clone(),
                c2: c2.clone(),
                c3: c3.clone(),
            })
        } else {
            return Err(Error::InvalidInput("give an input file, --a/--b, or --c0..--c3".into()));
        };
        self.common.apply(&mut spec);
        Ok(spec)
    }
}

fn emit(report: &Report, format: Format) -> ExitCode {
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (input, command) = match cli.command {
        Sub::Check(i) => (i, Command::Check),
        Sub::Web(i) => (i, Command::Web),
        Sub::Oracle(i) => (i, Command::Oracle),
        Sub::CrossValidate(i) => (i, Command::CrossValidate),
        Sub::Generate {
            common,
            degree,
            perturb,
        } => {
            // The mode is replaced by the generated instance.
            let mut spec = InputSpec::new(InputMode::Adapted {
                a: "0".into(),
                b: "0".into(),
            });
            common.apply(&mut spec);
            let command = Command::Generate {
                degree_bound: degree,
                perturb,
            };
            return emit(&run(&spec, command), common.format);
        }
    };
    let format = input.common.format;
    match input.spec() {
        Ok(spec) => emit(&run(&spec, command), format),
        Err(e) => emit(&Report::failure(command, None, &e), format),
    }
}
