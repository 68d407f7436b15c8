use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use poired::reduce::Complement;
use poired_cli::{parse_param, run, Command, Format, Options};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    /// Run every applicable checker.
    Check,
    /// Print the reduced bivector on the quotient.
    Reduce,
    /// Print the jacobiator obstructions of the reduced bracket.
    Jacobi,
    /// Stretch, pull back and compare with the reduced structure; omega^B when symplectic.
    Dirac,
    /// Run `check` over every built-in fixture.
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Comp {
    Default,
    Reversed,
    Sheared,
}

/// Exact Poisson reduction by distributions.
#[derive(Parser)]
#[command(name = "poired", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Scene file or built-in fixture name.
    scene: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Fmt,
    /// Order in which the complement of TN + B is completed.
    #[arg(long, value_enum, default_value = "default")]
    complement: Comp,
    /// Substitute a declared parameter, e.g. --param lambda=2.
    #[arg(long = "param", value_name = "NAME=EXPR", value_parser = parse_param)]
    params: Vec<(String, String)>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Check => Command::Check,
        Cmd::Reduce => Command::Reduce,
        Cmd::Jacobi => Command::Jacobi,
        Cmd::Dirac => Command::Dirac,
        Cmd::Report => Command::Report,
    };
    let opts = Options {
        format: match args.format {
            Fmt::Text => Format::Text,
            Fmt::Structured => Format::Structured,
        },
        complement: match args.complement {
            Comp::Default => Complement::Default,
            Comp::Reversed => Complement::Reversed,
            Comp::Sheared => Complement::Sheared,
        },
        params: args.params,
    };
    match run(command, args.scene.as_deref(), &opts) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
