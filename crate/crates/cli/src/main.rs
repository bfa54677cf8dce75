use std::process::ExitCode;

use clap::{Parser, Subcommand};

use germ_cli::*;

#[derive(Parser)]
#[command(name = "plane-germ", version, about = "Topological classification of plane curve germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Branches, Puiseux pairs, contacts, intersections and the decorated tree.
    Analyze {
        poly: String,
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        #[arg(long)]
        dot: bool,
        /// Fixed truncation order `p/q`.
        #[arg(long)]
        trunc: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Topological right-equivalence of two germs.
    Compare {
        poly1: String,
        poly2: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        trunc: Option<String>,
    },
    /// Normal family checks: Verdier and strong Thom ratios, horn covering and Kuo flow.
    DeformCheck {
        poly1: String,
        poly2: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma separated, strictly decreasing `|y|` values.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<String>>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        cap: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the trajectory rows to this CSV file.
        #[arg(long)]
        dump: Option<std::path::PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Analyze { poly, json, dot, trunc, seed } => {
            let format = if dot {
                Format::Dot
            } else if json {
                Format::Json
            } else {
                Format::Text
            };
            let cfg = RunConfig { trunc: trunc.as_deref().map(parse_rational).transpose()?, seed, format, ..RunConfig::default() };
            let v = cmd_analyze(&poly, &cfg)?;
            match format {
                Format::Json => print!("{}", render(&v)),
                Format::Dot => print!("{}", v["dot"].as_str().unwrap_or("")),
                Format::Text => print!("{}", analyze_text(&v)),
            }
            Ok(EXIT_OK)
        }
        Command::Compare { poly1, poly2, json, trunc } => {
            let cfg = RunConfig { trunc: trunc.as_deref().map(parse_rational).transpose()?, ..RunConfig::default() };
            let (v, eq) = cmd_compare(&poly1, &poly2, &cfg)?;
            if json {
                print!("{}", render(&v));
            } else {
                println!("{}", if eq { "equivalent" } else { "not equivalent" });
                println!("{}", v["encodings"][0].as_str().unwrap_or(""));
                println!("{}", v["encodings"][1].as_str().unwrap_or(""));
            }
            Ok(if eq { EXIT_OK } else { EXIT_INEQUIVALENT })
        }
        Command::DeformCheck { poly1, poly2, samples, radii, eps, cap, seed, dump } => {
            let mut cfg = RunConfig { seed, format: Format::Json, ..RunConfig::default() };
            let v = &mut cfg.verification;
            if let Some(s) = samples {
                v.samples = s;
            }
            if let Some(r) = radii {
                v.radii = r.iter().map(|s| parse_number(s)).collect::<CliResult<_>>()?;
            }
            if let Some(e) = eps {
                v.eps = parse_number(&e)?;
            }
            if let Some(c) = cap {
                v.cap = parse_number(&c)?;
            }
            let out = cmd_deform_check(&poly1, poly2.as_deref(), &cfg, dump.is_some())?;
            if let Some(path) = dump {
                std::fs::write(&path, trajectory_csv(&out.trajectory))
                    .map_err(|e| CliError::input("io.write", format!("{}: {e}", path.display())))?;
            }
            print!("{}", render(&out.report));
            Ok(if out.ok { EXIT_OK } else { EXIT_NUMERIC })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            print!("{}", render(&e.to_json()));
            eprintln!("error[{}]: {}", e.code, e.message);
            ExitCode::from(e.exit as u8)
        }
    }
}
