use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clight::ast::{Diagnostic, Program};
use clight::exec::{run_program, Behavior, DEFAULT_FUEL};
use clight::frontend;
use clight::world::{format_trace, ScriptWorld};

#[derive(Parser)]
#[command(name = "clight", version, about = "Reference interpreter for Clight programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program and print its behavior.
    Run {
        file: PathBuf,
        /// World script answering external calls, one `name(args) -> result` per line.
        #[arg(long)]
        world: Option<PathBuf>,
        /// Maximum recursion depth of the interpreter.
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        /// Print the I/O events before the behavior line.
        #[arg(long)]
        trace: bool,
    },
    /// Parse, elaborate and print a program back in concrete syntax.
    Pretty { file: PathBuf },
    /// Run every `.cl` program in a directory and compare with its `.expect` file.
    Selfcheck { dir: PathBuf },
}

/// Errors reported before a program runs; exit status 2.
struct Failure(String);

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {}", path.display(), e)))
}

fn load(path: &Path) -> Result<Program, Failure> {
    let src = read(path)?;
    frontend::compile(&src).map_err(|ds| Failure(render_diags(path, &ds)))
}

fn render_diags(path: &Path, ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("{}:{}", path.display(), d))
        .collect::<Vec<_>>()
        .join("\n")
}

fn load_world(path: Option<&Path>) -> Result<ScriptWorld, Failure> {
    match path {
        None => Ok(ScriptWorld::default()),
        Some(p) => ScriptWorld::parse(&read(p)?)
            .map_err(|e| Failure(format!("{}: {}", p.display(), e))),
    }
}

/// The report printed by `run`: optional trace lines, then the behavior.
fn report(b: &Behavior, trace: bool) -> String {
    let mut out = if trace { format_trace(b.trace()) } else { String::new() };
    out.push_str(&b.to_string());
    out.push('\n');
    out
}

fn exit_status(b: &Behavior) -> u8 {
    match b {
        Behavior::Terminates { code, .. } => code.rem_euclid(256) as u8,
        Behavior::GoesWrong { .. } => 1,
        Behavior::OutOfFuel { .. } => 3,
    }
}

fn run(file: &Path, world: Option<&Path>, fuel: u64, trace: bool) -> Result<u8, Failure> {
    let p = load(file)?;
    let mut w = load_world(world)?;
    let b = run_program(&mut w, fuel, &p);
    print!("{}", report(&b, trace));
    Ok(exit_status(&b))
}

fn selfcheck(dir: &Path) -> Result<u8, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure(format!("{}: {}", dir.display(), e)))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cl"))
        .collect();
    files.sort();
    let mut failed = 0;
    for f in &files {
        let name = f.file_stem().unwrap_or_default().to_string_lossy();
        let expect_path = f.with_extension("expect");
        let world_path = f.with_extension("world");
        let outcome = (|| {
            let expected = read(&expect_path)?;
            let p = load(f)?;
            let world = world_path.exists().then_some(world_path.as_path());
            let mut w = load_world(world)?;
            let actual = report(&run_program(&mut w, DEFAULT_FUEL, &p), true);
            Ok::<_, Failure>((expected, actual))
        })();
        match outcome {
            Ok((expected, actual)) if expected == actual => println!("ok   {}", name),
            Ok((expected, actual)) => {
                failed += 1;
                println!("FAIL {}", name);
                println!("  expected: {}", expected.trim_end().replace('\n', "\n            "));
                println!("  actual:   {}", actual.trim_end().replace('\n', "\n            "));
            }
            Err(Failure(msg)) => {
                failed += 1;
                println!("FAIL {}: {}", name, msg);
            }
        }
    }
    println!("{} programs, {} failed", files.len(), failed);
    Ok(u8::from(failed > 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Run {
            file,
            world,
            fuel,
            trace,
        } => run(file, world.as_deref(), *fuel, *trace),
        Command::Pretty { file } => load(file).map(|p| {
            print!("{}", frontend::pretty_print(&p));
            0
        }),
        Command::Selfcheck { dir } => selfcheck(dir),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("{}", msg);
            ExitCode::from(2)
        }
    }
}
