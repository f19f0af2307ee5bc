use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use bgk_lab::config::{Command, KEYS, OUTPUT_DIR_ENV};
use bgk_lab::{parse_config, run};
use clap::{Arg, ArgMatches};

fn cli() -> clap::Command {
    let keys: Vec<Arg> = KEYS
        .iter()
        .map(|(key, help)| {
            Arg::new(*key)
                .long(key.replace('_', "-"))
                .value_name("VALUE")
                .help(*help)
                .global(true)
        })
        .collect();
    clap::Command::new("bgk-lab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Numerical experiments for the BGK equation with two thermal reservoirs")
        .subcommand_required(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("flat key = value configuration file; flags override its values")
                .global(true),
        )
        .args(keys)
        .subcommands(Command::ALL.map(|c| clap::Command::new(c.name()).about(c.about())))
}

fn flags(m: &ArgMatches) -> BTreeMap<String, String> {
    KEYS.iter()
        .filter_map(|(key, _)| m.get_one::<String>(key).map(|v| (key.to_string(), v.clone())))
        .collect()
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    let command: Command = name.parse().expect("subcommands mirror Command::ALL");
    let env_dir = std::env::var(OUTPUT_DIR_ENV).ok();
    let cfg = match parse_config(
        command,
        sub.get_one::<PathBuf>("config").map(PathBuf::as_path),
        &flags(sub),
        env_dir.as_deref(),
    ) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cfg) {
        Ok(manifest) => {
            for a in &manifest.assertions {
                println!("[{}] {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
            }
            if let Some(e) = &manifest.error {
                eprintln!("error: {e}");
            }
            println!(
                "manifest: {}",
                cfg.output_dir.join(bgk_lab::output::MANIFEST_NAME).display()
            );
            ExitCode::from(manifest.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
