use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use satake_isolator::config::MultiplierFile;
use satake_isolator::isolator::{build_mu, Audit, CaseTag, MultiplierReport};
use satake_isolator::spectrum::{parse_config, verify, SpectrumConfig, VerificationReport};
use satake_isolator::{demo, Error};

#[derive(Parser)]
#[command(name = "satake-isolator", version, about = "Build and verify spectrum-isolating Hecke multipliers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the multiplier for a spectrum configuration.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a multiplier file against a configuration.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        multiplier: PathBuf,
    },
    /// Run build and verify on a bundled configuration and narrate the construction.
    Demo {
        #[arg(long, value_enum)]
        group: Group,
        /// Where to write the configuration and multiplier (default: a directory under the system temp dir).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Pgl2,
    Rank2,
}

impl Group {
    fn name(self) -> &'static str {
        match self {
            Group::Pgl2 => "pgl2",
            Group::Rank2 => "rank2",
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_config(path: &Path) -> Result<SpectrumConfig, Error> {
    Ok(parse_config(&read(path)?)?)
}

fn load_multiplier(path: &Path) -> Result<MultiplierFile, Error> {
    MultiplierFile::from_json(&read(path)?).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn summary(report: &MultiplierReport) -> String {
    let a = &report.audit;
    let mut s = String::new();
    if let Some([x, y]) = &a.v_infty {
        let _ = writeln!(s, "v_inf pair: {x}, {y}");
    }
    for sig in &a.eisenstein {
        let _ = writeln!(s, "Eisenstein datum {:?}: S_sigma = {{{}}}", sig.label, sig.places.join(", "));
        for p in &sig.pairs {
            let corr = p.t_infty.correction.map(|c| format!(", c = {c}")).unwrap_or_default();
            let _ = writeln!(s, "  {} -> place {} [{}{corr}]", p.pair, p.place, p.case);
        }
        let cs: Vec<String> = sig.constants.c.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "  constants C = ({}) with t = {}", cs.join(", "), sig.constants.t);
    }
    for f in &a.step2.factors {
        let _ = writeln!(s, "Step 2: {:?} separated at {} by {} - {}", f.label, f.place, f.t, f.trace);
    }
    for l in &a.step2.nearly_equivalent {
        let _ = writeln!(s, "Step 2: {l:?} is nearly equivalent to pi; left alone");
    }
    for l in &a.step2.ambiguous {
        let _ = writeln!(
            s,
            "Step 2: warning: {l:?} differs from pi only at places already used; not separated"
        );
    }
    let _ = writeln!(
        s,
        "mu: {} terms over {{{}}}, normalization {}",
        report.mu.num_terms(),
        a.places.join(", "),
        report.normalization
    );
    s
}

fn narrate(audit: &Audit) -> String {
    let mut s = String::new();
    for sig in &audit.eisenstein {
        let _ = writeln!(s, "\nDatum {:?}", sig.label);
        for p in &sig.pairs {
            let _ = writeln!(s, "  {}: {}", p.pair, p.case);
            let _ = writeln!(s, "    T        = {}", p.t);
            let _ = writeln!(s, "    T_inf    = {}", p.t_infty.poly);
            if let CaseTag::OffDiagonal { .. } = p.case {
                let _ = writeln!(s, "    (includes {} x the vanishing polynomial)", p.t_infty.correction.unwrap_or(0));
            }
        }
        let _ = writeln!(s, "  matrix T_(w,w') - T_(w,w'),inf o (omega,omega') at pi (rows (w,w'), columns (omega,omega')):");
        for row in &sig.matrix_values {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "    [{}]", cells.join(", "));
        }
        let cs: Vec<String> = sig.constants.c.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "  weights C = ({})", cs.join(", "));
        let vs: Vec<String> = sig.column_values.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "  weighted column sums at pi: ({})", vs.join(", "));
        let _ = writeln!(s, "  mu_sigma = product of the {} columns, {} terms", sig.column_values.len(), sig.terms);
    }
    if !audit.step2.factors.is_empty() {
        let _ = writeln!(s, "\nStep 2");
        for f in &audit.step2.factors {
            let _ = writeln!(s, "  {:?} at {}: ({}) - ({})", f.label, f.place, f.t, f.trace);
        }
    }
    s
}

fn print_verification(report: &VerificationReport) {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    for f in report.failures() {
        eprintln!("FAIL: {f}");
    }
}

fn cmd_build(config: &Path, out: &Path) -> Result<ExitCode, Error> {
    let cfg = load_config(config)?;
    let report = build_mu(&cfg)?;
    write(out, &MultiplierFile::from(&report).to_json())?;
    print!("{}", summary(&report));
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(config: &Path, multiplier: &Path) -> Result<ExitCode, Error> {
    let cfg = load_config(config)?;
    let file = load_multiplier(multiplier)?;
    let report = verify(&file.mu, &[], &cfg)?;
    print_verification(&report);
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_demo(group: Group, out_dir: Option<PathBuf>) -> Result<ExitCode, Error> {
    let dir = out_dir.unwrap_or_else(|| std::env::temp_dir().join(format!("satake-isolator-demo-{}", group.name())));
    fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let text = demo::by_name(group.name()).expect("bundled demo");
    let config_path = dir.join(format!("{}.json", group.name()));
    let mu_path = dir.join(format!("{}-multiplier.json", group.name()));
    write(&config_path, text)?;
    println!("configuration: {}", config_path.display());

    let cfg = parse_config(text)?;
    let report = build_mu(&cfg)?;
    write(&mu_path, &MultiplierFile::from(&report).to_json())?;
    print!("{}", summary(&report));
    print!("{}", narrate(&report.audit));
    println!("\nmultiplier: {}", mu_path.display());

    let file = load_multiplier(&mu_path)?;
    let v = verify(&file.mu, &report.factors, &cfg)?;
    let zero = v.families.iter().filter(|f| f.zero).count();
    println!("\nverification");
    println!("  Eisenstein families annihilated: {zero}/{}", v.families.len());
    for c in &v.cuspidals {
        let note = if c.nearly_equivalent { " (nearly equivalent to pi)" } else { "" };
        println!("  cuspidal {:?}: value {}{note}", c.label, c.value);
    }
    println!("  value at pi: {}", v.target_value);
    println!("  blockwise Weyl invariant: {}", v.invariant && v.factor_invariance.iter().all(|&b| b));
    println!("  {}", if v.pass { "PASS" } else { "FAIL" });
    for f in v.failures() {
        eprintln!("FAIL: {f}");
    }
    Ok(if v.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Build { config, out } => cmd_build(&config, &out),
        Command::Verify { config, multiplier } => cmd_verify(&config, &multiplier),
        Command::Demo { group, out_dir } => cmd_demo(group, out_dir),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
