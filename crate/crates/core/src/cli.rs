//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification or consistency check
//! fails, 2 on usage, parse and domain errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::bijection::{psi_inverse, psi_mapping, BijectionCase};
use crate::enumerate::{count_table, iter_class, DEFAULT_BOUND};
use crate::perm::{parse_cycles, CycleForm, FormatMode, PermClass};
use crate::verify::{compare_tables, golden_rows, verify_n_with_bound, TableRow};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "derangements",
    version,
    about = "Map derangements to one-fixed-point permutations and back, and verify the map exhaustively"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map a derangement to its one-fixed-point image.
    Map {
        /// Permutation in cycle notation, e.g. "(1,3)(2,4)".
        #[arg(long)]
        perm: String,
        /// Emit a single JSON document.
        #[arg(long)]
        structured: bool,
    },
    /// Map a one-fixed-point permutation back to its derangement.
    Invert {
        #[arg(long)]
        perm: String,
        #[arg(long)]
        structured: bool,
    },
    /// Check the bijection over all of S_n for n = 1..=max-n.
    Verify {
        #[arg(long)]
        max_n: usize,
        /// Worker threads per n.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Largest n that may be enumerated.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        #[arg(long)]
        structured: bool,
    },
    /// Tabulate derangement counts by both recurrences and by enumeration.
    Count {
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        #[arg(long)]
        structured: bool,
    },
    /// Recompute the worked example tables and compare with the reference rows.
    Table {
        /// JSON array of reference rows to compare against instead of the
        /// built-in ones.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long)]
        structured: bool,
    },
    /// Stream one class of permutations, one per line in cycle notation.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// One of s, d, f, dstar, fstar.
        #[arg(long)]
        class: PermClass,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(CliError::Domain(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

enum CliError {
    Domain(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<u8, CliError> {
    match command {
        Command::Map { perm, structured } => cmd_map(&perm, structured, out),
        Command::Invert { perm, structured } => cmd_invert(&perm, structured, out),
        Command::Verify {
            max_n,
            jobs,
            bound,
            structured,
        } => cmd_verify(max_n, jobs, bound, structured, out),
        Command::Count {
            max_n,
            bound,
            structured,
        } => cmd_count(max_n, bound, structured, out),
        Command::Table { golden, structured } => {
            let rows = match golden {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<Vec<TableRow>>(&text)
                        .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?
                }
                None => golden_rows(),
            };
            cmd_table(&rows, structured, out)
        }
        Command::Enumerate { n, class } => {
            for p in iter_class(n, class) {
                writeln!(out, "{}", p.to_cycle_form())?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn case_json(case: &BijectionCase) -> serde_json::Value {
    json!({ "case": case.tag(), "k": case.k(), "a1": case.a1() })
}

fn emit_mapping(
    out: &mut dyn Write,
    structured: bool,
    input: &CycleForm,
    output: &str,
    case: &BijectionCase,
) -> Result<u8, CliError> {
    if structured {
        let mut doc = json!({
            "input": input.to_string(),
            "n": input.n(),
            "output": output,
        });
        if let (Some(obj), serde_json::Value::Object(extra)) =
            (doc.as_object_mut(), case_json(case))
        {
            obj.extend(extra);
        }
        writeln!(out, "{doc}")?;
    } else {
        writeln!(out, "{output}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_map(perm: &str, structured: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let input = parse_cycles(perm).map_err(domain)?;
    let mapping = psi_mapping(&input).map_err(domain)?;
    let output = mapping
        .output
        .format(FormatMode::FixedPointFirst)
        .map_err(domain)?;
    emit_mapping(out, structured, &input, &output, &mapping.case)
}

fn cmd_invert(perm: &str, structured: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let input = parse_cycles(perm).map_err(domain)?;
    let pre = psi_inverse(&input).map_err(domain)?;
    // Report the case ψ uses on the recovered derangement.
    let case = psi_mapping(&pre).map_err(domain)?.case;
    emit_mapping(out, structured, &input, &pre.to_string(), &case)
}

fn cmd_verify(
    max_n: usize,
    jobs: usize,
    bound: usize,
    structured: bool,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    if max_n == 0 {
        return Err(CliError::Domain("--max-n must be at least 1".into()));
    }
    if jobs == 0 {
        return Err(CliError::Domain("--jobs must be at least 1".into()));
    }
    let mut reports = Vec::with_capacity(max_n);
    // Check the bound up front so nothing is printed before the error.
    if max_n > bound {
        return Err(domain(crate::enumerate::EnumerateError::BoundExceeded {
            n: max_n,
            bound,
        }));
    }
    for n in 1..=max_n {
        reports.push(verify_n_with_bound(n, jobs, bound).map_err(domain)?);
    }
    let passed = reports.iter().all(|r| r.passed());
    if structured {
        writeln!(out, "{}", json!({ "passed": passed, "reports": reports }))?;
    } else {
        for report in &reports {
            writeln!(out, "{report}")?;
            for f in &report.failures {
                writeln!(
                    out,
                    "failure n={} phase={:?} input={} expected={:?} actual={:?}",
                    report.n, f.phase, f.input, f.expected, f.actual
                )?;
            }
        }
        writeln!(out, "result={}", if passed { "PASS" } else { "FAIL" })?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_count(
    max_n: usize,
    bound: usize,
    structured: bool,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let records = count_table(max_n, bound);
    let agree = records.iter().all(|r| r.method_agreement.all());
    if structured {
        writeln!(out, "{}", json!({ "agree": agree, "records": records }))?;
    } else {
        writeln!(
            out,
            "n\td_n(rec1)\td_n(rec2)\td_n(brute)\tf_n\tdstar_n\tfstar_n\tstatus"
        )?;
        for r in &records {
            let brute = r
                .d_n_brute
                .map_or_else(|| "skipped".to_string(), |d| d.to_string());
            let status = if r.method_agreement.all() {
                "ok"
            } else {
                "DISAGREE"
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.n, r.d_n, r.d_n_rec2, brute, r.f_n, r.dstar_n, r.fstar_n, status
            )?;
        }
    }
    Ok(if agree { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_table(rows: &[TableRow], structured: bool, out: &mut dyn Write) -> Result<u8, CliError> {
    let comparisons = compare_tables(rows);
    let all_match = comparisons.iter().all(|c| c.matches);
    if structured {
        writeln!(
            out,
            "{}",
            json!({ "all_match": all_match, "rows": comparisons })
        )?;
    } else {
        for c in &comparisons {
            let row = &c.computed;
            writeln!(
                out,
                "{:?}\t{}\t{}\tcase={}\tk={}\ta1={}\thighlight={}\t{}",
                row.table,
                row.input,
                row.output,
                row.case,
                row.k.map_or("-".into(), |k| k.to_string()),
                row.a1.map_or("-".into(), |a| a.to_string()),
                row.highlight
                    .map_or("-".into(), |h| format!("{h:?}").to_lowercase()),
                if c.matches { "MATCH" } else { "MISMATCH" }
            )?;
            if !c.matches {
                writeln!(
                    out,
                    "\texpected {} -> {} case={} k={:?} a1={:?} highlight={:?}",
                    c.golden.input,
                    c.golden.output,
                    c.golden.case,
                    c.golden.k,
                    c.golden.a1,
                    c.golden.highlight
                )?;
            }
        }
        writeln!(
            out,
            "{} of {} rows match",
            comparisons.iter().filter(|c| c.matches).count(),
            comparisons.len()
        )?;
    }
    Ok(if all_match { EXIT_OK } else { EXIT_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("derangements").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn map_text() {
        let (code, out, _) = run_args(&["map", "--perm", "(1,3)(2,4)"]);
        assert_eq!(code, 0);
        assert_eq!(out, "(1)(2,3,4)\n");
    }

    #[test]
    fn map_excluded() {
        let (code, out, err) = run_args(&["map", "--perm", "(1,2)(3,4)"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("ExcludedInput"), "{err}");
    }

    #[test]
    fn map_structured() {
        let (code, out, _) = run_args(&["map", "--perm", "(1,2)(3,4,5)", "--structured"]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["case"], "i");
        assert_eq!(doc["k"], 1);
        assert_eq!(doc["a1"], 4);
        assert_eq!(doc["n"], 5);
        assert_eq!(doc["input"], "(1,2)(3,4,5)");
        assert_eq!(doc["output"], "(1)(2,4)(3,5)");
    }

    #[test]
    fn map_parse_error() {
        let (code, _, err) = run_args(&["map", "--perm", "(1,2"]);
        assert_eq!(code, 2);
        assert!(err.contains("ParseError"));
        let (code, _, err) = run_args(&["map", "--perm", "(1,2)(4,5)"]);
        assert_eq!(code, 2);
        assert!(err.contains("MissingElement(3)"));
        let (code, _, err) = run_args(&["map", "--perm", "(1)(2,3)"]);
        assert_eq!(code, 2);
        assert!(err.contains("NotADerangement"));
    }

    #[test]
    fn invert_examples() {
        let (code, out, _) = run_args(&["invert", "--perm", "(2)(1,3,4)"]);
        assert_eq!((code, out.as_str()), (0, "(1,2,3,4)\n"));
        let (code, out, _) = run_args(&["invert", "--perm", "(1,3,4)(2)"]);
        assert_eq!((code, out.as_str()), (0, "(1,2,3,4)\n"));
        let (code, _, err) = run_args(&["invert", "--perm", "(1)(2,3)(4,5)"]);
        assert_eq!(code, 2);
        assert!(err.contains("ExcludedInput"));
        let (code, _, err) = run_args(&["invert", "--perm", "(1,2,3)"]);
        assert_eq!(code, 2);
        assert!(err.contains("NotExactlyOneFixedPoint"));
    }

    #[test]
    fn invert_structured() {
        let (code, out, _) = run_args(&["invert", "--perm", "(1)(2,3,4,5)", "--structured"]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["output"], "(1,3)(2,4,5)");
        assert_eq!(doc["case"], "ii");
        assert_eq!(doc["a1"], 3);
    }

    #[test]
    fn map_then_invert_round_trips() {
        for input in [
            "(1,3)(2,4)",
            "(1,5,4)(2,3)",
            "(1,2)(3,5)(4,6,7)",
            "(1,2)(3,4)(5,6,7)",
        ] {
            let (_, mapped, _) = run_args(&["map", "--perm", input]);
            let (code, back, _) = run_args(&["invert", "--perm", mapped.trim()]);
            assert_eq!(code, 0);
            assert_eq!(back.trim(), parse_cycles(input).unwrap().to_string());
        }
    }

    #[test]
    fn verify_small() {
        let (code, out, _) = run_args(&["verify", "--max-n", "1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("n=1 bijective=true inverse_ok=true"));
        let (code, out, _) = run_args(&["verify", "--max-n", "5", "--jobs", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 6);
        assert!(out.ends_with("result=PASS\n"));
    }

    #[test]
    fn verify_structured() {
        let (code, out, _) = run_args(&["verify", "--max-n", "4", "--structured"]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["passed"], true);
        assert_eq!(doc["reports"].as_array().unwrap().len(), 4);
        assert_eq!(doc["reports"][3]["excluded_count_d"], 1);
        assert_eq!(doc["reports"][3]["cardinalities"]["dstar_n"], "8");
    }

    #[test]
    fn verify_bad_flags() {
        let (code, out, err) = run_args(&["verify", "--max-n", "99"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("BoundExceeded"));
        assert_eq!(run_args(&["verify", "--max-n", "0"]).0, 2);
        assert_eq!(run_args(&["verify", "--max-n", "3", "--jobs", "0"]).0, 2);
        assert_eq!(run_args(&["verify"]).0, 2);
        assert_eq!(run_args(&["verify", "--max-n", "x"]).0, 2);
    }

    #[test]
    fn count_table_text() {
        let (code, out, _) = run_args(&["count", "--max-n", "21"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 23);
        assert!(lines[1].starts_with("0\t1\t1\t1\t"));
        assert_eq!(lines[5], "4\t9\t9\t9\t8\t8\t8\tok");
        let row21: Vec<&str> = lines[22].split('\t').collect();
        assert_eq!(row21[1], row21[2]);
        assert_eq!(row21[3], "skipped");
    }

    #[test]
    fn count_structured() {
        let (code, out, _) = run_args(&["count", "--max-n", "5", "--structured"]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["agree"], true);
        assert_eq!(doc["records"][5]["d_n"], "44");
    }

    #[test]
    fn table_matches() {
        let (code, out, _) = run_args(&["table"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.ends_with("16 of 16 rows match\n"));
        assert!(out.contains("(1,5,4)(2,3)\t(5)(1,4)(2,3)\tcase=i\tk=0\ta1=5"));
    }

    #[test]
    fn table_with_tampered_golden() {
        let mut rows = golden_rows();
        rows[1].output = "(1)(2,4,3)".into();
        let dir = std::env::temp_dir().join(format!("derangements-golden-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("golden.json");
        std::fs::write(&path, serde_json::to_string(&rows).unwrap()).unwrap();
        let (code, out, _) = run_args(&["table", "--golden", path.to_str().unwrap()]);
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(code, 1);
        assert!(out.contains("MISMATCH"));
        assert!(out.ends_with("15 of 16 rows match\n"));
    }

    #[test]
    fn enumerate_lines() {
        let (code, out, _) = run_args(&["enumerate", "--n", "3", "--class", "d"]);
        assert_eq!(code, 0);
        assert_eq!(out, "(1,2,3)\n(1,3,2)\n");
        let (_, out, _) = run_args(&["enumerate", "--n", "4", "--class", "dstar"]);
        assert_eq!(out.lines().count(), 8);
        assert_eq!(run_args(&["enumerate", "--n", "3", "--class", "q"]).0, 2);
    }

    #[test]
    fn help_is_not_an_error() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }
}
