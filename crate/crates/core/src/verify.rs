//! Exhaustive checking of the bijection over `S_n`, and the worked example
//! tables for `n = 4` and `n = 5`.

use std::collections::HashMap;
use std::fmt;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::bijection::{psi_inverse, psi_mapping, BijectionCase, BijectionError};
use crate::enumerate::{
    count_d_rec1, count_d_rec2, ClassCounts, CountRecord, EnumerateError, LexPermutations,
    DEFAULT_BOUND,
};
use crate::perm::{parse_cycles, CycleForm, Element, FormatMode, PermClass, Permutation};

/// Witnesses kept per report.
pub const MAX_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// ψ applied to a derangement.
    Forward,
    /// Exclusion bookkeeping on `D_n` and `F_n`.
    Exclusion,
    /// Two derangements with the same image.
    Image,
    /// ψ⁻¹ applied to a one-fixed-point permutation, or a round trip.
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub phase: Phase,
    /// One-line image of the input, used for ordering.
    #[serde(skip)]
    key: Vec<Element>,
    pub input: String,
    pub expected: String,
    pub actual: String,
}

impl Failure {
    fn new(
        phase: Phase,
        input: &Permutation,
        expected: impl Into<String>,
        actual: impl Into<String>,
    ) -> Self {
        Failure {
            phase,
            key: input.image().to_vec(),
            input: input.to_cycle_form().to_string(),
            expected: expected.into(),
            actual: actual.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub bijective: bool,
    pub inverse_ok: bool,
    /// Derangements rejected as excluded inputs.
    pub excluded_count_d: u64,
    /// One-fixed-point permutations rejected as excluded inputs.
    pub excluded_count_f: u64,
    /// Distinct images of `D*_n`.
    pub image_size: u64,
    pub invariant_violations: u64,
    pub cardinalities: CountRecord,
    pub failure_count: u64,
    /// The first [`MAX_FAILURES`] witnesses by phase, then input order.
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.inverse_ok
    }
}

impl fmt::Display for VerifyReport {
    /// One line of `key=value` pairs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts = self.cardinalities.brute.unwrap_or_default();
        write!(
            f,
            "n={} bijective={} inverse_ok={} excluded_d={} excluded_f={} d_n={} f_n={} dstar_n={} fstar_n={} image_size={} invariant_violations={} failures={}",
            self.n,
            self.bijective,
            self.inverse_ok,
            self.excluded_count_d,
            self.excluded_count_f,
            counts.d,
            counts.f,
            counts.dstar,
            counts.fstar,
            self.image_size,
            self.invariant_violations,
            self.failure_count,
        )
    }
}

#[derive(Default)]
struct ShardResult {
    counts: ClassCounts,
    excluded_d: u64,
    excluded_f: u64,
    invariant_violations: u64,
    failure_count: u64,
    inverse_failures: u64,
    failures: Vec<Failure>,
    /// image -> preimage
    images: HashMap<Permutation, Permutation>,
}

impl ShardResult {
    fn fail(&mut self, failure: Failure) {
        self.failure_count += 1;
        self.inverse_failures += (failure.phase == Phase::Inverse) as u64;
        self.failures.push(failure);
        // Keep the smallest witnesses so the merged report is independent of
        // how the work was split.
        if self.failures.len() > 4 * MAX_FAILURES {
            self.trim();
        }
    }

    fn trim(&mut self) {
        self.failures.sort();
        self.failures.truncate(MAX_FAILURES);
    }

    fn record_error(
        &mut self,
        phase: Phase,
        input: &Permutation,
        expected: &str,
        err: &BijectionError,
    ) {
        if matches!(err, BijectionError::InvariantViolated(_)) {
            self.invariant_violations += 1;
        }
        self.fail(Failure::new(phase, input, expected, err.to_string()));
    }

    fn check_derangement(&mut self, p: &Permutation, in_dstar: bool) {
        let c = p.to_cycle_form();
        match psi_mapping(&c) {
            Err(BijectionError::ExcludedInput(_)) => {
                self.excluded_d += 1;
                if in_dstar {
                    self.fail(Failure::new(
                        Phase::Exclusion,
                        p,
                        "an image",
                        "ExcludedInput",
                    ));
                }
            }
            Err(err) => self.record_error(Phase::Forward, p, "an image", &err),
            Ok(mapping) => {
                if !in_dstar {
                    self.fail(Failure::new(
                        Phase::Exclusion,
                        p,
                        "ExcludedInput",
                        mapping.output.to_string(),
                    ));
                    return;
                }
                let image = mapping.output.to_permutation();
                if !PermClass::FStar.contains(&image) {
                    self.fail(Failure::new(
                        Phase::Forward,
                        p,
                        "an image in F*",
                        mapping.output.to_string(),
                    ));
                }
                match psi_inverse(&mapping.output) {
                    Ok(back) if back == c => {}
                    Ok(back) => self.fail(Failure::new(
                        Phase::Inverse,
                        p,
                        c.to_string(),
                        back.to_string(),
                    )),
                    Err(err) => self.record_error(Phase::Inverse, p, &c.to_string(), &err),
                }
                if let Some(prev) = self.images.insert(image, p.clone()) {
                    self.fail(Failure::new(
                        Phase::Image,
                        p,
                        format!("an image distinct from that of {}", prev.to_cycle_form()),
                        mapping.output.to_string(),
                    ));
                }
            }
        }
    }

    fn check_fixed(&mut self, p: &Permutation, in_fstar: bool) {
        let c = p.to_cycle_form();
        match psi_inverse(&c) {
            Err(BijectionError::ExcludedInput(_)) => {
                self.excluded_f += 1;
                if in_fstar {
                    self.fail(Failure::new(
                        Phase::Exclusion,
                        p,
                        "a preimage",
                        "ExcludedInput",
                    ));
                }
            }
            Err(err) => self.record_error(Phase::Inverse, p, "a preimage", &err),
            Ok(pre) => {
                if !in_fstar {
                    self.fail(Failure::new(
                        Phase::Exclusion,
                        p,
                        "ExcludedInput",
                        pre.to_string(),
                    ));
                    return;
                }
                if !PermClass::DStar.contains(&pre.to_permutation()) {
                    self.fail(Failure::new(
                        Phase::Inverse,
                        p,
                        "a preimage in D*",
                        pre.to_string(),
                    ));
                }
                match psi_mapping(&pre) {
                    Ok(m) if m.output == c => {}
                    Ok(m) => self.fail(Failure::new(
                        Phase::Inverse,
                        p,
                        c.to_string(),
                        m.output.to_string(),
                    )),
                    Err(err) => self.record_error(Phase::Inverse, p, &c.to_string(), &err),
                }
            }
        }
    }

    fn run(n: usize, firsts: impl Iterator<Item = Element>) -> Self {
        let mut shard = ShardResult::default();
        for first in firsts {
            for p in LexPermutations::with_first(n, first) {
                shard.visit(&p);
            }
        }
        shard
    }

    fn visit(&mut self, p: &Permutation) {
        self.counts.s += 1;
        let classes = p.classify();
        let has = |c| classes.contains(&c);
        if has(PermClass::D) {
            self.counts.d += 1;
            self.counts.dstar += has(PermClass::DStar) as u64;
            self.check_derangement(p, has(PermClass::DStar));
        } else if has(PermClass::F) {
            self.counts.f += 1;
            self.counts.fstar += has(PermClass::FStar) as u64;
            self.check_fixed(p, has(PermClass::FStar));
        }
    }
}

/// [`verify_n_with_bound`] with the default bound.
pub fn verify_n(n: usize, shard_count: usize) -> Result<VerifyReport, EnumerateError> {
    verify_n_with_bound(n, shard_count, DEFAULT_BOUND)
}

/// Runs ψ over all of `D_n` and ψ⁻¹ over all of `F_n`.
///
/// `S_n` is split into shards by `π(1)`; shard `s` of `m` takes the values
/// `v` with `(v - 1) % m == s`. Each shard runs on its own thread with its own
/// image map, and the maps are merged afterwards with a disjointness check.
/// A `shard_count` of zero is treated as one.
pub fn verify_n_with_bound(
    n: usize,
    shard_count: usize,
    bound: usize,
) -> Result<VerifyReport, EnumerateError> {
    if n > bound {
        return Err(EnumerateError::BoundExceeded { n, bound });
    }
    let shard_count = shard_count.max(1);

    let shards: Vec<ShardResult> = if n == 0 {
        let mut shard = ShardResult::default();
        shard.visit(&Permutation::identity(0));
        vec![shard]
    } else if shard_count == 1 {
        vec![ShardResult::run(n, 1..=n as Element)]
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = (0..shard_count)
                .map(|s| {
                    scope.spawn(move || {
                        ShardResult::run(
                            n,
                            (1..=n as Element)
                                .filter(move |v| (*v as usize - 1) % shard_count == s),
                        )
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("verification shard panicked"))
                .collect()
        })
    };

    let mut merged = ShardResult::default();
    for shard in shards {
        merged.counts.s += shard.counts.s;
        merged.counts.d += shard.counts.d;
        merged.counts.f += shard.counts.f;
        merged.counts.dstar += shard.counts.dstar;
        merged.counts.fstar += shard.counts.fstar;
        merged.excluded_d += shard.excluded_d;
        merged.excluded_f += shard.excluded_f;
        merged.invariant_violations += shard.invariant_violations;
        merged.failure_count += shard.failure_count;
        merged.inverse_failures += shard.inverse_failures;
        merged.failures.extend(shard.failures);
        if merged.images.is_empty() {
            merged.images = shard.images;
            continue;
        }
        for (image, pre) in shard.images {
            if let Some(prev) = merged.images.get(&image) {
                let failure = Failure::new(
                    Phase::Image,
                    &pre,
                    format!("an image distinct from that of {}", prev.to_cycle_form()),
                    image
                        .to_cycle_form()
                        .format(FormatMode::Canonical)
                        .unwrap_or_default(),
                );
                merged.fail(failure);
            } else {
                merged.images.insert(image, pre);
            }
        }
    }

    let expected_excluded_d = (n.is_multiple_of(2)) as u64;
    let expected_excluded_f = (!n.is_multiple_of(2)) as u64;
    if merged.excluded_d != expected_excluded_d {
        merged.failure_count += 1;
        merged.failures.push(Failure {
            phase: Phase::Exclusion,
            key: Vec::new(),
            input: format!("D_{n}"),
            expected: format!("{expected_excluded_d} excluded"),
            actual: format!("{} excluded", merged.excluded_d),
        });
    }
    if merged.excluded_f != expected_excluded_f {
        merged.failure_count += 1;
        merged.failures.push(Failure {
            phase: Phase::Exclusion,
            key: Vec::new(),
            input: format!("F_{n}"),
            expected: format!("{expected_excluded_f} excluded"),
            actual: format!("{} excluded", merged.excluded_f),
        });
    }
    merged.trim();

    let image_size = merged.images.len() as u64;
    let counts = merged.counts;
    let sizes_match = image_size == counts.dstar && image_size == counts.fstar;
    let inverse_ok = merged.inverse_failures == 0;
    let bijective = sizes_match && merged.failure_count == 0 && merged.invariant_violations == 0;

    let rec1 = count_d_rec1(n);
    let rec2 = count_d_rec2(n);
    Ok(VerifyReport {
        n,
        bijective,
        inverse_ok,
        excluded_count_d: merged.excluded_d,
        excluded_count_f: merged.excluded_f,
        image_size,
        invariant_violations: merged.invariant_violations,
        cardinalities: CountRecord::new(n, &rec1, &rec2, Some(counts)),
        failure_count: merged.failure_count,
        failures: merged.failures,
    })
}

/// Which worked-example table a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table {
    D4,
    D5,
}

/// Colour marking where `a1` lands: red when `a1` becomes the fixed point,
/// blue when the fixed point is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Highlight {
    Red,
    Blue,
}

/// A row of the worked examples. `"-"` marks a missing input or output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub table: Table,
    pub input: String,
    pub output: String,
    /// `"i"`, `"ii"`, or `"-"` for rows without a mapping.
    pub case: String,
    pub k: Option<usize>,
    pub a1: Option<Element>,
    pub highlight: Option<Highlight>,
}

/// `(table, input, output, case, k, a1, highlight)`
pub type GoldenRow = (
    Table,
    &'static str,
    &'static str,
    &'static str,
    Option<usize>,
    Option<Element>,
    Option<Highlight>,
);

/// Reference rows as printed in the worked examples: single-digit cycles
/// without separators, and the highlight colour of `a1`.
pub const GOLDEN_ROWS: &[GoldenRow] = {
    use Highlight::{Blue, Red};
    use Table::{D4, D5};
    &[
        (D4, "(12)(34)", "-", "-", None, None, None),
        (
            D4,
            "(13)(24)",
            "(1)(234)",
            "ii",
            Some(0),
            Some(3),
            Some(Blue),
        ),
        (
            D4,
            "(14)(23)",
            "(1)(243)",
            "ii",
            Some(0),
            Some(4),
            Some(Blue),
        ),
        (D4, "(1234)", "(2)(134)", "i", Some(0), Some(2), Some(Red)),
        (D4, "(1243)", "(2)(143)", "i", Some(0), Some(2), Some(Red)),
        (D4, "(1324)", "(3)(124)", "i", Some(0), Some(3), Some(Red)),
        (D4, "(1342)", "(3)(142)", "i", Some(0), Some(3), Some(Red)),
        (D4, "(1423)", "(4)(123)", "i", Some(0), Some(4), Some(Red)),
        (D4, "(1432)", "(4)(132)", "i", Some(0), Some(4), Some(Red)),
        (D5, "-", "(1)(23)(45)", "-", None, None, None),
        (
            D5,
            "(12)(345)",
            "(1)(24)(35)",
            "i",
            Some(1),
            Some(4),
            Some(Blue),
        ),
        (
            D5,
            "(12)(354)",
            "(1)(25)(34)",
            "i",
            Some(1),
            Some(5),
            Some(Blue),
        ),
        (
            D5,
            "(123)(45)",
            "(2)(13)(45)",
            "i",
            Some(0),
            Some(2),
            Some(Red),
        ),
        (
            D5,
            "(13)(245)",
            "(1)(2345)",
            "ii",
            Some(0),
            Some(3),
            Some(Blue),
        ),
        (
            D5,
            "(14)(235)",
            "(1)(2435)",
            "ii",
            Some(0),
            Some(4),
            Some(Blue),
        ),
        (
            D5,
            "(154)(23)",
            "(5)(14)(23)",
            "i",
            Some(0),
            Some(5),
            Some(Red),
        ),
    ]
};

/// The embedded reference rows as [`TableRow`]s.
pub fn golden_rows() -> Vec<TableRow> {
    GOLDEN_ROWS
        .iter()
        .map(|&(table, input, output, case, k, a1, highlight)| TableRow {
            table,
            input: input.into(),
            output: output.into(),
            case: case.into(),
            k,
            a1,
            highlight,
        })
        .collect()
}

fn table_size(table: Table) -> usize {
    match table {
        Table::D4 => 4,
        Table::D5 => 5,
    }
}

fn compute_row(golden: &TableRow) -> TableRow {
    let n = table_size(golden.table);
    let blank = |input: String, output: String| TableRow {
        table: golden.table,
        input,
        output,
        case: "-".into(),
        k: None,
        a1: None,
        highlight: None,
    };
    let render = |c: &CycleForm| {
        c.format(FormatMode::FixedPointFirst)
            .unwrap_or_else(|_| c.to_string())
    };

    if golden.input == "-" {
        // A one-fixed-point permutation with no preimage.
        let Ok(sigma) = parse_normalized(&golden.output, n) else {
            return blank("?".into(), golden.output.clone());
        };
        let input = match psi_inverse(&sigma) {
            Err(BijectionError::ExcludedInput(_)) => "-".to_string(),
            Ok(pre) => pre.to_string(),
            Err(err) => err.kind().to_string(),
        };
        return blank(input, render(&sigma));
    }

    let Ok(pi) = parse_normalized(&golden.input, n) else {
        return blank("?".into(), "?".into());
    };
    match psi_mapping(&pi) {
        Err(BijectionError::ExcludedInput(_)) => blank(pi.to_string(), "-".into()),
        Err(err) => blank(pi.to_string(), err.kind().to_string()),
        Ok(m) => {
            let (case, k, a1) = match m.case {
                BijectionCase::CaseI { k, a1 } => ("i", k, a1),
                BijectionCase::CaseII { k, a1 } => ("ii", k, a1),
                BijectionCase::Excluded => unreachable!("excluded inputs have no mapping"),
            };
            let highlight = if m.output.fixed_points() == [a1] {
                Highlight::Red
            } else {
                Highlight::Blue
            };
            TableRow {
                table: golden.table,
                input: pi.to_string(),
                output: render(&m.output),
                case: case.into(),
                k: Some(k),
                a1: Some(a1),
                highlight: Some(highlight),
            }
        }
    }
}

/// Parses table notation. Cycles written without separators are split into
/// single digits, which is unambiguous for `n < 10`.
fn parse_normalized(text: &str, n: usize) -> Result<CycleForm, crate::perm::PermError> {
    if text.contains(',') || n >= 10 {
        return parse_cycles(text);
    }
    let spaced: String = text
        .chars()
        .flat_map(|c| {
            if c.is_ascii_digit() {
                vec![c, ' ']
            } else {
                vec![c]
            }
        })
        .collect();
    parse_cycles(&spaced)
}

/// Strips separators so `(1,3)(2,4)` and `(13)(24)` compare equal.
pub fn normalize_separators(text: &str) -> String {
    text.chars()
        .filter(|c| *c != ',' && !c.is_whitespace())
        .collect()
}

/// The worked example tables recomputed with ψ, one row per reference row.
pub fn golden_tables() -> Vec<TableRow> {
    golden_rows().iter().map(compute_row).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowComparison {
    pub computed: TableRow,
    pub golden: TableRow,
    pub matches: bool,
}

fn rows_match(a: &TableRow, b: &TableRow) -> bool {
    a.table == b.table
        && normalize_separators(&a.input) == normalize_separators(&b.input)
        && normalize_separators(&a.output) == normalize_separators(&b.output)
        && a.case == b.case
        && a.k == b.k
        && a.a1 == b.a1
        && a.highlight == b.highlight
}

/// Recomputes every row of `golden` and compares after separator
/// normalization.
pub fn compare_tables(golden: &[TableRow]) -> Vec<RowComparison> {
    golden
        .iter()
        .map(|g| {
            let computed = compute_row(g);
            RowComparison {
                matches: rows_match(&computed, g),
                computed,
                golden: g.clone(),
            }
        })
        .collect()
}
