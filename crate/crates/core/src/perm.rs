//! Permutations of `{1..n}` in one-line and cycle notation.
//!
//! All external values are 1-based: `image[i - 1] == π(i)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Element of `{1..n}`.
pub type Element = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("RepeatedElement({0}): element appears more than once")]
    RepeatedElement(Element),
    #[error("MissingElement({0}): element does not appear")]
    MissingElement(Element),
    #[error("ElementOutOfRange({0}): element is outside 1..={1}")]
    OutOfRange(Element, usize),
    #[error("EmptyCycle: a cycle must contain at least one element")]
    EmptyCycle,
    #[error("NotOneFixedPoint: permutation has {0} fixed points, expected exactly 1")]
    NotOneFixedPoint(usize),
}

/// A bijection of `{1..n}` stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Element>", into = "Vec<Element>")]
pub struct Permutation {
    image: Vec<Element>,
}

impl Permutation {
    /// Validates that `image` contains every value of `1..=image.len()` once.
    pub fn new(image: Vec<Element>) -> Result<Self, PermError> {
        check_partition(image.len(), image.iter().copied())?;
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (1..=n as Element).collect(),
        }
    }

    /// The caller guarantees `image` is a permutation of `1..=len`.
    pub(crate) fn from_image_unchecked(image: Vec<Element>) -> Self {
        debug_assert!(check_partition(image.len(), image.iter().copied()).is_ok());
        Permutation { image }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[Element] {
        &self.image
    }

    /// `π(i)` for `i` in `1..=n`.
    pub fn apply(&self, i: Element) -> Element {
        self.image[(i - 1) as usize]
    }

    pub fn fixed_points(&self) -> BTreeSet<Element> {
        fixed_points(self)
    }

    pub fn to_cycle_form(&self) -> CycleForm {
        to_cycle_form(self)
    }

    pub fn classify(&self) -> BTreeSet<PermClass> {
        classify(self)
    }
}

impl TryFrom<Vec<Element>> for Permutation {
    type Error = PermError;
    fn try_from(image: Vec<Element>) -> Result<Self, Self::Error> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<Element> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// Checks that `elements` lists every value of `1..=n` exactly once.
///
/// Reports a repeated element before a missing one.
fn check_partition(n: usize, elements: impl Iterator<Item = Element>) -> Result<(), PermError> {
    let mut seen = vec![false; n];
    for e in elements {
        if e == 0 || e as usize > n {
            return Err(PermError::OutOfRange(e, n));
        }
        let slot = &mut seen[(e - 1) as usize];
        if *slot {
            return Err(PermError::RepeatedElement(e));
        }
        *slot = true;
    }
    match seen.iter().position(|&s| !s) {
        Some(i) => Err(PermError::MissingElement(i as Element + 1)),
        None => Ok(()),
    }
}

/// How a [`CycleForm`] is rendered as text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatMode {
    Canonical,
    /// The unique 1-cycle first, then the remaining cycles in canonical order.
    FixedPointFirst,
}

/// A cycle decomposition of a permutation of `{1..n}`.
///
/// The cycle `(c1, c2, ..., cm)` means `π(c1) = c2, ..., π(cm) = c1`. Values
/// built by [`to_cycle_form`] and [`parse_cycles`] are canonical: every cycle
/// starts at its minimum and cycles are sorted by their first element.
/// [`CycleForm::from_cycles`] accepts any valid decomposition and leaves its
/// order alone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CycleForm {
    n: usize,
    cycles: Vec<Vec<Element>>,
}

impl CycleForm {
    /// Validates that `cycles` partition `{1..n}`. Order is kept as given.
    pub fn from_cycles(n: usize, cycles: Vec<Vec<Element>>) -> Result<Self, PermError> {
        if cycles.iter().any(|c| c.is_empty()) {
            return Err(PermError::EmptyCycle);
        }
        check_partition(n, cycles.iter().flatten().copied())?;
        Ok(CycleForm { n, cycles })
    }

    /// The caller guarantees that `cycles` partition `{1..n}`.
    pub(crate) fn from_cycles_unchecked(n: usize, cycles: Vec<Vec<Element>>) -> Self {
        debug_assert!(CycleForm::from_cycles(n, cycles.clone()).is_ok());
        CycleForm { n, cycles }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Vec<Element>] {
        &self.cycles
    }

    pub fn into_cycles(self) -> Vec<Vec<Element>> {
        self.cycles
    }

    pub fn is_canonical(&self) -> bool {
        self.cycles
            .iter()
            .all(|c| c.iter().skip(1).all(|&e| e > c[0]))
            && self.cycles.windows(2).all(|w| w[0][0] < w[1][0])
    }

    /// Rotates each cycle to start at its minimum and sorts cycles by first element.
    pub fn canonicalize(mut self) -> Self {
        for cycle in &mut self.cycles {
            let min_at = cycle
                .iter()
                .enumerate()
                .min_by_key(|&(_, &e)| e)
                .map(|(i, _)| i)
                .unwrap_or(0);
            cycle.rotate_left(min_at);
        }
        self.cycles.sort_unstable_by_key(|c| c[0]);
        self
    }

    /// Elements forming 1-cycles, ascending.
    pub fn fixed_points(&self) -> Vec<Element> {
        let mut fixed: Vec<Element> = self
            .cycles
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| c[0])
            .collect();
        fixed.sort_unstable();
        fixed
    }

    pub fn is_derangement(&self) -> bool {
        self.cycles.iter().all(|c| c.len() > 1)
    }

    pub fn to_permutation(&self) -> Permutation {
        let mut image = vec![0; self.n];
        for cycle in &self.cycles {
            for (i, &e) in cycle.iter().enumerate() {
                image[(e - 1) as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::from_image_unchecked(image)
    }

    pub fn format(&self, mode: FormatMode) -> Result<String, PermError> {
        format_cycles(self, mode)
    }
}

impl fmt::Display for CycleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let canonical = self.clone().canonicalize();
        write_cycles(f, canonical.cycles.iter())
    }
}

impl FromStr for CycleForm {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_cycles(s)
    }
}

fn write_cycles<'a, W: fmt::Write>(
    out: &mut W,
    cycles: impl Iterator<Item = &'a Vec<Element>>,
) -> fmt::Result {
    for cycle in cycles {
        out.write_char('(')?;
        for (i, e) in cycle.iter().enumerate() {
            if i > 0 {
                out.write_char(',')?;
            }
            write!(out, "{e}")?;
        }
        out.write_char(')')?;
    }
    Ok(())
}

/// Canonical cycle decomposition of `p`.
pub fn to_cycle_form(p: &Permutation) -> CycleForm {
    let n = p.n();
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    // Scanning starts in increasing order, so each cycle is opened at its
    // minimum and cycles come out sorted.
    for start in 1..=n as Element {
        if visited[(start - 1) as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut e = start;
        while !visited[(e - 1) as usize] {
            visited[(e - 1) as usize] = true;
            cycle.push(e);
            e = p.apply(e);
        }
        cycles.push(cycle);
    }
    CycleForm { n, cycles }
}

/// The permutation with the orbits described by `c`, in any cycle order.
pub fn from_cycle_form(c: &CycleForm) -> Permutation {
    c.to_permutation()
}

/// Parses text such as `(1,3,4)(2)`. Separators inside a cycle may be commas
/// or whitespace. `n` is the largest element; every element of `1..=n` must
/// appear, fixed points included.
pub fn parse_cycles(text: &str) -> Result<CycleForm, PermError> {
    let mut cycles = Vec::new();
    let mut chars = text.char_indices().peekable();

    let skip_ws = |chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>| {
        while chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            chars.next();
        }
    };

    loop {
        skip_ws(&mut chars);
        match chars.next() {
            None => break,
            Some((_, '(')) => {}
            Some((pos, c)) => {
                return Err(PermError::Parse(format!(
                    "expected '(' at byte {pos}, found {c:?}"
                )))
            }
        }
        let mut cycle: Vec<Element> = Vec::new();
        loop {
            skip_ws(&mut chars);
            let mut digits = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                digits.push(c);
                chars.next();
            }
            if digits.is_empty() {
                return Err(match chars.peek() {
                    Some(&(pos, c)) => {
                        PermError::Parse(format!("expected an integer at byte {pos}, found {c:?}"))
                    }
                    None => PermError::Parse("unexpected end of input inside a cycle".into()),
                });
            }
            let value: Element = digits
                .parse()
                .map_err(|_| PermError::Parse(format!("integer {digits} is too large")))?;
            if value == 0 {
                return Err(PermError::Parse("elements must be at least 1".into()));
            }
            cycle.push(value);

            let had_ws = chars.peek().is_some_and(|(_, c)| c.is_whitespace());
            skip_ws(&mut chars);
            match chars.peek() {
                Some(&(_, ')')) => {
                    chars.next();
                    break;
                }
                Some(&(_, ',')) => {
                    chars.next();
                }
                Some(&(_, c)) if c.is_ascii_digit() && had_ws => {}
                Some(&(pos, c)) => {
                    return Err(PermError::Parse(format!(
                        "expected ',' or ')' at byte {pos}, found {c:?}"
                    )))
                }
                None => return Err(PermError::Parse("unterminated cycle".into())),
            }
        }
        cycles.push(cycle);
    }

    if cycles.is_empty() {
        return Err(PermError::Parse("expected at least one cycle".into()));
    }

    // Validate on a sorted copy so a large stray element does not force a
    // large allocation.
    let mut all: Vec<Element> = cycles.iter().flatten().copied().collect();
    all.sort_unstable();
    if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
        return Err(PermError::RepeatedElement(w[0]));
    }
    if let Some((i, _)) = all
        .iter()
        .enumerate()
        .find(|&(i, &e)| e != i as Element + 1)
    {
        return Err(PermError::MissingElement(i as Element + 1));
    }
    let n = all.len();
    Ok(CycleForm { n, cycles }.canonicalize())
}

pub fn format_cycles(c: &CycleForm, mode: FormatMode) -> Result<String, PermError> {
    let canonical = c.clone().canonicalize();
    let mut out = String::new();
    match mode {
        FormatMode::Canonical => {
            write_cycles(&mut out, canonical.cycles.iter()).expect("writing to a String");
        }
        FormatMode::FixedPointFirst => {
            let fixed = canonical.fixed_points();
            if fixed.len() != 1 {
                return Err(PermError::NotOneFixedPoint(fixed.len()));
            }
            let (fixed, rest): (Vec<_>, Vec<_>) =
                canonical.cycles.iter().partition(|cyc| cyc.len() == 1);
            write_cycles(&mut out, fixed.into_iter().chain(rest)).expect("writing to a String");
        }
    }
    Ok(out)
}

pub fn fixed_points(p: &Permutation) -> BTreeSet<Element> {
    (1..=p.n() as Element)
        .filter(|&i| p.apply(i) == i)
        .collect()
}

/// Membership tags for the families of permutations handled here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PermClass {
    /// Every permutation.
    S,
    /// No fixed points.
    D,
    /// Exactly one fixed point.
    F,
    /// `D` without `(1,2)(3,4)...(n-1,n)` when `n` is even.
    DStar,
    /// `F` without `(1)(2,3)...(n-1,n)` when `n` is odd.
    FStar,
}

impl PermClass {
    pub const ALL: [PermClass; 5] = [
        PermClass::S,
        PermClass::D,
        PermClass::F,
        PermClass::DStar,
        PermClass::FStar,
    ];

    pub fn contains(self, p: &Permutation) -> bool {
        let n = p.n();
        let fixed = (1..=n as Element).filter(|&i| p.apply(i) == i).count();
        match self {
            PermClass::S => true,
            PermClass::D => fixed == 0,
            PermClass::F => fixed == 1,
            PermClass::DStar => fixed == 0 && !(n.is_multiple_of(2) && is_excluded_derangement(p)),
            PermClass::FStar => fixed == 1 && !(!n.is_multiple_of(2) && is_excluded_fixed(p)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PermClass::S => "s",
            PermClass::D => "d",
            PermClass::F => "f",
            PermClass::DStar => "dstar",
            PermClass::FStar => "fstar",
        }
    }
}

impl fmt::Display for PermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PermClass {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PermClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| PermError::Parse(format!("unknown permutation class {s:?}")))
    }
}

pub fn classify(p: &Permutation) -> BTreeSet<PermClass> {
    PermClass::ALL
        .into_iter()
        .filter(|c| c.contains(p))
        .collect()
}

/// `(1,2)(3,4)...(n-1,n)`; only defined for even `n`.
pub fn excluded_derangement(n: usize) -> Option<CycleForm> {
    if !n.is_multiple_of(2) {
        return None;
    }
    let cycles = (0..n as Element / 2)
        .map(|i| vec![2 * i + 1, 2 * i + 2])
        .collect();
    Some(CycleForm { n, cycles })
}

/// `(1)(2,3)...(n-1,n)`; only defined for odd `n`.
pub fn excluded_fixed(n: usize) -> Option<CycleForm> {
    if n.is_multiple_of(2) {
        return None;
    }
    let cycles = std::iter::once(vec![1])
        .chain((1..=n as Element / 2).map(|i| vec![2 * i, 2 * i + 1]))
        .collect();
    Some(CycleForm { n, cycles })
}

fn is_excluded_derangement(p: &Permutation) -> bool {
    p.image()
        .iter()
        .enumerate()
        .all(|(i, &v)| v as usize == if i % 2 == 0 { i + 2 } else { i })
}

fn is_excluded_fixed(p: &Permutation) -> bool {
    p.image().iter().enumerate().all(|(i, &v)| {
        v as usize
            == match i {
                0 => 1,
                _ if i % 2 == 1 => i + 2,
                _ => i,
            }
    })
}
