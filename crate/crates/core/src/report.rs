//! Evidence tables: ex(n, F) sequences with exact rational densities, the
//! closed-form bounds, monotonicity checks, and CSV/JSON serialization.
//!
//! Ratios are exact rationals throughout; the decimal column is
//! presentation only (round-half-even to six places).

use crate::constructions::multipartite_member_count;
use crate::daisy::DaisyPattern;
use crate::error::{Error, Result};
use crate::family::binomial;
use crate::products::{enumerate_copies, UniformHypergraph};
use crate::solver::{build_daisy_constraints, solve_max_avoiding, SolveStatus, SolverConfig};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub type Rat = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundKind {
    /// Upper bound on the density ratio, valid at every n.
    UpperRatio(Rat),
    /// Upper bound on the count at this n (may be fractional).
    UpperCount(Rat),
    /// Lower bound on the count: a feasible construction at the same n.
    LowerCount(u64),
    /// Lower bound on the density ratio, valid at every applicable n.
    LowerRatio(Rat),
    /// Asymptotic lower bound on the limiting density; informational,
    /// not checked against finite rows.
    LowerRatioLimit(Rat),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedBound {
    pub name: String,
    pub kind: BoundKind,
}

/// One row of an evidence table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityRecord {
    pub problem: String,
    pub n: usize,
    pub value: u64,
    /// False when the solver hit its node limit: the value is then a
    /// lower bound and the row reads ">= value".
    pub is_exact: bool,
    pub ratio: Rat,
    pub bounds: Vec<NamedBound>,
}

/// A Turan-type problem the table builder can solve per n.
#[derive(Debug, Clone)]
pub enum ExProblem {
    Daisy(DaisyPattern),
    Forbidden {
        name: String,
        hypergraph: UniformHypergraph,
    },
}

impl ExProblem {
    pub fn id(&self) -> String {
        match self {
            ExProblem::Daisy(p) => p.to_string(),
            ExProblem::Forbidden { name, .. } => name.clone(),
        }
    }

    pub fn uniformity(&self) -> usize {
        match self {
            ExProblem::Daisy(p) => p.r(),
            ExProblem::Forbidden { hypergraph, .. } => hypergraph.uniformity(),
        }
    }

    /// Stable problem id for a forbidden hypergraph file: ground size,
    /// uniformity, edge count, and an FNV-1a digest of the edge ranks.
    pub fn forbidden(hypergraph: UniformHypergraph) -> Self {
        let mut hash = 0xcbf29ce484222325u64;
        for rank in hypergraph.edges().ranks() {
            for byte in rank.to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        }
        let name = format!(
            "F{}u{}x{}-{:08x}",
            hypergraph.ground_size(),
            hypergraph.uniformity(),
            hypergraph.edge_count(),
            hash as u32
        );
        ExProblem::Forbidden { name, hypergraph }
    }
}

#[derive(Debug, Clone)]
pub struct ExTable {
    pub records: Vec<DensityRecord>,
    pub skipped: Vec<(usize, String)>,
    /// Ratios over the exact rows are nonincreasing in n.
    pub exact_ratios_nonincreasing: bool,
}

/// Solve the problem for each n in [n_from, n_to] and assemble records.
/// Oversize instances are skipped with a note rather than failing the
/// whole table.
pub fn ex_table(
    problem: &ExProblem,
    n_from: usize,
    n_to: usize,
    cfg: &SolverConfig,
) -> Result<ExTable> {
    let r = problem.uniformity();
    if n_from < r {
        return Err(Error::invalid(format!(
            "table starts below the uniformity: n_from = {n_from} < r = {r}"
        )));
    }
    if n_to < n_from {
        return Err(Error::invalid(format!("empty range {n_from}..={n_to}")));
    }
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for n in n_from..=n_to {
        let system = match problem {
            ExProblem::Daisy(pattern) => build_daisy_constraints(n, pattern),
            ExProblem::Forbidden { hypergraph, .. } => enumerate_copies(hypergraph, n),
        };
        let system = match system {
            Ok(cs) => cs,
            Err(Error::ResourceRefusal(note)) => {
                skipped.push((n, note));
                continue;
            }
            Err(e) => return Err(e),
        };
        let solved = solve_max_avoiding(&system, cfg)?;
        let bounds = match problem {
            ExProblem::Daisy(pattern) => closed_form_bounds(pattern, n)?,
            ExProblem::Forbidden { .. } => Vec::new(),
        };
        records.push(DensityRecord {
            problem: problem.id(),
            n,
            value: solved.objective,
            is_exact: solved.status == SolveStatus::Exact,
            ratio: Rat::new(solved.objective, binomial(n, r)),
            bounds,
        });
    }
    let exact_ratios_nonincreasing = ratios_nonincreasing(&records);
    Ok(ExTable {
        records,
        skipped,
        exact_ratios_nonincreasing,
    })
}

/// Nonincreasing check over the exact rows, in n order.
pub fn ratios_nonincreasing(records: &[DensityRecord]) -> bool {
    let exact: Vec<&DensityRecord> = records.iter().filter(|r| r.is_exact).collect();
    exact.windows(2).all(|w| w[0].ratio >= w[1].ratio)
}

/// The closed-form bounds applicable to a daisy pattern at ground size n:
/// the averaging bound (s-1)/(r+1) when t = s-1, the degree count bound
/// binomial(n, r-1)(s-1)/r when t = 1, and for plain (4,2) daisies the
/// complete multipartite construction (count at this n, plus the limiting
/// ratio r!/r^r as information).
pub fn closed_form_bounds(pattern: &DaisyPattern, n: usize) -> Result<Vec<NamedBound>> {
    let (r, s, t) = (pattern.r(), pattern.s(), pattern.t());
    let mut bounds = Vec::new();
    if t == s - 1 {
        bounds.push(NamedBound {
            name: "upper_t_eq_s_minus_1".to_string(),
            kind: BoundKind::UpperRatio(Rat::new(s as u64 - 1, r as u64 + 1)),
        });
    }
    if t == 1 && n >= r {
        bounds.push(NamedBound {
            name: "upper_t_eq_1".to_string(),
            kind: BoundKind::UpperCount(Rat::new(binomial(n, r - 1) * (s as u64 - 1), r as u64)),
        });
    }
    if (s, t) == (4, 2) && n >= r {
        bounds.push(NamedBound {
            name: "lower_multipartite_count".to_string(),
            kind: BoundKind::LowerCount(multipartite_member_count(n, r)?),
        });
        if let Some(limit) = multipartite_limit_ratio(r) {
            bounds.push(NamedBound {
                name: "lower_multipartite".to_string(),
                kind: BoundKind::LowerRatioLimit(limit),
            });
        }
    }
    Ok(bounds)
}

/// r!/r^r when it fits in u64 arithmetic.
fn multipartite_limit_ratio(r: usize) -> Option<Rat> {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 1..=r as u64 {
        num = num.checked_mul(i)?;
        den = den.checked_mul(r as u64)?;
    }
    Some(Rat::new(num, den))
}

#[derive(Debug, Clone, Default)]
pub struct BoundCheck {
    pub records_checked: usize,
    pub comparisons: usize,
}

/// Check every exact row against its applicable bounds. Ratio and count
/// upper bounds must dominate the row; same-n construction counts must not
/// exceed it. A violation is a hard failure (exit code 3 in the CLI): it
/// indicates a solver or formula bug.
pub fn verify_bounds(records: &[DensityRecord]) -> Result<BoundCheck> {
    let mut check = BoundCheck::default();
    for record in records {
        if !record.is_exact {
            continue;
        }
        check.records_checked += 1;
        for bound in &record.bounds {
            match &bound.kind {
                BoundKind::UpperRatio(limit) => {
                    check.comparisons += 1;
                    if record.ratio > *limit {
                        return Err(Error::BoundViolation(format!(
                            "{} n={}: ratio {} exceeds {} = {}",
                            record.problem, record.n, record.ratio, bound.name, limit
                        )));
                    }
                }
                BoundKind::UpperCount(limit) => {
                    check.comparisons += 1;
                    if Rat::from_integer(record.value) > *limit {
                        return Err(Error::BoundViolation(format!(
                            "{} n={}: value {} exceeds {} = {}",
                            record.problem, record.n, record.value, bound.name, limit
                        )));
                    }
                }
                BoundKind::LowerCount(construction) => {
                    check.comparisons += 1;
                    if record.value < *construction {
                        return Err(Error::BoundViolation(format!(
                            "{} n={}: value {} below the feasible {} = {}",
                            record.problem, record.n, record.value, bound.name, construction
                        )));
                    }
                }
                BoundKind::LowerRatio(limit) => {
                    check.comparisons += 1;
                    if record.ratio < *limit {
                        return Err(Error::BoundViolation(format!(
                            "{} n={}: ratio {} below {} = {}",
                            record.problem, record.n, record.ratio, bound.name, limit
                        )));
                    }
                }
                BoundKind::LowerRatioLimit(_) => {}
            }
        }
    }
    Ok(check)
}

/// Six decimal places, round half to even, from the exact rational.
pub fn decimal6(ratio: Rat) -> String {
    let p = *ratio.numer() as u128;
    let q = *ratio.denom() as u128;
    let scaled = p * 1_000_000;
    let mut digits = scaled / q;
    let rem = scaled % q;
    match (2 * rem).cmp(&q) {
        std::cmp::Ordering::Greater => digits += 1,
        std::cmp::Ordering::Equal => {
            if digits % 2 == 1 {
                digits += 1;
            }
        }
        std::cmp::Ordering::Less => {}
    }
    format!("{}.{:06}", digits / 1_000_000, digits % 1_000_000)
}

fn ratio_string(ratio: &Rat) -> String {
    format!("{}/{}", ratio.numer(), ratio.denom())
}

fn parse_ratio(text: &str) -> Result<Rat> {
    let mut parts = text.splitn(2, '/');
    let p: u64 = parts
        .next()
        .unwrap_or_default()
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational {text:?}")))?;
    let q: u64 = match parts.next() {
        Some(q) => q
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad rational {text:?}")))?,
        None => 1,
    };
    if q == 0 {
        return Err(Error::invalid(format!("zero denominator in {text:?}")));
    }
    Ok(Rat::new(p, q))
}

#[derive(Serialize, Deserialize)]
struct BoundDto {
    name: String,
    kind: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct RecordDto {
    problem: String,
    n: usize,
    value: u64,
    is_exact: bool,
    ratio: String,
    decimal: String,
    bounds: Vec<BoundDto>,
}

fn to_dto(record: &DensityRecord) -> RecordDto {
    let bounds = record
        .bounds
        .iter()
        .map(|b| {
            let (kind, value) = match &b.kind {
                BoundKind::UpperRatio(v) => ("upper_ratio", ratio_string(v)),
                BoundKind::UpperCount(v) => ("upper_count", ratio_string(v)),
                BoundKind::LowerCount(v) => ("lower_count", v.to_string()),
                BoundKind::LowerRatio(v) => ("lower_ratio", ratio_string(v)),
                BoundKind::LowerRatioLimit(v) => ("lower_ratio_limit", ratio_string(v)),
            };
            BoundDto {
                name: b.name.clone(),
                kind: kind.to_string(),
                value,
            }
        })
        .collect();
    RecordDto {
        problem: record.problem.clone(),
        n: record.n,
        value: record.value,
        is_exact: record.is_exact,
        ratio: ratio_string(&record.ratio),
        decimal: decimal6(record.ratio),
        bounds,
    }
}

fn from_dto(dto: RecordDto) -> Result<DensityRecord> {
    let bounds = dto
        .bounds
        .into_iter()
        .map(|b| {
            let kind = match b.kind.as_str() {
                "upper_ratio" => BoundKind::UpperRatio(parse_ratio(&b.value)?),
                "upper_count" => BoundKind::UpperCount(parse_ratio(&b.value)?),
                "lower_count" => BoundKind::LowerCount(
                    b.value
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad count {:?}", b.value)))?,
                ),
                "lower_ratio" => BoundKind::LowerRatio(parse_ratio(&b.value)?),
                "lower_ratio_limit" => BoundKind::LowerRatioLimit(parse_ratio(&b.value)?),
                other => return Err(Error::invalid(format!("unknown bound kind {other:?}"))),
            };
            Ok(NamedBound { name: b.name, kind })
        })
        .collect::<Result<_>>()?;
    Ok(DensityRecord {
        problem: dto.problem,
        n: dto.n,
        value: dto.value,
        is_exact: dto.is_exact,
        ratio: parse_ratio(&dto.ratio)?,
        bounds,
    })
}

/// JSON export: an array of row objects with stable field order.
pub fn write_json<W: Write>(records: &[DensityRecord], mut out: W) -> Result<()> {
    let dtos: Vec<RecordDto> = records.iter().map(to_dto).collect();
    serde_json::to_writer_pretty(&mut out, &dtos)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<DensityRecord>> {
    let dtos: Vec<RecordDto> = serde_json::from_reader(input)?;
    dtos.into_iter().map(from_dto).collect()
}

/// CSV column order is fixed: problem,n,value,is_exact,ratio,decimal,bounds.
pub fn write_csv<W: Write>(records: &[DensityRecord], mut out: W) -> Result<()> {
    writeln!(out, "problem,n,value,is_exact,ratio,decimal,bounds")?;
    for record in records {
        let dto = to_dto(record);
        let bounds = dto
            .bounds
            .iter()
            .map(|b| format!("{}={}", b.name, b.value))
            .collect::<Vec<_>>()
            .join("|");
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            dto.problem, dto.n, dto.value, dto.is_exact, dto.ratio, dto.decimal, bounds
        )?;
    }
    Ok(())
}
