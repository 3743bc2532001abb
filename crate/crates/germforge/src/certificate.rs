//! Self-contained certificates: the inputs, the claim and the evidence in one
//! line-oriented document that the `witness` command re-checks on its own.
//!
//! ```text
//! germforge-certificate v1
//! command pipeline
//! status certified
//! order 50
//! begin hypersurface
//! vars 3; N=6;
//! ...
//! end hypersurface
//! begin curve
//! ...
//! end curve
//! ```

use std::fmt::Write;

use germforge_core::ideal::IdealPresentation;
use germforge_core::ratio::{witness_check, TypeRatio, WitnessOutcome};
use germforge_core::unitary::UnitaryBlock;
use germforge_core::{decompose, Decomposition, FormalCurve, GaussRat, VanishingOrder};

use crate::format::{self, Hypersurface};
use crate::parse::{ParseError, ParseResult, Pos};
use crate::pipeline::{working_form, PipelineReport};

pub const HEADER: &str = "germforge-certificate v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The curve annihilates `r` to `order`.
    Certified,
    /// The curve fails at the recorded violation.
    Violation,
    /// No witness at these bounds; not a claim of finite type.
    NoWitness,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Violation => "violation",
            Status::NoWitness => "no-witness",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "certified" => Some(Status::Certified),
            "violation" => Some(Status::Violation),
            "no-witness" => Some(Status::NoWitness),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub order: u32,
    pub exponents: (u32, u32),
    pub coefficient: GaussRat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub command: String,
    pub status: Status,
    pub order: u32,
    pub hypersurface: Hypersurface,
    pub curve: Option<FormalCurve>,
    pub violation: Option<Violation>,
    /// Best ratio found, with its exponent tuple when it came from the search.
    pub ratio: Option<TypeRatio>,
    pub exponents: Option<Vec<u32>>,
    pub decomposition: Option<Decomposition>,
    pub ideal: Option<IdealPresentation>,
    pub unitary: Option<Vec<Vec<GaussRat>>>,
    pub jets: Option<(Vec<Vec<GaussRat>>, Vec<Vec<GaussRat>>)>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(command: &str, status: Status, order: u32, hypersurface: Hypersurface) -> Self {
        Certificate {
            command: command.to_string(),
            status,
            order,
            hypersurface,
            curve: None,
            violation: None,
            ratio: None,
            exponents: None,
            decomposition: None,
            ideal: None,
            unitary: None,
            jets: None,
            notes: Vec::new(),
        }
    }

    pub fn from_witness(command: &str, h: Hypersurface, curve: FormalCurve, w: &WitnessOutcome) -> Self {
        let mut c = match w {
            WitnessOutcome::Certified { order } => Certificate::new(command, Status::Certified, *order, h),
            WitnessOutcome::Violation {
                order,
                exponents,
                coefficient,
            } => {
                let mut c = Certificate::new(command, Status::Violation, *order, h);
                c.violation = Some(Violation {
                    order: *order,
                    exponents: *exponents,
                    coefficient: coefficient.clone(),
                });
                c
            }
        };
        c.curve = Some(curve);
        c
    }

    pub fn from_report(rep: &PipelineReport) -> Self {
        let status = if rep.certified() {
            Status::Certified
        } else {
            Status::NoWitness
        };
        let mut c = Certificate::new("pipeline", status, rep.precision, rep.hypersurface.clone());
        if rep.certified() {
            c.curve = rep.curve.clone();
            c.ideal = rep.ideal.clone();
            c.unitary = rep.unitary.clone();
            c.jets = rep.jets.clone();
        }
        c.decomposition = Some(rep.decomposition.clone());
        if let Some((e, r)) = &rep.best {
            c.ratio = Some(*r);
            c.exponents = Some(e.clone());
        }
        c.notes = rep.notes.clone();
        c
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Certified => 0,
            _ => 2,
        }
    }
}

fn section(out: &mut String, name: &str, body: &str) {
    writeln!(out, "begin {name}").unwrap();
    out.push_str(body);
    if !body.ends_with('\n') {
        out.push('\n');
    }
    writeln!(out, "end {name}").unwrap();
}

fn ratio_text(r: &TypeRatio) -> String {
    let num = match r.numerator {
        VanishingOrder::Exact(v) => v.to_string(),
        VanishingOrder::AtLeast(v) => format!(">={v}"),
    };
    format!("{num} / {}", r.denominator)
}

pub fn print_certificate(c: &Certificate) -> String {
    let mut out = format!("{HEADER}\n");
    writeln!(out, "command {}", c.command).unwrap();
    writeln!(out, "status {}", c.status.as_str()).unwrap();
    writeln!(out, "order {}", c.order).unwrap();
    if let Some(v) = &c.violation {
        writeln!(
            out,
            "violation {} {} {} {}",
            v.order,
            v.exponents.0,
            v.exponents.1,
            format::coefficient(&v.coefficient)
        )
        .unwrap();
    }
    if let Some(r) = &c.ratio {
        writeln!(out, "ratio {}", ratio_text(r)).unwrap();
    }
    if let Some(e) = &c.exponents {
        let s: Vec<String> = e.iter().map(u32::to_string).collect();
        writeln!(out, "exponents {}", s.join(" ")).unwrap();
    }
    for n in &c.notes {
        writeln!(out, "note {}", n.replace('\n', " ")).unwrap();
    }
    section(&mut out, "hypersurface", &format::print_hermitian(&c.hypersurface));
    if let Some(d) = &c.decomposition {
        section(&mut out, "decomposition", &format::print_decomposition(d));
    }
    if let Some(u) = &c.unitary {
        section(&mut out, "unitary", &format::print_unitary(u));
    }
    if let Some((f, g)) = &c.jets {
        section(&mut out, "jets", &format::print_jets(f, g));
    }
    if let Some(i) = &c.ideal {
        section(&mut out, "ideal", &format::print_ideal(i));
    }
    if let Some(z) = &c.curve {
        section(&mut out, "curve", &format::print_curve(z));
    }
    out
}

fn shifted(e: ParseError, line: usize) -> ParseError {
    ParseError::new(
        Pos {
            line: e.pos.line + line,
            column: e.pos.column,
        },
        e.message,
    )
}

fn bad<T>(line: usize, msg: impl Into<String>) -> ParseResult<T> {
    Err(ParseError::new(Pos { line, column: 1 }, msg))
}

fn parse_u32(s: &str, line: usize) -> ParseResult<u32> {
    s.trim().parse().or_else(|_| bad(line, format!("expected an integer, found '{s}'")))
}

fn parse_ratio(s: &str, line: usize) -> ParseResult<TypeRatio> {
    let Some((num, den)) = s.split_once('/') else {
        return bad(line, "ratio needs 'numerator / denominator'");
    };
    let num = num.trim();
    let numerator = match num.strip_prefix(">=") {
        Some(v) => VanishingOrder::AtLeast(parse_u32(v, line)?),
        None => VanishingOrder::Exact(parse_u32(num, line)?),
    };
    TypeRatio::new(numerator, parse_u32(den, line)?).or_else(|e| bad(line, e.to_string()))
}

pub fn parse_certificate(text: &str) -> ParseResult<Certificate> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.first().map(|l| l.trim()) != Some(HEADER) {
        return bad(1, format!("expected header '{HEADER}'"));
    }
    let mut command = None;
    let mut status = None;
    let mut order = None;
    let mut violation = None;
    let mut ratio = None;
    let mut exponents = None;
    let mut notes = Vec::new();
    let mut sections: Vec<(String, usize, String)> = Vec::new();
    let mut i = 1;
    while i < lines.len() {
        let lineno = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "command" => command = Some(rest.to_string()),
            "status" => {
                status = Some(Status::parse(rest).ok_or_else(|| {
                    ParseError::new(Pos { line: lineno, column: 8 }, format!("unknown status '{rest}'"))
                })?)
            }
            "order" => order = Some(parse_u32(rest, lineno)?),
            "violation" => {
                let parts: Vec<&str> = rest.splitn(4, ' ').collect();
                if parts.len() != 4 {
                    return bad(lineno, "violation needs order, two exponents and a coefficient");
                }
                violation = Some(Violation {
                    order: parse_u32(parts[0], lineno)?,
                    exponents: (parse_u32(parts[1], lineno)?, parse_u32(parts[2], lineno)?),
                    coefficient: format::parse_coefficient(parts[3]).map_err(|e| shifted(e, lineno - 1))?,
                });
            }
            "ratio" => ratio = Some(parse_ratio(rest, lineno)?),
            "exponents" => {
                exponents = Some(
                    rest.split_whitespace()
                        .map(|s| parse_u32(s, lineno))
                        .collect::<ParseResult<Vec<_>>>()?,
                )
            }
            "note" => notes.push(rest.to_string()),
            "begin" => {
                let name = rest.to_string();
                let start = i;
                let close = format!("end {name}");
                while i < lines.len() && lines[i].trim() != close {
                    i += 1;
                }
                if i == lines.len() {
                    return bad(lineno, format!("section '{name}' is not closed"));
                }
                sections.push((name, start, lines[start..i].join("\n")));
                i += 1;
            }
            _ => return bad(lineno, format!("unknown field '{key}'")),
        }
    }
    let mut cert = Certificate::new(
        &command.ok_or_else(|| ParseError::new(Pos { line: 1, column: 1 }, "missing 'command'"))?,
        status.ok_or_else(|| ParseError::new(Pos { line: 1, column: 1 }, "missing 'status'"))?,
        order.ok_or_else(|| ParseError::new(Pos { line: 1, column: 1 }, "missing 'order'"))?,
        Hypersurface::new(germforge_core::HermitianForm::zero(1, 1)),
    );
    cert.violation = violation;
    cert.ratio = ratio;
    cert.exponents = exponents;
    cert.notes = notes;
    let mut have_hypersurface = false;
    for (name, start, body) in sections {
        let sh = |e: ParseError| shifted(e, start);
        match name.as_str() {
            "hypersurface" => {
                cert.hypersurface = format::parse_hermitian(&body).map_err(sh)?;
                have_hypersurface = true;
            }
            "decomposition" => cert.decomposition = Some(format::parse_decomposition(&body).map_err(sh)?),
            "unitary" => cert.unitary = Some(format::parse_unitary(&body).map_err(sh)?),
            "jets" => cert.jets = Some(format::parse_jets(&body).map_err(sh)?),
            "ideal" => cert.ideal = Some(format::parse_ideal(&body).map_err(sh)?),
            "curve" => cert.curve = Some(format::parse_curve(&body).map_err(sh)?),
            other => return bad(start, format!("unknown section '{other}'")),
        }
    }
    if !have_hypersurface {
        return bad(1, "certificate has no hypersurface section");
    }
    Ok(cert)
}

/// Outcome of re-checking a certificate from its embedded inputs alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub checks: Vec<(String, bool)>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

pub fn verify(c: &Certificate) -> germforge_core::Result<Verification> {
    let mut checks = Vec::new();
    let r = working_form(&c.hypersurface, c.order)?;
    if let Some(curve) = &c.curve {
        let w = witness_check(&r, curve, c.order)?;
        let ok = match (c.status, &w, &c.violation) {
            (Status::Certified, WitnessOutcome::Certified { .. }, _) => true,
            (
                Status::Violation,
                WitnessOutcome::Violation {
                    order,
                    exponents,
                    coefficient,
                },
                Some(v),
            ) => v.order == *order && v.exponents == *exponents && v.coefficient == *coefficient,
            _ => false,
        };
        checks.push((format!("pullback to order {}", c.order), ok));
    } else {
        checks.push(("status without a curve".into(), c.status == Status::NoWitness));
    }
    if let Some(d) = &c.decomposition {
        checks.push(("decomposition".into(), decompose(&r, d.precision())? == *d));
    }
    if let Some(rows) = &c.unitary {
        let u = UnitaryBlock::from_exact(rows.clone());
        checks.push(("unitary block".into(), u.is_ok()));
        if let (Ok(u), Some((f, g))) = (&u, &c.jets) {
            let ok = f
                .iter()
                .zip(g)
                .all(|(fm, gm)| u.apply_exact(gm).as_deref() == Some(fm.as_slice()));
            checks.push(("U G_m = F_m".into(), ok));
        }
    }
    Ok(Verification { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_required() {
        let e = parse_certificate("certificate\n").unwrap_err();
        assert_eq!(e.pos.line, 1);
    }

    #[test]
    fn section_errors_point_into_document() {
        let text = format!("{HEADER}\ncommand witness\nstatus certified\norder 4\nbegin hypersurface\nvars 1; N=4;\n+ 1 z1 zbar2\nend hypersurface\n");
        let e = parse_certificate(&text).unwrap_err();
        assert_eq!(e.pos.line, 7);
    }
}
