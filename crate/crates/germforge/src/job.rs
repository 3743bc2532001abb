//! Commands as data: a [`JobSpec`] runs to printed output and an exit code.

use std::fmt::Write;
use std::path::PathBuf;

use germforge_core::ideal::{codimension, CodimVerdict};
use germforge_core::prime::{associated_membership, prime_curve_lift};
use germforge_core::puiseux::{newton_puiseux, BranchSeries, Residual};
use germforge_core::ratio::{dangelo_ratio, witness_check};
use germforge_core::search::SearchParams;
use germforge_core::weierstrass::{weierstrass_prepare, WeierstrassPoly};

use crate::certificate::{self, Certificate, Status};
use crate::format;
use crate::parallel::parallel_search;
use crate::pipeline::{run_pipeline, working_form, PipelineParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Decompose,
    Ratio,
    Witness,
    Search,
    Codim,
    Puiseux,
    Lift,
    Pipeline,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub precision: Option<u32>,
    pub max_exponent: u32,
    pub max_coeff_degree: u32,
    pub maxnu: u32,
    pub bound: u32,
    pub unitary: Option<PathBuf>,
    pub exact_only: bool,
    pub emit_certificate: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command, inputs: Vec<PathBuf>) -> Self {
        JobSpec {
            command,
            inputs,
            precision: None,
            max_exponent: 3,
            max_coeff_degree: 2,
            maxnu: 2,
            bound: 12,
            unitary: None,
            exact_only: false,
            emit_certificate: None,
        }
    }
}

/// Printed report and process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("{path}:{source}")]
    Parse {
        path: String,
        source: crate::parse::ParseError,
    },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Stage(#[from] crate::pipeline::StageError),
    #[error("{0}")]
    Core(#[from] germforge_core::Error),
    #[error("{0}")]
    Usage(String),
}

fn read(path: &PathBuf) -> Result<String, JobError> {
    std::fs::read_to_string(path).map_err(|source| JobError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load<T>(path: &PathBuf, f: impl Fn(&str) -> crate::parse::ParseResult<T>) -> Result<T, JobError> {
    f(&read(path)?).map_err(|source| JobError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn inputs(job: &JobSpec, want: &[&str]) -> Result<(), JobError> {
    if job.inputs.len() < want.len() {
        return Err(JobError::Usage(format!(
            "{:?} needs inputs: {}",
            job.command,
            want.join(", ")
        )));
    }
    Ok(())
}

fn emit(job: &JobSpec, cert: &Certificate, out: &mut String) -> Result<(), JobError> {
    if let Some(path) = &job.emit_certificate {
        std::fs::write(path, certificate::print_certificate(cert)).map_err(|source| JobError::Io {
            path: path.display().to_string(),
            source,
        })?;
        writeln!(out, "certificate written to {}", path.display()).unwrap();
    }
    Ok(())
}

pub fn run(job: &JobSpec) -> Result<Outcome, JobError> {
    if job.precision == Some(0) {
        return Err(JobError::Usage("precision must be at least 1".into()));
    }
    let mut out = String::new();
    let code = match job.command {
        Command::Decompose => {
            inputs(job, &["hypersurface"])?;
            let h = load(&job.inputs[0], format::parse_hermitian)?;
            let n = job.precision.unwrap_or(h.form.precision());
            let r = working_form(&h, n)?;
            let d = germforge_core::decompose(&r, n)?;
            writeln!(out, "h = {}", format::series_terms(d.h())).unwrap();
            for ((j, f), (_, g)) in d.fs().iter().zip(d.gs()) {
                writeln!(out, "f{j} = {}", format::series_terms(f)).unwrap();
                writeln!(out, "g{j} = {}", format::series_terms(g)).unwrap();
            }
            out.push_str(&format::print_decomposition(&d));
            0
        }
        Command::Ratio => {
            inputs(job, &["hypersurface", "curve"])?;
            let h = load(&job.inputs[0], format::parse_hermitian)?;
            let z = load(&job.inputs[1], format::parse_curve)?;
            let n = job.precision.unwrap_or(z.precision());
            let r = working_form(&h, n)?;
            let ratio = dangelo_ratio(&r, &z)?;
            writeln!(out, "ratio {ratio}").unwrap();
            0
        }
        Command::Witness => {
            inputs(job, &["certificate, or hypersurface and curve"])?;
            let text = read(&job.inputs[0])?;
            if text.trim_start().starts_with(certificate::HEADER) {
                let cert = certificate::parse_certificate(&text).map_err(|source| JobError::Parse {
                    path: job.inputs[0].display().to_string(),
                    source,
                })?;
                let v = certificate::verify(&cert)?;
                for (name, ok) in &v.checks {
                    writeln!(out, "{} {name}", if *ok { "ok  " } else { "FAIL" }).unwrap();
                }
                if !v.passed() {
                    writeln!(out, "certificate rejected").unwrap();
                    1
                } else {
                    writeln!(out, "certificate verified: {}", status_text(cert.status)).unwrap();
                    cert.exit_code()
                }
            } else {
                inputs(job, &["hypersurface", "curve"])?;
                let h = load(&job.inputs[0], format::parse_hermitian)?;
                let z = load(&job.inputs[1], format::parse_curve)?;
                let n = job.precision.unwrap_or(z.precision());
                let r = working_form(&h, n)?;
                let w = witness_check(&r, &z, n)?;
                let cert = Certificate::from_witness("witness", h, z, &w);
                match &cert.violation {
                    None => writeln!(out, "certified to order {n}").unwrap(),
                    Some(v) => writeln!(
                        out,
                        "violation at order {}: coefficient {} of t^{} tbar^{}",
                        v.order,
                        format::coefficient(&v.coefficient),
                        v.exponents.0,
                        v.exponents.1
                    )
                    .unwrap(),
                }
                emit(job, &cert, &mut out)?;
                cert.exit_code()
            }
        }
        Command::Search => {
            inputs(job, &["hypersurface"])?;
            let h = load(&job.inputs[0], format::parse_hermitian)?;
            let params = search_params(job, job.precision);
            let r = working_form(&h, params.precision)?;
            let hits = parallel_search(&r, &params)?;
            for hit in hits.iter().take(10) {
                writeln!(out, "{:?} ratio {}", hit.exponents, hit.ratio).unwrap();
            }
            if let Some(best) = hits.first() {
                writeln!(out, "best ratio {} (a lower bound for the type)", best.ratio).unwrap();
                out.push_str(&format::print_curve(&best.curve));
            }
            0
        }
        Command::Codim => {
            inputs(job, &["ideal"])?;
            let ideal = load(&job.inputs[0], format::parse_ideal)?;
            let bound = job.bound.min(ideal.precision());
            let rep = codimension(&ideal, bound)?;
            let dims: Vec<String> = rep.dims.iter().map(usize::to_string).collect();
            writeln!(out, "dims {}", dims.join(" ")).unwrap();
            match &rep.verdict {
                CodimVerdict::Finite {
                    value,
                    level,
                    certificates,
                } => {
                    writeln!(out, "codimension {value} (stable from level {level})").unwrap();
                    for c in certificates {
                        let ok = c.verify(&ideal)?;
                        writeln!(
                            out,
                            "z{}^{} in I + M^{}: {}",
                            c.variable + 1,
                            c.exponent,
                            c.level + 1,
                            if ok { "verified" } else { "FAILED" }
                        )
                        .unwrap();
                    }
                }
                CodimVerdict::Unresolved { lower_bound } => {
                    writeln!(out, "unresolved at bound {bound}: codimension >= {lower_bound}").unwrap();
                }
            }
            0
        }
        Command::Puiseux => {
            inputs(job, &["ideal (first generator, two variables)"])?;
            let ideal = load(&job.inputs[0], format::parse_ideal)?;
            let f = ideal
                .generators()
                .first()
                .ok_or_else(|| JobError::Usage("the ideal file has no generator".into()))?;
            if f.nvars() != 2 {
                return Err(JobError::Usage("puiseux needs a series in z1 (base) and z2".into()));
            }
            let n = job.precision.unwrap_or(ideal.precision());
            let p = match WeierstrassPoly::from_series(f) {
                Ok(p) => p,
                Err(_) => weierstrass_prepare(f, n)?.1,
            };
            let branches = newton_puiseux(&p, n, job.exact_only)?;
            let total: u32 = branches.iter().map(|b| b.ramification * b.multiplicity).sum();
            writeln!(out, "degree {} ; branches account for {total}", p.degree()).unwrap();
            for b in &branches {
                let residual = match &b.residual {
                    Residual::Exact(o) => format!("residual order {}", crate::pipeline::order_text(*o)),
                    Residual::Floating(m) => format!("residual {m:e} (tolerance {:e})", germforge_core::puiseux::FLOAT_TOLERANCE),
                };
                writeln!(out, "branch d={} mult={} {residual}", b.ramification, b.multiplicity).unwrap();
                match &b.series {
                    BranchSeries::Exact(w) => {
                        let c = germforge_core::FormalCurve::new(vec![w.clone()], w.precision().min(n))?;
                        let text = format::print_curve(&c);
                        writeln!(out, "  w(tau) = {}", text.lines().nth(1).unwrap_or("").trim_start_matches("z1 = ")).unwrap();
                    }
                    BranchSeries::Floating { series, tolerance } => {
                        let terms: Vec<String> = series
                            .coeffs()
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| c.norm() > *tolerance)
                            .map(|(e, c)| format!("({:.12}{:+.12}i) tau^{e}", c.re, c.im))
                            .collect();
                        writeln!(out, "  w(tau) ~ {}  [floating, tolerance {tolerance:e}]", terms.join(" + ")).unwrap();
                    }
                }
            }
            0
        }
        Command::Lift => {
            inputs(job, &["ideal with normal_form", "base curve"])?;
            let ideal = load(&job.inputs[0], format::parse_ideal)?;
            let base = load(&job.inputs[1], format::parse_curve)?;
            let nf = ideal
                .normal_form()
                .ok_or_else(|| JobError::Usage("the ideal file has no normal_form block".into()))?;
            let n = job.precision.unwrap_or(base.precision());
            let lifted_nf = nf.as_polynomial_to(n.max(ideal.precision()));
            let lift = prime_curve_lift(&lifted_nf, ideal.nvars(), &base, n)?;
            writeln!(out, "ord D along the base curve: {}", lift.denominator_order).unwrap();
            let orders: Vec<String> = lift.generator_orders.iter().map(|o| crate::pipeline::order_text(*o)).collect();
            writeln!(out, "generator orders: {}", orders.join(", ")).unwrap();
            writeln!(out, "all generators vanish to order {}", lift.certified_order()).unwrap();
            out.push_str(&format::print_curve(&lift.curve));
            let level = ideal.precision().min(job.bound);
            for (i, g) in ideal.generators().iter().enumerate() {
                match associated_membership(g, nf, job.maxnu, level) {
                    Ok(Some((nu, _))) => writeln!(out, "gen {}: D^{nu} g in the associated ideal", i + 1).unwrap(),
                    Ok(None) => writeln!(out, "gen {}: not found up to D^{}", i + 1, job.maxnu).unwrap(),
                    Err(e) => writeln!(out, "gen {}: {e}", i + 1).unwrap(),
                }
            }
            0
        }
        Command::Pipeline => {
            inputs(job, &["hypersurface"])?;
            let h = load(&job.inputs[0], format::parse_hermitian)?;
            let nf = match job.inputs.get(1) {
                Some(p) => Some(load(p, format::parse_ideal)?),
                None => None,
            };
            let u = match &job.unitary {
                Some(p) => Some(load(p, format::parse_unitary)?),
                None => None,
            };
            let params = PipelineParams {
                precision: job.precision.unwrap_or(50),
                search: search_params(job, None),
                codim_bound: job.bound,
                exact_only: job.exact_only,
            };
            let rep = run_pipeline(&h, u.as_deref(), nf.as_ref(), &params)?;
            let cert = Certificate::from_report(&rep);
            for n in &rep.notes {
                writeln!(out, "# {n}").unwrap();
            }
            if rep.certified() {
                writeln!(out, "certified: the curve below annihilates r to order {}", rep.precision).unwrap();
            } else {
                writeln!(out, "no witness found at these bounds").unwrap();
                if let Some((e, r)) = &rep.best {
                    writeln!(out, "best ratio {r} from exponents {e:?} (a lower bound for the type)").unwrap();
                }
            }
            out.push_str(&certificate::print_certificate(&cert));
            emit(job, &cert, &mut out)?;
            rep.exit_code()
        }
    };
    Ok(Outcome { code, output: out })
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Certified => "witness certified",
        Status::Violation => "violation confirmed",
        Status::NoWitness => "no witness claimed",
    }
}

/// `precision` overrides the default search precision when given.
fn search_params(job: &JobSpec, precision: Option<u32>) -> SearchParams {
    let d = SearchParams::default();
    SearchParams {
        max_exponent: job.max_exponent,
        max_coeff_degree: job.max_coeff_degree,
        precision: precision.unwrap_or(d.precision),
        max_steps: d.max_steps,
    }
}
