//! One function per subcommand. Each returns a JSON-serializable report and
//! the exit status derived from the analysis outcome.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lipeq::coding::{bilip_constants, sample_bilip_check, BilipCertificate, CodingError, DistortionReport};
use lipeq::dimension::{
    box_count_dim, count_matrix, hausdorff_dim, DimensionError, DEFAULT_ENUM_CAP, DEFAULT_TOL,
};
use lipeq::gds::{
    assemble_custom_graph, build_partition_graph, decide_equivalence, decide_systems, signature,
    DecideError, Decision, VerifiedSystem, DEFAULT_DEPTH,
};
use lipeq::ifs::{normalize_right_free, validate_class, ClassViolation};
use lipeq::ExactBox;
use serde::Serialize;
use serde_json::Value;

use crate::render;
use crate::report::{
    BoxReport, CertificateReport, Exact, GraphReport, IfsSummary, VerificationSummary,
    ViolationReport,
};
use crate::spec::{self, Spec};

/// Environment variable holding the default box-count enumeration cap.
pub const CAP_ENV: &str = "LIPEQ_ENUM_CAP";
pub const DEFAULT_PAIRS: usize = 500;
pub const DEFAULT_SAMPLE_DEPTH: usize = 5;
pub const DEFAULT_BOX_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// Parse, usage, I/O or resource-limit errors.
    Failure = 1,
    OutsideClass = 2,
    Inconclusive = 3,
    VerificationFailed = 4,
}

pub struct Outcome {
    pub report: Value,
    pub status: Status,
}

impl Outcome {
    fn new(report: impl Serialize, status: Status) -> Result<Self> {
        Ok(Outcome {
            report: serde_json::to_value(report)?,
            status,
        })
    }
}

/// A verified system, or the reason none could be built.
enum Built {
    System {
        system: VerifiedSystem,
        reflected: bool,
    },
    Outside(ClassViolation),
}

fn build(spec: &Spec, depth: usize) -> Result<Built> {
    if let Some((pieces, edges)) = &spec.custom {
        let gds = assemble_custom_graph(&spec.ifs, pieces.len(), edges)?;
        let system = VerifiedSystem::verify(gds, pieces.clone(), depth)?;
        return Ok(Built::System { system, reflected: false });
    }
    let normalized = match normalize_right_free(&spec.ifs) {
        Ok(n) => n,
        Err(v) => return Ok(Built::Outside(v)),
    };
    let (gds, pieces) = build_partition_graph(&normalized.ifs, &normalized.cert)?;
    Ok(Built::System {
        system: VerifiedSystem::verify(gds, pieces, depth)?,
        reflected: normalized.reflected,
    })
}

fn verification_status(system: &VerifiedSystem) -> Status {
    let r = &system.report;
    if !r.equations_hold() || !r.partition.disjoint || !r.partition.covers_attractor {
        Status::VerificationFailed
    } else if !r.separation.is_certified() {
        Status::Inconclusive
    } else {
        Status::Ok
    }
}

#[derive(Serialize)]
struct ValidateReport {
    command: &'static str,
    name: String,
    ifs: IfsSummary,
    images: Vec<BoxReport>,
    in_class: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<ViolationReport>,
}

pub fn validate(path: &Path) -> Result<Outcome> {
    let spec = spec::load(path)?;
    let images = spec.ifs.maps().iter().map(|f| (&ExactBox::image_of_unit(f)).into()).collect();
    let (certificate, violation, status) = match validate_class(&spec.ifs) {
        Ok(cert) => (Some(CertificateReport::new(&cert, spec.ifs.lambda())), None, Status::Ok),
        Err(v) => (None, Some((&v).into()), Status::OutsideClass),
    };
    Outcome::new(
        ValidateReport {
            command: "validate",
            name: spec.name,
            ifs: (&spec.ifs).into(),
            images,
            in_class: violation.is_none(),
            certificate,
            violation,
        },
        status,
    )
}

#[derive(Serialize)]
struct GammaReport {
    command: &'static str,
    name: String,
    in_class: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_vector: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_counts: Option<Vec<usize>>,
    /// Entry `j-1` is the relabelled index `h(j)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    relabeling: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<ViolationReport>,
}

pub fn gamma(path: &Path) -> Result<Outcome> {
    let spec = spec::load(path)?;
    let mut report = GammaReport {
        command: "gamma",
        name: spec.name,
        in_class: false,
        k_vector: None,
        gamma: None,
        gamma_counts: None,
        relabeling: None,
        violation: None,
    };
    match validate_class(&spec.ifs) {
        Ok(cert) => {
            let summary = CertificateReport::new(&cert, spec.ifs.lambda());
            report.in_class = true;
            report.relabeling = Some(cert.relabeling());
            report.k_vector = Some(summary.k_vector);
            report.gamma = Some(summary.gamma);
            report.gamma_counts = Some(summary.gamma_counts);
            Outcome::new(report, Status::Ok)
        }
        Err(v) => {
            report.violation = Some((&v).into());
            Outcome::new(report, Status::OutsideClass)
        }
    }
}

#[derive(Serialize)]
struct GraphCommandReport {
    command: &'static str,
    name: String,
    construction: &'static str,
    reflected: bool,
    graph: GraphReport,
    signature: SignatureReport,
    verification: VerificationSummary,
}

#[derive(Serialize)]
struct SignatureReport {
    vertex_count: usize,
    canonical_counts: Vec<u32>,
}

#[derive(Serialize)]
struct OutsideReport {
    command: &'static str,
    name: String,
    in_class: bool,
    violation: ViolationReport,
}

fn outside(command: &'static str, name: String, v: &ClassViolation) -> Result<Outcome> {
    Outcome::new(
        OutsideReport { command, name, in_class: false, violation: v.into() },
        Status::OutsideClass,
    )
}

pub fn graph(path: &Path, depth: Option<usize>) -> Result<Outcome> {
    let spec = spec::load(path)?;
    let depth = depth.or(spec.analysis.depth).unwrap_or(DEFAULT_DEPTH);
    let (system, reflected) = match build(&spec, depth)? {
        Built::Outside(v) => return outside("graph", spec.name, &v),
        Built::System { system, reflected, .. } => (system, reflected),
    };
    let sig = signature(&system.gds);
    let status = verification_status(&system);
    Outcome::new(
        GraphCommandReport {
            command: "graph",
            name: spec.name,
            construction: if spec.custom.is_some() { "custom" } else { "class" },
            reflected,
            graph: GraphReport::new(&system.gds, &system.pieces),
            signature: SignatureReport {
                vertex_count: sig.vertex_count,
                canonical_counts: sig.counts,
            },
            verification: (&system.report).into(),
        },
        status,
    )
}

pub struct EquivOptions {
    pub depth: Option<usize>,
    pub pairs: Option<usize>,
    pub seed: Option<u64>,
    pub sample_depth: Option<usize>,
}

#[derive(Serialize)]
struct CertificateSummary {
    c_star_sq: Exact,
    c_star: Exact,
    c_upper: Exact,
    c: Exact,
}

impl From<&BilipCertificate> for CertificateSummary {
    fn from(c: &BilipCertificate) -> Self {
        CertificateSummary {
            c_star_sq: (&c.c_star_sq).into(),
            c_star: (&c.c_star).into(),
            c_upper: (&c.c_upper).into(),
            c: (&c.c).into(),
        }
    }
}

#[derive(Serialize)]
struct DistortionSummary {
    pairs: usize,
    depth: usize,
    seed: u64,
    violations: usize,
    max_ratio: f64,
    slack: Exact,
    round_trip_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

impl DistortionSummary {
    fn from_report(r: &DistortionReport) -> Self {
        DistortionSummary {
            pairs: r.pairs,
            depth: r.depth,
            seed: r.seed,
            violations: 0,
            max_ratio: r.max_ratio,
            slack: (&r.slack).into(),
            round_trip_failures: r.round_trip_failures,
            failure: None,
        }
    }
}

#[derive(Serialize, Default)]
struct EquivReport {
    command: &'static str,
    a: String,
    b: String,
    decision: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outside_class: Option<OutsideSide>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reflected: Option<[bool; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matching: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    signature: Option<SignatureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distortion: Option<DistortionSummary>,
}

#[derive(Serialize)]
struct OutsideSide {
    which: &'static str,
    violation: ViolationReport,
}

fn which_name(w: lipeq::gds::Which) -> &'static str {
    match w {
        lipeq::gds::Which::A => "a",
        lipeq::gds::Which::B => "b",
    }
}

pub fn equiv(path_a: &Path, path_b: &Path, opts: &EquivOptions) -> Result<Outcome> {
    let (a, b) = (spec::load(path_a)?, spec::load(path_b)?);
    let depth = opts.depth.or(a.analysis.depth.max(b.analysis.depth)).unwrap_or(DEFAULT_DEPTH);
    let mut report = EquivReport {
        command: "equiv",
        a: a.name.clone(),
        b: b.name.clone(),
        ..Default::default()
    };

    let decision = if a.custom.is_none() && b.custom.is_none() {
        match decide_equivalence(&a.ifs, &b.ifs, depth) {
            Ok(d) => d,
            Err(DecideError::Class { which, violation }) => {
                report.decision = "outside-class";
                report.outside_class = Some(OutsideSide {
                    which: which_name(which),
                    violation: (&violation).into(),
                });
                return Outcome::new(report, Status::OutsideClass);
            }
            Err(DecideError::Gds(e)) => return Err(e.into()),
        }
    } else {
        let mut systems = Vec::with_capacity(2);
        for (which, spec) in [("a", &a), ("b", &b)] {
            match build(spec, depth)? {
                Built::Outside(v) => {
                    report.decision = "outside-class";
                    report.outside_class = Some(OutsideSide { which, violation: (&v).into() });
                    return Outcome::new(report, Status::OutsideClass);
                }
                Built::System { system, .. } => {
                    if verification_status(&system) == Status::VerificationFailed {
                        report.decision = "verification-failed";
                        report.reason = Some(format!("system {which} fails its partition equations"));
                        return Outcome::new(report, Status::VerificationFailed);
                    }
                    systems.push(system);
                }
            }
        }
        let sb = systems.pop().expect("two systems");
        let sa = systems.pop().expect("two systems");
        decide_systems(sa, sb)?
    };

    let eq = match decision {
        Decision::Inconclusive(why) => {
            report.decision = "inconclusive";
            report.reason = Some(why.to_string());
            return Outcome::new(report, Status::Inconclusive);
        }
        Decision::Equivalent(eq) => eq,
    };
    report.decision = "equivalent";
    report.reflected = eq.reflected.map(|(x, y)| [x, y]);
    report.matching = Some(eq.matching.clone());
    let sig = signature(&eq.a.gds);
    report.signature = Some(SignatureReport {
        vertex_count: sig.vertex_count,
        canonical_counts: sig.counts,
    });
    let cert = bilip_constants(&eq.a, &eq.b)?;
    report.certificate = Some((&cert).into());

    let pairs = opts.pairs.or(a.analysis.pairs).unwrap_or(DEFAULT_PAIRS);
    let seed = opts.seed.or(a.analysis.seed).unwrap_or(0);
    let sample_depth = opts.sample_depth.unwrap_or(DEFAULT_SAMPLE_DEPTH);
    let status = match sample_bilip_check(&eq.a.gds, &eq.b.gds, &eq.matching, &cert, pairs, sample_depth, seed) {
        Ok(r) => {
            let summary = DistortionSummary::from_report(&r);
            let status = if r.round_trip_failures == 0 { Status::Ok } else { Status::VerificationFailed };
            report.distortion = Some(summary);
            status
        }
        Err(e @ CodingError::DistortionViolation { .. }) => {
            report.distortion = Some(DistortionSummary {
                pairs,
                depth: sample_depth,
                seed,
                violations: 1,
                max_ratio: f64::NAN,
                slack: (&lipeq::algebra::int(0)).into(),
                round_trip_failures: 0,
                failure: Some(e.to_string()),
            });
            Status::VerificationFailed
        }
        Err(e) => return Err(e.into()),
    };
    Outcome::new(report, status)
}

pub struct DimOptions {
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub cap: Option<u64>,
}

#[derive(Serialize)]
struct SpectralReport {
    rho: f64,
    rho_lower: f64,
    rho_upper: f64,
    iterations: usize,
    dimension: f64,
    dimension_residual: f64,
    count_matrix: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct LevelCount {
    k: usize,
    n: u64,
}

#[derive(Serialize)]
struct BoxCountReport {
    depth: usize,
    cap: u64,
    counts: Vec<LevelCount>,
    slope: f64,
}

#[derive(Serialize)]
struct DimReport {
    command: &'static str,
    name: String,
    tol: f64,
    separation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectral: Option<SpectralReport>,
    box_count: BoxCountReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrepancy: Option<f64>,
}

/// Flag, then spec file, then environment, then the built-in default.
pub fn resolve_cap(flag: Option<u64>, spec: Option<u64>) -> Result<u64> {
    if let Some(c) = flag.or(spec) {
        return Ok(c);
    }
    match env::var(CAP_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .with_context(|| format!("{CAP_ENV}={text:?} is not a word count")),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

pub fn dim(path: &Path, opts: &DimOptions) -> Result<Outcome> {
    let spec = spec::load(path)?;
    let tol = opts.tol.or(spec.analysis.tol).unwrap_or(DEFAULT_TOL);
    let cap = resolve_cap(opts.cap, spec.analysis.cap)?;
    let box_depth = opts.depth.unwrap_or(DEFAULT_BOX_DEPTH);
    let verify_depth = spec.analysis.depth.unwrap_or(DEFAULT_DEPTH);

    let system = match build(&spec, verify_depth)? {
        Built::Outside(v) => return outside("dim", spec.name, &v),
        Built::System { system, .. } => system,
    };
    let status = verification_status(&system);
    if status == Status::VerificationFailed {
        let summary: VerificationSummary = (&system.report).into();
        return Outcome::new(
            serde_json::json!({ "command": "dim", "name": spec.name, "verification": summary }),
            status,
        );
    }
    let spectral = match hausdorff_dim(&system, tol) {
        Ok(d) => Some(SpectralReport {
            rho: d.spectral.rho,
            rho_lower: d.spectral.lower,
            rho_upper: d.spectral.upper,
            iterations: d.spectral.iterations,
            dimension: d.dimension,
            dimension_residual: d.residual,
            count_matrix: count_matrix(&system.gds).rows().to_vec(),
        }),
        Err(DimensionError::NotCertified) => None,
        Err(e) => return Err(e.into()),
    };
    let counted = box_count_dim(&spec.ifs, box_depth, cap)?;
    let discrepancy = spectral.as_ref().map(|s| (counted.slope - s.dimension).abs());
    Outcome::new(
        DimReport {
            command: "dim",
            name: spec.name,
            tol,
            separation: if spectral.is_some() { "certified" } else { "unknown-at-depth" },
            spectral,
            box_count: BoxCountReport {
                depth: box_depth,
                cap,
                counts: counted
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| LevelCount { k: i + 1, n })
                    .collect(),
                slope: counted.slope,
            },
            discrepancy,
        },
        status,
    )
}

#[derive(Serialize)]
struct RenderReport {
    command: &'static str,
    output: PathBuf,
    bytes: usize,
    panels: Vec<render::PanelReport>,
}

pub fn render(paths: &[PathBuf], out: &Path) -> Result<Outcome> {
    let mut panels = Vec::with_capacity(paths.len());
    for p in paths {
        let spec = spec::load(p)?;
        panels.push((spec.name, spec.ifs));
    }
    let (svg, reports) = render::render(&panels);
    fs::write(out, &svg).with_context(|| format!("writing {}", out.display()))?;
    Outcome::new(
        RenderReport {
            command: "render",
            output: out.to_path_buf(),
            bytes: svg.len(),
            panels: reports,
        },
        Status::Ok,
    )
}
