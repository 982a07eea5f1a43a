//! Command-line surface: domain files in, certificates and reports out.

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{fmt_rat, parse_poly, BiPoly};
use crate::generic::default_seed;
use crate::invariants::{dangelo_type, multiplicity, Candidates, Exactness, Method};
use crate::kohn::{classic_kohn, run, Certificate, ClassicState, RunConfig, SpecialDomain, DEFAULT_TRUNCATION};
use crate::puiseux::{branches, default_precision};

/// Input format for `kohn run`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub premultipliers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_hint: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_degree: Option<u32>,
}

impl DomainFile {
    pub fn read(path: &FsPath) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn domain(&self) -> Result<SpecialDomain> {
        let polys = self.premultipliers.iter().map(|s| parse_poly(s)).collect::<Result<Vec<_>>>()?;
        let mut d = SpecialDomain::new(polys, self.type_hint)?;
        d.perturbation_degree = self.perturbation_degree;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainOut {
    pub label: String,
    pub poly: String,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step1Out {
    pub m: u32,
    pub f: String,
    pub gamma: String,
    pub phi: String,
    pub nu_gamma_phi: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<u32>,
    pub f1: String,
    pub nu_f1: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOut {
    pub k: u32,
    pub kind: String,
    pub germ: String,
    pub realized: String,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchOut {
    pub curve: String,
    pub multiplicity: u32,
    pub conjugates: u32,
    pub phi_order: String,
    pub terminal: String,
    pub terminal_order: String,
    pub ftilde_order: String,
    pub steps: Vec<StepOut>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step2Out {
    pub phi: String,
    pub phi_coefficients: Vec<i64>,
    pub ftilde: String,
    pub ftilde_coefficients: Vec<i64>,
    pub t_bound: String,
    pub branches: Vec<BranchOut>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOut {
    pub name: String,
    pub bound: String,
    pub realized: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipOut {
    pub generators: Vec<String>,
    pub degree_budget: u32,
    pub certified: bool,
    pub z_power_in_ideal: bool,
    pub w_power_in_ideal: bool,
    pub staircase: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicLevelOut {
    pub k: u32,
    pub j_generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_standard_basis: Option<Vec<String>>,
    pub i_generators: Vec<String>,
    pub root_order: u64,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicOut {
    pub terminated: bool,
    pub max_root_order: u64,
    pub levels: Vec<ClassicLevelOut>,
}

/// Serialized certificate. Exact rationals are "p/q" strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub path: String,
    pub seed: u64,
    pub precision: u32,
    pub premultipliers: Vec<String>,
    pub type_bound: u32,
    pub type_source: String,
    pub m: u32,
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    pub a: u64,
    pub l: usize,
    pub epsilon: String,
    pub chain: Vec<ChainOut>,
    pub step1: Step1Out,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step2: Option<Step2Out>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<String>,
    pub bound_checks: Vec<CheckOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membership: Option<MembershipOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classic: Option<ClassicOut>,
    pub warnings: Vec<String>,
}

fn strs(v: &[BiPoly]) -> Vec<String> {
    v.iter().map(|p| p.to_string()).collect()
}

impl CertificateFile {
    pub fn from_certificate(c: &Certificate, classic: Option<&ClassicState>) -> Self {
        let s1 = &c.step1;
        CertificateFile {
            path: c.path.name().into(),
            seed: c.seed,
            precision: c.precision,
            premultipliers: c.premultipliers.iter().map(|g| g.poly.to_string()).collect(),
            type_bound: c.type_bound,
            type_source: c.type_source.clone(),
            m: c.m,
            d: c.d,
            t: c.t.as_ref().map(fmt_rat),
            a: c.a,
            l: c.l,
            epsilon: fmt_rat(&c.epsilon),
            chain: c
                .chain
                .iter()
                .map(|e| ChainOut { label: e.label.clone(), poly: e.poly.to_string(), provenance: e.provenance.clone() })
                .collect(),
            step1: Step1Out {
                m: s1.m,
                f: format!("{} = {}", s1.f.label, s1.f.poly),
                gamma: s1.gamma.clone(),
                phi: format!("{} = {}", s1.phi.label, s1.phi.poly),
                nu_gamma_phi: s1.nu_gamma_phi.to_string(),
                mu: s1.mu.as_ref().map(|m| m.to_string()),
                k0: s1.k0,
                f1: s1.f1.to_string(),
                nu_f1: s1.nu_f1,
            },
            step2: c.step2.as_ref().map(|s| Step2Out {
                phi: s.phi.to_string(),
                phi_coefficients: s.phi_coefficients.clone(),
                ftilde: s.ftilde.to_string(),
                ftilde_coefficients: s.ftilde_coefficients.clone(),
                t_bound: s.t_bound.to_string(),
                branches: s
                    .logs
                    .iter()
                    .map(|b| BranchOut {
                        curve: b.branch.clone(),
                        multiplicity: b.multiplicity,
                        conjugates: b.conjugates,
                        phi_order: b.phi_order.to_string(),
                        terminal: b.terminal.clone(),
                        terminal_order: b.terminal_order.to_string(),
                        ftilde_order: b.ftilde_order.to_string(),
                        steps: b
                            .steps
                            .iter()
                            .map(|h| StepOut {
                                k: h.k,
                                kind: h.kind.to_string(),
                                germ: h.germ.label.clone(),
                                realized: h.realized.to_string(),
                                bound: h.bound.to_string(),
                            })
                            .collect(),
                    })
                    .collect(),
            }),
            multiplicity: c.multiplicity.as_ref().map(|m| m.to_string()),
            bound_checks: c
                .bound_checks
                .iter()
                .map(|b| CheckOut { name: b.name.clone(), bound: b.bound.clone(), realized: b.realized.clone(), pass: b.pass })
                .collect(),
            membership: c.membership.as_ref().map(|m| MembershipOut {
                generators: strs(&m.generators),
                degree_budget: m.degree_budget,
                certified: m.certified,
                z_power_in_ideal: m.z_power,
                w_power_in_ideal: m.w_power,
                staircase: m.staircase,
            }),
            classic: classic.map(classic_out),
            warnings: c.warnings.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))
    }
}

pub fn classic_out(c: &ClassicState) -> ClassicOut {
    ClassicOut {
        terminated: c.terminated,
        max_root_order: c.max_root_order(),
        levels: c
            .levels
            .iter()
            .map(|l| ClassicLevelOut {
                k: l.k,
                j_generators: strs(&l.j_generators),
                j_standard_basis: l.j_basis.as_ref().map(|b| strs(b)),
                i_generators: strs(&l.i_generators),
                root_order: l.root_order,
                rule: l.rule.clone(),
            })
            .collect(),
    }
}

#[derive(Parser, Debug)]
#[command(name = "kohn", version, about = "Effective Kohn multipliers for special domains in C^3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    BranchSum,
    LinearAlgebra,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the multiplier construction on a domain file and write a certificate.
    Run {
        input: PathBuf,
        #[arg(long)]
        truncation: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        verify_membership: bool,
        /// Also run the classic radical-based procedure.
        #[arg(long)]
        classic: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the Puiseux branches of a polynomial.
    Puiseux {
        poly: String,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Contact order (type) of a set of germs.
    Type {
        #[arg(required = true)]
        polys: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Local intersection multiplicity of two germs.
    Multiplicity {
        f: String,
        g: String,
        #[arg(long, value_enum, default_value = "branch-sum")]
        method: MethodArg,
    },
    /// Run every domain file (*.json) in a directory.
    Corpus {
        dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        verify_membership: bool,
    },
}

/// Output of a successful command: text for stdout.
pub fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Run { input, truncation, seed, verify_membership, classic, output } => {
            let file = DomainFile::read(input)?;
            let text = run_file(&file, *truncation, *seed, *verify_membership, *classic)?;
            match output {
                Some(path) => {
                    fs::write(path, &text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Puiseux { poly, precision } => {
            let f = parse_poly(poly)?;
            let v = branches(&f, precision.unwrap_or_else(|| default_precision(&f)))?;
            let mut out = String::new();
            for (i, b) in v.branches.iter().enumerate() {
                out.push_str(&format!("branch {}: {}\n", i + 1, b));
            }
            Ok(out)
        }
        Command::Type { polys, seed } => {
            let s = polys.iter().map(|p| parse_poly(p)).collect::<Result<Vec<_>>>()?;
            let r = dangelo_type(&s, Candidates::Auto { seed: seed.unwrap_or_else(default_seed) })?;
            let exact = match r.exactness {
                Exactness::CertifiedExact => "certified exact",
                Exactness::BoundsOnly => "bounds only",
            };
            let mut out = format!("tau = {} ({exact})\nlower = {}\nupper = {}\n", r.lower, r.lower, r.upper);
            if let Some(m) = &r.multiplicity_upper {
                out.push_str(&format!("multiplicity bound = {m}\n"));
            }
            for (c, v) in &r.witnesses {
                out.push_str(&format!("curve {c}: {v}\n"));
            }
            Ok(out)
        }
        Command::Multiplicity { f, g, method } => {
            let m = match method {
                MethodArg::BranchSum => Method::BranchSum,
                MethodArg::LinearAlgebra => Method::LinearAlgebra,
            };
            Ok(format!("{}\n", multiplicity(&parse_poly(f)?, &parse_poly(g)?, m)?))
        }
        Command::Corpus { dir, seed, verify_membership } => {
            let mut files: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            let mut out = String::new();
            for p in files {
                let name = p.file_name().unwrap().to_string_lossy().to_string();
                let res = DomainFile::read(&p).and_then(|f| {
                    let c = certificate(&f, None, *seed, *verify_membership)?;
                    Ok(format!("ok l={} a={} epsilon={}", c.l, c.a, fmt_rat(&c.epsilon)))
                });
                match res {
                    Ok(line) => out.push_str(&format!("{name}: {line}\n")),
                    Err(e) => out.push_str(&format!("{name}: error (exit {}) {e}\n", e.exit_code())),
                }
            }
            Ok(out)
        }
    }
}

fn certificate(file: &DomainFile, truncation: Option<u32>, seed: Option<u64>, verify: bool) -> Result<Certificate> {
    let config = RunConfig {
        seed: seed.or(file.seed).unwrap_or_else(default_seed),
        truncation: truncation.or(file.truncation).unwrap_or(DEFAULT_TRUNCATION),
        verify_membership: verify,
    };
    run(&file.domain()?, &config)
}

/// The certificate text for a domain file.
pub fn run_file(file: &DomainFile, truncation: Option<u32>, seed: Option<u64>, verify: bool, classic: bool) -> Result<String> {
    let c = certificate(file, truncation, seed, verify)?;
    let cl = if classic { Some(classic_kohn(&file.domain()?, 16)?) } else { None };
    Ok(CertificateFile::from_certificate(&c, cl.as_ref()).to_text())
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
