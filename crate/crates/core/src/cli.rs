//! The `twendo` command line. [`run`] takes the argument vector and standard
//! input and returns an exit status with the rendered documents, so the whole
//! surface can be exercised in-process.
//!
//! Exit status: 0 pass, 1 check failure, 2 usage or malformed input,
//! 3 oracle inconclusive.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith::{parse_rational, split_unit, Prime, Rational};
use crate::classes::{self, ClassKind};
use crate::endoscopy;
use crate::error::{Error, Result};
use crate::formats::{self as fmt, At};
use crate::gsnorm;
use crate::localfield;
use crate::manifest::{self, RunSpec};
use crate::params;
use crate::qform::{QuadForm, QuadraticEtale};
use crate::weil;

#[derive(Parser, Debug)]
#[command(name = "twendo", version, about = "Exact local computations for twisted endoscopy")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Base seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Prime or comma-separated primes.
    #[arg(short = 'p', long = "p", global = true, value_delimiter = ',')]
    p: Vec<u64>,
    /// Rank or comma-separated ranks.
    #[arg(short = 'n', long = "n", global = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Records per (p, n) for corpus verbs.
    #[arg(long, global = true, default_value_t = 100)]
    count: usize,
    /// Write the output document to this file, or into this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

/// Literal input: a path, `-` for standard input, or inline JSON.
#[derive(Args, Debug, Clone)]
struct Input {
    input: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Hilbert symbol (a, b) over ℚ_p, or over --field.
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// Field literal (path or inline); a and b are then coordinate arrays.
        #[arg(long)]
        field: Option<String>,
    },
    /// Square class of a nonzero rational.
    Sqclass {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    #[command(subcommand)]
    /// Quadratic form invariants, equivalence, Witt decomposition.
    Qform(QformVerb),
    #[command(subcommand)]
    /// Weil indices and the Gauss-sum oracle.
    Weil(WeilVerb),
    #[command(subcommand)]
    /// Étale algebras with involution.
    Etale(EtaleVerb),
    #[command(subcommand)]
    /// Class representatives from parameters.
    Class(ClassVerb),
    #[command(subcommand)]
    /// Norm map on unipotent configurations.
    Gs(GsVerb),
    #[command(subcommand)]
    /// Endoscopic data, η and transfer factors.
    Endo(EndoVerb),
    #[command(subcommand)]
    /// Formal selfdual parameters.
    Param(ParamVerb),
    #[command(subcommand)]
    /// Seeded configuration corpora and their manifests.
    Corpus(CorpusVerb),
}

#[derive(Subcommand, Debug)]
enum QformVerb {
    /// dim, det class, Hasse, Witt index.
    Invariants(Input),
    /// Whether two forms are equivalent.
    Equiv { first: String, second: String },
    /// Hyperbolic planes and the anisotropic kernel.
    Witt(Input),
    /// Whether the form has a nontrivial zero.
    Isotropic(Input),
}

#[derive(Subcommand, Debug)]
enum WeilVerb {
    /// γ_ψ of a form literal.
    Index(Input),
    /// ε(1/2, χ_K, ψ) for K = ℚ_p(√d).
    Epsilon {
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Brute-force Gauss sum for γ_ψ(a) at two consecutive radii.
    Oracle {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
}

#[derive(Subcommand, Debug)]
enum EtaleVerb {
    /// Structure of an algebra literal.
    Build(Input),
    /// `{"algebra", "c"}` → the form (x, y) ↦ Tr(c x τ(y)).
    Traceform(Input),
}

#[derive(Subcommand, Debug)]
enum ClassVerb {
    /// Matrix or Gram representative of a parameter.
    Build(Input),
    /// Twist invariant of `{"delta": matrix}` or of a built twisted class.
    Invariant(Input),
    /// `{"x": parameter, "y": parameter}`.
    Corresponds(Input),
    /// Whether the parameter's class is elliptic.
    Elliptic(Input),
}

#[derive(Subcommand, Debug)]
enum GsVerb {
    /// Random configuration over an ambient literal `{"qV", "epsilon"}`.
    Random(Input),
    /// Norm γ of a configuration.
    Norm(Input),
    /// `{"ambient", "X", "gamma"}`.
    Section(Input),
    /// `{"config", "param"}`.
    Verify(Input),
}

#[derive(Subcommand, Debug)]
enum EndoVerb {
    /// Elliptic endoscopic data for rank n.
    Enumerate,
    /// η for the symplectic (`sp`) or even orthogonal (`so`) case.
    Eta {
        #[arg(value_parser = ["sp", "so"])]
        kind: String,
        /// Length of the anisotropic vector, for `so`.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// Binary form literal V′, for `so`.
        input: Option<String>,
    },
    /// Transfer factor of `{"qV", "delta"}`.
    Delta(Input),
    /// Constancy check on a configuration literal.
    Check(Input),
}

#[derive(Subcommand, Debug)]
enum ParamVerb {
    /// Endoscopic datum a parameter factors through.
    Classify(Input),
    /// Whether an irreducible parameter avoids SO(2n+1).
    Hypothesis(Input),
}

#[derive(Subcommand, Debug)]
enum CorpusVerb {
    /// Configuration literals without checking them.
    Generate,
    /// Check every configuration and emit a manifest.
    Run {
        /// Also count caught single-entry corruptions.
        #[arg(long)]
        mutations: bool,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit status for a library error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) | Error::Oracle(_) => 3,
        Error::RetryExhausted { .. } => 1,
        _ => 2,
    }
}

/// Runs one command line. `default_out` stands for the output-directory
/// environment variable and applies to corpus verbs without `--out`.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, default_out: Option<PathBuf>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let is_corpus = matches!(cli.verb, Verb::Corpus(_));
    let mut ctx = Ctx { g: cli.global.clone(), stdin };
    match dispatch(&mut ctx, &cli.verb) {
        Ok((doc, code, name)) => {
            let out = ctx.g.out.clone().or_else(|| if is_corpus { default_out } else { None });
            match out {
                None => Outcome { code, stdout: fmt::to_pretty(&doc) + "\n", stderr: String::new() },
                Some(dir) => match write_doc(&dir, &name, &ctx.g, &doc) {
                    Ok(path) => {
                        let mut note = json!({ "written": path.display().to_string() });
                        if let Some(s) = doc.get("summary") {
                            note["summary"] = s.clone();
                        }
                        Outcome { code, stdout: fmt::to_pretty(&note) + "\n", stderr: String::new() }
                    }
                    Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
                },
            }
        }
        Err(e) => Outcome { code: error_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn write_doc(target: &Path, name: &str, g: &Global, doc: &Value) -> Result<PathBuf> {
    let path = if target.is_dir() || target.as_os_str().to_string_lossy().ends_with('/') {
        std::fs::create_dir_all(target).map_err(|e| Error::Invalid(format!("{}: {e}", target.display())))?;
        target.join(format!("{name}-seed{}.json", g.seed))
    } else {
        target.to_path_buf()
    };
    std::fs::write(&path, fmt::to_pretty(doc) + "\n").map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    Ok(path)
}

struct Ctx<'a> {
    g: Global,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn prime(&self) -> Result<Prime> {
        match self.g.p.as_slice() {
            [p] => Prime::new(*p),
            [] => Err(Error::Invalid("this verb needs -p".into())),
            _ => Err(Error::Invalid("this verb takes a single prime".into())),
        }
    }

    fn rank(&self) -> Result<usize> {
        match self.g.n.as_slice() {
            [n] => Ok(*n),
            [] => Err(Error::Invalid("this verb needs -n".into())),
            _ => Err(Error::Invalid("this verb takes a single n".into())),
        }
    }

    fn load(&mut self, input: &Option<String>) -> Result<Value> {
        let text = match input.as_deref() {
            None | Some("-") => {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| Error::Invalid(format!("standard input: {e}")))?;
                s
            }
            Some(s) if s.trim_start().starts_with(['{', '[']) => s.to_string(),
            Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))?,
        };
        fmt::parse_json(&text)
    }
}

fn arg_rational(s: &str, name: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse { at: format!("argument <{name}>"), msg },
        other => other,
    })
}

type Done = (Value, i32, String);

fn ok(doc: Value, name: &str) -> Result<Done> {
    Ok((doc, 0, name.into()))
}

fn dispatch(ctx: &mut Ctx<'_>, verb: &Verb) -> Result<Done> {
    match verb {
        Verb::Hilbert { a, b, field } => hilbert(ctx, a, b, field),
        Verb::Sqclass { a } => {
            let p = ctx.prime()?;
            let x = arg_rational(a, "a")?;
            let c = localfield::square_class(&x, p)?;
            let (v, _) = split_unit(&x, p)?;
            ok(json!({ "p": p.get(), "a": fmt::rational_json(&x), "class": fmt::square_class_json(&c), "valuation": v }), "sqclass")
        }
        Verb::Qform(v) => qform(ctx, v),
        Verb::Weil(v) => weil_verb(ctx, v),
        Verb::Etale(v) => etale(ctx, v),
        Verb::Class(v) => class(ctx, v),
        Verb::Gs(v) => gs(ctx, v),
        Verb::Endo(v) => endo(ctx, v),
        Verb::Param(v) => param(ctx, v),
        Verb::Corpus(v) => corpus(ctx, v),
    }
}

fn hilbert(ctx: &mut Ctx<'_>, a: &str, b: &str, field: &Option<String>) -> Result<Done> {
    let Some(f) = field else {
        let p = ctx.prime()?;
        let (x, y) = (arg_rational(a, "a")?, arg_rational(b, "b")?);
        let h = localfield::hilbert_qp(&x, &y, p)?;
        return ok(json!({ "p": p.get(), "a": fmt::rational_json(&x), "b": fmt::rational_json(&y), "hilbert": h }), "hilbert");
    };
    let fv = ctx.load(&Some(f.clone()))?;
    let field = fmt::parse_field(At::root(&fv))?;
    let elem = |s: &str, name: &str| -> Result<Vec<Rational>> {
        if s.trim_start().starts_with('[') {
            let v = fmt::parse_json(s)?;
            let mut c = At::root(&v).rationals()?;
            if c.len() > field.degree() {
                return Err(Error::Parse { at: format!("argument <{name}>"), msg: "too many coordinates".into() });
            }
            c.resize(field.degree(), Rational::from_integer(0.into()));
            Ok(c)
        } else {
            Ok(field.from_rational(&arg_rational(s, name)?))
        }
    };
    let (x, y) = (elem(a, "a")?, elem(b, "b")?);
    let h = localfield::hilbert(&field, &x, &y)?;
    ok(
        json!({ "field": fmt::field_json(&field), "a": fmt::rationals_json(&x), "b": fmt::rationals_json(&y), "hilbert": h }),
        "hilbert",
    )
}

fn load_form(ctx: &mut Ctx<'_>, input: &Option<String>) -> Result<QuadForm> {
    let v = ctx.load(input)?;
    fmt::parse_form(At::root(&v))
}

fn qform(ctx: &mut Ctx<'_>, verb: &QformVerb) -> Result<Done> {
    match verb {
        QformVerb::Invariants(i) => {
            let q = load_form(ctx, &i.input)?;
            ok(json!({ "form": fmt::form_json(&q), "invariants": fmt::invariants_json(&q) }), "qform-invariants")
        }
        QformVerb::Equiv { first, second } => {
            let q1 = load_form(ctx, &Some(first.clone()))?;
            let q2 = load_form(ctx, &Some(second.clone()))?;
            ok(json!({ "equivalent": q1.equivalent(&q2)?, "witt_equivalent": q1.witt_equivalent(&q2)? }), "qform-equiv")
        }
        QformVerb::Witt(i) => {
            let q = load_form(ctx, &i.input)?;
            let (h, w) = q.witt_decompose();
            let aniso = w.realize()?;
            ok(
                json!({
                    "hyperbolic_planes": h,
                    "anisotropic": {
                        "dim": w.aniso_dim,
                        "det": fmt::square_class_json(&w.det),
                        "hasse": w.hasse,
                        "form": fmt::form_json(&aniso),
                    },
                }),
                "qform-witt",
            )
        }
        QformVerb::Isotropic(i) => {
            let q = load_form(ctx, &i.input)?;
            ok(json!({ "isotropic": q.is_isotropic() }), "qform-isotropic")
        }
    }
}

fn weil_verb(ctx: &mut Ctx<'_>, verb: &WeilVerb) -> Result<Done> {
    match verb {
        WeilVerb::Index(i) => {
            let q = load_form(ctx, &i.input)?;
            ok(json!({ "form": fmt::form_json(&q), "weil_index": fmt::mu8_json(weil::weil_index(&q)) }), "weil-index")
        }
        WeilVerb::Epsilon { d } => {
            let p = ctx.prime()?;
            let k = QuadraticEtale::new(&arg_rational(d, "d")?, p)?;
            ok(json!({ "p": p.get(), "K": fmt::etale_json(&k), "epsilon": fmt::mu8_json(weil::epsilon_half(&k)) }), "weil-epsilon")
        }
        WeilVerb::Oracle { a } => {
            let p = ctx.prime()?;
            let x = arg_rational(a, "a")?;
            let (g0, g1) = weil::gauss_oracle_stable(&x, p)?;
            let table = weil::weil_rank1(&x, p)?;
            let level = |g: &weil::GaussValue| {
                json!({ "k": g.k, "re": g.value.re, "im": g.value.im, "snapped": fmt::mu8_json(g.snapped), "distance": g.distance })
            };
            let agree = g0.snapped == table;
            let doc = json!({
                "p": p.get(),
                "a": fmt::rational_json(&x),
                "levels": [level(&g0), level(&g1)],
                "closed_form": fmt::mu8_json(table),
                "agree": agree,
            });
            Ok((doc, if agree { 0 } else { 1 }, "weil-oracle".into()))
        }
    }
}

fn etale(ctx: &mut Ctx<'_>, verb: &EtaleVerb) -> Result<Done> {
    match verb {
        EtaleVerb::Build(i) => {
            let v = ctx.load(&i.input)?;
            let alg = fmt::parse_algebra(At::root(&v))?;
            let factors: Vec<Value> = alg
                .factors()
                .iter()
                .map(|t| {
                    json!({
                        "base_degree": t.base.degree(),
                        "ramification_index": t.base.ramification_index(),
                        "residue_degree": t.base.residue_degree(),
                        "split": t.is_split(),
                    })
                })
                .collect();
            ok(
                json!({ "algebra": fmt::algebra_json(&alg), "dim": alg.dim(), "has_split_factor": alg.has_split_factor(), "factors": factors }),
                "etale-build",
            )
        }
        EtaleVerb::Traceform(i) => {
            let v = ctx.load(&i.input)?;
            let at = At::root(&v);
            let alg = at.field("algebra", fmt::parse_algebra)?;
            let c = at.field("c", |a| fmt::parse_element(a, &alg))?;
            let q = alg.trace_form_quadratic(&c)?;
            ok(json!({ "form": fmt::form_json(&q), "invariants": fmt::invariants_json(&q) }), "etale-traceform")
        }
    }
}

fn class(ctx: &mut Ctx<'_>, verb: &ClassVerb) -> Result<Done> {
    match verb {
        ClassVerb::Build(i) => {
            let v = ctx.load(&i.input)?;
            let param = fmt::parse_class_parameter(At::root(&v))?;
            ok(build_class(&param)?, "class-build")
        }
        ClassVerb::Invariant(i) => {
            let v = ctx.load(&i.input)?;
            let at = At::root(&v);
            let delta = if at.has("delta") {
                at.field("delta", |a| a.matrix())?
            } else {
                let param = fmt::parse_class_parameter(at)?;
                match param.kind {
                    ClassKind::TglEven => classes::build_tgl_even(&param)?,
                    ClassKind::TglOdd => classes::build_tgl_odd(&param)?,
                    ClassKind::TglE => classes::build_tgl_e(&param)?.0,
                    k => return Err(Error::Invalid(format!("{k:?} is not a twisted class"))),
                }
            };
            let f = classes::twist_invariant(&delta)?;
            ok(json!({ "delta": fmt::matrix_json(&delta), "charpoly": fmt::poly_json(&f) }), "class-invariant")
        }
        ClassVerb::Corresponds(i) => {
            let v = ctx.load(&i.input)?;
            let at = At::root(&v);
            let x = at.field("x", fmt::parse_class_parameter)?;
            let y = at.field("y", fmt::parse_class_parameter)?;
            ok(json!({ "corresponds": classes::corresponds(&x, &y)? }), "class-corresponds")
        }
        ClassVerb::Elliptic(i) => {
            let v = ctx.load(&i.input)?;
            let param = fmt::parse_class_parameter(At::root(&v))?;
            ok(
                json!({ "elliptic": classes::is_elliptic(&param), "very_regular": param.is_very_regular()? }),
                "class-elliptic",
            )
        }
    }
}

fn build_class(param: &classes::ClassParameter) -> Result<Value> {
    let m = fmt::matrix_json;
    Ok(match param.kind {
        ClassKind::TglEven => json!({ "kind": "tgl-even", "delta": m(&classes::build_tgl_even(param)?) }),
        ClassKind::TglOdd => json!({ "kind": "tgl-odd", "delta": m(&classes::build_tgl_odd(param)?) }),
        ClassKind::SoEven => {
            let (q, g) = classes::build_so_even(param)?;
            json!({ "kind": "so-even", "form": fmt::form_json(&q), "gamma": m(&g) })
        }
        ClassKind::SoOdd => {
            let (q, g) = classes::build_so_odd(param)?;
            json!({ "kind": "so-odd", "form": fmt::form_json(&q), "gamma": m(&g) })
        }
        ClassKind::Sp => {
            let (gram, g) = classes::build_sp(param)?;
            json!({ "kind": "sp", "gram": m(&gram), "gamma": m(&g) })
        }
        ClassKind::U => {
            let (q, g, j) = classes::build_u(param)?;
            json!({ "kind": "u", "form": fmt::form_json(&q), "gamma": m(&g), "j": m(&j) })
        }
        ClassKind::TglE => {
            let (d, j) = classes::build_tgl_e(param)?;
            json!({ "kind": "tgl-e", "delta": m(&d), "j": m(&j) })
        }
    })
}

fn norm_doc(gamma: &crate::linalg::Matrix) -> Value {
    json!({
        "gamma": fmt::matrix_json(gamma),
        "charpoly": fmt::poly_json(&gamma.char_poly()),
        "very_regular": gsnorm::norm_very_regular(gamma),
    })
}

fn gs(ctx: &mut Ctx<'_>, verb: &GsVerb) -> Result<Done> {
    match verb {
        GsVerb::Random(i) => {
            let v = ctx.load(&i.input)?;
            let amb = fmt::parse_ambient(At::root(&v))?;
            let c = gsnorm::random_config(&amb, ctx.g.seed)?;
            ok(json!({ "seed": ctx.g.seed, "config": fmt::config_json(&c) }), "gs-random")
        }
        GsVerb::Norm(i) => {
            let v = ctx.load(&i.input)?;
            let c = fmt::parse_config(At::root(&v))?;
            if !c.xy_condition() {
                return Err(Error::Precondition("configuration is off the closure variety".into()));
            }
            let (delta, phi) = gsnorm::rigidify(&c)?;
            let mut doc = norm_doc(&gsnorm::gs_norm(&c)?);
            doc["delta"] = fmt::matrix_json(&delta);
            doc["phi"] = fmt::matrix_json(&phi);
            ok(doc, "gs-norm")
        }
        GsVerb::Section(i) => {
            let v = ctx.load(&i.input)?;
            let at = At::root(&v);
            let amb = at.field("ambient", fmt::parse_ambient)?;
            let x = at.field("X", |a| a.matrix())?;
            let gamma = at.field("gamma", |a| a.matrix())?;
            let c = gsnorm::gs_section(&amb, &x, &gamma)?;
            ok(json!({ "config": fmt::config_json(&c) }), "gs-section")
        }
        GsVerb::Verify(i) => {
            let v = ctx.load(&i.input)?;
            let at = At::root(&v);
            let c = at.field("config", fmt::parse_config)?;
            let param = at.field("param", fmt::parse_class_parameter)?;
            let pass = gsnorm::gs_param_check(&c, &param)?;
            Ok((json!({ "pass": pass }), if pass { 0 } else { 1 }, "gs-verify".into()))
        }
    }
}

fn endo(ctx: &mut Ctx<'_>, verb: &EndoVerb) -> Result<Done> {
    match verb {
        EndoVerb::Enumerate => {
            let (p, n) = (ctx.prime()?, ctx.rank()?);
            let data = endoscopy::enumerate_elliptic_data(n, p)?;
            ok(
                json!({ "p": p.get(), "n": n, "count": data.len(), "data": data.iter().map(fmt::datum_json).collect::<Vec<_>>() }),
                "endo-enumerate",
            )
        }
        EndoVerb::Eta { kind, y, input } => {
            let (p, n) = (ctx.prime(), ctx.rank()?);
            let eta = if kind == "sp" {
                endoscopy::eta_sp(n, p?)?
            } else {
                let y = arg_rational(y.as_deref().ok_or_else(|| Error::Invalid("eta so needs --y".into()))?, "y")?;
                let vp = load_form(ctx, input)?;
                endoscopy::eta_so(&vp, &y, n)?
            };
            ok(json!({ "kind": kind, "n": n, "eta": fmt::square_class_json(&eta) }), "endo-eta")
        }
        EndoVerb::Delta(i) => {
            let v = ctx.load(&i.input)?;
            let at = At::root(&v);
            let q = at.field("qV", fmt::parse_form)?;
            let delta = at.field("delta", |a| a.matrix())?;
            let n = delta.rows() / 2;
            let sign = endoscopy::transfer_factor(&q, &delta, n)?;
            let lambda = endoscopy::transfer_factor_whittaker(&q, &delta, n)?;
            ok(json!({ "n": n, "delta_sign": sign, "delta_lambda": fmt::mu8_json(lambda) }), "endo-delta")
        }
        EndoVerb::Check(i) => {
            let v = ctx.load(&i.input)?;
            let c = fmt::parse_config(At::root(&v))?;
            let n = c.ambient.n() / 2;
            let out = endoscopy::gs_constancy(&c, n)?;
            let doc = json!({
                "n": n,
                "closure": out.closure,
                "lhs": out.lhs.map(fmt::mu8_json),
                "rhs": fmt::mu8_json(out.rhs),
                "pass": out.pass,
            });
            Ok((doc, if out.pass { 0 } else { 1 }, "endo-check".into()))
        }
    }
}

fn param(ctx: &mut Ctx<'_>, verb: &ParamVerb) -> Result<Done> {
    let p = ctx.prime()?;
    match verb {
        ParamVerb::Classify(i) => {
            let v = ctx.load(&i.input)?;
            let phi = fmt::parse_formal_parameter(At::root(&v), p)?;
            let c = params::classify(&phi)?;
            ok(
                json!({
                    "datum": fmt::datum_json(&c.datum),
                    "symplectic_count": c.symplectic_count,
                    "readings_differ": c.readings_differ,
                }),
                "param-classify",
            )
        }
        ParamVerb::Hypothesis(i) => {
            let v = ctx.load(&i.input)?;
            let phi = fmt::parse_formal_parameter(At::root(&v), p)?;
            ok(json!({ "holds": params::hypothesis_even_so(&phi)? }), "param-hypothesis")
        }
    }
}

fn corpus(ctx: &mut Ctx<'_>, verb: &CorpusVerb) -> Result<Done> {
    if ctx.g.p.is_empty() || ctx.g.n.is_empty() {
        return Err(Error::Invalid("corpus verbs need --p and --n".into()));
    }
    let primes = ctx.g.p.iter().map(|&p| Prime::new(p)).collect::<Result<Vec<_>>>()?;
    if ctx.g.n.contains(&0) {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let mutations = matches!(verb, CorpusVerb::Run { mutations: true });
    let spec = RunSpec { seed: ctx.g.seed, primes, ns: ctx.g.n.clone(), count: ctx.g.count, mutations };
    match verb {
        CorpusVerb::Generate => ok(manifest::generate(&spec)?, "corpus"),
        CorpusVerb::Run { .. } => {
            let m = manifest::run(&spec);
            Ok((m.to_json(), m.exit_code(), "manifest".into()))
        }
    }
}

