//! JSON literal formats for forms, algebras, class parameters, configurations
//! and formal parameters. Rationals are written `"num/den"` (integers may be
//! bare JSON numbers on input); roots of unity are written `"zeta8^k"`.
//!
//! Malformed input reports a position: a line and column for syntax errors,
//! a JSON pointer such as `/gram/1/0` for everything else.

use serde_json::{json, Map, Value};

use crate::arith::{fmt_rational, parse_rational, Prime, Rational};
use crate::classes::{ClassKind, ClassParameter};
use crate::endoscopy::EndoscopicDatum;
use crate::error::{Error, Result};
use crate::etale::{AlgebraElement, EtaleAlgebra, FactorTower, Step};
use crate::gsnorm::{AmbientSpace, GsConfig};
use crate::linalg::{Matrix, Poly};
use crate::localfield::{square_class, Certificate, LocalFieldDescriptor, SquareClass};
use crate::params::{FormalConstituent, FormalParameter, Sign};
use crate::qform::{QuadForm, QuadraticEtale};
use crate::weil::Mu8;

/// Parses JSON text, turning syntax errors into positioned parse errors.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        at: format!("line {} column {}", e.line(), e.column()),
        msg: e.to_string(),
    })
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize")
}

/// A value together with its JSON pointer, for error reporting.
#[derive(Clone, Copy)]
pub struct At<'a> {
    pub value: &'a Value,
    path: &'a str,
}

impl<'a> At<'a> {
    pub fn root(value: &'a Value) -> Self {
        At { value, path: "" }
    }

    pub fn path(&self) -> String {
        if self.path.is_empty() { "/".into() } else { self.path.into() }
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { at: self.path(), msg: msg.into() }
    }

    fn obj(&self) -> Result<&'a Map<String, Value>> {
        self.value.as_object().ok_or_else(|| self.err("expected an object"))
    }

    fn child<R>(&self, key: &str, v: &'a Value, f: impl FnOnce(At<'_>) -> R) -> R {
        let path = format!("{}/{}", self.path, key);
        f(At { value: v, path: &path })
    }

    /// Applies `f` to a required field.
    pub fn field<R>(&self, key: &str, f: impl FnOnce(At<'_>) -> Result<R>) -> Result<R> {
        let v = self.obj()?.get(key).ok_or_else(|| self.err(format!("missing field \"{key}\"")))?;
        self.child(key, v, f)
    }

    /// Applies `f` to an optional field; JSON `null` counts as absent.
    pub fn opt<R>(&self, key: &str, f: impl FnOnce(At<'_>) -> Result<R>) -> Result<Option<R>> {
        match self.obj()?.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => self.child(key, v, f).map(Some),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.value.get(key).is_some_and(|v| !v.is_null())
    }

    /// Applies `f` to every element of an array.
    pub fn each<R>(&self, mut f: impl FnMut(At<'_>) -> Result<R>) -> Result<Vec<R>> {
        self.each_indexed(|_, a| f(a))
    }

    pub fn each_indexed<R>(&self, mut f: impl FnMut(usize, At<'_>) -> Result<R>) -> Result<Vec<R>> {
        let arr = self.value.as_array().ok_or_else(|| self.err("expected an array"))?;
        arr.iter().enumerate().map(|(i, v)| self.child(&i.to_string(), v, |a| f(i, a))).collect()
    }

    pub fn str(&self) -> Result<&'a str> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    pub fn u64(&self) -> Result<u64> {
        self.value.as_u64().ok_or_else(|| self.err("expected a non-negative integer"))
    }

    pub fn usize(&self) -> Result<usize> {
        Ok(self.u64()? as usize)
    }

    pub fn i64(&self) -> Result<i64> {
        self.value.as_i64().ok_or_else(|| self.err("expected an integer"))
    }

    pub fn rational(&self) -> Result<Rational> {
        let text = match self.value {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            _ => return Err(self.err("expected a rational \"num/den\" or an integer")),
        };
        parse_rational(&text).map_err(|e| match e {
            Error::Parse { msg, .. } => self.err(msg),
            other => other,
        })
    }

    pub fn prime(&self) -> Result<Prime> {
        Prime::new(self.u64()?).map_err(|e| self.err(e.to_string()))
    }

    pub fn rationals(&self) -> Result<Vec<Rational>> {
        self.each(|a| a.rational())
    }

    pub fn matrix(&self) -> Result<Matrix> {
        let rows = self.each(|r| r.rationals())?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, 0));
        }
        Matrix::from_rows(rows).map_err(|e| self.err(e.to_string()))
    }

    /// Runs a semantic check, attaching this position to its error.
    pub fn check<R>(&self, r: Result<R>) -> Result<R> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => self.err(other.to_string()),
        })
    }
}

// ---------------------------------------------------------------------------
// Scalars

pub fn rational_json(r: &Rational) -> Value {
    Value::String(fmt_rational(r))
}

pub fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| rationals_json(r)).collect())
}

/// Polynomial as ascending coefficient strings.
pub fn poly_json(f: &Poly) -> Value {
    rationals_json(f.coeffs())
}

pub fn square_class_json(c: &SquareClass) -> Value {
    Value::String(c.to_string())
}

pub fn mu8_json(z: Mu8) -> Value {
    Value::String(z.to_string())
}

pub fn parse_mu8(at: At<'_>) -> Result<Mu8> {
    at.str()?.parse().map_err(|_| at.err("expected \"zeta8^k\""))
}

pub fn parse_square_class(at: At<'_>, p: Prime) -> Result<SquareClass> {
    let a = at.rational()?;
    at.check(square_class(&a, p))
}

pub fn etale_json(k: &QuadraticEtale) -> Value {
    square_class_json(&k.disc)
}

pub fn parse_quadratic_etale(at: At<'_>, p: Prime) -> Result<QuadraticEtale> {
    Ok(QuadraticEtale { disc: parse_square_class(at, p)? })
}

// ---------------------------------------------------------------------------
// Forms

/// `{"p", "diag" | "gram", "label"?}`.
pub fn parse_form(at: At<'_>) -> Result<QuadForm> {
    let p = at.field("p", |a| a.prime())?;
    let q = match (at.has("diag"), at.has("gram")) {
        (true, false) => at.field("diag", |a| {
            let d = a.rationals()?;
            a.check(QuadForm::from_diagonal(&d, p))
        })?,
        (false, true) => at.field("gram", |a| {
            let g = a.matrix()?;
            a.check(QuadForm::new(g, p))
        })?,
        _ => return Err(at.err("give exactly one of \"diag\" or \"gram\"")),
    };
    Ok(match at.opt("label", |a| a.str().map(String::from))? {
        Some(l) => q.with_label(l),
        None => q,
    })
}

pub fn form_json(q: &QuadForm) -> Value {
    let mut m = Map::new();
    m.insert("p".into(), json!(q.prime().get()));
    m.insert("gram".into(), matrix_json(q.gram()));
    if let Some(l) = q.label() {
        m.insert("label".into(), json!(l));
    }
    Value::Object(m)
}

pub fn invariants_json(q: &QuadForm) -> Value {
    let inv = q.invariants();
    json!({
        "dim": inv.dim,
        "det": square_class_json(&inv.det),
        "dpm": square_class_json(&inv.dpm),
        "hasse": inv.hasse,
        "witt_index": inv.witt_index,
        "aniso_dim": inv.aniso_dim,
        "isotropic": q.is_isotropic(),
    })
}

// ---------------------------------------------------------------------------
// Local fields and étale algebras

/// `{"p", "poly", "certificate"?}`; without a certificate one is detected.
pub fn parse_field(at: At<'_>) -> Result<LocalFieldDescriptor> {
    let p = at.field("p", |a| a.prime())?;
    let poly = at.field("poly", |a| a.rationals())?;
    let cert = at.opt("certificate", |a| {
        serde_json::from_value::<Certificate>(a.value.clone()).map_err(|e| a.err(e.to_string()))
    })?;
    at.check(match cert {
        Some(c) => LocalFieldDescriptor::new(p, poly, c),
        None => LocalFieldDescriptor::detect(p, poly),
    })
}

pub fn field_json(f: &LocalFieldDescriptor) -> Value {
    json!({
        "p": f.prime().get(),
        "poly": rationals_json(f.poly()),
        "certificate": serde_json::to_value(f.certificate()).expect("unit enum"),
    })
}

fn parse_field_elem(at: At<'_>, f: &LocalFieldDescriptor) -> Result<Vec<Rational>> {
    let mut v = at.rationals()?;
    if v.len() > f.degree() {
        return Err(at.err(format!("at most {} coefficients expected", f.degree())));
    }
    v.resize(f.degree(), Rational::from_integer(0.into()));
    Ok(v)
}

/// List of `{"base": field, "step": "split" | {"d": element}}`.
pub fn parse_algebra(at: At<'_>) -> Result<EtaleAlgebra> {
    let towers = at.each(|t| {
        let base = t.field("base", parse_field)?;
        t.field("step", |s| match s.value {
            Value::String(x) if x == "split" => Ok(FactorTower::split(base.clone())),
            Value::Object(_) => {
                let d = s.field("d", |a| parse_field_elem(a, &base))?;
                s.check(FactorTower::quadratic(base.clone(), d))
            }
            _ => Err(s.err("expected \"split\" or {\"d\": element}")),
        })
    })?;
    at.check(EtaleAlgebra::new(towers))
}

pub fn algebra_json(alg: &EtaleAlgebra) -> Value {
    Value::Array(
        alg.factors()
            .iter()
            .map(|t| {
                let step = match &t.step {
                    Step::Split => json!("split"),
                    Step::Quadratic { d } => json!({ "d": rationals_json(d) }),
                };
                json!({ "base": field_json(&t.base), "step": step })
            })
            .collect(),
    )
}

/// One `[a, b]` pair of coefficient arrays per factor.
pub fn parse_element(at: At<'_>, alg: &EtaleAlgebra) -> Result<AlgebraElement> {
    let factors = alg.factors();
    let parts = at.each_indexed(|i, f| {
        let base = &factors.get(i).ok_or_else(|| f.err("more parts than factors"))?.base;
        let pair = f.each(|c| parse_field_elem(c, base))?;
        <[Vec<Rational>; 2]>::try_from(pair).map_err(|_| f.err("expected a pair [a, b]"))
    })?;
    if parts.len() != factors.len() {
        return Err(at.err(format!("expected {} parts", factors.len())));
    }
    let x = AlgebraElement { parts };
    at.check(alg.check(&x))?;
    Ok(x)
}

pub fn element_json(x: &AlgebraElement) -> Value {
    Value::Array(x.parts.iter().map(|[a, b]| json!([rationals_json(a), rationals_json(b)])).collect())
}

// ---------------------------------------------------------------------------
// Class parameters

/// `{"kind", "algebra", "x", "c"?, "xD"?, "a"?}`.
pub fn parse_class_parameter(at: At<'_>) -> Result<ClassParameter> {
    let kind = at.field("kind", |a| {
        serde_json::from_value::<ClassKind>(a.value.clone()).map_err(|e| a.err(e.to_string()))
    })?;
    let algebra = at.field("algebra", parse_algebra)?;
    let element = at.field("x", |a| parse_element(a, &algebra))?;
    let c = at.opt("c", |a| parse_element(a, &algebra))?;
    let x_d = at.opt("xD", |a| a.rational())?;
    let a = at.opt("a", |a| a.rational())?;
    Ok(ClassParameter { kind, algebra, element, c, x_d, a })
}

pub fn class_parameter_json(param: &ClassParameter) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), serde_json::to_value(param.kind).expect("unit enum"));
    m.insert("algebra".into(), algebra_json(&param.algebra));
    m.insert("x".into(), element_json(&param.element));
    if let Some(c) = &param.c {
        m.insert("c".into(), element_json(c));
    }
    if let Some(x) = &param.x_d {
        m.insert("xD".into(), rational_json(x));
    }
    if let Some(a) = &param.a {
        m.insert("a".into(), rational_json(a));
    }
    Value::Object(m)
}

// ---------------------------------------------------------------------------
// Configurations

/// `{"qV": form, "epsilon": ±1}`.
pub fn parse_ambient(at: At<'_>) -> Result<AmbientSpace> {
    let q = at.field("qV", parse_form)?;
    let eps = at.field("epsilon", |a| a.i64())?;
    if eps != 1 && eps != -1 {
        return Err(at.err("epsilon must be 1 or -1"));
    }
    at.check(AmbientSpace::new(q.gram().clone(), q.prime(), eps as i8))
}

pub fn ambient_json(amb: &AmbientSpace) -> Value {
    json!({
        "qV": { "p": amb.prime().get(), "gram": matrix_json(amb.q()) },
        "epsilon": amb.epsilon(),
    })
}

/// `{"ambient", "X", "Y"}`.
pub fn parse_config(at: At<'_>) -> Result<GsConfig> {
    let ambient = at.field("ambient", parse_ambient)?;
    let x = at.field("X", |a| a.matrix())?;
    let y = at.field("Y", |a| a.matrix())?;
    at.check(GsConfig::new(ambient, x, y))
}

pub fn config_json(c: &GsConfig) -> Value {
    json!({ "ambient": ambient_json(&c.ambient), "X": matrix_json(&c.x), "Y": matrix_json(&c.y) })
}

// ---------------------------------------------------------------------------
// Endoscopic data and formal parameters

pub fn datum_json(d: &EndoscopicDatum) -> Value {
    json!({
        "n_O": d.n_o,
        "n_S": d.n_s,
        "K": etale_json(&d.k),
        "K_split": d.k.is_split(),
        "simple": d.is_simple(),
    })
}

pub fn parse_datum(at: At<'_>, p: Prime) -> Result<EndoscopicDatum> {
    let n_o = at.field("n_O", |a| a.usize())?;
    let n_s = at.field("n_S", |a| a.usize())?;
    let k = at.field("K", |a| parse_quadratic_etale(a, p))?;
    at.check(EndoscopicDatum::new(n_o, n_s, k))
}

fn sign_str(s: Option<Sign>) -> &'static str {
    match s {
        Some(Sign::Plus) => "+1",
        Some(Sign::Minus) => "-1",
        None => "none",
    }
}

/// List of `{"dim", "sign": "+1"|"-1"|"none", "det", "mult", "tag"?}`.
pub fn parse_formal_parameter(at: At<'_>, p: Prime) -> Result<FormalParameter> {
    let cs = at.each(|c| {
        let dim = c.field("dim", |a| a.usize())?;
        let sign = c.field("sign", |a| match a.value {
            Value::String(s) if s == "+1" => Ok(Some(Sign::Plus)),
            Value::String(s) if s == "-1" => Ok(Some(Sign::Minus)),
            Value::String(s) if s == "none" => Ok(None),
            Value::Number(n) if n.as_i64() == Some(1) => Ok(Some(Sign::Plus)),
            Value::Number(n) if n.as_i64() == Some(-1) => Ok(Some(Sign::Minus)),
            _ => Err(a.err("expected \"+1\", \"-1\" or \"none\"")),
        })?;
        let det = c.field("det", |a| parse_quadratic_etale(a, p))?;
        let mult = c.opt("mult", |a| a.usize())?.unwrap_or(1);
        let tag = c.opt("tag", |a| a.str().map(String::from))?.unwrap_or_default();
        Ok(c.check(FormalConstituent::new(dim, sign, det, mult))?.with_tag(tag))
    })?;
    at.check(FormalParameter::new(cs, p))
}

pub fn formal_parameter_json(phi: &FormalParameter) -> Value {
    Value::Array(
        phi.constituents
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("dim".into(), json!(c.dim));
                m.insert("sign".into(), json!(sign_str(c.sign)));
                m.insert("det".into(), etale_json(&c.det_char));
                m.insert("mult".into(), json!(c.mult));
                if !c.tag.is_empty() {
                    m.insert("tag".into(), json!(c.tag));
                }
                Value::Object(m)
            })
            .collect(),
    )
}
