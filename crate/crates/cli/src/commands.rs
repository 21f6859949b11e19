use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use eqlift::cocycle::{coboundary, intertwine_check, LiftParams};
use eqlift::counterexample::verify_gl_matrices;
use eqlift::domains::folner_ratio;
use eqlift::kernel::{equivariance_defect, kernel_fourier, kernel_mass, kernel_quadrature};
use eqlift::lifting::{domain_average, lift_eval};
use eqlift::moebius::BoundaryMap;
use eqlift::poisson::{poisson_sign, poisson_transform};
use eqlift::{
    BoundaryFunction, BoundaryPoint, GroupElement, HalfPlanePoint, KernelSpec, PiecewiseElement, TupleFunction, Window,
};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::report::Report;

/// A projective element `"a,b,c,d"` or a piecewise one `"bp:a,b,c,d;..."`.
#[derive(Debug, Clone)]
pub enum Element {
    Projective(GroupElement),
    Piecewise(PiecewiseElement),
}

impl FromStr for Element {
    type Err = eqlift::Error;

    fn from_str(s: &str) -> eqlift::Result<Self> {
        if s.contains(':') {
            Ok(Element::Piecewise(s.parse()?))
        } else {
            Ok(Element::Projective(s.parse()?))
        }
    }
}

/// Named tuple functions: `orientation`, `orientation-slice`,
/// `sign-product:p`, `const:p,c`, or any one-variable boundary function.
pub fn tuple_function(name: &str) -> anyhow::Result<TupleFunction> {
    let name = name.trim();
    Ok(match name {
        "orientation" => TupleFunction::orientation(),
        "orientation-slice" => TupleFunction::orientation_slice(),
        _ => {
            if let Some(p) = name.strip_prefix("sign-product:") {
                TupleFunction::sign_product(p.trim().parse().context("sign-product arity")?)?
            } else if let Some(rest) = name.strip_prefix("const:").filter(|r| r.contains(',')) {
                let (p, c) = rest.split_once(',').unwrap();
                TupleFunction::constant(
                    p.trim().parse().context("const arity")?,
                    c.trim().parse().context("const value")?,
                )?
            } else {
                TupleFunction::from_boundary(&BoundaryFunction::named(name)?)
            }
        }
    })
}

fn base_report(command: &str, cfg: &RunConfig) -> Report {
    let mut r = Report::new(command, cfg.seed);
    r.param("tolerance", cfg.tolerance);
    r
}

pub fn lift(
    cfg: &RunConfig,
    function: &str,
    xi: BoundaryPoint,
    window: Window,
    schedule: &[f64],
) -> anyhow::Result<Report> {
    let phi = BoundaryFunction::named(function)?;
    let est = lift_eval(&phi, xi, schedule, window)?;
    let mut r = base_report("lift", cfg);
    r.param("function", phi.name())
        .param("xi", xi)
        .param("window", window.to_string())
        .param("schedule", schedule);
    for ((t, v), e) in est.t_values.iter().zip(&est.estimates).zip(&est.quadrature_errors) {
        r.row(json!({"t": t, "estimate": v, "error": e, "fit_residual": null}));
        if *e > cfg.tolerance {
            r.errors.push(format!(
                "quadrature error {e:e} at t = {t} exceeds tolerance {:e}",
                cfg.tolerance
            ));
            r.status = 2;
        }
    }
    r.row(json!({"t": "inf", "estimate": est.extrapolated, "error": est.error_estimate, "fit_residual": est.fit_residual}));
    Ok(r)
}

pub fn domain_avg(
    cfg: &RunConfig,
    function: &str,
    xi: BoundaryPoint,
    window: Window,
    ts: &[f64],
) -> anyhow::Result<Report> {
    let phi = BoundaryFunction::named(function)?;
    let mut r = base_report("domain-average", cfg);
    r.param("function", phi.name())
        .param("xi", xi)
        .param("window", window.to_string())
        .param("samples", cfg.samples);
    for &t in ts {
        let d = domain_average(&phi, xi, t, window, cfg.samples, cfg.seed)?;
        r.row(json!({"t": t, "value": d.value, "std_error": d.std_error, "samples": d.samples}));
    }
    Ok(r)
}

pub fn kernel(cfg: &RunConfig, ts: &[f64], xs: &[f64], window: Window, check: bool) -> anyhow::Result<Report> {
    let mut r = base_report("kernel", cfg);
    r.param("window", window.to_string()).param("quadrature_check", check);
    for &t in ts {
        let spec = KernelSpec::new(t, window)?;
        for &x in xs {
            let value = spec.density(x);
            let mut row = Map::new();
            row.insert("t".into(), json!(t));
            row.insert("x".into(), json!(x));
            row.insert("value".into(), json!(value));
            if check {
                let q = kernel_quadrature(&spec, x)?;
                if (q - value).abs() > cfg.tolerance {
                    r.errors.push(format!(
                        "closed form and quadrature differ by {:e} at t = {t}, x = {x}",
                        (q - value).abs()
                    ));
                    r.status = 2;
                }
                row.insert("quadrature".into(), json!(q));
            }
            r.row(Value::Object(row));
        }
    }
    Ok(r)
}

pub fn kernel_fft(cfg: &RunConfig, ts: &[f64], omegas: &[f64]) -> anyhow::Result<Report> {
    let mut r = base_report("kernel-fft", cfg);
    r.param("window", Window::SYMMETRIC.to_string());
    for &t in ts {
        for &w in omegas {
            r.row(json!({"t": t, "omega": w, "value": kernel_fourier(t, w)?}));
        }
    }
    Ok(r)
}

pub fn defect(
    cfg: &RunConfig,
    element: &Element,
    xi: BoundaryPoint,
    window: Window,
    ts: &[f64],
) -> anyhow::Result<Report> {
    fn rows<M: BoundaryMap>(
        g: &M,
        xi: BoundaryPoint,
        window: Window,
        ts: &[f64],
        r: &mut Report,
    ) -> anyhow::Result<()> {
        let mut prev: Option<f64> = None;
        for &t in ts {
            let d = equivariance_defect(g, xi, &KernelSpec::new(t, window)?)?;
            let ratio = prev.filter(|_| d > 0.0).map(|p| p / d);
            r.row(json!({"t": t, "defect": d, "ratio_to_previous": ratio}));
            prev = Some(d);
        }
        Ok(())
    }
    let mut r = base_report("defect", cfg);
    r.param("xi", xi).param("window", window.to_string());
    match element {
        Element::Projective(g) => {
            r.param("g", g.to_string());
            rows(g, xi, window, ts, &mut r)?;
        }
        Element::Piecewise(g) => {
            let desc: Vec<String> = g.pieces().iter().map(|(bp, h)| format!("{bp}:{h}")).collect();
            r.param("g", desc.join(";"));
            rows(g, xi, window, ts, &mut r)?;
        }
    }
    Ok(r)
}

pub fn folner(cfg: &RunConfig, g: &GroupElement, t: f64, window: Window) -> anyhow::Result<Report> {
    let f = folner_ratio(g, t, window, cfg.samples, cfg.seed)?;
    let mut r = base_report("folner", cfg);
    r.param("g", g.to_string())
        .param("t", t)
        .param("window", window.to_string())
        .param("samples", cfg.samples);
    r.row(json!({
        "g": g.to_string(), "t": t, "window": window.to_string(), "samples": f.samples,
        "seed": cfg.seed, "ratio": f.ratio, "std_error": f.std_error,
    }));
    Ok(r)
}

fn point_from_json(v: &Value) -> anyhow::Result<BoundaryPoint> {
    match v {
        Value::Number(n) => Ok(BoundaryPoint::finite(n.as_f64().context("bad number")?)?),
        Value::String(s) => Ok(s.parse()?),
        other => bail!("bad boundary point {other}"),
    }
}

/// Entries are bare arrays of points (using the default function) or
/// objects `{"function": name, "tuple": [...]}`.
fn parse_tuples(text: &str, default: &str) -> anyhow::Result<Vec<(String, Vec<BoundaryPoint>)>> {
    let doc: Value = serde_json::from_str(text).context("tuple file is not valid JSON")?;
    let Value::Array(entries) = doc else {
        bail!("tuple file must hold a JSON list")
    };
    entries
        .iter()
        .map(|e| {
            let (name, pts) = match e {
                Value::Array(pts) => (default.to_string(), pts),
                Value::Object(o) => {
                    let name = o.get("function").and_then(Value::as_str).unwrap_or(default).to_string();
                    let pts = o
                        .get("tuple")
                        .and_then(Value::as_array)
                        .context("entry without a 'tuple' list")?;
                    (name, pts)
                }
                other => bail!("bad tuple entry {other}"),
            };
            Ok((name, pts.iter().map(point_from_json).collect::<anyhow::Result<_>>()?))
        })
        .collect()
}

pub fn cocycle_check(cfg: &RunConfig, input: &Path, default: &str, t: f64, window: Window) -> anyhow::Result<Report> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let tuples = parse_tuples(&text, default)?;
    let params = LiftParams {
        t,
        window,
        samples: cfg.samples,
        seed: cfg.seed,
    };
    let mut r = base_report("cocycle-check", cfg);
    r.param("input", input.display().to_string())
        .param("default_function", default)
        .param("t", t)
        .param("window", window.to_string())
        .param("samples", cfg.samples);
    let mut passed = 0;
    for (name, tuple) in &tuples {
        let f = tuple_function(name)?;
        let rep = intertwine_check(&f, tuple, &params)?;
        let label: Vec<String> = tuple.iter().map(ToString::to_string).collect();
        let label = format!("({})", label.join(","));
        if rep.pass {
            passed += 1;
        } else {
            r.errors.push(format!(
                "{name} {label}: residual {:e} above 3σ = {:e}",
                rep.residual,
                3.0 * rep.sigma
            ));
        }
        r.row(json!({
            "function": name, "tuple": label, "lifted_coboundary": rep.lifted_coboundary,
            "coboundary_of_lift": rep.coboundary_of_lift, "residual": rep.residual, "sigma": rep.sigma, "pass": rep.pass,
        }));
    }
    r.summary = Some(format!("{passed} of {} tuples pass", tuples.len()));
    Ok(r)
}

pub fn verify_gl(cfg: &RunConfig, m: usize) -> anyhow::Result<Report> {
    let report = verify_gl_matrices(m)?;
    let mut r = base_report("verify-gl", cfg);
    r.param("m", m);
    let mut table = vec![];
    for mat in &report.matrices {
        r.row(serde_json::to_value(mat)?);
        for c in &mat.claims {
            let row = json!({
                "j": mat.j, "origin": mat.origin, "label": mat.label, "determinant": mat.determinant,
                "claim": c.claim, "image": c.image, "expected": c.expected, "pass": c.pass,
            });
            table.push(row.as_object().cloned().unwrap_or_default());
        }
    }
    let failing = report.matrices.iter().filter(|m| !m.all_pass).count();
    r.summary = Some(format!(
        "{failing} of {} matrices have a failing claim",
        report.matrices.len()
    ));
    r.table = Some(table);
    Ok(r)
}

struct Check {
    name: &'static str,
    value: f64,
    expected: f64,
    tolerance: f64,
}

pub fn selftest(cfg: &RunConfig) -> anyhow::Result<Report> {
    let sym = Window::SYMMETRIC;
    let sign = BoundaryFunction::sign();
    let zero = BoundaryPoint::Finite(0.0);
    let schedule = [8.0, 16.0, 32.0, 64.0];
    let z = HalfPlanePoint::new(0.5, 1.0)?;

    let lift0 = lift_eval(&sign, zero, &schedule, sym)?;
    let lift_half = lift_eval(&sign, zero, &schedule, Window::new(0.0, 1.0)?)?;
    let worst = |v: &[f64], target: f64| v.iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
    let asym = 0.5 - 2f64.ln() / PI;
    let dd = coboundary(
        &TupleFunction::orientation().coboundary(),
        &[
            BoundaryPoint::Finite(-1.0),
            zero,
            BoundaryPoint::Finite(2.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::Finite(1.0),
        ],
    )?;
    let gl = verify_gl_matrices(4)?;
    let j1 = gl.find(1, "stated").context("missing j=1 matrix")?;
    let j1_failures = j1.failing_claims().count() as f64;
    let spec16 = KernelSpec::new(16.0, sym)?;

    let checks = [
        Check {
            name: "M_1(0) = (e-1)/4",
            value: KernelSpec::new(1.0, sym)?.density(0.0),
            expected: (1f64.exp() - 1.0) / 4.0,
            tolerance: 1e-8,
        },
        Check {
            name: "kernel mass, t = 1",
            value: kernel_mass(&KernelSpec::new(1.0, sym)?)?,
            expected: 1.0,
            tolerance: 1e-8,
        },
        Check {
            name: "kernel mass, t = 5, window [0,1]",
            value: kernel_mass(&KernelSpec::new(5.0, Window::new(0.0, 1.0)?)?)?,
            expected: 1.0,
            tolerance: 1e-8,
        },
        Check {
            name: "Fourier transform at 0",
            value: kernel_fourier(1.0, 0.0)?,
            expected: 1.0,
            tolerance: 1e-12,
        },
        Check {
            name: "closed form vs quadrature, t = 2, x = 3",
            value: KernelSpec::new(2.0, sym)?.density(3.0),
            expected: kernel_quadrature(&KernelSpec::new(2.0, sym)?, 3.0)?,
            tolerance: 1e-7,
        },
        Check {
            name: "lift of sign at 0, max over schedule",
            value: worst(&lift0.estimates, 0.0),
            expected: 0.0,
            tolerance: 1e-8,
        },
        Check {
            name: "lift of sign at 0, window [0,1]",
            value: lift_half.estimates[0],
            expected: asym,
            tolerance: 1e-6,
        },
        Check {
            name: "Poisson transform of 2atan/π at 0.5+i",
            value: poisson_transform(&BoundaryFunction::atanned(), z)?,
            expected: 2.0 / PI * (0.5f64 / 2.0).atan(),
            tolerance: 1e-8,
        },
        Check {
            name: "Poisson transform of sign at 0.5+i",
            value: poisson_transform(&sign, z)?,
            expected: poisson_sign(z),
            tolerance: 1e-8,
        },
        Check {
            name: "translation defect, t = 16",
            value: equivariance_defect(&GroupElement::unipotent(1.0), zero, &spec16)?,
            expected: 0.0,
            tolerance: 1e-9,
        },
        Check {
            name: "identity Følner ratio",
            value: folner_ratio(&GroupElement::IDENTITY, 10.0, sym, 10_000, cfg.seed)?.ratio,
            expected: 1.0,
            tolerance: 0.0,
        },
        Check {
            name: "d∘d of orientation",
            value: dd,
            expected: 0.0,
            tolerance: 0.0,
        },
        Check {
            name: "failing claims of the stated j=1 matrix",
            value: j1_failures,
            expected: 1.0,
            tolerance: 0.0,
        },
    ];

    let mut r = base_report("selftest", cfg);
    let mut failed = 0;
    for c in &checks {
        let pass = (c.value - c.expected).abs() <= c.tolerance;
        if !pass {
            failed += 1;
            r.errors.push(format!("{}: {} vs {}", c.name, c.value, c.expected));
        }
        r.row(
            json!({"check": c.name, "value": c.value, "expected": c.expected, "tolerance": c.tolerance, "pass": pass}),
        );
    }
    r.summary = Some(format!("{} of {} checks pass", checks.len() - failed, checks.len()));
    if failed > 0 {
        r.status = 1;
    }
    Ok(r)
}
