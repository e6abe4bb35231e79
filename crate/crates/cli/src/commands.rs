use std::fs;

use nalgebra::DVector;
use sdg_core::chart::Point;
use sdg_core::connections::{
    ambrose_singer_check, curvature_coboundary, curvature_oracle, matrix_log_along,
    parallel_transport, ConnectionData, Curve, MatrixGroupSpec, BRACKET_SIGN, CURVATURE_SCALE,
};
use sdg_core::distributions::{
    check_integral_patch, involutivity_report, trace_leaf, Distribution, PatchMode,
};
use sdg_core::dsl::{parse, Program};
use sdg_core::forms::conventions::{compare_d, compare_wedge};
use sdg_core::forms::{index_tuples, ClassicalForm, CombinatorialForm, Multicovector};
use sdg_core::sampling::BoxDomain;
use sdg_core::Error;

use crate::output::{Report, Value};
use crate::{Cli, Cmd, Failure, Group, Mode};

type Outcome = Result<(Report, bool), Failure>;

const HOLONOMY_STEPS: usize = 10_000;
const AMBROSE_SINGER_STEPS: usize = 2_000;
const LEAF_STEPS: usize = 100;

fn load(cli: &Cli) -> Result<Program, Failure> {
    let path = cli
        .common
        .file
        .as_ref()
        .ok_or_else(|| Failure::Usage("--file is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => {
            Failure::Usage(format!("file not found: {}", path.display()))
        }
        _ => Failure::Usage(format!("cannot read {}: {e}", path.display())),
    })?;
    parse(&text).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))
}

fn numbers(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad number '{}'", t.trim())))
        })
        .collect()
}

fn vectors(text: &str, dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let v = numbers(s)?;
            if v.len() != dim {
                return Err(Failure::Usage(format!(
                    "expected {dim} coordinates in '{s}'"
                )));
            }
            Ok(v)
        })
        .collect()
}

/// `--at` points, or quasi-random samples from `--box`.
fn points(cli: &Cli, dim: usize) -> Result<Vec<Point>, Failure> {
    match &cli.common.at {
        Some(at) => Ok(vectors(at, dim)?
            .into_iter()
            .map(Point::new)
            .collect::<Result<_, Error>>()?),
        None => {
            Ok(BoxDomain::parse(&cli.common.bounds, dim)?
                .sample(cli.common.samples, cli.common.seed))
        }
    }
}

fn single_point(cli: &Cli, dim: usize) -> Result<Point, Failure> {
    match &cli.common.at {
        Some(_) => {
            let mut pts = points(cli, dim)?;
            if pts.len() != 1 {
                return Err(Failure::Usage("--at must give exactly one point".into()));
            }
            Ok(pts.remove(0))
        }
        None => Ok(Point::origin(dim)),
    }
}

fn range(text: &str) -> Result<(f64, f64), Failure> {
    let b = BoxDomain::parse(text, 1)?;
    Ok(b.bounds()[0])
}

fn label(t: &[usize], names: &[String]) -> String {
    if t.is_empty() {
        "1".into()
    } else {
        t.iter()
            .map(|&i| format!("d{}", names[i]))
            .collect::<Vec<_>>()
            .join("^")
    }
}

fn coefficients(m: &Multicovector, names: &[String]) -> Value {
    Value::Obj(
        index_tuples(m.dim, m.degree)
            .iter()
            .map(|t| (label(t, names), Value::Num(m.coefficient(t))))
            .collect(),
    )
}

fn ratio(comb: &Multicovector, class: &Multicovector, tol: f64) -> Value {
    match comb.ratio_to(class, tol) {
        Some(r) => Value::Num(r),
        None => Value::Str("undefined".into()),
    }
}

fn point_value(p: &Point) -> Value {
    p.coords().into()
}

/// Side-by-side comparison rows; ok iff zero-equivalence held everywhere.
fn comparison(
    prog: &Program,
    pts: &[Point],
    tol: f64,
    f: impl Fn(&Point) -> Result<(Multicovector, Multicovector), Error>,
) -> Result<(Value, bool), Failure> {
    let mut rows = Vec::new();
    let mut ok = true;
    for p in pts {
        let (comb, class) = f(p)?;
        let agree = (comb.max_abs() <= tol) == (class.max_abs() <= tol);
        ok &= agree;
        let mut r = Report::new();
        r.put("at", point_value(p))
            .put("combinatorial", comb.render(&prog.vars))
            .put("classical", class.render(&prog.vars))
            .put(
                "combinatorial_coefficients",
                coefficients(&comb, &prog.vars),
            )
            .put("classical_coefficients", coefficients(&class, &prog.vars))
            .put("ratio", ratio(&comb, &class, tol))
            .put("zero_agreement", agree);
        rows.push(r.into_value());
    }
    Ok((Value::List(rows), ok))
}

fn form_text(prog: &Program, f: &ClassicalForm) -> String {
    f.display(&prog.vars).to_string()
}

fn group(g: Group, size: usize) -> MatrixGroupSpec {
    match g {
        Group::General => MatrixGroupSpec::general(size),
        Group::So => MatrixGroupSpec::special_orthogonal(size),
    }
}

fn connection(prog: &Program, name: &str, g: Group) -> Result<ConnectionData, Failure> {
    Ok(prog.connection_in(name, |m| group(g, m))?)
}

fn parse_loop(text: &str, dim: usize) -> Result<Curve, Failure> {
    let rest = text.trim().strip_prefix("circle").ok_or_else(|| {
        Failure::Usage(format!(
            "unsupported loop '{text}', expected 'circle cx,cy,r'"
        ))
    })?;
    let v = numbers(rest.trim())?;
    if v.len() != 3 || dim < 2 {
        return Err(Failure::Usage(
            "circle takes cx,cy,r in a chart of dimension >= 2".into(),
        ));
    }
    let mut center = vec![0.0; dim];
    center[0] = v[0];
    center[1] = v[1];
    Ok(Curve::Circle {
        center,
        radius: v[2],
    })
}

fn parse_curve(prog: &Program, name: &str, t_range: &str) -> Result<Curve, Failure> {
    let (params, patch) = prog.patch(name)?;
    if params.len() != 1 {
        return Err(Failure::Usage(format!(
            "curve '{name}' must have exactly one parameter"
        )));
    }
    let (t0, t1) = range(t_range)?;
    Ok(Curve::Expr {
        comps: patch.map().to_vec(),
        t0,
        t1,
    })
}

pub fn run(cli: &Cli) -> Outcome {
    let prog = load(cli)?;
    let tol = cli.common.tol;
    let mut r = Report::new();
    let ok = match &cli.cmd {
        Cmd::D { form } => {
            let f = prog.form(form)?;
            let pts = points(cli, prog.dim)?;
            let (rows, ok) = comparison(&prog, &pts, tol, |p| compare_d(&f, p, tol))?;
            r.put("form", form_text(&prog, &f))
                .put("derivative", form_text(&prog, &f.exterior_derivative()))
                .put("points", rows);
            ok
        }
        Cmd::Wedge { forms } => {
            if forms.len() != 2 {
                return Err(Failure::Usage(
                    "wedge takes exactly two --form names".into(),
                ));
            }
            let a = prog.form(&forms[0])?;
            let b = prog.form(&forms[1])?;
            let pts = points(cli, prog.dim)?;
            let (rows, ok) = comparison(&prog, &pts, tol, |p| compare_wedge(&a, &b, p, tol))?;
            r.put("left", form_text(&prog, &a))
                .put("right", form_text(&prog, &b))
                .put("wedge", form_text(&prog, &a.wedge(&b)?))
                .put("points", rows);
            ok
        }
        Cmd::Eval { form, vectors: vs } => {
            let f = prog.form(form)?;
            let p = single_point(cli, prog.dim)?;
            let vs = match vs {
                Some(v) => vectors(v, prog.dim)?,
                None => Vec::new(),
            };
            if vs.len() != f.degree() {
                return Err(Failure::Usage(format!(
                    "a {}-form needs {} vectors, got {}",
                    f.degree(),
                    f.degree(),
                    vs.len()
                )));
            }
            let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
            let comb = CombinatorialForm::from_classical(&f);
            let extracted = comb.extract_classical(&p, tol)?;
            r.put("form", form_text(&prog, &f))
                .put("at", point_value(&p))
                .put("generic_value", comb.eval_generic(&p)?.to_string())
                .put("extracted", extracted.render(&prog.vars))
                .put("combinatorial", extracted.apply(&refs)?)
                .put("classical", f.at(&p)?.apply(&refs)?);
            true
        }
        Cmd::CheckInvolutive { dist } => {
            let d = prog.distribution(dist)?;
            let pts = points(cli, prog.dim)?;
            let rep = involutivity_report(&d, &pts, tol)?;
            let word = |b: bool| if b { "involutive" } else { "non-involutive" };
            let agree = rep.agree();
            let comb = rep.combinatorial_verdict();
            let class = rep.classical_verdict();
            r.put(
                "summary",
                format!(
                    "combinatorial: {}; classical: {}; {}",
                    word(comb),
                    word(class),
                    if agree {
                        "tests agree"
                    } else {
                        "tests disagree"
                    }
                ),
            )
            .put("combinatorial", word(comb))
            .put("classical", word(class))
            .put("agree", agree)
            .put("representation", representation(&d));
            let rows = rep
                .samples
                .iter()
                .zip(&rep.combinatorial)
                .zip(&rep.classical)
                .map(|((p, c), k)| {
                    let mut row = Report::new();
                    row.put("at", point_value(p))
                        .put("combinatorial_residual", c.residual);
                    if let Some(v) = k.ideal {
                        row.put("ideal_residual", v.residual);
                    }
                    if let Some(v) = k.bracket {
                        row.put("bracket_residual", v.residual);
                    }
                    row.into_value()
                })
                .collect();
            r.put("samples", Value::List(rows));
            comb && class && agree
        }
        Cmd::CheckIntegral { dist, patch, mode } => {
            let d = prog.distribution(dist)?;
            let (params, p) = prog.patch(patch)?;
            let pts = points(cli, params.len())?;
            let rep = check_integral_patch(&d, &p, &pts, tol)?;
            let mode = match mode {
                Mode::Weak => PatchMode::Weak,
                Mode::Strong => PatchMode::Strong,
            };
            r.put(
                "mode",
                if mode == PatchMode::Weak {
                    "weak"
                } else {
                    "strong"
                },
            )
            .put("weak", rep.weak)
            .put("strong", rep.strong)
            .put("tangent_residual", rep.tangent_residual)
            .put("fiber_residual", rep.fiber_residual)
            .put("patch_dim", p.param_dim())
            .put("rank", d.rank());
            rep.verdict(mode)
        }
        Cmd::Curvature { conn, group: g } => {
            let c = connection(&prog, conn, *g)?;
            let pts = points(cli, prog.dim)?;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for p in &pts {
                let cob = curvature_coboundary(&c, p)?;
                let ora = curvature_oracle(&c, p, BRACKET_SIGN)?.scaled(CURVATURE_SCALE);
                let scale = cob.max_abs().max(ora.max_abs()).max(1.0);
                worst = worst.max(cob.distance(&ora) / scale);
                let comps = cob
                    .components
                    .iter()
                    .zip(&ora.components)
                    .map(|(((i, j), f), (_, o))| {
                        let mut e = Report::new();
                        e.put(
                            "component",
                            format!("d{}^d{}", prog.vars[*i], prog.vars[*j]),
                        )
                        .put("coboundary", f)
                        .put("oracle", o);
                        e.into_value()
                    })
                    .collect();
                let mut row = Report::new();
                row.put("at", point_value(p))
                    .put("components", Value::List(comps))
                    .put("non_top_residual", cob.residual);
                rows.push(row.into_value());
            }
            r.put("scale", CURVATURE_SCALE)
                .put("bracket_sign", BRACKET_SIGN)
                .put("max_relative_difference", worst)
                .put("points", Value::List(rows));
            worst <= tol
        }
        Cmd::Holonomy {
            conn,
            loop_spec,
            curve,
            t_range,
            group: g,
        } => {
            let c = connection(&prog, conn, *g)?;
            let path = match (loop_spec, curve) {
                (Some(l), None) => parse_loop(l, prog.dim)?,
                (None, Some(name)) => parse_curve(&prog, name, t_range)?,
                _ => {
                    return Err(Failure::Usage(
                        "give exactly one of --loop or --curve".into(),
                    ))
                }
            };
            let steps = cli.common.steps.unwrap_or(HOLONOMY_STEPS);
            let t = parallel_transport(&c, &path, steps)?;
            let log = matrix_log_along(&t)?;
            r.put("steps", steps).put("holonomy", &t.g).put("log", &log);
            if let Some(a) = t.angle {
                r.put("angle", a);
            }
            let closed = path
                .start()?
                .iter()
                .zip(path.end()?)
                .all(|(a, b)| (a - b).abs() <= 1e-12);
            r.put("closed", closed);
            true
        }
        Cmd::AmbroseSinger {
            conn,
            loops,
            curves,
            t_range,
            group: g,
        } => {
            let c = connection(&prog, conn, *g)?;
            let mut paths = loops
                .iter()
                .map(|l| parse_loop(l, prog.dim))
                .collect::<Result<Vec<_>, _>>()?;
            for name in curves {
                paths.push(parse_curve(&prog, name, t_range)?);
            }
            if paths.is_empty() {
                return Err(Failure::Usage("give at least one --loop or --curve".into()));
            }
            let base = single_point(cli, prog.dim)?;
            let samples = BoxDomain::parse(&cli.common.bounds, prog.dim)?
                .sample(cli.common.samples, cli.common.seed);
            let steps = cli.common.steps.unwrap_or(AMBROSE_SINGER_STEPS);
            let rep = ambrose_singer_check(&c, &base, &paths, &samples, steps, tol.max(1e-6))?;
            r.put("basepoint", point_value(&base))
                .put("algebra_dim", rep.algebra_dim)
                .put("group_algebra_dim", rep.group_algebra_dim)
                .put("full", rep.full())
                .put("loop_residuals", rep.loop_residuals.clone())
                .put("inclusion", rep.inclusion);
            rep.inclusion
        }
        Cmd::Leaf {
            dist,
            direction,
            step_size,
        } => {
            let d = prog.distribution(dist)?;
            let start = single_point(cli, prog.dim)?;
            let dir = numbers(direction)?;
            let steps = cli.common.steps.unwrap_or(LEAF_STEPS);
            let pts = trace_leaf(&d, &start, &dir, steps, *step_size, None, tol)?;
            let drift = kernel_drift(&d, &pts)?;
            r.put("steps", steps)
                .put("step_size", *step_size)
                .put("points", Value::List(pts.iter().map(point_value).collect()));
            if let Some(v) = drift {
                r.put("max_kernel_residual", v);
            }
            true
        }
    };
    Ok((r, ok))
}

fn representation(d: &Distribution) -> &'static str {
    match (d.span().is_some(), d.kernel().is_some()) {
        (true, true) => "span+kernel",
        (true, false) => "span",
        _ => "kernel",
    }
}

/// Largest `|ω_i(x_k)(x_{k+1} - x_k)|` along the trace.
fn kernel_drift(d: &Distribution, pts: &[Point]) -> Result<Option<f64>, Failure> {
    let Some(forms) = d.kernel() else {
        return Ok(None);
    };
    let mut worst: f64 = 0.0;
    for w in pts.windows(2) {
        let step =
            DVector::from_column_slice(w[1].coords()) - DVector::from_column_slice(w[0].coords());
        for f in forms {
            worst = worst.max(f.at(&w[0])?.apply(&[step.as_slice()])?.abs());
        }
    }
    Ok(Some(worst))
}
