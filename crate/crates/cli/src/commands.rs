use std::path::{Path, PathBuf};

use rug::Float;
use serde_json::{json, Value};
use skewrh::moments::Moments;
use skewrh::numerics::{determinant, Complex, Real};
use skewrh::pfafflattice::flow_convergence;
use skewrh::rhp::{
    asymptotic_exponents, det_residual, jump_residuals, second_row_collapse, Parity, RHProblem,
};
use skewrh::skewalg::{gram_residual, pfaffian as pf, skew_family_from_moments, SkewFamily};
use skewrh::zeros::{empirical_distribution, interlacing, roots_many};
use skewrh::PrecisionContext;

use crate::output::{cnum, csv_text, json_text, num, nums, Outputs};
use crate::{CliError, Family, Format, RunConfig};

const ROOT_STEP_TOL: f64 = 1e-20;

fn header(cfg: &RunConfig) -> Value {
    json!({
        "potential": cfg.potential_text,
        "beta": cfg.beta.as_u32(),
        "kmax": cfg.kmax,
        "precision_bits": cfg.ctx.mantissa_bits,
        "digits": cfg.ctx.decimal_digits(),
        "quad_tol": format!("{:e}", cfg.ctx.quad_tol),
        "verify_tol": format!("{:e}", cfg.ctx.verify_tol),
    })
}

fn family(cfg: &RunConfig) -> Result<SkewFamily, CliError> {
    let mo = Moments::new(&cfg.potential, 2 * cfg.kmax + 2, &cfg.ctx)?;
    Ok(skew_family_from_moments(&mo, cfg.beta, cfg.kmax)?)
}

fn single(cfg: &RunConfig, text: String) -> Outputs {
    let mut o = Outputs::default();
    o.add(cfg.out.as_deref(), text);
    o
}

fn f(ctx: &PrecisionContext, x: &Real) -> String {
    ctx.format_real(x)
}

pub fn moments(cfg: &RunConfig, n: Option<usize>) -> Result<Outputs, CliError> {
    let n = n.unwrap_or(2 * cfg.kmax + 2);
    if n == 0 {
        return Err(CliError::Config("--n must be positive".into()));
    }
    let ctx = &cfg.ctx;
    let mo = Moments::new(&cfg.potential, n, ctx)?;
    let m = mo.skew_matrix(cfg.beta, n)?;
    let one_d: Vec<Real> = (0..n)
        .map(|i| mo.m(i).cloned())
        .collect::<skewrh::Result<_>>()?;
    let text = match cfg.format {
        Format::Csv => {
            let mut rows = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    rows.push(vec![
                        "M".into(),
                        i.to_string(),
                        j.to_string(),
                        f(ctx, m.get(i, j)),
                    ]);
                }
            }
            for (i, v) in one_d.iter().enumerate() {
                rows.push(vec!["m".into(), i.to_string(), String::new(), f(ctx, v)]);
            }
            csv_text(&["kind", "i", "j", "value"], &rows)?
        }
        Format::Json => json_text(&json!({
            "config": header(cfg),
            "n": n,
            "skew_moments": (0..n).map(|i| nums(ctx, (0..n).map(|j| m.get(i, j)))).collect::<Vec<_>>(),
            "moments": nums(ctx, &one_d),
        })),
    };
    Ok(single(cfg, text))
}

pub fn polys(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let ctx = &cfg.ctx;
    let fam = family(cfg)?;
    let text = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = (0..fam.len())
                .map(|j| {
                    let mut r = vec![j.to_string(), f(ctx, &fam.h[j / 2])];
                    r.extend(fam.p(j).coeffs().iter().map(|c| f(ctx, c)));
                    r
                })
                .collect();
            csv_text(&["j", "h", "coefficients"], &rows)?
        }
        Format::Json => json_text(&json!({
            "config": header(cfg),
            "polys": (0..fam.len()).map(|j| json!({
                "j": j,
                "coeffs": nums(ctx, fam.p(j).coeffs()),
            })).collect::<Vec<_>>(),
            "h": nums(ctx, &fam.h),
            "gram_residual": num(ctx, &gram_residual(&fam)),
        })),
    };
    Ok(single(cfg, text))
}

pub fn gram(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let ctx = &cfg.ctx;
    let fam = family(cfg)?;
    let g = fam.gram();
    let n = g.rows();
    let res = gram_residual(&fam);
    let text = match cfg.format {
        Format::Csv => {
            let mut rows = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    rows.push(vec![i.to_string(), j.to_string(), f(ctx, &g[(i, j)])]);
                }
            }
            csv_text(&["i", "j", "value"], &rows)?
        }
        Format::Json => json_text(&json!({
            "config": header(cfg),
            "gram": (0..n).map(|i| nums(ctx, (0..n).map(|j| &g[(i, j)]))).collect::<Vec<_>>(),
            "h": nums(ctx, &fam.h),
            "residual": num(ctx, &res),
            "tolerance": format!("{:e}", ctx.verify_tol),
            "pass": res.to_f64() <= ctx.verify_tol,
        })),
    };
    Ok(single(cfg, text))
}

fn hist_path(out: &Path, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "hist.csv",
        Format::Json => "hist.json",
    };
    out.with_extension(ext)
}

pub fn zeros(
    cfg: &RunConfig,
    bins: usize,
    which: Family,
    hist_out: Option<PathBuf>,
) -> Result<Outputs, CliError> {
    let ctx = &cfg.ctx;
    let fam = family(cfg)?;
    let keep = |j: usize| match which {
        Family::Even => j.is_multiple_of(2),
        Family::Odd => j % 2 == 1,
        Family::All => true,
    };
    let idx: Vec<usize> = (1..fam.len()).filter(|&j| keep(j)).collect();
    let polys: Vec<_> = idx.iter().map(|&j| fam.p(j).clone()).collect();
    let reports = roots_many(&polys, ROOT_STEP_TOL)?;
    let report_of = |j: usize| idx.iter().position(|&i| i == j).map(|p| &reports[p]);
    let mut pairs = Vec::new();
    for &j in &idx {
        if let (Some(a), Some(b)) = (report_of(j), report_of(j + 2)) {
            let verdict = match interlacing(a, b) {
                Ok(v) => json!(v),
                Err(e) => json!(e.to_string()),
            };
            pairs.push((j, j + 2, verdict));
        }
    }
    let hist = empirical_distribution(&reports, bins);

    let hist_value = Value::Array(
        hist.iter()
            .map(|b| json!({ "lo": num(ctx, &b.lo), "hi": num(ctx, &b.hi), "mass": num(ctx, &b.mass) }))
            .collect(),
    );
    let mut o = Outputs::default();
    match cfg.format {
        Format::Json => {
            let doc = json!({
                "config": header(cfg),
                "roots": idx.iter().zip(&reports).map(|(j, r)| json!({
                    "j": j,
                    "roots": r.roots.iter().map(|z| cnum(ctx, z)).collect::<Vec<_>>(),
                    "max_imag": num(ctx, &r.max_imag),
                    "residual": num(ctx, &r.residual),
                    "real": r.is_real(),
                })).collect::<Vec<_>>(),
                "interlacing": pairs.iter().map(|(a, b, v)| json!({ "a": a, "b": b, "interlace": v })).collect::<Vec<_>>(),
                "reality_rel_tol": format!("{:e}", skewrh::zeros::REALITY_REL_TOL),
                "histogram": hist_value.clone(),
            });
            o.add(cfg.out.as_deref(), json_text(&doc));
            let target =
                hist_out.or_else(|| cfg.out.as_deref().map(|p| hist_path(p, Format::Json)));
            if let Some(p) = target {
                o.add(
                    Some(&p),
                    json_text(&json!({ "bins": bins, "histogram": hist_value })),
                );
            }
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = idx
                .iter()
                .zip(&reports)
                .map(|(j, r)| {
                    let mut row = vec![j.to_string(), f(ctx, &r.max_imag)];
                    for z in &r.roots {
                        row.push(f(ctx, &z.re));
                        row.push(f(ctx, &z.im));
                    }
                    row
                })
                .collect();
            o.add(
                cfg.out.as_deref(),
                csv_text(&["j", "max_imag", "roots_re_im"], &rows)?,
            );
            let hrows: Vec<Vec<String>> = hist
                .iter()
                .map(|b| vec![f(ctx, &b.lo), f(ctx, &b.hi), f(ctx, &b.mass)])
                .collect();
            let htext = csv_text(&["lo", "hi", "mass"], &hrows)?;
            let target = hist_out.or_else(|| cfg.out.as_deref().map(|p| hist_path(p, Format::Csv)));
            o.add(target.as_deref(), htext);
            let lrows: Vec<Vec<String>> = pairs
                .iter()
                .map(|(a, b, v)| vec![a.to_string(), b.to_string(), v.to_string()])
                .collect();
            if cfg.out.is_none() {
                o.add(None, csv_text(&["a", "b", "interlace"], &lrows)?);
            }
        }
    }
    Ok(o)
}

/// `"1.5"`, `"-2i"`, `"0.3-1e-2i"`.
pub fn parse_complex(s: &str, ctx: &PrecisionContext) -> Result<Complex, CliError> {
    let t = s.trim().replace(' ', "");
    let bad = || CliError::Config(format!("cannot parse complex number {s:?}"));
    let real = |x: &str| ctx.parse_real(x).map_err(|_| bad());
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex::new(real(&t)?, ctx.zero()));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (real(&body[..i])?, &body[i..]),
        None => (ctx.zero(), body),
    };
    let im = match im {
        "" | "+" => ctx.one(),
        "-" => -ctx.one(),
        x => real(x)?,
    };
    Ok(Complex::new(re, im))
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad {what} value {x:?}")))
        })
        .collect()
}

pub fn rh_verify(
    cfg: &RunConfig,
    k: usize,
    parity: &str,
    free_params: Option<&str>,
    rays: &str,
    radii: &str,
    points: usize,
) -> Result<Outputs, CliError> {
    if cfg.format == Format::Csv && cfg.out.is_some() {
        return Err(CliError::Config(
            "rh-verify writes a JSON report; use --format json".into(),
        ));
    }
    let ctx = &cfg.ctx;
    let parity: Parity = parity
        .parse()
        .map_err(|e: skewrh::Error| CliError::Config(e.to_string()))?;
    let fp: Vec<Complex> = match free_params {
        Some(s) if !s.trim().is_empty() => s
            .split(',')
            .map(|x| parse_complex(x, ctx))
            .collect::<Result<_, _>>()?,
        _ => Vec::new(),
    };
    if parity == Parity::Even && !fp.is_empty() {
        return Err(CliError::Config(
            "the even problem has no free parameters".into(),
        ));
    }
    let rays = parse_f64_list(rays, "ray")?;
    let radii = parse_f64_list(radii, "radius")?;
    let problem = RHProblem {
        potential: cfg.potential.clone(),
        k,
        parity,
        free_params: fp.clone(),
    };
    let sol = problem.solve(ctx).map_err(|e| match e {
        skewrh::Error::InvalidInput(s) => CliError::Config(s),
        e => CliError::Numeric(e),
    })?;

    let xs: Vec<Real> = (0..points)
        .map(|i| ctx.real(-2.0 + 4.0 * (i as f64 + 0.37) / points.max(1) as f64))
        .collect();
    let jumps = jump_residuals(&sol, &xs)?;
    let mut fits = Vec::new();
    for &theta in &rays {
        let fit = asymptotic_exponents(&sol, theta, &radii)?;
        let (diag, off) = fit.deviations();
        fits.push(json!({
            "theta": theta,
            "exponent_matrix": fit.raw,
            "normalized": fit.normalized,
            "diagonal_deviation": diag,
            "off_diagonal_excess": off,
            "pass": fit.matches(0.1),
        }));
    }
    let zs: Vec<Complex> = [
        (0.5, 1.0),
        (-1.5, 0.3),
        (2.0, -2.0),
        (0.0, 5.0),
        (-3.0, -0.7),
    ]
    .iter()
    .map(|&(a, b)| Complex::new(ctx.real(a), ctx.real(b)))
    .collect();
    let det = det_residual(&sol, &zs)?;
    let b0 = if parity == Parity::Odd {
        fp.get(1)
    } else {
        None
    };
    let collapse = second_row_collapse(&sol, b0);
    let worst_jump = jumps.iter().fold(ctx.zero(), |m, r| m.max(r));
    let doc = json!({
        "config": header(cfg),
        "k": k,
        "parity": match parity { Parity::Even => "even", Parity::Odd => "odd" },
        "rows": sol.rows.iter().map(|q| q.coeffs().iter().map(|c| cnum(ctx, c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "jump_points": nums(ctx, &xs),
        "jump_residuals": nums(ctx, &jumps),
        "jump_residual_max": num(ctx, &worst_jump),
        "exponent_fits": fits,
        "target_exponents": sol.target_exponents(),
        "det_residual": num(ctx, &det.residual),
        "det_c_star": cnum(ctx, &det.c_star),
        "alpha_k": cnum(ctx, &sol.alpha),
        "alpha_k_formula": cnum(ctx, &sol.alpha_formula),
        "alpha_k_closed_form": cnum(ctx, &sol.alpha_closed_form),
        "second_row_collapse": num(ctx, &collapse),
        "tolerances": {
            "jump": "1e-15",
            "exponent": 0.1,
            "det": "1e-15",
            "verify_tol": format!("{:e}", ctx.verify_tol),
        },
    });
    Ok(single(cfg, json_text(&doc)))
}

pub fn pfaff_check(
    cfg: &RunConfig,
    j: usize,
    t_step: &str,
    halvings: usize,
    window: usize,
) -> Result<Outputs, CliError> {
    let ctx = &cfg.ctx;
    let t = ctx
        .parse_real(t_step)
        .map_err(|e| CliError::Config(e.to_string()))?;
    if t <= 0 {
        return Err(CliError::Config("--t-step must be positive".into()));
    }
    let (rows, slope) = flow_convergence(&cfg.potential, cfg.beta, j, &t, halvings, window, ctx)?;
    let text = match cfg.format {
        Format::Csv => {
            let r: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        f(ctx, &r.t_step),
                        f(ctx, &r.residual),
                        f(ctx, &r.residual_opposite_sign),
                    ]
                })
                .collect();
            csv_text(&["t_step", "residual", "residual_opposite_sign"], &r)?
        }
        Format::Json => json_text(&json!({
            "config": header(cfg),
            "j": j,
            "rows_compared": rows.first().map(|r| r.rows).unwrap_or(0),
            "table": rows.iter().map(|r| json!({
                "t_step": num(ctx, &r.t_step),
                "residual": num(ctx, &r.residual),
                "residual_opposite_sign": num(ctx, &r.residual_opposite_sign),
            })).collect::<Vec<_>>(),
            "slope": slope,
            "slope_target": 2.0,
            "slope_tolerance": 0.2,
        })),
    };
    Ok(single(cfg, text))
}

pub fn pfaffian(cfg: &RunConfig, n: Option<usize>) -> Result<Outputs, CliError> {
    let ctx = &cfg.ctx;
    let n = n.unwrap_or(2 * cfg.kmax + 2);
    if n == 0 || n % 2 == 1 {
        return Err(CliError::Config("--n must be even and positive".into()));
    }
    let mo = Moments::new(&cfg.potential, n, ctx)?;
    let m = mo.skew_matrix(cfg.beta, n)?;
    let rows: Vec<(usize, Real, Real, Real)> = (2..=n)
        .step_by(2)
        .map(|s| {
            let a = m.entries.leading(s);
            let p = pf(&a);
            let d = determinant(&a);
            let sq = Float::with_val(ctx.prec(), p.square_ref());
            let dev = Float::with_val(ctx.prec(), &sq - &d).abs()
                / Float::with_val(ctx.prec(), d.abs_ref());
            (s, p, d, dev)
        })
        .collect();
    let text = match cfg.format {
        Format::Csv => {
            let r: Vec<Vec<String>> = rows
                .iter()
                .map(|(s, p, d, e)| vec![s.to_string(), f(ctx, p), f(ctx, d), f(ctx, e)])
                .collect();
            csv_text(&["n", "pfaffian", "determinant", "rel_dev_pf2_det"], &r)?
        }
        Format::Json => json_text(&json!({
            "config": header(cfg),
            "minors": rows.iter().map(|(s, p, d, e)| json!({
                "n": s,
                "pfaffian": num(ctx, p),
                "determinant": num(ctx, d),
                "rel_dev_pf2_det": num(ctx, e),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(single(cfg, text))
}
