use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use qel_core::balancing::{
    moment_generator, self_consistent_a, t_iterate, weak_chow_certificate, BalanceProblem, BalanceReport, DescentOptions,
    SelfConsistentOptions,
};
use qel_core::exact::{to_f64, ExactPoly};
use qel_core::linalg::{self, CMat};
use qel_core::quantisation::{bergman_csv, matrix_csv};
use qel_core::stability::{
    bergman_expansion_defect, chow_weight, df_invariant, equivariant_density, fit_expansions, futaki_integral, inner_product,
    limit_weight_check, relative_df, InnerProductTable,
};
use qel_core::{HermitianForm, LevelData, TorusGenerator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{ModeSpec, StartSpec};
use crate::context::{q_string, Context};
use crate::error::CliError;
use crate::manifest::{csv_header, Status};

/// Files and status of one sub-run; `row` feeds the task's summary table.
pub struct Output {
    pub files: Vec<(String, String)>,
    pub status: Status,
    pub row: Option<String>,
}

impl Output {
    fn ok(files: Vec<(String, String)>) -> Self {
        Self { files, status: Status::Ok, row: None }
    }
}

pub struct SubRun {
    pub k: Option<u32>,
    pub result: Result<Output, CliError>,
    pub wall_time_s: f64,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}

/// Maps over the k-list on up to `threads` scoped threads, keeping k order.
fn par_map<T: Send>(ks: &[u32], threads: usize, f: impl Fn(u32) -> T + Sync) -> Vec<(u32, T, f64)> {
    let threads = threads.clamp(1, ks.len().max(1));
    if threads == 1 {
        return ks
            .iter()
            .map(|&k| {
                let (v, t) = timed(|| f(k));
                (k, v, t)
            })
            .collect();
    }
    let chunk = ks.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = ks
            .chunks(chunk)
            .map(|c| {
                s.spawn(move || {
                    c.iter()
                        .map(|&k| {
                            let (v, t) = timed(|| f(k));
                            (k, v, t)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn report_json(ctx: &Context, task: &str, k: Option<u32>, quantities: Value, diagnostics: Value, exact: Value) -> String {
    let v = json!({
        "task": task,
        "k": k,
        "conventions": qel_core::CONVENTIONS,
        "config_hash": ctx.config_hash,
        "quantities": quantities,
        "diagnostics": diagnostics,
        "exact": exact,
    });
    serde_json::to_string_pretty(&v).expect("report serialises") + "\n"
}

fn csv_table(ctx: &Context, columns: &str, rows: &[String]) -> String {
    let mut s = csv_header(&ctx.config_hash);
    s.push_str(columns);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

fn header_lines(ctx: &Context) -> Vec<String> {
    csv_header(&ctx.config_hash).lines().map(|l| l.trim_start_matches("# ").to_string()).collect()
}

fn e17(x: f64) -> String {
    format!("{x:.17e}")
}

/// Runs one task over the configured levels.
pub fn run_task(ctx: &Context, task: &str, threads: usize) -> Vec<SubRun> {
    match task {
        "balance" => per_k(ctx, threads, |k| balance(ctx, k)),
        "bergman" => {
            with_summary(ctx, per_k(ctx, threads, |k| bergman(ctx, k)), "bergman/expansion.csv", "k,sup_dev,expansion_defect,rawnsley")
        }
        "equiv-rr" => with_summary(ctx, per_k(ctx, threads, |k| equiv_rr(ctx, k)), "equiv_rr/table.csv", "k,lhs,rhs,gap,pointwise_sup"),
        "limit-weight" => limit_weight(ctx, threads),
        other => {
            let (result, wall_time_s) = timed(|| match other {
                "df" => df(ctx),
                "fit" => fit(ctx),
                "chow" => chow(ctx),
                "inner" => inner(ctx),
                "relative-df" => relative(ctx),
                "futaki" => futaki(ctx),
                _ => Err(CliError::Config(format!("unknown task {other:?}"))),
            });
            vec![SubRun { k: None, result, wall_time_s }]
        }
    }
}

fn per_k(ctx: &Context, threads: usize, f: impl Fn(u32) -> Result<Output, CliError> + Sync) -> Vec<SubRun> {
    par_map(&ctx.k_list, threads, f).into_iter().map(|(k, result, wall_time_s)| SubRun { k: Some(k), result, wall_time_s }).collect()
}

fn with_summary(ctx: &Context, mut runs: Vec<SubRun>, path: &str, columns: &str) -> Vec<SubRun> {
    let rows: Vec<String> = runs.iter().filter_map(|r| r.result.as_ref().ok().and_then(|o| o.row.clone())).collect();
    let out = Output::ok(vec![(path.to_string(), csv_table(ctx, columns, &rows))]);
    runs.push(SubRun { k: None, result: Ok(out), wall_time_s: 0.0 });
    runs
}

fn start_form(ctx: &Context, level: &LevelData, salt: u64) -> Result<HermitianForm, CliError> {
    let n = level.n_sections();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed.wrapping_add(1_000_003 * salt).wrapping_add(level.k as u64));
    let random = |rng: &mut ChaCha8Rng| -> Result<HermitianForm, CliError> {
        if ctx.cfg.quadrature.angular > 1 {
            let b = linalg::random_hermitian(n, rng).map(|z| z * 1.5);
            Ok(HermitianForm::new(linalg::hermitian_fn(&b, f64::exp))?)
        } else {
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0f64..1.0).exp()).collect();
            Ok(HermitianForm::from_diagonal(&d)?)
        }
    };
    match (salt, ctx.cfg.start) {
        (0, StartSpec::Hilb) => Ok(level.hilb()?),
        (0, StartSpec::Identity) => Ok(HermitianForm::identity(n)),
        _ => random(&mut rng),
    }
}

fn descent_options(ctx: &Context) -> DescentOptions {
    DescentOptions { tol: ctx.cfg.tolerances.descent, max_iter: ctx.cfg.tolerances.max_iter, armijo: 1e-4 }
}

fn sc_options(ctx: &Context) -> SelfConsistentOptions {
    SelfConsistentOptions { descent: descent_options(ctx), outer_tol: ctx.cfg.tolerances.outer, max_outer: ctx.cfg.tolerances.max_outer }
}

/// Result of one balancing run in any mode.
struct Balanced {
    h: HermitianForm,
    mu: CMat,
    report: Option<BalanceReport>,
    converged: bool,
    residual: f64,
    iterations: usize,
    extra: Value,
}

fn balance_once(ctx: &Context, level: &LevelData, h0: &HermitianForm) -> Result<Balanced, CliError> {
    let from_report = |r: BalanceReport, extra: Value| Balanced {
        h: r.h.clone(),
        mu: r.mu_bar.clone(),
        converged: r.converged,
        residual: r.residual,
        iterations: r.iterations,
        report: Some(r),
        extra,
    };
    Ok(match ctx.cfg.mode {
        ModeSpec::Plain => from_report(BalanceProblem::plain(level.clone()).descend(h0, &descent_options(ctx))?, json!({})),
        ModeSpec::FixedA => {
            let problem = match &ctx.cfg.a_generator {
                Some(s) => BalanceProblem::from_generator(level.clone(), &ctx.resolve(s)?, 2.0 * PI * ctx.cfg.a_scale)?,
                None => {
                    let (_, a) = moment_generator(level)?;
                    BalanceProblem::fixed_a(level.clone(), a.iter().map(|v| v * ctx.cfg.a_scale).collect())?
                }
            };
            let r = problem.descend(h0, &descent_options(ctx))?;
            let critical = (&r.mu_bar - problem.critical_target()).norm();
            let inv = linalg::from_real_diagonal(&problem.m_diag().iter().map(|m| 1.0 / m).collect::<Vec<_>>());
            let literal = (&r.mu_bar - inv).norm();
            from_report(r, json!({ "critical_residual": critical, "literal_residual": literal }))
        }
        ModeSpec::SelfConsistent => {
            let sc = self_consistent_a(level, h0, &sc_options(ctx))?;
            let extra = json!({
                "lambda": sc.lambda,
                "a_op_norm": sc.a_op_norm,
                "rounds": sc.rounds,
                "a_changes": sc.a_changes,
                "fit_remainder": sc.fit.remainder,
            });
            from_report(sc.report, extra)
        }
        ModeSpec::TOperator => {
            let (h, iterations, ok) = t_iterate(level, h0, ctx.cfg.tolerances.descent, ctx.cfg.tolerances.max_iter)?;
            let fs = level.fs(&h)?;
            let mu = fs.centre_of_mass();
            let target = linalg::from_real_diagonal(&vec![fs.balanced_level(); mu.nrows()]);
            let residual = (&mu - &target).norm() / mu.norm();
            let rho = fs.bergman(&mu)?;
            let sup = rho.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
            Balanced { h, mu, report: None, converged: ok, residual, iterations, extra: json!({ "bergman_sup_dev": sup }) }
        }
    })
}

fn balance(ctx: &Context, k: u32) -> Result<Output, CliError> {
    let level = ctx.level(k)?;
    let h0 = start_form(ctx, &level, 0)?;
    let b = balance_once(ctx, &level, &h0)?;
    let stem = format!("balance/k{k:03}");
    let mut files = Vec::new();
    let mut quantities = json!({
        "n_sections": level.n_sections(),
        "h_eigenvalues": b.h.eigenvalues(),
        "mu_bar_eigenvalues": linalg::eigenvalues(&b.mu),
    });
    let mut diagnostics = json!({
        "mode": ctx.cfg.mode,
        "converged": b.converged,
        "residual": b.residual,
        "iterations": b.iterations,
        "mode_data": b.extra,
    });
    if let Some(r) = &b.report {
        quantities["a"] = json!(r.a);
        quantities["c_a"] = json!(r.c_a);
        quantities["recovered_c"] = json!(r.recovered.c);
        quantities["recovered_lambda"] = json!(&r.recovered.lambda[..level.dim]);
        diagnostics["recovered_remainder"] = json!(r.recovered.remainder);
        diagnostics["bergman_sup_dev"] = json!(r.bergman_sup_dev);
        let rows: Vec<String> = r
            .energy_trace
            .iter()
            .zip(&r.residual_trace)
            .enumerate()
            .map(|(i, (e, res))| format!("{i},{},{}", e17(*e), e17(*res)))
            .collect();
        files.push((format!("{stem}_trace.csv"), csv_table(ctx, "iteration,energy,residual", &rows)));
        if matches!(ctx.cfg.mode, ModeSpec::FixedA | ModeSpec::SelfConsistent) && r.h.is_diagonal() {
            let cert = weak_chow_certificate(r, &level, ctx.cfg.tolerances.certificate, ctx.cfg.tolerances.span)?;
            let blocks: Vec<Value> = cert
                .blocks
                .iter()
                .map(|bl| json!({ "weight": bl.weight, "b": bl.b, "spread": bl.spread, "indices": bl.indices }))
                .collect();
            let v = json!({
                "k": k,
                "verdict": cert.verdict,
                "blocks": blocks,
                "eigen_mismatch": cert.eigen_mismatch,
                "constancy_defect": cert.constancy_defect,
                "torus_remainder": cert.torus_remainder,
                "tolerance": ctx.cfg.tolerances.certificate,
                "span_tolerance": ctx.cfg.tolerances.span,
            });
            files.push((format!("{stem}_certificate.json"), serde_json::to_string_pretty(&v)? + "\n"));
        }
    }
    if ctx.cfg.multi_start > 0 {
        let mut starts = Vec::new();
        for i in 1..=ctx.cfg.multi_start {
            let h0 = start_form(ctx, &level, i as u64)?;
            let other = balance_once(ctx, &level, &h0)?;
            let dist = (&other.mu - &b.mu).norm() / b.mu.norm();
            starts.push(json!({ "start": i, "converged": other.converged, "residual": other.residual, "mu_bar_distance": dist }));
        }
        diagnostics["multi_start"] = json!(starts);
    }
    let header = header_lines(ctx);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    files.push((format!("{stem}_h.csv"), matrix_csv(b.h.matrix(), &header)));
    files.insert(0, (format!("{stem}.json"), report_json(ctx, "balance", Some(k), quantities, diagnostics, json!({}))));
    let status = if b.converged { Status::Ok } else { Status::NotConverged };
    Ok(Output { files, status, row: None })
}

fn bergman(ctx: &Context, k: u32) -> Result<Output, CliError> {
    let level = ctx.level(k)?;
    let hilb = level.hilb()?;
    let berg = level.bergman(&hilb)?;
    let integral = level.quad.integrate_samples(&berg.rho);
    let l2 = (level.quad.integrate_samples(&berg.rho_bar.iter().map(|r| (r - 1.0).powi(2)).collect::<Vec<_>>()) / level.volume).sqrt();
    let sup = berg.sup_deviation(|_| 1.0);
    let defect = bergman_expansion_defect(&level, &ctx.model)?;
    let rawnsley = level.rawnsley_check()?;
    let quantities = json!({ "hilb_diagonal": hilb.diagonal(), "rho_integral": integral, "rho_bar_l2_dev": l2 });
    let diagnostics = json!({ "sup_dev": sup, "expansion_defect": defect, "rawnsley": rawnsley });
    let header = header_lines(ctx);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let files = vec![
        (format!("bergman/k{k:03}.json"), report_json(ctx, "bergman", Some(k), quantities, diagnostics, json!({}))),
        (format!("bergman/k{k:03}.csv"), bergman_csv(&berg, level.dim, &header)),
    ];
    Ok(Output { files, status: Status::Ok, row: Some(format!("{k},{},{},{}", e17(sup), e17(defect), e17(rawnsley))) })
}

fn equiv_rr(ctx: &Context, k: u32) -> Result<Output, CliError> {
    let level = ctx.level(k)?;
    let g = ctx.generator()?;
    let d = equivariant_density(&level, &ctx.model, &g)?;
    let gap = (d.lhs - d.rhs).abs();
    let quantities = json!({ "lhs": d.lhs, "rhs": d.rhs });
    let diagnostics = json!({ "gap": gap, "pointwise_sup": d.pointwise_sup });
    let exact = json!({ "lhs_times_2pi": q_string(&d.lhs_exact) });
    let files = vec![(format!("equiv_rr/k{k:03}.json"), report_json(ctx, "equiv-rr", Some(k), quantities, diagnostics, exact))];
    Ok(Output { files, status: Status::Ok, row: Some(format!("{k},{},{},{},{}", e17(d.lhs), e17(d.rhs), e17(gap), e17(d.pointwise_sup))) })
}

fn poly_strings(p: &ExactPoly) -> Vec<String> {
    p.coeffs.iter().map(q_string).collect()
}

fn df(ctx: &Context) -> Result<Output, CliError> {
    let g = ctx.generator()?;
    let f = fit_expansions(&ctx.polytope, &g, &ctx.exact_levels)?;
    let d = df_invariant(&f);
    let quantities = json!({
        "a0": to_f64(&f.a(0)), "a1": to_f64(&f.a(1)), "b0": to_f64(&f.b(0)), "b1": to_f64(&f.b(1)), "df": to_f64(&d),
    });
    let exact = json!({
        "a0": q_string(&f.a(0)), "a1": q_string(&f.a(1)), "b0": q_string(&f.b(0)), "b1": q_string(&f.b(1)), "df": q_string(&d),
        "lambda": g.lambda.iter().map(q_string).collect::<Vec<_>>(), "shift": q_string(&g.shift),
    });
    Ok(Output::ok(vec![("df/df.json".into(), report_json(ctx, "df", None, quantities, json!({ "levels": ctx.exact_levels }), exact))]))
}

fn fit(ctx: &Context) -> Result<Output, CliError> {
    let g = ctx.generator()?;
    let f = fit_expansions(&ctx.polytope, &g, &ctx.exact_levels)?;
    let quantities = json!({
        "dimension": f.dimension.coeffs.iter().map(to_f64).collect::<Vec<_>>(),
        "trace": f.trace.coeffs.iter().map(to_f64).collect::<Vec<_>>(),
    });
    let exact = json!({ "dimension": poly_strings(&f.dimension), "trace": poly_strings(&f.trace) });
    let mut rows = Vec::new();
    for &k in &ctx.k_list {
        let basis = ctx.polytope.lattice_points(k);
        let tr = g.weights_exact(&basis).iter().fold(qel_core::exact::q(0), |a, b| a + b);
        rows.push(format!("{k},{},{}", basis.len(), q_string(&tr)));
    }
    let diagnostics = json!({ "levels": ctx.exact_levels, "note": "coefficients listed from k^0 upwards" });
    Ok(Output::ok(vec![
        ("fit/fit.json".into(), report_json(ctx, "fit", None, quantities, diagnostics, exact)),
        ("fit/lattice_sums.csv".into(), csv_table(ctx, "k,n_sections,trace", &rows)),
    ]))
}

fn chow(ctx: &Context) -> Result<Output, CliError> {
    let g = ctx.generator()?;
    let f = fit_expansions(&ctx.polytope, &g, &ctx.exact_levels)?;
    let d = df_invariant(&f);
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut exact = Vec::new();
    for &k in &ctx.k_list {
        let c = chow_weight(&f, &ctx.polytope, k);
        values.push(to_f64(&c));
        rows.push(format!("{k},{},{}", e17(to_f64(&c)), e17(to_f64(&(&c - &d)))));
        exact.push(q_string(&c));
    }
    let quantities = json!({ "df": to_f64(&d), "chow": values });
    let exact = json!({ "df": q_string(&d), "chow": exact });
    Ok(Output::ok(vec![
        ("chow/chow.json".into(), report_json(ctx, "chow", None, quantities, json!({ "k": ctx.k_list }), exact)),
        ("chow/chow.csv".into(), csv_table(ctx, "k,chow,chow_minus_df", &rows)),
    ]))
}

fn inner(ctx: &Context) -> Result<Output, CliError> {
    let gens = ctx.generator_table()?;
    let table = InnerProductTable::build(&ctx.polytope, &gens, &ctx.exact_levels)?;
    let excess = table.cauchy_schwarz_excess();
    let floats: Vec<Vec<f64>> = table.values.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let strings: Vec<Vec<String>> = table.values.iter().map(|r| r.iter().map(q_string).collect()).collect();
    let quantities = json!({ "gram": floats });
    let diagnostics =
        json!({ "names": table.names, "cauchy_schwarz_excess": to_f64(&excess), "cauchy_schwarz_holds": excess <= qel_core::exact::q(0) });
    let exact = json!({ "gram": strings, "cauchy_schwarz_excess": q_string(&excess) });
    Ok(Output::ok(vec![("inner/inner.json".into(), report_json(ctx, "inner", None, quantities, diagnostics, exact))]))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn relative(ctx: &Context) -> Result<Output, CliError> {
    let e = ctx.extremal()?;
    let betas: Vec<TorusGenerator> = if e.is_zero { Vec::new() } else { vec![e.chi.clone()] };
    let levels = &ctx.exact_levels;
    let g = ctx.generator()?;
    let value = relative_df(&ctx.polytope, &g, &betas, levels)?;
    let b = ctx.cfg.scan_bound;
    let mut dirs = Vec::new();
    if ctx.polytope.dim() == 1 {
        dirs.extend([vec![-1], vec![1]]);
    } else {
        for x in -b..=b {
            for y in -b..=b {
                if gcd(x, y) == 1 {
                    dirs.push(vec![x, y]);
                }
            }
        }
    }
    let mut rows = Vec::new();
    let mut min = f64::INFINITY;
    for d in &dirs {
        let gd = TorusGenerator::from_integers(d);
        let full = df_invariant(&fit_expansions(&ctx.polytope, &gd, levels)?);
        let rel = relative_df(&ctx.polytope, &gd, &betas, levels)?;
        min = min.min(to_f64(&rel));
        let coords: Vec<String> = d.iter().map(i64::to_string).collect();
        rows.push(format!("{},{},{}", coords.join(","), q_string(&full), q_string(&rel)));
    }
    let cols = if ctx.polytope.dim() == 1 { "a,df,df_rel" } else { "a,b,df,df_rel" };
    let quantities = json!({ "df_rel": to_f64(&value), "scan_min": min });
    let diagnostics = json!({ "extremal_is_zero": e.is_zero, "directions": dirs.len(), "semistable_on_scan": min >= -1e-6 });
    let exact = json!({
        "df_rel": q_string(&value),
        "chi_lambda": e.chi.lambda.iter().map(q_string).collect::<Vec<_>>(),
        "chi_shift": q_string(&e.chi.shift),
        "df_chi_of_chi": if e.is_zero { "0".to_string() } else { q_string(&relative_df(&ctx.polytope, &e.chi, &betas, levels)?) },
    });
    Ok(Output::ok(vec![
        ("relative_df/relative_df.json".into(), report_json(ctx, "relative-df", None, quantities, diagnostics, exact)),
        ("relative_df/scan.csv".into(), csv_table(ctx, cols, &rows)),
    ]))
}

fn futaki(ctx: &Context) -> Result<Output, CliError> {
    let g = ctx.generator()?;
    let fut = futaki_integral(&ctx.model, &ctx.quad, &g);
    let d = df_invariant(&fit_expansions(&ctx.polytope, &g, &ctx.exact_levels)?);
    let df_scaled = to_f64(&d) / (2.0 * PI);
    let quantities = json!({ "futaki": fut, "df_over_2pi": df_scaled });
    let diagnostics = json!({ "gap": (fut - df_scaled).abs() });
    let exact = json!({ "df": q_string(&d) });
    Ok(Output::ok(vec![("futaki/futaki.json".into(), report_json(ctx, "futaki", None, quantities, diagnostics, exact))]))
}

fn limit_weight(ctx: &Context, threads: usize) -> Vec<SubRun> {
    let runs = par_map(&ctx.k_list, threads, |k| -> Result<BalanceReport, CliError> {
        let level = ctx.level(k)?;
        let h0 = start_form(ctx, &level, 0)?;
        Ok(self_consistent_a(&level, &h0, &sc_options(ctx))?.report)
    });
    let mut out = Vec::new();
    let mut reports = Vec::new();
    for (k, r, wall_time_s) in runs {
        let result = match r {
            Ok(rep) => {
                reports.push(rep);
                Ok(Output::ok(Vec::new()))
            }
            Err(e) => Err(e),
        };
        out.push(SubRun { k: Some(k), result, wall_time_s });
    }
    let (result, wall_time_s) = timed(|| -> Result<Output, CliError> {
        if reports.len() != ctx.k_list.len() {
            return Err(CliError::NotConverged("self-consistent runs failed at some levels".into()));
        }
        let beta = match &ctx.cfg.beta {
            Some(s) => ctx.resolve(s)?,
            None => ctx.extremal()?.chi,
        };
        let chi = ctx.extremal()?.chi;
        let lw = limit_weight_check(&reports, &beta)?;
        let target = inner_product(&ctx.polytope, &beta, &chi, &ctx.exact_levels)?;
        let d = df_invariant(&fit_expansions(&ctx.polytope, &beta, &ctx.exact_levels)?);
        let rows: Vec<String> = lw.sequence.iter().map(|(k, v)| format!("{k},{}", e17(*v))).collect();
        let quantities = json!({ "sequence": lw.sequence.iter().map(|s| s.1).collect::<Vec<_>>(), "limit": lw.limit, "inner_with_chi": to_f64(&target), "df": to_f64(&d) });
        let diagnostics = json!({ "gap": (lw.limit - to_f64(&target)).abs(), "mode": "self-consistent" });
        let exact = json!({ "inner_with_chi": q_string(&target), "df": q_string(&d) });
        Ok(Output::ok(vec![
            ("limit_weight/limit.json".into(), report_json(ctx, "limit-weight", None, quantities, diagnostics, exact)),
            ("limit_weight/sequence.csv".into(), csv_table(ctx, "k,value", &rows)),
        ]))
    });
    out.push(SubRun { k: None, result, wall_time_s });
    out
}

/// Short human summary for stderr.
pub fn describe(task: &str, run: &SubRun) -> String {
    let mut s = String::new();
    let _ = write!(s, "{task}");
    if let Some(k) = run.k {
        let _ = write!(s, " k={k}");
    }
    match &run.result {
        Ok(o) => {
            let _ = write!(s, ": {:?} ({} files, {:.3}s)", o.status, o.files.len(), run.wall_time_s);
        }
        Err(e) => {
            let _ = write!(s, ": error: {e}");
        }
    }
    s
}
