use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;

use super::config::{ExperimentConfig, GeometryChoice, Params};
use super::report::{Cell, Report};
use crate::error::{Error, Result};
use crate::liepoisson::{
    jacobi_residual, lie_poisson_bracket, AlgebroidChart, BasePoly, Coefficient, FiberPolynomial,
    Observable, PhasePoint,
};
use crate::nctorus::{random_trig_poly, semiclassical_bound, semiclassical_error, star, SkewForm, TrigPoly};
use crate::numkit::{derivative_along_vec, loglog_slope, PeriodicGrid, Tolerances};
use crate::poismap::{
    d1_exp, d2_exp, exp_differential, exp_sphere, geodesic_variation_fd, jacobi_dexp, numerical_rank,
    pi_sphere, pi_torus, residual_battery, solve_profile_ode, vertical_derivative_eta, PoissonGeometry,
    RadialProfile, SpherePoint, TangentVec,
};
use crate::weylrn::{band_limited_test_function, commutator_check, SymbolRn};

/// Slack on the semiclassical bound, which is itself a Taylor estimate.
const BOUND_SLACK: f64 = 1e-10;
/// Singular values below this fraction of the largest count as zero.
const RANK_THRESHOLD: f64 = 1e-10;

/// Result of one experiment before anything is written.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub report: Report,
    pub pass: bool,
    pub max_error: f64,
    pub failure: Option<String>,
    pub stdout: Option<String>,
}

impl Evaluation {
    fn new(report: Report, max_error: f64, failure: Option<String>) -> Self {
        Self { report, pass: failure.is_none(), max_error, failure, stdout: None }
    }
}

fn par_map<T: Sync, U: Send>(pool: &ThreadPool, items: &[T], f: impl Fn(&T) -> Result<U> + Sync) -> Result<Vec<U>> {
    pool.install(|| items.par_iter().map(&f).collect())
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn sup3(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    (a - b).amax()
}

pub(crate) fn evaluate(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<Evaluation> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match &cfg.params {
        Params::NctorusStar { eta, a, b, hbar, expect, tol } => nctorus_star(eta, a, b, *hbar, expect.as_ref(), *tol),
        Params::Semiclassical { eta, hbar_list, trials, max_modes, max_freq, slope_tol } => {
            let pairs: Vec<(TrigPoly, TrigPoly)> = (0..*trials)
                .map(|_| {
                    let a = random_trig_poly(&mut rng, eta.dim(), *max_modes, *max_freq);
                    let b = random_trig_poly(&mut rng, eta.dim(), *max_modes, *max_freq);
                    (a, b)
                })
                .collect();
            semiclassical(pool, eta, &pairs, hbar_list, *slope_tol)
        }
        Params::Weyl { grid_size, period, hbar_list, symbol_f, symbol_g, max_deviation, expect_slope, slope_tol } => {
            let grid = PeriodicGrid::new(symbol_f.dim(), *grid_size, *period)?;
            let slope = expect_slope.map(|s| (s, *slope_tol));
            weyl(pool, &grid, symbol_f, symbol_g, hbar_list, *max_deviation, slope)
        }
        Params::SphereOde { a, t0, t1, step, alpha0, tol } => sphere_ode(*a, *t0, *t1, *step, *alpha0, *tol),
        Params::PoissonResidual { geometry, profile, samples, umin, umax, tol, fd_step, expect_poisson } => {
            let geom = match geometry {
                GeometryChoice::Torus(eta) => PoissonGeometry::FlatTorus(eta.clone()),
                GeometryChoice::Sphere => PoissonGeometry::RoundSphere,
            };
            let points: Vec<TangentVec> = (0..*samples)
                .map(|_| {
                    let unorm = if umax > umin { rng.random_range(*umin..=*umax) } else { *umin };
                    geom.sample_tangent(&mut rng, unorm)
                })
                .collect();
            let tols = Tolerances::default().with_fd_step(*fd_step)?;
            poisson_residual(pool, &geom, profile, &points, &tols, *tol, *expect_poisson)
        }
        Params::JacobiCheck { samples, umax, tol, fd_step } => {
            let geom = PoissonGeometry::RoundSphere;
            let cases: Vec<JacobiCase> = (0..*samples)
                .map(|_| {
                    let unorm = rng.random_range(0.0..*umax);
                    let v = geom.sample_tangent(&mut rng, unorm);
                    let dirs = std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU));
                    JacobiCase { v, dirs }
                })
                .collect();
            let tols = Tolerances::default().with_fd_step(*fd_step)?;
            jacobi_check(pool, &cases, &tols, *tol)
        }
        Params::BracketValidate { chart, samples, umax, zmax, tol, fd_step } => {
            let (m, n) = (chart.base_dim(), chart.fiber_dim());
            let cases: Vec<BracketCase> = (0..*samples)
                .map(|_| {
                    let u = (0..m).map(|_| rng.random_range(-*umax..=*umax)).collect();
                    let z = (0..n).map(|_| rng.random_range(-*zmax..=*zmax)).collect();
                    let obs = std::array::from_fn(|_| random_observable(&mut rng, m, n));
                    BracketCase { point: PhasePoint::new(u, z), obs }
                })
                .collect();
            let tols = Tolerances::default().with_fd_step(*fd_step)?;
            bracket_validate(pool, chart, &cases, &tols, *tol)
        }
    }
}

fn nctorus_star(
    eta: &SkewForm,
    a: &TrigPoly,
    b: &TrigPoly,
    hbar: f64,
    expect: Option<&TrigPoly>,
    tol: f64,
) -> Result<Evaluation> {
    let product = star(a, b, eta, hbar)?;
    let mut cols: Vec<String> = (1..=eta.dim()).map(|i| format!("r_{i}")).collect();
    cols.extend(["re".into(), "im".into()]);
    let mut report = Report::new(cols);
    for (r, c) in product.terms() {
        let mut row: Vec<Cell> = r.iter().map(|&k| Cell::Int(k)).collect();
        row.extend([c.re.into(), c.im.into()]);
        report.push(row);
    }
    let (max_error, failure) = match expect {
        Some(e) => {
            let d = product.max_abs_diff(e)?;
            (d, (d > tol).then(|| format!("product differs from `expect` by {d:e} (tol {tol:e})")))
        }
        None => (0.0, None),
    };
    let mut ev = Evaluation::new(report, max_error, failure);
    ev.stdout = Some(product.to_mode_list());
    Ok(ev)
}

fn running_slope(xs: &[f64], ys: &[f64]) -> f64 {
    loglog_slope(xs, ys).unwrap_or(f64::NAN)
}

fn semiclassical(
    pool: &ThreadPool,
    eta: &SkewForm,
    pairs: &[(TrigPoly, TrigPoly)],
    hbars: &[f64],
    slope_tol: f64,
) -> Result<Evaluation> {
    let mut report = Report::new(["hbar", "max_error", "bound", "slope_running"]);
    let mut failure = None;
    let mut maxima = Vec::with_capacity(hbars.len());
    for (i, &hbar) in hbars.iter().enumerate() {
        let per_trial = par_map(pool, pairs, |(a, b)| {
            Ok((semiclassical_error(a, b, eta, hbar)?, semiclassical_bound(a, b, eta, hbar)?))
        })?;
        for (t, (e, bound)) in per_trial.iter().enumerate() {
            if *e > bound * (1.0 + BOUND_SLACK) && failure.is_none() {
                failure = Some(format!("trial {t} at hbar = {hbar}: error {e:e} exceeds bound {bound:e}"));
            }
        }
        let worst = max(per_trial.iter().map(|p| p.0));
        maxima.push(worst);
        let slope = running_slope(&hbars[..=i], &maxima);
        report.push(vec![hbar.into(), worst.into(), max(per_trial.iter().map(|p| p.1)).into(), slope.into()]);
    }
    // a commutative configuration has no remainder and hence no slope
    if failure.is_none() && hbars.len() >= 2 && maxima.iter().any(|&m| m > 0.0) {
        let slope = running_slope(hbars, &maxima);
        if !((slope - 2.0).abs() <= slope_tol) {
            failure = Some(format!("fitted slope {slope} is outside 2 +- {slope_tol}"));
        }
    }
    Ok(Evaluation::new(report, max(maxima), failure))
}

fn weyl(
    pool: &ThreadPool,
    grid: &PeriodicGrid,
    f: &SymbolRn,
    g: &SymbolRn,
    hbars: &[f64],
    max_deviation: Option<f64>,
    expect_slope: Option<(f64, f64)>,
) -> Result<Evaluation> {
    let h = band_limited_test_function(grid);
    let chart = AlgebroidChart::tangent(grid.dim())?;
    let devs = par_map(pool, hbars, |&hbar| commutator_check(f, g, hbar, &h, grid, &chart))?;
    let mut report = Report::new(["hbar", "deviation", "slope"]);
    for (i, (&hbar, &d)) in hbars.iter().zip(&devs).enumerate() {
        report.push(vec![hbar.into(), d.into(), running_slope(&hbars[..=i], &devs[..=i]).into()]);
    }
    let mut failure = None;
    if let Some(limit) = max_deviation {
        if let Some((i, d)) = devs.iter().enumerate().find(|(_, d)| **d > limit) {
            failure = Some(format!("deviation {d:e} at hbar = {} exceeds {limit:e}", hbars[i]));
        }
    }
    if let (None, Some((expect, tol))) = (&failure, expect_slope) {
        let slope = running_slope(hbars, &devs);
        if !((slope - expect).abs() <= tol) {
            failure = Some(format!("fitted slope {slope} is outside {expect} +- {tol}"));
        }
    }
    Ok(Evaluation::new(report, max(devs.iter().copied()), failure))
}

fn sphere_ode(a: f64, t0: f64, t1: f64, step: f64, alpha0: f64, tol: f64) -> Result<Evaluation> {
    let sol = solve_profile_ode(a, t0, alpha0, t1, step)?;
    let mut report = Report::new(["t", "alpha", "closed_form", "deviation"]);
    let mut worst = (0.0, t0);
    for (t, alpha) in sol.trajectory.iter() {
        let exact = sol.closed_form(t);
        let dev = (alpha - exact).abs();
        if dev > worst.0 {
            worst = (dev, t);
        }
        report.push(vec![t.into(), alpha.into(), exact.into(), dev.into()]);
    }
    let failure = (worst.0 > tol).then(|| format!("deviation {:e} at t = {} exceeds {tol:e}", worst.0, worst.1));
    Ok(Evaluation::new(report, worst.0, failure))
}

type MapFn = Box<dyn Fn(&[f64], &[f64]) -> Result<Vec<f64>> + Send + Sync>;

fn poisson_map(geom: &PoissonGeometry, profile: &RadialProfile) -> MapFn {
    match geom {
        PoissonGeometry::FlatTorus(_) => Box::new(|x: &[f64], u: &[f64]| pi_torus(x, u)),
        PoissonGeometry::RoundSphere => {
            let profile = profile.clone();
            Box::new(move |x: &[f64], u: &[f64]| {
                let p = SpherePoint::normalized([x[0], x[1], x[2]])?;
                Ok(pi_sphere(&p, &Vector3::from_column_slice(u), &profile)?.to_array().to_vec())
            })
        }
    }
}

fn poisson_residual(
    pool: &ThreadPool,
    geom: &PoissonGeometry,
    profile: &RadialProfile,
    points: &[TangentVec],
    tols: &Tolerances,
    tol: f64,
    expect_poisson: bool,
) -> Result<Evaluation> {
    let pi = poisson_map(geom, profile);
    let residuals = par_map(pool, points, |v| residual_battery(&pi, v, geom, tols))?;
    let mut report = Report::new(["sample_id", "unorm", "residual"]);
    for (i, (v, r)) in points.iter().zip(&residuals).enumerate() {
        report.push(vec![i.into(), v.norm().into(), (*r).into()]);
    }
    let worst = max(residuals.iter().copied());
    let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
    report.push(vec!["max".into(), Cell::Empty, worst.into()]);
    report.push(vec!["mean".into(), Cell::Empty, mean.into()]);
    let failure = if expect_poisson {
        residuals
            .iter()
            .position(|r| *r > tol)
            .map(|i| format!("sample {i}: residual {:e} exceeds {tol:e}", residuals[i]))
    } else {
        residuals
            .iter()
            .position(|r| !(*r >= tol))
            .map(|i| format!("sample {i}: residual {:e} is below {tol:e} but the map is expected not to be Poisson", residuals[i]))
    };
    Ok(Evaluation::new(report, worst, failure))
}

struct JacobiCase {
    v: TangentVec,
    /// Angles of the fiber, base, horizontal and vertical test directions.
    dirs: [f64; 4],
}

fn jacobi_check(pool: &ThreadPool, cases: &[JacobiCase], tols: &Tolerances, tol: f64) -> Result<Evaluation> {
    let geom = PoissonGeometry::RoundSphere;
    let step = tols.fd_step;
    let rows = par_map(pool, cases, |case| {
        let (p, u) = case.v.sphere_parts()?;
        let [e1, e2] = p.tangent_frame();
        let [h, eps, hor, ver] = case.dirs.map(|a| e1 * a.cos() + e2 * a.sin());
        let fd1 = derivative_along_vec(|s| Ok(exp_sphere(&p, &(u + h * s)).to_array().to_vec()), step)?;
        let d1 = sup3(&d1_exp(&p, &u, &h)?, &Vector3::from_column_slice(&fd1));
        let d2 = sup3(&d2_exp(&p, &u, &eps)?, &geodesic_variation_fd(&p, &u, &eps, &Vector3::zeros(), step)?);
        let jac = sup3(&jacobi_dexp(&p, &u, &hor, &ver)?, &geodesic_variation_fd(&p, &u, &hor, &ver, step)?);
        let deta = vertical_derivative_eta(&case.v, &geom, tols)?.amax();
        let rank = numerical_rank(&exp_differential(&p, &u)?, RANK_THRESHOLD);
        Ok(([case.v.norm(), d1, d2, jac, deta], rank))
    })?;
    let mut report = Report::new(["sample_id", "unorm", "d1_exp_err", "d2_exp_err", "jacobi_err", "deta_norm"]);
    let mut failure = None;
    let mut worst: f64 = 0.0;
    for (i, (vals, rank)) in rows.iter().enumerate() {
        let errs = &vals[1..];
        worst = worst.max(max(errs.iter().copied()));
        if failure.is_none() {
            if let Some(k) = errs.iter().position(|e| !(*e <= tol)) {
                let what = ["d1_exp", "d2_exp", "jacobi", "deta"][k];
                failure = Some(format!("sample {i}: {what} error {:e} exceeds {tol:e}", errs[k]));
            } else if *rank != 2 {
                failure = Some(format!("sample {i}: differential of Exp has rank {rank}, expected 2"));
            }
        }
        let mut row = vec![Cell::from(i)];
        row.extend(vals.iter().map(|&x| Cell::from(x)));
        report.push(row);
    }
    Ok(Evaluation::new(report, worst, failure))
}

struct BracketCase {
    point: PhasePoint,
    obs: [FiberPolynomial; 3],
}

/// Quadratic in `Z` with coefficients of degree at most two in `u`.
fn random_observable<R: Rng>(rng: &mut R, m: usize, n: usize) -> FiberPolynomial {
    let mut c = || rng.random_range(-1.0..=1.0);
    let mut base = BasePoly::constant(m, c());
    let linear = |base: &mut BasePoly, degree: u32, c: &mut dyn FnMut() -> f64| {
        for h in 0..m {
            let mut e = vec![0; m];
            e[h] = degree;
            base.add_term(e, c());
        }
    };
    linear(&mut base, 1, &mut c);
    linear(&mut base, 2, &mut c);
    let mut p = FiberPolynomial::from_base(m, n, Coefficient::from(base));
    for j in 0..n {
        let mut coef = BasePoly::constant(m, c());
        linear(&mut coef, 1, &mut c);
        let term = FiberPolynomial::from_base(m, n, Coefficient::from(coef)).mul(&FiberPolynomial::fiber_coordinate(m, n, j));
        p = p.add(&term);
        for k in j..n {
            let zz = FiberPolynomial::fiber_coordinate(m, n, j).mul(&FiberPolynomial::fiber_coordinate(m, n, k));
            p = p.add(&zz.scale(c()));
        }
    }
    p
}

fn bracket_validate(
    pool: &ThreadPool,
    chart: &AlgebroidChart,
    cases: &[BracketCase],
    tols: &Tolerances,
    tol: f64,
) -> Result<Evaluation> {
    let rows = par_map(pool, cases, |case| {
        let [f, g, h] = &case.obs;
        let obs = |p: &FiberPolynomial| Observable::Poly(p.clone());
        let br = |a: &FiberPolynomial, b: &FiberPolynomial| lie_poisson_bracket(&obs(a), &obs(b), &case.point, chart, tols);
        let (u, z) = (&case.point.u, &case.point.z);
        let antisymmetry = (br(f, g)? + br(g, f)?).abs();
        let leibniz = (br(f, &g.mul(h))? - br(f, g)? * h.eval(u, z) - g.eval(u, z) * br(f, h)?).abs();
        let jacobi = jacobi_residual(chart, f, g, h, &case.point, tols)?;
        Ok([antisymmetry, jacobi, leibniz])
    })?;
    let mut report = Report::new(["sample_id", "antisymmetry", "jacobi_residual", "leibniz"]);
    let mut failure = None;
    for (i, vals) in rows.iter().enumerate() {
        if failure.is_none() {
            if let Some(k) = vals.iter().position(|e| !(*e <= tol)) {
                let what = ["antisymmetry", "Jacobi", "Leibniz"][k];
                failure = Some(format!("sample {i}: {what} residual {:e} exceeds {tol:e}", vals[k]));
            }
        }
        let mut row = vec![Cell::from(i)];
        row.extend(vals.iter().map(|&x| Cell::from(x)));
        report.push(row);
    }
    let worst = max(rows.iter().flatten().copied());
    Ok(Evaluation::new(report, worst, failure))
}

pub(crate) fn build_pool(threads: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter { name: "threads", reason: e.to_string() })
}
