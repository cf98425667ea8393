//! The four commands. Each validates its config, writes its artifacts and
//! returns `Err` with the matching exit class on failure.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ManeuverKind, RankMode, RunConfig};
use super::output::{svg_plot, trajectory_header, trajectory_rows, write_csv, write_text, Series};
use super::CliError;
use crate::control_fields::{
    commutator_maneuver, commutator_scaling, lie_bracket, loglog_slope, rank_certificate, rank_of, Field, RankCertificate,
    ShapeField,
};
use crate::dynamics::{first_domain_exit, integrate, path_summary, IntegrateOptions, TrajectorySample};
use crate::internal_forces::{force_from_shape, forces_along, shape_from_force};
use crate::ode::step_count;
use crate::shape_space::{norm_s, PhysicalConstants};
use crate::strokes::StrokeProgram;

/// Largest moonwalk step: forty steps per fast period.
pub fn moonwalk_max_dt(omega: f64) -> f64 {
    2.0 * PI / (40.0 * omega)
}

/// Tolerated distance of the commutator slope from 2.
pub const SLOPE_TOL: f64 = 0.1;
/// Upper limit of the moonwalk shape gap in the S-norm.
pub const MOONWALK_GAP: f64 = 0.1;

fn write_svg(svg: Option<&Path>, body: String) -> Result<(), CliError> {
    match svg {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Config(format!("svg: {}: {e}", p.display()))),
        None => Ok(()),
    }
}

fn path_series<'a>(label: &'a str, samples: &[TrajectorySample]) -> Series<'a> {
    Series { label, points: samples.iter().map(|s| (s.state.r[0], s.state.r[1])).collect() }
}

fn max_of(samples: &[TrajectorySample], f: impl Fn(&TrajectorySample) -> f64) -> f64 {
    samples.iter().map(f).fold(0.0, f64::max)
}

pub fn simulate(cfg: &RunConfig, out: Option<&Path>, svg: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    if cfg.shape_table.is_none() && cfg.preset_name() == "moonwalk_reverse" && cfg.dt > moonwalk_max_dt(cfg.omega()) {
        return Err(CliError::Config(format!(
            "dt: must be at most 2π/(40Ω) = {:.3e} for moonwalk_reverse, got {}",
            moonwalk_max_dt(cfg.omega()),
            cfg.dt
        )));
    }
    let k = cfg.constants()?;
    let curve = cfg.curve()?;
    let opts = IntegrateOptions { dt: cfg.dt, self_check: cfg.self_check, record_every: cfg.record_every };
    let tr = integrate(curve.as_ref(), cfg.q0(), [cfg.t0, cfg.t_end()], &k, opts)?;
    write_csv(out, &trajectory_header(curve.n_modes()), &trajectory_rows(&tr.samples))?;
    write_svg(svg, svg_plot("center of mass (r1, r2)", &[path_series("r", &tr.samples)], true))?;

    let d = tr.displacement();
    let ps = path_summary(&tr.samples);
    let vol = max_of(&tr.samples, |s| s.vol_drift);
    let cf = max_of(&tr.samples, |s| s.constraint_f_resid);
    eprintln!("displacement  dr1 = {:+.10e}  dr2 = {:+.10e}  dtheta = {:+.10e}", d[0], d[1], d[2]);
    eprintln!(
        "path          diameter = {:.6}  closure gap = {:.6}  centroid winding = {:+.6} turns",
        ps.diameter,
        ps.closure_gap,
        ps.centroid_winding / (2.0 * PI)
    );
    eprintln!("residuals     max vol_drift = {vol:.3e}  max constraintF = {cf:.3e}");
    check_ceiling("vol_drift", vol, cfg.ceilings.vol_drift)?;
    check_ceiling("constraintF_resid", cf, cfg.ceilings.constraint_f)?;
    match first_domain_exit(&tr.samples) {
        Some(t) if cfg.require_domain => Err(CliError::Ceiling(format!("shape leaves the embedding domain at t = {t:.6}"))),
        _ => Ok(()),
    }
}

fn check_ceiling(name: &str, value: f64, ceiling: f64) -> Result<(), CliError> {
    if value > ceiling || value.is_nan() {
        Err(CliError::Ceiling(format!("{name} = {value:.3e} exceeds {ceiling:.3e}")))
    } else {
        Ok(())
    }
}

pub fn forces(cfg: &RunConfig, out: Option<&Path>, svg: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let k = cfg.constants()?;
    let curve = cfg.curve()?;
    let span = [cfg.t0, cfg.t_end()];
    let series = forces_along(curve.as_ref(), span, cfg.dt, &k)?;
    let dim = 2 * curve.n_modes();
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("F{i}")));
    let rows: Vec<Vec<f64>> = series.iter().map(|(t, f)| std::iter::once(*t).chain(f.iter().copied()).collect()).collect();
    write_csv(out, &header, &rows)?;
    let names: Vec<String> = (1..=dim).map(|i| format!("F{i}")).collect();
    let plots: Vec<Series> = (0..dim).map(|i| Series { label: &names[i], points: series.iter().map(|(t, f)| (*t, f[i])).collect() }).collect();
    write_svg(svg, svg_plot("internal forces", &plots, false))?;

    for (i, name) in names.iter().enumerate() {
        let m = series.iter().map(|(_, f)| f[i].abs()).fold(0.0, f64::max);
        eprintln!("max |{name}| = {m:.6e}");
    }
    if cfg.round_trip {
        if cfg.shape_table.is_some() {
            return Err(CliError::Config("round_trip: needs a preset stroke".into()));
        }
        let err = force_round_trip(&cfg.stroke()?, span, cfg.dt, &k)?;
        eprintln!("round trip    max shape error = {err:.3e}");
        check_ceiling("round-trip error", err, cfg.ceilings.round_trip)?;
    }
    Ok(())
}

/// Feed the forces of `stroke` back into the shape equation from the same
/// initial data and return the largest deviation of the recovered shape.
pub fn force_round_trip(stroke: &StrokeProgram, span: [f64; 2], dt: f64, k: &PhysicalConstants) -> Result<f64, CliError> {
    let driver = stroke.clone();
    let mut force = |t: f64| {
        let (c, cd, cdd) = driver.sample(t);
        force_from_shape(&c, &cd, &cdd, k).unwrap_or_else(|_| vec![f64::NAN; c.len()])
    };
    let (c0, cd0, _) = stroke.clone().sample(span[0]);
    let path = shape_from_force(&mut force, &c0, &cd0, span, dt, k)?;
    let reference = stroke.clone();
    Ok(path
        .iter()
        .map(|s| s.c.iter().zip(reference.sample(s.t).0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max))
}

#[derive(Debug, Serialize)]
pub struct RankEntry {
    pub mu: f64,
    pub rho: f64,
    /// The claim needs a nonzero shape; such points carry no certificate.
    pub outside_domain_of_claim: bool,
    pub full: bool,
    pub conditioning: f64,
    pub certificate: Option<RankCertificate>,
}

#[derive(Debug, Serialize)]
pub struct RankReport {
    pub schema: &'static str,
    pub mode: RankMode,
    pub seed: u64,
    pub all_full: bool,
    pub entries: Vec<RankEntry>,
}

/// Shape points `(±x, 0, ±x, 0)` on the sphere of radius `mu`.
pub fn symmetric_points(mu: f64) -> [Vec<f64>; 2] {
    let x = mu / 3f64.sqrt();
    [vec![x, 0.0, x, 0.0], vec![-x, 0.0, -x, 0.0]]
}

pub fn lifted_generators(k: PhysicalConstants) -> Vec<Field> {
    (1..=4).map(|i| Field::config(ShapeField::two_mode(i), k)).collect()
}

pub fn rank_report(cfg: &RunConfig) -> Result<RankReport, CliError> {
    cfg.validate()?;
    if cfg.n_modes.is_some_and(|n| n != 2) {
        return Err(CliError::Config("n_modes: rank certificates use the two-mode fields, N must be 2".into()));
    }
    if let Some(p) = cfg.rank.points.iter().find(|p| p.len() != 4) {
        return Err(CliError::Config(format!("rank.points: each point needs 4 shape axes, got {}", p.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base = cfg.constants()?;
    let draws: Vec<(f64, PhysicalConstants)> = if cfg.rank.draws == 0 {
        vec![(cfg.mu, base)]
    } else {
        (0..cfg.rank.draws)
            .map(|_| {
                let mu = rng.gen_range(0.1..0.9);
                let rho = rng.gen_range(0.2..2.0);
                Ok((mu, PhysicalConstants::new(cfg.rho_f, rho * cfg.rho_f, mu)?))
            })
            .collect::<Result<_, crate::Error>>()?
    };
    let x1 = Field::Shape(ShapeField::two_mode(1));
    let x2 = Field::Shape(ShapeField::two_mode(2));
    let shape_family = [x1.clone(), x2.clone(), Field::bracket(&x1, &x2)];
    let mut entries = Vec::new();
    for (mu, k) in draws {
        let points: Vec<Vec<f64>> = if !cfg.rank.points.is_empty() {
            cfg.rank.points.clone()
        } else if cfg.rank.mode == RankMode::Config {
            symmetric_points(mu).to_vec()
        } else {
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = crate::shape_space::norm_t_sq(&v).sqrt();
            vec![v.iter().map(|x| x * mu / n).collect()]
        };
        for c in points {
            let rho = k.ratio();
            if c.iter().all(|&v| v == 0.0) {
                entries.push(RankEntry { mu, rho, outside_domain_of_claim: true, full: false, conditioning: 0.0, certificate: None });
                continue;
            }
            let cert = match cfg.rank.mode {
                RankMode::Config => {
                    let x: Vec<f64> = cfg.q0.iter().chain(&c).copied().collect();
                    rank_certificate(&lifted_generators(k), &x, 3, cfg.rank.max_len, cfg.rank.tol)
                }
                RankMode::Shape => rank_of(&shape_family, &c, 0, cfg.rank.tol, 2),
            };
            entries.push(RankEntry {
                mu,
                rho,
                outside_domain_of_claim: false,
                full: cert.full(),
                conditioning: cert.conditioning(),
                certificate: Some(cert),
            });
        }
    }
    let all_full = entries.iter().filter(|e| !e.outside_domain_of_claim).all(|e| e.full);
    Ok(RankReport { schema: "amoeba.rank/v1", mode: cfg.rank.mode, seed: cfg.seed, all_full, entries })
}

pub fn rank(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let report = rank_report(cfg)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
    write_text(out, &json)?;
    let worst = report.entries.iter().filter(|e| e.certificate.is_some()).map(|e| e.conditioning).fold(f64::INFINITY, f64::min);
    eprintln!("{} points, all full rank: {}, worst conditioning {worst:.3e}", report.entries.len(), report.all_full);
    if report.all_full {
        Ok(())
    } else {
        Err(CliError::Ceiling("rank deficient at some point".into()))
    }
}

#[derive(Debug, Serialize)]
pub struct MoonwalkReport {
    pub omega: f64,
    pub dt_base: f64,
    pub dt_fast: f64,
    pub delta_r1_base: f64,
    pub delta_r1_reverse: f64,
    pub opposite_signs: bool,
    /// `sup_t ‖c_reverse(t) − c_base(t)‖_S` on the fast grid.
    pub shape_gap_s: f64,
}

/// Base and high-frequency moonwalk runs on one grid, the fast run
/// refined so that its step obeys [`moonwalk_max_dt`].
pub fn moonwalk(cfg: &RunConfig) -> Result<(MoonwalkReport, Vec<Vec<f64>>), CliError> {
    let k = cfg.constants()?;
    let omega = cfg.omega();
    let span = [cfg.t0, cfg.t1.unwrap_or(cfg.t0 + 4.0 * PI)];
    if !(cfg.dt > 0.0) || !(span[1] > span[0]) {
        return Err(CliError::Config(format!("dt / t1: need dt > 0 and t1 > t0, got dt = {}", cfg.dt)));
    }
    let base = StrokeProgram::preset("moonwalk_base")?.with_mu(cfg.mu);
    let fast = StrokeProgram::preset("moonwalk_reverse")?.with_mu(cfg.mu).with_omega(omega);
    let n = step_count(span[0], span[1], cfg.dt);
    let h = (span[1] - span[0]) / n as f64;
    let m = (h / moonwalk_max_dt(omega)).ceil().max(1.0) as usize;
    let hf = h / m as f64;
    let tb = integrate(&base, cfg.q0(), span, &k, IntegrateOptions::new(h))?;
    let tf = integrate(&fast, cfg.q0(), span, &k, IntegrateOptions { dt: hf, self_check: false, record_every: m })?;

    let mut gap = 0.0f64;
    for i in 0..=n * m {
        let t = span[0] + i as f64 * hf;
        let d: Vec<f64> = base.sample(t).0.iter().zip(fast.sample(t).0).map(|(a, b)| a - b).collect();
        gap = gap.max(norm_s(&d));
    }
    let rows = tb
        .samples
        .iter()
        .zip(&tf.samples)
        .map(|(a, b)| vec![a.t, a.state.r[0], a.state.r[1], a.state.theta, b.state.r[0], b.state.r[1], b.state.theta])
        .collect();
    let (db, df) = (tb.displacement()[0], tf.displacement()[0]);
    let report = MoonwalkReport {
        omega,
        dt_base: h,
        dt_fast: hf,
        delta_r1_base: db,
        delta_r1_reverse: df,
        opposite_signs: db * df < 0.0,
        shape_gap_s: gap,
    };
    Ok((report, rows))
}

#[derive(Debug, Serialize)]
pub struct CommutatorReport {
    pub pair: [usize; 2],
    pub epsilon: f64,
    pub cycles: usize,
    /// `|r_end − r_0| / cycles`.
    pub net_drift_per_cycle: f64,
    /// Mean `|Δr|` over single phases.
    pub mean_phase_excursion: f64,
    pub inefficiency_ratio: f64,
    /// Rows `(ε, shape drift after one cycle, drift/ε²)`.
    pub scaling: Vec<[f64; 3]>,
    pub slope: f64,
    /// `|[X_j, X_i](c0)|`, the predicted limit of drift/ε².
    pub bracket_norm: f64,
}

pub fn commutator(cfg: &RunConfig) -> Result<(CommutatorReport, Vec<TrajectorySample>), CliError> {
    let mc = &cfg.maneuver;
    let [i, j] = mc.pair;
    if !(1..=4).contains(&i) || !(1..=4).contains(&j) || i == j {
        return Err(CliError::Config(format!("maneuver.pair: need two distinct indices in 1..=4, got {:?}", mc.pair)));
    }
    if mc.c0.len() != 4 || mc.c0.iter().all(|&v| v == 0.0) {
        return Err(CliError::Config("maneuver.c0: need a nonzero shape with 4 axes".into()));
    }
    if !(mc.epsilon > 0.0) || mc.substeps == 0 || mc.epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(CliError::Config("maneuver.epsilon: phase lengths and substeps must be positive".into()));
    }
    let k = cfg.constants()?;
    let fields: Vec<ShapeField> = (1..=4).map(ShapeField::two_mode).collect();
    let pair = (i - 1, j - 1);
    let man = commutator_maneuver(&fields, pair, mc.epsilon, mc.cycles, cfg.q0(), &mc.c0, &k, mc.substeps)?;
    let dist = |a: &crate::dynamics::RigidState, b: &crate::dynamics::RigidState| (a.r[0] - b.r[0]).hypot(a.r[1] - b.r[1]);
    let (first, last) = (man.cycle_states[0], *man.cycle_states.last().unwrap());
    let net = if mc.cycles > 0 { dist(&first, &last) / mc.cycles as f64 } else { 0.0 };
    let phases: Vec<f64> = man.phase_states.windows(2).map(|w| dist(&w[0], &w[1])).collect();
    let excursion = if phases.is_empty() { 0.0 } else { phases.iter().sum::<f64>() / phases.len() as f64 };
    let table = commutator_scaling(&fields, pair, &mc.epsilons, &mc.c0, &k, mc.substeps)?;
    let slope = if table.len() >= 2 { loglog_slope(&table) } else { f64::NAN };
    let b = lie_bracket(&Field::Shape(fields[pair.1]), &Field::Shape(fields[pair.0]), &mc.c0);
    let report = CommutatorReport {
        pair: mc.pair,
        epsilon: mc.epsilon,
        cycles: mc.cycles,
        net_drift_per_cycle: net,
        mean_phase_excursion: excursion,
        inefficiency_ratio: if excursion > 0.0 { net / excursion } else { 0.0 },
        scaling: table.iter().map(|&(e, d)| [e, d, d / (e * e)]).collect(),
        slope,
        bracket_norm: b.iter().map(|v| v * v).sum::<f64>().sqrt(),
    };
    Ok((report, man.samples))
}

pub fn maneuver(cfg: &RunConfig, out: Option<&Path>, svg: Option<&Path>) -> Result<(), CliError> {
    match cfg.maneuver.kind {
        ManeuverKind::Moonwalk => {
            let (rep, rows) = moonwalk(cfg)?;
            write_text(out, &serde_json::to_string_pretty(&rep).map_err(|e| CliError::Config(e.to_string()))?)?;
            if let Some(p) = &cfg.maneuver.trajectory_csv {
                let header: Vec<String> =
                    ["t", "r1_base", "r2_base", "theta_base", "r1_reverse", "r2_reverse", "theta_reverse"].map(String::from).to_vec();
                write_csv(Some(p), &header, &rows)?;
            }
            let plots = [
                Series { label: "base", points: rows.iter().map(|r| (r[0], r[1])).collect() },
                Series { label: "reverse", points: rows.iter().map(|r| (r[0], r[4])).collect() },
            ];
            write_svg(svg, svg_plot("r1(t): base vs high-frequency", &plots, false))?;
            eprintln!(
                "dr1 base = {:+.6}  dr1 reverse = {:+.6}  shape gap = {:.4}",
                rep.delta_r1_base, rep.delta_r1_reverse, rep.shape_gap_s
            );
            if !rep.opposite_signs || rep.shape_gap_s >= MOONWALK_GAP {
                return Err(CliError::Ceiling("moonwalk: no sign flip under the shape-gap limit".into()));
            }
            Ok(())
        }
        ManeuverKind::Commutator => {
            let (rep, samples) = commutator(cfg)?;
            write_text(out, &serde_json::to_string_pretty(&rep).map_err(|e| CliError::Config(e.to_string()))?)?;
            if let Some(p) = &cfg.maneuver.trajectory_csv {
                write_csv(Some(p), &trajectory_header(2), &trajectory_rows(&samples))?;
            }
            write_svg(svg, svg_plot("commutator loop (r1, r2)", &[path_series("r", &samples)], true))?;
            eprintln!("eps        drift         drift/eps^2");
            for r in &rep.scaling {
                eprintln!("{:<10} {:<13.6e} {:.6}", r[0], r[1], r[2]);
            }
            eprintln!("slope = {:.4}  inefficiency = {:.4}", rep.slope, rep.inefficiency_ratio);
            if rep.scaling.len() >= 2 && (rep.slope - 2.0).abs() > SLOPE_TOL {
                return Err(CliError::Ceiling(format!("commutator slope {:.4} is not 2 ± {SLOPE_TOL}", rep.slope)));
            }
            Ok(())
        }
    }
}
