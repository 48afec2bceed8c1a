use rayon::prelude::*;

use kicktop::classical::phase_portrait;
use kicktop::fault::{self, Fault};
use kicktop::harness::{run_suite, Suite, SuiteConfig};
use kicktop::{coherent_state, report, Angles, DiscordSettings, FloquetParams, Precession, SpinQuantum};

use crate::config::{parse_angle, DiscordGrid, RawConfig, Resolved};
use crate::output::{emit, Csv, Field, CONVENTIONS};
use crate::{ClassicalArgs, CliError, Common, EvolveArgs, StateArgs, SweepArgs, VerifyArgs};

const EVOLVE_KEYS: &[&str] = &[
    "two_j", "p", "k", "t_max", "theta0", "phi0", "measures", "discord_grid", "seed", "out",
];
const SWEEP_KEYS: &[&str] = &[
    "two_j", "p", "r_max", "s", "k_list", "t_max", "theta0", "phi0", "measures", "discord_grid", "seed", "out",
];
const CLASSICAL_KEYS: &[&str] = &["p", "k", "n_initial", "steps", "seed", "out"];
const VERIFY_KEYS: &[&str] = &[
    "seed", "discord_grid", "samples", "s_max", "t_max", "cycles", "scan", "out",
];

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

fn load(common: &Common, mut flags: Vec<(&str, Option<String>)>, allowed: &[&str]) -> Result<Resolved, CliError> {
    let mut raw = match &common.config {
        Some(path) => RawConfig::load(path, allowed)?,
        None => RawConfig::default(),
    };
    flags.push(("seed", s(&common.seed)));
    flags.push(("out", common.out.as_ref().map(|p| p.display().to_string())));
    raw.overlay(&flags, allowed)?;
    Ok(Resolved::new(raw))
}

fn state_flags(a: &StateArgs) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("two_j", s(&a.two_j)),
        ("p", a.p.clone()),
        ("t_max", s(&a.t_max)),
        ("theta0", a.theta0.clone()),
        ("phi0", a.phi0.clone()),
        ("measures", a.measures.clone()),
        ("discord_grid", a.discord_grid.clone()),
    ]
}

/// Everything shared by `evolve` and `sweep`.
struct Run {
    spin: SpinQuantum,
    p: Precession,
    t_max: usize,
    initial: Angles,
    columns: Vec<&'static str>,
    discord: DiscordSettings,
}

impl Run {
    fn resolve(cfg: &mut Resolved, default_grid: DiscordGrid) -> Result<Self, CliError> {
        let spin = cfg.spin(2)?;
        let p = cfg.precession()?;
        let t_max = cfg.t_max(100)?;
        let initial = cfg.initial()?;
        let selected = cfg.measures()?;
        let two_j = spin.two_j();
        let columns: Vec<_> = selected
            .into_iter()
            .filter(|m| match *m {
                "s_vn_2" => two_j >= 3,
                "tangle" => two_j == 3,
                _ => true,
            })
            .collect();
        if columns.is_empty() {
            return Err(CliError::usage(format!("none of the selected measures apply at two_j={two_j}")));
        }
        let discord = cfg.discord_grid(default_grid)?.settings();
        Ok(Run {
            spin,
            p,
            t_max,
            initial,
            columns,
            discord,
        })
    }

    /// One value vector per `t = 0..=t_max`.
    fn series(&self, k: f64) -> Result<Vec<Vec<f64>>, CliError> {
        let params = FloquetParams::new(self.spin, k, self.p).map_err(CliError::from_core)?;
        let psi0 = coherent_state(self.spin, self.initial.theta, self.initial.phi).map_err(CliError::from_core)?;
        let record = kicktop::evolve(params, &psi0, self.t_max).map_err(CliError::from_core)?;
        record
            .states
            .iter()
            .map(|psi| {
                let rep = report(psi, &self.discord).map_err(CliError::from_core)?;
                let fields = rep.fields();
                Ok(self
                    .columns
                    .iter()
                    .map(|c| {
                        fields
                            .iter()
                            .find(|(name, _)| name == c)
                            .and_then(|(_, v)| *v)
                            .unwrap_or(f64::NAN)
                    })
                    .collect())
            })
            .collect()
    }
}

pub fn evolve(a: EvolveArgs) -> Result<u8, CliError> {
    let mut flags = state_flags(&a.state);
    flags.push(("k", a.k.clone()));
    let mut cfg = load(&a.common, flags, EVOLVE_KEYS)?;
    let out = cfg.out();
    let k = cfg.k()?;
    let run = Run::resolve(&mut cfg, DiscordGrid::Fine)?;
    let series = run.series(k.value)?;

    let mut header = vec!["t"];
    header.extend(&run.columns);
    let mut csv = Csv::new("evolve", &cfg.echo, &CONVENTIONS, &header);
    for (t, values) in series.iter().enumerate() {
        let mut row = vec![Field::Int(t as u64)];
        row.extend(values.iter().map(|&v| Field::Float(v)));
        csv.row(&row);
    }
    csv.finish(out.as_deref())?;
    Ok(0)
}

pub fn sweep(a: SweepArgs) -> Result<u8, CliError> {
    let mut flags = state_flags(&a.state);
    flags.push(("r_max", s(&a.r_max)));
    flags.push(("s", s(&a.s)));
    flags.push(("k_list", a.k_list.clone()));
    let mut cfg = load(&a.common, flags, SWEEP_KEYS)?;
    let out = cfg.out();
    let grid = cfg.k_grid()?;
    let run = Run::resolve(&mut cfg, DiscordGrid::Coarse)?;

    // fan out over r; collect keeps r order
    let blocks = grid
        .points()
        .into_par_iter()
        .enumerate()
        .map(|(r, k)| {
            let series = run.series(k)?;
            let mut block = Csv::bare();
            for (t, values) in series.iter().enumerate() {
                let mut row = vec![Field::Int(r as u64), Field::Float(k), Field::Int(t as u64)];
                row.extend(values.iter().map(|&v| Field::Float(v)));
                block.row(&row);
            }
            Ok(block.into_string())
        })
        .collect::<Result<Vec<String>, CliError>>()?;

    let mut header = vec!["r", "k", "t"];
    header.extend(&run.columns);
    let mut csv = Csv::new("sweep", &cfg.echo, &CONVENTIONS, &header);
    for b in &blocks {
        csv.extend(b);
    }
    csv.finish(out.as_deref())?;
    Ok(0)
}

pub fn classical(a: ClassicalArgs) -> Result<u8, CliError> {
    let flags = vec![
        ("p", a.p.clone()),
        ("k", a.k.clone()),
        ("n_initial", s(&a.n_initial)),
        ("steps", s(&a.steps)),
    ];
    let mut cfg = load(&a.common, flags, CLASSICAL_KEYS)?;
    let out = cfg.out();
    let p_text = cfg.raw.get("p").unwrap_or("pi/2").to_string();
    let p = parse_angle(&p_text)?.value;
    cfg.echo.push(("p".into(), p_text));
    let k = cfg.k()?.value;
    let n_initial = cfg.count("n_initial", 64)?;
    let steps = cfg.count("steps", 500)?;
    let seed = cfg.seed()?;
    let portrait = phase_portrait(k, p, n_initial, steps, seed).map_err(CliError::from_core)?;

    let notes = ["angles: theta in [0, pi], phi in (-pi, pi]"];
    let mut csv = Csv::new("classical", &cfg.echo, &notes, &["traj_id", "step", "theta", "phi"]);
    for (id, traj) in portrait.trajectories.iter().enumerate() {
        for (step, a) in traj.iter().enumerate() {
            csv.row(&[Field::Int(id as u64), Field::Int(step as u64), Field::Float(a.theta), Field::Float(a.phi)]);
        }
    }
    csv.finish(out.as_deref())?;
    Ok(0)
}

pub fn verify(a: VerifyArgs) -> Result<u8, CliError> {
    let suite: Suite = a.suite.parse().map_err(CliError::from_core)?;
    let flags = vec![
        ("discord_grid", a.discord_grid.clone()),
        ("samples", s(&a.samples)),
        ("s_max", s(&a.s_max)),
        ("t_max", s(&a.t_max)),
        ("cycles", s(&a.cycles)),
        ("scan", a.scan.then(|| "true".to_string())),
    ];
    let mut cfg = load(&a.common, flags, VERIFY_KEYS)?;
    let out = cfg.out();
    let defaults = SuiteConfig::default();
    let suite_cfg = SuiteConfig {
        seed: match cfg.raw.get("seed") {
            Some(_) => cfg.seed()?,
            None => {
                cfg.echo.push(("seed".into(), defaults.seed.to_string()));
                defaults.seed
            }
        },
        discord: cfg.discord_grid(DiscordGrid::Fine)?.settings(),
        tol: defaults.tol,
        samples: cfg.count("samples", defaults.samples)?,
        t_max: cfg.count("t_max", defaults.t_max)?,
        s_max: cfg.count("s_max", defaults.s_max as usize)? as u64,
        cycles: cfg.count("cycles", defaults.cycles)?,
        scan: cfg.flag("scan")?,
    };
    let mutation = match a.mutate.as_deref() {
        Some("torsion-sign") => Some(Fault::TorsionSign),
        Some("binomial-weight") => Some(Fault::BinomialWeight),
        _ => None,
    };
    if let Some(m) = &a.mutate {
        cfg.echo.push(("mutate".into(), m.clone()));
    }
    let outcome = match mutation {
        Some(f) => fault::inject(f, || run_suite(suite, &suite_cfg)),
        None => run_suite(suite, &suite_cfg),
    };
    let rep = outcome.map_err(CliError::from_core)?;

    for check in rep.checks.iter().filter(|c| !c.passed()) {
        eprintln!(
            "FAIL {:?} {}: max deviation {:.3e}",
            check.kind,
            check.worst.as_ref().map(|w| format!("t={} {}", w.t, w.measure)).unwrap_or_default(),
            check.max_deviation
        );
    }
    let failed = rep.checks.iter().filter(|c| !c.passed()).count();
    eprintln!("{}: {} checks, {} failed", suite.name(), rep.checks.len(), failed);

    let config: serde_json::Map<String, serde_json::Value> =
        cfg.echo.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect();
    let metadata = serde_json::json!({
        "tool": "kicktop",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "verify",
        "config": config,
        "conventions": CONVENTIONS,
    });
    let mut doc = serde_json::to_value(&rep).map_err(|e| CliError::Numerical(e.to_string()))?;
    doc.as_object_mut().expect("report is an object").insert("metadata".into(), metadata);
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    emit(&text, out.as_deref())?;
    Ok(if rep.passed { 0 } else { 1 })
}
