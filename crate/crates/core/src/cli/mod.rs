//! Subcommands behind the `catspec` binary. Each one reads a flat config,
//! runs a solver or sweep and writes CSV (plus SVG for the figures) into an
//! output directory, together with `manifest.json`.

pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::adiabatic::{evolve, max_time_step, RampSchedule, RampShape};
use crate::error::{Error, Result};
use crate::field::gaussian::minimize_gaussian;
use crate::field::grid::{stationarity, RadialGrid};
use crate::field::relax::{relax_gpe, RelaxOptions};
use crate::field::thomas_fermi::{lowest, solve_thomas_fermi, tf_radius};
use crate::params::{LambdaConvention, ModelParams};
use crate::twomode::exact::{build_hamiltonian, diagonalize, gap_ratio_sweep, ground_distribution, Parity, SweepAxis, SweepRow};
use crate::twomode::meanfield::{cat_energies, mean_field_branches};
use crate::variational::{ground_state, spectrum_and_figures, OrbitalAnsatz, OrbitalCoupling, VariationalOptions};

use config::Config;
use output::{cell_text, num, write_svg, Csv, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Spectrum,
    Meanfield,
    Tf,
    Gaussian,
    Adiabatic,
    Varifield,
}

impl Command {
    pub const NAMES: &'static [&'static str] = &[
        "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "spectrum", "meanfield", "tf", "gaussian", "adiabatic", "varifield",
    ];

    pub fn parse(s: &str) -> Option<Self> {
        use Command::*;
        Some(match s {
            "fig1" => Fig1,
            "fig2" => Fig2,
            "fig3" => Fig3,
            "fig4" => Fig4,
            "fig5" => Fig5,
            "fig6" => Fig6,
            "spectrum" => Spectrum,
            "meanfield" => Meanfield,
            "tf" => Tf,
            "gaussian" => Gaussian,
            "adiabatic" => Adiabatic,
            "varifield" => Varifield,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        let i = Self::NAMES.iter().position(|n| Self::parse(n) == Some(self)).expect("every command is named");
        Self::NAMES[i]
    }

    fn is_field(self) -> bool {
        matches!(self, Command::Fig5 | Command::Fig6 | Command::Tf | Command::Gaussian | Command::Varifield)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_hash: String,
    pub convention_flags: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

/// 2 for configuration and I/O problems, 3 for solver failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

/// JSON error record printed by the binary on failure.
pub fn error_record(cmd: Option<Command>, err: &Error) -> String {
    let kind = if exit_code(err) == 2 { "config" } else { "solver" };
    serde_json::json!({
        "status": "error",
        "exit_code": exit_code(err),
        "kind": kind,
        "subcommand": cmd.map(Command::name),
        "message": err.to_string(),
    })
    .to_string()
}

/// Two-mode defaults: `U0 = 0.01`; the gap ratios depend only on `Lambda`,
/// `N` and `U1 / U0`.
const TWO_MODE_U0: f64 = 0.01;
/// Field defaults: scattering lengths 50 nm (intra) and 150 nm (inter) in a
/// trap of oscillator length 3 um, `U = 4 pi a_sc / x0`.
const FIELD_U0: f64 = 4.0 * PI * 50.0 / 3000.0;

const TWO_MODE_GRID: &str = "0.5:2:61; 0.95:1.05:21";

/// Spans the symmetry-breaking transition of the field model near
/// `Lambda ~ 10` for the default parameters.
const FIELD_GRID: &str = "0.5:30:60; 8:12:17";

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) | Error::Io(_) => e,
        other => Error::Config(other.to_string()),
    }
}

struct Run<'a> {
    cmd: Command,
    cfg: &'a Config,
    out: PathBuf,
    header: Vec<String>,
    manifest: Option<RunManifest>,
    failures: Vec<String>,
}

impl<'a> Run<'a> {
    fn convention(&self) -> Result<LambdaConvention> {
        let default = if self.cmd.is_field() { LambdaConvention::Field } else { LambdaConvention::TwoMode };
        self.cfg.choice("Lambda_convention", default, LambdaConvention::parse, LambdaConvention::name)
    }

    fn model(&self, n_default: usize, u0_default: f64) -> Result<ModelParams> {
        let cfg = self.cfg;
        let n = cfg.usize("n_atoms", n_default)?;
        let u0 = cfg.f64("u0", u0_default)?;
        let u1 = cfg.f64("u1", 3.0 * u0)?;
        let tilde = cfg.bool("tilde_rescale", false)?;
        if cfg.f64("detuning", 0.0)? != 0.0 {
            return Err(Error::Config("detuning is reserved and not implemented".into()));
        }
        let p = ModelParams::new(n, u0, u1, 0.0).map_err(as_config)?.with_tilde(tilde);
        match (cfg.contains("lambda"), cfg.contains("Lambda")) {
            (true, true) => Err(Error::Config("give either lambda or Lambda, not both".into())),
            (true, false) => {
                let p = p.with_lambda(cfg.f64("lambda", 0.0)?);
                p.validate().map_err(as_config)?;
                Ok(p)
            }
            (false, true) => p.at_control(cfg.f64("Lambda", 0.0)?, self.convention()?).map_err(as_config),
            (false, false) => Ok(p),
        }
    }

    /// [`Run::model`] for commands driven by Lambda, which needs U1 != U0.
    fn control_model(&self, n_default: usize, u0_default: f64) -> Result<ModelParams> {
        let p = self.model(n_default, u0_default)?;
        p.at_control(1.0, self.convention()?).map_err(as_config)?;
        Ok(p)
    }

    fn vari_options(&self) -> Result<VariationalOptions> {
        let coupling = self.cfg.choice("vari_coupling", OrbitalCoupling::TwoLambda, OrbitalCoupling::parse, OrbitalCoupling::name)?;
        let ansatz = self.cfg.choice(
            "vari_ansatz",
            OrbitalAnsatz::SingleGaussian,
            |s| match s {
                "single" => Some(OrbitalAnsatz::SingleGaussian),
                "two" => Some(OrbitalAnsatz::TwoGaussian),
                _ => None,
            },
            |a| match a {
                OrbitalAnsatz::SingleGaussian => "single",
                OrbitalAnsatz::TwoGaussian => "two",
            },
        )?;
        let stride = self.cfg.usize("vari_stride", 0)?;
        Ok(VariationalOptions {
            ansatz,
            coupling,
            stride: (stride > 0).then_some(stride),
        })
    }

    /// Freezes the resolved configuration into the manifest header. All
    /// config lookups must happen before this.
    fn seal(&mut self) -> Result<()> {
        let conv = self.convention()?;
        let tilde = self.cfg.bool("tilde_rescale", false)?;
        let coupling = self.cfg.choice("vari_coupling", OrbitalCoupling::TwoLambda, OrbitalCoupling::parse, OrbitalCoupling::name)?;
        let mut hasher = Sha256::new();
        hasher.update(self.cmd.name().as_bytes());
        hasher.update(b"\n");
        hasher.update(self.cfg.resolved_text().as_bytes());
        let hash: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        let flags: BTreeMap<String, String> = [
            ("tilde_rescale", tilde.to_string()),
            ("Lambda_convention", conv.name().to_string()),
            ("vari_coupling", coupling.name().to_string()),
            ("rng", "none".to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let mut header = vec![
            format!("catspec {} {}", env!("CARGO_PKG_VERSION"), self.cmd.name()),
            format!("config_sha256 = {hash}"),
        ];
        header.extend(flags.iter().map(|(k, v)| format!("{k} = {v}")));
        header.extend(self.cfg.resolved().iter().map(|(k, v)| format!("config {k} = {v}")));
        self.header = header;
        self.manifest = Some(RunManifest {
            subcommand: self.cmd.name().to_string(),
            config_hash: hash,
            convention_flags: flags,
            outputs: Vec::new(),
        });
        Ok(())
    }

    fn path(&mut self, name: &str) -> PathBuf {
        if let Some(m) = self.manifest.as_mut() {
            m.outputs.push(name.to_string());
        }
        self.out.join(name)
    }

    fn csv(&mut self, name: &str, csv: &Csv) -> Result<()> {
        let p = self.path(name);
        csv.write(&p)
    }

    fn svg(&mut self, name: &str, title: &str, x_label: &str, series: &[Series], log_y: bool) -> Result<()> {
        let p = self.path(name);
        write_svg(&p, &self.header, title, x_label, series, log_y)
    }

    fn sweep_csv(&mut self, name: &str, rows: &[SweepRow]) -> Result<()> {
        let mut csv = Csv::new(&self.header, &["Lambda", "E0", "gap01", "gap12", "ratio", "gap02", "gap03", "status"]);
        for r in rows {
            if let Some(e) = &r.error {
                self.failures.push(format!("{name}: Lambda = {}: {e}", r.control));
            }
            csv.row(&[
                num(r.control),
                num(r.e0),
                num(r.gap01),
                num(r.gap12),
                num(r.ratio),
                num(r.gap02),
                num(r.gap03),
                r.error.as_deref().map_or("ok".into(), cell_text),
            ]);
        }
        self.csv(name, &csv)
    }

    fn finish(mut self) -> Result<RunManifest> {
        let manifest = self.manifest.take().expect("run was sealed");
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(self.out.join("manifest.json"), text + "\n")?;
        if !self.failures.is_empty() {
            return Err(Error::SweepRows {
                failed: self.failures.len(),
                details: summarize(&self.failures),
            });
        }
        Ok(manifest)
    }
}

/// The first few failures, so the error record stays readable.
fn summarize(failures: &[String]) -> String {
    const SHOWN: usize = 3;
    let mut text = failures.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(" | ");
    if failures.len() > SHOWN {
        text.push_str(&format!(" | and {} more", failures.len() - SHOWN));
    }
    text
}

fn series(name: &str, rows: &[SweepRow], f: impl Fn(&SweepRow) -> f64) -> Series {
    Series {
        name: name.to_string(),
        points: rows.iter().map(|r| (r.control, f(r))).collect(),
    }
}

/// Runs one subcommand. Output files go to `out_dir`, which is created if
/// missing. Rows that fail inside a sweep are written with their error and
/// then reported as a solver failure.
pub fn run(cmd: Command, cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    fs::create_dir_all(out_dir)?;
    let mut run = Run {
        cmd,
        cfg,
        out: out_dir.to_path_buf(),
        header: Vec::new(),
        manifest: None,
        failures: Vec::new(),
    };
    match cmd {
        Command::Spectrum => spectrum(&mut run)?,
        Command::Meanfield | Command::Fig1 => meanfield(&mut run)?,
        Command::Fig2 | Command::Fig3 => fig23(&mut run)?,
        Command::Fig4 => fig4(&mut run)?,
        Command::Fig5 | Command::Fig6 => fig56(&mut run)?,
        Command::Tf => tf(&mut run)?,
        Command::Gaussian => gaussian(&mut run)?,
        Command::Adiabatic => adiabatic(&mut run)?,
        Command::Varifield => varifield(&mut run)?,
    }
    run.finish()
}

fn spectrum(run: &mut Run) -> Result<()> {
    let p = run.model(1000, TWO_MODE_U0)?;
    let levels = run.cfg.usize("levels", 4)?;
    run.seal()?;
    let h = build_hamiltonian(&p)?;
    let spec = diagonalize(&h, levels.clamp(1, h.dim()), true)?;
    let mut csv = Csv::new(&run.header, &["k", "E", "parity"]);
    for (k, e) in spec.eigenvalues.iter().enumerate() {
        let parity = match spec.parities.as_ref().map(|v| v[k]) {
            Some(Parity::Even) => "even",
            Some(Parity::Odd) => "odd",
            None => "none",
        };
        csv.row(&[k.to_string(), num(*e), parity.into()]);
    }
    run.csv("spectrum.csv", &csv)?;
    let dist = ground_distribution(&spec)?;
    let mut csv = Csv::new(&run.header, &["m", "prob"]);
    for (m, pr) in dist.probs.iter().enumerate() {
        csv.row(&[m.to_string(), num(*pr)]);
    }
    run.csv("distribution.csv", &csv)
}

struct MeanFieldRow {
    e0_mf: f64,
    eps: f64,
    e_plus: f64,
    e_minus: f64,
    branches: Vec<(String, f64, f64, f64)>,
    error: Option<String>,
}

fn mean_field_row(p: &ModelParams, control: f64, conv: LambdaConvention) -> MeanFieldRow {
    let mut row = MeanFieldRow {
        e0_mf: f64::NAN,
        eps: f64::NAN,
        e_plus: f64::NAN,
        e_minus: f64::NAN,
        branches: Vec::new(),
        error: None,
    };
    let q = match p.at_control(control, conv) {
        Ok(q) => q,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    match mean_field_branches(&q) {
        Ok(b) => {
            row.e0_mf = b[0].energy;
            row.branches = b.iter().map(|x| (x.label.name().to_string(), x.alpha, x.beta, x.energy)).collect();
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    let two_mode = q.mean_field_control(LambdaConvention::TwoMode).unwrap_or(f64::NAN);
    if q.u1 > q.u0 && two_mode > 0.0 && two_mode < 1.0 {
        match cat_energies(&q) {
            Ok(c) => {
                row.eps = c.overlap_eps;
                row.e_plus = c.e_plus;
                row.e_minus = c.e_minus;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

/// Exact sweep with the mean-field columns; `fig1` is this with a plot.
fn meanfield(run: &mut Run) -> Result<()> {
    let p = run.control_model(1000, TWO_MODE_U0)?;
    let conv = run.convention()?;
    let grid = run.cfg.list_f64("Lambda_grid", TWO_MODE_GRID)?;
    run.seal()?;
    let exact = gap_ratio_sweep(&p, &grid, SweepAxis::Control(conv));
    let mf: Vec<MeanFieldRow> = grid.par_iter().map(|&c| mean_field_row(&p, c, conv)).collect();
    let name = if run.cmd == Command::Fig1 { "fig1" } else { "meanfield" };
    let mut csv = Csv::new(
        &run.header,
        &["Lambda", "E0", "gap01", "gap12", "ratio", "gap02", "gap03", "E0_mf", "eps", "E_plus", "E_minus", "status"],
    );
    let mut branches = Csv::new(&run.header, &["Lambda", "branch", "alpha", "beta", "energy"]);
    for (r, m) in exact.iter().zip(&mf) {
        let status = match (&r.error, &m.error) {
            (None, None) => "ok".to_string(),
            (Some(e), _) | (None, Some(e)) => {
                run.failures.push(format!("Lambda = {}: {e}", r.control));
                cell_text(e)
            }
        };
        csv.row(&[
            num(r.control),
            num(r.e0),
            num(r.gap01),
            num(r.gap12),
            num(r.ratio),
            num(r.gap02),
            num(r.gap03),
            num(m.e0_mf),
            num(m.eps),
            num(m.e_plus),
            num(m.e_minus),
            status,
        ]);
        for (label, a, b, e) in &m.branches {
            branches.row(&[num(r.control), label.clone(), num(*a), num(*b), num(*e)]);
        }
    }
    run.csv(&format!("{name}.csv"), &csv)?;
    if run.cmd == Command::Fig1 {
        let e0 = series("E0 exact", &exact, |r| r.e0);
        let emf = Series {
            name: "E0 mean field".into(),
            points: exact.iter().zip(&mf).map(|(r, m)| (r.control, m.e0_mf)).collect(),
        };
        run.svg("fig1.svg", &format!("ground-state energy, N = {}", p.n_atoms), "Lambda", &[e0, emf], false)
    } else {
        run.csv("branches.csv", &branches)
    }
}

fn fig23(run: &mut Run) -> Result<()> {
    let p = run.control_model(1000, TWO_MODE_U0)?;
    let conv = run.convention()?;
    let ns = run.cfg.list_usize("n_list", &[1000, 10000])?;
    let grid = run.cfg.list_f64("Lambda_grid", TWO_MODE_GRID)?;
    let zoom = if run.cmd == Command::Fig2 { run.cfg.list_f64("zoom_grid", "0.9:1.1:81")? } else { Vec::new() };
    run.seal()?;
    let mut ratio = Vec::new();
    let mut ratio_zoom = Vec::new();
    for &n in &ns {
        let q = ModelParams { n_atoms: n, ..p };
        q.validate().map_err(as_config)?;
        let rows = gap_ratio_sweep(&q, &grid, SweepAxis::Control(conv));
        if run.cmd == Command::Fig2 {
            run.sweep_csv(&format!("fig2_N{n}.csv"), &rows)?;
            ratio.push(series(&format!("N = {n}"), &rows, |r| r.ratio));
            let rows = gap_ratio_sweep(&q, &zoom, SweepAxis::Control(conv));
            run.sweep_csv(&format!("fig2_zoom_N{n}.csv"), &rows)?;
            ratio_zoom.push(series(&format!("N = {n}"), &rows, |r| r.ratio));
        } else {
            run.sweep_csv(&format!("fig3_N{n}.csv"), &rows)?;
            let s = [
                series("E1-E0", &rows, |r| r.gap01),
                series("E2-E0", &rows, |r| r.gap02),
                series("E3-E0", &rows, |r| r.gap03),
            ];
            run.svg(&format!("fig3_N{n}.svg"), &format!("excitation energies, N = {n}"), "Lambda", &s, true)?;
        }
    }
    if run.cmd == Command::Fig2 {
        run.svg("fig2.svg", "(E1-E0)/(E2-E1)", "Lambda", &ratio, true)?;
        run.svg("fig2_zoom.svg", "(E1-E0)/(E2-E1), transition region", "Lambda", &ratio_zoom, true)?;
    }
    Ok(())
}

fn fig4(run: &mut Run) -> Result<()> {
    let p = run.control_model(1000, TWO_MODE_U0)?;
    let conv = run.convention()?;
    let values = run.cfg.list_f64("Lambda_values", "0.9, 0.95, 1.0, 1.05, 1.1")?;
    run.seal()?;
    let mut all = Vec::new();
    for (i, &c) in values.iter().enumerate() {
        let q = p.at_control(c, conv)?;
        let spec = diagonalize(&build_hamiltonian(&q)?, 1, true)?;
        let dist = ground_distribution(&spec)?;
        let mut csv = Csv::new(&[run.header.clone(), vec![format!("Lambda = {}", num(c))]].concat(), &["m", "prob"]);
        for (m, pr) in dist.probs.iter().enumerate() {
            csv.row(&[m.to_string(), num(*pr)]);
        }
        run.csv(&format!("fig4_{i}.csv"), &csv)?;
        all.push(Series {
            name: format!("Lambda = {c}"),
            points: dist.probs.iter().enumerate().map(|(m, &pr)| (m as f64, pr)).collect(),
        });
    }
    run.svg("fig4.svg", &format!("ground-state number distribution, N = {}", p.n_atoms), "m", &all, false)
}

fn fig56(run: &mut Run) -> Result<()> {
    let p = run.control_model(1000, FIELD_U0)?;
    let grid = run.cfg.list_f64("Lambda_grid", FIELD_GRID)?;
    let opts = run.vari_options()?;
    run.seal()?;
    let rows = spectrum_and_figures(&p, &grid, &opts);
    if run.cmd == Command::Fig5 {
        run.sweep_csv("fig5.csv", &rows)?;
        run.svg("fig5.svg", "(E1-E0)/(E2-E1), variational field model", "Lambda (field)", &[series("ratio", &rows, |r| r.ratio)], true)
    } else {
        run.sweep_csv("fig6.csv", &rows)?;
        let s = [
            series("E1-E0", &rows, |r| r.gap01),
            series("E2-E0", &rows, |r| r.gap02),
            series("E3-E0", &rows, |r| r.gap03),
        ];
        run.svg("fig6.svg", "excitation energies, variational field model", "Lambda (field)", &s, true)
    }
}

fn field_grid(run: &Run, p: &ModelParams) -> Result<RadialGrid> {
    let (u0, u1) = p.mean_field_couplings();
    let r0 = if u0 + u1 > 0.0 { tf_radius(p.n(), u0 + u1) } else { 1.0 };
    let points = run.cfg.usize("grid_points", RadialGrid::DEFAULT_POINTS)?;
    let r_max = run.cfg.f64("r_max", (2.0 * r0).max(8.0))?;
    RadialGrid::new(points, r_max).map_err(as_config)
}

const SUMMARY_COLUMNS: &[&str] = &["Lambda", "branch", "mu", "energy", "A", "a", "B", "b"];

fn tf(run: &mut Run) -> Result<()> {
    let p = run.control_model(1000, FIELD_U0)?;
    let conv = run.convention()?;
    let grid = run.cfg.list_f64("Lambda_grid", FIELD_GRID)?;
    let radial = field_grid(run, &p)?;
    run.seal()?;
    let sols: Vec<Result<_>> = grid
        .par_iter()
        .map(|&c| solve_thomas_fermi(&p.at_control(c, conv)?, &radial))
        .collect();
    let mut csv = Csv::new(&run.header, SUMMARY_COLUMNS);
    let nan = num(f64::NAN);
    for (&c, s) in grid.iter().zip(sols) {
        match s {
            Ok(list) => {
                for s in list {
                    csv.row(&[num(c), s.branch.name().into(), num(s.mu), num(s.energy), nan.clone(), nan.clone(), nan.clone(), nan.clone()]);
                }
            }
            Err(e) => {
                run.failures.push(format!("Lambda = {c}: {e}"));
                csv.row(&[num(c), cell_text(&e.to_string()), nan.clone(), nan.clone(), nan.clone(), nan.clone(), nan.clone(), nan.clone()]);
            }
        }
    }
    run.csv("tf.csv", &csv)
}

struct GaussRow {
    control: f64,
    rows: Vec<[String; 8]>,
    chain: Option<[f64; 4]>,
}

fn gaussian_point(p: &ModelParams, c: f64, conv: LambdaConvention, radial: &RadialGrid, restarts: usize, relax: bool) -> Result<GaussRow> {
    let q = p.at_control(c, conv)?;
    let m = minimize_gaussian(&q, restarts)?;
    let mut rows = Vec::new();
    let mut pairs = vec![(if m.degenerate_partner.is_some() { "plus" } else { "symmetric" }, m.pair)];
    if let Some(partner) = m.degenerate_partner {
        pairs.push(("minus", partner));
    }
    for (label, pair) in &pairs {
        let (mu, _) = stationarity(&pair.sample(radial), &q);
        rows.push([
            num(c),
            (*label).into(),
            num(mu),
            num(m.energy),
            num(pair.amp_a),
            num(pair.width_a),
            num(pair.amp_b),
            num(pair.width_b),
        ]);
    }
    let chain = if relax {
        let seed = m.pair.sample(radial);
        let e_gauss = crate::field::grid::energy_functional(&seed, &q)?;
        let r = relax_gpe(&q, &seed, &RelaxOptions::default())?;
        let tf = solve_thomas_fermi(&q, radial)?;
        let e_tf = lowest(&tf).map_or(f64::NAN, |s| s.energy);
        Some([r.energy, e_gauss, e_tf, r.residual])
    } else {
        None
    };
    Ok(GaussRow { control: c, rows, chain })
}

fn gaussian(run: &mut Run) -> Result<()> {
    let p = run.control_model(1000, FIELD_U0)?;
    let conv = run.convention()?;
    let grid = run.cfg.list_f64("Lambda_grid", FIELD_GRID)?;
    let radial = field_grid(run, &p)?;
    let restarts = run.cfg.usize("restarts", 3)?;
    let relax = run.cfg.bool("relax", false)?;
    run.seal()?;
    let out: Vec<(f64, Result<GaussRow>)> = grid
        .par_iter()
        .map(|&c| (c, gaussian_point(&p, c, conv, &radial, restarts, relax)))
        .collect();
    let mut csv = Csv::new(&run.header, SUMMARY_COLUMNS);
    let mut chain = Csv::new(&run.header, &["Lambda", "E_relax", "E_gauss_grid", "E_tf", "relax_residual"]);
    for (c, r) in out {
        match r {
            Ok(g) => {
                for row in g.rows {
                    csv.row(&row);
                }
                if let Some(ch) = g.chain {
                    chain.row(&[num(g.control), num(ch[0]), num(ch[1]), num(ch[2]), num(ch[3])]);
                }
            }
            Err(e) => {
                run.failures.push(format!("Lambda = {c}: {e}"));
                let nan = num(f64::NAN);
                csv.row(&[num(c), cell_text(&e.to_string()), nan.clone(), nan.clone(), nan.clone(), nan.clone(), nan.clone(), nan]);
            }
        }
    }
    run.csv("gaussian.csv", &csv)?;
    if relax {
        run.csv("chain.csv", &chain)?;
    }
    Ok(())
}

fn adiabatic(run: &mut Run) -> Result<()> {
    let p = run.control_model(50, 0.02)?;
    let conv = run.convention()?;
    let cfg = run.cfg;
    let shape = cfg.choice("ramp.shape", RampShape::Linear, RampShape::parse, RampShape::name)?;
    let ramp = RampSchedule {
        lambda_start: cfg.f64("ramp.start", 1.5)?,
        lambda_end: cfg.f64("ramp.end", 0.7)?,
        duration: cfg.f64("ramp.duration", 100.0)?,
        shape,
        convention: conv,
    };
    ramp.validate().map_err(as_config)?;
    let samples = cfg.usize("ramp.samples", 100)?;
    let dt_max = max_time_step(&p, &ramp).map_err(as_config)?;
    let dt = cfg.f64("dt", dt_max)?;
    run.seal()?;
    let rows = evolve(&p, &ramp, dt, samples)?;
    let mut csv = Csv::new(&run.header, &["t", "Lambda", "fid0", "fid01", "norm"]);
    for r in &rows {
        csv.row(&[num(r.t), num(r.control), num(r.fid0), num(r.fid01), num(r.norm)]);
    }
    run.csv("adiabatic.csv", &csv)?;
    let s = [
        Series {
            name: "ground".into(),
            points: rows.iter().map(|r| (r.t, r.fid0)).collect(),
        },
        Series {
            name: "lowest pair".into(),
            points: rows.iter().map(|r| (r.t, r.fid01)).collect(),
        },
    ];
    run.svg("adiabatic.svg", "fidelity along the ramp", "t", &s, false)
}

fn varifield(run: &mut Run) -> Result<()> {
    let p = run.control_model(1000, FIELD_U0)?;
    let conv = run.convention()?;
    let control = run.cfg.f64("Lambda", 5.0)?;
    let p = p.at_control(control, conv).map_err(as_config)?;
    let opts = run.vari_options()?;
    run.seal()?;
    let st = ground_state(&p, &opts)?;
    let mut csv = Csv::new(&run.header, &["m", "a_m"]);
    for (m, a) in st.widths.iter().enumerate() {
        csv.row(&[m.to_string(), num(*a)]);
    }
    run.csv("widths.csv", &csv)?;
    let mut csv = Csv::new(&run.header, &["m", "q"]);
    for (m, q) in st.qvec.iter().enumerate() {
        csv.row(&[m.to_string(), num(*q)]);
    }
    run.csv("qvec.csv", &csv)?;
    let mut csv = Csv::new(&run.header, &["Lambda", "E0", "q_asymmetry", "flagged"]);
    let flagged: Vec<String> = st.flagged.iter().map(|m| m.to_string()).collect();
    csv.row(&[num(control), num(st.energy), num(st.asymmetry), flagged.join(";")]);
    run.csv("varifield.csv", &csv)?;
    let s = [Series {
        name: "q_m^2".into(),
        points: st.qvec.iter().enumerate().map(|(m, q)| (m as f64, q * q)).collect(),
    }];
    run.svg("varifield.svg", "variational ground state", "m", &s, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for n in Command::NAMES {
            assert_eq!(Command::parse(n).unwrap().name(), *n);
        }
        assert!(Command::parse("fig7").is_none());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::ZeroCoupling), 3);
        let rec: serde_json::Value = serde_json::from_str(&error_record(Some(Command::Tf), &Error::ZeroCoupling)).unwrap();
        assert_eq!(rec["exit_code"], 3);
        assert_eq!(rec["subcommand"], "tf");
    }
}
