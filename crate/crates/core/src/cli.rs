//! `crn` command-line front end.
//!
//! Structured reports are JSON, grids and trajectories CSV. Exit codes:
//! 0 success, 1 numeric failure, 2 parse error, 3 invalid lift.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bifurcation::{
    brusselator::sign_map_csv, brusselator_bifurcation_sets, focal_sign_map, fold_scan, hopf_scan,
    ParameterPath, ScanOptions,
};
use crate::dynamics::{
    find_all_equilibria, find_periodic_orbit, integrate, reduce_through_point, reduce_to_class,
    NewtonOptions, OdeOptions, OrbitOptions, ReducedSystem, VectorField,
};
use crate::error::{Error, Result};
use crate::kinetics::KineticModel;
use crate::lifting::lift_species;
use crate::parse::{parse_network_file, serialize_network, NetworkFile, ReactionKinetics};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::stoich::StoichMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Floats(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Rationals(pub Vec<Rational>);

fn floats(text: &str) -> std::result::Result<Floats, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Floats)
}

fn rationals(text: &str) -> std::result::Result<Rationals, String> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).ok_or_else(|| format!("`{s}` is not a rational number")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Rationals)
}

#[derive(Debug, Parser)]
#[command(
    name = "crn",
    version,
    about = "Species lifting and dynamics of reaction networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Species, reactions, Γ, rank and conservation laws as JSON.
    Info(NetworkArgs),
    /// Adds a species with stoichiometry cᵗΓ.
    Lift(NetworkArgs),
    /// Lift with c = (−1, …, −1).
    Homogenise(NetworkArgs),
    /// Positive equilibria on a stoichiometric class.
    Equilibria(NetworkArgs),
    /// Trajectory in class coordinates.
    Simulate(NetworkArgs),
    /// Periodic orbit and Floquet multipliers.
    Orbit(NetworkArgs),
    /// Hopf points along a rate-constant path.
    HopfScan(NetworkArgs),
    /// Folds along a rate-constant path.
    FoldScan(NetworkArgs),
    /// Fold/Hopf curves, BT and GH points and the sign map of P.
    BrusselatorDiagram(DiagramArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    /// Network file.
    pub network: PathBuf,
    /// Rate constants, one per reaction.
    #[arg(long, value_parser = floats)]
    pub k: Option<Floats>,
    /// Conservation-law levels.
    #[arg(long = "class", value_parser = floats)]
    pub class: Option<Floats>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Lifting vector c, rationals allowed ("-1,3/2").
    #[arg(long = "c-vector", value_parser = rationals, allow_hyphen_values = true)]
    pub c_vector: Option<Rationals>,
    /// Reactant coefficients of the new species.
    #[arg(long, value_parser = rationals)]
    pub r: Option<Rationals>,
    /// Name of the new species.
    #[arg(long, default_value = "Z")]
    pub name: String,
    /// "lo,hi" for every coordinate, or one pair per coordinate.
    #[arg(long = "box", value_parser = floats)]
    pub search_box: Option<Floats>,
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    /// Initial state (full species coordinates).
    #[arg(long, value_parser = floats)]
    pub x0: Option<Floats>,
    #[arg(long = "t-end", default_value_t = 100.0)]
    pub t_end: f64,
    /// Period guess for orbits.
    #[arg(long, default_value_t = 10.0)]
    pub period: f64,
    /// Integration time discarded before orbit search.
    #[arg(long, default_value_t = 200.0)]
    pub transient: f64,
    /// Scanned rate constant, 1-based.
    #[arg(long, default_value_t = 1)]
    pub param: usize,
    /// Scan interval "start,end".
    #[arg(long, value_parser = floats)]
    pub range: Option<Floats>,
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long = "tol-newton", default_value_t = 1e-12)]
    pub tol_newton: f64,
    #[arg(long = "tol-ode", default_value_t = 1e-10)]
    pub tol_ode: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DiagramArgs {
    #[arg(long, default_value_t = 2.0)]
    pub k1: f64,
    #[arg(long, default_value_t = 4.0)]
    pub k2: f64,
    #[arg(long, default_value_t = 6.0)]
    pub c: f64,
    /// κ₃ range "lo,hi".
    #[arg(long = "box", value_parser = floats)]
    pub search_box: Option<Floats>,
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => 2,
        Error::InvalidLift(_) => 3,
        _ => 1,
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Info(a) => cmd_info(a),
        Command::Lift(a) => cmd_lift(a, None),
        Command::Homogenise(a) => cmd_lift(a, Some(())),
        Command::Equilibria(a) => cmd_equilibria(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Orbit(a) => cmd_orbit(a),
        Command::HopfScan(a) => cmd_scan(a, true),
        Command::FoldScan(a) => cmd_scan(a, false),
        Command::BrusselatorDiagram(a) => cmd_brusselator_diagram(a),
    }
}

fn read_network(path: &Path) -> Result<NetworkFile> {
    let text = fs::read_to_string(path)?;
    Ok(parse_network_file(&text)?)
}

fn model(a: &NetworkArgs, file: &NetworkFile) -> Result<KineticModel> {
    KineticModel::from_file(file, a.k.as_ref().map(|k| k.0.clone()))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    println!("{}", path.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn rational_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn info_json(file: &NetworkFile) -> serde_json::Value {
    let net = &file.crn;
    let gamma = StoichMatrix::of(net);
    let rows: Vec<Vec<String>> = (0..gamma.nrows())
        .map(|i| rational_strings(&gamma.row(i)))
        .collect();
    let laws: Vec<Vec<String>> = gamma
        .left_kernel()
        .iter()
        .map(|w| rational_strings(w))
        .collect();
    json!({
        "species": net.species(),
        "reactions": (0..net.num_reactions()).map(|j| net.format_reaction(j)).collect::<Vec<_>>(),
        "gamma": rows,
        "rank": gamma.rank(),
        "conservation_laws": laws,
        "is_homogeneous": net.is_homogeneous(),
    })
}

fn cmd_info(a: &NetworkArgs) -> Result<()> {
    let file = read_network(&a.network)?;
    print!("{}", to_json(&info_json(&file))?);
    Ok(())
}

fn cmd_lift(a: &NetworkArgs, homogenise: Option<()>) -> Result<()> {
    let file = read_network(&a.network)?;
    let n = file.crn.num_species();
    let c = match (homogenise, &a.c_vector) {
        (Some(()), _) => vec![-crate::rational::one(); n],
        (None, Some(c)) => c.0.clone(),
        (None, None) => return Err(Error::InvalidLift("lift needs --c-vector".into())),
    };
    let kappa =
        a.k.as_ref()
            .map(|k| k.0.clone())
            .or_else(|| file.rate_constants());
    let base = KineticModel::from_file(
        &file,
        Some(
            kappa
                .clone()
                .unwrap_or_else(|| vec![1.0; file.crn.num_reactions()]),
        ),
    )?;
    let family = lift_species(&base, &c, &a.name, a.r.as_ref().map(|r| r.0.clone()))?;
    let lifted_kappa = match (a.eps, &kappa) {
        (Some(eps), Some(_)) => Some(family.scaled_rate_constants(eps)),
        _ => None,
    };
    let kinetics = (0..family.lifted_net().num_reactions())
        .map(|j| ReactionKinetics {
            rate: lifted_kappa.as_ref().map(|k| k[j]),
            exponents: Vec::new(),
        })
        .collect();
    let lifted = NetworkFile {
        crn: family.lifted_net().clone(),
        kinetics,
    };
    let sidecar = json!({
        "c": rational_strings(&family.spec().c),
        "r": rational_strings(&family.spec().reactant_coeffs),
        "alpha": family.spec().alpha,
        "new_conservation_law": rational_strings(&family.new_conservation_law()),
        "eps": a.eps,
        "selected_class_level": a.eps.map(|e| 1.0 / e),
        "kappa": kappa,
        "kappa_scaling": if kappa.is_some() { Some(family.scaling_table()) } else { None },
    });
    write(&a.out, "lifted.crn", &serialize_network(&lifted))?;
    write(&a.out, "lift.json", &to_json(&sidecar)?)
}

fn newton(a: &NetworkArgs) -> NewtonOptions {
    NewtonOptions {
        tol: a.tol_newton,
        ..NewtonOptions::default()
    }
}

fn ode(a: &NetworkArgs) -> OdeOptions {
    OdeOptions::with_tol(a.tol_ode)
}

fn class_system(a: &NetworkArgs, m: &KineticModel) -> Result<ReducedSystem> {
    match (&a.class, &a.x0) {
        (Some(levels), _) => reduce_to_class(m, &levels.0),
        (None, Some(x0)) => reduce_through_point(m, &x0.0),
        (None, None) => reduce_to_class(m, &[]),
    }
}

fn boxes(a: &NetworkArgs) -> Result<Vec<(f64, f64)>> {
    let v = a
        .search_box
        .as_ref()
        .map(|b| b.0.clone())
        .unwrap_or_else(|| vec![0.01, 10.0]);
    if v.is_empty() || !v.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument("--box needs lo,hi pairs".into()));
    }
    Ok(v.chunks(2).map(|p| (p[0], p[1])).collect())
}

fn cmd_equilibria(a: &NetworkArgs) -> Result<()> {
    let file = read_network(&a.network)?;
    let m = model(a, &file)?;
    let sys = class_system(a, &m)?;
    let found = find_all_equilibria(&sys, &boxes(a)?, a.grid, &newton(a))?;
    let report = json!({
        "species": m.net().species(),
        "kappa": m.kappa(),
        "class_levels": sys.levels(),
        "equilibria": found,
    });
    write(&a.out, "equilibria.json", &to_json(&report)?)
}

fn initial_state(a: &NetworkArgs, sys: &ReducedSystem) -> Result<Vec<f64>> {
    match &a.x0 {
        Some(x0) if x0.0.len() == sys.model().num_species() => Ok(sys.project(&x0.0)),
        Some(x0) => Err(Error::Dimension(format!(
            "--x0 has {} entries for {} species",
            x0.0.len(),
            sys.model().num_species()
        ))),
        None => Ok(sys.interior_point().to_vec()),
    }
}

fn cmd_simulate(a: &NetworkArgs) -> Result<()> {
    let file = read_network(&a.network)?;
    let m = model(a, &file)?;
    let sys = class_system(a, &m)?;
    let u0 = initial_state(a, &sys)?;
    let tr = integrate(&sys, &u0, a.t_end, &ode(a))?;
    let kept: Vec<&str> = sys
        .kept()
        .iter()
        .map(|&s| m.net().species()[s].as_str())
        .collect();
    let meta = json!({
        "coordinates": kept,
        "class_levels": sys.levels(),
        "kappa": m.kappa(),
        "tol_ode": a.tol_ode,
        "t_end": a.t_end,
        "initial_state": sys.embed(&u0),
        "final_state": sys.embed(tr.final_state().as_slice()),
        "accepted_steps": tr.times.len() - 1,
        "rejected_steps": tr.rejected,
    });
    write(&a.out, "trajectory.csv", &tr.to_csv())?;
    write(&a.out, "trajectory.json", &to_json(&meta)?)
}

fn cmd_orbit(a: &NetworkArgs) -> Result<()> {
    let file = read_network(&a.network)?;
    let m = model(a, &file)?;
    let sys = class_system(a, &m)?;
    let u0 = initial_state(a, &sys)?;
    let seed = integrate(&sys, &u0, a.transient, &ode(a))?
        .final_state()
        .as_slice()
        .to_vec();
    let rec = find_periodic_orbit(&sys, &seed, a.period, &OrbitOptions::default())?;
    let report = json!({ "kappa": m.kappa(), "class_levels": sys.levels(), "orbit": rec });
    write(&a.out, "orbit.json", &to_json(&report)?)
}

fn cmd_scan(a: &NetworkArgs, hopf: bool) -> Result<()> {
    let file = read_network(&a.network)?;
    let m = model(a, &file)?;
    let idx = a
        .param
        .checked_sub(1)
        .filter(|&i| i < m.num_reactions())
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "--param {} out of range 1..={}",
                a.param,
                m.num_reactions()
            ))
        })?;
    let range = a.range.as_ref().map(|r| r.0.clone()).unwrap_or_default();
    if range.len() != 2 {
        return Err(Error::InvalidArgument("--range needs start,end".into()));
    }
    let base = class_system(a, &m)?;
    let family = |p: f64| {
        let mut k = m.kappa().to_vec();
        k[idx] = p;
        base.with_kappa(k)
    };
    let start = family(range[0])?;
    let seed = match &a.x0 {
        Some(_) => initial_state(a, &start)?,
        None => find_all_equilibria(&start, &boxes(a)?, a.grid, &newton(a))?
            .first()
            .map(|e| e.reduced.clone())
            .ok_or_else(|| {
                Error::NoConvergence("no equilibrium at the start of the path".into())
            })?,
    };
    let name = format!("k{}", a.param);
    let path = ParameterPath::new(name, range[0], range[1], a.samples);
    let opts = ScanOptions {
        newton: newton(a),
        ..ScanOptions::default()
    };
    let points = if hopf {
        hopf_scan(&family, &path, &seed, &opts)?
    } else {
        fold_scan(&family, &path, &seed, &opts)?
    };
    let report = json!({ "kappa": m.kappa(), "class_levels": base.levels(), "points": points });
    write(
        &a.out,
        if hopf { "hopf.json" } else { "fold.json" },
        &to_json(&report)?,
    )
}

fn cmd_brusselator_diagram(a: &DiagramArgs) -> Result<()> {
    let range = match &a.search_box {
        Some(b) if b.0.len() == 2 => (b.0[0], b.0[1]),
        Some(_) => return Err(Error::InvalidArgument("--box needs lo,hi for κ₃".into())),
        None => (0.5, 20.0),
    };
    let d = brusselator_bifurcation_sets(a.k1, a.k2, a.c, range, a.grid.max(2) * 4)?;
    write(&a.out, "fig2.csv", &d.curves_csv())?;
    write(&a.out, "fig2_points.json", &d.points_json()?)?;
    let cells = focal_sign_map(
        (4.0 / a.grid.max(2) as f64, 4.0),
        (25.0 / a.grid.max(2) as f64, 25.0),
        a.grid,
    );
    write(&a.out, "fig1.csv", &sign_map_csv(&cells))
}
