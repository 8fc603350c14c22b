//! Command-line front end. See `polmulti --help`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::angmom::HalfInt;
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::husimi::{q_function, write_qgrid, GridSpec};
use crate::io::{read_moments, SectorData, SectorEntry, StateFile};
use crate::multipole::{analyze_state, DEFAULT_UNPOL_TOL};
use crate::report::{write_three_photon_scan, write_two_photon_scan, MultipoleReport};
use crate::search::{
    scan_three_photon_family, scan_two_photon_family, solve, three_photon_grid, two_photon_grid, ConstraintClass,
    SearchProblem, ThreePhotonFamily, DEFAULT_RESTARTS, DEFAULT_SEED,
};
use crate::states::{PolarizationState, SpinSector, DEFAULT_VALIDATION_TOL};
use crate::stokes::moments_to_multipoles;

#[derive(Debug, Parser)]
#[command(name = "polmulti", version, about = "Polarization multipoles of spin-S light states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multipole table, unpolarization order and purity of a state file.
    Analyze {
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Husimi Q function of one shell on a quadrature grid (CSV).
    Qfunc {
        state: PathBuf,
        /// Grid as THETAxPHI, or N for N x 2N.
        #[arg(long, default_value = "64x128")]
        grid: String,
        /// Shell to use when the file has several.
        #[arg(long = "two-s")]
        two_s: Option<i32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multipoles from a theta,phi,ell,value moments table.
    Reconstruct {
        moments: PathBuf,
        #[arg(long = "two-s")]
        two_s: i32,
        /// Highest multipole rank to recover.
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Extremal unpolarized states; writes a state file with a metadata block.
    Search {
        #[arg(long = "two-s")]
        two_s: i32,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value = "general")]
        class: ClassArg,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Purity and multipole tables along the diagonal families.
    Scan {
        #[arg(value_enum)]
        family: FamilyArg,
        /// Three-photon family: 1 (no dipole) or 2 (no dipole or quadrupole).
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Points per free parameter.
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a named reference state, or all of them into a directory.
    MakeState {
        #[arg(value_enum)]
        name: NamedState,
        #[arg(long = "two-s")]
        two_s: Option<i32>,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Family parameter (λ for two photons, λ₄ for three photons).
        #[arg(long)]
        lambda: Option<f64>,
        /// Output file; a directory for `all`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Threshold on A_K for calling a rank unpolarized.
    #[arg(long, default_value_t = DEFAULT_UNPOL_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClassArg {
    General,
    Diagonal,
    Axial,
    Pure,
}

impl From<ClassArg> for ConstraintClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::General => ConstraintClass::General,
            ClassArg::Diagonal => ConstraintClass::Diagonal,
            ClassArg::Axial => ConstraintClass::AxiallySymmetric,
            ClassArg::Pure => ConstraintClass::Pure,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    TwoPhoton,
    ThreePhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NamedState {
    Eq15Coherent,
    Eq23Pson,
    Eq27_3p,
    Eq24Diag2,
    Eq29Diag32nd,
    Fig4Left,
    Fig4Right,
    All,
}

const ALL_NAMED: [NamedState; 7] = [
    NamedState::Eq15Coherent,
    NamedState::Eq23Pson,
    NamedState::Eq27_3p,
    NamedState::Eq24Diag2,
    NamedState::Eq29Diag32nd,
    NamedState::Fig4Left,
    NamedState::Fig4Right,
];

impl NamedState {
    fn slug(self) -> &'static str {
        match self {
            NamedState::Eq15Coherent => "eq15-coherent",
            NamedState::Eq23Pson => "eq23-pson",
            NamedState::Eq27_3p => "eq27-3p",
            NamedState::Eq24Diag2 => "eq24-diag2",
            NamedState::Eq29Diag32nd => "eq29-diag32nd",
            NamedState::Fig4Left => "fig4-left",
            NamedState::Fig4Right => "fig4-right",
            NamedState::All => "all",
        }
    }
}

/// Parameters shared by the named-state builders.
#[derive(Clone, Copy, Debug)]
pub struct NamedParams {
    pub two_s: Option<i32>,
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: Option<f64>,
}

impl Default for NamedParams {
    fn default() -> Self {
        Self { two_s: None, theta: 0.0, phi: 0.0, alpha: 0.0, beta: 0.0, lambda: None }
    }
}

/// Builds a named reference state as a single-sector state file.
pub fn named_state(name: NamedState, p: NamedParams) -> Result<StateFile> {
    let three = HalfInt::from_twice(3);
    let entry = match name {
        NamedState::Eq15Coherent => {
            let spin = HalfInt::spin(p.two_s.unwrap_or(3))?;
            let dir = Direction::new(p.theta, p.phi)?;
            SectorEntry {
                two_s: spin.twice(),
                weight: 1.0,
                data: SectorData::Coherent { theta: dir.theta, phi: dir.phi },
            }
        }
        NamedState::Eq23Pson => {
            let (sa, ca) = p.alpha.sin_cos();
            let (sb, cb) = p.beta.sin_cos();
            let amps = [
                Complex64::new(ca, sa) * (sb * FRAC_1_SQRT_2),
                Complex64::from(cb),
                -Complex64::new(ca, -sa) * (sb * FRAC_1_SQRT_2),
            ];
            SectorEntry::from_sector(1.0, &SpinSector::pure(HalfInt::ONE, &amps)?)
        }
        NamedState::Eq27_3p => {
            let h = Complex64::from(FRAC_1_SQRT_2);
            SectorEntry::from_sector(1.0, &SpinSector::pure(three, &[h, 0.0.into(), 0.0.into(), h])?)
        }
        NamedState::Eq24Diag2 => {
            let l = p.lambda.unwrap_or(0.25);
            diag_entry(HalfInt::ONE, &[l, 1.0 - 2.0 * l, l])?
        }
        NamedState::Eq29Diag32nd => {
            let l4 = p.lambda.unwrap_or(1.0 / 6.0);
            diag_entry(three, &ThreePhotonFamily::SecondOrder.eigenvalues(1.0 - 3.0 * l4, l4))?
        }
        NamedState::Fig4Left => diag_entry(three, &[0.0, 0.75, 0.0, 0.25])?,
        NamedState::Fig4Right => diag_entry(three, &[1.0 / 3.0, 0.0, 0.5, 1.0 / 6.0])?,
        NamedState::All => return Err(Error::invalid("`all` names a set of states, not one")),
    };
    Ok(StateFile::single(entry).with_metadata("name", name.slug()))
}

fn diag_entry(spin: HalfInt, p: &[f64]) -> Result<SectorEntry> {
    SpinSector::diagonal(spin, p)?;
    Ok(SectorEntry { two_s: spin.twice(), weight: 1.0, data: SectorData::Diag(p.to_vec()) })
}

/// Parses argv (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must be positive, got {tol}")))
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<GridSpec> {
    let bad = || Error::invalid(format!("grid {text:?} is not THETAxPHI or N"));
    match text.split_once(['x', 'X']) {
        Some((a, b)) => GridSpec::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n: usize = text.trim().parse().map_err(|_| bad())?;
            GridSpec::new(n, 2 * n)
        }
    }
}

fn load_state(path: &Path) -> Result<PolarizationState> {
    StateFile::read(path)?.to_state(DEFAULT_VALIDATION_TOL)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze { state, common } => {
            check_tol(common.tol)?;
            let st = load_state(state)?;
            let report = MultipoleReport::from_analysis(&st, &analyze_state(&st, common.tol));
            emit(common.out.as_deref(), report.to_csv_string().as_bytes())?;
            if common.out.is_some() {
                for line in report.summary_lines() {
                    println!("{line}");
                }
            }
            Ok(())
        }
        Command::Qfunc { state, grid, two_s, out } => {
            let spec = parse_grid(grid)?;
            let st = load_state(state)?;
            let sector = match two_s {
                Some(t) => st
                    .shell(HalfInt::spin(*t)?)
                    .map(|(_, s)| s)
                    .ok_or_else(|| Error::invalid(format!("no shell with two_S = {t}")))?,
                None if st.shells().len() == 1 => &st.shells()[0].1,
                None => return Err(Error::invalid("state has several shells; pick one with --two-s")),
            };
            let q = q_function(sector, spec);
            if q.coarse {
                eprintln!(
                    "warning: {}x{} grid under-resolves two_S = {}; normalization check is approximate",
                    spec.n_theta,
                    spec.n_phi,
                    sector.spin().twice()
                );
            }
            let mut buf = Vec::new();
            write_qgrid(&q, &mut buf)?;
            emit(out.as_deref(), &buf)
        }
        Command::Reconstruct { moments, two_s, order, common } => {
            check_tol(common.tol)?;
            let spin = HalfInt::spin(*two_s)?;
            let samples = read_moments(std::fs::File::open(moments).map_err(|e| crate::io::with_path(e, moments))?)?;
            let rec = moments_to_multipoles(&samples, spin, *order)?;
            let report = MultipoleReport::from_reconstruction(&rec, common.tol);
            emit(common.out.as_deref(), report.to_csv_string().as_bytes())
        }
        Command::Search { two_s, order, class, restarts, seed, out } => {
            let spin = HalfInt::spin(*two_s)?;
            let class: ConstraintClass = (*class).into();
            let problem = SearchProblem::new(spin, *order, class)?.with_restarts(*restarts).with_seed(*seed);
            let result = if class == ConstraintClass::Pure {
                crate::search::max_purity_unpolarized(&problem)?
            } else {
                solve(&problem)?
            };
            let file = StateFile::from_state(&PolarizationState::single(result.state.clone()))
                .with_metadata("class", class.name())
                .with_metadata("order", *order as u64)
                .with_metadata("objective", result.objective)
                .with_metadata("purity", result.purity)
                .with_metadata("residual", result.residual)
                .with_metadata("exact", result.exact)
                .with_metadata("seed", *seed)
                .with_metadata("restarts", if result.exact { 0 } else { *restarts as u64 })
                .with_metadata("digest", result.digest.clone());
            emit(out.as_deref(), file.to_json().as_bytes())
        }
        Command::Scan { family, order, points, out } => {
            let mut buf = Vec::new();
            match family {
                FamilyArg::TwoPhoton => {
                    let rows = scan_two_photon_family(&two_photon_grid(*points))?;
                    write_two_photon_scan(&rows, &mut buf)?;
                }
                FamilyArg::ThreePhoton => {
                    let fam = match order {
                        1 => ThreePhotonFamily::FirstOrder,
                        2 => ThreePhotonFamily::SecondOrder,
                        o => return Err(Error::invalid(format!("three-photon family order must be 1 or 2, got {o}"))),
                    };
                    let scan = scan_three_photon_family(fam, &three_photon_grid(fam, *points));
                    write_three_photon_scan(&scan, &mut buf)?;
                }
            }
            emit(out.as_deref(), &buf)
        }
        Command::MakeState { name, two_s, theta, phi, alpha, beta, lambda, out } => {
            let params =
                NamedParams { two_s: *two_s, theta: *theta, phi: *phi, alpha: *alpha, beta: *beta, lambda: *lambda };
            if *name == NamedState::All {
                let dir = out.as_deref().ok_or_else(|| Error::invalid("`make-state all` needs --out DIR"))?;
                std::fs::create_dir_all(dir)?;
                for n in ALL_NAMED {
                    let file = named_state(n, params)?;
                    file.to_state(DEFAULT_VALIDATION_TOL)?;
                    file.write(&dir.join(format!("{}.json", n.slug())))?;
                }
                return Ok(());
            }
            let file = named_state(*name, params)?;
            file.to_state(DEFAULT_VALIDATION_TOL)?;
            emit(out.as_deref(), file.to_json().as_bytes())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn named_states_validate() {
        for n in ALL_NAMED {
            let f = named_state(n, NamedParams::default()).unwrap();
            assert!(f.to_state(DEFAULT_VALIDATION_TOL).is_ok(), "{}", n.slug());
        }
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("8x16").unwrap(), GridSpec::new(8, 16).unwrap());
        assert_eq!(parse_grid("10").unwrap(), GridSpec::new(10, 20).unwrap());
        assert!(parse_grid("ax3").is_err());
    }
}
