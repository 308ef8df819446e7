//! On-disk formats: state vectors and gate lists as JSON, band diagrams
//! as CSV with a companion gnuplot script.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use fmft_core::bethe::BandDiagram;
use fmft_core::fock::{full_mask, SectorBasis, StateVector};
use fmft_core::transforms::{Gate, GateSequence};

use crate::{CliError, CliResult};

// ---------------------------------------------------------------------
// State files
// ---------------------------------------------------------------------

/// `{"n": …, "m": …, "amplitudes": [{"mask": …, "re": …, "im": …}, …]}`;
/// omitted masks mean zero amplitude.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub m: usize,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub mask: u64,
    pub re: f64,
    pub im: f64,
}

pub fn read_state(path: &Path) -> CliResult<StateVector> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::new("parse", format!("{}: {e}", path.display())))?;
    state_from_file(&file)
}

pub fn state_from_file(file: &StateFile) -> CliResult<StateVector> {
    let basis = SectorBasis::enumerate(file.n, file.m)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    let mut seen = vec![false; basis.dim()];
    for entry in &file.amplitudes {
        if entry.mask & !full_mask(file.n) != 0 {
            return Err(CliError::new(
                "parse",
                format!("mask {} does not fit {} sites", entry.mask, file.n),
            ));
        }
        if entry.mask.count_ones() as usize != file.m {
            return Err(CliError::new(
                "parse",
                format!(
                    "mask {} occupies {} sites, expected m = {}",
                    entry.mask,
                    entry.mask.count_ones(),
                    file.m
                ),
            ));
        }
        let ord = basis.index(entry.mask).expect("popcount-checked mask");
        if seen[ord] {
            return Err(CliError::new(
                "parse",
                format!("duplicate amplitude for mask {}", entry.mask),
            ));
        }
        seen[ord] = true;
        amps[ord] = Complex64::new(entry.re, entry.im);
    }
    Ok(StateVector::from_amplitudes(basis, amps)?)
}

pub fn state_to_file(v: &StateVector) -> StateFile {
    let basis = v.basis();
    let amplitudes = v
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
        .map(|(ord, a)| AmplitudeEntry {
            mask: basis.mask(ord),
            re: a.re,
            im: a.im,
        })
        .collect();
    StateFile {
        n: basis.n(),
        m: basis.m(),
        amplitudes,
    }
}

pub fn write_state(path: &Path, v: &StateVector) -> CliResult<()> {
    let file = state_to_file(v);
    let text = serde_json::to_string_pretty(&file)?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
    Ok(())
}

// ---------------------------------------------------------------------
// Gate-list files
// ---------------------------------------------------------------------

/// `{"n": …, "gates": [{"type": "givens"|"phase"|"permute", …}, …]}`;
/// angles in radians, permutations as the image list of `1..=n`.
#[derive(Debug, Serialize, Deserialize)]
pub struct GateFile {
    pub n: usize,
    pub gates: Vec<GateEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GateEntry {
    Givens { x: usize, y: usize, theta: f64 },
    Phase { site: usize, phi: f64 },
    Permute { perm: Vec<usize> },
}

impl From<&Gate> for GateEntry {
    fn from(g: &Gate) -> Self {
        match g {
            Gate::Givens { x, y, theta } => GateEntry::Givens {
                x: *x,
                y: *y,
                theta: *theta,
            },
            Gate::Phase { site, phi } => GateEntry::Phase {
                site: *site,
                phi: *phi,
            },
            Gate::Permute { perm } => GateEntry::Permute { perm: perm.clone() },
        }
    }
}

impl From<GateEntry> for Gate {
    fn from(g: GateEntry) -> Self {
        match g {
            GateEntry::Givens { x, y, theta } => Gate::Givens { x, y, theta },
            GateEntry::Phase { site, phi } => Gate::Phase { site, phi },
            GateEntry::Permute { perm } => Gate::Permute { perm },
        }
    }
}

pub fn read_gates(path: &Path) -> CliResult<GateSequence> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
    let file: GateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::new("parse", format!("{}: {e}", path.display())))?;
    let gates = file.gates.into_iter().map(Gate::from).collect();
    Ok(GateSequence::new(file.n, gates)?)
}

pub fn write_gates(path: &Path, seq: &GateSequence) -> CliResult<()> {
    let file = GateFile {
        n: seq.n(),
        gates: seq.gates().iter().map(GateEntry::from).collect(),
    };
    let text = serde_json::to_string_pretty(&file)?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
    Ok(())
}

// ---------------------------------------------------------------------
// Band CSV + plot script
// ---------------------------------------------------------------------

/// One row per eigenvalue, `q,k,K,energy`, floats with 17 significant
/// digits, sectors in residue order and eigenvalues ascending.
pub fn write_band_csv(path: &Path, diagram: &BandDiagram) -> CliResult<()> {
    let mut out = Vec::with_capacity(diagram_capacity(diagram));
    out.extend_from_slice(b"q,k,K,energy\n");
    for entry in &diagram.entries {
        for value in &entry.eigenvalues {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e}",
                entry.q, entry.k, entry.k_shifted, value
            )
            .expect("writing to a Vec cannot fail");
        }
    }
    fs::write(path, out).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
    Ok(())
}

fn diagram_capacity(diagram: &BandDiagram) -> usize {
    16 + 80 * diagram.total_eigenvalues()
}

/// A gnuplot script plotting energy against the shifted quasimomentum,
/// sitting next to the CSV it references.
pub fn write_band_plot_script(script_path: &Path, csv_path: &Path) -> CliResult<()> {
    let csv_name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.display().to_string());
    let script = format!(
        "# Band diagram: energy vs quasimomentum K\n\
         set datafile separator \",\"\n\
         set xlabel \"K\"\n\
         set ylabel \"energy\"\n\
         unset key\n\
         plot \"{csv_name}\" skip 1 using 3:4 with points pt 7 ps 0.4\n"
    );
    fs::write(script_path, script)
        .map_err(|e| CliError::new("io", format!("{}: {e}", script_path.display())))?;
    Ok(())
}
