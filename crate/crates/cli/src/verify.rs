//! The `verify` subcommand: named invariant checks at two depths.
//!
//! `quick` stays at eight sites and runs in seconds; `full` extends to
//! sixteen sites plus the 64-site ring at low filling and takes minutes.
//! Every check reports one PASS/FAIL line.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use fmft_core::bethe::{
    adjacency_histogram, build_sector_matrix, diagonalize_sector_with_vectors, full_ed_matrix,
    full_ed_oracle, gap_clusters, hopping_energy, interaction_energy, momentum_transform,
    sector_partition, slater_oracle, BandDiagram, ChainParams, ModeSet,
};
use fmft_core::fock::{SectorBasis, StateVector};
use fmft_core::linalg::eigh;
use fmft_core::transforms::{
    apply_sequence, dft_matrix, fmft_inverse_sequence, fmft_sequence, invert_sequence,
    mft_fold_compile, single_body_action,
};

use crate::commands::parallel_band_diagram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

pub struct CheckReport {
    pub name: &'static str,
    pub outcome: Result<String, String>,
}

/// Deterministic pseudo-random stream for test states.
struct SplitMix(u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn next_index(&mut self, bound: usize) -> usize {
        (self.next_f64().abs() * bound as f64) as usize % bound
    }
}

fn random_unit_state(basis: Arc<SectorBasis>, rng: &mut SplitMix) -> StateVector {
    let mut amps: Vec<Complex64> = (0..basis.dim())
        .map(|_| Complex64::new(rng.next_f64(), rng.next_f64()))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(basis, amps).unwrap()
}

fn max_amp_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

struct PipelineRun {
    label: String,
    n: usize,
    diagram: BandDiagram,
    max_leakage: f64,
    ed: Vec<f64>,
}

fn pipeline_runs(cases: &[(usize, usize, f64)]) -> Result<Vec<PipelineRun>, String> {
    let mut runs = Vec::new();
    for &(n, m, u) in cases {
        let params = ChainParams::new(n, m, 1.0, u).map_err(|e| e.to_string())?;
        let seq = momentum_transform(n).map_err(|e| e.to_string())?;
        let (diagram, max_leakage) =
            parallel_band_diagram(&params, &seq, 1e-10).map_err(|e| e.to_string())?;
        let ed = full_ed_oracle(&params).map_err(|e| e.to_string())?;
        runs.push(PipelineRun {
            label: format!("n={n} m={m} u={u}"),
            n,
            diagram,
            max_leakage,
            ed,
        });
    }
    Ok(runs)
}

fn check_spectrum_equivalence(runs: &[PipelineRun]) -> Result<String, String> {
    let mut worst = 0.0_f64;
    for run in runs {
        let ours = run.diagram.sorted_eigenvalues();
        if ours.len() != run.ed.len() {
            return Err(format!("{}: eigenvalue count mismatch", run.label));
        }
        let dev = ours
            .iter()
            .zip(&run.ed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        if dev > 1e-9 {
            return Err(format!("{}: spectra differ by {dev:.3e}", run.label));
        }
        worst = worst.max(dev);
    }
    Ok(format!("{} runs, worst deviation {worst:.2e}", runs.len()))
}

fn check_sector_closure(runs: &[PipelineRun]) -> Result<String, String> {
    let mut worst = 0.0_f64;
    for run in runs {
        if run.max_leakage > 1e-10 {
            return Err(format!("{}: leakage {:.3e}", run.label, run.max_leakage));
        }
        worst = worst.max(run.max_leakage);
    }
    Ok(format!("max leakage {worst:.2e}"))
}

fn check_kramers(runs: &[PipelineRun]) -> Result<String, String> {
    let mut worst = 0.0_f64;
    for run in runs {
        for q in 0..run.n {
            let partner = (run.n - q) % run.n;
            let a = &run.diagram.entries[q].eigenvalues;
            let b = &run.diagram.entries[partner].eigenvalues;
            if a.len() != b.len() {
                return Err(format!("{}: sector sizes differ at q = {q}", run.label));
            }
            for (x, y) in a.iter().zip(b.iter()) {
                let dev = (x - y).abs();
                if dev > 1e-9 {
                    return Err(format!("{} q={q}: {dev:.3e}", run.label));
                }
                worst = worst.max(dev);
            }
        }
    }
    Ok(format!("worst pairing deviation {worst:.2e}"))
}

fn check_gate_counts() -> Result<String, String> {
    for p in 1..=8usize {
        let n = 1usize << p;
        let got = fmft_sequence(n).map_err(|e| e.to_string())?.gate_counts();
        if got.givens != n * p / 2 {
            return Err(format!("butterfly count at n = {n}: {}", got.givens));
        }
    }
    for n in [2usize, 4, 6, 8] {
        let got = mft_fold_compile(&dft_matrix(n))
            .map_err(|e| e.to_string())?
            .gate_counts();
        if got.givens != n * (n - 1) / 2 {
            return Err(format!("fold count at n = {n}: {}", got.givens));
        }
    }
    Ok("butterfly (n log2 n)/2, fold n(n-1)/2".into())
}

fn check_single_body(ns: &[usize]) -> Result<String, String> {
    let mut worst = 0.0_f64;
    for &n in ns {
        let realized = single_body_action(&fmft_sequence(n).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let target = dft_matrix(n).conjugate();
        let dev = realized.matrix().max_abs_diff(target.matrix());
        if dev > 1e-10 {
            return Err(format!("n = {n}: deviation {dev:.3e}"));
        }
        worst = worst.max(dev);
    }
    Ok(format!("action = conj(DFT) at n in {ns:?}, worst {worst:.2e}"))
}

fn check_slater(ns: &[usize]) -> Result<String, String> {
    let mut worst = 0.0_f64;
    let mut count = 0usize;
    for &n in ns {
        let seq = fmft_sequence(n).map_err(|e| e.to_string())?;
        for m in 0..=3usize.min(n) {
            let params = ChainParams::new(n, m, 1.0, 0.0).map_err(|e| e.to_string())?;
            let basis = SectorBasis::enumerate(n, m).map_err(|e| e.to_string())?;
            for ord in 0..basis.dim() {
                let ms = ModeSet::from_mask(basis.mask(ord), n).map_err(|e| e.to_string())?;
                let mut fast =
                    StateVector::basis_state(basis.clone(), ms.mask()).map_err(|e| e.to_string())?;
                apply_sequence(&mut fast, &seq).map_err(|e| e.to_string())?;
                let slow = slater_oracle(&ms, &params).map_err(|e| e.to_string())?;
                let dev = max_amp_diff(&fast, &slow);
                if dev > 1e-10 {
                    return Err(format!("n={n} modes {:?}: {dev:.3e}", ms.modes()));
                }
                worst = worst.max(dev);
                count += 1;
            }
        }
    }
    Ok(format!("{count} mode sets, worst {worst:.2e}"))
}

fn check_slater_sampled(n: usize, m: usize, samples: usize) -> Result<String, String> {
    let seq = fmft_sequence(n).map_err(|e| e.to_string())?;
    let params = ChainParams::new(n, m, 1.0, 0.0).map_err(|e| e.to_string())?;
    let basis = SectorBasis::enumerate(n, m).map_err(|e| e.to_string())?;
    let mut rng = SplitMix(0xFEED_0012);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let ord = rng.next_index(basis.dim());
        let ms = ModeSet::from_mask(basis.mask(ord), n).map_err(|e| e.to_string())?;
        let mut fast =
            StateVector::basis_state(basis.clone(), ms.mask()).map_err(|e| e.to_string())?;
        apply_sequence(&mut fast, &seq).map_err(|e| e.to_string())?;
        let slow = slater_oracle(&ms, &params).map_err(|e| e.to_string())?;
        let dev = max_amp_diff(&fast, &slow);
        if dev > 1e-10 {
            return Err(format!("modes {:?}: {dev:.3e}", ms.modes()));
        }
        worst = worst.max(dev);
    }
    Ok(format!("{samples} sampled sets at ({n},{m}), worst {worst:.2e}"))
}

fn check_round_trip(n: usize, m: usize, states: usize) -> Result<String, String> {
    let seq = fmft_sequence(n).map_err(|e| e.to_string())?;
    let inv = invert_sequence(&seq);
    let basis = SectorBasis::enumerate(n, m).map_err(|e| e.to_string())?;
    let mut rng = SplitMix(0xFEED_0004);
    let mut worst = 0.0_f64;
    for _ in 0..states {
        let orig = random_unit_state(basis.clone(), &mut rng);
        let mut v = orig.clone();
        apply_sequence(&mut v, &seq).map_err(|e| e.to_string())?;
        apply_sequence(&mut v, &inv).map_err(|e| e.to_string())?;
        let dev = max_amp_diff(&v, &orig);
        if dev > 1e-12 {
            return Err(format!("round trip off by {dev:.3e}"));
        }
        worst = worst.max(dev);
    }
    Ok(format!("{states} states at ({n},{m}), worst {worst:.2e}"))
}

fn check_inverse_network(ns: &[usize]) -> Result<String, String> {
    let mut worst = 0.0_f64;
    for &n in ns {
        let fwd = fmft_sequence(n).map_err(|e| e.to_string())?;
        let alt = fmft_inverse_sequence(n).map_err(|e| e.to_string())?;
        for m in 1..=2usize {
            let basis = SectorBasis::enumerate(n, m).map_err(|e| e.to_string())?;
            for ord in 0..basis.dim() {
                let mask = basis.mask(ord);
                let orig =
                    StateVector::basis_state(basis.clone(), mask).map_err(|e| e.to_string())?;
                let mut v = orig.clone();
                apply_sequence(&mut v, &fwd).map_err(|e| e.to_string())?;
                apply_sequence(&mut v, &alt).map_err(|e| e.to_string())?;
                let dev = max_amp_diff(&v, &orig);
                if dev > 1e-12 {
                    return Err(format!("n={n} m={m} mask {mask:#b}: {dev:.3e}"));
                }
                worst = worst.max(dev);
            }
        }
    }
    Ok(format!(
        "conjugated-twiddle network inverts the forward one, worst {worst:.2e}"
    ))
}

fn check_translation_eigenphase(n: usize) -> Result<String, String> {
    let seq = momentum_transform(n).map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    for m in 1..=2usize {
        let params = ChainParams::new(n, m, 1.0, 0.0).map_err(|e| e.to_string())?;
        let basis = SectorBasis::enumerate(n, m).map_err(|e| e.to_string())?;
        for ord in 0..basis.dim() {
            let ms = ModeSet::from_mask(basis.mask(ord), n).map_err(|e| e.to_string())?;
            let v = fmft_core::bethe::momentum_state_with(&ms, &params, &seq)
                .map_err(|e| e.to_string())?;
            let mut t = v.clone();
            t.translate();
            let k = 2.0 * std::f64::consts::PI * ms.momentum_residue(n) as f64 / n as f64;
            let phase = Complex64::from_polar(1.0, k);
            let dev = t
                .amplitudes()
                .iter()
                .zip(v.amplitudes())
                .map(|(a, b)| (a - phase * b).norm())
                .fold(0.0_f64, f64::max);
            if dev > 1e-10 {
                return Err(format!("modes {:?}: {dev:.3e}", ms.modes()));
            }
            worst = worst.max(dev);
        }
    }
    Ok(format!("translation eigenphases at n = {n}, worst {worst:.2e}"))
}

fn check_free_filled_limits() -> Result<String, String> {
    // Free fermions: the band diagram is the multiset of mode-energy sums.
    let params = ChainParams::new(8, 2, 1.0, 0.0).map_err(|e| e.to_string())?;
    let seq = momentum_transform(8).map_err(|e| e.to_string())?;
    let (diagram, _) = parallel_band_diagram(&params, &seq, 1e-10).map_err(|e| e.to_string())?;
    let mut expected: Vec<f64> = Vec::new();
    for a in 1..=8usize {
        for b in (a + 1)..=8 {
            let ms = ModeSet::new(vec![a, b], 8).map_err(|e| e.to_string())?;
            expected.push(hopping_energy(&ms, &params));
        }
    }
    expected.sort_by(f64::total_cmp);
    let got = diagram.sorted_eigenvalues();
    let dev = got
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    if dev > 1e-12 {
        return Err(format!("free spectrum off by {dev:.3e}"));
    }
    // Empty and filled rings have one-dimensional spectra 0 and n*u.
    for (m, want) in [(0usize, 0.0_f64), (8, 8.0 * 9.0)] {
        let params = ChainParams::new(8, m, 1.0, 9.0).map_err(|e| e.to_string())?;
        let (diagram, _) =
            parallel_band_diagram(&params, &seq, 1e-10).map_err(|e| e.to_string())?;
        let all = diagram.sorted_eigenvalues();
        if all.len() != 1 || (all[0] - want).abs() > 1e-10 {
            return Err(format!("m = {m}: spectrum {all:?}, want [{want}]"));
        }
    }
    Ok(format!("free limit exact to {dev:.2e}; empty/filled rings pinned"))
}

fn check_band_clusters_16() -> Result<String, String> {
    for m in [3usize, 4] {
        let params = ChainParams::new(16, m, 1.0, 100.0).map_err(|e| e.to_string())?;
        let seq = momentum_transform(16).map_err(|e| e.to_string())?;
        let (diagram, _) =
            parallel_band_diagram(&params, &seq, 1e-10).map_err(|e| e.to_string())?;
        let clusters = gap_clusters(&diagram).ok_or("clustering unexpectedly inactive")?;
        let hist = adjacency_histogram(16, m).map_err(|e| e.to_string())?;
        if clusters.len() != m {
            return Err(format!("m = {m}: {} clusters, expected {m}", clusters.len()));
        }
        for (p, cluster) in clusters.iter().enumerate() {
            if cluster.count as u64 != hist[p] {
                return Err(format!(
                    "m = {m}: cluster {p} holds {} states, expected {}",
                    cluster.count, hist[p]
                ));
            }
        }
        for pair in clusters.windows(2) {
            let gap = pair[1].mean - pair[0].mean;
            if (gap - 100.0).abs() > 6.0 {
                return Err(format!("m = {m}: cluster spacing {gap:.2} vs u = 100"));
            }
        }
    }
    Ok("(16,3) and (16,4): populations match bond counts, spacing near u".into())
}

fn check_wide_ring() -> Result<String, String> {
    // Free band at one particle, exact per sector.
    let params = ChainParams::new(64, 1, 1.0, 100.0).map_err(|e| e.to_string())?;
    let seq = momentum_transform(64).map_err(|e| e.to_string())?;
    let (diagram, _) = parallel_band_diagram(&params, &seq, 1e-10).map_err(|e| e.to_string())?;
    for entry in &diagram.entries {
        let want = -2.0 * (2.0 * std::f64::consts::PI * entry.q as f64 / 64.0).cos();
        if (entry.eigenvalues[0] - want).abs() > 1e-12 {
            return Err(format!("(64,1) q = {}: band off", entry.q));
        }
    }
    // Two particles at strong interaction: 1952 scattering states and 64
    // bound pairs, checked against direct diagonalization.
    let params = ChainParams::new(64, 2, 1.0, 100.0).map_err(|e| e.to_string())?;
    let (diagram, leak) = parallel_band_diagram(&params, &seq, 1e-10).map_err(|e| e.to_string())?;
    if leak > 1e-10 {
        return Err(format!("(64,2) leakage {leak:.3e}"));
    }
    let clusters = gap_clusters(&diagram).ok_or("clustering unexpectedly inactive")?;
    if clusters.len() != 2 || clusters[0].count != 1952 || clusters[1].count != 64 {
        return Err(format!(
            "(64,2) clusters {:?}",
            clusters.iter().map(|c| c.count).collect::<Vec<_>>()
        ));
    }
    let ed = full_ed_oracle(&params).map_err(|e| e.to_string())?;
    let ours = diagram.sorted_eigenvalues();
    let dev = ours
        .iter()
        .zip(&ed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    if dev > 1e-9 {
        return Err(format!("(64,2) spectra differ by {dev:.3e}"));
    }
    Ok(format!(
        "(64,1) exact band; (64,2) clusters 1952+64, ED deviation {dev:.2e}"
    ))
}

fn check_bottom_band() -> Result<String, String> {
    let params = ChainParams::new(16, 3, 1.0, 100.0).map_err(|e| e.to_string())?;
    let bound = 0.05 * params.u;
    let seq = momentum_transform(16).map_err(|e| e.to_string())?;

    let h = full_ed_matrix(&params).map_err(|e| e.to_string())?;
    let (vals, vecs) = eigh(&h, 1e-9).map_err(|e| e.to_string())?;
    let basis = SectorBasis::enumerate(16, 3).map_err(|e| e.to_string())?;
    let bottom = adjacency_histogram(16, 3).map_err(|e| e.to_string())?[0] as usize;
    let mut worst = 0.0_f64;
    for j in 0..bottom {
        let mut avg = 0.0;
        for r in 0..basis.dim() {
            avg += vecs[(r, j)].norm_sqr() * interaction_energy(&basis.state(r), &params);
        }
        if avg > bound {
            return Err(format!("ED eigenstate {j} at {:.3}: <interaction> {avg:.3}", vals[j]));
        }
        worst = worst.max(avg);
    }
    for sector in sector_partition(&params).map_err(|e| e.to_string())? {
        let built =
            build_sector_matrix(&sector, &params, &seq, 1e-10).map_err(|e| e.to_string())?;
        let (vals, vecs) = diagonalize_sector_with_vectors(&built.matrix).map_err(|e| e.to_string())?;
        for (j, &val) in vals.iter().enumerate() {
            if val >= 50.0 {
                break;
            }
            let mut hopping = 0.0;
            for (r, ms) in sector.mode_sets.iter().enumerate() {
                hopping += vecs[(r, j)].norm_sqr() * hopping_energy(ms, &params);
            }
            let avg = val - hopping;
            if avg > bound {
                return Err(format!("sector q={} state {j}: <interaction> {avg:.3}", sector.q));
            }
            worst = worst.max(avg);
        }
    }
    Ok(format!(
        "bottom band <interaction> <= {bound} on both routes, worst {worst:.3}"
    ))
}

fn quick_cases() -> Vec<(usize, usize, f64)> {
    let mut cases = Vec::new();
    for m in 1..=3usize {
        for u in [0.0, 1.0, 100.0] {
            cases.push((4, m, u));
        }
    }
    for m in 1..=4usize {
        for u in [0.0, 1.0, 100.0] {
            cases.push((8, m, u));
        }
    }
    for u in [0.0, 1.0, 100.0] {
        cases.push((6, 2, u));
    }
    cases
}

fn wide_cases() -> Vec<(usize, usize, f64)> {
    let mut cases = Vec::new();
    for m in 1..=4usize {
        for u in [0.0, 1.0, 100.0] {
            cases.push((16, m, u));
        }
    }
    cases
}

/// Run every check for the level, timing each.
pub fn run(level: Level) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    let mut push = |name: &'static str, outcome: Result<String, String>, start: Instant| {
        let elapsed = start.elapsed();
        let outcome = outcome.map(|detail| format!("{detail} ({elapsed:.2?})"));
        reports.push(CheckReport { name, outcome });
    };

    let t = Instant::now();
    push("gate-counts", check_gate_counts(), t);
    let t = Instant::now();
    push("single-body-fidelity", check_single_body(&[2, 4, 8]), t);
    let t = Instant::now();
    push("slater-oracle", check_slater(&[4, 8]), t);
    let t = Instant::now();
    push("fmft-round-trip", check_round_trip(8, 3, 5), t);
    let t = Instant::now();
    push("inverse-network", check_inverse_network(&[4, 8]), t);

    let t = Instant::now();
    match pipeline_runs(&quick_cases()) {
        Ok(runs) => {
            push("spectrum-equivalence", check_spectrum_equivalence(&runs), t);
            let t2 = Instant::now();
            push("sector-closure", check_sector_closure(&runs), t2);
            let t3 = Instant::now();
            push("kramers-degeneracy", check_kramers(&runs), t3);
        }
        Err(e) => {
            push("spectrum-equivalence", Err(e.clone()), t);
            push("sector-closure", Err(e.clone()), t);
            push("kramers-degeneracy", Err(e), t);
        }
    }

    let t = Instant::now();
    push("translation-eigenphase", check_translation_eigenphase(8), t);
    let t = Instant::now();
    push("free-filled-limits", check_free_filled_limits(), t);

    if level == Level::Full {
        let t = Instant::now();
        push("single-body-fidelity-wide", check_single_body(&[16, 32, 64]), t);
        let t = Instant::now();
        push("slater-oracle-wide", check_slater_sampled(16, 4, 100), t);
        let t = Instant::now();
        push("fmft-round-trip-wide", check_round_trip(16, 4, 20), t);

        let t = Instant::now();
        match pipeline_runs(&wide_cases()) {
            Ok(runs) => {
                push("spectrum-equivalence-wide", check_spectrum_equivalence(&runs), t);
                let t2 = Instant::now();
                push("sector-closure-wide", check_sector_closure(&runs), t2);
                let t3 = Instant::now();
                push("kramers-degeneracy-wide", check_kramers(&runs), t3);
            }
            Err(e) => {
                push("spectrum-equivalence-wide", Err(e.clone()), t);
                push("sector-closure-wide", Err(e.clone()), t);
                push("kramers-degeneracy-wide", Err(e), t);
            }
        }

        let t = Instant::now();
        push("band-clusters", check_band_clusters_16(), t);
        let t = Instant::now();
        push("bottom-band-interaction", check_bottom_band(), t);
        let t = Instant::now();
        push("wide-ring", check_wide_ring(), t);
    }

    reports
}
