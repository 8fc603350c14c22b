//! Flat CSV reports.
//!
//! Multipole tables have columns `two_S,K,q,re,im,W_K,A_K,P_K`, one row per
//! `(K, q)`, followed by `#` summary lines. Floats use shortest round-trip
//! formatting so output is byte-stable.

use std::io::Write;

use crate::error::Result;
use crate::multipole::{MultipoleSpectrum, StateAnalysis};
use crate::search::{ThreePhotonScan, TwoPhotonRow};
use crate::states::PolarizationState;
use crate::stokes::Reconstruction;

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct ShellReport {
    pub weight: f64,
    pub spectrum: MultipoleSpectrum,
    pub purity: Option<f64>,
    /// Rows above this rank are omitted (reconstructions stop at `K_max`).
    pub max_rank: usize,
}

#[derive(Clone, Debug, Default)]
pub struct MultipoleReport {
    pub shells: Vec<ShellReport>,
    pub tol: f64,
    pub seed: Option<u64>,
    pub aggregate_order: Option<usize>,
    pub notes: Vec<String>,
}

impl MultipoleReport {
    pub fn from_analysis(state: &PolarizationState, analysis: &StateAnalysis) -> Self {
        let shells = state
            .shells()
            .iter()
            .zip(&analysis.shells)
            .map(|((w, s), (_, sp))| ShellReport {
                weight: *w,
                spectrum: sp.clone(),
                purity: Some(s.purity()),
                max_rank: sp.max_rank(),
            })
            .collect();
        let aggregate_order = (analysis.shells.len() > 1).then_some(analysis.aggregate_order);
        Self { shells, tol: analysis.tol, seed: None, aggregate_order, notes: Vec::new() }
    }

    pub fn from_reconstruction(rec: &Reconstruction, tol: f64) -> Self {
        Self {
            shells: vec![ShellReport {
                weight: 1.0,
                spectrum: rec.to_spectrum(),
                purity: None,
                max_rank: rec.max_rank,
            }],
            tol,
            seed: None,
            aggregate_order: None,
            notes: vec![
                format!("max_rank={}", rec.max_rank),
                format!("residual={}", fmt_f64(rec.residual)),
                format!("condition_number={}", fmt_f64(rec.condition_number)),
            ],
        }
    }

    /// Unpolarization order of a shell, capped at the reported rank.
    pub fn shell_order(&self, shell: &ShellReport) -> usize {
        let sp = &shell.spectrum;
        (1..=shell.max_rank).take_while(|&k| sp.cumulative(k).unwrap_or(f64::INFINITY) <= self.tol).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["two_S", "K", "q", "re", "im", "W_K", "A_K", "P_K"])?;
        for shell in &self.shells {
            let sp = &shell.spectrum;
            let two_s = sp.spin().twice().to_string();
            for k in 0..=shell.max_rank {
                let (wk, ak, pk) = if k == 0 {
                    (fmt_f64(sp.strengths()[0]), "0".to_string(), String::new())
                } else {
                    (fmt_f64(sp.strength(k)?), fmt_f64(sp.cumulative(k)?), fmt_f64(sp.degree(k)?))
                };
                for q in -(k as i32)..=k as i32 {
                    let c = sp.component(k, q)?;
                    w.write_record([
                        two_s.as_str(),
                        &k.to_string(),
                        &q.to_string(),
                        &fmt_f64(c.re),
                        &fmt_f64(c.im),
                        &wk,
                        &ak,
                        &pk,
                    ])?;
                }
            }
        }
        let mut inner = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        for line in self.summary_lines() {
            writeln!(inner, "# {line}")?;
        }
        inner.flush()?;
        Ok(())
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for shell in &self.shells {
            let two_s = shell.spectrum.spin().twice();
            let order = self.shell_order(shell);
            let mut line = format!("two_S={two_s} weight={} unpolarization_order={order}", fmt_f64(shell.weight));
            if let Some(p) = shell.purity {
                line.push_str(&format!(" purity={}", fmt_f64(p)));
            }
            lines.push(line);
            let d = shell.spectrum.spin().dim() as f64;
            if let Some(p) = shell.purity {
                if order >= 1 && order < shell.max_rank && p > 1.0 / d + 1e-12 {
                    lines.push(format!("two_S={two_s} hidden polarization at K = {}", order + 1));
                }
            }
        }
        if let Some(o) = self.aggregate_order {
            lines.push(format!("aggregate_unpolarization_order={o}"));
        }
        lines.push(format!("tol={}", fmt_f64(self.tol)));
        match self.seed {
            Some(s) => lines.push(format!("seed={s}")),
            None => lines.push("seed=none".to_string()),
        }
        lines.extend(self.notes.iter().cloned());
        lines
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

/// `lambda,purity,P_2` rows.
pub fn write_two_photon_scan<W: Write>(rows: &[TwoPhotonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "purity", "P_2"])?;
    for r in rows {
        w.write_record([fmt_f64(r.lambda), fmt_f64(r.purity), fmt_f64(r.degree2)])?;
    }
    w.flush()?;
    Ok(())
}

/// `lambda3,lambda4,purity,A_1,A_2,A_3` rows, then a `#` line counting
/// skipped grid points.
pub fn write_three_photon_scan<W: Write>(scan: &ThreePhotonScan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda3", "lambda4", "purity", "A_1", "A_2", "A_3"])?;
    for r in &scan.rows {
        w.write_record([
            fmt_f64(r.lambda3),
            fmt_f64(r.lambda4),
            fmt_f64(r.purity),
            fmt_f64(r.a1),
            fmt_f64(r.a2),
            fmt_f64(r.a3),
        ])?;
    }
    let mut inner = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    writeln!(inner, "# skipped={} grid points outside the positivity region", scan.skipped.len())?;
    inner.flush()?;
    Ok(())
}
