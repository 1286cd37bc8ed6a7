use std::fs;
use std::path::Path;

use maxfield::config::{MarginNullConfig, RunConfig};
use maxfield::construction::{parse_sample_csv, simulate_nested, ConstructionKind, Diagnostics, MaximaSample};
use maxfield::dependence::{tau_curve as curve_of, TauCurve};
use maxfield::inference::{
    maximize, parse_observations_csv, ObservedTauSet, Observations, SimSettings, ThetaSpace,
};
use maxfield::margins::{location_table, margin_report, table_to_csv, MarginNull};
use serde_json::json;

use crate::Failure;

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("json value serializes") + "\n"
}

fn warn_diagnostics(d: &Diagnostics) {
    if d.cap_hits > 0 {
        eprintln!(
            "warning: the event cap stopped {} of {} copies before the truncation bound",
            d.cap_hits, d.copies
        );
    }
    if d.below_floor > 0 {
        eprintln!("warning: {} events fell below the magnitude floor of the window", d.below_floor);
    }
}

fn simulate_all(cfg: &RunConfig) -> Result<Vec<MaximaSample>, Failure> {
    let sites = cfg.site_set(Path::new("."))?;
    let sim = cfg.simulator(sites)?;
    let samples = simulate_nested(&sim, &cfg.block_sizes(), cfg.n, cfg.seed)?;
    if let Some(meta) = &samples[0].meta {
        warn_diagnostics(&meta.diagnostics);
    }
    Ok(samples)
}

pub fn simulate(cfg: &RunConfig, observations: bool) -> Result<(), Failure> {
    let samples = simulate_all(cfg)?;
    for s in &samples {
        write(&cfg.out, &format!("sample_k{}.csv", s.k), &s.to_csv())?;
        let meta = json!({ "config": cfg, "sample": s.meta });
        write(&cfg.out, &format!("sample_k{}.json", s.k), &pretty(&meta))?;
        println!("k={}: {} replicates x {} sites", s.k, s.n(), s.n_sites());
    }
    if observations {
        let single = samples
            .iter()
            .find(|s| s.k == 1)
            .ok_or_else(|| Failure::usage("--observations needs block size 1 in k"))?;
        write(&cfg.out, "observations.csv", &Observations::from_sample(single).to_csv())?;
    }
    Ok(())
}

pub fn tau_curve(cfg: &RunConfig) -> Result<(), Failure> {
    let sites = cfg.site_set(Path::new("."))?;
    if sites.len() < 2 {
        return Err(Failure::usage("a tau curve needs at least two sites"));
    }
    let samples = simulate_all(cfg)?;
    let mut curve = TauCurve::default();
    for s in &samples {
        curve.extend(curve_of(s, &sites, &cfg.pair_selection())?);
    }
    write(&cfg.out, "tau_curve.csv", &curve.to_csv())?;
    let meta = json!({ "config": cfg, "sample": samples[0].meta });
    write(&cfg.out, "tau_curve.json", &pretty(&meta))?;
    println!("{} tau estimates written", curve.entries.len());
    Ok(())
}

fn null_for(cfg: &RunConfig, k: usize) -> MarginNull {
    let known = MarginNull::KnownScale {
        scale: cfg.margins.scale,
    };
    match cfg.margins.null {
        MarginNullConfig::BlockMaximum => MarginNull::block_maximum(k),
        MarginNullConfig::KnownScale => known,
        MarginNullConfig::Auto if cfg.construction == ConstructionKind::ShapeFunction => known,
        MarginNullConfig::Auto => MarginNull::block_maximum(k),
    }
}

pub const MIN_MARGIN_SAMPLE: usize = 100;

pub fn margins_test(cfg: &RunConfig) -> Result<(), Failure> {
    let samples = match &cfg.margins.sample {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            vec![parse_sample_csv(&text)?]
        }
        None => simulate_all(cfg)?,
    };
    let mut report = Vec::new();
    println!(
        "{:>5} {:>5} {:>7} {:>9} {:>8} {:>9} {:>8} {:>8} {:>7} {:>7}",
        "k", "site", "n", "a", "se(a)", "b", "se(b)", "A2", "rej5%", "rej10%"
    );
    for s in &samples {
        if s.n() < MIN_MARGIN_SAMPLE {
            return Err(Failure::usage(format!(
                "sample too small for margin tests: n={} < {MIN_MARGIN_SAMPLE}",
                s.n()
            )));
        }
        let null = null_for(cfg, s.k);
        let sites = margin_report(s, null)?;
        for m in &sites {
            let (a, se_a, b, se_b) = match m.known_scale {
                Some(f) => (f.location, f.std_error, cfg.margins.scale, 0.0),
                None => (m.ml.params.location, m.ml.se_location, m.ml.params.scale, m.ml.se_scale),
            };
            println!(
                "{:>5} {:>5} {:>7} {:>9.4} {:>8.4} {:>9.4} {:>8.4} {:>8.4} {:>7} {:>7}",
                s.k, m.site, m.n, a, se_a, b, se_b, m.tests[0].statistic, m.tests[0].reject, m.tests[1].reject
            );
        }
        report.push(json!({ "k": s.k, "null": null, "sites": sites }));
    }
    write(&cfg.out, "margins.json", &pretty(&json!({ "config": cfg, "margins": report })))?;
    Ok(())
}

pub fn table1(cfg: &RunConfig) -> Result<(), Failure> {
    let cells = location_table(cfg.table1.n, cfg.seed, cfg.truncation)?;
    println!(
        "{:<8} {:>4} {:>5} {:>9} {:>8} {:>9} {:>9} {:>8}",
        "family", "c", "d", "a", "se(a)", "A2", "ref a", "exact a"
    );
    for c in &cells {
        println!(
            "{:<8} {:>4} {:>5} {:>9.4} {:>8.4} {:>9.4} {:>9.4} {:>8.4}",
            c.family.to_string(),
            c.c,
            c.d,
            c.location,
            c.std_error,
            c.ad_statistic,
            c.reference_location,
            c.exact_location
        );
    }
    write(&cfg.out, "table1.csv", &table_to_csv(&cells))?;
    write(&cfg.out, "table1.json", &pretty(&json!({ "config": cfg, "cells": cells })))?;
    Ok(())
}

pub fn estimate(cfg: &RunConfig) -> Result<(), Failure> {
    let e = &cfg.estimate;
    let path = e
        .observations
        .as_ref()
        .ok_or_else(|| Failure::usage("no observations file given (--obs)"))?;
    let text =
        fs::read_to_string(path).map_err(|err| Failure::usage(format!("cannot read {}: {err}", path.display())))?;
    let obs = parse_observations_csv(&text)?;
    let sites = cfg.site_set(Path::new("."))?;
    let set = ObservedTauSet::from_observations(&obs, &sites, &e.ks)?;
    for w in &set.warnings {
        eprintln!("warning: {w}");
    }
    let space = ThetaSpace::new(cfg.model(), e.free.clone())?;
    let mut settings = SimSettings::new(e.n_sim, cfg.seed);
    settings.truncation = cfg.truncation;
    if e.isotropic {
        let (lo, hi) = set.distance_range();
        settings.grid = Some(e.grid_for(lo, hi)?);
    }
    let fit = maximize(&set, &space, &settings, &e.fit_options())?;
    if let Some(w) = &fit.diagnostics.curvature.warning {
        eprintln!("warning: {w}");
    }
    for (p, v) in &fit.estimates {
        println!("{p} = {v:.4}");
    }
    println!(
        "loglik = {:.4} ({} evaluations, converged: {})",
        fit.loglik, fit.evaluations, fit.converged
    );
    let report = json!({
        "config": cfg,
        "settings": settings,
        "fit": fit,
    });
    write(&cfg.out, "fit.json", &pretty(&report))?;
    if !fit.converged {
        return Err(Failure {
            code: 4,
            message: "optimizer budget exhausted before convergence; best point reported".into(),
        });
    }
    Ok(())
}
