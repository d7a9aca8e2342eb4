use anyhow::{bail, Context, Result};
use dioph_core::analytic::{find_roots, jensen_from_roots, mahler_from_roots, theoretical_c_r, RootFinderConfig};
use dioph_core::covering::{classify_exceptional, separation_sweep, CoveringParams, LogBase, SeparationSweep};
use dioph_core::dimension::{
    box_counting_estimate, diophantine_scan, hausdorff_tail_detail, BoxCount, HausdorffSumParams, HausdorffTail,
    ScanSpec,
};
use dioph_core::family::{count_l1_ball, enumerate_family, family_size_bounds};
use dioph_core::words::{ball_gaps, enumerate_ball, IdentityTest, RELATION_FLOOR};
use dioph_core::{Complex64, IntPoly, WordForm};
use num_bigint::BigUint;
use serde::Serialize;

use crate::args::{BallArgs, BetaArgs, CoverArgs, FamilyArgs, Format, JensenArgs, Point, ScanArgs, TailArgs};
use crate::output::{csv_document, emit, json_document, jsonl_document, Constants, RunConfig};

pub enum Outcome {
    Ok,
    /// A checked inequality failed; the text names it.
    BoundViolated(String),
}

fn roots_config(seed: u64) -> RootFinderConfig {
    RootFinderConfig {
        seed,
        ..RootFinderConfig::default()
    }
}

fn exact_test(x: &Point) -> IdentityTest<'_> {
    IdentityTest::Exact {
        x: &x.exact,
        floor: RELATION_FLOOR,
    }
}

#[derive(Serialize)]
struct BallResult {
    l: u32,
    x: Complex64,
    /// `|W_l|`, distinct group elements.
    count: usize,
    word_count: f64,
    d_l: f64,
    argmin_word: Option<WordForm>,
    relations: usize,
    sphere_sizes: Vec<usize>,
}

pub fn ball(args: &BallArgs, seed: u64) -> Result<Outcome> {
    let cfg = RunConfig::new("ball", args, seed, &args.output, Constants::defaults())?;
    cfg.require(&[Format::Json])?;
    let ball = enumerate_ball(args.l).context("--l")?;
    let last = ball_gaps(&ball, args.x.value, &exact_test(&args.x))
        .context("--x")?
        .pop()
        .expect("ball has radius l");
    let res = BallResult {
        l: args.l,
        x: args.x.value,
        count: last.distinct_elements,
        word_count: last.word_count,
        d_l: last.d_l,
        argmin_word: last.argmin_word,
        relations: last.relations,
        sphere_sizes: (0..=args.l).map(|j| ball.sphere(j).len()).collect(),
    };
    emit(&args.output, &json_document(&cfg, res)?)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct BetaRow {
    l: u32,
    count: usize,
    word_count: f64,
    d_l: f64,
    beta_l: f64,
    relations: usize,
}

#[derive(Serialize)]
struct BetaResult {
    x: Complex64,
    lmax: u32,
    beta_estimate: f64,
    beta_words_estimate: f64,
    rows: Vec<BetaRow>,
}

pub fn beta(args: &BetaArgs, seed: u64) -> Result<Outcome> {
    let cfg = RunConfig::new("beta", args, seed, &args.output, Constants::defaults())?;
    cfg.require(&[Format::Json, Format::Csv])?;
    let ball = enumerate_ball(args.lmax).context("--lmax")?;
    let rep = dioph_core::words::beta_profile_from_ball(&ball, args.x.value, &exact_test(&args.x)).context("--x")?;
    let rows: Vec<BetaRow> = rep
        .per_l
        .iter()
        .skip(1)
        .zip(&rep.beta_l)
        .map(|(s, b)| BetaRow {
            l: s.l,
            count: s.distinct_elements,
            word_count: s.word_count,
            d_l: s.d_l,
            beta_l: *b,
            relations: s.relations,
        })
        .collect();
    let bytes = match cfg.output.format {
        Format::Csv => csv_document(
            &cfg,
            &["l", "count", "d_l", "beta_l"],
            rows.iter().map(|r| {
                vec![
                    r.l.to_string(),
                    r.count.to_string(),
                    r.d_l.to_string(),
                    r.beta_l.to_string(),
                ]
            }),
        )?,
        _ => json_document(
            &cfg,
            BetaResult {
                x: rep.x,
                lmax: rep.l_max,
                beta_estimate: rep.beta_estimate,
                beta_words_estimate: rep.beta_words_estimate,
                rows,
            },
        )?,
    };
    emit(&args.output, &bytes)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct FamilySummary {
    l: u32,
    /// Polynomials produced by the enumerator, zero included.
    count: usize,
    /// Lattice points of the l1-ball of radius l in dimension 2l+1.
    lattice_count: String,
    bound_100: String,
    bound_binomial: String,
    within_bound: bool,
    consistent: bool,
}

#[derive(Serialize)]
struct FamilyResult<'a> {
    #[serde(flatten)]
    summary: &'a FamilySummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    polynomials: Option<&'a [IntPoly]>,
}

pub fn family(args: &FamilyArgs, seed: u64) -> Result<Outcome> {
    let cfg = RunConfig::new("family", args, seed, &args.output, Constants::defaults())?;
    cfg.require(&[Format::Json, Format::Jsonl])?;
    let polys: Vec<IntPoly> = enumerate_family(args.l).context("--l")?.collect();
    let lattice = count_l1_ball(2 * args.l as usize + 1, args.l as usize);
    let (binomial, hundred) = family_size_bounds(args.l);
    let n = BigUint::from(polys.len());
    let summary = FamilySummary {
        l: args.l,
        count: polys.len(),
        lattice_count: lattice.to_string(),
        bound_100: hundred.to_string(),
        bound_binomial: binomial.to_string(),
        within_bound: n <= hundred,
        consistent: n == lattice,
    };
    let listed: &[IntPoly] = if args.count_only { &[] } else { &polys };
    let bytes = match cfg.output.format {
        Format::Jsonl => jsonl_document(&cfg, &summary, listed)?,
        _ => json_document(
            &cfg,
            FamilyResult {
                summary: &summary,
                polynomials: (!args.count_only).then_some(listed),
            },
        )?,
    };
    emit(&args.output, &bytes)?;
    Ok(if !summary.within_bound {
        Outcome::BoundViolated(format!("|P_{}| = {} exceeds 100^l", args.l, summary.count))
    } else if !summary.consistent {
        Outcome::BoundViolated(format!(
            "|P_{}| = {} differs from the lattice count {}",
            args.l, summary.count, summary.lattice_count
        ))
    } else {
        Outcome::Ok
    })
}

#[derive(Serialize)]
struct JensenRow {
    id: usize,
    poly: IntPoly,
    degree: usize,
    max_coeff: u64,
    large_roots: usize,
    witness_c_r: f64,
    jensen_pass: bool,
    chain_holds: bool,
    mahler: f64,
    mahler_pass: bool,
    reconstruction_error: f64,
    pass: bool,
}

#[derive(Serialize)]
struct JensenResult<'a> {
    l: u32,
    r: f64,
    c_r: f64,
    checked: usize,
    failures: usize,
    max_witness_c_r: f64,
    max_reconstruction_error: f64,
    rows: &'a [JensenRow],
}

pub fn jensen(args: &JensenArgs, seed: u64) -> Result<Outcome> {
    let cfg = RunConfig::new("jensen", args, seed, &args.output, Constants::defaults())?;
    cfg.require(&[Format::Json, Format::Csv])?;
    let c_r = args.c_r.unwrap_or_else(|| theoretical_c_r(args.r));
    let rcfg = roots_config(seed);
    let mut rows = Vec::new();
    for (id, p) in enumerate_family(args.l).context("--l")?.enumerate() {
        if p.is_zero() {
            continue;
        }
        let roots = find_roots::<f64>(&p, &rcfg).with_context(|| format!("roots of {p}"))?;
        let j = jensen_from_roots(&p, &roots, args.r, c_r);
        let m = mahler_from_roots(&p, &roots);
        rows.push(JensenRow {
            id,
            degree: roots.degree(),
            max_coeff: j.max_coeff,
            large_roots: j.large_root_count,
            witness_c_r: j.c_r_witness,
            jensen_pass: j.pass,
            chain_holds: j.chain_holds,
            mahler: m.mahler,
            mahler_pass: m.pass,
            reconstruction_error: roots.reconstruction_error(&p),
            pass: j.pass && j.chain_holds && m.pass,
            poly: p,
        });
    }
    let failures = rows.iter().filter(|r| !r.pass).count();
    let bytes = match cfg.output.format {
        Format::Csv => csv_document(
            &cfg,
            &["poly-id", "degree", "max-coeff", "large-roots", "witness-Cr", "pass"],
            rows.iter().map(|r| {
                vec![
                    r.id.to_string(),
                    r.degree.to_string(),
                    r.max_coeff.to_string(),
                    r.large_roots.to_string(),
                    r.witness_c_r.to_string(),
                    r.pass.to_string(),
                ]
            }),
        )?,
        _ => json_document(
            &cfg,
            JensenResult {
                l: args.l,
                r: args.r,
                c_r,
                checked: rows.len(),
                failures,
                max_witness_c_r: rows.iter().map(|r| r.witness_c_r).fold(0.0, f64::max),
                max_reconstruction_error: rows.iter().map(|r| r.reconstruction_error).fold(0.0, f64::max),
                rows: &rows,
            },
        )?,
    };
    emit(&args.output, &bytes)?;
    Ok(if failures > 0 {
        Outcome::BoundViolated(format!(
            "{failures} polynomials of P_{} fail the large-root or Mahler checks",
            args.l
        ))
    } else {
        Outcome::Ok
    })
}

#[derive(Serialize)]
struct CoverRecord<'a> {
    poly: &'a IntPoly,
    coverable: bool,
    disks: usize,
    witness: Option<Complex64>,
}

#[derive(Serialize)]
struct CoverSummary<'a> {
    params: &'a CoveringParams,
    inclusion_condition: bool,
    l: u32,
    k: u32,
    radius: f64,
    resolution: f64,
    max_disks: usize,
    family_size: usize,
    members: &'a [IntPoly],
    count_without_zero: usize,
    count_with_zero: usize,
    bound: f64,
    k_exceeds_log_l: bool,
    count_within_bound: bool,
    only_zero_when_required: bool,
    near_boundary: usize,
    separation: Option<&'a SeparationSweep>,
}

#[derive(Serialize)]
struct CoverResult<'a> {
    #[serde(flatten)]
    summary: &'a CoverSummary<'a>,
    verdicts: &'a [CoverRecord<'a>],
}

pub fn cover(args: &CoverArgs, seed: u64) -> Result<Outcome> {
    let base = |lin: Option<f64>, ln: Option<f64>, flag: &str| -> Result<Option<LogBase>> {
        let b = match (lin, ln) {
            (Some(v), _) => Some(LogBase::new(v)),
            (None, Some(v)) => Some(LogBase::from_ln(v)),
            _ => None,
        };
        b.transpose().with_context(|| flag.to_string())
    };
    let base_a = base(args.big_a, args.ln_a, "--A")?;
    let base_b = base(args.big_b, args.ln_b, "--B")?;
    let mut params = CoveringParams::with_bases(args.r, args.a, base_a, base_b)?.with_roots(roots_config(seed));
    if let Some(h) = args.resolution {
        params = params.with_resolution(h);
    }
    let cfg = RunConfig::new("cover", args, seed, &args.output, Constants::from_params(&params))?;
    cfg.require(&[Format::Json, Format::Jsonl])?;
    if args.separation && args.k > args.l {
        bail!("--separation: needs k <= l, got k = {} and l = {}", args.k, args.l);
    }

    let count = classify_exceptional(args.l, args.k, &params)?;
    let sweep = if args.separation {
        Some(separation_sweep(args.l, args.k, &params, args.samples)?)
    } else {
        None
    };
    let summary = CoverSummary {
        params: &params,
        inclusion_condition: params.inclusion_condition(),
        l: count.l,
        k: count.k,
        radius: count.radius,
        resolution: count.resolution,
        max_disks: count.max_disks,
        family_size: count.family_size,
        members: &count.members,
        count_without_zero: count.count_without_zero,
        count_with_zero: count.count_with_zero,
        bound: count.bound,
        k_exceeds_log_l: count.k_exceeds_log_l,
        count_within_bound: count.count_within_bound(),
        only_zero_when_required: count.only_zero_when_required(),
        near_boundary: count.near_boundary,
        separation: sweep.as_ref(),
    };
    let records: Vec<CoverRecord> = count
        .verdicts
        .iter()
        .map(|v| CoverRecord {
            poly: &v.poly,
            coverable: v.coverable,
            disks: v.disks,
            witness: v.witness,
        })
        .collect();
    let bytes = match cfg.output.format {
        Format::Jsonl => jsonl_document(&cfg, &summary, &records)?,
        _ => json_document(
            &cfg,
            CoverResult {
                summary: &summary,
                verdicts: &records,
            },
        )?,
    };
    emit(&args.output, &bytes)?;

    let mut broken = Vec::new();
    if !summary.count_within_bound {
        broken.push(format!(
            "|Q_{{{},{}}}| = {} exceeds {}",
            args.l, args.k, count.count_with_zero, count.bound
        ));
    }
    if !summary.only_zero_when_required {
        broken.push(format!(
            "Q_{{{},{}}} has nonzero members although k > ln l",
            args.l, args.k
        ));
    }
    if let Some(s) = &sweep {
        if s.unexplained > 0 {
            broken.push(format!(
                "{} separation failures with B above the sufficient threshold",
                s.unexplained
            ));
        }
    }
    Ok(if broken.is_empty() {
        Outcome::Ok
    } else {
        Outcome::BoundViolated(broken.join("; "))
    })
}

#[derive(Serialize)]
struct TailResult<'a> {
    params: &'a HausdorffSumParams,
    decay_base: f64,
    #[serde(flatten)]
    tail: &'a HausdorffTail,
    finite: bool,
}

pub fn tail(args: &TailArgs, seed: u64) -> Result<Outcome> {
    let cfg = RunConfig::new("tail", args, seed, &args.output, Constants::defaults())?;
    cfg.require(&[Format::Json])?;
    let mut params = HausdorffSumParams::new(args.alpha, args.a, args.n, args.lmax);
    params.big_c = args.big_c;
    params.certified = !args.uncertified;
    let t = hausdorff_tail_detail(&params)?;
    let res = TailResult {
        params: &params,
        decay_base: (args.alpha * args.a * std::f64::consts::LN_2).exp(),
        tail: &t,
        finite: t.total.is_finite(),
    };
    emit(&args.output, &json_document(&cfg, res)?)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct ScanResultOut<'a> {
    nx: usize,
    ny: usize,
    l: u32,
    base: f64,
    min_margin: f64,
    below_one: usize,
    grid: &'a [dioph_core::dimension::ScanPoint],
    box_counts: Vec<BoxCount>,
}

pub fn scan(args: &ScanArgs, seed: u64) -> Result<Outcome> {
    let cfg = RunConfig::new("scan", args, seed, &args.output, Constants::defaults())?;
    cfg.require(&[Format::Json, Format::Csv])?;
    let spec = ScanSpec {
        x0: args.rect.x0,
        y0: args.rect.y0,
        x1: args.rect.x1,
        y1: args.rect.y1,
        step: args.step,
    };
    let s = diophantine_scan(&spec, args.l, args.big_a)?;
    let bytes = match cfg.output.format {
        Format::Csv => csv_document(
            &cfg,
            &["i", "j", "re", "im", "l", "d_l", "violation_margin"],
            s.grid.iter().map(|p| {
                vec![
                    p.i.to_string(),
                    p.j.to_string(),
                    p.x.re.to_string(),
                    p.x.im.to_string(),
                    p.l.to_string(),
                    p.d_l.to_string(),
                    p.violation_margin.to_string(),
                ]
            }),
        )?,
        _ => {
            let thresholds = args.thresholds.as_ref().map_or(&[][..], |t| &t.0[..]);
            json_document(
                &cfg,
                ScanResultOut {
                    nx: s.nx,
                    ny: s.ny,
                    l: s.l,
                    base: s.base,
                    min_margin: s.grid.iter().map(|p| p.violation_margin).fold(f64::INFINITY, f64::min),
                    below_one: s.grid.iter().filter(|p| p.violation_margin < 1.0).count(),
                    grid: &s.grid,
                    box_counts: box_counting_estimate(&s, thresholds),
                },
            )?
        }
    };
    emit(&args.output, &bytes)?;
    Ok(Outcome::Ok)
}
