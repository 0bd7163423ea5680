//! qclab command line: reproducible desk-scale experiments on the model.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 property violation
//! (a machine-replayable witness is emitted in the report).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qclab::abc;
use qclab::contract;
use qclab::error::Error;
use qclab::flip::{load_spec, two_piece_reference, Crossing, Model, PointCoord};
use qclab::num::{rat_display, rat_to_f64};
use qclab::oracle;
use qclab::paths;
use qclab::report;
use qclab::sampling;
use qclab::words;

#[derive(Parser)]
#[command(
    name = "qclab",
    version,
    about = "Geometry of flip graph manifolds: special paths, contracting projections, Morse elements, and abelian-by-cyclic subgroup analysis"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    /// Manifold spec file (JSON). Defaults to the built-in two-piece spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Seed for all randomized sampling.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Sample count.
    #[arg(long, default_value_t = 200)]
    samples: u64,
    /// Exploration / ball radius.
    #[arg(long, default_value_t = 4)]
    radius: usize,
    /// Oracle grid resolution.
    #[arg(long, default_value_t = 0.25)]
    resolution: f64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Manifold spec operations.
    Model {
        #[command(subcommand)]
        cmd: ModelCmd,
    },
    /// Special-path sampling and quasi-geodesy fits.
    Paths {
        #[command(subcommand)]
        cmd: PathsCmd,
    },
    /// Horizontal-slide defect audits.
    Slide {
        #[command(subcommand)]
        cmd: SlideCmd,
    },
    /// Contracting-projection tests.
    Contract {
        #[command(subcommand)]
        cmd: ContractCmd,
    },
    /// Morse classification of group words.
    Morse {
        #[command(subcommand)]
        cmd: MorseCmd,
    },
    /// Orbit quasi-isometry tests on the dual tree.
    Orbit {
        #[command(subcommand)]
        cmd: OrbitCmd,
    },
    /// Abelian-by-cyclic analyzer.
    Abc {
        #[command(subcommand)]
        cmd: AbcCmd,
    },
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Parse and validate a spec file.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum PathsCmd {
    /// Emit per-sample path data (CSV by default).
    Sample {
        #[command(flatten)]
        common: Common,
        /// Most walls a sampled pair may span.
        #[arg(long, default_value_t = 8)]
        max_walls: usize,
    },
    /// Fit the uniform quasi-geodesy constant.
    Qgfit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        max_walls: usize,
    },
}

#[derive(Subcommand)]
enum SlideCmd {
    /// Sample slide triples and verify the defect never goes positive.
    Audit {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ContractCmd {
    /// Contraction test of a Morse-axis subset (or the flat wall-plane
    /// control with --plane).
    Test {
        #[command(flatten)]
        common: Common,
        /// Morse word generating the axis.
        #[arg(long, default_value = "t0 ; v1: a ; t0^-1 ; v0: b")]
        word: String,
        /// Axis half-length in powers of the word.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Contraction constant; derived as 10 delta + R when omitted.
        #[arg(long)]
        constant: Option<f64>,
        /// Run the wall-plane negative control instead.
        #[arg(long)]
        plane: bool,
    },
    /// Certified quasi-geodesics with endpoints on the axis: neighborhood
    /// radius measurement against the derived bound.
    Radius {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "t0 ; v1: a ; t0^-1 ; v0: b")]
        word: String,
        #[arg(long, default_value_t = 16)]
        steps: usize,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
    },
}

#[derive(Subcommand)]
enum MorseCmd {
    /// Britton-reduce a word and classify it.
    Classify {
        /// Word literal, e.g. "t0 ; v1: a ; t0^-1 ; v0: b".
        word: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Fit the orbit-to-tree quasi-isometry constants.
    Qi {
        #[command(flatten)]
        common: Common,
        /// Generator word literal; repeat for several generators.
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
    },
}

#[derive(Subcommand)]
enum AbcCmd {
    /// Full analysis of Z^k x| Z for a row-major integer matrix.
    Analyze {
        /// Matrix entries, e.g. "2 1 1 1".
        matrix: String,
        #[command(flatten)]
        common: Common,
        /// Optional subgroup generators "m: z1 z2 ..."; repeatable.
        #[arg(long = "gen")]
        gens: Vec<String>,
    },
    /// Ball-scale conjugate intersection of a cyclic subgroup.
    Ball {
        matrix: String,
        /// Generator of the cyclic subgroup, "m: z1 z2 ...".
        #[arg(long, default_value = "1:")]
        h: String,
        /// Conjugating element.
        #[arg(long, default_value = "0: 1 0")]
        g: String,
        #[command(flatten)]
        common: Common,
    },
}

fn load_model(common: &Common) -> Result<Model, Error> {
    let spec = match &common.spec {
        Some(path) => load_spec(&std::fs::read_to_string(path)?)?,
        None => two_piece_reference(),
    };
    Ok(Model::new(spec))
}

fn point_json(model: &Model, p: &PointCoord) -> serde_json::Value {
    let piece = model.piece_of_addr(&p.addr).unwrap_or(usize::MAX);
    let addr: Vec<String> = p
        .addr
        .iter()
        .map(|c| {
            let side = if c.forward { "+" } else { "-" };
            let pc = model.exit_side(c.gluing, c.forward).0;
            format!(
                "t{}{}:{}",
                c.gluing,
                side,
                model.piece(pc).spine.display_walk(&c.coset)
            )
        })
        .collect();
    let pos = match &p.pos {
        qclab::flip::BasePos::Vertex(v) => {
            json!({ "vertex": model.piece(piece).spine.display_walk(v) })
        }
        qclab::flip::BasePos::Edge { from, step, offset } => json!({
            "from": model.piece(piece).spine.display_walk(from),
            "step": model.piece(piece).spine.label_of(*step),
            "offset": rat_display(offset),
        }),
    };
    json!({
        "piece": piece,
        "address": addr,
        "base": pos,
        "fiber": rat_display(&p.fiber),
    })
}

fn parse_abc_element(text: &str, k: usize) -> Result<abc::AbcElement, Error> {
    let (m, rest) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("element literal {text:?}: want \"m: z1 z2 ...\"")))?;
    let t_exp: i64 = m
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad stable exponent in {text:?}")))?;
    let vec: Vec<i64> = rest
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad vector entry {t:?}")))
        })
        .collect::<Result<_, Error>>()?;
    let mut vec = vec;
    vec.resize(k, 0);
    Ok(abc::AbcElement::new(t_exp, vec))
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("QCLAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    match cli.cmd {
        Cmd::Model {
            cmd: ModelCmd::Validate { file, common },
        } => {
            let text = std::fs::read_to_string(&file)?;
            let spec = load_spec(&text)?;
            let model = Model::new(spec);
            let gap = model.min_wall_separation(3)?;
            let summary = json!({
                "pieces": model.spec.pieces.len(),
                "gluings": model.spec.gluings.len(),
                "betti": model.spec.pieces.iter().map(|p| p.spine.betti()).collect::<Vec<_>>(),
                "wall_gap": rat_display(&gap.gap),
                "wall_gap_radius": gap.radius_used,
                "valid": true,
            });
            report::emit(common.out.as_deref(), &report::to_json(&summary))?;
            Ok(0)
        }
        Cmd::Paths {
            cmd: PathsCmd::Sample { common, max_walls },
        } => {
            let model = load_model(&common)?;
            let rep = oracle::qg_fit(
                &model,
                common.seed,
                common.samples,
                max_walls,
                common.resolution,
            )?;
            match common.format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rep
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.index.to_string(),
                                r.walls.to_string(),
                                report::fmt_f64(r.length_l1),
                                report::fmt_f64(r.length_l2),
                                report::fmt_f64(r.oracle),
                                report::fmt_f64(r.lower_bound),
                                report::fmt_f64(r.ratio),
                            ]
                        })
                        .collect();
                    let csv = report::to_csv(
                        &[
                            "index",
                            "walls",
                            "length_l1",
                            "length_l2",
                            "oracle",
                            "lower_bound",
                            "ratio",
                        ],
                        &rows,
                    );
                    report::emit(common.out.as_deref(), &csv)?;
                }
                Format::Json => {
                    report::emit(common.out.as_deref(), &report::to_json(&rep))?;
                }
            }
            Ok(0)
        }
        Cmd::Paths {
            cmd: PathsCmd::Qgfit { common, max_walls },
        } => {
            let model = load_model(&common)?;
            let rep = oracle::qg_fit(
                &model,
                common.seed,
                common.samples,
                max_walls,
                common.resolution,
            )?;
            let summary = json!({
                "kappa": rep.kappa,
                "worst_ratio": rep.worst_ratio,
                "samples": rep.samples,
                "resolution": rep.resolution,
                "seed": rep.seed,
            });
            report::emit(common.out.as_deref(), &report::to_json(&summary))?;
            Ok(0)
        }
        Cmd::Slide {
            cmd: SlideCmd::Audit { common },
        } => {
            let model = load_model(&common)?;
            let cross = Crossing {
                gluing: 0,
                forward: true,
                coset: Vec::new(),
            };
            let addr1 = model.neighbor_addr(&[], &cross);
            let wall = qclab::flip::WallId {
                owner: Vec::new(),
                cycle: model.exit_side(0, true).1,
                coset: Vec::new(),
            };
            let mut max_defect = f64::NEG_INFINITY;
            let mut violations = 0u64;
            let mut witness = None;
            for i in 0..common.samples {
                let mut rng = sampling::fork(common.seed, i);
                let x = sampling::random_point(&mut rng, &model, 0, 3);
                let mut z = sampling::random_point(&mut rng, &model, 0, 3);
                z.addr = addr1.clone();
                let mut line = model.line_of_wall(&wall)?;
                let arc = sampling::random_dyadic(&mut rng, 3);
                let y = PointCoord {
                    addr: Vec::new(),
                    pos: line.point_at(&arc),
                    fiber: sampling::random_dyadic(&mut rng, 3),
                };
                let (w, defect) = paths::horizontal_slide(&model, &x, &y, &z)?;
                let d = rat_to_f64(&defect);
                max_defect = max_defect.max(d);
                if d > 0.0 {
                    violations += 1;
                    if witness.is_none() {
                        witness = Some(json!({
                            "sample": i,
                            "defect": rat_display(&defect),
                            "x": point_json(&model, &x),
                            "y": point_json(&model, &y),
                            "z": point_json(&model, &z),
                            "w": point_json(&model, &w),
                        }));
                    }
                }
            }
            let rep = json!({
                "samples": common.samples,
                "seed": common.seed,
                "max_defect": max_defect,
                "violations": violations,
                "witness": witness,
                "passed": violations == 0,
            });
            report::emit(common.out.as_deref(), &report::to_json(&rep))?;
            Ok(if violations == 0 { 0 } else { 2 })
        }
        Cmd::Contract {
            cmd:
                ContractCmd::Test {
                    common,
                    word,
                    steps,
                    constant,
                    plane,
                },
        } => {
            let model = load_model(&common)?;
            if plane {
                let plane = contract::PlaneSubset {
                    chart: Vec::new(),
                    crossing: Crossing {
                        gluing: 0,
                        forward: true,
                        coset: Vec::new(),
                    },
                };
                let c = constant.unwrap_or(4.0);
                let extent = (2.0 * c).ceil() as i64;
                let rep = contract::check_plane_control(
                    &model,
                    &plane,
                    c,
                    common.samples,
                    extent,
                    common.seed,
                )?;
                let violated = rep.violations > 0;
                report::emit(common.out.as_deref(), &report::to_json(&rep))?;
                // The control is expected to violate; report exit 2 only
                // when a witness exists, matching the violation contract.
                return Ok(if violated { 2 } else { 0 });
            }
            let g = words::parse_word(&model, &word)?;
            let subset = contract::subset_from_morse(&model, &g, &PointCoord::root(), steps)?;
            let tube = contract::measure_tube_radius(&model, &subset, 60, common.seed ^ 1)?;
            let c = constant.unwrap_or(10.0 * subset.delta + tube);
            let rep = contract::check_contracting(&model, &subset, c, common.samples, common.seed)?;
            let out = json!({
                "delta": subset.delta,
                "tube_radius": tube,
                "report": rep,
            });
            report::emit(common.out.as_deref(), &report::to_json(&out))?;
            Ok(if rep.passed { 0 } else { 2 })
        }
        Cmd::Contract {
            cmd:
                ContractCmd::Radius {
                    common,
                    word,
                    steps,
                    lambda,
                },
        } => {
            let model = load_model(&common)?;
            let g = words::parse_word(&model, &word)?;
            let subset = contract::subset_from_morse(&model, &g, &PointCoord::root(), steps)?;
            let tube = contract::measure_tube_radius(&model, &subset, 60, common.seed ^ 1)?;
            let c = 10.0 * subset.delta + tube;
            let kball = contract::ball_projection_check(&model, &subset, c, 40, common.seed ^ 2)?;
            let params = contract::ContractionParams::new(c, kball.least_k, lambda);
            let rep = contract::quasiconvexity_radius(
                &model,
                &subset,
                lambda,
                &params,
                common.samples,
                common.seed,
            )?;
            let out = json!({
                "delta": subset.delta,
                "tube_radius": tube,
                "params": params,
                "ball_projection": kball,
                "report": rep,
            });
            let ok = rep.measured <= rep.bound;
            report::emit(common.out.as_deref(), &report::to_json(&out))?;
            Ok(if ok { 0 } else { 2 })
        }
        Cmd::Morse {
            cmd: MorseCmd::Classify { word, common },
        } => {
            let model = load_model(&common)?;
            let w = words::parse_word(&model, &word)?;
            let nf = model.britton_reduce(&w)?;
            let tau = model.translation_length(&w)?;
            let morse = if nf.reduced.is_identity() {
                serde_json::Value::Null
            } else {
                json!(tau > 0)
            };
            let rep = json!({
                "word": word,
                "britton": words::display_word(&model, &nf.reduced),
                "stable_count": nf.stable_count,
                "translation_length": tau,
                "morse": morse,
            });
            report::emit(common.out.as_deref(), &report::to_json(&rep))?;
            Ok(0)
        }
        Cmd::Orbit {
            cmd: OrbitCmd::Qi { common, gens },
        } => {
            let model = load_model(&common)?;
            let gens = gens
                .iter()
                .map(|g| words::parse_word(&model, g))
                .collect::<Result<Vec<_>, _>>()?;
            match words::orbit_qi_test(&model, &gens, common.radius, &PointCoord::root()) {
                Ok(rep) => {
                    report::emit(common.out.as_deref(), &report::to_json(&rep))?;
                    Ok(0)
                }
                Err(Error::BoundedOrbit { index, piece }) => {
                    let witness = json!({
                        "bounded_orbit": true,
                        "generator": index,
                        "fixes_vertex_of_piece": piece,
                    });
                    report::emit(common.out.as_deref(), &report::to_json(&witness))?;
                    Ok(2)
                }
                Err(e) => Err(e),
            }
        }
        Cmd::Abc {
            cmd: AbcCmd::Analyze {
                matrix,
                common,
                gens,
            },
        } => {
            let phi = abc::parse_matrix(&matrix)?;
            let group = abc::AbcGroup::new(phi.clone())?;
            let order = abc::periodic_order(&phi)?;
            let order_cyc = abc::periodic_order_cyclotomic(&phi);
            let elements = if gens.is_empty() {
                vec![abc::AbcElement::new(1, vec![0; phi.k])]
            } else {
                gens.iter()
                    .map(|g| parse_abc_element(g, phi.k))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let classification = abc::classify_subgroup(&group, &elements)?;
            let sq = abc::sq_classification(&group, &elements)?;
            let witnesses = match order {
                Some(l) => {
                    let basis: Vec<Vec<String>> = abc::fixed_lattice(&phi, l)?
                        .iter()
                        .map(|v| v.iter().map(|x| x.to_string()).collect())
                        .collect();
                    json!({ "fixed_lattice_basis": basis, "power": l })
                }
                None => serde_json::Value::Null,
            };
            let rep = json!({
                "matrix": matrix,
                "k": phi.k,
                "trace": phi.trace().to_string(),
                "periodic_order": order,
                "periodic_order_cyclotomic": order_cyc,
                "routes_agree": order == order_cyc,
                "exists_finite_height": order.is_none(),
                "classification": classification,
                "sq_classification": sq,
                "witnesses": witnesses,
            });
            report::emit(common.out.as_deref(), &report::to_json(&rep))?;
            Ok(0)
        }
        Cmd::Abc {
            cmd: AbcCmd::Ball {
                matrix,
                h,
                g,
                common,
            },
        } => {
            let phi = abc::parse_matrix(&matrix)?;
            let group = abc::AbcGroup::new(phi.clone())?;
            let h = parse_abc_element(&h, phi.k)?;
            let g = parse_abc_element(&g, phi.k)?;
            let matches = abc::ball_conjugate_intersection(&group, &h, &g, common.radius as i64);
            let rep = json!({
                "matrix": matrix,
                "radius": common.radius,
                "matches": matches,
                "empty": matches.is_empty(),
            });
            report::emit(common.out.as_deref(), &report::to_json(&rep))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
