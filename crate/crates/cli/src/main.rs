use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use tightsurg::contact::{
    self, enumerate_stabilization_choices, fillability_verdict, tightness_verdict, translate_contact_surgery,
    FillabilityReason, DEFAULT_WITNESS_BOUND,
};
use tightsurg::floer::{lspace_propagate, SlopeKnowledge, SlopePair};
use tightsurg::homology::{cokernel, h1_from_linking, h1_rational_surgery, smith_normal_form};
use tightsurg::kirby::plumbing_presentation;
use tightsurg::lattice::{contains_sublattice, donaldson_certificate, embed_bound, lambda_gram, search_diagonal};
use tightsurg::{
    FirstHomology, GramLattice, GraphDiagram, IntegerMatrix, KnotInfo, LegendrianKnot, PlumbingTree, Rational,
};

/// Version of the JSON envelope and of every payload inside it.
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "tightsurg", version, about = "Exact computations for contact surgeries on torus knots")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the commands that sample (translate); output is a function of it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Search bound (witness: prime window start; lattice-embed: largest m).
    #[arg(long, global = true)]
    bound: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve a contact surgery into (+1) and (-1) Legendrian surgeries.
    #[command(group(ArgGroup::new("coef").required(true).args(["slope", "contact"])))]
    Translate {
        #[arg(long, default_value = "unknot")]
        knot: KnotInfo,
        /// Smooth surgery slope; the contact coefficient is `slope - tb`.
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<Rational>,
        /// Contact surgery coefficient relative to the max-tb representative.
        #[arg(long, allow_hyphen_values = true)]
        contact: Option<Rational>,
        /// Number of (+1)-pushoffs used to split a positive coefficient.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Tightness of positive contact surgery on a knot with tb = 2g - 1.
    Tight {
        #[arg(long)]
        knot: KnotInfo,
        #[arg(long, allow_hyphen_values = true)]
        slope: Rational,
    },
    /// Fillability of contact structures on r-surgery along T(2n+1, 2).
    Fillable {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        slope: Rational,
    },
    /// Contact structures with the same homotopy data but distinct c1 orders.
    Witness {
        #[arg(long)]
        m: u64,
    },
    /// Star-shaped plumbing bounding r-surgery on T(2n+1, 2).
    Plumbing {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        slope: Rational,
        /// Also build and check the lattice obstruction certificate.
        #[arg(long)]
        certificate: bool,
    },
    /// Isometric embedding of a negative definite lattice.
    LatticeEmbed {
        /// `lambda:a1,n`, `plumbing:FILE` or a Gram matrix file.
        #[arg(long)]
        gram: String,
        /// Diagonal rank to test; default searches up to the bound.
        #[arg(long)]
        m: Option<u64>,
        /// Embed into this lattice instead of a diagonal one (same syntax).
        #[arg(long)]
        into: Option<String>,
    },
    /// First homology of a presentation.
    #[command(group(ArgGroup::new("input").required(true).args(["matrix", "linking", "diagram", "slope"])))]
    Homology {
        /// Relation matrix file; H1 is its cokernel.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Framed linking matrix file.
        #[arg(long)]
        linking: Option<PathBuf>,
        /// Surgery diagram file.
        #[arg(long)]
        diagram: Option<PathBuf>,
        /// Rational surgery on a knot.
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<Rational>,
    },
    /// Derive that a slope is an L-space surgery slope.
    Lspace {
        #[arg(long)]
        knot: KnotInfo,
        #[arg(long, allow_hyphen_values = true)]
        slope: Rational,
        /// Additional known L-space slopes `a/b`.
        #[arg(long, allow_hyphen_values = true)]
        known: Vec<SlopePair>,
    },
}

struct Output {
    command: &'static str,
    text: String,
    json: Value,
}

fn output(command: &'static str, text: String, payload: &impl Serialize) -> Result<Output> {
    Ok(Output { command, text, json: serde_json::to_value(payload)? })
}

fn read_input(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        return Ok(std::io::read_to_string(std::io::stdin())?);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn lattice_spec(spec: &str) -> Result<GramLattice> {
    if let Some(args) = spec.strip_prefix("lambda:") {
        let (a1, n) = args.split_once(',').context("expected lambda:a1,n")?;
        return Ok(lambda_gram(a1.trim().parse()?, n.trim().parse()?)?);
    }
    if let Some(path) = spec.strip_prefix("plumbing:") {
        let tree: PlumbingTree = read_input(&PathBuf::from(path))?.parse()?;
        return Ok(GramLattice::of_plumbing(&tree)?);
    }
    Ok(read_input(&PathBuf::from(spec))?.parse()?)
}

fn check(ok: bool, what: &str) -> Result<()> {
    if !ok {
        bail!(tightsurg::Error::Internal(format!("{what} failed re-verification")));
    }
    Ok(())
}

fn translate(
    knot: KnotInfo,
    slope: Option<Rational>,
    contact: Option<Rational>,
    k: Option<u64>,
    seed: Option<u64>,
) -> Result<Output> {
    let leg = LegendrianKnot::max_tb(&knot);
    let r = match (slope, contact) {
        (_, Some(c)) => c,
        (Some(s), None) => s - Rational::from_int(leg.tb()),
        (None, None) => unreachable!("clap enforces the group"),
    };
    let t = translate_contact_surgery(&leg, &r, k)?;
    let choice: Vec<(u64, u64)> = match seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            t.budgets()
                .iter()
                .map(|&b| {
                    let pos = rng.gen_range(0..=b);
                    (pos, b - pos)
                })
                .collect()
        }
        None => t.budgets().iter().map(|&b| (b, 0)).collect(),
    };
    let p = t.presentation(&choice)?;
    let h1 = p.diagram().h1();
    let expected = h1_rational_surgery(t.smooth_coefficient.numer(), t.smooth_coefficient.denom())?;
    check(h1.order() == expected.order(), "presentation homology")?;
    // cross-check the closed-form count when enumerating is cheap
    if let Some(neg) = t.negative.as_ref().filter(|_| t.choices() <= 10_000u32.into()) {
        if let Ok(all) = enumerate_stabilization_choices(&neg.expansion) {
            check(t.choices() == all.len().into(), "stabilization count")?;
        }
    }

    let mut s = String::new();
    writeln!(s, "knot {} (tb {}, rot {})", knot, leg.tb(), leg.rot())?;
    writeln!(s, "contact coefficient {}, smooth coefficient {}", t.contact_coefficient, t.smooth_coefficient)?;
    if let Some((a, b)) = &t.split {
        writeln!(s, "split {} = {} + ({})", t.contact_coefficient, a, b)?;
    }
    writeln!(s, "(+1)-pushoffs: {}", t.plus_ones)?;
    if let Some(neg) = &t.negative {
        writeln!(s, "(-1) chain for {}: {} with stabilization budgets {:?}", neg.coefficient, neg.expansion, neg.budgets)?;
    }
    writeln!(s, "stabilization choices: {}", t.choices())?;
    writeln!(s, "presentation for choice {choice:?}:")?;
    write!(s, "{}", p.diagram())?;
    writeln!(s, "H1 = {h1}")?;
    let payload = json!({ "translation": t, "choice": choice, "presentation": p.diagram().to_string(), "h1": h1 });
    output("translate", s, &payload)
}

fn tight(knot: KnotInfo, slope: Rational) -> Result<Output> {
    let v = tightness_verdict(&knot, &slope)?;
    let mut s = format!("S^3_{}({}): {:?}\n", v.slope, v.knot, v.verdict);
    writeln!(s, "contact coefficient {}", v.contact_coefficient)?;
    if let Some(t) = &v.recipe {
        writeln!(s, "recipe: {} (+1)-pushoffs, {} stabilization choices", t.plus_ones, t.choices())?;
    }
    output("tight", s, &v)
}

fn fillable(n: u64, slope: Rational) -> Result<Output> {
    let v = fillability_verdict(n, &slope)?;
    let mut s = format!("S^3_{}(T({},2)): {:?}\n", v.slope, 2 * n + 1, v.verdict);
    let certificate = match &v.reason {
        FillabilityReason::DonaldsonObstruction => {
            let c = donaldson_certificate(n, &slope)?;
            c.verify()?;
            writeln!(s, "reason: lattice obstruction, certificate verified")?;
            writeln!(s, "  L-space: {}", c.lspace.derivation)?;
            writeln!(s, "  plumbing determinant {}, {:?}", c.plumbing.determinant, c.plumbing.definiteness)?;
            writeln!(s, "  Lambda({},{n}) in the reversed plumbing lattice", c.plumbing.a1)?;
            writeln!(s, "  no embedding into D_m for m = {}", c.diagonal.m)?;
            Some(c)
        }
        FillabilityReason::NegativeUnknotSurgeries { first, second } => {
            match second {
                Some(b) => writeln!(s, "reason: contact ({first}) and ({b}) surgeries on Legendrian unknots")?,
                None => writeln!(s, "reason: contact ({first}) surgery on a Legendrian unknot")?,
            }
            None
        }
        FillabilityReason::LegendrianSurgery { contact_coefficient } => {
            writeln!(s, "reason: contact ({contact_coefficient}) surgery on the max-tb torus knot")?;
            None
        }
    };
    output("fillable", s, &json!({ "verdict": v, "certificate": certificate }))
}

fn witness(m: u64, bound: Option<u64>) -> Result<Output> {
    let w = contact::witness_nonisomorphic(m, bound.unwrap_or(DEFAULT_WITNESS_BOUND))?;
    w.verify()?;
    let primes: Vec<String> = w.primes.iter().map(u64::to_string).collect();
    let mut s = format!("primes {}\n", primes.join(", "));
    writeln!(s, "alpha = {}, slope {}, |H1| = {}", w.alpha, w.slope, w.h1_order)?;
    for e in &w.entries {
        writeln!(s, "  prime {}: i = {}, c1 = {} PD[mu], order {}", e.prime, e.index, e.c1_coefficient, e.order)?;
    }
    for r in &w.rejected {
        writeln!(s, "  rejected {:?}: {}", r.primes, r.reason)?;
    }
    output("witness", s, &w)
}

fn plumbing(n: u64, slope: Rational, certificate: bool) -> Result<Output> {
    let p = plumbing_presentation(n, &slope)?;
    let det = p.intersection_matrix().determinant()?;
    check(det == p.determinant, "plumbing determinant")?;
    check(det.magnitude() == p.slope.numer().magnitude(), "|det| = |p|")?;
    let w = p.tree.weights();
    let mut s = format!("S^3_{}(T({},2)) bounds the plumbing\n", p.slope, 2 * n + 1);
    writeln!(s, "centre {}", w[p.center])?;
    for leg in &p.legs {
        let ws: Vec<String> = leg.iter().map(|&v| w[v].to_string()).collect();
        writeln!(s, "  leg [{}]", ws.join(", "))?;
    }
    writeln!(s, "tail {} = {}", p.tail, tightsurg::neg_cf_eval(&p.tail))?;
    writeln!(s, "determinant {}, {:?}", p.determinant, p.definiteness)?;
    let m: Vec<String> = p.seifert.multiplicities.iter().map(ToString::to_string).collect();
    writeln!(s, "Seifert multiplicities ({})", m.join(", "))?;
    for step in &p.steps {
        let h = step.h1_order.as_ref().map_or("infinite".to_string(), ToString::to_string);
        writeln!(s, "  {} [{} components, |H1| {}]", step.description, step.components, h)?;
    }
    let cert = if certificate {
        let c = donaldson_certificate(n, &slope)?;
        c.verify()?;
        writeln!(s, "certificate verified: no diagonal embedding up to m = {}", c.diagonal.m)?;
        Some(c)
    } else {
        None
    };
    output("plumbing", s, &json!({ "plumbing": p, "certificate": cert }))
}

fn lattice_embed(gram: &str, m: Option<u64>, into: Option<&str>, bound: Option<u64>) -> Result<Output> {
    let g = lattice_spec(gram)?;
    if let Some(into) = into {
        let target = lattice_spec(into)?;
        let w = contains_sublattice(&target, &g)?;
        let mut s = String::new();
        match &w {
            Some(w) => {
                check(w.verify(target.gram(), g.gram()), "sublattice embedding")?;
                writeln!(s, "embedding found; images are the columns of")?;
                write!(s, "{}", w.b)?;
            }
            None => writeln!(s, "no embedding")?,
        }
        return output("lattice-embed", s, &json!({ "lattice": g, "target": target, "witness": w }));
    }
    let limit = match (m, bound) {
        (Some(m), _) => m,
        (None, Some(b)) => b,
        (None, None) => embed_bound(&g)?,
    };
    let top = search_diagonal(&g, limit as usize)?;
    let (found_m, outcome) = match top.witness {
        // embeddings persist as m grows, so the smallest m is found by a scan
        Some(_) if m.is_none() => {
            let mut hit = (limit, top);
            for k in 1..limit {
                let o = search_diagonal(&g, k as usize)?;
                if o.witness.is_some() {
                    hit = (k, o);
                    break;
                }
            }
            hit
        }
        _ => (limit, top),
    };
    let mut s = String::new();
    match &outcome.witness {
        Some(w) => {
            check(w.verify_diagonal(g.gram()), "diagonal embedding")?;
            writeln!(s, "embedding into D_{found_m}; images are the columns of")?;
            write!(s, "{}", w.b)?;
        }
        None => writeln!(s, "no embedding (bound m={limit})")?,
    }
    let payload = json!({
        "lattice": g,
        "m": found_m,
        "witness": outcome.witness,
        "nodes": outcome.nodes,
    });
    output("lattice-embed", s, &payload)
}

fn homology(
    matrix: Option<PathBuf>,
    linking: Option<PathBuf>,
    diagram: Option<PathBuf>,
    slope: Option<Rational>,
) -> Result<Output> {
    let (h, relations): (FirstHomology, Option<IntegerMatrix>) = if let Some(p) = matrix {
        let a: IntegerMatrix = read_input(&p)?.parse()?;
        (cokernel(&a), Some(a))
    } else if let Some(p) = linking {
        let a: IntegerMatrix = read_input(&p)?.parse()?;
        (h1_from_linking(&a)?, Some(a))
    } else if let Some(p) = diagram {
        let d: GraphDiagram = read_input(&p)?.parse()?;
        (d.h1(), None)
    } else if let Some(r) = slope {
        (h1_rational_surgery(r.numer(), r.denom())?, None)
    } else {
        unreachable!("clap enforces the group")
    };
    if let Some(a) = &relations {
        let snf = smith_normal_form(a);
        check(snf.u.mul(a)?.mul(&snf.v)? == snf.d, "Smith normal form")?;
    }
    let order = h.order().map_or("infinite".to_string(), |o| o.to_string());
    let s = format!("H1 = {h}\norder {order}\n");
    output("homology", s, &h)
}

fn lspace(knot: KnotInfo, slope: Rational, known: Vec<SlopePair>) -> Result<Output> {
    let kb = known.into_iter().fold(SlopeKnowledge::from_knot(&knot), SlopeKnowledge::with_seed);
    let chain = lspace_propagate(&kb, &slope)?;
    let s = match &chain {
        Some(c) => {
            c.verify(&kb)?;
            format!("{slope} is an L-space slope for {knot}\n{c}\n")
        }
        None => format!("no derivation of {slope} for {knot}\n"),
    };
    output("lspace", s, &json!({ "knot": knot.to_string(), "slope": slope, "derivation": chain }))
}

fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Translate { knot, slope, contact, k } => translate(knot, slope, contact, k, cli.seed),
        Command::Tight { knot, slope } => tight(knot, slope),
        Command::Fillable { n, slope } => fillable(n, slope),
        Command::Witness { m } => witness(m, cli.bound),
        Command::Plumbing { n, slope, certificate } => plumbing(n, slope, certificate),
        Command::LatticeEmbed { gram, m, into } => lattice_embed(&gram, m, into.as_deref(), cli.bound),
        Command::Homology { matrix, linking, diagram, slope } => homology(matrix, linking, diagram, slope),
        Command::Lspace { knot, slope, known } => lspace(knot, slope, known),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            let body = if json {
                let v = json!({ "schema_version": SCHEMA_VERSION, "command": out.command, "result": out.json });
                serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n"
            } else {
                out.text
            };
            match std::io::stdout().lock().write_all(body.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
