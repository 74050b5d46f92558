use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mrs_core::format::{
    parse_hom, parse_horn, parse_identification, parse_mrs, parse_script, parse_topology, print_mrs, replay_raw, Report,
};
use mrs_core::generators::{gen_closure_rules, gen_horn_rules};
use mrs_core::irreducibles::{check_mrs_hom, irreducible_elements, monoid_of_irreducibles, quotient_monoid, Materialized, MrsHom};
use mrs_core::pipeline::tietze_path;
use mrs_core::presentation::{check_hom_equivalence, check_triangles, check_unit_identity, counit, counit_naturality, g_of_monoid, HomLimits};
use mrs_core::{Backend, Budget, CertifiedMrs, CheckVerdict, Error, FiniteMonoid, Mrs};

#[derive(Parser)]
#[command(name = "mrs", version, about = "Workbench for monoidal rewriting systems")]
struct Cli {
    /// Largest element size enumerated by bounded checks.
    #[arg(long, global = true, default_value_t = 8)]
    bound: usize,
    /// Budget of rewrite steps and search expansions.
    #[arg(long, global = true, default_value_t = 20_000)]
    steps: usize,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Termination and confluence verdicts.
    Check { system: PathBuf },
    /// Normal form of an element, with its derivation.
    Nf { system: PathBuf, element: String },
    /// Irreducible elements, and their monoid when the system is certified.
    Irr { system: PathBuf },
    /// The quotient by connected components (finite carriers).
    Quotient { system: PathBuf },
    /// The canonical presentation of a table.
    Present { table: PathBuf },
    /// Image of a word of G(I(A)) under the counit.
    Counit { system: PathBuf, word: String },
    /// Unit identity, triangle identities and the hom-set comparison.
    AdjointCheck {
        table: PathBuf,
        system: PathBuf,
        /// System receiving `--map`, for the naturality check; without it the
        /// identity of the system is used.
        #[arg(long, requires = "map")]
        to: Option<PathBuf>,
        #[arg(long, requires = "to")]
        map: Option<PathBuf>,
        /// Word length for the presentation-side triangle.
        #[arg(long, default_value_t = 6)]
        words: usize,
    },
    /// Transformation scripts.
    Gett {
        #[command(subcommand)]
        action: GettAction,
    },
    /// Certified script from one presentation to another.
    Tietze {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        identify: Option<PathBuf>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Rule generators.
    Gen {
        #[command(subcommand)]
        action: GenAction,
    },
    /// Homomorphisms between systems.
    Hom {
        #[command(subcommand)]
        action: HomAction,
    },
}

#[derive(Subcommand)]
enum GettAction {
    /// Replays a script and prints the resulting system.
    Apply {
        system: PathBuf,
        script: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Replays a script, revalidating every certificate.
    Validate { system: PathBuf, script: PathBuf },
}

#[derive(Subcommand)]
enum GenAction {
    /// Closure rules of a finite topology.
    ClosureRules { topology: PathBuf },
    /// Rules of a Horn theory.
    HornRules { theory: PathBuf },
}

#[derive(Subcommand)]
enum HomAction {
    /// Checks a map of generators against both rule sets.
    Check { source: PathBuf, target: PathBuf, map: PathBuf },
}

/// What a command produced: a report, and optionally a file body printed
/// after it.
struct Outcome {
    report: Report,
    body: Option<String>,
    code: u8,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Mrs, Error> {
    parse_mrs(&read(path)?).map_err(|e| Error::usage(format!("{}: {e}", path.display())))
}

fn load_table(path: &Path) -> Result<FiniteMonoid, Error> {
    match load(path)?.backend {
        Backend::Table(m) => Ok((*m).clone()),
        other => Err(Error::usage(format!("{}: expected a table carrier, found {}", path.display(), other.kind_name()))),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::usage(format!("{}: {e}", path.display())))
}

fn exit_of(v: &CheckVerdict) -> u8 {
    v.exit_code() as u8
}

fn bool_code(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn table_lines(m: &FiniteMonoid) -> Vec<String> {
    (0..m.order())
        .map(|a| {
            let row: Vec<&str> = (0..m.order()).map(|b| m.name(m.mul(a, b))).collect();
            format!("{} | {}", m.name(a), row.join(" "))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let budget = Budget::default().with_size(cli.bound).with_steps(cli.steps);
    let out = |report: Report, code: u8| Outcome {
        report,
        body: None,
        code,
    };
    match &cli.command {
        Command::Check { system } => {
            let mrs = load(system)?;
            let c = CertifiedMrs::certify(mrs, &budget);
            let mut r = Report::new("check", &budget);
            r.verdict("noetherian", &c.noetherian, &c.mrs.backend);
            r.verdict("confluent", &c.confluent, &c.mrs.backend);
            let code = exit_of(&c.noetherian.clone().and(c.confluent.clone()));
            Ok(out(r, code))
        }
        Command::Nf { system, element } => {
            let mrs = load(system)?;
            let a = mrs.element(element)?;
            let t = mrs.normal_form(&a, &budget)?;
            let mut r = Report::new("nf", &budget);
            r.detail("normal form", mrs.format(t.end()));
            r.detail("derivation", t.render(&mrs.backend));
            r.trace = t.certificate_lines(&mrs.backend);
            Ok(out(r, 0))
        }
        Command::Irr { system } => {
            let mrs = load(system)?;
            let irr = irreducible_elements(&mrs, &budget);
            let mut r = Report::new("irr", &budget);
            let names: Vec<String> = irr.elements.iter().map(|e| mrs.format(e)).collect();
            r.detail("irreducibles", names.join(" "));
            r.detail("complete", irr.complete.to_string());
            let c = CertifiedMrs::certify(mrs, &budget);
            if c.is_certified() && irr.complete {
                let m = monoid_of_irreducibles(&c)?;
                r.trace = table_lines(&m.table);
            } else {
                r.verdict("noetherian", &c.noetherian, &c.mrs.backend);
                r.verdict("confluent", &c.confluent, &c.mrs.backend);
            }
            let code = if irr.complete { 0 } else { 2 };
            Ok(out(r, code))
        }
        Command::Quotient { system } => {
            let mrs = load(system)?;
            let q = quotient_monoid(&mrs, &budget)?;
            let mut r = Report::new("quotient", &budget);
            r.detail("classes", q.classes.len().to_string());
            for (i, class) in q.classes.iter().enumerate() {
                let members: Vec<String> = class.iter().map(|e| mrs.format(e)).collect();
                r.detail(&format!("class {}", q.table.name(i)), members.join(" "));
            }
            r.trace = table_lines(&q.table);
            Ok(out(r, 0))
        }
        Command::Present { table } => {
            let m = load_table(table)?;
            let g = g_of_monoid(&m)?;
            let mut r = Report::new("present", &budget);
            r.detail("letters", g.mrs.backend.generators().len().to_string());
            r.detail("rules", g.mrs.rules.len().to_string());
            Ok(Outcome {
                report: r,
                body: Some(print_mrs(&g.mrs)),
                code: 0,
            })
        }
        Command::Counit { system, word } => {
            let a = Materialized::new(load(system)?, &budget)?;
            let (g, eps) = counit(&a)?;
            let w = g.mrs.element(word)?;
            let image = eps.apply(&w)?;
            let mut r = Report::new("counit", &budget);
            r.detail("image", a.mrs().format(&image));
            r.detail("class", a.irr.table.name(a.class_of(&image)?).to_string());
            Ok(out(r, 0))
        }
        Command::AdjointCheck {
            table,
            system,
            to,
            map,
            words,
        } => {
            let m = load_table(table)?;
            let a = Materialized::new(load(system)?, &budget)?;
            let mut r = Report::new("adjoint-check", &budget);
            let unit = check_unit_identity(&m, &budget)?;
            r.detail("unit identity", unit.to_string());
            let tri = check_triangles(&a, &m, *words, &budget)?;
            r.detail("irreducible triangle", tri.irreducible_side.to_string());
            r.detail("presentation triangle", tri.presentation_side.to_string());
            let mut ok = unit && tri.holds();
            let (phi, b) = match (to, map) {
                (Some(t), Some(h)) => {
                    let target = load(t)?;
                    let phi = parse_hom(&read(h)?, a.mrs(), &target)?;
                    (phi, Materialized::new(target, &budget)?)
                }
                _ => (MrsHom::identity(a.mrs()), a.clone()),
            };
            match counit_naturality(&phi, &a, &b, &budget)? {
                Some(n) => {
                    r.detail("counit naturality", n.to_string());
                    ok &= n;
                }
                None => {
                    r.detail("counit naturality", "unknown within bound".to_string());
                }
            }
            match check_hom_equivalence(&m, &a, &HomLimits::default(), &budget) {
                Ok(h) => {
                    r.detail("monoid homomorphisms", h.monoid_homs.to_string());
                    r.detail("system homomorphisms", h.mrs_homs.to_string());
                    r.detail("two-cell classes", h.classes.to_string());
                    r.detail("bijective", h.bijective.to_string());
                    ok &= h.bijective;
                }
                Err(e) => {
                    r.detail("hom-set comparison", e.to_string());
                }
            }
            r.status = if ok { "verified" } else { "refuted" }.into();
            Ok(out(r, bool_code(ok)))
        }
        Command::Gett { action } => match action {
            GettAction::Apply { system, script, .. } | GettAction::Validate { system, script } => {
                let mrs = load(system)?;
                let raw = parse_script(&read(script)?)?;
                let (replay, _) = replay_raw(&mrs, &raw, &budget);
                let name = if matches!(action, GettAction::Apply { .. }) { "gett apply" } else { "gett validate" };
                let mut r = Report::new(name, &budget);
                r.verdict("replay", &replay.verdict, &replay.system.backend);
                r.detail("moves accepted", format!("{} of {}", replay.accepted, raw.len()));
                if let Some(i) = replay.failed_at {
                    r.detail("failed at move", i.to_string());
                    r.detail("line", raw[i].line.to_string());
                }
                let mut body = None;
                if let GettAction::Apply { output, .. } = action {
                    let text = print_mrs(&replay.system);
                    match output {
                        Some(p) => write(p, &text)?,
                        None => body = Some(text),
                    }
                }
                Ok(Outcome {
                    code: exit_of(&replay.verdict),
                    report: r,
                    body,
                })
            }
        },
        Command::Tietze {
            source,
            target,
            identify,
            output,
        } => {
            let a = load(source)?;
            let b = load(target)?;
            let identification = match identify {
                Some(p) => {
                    let ca = CertifiedMrs::certify(a.clone(), &budget).require()?;
                    let cb = CertifiedMrs::certify(b.clone(), &budget).require()?;
                    let ia = monoid_of_irreducibles(&ca)?;
                    let ib = monoid_of_irreducibles(&cb)?;
                    Some(parse_identification(&read(p)?, &ia.table, &ib.table)?)
                }
                None => None,
            };
            let report = tietze_path(&a, &b, identification, &budget)?;
            let mut r = Report::new("tietze", &budget);
            for (i, s) in report.stages.iter().enumerate() {
                r.detail(&format!("stage {}", i + 1), format!("{} ({} moves)", s.name, s.moves));
            }
            if let Some(f) = &report.failure {
                r.detail("failed", format!("stage {}, move {}: {}", f.stage, f.index, f.error));
            }
            r.detail("moves", report.script.len().to_string());
            r.detail("matches target", report.matches_target.to_string());
            r.verdict("replay", &report.verdict, &b.backend);
            let text = report.script.render(&a, &budget)?;
            let mut body = None;
            match output {
                Some(p) => write(p, &text)?,
                None => body = Some(text),
            }
            Ok(Outcome {
                code: exit_of(&report.verdict),
                report: r,
                body,
            })
        }
        Command::Gen { action } => {
            let (name, mrs) = match action {
                GenAction::ClosureRules { topology } => ("gen closure-rules", gen_closure_rules(&parse_topology(&read(topology)?)?)?),
                GenAction::HornRules { theory } => ("gen horn-rules", gen_horn_rules(&parse_horn(&read(theory)?)?)?),
            };
            let mut r = Report::new(name, &budget);
            r.detail("rules", mrs.rules.len().to_string());
            Ok(Outcome {
                report: r,
                body: Some(print_mrs(&mrs)),
                code: 0,
            })
        }
        Command::Hom {
            action: HomAction::Check { source, target, map },
        } => {
            let s = load(source)?;
            let t = load(target)?;
            let h = parse_hom(&read(map)?, &s, &t)?;
            let check = check_mrs_hom(&h, &budget);
            let mut r = Report::new("hom check", &budget);
            r.verdict("homomorphism", &check.verdict, &t.backend);
            for (rule, tr) in s.rules.iter().zip(&check.traces) {
                r.trace.push(match tr {
                    Some(tr) => tr.render(&t.backend),
                    None => format!("{}: no derivation found", s.format_rule(rule)),
                });
            }
            Ok(out(r, exit_of(&check.verdict)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(o) => {
            if cli.json {
                let mut value = serde_json::to_value(&o.report).expect("report serializes");
                if let Some(body) = &o.body {
                    value["output"] = serde_json::Value::String(body.clone());
                }
                println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            } else {
                // With a body on stdout the report goes to stderr, so the
                // output can be redirected into a file and read back.
                match &o.body {
                    Some(body) => {
                        eprint!("{}", o.report.render());
                        print!("{body}");
                    }
                    None => print!("{}", o.report.render()),
                }
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            let code = match &e {
                Error::Usage(_) | Error::Parse { .. } | Error::ForeignElement { .. } | Error::InvalidTable(_) => 3,
                Error::Undetermined(_) | Error::BudgetExhausted { .. } => 2,
                _ => 1,
            };
            if cli.json {
                let value = serde_json::json!({ "status": "error", "error": e.to_string() });
                println!("{value}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
