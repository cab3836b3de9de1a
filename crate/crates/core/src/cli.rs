//! The `abduce` command line.
//!
//! Exit codes: 0 when at least one explanation was produced, 1 when none
//! was, 2 for usage errors and unusable knowledge bases.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::kb::{has_errors, parse_atoms, parse_kb, validate, KnowledgeBase, Severity};
use crate::oracle::{enumerate_explanations, write_csv};
use crate::protocol::{describe, emission, read_command, snapshot, Command, Message, Transcriber};
use crate::search::{renormalize, Answer, Explanation, Limits, Session, StepOutcome};
use crate::term::Atom;
use crate::valuation::ValuatorKind;

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_NONE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "abduce", version, about = "Find the most plausible explanations of a goal")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Search for explanations of a goal, best first.
    Explain {
        #[arg(long)]
        kb: PathBuf,
        /// Comma-separated atoms, e.g. "sum(1), carry(0)".
        #[arg(long)]
        goal: String,
        #[arg(long, default_value = "prob")]
        valuator: ValuatorKind,
        #[arg(long, default_value_t = 1)]
        top_k: usize,
        /// Largest depth bound of the iterative-deepening schedule.
        #[arg(long)]
        max_depth: Option<u32>,
        /// Speak the line protocol on stdin/stdout.
        #[arg(long)]
        interactive: bool,
        /// Write the full event log here, one protocol message per line.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Parse and validate a knowledge base.
    Check {
        #[arg(long)]
        kb: PathBuf,
    },
    /// Enumerate every explanation up to a size, as CSV.
    Oracle {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
}

pub fn run<I, T>(args: I, input: impl BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_FOUND };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match cli.command {
        Cmd::Explain { kb, goal, valuator, top_k, max_depth, interactive, trace } => {
            let opts = ExplainOpts { valuator, top_k, max_depth, interactive, trace };
            explain(&kb, &goal, opts, input, out, err)
        }
        Cmd::Check { kb } => check(&kb, out, err),
        Cmd::Oracle { kb, goal, max_size } => oracle(&kb, &goal, max_size, out, err),
    }
}

fn load_kb(path: &Path, err: &mut dyn Write) -> Result<KnowledgeBase, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "cannot read {}: {e}", path.display());
        EXIT_USAGE
    })?;
    parse_kb(&text).map_err(|e| {
        let _ = writeln!(err, "{}: {e}", path.display());
        EXIT_USAGE
    })
}

fn load_goal(text: &str, err: &mut dyn Write) -> Result<Vec<Atom>, i32> {
    parse_atoms(text).map_err(|e| {
        let _ = writeln!(err, "goal: {e}");
        EXIT_USAGE
    })
}

fn check(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let kb = match load_kb(path, err) {
        Ok(kb) => kb,
        Err(code) => return code,
    };
    let diags = validate(&kb);
    for d in &diags {
        let _ = writeln!(out, "{d}");
    }
    if has_errors(&diags) {
        return EXIT_USAGE;
    }
    let warnings = diags.iter().filter(|d| d.severity == Severity::Warning).count();
    let _ = writeln!(
        out,
        "ok: {} clauses, {} constraints, {} hypotheses, {} warnings",
        kb.facts.len(),
        kb.constraints.len(),
        kb.hypotheses.len(),
        warnings
    );
    EXIT_FOUND
}

fn oracle(path: &Path, goal: &str, max_size: usize, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (kb, goal) = match load_kb(path, err).and_then(|kb| Ok((kb, load_goal(goal, err)?))) {
        Ok(x) => x,
        Err(code) => return code,
    };
    match enumerate_explanations(&kb, &goal, max_size) {
        Ok(table) => {
            if let Err(e) = write_csv(&table, &mut *out) {
                let _ = writeln!(err, "{e}");
                return EXIT_USAGE;
            }
            if table.entries.is_empty() {
                EXIT_NONE
            } else {
                EXIT_FOUND
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_USAGE
        }
    }
}

struct ExplainOpts {
    valuator: ValuatorKind,
    top_k: usize,
    max_depth: Option<u32>,
    interactive: bool,
    trace: Option<PathBuf>,
}

/// Forwards session events as protocol messages: to stdout in interactive
/// mode, and to the trace.
struct Channel<'a> {
    out: &'a mut dyn Write,
    interactive: bool,
    transcriber: Transcriber,
    cursor: usize,
    trace: Vec<String>,
}

impl Channel<'_> {
    fn send(&mut self, msg: &Message) {
        let line = msg.to_line();
        if self.interactive && msg.is_outbound() {
            let _ = writeln!(self.out, "{line}");
            let _ = self.out.flush();
        }
        self.trace.push(line);
    }

    fn drain(&mut self, session: &Session) {
        let events = &session.events()[self.cursor..];
        self.cursor = session.events().len();
        for e in events {
            let msg = self.transcriber.message(e);
            self.send(&msg);
        }
    }
}

/// Reads client lines until the pending question is answered. Observations
/// that arrive meanwhile are injected right away. End of input counts as
/// `unknown`.
fn await_answer(
    session: &mut Session,
    atom: &Atom,
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    chan: &mut Channel<'_>,
) -> Answer {
    loop {
        let line = match lines.next() {
            Some(Ok(line)) => line,
            _ => return Answer::Unknown,
        };
        if line.trim().is_empty() {
            continue;
        }
        match read_command(&line) {
            Ok(Command::Answer(a, value)) if &a == atom => return value,
            Ok(Command::Answer(a, _)) => chan.send(&Message::Error { message: format!("no question about {a} is pending") }),
            Ok(Command::Observe(o)) => {
                if let Err(e) = session.inject_observation(o) {
                    chan.send(&Message::Error { message: e.to_string() });
                }
                chan.drain(session);
            }
            Err(e) => chan.send(&Message::Error { message: e.to_string() }),
        }
    }
}

fn explain(
    path: &Path,
    goal: &str,
    opts: ExplainOpts,
    input: impl BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (kb, goal) = match load_kb(path, err).and_then(|kb| Ok((kb, load_goal(goal, err)?))) {
        Ok(x) => x,
        Err(code) => return code,
    };
    for d in validate(&kb).iter().filter(|d| d.severity == Severity::Warning) {
        let _ = writeln!(err, "{d}");
    }
    let mut limits = Limits::default();
    if let Some(d) = opts.max_depth {
        limits.max_depth = d;
        limits.initial_depth = limits.initial_depth.min(d);
    }
    let valuator = opts.valuator.build(&kb);
    let mut session = match Session::start(goal, kb, valuator, limits) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_USAGE;
        }
    };

    let mut chan = Channel { out, interactive: opts.interactive, transcriber: Transcriber::new(), cursor: 0, trace: Vec::new() };
    let mut lines = input.lines();
    let mut found: Vec<Explanation> = Vec::new();
    let mut reason = "exhausted";
    let mut failure = None;
    while found.len() < opts.top_k {
        let outcome = session.step();
        chan.drain(&session);
        match outcome {
            Err(e) => {
                reason = "step budget";
                chan.send(&Message::Error { message: e.to_string() });
                failure = Some(e);
                break;
            }
            Ok(StepOutcome::Continue) => {}
            Ok(StepOutcome::Emitted(e)) => {
                found.push(e);
                if opts.interactive {
                    chan.send(&snapshot(&session));
                }
            }
            Ok(StepOutcome::Ask(atom)) => {
                let answer = if opts.interactive {
                    chan.send(&snapshot(&session));
                    await_answer(&mut session, &atom, &mut lines, &mut chan)
                } else {
                    Answer::Unknown
                };
                if let Err(e) = session.answer(&atom, answer) {
                    chan.send(&Message::Error { message: e.to_string() });
                }
                chan.drain(&session);
            }
            Ok(StepOutcome::Exhausted) => break,
        }
        if found.len() >= opts.top_k {
            reason = "top-k";
        }
    }

    let posteriors: Vec<Option<f64>> = match renormalize(&found) {
        Ok(w) => w.into_iter().map(Some).collect(),
        Err(_) => vec![None; found.len()],
    };
    let halt = Message::Halt {
        reason: reason.to_string(),
        explanations: found.iter().zip(&posteriors).map(|(e, p)| emission(e, *p)).collect(),
    };
    chan.send(&halt);

    if !opts.interactive {
        if let Some(e) = &failure {
            let _ = writeln!(err, "error: {e}");
        }
        if found.is_empty() {
            let _ = writeln!(chan.out, "no explanation found");
        }
        for (i, (e, p)) in found.iter().zip(&posteriors).enumerate() {
            let _ = writeln!(chan.out, "{}. {}", i + 1, describe(e, *p));
        }
    }
    if let Some(path) = &opts.trace {
        let mut text = chan.trace.join("\n");
        text.push('\n');
        if let Err(e) = std::fs::write(path, text) {
            let _ = writeln!(err, "cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    if found.is_empty() {
        EXIT_NONE
    } else {
        EXIT_FOUND
    }
}
