use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use super::{Budget, SolverError, Verdict};
use crate::encode::{CnfInstance, Lit, Model};

const POLL: Duration = Duration::from_millis(5);

pub(super) fn solve(template: &str, cnf: &CnfInstance, budget: &Budget) -> Result<Verdict, SolverError> {
    if let Some(i) = budget.check() {
        return Ok(Verdict::Stopped(i));
    }
    let words: Vec<&str> = template.split_whitespace().collect();
    let (program, rest) = words.split_first().ok_or(SolverError::EmptyCommand)?;

    let file_input = words.iter().any(|w| w.contains("{input}"));
    let mut input_file = None;
    let mut args = Vec::with_capacity(rest.len());
    if file_input {
        let mut f = tempfile::Builder::new().suffix(".cnf").tempfile()?;
        cnf.write_dimacs(std::io::BufWriter::new(f.as_file_mut()))?;
        let path = f.path().display().to_string();
        args.extend(rest.iter().map(|w| w.replace("{input}", &path)));
        input_file = Some(f);
    } else {
        args.extend(rest.iter().map(|w| w.to_string()));
    }

    let mut child = Command::new(program)
        .args(&args)
        .stdin(if file_input { Stdio::null() } else { Stdio::piped() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Spawn {
            command: template.to_string(),
            source,
        })?;

    let feeder = child.stdin.take().map(|mut stdin| {
        let dimacs = crate::encode::emit_dimacs(cnf);
        // A solver that dies early closes the pipe; that surfaces via its exit status.
        thread::spawn(move || {
            let _ = stdin.write_all(&dimacs);
        })
    });
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if let Some(why) = budget.check() {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(Verdict::Stopped(why));
        }
        thread::sleep(POLL);
    };
    if let Some(f) = feeder {
        let _ = f.join();
    }
    let stdout = out_reader
        .join()
        .map_err(|_| SolverError::Protocol("stdout reader panicked".into()))??;
    let stderr = err_reader.join().unwrap_or_default();
    drop(input_file);

    let code = status.code();
    if !matches!(code, Some(0 | 10 | 20)) {
        return Err(SolverError::ExitStatus {
            code,
            stderr: stderr.trim().chars().take(2000).collect(),
        });
    }
    parse_output(&stdout, code, cnf.variable_count())
}

/// Reads `s` and `v` lines. The exit code (10 / 20) settles the verdict when
/// no status line is printed.
pub(super) fn parse_output(out: &str, code: Option<i32>, vars: u32) -> Result<Verdict, SolverError> {
    let mut status: Option<&str> = None;
    let mut lits: Vec<Lit> = Vec::new();
    let mut terminated = false;
    for line in out.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            if status.is_some() {
                return Err(SolverError::Protocol("more than one status line".into()));
            }
            status = Some(s.trim());
        } else if let Some(vals) = line.strip_prefix('v') {
            for tok in vals.split_whitespace() {
                let l: Lit = tok
                    .parse()
                    .map_err(|_| SolverError::Protocol(format!("bad literal `{tok}` in value line")))?;
                if l == 0 {
                    terminated = true;
                    continue;
                }
                if l.unsigned_abs() > vars {
                    return Err(SolverError::Protocol(format!("literal {l} exceeds {vars} variables")));
                }
                lits.push(l);
            }
        }
    }
    let status = match (status, code) {
        (Some("SATISFIABLE"), Some(0 | 10)) => "SATISFIABLE",
        (Some("UNSATISFIABLE"), Some(0 | 20)) => "UNSATISFIABLE",
        (Some("UNKNOWN"), Some(0)) => "UNKNOWN",
        (None, Some(10)) => "SATISFIABLE",
        (None, Some(20)) => "UNSATISFIABLE",
        (Some(s), c) => {
            return Err(SolverError::Protocol(format!("status `{s}` with exit code {c:?}")));
        }
        (None, _) => return Err(SolverError::Protocol("no status line".into())),
    };
    match status {
        "SATISFIABLE" => {
            if !terminated && vars > 0 {
                return Err(SolverError::Protocol("value lines missing or not terminated by 0".into()));
            }
            Ok(Verdict::Sat(Model::from_literals(vars, &lits)))
        }
        "UNSATISFIABLE" => Ok(Verdict::Unsat),
        _ => Ok(Verdict::Stopped(super::Interrupt::Deadline)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sat(v: Verdict) -> Model {
        match v {
            Verdict::Sat(m) => m,
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn parses_split_value_lines() {
        let out = "c hello\ns SATISFIABLE\nv 1 -2\nv 3 0\n";
        let m = sat(parse_output(out, Some(10), 3).unwrap());
        assert_eq!(m.values(), &[true, false, true]);
    }

    #[test]
    fn exit_code_alone_decides() {
        assert!(matches!(parse_output("", Some(20), 4).unwrap(), Verdict::Unsat));
        assert!(matches!(parse_output("v -1 0\n", Some(10), 1).unwrap(), Verdict::Sat(_)));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_output("hello\n", Some(0), 3), Err(SolverError::Protocol(_))));
        assert!(matches!(
            parse_output("s SATISFIABLE\nv 1 x 0\n", Some(10), 3),
            Err(SolverError::Protocol(_))
        ));
        assert!(matches!(
            parse_output("s SATISFIABLE\nv 9 0\n", Some(10), 3),
            Err(SolverError::Protocol(_))
        ));
        assert!(matches!(
            parse_output("s SATISFIABLE\n", Some(10), 3),
            Err(SolverError::Protocol(_))
        ));
        assert!(matches!(
            parse_output("s UNSATISFIABLE\n", Some(10), 3),
            Err(SolverError::Protocol(_))
        ));
    }
}
