#![allow(dead_code)]

pub mod oracle;

use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::thread;

pub fn ash() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ash"))
}

pub fn run_ash(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = ash()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn ash");
    let mut input = child.stdin.take().unwrap();
    let data = stdin.to_vec();
    let writer = thread::spawn(move || {
        let _ = input.write_all(&data);
    });
    let out = child.wait_with_output().expect("wait ash");
    writer.join().unwrap();
    out
}

/// Runs a challenger and a responder with each one's stdout piped into the
/// other's stdin. Returns (challenger exit, responder exit).
pub fn run_challenge(challenger_file: &Path, responder_file: &Path, variant: &str) -> (i32, i32) {
    let spawn = |role: &str, file: &Path| {
        ash()
            .args(["challenge", role])
            .arg(file)
            .args(["--variant", variant])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn ash challenge")
    };
    let mut c = spawn("challenger", challenger_file);
    let mut r = spawn("responder", responder_file);
    let pipe = |mut from: Box<dyn Read + Send>, mut to: Box<dyn Write + Send>| {
        thread::spawn(move || {
            let mut buf = [0u8; 4096];
            loop {
                match from.read(&mut buf) {
                    Ok(0) | Err(_) => break,
                    Ok(n) => {
                        if to.write_all(&buf[..n]).and_then(|_| to.flush()).is_err() {
                            break;
                        }
                    }
                }
            }
        })
    };
    let a = pipe(
        Box::new(c.stdout.take().unwrap()),
        Box::new(r.stdin.take().unwrap()),
    );
    let b = pipe(
        Box::new(r.stdout.take().unwrap()),
        Box::new(c.stdin.take().unwrap()),
    );
    let cs = c.wait().unwrap().code().unwrap_or(-1);
    let rs = r.wait().unwrap().code().unwrap_or(-1);
    a.join().unwrap();
    b.join().unwrap();
    (cs, rs)
}
