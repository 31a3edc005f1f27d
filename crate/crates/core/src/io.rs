//! Text formats for codes and base-block files.

use std::fmt::Write as _;
use std::path::Path;

use crate::code::{Code, CodeParams, Codeword, UNBOUNDED};
use crate::error::{Error, Result};

pub const CODE_HEADER: &str = "l1cwc v1";

/// Expected properties declared by a base-block file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expect {
    pub size: Option<usize>,
    pub property_a: bool,
    pub property_b: bool,
    /// Counts of `1^4`, `1^2 2^1`, `2^2` words.
    pub census: Option<(usize, usize, usize)>,
}

/// A parsed code file; `perm` and `expect` are present in base-block files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeFile {
    pub code: Code,
    pub perm: Option<String>,
    pub expect: Option<Expect>,
    pub comments: Vec<String>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_params(line: usize, rest: &str) -> Result<CodeParams> {
    let (mut n, mut q, mut w, mut d) = (None, None, None, None);
    for tok in rest.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| perr(line, format!("bad token `{tok}`")))?;
        let num = |v: &str| v.parse::<u32>().map_err(|_| perr(line, format!("bad value `{tok}`")));
        match k {
            "n" => n = Some(num(v)?),
            "q" => q = Some(if v == "inf" { UNBOUNDED } else { num(v)? }),
            "w" => w = Some(num(v)?),
            "d" => d = Some(num(v)?),
            _ => return Err(perr(line, format!("unknown key `{k}`"))),
        }
    }
    match (n, q, w, d) {
        (Some(n), Some(q), Some(w), Some(d)) => CodeParams::new(n, q, w, d),
        _ => Err(perr(line, "params needs n, q, w and d")),
    }
}

fn parse_word(line: usize, rest: &str) -> Result<Codeword> {
    let mut entries = Vec::new();
    for tok in rest.split_whitespace() {
        let (p, v) = tok.split_once(':').ok_or_else(|| perr(line, format!("bad entry `{tok}`")))?;
        let p = p.parse::<u32>().map_err(|_| perr(line, format!("bad position `{tok}`")))?;
        let v = v.parse::<u32>().map_err(|_| perr(line, format!("bad value `{tok}`")))?;
        entries.push((p, v));
    }
    Codeword::new(entries).map_err(|e| perr(line, e.to_string()))
}

fn parse_expect(line: usize, rest: &str) -> Result<Expect> {
    let mut e = Expect::default();
    for tok in rest.split_whitespace() {
        match tok {
            "propertyA" => e.property_a = true,
            "propertyB" => e.property_b = true,
            _ => {
                let (k, v) = tok.split_once('=').ok_or_else(|| perr(line, format!("bad token `{tok}`")))?;
                match k {
                    "size" => e.size = Some(v.parse().map_err(|_| perr(line, "bad size"))?),
                    "census" => {
                        let xs: Vec<usize> = v
                            .split(',')
                            .map(|s| s.parse().map_err(|_| perr(line, "bad census")))
                            .collect::<Result<_>>()?;
                        if xs.len() != 3 {
                            return Err(perr(line, "census needs three counts"));
                        }
                        e.census = Some((xs[0], xs[1], xs[2]));
                    }
                    _ => return Err(perr(line, format!("unknown key `{k}`"))),
                }
            }
        }
    }
    Ok(e)
}

/// Parses a code or base-block file. Words are kept in file order.
pub fn parse_code_file(text: &str) -> Result<CodeFile> {
    let mut header = false;
    let mut params = None;
    let mut words = Vec::new();
    let mut perm = None;
    let mut expect = None;
    let mut comments = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        if !header {
            if l != CODE_HEADER {
                return Err(perr(line, format!("expected header `{CODE_HEADER}`")));
            }
            header = true;
            continue;
        }
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match key {
            "params" if params.is_none() => params = Some(parse_params(line, rest)?),
            "c" if params.is_some() => words.push(parse_word(line, rest)?),
            "perm" => perm = Some(rest.trim().to_string()),
            "expect" => expect = Some(parse_expect(line, rest)?),
            _ => return Err(perr(line, format!("unexpected line `{l}`"))),
        }
    }
    let params = params.ok_or_else(|| perr(0, "missing params line"))?;
    Ok(CodeFile { code: Code::new(params, words), perm, expect, comments })
}

pub fn parse_code(text: &str) -> Result<Code> {
    Ok(parse_code_file(text)?.code)
}

pub fn read_code_file(path: &Path) -> Result<CodeFile> {
    parse_code_file(&std::fs::read_to_string(path)?)
}

fn write_params(s: &mut String, p: &CodeParams) {
    let _ = writeln!(s, "params n={} q={} w={} d={}", p.n, p.q_label(), p.w, p.d);
}

fn write_words(s: &mut String, code: &Code) {
    for u in &code.words {
        s.push('c');
        for (p, v) in u.entries() {
            let _ = write!(s, " {p}:{v}");
        }
        s.push('\n');
    }
}

pub fn write_code(code: &Code) -> String {
    let mut s = format!("{CODE_HEADER}\n");
    write_params(&mut s, &code.params);
    write_words(&mut s, code);
    s
}

/// Code text followed by `# ` comment lines.
pub fn write_code_with_footer(code: &Code, footer: &[String]) -> String {
    let mut s = write_code(code);
    for f in footer {
        let _ = writeln!(s, "# {f}");
    }
    s
}

pub fn write_code_file(f: &CodeFile) -> String {
    let mut s = format!("{CODE_HEADER}\n");
    for c in &f.comments {
        let _ = writeln!(s, "# {c}");
    }
    write_params(&mut s, &f.code.params);
    write_words(&mut s, &f.code);
    if let Some(p) = &f.perm {
        let _ = writeln!(s, "perm {p}");
    }
    if let Some(e) = &f.expect {
        s.push_str("expect");
        if let Some(size) = e.size {
            let _ = write!(s, " size={size}");
        }
        if e.property_a {
            s.push_str(" propertyA");
        }
        if e.property_b {
            s.push_str(" propertyB");
        }
        if let Some((x, y, z)) = e.census {
            let _ = write!(s, " census={x},{y},{z}");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let text = "l1cwc v1\nparams n=6 q=3 w=4 d=6\nc 0:2 1:1 2:1\nc 3:2 4:2\n";
        assert_eq!(write_code(&parse_code(text).unwrap()), text);
        let text = "l1cwc v1\nparams n=4 q=inf w=3 d=4\nc 0:3\nc 1:1 2:1 3:1\n";
        assert_eq!(write_code(&parse_code(text).unwrap()), text);
    }

    #[test]
    fn base_block_round_trip() {
        let text = "l1cwc v1\n# seven shifts\nparams n=7 q=3 w=4 d=6\nc 0:2 1:1 3:1\nperm (0 1 2 3 4 5 6)\nexpect size=7 propertyA census=0,7,0\n";
        let f = parse_code_file(text).unwrap();
        assert_eq!(f.expect.as_ref().unwrap().census, Some((0, 7, 0)));
        assert_eq!(write_code_file(&f), text);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_code("hello"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_code("l1cwc v1\nparams n=4 q=3 w=3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_code("l1cwc v1\nparams n=4 q=3 w=3 d=4\nc 0:1 0:2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_code("l1cwc v1\nc 0:1\n"), Err(Error::Parse { .. })));
    }
}
