//! Line-oriented text format for networks.
//!
//! ```text
//! wsr-network 1
//! seed 7
//! scenario {"links":2,...}
//! links 2
//! link 0 tx 3 rx 4 weight 7.5000000000000000e-1
//! channel 0 0 4 3
//! <re> <im> <re> <im> ...        one line per matrix row
//! groups 1
//! group 0 members 0 1
//! shaping 0 3
//! <re> <im> ...
//! end
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly. Lines starting with `#` and blank lines are ignored.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{ConstraintGroup, Link, Network, NetworkMeta, Scenario};
use crate::error::{Error, Result};
use crate::matcore::{hermitize, CMatrix};

const MAGIC: &str = "wsr-network";
const VERSION: u32 = 1;

fn write_matrix(out: &mut impl Write, m: &CMatrix) -> Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:.16e} {:.16e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_network(net: &Network, mut out: impl Write) -> Result<()> {
    let nl = net.num_links();
    writeln!(out, "{MAGIC} {VERSION}")?;
    match net.meta().seed {
        Some(s) => writeln!(out, "seed {s}")?,
        None => writeln!(out, "seed none")?,
    }
    if let Some(sc) = &net.meta().scenario {
        let json = serde_json::to_string(sc).map_err(|e| Error::Config(e.to_string()))?;
        writeln!(out, "scenario {json}")?;
    }
    writeln!(out, "links {nl}")?;
    for (l, link) in net.links().iter().enumerate() {
        writeln!(
            out,
            "link {l} tx {} rx {} weight {:.16e}",
            link.tx_antennas, link.rx_antennas, link.weight
        )?;
    }
    for l in 0..nl {
        for k in 0..nl {
            let h = net.channel(l, k);
            writeln!(out, "channel {l} {k} {} {}", h.nrows(), h.ncols())?;
            write_matrix(&mut out, h)?;
        }
    }
    writeln!(out, "groups {}", net.num_groups())?;
    for (s, g) in net.groups().iter().enumerate() {
        let members: Vec<String> = g.members().iter().map(|l| l.to_string()).collect();
        writeln!(out, "group {s} members {}", members.join(" "))?;
        for (l, q) in g.iter() {
            writeln!(out, "shaping {l} {}", q.dim())?;
            write_matrix(&mut out, q.as_matrix())?;
        }
    }
    writeln!(out, "end")?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, msg: msg.into() })
    }

    /// Next meaningful line, trimmed.
    fn next_line(&mut self) -> Result<String> {
        loop {
            let Some(line) = self.inner.next() else {
                return self.err("unexpected end of input");
            };
            self.line += 1;
            let line = line?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(t.to_string());
            }
        }
    }

    /// Next line split on whitespace, checking the leading keyword.
    fn expect(&mut self, keyword: &str) -> Result<Vec<String>> {
        let line = self.next_line()?;
        let mut toks = line.split_whitespace().map(str::to_string);
        match toks.next() {
            Some(k) if k == keyword => Ok(toks.collect()),
            other => self.err(format!("expected '{keyword}', found '{}'", other.unwrap_or_default())),
        }
    }

    fn parse<T: std::str::FromStr>(&self, tok: Option<&String>, what: &str) -> Result<T> {
        match tok.map(|t| t.parse::<T>()) {
            Some(Ok(v)) => Ok(v),
            _ => self.err(format!("expected {what}")),
        }
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<CMatrix> {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            let line = self.next_line()?;
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != 2 * cols {
                return self.err(format!("expected {} numbers in matrix row, found {}", 2 * cols, vals.len()));
            }
            for j in 0..cols {
                let re: f64 = vals[2 * j].parse().or_else(|_| self.err("bad real part"))?;
                let im: f64 = vals[2 * j + 1].parse().or_else(|_| self.err("bad imaginary part"))?;
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        Ok(m)
    }
}

pub fn read_network(input: impl BufRead) -> Result<Network> {
    let mut p = Lines { inner: input.lines(), line: 0 };

    let head = p.expect(MAGIC)?;
    let version: u32 = p.parse(head.first(), "format version")?;
    if version != VERSION {
        return p.err(format!("unsupported format version {version}"));
    }

    let seed_tok = p.expect("seed")?;
    let seed = match seed_tok.first().map(String::as_str) {
        Some("none") => None,
        _ => Some(p.parse::<u64>(seed_tok.first(), "seed")?),
    };

    let mut line = p.next_line()?;
    let mut scenario = None;
    if let Some(json) = line.strip_prefix("scenario ") {
        let sc: Scenario = serde_json::from_str(json).or_else(|e| p.err(format!("bad scenario: {e}")))?;
        scenario = Some(sc);
        line = p.next_line()?;
    }
    let nl: usize = match line.strip_prefix("links ") {
        Some(n) => n.trim().parse().or_else(|_| p.err("bad link count"))?,
        None => return p.err("expected 'links'"),
    };

    let mut links = Vec::with_capacity(nl);
    for l in 0..nl {
        let t = p.expect("link")?;
        if t.len() != 7 || t[1] != "tx" || t[3] != "rx" || t[5] != "weight" {
            return p.err("expected 'link <id> tx <n> rx <m> weight <w>'");
        }
        if p.parse::<usize>(t.first(), "link id")? != l {
            return p.err(format!("links must be listed in order, expected {l}"));
        }
        links.push(Link {
            tx_antennas: p.parse(t.get(2), "transmit antenna count")?,
            rx_antennas: p.parse(t.get(4), "receive antenna count")?,
            weight: p.parse(t.get(6), "weight")?,
        });
    }

    let mut channels = vec![Vec::with_capacity(nl); nl];
    for (l, row) in channels.iter_mut().enumerate() {
        for k in 0..nl {
            let t = p.expect("channel")?;
            let ids: (usize, usize) = (p.parse(t.first(), "receiver id")?, p.parse(t.get(1), "transmitter id")?);
            if ids != (l, k) {
                return p.err(format!("expected channel {l} {k}"));
            }
            let rows = p.parse(t.get(2), "row count")?;
            let cols = p.parse(t.get(3), "column count")?;
            row.push(p.matrix(rows, cols)?);
        }
    }

    let t = p.expect("groups")?;
    let ng: usize = p.parse(t.first(), "group count")?;
    let mut groups = Vec::with_capacity(ng);
    for s in 0..ng {
        let t = p.expect("group")?;
        if p.parse::<usize>(t.first(), "group id")? != s || t.get(1).map(String::as_str) != Some("members") {
            return p.err(format!("expected 'group {s} members ...'"));
        }
        let members: Vec<usize> = t[2..]
            .iter()
            .map(|m| m.parse().or_else(|_| p.err("bad group member")))
            .collect::<Result<_>>()?;
        let mut shaping = Vec::with_capacity(members.len());
        for &l in &members {
            let t = p.expect("shaping")?;
            if p.parse::<usize>(t.first(), "link id")? != l {
                return p.err(format!("expected shaping for link {l}"));
            }
            let n: usize = p.parse(t.get(1), "dimension")?;
            shaping.push(hermitize(&p.matrix(n, n)?)?);
        }
        groups.push(ConstraintGroup::new(members, shaping)?);
    }
    p.expect("end")?;

    Ok(Network::new(links, channels, groups)?.with_meta(NetworkMeta { seed, scenario }))
}
