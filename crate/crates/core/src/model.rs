//! Model files.
//!
//! A model is a UTF-8 text file of whitespace-separated records, one per line:
//!
//! ```text
//! BART-MODEL v1
//! mode regression
//! offset 0.0000000000000000e0
//! prior alpha=<f> beta=<f> k=<f> m=<n> nu=<f> q=<f> sigma_mu=<f> lambda=<f> sigma_hat=<f> sigma_hat_mode=linear n_min=<n>
//! chain burn_in=<n> keep=<n> thin=<n> seed=<n> moves=<grow>,<prune>,<change>,<swap>
//! scaling <y_min> <y_max>            (or: scaling none)
//! response "<name>" transform=none
//! columns <count>
//! column numeric "<name>"
//! column categorical "<name>" ["<level>", ...]
//! grids <p>
//! grid <variable> <count> <cutpoint> ...
//! draws <K>
//! draw <k> chain=<c> sigma=<f>
//! tree <token> ...                   (m lines per draw)
//! end
//! ```
//!
//! Tree tokens are in pre-order: `v:c` is the split `x[v] <= grid[v][c]`, any
//! other token is a leaf value. Every float is written with 17 significant
//! digits, so a save/load round trip is bit-exact. Names are JSON strings.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::data::{ColumnKind, ResponseTransform, Scaling, Schema, SourceColumn};
use crate::error::{Error, Result};
use crate::mcmc::{ChainConfig, MoveProbabilities};
use crate::posterior::{PosteriorDraws, PosteriorMeta};
use crate::priors::{PriorSpec, SigmaHatMode};
use crate::tree::{DecisionTree, Ensemble, SplitRule, Token};
use crate::Mode;

pub const FORMAT_MAGIC: &str = "BART-MODEL";
pub const FORMAT_VERSION: &str = "v1";

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn json(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Render a model in the text format.
pub fn model_to_string(draws: &PosteriorDraws) -> String {
    let meta = draws.meta();
    let p = &meta.prior;
    let c = &meta.config;
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_MAGIC} {FORMAT_VERSION}");
    let _ = writeln!(out, "mode {}", meta.mode.as_str());
    let _ = writeln!(out, "offset {}", f(meta.offset));
    let _ = writeln!(
        out,
        "prior alpha={} beta={} k={} m={} nu={} q={} sigma_mu={} lambda={} sigma_hat={} sigma_hat_mode={} n_min={}",
        f(p.alpha),
        f(p.beta),
        f(p.k),
        p.m,
        f(p.nu),
        f(p.q),
        f(p.sigma_mu),
        f(p.lambda),
        f(p.sigma_hat),
        p.sigma_hat_mode.as_str(),
        p.n_min
    );
    let mv = &c.moves;
    let _ = writeln!(
        out,
        "chain burn_in={} keep={} thin={} seed={} moves={},{},{},{}",
        c.burn_in,
        c.keep,
        c.thin,
        c.seed,
        f(mv.grow),
        f(mv.prune),
        f(mv.change),
        f(mv.swap)
    );
    match &meta.scaling {
        Some(s) => {
            let _ = writeln!(out, "scaling {} {}", f(s.y_min), f(s.y_max));
        }
        None => out.push_str("scaling none\n"),
    }
    let _ = writeln!(
        out,
        "response {} transform={}",
        json(&meta.schema.response),
        meta.schema.transform.as_str()
    );
    let _ = writeln!(out, "columns {}", meta.schema.columns.len());
    for col in &meta.schema.columns {
        match &col.kind {
            ColumnKind::Numeric => {
                let _ = writeln!(out, "column numeric {}", json(&col.name));
            }
            ColumnKind::Categorical { levels } => {
                let _ = writeln!(
                    out,
                    "column categorical {} {}",
                    json(&col.name),
                    serde_json::to_string(levels).expect("strings serialize")
                );
            }
        }
    }
    let _ = writeln!(out, "grids {}", meta.grids.len());
    for (v, g) in meta.grids.iter().enumerate() {
        let _ = write!(out, "grid {v} {}", g.len());
        for x in g {
            let _ = write!(out, " {}", f(*x));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "draws {}", draws.len());
    for (k, (ens, chain)) in draws.draws().iter().zip(draws.chains()).enumerate() {
        let _ = writeln!(out, "draw {k} chain={chain} sigma={}", f(ens.sigma()));
        for tree in ens.trees() {
            out.push_str("tree");
            for tok in tree.to_tokens() {
                match tok {
                    Token::Split(r) => {
                        let _ = write!(out, " {}:{}", r.variable, r.cutpoint);
                    }
                    Token::Leaf(mu) => {
                        let _ = write!(out, " {}", f(mu));
                    }
                }
            }
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

pub fn save_model(draws: &PosteriorDraws, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(draws)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<PosteriorDraws> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

struct Cursor<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::ModelParse { line: self.line, message: message.into() }
    }

    fn next(&mut self) -> Result<&'a str> {
        match self.lines.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim_end_matches('\r'))
            }
            None => {
                self.line += 1;
                Err(self.err("unexpected end of file"))
            }
        }
    }

    /// Next line, which must begin with `keyword`; returns the remainder.
    fn expect(&mut self, keyword: &str) -> Result<&'a str> {
        let line = self.next()?;
        let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
        if head != keyword {
            return Err(self.err(format!("expected a {keyword:?} record, found {head:?}")));
        }
        Ok(rest)
    }

    fn num<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("invalid {what}: {s:?}")))
    }

    fn pairs(&self, rest: &'a str) -> Result<HashMap<&'a str, &'a str>> {
        rest.split_whitespace()
            .map(|kv| kv.split_once('=').ok_or_else(|| self.err(format!("expected key=value, found {kv:?}"))))
            .collect()
    }

    fn field<T: std::str::FromStr>(&self, map: &HashMap<&str, &str>, key: &str) -> Result<T> {
        let v = map.get(key).ok_or_else(|| self.err(format!("missing field {key:?}")))?;
        self.num(v, key)
    }

    /// Successive JSON values in `rest`, plus whatever trails them.
    fn json_values(&self, rest: &str, count: usize) -> Result<(Vec<Value>, String)> {
        let mut stream = serde_json::Deserializer::from_str(rest).into_iter::<Value>();
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            match stream.next() {
                Some(Ok(v)) => values.push(v),
                Some(Err(e)) => return Err(self.err(format!("invalid JSON: {e}"))),
                None => return Err(self.err("missing JSON value")),
            }
        }
        let tail = rest[stream.byte_offset()..].trim().to_string();
        Ok((values, tail))
    }
}

fn json_string(cur: &Cursor, v: &Value) -> Result<String> {
    v.as_str().map(str::to_string).ok_or_else(|| cur.err("expected a JSON string"))
}

/// Parse the text format. No partial model is ever returned.
pub fn parse_model(text: &str) -> Result<PosteriorDraws> {
    let mut cur = Cursor { lines: text.lines().enumerate(), line: 0 };
    let first = cur.next()?;
    let mut parts = first.split_whitespace();
    if parts.next() != Some(FORMAT_MAGIC) {
        return Err(cur.err("not a model file"));
    }
    let version = parts.next().unwrap_or("");
    if version != FORMAT_VERSION {
        return Err(Error::ModelVersion { found: version.to_string(), expected: FORMAT_VERSION.to_string() });
    }

    let mode = Mode::parse(cur.expect("mode")?.trim()).map_err(|e| cur.err(e.to_string()))?;
    let offset: f64 = {
        let rest = cur.expect("offset")?;
        cur.num(rest.trim(), "offset")?
    };

    let rest = cur.expect("prior")?;
    let kv = cur.pairs(rest)?;
    let sigma_hat_mode = SigmaHatMode::parse(kv.get("sigma_hat_mode").copied().unwrap_or(""))
        .map_err(|e| cur.err(e.to_string()))?;
    let prior = PriorSpec {
        alpha: cur.field(&kv, "alpha")?,
        beta: cur.field(&kv, "beta")?,
        k: cur.field(&kv, "k")?,
        m: cur.field(&kv, "m")?,
        nu: cur.field(&kv, "nu")?,
        q: cur.field(&kv, "q")?,
        sigma_mu: cur.field(&kv, "sigma_mu")?,
        lambda: cur.field(&kv, "lambda")?,
        sigma_hat: cur.field(&kv, "sigma_hat")?,
        sigma_hat_mode,
        n_min: cur.field(&kv, "n_min")?,
        mode,
    };

    let rest = cur.expect("chain")?;
    let kv = cur.pairs(rest)?;
    let moves_str = kv.get("moves").ok_or_else(|| cur.err("missing field \"moves\""))?;
    let mv: Vec<f64> = moves_str
        .split(',')
        .map(|s| cur.num(s, "move probability"))
        .collect::<Result<_>>()?;
    if mv.len() != 4 {
        return Err(cur.err("moves needs four probabilities"));
    }
    let config = ChainConfig {
        burn_in: cur.field(&kv, "burn_in")?,
        keep: cur.field(&kv, "keep")?,
        thin: cur.field(&kv, "thin")?,
        seed: cur.field(&kv, "seed")?,
        moves: MoveProbabilities { grow: mv[0], prune: mv[1], change: mv[2], swap: mv[3] },
    };

    let rest = cur.expect("scaling")?;
    let scaling = match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["none"] => None,
        [lo, hi] => Some(
            Scaling::new(cur.num(lo, "y_min")?, cur.num(hi, "y_max")?).map_err(|e| cur.err(e.to_string()))?,
        ),
        _ => return Err(cur.err("scaling needs two values or \"none\"")),
    };

    let rest = cur.expect("response")?;
    let (vals, tail) = cur.json_values(rest, 1)?;
    let response = json_string(&cur, &vals[0])?;
    let transform = match tail.strip_prefix("transform=") {
        Some(t) => ResponseTransform::parse(t).map_err(|e| cur.err(e.to_string()))?,
        None => return Err(cur.err("missing transform")),
    };

    let ncols: usize = {
        let rest = cur.expect("columns")?;
        cur.num(rest.trim(), "column count")?
    };
    let mut columns = Vec::with_capacity(ncols);
    for _ in 0..ncols {
        let rest = cur.expect("column")?;
        let (kind, rest) = rest.split_once(' ').ok_or_else(|| cur.err("incomplete column record"))?;
        let column = match kind {
            "numeric" => {
                let (vals, _) = cur.json_values(rest, 1)?;
                SourceColumn { name: json_string(&cur, &vals[0])?, kind: ColumnKind::Numeric }
            }
            "categorical" => {
                let (vals, _) = cur.json_values(rest, 2)?;
                let levels = vals[1]
                    .as_array()
                    .ok_or_else(|| cur.err("levels must be a JSON array"))?
                    .iter()
                    .map(|v| json_string(&cur, v))
                    .collect::<Result<Vec<_>>>()?;
                SourceColumn { name: json_string(&cur, &vals[0])?, kind: ColumnKind::Categorical { levels } }
            }
            other => return Err(cur.err(format!("unknown column kind {other:?}"))),
        };
        columns.push(column);
    }
    let schema = Schema { response, transform, columns };

    let p: usize = {
        let rest = cur.expect("grids")?;
        cur.num(rest.trim(), "grid count")?
    };
    let mut grids = Vec::with_capacity(p);
    for v in 0..p {
        let rest = cur.expect("grid")?;
        let mut it = rest.split_whitespace();
        let idx: usize = cur.num(it.next().unwrap_or(""), "grid index")?;
        if idx != v {
            return Err(cur.err(format!("expected grid {v}, found {idx}")));
        }
        let count: usize = cur.num(it.next().unwrap_or(""), "grid size")?;
        let g: Vec<f64> = it.map(|s| cur.num(s, "cutpoint")).collect::<Result<_>>()?;
        if g.len() != count {
            return Err(cur.err(format!("grid {v} declares {count} cutpoints but lists {}", g.len())));
        }
        grids.push(g);
    }

    let k: usize = {
        let rest = cur.expect("draws")?;
        cur.num(rest.trim(), "draw count")?
    };
    let mut ensembles = Vec::with_capacity(k);
    let mut chains = Vec::with_capacity(k);
    for d in 0..k {
        let rest = cur.expect("draw")?;
        let (idx, rest) = rest.split_once(' ').ok_or_else(|| cur.err("incomplete draw record"))?;
        if cur.num::<usize>(idx, "draw index")? != d {
            return Err(cur.err(format!("expected draw {d}")));
        }
        let kv = cur.pairs(rest)?;
        let sigma: f64 = cur.field(&kv, "sigma")?;
        chains.push(cur.field(&kv, "chain")?);
        let mut trees = Vec::with_capacity(prior.m);
        for _ in 0..prior.m {
            let rest = cur.expect("tree")?;
            let tokens = rest
                .split_whitespace()
                .map(|t| match t.split_once(':') {
                    Some((v, c)) => Ok(Token::Split(SplitRule::new(cur.num(v, "variable")?, cur.num(c, "cutpoint")?))),
                    None => Ok(Token::Leaf(cur.num(t, "leaf value")?)),
                })
                .collect::<Result<Vec<_>>>()?;
            trees.push(DecisionTree::from_tokens(&tokens).map_err(|e| cur.err(e.to_string()))?);
        }
        ensembles.push(Ensemble::new(trees, sigma).map_err(|e| cur.err(e.to_string()))?);
    }
    cur.expect("end")?;

    let meta = PosteriorMeta { mode, offset, prior, config, scaling, schema, grids };
    PosteriorDraws::new(ensembles, chains, meta).map_err(|e| cur.err(e.to_string()))
}
