//! Line-oriented operator spec grammar.
//!
//! A document is one or more blocks of `key = value` lines. The first block
//! is the root operator; later blocks start with a `[name]` header and can
//! be referenced by `inner = name` or `parts = a, b`. Comments start with
//! `#`, blank lines separate nothing in particular.
//!
//! ```text
//! kind = translate
//! lambda = 1,0
//! inner = base
//!
//! [base]
//! kind = backward_shift
//! weights = constant 1
//! ```
//!
//! Kinds: forward_shift | backward_shift | diagonal | kalisch | translate |
//! scale | direct_sum. Weight/entry rules: `constant <c>`,
//! `list <e1>,<e2>,...;tail=<e>`, `reciprocal`, `geometric <r>`. Complex
//! literals are `<re>,<im>` (bare `<re>` means a real); inside lists,
//! complex elements are parenthesized: `list 1,(0,1),2;tail=0.5`.

use super::{OpError, Operator, WeightRule};
use crate::numkit::C64;
use std::collections::{HashMap, HashSet};

struct Block {
    line: usize,
    fields: HashMap<String, (usize, String)>,
}

fn err(line: usize, msg: impl Into<String>) -> OpError {
    OpError::Parse { line, msg: msg.into() }
}

fn split_blocks(text: &str) -> Result<(Block, HashMap<String, Block>), OpError> {
    let mut root: Option<Block> = None;
    let mut named: HashMap<String, Block> = HashMap::new();
    let mut current_name: Option<String> = None;
    let mut current = Block { line: 1, fields: HashMap::new() };

    let commit =
        |name: Option<String>, block: Block, named: &mut HashMap<String, Block>, root: &mut Option<Block>| -> Result<(), OpError> {
            match name {
                None => {
                    if block.fields.is_empty() {
                        return Err(err(block.line, "document has no root operator block"));
                    }
                    *root = Some(block);
                }
                Some(n) => {
                    if named.insert(n.clone(), block).is_some() {
                        return Err(err(0, format!("duplicate block name `{n}`")));
                    }
                }
            }
            Ok(())
        };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(lineno, "unterminated block header"))?
                .trim()
                .to_string();
            if name.is_empty() {
                return Err(err(lineno, "empty block name"));
            }
            let finished = std::mem::replace(
                &mut current,
                Block { line: lineno, fields: HashMap::new() },
            );
            let finished_name = current_name.replace(name);
            if finished_name.is_some() || !finished.fields.is_empty() {
                commit(finished_name, finished, &mut named, &mut root)?;
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(lineno, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if current.fields.insert(key.clone(), (lineno, value)).is_some() {
            return Err(err(lineno, format!("duplicate key `{key}` in block")));
        }
    }
    if current_name.is_some() || !current.fields.is_empty() {
        commit(current_name, current, &mut named, &mut root)?;
    }
    let root = root.ok_or_else(|| err(1, "document has no root operator block"))?;
    Ok((root, named))
}

/// `re` or `re,im`.
fn parse_complex(line: usize, s: &str) -> Result<C64, OpError> {
    let s = s.trim();
    let parse_f = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| err(line, format!("`{t}` is not a decimal float")))
            .and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(line, "complex components must be finite"))
                }
            })
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(C64::new(parse_f(re)?, parse_f(im)?)),
        None => Ok(C64::new(parse_f(s)?, 0.0)),
    }
}

/// List element: bare real or parenthesized `(re,im)`.
fn parse_element(line: usize, s: &str) -> Result<C64, OpError> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| err(line, format!("unterminated `(` in `{s}`")))?;
        parse_complex(line, inner)
    } else {
        Ok(C64::new(
            s.parse::<f64>()
                .map_err(|_| err(line, format!("`{s}` is not a decimal float")))?,
            0.0,
        ))
    }
}

/// Splits on commas that are not inside parentheses.
fn split_elements(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_weights(line: usize, value: &str) -> Result<WeightRule, OpError> {
    let value = value.trim();
    if let Some(rest) = value.strip_prefix("constant") {
        return Ok(WeightRule::Constant(parse_complex(line, rest)?));
    }
    if value == "reciprocal" {
        return Ok(WeightRule::reciprocal());
    }
    if let Some(rest) = value.strip_prefix("geometric") {
        return Ok(WeightRule::geometric(parse_complex(line, rest)?));
    }
    if let Some(rest) = value.strip_prefix("list") {
        let (head_part, tail_part) = rest
            .split_once(";tail=")
            .ok_or_else(|| err(line, "list rule needs a `;tail=<e>` suffix"))?;
        let head = split_elements(head_part)
            .iter()
            .filter(|t| !t.trim().is_empty())
            .map(|t| parse_element(line, t))
            .collect::<Result<Vec<_>, _>>()?;
        let tail = parse_element(line, tail_part)?;
        return Ok(WeightRule::List { head, tail });
    }
    Err(err(
        line,
        format!("unknown weight rule `{value}` (expected constant/list/reciprocal/geometric)"),
    ))
}

struct Resolver<'a> {
    named: &'a HashMap<String, Block>,
    in_progress: HashSet<String>,
}

impl<'a> Resolver<'a> {
    fn field<'b>(&self, block: &'b Block, key: &str) -> Result<(usize, &'b str), OpError> {
        block
            .fields
            .get(key)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or_else(|| err(block.line, format!("missing required key `{key}`")))
    }

    fn reference(&mut self, line: usize, name: &str) -> Result<Operator, OpError> {
        let name = name.trim();
        if self.in_progress.contains(name) {
            return Err(err(line, format!("cyclic reference through `{name}`")));
        }
        let block = self
            .named
            .get(name)
            .ok_or_else(|| err(line, format!("unknown operator block `{name}`")))?;
        self.in_progress.insert(name.to_string());
        let op = self.operator(block);
        self.in_progress.remove(name);
        op
    }

    fn operator(&mut self, block: &Block) -> Result<Operator, OpError> {
        let (kline, kind) = self.field(block, "kind")?;
        let known_keys: &[&str] = match kind {
            "forward_shift" | "backward_shift" => &["kind", "weights"],
            "diagonal" => &["kind", "entries"],
            "kalisch" => &["kind"],
            "translate" => &["kind", "inner", "lambda"],
            "scale" => &["kind", "inner", "factor"],
            "direct_sum" => &["kind", "parts"],
            other => {
                return Err(err(kline, format!("unknown operator kind `{other}`")));
            }
        };
        for (key, (l, _)) in &block.fields {
            if !known_keys.contains(&key.as_str()) {
                return Err(err(*l, format!("key `{key}` does not apply to kind `{kind}`")));
            }
        }
        match kind {
            "forward_shift" => {
                let (l, v) = self.field(block, "weights")?;
                Operator::forward_shift(parse_weights(l, v)?)
            }
            "backward_shift" => {
                let (l, v) = self.field(block, "weights")?;
                Operator::backward_shift(parse_weights(l, v)?)
            }
            "diagonal" => {
                let (l, v) = self.field(block, "entries")?;
                Operator::diagonal(parse_weights(l, v)?)
            }
            "kalisch" => Ok(Operator::kalisch()),
            "translate" => {
                let (il, inner) = self.field(block, "inner")?;
                let (ll, lam) = self.field(block, "lambda")?;
                let op = self.reference(il, inner)?;
                Ok(op.translate(parse_complex(ll, lam)?))
            }
            "scale" => {
                let (il, inner) = self.field(block, "inner")?;
                let (fl, fac) = self.field(block, "factor")?;
                let op = self.reference(il, inner)?;
                op.scale(parse_complex(fl, fac)?)
            }
            "direct_sum" => {
                let (pl, parts) = self.field(block, "parts")?;
                let ops = parts
                    .split(',')
                    .map(|p| self.reference(pl, p))
                    .collect::<Result<Vec<_>, _>>()?;
                Operator::direct_sum(ops)
            }
            _ => unreachable!(),
        }
    }
}

/// Parses an operator spec document into a canonical [`Operator`].
pub fn parse_operator(text: &str) -> Result<Operator, OpError> {
    let (root, named) = split_blocks(text)?;
    let mut resolver = Resolver { named: &named, in_progress: HashSet::new() };
    resolver.operator(&root)
}
