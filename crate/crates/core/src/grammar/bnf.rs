//! Text format for grammars.
//!
//! One rule per `::==` (or `::=`), alternatives separated by `|`, possibly on
//! continuation lines that start with `|`. Nonterminals are written in angle
//! brackets; terminals are either double-quoted or bare tokens (`+`, `0.1`).
//! Lines whose first non-blank character is `#` are comments.

use super::{Grammar, GrammarError, Production, Rule, Symbol};

pub fn load_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut rules: Vec<(usize, String, Vec<Production>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('|') {
            let Some((_, _, productions)) = rules.last_mut() else {
                return Err(syntax(line_no, "alternative outside of any rule"));
            };
            productions.extend(parse_alternatives(rest, line_no, true)?);
            continue;
        }
        let Some((lhs, rhs)) = split_definition(line) else {
            return Err(syntax(line_no, "expected `<name> ::== ...`"));
        };
        let name = parse_nonterminal(lhs.trim())
            .ok_or_else(|| syntax(line_no, "rule name must be written as <name>"))?;
        let productions = parse_alternatives(rhs, line_no, false)?;
        rules.push((line_no, name, productions));
    }

    for (line_no, name, productions) in &rules {
        if productions.is_empty() {
            return Err(syntax(
                *line_no,
                &format!("rule <{name}> has no productions"),
            ));
        }
    }
    Grammar::new(
        rules
            .into_iter()
            .map(|(_, name, productions)| Rule::new(name, productions))
            .collect(),
    )
}

/// Serializes a grammar in the format accepted by [`load_grammar`].
/// Terminals are always quoted.
pub fn to_bnf(grammar: &Grammar) -> String {
    let width = grammar
        .rules()
        .iter()
        .map(|r| r.name.len() + 2)
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let mut ordered: Vec<&Rule> = grammar.rules().iter().collect();
    // the start rule goes first so that `load_grammar` picks it up as start
    if let Some(pos) = ordered.iter().position(|r| r.name == grammar.start()) {
        let start = ordered.remove(pos);
        ordered.insert(0, start);
    }
    for rule in ordered {
        let head = format!("<{}>", rule.name);
        for (i, production) in rule.productions.iter().enumerate() {
            let body = production
                .symbols
                .iter()
                .map(symbol_text)
                .collect::<Vec<_>>()
                .join(" ");
            if i == 0 {
                out.push_str(&format!("{head:<width$} ::== {body}\n"));
            } else {
                out.push_str(&format!("{:<width$}  |   {body}\n", ""));
            }
        }
    }
    out
}

fn symbol_text(symbol: &Symbol) -> String {
    match symbol {
        Symbol::NonTerminal(n) => format!("<{n}>"),
        Symbol::Terminal(t) => {
            let escaped = t.replace('\\', "\\\\").replace('"', "\\\"");
            format!("\"{escaped}\"")
        }
    }
}

fn syntax(line: usize, message: &str) -> GrammarError {
    GrammarError::Syntax {
        line,
        message: message.to_string(),
    }
}

/// Splits at the first `::==`/`::=` that is not inside quotes.
fn split_definition(line: &str) -> Option<(&str, &str)> {
    let mut in_quotes = false;
    let mut escaped = false;
    for (i, ch) in line.char_indices() {
        if in_quotes {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_quotes = false,
                _ => {}
            }
            continue;
        }
        if ch == '"' {
            in_quotes = true;
        } else if line[i..].starts_with("::=") {
            let rest = &line[i + 3..];
            let rest = rest.strip_prefix('=').unwrap_or(rest);
            return Some((&line[..i], rest));
        }
    }
    None
}

fn parse_nonterminal(token: &str) -> Option<String> {
    let inner = token.strip_prefix('<')?.strip_suffix('>')?;
    if inner.is_empty() || inner.contains(['<', '>']) || inner.contains(char::is_whitespace) {
        return None;
    }
    Some(inner.to_string())
}

/// Parses `a b | c d | ...`. A continuation line starts right after a `|`,
/// so its first alternative must be non-empty as well.
fn parse_alternatives(
    text: &str,
    line: usize,
    continuation: bool,
) -> Result<Vec<Production>, GrammarError> {
    let mut productions = Vec::new();
    let mut current: Vec<Symbol> = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut saw_separator = continuation;

    while let Some(&(start, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
            continue;
        }
        match ch {
            '|' => {
                chars.next();
                if current.is_empty() {
                    return Err(syntax(line, "empty alternative"));
                }
                productions.push(Production::new(std::mem::take(&mut current)));
                saw_separator = true;
            }
            '"' => {
                chars.next();
                let mut value = String::new();
                let mut closed = false;
                while let Some((_, c)) = chars.next() {
                    match c {
                        '\\' => match chars.next() {
                            Some((_, e)) => value.push(e),
                            None => break,
                        },
                        '"' => {
                            closed = true;
                            break;
                        }
                        other => value.push(other),
                    }
                }
                if !closed {
                    return Err(syntax(line, "unterminated quoted terminal"));
                }
                if value.is_empty() {
                    return Err(syntax(line, "empty quoted terminal"));
                }
                current.push(Symbol::Terminal(value));
            }
            '<' => {
                let mut end = None;
                for (i, c) in chars.by_ref() {
                    if c == '>' {
                        end = Some(i);
                        break;
                    }
                }
                let end = end.ok_or_else(|| syntax(line, "unterminated nonterminal"))?;
                let name = parse_nonterminal(&text[start..=end])
                    .ok_or_else(|| syntax(line, "malformed nonterminal"))?;
                current.push(Symbol::NonTerminal(name));
            }
            _ => {
                let mut end = text.len();
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_whitespace() || c == '|' || c == '"' {
                        end = i;
                        break;
                    }
                    chars.next();
                }
                current.push(Symbol::Terminal(text[start..end].to_string()));
            }
        }
    }
    if current.is_empty() {
        if saw_separator {
            return Err(syntax(line, "empty alternative"));
        }
    } else {
        productions.push(Production::new(current));
    }
    Ok(productions)
}
