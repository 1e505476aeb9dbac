use crate::ast::Pos;

use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: &[&str] = &[
    "==>", "|-", "==", "->", "/\\", "\\/", "(", ")", "[", "]", "{", "}", "<", ">", ",", ";", ":", ".", "=", "|", "*",
    "+",
];

fn unicode_symbol(c: char) -> Option<Tok> {
    Some(match c {
        '⟨' => Tok::Sym("<"),
        '⟩' => Tok::Sym(">"),
        '∧' => Tok::Sym("/\\"),
        '∨' => Tok::Sym("\\/"),
        '⇒' | '⟹' => Tok::Sym("==>"),
        '→' => Tok::Sym("->"),
        '⊢' => Tok::Sym("|-"),
        '×' => Tok::Sym("*"),
        '∀' => Tok::Ident("forall".into()),
        '∃' => Tok::Ident("exists".into()),
        '⊤' => Tok::Ident("top".into()),
        '⊥' => Tok::Ident("bot".into()),
        _ => return None,
    })
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(ParseError::new(pos, "unterminated comment", vec![]));
                }
                if chars[i] == '(' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col, 2);
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col, 2);
                    if depth == 0 {
                        break;
                    }
                } else {
                    advance(&mut i, &mut line, &mut col, 1);
                }
            }
            continue;
        }
        if ident_start(c) {
            let start = i;
            let mut n = 0;
            while start + n < chars.len() && ident_continue(chars[start + n]) {
                n += 1;
            }
            let word: String = chars[start..start + n].iter().collect();
            advance(&mut i, &mut line, &mut col, n);
            toks.push(Token { tok: Tok::Ident(word), pos });
            continue;
        }
        if let Some(tok) = unicode_symbol(c) {
            advance(&mut i, &mut line, &mut col, 1);
            toks.push(Token { tok, pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                advance(&mut i, &mut line, &mut col, sym.chars().count());
                toks.push(Token { tok: Tok::Sym(sym), pos });
            }
            None => return Err(ParseError::new(pos, format!("unexpected character `{c}`"), vec![])),
        }
    }
    toks.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unicode_and_ascii_agree() {
        let a: Vec<Tok> = lex("witness⟨false⟩ (s. rel s s) ∧ ⊤").unwrap().into_iter().map(|t| t.tok).collect();
        let b: Vec<Tok> = lex("witness<false> (s. rel s s) /\\ top").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn nested_comments_and_positions() {
        let toks = lex("(* a (* b *) c *)\n  get").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("get".into()));
        assert_eq!(toks[0].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn primes_in_identifiers() {
        let toks = lex("s' s''").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("s'".into()));
        assert_eq!(toks[1].tok, Tok::Ident("s''".into()));
    }
}
