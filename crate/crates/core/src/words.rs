//! Free-group words and finite presentations, with a small text syntax.
//!
//! Words are written with `*` for concatenation, `^` for integer powers and
//! parentheses for grouping, e.g. `y^-1*(x*z)^3*x`. The literal `1` denotes
//! the empty word. Whitespace is ignored.
//!
//! A presentation file lists its generators and relators:
//!
//! ```text
//! # comment
//! generators: x, y, z
//! relators:
//! x^5
//! (x*z)^3
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
}

/// One letter of a word: a generator index and whether it is inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Column index used by coset tables: `2g` for `g`, `2g+1` for `g^-1`.
    pub fn column(self) -> usize {
        2 * self.generator + usize::from(self.inverse)
    }
}

/// A freely reduced word over generator indices of some presentation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Builds a word from arbitrary letters, freely reducing them.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            match stack.last() {
                Some(&top) if top == l.inverted() => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Word { letters: stack }
    }

    pub fn generator(index: usize) -> Self {
        Word {
            letters: vec![Letter::new(index, false)],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 {
            self.invert()
        } else {
            self.clone()
        };
        let mut out = Word::identity();
        for _ in 0..exponent.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator).max()
    }

    /// Renders the word with the given generator names, e.g. `x*y^-1`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return f.write_str("1");
        }
        for (i, l) in self.word.letters.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            let name = self
                .names
                .get(l.generator)
                .map(String::as_str)
                .unwrap_or("?");
            f.write_str(name)?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// Generators of a subgroup, as words in the ambient presentation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub generator_words: Vec<Word>,
}

impl SubgroupSpec {
    pub fn new(generator_words: Vec<Word>) -> Self {
        SubgroupSpec { generator_words }
    }

    pub fn trivial() -> Self {
        SubgroupSpec::default()
    }

    /// Parses `w1; w2; ...` (semicolons or commas) against a presentation.
    pub fn parse(text: &str, ctx: &Presentation) -> Result<Self, WordError> {
        let words = text
            .split([';', ','])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_word(s, ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SubgroupSpec::new(words))
    }

    /// True when every generator word is the empty word.
    pub fn is_trivially_trivial(&self) -> bool {
        self.generator_words.iter().all(Word::is_identity)
    }
}

/// A finite presentation `<generators | relators>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, WordError> {
        for (i, g) in generators.iter().enumerate() {
            if !is_identifier(g) {
                return Err(WordError::Syntax {
                    line: 0,
                    column: 0,
                    message: format!("invalid generator name `{g}`"),
                });
            }
            if generators[..i].contains(g) {
                return Err(WordError::DuplicateGenerator(g.clone()));
            }
        }
        if let Some(bad) = relators
            .iter()
            .filter_map(Word::max_generator)
            .find(|&m| m >= generators.len())
        {
            return Err(WordError::UnknownGenerator(format!("#{bad}")));
        }
        let relators = relators.into_iter().filter(|r| !r.is_identity()).collect();
        Ok(Presentation {
            generators,
            relators,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn word(&self, text: &str) -> Result<Word, WordError> {
        parse_word(text, self)
    }

    /// Serializes back into the presentation file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("generators: {}\nrelators:\n", self.generators.join(", "));
        for r in &self.relators {
            out.push_str(&r.display(&self.generators).to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} | ", self.generators.join(", "))?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", r.display(&self.generators))?;
        }
        f.write_str(">")
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a word in the context of `ctx`'s generator names.
pub fn parse_word(text: &str, ctx: &Presentation) -> Result<Word, WordError> {
    parse_word_with(text, ctx.generators(), 0)
}

/// Inverse of a word (free-group inverse).
pub fn invert(w: &Word) -> Word {
    w.invert()
}

fn parse_word_with(text: &str, names: &[String], line: usize) -> Result<Word, WordError> {
    let mut p = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        names,
        line,
    };
    let w = p.word()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(w)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    names: &'a [String],
    line: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> WordError {
        WordError::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn word(&mut self) -> Result<Word, WordError> {
        let mut w = self.term()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let t = self.term()?;
            w = w.concat(&t);
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Word, WordError> {
        let atom = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            Ok(atom.pow(e))
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<Word, WordError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(w)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len() {
                    let c = self.chars[self.pos].1;
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name: String = self.chars[start..self.pos]
                    .iter()
                    .map(|&(_, c)| c)
                    .collect();
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Word::generator(i)),
                    None => Err(WordError::UnknownGenerator(name)),
                }
            }
            Some(_) => Err(self.error("expected generator, `1` or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<i64, WordError> {
        self.skip_ws();
        let mut negative = false;
        let mut braced = false;
        if self.peek() == Some('{') {
            braced = true;
            self.pos += 1;
        }
        match self.peek() {
            Some('-') => {
                negative = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent"));
        }
        let digits: String = self.chars[start..self.pos]
            .iter()
            .map(|&(_, c)| c)
            .collect();
        let value: i64 = digits
            .parse()
            .map_err(|_| self.error("exponent out of range"))?;
        if braced {
            if self.peek() != Some('}') {
                return Err(self.error("expected `}`"));
            }
            self.pos += 1;
        }
        Ok(if negative { -value } else { value })
    }
}

/// Parses the presentation file format.
pub fn parse_presentation(text: &str) -> Result<Presentation, WordError> {
    let mut generators: Option<Vec<String>> = None;
    let mut relator_src: Vec<(usize, String)> = Vec::new();
    let mut in_relators = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = strip_header(line, "generators") {
            if generators.is_some() {
                return Err(WordError::Syntax {
                    line: line_no,
                    column: 1,
                    message: "repeated `generators:` header".into(),
                });
            }
            let mut names = Vec::new();
            for name in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if !is_identifier(name) {
                    return Err(WordError::Syntax {
                        line: line_no,
                        column: 1,
                        message: format!("invalid generator name `{name}`"),
                    });
                }
                if names.iter().any(|n| n == name) {
                    return Err(WordError::DuplicateGenerator(name.to_string()));
                }
                names.push(name.to_string());
            }
            generators = Some(names);
            in_relators = false;
        } else if let Some(rest) = strip_header(line, "relators") {
            in_relators = true;
            relator_src.extend(
                rest.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| (line_no, s.to_string())),
            );
        } else if in_relators {
            relator_src.extend(
                line.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| (line_no, s.to_string())),
            );
        } else {
            return Err(WordError::Syntax {
                line: line_no,
                column: 1,
                message: "expected `generators:` or `relators:` header".into(),
            });
        }
    }

    let generators = generators.ok_or(WordError::Syntax {
        line: 0,
        column: 0,
        message: "missing `generators:` header".into(),
    })?;
    let relators = relator_src
        .iter()
        .map(|(line, src)| parse_word_with(src, &generators, *line))
        .collect::<Result<Vec<_>, _>>()?;
    Presentation::new(generators, relators)
}

fn strip_header<'a>(line: &'a str, header: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(header)?;
    rest.trim_start().strip_prefix(':')
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xyz() -> Presentation {
        parse_presentation("generators: x, y, z\nrelators:\n").unwrap()
    }

    fn l(g: usize, inv: bool) -> Letter {
        Letter::new(g, inv)
    }

    #[test]
    fn parse_simple_words() {
        let p = xyz();
        assert_eq!(
            parse_word("x*y^-1", &p).unwrap().letters(),
            &[l(0, false), l(1, true)]
        );
        let w = parse_word("(x*z)^3", &p).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(
            w.letters(),
            &[
                l(0, false),
                l(2, false),
                l(0, false),
                l(2, false),
                l(0, false),
                l(2, false)
            ]
        );
        assert_eq!(
            parse_word("x*x^-1*y", &p).unwrap().letters(),
            &[l(1, false)]
        );
    }

    #[test]
    fn exponent_zero_and_identity_literal() {
        let p = xyz();
        assert!(parse_word("(x*y)^0", &p).unwrap().is_identity());
        assert!(parse_word("1", &p).unwrap().is_identity());
        assert_eq!(parse_word("x^{-2}", &p).unwrap().len(), 2);
    }

    #[test]
    fn parse_errors() {
        let p = xyz();
        assert_eq!(
            parse_word("x*w", &p),
            Err(WordError::UnknownGenerator("w".into()))
        );
        assert!(matches!(
            parse_word("x*", &p),
            Err(WordError::Syntax { .. })
        ));
        assert!(matches!(
            parse_word("(x*y", &p),
            Err(WordError::Syntax { .. })
        ));
        assert!(matches!(
            parse_word("x^", &p),
            Err(WordError::Syntax { .. })
        ));
        assert!(matches!(
            parse_word("x y", &p),
            Err(WordError::Syntax { .. })
        ));
    }

    #[test]
    fn invert_examples() {
        let p = xyz();
        let w = parse_word("x*y", &p).unwrap();
        assert_eq!(invert(&w).letters(), &[l(1, true), l(0, true)]);
        assert!(invert(&Word::identity()).is_identity());
        let xi = parse_word("x^-1", &p).unwrap();
        assert_eq!(invert(&xi).letters(), &[l(0, false)]);
    }

    #[test]
    fn presentation_file() {
        let src =
            "# O28\ngenerators: x, y, z\nrelators:\nx^5\ny^2\nz^2\n(x*z)^3\n(x*y)^2\n(y*z^-1)^2\n";
        let p = parse_presentation(src).unwrap();
        assert_eq!(p.num_generators(), 3);
        assert_eq!(p.relators().len(), 6);

        let c3 = parse_presentation("generators: x\nrelators: x^3").unwrap();
        assert_eq!(c3.relators().len(), 1);
        assert_eq!(c3.relators()[0].len(), 3);

        assert_eq!(
            parse_presentation("generators: x, x\nrelators:\n"),
            Err(WordError::DuplicateGenerator("x".into()))
        );
        assert!(matches!(
            parse_presentation("relators:\nx^2\n"),
            Err(WordError::Syntax { .. })
        ));
    }

    #[test]
    fn o22c_contains_order_five_relator() {
        let src = "generators: x, y, z\nrelators:\nx^2\ny^2\nz^2\n(y^-1*x)^2\n(y^-1*(x*z)^3*x)^2\n(y^-1*x*z^-1)^5\n";
        let p = parse_presentation(src).unwrap();
        let target = p.word("(y^-1*x*z^-1)^5").unwrap();
        assert!(p.relators().contains(&target));
    }

    fn arb_letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0usize..3, any::<bool>()).prop_map(|(g, i)| l(g, i)), 0..24)
    }

    proptest! {
        #[test]
        fn reduction_is_confluent(letters in arb_letters(), inserts in prop::collection::vec((0usize..30, 0usize..3, any::<bool>()), 0..8)) {
            let reduced = Word::from_letters(letters.clone());
            let mut noisy = letters;
            for (pos, g, inv) in inserts {
                let at = pos % (noisy.len() + 1);
                noisy.insert(at, l(g, !inv));
                noisy.insert(at, l(g, inv));
            }
            prop_assert_eq!(Word::from_letters(noisy), reduced);
        }

        #[test]
        fn print_parse_round_trip(letters in arb_letters()) {
            let p = xyz();
            let w = Word::from_letters(letters);
            let text = w.display(p.generators()).to_string();
            let back = parse_word(&text, &p).unwrap();
            prop_assert_eq!(&back, &w);
            prop_assert_eq!(back.display(p.generators()).to_string(), text);
        }

        #[test]
        fn inverse_laws(letters in arb_letters()) {
            let w = Word::from_letters(letters);
            prop_assert_eq!(w.invert().invert(), w.clone());
            prop_assert!(w.concat(&w.invert()).is_identity());
        }
    }
}
