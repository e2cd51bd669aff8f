//! Parameter values: numbers, vectors, matrices and object references.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// A number; `inf` and `-inf` are allowed.
    Num(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
    Name(String),
    Names(Vec<String>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Vector(_) => "vector",
            Value::Matrix(_) => "matrix",
            Value::Name(_) => "name",
            Value::Names(_) => "name list",
        }
    }
}

pub(crate) fn fmt_num(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v == f64::INFINITY {
        f.write_str("inf")
    } else if v == f64::NEG_INFINITY {
        f.write_str("-inf")
    } else {
        // Debug output is the shortest representation that round-trips.
        write!(f, "{v:?}")
    }
}

fn fmt_list<T>(items: &[T], f: &mut fmt::Formatter<'_>, each: impl Fn(&T, &mut fmt::Formatter<'_>) -> fmt::Result) -> fmt::Result {
    f.write_str("[")?;
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        each(v, f)?;
    }
    f.write_str("]")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => fmt_num(*v, f),
            Value::Vector(v) => fmt_list(v, f, |x, f| fmt_num(*x, f)),
            Value::Matrix(rows) => fmt_list(rows, f, |r, f| fmt_list(r, f, |x, f| fmt_num(*x, f))),
            Value::Name(n) => f.write_str(n),
            Value::Names(ns) => fmt_list(ns, f, |n, f| f.write_str(n)),
        }
    }
}

pub(crate) fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !matches!(s, "inf")
}

/// A syntax error at a character offset within the parsed text.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ValueError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ValueError> {
    Err(ValueError {
        offset,
        message: message.into(),
    })
}

enum Item {
    Num(f64),
    Name(String),
    List(Vec<Item>),
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl Cursor<'_> {
    fn skip_separators(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == ',') {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Item, ValueError> {
        let start = self.pos;
        while self.pos < self.chars.len() && !matches!(self.chars[self.pos], '[' | ']' | ',') && !self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if text.is_empty() {
            return err(start, "expected a value");
        }
        parse_scalar(&text)
            .map(Item::Num)
            .or_else(|| is_name(&text).then(|| Item::Name(text.clone())))
            .map_or_else(|| err(start, format!("not a number or name: {text:?}")), Ok)
    }

    fn item(&mut self) -> Result<Item, ValueError> {
        if self.chars.get(self.pos) != Some(&'[') {
            return self.atom();
        }
        let open = self.pos;
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.skip_separators();
            match self.chars.get(self.pos) {
                None => return err(open, "unclosed '['"),
                Some(']') => {
                    self.pos += 1;
                    return Ok(Item::List(items));
                }
                Some(_) => items.push(self.item()?),
            }
        }
    }
}

pub(crate) fn parse_scalar(text: &str) -> Option<f64> {
    match text {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => {
            let first = t.chars().next()?;
            if !(first.is_ascii_digit() || matches!(first, '-' | '+' | '.')) {
                return None;
            }
            t.parse::<f64>().ok().filter(|v| v.is_finite())
        }
    }
}

/// Parses one value token.
pub(crate) fn parse_value(text: &str) -> Result<Value, ValueError> {
    let mut c = Cursor {
        chars: text.chars().collect(),
        pos: 0,
        _src: text,
    };
    let item = c.item()?;
    if c.pos != c.chars.len() {
        return err(c.pos, "trailing characters after value");
    }
    classify(item)
}

fn classify(item: Item) -> Result<Value, ValueError> {
    match item {
        Item::Num(v) => Ok(Value::Num(v)),
        Item::Name(n) => Ok(Value::Name(n)),
        Item::List(items) => {
            if items.iter().all(|i| matches!(i, Item::Num(_))) {
                return Ok(Value::Vector(
                    items
                        .into_iter()
                        .map(|i| match i {
                            Item::Num(v) => v,
                            _ => unreachable!(),
                        })
                        .collect(),
                ));
            }
            if items.iter().all(|i| matches!(i, Item::Name(_))) {
                return Ok(Value::Names(
                    items
                        .into_iter()
                        .map(|i| match i {
                            Item::Name(n) => n,
                            _ => unreachable!(),
                        })
                        .collect(),
                ));
            }
            let mut rows = Vec::new();
            for i in items {
                match i {
                    Item::List(row) if row.iter().all(|x| matches!(x, Item::Num(_))) => rows.push(
                        row.into_iter()
                            .map(|x| match x {
                                Item::Num(v) => v,
                                _ => unreachable!(),
                            })
                            .collect(),
                    ),
                    _ => return err(0, "lists must hold only numbers, only names, or only rows of numbers"),
                }
            }
            Ok(Value::Matrix(rows))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_shape() {
        assert_eq!(parse_value("2.5").unwrap(), Value::Num(2.5));
        assert_eq!(parse_value("-inf").unwrap(), Value::Num(f64::NEG_INFINITY));
        assert_eq!(parse_value("[1, 2 3]").unwrap(), Value::Vector(vec![1.0, 2.0, 3.0]));
        assert_eq!(
            parse_value("[[1,0],[0,1]]").unwrap(),
            Value::Matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]])
        );
        assert_eq!(parse_value("f1").unwrap(), Value::Name("f1".into()));
        assert_eq!(
            parse_value("[f1, g]").unwrap(),
            Value::Names(vec!["f1".into(), "g".into()])
        );
    }

    #[test]
    fn rejects_malformed_values() {
        assert!(parse_value("[1, 2").is_err());
        assert!(parse_value("[1, f]").is_err());
        assert!(parse_value("1x").is_err());
        assert!(parse_value("1e999").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["0.1", "[1.0, -2.5]", "[[1.0, 0.0], [0.0, 1e-300]]", "inf", "[a, b]"] {
            let v = parse_value(text).unwrap();
            assert_eq!(parse_value(&v.to_string()).unwrap(), v);
        }
    }
}
