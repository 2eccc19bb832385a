//! The query vocabulary: which arguments each query takes and how argument
//! values are read and printed.

use std::fmt;

use qreider::expr::{is_ident_char, is_ident_start, Expr};
use qreider::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgType {
    Point,
    Tangent,
    Curve,
    /// A divisor expression without parameters.
    Divisor,
    /// A divisor expression that may use declared parameters.
    Family,
    Number,
    Count,
    /// A tuple of numbers.
    Witness,
    /// A tuple of expressions in the parameters.
    Template,
    Goal,
    Mode,
}

#[derive(Debug, Clone, Copy)]
pub struct ArgSpec {
    pub key: &'static str,
    pub ty: ArgType,
    pub required: bool,
}

const fn req(key: &'static str, ty: ArgType) -> ArgSpec {
    ArgSpec { key, ty, required: true }
}

const fn opt(key: &'static str, ty: ArgType) -> ArgSpec {
    ArgSpec { key, ty, required: false }
}

/// One accepted argument set. The first `positional` arguments may also be
/// given without their key, in order.
#[derive(Debug, Clone, Copy)]
pub struct Form {
    pub args: &'static [ArgSpec],
    pub positional: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuerySpec {
    pub name: &'static str,
    pub forms: &'static [Form],
}

use ArgType::*;

pub const QUERIES: &[QuerySpec] = &[
    QuerySpec {
        name: "chi",
        forms: &[Form { args: &[req("divisor", Divisor)], positional: 1 }],
    },
    QuerySpec {
        name: "intersect",
        forms: &[Form { args: &[req("a", Divisor), req("b", Divisor)], positional: 2 }],
    },
    QuerySpec {
        name: "check-nef",
        forms: &[Form { args: &[req("divisor", Divisor)], positional: 1 }],
    },
    QuerySpec {
        name: "check-free",
        forms: &[
            Form {
                args: &[req("point", Point), req("boundary", Divisor), req("nef", Divisor), opt("witness", Witness)],
                positional: 0,
            },
            Form {
                args: &[req("mu", Number), req("m2", Number), req("deg", Number), opt("witness", Witness)],
                positional: 0,
            },
        ],
    },
    QuerySpec {
        name: "check-separate",
        forms: &[
            Form {
                args: &[
                    req("p", Point),
                    req("q", Point),
                    req("boundary", Divisor),
                    req("nef", Divisor),
                    opt("witness", Witness),
                ],
                positional: 0,
            },
            Form {
                args: &[
                    req("mu_p", Number),
                    req("mu_q", Number),
                    req("m2", Number),
                    req("deg_p", Number),
                    req("deg_q", Number),
                    req("deg_pq", Number),
                    opt("witness", Witness),
                ],
                positional: 0,
            },
        ],
    },
    QuerySpec {
        name: "check-tangent",
        forms: &[
            Form {
                args: &[req("tangent", Tangent), req("boundary", Divisor), req("nef", Divisor), opt("witness", Witness)],
                positional: 0,
            },
            Form {
                args: &[
                    req("mu_p", Number),
                    req("mu_near", Number),
                    req("m2", Number),
                    req("deg_p", Number),
                    req("deg_z", Number),
                    opt("witness", Witness),
                ],
                positional: 0,
            },
        ],
    },
    QuerySpec {
        name: "check-very-ample",
        forms: &[
            Form { args: &[req("nef", Divisor), opt("witness", Witness)], positional: 1 },
            Form { args: &[req("m2", Number), req("deg", Number), opt("witness", Witness)], positional: 0 },
        ],
    },
    QuerySpec {
        name: "check-very-ample-bound",
        forms: &[
            Form { args: &[req("nef", Divisor)], positional: 1 },
            Form { args: &[req("m2", Number), req("deg", Number)], positional: 0 },
        ],
    },
    QuerySpec {
        name: "check-jets",
        forms: &[
            Form { args: &[req("point", Point), req("boundary", Divisor), req("s", Count)], positional: 0 },
            Form { args: &[req("mu", Number), req("s", Count)], positional: 0 },
        ],
    },
    QuerySpec {
        name: "curve-adjoint",
        forms: &[
            Form { args: &[req("divisor", Divisor), req("curve", Curve)], positional: 2 },
            Form { args: &[req("degree", Number)], positional: 0 },
        ],
    },
    QuerySpec {
        name: "plc-threshold",
        forms: &[Form {
            args: &[
                req("point", Point),
                req("boundary", Divisor),
                req("aux", Divisor),
                opt("tangent", Tangent),
                opt("mode", Mode),
            ],
            positional: 0,
        }],
    },
    QuerySpec {
        name: "search",
        forms: &[Form {
            args: &[
                req("boundary", Family),
                req("nef", Family),
                req("goal", Goal),
                opt("witness", Template),
                opt("first-level", Count),
            ],
            positional: 0,
        }],
    },
    QuerySpec {
        name: "hirzebruch-claim",
        forms: &[Form { args: &[req("n", Count), req("part", Count), opt("m", Count)], positional: 0 }],
    },
];

pub fn spec(name: &str) -> Option<&'static QuerySpec> {
    QUERIES.iter().find(|q| q.name == name)
}

impl Form {
    pub fn arg(&self, key: &str) -> Option<&ArgSpec> {
        self.args.iter().find(|a| a.key == key)
    }

    /// `point= boundary= nef= [witness=]`
    pub fn usage(&self) -> String {
        self.args
            .iter()
            .map(|a| if a.required { format!("{}=", a.key) } else { format!("[{}=]", a.key) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalArg {
    Free(String),
    Separate(String, String),
    Tangent(String),
    VeryAmple,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModeArg {
    Basic,
    CapThree,
    Critical { curve: String, inclusive: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Name(String),
    Expr(Expr),
    Number(Q),
    Count(u32),
    Values(Vec<Q>),
    Template(Vec<Expr>),
    Goal(GoalArg),
    Mode(ModeArg),
}

fn compact(e: &Expr) -> String {
    // printed expressions use explicit `*`, so dropping blanks keeps tokens apart
    e.to_string().chars().filter(|c| !c.is_whitespace()).collect()
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Name(s) => write!(f, "{s}"),
            Arg::Expr(e) => write!(f, "{}", compact(e)),
            Arg::Number(x) => write!(f, "{x}"),
            Arg::Count(k) => write!(f, "{k}"),
            Arg::Values(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Arg::Template(v) => {
                let parts: Vec<String> = v.iter().map(compact).collect();
                write!(f, "({})", parts.join(","))
            }
            Arg::Goal(g) => match g {
                GoalArg::Free(p) => write!(f, "free:{p}"),
                GoalArg::Separate(p, q) => write!(f, "separate:{p}:{q}"),
                GoalArg::Tangent(t) => write!(f, "tangent:{t}"),
                GoalArg::VeryAmple => write!(f, "very-ample"),
            },
            Arg::Mode(m) => match m {
                ModeArg::Basic => write!(f, "basic"),
                ModeArg::CapThree => write!(f, "cap3"),
                ModeArg::Critical { curve, inclusive } => {
                    write!(f, "critical:{curve}")?;
                    if *inclusive {
                        write!(f, ":inclusive")?;
                    }
                    Ok(())
                }
            },
        }
    }
}

pub fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if is_ident_start(c)) && cs.all(is_ident_char)
}

/// Splits `(a, b, c)` into its top-level parts; `None` if the text is not a
/// single parenthesised group.
pub fn split_tuple(s: &str) -> Option<Vec<&str>> {
    split_top(s.strip_prefix('(')?.strip_suffix(')')?)
}

/// Splits at commas outside brackets; `None` on unbalanced brackets.
pub fn split_top(inner: &str) -> Option<Vec<&str>> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(&inner[start..]);
    Some(parts)
}

fn constant(e: &Expr) -> Result<Q, String> {
    if let Some(s) = e.symbols().first() {
        return Err(format!("expected a number, found the name `{s}`"));
    }
    e.eval(&|_| None).map_err(|err| err.to_string())
}

fn parse_expr(s: &str) -> Result<Expr, String> {
    Expr::parse(s).map_err(|e| e.to_string())
}

/// Reads one argument value. Names are only checked for shape here; whether
/// they are declared is decided during resolution.
pub fn parse_arg(ty: ArgType, s: &str) -> Result<Arg, String> {
    let name = |s: &str| {
        if is_name(s) {
            Ok(s.to_string())
        } else {
            Err(format!("expected a name, found `{s}`"))
        }
    };
    match ty {
        Point | Tangent | Curve => Ok(Arg::Name(name(s)?)),
        Divisor | Family => Ok(Arg::Expr(parse_expr(s)?)),
        Number => Ok(Arg::Number(constant(&parse_expr(s)?)?)),
        Count => s
            .parse::<u32>()
            .map(Arg::Count)
            .map_err(|_| format!("expected a non-negative integer, found `{s}`")),
        Witness | Template => {
            let parts = split_tuple(s).ok_or_else(|| format!("expected a tuple `(a, b, ...)`, found `{s}`"))?;
            let exprs = parts.iter().map(|p| parse_expr(p)).collect::<Result<Vec<_>, _>>()?;
            if ty == Witness {
                Ok(Arg::Values(exprs.iter().map(constant).collect::<Result<_, _>>()?))
            } else {
                Ok(Arg::Template(exprs))
            }
        }
        Goal => {
            let parts: Vec<&str> = s.split(':').collect();
            let g = match parts.as_slice() {
                ["free", p] => GoalArg::Free(name(p)?),
                ["separate", p, q] => GoalArg::Separate(name(p)?, name(q)?),
                ["tangent", t] => GoalArg::Tangent(name(t)?),
                ["very-ample"] => GoalArg::VeryAmple,
                _ => {
                    return Err(format!(
                        "expected free:POINT, separate:POINT:POINT, tangent:TANGENT or very-ample, found `{s}`"
                    ))
                }
            };
            Ok(Arg::Goal(g))
        }
        Mode => {
            let parts: Vec<&str> = s.split(':').collect();
            let m = match parts.as_slice() {
                ["basic"] => ModeArg::Basic,
                ["cap3"] => ModeArg::CapThree,
                ["critical", c] => ModeArg::Critical { curve: name(c)?, inclusive: false },
                ["critical", c, "inclusive"] => ModeArg::Critical { curve: name(c)?, inclusive: true },
                _ => {
                    return Err(format!(
                        "expected basic, cap3, critical:CURVE or critical:CURVE:inclusive, found `{s}`"
                    ))
                }
            };
            Ok(Arg::Mode(m))
        }
    }
}
