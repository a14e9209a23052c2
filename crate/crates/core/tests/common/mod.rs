//! Independent helpers shared by the integration tests.
#![allow(dead_code)]

use bspline_quad::expr::{BinOp, Func, Node};
use proptest::prelude::*;

/// Distance in units of the last place between two finite doubles.
pub fn ulps(a: f64, b: f64) -> u64 {
    let key = |x: f64| {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

fn literal() -> impl Strategy<Value = f64> {
    prop_oneof![
        (0u32..20).prop_map(f64::from),
        0.0f64..10.0,
        (1u32..1000, -8i32..8).prop_map(|(m, e)| f64::from(m) * 10f64.powi(e)),
    ]
}

/// Random expression trees over `dims` variables.
pub fn arb_node(dims: usize) -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        3 => literal().prop_map(Node::Num),
        3 => (0..dims).prop_map(Node::Var),
        1 => prop_oneof![
            Just(Node::Const(bspline_quad::expr::Constant::Pi)),
            Just(Node::Const(bspline_quad::expr::Constant::E)),
        ],
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow),
        ];
        let func = prop::sample::select(Func::ALL.to_vec());
        prop_oneof![
            2 => (op, inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Node::Binary(op, Box::new(l), Box::new(r))),
            1 => inner.clone().prop_map(|n| Node::Neg(Box::new(n))),
            1 => (func, inner).prop_map(|(f, n)| Node::Call(f, Box::new(n))),
        ]
    })
}

/// Shunting-yard evaluator written against the textual grammar.
///
/// Returns `None` where any intermediate value is non-finite, a square root has a
/// negative argument or a divisor is zero.
pub fn shunting_yard_eval(src: &str, point: &[f64]) -> Option<f64> {
    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(f64),
        Name(String),
        Op(char),
        Neg,
        LParen,
        RParen,
    }

    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i + 1 < chars.len()
                && chars[i] == 'e'
                && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '-' || chars[i + 1] == '+')
            {
                i += 2;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            toks.push(Tok::Num(text.parse().ok()?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            toks.push(Tok::Name(chars[start..i].iter().collect()));
        } else {
            let prev_is_operand = matches!(
                toks.last(),
                Some(Tok::Num(_)) | Some(Tok::Name(_)) | Some(Tok::RParen)
            );
            toks.push(match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '-' if !prev_is_operand => Tok::Neg,
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                _ => return None,
            });
            i += 1;
        }
    }

    let prec = |t: &Tok| match t {
        Tok::Op('+') | Tok::Op('-') => 1,
        Tok::Op('*') | Tok::Op('/') => 2,
        Tok::Op('^') => 3,
        Tok::Neg => 4,
        _ => 0,
    };
    let right_assoc = |t: &Tok| matches!(t, Tok::Op('^') | Tok::Neg);
    let is_func = |s: &str| matches!(s, "exp" | "sin" | "cos" | "sqrt" | "atan" | "abs");

    // Convert to postfix.
    let mut output: Vec<Tok> = Vec::new();
    let mut stack: Vec<Tok> = Vec::new();
    for t in toks {
        match &t {
            Tok::Num(_) => output.push(t),
            Tok::Name(s) if is_func(s) => stack.push(t),
            Tok::Name(_) => output.push(t),
            Tok::Neg => stack.push(t),
            Tok::Op(_) => {
                while let Some(top) = stack.last() {
                    let pops = matches!(top, Tok::Op(_) | Tok::Neg)
                        && (prec(top) > prec(&t) || (prec(top) == prec(&t) && !right_assoc(&t)));
                    if !pops {
                        break;
                    }
                    output.push(stack.pop()?);
                }
                stack.push(t);
            }
            Tok::LParen => stack.push(t),
            Tok::RParen => {
                loop {
                    let top = stack.pop()?;
                    if top == Tok::LParen {
                        break;
                    }
                    output.push(top);
                }
                if let Some(Tok::Name(s)) = stack.last() {
                    if is_func(s) {
                        output.push(stack.pop()?);
                    }
                }
            }
        }
    }
    while let Some(t) = stack.pop() {
        output.push(t);
    }

    let finite = |v: f64| v.is_finite().then_some(v);
    let mut values: Vec<f64> = Vec::new();
    for t in output {
        let v = match t {
            Tok::Num(v) => v,
            Tok::Name(s) if is_func(&s) => {
                let a = values.pop()?;
                match s.as_str() {
                    "exp" => a.exp(),
                    "sin" => a.sin(),
                    "cos" => a.cos(),
                    "sqrt" if a < 0.0 => return None,
                    "sqrt" => a.sqrt(),
                    "atan" => a.atan(),
                    _ => a.abs(),
                }
            }
            Tok::Name(s) => match s.as_str() {
                "pi" => std::f64::consts::PI,
                "e" => std::f64::consts::E,
                "x" => point[0],
                v => point[v[1..].parse::<usize>().ok()? - 1],
            },
            Tok::Neg => -values.pop()?,
            Tok::Op(op) => {
                let b = values.pop()?;
                let a = values.pop()?;
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' if b == 0.0 => return None,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            _ => return None,
        };
        values.push(finite(v)?);
    }
    (values.len() == 1).then(|| values[0])
}
