//! The property language: `property NAME: body;` declarations, one body form
//! per property type.
//!
//! ```text
//! prop     := "property" IDENT ":" body ";"
//! body     := "(" body ")"
//!           | "assert" expr CMP expr ["in" interval {"," interval}]
//!           | "spike" ["down"] "on" IDENT "in" interval "with" feature {"," feature}
//!                 ["psi" (min|max|mean)] ["method" method] ["anchor" (vp1|peak|vp2)]
//!           | "spike2" "on" IDENT "with" "m" "=" NUM "," "w" "=" NUM ["derivative" IDENT]
//!           | "oscillation" "on" IDENT "in" interval "with" ofeature {"," ofeature}
//!                 ["ref" NUM | "peak-to-peak" | "avg-peak-to-peak"] ["average"]
//!                 ["method" method] ["prominence" NUM] [(damped|driven) ["trend"]]
//!                 ["anchor" (min|max|any)]
//!           | "let" IDENT "=" expr "then" body
//!           | "whenever" kind body "then" kind body ["within" CMP NUM]
//!           | "before" kind body "requires" kind body ["within" CMP NUM]
//!           | (rise|fall) "on" IDENT "to" CMP NUM "after" body "within" NUM ["monotonic"]
//!           | (overshoot|undershoot) "on" IDENT "to" CMP NUM "after" body
//!                 (max|min) (NUM | "target" (+|-) NUM) "over" NUM ["monotonic"]
//! feature  := (a|sp1|sp2|w) CMP NUM
//! ofeature := (period|amplitude) CMP NUM
//! method   := analytical | punctual | "precomputed" "(" IDENT "," IDENT ")"
//! kind     := event | state
//! interval := "[" NUM "," NUM "]"
//! expr     := term {(+|-) term};  term := unary {(*|/) unary}
//! unary    := "-" unary | "abs" "(" expr ")" | "deriv" "(" expr ["," (1|2)] ")"
//!           | NUM | IDENT | "(" expr ")"
//! CMP      := < | <= | = | >= | > | !=
//! ```
//!
//! Keywords are lowercase and case-sensitive; `#` starts a comment.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod typecheck;

pub use ast::{CheckError, ParseError, SourceSpan};
pub use parser::{parse, parse_body};
pub use pretty::{body_text, pretty_print};
pub use typecheck::typecheck;
