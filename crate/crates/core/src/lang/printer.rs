use super::ast::{Argument, Literal, Program, Statement, Value};
use super::schema::Registry;

/// Canonical text form: one statement per line, arguments in schema
/// declaration order when the statement is known.
pub fn pretty_print(program: &Program) -> String {
    pretty_print_with(program, Registry::builtin())
}

pub fn pretty_print_with(program: &Program, registry: &Registry) -> String {
    let mut out = String::new();
    for stmt in &program.statements {
        out.push_str(&print_statement(stmt, registry));
        out.push('\n');
    }
    out
}

/// Like [`pretty_print`] but keeps every argument where the source had it.
pub fn print_source_order(program: &Program) -> String {
    let mut out = String::new();
    for stmt in &program.statements {
        out.push_str(&render(stmt, stmt.args.iter().collect()));
        out.push('\n');
    }
    out
}

pub fn print_statement(stmt: &Statement, registry: &Registry) -> String {
    render(stmt, ordered_args(stmt, registry))
}

fn render(stmt: &Statement, args: Vec<&Argument>) -> String {
    let mut s = String::new();
    if let Some(b) = &stmt.binding {
        s.push_str(b);
        s.push_str(" = ");
    }
    s.push_str(&stmt.name);
    s.push('(');
    let args: Vec<String> = args.into_iter().map(|a| format!("{}={}", a.name, print_value(&a.value))).collect();
    s.push_str(&args.join(", "));
    s.push(')');
    s
}

/// Arguments in schema order; parameters unknown to the schema keep source
/// order after the known ones.
pub fn ordered_args<'a>(stmt: &'a Statement, registry: &Registry) -> Vec<&'a Argument> {
    let mut args: Vec<&Argument> = stmt.args.iter().collect();
    if let Some(schema) = registry.lookup(&stmt.name) {
        args.sort_by_key(|a| schema.param_index(&a.name).unwrap_or(usize::MAX));
    }
    args
}

pub fn print_value(v: &Value) -> String {
    match v {
        Value::Var(name) => name.clone(),
        Value::Special(sp) => format!("\"{}\"", sp.as_str()),
        Value::Literal(lit) => print_literal(lit),
    }
}

pub fn print_literal(lit: &Literal) -> String {
    match lit {
        Literal::Boolean(b) => b.to_string(),
        Literal::Number(n) => format_number(*n),
        Literal::String(s) => quote(s),
        Literal::Placeholder(p) => p.token().to_owned(),
    }
}

pub fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    const FORMAT_EXAMPLES: &str = r##"# Applies a set of formatting updates to provided shapes.
format_shapes(shapes=shapes, fillColor="teal", fillTransparency=0.2, top=50, left=50, height=300, width=200, lineColor="#964B00", lineTransparency=0.2)

# Formats the text in textRanges with a set of formatting properties.
format_text(textRanges=textRanges, bold=true, fontName="Times New Roman", horizontalAlignment="Left", color="teal", italic=true, underline="Wavy")
"##;

    #[test]
    fn round_trips_format_examples() {
        let p = parse(FORMAT_EXAMPLES).unwrap();
        let printed = pretty_print(&p);
        let reparsed = parse(&printed).unwrap();
        // Argument order changes, so compare through the printer as well.
        assert_eq!(pretty_print(&reparsed), printed);
        assert_eq!(reparsed.len(), 2);
    }

    #[test]
    fn empty_program_prints_empty() {
        assert_eq!(pretty_print(&Program::default()), "");
    }

    #[test]
    fn shuffled_args_print_in_schema_order() {
        let p = parse(r#"format_text(underline="Wavy", color="teal", textRanges=t, bold=true)"#).unwrap();
        assert_eq!(pretty_print(&p), "format_text(textRanges=t, bold=true, color=\"teal\", underline=\"Wavy\")\n");
    }

    #[test]
    fn unknown_statement_keeps_source_order() {
        let p = parse("x = frob(b=1, a=2)").unwrap();
        assert_eq!(pretty_print(&p), "x = frob(b=1, a=2)\n");
    }

    #[test]
    fn numbers_and_escapes() {
        assert_eq!(format_number(100.0), "100");
        assert_eq!(format_number(0.2), "0.2");
        assert_eq!(format_number(-3.0), "-3");
        let p = parse(r#"insert_text(text="say \"hi\"\nback\\slash")"#).unwrap();
        let printed = pretty_print(&p);
        assert_eq!(parse(&printed).unwrap(), p);
    }
}
