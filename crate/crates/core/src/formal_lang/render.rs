use super::Formula;

/// Canonical concrete syntax; `parse_formula` inverts it exactly.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn write(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom { symbol } => out.push_str(symbol),
        Formula::Membership {
            subject,
            predicate,
            object: None,
        } => {
            out.push_str(subject.name());
            out.push_str(" in ");
            out.push_str(predicate);
        }
        Formula::Membership {
            subject,
            predicate,
            object: Some(object),
        } => {
            out.push_str(subject.name());
            out.push(' ');
            out.push_str(predicate);
            out.push(' ');
            out.push_str(object.name());
        }
        Formula::Not { operand } => {
            out.push('!');
            if matches!(**operand, Formula::Binary { .. }) {
                write(operand, out);
            } else {
                out.push('(');
                write(operand, out);
                out.push(')');
            }
        }
        Formula::Binary {
            connective,
            left,
            right,
        } => {
            out.push('(');
            write(left, out);
            out.push(' ');
            out.push_str(connective.glyph());
            out.push(' ');
            write(right, out);
            out.push(')');
        }
        Formula::Forall { var, body } | Formula::Exists { var, body } => {
            out.push_str(if matches!(f, Formula::Forall { .. }) {
                "forall "
            } else {
                "exists "
            });
            out.push_str(var);
            out.push_str(". ");
            write(body, out);
        }
        Formula::WhQuery {
            var,
            restrictor,
            body,
        } => {
            out.push_str("wh ");
            out.push_str(var);
            out.push_str(". (");
            write(restrictor, out);
            out.push_str(", ");
            write(body, out);
            out.push(')');
        }
        Formula::ProbAssertion { event, p } => {
            out.push_str("prob(");
            out.push_str(event);
            out.push_str(") = ");
            out.push_str(&p.to_string());
        }
    }
}
