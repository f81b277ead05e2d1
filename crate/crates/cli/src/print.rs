//! Canonical printer for the class description language.
//!
//! The output parses back to the printed class, and the composite
//! parse-then-print is idempotent: every circle is shown by its canonical
//! representative, entries and points come out in sorted order, and the
//! conjugacy class is always written out (so the multiplicity never is).
//! Data outside the language, such as irrational coefficients or points,
//! is rejected rather than approximated.

use wildrep_core::{rat, EigVal, Error, ExactScalar, GlobalClass, Rat, Result, SpherePoint};

fn rat_str(q: &Rat) -> String {
    q.to_string()
}

fn scalar_rat(s: &ExactScalar, what: &str) -> Result<Rat> {
    s.to_rat()
        .ok_or_else(|| Error::Invalid(format!("{what} {s} cannot be written in the language")))
}

fn poly_str(terms: &[(Rat, ExactScalar)]) -> Result<String> {
    if terms.is_empty() {
        return Ok("0".to_string());
    }
    let mut out = String::new();
    for (i, (k, c)) in terms.iter().enumerate() {
        let c = scalar_rat(c, "coefficient")?;
        let neg = c < rat(0, 1);
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = if neg { -c } else { c };
        if mag != rat(1, 1) {
            out.push_str(&rat_str(&mag));
            out.push('*');
        }
        if *k == rat(1, 1) {
            out.push('x');
        } else {
            out.push_str(&format!("x^({})", rat_str(k)));
        }
    }
    Ok(out)
}

fn eig_str(e: &EigVal) -> Result<String> {
    match e {
        EigVal::Exact(s) => Ok(rat_str(&scalar_rat(s, "eigenvalue")?)),
        EigVal::Symbolic { .. } => Ok(e.to_string()),
    }
}

fn point_str(p: &SpherePoint) -> Result<String> {
    match p {
        SpherePoint::Infinity => Ok("inf".to_string()),
        SpherePoint::Finite(a) => Ok(rat_str(&scalar_rat(a, "point")?)),
    }
}

/// Renders a class back into the language.
pub fn print_class(name: &str, g: &GlobalClass) -> Result<String> {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    if !head_ok || chars.any(|c| !c.is_ascii_alphanumeric() && c != '_') {
        return Err(Error::Invalid(format!("`{name}` is not a valid class name")));
    }
    let mut out = format!("class {name} {{\n");
    for local in g.locals() {
        out.push_str(&format!("  at {}:", point_str(local.point())?));
        for (i, e) in local.entries().iter().enumerate() {
            out.push_str(if i == 0 { " " } else { ", " });
            out.push_str(&format!("<{}>", poly_str(e.circle.rep().terms())?));
            let eigs = e
                .class
                .spectrum()
                .iter()
                .map(|(v, blocks)| {
                    let sizes: Vec<String> = blocks.iter().map(|b| b.to_string()).collect();
                    Ok(format!("{}:[{}]", eig_str(v)?, sizes.join(",")))
                })
                .collect::<Result<Vec<String>>>()?;
            out.push_str(&format!(" {{{}}}", eigs.join("; ")));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    Ok(out)
}
