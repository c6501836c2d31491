use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{CliError, CliResult};
use crate::riesz::{Domain, TriDomainFunction};

/// One node of a function and its derivative. In the outer domains `u` and
/// `dalpha_u` are physical values and `scaled_dalpha_u` is `|x|^{1+α} D^α u`;
/// in the middle domain the two derivative columns coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeRow {
    pub domain: Domain,
    pub local: f64,
    pub x: f64,
    pub u: f64,
    pub dalpha_u: f64,
    pub scaled_dalpha_u: f64,
}

pub fn derivative_rows(u: &TriDomainFunction, du: &TriDomainFunction, domain: Domain) -> Vec<DerivativeRow> {
    let grid = u.grid();
    grid.nodes(domain)
        .iter()
        .zip(u.values(domain).iter().zip(du.values(domain)))
        .map(|(&t, (&v, &d))| {
            let f = if domain == Domain::Middle { 1.0 } else { grid.unscale_factor(t) };
            DerivativeRow {
                domain,
                local: t,
                x: grid.physical(domain, t),
                u: v * f,
                dalpha_u: d * f,
                scaled_dalpha_u: d,
            }
        })
        .collect()
}

/// 17 significant digits, enough to read back the same double.
fn number(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        // no "-0" in the tables
        format!("{:.16e}", x + 0.0)
    }
}

/// Writes `<stem>_<domain>.csv` for the three domains and returns the paths.
pub fn write_derivative_csv(
    dir: &Path,
    stem: &str,
    u: &TriDomainFunction,
    du: &TriDomainFunction,
) -> CliResult<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for d in Domain::ALL {
        let mut text = String::from("domain,local_coordinate,x_or_inf,u,Dalpha_u,scaled_Dalpha_u\n");
        for r in derivative_rows(u, du, d) {
            let _ = writeln!(
                text,
                "{},{},{},{},{},{}",
                d.label(),
                number(r.local),
                number(r.x),
                number(r.u),
                number(r.dalpha_u),
                number(r.scaled_dalpha_u)
            );
        }
        let path = dir.join(format!("{stem}_{}.csv", d.label()));
        fs::write(&path, text).map_err(CliError::io(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::functions::Builtin;
    use crate::riesz::{DomainPartition, RationalOrder, TriDomainGrid};

    #[test]
    fn infinity_rows_and_digits() {
        let part = DomainPartition::uniform(-1.0, 1.0, 1e-2, 4).unwrap();
        let grid = Arc::new(TriDomainGrid::new(RationalOrder::new(1, 2).unwrap(), part).unwrap());
        let u = Builtin::Lorentz.sample(grid);
        let rows = derivative_rows(&u, &u, Domain::Right);
        let last = rows.last().unwrap();
        assert_eq!(last.local, 0.0);
        assert_eq!(number(last.x), "inf");
        assert_eq!(last.u, 0.0);
        assert_eq!(number(f64::NEG_INFINITY), "-inf");
        let x = 0.1f64 + 0.2;
        assert_eq!(number(x).parse::<f64>().unwrap(), x);
    }
}
