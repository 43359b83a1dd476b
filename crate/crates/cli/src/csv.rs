//! CSV output. Values are printed with 17 significant digits so that
//! parsing them back recovers the same `f64`.

use std::io::{self, Write};

use platoon_core::simulator::TrajectoryLog;

pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_row<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let line: Vec<String> = values.iter().map(|&x| format_value(x)).collect();
    writeln!(w, "{}", line.join(","))
}

pub fn write_table<W: Write>(w: &mut W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        write_row(w, &row)?;
    }
    Ok(())
}

/// `t,q0,v0,a0,u0,q1,...,e1,delta1,deltaref1,...`
pub fn trajectory_header(n_vehicles: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    for i in 0..n_vehicles {
        for name in ["q", "v", "a", "u"] {
            header.push(format!("{name}{i}"));
        }
    }
    for i in 1..n_vehicles {
        for name in ["e", "delta", "deltaref"] {
            header.push(format!("{name}{i}"));
        }
    }
    header
}

pub fn write_trajectory<W: Write>(w: &mut W, log: &TrajectoryLog) -> io::Result<()> {
    let header = trajectory_header(log.vehicles.len());
    writeln!(w, "{}", header.join(","))?;
    let mut row = Vec::with_capacity(header.len());
    for k in 0..log.len() {
        row.clear();
        row.push(log.t[k]);
        for v in &log.vehicles {
            row.extend([v.q[k], v.v[k], v.a[k], v.u[k]]);
        }
        for f in &log.followers {
            row.extend([f.e[k], f.delta[k], f.delta_ref[k]]);
        }
        write_row(w, &row)?;
    }
    Ok(())
}
