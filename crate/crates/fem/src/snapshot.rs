//! Plain-text field dumps for post-processing.
//!
//! Two whitespace-separated tables with one header line each:
//!
//! ```text
//! node x y z ux uy uz kbar     (one row per node)
//! elem gp k d_i d_u            (one row per element and Gauss point)
//! ```
//!
//! Values use the shortest decimal form that round-trips `f64`, matching the
//! mesh format, so downstream tools can reparse them without loss.

use std::io::{self, Write};

use crate::equilibrium::{dof, GaussPointRecord};
use crate::mesh::Mesh;

pub fn write_nodal_table(
    w: &mut impl Write,
    mesh: &Mesh,
    u: &[f64],
    kbar: &[f64],
) -> io::Result<()> {
    assert_eq!(u.len(), 3 * mesh.nodes.len(), "displacement length mismatch");
    assert_eq!(kbar.len(), mesh.nodes.len(), "nonlocal field length mismatch");
    writeln!(w, "node x y z ux uy uz kbar")?;
    for (n, p) in mesh.nodes.iter().enumerate() {
        writeln!(
            w,
            "{} {} {} {} {} {} {} {}",
            n,
            p[0],
            p[1],
            p[2],
            u[dof(n, 0)],
            u[dof(n, 1)],
            u[dof(n, 2)],
            kbar[n]
        )?;
    }
    Ok(())
}

pub fn write_gauss_table(w: &mut impl Write, records: &[Vec<GaussPointRecord>]) -> io::Result<()> {
    writeln!(w, "elem gp k d_i d_u")?;
    for (e, gps) in records.iter().enumerate() {
        for (g, rec) in gps.iter().enumerate() {
            writeln!(
                w,
                "{} {} {} {} {}",
                e, g, rec.plastic.k, rec.damage.d_i, rec.damage.d_u
            )?;
        }
    }
    Ok(())
}
