//! Plain-text mesh files and legacy VTK output.
//!
//! Mesh file layout, one record per line, `#` starts a comment:
//!
//! ```text
//! kind quad4|hex8
//! thickness <m>
//! nodes <count>
//! <x> <y> <z>                      (count lines)
//! elements <count>
//! <active 0|1> <node ids...>       (count lines)
//! set <name> <count> <node ids...> (any number of lines)
//! ```

use std::io::{BufRead, Write};

use crate::mesh::{ElementKind, Mesh};
use crate::state::FieldState;
use crate::FemError;

pub fn write_mesh<W: Write>(mut w: W, mesh: &Mesh) -> Result<(), FemError> {
    writeln!(w, "kind {}", mesh.kind.name())?;
    writeln!(w, "thickness {:e}", mesh.thickness)?;
    writeln!(w, "nodes {}", mesh.n_nodes())?;
    for p in &mesh.nodes {
        writeln!(w, "{:e} {:e} {:e}", p[0], p[1], p[2])?;
    }
    writeln!(w, "elements {}", mesh.n_elements())?;
    for e in 0..mesh.n_elements() {
        let ids: Vec<String> = mesh.element(e).iter().map(usize::to_string).collect();
        writeln!(w, "{} {}", u8::from(mesh.active[e]), ids.join(" "))?;
    }
    for (name, set) in &mesh.node_sets {
        let ids: Vec<String> = set.iter().map(usize::to_string).collect();
        writeln!(w, "set {name} {} {}", set.len(), ids.join(" "))?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    /// Next non-empty, comment-stripped line split into tokens.
    fn next(&mut self) -> Result<Option<Vec<String>>, FemError> {
        for line in self.inner.by_ref() {
            self.number += 1;
            let line = line?;
            let body = line.split('#').next().unwrap_or("");
            let tokens: Vec<String> = body.split_whitespace().map(str::to_owned).collect();
            if !tokens.is_empty() {
                return Ok(Some(tokens));
            }
        }
        Ok(None)
    }

    fn err(&self, message: impl Into<String>) -> FemError {
        FemError::Parse { line: self.number, message: message.into() }
    }

    fn expect(&mut self, what: &str) -> Result<Vec<String>, FemError> {
        self.next()?.ok_or_else(|| self.err(format!("unexpected end of file, expected {what}")))
    }

    fn header(&mut self, key: &str) -> Result<String, FemError> {
        let t = self.expect(key)?;
        if t.len() != 2 || t[0] != key {
            return Err(self.err(format!("expected `{key} <value>`")));
        }
        Ok(t[1].clone())
    }

    fn number<T: std::str::FromStr>(&self, s: &str) -> Result<T, FemError> {
        s.parse().map_err(|_| self.err(format!("cannot parse `{s}`")))
    }
}

pub fn read_mesh<R: BufRead>(r: R) -> Result<Mesh, FemError> {
    let mut lines = Lines { inner: r.lines(), number: 0 };
    let kind = match lines.header("kind")?.as_str() {
        "quad4" => ElementKind::Quad4,
        "hex8" => ElementKind::Hex8,
        other => return Err(lines.err(format!("unknown element kind `{other}`"))),
    };
    let t = lines.header("thickness")?;
    let thickness: f64 = lines.number(&t)?;
    let n = lines.header("nodes")?;
    let n: usize = lines.number(&n)?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let t = lines.expect("node coordinates")?;
        if t.len() != 3 {
            return Err(lines.err("a node needs three coordinates"));
        }
        nodes.push([lines.number(&t[0])?, lines.number(&t[1])?, lines.number(&t[2])?]);
    }
    let m = lines.header("elements")?;
    let m: usize = lines.number(&m)?;
    let nen = kind.nodes_per_element();
    let mut conn = Vec::with_capacity(m * nen);
    let mut active = Vec::with_capacity(m);
    for _ in 0..m {
        let t = lines.expect("element record")?;
        if t.len() != nen + 1 {
            return Err(lines.err(format!("an element needs an activity flag and {nen} nodes")));
        }
        active.push(match t[0].as_str() {
            "1" => true,
            "0" => false,
            other => return Err(lines.err(format!("activity flag `{other}`"))),
        });
        for s in &t[1..] {
            conn.push(lines.number(s)?);
        }
    }
    let mut mesh = Mesh::new(kind, nodes, conn, thickness).map_err(|e| lines.err(e.to_string()))?;
    mesh.active = active;
    while let Some(t) = lines.next()? {
        if t.len() < 3 || t[0] != "set" {
            return Err(lines.err("expected `set <name> <count> <ids...>`"));
        }
        let count: usize = lines.number(&t[2])?;
        if t.len() != 3 + count {
            return Err(lines.err(format!("set `{}` lists {} ids, header says {count}", t[1], t.len() - 3)));
        }
        let ids = t[3..].iter().map(|s| lines.number(s)).collect::<Result<Vec<usize>, _>>()?;
        mesh.set_node_set(t[1].clone(), ids).map_err(|e| lines.err(e.to_string()))?;
    }
    Ok(mesh)
}

/// Legacy ASCII VTK unstructured grid of the active elements with point data
/// `u`, `phi`, `d` and the element-averaged history as cell data `H`.
pub fn write_vtk<W: Write>(mut w: W, mesh: &Mesh, state: &FieldState, points_per_element: usize) -> Result<(), FemError> {
    let dim = mesh.dim();
    let n = mesh.n_nodes();
    let active: Vec<usize> = mesh.active_elements().collect();
    let nen = mesh.kind.nodes_per_element();
    let cell_h = state.element_history(points_per_element);
    if state.phi.len() != n || state.u.len() != n * dim || cell_h.len() != active.len() {
        return Err(FemError::InvalidSpec("field sizes do not match the mesh".into()));
    }
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "coupled fracture fields")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {n} double")?;
    for p in &mesh.nodes {
        writeln!(w, "{:e} {:e} {:e}", p[0], p[1], p[2])?;
    }
    writeln!(w, "CELLS {} {}", active.len(), active.len() * (nen + 1))?;
    for &e in &active {
        let ids: Vec<String> = mesh.element(e).iter().map(usize::to_string).collect();
        writeln!(w, "{nen} {}", ids.join(" "))?;
    }
    writeln!(w, "CELL_TYPES {}", active.len())?;
    let vtk_type = match mesh.kind {
        ElementKind::Quad4 => 9,
        ElementKind::Hex8 => 12,
    };
    for _ in &active {
        writeln!(w, "{vtk_type}")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    writeln!(w, "VECTORS u double")?;
    for v in 0..n {
        let z = if dim == 3 { state.u[3 * v + 2] } else { 0.0 };
        writeln!(w, "{:e} {:e} {:e}", state.u[dim * v], state.u[dim * v + 1], z)?;
    }
    for (name, data) in [("phi", &state.phi), ("d", &state.d)] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for x in data.iter() {
            writeln!(w, "{x:e}")?;
        }
    }
    writeln!(w, "CELL_DATA {}", active.len())?;
    writeln!(w, "SCALARS H double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for h in &cell_h {
        writeln!(w, "{h:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_structured_mesh, Feature, GridSpec};

    fn sample() -> Mesh {
        let mut spec = GridSpec::rectangle(0.01, 0.02, 1e-3, 5e-3);
        spec.features.push(Feature::Hole { center: [0.005, 0.01], radius: 2.5e-3 });
        build_structured_mesh(&spec).unwrap()
    }

    #[test]
    fn mesh_round_trip() {
        let m = sample();
        let mut buf = Vec::new();
        write_mesh(&mut buf, &m).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn parse_errors_carry_line() {
        let text = "kind quad4\nthickness 1\nnodes 1\n0 0\n";
        match read_mesh(text.as_bytes()) {
            Err(FemError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_mesh("kind tet4\n".as_bytes()), Err(FemError::Parse { line: 1, .. })));
    }

    #[test]
    fn vtk_layout() {
        let m = sample();
        let mut s = FieldState::zeros(&m, 4 * m.n_active());
        s.phi.fill(10.0);
        let mut buf = Vec::new();
        write_vtk(&mut buf, &m, &s, 4).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(text.contains(&format!("CELLS {} {}", m.n_active(), 5 * m.n_active())));
        let phi: Vec<&str> = text.split("SCALARS phi double 1\nLOOKUP_TABLE default\n").nth(1).unwrap().lines().take(m.n_nodes()).collect();
        assert!(phi.iter().all(|l| *l == "1e1"));
    }
}
