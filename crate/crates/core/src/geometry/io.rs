use std::io::Write;

use crate::geometry::tensor::TensorField;

/// Column header naming each component slot, e.g. `a^0_01` for the
/// component with contravariant index 0 and covariant indices 0, 1.
pub fn component_names(a: &TensorField) -> Vec<String> {
    let v = a.valence();
    let m = a.dim();
    (0..a.ncomp())
        .map(|c| {
            let digits: Vec<usize> = (0..v.rank()).map(|p| (c / m.pow((v.rank() - 1 - p) as u32)) % m).collect();
            let up: String = digits[..v.contra].iter().map(|d| d.to_string()).collect();
            let down: String = digits[v.contra..].iter().map(|d| d.to_string()).collect();
            match (v.contra, v.co) {
                (0, 0) => "a".to_string(),
                (_, 0) => format!("a^{up}"),
                (0, _) => format!("a_{down}"),
                _ => format!("a^{up}_{down}"),
            }
        })
        .collect()
}

/// Write a field as CSV: node coordinates followed by its components,
/// one row per node.
pub fn write_field_csv<W: Write>(a: &TensorField, mut w: W) -> std::io::Result<()> {
    let grid = a.grid();
    let mut header: Vec<String> = (0..grid.dim()).map(|i| format!("x{i}")).collect();
    header.extend(component_names(a));
    writeln!(w, "{}", header.join(","))?;
    for n in 0..grid.len() {
        let p = grid.point(n);
        let mut row: Vec<String> = p[..grid.dim()].iter().map(|x| format!("{x:.17e}")).collect();
        row.extend(a.at(n).iter().map(|x| format!("{x:.17e}")));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::{Axis, ChartGrid};
    use crate::geometry::tensor::Valence;
    use std::sync::Arc;

    #[test]
    fn header_names_slots() {
        let g = Arc::new(ChartGrid::two_d(Axis::uniform(0.0, 1.0, 4).unwrap(), Axis::uniform(0.0, 1.0, 4).unwrap()).unwrap());
        let a = TensorField::zeros(&g, Valence::new(1, 2)).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("x0,x1,a^0_00,a^0_01"));
        assert_eq!(text.lines().count(), 17);
    }
}
