use std::io::Write;

use super::{complexity_estimate, ComplexitySizes};
use super::{FootprintReport, TaxonomyRow};
use crate::error::Result;

const CELL: f64 = 24.0;

/// One row per report: position, pixel count and bounding box.
pub fn write_footprint_csv<W: Write>(out: W, reports: &[FootprintReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["operator", "oy", "ox", "count", "y_min", "x_min", "y_max", "x_max"])?;
    for r in reports {
        let (oy, ox) = r.position;
        let mut rec = vec![
            r.operator.to_string(),
            oy.to_string(),
            ox.to_string(),
            r.count().to_string(),
        ];
        match r.bounding_box() {
            Some(b) => rec.extend([b.y_min, b.x_min, b.y_max, b.x_max].map(|v| v.to_string())),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// With `sizes`, an `ops` column evaluates each complexity expression.
pub fn write_taxonomy_csv<W: Write>(out: W, rows: &[TaxonomyRow], sizes: Option<ComplexitySizes>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "operator",
        "window",
        "window_size",
        "long_range",
        "aggregation",
        "complexity",
    ];
    if sizes.is_some() {
        header.push("ops");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.operator.name().to_string(),
            r.window.name().to_string(),
            r.window_size.to_string(),
            if r.long_range { "enabled" } else { "disabled" }.to_string(),
            r.aggregation.name().to_string(),
            r.complexity.to_string(),
        ];
        if let Some(s) = sizes {
            rec.push(complexity_estimate(r.operator, s).count.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Pixel grid shaded by weight, with regions outlined and sampling points
/// marked. Pixel `(y, x)` covers `[x - 0.5, x + 0.5] x [y - 0.5, y + 0.5]`.
pub fn write_footprint_svg<W: Write>(mut out: W, report: &FootprintReport, height: usize, width: usize) -> Result<()> {
    let max_w = report.weights.values().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let (sw, sh) = (width as f64 * CELL, height as f64 * CELL);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{sw}" height="{sh}" viewBox="0 0 {sw} {sh}">"#
    )?;
    writeln!(out, r##"<rect width="{sw}" height="{sh}" fill="#ffffff"/>"##)?;
    for y in 0..height {
        for x in 0..width {
            let opacity = report.weights.get(&(y, x)).map_or(0.0, |w| w.abs() / max_w);
            writeln!(
                out,
                r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#d6336c" fill-opacity="{opacity:.4}" stroke="#999999" stroke-width="0.5"/>"##,
                x as f64 * CELL,
                y as f64 * CELL
            )?;
        }
    }
    let to_svg = |v: f64| (v + 0.5) * CELL;
    for r in &report.regions {
        writeln!(
            out,
            r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#1c7ed6" stroke-width="2"/>"##,
            to_svg(r.left()),
            to_svg(r.top()),
            r.width() * CELL,
            r.height() * CELL
        )?;
    }
    for p in &report.points {
        writeln!(
            out,
            r##"<circle cx="{:.3}" cy="{:.3}" r="3" fill="#1c7ed6"/>"##,
            to_svg(p.x),
            to_svg(p.y)
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{footprint, taxonomy_table, OperatorConfig};
    use crate::ops::{KernelGrid, OffsetField, RadConvParams};

    fn report() -> FootprintReport {
        let params = RadConvParams::new(KernelGrid::pointwise());
        let off = OffsetField::zeros(1, 1, 4, 4);
        footprint(
            &OperatorConfig::RadConv {
                params: &params,
                offsets: &off,
            },
            4,
            4,
            1,
            1,
        )
        .unwrap()
    }

    #[test]
    fn footprint_csv_has_header_and_rows() {
        let mut buf = Vec::new();
        write_footprint_csv(&mut buf, &[report()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "operator,oy,ox,count,y_min,x_min,y_max,x_max");
        assert_eq!(lines[1], "radconv,1,1,9,0,0,2,2");
    }

    #[test]
    fn taxonomy_csv_has_six_rows() {
        let mut buf = Vec::new();
        write_taxonomy_csv(&mut buf, &taxonomy_table(), None).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 7);
    }

    #[test]
    fn taxonomy_ops_column_evaluates_expressions() {
        let sizes = ComplexitySizes {
            n: 10,
            k: 9,
            r: 2,
            d: 4,
            w: 3,
        };
        let mut buf = Vec::new();
        write_taxonomy_csv(&mut buf, &taxonomy_table(), Some(sizes)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().next().unwrap().ends_with(",complexity,ops"));
        assert!(text.contains("global-attention,unbounded,H*W,enabled,adaptive,N^2*d,400"));
        assert!(text.contains(",K*N*R^2,360"));
    }

    #[test]
    fn svg_has_one_cell_per_pixel_and_region_outline() {
        let mut buf = Vec::new();
        write_footprint_svg(&mut buf, &report(), 4, 4).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("stroke-width=\"0.5\"").count(), 16);
        assert_eq!(text.matches("fill=\"none\"").count(), 1);
        assert!(text.trim_end().ends_with("</svg>"));
    }
}
