//! CSV and SVG artifacts. Numbers are printed with 17 significant digits so
//! identical runs produce identical bytes.

use std::fmt::Write as _;

use crate::dynamics::Trajectory;

/// `v` with 17 significant digits.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        // Avoid "-0.0000000000000000e0".
        return "0".into();
    }
    format!("{v:.16e}")
}

/// Rows under a header line; `comments` become leading `# ` lines.
pub fn csv(
    comments: &[String],
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> String {
    let mut s = String::new();
    for c in comments {
        let _ = writeln!(s, "# {c}");
    }
    let _ = writeln!(s, "{}", header.join(","));
    for r in rows {
        let cells: Vec<String> = r.into_iter().map(num).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    csv(
        &[format!("termination: {}", tr.termination)],
        &["t", "x", "y"],
        tr.samples.iter().map(|s| vec![s.t, s.x, s.y]),
    )
}

pub fn points_csv(comments: &[String], points: &[(f64, f64)]) -> String {
    csv(comments, &["x", "y"], points.iter().map(|p| vec![p.0, p.1]))
}

/// Read back the `(x, y)` columns of a CSV written here, skipping comments.
pub fn read_xy(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let Some(header) = lines.next() else {
        return Vec::new();
    };
    let cols: Vec<&str> = header.split(',').collect();
    let ix = cols.iter().position(|c| *c == "x");
    let iy = cols.iter().position(|c| *c == "y");
    let (Some(ix), Some(iy)) = (ix, iy) else {
        return Vec::new();
    };
    lines
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Some((f.get(ix)?.parse().ok()?, f.get(iy)?.parse().ok()?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Window {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self, String> {
        if !(xmin < xmax && ymin < ymax) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite())
        {
            return Err(format!("empty window [{xmin}, {xmax}] x [{ymin}, {ymax}]"));
        }
        Ok(Self {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        p.0 >= self.xmin && p.0 <= self.xmax && p.1 >= self.ymin && p.1 <= self.ymax
    }

    fn grown(&self, k: f64) -> Self {
        let (dx, dy) = ((self.xmax - self.xmin) * k, (self.ymax - self.ymin) * k);
        Self {
            xmin: self.xmin - dx,
            xmax: self.xmax + dx,
            ymin: self.ymin - dy,
            ymax: self.ymax + dy,
        }
    }
}

/// Self-contained SVG in window coordinates, y pointing up.
pub struct Svg {
    window: Window,
    body: String,
}

impl Svg {
    pub fn new(window: Window) -> Self {
        let mut s = Self {
            window,
            body: String::new(),
        };
        s.axes();
        s
    }

    fn axes(&mut self) {
        let w = self.window;
        if w.ymin <= 0.0 && w.ymax >= 0.0 {
            self.line(&[(w.xmin, 0.0), (w.xmax, 0.0)], "#999999", 0.5);
        }
        if w.xmin <= 0.0 && w.xmax >= 0.0 {
            self.line(&[(0.0, w.ymin), (0.0, w.ymax)], "#999999", 0.5);
        }
    }

    fn line(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        let d: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.6},{:.6}", x, -y))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}" vector-effect="non-scaling-stroke"/>"#,
            d.join(" ")
        );
    }

    /// Polyline split wherever it leaves a margin around the window.
    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        let keep = self.window.grown(0.5);
        let mut run: Vec<(f64, f64)> = Vec::new();
        for &p in pts {
            if keep.contains(p) && p.0.is_finite() && p.1.is_finite() {
                run.push(p);
            } else {
                if run.len() > 1 {
                    self.line(&run, stroke, width);
                }
                run.clear();
            }
        }
        if run.len() > 1 {
            self.line(&run, stroke, width);
        }
    }

    pub fn dot(&mut self, p: (f64, f64), fill: &str) {
        let r = 0.005 * (self.window.xmax - self.window.xmin);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.6}" cy="{:.6}" r="{r:.6}" fill="{fill}"/>"#,
            p.0, -p.1
        );
    }

    pub fn finish(&self) -> String {
        let w = self.window;
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800" preserveAspectRatio="none">"#,
                "\n",
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
                "\n{}</svg>\n"
            ),
            w.xmin,
            -w.ymax,
            w.xmax - w.xmin,
            w.ymax - w.ymin,
            w.xmin,
            -w.ymax,
            w.xmax - w.xmin,
            w.ymax - w.ymin,
            self.body
        )
    }
}

/// Colour for the `i`-th curve of a plot.
pub fn palette(i: usize) -> &'static str {
    const C: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
    ];
    C[i % C.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, std::f64::consts::PI] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
        assert_eq!(num(-0.0), "0");
    }

    #[test]
    fn csv_round_trip() {
        let pts = vec![(0.5, -1.25), (1e-9, 3.0)];
        let text = points_csv(&["hello".into()], &pts);
        assert!(text.starts_with("# hello\nx,y\n"));
        assert_eq!(read_xy(&text), pts);
    }

    #[test]
    fn svg_splits_far_points() {
        let w = Window::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let mut s = Svg::new(w);
        s.polyline(
            &[(0.0, 0.0), (0.5, 0.5), (1e9, 0.0), (0.2, 0.1), (0.3, 0.1)],
            "red",
            1.0,
        );
        let out = s.finish();
        assert_eq!(out.matches("stroke=\"red\"").count(), 2);
        assert!(out.contains(r#"viewBox="-1 -1 2 2""#));
    }

    #[test]
    fn empty_window_rejected() {
        assert!(Window::new(1.0, 1.0, 0.0, 1.0).is_err());
    }
}
