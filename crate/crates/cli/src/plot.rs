//! Self-contained SVG line plots of closed-loop trajectories with dashed
//! bound overlays.

use std::fmt::Write as _;

use lodegp::mpc::{BoundsSpec, Trajectory};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 110.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 44.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

pub fn render_svg(traj: &Trajectory, bounds: &BoundsSpec) -> String {
    let n = traj.times.len();
    let n_x = traj.states.first().map_or(0, |x| x.len());
    let n_u = traj.inputs.first().map_or(0, |u| u.len());
    let n_z = n_x + n_u;
    let channel = |ch: usize, i: usize| {
        if ch < n_x {
            traj.states[i][ch]
        } else {
            traj.inputs[i][ch - n_x]
        }
    };
    let label = |ch: usize| {
        if ch < n_x {
            format!("x{}", ch + 1)
        } else {
            format!("u{}", ch - n_x + 1)
        }
    };

    let (t0, t1) = (traj.times[0], traj.times[n - 1]);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        for ch in 0..n_z {
            lo = lo.min(channel(ch, i));
            hi = hi.max(channel(ch, i));
        }
    }
    for (ch, cb) in bounds.channels.iter().enumerate() {
        let _ = ch;
        for &t in &traj.times {
            let (l, u) = cb.eval(t);
            if l.is_finite() {
                lo = lo.min(l);
            }
            if u.is_finite() {
                hi = hi.max(u);
            }
        }
    }
    if !(lo < hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.06 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);

    let xmap = |t: f64| MARGIN_L + (t - t0) / (t1 - t0) * (WIDTH - MARGIN_L - MARGIN_R);
    let ymap = |v: f64| HEIGHT - MARGIN_B - (v - lo) / (hi - lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{yb}" x2="{x1}" y2="{yb}" stroke="black" stroke-width="1"/>"#,
        x0 = MARGIN_L,
        x1 = WIDTH - MARGIN_R,
        yb = HEIGHT - MARGIN_B
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{yt}" x2="{x0}" y2="{yb}" stroke="black" stroke-width="1"/>"#,
        x0 = MARGIN_L,
        yt = MARGIN_T,
        yb = HEIGHT - MARGIN_B
    );
    for k in 0..=4 {
        let t = t0 + (t1 - t0) * k as f64 / 4.0;
        let x = xmap(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="black"/><text x="{x}" y="{yt}" font-size="12" text-anchor="middle">{t:.2}</text>"#,
            y0 = HEIGHT - MARGIN_B,
            y1 = HEIGHT - MARGIN_B + 5.0,
            yt = HEIGHT - MARGIN_B + 20.0
        );
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let y = ymap(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="black"/><text x="{xt}" y="{yt}" font-size="12" text-anchor="end">{v:.2}</text>"#,
            x0 = MARGIN_L - 5.0,
            x1 = MARGIN_L,
            xt = MARGIN_L - 8.0,
            yt = y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-size="13" text-anchor="middle">t</text>"#,
        x = (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        y = HEIGHT - 8.0
    );

    // dashed bounds, then trajectories on top
    for (ch, cb) in bounds.channels.iter().enumerate() {
        let color = PALETTE[ch % PALETTE.len()];
        for side in 0..2 {
            let pts: Vec<String> = traj
                .times
                .iter()
                .filter_map(|&t| {
                    let (l, u) = cb.eval(t);
                    let v = if side == 0 { l } else { u };
                    v.is_finite()
                        .then(|| format!("{:.2},{:.2}", xmap(t), ymap(v)))
                })
                .collect();
            if pts.len() >= 2 {
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2" stroke-dasharray="6,4" opacity="0.8"/>"#,
                    pts.join(" ")
                );
            }
        }
    }
    for ch in 0..n_z {
        let color = PALETTE[ch % PALETTE.len()];
        let pts: Vec<String> = (0..n)
            .map(|i| format!("{:.2},{:.2}", xmap(traj.times[i]), ymap(channel(ch, i))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
            pts.join(" ")
        );
    }

    // legend
    for ch in 0..n_z {
        let color = PALETTE[ch % PALETTE.len()];
        let y = MARGIN_T + 18.0 * ch as f64 + 8.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{y}" width="14" height="4" fill="{color}"/><text x="{xt}" y="{yt}" font-size="13">{name}</text>"#,
            x = WIDTH - MARGIN_R + 16.0,
            xt = WIDTH - MARGIN_R + 36.0,
            yt = y + 6.0,
            name = label(ch)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
