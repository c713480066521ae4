//! SVG figures of the (s, q)-plane, q pointing up.

use std::fmt::Write as _;

use clap::ValueEnum;
use stabplane::exceptional::{five_points, ExceptionalTriple};
use stabplane::gldim::{scan_grid, GldimCase};
use stabplane::lepotier::LPApprox;
use stabplane::numk::CharVector;
use stabplane::plane::PlanePoint;
use stabplane::rat::{int, parse_rat_list, rat, Rat};
use stabplane::stability::{mz_polygons, GeometricSC};
use stabplane::surd::Surd;
use stabplane::walls::wall;

use crate::{pair, parse_triple, CmdResult, Failure, PlotArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Overlay {
    Gldim,
    Regions,
    Walls,
}

const WIDTH: i64 = 800;
const HEIGHT: i64 = 600;
const DIGITS: usize = 12;

/// Affine map from a window of the plane onto the pixel box.
struct Frame {
    s0: Rat,
    q1: Rat,
    kx: Rat,
    ky: Rat,
}

impl Frame {
    fn new(s: &(Rat, Rat), q: &(Rat, Rat)) -> Frame {
        Frame {
            s0: s.0.clone(),
            q1: q.1.clone(),
            kx: int(WIDTH) / (&s.1 - &s.0),
            ky: int(HEIGHT) / (&q.1 - &q.0),
        }
    }

    fn x(&self, s: &Surd) -> String {
        num(&(&(s - &self.s0) * &self.kx))
    }

    fn y(&self, q: &Surd) -> String {
        num(&(&(&(-q) + &self.q1) * &self.ky))
    }

    fn x_rat(&self, s: &Rat) -> Rat {
        (s - &self.s0) * &self.kx
    }

    fn y_rat(&self, q: &Rat) -> Rat {
        (&self.q1 - q) * &self.ky
    }

    fn xy(&self, p: &PlanePoint) -> String {
        format!("{},{}", self.x(&p.s), self.y(&p.q))
    }

    fn path(&self, pts: &[&PlanePoint], closed: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            d.push(if i == 0 { 'M' } else { 'L' });
            d.push_str(&self.xy(p));
        }
        if closed {
            d.push('Z');
        }
        d
    }
}

/// Exact value rounded at the last moment, trailing zeros dropped.
fn num(x: &Surd) -> String {
    let text = x.to_decimal(DIGITS);
    let text = text.trim_end_matches('0').trim_end_matches('.');
    match text {
        "-0" | "" => "0".to_string(),
        t => t.to_string(),
    }
}

fn default_q_range(s: &(Rat, Rat)) -> (Rat, Rat) {
    let zero = Rat::from_integer(0.into());
    let sq = |x: &Rat| x * x / int(2);
    let low = if s.0 <= zero && zero <= s.1 {
        zero
    } else {
        sq(&s.0).min(sq(&s.1))
    };
    (low - rat(5, 4), sq(&s.0).max(sq(&s.1)) + rat(1, 2))
}

fn heat(value: f64) -> String {
    let t = (value - 2.0).clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(44.0, 215.0), lerp(123.0, 25.0), lerp(182.0, 28.0))
}

pub fn cmd_plot(a: PlotArgs) -> CmdResult {
    let s_range = pair(&a.window, "--window")?;
    let q_range = match &a.q_range {
        Some(q) => pair(q, "--q-range")?,
        None => default_q_range(&s_range),
    };
    let triple = parse_triple(&a.triple, &a.shape)?;
    let walls = a
        .wall
        .iter()
        .map(|w| {
            let v = parse_rat_list(w)?;
            if v.len() != 5 {
                return Err(Failure::usage("--wall takes s,q,ch0,ch1,ch2"));
            }
            let sigma = GeometricSC::unchecked(v[0].clone(), v[1].clone());
            Ok((sigma, CharVector::new(v[2].clone(), v[3].clone(), v[4].clone())))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let svg = render(&s_range, &q_range, a.depth, &a.overlay, &triple, a.res, &walls)?;
    match &a.output {
        Some(path) => std::fs::write(path, svg)?,
        None => print!("{svg}"),
    }
    Ok(())
}

fn render(
    s_range: &(Rat, Rat),
    q_range: &(Rat, Rat),
    depth: u32,
    overlays: &[Overlay],
    triple: &ExceptionalTriple,
    res: usize,
    walls: &[(GeometricSC, CharVector)],
) -> Result<String, Failure> {
    let frame = Frame::new(s_range, q_range);
    let approx = LPApprox::build(s_range.clone(), depth);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect class="frame" x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white" stroke="black"/>"#
    );

    if overlays.contains(&Overlay::Gldim) && res > 0 {
        let rows = scan_grid(
            (&s_range.0, &s_range.1),
            (&q_range.0, &q_range.1),
            (res, res),
            depth,
            1,
        )?;
        let cw = Rat::from_integer(WIDTH.into()) / int(res as i64);
        let ch = Rat::from_integer(HEIGHT.into()) / int(res as i64);
        let _ = writeln!(out, r#"<g class="gldim">"#);
        for row in &rows {
            let Some(r) = &row.result else { continue };
            let fill = match r.case {
                GldimCase::Uncertain => "#999999".to_string(),
                _ => heat(r.value),
            };
            let x = Surd::from(frame.x_rat(&row.s) - &cw / int(2));
            let y = Surd::from(frame.y_rat(&row.q) - &ch / int(2));
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{}" y="{}" width="{}" height="{}" fill="{fill}" data-value="{}"/>"#,
                num(&x),
                num(&y),
                num(&Surd::from(&cw)),
                num(&Surd::from(&ch)),
                stabplane::gldim::sig17(r.value),
            );
        }
        let _ = writeln!(out, "</g>");
    }

    // Δ_0, sampled at rational abscissae.
    let samples = 64;
    let step = (&s_range.1 - &s_range.0) / int(samples);
    let parabola: Vec<PlanePoint> = (0..=samples)
        .map(|i| {
            let s = &s_range.0 + &step * int(i);
            let q = &s * &s / int(2);
            PlanePoint::rational(s, q)
        })
        .collect();
    let refs: Vec<&PlanePoint> = parabola.iter().collect();
    let _ = writeln!(
        out,
        r##"<path class="parabola" d="{}" fill="none" stroke="#888888"/>"##,
        frame.path(&refs, false)
    );

    let _ = writeln!(out, r#"<g class="curve">"#);
    for pc in &approx.pieces {
        let f = &pc.five;
        let e = pc.owner.point();
        let _ = writeln!(
            out,
            r#"<polyline class="piece" data-owner="{}" points="{} {} {}" fill="none" stroke="black"/>"#,
            pc.owner,
            frame.xy(&f.el_curve),
            frame.xy(&f.e_plus),
            frame.xy(&f.er_curve)
        );
        let _ = writeln!(
            out,
            r#"<path class="segment" data-owner="{}" d="{}" stroke="black" stroke-dasharray="4 2"/>"#,
            pc.owner,
            frame.path(&[&e, &f.e_plus], false)
        );
    }
    let _ = writeln!(out, "</g>");

    if overlays.contains(&Overlay::Regions) {
        let poly = mz_polygons(triple);
        let f1 = five_points(&triple.e1);
        let f3 = five_points(&triple.e3);
        let core: Vec<&PlanePoint> = poly.core.iter().collect();
        let p1 = triple.e1.point();
        let p3 = triple.e3.point();
        let _ = writeln!(out, r#"<g class="regions">"#);
        let _ = writeln!(
            out,
            r##"<path class="core" d="{}" fill="#fdae61" fill-opacity="0.5" stroke="black"/>"##,
            frame.path(&core, true)
        );
        let _ = writeln!(
            out,
            r##"<path class="leg-left" d="{}" fill="#abd9e9" fill-opacity="0.5" stroke="black"/>"##,
            frame.path(&[&p3, &f3.e_l, &f3.e_plus], true)
        );
        let _ = writeln!(
            out,
            r##"<path class="leg-right" d="{}" fill="#abd9e9" fill-opacity="0.5" stroke="black"/>"##,
            frame.path(&[&p1, &f1.e_plus, &f1.e_r], true)
        );
        let _ = writeln!(out, "</g>");
    }

    if overlays.contains(&Overlay::Walls) {
        let f1 = five_points(&triple.e1);
        let f3 = five_points(&triple.e3);
        let _ = writeln!(out, r#"<g class="walls">"#);
        for (a, b) in [(triple.e3.point(), f3.e_l.clone()), (triple.e1.point(), f1.e_r.clone())] {
            let _ = writeln!(
                out,
                r#"<path class="wall" d="{}" stroke="red"/>"#,
                frame.path(&[&a, &b], false)
            );
        }
        for (sigma, v) in walls {
            let w = wall(sigma, v, &approx)?;
            let _ = writeln!(
                out,
                r#"<path class="wall" data-ch="{}" d="{}" stroke="red"/>"#,
                v,
                frame.path(&[&w.clipped.0, &w.clipped.1], false)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_drops_trailing_zeros() {
        assert_eq!(num(&Surd::from(rat(3, 2))), "1.5");
        assert_eq!(num(&Surd::from(rat(-1, 3))), "-0.333333333333");
        assert_eq!(num(&Surd::from(int(0))), "0");
    }
}
