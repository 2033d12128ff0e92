//! Parametric blended-wing-body hull.
//!
//! The half-span is laid out along `y` from the midplane:
//!
//! ```text
//! y = 0 ........ l1 ............ l1+l2 ............... l1+l2+lb
//!  t1   body      t2  root blend   t3     outer wing       tip | fin
//! ```
//!
//! Chord is `chord_root` across the body, tapers linearly to `chord_tip`
//! over the root blend and stays constant along the outer wing. Sections
//! are symmetric NACA 4-digit profiles of one thickness ratio. Outboard of
//! the body the leading edge is swept back by `alpha`. A vertical fin of
//! tip-chord section and height `wingtip_height` closes each tip, offset so
//! that it touches the wing end face without overlapping it.
//!
//! Volumes and areas cover both halves.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of the symmetric 4-digit thickness polynomial with the
/// closed trailing edge (last term −0.1036 instead of −0.1015).
const NACA_COEFFS: [f64; 5] = [0.2969, -0.1260, -0.3516, 0.2843, -0.1036];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionShape {
    #[default]
    Naca,
    /// Full-depth rectangle of height `thickness_ratio · chord`.
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WingParams {
    /// Sweep-back angle of the leading edge outboard of the body, degrees.
    pub alpha: f64,
    /// Body half-width (t1 to t2), m.
    pub l1: f64,
    /// Root blend length (t2 to t3), m.
    pub l2: f64,
    /// Outer wing length (t3 to tip), m.
    pub lb: f64,
    pub chord_root: f64,
    pub chord_tip: f64,
    pub thickness_ratio: f64,
    /// Height of each tip fin, m. Zero removes the fins.
    pub wingtip_height: f64,
    #[serde(default)]
    pub section: SectionShape,
}

impl WingParams {
    /// Reconstructed parameter set sized so the displaced volume matches the
    /// 3861.12 cm³ reported for the built glider. None of these lengths were
    /// published; only the thickness ratio (NACA 0010) is known.
    pub fn paper_like() -> Self {
        Self {
            alpha: 40.0,
            l1: 0.10,
            l2: 0.12,
            lb: 0.25,
            chord_root: PAPER_LIKE_CHORD_ROOT,
            chord_tip: 0.20,
            thickness_ratio: 0.10,
            wingtip_height: 0.08,
            section: SectionShape::Naca,
        }
    }

    pub fn half_span(&self) -> f64 {
        self.l1 + self.l2 + self.lb
    }

    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if !(self.alpha > 0.0 && self.alpha < 90.0) {
            return Err(("alpha", format!("must lie in (0, 90) degrees, got {}", self.alpha)));
        }
        for (name, v) in [
            ("l1", self.l1),
            ("l2", self.l2),
            ("lb", self.lb),
            ("chord_root", self.chord_root),
            ("chord_tip", self.chord_tip),
            ("thickness_ratio", self.thickness_ratio),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err((name, format!("must be positive, got {v}")));
            }
        }
        if !(self.wingtip_height.is_finite() && self.wingtip_height >= 0.0) {
            return Err(("wingtip_height", format!("must be non-negative, got {}", self.wingtip_height)));
        }
        if self.chord_tip > self.chord_root {
            return Err(("chord_tip", "must not exceed chord_root".into()));
        }
        Ok(())
    }

    /// Chord at spanwise position `y` (0 ≤ y ≤ half span).
    pub fn chord_at(&self, y: f64) -> f64 {
        if y <= self.l1 {
            self.chord_root
        } else if y <= self.l1 + self.l2 {
            let s = (y - self.l1) / self.l2;
            self.chord_root + s * (self.chord_tip - self.chord_root)
        } else {
            self.chord_tip
        }
    }

    /// Leading-edge x position at spanwise `y`.
    pub fn leading_edge_at(&self, y: f64) -> f64 {
        (y - self.l1).max(0.0) * self.alpha.to_radians().tan()
    }

    /// Half-thickness of the section (fraction of chord) at `x/c`.
    pub fn half_thickness(&self, xc: f64) -> f64 {
        match self.section {
            SectionShape::Naca => naca_profile(xc, self.thickness_ratio),
            SectionShape::Rectangular => 0.5 * self.thickness_ratio,
        }
    }

    /// Largest half-thickness of the section, as a fraction of chord.
    pub fn max_half_thickness(&self) -> f64 {
        match self.section {
            SectionShape::Naca => naca_max_half_thickness(self.thickness_ratio),
            SectionShape::Rectangular => 0.5 * self.thickness_ratio,
        }
    }

    /// Offset from the tip face to the fin's chord plane.
    pub fn fin_offset(&self) -> f64 {
        self.max_half_thickness() * self.chord_tip
    }
}

/// Chord-root value of [`WingParams::paper_like`], fitted so that the
/// displaced volume is 3861.12 cm³.
const PAPER_LIKE_CHORD_ROOT: f64 = 0.283_884_761_093_445_6;

#[inline]
fn naca_profile(xc: f64, thickness_ratio: f64) -> f64 {
    if xc >= 1.0 {
        // coefficients sum to zero; floating-point sum does not
        return 0.0;
    }
    let [a0, a1, a2, a3, a4] = NACA_COEFFS;
    5.0 * thickness_ratio * (a0 * xc.sqrt() + xc * (a1 + xc * (a2 + xc * (a3 + xc * a4))))
}

/// Half-thickness `y_t / c` of a symmetric NACA 4-digit section.
pub fn naca_half_thickness(x_over_c: f64, thickness_ratio: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x_over_c) {
        return Err(Error::domain("x/c", x_over_c));
    }
    Ok(naca_profile(x_over_c, thickness_ratio))
}

fn naca_max_half_thickness(thickness_ratio: f64) -> f64 {
    // golden-section search; the profile is unimodal on [0, 1]
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..100 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if naca_profile(c, thickness_ratio) > naca_profile(d, thickness_ratio) {
            b = d;
        } else {
            a = c;
        }
    }
    naca_profile(0.5 * (a + b), thickness_ratio)
}

/// Composite Simpson's rule with `intervals` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

const SPAN_STATIONS: usize = 200;
const CHORD_STATIONS: usize = 400;

/// Section area divided by chord², i.e. ∫₀¹ 2·y_t dξ.
///
/// Integrated in `s = √ξ` so the leading-edge square root becomes a
/// polynomial and Simpson's rule converges quickly.
pub fn section_area_coefficient(params: &WingParams) -> f64 {
    match params.section {
        SectionShape::Naca => simpson(
            |s| 2.0 * naca_profile(s * s, params.thickness_ratio) * 2.0 * s,
            0.0,
            1.0,
            CHORD_STATIONS,
        ),
        SectionShape::Rectangular => params.thickness_ratio,
    }
}

/// Displaced volume of the whole hull (both halves and both fins), m³.
pub fn displaced_volume(params: &WingParams) -> f64 {
    let k = section_area_coefficient(params);
    let area = |y: f64| {
        let c = params.chord_at(y);
        k * c * c
    };
    let y1 = params.l1;
    let y2 = y1 + params.l2;
    let y3 = y2 + params.lb;
    let half = simpson(area, 0.0, y1, SPAN_STATIONS)
        + simpson(area, y1, y2, SPAN_STATIONS)
        + simpson(area, y2, y3, SPAN_STATIONS);
    let fin = k * params.chord_tip * params.chord_tip * params.wingtip_height;
    2.0 * (half + fin)
}

/// Perimeter of the section divided by chord.
fn section_perimeter_coefficient(params: &WingParams) -> f64 {
    match params.section {
        SectionShape::Naca => {
            // arc length of upper + lower surface, in s = √ξ
            let dy = |s: f64| {
                let h = 1e-6;
                let lo = (s - h).max(0.0);
                let hi = (s + h).min(1.0);
                (naca_profile(hi * hi, params.thickness_ratio) - naca_profile(lo * lo, params.thickness_ratio))
                    / (hi - lo)
            };
            2.0 * simpson(|s| (4.0 * s * s + dy(s).powi(2)).sqrt(), 0.0, 1.0, CHORD_STATIONS)
        }
        SectionShape::Rectangular => 2.0 * (1.0 + params.thickness_ratio),
    }
}

/// Approximate wetted area (both halves), m². Spanwise surface slopes are
/// neglected, and end faces hidden by the fins are still counted.
pub fn wetted_area(params: &WingParams) -> f64 {
    let p = section_perimeter_coefficient(params);
    let k = section_area_coefficient(params);
    let y1 = params.l1;
    let y2 = y1 + params.l2;
    let y3 = y2 + params.lb;
    let skin = |y: f64| p * params.chord_at(y);
    let span = simpson(skin, 0.0, y1, SPAN_STATIONS)
        + simpson(skin, y1, y2, SPAN_STATIONS)
        + simpson(skin, y2, y3, SPAN_STATIONS);
    let tip_face = k * params.chord_tip * params.chord_tip;
    let fin = if params.wingtip_height > 0.0 {
        p * params.chord_tip * params.wingtip_height + 2.0 * tip_face
    } else {
        0.0
    };
    2.0 * (span + tip_face + fin)
}

type Vec3 = [f32; 3];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn normal(a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let (u, v) = (sub(b, a), sub(c, a));
    let n = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len > 0.0 {
        [n[0] / len, n[1] / len, n[2] / len]
    } else {
        [0.0; 3]
    }
}

/// Closed loop of section points (chord-normalised `(ξ, η)`), upper surface
/// from trailing to leading edge then lower surface back.
fn section_loop(params: &WingParams, points: usize) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = (0..=points)
        .map(|i| {
            let s = i as f64 / points as f64;
            // cosine spacing clusters points at both edges
            0.5 * (1.0 - (std::f64::consts::PI * s).cos())
        })
        .collect();
    let mut out = Vec::with_capacity(2 * points);
    for &x in xs.iter().rev() {
        out.push((x, params.half_thickness(x)));
    }
    for &x in xs.iter().skip(1).take(points - 1) {
        out.push((x, -params.half_thickness(x)));
    }
    out
}

/// Triangulated surface of the full hull in millimetres.
pub fn surface_triangles(params: &WingParams) -> Vec<[Vec3; 3]> {
    const SECTION_POINTS: usize = 40;
    const SPAN_SEGMENTS: usize = 12;
    let loop_pts = section_loop(params, SECTION_POINTS);
    let mm = 1000.0;
    let y1 = params.l1;
    let y2 = y1 + params.l2;
    let y3 = y2 + params.lb;
    let mut ys = Vec::new();
    for (a, b) in [(0.0, y1), (y1, y2), (y2, y3)] {
        for i in 0..SPAN_SEGMENTS {
            ys.push(a + (b - a) * i as f64 / SPAN_SEGMENTS as f64);
        }
    }
    ys.push(y3);

    let ring = |y: f64, side: f64| -> Vec<Vec3> {
        let c = params.chord_at(y);
        let le = params.leading_edge_at(y);
        loop_pts
            .iter()
            .map(|&(xi, eta)| [((le + xi * c) * mm) as f32, (side * y * mm) as f32, (eta * c * mm) as f32])
            .collect()
    };

    let mut tris = Vec::new();
    let n = loop_pts.len();
    for side in [1.0, -1.0] {
        let rings: Vec<Vec<Vec3>> = ys.iter().map(|&y| ring(y, side)).collect();
        for w in rings.windows(2) {
            for i in 0..n {
                let j = (i + 1) % n;
                let (a, b, c, d) = (w[0][i], w[0][j], w[1][j], w[1][i]);
                if side > 0.0 {
                    tris.push([a, b, c]);
                    tris.push([a, c, d]);
                } else {
                    tris.push([a, c, b]);
                    tris.push([a, d, c]);
                }
            }
        }
        let tip = rings.last().expect("at least one ring");
        cap(&mut tris, tip, side > 0.0);

        if params.wingtip_height > 0.0 {
            let c = params.chord_tip;
            let le = params.leading_edge_at(y3);
            let y_fin = y3 + params.fin_offset();
            let h = params.wingtip_height;
            let fin_ring = |z: f64| -> Vec<Vec3> {
                loop_pts
                    .iter()
                    .map(|&(xi, eta)| {
                        [
                            ((le + xi * c) * mm) as f32,
                            (side * (y_fin + eta * c) * mm) as f32,
                            (z * mm) as f32,
                        ]
                    })
                    .collect()
            };
            let bottom = fin_ring(-0.5 * h);
            let top = fin_ring(0.5 * h);
            for i in 0..n {
                let j = (i + 1) % n;
                let (a, b, cc, d) = (bottom[i], bottom[j], top[j], top[i]);
                if side > 0.0 {
                    tris.push([a, cc, b]);
                    tris.push([a, d, cc]);
                } else {
                    tris.push([a, b, cc]);
                    tris.push([a, cc, d]);
                }
            }
            cap(&mut tris, &top, side > 0.0);
            cap(&mut tris, &bottom, side < 0.0);
        }
    }
    tris
}

/// Fan-triangulates a closed ring around its centroid.
fn cap(tris: &mut Vec<[Vec3; 3]>, ring: &[Vec3], flip: bool) {
    let n = ring.len() as f32;
    let centre = ring.iter().fold([0.0f32; 3], |acc, p| {
        [acc[0] + p[0] / n, acc[1] + p[1] / n, acc[2] + p[2] / n]
    });
    for i in 0..ring.len() {
        let j = (i + 1) % ring.len();
        if flip {
            tris.push([centre, ring[i], ring[j]]);
        } else {
            tris.push([centre, ring[j], ring[i]]);
        }
    }
}

/// Writes the hull surface as binary STL (little-endian, millimetres).
pub fn write_stl<W: Write>(params: &WingParams, mut out: W) -> io::Result<()> {
    let tris = surface_triangles(params);
    let mut header = [0u8; 80];
    let label = b"glidesim blended-wing hull, units: mm";
    header[..label.len()].copy_from_slice(label);
    out.write_all(&header)?;
    out.write_all(&(tris.len() as u32).to_le_bytes())?;
    for [a, b, c] in tris {
        for v in [normal(a, b, c), a, b, c] {
            for comp in v {
                out.write_all(&comp.to_le_bytes())?;
            }
        }
        out.write_all(&0u16.to_le_bytes())?;
    }
    Ok(())
}
