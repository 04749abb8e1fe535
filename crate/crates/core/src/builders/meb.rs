//! Minimal enclosing balls in R^2 and R^3 (2D input is embedded with z = 0).
//!
//! Move-to-front Welzl recursion over support sets of at most four points.
//! Circumspheres of degenerate supports (collinear triples, coplanar
//! quadruples) fall back to the best enclosing ball of a sub-support.

pub type P3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: P3,
    pub radius: f64,
}

const REL_EPS: f64 = 1e-12;

fn sub(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &P3, b: &P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &P3, b: &P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dist(a: &P3, b: &P3) -> f64 {
    let d = sub(a, b);
    dot(&d, &d).sqrt()
}

impl Ball {
    fn empty() -> Self {
        Ball {
            center: [0.0; 3],
            radius: -1.0,
        }
    }

    pub fn contains(&self, p: &P3) -> bool {
        if self.radius < 0.0 {
            return false;
        }
        dist(&self.center, p) <= self.radius * (1.0 + REL_EPS) + REL_EPS
    }

    fn through_two(a: &P3, b: &P3) -> Self {
        Ball {
            center: [
                0.5 * (a[0] + b[0]),
                0.5 * (a[1] + b[1]),
                0.5 * (a[2] + b[2]),
            ],
            radius: 0.5 * dist(a, b),
        }
    }

    /// Circumscribed ball of a triangle; `None` when collinear.
    fn through_three(a: &P3, b: &P3, c: &P3) -> Option<Self> {
        let ab = sub(b, a);
        let ac = sub(c, a);
        let n = cross(&ab, &ac);
        let n2 = dot(&n, &n);
        let scale = dot(&ab, &ab).max(dot(&ac, &ac));
        if n2 <= 1e-24 * scale * scale || n2 == 0.0 {
            return None;
        }
        let t1 = cross(&n, &ab);
        let t2 = cross(&ac, &n);
        let (lac, lab) = (dot(&ac, &ac), dot(&ab, &ab));
        let off = [
            (lac * t1[0] + lab * t2[0]) / (2.0 * n2),
            (lac * t1[1] + lab * t2[1]) / (2.0 * n2),
            (lac * t1[2] + lab * t2[2]) / (2.0 * n2),
        ];
        let center = [a[0] + off[0], a[1] + off[1], a[2] + off[2]];
        let radius = dist(&center, a).max(dist(&center, b)).max(dist(&center, c));
        Some(Ball { center, radius })
    }

    /// Circumscribed sphere of a tetrahedron; `None` when coplanar.
    fn through_four(a: &P3, b: &P3, c: &P3, d: &P3) -> Option<Self> {
        let u = sub(b, a);
        let v = sub(c, a);
        let w = sub(d, a);
        let det = dot(&u, &cross(&v, &w));
        let scale = dot(&u, &u).max(dot(&v, &v)).max(dot(&w, &w));
        if det.abs() <= 1e-12 * scale.powf(1.5) || det == 0.0 {
            return None;
        }
        // Solve 2 [u; v; w] x = [|u|², |v|², |w|²] by Cramer's rule.
        let (lu, lv, lw) = (dot(&u, &u), dot(&v, &v), dot(&w, &w));
        let vw = cross(&v, &w);
        let wu = cross(&w, &u);
        let uv = cross(&u, &v);
        let off = [
            (lu * vw[0] + lv * wu[0] + lw * uv[0]) / (2.0 * det),
            (lu * vw[1] + lv * wu[1] + lw * uv[1]) / (2.0 * det),
            (lu * vw[2] + lv * wu[2] + lw * uv[2]) / (2.0 * det),
        ];
        let center = [a[0] + off[0], a[1] + off[1], a[2] + off[2]];
        let radius = [a, b, c, d]
            .iter()
            .map(|p| dist(&center, p))
            .fold(0.0, f64::max);
        Some(Ball { center, radius })
    }
}

/// Smallest ball among the balls of proper sub-supports that encloses all
/// of `pts`. Used only for degenerate supports.
fn best_sub_support(pts: &[P3]) -> Ball {
    let n = pts.len();
    let mut best: Option<Ball> = None;
    let mut consider = |b: Ball| {
        if pts.iter().all(|p| b.contains(p)) && best.is_none_or(|cur| b.radius < cur.radius) {
            best = Some(b);
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            consider(Ball::through_two(&pts[i], &pts[j]));
            for k in j + 1..n {
                if n > 3 {
                    if let Some(b) = Ball::through_three(&pts[i], &pts[j], &pts[k]) {
                        consider(b);
                    }
                }
            }
        }
    }
    best.unwrap_or_else(|| {
        // Every candidate failed the containment test only through rounding;
        // take the farthest pair.
        let mut far = Ball::through_two(&pts[0], &pts[0]);
        for i in 0..n {
            for j in i + 1..n {
                let b = Ball::through_two(&pts[i], &pts[j]);
                if b.radius > far.radius {
                    far = b;
                }
            }
        }
        far
    })
}

fn ball_from_support(support: &[P3]) -> Ball {
    match support {
        [] => Ball::empty(),
        [a] => Ball {
            center: *a,
            radius: 0.0,
        },
        [a, b] => Ball::through_two(a, b),
        [a, b, c] => Ball::through_three(a, b, c).unwrap_or_else(|| best_sub_support(support)),
        [a, b, c, d] => {
            Ball::through_four(a, b, c, d).unwrap_or_else(|| best_sub_support(support))
        }
        _ => unreachable!("support sets never exceed four points"),
    }
}

fn move_to_front(pts: &mut [P3], n: usize, support: &mut Vec<P3>) -> Ball {
    let mut ball = ball_from_support(support);
    if support.len() == 4 {
        return ball;
    }
    for i in 0..n {
        if !ball.contains(&pts[i]) {
            support.push(pts[i]);
            ball = move_to_front(pts, i, support);
            support.pop();
            pts[..=i].rotate_right(1);
        }
    }
    ball
}

/// Minimal enclosing ball of a non-empty point set.
pub fn minimal_enclosing_ball(points: &[P3]) -> Ball {
    assert!(!points.is_empty(), "minimal enclosing ball of nothing");
    let mut pts = points.to_vec();
    let n = pts.len();
    let mut support = Vec::with_capacity(4);
    move_to_front(&mut pts, n, &mut support)
}
