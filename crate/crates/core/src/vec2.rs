//! Small helpers for points, vectors and covectors in the plane,
//! all represented as `[f64; 2]`.

pub type Vec2 = [f64; 2];

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(a: Vec2, t: f64) -> Vec2 {
    [a[0] * t, a[1] * t]
}

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Scalar cross product a ∧ b = a_x b_y − a_y b_x.
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// Counterclockwise rotation by 90°: (x, y) ↦ (−y, x).
///
/// For the area form μ = dx∧dy this realizes the interior product,
/// i_v μ = ⟨rot90(v), ·⟩.
#[inline]
pub fn rot90(a: Vec2) -> Vec2 {
    [-a[1], a[0]]
}

#[inline]
pub fn dist(a: Vec2, b: Vec2) -> f64 {
    norm(sub(a, b))
}

pub type Mat2 = [[f64; 2]; 2];

#[inline]
pub fn mat_vec(m: Mat2, v: Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

#[inline]
pub fn mat_transpose_vec(m: Mat2, v: Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[1][0] * v[1],
        m[0][1] * v[0] + m[1][1] * v[1],
    ]
}

#[inline]
pub fn mat_mul(a: Mat2, b: Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

#[inline]
pub fn mat_add(a: Mat2, b: Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

#[inline]
pub fn mat_scale(a: Mat2, t: f64) -> Mat2 {
    [[a[0][0] * t, a[0][1] * t], [a[1][0] * t, a[1][1] * t]]
}

/// Solve Mᵀ x = v, i.e. x = (Mᵀ)⁻¹ v (cotangent transport).
#[inline]
pub fn mat_transpose_solve(m: Mat2, v: Vec2) -> Vec2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // (Mᵀ)⁻¹ = (M⁻¹)ᵀ; M⁻¹ = 1/det [[m11, −m01], [−m10, m00]]
    [
        (m[1][1] * v[0] - m[1][0] * v[1]) / det,
        (-m[0][1] * v[0] + m[0][0] * v[1]) / det,
    ]
}

/// Distance from point `p` to the segment `[a, b]`.
pub fn point_segment_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, add(a, scale(ab, t)))
}
