//! RK4 flows of points under ambient fields, with optional transport of
//! tangent vectors (u̇ = DX·u) and of the flow Jacobian (J̇ = DX·J).
//!
//! Fields are evaluated pointwise, so nodes integrate independently.

use crate::fields::AmbientField;
use crate::vec2::{self, Mat2, Vec2};

fn steps_for(t: f64, dt: f64) -> (usize, f64) {
    assert!(dt > 0.0 && t >= 0.0);
    let n = (t / dt).round().max(1.0) as usize;
    (n, t / n as f64)
}

/// One RK4 step of ẋ = X(x).
pub fn rk4_step_point(p: Vec2, field: &dyn AmbientField, dt: f64) -> Vec2 {
    let k1 = field.value(p);
    let k2 = field.value(vec2::add(p, vec2::scale(k1, dt / 2.0)));
    let k3 = field.value(vec2::add(p, vec2::scale(k2, dt / 2.0)));
    let k4 = field.value(vec2::add(p, vec2::scale(k3, dt)));
    [
        p[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

pub fn flow_point(p: Vec2, field: &dyn AmbientField, t: f64, dt: f64) -> Vec2 {
    let (n, h) = steps_for(t, dt);
    let mut q = p;
    for _ in 0..n {
        q = rk4_step_point(q, field, h);
    }
    q
}

/// One RK4 step of the coupled system ẋ = X(x), u̇ = DX(x)·u.
pub fn rk4_step_point_vec(p: Vec2, u: Vec2, field: &dyn AmbientField, dt: f64) -> (Vec2, Vec2) {
    let f = |q: Vec2, v: Vec2| -> (Vec2, Vec2) {
        (field.value(q), vec2::mat_vec(field.jacobian(q), v))
    };
    let (k1p, k1u) = f(p, u);
    let (k2p, k2u) = f(
        vec2::add(p, vec2::scale(k1p, dt / 2.0)),
        vec2::add(u, vec2::scale(k1u, dt / 2.0)),
    );
    let (k3p, k3u) = f(
        vec2::add(p, vec2::scale(k2p, dt / 2.0)),
        vec2::add(u, vec2::scale(k2u, dt / 2.0)),
    );
    let (k4p, k4u) = f(
        vec2::add(p, vec2::scale(k3p, dt)),
        vec2::add(u, vec2::scale(k3u, dt)),
    );
    let comb = |a: Vec2, b: Vec2, c: Vec2, d: Vec2, x: Vec2| {
        [
            x[0] + dt / 6.0 * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0]),
            x[1] + dt / 6.0 * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1]),
        ]
    };
    (comb(k1p, k2p, k3p, k4p, p), comb(k1u, k2u, k3u, k4u, u))
}

/// Flow a point together with the flow Jacobian J(t) = Dη_t(p).
pub fn flow_point_with_jacobian(
    p: Vec2,
    field: &dyn AmbientField,
    t: f64,
    dt: f64,
) -> (Vec2, Mat2) {
    let (n, h) = steps_for(t, dt);
    let mut q = p;
    let mut jac: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    for _ in 0..n {
        // RK4 on the joint (q, J) system; J enters linearly.
        let f = |x: Vec2, j: Mat2| -> (Vec2, Mat2) {
            (field.value(x), vec2::mat_mul(field.jacobian(x), j))
        };
        let (k1p, k1j) = f(q, jac);
        let (k2p, k2j) = f(
            vec2::add(q, vec2::scale(k1p, h / 2.0)),
            vec2::mat_add(jac, vec2::mat_scale(k1j, h / 2.0)),
        );
        let (k3p, k3j) = f(
            vec2::add(q, vec2::scale(k2p, h / 2.0)),
            vec2::mat_add(jac, vec2::mat_scale(k2j, h / 2.0)),
        );
        let (k4p, k4j) = f(
            vec2::add(q, vec2::scale(k3p, h)),
            vec2::mat_add(jac, vec2::mat_scale(k3j, h)),
        );
        q = [
            q[0] + h / 6.0 * (k1p[0] + 2.0 * k2p[0] + 2.0 * k3p[0] + k4p[0]),
            q[1] + h / 6.0 * (k1p[1] + 2.0 * k2p[1] + 2.0 * k3p[1] + k4p[1]),
        ];
        let mut jn = jac;
        for r in 0..2 {
            for c in 0..2 {
                jn[r][c] += h / 6.0 * (k1j[r][c] + 2.0 * k2j[r][c] + 2.0 * k3j[r][c] + k4j[r][c]);
            }
        }
        jac = jn;
    }
    (q, jac)
}
