#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "autodiff.hpp"

namespace nric {

// Quaternion with components on (1, i, j, k). Templated on the scalar type so
// the same expressions run on doubles and on forward-mode jets.
template <typename T>
struct Quat {
    T w{}, x{}, y{}, z{};

    Quat() = default;
    Quat(T w_, T x_, T y_, T z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quat identity() { return Quat(T(1.0), T(0.0), T(0.0), T(0.0)); }

    Quat conjugate() const { return Quat(w, -x, -y, -z); }

    friend Quat operator*(const Quat& a, const Quat& b) {
        return Quat(a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                    a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                    a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                    a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w);
    }
};

using Quatd = Quat<double>;

inline Eigen::Vector3d vec(const Quatd& q) { return Eigen::Vector3d(q.x, q.y, q.z); }

inline double normSq(const Quatd& q) {
    return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}

// Conjugation p -> q p q^-1 for unit q acting on a 3-vector.
inline Eigen::Vector3d rotate(const Quatd& q, const Eigen::Vector3d& p) {
    Quatd pq(0.0, p.x(), p.y(), p.z());
    Quatd r = q * pq * q.conjugate();
    return vec(r);
}

// Rotation matrix of a unit quaternion.
inline Eigen::Matrix3d toMatrix(const Quatd& q) {
    Eigen::Matrix3d R;
    R << 1 - 2 * (q.y * q.y + q.z * q.z), 2 * (q.x * q.y - q.z * q.w), 2 * (q.x * q.z + q.y * q.w),
        2 * (q.x * q.y + q.z * q.w), 1 - 2 * (q.x * q.x + q.z * q.z), 2 * (q.y * q.z - q.x * q.w),
        2 * (q.x * q.z - q.y * q.w), 2 * (q.y * q.z + q.x * q.w), 1 - 2 * (q.x * q.x + q.y * q.y);
    return R;
}

// Rotation about the 0th basis axis by phi.
template <typename T>
Quat<T> quatAxis0(const T& phi) {
    return Quat<T>(cos(phi * 0.5), sin(phi * 0.5), T(0.0), T(0.0));
}

// Rotation about the 2nd basis axis by phi.
template <typename T>
Quat<T> quatAxis2(const T& phi) {
    return Quat<T>(cos(phi * 0.5), T(0.0), T(0.0), sin(phi * 0.5));
}

// Cosine of the interior angle opposite to c, from the law of cosines.
template <typename T>
T lawOfCosines(const T& a, const T& b, const T& c) {
    return (a * a + b * b - c * c) / (2.0 * a * b);
}

// Transition quaternion q0(theta) * q2(arccos Q(a,b,c)) in closed form.
// a, b are the fan edges adjacent to the center vertex, c the opposite edge.
// Requires the strict triangle inequality so that |Q| < 1.
template <typename T>
Quat<T> transitionQuat(const T& theta, const T& a, const T& b, const T& c) {
    T q = lawOfCosines(a, b, c);
    T sp = sqrt((1.0 + q) * 0.5);
    T sm = sqrt((1.0 - q) * 0.5);
    T ch = cos(theta * 0.5);
    T sh = sin(theta * 0.5);
    return Quat<T>(ch * sp, sh * sp, -(sh * sm), ch * sm);
}

// Transition quaternion with first and second derivatives in (theta, a, b, c).
using QuatJet = Quat<D2<4>>;

inline QuatJet transitionQuatJet(double theta, double a, double b, double c) {
    using J = D2<4>;
    return transitionQuat(J::variable(theta, 0), J::variable(a, 1), J::variable(b, 2),
                          J::variable(c, 3));
}

}  // namespace nric
