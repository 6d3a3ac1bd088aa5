#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace nric {

// Second-order forward-mode scalar with N independent variables.
// Tracks value, gradient, and (symmetric) Hessian through arithmetic
// so that small closed-form expressions yield exact derivatives.
template <int N>
struct D2 {
    using Vec = Eigen::Matrix<double, N, 1>;
    using Mat = Eigen::Matrix<double, N, N>;

    double v = 0.0;
    Vec g = Vec::Zero();
    Mat h = Mat::Zero();

    D2() = default;
    D2(double value) : v(value) {}

    static D2 variable(double value, int index) {
        D2 r(value);
        r.g[index] = 1.0;
        return r;
    }

    D2 operator-() const {
        D2 r;
        r.v = -v;
        r.g = -g;
        r.h = -h;
        return r;
    }

    D2& operator+=(const D2& o) {
        v += o.v;
        g += o.g;
        h += o.h;
        return *this;
    }
    D2& operator-=(const D2& o) {
        v -= o.v;
        g -= o.g;
        h -= o.h;
        return *this;
    }

    friend D2 operator+(const D2& a, const D2& b) {
        D2 r = a;
        r += b;
        return r;
    }
    friend D2 operator-(const D2& a, const D2& b) {
        D2 r = a;
        r -= b;
        return r;
    }
    friend D2 operator*(const D2& a, const D2& b) {
        D2 r;
        r.v = a.v * b.v;
        r.g = a.v * b.g + b.v * a.g;
        r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
        return r;
    }
    friend D2 operator/(const D2& a, const D2& b) { return a * inverse(b); }

    friend D2 operator+(const D2& a, double s) { return a + D2(s); }
    friend D2 operator+(double s, const D2& a) { return D2(s) + a; }
    friend D2 operator-(const D2& a, double s) { return a - D2(s); }
    friend D2 operator-(double s, const D2& a) { return D2(s) - a; }
    friend D2 operator*(const D2& a, double s) {
        D2 r;
        r.v = a.v * s;
        r.g = a.g * s;
        r.h = a.h * s;
        return r;
    }
    friend D2 operator*(double s, const D2& a) { return a * s; }
    friend D2 operator/(const D2& a, double s) { return a * (1.0 / s); }
    friend D2 operator/(double s, const D2& a) { return inverse(a) * s; }

    // Chain rule for a scalar function f with derivatives f', f''.
    static D2 compose(const D2& x, double f, double df, double ddf) {
        D2 r;
        r.v = f;
        r.g = df * x.g;
        r.h = df * x.h + ddf * x.g * x.g.transpose();
        return r;
    }

    friend D2 inverse(const D2& x) {
        double iv = 1.0 / x.v;
        return compose(x, iv, -iv * iv, 2.0 * iv * iv * iv);
    }
    friend D2 sqrt(const D2& x) {
        double s = std::sqrt(x.v);
        return compose(x, s, 0.5 / s, -0.25 / (s * x.v));
    }
    friend D2 log(const D2& x) {
        return compose(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
    }
    friend D2 sin(const D2& x) {
        double s = std::sin(x.v), c = std::cos(x.v);
        return compose(x, s, c, -s);
    }
    friend D2 cos(const D2& x) {
        double s = std::sin(x.v), c = std::cos(x.v);
        return compose(x, c, -s, -c);
    }
    friend D2 sqr(const D2& x) { return x * x; }
};

inline double sqr(double x) { return x * x; }

// First-order forward-mode scalar with N independent variables.
template <int N>
struct D1 {
    using Vec = Eigen::Matrix<double, N, 1>;

    double v = 0.0;
    Vec g = Vec::Zero();

    D1() = default;
    D1(double value) : v(value) {}

    static D1 variable(double value, int index) {
        D1 r(value);
        r.g[index] = 1.0;
        return r;
    }

    D1 operator-() const {
        D1 r;
        r.v = -v;
        r.g = -g;
        return r;
    }
    D1& operator+=(const D1& o) {
        v += o.v;
        g += o.g;
        return *this;
    }
    D1& operator-=(const D1& o) {
        v -= o.v;
        g -= o.g;
        return *this;
    }
    friend D1 operator+(const D1& a, const D1& b) {
        D1 r = a;
        r += b;
        return r;
    }
    friend D1 operator-(const D1& a, const D1& b) {
        D1 r = a;
        r -= b;
        return r;
    }
    friend D1 operator*(const D1& a, const D1& b) {
        D1 r;
        r.v = a.v * b.v;
        r.g = a.v * b.g + b.v * a.g;
        return r;
    }
    friend D1 operator/(const D1& a, const D1& b) {
        D1 r;
        r.v = a.v / b.v;
        r.g = (a.g - r.v * b.g) / b.v;
        return r;
    }
    friend D1 operator*(const D1& a, double s) {
        D1 r;
        r.v = a.v * s;
        r.g = a.g * s;
        return r;
    }
    friend D1 operator*(double s, const D1& a) { return a * s; }
    friend D1 operator+(const D1& a, double s) {
        D1 r = a;
        r.v += s;
        return r;
    }
    friend D1 operator-(const D1& a, double s) {
        D1 r = a;
        r.v -= s;
        return r;
    }
    friend D1 operator/(const D1& a, double s) { return a * (1.0 / s); }

    friend D1 sqrt(const D1& x) {
        D1 r;
        r.v = std::sqrt(x.v);
        r.g = x.g / (2.0 * r.v);
        return r;
    }
    friend D1 atan2(const D1& y, const D1& x) {
        D1 r;
        r.v = std::atan2(y.v, x.v);
        double d = x.v * x.v + y.v * y.v;
        r.g = (x.v * y.g - y.v * x.g) / d;
        return r;
    }
};

}  // namespace nric
