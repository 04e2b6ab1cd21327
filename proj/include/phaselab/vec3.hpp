#ifndef PHASELAB_VEC3_HPP
#define PHASELAB_VEC3_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace phaselab {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Rotate v about unit axis by angle (Rodrigues).
inline Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c));
}

/// Point on S^2. Construction enforces |v| = 1 within 1e-12.
class UnitVector {
public:
    explicit UnitVector(const Vec3& v) : v_(v) {
        if (std::abs(v.dot(v) - 1.0) > 1e-12)
            throw std::invalid_argument("UnitVector: |v|^2 deviates from 1 by more than 1e-12");
    }
    UnitVector(double x, double y, double z) : UnitVector(Vec3{x, y, z}) {}

    static UnitVector from_angles(double theta, double phi) {
        const double st = std::sin(theta);
        return UnitVector(Vec3{st * std::cos(phi), st * std::sin(phi), std::cos(theta)});
    }
    /// z = cos(theta) parameterization; avoids the trig round trip.
    static UnitVector from_z_phi(double z, double phi) {
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        return UnitVector(Vec3{s * std::cos(phi), s * std::sin(phi), z});
    }

    const Vec3& vec() const { return v_; }
    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }

    double polar() const { return std::acos(std::clamp(v_.z, -1.0, 1.0)); }
    /// Azimuth in [0, 2pi); defined as 0 at the poles.
    double azimuth() const {
        if (std::abs(v_.z) >= 1.0 - 1e-15) return 0.0;
        double phi = std::atan2(v_.y, v_.x);
        if (phi < 0.0) phi += 2.0 * M_PI;
        return phi;
    }

    UnitVector antipode() const { return UnitVector(-v_); }
    double dot(const UnitVector& o) const { return v_.dot(o.v_); }

private:
    Vec3 v_;
};

/// Point on S^{2 (x) N}: one unit vector per particle.
using DirectionTuple = std::vector<UnitVector>;

inline double angle_between(const Vec3& a, const Vec3& b) {
    // atan2 form is accurate for both tiny and near-pi angles
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline double angle_between(const UnitVector& a, const UnitVector& b) {
    return angle_between(a.vec(), b.vec());
}

}  // namespace phaselab

#endif
