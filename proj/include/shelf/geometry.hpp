#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace shelf {

struct Vec3i {
  int x = 0;
  int y = 0;
  int z = 0;

  friend Vec3i operator+(const Vec3i& a, const Vec3i& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3i operator-(const Vec3i& a, const Vec3i& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend bool operator==(const Vec3i& a, const Vec3i& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
  friend bool operator!=(const Vec3i& a, const Vec3i& b) { return !(a == b); }
  friend bool operator<(const Vec3i& a, const Vec3i& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  }
};

struct Vec3d {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3d operator+(const Vec3d& a, const Vec3d& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3d operator-(const Vec3d& a, const Vec3d& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3d operator*(const Vec3d& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Vec3d operator*(double s, const Vec3d& a) { return a * s; }
  friend Vec3d operator/(const Vec3d& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend bool operator==(const Vec3d& a, const Vec3d& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

  double dot(const Vec3d& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3d cross(const Vec3d& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3d normalized() const {
    double n = norm();
    return n > 0.0 ? *this / n : Vec3d{0, 0, 0};
  }
};

inline double distance(const Vec3d& a, const Vec3d& b) { return (a - b).norm(); }

inline Vec3d to_vec3d(const Vec3i& v) { return {double(v.x), double(v.y), double(v.z)}; }

}  // namespace shelf

template <>
struct std::hash<shelf::Vec3i> {
  size_t operator()(const shelf::Vec3i& v) const {
    size_t h = std::hash<int>()(v.x);
    h = h * 1000003u ^ std::hash<int>()(v.y);
    h = h * 1000003u ^ std::hash<int>()(v.z);
    return h;
  }
};
