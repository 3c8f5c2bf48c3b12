#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace cdad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return lo <= v && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Closed axis-aligned hyperrectangle. Invariants, guard slabs and interval
/// hulls all use this type.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> axes) : axes_(std::move(axes)) {}

    static Box from_bounds(const Vector& lower, const Vector& upper);

    std::size_t dim() const { return axes_.size(); }
    const Interval& operator[](std::size_t i) const { return axes_[i]; }
    Interval& operator[](std::size_t i) { return axes_[i]; }
    const std::vector<Interval>& axes() const { return axes_; }

    Vector lower() const;
    Vector upper() const;
    Vector center() const;
    Vector half_widths() const;

    /// Nonempty when lo <= hi on every axis; zero-width axes are allowed.
    bool is_valid() const;
    bool contains(const Vector& x) const;
    bool contains(const Box& other) const;
    double volume() const;

    /// Closed intersection, empty optional when the boxes are disjoint.
    std::optional<Box> intersect(const Box& other) const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<Interval> axes_;
};

/// max a.x over the box, in closed form: a.center + sum |a_i| * half_width_i.
double box_max(const Vector& a, const Box& box);
/// min a.x over the box.
double box_min(const Vector& a, const Box& box);

}  // namespace cdad
