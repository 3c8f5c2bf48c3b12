#include "cdad/box.hpp"

#include <algorithm>
#include <cmath>

namespace cdad {

Box Box::from_bounds(const Vector& lower, const Vector& upper)
{
    std::vector<Interval> axes(static_cast<std::size_t>(lower.size()));
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        axes[static_cast<std::size_t>(i)] = {lower(i), upper(i)};
    return Box(std::move(axes));
}

Vector Box::lower() const
{
    Vector out(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) out(static_cast<Eigen::Index>(i)) = axes_[i].lo;
    return out;
}

Vector Box::upper() const
{
    Vector out(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) out(static_cast<Eigen::Index>(i)) = axes_[i].hi;
    return out;
}

Vector Box::center() const { return 0.5 * (lower() + upper()); }

Vector Box::half_widths() const { return 0.5 * (upper() - lower()); }

bool Box::is_valid() const
{
    return std::all_of(axes_.begin(), axes_.end(), [](const Interval& iv) {
        return std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo <= iv.hi;
    });
}

bool Box::contains(const Vector& x) const
{
    if (static_cast<std::size_t>(x.size()) != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (!axes_[i].contains(x(static_cast<Eigen::Index>(i)))) return false;
    return true;
}

bool Box::contains(const Box& other) const
{
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (other[i].lo < axes_[i].lo || other[i].hi > axes_[i].hi) return false;
    return true;
}

double Box::volume() const
{
    double v = 1.0;
    for (const auto& iv : axes_) v *= iv.width();
    return v;
}

std::optional<Box> Box::intersect(const Box& other) const
{
    if (other.dim() != dim()) return std::nullopt;
    std::vector<Interval> out(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        out[i] = {std::max(axes_[i].lo, other[i].lo), std::min(axes_[i].hi, other[i].hi)};
        if (out[i].lo > out[i].hi) return std::nullopt;
    }
    return Box(std::move(out));
}

double box_max(const Vector& a, const Box& box)
{
    return a.dot(box.center()) + a.cwiseAbs().dot(box.half_widths());
}

double box_min(const Vector& a, const Box& box)
{
    return a.dot(box.center()) - a.cwiseAbs().dot(box.half_widths());
}

}  // namespace cdad
