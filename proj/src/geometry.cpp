#include "gratres/geometry.hpp"

namespace gratres {

void GratingGeometry::validate() const {
    if (!(d > 0.0))
        throw ConfigError("geometry.d", "period d must be positive");
    if (ell < 0.0)
        throw ConfigError("geometry.ell", "slab thickness must be non-negative");
    if (has_slab()) {
        if (!(H > ell / 2.0))
            throw ConfigError("geometry.H", "truncation height must satisfy H > ell/2");
    } else if (!(H > 0.0)) {
        throw ConfigError("geometry.H", "truncation height must be positive");
    }
    if (has_slit()) {
        const double wt = slit.top_width;
        const double wb = slit.base_width;
        if (!(wt > 0.0 && wt < d) || !(wb > 0.0 && wb < d))
            throw ConfigError("geometry.slit", "slit widths must lie in (0, d)");
        if (slit.kind == SlitShape::Kind::Rectangle && wt != wb)
            throw ConfigError("geometry.slit", "rectangular slit must have equal widths");
    }
    if (metal_kind == MetalKind::PEC && !has_slab())
        throw ConfigError("geometry.metal", "PEC geometry requires a slab");
}

double GratingGeometry::slit_half_width_at(double x2) const {
    if (!has_slit()) return 0.0;
    // Linear interpolation between base (x2=-ell/2) and top (x2=+ell/2).
    const double t = (x2 + ell / 2.0) / ell;
    const double w = slit.base_width + t * (slit.top_width - slit.base_width);
    return w / 2.0;
}

bool GratingGeometry::in_metal(double x1, double x2) const {
    if (!has_slab()) return false;
    if (x2 <= -ell / 2.0 || x2 >= ell / 2.0) return false;
    if (!has_slit()) return true;
    return x1 < slit_wall_left(x2) || x1 > slit_wall_right(x2);
}

} // namespace gratres
