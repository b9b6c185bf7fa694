#pragma once

#include <optional>

#include "gratres/errors.hpp"

namespace gratres {

/// Cross-section of the slit in the reference period, centered at x1 = d/2
/// and spanning the full slab thickness.
struct SlitShape {
    enum class Kind { None, Rectangle, Trapezoid };

    Kind kind = Kind::None;
    double top_width = 0.0;  ///< width at the top slab face (x2 = +ell/2)
    double base_width = 0.0; ///< width at the bottom slab face (x2 = -ell/2)

    static SlitShape none() { return {}; }
    static SlitShape rectangle(double width) {
        return {Kind::Rectangle, width, width};
    }
    static SlitShape trapezoid(double top_width, double base_width) {
        return {Kind::Trapezoid, top_width, base_width};
    }
};

/// Periodic-cell geometry: one period [0,d] x [-H,H] of a metallic slab of
/// thickness ell with a slit, truncated at x2 = +-H where the DtN maps act.
struct GratingGeometry {
    enum class MetalKind { PEC, Dispersive };

    double d = 1.0;   ///< period
    double ell = 1.0; ///< slab thickness; 0 means no slab (vacuum cell)
    double H = 1.0;   ///< truncation half-height
    SlitShape slit;
    MetalKind metal_kind = MetalKind::Dispersive;

    /// Vacuum cell without any slab; handy for tests.
    static GratingGeometry vacuum_cell(double d, double H) {
        GratingGeometry g;
        g.d = d;
        g.ell = 0.0;
        g.H = H;
        g.slit = SlitShape::none();
        return g;
    }

    /// Throws ConfigError if the invariants are violated.
    void validate() const;

    bool has_slab() const { return ell > 0.0; }
    bool has_slit() const { return has_slab() && slit.kind != SlitShape::Kind::None; }

    /// Slit half-width at height x2 (linear in x2 for a trapezoid).
    /// Only meaningful for |x2| <= ell/2 with a slit present.
    double slit_half_width_at(double x2) const;

    /// Left and right slit wall abscissae at height x2.
    double slit_wall_left(double x2) const { return d / 2.0 - slit_half_width_at(x2); }
    double slit_wall_right(double x2) const { return d / 2.0 + slit_half_width_at(x2); }

    /// True iff (x1,x2) lies strictly inside the metal region Omega.
    bool in_metal(double x1, double x2) const;
};

} // namespace gratres
