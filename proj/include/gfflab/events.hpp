#pragma once

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gfflab/lattice.hpp"
#include "gfflab/levelset.hpp"

namespace gfflab {

namespace event {

/// Crossing of `rect` (whole box when absent).
struct Crossing {
    Direction direction = Direction::vertical;
    std::optional<Rect> rect;
};
struct Connected {
    Vertex x, y;
};
/// Origin joined to the ring just inside the frame of the centred sub-box
/// of side `side` (the whole box when 0).
struct OriginBoundary {
    int side = 0;
};
struct DualConnected {
    Vertex u, v;
};
struct DisjointCrossings {
    Direction direction = Direction::vertical;
    int at_least = 1;
    std::optional<Rect> rect;
};
/// Every listed site is open.
struct Sites {
    std::vector<Vertex> sites;
};
struct Always {};

}  // namespace event

using EventDescriptor = std::variant<event::Always, event::Crossing, event::Connected, event::OriginBoundary,
                                     event::DualConnected, event::DisjointCrossings, event::Sites>;

/// Increasing events: opening sites can only turn them from false to true.
inline bool is_increasing(const EventDescriptor& e) {
    return !std::holds_alternative<event::DualConnected>(e);
}

/// [lo, hi] coordinates of the sub-box of side `side` centred on the origin.
struct SubBox {
    int x_lo, x_hi, y_lo, y_hi;
};

inline SubBox centred_subbox(const BoxLattice& box, int side) {
    const Vertex o = box.origin();
    const int x_lo = o.x - (side - 1) / 2;
    const int y_lo = o.y - (side - 1) / 2;
    SubBox s{x_lo, x_lo + side - 1, y_lo, y_lo + side - 1};
    if (side < 3 || s.x_lo < 0 || s.y_lo < 0 || s.x_hi >= box.width() || s.y_hi >= box.height())
        throw std::out_of_range("sub-box of side " + std::to_string(side) + " does not fit the box");
    return s;
}

/// Bounding box of a vertex set.
struct Extent {
    int x_min, x_max, y_min, y_max;
};

/// A connected set containing the origin reaches the ring inside the
/// sub-box frame iff its extent touches or passes that ring.
inline bool reaches_ring(const SubBox& s, const Extent& e) {
    return e.x_min <= s.x_lo + 1 || e.x_max >= s.x_hi - 1 || e.y_min <= s.y_lo + 1 || e.y_max >= s.y_hi - 1;
}

inline std::vector<Vertex> ring_vertices(const SubBox& s) {
    std::vector<Vertex> out;
    for (int y = s.y_lo + 1; y <= s.y_hi - 1; ++y)
        for (int x = s.x_lo + 1; x <= s.x_hi - 1; ++x)
            if (x == s.x_lo + 1 || x == s.x_hi - 1 || y == s.y_lo + 1 || y == s.y_hi - 1) out.push_back({x, y});
    return out;
}

/// Extent of the open cluster of `seed`; nullopt when seed is closed.
inline std::optional<Extent> cluster_extent(const LevelSet& ls, Vertex seed) {
    const long label = ls.primal_label(seed);
    if (label < 0) return std::nullopt;
    Extent e{seed.x, seed.x, seed.y, seed.y};
    const BoxLattice& box = ls.box();
    for (int y = 0; y < box.height(); ++y)
        for (int x = 0; x < box.width(); ++x)
            if (ls.primal_label({x, y}) == label) {
                e.x_min = std::min(e.x_min, x);
                e.x_max = std::max(e.x_max, x);
                e.y_min = std::min(e.y_min, y);
                e.y_max = std::max(e.y_max, y);
            }
    return e;
}

inline void validate(const EventDescriptor& e, const BoxLattice& box) {
    auto need = [&](Vertex v) { detail::require_in_box(box, v); };
    std::visit(
        [&](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, event::Crossing>) {
                if (ev.rect) require_rect_in_box(box, *ev.rect);
            } else if constexpr (std::is_same_v<T, event::DisjointCrossings>) {
                if (ev.rect) require_rect_in_box(box, *ev.rect);
                if (ev.at_least < 0) throw std::invalid_argument("disjoint crossing threshold must be >= 0");
            } else if constexpr (std::is_same_v<T, event::Connected>) {
                need(ev.x);
                need(ev.y);
            } else if constexpr (std::is_same_v<T, event::DualConnected>) {
                need(ev.u);
                need(ev.v);
            } else if constexpr (std::is_same_v<T, event::OriginBoundary>) {
                centred_subbox(box, ev.side == 0 ? box.width() : ev.side);
                if (ev.side == 0 && !box.square()) throw std::invalid_argument("origin-boundary needs a square box");
            } else if constexpr (std::is_same_v<T, event::Sites>) {
                for (Vertex v : ev.sites) need(v);
            }
        },
        e);
}

/// True when the event's rectangle has zero area (it then never occurs).
inline bool degenerate_geometry(const EventDescriptor& e, const BoxLattice& box) {
    if (const auto* c = std::get_if<event::Crossing>(&e)) return c->rect.value_or(box.bounds()).degenerate();
    if (const auto* d = std::get_if<event::DisjointCrossings>(&e)) return d->rect.value_or(box.bounds()).degenerate();
    return false;
}

inline bool evaluate(const EventDescriptor& e, const LevelSet& ls) {
    const BoxLattice& box = ls.box();
    return std::visit(
        [&](const auto& ev) -> bool {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, event::Always>) {
                return true;
            } else if constexpr (std::is_same_v<T, event::Crossing>) {
                return crossing(ls, ev.rect.value_or(box.bounds()), ev.direction);
            } else if constexpr (std::is_same_v<T, event::Connected>) {
                return connected(ls, ev.x, ev.y);
            } else if constexpr (std::is_same_v<T, event::OriginBoundary>) {
                const auto ext = cluster_extent(ls, box.origin());
                return ext && reaches_ring(centred_subbox(box, ev.side == 0 ? box.width() : ev.side), *ext);
            } else if constexpr (std::is_same_v<T, event::DualConnected>) {
                return dual_connected(ls, ev.u, ev.v);
            } else if constexpr (std::is_same_v<T, event::DisjointCrossings>) {
                if (ev.at_least == 0) return true;
                return count_disjoint_crossings(ls, ev.rect.value_or(box.bounds()), ev.direction) >= ev.at_least;
            } else {
                return std::all_of(ev.sites.begin(), ev.sites.end(), [&](Vertex v) { return ls.is_open(v); });
            }
        },
        e);
}

// ---------------------------------------------------------------------------
// Text form, used on the command line and in output records:
//   always
//   crossing:<dir>[@x0,x1,y0,y1]
//   disjoint:<dir>:<t>[@x0,x1,y0,y1]
//   connected:x,y:x,y      dual:x,y:x,y
//   origin-boundary[:side]
//   site:x,y               sites:x,y;x,y;...

namespace detail {

inline int parse_int(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("event: expected an integer, got '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline Vertex parse_vertex(std::string_view s) {
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw std::invalid_argument("event: vertex must be x,y");
    return {parse_int(parts[0]), parse_int(parts[1])};
}

inline Rect parse_rect(std::string_view s) {
    const auto p = split(s, ',');
    if (p.size() != 4) throw std::invalid_argument("event: rectangle must be x0,x1,y0,y1");
    Rect r{parse_int(p[0]), parse_int(p[1]), parse_int(p[2]), parse_int(p[3])};
    if (r.x0 > r.x1 || r.y0 > r.y1) throw std::invalid_argument("event: rectangle corners out of order");
    return r;
}

inline std::string format_vertex(Vertex v) { return std::to_string(v.x) + "," + std::to_string(v.y); }
inline std::string format_rect(const Rect& r) {
    return std::to_string(r.x0) + "," + std::to_string(r.x1) + "," + std::to_string(r.y0) + "," +
           std::to_string(r.y1);
}

}  // namespace detail

inline EventDescriptor parse_event(std::string_view text) {
    using detail::split;
    std::optional<Rect> rect;
    if (const auto at = text.find('@'); at != std::string_view::npos) {
        rect = detail::parse_rect(text.substr(at + 1));
        text = text.substr(0, at);
    }
    const auto parts = split(text, ':');
    const std::string_view kind = parts[0];
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (parts.size() < lo || parts.size() > hi)
            throw std::invalid_argument("event '" + std::string(text) + "': wrong number of fields");
    };
    auto no_rect = [&] {
        if (rect) throw std::invalid_argument("event '" + std::string(kind) + "' takes no rectangle");
    };
    if (kind == "always") {
        arity(1, 1);
        no_rect();
        return event::Always{};
    }
    if (kind == "crossing") {
        arity(2, 2);
        return event::Crossing{parse_direction(std::string(parts[1])), rect};
    }
    if (kind == "disjoint") {
        arity(3, 3);
        return event::DisjointCrossings{parse_direction(std::string(parts[1])), detail::parse_int(parts[2]), rect};
    }
    if (kind == "connected" || kind == "dual") {
        arity(3, 3);
        no_rect();
        const Vertex a = detail::parse_vertex(parts[1]);
        const Vertex b = detail::parse_vertex(parts[2]);
        if (kind == "connected") return event::Connected{a, b};
        return event::DualConnected{a, b};
    }
    if (kind == "origin-boundary") {
        arity(1, 2);
        no_rect();
        return event::OriginBoundary{parts.size() == 2 ? detail::parse_int(parts[1]) : 0};
    }
    if (kind == "site" || kind == "sites") {
        arity(2, 2);
        no_rect();
        event::Sites s;
        for (auto v : split(parts[1], ';')) s.sites.push_back(detail::parse_vertex(v));
        if (kind == "site" && s.sites.size() != 1) throw std::invalid_argument("event 'site' takes one vertex");
        return s;
    }
    throw std::invalid_argument("unknown event kind '" + std::string(kind) + "'");
}

inline std::string format_event(const EventDescriptor& e) {
    return std::visit(
        [](const auto& ev) -> std::string {
            using T = std::decay_t<decltype(ev)>;
            auto with_rect = [](std::string s, const std::optional<Rect>& r) {
                return r ? s + "@" + detail::format_rect(*r) : s;
            };
            if constexpr (std::is_same_v<T, event::Always>) {
                return "always";
            } else if constexpr (std::is_same_v<T, event::Crossing>) {
                return with_rect(std::string("crossing:") + to_string(ev.direction), ev.rect);
            } else if constexpr (std::is_same_v<T, event::DisjointCrossings>) {
                return with_rect(std::string("disjoint:") + to_string(ev.direction) + ":" +
                                     std::to_string(ev.at_least),
                                 ev.rect);
            } else if constexpr (std::is_same_v<T, event::Connected>) {
                return "connected:" + detail::format_vertex(ev.x) + ":" + detail::format_vertex(ev.y);
            } else if constexpr (std::is_same_v<T, event::DualConnected>) {
                return "dual:" + detail::format_vertex(ev.u) + ":" + detail::format_vertex(ev.v);
            } else if constexpr (std::is_same_v<T, event::OriginBoundary>) {
                return ev.side == 0 ? std::string("origin-boundary")
                                    : "origin-boundary:" + std::to_string(ev.side);
            } else {
                std::string s = ev.sites.size() == 1 ? "site:" : "sites:";
                for (std::size_t i = 0; i < ev.sites.size(); ++i)
                    s += (i ? ";" : "") + detail::format_vertex(ev.sites[i]);
                return s;
            }
        },
        e);
}

}  // namespace gfflab
