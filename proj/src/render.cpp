#include "crowdsim/render.hpp"

#include <cstdio>
#include <string>

namespace crowdsim {

namespace {

void append(std::string& out, const char* fmt, auto... args) {
    char buf[256];
    const int n = std::snprintf(buf, sizeof buf, fmt, args...);
    out.append(buf, static_cast<std::size_t>(n));
}

const char* cell_fill(RawCell c) {
    switch (c) {
        case RawCell::Wall: return "#404040";
        case RawCell::Painting: return "#8c6d31";
        case RawCell::Door: return "#fdd49e";
        case RawCell::ExitDoor: return "#74c476";
        case RawCell::Free: break;
    }
    return nullptr;
}

}  // namespace

std::string render_frame(const World& world, std::span<const Agent> agents, std::int64_t tick) {
    const GridMap& map = world.map();
    const double cs = map.cell_size;
    std::string out;
    out.reserve(4096 + map.cells.size() * 64 + agents.size() * 160);
    append(out,
           "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.3f %.3f\" width=\"%d\" height=\"%d\">\n",
           map.extent_x(), map.extent_y(), static_cast<int>(map.extent_x() * 40.0),
           static_cast<int>(map.extent_y() * 40.0));
    append(out, "<title>tick %lld</title>\n", static_cast<long long>(tick));
    append(out, "<rect class=\"floor\" x=\"0\" y=\"0\" width=\"%.3f\" height=\"%.3f\" fill=\"#f7f7f7\"/>\n",
           map.extent_x(), map.extent_y());

    out += "<g class=\"cells\" stroke=\"none\">\n";
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const RawCell c = map.at(x, y);
            const char* fill = cell_fill(c);
            if (!fill) continue;
            const char* cls = c == RawCell::Wall ? "wall" : c == RawCell::Painting ? "painting"
                              : c == RawCell::Door ? "door" : "exit";
            append(out, "<rect class=\"%s\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"%s\"/>\n", cls,
                   x * cs, y * cs, cs, cs, fill);
        }
    }
    out += "</g>\n<g class=\"attractors\">\n";
    const double h = 0.2 * cs;
    for (const Attractor& a : world.attractors) {
        const Vec2 p = a.position;
        append(out,
               "<polygon class=\"%s\" points=\"%.3f,%.3f %.3f,%.3f %.3f,%.3f %.3f,%.3f\" fill=\"%s\"/>\n",
               a.kind == AttractorKind::DoorPoint ? "door-point" : "painting-point", p.x, p.y - h, p.x + h, p.y,
               p.x, p.y + h, p.x - h, p.y, a.is_exit ? "#238b45" : "#9e9ac8");
    }
    out += "</g>\n<g class=\"agents\">\n";
    for (const Agent& a : agents) {
        if (!a.live()) continue;
        const double r = a.traits.personal_space_radius;
        const bool panic = a.psych.situation == Situation::Panic;
        append(out, "<circle class=\"%s\" cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"%s\" fill-opacity=\"0.6\"/>\n",
               panic ? "panic" : "calm", a.pos.x, a.pos.y, r, panic ? kPanicColor : kCalmColor);
        const Vec2 tip = a.pos + a.heading * r;
        append(out, "<line class=\"heading\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"#000\" "
                    "stroke-width=\"%.3f\"/>\n",
               a.pos.x, a.pos.y, tip.x, tip.y, 0.1 * cs);
    }
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace crowdsim
