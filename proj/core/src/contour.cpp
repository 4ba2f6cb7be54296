#include "roa/contour.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <unordered_map>

namespace roa {

namespace {

// Grid-edge key: horizontal (type 0) edge from node (i,j) to (i+1,j),
// vertical (type 1) edge from (i,j) to (i,j+1).
std::int64_t edge_key(int i, int j, int type, int res) {
    return (static_cast<std::int64_t>(j) * (res + 2) + i) * 2 + type;
}

struct Segment {
    std::int64_t a, b;
};

}  // namespace

std::vector<ContourSet> extract_contours(const Field2d& f, const Box& domain,
                                         const std::vector<double>& levels,
                                         int resolution) {
    if (domain.size() != 2) throw DimensionError(domain.size());
    if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
    const int res = resolution;
    const double x0 = domain[0].lo, y0 = domain[1].lo;
    const double dx = domain[0].width() / res, dy = domain[1].width() / res;

    std::vector<double> grid(static_cast<std::size_t>(res + 1) * (res + 1));
    auto gv = [&](int i, int j) -> double& {
        return grid[static_cast<std::size_t>(j) * (res + 1) + i];
    };
    for (int j = 0; j <= res; ++j)
        for (int i = 0; i <= res; ++i) gv(i, j) = f(x0 + i * dx, y0 + j * dy);

    std::vector<ContourSet> out;
    for (double level : levels) {
        ContourSet set;
        set.level = level;
        std::vector<Segment> segs;
        std::unordered_map<std::int64_t, std::array<double, 2>> pts;

        auto cross = [&](int ia, int ja, int ib, int jb, int ei, int ej, int type) {
            double va = gv(ia, ja) - level, vb = gv(ib, jb) - level;
            double t = va / (va - vb);
            t = std::clamp(t, 0.0, 1.0);
            double px = x0 + (ia + t * (ib - ia)) * dx;
            double py = y0 + (ja + t * (jb - ja)) * dy;
            std::int64_t k = edge_key(ei, ej, type, res);
            pts[k] = {px, py};
            return k;
        };

        for (int j = 0; j < res; ++j) {
            for (int i = 0; i < res; ++i) {
                bool b0 = gv(i, j) < level, b1 = gv(i + 1, j) < level;
                bool b2 = gv(i + 1, j + 1) < level, b3 = gv(i, j + 1) < level;
                int code = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
                if (code == 0 || code == 15) continue;
                auto e0 = [&] { return cross(i, j, i + 1, j, i, j, 0); };
                auto e1 = [&] { return cross(i + 1, j, i + 1, j + 1, i + 1, j, 1); };
                auto e2 = [&] { return cross(i, j + 1, i + 1, j + 1, i, j + 1, 0); };
                auto e3 = [&] { return cross(i, j, i, j + 1, i, j, 1); };
                switch (code) {
                    case 1: case 14: segs.push_back({e3(), e0()}); break;
                    case 2: case 13: segs.push_back({e0(), e1()}); break;
                    case 3: case 12: segs.push_back({e3(), e1()}); break;
                    case 4: case 11: segs.push_back({e1(), e2()}); break;
                    case 6: case 9:  segs.push_back({e0(), e2()}); break;
                    case 7: case 8:  segs.push_back({e2(), e3()}); break;
                    case 5: case 10: {
                        double center = f(x0 + (i + 0.5) * dx, y0 + (j + 0.5) * dy);
                        bool cin = center < level;
                        bool diag02 = code == 5;  // inside corners on the 0-2 diagonal
                        if (cin == diag02) {
                            segs.push_back({e0(), e1()});
                            segs.push_back({e2(), e3()});
                        } else {
                            segs.push_back({e3(), e0()});
                            segs.push_back({e1(), e2()});
                        }
                        break;
                    }
                }
            }
        }

        // stitch segments into chains by shared grid edges
        std::unordered_map<std::int64_t, std::vector<std::size_t>> at;
        for (std::size_t s = 0; s < segs.size(); ++s) {
            at[segs[s].a].push_back(s);
            at[segs[s].b].push_back(s);
        }
        std::vector<char> used(segs.size(), 0);
        for (std::size_t s = 0; s < segs.size(); ++s) {
            if (used[s]) continue;
            used[s] = 1;
            std::deque<std::int64_t> chain = {segs[s].a, segs[s].b};
            for (int dir = 0; dir < 2; ++dir) {
                for (;;) {
                    std::int64_t end = dir == 0 ? chain.back() : chain.front();
                    std::size_t nxt = segs.size();
                    for (std::size_t cand : at[end])
                        if (!used[cand]) { nxt = cand; break; }
                    if (nxt == segs.size()) break;
                    used[nxt] = 1;
                    std::int64_t other = segs[nxt].a == end ? segs[nxt].b : segs[nxt].a;
                    if (dir == 0) chain.push_back(other);
                    else chain.push_front(other);
                }
            }
            Polyline line;
            line.closed = chain.size() > 2 && chain.front() == chain.back();
            if (line.closed) chain.pop_back();
            for (std::int64_t k : chain) line.pts.push_back(pts[k]);
            set.lines.push_back(std::move(line));
        }
        out.push_back(std::move(set));
    }
    return out;
}

void write_contours_csv(const std::vector<ContourSet>& sets, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "level,polyline,x,y\n";
    char buf[80];
    for (const auto& set : sets) {
        for (std::size_t l = 0; l < set.lines.size(); ++l) {
            for (const auto& p : set.lines[l].pts) {
                std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g", set.level, l,
                              p[0], p[1]);
                out << buf << "\n";
            }
        }
    }
}

void write_contours_svg(const std::vector<ContourSet>& sets, const Box& domain,
                        const std::string& path) {
    if (domain.size() != 2) throw DimensionError(domain.size());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const double W = 800.0, H = 800.0, margin = 40.0;
    auto sx = [&](double x) {
        return margin + (x - domain[0].lo) / domain[0].width() * (W - 2 * margin);
    };
    auto sy = [&](double y) {
        return H - margin - (y - domain[1].lo) / domain[1].width() * (H - 2 * margin);
    };
    static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << W - 2 * margin
        << "\" height=\"" << H - 2 * margin
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    char buf[64];
    for (std::size_t si = 0; si < sets.size(); ++si) {
        const char* color = colors[si % 5];
        for (const auto& line : sets[si].lines) {
            if (line.pts.empty()) continue;
            out << "<path d=\"";
            for (std::size_t i = 0; i < line.pts.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%c%.3f %.3f", i == 0 ? 'M' : 'L',
                              sx(line.pts[i][0]), sy(line.pts[i][1]));
                out << buf;
            }
            if (line.closed) out << "Z";
            out << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        }
    }
    out << "</svg>\n";
}

void export_contours(const Field2d& f, const Box& domain,
                     const std::vector<double>& levels, int resolution,
                     const std::string& csv_path, const std::string& svg_path) {
    auto sets = extract_contours(f, domain, levels, resolution);
    write_contours_csv(sets, csv_path);
    write_contours_svg(sets, domain, svg_path);
}

}  // namespace roa
