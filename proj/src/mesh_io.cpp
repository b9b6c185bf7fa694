#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gratres/mesh.hpp"

namespace gratres {

namespace {

constexpr const char* kMagic = "gratres-mesh 1";

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-empty line; throws ParseError at end of file.
    std::string next(const char* expecting) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return line;
        }
        throw ParseError(line_no_, std::string("unexpected end of file, expected ") + expecting);
    }

    long line_no() const { return line_no_; }

private:
    std::istream& in_;
    long line_no_ = 0;
};

std::vector<int> read_index_list(LineReader& r, int count, const char* what) {
    std::vector<int> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        std::istringstream ls(r.next(what));
        int idx;
        if (!(ls >> idx)) throw ParseError(r.line_no(), std::string("bad ") + what + " record");
        out.push_back(idx);
    }
    return out;
}

} // namespace

void export_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open mesh file for writing: " + path);
    out << kMagic << "\n";
    out << "NODES " << mesh.node_count() << "\n";
    for (int i = 0; i < mesh.node_count(); ++i)
        out << fmt17(mesh.nodes(i, 0)) << " " << fmt17(mesh.nodes(i, 1)) << "\n";
    out << "TRIANGLES " << mesh.triangle_count() << "\n";
    for (int t = 0; t < mesh.triangle_count(); ++t)
        out << mesh.triangles(t, 0) << " " << mesh.triangles(t, 1) << " "
            << mesh.triangles(t, 2) << "\n";
    out << "TAGS " << mesh.triangle_count() << "\n";
    for (int t = 0; t < mesh.triangle_count(); ++t)
        out << (mesh.tags[t] == RegionTag::Metal ? "metal" : "vacuum") << "\n";
    const std::pair<const char*, const std::vector<int>*> sets[] = {
        {"left", &mesh.left},   {"right", &mesh.right}, {"top", &mesh.top},
        {"bottom", &mesh.bottom}, {"wall", &mesh.wall}};
    for (const auto& [name, set] : sets) {
        out << "BOUNDARY " << name << " " << set->size() << "\n";
        for (int i : *set) out << i << "\n";
    }
    out << "PAIRS " << mesh.pairs.size() << "\n";
    for (const auto& [l, r] : mesh.pairs) out << l << " " << r << "\n";
    if (!out) throw Error("write failure on mesh file: " + path);
}

Mesh import_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file: " + path);
    LineReader r(in);

    if (r.next("header") != kMagic)
        throw ParseError(r.line_no(), "not a gratres mesh file");

    Mesh mesh;
    {
        std::istringstream ls(r.next("NODES"));
        std::string kw;
        int n;
        if (!(ls >> kw >> n) || kw != "NODES" || n < 3)
            throw ParseError(r.line_no(), "expected 'NODES <count>'");
        mesh.nodes.resize(n, 2);
        for (int i = 0; i < n; ++i) {
            std::istringstream node(r.next("node record"));
            double x, y;
            if (!(node >> x >> y)) throw ParseError(r.line_no(), "bad node record");
            mesh.nodes.row(i) << x, y;
        }
    }
    {
        std::istringstream ls(r.next("TRIANGLES"));
        std::string kw;
        int m;
        if (!(ls >> kw >> m) || kw != "TRIANGLES" || m < 1)
            throw ParseError(r.line_no(), "expected 'TRIANGLES <count>'");
        mesh.triangles.resize(m, 3);
        for (int t = 0; t < m; ++t) {
            std::istringstream tri(r.next("triangle record"));
            int a, b, c;
            if (!(tri >> a >> b >> c)) throw ParseError(r.line_no(), "bad triangle record");
            mesh.triangles.row(t) << a, b, c;
        }
    }
    {
        std::istringstream ls(r.next("TAGS"));
        std::string kw;
        int m;
        if (!(ls >> kw >> m) || kw != "TAGS" || m != mesh.triangle_count())
            throw ParseError(r.line_no(), "expected 'TAGS <triangle count>'");
        mesh.tags.resize(m);
        for (int t = 0; t < m; ++t) {
            const std::string tag = r.next("tag record");
            if (tag == "metal")
                mesh.tags[t] = RegionTag::Metal;
            else if (tag == "vacuum")
                mesh.tags[t] = RegionTag::Vacuum;
            else
                throw ParseError(r.line_no(), "unknown region tag: " + tag);
        }
    }
    for (const char* name : {"left", "right", "top", "bottom", "wall"}) {
        std::istringstream ls(r.next("BOUNDARY"));
        std::string kw, set_name;
        int count;
        if (!(ls >> kw >> set_name >> count) || kw != "BOUNDARY" || set_name != name)
            throw ParseError(r.line_no(), std::string("expected 'BOUNDARY ") + name + " <count>'");
        std::vector<int>& dst = (set_name == "left")    ? mesh.left
                                : (set_name == "right") ? mesh.right
                                : (set_name == "top")   ? mesh.top
                                : (set_name == "bottom") ? mesh.bottom
                                                         : mesh.wall;
        dst = read_index_list(r, count, "boundary index");
    }
    {
        std::istringstream ls(r.next("PAIRS"));
        std::string kw;
        int count;
        if (!(ls >> kw >> count) || kw != "PAIRS")
            throw ParseError(r.line_no(), "expected 'PAIRS <count>'");
        for (int i = 0; i < count; ++i) {
            std::istringstream pr(r.next("pair record"));
            int l, rr;
            if (!(pr >> l >> rr)) throw ParseError(r.line_no(), "bad pair record");
            mesh.pairs.emplace_back(l, rr);
        }
    }
    mesh.validate();
    return mesh;
}

} // namespace gratres
