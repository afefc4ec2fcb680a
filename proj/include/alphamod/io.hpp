#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bapu.hpp"
#include "covering.hpp"
#include "grid.hpp"
#include "signal.hpp"

namespace alphamod::io {

using json = nlohmann::ordered_json;

inline std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return GridSpec::format_double(v);
}

// Plain CSV with a fixed header; numbers in shortest round-trip form.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvWriter& row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size()) throw std::invalid_argument("csv: row width differs from the header");
        rows_.push_back(cells);
        return *this;
    }

    std::string str() const {
        std::ostringstream os;
        write_line(os, header_);
        for (const auto& r : rows_) write_line(os, r);
        return os.str();
    }

    std::size_t size() const { return rows_.size(); }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// JSON numbers cannot hold infinities.
inline json num(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

inline json to_json(const GridSpec& g) { return json{{"d", g.d}, {"n", g.n}, {"L", g.L}}; }

inline GridSpec grid_from_json(const json& j) {
    GridSpec g;
    g.d = j.at("d").get<int>();
    g.n = j.at("n").get<std::size_t>();
    g.L = j.at("L").get<double>();
    g.validate();
    return g;
}

inline json to_json(const PatchId& id) {
    switch (id.kind) {
        case PatchId::Kind::Lattice: return json{{"lattice", {id.k[0], id.k[1]}}};
        case PatchId::Kind::Level: return json{{"level", id.index}};
        case PatchId::Kind::Index: return json{{"index", id.index}};
    }
    return json{};
}

inline PatchId patch_id_from_json(const json& j) {
    if (j.contains("lattice")) return PatchId::lattice(j["lattice"][0].get<int>(), j["lattice"][1].get<int>());
    if (j.contains("level")) return PatchId::level(j["level"].get<int>());
    return PatchId::running(j.at("index").get<int>());
}

inline Shape shape_from_name(const std::string& s) {
    for (Shape sh : {Shape::Ball, Shape::Cube, Shape::Annulus, Shape::Ball0})
        if (s == shape_name(sh)) return sh;
    throw std::invalid_argument("unknown patch shape " + s);
}

inline CoveringKind kind_from_name(const std::string& s) {
    for (auto k : {CoveringKind::BallLattice, CoveringKind::CubeLattice, CoveringKind::Dyadic, CoveringKind::Metric})
        if (s == kind_name(k)) return k;
    throw std::invalid_argument("unknown covering kind " + s);
}

inline json to_json(const Covering& C) {
    json patches = json::array();
    for (const auto& P : C.patches)
        patches.push_back(json{{"id", to_json(P.id)},
                               {"shape", shape_name(P.shape)},
                               {"center", {P.center[0], P.center[1]}},
                               {"radius", P.radius},
                               {"inner", P.inner},
                               {"xi", {P.xi[0], P.xi[1]}}});
    return json{{"kind", kind_name(C.kind)},
                {"d", C.d},
                {"alpha", C.alpha},
                {"r", C.r},
                {"beta", num(C.beta)},
                {"trunc_radius", C.trunc_radius},
                {"height_n0", C.height_n0},
                {"ratio_K", C.ratio_K},
                {"ratio_spread", C.ratio_spread},
                {"patches", patches}};
}

inline Covering covering_from_json(const json& j) {
    Covering C;
    C.kind = kind_from_name(j.at("kind").get<std::string>());
    C.d = j.at("d").get<int>();
    C.alpha = j.at("alpha").get<double>();
    C.r = j.at("r").get<double>();
    C.beta = j.at("beta").is_string() ? HUGE_VAL : j.at("beta").get<double>();
    C.trunc_radius = j.at("trunc_radius").get<double>();
    C.height_n0 = j.at("height_n0").get<int>();
    C.ratio_K = j.at("ratio_K").get<double>();
    C.ratio_spread = j.at("ratio_spread").get<double>();
    for (const auto& p : j.at("patches")) {
        FrequencyPatch P;
        P.id = patch_id_from_json(p.at("id"));
        P.shape = shape_from_name(p.at("shape").get<std::string>());
        P.center = {p.at("center")[0].get<double>(), p.at("center")[1].get<double>()};
        P.radius = p.at("radius").get<double>();
        P.inner = p.at("inner").get<double>();
        P.xi = {p.at("xi")[0].get<double>(), p.at("xi")[1].get<double>()};
        C.patches.push_back(P);
    }
    return C;
}

inline json to_json(const CertificateReport& r) {
    json j{{"n0", r.n0},
           {"K", r.K},
           {"ratio_min", r.ratio_min},
           {"ratio_max", r.ratio_max},
           {"ratio_spread", r.ratio_spread},
           {"complete", r.complete},
           {"samples_checked", r.samples_checked},
           {"uncovered", r.uncovered}};
    if (!r.complete) j["first_uncovered"] = {r.first_uncovered[0], r.first_uncovered[1]};
    return j;
}

// A partition is stored by its analytic description: the covering, the grid
// and the plateau radius. Windows are rebuilt from these.
inline json bapu_to_json(const Bapu& B) {
    json j{{"grid", to_json(B.grid)}, {"covering", to_json(B.covering)}, {"plateau_r", B.plateau_r}};
    json ids = json::array();
    for (int id : B.plateau_ids) ids.push_back(id);
    j["plateau_ids"] = ids;
    return j;
}

inline Bapu bapu_from_json(const json& j) {
    GridSpec g = grid_from_json(j.at("grid"));
    Covering C = covering_from_json(j.at("covering"));
    std::vector<int> ids = j.at("plateau_ids").get<std::vector<int>>();
    Covering base = C;
    std::vector<Vec2> centers;
    if (!ids.empty()) {
        base.patches.resize(std::size_t(ids.front()));
        for (int id : ids) centers.push_back(C.patches.at(std::size_t(id)).center);
    }
    Bapu B = build_bapu(base, g);
    if (!centers.empty()) B = adjoin_plateau(B, centers, j.at("plateau_r").get<double>());
    return B;
}

struct SignalMeta {
    std::string kind;
    std::uint64_t seed = 0;
    std::string domain = "spatial";
};

inline void write_f64_le(std::ostream& os, const std::vector<cplx>& v) {
    std::vector<unsigned char> buf(v.size() * 16);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (int part = 0; part < 2; ++part) {
            double x = part ? v[i].imag() : v[i].real();
            std::uint64_t u = std::bit_cast<std::uint64_t>(x);
            for (int b = 0; b < 8; ++b) buf[i * 16 + std::size_t(part) * 8 + std::size_t(b)] = (u >> (8 * b)) & 0xff;
        }
    os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
}

inline std::vector<cplx> read_f64_le(std::istream& is, std::size_t count) {
    std::vector<unsigned char> buf(count * 16);
    is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (std::size_t(is.gcount()) != buf.size()) throw std::runtime_error("signal file is shorter than its sidecar says");
    std::vector<cplx> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        double parts[2];
        for (int part = 0; part < 2; ++part) {
            std::uint64_t u = 0;
            for (int b = 0; b < 8; ++b) u |= std::uint64_t(buf[i * 16 + std::size_t(part) * 8 + std::size_t(b)]) << (8 * b);
            parts[part] = std::bit_cast<double>(u);
        }
        v[i] = {parts[0], parts[1]};
    }
    return v;
}

// <base>.bin holds interleaved little-endian float64 (re, im); <base>.json the grid and provenance.
inline void write_signal(const std::filesystem::path& base, const GridSpec& g, const std::vector<cplx>& values,
                         const SignalMeta& meta) {
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    std::filesystem::path bin = base, side = base;
    bin += ".bin";
    side += ".json";
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + bin.string());
    write_f64_le(os, values);
    json j{{"grid", to_json(g)},
           {"kind", meta.kind},
           {"seed", meta.seed},
           {"domain", meta.domain},
           {"dtype", "complex128"},
           {"byte_order", "little"},
           {"layout", "row-major, centered spectral index for domain=spectral"},
           {"data", bin.filename().string()}};
    write_text(side, dump(j));
}

inline void write_signal(const std::filesystem::path& base, const Signal& f, const SignalMeta& meta) {
    SignalMeta m = meta;
    m.domain = "spatial";
    write_signal(base, f.grid, f.samples, m);
}

inline Signal read_signal(const std::filesystem::path& base, SignalMeta* meta = nullptr) {
    std::filesystem::path side = base;
    side += ".json";
    json j = json::parse(read_text(side));
    GridSpec g = grid_from_json(j.at("grid"));
    std::filesystem::path bin = base.parent_path() / j.at("data").get<std::string>();
    std::ifstream is(bin, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + bin.string());
    std::vector<cplx> values = read_f64_le(is, g.total());
    if (meta) {
        meta->kind = j.value("kind", "");
        meta->seed = j.value("seed", std::uint64_t(0));
        meta->domain = j.value("domain", "spatial");
    }
    Signal f(g);
    if (j.value("domain", "spatial") == "spectral") {
        SpectralSignal F(g);
        F.coeffs = std::move(values);
        return fft_inverse(F);
    }
    f.samples = std::move(values);
    return f;
}

}  // namespace alphamod::io
