#include "kpist/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kpist::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (trim(s.substr(pos)).empty()) return v;
    } catch (...) {
    }
    throw FormatError("cannot parse number '" + s + "' for " + what);
}

void write_header_line(std::ostream& os, const std::string& key, const std::string& value) {
    os << key << ": " << value << "\n";
}

// reads "key: value" lines until a blank line; returns map
std::map<std::string, std::string> read_header(std::istream& is, const std::string& magic) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("empty file");
    if (trim(line) != magic) throw FormatError("bad magic line, expected '" + magic + "'");
    std::map<std::string, std::string> h;
    while (std::getline(is, line)) {
        std::string t = trim(line);
        if (t.empty()) break;
        std::size_t c = t.find(':');
        if (c == std::string::npos) throw FormatError("malformed header line '" + t + "'");
        h[trim(t.substr(0, c))] = trim(t.substr(c + 1));
    }
    return h;
}

std::string require(const std::map<std::string, std::string>& h, const std::string& key) {
    auto it = h.find(key);
    if (it == h.end()) throw FormatError("missing header field '" + key + "'");
    return it->second;
}

} // namespace

void save_field(const Field& u, const fs::path& path, FieldPayload payload, bool tag_real) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os << "kpist-field v1\n";
    write_header_line(os, "ell", format_double(u.grid.ell));
    write_header_line(os, "Nx", std::to_string(u.grid.Nx));
    write_header_line(os, "Ny", std::to_string(u.grid.Ny));
    write_header_line(os, "Ly", format_double(u.grid.Ly));
    write_header_line(os, "kind", tag_real ? "real" : "complex");
    write_header_line(os, "payload", payload == FieldPayload::binary ? "binary" : "csv");
    os << "\n";
    if (payload == FieldPayload::binary) {
        static_assert(sizeof(double) == 8);
        for (const Complex& v : u.values) {
            double re = v.real(), im = v.imag();
            os.write(reinterpret_cast<const char*>(&re), 8);
            os.write(reinterpret_cast<const char*>(&im), 8);
        }
    } else {
        for (int k = 0; k < u.grid.Ny; ++k)
            for (int j = 0; j < u.grid.Nx; ++j)
                os << j << "," << k << "," << format_double(u.at(j, k).real()) << ","
                   << format_double(u.at(j, k).imag()) << "\n";
    }
    if (!os) throw FormatError("write failure on " + path.string());
}

Field load_field(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    auto h = read_header(is, "kpist-field v1");
    CylinderGrid g = make_grid(parse_double(require(h, "ell"), "ell"), std::stoi(require(h, "Nx")),
                               std::stoi(require(h, "Ny")), parse_double(require(h, "Ly"), "Ly"));
    Field u(g);
    std::string payload = require(h, "payload");
    if (payload == "binary") {
        for (Complex& v : u.values) {
            double re = 0.0, im = 0.0;
            is.read(reinterpret_cast<char*>(&re), 8);
            is.read(reinterpret_cast<char*>(&im), 8);
            if (!is) throw FormatError("truncated field payload in " + path.string());
            v = Complex(re, im);
        }
    } else if (payload == "csv") {
        std::string line;
        std::size_t count = 0;
        while (std::getline(is, line)) {
            std::string t = trim(line);
            if (t.empty()) continue;
            std::istringstream ls(t);
            std::string sj, sk, sre, sim;
            if (!std::getline(ls, sj, ',') || !std::getline(ls, sk, ',') ||
                !std::getline(ls, sre, ',') || !std::getline(ls, sim))
                throw FormatError("malformed csv row '" + t + "' in " + path.string());
            int j = std::stoi(sj), k = std::stoi(sk);
            if (j < 0 || j >= g.Nx || k < 0 || k >= g.Ny)
                throw FormatError("csv index out of range in " + path.string());
            u.at(j, k) = Complex(parse_double(sre, "re"), parse_double(sim, "im"));
            ++count;
        }
        if (count != g.size()) throw FormatError("truncated field payload in " + path.string());
    } else {
        throw FormatError("unknown payload kind '" + payload + "'");
    }
    std::string kind = require(h, "kind");
    if (kind == "real" && u.max_abs_imag() > 1e-12 * std::max(1.0, u.max_abs()))
        throw FormatError("field tagged real carries imaginary parts in " + path.string());
    return u;
}

void save_spectral(const SpectralData& F, const fs::path& path) {
    const ContourGrid& cg = F.contours;
    const CylinderGrid& g = cg.grid;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os << "# kpist-spectral v1\n";
    os << "# ell: " << format_double(g.ell) << "\n";
    os << "# omega: " << format_double(g.omega) << "\n";
    os << "# Nx: " << g.Nx << "\n";
    os << "# Ny: " << g.Ny << "\n";
    os << "# Ly: " << format_double(g.Ly) << "\n";
    os << "# n_max: " << cg.n_max << "\n";
    os << "# time: " << format_double(F.time) << "\n";
    const char* prov = F.provenance == SpectralProvenance::forward_computed ? "forward"
                       : F.provenance == SpectralProvenance::evolved       ? "evolved"
                                                                           : "loaded";
    os << "# provenance: " << prov << "\n";
    os << "n,xi,tau_im,reF,imF\n";
    for (int ci = 0; ci < cg.num_contours(); ++ci) {
        int n = cg.contour_n(ci);
        for (int k = 0; k < g.Ny; ++k) {
            double xi = g.xi(k);
            double tau = -xi / (2.0 * g.omega * n);
            const Complex& v = F.at(n, k);
            os << n << "," << format_double(xi) << "," << format_double(tau) << ","
               << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
        }
    }
    if (!os) throw FormatError("write failure on " + path.string());
}

SpectralData load_spectral(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || trim(line) != "# kpist-spectral v1")
        throw FormatError("bad magic line in " + path.string());
    std::map<std::string, std::string> h;
    while (is.peek() == '#') {
        std::getline(is, line);
        std::string t = trim(line.substr(1));
        std::size_t c = t.find(':');
        if (c != std::string::npos) h[trim(t.substr(0, c))] = trim(t.substr(c + 1));
    }
    CylinderGrid g = make_grid(parse_double(require(h, "ell"), "ell"), std::stoi(require(h, "Nx")),
                               std::stoi(require(h, "Ny")), parse_double(require(h, "Ly"), "Ly"));
    SpectralData F = zero_spectral_data(make_contour_grid(g, std::stoi(require(h, "n_max"))));
    F.time = parse_double(require(h, "time"), "time");
    F.provenance = SpectralProvenance::loaded;
    if (!std::getline(is, line) || trim(line) != "n,xi,tau_im,reF,imF")
        throw FormatError("missing column header in " + path.string());
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        std::istringstream ls(t);
        std::string sn, sxi, stau, sre, sim;
        if (!std::getline(ls, sn, ',') || !std::getline(ls, sxi, ',') ||
            !std::getline(ls, stau, ',') || !std::getline(ls, sre, ',') || !std::getline(ls, sim))
            throw FormatError("malformed spectral row '" + t + "'");
        int n = std::stoi(sn);
        double xi = parse_double(sxi, "xi");
        int k = static_cast<int>(std::lround(xi / g.dxi())) + g.Ny / 2;
        if (n == 0 || std::abs(n) > F.contours.n_max || k < 0 || k >= g.Ny)
            throw FormatError("spectral row out of range '" + t + "'");
        F.at(n, k) = Complex(parse_double(sre, "reF"), parse_double(sim, "imF"));
        ++rows;
    }
    if (rows != F.contours.samples()) throw FormatError("truncated spectral file " + path.string());
    return F;
}

void save_jost(const JostSolution& sol, const fs::path& path) {
    save_field(sol.mu, path);
    fs::path meta = path;
    meta += ".meta";
    std::ofstream os(meta, std::ios::binary);
    if (!os) throw FormatError("cannot open " + meta.string() + " for writing");
    os << "kpist-jost v1\n";
    write_header_line(os, "z_re", format_double(sol.z.z.real()));
    write_header_line(os, "z_im", format_double(sol.z.z.imag()));
    write_header_line(os, "contour_n", sol.z.contour_n ? std::to_string(*sol.z.contour_n) : "none");
    write_header_line(os, "side", !sol.z.contour_side          ? "none"
                                  : *sol.z.contour_side == Side::plus ? "plus"
                                                                      : "minus");
    write_header_line(os, "method", sol.method == BoundaryMethod::offset ? "offset" : "halfplane");
    write_header_line(os, "iterations", std::to_string(sol.iterations));
    write_header_line(os, "residual", format_double(sol.residual));
    write_header_line(os, "converged", sol.converged ? "true" : "false");
    write_header_line(os, "outside_theory", sol.outside_theory ? "true" : "false");
}

JostSolution load_jost(const fs::path& path) {
    JostSolution sol;
    sol.mu = load_field(path);
    fs::path meta = path;
    meta += ".meta";
    std::ifstream is(meta, std::ios::binary);
    if (!is) throw FormatError("cannot open " + meta.string());
    auto h = read_header(is, "kpist-jost v1");
    double omega = sol.mu.grid.omega;
    Complex z(parse_double(require(h, "z_re"), "z_re"), parse_double(require(h, "z_im"), "z_im"));
    std::string cn = require(h, "contour_n"), side = require(h, "side");
    if (cn != "none" && side != "none") {
        sol.z = SpectralPoint::on_contour(std::stoi(cn), side == "plus" ? Side::plus : Side::minus,
                                          z.imag(), omega);
    } else {
        sol.z = SpectralPoint::in_strip(z, omega);
    }
    sol.method = require(h, "method") == "offset" ? BoundaryMethod::offset : BoundaryMethod::halfplane;
    sol.iterations = std::stoi(require(h, "iterations"));
    sol.residual = parse_double(require(h, "residual"), "residual");
    sol.converged = require(h, "converged") == "true";
    sol.outside_theory = require(h, "outside_theory") == "true";
    return sol;
}

void save_traces(const BoundaryTraceSet& W, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream os(dir / "manifest.txt", std::ios::binary);
    if (!os) throw FormatError("cannot open trace manifest for writing");
    const CylinderGrid& g = W.contours.grid;
    os << "kpist-traces v1\n";
    write_header_line(os, "ell", format_double(g.ell));
    write_header_line(os, "Nx", std::to_string(g.Nx));
    write_header_line(os, "Ny", std::to_string(g.Ny));
    write_header_line(os, "Ly", format_double(g.Ly));
    write_header_line(os, "n_max", std::to_string(W.contours.n_max));
    write_header_line(os, "iterations", std::to_string(W.iterations));
    write_header_line(os, "residual", format_double(W.residual));
    write_header_line(os, "active", std::to_string(W.active.size()));
    os << "\n";
    for (std::size_t i = 0; i < W.active.size(); ++i) {
        auto [n, k] = W.active[i];
        os << "n_" << n << "_k_" << k << "\n";
        Field f(g);
        f.values = W.W[i];
        save_field(f, dir / ("n_" + std::to_string(n) + "_k_" + std::to_string(k) + ".field"));
    }
}

BoundaryTraceSet load_traces(const fs::path& dir) {
    std::ifstream is(dir / "manifest.txt", std::ios::binary);
    if (!is) throw FormatError("cannot open trace manifest in " + dir.string());
    auto h = read_header(is, "kpist-traces v1");
    CylinderGrid g = make_grid(parse_double(require(h, "ell"), "ell"), std::stoi(require(h, "Nx")),
                               std::stoi(require(h, "Ny")), parse_double(require(h, "Ly"), "Ly"));
    BoundaryTraceSet W;
    W.contours = make_contour_grid(g, std::stoi(require(h, "n_max")));
    W.iterations = std::stoi(require(h, "iterations"));
    W.residual = parse_double(require(h, "residual"), "residual");
    std::size_t n_active = std::stoul(require(h, "active"));
    std::string line;
    while (std::getline(is, line)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        int n = 0, k = 0;
        if (std::sscanf(t.c_str(), "n_%d_k_%d", &n, &k) != 2)
            throw FormatError("malformed trace entry '" + t + "'");
        Field f = load_field(dir / (t + ".field"));
        W.active.push_back({n, k});
        W.W.push_back(std::move(f.values));
    }
    if (W.active.size() != n_active) throw FormatError("trace directory incomplete");
    return W;
}

bool verify_roundtrip(const fs::path& path) {
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        if (!f) throw FormatError("cannot open " + p.string());
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    fs::path tmp = path;
    tmp += ".rt";
    std::string original = slurp(path);
    // Detect type from first bytes
    if (original.rfind("kpist-field v1", 0) == 0) {
        save_field(load_field(path), tmp, original.find("payload: csv") != std::string::npos
                                               ? FieldPayload::csv
                                               : FieldPayload::binary);
    } else if (original.rfind("# kpist-spectral v1", 0) == 0) {
        SpectralData F = load_spectral(path);
        // keep the stored provenance wording for byte equality
        std::string prov_line = "# provenance:";
        std::size_t pos = original.find(prov_line);
        if (pos != std::string::npos) {
            std::string word = trim(original.substr(pos + prov_line.size(),
                                                    original.find('\n', pos) - pos - prov_line.size()));
            if (word == "forward") F.provenance = SpectralProvenance::forward_computed;
            else if (word == "evolved") F.provenance = SpectralProvenance::evolved;
        }
        save_spectral(F, tmp);
    } else {
        throw FormatError("unknown artifact type in " + path.string());
    }
    bool same = slurp(tmp) == original;
    fs::remove(tmp);
    return same;
}

KeyValueDoc KeyValueDoc::parse_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

KeyValueDoc KeyValueDoc::parse_string(const std::string& text) {
    KeyValueDoc doc;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        std::size_t hash = t.find('#');
        if (hash != std::string::npos) t = trim(t.substr(0, hash));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("malformed section at line " + std::to_string(lineno));
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t c = t.find(':');
        if (c == std::string::npos)
            throw ConfigError("expected 'key: value' at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, c));
        if (!section.empty()) key = section + "." + key;
        doc.entries_[key] = trim(t.substr(c + 1));
    }
    return doc;
}

std::string KeyValueDoc::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
}

std::string KeyValueDoc::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueDoc::get_double(const std::string& key) const {
    return parse_double(get_string(key), key);
}

double KeyValueDoc::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int KeyValueDoc::get_int(const std::string& key) const {
    std::string s = get_string(key);
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (trim(s.substr(pos)).empty()) return v;
    } catch (...) {
    }
    throw ConfigError("cannot parse integer '" + s + "' for " + key);
}

int KeyValueDoc::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueDoc::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string s = get_string(key);
    if (s == "true" || s == "1" || s == "on") return true;
    if (s == "false" || s == "0" || s == "off") return false;
    throw ConfigError("cannot parse boolean '" + s + "' for " + key);
}

std::vector<double> KeyValueDoc::get_list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream ls(get_string(key));
    std::string item;
    while (std::getline(ls, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(parse_double(t, key));
    }
    return out;
}

void KeyValueDoc::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void save_manifest(const RunManifest& m, const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open manifest for writing");
    os << "kpist-manifest v1\n";
    os << "[grid]\n";
    os << "ell: " << format_double(m.grid.ell) << "\n";
    os << "Nx: " << m.grid.Nx << "\n";
    os << "Ny: " << m.grid.Ny << "\n";
    os << "Ly: " << format_double(m.grid.Ly) << "\n";
    os << "[contour]\n";
    os << "n_max: " << m.n_max << "\n";
    os << "[inverse]\n";
    os << "delta: " << format_double(m.inverse.delta) << "\n";
    os << "tol: " << format_double(m.inverse.tol) << "\n";
    os << "max_iter: " << m.inverse.max_iter << "\n";
    os << "orientation: " << m.inverse.plemelj_orientation << "\n";
    os << "[pde]\n";
    os << "dt: " << format_double(m.pde.dt) << "\n";
    os << "t_end: " << format_double(m.pde.t_end) << "\n";
    os << "dealias: " << (m.pde.dealias ? "true" : "false") << "\n";
    os << "[run]\n";
    std::string ts;
    for (std::size_t i = 0; i < m.times.size(); ++i)
        ts += (i ? "," : "") + format_double(m.times[i]);
    os << "times: " << ts << "\n";
    os << "seed: " << m.seed << "\n";
    os << "version: " << m.version << "\n";
    os << "potential: " << m.potential_spec << "\n";
}

RunManifest load_manifest(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open manifest " + path.string());
    std::string first;
    std::getline(is, first);
    if (trim(first) != "kpist-manifest v1") throw FormatError("bad manifest magic");
    std::ostringstream ss;
    ss << is.rdbuf();
    KeyValueDoc doc = KeyValueDoc::parse_string(ss.str());
    RunManifest m;
    m.grid = make_grid(doc.get_double("grid.ell"), doc.get_int("grid.Nx"), doc.get_int("grid.Ny"),
                       doc.get_double("grid.Ly"));
    m.n_max = doc.get_int("contour.n_max");
    m.inverse.delta = doc.get_double("inverse.delta");
    m.inverse.tol = doc.get_double("inverse.tol");
    m.inverse.max_iter = doc.get_int("inverse.max_iter");
    m.inverse.plemelj_orientation = doc.get_int("inverse.orientation");
    m.pde.dt = doc.get_double("pde.dt");
    m.pde.t_end = doc.get_double("pde.t_end");
    m.pde.dealias = doc.get_bool("pde.dealias", true);
    if (doc.has("run.times")) m.times = doc.get_list("run.times");
    m.seed = static_cast<unsigned long>(doc.get_int("run.seed", 0));
    m.version = doc.get_string("run.version", m.version);
    m.potential_spec = doc.get_string("run.potential", "");
    return m;
}

void save_metrics(const std::vector<std::tuple<double, double, double>>& rows, const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open metrics file for writing");
    os << "t,l2_rel,linf_rel\n";
    for (const auto& [t, l2, linf] : rows)
        os << format_double(t) << "," << format_double(l2) << "," << format_double(linf) << "\n";
}

} // namespace kpist::io
