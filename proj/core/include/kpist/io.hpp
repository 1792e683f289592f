#ifndef KPIST_IO_HPP
#define KPIST_IO_HPP

#include "kpist/kpsolver.hpp"

#include <filesystem>
#include <map>

namespace kpist::io {

enum class FieldPayload { binary, csv };

// Field file: text header (ell, Nx, Ny, Ly, kind, payload), blank line, then
// either raw little-endian re/im f64 pairs in row-major (k outer, j inner)
// order or CSV rows "j,k,re,im" at 17 significant digits.
void save_field(const Field& u, const std::filesystem::path& path,
                FieldPayload payload = FieldPayload::binary, bool tag_real = false);
Field load_field(const std::filesystem::path& path);

// SpectralData file: "# key: value" metadata block, a "n,xi,tau_im,reF,imF"
// header line, then one row per stored sample in contour-major order.
void save_spectral(const SpectralData& F, const std::filesystem::path& path);
SpectralData load_spectral(const std::filesystem::path& path);

// A Jost solution persists as a field file for mu plus a text metadata block
// (spectral point, side, method, iterations, residual) at <path>.meta.
void save_jost(const JostSolution& sol, const std::filesystem::path& path);
JostSolution load_jost(const std::filesystem::path& path);

// Trace set persists as a directory of field files n_<n>_k_<k>.field plus a
// manifest listing the active samples and solver metadata.
void save_traces(const BoundaryTraceSet& W, const std::filesystem::path& dir);
BoundaryTraceSet load_traces(const std::filesystem::path& dir);

// Byte-exact save/load/save verification for artifact files.
bool verify_roundtrip(const std::filesystem::path& path);

// Flat "key: value" document with optional [section] headers; section names
// prefix keys as "section.key". '#' starts a comment.
class KeyValueDoc {
  public:
    static KeyValueDoc parse_file(const std::filesystem::path& path);
    static KeyValueDoc parse_string(const std::string& text);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key) const; // comma separated

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

void save_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

// Metrics CSV "t,l2_rel,linf_rel".
void save_metrics(const std::vector<std::tuple<double, double, double>>& rows,
                  const std::filesystem::path& path);

std::string format_double(double v); // 17 significant digits, locale-free

} // namespace kpist::io

#endif
