#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "gfflab/check_report.hpp"
#include "gfflab/estimators.hpp"
#include "gfflab/renormalization.hpp"

namespace gfflab {

inline constexpr int kSchemaVersion = 1;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// Hex SHA-1 of "blob <size>\0<content>", i.e. the git object id.
inline std::string git_blob_hash(std::string_view content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("git_blob_hash: cannot allocate digest context");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("git_blob_hash: digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 15];
    }
    return out;
}

/// Write to a sibling temporary file, then rename over the target.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw io_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw io_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw io_error("cannot move result into " + path.string());
    }
}

// ---------------------------------------------------------------------------
// Estimates CSV. Column order is fixed per schema_version.

inline constexpr std::string_view kEstimateHeader =
    "experiment_id,event,h,n,M,p_hat,ci_lo,ci_hi,seed,schema_version,config_hash";

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string estimate_csv_row(const std::string& experiment_id, const Estimate& e,
                                    const std::string& config_hash) {
    std::ostringstream row;
    row << csv_field(experiment_id) << ',' << csv_field(e.event) << ',' << format_double(e.h) << ',' << e.n << ','
        << e.M << ',' << format_double(e.p_hat) << ',' << format_double(e.ci_lo) << ',' << format_double(e.ci_hi)
        << ',' << e.seed << ',' << kSchemaVersion << ',' << config_hash;
    return row.str();
}

inline nlohmann::json to_json(const Estimate& e) {
    return {{"event", e.event}, {"h", e.h},         {"n", e.n},         {"M", e.M},
            {"successes", e.successes}, {"p_hat", e.p_hat}, {"ci_lo", e.ci_lo}, {"ci_hi", e.ci_hi},
            {"seed", e.seed}, {"flags", e.flags}};
}

inline nlohmann::json to_json(const DecayFit& f) {
    return {{"c", f.c}, {"intercept", f.intercept}, {"r2", f.r2}, {"c_se", f.c_se},
            {"points_used", f.points_used}, {"degenerate", f.degenerate}};
}

/// One JSON-lines record: name, lhs, rhs, margin, se, verdict, params, seed.
inline nlohmann::json to_json(const CheckReport& r) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    for (const auto& [k, v] : r.labels) params[k] = v;
    return {{"name", r.name}, {"lhs", r.lhs},       {"rhs", r.rhs},         {"margin", r.margin},
            {"se", r.se},     {"verdict", to_string(r.verdict)}, {"params", params}, {"seed", r.seed},
            {"flags", r.flags}};
}

inline nlohmann::json to_json(const CriticalEstimate& c) {
    return {{"criterion", to_string(c.criterion)}, {"n", c.n},     {"M", c.M},         {"tol", c.tol},
            {"epsilon", c.epsilon},   {"h_lo", c.h_lo}, {"h_hi", c.h_hi},   {"halvings", c.halvings},
            {"side", to_string(c.side)}, {"seed", c.seed}};
}

inline std::string renorm_csv(const RenormSequences<double>& s) {
    std::ostringstream out;
    if (s.mode == RenormMode::easy) {
        out << "k,delta,n,h\n";
        for (std::size_t k = 0; k < s.scales.size(); ++k)
            out << k << ',' << format_double(s.deltas[k]) << ',' << format_double(s.scales[k]) << ','
                << format_double(s.heights[k]) << '\n';
    } else {
        out << "k,n,h\n";
        for (std::size_t k = 0; k < s.scales.size(); ++k)
            out << k << ',' << format_double(s.scales[k]) << ',' << format_double(s.heights[k]) << '\n';
    }
    return out.str();
}

}  // namespace gfflab
