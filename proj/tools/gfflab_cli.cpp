// gfflab: experiment runner for level-set percolation of the zero-boundary
// discrete Gaussian free field.
//
//   gfflab <command> [--config file.json] [options]
//
// Options given on the command line override fields of the config file,
// which override the GFFLAB_OUT_DIR / GFFLAB_SEED environment variables.
// Exit codes: 0 ok, 1 internal error, 2 config error, 3 I/O error,
// 4 numeric flag raised under --strict.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gfflab/gfflab.hpp"
#include "gfflab/io.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace gfflab;

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kBoundaryConvention = "dirichlet-zero";

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kIo = 3, kNumeric = 4 };

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Kind { integer, real, seed, text, int_list, real_list };

struct OptionSpec {
    const char* name;
    Kind kind;
    const char* help;
};

// ---------------------------------------------------------------------------
// Flag text to JSON.

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream in(s);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

long long to_integer(const std::string& name, const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw config_error("--" + name + ": expected an integer, got '" + s + "'");
    return v;
}

double to_real(const std::string& name, const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw config_error("--" + name + ": expected a number, got '" + s + "'");
    return v;
}

json flag_to_json(const OptionSpec& spec, const std::string& raw) {
    switch (spec.kind) {
        case Kind::integer: return to_integer(spec.name, raw);
        case Kind::real: return to_real(spec.name, raw);
        case Kind::seed: {
            if (raw.empty() || raw.find_first_not_of("0123456789") != std::string::npos)
                throw config_error("--" + std::string(spec.name) + ": expected a non-negative integer");
            return std::stoull(raw);
        }
        case Kind::text: return raw;
        case Kind::int_list: {
            json a = json::array();
            for (const auto& s : split_list(raw)) a.push_back(to_integer(spec.name, s));
            return a;
        }
        case Kind::real_list: {
            json a = json::array();
            for (const auto& s : split_list(raw)) a.push_back(to_real(spec.name, s));
            return a;
        }
    }
    return raw;
}

// ---------------------------------------------------------------------------
// Typed reads from the resolved config.

class Config {
public:
    explicit Config(json j) : j_(std::move(j)) {}

    const json& raw() const { return j_; }
    bool has(const std::string& k) const { return j_.contains(k) && !j_[k].is_null(); }

    void set_default(const std::string& k, json v) {
        if (!has(k)) j_[k] = std::move(v);
    }

    long long integer(const std::string& k) const {
        const json& v = need(k);
        if (!v.is_number_integer()) throw config_error("config field '" + k + "' must be an integer");
        return v.get<long long>();
    }
    int positive_int(const std::string& k, int min = 1) const {
        const long long v = integer(k);
        if (v < min || v > 1'000'000'000) throw config_error("config field '" + k + "' must be >= " + std::to_string(min));
        return static_cast<int>(v);
    }
    double real(const std::string& k) const {
        const json& v = need(k);
        if (!v.is_number()) throw config_error("config field '" + k + "' must be a number");
        return v.get<double>();
    }
    std::uint64_t seed(const std::string& k) const {
        const json& v = need(k);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw config_error("config field '" + k + "' must be a non-negative integer");
        return v.get<std::uint64_t>();
    }
    std::string text(const std::string& k) const {
        const json& v = need(k);
        if (!v.is_string()) throw config_error("config field '" + k + "' must be a string");
        return v.get<std::string>();
    }
    std::vector<int> int_list(const std::string& k) const {
        const json& v = need(k);
        if (!v.is_array() || v.empty()) throw config_error("config field '" + k + "' must be a non-empty list");
        std::vector<int> out;
        for (const auto& x : v) {
            if (!x.is_number_integer()) throw config_error("config field '" + k + "' must hold integers");
            out.push_back(x.get<int>());
        }
        return out;
    }
    std::vector<double> real_list(const std::string& k) const {
        const json& v = need(k);
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array() || v.empty()) throw config_error("config field '" + k + "' must be a non-empty list");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw config_error("config field '" + k + "' must hold numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    std::size_t replicas() const {
        const long long m = integer("M");
        if (m < 1) throw config_error("config field 'M' must be >= 1");
        return static_cast<std::size_t>(m);
    }

private:
    const json& need(const std::string& k) const {
        if (!has(k)) throw config_error("missing config field '" + k + "'");
        return j_[k];
    }
    json j_;
};

// ---------------------------------------------------------------------------
// Output handling.

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_numeric_flag(const std::string& f) {
    for (const char* informational : {"regime:", "sign-convention:", "outside-hypothesis:"})
        if (f.rfind(informational, 0) == 0) return false;
    return true;
}

class Session {
public:
    Session(std::string command, Config cfg, fs::path out_dir, bool overwrite)
        : command_(std::move(command)), cfg_(std::move(cfg)), out_dir_(std::move(out_dir)), overwrite_(overwrite) {
        id_ = cfg_.text("experiment_id");
        if (id_.empty() || id_.find_first_of("/\\") != std::string::npos || id_ == "." || id_ == "..")
            throw config_error("experiment_id must be a plain, non-empty name");
        hash_ = git_blob_hash(cfg_.raw().dump());
    }

    const Config& cfg() const { return cfg_; }
    const std::string& id() const { return id_; }
    const std::string& hash() const { return hash_; }

    /// Refuses to reuse an id for a different config in the same directory.
    void claim_id() const {
        const fs::path meta = out_dir_ / (id_ + ".meta.json");
        if (!fs::exists(meta) || overwrite_) return;
        std::ifstream in(meta);
        json old;
        try {
            in >> old;
        } catch (const std::exception&) {
            throw config_error("experiment id '" + id_ + "' is taken by an unreadable metadata file; use --overwrite");
        }
        if (old.value("config_hash", "") != hash_)
            throw config_error("experiment id '" + id_ + "' already exists in " + out_dir_.string() +
                               " with a different config; choose another id or pass --overwrite");
    }

    void write(const std::string& suffix, const std::string& content, bool echo = true) {
        const fs::path p = out_dir_ / (id_ + suffix);
        atomic_write(p, content);
        outputs_.push_back(p.filename().string());
        if (echo) std::cout << content;
    }

    void flags(const std::vector<std::string>& fs_) {
        for (const auto& f : fs_)
            if (std::find(flags_.begin(), flags_.end(), f) == flags_.end()) flags_.push_back(f);
    }

    bool numeric_flag_raised() const {
        return std::any_of(flags_.begin(), flags_.end(), is_numeric_flag);
    }

    void write_meta() {
        json meta = {{"experiment_id", id_},
                     {"command", command_},
                     {"config", cfg_.raw()},
                     {"config_hash", hash_},
                     {"schema_version", kSchemaVersion},
                     {"boundary_convention", kBoundaryConvention},
                     {"tool_version", kToolVersion},
                     {"outputs", outputs_},
                     {"flags", flags_},
                     {"created_at", now_utc()}};
        atomic_write(out_dir_ / (id_ + ".meta.json"), meta.dump(2) + "\n");
    }

    const std::vector<std::string>& raised() const { return flags_; }

private:
    std::string command_;
    Config cfg_;
    fs::path out_dir_;
    bool overwrite_;
    std::string id_;
    std::string hash_;
    std::vector<std::string> outputs_;
    std::vector<std::string> flags_;
};

std::string estimates_csv(const Session& s, const std::vector<Estimate>& rows) {
    std::string out = std::string(kEstimateHeader) + "\n";
    for (const Estimate& e : rows) out += estimate_csv_row(s.id(), e, s.hash()) + "\n";
    return out;
}

std::string json_line(json j, const Session& s) {
    j["experiment_id"] = s.id();
    j["schema_version"] = kSchemaVersion;
    j["config_hash"] = s.hash();
    return j.dump() + "\n";
}

BoxLattice box_from(const Config& c) {
    if (c.has("width") || c.has("height")) return build_box(c.positive_int("width"), c.positive_int("height"));
    return build_box(c.positive_int("n"));
}

ReplicaOptions replica_options(unsigned workers) { return ReplicaOptions{workers, 64}; }

// ---------------------------------------------------------------------------
// Commands. Each fills defaults first so the config hash covers them.

void defaults_for(const std::string& cmd, Config& c) {
    if (cmd == "green") {
        if (!c.has("width")) c.set_default("n", 5);
    } else if (cmd == "sample") {
        if (!c.has("width")) c.set_default("n", 8);
        c.set_default("count", 1);
    } else if (cmd == "estimate" || cmd == "scan-h") {
        if (!c.has("width")) c.set_default("n", 8);
        c.set_default("event", "crossing:vertical");
        c.set_default("M", 1000);
        if (cmd == "estimate") c.set_default("h", 0.0);
        else if (!c.has("h_grid")) {
            c.set_default("h_min", -1.0);
            c.set_default("h_max", 1.0);
            c.set_default("h_steps", 9);
        }
    } else if (cmd == "curve") {
        c.set_default("h", -1.0);
        c.set_default("n_list", json::array({8, 12, 16, 24, 32}));
        c.set_default("M", 10000);
    } else if (cmd == "renorm") {
        c.set_default("mode", "easy");
        c.set_default("K", 3);
        c.set_default("h0", 1.0);
        if (c.text("mode") == "easy") {
            c.set_default("delta0", 0.5);
            c.set_default("n0", 100.0);
        } else {
            c.set_default("n0", 64.0);
            c.set_default("h", 0.0);
        }
    } else if (cmd == "critical") {
        c.set_default("criterion", "both");
        c.set_default("n", 16);
        c.set_default("M", 1000);
        c.set_default("tol", 0.25);
        c.set_default("bracket_lo", -8.0);
        c.set_default("bracket_hi", 8.0);
    } else if (cmd == "check") {
        const std::string name = c.text("name");
        c.set_default("M", 10000);
        if (name == "fkg") {
            c.set_default("n", 8);
            c.set_default("h", 0.0);
            if (!c.has("event_a")) c.set_default("pair", "0");
        } else if (name == "lemma2") {
            c.set_default("n", 8);
            c.set_default("N", 8);
            c.set_default("h1", 0.5);
            c.set_default("h2", 0.0);
        } else if (name == "corollary2") {
            c.set_default("n", 8);
            c.set_default("h0", -1.0);
            c.set_default("h1", -0.5);
        } else if (name == "dual-decay") {
            c.set_default("n", 32);
            c.set_default("h", -1.0);
            c.set_default("distances", json::array({2, 4, 6, 8}));
        } else if (name == "product-bound") {
            c.set_default("delta0", 0.5);
            c.set_default("n0", 100.0);
            c.set_default("h0", 1.0);
            c.set_default("K", 3);
        } else if (name == "differential") {
            c.set_default("n", 8);
            c.set_default("h", 0.0);
            c.set_default("dh", 0.05);
            c.set_default("event", "crossing:horizontal");
        } else {
            throw config_error("unknown check '" + name +
                               "' (expected fkg, lemma2, corollary2, dual-decay, product-bound, differential)");
        }
    }
}

void run_green(Session& s) {
    const BoxLattice box = box_from(s.cfg());
    const GreenOperator g = build_green(box);
    std::ostringstream green, layout;
    write_green_csv(green, g);
    write_layout_csv(layout, g.layout());
    s.write(".csv", green.str());
    s.write(".layout.csv", layout.str(), false);
}

void run_sample(Session& s) {
    const Config& c = s.cfg();
    const BoxLattice box = box_from(c);
    const GreenOperator g = build_green(box);
    const int count = c.positive_int("count");
    const StreamKey key(c.seed("seed"));
    std::string out = "replica,x,y,phi\n";
    for (int r = 0; r < count; ++r) {
        const FieldSample f = sample(g, key.derive(static_cast<std::uint64_t>(r)));
        for (Vertex v : box.vertices())
            out += std::to_string(r) + "," + std::to_string(v.x) + "," + std::to_string(v.y) + "," +
                   format_double(f.at(v)) + "\n";
    }
    s.write(".csv", out);
}

void run_estimate(Session& s, bool scan, unsigned workers) {
    const Config& c = s.cfg();
    const BoxLattice box = box_from(c);
    const EventDescriptor ev = parse_event(c.text("event"));
    validate(ev, box);
    std::vector<double> hs;
    if (!scan) {
        hs = {c.real("h")};
    } else if (c.has("h_grid")) {
        hs = c.real_list("h_grid");
    } else {
        const double lo = c.real("h_min");
        const double hi = c.real("h_max");
        const int steps = c.positive_int("h_steps");
        if (steps == 1) hs = {lo};
        for (int i = 0; steps > 1 && i < steps; ++i) hs.push_back(lo + (hi - lo) * i / (steps - 1));
    }
    const GreenOperator g = build_green(box);
    const auto rows = estimate_event_scan(g, hs, ev, c.replicas(), c.seed("seed"), replica_options(workers));
    for (const auto& e : rows) s.flags(e.flags);
    s.write(".csv", estimates_csv(s, rows));
}

void run_curve(Session& s, unsigned workers) {
    const Config& c = s.cfg();
    const std::vector<int> ns = c.int_list("n_list");
    for (int n : ns)
        if (n < 3) throw config_error("every entry of n_list must be >= 3");
    const int host = c.has("host") ? c.positive_int("host", 3) : *std::max_element(ns.begin(), ns.end());
    const GreenOperator g = build_green(build_box(host));
    const BoundaryCurve curve =
        boundary_connection_curve(g, c.real("h"), ns, c.replicas(), c.seed("seed"), replica_options(workers));
    std::vector<Estimate> rows;
    for (const auto& p : curve.points) rows.push_back(p.estimate);
    s.write(".csv", estimates_csv(s, rows));
    json fit;
    try {
        fit = to_json(fit_decay(curve));
        if (fit["degenerate"].get<bool>()) s.flags({"degenerate-fit"});
    } catch (const std::invalid_argument&) {
        fit = {{"error", "fewer than 3 points with positive probability"}};
        s.flags({"fit-unavailable"});
    }
    fit["h"] = curve.h;
    fit["host_side"] = curve.host_side;
    s.write(".fit.json", fit.dump(2) + "\n", false);
}

void run_renorm(Session& s) {
    const Config& c = s.cfg();
    const std::string mode = c.text("mode");
    const int K = c.positive_int("K", 0);
    if (mode == "easy") {
        const auto seq = easy_sequences<double>(c.real("delta0"), c.real("n0"), c.real("h0"), K);
        s.flags(seq.flags);
        s.write(".csv", renorm_csv(seq));
    } else if (mode == "hard") {
        const auto seq = hard_sequences<double>(c.real("n0"), c.real("h0"), c.real("h"), K);
        s.flags(seq.flags);
        s.write(".csv", renorm_csv(seq));
    } else {
        throw config_error("renorm mode must be 'easy' or 'hard'");
    }
}

void run_critical(Session& s, unsigned workers) {
    const Config& c = s.cfg();
    const std::string which = c.text("criterion");
    if (which != "crossing-half" && which != "decay-rate" && which != "both")
        throw config_error("criterion must be crossing-half, decay-rate or both");
    const int n = c.positive_int("n", 3);
    const double tol = c.real("tol");
    if (!(tol > 0.0)) throw config_error("tol must be > 0");
    CriticalOptions opts;
    opts.bracket_lo = c.real("bracket_lo");
    opts.bracket_hi = c.real("bracket_hi");
    if (!(opts.bracket_lo < opts.bracket_hi)) throw config_error("need bracket_lo < bracket_hi");
    if (c.has("epsilon")) opts.epsilon = c.real("epsilon");
    opts.ring_sides = c.has("ring_sides") ? c.int_list("ring_sides") : default_ring_sides(n);
    const std::uint64_t seed = c.seed("seed");
    const CriticalSurface surface(n, c.replicas(), seed, opts.ring_sides, replica_options(workers));
    std::string out;
    std::vector<CriticalEstimate> found;
    for (CriticalCriterion crit : {CriticalCriterion::crossing_half, CriticalCriterion::decay_rate}) {
        if (which != "both" && which != to_string(crit)) continue;
        const CriticalEstimate e = bisect_critical(surface, crit, tol, seed, opts);
        if (e.side != BracketSide::inside) s.flags({std::string("bracket-outside:") + to_string(crit)});
        out += json_line(to_json(e), s);
        found.push_back(e);
    }
    if (found.size() == 2) {
        const double gap = bracket_gap(found[0], found[1]);
        out += json_line({{"agreement", brackets_agree(found[0], found[1])},
                          {"gap", gap},
                          {"combined_tol", found[0].tol + found[1].tol}},
                         s);
    }
    s.write(".jsonl", out);
}

void run_check(Session& s, unsigned workers) {
    const Config& c = s.cfg();
    const std::string name = c.text("name");
    const ReplicaOptions ro = replica_options(workers);
    std::vector<CheckReport> reports;
    if (name == "fkg") {
        const BoxLattice box = box_from(c);
        const GreenOperator g = build_green(box);
        std::vector<EventPair> pairs;
        if (c.has("event_a") || c.has("event_b")) {
            pairs.push_back({parse_event(c.text("event_a")), parse_event(c.text("event_b"))});
        } else {
            const auto cat = fkg_catalogue(box);
            const std::string pick = c.text("pair");
            if (pick == "all") {
                pairs = cat;
            } else {
                const long long k = to_integer("pair", pick);
                if (k < 0 || k >= static_cast<long long>(cat.size()))
                    throw config_error("pair must be 'all' or an index below " + std::to_string(cat.size()));
                pairs.push_back(cat[static_cast<std::size_t>(k)]);
            }
        }
        for (double h : c.real_list("h"))
            for (const auto& p : pairs) reports.push_back(check_fkg(g, h, p.a, p.b, c.replicas(), c.seed("seed"), ro));
    } else if (name == "lemma2") {
        reports.push_back(check_lemma2_bound(c.positive_int("n"), c.positive_int("N"), c.real("h1"), c.real("h2"),
                                             c.replicas(), c.seed("seed"), ro));
    } else if (name == "corollary2") {
        reports.push_back(check_corollary2(c.positive_int("n", 3), c.real("h0"), c.real("h1"), c.replicas(),
                                           c.seed("seed"), ro));
    } else if (name == "dual-decay") {
        reports.push_back(check_dual_decay(c.real("h"), c.positive_int("n", 3), c.int_list("distances"),
                                           c.replicas(), c.seed("seed"), ro)
                              .report);
    } else if (name == "product-bound") {
        const auto seq = easy_sequences<double>(c.real("delta0"), c.real("n0"), c.real("h0"), c.positive_int("K", 0));
        const int k = c.has("k") ? c.positive_int("k", 0) : seq.K();
        reports.push_back(check_product_bound(seq, k));
    } else if (name == "differential") {
        const BoxLattice box = box_from(c);
        const GreenOperator g = build_green(box);
        const DifferentialReport d = differential_inequality_report(g, parse_event(c.text("event")), c.real("h"),
                                                                   c.real("dh"), c.replicas(), c.seed("seed"), ro);
        CheckReport r;
        r.name = "differential";
        // holds when a positive constant is resolved from |dP/dh|
        r.lhs = std::abs(d.derivative);
        r.rhs = d.rhs_factor;
        r.margin = r.lhs;
        r.se = d.derivative_se;
        r.verdict = r.lhs > 2.0 * r.se ? Verdict::holds : Verdict::violated_within_noise;
        r.params = {{"h", d.h}, {"dh", d.dh}, {"p", d.p}, {"p_minus", d.p_minus}, {"p_plus", d.p_plus},
                    {"max_influence", d.max_influence}, {"log_term", d.log_term}, {"implied_c", d.implied_c},
                    {"implied_c_reflected", d.implied_c_reflected}, {"argmax_x", d.argmax_vertex.x},
                    {"argmax_y", d.argmax_vertex.y}};
        r.labels = {{"event", d.event}};
        r.seed = d.seed;
        r.flags = d.flags;
        reports.push_back(r);
    }
    std::string out;
    for (const auto& r : reports) {
        s.flags(r.flags);
        out += json_line(to_json(r), s);
    }
    s.write(".jsonl", out);
}

// ---------------------------------------------------------------------------

const std::vector<OptionSpec> kCommonOptions = {
    {"seed", Kind::seed, "master seed"},
    {"id", Kind::text, "experiment id (default: the command name)"},
};

const std::map<std::string, std::vector<OptionSpec>> kCommandOptions = {
    {"green", {{"n", Kind::integer, "box side"}, {"width", Kind::integer, "box width"},
               {"height", Kind::integer, "box height"}}},
    {"sample", {{"n", Kind::integer, "box side"}, {"width", Kind::integer, "box width"},
                {"height", Kind::integer, "box height"}, {"count", Kind::integer, "number of fields"}}},
    {"estimate", {{"n", Kind::integer, "box side"}, {"width", Kind::integer, "box width"},
                  {"height", Kind::integer, "box height"}, {"h", Kind::real, "height"},
                  {"event", Kind::text, "event descriptor"}, {"M", Kind::integer, "replicas"}}},
    {"scan-h", {{"n", Kind::integer, "box side"}, {"width", Kind::integer, "box width"},
                {"height", Kind::integer, "box height"}, {"h-grid", Kind::real_list, "comma-separated heights"},
                {"h-min", Kind::real, "lowest height"}, {"h-max", Kind::real, "highest height"},
                {"h-steps", Kind::integer, "number of heights"}, {"event", Kind::text, "event descriptor"},
                {"M", Kind::integer, "replicas"}}},
    {"curve", {{"h", Kind::real, "height"}, {"n-list", Kind::int_list, "comma-separated box sides"},
               {"host", Kind::integer, "host box side (default: largest n)"}, {"M", Kind::integer, "replicas"}}},
    {"check", {{"name", Kind::text, "fkg | lemma2 | corollary2 | dual-decay | product-bound | differential"},
               {"n", Kind::integer, "box side / scale"}, {"N", Kind::integer, "second scale (lemma2)"},
               {"h", Kind::real_list, "height(s)"}, {"h0", Kind::real, "lower height"},
               {"h1", Kind::real, "height h1"}, {"h2", Kind::real, "height h2"}, {"dh", Kind::real, "step"},
               {"pair", Kind::text, "catalogue pair index or 'all' (fkg)"},
               {"event", Kind::text, "event descriptor (differential)"}, {"event-a", Kind::text, "first event (fkg)"},
               {"event-b", Kind::text, "second event (fkg)"}, {"distances", Kind::int_list, "dual-decay distances"},
               {"delta0", Kind::real, "delta_0"}, {"n0", Kind::real, "n_0"}, {"K", Kind::integer, "steps"},
               {"k", Kind::integer, "index"}, {"M", Kind::integer, "replicas"}}},
    {"renorm", {{"mode", Kind::text, "easy | hard"}, {"delta0", Kind::real, "delta_0 (easy)"},
                {"n0", Kind::real, "n_0"}, {"h0", Kind::real, "h_0"}, {"h", Kind::real, "target height (hard)"},
                {"K", Kind::integer, "number of steps"}}},
    {"critical", {{"criterion", Kind::text, "crossing-half | decay-rate | both"}, {"n", Kind::integer, "scale"},
                  {"M", Kind::integer, "replicas"}, {"tol", Kind::real, "bracket width"},
                  {"epsilon", Kind::real, "decay-rate threshold (default 1/n)"},
                  {"bracket-lo", Kind::real, "initial lower end"}, {"bracket-hi", Kind::real, "initial upper end"},
                  {"ring-sides", Kind::int_list, "decay-curve box sides"}}},
};

const std::map<std::string, std::string> kCommandHelp = {
    {"green", "write the Green function of a box"},
    {"sample", "draw fields and write their heights"},
    {"estimate", "estimate the probability of an event at one height"},
    {"scan-h", "estimate an event over a grid of heights on shared fields"},
    {"curve", "origin-to-boundary connection curve and its decay fit"},
    {"check", "run an inequality checker"},
    {"renorm", "renormalization sequences"},
    {"critical", "bisect the critical-height proxies"},
};

std::string config_key(const std::string& flag) {
    std::string k = flag;
    std::replace(k.begin(), k.end(), '-', '_');
    return k == "id" ? "experiment_id" : k;
}

int run(int argc, char** argv) {
    CLI::App app{"Level-set percolation experiments for the zero-boundary Gaussian free field"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help and exit");
    std::string config_path;
    std::string out_dir_flag;
    bool strict = false;
    bool overwrite = false;
    unsigned workers = 0;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir_flag, "output directory (env GFFLAB_OUT_DIR)");
    app.add_flag("--strict", strict, "exit with code 4 when a numeric flag is raised");
    app.add_flag("--overwrite", overwrite, "reuse an experiment id with a different config");
    app.add_option("--workers", workers, "worker threads (0: all cores)");

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [cmd, specs] : kCommandOptions) {
        CLI::App* sub = app.add_subcommand(cmd, kCommandHelp.at(cmd));
        subs[cmd] = sub;
        auto& store = raw[cmd];
        for (const auto* list : {&kCommonOptions, &specs})
            for (const OptionSpec& o : *list) sub->add_option(std::string("--") + o.name, store[o.name], o.help);
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    std::string cmd;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) cmd = name;

    json j = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw io_error("cannot read config file " + config_path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw config_error(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw config_error("config file must hold a JSON object");
        if (j.contains("command") && j["command"] != cmd)
            throw config_error("config is for command '" + j["command"].get<std::string>() + "'");
        j.erase("command");
    }
    std::string out_dir = j.value("out_dir", std::string());
    j.erase("out_dir");

    CLI::App* sub = subs.at(cmd);
    for (const auto* list : {&kCommonOptions, &kCommandOptions.at(cmd)})
        for (const OptionSpec& o : *list)
            if (sub->count(std::string("--") + o.name) > 0) j[config_key(o.name)] = flag_to_json(o, raw[cmd][o.name]);

    if (!out_dir_flag.empty()) out_dir = out_dir_flag;
    if (out_dir.empty())
        if (const char* env = std::getenv("GFFLAB_OUT_DIR")) out_dir = env;
    if (out_dir.empty()) out_dir = "gfflab-out";
    if (!j.contains("seed")) {
        if (const char* env = std::getenv("GFFLAB_SEED")) {
            j["seed"] = flag_to_json({"GFFLAB_SEED", Kind::seed, ""}, env);
        } else {
            j["seed"] = 1;
        }
    }
    if (!j.contains("experiment_id")) j["experiment_id"] = cmd;
    if (cmd == "check" && !j.contains("name")) throw config_error("check needs --name");

    Config cfg(std::move(j));
    defaults_for(cmd, cfg);
    Session session(cmd, std::move(cfg), out_dir, overwrite);
    session.claim_id();

    if (cmd == "green") run_green(session);
    else if (cmd == "sample") run_sample(session);
    else if (cmd == "estimate") run_estimate(session, false, workers);
    else if (cmd == "scan-h") run_estimate(session, true, workers);
    else if (cmd == "curve") run_curve(session, workers);
    else if (cmd == "renorm") run_renorm(session);
    else if (cmd == "critical") run_critical(session, workers);
    else if (cmd == "check") run_check(session, workers);
    session.write_meta();

    if (strict && session.numeric_flag_raised()) {
        std::cerr << "gfflab: numeric flags raised under --strict:";
        for (const auto& f : session.raised())
            if (is_numeric_flag(f)) std::cerr << ' ' << f;
        std::cerr << '\n';
        return kNumeric;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const io_error& e) {
        std::cerr << "gfflab: I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "gfflab: I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gfflab: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::out_of_range& e) {
        std::cerr << "gfflab: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "gfflab: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "gfflab: error: " << e.what() << '\n';
        return kInternal;
    }
}
