#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gfflab {

enum class Verdict { holds, violated_within_noise, violated };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated_within_noise: return "violated-within-noise";
        default: return "violated";
    }
}

/// Outcome of one numeric inequality check. `margin` is oriented so that
/// margin >= 0 means the inequality holds.
struct CheckReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double se = 0.0;
    Verdict verdict = Verdict::holds;
    std::map<std::string, double> params;
    std::map<std::string, std::string> labels;
    std::uint64_t seed = 0;
    std::vector<std::string> flags;
};

/// holds if margin >= 0; violated only below -3 SE.
inline Verdict verdict_for(double margin, double se) {
    if (margin >= 0.0) return Verdict::holds;
    if (margin >= -3.0 * se) return Verdict::violated_within_noise;
    return Verdict::violated;
}

}  // namespace gfflab
