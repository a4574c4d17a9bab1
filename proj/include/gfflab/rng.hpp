#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace gfflab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Stateless: output is a pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) {
        constexpr std::uint32_t kM0 = 0xD2511F53u;
        constexpr std::uint32_t kM1 = 0xCD9E8D57u;
        constexpr std::uint32_t kW0 = 0x9E3779B9u;
        constexpr std::uint32_t kW1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Identifies one random stream: a master seed plus a derivation path
/// (experiment, replica, block, ...). Equal keys give equal streams.
class StreamKey {
public:
    StreamKey() = default;
    explicit StreamKey(std::uint64_t master_seed) : seed_(master_seed) {}

    std::uint64_t master_seed() const { return seed_; }
    std::span<const std::uint64_t> path() const { return path_; }

    StreamKey derive(std::uint64_t index) const {
        StreamKey child = *this;
        child.path_.push_back(index);
        return child;
    }

    /// 64-bit stream identifier folded from the path.
    std::uint64_t stream_id() const {
        std::uint64_t h = detail::splitmix64(0x5EEDull ^ path_.size());
        for (std::uint64_t idx : path_) h = detail::splitmix64(h ^ detail::splitmix64(idx));
        return h;
    }

    friend bool operator==(const StreamKey&, const StreamKey&) = default;

private:
    std::uint64_t seed_ = 0;
    std::vector<std::uint64_t> path_;
};

inline StreamKey derive(const StreamKey& key, std::uint64_t index) { return key.derive(index); }

/// Sequential reader over a counter-based stream.
///
/// Block b of the stream is Philox(counter = {b_lo, b_hi, id_lo, id_hi},
/// key = seed). Each block yields two 64-bit words, turned into one pair of
/// standard normals by the Box-Muller transform with uniforms in (0, 1].
class NormalStream {
public:
    explicit NormalStream(const StreamKey& key)
        : key_{static_cast<std::uint32_t>(key.master_seed()),
               static_cast<std::uint32_t>(key.master_seed() >> 32)},
          id_(key.stream_id()) {}

    std::array<std::uint64_t, 2> next_block() {
        Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(id_),
                                static_cast<std::uint32_t>(id_ >> 32)};
        ++block_;
        const auto out = Philox4x32::apply(ctr, key_);
        return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
    }

    /// Uniform in (0, 1] with 53 bits of resolution.
    static double to_unit(std::uint64_t bits) {
        return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
    }

    double next_uniform() {
        if (!have_uniform_) {
            pending_block_ = next_block();
            have_uniform_ = true;
            return to_unit(pending_block_[0]);
        }
        have_uniform_ = false;
        return to_unit(pending_block_[1]);
    }

    double next_normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_;
        }
        const auto bits = next_block();
        const double r = std::sqrt(-2.0 * std::log(to_unit(bits[0])));
        const double theta = 2.0 * std::numbers::pi * to_unit(bits[1]);
        spare_ = r * std::sin(theta);
        have_normal_ = true;
        return r * std::cos(theta);
    }

    void fill_normals(std::span<double> out) {
        for (double& z : out) z = next_normal();
    }

private:
    Philox4x32::Key key_;
    std::uint64_t id_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool have_normal_ = false;
    std::array<std::uint64_t, 2> pending_block_{};
    bool have_uniform_ = false;
};

inline std::vector<double> next_standard_normals(const StreamKey& key, std::size_t count) {
    std::vector<double> out(count);
    NormalStream stream(key);
    stream.fill_normals(out);
    return out;
}

}  // namespace gfflab
