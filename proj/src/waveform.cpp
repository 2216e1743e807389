#include "zpsync/waveform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "zpsync/error.hpp"

namespace zpsync {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per size under a lock and reused.
class IdftPlans {
public:
    ~IdftPlans() {
        for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, fftw_plan> plans_;
};

IdftPlans& idft_plans() {
    static IdftPlans plans;
    return plans;
}

void append_grid(std::vector<cplx>& out, int cols, int rows, int corner) {
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const bool left = c < corner, right = c >= cols - corner;
            const bool low = r < corner, high = r >= rows - corner;
            if ((left || right) && (low || high)) continue;
            out.emplace_back(2.0 * c - (cols - 1), 2.0 * r - (rows - 1));
        }
    }
}

}  // namespace

QamConstellation::QamConstellation(std::size_t order) {
    if (order < 4 || !std::has_single_bit(order)) {
        throw ConfigError("mod_order must be a power of two >= 4, got " + std::to_string(order));
    }
    const int bits = std::countr_zero(order);
    if (bits % 2 == 0) {
        const int side = 1 << (bits / 2);
        append_grid(points_, side, side, 0);
    } else if (bits == 3) {
        append_grid(points_, 4, 2, 0);
    } else {
        const int side = 3 << ((bits - 3) / 2);
        append_grid(points_, side, side, side / 6);
    }
    double energy = 0.0;
    for (const auto& p : points_) energy += std::norm(p);
    const double scale = 1.0 / std::sqrt(energy / static_cast<double>(points_.size()));
    for (auto& p : points_) p *= scale;
}

cplx QamConstellation::draw(Rng& rng) const {
    const auto idx = rng.uniform_int(0, static_cast<std::int64_t>(points_.size()) - 1);
    return points_[static_cast<std::size_t>(idx)];
}

void inverse_dft_unitary(std::span<cplx> data) {
    if (data.empty()) return;
    fftw_plan plan = idft_plans().get(data.size());
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(data.size()));
    for (auto& v : data) v *= scale;
}

OfdmBlock generate_block(const SystemConfig& config, std::size_t antenna,
                         std::size_t block_index, Rng& rng) {
    config.validate();
    if (antenna >= config.m_t) {
        throw ConfigError("antenna index " + std::to_string(antenna) + " >= m_t");
    }
    OfdmBlock block;
    block.antenna = antenna;
    block.block_index = block_index;
    block.samples.assign(config.n_s(), cplx{});
    const double power = config.per_antenna_power();
    std::span<cplx> data(block.samples.data(), config.n_x);

    if (config.gaussian_source) {
        for (auto& v : data) v = rng.complex_normal(power);
        return block;
    }
    thread_local std::map<std::size_t, QamConstellation> tables;
    auto it = tables.find(config.mod_order);
    if (it == tables.end()) it = tables.emplace(config.mod_order, QamConstellation(config.mod_order)).first;

    const double amplitude = std::sqrt(power);
    for (auto& v : data) v = amplitude * it->second.draw(rng);
    inverse_dft_unitary(data);
    return block;
}

Samples generate_frame(const SystemConfig& config, std::size_t antenna,
                       std::size_t n_blocks, Rng& rng) {
    if (n_blocks == 0) throw ConfigError("n_blocks must be >= 1");
    Samples frame;
    frame.reserve(n_blocks * config.n_s());
    for (std::size_t b = 0; b < n_blocks; ++b) {
        auto block = generate_block(config, antenna, b, rng);
        frame.insert(frame.end(), block.samples.begin(), block.samples.end());
    }
    return frame;
}

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
        return r;
    }
    return v;
}

}  // namespace

void write_iq_dump(const std::filesystem::path& path, std::span<const cplx> samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& s : samples) {
        for (double part : {s.real(), s.imag()}) {
            const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(part));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Samples read_iq_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Samples out;
    std::uint64_t raw[2];
    while (in.read(reinterpret_cast<char*>(raw), sizeof raw)) {
        out.emplace_back(std::bit_cast<double>(to_little_endian(raw[0])),
                         std::bit_cast<double>(to_little_endian(raw[1])));
    }
    return out;
}

}  // namespace zpsync
