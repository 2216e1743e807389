#include "zpsync/channel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "zpsync/error.hpp"
#include "zpsync/waveform.hpp"

namespace zpsync {

DelayProfile::DelayProfile(std::vector<double> powers, bool normalized) : powers_(std::move(powers)) {
    if (powers_.empty()) throw ConfigError("delay profile needs at least one tap");
    for (double p : powers_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("tap powers must be finite and >= 0");
    }
    const double sum = total();
    if (!(sum > 0.0)) throw ConfigError("delay profile is all zero");
    if (normalized) {
        for (double& p : powers_) p /= sum;
    }
}

DelayProfile DelayProfile::exponential(double alpha, double beta, std::size_t n_h, bool normalized) {
    if (n_h == 0) throw ConfigError("n_h must be positive");
    std::vector<double> powers(n_h);
    for (std::size_t k = 0; k < n_h; ++k) powers[k] = alpha * std::exp(-beta * static_cast<double>(k));
    return DelayProfile(std::move(powers), normalized);
}

double DelayProfile::total() const noexcept {
    return std::accumulate(powers_.begin(), powers_.end(), 0.0);
}

ChannelRealization::ChannelRealization(std::size_t m_r, std::size_t m_t, std::size_t n_h)
    : m_r_(m_r), m_t_(m_t), n_h_(n_h), taps_(m_r * m_t * n_h) {}

std::span<cplx> ChannelRealization::taps(std::size_t rx, std::size_t tx) {
    return {taps_.data() + (rx * m_t_ + tx) * n_h_, n_h_};
}

std::span<const cplx> ChannelRealization::taps(std::size_t rx, std::size_t tx) const {
    return {taps_.data() + (rx * m_t_ + tx) * n_h_, n_h_};
}

NoiseMixture::NoiseMixture(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("noise mixture needs at least one component");
    double sum = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0 && c.weight <= 1.0)) throw ConfigError("mixture weights must lie in (0, 1]");
        if (!(c.variance > 0.0) || !std::isfinite(c.variance)) {
            throw ConfigError("mixture component variances must be positive");
        }
        sum += c.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError("mixture weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

NoiseMixture NoiseMixture::gaussian(double variance) { return NoiseMixture({{1.0, variance}}); }

double NoiseMixture::average_power() const noexcept {
    double p = 0.0;
    for (const auto& c : components_) p += c.weight * c.variance;
    return p;
}

NoiseMixture NoiseMixture::scaled(double factor) const {
    auto comps = components_;
    for (auto& c : comps) c.variance *= factor;
    return NoiseMixture(std::move(comps));
}

NoiseMixture scale_mixture_to_snr(const NoiseMixture& mixture, double sigma_x2, double snr_db,
                                  SnrReference reference) {
    if (!std::isfinite(snr_db)) throw ConfigError("SNR must be finite");
    if (!(sigma_x2 > 0.0)) throw ConfigError("sigma_x2 must be positive");
    const double target = sigma_x2 * std::pow(10.0, -snr_db / 10.0);
    const double current = reference == SnrReference::AveragePower
                               ? mixture.average_power()
                               : mixture.components().front().variance;
    return mixture.scaled(target / current);
}

ChannelRealization draw_channel(const DelayProfile& profile, std::size_t m_t, std::size_t m_r,
                                Rng& rng) {
    ChannelRealization channel(m_r, m_t, profile.size());
    for (std::size_t j = 0; j < m_r; ++j) {
        for (std::size_t i = 0; i < m_t; ++i) {
            auto taps = channel.taps(j, i);
            for (std::size_t k = 0; k < taps.size(); ++k) taps[k] = rng.complex_normal(profile[k]);
        }
    }
    return channel;
}

Samples draw_noise(const NoiseMixture& mixture, std::size_t count, Rng& rng) {
    Samples out(count);
    const auto comps = mixture.components();
    if (comps.size() == 1) {
        for (auto& v : out) v = rng.complex_normal(comps[0].variance);
        return out;
    }
    for (auto& v : out) {
        const double u = rng.uniform();
        std::size_t l = 0;
        double cum = comps[0].weight;
        while (u >= cum && l + 1 < comps.size()) cum += comps[++l].weight;
        v = rng.complex_normal(comps[l].variance);
    }
    return out;
}

std::vector<Samples> propagate(const ChannelRealization& channel,
                               std::span<const Samples> tx_frames) {
    if (tx_frames.size() != channel.m_t()) throw ConfigError("one frame per transmit antenna required");
    const std::size_t len = tx_frames.front().size();
    for (const auto& f : tx_frames) {
        if (f.size() != len) throw ConfigError("transmit frames differ in length");
    }
    std::vector<Samples> rx(channel.m_r(), Samples(len));
    for (std::size_t j = 0; j < channel.m_r(); ++j) {
        auto& out = rx[j];
        for (std::size_t i = 0; i < channel.m_t(); ++i) {
            const auto h = channel.taps(j, i);
            const auto& s = tx_frames[i];
            for (std::size_t k = 0; k < len; ++k) {
                cplx acc{};
                const std::size_t taps = std::min(h.size(), k + 1);
                for (std::size_t r = 0; r < taps; ++r) acc += h[r] * s[k - r];
                out[k] += acc;
            }
        }
    }
    return rx;
}

StreamSeeds StreamSeeds::for_trial(std::uint64_t master, std::uint64_t index) {
    return {derive_seed(master, index, "signal"), derive_seed(master, index, "channel"),
            derive_seed(master, index, "noise")};
}

Samples ReceiveStream::slice(std::size_t rx, std::int64_t start, std::size_t length) const {
    const auto& s = antennas.at(rx);
    const std::int64_t begin = start + static_cast<std::int64_t>(pad);
    if (begin < 0 || static_cast<std::size_t>(begin) + length > s.size()) {
        throw RangeError("slice [" + std::to_string(start) + ", +" + std::to_string(length) +
                         ") outside the realized stream");
    }
    return Samples(s.begin() + begin, s.begin() + begin + static_cast<std::int64_t>(length));
}

ReceiveStream build_stream(const SystemConfig& config, const ChannelRealization& channel,
                           const NoiseMixture& mixture, std::size_t pad,
                           const StreamSeeds& seeds) {
    config.validate();
    if (channel.m_t() != config.m_t || channel.m_r() != config.m_r) {
        throw ConfigError("channel antenna counts do not match the configuration");
    }
    if (channel.n_h() > config.n_z) throw ConfigError("channel longer than the zero pad");

    const std::size_t blocks = config.n_blocks + 1;
    std::vector<Samples> frames;
    frames.reserve(config.m_t);
    for (std::size_t i = 0; i < config.m_t; ++i) {
        Rng rng(derive_seed(seeds.signal, i, "tx"));
        frames.push_back(generate_frame(config, i, blocks, rng));
    }
    auto signal = propagate(channel, frames);

    ReceiveStream stream;
    stream.pad = pad;
    stream.antennas.resize(config.m_r);
    for (std::size_t j = 0; j < config.m_r; ++j) {
        // Non-negative and negative indices draw from separate noise streams.
        Rng pos(derive_seed(seeds.noise, j, "rx+"));
        Rng neg(derive_seed(seeds.noise, j, "rx-"));
        const auto after = draw_noise(mixture, signal[j].size(), pos);
        const auto before = draw_noise(mixture, pad, neg);

        auto& out = stream.antennas[j];
        out.resize(pad + signal[j].size());
        for (std::size_t k = 0; k < pad; ++k) out[pad - 1 - k] = before[k];
        for (std::size_t k = 0; k < signal[j].size(); ++k) out[pad + k] = signal[j][k] + after[k];
    }
    return stream;
}

ReceivedWindow assemble_window(const SystemConfig& config, const ChannelRealization& channel,
                               const NoiseMixture& mixture, std::int64_t d_true,
                               const StreamSeeds& seeds, std::size_t pad) {
    const auto n_s = static_cast<std::int64_t>(config.n_s());
    if (d_true < -static_cast<std::int64_t>(pad) || d_true > n_s - 1) {
        throw RangeError("delay " + std::to_string(d_true) + " outside [-" + std::to_string(pad) +
                         ", " + std::to_string(n_s - 1) + "]");
    }
    const auto stream = build_stream(config, channel, mixture, pad, seeds);
    ReceivedWindow window;
    window.d_true = d_true;
    window.signal_seed = seeds.signal;
    window.samples.reserve(config.m_r);
    for (std::size_t j = 0; j < config.m_r; ++j) {
        window.samples.push_back(stream.slice(j, d_true, config.window_length()));
    }
    return window;
}

ReceivedWindow assemble_window(const SystemConfig& config, const DelayProfile& profile,
                               const NoiseMixture& mixture, std::int64_t d_true,
                               const StreamSeeds& seeds, std::size_t pad) {
    Rng rng(seeds.channel);
    const auto channel = draw_channel(profile, config.m_t, config.m_r, rng);
    return assemble_window(config, channel, mixture, d_true, seeds, pad);
}

void dump_window(const std::filesystem::path& prefix, const ReceivedWindow& window) {
    for (std::size_t j = 0; j < window.samples.size(); ++j) {
        write_iq_dump(prefix.string() + "_rx" + std::to_string(j) + ".iq", window.samples[j]);
    }
}

}  // namespace zpsync
