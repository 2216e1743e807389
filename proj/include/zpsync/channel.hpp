#ifndef ZPSYNC_CHANNEL_HPP
#define ZPSYNC_CHANNEL_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "zpsync/config.hpp"
#include "zpsync/rng.hpp"

namespace zpsync {

/// Average power of each multipath tap.
class DelayProfile {
public:
    /// Explicit tap powers. Throws ConfigError on negative entries or an all-zero profile.
    explicit DelayProfile(std::vector<double> powers, bool normalized = false);

    /// alpha * exp(-beta * k) for k = 0..n_h-1; normalized rescales to unit sum.
    static DelayProfile exponential(double alpha, double beta, std::size_t n_h,
                                    bool normalized = false);

    [[nodiscard]] std::span<const double> powers() const noexcept { return powers_; }
    [[nodiscard]] std::size_t size() const noexcept { return powers_.size(); }
    [[nodiscard]] double total() const noexcept;
    [[nodiscard]] double operator[](std::size_t k) const { return powers_[k]; }

private:
    std::vector<double> powers_;
};

/// Tap vectors h_ji for every (receive j, transmit i) pair, held for one window.
class ChannelRealization {
public:
    ChannelRealization(std::size_t m_r, std::size_t m_t, std::size_t n_h);

    [[nodiscard]] std::size_t m_r() const noexcept { return m_r_; }
    [[nodiscard]] std::size_t m_t() const noexcept { return m_t_; }
    [[nodiscard]] std::size_t n_h() const noexcept { return n_h_; }

    [[nodiscard]] std::span<cplx> taps(std::size_t rx, std::size_t tx);
    [[nodiscard]] std::span<const cplx> taps(std::size_t rx, std::size_t tx) const;

private:
    std::size_t m_r_, m_t_, n_h_;
    std::vector<cplx> taps_;
};

/// Gaussian-mixture (Class A) noise: weight p_l and complex variance sigma^2_l per component.
class NoiseMixture {
public:
    struct Component {
        double weight;
        double variance;
    };

    /// Throws ConfigError unless weights are in (0, 1] and sum to 1, and variances are positive.
    explicit NoiseMixture(std::vector<Component> components);

    static NoiseMixture gaussian(double variance);

    [[nodiscard]] std::span<const Component> components() const noexcept { return components_; }
    [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
    [[nodiscard]] bool is_gaussian() const noexcept { return components_.size() == 1; }
    /// sum_l p_l sigma^2_l
    [[nodiscard]] double average_power() const noexcept;
    /// Same weights, every variance multiplied by factor.
    [[nodiscard]] NoiseMixture scaled(double factor) const;

private:
    std::vector<Component> components_;
};

/// Which noise power the SNR is referenced to.
enum class SnrReference {
    AveragePower,         ///< sum_l p_l sigma^2_l
    BackgroundComponent,  ///< sigma^2 of component 0 (the non-impulsive one)
};

/**
 * Rescale all component variances by one common factor so the reference noise
 * power equals sigma_x2 * 10^(-snr_db / 10). Throws ConfigError for a
 * non-finite SNR.
 */
NoiseMixture scale_mixture_to_snr(const NoiseMixture& mixture, double sigma_x2, double snr_db,
                                  SnrReference reference = SnrReference::AveragePower);

ChannelRealization draw_channel(const DelayProfile& profile, std::size_t m_t, std::size_t m_r,
                                Rng& rng);

Samples draw_noise(const NoiseMixture& mixture, std::size_t count, Rng& rng);

/**
 * Noiseless receive signal: for each receive antenna j, sum_i h_ji * frame_i
 * truncated to the frame length. Frames must share one length.
 */
std::vector<Samples> propagate(const ChannelRealization& channel,
                               std::span<const Samples> tx_frames);

/// Seeds for the independent random streams behind one received window.
struct StreamSeeds {
    std::uint64_t signal;
    std::uint64_t channel;
    std::uint64_t noise;

    /// Streams for trial `index` of an experiment seeded with `master`.
    static StreamSeeds for_trial(std::uint64_t master, std::uint64_t index);
};

/**
 * The receive stream of every antenna, realized over stream indices
 * [-pad, (n_blocks + 1) * n_s). Index 0 is the start of the first block;
 * negative indices carry noise only.
 */
struct ReceiveStream {
    std::vector<Samples> antennas;
    std::size_t pad = 0;

    /// Samples [start, start + length) of antenna rx in stream coordinates.
    [[nodiscard]] Samples slice(std::size_t rx, std::int64_t start, std::size_t length) const;
};

/**
 * Builds the receive stream from n_blocks + 1 transmitted blocks per transmit
 * antenna. Every delay in [-pad, n_s - 1] then has a full window of
 * n_blocks * n_s samples.
 */
ReceiveStream build_stream(const SystemConfig& config, const ChannelRealization& channel,
                           const NoiseMixture& mixture, std::size_t pad,
                           const StreamSeeds& seeds);

struct ReceivedWindow {
    std::vector<Samples> samples;  ///< m_r arrays of equal length
    std::int64_t d_true = 0;
    std::uint64_t signal_seed = 0;

    [[nodiscard]] std::size_t length() const noexcept {
        return samples.empty() ? 0 : samples.front().size();
    }
};

/**
 * Observation window of n_blocks * n_s samples per receive antenna starting at
 * stream index d_true. The channel is drawn from seeds.channel unless given.
 * Throws RangeError when d_true is outside [-pad, n_s - 1].
 */
ReceivedWindow assemble_window(const SystemConfig& config, const DelayProfile& profile,
                               const NoiseMixture& mixture, std::int64_t d_true,
                               const StreamSeeds& seeds, std::size_t pad);

ReceivedWindow assemble_window(const SystemConfig& config, const ChannelRealization& channel,
                               const NoiseMixture& mixture, std::int64_t d_true,
                               const StreamSeeds& seeds, std::size_t pad);

/// Dumps each receive antenna to `<prefix>_rx<j>.iq`.
void dump_window(const std::filesystem::path& prefix, const ReceivedWindow& window);

}  // namespace zpsync

#endif  // ZPSYNC_CHANNEL_HPP
