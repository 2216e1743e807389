#ifndef ZPSYNC_WAVEFORM_HPP
#define ZPSYNC_WAVEFORM_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "zpsync/config.hpp"
#include "zpsync/rng.hpp"

namespace zpsync {

/**
 * QAM constellation with unit average symbol energy.
 *
 * Even bit counts give the usual square grid. Odd bit counts of 5 and above
 * give the cross constellation (32, 128, 512, ...): a square grid of side
 * 3 * 2^((b-3)/2) with a square of side 1/6 of it removed at each corner.
 * M = 8 is the 4 x 2 rectangular grid. Points carry no bit labels.
 */
class QamConstellation {
public:
    /// Throws ConfigError unless order is a power of two >= 4.
    explicit QamConstellation(std::size_t order);

    [[nodiscard]] std::size_t order() const noexcept { return points_.size(); }
    [[nodiscard]] std::span<const cplx> points() const noexcept { return points_; }
    [[nodiscard]] cplx draw(Rng& rng) const;

private:
    std::vector<cplx> points_;
};

struct OfdmBlock {
    Samples samples;  ///< n_s samples; the last n_z are exactly zero.
    std::size_t antenna = 0;
    std::size_t block_index = 0;
};

/**
 * One ZP-OFDM block for a transmit antenna.
 *
 * n_x QAM symbols scaled by sqrt(sigma_x2 / m_t) go through a unitary inverse
 * DFT, so each time-domain data sample has expected power sigma_x2 / m_t.
 * With config.gaussian_source the data samples are drawn directly as
 * CN(0, sigma_x2 / m_t).
 */
OfdmBlock generate_block(const SystemConfig& config, std::size_t antenna,
                         std::size_t block_index, Rng& rng);

/// generate_block for block_index 0..n_blocks-1, concatenated.
Samples generate_frame(const SystemConfig& config, std::size_t antenna,
                       std::size_t n_blocks, Rng& rng);

/// In-place unitary inverse DFT (scaled by 1/sqrt(n)).
void inverse_dft_unitary(std::span<cplx> data);

/// Interleaved little-endian float64 I/Q dump, one value pair per sample.
void write_iq_dump(const std::filesystem::path& path, std::span<const cplx> samples);
Samples read_iq_dump(const std::filesystem::path& path);

}  // namespace zpsync

#endif  // ZPSYNC_WAVEFORM_HPP
