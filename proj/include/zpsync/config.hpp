#ifndef ZPSYNC_CONFIG_HPP
#define ZPSYNC_CONFIG_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace zpsync {

using cplx = std::complex<double>;
using Samples = std::vector<cplx>;

/**
 * Dimensional and statistical parameters of one ZP-OFDM link.
 *
 * A block carries n_x data samples followed by n_z zeros, so n_s = n_x + n_z.
 * The estimator observes n_blocks blocks per receive antenna. sample_rate is
 * carried as metadata only; every algorithm works on sample indices.
 */
struct SystemConfig {
    std::size_t n_x = 512;
    std::size_t n_z = 20;
    std::size_t n_h = 10;
    std::size_t n_blocks = 10;
    std::size_t m_t = 1;
    std::size_t m_r = 1;
    std::size_t mod_order = 128;
    double sigma_x2 = 1.0;
    double sample_rate = 1e6;
    double snr_db = 10.0;
    /// Draw i.i.d. complex Gaussian data samples instead of QAM + IDFT.
    bool gaussian_source = false;

    [[nodiscard]] constexpr std::size_t n_s() const noexcept { return n_x + n_z; }
    [[nodiscard]] constexpr std::size_t window_length() const noexcept { return n_blocks * n_s(); }
    /// Transmit power carried by each antenna.
    [[nodiscard]] double per_antenna_power() const noexcept {
        return sigma_x2 / static_cast<double>(m_t);
    }

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

}  // namespace zpsync

#endif  // ZPSYNC_CONFIG_HPP
