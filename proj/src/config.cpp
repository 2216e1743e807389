#include "zpsync/config.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "zpsync/error.hpp"

namespace zpsync {

void SystemConfig::validate() const {
    if (n_x == 0) throw ConfigError("n_x must be positive");
    if (n_h == 0) throw ConfigError("n_h must be positive");
    if (n_z < n_h) {
        throw ConfigError("zero pad n_z=" + std::to_string(n_z) +
                          " shorter than channel length n_h=" + std::to_string(n_h));
    }
    if (n_blocks == 0) throw ConfigError("n_blocks must be positive");
    if (m_t == 0 || m_r == 0) throw ConfigError("antenna counts must be positive");
    if (mod_order < 4 || !std::has_single_bit(mod_order)) {
        throw ConfigError("mod_order must be a power of two >= 4");
    }
    if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) throw ConfigError("sigma_x2 must be positive");
    if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
}

}  // namespace zpsync
