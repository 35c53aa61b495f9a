#pragma once

#include "mmlink/link.hpp"

#include <istream>
#include <string>

namespace mmlink {

// Plain-text key/value link configuration: one `key = value` per line,
// '#' starts a comment. Recognized keys mirror the LinkModel fields:
//   kind (dsss|mimo), avg_snr_db, tx_antennas, rx_antennas, chip_rate,
//   spread_code (barker11|none), symbol_rate, bandwidth_hz, delay_spread_s,
//   symbol_duration_s, isi_penalty_k, seed, hop_delay_us
// Unknown keys and unparsable values are errors. Throws FormatError.
LinkModel parseLinkConfig(std::istream& in, const std::string& sourceName = "<stream>");
LinkModel loadLinkConfig(const std::string& path);

} // namespace mmlink
