#include "mmlink/link_config.hpp"

#include "mmlink/errors.hpp"

#include <fstream>
#include <sstream>

namespace mmlink {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parseNumber(const std::string& value, const std::string& key, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw FormatError(where + ": bad numeric value '" + value + "' for " + key);
    }
}

} // namespace

LinkModel parseLinkConfig(std::istream& in, const std::string& sourceName) {
    LinkModel model;
    bool kindSet = false;
    std::string line;
    int lineNo = 0;

    // First pass collects raw pairs so `kind` can establish defaults before
    // the overrides apply, regardless of key order in the file.
    std::vector<std::pair<std::string, std::string>> pairs;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(sourceName + ":" + std::to_string(lineNo) +
                              ": expected 'key = value', got '" + line + "'");
        }
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    for (const auto& [key, value] : pairs) {
        if (key == "kind") {
            if (value == "dsss") {
                model = LinkModel::dsssDefault();
            } else if (value == "mimo") {
                model = LinkModel::mimoDefault();
            } else {
                throw FormatError(sourceName + ": kind must be dsss or mimo, got '" + value + "'");
            }
            kindSet = true;
        }
    }
    if (!kindSet) throw FormatError(sourceName + ": missing required key 'kind'");

    for (const auto& [key, value] : pairs) {
        const std::string where = sourceName;
        if (key == "kind") {
            continue;
        } else if (key == "avg_snr_db") {
            model.avgSnrDb = parseNumber(value, key, where);
        } else if (key == "tx_antennas") {
            model.txAntennas = static_cast<int>(parseNumber(value, key, where));
        } else if (key == "rx_antennas") {
            model.rxAntennas = static_cast<int>(parseNumber(value, key, where));
        } else if (key == "chip_rate") {
            model.chipRate = parseNumber(value, key, where);
        } else if (key == "spread_code") {
            if (value == "barker11") {
                model.spreadCode = SpreadCode::barker11;
            } else if (value == "none") {
                model.spreadCode = SpreadCode::none;
            } else {
                throw FormatError(where + ": spread_code must be barker11 or none, got '" + value +
                                  "'");
            }
        } else if (key == "symbol_rate") {
            model.symbolRate = parseNumber(value, key, where);
        } else if (key == "bandwidth_hz") {
            model.bandwidthHz = parseNumber(value, key, where);
        } else if (key == "delay_spread_s") {
            model.delaySpreadS = parseNumber(value, key, where);
        } else if (key == "symbol_duration_s") {
            model.symbolDurationS = parseNumber(value, key, where);
        } else if (key == "isi_penalty_k") {
            model.isiPenaltyK = parseNumber(value, key, where);
        } else if (key == "seed") {
            model.seed = static_cast<uint64_t>(parseNumber(value, key, where));
        } else if (key == "hop_delay_us") {
            model.hopDelayUs = static_cast<uint64_t>(parseNumber(value, key, where));
        } else {
            throw FormatError(where + ": unknown key '" + key + "'");
        }
    }

    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(sourceName + ": " + e.what());
    }
    return model;
}

LinkModel loadLinkConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open link config '" + path + "'");
    return parseLinkConfig(in, path);
}

} // namespace mmlink
