#include "mmlink/experiment_config.hpp"

#include "mmlink/errors.hpp"
#include "mmlink/link_config.hpp"

#include <filesystem>
#include <fstream>

namespace mmlink {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double number(const std::string& value, const std::string& key, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw FormatError(where + ": bad numeric value '" + value + "' for " + key);
    }
}

std::string resolve(const std::string& path, const std::string& baseDir) {
    if (path.empty() || baseDir.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (std::filesystem::path(baseDir) / path).string();
}

} // namespace

Experiment parseExperimentConfig(std::istream& in, const std::string& sourceName,
                                 const std::string& baseDir) {
    Experiment exp;
    ExperimentConfig& cfg = exp.config;
    std::string line;
    int lineNo = 0;

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
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string& where = sourceName;

        if (key == "role") {
            if (value != "sender" && value != "echo" && value != "in-process") {
                throw FormatError(where + ": role must be sender, echo or in-process, got '" +
                                  value + "'");
            }
            exp.role = value;
            if (value == "in-process") cfg.mode = ExperimentConfig::Mode::inProcess;
        } else if (key == "peer_address") {
            cfg.peer.address = value;
        } else if (key == "video_port") {
            cfg.peer.videoPort = static_cast<uint16_t>(number(value, key, where));
        } else if (key == "audio_port") {
            cfg.peer.audioPort = static_cast<uint16_t>(number(value, key, where));
        } else if (key == "chat_port") {
            cfg.peer.chatPort = static_cast<uint16_t>(number(value, key, where));
        } else if (key == "video") {
            cfg.videoPath = resolve(value, baseDir);
        } else if (key == "audio") {
            cfg.audioPath = resolve(value, baseDir);
        } else if (key == "audio_rate") {
            cfg.audioRate = static_cast<int>(number(value, key, where));
        } else if (key == "audio_channels") {
            cfg.audioChannels = static_cast<int>(number(value, key, where));
        } else if (key == "chat_count") {
            cfg.chatLineCount = static_cast<int>(number(value, key, where));
        } else if (key == "link_config") {
            cfg.link = loadLinkConfig(resolve(value, baseDir));
        } else if (key == "min_psnr_db") {
            cfg.thresholds.minPsnrDb = number(value, key, where);
        } else if (key == "max_loss_fraction") {
            cfg.thresholds.maxLossFraction = number(value, key, where);
        } else if (key == "max_rtt_ms") {
            cfg.thresholds.maxRttMs = number(value, key, where);
        } else if (key == "seed") {
            cfg.seed = static_cast<uint64_t>(number(value, key, where));
        } else if (key == "timeout_s") {
            cfg.echoTimeoutS = number(value, key, where);
        } else {
            throw FormatError(where + ": unknown key '" + key + "'");
        }
    }

    if (exp.role == "in-process" && !cfg.link.has_value()) {
        throw FormatError(sourceName + ": role in-process requires link_config");
    }
    if (cfg.thresholds.minPsnrDb <= 0 || cfg.thresholds.maxRttMs <= 0 ||
        cfg.thresholds.maxLossFraction < 0) {
        throw FormatError(sourceName + ": thresholds must be positive");
    }
    return exp;
}

Experiment loadExperimentConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open experiment config '" + path + "'");
    const std::string baseDir = std::filesystem::path(path).parent_path().string();
    return parseExperimentConfig(in, path, baseDir);
}

} // namespace mmlink
